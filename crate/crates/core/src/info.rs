//! Von Neumann entropy, qubit–fragment mutual information and averaged
//! partial information plots (PIPs).
//!
//! Entropy is `S(ρ) = −Σ_k λ_k log λ_k`, in bits by default.
//!
//! Because `ρ_SF` is pure, `S_SF = 0` and only two entropies are needed for
//! `I(S:F)`. The fragment entropy `S_F` is taken from the `2 × 2` qubit
//! marginal of the conditioned state, which has the same nonzero spectrum as
//! the `n_F × n_F` matrix `ρ_F`; this keeps each fragment evaluation linear
//! in `n_F`.

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::JointState;
use crate::par;
use crate::reduction::{fragment_projection, reduce_system, DensityMatrix, Fragment};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "e")]
    Natural,
}

impl LogBase {
    fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::Natural => x.ln(),
        }
    }
}

/// How the qubit entropy enters `I(S:F) = S_S + S_F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `S_S` from the full joint state, `S_F` from the conditioned state.
    #[default]
    Paper,
    /// Both entropies from the conditioned pure state: `I = 2 S_F`.
    PureBipartite,
}

impl Convention {
    pub fn as_str(self) -> &'static str {
        match self {
            Convention::Paper => "paper",
            Convention::PureBipartite => "pure_bipartite",
        }
    }
}

/// Entropy of a clamped eigenvalue list; `0 log 0 = 0`.
pub fn entropy_of_spectrum(eigenvalues: &[f64], base: LogBase) -> f64 {
    let s: f64 = eigenvalues
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * base.log(p))
        .sum();
    // Rounding can leave -0.0 or -1e-17 for pure states.
    s.max(0.0)
}

pub fn entropy(rho: &DensityMatrix, base: LogBase) -> Result<f64> {
    Ok(entropy_of_spectrum(&rho.eigenvalues()?, base))
}

/// Evaluates `I(S:F)` for many fragments of one state, caching `S_S`.
#[derive(Debug, Clone)]
pub struct MutualInformation<'a> {
    state: &'a JointState,
    system_entropy: f64,
    base: LogBase,
    convention: Convention,
}

impl<'a> MutualInformation<'a> {
    pub fn new(state: &'a JointState, base: LogBase, convention: Convention) -> Result<Self> {
        let system_entropy = entropy(&reduce_system(state), base)?;
        Ok(Self {
            state,
            system_entropy,
            base,
            convention,
        })
    }

    pub fn system_entropy(&self) -> f64 {
        self.system_entropy
    }

    /// `I(S:E) = 2 S_S`, the value at the full environment.
    pub fn ceiling(&self) -> f64 {
        2.0 * self.system_entropy
    }

    pub fn fragment_entropy(&self, fragment: &Fragment) -> Result<f64> {
        let conditioned = fragment_projection(self.state, fragment)?;
        if fragment.len() == 1 {
            // ρ_F is the 1x1 matrix [1]; the 2x2 route would only add rounding noise.
            return Ok(0.0);
        }
        entropy(&conditioned.system_marginal(), self.base)
    }

    pub fn evaluate(&self, fragment: &Fragment) -> Result<f64> {
        let s_f = self.fragment_entropy(fragment)?;
        Ok(match self.convention {
            Convention::Paper => self.system_entropy + s_f,
            Convention::PureBipartite => 2.0 * s_f,
        })
    }
}

pub fn mutual_information(
    state: &JointState,
    fragment: &Fragment,
    base: LogBase,
    convention: Convention,
) -> Result<f64> {
    MutualInformation::new(state, base, convention)?.evaluate(fragment)
}

/// `C(n, k)`, or `None` when it does not fit in a `u128`.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

fn check_fragment_size(n_levels: usize, n_fragment: usize) -> Result<()> {
    if n_fragment == 0 || n_fragment > n_levels {
        return Err(Error::InvalidFragment(format!(
            "fragment size {n_fragment} outside 1..={n_levels}"
        )));
    }
    Ok(())
}

/// All `n_fragment`-subsets of `1..=n_levels` in lexicographic order.
pub fn enumerate_fragments(
    n_levels: usize,
    n_fragment: usize,
    cap: u128,
) -> Result<impl Iterator<Item = Fragment>> {
    check_fragment_size(n_levels, n_fragment)?;
    match binomial(n_levels, n_fragment) {
        Some(count) if count <= cap => {}
        _ => {
            return Err(Error::EnumerationCapExceeded {
                n_levels,
                n_fragment,
                cap,
            })
        }
    }
    Ok((1..=n_levels)
        .combinations(n_fragment)
        .map(Fragment::from_sorted_unchecked))
}

/// One uniformly random `n_fragment`-subset (levels distinct within the draw).
pub fn sample_fragment<R: Rng + ?Sized>(n_levels: usize, n_fragment: usize, rng: &mut R) -> Fragment {
    let mut levels: Vec<usize> = rand::seq::index::sample(rng, n_levels, n_fragment)
        .into_iter()
        .map(|i| i + 1)
        .collect();
    levels.sort_unstable();
    Fragment::from_sorted_unchecked(levels)
}

/// `count` independent uniform draws; the same subset may appear more than once.
pub fn sample_fragments<R: Rng + ?Sized>(
    n_levels: usize,
    n_fragment: usize,
    rng: &mut R,
    count: usize,
) -> Result<Vec<Fragment>> {
    check_fragment_size(n_levels, n_fragment)?;
    Ok((0..count).map(|_| sample_fragment(n_levels, n_fragment, rng)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipConfig {
    pub convention: Convention,
    pub base: LogBase,
    /// Largest `C(N, n_F)` that is averaged exactly.
    pub enumeration_cap: u128,
    pub batch_size: usize,
    /// Monte Carlo stops once the standard error drops below this.
    pub stderr_tol: f64,
    pub max_samples: usize,
}

impl Default for PipConfig {
    fn default() -> Self {
        Self {
            convention: Convention::Paper,
            base: LogBase::Two,
            enumeration_cap: 100_000,
            batch_size: 200,
            stderr_tol: 1e-3,
            max_samples: 100_000,
        }
    }
}

impl PipConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidParams("batch_size must be positive".into()));
        }
        if self.max_samples == 0 {
            return Err(Error::InvalidParams("max_samples must be positive".into()));
        }
        if !(self.stderr_tol.is_finite() && self.stderr_tol >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "stderr_tol must be finite and >= 0, got {}",
                self.stderr_tol
            )));
        }
        Ok(())
    }
}

/// Identifies the random stream used for Monte Carlo draws.
///
/// Draw `d` for fragment size `n_F` uses the stream keyed by
/// `(seed, time_index, n_F, d)`, so results do not depend on thread count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingKey {
    pub seed: u64,
    pub time_index: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AverageMethod {
    Exact,
    MonteCarlo,
}

impl AverageMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            AverageMethod::Exact => "exact",
            AverageMethod::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipPoint {
    pub n_fragment: usize,
    pub fraction: f64,
    pub mean_mi: f64,
    /// Standard error of the mean; zero for exact enumeration.
    pub stderr: f64,
    pub n_samples: usize,
    pub method: AverageMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipCurve {
    pub time: f64,
    pub points: Vec<PipPoint>,
    pub ceiling: f64,
    pub convention: Convention,
}

impl PipCurve {
    /// Smallest fraction `f` whose averaged value reaches `ratio · ceiling`.
    pub fn first_fraction_reaching(&self, ratio: f64) -> Option<f64> {
        let target = ratio * self.ceiling;
        self.points.iter().find(|p| p.mean_mi >= target).map(|p| p.fraction)
    }
}

/// Welford accumulator; fed in a fixed order so the result is reproducible.
#[derive(Debug, Default, Clone, Copy)]
struct RunningMean {
    count: usize,
    mean: f64,
    m2: f64,
}

impl RunningMean {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn stderr(&self) -> f64 {
        if self.count < 2 {
            return f64::INFINITY;
        }
        let var = self.m2.max(0.0) / (self.count - 1) as f64;
        (var / self.count as f64).sqrt()
    }
}

fn exact_point(mi: &MutualInformation<'_>, fragments: Vec<Fragment>) -> Result<RunningMean> {
    let values = par::first_error(par::map_slice(&fragments, |f| mi.evaluate(f)))?;
    let mut acc = RunningMean::default();
    values.into_iter().for_each(|v| acc.push(v));
    Ok(acc)
}

fn monte_carlo_point(
    mi: &MutualInformation<'_>,
    n_levels: usize,
    n_fragment: usize,
    config: &PipConfig,
    key: SamplingKey,
) -> Result<RunningMean> {
    let mut acc = RunningMean::default();
    while acc.count < config.max_samples {
        let start = acc.count;
        let len = config.batch_size.min(config.max_samples - start);
        let batch = par::map_range(len, |j| {
            let draw = (start + j) as u64;
            let mut draw_rng = rng::derived_rng(
                key.seed,
                &[rng::domain::FRAGMENT, key.time_index, n_fragment as u64, draw],
            );
            mi.evaluate(&sample_fragment(n_levels, n_fragment, &mut draw_rng))
        });
        par::first_error(batch)?.into_iter().for_each(|v| acc.push(v));
        if acc.stderr() < config.stderr_tol {
            break;
        }
    }
    Ok(acc)
}

fn point_with(
    mi: &MutualInformation<'_>,
    n_fragment: usize,
    config: &PipConfig,
    key: SamplingKey,
) -> Result<PipPoint> {
    let n_levels = mi.state.n_levels();
    check_fragment_size(n_levels, n_fragment)?;
    let (acc, method) = match enumerate_fragments(n_levels, n_fragment, config.enumeration_cap) {
        Ok(fragments) => (exact_point(mi, fragments.collect())?, AverageMethod::Exact),
        Err(Error::EnumerationCapExceeded { .. }) => (
            monte_carlo_point(mi, n_levels, n_fragment, config, key)?,
            AverageMethod::MonteCarlo,
        ),
        Err(e) => return Err(e),
    };
    let stderr = match method {
        AverageMethod::Exact => 0.0,
        AverageMethod::MonteCarlo if acc.count < 2 => 0.0,
        AverageMethod::MonteCarlo => acc.stderr(),
    };
    Ok(PipPoint {
        n_fragment,
        fraction: n_fragment as f64 / n_levels as f64,
        mean_mi: acc.mean,
        stderr,
        n_samples: acc.count,
        method,
    })
}

/// Averaged `I(S:F)` over fragments of size `n_fragment`: exact when
/// `C(N, n_F)` is within the enumeration cap, batched Monte Carlo otherwise.
pub fn pip_point(
    state: &JointState,
    n_fragment: usize,
    config: &PipConfig,
    key: SamplingKey,
) -> Result<PipPoint> {
    config.validate()?;
    let mi = MutualInformation::new(state, config.base, config.convention)?;
    point_with(&mi, n_fragment, config, key)
}

/// The averaged curve for `n_F = 1..=N`.
pub fn pip_curve(state: &JointState, config: &PipConfig, key: SamplingKey) -> Result<PipCurve> {
    config.validate()?;
    let mi = MutualInformation::new(state, config.base, config.convention)?;
    let points = (1..=state.n_levels())
        .map(|k| point_with(&mi, k, config, key))
        .collect::<Result<Vec<_>>>()?;
    Ok(PipCurve {
        time: state.time(),
        points,
        ceiling: mi.ceiling(),
        convention: config.convention,
    })
}
