//! The three workflows behind the `validate`, `evolve` and `pip` subcommands.

use std::fmt;
use std::path::PathBuf;

use bandpip_core::dephasing::{master_coherence, master_entropy, INITIAL_COHERENCE};
use bandpip_core::info::entropy;
use bandpip_core::{
    coupling_realization, dephasing_rate, par, pip_curve, reduce_system, trajectory, validity_criteria,
    Complex64, DensityMatrix, JointState, LogBase, PipConfig, SamplingKey, SystemParams,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{output_path, write_table, Cell, Table};

pub const C1_MIN: f64 = 0.5;
/// `c₂ ≪ 1` is reported as a warning once `c₂` reaches this value.
pub const C2_WARN: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Warn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateReport {
    pub params: SystemParams,
    pub c1: f64,
    pub c2: f64,
    pub gamma: f64,
    pub status: Status,
    pub warnings: Vec<String>,
}

impl fmt::Display for ValidateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.params;
        writeln!(f, "N        = {}", p.n_levels)?;
        writeln!(f, "lambda   = {}", p.lambda)?;
        writeln!(f, "delta_e  = {}", p.delta_e)?;
        writeln!(f, "delta_eps= {}", p.delta_eps)?;
        writeln!(f, "c1       = {:.6} (need >= {C1_MIN})", self.c1)?;
        writeln!(f, "c2       = {:.6} (need << 1, warn at {C2_WARN})", self.c2)?;
        writeln!(f, "Gamma    = {:.6}", self.gamma)?;
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        write!(
            f,
            "status   = {}",
            match self.status {
                Status::Pass => "pass",
                Status::Warn => "warn",
            }
        )
    }
}

pub fn cmd_validate(config: &RunConfig) -> ValidateReport {
    let (c1, c2) = validity_criteria(&config.params);
    let mut warnings = Vec::new();
    if c1 < C1_MIN {
        warnings.push(format!("c1 = {c1} is below {C1_MIN}; the master equation may not apply"));
    }
    if c2 >= C2_WARN {
        warnings.push(format!("c2 = {c2} is not small; the master equation may not apply"));
    }
    ValidateReport {
        params: config.params,
        c1,
        c2,
        gamma: dephasing_rate(&config.params),
        status: if warnings.is_empty() { Status::Pass } else { Status::Warn },
        warnings,
    }
}

/// Rebuild `ρ_S` through the validating constructor and take its entropy.
fn checked_system_state(state: &JointState, base: LogBase) -> Result<(DensityMatrix, f64), CliError> {
    let context = || format!("t = {}", state.time());
    let rho = DensityMatrix::new(reduce_system(state).entries().clone())
        .map_err(|e| CliError::numerical(context(), e))?;
    let s = entropy(&rho, base).map_err(|e| CliError::numerical(context(), e))?;
    Ok((rho, s))
}

const EVOLVE_COLUMNS: &[&str] = &[
    "seed_index",
    "t",
    "re_rho12",
    "im_rho12",
    "abs_rho12",
    "entropy_s",
    "master_abs_rho12",
    "master_entropy",
];

const EVOLVE_MEAN_COLUMNS: &[&str] = &[
    "t",
    "n_realizations",
    "mean_re_rho12",
    "mean_im_rho12",
    "mean_abs_rho12",
    "mean_ln_abs_rho12",
    "mean_entropy_s",
    "master_abs_rho12",
    "master_entropy",
];

/// `(t, ρ₁₂, S_S)` at one time point.
type Sample = (f64, Complex64, f64);

/// Write the per-realization trajectory file and, for ensembles, the mean file.
pub fn cmd_evolve(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let params = config.params;
    let base = config.base();
    let rho12_initial = INITIAL_COHERENCE;

    let per_realization = par::map_range(config.realizations, |r| -> Result<Vec<Sample>, CliError> {
        let coupling = coupling_realization(&params, r as u64);
        let states = trajectory(&params, &coupling, &config.times)
            .map_err(|e| CliError::numerical(format!("realization {r}"), e))?;
        states
            .iter()
            .map(|s| {
                let (rho, ent) = checked_system_state(s, base)?;
                Ok((s.time(), rho.get(0, 1), ent))
            })
            .collect()
    });
    let runs = per_realization.into_iter().collect::<Result<Vec<_>, _>>()?;

    let master: Vec<(f64, f64)> = config
        .times
        .iter()
        .map(|&t| {
            (
                master_coherence(&params, rho12_initial, t).norm(),
                master_entropy(&params, rho12_initial, t, base),
            )
        })
        .collect();

    let mut table = Table::new("evolve/v1", EVOLVE_COLUMNS);
    for (r, run) in runs.iter().enumerate() {
        for ((t, rho12, ent), (m_abs, m_ent)) in run.iter().zip(&master) {
            table.push(vec![
                Cell::Int(r as u64),
                Cell::Float(*t),
                Cell::Float(rho12.re),
                Cell::Float(rho12.im),
                Cell::Float(rho12.norm()),
                Cell::Float(*ent),
                Cell::Float(*m_abs),
                Cell::Float(*m_ent),
            ]);
        }
    }
    let hash = config.hash();
    let fmt = config.output.format;
    let mut written = Vec::new();
    let path = output_path(&config.output.prefix, "evolve", fmt);
    write_table(&path, &table, fmt, &hash)?;
    written.push(path);

    if config.realizations > 1 {
        let n = runs.len() as f64;
        let mut mean = Table::new("evolve_mean/v1", EVOLVE_MEAN_COLUMNS);
        for (k, (m_abs, m_ent)) in master.iter().enumerate() {
            let column = runs.iter().map(|run| &run[k]);
            let (mut re, mut im, mut abs, mut ln_abs, mut ent) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for (_, z, s) in column {
                re += z.re;
                im += z.im;
                abs += z.norm();
                ln_abs += z.norm().ln();
                ent += s;
            }
            mean.push(vec![
                Cell::Float(config.times[k]),
                Cell::Int(runs.len() as u64),
                Cell::Float(re / n),
                Cell::Float(im / n),
                Cell::Float(abs / n),
                Cell::Float(ln_abs / n),
                Cell::Float(ent / n),
                Cell::Float(*m_abs),
                Cell::Float(*m_ent),
            ]);
        }
        let path = output_path(&config.output.prefix, "evolve_mean", fmt);
        write_table(&path, &mean, fmt, &hash)?;
        written.push(path);
    }
    Ok(written)
}

const PIP_COLUMNS: &[&str] = &["t", "n_f", "f", "mi_mean", "mi_stderr", "n_samples", "method", "ceiling"];

/// One PIP file per requested convention (and per realization when there are several).
pub fn cmd_pip(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let params = config.params;
    let hash = config.hash();
    let fmt = config.output.format;
    let mut written = Vec::new();
    for r in 0..config.realizations {
        let coupling = coupling_realization(&params, r as u64);
        let states = trajectory(&params, &coupling, &config.times)
            .map_err(|e| CliError::numerical(format!("realization {r}"), e))?;
        for &convention in &config.pip.conventions.conventions() {
            let pip_cfg = PipConfig {
                convention,
                ..config.pip.config
            };
            let mut table = Table::new("pip/v1", PIP_COLUMNS);
            for (time_index, state) in states.iter().enumerate() {
                checked_system_state(state, pip_cfg.base)?;
                let key = SamplingKey {
                    seed: bandpip_core::rng::derive_seed(params.seed, &[r as u64]),
                    time_index: time_index as u64,
                };
                let curve = pip_curve(state, &pip_cfg, key)
                    .map_err(|e| CliError::numerical(format!("t = {}, realization {r}", state.time()), e))?;
                for p in &curve.points {
                    table.push(vec![
                        Cell::Float(curve.time),
                        Cell::Int(p.n_fragment as u64),
                        Cell::Float(p.fraction),
                        Cell::Float(p.mean_mi),
                        Cell::Float(p.stderr),
                        Cell::Int(p.n_samples as u64),
                        Cell::Text(p.method.as_str()),
                        Cell::Float(curve.ceiling),
                    ]);
                }
            }
            let stem = if config.realizations > 1 {
                format!("pip_{}_r{r}", convention.as_str())
            } else {
                format!("pip_{}", convention.as_str())
            };
            let path = output_path(&config.output.prefix, &stem, fmt);
            write_table(&path, &table, fmt, &hash)?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Run `f` on a pool of `threads` workers (or the global pool when `None`).
#[cfg(feature = "parallel")]
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Without the `parallel` feature everything runs on the calling thread.
#[cfg(not(feature = "parallel"))]
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    if threads == Some(0) {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    Ok(f())
}
