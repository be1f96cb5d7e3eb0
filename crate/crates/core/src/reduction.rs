//! Reduced and conditioned states.
//!
//! A fragment `F` is a subset of band levels. Restricting the joint pure
//! state to `F` and renormalizing gives the pure state `|Ψ_SF⟩`; its two
//! marginals are the `2 × 2` qubit matrix `Tr_F ρ_SF` and the `n_F × n_F`
//! fragment matrix `ρ_F = Tr_S ρ_SF`. The environment is one system whose
//! Hilbert space is a direct sum over levels, so there is no partial trace
//! over "the rest" of the band: levels outside `F` are dropped, not traced.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolve::{CVector, JointState};
use crate::model::CMatrix;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-CLAMP_TOL, 0)` are treated as rounding noise and set to zero.
pub const CLAMP_TOL: f64 = 1e-10;
/// Fragments carrying less than this share of the total norm are rejected.
pub const DEGENERATE_WEIGHT: f64 = 1e-12;

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    /// Checks Hermiticity and trace; positivity is checked when the spectrum is taken.
    pub fn new(entries: CMatrix) -> Result<Self> {
        let d = entries.nrows();
        if entries.ncols() != d || d == 0 {
            return Err(Error::InvalidDensityMatrix(format!(
                "expected a nonempty square matrix, got {}x{}",
                d,
                entries.ncols()
            )));
        }
        for i in 0..d {
            for j in i..d {
                let gap = (entries[(i, j)] - entries[(j, i)].conj()).norm();
                if gap > HERMITIAN_TOL {
                    return Err(Error::InvalidDensityMatrix(format!(
                        "not Hermitian at ({i}, {j}): deviation {gap:e}"
                    )));
                }
            }
        }
        let trace = entries.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {trace}, expected 1")));
        }
        Ok(Self { entries })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            entries: CMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    /// Ascending eigenvalues with the clamp policy applied.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let raw = match self.dim() {
            1 => vec![self.entries[(0, 0)].re],
            2 => {
                let a = self.entries[(0, 0)].re;
                let d = self.entries[(1, 1)].re;
                let b = self.entries[(0, 1)];
                let mean = 0.5 * (a + d);
                let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
                vec![mean - radius, mean + radius]
            }
            n => {
                let eig = SymmetricEigen::try_new(self.entries.clone(), f64::EPSILON, 10_000 * n)
                    .ok_or(Error::NoConvergence { dim: n })?;
                let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
                v.sort_by(f64::total_cmp);
                v
            }
        };
        raw.into_iter().map(clamp_eigenvalue).collect()
    }
}

fn clamp_eigenvalue(x: f64) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else if x >= -CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(Error::PositivityViolation { eigenvalue: x })
    }
}

/// Strictly ascending, 1-based band levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fragment {
    levels: Vec<usize>,
}

impl Fragment {
    pub fn new(levels: Vec<usize>, n_levels: usize) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidFragment("fragment is empty".into()));
        }
        if levels[0] < 1 || *levels.last().unwrap() > n_levels {
            return Err(Error::InvalidFragment(format!(
                "levels {levels:?} out of range 1..={n_levels}"
            )));
        }
        if levels.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidFragment(format!(
                "levels {levels:?} are not strictly ascending"
            )));
        }
        Ok(Self { levels })
    }

    /// Caller guarantees the level list is valid.
    pub(crate) fn from_sorted_unchecked(levels: Vec<usize>) -> Self {
        Self { levels }
    }

    pub fn full(n_levels: usize) -> Self {
        Self {
            levels: (1..=n_levels).collect(),
        }
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// 0-based positions into a state row.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.levels.iter().map(|l| l - 1)
    }
}

/// The renormalized restriction of a joint state to a fragment.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionedState {
    rows: [CVector; 2],
    weight: f64,
}

impl ConditionedState {
    /// `N_F = Σ_i Σ_{n∈F} |a_{in}|²` before renormalization.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn n_fragment(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, i: usize) -> &CVector {
        &self.rows[i]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.rows.iter().map(|r| r.norm_squared()).sum()
    }

    /// `Tr_F ρ_SF`, the qubit marginal of the conditioned state.
    pub fn system_marginal(&self) -> DensityMatrix {
        DensityMatrix {
            entries: row_gram(&self.rows),
        }
    }

    /// The full `2n_F × 2n_F` projector `|Ψ_SF⟩⟨Ψ_SF|`, basis index `i·n_F + n`.
    pub fn joint_density(&self) -> DensityMatrix {
        let nf = self.n_fragment();
        let psi = CVector::from_iterator(2 * nf, self.rows[0].iter().chain(self.rows[1].iter()).copied());
        DensityMatrix {
            entries: &psi * psi.adjoint(),
        }
    }
}

/// `G[i,j] = Σ_n a_{i,n} a*_{j,n}` for the two sector rows.
fn row_gram(rows: &[CVector; 2]) -> CMatrix {
    let g00 = rows[0].norm_squared();
    let g11 = rows[1].norm_squared();
    let g01 = rows[1].dotc(&rows[0]);
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(g00, 0.0),
            g01,
            g01.conj(),
            Complex64::new(g11, 0.0),
        ],
    )
}

/// `ρ_S = Tr_E |Ψ⟩⟨Ψ|`.
pub fn reduce_system(state: &JointState) -> DensityMatrix {
    DensityMatrix {
        entries: row_gram(state.rows()),
    }
}

pub fn fragment_projection(state: &JointState, fragment: &Fragment) -> Result<ConditionedState> {
    let n = state.n_levels();
    if let Some(&last) = fragment.levels().last() {
        if last > n {
            return Err(Error::InvalidFragment(format!(
                "level {last} out of range for {n} levels"
            )));
        }
    }
    let gather = |i: usize| CVector::from_iterator(fragment.len(), fragment.indices().map(|k| state.amplitude(i, k)));
    let mut rows = [gather(0), gather(1)];
    let weight: f64 = rows.iter().map(|r| r.norm_squared()).sum();
    if weight < DEGENERATE_WEIGHT * state.norm_sqr() {
        return Err(Error::DegenerateFragment {
            levels: fragment.levels().to_vec(),
            weight,
        });
    }
    let scale = Complex64::new(1.0 / weight.sqrt(), 0.0);
    for r in &mut rows {
        *r *= scale;
    }
    Ok(ConditionedState { rows, weight })
}

/// `ρ_F[n,m] = Σ_i a_{i,n} a*_{i,m}` over the conditioned amplitudes.
pub fn reduce_fragment(conditioned: &ConditionedState) -> DensityMatrix {
    let entries = conditioned
        .rows
        .iter()
        .map(|r| r * r.adjoint())
        .fold(CMatrix::zeros(conditioned.n_fragment(), conditioned.n_fragment()), |acc, m| acc + m);
    DensityMatrix { entries }
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.entries.iter().map(|z| z.norm_sqr()).sum()
}
