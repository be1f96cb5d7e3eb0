//! Model construction: parameters, the random coupling operator, the two
//! spin-sector Hamiltonian blocks, and the derived dephasing scales.
//!
//! The total Hamiltonian is `H = (ΔE/2) σz ⊗ I + I ⊗ H_E + σz ⊗ C` with
//! `H_E = Σ_n (δε/N) n |n⟩⟨n|`. Because every term commutes with `σz ⊗ I`,
//! `H` is block diagonal in the qubit basis and each block is an `N × N`
//! matrix acting on the band alone:
//!
//! ```text
//! H_± = ±(ΔE/2) I + H_E ± C
//! ```

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, SimRng};

pub type CMatrix = DMatrix<Complex64>;

/// The model constants of one run plus the master RNG seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub n_levels: usize,
    /// Qubit gap ΔE.
    pub delta_e: f64,
    /// Band width δε.
    pub delta_eps: f64,
    /// Global coupling strength λ.
    pub lambda: f64,
    pub seed: u64,
}

impl SystemParams {
    pub fn new(n_levels: usize, delta_e: f64, delta_eps: f64, lambda: f64, seed: u64) -> Result<Self> {
        let params = Self {
            n_levels,
            delta_e,
            delta_eps,
            lambda,
            seed,
        };
        params.validate()?;
        Ok(params)
    }

    /// The N = 10 run: λ = 2.5e-2, ΔE = 1, δε = 0.5.
    pub fn paper_n10(seed: u64) -> Self {
        Self {
            n_levels: 10,
            delta_e: 1.0,
            delta_eps: 0.5,
            lambda: 2.5e-2,
            seed,
        }
    }

    /// The N = 100 run: λ = 1.5e-2, other constants as for N = 10.
    pub fn paper_n100(seed: u64) -> Self {
        Self {
            n_levels: 100,
            delta_e: 1.0,
            delta_eps: 0.5,
            lambda: 1.5e-2,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_levels < 2 {
            return Err(Error::InvalidParams(format!(
                "n_levels must be at least 2, got {}",
                self.n_levels
            )));
        }
        if !(self.delta_eps.is_finite() && self.delta_eps > 0.0) {
            return Err(Error::InvalidParams(format!(
                "delta_eps must be positive and finite, got {}",
                self.delta_eps
            )));
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "lambda must be non-negative and finite, got {}",
                self.lambda
            )));
        }
        if !self.delta_e.is_finite() {
            return Err(Error::InvalidParams(format!(
                "delta_e must be finite, got {}",
                self.delta_e
            )));
        }
        Ok(())
    }

    /// Band energy of level `n` (1-based).
    pub fn level_energy(&self, n: usize) -> f64 {
        self.delta_eps / self.n_levels as f64 * n as f64
    }

    /// RNG for coupling realization `realization` of this parameter set.
    pub fn coupling_rng(&self, realization: u64) -> SimRng {
        rng::derived_rng(self.seed, &[rng::domain::COUPLING, realization])
    }
}

/// Hermitian coupling operator `C` with zero diagonal, λ already folded in.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    entries: CMatrix,
}

impl CouplingMatrix {
    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Upper-triangular entries in row-major order, `(n1, n2, C[n1, n2])`, 0-based.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        let n = self.dim();
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j, self.entries[(i, j)])))
    }

    /// Wrap an arbitrary matrix, checking Hermiticity and the zero diagonal exactly.
    pub fn from_matrix(entries: CMatrix) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: entries.ncols(),
            });
        }
        for i in 0..n {
            if entries[(i, i)] != Complex64::new(0.0, 0.0) {
                return Err(Error::InvalidParams(format!("coupling diagonal entry {i} is nonzero")));
            }
            for j in (i + 1)..n {
                if entries[(i, j)] != entries[(j, i)].conj() {
                    return Err(Error::InvalidParams(format!(
                        "coupling is not Hermitian at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { entries })
    }
}

/// Draw `C` for the given parameters.
///
/// Each upper-triangular pair gets `c = (x + i y)/√2` with `x, y` independent
/// standard normals, so `⟨c⟩ = 0`, `⟨c c⟩ = 0` and `⟨c c*⟩ = 1`. Pairs are
/// drawn in row-major order `(0,1), (0,2), …, (N-2,N-1)`, real part first.
pub fn build_coupling_matrix<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> CouplingMatrix {
    let n = params.n_levels;
    let scale = params.lambda / std::f64::consts::SQRT_2;
    let mut entries = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            let c = Complex64::new(scale * x, scale * y);
            entries[(i, j)] = c;
            entries[(j, i)] = c.conj();
        }
    }
    CouplingMatrix { entries }
}

/// `build_coupling_matrix` with the stream for realization `realization` of `params.seed`.
pub fn coupling_realization(params: &SystemParams, realization: u64) -> CouplingMatrix {
    build_coupling_matrix(params, &mut params.coupling_rng(realization))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianBlocks {
    pub h_plus: CMatrix,
    pub h_minus: CMatrix,
}

impl HamiltonianBlocks {
    pub fn dim(&self) -> usize {
        self.h_plus.nrows()
    }

    /// Block for qubit sector `sector` (0 = `+`, 1 = `−`).
    pub fn block(&self, sector: usize) -> &CMatrix {
        match sector {
            0 => &self.h_plus,
            1 => &self.h_minus,
            _ => panic!("qubit sector index {sector} out of range"),
        }
    }
}

pub fn build_blocks(params: &SystemParams, coupling: &CouplingMatrix) -> Result<HamiltonianBlocks> {
    let n = params.n_levels;
    if coupling.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: coupling.dim(),
        });
    }
    let half_gap = params.delta_e / 2.0;
    let c = coupling.entries();
    let mut h_plus = CMatrix::zeros(n, n);
    let mut h_minus = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            h_plus[(i, j)] = c[(i, j)];
            h_minus[(i, j)] = -c[(i, j)];
        }
        let band = params.level_energy(i + 1);
        h_plus[(i, i)] = Complex64::new(half_gap + band, 0.0);
        h_minus[(i, i)] = Complex64::new(-half_gap + band, 0.0);
    }
    Ok(HamiltonianBlocks { h_plus, h_minus })
}

/// `(c₁, c₂) = (λN/δε, λ²N/δε²)`; the master-equation regime needs
/// `c₁ ≥ 1/2` and `c₂ ≪ 1`.
pub fn validity_criteria(params: &SystemParams) -> (f64, f64) {
    let n = params.n_levels as f64;
    let c1 = params.lambda * n / params.delta_eps;
    let c2 = params.lambda * params.lambda * n / (params.delta_eps * params.delta_eps);
    (c1, c2)
}

/// `Γ = 2πλ²N/δε`.
pub fn dephasing_rate(params: &SystemParams) -> f64 {
    2.0 * std::f64::consts::PI * params.lambda * params.lambda * params.n_levels as f64
        / params.delta_eps
}
