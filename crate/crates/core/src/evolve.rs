//! Exact propagation of the joint qubit + band state.
//!
//! The state is stored as two length-`N` amplitude rows, one per qubit
//! sector. Since the Hamiltonian is block diagonal in the sector index,
//! each row evolves on its own under `H_+` or `H_−`, and the propagator
//! `U e^{−iΛt} U†` is formed from a single cached eigendecomposition per
//! block. Every time point is computed from `t = 0` directly, never by
//! chaining steps.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{build_blocks, CouplingMatrix, HamiltonianBlocks, SystemParams};
use crate::par;
use crate::spectral::{diagonalize, SpectralDecomposition};

pub type CVector = DVector<Complex64>;

/// Pure joint state `Σ a_{i,n} |i⟩⊗|n⟩`; `rows[0]` is the `+` sector.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    rows: [CVector; 2],
    time: f64,
}

impl JointState {
    pub fn new(plus: CVector, minus: CVector, time: f64) -> Result<Self> {
        if plus.len() != minus.len() {
            return Err(Error::DimensionMismatch {
                expected: plus.len(),
                found: minus.len(),
            });
        }
        Ok(Self {
            rows: [plus, minus],
            time,
        })
    }

    pub fn n_levels(&self) -> usize {
        self.rows[0].len()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Amplitudes of qubit sector `i` (0 = `+`, 1 = `−`).
    pub fn row(&self, i: usize) -> &CVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[CVector; 2] {
        &self.rows
    }

    /// `a_{i,n}` with 0-based sector and level indices.
    pub fn amplitude(&self, i: usize, n: usize) -> Complex64 {
        self.rows[i][n]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.rows.iter().map(|r| r.norm_squared()).sum()
    }
}

/// `(|+⟩ + |−⟩)/√2 ⊗ (1/√N) Σ_n |n⟩`: every amplitude is `1/√(2N)`.
pub fn initial_state(params: &SystemParams) -> JointState {
    let n = params.n_levels;
    let a = Complex64::new(1.0 / ((2 * n) as f64).sqrt(), 0.0);
    JointState {
        rows: [CVector::from_element(n, a), CVector::from_element(n, a)],
        time: 0.0,
    }
}

/// Cached spectral data for both blocks.
#[derive(Debug, Clone)]
pub struct Propagator {
    sectors: [SpectralDecomposition; 2],
}

impl Propagator {
    pub fn new(blocks: &HamiltonianBlocks) -> Result<Self> {
        Ok(Self {
            sectors: [diagonalize(&blocks.h_plus)?, diagonalize(&blocks.h_minus)?],
        })
    }

    pub fn dim(&self) -> usize {
        self.sectors[0].dim()
    }

    pub fn sector(&self, i: usize) -> &SpectralDecomposition {
        &self.sectors[i]
    }

    /// Advance `state` by `dt ≥ 0`.
    pub fn evolve(&self, state: &JointState, dt: f64) -> Result<JointState> {
        if state.n_levels() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: state.n_levels(),
            });
        }
        if !(dt.is_finite() && dt >= 0.0) {
            return Err(Error::InvalidTimes(format!("evolution time must be finite and >= 0, got {dt}")));
        }
        if dt == 0.0 {
            return Ok(state.clone());
        }
        let phase = |e: f64| Complex64::from_polar(1.0, -e * dt);
        let plus = self.sectors[0].apply_function(&state.rows[0], phase);
        let minus = self.sectors[1].apply_function(&state.rows[1], phase);
        Ok(JointState {
            rows: [plus, minus],
            time: state.time + dt,
        })
    }
}

/// One-shot propagation; diagonalizes both blocks on every call.
pub fn evolve(blocks: &HamiltonianBlocks, state0: &JointState, t: f64) -> Result<JointState> {
    Propagator::new(blocks)?.evolve(state0, t)
}

/// `⟨Ψ|H|Ψ⟩ = a_+† H_+ a_+ + a_−† H_− a_−`.
pub fn energy(blocks: &HamiltonianBlocks, state: &JointState) -> f64 {
    (0..2)
        .map(|i| {
            let row = state.row(i);
            row.dotc(&(blocks.block(i) * row)).re
        })
        .sum()
}

pub fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidTimes("time list is empty".into()));
    }
    if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::InvalidTimes(format!("times must be finite and >= 0, got {t}")));
    }
    if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidTimes(format!(
            "times must be strictly ascending, got {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// States at each requested time, evaluated independently from `t = 0`.
pub fn trajectory(params: &SystemParams, coupling: &CouplingMatrix, times: &[f64]) -> Result<Vec<JointState>> {
    validate_times(times)?;
    let blocks = build_blocks(params, coupling)?;
    let propagator = Propagator::new(&blocks)?;
    let psi0 = initial_state(params);
    par::first_error(par::map_slice(times, |&t| propagator.evolve(&psi0, t)))
}
