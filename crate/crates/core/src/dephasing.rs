//! Closed-form solution of the qubit dephasing master equation
//!
//! ```text
//! dρ/dt = −i[H_S, ρ] + Γ(σz ρ σz − ρ),   H_S = (ΔE/2) σz
//! ```
//!
//! Populations are constants of motion and the coherence obeys
//! `dρ₁₂/dt = −(iΔE + 2Γ) ρ₁₂`, so `ρ₁₂(t) = ρ₁₂(0) e^{−iΔE t} e^{−2Γt}`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{entropy_of_spectrum, LogBase};
use crate::model::{dephasing_rate, SystemParams};

/// `ρ₁₂(0)` of the product initial state `|+x⟩ ⊗ |Ψ_E(0)⟩`.
pub const INITIAL_COHERENCE: Complex64 = Complex64::new(0.5, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MasterPrediction {
    pub time: f64,
    pub coherence: Complex64,
    pub entropy: f64,
}

pub fn master_coherence(params: &SystemParams, rho12_initial: Complex64, t: f64) -> Complex64 {
    let gamma = dephasing_rate(params);
    rho12_initial * Complex64::from_polar((-2.0 * gamma * t).exp(), -params.delta_e * t)
}

/// Entropy of `[[1/2, ρ₁₂], [ρ₁₂*, 1/2]]`, whose eigenvalues are `1/2 ± |ρ₁₂|`.
pub fn master_entropy(params: &SystemParams, rho12_initial: Complex64, t: f64, base: LogBase) -> f64 {
    let r = master_coherence(params, rho12_initial, t).norm().min(0.5);
    entropy_of_spectrum(&[0.5 - r, 0.5 + r], base)
}

pub fn master_prediction(params: &SystemParams, rho12_initial: Complex64, t: f64, base: LogBase) -> MasterPrediction {
    MasterPrediction {
        time: t,
        coherence: master_coherence(params, rho12_initial, t),
        entropy: master_entropy(params, rho12_initial, t, base),
    }
}

/// Empirical Γ from `|ρ₁₂(t)|`: the least-squares slope of `ln|ρ₁₂|` against
/// `t`, negated and halved.
pub fn fit_decay_rate(times: &[f64], magnitudes: &[f64]) -> Result<f64> {
    if times.len() != magnitudes.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            found: magnitudes.len(),
        });
    }
    if times.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "need at least 5 samples, got {}",
            times.len()
        )));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InsufficientData("times must be strictly ascending".into()));
    }
    if let Some(m) = magnitudes.iter().find(|&&m| m.is_nan() || m <= 1e-6) {
        return Err(Error::InsufficientData(format!(
            "coherence magnitude {m:e} is at or below the 1e-6 noise floor"
        )));
    }
    let logs: Vec<f64> = magnitudes.iter().map(|m| m.ln()).collect();
    Ok(-0.5 * least_squares_slope(times, &logs))
}

/// Same fit for samples that are already logarithms, e.g. an ensemble mean of `ln|ρ₁₂|`.
pub fn fit_decay_rate_from_logs(times: &[f64], log_magnitudes: &[f64]) -> Result<f64> {
    let mags: Vec<f64> = log_magnitudes.iter().map(|l| l.exp()).collect();
    fit_decay_rate(times, &mags)
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (sxy, sxx) = x
        .iter()
        .zip(y)
        .fold((0.0, 0.0), |(sxy, sxx), (&xi, &yi)| {
            (sxy + (xi - mx) * (yi - my), sxx + (xi - mx) * (xi - mx))
        });
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    type Rho = [[Complex64; 2]; 2];

    /// Right-hand side of the master equation on the full 2x2 matrix.
    fn rhs(rho: &Rho, delta_e: f64, gamma: f64) -> Rho {
        let sz = [1.0, -1.0];
        let mut out = [[c(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let commutator = rho[i][j] * (0.5 * delta_e * (sz[i] - sz[j]));
                let dephase = rho[i][j] * (sz[i] * sz[j] - 1.0);
                out[i][j] = c(0.0, -1.0) * commutator + dephase * gamma;
            }
        }
        out
    }

    fn axpy(a: &Rho, k: &Rho, h: f64) -> Rho {
        let mut out = *a;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += k[i][j] * h;
            }
        }
        out
    }

    /// Classical RK4 with a fixed step; independent of the closed form.
    fn integrate(rho0: Rho, delta_e: f64, gamma: f64, t_end: f64, dt: f64) -> Vec<(f64, Rho)> {
        let steps = (t_end / dt).round() as usize;
        let mut rho = rho0;
        let mut out = vec![(0.0, rho)];
        for s in 0..steps {
            let k1 = rhs(&rho, delta_e, gamma);
            let k2 = rhs(&axpy(&rho, &k1, dt / 2.0), delta_e, gamma);
            let k3 = rhs(&axpy(&rho, &k2, dt / 2.0), delta_e, gamma);
            let k4 = rhs(&axpy(&rho, &k3, dt), delta_e, gamma);
            for i in 0..2 {
                for j in 0..2 {
                    rho[i][j] += (k1[i][j] + k2[i][j] * 2.0 + k3[i][j] * 2.0 + k4[i][j]) * (dt / 6.0);
                }
            }
            out.push(((s + 1) as f64 * dt, rho));
        }
        out
    }

    #[test]
    fn closed_form_matches_rk4() {
        for params in [SystemParams::paper_n10(0), SystemParams::paper_n100(0)] {
            let gamma = dephasing_rate(&params);
            let rho0 = [[c(0.5, 0.0), c(0.5, 0.0)], [c(0.5, 0.0), c(0.5, 0.0)]];
            let path = integrate(rho0, params.delta_e, gamma, 50.0, 1e-3);
            let mut worst: f64 = 0.0;
            for (t, rho) in path.iter().step_by(100) {
                let predicted = master_coherence(&params, c(0.5, 0.0), *t);
                worst = worst.max((rho[0][1] - predicted).norm());
                assert!((rho[0][0].re - 0.5).abs() < 1e-14 && (rho[1][1].re - 0.5).abs() < 1e-14);
            }
            assert!(worst < 1e-8, "worst deviation {worst:e}");
        }
    }

    #[test]
    fn coherence_reference_values() {
        let p = SystemParams::paper_n100(0);
        assert_eq!(master_coherence(&p, c(0.5, 0.0), 0.0), c(0.5, 0.0));
        let mag = master_coherence(&p, c(0.5, 0.0), 5.0).norm();
        assert!((mag - 0.5 * (-2.0 * 0.282_743_338_823_081_4 * 5.0f64).exp()).abs() < 1e-12);
        assert!((mag - 0.029_582_26).abs() < 1e-8);

        let free = SystemParams::new(10, 1.0, 0.5, 0.0, 0).unwrap();
        let z = master_coherence(&free, c(0.3, 0.1), PI);
        assert!((z + c(0.3, 0.1)).norm() < 1e-15);
    }

    #[test]
    fn entropy_reference_values() {
        let p = SystemParams::paper_n100(0);
        assert_eq!(master_entropy(&p, c(0.5, 0.0), 0.0, LogBase::Two), 0.0);
        assert!((master_entropy(&p, c(0.5, 0.0), 1e4, LogBase::Two) - 1.0).abs() < 1e-12);
        let r = 0.5 * (-2.0 * dephasing_rate(&p) * 5.0).exp();
        let oracle = -(0.5 - r) * (0.5 - r).log2() - (0.5 + r) * (0.5 + r).log2();
        let s = master_entropy(&p, c(0.5, 0.0), 5.0, LogBase::Two);
        assert!((s - oracle).abs() < 1e-14);
        assert!((s - 0.99748).abs() < 1e-5);
    }

    #[test]
    fn entropy_monotone_and_bounded() {
        let p = SystemParams::paper_n10(0);
        let mut last = 0.0;
        for k in 0..500 {
            let s = master_entropy(&p, c(0.5, 0.0), k as f64 * 0.1, LogBase::Two);
            assert!(s >= last - 1e-15 && s <= 1.0 + 1e-15);
            last = s;
        }
    }

    #[test]
    fn fit_recovers_synthetic_rates() {
        let times: Vec<f64> = (0..20).map(|k| k as f64 * 0.5).collect();
        for gamma in [0.1, 0.0] {
            let mags: Vec<f64> = times.iter().map(|t| 0.5 * (-2.0 * gamma * t).exp()).collect();
            assert!((fit_decay_rate(&times, &mags).unwrap() - gamma).abs() < 1e-9);
        }
    }

    #[test]
    fn fit_rejects_bad_input() {
        let t = [0.0, 1.0, 2.0, 3.0];
        assert!(fit_decay_rate(&t, &[0.5; 4]).is_err());
        let t5 = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert!(fit_decay_rate(&t5, &[0.5, 0.4, 0.3, 1e-8, 0.1]).is_err());
        assert!(fit_decay_rate(&[0.0, 2.0, 1.0, 3.0, 4.0], &[0.5; 5]).is_err());
    }
}
