//! Cross-module properties, each checked against a route that does not share
//! code with the implementation under test.

use bandpip_core::dephasing::fit_decay_rate;
use bandpip_core::evolve::{energy, CVector};
use bandpip_core::info::{enumerate_fragments, entropy, MutualInformation};
use bandpip_core::model::CMatrix;
use bandpip_core::{
    build_blocks, coupling_realization, fragment_projection, initial_state, pip_curve, pip_point, purity,
    reduce_fragment, reduce_system, trajectory, Complex64, Convention, Fragment, JointState, LogBase, PipConfig,
    SamplingKey, SystemParams,
};
use proptest::prelude::*;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn state_at(params: &SystemParams, t: f64) -> JointState {
    trajectory(params, &coupling_realization(params, 0), &[t]).unwrap().pop().unwrap()
}

/// Dense `2N × 2N` Hamiltonian in the basis `i·N + n` (i = 0 is `+`).
fn dense_hamiltonian(params: &SystemParams) -> CMatrix {
    let n = params.n_levels;
    let coupling = coupling_realization(params, 0);
    let sz = [1.0, -1.0];
    let mut h = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..2 {
        for a in 0..n {
            h[(i * n + a, i * n + a)] += c(sz[i] * params.delta_e / 2.0 + params.level_energy(a + 1));
            for b in 0..n {
                h[(i * n + a, i * n + b)] += coupling.entries()[(a, b)] * sz[i];
            }
        }
    }
    h
}

/// Oracle propagation by Padé matrix exponential, independent of the eigensolver.
fn dense_evolve(params: &SystemParams, t: f64) -> CVector {
    let h = dense_hamiltonian(params);
    let u = (h * Complex64::new(0.0, -t)).exp();
    let n = params.n_levels;
    let psi0 = CVector::from_element(2 * n, c(1.0 / ((2 * n) as f64).sqrt()));
    u * psi0
}

#[test]
fn block_evolution_matches_dense_propagator() {
    for n in [4, 10, 20] {
        let params = SystemParams::new(n, 1.0, 0.5, 2.5e-2 * 10.0 / n as f64, 31 + n as u64).unwrap();
        let coupling = coupling_realization(&params, 0);
        let times: Vec<f64> = (1..=10).map(|k| k as f64 * 1.9).collect();
        let states = trajectory(&params, &coupling, &times).unwrap();
        for (s, &t) in states.iter().zip(&times) {
            let dense = dense_evolve(&params, t);
            for i in 0..2 {
                for a in 0..n {
                    assert!((s.amplitude(i, a) - dense[i * n + a]).norm() < 1e-9, "n={n} t={t}");
                }
            }
        }
    }
}

#[test]
fn conservation_and_population_freezing() {
    for params in [SystemParams::paper_n10(12), SystemParams::paper_n100(12)] {
        let coupling = coupling_realization(&params, 0);
        let blocks = build_blocks(&params, &coupling).unwrap();
        let times: Vec<f64> = (0..=100).map(|k| k as f64).collect();
        let states = trajectory(&params, &coupling, &times).unwrap();
        let e0 = energy(&blocks, &states[0]);
        for s in &states {
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            assert!(((energy(&blocks, s) - e0) / e0).abs() < 1e-9);
            let rho = reduce_system(s);
            assert!((rho.get(0, 0).re - 0.5).abs() < 1e-10);
            assert!((rho.get(1, 1).re - 0.5).abs() < 1e-10);
            assert!(purity(&rho) <= 1.0 + 1e-10);
        }
    }
}

#[test]
fn free_band_keeps_full_coherence() {
    let params = SystemParams::new(10, 1.0, 0.5, 0.0, 0).unwrap();
    let times: Vec<f64> = (0..40).map(|k| k as f64 * 0.5).collect();
    for s in trajectory(&params, &coupling_realization(&params, 0), &times).unwrap() {
        let rho = reduce_system(&s);
        assert!((rho.get(0, 1).norm() - 0.5).abs() < 1e-12);
        // Phase is e^{-iΔE t}; the band phases cancel between sectors.
        let expected = Complex64::from_polar(0.5, -s.time());
        assert!((rho.get(0, 1) - expected).norm() < 1e-12);
    }
}

#[test]
fn schmidt_spectra_agree_and_rank_is_at_most_two() {
    let params = SystemParams::paper_n10(21);
    let s = state_at(&params, 10.0);
    for k in 2..=10 {
        for f in enumerate_fragments(10, k, u128::MAX).unwrap() {
            let cond = fragment_projection(&s, &f).unwrap();
            let full = reduce_fragment(&cond).eigenvalues().unwrap();
            let small = cond.system_marginal().eigenvalues().unwrap();
            assert!(full.iter().filter(|&&x| x > 1e-10).count() <= 2);
            let top: Vec<f64> = full.iter().rev().take(2).copied().collect();
            assert!((top[0] - small[1]).abs() < 1e-9 && (top[1] - small[0]).abs() < 1e-9);
        }
    }
}

#[test]
fn fragment_entropy_via_marginal_matches_full_matrix() {
    let params = SystemParams::paper_n10(22);
    let s = state_at(&params, 7.0);
    let mi = MutualInformation::new(&s, LogBase::Two, Convention::Paper).unwrap();
    for f in enumerate_fragments(10, 4, u128::MAX).unwrap() {
        let via_full = entropy(&reduce_fragment(&fragment_projection(&s, &f).unwrap()), LogBase::Two).unwrap();
        assert!((mi.fragment_entropy(&f).unwrap() - via_full).abs() < 1e-9);
    }
}

#[test]
fn per_fragment_mutual_information_is_not_symmetric() {
    // I(F) + I(F̄) need not equal 2 S_S; scan for a concrete counterexample.
    let params = SystemParams::paper_n10(23);
    let s = state_at(&params, 10.0);
    let mi = MutualInformation::new(&s, LogBase::Two, Convention::Paper).unwrap();
    let ceiling = mi.ceiling();
    let worst = (1..10)
        .flat_map(|k| enumerate_fragments(10, k, u128::MAX).unwrap())
        .map(|f| {
            let comp: Vec<usize> = (1..=10).filter(|l| !f.levels().contains(l)).collect();
            let g = Fragment::new(comp, 10).unwrap();
            (mi.evaluate(&f).unwrap() + mi.evaluate(&g).unwrap() - ceiling).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst > 1e-2, "largest asymmetry {worst}");
}

#[test]
fn per_fragment_mutual_information_is_not_monotone() {
    // Adding a level to a fragment can lower I(S:F); only averages are monotone.
    let params = SystemParams::paper_n10(23);
    let s = state_at(&params, 10.0);
    let mi = MutualInformation::new(&s, LogBase::Two, Convention::Paper).unwrap();
    let found = (1..10).any(|k| {
        enumerate_fragments(10, k, u128::MAX).unwrap().any(|f| {
            let base = mi.evaluate(&f).unwrap();
            (1..=10).filter(|l| !f.levels().contains(l)).any(|extra| {
                let mut levels = f.levels().to_vec();
                levels.push(extra);
                levels.sort_unstable();
                mi.evaluate(&Fragment::new(levels, 10).unwrap()).unwrap() < base - 1e-6
            })
        })
    });
    assert!(found);
}

#[test]
fn exact_and_monte_carlo_agree_for_small_bands() {
    for (n, seed) in [(8, 1), (12, 2)] {
        let params = SystemParams::new(n, 1.0, 0.5, 0.25 / n as f64, seed).unwrap();
        let s = state_at(&params, 10.0);
        let key = SamplingKey { seed, time_index: 0 };
        let mc_cfg = PipConfig {
            enumeration_cap: 0,
            stderr_tol: 0.0,
            max_samples: 4_000,
            ..PipConfig::default()
        };
        for k in 1..=n {
            let exact = pip_point(&s, k, &PipConfig::default(), key).unwrap();
            let mc = pip_point(&s, k, &mc_cfg, key).unwrap();
            assert!(
                (exact.mean_mi - mc.mean_mi).abs() <= 3.0 * (exact.stderr + mc.stderr) + 1e-12,
                "n={n} k={k}: {} vs {} ± {}",
                exact.mean_mi,
                mc.mean_mi,
                mc.stderr
            );
        }
    }
}

#[test]
fn averaged_curves_are_monotone_and_saturate() {
    for seed in 0..4 {
        let params = SystemParams::paper_n10(seed);
        for t in [3.0, 10.0, 15.0] {
            let s = state_at(&params, t);
            for convention in [Convention::Paper, Convention::PureBipartite] {
                let cfg = PipConfig {
                    convention,
                    ..PipConfig::default()
                };
                let curve = pip_curve(&s, &cfg, SamplingKey { seed, time_index: 0 }).unwrap();
                for w in curve.points.windows(2) {
                    assert!(w[1].mean_mi >= w[0].mean_mi - 3.0 * (w[0].stderr + w[1].stderr) - 1e-12);
                }
                assert!((curve.points.last().unwrap().mean_mi - curve.ceiling).abs() < 1e-9);
                assert!(curve.points.iter().all(|p| p.mean_mi >= -1e-9));
            }
        }
    }
}

#[test]
fn coupling_moments_over_large_pool() {
    let params = SystemParams::new(200, 1.0, 0.5, 1.0, 77).unwrap();
    let cm = coupling_realization(&params, 0);
    let samples: Vec<Complex64> = cm.upper_entries().map(|(_, _, z)| z).collect();
    let m = samples.len() as f64;
    assert_eq!(samples.len(), 19_900);
    let mean = samples.iter().sum::<Complex64>() / m;
    let mean_sq = samples.iter().map(|z| z * z).sum::<Complex64>() / m;
    let mean_abs = samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / m;
    let bound = 4.0 / m.sqrt();
    assert!(mean.norm() < bound, "{mean}");
    assert!(mean_sq.norm() < bound, "{mean_sq}");
    assert!((mean_abs - 1.0).abs() < bound, "{mean_abs}");
}

#[test]
fn fitted_rate_on_master_curve_is_exact() {
    let params = SystemParams::paper_n100(0);
    let times: Vec<f64> = (0..=80).map(|k| k as f64 * 0.1).collect();
    let mags: Vec<f64> = times
        .iter()
        .map(|&t| bandpip_core::dephasing::master_coherence(&params, c(0.5), t).norm())
        .collect();
    let gamma = fit_decay_rate(&times, &mags).unwrap();
    assert!((gamma - bandpip_core::dephasing_rate(&params)).abs() < 1e-9);
}

#[test]
fn initial_state_carries_no_information() {
    let s = initial_state(&SystemParams::paper_n10(0));
    let curve = pip_curve(&s, &PipConfig::default(), SamplingKey { seed: 0, time_index: 0 }).unwrap();
    assert!(curve.points.iter().all(|p| p.mean_mi.abs() < 1e-10));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn coupling_hermitian_zero_diagonal(n in 2usize..=200, seed in any::<u64>(), lambda in 0.0f64..1.0) {
        let params = SystemParams::new(n, 1.0, 0.5, lambda, seed).unwrap();
        let m = coupling_realization(&params, 0);
        let e = m.entries();
        for i in 0..n {
            prop_assert_eq!(e[(i, i)], c(0.0));
            for j in (i + 1)..n {
                prop_assert_eq!(e[(i, j)], e[(j, i)].conj());
            }
        }
    }

    #[test]
    fn evolution_is_unitary(seed in any::<u64>(), t in 0.0f64..100.0) {
        let params = SystemParams::paper_n10(seed);
        let s = state_at(&params, t);
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn conditioned_states_are_normalized_and_weights_partition(
        seed in any::<u64>(),
        t in 0.5f64..30.0,
        mask in 1u16..(1 << 10) - 1,
    ) {
        let params = SystemParams::paper_n10(seed);
        let s = state_at(&params, t);
        let inside: Vec<usize> = (1..=10).filter(|l| mask & (1 << (l - 1)) != 0).collect();
        let outside: Vec<usize> = (1..=10).filter(|l| mask & (1 << (l - 1)) == 0).collect();
        let a = fragment_projection(&s, &Fragment::new(inside, 10).unwrap()).unwrap();
        let b = fragment_projection(&s, &Fragment::new(outside, 10).unwrap()).unwrap();
        prop_assert!((a.norm_sqr() - 1.0).abs() < 1e-10);
        prop_assert!((a.weight() + b.weight() - 1.0).abs() < 1e-10);
        prop_assert!((purity(&a.joint_density()) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn entropy_base_consistency(seed in any::<u64>(), t in 0.5f64..30.0) {
        let s = state_at(&SystemParams::paper_n10(seed), t);
        let rho = reduce_system(&s);
        let bits = entropy(&rho, LogBase::Two).unwrap();
        let nats = entropy(&rho, LogBase::Natural).unwrap();
        prop_assert!((nats - std::f64::consts::LN_2 * bits).abs() <= 1e-12 * nats.max(1e-300));
    }
}
