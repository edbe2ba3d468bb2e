mod common;

use biortho_dqpt::biortho::{
    associated_state, decompose, eig_biortho, projection_probabilities, transition_probability, BiorthoBasis,
};
use biortho_dqpt::dynamics::{amplitude, dynamical_phase, g_k, geometric_phase, two_level_probability, ModeQuench};
use biortho_dqpt::ComplexScalar;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn residuals_on_random_blocks() {
    let mut rng = common::rng(1);
    let (mut ortho, mut complete, mut eigen) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let h = common::offdiag_block(&mut rng);
        let b = eig_biortho(&h).unwrap();
        ortho = ortho.max(b.biorthonormality_residual());
        complete = complete.max(b.completeness_residual());
        eigen = eigen.max(b.eigen_residual(&h) / h.norm());
    }
    assert!(ortho < 1e-10, "biorthonormality {ortho:.3e}");
    assert!(complete < 1e-10, "completeness {complete:.3e}");
    assert!(eigen < 1e-10, "eigen {eigen:.3e}");
}

#[test]
fn decomposition_reconstructs() {
    let mut rng = common::rng(2);
    for _ in 0..1000 {
        let b = eig_biortho(&common::offdiag_block(&mut rng)).unwrap();
        let psi = common::state(&mut rng);
        let back = decompose(&psi, &b).reconstruct(&b);
        assert!(back.max_abs_diff(&psi) < 1e-10 * (1.0 + psi.norm_sqr().sqrt()));
    }
}

#[test]
fn probability_in_unit_interval_on_random_triples() {
    let mut rng = common::rng(3);
    for _ in 0..10_000 {
        let b = eig_biortho(&common::offdiag_block(&mut rng)).unwrap();
        let (psi, phi) = (common::state(&mut rng), common::state(&mut rng));
        let p = transition_probability(&psi, &phi, &b).unwrap();
        assert!((0.0..=1.0).contains(&p), "p = {p}");
        let (pp, pm) = projection_probabilities(&psi, &b).unwrap();
        assert!((pp + pm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn hermitian_reduction() {
    let mut rng = common::rng(4);
    for _ in 0..1000 {
        let h = common::hermitian_block(&mut rng);
        let b = eig_biortho(&h).unwrap();
        let (psi, phi) = (common::state(&mut rng), common::state(&mut rng));
        let conventional = psi.dot(&phi).norm_sqr() / (psi.norm_sqr() * phi.norm_sqr());
        let p = transition_probability(&psi, &phi, &b).unwrap();
        assert!((p - conventional).abs() < 1e-10);
        assert!(associated_state(&psi, &b).max_abs_diff(&psi) < 1e-10);
    }
}

fn rephase(b: &BiorthoBasis, plus: f64, minus: f64) -> BiorthoBasis {
    let (p, m) = (
        ComplexScalar::from_polar(1.0, plus),
        ComplexScalar::from_polar(1.0, minus),
    );
    BiorthoBasis {
        u_plus: b.u_plus.scale(p),
        w_plus: b.w_plus.scale(p),
        u_minus: b.u_minus.scale(m),
        w_minus: b.w_minus.scale(m),
        ..*b
    }
}

proptest! {
    #[test]
    fn phase_gauge_invariance(seed in any::<u64>(), tp in -3.2..3.2f64, tm in -3.2..3.2f64) {
        let mut rng = common::rng(seed);
        let (h_i, h_f) = (common::offdiag_block(&mut rng), common::offdiag_block(&mut rng));
        let b = eig_biortho(&h_i).unwrap();
        let g = rephase(&b, tp, tm);
        let (psi, phi) = (common::state(&mut rng), common::state(&mut rng));
        let p0 = transition_probability(&psi, &phi, &b).unwrap();
        prop_assert!((p0 - transition_probability(&psi, &phi, &g).unwrap()).abs() < 1e-10);
        let (a0, a1) = (projection_probabilities(&psi, &b).unwrap(), projection_probabilities(&psi, &g).unwrap());
        prop_assert!((a0.0 - a1.0).abs() < 1e-10 && (a0.1 - a1.1).abs() < 1e-10);

        let t: f64 = rng.random_range(0.0..1.0);
        let q0 = ModeQuench::with_prequench_basis(h_i, h_f, b).unwrap();
        let q1 = ModeQuench::with_prequench_basis(h_i, h_f, g).unwrap();
        prop_assert!((amplitude(&q0, t) - amplitude(&q1, t)).norm() < 1e-10 * amplitude(&q0, t).norm().max(1.0));
        prop_assert!((g_k(&q0, t).unwrap() - g_k(&q1, t).unwrap()).abs() < 1e-10);
        prop_assert!((two_level_probability(&q0, t).unwrap() - two_level_probability(&q1, t).unwrap()).abs() < 1e-10);
        let (d0, d1) = (dynamical_phase(&q0, t, 512).unwrap(), dynamical_phase(&q1, t, 512).unwrap());
        prop_assert!((d0 - d1).abs() < 1e-10 * d0.abs().max(1.0));
        if let (Ok(g0), Ok(g1)) = (geometric_phase(&q0, t, 512), geometric_phase(&q1, t, 512)) {
            prop_assert!((g0 - g1).abs() < 1e-10 * g0.abs().max(1.0));
        }
    }

    #[test]
    fn scale_gauge_invariance_of_kernel(seed in any::<u64>(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let lambda = ComplexScalar::new(re, im);
        prop_assume!(lambda.norm() > 1e-2);
        let mut rng = common::rng(seed);
        let (h_i, h_f) = (common::offdiag_block(&mut rng), common::offdiag_block(&mut rng));
        let b = eig_biortho(&h_i).unwrap();
        let scaled = BiorthoBasis {
            u_minus: b.u_minus.scale(lambda),
            w_minus: b.w_minus.scale(ComplexScalar::new(1.0, 0.0) / lambda.conj()),
            ..b
        };
        let m0 = ModeQuench::with_prequench_basis(h_i, h_f, b).unwrap().kernel().m;
        let m1 = ModeQuench::with_prequench_basis(h_i, h_f, scaled).unwrap().kernel().m;
        prop_assert!((m0 - m1).norm() < 1e-10 * m0.norm().max(1.0));
    }
}
