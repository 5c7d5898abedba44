//! Property-based checks on the rate toolkit: symmetries, bounds, and
//! monotonicity that must hold for arbitrary inputs, not just the pinned
//! grids of the acceptance suite.

use nalgebra::Complex;
use proptest::prelude::*;

use atypia::qstate::{
    binary_rel_entropy, rel_entropy_vs_pi, trace_distance, DensityMatrix, HermitianObservable,
};
use atypia::rates::{
    gaussian_rate_scale_min, gaussian_sanov_rate, nu_star_m3, rate_expectation, rate_max_eigenvalue,
    rate_qubit, rate_trace_distance, GaussianRatePoint,
};
use atypia::sampler::{make_tilted_proposal, sample_induced_state, SeededStream};
use atypia::solver::{
    min_rel_entropy, ConstraintKind, ConstraintSet, Relation, SolverConfig, SpectralConstraint,
    SpectralFn,
};

fn diag_state(mut probs: Vec<f64>) -> DensityMatrix {
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    DensityMatrix::from_diagonal(&probs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn relative_entropy_nonnegative_and_zero_only_at_pi(
        probs in prop::collection::vec(0.05f64..1.0, 2..=5)
    ) {
        let rho = diag_state(probs);
        let d = rel_entropy_vs_pi(&rho);
        prop_assert!(d >= 0.0);
        let uniform = rho
            .spectrum()
            .values()
            .iter()
            .all(|&p| (p - 1.0 / rho.dim() as f64).abs() < 1e-12);
        if d < 1e-12 {
            prop_assert!(uniform);
        }
    }

    #[test]
    fn binary_rel_entropy_positive_definite(
        alpha in 0.01f64..0.99,
        beta in 0.01f64..0.99,
    ) {
        let d = binary_rel_entropy(alpha, beta).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!((d == 0.0) == (alpha == beta));
        // Data-processing direction: mixing beta toward alpha cannot
        // increase the divergence.
        let closer = 0.5 * (alpha + beta);
        prop_assert!(binary_rel_entropy(alpha, closer).unwrap() <= d + 1e-12);
    }

    #[test]
    fn qubit_rate_monotone_in_bloch_norm(a in 0.0f64..0.95, b in 0.0f64..0.95) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(rate_qubit(lo).unwrap() <= rate_qubit(hi).unwrap() + 1e-12);
    }

    #[test]
    fn max_eigenvalue_rate_monotone_and_positive(
        m in 2usize..=6,
        eps_lo in 0.01f64..0.4,
        bump in 0.01f64..0.3,
    ) {
        let lo = rate_max_eigenvalue(eps_lo, m).unwrap().rate;
        let hi = rate_max_eigenvalue(eps_lo + bump, m).unwrap().rate;
        prop_assert!(lo > 0.0);
        prop_assert!(hi >= lo);
    }

    #[test]
    fn trace_distance_rate_monotone(m in 2usize..=6, t in 0.05f64..0.5, bump in 0.01f64..0.3) {
        let lo = rate_trace_distance(t, m).unwrap().rate;
        let hi = rate_trace_distance(t + bump, m).unwrap().rate;
        prop_assert!(hi >= lo - 1e-12);
    }

    #[test]
    fn expectation_rate_even_for_symmetric_spectrum(w in 0.01f64..0.9) {
        let obs = HermitianObservable::from_diagonal(&[1.0, 0.0, -1.0]);
        let plus = rate_expectation(w, &obs).unwrap().rate;
        let minus = rate_expectation(-w, &obs).unwrap().rate;
        prop_assert!((plus - minus).abs() < 1e-10);
    }

    #[test]
    fn nu_star_is_odd(w in 0.01f64..0.9) {
        let plus = nu_star_m3(w).unwrap();
        let minus = nu_star_m3(-w).unwrap();
        prop_assert!((plus + minus).abs() < 1e-12);
    }

    #[test]
    fn scale_min_lower_bounds_sanov_rate(seed in 0u64..1000, c in 0.2f64..3.0) {
        let mut rng = SeededStream::new(seed, 0).rng();
        let rho = sample_induced_state(3, 6, &mut rng);
        let x = rho.matrix() * Complex::new(c, 0.0);
        let point = GaussianRatePoint::from_operator(&x);
        let scale_min = gaussian_rate_scale_min(&point).unwrap();
        prop_assert!(scale_min <= gaussian_sanov_rate(&point) + 1e-9);
    }

    #[test]
    fn solver_rate_monotone_in_lambda_max_target(
        m in 2usize..=4,
        frac in 0.1f64..0.8,
        bump in 0.02f64..0.15,
    ) {
        let base = 1.0 / m as f64;
        let lo_target = base + frac * (1.0 - base - bump);
        let hi_target = lo_target + bump * (1.0 - base) / 2.0;
        let rate = |target: f64| {
            let set = ConstraintSet::new(
                m,
                ConstraintKind::Spectral(SpectralConstraint {
                    function: SpectralFn::LambdaMax,
                    target,
                    relation: Relation::Ge,
                }),
            )
            .unwrap();
            min_rel_entropy(&set, &SolverConfig::default()).unwrap().rate
        };
        prop_assert!(rate(hi_target) >= rate(lo_target) - 1e-8);
    }

    #[test]
    fn sampled_states_are_valid_and_distance_is_metric_like(seed in 0u64..500) {
        let mut rng = SeededStream::new(seed, 1).rng();
        let a = sample_induced_state(3, 5, &mut rng);
        let b = sample_induced_state(3, 5, &mut rng);
        let c = sample_induced_state(3, 5, &mut rng);
        let spectrum_sum: f64 = a.spectrum().values().iter().sum();
        prop_assert!((spectrum_sum - 1.0).abs() < 1e-9);
        let dab = trace_distance(&a, &b).unwrap();
        let dba = trace_distance(&b, &a).unwrap();
        prop_assert!((dab - dba).abs() < 1e-10);
        prop_assert!(dab >= 0.0 && dab <= 1.0 + 1e-12);
        let dac = trace_distance(&a, &c).unwrap();
        let dcb = trace_distance(&c, &b).unwrap();
        prop_assert!(dab <= dac + dcb + 1e-10);
    }

    #[test]
    fn tilted_proposal_preserves_target_spectrum_direction(seed in 0u64..300) {
        let mut rng = SeededStream::new(seed, 2).rng();
        let target = sample_induced_state(2, 4, &mut rng);
        let prop_dist = make_tilted_proposal(&target);
        // The proposal covariance shares the target's trace direction:
        // Tr Σ = m (up to rank flooring).
        let trace: f64 = (0..2).map(|k| prop_dist.sigma()[(k, k)].re).sum();
        prop_assert!((trace - 2.0).abs() < 1e-6);
    }
}
