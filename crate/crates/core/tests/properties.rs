mod common;

use hkdelay::analysis::{diameter_at, window_diameters};
use hkdelay::meanfield::{
    empirical_at, support_diameter, wasserstein1, wasserstein1_assignment, EmpiricalMeasure,
};
use hkdelay::model::{
    DelaySpec, GeneralInfluence, Influence, InfluenceSpec, RadialInfluence, ScalarFn,
};
use hkdelay::solver::integrate;
use proptest::prelude::*;

fn measure(n: usize, d: usize) -> impl Strategy<Value = EmpiricalMeasure> {
    prop::collection::vec(prop::collection::vec(-10.0f64..10.0, d), n)
        .prop_map(|pts| EmpiricalMeasure::new(pts).unwrap())
}

fn triple(
    max_n: usize,
) -> impl Strategy<Value = (EmpiricalMeasure, EmpiricalMeasure, EmpiricalMeasure)> {
    (1..=max_n, 1usize..=3).prop_flat_map(|(n, d)| (measure(n, d), measure(n, d), measure(n, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wasserstein_is_a_metric((a, b, c) in triple(16)) {
        let ab = wasserstein1(&a, &b).unwrap();
        prop_assert_eq!(ab, wasserstein1(&b, &a).unwrap());
        prop_assert_eq!(wasserstein1(&a, &a).unwrap(), 0.0);
        prop_assert!(ab >= 0.0);
        let ac = wasserstein1(&a, &c).unwrap();
        let cb = wasserstein1(&c, &b).unwrap();
        prop_assert!(ab <= ac + cb + 1e-12, "{} > {} + {}", ab, ac, cb);
    }

    #[test]
    fn sorted_matching_agrees_with_assignment(
        (a, b) in (1usize..=64).prop_flat_map(|n| (measure(n, 1), measure(n, 1)))
    ) {
        let sorted = wasserstein1(&a, &b).unwrap();
        let assigned = wasserstein1_assignment(&a, &b).unwrap();
        prop_assert!((sorted - assigned).abs() <= 1e-12, "{} vs {}", sorted, assigned);
    }

    #[test]
    fn radial_psi0_shrinks_with_diameter(scale in 0.1f64..5.0, d1 in 0.0f64..10.0, d2 in 0.0f64..10.0) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        for spec in [
            InfluenceSpec::inverse_quadratic(scale).unwrap(),
            InfluenceSpec::new(
                Influence::DifferenceForm(RadialInfluence::Exponential { scale, rate: 0.7 }),
                scale,
                None,
            ).unwrap(),
        ] {
            let near = spec.compute_psi0(2, 1.0, lo, 64).unwrap();
            let far = spec.compute_psi0(2, 1.0, hi, 64).unwrap();
            prop_assert!(far <= near);
            prop_assert!(near <= spec.sup_bound());
        }
    }

    #[test]
    fn general_psi0_shrinks_with_state_bound(
        m1 in 0.0f64..std::f64::consts::FRAC_PI_2,
        m2 in 0.0f64..std::f64::consts::FRAC_PI_2,
        d in 1usize..=2,
    ) {
        let spec = InfluenceSpec::new(
            Influence::General(GeneralInfluence::SineOfComponent { base: 2.0, amplitude: 1.0, component: 0 }),
            3.0,
            None,
        ).unwrap();
        let (lo, hi) = if m1 <= m2 { (m1, m2) } else { (m2, m1) };
        let small = spec.compute_psi0(d, lo, 0.0, 16).unwrap();
        let large = spec.compute_psi0(d, hi, 0.0, 16).unwrap();
        prop_assert!(large <= small);
        // the axis endpoint -m e_0 is always sampled
        prop_assert!((large - (2.0 - hi.sin())).abs() <= 1e-12);
    }

    #[test]
    fn sinusoidal_delay_stays_in_bounds(
        tau_bar in 0.1f64..2.0,
        amp in 0.0f64..1.0,
        freq in 0.1f64..10.0,
        phase in 0.0f64..6.3,
        t in 0.0f64..100.0,
    ) {
        let delay = DelaySpec::pointwise(
            tau_bar,
            ScalarFn::sinusoid(0.5 * tau_bar, 0.5 * tau_bar * amp, freq, phase),
        );
        let tau = delay.eval_pointwise(t).unwrap();
        prop_assert!((0.0..=tau_bar).contains(&tau));
        prop_assert!(delay.validate(100.0).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn support_diameter_equals_trajectory_diameter(seed in 0u64..1000, frac in 0.0f64..1.0) {
        let scenario = common::random_pointwise_scenario(seed);
        let traj = integrate(&scenario).unwrap();
        let t = -scenario.tau_bar() + frac * (scenario.horizon() + scenario.tau_bar());
        let mu = empirical_at(&traj, t).unwrap();
        prop_assert_eq!(support_diameter(&mu).unwrap(), diameter_at(&traj, t).unwrap());
    }

    #[test]
    fn dyadic_refinement_never_shrinks_window_maxima(seed in 0u64..1000) {
        let traj = integrate(&common::random_pointwise_scenario(seed)).unwrap();
        let mut prev = window_diameters(&traj, 8).unwrap();
        for samples in [16, 32, 64] {
            let next = window_diameters(&traj, samples).unwrap();
            prop_assert_eq!(prev.len(), next.len());
            for (a, b) in prev.values.iter().zip(&next.values) {
                prop_assert!(b >= a);
            }
            prev = next;
        }
        prop_assert!(prev.is_monotone(1e-9));
    }
}
