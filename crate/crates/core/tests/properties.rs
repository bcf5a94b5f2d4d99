use std::f64::consts::{PI, TAU};

use equidist_core::equidistant::{equidistant_curvature, full_equidistant, singularity_margin};
use equidist_core::geom::{hausdorff, wrap_pi};
use equidist_core::theorems::{composed_lambda, random_curve, random_generic_curve, reconstruction_delta};
use equidist_core::{Curve, Settings, Vec2};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lambda() -> impl Strategy<Value = f64> {
    prop_oneof![-2.0..-0.01f64, 0.01..0.49f64, 0.51..0.99f64, 1.01..3.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wrap_pi_stays_in_range(a in -1e4..1e4f64) {
        let w = wrap_pi(a);
        prop_assert!(w > -PI && w <= PI);
        let k = ((a - w) / TAU).round();
        prop_assert!((a - w - k * TAU).abs() < 1e-9);
    }

    #[test]
    fn margin_swaps_sign_with_the_roles(l in lambda(), a in -5.0..5.0f64, b in -5.0..5.0f64) {
        prop_assert!((singularity_margin(l, a, b) + singularity_margin(1.0 - l, b, a)).abs() < 1e-12);
    }

    #[test]
    fn margin_vanishes_at_the_critical_lambda(a in 0.1..5.0f64, b in 0.1..5.0f64) {
        let l = a / (a + b);
        prop_assert!(singularity_margin(l, a, b).abs() < 1e-12);
    }

    #[test]
    fn circle_equidistant_curvature(r in 0.1..10.0f64, l in lambda()) {
        let k = equidistant_curvature(l, 1.0 / r, 1.0 / r).unwrap();
        let want = 1.0 / (r * (2.0 * l - 1.0).abs());
        prop_assert!((k - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn reconstruction_returns_to_the_curve(l in lambda()) {
        let back = composed_lambda(l, reconstruction_delta(l));
        prop_assert!(back.abs() < 1e-12);
    }

    #[test]
    fn composition_is_symmetric(l in lambda(), d in lambda()) {
        prop_assert!((composed_lambda(l, d) - composed_lambda(d, l)).abs() < 1e-12);
        prop_assert!((composed_lambda(l, 0.5) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hausdorff_is_a_metric_on_samples(
        a in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..40),
        b in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..40),
        shift in -1.0..1.0f64,
    ) {
        let pa: Vec<Vec2> = a.iter().map(|&(x, y)| Vec2::new(x, y)).collect();
        let pb: Vec<Vec2> = b.iter().map(|&(x, y)| Vec2::new(x, y)).collect();
        prop_assert_eq!(hausdorff(&pa, &pa), 0.0);
        prop_assert_eq!(hausdorff(&pa, &pb), hausdorff(&pb, &pa));
        let moved: Vec<Vec2> = pa.iter().map(|&p| p + Vec2::new(shift, 0.0)).collect();
        prop_assert!((hausdorff(&pa, &moved) - shift.abs()).abs() < 1e-12);
    }

    #[test]
    fn reparametrisation_keeps_invariants(seed in any::<u64>(), shift in 0.0..TAU) {
        let c = random_curve(&mut ChaCha8Rng::seed_from_u64(seed), 4);
        let s = Settings::with_samples(2048);
        prop_assume!(c.genericity(&s).is_generic());
        let d = c.shifted(shift);
        prop_assert_eq!(c.rotation_number(&s).unwrap(), d.rotation_number(&s).unwrap());
        prop_assert_eq!(c.inflexions(&s).unwrap().len(), d.inflexions(&s).unwrap().len());
        for i in 0..8 {
            let t = i as f64 * 0.7;
            prop_assert!(c.point(t + shift).dist(d.point(t)) < 1e-12);
        }
    }

    #[test]
    fn jets_of_random_curves_match_differences(seed in any::<u64>(), t in 0.0..TAU) {
        let c = random_curve(&mut ChaCha8Rng::seed_from_u64(seed), 5);
        let h = 1e-4;
        let j = c.jet(t);
        let (p, m) = (c.jet(t + h), c.jet(t - h));
        let scale = 1.0 + j.d3.norm();
        prop_assert!(j.d1.dist((p.p - m.p) / (2.0 * h)) < 1e-6 * scale);
        prop_assert!(j.d2.dist((p.d1 - m.d1) / (2.0 * h)) < 1e-6 * scale);
        prop_assert!(j.d3.dist((p.d2 - m.d2) / (2.0 * h)) < 1e-6 * (1.0 + j.d4.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Along a branch the margin changes sign exactly at cusps and at the
    /// diagonal nodes, where both curvatures vanish together. `E_λ` and
    /// `E_{1−λ}` have the same number of cusps.
    #[test]
    fn random_equidistants_are_consistent(index in 0usize..1000, l in 0.05..0.45f64) {
        let s = Settings::with_samples(2048);
        let (_, an) = random_generic_curve(11, index, s);
        let an = an.unwrap();
        let a = full_equidistant(&an, l).unwrap();
        let b = full_equidistant(&an, 1.0 - l).unwrap();
        let total = |v: &[equidist_core::Branch]| v.iter().map(|b| b.cusp_count()).sum::<usize>();
        prop_assert_eq!(total(&a), total(&b));
        for br in &a {
            let mut nodes: Vec<_> = br.nodes.iter().filter(|n| !n.cusp).collect();
            if br.closed {
                nodes.pop();
            }
            let diagonal = nodes.iter().filter(|n| n.margin.is_nan()).count();
            let mut m: Vec<f64> = nodes.iter().map(|n| n.margin).filter(|m| !m.is_nan()).collect();
            if br.closed {
                m.push(m[0]);
            }
            let changes = m.windows(2).filter(|w| (w[0] < 0.0) != (w[1] < 0.0)).count();
            prop_assert_eq!(changes, br.cusp_count() + diagonal);
            prop_assert_eq!(br.rotation.is_some(), br.closed);
        }
    }
}
