use std::f64::consts::PI;

use approx::assert_relative_eq;
use henon_tm::bounds::{remark2_check, unweighted_domination};
use henon_tm::candidates::{candidate_value, concentrating_sequence};
use henon_tm::optimizer::{concentration_metric, maximize_radial, OptimizerConfig};
use henon_tm::profiles::{
    dirichlet_norm_halfline, dirichlet_norm_radial, disk_value_via_halfline,
    RadialProfile, WeightExponent, CRITICAL_GAMMA,
};
use henon_tm::quadrature::QuadratureSpec;
use henon_tm::rearrange::{mu_rearrange_radial, PolarSample};
use henon_tm::transforms::{
    from_halfline, moser_inverse, moser_transform, ssw_functional_identity, ssw_inverse,
    ssw_transform, to_halfline,
};
use proptest::prelude::*;

fn w(alpha: f64) -> WeightExponent {
    WeightExponent::new(alpha).unwrap()
}

fn profile_from(steps: &[f64], values: &[f64]) -> RadialProfile {
    let total: f64 = steps.iter().sum();
    let mut grid = vec![0.0];
    for s in steps {
        grid.push(grid.last().unwrap() + s / total);
    }
    *grid.last_mut().unwrap() = 1.0;
    let mut v = values[..grid.len()].to_vec();
    *v.last_mut().unwrap() = 0.0;
    RadialProfile::new(grid, v).unwrap()
}

fn arb_profile() -> impl Strategy<Value = RadialProfile> {
    (4usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(0.1f64..1.0, n - 1),
            prop::collection::vec(-0.5f64..0.5, n),
        )
            .prop_map(|(s, v)| profile_from(&s, &v))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn power_map_preserves_energy(u in arb_profile(), alpha in 0.0f64..6.0) {
        let v = ssw_transform(&u, &w(alpha)).unwrap();
        let (a, b) = (dirichlet_norm_radial(&u), dirichlet_norm_radial(&v));
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-12));
    }

    #[test]
    fn power_map_round_trip(u in arb_profile(), alpha in 0.0f64..6.0) {
        let weight = w(alpha);
        let back = ssw_inverse(&ssw_transform(&u, &weight).unwrap(), &weight).unwrap();
        for r in [0.0, 0.1, 0.37, 0.8, 1.0] {
            prop_assert!((back.eval(r) - u.eval(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn moser_map_preserves_energy(u in arb_profile()) {
        let h = moser_transform(&u).unwrap();
        let (a, b) = (dirichlet_norm_radial(&u), dirichlet_norm_halfline(&h));
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-12));
        let back = moser_inverse(&h).unwrap();
        for r in [0.05, 0.5, 0.9] {
            prop_assert!((back.eval(r) - u.eval(r)).abs() < 1e-12);
        }
    }

    #[test]
    fn power_map_functional_identity(u in arb_profile(), alpha in 0.0f64..4.0) {
        let rep = ssw_functional_identity(&u, &w(alpha), &QuadratureSpec::default()).unwrap();
        prop_assert!(rep.holds(1e-8), "{rep:?}");
    }
}

#[test]
fn halfline_round_trip_through_disk() {
    let weight = w(1.5);
    let u = RadialProfile::from_fn(1.0, 33, |r| (1.0 - r * r) * 0.4).unwrap();
    let back = from_halfline(&to_halfline(&u, &weight).unwrap(), &weight).unwrap();
    for r in [0.0, 0.2, 0.6, 1.0] {
        assert!((back.eval(r) - u.eval(r)).abs() < 1e-12);
    }
}

#[test]
fn rearranging_a_radial_decreasing_profile_is_identity_without_weight() {
    let u = RadialProfile::from_fn(1.0, 65, |r| 0.3 * (1.0 - r).powi(2)).unwrap();
    let star = mu_rearrange_radial(&u, &w(0.0)).unwrap();
    for r in [0.0, 0.25, 0.5, 0.75, 1.0] {
        assert!((star.eval(r) - u.eval(r)).abs() < 1e-12);
    }
}

#[test]
fn rearranged_energy_drops_by_epsilon_for_radial_samples() {
    for alpha in [0.5, 2.0] {
        let weight = w(alpha);
        let u = RadialProfile::from_fn(1.0, 65, |r| 0.3 * (1.0 - r * r)).unwrap();
        let star = mu_rearrange_radial(&u, &weight).unwrap();
        assert_relative_eq!(star.radius(), weight.star_radius(), max_relative = 1e-14);
        assert_relative_eq!(
            dirichlet_norm_radial(&star),
            weight.epsilon() * dirichlet_norm_radial(&u),
            max_relative = 1e-9
        );
    }
}

#[test]
fn polar_sample_of_radial_function_has_no_angular_energy() {
    let s = PolarSample::from_fn(17, 8, |x, y| 1.0 - x.hypot(y)).unwrap();
    let s2 = PolarSample::from_fn(17, 32, |x, y| 1.0 - x.hypot(y)).unwrap();
    assert_relative_eq!(s.dirichlet_fd(), s2.dirichlet_fd(), max_relative = 1e-12);
    assert_relative_eq!(s.dirichlet_fd(), PI, max_relative = 1e-12);
}

#[test]
fn remark2_is_strict_for_nonzero_profiles() {
    let q = QuadratureSpec::default();
    let u = RadialProfile::from_fn(1.0, 41, |r| 0.3 * (1.0 - r)).unwrap();
    for alpha in [0.5, 1.0, 4.0] {
        let rep = remark2_check(&u, &w(alpha), &q).unwrap();
        assert!(rep.strict(), "{rep:?}");
    }
    let zero = remark2_check(&RadialProfile::zero(1.0), &w(1.0), &q).unwrap();
    assert!(zero.degenerate && !zero.strict());
    assert!(remark2_check(&u, &w(0.0), &q).is_err());
}

#[test]
fn weighted_value_is_dominated_by_unweighted_supremum() {
    let q = QuadratureSpec::default();
    let s0 = maximize_radial(&w(0.0), CRITICAL_GAMMA, &OptimizerConfig::default())
        .unwrap()
        .value;
    let raw = RadialProfile::from_fn(1.0, 81, |r| (1.0 - r * r).sqrt() * (1.0 - r)).unwrap();
    let u = raw.scaled(1.0 / dirichlet_norm_radial(&raw).sqrt());
    for alpha in [0.5, 2.0] {
        let rep = unweighted_domination(&u, &w(alpha), s0, &q).unwrap();
        assert!(rep.lhs <= rep.rhs, "{rep:?}");
    }
}

#[test]
fn small_exponent_optimizer_beats_candidate_and_moser() {
    let q = QuadratureSpec::default();
    let gamma = 0.1;
    let weight = w(0.0);
    let best = maximize_radial(&weight, gamma, &OptimizerConfig::default()).unwrap();
    let candidate = henon_tm::candidates::carleson_chang_candidate();
    let cand = disk_value_via_halfline(&candidate, &weight, gamma, &q).unwrap();
    assert!(best.value >= cand, "{} < {cand}", best.value);
    for n in 1..=10 {
        let m = concentrating_sequence(n).unwrap();
        let v = disk_value_via_halfline(&m, &weight, gamma, &q).unwrap();
        assert!(best.value >= v, "n = {n}: {} < {v}", best.value);
    }
}

#[test]
fn candidate_value_matches_quadrature_of_profile() {
    let q = QuadratureSpec::default();
    for alpha in [0.0, 0.5, 3.0] {
        let weight = w(alpha);
        let closed = candidate_value(&weight, &q).unwrap().functional;
        let c = henon_tm::candidates::carleson_chang_candidate();
        let direct = disk_value_via_halfline(&c, &weight, CRITICAL_GAMMA, &q).unwrap();
        assert_relative_eq!(closed, direct, max_relative = 1e-6);
    }
}

#[test]
fn moser_functions_concentrate() {
    let weight = w(0.0);
    let mut last = f64::INFINITY;
    for n in [1, 4, 16, 64] {
        let u = from_halfline(&concentrating_sequence(n).unwrap(), &weight).unwrap();
        let c = concentration_metric(&u, 0.5).unwrap();
        assert!(c < last);
        last = c;
    }
    assert!(last < 0.05);
}
