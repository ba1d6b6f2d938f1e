use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use proptest::prelude::*;
use rand::Rng;

use rcom::certificate::{chart_certificate, corollary_certificate, linear_tan_bounds_check};
use rcom::energy::{energy_noise_floor, gradient, theta_over_tan, theta_over_tanh};
use rcom::sampling::{random_certified_instance, random_point_near, random_unit_vector, seeded_rng, InstanceOptions};
use rcom::verification::{grid_minimize, numeric_gradient, numeric_second_derivative};
use rcom::{karcher_mean, ModelSpace, SolverOptions};

fn space_strategy() -> impl Strategy<Value = ModelSpace> {
    (prop_oneof![Just(1.0), Just(0.0), Just(-1.0)], 1usize..=3).prop_map(|(k, n)| ModelSpace::new(k, n).unwrap())
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = seeded_rng(21);
    for i in 0..1000 {
        let space = if i % 2 == 0 { ModelSpace::sphere(2) } else { ModelSpace::hyperbolic(2) }.unwrap();
        let inst = random_certified_instance(&mut rng, space, &InstanceOptions::default()).unwrap();
        let x = random_point_near(&mut rng, &inst.center, inst.rho).unwrap();
        let g = gradient(&inst.measure, &x).unwrap();
        let analytic = x.frame().to_coords(&g);
        let numeric = numeric_gradient(&inst.measure, &x).unwrap();
        let err = (analytic - numeric).norm();
        assert!(err <= 1e-5 * (1.0 + g.norm()), "instance {i}: gradient error {err}");
    }
}

#[test]
fn comparison_factors_are_monotone() {
    let mut prev = f64::INFINITY;
    for k in 0..10_000 {
        let v = theta_over_tan(FRAC_PI_2 * k as f64 / 10_000.0);
        assert!(v < prev || k == 0, "θ/tan θ not decreasing at step {k}");
        prev = v;
    }
    let mut prev = f64::NEG_INFINITY;
    for k in 0..10_000 {
        let v = theta_over_tanh(10.0 * k as f64 / 10_000.0);
        assert!(v > prev, "θ/tanh θ not increasing at step {k}");
        prev = v;
    }
}

#[test]
fn linear_tan_bounds_on_a_fine_grid() {
    for k in 1..100_000 {
        let theta = FRAC_PI_4 * k as f64 / 100_000.0;
        let b = linear_tan_bounds_check(theta).unwrap();
        assert!(b.holds(), "θ={theta}: {b:?}");
    }
}

#[test]
fn satisfied_chart_certificates_have_nonempty_intervals() {
    let mut checked = 0;
    for il in 0..10 {
        for it in 0..10 {
            for is in 0..10 {
                for ilam in 0..10 {
                    let l = 1e-4 * 10f64.powf(il as f64 / 3.0);
                    let t = 0.05 + 0.09 * it as f64;
                    let s = 1.0 + 0.3 * is as f64;
                    let lambda = if ilam == 0 { 0.0 } else { 0.01 * 2f64.powi(ilam) };
                    let c = chart_certificate(l, t, s, lambda).unwrap();
                    if c.satisfied {
                        assert!(c.interval_is_nonempty(), "(L,t,s,Λ)=({l},{t},{s},{lambda})");
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn unsigned_corollary_on_a_grid() {
    for ir in 0..30 {
        for irho in 0..30 {
            for ilam in 0..10 {
                let (r, rho, lambda) = (0.05 * ir as f64, 0.05 * irho as f64 + 0.01, 0.5 * ilam as f64);
                let hi = if lambda > 0.0 { FRAC_PI_4 / lambda.sqrt() } else { f64::INFINITY };
                assert_eq!(corollary_certificate(0.0, r, rho, lambda).satisfied, r < rho && rho < hi);
            }
        }
    }
}

/// Certified instances have a unique grid minimum at the solver's answer and
/// are strictly convex along random geodesics.
#[test]
fn certified_instances_are_sound() {
    let mut rng = seeded_rng(22);
    for i in 0..60 {
        let space = ModelSpace::new([1.0, 0.0, -1.0][i % 3], 1 + (i / 3) % 2).unwrap();
        let inst = random_certified_instance(&mut rng, space, &InstanceOptions::default()).unwrap();
        let x = karcher_mean(&inst.measure, &inst.center, inst.rho, &inst.bounds).unwrap();
        let res = 1e-3 * inst.rho;
        let grid = grid_minimize(&inst.measure, &inst.center, inst.rho, res).unwrap();
        assert_eq!(grid.local_min_count, 1);
        assert!(x.distance(&grid.point).unwrap() <= 2.0 * res);
        for _ in 0..20 {
            let y = random_point_near(&mut rng, &inst.center, inst.rho).unwrap();
            for _ in 0..50 {
                let u = random_unit_vector(&mut rng, space.dimension());
                assert!(numeric_second_derivative(&inst.measure, &y, &u).unwrap() > 0.0);
            }
        }
    }
}

#[test]
fn solver_energy_descends_and_converges_inside() {
    let mut rng = seeded_rng(23);
    let options = SolverOptions { record_trace: true, ..SolverOptions::default() };
    for i in 0..150 {
        let space = ModelSpace::new([1.0, 0.0, -1.0][i % 3], 1 + (i / 3) % 3).unwrap();
        let inst = random_certified_instance(&mut rng, space, &InstanceOptions::default()).unwrap();
        let sol = rcom::chart::karcher_mean_with(&inst.measure, &inst.center, inst.rho, &inst.bounds, &options).unwrap();
        let floor = energy_noise_floor(&inst.measure, &sol.point).unwrap();
        for w in sol.trace.windows(2) {
            assert!(w[1] <= w[0] + 2.0 * floor, "energy rose from {} to {}", w[0], w[1]);
        }
        let scale = inst.rho * inst.measure.jordan_masses().variation();
        assert!(sol.gradient_norm <= 1e-10 * scale.max(1.0));
        assert!(inst.center.distance(&sol.point).unwrap() < inst.rho);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minimizer_ignores_positive_weight_scaling(space in space_strategy(), seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let inst = random_certified_instance(&mut rng, space, &InstanceOptions::default()).unwrap();
        let x = karcher_mean(&inst.measure, &inst.center, inst.rho, &inst.bounds).unwrap();
        let y = karcher_mean(&inst.measure.scaled(7.3), &inst.center, inst.rho, &inst.bounds).unwrap();
        prop_assert!(x.distance(&y).unwrap() <= 1e-8);
    }

    #[test]
    fn uncertified_radius_is_refused(space in space_strategy(), seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let inst = random_certified_instance(&mut rng, space, &InstanceOptions::default()).unwrap();
        let r = inst.measure.support_radius(&inst.center).unwrap();
        let rho = r * rng.random_range(0.1..0.9);
        prop_assert!(karcher_mean(&inst.measure, &inst.center, rho, &inst.bounds).is_err());
    }
}
