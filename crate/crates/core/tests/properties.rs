use proptest::prelude::*;

use turnpike_lab::dynamics::{
    from_diag_hyperbolic, from_scalar_ode, min_norm_exact_control, DiscreteLinearSystem, HyperbolicParams, OdeScheme,
    TimeGrid, TraceOperator,
};
use turnpike_lab::objectives::{evaluate, prox_control_term, singular_weights, ObjectiveSpec, Tracking};
use turnpike_lab::scalar_oracle::{
    example1_moment_check, general_solution, solve_t0, Coefficient, Example1Params, ScalarDynamics, ScalarProblem,
};
use turnpike_lab::scenario::output::fmt_f64;
use turnpike_lab::solver::{solve_primal_dual, SolverConfig};
use turnpike_lab::turnpike::{detect, pq_specs};
use turnpike_lab::Series;

fn scalar_system(f: f64, g_rate: f64, alpha: f64, steps: usize, horizon: f64) -> DiscreteLinearSystem {
    from_scalar_ode(
        &Coefficient::constant(f),
        &Coefficient::exponential(1.0, g_rate),
        TimeGrid::new(horizon, steps).unwrap(),
        alpha,
        OdeScheme::ImplicitEuler,
    )
    .unwrap()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn tracking_variant(which: usize, n: usize, dim: usize, gamma: f64) -> Tracking {
    let target = vec![0.1; dim];
    match which {
        0 => Tracking::PointwiseL1 {
            weights: (0..=n).map(|k| gamma * (1 + k % 3) as f64).collect(),
            target,
        },
        1 => Tracking::MaxNormWindow {
            gamma,
            window: (n / 2, n),
            target,
        },
        2 => Tracking::GroupL2Window {
            gamma,
            trace: TraceOperator::new(n / 2, n, vec![0]).unwrap(),
            target: vec![0.1],
        },
        _ => Tracking::PointPenalty {
            gamma,
            index: n / 2,
            target,
        },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn t0_solves_its_equation(log_gamma in -3.0f64..3.0) {
        let gamma = 10f64.powf(log_gamma);
        let t0 = solve_t0(gamma).unwrap();
        prop_assert!(t0 > 0.0);
        prop_assert!(((t0 - 1.0) * t0.exp() - (1.0 / gamma - 1.0)).abs() <= 1e-12 * (1.0 / gamma).max(1.0));
    }

    #[test]
    fn t0_decreases_in_gamma(log_gamma in -2.0f64..2.0, step in 0.01f64..1.0) {
        let g = 10f64.powf(log_gamma);
        prop_assert!(solve_t0(g * (1.0 + step)).unwrap() < solve_t0(g).unwrap());
    }

    #[test]
    fn example1_control_has_unit_moment(gamma in 0.3f64..20.0) {
        let t0 = solve_t0(gamma).unwrap();
        let p = Example1Params::new(gamma, t0 + 1.0).unwrap();
        prop_assert!((example1_moment_check(&p) - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn simulate_is_affine(
        f in -1.0f64..1.0,
        rate in -0.5f64..0.5,
        alpha in -2.0f64..2.0,
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        u in prop::collection::vec(-1.0f64..1.0, 12),
        v in prop::collection::vec(-1.0f64..1.0, 12),
    ) {
        let sys = scalar_system(f, rate, alpha, 12, 1.0);
        let (us, vs) = (Series::from_scalars(u.clone()), Series::from_scalars(v.clone()));
        let mix = Series::from_scalars(u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect());
        let lhs = sys.simulate(&mix).unwrap();
        let (lu, lv, free) = (sys.simulate_linear(&us).unwrap(), sys.simulate_linear(&vs).unwrap(), sys.free_response());
        for k in 0..=12 {
            let rhs = a * lu.node(k)[0] + b * lv.node(k)[0] + free.node(k)[0];
            prop_assert!((lhs.node(k)[0] - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
    }

    #[test]
    fn adjoint_is_the_transpose(
        nx in 3usize..8,
        seed_u in prop::collection::vec(-1.0f64..1.0, 24),
        seed_g in prop::collection::vec(-1.0f64..1.0, 64),
    ) {
        let p = HyperbolicParams::wave(nx);
        let steps = 3 * nx;
        let sys = from_diag_hyperbolic(&p, p.grid(steps).unwrap()).unwrap();
        let n = sys.state_dim();
        let u = Series::from_scalars((0..steps).map(|k| seed_u[k % seed_u.len()]).collect());
        let g = Series::from_flat(n, (0..(steps + 1) * n).map(|i| seed_g[(7 * i) % seed_g.len()] * (1 + i % 5) as f64).collect()).unwrap();
        let x = sys.simulate_linear(&u).unwrap();
        let lhs = dot(g.as_slice(), x.as_slice());
        let rhs = dot(sys.adjoint(&g).unwrap().as_slice(), u.as_slice());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn dual_projection_is_idempotent_and_lands_in_the_set(
        which in 0usize..4,
        gamma in 0.01f64..3.0,
        v in prop::collection::vec(-5.0f64..5.0, 9),
    ) {
        let sys = scalar_system(1.0, 1.0, -1.0, 8, 2.0);
        let spec = ObjectiveSpec::for_system(&sys, &[0.0], 0.0, tracking_variant(which, 8, 1, gamma)).unwrap();
        let len = spec.tracked_nodes().len() * spec.block_dim();
        let mut p = v[..len].to_vec();
        spec.project_dual(&mut p);
        prop_assert!(spec.in_dual_set(&p, 1e-12));
        let mut q = p.clone();
        spec.project_dual(&mut q);
        for (a, b) in p.iter().zip(&q) {
            prop_assert!((a - b).abs() <= 1e-14);
        }
        if spec.in_dual_set(&v[..len], 0.0) {
            prop_assert_eq!(&p[..], &v[..len]);
        }
    }

    #[test]
    fn moreau_decomposition(
        which in 0usize..4,
        gamma in 0.01f64..3.0,
        tau in 0.01f64..5.0,
        v in prop::collection::vec(-5.0f64..5.0, 9),
    ) {
        let sys = scalar_system(1.0, 1.0, -1.0, 8, 2.0);
        let spec = ObjectiveSpec::for_system(&sys, &[0.0], 0.0, tracking_variant(which, 8, 1, gamma)).unwrap();
        let len = spec.tracked_nodes().len() * spec.block_dim();
        let v = &v[..len];
        let prox = spec.prox_tracking(v, tau);
        let mut dual: Vec<f64> = v.iter().map(|x| x / tau).collect();
        spec.project_dual(&mut dual);
        for j in 0..len {
            prop_assert!((prox[j] + tau * dual[j] - v[j]).abs() <= 1e-10);
        }
    }

    #[test]
    fn control_prox_beats_perturbations(
        tau in 0.01f64..10.0,
        l1 in 0.0f64..2.0,
        u_d in -1.0f64..1.0,
        v in prop::collection::vec(-3.0f64..3.0, 6),
        dir in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let sys = scalar_system(0.5, 0.0, -1.0, 6, 1.0);
        let spec = ObjectiveSpec::for_system(&sys, &[u_d], l1, Tracking::PointPenalty { gamma: 1.0, index: 3, target: vec![0.0] }).unwrap();
        let vs = Series::from_scalars(v.clone());
        let p = prox_control_term(&vs, tau, &spec).unwrap().point;
        let value = |q: &[f64]| {
            spec.control_cost(&Series::from_scalars(q.to_vec()))
                + q.iter().zip(&v).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / (2.0 * tau)
        };
        let best = value(p.as_slice());
        for h in [1e-3, 1e-2, 1e-1] {
            let moved: Vec<f64> = p.as_slice().iter().zip(&dir).map(|(a, d)| a + h * d).collect();
            prop_assert!(best <= value(&moved) + 1e-13);
        }
    }

    #[test]
    fn detect_finds_the_last_entry(
        len in 2usize..40,
        entry in 0usize..40,
        level in 1e-3f64..1.0,
    ) {
        let entry = entry % len;
        // On target from `entry` on, off target just before.
        let x: Vec<f64> = (0..len).map(|k| if k < entry { level } else { 0.0 }).collect();
        let u = vec![0.0; len - 1];
        let tp = detect(&Series::from_scalars(x), &Series::from_scalars(u), &[0.0], &[0.0], 1e-5).unwrap();
        prop_assert_eq!(tp.arrival_index, Some(entry));
        prop_assert_eq!(tp.support_end_index, None);
    }

    #[test]
    fn detect_reports_no_arrival_when_the_end_is_off_target(len in 2usize..40, level in 1e-3f64..1.0) {
        let x: Vec<f64> = (0..len).map(|k| if k + 1 == len { level } else { 0.0 }).collect();
        let tp = detect(&Series::from_scalars(x), &Series::from_scalars(vec![0.0; len - 1]), &[0.0], &[0.0], 1e-5).unwrap();
        prop_assert_eq!(tp.arrival_index, None);
    }

    #[test]
    fn csv_floats_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        prop_assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
    }

    #[test]
    fn singular_weights_shape(steps in 4usize..200, frac in 0.05f64..0.9) {
        let grid = TimeGrid::new(2.0, steps).unwrap();
        let k0 = ((steps as f64 * frac) as usize).clamp(1, steps - 1);
        let w = singular_weights(&grid, k0).unwrap();
        prop_assert_eq!(w.len(), steps + 1);
        prop_assert!(w[..=k0].iter().all(|&x| x == 0.0));
        prop_assert!((w[k0 + 1] - 1.0 / grid.dt()).abs() <= 1e-9 / grid.dt());
        prop_assert!(w[k0 + 1..].windows(2).all(|p| p[1] < p[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn exact_control_hits_target_within_c1_bound(
        f in -0.5f64..0.5,
        alpha in -2.0f64..2.0,
        target in -2.0f64..2.0,
        k0 in 1usize..10,
    ) {
        let sys = scalar_system(f, 0.0, alpha, 10, 1.0);
        let rep = min_norm_exact_control(&sys, &[target], k0).unwrap();
        prop_assert!(rep.residual <= 1e-8);
        // u_exact covers the first k0 steps; zero afterwards.
        let mut u = vec![0.0; 10];
        u[..k0].copy_from_slice(rep.u_exact.as_slice());
        let x = sys.simulate(&Series::from_scalars(u)).unwrap();
        prop_assert!((x.node(k0)[0] - target).abs() <= 1e-8);
        prop_assert!(rep.control_norm() <= rep.c1_hat * (alpha.abs() + target.abs()) + 1e-12);
    }

    #[test]
    fn general_oracle_invariants(f in 0.2f64..2.0, g in 0.3f64..3.0, alpha in -2.0f64..-0.2, gamma in 1.0f64..5.0) {
        let d = ScalarDynamics::new(Coefficient::constant(f), Coefficient::constant(g), alpha, 3.0).unwrap();
        let sol = general_solution(&ScalarProblem::new(d, gamma).unwrap()).unwrap();
        prop_assert!(sol.moment_residual() <= 1e-10);
        prop_assert!(sol.lambda() >= 0.0);
        for t in sol.grid_nodes() {
            prop_assert!(sol.control(t) >= 0.0);
            prop_assert!(sol.state(t) <= 1e-12);
            if t >= sol.t0() {
                prop_assert_eq!(sol.control(t), 0.0);
                prop_assert!(sol.state(t).abs() <= 1e-8);
                prop_assert!(sol.switching(t) <= 1e-9);
            }
        }
    }

    #[test]
    fn point_penalty_value_is_below_max_norm_value(
        gamma in 0.05f64..3.0,
        alpha in -2.0f64..2.0,
        k0 in 2usize..8,
    ) {
        let sys = scalar_system(0.0, 0.0, alpha, 8, 1.0);
        let (p, q) = pq_specs(&sys, gamma, k0, &[0.0], &[0.0]).unwrap();
        let cfg = SolverConfig::default();
        let (rp, rq) = (solve_primal_dual(&sys, &p, &cfg).unwrap(), solve_primal_dual(&sys, &q, &cfg).unwrap());
        // Dual value of Q bounds v_Q below; P's objective bounds v_P above.
        prop_assert!(rq.dual_value <= rp.objective + 1e-12);
        prop_assert!((evaluate(&p, &rp.u_opt, &rp.x_opt).unwrap() - rp.objective).abs() <= 1e-12 * (1.0 + rp.objective.abs()));
    }

    #[test]
    fn solve_is_independent_of_the_power_method_seed(seed in 0u64..1000, gamma in 0.2f64..3.0) {
        let sys = scalar_system(1.0, 1.0, -1.0, 20, 2.0);
        let mut weights = vec![gamma; 21];
        weights[0] = 0.0;
        let spec = ObjectiveSpec::for_system(&sys, &[0.0], 1.0, Tracking::PointwiseL1 { weights, target: vec![0.0] }).unwrap();
        let a = solve_primal_dual(&sys, &spec, &SolverConfig::default()).unwrap();
        let b = solve_primal_dual(&sys, &spec, &SolverConfig { seed, ..SolverConfig::default() }).unwrap();
        prop_assert!(a.converged && b.converged);
        prop_assert!(a.gap <= SolverConfig::default().tol_gap);
        prop_assert!(a.u_opt.max_abs_diff(&b.u_opt) <= 1e-6);
    }
}
