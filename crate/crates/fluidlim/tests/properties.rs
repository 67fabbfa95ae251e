//! Property-based invariants across the library: probability-function
//! shape, interval containment, bookkeeping conservation, trajectory
//! prefix stability, and stopped-vs-unstopped deviation ordering.

use proptest::prelude::*;

use fluidlim::bounds::gamma_tail_cdf;
use fluidlim::convergence::sup_deviation;
use fluidlim::model::JumpModel;
use fluidlim::models::particle::{particle_model, ParticleSystemParams};
use fluidlim::ode::{eval_solution, integrate, VectorField};
use fluidlim::rng::replicate_stream;
use fluidlim::simulate::{simulate, SimConfig};
use fluidlim::stats::wilson95;
use fluidlim::StateVector;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_cdf_monotone_in_t(n in 1u64..50, rate in 0.1f64..10.0, t in 0.0f64..20.0) {
        let dt = 0.5;
        let a = gamma_tail_cdf(n, rate, t).unwrap();
        let b = gamma_tail_cdf(n, rate, t + dt).unwrap();
        prop_assert!(b + 1e-12 >= a, "P({n}, {rate}t) not monotone at t = {t}");
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn gamma_cdf_decreasing_in_n(n in 1u64..50, rate in 0.1f64..10.0, t in 0.01f64..20.0) {
        // waiting for more events is never more likely by the same time
        let a = gamma_tail_cdf(n, rate, t).unwrap();
        let b = gamma_tail_cdf(n + 1, rate, t).unwrap();
        prop_assert!(b <= a + 1e-12);
    }

    #[test]
    fn wilson_contains_estimate(k in 0u64..500, extra in 0u64..500) {
        let n = k + extra.max(1);
        let (lo, hi) = wilson95(k, n);
        let p = k as f64 / n as f64;
        prop_assert!(lo <= p + 1e-12 && p <= hi + 1e-12);
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        prop_assert!(lo <= hi);
    }

    #[test]
    fn particle_conservation_along_paths(
        w in 2u32..6,
        seed in 0u64..1000,
        scale in 50u64..200,
    ) {
        let params = ParticleSystemParams { w, mu: 1.0, sigma2: 0.0, kappa: 2.0, scale };
        let mut rng = replicate_stream(seed, 0);
        let (model, x0) = particle_model(&params, &mut rng).unwrap();
        let cfg = SimConfig::new(1.0, seed).unwrap().with_default_cap(2.0, scale);
        let traj = simulate(&model, &x0, &cfg, &mut rng).unwrap();
        let mut prev: Option<(u64, u64)> = None;
        for x in &traj.states {
            let c = model.counters(x).unwrap();
            let (inert, excited) = c.reconstruct_counts(w).unwrap();
            prop_assert_eq!(inert + excited, c.heavy(), "conservation breach");
            let p = model.inert_probability(x).unwrap();
            prop_assert!((0.0..=1.0).contains(&p), "p = {}", p);
            if let Some((i0, e0)) = prev {
                let delta = (inert as i64 - i0 as i64, excited as i64 - e0 as i64);
                prop_assert!(
                    [(0, -1), (-2, 1), (-1, 0)].contains(&delta),
                    "one-step delta {:?} outside the transition table",
                    delta
                );
            }
            prev = Some((inert, excited));
        }
    }

    #[test]
    fn longer_horizon_extends_trajectory(seed in 0u64..500) {
        // the same stream truncated later reproduces the earlier prefix
        let params = ParticleSystemParams { w: 2, mu: 1.0, sigma2: 0.0, kappa: 2.0, scale: 100 };
        let run = |horizon: f64| {
            let mut rng = replicate_stream(seed, 1);
            let (model, x0) = particle_model(&params, &mut rng).unwrap();
            let cfg = SimConfig::new(horizon, seed).unwrap().with_default_cap(2.0, 100);
            simulate(&model, &x0, &cfg, &mut rng).unwrap()
        };
        let short = run(0.5);
        let long = run(1.0);
        prop_assert!(short.jumps() <= long.jumps());
        for j in 0..short.jumps() {
            prop_assert_eq!(short.jump_times[j], long.jump_times[j]);
            prop_assert_eq!(short.states[j].coords(), long.states[j].coords());
        }
    }

    #[test]
    fn stopped_deviation_never_exceeds_unstopped(seed in 0u64..500) {
        let params = ParticleSystemParams { w: 2, mu: 1.0, sigma2: 0.0, kappa: 2.0, scale: 80 };
        let mut rng = replicate_stream(seed, 2);
        let (model, x0) = particle_model(&params, &mut rng).unwrap();
        let cfg = SimConfig::new(1.0, seed).unwrap().with_default_cap(2.0, 80);
        let traj = simulate(&model, &x0, &cfg, &mut rng).unwrap();
        let field = VectorField::new(3, |_| StateVector::zeros(3));
        let a = traj.states[0].clone();
        let sol = integrate(&field, &a, 1.0, 0.01, |_| true).unwrap();
        // force a stop halfway through the jump sequence
        let mut stopped = traj.clone();
        if stopped.jumps() > 2 {
            stopped.exited_region_at = Some(stopped.jumps() / 2);
        }
        let d_stopped = sup_deviation(&stopped, &sol, 1.0).unwrap();
        let d_full = sup_deviation(&traj, &sol, 1.0).unwrap();
        prop_assert!(d_stopped <= d_full + 1e-12);
    }

    #[test]
    fn dense_output_exact_at_grid_points(step_exp in 1u32..4, horizon in 0.5f64..3.0) {
        let step = 10f64.powi(-(step_exp as i32));
        let field = VectorField::new(1, |x: &StateVector| {
            StateVector::new(vec![-x.get(0)]).unwrap()
        });
        let a = StateVector::new(vec![1.0]).unwrap();
        let sol = integrate(&field, &a, horizon, step, |_| true).unwrap();
        for (t, y) in sol.times.iter().zip(&sol.states) {
            let v = eval_solution(&sol, *t).unwrap();
            prop_assert!((v.get(0) - y.get(0)).abs() < 1e-14);
        }
    }
}
