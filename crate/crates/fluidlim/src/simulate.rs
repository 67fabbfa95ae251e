//! Event-driven simulation of the pure jump process `Y_t = X_{nu[t]}`.
//!
//! The embedded chain advances by sampled increments; each inter-event time
//! is Exponential with rate `c_N[X_n]`. Exit from the open region `S` can
//! only happen at a jump time because `Y` is piecewise constant, so exit
//! detection here is exact.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::JumpModel;
use crate::rng::{exponential, RngStream};
use crate::state::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    HorizonReached,
    ExitedRegion,
    RateVanished,
}

/// One simulated path: post-jump states `X_n` at jump times `tau_n`,
/// with `Y_t = states[n]` for `tau_n <= t < tau_{n+1}`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub jump_times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub horizon: f64,
    /// Index of the first state outside `S`, if any.
    pub exited_region_at: Option<usize>,
    pub terminated: Termination,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn jumps(&self) -> usize {
        self.jump_times.len() - 1
    }

    /// The state `Y_t` (right-continuous): the last post-jump state with
    /// jump time `<= t`.
    pub fn state_at(&self, t: f64) -> &StateVector {
        let idx = self.jump_times.partition_point(|&tau| tau <= t);
        &self.states[idx.saturating_sub(1)]
    }

    /// First exit time from `S`: the jump time at which the process first
    /// landed outside the region. Exact, since exit can only occur at a
    /// jump.
    pub fn exit_time(&self) -> Option<f64> {
        self.exited_region_at.map(|i| self.jump_times[i])
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SimConfig {
    /// Time horizon `u`.
    pub horizon: f64,
    pub master_seed: u64,
    pub stop_on_exit: bool,
    /// Safety cap on the jump count; exceeding it is an error signaling
    /// mis-scaled rates.
    pub max_jumps: usize,
}

impl SimConfig {
    pub fn new(horizon: f64, master_seed: u64) -> Result<Self> {
        if !(horizon > 0.0) {
            return Err(Error::InvalidParameter("horizon must be > 0".into()));
        }
        Ok(Self {
            horizon,
            master_seed,
            stop_on_exit: false,
            max_jumps: 10_000_000,
        })
    }

    pub fn stop_on_exit(mut self, yes: bool) -> Self {
        self.stop_on_exit = yes;
        self
    }

    pub fn max_jumps(mut self, cap: usize) -> Self {
        self.max_jumps = cap.max(1);
        self
    }

    /// Default cap from the rate bound: a rate-`kappa2*N` Poisson clock
    /// makes about `kappa2*N*u` jumps by the horizon.
    pub fn with_default_cap(self, kappa2: f64, scale: u64) -> Self {
        let cap = (4.0 * kappa2 * scale as f64 * self.horizon).ceil() as usize + 1000;
        self.max_jumps(cap)
    }
}

/// Simulate one trajectory of the jump process started at `x0`.
///
/// Stops at the horizon, at the first exit from `S` when `stop_on_exit` is
/// set, or when the rate vanishes (the process freezes). A state outside
/// `D` produced by the sampler is a model inconsistency error.
pub fn simulate<M: JumpModel + ?Sized>(
    model: &M,
    x0: &StateVector,
    cfg: &SimConfig,
    rng: &mut RngStream,
) -> Result<Trajectory> {
    x0.check_dim(model.dim())?;
    if !model.in_domain(x0) {
        return Err(Error::OutsideDomain {
            context: format!("initial state {:?}", x0.coords()),
        });
    }

    let mut jump_times = vec![0.0];
    let mut states = vec![x0.clone()];
    let mut exited_region_at = if model.in_region(x0) { None } else { Some(0) };

    if cfg.stop_on_exit && exited_region_at.is_some() {
        return Ok(Trajectory {
            jump_times,
            states,
            horizon: cfg.horizon,
            exited_region_at,
            terminated: Termination::ExitedRegion,
        });
    }

    let mut t = 0.0;
    loop {
        let x = states.last().expect("nonempty");
        let rate = model.rate(x);
        if !rate.is_finite() || rate < 0.0 {
            return Err(Error::ModelInconsistency(format!(
                "rate {rate} at state {:?}",
                x.coords()
            )));
        }
        if rate == 0.0 {
            return Ok(Trajectory {
                jump_times,
                states,
                horizon: cfg.horizon,
                exited_region_at,
                terminated: Termination::RateVanished,
            });
        }
        t += exponential(rng, rate);
        if t > cfg.horizon {
            return Ok(Trajectory {
                jump_times,
                states,
                horizon: cfg.horizon,
                exited_region_at,
                terminated: Termination::HorizonReached,
            });
        }
        if jump_times.len() > cfg.max_jumps {
            return Err(Error::MaxJumpsExceeded {
                max_jumps: cfg.max_jumps,
                horizon: cfg.horizon,
            });
        }
        let inc = model.sample_increment(states.last().expect("nonempty"), rng)?;
        let next = states.last().expect("nonempty").add(&inc);
        if !model.in_domain(&next) {
            return Err(Error::ModelInconsistency(format!(
                "sampler left domain D at t={t}: {:?}",
                next.coords()
            )));
        }
        let outside = !model.in_region(&next);
        jump_times.push(t);
        states.push(next);
        if outside && exited_region_at.is_none() {
            exited_region_at = Some(states.len() - 1);
            if cfg.stop_on_exit {
                return Ok(Trajectory {
                    jump_times,
                    states,
                    horizon: cfg.horizon,
                    exited_region_at,
                    terminated: Termination::ExitedRegion,
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_stream;
    use rand::Rng;

    struct ConstRateWalk {
        rate: f64,
        step: f64,
        region_cap: f64,
    }

    impl JumpModel for ConstRateWalk {
        fn dim(&self) -> usize {
            1
        }
        fn scale(&self) -> u64 {
            1
        }
        fn rate(&self, _x: &StateVector) -> f64 {
            self.rate
        }
        fn sample_increment(&self, _x: &StateVector, _rng: &mut RngStream) -> Result<StateVector> {
            StateVector::new(vec![self.step])
        }
        fn mean_increment(&self, _x: &StateVector) -> StateVector {
            StateVector::new(vec![self.step]).unwrap()
        }
        fn second_moment_bound(&self, _x: &StateVector) -> f64 {
            self.step * self.step
        }
        fn in_domain(&self, _x: &StateVector) -> bool {
            true
        }
        fn in_region(&self, x: &StateVector) -> bool {
            x.get(0) < self.region_cap
        }
    }

    #[test]
    fn zero_rate_freezes_at_x0() {
        let m = ConstRateWalk {
            rate: 0.0,
            step: 1.0,
            region_cap: f64::INFINITY,
        };
        let cfg = SimConfig::new(1.0, 0).unwrap();
        let mut rng = replicate_stream(0, 0);
        let traj = simulate(&m, &StateVector::zeros(1), &cfg, &mut rng).unwrap();
        assert_eq!(traj.states.len(), 1);
        assert_eq!(traj.terminated, Termination::RateVanished);
        assert_eq!(traj.exit_time(), None);
    }

    #[test]
    fn same_seed_same_trajectory() {
        let m = ConstRateWalk {
            rate: 5.0,
            step: 0.1,
            region_cap: f64::INFINITY,
        };
        let cfg = SimConfig::new(2.0, 7).unwrap();
        let a = simulate(&m, &StateVector::zeros(1), &cfg, &mut replicate_stream(7, 3)).unwrap();
        let b = simulate(&m, &StateVector::zeros(1), &cfg, &mut replicate_stream(7, 3)).unwrap();
        assert_eq!(a.jump_times, b.jump_times);
        assert_eq!(a.states, b.states);
    }

    #[test]
    fn exit_recorded_at_first_outside_state() {
        // unit steps, region y < 2.5: third state (index 3? states 0,1,2,3 ->
        // values 0,1,2,3) first violates at value 3, index 3.
        let m = ConstRateWalk {
            rate: 100.0,
            step: 1.0,
            region_cap: 2.5,
        };
        let cfg = SimConfig::new(10.0, 1).unwrap().stop_on_exit(true);
        let traj = simulate(&m, &StateVector::zeros(1), &cfg, &mut replicate_stream(1, 0)).unwrap();
        assert_eq!(traj.exited_region_at, Some(3));
        assert_eq!(traj.terminated, Termination::ExitedRegion);
        assert_eq!(traj.exit_time(), Some(traj.jump_times[3]));
    }

    #[test]
    fn state_at_is_right_continuous() {
        let m = ConstRateWalk {
            rate: 3.0,
            step: 1.0,
            region_cap: f64::INFINITY,
        };
        let cfg = SimConfig::new(2.0, 0).unwrap();
        let traj = simulate(&m, &StateVector::zeros(1), &cfg, &mut replicate_stream(2, 0)).unwrap();
        assert_eq!(traj.state_at(0.0).get(0), 0.0);
        if traj.jumps() >= 1 {
            let tau1 = traj.jump_times[1];
            assert_eq!(traj.state_at(tau1).get(0), 1.0);
            assert_eq!(traj.state_at(tau1 - 1e-12).get(0), 0.0);
        }
    }

    #[test]
    fn max_jumps_exceeded_errors() {
        let m = ConstRateWalk {
            rate: 1000.0,
            step: 0.0,
            region_cap: f64::INFINITY,
        };
        let cfg = SimConfig::new(10.0, 0).unwrap().max_jumps(5);
        let err = simulate(&m, &StateVector::zeros(1), &cfg, &mut replicate_stream(0, 1));
        assert!(matches!(err, Err(Error::MaxJumpsExceeded { .. })));
    }

    #[test]
    fn mean_jump_count_tracks_rate() {
        // constant rate r over horizon u: jump count is Poisson(r*u).
        let m = ConstRateWalk {
            rate: 50.0,
            step: 0.0,
            region_cap: f64::INFINITY,
        };
        let cfg = SimConfig::new(2.0, 0).unwrap();
        let reps = 200;
        let mut total = 0usize;
        for i in 0..reps {
            let mut rng = replicate_stream(11, i);
            total += simulate(&m, &StateVector::zeros(1), &cfg, &mut rng)
                .unwrap()
                .jumps();
        }
        let mean = total as f64 / reps as f64;
        let expected = 100.0;
        let se = (expected / reps as f64).sqrt();
        assert!((mean - expected).abs() < 5.0 * se, "mean {mean}");
    }

    #[test]
    fn x0_outside_domain_errors() {
        struct Bounded;
        impl JumpModel for Bounded {
            fn dim(&self) -> usize {
                1
            }
            fn scale(&self) -> u64 {
                1
            }
            fn rate(&self, _: &StateVector) -> f64 {
                1.0
            }
            fn sample_increment(&self, _: &StateVector, rng: &mut RngStream) -> Result<StateVector> {
                StateVector::new(vec![rng.gen::<f64>()])
            }
            fn mean_increment(&self, _: &StateVector) -> StateVector {
                StateVector::new(vec![0.5]).unwrap()
            }
            fn second_moment_bound(&self, _: &StateVector) -> f64 {
                1.0
            }
            fn in_domain(&self, x: &StateVector) -> bool {
                x.get(0) >= 0.0
            }
            fn in_region(&self, x: &StateVector) -> bool {
                self.in_domain(x)
            }
        }
        let cfg = SimConfig::new(1.0, 0).unwrap();
        let err = simulate(
            &Bounded,
            &StateVector::new(vec![-1.0]).unwrap(),
            &cfg,
            &mut replicate_stream(0, 0),
        );
        assert!(matches!(err, Err(Error::OutsideDomain { .. })));
    }
}
