//! Compensator and martingale paths of a simulated trajectory.
//!
//! For a drift field `f`, the compensator is the piecewise-linear path
//!
//! ```text
//! A_t = Y_0 + integral_0^t f(Y_{s-}) ds
//!     = Y_0 + sum_{j<=n} (tau_j - tau_{j-1}) f(X_{j-1}) + (t - tau_n) f(X_n)
//! ```
//!
//! for `tau_n <= t < tau_{n+1}`, computed exactly since the integrand is
//! piecewise constant. The martingale part is `M_t = Y_t - A_t`: piecewise
//! linear with slope `-f(X_n)` between jumps and discontinuities at jump
//! times.

use crate::error::Result;
use crate::simulate::Trajectory;
use crate::state::StateVector;

/// Piecewise-linear compensator path `A_t` with exact segment slopes.
#[derive(Clone, Debug)]
pub struct CompensatorPath {
    /// Jump times of the underlying trajectory.
    times: Vec<f64>,
    /// `A` at each jump time.
    values: Vec<StateVector>,
    /// Segment slope `f(X_n)` on `[tau_n, tau_{n+1})`.
    slopes: Vec<StateVector>,
}

impl CompensatorPath {
    pub fn eval(&self, t: f64) -> StateVector {
        let n = self.segment_index(t);
        self.values[n].axpy(t - self.times[n], &self.slopes[n])
    }

    pub fn value_at_jump(&self, n: usize) -> &StateVector {
        &self.values[n]
    }

    fn segment_index(&self, t: f64) -> usize {
        self.times.partition_point(|&tau| tau <= t).saturating_sub(1)
    }
}

/// Exact integration of `field` along the trajectory's piecewise-constant
/// path.
pub fn compensator_path<F>(traj: &Trajectory, field: F) -> Result<CompensatorPath>
where
    F: Fn(&StateVector) -> StateVector,
{
    let n = traj.states.len();
    let mut values = Vec::with_capacity(n);
    let mut slopes = Vec::with_capacity(n);
    values.push(traj.states[0].clone());
    slopes.push(field(&traj.states[0]));
    for j in 1..n {
        let dt = traj.jump_times[j] - traj.jump_times[j - 1];
        let a = values[j - 1].axpy(dt, &slopes[j - 1]);
        values.push(a);
        slopes.push(field(&traj.states[j]));
    }
    Ok(CompensatorPath {
        times: traj.jump_times.clone(),
        values,
        slopes,
    })
}

/// Martingale path `M_t = Y_t - A_t`, stored through its values at jump
/// times and its constant slope between jumps.
#[derive(Clone, Debug)]
pub struct MartingalePath {
    times: Vec<f64>,
    /// `M` immediately after each jump.
    values: Vec<StateVector>,
    /// Slope `-f(X_n)` on `[tau_n, tau_{n+1})`.
    slopes: Vec<StateVector>,
}

impl MartingalePath {
    pub fn eval(&self, t: f64) -> StateVector {
        let n = self.times.partition_point(|&tau| tau <= t).saturating_sub(1);
        self.values[n].axpy(t - self.times[n], &self.slopes[n])
    }

    pub fn value_at_jump(&self, n: usize) -> &StateVector {
        &self.values[n]
    }

    /// Exact supremum of `||M_t||` over `t <= u`.
    ///
    /// `M` is piecewise linear and the norm is convex along each segment,
    /// so the supremum is attained at a segment endpoint: a jump time
    /// (either side of the discontinuity) or `u` itself.
    pub fn sup_norm(&self, u: f64) -> f64 {
        let mut sup: f64 = 0.0;
        for n in 0..self.times.len() {
            let tau = self.times[n];
            if tau > u {
                break;
            }
            sup = sup.max(self.values[n].norm());
            let seg_end = if n + 1 < self.times.len() {
                self.times[n + 1].min(u)
            } else {
                u
            };
            if seg_end > tau {
                sup = sup.max(self.values[n].axpy(seg_end - tau, &self.slopes[n]).norm());
            }
        }
        sup
    }
}

pub fn martingale_path<F>(traj: &Trajectory, field: F) -> Result<MartingalePath>
where
    F: Fn(&StateVector) -> StateVector,
{
    let comp = compensator_path(traj, field)?;
    let values = traj
        .states
        .iter()
        .zip(&comp.values)
        .map(|(x, a)| x.sub(a))
        .collect();
    let slopes = comp.slopes.iter().map(|s| s.scale(-1.0)).collect();
    Ok(MartingalePath {
        times: comp.times,
        values,
        slopes,
    })
}
