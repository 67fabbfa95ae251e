//! Fixed-step RK4 integration of the limiting ODE `dy/dt = b[y]`, with
//! cubic-Hermite dense output and exit-time detection.
//!
//! The drift fields in scope are smooth and globally Lipschitz on the
//! closed region, so a fixed step keeps dense output and exit bisection
//! simple and reproducible. The open region `S` is known only through a
//! predicate, so the exit time is localized by sign-change bisection on the
//! interpolant.

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Default bisection tolerance for exit-time localization.
pub const EXIT_TOL: f64 = 1e-10;

/// The limiting drift `b`, optionally with its Lipschitz constant and a
/// closed-form solution for oracle checks.
pub struct VectorField {
    pub dim: usize,
    pub b: Box<dyn Fn(&StateVector) -> StateVector + Send + Sync>,
    pub lipschitz: Option<f64>,
    pub closed_form: Option<Box<dyn Fn(f64) -> StateVector + Send + Sync>>,
}

impl VectorField {
    pub fn new<F>(dim: usize, b: F) -> Self
    where
        F: Fn(&StateVector) -> StateVector + Send + Sync + 'static,
    {
        Self {
            dim,
            b: Box::new(b),
            lipschitz: None,
            closed_form: None,
        }
    }

    pub fn with_lipschitz(mut self, lambda: f64) -> Self {
        self.lipschitz = Some(lambda);
        self
    }

    pub fn with_closed_form<F>(mut self, f: F) -> Self
    where
        F: Fn(f64) -> StateVector + Send + Sync + 'static,
    {
        self.closed_form = Some(Box::new(f));
        self
    }

    pub fn eval(&self, x: &StateVector) -> StateVector {
        (self.b)(x)
    }
}

impl std::fmt::Debug for VectorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VectorField")
            .field("dim", &self.dim)
            .field("lipschitz", &self.lipschitz)
            .field("closed_form", &self.closed_form.as_ref().map(|_| "<fn>"))
            .finish()
    }
}

/// Dense ODE solution on a fixed grid, with stored derivatives for cubic
/// Hermite interpolation between grid points.
#[derive(Debug)]
pub struct FluidSolution {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub derivs: Vec<StateVector>,
    /// First exit time from `S`, absent when the path stays inside up to
    /// the horizon (`zeta = infinity` is represented as absent; reports
    /// must state the horizon used).
    pub zeta: Option<f64>,
    pub horizon: f64,
}

impl FluidSolution {
    /// Largest time at which the solution may be evaluated.
    pub fn t_max(&self) -> f64 {
        match self.zeta {
            Some(z) => z,
            None => *self.times.last().expect("nonempty grid"),
        }
    }
}

fn rk4_step(
    field: &VectorField,
    x: &StateVector,
    k1: &StateVector,
    h: f64,
) -> Result<StateVector> {
    let k2 = field.eval(&x.axpy(0.5 * h, k1));
    let k3 = field.eval(&x.axpy(0.5 * h, &k2));
    let k4 = field.eval(&x.axpy(h, &k3));
    let mut next = x.clone();
    next = next.axpy(h / 6.0, k1);
    next = next.axpy(h / 3.0, &k2);
    next = next.axpy(h / 3.0, &k3);
    next = next.axpy(h / 6.0, &k4);
    if !next.is_finite() {
        return Err(Error::NonFinite("RK4 step produced non-finite state".into()));
    }
    Ok(next)
}

/// Integrate `dy/dt = b[y]` from `a` with classical fixed-step RK4.
///
/// Stops at the horizon or at the first step on which `in_region` flips
/// from true to false; the exit time is then bisected to [`EXIT_TOL`] and
/// recorded as `zeta`. The grid keeps the first outside point so the
/// interpolant brackets the crossing.
pub fn integrate<F>(
    field: &VectorField,
    a: &StateVector,
    horizon: f64,
    step: f64,
    in_region: F,
) -> Result<FluidSolution>
where
    F: Fn(&StateVector) -> bool,
{
    if !(step > 0.0) {
        return Err(Error::InvalidParameter("step must be > 0".into()));
    }
    if horizon < 0.0 {
        return Err(Error::InvalidParameter("horizon must be >= 0".into()));
    }
    a.check_dim(field.dim)?;

    let d0 = field.eval(a);
    if !d0.is_finite() {
        return Err(Error::NonFinite("field non-finite at initial point".into()));
    }
    let mut times = vec![0.0];
    let mut states = vec![a.clone()];
    let mut derivs = vec![d0];
    let mut inside = in_region(a);
    let mut zeta = None;

    let mut t = 0.0;
    while t < horizon {
        let h = step.min(horizon - t);
        let x = states.last().expect("nonempty").clone();
        let k1 = derivs.last().expect("nonempty").clone();
        let next = rk4_step(field, &x, &k1, h)?;
        let dn = field.eval(&next);
        if !dn.is_finite() {
            return Err(Error::NonFinite(format!("field non-finite at t={}", t + h)));
        }
        t += h;
        times.push(t);
        states.push(next);
        derivs.push(dn);

        let now_inside = in_region(states.last().expect("nonempty"));
        if inside && !now_inside {
            let n = times.len() - 1;
            zeta = Some(bisect_exit(
                times[n - 1],
                times[n],
                &states[n - 1],
                &states[n],
                &derivs[n - 1],
                &derivs[n],
                &in_region,
                EXIT_TOL,
            ));
            break;
        }
        inside = now_inside;
    }

    Ok(FluidSolution {
        times,
        states,
        derivs,
        zeta,
        horizon,
    })
}

/// Locate the first exit time on a completed solution by scanning the grid
/// for the first true-to-false flip of `in_region` and bisecting the
/// interpolant to within `tol`. Absent when no flip occurs.
pub fn detect_exit<F>(sol: &FluidSolution, in_region: F, tol: f64) -> Option<f64>
where
    F: Fn(&StateVector) -> bool,
{
    let mut inside = in_region(&sol.states[0]);
    for n in 1..sol.times.len() {
        let now = in_region(&sol.states[n]);
        if inside && !now {
            return Some(bisect_exit(
                sol.times[n - 1],
                sol.times[n],
                &sol.states[n - 1],
                &sol.states[n],
                &sol.derivs[n - 1],
                &sol.derivs[n],
                &in_region,
                tol,
            ));
        }
        inside = now;
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn bisect_exit<F>(
    t0: f64,
    t1: f64,
    y0: &StateVector,
    y1: &StateVector,
    d0: &StateVector,
    d1: &StateVector,
    in_region: &F,
    tol: f64,
) -> f64
where
    F: Fn(&StateVector) -> bool,
{
    let (mut lo, mut hi) = (t0, t1);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let y = hermite(t0, t1, y0, y1, d0, d1, mid);
        if in_region(&y) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Cubic Hermite interpolation on `[t0, t1]` from endpoint values and
/// derivatives.
fn hermite(
    t0: f64,
    t1: f64,
    y0: &StateVector,
    y1: &StateVector,
    d0: &StateVector,
    d1: &StateVector,
    t: f64,
) -> StateVector {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    y0.scale(h00)
        .axpy(h10 * h, d0)
        .add(&y1.scale(h01).axpy(h11 * h, d1))
}

/// Evaluate the dense solution at `t` in `[0, min(horizon, zeta)]`.
///
/// Exact at grid points; cubic Hermite in between, with interpolation error
/// `O(step^4)`.
pub fn eval_solution(sol: &FluidSolution, t: f64) -> Result<StateVector> {
    let grid_end = *sol.times.last().expect("nonempty grid");
    let t_max = sol.t_max().min(grid_end);
    if !(0.0..=t_max + 1e-12).contains(&t) {
        return Err(Error::OutOfRange(format!(
            "t = {t} outside solution range [0, {t_max}]"
        )));
    }
    let t = t.min(grid_end);
    let n = sol.times.partition_point(|&tau| tau <= t);
    if n == 0 {
        return Ok(sol.states[0].clone());
    }
    if n == sol.times.len() {
        return Ok(sol.states[n - 1].clone());
    }
    if sol.times[n - 1] == t {
        return Ok(sol.states[n - 1].clone());
    }
    Ok(hermite(
        sol.times[n - 1],
        sol.times[n],
        &sol.states[n - 1],
        &sol.states[n],
        &sol.derivs[n - 1],
        &sol.derivs[n],
        t,
    ))
}
