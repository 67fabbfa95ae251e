//! Quantized multitype particle system.
//!
//! A chamber holds `B` particles, `B` divisible by `w >= 2`, with mean
//! `mu N` and variance `sigma^2 N`. Initially `B - 1` are heavy and inert
//! and one is heavy and excited. At each step a heavy particle chosen
//! uniformly at random is replaced by a light one; whenever the cumulative
//! count of removed inert particles reaches a multiple of `w - 1`, some
//! other inert particle becomes excited (an excitation step).
//!
//! The chain is tracked through three rescaled coordinates
//! `(x0, x1, x2) = (B, inert removals, steps) / N`; the particle counts are
//! reconstructed from them by exact integer bookkeeping. The jump rate is
//! the number of heavy particles, `(x0 - x2) N`, so the process stops when
//! heavy particles run out. The limiting drift is linear,
//!
//! ```text
//! b[x] = (0, x0 - x1 w/(w-1), x0 - x2),
//! ```
//!
//! and the fluid limit from `a = (mu, 0, 0)` has the closed forms
//! `y1[t] = ((w-1)/w) mu (1 - e^(-t w/(w-1)))`, `y2[t] = mu (1 - e^(-t))`,
//! heavy fraction `h[t] = mu e^(-t)` and excited fraction
//! `e[t] = mu (e^(-t) - e^(-t w/(w-1))) = h - mu (h/mu)^(w/(w-1))`.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::model::{JumpModel, ScalingAssumptions};
use crate::ode::VectorField;
use crate::rng::RngStream;
use crate::state::StateVector;

/// Tolerance for deciding that a coordinate times `N` is an integer.
const LATTICE_EPS: f64 = 1e-6;

#[derive(Clone, Copy, Debug)]
pub struct ParticleSystemParams {
    /// Quantization constant `w >= 2`: inert removals per excitation.
    pub w: u32,
    /// Mean of `B/N`.
    pub mu: f64,
    /// `Var(B) = sigma2 * N`.
    pub sigma2: f64,
    /// Region bound on `x0`; must exceed `mu`.
    pub kappa: f64,
    /// Scale `N`.
    pub scale: u64,
}

impl ParticleSystemParams {
    pub fn validate(&self) -> Result<()> {
        if self.w < 2 {
            return Err(Error::InvalidParameter("w must be >= 2".into()));
        }
        if !(self.mu > 0.0) {
            return Err(Error::InvalidParameter("mu must be > 0".into()));
        }
        if !(self.sigma2 >= 0.0) {
            return Err(Error::InvalidParameter("sigma2 must be >= 0".into()));
        }
        if !(self.kappa > self.mu) {
            return Err(Error::InvalidParameter("kappa must exceed mu".into()));
        }
        if self.scale < 1 {
            return Err(Error::InvalidParameter("N must be >= 1".into()));
        }
        Ok(())
    }

    /// Scaling constants for this model: the rate `(x0 - x2) N` is below
    /// `kappa N` on `S`, and `Trace Sigma_N + ||mu_N||^2 =
    /// (p(1-p) + p^2 + 1)/N^2 <= 3/N^2`.
    pub fn scaling_assumptions(&self) -> Result<ScalingAssumptions> {
        ScalingAssumptions::new(
            self.kappa,
            3.0,
            StateVector::new(vec![self.mu, 0.0, 0.0])?,
        )
    }
}

/// Exact integer counters behind the rescaled coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParticleState {
    /// Total particle count `B` (constant along a trajectory).
    pub b_count: u64,
    /// Inert particles removed so far.
    pub inert_removed: u64,
    /// Steps taken so far.
    pub step: u64,
}

impl ParticleState {
    pub fn heavy(&self) -> u64 {
        self.b_count - self.step
    }

    /// Rescaled view `(B, inert removals, steps) / N`.
    pub fn coords(&self, scale: u64) -> StateVector {
        let n = scale as f64;
        StateVector::new(vec![
            self.b_count as f64 / n,
            self.inert_removed as f64 / n,
            self.step as f64 / n,
        ])
        .expect("finite counters")
    }

    /// Reconstruct `(inert, excited)` counts by exact integer bookkeeping.
    ///
    /// Excitations so far are `floor(r / (w-1))`:
    ///
    /// ```text
    /// I_n = B - r - excitations
    /// E_n = r - n + excitations
    /// ```
    ///
    /// These drop the O(1) offset for the single particle that starts
    /// excited (the narrative initial condition is `B - 1` inert plus one
    /// excited). That is deliberate: with `B` divisible by `w` these forms
    /// are the unique bookkeeping *closed under the transition table* —
    /// every excitation-pending state has `I_n = 2 (mod w)`, so the
    /// `(-2, +1)` row never drives the inert count negative, whereas the
    /// offset forms go negative at the tail of real trajectories.
    ///
    /// Conservation `I_n + E_n = B - n` (one heavy replaced by one light
    /// per step) holds identically; a negative count is an invariant
    /// breach and errors.
    pub fn reconstruct_counts(&self, w: u32) -> Result<(u64, u64)> {
        let excitations = self.inert_removed / (w as u64 - 1);
        let inert = self
            .b_count
            .checked_sub(self.inert_removed + excitations)
            .ok_or_else(|| {
                Error::ModelInconsistency(format!("negative inert count at {self:?}"))
            })?;
        let excited = (self.inert_removed + excitations)
            .checked_sub(self.step)
            .ok_or_else(|| {
                Error::ModelInconsistency(format!("negative excited count at {self:?}"))
            })?;
        debug_assert_eq!(inert + excited, self.heavy());
        Ok((inert, excited))
    }
}

/// One realization of the particle system at scale `N`, with `B` frozen at
/// construction. Immutable and shareable thereafter.
#[derive(Clone, Debug)]
pub struct ParticleModel {
    params: ParticleSystemParams,
    b_count: u64,
}

impl ParticleModel {
    pub fn params(&self) -> &ParticleSystemParams {
        &self.params
    }

    pub fn b_count(&self) -> u64 {
        self.b_count
    }

    /// Recover the integer counters from a rescaled lattice state.
    pub fn counters(&self, x: &StateVector) -> Result<ParticleState> {
        let n = self.params.scale as f64;
        let as_int = |v: f64, name: &str| -> Result<u64> {
            let scaled = v * n;
            let r = scaled.round();
            if (scaled - r).abs() > LATTICE_EPS || r < 0.0 {
                return Err(Error::ModelInconsistency(format!(
                    "coordinate {name} = {v} is not a nonnegative lattice point at N = {n}"
                )));
            }
            Ok(r as u64)
        };
        Ok(ParticleState {
            b_count: as_int(x.get(0), "x0")?,
            inert_removed: as_int(x.get(1), "x1")?,
            step: as_int(x.get(2), "x2")?,
        })
    }

    /// The inert-removal probability: the proportion of heavy particles
    /// that are inert,
    ///
    /// ```text
    /// p_n = I_n / (heavy count) = (x0 - x1 - floor(N x1 / (w-1)) / N) / (x0 - x2),
    /// ```
    ///
    /// computed on exact integers for lattice states (floor is never taken
    /// on floats there), with a float fallback for off-lattice probe
    /// points. With `B` divisible by `w` the numerator `I_n` stays in
    /// `[0, heavy]` exactly along every reachable path, so `p_n` is a
    /// genuine probability; the clamp only acts on unreachable probe
    /// states. The sampler mean equals `mean_increment` exactly, so the
    /// compensated process has zero mean by construction.
    pub fn inert_probability(&self, x: &StateVector) -> Result<f64> {
        let w1 = self.params.w as u64 - 1;
        if let Ok(c) = self.counters(x) {
            let heavy = c.b_count.checked_sub(c.step).ok_or_else(|| {
                Error::ModelInconsistency("more steps than particles".into())
            })?;
            if heavy == 0 {
                return Ok(0.0);
            }
            let inert = c
                .b_count
                .saturating_sub(c.inert_removed + c.inert_removed / w1);
            Ok(inert.min(heavy) as f64 / heavy as f64)
        } else {
            let n = self.params.scale as f64;
            let denom = x.get(0) - x.get(2);
            if denom <= 0.0 {
                return Ok(0.0);
            }
            let floor_term = (n * x.get(1) / w1 as f64).floor() / n;
            Ok(((x.get(0) - x.get(1) - floor_term) / denom).clamp(0.0, 1.0))
        }
    }
}

impl JumpModel for ParticleModel {
    fn dim(&self) -> usize {
        3
    }

    fn scale(&self) -> u64 {
        self.params.scale
    }

    fn rate(&self, x: &StateVector) -> f64 {
        // number of heavy particles, (x0 - x2) N
        match self.counters(x) {
            Ok(c) => c.b_count.saturating_sub(c.step) as f64,
            Err(_) => ((x.get(0) - x.get(2)) * self.params.scale as f64).max(0.0),
        }
    }

    fn sample_increment(&self, x: &StateVector, rng: &mut RngStream) -> Result<StateVector> {
        let p = self.inert_probability(x)?;
        let inert_removed = rng.gen::<f64>() < p;
        let n = self.params.scale as f64;
        StateVector::new(vec![0.0, if inert_removed { 1.0 / n } else { 0.0 }, 1.0 / n])
    }

    fn mean_increment(&self, x: &StateVector) -> StateVector {
        let p = self.inert_probability(x).unwrap_or(0.0);
        let n = self.params.scale as f64;
        StateVector::new(vec![0.0, p / n, 1.0 / n]).expect("finite")
    }

    fn second_moment_bound(&self, x: &StateVector) -> f64 {
        let p = self.inert_probability(x).unwrap_or(0.0);
        let n = self.params.scale as f64;
        (p * (1.0 - p) + p * p + 1.0) / (n * n)
    }

    fn in_domain(&self, x: &StateVector) -> bool {
        // D = { x0 >= x1 w/(w-1), x0 >= x2 }
        if let Ok(c) = self.counters(x) {
            let w = self.params.w as u64;
            (w - 1) * c.b_count >= w * c.inert_removed && c.b_count >= c.step
        } else {
            let w = self.params.w as f64;
            x.get(0) >= x.get(1) * w / (w - 1.0) - 1e-12 && x.get(0) >= x.get(2) - 1e-12
        }
    }

    fn in_region(&self, x: &StateVector) -> bool {
        self.in_domain(x) && x.get(0) < self.params.kappa
    }
}

/// Draw `B`: nearest multiple of `w` to a Normal(mu N, sigma^2 N) draw,
/// truncated at `>= w`. The degenerate `sigma2 = 0` gives the nearest
/// multiple of `w` to `mu N` deterministically.
fn draw_b(params: &ParticleSystemParams, rng: &mut RngStream) -> Result<u64> {
    let n = params.scale as f64;
    let target = if params.sigma2 == 0.0 {
        params.mu * n
    } else {
        let normal = Normal::new(params.mu * n, (params.sigma2 * n).sqrt())
            .map_err(|e| Error::InvalidParameter(format!("B distribution: {e}")))?;
        normal.sample(rng)
    };
    let w = params.w as f64;
    let multiples = (target / w).round().max(1.0);
    Ok((multiples * w) as u64)
}

/// Construct one particle-system replicate: draws `B`, returns the model
/// and the initial state `x0 = (B/N, 0, 0)`.
pub fn particle_model(
    params: &ParticleSystemParams,
    rng: &mut RngStream,
) -> Result<(ParticleModel, StateVector)> {
    params.validate()?;
    let b_count = draw_b(params, rng)?;
    let n = params.scale as f64;
    let x0 = StateVector::new(vec![b_count as f64 / n, 0.0, 0.0])?;
    Ok((
        ParticleModel {
            params: *params,
            b_count,
        },
        x0,
    ))
}

/// Closed-form fluid limit values at time `t`.
#[derive(Clone, Copy, Debug)]
pub struct ParticleFluid {
    pub y0: f64,
    pub y1: f64,
    pub y2: f64,
    /// Heavy fraction `h = y0 - y2 = mu e^(-t)`.
    pub heavy: f64,
    /// Excited fraction `e = mu (e^(-t) - e^(-t w/(w-1)))`.
    pub excited: f64,
}

pub fn particle_closed_form(params: &ParticleSystemParams, t: f64) -> Result<ParticleFluid> {
    params.validate()?;
    if t < 0.0 {
        return Err(Error::InvalidParameter("t must be >= 0".into()));
    }
    let mu = params.mu;
    let c = params.w as f64 / (params.w as f64 - 1.0);
    let y1 = mu / c * (1.0 - (-t * c).exp());
    let y2 = mu * (1.0 - (-t).exp());
    Ok(ParticleFluid {
        y0: mu,
        y1,
        y2,
        heavy: mu * (-t).exp(),
        excited: mu * ((-t).exp() - (-t * c).exp()),
    })
}

/// Excited fraction parameterized by the heavy fraction:
/// `e = h - mu (h/mu)^(w/(w-1))`.
pub fn excited_from_heavy(params: &ParticleSystemParams, h: f64) -> f64 {
    let c = params.w as f64 / (params.w as f64 - 1.0);
    h - params.mu * (h / params.mu).powf(c)
}

/// Largest singular value of the 3x3 drift matrix by power iteration on
/// its Gram matrix; this is the exact Lipschitz constant of the linear
/// field.
fn drift_operator_norm(w: u32) -> f64 {
    let c = w as f64 / (w as f64 - 1.0);
    // A = [[0,0,0],[1,-c,0],[1,0,-1]], Gram = A^T A
    let g = [
        [2.0, -c, -1.0],
        [-c, c * c, 0.0],
        [-1.0, 0.0, 1.0],
    ];
    let mut v = [1.0, 1.0, 1.0];
    let mut lambda = 0.0;
    for _ in 0..200 {
        let mut next = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                next[i] += g[i][j] * v[j];
            }
        }
        let norm = (next[0] * next[0] + next[1] * next[1] + next[2] * next[2]).sqrt();
        for (x, y) in v.iter_mut().zip(&next) {
            *x = y / norm;
        }
        lambda = norm;
    }
    lambda.sqrt()
}

/// The limiting vector field `b[x] = (0, x0 - x1 w/(w-1), x0 - x2)` with
/// its operator-norm Lipschitz constant and closed-form solution attached.
pub fn particle_limit_field(params: &ParticleSystemParams) -> Result<VectorField> {
    params.validate()?;
    let c = params.w as f64 / (params.w as f64 - 1.0);
    let p = *params;
    Ok(VectorField::new(3, move |x: &StateVector| {
        StateVector::new(vec![
            0.0,
            x.get(0) - x.get(1) * c,
            x.get(0) - x.get(2),
        ])
        .expect("finite")
    })
    .with_lipschitz(drift_operator_norm(params.w))
    .with_closed_form(move |t| {
        let f = particle_closed_form(&p, t).expect("valid params");
        StateVector::new(vec![f.y0, f.y1, f.y2]).expect("finite")
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::drift;
    use crate::ode::{eval_solution, integrate};
    use crate::rng::replicate_stream;

    fn params(w: u32, scale: u64) -> ParticleSystemParams {
        ParticleSystemParams {
            w,
            mu: 1.0,
            sigma2: 0.0,
            kappa: 2.0,
            scale,
        }
    }

    fn model(w: u32, scale: u64) -> ParticleModel {
        let mut rng = replicate_stream(0, 0);
        particle_model(&params(w, scale), &mut rng).unwrap().0
    }

    #[test]
    fn inert_probability_matches_displayed_formula() {
        // w=2, N=10, x=(1, 0.3, 0.4): counts B=10, r=3, n=4, heavy=6,
        // I = 10 - 3 - 3 = 4, p = (1 - 0.3 - 3/10)/(1 - 0.4) = 2/3
        let m = model(2, 10);
        let x = StateVector::new(vec![1.0, 0.3, 0.4]).unwrap();
        let p = m.inert_probability(&x).unwrap();
        assert!((p - 2.0 / 3.0).abs() < 1e-15, "p = {p}");
    }

    #[test]
    fn drift_matches_hand_computation() {
        // b_N at (1, 0.3, 0.4), w=2, N=10: (0, 0.4, 0.6)
        let m = model(2, 10);
        let x = StateVector::new(vec![1.0, 0.3, 0.4]).unwrap();
        let b = drift(&m, &x).unwrap();
        assert!((b.get(0)).abs() < 1e-15);
        assert!((b.get(1) - 0.4).abs() < 1e-12);
        assert!((b.get(2) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn initial_probability_is_one() {
        // the bookkeeping treats all B heavy particles as inert at n = 0
        // (the single-excited-particle offset is dropped, see
        // reconstruct_counts), so the first removal is inert with
        // certainty
        let m = model(2, 10);
        let b = m.b_count() as f64;
        let x0 = StateVector::new(vec![b / 10.0, 0.0, 0.0]).unwrap();
        assert_eq!(m.inert_probability(&x0).unwrap(), 1.0);
    }

    #[test]
    fn rate_at_initial_state_is_b() {
        let m = model(2, 10);
        let x0 = StateVector::new(vec![m.b_count() as f64 / 10.0, 0.0, 0.0]).unwrap();
        assert_eq!(m.rate(&x0), m.b_count() as f64);
    }

    #[test]
    fn initial_counts_are_all_inert() {
        // the closed bookkeeping starts all B heavy particles inert; the
        // narrative's single excited particle is an O(1) offset the
        // formulas deliberately drop (see reconstruct_counts)
        let s = ParticleState {
            b_count: 10,
            inert_removed: 0,
            step: 0,
        };
        assert_eq!(s.reconstruct_counts(2).unwrap(), (10, 0));
    }

    #[test]
    fn one_inert_removal_is_an_excitation_step_for_w2() {
        // after 1 inert removal at w=2: excitations = 1,
        // I = B-2, E = 1; delta (I, E) = (-2, +1) from (B, 0)
        let s = ParticleState {
            b_count: 10,
            inert_removed: 1,
            step: 1,
        };
        let (i, e) = s.reconstruct_counts(2).unwrap();
        assert_eq!((i, e), (8, 1));
        assert_eq!(i + e, s.heavy());
    }

    #[test]
    fn excited_removal_decrements_excited_only() {
        // step with no inert removal: delta I = 0, delta E = -1
        let before = ParticleState {
            b_count: 10,
            inert_removed: 1,
            step: 1,
        };
        let after = ParticleState {
            b_count: 10,
            inert_removed: 1,
            step: 2,
        };
        let (i0, e0) = before.reconstruct_counts(2).unwrap();
        let (i1, e1) = after.reconstruct_counts(2).unwrap();
        assert_eq!(i1 as i64 - i0 as i64, 0);
        assert_eq!(e1 as i64 - e0 as i64, -1);
    }

    #[test]
    fn reconstruction_errors_on_negative_counts() {
        let s = ParticleState {
            b_count: 4,
            inert_removed: 3,
            step: 3,
        };
        // w=2: excitations = 3, inert = 3 - 3 - 3 < 0
        assert!(s.reconstruct_counts(2).is_err());
    }

    #[test]
    fn limit_field_at_limit_point() {
        let field = particle_limit_field(&params(2, 100)).unwrap();
        let a = StateVector::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(field.eval(&a).coords(), &[0.0, 1.0, 1.0]);
        // w = 2 gives b = (0, x0 - 2 x1, x0 - x2)
        let x = StateVector::new(vec![1.0, 0.25, 0.5]).unwrap();
        assert_eq!(field.eval(&x).coords(), &[0.0, 0.5, 0.5]);
    }

    #[test]
    fn scaled_drift_close_to_limit_field() {
        // ||b_N[x] - b[x]|| <= 1/N on reachable lattice states: the only
        // discrepancy is the floor remainder in coordinate 1
        let n = 50u64;
        let w = 3u64;
        let m = model(w as u32, n);
        let field = particle_limit_field(&params(w as u32, n)).unwrap();
        for r in 0..20u64 {
            // reachable steps keep the excited count r + r/(w-1) - n
            // nonnegative
            for step in r..=(r + r / (w - 1)) {
                let x = ParticleState {
                    b_count: m.b_count(),
                    inert_removed: r,
                    step,
                }
                .coords(n);
                if !m.in_domain(&x) || m.rate(&x) == 0.0 {
                    continue;
                }
                let diff = drift(&m, &x).unwrap().sub(&field.eval(&x)).norm();
                assert!(diff <= 1.0 / n as f64 + 1e-12, "diff = {diff} at r={r} step={step}");
            }
        }
    }

    #[test]
    fn closed_form_values_at_ln2() {
        // w=2, mu=1, t=ln 2: y = (1, 0.375, 0.5), h = 0.5, e = 0.25
        let f = particle_closed_form(&params(2, 100), std::f64::consts::LN_2).unwrap();
        assert!((f.y0 - 1.0).abs() < 1e-15);
        assert!((f.y1 - 0.375).abs() < 1e-15);
        assert!((f.y2 - 0.5).abs() < 1e-15);
        assert!((f.heavy - 0.5).abs() < 1e-15);
        assert!((f.excited - 0.25).abs() < 1e-15);
    }

    #[test]
    fn closed_form_at_zero() {
        let f = particle_closed_form(&params(4, 100), 0.0).unwrap();
        assert_eq!((f.y0, f.y1, f.y2, f.heavy, f.excited), (1.0, 0.0, 0.0, 1.0, 0.0));
    }

    #[test]
    fn excited_heavy_parameterization_identity() {
        let p = params(3, 100);
        for i in 0..=50 {
            let t = i as f64 * 0.1;
            let f = particle_closed_form(&p, t).unwrap();
            let e_from_h = excited_from_heavy(&p, f.heavy);
            assert!((f.excited - e_from_h).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn integrated_field_matches_closed_form() {
        let p = params(2, 100);
        let field = particle_limit_field(&p).unwrap();
        let a = StateVector::new(vec![1.0, 0.0, 0.0]).unwrap();
        let sol = integrate(&field, &a, 5.0, 1e-3, |_| true).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..=500 {
            let t = i as f64 * 0.01;
            let y = eval_solution(&sol, t).unwrap();
            let f = particle_closed_form(&p, t).unwrap();
            let exact = StateVector::new(vec![f.y0, f.y1, f.y2]).unwrap();
            worst = worst.max(y.sub(&exact).norm());
        }
        assert!(worst < 1e-8, "sup error = {worst}");
    }

    #[test]
    fn operator_norm_is_exact_lipschitz_constant() {
        // check the power-iteration value against random pairs
        let p = params(2, 100);
        let field = particle_limit_field(&p).unwrap();
        let lambda = field.lipschitz.unwrap();
        let mut rng = replicate_stream(5, 0);
        use rand::Rng;
        for _ in 0..200 {
            let x = StateVector::new((0..3).map(|_| rng.gen::<f64>()).collect()).unwrap();
            let y = StateVector::new((0..3).map(|_| rng.gen::<f64>()).collect()).unwrap();
            let lhs = field.eval(&x).sub(&field.eval(&y)).norm();
            assert!(lhs <= lambda * x.sub(&y).norm() + 1e-12);
        }
        // the bound is attained up to iteration tolerance
        assert!(lambda > 2.0 && lambda < 2.5, "lambda = {lambda}");
    }

    #[test]
    fn b_is_divisible_by_w_and_at_least_w() {
        for w in [2u32, 3, 5] {
            let mut p = params(w, 100);
            p.sigma2 = 4.0;
            for rep in 0..50 {
                let mut rng = replicate_stream(9, rep);
                let (m, x0) = particle_model(&p, &mut rng).unwrap();
                assert_eq!(m.b_count() % w as u64, 0);
                assert!(m.b_count() >= w as u64);
                assert_eq!(x0.get(0), m.b_count() as f64 / 100.0);
            }
        }
    }

    #[test]
    fn degenerate_sigma_is_deterministic() {
        let p = params(2, 100);
        let b0 = particle_model(&p, &mut replicate_stream(1, 0)).unwrap().0.b_count();
        let b1 = particle_model(&p, &mut replicate_stream(2, 7)).unwrap().0.b_count();
        assert_eq!(b0, 100);
        assert_eq!(b0, b1);
    }

    #[test]
    fn rejects_invalid_params() {
        let mut p = params(2, 100);
        p.w = 1;
        assert!(p.validate().is_err());
        let mut p = params(2, 100);
        p.kappa = 0.5;
        assert!(p.validate().is_err());
    }
}
