//! The abstract scaled-chain model and validation of its scaling
//! assumptions.
//!
//! A [`JumpModel`] describes one member of a family of Markov chains indexed
//! by the scale `N`: a jump rate `c_N[x]`, an increment sampler, analytic
//! increment moments, and two membership predicates. `D` is the closed set
//! containing all reachable states; `S` is the relatively open subset on
//! which the scaling bounds hold and convergence is claimed. The
//! hydrodynamic scaling regime requires, uniformly on `S`,
//!
//! ```text
//! c_N[x] <= kappa2 * N
//! Trace(Sigma_N[x]) + ||mu_N[x]||^2 <= kappa3 / N^2
//! ```
//!
//! so that the drift `b_N[x] = c_N[x] * mu_N[x]` stays O(1) while the noise
//! vanishes.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::state::StateVector;

/// One scaled chain: rate, increment law, analytic moments, domains.
///
/// Implementations must be immutable after construction; all randomness
/// flows through the explicit stream argument of [`sample_increment`].
///
/// [`sample_increment`]: JumpModel::sample_increment
pub trait JumpModel: Send + Sync {
    fn dim(&self) -> usize;

    /// The scale parameter `N`.
    fn scale(&self) -> u64;

    /// Jump rate `c_N[x]`, in events per unit time. Nonnegative; a zero
    /// rate freezes the process.
    fn rate(&self, x: &StateVector) -> f64;

    /// Draw one chain increment `X_{n+1} - X_n` given the current state.
    fn sample_increment(&self, x: &StateVector, rng: &mut RngStream) -> Result<StateVector>;

    /// Analytic mean increment `mu_N[x]`.
    fn mean_increment(&self, x: &StateVector) -> StateVector;

    /// `Trace(Sigma_N[x]) + ||mu_N[x]||^2`, the per-step second-moment
    /// bound entering the martingale estimates.
    fn second_moment_bound(&self, x: &StateVector) -> f64;

    /// Membership in the closed domain `D`.
    fn in_domain(&self, x: &StateVector) -> bool;

    /// Membership in the relatively open region `S` (subset of `D`).
    fn in_region(&self, x: &StateVector) -> bool;
}

/// Drift `b_N[x] = c_N[x] * mu_N[x]`.
pub fn drift<M: JumpModel + ?Sized>(model: &M, x: &StateVector) -> Result<StateVector> {
    if !model.in_domain(x) {
        return Err(Error::OutsideDomain {
            context: format!("drift evaluated at {:?}", x.coords()),
        });
    }
    Ok(model.mean_increment(x).scale(model.rate(x)))
}

/// The constants of the scaling regime, tied to the limit point `a`.
pub struct ScalingAssumptions {
    /// Initial-condition tail constant: `P[||Y_0 - a|| > delta] <= kappa1(delta)/N`.
    pub kappa1: Option<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
    /// Rate bound: `c_N <= kappa2 * N` on `S`.
    pub kappa2: f64,
    /// Noise bound: `Trace Sigma_N + ||mu_N||^2 <= kappa3 / N^2` on `S`.
    pub kappa3: f64,
    /// The deterministic limit `a` of the initial conditions.
    pub limit_point: StateVector,
}

impl std::fmt::Debug for ScalingAssumptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalingAssumptions")
            .field("kappa1", &self.kappa1.as_ref().map(|_| "<fn>"))
            .field("kappa2", &self.kappa2)
            .field("kappa3", &self.kappa3)
            .field("limit_point", &self.limit_point)
            .finish()
    }
}

impl ScalingAssumptions {
    pub fn new(kappa2: f64, kappa3: f64, limit_point: StateVector) -> Result<Self> {
        if !(kappa2.is_finite() && kappa2 >= 0.0 && kappa3.is_finite() && kappa3 >= 0.0) {
            return Err(Error::InvalidParameter(
                "kappa2 and kappa3 must be finite and >= 0".into(),
            ));
        }
        Ok(Self {
            kappa1: None,
            kappa2,
            kappa3,
            limit_point,
        })
    }
}

/// One probe that violated a scaling bound.
#[derive(Clone, Debug)]
pub struct ProbeViolation {
    pub probe_index: usize,
    pub rate_ratio: f64,
    pub moment_ratio: f64,
}

/// Worst-case ratios of the observed quantities to their assumed bounds.
/// Both `<= 1` means the assumptions hold on the probe set.
#[derive(Clone, Debug)]
pub struct ScalingReport {
    pub worst_rate_ratio: f64,
    pub worst_moment_ratio: f64,
    pub violations: Vec<ProbeViolation>,
    pub probes_checked: usize,
}

impl ScalingReport {
    pub fn holds(&self) -> bool {
        self.worst_rate_ratio <= 1.0 && self.worst_moment_ratio <= 1.0
    }
}

/// Check the rate and noise bounds at each probe state.
///
/// Violating probes are reported, not raised: a ratio above 1 identifies
/// the probe without aborting the survey.
pub fn validate_scaling<M: JumpModel + ?Sized>(
    model: &M,
    assumptions: &ScalingAssumptions,
    probes: &[StateVector],
) -> Result<ScalingReport> {
    if probes.is_empty() {
        return Err(Error::InvalidParameter("probe set must be nonempty".into()));
    }
    let n = model.scale() as f64;
    let rate_cap = assumptions.kappa2 * n;
    let moment_cap = assumptions.kappa3 / (n * n);
    let mut report = ScalingReport {
        worst_rate_ratio: 0.0,
        worst_moment_ratio: 0.0,
        violations: Vec::new(),
        probes_checked: probes.len(),
    };
    for (i, x) in probes.iter().enumerate() {
        if !model.in_region(x) {
            return Err(Error::OutsideDomain {
                context: format!("probe {i} not in S: {:?}", x.coords()),
            });
        }
        let rate_ratio = if rate_cap > 0.0 {
            model.rate(x) / rate_cap
        } else if model.rate(x) == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let moment_ratio = if moment_cap > 0.0 {
            model.second_moment_bound(x) / moment_cap
        } else if model.second_moment_bound(x) == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        report.worst_rate_ratio = report.worst_rate_ratio.max(rate_ratio);
        report.worst_moment_ratio = report.worst_moment_ratio.max(moment_ratio);
        if rate_ratio > 1.0 || moment_ratio > 1.0 {
            report.violations.push(ProbeViolation {
                probe_index: i,
                rate_ratio,
                moment_ratio,
            });
        }
    }
    Ok(report)
}

/// Uniform lattice over the bounding box `[lo, hi]`, keeping only points
/// accepted by `keep`. `per_axis` points per coordinate, endpoints included.
pub fn lattice_probes<F>(lo: &[f64], hi: &[f64], per_axis: usize, keep: F) -> Result<Vec<StateVector>>
where
    F: Fn(&StateVector) -> bool,
{
    if lo.len() != hi.len() || lo.is_empty() {
        return Err(Error::InvalidParameter("bounding box dims must match".into()));
    }
    if per_axis < 1 {
        return Err(Error::InvalidParameter("per_axis must be >= 1".into()));
    }
    let dim = lo.len();
    let total = per_axis.pow(dim as u32);
    let mut out = Vec::new();
    for idx in 0..total {
        let mut rem = idx;
        let mut coords = Vec::with_capacity(dim);
        for k in 0..dim {
            let i = rem % per_axis;
            rem /= per_axis;
            let frac = if per_axis == 1 {
                0.5
            } else {
                i as f64 / (per_axis - 1) as f64
            };
            coords.push(lo[k] + frac * (hi[k] - lo[k]));
        }
        let p = StateVector::new(coords)?;
        if keep(&p) {
            out.push(p);
        }
    }
    Ok(out)
}

/// A model with its open region `S` tightened by an extra predicate.
/// Rate, increments, moments, and `D` pass through unchanged.
pub struct RestrictedModel<M, F> {
    inner: M,
    extra: F,
}

impl<M: JumpModel, F: Fn(&StateVector) -> bool + Send + Sync> RestrictedModel<M, F> {
    pub fn new(inner: M, extra: F) -> Self {
        Self { inner, extra }
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }
}

impl<M: JumpModel, F: Fn(&StateVector) -> bool + Send + Sync> JumpModel for RestrictedModel<M, F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn scale(&self) -> u64 {
        self.inner.scale()
    }
    fn rate(&self, x: &StateVector) -> f64 {
        self.inner.rate(x)
    }
    fn sample_increment(&self, x: &StateVector, rng: &mut RngStream) -> Result<StateVector> {
        self.inner.sample_increment(x, rng)
    }
    fn mean_increment(&self, x: &StateVector) -> StateVector {
        self.inner.mean_increment(x)
    }
    fn second_moment_bound(&self, x: &StateVector) -> f64 {
        self.inner.second_moment_bound(x)
    }
    fn in_domain(&self, x: &StateVector) -> bool {
        self.inner.in_domain(x)
    }
    fn in_region(&self, x: &StateVector) -> bool {
        self.inner.in_region(x) && (self.extra)(x)
    }
}
