//! Rescaled random walk: the prototype weak-law model.
//!
//! The chain adds i.i.d. increments `U/N` with `E[U] = mu`,
//! `Var[U] = sigma^2`, and runs at the constant rate `N` (a constant-rate
//! Poisson clock standing in for the discrete-time rescaling). The limiting
//! drift is the constant `mu` and the fluid limit is the straight line
//! `y[t] = t mu`, with the Chebyshev-type exceedance bound
//! `P[max_{t<=1} |Y_t - t mu| >= delta] <= sigma^2 / (N delta^2)`.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::JumpModel;
use crate::ode::VectorField;
use crate::rng::RngStream;
use crate::state::StateVector;

/// Law of one unscaled increment `U`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum IncrementDistribution {
    Bernoulli { p: f64 },
    Normal { mean: f64, std_dev: f64 },
    Constant { value: f64 },
}

impl IncrementDistribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Bernoulli { p } if !(0.0..=1.0).contains(p) => {
                Err(Error::InvalidParameter(format!("Bernoulli p = {p}")))
            }
            Self::Normal { std_dev, .. } if !(*std_dev >= 0.0) => {
                Err(Error::InvalidParameter(format!("Normal std_dev = {std_dev}")))
            }
            _ => Ok(()),
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::Bernoulli { p } => *p,
            Self::Normal { mean, .. } => *mean,
            Self::Constant { value } => *value,
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Self::Bernoulli { p } => p * (1.0 - p),
            Self::Normal { std_dev, .. } => std_dev * std_dev,
            Self::Constant { .. } => 0.0,
        }
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        match self {
            Self::Bernoulli { p } => {
                if rng.gen::<f64>() < *p {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Normal { mean, std_dev } => {
                if *std_dev == 0.0 {
                    *mean
                } else {
                    Normal::new(*mean, *std_dev).expect("validated").sample(rng)
                }
            }
            Self::Constant { value } => *value,
        }
    }
}

/// One-dimensional rescaled walk at scale `N`.
#[derive(Clone, Copy, Debug)]
pub struct RandomWalkModel {
    dist: IncrementDistribution,
    scale: u64,
}

impl RandomWalkModel {
    pub fn dist(&self) -> &IncrementDistribution {
        &self.dist
    }
}

impl JumpModel for RandomWalkModel {
    fn dim(&self) -> usize {
        1
    }

    fn scale(&self) -> u64 {
        self.scale
    }

    fn rate(&self, _x: &StateVector) -> f64 {
        self.scale as f64
    }

    fn sample_increment(&self, _x: &StateVector, rng: &mut RngStream) -> Result<StateVector> {
        StateVector::new(vec![self.dist.sample(rng) / self.scale as f64])
    }

    fn mean_increment(&self, _x: &StateVector) -> StateVector {
        StateVector::new(vec![self.dist.mean() / self.scale as f64]).expect("finite")
    }

    fn second_moment_bound(&self, _x: &StateVector) -> f64 {
        let n = self.scale as f64;
        let m = self.dist.mean();
        (self.dist.variance() + m * m) / (n * n)
    }

    fn in_domain(&self, x: &StateVector) -> bool {
        x.is_finite()
    }

    fn in_region(&self, x: &StateVector) -> bool {
        self.in_domain(x)
    }
}

/// Build the walk at scale `N`, started at the origin.
pub fn random_walk_model(
    dist: IncrementDistribution,
    scale: u64,
) -> Result<(RandomWalkModel, StateVector)> {
    dist.validate()?;
    if scale < 1 {
        return Err(Error::InvalidParameter("N must be >= 1".into()));
    }
    Ok((RandomWalkModel { dist, scale }, StateVector::zeros(1)))
}

/// Constant limiting drift `b = mu`, fluid limit `y[t] = t mu`.
pub fn walk_limit_field(mu: f64) -> VectorField {
    VectorField::new(1, move |_x: &StateVector| {
        StateVector::new(vec![mu]).expect("finite")
    })
    .with_lipschitz(0.0)
    .with_closed_form(move |t| StateVector::new(vec![t * mu]).expect("finite"))
}
