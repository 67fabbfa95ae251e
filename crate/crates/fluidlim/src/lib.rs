//! Simulation of rescaled pure-jump Markov processes and their fluid limits.
//!
//! A scaled chain makes increments of size `O(1/N)` at a state-dependent
//! jump rate of size `O(N)`. As the scale parameter `N` grows, trajectories
//! concentrate around the solution of the ordinary differential equation
//! `dy/dt = b[y]` driven by the limiting drift field. This crate provides
//!
//! * an abstract [`model::JumpModel`] describing such a chain (rate,
//!   increment sampler, analytic moments, domain membership),
//! * a jump-process simulator with exact compensator / martingale paths
//!   ([`simulate`], [`path`]),
//! * a fixed-step RK4 integrator with dense output and exit-time detection
//!   for the limiting ODE ([`ode`]),
//! * quantitative bounds: regularized incomplete gamma, the martingale
//!   maximal inequality, hydrodynamic constant substitution, and the
//!   Gronwall envelope ([`bounds`]),
//! * a Monte Carlo lab measuring sup-norm deviation statistics, exceedance
//!   scaling, exit-time convergence, and the random-walk WLLN bound
//!   ([`convergence`]),
//! * two built-in models with closed-form fluid limits: the quantized
//!   multitype particle system and the rescaled random walk ([`models`]).
//!
//! Replicates run in parallel via rayon when the `parallel` feature
//! (default) is enabled; disable it for a fully sequential build.

pub mod bounds;
pub mod convergence;
pub mod error;
pub mod model;
pub mod models;
pub mod ode;
pub mod parallel;
pub mod path;
pub mod rng;
pub mod simulate;
pub mod state;
pub mod stats;

pub use error::{Error, Result};
pub use state::StateVector;
