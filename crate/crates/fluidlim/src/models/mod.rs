//! Built-in models with closed-form fluid limits: the quantized multitype
//! particle system and the rescaled random walk.

pub mod particle;
pub mod walk;

pub use particle::{
    particle_closed_form, particle_limit_field, particle_model, ParticleFluid, ParticleModel,
    ParticleState, ParticleSystemParams,
};
pub use walk::{random_walk_model, walk_limit_field, IncrementDistribution, RandomWalkModel};
