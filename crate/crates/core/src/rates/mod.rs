//! Collision-rate kernels of the linear Boltzmann dynamics and an exact
//! sampler for single collisions.

mod kernels;
mod model;
mod sampler;

pub use kernels::{
    m_in_classical, m_in_quantum, m_out_classical, m_out_constant, m_out_with_orders, sigma_tilde,
    M_OUT_TOLERANCE,
};
pub use model::{BornKernel, CrossSectionModel, TabulatedKernel};
pub use sampler::{sample_collision, sample_collision_event, unit_vector, CollisionEvent, MAX_REJECTIONS};
