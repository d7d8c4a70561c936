//! Quantum linear Boltzmann dynamics of a tracer particle in an ideal gas.
//!
//! The crate provides the collision-rate kernels and an exact sampler for
//! momentum transfers, event-driven Monte Carlo trajectories, the momentum and
//! energy relaxation equations, the diffusive (Caldeira–Leggett) limit with
//! phase-space Fokker–Planck solvers, and a matrix-free momentum-grid
//! generator acting on fixed-coherence-vector slices of the density matrix.

pub mod config;
pub mod diffusive;
pub mod error;
pub mod io;
pub mod moments;
pub mod ode;
pub mod params;
pub mod qlbe_grid;
pub mod quadrature;
pub mod rates;
pub mod special;
pub mod trajectories;
pub mod vec3;

pub use error::{Error, Result};
pub use params::{derive_scales, maxwell_boltzmann, rel, DerivedScales, PhysicalParams};
pub use vec3::Vec3;
