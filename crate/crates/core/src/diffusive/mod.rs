//! Diffusive (heavy-tracer) limit: friction and diffusion coefficients and
//! phase-space Fokker–Planck solvers.

mod coefficients;
mod field;
mod fp;
mod oracle;

pub use coefficients::{coefficients, eta_by_quadrature, DiffusionCoefficients};
pub(crate) use coefficients::coefficients_quiet;
pub use field::{PhaseGrid, PhaseMoments, WignerField};
pub use fp::{
    evolve_classical_fp, evolve_quantum_fp, FokkerPlanckSolver, FpOptions, MIN_CELLS_PER_WIDTH, MIN_HALF_WIDTH,
};
pub use oracle::{gaussian_moment_oracle, OracleTerms};
