//! Numerical toolkit for periodic control of distance-constrained interacting
//! agents on the line.
//!
//! The library evaluates and minimizes the energy of an N-agent system whose
//! agents repel each other through a hard minimal-distance constraint, attract
//! each other through a nonincreasing interaction kernel, and feel a coercive
//! double-well confinement potential. Trajectories are T-periodic, optionally
//! restricted to a symmetry class that forces brake-type oscillations.
//!
//! Modules:
//! - [`model`]: time grid, trajectory storage, configuration, validation.
//! - [`potentials`]: confinement potentials, interaction kernels, window
//!   averages of the potential.
//! - [`energy`]: the discrete energy, its analytic gradient, interaction sums.
//! - [`constraints`]: symmetry projection, monotone gap projection (PAVA),
//!   barycenter diagnostics.
//! - [`optimizer`]: projected gradient descent with Armijo backtracking and
//!   post-hoc verification of qualitative properties of minimizers.
//! - [`meanfield`]: the single-representative brake-orbit problem solved by
//!   shooting with a symplectic integrator.
//! - [`measures`]: empirical measures, 1D Wasserstein distances via quantile
//!   functions, quantile particle placement, mollification, and the
//!   discrete-to-continuum convergence report.

pub mod constraints;
pub mod energy;
pub mod error;
pub mod meanfield;
pub mod measures;
pub mod model;
pub mod optimizer;
pub mod potentials;
pub mod quad;

pub use error::{CoreError, Result};
pub use model::{EmpiricalMeasure, ProblemConfig, TimeGrid, TrajectoryGrid};
