//! The discrete trajectory energy, its analytic gradient, and interaction
//! sums on empirical measures.
//!
//! For a trajectory x with M periodic nodes and N ordered agents:
//!
//! - kinetic     = sum_k sum_i (x[k+1][i] - x[k][i])^2 / (2 N dt)
//! - potential   = (dt/N) sum_k sum_i W(x[k][i])
//! - interaction = (dt/N^2) sum_k sum_{i != j} K(|x[k][i] - x[k][j]|)
//! - total       = kinetic + potential - interaction
//!
//! Summation order is fixed (time-major, agent-minor, ordered pairs) so
//! results are bit-reproducible for a fixed configuration.

use crate::error::{CoreError, Result};
use crate::model::{EmpiricalMeasure, ProblemConfig, TrajectoryGrid};
use crate::potentials::KernelSpec;
use serde::Serialize;

/// The three terms of the discrete energy. `interaction` is the positive
/// aggregation sum; it enters the total with a minus sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub potential: f64,
    pub interaction: f64,
    pub total: f64,
}

fn check_shapes(traj: &TrajectoryGrid, cfg: &ProblemConfig) -> Result<()> {
    if traj.n_agents() != cfg.n_agents || traj.grid() != &cfg.grid {
        return Err(CoreError::DimensionMismatch(
            "trajectory does not match configuration shape".into(),
        ));
    }
    Ok(())
}

fn check_positive_gaps(traj: &TrajectoryGrid) -> Result<()> {
    if traj.n_agents() >= 2 && traj.min_gap() <= 0.0 {
        return Err(CoreError::Infeasible(
            "coincident or disordered agents (kernel singularity)".into(),
        ));
    }
    Ok(())
}

/// Evaluate the discrete energy. Errors on trajectories with nonpositive
/// gaps, where the kernel is singular.
pub fn energy(traj: &TrajectoryGrid, cfg: &ProblemConfig) -> Result<EnergyBreakdown> {
    check_shapes(traj, cfg)?;
    check_positive_gaps(traj)?;
    let m = traj.grid().steps();
    let n = traj.n_agents();
    let dt = traj.grid().dt();
    let nf = n as f64;

    let mut kinetic = 0.0;
    let mut potential = 0.0;
    let mut interaction = 0.0;
    for k in 0..m {
        let row = traj.row(k);
        let next = traj.row((k + 1) % m);
        for i in 0..n {
            let d = next[i] - row[i];
            kinetic += d * d;
        }
        for i in 0..n {
            potential += cfg.potential.w(row[i]);
        }
        // ordered pairs counted once, doubled below
        for i in 0..n {
            for j in (i + 1)..n {
                interaction += cfg.kernel.k(row[j] - row[i]);
            }
        }
    }
    kinetic /= 2.0 * nf * dt;
    potential *= dt / nf;
    interaction *= 2.0 * dt / (nf * nf);
    Ok(EnergyBreakdown {
        kinetic,
        potential,
        interaction,
        total: kinetic + potential - interaction,
    })
}

/// Analytic gradient of [`energy`] with respect to every node position,
/// returned row-major (M x N). Periodic index arithmetic throughout.
pub fn gradient(traj: &TrajectoryGrid, cfg: &ProblemConfig) -> Result<Vec<f64>> {
    gradient_impl(traj, cfg, false)
}

/// Test hook for the self-test mutation check: optionally flips the sign of
/// the interaction contribution. Not part of the public solver path.
#[doc(hidden)]
pub fn gradient_with_fault(
    traj: &TrajectoryGrid,
    cfg: &ProblemConfig,
    flip_interaction_sign: bool,
) -> Result<Vec<f64>> {
    gradient_impl(traj, cfg, flip_interaction_sign)
}

fn gradient_impl(
    traj: &TrajectoryGrid,
    cfg: &ProblemConfig,
    flip_interaction_sign: bool,
) -> Result<Vec<f64>> {
    check_shapes(traj, cfg)?;
    check_positive_gaps(traj)?;
    let m = traj.grid().steps();
    let n = traj.n_agents();
    let dt = traj.grid().dt();
    let nf = n as f64;
    let kin_c = 1.0 / (nf * dt);
    let pot_c = dt / nf;
    let int_c = if flip_interaction_sign { -1.0 } else { 1.0 } * 2.0 * dt / (nf * nf);

    let mut g = vec![0.0; m * n];
    for k in 0..m {
        let row = traj.row(k);
        let prev = traj.row((k + m - 1) % m);
        let next = traj.row((k + 1) % m);
        let out = &mut g[k * n..(k + 1) * n];
        for i in 0..n {
            out[i] = kin_c * (2.0 * row[i] - next[i] - prev[i])
                + pot_c * cfg.potential.w_prime(row[i]);
        }
        // pair (i, j), i < j, separation r = x_j - x_i > 0:
        //   d/dx_i [-c K(r)] = +c K'(r),  d/dx_j [-c K(r)] = -c K'(r)
        for i in 0..n {
            for j in (i + 1)..n {
                let kp = cfg.kernel.k_prime(row[j] - row[i]);
                out[i] += int_c * kp;
                out[j] -= int_c * kp;
            }
        }
    }
    Ok(g)
}

/// Interaction energy of an empirical measure:
/// `(1/N^2) sum_{i != j} K(|x_i - x_j|)`. Coincident points are rejected.
pub fn interaction_energy(mu: &EmpiricalMeasure, kernel: &KernelSpec) -> Result<f64> {
    let pts = mu.points();
    let n = pts.len();
    if n >= 2 && mu.min_gap() <= 0.0 {
        return Err(CoreError::Infeasible(
            "coincident points in empirical measure".into(),
        ));
    }
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += kernel.k(pts[j] - pts[i]);
        }
    }
    Ok(2.0 * s / (n as f64 * n as f64))
}

/// The saturated-block interaction constant
/// `K^N = (1/N^2) sum_{i != j in {0..N-1}} K(|i - j| / N)`.
pub fn kn_constant(n: usize, kernel: &KernelSpec) -> f64 {
    assert!(n >= 1);
    let nf = n as f64;
    let mut s = 0.0;
    for gap in 1..n {
        s += (n - gap) as f64 * kernel.k(gap as f64 / nf);
    }
    2.0 * s / (nf * nf)
}
