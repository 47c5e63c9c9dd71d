//! Domain types: the periodic time grid, trajectory storage, configuration,
//! empirical measures, brake orbits, and feasibility/symmetry validation.

use crate::error::{CoreError, Result};
use crate::potentials::{KernelSpec, PotentialSpec, PAPER_POTENTIAL_R0};
use serde::{Deserialize, Serialize};

/// Uniform periodic time grid on [-T/2, T/2) with M nodes, t_k = -T/2 + k*dt.
///
/// M must be divisible by 4 so that t = -T/4, 0, T/4, T/2 are exact nodes and
/// the two symmetry reflections act as index permutations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    period: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(period: f64, steps: usize) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(CoreError::Config(format!("period must be positive, got {period}")));
        }
        if steps == 0 || steps % 4 != 0 {
            return Err(CoreError::Config(format!(
                "time_steps must be a positive multiple of 4, got {steps}"
            )));
        }
        Ok(TimeGrid { period, steps })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.period / self.steps as f64
    }

    pub fn node_time(&self, k: usize) -> f64 {
        -0.5 * self.period + k as f64 * self.dt()
    }

    /// Index of the node t = 0.
    pub fn index_of_zero(&self) -> usize {
        self.steps / 2
    }

    /// Index of the node t = T/4.
    pub fn index_of_quarter(&self) -> usize {
        3 * self.steps / 4
    }

    pub fn wrap(&self, k: isize) -> usize {
        k.rem_euclid(self.steps as isize) as usize
    }
}

/// The two discrete symmetry maps of the symmetric trajectory class as index
/// permutations of the time grid.
///
/// - `time_quarter_reflect[k]` is the source row for the reflection about
///   t = T/4 (t maps to T/2 - t); agents and signs are untouched.
/// - `spacetime_reflect[k]` is the source row for the reflection about t = 0;
///   it combines with the agent flip i -> N+1-i and a sign flip of positions.
#[derive(Debug, Clone)]
pub struct SymmetryMaps {
    pub time_quarter_reflect: Vec<usize>,
    pub spacetime_reflect: Vec<usize>,
    pub n_agents: usize,
}

/// Build both involutive index maps; rejects grids whose step count is not a
/// multiple of 4 (TimeGrid construction already enforces this, kept as a
/// defense for hand-built grids).
pub fn symmetry_index_maps(grid: &TimeGrid, n_agents: usize) -> Result<SymmetryMaps> {
    let m = grid.steps();
    if m % 4 != 0 {
        return Err(CoreError::Config(format!(
            "symmetry maps need steps divisible by 4, got {m}"
        )));
    }
    let half = m / 2;
    let time_quarter_reflect = (0..m).map(|k| (half + m - k) % m).collect();
    let spacetime_reflect = (0..m).map(|k| (m - k) % m).collect();
    Ok(SymmetryMaps {
        time_quarter_reflect,
        spacetime_reflect,
        n_agents,
    })
}

/// Positions of N ordered agents at M periodic time nodes, row-major
/// (time-major, agent-minor).
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryGrid {
    grid: TimeGrid,
    n_agents: usize,
    positions: Vec<f64>,
}

impl TrajectoryGrid {
    pub fn new(grid: TimeGrid, n_agents: usize, positions: Vec<f64>) -> Result<Self> {
        if n_agents == 0 {
            return Err(CoreError::Config("n_agents must be >= 1".into()));
        }
        if positions.len() != grid.steps() * n_agents {
            return Err(CoreError::DimensionMismatch(format!(
                "expected {} positions ({} x {}), got {}",
                grid.steps() * n_agents,
                grid.steps(),
                n_agents,
                positions.len()
            )));
        }
        if positions.iter().any(|x| !x.is_finite()) {
            return Err(CoreError::InvalidInput("non-finite position".into()));
        }
        Ok(TrajectoryGrid {
            grid,
            n_agents,
            positions,
        })
    }

    /// Constant-in-time trajectory from a single row.
    pub fn constant(grid: TimeGrid, row: &[f64]) -> Result<Self> {
        let mut positions = Vec::with_capacity(grid.steps() * row.len());
        for _ in 0..grid.steps() {
            positions.extend_from_slice(row);
        }
        TrajectoryGrid::new(grid, row.len(), positions)
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn get(&self, k: usize, i: usize) -> f64 {
        self.positions[k * self.n_agents + i]
    }

    pub fn set(&mut self, k: usize, i: usize, v: f64) {
        self.positions[k * self.n_agents + i] = v;
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.positions[k * self.n_agents..(k + 1) * self.n_agents]
    }

    pub fn row_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.positions[k * self.n_agents..(k + 1) * self.n_agents]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.positions
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.positions
    }

    /// Apply the T/4 time reflection as a pure map.
    pub fn apply_s1(&self, maps: &SymmetryMaps) -> TrajectoryGrid {
        let m = self.grid.steps();
        let n = self.n_agents;
        let mut out = vec![0.0; m * n];
        for k in 0..m {
            let src = maps.time_quarter_reflect[k];
            out[k * n..(k + 1) * n].copy_from_slice(self.row(src));
        }
        TrajectoryGrid {
            grid: self.grid,
            n_agents: n,
            positions: out,
        }
    }

    /// Apply the space-time reflection (t -> -t, agent flip, sign flip).
    pub fn apply_s2(&self, maps: &SymmetryMaps) -> TrajectoryGrid {
        let m = self.grid.steps();
        let n = self.n_agents;
        let mut out = vec![0.0; m * n];
        for k in 0..m {
            let src = maps.spacetime_reflect[k];
            let row = self.row(src);
            for i in 0..n {
                out[k * n + i] = -row[n - 1 - i];
            }
        }
        TrajectoryGrid {
            grid: self.grid,
            n_agents: n,
            positions: out,
        }
    }

    /// Residual of the T/4 reflection symmetry (max abs deviation).
    pub fn s1_residual(&self, maps: &SymmetryMaps) -> f64 {
        let s = self.apply_s1(maps);
        self.positions
            .iter()
            .zip(s.positions.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Residual of the space-time reflection symmetry.
    pub fn s2_residual(&self, maps: &SymmetryMaps) -> f64 {
        let s = self.apply_s2(maps);
        self.positions
            .iter()
            .zip(s.positions.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Smallest consecutive gap over all rows.
    pub fn min_gap(&self) -> f64 {
        let mut min = f64::INFINITY;
        for k in 0..self.grid.steps() {
            let row = self.row(k);
            for i in 1..self.n_agents {
                min = min.min(row[i] - row[i - 1]);
            }
        }
        if self.n_agents < 2 {
            f64::INFINITY
        } else {
            min
        }
    }

    /// Largest |x| over the grid.
    pub fn support_radius(&self) -> f64 {
        self.positions.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest deviation of consecutive gaps from 1/N.
    pub fn saturation_dev(&self) -> f64 {
        let n = self.n_agents;
        if n < 2 {
            return 0.0;
        }
        let target = 1.0 / n as f64;
        let mut dev: f64 = 0.0;
        for k in 0..self.grid.steps() {
            let row = self.row(k);
            for i in 1..n {
                dev = dev.max((row[i] - row[i - 1] - target).abs());
            }
        }
        dev
    }

    /// Largest time variation of a single agent.
    pub fn stationarity_dev(&self) -> f64 {
        let m = self.grid.steps();
        let n = self.n_agents;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for k in 0..m {
                let v = self.get(k, i);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            dev = dev.max(hi - lo);
        }
        dev
    }
}

/// Line-search and stopping parameters of the projected gradient solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub seed: u64,
    /// Base step; defaults to 1e-2 * dt when absent.
    pub step0: Option<f64>,
    pub armijo_sigma: f64,
    pub max_halvings: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            max_iters: 200_000,
            grad_tol: 1e-6,
            seed: 0,
            step0: None,
            armijo_sigma: 1e-4,
            max_halvings: 60,
        }
    }
}

/// Full problem description shared by every solver entry point.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig {
    pub n_agents: usize,
    pub grid: TimeGrid,
    pub kernel: KernelSpec,
    pub potential: PotentialSpec,
    pub symmetric_class: bool,
    pub opt: OptimizerSettings,
    pub feas_tol: f64,
}

impl ProblemConfig {
    pub fn min_gap(&self) -> f64 {
        1.0 / self.n_agents as f64
    }

    pub fn step0(&self) -> f64 {
        self.opt.step0.unwrap_or(1e-2 * self.grid.dt())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_agents < 1 {
            return Err(CoreError::Config("n_agents must be >= 1".into()));
        }
        if !(self.feas_tol > 0.0) {
            return Err(CoreError::Config("feas_tol must be > 0".into()));
        }
        if !(self.opt.grad_tol > 0.0) {
            return Err(CoreError::Config("grad_tol must be > 0".into()));
        }
        if let Some(s0) = self.opt.step0 {
            if !(s0 > 0.0) {
                return Err(CoreError::Config("step0 must be > 0".into()));
            }
        }
        if !(self.opt.armijo_sigma > 0.0 && self.opt.armijo_sigma < 1.0) {
            return Err(CoreError::Config("armijo_sigma must be in (0, 1)".into()));
        }
        Ok(())
    }

    /// Parse a configuration document; unknown fields are rejected.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: RawConfig =
            serde_json::from_str(s).map_err(|e| CoreError::Config(e.to_string()))?;
        raw.into_config()
    }

    /// Canonical serialization used for run digests: a config parses and
    /// re-serializes to identical bytes.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&RawConfig::from_config(self)).expect("config serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKernel {
    alpha: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    name: String,
    #[serde(default)]
    params: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOpt {
    max_iters: usize,
    grad_tol: f64,
    seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    step0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    armijo_sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_halvings: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n_agents: usize,
    period: f64,
    time_steps: usize,
    kernel: RawKernel,
    potential: RawPotential,
    symmetric_class: bool,
    opt: RawOpt,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    feas_tol: Option<f64>,
}

impl RawConfig {
    fn into_config(self) -> Result<ProblemConfig> {
        let grid = TimeGrid::new(self.period, self.time_steps)?;
        let potential = match self.potential.name.as_str() {
            "paper_smooth_double_well" => match self.potential.params.as_slice() {
                [] => PotentialSpec::paper_default(),
                [r0] if *r0 > 0.0 => PotentialSpec::PaperSmoothDoubleWell { r0: *r0 },
                _ => {
                    return Err(CoreError::Config(
                        "paper_smooth_double_well takes no params or a single positive r0".into(),
                    ))
                }
            },
            "quadratic" => match self.potential.params.as_slice() {
                [] => PotentialSpec::Quadratic { coeff: 1.0 },
                [c] if *c >= 0.0 => PotentialSpec::Quadratic { coeff: *c },
                _ => {
                    return Err(CoreError::Config(
                        "quadratic takes no params or a single nonnegative coefficient".into(),
                    ))
                }
            },
            "zero" => {
                if !self.potential.params.is_empty() {
                    return Err(CoreError::Config("zero potential takes no params".into()));
                }
                PotentialSpec::Zero
            }
            other => {
                return Err(CoreError::Config(format!(
                    "unknown potential family {other:?} (expected paper_smooth_double_well, quadratic or zero)"
                )))
            }
        };
        if !(self.kernel.alpha >= 0.0) || !self.kernel.alpha.is_finite() {
            return Err(CoreError::Config("kernel alpha must be finite and >= 0".into()));
        }
        let cfg = ProblemConfig {
            n_agents: self.n_agents,
            grid,
            kernel: KernelSpec::InverseSqrt {
                alpha: self.kernel.alpha,
            },
            potential,
            symmetric_class: self.symmetric_class,
            opt: OptimizerSettings {
                max_iters: self.opt.max_iters,
                grad_tol: self.opt.grad_tol,
                seed: self.opt.seed,
                step0: self.opt.step0,
                armijo_sigma: self.opt.armijo_sigma.unwrap_or(1e-4),
                max_halvings: self.opt.max_halvings.unwrap_or(60),
            },
            feas_tol: self.feas_tol.unwrap_or(1e-9),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn from_config(cfg: &ProblemConfig) -> RawConfig {
        let (name, params) = match &cfg.potential {
            PotentialSpec::PaperSmoothDoubleWell { r0 } => {
                if (*r0 - PAPER_POTENTIAL_R0).abs() < 1e-15 {
                    ("paper_smooth_double_well", vec![])
                } else {
                    ("paper_smooth_double_well", vec![*r0])
                }
            }
            PotentialSpec::Quadratic { coeff } => ("quadratic", vec![*coeff]),
            PotentialSpec::Zero => ("zero", vec![]),
        };
        RawConfig {
            n_agents: cfg.n_agents,
            period: cfg.grid.period(),
            time_steps: cfg.grid.steps(),
            kernel: RawKernel {
                alpha: cfg.kernel.alpha(),
            },
            potential: RawPotential {
                name: name.to_string(),
                params,
            },
            symmetric_class: cfg.symmetric_class,
            opt: RawOpt {
                max_iters: cfg.opt.max_iters,
                grad_tol: cfg.opt.grad_tol,
                seed: cfg.opt.seed,
                step0: cfg.opt.step0,
                armijo_sigma: Some(cfg.opt.armijo_sigma),
                max_halvings: Some(cfg.opt.max_halvings),
            },
            feas_tol: Some(cfg.feas_tol),
        }
    }
}

/// Feasibility and symmetry report for a trajectory against a configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub strictly_ordered: bool,
    pub feasible: bool,
    /// max over nodes of (1/N - gap) clipped at 0
    pub max_gap_violation: f64,
    pub s1_residual: f64,
    pub s2_residual: f64,
    /// true when both symmetry residuals are below the feasibility tolerance
    pub symmetric: bool,
}

/// Check ordering, the 1/N distance constraint (with `feas_tol` slack), and
/// both symmetry residuals.
pub fn validate(traj: &TrajectoryGrid, cfg: &ProblemConfig) -> Result<ValidationReport> {
    if traj.n_agents() != cfg.n_agents || traj.grid() != &cfg.grid {
        return Err(CoreError::DimensionMismatch(
            "trajectory does not match configuration shape".into(),
        ));
    }
    let n = traj.n_agents();
    let min_gap = cfg.min_gap();
    let mut strictly_ordered = true;
    let mut max_violation: f64 = 0.0;
    for k in 0..traj.grid().steps() {
        let row = traj.row(k);
        for i in 1..n {
            let gap = row[i] - row[i - 1];
            if gap <= 0.0 {
                strictly_ordered = false;
            }
            max_violation = max_violation.max(min_gap - gap);
        }
    }
    let max_violation = max_violation.max(0.0);
    let maps = symmetry_index_maps(traj.grid(), n)?;
    let s1 = traj.s1_residual(&maps);
    let s2 = traj.s2_residual(&maps);
    Ok(ValidationReport {
        strictly_ordered,
        feasible: max_violation <= cfg.feas_tol,
        max_gap_violation: max_violation,
        s1_residual: s1,
        s2_residual: s2,
        symmetric: s1 <= cfg.feas_tol && s2 <= cfg.feas_tol,
    })
}

/// Sorted equal-weight particle positions representing the uniform empirical
/// measure (1/N) * sum of Dirac masses.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    points: Vec<f64>,
}

impl EmpiricalMeasure {
    /// Sorts the input; rejects empty and non-finite data.
    pub fn from_points(mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(CoreError::InvalidInput("empty empirical measure".into()));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(CoreError::InvalidInput("non-finite particle position".into()));
        }
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(EmpiricalMeasure { points })
    }

    /// From an already sorted trajectory row.
    pub fn from_sorted_row(row: &[f64]) -> Result<Self> {
        EmpiricalMeasure::from_points(row.to_vec())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Quantile at level u in (0, 1]: the ceil(u*N)-th smallest point.
    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.points.len();
        let idx = ((u * n as f64).ceil() as usize).clamp(1, n);
        self.points[idx - 1]
    }

    pub fn min_gap(&self) -> f64 {
        if self.points.len() < 2 {
            return f64::INFINITY;
        }
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// A sampled brake orbit: positions and velocities of the representative
/// left endpoint a(t) on the time grid, with the reflection symmetries
/// a(T/4 + s) = a(T/4 - s) and a(t) = -a(-t) - 1 built in.
#[derive(Debug, Clone, Serialize)]
pub struct BrakeOrbit {
    #[serde(skip)]
    pub grid: TimeGrid,
    pub a: Vec<f64>,
    pub v: Vec<f64>,
    /// max over nodes of |second difference / dt^2 - Wbar'(a)|
    pub ode_residual: f64,
}

impl BrakeOrbit {
    /// Residuals of the built-in invariants: (boundary at t=0, boundary at
    /// T/2, T/4 reflection, space reflection).
    pub fn symmetry_residuals(&self) -> (f64, f64, f64, f64) {
        let m = self.grid.steps();
        let b0 = (self.a[m / 2] + 0.5).abs();
        let bh = (self.a[0] + 0.5).abs();
        let mut s1: f64 = 0.0;
        let mut s2: f64 = 0.0;
        let q = 3 * m / 4;
        for s in 0..=m / 4 {
            let plus = (q + s) % m;
            let minus = q - s;
            s1 = s1.max((self.a[plus] - self.a[minus]).abs());
        }
        for k in 0..m {
            let neg = (m - k) % m;
            s2 = s2.max((self.a[k] + self.a[neg] + 1.0).abs());
        }
        (b0, bh, s1, s2)
    }
}
