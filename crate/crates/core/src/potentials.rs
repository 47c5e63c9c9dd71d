//! Confinement potentials W, interaction kernels K, and the window averages
//! of W seen by a saturated block of agents.

use crate::error::{CoreError, Result};
use crate::quad;
use serde::{Deserialize, Serialize};

/// Smoothed positive part `(x)^+ ~ (0.1*sqrt(1+(10x)^2) + x) / 2`.
///
/// Strictly positive everywhere, equal to 0.05 at x = 0, and within 0.05 of
/// max(x, 0) on all of R.
pub fn smooth_positive_part(x: f64) -> f64 {
    (0.1 * (1.0 + (10.0 * x) * (10.0 * x)).sqrt() + x) / 2.0
}

/// Derivative of [`smooth_positive_part`].
pub fn smooth_positive_part_deriv(x: f64) -> f64 {
    (10.0 * x / (1.0 + 100.0 * x * x).sqrt() + 1.0) / 2.0
}

/// The smoothed double-well test potential
/// `W(x) = 10*((0.5 - x^2)^+ + (x^2 - 3)^+)` (smoothed positive parts).
///
/// Nearly zero for |x| in [sqrt(0.5), sqrt(3)], about 5.06 at the origin, and
/// quadratically growing outside the wells.
pub fn paper_potential(x: f64) -> f64 {
    10.0 * (smooth_positive_part(0.5 - x * x) + smooth_positive_part(x * x - 3.0))
}

/// Exact derivative of [`paper_potential`] by the chain rule.
pub fn paper_potential_deriv(x: f64) -> f64 {
    10.0 * (smooth_positive_part_deriv(0.5 - x * x) * (-2.0 * x)
        + smooth_positive_part_deriv(x * x - 3.0) * (2.0 * x))
}

/// Default confinement radius for the double-well test potential: outside
/// sqrt(3) + 0.1 the potential is radially increasing.
pub const PAPER_POTENTIAL_R0: f64 = 1.832_050_807_568_877_3; // sqrt(3) + 0.1

/// A registered confinement potential family with evaluable value and
/// derivative, the radius beyond which it is radially increasing, and a
/// reflection-symmetry flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PotentialSpec {
    /// The smoothed double-well potential; `r0` is user-supplied metadata
    /// (default sqrt(3) + 0.1).
    PaperSmoothDoubleWell { r0: f64 },
    /// `W(x) = coeff * x^2`.
    Quadratic { coeff: f64 },
    /// `W = 0` (for kernel-only experiments and trivial-orbit tests).
    Zero,
}

impl PotentialSpec {
    pub fn paper_default() -> Self {
        PotentialSpec::PaperSmoothDoubleWell {
            r0: PAPER_POTENTIAL_R0,
        }
    }

    pub fn w(&self, x: f64) -> f64 {
        match self {
            PotentialSpec::PaperSmoothDoubleWell { .. } => paper_potential(x),
            PotentialSpec::Quadratic { coeff } => coeff * x * x,
            PotentialSpec::Zero => 0.0,
        }
    }

    pub fn w_prime(&self, x: f64) -> f64 {
        match self {
            PotentialSpec::PaperSmoothDoubleWell { .. } => paper_potential_deriv(x),
            PotentialSpec::Quadratic { coeff } => 2.0 * coeff * x,
            PotentialSpec::Zero => 0.0,
        }
    }

    /// Radius with x*W'(x) > 0 for |x| > r0.
    pub fn r0(&self) -> f64 {
        match self {
            PotentialSpec::PaperSmoothDoubleWell { r0 } => *r0,
            PotentialSpec::Quadratic { .. } => 1.0,
            PotentialSpec::Zero => 1.0,
        }
    }

    /// All registered families satisfy W(x) = W(-x).
    pub fn is_even(&self) -> bool {
        true
    }

    pub fn name(&self) -> &'static str {
        match self {
            PotentialSpec::PaperSmoothDoubleWell { .. } => "paper_smooth_double_well",
            PotentialSpec::Quadratic { .. } => "quadratic",
            PotentialSpec::Zero => "zero",
        }
    }

    /// Sampled sanity checks: nonnegativity, evenness, and radial increase
    /// outside r0. Used by the self-test suite.
    pub fn check_invariants(&self) -> Result<()> {
        let r0 = self.r0();
        for i in 0..=2000 {
            let x = -10.0 + i as f64 * 0.01;
            if self.w(x) < 0.0 {
                return Err(CoreError::InvalidInput(format!(
                    "potential {} negative at {x}",
                    self.name()
                )));
            }
            if self.is_even() && (self.w(x) - self.w(-x)).abs() > 1e-12 {
                return Err(CoreError::InvalidInput(format!(
                    "potential {} not even at {x}",
                    self.name()
                )));
            }
        }
        if !matches!(self, PotentialSpec::Zero) {
            for i in 1..=1000 {
                let x = r0 + i as f64 * 0.01;
                if x * self.w_prime(x) <= 0.0 || (-x) * self.w_prime(-x) <= 0.0 {
                    return Err(CoreError::InvalidInput(format!(
                        "potential {} not radially increasing at |x| = {x}",
                        self.name()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Scaled inverse square root kernel: K(r) = alpha / sqrt(r),
/// K'(r) = -alpha / (2 r^{3/2}).
pub fn inverse_sqrt_kernel(alpha: f64, r: f64) -> Result<(f64, f64)> {
    if r <= 0.0 {
        return Err(CoreError::Infeasible(format!(
            "kernel evaluated at nonpositive distance r = {r}"
        )));
    }
    let s = r.sqrt();
    Ok((alpha / s, -alpha / (2.0 * r * s)))
}

/// A registered interaction kernel family. Nonincreasing, nonnegative,
/// vanishing at infinity on the registered families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum KernelSpec {
    /// `alpha / sqrt(r)`; the singularity at r = 0 is never reached on
    /// feasible configurations (gaps >= 1/N).
    InverseSqrt { alpha: f64 },
    /// Constant kernel, test-only (not reachable from configuration files).
    Constant { value: f64 },
}

impl KernelSpec {
    /// K(r). Panics on r <= 0: feasibility must be checked by the caller, a
    /// nonpositive separation always indicates an upstream bug or an
    /// infeasible configuration that should have been rejected earlier.
    pub fn k(&self, r: f64) -> f64 {
        assert!(r > 0.0, "kernel evaluated at nonpositive distance {r}");
        match self {
            KernelSpec::InverseSqrt { alpha } => alpha / r.sqrt(),
            KernelSpec::Constant { value } => *value,
        }
    }

    /// K'(r). Same domain contract as [`KernelSpec::k`].
    pub fn k_prime(&self, r: f64) -> f64 {
        assert!(r > 0.0, "kernel evaluated at nonpositive distance {r}");
        match self {
            KernelSpec::InverseSqrt { alpha } => -alpha / (2.0 * r * r.sqrt()),
            KernelSpec::Constant { .. } => 0.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        match self {
            KernelSpec::InverseSqrt { alpha } => *alpha,
            KernelSpec::Constant { value } => *value,
        }
    }

    /// Sampled monotonicity/decay checks, used by the self-test suite.
    pub fn check_invariants(&self) -> Result<()> {
        let mut prev = f64::INFINITY;
        for i in 1..=1000 {
            let r = i as f64 * 0.01;
            let k = self.k(r);
            if k < 0.0 {
                return Err(CoreError::InvalidInput("kernel negative".into()));
            }
            if k > prev + 1e-14 {
                return Err(CoreError::InvalidInput("kernel not nonincreasing".into()));
            }
            if self.k_prime(r) > 1e-14 {
                return Err(CoreError::InvalidInput("kernel derivative positive".into()));
            }
            prev = k;
        }
        if matches!(self, KernelSpec::InverseSqrt { .. }) && self.k(1e6) >= 1e-2 * self.k(1.0) {
            return Err(CoreError::InvalidInput("kernel does not decay".into()));
        }
        Ok(())
    }
}

/// Discrete window average `(1/n) * sum_{i=0}^{n-1} W(x + i/n)`, the
/// effective potential seen by a saturated block of n agents.
pub fn averaged_potential_n(pot: &PotentialSpec, n: usize, x: f64) -> f64 {
    assert!(n >= 1);
    let mut s = 0.0;
    for i in 0..n {
        s += pot.w(x + i as f64 / n as f64);
    }
    s / n as f64
}

/// Derivative of [`averaged_potential_n`] (same sum over W').
pub fn averaged_potential_n_deriv(pot: &PotentialSpec, n: usize, x: f64) -> f64 {
    assert!(n >= 1);
    let mut s = 0.0;
    for i in 0..n {
        s += pot.w_prime(x + i as f64 / n as f64);
    }
    s / n as f64
}

/// Continuum window average `Wbar(x) = integral of W over [x, x+1]`, by
/// adaptive quadrature to absolute tolerance 1e-10.
pub fn averaged_potential_limit(pot: &PotentialSpec, x: f64) -> f64 {
    quad::integrate(|s| pot.w(s), x, x + 1.0, 1e-10, 20_000)
        .expect("window average of a smooth potential must converge")
}

/// Exact derivative of the continuum window average:
/// `Wbar'(x) = W(x+1) - W(x)`. No quadrature involved.
pub fn averaged_potential_limit_deriv(pot: &PotentialSpec, x: f64) -> f64 {
    pot.w(x + 1.0) - pot.w(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_positive_part_values() {
        assert!((smooth_positive_part(0.0) - 0.05).abs() < 1e-15);
        // exact formula at x = 10 and x = -10
        let f10 = (0.1 * (1.0f64 + 10000.0).sqrt() + 10.0) / 2.0;
        assert_eq!(smooth_positive_part(10.0), f10);
        assert!((smooth_positive_part(10.0) - 10.0).abs() < 1e-3);
        assert!((smooth_positive_part(-10.0) - 0.0).abs() < 1e-3);
        // dominates the positive part up to the smoothing defect
        for i in -100..=100 {
            let x = i as f64 * 0.1;
            let v = smooth_positive_part(x);
            assert!(v >= 0.0);
            assert!(v > x.max(0.0) - 0.05);
        }
    }

    #[test]
    fn paper_potential_shape() {
        let pot = PotentialSpec::paper_default();
        assert!(pot.w(0.0) > 4.0);
        assert!(pot.w(1.2) < 1.0);
        // evenness at scattered points
        for i in 0..100 {
            let x = -3.0 + i as f64 * 0.061;
            assert!((pot.w(x) - pot.w(-x)).abs() < 1e-12);
        }
        pot.check_invariants().unwrap();
    }

    #[test]
    fn paper_potential_deriv_matches_finite_difference() {
        let pot = PotentialSpec::paper_default();
        let h = 1e-6;
        let mut state = 0x2545F4914F6CDD1Du64;
        for _ in 0..100 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let u = (state >> 11) as f64 / (1u64 << 53) as f64;
            let x = -3.0 + 6.0 * u;
            let fd = (pot.w(x + h) - pot.w(x - h)) / (2.0 * h);
            let an = pot.w_prime(x);
            let denom = an.abs().max(1.0);
            assert!(
                (fd - an).abs() / denom < 1e-5,
                "x = {x}: fd = {fd}, analytic = {an}"
            );
        }
    }

    #[test]
    fn averaged_n_basics() {
        let pot = PotentialSpec::Quadratic { coeff: 1.0 };
        // n = 1 reduces to W itself
        assert_eq!(averaged_potential_n(&pot, 1, 0.7), pot.w(0.7));
        // W(u) = u^2, n = 2, x = 0: (0 + 1/4)/2
        assert!((averaged_potential_n(&pot, 2, 0.0) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn averaged_n_converges_to_window_integral() {
        // Left Riemann sum: error ~ (W(x+1) - W(x)) / (2N) + O(1/N^2), so the
        // defect only vanishes fast where the window endpoints match. At the
        // symmetric point x = -0.5 of an even potential the O(1/N) term
        // cancels; elsewhere the observed error tracks the Euler-Maclaurin
        // estimate and halves as N doubles.
        let pot = PotentialSpec::paper_default();
        for &x in &[-1.5f64, -0.5, 0.0] {
            let exact = averaged_potential_limit(&pot, x);
            let e256 = (averaged_potential_n(&pot, 256, x) - exact).abs();
            let e512 = (averaged_potential_n(&pot, 512, x) - exact).abs();
            let firstorder = (pot.w(x + 1.0) - pot.w(x)).abs() / 512.0;
            assert!(
                e256 <= firstorder + 2e-4,
                "x = {x}: error {e256} above Euler-Maclaurin estimate {firstorder}"
            );
            if firstorder > 1e-4 {
                assert!(e512 < e256, "x = {x}: no decay ({e256} -> {e512})");
            }
        }
        // symmetric point: first-order term cancels, 1e-3 holds comfortably
        let exact = averaged_potential_limit(&pot, -0.5);
        assert!((averaged_potential_n(&pot, 256, -0.5) - exact).abs() <= 1e-3);
    }

    #[test]
    fn averaged_limit_values() {
        let zero = PotentialSpec::Zero;
        assert_eq!(averaged_potential_limit(&zero, 0.3), 0.0);
        assert_eq!(averaged_potential_limit_deriv(&zero, 0.3), 0.0);

        let sq = PotentialSpec::Quadratic { coeff: 1.0 };
        assert!((averaged_potential_limit(&sq, 0.0) - 1.0 / 3.0).abs() < 1e-10);
        assert!((averaged_potential_limit_deriv(&sq, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn averaged_limit_reflection_symmetry() {
        // Wbar(-x-1) = Wbar(x) for even W (substitute u -> -u).
        let pot = PotentialSpec::paper_default();
        for i in 0..20 {
            let x = -2.0 + i as f64 * 0.17;
            let a = averaged_potential_limit(&pot, x);
            let b = averaged_potential_limit(&pot, -x - 1.0);
            assert!((a - b).abs() < 1e-9, "x = {x}: {a} vs {b}");
        }
    }

    #[test]
    fn averaged_limit_deriv_cross_check() {
        // Exact derivative W(x+1) - W(x) vs differentiated quadrature.
        let pot = PotentialSpec::paper_default();
        let h = 1e-5;
        for i in 0..50 {
            let x = -2.4 + i as f64 * 0.1;
            let fd = (averaged_potential_limit(&pot, x + h) - averaged_potential_limit(&pot, x - h))
                / (2.0 * h);
            let an = averaged_potential_limit_deriv(&pot, x);
            assert!((fd - an).abs() < 1e-6, "x = {x}: {fd} vs {an}");
        }
    }

    #[test]
    fn inverse_sqrt_kernel_values() {
        let (k, kp) = inverse_sqrt_kernel(1.0, 1.0).unwrap();
        assert_eq!(k, 1.0);
        assert_eq!(kp, -0.5);
        let (k, _) = inverse_sqrt_kernel(1.0, 0.25).unwrap();
        assert_eq!(k, 2.0);
        let (k, _) = inverse_sqrt_kernel(5.0, 0.5).unwrap();
        assert!((k - 5.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(inverse_sqrt_kernel(1.0, 0.0).is_err());
        assert!(inverse_sqrt_kernel(1.0, -1.0).is_err());
    }

    #[test]
    fn kernel_monotone() {
        let k = KernelSpec::InverseSqrt { alpha: 3.0 };
        k.check_invariants().unwrap();
        let mut r1 = 0.05;
        while r1 < 9.0 {
            let r2 = r1 + 0.13;
            assert!(k.k(r1) >= k.k(r2));
            r1 = r2;
        }
    }
}
