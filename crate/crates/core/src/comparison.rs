//! Explicit comparison profiles for `v_t = |x|^α Δv` and the lower-bound
//! experiment built on them.
//!
//! For `N >= 3`
//! `G(r, t) = t^{-(N-α)/(2-α)} (1 - t^{(N-2)/(2-α)} r^{2-N}) exp(-r^{2-α}/((2-α)² t))`,
//! for `N = 2`
//! `G̃(r, t) = t^{-1} log(r^{2-α}/t) exp(-r^{2-α}/((2-α)² t))`.
//! Both vanish on `r^{2-α} = t` and are positive outside it.

use alloc::vec::Vec;

use crate::coefficients::{DampingProfile, ProfileKind};
use crate::error::{check_param, Result};
use crate::grid::{norm_dmu, Field, RadialGrid};
use crate::heat::{HeatSolver, StepSchedule, Theta};
use crate::math;
use crate::quadrature::gauss_legendre;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonProfile {
    dim: usize,
    alpha: f64,
}

impl ComparisonProfile {
    pub fn new(dim: usize, alpha: f64) -> Result<Self> {
        check_param("N", dim as f64, dim >= 2, "dimension must be at least 2")?;
        check_param("alpha", alpha, (0.0..1.0).contains(&alpha), "alpha must lie in [0, 1)")?;
        Ok(Self { dim, alpha })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `(N - α)/(2 - α)`: the decay exponent of `‖G_+(·, t)‖²_{L²_{dμ}}`.
    pub fn exponent(&self) -> f64 {
        (self.dim as f64 - self.alpha) / (2.0 - self.alpha)
    }

    /// `t_R = R^{2-α}`.
    pub fn t_r(&self, radius: f64) -> f64 {
        math::powf(radius, 2.0 - self.alpha)
    }

    fn gaussian(&self, r: f64, t: f64) -> f64 {
        let k = 2.0 - self.alpha;
        math::exp(-math::powf(r, k) / (k * k * t))
    }

    pub fn eval(&self, r: f64, t: f64) -> f64 {
        let k = 2.0 - self.alpha;
        let e = self.gaussian(r, t);
        if self.dim == 2 {
            math::ln(math::powf(r, k) / t) / t * e
        } else {
            let n = self.dim as f64;
            let q = (n - 2.0) / k;
            math::powf(t, -self.exponent()) * (1.0 - math::powf(t, q) * math::powi(r, 2 - self.dim as i32)) * e
        }
    }

    pub fn positive_part(&self, r: f64, t: f64) -> f64 {
        self.eval(r, t).max(0.0)
    }

    /// `∂_t G` in closed form.
    pub fn time_derivative(&self, r: f64, t: f64) -> f64 {
        let k = 2.0 - self.alpha;
        let e = self.gaussian(r, t);
        let s = math::powf(r, k) / (k * k);
        if self.dim == 2 {
            let l = math::ln(math::powf(r, k) / t);
            e * (-(l + 1.0) / (t * t) + l * s / (t * t * t))
        } else {
            let n = self.dim as f64;
            let p = self.exponent();
            let q = (n - 2.0) / k;
            let far = math::powi(r, 2 - self.dim as i32);
            e * (-p * math::powf(t, -p - 1.0) + math::powf(t, -p) * s / (t * t)
                - (q - p) * math::powf(t, q - p - 1.0) * far
                - math::powf(t, q - p) * far * s / (t * t))
        }
    }

    /// `∂_t G - r^α Δ_h G` with the centred three-point radial stencil of
    /// spacing `h`.
    pub fn discrete_residual(&self, r: f64, t: f64, h: f64) -> f64 {
        let g0 = self.eval(r, t);
        let gp = self.eval(r + h, t);
        let gm = self.eval(r - h, t);
        let lap = (gp - 2.0 * g0 + gm) / (h * h) + (self.dim as f64 - 1.0) / r * (gp - gm) / (2.0 * h);
        self.time_derivative(r, t) - math::powf(r, self.alpha) * lap
    }

    /// The continuum value of `∂_t G - r^α ΔG`, which is positive:
    /// `E/t²` for `N = 2` and `(N-2)/(2-α) t^{q-p-1} r^{2-N} E` for `N >= 3`,
    /// with `E` the Gaussian factor, `p = (N-α)/(2-α)`, `q = (N-2)/(2-α)`.
    pub fn continuum_residual(&self, r: f64, t: f64) -> f64 {
        let k = 2.0 - self.alpha;
        let e = self.gaussian(r, t);
        if self.dim == 2 {
            e / (t * t)
        } else {
            let n = self.dim as f64;
            let q = (n - 2.0) / k;
            (n - 2.0) / k * math::powf(t, q - self.exponent() - 1.0) * math::powi(r, 2 - self.dim as i32) * e
        }
    }

    /// `C` with `‖G_+(·, t)‖²_{L²_{dμ}} = C t^{-(N-α)/(2-α)}` for `a = r^{-α}`:
    /// `ω_N ∫_1^∞ g(ρ)² exp(-2ρ^{2-α}/(2-α)²) ρ^{N-1-α} dρ` with
    /// `g = 1 - ρ^{2-N}` (`N >= 3`) or `g = (2-α) log ρ` (`N = 2`).
    pub fn floor_constant(&self) -> f64 {
        let k = 2.0 - self.alpha;
        let upper = math::powf(400.0 * k * k, 1.0 / k);
        let dim = self.dim;
        let alpha = self.alpha;
        let integral = gauss_legendre(1.0, upper, 4000, |rho| {
            let g = if dim == 2 { k * math::ln(rho) } else { 1.0 - math::powi(rho, 2 - dim as i32) };
            g * g * math::exp(-2.0 * math::powf(rho, k) / (k * k)) * math::powf(rho, dim as f64 - 1.0 - alpha)
        });
        crate::grid::sphere_area(dim) * integral
    }

    /// `‖G_+(·, t)‖_{L²_{dμ}}` on the whole exterior region.
    pub fn floor(&self, t: f64) -> f64 {
        math::sqrt(self.floor_constant() * math::powf(t, -self.exponent()))
    }

    pub fn sample_positive_part(&self, grid: &RadialGrid, t: f64) -> Field {
        Field::from_fn(grid, |r| self.positive_part(r, t)).with_dirichlet()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityReport {
    /// `(t, ‖√a e^{tL} g‖_{L²})` with `g = G_+(·, t_R)`.
    pub series: Vec<(f64, f64)>,
    /// `C^{1/2} (t + t_R)^{-(N-α)/(2(2-α))}` at each sample.
    pub floor: Vec<f64>,
    pub t_r: f64,
    /// `min_t ‖e^{tL} g‖ / floor(t)`.
    pub floor_ratio: f64,
    /// `min_{t, i} (v_i - G_+(r_i, t + t_R)) / max v`.
    pub comparison_min: f64,
    pub truncated: bool,
    /// Whether `a = |x|^{-α}` exactly, the setting of the lower bound.
    pub exact_profile: bool,
}

/// Evolve `g = G_+(·, t_R)` with backward Euler and compare against the
/// explicit lower profile at each of `times`.
pub fn optimality_experiment(
    radius: f64,
    profile: &DampingProfile,
    grid: &RadialGrid,
    times: &[f64],
    schedule: &StepSchedule,
) -> Result<OptimalityReport> {
    let cmp = ComparisonProfile::new(grid.dim(), profile.alpha())?;
    check_param("R", radius, radius >= grid.r_min(), "comparison radius must be outside the obstacle")?;
    let t_r = cmp.t_r(radius);
    let g = cmp.sample_positive_part(grid, t_r);
    let solver = HeatSolver::from_profile(grid, profile, Theta::BackwardEuler)?;
    let run = solver.run(&g, schedule, times)?;
    let half = 0.5 * cmp.exponent();
    let c = math::sqrt(cmp.floor_constant());
    let mut series = Vec::with_capacity(times.len());
    let mut floor = Vec::with_capacity(times.len());
    let mut floor_ratio = f64::INFINITY;
    let mut comparison_min = f64::INFINITY;
    for s in &run.states {
        let norm = norm_dmu(grid, &s.v, profile, 2.0)?;
        let f = c * math::powf(s.t + t_r, -half);
        floor_ratio = floor_ratio.min(norm / f);
        series.push((s.t, norm));
        floor.push(f);
        let peak = s.v.max_abs();
        if peak > 0.0 {
            for (i, r) in grid.nodes().enumerate() {
                comparison_min = comparison_min.min((s.v[i] - cmp.positive_part(r, s.t + t_r)) / peak);
            }
        }
    }
    let exact_profile = profile.kind() == ProfileKind::PurePower && profile.amplitude() == 1.0;
    Ok(OptimalityReport { series, floor, t_r, floor_ratio, comparison_min, truncated: run.truncated(), exact_profile })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sign_structure() {
        for (dim, alpha) in [(3usize, 0.0), (3, 0.5), (2, 0.0), (2, 0.5)] {
            let c = ComparisonProfile::new(dim, alpha).unwrap();
            for t in [0.5, 2.0, 9.0] {
                let zero = math::powf(t, 1.0 / (2.0 - alpha));
                assert!(c.eval(zero * 1.01, t) > 0.0);
                assert!(c.eval(zero * 0.99, t) < 0.0);
                assert!(c.eval(zero, t).abs() < 1e-14);
                assert_eq!(c.positive_part(zero * 0.9, t), 0.0);
            }
        }
    }

    #[test]
    fn time_derivative_matches_difference_quotient() {
        for (dim, alpha) in [(3usize, 0.0), (3, 0.5), (2, 0.0), (4, 0.3)] {
            let c = ComparisonProfile::new(dim, alpha).unwrap();
            for (r, t) in [(2.0, 1.5), (3.3, 4.0), (1.2, 0.7)] {
                let h = 1e-5;
                let fd = (c.eval(r, t + h) - c.eval(r, t - h)) / (2.0 * h);
                assert_relative_eq!(c.time_derivative(r, t), fd, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn discrete_residual_converges_to_positive_defect() {
        for (dim, alpha) in [(3usize, 0.0), (3, 0.5), (2, 0.0), (2, 0.5)] {
            let c = ComparisonProfile::new(dim, alpha).unwrap();
            let (r, t) = (2.5, 2.0);
            let exact = c.continuum_residual(r, t);
            assert!(exact > 0.0);
            let e1 = (c.discrete_residual(r, t, 0.02) - exact).abs();
            let e2 = (c.discrete_residual(r, t, 0.01) - exact).abs();
            assert!((e1 / e2).log2() > 1.9, "{dim} {alpha}: {e1} {e2}");
        }
    }

    #[test]
    fn exponent_values() {
        assert_relative_eq!(ComparisonProfile::new(3, 0.0).unwrap().exponent() / 2.0, 0.75);
        assert_relative_eq!(ComparisonProfile::new(2, 0.5).unwrap().exponent() / 2.0, 0.5);
    }

    #[test]
    fn floor_constants_match_reference_quadrature() {
        // Independent adaptive quadrature of the same integrals.
        let cases = [
            (3usize, 0.0, FLOOR_3_0),
            (3, 0.5, FLOOR_3_05),
            (2, 0.0, FLOOR_2_0),
            (2, 0.5, FLOOR_2_05),
        ];
        for (dim, alpha, reference) in cases {
            let c = ComparisonProfile::new(dim, alpha).unwrap();
            assert_relative_eq!(c.floor_constant(), reference, max_relative = 1e-10);
        }
    }

    #[test]
    fn floor_matches_grid_norm() {
        let c = ComparisonProfile::new(3, 0.0).unwrap();
        let t = 4.0;
        let g = RadialGrid::new(1.0, 40.0, 39001, 3).unwrap();
        let p = DampingProfile::pure_power(1.0, 0.0).unwrap();
        let v = c.sample_positive_part(&g, t);
        let norm = norm_dmu(&g, &v, &p, 2.0).unwrap();
        assert_relative_eq!(norm, c.floor(t), max_relative = 1e-6);
    }

    const FLOOR_3_0: f64 = 2.373_144_402_119_248_3;
    const FLOOR_3_05: f64 = 1.119_983_609_070_260_5;
    const FLOOR_2_0: f64 = 4.502_218_859_083_187_6;
    const FLOOR_2_05: f64 = 1.190_677_314_370_787_9;
}
