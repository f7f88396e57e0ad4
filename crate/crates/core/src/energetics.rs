//! Weighted energy functionals for wave solutions and the inequalities that
//! control them.

use crate::coefficients::{DampingProfile, WeightParams};
use crate::error::{Error, Result};
use crate::grid::{gradient_sq_integral, log_weighted_cell_integral, log_weighted_integral, norm_dmu, Field, RadialGrid};
use crate::math;
use crate::wave::WaveSample;

/// Weighted functionals at one time; `Φ = Φ_{A,β}(·, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub t: f64,
    /// `∫ (|∇u|² + u_t²) Φ dx`.
    pub e1: f64,
    /// `∫ (2 u u_t + a u²) Φ dx`; may be negative.
    pub e2: f64,
    /// `∫ (a + A/(1+t)²) u_t² Φ dx`.
    pub f: f64,
    /// `∫ Φ a |∂_t^k u|² dx` for `k = 0, 1, 2`.
    pub weighted_u_sq: [f64; 3],
    /// `∫ Φ |∇∂_t^k u|² dx` for `k = 0, 1, 2`.
    pub grad_sq: [f64; 3],
}

pub fn energy_record(grid: &RadialGrid, sample: &WaveSample, weight: &WeightParams<'_>) -> Result<EnergyRecord> {
    grid.check(sample.u.len())?;
    grid.check(sample.u_t.len())?;
    grid.check(sample.u_tt.len())?;
    let t = sample.t;
    let potential = weight.potential();
    let profile = potential.profile();
    let log_node: alloc::vec::Vec<f64> = grid.nodes().map(|r| weight.log_phi(r, t)).collect();
    let log_cell: alloc::vec::Vec<f64> = (0..grid.len() - 1).map(|i| weight.log_phi(grid.midpoint(i), t)).collect();
    let a: alloc::vec::Vec<f64> = grid.nodes().map(|r| profile.eval(r)).collect();
    let (u, ut, utt) = (&sample.u, &sample.u_t, &sample.u_tt);
    let dr = grid.dr();
    let node = |g: &dyn Fn(usize) -> f64| log_weighted_integral(grid, g, |i| log_node[i]);
    let cell = |f: &[f64]| {
        log_weighted_cell_integral(
            grid,
            |i| {
                let d = (f[i + 1] - f[i]) / dr;
                d * d
            },
            |i| log_cell[i],
        )
    };
    let s2 = (1.0 + t) * (1.0 + t);

    let grad_sq = [cell(u)?, cell(ut)?, cell(utt)?];
    let weighted_u_sq = [
        node(&|i| a[i] * u[i] * u[i])?,
        node(&|i| a[i] * ut[i] * ut[i])?,
        node(&|i| a[i] * utt[i] * utt[i])?,
    ];
    let kinetic = node(&|i| ut[i] * ut[i])?;
    let e2 = node(&|i| 2.0 * u[i] * ut[i] + a[i] * u[i] * u[i])?;
    let f = node(&|i| (a[i] + potential.value(grid.node(i)) / s2) * ut[i] * ut[i])?;
    Ok(EnergyRecord { t, e1: grad_sq[0] + kinetic, e2, f, weighted_u_sq, grad_sq })
}

fn check_dirichlet(u: &[f64]) -> Result<()> {
    if u[0] != 0.0 || u[u.len() - 1] != 0.0 {
        return Err(Error::InvalidData("trial function must vanish at both ends"));
    }
    Ok(())
}

/// `(β/(1+t)) ∫ a u² Φ dx / ∫ |∇u|² Φ dx`, 0 for `u ≡ 0`.
pub fn hardy_check(grid: &RadialGrid, u: &[f64], t: f64, weight: &WeightParams<'_>) -> Result<f64> {
    grid.check(u.len())?;
    check_dirichlet(u)?;
    let profile = weight.potential().profile();
    let lhs = log_weighted_integral(grid, |i| profile.eval(grid.node(i)) * u[i] * u[i], |i| weight.log_phi(grid.node(i), t))?
        * weight.beta()
        / (1.0 + t);
    let rhs = log_weighted_cell_integral(
        grid,
        |i| {
            let d = (u[i + 1] - u[i]) / grid.dr();
            d * d
        },
        |i| weight.log_phi(grid.midpoint(i), t),
    )?;
    if rhs == 0.0 {
        return Ok(0.0);
    }
    Ok(lhs / rhs)
}

/// `q* = 2(N-α)/(N-2)` for `N >= 3`; `None` for `N = 2`.
pub fn critical_exponent(dim: usize, alpha: f64) -> Option<f64> {
    if dim >= 3 {
        Some(2.0 * (dim as f64 - alpha) / (dim as f64 - 2.0))
    } else {
        None
    }
}

/// Exponent used for the two-dimensional interpolation inequality.
pub const PLANAR_EMBEDDING_Q: f64 = 4.0;

/// For `N >= 3`: `‖u‖_{L^{q*}_{dμ}} / ‖∇u‖_{L²}`. For `N = 2`:
/// `‖u‖_{L^q_{dμ}} / (‖∇u‖_{L²}^{1-2/q} ‖u‖_{L²_{dμ}}^{2/q})` with `q = 4`.
/// Zero for `u ≡ 0`.
pub fn embedding_check(grid: &RadialGrid, u: &[f64], profile: &DampingProfile) -> Result<f64> {
    grid.check(u.len())?;
    check_dirichlet(u)?;
    let grad = math::sqrt(gradient_sq_integral(grid, u)?);
    if grad == 0.0 {
        return Ok(0.0);
    }
    match critical_exponent(grid.dim(), profile.alpha()) {
        Some(q) => Ok(norm_dmu(grid, u, profile, q)? / grad),
        None => {
            let q = PLANAR_EMBEDDING_Q;
            let lq = norm_dmu(grid, u, profile, q)?;
            let l2 = norm_dmu(grid, u, profile, 2.0)?;
            Ok(lq / (math::powf(grad, 1.0 - 2.0 / q) * math::powf(l2, 2.0 / q)))
        }
    }
}

/// `‖√a (u - v)‖_{L²}`.
pub fn diffusion_difference(grid: &RadialGrid, u: &[f64], v: &[f64], profile: &DampingProfile) -> Result<f64> {
    grid.check(u.len())?;
    grid.check(v.len())?;
    let d = Field::from_vec(u.iter().zip(v).map(|(a, b)| a - b).collect());
    norm_dmu(grid, &d, profile, 2.0)
}
