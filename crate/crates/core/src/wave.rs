//! Semi-implicit leapfrog for the radial damped wave equation
//! `u_tt - Δu + a(r) u_t = 0` with Dirichlet conditions at both ends.
//!
//! The update solved pointwise for `u^{n+1}` is
//! `(u^{n+1} - 2u^n + u^{n-1})/dt² = Δ_h u^n - a (u^{n+1} - u^{n-1})/(2dt)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::coefficients::DampingProfile;
use crate::error::{check_param, Error, Result};
use crate::grid::{gradient_sq_integral, weighted_integral, Field, RadialGrid};
use crate::math;

/// Largest admissible ratio `dt / dr`.
pub const CFL_LIMIT: f64 = 0.5;

/// `exp(-1/(1-s²))` on `|s| < 1`, zero elsewhere.
pub fn bump(s: f64) -> f64 {
    if math::abs(s) >= 1.0 {
        0.0
    } else {
        math::exp(-1.0 / (1.0 - s * s))
    }
}

/// Initial data `(u₀, u₁)` supported in `[r₀, R₀]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData {
    pub u0: Field,
    pub u1: Field,
    pub support_radius: f64,
}

impl CauchyData {
    pub fn new(grid: &RadialGrid, u0: Field, u1: Field, support_radius: f64) -> Result<Self> {
        grid.check(u0.len())?;
        grid.check(u1.len())?;
        check_param("R0", support_radius, support_radius > grid.r_min(), "support radius must exceed r_min")?;
        if u0[0] != 0.0 || u1[0] != 0.0 {
            return Err(Error::InvalidData("data must vanish on the obstacle boundary"));
        }
        let outside = grid.first_index_beyond(support_radius);
        if u0[outside..].iter().chain(u1[outside..].iter()).any(|&v| v != 0.0) {
            return Err(Error::InvalidData("data must vanish beyond the support radius"));
        }
        if !(u0.is_finite() && u1.is_finite()) {
            return Err(Error::InvalidData("data must be finite"));
        }
        Ok(Self { u0, u1, support_radius })
    }

    /// `u₀ = amplitude · bump((r - r₀ - w)/w)`, `u₁ = velocity · bump(…)`,
    /// `w = (R₀ - r₀)/2`.
    pub fn canonical(grid: &RadialGrid, support_radius: f64, amplitude: f64, velocity: f64) -> Result<Self> {
        check_param("R0", support_radius, support_radius > grid.r_min(), "support radius must exceed r_min")?;
        let w = 0.5 * (support_radius - grid.r_min());
        let centre = grid.r_min() + w;
        let shape = Field::from_fn(grid, |r| bump((r - centre) / w));
        Self::new(grid, shape.scaled(amplitude), shape.scaled(velocity), support_radius)
    }

    pub fn zero(grid: &RadialGrid, support_radius: f64) -> Result<Self> {
        Self::new(grid, Field::zeros(grid), Field::zeros(grid), support_radius)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { u0: self.u0.scaled(c), u1: self.u1.scaled(c), support_radius: self.support_radius }
    }
}

/// Two consecutive time levels of the scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    /// Time of `u`.
    pub t: f64,
    /// Number of steps taken to reach `t`.
    pub level: usize,
    pub u: Field,
    /// `u` at `t - dt`.
    pub u_prev: Field,
    pub dt: f64,
    scratch: Field,
}

impl WaveState {
    /// Backward difference `(u - u_prev)/dt`.
    pub fn backward_velocity(&self) -> Field {
        Field::from_vec(self.u.iter().zip(self.u_prev.iter()).map(|(a, b)| (a - b) / self.dt).collect())
    }
}

/// Solution data at a sample time, with second-order centred time derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSample {
    pub t: f64,
    pub u: Field,
    pub u_t: Field,
    pub u_tt: Field,
    /// Conserved leapfrog energy `E^{n+1/2}` of the step leaving `t`.
    pub leapfrog_energy: f64,
}

/// Relative mass found outside the light cone `r > R₀ + t + 2dr`.
///
/// The check is made at sample times. The step-by-step maximum is kept as
/// well: the scheme's dispersive precursor puts a small amount of mass just
/// ahead of the front while the front still carries a large share of it.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SupportMonitor {
    pub max_ratio: f64,
    pub worst_time: f64,
    pub max_step_ratio: f64,
}

impl SupportMonitor {
    /// `Σ_{r_i > R₀+t+2dr} u_i² / Σ u_i²`, zero for the zero field.
    pub fn ratio(grid: &RadialGrid, u: &[f64], support_radius: f64, t: f64) -> f64 {
        let start = grid.first_index_beyond(support_radius + t + 2.0 * grid.dr());
        let total: f64 = u.iter().map(|v| v * v).sum();
        if total == 0.0 {
            return 0.0;
        }
        let tail: f64 = u[start..].iter().map(|v| v * v).sum();
        tail / total
    }

    pub fn observe_sample(&mut self, ratio: f64, t: f64) {
        if ratio > self.max_ratio {
            self.max_ratio = ratio;
            self.worst_time = t;
        }
    }

    pub fn observe_step(&mut self, ratio: f64) {
        self.max_step_ratio = self.max_step_ratio.max(ratio);
    }

    pub fn passes(&self, threshold: f64) -> bool {
        self.max_ratio <= threshold
    }
}

#[derive(Debug, Clone)]
pub struct WaveSolver<'g> {
    grid: &'g RadialGrid,
    damping: Vec<f64>,
    dt: f64,
    weights: Vec<f64>,
}

impl<'g> WaveSolver<'g> {
    /// `damping` holds `a(r_i)` (any nonnegative values).
    pub fn new(grid: &'g RadialGrid, damping: Field, dt: f64) -> Result<Self> {
        grid.check(damping.len())?;
        check_param("dt", dt, dt > 0.0, "time step must be positive")?;
        let limit = CFL_LIMIT * grid.dr();
        if dt > limit {
            return Err(Error::Cfl { dt, limit });
        }
        if damping.iter().any(|&a| !(a >= 0.0 && a.is_finite())) {
            return Err(Error::InvalidData("damping must be finite and nonnegative"));
        }
        Ok(Self { grid, damping: damping.into_vec(), dt, weights: grid.symmetrizing_weights() })
    }

    pub fn from_profile(grid: &'g RadialGrid, profile: &DampingProfile, dt: f64) -> Result<Self> {
        Self::new(grid, profile.sample(grid), dt)
    }

    pub fn undamped(grid: &'g RadialGrid, dt: f64) -> Result<Self> {
        Self::new(grid, Field::zeros(grid), dt)
    }

    pub fn grid(&self) -> &'g RadialGrid {
        self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// State at `t = 0` with the Taylor start
    /// `u^{-1} = u₀ - dt u₁ + dt²/2 (Δ_h u₀ - a u₁)`.
    pub fn initial_state(&self, data: &CauchyData) -> Result<WaveState> {
        self.grid.check(data.u0.len())?;
        let g = self.grid;
        let n = g.len();
        let dt = self.dt;
        let mut u_prev = vec![0.0; n];
        for i in 1..n - 1 {
            let lap = g.upper(i) * data.u0[i + 1] + g.diag() * data.u0[i] + g.lower(i) * data.u0[i - 1];
            u_prev[i] = data.u0[i] - dt * data.u1[i] + 0.5 * dt * dt * (lap - self.damping[i] * data.u1[i]);
        }
        Ok(WaveState {
            t: 0.0,
            level: 0,
            u: data.u0.clone().with_dirichlet(),
            u_prev: Field::from_vec(u_prev),
            dt,
            scratch: Field::zeros(g),
        })
    }

    /// Advance one step in place.
    pub fn step(&self, state: &mut WaveState) {
        let g = self.grid;
        let n = g.len();
        let dt2 = self.dt * self.dt;
        let diag = g.diag();
        let u = &state.u;
        let p = &state.u_prev;
        let next = &mut state.scratch;
        next[0] = 0.0;
        next[n - 1] = 0.0;
        for i in 1..n - 1 {
            let lap = g.upper(i) * u[i + 1] + diag * u[i] + g.lower(i) * u[i - 1];
            let c = 0.5 * self.damping[i] * self.dt;
            next[i] = (2.0 * u[i] - (1.0 - c) * p[i] + dt2 * lap) / (1.0 + c);
        }
        core::mem::swap(&mut state.u_prev, &mut state.u);
        core::mem::swap(&mut state.u, next);
        state.level += 1;
        state.t = state.level as f64 * self.dt;
    }

    /// `‖(y - x)/dt‖²_w + B(x, y)` with `B(x, y) = -⟨Δ_h x, y⟩_w`; exactly
    /// conserved by the undamped scheme for `(x, y) = (u^n, u^{n+1})`.
    pub fn leapfrog_energy(&self, x: &[f64], y: &[f64]) -> f64 {
        let g = self.grid;
        let n = g.len();
        let mut kinetic = 0.0;
        let mut potential = 0.0;
        for i in 1..n - 1 {
            let v = (y[i] - x[i]) / self.dt;
            let lap = g.upper(i) * x[i + 1] + g.diag() * x[i] + g.lower(i) * x[i - 1];
            kinetic += self.weights[i] * v * v;
            potential -= self.weights[i] * lap * y[i];
        }
        g.sphere_area() * g.dr() * (kinetic + potential)
    }

    /// `2 ∫ a v² dx` in the same discrete inner product as [`Self::leapfrog_energy`].
    pub fn dissipation(&self, v: &[f64]) -> f64 {
        let g = self.grid;
        let s: f64 = (1..g.len() - 1).map(|i| self.weights[i] * self.damping[i] * v[i] * v[i]).sum();
        2.0 * g.sphere_area() * g.dr() * s
    }
}

/// `∫ (|∇u|² + u_t²) dx`.
pub fn plain_energy(grid: &RadialGrid, u: &[f64], u_t: &[f64]) -> Result<f64> {
    let ones = vec![1.0; grid.len()];
    Ok(gradient_sq_integral(grid, u)? + weighted_integral(grid, &field_sq(u_t), &ones)?)
}

fn field_sq(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x * x).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveRun {
    pub samples: Vec<WaveSample>,
    pub monitor: SupportMonitor,
    pub steps: usize,
}

/// Integrate to `T` and record samples at the step levels nearest to
/// `sample_times` (each in `[0, T]`). Requires `r_max > R₀ + T`.
pub fn run_wave(solver: &WaveSolver<'_>, data: &CauchyData, t_final: f64, sample_times: &[f64]) -> Result<WaveRun> {
    let g = solver.grid();
    check_param("T", t_final, t_final >= 0.0, "final time must be nonnegative")?;
    if g.r_max() <= data.support_radius + t_final {
        return Err(Error::InvalidParameter {
            name: "r_max",
            value: g.r_max(),
            reason: "outer boundary must lie beyond R0 + T",
        });
    }
    let dt = solver.dt();
    let mut levels = Vec::with_capacity(sample_times.len());
    for &t in sample_times {
        check_param("sample time", t, (0.0..=t_final).contains(&t), "sample times must lie in [0, T]")?;
        levels.push(math::round(t / dt) as usize);
    }
    levels.sort_unstable();
    levels.dedup();
    let last = levels.last().copied().unwrap_or(0);
    let total = (math::round(t_final / dt) as usize).max(last + 1);

    let mut state = solver.initial_state(data)?;
    let mut monitor = SupportMonitor::default();
    monitor.observe_step(SupportMonitor::ratio(g, &state.u, data.support_radius, 0.0));
    let mut samples = Vec::with_capacity(levels.len());
    let mut pending = levels.iter().peekable();
    while state.level < total {
        let sampling = pending.peek().is_some_and(|&&m| m == state.level);
        let older = if sampling { Some(state.u_prev.clone()) } else { None };
        solver.step(&mut state);
        monitor.observe_step(SupportMonitor::ratio(g, &state.u, data.support_radius, state.t));
        if let Some(older) = older {
            pending.next();
            let mid = &state.u_prev;
            let newer = &state.u;
            let u_t = Field::from_vec((0..g.len()).map(|i| (newer[i] - older[i]) / (2.0 * dt)).collect());
            let u_tt =
                Field::from_vec((0..g.len()).map(|i| (newer[i] - 2.0 * mid[i] + older[i]) / (dt * dt)).collect());
            if !(u_t.is_finite() && u_tt.is_finite()) {
                return Err(Error::NonFinite("wave solution"));
            }
            let t = (state.level - 1) as f64 * dt;
            monitor.observe_sample(SupportMonitor::ratio(g, mid, data.support_radius, t), t);
            samples.push(WaveSample {
                t,
                u: mid.clone(),
                u_t,
                u_tt,
                leapfrog_energy: solver.leapfrog_energy(mid, newer),
            });
        }
    }
    Ok(WaveRun { samples, monitor, steps: state.level })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bump_shape() {
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(-1.5), 0.0);
        assert_relative_eq!(bump(0.0), (-1.0f64).exp());
    }

    #[test]
    fn canonical_data_respects_support() {
        let g = RadialGrid::new(1.0, 10.0, 901, 3).unwrap();
        let d = CauchyData::canonical(&g, 3.0, 1.0, 0.0).unwrap();
        assert_eq!(d.u0[0], 0.0);
        assert!(d.u0.iter().zip(g.nodes()).all(|(&v, r)| r < 3.0 || v == 0.0));
        assert_relative_eq!(d.u0[100], (-1.0f64).exp(), max_relative = 1e-12);
        let bad = Field::from_fn(&g, |r| if r > 1.0 { 1.0 } else { 0.0 });
        assert!(CauchyData::new(&g, bad, Field::zeros(&g), 3.0).is_err());
    }

    #[test]
    fn cfl_is_enforced() {
        let g = RadialGrid::new(1.0, 2.0, 11, 3).unwrap();
        assert!(matches!(WaveSolver::undamped(&g, 0.051), Err(Error::Cfl { .. })));
        assert!(WaveSolver::undamped(&g, 0.05).is_ok());
    }

    #[test]
    fn zero_data_stays_zero() {
        let g = RadialGrid::new(1.0, 20.0, 191, 3).unwrap();
        let p = DampingProfile::pure_power(1.0, 0.0).unwrap();
        let s = WaveSolver::from_profile(&g, &p, 0.05).unwrap();
        let run = run_wave(&s, &CauchyData::zero(&g, 3.0).unwrap(), 10.0, &[0.0, 5.0, 10.0]).unwrap();
        assert_eq!(run.samples.len(), 3);
        assert!(run.samples.iter().all(|x| x.u.max_abs() == 0.0));
    }

    #[test]
    fn zero_final_time_returns_initial_data() {
        let g = RadialGrid::new(1.0, 10.0, 181, 3).unwrap();
        let s = WaveSolver::undamped(&g, 0.025).unwrap();
        let d = CauchyData::canonical(&g, 3.0, 1.0, 0.0).unwrap();
        let run = run_wave(&s, &d, 0.0, &[0.0]).unwrap();
        assert_eq!(run.samples.len(), 1);
        assert_eq!(run.samples[0].t, 0.0);
        assert_eq!(run.samples[0].u, d.u0);
    }

    #[test]
    fn leapfrog_energy_is_conserved_without_damping() {
        let g = RadialGrid::new(1.0, 16.0, 1501, 3).unwrap();
        let s = WaveSolver::undamped(&g, 0.005).unwrap();
        let d = CauchyData::canonical(&g, 3.0, 1.0, 0.5).unwrap();
        let times: Vec<f64> = (0..=10).map(|k| k as f64).collect();
        let run = run_wave(&s, &d, 10.0, &times).unwrap();
        let e0 = run.samples[0].leapfrog_energy;
        for x in &run.samples {
            assert!(((x.leapfrog_energy - e0) / e0).abs() <= 1e-6);
        }
    }

    #[test]
    fn damped_run_stays_inside_light_cone() {
        let g = RadialGrid::with_spacing(1.0, 45.0, 0.1, 3).unwrap();
        let p = DampingProfile::pure_power(1.0, 0.0).unwrap();
        let s = WaveSolver::from_profile(&g, &p, 0.05).unwrap();
        let d = CauchyData::canonical(&g, 3.0, 1.0, 0.0).unwrap();
        let run = run_wave(&s, &d, 40.0, &[30.0, 40.0]).unwrap();
        assert!(run.monitor.passes(1e-12), "{:?}", run.monitor);
        let doubled = run_wave(&s, &d.scaled(2.0), 40.0, &[40.0]).unwrap();
        for (a, b) in run.samples[1].u.iter().zip(doubled.samples[0].u.iter()) {
            assert!((2.0 * a - b).abs() <= 1e-14 * b.abs().max(1e-300));
        }
    }

    #[test]
    fn damped_energy_decreases_by_dissipation() {
        let g = RadialGrid::new(1.0, 16.0, 1501, 3).unwrap();
        let p = DampingProfile::pure_power(1.0, 0.0).unwrap();
        let s = WaveSolver::from_profile(&g, &p, 0.005).unwrap();
        let d = CauchyData::canonical(&g, 3.0, 1.0, 0.0).unwrap();
        let mut st = s.initial_state(&d).unwrap();
        for _ in 0..200 {
            s.step(&mut st);
        }
        let older = st.u_prev.clone();
        let e_before = s.leapfrog_energy(&st.u_prev, &st.u);
        s.step(&mut st);
        let e_after = s.leapfrog_energy(&st.u_prev, &st.u);
        let v: Vec<f64> = (0..g.len()).map(|i| (st.u[i] - older[i]) / (2.0 * s.dt())).collect();
        let predicted = -s.dissipation(&v) * s.dt();
        assert!(e_after < e_before);
        assert_relative_eq!(e_after - e_before, predicted, max_relative = 1e-10);
    }
}
