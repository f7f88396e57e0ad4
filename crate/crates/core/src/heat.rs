//! θ-scheme for the degenerate heat equation `v_t = a(r)^{-1} Δv` with
//! Dirichlet conditions, realizing the semigroup `e^{tL}`.

use alloc::vec;
use alloc::vec::Vec;

use crate::coefficients::DampingProfile;
use crate::error::{check_param, Error, Result};
use crate::grid::{apply_laplacian, norm_dmu, Field, RadialGrid};
use crate::math;
use crate::tridiag::Tridiagonal;

/// Ratio `|v(r_max - dr)| / max|v|` above which a run counts as truncated.
pub const TRUNCATION_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theta {
    /// `θ = 1`: inverse-positive step matrix for any `dt`.
    BackwardEuler,
    /// `θ = 1/2`: second order in time.
    CrankNicolson,
}

impl Theta {
    pub fn value(self) -> f64 {
        match self {
            Theta::BackwardEuler => 1.0,
            Theta::CrankNicolson => 0.5,
        }
    }

    pub fn from_value(theta: f64) -> Result<Self> {
        if theta == 1.0 {
            Ok(Theta::BackwardEuler)
        } else if theta == 0.5 {
            Ok(Theta::CrankNicolson)
        } else {
            Err(Error::InvalidParameter { name: "theta", value: theta, reason: "theta must be 0.5 or 1" })
        }
    }
}

/// Geometric step growth `dt_{k+1} = growth · dt_k`, capped at `cap · (1 + t)`.
/// Steps are shortened to land exactly on requested output times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSchedule {
    pub initial: f64,
    pub growth: f64,
    pub cap: f64,
}

impl Default for StepSchedule {
    fn default() -> Self {
        Self { initial: 1e-3, growth: 1.05, cap: 0.05 }
    }
}

impl StepSchedule {
    pub fn fixed(dt: f64) -> Self {
        Self { initial: dt, growth: 1.0, cap: f64::INFINITY }
    }

    pub fn with_cap(cap: f64) -> Self {
        Self { cap, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        check_param("dt", self.initial, self.initial > 0.0, "initial step must be positive")?;
        check_param("growth", self.growth, self.growth >= 1.0, "step growth must be >= 1")?;
        if !(self.cap > 0.0) {
            return Err(Error::InvalidParameter { name: "cap", value: self.cap, reason: "step cap must be positive" });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatState {
    pub t: f64,
    pub v: Field,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatRun {
    /// One state per requested output time, in increasing time order.
    pub states: Vec<HeatState>,
    /// Largest `|v(r_max - dr)| / max|v|` seen over all steps.
    pub boundary_ratio: f64,
    pub steps: usize,
}

impl HeatRun {
    pub fn truncated(&self) -> bool {
        self.boundary_ratio > TRUNCATION_LIMIT
    }
}

#[derive(Debug, Clone)]
pub struct HeatSolver<'g> {
    grid: &'g RadialGrid,
    damping: Vec<f64>,
    theta: Theta,
}

struct Workspace {
    matrix: Tridiagonal,
    rhs: Vec<f64>,
    lap: Vec<f64>,
    scratch: Vec<f64>,
    dt: f64,
}

impl<'g> HeatSolver<'g> {
    /// `damping` holds `a(r_i) > 0`. Requires `dr <= 2 r_min/(N-1)` so the
    /// off-diagonal stencil coefficients are nonnegative.
    pub fn new(grid: &'g RadialGrid, damping: Field, theta: Theta) -> Result<Self> {
        grid.check(damping.len())?;
        if damping.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidData("damping must be finite and positive"));
        }
        let limit = 2.0 * grid.r_min() / (grid.dim() as f64 - 1.0);
        check_param("dr", grid.dr(), grid.dr() <= limit, "spacing must satisfy dr <= 2 r_min/(N-1)")?;
        Ok(Self { grid, damping: damping.into_vec(), theta })
    }

    pub fn from_profile(grid: &'g RadialGrid, profile: &DampingProfile, theta: Theta) -> Result<Self> {
        Self::new(grid, profile.sample(grid), theta)
    }

    pub fn grid(&self) -> &'g RadialGrid {
        self.grid
    }

    pub fn theta(&self) -> Theta {
        self.theta
    }

    pub fn damping(&self) -> &[f64] {
        &self.damping
    }

    /// `L_h v = a^{-1} Δ_h v` (zero on the boundary rows).
    pub fn apply_operator(&self, v: &[f64]) -> Result<Field> {
        self.grid.check(v.len())?;
        let mut out = Field::zeros(self.grid);
        apply_laplacian(self.grid, v, &mut out);
        for (o, a) in out.iter_mut().zip(&self.damping) {
            *o /= a;
        }
        Ok(out)
    }

    /// `‖v‖_{L²_{dμ}}` with the solver's own damping values.
    pub fn norm(&self, v: &[f64]) -> f64 {
        let g = self.grid;
        let s: f64 = (0..g.len()).map(|i| v[i] * v[i] * self.damping[i] * g.trapezoid_weight(i)).sum();
        math::sqrt(g.sphere_area() * s)
    }

    fn workspace(&self) -> Workspace {
        let n = self.grid.len();
        Workspace {
            matrix: Tridiagonal { lower: vec![0.0; n], diag: vec![1.0; n], upper: vec![0.0; n] },
            rhs: vec![0.0; n],
            lap: vec![0.0; n],
            scratch: vec![0.0; n],
            dt: f64::NAN,
        }
    }

    fn assemble(&self, ws: &mut Workspace, dt: f64) {
        if ws.dt == dt {
            return;
        }
        let g = self.grid;
        let n = g.len();
        let th = self.theta.value() * dt;
        for i in 1..n - 1 {
            let s = th / self.damping[i];
            ws.matrix.lower[i] = -s * g.lower(i);
            ws.matrix.diag[i] = 1.0 - s * g.diag();
            ws.matrix.upper[i] = -s * g.upper(i);
        }
        ws.dt = dt;
    }

    fn advance(&self, v: &mut [f64], dt: f64, ws: &mut Workspace) -> Result<()> {
        self.assemble(ws, dt);
        let explicit = (1.0 - self.theta.value()) * dt;
        if explicit > 0.0 {
            apply_laplacian(self.grid, v, &mut ws.lap);
            for i in 0..v.len() {
                ws.rhs[i] = v[i] + explicit * ws.lap[i] / self.damping[i];
            }
        } else {
            ws.rhs.copy_from_slice(v);
        }
        let n = v.len();
        ws.rhs[0] = 0.0;
        ws.rhs[n - 1] = 0.0;
        ws.matrix.solve_in_place(&mut ws.rhs, &mut ws.scratch)?;
        v.copy_from_slice(&ws.rhs);
        Ok(())
    }

    /// One step of length `dt` from `state`.
    pub fn step(&self, state: &HeatState, dt: f64) -> Result<HeatState> {
        check_param("dt", dt, dt > 0.0, "time step must be positive")?;
        self.grid.check(state.v.len())?;
        let mut v = state.v.clone();
        let mut ws = self.workspace();
        self.advance(&mut v, dt, &mut ws)?;
        Ok(HeatState { t: state.t + dt, v })
    }

    /// Evolve `f` and record it at each of `output_times` (nonnegative,
    /// sorted ascending).
    pub fn run(&self, f: &[f64], schedule: &StepSchedule, output_times: &[f64]) -> Result<HeatRun> {
        self.grid.check(f.len())?;
        schedule.validate()?;
        for w in output_times.windows(2) {
            if !(w[1] >= w[0]) {
                return Err(Error::InvalidParameter { name: "times", value: w[1], reason: "output times must ascend" });
            }
        }
        if let Some(&first) = output_times.first() {
            check_param("t", first, first >= 0.0, "output times must be nonnegative")?;
        }
        let n = self.grid.len();
        let mut v = Field::from_vec(f.to_vec()).with_dirichlet();
        let mut ws = self.workspace();
        let mut t = 0.0_f64;
        let mut nominal = schedule.initial;
        let mut steps = 0;
        let mut boundary_ratio = boundary_ratio(&v, n);
        let mut states = Vec::with_capacity(output_times.len());
        for &target in output_times {
            while t < target {
                let remaining = target - t;
                let dt = if nominal >= remaining * (1.0 - 1e-12) { remaining } else { nominal };
                self.advance(&mut v, dt, &mut ws)?;
                t = if dt == remaining { target } else { t + dt };
                steps += 1;
                boundary_ratio = boundary_ratio.max(self::boundary_ratio(&v, n));
                nominal = (nominal * schedule.growth).min(schedule.cap * (1.0 + t));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("heat solution"));
            }
            states.push(HeatState { t: target, v: v.clone() });
        }
        Ok(HeatRun { states, boundary_ratio, steps })
    }
}

fn boundary_ratio(v: &[f64], n: usize) -> f64 {
    let max = v.iter().fold(0.0_f64, |m, x| m.max(math::abs(*x)));
    if max == 0.0 {
        0.0
    } else {
        math::abs(v[n - 2]) / max
    }
}

/// `e^{tL} f` by composing steps of `schedule`.
pub fn semigroup_apply(solver: &HeatSolver<'_>, f: &[f64], t: f64, schedule: &StepSchedule) -> Result<HeatRun> {
    check_param("t", t, t >= 0.0, "time must be nonnegative")?;
    solver.run(f, schedule, &[t])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    pub times: Vec<f64>,
    /// `‖v(t)‖ / ‖f‖` in `L²_{dμ}`.
    pub norm_ratios: Vec<f64>,
    /// `t ‖L v(t)‖ / ‖f‖` in `L²_{dμ}`.
    pub smoothing_ratios: Vec<f64>,
    pub truncated: bool,
}

impl ContractionReport {
    pub fn max_norm_ratio(&self) -> f64 {
        self.norm_ratios.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_smoothing_ratio(&self) -> f64 {
        self.smoothing_ratios.iter().copied().fold(0.0, f64::max)
    }

    pub fn passes(&self) -> bool {
        self.max_norm_ratio() <= 1.0 + 1e-10 && self.max_smoothing_ratio() <= 1.1 && !self.truncated
    }
}

pub fn contraction_check(
    solver: &HeatSolver<'_>,
    f: &[f64],
    times: &[f64],
    schedule: &StepSchedule,
) -> Result<ContractionReport> {
    let f_norm = solver.norm(f);
    if f_norm == 0.0 {
        return Err(Error::InvalidData("contraction check needs nonzero data"));
    }
    let run = solver.run(f, schedule, times)?;
    let mut norm_ratios = Vec::with_capacity(times.len());
    let mut smoothing_ratios = Vec::with_capacity(times.len());
    for s in &run.states {
        norm_ratios.push(solver.norm(&s.v) / f_norm);
        if s.t > 0.0 {
            smoothing_ratios.push(s.t * solver.norm(&solver.apply_operator(&s.v)?) / f_norm);
        }
    }
    Ok(ContractionReport { times: times.to_vec(), norm_ratios, smoothing_ratios, truncated: run.truncated() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubMarkovReport {
    pub times: Vec<f64>,
    pub min_values: Vec<f64>,
    /// `‖v(t)‖_∞ / ‖f‖_∞`.
    pub sup_ratios: Vec<f64>,
    /// Positivity is only asserted for nonnegative data.
    pub nonnegative_data: bool,
}

impl SubMarkovReport {
    pub fn min_value(&self) -> f64 {
        self.min_values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_sup_ratio(&self) -> f64 {
        self.sup_ratios.iter().copied().fold(0.0, f64::max)
    }

    pub fn passes(&self) -> bool {
        let positive = !self.nonnegative_data || self.min_value() >= -1e-12;
        positive && self.max_sup_ratio() <= 1.0 + 1e-10
    }
}

/// Positivity and `L^∞` contraction of backward-Euler steps.
pub fn submarkov_check(
    solver: &HeatSolver<'_>,
    f: &[f64],
    times: &[f64],
    schedule: &StepSchedule,
) -> Result<SubMarkovReport> {
    if solver.theta() != Theta::BackwardEuler {
        return Err(Error::InvalidParameter { name: "theta", value: solver.theta().value(), reason: "requires theta = 1" });
    }
    let sup = f.iter().fold(0.0_f64, |m, x| m.max(math::abs(*x)));
    if sup == 0.0 {
        return Err(Error::InvalidData("sub-Markov check needs nonzero data"));
    }
    let run = solver.run(f, schedule, times)?;
    Ok(SubMarkovReport {
        times: times.to_vec(),
        min_values: run.states.iter().map(|s| s.v.min()).collect(),
        sup_ratios: run.states.iter().map(|s| s.v.max_abs() / sup).collect(),
        nonnegative_data: f.iter().all(|&x| x >= 0.0),
    })
}

/// `‖√a v‖_{L²}` at every state of a run.
pub fn norm_series(run: &HeatRun, grid: &RadialGrid, profile: &DampingProfile) -> Result<Vec<(f64, f64)>> {
    run.states.iter().map(|s| Ok((s.t, norm_dmu(grid, &s.v, profile, 2.0)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::bump;

    fn setup(dim: usize) -> (RadialGrid, DampingProfile) {
        (RadialGrid::new(1.0, 30.0, 1161, dim).unwrap(), DampingProfile::pure_power(1.0, 0.0).unwrap())
    }

    fn bump_data(g: &RadialGrid) -> Field {
        Field::from_fn(g, |r| bump(r - 2.0))
    }

    #[test]
    fn zero_stays_zero() {
        let (g, p) = setup(3);
        let s = HeatSolver::from_profile(&g, &p, Theta::CrankNicolson).unwrap();
        let run = s.run(&Field::zeros(&g), &StepSchedule::default(), &[1.0, 5.0]).unwrap();
        assert!(run.states.iter().all(|x| x.v.max_abs() == 0.0));
    }

    #[test]
    fn time_zero_is_identity() {
        let (g, p) = setup(3);
        let s = HeatSolver::from_profile(&g, &p, Theta::BackwardEuler).unwrap();
        let f = bump_data(&g);
        let run = semigroup_apply(&s, &f, 0.0, &StepSchedule::default()).unwrap();
        assert_eq!(run.states[0].v, f);
        assert_eq!(run.steps, 0);
    }

    #[test]
    fn lands_on_output_times() {
        let (g, p) = setup(3);
        let s = HeatSolver::from_profile(&g, &p, Theta::BackwardEuler).unwrap();
        let times = [0.3, 1.0, 7.25];
        let run = s.run(&bump_data(&g), &StepSchedule::default(), &times).unwrap();
        for (st, t) in run.states.iter().zip(times) {
            assert_eq!(st.t, t);
        }
    }

    #[test]
    fn rejects_coarse_grid() {
        let g = RadialGrid::new(1.0, 30.0, 11, 4).unwrap();
        let p = DampingProfile::pure_power(1.0, 0.0).unwrap();
        assert!(HeatSolver::from_profile(&g, &p, Theta::BackwardEuler).is_err());
    }

    #[test]
    fn contraction_and_smoothing() {
        for dim in [2, 3] {
            let (g, p) = setup(dim);
            for theta in [Theta::BackwardEuler, Theta::CrankNicolson] {
                let s = HeatSolver::from_profile(&g, &p, theta).unwrap();
                let rep = contraction_check(&s, &bump_data(&g), &[0.5, 1.0, 4.0, 16.0], &StepSchedule::default()).unwrap();
                assert!(rep.max_norm_ratio() <= 1.0 + 1e-10, "{rep:?}");
                assert!(rep.max_smoothing_ratio() <= 1.1, "{rep:?}");
            }
        }
    }

    #[test]
    fn submarkov_for_signed_data_checks_sup_only() {
        let (g, p) = setup(3);
        let s = HeatSolver::from_profile(&g, &p, Theta::BackwardEuler).unwrap();
        let f = Field::from_fn(&g, |r| bump(r - 2.0) - bump(r - 4.0));
        let rep = submarkov_check(&s, &f, &[1.0, 10.0], &StepSchedule::default()).unwrap();
        assert!(!rep.nonnegative_data);
        assert!(rep.min_value() < 0.0);
        assert!(rep.passes());
        let cn = HeatSolver::from_profile(&g, &p, Theta::CrankNicolson).unwrap();
        assert!(submarkov_check(&cn, &f, &[1.0], &StepSchedule::default()).is_err());
    }

    #[test]
    fn backward_euler_is_monotone() {
        let (g, p) = setup(3);
        let s = HeatSolver::from_profile(&g, &p, Theta::BackwardEuler).unwrap();
        let f = bump_data(&g);
        let bigger = Field::from_fn(&g, |r| bump(r - 2.0) + 0.3 * bump(0.5 * (r - 5.0))).with_dirichlet();
        let sched = StepSchedule::with_cap(0.5);
        let a = s.run(&f, &sched, &[3.0]).unwrap();
        let b = s.run(&bigger, &sched, &[3.0]).unwrap();
        assert!(a.states[0].v.iter().zip(b.states[0].v.iter()).all(|(x, y)| x <= y));
    }
}
