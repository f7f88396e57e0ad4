//! The five experiment kinds.

use std::time::{Duration, Instant};

use anyhow::{ensure, Result};
use dampwave_core::decay::geometric_times;
use dampwave_core::heat::TRUNCATION_LIMIT;
use dampwave_core::{
    contraction_check, diffusion_difference, energy_record, expected_exponents, fit_slope, hardy_check, norm_dmu,
    norm_series, optimality_experiment, run_wave, submarkov_check, verdict, CauchyData, DampingProfile, DecaySeries,
    Field, FitWindow, HeatSolver, PotentialA, ProfileKind, RadialGrid, StepSchedule, Theta, VerdictMode, WaveRun,
    WaveSolver, WeightParams,
};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::record::{Check, Row};
use crate::report::{FitLine, Verdict};
use crate::trials;

/// Relative `ℓ²` mass allowed beyond `R₀ + t + 2dr` at sample times.
pub const SUPPORT_LIMIT: f64 = 1e-12;
pub const HEAT_TOL: f64 = 0.05;
pub const ENERGY_TOL: f64 = 0.2;
pub const DIFFUSION_TOL: f64 = 0.15;

/// `(N, α)` pairs covered by the property suite.
pub const MATRIX: [(usize, f64); 3] = [(2, 0.0), (3, 0.0), (3, 0.5)];

#[derive(Debug, Clone)]
pub struct Outcome {
    pub verdict: Verdict,
    pub rows: Vec<Row>,
    /// Only the property suite produces a check table.
    pub checks: Option<Vec<Check>>,
    /// Largest support ratio seen at any step of any wave run.
    pub wave_step_support: Option<f64>,
    /// Wall-clock time per stage; never written to disk.
    pub timings: Vec<(&'static str, Duration)>,
}

impl Outcome {
    fn new(verdict: Verdict) -> Self {
        Outcome { verdict, rows: Vec::new(), checks: None, wave_step_support: None, timings: Vec::new() }
    }

    pub fn elapsed(&self) -> Duration {
        self.timings.iter().map(|(_, d)| *d).sum()
    }
}

/// Never fails: solver errors become a failed verdict carrying the message.
pub fn run_experiment(cfg: &ExperimentConfig) -> Outcome {
    let start = Instant::now();
    let result = match cfg.experiment {
        ExperimentKind::HeatDecay => heat_decay(cfg),
        ExperimentKind::HeatOptimality => heat_optimality(cfg),
        ExperimentKind::WaveEnergy => wave_energy(cfg),
        ExperimentKind::DiffusionPhenomenon => diffusion_phenomenon(cfg),
        ExperimentKind::PropertySuite => property_suite(cfg),
    };
    let mut out = result.unwrap_or_else(|e| {
        let mut v = Verdict::new(&cfg.id, cfg.experiment, cfg.dim, cfg.alpha);
        v.error = Some(format!("{e:#}"));
        Outcome::new(v)
    });
    if out.timings.is_empty() {
        out.timings.push(("total", start.elapsed()));
    }
    out
}

fn blank(cfg: &ExperimentConfig) -> Outcome {
    Outcome::new(Verdict::new(&cfg.id, cfg.experiment, cfg.dim, cfg.alpha))
}

fn fit_line(
    series: &'static str,
    samples: &[(f64, f64)],
    window: FitWindow,
    expected: f64,
    mode: VerdictMode,
    tol: f64,
) -> FitLine {
    let fit = DecaySeries::new(series, samples.iter().copied()).and_then(|s| fit_slope(&s, window));
    match fit {
        Ok(fit) => {
            let v = verdict(&fit, expected, mode, tol);
            FitLine { series, fit: Some(fit), expected, mode, tol, rate_ok: v.passed, error: None }
        }
        Err(e) => FitLine { series, fit: None, expected, mode, tol, rate_ok: false, error: Some(e.to_string()) },
    }
}

fn check(name: &'static str, case: impl Into<String>, value: f64, limit: f64, passed: bool) -> Check {
    Check { check: name, case: case.into(), value, limit, passed }
}

/// `value <= limit`; NaN fails.
fn at_most(name: &'static str, case: impl Into<String>, value: f64, limit: f64) -> Check {
    check(name, case, value, limit, value <= limit)
}

fn at_least(name: &'static str, case: impl Into<String>, value: f64, limit: f64) -> Check {
    check(name, case, value, limit, value >= limit)
}

fn window(cfg: &ExperimentConfig) -> Result<FitWindow> {
    Ok(FitWindow::new(0.1 * cfg.t_final, cfg.t_final)?)
}

fn sample_times(cfg: &ExperimentConfig) -> Vec<f64> {
    geometric_times(cfg.first_sample(), cfg.t_final, cfg.samples)
}

/// Optimality is proven for the pure power profile only.
fn heat_mode(profile: &DampingProfile) -> VerdictMode {
    match profile.kind() {
        ProfileKind::PurePower => VerdictMode::TwoSided,
        ProfileKind::PerturbedPower { .. } => VerdictMode::UpperBound,
    }
}

/// Outer radius for heat runs to `T`: the profile spreads like
/// `r^{2-α} ~ t/a₀`, so `r_max^{2-α} = 64 T / a₀` keeps the boundary quiet.
fn heat_extent(cfg: &ExperimentConfig) -> f64 {
    (64.0 * cfg.t_final / cfg.a0).powf(1.0 / (2.0 - cfg.alpha)).max(cfg.support_radius + 10.0)
}

fn theta(cfg: &ExperimentConfig) -> Result<Theta> {
    Ok(Theta::from_value(cfg.theta)?)
}

fn schedule(cfg: &ExperimentConfig) -> StepSchedule {
    StepSchedule::with_cap(cfg.dt_cap)
}

/// `v₀ = u₀ + u₁/a` for the canonical data.
fn heat_data(grid: &RadialGrid, data: &CauchyData, profile: &DampingProfile) -> Field {
    Field::from_vec(grid.nodes().enumerate().map(|(i, r)| data.u0[i] + data.u1[i] / profile.eval(r)).collect())
}

fn truncation_check(boundary_ratio: f64) -> Check {
    at_most("heat_truncation", "", boundary_ratio, TRUNCATION_LIMIT)
}

fn heat_decay(cfg: &ExperimentConfig) -> Result<Outcome> {
    let profile = cfg.damping_profile();
    let expected = expected_exponents(cfg.dim, cfg.alpha)?;
    let grid = RadialGrid::with_spacing(cfg.r0, heat_extent(cfg), cfg.dr, cfg.dim)?;
    let data = CauchyData::canonical(&grid, cfg.support_radius, cfg.amplitude, cfg.velocity)?;
    let f = heat_data(&grid, &data, &profile);
    ensure!(f.max_abs() > 0.0, "initial data vanish identically");
    let solver = HeatSolver::from_profile(&grid, &profile, theta(cfg)?)?;
    let run = solver.run(&f, &schedule(cfg), &sample_times(cfg))?;
    let series = norm_series(&run, &grid, &profile)?;

    let mut out = blank(cfg);
    out.rows = series.iter().map(|&(t, n)| Row { norm_v: Some(n), ..Row::at(t) }).collect();
    out.verdict.fits.push(fit_line(
        "norm_sqrt_a_v_L2",
        &series,
        window(cfg)?,
        expected.heat_l2,
        heat_mode(&profile),
        HEAT_TOL,
    ));
    out.verdict.diagnostics.push(truncation_check(run.boundary_ratio));
    out.verdict.info.push(("heat_steps", run.steps as f64));
    Ok(out)
}

fn heat_optimality(cfg: &ExperimentConfig) -> Result<Outcome> {
    let profile = cfg.damping_profile();
    let expected = expected_exponents(cfg.dim, cfg.alpha)?;
    let grid = RadialGrid::with_spacing(cfg.r0, heat_extent(cfg), cfg.dr, cfg.dim)?;
    let report = optimality_experiment(cfg.support_radius, &profile, &grid, &sample_times(cfg), &schedule(cfg))?;

    let mut out = blank(cfg);
    out.rows = report.series.iter().map(|&(t, n)| Row { norm_v: Some(n), ..Row::at(t) }).collect();
    out.verdict.fits.push(fit_line(
        "norm_sqrt_a_v_L2",
        &report.series,
        window(cfg)?,
        expected.heat_l2,
        heat_mode(&profile),
        HEAT_TOL,
    ));
    out.verdict.diagnostics.push(at_most("heat_truncation", "", report.truncated as u8 as f64, 0.0));
    out.verdict.info.push(("t_R", report.t_r));
    out.verdict.info.push(("floor_ratio", report.floor_ratio));
    out.verdict.info.push(("comparison_min", report.comparison_min));
    Ok(out)
}

struct WaveSetup {
    grid: RadialGrid,
    profile: DampingProfile,
    data: CauchyData,
}

fn wave_setup(cfg: &ExperimentConfig, r_max: f64) -> Result<WaveSetup> {
    let profile = cfg.damping_profile();
    let grid = RadialGrid::with_spacing(cfg.r0, r_max, cfg.dr, cfg.dim)?;
    let data = CauchyData::canonical(&grid, cfg.support_radius, cfg.amplitude, cfg.velocity)?;
    Ok(WaveSetup { grid, profile, data })
}

fn support_check(run: &WaveRun, case: impl Into<String>) -> Check {
    at_most("support", case, run.monitor.max_ratio, SUPPORT_LIMIT)
}

fn wave_energy(cfg: &ExperimentConfig) -> Result<Outcome> {
    let expected = expected_exponents(cfg.dim, cfg.alpha)?;
    let s = wave_setup(cfg, cfg.support_radius + cfg.t_final + 10.0)?;
    let solver = WaveSolver::from_profile(&s.grid, &s.profile, cfg.cfl * cfg.dr)?;
    let run = run_wave(&solver, &s.data, cfg.t_final, &sample_times(cfg))?;
    let potential = PotentialA::build(&s.profile, &s.grid, cfg.eps_shift)?;
    let weight = match cfg.beta {
        Some(b) => WeightParams::new(&potential, b)?,
        None => WeightParams::with_default_beta(&potential),
    };

    let mut out = blank(cfg);
    let mut e1_increase: f64 = 0.0;
    for sample in &run.samples {
        let rec = energy_record(&s.grid, sample, &weight)?;
        if let Some(prev) = out.rows.last().and_then(|r| r.e1) {
            e1_increase = e1_increase.max((rec.e1 - prev) / prev);
        }
        out.rows.push(Row {
            norm_u: Some(norm_dmu(&s.grid, &sample.u, &s.profile, 2.0)?),
            e1: Some(rec.e1),
            e2: Some(rec.e2),
            f: Some(rec.f),
            wk: rec.weighted_u_sq.map(Some),
            gk: rec.grad_sq.map(Some),
            ..Row::at(sample.t)
        });
    }
    let w = window(cfg)?;
    const W: [&str; 3] = ["wk0", "wk1", "wk2"];
    const G: [&str; 3] = ["gk0", "gk1", "gk2"];
    for k in 0..3 {
        let wk: Vec<(f64, f64)> = out.rows.iter().map(|r| (r.t, r.wk[k].unwrap_or(f64::NAN))).collect();
        let gk: Vec<(f64, f64)> = out.rows.iter().map(|r| (r.t, r.gk[k].unwrap_or(f64::NAN))).collect();
        out.verdict.fits.push(fit_line(W[k], &wk, w, expected.energy[k], VerdictMode::UpperBound, ENERGY_TOL));
        out.verdict.fits.push(fit_line(G[k], &gk, w, expected.grad[k], VerdictMode::UpperBound, ENERGY_TOL));
    }
    out.verdict.diagnostics.push(support_check(&run, ""));
    out.verdict.info.push(("support_step_max", run.monitor.max_step_ratio));
    out.verdict.info.push(("e1_max_relative_increase", e1_increase));
    out.verdict.info.push(("beta", weight.beta()));
    out.verdict.info.push(("c0", potential.shift()));
    out.wave_step_support = Some(run.monitor.max_step_ratio);
    Ok(out)
}

fn diffusion_phenomenon(cfg: &ExperimentConfig) -> Result<Outcome> {
    let expected = expected_exponents(cfg.dim, cfg.alpha)?;
    let r_max = (cfg.support_radius + cfg.t_final + 10.0).max(heat_extent(cfg));
    let s = wave_setup(cfg, r_max)?;
    let dt = cfg.cfl * cfg.dr;
    // Shared schedule on the wave step lattice so both runs sample identical times.
    let mut times: Vec<f64> = sample_times(cfg).into_iter().map(|t| (t / dt).round() * dt).collect();
    times.dedup();
    if let Some(last) = times.last_mut() {
        *last = last.min(cfg.t_final);
    }
    let wave = WaveSolver::from_profile(&s.grid, &s.profile, dt)?;
    let run = run_wave(&wave, &s.data, cfg.t_final, &times)?;
    let heat = HeatSolver::from_profile(&s.grid, &s.profile, theta(cfg)?)?;
    let v0 = heat_data(&s.grid, &s.data, &s.profile);
    let heat_run = heat.run(&v0, &schedule(cfg), &times)?;
    ensure!(run.samples.len() == heat_run.states.len(), "wave and heat schedules disagree");

    let mut out = blank(cfg);
    let mut diff = Vec::with_capacity(times.len());
    let mut norm_v = Vec::with_capacity(times.len());
    for (w, h) in run.samples.iter().zip(&heat_run.states) {
        ensure!((w.t - h.t).abs() <= 1e-9 * w.t.max(1.0), "sample times disagree: {} vs {}", w.t, h.t);
        let d = diffusion_difference(&s.grid, &w.u, &h.v, &s.profile)?;
        let nv = norm_dmu(&s.grid, &h.v, &s.profile, 2.0)?;
        diff.push((w.t, d));
        norm_v.push((w.t, nv));
        out.rows.push(Row {
            norm_u: Some(norm_dmu(&s.grid, &w.u, &s.profile, 2.0)?),
            norm_v: Some(nv),
            diff: Some(d),
            ..Row::at(w.t)
        });
    }
    let w = window(cfg)?;
    out.verdict.fits.push(fit_line("diff_L2_dmu", &diff, w, expected.thm1_diff, VerdictMode::UpperBound, DIFFUSION_TOL));
    out.verdict.fits.push(fit_line("norm_sqrt_a_v_L2", &norm_v, w, expected.heat_l2, heat_mode(&s.profile), HEAT_TOL));
    out.verdict.diagnostics.push(support_check(&run, ""));
    out.verdict.diagnostics.push(truncation_check(heat_run.boundary_ratio));
    let gap = out.verdict.fits[1].slope() - out.verdict.fits[0].slope();
    out.verdict.info.push(("slope_gap", gap));
    out.verdict.info.push(("expected_gap", expected.thm1_diff - expected.heat_l2));
    out.verdict.info.push(("support_step_max", run.monitor.max_step_ratio));
    out.wave_step_support = Some(run.monitor.max_step_ratio);
    Ok(out)
}

fn case(dim: usize, alpha: f64) -> String {
    format!("N={dim},alpha={alpha}")
}

const HARDY_TRIALS: usize = 100;
const HARDY_TIMES: [f64; 3] = [0.0, 1.0, 10.0];
const HARDY_BOUND: f64 = 1.02;
const HARDY_REFINED_BOUND: f64 = 1.005;
/// Growth of the maximum under refinement still counted as convergence.
const HARDY_GROWTH: f64 = 1e-3;

fn hardy_max(grid: &RadialGrid, profile: &DampingProfile, eps: f64, bumps: &[trials::Bump]) -> Result<f64> {
    let potential = PotentialA::build(profile, grid, eps)?;
    let weight = WeightParams::with_default_beta(&potential);
    let mut worst: f64 = 0.0;
    for b in bumps {
        let u = b.sample(grid);
        for t in HARDY_TIMES {
            worst = worst.max(hardy_check(grid, &u, t, &weight)?);
        }
    }
    Ok(worst)
}

fn hardy_suite(cfg: &ExperimentConfig, checks: &mut Vec<Check>) -> Result<()> {
    let r_max = cfg.r0 + 11.0;
    for (k, &(dim, alpha)) in MATRIX.iter().enumerate() {
        let profile = DampingProfile::pure_power(cfg.a0, alpha)?;
        let coarse = RadialGrid::with_spacing(cfg.r0, r_max, 5e-3, dim)?;
        let fine = coarse.refined();
        let mut rng = trials::rng(cfg.seed, k as u64);
        let bumps: Vec<trials::Bump> =
            (0..HARDY_TRIALS).map(|_| trials::random_bump(&mut rng, cfg.r0, r_max, 0.3)).collect();
        let c = hardy_max(&coarse, &profile, cfg.eps_shift, &bumps)?;
        let f = hardy_max(&fine, &profile, cfg.eps_shift, &bumps)?;
        checks.push(at_most("hardy", case(dim, alpha), c, HARDY_BOUND));
        checks.push(at_most("hardy_refined", case(dim, alpha), f, HARDY_REFINED_BOUND));
        checks.push(at_most("hardy_refinement_growth", case(dim, alpha), f - c, HARDY_GROWTH));
    }
    Ok(())
}

fn submarkov_suite(cfg: &ExperimentConfig, checks: &mut Vec<Check>) -> Result<()> {
    let times = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0];
    for (k, &(dim, alpha)) in MATRIX.iter().enumerate() {
        let profile = DampingProfile::pure_power(cfg.a0, alpha)?;
        let extent = (64.0 * times[5] / cfg.a0).powf(1.0 / (2.0 - alpha)).max(cfg.r0 + 24.0);
        let grid = RadialGrid::with_spacing(cfg.r0, extent, 0.05, dim)?;
        let solver = HeatSolver::from_profile(&grid, &profile, Theta::BackwardEuler)?;
        let mut rng = trials::rng(cfg.seed, 10 + k as u64);
        let (mut min, mut sup) = (f64::INFINITY, 0.0f64);
        for _ in 0..20 {
            let f = trials::nonnegative_data(&mut rng, &grid, cfg.r0, cfg.r0 + 7.0);
            let rep = submarkov_check(&solver, &f, &times, &StepSchedule::default())?;
            min = min.min(rep.min_value());
            sup = sup.max(rep.max_sup_ratio());
        }
        checks.push(at_least("submarkov_min", case(dim, alpha), min, -1e-12));
        checks.push(at_most("submarkov_sup_ratio", case(dim, alpha), sup, 1.0 + 1e-10));
    }
    Ok(())
}

fn contraction_suite(cfg: &ExperimentConfig, checks: &mut Vec<Check>) -> Result<()> {
    let times = [1.0, 4.0, 16.0];
    for (k, &(dim, alpha)) in MATRIX.iter().enumerate() {
        let profile = DampingProfile::pure_power(cfg.a0, alpha)?;
        let extent = (64.0 * times[2] / cfg.a0).powf(1.0 / (2.0 - alpha)).max(cfg.r0 + 39.0);
        let grid = RadialGrid::with_spacing(cfg.r0, extent, 0.05, dim)?;
        for theta in [Theta::BackwardEuler, Theta::CrankNicolson] {
            let solver = HeatSolver::from_profile(&grid, &profile, theta)?;
            let mut rng = trials::rng(cfg.seed, 20 + k as u64);
            let (mut norm, mut smooth, mut truncated) = (0.0f64, 0.0f64, false);
            for _ in 0..5 {
                let f = trials::random_bump(&mut rng, cfg.r0, cfg.r0 + 7.0, 0.3).sample(&grid);
                let rep = contraction_check(&solver, &f, &times, &StepSchedule::default())?;
                norm = norm.max(rep.max_norm_ratio());
                smooth = smooth.max(rep.max_smoothing_ratio());
                truncated |= rep.truncated;
            }
            let c = format!("{},theta={}", case(dim, alpha), theta.value());
            checks.push(at_most("contraction", c.clone(), norm, 1.0 + 1e-10));
            checks.push(at_most("smoothing", c.clone(), smooth, 1.1));
            checks.push(at_most("heat_truncation", c, truncated as u8 as f64, 0.0));
        }
    }
    Ok(())
}

/// Damped wave runs over the matrix, sampled on `[T/10, T]`.
fn support_suite(cfg: &ExperimentConfig, checks: &mut Vec<Check>, rows: &mut Vec<Row>) -> Result<f64> {
    const T: f64 = 400.0;
    const DR: f64 = 0.1;
    let times = geometric_times(0.1 * T, T, 20);
    let mut step_max: f64 = 0.0;
    for &(dim, alpha) in &MATRIX {
        let profile = DampingProfile::pure_power(cfg.a0, alpha)?;
        let grid = RadialGrid::with_spacing(cfg.r0, cfg.support_radius + T + 10.0, DR, dim)?;
        let data = CauchyData::canonical(&grid, cfg.support_radius, cfg.amplitude, cfg.velocity)?;
        let solver = WaveSolver::from_profile(&grid, &profile, 0.5 * DR)?;
        let run = run_wave(&solver, &data, T, &times)?;
        checks.push(support_check(&run, case(dim, alpha)));
        step_max = step_max.max(run.monitor.max_step_ratio);
        let doubled = run_wave(&solver, &data.scaled(2.0), T, &times)?;
        let last = run.samples.len() - 1;
        let scale = run.samples[last].u.max_abs();
        let defect = run.samples[last]
            .u
            .iter()
            .zip(doubled.samples[last].u.iter())
            .fold(0.0f64, |m, (a, b)| m.max((2.0 * a - b).abs()));
        checks.push(at_most("linearity", case(dim, alpha), defect / scale, 1e-12));
        if (dim, alpha) == (cfg.dim, cfg.alpha) {
            for s in &run.samples {
                rows.push(Row { norm_u: Some(norm_dmu(&grid, &s.u, &profile, 2.0)?), ..Row::at(s.t) });
            }
        }
    }
    Ok(step_max)
}

fn property_suite(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut out = blank(cfg);
    let mut checks = Vec::new();
    let clock = Instant::now();
    contraction_suite(cfg, &mut checks)?;
    out.timings.push(("contraction", clock.elapsed()));
    let clock = Instant::now();
    submarkov_suite(cfg, &mut checks)?;
    out.timings.push(("submarkov", clock.elapsed()));
    let clock = Instant::now();
    hardy_suite(cfg, &mut checks)?;
    out.timings.push(("hardy", clock.elapsed()));
    let clock = Instant::now();
    let step_max = support_suite(cfg, &mut checks, &mut out.rows)?;
    out.timings.push(("support", clock.elapsed()));
    out.wave_step_support = Some(step_max);
    out.verdict.info.push(("support_step_max", step_max));
    out.verdict.diagnostics = checks.clone();
    out.checks = Some(checks);
    Ok(out)
}
