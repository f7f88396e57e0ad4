use dampwave_core::coefficients::ProfileKind;
use dampwave_core::heat::StepSchedule;
use dampwave_core::quadrature::gauss_legendre;
use dampwave_core::wave::bump;
use dampwave_core::{
    embedding_check, energy_record, hardy_check, norm_dmu, run_wave, weighted_integral, CauchyData, DampingProfile,
    Field, HeatSolver, PotentialA, RadialGrid, Theta, WaveSample, WaveSolver, WeightParams,
};
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MATRIX: [(usize, f64); 3] = [(2, 0.0), (3, 0.0), (3, 0.5)];

fn random_bump(grid: &RadialGrid, rng: &mut ChaCha8Rng) -> Field {
    let lo = grid.r_min();
    let hi = grid.r_max();
    let width = rng.random_range(0.3..0.3 * (hi - lo));
    let centre = rng.random_range(lo + width..hi - width);
    let amp = rng.random_range(0.1..10.0);
    Field::from_fn(grid, |r| amp * bump((r - centre) / width)).with_dirichlet()
}

#[test]
fn hardy_holds_for_seeded_bumps() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for (dim, alpha) in MATRIX {
        let g = RadialGrid::with_spacing(1.0, 12.0, 5e-3, dim).unwrap();
        let p = DampingProfile::pure_power(1.0, alpha).unwrap();
        let pot = PotentialA::build(&p, &g, 0.05).unwrap();
        let w = WeightParams::with_default_beta(&pot);
        for _ in 0..100 {
            let u = random_bump(&g, &mut rng);
            for t in [0.0, 1.0, 10.0] {
                let ratio = hardy_check(&g, &u, t, &w).unwrap();
                assert!(ratio <= 1.02, "N={dim} α={alpha} t={t}: {ratio}");
            }
        }
    }
}

#[test]
fn hardy_near_extremal_family_approaches_one() {
    let g = RadialGrid::with_spacing(1.0, 30.0, 5e-3, 3).unwrap();
    let p = DampingProfile::pure_power(1.0, 0.0).unwrap();
    let pot = PotentialA::build(&p, &g, 0.05).unwrap();
    let w = WeightParams::with_default_beta(&pot);
    let t = 10.0;
    let mut best: f64 = 0.0;
    for plateau in [4.0, 8.0, 16.0] {
        let ramp = |r: f64| {
            let s = ((r - 1.0) / 1.0).clamp(0.0, 1.0).min(((1.0 + 2.0 + plateau) - r).clamp(0.0, 1.0));
            if s >= 1.0 { 1.0 } else if s <= 0.0 { 0.0 } else { bump(1.0 - s) / bump(0.0) }
        };
        let u = Field::from_fn(&g, |r| ramp(r) * (-w.log_phi(r, t)).exp()).with_dirichlet();
        let ratio = hardy_check(&g, &u, t, &w).unwrap();
        assert!(ratio <= 1.0 + 1e-3, "{ratio}");
        best = best.max(ratio);
    }
    assert!(best > 0.8, "{best}");
}

#[test]
fn embedding_ratio_is_bounded_and_refinement_stable() {
    for (dim, alpha) in MATRIX {
        let p = DampingProfile::pure_power(1.0, alpha).unwrap();
        let coarse = RadialGrid::with_spacing(1.0, 12.0, 1e-2, dim).unwrap();
        let fine = coarse.refined();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst = [0.0f64; 2];
        for _ in 0..50 {
            let width = rng.random_range(0.3..3.0);
            let centre = rng.random_range(1.0 + width..12.0 - width);
            for (k, g) in [&coarse, &fine].into_iter().enumerate() {
                let u = Field::from_fn(g, |r| bump((r - centre) / width)).with_dirichlet();
                worst[k] = worst[k].max(embedding_check(g, &u, &p).unwrap());
            }
        }
        assert!(worst[0].is_finite());
        assert!((worst[0] / worst[1] - 1.0).abs() <= 0.05, "{worst:?}");
    }
}

fn bump_energy(dr: f64) -> (f64, f64, f64) {
    let g = RadialGrid::with_spacing(1.0, 4.0, dr, 3).unwrap();
    let p = DampingProfile::pure_power(1.0, 0.0).unwrap();
    let pot = PotentialA::build(&p, &g, 0.05).unwrap();
    let w = WeightParams::with_default_beta(&pot);
    let u = Field::from_fn(&g, |r| bump(r - 2.0));
    let sample = WaveSample { t: 0.0, u, u_t: Field::zeros(&g), u_tt: Field::zeros(&g), leapfrog_energy: 0.0 };
    let rec = energy_record(&g, &sample, &w).unwrap();
    (rec.e1, rec.weighted_u_sq[0], w.beta())
}

#[test]
fn weighted_energy_matches_fine_quadrature() {
    let (coarse, coarse_u, beta) = bump_energy(2e-3);
    let (fine, fine_u, _) = bump_energy(1e-3);
    // d/dr exp(-1/(1-s²)) = -2s/(1-s²)² exp(-1/(1-s²)).
    let du = |r: f64| {
        let s: f64 = r - 2.0;
        if s.abs() >= 1.0 { 0.0 } else { -2.0 * s / (1.0 - s * s).powi(2) * bump(s) }
    };
    let phi = |r: f64| (beta * r * r / 6.0).exp() * r * r;
    let omega = 4.0 * std::f64::consts::PI;
    let grad = omega * gauss_legendre(1.0, 3.0, 400, |r| du(r).powi(2) * phi(r));
    let mass = omega * gauss_legendre(1.0, 3.0, 400, |r| bump(r - 2.0).powi(2) * phi(r));
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    assert!((extrapolated / grad - 1.0).abs() <= 1e-6, "{extrapolated} vs {grad}");
    assert!((fine / grad - 1.0).abs() <= 1e-5);
    let extrapolated = (4.0 * fine_u - coarse_u) / 3.0;
    assert!((extrapolated / mass - 1.0).abs() <= 1e-6, "{extrapolated} vs {mass}");
}

#[test]
fn weighted_energy_is_nonincreasing_along_damped_run() {
    for (dim, alpha) in MATRIX {
        let g = RadialGrid::with_spacing(1.0, 45.0, 0.05, dim).unwrap();
        let p = DampingProfile::pure_power(1.0, alpha).unwrap();
        let pot = PotentialA::build(&p, &g, 0.05).unwrap();
        let w = WeightParams::with_default_beta(&pot);
        let s = WaveSolver::from_profile(&g, &p, 0.025).unwrap();
        let d = CauchyData::canonical(&g, 3.0, 1.0, 0.0).unwrap();
        let times: Vec<f64> = (0..=80).map(|k| 0.5 * k as f64).collect();
        let run = run_wave(&s, &d, 40.0, &times).unwrap();
        let e1: Vec<f64> = run.samples.iter().map(|x| energy_record(&g, x, &w).unwrap().e1).collect();
        for k in 1..e1.len() {
            assert!(e1[k] <= e1[k - 1], "N={dim} α={alpha} t={}: {} > {}", times[k], e1[k], e1[k - 1]);
        }
    }
}

#[test]
fn heat_norm_times_rate_is_bounded() {
    // ‖e^{tL} f‖_{L²_{dμ}} t^{(N-α)/(2(2-α))} / ‖f‖_{L¹_{dμ}} stays bounded on [10, T].
    let (dim, alpha) = (3, 0.0);
    let t_final = 400.0;
    let r_max = (64.0f64 * t_final).powf(1.0 / (2.0 - alpha));
    let g = RadialGrid::with_spacing(1.0, r_max, 0.05, dim).unwrap();
    let p = DampingProfile::pure_power(1.0, alpha).unwrap();
    let solver = HeatSolver::from_profile(&g, &p, Theta::CrankNicolson).unwrap();
    let f = Field::from_fn(&g, |r| bump(r - 2.0));
    let l1 = norm_dmu(&g, &f, &p, 1.0).unwrap();
    let times: Vec<f64> = (0..=20).map(|k| 10.0 * (t_final / 10.0f64).powf(k as f64 / 20.0)).collect();
    let run = solver.run(&f, &StepSchedule::default(), &times).unwrap();
    assert!(!run.truncated());
    let rate = (dim as f64 - alpha) / (2.0 * (2.0 - alpha));
    let scaled: Vec<f64> =
        run.states.iter().map(|s| norm_dmu(&g, &s.v, &p, 2.0).unwrap() * s.t.powf(rate) / l1).collect();
    let max = scaled.iter().cloned().fold(0.0, f64::max);
    let min = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(max / min < 2.0, "{scaled:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trapezoid_is_exact_for_linear_radial_densities(p in -5.0f64..5.0, q in -5.0f64..5.0, dim in 2usize..5) {
        let g = RadialGrid::new(1.0, 3.0, 17, dim).unwrap();
        let f = Field::from_fn(&g, |r| (p + q * r) / r.powi(dim as i32 - 1));
        let ones = vec![1.0; g.len()];
        let exact = dampwave_core::grid::sphere_area(dim) * (2.0 * p + q * 4.0);
        let got = weighted_integral(&g, &f, &ones).unwrap();
        prop_assert!((got - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
    }

    #[test]
    fn weight_is_monotone(alpha in 0.0f64..0.9, delta in 0.0f64..4.0, dim in 2usize..4, t in 0.0f64..50.0) {
        let g = RadialGrid::new(1.0, 20.0, 400, dim).unwrap();
        let p = DampingProfile::perturbed_power(1.0, alpha, delta).unwrap();
        let pot = PotentialA::build(&p, &g, 0.05).unwrap();
        let w = WeightParams::with_default_beta(&pot);
        let mut prev = f64::NEG_INFINITY;
        for r in g.nodes() {
            let v = w.log_phi(r, t);
            prop_assert!(v >= prev);
            prop_assert!(w.log_phi(r, t + 1.0) <= v);
            prev = v;
        }
    }

    #[test]
    fn shifted_potential_satisfies_ratio_bound(alpha in 0.0f64..0.9, delta in 0.0f64..8.0, a0 in 0.2f64..5.0, dim in 2usize..5) {
        let g = RadialGrid::new(1.0, 30.0, 600, dim).unwrap();
        let p = DampingProfile::perturbed_power(a0, alpha, delta).unwrap();
        prop_assert_eq!(p.kind(), ProfileKind::PerturbedPower { delta });
        let pot = PotentialA::build(&p, &g, 0.05).unwrap();
        prop_assert!(pot.shift_ratio_sup(&g) <= pot.h_a() + 0.05);
        let (lo, hi) = pot.growth_bounds(&g);
        prop_assert!(lo > 0.0 && hi.is_finite());
        prop_assert!(WeightParams::new(&pot, 1.0 / (pot.h_a() + 0.1)).is_err());
    }

    #[test]
    fn wave_is_linear(c in -10.0f64..10.0, v in -2.0f64..2.0) {
        let g = RadialGrid::with_spacing(1.0, 15.0, 0.1, 3).unwrap();
        let p = DampingProfile::pure_power(1.0, 0.5).unwrap();
        let s = WaveSolver::from_profile(&g, &p, 0.05).unwrap();
        let d = CauchyData::canonical(&g, 3.0, 1.0, v).unwrap();
        let base = run_wave(&s, &d, 10.0, &[10.0]).unwrap();
        let scaled = run_wave(&s, &d.scaled(c), 10.0, &[10.0]).unwrap();
        let scale = base.samples[0].u.max_abs();
        for (x, y) in base.samples[0].u.iter().zip(scaled.samples[0].u.iter()) {
            prop_assert!((c * x - y).abs() <= 1e-12 * scale * c.abs().max(1.0));
        }
    }

    #[test]
    fn heat_contracts_and_stays_positive(seed in any::<u64>(), dim in 2usize..4) {
        let g = RadialGrid::with_spacing(1.0, 25.0, 0.05, dim).unwrap();
        let p = DampingProfile::pure_power(1.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_bump(&g, &mut rng);
        let be = HeatSolver::from_profile(&g, &p, Theta::BackwardEuler).unwrap();
        let rep = dampwave_core::submarkov_check(&be, &f, &[0.5, 2.0, 8.0], &StepSchedule::default()).unwrap();
        prop_assert!(rep.passes());
        let cn = HeatSolver::from_profile(&g, &p, Theta::CrankNicolson).unwrap();
        let rep = dampwave_core::contraction_check(&cn, &f, &[0.5, 2.0, 8.0], &StepSchedule::default()).unwrap();
        prop_assert!(rep.max_norm_ratio() <= 1.0 + 1e-10);
    }

    #[test]
    fn backward_euler_preserves_order(seed in any::<u64>()) {
        let g = RadialGrid::with_spacing(1.0, 25.0, 0.05, 3).unwrap();
        let p = DampingProfile::pure_power(1.0, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_bump(&g, &mut rng);
        let extra = random_bump(&g, &mut rng);
        let h = Field::from_vec(f.iter().zip(extra.iter()).map(|(a, b)| a + b).collect());
        let s = HeatSolver::from_profile(&g, &p, Theta::BackwardEuler).unwrap();
        let sched = StepSchedule::with_cap(1.0);
        let a = s.run(&f, &sched, &[5.0]).unwrap();
        let b = s.run(&h, &sched, &[5.0]).unwrap();
        for (x, y) in a.states[0].v.iter().zip(b.states[0].v.iter()) {
            prop_assert!(*x <= *y + 1e-15);
        }
    }
}
