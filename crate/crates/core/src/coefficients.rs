//! The damping coefficient `a`, the shifted Poisson potential `A = A₀ + c₀`
//! with `ΔA₀ = a`, and the weight `Φ_{A,β}(x, t) = exp(β A(x) / (1 + t))`.

use alloc::vec::Vec;

use crate::error::{check_param, Error, Result};
use crate::grid::{Field, RadialGrid};
use crate::math;

/// Shape of the damping coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileKind {
    /// `a(r) = a₀ r^{-α}`.
    PurePower,
    /// `a(r) = a₀ r^{-α} (1 + δ/r)`, a lower-order perturbation of the pure power.
    PerturbedPower { delta: f64 },
}

/// Radially symmetric damping coefficient with `α ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingProfile {
    kind: ProfileKind,
    amplitude: f64,
    alpha: f64,
}

impl DampingProfile {
    pub fn pure_power(amplitude: f64, alpha: f64) -> Result<Self> {
        Self::new(ProfileKind::PurePower, amplitude, alpha)
    }

    pub fn perturbed_power(amplitude: f64, alpha: f64, delta: f64) -> Result<Self> {
        check_param("delta", delta, delta >= 0.0, "perturbation scale must be nonnegative")?;
        Self::new(ProfileKind::PerturbedPower { delta }, amplitude, alpha)
    }

    pub fn new(kind: ProfileKind, amplitude: f64, alpha: f64) -> Result<Self> {
        check_param("a0", amplitude, amplitude > 0.0, "amplitude must be positive")?;
        check_param("alpha", alpha, (0.0..1.0).contains(&alpha), "alpha must lie in [0, 1)")?;
        if let ProfileKind::PerturbedPower { delta } = kind {
            check_param("delta", delta, delta >= 0.0, "perturbation scale must be nonnegative")?;
        }
        Ok(Self { kind, amplitude, alpha })
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn delta(&self) -> f64 {
        match self.kind {
            ProfileKind::PurePower => 0.0,
            ProfileKind::PerturbedPower { delta } => delta,
        }
    }

    /// `a(r)` for any `r > 0` (no domain check).
    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        let base = if self.alpha == 0.0 { self.amplitude } else { self.amplitude * math::powf(r, -self.alpha) };
        match self.kind {
            ProfileKind::PurePower => base,
            ProfileKind::PerturbedPower { delta } => base * (1.0 + delta / r),
        }
    }

    /// `a(r)` on the exterior domain `r >= r_min`.
    pub fn eval_checked(&self, r: f64, r_min: f64) -> Result<f64> {
        check_param("r", r, r >= r_min, "evaluation point lies inside the obstacle")?;
        Ok(self.eval(r))
    }

    pub fn sample(&self, grid: &RadialGrid) -> Field {
        Field::from_fn(grid, |r| self.eval(r))
    }

    /// `(a₁, a₂)` with `a₁ (1+r)^{-α} <= a(r) <= a₂ (1+r)^{-α}` on the grid.
    pub fn sandwich_bounds(&self, grid: &RadialGrid) -> (f64, f64) {
        min_max(grid.nodes().map(|r| self.eval(r) * math::powf(1.0 + r, self.alpha)))
    }

    /// Largest `c ∈ (0, 1]` with `c r^{-α} <= a(r) <= c^{-1} r^{-α}` on the grid.
    pub fn modulus_bound(&self, grid: &RadialGrid) -> f64 {
        let (lo, hi) = min_max(grid.nodes().map(|r| self.eval(r) * math::powf(r, self.alpha)));
        lo.min(1.0 / hi).min(1.0)
    }

    /// `∫_0^r a(s) s^{N-1} ds` for the power law extended to the whole ball.
    pub fn enclosed_mass(&self, r: f64, dim: usize) -> f64 {
        let n = dim as f64;
        let a = self.alpha;
        self.amplitude * (math::powf(r, n - a) / (n - a) + self.delta() * math::powf(r, n - 1.0 - a) / (n - 1.0 - a))
    }

    /// `h_a = (2 - α)/(N - α)`, the limit of `|∇A₀|² / (a A₀)`.
    pub fn h_a(&self, dim: usize) -> f64 {
        (2.0 - self.alpha) / (dim as f64 - self.alpha)
    }
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

const GL4_NODES: [f64; 4] = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
const GL4_WEIGHTS: [f64; 4] = [0.347_854_845_137_453_8, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_8];

fn gauss4(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    GL4_NODES.iter().zip(GL4_WEIGHTS.iter()).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

fn hermite(s: f64, h: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * d0 + (3.0 * s2 - 2.0 * s3) * y1 + (s3 - s2) * h * d1
}

#[derive(Debug, Clone, PartialEq)]
enum Representation {
    /// `A₀ = coeff · r^{2-α}`.
    PowerLaw { coeff: f64 },
    /// Node values of the enclosed mass `M = r^{N-1} A₀'` and of `A₀`, with
    /// cubic Hermite interpolation in between.
    Tabulated { r_min: f64, dr: f64, mass: Vec<f64>, base: Vec<f64> },
}

/// `A(r) = A₀(r) + c₀` with `ΔA₀ = a`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialA {
    profile: DampingProfile,
    dim: usize,
    h_a: f64,
    shift: f64,
    eps_shift: f64,
    repr: Representation,
}

impl PotentialA {
    /// Solve `ΔA₀ = a`, then pick the smallest `c₀ ∈ {0, 1, 2, 4, …, 2^64}`
    /// with `sup_grid |A'|² / (aA) <= h_a + eps_shift`.
    ///
    /// The pure power uses the closed form `A₀ = a₀ r^{2-α}/((2-α)(N-α))`;
    /// other profiles integrate the radial ODE numerically on the grid.
    pub fn build(profile: &DampingProfile, grid: &RadialGrid, eps_shift: f64) -> Result<Self> {
        match profile.kind() {
            ProfileKind::PurePower => {
                let n = grid.dim() as f64;
                let a = profile.alpha();
                let coeff = profile.amplitude() / ((2.0 - a) * (n - a));
                Self::finish(profile, grid, eps_shift, Representation::PowerLaw { coeff })
            }
            ProfileKind::PerturbedPower { .. } => Self::build_numeric(profile, grid, eps_shift),
        }
    }

    /// Numerical route for any profile: `M(r) = ∫_0^r a s^{N-1} ds` and
    /// `A₀(r) = ∫_0^r s^{1-N} M(s) ds`, with the part inside the obstacle
    /// taken from the power law and the rest by Gauss–Legendre per cell.
    pub fn build_numeric(profile: &DampingProfile, grid: &RadialGrid, eps_shift: f64) -> Result<Self> {
        let dim = grid.dim();
        let n = dim as f64;
        let a = profile.alpha();
        let delta = profile.delta();
        let r0 = grid.r_min();
        let power = |r: f64| profile.eval(r) * math::powi(r, dim as i32 - 1);

        let mut mass = Vec::with_capacity(grid.len());
        let mut base = Vec::with_capacity(grid.len());
        let mut m = profile.enclosed_mass(r0, dim);
        let mut a0 = profile.amplitude()
            * (math::powf(r0, 2.0 - a) / ((2.0 - a) * (n - a))
                + delta * math::powf(r0, 1.0 - a) / ((1.0 - a) * (n - 1.0 - a)));
        mass.push(m);
        base.push(a0);
        for i in 0..grid.len() - 1 {
            let lo = grid.node(i);
            let hi = grid.node(i + 1);
            let m_lo = m;
            a0 += gauss4(lo, hi, |s| (m_lo + gauss4(lo, s, power)) * math::powi(s, 1 - dim as i32));
            m += gauss4(lo, hi, power);
            mass.push(m);
            base.push(a0);
        }
        let repr = Representation::Tabulated { r_min: r0, dr: grid.dr(), mass, base };
        Self::finish(profile, grid, eps_shift, repr)
    }

    fn finish(profile: &DampingProfile, grid: &RadialGrid, eps_shift: f64, repr: Representation) -> Result<Self> {
        check_param("eps_shift", eps_shift, eps_shift > 0.0, "shift tolerance must be positive")?;
        let dim = grid.dim();
        let mut potential = Self { profile: *profile, dim, h_a: profile.h_a(dim), shift: 0.0, eps_shift, repr };
        let target = potential.h_a + eps_shift;
        let mut candidate = 0.0_f64;
        for k in 0..=65 {
            potential.shift = candidate;
            if potential.shift_ratio_sup(grid) <= target {
                return Ok(potential);
            }
            candidate = math::powi(2.0, k);
        }
        Err(Error::InadmissibleProfile)
    }

    pub fn profile(&self) -> &DampingProfile {
        &self.profile
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h_a(&self) -> f64 {
        self.h_a
    }

    /// The constant `c₀`.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn eps_shift(&self) -> f64 {
        self.eps_shift
    }

    /// `A₀(r)`.
    pub fn base(&self, r: f64) -> f64 {
        match &self.repr {
            Representation::PowerLaw { coeff } => coeff * math::powf(r, 2.0 - self.profile.alpha()),
            Representation::Tabulated { r_min, dr, base, .. } => {
                let (i, s) = locate(*r_min, *dr, base.len(), r);
                let d0 = self.tabulated_gradient(i);
                let d1 = self.tabulated_gradient(i + 1);
                hermite(s, *dr, base[i], d0, base[i + 1], d1)
            }
        }
    }

    /// `A(r) = A₀(r) + c₀`.
    pub fn value(&self, r: f64) -> f64 {
        self.base(r) + self.shift
    }

    /// `A'(r) = A₀'(r)`.
    pub fn gradient(&self, r: f64) -> f64 {
        match &self.repr {
            Representation::PowerLaw { coeff } => {
                let a = self.profile.alpha();
                coeff * (2.0 - a) * math::powf(r, 1.0 - a)
            }
            Representation::Tabulated { r_min, dr, mass, .. } => {
                let (i, s) = locate(*r_min, *dr, mass.len(), r);
                let n = self.dim as i32;
                let flux = |k: usize| {
                    let rk = r_min + k as f64 * dr;
                    self.profile.eval(rk) * math::powi(rk, n - 1)
                };
                let m = hermite(s, *dr, mass[i], flux(i), mass[i + 1], flux(i + 1));
                m * math::powi(r, 1 - n)
            }
        }
    }

    /// `A''(r) = a(r) - (N-1)/r · A'(r)`, exact whenever `ΔA₀ = a`.
    pub fn second_derivative(&self, r: f64) -> f64 {
        self.profile.eval(r) - (self.dim as f64 - 1.0) / r * self.gradient(r)
    }

    fn tabulated_gradient(&self, i: usize) -> f64 {
        match &self.repr {
            Representation::Tabulated { r_min, dr, mass, .. } => {
                let r = r_min + i as f64 * dr;
                mass[i] * math::powi(r, 1 - self.dim as i32)
            }
            Representation::PowerLaw { .. } => unreachable!("power law has no table"),
        }
    }

    /// `|A'(r)|² / (a(r) A(r))`.
    pub fn shift_ratio(&self, r: f64) -> f64 {
        let g = self.gradient(r);
        g * g / (self.profile.eval(r) * self.value(r))
    }

    pub fn shift_ratio_sup(&self, grid: &RadialGrid) -> f64 {
        grid.nodes().map(|r| self.shift_ratio(r)).fold(0.0, f64::max)
    }

    /// `(A₁, A₂)` with `A₁ (1+r)^{2-α} <= A(r) <= A₂ (1+r)^{2-α}` on the grid.
    pub fn growth_bounds(&self, grid: &RadialGrid) -> (f64, f64) {
        let e = 2.0 - self.profile.alpha();
        min_max(grid.nodes().map(|r| self.value(r) / math::powf(1.0 + r, e)))
    }

    pub fn sample_base(&self, grid: &RadialGrid) -> Field {
        Field::from_fn(grid, |r| self.base(r))
    }
}

fn locate(r_min: f64, dr: f64, len: usize, r: f64) -> (usize, f64) {
    let x = (r - r_min) / dr;
    let i = (x.max(0.0) as usize).min(len - 2);
    (i, x - i as f64)
}

/// `Φ` and the derivatives that enter the weighted energy identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightDerivatives {
    pub phi: f64,
    pub log_phi: f64,
    /// `∂_t Φ = -β A/(1+t)² Φ`.
    pub dt: f64,
    /// `∂_r Φ = β A'/(1+t) Φ`.
    pub dr: f64,
    /// `ΔΦ = (β ΔA/(1+t) + |β A'/(1+t)|²) Φ`.
    pub laplacian: f64,
}

/// The weight `Φ_{A,β}(x, t) = exp(β A(x)/(1+t))`.
#[derive(Debug, Clone, Copy)]
pub struct WeightParams<'a> {
    potential: &'a PotentialA,
    beta: f64,
}

impl<'a> WeightParams<'a> {
    /// Requires `0 < β < 1/(h_a + 2ε)`.
    pub fn new(potential: &'a PotentialA, beta: f64) -> Result<Self> {
        let limit = Self::beta_limit(potential);
        check_param("beta", beta, beta > 0.0 && beta < limit, "beta must lie in (0, 1/(h_a + 2 eps_shift))")?;
        Ok(Self { potential, beta })
    }

    /// `β = 0.9/(h_a + 2ε)`.
    pub fn with_default_beta(potential: &'a PotentialA) -> Self {
        Self { potential, beta: 0.9 * Self::beta_limit(potential) }
    }

    /// `Φ ≡ 1` (the `β → 0` limit).
    pub fn unit(potential: &'a PotentialA) -> Self {
        Self { potential, beta: 0.0 }
    }

    pub fn beta_limit(potential: &PotentialA) -> f64 {
        1.0 / (potential.h_a() + 2.0 * potential.eps_shift())
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn potential(&self) -> &'a PotentialA {
        self.potential
    }

    #[inline]
    pub fn log_phi(&self, r: f64, t: f64) -> f64 {
        if self.beta == 0.0 {
            0.0
        } else {
            self.beta * self.potential.value(r) / (1.0 + t)
        }
    }

    /// May overflow to infinity for large `A/(1+t)`; use [`Self::log_phi`] then.
    #[inline]
    pub fn phi(&self, r: f64, t: f64) -> f64 {
        math::exp(self.log_phi(r, t))
    }

    pub fn derivatives(&self, r: f64, t: f64) -> Result<WeightDerivatives> {
        check_param("t", t, t >= 0.0, "time must be nonnegative")?;
        let log_phi = self.log_phi(r, t);
        let phi = math::exp(log_phi);
        let s = 1.0 + t;
        let a = self.potential.value(r);
        let da = self.potential.gradient(r);
        let lap_a = self.potential.second_derivative(r) + (self.potential.dim() as f64 - 1.0) / r * da;
        let grad = self.beta * da / s;
        Ok(WeightDerivatives {
            phi,
            log_phi,
            dt: -self.beta * a / (s * s) * phi,
            dr: grad * phi,
            laplacian: (self.beta * lap_a / s + grad * grad) * phi,
        })
    }
}
