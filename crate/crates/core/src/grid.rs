//! Uniform radial grids on `[r_min, r_max]`, the second-order radial
//! Laplacian with homogeneous Dirichlet rows at both ends, and trapezoidal
//! quadrature against the surface measure `ω_N r^{N-1} dr`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Deref, DerefMut};

use crate::coefficients::DampingProfile;
use crate::error::{Error, Result};
use crate::math;

/// Smallest admissible number of nodes.
pub const MIN_NODES: usize = 8;

/// Uniform grid `r_i = r_min + i dr`, `i = 0..n`, for radial functions on the
/// exterior of the ball of radius `r_min` in `ℝ^N`.
///
/// Node 0 carries the Dirichlet condition on the obstacle; the last node is
/// the artificial far boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    r_min: f64,
    r_max: f64,
    n: usize,
    dr: f64,
    dim: usize,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, n: usize, dim: usize) -> Result<Self> {
        if !(r_min.is_finite() && r_min > 0.0) {
            return Err(Error::InvalidGrid("r_min must be positive: the damping is singular at the origin"));
        }
        if !(r_max.is_finite() && r_max > r_min) {
            return Err(Error::InvalidGrid("empty interval: r_max must exceed r_min"));
        }
        if n < MIN_NODES {
            return Err(Error::InvalidGrid("at least 8 nodes are required"));
        }
        if dim < 2 {
            return Err(Error::InvalidGrid("spatial dimension must be at least 2"));
        }
        let dr = (r_max - r_min) / (n - 1) as f64;
        Ok(Self { r_min, r_max, n, dr, dim })
    }

    /// Grid with spacing `dr` whose far end is the first node at or beyond
    /// `r_max_at_least`.
    pub fn with_spacing(r_min: f64, r_max_at_least: f64, dr: f64, dim: usize) -> Result<Self> {
        if !(dr.is_finite() && dr > 0.0) {
            return Err(Error::InvalidGrid("spacing must be positive"));
        }
        if !(r_max_at_least > r_min) {
            return Err(Error::InvalidGrid("empty interval: r_max must exceed r_min"));
        }
        let cells = math::ceil((r_max_at_least - r_min) / dr - 1e-9) as usize;
        let n = (cells + 1).max(MIN_NODES);
        Self::new(r_min, r_min + dr * (n - 1) as f64, n, dim)
    }

    /// The same interval with the spacing halved (`2n - 1` nodes).
    pub fn refined(&self) -> Self {
        Self::new(self.r_min, self.r_max, 2 * self.n - 1, self.dim).expect("refinement of a valid grid")
    }

    #[inline]
    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    #[inline]
    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn dr(&self) -> f64 {
        self.dr
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.r_min + i as f64 * self.dr
    }

    /// Midpoint of the cell `[r_i, r_{i+1}]`.
    #[inline]
    pub fn midpoint(&self, i: usize) -> f64 {
        self.r_min + (i as f64 + 0.5) * self.dr
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.node(i))
    }

    /// Index of the first node strictly beyond `r`, or `len()` if none.
    pub fn first_index_beyond(&self, r: f64) -> usize {
        if r < self.r_min {
            return 0;
        }
        let k = math::ceil((r - self.r_min) / self.dr) as usize;
        let mut k = k.min(self.n);
        while k < self.n && self.node(k) <= r {
            k += 1;
        }
        while k > 0 && self.node(k - 1) > r {
            k -= 1;
        }
        k
    }

    /// Area of the unit sphere in `ℝ^N`: `ω_2 = 2π`, `ω_3 = 4π`,
    /// `ω_{N+2} = 2π ω_N / N`.
    pub fn sphere_area(&self) -> f64 {
        sphere_area(self.dim)
    }

    /// Coefficient of `f_{i+1}` in the stencil at node `i`.
    #[inline]
    pub fn upper(&self, i: usize) -> f64 {
        1.0 / (self.dr * self.dr) + (self.dim as f64 - 1.0) / (2.0 * self.node(i) * self.dr)
    }

    /// Coefficient of `f_{i-1}` in the stencil at node `i`.
    #[inline]
    pub fn lower(&self, i: usize) -> f64 {
        1.0 / (self.dr * self.dr) - (self.dim as f64 - 1.0) / (2.0 * self.node(i) * self.dr)
    }

    /// Diagonal coefficient of the stencil.
    #[inline]
    pub fn diag(&self) -> f64 {
        -2.0 / (self.dr * self.dr)
    }

    /// Node weights `w_i` making `diag(w) Δ_h` symmetric on the interior.
    ///
    /// `w_{i+1} c⁻_{i+1} = w_i c⁺_i`, normalized so that `w_0 = r_min^{N-1}`.
    /// For `N = 2` and `N = 3` this reproduces `r_i^{N-1}` exactly.
    pub fn symmetrizing_weights(&self) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.n);
        let mut current = math::powi(self.r_min, self.dim as i32 - 1);
        w.push(current);
        for i in 0..self.n - 1 {
            current *= self.upper(i) / self.lower(i + 1);
            w.push(current);
        }
        w
    }

    pub fn check(&self, len: usize) -> Result<()> {
        if len == self.n {
            Ok(())
        } else {
            Err(Error::ShapeMismatch { expected: self.n, found: len })
        }
    }

    /// Trapezoidal weight of node `i` including `r^{N-1} dr` (without `ω_N`).
    #[inline]
    pub(crate) fn trapezoid_weight(&self, i: usize) -> f64 {
        let end = if i == 0 || i + 1 == self.n { 0.5 } else { 1.0 };
        end * self.dr * math::powi(self.node(i), self.dim as i32 - 1)
    }

    /// Midpoint weight of cell `i` including `r^{N-1} dr` (without `ω_N`).
    #[inline]
    pub(crate) fn cell_weight(&self, i: usize) -> f64 {
        self.dr * math::powi(self.midpoint(i), self.dim as i32 - 1)
    }
}

pub fn sphere_area(dim: usize) -> f64 {
    let (mut n, mut area) = if dim % 2 == 0 { (2, 2.0 * PI) } else { (3, 4.0 * PI) };
    while n < dim {
        area *= 2.0 * PI / n as f64;
        n += 2;
    }
    area
}

/// Nodal values of a radial function on a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Field(Vec<f64>);

impl Field {
    pub fn zeros(grid: &RadialGrid) -> Self {
        Self(alloc::vec![0.0; grid.len()])
    }

    pub fn from_fn(grid: &RadialGrid, mut f: impl FnMut(f64) -> f64) -> Self {
        Self(grid.nodes().map(&mut f).collect())
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Zero the two Dirichlet nodes.
    pub fn with_dirichlet(mut self) -> Self {
        if let Some(first) = self.0.first_mut() {
            *first = 0.0;
        }
        if let Some(last) = self.0.last_mut() {
            *last = 0.0;
        }
        self
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(self.0.iter().map(|x| c * x).collect())
    }

    pub fn sub(&self, other: &Field) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::ShapeMismatch { expected: self.len(), found: other.len() });
        }
        Ok(Self(self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b).collect()))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, x| m.max(math::abs(*x)))
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl Deref for Field {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for Field {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for Field {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

/// `Δ_h f` at interior nodes; the two boundary rows are Dirichlet rows and
/// return 0.
pub fn radial_laplacian(grid: &RadialGrid, f: &[f64]) -> Result<Field> {
    grid.check(f.len())?;
    let mut out = Field::zeros(grid);
    apply_laplacian(grid, f, &mut out);
    Ok(out)
}

/// Allocation-free form of [`radial_laplacian`]; `out` must have the grid length.
pub fn apply_laplacian(grid: &RadialGrid, f: &[f64], out: &mut [f64]) {
    let n = grid.len();
    let diag = grid.diag();
    out[0] = 0.0;
    out[n - 1] = 0.0;
    for i in 1..n - 1 {
        out[i] = grid.upper(i) * f[i + 1] + diag * f[i] + grid.lower(i) * f[i - 1];
    }
}

/// `ω_N ∫ f w r^{N-1} dr` by the composite trapezoidal rule.
pub fn weighted_integral(grid: &RadialGrid, f: &[f64], w: &[f64]) -> Result<f64> {
    grid.check(f.len())?;
    grid.check(w.len())?;
    let sum: f64 = (0..grid.len()).map(|i| f[i] * w[i] * grid.trapezoid_weight(i)).sum();
    Ok(grid.sphere_area() * sum)
}

/// `‖f‖_{L^p_{dμ}} = (∫ |f|^p a dx)^{1/p}` for `p >= 1`.
pub fn norm_dmu(grid: &RadialGrid, f: &[f64], profile: &DampingProfile, p: f64) -> Result<f64> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidParameter { name: "p", value: p, reason: "norm exponent must be >= 1" });
    }
    grid.check(f.len())?;
    let sum: f64 = (0..grid.len())
        .map(|i| {
            let x = math::abs(f[i]);
            let xp = if p == 2.0 { x * x } else if p == 1.0 { x } else { math::powf(x, p) };
            xp * profile.eval(grid.node(i)) * grid.trapezoid_weight(i)
        })
        .sum();
    Ok(math::powf(grid.sphere_area() * sum, 1.0 / p))
}

/// `ω_N Σ_i trap_i r_i^{N-1} f_i exp(log_w_i)`, evaluated term by term in
/// log space so that large weights on regions where `f` vanishes never
/// overflow. Terms with `f_i = 0` contribute nothing.
pub fn log_weighted_integral(
    grid: &RadialGrid,
    f: impl Fn(usize) -> f64,
    log_w: impl Fn(usize) -> f64,
) -> Result<f64> {
    let mut sum = 0.0;
    for i in 0..grid.len() {
        let fi = f(i);
        if fi == 0.0 {
            continue;
        }
        let term = math::exp(math::ln(math::abs(fi) * grid.trapezoid_weight(i)) + log_w(i));
        sum += if fi < 0.0 { -term } else { term };
    }
    let value = grid.sphere_area() * sum;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite("weighted integral"))
    }
}

/// Cell (midpoint) counterpart of [`log_weighted_integral`]: `g(i)` and
/// `log_w(i)` are evaluated on cell `[r_i, r_{i+1}]`, `i = 0..n-1`.
pub fn log_weighted_cell_integral(
    grid: &RadialGrid,
    g: impl Fn(usize) -> f64,
    log_w: impl Fn(usize) -> f64,
) -> Result<f64> {
    let mut sum = 0.0;
    for i in 0..grid.len() - 1 {
        let gi = g(i);
        if gi == 0.0 {
            continue;
        }
        let term = math::exp(math::ln(math::abs(gi) * grid.cell_weight(i)) + log_w(i));
        sum += if gi < 0.0 { -term } else { term };
    }
    let value = grid.sphere_area() * sum;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite("weighted gradient integral"))
    }
}

/// Cell-centred derivative `(f_{i+1} - f_i) / dr`, one value per cell.
pub fn cell_gradient(grid: &RadialGrid, f: &[f64]) -> Result<Vec<f64>> {
    grid.check(f.len())?;
    Ok(f.windows(2).map(|w| (w[1] - w[0]) / grid.dr()).collect())
}

/// `∫ |∇f|^2 dx` with cell-centred differences and midpoint quadrature.
pub fn gradient_sq_integral(grid: &RadialGrid, f: &[f64]) -> Result<f64> {
    grid.check(f.len())?;
    let sum: f64 = (0..grid.len() - 1)
        .map(|i| {
            let g = (f[i + 1] - f[i]) / grid.dr();
            g * g * grid.cell_weight(i)
        })
        .sum();
    Ok(grid.sphere_area() * sum)
}
