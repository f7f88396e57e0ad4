//! Seeded random trial functions.

use dampwave_core::wave::bump;
use dampwave_core::{Field, RadialGrid};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `amplitude · bump((r - centre)/width)`, kept inside the grid interior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub centre: f64,
    pub width: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn sample(&self, grid: &RadialGrid) -> Field {
        Field::from_fn(grid, |r| self.amplitude * bump((r - self.centre) / self.width)).with_dirichlet()
    }
}

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A bump inside `[lo, hi]` with width between `min_width` and a third of the
/// interval and amplitude in `[0.1, 10)`.
pub fn random_bump(rng: &mut ChaCha8Rng, lo: f64, hi: f64, min_width: f64) -> Bump {
    let width = rng.random_range(min_width..(hi - lo) / 3.0);
    let centre = rng.random_range(lo + width..hi - width);
    let amplitude = rng.random_range(0.1..10.0);
    Bump { centre, width, amplitude }
}

/// Sum of one to three positive bumps.
pub fn nonnegative_data(rng: &mut ChaCha8Rng, grid: &RadialGrid, lo: f64, hi: f64) -> Field {
    let count = rng.random_range(1..=3usize);
    let mut f = vec![0.0; grid.len()];
    for _ in 0..count {
        let b = random_bump(rng, lo, hi, 0.3);
        for (x, y) in f.iter_mut().zip(b.sample(grid).iter()) {
            *x += y;
        }
    }
    Field::from_vec(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_supported() {
        let g = RadialGrid::new(1.0, 12.0, 1101, 3).unwrap();
        let a: Vec<Bump> = (0..5).map({ let mut r = rng(42, 1); move |_| random_bump(&mut r, 1.0, 12.0, 0.3) }).collect();
        let b: Vec<Bump> = (0..5).map({ let mut r = rng(42, 1); move |_| random_bump(&mut r, 1.0, 12.0, 0.3) }).collect();
        assert_eq!(a, b);
        let c = random_bump(&mut rng(42, 2), 1.0, 12.0, 0.3);
        assert_ne!(a[0], c);
        for bump in &a {
            assert!(bump.centre - bump.width >= 1.0 && bump.centre + bump.width <= 12.0);
            let f = bump.sample(&g);
            assert_eq!(f[0], 0.0);
            assert_eq!(f[g.len() - 1], 0.0);
        }
        let f = nonnegative_data(&mut rng(7, 0), &g, 1.0, 12.0);
        assert!(f.iter().all(|&v| v >= 0.0) && f.max_abs() > 0.0);
    }
}
