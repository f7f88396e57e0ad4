//! Thomas algorithm for tridiagonal systems.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Tridiagonal matrix stored by diagonals. `lower[0]` and `upper[n-1]` are unused.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul(&self, x: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.lower[i] * x[i - 1];
            }
            if i + 1 < n {
                s += self.upper[i] * x[i + 1];
            }
            out[i] = s;
        }
    }

    /// Solve `M x = rhs` in place. `scratch` must have length `n`.
    ///
    /// No pivoting; intended for diagonally dominant systems.
    pub fn solve_in_place(&self, rhs: &mut [f64], scratch: &mut [f64]) -> Result<()> {
        let n = self.len();
        if rhs.len() != n || scratch.len() != n {
            return Err(Error::ShapeMismatch { expected: n, found: rhs.len().min(scratch.len()) });
        }
        let mut denom = self.diag[0];
        if denom == 0.0 {
            return Err(Error::NonFinite("tridiagonal solve"));
        }
        rhs[0] /= denom;
        for i in 1..n {
            scratch[i] = self.upper[i - 1] / denom;
            denom = self.diag[i] - self.lower[i] * scratch[i];
            if denom == 0.0 {
                return Err(Error::NonFinite("tridiagonal solve"));
            }
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= scratch[i + 1] * rhs[i + 1];
        }
        if rhs.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("tridiagonal solve"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn solves_small_system() {
        let m = Tridiagonal { lower: vec![0.0, 1.0, 1.0], diag: vec![4.0, 4.0, 4.0], upper: vec![1.0, 1.0, 0.0] };
        let x = [1.0, -2.0, 3.0];
        let mut b = [0.0; 3];
        m.mul(&x, &mut b);
        let mut s = [0.0; 3];
        m.solve_in_place(&mut b, &mut s).unwrap();
        for (a, e) in b.iter().zip(x) {
            assert!((a - e).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn dominant_systems_round_trip(
            n in 2usize..40,
            seed in proptest::collection::vec(-1.0f64..1.0, 160),
        ) {
            let lower: Vec<f64> = (0..n).map(|i| seed[i]).collect();
            let upper: Vec<f64> = (0..n).map(|i| seed[40 + i]).collect();
            let diag: Vec<f64> = (0..n).map(|i| 2.5 + seed[80 + i]).collect();
            let x: Vec<f64> = (0..n).map(|i| seed[120 + i]).collect();
            let m = Tridiagonal { lower, diag, upper };
            let mut b = vec![0.0; n];
            m.mul(&x, &mut b);
            let mut s = vec![0.0; n];
            m.solve_in_place(&mut b, &mut s).unwrap();
            for i in 0..n {
                prop_assert!((b[i] - x[i]).abs() < 1e-12);
            }
        }
    }
}
