//! Dense complex helpers used by the solvers.
//!
//! Matrices are row-major `Vec<Complex64>` of size `n * n`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `a†b`, conjugating the left operand.
#[inline]
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        // conj(x) * y
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    Complex64::new(re, im)
}

pub fn norm2(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm_inf_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Cholesky factor `L` of a Hermitian positive-definite matrix, `A = L L†`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    // Lower triangle, row-major; the strict upper part is zero.
    l: Vec<Complex64>,
}

impl Cholesky {
    /// Factor `a` (row-major, `n x n`). Only the lower triangle is read.
    pub fn factor(a: &[Complex64], n: usize) -> Result<Self> {
        assert_eq!(a.len(), n * n, "matrix storage does not match n");
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = a[j * n + j].re;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { index: j, pivot: d });
            }
            let ljj = d.sqrt();
            l[j * n + j] = Complex64::new(ljj, 0.0);
            for i in (j + 1)..n {
                let mut s = a[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / ljj;
            }
        }
        Ok(Self { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solve `A x = b` in place with one forward and one backward sweep.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        // L y = b
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let mut s = b[i];
            for (lik, yk) in row.iter().zip(&b[..i]) {
                s -= lik * yk;
            }
            b[i] = s / self.l[i * n + i].re;
        }
        // L† x = y
        for i in (0..n).rev() {
            let mut s = b[i];
            for (k, bk) in b.iter().enumerate().skip(i + 1) {
                s -= self.l[k * n + i].conj() * bk;
            }
            b[i] = s / self.l[i * n + i].re;
        }
    }

    /// Rebuild `L L†`, mainly for verification.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut a = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..=i.min(j) {
                    s += self.l[i * n + k] * self.l[j * n + k].conj();
                }
                a[i * n + j] = s;
            }
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inner_conjugates_left() {
        let a = [c(0.0, 1.0)];
        let b = [c(0.0, 1.0)];
        assert_eq!(inner(&a, &b), c(1.0, 0.0));
    }

    #[test]
    fn factor_and_solve_2x2() {
        // [[4, 1+i], [1-i, 3]]
        let a = vec![c(4.0, 0.0), c(1.0, 1.0), c(1.0, -1.0), c(3.0, 0.0)];
        let ch = Cholesky::factor(&a, 2).unwrap();
        let rebuilt = ch.reconstruct();
        for (x, y) in a.iter().zip(&rebuilt) {
            assert!((x - y).norm() < 1e-14);
        }
        let mut b = vec![c(1.0, 2.0), c(-1.0, 0.5)];
        let rhs = b.clone();
        ch.solve_in_place(&mut b);
        for i in 0..2 {
            let mut s = c(0.0, 0.0);
            for j in 0..2 {
                s += a[i * 2 + j] * b[j];
            }
            assert!((s - rhs[i]).norm() < 1e-13);
        }
    }

    #[test]
    fn rejects_indefinite() {
        let a = vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)];
        assert!(matches!(
            Cholesky::factor(&a, 2),
            Err(Error::NotPositiveDefinite { index: 1, .. })
        ));
    }
}
