//! Complex polynomials and their roots.
//!
//! Roots come from the eigenvalues of the companion matrix, followed by a
//! couple of Newton steps on the original polynomial. Exactly vanishing
//! low-order coefficients are deflated first so that multiple roots at the
//! origin are returned exactly.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{eigenvalues, CMatrix};
use crate::{Error, Result, C64};

/// Polynomial with complex coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl Poly {
    /// Builds a polynomial from coefficients ordered from the constant term
    /// upwards. Trailing (highest-degree) zeros are dropped.
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Same as [`Poly::new`] for real coefficients.
    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Horner evaluation.
    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut p = C64::new(0.0, 0.0);
        let mut dp = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// All roots, with multiplicity, in no particular order.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let deg = self.degree();
        if deg == 0 {
            return Ok(Vec::new());
        }
        let zeros = self.coeffs.iter().take_while(|c| c.norm() == 0.0).count();
        let mut out = alloc::vec![C64::new(0.0, 0.0); zeros];
        let reduced = &self.coeffs[zeros..];
        let n = reduced.len() - 1;
        if n == 0 {
            return Ok(out);
        }
        let lead = reduced[n];
        // Rescale z = s w so the monic coefficients are of order one.
        let s = (0..n)
            .map(|k| (reduced[k] / lead).norm().powf(1.0 / (n - k) as f64))
            .fold(0.0, f64::max);
        let s = if s > 0.0 && s.is_finite() { s } else { 1.0 };
        let mut comp = CMatrix::zeros(n);
        for k in 0..n {
            comp[(0, n - 1 - k)] = -(reduced[k] / lead) / s.powi((n - k) as i32);
        }
        for i in 1..n {
            comp[(i, i - 1)] = C64::new(1.0, 0.0);
        }
        let eig = eigenvalues(&comp)?;
        if eig.len() != n {
            return Err(Error::NoConvergence);
        }
        let reduced_poly = Poly { coeffs: reduced.to_vec() };
        for w in eig {
            out.push(reduced_poly.polish(w * s));
        }
        Ok(out)
    }

    /// Newton refinement that only accepts strictly improving steps.
    fn polish(&self, mut z: C64) -> C64 {
        for _ in 0..4 {
            let (p, dp) = self.eval_with_derivative(z);
            if p.norm() == 0.0 || dp.norm() == 0.0 {
                break;
            }
            let cand = z - p / dp;
            if self.eval(cand).norm() < p.norm() {
                z = cand;
            } else {
                break;
            }
        }
        z
    }
}

/// Sorts roots by real part, then imaginary part.
pub fn sort_roots(roots: &mut [C64]) {
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_and_deflation() {
        // z^2 (z^2 + 4)
        let p = Poly::from_real(&[0.0, 0.0, 4.0, 0.0, 1.0]);
        let mut r = p.roots().unwrap();
        sort_roots(&mut r);
        assert!((r[0] - C64::new(0.0, -2.0)).norm() < 1e-15);
        assert_eq!(r[1], C64::new(0.0, 0.0));
        assert_eq!(r[2], C64::new(0.0, 0.0));
        assert!((r[3] - C64::new(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn badly_scaled_cubic() {
        // (z - 1e10)(z + 2e10)(z - 3e9 i)
        let r1 = C64::new(1e10, 0.0);
        let r2 = C64::new(-2e10, 0.0);
        let r3 = C64::new(0.0, 3e9);
        let c0 = -r1 * r2 * r3;
        let c1 = r1 * r2 + r1 * r3 + r2 * r3;
        let c2 = -(r1 + r2 + r3);
        let p = Poly::new(alloc::vec![c0, c1, c2, C64::new(1.0, 0.0)]);
        let roots = p.roots().unwrap();
        for want in [r1, r2, r3] {
            assert!(roots.iter().any(|z| (z - want).norm() < 1e-12 * want.norm()));
        }
    }
}
