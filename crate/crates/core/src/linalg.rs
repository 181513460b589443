//! Small dense complex matrices: products, LU factorization, determinants,
//! eigenvalues and the matrix exponential.
//!
//! The systems handled by this crate are at most 4×4, so everything is a
//! straightforward row-major `Vec` with no attempt at blocking.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

/// A 2×2 complex matrix stored as rows.
pub type Matrix2 = [[C64; 2]; 2];

/// Applies a 2×2 matrix to a column vector.
pub fn apply2(m: &Matrix2, v: [C64; 2]) -> [C64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// Square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.n + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.n + c]
    }
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    /// Diagonal matrix with the given real entries.
    pub fn diag_real(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// LU factorization with partial pivoting: returns the packed factors,
    /// the row permutation and the permutation sign.
    fn lu(&self) -> (Self, Vec<usize>, f64) {
        let n = self.n;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&x, &y| a[(x, k)].norm().total_cmp(&a[(y, k)].norm()))
                .unwrap_or(k);
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            if pivot.norm() == 0.0 {
                continue;
            }
            for i in (k + 1)..n {
                let f = a[(i, k)] / pivot;
                a[(i, k)] = f;
                for j in (k + 1)..n {
                    let t = a[(k, j)];
                    a[(i, j)] -= f * t;
                }
            }
        }
        (a, perm, sign)
    }

    pub fn det(&self) -> C64 {
        let (lu, _, sign) = self.lu();
        (0..self.n).fold(C64::new(sign, 0.0), |acc, i| acc * lu[(i, i)])
    }

    /// Solves `self * X = rhs` for a matrix right-hand side.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        let n = self.n;
        let (lu, perm, _) = self.lu();
        if (0..n).any(|i| lu[(i, i)].norm() == 0.0) {
            return Err(Error::Singular);
        }
        let mut x = Self::zeros(n);
        for col in 0..n {
            let mut y: Vec<C64> = (0..n).map(|i| rhs[(perm[i], col)]).collect();
            for i in 0..n {
                for k in 0..i {
                    let t = lu[(i, k)] * y[k];
                    y[i] -= t;
                }
            }
            for i in (0..n).rev() {
                for k in (i + 1)..n {
                    let t = lu[(i, k)] * y[k];
                    y[i] -= t;
                }
                y[i] /= lu[(i, i)];
            }
            for i in 0..n {
                x[(i, col)] = y[i];
            }
        }
        Ok(x)
    }

    /// Matrix exponential by scaling and squaring with a degree-13 Padé
    /// approximant.
    pub fn expm(&self) -> Result<Self> {
        const B: [f64; 14] = [
            64_764_752_532_480_000.0,
            32_382_376_266_240_000.0,
            7_771_770_303_897_600.0,
            1_187_353_796_428_800.0,
            129_060_195_264_000.0,
            10_559_470_521_600.0,
            670_442_572_800.0,
            33_522_128_640.0,
            1_323_241_920.0,
            40_840_800.0,
            960_960.0,
            16_380.0,
            182.0,
            1.0,
        ];
        const THETA13: f64 = 5.371_920_351_148_152;
        let n = self.n;
        let norm = self.norm1();
        if !norm.is_finite() {
            return Err(Error::InvalidParameter {
                name: "matrix",
                value: norm,
                reason: "entries must be finite",
            });
        }
        let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
        let a = self.scale(C64::new(2f64.powi(-s), 0.0));
        let id = Self::identity(n);
        let a2 = a.mul(&a);
        let a4 = a2.mul(&a2);
        let a6 = a4.mul(&a2);
        let r = |x: f64| C64::new(x, 0.0);
        let u_inner = a6.scale(r(B[13])).add(&a4.scale(r(B[11]))).add(&a2.scale(r(B[9])));
        let u = a.mul(
            &a6.mul(&u_inner)
                .add(&a6.scale(r(B[7])))
                .add(&a4.scale(r(B[5])))
                .add(&a2.scale(r(B[3])))
                .add(&id.scale(r(B[1]))),
        );
        let v_inner = a6.scale(r(B[12])).add(&a4.scale(r(B[10]))).add(&a2.scale(r(B[8])));
        let v = a6
            .mul(&v_inner)
            .add(&a6.scale(r(B[6])))
            .add(&a4.scale(r(B[4])))
            .add(&a2.scale(r(B[2])))
            .add(&id.scale(r(B[0])));
        let mut e = v.sub(&u).solve(&v.add(&u))?;
        for _ in 0..s {
            e = e.mul(&e);
        }
        Ok(e)
    }
}

/// Eigenvalues of a general complex matrix: reduction to Hessenberg form
/// followed by single-shift QR sweeps with Wilkinson shifts and deflation.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let mut h = m.clone();
    hessenberg(&mut h);
    hessenberg_qr(h)
}

/// Similarity reduction to upper Hessenberg form by stabilized elementary
/// transformations (Gaussian elimination with pivoting).
fn hessenberg(a: &mut CMatrix) {
    let n = a.n;
    for k in 1..n.saturating_sub(1) {
        let p = (k..n)
            .max_by(|&x, &y| a[(x, k - 1)].norm().total_cmp(&a[(y, k - 1)].norm()))
            .unwrap_or(k);
        if a[(p, k - 1)].norm() == 0.0 {
            continue;
        }
        if p != k {
            for j in 0..n {
                a.data.swap(p * n + j, k * n + j);
            }
            for i in 0..n {
                a.data.swap(i * n + p, i * n + k);
            }
        }
        for i in (k + 1)..n {
            let f = a[(i, k - 1)] / a[(k, k - 1)];
            if f.norm() == 0.0 {
                continue;
            }
            for j in 0..n {
                let t = a[(k, j)];
                a[(i, j)] -= f * t;
            }
            for r in 0..n {
                let t = a[(r, i)];
                a[(r, k)] += f * t;
            }
        }
    }
}

/// Complex Givens rotation `[[c, s], [-conj(s), c]]` zeroing `b` against `a`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    (na / r, (a / na) * b.conj() / r)
}

fn hessenberg_qr(mut h: CMatrix) -> Result<Vec<C64>> {
    let n = h.n;
    let mut eig = Vec::with_capacity(n);
    let mut hi = n;
    let mut iter = 0usize;
    while hi > 0 {
        if hi == 1 {
            eig.push(h[(0, 0)]);
            break;
        }
        // Find the start of the trailing unreduced block.
        let mut l = hi - 1;
        while l > 0 {
            let s = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
            let sub = h[(l, l - 1)].norm();
            if sub <= f64::EPSILON * s || sub < f64::MIN_POSITIVE {
                h[(l, l - 1)] = C64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi - 1 {
            eig.push(h[(hi - 1, hi - 1)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > 200 * n {
            return Err(Error::NoConvergence);
        }
        let (a, b, c, d) = (
            h[(hi - 2, hi - 2)],
            h[(hi - 2, hi - 1)],
            h[(hi - 1, hi - 2)],
            h[(hi - 1, hi - 1)],
        );
        let mu = if iter % 11 == 10 {
            // Exceptional shift to break rare cycles.
            d + h[(hi - 1, hi - 2)].norm() * 0.75
        } else {
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let m1 = (a + d) * 0.5 + disc;
            let m2 = (a + d) * 0.5 - disc;
            if (m1 - d).norm() < (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };
        for k in l..hi {
            h[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..(hi - 1) {
            let (cs, sn) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * cs + sn * y;
                h[(k + 1, j)] = -sn.conj() * x + y * cs;
            }
            rots.push((cs, sn));
        }
        for (idx, k) in (l..(hi - 1)).enumerate() {
            let (cs, sn) = rots[idx];
            let top = (k + 2).min(hi);
            for r in l..top {
                let x = h[(r, k)];
                let y = h[(r, k + 1)];
                h[(r, k)] = x * cs + y * sn.conj();
                h[(r, k + 1)] = -x * sn + y * cs;
            }
        }
        for k in l..hi {
            h[(k, k)] += mu;
        }
    }
    Ok(eig)
}
