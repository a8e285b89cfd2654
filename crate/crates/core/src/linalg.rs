//! Small dense complex linear algebra: LU, determinants, inverses, Hessenberg + shifted
//! QR eigenvalues, inverse-iteration eigenvectors, matrix exponential, characteristic
//! polynomials, polynomial roots and discriminants.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        CMat { rows: r, cols: c, data: rows.concat() }
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    fn zip_with(&self, other: &CMat, f: impl Fn(Complex64, Complex64) -> Complex64) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "dimension mismatch");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> CMat {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: Complex64, other: &CMat) -> CMat {
        self.zip_with(other, |a, b| a + s * b)
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Induced ∞-norm (max absolute row sum).
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows).map(|i| self.row(i).iter().map(|a| a.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    pub fn lu(&self) -> Lu {
        assert!(self.is_square(), "LU of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let p = (k..n).max_by(|&x, &y| a[(x, k)].norm().total_cmp(&a[(y, k)].norm())).unwrap();
            if a[(p, k)] == ZERO {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(p * n + j, k * n + j);
                }
                perm.swap(p, k);
                sign = -sign;
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let l = a[(i, k)] / pivot;
                a[(i, k)] = l;
                if l == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = a[(k, j)];
                    a[(i, j)] -= l * u;
                }
            }
        }
        Lu { factors: a, perm, sign, singular }
    }

    pub fn det(&self) -> Complex64 {
        self.lu().det()
    }

    pub fn inverse(&self) -> Option<CMat> {
        let lu = self.lu();
        if lu.singular {
            return None;
        }
        let n = self.rows;
        let mut inv = CMat::zeros(n, n);
        for j in 0..n {
            let mut e = vec![ZERO; n];
            e[j] = ONE;
            let x = lu.solve(&e);
            for i in 0..n {
                inv[(i, j)] = x[i];
            }
        }
        Some(inv)
    }

    /// Upper Hessenberg form by Householder reflections (similarity preserved).
    pub fn hessenberg(&self) -> CMat {
        assert!(self.is_square());
        let n = self.rows;
        let mut h = self.clone();
        for k in 0..n.saturating_sub(2) {
            let alpha_norm: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
            if alpha_norm == 0.0 {
                continue;
            }
            let x0 = h[(k + 1, k)];
            let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
            let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
            v[0] += phase * alpha_norm;
            let vnorm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if vnorm == 0.0 {
                continue;
            }
            for z in v.iter_mut() {
                *z /= vnorm;
            }
            // H ← (I − 2vv*) H (I − 2vv*)
            for j in 0..n {
                let s: Complex64 = (k + 1..n).map(|i| v[i - k - 1].conj() * h[(i, j)]).sum();
                for i in k + 1..n {
                    h[(i, j)] -= v[i - k - 1] * s * 2.0;
                }
            }
            for i in 0..n {
                let s: Complex64 = (k + 1..n).map(|j| h[(i, j)] * v[j - k - 1]).sum();
                for j in k + 1..n {
                    h[(i, j)] -= s * v[j - k - 1].conj() * 2.0;
                }
            }
            for i in k + 2..n {
                h[(i, k)] = ZERO;
            }
        }
        h
    }

    /// Eigenvalues by Hessenberg reduction and Wilkinson-shifted complex QR.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>, EigenError> {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return Ok(Vec::new());
        }
        if !self.is_finite() {
            return Err(EigenError::NonFinite);
        }
        // work on a unit-scale copy so that squared norms cannot overflow or underflow
        let scale = self.max_abs();
        if scale == 0.0 {
            return Ok(vec![ZERO; n]);
        }
        let mut h = self.scale(Complex64::new(1.0 / scale, 0.0)).hessenberg();
        let mut eig = vec![ZERO; n];
        let mut hi = n;
        let mut iter = 0usize;
        let mut since_deflation = 0usize;
        while hi > 0 {
            if hi == 1 {
                eig[0] = h[(0, 0)];
                break;
            }
            // find the active unreduced block [lo, hi)
            let mut lo = hi - 1;
            while lo > 0 {
                let sub = h[(lo, lo - 1)].norm();
                let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
                let tiny = f64::EPSILON * if diag > 0.0 { diag } else { 1.0 };
                if sub <= tiny {
                    h[(lo, lo - 1)] = ZERO;
                    break;
                }
                lo -= 1;
            }
            if lo == hi - 1 {
                eig[hi - 1] = h[(hi - 1, hi - 1)];
                hi -= 1;
                since_deflation = 0;
                continue;
            }
            iter += 1;
            since_deflation += 1;
            if iter > 100 * n.max(4) {
                return Err(if h.is_finite() { EigenError::NoConvergence } else { EigenError::NonFinite });
            }
            let shift = if since_deflation % 11 == 10 {
                h[(hi - 1, hi - 1)] + h[(hi - 1, hi - 2)].norm() * Complex64::new(0.75, 0.4)
            } else {
                wilkinson_shift(h[(hi - 2, hi - 2)], h[(hi - 2, hi - 1)], h[(hi - 1, hi - 2)], h[(hi - 1, hi - 1)])
            };
            qr_sweep(&mut h, lo, hi, shift);
        }
        Ok(eig.into_iter().map(|z| z * scale).collect())
    }

    /// Eigenvector for an (approximate) eigenvalue by inverse iteration, unit 2-norm.
    pub fn eigenvector(&self, lambda: Complex64) -> Vec<Complex64> {
        let n = self.rows;
        let scale = self.max_abs().max(1.0);
        let mut perturb = scale * 1e-13;
        let shifted = loop {
            let m = self.sub(&CMat::identity(n).scale(lambda + perturb));
            let lu = m.lu();
            if !lu.singular {
                break lu;
            }
            perturb *= 10.0;
        };
        let mut v: Vec<Complex64> =
            (0..n).map(|i| Complex64::new(1.0 + 0.1 * i as f64, 0.05 * (i as f64).sin())).collect();
        for _ in 0..4 {
            v = shifted.solve(&v);
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                break;
            }
            for z in v.iter_mut() {
                *z /= norm;
            }
        }
        v
    }

    /// `exp(self)` by scaling and squaring with a Taylor series.
    pub fn exp(&self) -> CMat {
        assert!(self.is_square());
        let n = self.rows;
        let norm = self.inf_norm();
        let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
        let a = self.scale(Complex64::new(0.5f64.powi(s), 0.0));
        let mut term = CMat::identity(n);
        let mut sum = CMat::identity(n);
        for k in 1..=30 {
            term = term.mul(&a).scale(Complex64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
            if term.max_abs() <= f64::EPSILON * sum.max_abs() {
                break;
            }
        }
        for _ in 0..s {
            sum = sum.mul(&sum);
        }
        sum
    }

    /// Characteristic polynomial `det(λI − A)` by Faddeev–LeVerrier; coefficients in
    /// ascending order, monic.
    pub fn char_poly(&self) -> Vec<Complex64> {
        assert!(self.is_square());
        let n = self.rows;
        let mut coeffs = vec![ZERO; n + 1];
        coeffs[n] = ONE;
        let mut m = CMat::zeros(n, n);
        for k in 1..=n {
            m = self.mul(&m).add(&CMat::identity(n).scale(coeffs[n - k + 1]));
            let am = self.mul(&m);
            coeffs[n - k] = -am.trace() / k as f64;
        }
        coeffs
    }
}

/// LU factorization with partial pivoting, `P·A = L·U`.
#[derive(Clone, Debug)]
pub struct Lu {
    factors: CMat,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> Complex64 {
        if self.singular {
            return ZERO;
        }
        let n = self.factors.rows;
        (0..n).fold(Complex64::new(self.sign, 0.0), |acc, i| acc * self.factors[(i, i)])
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.factors.rows;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let t = self.factors[(i, k)] * x[k];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = self.factors[(i, k)] * x[k];
                x[i] -= t;
            }
            x[i] /= self.factors[(i, i)];
        }
        x
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EigenError {
    #[error("QR iteration did not converge")]
    NoConvergence,
    #[error("matrix has non-finite entries")]
    NonFinite,
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr * 0.25 - det).sqrt();
    let l1 = tr * 0.5 + disc;
    let l2 = tr * 0.5 - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One implicit-by-explicit shifted QR step on the Hessenberg block `[lo, hi)` via Givens
/// rotations, applied to the full rows/columns so that the matrix stays similar.
fn qr_sweep(h: &mut CMat, lo: usize, hi: usize, shift: Complex64) {
    let n = h.rows;
    for k in lo..hi {
        h[(k, k)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi - 1 {
        let x = h[(k, k)];
        let y = h[(k + 1, k)];
        let r = x.norm().hypot(y.norm());
        let (c, s) = if r == 0.0 { (ONE, ZERO) } else { (x / r, y / r) };
        // G = [[c̄, s̄], [−s, c]]
        for j in k..n {
            let a = h[(k, j)];
            let b = h[(k + 1, j)];
            h[(k, j)] = c.conj() * a + s.conj() * b;
            h[(k + 1, j)] = -s * a + c * b;
        }
        rotations.push((c, s));
    }
    for (idx, (c, s)) in rotations.into_iter().enumerate() {
        let k = lo + idx;
        for i in 0..(k + 2).min(hi) {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = a * c + b * s;
            h[(i, k + 1)] = -a * s.conj() + b * c.conj();
        }
    }
    for k in lo..hi {
        h[(k, k)] += shift;
    }
}

/// Evaluates `Σ c_k x^k` (ascending coefficients) by Horner's rule.
pub fn poly_eval(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(ZERO, |acc, c| acc * x + c)
}

/// Derivative of an ascending-coefficient polynomial.
pub fn poly_derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

/// Roots of `Σ c_k x^k` (ascending) via companion-matrix eigenvalues, each polished by
/// a few Newton steps. Leading zero coefficients are dropped.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, EigenError> {
    let mut deg = coeffs.len();
    while deg > 0 && coeffs[deg - 1] == ZERO {
        deg -= 1;
    }
    if deg <= 1 {
        return Ok(Vec::new());
    }
    let p = &coeffs[..deg];
    let n = deg - 1;
    let lead = p[n];
    let mut comp = CMat::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = ONE;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -p[i] / lead;
    }
    let mut roots = comp.eigenvalues()?;
    let dp = poly_derivative(p);
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = poly_eval(&dp, *r);
            if d == ZERO {
                break;
            }
            let step = poly_eval(p, *r) / d;
            let next = *r - step;
            if !(next.re.is_finite() && next.im.is_finite()) {
                break;
            }
            if poly_eval(p, next).norm() <= poly_eval(p, *r).norm() {
                *r = next;
            } else {
                break;
            }
        }
    }
    Ok(roots)
}

/// Resultant of two ascending-coefficient polynomials via the Sylvester determinant.
pub fn resultant(p: &[Complex64], q: &[Complex64]) -> Complex64 {
    let m = p.len().saturating_sub(1);
    let n = q.len().saturating_sub(1);
    let size = m + n;
    if size == 0 {
        return ONE;
    }
    let mut s = CMat::zeros(size, size);
    for i in 0..n {
        for (k, c) in p.iter().rev().enumerate() {
            s[(i, i + k)] = *c;
        }
    }
    for i in 0..m {
        for (k, c) in q.iter().rev().enumerate() {
            s[(n + i, i + k)] = *c;
        }
    }
    s.det()
}

/// Discriminant `(−1)^{n(n−1)/2} Res(p, p′)/lead(p)`; vanishes iff `p` has a repeated root.
pub fn discriminant(p: &[Complex64]) -> Complex64 {
    let n = p.len().saturating_sub(1);
    if n <= 1 {
        return ONE;
    }
    let res = resultant(p, &poly_derivative(p));
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    res * sign / p[n]
}
