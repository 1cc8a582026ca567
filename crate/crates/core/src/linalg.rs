//! Small dense complex matrices and the handful of real dense routines the
//! Lie algebra machinery needs.
//!
//! Everything here is sized for group representations (at most a few dozen
//! rows), so the algorithms favour simplicity over asymptotic speed.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::scalar::Real;

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat<S> {
    n: usize,
    data: Vec<Complex<S>>,
}

impl<S: Real> CMat<S> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex::new(S::zero(), S::zero()); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex::new(S::one(), S::zero());
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<S>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_vec(n: usize, data: Vec<Complex<S>>) -> Self {
        assert_eq!(data.len(), n * n, "matrix data length");
        Self { n, data }
    }

    pub fn from_real(n: usize, rows: &[S]) -> Self {
        assert_eq!(rows.len(), n * n);
        Self {
            n,
            data: rows.iter().map(|&x| Complex::new(x, S::zero())).collect(),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn data(&self) -> &[Complex<S>] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [Complex<S>] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<S> {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<S>) {
        self.data[i * self.n + j] = v;
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == S::zero() && a.im == S::zero() {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * *b;
                }
            }
        }
        out
    }

    /// `self^* · rhs` without forming the adjoint.
    pub fn adjoint_mul(&self, rhs: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for k in 0..n {
            for i in 0..n {
                let a = self.data[k * n + i].conj();
                if a.re == S::zero() && a.im == S::zero() {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * *b;
                }
            }
        }
        out
    }

    /// `self · rhs^*`.
    pub fn mul_adjoint(&self, rhs: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex::new(S::zero(), S::zero());
                for k in 0..n {
                    acc += self.data[i * n + k] * rhs.data[j * n + k].conj();
                }
                out.data[i * n + j] = acc;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| self.data[j * n + i].conj())
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| self.data[j * n + i])
    }

    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: S) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    pub fn scale_c(&self, s: Complex<S>) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    /// `self += s · other`
    pub fn axpy(&mut self, s: S, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b * s;
        }
    }

    pub fn trace(&self) -> Complex<S> {
        (0..self.n).map(|i| self.data[i * self.n + i]).fold(
            Complex::new(S::zero(), S::zero()),
            |a, b| a + b,
        )
    }

    /// `Re tr(self^* · rhs)`, the real Frobenius inner product.
    pub fn frob_dot(&self, rhs: &Self) -> S {
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    pub fn frob_norm(&self) -> S {
        self.data.iter().map(|z| z.norm_sqr()).sum::<S>().sqrt()
    }

    pub fn frob_dist(&self, rhs: &Self) -> S {
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (*a - *b).norm_sqr())
            .sum::<S>()
            .sqrt()
    }

    pub fn max_abs(&self) -> S {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(S::zero(), |a, b| a.max(b))
    }

    /// Frobenius distance from the identity.
    pub fn dist_identity(&self) -> S {
        let n = self.n;
        let mut acc = S::zero();
        for i in 0..n {
            for j in 0..n {
                let mut z = self.data[i * n + j];
                if i == j {
                    z.re -= S::one();
                }
                acc += z.norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// `‖A^* A − 1‖_F`
    pub fn unitarity_defect(&self) -> S {
        self.adjoint_mul(self).dist_identity()
    }

    /// `‖A + A^*‖_F`
    pub fn anti_hermitian_defect(&self) -> S {
        let n = self.n;
        let mut acc = S::zero();
        for i in 0..n {
            for j in 0..n {
                acc += (self.data[i * n + j] + self.data[j * n + i].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut inv = Self::identity(n).data;
        let scale = self.max_abs();
        if scale == S::zero() {
            return None;
        }
        let tiny = scale * S::epsilon() * S::lit(16.0);
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].norm();
            for r in col + 1..n {
                let v = a[r * n + col].norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best <= tiny {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                    inv.swap(col * n + j, piv * n + j);
                }
            }
            let d = a[col * n + col].inv();
            for j in 0..n {
                a[col * n + j] *= d;
                inv[col * n + j] *= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f.re == S::zero() && f.im == S::zero() {
                    continue;
                }
                for j in 0..n {
                    let (ac, ic) = (a[col * n + j], inv[col * n + j]);
                    a[r * n + j] -= f * ac;
                    inv[r * n + j] -= f * ic;
                }
            }
        }
        Some(Self { n, data: inv })
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> Complex<S> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = Complex::new(S::one(), S::zero());
        for col in 0..n {
            let mut piv = col;
            let mut best = a[col * n + col].norm();
            for r in col + 1..n {
                let v = a[r * n + col].norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == S::zero() {
                return Complex::new(S::zero(), S::zero());
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            let d = a[col * n + col];
            det *= d;
            let dinv = d.inv();
            for r in col + 1..n {
                let f = a[r * n + col] * dinv;
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= f * v;
                }
            }
        }
        det
    }

    /// Matrix exponential by scaling and squaring of a Taylor polynomial.
    pub fn exp(&self) -> Self {
        let n = self.n;
        let norm = self.frob_norm();
        let mut squarings = 0u32;
        let half = S::lit(0.5);
        let mut s = norm;
        while s > half {
            s = s * half;
            squarings += 1;
        }
        let a = self.scale(S::lit(0.5f64.powi(squarings as i32)));
        let mut result = Self::identity(n);
        let mut term = Self::identity(n);
        for k in 1..=24 {
            term = term.matmul(&a).scale(S::one() / S::lit(k as f64));
            let tn = term.frob_norm();
            result = &result + &term;
            if tn <= S::epsilon() * S::lit(0.01) {
                break;
            }
        }
        for _ in 0..squarings {
            result = result.matmul(&result);
        }
        result
    }

    /// Principal square root by the Denman-Beavers iteration.
    pub fn sqrt(&self) -> Option<Self> {
        let n = self.n;
        let mut y = self.clone();
        let mut z = Self::identity(n);
        let half = S::lit(0.5);
        let tol = S::epsilon() * S::lit(64.0) * (S::one() + self.frob_norm());
        for _ in 0..100 {
            let yi = y.inverse()?;
            let zi = z.inverse()?;
            let y_next = (&y + &zi).scale(half);
            let z_next = (&z + &yi).scale(half);
            let delta = y_next.frob_dist(&y);
            y = y_next;
            z = z_next;
            if delta <= tol {
                return Some(y);
            }
        }
        Some(y)
    }

    /// Principal logarithm by inverse scaling and squaring followed by the
    /// `2 artanh((A-1)(A+1)^{-1})` series. Returns `None` when the matrix has
    /// eigenvalues on or too close to the closed negative real axis.
    pub fn log(&self) -> Option<Self> {
        let n = self.n;
        let id = Self::identity(n);
        let mut a = self.clone();
        let mut roots = 0i32;
        while a.dist_identity() > S::lit(0.25) {
            a = a.sqrt()?;
            roots += 1;
            if roots > 40 {
                return None;
            }
        }
        let num = &a - &id;
        let den = (&a + &id).inverse()?;
        let z = num.matmul(&den);
        let z2 = z.matmul(&z);
        let mut term = z.clone();
        let mut sum = z;
        for j in 1..60 {
            term = term.matmul(&z2);
            let t = term.scale(S::one() / S::lit((2 * j + 1) as f64));
            let tn = t.frob_norm();
            sum = &sum + &t;
            if tn <= S::epsilon() * S::lit(0.01) {
                break;
            }
        }
        Some(sum.scale(S::lit(2.0 * 2f64.powi(roots))))
    }

    /// Largest singular value of a normal matrix by power iteration on `A^* A`.
    pub fn op_norm(&self) -> S {
        let n = self.n;
        if n == 0 {
            return S::zero();
        }
        let h = self.adjoint_mul(self);
        // Deterministic start vector with no special alignment.
        let mut v: Vec<Complex<S>> = (0..n)
            .map(|i| Complex::new(S::one() + S::lit(0.1357 * i as f64), S::lit(0.0731 * (i * i) as f64)))
            .collect();
        let mut lambda = S::zero();
        for _ in 0..200 {
            let mut w = vec![Complex::new(S::zero(), S::zero()); n];
            for i in 0..n {
                for j in 0..n {
                    w[i] += h.data[i * n + j] * v[j];
                }
            }
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<S>().sqrt();
            if norm == S::zero() {
                return S::zero();
            }
            let vn = v.iter().map(|z| z.norm_sqr()).sum::<S>().sqrt();
            let next = norm / vn;
            for z in w.iter_mut() {
                *z = *z / norm;
            }
            v = w;
            if (next - lambda).abs() <= S::epsilon() * S::lit(16.0) * next {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda.sqrt()
    }

    /// Unitary polar factor by the scaled Newton iteration `X ← (X + X^{-*})/2`.
    pub fn polar_unitary(&self) -> Option<Self> {
        let mut x = self.clone();
        let half = S::lit(0.5);
        for _ in 0..100 {
            let xi = x.inverse()?.adjoint();
            let next = (&x + &xi).scale(half);
            let delta = next.frob_dist(&x);
            x = next;
            if delta <= S::epsilon() * S::lit(64.0) * S::lit(self.n as f64) {
                break;
            }
        }
        Some(x)
    }

    /// Row-major vectorisation.
    pub fn to_vec(&self) -> Vec<Complex<S>> {
        self.data.clone()
    }
}

impl<S: Real> Add for &CMat<S> {
    type Output = CMat<S>;
    fn add(self, rhs: Self) -> CMat<S> {
        CMat {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<S: Real> Sub for &CMat<S> {
    type Output = CMat<S>;
    fn sub(self, rhs: Self) -> CMat<S> {
        CMat {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<S: Real> Mul for &CMat<S> {
    type Output = CMat<S>;
    fn mul(self, rhs: Self) -> CMat<S> {
        self.matmul(rhs)
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns ascending eigenvalues and the eigenvectors as columns.
pub fn hermitian_eigen<S: Real>(m: &CMat<S>) -> (Vec<S>, CMat<S>) {
    let n = m.n();
    let mut a = m.data().to_vec();
    let mut v = CMat::<S>::identity(n).data;
    let scale = m.frob_norm().max(S::min_positive_value());
    let zero = Complex::new(S::zero(), S::zero());
    for _sweep in 0..100 {
        let mut off = S::zero();
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q].norm_sqr();
            }
        }
        if off.sqrt() <= S::epsilon() * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r <= S::epsilon() * S::epsilon() * scale {
                    continue;
                }
                let e = apq / r;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (S::lit(2.0) * r);
                let t = if tau >= S::zero() {
                    S::one() / (tau + (S::one() + tau * tau).sqrt())
                } else {
                    -S::one() / (-tau + (S::one() + tau * tau).sqrt())
                };
                let c = S::one() / (S::one() + t * t).sqrt();
                let s = t * c;
                // J has J_pp = J_qq = c, J_pq = s e, J_qp = -s conj(e); A <- J^* A J.
                let jpq = e * s;
                let jqp = -e.conj() * s;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c + akq * jqp;
                    a[k * n + q] = akp * jpq + akq * c;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c + aqk * jqp.conj();
                    a[q * n + k] = apk * jpq.conj() + aqk * c;
                }
                a[p * n + q] = zero;
                a[q * n + p] = zero;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * c + vkq * jqp;
                    v[k * n + q] = vkp * jpq + vkq * c;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.partial_cmp(&a[j * n + j].re).unwrap());
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let vecs = CMat::from_fn(n, |i, j| v[i * n + order[j]]);
    (values, vecs)
}

/// Solves the real `n×n` system `a x = b` by Gaussian elimination.
pub fn solve_real<S: Real>(a: &[S], n: usize, b: &[S]) -> Option<Vec<S>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().fold(S::zero(), |acc, v| acc.max(v.abs()));
    if scale == S::zero() {
        return None;
    }
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r * n + col].abs() > m[piv * n + col].abs() {
                piv = r;
            }
        }
        if m[piv * n + col].abs() <= scale * S::epsilon() * S::lit(16.0) {
            return None;
        }
        if piv != col {
            for j in 0..n {
                m.swap(col * n + j, piv * n + j);
            }
            x.swap(col, piv);
        }
        for r in col + 1..n {
            let f = m[r * n + col] / m[col * n + col];
            if f == S::zero() {
                continue;
            }
            for j in col..n {
                let v = m[col * n + j];
                m[r * n + j] -= f * v;
            }
            let xv = x[col];
            x[r] -= f * xv;
        }
    }
    for col in (0..n).rev() {
        let mut acc = x[col];
        for j in col + 1..n {
            acc -= m[col * n + j] * x[j];
        }
        x[col] = acc / m[col * n + col];
    }
    Some(x)
}

/// Inverse of a real `n×n` matrix.
pub fn invert_real<S: Real>(a: &[S], n: usize) -> Option<Vec<S>> {
    let mut out = vec![S::zero(); n * n];
    for j in 0..n {
        let mut e = vec![S::zero(); n];
        e[j] = S::one();
        let col = solve_real(a, n, &e)?;
        for i in 0..n {
            out[i * n + j] = col[i];
        }
    }
    Some(out)
}

/// Basis of the null space of a real `rows×cols` matrix via reduced row
/// echelon form with threshold `tol` on pivots.
pub fn nullspace_real<S: Real>(a: &[S], rows: usize, cols: usize, tol: S) -> Vec<Vec<S>> {
    let mut m = a.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let mut piv = r;
        for i in r + 1..rows {
            if m[i * cols + c].abs() > m[piv * cols + c].abs() {
                piv = i;
            }
        }
        if m[piv * cols + c].abs() <= tol {
            continue;
        }
        for j in 0..cols {
            m.swap(r * cols + j, piv * cols + j);
        }
        let d = m[r * cols + c];
        for j in 0..cols {
            m[r * cols + j] /= d;
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = m[i * cols + c];
            if f == S::zero() {
                continue;
            }
            for j in 0..cols {
                let v = m[r * cols + j];
                m[i * cols + j] -= f * v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![S::zero(); cols];
            v[f] = S::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row * cols + f];
            }
            v
        })
        .collect()
}
