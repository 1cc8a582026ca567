//! Anti-Hermitian matrix bases for each supported family in its faithful
//! unitary representation.

use num_complex::Complex;

use crate::linalg::CMat;
use crate::scalar::Real;

fn c<S: Real>(re: f64, im: f64) -> Complex<S> {
    Complex::new(S::lit(re), S::lit(im))
}

fn unit<S: Real>(n: usize, entries: &[(usize, usize, Complex<S>)]) -> CMat<S> {
    let mut m = CMat::zeros(n);
    for &(i, j, v) in entries {
        let old = m.get(i, j);
        m.set(i, j, old + v);
    }
    m
}

/// `su(n)`: off-diagonal pairs `i(E_kl + E_lk)`, `E_kl - E_lk` for `k < l`,
/// then the diagonal `i(E_kk - E_{k+1,k+1})`. For `n = 2` this is
/// `{iσ₁, iσ₂, iσ₃}`.
pub fn su<S: Real>(n: usize) -> Vec<CMat<S>> {
    let mut basis = Vec::new();
    for k in 0..n {
        for l in k + 1..n {
            basis.push(unit(n, &[(k, l, c(0.0, 1.0)), (l, k, c(0.0, 1.0))]));
            basis.push(unit(n, &[(k, l, c(1.0, 0.0)), (l, k, c(-1.0, 0.0))]));
        }
    }
    for k in 0..n - 1 {
        basis.push(unit(n, &[(k, k, c(0.0, 1.0)), (k + 1, k + 1, c(0.0, -1.0))]));
    }
    basis
}

/// `su(2)` images of `iσ₁, iσ₂, iσ₃` in the top-left block of `su(n)`.
pub fn su_primitive<S: Real>(n: usize) -> [CMat<S>; 3] {
    [
        unit(n, &[(0, 1, c(0.0, 1.0)), (1, 0, c(0.0, 1.0))]),
        unit(n, &[(0, 1, c(1.0, 0.0)), (1, 0, c(-1.0, 0.0))]),
        unit(n, &[(0, 0, c(0.0, 1.0)), (1, 1, c(0.0, -1.0))]),
    ]
}

/// `sp(n)` as `2n×2n` matrices `[[A, B], [-B̄, Ā]]` with `A ∈ u(n)` and `B`
/// complex symmetric, i.e. the anti-Hermitian matrices commuting with the
/// quaternionic structure. Ordered so that `sp(1)` reproduces `{iσ₁, iσ₂, iσ₃}`.
pub fn sp<S: Real>(n: usize) -> Vec<CMat<S>> {
    let d = 2 * n;
    let mut basis = Vec::new();
    let block_b = |k: usize, l: usize, v: Complex<S>| {
        // B = v (E_kl + E_lk) (or v E_kk), lower-left block -conj(B).
        let mut e = vec![(k, n + l, v), (n + l, k, -v.conj())];
        if k != l {
            e.push((l, n + k, v));
            e.push((n + k, l, -v.conj()));
        }
        unit(d, &e)
    };
    for k in 0..n {
        for l in k..n {
            basis.push(block_b(k, l, c(0.0, 1.0)));
            basis.push(block_b(k, l, c(1.0, 0.0)));
        }
    }
    for k in 0..n {
        for l in k + 1..n {
            let a = c::<S>(0.0, 1.0);
            basis.push(unit(d, &[(k, l, a), (l, k, a), (n + k, n + l, a.conj()), (n + l, n + k, a.conj())]));
            let r = c::<S>(1.0, 0.0);
            basis.push(unit(d, &[(k, l, r), (l, k, -r), (n + k, n + l, r), (n + l, n + k, -r)]));
        }
    }
    for k in 0..n {
        basis.push(unit(d, &[(k, k, c(0.0, 1.0)), (n + k, n + k, c(0.0, -1.0))]));
    }
    basis
}

pub fn sp_primitive<S: Real>(n: usize) -> [CMat<S>; 3] {
    let d = 2 * n;
    [
        unit(d, &[(0, n, c(0.0, 1.0)), (n, 0, c(0.0, 1.0))]),
        unit(d, &[(0, n, c(1.0, 0.0)), (n, 0, c(-1.0, 0.0))]),
        unit(d, &[(0, 0, c(0.0, 1.0)), (n, n, c(0.0, -1.0))]),
    ]
}

/// The quaternionic structure `J = [[0, 1], [-1, 0]]` on `C^{2n}`.
pub fn sp_structure<S: Real>(n: usize) -> CMat<S> {
    let mut e = Vec::new();
    for k in 0..n {
        e.push((k, n + k, c(1.0, 0.0)));
        e.push((n + k, k, c(-1.0, 0.0)));
    }
    unit(2 * n, &e)
}

fn kron<S: Real>(a: &CMat<S>, b: &CMat<S>) -> CMat<S> {
    let (na, nb) = (a.n(), b.n());
    CMat::from_fn(na * nb, |i, j| a.get(i / nb, j / nb) * b.get(i % nb, j % nb))
}

/// Anti-Hermitian Clifford generators `e_1 … e_m` (`e_i² = -1`) acting on
/// `C^{2^⌊m/2⌋}`, built from Pauli strings.
pub fn clifford_generators<S: Real>(m: usize) -> Vec<CMat<S>> {
    let k = m / 2;
    let id = CMat::<S>::identity(2);
    let x = unit(2, &[(0, 1, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))]);
    let y = unit(2, &[(0, 1, c(0.0, -1.0)), (1, 0, c(0.0, 1.0))]);
    let z = unit(2, &[(0, 0, c(1.0, 0.0)), (1, 1, c(-1.0, 0.0))]);
    let string = |mid: &CMat<S>, j: usize| {
        let mut acc = CMat::<S>::identity(1);
        for pos in 0..k {
            let f = if pos < j {
                &z
            } else if pos == j {
                mid
            } else {
                &id
            };
            acc = kron(&acc, f);
        }
        acc
    };
    let i = c::<S>(0.0, 1.0);
    let mut gens = Vec::with_capacity(m);
    for j in 0..k {
        gens.push(string(&x, j).scale_c(i));
        gens.push(string(&y, j).scale_c(i));
    }
    if m % 2 == 1 {
        gens.push(string(&z, k).scale_c(i));
    }
    gens
}

/// Index pairs `(i, j)`, `i < j`, 0-based, in the order used for the
/// `spin(m)` basis `e_i e_j`.
pub fn bivector_pairs(m: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            v.push((i, j));
        }
    }
    v
}

pub fn spin<S: Real>(m: usize) -> Vec<CMat<S>> {
    let gens = clifford_generators::<S>(m);
    bivector_pairs(m)
        .into_iter()
        .map(|(i, j)| gens[i].matmul(&gens[j]))
        .collect()
}

/// `(iσ₁, iσ₂, iσ₃) ↦ (e₂e₃, e₁e₃, e₁e₂)`, unit scale.
pub fn spin_primitive<S: Real>(m: usize) -> [CMat<S>; 3] {
    let g = clifford_generators::<S>(m);
    [g[1].matmul(&g[2]), g[0].matmul(&g[2]), g[0].matmul(&g[1])]
}

/// The 7×7 real matrix of the `g₂` family for the 14 parameters ordered
/// `λ₂…λ₇, μ₃…μ₇, ν₅, ν₆, ν₇`.
pub fn g2_matrix(p: &[f64; 14]) -> [[f64; 7]; 7] {
    let l = |k: usize| p[k - 2];
    let mu = |k: usize| p[6 + k - 3];
    let nu = |k: usize| p[11 + k - 5];
    [
        [0.0, -l(2), -l(3), -l(4), -l(5), -l(6), -l(7)],
        [l(2), 0.0, -mu(3), -mu(4), -mu(5), -mu(6), -mu(7)],
        [l(3), mu(3), 0.0, mu(5) - l(6), -l(7) - mu(4), l(4) - mu(7), l(5) + mu(6)],
        [l(4), mu(4), l(6) - mu(5), 0.0, -nu(5), -nu(6), -nu(7)],
        [l(5), mu(5), l(7) + mu(4), nu(5), 0.0, -l(2) - nu(7), nu(6) - l(3)],
        [l(6), mu(6), -l(4) + mu(7), nu(6), l(2) + nu(7), 0.0, -mu(3) - nu(5)],
        [l(7), mu(7), -l(5) - mu(6), nu(7), l(3) - nu(6), mu(3) + nu(5), 0.0],
    ]
}

/// Basis index of the `ν₅` parameter.
pub const G2_NU5: usize = 11;

pub fn g2<S: Real>() -> Vec<CMat<S>> {
    (0..14)
        .map(|k| {
            let mut p = [0.0; 14];
            p[k] = 1.0;
            let m = g2_matrix(&p);
            CMat::from_fn(7, |i, j| c(m[i][j], 0.0))
        })
        .collect()
}

/// `so(3)` with `(L_k)_{ij} = -ε_{kij}`, so `[L_x, L_y] = L_z`.
pub fn so3<S: Real>() -> Vec<CMat<S>> {
    let eps = |a: usize, b: usize, d: usize| -> f64 {
        match (a, b, d) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    };
    (0..3)
        .map(|k| CMat::from_fn(3, |i, j| c(-eps(k, i, j), 0.0)))
        .collect()
}

/// `iσ_k ↦ -2 L_k`, the differential of the double cover `SU(2) → SO(3)`.
pub fn so3_primitive<S: Real>() -> [CMat<S>; 3] {
    let b = so3::<S>();
    [b[0].scale(S::lit(-2.0)), b[1].scale(S::lit(-2.0)), b[2].scale(S::lit(-2.0))]
}

/// `u(1)^k` as diagonal `i E_jj`.
pub fn torus<S: Real>(k: usize) -> Vec<CMat<S>> {
    (0..k).map(|j| unit(k, &[(j, j, c(0.0, 1.0))])).collect()
}

/// `su(2) ⊕ su(2)` block-diagonally in `4×4` matrices.
pub fn su2_pair<S: Real>() -> Vec<CMat<S>> {
    let s = su::<S>(2);
    let embed = |m: &CMat<S>, off: usize| {
        let mut out = CMat::zeros(4);
        for i in 0..2 {
            for j in 0..2 {
                out.set(i + off, j + off, m.get(i, j));
            }
        }
        out
    };
    s.iter().map(|m| embed(m, 0)).chain(s.iter().map(|m| embed(m, 2))).collect()
}
