//! The 16-dimensional spinor `Δ₉` inside the complexified Clifford algebra
//! on ten generators, and the `spin(9)` action on it.

use num_complex::Complex;

use super::bases::bivector_pairs;
use super::clifford::CliffordElement;
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::scalar::Real;

const GENERATORS: usize = 10;

/// Factor patterns of the `Δ₉` basis: `false` for `ε_j`, `true` for `ω_j`.
const PATTERNS: [[u8; 5]; 16] = [
    [0, 0, 0, 0, 0],
    [1, 1, 0, 0, 0],
    [1, 0, 1, 0, 0],
    [1, 0, 0, 1, 0],
    [1, 0, 0, 0, 1],
    [0, 1, 1, 0, 0],
    [0, 1, 0, 1, 0],
    [0, 1, 0, 0, 1],
    [0, 0, 1, 1, 0],
    [0, 0, 1, 0, 1],
    [0, 0, 0, 1, 1],
    [1, 1, 1, 1, 0],
    [1, 1, 1, 0, 1],
    [1, 1, 0, 1, 1],
    [1, 0, 1, 1, 1],
    [0, 1, 1, 1, 1],
];

/// `ε_j = 1 - i e_{2j-1} e_{2j}`, `j` 1-based.
pub fn epsilon<S: Real>(j: usize) -> CliffordElement<S> {
    let pair = CliffordElement::<S>::generator(GENERATORS, 2 * j - 1)
        .product(&CliffordElement::generator(GENERATORS, 2 * j));
    let one = CliffordElement::scalar(GENERATORS, Complex::new(S::one(), S::zero()));
    &one - &pair.scale(Complex::new(S::zero(), S::one()))
}

/// `ω_j = e_{2j-1} + i e_{2j}`, `j` 1-based.
pub fn omega<S: Real>(j: usize) -> CliffordElement<S> {
    let a = CliffordElement::<S>::generator(GENERATORS, 2 * j - 1);
    let b = CliffordElement::<S>::generator(GENERATORS, 2 * j);
    &a + &b.scale(Complex::new(S::zero(), S::one()))
}

pub fn delta9_basis<S: Real>() -> Vec<CliffordElement<S>> {
    PATTERNS
        .iter()
        .map(|pat| {
            let mut acc = CliffordElement::scalar(GENERATORS, Complex::new(S::one(), S::zero()));
            for (k, &w) in pat.iter().enumerate() {
                let f = if w == 1 { omega(k + 1) } else { epsilon(k + 1) };
                acc = acc.product(&f);
            }
            acc
        })
        .collect()
}

/// Largest residual of `a · (i e_{2j-1} e_{2j}) = -a` over the basis and `j`.
pub fn delta9_condition_residual<S: Real>() -> S {
    let mut worst = S::zero();
    for a in delta9_basis::<S>() {
        for j in 1..=5 {
            let pair = CliffordElement::<S>::generator(GENERATORS, 2 * j - 1)
                .product(&CliffordElement::generator(GENERATORS, 2 * j))
                .scale(Complex::new(S::zero(), S::one()));
            let lhs = a.product(&pair);
            worst = worst.max((&lhs + &a).norm_sqr().sqrt());
        }
    }
    worst
}

/// `Δ₉` basis together with the matrices of left multiplication by each
/// `spin(9)` basis element `e_i e_j` (same ordering as the `spin(9)` basis).
pub struct SpinorBlock<S> {
    pub basis: Vec<CliffordElement<S>>,
    pub action: Vec<CMat<S>>,
    /// Largest distance of `e_i e_j · b` from the span of the basis.
    pub residual: S,
}

pub fn spinor_block<S: Real>() -> Result<SpinorBlock<S>> {
    let basis = delta9_basis::<S>();
    let n = basis.len();
    let inner = |a: &CliffordElement<S>, b: &CliffordElement<S>| -> Complex<S> {
        a.coeffs()
            .iter()
            .zip(b.coeffs())
            .map(|(x, y)| x.conj() * *y)
            .fold(Complex::new(S::zero(), S::zero()), |s, v| s + v)
    };
    let gram = CMat::from_fn(n, |k, l| inner(&basis[k], &basis[l]));
    let gram_inv = gram
        .inverse()
        .ok_or_else(|| Error::Consistency("spinor basis is degenerate".into()))?;
    let mut residual = S::zero();
    let mut action = Vec::new();
    for (i, j) in bivector_pairs(9) {
        let a = CliffordElement::<S>::generator(GENERATORS, i + 1)
            .product(&CliffordElement::generator(GENERATORS, j + 1));
        let mut rho = CMat::zeros(n);
        for l in 0..n {
            let image = a.product(&basis[l]);
            let r: Vec<Complex<S>> = basis.iter().map(|b| inner(b, &image)).collect();
            let mut rebuilt = CliffordElement::zero(GENERATORS);
            for k in 0..n {
                let coeff = (0..n)
                    .map(|m| gram_inv.get(k, m) * r[m])
                    .fold(Complex::new(S::zero(), S::zero()), |s, v| s + v);
                rho.set(k, l, coeff);
                rebuilt = &rebuilt + &basis[k].scale(coeff);
            }
            residual = residual.max((&rebuilt - &image).norm_sqr().sqrt());
        }
        action.push(rho);
    }
    if residual > S::tol(1e-10) {
        return Err(Error::Consistency(format!("spin(9) does not preserve the spinor span ({residual:e})")));
    }
    Ok(SpinorBlock {
        basis,
        action,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::Parity;

    #[test]
    fn basis_is_even_and_independent() {
        let basis = delta9_basis::<f64>();
        assert_eq!(basis.len(), 16);
        for b in &basis {
            assert_eq!(b.parity(), Parity::Even);
            assert!(b.norm_sqr() > 1.0);
        }
        assert!(spinor_block::<f64>().is_ok());
    }

    #[test]
    fn right_multiplication_condition_holds() {
        assert!(delta9_condition_residual::<f64>() < 1e-12);
    }

    #[test]
    fn action_is_a_representation() {
        let block = spinor_block::<f64>().unwrap();
        let pairs = bivector_pairs(9);
        let e = |k: usize| {
            let (i, j) = pairs[k];
            CliffordElement::<f64>::generator(10, i + 1).product(&CliffordElement::generator(10, j + 1))
        };
        // [e1e2, e1e3] = 2 e2e3
        let (a, b) = (0, 1);
        let c = pairs.iter().position(|&p| p == (1, 2)).unwrap();
        let lhs = block.action[a].commutator(&block.action[b]);
        let rhs = block.action[c].scale(2.0);
        assert!(lhs.frob_dist(&rhs) < 1e-12);
        let direct = e(a).commutator(&e(b));
        assert!((&direct - &e(c).scale(Complex::new(2.0, 0.0))).norm_sqr() < 1e-20);
    }
}
