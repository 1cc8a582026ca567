//! Complexified Clifford algebra with generators `e_i² = -1`, stored as a
//! dense coefficient table over the `2^m` basis blades (bitmask indexed).

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct CliffordElement<S> {
    generators: usize,
    coeffs: Vec<Complex<S>>,
}

/// Grade parity of a Clifford element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// Sign of the blade product `e_a e_b` with `e_i² = -1`.
fn blade_sign(a: u32, b: u32) -> i32 {
    let mut swaps = 0u32;
    let mut x = a >> 1;
    while x != 0 {
        swaps += (x & b).count_ones();
        x >>= 1;
    }
    swaps += (a & b).count_ones();
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

impl<S: Real> CliffordElement<S> {
    pub fn zero(generators: usize) -> Self {
        assert!(generators <= 16, "too many Clifford generators");
        Self {
            generators,
            coeffs: vec![Complex::new(S::zero(), S::zero()); 1 << generators],
        }
    }

    pub fn scalar(generators: usize, value: Complex<S>) -> Self {
        let mut e = Self::zero(generators);
        e.coeffs[0] = value;
        e
    }

    /// The generator `e_i`, 1-based.
    pub fn generator(generators: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= generators);
        Self::blade(generators, 1 << (i - 1), Complex::new(S::one(), S::zero()))
    }

    pub fn blade(generators: usize, mask: u32, value: Complex<S>) -> Self {
        let mut e = Self::zero(generators);
        e.coeffs[mask as usize] = value;
        e
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn coeffs(&self) -> &[Complex<S>] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: u32) -> Complex<S> {
        self.coeffs[mask as usize]
    }

    pub fn scale(&self, s: Complex<S>) -> Self {
        Self {
            generators: self.generators,
            coeffs: self.coeffs.iter().map(|c| *c * s).collect(),
        }
    }

    pub fn norm_sqr(&self) -> S {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn parity(&self) -> Parity {
        let tiny = S::epsilon();
        let mut even = false;
        let mut odd = false;
        for (mask, c) in self.coeffs.iter().enumerate() {
            if c.norm() > tiny {
                if mask.count_ones() % 2 == 0 {
                    even = true;
                } else {
                    odd = true;
                }
            }
        }
        match (even, odd) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            (true, true) => Parity::Mixed,
        }
    }

    pub fn product(&self, rhs: &Self) -> Self {
        assert_eq!(self.generators, rhs.generators);
        let mut out = Self::zero(self.generators);
        let zero = S::zero();
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.re == zero && ca.im == zero {
                continue;
            }
            for (b, cb) in rhs.coeffs.iter().enumerate() {
                if cb.re == zero && cb.im == zero {
                    continue;
                }
                let s = blade_sign(a as u32, b as u32);
                let v = *ca * *cb;
                let dst = &mut out.coeffs[a ^ b];
                if s > 0 {
                    *dst += v;
                } else {
                    *dst -= v;
                }
            }
        }
        out
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.product(rhs) - &rhs.product(self)
    }

    /// Checks `e_i² = -1` and `e_i e_j = -e_j e_i` on all generators; returns
    /// the largest residual.
    pub fn relation_residual(generators: usize) -> S {
        let minus_one = Self::scalar(generators, Complex::new(-S::one(), S::zero()));
        let mut worst = S::zero();
        for i in 1..=generators {
            let ei = Self::generator(generators, i);
            worst = worst.max((&ei.product(&ei) - &minus_one).norm_sqr().sqrt());
            for j in i + 1..=generators {
                let ej = Self::generator(generators, j);
                let anti = &ei.product(&ej) + &ej.product(&ei);
                worst = worst.max(anti.norm_sqr().sqrt());
            }
        }
        worst
    }
}

impl<S: Real> Add for &CliffordElement<S> {
    type Output = CliffordElement<S>;
    fn add(self, rhs: Self) -> CliffordElement<S> {
        CliffordElement {
            generators: self.generators,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| *a + *b).collect(),
        }
    }
}

impl<S: Real> Sub for &CliffordElement<S> {
    type Output = CliffordElement<S>;
    fn sub(self, rhs: Self) -> CliffordElement<S> {
        CliffordElement {
            generators: self.generators,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| *a - *b).collect(),
        }
    }
}

impl<S: Real> Mul for &CliffordElement<S> {
    type Output = CliffordElement<S>;
    fn mul(self, rhs: Self) -> CliffordElement<S> {
        self.product(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type E = CliffordElement<f64>;

    #[test]
    fn generator_relations() {
        assert!(E::relation_residual(10) < 1e-15);
    }

    #[test]
    fn bivector_bracket_matches_rule() {
        // [e1e2, e1e3] = 2 e2e3
        let e = |i| E::generator(4, i);
        let e12 = e(1).product(&e(2));
        let e13 = e(1).product(&e(3));
        let e23 = e(2).product(&e(3));
        let br = e12.commutator(&e13);
        assert!((&br - &e23.scale(Complex::new(2.0, 0.0))).norm_sqr() < 1e-24);
    }

    #[test]
    fn even_elements_close() {
        let e = |i| E::generator(5, i);
        let a = &e(1).product(&e(2)) + &e(3).product(&e(5));
        let b = &e(2).product(&e(4)) + &E::scalar(5, Complex::new(0.5, 1.0));
        assert_eq!(a.parity(), Parity::Even);
        assert_eq!(a.product(&b).parity(), Parity::Even);
        assert_eq!(a.product(&e(1)).parity(), Parity::Odd);
    }
}
