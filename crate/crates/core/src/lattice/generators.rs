//! Test-field generators: hedgehogs, straight windings and smooth noise.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{GroupField, TorusLattice};
use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::scalar::Real;

/// Hedgehog of radius `R` centered at the torus midpoint, built in the
/// primitive `su(2)` of the first simple factor.
pub fn make_hedgehog<S: Real>(lattice: TorusLattice<S>, algebra: Arc<LieAlgebra<S>>, radius: S) -> Result<GroupField<S>> {
    let l = lattice.lengths();
    let center = [l[0], l[1], l[2]].map(|x| x / S::lit(2.0));
    make_hedgehog_at(lattice, algebra, 0, radius, center, 1)
}

/// `u(x) = exp(f(r) Σ_k n̂_k X_k)` with `X_k` the primitive `su(2)` images of
/// factor `factor`, profile `f(r) = (π/2)(1 - t)²(2 + t)` with `t = r/R` for
/// `r < R` and `0` beyond. The profile is C¹ at `R` and `f - π` is odd in `r`,
/// so the field is smooth at the centre.
/// `orientation = -1` reflects `n̂` and flips the degree.
pub fn make_hedgehog_at<S: Real>(
    lattice: TorusLattice<S>,
    algebra: Arc<LieAlgebra<S>>,
    factor: usize,
    radius: S,
    center: [S; 3],
    orientation: i32,
) -> Result<GroupField<S>> {
    let l = lattice.lengths();
    let half = l[0].min(l[1]).min(l[2]) / S::lit(2.0);
    if !(radius > S::zero() && radius < half) {
        return Err(Error::InvalidArgument(format!("hedgehog radius must lie in (0, {half})")));
    }
    let images = algebra
        .factors()
        .get(factor)
        .ok_or_else(|| Error::UnsupportedAlgebra(format!("{} has no factor {factor}", algebra.name())))?
        .embedding
        .images
        .clone();
    let sign = S::lit(orientation.signum() as f64);
    let d = algebra.dim();
    let values = (0..lattice.sites())
        .into_par_iter()
        .map(|s| {
            let x = lattice.position(s);
            let dx = [0, 1, 2].map(|k| x[k] - center[k]);
            let r = (dx[0] * dx[0] + dx[1] * dx[1] + dx[2] * dx[2]).sqrt();
            let mut coords = vec![S::zero(); d];
            if r < radius && r > S::zero() {
                let t = r / radius;
                let f = S::PI() / S::lit(2.0) * (S::one() - t) * (S::one() - t) * (S::lit(2.0) + t);
                for k in 0..3 {
                    for (c, img) in coords.iter_mut().zip(&images[k]) {
                        *c += sign * f * dx[k] / r * *img;
                    }
                }
            } else if r == S::zero() {
                // exp(π n̂·X) = -1 in the su(2) block, independent of n̂
                for (c, img) in coords.iter_mut().zip(&images[2]) {
                    *c += S::PI() * *img;
                }
            }
            algebra.exp_raw(&coords)
        })
        .collect();
    Ok(GroupField::new_unchecked(lattice, algebra, values))
}

/// `u(x) = exp(2π Σ_ℓ m_ℓ x^ℓ / L_ℓ · X)`; `X` must satisfy `exp(2πX) = 1`.
pub fn make_winding<S: Real>(
    lattice: TorusLattice<S>,
    algebra: Arc<LieAlgebra<S>>,
    m: [i64; 3],
    axis: &[S],
) -> Result<GroupField<S>> {
    let two_pi = S::lit(2.0) * S::PI();
    let full: Vec<S> = axis.iter().map(|v| *v * two_pi).collect();
    if algebra.group_exp(&full)?.dist_identity() > S::tol(1e-9) {
        return Err(Error::AxisDoesNotClose);
    }
    let l = lattice.lengths();
    let values = (0..lattice.sites())
        .into_par_iter()
        .map(|s| {
            let x = lattice.position(s);
            let phase: S = (0..3).map(|k| S::lit(m[k] as f64) * x[k] / l[k]).sum::<S>() * two_pi;
            let coords: Vec<S> = axis.iter().map(|v| *v * phase).collect();
            algebra.exp_raw(&coords)
        })
        .collect();
    Ok(GroupField::new_unchecked(lattice, algebra, values))
}

/// Parameters of [`make_random`].
#[derive(Clone, Copy, Debug)]
pub struct RandomOptions {
    pub seed: u64,
    /// Largest Euclidean coordinate norm of the exponent before exponentiation.
    pub amplitude: f64,
    /// Highest Fourier mode per axis; smaller is smoother.
    pub modes: usize,
}

impl Default for RandomOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            amplitude: 1.0,
            modes: 2,
        }
    }
}

/// `exp(X(x))` with `X` a random trigonometric polynomial of low degree,
/// scaled so that its largest coordinate norm is `amplitude`. Deterministic
/// per seed.
pub fn make_random<S: Real>(
    lattice: TorusLattice<S>,
    algebra: Arc<LieAlgebra<S>>,
    opts: RandomOptions,
) -> Result<GroupField<S>> {
    if algebra.partial_bracket() {
        return Err(Error::UnsupportedAlgebra(format!("{} has no group realisation", algebra.name())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let d = algebra.dim();
    let m = opts.modes as i64;
    let mut terms = Vec::new();
    for k0 in -m..=m {
        for k1 in -m..=m {
            for k2 in -m..=m {
                let weight = 1.0 / (1.0 + (k0 * k0 + k1 * k1 + k2 * k2) as f64);
                let cos: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0) * weight).collect();
                let sin: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0) * weight).collect();
                terms.push(([k0, k1, k2], cos, sin));
            }
        }
    }
    let l = lattice.lengths();
    let raw: Vec<Vec<f64>> = (0..lattice.sites())
        .into_par_iter()
        .map(|s| {
            let x = lattice.position(s);
            let mut c = vec![0.0; d];
            for (k, cos, sin) in &terms {
                let phase = 2.0 * std::f64::consts::PI * (0..3).map(|a| k[a] as f64 * x[a].as_f64() / l[a].as_f64()).sum::<f64>();
                let (sp, cp) = phase.sin_cos();
                for a in 0..d {
                    c[a] += cos[a] * cp + sin[a] * sp;
                }
            }
            c
        })
        .collect();
    let peak = raw
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let scale = if peak > 0.0 { opts.amplitude / peak } else { 0.0 };
    let values = raw
        .into_par_iter()
        .map(|c| {
            let v: Vec<S> = c.iter().map(|x| S::lit(x * scale)).collect();
            algebra.exp_raw(&v)
        })
        .collect();
    Ok(GroupField::new_unchecked(lattice, algebra, values))
}
