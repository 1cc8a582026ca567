//! Primitive `su(2)` subalgebras and the normalizing constants they certify.

use num_rational::Ratio;

use super::{bases, AlgebraSpec, Factor, LieAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{invert_real, nullspace_real, CMat};
use crate::scalar::Real;

/// Images of `iσ₁, iσ₂, iσ₃` under a Lie algebra homomorphism `su(2) → g`.
#[derive(Clone, Debug)]
pub struct Su2Embedding<S> {
    pub images: [Vec<S>; 3],
    /// Largest violation of `[X_a, X_b] = -2 ε_abc X_c`.
    pub homomorphism_residual: S,
}

impl<S: Real> Su2Embedding<S> {
    /// Image of `v = diag(i, -i) = iσ₃`.
    pub fn image_of_v(&self) -> &[S] {
        &self.images[2]
    }

    fn new(alg: &LieAlgebra<S>, images: [Vec<S>; 3]) -> Result<Self> {
        let mut worst = S::zero();
        let mut br = alg.zero();
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            alg.bracket_into(&images[a], &images[b], &mut br);
            for (x, y) in br.iter().zip(&images[c]) {
                worst = worst.max((*x + S::lit(2.0) * *y).abs());
            }
        }
        if worst > S::tol(1e-9) {
            return Err(Error::Consistency(format!(
                "su(2) embedding into {} is not a homomorphism (residual {worst:e})",
                alg.name()
            )));
        }
        Ok(Self {
            images,
            homomorphism_residual: worst,
        })
    }
}

fn from_matrices<S: Real>(alg: &LieAlgebra<S>, mats: [CMat<S>; 3]) -> Result<[Vec<S>; 3]> {
    let mut out: [Vec<S>; 3] = Default::default();
    for (k, m) in mats.iter().enumerate() {
        let (x, residual) = alg.coords_of(m);
        if residual > S::tol(1e-10) {
            return Err(Error::Consistency(format!("su(2) image {k} is not in {}", alg.name())));
        }
        out[k] = x;
    }
    Ok(out)
}

/// Completes `v` to an `su(2)` triple `(X, Y, v)` with the `iσ` brackets,
/// assuming the `±2i` eigenspace of `ad v` is a single root pair.
pub fn complete_triple<S: Real>(alg: &LieAlgebra<S>, v: &[S]) -> Result<[Vec<S>; 3]> {
    let d = alg.ad_dim();
    let ad = alg.ad_real(v);
    let mut m = vec![S::zero(); d * d];
    for i in 0..d {
        for j in 0..d {
            let mut acc = S::zero();
            for k in 0..d {
                acc += ad[i * d + k] * ad[k * d + j];
            }
            m[i * d + j] = acc;
        }
        m[i * d + i] += S::lit(4.0);
    }
    let null = nullspace_real(&m, d, d, S::tol(1e-8));
    let mut x = null
        .into_iter()
        .next()
        .ok_or_else(|| Error::Consistency("ad v has no eigenvalue 2i".into()))?;
    x.resize(alg.dim(), S::zero());
    let mut y = alg.zero();
    alg.bracket_into(v, &x, &mut y);
    for c in y.iter_mut() {
        *c *= S::lit(-0.5);
    }
    let mut z = alg.zero();
    alg.bracket_into(&x, &y, &mut z);
    let vv: S = v.iter().map(|a| *a * *a).sum();
    let kappa = z.iter().zip(v).map(|(a, b)| *a * *b).sum::<S>() / vv;
    if !(kappa < S::zero()) {
        return Err(Error::Consistency("triple completion has the wrong sign".into()));
    }
    let t = (S::lit(-2.0) / kappa).sqrt();
    for c in x.iter_mut().chain(y.iter_mut()) {
        *c *= t;
    }
    Ok([x, y, v.to_vec()])
}

/// Killing-orthogonal projector onto the span of the columns `span`.
fn projector<S: Real>(alg: &LieAlgebra<S>, span: &[Vec<S>]) -> Result<Vec<S>> {
    let d = alg.ad_dim();
    let r = span.len();
    let b = alg.killing_matrix();
    // W = Vᵀ B, r × d
    let mut w = vec![S::zero(); r * d];
    for (k, col) in span.iter().enumerate() {
        for j in 0..d {
            w[k * d + j] = (0..d).map(|i| col[i] * b[i * d + j]).sum();
        }
    }
    let mut g = vec![S::zero(); r * r];
    for k in 0..r {
        for l in 0..r {
            g[k * r + l] = (0..d).map(|j| w[k * d + j] * span[l][j]).sum();
        }
    }
    let gi = invert_real(&g, r).ok_or_else(|| Error::Consistency("degenerate factor".into()))?;
    let mut p = vec![S::zero(); d * d];
    for i in 0..d {
        for j in 0..d {
            let mut acc = S::zero();
            for k in 0..r {
                for l in 0..r {
                    acc += span[k][i] * gi[k * r + l] * w[l * d + j];
                }
            }
            p[i * d + j] = acc;
        }
    }
    Ok(p)
}

fn identity_projector<S: Real>(d: usize) -> Vec<S> {
    let mut p = vec![S::zero(); d * d];
    for i in 0..d {
        p[i * d + i] = S::one();
    }
    p
}

/// Certifies `K = -8 / Tr(ad(v)²)` as an exact rational.
pub fn certify<S: Real>(alg: &LieAlgebra<S>, v: &[S]) -> Result<(i64, Ratio<i64>)> {
    let trace = alg.killing_raw(v, v);
    let rounded = trace.round();
    if (trace - rounded).abs() > S::tol(1e-9) * rounded.abs().max(S::one()) || rounded >= S::zero() {
        return Err(Error::NonIntegralTrace(trace.as_f64()));
    }
    let t = rounded.as_f64() as i64;
    Ok((t, Ratio::new(-8, t)))
}

fn factor<S: Real>(alg: &LieAlgebra<S>, projector: Vec<S>, images: [Vec<S>; 3]) -> Result<Factor<S>> {
    let embedding = Su2Embedding::new(alg, images)?;
    let (killing_trace, k_constant) = certify(alg, embedding.image_of_v())?;
    Ok(Factor {
        projector,
        embedding,
        killing_trace,
        k_constant,
    })
}

pub(super) fn factors_for<S: Real>(alg: &LieAlgebra<S>) -> Result<Vec<Factor<S>>> {
    let d = alg.ad_dim();
    let simple = |images| factor(alg, identity_projector(d), images).map(|f| vec![f]);
    match alg.spec() {
        AlgebraSpec::Su(n) => simple(from_matrices(alg, bases::su_primitive(n))?),
        AlgebraSpec::Sp(n) => simple(from_matrices(alg, bases::sp_primitive(n))?),
        AlgebraSpec::So3 => simple(from_matrices(alg, bases::so3_primitive())?),
        AlgebraSpec::Spin(4) => spin4_factors(alg),
        AlgebraSpec::Spin(m) => simple(from_matrices(alg, bases::spin_primitive(m))?),
        AlgebraSpec::F4 => simple(from_matrices(alg, bases::spin_primitive(9))?),
        AlgebraSpec::G2 => simple(complete_triple(alg, &alg.unit(bases::G2_NU5))?),
        AlgebraSpec::Torus(_) => Ok(Vec::new()),
        AlgebraSpec::Su2Pair => (0..2)
            .map(|block| {
                let span: Vec<Vec<S>> = (0..3).map(|a| alg.unit(3 * block + a)).collect();
                let p = projector(alg, &span)?;
                factor(alg, p, [span[0].clone(), span[1].clone(), span[2].clone()])
            })
            .collect(),
    }
}

/// Self-dual and anti-self-dual ideals of `spin(4)` in the basis order
/// `e₁e₂, e₁e₃, e₁e₄, e₂e₃, e₂e₄, e₃e₄`.
pub fn spin4_ideals<S: Real>() -> [[Vec<S>; 3]; 2] {
    let v = |a: [f64; 6]| a.iter().map(|x| S::lit(*x)).collect::<Vec<S>>();
    [
        [
            v([1.0, 0.0, 0.0, 0.0, 0.0, 1.0]),
            v([0.0, 1.0, 0.0, 0.0, -1.0, 0.0]),
            v([0.0, 0.0, 1.0, 1.0, 0.0, 0.0]),
        ],
        [
            v([1.0, 0.0, 0.0, 0.0, 0.0, -1.0]),
            v([0.0, 1.0, 0.0, 0.0, 1.0, 0.0]),
            v([0.0, 0.0, 1.0, -1.0, 0.0, 0.0]),
        ],
    ]
}

fn spin4_factors<S: Real>(alg: &LieAlgebra<S>) -> Result<Vec<Factor<S>>> {
    spin4_ideals::<S>()
        .into_iter()
        .map(|span| {
            let p = projector(alg, &span)?;
            let mut v = span[0].clone();
            let b = alg.killing_raw(&v, &v);
            let s = (S::lit(-8.0) / b).sqrt();
            for c in v.iter_mut() {
                *c *= s;
            }
            factor(alg, p, complete_triple(alg, &v)?)
        })
        .collect()
}

/// One line per certified algebra: `algebra=<name> dim=<d> trace=<t> K=<p>/<q>`.
pub fn certificate_line<S: Real>(alg: &LieAlgebra<S>) -> Result<String> {
    let f = alg
        .factors()
        .first()
        .ok_or_else(|| Error::UnsupportedAlgebra(format!("{} has no simple factor", alg.name())))?;
    Ok(format!(
        "algebra={} dim={} trace={} K={}/{}",
        alg.name(),
        alg.dim(),
        f.killing_trace,
        f.k_constant.numer(),
        f.k_constant.denom()
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(spec: AlgebraSpec) -> Ratio<i64> {
        LieAlgebra::<f64>::build(spec).unwrap().normalizing_constant().unwrap()
    }

    #[test]
    fn spin4_splits_into_ideals() {
        let alg = LieAlgebra::<f64>::build(AlgebraSpec::Spin(4)).unwrap();
        let [sd, asd] = spin4_ideals::<f64>();
        let mut br = alg.zero();
        for x in &sd {
            for y in &asd {
                alg.bracket_into(x, y, &mut br);
                assert!(br.iter().all(|c| c.abs() < 1e-12));
            }
        }
        assert_eq!(alg.factors().len(), 2);
        for f in alg.factors() {
            assert_eq!(f.k_constant, Ratio::from_integer(1));
        }
    }

    #[test]
    fn small_constants() {
        assert_eq!(k(AlgebraSpec::Su(2)), Ratio::from_integer(1));
        assert_eq!(k(AlgebraSpec::Sp(1)), Ratio::from_integer(1));
        assert_eq!(k(AlgebraSpec::Spin(3)), Ratio::from_integer(1));
        assert_eq!(k(AlgebraSpec::So3), Ratio::from_integer(1));
    }
}
