//! Sector invariants: the per-factor 3-form charge and the one-dimensional
//! invariant read off the covering-group lift of the generator loops.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::holonomy::{gauge_from_holonomy, CubicalCover, HolonomyOptions};
use crate::lattice::{link_log, log_derivative, make_winding, AlgebraOneForm, GroupField, TorusLattice};
use crate::lie::{AlgebraSpec, CoverKind, LieAlgebra};
use crate::linalg::CMat;
use crate::scalar::Real;

/// Residual gate for rounding charges to integers.
pub const DEFAULT_SECTOR_TOLERANCE: f64 = 0.25;

/// Largest link deviation accepted by the covering lift: about 97°, safely
/// inside the range where the principal logarithm is the continuity lift.
pub const LIFT_THRESHOLD: f64 = 1.5;

/// Deviation gate for the two-link spans of the charge stencil; below `2`
/// every eigen-angle is under π and the principal logarithm is unambiguous.
pub const WIDE_LOG_THRESHOLD: f64 = 1.9;

/// Discretized `c̃^k` of `w = u·v⁻¹` for every simple factor.
///
/// The density `-(K_k / 32π²) B([L̂₁, L̂₂], L̂₃)` is evaluated on a
/// site-centred estimate of `w⁻¹∂_i w`. With `Ω(t) = log(w(x)⁻¹ w(x + t ê_i))`
/// the centred difference `(Ω(h) - Ω(-h)) / 2h` is the average of the two
/// link logs at `x` and has only even error terms, so combining the spans
/// `h` and `2h` as `(4E_h - E_2h)/3` gives a fourth-order estimate.
pub fn topological_charge<S: Real>(u: &GroupField<S>, v_ref: Option<&GroupField<S>>) -> Result<Vec<S>> {
    let w = match v_ref {
        Some(v) => u.mul_inverse(v)?,
        None => u.clone(),
    };
    let l = log_derivative(&w)?;
    let lat = *w.lattice();
    let alg = w.algebra();
    let d = alg.dim();
    let wide = S::lit(WIDE_LOG_THRESHOLD);
    let derivs: Vec<[Vec<S>; 3]> = (0..lat.sites())
        .into_par_iter()
        .map(|s| {
            let mut out: [Vec<S>; 3] = Default::default();
            for (i, slot) in out.iter_mut().enumerate() {
                let h = lat.spacing(i);
                let back = lat.shift(s, i, -1);
                let fwd2 = w.get(s).adjoint_mul(w.get(lat.shift(s, i, 2)));
                let back2 = w.get(s).adjoint_mul(w.get(lat.shift(s, i, -2)));
                let p2 = link_log(alg, &fwd2, h * S::lit(4.0), wide)?;
                let m2 = link_log(alg, &back2, h * S::lit(4.0), wide)?;
                *slot = (0..d)
                    .map(|c| {
                        let e1 = (l.get(i, s)[c] + l.get(i, back)[c]) / S::lit(2.0);
                        let e2 = p2[c] - m2[c];
                        (S::lit(4.0) * e1 - e2) / S::lit(3.0)
                    })
                    .collect();
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let norm = S::lit(32.0) * S::PI() * S::PI();
    let ad = alg.ad_dim();
    Ok(alg
        .factors()
        .iter()
        .map(|f| {
            let kk = crate::lie::ratio_to::<S>(f.k_constant);
            let total = crate::lattice::site_sum(lat.sites(), |s| {
                let p = derivs[s].clone().map(|x| {
                    let mut out = alg.zero();
                    crate::lie::apply(&f.projector, ad, &x, &mut out);
                    out
                });
                let mut br = alg.zero();
                alg.bracket_into(&p[0], &p[1], &mut br);
                alg.killing_raw(&br, &p[2])
            });
            -kk / norm * total * lat.cell_volume()
        })
        .collect())
}

/// Per-loop lift data of the supported covering groups.
fn loop_sites<S: Real>(lat: &TorusLattice<S>, axis: usize) -> Vec<usize> {
    (0..lat.dims()[axis]).map(|t| lat.shift(0, axis, t as isize)).collect()
}

/// Order of each coordinate of `H₁(G₀)` (`0` for `ℤ`) and the rank.
fn lift_shape(spec: AlgebraSpec) -> Result<(u64, usize)> {
    match spec.cover() {
        CoverKind::SimplyConnected => Ok((1, 1)),
        CoverKind::So3 => Ok((2, 1)),
        CoverKind::Torus(k) => Ok((0, k)),
        CoverKind::None => Err(Error::NoLiftTable(spec.to_string())),
    }
}

/// `α_ℓ` for the three generator loops through the origin, as coordinates in
/// `H₁(G₀)`: winding numbers for tori, `0/1` for `SO(3)`, `0` for simply
/// connected groups.
pub fn one_dim_invariant<S: Real>(u: &GroupField<S>) -> Result<[Vec<i64>; 3]> {
    let alg = u.algebra();
    let lat = *u.lattice();
    let (_, rank) = lift_shape(alg.spec())?;
    let threshold = S::lit(LIFT_THRESHOLD);
    let mut alpha: [Vec<i64>; 3] = Default::default();
    for (axis, out) in alpha.iter_mut().enumerate() {
        match alg.spec().cover() {
            CoverKind::SimplyConnected => *out = vec![0],
            CoverKind::Torus(k) => {
                let mut total = vec![S::zero(); k];
                for s in loop_sites(&lat, axis) {
                    let x = link_log(alg, &u.link(s, axis), S::one(), threshold)?;
                    for j in 0..k {
                        total[j] += x[j];
                    }
                }
                let two_pi = S::lit(2.0) * S::PI();
                *out = total
                    .iter()
                    .map(|t| {
                        let n = (*t / two_pi).round();
                        if (*t / two_pi - n).abs() > S::tol(1e-6) {
                            return Err(Error::FieldTooRough);
                        }
                        Ok(n.as_f64() as i64)
                    })
                    .collect::<Result<_>>()?;
            }
            CoverKind::So3 => {
                let mut g = CMat::<S>::identity(2);
                for s in loop_sites(&lat, axis) {
                    let x = link_log(alg, &u.link(s, axis), S::one(), threshold)?;
                    g = g.matmul(&so3_lift(&x));
                }
                let t = g.trace().re / S::lit(2.0);
                if (t.abs() - S::one()).abs() > S::tol(1e-6) {
                    return Err(Error::FieldTooRough);
                }
                *out = vec![if t < S::zero() { 1 } else { 0 }];
            }
            CoverKind::None => unreachable!("rejected by lift_shape"),
        }
        debug_assert_eq!(out.len(), rank);
    }
    Ok(alpha)
}

/// `exp(-½ Σ x_k iσ_k)`, the `SU(2)` element over `exp(Σ x_k L_k)`.
fn so3_lift<S: Real>(x: &[S]) -> CMat<S> {
    let half: Vec<S> = x.iter().map(|v| *v * S::lit(-0.5)).collect();
    let theta = (half[0] * half[0] + half[1] * half[1] + half[2] * half[2]).sqrt();
    let (c, sinc) = if theta > S::zero() {
        (theta.cos(), theta.sin() / theta)
    } else {
        (S::one(), S::one())
    };
    let (a, b, d) = (half[0] * sinc, half[1] * sinc, half[2] * sinc);
    // c + i(a σ1 + b σ2 + d σ3)
    CMat::from_vec(
        2,
        vec![
            Complex::new(c, d),
            Complex::new(b, a),
            Complex::new(-b, a),
            Complex::new(c, -d),
        ],
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct RefKey {
    spec: u32,
    dims: [usize; 3],
    lengths: [u64; 3],
    alpha: [Vec<i64>; 3],
}

/// Fixed reference maps `v_α = ∏ v_ℓ^{a_ℓ}`, built once per lattice, group
/// and class and then shared.
///
/// For `SO(3)` the generators are rotations about the third axis,
/// `v_ℓ(x) = R₃(2π x^ℓ / L_ℓ)`; for tori they are the coordinate phase
/// windings; for simply connected groups `v_α = 1`.
#[derive(Default)]
pub struct ReferenceMaps<S> {
    cache: Mutex<HashMap<RefKey, Arc<GroupField<S>>>>,
}

impl<S: Real> ReferenceMaps<S> {
    pub fn new() -> Self {
        Self {
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn get(
        &self,
        lattice: TorusLattice<S>,
        algebra: &Arc<LieAlgebra<S>>,
        alpha: &[Vec<i64>; 3],
    ) -> Result<Arc<GroupField<S>>> {
        let key = RefKey {
            spec: algebra.spec().group_id(),
            dims: lattice.dims(),
            lengths: lattice.lengths().map(|l| l.as_f64().to_bits()),
            alpha: alpha.clone(),
        };
        if let Some(v) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let v = Arc::new(reference_map(lattice, algebra.clone(), alpha)?);
        self.cache.lock().expect("cache lock").insert(key, v.clone());
        Ok(v)
    }

    /// Sector of a map: `α` from the lift, charges of `u·v_α⁻¹` rounded
    /// with the residual gate.
    pub fn sector_of(&self, u: &GroupField<S>, tolerance: S) -> Result<SectorInvariants<S>> {
        let alpha = one_dim_invariant(u)?;
        let (modulus, _) = lift_shape(u.algebra().spec())?;
        let v = self.get(*u.lattice(), u.algebra(), &alpha)?;
        let raw = topological_charge(u, Some(&v))?;
        SectorInvariants::from_raw(alpha, modulus, raw, tolerance)
    }
}

/// Uncached `v_α`.
pub fn reference_map<S: Real>(
    lattice: TorusLattice<S>,
    algebra: Arc<LieAlgebra<S>>,
    alpha: &[Vec<i64>; 3],
) -> Result<GroupField<S>> {
    let (modulus, rank) = lift_shape(algebra.spec())?;
    if alpha.iter().any(|a| a.len() != rank) {
        return Err(Error::InvalidArgument(format!("alpha entries must have length {rank}")));
    }
    if modulus > 0 && alpha.iter().flatten().any(|&a| a < 0 || a as u64 >= modulus) {
        return Err(Error::InvalidArgument(format!("alpha entries must lie in [0, {modulus})")));
    }
    match algebra.spec().cover() {
        CoverKind::SimplyConnected => Ok(GroupField::identity(lattice, algebra)),
        CoverKind::So3 => make_winding(lattice, algebra.clone(), [0, 1, 2].map(|l| alpha[l][0]), &algebra.unit(2)),
        CoverKind::Torus(k) => {
            let l = lattice.lengths();
            let two_pi = S::lit(2.0) * S::PI();
            let values = (0..lattice.sites())
                .map(|s| {
                    let x = lattice.position(s);
                    let coords: Vec<S> = (0..k)
                        .map(|j| two_pi * (0..3).map(|a| S::lit(alpha[a][j] as f64) * x[a] / l[a]).sum::<S>())
                        .collect();
                    algebra.group_exp(&coords)
                })
                .collect::<Result<Vec<_>>>()?;
            GroupField::new(lattice, algebra, values)
        }
        CoverKind::None => Err(Error::NoLiftTable(algebra.name())),
    }
}

/// `sector_of` with fresh reference maps and the default tolerance.
pub fn sector_of<S: Real>(u: &GroupField<S>) -> Result<SectorInvariants<S>> {
    ReferenceMaps::new().sector_of(u, S::lit(DEFAULT_SECTOR_TOLERANCE))
}

/// The sector label `(α; c¹, …, c^N)` with the raw charges behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorInvariants<S> {
    /// `α_ℓ` per generator loop, one entry per coordinate of `H₁(G₀)`.
    pub alpha: [Vec<i64>; 3],
    /// Order of each `H₁(G₀)` coordinate, `0` meaning `ℤ`.
    pub modulus: u64,
    pub charges_raw: Vec<S>,
    pub charges: Vec<i64>,
    pub residuals: Vec<S>,
}

impl<S: Real> SectorInvariants<S> {
    pub fn from_raw(alpha: [Vec<i64>; 3], modulus: u64, charges_raw: Vec<S>, tolerance: S) -> Result<Self> {
        let charges: Vec<i64> = charges_raw.iter().map(|c| c.round().as_f64() as i64).collect();
        let residuals: Vec<S> = charges_raw
            .iter()
            .zip(&charges)
            .map(|(c, n)| (*c - S::lit(*n as f64)).abs())
            .collect();
        let worst = residuals.iter().fold(S::zero(), |m, r| m.max(*r));
        if !(worst < tolerance) {
            return Err(Error::UnresolvedSector(worst.as_f64()));
        }
        Ok(Self {
            alpha,
            modulus,
            charges_raw,
            charges,
            residuals,
        })
    }

    /// Same `α` and integer charges.
    pub fn same_sector(&self, other: &Self) -> bool {
        self.alpha == other.alpha && self.charges == other.charges
    }

    pub fn max_residual(&self) -> S {
        self.residuals.iter().fold(S::zero(), |m, r| m.max(*r))
    }

    /// `α` as `(a1,a2,a3)`; multi-coordinate entries are joined with `:`.
    pub fn alpha_string(&self) -> String {
        let parts: Vec<String> = self
            .alpha
            .iter()
            .map(|a| a.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(":"))
            .collect();
        format!("({})", parts.join(","))
    }

    pub fn report(&self) -> String {
        let list = |v: Vec<String>| format!("({})", v.join(","));
        let mut out = String::new();
        let _ = write!(
            out,
            "alpha={} c~={} c={} residual={}",
            self.alpha_string(),
            list(self.charges_raw.iter().map(|c| format!("{:.6}", round_off_sign(c.as_f64()))).collect()),
            list(self.charges.iter().map(|c| c.to_string()).collect()),
            list(self.residuals.iter().map(|r| format!("{:.3e}", r.as_f64())).collect()),
        );
        out
    }
}

// Keeps `-0.000000` out of reports.
fn round_off_sign(x: f64) -> f64 {
    if x.abs() < 5e-7 {
        0.0
    } else {
        x
    }
}

/// Sector of a flat potential `a` relative to a reference `b` with the same
/// holonomy: the map `u` with `a = gauge_transform(b, u)` is reconstructed and
/// classified.
pub fn invariant_of_connection<S: Real>(
    a: &AlgebraOneForm<S>,
    b: &AlgebraOneForm<S>,
    cover: &CubicalCover,
    opts: &HolonomyOptions<S>,
    refs: &ReferenceMaps<S>,
    tolerance: S,
) -> Result<SectorInvariants<S>> {
    let u = gauge_from_holonomy(b, a, cover, opts).map_err(|e| match e {
        Error::HolonomiesDiffer(_) => Error::HolonomyStratum,
        other => other,
    })?;
    refs.sector_of(&u, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{gauge_transform, make_hedgehog, make_random, RandomOptions};

    fn alg(spec: AlgebraSpec) -> Arc<LieAlgebra<f64>> {
        Arc::new(LieAlgebra::build(spec).unwrap())
    }

    #[test]
    fn constant_has_zero_charge() {
        let a = alg(AlgebraSpec::Su(3));
        let lat = TorusLattice::cubic(6).unwrap();
        let g = a.group_exp(&(0..8).map(|i| 0.1 * i as f64).collect::<Vec<_>>()).unwrap();
        let u = GroupField::constant(lat, a, g).unwrap();
        let s = sector_of(&u).unwrap();
        assert_eq!(s.charges, vec![0]);
        assert!(s.charges_raw[0].abs() < 1e-14);
        assert_eq!(s.alpha_string(), "(0,0,0)");
    }

    #[test]
    fn u1_winding_is_exact() {
        let a = alg(AlgebraSpec::Torus(1));
        let lat = TorusLattice::cubic(8).unwrap();
        let u = make_winding(lat, a, [1, 2, 0], &[1.0]).unwrap();
        let alpha = one_dim_invariant(&u).unwrap();
        assert_eq!(alpha, [vec![1], vec![2], vec![0]]);
    }

    #[test]
    fn so3_rotation_has_odd_alpha() {
        let a = alg(AlgebraSpec::So3);
        let lat = TorusLattice::cubic(8).unwrap();
        let u = make_winding(lat, a.clone(), [1, 0, 0], &a.unit(2)).unwrap();
        let s = sector_of(&u).unwrap();
        assert_eq!(s.alpha, [vec![1], vec![0], vec![0]]);
        assert_eq!(s.charges, vec![0]);
        let u2 = make_winding(lat, a.clone(), [2, 0, 0], &a.unit(2)).unwrap();
        assert_eq!(one_dim_invariant(&u2).unwrap(), [vec![0], vec![0], vec![0]]);
    }

    #[test]
    fn reference_map_round_trips() {
        let lat = TorusLattice::cubic(8).unwrap();
        let so3 = alg(AlgebraSpec::So3);
        let refs = ReferenceMaps::new();
        for a in 0..2 {
            for b in 0..2 {
                let alpha = [vec![a], vec![b], vec![1 - a]];
                let v = refs.get(lat, &so3, &alpha).unwrap();
                assert_eq!(one_dim_invariant(&v).unwrap(), alpha);
            }
        }
        let t2 = alg(AlgebraSpec::Torus(2));
        let alpha = [vec![1, -1], vec![0, 2], vec![-1, 0]];
        let v = reference_map(lat, t2, &alpha).unwrap();
        assert_eq!(one_dim_invariant(&v).unwrap(), alpha);
        assert!(reference_map(lat, so3, &[vec![2], vec![0], vec![0]]).is_err());
    }

    #[test]
    fn f4_has_no_lift() {
        assert!(matches!(lift_shape(AlgebraSpec::F4), Err(Error::NoLiftTable(_))));
    }

    #[test]
    fn hedgehog_has_unit_charge() {
        let a = alg(AlgebraSpec::Su(2));
        let lat = TorusLattice::cubic(16).unwrap();
        let u = make_hedgehog(lat, a, 0.45).unwrap();
        let s = sector_of(&u).unwrap();
        assert_eq!(s.charges, vec![1]);
    }

    #[test]
    fn connection_invariant_matches_map() {
        let a = alg(AlgebraSpec::Su(2));
        let lat = TorusLattice::cubic(16).unwrap();
        let u = make_hedgehog(lat, a.clone(), 0.45).unwrap();
        let form = log_derivative(&u).unwrap();
        let zero = AlgebraOneForm::zeros(lat, a.clone());
        let cover = CubicalCover::default_for(&lat).unwrap();
        let refs = ReferenceMaps::new();
        let s = invariant_of_connection(&form, &zero, &cover, &HolonomyOptions::default(), &refs, 0.25).unwrap();
        assert!(s.same_sector(&sector_of(&u).unwrap()));

        let v = make_random(lat, a.clone(), RandomOptions { seed: 2, amplitude: 1.0, modes: 1 }).unwrap();
        let shifted = gauge_transform(&zero, &v).unwrap();
        let r = invariant_of_connection(&shifted, &zero, &cover, &HolonomyOptions::default(), &refs, 0.25).unwrap();
        assert_eq!(r.charges, vec![0]);
    }
}
