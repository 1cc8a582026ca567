//! Periodic cubic lattices on a flat 3-torus, group-valued fields on their
//! sites, algebra-valued forms on their links and plaquettes, and the two
//! Skyrme energies.

mod generators;
mod io;

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::linalg::CMat;
use crate::scalar::Real;

pub use generators::{make_hedgehog, make_hedgehog_at, make_random, make_winding, RandomOptions};
pub use io::{read_field, read_one_form, write_field, write_one_form};

/// Default bound on `‖g - 1‖_op` for link logarithms.
pub const DEFAULT_LOG_THRESHOLD: f64 = 0.9;

/// Plane order of two-form components: (2,3), (3,1), (1,2).
pub const PLANES: [(usize, usize); 3] = [(1, 2), (2, 0), (0, 1)];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusLattice<S> {
    dims: [usize; 3],
    lengths: [S; 3],
}

impl<S: Real> TorusLattice<S> {
    pub fn new(dims: [usize; 3], lengths: [S; 3]) -> Result<Self> {
        if dims.iter().any(|&n| n < 3) {
            return Err(Error::InvalidLattice(format!("dims {dims:?}: need at least 3 sites per axis")));
        }
        if lengths.iter().any(|&l| !(l > S::zero()) || !l.is_finite()) {
            return Err(Error::InvalidLattice("lengths must be positive".into()));
        }
        Ok(Self { dims, lengths })
    }

    /// `n³` sites on the unit torus.
    pub fn cubic(n: usize) -> Result<Self> {
        Self::new([n; 3], [S::one(); 3])
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn lengths(&self) -> [S; 3] {
        self.lengths
    }

    pub fn spacing(&self, axis: usize) -> S {
        self.lengths[axis] / S::lit(self.dims[axis] as f64)
    }

    pub fn spacings(&self) -> [S; 3] {
        [self.spacing(0), self.spacing(1), self.spacing(2)]
    }

    pub fn cell_volume(&self) -> S {
        self.spacing(0) * self.spacing(1) * self.spacing(2)
    }

    pub fn sites(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    /// Site index with the last axis fastest; coordinates are reduced mod `N_i`.
    #[inline]
    pub fn index(&self, n: [isize; 3]) -> usize {
        let w = |k: usize| n[k].rem_euclid(self.dims[k] as isize) as usize;
        (w(0) * self.dims[1] + w(1)) * self.dims[2] + w(2)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let k = idx % self.dims[2];
        let j = (idx / self.dims[2]) % self.dims[1];
        let i = idx / (self.dims[1] * self.dims[2]);
        [i, j, k]
    }

    #[inline]
    pub fn shift(&self, idx: usize, axis: usize, step: isize) -> usize {
        let c = self.coords(idx);
        let mut n = [c[0] as isize, c[1] as isize, c[2] as isize];
        n[axis] += step;
        self.index(n)
    }

    /// Physical position `x = n·h` of a site.
    pub fn position(&self, idx: usize) -> [S; 3] {
        let c = self.coords(idx);
        [0, 1, 2].map(|k| S::lit(c[k] as f64) * self.spacing(k))
    }
}

/// A group element per lattice site.
#[derive(Clone, Debug)]
pub struct GroupField<S> {
    lattice: TorusLattice<S>,
    algebra: Arc<LieAlgebra<S>>,
    values: Vec<CMat<S>>,
}

impl<S: Real> GroupField<S> {
    /// Wraps site values, checking unitarity and the group's constraints.
    pub fn new(lattice: TorusLattice<S>, algebra: Arc<LieAlgebra<S>>, values: Vec<CMat<S>>) -> Result<Self> {
        if values.len() != lattice.sites() {
            return Err(Error::InvalidArgument(format!(
                "{} site values for {} sites",
                values.len(),
                lattice.sites()
            )));
        }
        if algebra.partial_bracket() {
            return Err(Error::UnsupportedAlgebra(format!("{} has no group realisation", algebra.name())));
        }
        let tol = S::tol(1e-10);
        for (idx, g) in values.iter().enumerate() {
            if g.n() != algebra.rep_dim() {
                return Err(Error::InvalidArgument(format!("site {idx}: wrong matrix size")));
            }
            let d = algebra.group_defect(g);
            if !(d < tol) {
                return Err(Error::InvalidArgument(format!("site {idx} is not in the group (defect {d:e})")));
            }
        }
        Ok(Self {
            lattice,
            algebra,
            values,
        })
    }

    pub(crate) fn new_unchecked(lattice: TorusLattice<S>, algebra: Arc<LieAlgebra<S>>, values: Vec<CMat<S>>) -> Self {
        Self {
            lattice,
            algebra,
            values,
        }
    }

    pub fn constant(lattice: TorusLattice<S>, algebra: Arc<LieAlgebra<S>>, g: CMat<S>) -> Result<Self> {
        let values = vec![g; lattice.sites()];
        Self::new(lattice, algebra, values)
    }

    pub fn identity(lattice: TorusLattice<S>, algebra: Arc<LieAlgebra<S>>) -> Self {
        let n = algebra.rep_dim();
        Self::new_unchecked(lattice, algebra, vec![CMat::identity(n); lattice.sites()])
    }

    /// `exp` of a site-wise algebra field (`sites × dim` coordinates).
    pub fn from_algebra(lattice: TorusLattice<S>, algebra: Arc<LieAlgebra<S>>, coords: &[S]) -> Result<Self> {
        let d = algebra.dim();
        let values = (0..lattice.sites())
            .into_par_iter()
            .map(|s| algebra.group_exp(&coords[s * d..(s + 1) * d]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new_unchecked(lattice, algebra, values))
    }

    pub fn lattice(&self) -> &TorusLattice<S> {
        &self.lattice
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra<S>> {
        &self.algebra
    }

    pub fn values(&self) -> &[CMat<S>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [CMat<S>] {
        &mut self.values
    }

    pub fn get(&self, idx: usize) -> &CMat<S> {
        &self.values[idx]
    }

    /// Largest group defect over all sites.
    pub fn max_defect(&self) -> S {
        self.values
            .iter()
            .map(|g| self.algebra.group_defect(g))
            .fold(S::zero(), |a, b| a.max(b))
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.lattice != other.lattice || self.algebra.spec() != other.algebra.spec() {
            return Err(Error::InvalidArgument("fields live on different lattices or groups".into()));
        }
        Ok(())
    }

    /// Pointwise product `u·w`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.matmul(b)).collect();
        Ok(Self::new_unchecked(self.lattice, self.algebra.clone(), values))
    }

    /// Pointwise `u·w⁻¹`.
    pub fn mul_inverse(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.mul_adjoint(b)).collect();
        Ok(Self::new_unchecked(self.lattice, self.algebra.clone(), values))
    }

    /// `u·g` for a constant `g`.
    pub fn right_mul(&self, g: &CMat<S>) -> Self {
        let values = self.values.iter().map(|a| a.matmul(g)).collect();
        Self::new_unchecked(self.lattice, self.algebra.clone(), values)
    }

    /// `g·u` for a constant `g`.
    pub fn left_mul(&self, g: &CMat<S>) -> Self {
        let values = self.values.iter().map(|a| g.matmul(a)).collect();
        Self::new_unchecked(self.lattice, self.algebra.clone(), values)
    }

    /// Pointwise inverse.
    pub fn inverse(&self) -> Self {
        let values = self.values.iter().map(|a| a.adjoint()).collect();
        Self::new_unchecked(self.lattice, self.algebra.clone(), values)
    }

    /// Largest pointwise Frobenius distance.
    pub fn max_distance(&self, other: &Self) -> S {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.frob_dist(b))
            .fold(S::zero(), |a, b| a.max(b))
    }

    /// Link increment `u(x)⁻¹ u(x + ê_axis)`.
    #[inline]
    pub fn link(&self, idx: usize, axis: usize) -> CMat<S> {
        let next = self.lattice.shift(idx, axis, 1);
        self.values[idx].adjoint_mul(&self.values[next])
    }
}

/// Algebra-valued field with `comps` components per site, stored as flat
/// `sites × dim` coordinate blocks.
#[derive(Clone, Debug)]
pub struct FormData<S, const C: usize> {
    lattice: TorusLattice<S>,
    algebra: Arc<LieAlgebra<S>>,
    comps: [Vec<S>; C],
}

/// Link-located one-form: component `i` at site `x` lives on the link
/// `x → x + ê_i` and has units of inverse length.
pub type AlgebraOneForm<S> = FormData<S, 3>;

/// Plaquette-located two-form with components in [`PLANES`] order.
pub type AlgebraTwoForm<S> = FormData<S, 3>;

/// One algebra element per site.
pub type AlgebraSiteField<S> = FormData<S, 1>;

impl<S: Real, const C: usize> FormData<S, C> {
    pub fn zeros(lattice: TorusLattice<S>, algebra: Arc<LieAlgebra<S>>) -> Self {
        let n = lattice.sites() * algebra.dim();
        Self {
            lattice,
            algebra,
            comps: std::array::from_fn(|_| vec![S::zero(); n]),
        }
    }

    /// Builds from a closure `(component, site) -> coordinates`.
    pub fn from_fn(
        lattice: TorusLattice<S>,
        algebra: Arc<LieAlgebra<S>>,
        f: impl Fn(usize, usize) -> Vec<S> + Sync,
    ) -> Result<Self> {
        let d = algebra.dim();
        let sites = lattice.sites();
        let mut comps: [Vec<S>; C] = std::array::from_fn(|_| Vec::new());
        for (c, comp) in comps.iter_mut().enumerate() {
            let blocks: Vec<Vec<S>> = (0..sites).into_par_iter().map(|s| f(c, s)).collect();
            let mut flat = Vec::with_capacity(sites * d);
            for b in blocks {
                if b.len() != d {
                    return Err(Error::InvalidArgument("component has the wrong dimension".into()));
                }
                flat.extend(b);
            }
            *comp = flat;
        }
        Ok(Self {
            lattice,
            algebra,
            comps,
        })
    }

    pub fn from_components(lattice: TorusLattice<S>, algebra: Arc<LieAlgebra<S>>, comps: [Vec<S>; C]) -> Result<Self> {
        let n = lattice.sites() * algebra.dim();
        if comps.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidArgument("component block has the wrong length".into()));
        }
        Ok(Self {
            lattice,
            algebra,
            comps,
        })
    }

    pub fn lattice(&self) -> &TorusLattice<S> {
        &self.lattice
    }

    pub fn algebra(&self) -> &Arc<LieAlgebra<S>> {
        &self.algebra
    }

    #[inline]
    pub fn get(&self, comp: usize, idx: usize) -> &[S] {
        let d = self.algebra.dim();
        &self.comps[comp][idx * d..(idx + 1) * d]
    }

    #[inline]
    pub fn get_mut(&mut self, comp: usize, idx: usize) -> &mut [S] {
        let d = self.algebra.dim();
        &mut self.comps[comp][idx * d..(idx + 1) * d]
    }

    pub fn component(&self, comp: usize) -> &[S] {
        &self.comps[comp]
    }

    /// Largest coordinate-wise difference.
    pub fn max_difference(&self, other: &Self) -> S {
        self.comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (*x - *y).abs()))
            .fold(S::zero(), |m, v| m.max(v))
    }

    /// Largest algebra norm `|X|` of any component.
    pub fn max_norm(&self) -> S {
        let d = self.algebra.dim();
        self.comps
            .iter()
            .flat_map(|c| c.chunks(d).map(|x| self.algebra.norm_sq_raw(x).max(S::zero()).sqrt()))
            .fold(S::zero(), |m, v| m.max(v))
    }

    /// Cell-volume weighted `L²` norm `sqrt(Σ vol Σ_c |X_c|²)`.
    pub fn l2_norm(&self) -> S {
        let d = self.algebra.dim();
        let sum: S = self
            .comps
            .iter()
            .flat_map(|c| c.chunks(d).map(|x| self.algebra.norm_sq_raw(x)))
            .sum();
        (sum * self.lattice.cell_volume()).max(S::zero()).sqrt()
    }

    /// `X ↦ g⁻¹ X g` for a constant group element `g`, applied to every component.
    pub fn conjugate(&self, g: &CMat<S>) -> Result<Self> {
        let ad = adjoint_action(&self.algebra, &g.adjoint())?;
        let d = self.algebra.dim();
        let comps = std::array::from_fn(|c| {
            let mut out = vec![S::zero(); self.comps[c].len()];
            for (src, dst) in self.comps[c].chunks(d).zip(out.chunks_mut(d)) {
                crate::lie::apply(&ad, d, src, dst);
            }
            out
        });
        Ok(Self {
            lattice: self.lattice,
            algebra: self.algebra.clone(),
            comps,
        })
    }

    pub fn scale(&self, s: S) -> Self {
        Self {
            lattice: self.lattice,
            algebra: self.algebra.clone(),
            comps: std::array::from_fn(|c| self.comps[c].iter().map(|x| *x * s).collect()),
        }
    }
}

impl<S: Real> AlgebraOneForm<S> {
    /// Samples a continuum one-form `f(axis, x)` at link midpoints, which
    /// makes the link transports second-order accurate.
    pub fn sample_midpoints(
        lattice: TorusLattice<S>,
        algebra: Arc<LieAlgebra<S>>,
        f: impl Fn(usize, [S; 3]) -> Vec<S> + Sync,
    ) -> Result<Self> {
        Self::from_fn(lattice, algebra, |axis, site| {
            let mut x = lattice.position(site);
            x[axis] += lattice.spacing(axis) / S::lit(2.0);
            f(axis, x)
        })
    }

    /// Samples a continuum one-form so that every link carries the log of its
    /// exact parallel transport up to `O(h⁵)`: with `A₁, A₂` the values at the
    /// two Gauss points, `h a = (h/2)(A₁ + A₂) + (√3 h²/12)[A₁, A₂]`.
    pub fn sample_transports(
        lattice: TorusLattice<S>,
        algebra: Arc<LieAlgebra<S>>,
        f: impl Fn(usize, [S; 3]) -> Vec<S> + Sync,
    ) -> Result<Self> {
        if algebra.partial_bracket() {
            return Err(Error::PartialBracket);
        }
        let alg = algebra.clone();
        let r3 = S::lit(3.0).sqrt();
        Self::from_fn(lattice, algebra, |axis, site| {
            let h = lattice.spacing(axis);
            let x = lattice.position(site);
            let at = |t: S| {
                let mut y = x;
                y[axis] += t * h;
                f(axis, y)
            };
            let a1 = at(S::lit(0.5) - r3 / S::lit(6.0));
            let a2 = at(S::lit(0.5) + r3 / S::lit(6.0));
            let mut br = alg.zero();
            alg.bracket_into(&a1, &a2, &mut br);
            let c = r3 * h / S::lit(12.0);
            a1.iter()
                .zip(&a2)
                .zip(&br)
                .map(|((p, q), b)| (*p + *q) / S::lit(2.0) + c * *b)
                .collect()
        })
    }

    /// Parallel transport `exp(h_i a_i(x))` along the link `x → x + ê_i`.
    #[inline]
    pub fn transport(&self, axis: usize, idx: usize) -> CMat<S> {
        let h = self.lattice.spacing(axis);
        let x: Vec<S> = self.get(axis, idx).iter().map(|v| *v * h).collect();
        self.algebra.exp_raw(&x)
    }
}

/// Real matrix of `X ↦ g X g⁻¹` in algebra coordinates (`dim × dim`, row-major).
pub fn adjoint_action<S: Real>(alg: &LieAlgebra<S>, g: &CMat<S>) -> Result<Vec<S>> {
    let d = alg.ad_dim();
    if alg.partial_bracket() {
        return Err(Error::PartialBracket);
    }
    let mut m = vec![S::zero(); d * d];
    for (b, e) in alg.basis().iter().enumerate() {
        let conj = g.matmul(e).mul_adjoint(g);
        let (x, _) = alg.coords_of(&conj);
        for a in 0..d {
            m[a * d + b] = x[a];
        }
    }
    Ok(m)
}

/// Coordinates of `(1/h) log(U)` for a link element, with the range gate.
pub(crate) fn link_log<S: Real>(alg: &LieAlgebra<S>, link: &CMat<S>, h: S, threshold: S) -> Result<Vec<S>> {
    // Rounding noise of `g⁻¹g`; keeps constant fields at exactly zero energy.
    if link.dist_identity() <= S::epsilon() * S::lit(16.0 * link.n() as f64) {
        return Ok(alg.zero());
    }
    let (mut x, _) = alg.group_log(link, threshold).map_err(|e| match e {
        Error::LogOutOfRange(_) => Error::FieldTooRough,
        other => other,
    })?;
    for v in x.iter_mut() {
        *v /= h;
    }
    Ok(x)
}

/// `L_i(x) = (1/h_i) log(u(x)⁻¹ u(x + ê_i))` with the default threshold.
pub fn log_derivative<S: Real>(u: &GroupField<S>) -> Result<AlgebraOneForm<S>> {
    log_derivative_with(u, S::lit(DEFAULT_LOG_THRESHOLD))
}

pub fn log_derivative_with<S: Real>(u: &GroupField<S>, threshold: S) -> Result<AlgebraOneForm<S>> {
    let lat = *u.lattice();
    let alg = u.algebra().clone();
    let d = alg.dim();
    let mut comps: [Vec<S>; 3] = Default::default();
    for (axis, comp) in comps.iter_mut().enumerate() {
        let h = lat.spacing(axis);
        let blocks = (0..lat.sites())
            .into_par_iter()
            .map(|s| link_log(&alg, &u.link(s, axis), h, threshold))
            .collect::<Result<Vec<_>>>()?;
        let mut flat = Vec::with_capacity(lat.sites() * d);
        for b in blocks {
            flat.extend(b);
        }
        *comp = flat;
    }
    AlgebraOneForm::from_components(lat, alg, comps)
}

/// Site-local brackets `[L_i, L_j]` in [`PLANES`] order.
pub fn wedge_bracket<S: Real>(l: &AlgebraOneForm<S>) -> AlgebraTwoForm<S> {
    let alg = l.algebra().clone();
    let lat = *l.lattice();
    AlgebraTwoForm::from_fn(lat, alg.clone(), |plane, site| {
        let (i, j) = PLANES[plane];
        let mut out = alg.zero();
        alg.bracket_into(l.get(i, site), l.get(j, site), &mut out);
        out
    })
    .expect("bracket output has algebra dimension")
}

/// Deterministic parallel sum: per-site values are collected in site order
/// and then added sequentially, so results do not depend on the worker count.
pub(crate) fn site_sum<S: Real>(sites: usize, f: impl Fn(usize) -> S + Sync) -> S {
    let v: Vec<S> = (0..sites).into_par_iter().map(&f).collect();
    v.into_iter().sum()
}

pub(crate) fn site_sum_result<S: Real>(sites: usize, f: impl Fn(usize) -> Result<S> + Sync) -> Result<S> {
    let v = (0..sites).into_par_iter().map(&f).collect::<Result<Vec<S>>>()?;
    Ok(v.into_iter().sum())
}

/// Skyrme energy density of the Maurer–Cartan form at one site:
/// `½Σ|L_i|² + ¼Σ_{i<j}|[L_i, L_j]|²`.
fn map_density<S: Real>(alg: &LieAlgebra<S>, l: [&[S]; 3], scratch: &mut [S]) -> S {
    let mut e = S::zero();
    for li in l {
        e += S::lit(0.5) * alg.norm_sq_raw(li);
    }
    for i in 0..3 {
        for j in i + 1..3 {
            alg.bracket_into(l[i], l[j], scratch);
            e += S::lit(0.25) * alg.norm_sq_raw(scratch);
        }
    }
    e
}

/// `E(u) = Σ vol (½Σ|L_i|² + ¼Σ_{i<j}|[L_i, L_j]|²)`.
pub fn skyrme_energy_map<S: Real>(u: &GroupField<S>) -> Result<S> {
    skyrme_energy_map_with(u, S::lit(DEFAULT_LOG_THRESHOLD))
}

pub fn skyrme_energy_map_with<S: Real>(u: &GroupField<S>, threshold: S) -> Result<S> {
    let lat = *u.lattice();
    let alg = u.algebra();
    let h = lat.spacings();
    let total = site_sum_result(lat.sites(), |s| {
        let l0 = link_log(alg, &u.link(s, 0), h[0], threshold)?;
        let l1 = link_log(alg, &u.link(s, 1), h[1], threshold)?;
        let l2 = link_log(alg, &u.link(s, 2), h[2], threshold)?;
        let mut scratch = alg.zero();
        Ok(map_density(alg, [&l0, &l1, &l2], &mut scratch))
    })?;
    Ok(total * lat.cell_volume())
}

/// `E[a] = Σ vol (½Σ|a_i|² + (1/16)Σ_planes |[a, a]_plane|²)` with
/// `[a, a]_{ij} = 2[a_i, a_j]`.
pub fn skyrme_energy_connection<S: Real>(a: &AlgebraOneForm<S>) -> S {
    let lat = *a.lattice();
    let alg = a.algebra();
    let total = site_sum(lat.sites(), |s| {
        let mut e = S::zero();
        for i in 0..3 {
            e += S::lit(0.5) * alg.norm_sq_raw(a.get(i, s));
        }
        let mut br = alg.zero();
        for &(i, j) in &PLANES {
            alg.bracket_into(a.get(i, s), a.get(j, s), &mut br);
            for v in br.iter_mut() {
                *v *= S::lit(2.0);
            }
            e += alg.norm_sq_raw(&br) / S::lit(16.0);
        }
        e
    });
    total * lat.cell_volume()
}

/// Forward-difference curvature `∂_i a_j - ∂_j a_i + [a_i, a_j]` per plane
/// and its cell-volume weighted `L²` norm.
pub fn flatness_residual<S: Real>(a: &AlgebraOneForm<S>) -> (AlgebraTwoForm<S>, S) {
    let lat = *a.lattice();
    let alg = a.algebra().clone();
    let h = lat.spacings();
    let f = AlgebraTwoForm::from_fn(lat, alg.clone(), |plane, s| {
        let (i, j) = PLANES[plane];
        let si = lat.shift(s, i, 1);
        let sj = lat.shift(s, j, 1);
        let mut out = alg.zero();
        alg.bracket_into(a.get(i, s), a.get(j, s), &mut out);
        let (aj, aj_i, ai, ai_j) = (a.get(j, s), a.get(j, si), a.get(i, s), a.get(i, sj));
        for c in 0..alg.dim() {
            out[c] += (aj_i[c] - aj[c]) / h[i] - (ai_j[c] - ai[c]) / h[j];
        }
        out
    })
    .expect("curvature output has algebra dimension");
    let norm = f.l2_norm();
    (f, norm)
}

/// Plaquette holonomy defect: `max ‖P - 1‖_F / (h_i h_j)` over all plaquettes,
/// `P` the ordered product of link transports around the plaquette. Zero
/// exactly for `a = 𝒟w`.
pub fn plaquette_residual<S: Real>(a: &AlgebraOneForm<S>) -> S {
    let lat = *a.lattice();
    let h = lat.spacings();
    let v: Vec<S> = (0..lat.sites())
        .into_par_iter()
        .map(|s| {
            let mut worst = S::zero();
            for &(i, j) in &PLANES {
                let si = lat.shift(s, i, 1);
                let sj = lat.shift(s, j, 1);
                let p = a
                    .transport(i, s)
                    .matmul(&a.transport(j, si))
                    .mul_adjoint(&a.transport(i, sj))
                    .mul_adjoint(&a.transport(j, s));
                worst = worst.max(p.dist_identity() / (h[i] * h[j]));
            }
            worst
        })
        .collect();
    v.into_iter().fold(S::zero(), |m, x| m.max(x))
}

/// Lattice gauge transform `a_i(x) = (1/h_i) log(u(x)⁻¹ exp(h_i b_i(x)) u(x + ê_i))`,
/// the link form of `u⁻¹bu + u⁻¹du`. For `b = 0` this is [`log_derivative`].
pub fn gauge_transform<S: Real>(b: &AlgebraOneForm<S>, u: &GroupField<S>) -> Result<AlgebraOneForm<S>> {
    gauge_transform_with(b, u, S::lit(DEFAULT_LOG_THRESHOLD))
}

pub fn gauge_transform_with<S: Real>(
    b: &AlgebraOneForm<S>,
    u: &GroupField<S>,
    threshold: S,
) -> Result<AlgebraOneForm<S>> {
    if b.lattice() != u.lattice() || b.algebra().spec() != u.algebra().spec() {
        return Err(Error::InvalidArgument("form and field live on different lattices or groups".into()));
    }
    let lat = *u.lattice();
    let alg = u.algebra().clone();
    let d = alg.dim();
    let mut comps: [Vec<S>; 3] = Default::default();
    for (axis, comp) in comps.iter_mut().enumerate() {
        let h = lat.spacing(axis);
        let blocks = (0..lat.sites())
            .into_par_iter()
            .map(|s| {
                let next = lat.shift(s, axis, 1);
                let link = u.get(s).adjoint_mul(&b.transport(axis, s)).matmul(u.get(next));
                link_log(&alg, &link, h, threshold)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut flat = Vec::with_capacity(lat.sites() * d);
        for blk in blocks {
            flat.extend(blk);
        }
        *comp = flat;
    }
    AlgebraOneForm::from_components(lat, alg, comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::AlgebraSpec;
    use std::f64::consts::PI;

    fn su2() -> Arc<LieAlgebra<f64>> {
        Arc::new(LieAlgebra::build(AlgebraSpec::Su(2)).unwrap())
    }

    #[test]
    fn index_round_trip() {
        let lat = TorusLattice::<f64>::new([3, 4, 5], [1.0, 2.0, 3.0]).unwrap();
        for s in 0..lat.sites() {
            let c = lat.coords(s);
            assert_eq!(lat.index([c[0] as isize, c[1] as isize, c[2] as isize]), s);
        }
        assert_eq!(lat.shift(lat.index([2, 0, 0]), 0, 1), lat.index([0, 0, 0]));
        assert_eq!(lat.shift(0, 2, -1), lat.index([0, 0, 4]));
        assert!(TorusLattice::<f64>::new([2, 4, 4], [1.0; 3]).is_err());
    }

    #[test]
    fn linear_phase_has_constant_log_derivative() {
        let alg = su2();
        for (n, threshold) in [(8, DEFAULT_LOG_THRESHOLD), (3, 1.99)] {
            let lat = TorusLattice::cubic(n).unwrap();
            let u = make_winding(lat, alg.clone(), [1, 0, 0], &alg.unit(2)).unwrap();
            let l = log_derivative_with(&u, threshold).unwrap();
            for s in 0..lat.sites() {
                assert!((l.get(0, s)[2] - 2.0 * PI).abs() < 1e-10);
                assert!(l.get(1, s).iter().chain(l.get(2, s)).all(|v| v.abs() < 1e-12));
            }
        }
        let coarse = make_winding(TorusLattice::cubic(5).unwrap(), alg.clone(), [1, 0, 0], &alg.unit(2)).unwrap();
        assert!(matches!(log_derivative(&coarse), Err(Error::FieldTooRough)));
    }

    #[test]
    fn wedge_of_sigma_pair() {
        let alg = su2();
        let lat = TorusLattice::cubic(3).unwrap();
        let l = AlgebraOneForm::from_fn(lat, alg.clone(), |c, _| match c {
            0 => vec![1.0, 0.0, 0.0],
            1 => vec![0.0, 1.0, 0.0],
            _ => vec![0.0; 3],
        })
        .unwrap();
        let w = wedge_bracket(&l);
        let v = w.get(2, 0);
        assert!((v[2] + 2.0).abs() < 1e-14 && v[0].abs() < 1e-14 && v[1].abs() < 1e-14);
    }

    #[test]
    fn constant_commuting_form_is_flat() {
        let alg = su2();
        let lat = TorusLattice::cubic(4).unwrap();
        let a = AlgebraOneForm::from_fn(lat, alg, |c, _| if c == 0 { vec![0.0, 0.0, 0.7] } else { vec![0.0; 3] }).unwrap();
        assert_eq!(flatness_residual(&a).1, 0.0);
        assert!(plaquette_residual(&a) < 1e-14);
    }

    #[test]
    fn gauss_transports_are_fifth_order_per_link() {
        let alg = su2();
        let f = |axis: usize, x: [f64; 3]| if axis == 0 { vec![1.0 + 3.0 * x[0], 2.0 * x[0] * x[0], -1.5] } else { vec![0.0; 3] };
        // fine product oracle along the first link
        let errors = |n: usize| {
            let lat = TorusLattice::cubic(n).unwrap();
            let gauss = AlgebraOneForm::sample_transports(lat, alg.clone(), f).unwrap();
            let mid = AlgebraOneForm::sample_midpoints(lat, alg.clone(), f).unwrap();
            let steps = 4000;
            let dt = lat.spacing(0) / steps as f64;
            let mut exact = CMat::identity(2);
            for k in 0..steps {
                let a: Vec<f64> = f(0, [(k as f64 + 0.5) * dt, 0.0, 0.0]).iter().map(|v| v * dt).collect();
                exact = exact.matmul(&alg.group_exp(&a).unwrap());
            }
            (gauss.transport(0, 0).frob_dist(&exact), mid.transport(0, 0).frob_dist(&exact))
        };
        let (g8, m8) = errors(8);
        let (g16, m16) = errors(16);
        assert!(g8 / g16 > 24.0, "{g8} {g16}");
        assert!((m8 / m16 - 8.0).abs() < 2.0, "{m8} {m16}");
        assert!(g16 < m16 / 50.0);
    }
}
