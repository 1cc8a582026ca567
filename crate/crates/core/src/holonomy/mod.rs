//! Flat connections: developing maps on cubes, edge-path holonomy over a
//! cubical cover of the torus, and gauge reconstruction from equal holonomy.

mod cover;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{gauge_transform_with, AlgebraOneForm, GroupField, TorusLattice};
use crate::lie::{AlgebraSpec, LieAlgebra};
use crate::linalg::{hermitian_eigen, CMat};
use crate::scalar::Real;

pub use cover::CubicalCover;

/// Tolerances for the holonomy algorithms.
#[derive(Clone, Copy, Debug)]
pub struct HolonomyOptions<S> {
    /// Largest plaquette defect `‖P - 1‖_F / (h_i h_j)` accepted by
    /// [`develop_cube`]; `None` means `10·max h_i`.
    pub flatness_gate: Option<S>,
    /// Largest overlap deviation accepted for an edge label.
    pub atlas_tol: S,
    /// Largest mismatch accepted when comparing holonomies and assembling
    /// the gauge transformation.
    pub holonomy_tol: S,
    /// Log threshold for the final gauge check.
    pub log_threshold: S,
    /// Random probes of the conjugator null space.
    pub probes: usize,
    pub seed: u64,
}

impl<S: Real> Default for HolonomyOptions<S> {
    fn default() -> Self {
        Self {
            flatness_gate: None,
            atlas_tol: S::tol(1e-6),
            holonomy_tol: S::tol(1e-6),
            log_threshold: S::lit(crate::lattice::DEFAULT_LOG_THRESHOLD),
            probes: 8,
            seed: 0x5eed,
        }
    }
}

impl<S: Real> HolonomyOptions<S> {
    fn gate(&self, lattice: &TorusLattice<S>) -> S {
        self.flatness_gate.unwrap_or_else(|| {
            let h = lattice.spacings();
            S::lit(10.0) * h[0].max(h[1]).max(h[2])
        })
    }
}

/// Group values on a box of lattice sites `origin + [0, extents)`, with
/// coordinates unwrapped (the box may straddle the periodic seam).
#[derive(Clone, Debug)]
pub struct CubeField<S> {
    pub origin: [isize; 3],
    pub extents: [usize; 3],
    pub values: Vec<CMat<S>>,
}

impl<S: Real> CubeField<S> {
    #[inline]
    pub fn local_index(&self, o: [usize; 3]) -> usize {
        (o[0] * self.extents[1] + o[1]) * self.extents[2] + o[2]
    }

    #[inline]
    pub fn get(&self, o: [usize; 3]) -> &CMat<S> {
        &self.values[self.local_index(o)]
    }

    /// Lattice site of a local offset.
    pub fn site(&self, lattice: &TorusLattice<S>, o: [usize; 3]) -> usize {
        lattice.index([0, 1, 2].map(|k| self.origin[k] + o[k] as isize))
    }

    fn left_mul(&mut self, g: &CMat<S>) {
        for v in self.values.iter_mut() {
            *v = g.matmul(v);
        }
    }

    /// The cube values as a field on a torus with the cube's extents (used
    /// for file output when the cube is not the whole lattice).
    pub fn to_field(&self, lattice: &TorusLattice<S>, algebra: Arc<LieAlgebra<S>>) -> Result<GroupField<S>> {
        let h = lattice.spacings();
        let lat = TorusLattice::new(self.extents, [0, 1, 2].map(|k| h[k] * S::lit(self.extents[k] as f64)))?;
        GroupField::new(lat, algebra, self.values.clone())
    }
}

/// Largest plaquette defect `‖P - 1‖_F / (h_i h_j)` over plaquettes inside a box.
pub fn box_plaquette_residual<S: Real>(a: &AlgebraOneForm<S>, origin: [isize; 3], extents: [usize; 3]) -> S {
    let lat = *a.lattice();
    let h = lat.spacings();
    let count = extents[0] * extents[1] * extents[2];
    let v: Vec<S> = (0..count)
        .into_par_iter()
        .map(|l| {
            let o = [l / (extents[1] * extents[2]), (l / extents[2]) % extents[1], l % extents[2]];
            let mut worst = S::zero();
            for &(i, j) in &crate::lattice::PLANES {
                if o[i] + 1 >= extents[i] || o[j] + 1 >= extents[j] {
                    continue;
                }
                let s = lat.index([0, 1, 2].map(|k| origin[k] + o[k] as isize));
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

/// Solves `u⁻¹du = a` on a box by the corner sweep: transport along the last
/// axis from the corner, then along the middle axis for each of those sites,
/// then along the first axis. `u(corner) = 1`. Each step multiplies by the
/// link transport `exp(h a)`, so the result stays exactly on the group.
pub fn develop_cube<S: Real>(
    a: &AlgebraOneForm<S>,
    origin: [isize; 3],
    extents: [usize; 3],
    flatness_gate: S,
) -> Result<CubeField<S>> {
    if extents.iter().any(|&m| m == 0) {
        return Err(Error::InvalidArgument("empty cube".into()));
    }
    let defect = box_plaquette_residual(a, origin, extents);
    if !(defect <= flatness_gate) {
        return Err(Error::NotFlat(defect.as_f64()));
    }
    Ok(develop_unchecked(a, origin, extents))
}

fn develop_unchecked<S: Real>(a: &AlgebraOneForm<S>, origin: [isize; 3], extents: [usize; 3]) -> CubeField<S> {
    let lat = *a.lattice();
    let n = a.algebra().rep_dim();
    let mut cube = CubeField {
        origin,
        extents,
        values: vec![CMat::identity(n); extents[0] * extents[1] * extents[2]],
    };
    let site = |o: [usize; 3]| lat.index([0, 1, 2].map(|k| origin[k] + o[k] as isize));
    for k in 1..extents[2] {
        let prev = cube.get([0, 0, k - 1]).matmul(&a.transport(2, site([0, 0, k - 1])));
        let idx = cube.local_index([0, 0, k]);
        cube.values[idx] = prev;
    }
    for k in 0..extents[2] {
        for j in 1..extents[1] {
            let prev = cube.get([0, j - 1, k]).matmul(&a.transport(1, site([0, j - 1, k])));
            let idx = cube.local_index([0, j, k]);
            cube.values[idx] = prev;
        }
    }
    let plane = extents[1] * extents[2];
    for i in 1..extents[0] {
        let (done, rest) = cube.values.split_at_mut(i * plane);
        let prev_plane = &done[(i - 1) * plane..];
        rest[..plane].par_iter_mut().enumerate().for_each(|(l, v)| {
            let (j, k) = (l / extents[2], l % extents[2]);
            *v = prev_plane[l].matmul(&a.transport(0, site([i - 1, j, k])));
        });
    }
    cube
}

/// Ordered product of link transports along a lattice path. Consecutive sites
/// must be nearest neighbours; backward steps use the inverse transport.
pub fn path_transport<S: Real>(a: &AlgebraOneForm<S>, path: &[usize]) -> Result<CMat<S>> {
    let lat = *a.lattice();
    let mut g = CMat::identity(a.algebra().rep_dim());
    for w in path.windows(2) {
        let (x, y) = (w[0], w[1]);
        let mut step = None;
        for axis in 0..3 {
            if lat.shift(x, axis, 1) == y {
                step = Some(a.transport(axis, x));
                break;
            }
            if lat.shift(x, axis, -1) == y {
                step = Some(a.transport(axis, y).adjoint());
                break;
            }
        }
        let t = step.ok_or_else(|| Error::InvalidArgument(format!("sites {x} and {y} are not neighbours")))?;
        g = g.matmul(&t);
    }
    Ok(g)
}

/// Per-star developing maps `u_p` (normalized so `u_p(p) = 1`) and the edge
/// labels `g_{[p,q]}` with `u_p = g_{[p,q]} u_q` on overlaps.
#[derive(Clone, Debug)]
pub struct DevelopingAtlas<S> {
    pub cover: CubicalCover,
    lattice: TorusLattice<S>,
    algebra: Arc<LieAlgebra<S>>,
    pub stars: Vec<CubeField<S>>,
    /// `g_{[p, p+e_ℓ]}` indexed by `[p][ℓ]`.
    pub forward: Vec<[CMat<S>; 3]>,
    /// `g_{[p+e_ℓ, p]}` indexed by `[p][ℓ]`.
    pub backward: Vec<[CMat<S>; 3]>,
    /// Overlap deviation of each forward label.
    pub scores: Vec<[S; 3]>,
}

impl<S: Real> DevelopingAtlas<S> {
    pub fn algebra(&self) -> &Arc<LieAlgebra<S>> {
        &self.algebra
    }

    pub fn lattice(&self) -> &TorusLattice<S> {
        &self.lattice
    }

    pub fn max_score(&self) -> S {
        self.scores.iter().flatten().fold(S::zero(), |m, v| m.max(*v))
    }

    /// Largest `‖g_{[p,q]} g_{[q,p]} - 1‖_F` over edges.
    pub fn inverse_defect(&self) -> S {
        let mut worst = S::zero();
        for (f, b) in self.forward.iter().zip(&self.backward) {
            for l in 0..3 {
                worst = worst.max(f[l].matmul(&b[l]).dist_identity());
            }
        }
        worst
    }

    /// Label `g_{[p,q]}` for `q = p + δ` (coarse steps, each in `{-1,0,1}`)
    /// computed from the overlap of the two stars, with its deviation score.
    pub fn overlap_label(&self, p: usize, delta: [isize; 3]) -> Result<(CMat<S>, S)> {
        let s = self.cover.spacing();
        let q = self.cover.offset_vertex(p, delta);
        let lo = [0, 1, 2].map(|k| (-(s[k] as isize)).max(delta[k] * s[k] as isize - s[k] as isize));
        let hi = [0, 1, 2].map(|k| (s[k] as isize).min(delta[k] * s[k] as isize + s[k] as isize));
        if (0..3).any(|k| lo[k] > hi[k]) {
            return Err(Error::InvalidArgument("stars do not overlap".into()));
        }
        let (sp, sq) = (&self.stars[p], &self.stars[q]);
        let mut ratios = Vec::new();
        for o0 in lo[0]..=hi[0] {
            for o1 in lo[1]..=hi[1] {
                for o2 in lo[2]..=hi[2] {
                    let o = [o0, o1, o2];
                    let op = [0, 1, 2].map(|k| (o[k] + s[k] as isize) as usize);
                    let oq = [0, 1, 2].map(|k| (o[k] - delta[k] * s[k] as isize + s[k] as isize) as usize);
                    ratios.push(sp.get(op).mul_adjoint(sq.get(oq)));
                }
            }
        }
        let n = self.algebra.rep_dim();
        let mut mean = CMat::zeros(n);
        let w = S::one() / S::lit(ratios.len() as f64);
        for r in &ratios {
            mean.axpy(w, r);
        }
        let g = self.algebra.project_to_group(&mean)?;
        let score = ratios.iter().map(|r| r.frob_dist(&g)).fold(S::zero(), |m, v| m.max(v));
        Ok((g, score))
    }

    /// Replaces `u_p` by `h_p u_p`, which turns `g_{[p,q]}` into `h_p g_{[p,q]} h_q⁻¹`.
    pub fn relabel(&self, h: &[CMat<S>]) -> Self {
        let mut out = self.clone();
        for (p, star) in out.stars.iter_mut().enumerate() {
            star.left_mul(&h[p]);
        }
        for p in 0..self.cover.vertices() {
            for l in 0..3 {
                let q = self.cover.neighbor(p, l, 1);
                out.forward[p][l] = h[p].matmul(&self.forward[p][l]).mul_adjoint(&h[q]);
                out.backward[p][l] = h[q].matmul(&self.backward[p][l]).mul_adjoint(&h[p]);
            }
        }
        out
    }

    /// `g_{[p,q]}` for an edge of the cover in either direction.
    pub fn edge_label(&self, p: usize, axis: usize, dir: isize) -> &CMat<S> {
        if dir > 0 {
            &self.forward[p][axis]
        } else {
            let q = self.cover.neighbor(p, axis, -1);
            &self.backward[q][axis]
        }
    }
}

/// Develops the connection on every star and labels every edge.
pub fn build_atlas<S: Real>(
    a: &AlgebraOneForm<S>,
    cover: &CubicalCover,
    opts: &HolonomyOptions<S>,
) -> Result<DevelopingAtlas<S>> {
    let lat = *a.lattice();
    cover.check_lattice(&lat)?;
    let gate = opts.gate(&lat);
    let extents = cover.star_extents();
    let stars = (0..cover.vertices())
        .into_par_iter()
        .map(|p| {
            let origin = cover.star_origin(p);
            let mut star = develop_cube(a, origin, extents, gate)?;
            let centre = star.get(cover.spacing()).adjoint();
            star.left_mul(&centre);
            Ok(star)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut atlas = DevelopingAtlas {
        cover: cover.clone(),
        lattice: lat,
        algebra: a.algebra().clone(),
        stars,
        forward: Vec::new(),
        backward: Vec::new(),
        scores: Vec::new(),
    };
    let labels = (0..cover.vertices())
        .into_par_iter()
        .map(|p| {
            let mut fwd: Vec<CMat<S>> = Vec::with_capacity(3);
            let mut bwd: Vec<CMat<S>> = Vec::with_capacity(3);
            let mut sc = [S::zero(); 3];
            for l in 0..3 {
                let mut delta = [0isize; 3];
                delta[l] = 1;
                let (g, score) = atlas.overlap_label(p, delta)?;
                let q = cover.neighbor(p, l, 1);
                delta[l] = -1;
                let (gb, score_b) = atlas.overlap_label(q, delta)?;
                fwd.push(g);
                bwd.push(gb);
                sc[l] = score.max(score_b);
            }
            let to_arr = |v: Vec<CMat<S>>| -> [CMat<S>; 3] {
                let mut it = v.into_iter();
                [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
            };
            Ok((to_arr(fwd), to_arr(bwd), sc))
        })
        .collect::<Result<Vec<_>>>()?;
    for (f, b, s) in labels {
        atlas.forward.push(f);
        atlas.backward.push(b);
        atlas.scores.push(s);
    }
    let worst = atlas.max_score();
    if !(worst <= opts.atlas_tol) {
        return Err(Error::OverlapConstancy(worst.as_f64()));
    }
    Ok(atlas)
}

/// Group elements assigned to the three generator loops of the torus, as
/// products of edge labels around the cover's generator circuits from `p₀`.
#[derive(Clone, Debug)]
pub struct HolonomyRep<S> {
    pub base_vertex: usize,
    pub loops: [CMat<S>; 3],
    /// Lift to `SU(2)` for `SO(3)` connections.
    pub lifted: Option<[CMat<S>; 3]>,
}

impl<S: Real> HolonomyRep<S> {
    pub fn traces(&self) -> [num_complex::Complex<S>; 3] {
        [0, 1, 2].map(|l| self.loops[l].trace())
    }

    /// Largest `‖ρ_ℓ ρ_m - ρ_m ρ_ℓ‖_F`.
    pub fn commutation_defect(&self) -> S {
        let mut worst = S::zero();
        for l in 0..3 {
            for m in l + 1..3 {
                worst = worst.max(self.loops[l].commutator(&self.loops[m]).frob_norm());
            }
        }
        worst
    }

    /// Largest trace difference between two representations.
    pub fn trace_distance(&self, other: &Self) -> S {
        let (a, b) = (self.traces(), other.traces());
        (0..3).map(|l| (a[l] - b[l]).norm()).fold(S::zero(), |m, v| m.max(v))
    }

    /// One line per loop: `loop=<l> trace=<re>+<im>i matrix=[...]`.
    pub fn report(&self) -> Vec<String> {
        (0..3)
            .map(|l| {
                let t = self.loops[l].trace();
                let entries: Vec<String> = self.loops[l]
                    .data()
                    .iter()
                    .map(|z| format!("{:.12}{:+.12}i", z.re.as_f64(), z.im.as_f64()))
                    .collect();
                format!(
                    "loop={} trace={:.12}{:+.12}i matrix=[{}]",
                    l + 1,
                    t.re.as_f64(),
                    t.im.as_f64(),
                    entries.join(",")
                )
            })
            .collect()
    }
}

/// Holonomy of an atlas: `ρ_ℓ = g_{e₁} ⋯ g_{e_n}` around circuit `ℓ`.
pub fn atlas_holonomy<S: Real>(atlas: &DevelopingAtlas<S>) -> HolonomyRep<S> {
    let cover = &atlas.cover;
    let loops = [0, 1, 2].map(|l| {
        let mut g = CMat::identity(atlas.algebra.rep_dim());
        for p in cover.circuit(l) {
            g = g.matmul(&atlas.forward[p][l]);
        }
        g
    });
    HolonomyRep {
        base_vertex: cover.base_vertex(),
        loops,
        lifted: None,
    }
}

/// The `su(2)` connection with the same transports as an `so(3)` one
/// through `L_k ↦ -iσ_k/2`.
pub fn lift_so3_form<S: Real>(a: &AlgebraOneForm<S>) -> Result<AlgebraOneForm<S>> {
    if a.algebra().spec() != AlgebraSpec::So3 {
        return Err(Error::NoLiftTable(a.algebra().name()));
    }
    let su2 = Arc::new(LieAlgebra::<S>::build(AlgebraSpec::Su(2))?);
    AlgebraOneForm::from_fn(*a.lattice(), su2, |c, s| a.get(c, s).iter().map(|v| *v * S::lit(-0.5)).collect())
}

pub fn holonomy_rep<S: Real>(
    a: &AlgebraOneForm<S>,
    cover: &CubicalCover,
    opts: &HolonomyOptions<S>,
) -> Result<HolonomyRep<S>> {
    let mut rep = atlas_holonomy(&build_atlas(a, cover, opts)?);
    if a.algebra().spec() == AlgebraSpec::So3 {
        rep.lifted = Some(atlas_holonomy(&build_atlas(&lift_so3_form(a)?, cover, opts)?).loops);
    }
    Ok(rep)
}

/// Finds `h` in the group with `h ρ²_ℓ h⁻¹ = ρ¹_ℓ` for all loops, from the
/// null space of `Σ_ℓ T_ℓ* T_ℓ`, `T_ℓ(h) = h ρ²_ℓ - ρ¹_ℓ h`.
fn conjugator<S: Real>(
    alg: &LieAlgebra<S>,
    rho1: &[CMat<S>; 3],
    rho2: &[CMat<S>; 3],
    opts: &HolonomyOptions<S>,
) -> Result<CMat<S>> {
    let n = alg.rep_dim();
    let nn = n * n;
    let mut hmat = CMat::zeros(nn);
    for l in 0..3 {
        // column (i,j) of T_ℓ is T_ℓ(E_ij)
        let mut t = CMat::zeros(nn);
        for i in 0..n {
            for j in 0..n {
                let mut e = CMat::zeros(n);
                e.set(i, j, num_complex::Complex::new(S::one(), S::zero()));
                let img = &e.matmul(&rho2[l]) - &rho1[l].matmul(&e);
                for r in 0..nn {
                    t.set(r, i * n + j, img.data()[r]);
                }
            }
        }
        hmat = &hmat + &t.adjoint_mul(&t);
    }
    let (vals, vecs) = hermitian_eigen(&hmat);
    let tol = opts.holonomy_tol * opts.holonomy_tol;
    let null: Vec<usize> = (0..nn).filter(|&k| vals[k] <= tol).collect();
    if null.is_empty() {
        return Err(Error::HolonomiesDiffer(vals[0].max(S::zero()).sqrt().as_f64()));
    }
    let project = |m: &CMat<S>| -> CMat<S> {
        let mut out = CMat::zeros(n);
        for &k in &null {
            let mut dot = num_complex::Complex::new(S::zero(), S::zero());
            for r in 0..nn {
                dot += vecs.get(r, k).conj() * m.data()[r];
            }
            for r in 0..nn {
                let v = out.data()[r] + vecs.get(r, k) * dot;
                out.data_mut()[r] = v;
            }
        }
        out
    };
    let mismatch = |h: &CMat<S>| -> S {
        (0..3)
            .map(|l| h.matmul(&rho2[l]).frob_dist(&rho1[l].matmul(h)))
            .fold(S::zero(), |m, v| m.max(v))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(S, CMat<S>)> = None;
    for probe in 0..=opts.probes {
        let m = if probe == 0 {
            CMat::identity(n)
        } else {
            CMat::from_fn(n, |_, _| {
                num_complex::Complex::new(S::lit(rng.gen_range(-1.0..1.0)), S::lit(rng.gen_range(-1.0..1.0)))
            })
        };
        let p = project(&m);
        if p.frob_norm() < S::tol(1e-8) {
            continue;
        }
        let Ok(h) = alg.project_to_group(&p) else { continue };
        if alg.group_defect(&h) > S::tol(1e-9) {
            continue;
        }
        let r = mismatch(&h);
        if r <= opts.holonomy_tol {
            return Ok(h);
        }
        if best.as_ref().map_or(true, |(b, _)| r < *b) {
            best = Some((r, h));
        }
    }
    Err(Error::HolonomiesDiffer(best.map_or(f64::INFINITY, |(r, _)| r.as_f64())))
}

/// Reconstructs `u` with `a2 = gauge_transform(a1, u)` when both flat
/// connections have the same holonomy.
///
/// Both connections are developed over the cover; the constants `k_p` in
/// `u = (u¹_p)⁻¹ k_p u²_p` start from a conjugator of the holonomies at the
/// base vertex and are carried down the maximal tree by
/// `k_q = g¹_{[q,p]} k_p g²_{[p,q]}`. Non-tree edges must then agree, the
/// star-wise formulas must agree on overlaps, and the result is checked by
/// gauge transforming `a1`.
pub fn gauge_from_holonomy<S: Real>(
    a1: &AlgebraOneForm<S>,
    a2: &AlgebraOneForm<S>,
    cover: &CubicalCover,
    opts: &HolonomyOptions<S>,
) -> Result<GroupField<S>> {
    if a1.lattice() != a2.lattice() || a1.algebra().spec() != a2.algebra().spec() {
        return Err(Error::InvalidArgument("connections live on different lattices or groups".into()));
    }
    let alg = a1.algebra().clone();
    let lat = *a1.lattice();
    let at1 = build_atlas(a1, cover, opts)?;
    let at2 = build_atlas(a2, cover, opts)?;
    let rho1 = atlas_holonomy(&at1).loops;
    let rho2 = atlas_holonomy(&at2).loops;
    let h = conjugator(&alg, &rho1, &rho2, opts)?;

    let nv = cover.vertices();
    let mut k: Vec<Option<CMat<S>>> = vec![None; nv];
    k[cover.base_vertex()] = Some(h);
    for (p, q, axis) in cover.tree_edges() {
        let kp = k[p].clone().expect("tree edges are ordered from the root");
        let g1_qp = at1.edge_label(q, axis, -1);
        let g2_pq = at2.edge_label(p, axis, 1);
        k[q] = Some(g1_qp.matmul(&kp).matmul(g2_pq));
    }
    let k: Vec<CMat<S>> = k.into_iter().map(|x| x.expect("tree spans the cover")).collect();
    let mut edge_mismatch = S::zero();
    for p in 0..nv {
        for axis in 0..3 {
            let q = cover.neighbor(p, axis, 1);
            let predicted = at1.edge_label(q, axis, -1).matmul(&k[p]).matmul(at2.edge_label(p, axis, 1));
            edge_mismatch = edge_mismatch.max(predicted.frob_dist(&k[q]));
        }
    }
    if !(edge_mismatch <= opts.holonomy_tol) {
        return Err(Error::HolonomiesDiffer(edge_mismatch.as_f64()));
    }

    let star_value = |p: usize, o: [usize; 3]| -> CMat<S> {
        at1.stars[p].get(o).adjoint_mul(&k[p]).matmul(at2.stars[p].get(o))
    };
    let values: Vec<CMat<S>> = (0..lat.sites())
        .into_par_iter()
        .map(|x| {
            let (p, o) = cover.nearest_vertex(lat.coords(x));
            star_value(p, o)
        })
        .collect();
    let overlap: S = (0..nv)
        .into_par_iter()
        .map(|p| {
            let star = &at1.stars[p];
            let mut worst = S::zero();
            for l in 0..star.values.len() {
                let e = star.extents;
                let o = [l / (e[1] * e[2]), (l / e[2]) % e[1], l % e[2]];
                let x = star.site(&lat, o);
                worst = worst.max(star_value(p, o).frob_dist(&values[x]));
            }
            worst
        })
        .collect::<Vec<S>>()
        .into_iter()
        .fold(S::zero(), |m, v| m.max(v));
    if !(overlap <= opts.holonomy_tol) {
        return Err(Error::AtlasInconsistent(overlap.as_f64()));
    }
    let u = GroupField::new(lat, alg, values).map_err(|_| Error::AtlasInconsistent(f64::NAN))?;
    let check = gauge_transform_with(a1, &u, opts.log_threshold)?;
    let post = check.max_difference(a2);
    let scale = a2.max_norm().max(S::one());
    if !(post <= opts.holonomy_tol * scale) {
        return Err(Error::AtlasInconsistent(post.as_f64()));
    }
    Ok(u)
}
