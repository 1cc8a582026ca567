//! Sector-preserving descent of the Skyrme energy over lattice maps, and
//! over flat potentials through the gauge parameterization.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::invariants::{reference_map, ReferenceMaps, SectorInvariants, DEFAULT_SECTOR_TOLERANCE};
use crate::lattice::{
    gauge_transform_with, make_hedgehog_at, plaquette_residual, AlgebraOneForm, AlgebraSiteField, GroupField,
    TorusLattice, DEFAULT_LOG_THRESHOLD,
};
use crate::lie::{apply, LieAlgebra};
use crate::linalg::{invert_real, CMat};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug)]
pub struct MinimizeOptions<S> {
    pub max_iters: usize,
    /// Stop once the `L²` norm of the Riemannian gradient field is at most this.
    pub grad_tol: S,
    /// First trial step; `None` means `0.1·min h_i²`.
    pub initial_step: Option<S>,
    /// Backtracking factor in `(0, 1)`; accepted steps grow by its inverse.
    pub shrink: S,
    /// Armijo sufficient-decrease constant in `(0, 0.5]`.
    pub decrease: S,
    pub max_backtracks: usize,
    /// Iterations between sector snapshots.
    pub sector_interval: usize,
    pub sector_tolerance: S,
    pub log_threshold: S,
}

impl<S: Real> Default for MinimizeOptions<S> {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            grad_tol: S::lit(1e-6),
            initial_step: None,
            shrink: S::lit(0.5),
            decrease: S::lit(1e-4),
            max_backtracks: 40,
            sector_interval: 10,
            sector_tolerance: S::lit(DEFAULT_SECTOR_TOLERANCE),
            log_threshold: S::lit(DEFAULT_LOG_THRESHOLD),
        }
    }
}

impl<S: Real> MinimizeOptions<S> {
    pub fn validate(&self) -> Result<()> {
        if !(self.shrink > S::zero() && self.shrink < S::one()) {
            return Err(Error::InvalidArgument("shrink must lie in (0, 1)".into()));
        }
        if !(self.decrease > S::zero() && self.decrease <= S::lit(0.5)) {
            return Err(Error::InvalidArgument("decrease constant must lie in (0, 0.5]".into()));
        }
        if self.sector_interval == 0 {
            return Err(Error::InvalidArgument("sector interval must be positive".into()));
        }
        if let Some(t) = self.initial_step {
            if !(t > S::zero()) {
                return Err(Error::InvalidArgument("initial step must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    GradientTolerance,
    MaxIters,
}

#[derive(Clone, Debug)]
pub struct TraceRecord<S> {
    pub iter: usize,
    pub energy: S,
    pub grad_norm: S,
    /// Accepted step (`0` for the initial record).
    pub step: S,
    pub sector: Option<SectorInvariants<S>>,
}

#[derive(Clone, Debug)]
pub struct MinimizeTrace<S> {
    pub records: Vec<TraceRecord<S>>,
    pub initial_sector: SectorInvariants<S>,
    pub termination: Termination,
}

impl<S: Real> MinimizeTrace<S> {
    pub fn final_energy(&self) -> S {
        self.records.last().map(|r| r.energy).unwrap_or_else(S::zero)
    }

    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iter)
    }

    /// `E(u_{t+1}) ≤ E(u_t)` for every recorded step.
    pub fn is_monotone(&self) -> bool {
        self.records.windows(2).all(|w| w[1].energy <= w[0].energy)
    }

    /// Every snapshot lies in the initial sector.
    pub fn sector_constant(&self) -> bool {
        self.records
            .iter()
            .filter_map(|r| r.sector.as_ref())
            .all(|s| s.same_sector(&self.initial_sector))
    }

    /// CSV with header `iter,energy,grad_norm,step,alpha,c_rounded,c_residual`;
    /// the sector columns are empty between snapshots and charges of several
    /// factors are joined with `:`.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "iter,energy,grad_norm,step,alpha,c_rounded,c_residual")?;
        for r in &self.records {
            let (alpha, c, res) = match &r.sector {
                Some(s) => (
                    s.alpha_string(),
                    s.charges.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(":"),
                    s.residuals.iter().map(|x| format!("{:.6e}", x.as_f64())).collect::<Vec<_>>().join(":"),
                ),
                None => Default::default(),
            };
            writeln!(
                w,
                "{},{:.15e},{:.6e},{:.6e},\"{}\",{},{}",
                r.iter,
                r.energy.as_f64(),
                r.grad_norm.as_f64(),
                r.step.as_f64(),
                alpha,
                c,
                res
            )?;
        }
        Ok(())
    }
}

/// Coefficients of `z / (e^z - 1) = Σ a_n zⁿ`.
fn bernoulli_series(terms: usize) -> Vec<f64> {
    let mut fact = vec![1.0f64; terms + 2];
    for k in 1..fact.len() {
        fact[k] = fact[k - 1] * k as f64;
    }
    let mut a = vec![0.0f64; terms];
    a[0] = 1.0;
    for n in 1..terms {
        a[n] = -(0..n).map(|k| a[k] / fact[n + 1 - k]).sum::<f64>();
    }
    a
}

const PSI_TERMS: usize = 48;

/// `ψ(s·A)ᵀ p` with `ψ(z) = z / (1 - e^{-z})` and `A` row-major `d × d`.
fn psi_transpose_apply<S: Real>(coef: &[S], a: &[S], d: usize, sign: S, p: &[S]) -> Vec<S> {
    let mut term = p.to_vec();
    let mut sum = p.to_vec();
    let mut next = vec![S::zero(); d];
    for (n, c) in coef.iter().enumerate().skip(1) {
        for j in 0..d {
            let mut acc = S::zero();
            for i in 0..d {
                acc += a[i * d + j] * term[i];
            }
            next[j] = -sign * acc;
        }
        std::mem::swap(&mut term, &mut next);
        let size = term.iter().fold(S::zero(), |m, v| m.max(v.abs()));
        for j in 0..d {
            sum[j] += *c * term[j];
        }
        if n > 2 && size * c.abs() <= S::epsilon() * S::epsilon() {
            break;
        }
    }
    sum
}

/// `E_b(u) = E[gauge_transform(b, u)]` on the link elements
/// `U_i(x) = u(x)⁻¹ exp(h_i b_i(x)) u(x + ê_i)`; `b = None` is the map energy.
struct Objective<'a, S> {
    b: Option<&'a AlgebraOneForm<S>>,
    threshold: S,
    metric_inv: Option<Vec<S>>,
    psi: Vec<S>,
}

impl<'a, S: Real> Objective<'a, S> {
    fn new(algebra: &LieAlgebra<S>, b: Option<&'a AlgebraOneForm<S>>, threshold: S) -> Self {
        let d = algebra.ad_dim();
        Self {
            b,
            threshold,
            metric_inv: invert_real(algebra.metric(), d),
            psi: bernoulli_series(PSI_TERMS).into_iter().map(S::lit).collect(),
        }
    }

    fn link(&self, u: &GroupField<S>, s: usize, axis: usize) -> CMat<S> {
        match self.b {
            None => u.link(s, axis),
            Some(b) => {
                let next = u.lattice().shift(s, axis, 1);
                u.get(s).adjoint_mul(&b.transport(axis, s)).matmul(u.get(next))
            }
        }
    }

    /// Unscaled link logs `ℓ_i(x)` for all sites, indexed `[site][axis]`.
    fn link_logs(&self, u: &GroupField<S>) -> Result<Vec<[Vec<S>; 3]>> {
        let alg = u.algebra();
        (0..u.lattice().sites())
            .into_par_iter()
            .map(|s| {
                let mut out: [Vec<S>; 3] = Default::default();
                for (i, slot) in out.iter_mut().enumerate() {
                    *slot = crate::lattice::link_log(alg, &self.link(u, s, i), S::one(), self.threshold)?;
                }
                Ok(out)
            })
            .collect()
    }

    fn energy(&self, u: &GroupField<S>) -> Result<S> {
        let lat = *u.lattice();
        let alg = u.algebra();
        let h = lat.spacings();
        let total = crate::lattice::site_sum_result(lat.sites(), |s| {
            let l: Vec<Vec<S>> = (0..3)
                .map(|i| {
                    let x = crate::lattice::link_log(alg, &self.link(u, s, i), h[i], self.threshold)?;
                    Ok(x)
                })
                .collect::<Result<_>>()?;
            let mut e = S::zero();
            let mut br = alg.zero();
            for i in 0..3 {
                e += S::lit(0.5) * alg.norm_sq_raw(&l[i]);
                for j in i + 1..3 {
                    alg.bracket_into(&l[i], &l[j], &mut br);
                    e += S::lit(0.25) * alg.norm_sq_raw(&br);
                }
            }
            Ok(e)
        })?;
        Ok(total * lat.cell_volume())
    }

    /// Euclidean coordinate gradient `d(y) = ∂E/∂X` of `t ↦ E(u·exp(tX_y))`.
    fn differential(&self, u: &GroupField<S>) -> Result<Vec<Vec<S>>> {
        let lat = *u.lattice();
        let alg = u.algebra();
        let d = alg.ad_dim();
        let h = lat.spacings();
        let vol = lat.cell_volume();
        let metric = alg.metric();
        let logs = self.link_logs(u)?;
        // P_i(x) = ∂(vol·e)/∂L_i at x
        let p: Vec<[Vec<S>; 3]> = (0..lat.sites())
            .into_par_iter()
            .map(|s| {
                let l: [Vec<S>; 3] = std::array::from_fn(|i| logs[s][i].iter().map(|v| *v / h[i]).collect());
                let ads: [Vec<S>; 3] = std::array::from_fn(|i| alg.ad_real(&l[i]));
                std::array::from_fn(|i| {
                    let mut out = alg.zero();
                    apply(metric, d, &l[i], &mut out);
                    for j in 0..3 {
                        if j == i {
                            continue;
                        }
                        let mut c = alg.zero();
                        alg.bracket_into(&l[i], &l[j], &mut c);
                        let mut mc = alg.zero();
                        apply(metric, d, &c, &mut mc);
                        // ∂C_ij/∂L_i = -ad(L_j)
                        for b in 0..d {
                            let mut acc = S::zero();
                            for a in 0..d {
                                acc += ads[j][a * d + b] * mc[a];
                            }
                            out[b] -= S::lit(0.5) * acc;
                        }
                    }
                    for v in out.iter_mut() {
                        *v *= vol;
                    }
                    out
                })
            })
            .collect();
        Ok((0..lat.sites())
            .into_par_iter()
            .map(|y| {
                let mut g = vec![S::zero(); d];
                for i in 0..3 {
                    let back = lat.shift(y, i, -1);
                    let here = psi_transpose_apply(&self.psi, &alg.ad_real(&logs[y][i]), d, -S::one(), &p[y][i]);
                    let there = psi_transpose_apply(&self.psi, &alg.ad_real(&logs[back][i]), d, S::one(), &p[back][i]);
                    for c in 0..d {
                        g[c] += (there[c] - here[c]) / h[i];
                    }
                }
                g
            })
            .collect())
    }

    /// Riemannian gradient density `G = M⁻¹ d / vol` and `‖G‖² = Σ G·d`.
    fn gradient(&self, u: &GroupField<S>) -> Result<(AlgebraSiteField<S>, S)> {
        let lat = *u.lattice();
        let alg = u.algebra();
        let d = alg.ad_dim();
        let vol = lat.cell_volume();
        let diff = self.differential(u)?;
        let mut flat = Vec::with_capacity(lat.sites() * alg.dim());
        let mut norm_sq = S::zero();
        for dy in &diff {
            let mut g = alg.zero();
            match &self.metric_inv {
                Some(mi) => apply(mi, d, dy, &mut g),
                None => g[..d].copy_from_slice(dy),
            }
            for v in g.iter_mut() {
                *v /= vol;
            }
            norm_sq += g.iter().zip(dy).map(|(a, b)| *a * *b).sum::<S>();
            flat.extend(g);
        }
        let field = AlgebraSiteField::from_components(lat, alg.clone(), [flat])?;
        Ok((field, norm_sq.max(S::zero()).sqrt()))
    }
}

/// Riemannian gradient of `E(u)` for the right variation `u·exp(tX)`:
/// `dE(u·exp(tX_x))/dt = vol·⟨G(x), X⟩` in the algebra metric.
///
/// Each link log `ℓ = log U` moves by `ψ(ad ℓ) X` under `U ↦ U exp(tX)` and
/// by `-ψ(-ad ℓ) X` under `U ↦ exp(-tX) U`, with `ψ(z) = z / (1 - e^{-z})`.
pub fn lattice_gradient<S: Real>(u: &GroupField<S>) -> Result<AlgebraSiteField<S>> {
    Ok(Objective::new(u.algebra(), None, S::lit(DEFAULT_LOG_THRESHOLD)).gradient(u)?.0)
}

/// `E[gauge_transform(b, u)]` without building the transformed form.
pub fn connection_objective<S: Real>(b: &AlgebraOneForm<S>, u: &GroupField<S>) -> Result<S> {
    Objective::new(u.algebra(), Some(b), S::lit(DEFAULT_LOG_THRESHOLD)).energy(u)
}

fn step_field<S: Real>(u: &GroupField<S>, g: &AlgebraSiteField<S>, tau: S) -> GroupField<S> {
    let alg = u.algebra();
    let values = (0..u.lattice().sites())
        .into_par_iter()
        .map(|s| {
            let x: Vec<S> = g.get(0, s).iter().map(|v| -tau * *v).collect();
            u.get(s).matmul(&alg.exp_raw(&x))
        })
        .collect();
    GroupField::new_unchecked(*u.lattice(), alg.clone(), values)
}

fn descend<S: Real>(
    u0: &GroupField<S>,
    objective: &Objective<'_, S>,
    opts: &MinimizeOptions<S>,
) -> Result<(GroupField<S>, MinimizeTrace<S>)> {
    opts.validate()?;
    let refs = ReferenceMaps::new();
    let initial = refs.sector_of(u0, opts.sector_tolerance)?;
    let lat = *u0.lattice();
    let h = lat.spacings();
    let hmin = h[0].min(h[1]).min(h[2]);
    let mut tau = opts.initial_step.unwrap_or(S::lit(0.1) * hmin * hmin);
    let mut u = u0.clone();
    let mut energy = objective.energy(&u)?;
    let (mut grad, mut gnorm) = objective.gradient(&u)?;
    let mut records = vec![TraceRecord {
        iter: 0,
        energy,
        grad_norm: gnorm,
        step: S::zero(),
        sector: Some(initial.clone()),
    }];
    let mut termination = Termination::MaxIters;
    for iter in 1..=opts.max_iters {
        if gnorm <= opts.grad_tol {
            termination = Termination::GradientTolerance;
            break;
        }
        let mut accepted = None;
        for _ in 0..opts.max_backtracks {
            let trial = step_field(&u, &grad, tau);
            if let Ok(e) = objective.energy(&trial) {
                if e <= energy - opts.decrease * tau * gnorm * gnorm {
                    accepted = Some((trial, e));
                    break;
                }
            }
            tau *= opts.shrink;
        }
        let (next, e) = accepted.ok_or(Error::Stalled(iter))?;
        u = next;
        energy = e;
        (grad, gnorm) = objective.gradient(&u)?;
        let sector = if iter % opts.sector_interval == 0 || iter == opts.max_iters || gnorm <= opts.grad_tol {
            let s = refs
                .sector_of(&u, opts.sector_tolerance)
                .map_err(|_| Error::SectorDrift(iter))?;
            if !s.same_sector(&initial) {
                return Err(Error::SectorDrift(iter));
            }
            Some(s)
        } else {
            None
        };
        records.push(TraceRecord {
            iter,
            energy,
            grad_norm: gnorm,
            step: tau,
            sector,
        });
        tau /= opts.shrink;
    }
    if termination == Termination::MaxIters && gnorm <= opts.grad_tol {
        termination = Termination::GradientTolerance;
    }
    Ok((
        u,
        MinimizeTrace {
            records,
            initial_sector: initial,
            termination,
        },
    ))
}

/// Armijo descent `u ← u·exp(-τG)` on `E(u)`, aborting if a sector snapshot
/// leaves the initial sector.
pub fn minimize_map<S: Real>(u0: &GroupField<S>, opts: &MinimizeOptions<S>) -> Result<(GroupField<S>, MinimizeTrace<S>)> {
    let objective = Objective::new(u0.algebra(), None, opts.log_threshold);
    descend(u0, &objective, opts)
}

/// A field in the requested sector: `v_α` times one hedgehog per simple
/// factor with charge `±1`.
pub fn seed_for_sector<S: Real>(
    lattice: TorusLattice<S>,
    algebra: Arc<LieAlgebra<S>>,
    sector: &SectorInvariants<S>,
) -> Result<GroupField<S>> {
    if algebra.partial_bracket() || sector.charges.len() != algebra.factors().len() {
        return Err(Error::NoSeed);
    }
    let v = reference_map(lattice, algebra.clone(), &sector.alpha).map_err(|_| Error::NoSeed)?;
    let l = lattice.lengths();
    let center = l.map(|x| x / S::lit(2.0));
    let radius = S::lit(0.45) * l[0].min(l[1]).min(l[2]);
    let mut u = v;
    for (k, &c) in sector.charges.iter().enumerate() {
        if c == 0 {
            continue;
        }
        if c.abs() > 1 {
            return Err(Error::NoSeed);
        }
        let hog = make_hedgehog_at(lattice, algebra.clone(), k, radius, center, c.signum() as i32)?;
        u = hog.mul(&u)?;
    }
    let got = ReferenceMaps::new().sector_of(&u, S::lit(DEFAULT_SECTOR_TOLERANCE)).map_err(|_| Error::NoSeed)?;
    if !got.same_sector(sector) {
        return Err(Error::NoSeed);
    }
    Ok(u)
}

/// Minimizes `E[gauge_transform(b, u)]` over maps `u` seeded in `sector` and
/// returns the minimizing potential.
pub fn minimize_connection<S: Real>(
    b: &AlgebraOneForm<S>,
    sector: &SectorInvariants<S>,
    opts: &MinimizeOptions<S>,
) -> Result<(AlgebraOneForm<S>, GroupField<S>, MinimizeTrace<S>)> {
    let lat = *b.lattice();
    let h = lat.spacings();
    let gate = S::lit(10.0) * h[0].max(h[1]).max(h[2]);
    let defect = plaquette_residual(b);
    if !(defect <= gate) {
        return Err(Error::NotFlat(defect.as_f64()));
    }
    let u0 = seed_for_sector(lat, b.algebra().clone(), sector)?;
    let objective = Objective::new(b.algebra(), Some(b), opts.log_threshold);
    let (u, trace) = descend(&u0, &objective, opts)?;
    let a = gauge_transform_with(b, &u, opts.log_threshold)?;
    Ok((a, u, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_random, make_winding, skyrme_energy_map, RandomOptions};
    use crate::lie::AlgebraSpec;

    fn su2() -> Arc<LieAlgebra<f64>> {
        Arc::new(LieAlgebra::build(AlgebraSpec::Su(2)).unwrap())
    }

    #[test]
    fn bernoulli_coefficients() {
        let a = bernoulli_series(8);
        let expect = [1.0, -0.5, 1.0 / 12.0, 0.0, -1.0 / 720.0, 0.0, 1.0 / 30240.0, 0.0];
        for (x, y) in a.iter().zip(expect) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    /// Independent oracle: directional derivative from the exact matrix log.
    fn fd_derivative(u: &GroupField<f64>, site: usize, dir: &[f64], eps: f64) -> f64 {
        let alg = u.algebra();
        let shift = |t: f64| {
            let mut v = u.clone();
            let x: Vec<f64> = dir.iter().map(|d| d * t).collect();
            v.values_mut()[site] = u.get(site).matmul(&alg.group_exp(&x).unwrap());
            skyrme_energy_map(&v).unwrap()
        };
        (shift(eps) - shift(-eps)) / (2.0 * eps)
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let alg = su2();
        let lat = TorusLattice::new([8, 8, 8], [1.0, 1.2, 0.9]).unwrap();
        let u = make_random(lat, alg.clone(), RandomOptions { seed: 4, amplitude: 0.8, modes: 1 }).unwrap();
        let g = lattice_gradient(&u).unwrap();
        let vol = lat.cell_volume();
        for site in [0, 17, 100, 311, 511] {
            for a in 0..3 {
                let e = alg.unit(a);
                let fd = fd_derivative(&u, site, &e, 1e-5);
                let mut mg = alg.zero();
                apply(alg.metric(), 3, g.get(0, site), &mut mg);
                let an = vol * mg[a];
                assert!((fd - an).abs() <= 1e-6 * fd.abs().max(1e-3), "site {site} dir {a}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn straight_winding_is_critical() {
        let alg = su2();
        let lat = TorusLattice::cubic(8).unwrap();
        let u = make_winding(lat, alg.clone(), [1, 0, 0], &alg.unit(2)).unwrap();
        assert!(lattice_gradient(&u).unwrap().max_norm() < 1e-10);
    }

    #[test]
    fn constant_stops_immediately() {
        let alg = su2();
        let lat = TorusLattice::cubic(6).unwrap();
        let g = alg.group_exp(&[0.3, 0.1, -0.2]).unwrap();
        let u = GroupField::constant(lat, alg, g).unwrap();
        let (v, trace) = minimize_map(&u, &MinimizeOptions::default()).unwrap();
        assert_eq!(trace.iterations(), 0);
        assert_eq!(trace.termination, Termination::GradientTolerance);
        assert_eq!(v.max_distance(&u), 0.0);
    }

    #[test]
    fn bad_options_are_rejected() {
        let o = MinimizeOptions::<f64> { shrink: 1.0, ..Default::default() };
        assert!(o.validate().is_err());
        let o = MinimizeOptions::<f64> { decrease: 0.6, ..Default::default() };
        assert!(o.validate().is_err());
    }

    #[test]
    fn trivial_sector_descends_to_zero() {
        let alg = su2();
        let lat = TorusLattice::cubic(8).unwrap();
        let u = make_random(lat, alg, RandomOptions { seed: 1, amplitude: 0.3, modes: 1 }).unwrap();
        let opts = MinimizeOptions { max_iters: 3000, grad_tol: 1e-7, ..Default::default() };
        let (_, trace) = minimize_map(&u, &opts).unwrap();
        assert!(trace.is_monotone());
        assert!(trace.sector_constant());
        assert!(trace.final_energy() <= 1e-8, "{}", trace.final_energy());
        let mut csv = Vec::new();
        trace.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("iter,energy,grad_norm,step,alpha,c_rounded,c_residual\n"));
    }
}
