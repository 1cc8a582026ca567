//! Compact Lie algebras in explicit unitary representations: structure
//! constants, adjoint tables, Killing data, simple-factor projectors and the
//! normalizing constants of the bi-invariant 3-forms.

pub mod bases;
pub mod clifford;
pub mod f4;
mod su2;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::linalg::{invert_real, CMat};
use crate::scalar::Real;

pub use clifford::{CliffordElement, Parity};
pub use su2::{certificate_line, complete_triple, spin4_ideals, Su2Embedding};

/// Which algebra to build: family plus rank or size parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgebraSpec {
    /// `su(n)`, `2 ≤ n ≤ 5`
    Su(usize),
    /// `spin(m)`, `3 ≤ m ≤ 9`, in the `2^⌊m/2⌋`-dimensional Clifford module
    Spin(usize),
    /// `sp(n)`, `1 ≤ n ≤ 3`
    Sp(usize),
    G2,
    /// `spin(9) ⊕ Δ₉` with the bracket known only for `ad` of `spin(9)` elements
    F4,
    So3,
    /// `u(1)^k`, `1 ≤ k ≤ 4`
    Torus(usize),
    /// `su(2) ⊕ su(2)`
    Su2Pair,
}

/// The fundamental group of the identity component, as far as the sector
/// invariants need it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoverKind {
    SimplyConnected,
    /// `π₁ = Z/2`, lifted through `SU(2) → SO(3)`
    So3,
    /// `π₁ = Z^k`, lifted through `R^k → U(1)^k`
    Torus(usize),
    /// No group is realised for this algebra.
    None,
}

impl AlgebraSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            AlgebraSpec::Su(n) => (2..=5).contains(&n),
            AlgebraSpec::Spin(m) => (3..=9).contains(&m),
            AlgebraSpec::Sp(n) => (1..=3).contains(&n),
            AlgebraSpec::Torus(k) => (1..=4).contains(&k),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnsupportedAlgebra(self.to_string()))
        }
    }

    /// Stable numeric id used by the field file formats: family in the high
    /// byte, size parameter in the low byte.
    pub fn group_id(&self) -> u32 {
        match *self {
            AlgebraSpec::Su(n) => 0x100 | n as u32,
            AlgebraSpec::Spin(m) => 0x200 | m as u32,
            AlgebraSpec::Sp(n) => 0x300 | n as u32,
            AlgebraSpec::G2 => 0x400,
            AlgebraSpec::F4 => 0x500,
            AlgebraSpec::So3 => 0x600,
            AlgebraSpec::Torus(k) => 0x700 | k as u32,
            AlgebraSpec::Su2Pair => 0x800,
        }
    }

    pub fn from_group_id(id: u32) -> Result<Self> {
        let p = (id & 0xff) as usize;
        let spec = match id >> 8 {
            1 => AlgebraSpec::Su(p),
            2 => AlgebraSpec::Spin(p),
            3 => AlgebraSpec::Sp(p),
            4 => AlgebraSpec::G2,
            5 => AlgebraSpec::F4,
            6 => AlgebraSpec::So3,
            7 => AlgebraSpec::Torus(p),
            8 => AlgebraSpec::Su2Pair,
            _ => return Err(Error::UnsupportedAlgebra(format!("group id {id:#x}"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn cover(&self) -> CoverKind {
        match *self {
            AlgebraSpec::So3 => CoverKind::So3,
            AlgebraSpec::Torus(k) => CoverKind::Torus(k),
            AlgebraSpec::F4 => CoverKind::None,
            _ => CoverKind::SimplyConnected,
        }
    }

    /// Every algebra whose normalizing constant can be certified.
    pub fn certifiable() -> Vec<AlgebraSpec> {
        let mut v: Vec<_> = (2..=5).map(AlgebraSpec::Su).collect();
        v.extend((3..=9).map(AlgebraSpec::Spin));
        v.extend((1..=3).map(AlgebraSpec::Sp));
        v.push(AlgebraSpec::G2);
        v.push(AlgebraSpec::F4);
        v
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AlgebraSpec::Su(n) => write!(f, "su({n})"),
            AlgebraSpec::Spin(m) => write!(f, "spin({m})"),
            AlgebraSpec::Sp(n) => write!(f, "sp({n})"),
            AlgebraSpec::G2 => write!(f, "g2"),
            AlgebraSpec::F4 => write!(f, "f4"),
            AlgebraSpec::So3 => write!(f, "so(3)"),
            AlgebraSpec::Torus(1) => write!(f, "u(1)"),
            AlgebraSpec::Torus(k) => write!(f, "u(1)^{k}"),
            AlgebraSpec::Su2Pair => write!(f, "su(2)+su(2)"),
        }
    }
}

impl FromStr for AlgebraSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '(' && *c != ')')
            .collect::<String>()
            .to_ascii_lowercase();
        let num = |prefix: &str| -> Option<usize> { t.strip_prefix(prefix)?.parse().ok() };
        let spec = if t == "g2" {
            AlgebraSpec::G2
        } else if t == "f4" {
            AlgebraSpec::F4
        } else if t == "so3" {
            AlgebraSpec::So3
        } else if t == "su2xsu2" || t == "su2+su2" {
            AlgebraSpec::Su2Pair
        } else if t == "u1" {
            AlgebraSpec::Torus(1)
        } else if let Some(k) = num("u1^") {
            AlgebraSpec::Torus(k)
        } else if let Some(n) = num("su") {
            AlgebraSpec::Su(n)
        } else if let Some(m) = num("spin") {
            AlgebraSpec::Spin(m)
        } else if let Some(n) = num("sp") {
            AlgebraSpec::Sp(n)
        } else {
            return Err(Error::UnsupportedAlgebra(s.to_string()));
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// One simple factor: its Killing-orthogonal projector, the primitive `su(2)`
/// inside it and the certified normalizing constant.
#[derive(Clone, Debug)]
pub struct Factor<S> {
    /// Row-major `ad_dim × ad_dim` projector acting on coordinates.
    pub projector: Vec<S>,
    pub embedding: Su2Embedding<S>,
    /// `Tr(ad v ad v)` for the image of `v = diag(i, -i)`, certified integral.
    pub killing_trace: i64,
    pub k_constant: Ratio<i64>,
}

/// A compact Lie algebra with a faithful unitary basis and its adjoint data.
///
/// Elements are coordinate vectors of length [`dim`](Self::dim). For `f4`
/// only the first [`ad_dim`](Self::ad_dim) = 36 coordinates (the `spin(9)`
/// part) lie in the domain of `ad`.
#[derive(Clone, Debug)]
pub struct LieAlgebra<S> {
    spec: AlgebraSpec,
    dim: usize,
    ad_dim: usize,
    rep_dim: usize,
    basis: Vec<CMat<S>>,
    gram_inv: Vec<S>,
    structure: Vec<S>,
    terms: Vec<(usize, usize, usize, S)>,
    killing: Vec<S>,
    metric: Vec<S>,
    spinor_action: Vec<CMat<S>>,
    factors: Vec<Factor<S>>,
}

impl<S: Real> LieAlgebra<S> {
    /// Builds and certifies the algebra.
    pub fn build(spec: AlgebraSpec) -> Result<Self> {
        spec.validate()?;
        let basis = match spec {
            AlgebraSpec::Su(n) => bases::su(n),
            AlgebraSpec::Spin(m) => bases::spin(m),
            AlgebraSpec::Sp(n) => bases::sp(n),
            AlgebraSpec::G2 => bases::g2(),
            AlgebraSpec::F4 => bases::spin(9),
            AlgebraSpec::So3 => bases::so3(),
            AlgebraSpec::Torus(k) => bases::torus(k),
            AlgebraSpec::Su2Pair => bases::su2_pair(),
        };
        let mut alg = Self::from_matrix_basis(spec, basis)?;
        if spec == AlgebraSpec::F4 {
            let block = f4::spinor_block::<S>()?;
            alg.attach_spinors(block.action)?;
        }
        alg.factors = su2::factors_for(&alg)?;
        Ok(alg)
    }

    fn from_matrix_basis(spec: AlgebraSpec, basis: Vec<CMat<S>>) -> Result<Self> {
        let d = basis.len();
        let rep_dim = basis[0].n();
        for (a, b) in basis.iter().enumerate() {
            if b.anti_hermitian_defect() > S::tol(1e-12) {
                return Err(Error::Consistency(format!("basis element {a} is not anti-Hermitian")));
            }
        }
        let mut gram = vec![S::zero(); d * d];
        for a in 0..d {
            for b in 0..d {
                gram[a * d + b] = basis[a].frob_dot(&basis[b]);
            }
        }
        let gram_inv = invert_real(&gram, d)
            .ok_or_else(|| Error::Consistency("basis is linearly dependent".into()))?;
        let mut alg = Self {
            spec,
            dim: d,
            ad_dim: d,
            rep_dim,
            basis,
            gram_inv,
            structure: vec![S::zero(); d * d * d],
            terms: Vec::new(),
            killing: vec![S::zero(); d * d],
            metric: vec![S::zero(); d * d],
            spinor_action: Vec::new(),
            factors: Vec::new(),
        };
        let closure_tol = S::tol(1e-10);
        for a in 0..d {
            for b in 0..d {
                let comm = alg.basis[a].commutator(&alg.basis[b]);
                let (coords, residual) = alg.coords_of(&comm);
                if residual > closure_tol {
                    return Err(Error::Consistency(format!(
                        "bracket of basis elements {a},{b} leaves the span (residual {residual:e})"
                    )));
                }
                for (c, v) in coords.into_iter().enumerate() {
                    let v = if v.abs() < S::tol(1e-13) { S::zero() } else { v };
                    alg.structure[(c * d + a) * d + b] = v;
                    if v != S::zero() {
                        alg.terms.push((a, b, c, v));
                    }
                }
            }
        }
        alg.recompute_killing();
        Ok(alg)
    }

    fn attach_spinors(&mut self, action: Vec<CMat<S>>) -> Result<()> {
        if action.len() != self.ad_dim {
            return Err(Error::Consistency("spinor action size".into()));
        }
        self.dim = self.ad_dim + action[0].n();
        self.spinor_action = action;
        self.recompute_killing();
        Ok(())
    }

    fn recompute_killing(&mut self) {
        let d = self.ad_dim;
        let mut killing = vec![S::zero(); d * d];
        let ads: Vec<Vec<S>> = (0..d)
            .map(|a| {
                let mut e = vec![S::zero(); d];
                e[a] = S::one();
                self.ad_real(&e)
            })
            .collect();
        for a in 0..d {
            for b in a..d {
                let mut t = S::zero();
                for i in 0..d {
                    for j in 0..d {
                        t += ads[a][i * d + j] * ads[b][j * d + i];
                    }
                }
                if !self.spinor_action.is_empty() {
                    t += self.spinor_action[a].matmul(&self.spinor_action[b]).trace().re;
                }
                killing[a * d + b] = t;
                killing[b * d + a] = t;
            }
        }
        self.metric = killing.iter().map(|&k| -k / S::lit(8.0)).collect();
        self.killing = killing;
    }

    pub fn spec(&self) -> AlgebraSpec {
        self.spec
    }

    pub fn name(&self) -> String {
        self.spec.to_string()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the subspace on which `ad` is known.
    pub fn ad_dim(&self) -> usize {
        self.ad_dim
    }

    pub fn rep_dim(&self) -> usize {
        self.rep_dim
    }

    pub fn partial_bracket(&self) -> bool {
        self.ad_dim < self.dim
    }

    pub fn basis(&self) -> &[CMat<S>] {
        &self.basis
    }

    /// `f^c_{ab}` with `[e_a, e_b] = Σ_c f^c_{ab} e_c`.
    pub fn structure_constant(&self, c: usize, a: usize, b: usize) -> S {
        let d = self.ad_dim;
        self.structure[(c * d + a) * d + b]
    }

    /// `B_{ab} = Tr(ad e_a ad e_b)` over the ad domain, row-major.
    pub fn killing_matrix(&self) -> &[S] {
        &self.killing
    }

    /// The metric `-B/8` defining `|X|²`.
    pub fn metric(&self) -> &[S] {
        &self.metric
    }

    pub fn factors(&self) -> &[Factor<S>] {
        &self.factors
    }

    /// Complex `16×16` action of each `spin(9)` basis element on `Δ₉` (f4 only).
    pub fn spinor_action(&self) -> &[CMat<S>] {
        &self.spinor_action
    }

    pub fn zero(&self) -> Vec<S> {
        vec![S::zero(); self.dim]
    }

    pub fn unit(&self, a: usize) -> Vec<S> {
        let mut v = self.zero();
        v[a] = S::one();
        v
    }

    fn check_domain(&self, x: &[S]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "element has {} coordinates, algebra {} has {}",
                x.len(),
                self.name(),
                self.dim
            )));
        }
        if x[self.ad_dim..].iter().any(|v| *v != S::zero()) {
            return Err(Error::PartialBracket);
        }
        Ok(())
    }

    /// Bracket of two elements in the ad domain, written into `out` (length
    /// at least `ad_dim`). No domain checks.
    #[inline]
    pub fn bracket_into(&self, x: &[S], y: &[S], out: &mut [S]) {
        for o in out[..self.ad_dim].iter_mut() {
            *o = S::zero();
        }
        for &(a, b, c, f) in &self.terms {
            out[c] += f * x[a] * y[b];
        }
    }

    pub fn bracket(&self, x: &[S], y: &[S]) -> Result<Vec<S>> {
        self.check_domain(x)?;
        self.check_domain(y)?;
        let mut out = self.zero();
        self.bracket_into(x, y, &mut out);
        Ok(out)
    }

    /// Real matrix of `ad x` restricted to the ad domain, row-major `ad_dim²`.
    pub fn ad_real(&self, x: &[S]) -> Vec<S> {
        let d = self.ad_dim;
        let mut m = vec![S::zero(); d * d];
        for &(a, b, c, f) in &self.terms {
            m[c * d + b] += f * x[a];
        }
        m
    }

    /// Full adjoint matrix of `x` on the whole algebra (`dim × dim`); for f4
    /// this is the 52×52 action of a `spin(9)` element, complex on the `Δ₉` block.
    pub fn ad_matrix(&self, x: &[S]) -> Result<CMat<S>> {
        self.check_domain(x)?;
        let d = self.ad_dim;
        let real = self.ad_real(x);
        let mut m = CMat::zeros(self.dim);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, Complex::new(real[i * d + j], S::zero()));
            }
        }
        if !self.spinor_action.is_empty() {
            let s = self.spinor_action[0].n();
            for (a, rho) in self.spinor_action.iter().enumerate() {
                if x[a] == S::zero() {
                    continue;
                }
                for i in 0..s {
                    for j in 0..s {
                        let old = m.get(d + i, d + j);
                        m.set(d + i, d + j, old + rho.get(i, j) * x[a]);
                    }
                }
            }
        }
        Ok(m)
    }

    /// `xᵀ B y` without domain checks.
    #[inline]
    pub fn killing_raw(&self, x: &[S], y: &[S]) -> S {
        quad(&self.killing, self.ad_dim, x, y)
    }

    /// `|x|² = -(1/8) Tr(ad x ad x)` without domain checks.
    #[inline]
    pub fn norm_sq_raw(&self, x: &[S]) -> S {
        quad(&self.metric, self.ad_dim, x, x)
    }

    /// `Tr(ad X ad Y)`.
    pub fn killing_pairing(&self, x: &[S], y: &[S]) -> Result<S> {
        self.check_domain(x)?;
        self.check_domain(y)?;
        Ok(self.killing_raw(x, y))
    }

    pub fn algebra_norm_sq(&self, x: &[S]) -> Result<S> {
        self.check_domain(x)?;
        Ok(self.norm_sq_raw(x))
    }

    pub fn project_factor(&self, k: usize, x: &[S]) -> Result<Vec<S>> {
        let factor = self
            .factors
            .get(k)
            .ok_or_else(|| Error::InvalidArgument(format!("factor {k} out of range")))?;
        self.check_domain(x)?;
        let mut out = self.zero();
        apply(&factor.projector, self.ad_dim, x, &mut out);
        Ok(out)
    }

    /// `-(K_k / 32π²) Tr(ad[X̂, Ŷ] ad Ẑ)` with hats the projection onto factor `k`.
    pub fn theta_density(&self, k: usize, x: &[S], y: &[S], z: &[S]) -> Result<S> {
        let px = self.project_factor(k, x)?;
        let py = self.project_factor(k, y)?;
        let pz = self.project_factor(k, z)?;
        let br = self.bracket(&px, &py)?;
        let kk = ratio_to::<S>(self.factors[k].k_constant);
        Ok(-kk / (S::lit(32.0) * S::PI() * S::PI()) * self.killing_raw(&br, &pz))
    }

    /// Certified normalizing constant of the (first) simple factor.
    pub fn normalizing_constant(&self) -> Result<Ratio<i64>> {
        self.factors
            .first()
            .map(|f| f.k_constant)
            .ok_or_else(|| Error::UnsupportedAlgebra(format!("{} has no simple factor", self.name())))
    }

    /// Coordinates of a matrix in the basis span and the Frobenius residual of
    /// the projection.
    pub fn coords_of(&self, m: &CMat<S>) -> (Vec<S>, S) {
        let d = self.ad_dim;
        let r: Vec<S> = self.basis.iter().map(|b| b.frob_dot(m)).collect();
        let mut x = vec![S::zero(); self.dim];
        apply(&self.gram_inv, d, &r, &mut x);
        let back = self.to_matrix_raw(&x);
        (x, back.frob_dist(m))
    }

    fn to_matrix_raw(&self, x: &[S]) -> CMat<S> {
        let mut m = CMat::zeros(self.rep_dim);
        for (a, b) in self.basis.iter().enumerate() {
            if x[a] != S::zero() {
                m.axpy(x[a], b);
            }
        }
        m
    }

    /// The element as a matrix in the faithful representation.
    pub fn to_matrix(&self, x: &[S]) -> Result<CMat<S>> {
        self.check_domain(x)?;
        Ok(self.to_matrix_raw(x))
    }

    fn ensure_group(&self) -> Result<()> {
        if self.partial_bracket() {
            return Err(Error::UnsupportedAlgebra(format!("{} has no group realisation", self.name())));
        }
        Ok(())
    }

    fn is_su2_like(&self) -> bool {
        matches!(self.spec, AlgebraSpec::Su(2) | AlgebraSpec::Sp(1))
    }

    /// Matrix exponential into the faithful representation.
    pub fn group_exp(&self, x: &[S]) -> Result<CMat<S>> {
        self.ensure_group()?;
        self.check_domain(x)?;
        Ok(self.exp_raw(x))
    }

    pub(crate) fn exp_raw(&self, x: &[S]) -> CMat<S> {
        if self.is_su2_like() {
            return su2_exp(x);
        }
        if let AlgebraSpec::Torus(k) = self.spec {
            return CMat::from_fn(k, |i, j| {
                if i == j {
                    Complex::new(x[i].cos(), x[i].sin())
                } else {
                    Complex::new(S::zero(), S::zero())
                }
            });
        }
        self.to_matrix_raw(x).exp()
    }

    /// Operator norm of `g - 1`.
    pub fn deviation_from_identity(&self, g: &CMat<S>) -> S {
        if self.is_su2_like() {
            let cos = (g.get(0, 0).re + g.get(1, 1).re) / S::lit(2.0);
            return (S::lit(2.0) - S::lit(2.0) * cos).max(S::zero()).sqrt();
        }
        if let AlgebraSpec::Torus(k) = self.spec {
            return (0..k)
                .map(|j| (g.get(j, j) - Complex::new(S::one(), S::zero())).norm())
                .fold(S::zero(), |a, b| a.max(b));
        }
        (g - &CMat::identity(g.n())).op_norm()
    }

    /// Principal logarithm with no range gate; coordinates plus projection residual.
    pub fn group_log_unchecked(&self, g: &CMat<S>) -> Result<(Vec<S>, S)> {
        self.ensure_group()?;
        if self.is_su2_like() {
            return Ok(su2_log(g));
        }
        if let AlgebraSpec::Torus(k) = self.spec {
            let mut x = self.zero();
            let mut off = S::zero();
            for i in 0..k {
                x[i] = g.get(i, i).arg();
                for j in 0..k {
                    if i != j {
                        off += g.get(i, j).norm_sqr();
                    }
                }
            }
            return Ok((x, off.sqrt()));
        }
        let l = g.log().ok_or(Error::LogOutOfRange(f64::INFINITY))?;
        Ok(self.coords_of(&l))
    }

    /// Local inverse of [`group_exp`](Self::group_exp); fails when
    /// `‖g - 1‖_op ≥ threshold`.
    pub fn group_log(&self, g: &CMat<S>, threshold: S) -> Result<(Vec<S>, S)> {
        self.ensure_group()?;
        let dev = self.deviation_from_identity(g);
        if !(dev < threshold) {
            return Err(Error::LogOutOfRange(dev.as_f64()));
        }
        self.group_log_unchecked(g)
    }

    /// How far a matrix is from the group: unitarity defect plus the
    /// family's defining constraints.
    pub fn group_defect(&self, g: &CMat<S>) -> S {
        let mut defect = g.unitarity_defect();
        let one = Complex::new(S::one(), S::zero());
        match self.spec {
            AlgebraSpec::Su(_) => defect += (g.det() - one).norm(),
            AlgebraSpec::Sp(n) => {
                let j = bases::sp_structure::<S>(n);
                defect += g.transpose().matmul(&j).matmul(g).frob_dist(&j);
            }
            AlgebraSpec::So3 | AlgebraSpec::G2 => {
                defect += g.data().iter().map(|z| z.im * z.im).sum::<S>().sqrt();
                defect += (g.det() - one).norm();
            }
            AlgebraSpec::Torus(k) => {
                for i in 0..k {
                    for j in 0..k {
                        if i != j {
                            defect += g.get(i, j).norm();
                        }
                    }
                }
            }
            AlgebraSpec::Su2Pair => {
                for i in 0..4 {
                    for j in 0..4 {
                        if (i < 2) != (j < 2) {
                            defect += g.get(i, j).norm();
                        }
                    }
                }
            }
            AlgebraSpec::Spin(_) | AlgebraSpec::F4 => {}
        }
        defect
    }

    /// Nearest group element to a matrix close to the group (used for
    /// averaged transition elements).
    pub fn project_to_group(&self, m: &CMat<S>) -> Result<CMat<S>> {
        let mut m = m.clone();
        if matches!(self.spec, AlgebraSpec::So3 | AlgebraSpec::G2) {
            for z in m.data_mut() {
                z.im = S::zero();
            }
        }
        let mut u = m
            .polar_unitary()
            .ok_or_else(|| Error::Consistency("singular matrix in group projection".into()))?;
        match self.spec {
            AlgebraSpec::Su(n) => {
                let det = u.det();
                let phase = Complex::from_polar(S::one(), -det.arg() / S::lit(n as f64));
                u = u.scale_c(phase);
            }
            AlgebraSpec::Su2Pair => {
                for block in [0usize, 2] {
                    let a = u.get(block, block);
                    let b = u.get(block, block + 1);
                    let c = u.get(block + 1, block);
                    let d = u.get(block + 1, block + 1);
                    let det = a * d - b * c;
                    let phase = Complex::from_polar(S::one(), -det.arg() / S::lit(2.0));
                    for i in block..block + 2 {
                        for j in block..block + 2 {
                            let v = u.get(i, j) * phase;
                            u.set(i, j, v);
                        }
                    }
                }
            }
            _ => {}
        }
        Ok(u)
    }

    /// Antisymmetry, closure and Jacobi residuals (maximum absolute values).
    pub fn verify(&self) -> AlgebraChecks<S> {
        let d = self.ad_dim;
        let mut antisym = S::zero();
        for c in 0..d {
            for a in 0..d {
                for b in 0..d {
                    antisym = antisym.max(
                        (self.structure_constant(c, a, b) + self.structure_constant(c, b, a)).abs(),
                    );
                }
            }
        }
        let mut closure = S::zero();
        for a in 0..d {
            for b in 0..d {
                let comm = self.basis[a].commutator(&self.basis[b]);
                let mut x = vec![S::zero(); self.dim];
                for c in 0..d {
                    x[c] = self.structure_constant(c, a, b);
                }
                closure = closure.max((&comm - &self.to_matrix_raw(&x)).max_abs());
            }
        }
        let mut jacobi = S::zero();
        let mut tmp1 = vec![S::zero(); self.dim];
        let mut tmp2 = vec![S::zero(); self.dim];
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let (ea, eb, ec) = (self.unit(a), self.unit(b), self.unit(c));
                    let mut total = vec![S::zero(); d];
                    for (x, y, z) in [(&ea, &eb, &ec), (&eb, &ec, &ea), (&ec, &ea, &eb)] {
                        self.bracket_into(x, y, &mut tmp1);
                        self.bracket_into(&tmp1, z, &mut tmp2);
                        for (t, v) in total.iter_mut().zip(&tmp2) {
                            *t += *v;
                        }
                    }
                    jacobi = total.iter().fold(jacobi, |m, v| m.max(v.abs()));
                }
            }
        }
        let mut anti_hermitian = S::zero();
        for b in &self.basis {
            anti_hermitian = anti_hermitian.max(b.anti_hermitian_defect());
        }
        let mut killing_symmetry = S::zero();
        for a in 0..d {
            for b in 0..d {
                killing_symmetry =
                    killing_symmetry.max((self.killing[a * d + b] - self.killing[b * d + a]).abs());
            }
        }
        AlgebraChecks {
            antisymmetry: antisym,
            closure,
            jacobi,
            anti_hermitian,
            killing_symmetry,
        }
    }
}

/// Residuals reported by [`LieAlgebra::verify`].
#[derive(Clone, Copy, Debug)]
pub struct AlgebraChecks<S> {
    pub antisymmetry: S,
    pub closure: S,
    pub jacobi: S,
    pub anti_hermitian: S,
    pub killing_symmetry: S,
}

pub(crate) fn ratio_to<S: Real>(r: Ratio<i64>) -> S {
    S::lit(*r.numer() as f64 / *r.denom() as f64)
}

#[inline]
pub(crate) fn quad<S: Real>(m: &[S], d: usize, x: &[S], y: &[S]) -> S {
    let mut acc = S::zero();
    for i in 0..d {
        let xi = x[i];
        if xi == S::zero() {
            continue;
        }
        let row = &m[i * d..(i + 1) * d];
        let mut r = S::zero();
        for j in 0..d {
            r += row[j] * y[j];
        }
        acc += xi * r;
    }
    acc
}

#[inline]
pub(crate) fn apply<S: Real>(m: &[S], d: usize, x: &[S], out: &mut [S]) {
    for i in 0..d {
        let row = &m[i * d..(i + 1) * d];
        out[i] = row.iter().zip(x).map(|(a, b)| *a * *b).sum();
    }
}

/// `exp(x₁iσ₁ + x₂iσ₂ + x₃iσ₃) = cos θ + (sin θ/θ) X`.
fn su2_exp<S: Real>(x: &[S]) -> CMat<S> {
    let theta = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let c = theta.cos();
    let s = if theta > S::lit(1e-8) {
        theta.sin() / theta
    } else {
        S::one() - theta * theta / S::lit(6.0)
    };
    CMat::from_vec(
        2,
        vec![
            Complex::new(c, s * x[2]),
            Complex::new(s * x[1], s * x[0]),
            Complex::new(-s * x[1], s * x[0]),
            Complex::new(c, -s * x[2]),
        ],
    )
}

fn su2_log<S: Real>(g: &CMat<S>) -> (Vec<S>, S) {
    let (a, b, c, d) = (g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1));
    let half = S::lit(0.5);
    // (g - g^*)/2 = sin θ n·iσ
    let x3 = (a.im - d.im) * half;
    let x1 = (b.im + c.im) * half;
    let x2 = (b.re - c.re) * half;
    let cos = (a.re + d.re) * half;
    let sin = (x1 * x1 + x2 * x2 + x3 * x3).sqrt();
    let theta = sin.atan2(cos);
    let f = if sin > S::lit(1e-8) {
        theta / sin
    } else {
        S::one() + sin * sin / S::lit(6.0)
    };
    let residual = (a - d.conj()).norm() + (b + c.conj()).norm();
    (vec![f * x1, f * x2, f * x3], residual)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_round_trip() {
        for spec in [
            AlgebraSpec::Su(3),
            AlgebraSpec::Spin(7),
            AlgebraSpec::Sp(2),
            AlgebraSpec::G2,
            AlgebraSpec::F4,
            AlgebraSpec::So3,
            AlgebraSpec::Torus(1),
            AlgebraSpec::Torus(2),
            AlgebraSpec::Su2Pair,
        ] {
            assert_eq!(spec.to_string().parse::<AlgebraSpec>().unwrap(), spec);
            assert_eq!(AlgebraSpec::from_group_id(spec.group_id()).unwrap(), spec);
        }
        assert!("su7".parse::<AlgebraSpec>().is_err());
        assert!("e8".parse::<AlgebraSpec>().is_err());
    }

    #[test]
    fn su2_fast_path_matches_generic() {
        let alg = LieAlgebra::<f64>::build(AlgebraSpec::Su(2)).unwrap();
        let x = [0.3, -0.7, 1.1];
        let fast = alg.exp_raw(&x);
        let generic = alg.to_matrix_raw(&x).exp();
        assert!(fast.frob_dist(&generic) < 1e-13);
        let (back, res) = alg.group_log_unchecked(&fast).unwrap();
        assert!(res < 1e-13);
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).abs() < 1e-13);
        }
        let generic_log = alg.coords_of(&fast.log().unwrap()).0;
        for (a, b) in generic_log.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
