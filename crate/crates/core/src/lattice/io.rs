//! Binary field files.
//!
//! Both formats share a header: 8-byte magic, little-endian `u32` group id,
//! rep dimension and the three lattice sizes, then three `f64` lengths.
//! `SKYF0001` stores one `N×N` complex matrix per site; `SKYA0001` stores
//! three blocks of such matrices, one per one-form component. Matrices are
//! row-major `(re, im)` pairs, sites ordered with the last axis fastest.

use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex;

use super::{AlgebraOneForm, GroupField, TorusLattice};
use crate::error::{Error, Result};
use crate::lie::{AlgebraSpec, LieAlgebra};
use crate::linalg::CMat;
use crate::scalar::Real;

const FIELD_MAGIC: &[u8; 8] = b"SKYF0001";
const FORM_MAGIC: &[u8; 8] = b"SKYA0001";

struct Header {
    spec: AlgebraSpec,
    rep_dim: usize,
    dims: [usize; 3],
    lengths: [f64; 3],
}

fn write_header<S: Real>(w: &mut impl Write, magic: &[u8; 8], alg: &LieAlgebra<S>, lat: &TorusLattice<S>) -> Result<()> {
    w.write_all(magic)?;
    w.write_all(&alg.spec().group_id().to_le_bytes())?;
    w.write_all(&(alg.rep_dim() as u32).to_le_bytes())?;
    for n in lat.dims() {
        w.write_all(&(n as u32).to_le_bytes())?;
    }
    for l in lat.lengths() {
        w.write_all(&l.as_f64().to_le_bytes())?;
    }
    Ok(())
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn read_header(r: &mut impl Read, magic: &[u8; 8]) -> Result<Header> {
    let mut m = [0u8; 8];
    r.read_exact(&mut m)?;
    if &m != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {}",
            String::from_utf8_lossy(&m),
            String::from_utf8_lossy(magic)
        )));
    }
    let spec = AlgebraSpec::from_group_id(read_u32(r)?)?;
    let rep_dim = read_u32(r)? as usize;
    let dims = [read_u32(r)? as usize, read_u32(r)? as usize, read_u32(r)? as usize];
    let lengths = [read_f64(r)?, read_f64(r)?, read_f64(r)?];
    Ok(Header {
        spec,
        rep_dim,
        dims,
        lengths,
    })
}

fn write_matrix<S: Real>(w: &mut impl Write, m: &CMat<S>) -> Result<()> {
    for z in m.data() {
        w.write_all(&z.re.as_f64().to_le_bytes())?;
        w.write_all(&z.im.as_f64().to_le_bytes())?;
    }
    Ok(())
}

fn read_matrix<S: Real>(r: &mut impl Read, n: usize) -> Result<CMat<S>> {
    let mut data = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        let re = read_f64(r)?;
        let im = read_f64(r)?;
        data.push(Complex::new(S::lit(re), S::lit(im)));
    }
    Ok(CMat::from_vec(n, data))
}

fn setup<S: Real>(h: &Header, algebra: Option<Arc<LieAlgebra<S>>>) -> Result<(TorusLattice<S>, Arc<LieAlgebra<S>>)> {
    let alg = match algebra {
        Some(a) if a.spec() == h.spec => a,
        Some(a) => {
            return Err(Error::Format(format!("file holds {}, expected {}", h.spec, a.name())));
        }
        None => Arc::new(LieAlgebra::build(h.spec)?),
    };
    if alg.rep_dim() != h.rep_dim {
        return Err(Error::Format(format!("rep dimension {} does not match {}", h.rep_dim, alg.name())));
    }
    let lat = TorusLattice::new(h.dims, h.lengths.map(S::lit))?;
    Ok((lat, alg))
}

pub fn write_field<S: Real>(w: &mut impl Write, u: &GroupField<S>) -> Result<()> {
    write_header(w, FIELD_MAGIC, u.algebra(), u.lattice())?;
    for g in u.values() {
        write_matrix(w, g)?;
    }
    Ok(())
}

/// Reads a field; the algebra is rebuilt from the stored group id unless one
/// is supplied.
pub fn read_field<S: Real>(r: &mut impl Read, algebra: Option<Arc<LieAlgebra<S>>>) -> Result<GroupField<S>> {
    let h = read_header(r, FIELD_MAGIC)?;
    let (lat, alg) = setup(&h, algebra)?;
    let values = (0..lat.sites())
        .map(|_| read_matrix(r, h.rep_dim))
        .collect::<Result<Vec<_>>>()?;
    GroupField::new(lat, alg, values).map_err(|e| Error::Format(e.to_string()))
}

pub fn write_one_form<S: Real>(w: &mut impl Write, a: &AlgebraOneForm<S>) -> Result<()> {
    let alg = a.algebra();
    write_header(w, FORM_MAGIC, alg, a.lattice())?;
    for c in 0..3 {
        for s in 0..a.lattice().sites() {
            write_matrix(w, &alg.to_matrix(a.get(c, s))?)?;
        }
    }
    Ok(())
}

/// Reads a one-form, projecting each stored matrix onto the algebra; a
/// projection residual above `1e-9` is a format error.
pub fn read_one_form<S: Real>(r: &mut impl Read, algebra: Option<Arc<LieAlgebra<S>>>) -> Result<AlgebraOneForm<S>> {
    let h = read_header(r, FORM_MAGIC)?;
    let (lat, alg) = setup(&h, algebra)?;
    let d = alg.dim();
    let mut comps: [Vec<S>; 3] = Default::default();
    for comp in comps.iter_mut() {
        let mut flat = Vec::with_capacity(lat.sites() * d);
        for s in 0..lat.sites() {
            let m = read_matrix::<S>(r, h.rep_dim)?;
            let (x, residual) = alg.coords_of(&m);
            if residual > S::tol(1e-9) * m.frob_norm().max(S::one()) {
                return Err(Error::Format(format!("site {s}: matrix is not in {}", alg.name())));
            }
            flat.extend(x);
        }
        *comp = flat;
    }
    AlgebraOneForm::from_components(lat, alg, comps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_random, RandomOptions};

    #[test]
    fn field_and_form_round_trip() {
        let alg = Arc::new(LieAlgebra::<f64>::build(AlgebraSpec::Su(3)).unwrap());
        let lat = TorusLattice::new([6, 7, 8], [1.0, 1.5, 2.0]).unwrap();
        let u = make_random(lat, alg.clone(), RandomOptions { seed: 7, amplitude: 0.5, modes: 1 }).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &u).unwrap();
        let back = read_field::<f64>(&mut buf.as_slice(), None).unwrap();
        assert_eq!(back.max_distance(&u), 0.0);
        assert_eq!(back.lattice(), u.lattice());

        let a = crate::lattice::log_derivative(&u).unwrap();
        let mut buf = Vec::new();
        write_one_form(&mut buf, &a).unwrap();
        let back = read_one_form::<f64>(&mut buf.as_slice(), Some(alg)).unwrap();
        assert!(back.max_difference(&a) < 1e-12);
    }

    #[test]
    fn wrong_magic_is_rejected() {
        let bytes = b"SKYX0001garbage".to_vec();
        assert!(matches!(read_field::<f64>(&mut bytes.as_slice(), None), Err(Error::Format(_))));
    }
}
