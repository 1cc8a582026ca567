use std::sync::Arc;

use proptest::prelude::*;

use skyrme_core::holonomy::{CubicalCover, HolonomyOptions};
use skyrme_core::invariants::{
    invariant_of_connection, one_dim_invariant, reference_map, sector_of, topological_charge, ReferenceMaps,
    SectorInvariants, DEFAULT_SECTOR_TOLERANCE,
};
use skyrme_core::lattice::{gauge_transform, log_derivative, make_hedgehog, make_random, make_winding, RandomOptions};
use skyrme_core::{Algebra, AlgebraSpec, Error, Field, Lattice, OneForm};

fn alg(spec: AlgebraSpec) -> Arc<Algebra> {
    Arc::new(Algebra::build(spec).unwrap())
}

fn hedgehog(n: usize) -> Field {
    make_hedgehog(Lattice::cubic(n).unwrap(), alg(AlgebraSpec::Su(2)), 0.45).unwrap()
}

#[test]
fn charge_residual_shrinks_under_refinement() {
    let r: Vec<f64> = [12, 16, 24].iter().map(|&n| sector_of(&hedgehog(n)).unwrap().max_residual()).collect();
    assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
}

#[test]
fn additivity_within_discretization_residuals() {
    let a = alg(AlgebraSpec::Su(2));
    let lat = Lattice::cubic(16).unwrap();
    let u = make_hedgehog(lat, a.clone(), 0.45).unwrap();
    let cu = topological_charge(&u, None).unwrap()[0];
    for seed in 0..4 {
        let w = make_random(lat, a.clone(), RandomOptions { seed, amplitude: 0.5, modes: 1 }).unwrap();
        let cw = topological_charge(&w, None).unwrap()[0];
        let cp = topological_charge(&u.mul(&w).unwrap(), None).unwrap()[0];
        let budget = (cu - cu.round()).abs() + (cw - cw.round()).abs() + (cp - cp.round()).abs();
        assert!((cp - cu - cw).abs() <= budget.max(1e-12), "seed {seed}: {cp} vs {cu} + {cw}");
    }
}

#[test]
fn unresolved_charges_are_rejected() {
    let r = SectorInvariants::from_raw([vec![0], vec![0], vec![0]], 1, vec![0.7], 0.25);
    assert!(matches!(r, Err(Error::UnresolvedSector(_))));
    let s = SectorInvariants::from_raw([vec![0], vec![0], vec![0]], 1, vec![-1.1], 0.25).unwrap();
    assert_eq!(s.charges, vec![-1]);
}

#[test]
fn connection_sector_is_gauge_well_defined() {
    let a = alg(AlgebraSpec::Su(2));
    let lat = Lattice::cubic(16).unwrap();
    let cover = CubicalCover::default_for(&lat).unwrap();
    let opts = HolonomyOptions::default();
    let refs = ReferenceMaps::new();
    let l = lat.lengths();
    let abelian = OneForm::from_fn(lat, a.clone(), |c, _| vec![0.0, 0.0, [0.6, -1.1, 0.3][c] / l[c]]).unwrap();
    let bump = make_random(lat, a.clone(), RandomOptions { seed: 3, amplitude: 0.3, modes: 1 }).unwrap();
    let u = make_hedgehog(lat, a.clone(), 0.45).unwrap().mul(&bump).unwrap();
    let map_side = sector_of(&u).unwrap();
    assert_eq!(map_side.charges, vec![1]);
    for b in [OneForm::zeros(lat, a.clone()), abelian] {
        let s = invariant_of_connection(&gauge_transform(&b, &u).unwrap(), &b, &cover, &opts, &refs, DEFAULT_SECTOR_TOLERANCE).unwrap();
        assert!(s.same_sector(&map_side), "{} vs {}", s.report(), map_side.report());
    }
}

#[test]
fn so3_connection_sees_the_odd_class() {
    let a = alg(AlgebraSpec::So3);
    let lat = Lattice::cubic(8).unwrap();
    let u = make_winding(lat, a.clone(), [1, 0, 1], &a.unit(2)).unwrap();
    let zero = OneForm::zeros(lat, a.clone());
    let cover = CubicalCover::default_for(&lat).unwrap();
    let s = invariant_of_connection(
        &log_derivative(&u).unwrap(),
        &zero,
        &cover,
        &HolonomyOptions::default(),
        &ReferenceMaps::new(),
        DEFAULT_SECTOR_TOLERANCE,
    )
    .unwrap();
    assert_eq!(s.alpha, [vec![1], vec![0], vec![1]]);
    assert_eq!(s.modulus, 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sector_is_right_translation_invariant(w in prop::collection::vec(-3.0..3.0f64, 3)) {
        let u = hedgehog(16);
        let a = u.algebra().clone();
        let g = a.group_exp(&w).unwrap();
        let s0 = sector_of(&u).unwrap();
        let s1 = sector_of(&u.right_mul(&g)).unwrap();
        prop_assert!(s0.same_sector(&s1));
        prop_assert!((s0.charges_raw[0] - s1.charges_raw[0]).abs() < 1e-9);
    }

    #[test]
    fn connection_sector_is_conjugation_invariant(w in prop::collection::vec(-3.0..3.0f64, 3)) {
        let u = hedgehog(16);
        let a = u.algebra().clone();
        let lat = *u.lattice();
        let g = a.group_exp(&w).unwrap();
        let zero = OneForm::zeros(lat, a.clone());
        let cover = CubicalCover::default_for(&lat).unwrap();
        let opts = HolonomyOptions::default();
        let refs = ReferenceMaps::new();
        let form = log_derivative(&u).unwrap();
        let s0 = invariant_of_connection(&form, &zero, &cover, &opts, &refs, DEFAULT_SECTOR_TOLERANCE).unwrap();
        let s1 = invariant_of_connection(&form.conjugate(&g).unwrap(), &zero, &cover, &opts, &refs, DEFAULT_SECTOR_TOLERANCE).unwrap();
        prop_assert!(s0.same_sector(&s1));
        prop_assert!((s0.charges_raw[0] - s1.charges_raw[0]).abs() < 1e-8);
    }

    #[test]
    fn reference_maps_round_trip(bits in prop::collection::vec(0i64..2, 3), phases in prop::collection::vec(-1i64..=1, 6)) {
        let lat = Lattice::cubic(8).unwrap();
        let so3 = alg(AlgebraSpec::So3);
        let alpha = [vec![bits[0]], vec![bits[1]], vec![bits[2]]];
        prop_assert_eq!(one_dim_invariant(&reference_map(lat, so3, &alpha).unwrap()).unwrap(), alpha);
        let t2 = alg(AlgebraSpec::Torus(2));
        let alpha = [phases[0..2].to_vec(), phases[2..4].to_vec(), phases[4..6].to_vec()];
        let v = reference_map(lat, t2, &alpha).unwrap();
        prop_assert_eq!(one_dim_invariant(&v).unwrap(), alpha.clone());
        let s = sector_of(&v).unwrap();
        prop_assert_eq!(s.alpha, alpha);
        prop_assert!(s.charges.is_empty());
    }
}
