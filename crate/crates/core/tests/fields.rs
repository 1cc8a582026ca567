use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;

use skyrme_core::lattice::{
    gauge_transform, log_derivative, make_random, make_winding, read_field, read_one_form, skyrme_energy_connection,
    skyrme_energy_map, wedge_bracket, write_field, write_one_form, RandomOptions,
};
use skyrme_core::{Algebra, AlgebraSpec, Field, Lattice, OneForm};

fn alg(spec: AlgebraSpec) -> Arc<Algebra> {
    Arc::new(Algebra::build(spec).unwrap())
}

fn spec_strategy() -> impl Strategy<Value = AlgebraSpec> {
    prop_oneof![
        Just(AlgebraSpec::Su(2)),
        Just(AlgebraSpec::Su(3)),
        Just(AlgebraSpec::So3),
        Just(AlgebraSpec::Su2Pair),
        Just(AlgebraSpec::Sp(2)),
    ]
}

fn random(lat: Lattice, a: &Arc<Algebra>, seed: u64, amplitude: f64) -> Field {
    make_random(lat, a.clone(), RandomOptions { seed, amplitude, modes: 1 }).unwrap()
}

/// Connection energy written out term by term from the brackets.
fn energy_by_terms(a: &OneForm) -> f64 {
    let alg = a.algebra();
    let lat = a.lattice();
    let br = wedge_bracket(a);
    let mut e = 0.0;
    for s in 0..lat.sites() {
        for i in 0..3 {
            e += 0.5 * alg.algebra_norm_sq(a.get(i, s)).unwrap();
            e += 0.25 * alg.algebra_norm_sq(br.get(i, s)).unwrap();
        }
    }
    e * lat.cell_volume()
}

#[test]
fn straight_double_phase_has_closed_form_energy() {
    let a = alg(AlgebraSpec::Su(2));
    for n in [8, 16, 32] {
        let u = make_winding(Lattice::cubic(n).unwrap(), a.clone(), [1, 1, 0], &a.unit(2)).unwrap();
        let e = skyrme_energy_map(&u).unwrap();
        assert!((e - 4.0 * PI * PI).abs() < 1e-10, "N = {n}: {e}");
    }
}

#[test]
fn energy_vanishes_exactly_on_constants() {
    let a = alg(AlgebraSpec::Su(3));
    let lat = Lattice::new([4, 5, 6], [1.0, 2.0, 0.5]).unwrap();
    let g = a.group_exp(&[0.3, -0.2, 0.5, 0.1, 0.0, 0.7, -0.4, 0.2]).unwrap();
    let c = Field::constant(lat, a.clone(), g).unwrap();
    assert_eq!(skyrme_energy_map(&c).unwrap(), 0.0);
    let mut bumped = c.clone();
    bumped.values_mut()[7] = c.get(7).matmul(&a.group_exp(&a.unit(3).iter().map(|v| 0.01 * v).collect::<Vec<_>>()).unwrap());
    assert!(skyrme_energy_map(&bumped).unwrap() > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_is_right_translation_invariant(spec in spec_strategy(), seed in 0u64..1000, w in prop::collection::vec(-2.0..2.0f64, 10)) {
        let a = alg(spec);
        let lat = Lattice::cubic(6).unwrap();
        let u = random(lat, &a, seed, 0.6);
        let g = a.group_exp(&w.iter().cycle().take(a.dim()).copied().collect::<Vec<_>>()).unwrap();
        let e0 = skyrme_energy_map(&u).unwrap();
        let e1 = skyrme_energy_map(&u.right_mul(&g)).unwrap();
        prop_assert!(e0 >= 0.0);
        prop_assert!((e0 - e1).abs() <= 1e-11 * (1.0 + e0), "{e0} vs {e1}");
    }

    #[test]
    fn map_and_pullback_energies_agree(spec in spec_strategy(), seed in 0u64..1000) {
        let a = alg(spec);
        let lat = Lattice::new([5, 6, 7], [1.0, 1.3, 0.8]).unwrap();
        let u = random(lat, &a, seed, 0.6);
        let e_map = skyrme_energy_map(&u).unwrap();
        let e_form = skyrme_energy_connection(&log_derivative(&u).unwrap());
        prop_assert!((e_map - e_form).abs() <= 1e-10, "{e_map} vs {e_form}");
    }

    #[test]
    fn connection_energy_bookkeeping(spec in spec_strategy(), seed in 0u64..1000) {
        let a = alg(spec);
        let lat = Lattice::cubic(4).unwrap();
        let d = a.dim();
        let form = OneForm::from_fn(lat, a.clone(), |c, s| {
            (0..d).map(|k| (((seed as usize + 3 * s + 5 * c + 7 * k) % 11) as f64 - 5.0) / 4.0).collect()
        }).unwrap();
        let e = skyrme_energy_connection(&form);
        let oracle = energy_by_terms(&form);
        prop_assert!((e - oracle).abs() <= 1e-11 * (1.0 + e));
    }

    #[test]
    fn connection_energy_is_conjugation_invariant(spec in spec_strategy(), seed in 0u64..1000, w in prop::collection::vec(-2.0..2.0f64, 10)) {
        let a = alg(spec);
        let lat = Lattice::cubic(5).unwrap();
        let form = log_derivative(&random(lat, &a, seed, 0.8)).unwrap();
        let g = a.group_exp(&w.iter().cycle().take(a.dim()).copied().collect::<Vec<_>>()).unwrap();
        let e0 = skyrme_energy_connection(&form);
        let e1 = skyrme_energy_connection(&form.conjugate(&g).unwrap());
        prop_assert!((e0 - e1).abs() <= 1e-11 * (1.0 + e0));
    }

    #[test]
    fn gauge_transforms_compose(seed in 0u64..1000) {
        let a = alg(AlgebraSpec::Su(2));
        let lat = Lattice::cubic(8).unwrap();
        let b = log_derivative(&random(lat, &a, seed, 0.5)).unwrap().scale(0.5);
        let u = random(lat, &a, seed + 1, 0.3);
        let w = random(lat, &a, seed + 2, 0.3);
        let twice = gauge_transform(&gauge_transform(&b, &u).unwrap(), &w).unwrap();
        let once = gauge_transform(&b, &u.mul(&w).unwrap()).unwrap();
        prop_assert!(twice.max_difference(&once) < 1e-9);
    }

    #[test]
    fn files_round_trip_losslessly(spec in spec_strategy(), seed in 0u64..1000) {
        let a = alg(spec);
        let lat = Lattice::new([3, 4, 5], [1.0, 0.5, 2.0]).unwrap();
        let u = random(lat, &a, seed, 1.0);
        let mut buf = Vec::new();
        write_field(&mut buf, &u).unwrap();
        let back = read_field(&mut buf.as_slice(), None).unwrap();
        prop_assert_eq!(back.max_distance(&u), 0.0);
        let f = log_derivative(&u).unwrap_or_else(|_| OneForm::zeros(lat, a.clone()));
        let mut buf = Vec::new();
        write_one_form(&mut buf, &f).unwrap();
        let back = read_one_form(&mut buf.as_slice(), Some(a.clone())).unwrap();
        prop_assert_eq!(back.max_difference(&f), 0.0);
    }
}
