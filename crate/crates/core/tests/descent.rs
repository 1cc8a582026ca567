use std::sync::Arc;

use proptest::prelude::*;

use skyrme_core::invariants::sector_of;
use skyrme_core::lattice::{
    gauge_transform, make_hedgehog, make_random, skyrme_energy_connection, skyrme_energy_map, AlgebraSiteField, RandomOptions,
};
use skyrme_core::minimizer::{lattice_gradient, minimize_connection, minimize_map, seed_for_sector, MinimizeOptions};
use skyrme_core::{Algebra, AlgebraSpec, Error, Field, Lattice, OneForm};

fn su2() -> Arc<Algebra> {
    Arc::new(Algebra::build(AlgebraSpec::Su(2)).unwrap())
}

/// `u(x)·exp(-t G(x))` at every site.
fn step(u: &Field, g: &AlgebraSiteField<f64>, t: f64) -> Field {
    let a = u.algebra();
    let mut v = u.clone();
    for s in 0..u.lattice().sites() {
        let x: Vec<f64> = g.get(0, s).iter().map(|c| -t * c).collect();
        v.values_mut()[s] = u.get(s).matmul(&a.group_exp(&x).unwrap());
    }
    v
}

#[test]
fn hedgehog_descent_keeps_its_charge() {
    let a = su2();
    let lat = Lattice::cubic(12).unwrap();
    let u = make_hedgehog(lat, a, 0.45).unwrap();
    let opts = MinimizeOptions { max_iters: 40, sector_interval: 5, ..Default::default() };
    let (v, trace) = minimize_map(&u, &opts).unwrap();
    assert!(trace.is_monotone() && trace.sector_constant());
    for r in &trace.records {
        if let Some(s) = &r.sector {
            assert!((s.charges_raw[0] - 1.0).abs() < 0.1);
        }
    }
    assert!((skyrme_energy_map(&v).unwrap() - trace.final_energy()).abs() < 1e-10);
}

#[test]
fn connection_run_matches_its_gauge_field() {
    let a = su2();
    let lat = Lattice::cubic(12).unwrap();
    let sector = sector_of(&make_hedgehog(lat, a.clone(), 0.45).unwrap()).unwrap();
    let zero = OneForm::zeros(lat, a.clone());
    let opts = MinimizeOptions { max_iters: 10, ..Default::default() };
    let (form, field, trace) = minimize_connection(&zero, &sector, &opts).unwrap();
    let e_form = skyrme_energy_connection(&form);
    let e_gauge = skyrme_energy_connection(&gauge_transform(&zero, &field).unwrap());
    let e_map = skyrme_energy_map(&field).unwrap();
    assert!((e_form - trace.final_energy()).abs() < 1e-10);
    assert!((e_gauge - e_map).abs() < 1e-10);
    assert!(trace.sector_constant());
}

#[test]
fn trace_csv_has_one_row_per_record() {
    let a = su2();
    let lat = Lattice::cubic(6).unwrap();
    let u = make_random(lat, a, RandomOptions { seed: 2, amplitude: 0.4, modes: 1 }).unwrap();
    let (_, trace) = minimize_map(&u, &MinimizeOptions { max_iters: 7, sector_interval: 3, ..Default::default() }).unwrap();
    let mut buf = Vec::new();
    trace.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), trace.records.len() + 1);
    assert!(rows[1].starts_with("0,"));
    assert!(rows[1].contains("\"(0,0,0)\""));
}

#[test]
fn seeds_exist_only_for_small_charges() {
    let a = su2();
    let lat = Lattice::cubic(12).unwrap();
    let mut s = sector_of(&make_hedgehog(lat, a.clone(), 0.45).unwrap()).unwrap();
    let seed = seed_for_sector(lat, a.clone(), &s).unwrap();
    assert!(sector_of(&seed).unwrap().same_sector(&s));
    s.charges[0] = -1;
    assert_eq!(sector_of(&seed_for_sector(lat, a.clone(), &s).unwrap()).unwrap().charges, vec![-1]);
    s.charges[0] = 2;
    assert!(matches!(seed_for_sector(lat, a, &s), Err(Error::NoSeed)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn negative_gradient_descends(seed in 0u64..1000) {
        let a = su2();
        let lat = Lattice::cubic(6).unwrap();
        let u = make_random(lat, a, RandomOptions { seed, amplitude: 0.7, modes: 1 }).unwrap();
        let g = lattice_gradient(&u).unwrap();
        let e0 = skyrme_energy_map(&u).unwrap();
        let e1 = skyrme_energy_map(&step(&u, &g, 1e-4)).unwrap();
        prop_assert!(e1 < e0, "{e1} !< {e0}");
    }
}
