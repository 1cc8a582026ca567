use std::sync::Arc;

use proptest::prelude::*;

use skyrme_core::holonomy::{build_atlas, develop_cube, holonomy_rep, CubicalCover, HolonomyOptions};
use skyrme_core::lattice::{gauge_transform, make_random, RandomOptions};
use skyrme_core::{Algebra, AlgebraSpec, Error, Lattice, OneForm};

fn su2() -> Arc<Algebra> {
    Arc::new(Algebra::build(AlgebraSpec::Su(2)).unwrap())
}

fn constant_form(lat: Lattice, a: Arc<Algebra>, x: &[f64], theta: [f64; 3]) -> OneForm {
    let l = lat.lengths();
    OneForm::from_fn(lat, a, |c, _| x.iter().map(|v| v * theta[c] / l[c]).collect()).unwrap()
}

#[test]
fn zero_form_develops_to_identity() {
    let lat = Lattice::cubic(6).unwrap();
    let cube = develop_cube(&OneForm::zeros(lat, su2()), [-2, 1, 3], [4, 5, 6], 0.0).unwrap();
    assert!(cube.values.iter().all(|g| g.dist_identity() == 0.0));
}

#[test]
fn constant_abelian_form_develops_to_separable_exponential() {
    let a = su2();
    let lat = Lattice::new([8, 6, 10], [1.0, 0.7, 1.4]).unwrap();
    let c = [0.9, -2.1, 0.4];
    let form = OneForm::from_fn(lat, a.clone(), |axis, _| vec![0.0, 0.0, c[axis]]).unwrap();
    let cube = develop_cube(&form, [0, 0, 0], [5, 4, 6], 1e-12).unwrap();
    let h = lat.spacings();
    for i in 0..5 {
        for j in 0..4 {
            for k in 0..6 {
                let phase = c[0] * h[0] * i as f64 + c[1] * h[1] * j as f64 + c[2] * h[2] * k as f64;
                let expected = a.group_exp(&[0.0, 0.0, phase]).unwrap();
                assert!(cube.get([i, j, k]).frob_dist(&expected) < 1e-13);
            }
        }
    }
}

#[test]
fn curved_form_is_refused() {
    let a = su2();
    let lat = Lattice::cubic(8).unwrap();
    let form = OneForm::from_fn(lat, a, |axis, _| {
        let mut v = vec![0.0; 3];
        v[axis] = 3.0;
        v
    })
    .unwrap();
    assert!(matches!(develop_cube(&form, [0, 0, 0], [4, 4, 4], 0.8), Err(Error::NotFlat(_))));
}

#[test]
fn overlapping_labels_compose() {
    let a = su2();
    let lat = Lattice::cubic(16).unwrap();
    let v = make_random(lat, a.clone(), RandomOptions { seed: 12, amplitude: 1.0, modes: 1 }).unwrap();
    let form = gauge_transform(&constant_form(lat, a, &[0.6, 0.8, 0.0], [1.3, -0.5, 2.2]), &v).unwrap();
    let cover = CubicalCover::default_for(&lat).unwrap();
    let atlas = build_atlas(&form, &cover, &HolonomyOptions::default()).unwrap();
    let mut worst: f64 = 0.0;
    for p in 0..cover.vertices() {
        for (d1, d2) in [([1, 0, 0], [0, 1, 0]), ([0, 1, 0], [0, 0, -1]), ([1, 1, 0], [0, -1, 1]), ([-1, 0, 0], [0, 0, 1])] {
            let q = cover.offset_vertex(p, d1);
            let (gpq, _) = atlas.overlap_label(p, d1).unwrap();
            let (gqr, _) = atlas.overlap_label(q, d2).unwrap();
            let (gpr, _) = atlas.overlap_label(p, [0, 1, 2].map(|k| d1[k] + d2[k])).unwrap();
            worst = worst.max(gpq.matmul(&gqr).frob_dist(&gpr));
        }
    }
    assert!(worst < 1e-9, "{worst}");
}

#[test]
fn nearby_connections_have_nearby_holonomy() {
    let a = su2();
    let lat = Lattice::cubic(12).unwrap();
    let cover = CubicalCover::default_for(&lat).unwrap();
    let opts = HolonomyOptions::default();
    let x = [0.0, 0.6, 0.8];
    let theta = [0.8, 1.9, -0.7];
    let limit = holonomy_rep(&constant_form(lat, a.clone(), &x, theta), &cover, &opts).unwrap();
    // x is a unit vector, so tr ρ_ℓ = 2 cos θ_ℓ
    let mut last = f64::INFINITY;
    for n in [1.0, 4.0, 16.0, 64.0] {
        let delta = 0.5 / n;
        let an = constant_form(lat, a.clone(), &x, theta.map(|t| t + delta));
        let d = holonomy_rep(&an, &cover, &opts).unwrap().trace_distance(&limit);
        let expected = theta.iter().map(|t| (2.0 * (t + delta).cos() - 2.0 * t.cos()).abs()).fold(0.0, f64::max);
        assert!((d - expected).abs() < 1e-10, "{d} vs {expected}");
        assert!(d < last);
        last = d;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn holonomy_traces_are_gauge_invariant(seed in 0u64..1000, theta in prop::array::uniform3(-3.0..3.0f64)) {
        let a = su2();
        let lat = Lattice::cubic(12).unwrap();
        let cover = CubicalCover::default_for(&lat).unwrap();
        let opts = HolonomyOptions::default();
        let base = constant_form(lat, a.clone(), &[0.0, 0.0, 1.0], theta);
        let w = make_random(lat, a.clone(), RandomOptions { seed, amplitude: 1.0, modes: 1 }).unwrap();
        let r0 = holonomy_rep(&base, &cover, &opts).unwrap();
        let r1 = holonomy_rep(&gauge_transform(&base, &w).unwrap(), &cover, &opts).unwrap();
        prop_assert!(r0.trace_distance(&r1) < 1e-9);
        prop_assert!(r1.commutation_defect() < 1e-9);
    }
}
