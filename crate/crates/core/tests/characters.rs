//! Fixed-point characters against independent constructions: tangent spaces
//! by explicit linear algebra on `Hom(I, R/I)`, sheaf cohomology by Čech
//! counting on the fan, and Ext characters by multiplying K-theory classes.

mod common;

use common::hom_oracle;
use dt4_core::eqalg::vars::{e1, e2};
use dt4_core::eqalg::{LinearForm, WeightCharacter};
use dt4_core::localize::{
    cohomology_character, e_class_character, euler_character_chi, tangent_character, ToricSurfaceModel,
    TwistedBundleSpec, PRESETS,
};
use dt4_core::partitions::{hilb_fixed_points_on, partitions_of, HilbFixedPoint, Partition};

fn fans() -> Vec<(&'static str, Vec<[i64; 2]>)> {
    let h = |a: i64| vec![[1, 0], [0, 1], [-1, a], [0, -1]];
    vec![
        ("plane", vec![[1, 0], [0, 1], [-1, -1]]),
        ("p1xp1", h(0)),
        ("f1", h(1)),
        ("f2", h(2)),
        ("f3", h(3)),
    ]
}

#[test]
fn tangent_matches_deformation_space() {
    for name in PRESETS {
        let model = ToricSurfaceModel::preset(name).unwrap();
        for n in 0..=3 {
            for lambda in partitions_of(n).unwrap() {
                for p in 0..model.num_points() {
                    let mut assignment = vec![Partition::empty(); model.num_points()];
                    assignment[p] = lambda.clone();
                    let fp = HilbFixedPoint::from_partitions(assignment);
                    let got = tangent_character(&fp, &model).unwrap();
                    let f = &model.fixed_points[p];
                    assert_eq!(got, hom_oracle(&lambda, f.w1, f.w2), "{name} chart {p} λ = {:?}", lambda.parts());
                    assert_eq!(got.rank(), 2 * n);
                }
            }
        }
    }
}

/// Euler characteristic of the weight-`m` piece of `H•(O(D))`: one when no
/// ray is negative, `1 - c` when the negative rays form `c` cyclic runs, and
/// one when every ray is negative.
fn cech_weight(rays: &[[i64; 2]], d: &[i64], m: [i64; 2]) -> i64 {
    let neg: Vec<bool> = rays
        .iter()
        .zip(d)
        .map(|(v, &a)| m[0] * v[0] + m[1] * v[1] < -a)
        .collect();
    let k = neg.len();
    let count = neg.iter().filter(|&&x| x).count();
    if count == 0 {
        return 1;
    }
    if count == k {
        return 1;
    }
    let runs = (0..k).filter(|&i| neg[i] && !neg[(i + k - 1) % k]).count() as i64;
    1 - runs
}

fn cech_character(rays: &[[i64; 2]], d: &[i64]) -> WeightCharacter {
    let mut ch = WeightCharacter::new();
    for m0 in -15..=15 {
        for m1 in -15..=15 {
            let c = cech_weight(rays, d, [m0, m1]);
            if c != 0 {
                assert!(m0.abs() < 12 && m1.abs() < 12, "box too small for {d:?}");
                ch.add_weight(-LinearForm::from_terms(&[(e1(), m0), (e2(), m1)]), c);
            }
        }
    }
    ch
}

fn divisor_box(rank: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (lo..=hi).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}

#[test]
fn cohomology_matches_cech_count() {
    for (name, rays) in fans() {
        let model = ToricSurfaceModel::from_fan(name, &rays).unwrap();
        let (lo, hi) = if rays.len() == 3 { (-3, 2) } else { (-2, 1) };
        for d in divisor_box(rays.len(), lo, hi) {
            let got = cohomology_character(&TwistedBundleSpec::new(d.clone(), 0), &model).unwrap();
            assert_eq!(got, cech_character(&rays, &d), "{name} D = {d:?}");
            assert_eq!(got.rank(), model.chi(&d).unwrap(), "{name} D = {d:?}");
        }
    }
}

#[test]
fn plane_cohomology_examples() {
    let model = ToricSurfaceModel::preset("plane").unwrap();
    let h = |d: Vec<i64>| cohomology_character(&TwistedBundleSpec::new(d, 0), &model).unwrap();
    assert_eq!(h(vec![0, 0, 0]), WeightCharacter::from_weights([(LinearForm::ZERO, 1)]));
    assert!(h(vec![-1, 0, 0]).is_empty());
    assert!(h(vec![0, -2, 0]).is_empty());
    // H²(O(-3)) is one-dimensional
    assert_eq!(h(vec![-1, -1, -1]).rank(), 1);
    assert_eq!(h(vec![1, 0, 0]).rank(), 3);
}

/// `e^M [Q2 + Q̄1 e^{w1+w2} - Q̄1 Q2 (1 - e^{w1})(1 - e^{w2})]` per chart,
/// from `χ(F, G) = ch(F)^∨ ch(G) / ch(R)^∨` with `ch(I) = ch(R) - Q`.
fn ext_oracle(fp1: &HilbFixedPoint, fp2: &HilbFixedPoint, m: &TwistedBundleSpec, model: &ToricSurfaceModel) -> WeightCharacter {
    let mut total = WeightCharacter::new();
    for (p, f) in model.fixed_points.iter().enumerate() {
        let q = |lambda: &Partition, sign: i64| {
            WeightCharacter::from_weights(
                lambda
                    .boxes()
                    .map(|(i, j)| ((f.w1.scale(i as i64) + f.w2.scale(j as i64)).scale(sign), 1)),
            )
        };
        let q2 = q(&fp2.assignment[p], -1);
        let q1_bar = q(&fp1.assignment[p], 1);
        let koszul = WeightCharacter::from_weights([
            (LinearForm::ZERO, 1),
            (f.w1, -1),
            (f.w2, -1),
            (f.w1 + f.w2, 1),
        ]);
        let cross = q1_bar.tensor(&q2).tensor(&koszul);
        let local = &(&q2 + &q1_bar.shift(&(f.w1 + f.w2))) - &cross;
        total = &total + &local.shift(&m.weight_at(model, p).unwrap());
    }
    total
}

#[test]
fn e_class_matches_k_theory_product() {
    for name in ["plane", "p1xp1", "f2"] {
        let model = ToricSurfaceModel::preset(name).unwrap();
        let r = model.lattice_rank();
        let mut d = vec![0; r];
        d[0] = 2;
        d[1] = -1;
        for spec in [TwistedBundleSpec::trivial(r), TwistedBundleSpec::new(d, 1)] {
            for n1 in 0..=2 {
                for n2 in 0..=2 - n1 {
                    for a in hilb_fixed_points_on(model.num_points(), n1) {
                        for b in hilb_fixed_points_on(model.num_points(), n2) {
                            let got = e_class_character(&a, &b, &spec, &model).unwrap();
                            assert_eq!(got, ext_oracle(&a, &b, &spec, &model));
                            assert_eq!(got.rank(), (n1 + n2) as i64);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn chi_character_rank() {
    for name in PRESETS {
        let model = ToricSurfaceModel::preset(name).unwrap();
        let r = model.lattice_rank();
        let mut divisors = vec![vec![0; r], model.canonical().clone()];
        let mut d = vec![0; r];
        d[r - 1] = 2;
        d[0] = -1;
        divisors.push(d);
        for d in divisors {
            let chi = model.chi(&d).unwrap();
            let spec = TwistedBundleSpec::new(d.clone(), 1);
            for n1 in 0..=4u32 {
                for n2 in 0..=4 - n1 {
                    let pts2 = hilb_fixed_points_on(model.num_points(), n2);
                    for a in hilb_fixed_points_on(model.num_points(), n1).iter().step_by(3) {
                        for b in pts2.iter().step_by(2) {
                            let ch = euler_character_chi(a, b, &spec, &model).unwrap();
                            assert_eq!(ch.rank(), chi - (n1 + n2) as i64, "{name} D = {d:?}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn diagonal_e_class_is_the_tangent_space() {
    for name in PRESETS {
        let model = ToricSurfaceModel::preset(name).unwrap();
        let trivial = TwistedBundleSpec::trivial(model.lattice_rank());
        for n in 0..=3 {
            for fp in hilb_fixed_points_on(model.num_points(), n) {
                let e = e_class_character(&fp, &fp, &trivial, &model).unwrap();
                assert_eq!(e, tangent_character(&fp, &model).unwrap());
            }
        }
    }
}
