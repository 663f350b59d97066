use dt4_core::eqalg::vars::{e1, s, sp};
use dt4_core::eqalg::{chern_part, EqScalar, WeightCharacter};
use dt4_core::localize::limit::{limit_at_origin, sum_is_polynomial_in_weights, symbolic_sum, DEFAULT_DIRECTION};
use dt4_core::localize::model::{div_add, div_sub};
use dt4_core::localize::{
    e_class_character, mochizuki_a, q_class_factor, sum_terms, tangent_character, typeii_component_integral,
    typeii_terms, EvalOptions, LimitRoute, LocalTerm, MochizukiInput, PrefactorData, PrefactorVariant,
    ToricSurfaceModel, TwistedBundleSpec, PRESETS,
};
use dt4_core::par::Exec;
use dt4_core::partitions::hilb_fixed_points_on;
use dt4_core::Error;

fn model(name: &str) -> ToricSurfaceModel {
    ToricSurfaceModel::preset(name).unwrap()
}

fn body(m: &ToricSurfaceModel, d: &[i64], n1: u32, n2: u32, opts: &EvalOptions) -> EqScalar {
    let k = m.canonical().clone();
    let l = div_add(&k, d);
    sum_terms(&typeii_terms(m, &l, &k, n1, n2, opts).unwrap(), opts).unwrap()
}

fn unit(m: &ToricSurfaceModel, i: usize) -> Vec<i64> {
    let mut d = vec![0; m.lattice_rank()];
    d[i] = 1;
    d
}

#[test]
fn known_plane_bodies() {
    let m = model("plane");
    let opts = EvalOptions::default();
    let zero = vec![0; 3];
    let got: Vec<String> = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)]
        .iter()
        .map(|&(a, b)| body(&m, &zero, a, b, &opts).to_string())
        .collect();
    assert_eq!(got, ["1", "-18", "0", "57", "81", "0"]);
    let h = unit(&m, 0);
    assert_eq!(body(&m, &h, 1, 0, &opts).to_string(), "-24");
    assert_eq!(body(&m, &h, 1, 1, &opts).to_string(), "67");
}

#[test]
fn empty_component_is_the_prefactor() {
    for name in PRESETS {
        let m = model(name);
        let d = unit(&m, 1);
        let pre = PrefactorData::from_model(&m, &d, PrefactorVariant::Product).unwrap();
        let v = typeii_component_integral(&m, &div_add(m.canonical(), &d), m.canonical(), 0, 0, &pre, &EvalOptions::default())
            .unwrap();
        assert_eq!(v.value, pre.value().unwrap());
        assert!(v.body.is_one());
    }
    let k3 = PrefactorData::k3(PrefactorVariant::Product).value().unwrap();
    assert_eq!(k3.to_string(), "1/(4*s^2)");
    assert_eq!(PrefactorData::k3(PrefactorVariant::TypeIIB).value().unwrap(), k3);
}

#[test]
fn prefactor_parity_is_checked() {
    let odd = PrefactorData {
        c1_dot_d: 1,
        ..PrefactorData::k3(PrefactorVariant::Product)
    };
    assert!(matches!(odd.value(), Err(Error::PrefactorParity(_))));
    let odd = PrefactorData {
        l_dot_c1: 1,
        ..PrefactorData::k3(PrefactorVariant::TypeIIB)
    };
    assert!(matches!(odd.sign_exponent(), Err(Error::PrefactorParity(_))));
}

#[test]
fn routes_agree() {
    let direction = EvalOptions::default();
    let symbolic = EvalOptions {
        route: LimitRoute::Symbolic,
        ..Default::default()
    };
    for name in ["plane", "p1xp1", "f1"] {
        let m = model(name);
        let d = unit(&m, 0);
        for (n1, n2) in [(1, 0), (0, 1), (1, 1), (2, 0)] {
            assert_eq!(body(&m, &d, n1, n2, &direction), body(&m, &d, n1, n2, &symbolic), "{name} ({n1},{n2})");
        }
    }
}

#[test]
fn limit_is_independent_of_the_direction() {
    let dirs = [(1, 7), (-13, 5), (97, 89), (1009, -2), (3, 1)];
    for name in ["plane", "f2"] {
        let m = model(name);
        let d = unit(&m, 1);
        for (n1, n2) in [(1, 0), (1, 1), (0, 2)] {
            let base = body(&m, &d, n1, n2, &EvalOptions::default());
            for dir in dirs {
                let opts = EvalOptions {
                    direction: dir,
                    ..Default::default()
                };
                assert_eq!(body(&m, &d, n1, n2, &opts), base, "{name} ({n1},{n2}) along {dir:?}");
            }
        }
    }
}

#[test]
fn full_sum_depends_on_weights_but_its_limit_does_not() {
    let m = model("plane");
    let k = m.canonical().clone();
    let opts = EvalOptions::default();
    let terms: Vec<LocalTerm> = typeii_terms(&m, &k, &k, 1, 0, &opts)
        .unwrap()
        .into_iter()
        .filter_map(|t| t.term)
        .collect();
    let full = symbolic_sum(&terms, 64, Exec::Sequential).unwrap();
    assert!(full.contains_var(e1()));
    for dir in [(1, 2), (5, -3), DEFAULT_DIRECTION] {
        assert_eq!(limit_at_origin(&full, dir).unwrap(), EqScalar::from(-18));
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let m = model("p1xp1");
    let d = unit(&m, 0);
    let par = body(&m, &d, 2, 0, &EvalOptions::default());
    let seq = body(&m, &d, 2, 0, &EvalOptions::sequential());
    assert_eq!(par, seq);
}

#[test]
fn relabeling_fixed_points_changes_nothing() {
    let opts = EvalOptions::default();
    for (name, perm) in [("plane", vec![1, 2, 0]), ("f1", vec![2, 3, 0, 1]), ("p1xp1", vec![3, 0, 2, 1])] {
        let m = model(name);
        let p = m.permuted(&perm);
        let d = unit(&m, 0);
        for (n1, n2) in [(1, 0), (1, 1)] {
            assert_eq!(body(&m, &d, n1, n2, &opts), body(&p, &d, n1, n2, &opts));
        }
        let input = MochizukiInput {
            beta1: vec![0; m.lattice_rank()],
            beta2: d.clone(),
            l: m.canonical().clone(),
            p_g: m.p_g(),
        };
        assert_eq!(
            mochizuki_a(&m, &input, 1, &opts).unwrap(),
            mochizuki_a(&p, &input, 1, &opts).unwrap()
        );
    }
}

/// `Σ_p poly_p / e(T_p)` over `S^{[n1]} × S^{[n2]}`.
fn integrate(m: &ToricSurfaceModel, n1: u32, n2: u32, class: impl Fn(&WeightCharacter, &WeightCharacter) -> EqScalar) -> EqScalar {
    let mut terms = Vec::new();
    for a in hilb_fixed_points_on(m.num_points(), n1) {
        for b in hilb_fixed_points_on(m.num_points(), n2) {
            let t = &tangent_character(&a, m).unwrap() + &tangent_character(&b, m).unwrap();
            let e = e_class_character(&a, &b, &TwistedBundleSpec::new(unit(m, 0), 0), m).unwrap();
            let c = class(&t, &e);
            assert!(c.is_polynomial());
            terms.push(LocalTerm::new(t.scale(-1)).with_poly(c.numerator().clone()));
        }
    }
    symbolic_sum(&terms, 16, Exec::Parallel).unwrap()
}

#[test]
fn top_chern_sums_are_polynomials() {
    for name in PRESETS {
        let m = model(name);
        for (n1, n2) in [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2)] {
            let dim = 2 * (n1 + n2);
            let euler = integrate(&m, n1, n2, |t, _| chern_part(t, dim));
            let count = hilb_fixed_points_on(m.num_points(), n1).len() * hilb_fixed_points_on(m.num_points(), n2).len();
            assert_eq!(euler, EqScalar::from(count as i64));
            let square = integrate(&m, n1, n2, |_, e| {
                let c = chern_part(e, n1 + n2);
                &c * &c
            });
            assert!(square.to_rational().is_some(), "{name}: {square}");
            let over = integrate(&m, n1, n2, |t, e| chern_part(&(t + e), dim + 1));
            assert!(sum_is_polynomial_in_weights(&over), "{name}: {over}");
            let under = integrate(&m, n1, n2, |t, _| chern_part(t, dim - 1));
            assert!(under.is_zero());
        }
    }
}

#[test]
fn q_class_limit() {
    for name in ["plane", "f1"] {
        let m = model(name);
        let d = div_sub(&unit(&m, 0), &unit(&m, 1));
        let chi = m.chi(&d).unwrap();
        for a in [1, -2, 3] {
            for (n1, n2) in [(0, 0), (1, 0), (1, 1), (0, 2)] {
                for fp1 in hilb_fixed_points_on(m.num_points(), n1).iter().take(3) {
                    for fp2 in hilb_fixed_points_on(m.num_points(), n2).iter().take(3) {
                        let q = q_class_factor(fp1, fp2, &d, a, &m).unwrap();
                        let n = (n1 + n2) as i64;
                        let sign = if (chi - n).rem_euclid(2) == 0 { 1 } else { -1 };
                        let want = (&EqScalar::from(sign) * &(&EqScalar::from(a) * &EqScalar::var(s())).pow(n as i32).unwrap()).clone();
                        assert_eq!(limit_at_origin(&q, DEFAULT_DIRECTION).unwrap(), want);
                    }
                }
            }
        }
        assert!(q_class_factor(&hilb_fixed_points_on(m.num_points(), 0)[0], &hilb_fixed_points_on(m.num_points(), 0)[0], &d, 0, &m).is_err());
    }
}

/// The split `(0, 0)` in closed form: only cohomology characters survive.
fn mochizuki_empty_split(m: &ToricSurfaceModel, input: &MochizukiInput) -> EqScalar {
    let chi = |d: &[i64]| m.chi(d).unwrap() as i32;
    let d21 = div_sub(&input.beta2, &input.beta1);
    let d12 = div_sub(&input.beta1, &input.beta2);
    let two_sp = EqScalar::var(sp()).scale_int(&2.into());
    let sv = EqScalar::var(s());
    let num = &two_sp.pow(input.p_g as i32 + chi(&d21)).unwrap() * &(-&two_sp).pow(chi(&d12)).unwrap();
    let den = &(&sv.pow(2 * chi(&input.l)).unwrap() * &(&two_sp + &sv).pow(chi(&div_add(&input.l, &d21))).unwrap())
        * &(&sv - &two_sp).pow(chi(&div_add(&input.l, &d12))).unwrap();
    (&num / &den).residue(sp()).unwrap()
}

#[test]
fn mochizuki_empty_split_closed_form() {
    let opts = EvalOptions::default();
    let mut nonzero = 0;
    for name in ["plane", "p1xp1", "f1"] {
        let m = model(name);
        let z = vec![0; m.lattice_rank()];
        let (a, b) = (unit(&m, 0), unit(&m, 1));
        let k = m.canonical().clone();
        for (b1, b2) in [(z.clone(), z.clone()), (a.clone(), z.clone()), (z.clone(), b.clone()), (a.clone(), b.clone()), (b.clone(), a.clone())] {
            for l in [k.clone(), div_add(&k, &a), z.clone()] {
                for p_g in [0, 1] {
                    let input = MochizukiInput {
                        beta1: b1.clone(),
                        beta2: b2.clone(),
                        l: l.clone(),
                        p_g,
                    };
                    let n = m.pair(&b1, &b2).unwrap();
                    let got = mochizuki_a(&m, &input, n, &opts).unwrap();
                    let want = mochizuki_empty_split(&m, &input);
                    assert_eq!(got, want, "{name} β1 = {b1:?} β2 = {b2:?} L = {l:?} p_g = {p_g}");
                    nonzero += usize::from(!want.is_zero());
                }
            }
        }
    }
    assert!(nonzero > 0);
}

#[test]
fn mochizuki_known_values() {
    let m = model("plane");
    let input = MochizukiInput {
        beta1: vec![0; 3],
        beta2: vec![0; 3],
        l: m.canonical().clone(),
        p_g: 0,
    };
    let opts = EvalOptions::default();
    let got: Vec<String> = (0..3).map(|n| mochizuki_a(&m, &input, n, &opts).unwrap().to_string()).collect();
    assert_eq!(got, ["0", "-9/s", "171/s"]);
    let symbolic = EvalOptions {
        route: LimitRoute::Symbolic,
        ..Default::default()
    };
    assert_eq!(mochizuki_a(&m, &input, 2, &symbolic).unwrap().to_string(), "171/s");
    assert!(mochizuki_a(&m, &input, -1, &opts).unwrap().is_zero());
}
