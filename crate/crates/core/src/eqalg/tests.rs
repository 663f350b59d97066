use super::vars::{e1, e2, s, sp};
use super::*;
use proptest::prelude::*;

fn p(x: &str) -> EqScalar {
    EqScalar::parse(x).unwrap()
}

#[test]
fn normalize_examples() {
    assert_eq!(p("(2*s)/(4*s^2)").to_string(), "1/(2*s)");
    assert!(p("(s - s)/1").is_zero());
    assert_eq!(p("(s^2 - sp^2)/(s - sp)"), p("s + sp"));
    assert_eq!(p("(s^2 - sp^2)/(s - sp)").to_string(), "s + sp");
}

#[test]
fn canonical_form_round_trip() {
    let x = p("(24*s^2 - 1)/(2*s)");
    assert_eq!(x.to_string(), "(24*s^2 - 1)/(2*s)");
    for t in ["1/s^2", "-3/(2*s)", "1/(4*s^2)", "(e1 + e2)/(e1*e2)", "-s/(e1 - e2)", "7"] {
        let x = p(t);
        assert_eq!(p(&x.to_string()), x, "{t}");
    }
}

#[test]
fn denominator_sign_is_positive() {
    let x = p("1/(-s)");
    assert_eq!(x.to_string(), "-1/s");
    let y = p("(s)/(sp - s)");
    assert!(y.denominator().name_leading_coeff() > 0.into());
}

#[test]
fn zero_division_is_error() {
    assert!(EqScalar::zero().inv().is_err());
    assert!(EqScalar::parse("1/(s - s)").is_err());
}

#[test]
fn gcd_multivariate() {
    let a = p("(s + e1)^3*(s - 2*e2)*(e1 + 3)").numerator().clone();
    let b = p("(s + e1)^2*(e1 + 3)^2*(s + e2)").numerator().clone();
    let g = a.gcd(&b);
    assert_eq!(EqScalar::from_poly(g), p("(s + e1)^2*(e1 + 3)"));
}

#[test]
fn laurent_examples() {
    let x = p("1/(1 - sp)");
    let got = x.laurent_expand(sp(), 2).unwrap();
    assert_eq!(
        got,
        vec![(0, EqScalar::one()), (1, EqScalar::one()), (2, EqScalar::one())]
    );
    let y = p("s/sp^2");
    assert_eq!(y.laurent_expand(sp(), 0).unwrap(), vec![(-2, p("s"))]);
    let z = p("(e1 + e2*sp)/(2*sp)");
    assert_eq!(
        z.laurent_expand(sp(), 0).unwrap(),
        vec![(-1, p("e1/2")), (0, p("e2/2"))]
    );
}

#[test]
fn residue_examples() {
    let x = p("(e1 + e2*sp + s*sp^2)/(2*sp)^2");
    assert_eq!(x.residue(sp()).unwrap(), p("e2/4"));
    assert!(p("s*sp^3 + 4").residue(sp()).unwrap().is_zero());
    assert_eq!(p("e1/sp").residue(sp()).unwrap(), p("e1"));
}

#[test]
fn substitution() {
    let x = p("(s^2 + e1)/(s - e2)");
    let y = x.substitute(s(), &p("e1/e2")).unwrap();
    assert_eq!(y, p("(e1^2/e2^2 + e1)/(e1/e2 - e2)"));
    let r = x
        .evaluate(&[(s(), rational(2, 1)), (e1(), rational(1, 1)), (e2(), rational(-1, 1))])
        .unwrap();
    assert_eq!(r, p("5/3"));
}

#[test]
fn derivative_quotient_rule() {
    let x = p("1/(1 - s)");
    assert_eq!(x.derivative(s()), p("1/(1 - s)^2"));
}

#[test]
fn euler_examples() {
    let ch = WeightCharacter::from_weights([(LinearForm::var(e1()), 1), (LinearForm::var(e2()), 1)]);
    assert_eq!(euler_of_character(&ch).unwrap(), p("e1*e2"));
    let mut c2 = WeightCharacter::new();
    c2.add_weight(LinearForm::var(s()), 1);
    c2.add_weight(LinearForm::var(s()), -1);
    assert!(c2.is_empty());
    assert_eq!(euler_of_character(&c2).unwrap(), EqScalar::one());
    let bad = WeightCharacter::from_weights([(LinearForm::var(e1()), 1), (LinearForm::ZERO, 1)]);
    let err = euler_of_character(&bad).unwrap_err();
    assert!(err.to_string().contains("non-generic torus weight"));
}

#[test]
fn chern_examples() {
    let ch = WeightCharacter::from_weights([(LinearForm::var(e1()), 1), (LinearForm::var(e2()), 1)]);
    assert_eq!(chern_part(&ch, 2), p("e1*e2"));
    assert_eq!(chern_part(&ch, 0), EqScalar::one());
    let w = LinearForm::from_terms(&[(e1(), 2), (s(), -1)]);
    let inv = WeightCharacter::from_weights([(w, -1)]);
    assert_eq!(chern_part(&inv, 2), w.to_scalar().pow(2).unwrap());
    let with_zero = WeightCharacter::from_weights([(LinearForm::ZERO, 3), (LinearForm::var(s()), 1)]);
    assert_eq!(chern_part(&with_zero, 1), p("s"));
}

// ---------------------------------------------------------------------------
// randomized checks

fn small_poly() -> impl Strategy<Value = Poly> {
    let vars = [s(), sp(), e1()];
    prop::collection::vec((0u32..3, 0u32..3, 0u32..2, -5i64..6), 1..4).prop_map(move |ts| {
        Poly::from_terms(ts.into_iter().map(|(a, b, c, k)| {
            let m = Mono::var(vars[0], a)
                .mul(&Mono::var(vars[1], b))
                .mul(&Mono::var(vars[2], c));
            (m, k.into())
        }))
    })
}

fn scalar() -> impl Strategy<Value = EqScalar> {
    (small_poly(), small_poly()).prop_filter_map("nonzero denominator", |(n, d)| {
        EqScalar::new(n, d).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a / &a).is_one());
        }
    }

    #[test]
    fn normalize_idempotent_and_round_trip(a in scalar()) {
        prop_assert_eq!(a.normalize(), a.clone());
        prop_assert_eq!(EqScalar::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn residue_linear(a in scalar(), b in scalar()) {
        let ra = a.residue(sp());
        let rb = b.residue(sp());
        if let (Ok(ra), Ok(rb)) = (ra, rb) {
            prop_assert_eq!((&a + &b).residue(sp()).unwrap(), &ra + &rb);
        }
    }

    #[test]
    fn euler_multiplicative(
        xs in prop::collection::vec((-3i64..4, -3i64..4, -2i64..3), 0..5),
        ys in prop::collection::vec((-3i64..4, -3i64..4, -2i64..3), 0..5),
    ) {
        let mk = |v: &[(i64, i64, i64)]| WeightCharacter::from_weights(v.iter().filter_map(|&(a, b, m)| {
            let w = LinearForm::from_terms(&[(e1(), a), (e2(), b)]);
            (!w.is_zero()).then_some((w, m))
        }));
        let (a, b) = (mk(&xs), mk(&ys));
        let ab = &a + &b;
        prop_assert_eq!(
            euler_of_character(&ab).unwrap(),
            euler_of_character(&a).unwrap() * euler_of_character(&b).unwrap()
        );
        prop_assert_eq!(chern_part(&ab, 1), ab.first_chern().to_scalar());
        prop_assert_eq!(ab.rank(), a.rank() + b.rank());
    }
}
