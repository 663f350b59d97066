//! The type II product integrand and the Mochizuki coefficient integrand,
//! assembled as factored [`LocalTerm`]s over fixed points of
//! `S^{[n1]} × S^{[n2]}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::eqalg::vars::{s, sp};
use crate::eqalg::{chern_part, euler_of_character, EqScalar, LinearForm, WeightCharacter};
use crate::error::{Error, Result};
use crate::partitions::{hilb_fixed_points_on, HilbFixedPoint, Partition};
use crate::par::par_map;

use super::characters::{
    cohomology_character, e_class_character, tangent_character, twisted_tangent_character,
    v_class_character,
};
use super::limit::{limit_sum, EvalOptions, LocalTerm};
use super::model::{div_add, div_scale, div_sub, Divisor, ToricSurfaceModel, TwistedBundleSpec};

impl LocalTerm {
    /// A term with Euler factor `euler`, or `None` when a zero weight occurs
    /// with positive multiplicity (the term vanishes). A zero weight in the
    /// denominator is an error.
    pub fn checked(euler: WeightCharacter) -> Result<Option<LocalTerm>> {
        let zero = euler.multiplicity(&LinearForm::ZERO);
        if zero > 0 {
            return Ok(None);
        }
        if zero < 0 {
            return Err(Error::ZeroWeight(format!(
                "zero weight with multiplicity {zero} in a denominator Euler class"
            )));
        }
        Ok(Some(LocalTerm::new(euler)))
    }
}

/// Which sign exponent the type II prefactor uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PrefactorVariant {
    /// `(c1(S)·D + 3 D²)/2`, for untwisted nested components.
    #[default]
    Product,
    /// `-L·α + L·c1(S)/2 + 3 L²/2`.
    #[serde(rename = "typeIIB")]
    TypeIIB,
}

impl std::str::FromStr for PrefactorVariant {
    type Err = Error;
    fn from_str(x: &str) -> Result<Self> {
        match x {
            "product" => Ok(PrefactorVariant::Product),
            "typeIIB" => Ok(PrefactorVariant::TypeIIB),
            _ => Err(Error::InvalidInput(format!(
                "unknown prefactor variant {x:?}; expected product or typeIIB"
            ))),
        }
    }
}

/// Numerical inputs of the prefactor
/// `(-1)^e / (2^{χ(L²)} (-s)^{χ(L²) + χ(L) - χ(L⁻¹)})`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefactorData {
    pub chi_l2: i64,
    pub chi_l: i64,
    pub chi_l_inv: i64,
    pub c1_dot_d: i64,
    pub d_sq: i64,
    pub l_dot_alpha: i64,
    pub l_dot_c1: i64,
    pub l_sq: i64,
    pub variant: PrefactorVariant,
}

impl PrefactorData {
    /// Data for `L = K + D` on a toric model, with `α = 0`.
    pub fn from_model(model: &ToricSurfaceModel, d: &[i64], variant: PrefactorVariant) -> Result<PrefactorData> {
        let k = model.canonical().clone();
        let l = div_add(&k, d);
        Ok(PrefactorData {
            chi_l2: model.chi(&div_scale(&l, 2))?,
            chi_l: model.chi(&l)?,
            chi_l_inv: model.chi(&div_scale(&l, -1))?,
            c1_dot_d: model.c1_dot(d)?,
            d_sq: model.pair(d, d)?,
            l_dot_alpha: 0,
            l_dot_c1: model.c1_dot(&l)?,
            l_sq: model.pair(&l, &l)?,
            variant,
        })
    }

    /// K3-type numbers: `χ(L²) = χ(L) = χ(L⁻¹) = 2`, all pairings zero.
    pub fn k3(variant: PrefactorVariant) -> PrefactorData {
        PrefactorData {
            chi_l2: 2,
            chi_l: 2,
            chi_l_inv: 2,
            variant,
            ..Default::default()
        }
    }

    pub fn sign_exponent(&self) -> Result<i64> {
        let twice = match self.variant {
            PrefactorVariant::Product => self.c1_dot_d + 3 * self.d_sq,
            PrefactorVariant::TypeIIB => -2 * self.l_dot_alpha + self.l_dot_c1 + 3 * self.l_sq,
        };
        if twice % 2 != 0 {
            return Err(Error::PrefactorParity(format!(
                "sign exponent {twice}/2 is not an integer ({:?} variant)",
                self.variant
            )));
        }
        Ok(twice / 2)
    }

    pub fn s_exponent(&self) -> i64 {
        self.chi_l2 + self.chi_l - self.chi_l_inv
    }

    pub fn value(&self) -> Result<EqScalar> {
        let sign = if self.sign_exponent()?.rem_euclid(2) == 0 { 1 } else { -1 };
        let two = EqScalar::from_int(2).pow(self.chi_l2 as i32)?;
        let minus_s = (-EqScalar::var(s())).pow(self.s_exponent() as i32)?;
        Ok(&EqScalar::from_int(sign) / &(&two * &minus_s))
    }
}

/// One fixed point of `S^{[n1]} × S^{[n2]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairPoint {
    pub first: Vec<Partition>,
    pub second: Vec<Partition>,
}

fn pair_points(model: &ToricSurfaceModel, n1: u32, n2: u32) -> Vec<(HilbFixedPoint, HilbFixedPoint)> {
    let a = hilb_fixed_points_on(model.num_points(), n1);
    let b = hilb_fixed_points_on(model.num_points(), n2);
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in &a {
        for y in &b {
            out.push((x.clone(), y.clone()));
        }
    }
    out
}

/// A localization term together with the fixed point it came from.
#[derive(Clone, Debug)]
pub struct AuditedTerm {
    pub point: PairPoint,
    pub term: Option<LocalTerm>,
}

/// JSON line `{fixed_point, term}` for audit dumps.
#[derive(Clone, Debug, Serialize)]
pub struct AuditRecord {
    pub fixed_point: PairPoint,
    pub term: EqScalar,
}

impl AuditedTerm {
    pub fn record(&self) -> Result<AuditRecord> {
        Ok(AuditRecord {
            fixed_point: self.point.clone(),
            term: match &self.term {
                Some(t) => t.value()?,
                None => EqScalar::zero(),
            },
        })
    }
}

fn poly_term(x: &EqScalar) -> Result<(crate::eqalg::Poly, BigRational)> {
    if !x.is_polynomial() {
        return Err(Error::Expansion(format!("expected a polynomial class, got {x}")));
    }
    let den = x.denominator().constant_term();
    Ok((x.numerator().clone(), BigRational::new(BigInt::one(), den)))
}

/// Type II integrand at one fixed point, divided by `e(T1) e(T2)`.
pub fn typeii_term(
    fp1: &HilbFixedPoint,
    fp2: &HilbFixedPoint,
    l: &[i64],
    k: &[i64],
    model: &ToricSurfaceModel,
) -> Result<Option<LocalTerm>> {
    let n = fp1.total + fp2.total;
    let lt = TwistedBundleSpec::new(l.to_vec(), 1);
    let e_o = e_class_character(fp1, fp2, &TwistedBundleSpec::trivial(model.lattice_rank()), model)?;
    let top = chern_part(&e_o, n);
    if top.is_zero() {
        return Ok(None);
    }
    let mut euler = &twisted_tangent_character(fp1, &lt, model)? + &twisted_tangent_character(fp2, &lt, model)?;
    let m_num = TwistedBundleSpec::new(div_sub(k, &div_scale(l, 2)), -2);
    let m_den1 = TwistedBundleSpec::new(div_sub(k, l), -1);
    let m_den2 = TwistedBundleSpec::new(div_scale(l, -1), -1);
    euler = &euler + &e_class_character(fp1, fp2, &m_num, model)?;
    euler = &euler - &e_class_character(fp1, fp2, &m_den1, model)?;
    euler = &euler - &e_class_character(fp1, fp2, &m_den2, model)?;
    euler = &euler - &tangent_character(fp1, model)?;
    euler = &euler - &tangent_character(fp2, model)?;
    let (poly, c) = poly_term(&top)?;
    Ok(LocalTerm::checked(euler)?.map(|t| t.with_poly(poly).scaled(&c)))
}

/// All type II terms for `(n1, n2)` in enumeration order.
pub fn typeii_terms(
    model: &ToricSurfaceModel,
    l: &[i64],
    k: &[i64],
    n1: u32,
    n2: u32,
    opts: &EvalOptions,
) -> Result<Vec<AuditedTerm>> {
    model.check_divisor(l)?;
    model.check_divisor(k)?;
    let points = pair_points(model, n1, n2);
    par_map(&points, opts.exec, |(a, b)| {
        Ok(AuditedTerm {
            point: PairPoint {
                first: a.assignment.clone(),
                second: b.assignment.clone(),
            },
            term: typeii_term(a, b, l, k, model)?,
        })
    })
    .into_iter()
    .collect()
}

/// Result of a type II component integral.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypeIIValue {
    pub prefactor: EqScalar,
    /// The integral over `S^{[n1]} × S^{[n2]}` without prefactor.
    pub body: EqScalar,
    pub value: EqScalar,
}

/// Prefactor times the localized integral of the type II product integrand.
pub fn typeii_component_integral(
    model: &ToricSurfaceModel,
    l: &[i64],
    k: &[i64],
    n1: u32,
    n2: u32,
    prefactor: &PrefactorData,
    opts: &EvalOptions,
) -> Result<TypeIIValue> {
    let pre = prefactor.value()?;
    let terms = typeii_terms(model, l, k, n1, n2, opts)?;
    let body = sum_terms(&terms, opts)?;
    Ok(TypeIIValue {
        value: &pre * &body,
        prefactor: pre,
        body,
    })
}

/// Non-equivariant limit of a list of audited terms.
pub fn sum_terms(terms: &[AuditedTerm], opts: &EvalOptions) -> Result<EqScalar> {
    let live: Vec<LocalTerm> = terms.iter().filter_map(|t| t.term.clone()).collect();
    limit_sum(&live, opts)
}

/// `(a s)^{χ(M)} / e(χ(I1, I2 ⊗ M · t^{-a}))` at a fixed-point pair.
pub fn q_class_factor(
    fp1: &HilbFixedPoint,
    fp2: &HilbFixedPoint,
    m: &[i64],
    a: i64,
    model: &ToricSurfaceModel,
) -> Result<EqScalar> {
    if a == 0 {
        return Err(Error::InvalidInput("Q class needs a nonzero t-power a".into()));
    }
    let spec = TwistedBundleSpec::new(m.to_vec(), -a);
    let chi = &cohomology_character(&spec, model)? - &e_class_character(fp1, fp2, &spec, model)?;
    let num = (&EqScalar::from_int(a) * &EqScalar::var(s())).pow(model.chi(m)? as i32)?;
    Ok(&num / &euler_of_character(&chi)?)
}

/// Line bundles entering the Mochizuki integrand: `L_{β1}`, `L_{β2}`, `L`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MochizukiInput {
    pub beta1: Divisor,
    pub beta2: Divisor,
    pub l: Divisor,
    pub p_g: i64,
}

struct MochizukiBundles {
    /// `H•(M)` characters for `χ_{ij}` and `χ'_{ij}`, indexed `[i][j]`.
    h: [[WeightCharacter; 2]; 2],
    hp: [[WeightCharacter; 2]; 2],
    m: [[TwistedBundleSpec; 2]; 2],
    mp: [[TwistedBundleSpec; 2]; 2],
}

impl MochizukiBundles {
    fn new(input: &MochizukiInput, model: &ToricSurfaceModel) -> Result<MochizukiBundles> {
        let b = [&input.beta1, &input.beta2];
        // χ_{ij} = χ(I_i, I_j ⊗ L_{βj} L_{βi}^{-1}) with the t' weights of the
        // two summands; primed versions add L·t.
        let tp = |i: usize, j: usize| match (i, j) {
            (0, 1) => 2,
            (1, 0) => -2,
            _ => 0,
        };
        let spec = |i: usize, j: usize, primed: bool| {
            let d = div_sub(b[j], b[i]);
            let (d, t) = if primed { (div_add(&d, &input.l), 1) } else { (d, 0) };
            TwistedBundleSpec {
                divisor: d,
                t_power: t,
                tp_power: tp(i, j),
            }
        };
        let m = [[spec(0, 0, false), spec(0, 1, false)], [spec(1, 0, false), spec(1, 1, false)]];
        let mp = [[spec(0, 0, true), spec(0, 1, true)], [spec(1, 0, true), spec(1, 1, true)]];
        let h_of = |x: &[[TwistedBundleSpec; 2]; 2]| -> Result<[[WeightCharacter; 2]; 2]> {
            Ok([
                [cohomology_character(&x[0][0], model)?, cohomology_character(&x[0][1], model)?],
                [cohomology_character(&x[1][0], model)?, cohomology_character(&x[1][1], model)?],
            ])
        };
        Ok(MochizukiBundles {
            h: h_of(&m)?,
            hp: h_of(&mp)?,
            m,
            mp,
        })
    }
}

fn mochizuki_character(
    fp: [&HilbFixedPoint; 2],
    input: &MochizukiInput,
    bundles: &MochizukiBundles,
    model: &ToricSurfaceModel,
) -> Result<WeightCharacter> {
    let chi = |i: usize, j: usize, primed: bool| -> Result<WeightCharacter> {
        let (h, m) = if primed {
            (&bundles.hp[i][j], &bundles.mp[i][j])
        } else {
            (&bundles.h[i][j], &bundles.m[i][j])
        };
        Ok(h - &e_class_character(fp[i], fp[j], m, model)?)
    };
    let lb1 = TwistedBundleSpec::new(input.beta1.clone(), 0);
    let mut lb2 = TwistedBundleSpec::new(input.beta2.clone(), 0);
    lb2.tp_power = 2;
    let mut ch = &v_class_character(fp[0], &lb1, model)? + &v_class_character(fp[1], &lb2, model)?;
    ch = &ch + &chi(0, 1, false)?;
    ch = &ch + &chi(1, 0, false)?;
    for (i, j) in [(0, 0), (1, 1), (0, 1), (1, 0)] {
        ch = &ch - &chi(i, j, true)?;
    }
    let n = (fp[0].total + fp[1].total) as i64;
    ch.add_weight(LinearForm::term(sp(), 2), -(n - input.p_g));
    Ok(ch)
}

/// The Mochizuki integrand at a fixed-point pair, before dividing by the
/// tangent Euler classes.
pub fn mochizuki_a_integrand(
    fp1: &HilbFixedPoint,
    fp2: &HilbFixedPoint,
    input: &MochizukiInput,
    model: &ToricSurfaceModel,
) -> Result<EqScalar> {
    let bundles = MochizukiBundles::new(input, model)?;
    let ch = mochizuki_character([fp1, fp2], input, &bundles, model)?;
    match LocalTerm::checked(ch)? {
        Some(t) => t.value(),
        None => Ok(EqScalar::zero()),
    }
}

/// Localization terms of `A` for one split `(n1, n2)`, divided by `e(T1) e(T2)`.
pub fn mochizuki_terms(
    model: &ToricSurfaceModel,
    input: &MochizukiInput,
    n1: u32,
    n2: u32,
    opts: &EvalOptions,
) -> Result<Vec<AuditedTerm>> {
    model.check_divisor(&input.beta1)?;
    model.check_divisor(&input.beta2)?;
    model.check_divisor(&input.l)?;
    let bundles = MochizukiBundles::new(input, model)?;
    let points = pair_points(model, n1, n2);
    par_map(&points, opts.exec, |(a, b)| {
        let mut ch = mochizuki_character([a, b], input, &bundles, model)?;
        ch = &ch - &tangent_character(a, model)?;
        ch = &ch - &tangent_character(b, model)?;
        Ok(AuditedTerm {
            point: PairPoint {
                first: a.assignment.clone(),
                second: b.assignment.clone(),
            },
            term: LocalTerm::checked(ch)?,
        })
    })
    .into_iter()
    .collect()
}

/// `Res_{s'=0}` of the non-equivariant limit of the given terms.
pub fn mochizuki_a_from_terms(terms: &[AuditedTerm], opts: &EvalOptions) -> Result<EqScalar> {
    sum_terms(terms, opts)?.residue(sp())
}

/// Splits `(n1, n2)` with `n1 + n2 = n - β1·β2`.
pub fn mochizuki_splits(model: &ToricSurfaceModel, input: &MochizukiInput, n: i64) -> Result<Vec<(u32, u32)>> {
    let total = n - model.pair(&input.beta1, &input.beta2)?;
    if total < 0 {
        return Ok(Vec::new());
    }
    let total = total as u32;
    Ok((0..=total).rev().map(|n1| (n1, total - n1)).collect())
}

/// The coefficient `A`: sum over splits of the residue of the integral.
pub fn mochizuki_a(model: &ToricSurfaceModel, input: &MochizukiInput, n: i64, opts: &EvalOptions) -> Result<EqScalar> {
    let mut acc = EqScalar::zero();
    for (n1, n2) in mochizuki_splits(model, input, n)? {
        let terms = mochizuki_terms(model, input, n1, n2, opts)?;
        acc = &acc + &mochizuki_a_from_terms(&terms, opts)?;
    }
    Ok(acc)
}
