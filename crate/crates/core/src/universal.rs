//! Universal polynomials in the intersection numbers of a surface.
//!
//! Localized integrals over `S^{[n1]} × S^{[n2]}` depend on `S` and the line
//! bundles only through the eleven numbers of [`ChernNumbers`]. Two fitters
//! are provided: a direct exact fit of one integral against monomials, and a
//! multiplicative fit of the whole generating series, whose logarithm is
//! linear in the invariants. Toric surfaces satisfy `c1² + c2 = 12`, so only
//! the multiplicative fit can separate those two directions.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::eqalg::vars::{e1, e2};
use crate::eqalg::EqScalar;
use crate::error::{Error, Result};
use crate::localize::integrands::{sum_terms, typeii_terms, PrefactorData, PrefactorVariant};
use crate::localize::limit::EvalOptions;
use crate::localize::model::{div_add, Divisor, ToricSurfaceModel};
use crate::moduli::{pair, DivisorClass, EllipticSurface};
use crate::par::par_map;

pub const NUM_FIELDS: usize = 11;

/// Field names, in exponent-vector order.
pub const FIELD_NAMES: [&str; NUM_FIELDS] = [
    "b1_sq", "b2_sq", "b1_c1", "b2_c1", "b1_D", "b2_D", "b1_b2", "D_sq", "D_c1", "c1_sq", "c2",
];

pub const D_SQ: usize = 7;
pub const D_C1: usize = 8;
pub const C1_SQ: usize = 9;
pub const C2: usize = 10;

/// Invariants seen by the type II integrand (the `β` classes do not enter).
pub const TYPEII_FIELDS: [usize; 4] = [D_SQ, D_C1, C1_SQ, C2];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChernNumbers {
    pub b1_sq: i64,
    pub b2_sq: i64,
    pub b1_c1: i64,
    pub b2_c1: i64,
    #[serde(rename = "b1_D")]
    pub b1_d: i64,
    #[serde(rename = "b2_D")]
    pub b2_d: i64,
    pub b1_b2: i64,
    #[serde(rename = "D_sq")]
    pub d_sq: i64,
    #[serde(rename = "D_c1")]
    pub d_c1: i64,
    pub c1_sq: i64,
    pub c2: i64,
}

impl ChernNumbers {
    pub fn to_array(&self) -> [i64; NUM_FIELDS] {
        [
            self.b1_sq, self.b2_sq, self.b1_c1, self.b2_c1, self.b1_d, self.b2_d, self.b1_b2,
            self.d_sq, self.d_c1, self.c1_sq, self.c2,
        ]
    }

    pub fn from_array(a: [i64; NUM_FIELDS]) -> ChernNumbers {
        ChernNumbers {
            b1_sq: a[0],
            b2_sq: a[1],
            b1_c1: a[2],
            b2_c1: a[3],
            b1_d: a[4],
            b2_d: a[5],
            b1_b2: a[6],
            d_sq: a[7],
            d_c1: a[8],
            c1_sq: a[9],
            c2: a[10],
        }
    }

    /// `χ(O_S)` by Noether's formula.
    pub fn chi_o(&self) -> Result<i64> {
        let t = self.c1_sq + self.c2;
        if t % 12 != 0 {
            return Err(Error::InvalidInput(format!("c1² + c2 = {t} is not divisible by 12")));
        }
        Ok(t / 12)
    }

    /// The type II prefactor data for `L = K + D`, from Riemann–Roch.
    pub fn prefactor(&self, variant: PrefactorVariant) -> Result<PrefactorData> {
        let chi_o = self.chi_o()?;
        // M = a L with L = D - c1: M² + M·c1 = a²L² + a L·c1
        let l_sq = self.d_sq - 2 * self.d_c1 + self.c1_sq;
        let l_c1 = self.d_c1 - self.c1_sq;
        let chi = |a: i64| chi_o + (a * a * l_sq + a * l_c1) / 2;
        Ok(PrefactorData {
            chi_l2: chi(2),
            chi_l: chi(1),
            chi_l_inv: chi(-1),
            c1_dot_d: self.d_c1,
            d_sq: self.d_sq,
            l_dot_alpha: 0,
            l_dot_c1: l_c1,
            l_sq,
            variant,
        })
    }
}

/// The eleven pairings on a toric model.
pub fn chern_invariants(
    model: &ToricSurfaceModel,
    beta1: &[i64],
    beta2: &[i64],
    d: &[i64],
) -> Result<ChernNumbers> {
    let k = model.canonical();
    Ok(ChernNumbers {
        b1_sq: model.pair(beta1, beta1)?,
        b2_sq: model.pair(beta2, beta2)?,
        b1_c1: model.c1_dot(beta1)?,
        b2_c1: model.c1_dot(beta2)?,
        b1_d: model.pair(beta1, d)?,
        b2_d: model.pair(beta2, d)?,
        b1_b2: model.pair(beta1, beta2)?,
        d_sq: model.pair(d, d)?,
        d_c1: model.c1_dot(d)?,
        c1_sq: model.pair(k, k)?,
        c2: model.chern.c2,
    })
}

/// The same pairings on a Weierstrass elliptic surface.
pub fn chern_invariants_elliptic(
    surface: &EllipticSurface,
    beta1: DivisorClass,
    beta2: DivisorClass,
    d: DivisorClass,
) -> ChernNumbers {
    let c1 = surface.c1();
    let p = |a, b| pair(a, b, surface);
    ChernNumbers {
        b1_sq: p(beta1, beta1),
        b2_sq: p(beta2, beta2),
        b1_c1: p(beta1, c1),
        b2_c1: p(beta2, c1),
        b1_d: p(beta1, d),
        b2_d: p(beta2, d),
        b1_b2: p(beta1, beta2),
        d_sq: p(d, d),
        d_c1: p(d, c1),
        c1_sq: p(c1, c1),
        c2: 12 * (surface.k + 2),
    }
}

/// The K3 point for `β = f` split as `(0, f)` and `D = m f`.
pub fn k3_point(m: i64) -> ChernNumbers {
    chern_invariants_elliptic(
        &EllipticSurface::k3(),
        DivisorClass::ZERO,
        DivisorClass::fiber(),
        DivisorClass::fiber().scale(m),
    )
}

/// Exponent vector over [`FIELD_NAMES`].
pub type Exponents = [u32; NUM_FIELDS];

pub fn monomial_name(e: &Exponents) -> String {
    let parts: Vec<String> = e
        .iter()
        .zip(FIELD_NAMES)
        .filter(|(&p, _)| p > 0)
        .map(|(&p, n)| if p == 1 { n.to_string() } else { format!("{n}^{p}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Monomials in `fields` of total degree between `min` and `max`, graded
/// then lexicographic.
pub fn monomials(fields: &[usize], min: u32, max: u32) -> Vec<Exponents> {
    fn rec(fields: &[usize], left: u32, cur: &mut Exponents, out: &mut Vec<Exponents>) {
        match fields.split_first() {
            None => {
                if left == 0 {
                    out.push(*cur);
                }
            }
            Some((&f, rest)) => {
                for p in (0..=left).rev() {
                    cur[f] = p;
                    rec(rest, left - p, cur, out);
                }
                cur[f] = 0;
            }
        }
    }
    let mut out = Vec::new();
    for deg in min..=max {
        rec(fields, deg, &mut [0; NUM_FIELDS], &mut out);
    }
    out
}

fn eval_monomial(e: &Exponents, at: &[i64; NUM_FIELDS]) -> BigInt {
    e.iter()
        .zip(at)
        .fold(BigInt::one(), |acc, (&p, &x)| acc * num_traits::pow(BigInt::from(x), p as usize))
}

/// `Σ c_e x^e` over the fields of [`ChernNumbers`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalPolynomial {
    pub degree_bound: u32,
    pub terms: BTreeMap<Exponents, EqScalar>,
}

impl UniversalPolynomial {
    pub fn zero(degree_bound: u32) -> UniversalPolynomial {
        UniversalPolynomial {
            degree_bound,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: EqScalar) -> UniversalPolynomial {
        let mut p = UniversalPolynomial::zero(0);
        p.add_term([0; NUM_FIELDS], c);
        p
    }

    fn add_term(&mut self, e: Exponents, c: EqScalar) {
        let slot = self.terms.entry(e).or_default();
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, at: &ChernNumbers) -> EqScalar {
        let x = at.to_array();
        self.terms
            .iter()
            .map(|(e, c)| c.scale_int(&eval_monomial(e, &x)))
            .sum()
    }

    pub fn add(&self, other: &UniversalPolynomial) -> UniversalPolynomial {
        let mut out = self.clone();
        out.degree_bound = self.degree_bound.max(other.degree_bound);
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn mul(&self, other: &UniversalPolynomial) -> UniversalPolynomial {
        let mut out = UniversalPolynomial::zero(self.degree_bound + other.degree_bound);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let mut e = *a;
                for (ei, bi) in e.iter_mut().zip(b) {
                    *ei += bi;
                }
                out.add_term(e, x * y);
            }
        }
        out
    }

    pub fn scale(&self, c: &EqScalar) -> UniversalPolynomial {
        let mut out = UniversalPolynomial::zero(self.degree_bound);
        for (e, x) in &self.terms {
            out.add_term(*e, x * c);
        }
        out
    }
}

impl fmt::Display for UniversalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("({c})*{}", monomial_name(e)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exponents: Vec<u32>,
    coefficient: EqScalar,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    degree_bound: u32,
    terms: Vec<TermJson>,
}

impl Serialize for UniversalPolynomial {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson {
            degree_bound: self.degree_bound,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson {
                    exponents: e.to_vec(),
                    coefficient: c.clone(),
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for UniversalPolynomial {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = PolyJson::deserialize(de)?;
        let mut p = UniversalPolynomial::zero(j.degree_bound);
        for t in j.terms {
            let e: Exponents = t
                .exponents
                .as_slice()
                .try_into()
                .map_err(|_| D::Error::custom(format!("exponent vector must have {NUM_FIELDS} entries")))?;
            if t.coefficient.is_zero() {
                return Err(D::Error::custom("zero coefficient"));
            }
            if e.iter().sum::<u32>() > j.degree_bound {
                return Err(D::Error::custom("term exceeds the degree bound"));
            }
            p.add_term(e, t.coefficient);
        }
        Ok(p)
    }
}

fn check_weight_free(v: &EqScalar) -> Result<()> {
    if v.contains_var(e1()) || v.contains_var(e2()) {
        return Err(Error::Fit(format!("sample value {v} depends on the torus weights")));
    }
    Ok(())
}

/// Fraction-free row echelon form of `a`, applying the same row operations
/// to `rhs`. Returns the pivot columns.
fn bareiss(a: &mut [Vec<BigInt>], rhs: &mut [EqScalar]) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        rhs.swap(row, p);
        let piv = a[row][c].clone();
        let inv_prev = EqScalar::from_rational(&BigRational::new(BigInt::one(), prev.clone()));
        for r in row + 1..rows {
            let f = a[r][c].clone();
            for j in c + 1..cols {
                let v = &piv * &a[r][j] - &f * &a[row][j];
                debug_assert!((&v % &prev).is_zero());
                a[r][j] = v / &prev;
            }
            a[r][c] = BigInt::zero();
            let v = &rhs[r].scale_int(&piv) - &rhs[row].scale_int(&f);
            rhs[r] = &v * &inv_prev;
        }
        prev = piv;
        pivots.push(c);
        row += 1;
    }
    pivots
}

/// Rank of an integer matrix.
pub fn integer_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut a = rows.to_vec();
    let mut rhs = vec![EqScalar::zero(); a.len()];
    bareiss(&mut a, &mut rhs).len()
}

/// Exact solve of `Σ_e c_e x^e = v` over the samples, for the unknowns
/// `c_e`, `e ∈ basis`.
pub fn fit_on_basis(
    samples: &[(ChernNumbers, EqScalar)],
    basis: &[Exponents],
    degree_bound: u32,
) -> Result<UniversalPolynomial> {
    for (_, v) in samples {
        check_weight_free(v)?;
    }
    let mut a: Vec<Vec<BigInt>> = samples
        .iter()
        .map(|(x, _)| {
            let x = x.to_array();
            basis.iter().map(|e| eval_monomial(e, &x)).collect()
        })
        .collect();
    let mut rhs: Vec<EqScalar> = samples.iter().map(|(_, v)| v.clone()).collect();
    let pivots = bareiss(&mut a, &mut rhs);
    if pivots.len() < basis.len() {
        let missing: Vec<String> = (0..basis.len())
            .filter(|c| !pivots.contains(c))
            .map(|c| monomial_name(&basis[c]))
            .collect();
        return Err(Error::Fit(format!(
            "underdetermined: rank {} of {} with {} samples; deficient monomials: {}",
            pivots.len(),
            basis.len(),
            samples.len(),
            missing.join(", ")
        )));
    }
    if let Some(r) = (pivots.len()..samples.len()).find(|&r| !rhs[r].is_zero()) {
        return Err(Error::Fit(format!(
            "inconsistent system: residual {} after elimination (row {r})",
            rhs[r]
        )));
    }
    let mut coeffs = vec![EqScalar::zero(); basis.len()];
    for (r, &c) in pivots.iter().enumerate().rev() {
        let mut acc = rhs[r].clone();
        for j in c + 1..basis.len() {
            if !a[r][j].is_zero() {
                acc = &acc - &coeffs[j].scale_int(&a[r][j]);
            }
        }
        let inv = EqScalar::from_rational(&BigRational::new(BigInt::one(), a[r][c].clone()));
        coeffs[c] = &acc * &inv;
    }
    let mut p = UniversalPolynomial::zero(degree_bound);
    for (e, c) in basis.iter().zip(coeffs) {
        p.add_term(*e, c);
    }
    Ok(p)
}

/// Fit over the monomials of degree `≤ degree_bound` in `fields`.
pub fn fit_universal_on(
    samples: &[(ChernNumbers, EqScalar)],
    degree_bound: u32,
    fields: &[usize],
) -> Result<UniversalPolynomial> {
    fit_on_basis(samples, &monomials(fields, 0, degree_bound), degree_bound)
}

/// Fit over all eleven invariants.
pub fn fit_universal(samples: &[(ChernNumbers, EqScalar)], degree_bound: u32) -> Result<UniversalPolynomial> {
    let all: Vec<usize> = (0..NUM_FIELDS).collect();
    fit_universal_on(samples, degree_bound, &all)
}

pub fn evaluate(poly: &UniversalPolynomial, at: &ChernNumbers) -> EqScalar {
    poly.evaluate(at)
}

/// `Σ_{n1,n2} c_{n1,n2} q1^{n1} q2^{n2}`, known for `n1 + n2 ≤ order`.
pub type BiSeries<T> = BTreeMap<(u32, u32), T>;

trait Ring: Clone {
    fn zero() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale_ratio(&self, n: i64, d: i64) -> Self;
}

impl Ring for EqScalar {
    fn zero() -> Self {
        EqScalar::zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale_ratio(&self, n: i64, d: i64) -> Self {
        self * &EqScalar::from_ratio(n, d)
    }
}

impl Ring for UniversalPolynomial {
    fn zero() -> Self {
        UniversalPolynomial::zero(0)
    }
    fn add(&self, o: &Self) -> Self {
        UniversalPolynomial::add(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        UniversalPolynomial::mul(self, o)
    }
    fn scale_ratio(&self, n: i64, d: i64) -> Self {
        self.scale(&EqScalar::from_ratio(n, d))
    }
}

fn graded_keys(order: u32) -> Vec<(u32, u32)> {
    (1..=order)
        .flat_map(|d| (0..=d).rev().map(move |a| (a, d - a)))
        .collect()
}

fn get<T: Ring>(s: &BiSeries<T>, k: (u32, u32)) -> T {
    s.get(&k).cloned().unwrap_or_else(T::zero)
}

/// `Σ_{0 < (a,b) ≤ k} (a+b) f_{a,b} g_{k-(a,b)}`.
fn euler_convolution<T: Ring>(f: &BiSeries<T>, g: &BiSeries<T>, k: (u32, u32), skip_top: bool) -> T {
    let mut acc = T::zero();
    for a in 0..=k.0 {
        for b in 0..=k.1 {
            if (a, b) == (0, 0) || (skip_top && (a, b) == k) {
                continue;
            }
            let (Some(x), Some(y)) = (f.get(&(a, b)), g.get(&(k.0 - a, k.1 - b))) else {
                continue;
            };
            acc = acc.add(&x.mul(y).scale_ratio((a + b) as i64, 1));
        }
    }
    acc
}

/// `log g` for `g_{0,0} = 1`, through total degree `order`.
fn series_log<T: Ring>(g: &BiSeries<T>, order: u32) -> BiSeries<T> {
    let mut f = BiSeries::new();
    for k in graded_keys(order) {
        let d = (k.0 + k.1) as i64;
        let rest = euler_convolution(&f, g, k, true);
        let v = get(g, k).add(&rest.scale_ratio(-1, d));
        f.insert(k, v);
    }
    f
}

/// `exp f` for `f_{0,0} = 0`, with `one` as the constant term.
fn series_exp<T: Ring>(f: &BiSeries<T>, one: T, order: u32) -> BiSeries<T> {
    let mut g = BiSeries::new();
    g.insert((0, 0), one);
    for k in graded_keys(order) {
        let d = (k.0 + k.1) as i64;
        let v = euler_convolution(f, &g, k, false).scale_ratio(1, d);
        g.insert(k, v);
    }
    g
}

/// `log Z = Σ ℓ_{n1,n2}(x) q1^{n1} q2^{n2}` with each `ℓ` linear in the
/// invariants and without constant term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicativeFit {
    pub order: u32,
    pub fields: Vec<usize>,
    pub log_coefficients: Vec<((u32, u32), UniversalPolynomial)>,
}

impl MultiplicativeFit {
    /// The universal polynomials of `Z`, one per `(n1, n2)` with
    /// `n1 + n2 ≤ order`; `(n1, n2)` has degree at most `n1 + n2`.
    pub fn polynomials(&self) -> BiSeries<UniversalPolynomial> {
        let logs: BiSeries<UniversalPolynomial> = self.log_coefficients.iter().cloned().collect();
        let mut out = series_exp(&logs, UniversalPolynomial::constant(EqScalar::one()), self.order);
        for ((a, b), p) in out.iter_mut() {
            p.degree_bound = a + b;
        }
        out
    }

    pub fn polynomial(&self, n1: u32, n2: u32) -> Result<UniversalPolynomial> {
        if n1 + n2 > self.order {
            return Err(Error::InvalidInput(format!(
                "({n1}, {n2}) is beyond the fitted order {}",
                self.order
            )));
        }
        Ok(self.polynomials().remove(&(n1, n2)).expect("graded key"))
    }

    /// `Z` at a point, by exponentiating the evaluated logarithm.
    pub fn evaluate_series(&self, at: &ChernNumbers) -> BiSeries<EqScalar> {
        let logs: BiSeries<EqScalar> = self
            .log_coefficients
            .iter()
            .map(|(k, p)| (*k, p.evaluate(at)))
            .collect();
        series_exp(&logs, EqScalar::one(), self.order)
    }
}

/// Fits `log Z` coefficientwise against the linear monomials in `fields`.
pub fn fit_multiplicative(
    samples: &[(ChernNumbers, BiSeries<EqScalar>)],
    order: u32,
    fields: &[usize],
) -> Result<MultiplicativeFit> {
    let basis = monomials(fields, 1, 1);
    let mut logs = Vec::new();
    let mut per_sample = Vec::with_capacity(samples.len());
    for (x, z) in samples {
        if !z.get(&(0, 0)).is_some_and(EqScalar::is_one) {
            return Err(Error::Fit(format!("series at {x:?} does not start with 1")));
        }
        if let Some(k) = graded_keys(order).into_iter().find(|k| !z.contains_key(k)) {
            return Err(Error::Fit(format!("series at {x:?} is missing the coefficient {k:?}")));
        }
        per_sample.push(series_log(z, order));
    }
    for k in graded_keys(order) {
        let pts: Vec<(ChernNumbers, EqScalar)> = samples
            .iter()
            .zip(&per_sample)
            .map(|((x, _), l)| (*x, l[&k].clone()))
            .collect();
        let p = fit_on_basis(&pts, &basis, 1)
            .map_err(|e| Error::Fit(format!("log coefficient {k:?}: {e}")))?;
        logs.push((k, p));
    }
    Ok(MultiplicativeFit {
        order,
        fields: fields.to_vec(),
        log_coefficients: logs,
    })
}

/// One test configuration: a toric surface with `β1`, `β2`, `D`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatteryConfig {
    pub surface: String,
    pub beta1: Divisor,
    pub beta2: Divisor,
    pub d: Divisor,
    pub chern: ChernNumbers,
}

impl BatteryConfig {
    pub fn new(model: &ToricSurfaceModel, beta1: Divisor, beta2: Divisor, d: Divisor) -> Result<BatteryConfig> {
        let chern = chern_invariants(model, &beta1, &beta2, &d)?;
        Ok(BatteryConfig {
            surface: model.name.clone(),
            beta1,
            beta2,
            d,
            chern,
        })
    }
}

/// A set of configurations and the ranks of their design matrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Battery {
    pub configs: Vec<BatteryConfig>,
    pub fields: Vec<usize>,
    pub degree_bound: u32,
    /// Number of monomials of degree `≤ degree_bound`.
    pub monomials: usize,
    /// Rank of the direct-fit design matrix.
    pub rank: usize,
    /// Rank of the Chern vectors restricted to `fields` (multiplicative fit).
    pub linear_rank: usize,
}

impl Battery {
    pub fn new(configs: Vec<BatteryConfig>, fields: &[usize], degree_bound: u32) -> Battery {
        let basis = monomials(fields, 0, degree_bound);
        let linear = monomials(fields, 1, 1);
        let design = |basis: &[Exponents]| -> Vec<Vec<BigInt>> {
            configs
                .iter()
                .map(|c| {
                    let x = c.chern.to_array();
                    basis.iter().map(|e| eval_monomial(e, &x)).collect()
                })
                .collect()
        };
        Battery {
            rank: integer_rank(&design(&basis)),
            linear_rank: integer_rank(&design(&linear)),
            monomials: basis.len(),
            fields: fields.to_vec(),
            degree_bound,
            configs,
        }
    }

    /// Fails, naming the missing monomials, when the Chern vectors do not
    /// span the linear monomials in `fields`.
    pub fn check_linear(&self) -> Result<()> {
        let zeros: Vec<_> = self.configs.iter().map(|c| (c.chern, EqScalar::zero())).collect();
        fit_on_basis(&zeros, &monomials(&self.fields, 1, 1), 1).map(|_| ())
    }

    /// Presets crossed with every `D = Σ c_i D_i` over the first
    /// `rank - 2` toric divisors (a basis of the Picard group) with `c_i` in
    /// `range`, and `β1 = β2 = 0`.
    pub fn typeii(
        models: &[ToricSurfaceModel],
        range: std::ops::RangeInclusive<i64>,
        degree_bound: u32,
    ) -> Result<Battery> {
        let mut configs = Vec::new();
        for m in models {
            let zero = vec![0; m.lattice_rank()];
            let picard = m.lattice_rank().saturating_sub(2);
            for mut d in lattice_box(picard, &range) {
                d.resize(m.lattice_rank(), 0);
                configs.push(BatteryConfig::new(m, zero.clone(), zero.clone(), d)?);
            }
        }
        Ok(Battery::new(configs, &TYPEII_FIELDS, degree_bound))
    }
}

fn lattice_box(rank: usize, range: &std::ops::RangeInclusive<i64>) -> Vec<Divisor> {
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                range.clone().map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}

/// Type II integrals `∫_{S^{[n1]} × S^{[n2]}}` without prefactor, for all
/// `n1 + n2 ≤ order`, with `L = K + D`.
pub fn typeii_body_series(
    model: &ToricSurfaceModel,
    d: &[i64],
    order: u32,
    opts: &EvalOptions,
) -> Result<BiSeries<EqScalar>> {
    let k = model.canonical().clone();
    let l = div_add(&k, d);
    let mut keys = vec![(0, 0)];
    keys.extend(graded_keys(order));
    let vals = par_map(&keys, opts.exec, |&(n1, n2)| {
        typeii_terms(model, &l, &k, n1, n2, opts).and_then(|t| sum_terms(&t, opts))
    });
    keys.into_iter()
        .zip(vals)
        .map(|(k, v)| Ok((k, v?)))
        .collect()
}

/// Samples for [`fit_multiplicative`] over a type II battery.
pub fn typeii_samples(
    battery: &Battery,
    models: &[ToricSurfaceModel],
    order: u32,
    opts: &EvalOptions,
) -> Result<Vec<(ChernNumbers, BiSeries<EqScalar>)>> {
    let run = |c: &BatteryConfig| -> Result<(ChernNumbers, BiSeries<EqScalar>)> {
        let m = models
            .iter()
            .find(|m| m.name == c.surface)
            .ok_or_else(|| Error::InvalidInput(format!("no model named {}", c.surface)))?;
        Ok((c.chern, typeii_body_series(m, &c.d, order, opts)?))
    };
    par_map(&battery.configs, opts.exec, run).into_iter().collect()
}

/// Surfaces of the small default battery; their Chern vectors already span
/// the four type II directions.
pub const SMALL_BATTERY: [&str; 2] = ["plane", "p1xp1"];

/// Multiplicative type II fit through `order` over `surfaces` crossed with
/// `D` coordinates in `0..=1`.
pub fn typeii_fit(surfaces: &[&str], order: u32, opts: &EvalOptions) -> Result<(Battery, MultiplicativeFit)> {
    let models = surfaces
        .iter()
        .map(|n| ToricSurfaceModel::preset(n))
        .collect::<Result<Vec<_>>>()?;
    let battery = Battery::typeii(&models, 0..=1, order)?;
    battery.check_linear()?;
    let samples = typeii_samples(&battery, &models, order, opts)?;
    let fit = fit_multiplicative(&samples, order, &TYPEII_FIELDS)?;
    Ok((battery, fit))
}

/// Full type II value `prefactor · ∫` at an arbitrary point.
pub fn typeii_value_at(
    fit: &MultiplicativeFit,
    at: &ChernNumbers,
    n1: u32,
    n2: u32,
    variant: PrefactorVariant,
) -> Result<EqScalar> {
    let body = fit.polynomial(n1, n2)?.evaluate(at);
    Ok(&at.prefactor(variant)?.value()? * &body)
}
