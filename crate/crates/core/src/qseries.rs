//! Truncated Laurent series in `q^{1/2}` with [`EqScalar`] coefficients.
//!
//! Exponents are stored as integer counts of half-units, so `q^{1/2}` has
//! exponent 1 and `q` has exponent 2. Every series carries an exclusive
//! truncation bound; results of arithmetic are only claimed below the bound
//! that both operands justify.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::eqalg::EqScalar;
use crate::error::{Error, Result};

/// An exponent in half-units of `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Half(pub i64);

impl Half {
    /// `q^n` with integer `n`.
    pub fn q(n: i64) -> Half {
        Half(2 * n)
    }

    pub fn half_units(self) -> i64 {
        self.0
    }

    /// Parses `"7"`, `"-3/2"` or `"3.5"`.
    pub fn parse(s: &str) -> Result<Half> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a half-integer: {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            return match b {
                1 => Ok(Half(2 * a)),
                2 => Ok(Half(a)),
                _ => Err(bad()),
            };
        }
        if let Some((a, b)) = s.split_once('.') {
            let neg = a.trim_start().starts_with('-');
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let frac = b.trim_end_matches('0');
            return match frac {
                "" => Ok(Half(2 * a)),
                "5" => Ok(Half(2 * a + if neg { -1 } else { 1 })),
                _ => Err(bad()),
            };
        }
        s.parse::<i64>().map(Half::q).map_err(|_| bad())
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// A truncated Laurent series in `q^{1/2}`.
#[derive(Clone, PartialEq, Eq)]
pub struct HalfQSeries {
    coeffs: BTreeMap<i64, EqScalar>,
    min_exponent: i64,
    truncation: i64,
}

impl HalfQSeries {
    /// The zero series known below `truncation`.
    pub fn zero(truncation: Half) -> HalfQSeries {
        HalfQSeries {
            coeffs: BTreeMap::new(),
            min_exponent: truncation.0,
            truncation: truncation.0,
        }
    }

    pub fn monomial(c: EqScalar, e: Half, truncation: Half) -> HalfQSeries {
        HalfQSeries::from_terms([(e, c)], truncation)
    }

    /// Terms at or beyond `truncation` are dropped; zero coefficients are
    /// not stored.
    pub fn from_terms(
        terms: impl IntoIterator<Item = (Half, EqScalar)>,
        truncation: Half,
    ) -> HalfQSeries {
        let mut coeffs: BTreeMap<i64, EqScalar> = BTreeMap::new();
        for (e, c) in terms {
            if e.0 < truncation.0 {
                let slot = coeffs.entry(e.0).or_default();
                *slot = &*slot + &c;
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        let min_exponent = coeffs.keys().next().copied().unwrap_or(truncation.0);
        HalfQSeries {
            coeffs,
            min_exponent,
            truncation: truncation.0,
        }
    }

    fn with(coeffs: BTreeMap<i64, EqScalar>, truncation: i64) -> HalfQSeries {
        let coeffs: BTreeMap<i64, EqScalar> = coeffs
            .into_iter()
            .filter(|(e, c)| *e < truncation && !c.is_zero())
            .collect();
        let min_exponent = coeffs.keys().next().copied().unwrap_or(truncation);
        HalfQSeries {
            coeffs,
            min_exponent,
            truncation,
        }
    }

    pub fn truncation(&self) -> Half {
        Half(self.truncation)
    }

    /// Lowest stored exponent, or the truncation bound for the zero series.
    pub fn min_exponent(&self) -> Half {
        Half(self.min_exponent)
    }

    pub fn coeff(&self, e: Half) -> Result<EqScalar> {
        if e.0 >= self.truncation {
            return Err(Error::Truncation(format!(
                "coefficient of q^{e} requested beyond truncation O(q^{})",
                Half(self.truncation)
            )));
        }
        Ok(self.coeffs.get(&e.0).cloned().unwrap_or_default())
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Half, &EqScalar)> {
        self.coeffs.iter().map(|(e, c)| (Half(*e), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn has_only_integer_exponents(&self) -> bool {
        self.coeffs.keys().all(|e| e % 2 == 0)
    }

    pub fn truncate(&self, truncation: Half) -> HalfQSeries {
        HalfQSeries::with(self.coeffs.clone(), truncation.0.min(self.truncation))
    }

    pub fn add(&self, other: &HalfQSeries) -> HalfQSeries {
        let t = self.truncation.min(other.truncation);
        let mut out = self.coeffs.clone();
        for (e, c) in &other.coeffs {
            let slot = out.entry(*e).or_default();
            *slot = &*slot + c;
        }
        HalfQSeries::with(out, t)
    }

    pub fn neg(&self) -> HalfQSeries {
        HalfQSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &HalfQSeries) -> HalfQSeries {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &EqScalar) -> HalfQSeries {
        HalfQSeries::with(
            self.coeffs.iter().map(|(e, x)| (*e, x * c)).collect(),
            self.truncation,
        )
    }

    /// Multiplication by `q^{shift}`.
    pub fn shift(&self, shift: Half) -> HalfQSeries {
        HalfQSeries::with(
            self.coeffs.iter().map(|(e, x)| (e + shift.0, x.clone())).collect(),
            self.truncation + shift.0,
        )
    }

    pub fn mul(&self, other: &HalfQSeries) -> HalfQSeries {
        let t = (self.truncation + other.min_exponent).min(other.truncation + self.min_exponent);
        let mut out: BTreeMap<i64, EqScalar> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let e = ea + eb;
                if e >= t {
                    break;
                }
                let slot = out.entry(e).or_default();
                *slot = &*slot + &(ca * cb);
            }
        }
        HalfQSeries::with(out, t)
    }

    /// `F(sign * q^{1/2})` for a series with integer exponents.
    pub fn substitute_sqrt(&self, sign: i32) -> Result<HalfQSeries> {
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidInput(format!("sign must be +1 or -1, got {sign}")));
        }
        if !self.has_only_integer_exponents() {
            return Err(Error::InvalidInput(
                "substitute_sqrt needs a series with integer exponents".into(),
            ));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(h, c)| {
                let e = h / 2;
                let c = if sign < 0 && e.is_odd() { -c } else { c.clone() };
                (e, c)
            })
            .collect();
        Ok(HalfQSeries::with(coeffs, Integer::div_floor(&(self.truncation + 1), &2)))
    }

    /// The integer-exponent part.
    pub fn even_projection(&self) -> HalfQSeries {
        HalfQSeries::with(
            self.coeffs
                .iter()
                .filter(|(e, _)| *e % 2 == 0)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
            self.truncation,
        )
    }

    /// The half-integer-exponent part.
    pub fn odd_projection(&self) -> HalfQSeries {
        self.sub(&self.even_projection())
    }

    /// `F(q^k)`.
    pub fn substitute_power(&self, k: i64) -> Result<HalfQSeries> {
        if k < 1 {
            return Err(Error::InvalidInput(format!("power must be positive, got {k}")));
        }
        Ok(HalfQSeries::with(
            self.coeffs.iter().map(|(e, c)| (e * k, c.clone())).collect(),
            self.truncation * k,
        ))
    }

    /// Exact agreement of all coefficients below `bound`; errors when `bound`
    /// exceeds either truncation.
    pub fn agrees_below(&self, other: &HalfQSeries, bound: Half) -> Result<bool> {
        let common = self.truncation.min(other.truncation);
        if bound.0 > common {
            return Err(Error::Truncation(format!(
                "comparison up to q^{bound} exceeds common truncation O(q^{})",
                Half(common)
            )));
        }
        let lo = self.min_exponent.min(other.min_exponent);
        Ok((lo..bound.0).all(|e| {
            self.coeffs.get(&e).cloned().unwrap_or_default()
                == other.coeffs.get(&e).cloned().unwrap_or_default()
        }))
    }

    /// Exact agreement up to the common truncation.
    pub fn agrees(&self, other: &HalfQSeries) -> bool {
        let common = Half(self.truncation.min(other.truncation));
        self.agrees_below(other, common).expect("within common truncation")
    }
}

impl fmt::Display for HalfQSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (e, c)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mono = match e.0 {
                0 => String::new(),
                2 => "q".to_string(),
                _ => format!("q^{e}"),
            };
            match (mono.is_empty(), c.is_one()) {
                (true, _) => write!(f, "{c}")?,
                (false, true) => write!(f, "{mono}")?,
                (false, false) if c.numerator().num_terms() > 1 && c.denominator().is_one() => {
                    write!(f, "({c})*{mono}")?
                }
                (false, false) => write!(f, "{c}*{mono}")?,
            }
        }
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", Half(self.truncation))
    }
}

impl fmt::Debug for HalfQSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HalfQSeries({self})")
    }
}

#[derive(Serialize)]
struct TermJson {
    exponent_num: i64,
    exponent_den: i64,
    coefficient: EqScalar,
}

/// Serializes as a list of `{exponent_num, exponent_den, coefficient}`.
impl Serialize for HalfQSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.coeffs.len()))?;
        for (e, c) in &self.coeffs {
            let (num, den) = if e % 2 == 0 { (e / 2, 1) } else { (*e, 2) };
            seq.serialize_element(&TermJson {
                exponent_num: num,
                exponent_den: den,
                coefficient: c.clone(),
            })?;
        }
        seq.end()
    }
}

fn sigma1(n: u64) -> BigInt {
    let mut s = 0u64;
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += d;
            if d * d != n {
                s += n / d;
            }
        }
        d += 1;
    }
    BigInt::from(s)
}

/// Integer coefficients of `∏_{m≥1}(1-q^m)^exponent` for `q^0 .. q^{len-1}`.
///
/// Uses the logarithmic-derivative recurrence
/// `n a_n = -exponent Σ_{k=1}^{n} σ(k) a_{n-k}`.
pub fn product_power_coefficients(exponent: i64, len: usize) -> Vec<BigInt> {
    let mut a: Vec<BigInt> = Vec::with_capacity(len);
    if len == 0 {
        return a;
    }
    a.push(BigInt::one());
    let sig: Vec<BigInt> = (0..len as u64).map(|k| if k == 0 { BigInt::zero() } else { sigma1(k) }).collect();
    let e = BigInt::from(-exponent);
    for n in 1..len {
        let mut acc = BigInt::zero();
        for k in 1..=n {
            acc += &sig[k] * &a[n - k];
        }
        acc *= &e;
        let (q, r) = acc.div_rem(&BigInt::from(n));
        debug_assert!(r.is_zero());
        a.push(q);
    }
    a
}

/// Number of integer exponents `0 <= e` strictly below `order`.
fn integer_len(order: Half) -> usize {
    if order.0 <= 0 {
        0
    } else {
        ((order.0 + 1) / 2) as usize
    }
}

/// `∏_{m≥1}(1-q^m)^exponent`, known below `order`.
pub fn product_power(exponent: i64, order: Half) -> Result<HalfQSeries> {
    if order.0 <= 0 {
        return Err(Error::InvalidInput(format!("order must be positive, got {order}")));
    }
    let a = product_power_coefficients(exponent, integer_len(order));
    Ok(HalfQSeries::from_terms(
        a.into_iter()
            .enumerate()
            .map(|(n, c)| (Half::q(n as i64), EqScalar::from_int(c))),
        order,
    ))
}

/// `1/Δ(q) = q^{-1} ∏(1-q^m)^{-24}`, known below `order`.
pub fn delta_inverse(order: Half) -> Result<HalfQSeries> {
    if order.0 <= -2 {
        return Err(Error::InvalidInput(format!("order must exceed -1, got {order}")));
    }
    Ok(product_power(-24, Half(order.0 + 2))?.shift(Half::q(-1)))
}

/// Göttsche's generating function `Σ e(S^{[n]}) q^n = ∏(1-q^m)^{-e(S)}`.
pub fn goettsche_series(euler_char: i64, order: Half) -> Result<HalfQSeries> {
    product_power(-euler_char, order)
}

impl HalfQSeries {
    /// True when every coefficient is an integer constant with nonnegative
    /// sign; used by sanity checks on counting series.
    pub fn is_nonnegative_integral(&self) -> bool {
        self.coeffs.values().all(|c| {
            c.to_rational()
                .is_some_and(|r| r.is_integer() && !r.is_negative())
        })
    }
}
