//! Exact rational functions in the registered variables.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::poly::{Mono, Poly};
use super::vars::Var;
use crate::error::{Error, Result};

/// A reduced fraction `num / den` of integer polynomials.
///
/// Canonical form: `gcd(num, den) = 1`, the leading coefficient of `den` in
/// name-ordered graded-lex order is positive, and zero is `0/1`. Equality is
/// therefore structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EqScalar {
    num: Poly,
    den: Poly,
}

impl Default for EqScalar {
    fn default() -> Self {
        EqScalar::zero()
    }
}

impl EqScalar {
    pub fn zero() -> EqScalar {
        EqScalar {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> EqScalar {
        EqScalar::from_poly(Poly::one())
    }

    pub fn from_int(n: impl Into<BigInt>) -> EqScalar {
        EqScalar::from_poly(Poly::constant(n))
    }

    pub fn from_rational(r: &BigRational) -> EqScalar {
        EqScalar::new(Poly::constant(r.numer().clone()), Poly::constant(r.denom().clone()))
            .expect("rational denominators are nonzero")
    }

    pub fn from_ratio(n: i64, d: i64) -> EqScalar {
        EqScalar::new(Poly::constant(n), Poly::constant(d)).expect("nonzero denominator")
    }

    pub fn var(v: Var) -> EqScalar {
        EqScalar::from_poly(Poly::var(v))
    }

    pub fn from_poly(p: Poly) -> EqScalar {
        EqScalar {
            num: p,
            den: Poly::one(),
        }
    }

    /// Builds and normalizes `num / den`.
    pub fn new(num: Poly, den: Poly) -> Result<EqScalar> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(EqScalar::zero());
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides"),
                den.div_exact(&g).expect("gcd divides"),
            )
        };
        Ok(EqScalar::signed(num, den))
    }

    /// Builds `num / den` when the two are known to share no non-constant
    /// factor; only the integer content and sign are normalized.
    pub fn from_coprime(num: Poly, den: Poly) -> Result<EqScalar> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(EqScalar::zero());
        }
        let g = num.integer_content().gcd(&den.integer_content());
        if g.is_one() {
            return Ok(EqScalar::signed(num, den));
        }
        Ok(EqScalar::signed(num.div_integer(&g), den.div_integer(&g)))
    }

    /// Assumes `num` and `den` coprime; only fixes the sign.
    fn signed(num: Poly, den: Poly) -> EqScalar {
        if den.name_leading_coeff().is_negative() {
            EqScalar { num: -num, den: -den }
        } else {
            EqScalar { num, den }
        }
    }

    /// Re-normalizes; the identity on canonical values.
    pub fn normalize(&self) -> EqScalar {
        EqScalar::new(self.num.clone(), self.den.clone()).expect("canonical denominator nonzero")
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The value as a rational number when no variable occurs.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.num.is_constant() && self.den.is_constant() {
            Some(BigRational::new(self.num.constant_term(), self.den.constant_term()))
        } else {
            None
        }
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    pub fn variables(&self) -> Vec<Var> {
        let mut vs = self.num.variables();
        for v in self.den.variables() {
            if !vs.contains(&v) {
                vs.push(v);
            }
        }
        vs.sort();
        vs
    }

    pub fn inv(&self) -> Result<EqScalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(EqScalar::signed(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, rhs: &EqScalar) -> Result<EqScalar> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: i32) -> Result<EqScalar> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(EqScalar {
            num: base.num.pow(k),
            den: base.den.pow(k),
        })
    }

    pub fn scale_int(&self, c: &BigInt) -> EqScalar {
        self * &EqScalar::from_int(c.clone())
    }

    /// Substitutes `v = value` everywhere.
    pub fn substitute(&self, v: Var, value: &EqScalar) -> Result<EqScalar> {
        if !self.contains_var(v) {
            return Ok(self.clone());
        }
        let (n, nd) = homogenized_substitute(&self.num, v, value);
        let (d, dd) = homogenized_substitute(&self.den, v, value);
        // num(value) = n / Q^nd, den(value) = d / Q^dd.
        let q = &value.den;
        let (num, den) = if nd >= dd {
            (n, &d * &q.pow(nd - dd))
        } else {
            (&n * &q.pow(dd - nd), d)
        };
        EqScalar::new(num, den)
    }

    pub fn substitute_rational(&self, v: Var, value: &BigRational) -> Result<EqScalar> {
        self.substitute(v, &EqScalar::from_rational(value))
    }

    /// Substitutes every listed variable by a rational value.
    pub fn evaluate(&self, values: &[(Var, BigRational)]) -> Result<EqScalar> {
        let mut x = self.clone();
        for (v, r) in values {
            x = x.substitute_rational(*v, r)?;
        }
        Ok(x)
    }

    pub fn derivative(&self, v: Var) -> EqScalar {
        let dn = self.num.derivative(v);
        let dd = self.den.derivative(v);
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        EqScalar::new(num, &self.den * &self.den).expect("nonzero denominator")
    }

    /// Laurent coefficients of `self` in `v` up to and including exponent
    /// `order`. Zero coefficients are omitted; each coefficient is free of `v`.
    pub fn laurent_expand(&self, v: Var, order: i64) -> Result<Vec<(i64, EqScalar)>> {
        if self.is_zero() {
            return Ok(Vec::new());
        }
        let a = self.num.valuation_in(v);
        let b = self.den.valuation_in(v);
        let n = self.num.shift_down(v, a).coefficients_in(v);
        let d = self.den.shift_down(v, b).coefficients_in(v);
        let k = a as i64 - b as i64;
        if d[0].is_zero() {
            return Err(Error::Expansion(format!(
                "denominator has zero constant term in {v} after pole extraction"
            )));
        }
        let d0_inv = EqScalar::from_poly(d[0].clone()).inv()?;
        let mut out = Vec::new();
        let mut c: Vec<EqScalar> = Vec::new();
        let mut j = 0i64;
        while k + j <= order {
            let ju = j as usize;
            let mut acc = n.get(ju).cloned().map(EqScalar::from_poly).unwrap_or_default();
            for i in 1..=ju.min(d.len() - 1) {
                if d[i].is_zero() || c[ju - i].is_zero() {
                    continue;
                }
                acc = &acc - &(&EqScalar::from_poly(d[i].clone()) * &c[ju - i]);
            }
            let cj = &acc * &d0_inv;
            if !cj.is_zero() {
                out.push((k + j, cj.clone()));
            }
            c.push(cj);
            j += 1;
        }
        Ok(out)
    }

    /// Coefficient of `v^-1` in the Laurent expansion.
    pub fn residue(&self, v: Var) -> Result<EqScalar> {
        Ok(self
            .laurent_expand(v, -1)?
            .into_iter()
            .find(|(e, _)| *e == -1)
            .map(|(_, c)| c)
            .unwrap_or_default())
    }

    /// Canonical string, e.g. `(24*s^2 - 1)/(2*s)`.
    pub fn canonical_string(&self) -> String {
        self.to_string()
    }

    pub fn parse(s: &str) -> Result<EqScalar> {
        super::parse::parse_scalar(s)
    }
}

/// `p(v = P/Q) = n / Q^deg`; returns `(n, deg)`.
fn homogenized_substitute(p: &Poly, v: Var, value: &EqScalar) -> (Poly, u32) {
    let coeffs = p.coefficients_in(v);
    let deg = coeffs.len() - 1;
    let mut qpows = vec![Poly::one()];
    for i in 1..=deg {
        let next = &qpows[i - 1] * &value.den;
        qpows.push(next);
    }
    let mut acc = Poly::zero();
    let mut ppow = Poly::one();
    for (k, c) in coeffs.iter().enumerate() {
        if !c.is_zero() {
            acc = &acc + &(&(c * &ppow) * &qpows[deg - k]);
        }
        if k < deg {
            ppow = &ppow * &value.num;
        }
    }
    (acc, deg as u32)
}

fn needs_parens_den(p: &Poly) -> bool {
    if p.is_constant() {
        return false;
    }
    let mut it = p.terms();
    match (it.next(), it.next()) {
        (Some((m, c)), None) => !(c.is_one() && m.iter().count() == 1),
        _ => true,
    }
}

impl fmt::Display for EqScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.num_terms() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        if needs_parens_den(&self.den) {
            write!(f, "/({})", self.den)
        } else {
            write!(f, "/{}", self.den)
        }
    }
}

impl fmt::Debug for EqScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EqScalar({self})")
    }
}

impl Serialize for EqScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for EqScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        EqScalar::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl From<i64> for EqScalar {
    fn from(n: i64) -> Self {
        EqScalar::from_int(n)
    }
}

impl From<Poly> for EqScalar {
    fn from(p: Poly) -> Self {
        EqScalar::from_poly(p)
    }
}

impl Add<&EqScalar> for &EqScalar {
    type Output = EqScalar;
    fn add(self, rhs: &EqScalar) -> EqScalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return EqScalar::new(&self.num + &rhs.num, self.den.clone()).expect("nonzero");
        }
        if self.den.is_one() {
            return EqScalar::signed(&(&self.num * &rhs.den) + &rhs.num, rhs.den.clone());
        }
        if rhs.den.is_one() {
            return EqScalar::signed(&(&rhs.num * &self.den) + &self.num, self.den.clone());
        }
        let g = self.den.gcd(&rhs.den);
        if g.is_one() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            if num.is_zero() {
                return EqScalar::zero();
            }
            return EqScalar::signed(num, &self.den * &rhs.den);
        }
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = rhs.den.div_exact(&g).expect("gcd divides");
        let t = &(&self.num * &d1) + &(&rhs.num * &b1);
        if t.is_zero() {
            return EqScalar::zero();
        }
        let h = t.gcd(&g);
        if h.is_one() {
            return EqScalar::signed(t, &b1 * &rhs.den);
        }
        let num = t.div_exact(&h).expect("gcd divides");
        let den = &b1 * &rhs.den.div_exact(&h).expect("gcd divides");
        EqScalar::signed(num, den)
    }
}

impl Sub<&EqScalar> for &EqScalar {
    type Output = EqScalar;
    fn sub(self, rhs: &EqScalar) -> EqScalar {
        self + &(-rhs)
    }
}

impl Mul<&EqScalar> for &EqScalar {
    type Output = EqScalar;
    fn mul(self, rhs: &EqScalar) -> EqScalar {
        if self.is_zero() || rhs.is_zero() {
            return EqScalar::zero();
        }
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let (a, d) = if g1.is_one() {
            (self.num.clone(), rhs.den.clone())
        } else {
            (self.num.div_exact(&g1).unwrap(), rhs.den.div_exact(&g1).unwrap())
        };
        let (c, b) = if g2.is_one() {
            (rhs.num.clone(), self.den.clone())
        } else {
            (rhs.num.div_exact(&g2).unwrap(), self.den.div_exact(&g2).unwrap())
        };
        EqScalar::signed(&a * &c, &b * &d)
    }
}

/// Panics on division by zero; use [`EqScalar::checked_div`] to recover.
impl Div<&EqScalar> for &EqScalar {
    type Output = EqScalar;
    fn div(self, rhs: &EqScalar) -> EqScalar {
        self.checked_div(rhs).expect("division by zero EqScalar")
    }
}

impl Neg for &EqScalar {
    type Output = EqScalar;
    fn neg(self) -> EqScalar {
        EqScalar {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for EqScalar {
    type Output = EqScalar;
    fn neg(self) -> EqScalar {
        EqScalar {
            num: -self.num,
            den: self.den,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<EqScalar> for EqScalar {
            type Output = EqScalar;
            fn $m(self, rhs: EqScalar) -> EqScalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&EqScalar> for EqScalar {
            type Output = EqScalar;
            fn $m(self, rhs: &EqScalar) -> EqScalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl std::iter::Sum for EqScalar {
    fn sum<I: Iterator<Item = EqScalar>>(iter: I) -> EqScalar {
        iter.fold(EqScalar::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for EqScalar {
    fn product<I: Iterator<Item = EqScalar>>(iter: I) -> EqScalar {
        iter.fold(EqScalar::one(), |a, b| a * b)
    }
}

/// Convenience for monomials `c * v^e` with `e >= 0`.
pub fn monomial(c: i64, v: Var, e: u32) -> EqScalar {
    EqScalar::from_poly(Poly::monomial(BigInt::from(c), Mono::var(v, e)))
}
