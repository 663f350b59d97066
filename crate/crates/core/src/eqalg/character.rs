//! Torus weights and characters of virtual representations.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;

use super::poly::{Mono, Poly};
use super::scalar::EqScalar;
use super::vars::{self, Var, MAX_VARS};
use crate::error::{Error, Result};

/// An integer linear form in the registered variables.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LinearForm {
    coeffs: [i64; MAX_VARS],
}

impl LinearForm {
    pub const ZERO: LinearForm = LinearForm {
        coeffs: [0; MAX_VARS],
    };

    pub fn var(v: Var) -> LinearForm {
        LinearForm::term(v, 1)
    }

    pub fn term(v: Var, c: i64) -> LinearForm {
        let mut f = LinearForm::ZERO;
        f.coeffs[v.index()] = c;
        f
    }

    pub fn from_terms(terms: &[(Var, i64)]) -> LinearForm {
        let mut f = LinearForm::ZERO;
        for &(v, c) in terms {
            f.coeffs[v.index()] += c;
        }
        f
    }

    pub fn coeff(&self, v: Var) -> i64 {
        self.coeffs[v.index()]
    }

    pub fn with_coeff(mut self, v: Var, c: i64) -> LinearForm {
        self.coeffs[v.index()] = c;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, k: i64) -> LinearForm {
        let mut f = *self;
        for c in f.coeffs.iter_mut() {
            *c *= k;
        }
        f
    }

    /// Nonzero `(var, coeff)` pairs in registration order.
    pub fn terms(&self) -> impl Iterator<Item = (Var, i64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (Var::from_index(i), c))
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_terms(
            self.terms()
                .map(|(v, c)| (Mono::var(v, 1), BigInt::from(c))),
        )
    }

    pub fn to_scalar(&self) -> EqScalar {
        EqScalar::from_poly(self.to_poly())
    }

    /// Substitutes `v = value` (another linear form).
    pub fn substitute(&self, v: Var, value: &LinearForm) -> LinearForm {
        let c = self.coeff(v);
        let mut out = self.with_coeff(v, 0);
        if c != 0 {
            out = out + value.scale(c);
        }
        out
    }
}

impl Add for LinearForm {
    type Output = LinearForm;
    fn add(mut self, rhs: LinearForm) -> LinearForm {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
        self
    }
}

impl Sub for LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: LinearForm) -> LinearForm {
        self + (-rhs)
    }
}

impl Neg for LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        self.scale(-1)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in vars::name_order() {
            let c = self.coeffs[i];
            if c == 0 {
                continue;
            }
            let name = Var::from_index(i).name();
            let abs = c.unsigned_abs();
            match (first, c < 0) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            if abs == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{abs}*{name}")?;
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

/// A virtual torus character: weights with nonzero integer multiplicities.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct WeightCharacter {
    terms: BTreeMap<LinearForm, i64>,
}

impl WeightCharacter {
    pub fn new() -> WeightCharacter {
        WeightCharacter::default()
    }

    pub fn from_weights(ws: impl IntoIterator<Item = (LinearForm, i64)>) -> WeightCharacter {
        let mut ch = WeightCharacter::new();
        for (w, m) in ws {
            ch.add_weight(w, m);
        }
        ch
    }

    pub fn add_weight(&mut self, w: LinearForm, mult: i64) {
        if mult == 0 {
            return;
        }
        let e = self.terms.entry(w).or_insert(0);
        *e += mult;
        if *e == 0 {
            self.terms.remove(&w);
        }
    }

    pub fn multiplicity(&self, w: &LinearForm) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LinearForm, &i64)> {
        self.terms.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of multiplicities.
    pub fn rank(&self) -> i64 {
        self.terms.values().sum()
    }

    /// First Chern class: the multiplicity-weighted sum of weights.
    pub fn first_chern(&self) -> LinearForm {
        self.terms
            .iter()
            .fold(LinearForm::ZERO, |acc, (w, &m)| acc + w.scale(m))
    }

    /// Tensor with a one-dimensional character of weight `w`.
    pub fn shift(&self, w: &LinearForm) -> WeightCharacter {
        WeightCharacter::from_weights(self.terms.iter().map(|(x, &m)| (*x + *w, m)))
    }

    /// Dual character: every weight negated.
    pub fn dual(&self) -> WeightCharacter {
        WeightCharacter::from_weights(self.terms.iter().map(|(x, &m)| (-*x, m)))
    }

    pub fn scale(&self, k: i64) -> WeightCharacter {
        WeightCharacter::from_weights(self.terms.iter().map(|(x, &m)| (*x, m * k)))
    }

    /// Tensor product of characters.
    pub fn tensor(&self, other: &WeightCharacter) -> WeightCharacter {
        let mut out = WeightCharacter::new();
        for (a, &ma) in &self.terms {
            for (b, &mb) in &other.terms {
                out.add_weight(*a + *b, ma * mb);
            }
        }
        out
    }

    pub fn map_weights(&self, f: impl Fn(&LinearForm) -> LinearForm) -> WeightCharacter {
        WeightCharacter::from_weights(self.terms.iter().map(|(x, &m)| (f(x), m)))
    }

    pub fn has_zero_weight(&self) -> bool {
        self.terms.contains_key(&LinearForm::ZERO)
    }
}

impl Add<&WeightCharacter> for &WeightCharacter {
    type Output = WeightCharacter;
    fn add(self, rhs: &WeightCharacter) -> WeightCharacter {
        let mut out = self.clone();
        for (w, &m) in &rhs.terms {
            out.add_weight(*w, m);
        }
        out
    }
}

impl Sub<&WeightCharacter> for &WeightCharacter {
    type Output = WeightCharacter;
    fn sub(self, rhs: &WeightCharacter) -> WeightCharacter {
        let mut out = self.clone();
        for (w, &m) in &rhs.terms {
            out.add_weight(*w, -m);
        }
        out
    }
}

impl fmt::Debug for WeightCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, m)| format!("{w}:{m}"))
            .collect();
        parts.sort();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// `∏ w^mult` over the character.
pub fn euler_of_character(ch: &WeightCharacter) -> Result<EqScalar> {
    if ch.has_zero_weight() {
        return Err(Error::ZeroWeight(format!("zero weight in character {ch:?}")));
    }
    let mut num = Poly::one();
    let mut den = Poly::one();
    for (w, &m) in ch.iter() {
        let p = w.to_poly().pow(m.unsigned_abs() as u32);
        if m > 0 {
            num = &num * &p;
        } else {
            den = &den * &p;
        }
    }
    EqScalar::new(num, den)
}

/// Degree-`degree` part of the total Chern class `∏ (1 + w)^mult`, with
/// inverse factors expanded as power series.
pub fn chern_part(ch: &WeightCharacter, degree: u32) -> EqScalar {
    let mut total = Poly::one();
    for (w, &m) in ch.iter() {
        if w.is_zero() {
            continue;
        }
        let lin = w.to_poly();
        let factor = if m > 0 {
            &Poly::one() + &lin
        } else {
            // 1/(1+w) = Σ (-w)^k
            let mut s = Poly::one();
            let mut p = Poly::one();
            let neg = -&lin;
            for _ in 0..degree {
                p = &p * &neg;
                s = &s + &p;
            }
            s
        };
        for _ in 0..m.unsigned_abs() {
            total = total.mul_truncated(&factor, degree);
        }
    }
    EqScalar::from_poly(total.homogeneous_part(degree))
}
