//! Sparse multivariate polynomials over the integers.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::vars::{self, Var, MAX_VARS};

/// Exponent vector indexed by variable registration index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Mono {
    exp: [u16; MAX_VARS],
}

impl Mono {
    pub const ONE: Mono = Mono { exp: [0; MAX_VARS] };

    pub fn var(v: Var, power: u32) -> Mono {
        let mut m = Mono::ONE;
        m.exp[v.index()] = u16::try_from(power).expect("exponent overflow");
        m
    }

    pub fn degree(&self) -> u32 {
        self.exp.iter().map(|&e| e as u32).sum()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.exp[v.index()] as u32
    }

    fn with_exponent(mut self, v: Var, e: u32) -> Mono {
        self.exp[v.index()] = u16::try_from(e).expect("exponent overflow");
        self
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut exp = [0u16; MAX_VARS];
        for (i, e) in exp.iter_mut().enumerate() {
            *e = self.exp[i].checked_add(other.exp[i]).expect("exponent overflow");
        }
        Mono { exp }
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Mono) -> Option<Mono> {
        let mut exp = [0u16; MAX_VARS];
        for (i, e) in exp.iter_mut().enumerate() {
            *e = self.exp[i].checked_sub(other.exp[i])?;
        }
        Some(Mono { exp })
    }

    fn meet(&self, other: &Mono) -> Mono {
        let mut exp = [0u16; MAX_VARS];
        for (i, e) in exp.iter_mut().enumerate() {
            *e = self.exp[i].min(other.exp[i]);
        }
        Mono { exp }
    }

    fn var_mask(&self) -> u32 {
        self.exp
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0, |m, (i, _)| m | (1 << i))
    }

    /// Iterates `(var, exponent)` over nonzero exponents, in registration order.
    pub fn iter(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        self.exp
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (Var::from_index(i), e as u32))
    }

    /// Graded-lexicographic comparison with variables ordered by name.
    pub(crate) fn cmp_by_name(&self, other: &Mono, order: &[usize]) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for &i in order {
                match self.exp[i].cmp(&other.exp[i]) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exp.cmp(&other.exp))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial with arbitrary-precision integer coefficients. Zero
/// coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, BigInt>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Poly {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::ONE, c);
        }
        Poly { terms }
    }

    pub fn var(v: Var) -> Poly {
        Poly::monomial(BigInt::one(), Mono::var(v, 1))
    }

    pub fn monomial(c: BigInt, m: Mono) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Mono, BigInt)>) -> Poly {
        let mut terms: BTreeMap<Mono, BigInt> = BTreeMap::new();
        for (m, c) in it {
            *terms.entry(m).or_default() += c;
        }
        terms.retain(|_, c| !c.is_zero());
        Poly { terms }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&Mono::ONE))
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&Mono::ONE).is_some_and(|c| c.is_one())
    }

    pub fn constant_term(&self) -> BigInt {
        self.terms.get(&Mono::ONE).cloned().unwrap_or_default()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Mono::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub(crate) fn var_mask(&self) -> u32 {
        self.terms.keys().fold(0, |acc, m| acc | m.var_mask())
    }

    pub fn variables(&self) -> Vec<Var> {
        let mask = self.var_mask();
        (0..MAX_VARS)
            .filter(|i| mask & (1 << i) != 0)
            .map(Var::from_index)
            .collect()
    }

    /// Leading term in the internal monomial order.
    fn leading(&self) -> Option<(&Mono, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Leading coefficient in graded-lex order with variables ordered by name.
    pub fn name_leading_coeff(&self) -> BigInt {
        let order = vars::name_order();
        self.terms
            .iter()
            .max_by(|a, b| a.0.cmp_by_name(b.0, &order))
            .map(|(_, c)| c.clone())
            .unwrap_or_default()
    }

    /// Sign-normalized copy: name-ordered leading coefficient positive.
    pub fn sign_normalized(self) -> Poly {
        if self.name_leading_coeff().is_negative() {
            -self
        } else {
            self
        }
    }

    pub fn integer_content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    /// Divides every coefficient by `c`; `c` must divide each exactly.
    pub fn div_integer(&self, c: &BigInt) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, x)| {
                    debug_assert!((x % c).is_zero());
                    (*m, x / c)
                })
                .collect(),
        }
    }

    pub fn mul_mono(&self, mono: &Mono) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.mul(mono), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if d.terms.len() == 1 {
            let (dm, dc) = d.leading().unwrap();
            let mut out = BTreeMap::new();
            for (m, c) in &self.terms {
                let q = m.checked_div(dm)?;
                let (qc, r) = c.div_rem(dc);
                if !r.is_zero() {
                    return None;
                }
                out.insert(q, qc);
            }
            return Some(Poly { terms: out });
        }
        let (dm, dc) = d.leading().map(|(m, c)| (*m, c.clone())).unwrap();
        let mut rem = self.terms.clone();
        let mut quot: BTreeMap<Mono, BigInt> = BTreeMap::new();
        while let Some((rm, rc)) = rem.iter().next_back().map(|(m, c)| (*m, c.clone())) {
            let qm = rm.checked_div(&dm)?;
            let (qc, r) = rc.div_rem(&dc);
            if !r.is_zero() {
                return None;
            }
            for (m, c) in &d.terms {
                let key = m.mul(&qm);
                let entry = rem.entry(key).or_default();
                *entry -= c * &qc;
                if entry.is_zero() {
                    rem.remove(&key);
                }
            }
            quot.insert(qm, qc);
        }
        Some(Poly { terms: quot })
    }

    /// Coefficients with respect to `v`: entry `k` multiplies `v^k`.
    pub fn coefficients_in(&self, v: Var) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![BTreeMap::new(); deg + 1];
        for (m, c) in &self.terms {
            let k = m.exponent(v) as usize;
            out[k].insert(m.with_exponent(v, 0), c.clone());
        }
        out.into_iter().map(|terms| Poly { terms }).collect()
    }

    pub fn from_coefficients_in(v: Var, coeffs: &[Poly]) -> Poly {
        let mut terms = BTreeMap::new();
        for (k, p) in coeffs.iter().enumerate() {
            for (m, c) in &p.terms {
                terms.insert(m.with_exponent(v, k as u32), c.clone());
            }
        }
        Poly { terms }
    }

    /// Largest power of `v` dividing `self`.
    pub fn valuation_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).min().unwrap_or(0)
    }

    pub fn shift_down(&self, v: Var, k: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.with_exponent(v, m.exponent(v) - k), c.clone()))
                .collect(),
        }
    }

    pub fn substitute(&self, v: Var, value: &Poly) -> Poly {
        let coeffs = self.coefficients_in(v);
        let mut acc = Poly::zero();
        for c in coeffs.iter().rev() {
            acc = &(&acc * value) + c;
        }
        acc
    }

    /// Substitutes `v = value`; returns `(numerator, denominator)` with the
    /// denominator a positive integer.
    pub fn substitute_rational(&self, v: Var, value: &BigRational) -> (Poly, BigInt) {
        let coeffs = self.coefficients_in(v);
        let d = coeffs.len() - 1;
        let (p, q) = (value.numer().clone(), value.denom().clone());
        let mut acc = Poly::zero();
        let mut ppow = BigInt::one();
        let mut qpows = vec![BigInt::one(); d + 1];
        for i in 1..=d {
            qpows[i] = &qpows[i - 1] * &q;
        }
        for (k, c) in coeffs.iter().enumerate() {
            acc = &acc + &c.scale(&(&ppow * &qpows[d - k]));
            ppow *= &p;
        }
        (acc, qpows[d].clone())
    }

    pub fn derivative(&self, v: Var) -> Poly {
        Poly::from_terms(self.terms.iter().filter_map(|(m, c)| {
            let e = m.exponent(v);
            (e > 0).then(|| (m.with_exponent(v, e - 1), c * BigInt::from(e)))
        }))
    }

    pub fn homogeneous_part(&self, degree: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Drops every term of total degree above `degree`.
    pub fn truncate_degree(&self, degree: u32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= degree)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Product with all terms above total degree `degree` discarded.
    pub fn mul_truncated(&self, other: &Poly, degree: u32) -> Poly {
        let mut acc: BTreeMap<Mono, BigInt> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            let d1 = m1.degree();
            if d1 > degree {
                continue;
            }
            for (m2, c2) in &other.terms {
                if d1 + m2.degree() > degree {
                    continue;
                }
                *acc.entry(m1.mul(m2)).or_default() += c1 * c2;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Poly { terms: acc }
    }

    /// Greatest common divisor, sign-normalized. `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        gcd(self, other)
    }

    /// Terms ordered for display: graded-lex descending with name order.
    pub(crate) fn display_terms(&self) -> Vec<(&Mono, &BigInt)> {
        let order = vars::name_order();
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.cmp_by_name(a.0, &order));
        v
    }

    pub(crate) fn mono_string(m: &Mono) -> String {
        let order = vars::name_order();
        let mut parts = Vec::new();
        for &i in &order {
            let e = m.exp[i];
            if e == 0 {
                continue;
            }
            let name = Var::from_index(i).name();
            if e == 1 {
                parts.push(name);
            } else {
                parts.push(format!("{name}^{e}"));
            }
        }
        parts.join("*")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.display_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if *m == Mono::ONE {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", Poly::mono_string(m))?;
            } else {
                write!(f, "{abs}*{}", Poly::mono_string(m))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl std::ops::Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (big, small) = if self.terms.len() >= rhs.terms.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut terms = big.terms.clone();
        for (m, c) in &small.terms {
            let e = terms.entry(*m).or_default();
            *e += c;
            if e.is_zero() {
                terms.remove(m);
            }
        }
        Poly { terms }
    }
}

impl std::ops::Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            let e = terms.entry(*m).or_default();
            *e -= c;
            if e.is_zero() {
                terms.remove(m);
            }
        }
        Poly { terms }
    }
}

impl std::ops::Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        if rhs.terms.len() == 1 {
            let (m, c) = rhs.leading().unwrap();
            return Poly {
                terms: self.terms.iter().map(|(a, x)| (a.mul(m), x * c)).collect(),
            };
        }
        if self.terms.len() == 1 {
            return rhs * self;
        }
        let mut acc: BTreeMap<Mono, BigInt> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                *acc.entry(m1.mul(m2)).or_default() += c1 * c2;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Poly { terms: acc }
    }
}

impl std::ops::Neg for Poly {
    type Output = Poly;
    fn neg(mut self) -> Poly {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -self.clone()
    }
}

// ---------------------------------------------------------------------------
// gcd: recursive content / primitive-part PRS

fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone().sign_normalized();
    }
    if b.is_zero() {
        return a.clone().sign_normalized();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::constant(a.integer_content().gcd(&b.integer_content()));
    }
    if a.terms.len() == 1 || b.terms.len() == 1 {
        return monomial_gcd(a, b);
    }
    if a == b {
        return a.clone().sign_normalized();
    }
    let (small, big) = if a.terms.len() <= b.terms.len() { (a, b) } else { (b, a) };
    if big.div_exact(small).is_some() {
        return small.clone().sign_normalized();
    }
    gcd_rec(a.clone(), b.clone())
}

fn monomial_gcd(a: &Poly, b: &Poly) -> Poly {
    let mut m: Option<Mono> = None;
    for k in a.terms.keys().chain(b.terms.keys()) {
        m = Some(match m {
            None => *k,
            Some(x) => x.meet(k),
        });
    }
    let c = a.integer_content().gcd(&b.integer_content());
    Poly::monomial(c, m.unwrap_or(Mono::ONE))
}

fn gcd_rec(mut a: Poly, mut b: Poly) -> Poly {
    loop {
        if a.is_zero() {
            return b.sign_normalized();
        }
        if b.is_zero() {
            return a.sign_normalized();
        }
        if a.is_constant() || b.is_constant() {
            return Poly::constant(a.integer_content().gcd(&b.integer_content()));
        }
        if a.terms.len() == 1 || b.terms.len() == 1 {
            return monomial_gcd(&a, &b);
        }
        let (ma, mb) = (a.var_mask(), b.var_mask());
        // A variable occurring in only one argument can only divide through
        // its content.
        if let Some(i) = (0..MAX_VARS).find(|i| (ma ^ mb) & (1 << i) != 0) {
            let v = Var::from_index(i);
            if ma & (1 << i) != 0 {
                a = content_in(&a, v);
            } else {
                b = content_in(&b, v);
            }
            continue;
        }
        let v = (0..MAX_VARS)
            .filter(|i| ma & (1 << i) != 0)
            .map(Var::from_index)
            .min_by_key(|&v| a.degree_in(v).max(b.degree_in(v)))
            .expect("non-constant polynomials share a variable");
        let ca = content_in(&a, v);
        let cb = content_in(&b, v);
        let c = gcd(&ca, &cb);
        let pa = a.div_exact(&ca).expect("content divides");
        let pb = b.div_exact(&cb).expect("content divides");
        let g = primitive_prs(pa.coefficients_in(v), pb.coefficients_in(v));
        let g = Poly::from_coefficients_in(v, &g);
        return (&c * &g).sign_normalized();
    }
}

/// gcd of the coefficients of `p` viewed as a polynomial in `v`.
fn content_in(p: &Poly, v: Var) -> Poly {
    let mut g = Poly::zero();
    let mut coeffs = p.coefficients_in(v);
    coeffs.retain(|c| !c.is_zero());
    coeffs.sort_by_key(|c| c.terms.len());
    for c in &coeffs {
        g = gcd(&g, c);
        if g.is_constant() && g.constant_term().is_one() {
            break;
        }
    }
    g
}

fn trim(p: &mut Vec<Poly>) {
    while p.len() > 1 && p.last().is_some_and(Poly::is_zero) {
        p.pop();
    }
}

fn upoly_content(p: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    for c in p.iter().filter(|c| !c.is_zero()) {
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn upoly_primitive(p: Vec<Poly>) -> Vec<Poly> {
    let c = upoly_content(&p);
    if c.is_one() || c.is_zero() {
        return p;
    }
    p.iter()
        .map(|x| x.div_exact(&c).expect("content divides"))
        .collect()
}

fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let n = b.len() - 1;
    let lb = &b[n];
    let mut r = a.to_vec();
    trim(&mut r);
    while r.len() > n && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - n;
        for x in r.iter_mut() {
            *x = &*x * lb;
        }
        for (k, bk) in b.iter().enumerate() {
            let t = bk * &lr;
            r[k + shift] = &r[k + shift] - &t;
        }
        r.pop();
        trim(&mut r);
        if r.len() == 1 && n == 0 {
            break;
        }
    }
    r
}

/// Primitive polynomial remainder sequence; inputs are primitive in the main
/// variable. Returns the primitive gcd as a coefficient vector.
fn primitive_prs(mut a: Vec<Poly>, mut b: Vec<Poly>) -> Vec<Poly> {
    trim(&mut a);
    trim(&mut b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.len() == 1 {
            return if b[0].is_zero() { upoly_primitive(a) } else { vec![Poly::one()] };
        }
        let r = prem(&a, &b);
        if r.iter().all(Poly::is_zero) {
            return upoly_primitive(b);
        }
        if r.len() == 1 {
            return vec![Poly::one()];
        }
        a = b;
        b = upoly_primitive(r);
    }
}
