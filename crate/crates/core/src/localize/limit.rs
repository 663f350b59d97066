//! Fixed-point sums and their non-equivariant limit.
//!
//! Each localization term is kept factored as `coeff · ∏ polys · ∏ w^m`. The
//! equivariant sum depends on the toric weights `(e1, e2)`; the integral over
//! the compact surface is its value at `e1 = e2 = 0`. Two independent routes
//! compute that value:
//!
//! * [`LimitRoute::Direction`] restricts to the line `(e1, e2) = d·(r1, r2)`,
//!   expands every term as a Laurent series in `d` and adds the `d^0`
//!   coefficients. Negative powers must cancel across the sum.
//! * [`LimitRoute::Symbolic`] adds the terms as rational functions in all
//!   variables (batched over a common denominator), then restricts to the line
//!   and sets `d = 0`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::eqalg::vars::{delta, e1, e2};
use crate::eqalg::{euler_of_character, EqScalar, LinearForm, Poly, WeightCharacter};
use crate::error::{Error, Result};
use crate::par::{par_map, Exec};

/// A factored localization term `coeff · ∏ polys · ∏_{w} w^{m(w)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalTerm {
    pub euler: WeightCharacter,
    pub polys: Vec<Poly>,
    pub coeff: BigRational,
}

impl LocalTerm {
    pub fn new(euler: WeightCharacter) -> LocalTerm {
        LocalTerm {
            euler,
            polys: Vec::new(),
            coeff: BigRational::one(),
        }
    }

    pub fn with_poly(mut self, p: Poly) -> LocalTerm {
        self.polys.push(p);
        self
    }

    pub fn scaled(mut self, c: &BigRational) -> LocalTerm {
        self.coeff *= c;
        self
    }

    /// The term as a single rational function.
    pub fn value(&self) -> Result<EqScalar> {
        let mut x = euler_of_character(&self.euler)?;
        for p in &self.polys {
            x = &x * &EqScalar::from_poly(p.clone());
        }
        Ok(&x * &EqScalar::from_rational(&self.coeff))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LimitRoute {
    #[default]
    Direction,
    Symbolic,
}

/// Evaluation settings shared by every fixed-point sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    pub exec: Exec,
    pub route: LimitRoute,
    /// Direction `(r1, r2)` of the line through the origin in weight space.
    pub direction: (i64, i64),
    /// Terms per normalization batch of the symbolic route.
    pub batch: usize,
}

/// Default direction; `1009·a + 1013·b = 0` forces `1009 | b`, so no weight
/// with small coefficients vanishes on this line.
pub const DEFAULT_DIRECTION: (i64, i64) = (1009, 1013);

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            exec: Exec::Parallel,
            route: LimitRoute::Direction,
            direction: DEFAULT_DIRECTION,
            batch: 64,
        }
    }
}

impl EvalOptions {
    pub fn sequential() -> Self {
        EvalOptions {
            exec: Exec::Sequential,
            ..Default::default()
        }
    }
}

/// Truncated Laurent series `Σ_{k=val}^{0} coeffs[k - val] d^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaSeries {
    pub val: i64,
    pub coeffs: Vec<EqScalar>,
}

impl DeltaSeries {
    fn zero() -> DeltaSeries {
        DeltaSeries {
            val: 1,
            coeffs: Vec::new(),
        }
    }
}

fn restrict_form(w: &LinearForm, dir: (i64, i64)) -> (i64, LinearForm) {
    let a = w.coeff(e1()) * dir.0 + w.coeff(e2()) * dir.1;
    (a, w.with_coeff(e1(), 0).with_coeff(e2(), 0))
}

fn restrict_poly(p: &Poly, dir: (i64, i64)) -> Poly {
    let d = Poly::var(delta());
    let x = p.substitute(e1(), &d.scale(&BigInt::from(dir.0)));
    x.substitute(e2(), &d.scale(&BigInt::from(dir.1)))
}

/// Laurent expansion of one term along the line, up to `d^0`.
pub fn delta_expand(term: &LocalTerm, dir: (i64, i64)) -> Result<DeltaSeries> {
    let mut val: i64 = 0;
    let mut lead = EqScalar::from_rational(&term.coeff);
    let mut binomial: Vec<(EqScalar, i64)> = Vec::new();
    for (w, &m) in term.euler.iter() {
        let (a, c) = restrict_form(w, dir);
        if c.is_zero() {
            if a == 0 {
                return Err(Error::ZeroWeight(format!(
                    "weight {w} vanishes on the direction {dir:?}"
                )));
            }
            val += m;
            lead = &lead * &EqScalar::from_int(a).pow(m as i32)?;
        } else {
            let cs = c.to_scalar();
            lead = &lead * &cs.pow(m as i32)?;
            if a != 0 {
                binomial.push((&EqScalar::from_int(a) / &cs, m));
            }
        }
    }
    let mut polys = Vec::with_capacity(term.polys.len());
    for p in &term.polys {
        let r = restrict_poly(p, dir);
        if r.is_zero() {
            return Ok(DeltaSeries::zero());
        }
        let v = r.valuation_in(delta());
        val += v as i64;
        polys.push(r.shift_down(delta(), v).coefficients_in(delta()));
    }
    if val > 0 {
        return Ok(DeltaSeries::zero());
    }
    let n = (-val) as usize;
    // ∏ (1 + x d)^m = exp(Σ_k (-1)^{k+1} p_k d^k / k), p_k = Σ m x^k
    let mut p = vec![EqScalar::zero(); n + 1];
    for (x, m) in &binomial {
        let mut xk = EqScalar::one();
        let mm = EqScalar::from_int(*m);
        for pk in p.iter_mut().skip(1) {
            xk = &xk * x;
            *pk = &*pk + &(&mm * &xk);
        }
    }
    let mut f = vec![EqScalar::one()];
    for j in 1..=n {
        let mut acc = EqScalar::zero();
        for k in 1..=j {
            let t = &p[k] * &f[j - k];
            acc = if k % 2 == 1 { &acc + &t } else { &acc - &t };
        }
        f.push(&acc / &EqScalar::from_int(j as i64));
    }
    for coeffs in polys {
        let mut g = vec![EqScalar::zero(); n + 1];
        for (i, fi) in f.iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            for (k, ck) in coeffs.iter().enumerate() {
                if i + k > n {
                    break;
                }
                if !ck.is_zero() {
                    g[i + k] = &g[i + k] + &(fi * &EqScalar::from_poly(ck.clone()));
                }
            }
        }
        f = g;
    }
    Ok(DeltaSeries {
        val,
        coeffs: f.iter().map(|x| x * &lead).collect(),
    })
}

/// Adds expanded terms and returns the `d^0` coefficient; nonzero negative
/// powers are an error.
pub fn sum_delta_series(series: &[DeltaSeries]) -> Result<EqScalar> {
    let mut acc: BTreeMap<i64, EqScalar> = BTreeMap::new();
    for s in series {
        for (i, c) in s.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let slot = acc.entry(s.val + i as i64).or_default();
            *slot = &*slot + c;
        }
    }
    for (k, c) in &acc {
        if *k < 0 && !c.is_zero() {
            return Err(Error::Limit(format!(
                "coefficient of d^{k} does not cancel: {c}"
            )));
        }
    }
    Ok(acc.remove(&0).unwrap_or_default())
}

/// Canonical primitive representative of a linear form up to sign and scale:
/// returns `(primitive, scale)` with `w = scale · primitive`.
fn primitive(w: &LinearForm) -> (LinearForm, i64) {
    let mut g = 0i64;
    for (_, c) in w.terms() {
        g = num_integer::gcd(g, c);
    }
    let mut prim = w.scale(1);
    let mut coeffs: Vec<(crate::eqalg::Var, i64)> = prim.terms().collect();
    coeffs.sort_by_key(|(v, _)| v.name());
    let sign = if coeffs.first().map(|(_, c)| *c < 0).unwrap_or(false) { -1 } else { 1 };
    let scale = g * sign;
    for (v, c) in w.terms() {
        prim = prim.with_coeff(v, c / scale);
    }
    (prim, scale)
}

/// `num / (scalar · ∏ f^k)` with primitive linear forms `f`.
#[derive(Clone, Debug)]
struct Factored {
    num: Poly,
    scalar: BigInt,
    den: BTreeMap<LinearForm, u32>,
}

impl Factored {
    fn from_term(t: &LocalTerm) -> Result<Factored> {
        if t.euler.has_zero_weight() {
            return Err(Error::ZeroWeight(format!("zero weight in {:?}", t.euler)));
        }
        let mut num = Poly::constant(t.coeff.numer().clone());
        let mut scalar = t.coeff.denom().clone();
        let mut den = BTreeMap::new();
        for p in &t.polys {
            num = &num * p;
        }
        for (w, &m) in t.euler.iter() {
            let k = m.unsigned_abs() as u32;
            if m > 0 {
                num = &num * &w.to_poly().pow(k);
            } else {
                let (prim, scale) = primitive(w);
                scalar *= BigInt::from(scale).pow(k);
                *den.entry(prim).or_insert(0) += k;
            }
        }
        Ok(Factored { num, scalar, den })
    }

    /// Sum over a common denominator: the least common multiple of the
    /// factored denominators.
    fn sum(items: Vec<Factored>) -> Factored {
        let mut lcm: BTreeMap<LinearForm, u32> = BTreeMap::new();
        let mut scalar = BigInt::one();
        for f in &items {
            for (w, &k) in &f.den {
                let e = lcm.entry(*w).or_insert(0);
                *e = (*e).max(k);
            }
            scalar = num_integer::Integer::lcm(&scalar, &f.scalar);
        }
        let mut total = Poly::zero();
        for f in items {
            let mut num = f.num.scale(&(&scalar / &f.scalar));
            for (w, &k) in &lcm {
                let have = f.den.get(w).copied().unwrap_or(0);
                if k > have {
                    num = &num * &w.to_poly().pow(k - have);
                }
            }
            total = &total + &num;
        }
        Factored {
            num: total,
            scalar,
            den: lcm,
        }
    }

    /// Cancels every denominator factor dividing the numerator. The forms are
    /// irreducible, so the result is in lowest terms.
    fn reduce(mut self) -> Factored {
        if self.num.is_zero() {
            self.den.clear();
            self.scalar = BigInt::one();
            return self;
        }
        for (w, k) in self.den.iter_mut() {
            let p = w.to_poly();
            while *k > 0 {
                match self.num.div_exact(&p) {
                    Some(q) => {
                        self.num = q;
                        *k -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|_, k| *k > 0);
        self
    }

    fn to_scalar(&self) -> Result<EqScalar> {
        let mut den = Poly::constant(self.scalar.clone());
        for (w, &k) in &self.den {
            den = &den * &w.to_poly().pow(k);
        }
        EqScalar::from_coprime(self.num.clone(), den)
    }
}

fn factored_sum(terms: &[LocalTerm], batch: usize, exec: Exec) -> Result<Factored> {
    let chunks: Vec<&[LocalTerm]> = terms.chunks(batch.max(1)).collect();
    let partial: Vec<Result<Factored>> = par_map(&chunks, exec, |chunk| {
        let items = chunk.iter().map(Factored::from_term).collect::<Result<Vec<_>>>()?;
        Ok(Factored::sum(items).reduce())
    });
    let partial = partial.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Factored::sum(partial).reduce())
}

/// Sum of terms as one rational function in lowest terms, reduced once per
/// batch of `batch` terms.
pub fn symbolic_sum(terms: &[LocalTerm], batch: usize, exec: Exec) -> Result<EqScalar> {
    factored_sum(terms, batch, exec)?.to_scalar()
}

/// Value at `e1 = e2 = 0` of a rational function, approached along `dir`.
pub fn limit_at_origin(x: &EqScalar, dir: (i64, i64)) -> Result<EqScalar> {
    fraction_limit(x.numerator(), x.denominator(), dir)
}

fn fraction_limit(num: &Poly, den: &Poly, dir: (i64, i64)) -> Result<EqScalar> {
    let num = restrict_poly(num, dir);
    let den = restrict_poly(den, dir);
    if den.is_zero() {
        return Err(Error::Limit(format!("denominator vanishes on the direction {dir:?}")));
    }
    if num.is_zero() {
        return Ok(EqScalar::zero());
    }
    let (vn, vd) = (num.valuation_in(delta()), den.valuation_in(delta()));
    if vn < vd {
        return Err(Error::Limit(format!(
            "pole of order {} at the origin along {dir:?}",
            vd - vn
        )));
    }
    if vn > vd {
        return Ok(EqScalar::zero());
    }
    let lead = |p: &Poly, v: u32| p.shift_down(delta(), v).substitute(delta(), &Poly::zero());
    EqScalar::new(lead(&num, vn), lead(&den, vd))
}

/// Non-equivariant limit of `Σ terms`.
pub fn limit_sum(terms: &[LocalTerm], opts: &EvalOptions) -> Result<EqScalar> {
    match opts.route {
        LimitRoute::Direction => {
            let series: Vec<Result<DeltaSeries>> =
                par_map(terms, opts.exec, |t| delta_expand(t, opts.direction));
            let series: Vec<DeltaSeries> = series.into_iter().collect::<Result<_>>()?;
            sum_delta_series(&series)
        }
        LimitRoute::Symbolic => {
            let total = factored_sum(terms, opts.batch, opts.exec)?;
            let mut den = Poly::constant(total.scalar.clone());
            for (w, &k) in &total.den {
                den = &den * &w.to_poly().pow(k);
            }
            fraction_limit(&total.num, &den, opts.direction)
        }
    }
}

/// Whether every term is free of poles in `(e1, e2)` after summation, i.e.
/// the symbolic sum has a denominator without `e1`, `e2`.
pub fn sum_is_polynomial_in_weights(x: &EqScalar) -> bool {
    !x.denominator().contains_var(e1()) && !x.denominator().contains_var(e2())
}
