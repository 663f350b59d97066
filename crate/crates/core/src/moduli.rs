//! Weierstrass elliptic surfaces: the lattice spanned by the section `σ` and
//! the fiber `f`, slope stability, chamber bounds, type II fixed-locus
//! enumeration and the K3 partition functions.
//!
//! Intersection form: `σ² = -k-2`, `f² = 0`, `σ·f = 1`, with `K_S = O(k f)`
//! and therefore `c1(S) = -k f`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::eqalg::vars::s;
use crate::eqalg::EqScalar;
use crate::error::{Error, Result};
use crate::qseries::{delta_inverse, goettsche_series, Half, HalfQSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllipticSurface {
    pub k: i64,
}

impl EllipticSurface {
    pub fn new(k: i64) -> Result<EllipticSurface> {
        if k < 0 {
            return Err(Error::InvalidInput(format!("k must be nonnegative, got {k}")));
        }
        Ok(EllipticSurface { k })
    }

    pub fn k3() -> EllipticSurface {
        EllipticSurface { k: 0 }
    }

    pub fn is_k3(&self) -> bool {
        self.k == 0
    }

    pub fn canonical(&self) -> DivisorClass {
        DivisorClass::new(0, self.k)
    }

    pub fn c1(&self) -> DivisorClass {
        DivisorClass::new(0, -self.k)
    }
}

/// `a σ + b f`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DivisorClass {
    pub a: i64,
    pub b: i64,
}

impl DivisorClass {
    pub const ZERO: DivisorClass = DivisorClass { a: 0, b: 0 };

    pub fn new(a: i64, b: i64) -> DivisorClass {
        DivisorClass { a, b }
    }

    pub fn sigma() -> DivisorClass {
        DivisorClass::new(1, 0)
    }

    pub fn fiber() -> DivisorClass {
        DivisorClass::new(0, 1)
    }

    pub fn scale(self, k: i64) -> DivisorClass {
        DivisorClass::new(self.a * k, self.b * k)
    }

    pub fn is_zero(self) -> bool {
        self == DivisorClass::ZERO
    }
}

impl std::ops::Add for DivisorClass {
    type Output = DivisorClass;
    fn add(self, o: DivisorClass) -> DivisorClass {
        DivisorClass::new(self.a + o.a, self.b + o.b)
    }
}

impl std::ops::Sub for DivisorClass {
    type Output = DivisorClass;
    fn sub(self, o: DivisorClass) -> DivisorClass {
        DivisorClass::new(self.a - o.a, self.b - o.b)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}σ + {}f", self.a, self.b)
    }
}

/// Topological type `(r, β, n)` of a sheaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaClass {
    pub r: i64,
    pub beta: DivisorClass,
    pub n: i64,
}

impl GammaClass {
    pub fn new(r: i64, beta: DivisorClass, n: i64) -> GammaClass {
        GammaClass { r, beta, n }
    }

    fn rank(&self) -> Result<BigInt> {
        if self.r <= 0 {
            return Err(Error::InvalidInput(format!("rank must be positive, got {}", self.r)));
        }
        Ok(BigInt::from(self.r))
    }
}

/// A real class `t σ + u f`, with rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polarization {
    pub t: BigRational,
    pub u: BigRational,
}

impl Polarization {
    pub fn new(t: BigRational, u: BigRational) -> Polarization {
        Polarization { t, u }
    }

    pub fn from_ints(t: i64, u: i64) -> Polarization {
        Polarization::new(BigRational::from_integer(t.into()), BigRational::from_integer(u.into()))
    }

    /// `h · d` over the rationals.
    pub fn dot(&self, d: DivisorClass, surface: &EllipticSurface) -> BigRational {
        let q = |x: i64| BigRational::from_integer(x.into());
        let sigma_d = q(pair(DivisorClass::sigma(), d, surface));
        let f_d = q(pair(DivisorClass::fiber(), d, surface));
        &self.t * sigma_d + &self.u * f_d
    }
}

/// Intersection pairing.
pub fn pair(d1: DivisorClass, d2: DivisorClass, surface: &EllipticSurface) -> i64 {
    -(surface.k + 2) * d1.a * d2.a + d1.a * d2.b + d2.a * d1.b
}

/// Membership in the effective cone spanned by `σ` and `f`.
pub fn is_effective(d: DivisorClass) -> bool {
    d.a >= 0 && d.b >= 0
}

/// `0 < (k+2) t < u`.
pub fn is_ample(h: &Polarization, surface: &EllipticSurface) -> bool {
    let kt = &h.t * BigRational::from_integer((surface.k + 2).into());
    h.t.is_positive() && kt.is_positive() && kt < h.u
}

/// `μ_h = h·β / r`.
pub fn mu_slope(g: &GammaClass, h: &Polarization, surface: &EllipticSurface) -> Result<BigRational> {
    let r = g.rank()?;
    Ok(h.dot(g.beta, surface) / BigRational::from_integer(r))
}

/// `ν = (β·(β + c1(S))/2 - n) / r`.
pub fn nu_slope(g: &GammaClass, surface: &EllipticSurface) -> Result<BigRational> {
    let r = g.rank()?;
    let b = g.beta;
    let num = BigRational::new(pair(b, b + surface.c1(), surface).into(), 2.into())
        - BigRational::from_integer(g.n.into());
    Ok(num / BigRational::from_integer(r))
}

/// Slope of the twist `E ⊗ O(-D)`: `μ_h(E) - h·D`.
pub fn twist_slope_shift(
    g: &GammaClass,
    d: DivisorClass,
    h: &Polarization,
    surface: &EllipticSurface,
) -> Result<BigRational> {
    Ok(mu_slope(g, h, surface)? - h.dot(d, surface))
}

/// Discriminant `Δ = n - (r-1) β² / (2r)` (reading `n` as `c2`) and whether
/// it satisfies `Δ ≥ 0`.
pub fn bogomolov(g: &GammaClass, surface: &EllipticSurface) -> Result<(BigRational, bool)> {
    let r = g.rank()?;
    let b2 = pair(g.beta, g.beta, surface);
    let delta = BigRational::from_integer(g.n.into())
        - BigRational::new(BigInt::from((g.r - 1) * b2), BigInt::from(2) * r);
    let ok = !delta.is_negative();
    Ok((delta, ok))
}

/// `2 / (k + 2 + 2 r³ Δ)`: above this ratio `t/u` walls may occur.
pub fn wall_threshold(surface: &EllipticSurface, r: i64, delta: &BigRational) -> Result<BigRational> {
    if r <= 0 {
        return Err(Error::InvalidInput(format!("rank must be positive, got {r}")));
    }
    if delta.is_negative() {
        return Err(Error::InvalidInput(format!("discriminant must be nonnegative, got {delta}")));
    }
    let den = BigRational::from_integer((surface.k + 2).into())
        + BigRational::from_integer((2 * r * r * r).into()) * delta;
    Ok(BigRational::from_integer(2.into()) / den)
}

/// Strict `t/u < wall_threshold` for an ample `h`.
pub fn in_stable_chamber(
    h: &Polarization,
    surface: &EllipticSurface,
    r: i64,
    delta: &BigRational,
) -> Result<bool> {
    if !is_ample(h, surface) {
        return Err(Error::InvalidInput(format!(
            "polarization ({}, {}) is not ample for k = {}",
            h.t, h.u, surface.k
        )));
    }
    Ok(&h.t / &h.u < wall_threshold(surface, r, delta)?)
}

/// A component `S^{[n1,n2]}_α` of the type II fixed locus on the K3 surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeIIComponent {
    pub b: i64,
    pub n1: i64,
    pub n2: i64,
    pub alpha: DivisorClass,
    /// Contribution vanishes (twisted components, `α ≠ 0`).
    pub vanishes: bool,
}

/// Components for `γ = (2, f, n)` and `D = m f` on the elliptic K3, in
/// ascending `b`, then descending `n1`.
pub fn enumerate_typeii_k3(m: i64, n: i64) -> Result<Vec<TypeIIComponent>> {
    if m < 1 {
        return Err(Error::InvalidInput(format!("m must be at least 1, got {m}")));
    }
    let mut out = Vec::new();
    if n < 0 {
        return Ok(out);
    }
    let mut b = 1;
    while 2 * b <= m + 1 {
        let alpha = DivisorClass::fiber().scale(m + 1 - 2 * b);
        for n1 in (0..=n).rev() {
            let n2 = n - n1;
            if 2 * b == m + 1 && n1 < n2 {
                continue;
            }
            out.push(TypeIIComponent {
                b,
                n1,
                n2,
                alpha,
                vanishes: !alpha.is_zero(),
            });
        }
        b += 1;
    }
    Ok(out)
}

/// Closed-form number of components returned by [`enumerate_typeii_k3`].
pub fn typeii_k3_count(m: i64, n: i64) -> i64 {
    (1..=(m + 1) / 2)
        .map(|b| if 2 * b != m + 1 { n + 1 } else { n / 2 + 1 })
        .sum()
}

/// Inclusive coordinate ranges for the `β1 = a σ + b f` lattice search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBox {
    pub a: (i64, i64),
    pub b: (i64, i64),
}

/// A type II component `S^{[n1,n2]}_{(β1, β2 + c1(L))}` for general `β`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeIIGeneral {
    pub beta1: DivisorClass,
    pub beta2: DivisorClass,
    pub n1: i64,
    pub n2: i64,
    /// `β2 + c1(L) - β1`.
    pub alpha: DivisorClass,
}

/// Type II components with `L = K_S(m f)` and `β1` in `search`.
pub fn enumerate_typeii_general(
    beta: DivisorClass,
    m: i64,
    surface: &EllipticSurface,
    n: i64,
    h: &Polarization,
    search: &SearchBox,
) -> Vec<TypeIIGeneral> {
    let l = surface.canonical() + DivisorClass::fiber().scale(m);
    let mut out = Vec::new();
    for a1 in search.a.0..=search.a.1 {
        for b1 in search.b.0..=search.b.1 {
            let beta1 = DivisorClass::new(a1, b1);
            let beta2 = beta - beta1;
            let alpha = beta2 + l - beta1;
            if !is_effective(alpha) || h.dot(beta2, surface) >= h.dot(beta1, surface) {
                continue;
            }
            let total = n - pair(beta1, beta2, surface);
            for n1 in (0..=total).rev() {
                let n2 = total - n1;
                if alpha.is_zero() && n1 < n2 {
                    continue;
                }
                out.push(TypeIIGeneral {
                    beta1,
                    beta2,
                    n1,
                    n2,
                    alpha,
                });
            }
        }
    }
    out
}

/// Type I invariant on the K3: `s⁻¹ e(S^{[2n-3]})`, zero for `n ≤ 1`.
pub fn typei_dt_k3(n: i64) -> Result<EqScalar> {
    if n <= 1 {
        return Ok(EqScalar::zero());
    }
    let e = 2 * n - 3;
    let g = goettsche_series(24, Half::q(e + 1))?;
    Ok(&g.coeff(Half::q(e))? / &EqScalar::var(s()))
}

/// `Σ_{n≥0} DT_I(n) q^{n-2}`, known below `order`.
pub fn z_typei_series(order: Half) -> Result<HalfQSeries> {
    if order.0 <= Half::q(-2).0 {
        return Err(Error::InvalidInput(format!("order must exceed -2, got {order}")));
    }
    // largest integer n - 2 below order
    let top = (order.0 - 1).div_euclid(2);
    let len = (top + 2).max(0) as usize;
    let g = goettsche_series(24, Half::q((2 * top + 2).max(1)))?;
    let s_inv = EqScalar::var(s()).inv()?;
    let mut terms = Vec::with_capacity(len + 1);
    for n in 2..=top + 2 {
        terms.push((Half::q(n - 2), &g.coeff(Half::q(2 * n - 3))? * &s_inv));
    }
    Ok(HalfQSeries::from_terms(terms, order))
}

/// `(s⁻¹/2)(Δ⁻¹(q^{1/2}) + Δ⁻¹(-q^{1/2}))`, integer part, known below `order`.
pub fn z_typei_modular(order: Half) -> Result<HalfQSeries> {
    let d = delta_inverse(Half(2 * order.0))?;
    let sum = d.substitute_sqrt(1)?.add(&d.substitute_sqrt(-1)?);
    let half_s_inv = EqScalar::var(s()).scale_int(&BigInt::from(2)).inv()?;
    Ok(sum.scale(&half_s_inv).even_projection().truncate(order))
}

/// The conjectured type II series `(s⁻¹/4) Δ⁻¹(q²)`, known below `order`.
pub fn z_typeii_conjecture_series(order: Half) -> Result<HalfQSeries> {
    if order.0 <= Half::q(-2).0 {
        return Err(Error::InvalidInput(format!("order must exceed -2, got {order}")));
    }
    // Δ⁻¹ known below T gives Δ⁻¹(q²) known below 2T
    let inner = Half((order.0 + 1).div_euclid(2) + 1);
    let d = delta_inverse(inner)?.substitute_power(2)?;
    let quarter_s_inv = EqScalar::var(s()).scale_int(&BigInt::from(4)).inv()?;
    Ok(d.scale(&quarter_s_inv).truncate(order))
}

/// Type II partition function on the K3 for `D = m f`, with the untwisted
/// component values supplied by `value(n1, n2)`. Twisted components vanish
/// and are skipped.
pub fn assemble_typeii_series(
    m: i64,
    order: Half,
    mut value: impl FnMut(i64, i64) -> Result<EqScalar>,
) -> Result<HalfQSeries> {
    let top = (order.0 - 1).div_euclid(2);
    let mut terms = Vec::new();
    for n in 0..=top + 2 {
        let mut acc = EqScalar::zero();
        for c in enumerate_typeii_k3(m, n)? {
            if !c.vanishes {
                acc = &acc + &value(c.n1, c.n2)?;
            }
        }
        terms.push((Half::q(n - 2), acc));
    }
    Ok(HalfQSeries::from_terms(terms, order))
}
