//! Smooth projective toric surfaces as localization targets.
//!
//! A model is built from a complete smooth fan with rays `v_0 .. v_{k-1}` in
//! counter-clockwise order. Fixed point `i` is the cone `(v_i, v_{i+1})`; its
//! tangent weights are the dual basis `(u_1, u_2)` written as linear forms in
//! `(e1, e2)`. The divisor lattice is `Z^k`, spanned by the torus-invariant
//! divisors `D_i`; the fiber of `O(D_i)` at fixed point `σ` has weight `-m`
//! where `<m, v_j> = -δ_{ij}` for the rays `v_j` of `σ`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::eqalg::vars::{e1, e2, s, sp};
use crate::eqalg::LinearForm;
use crate::error::{Error, Result};

/// A class in the divisor lattice: coefficients of the invariant divisors.
pub type Divisor = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointJson {
    pub w1: [i64; 2],
    pub w2: [i64; 2],
}

/// Intersection data of the surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceChernData {
    /// `c_1(S)^2`.
    pub c1_self: i64,
    pub c2: i64,
    pub chi_o: i64,
    /// Intersection matrix of the lattice generators.
    pub intersection: Vec<Vec<i64>>,
    /// The canonical class in lattice coordinates.
    pub canonical: Divisor,
}

/// On-disk schema of a model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelJson {
    pub name: String,
    pub fixed_points: Vec<FixedPointJson>,
    /// Lattice generator names, in lattice order.
    pub divisors: Vec<String>,
    /// Per-generator fiber weights at each fixed point, as `[e1, e2]` pairs.
    pub bundles: BTreeMap<String, Vec<[i64; 2]>>,
    pub chern: SurfaceChernData,
    pub euler_char: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPoint {
    pub w1: LinearForm,
    pub w2: LinearForm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricSurfaceModel {
    pub name: String,
    pub fixed_points: Vec<FixedPoint>,
    pub divisor_names: Vec<String>,
    /// `bundle_weights[d][p]`: fiber weight of generator `d` at point `p`.
    pub bundle_weights: Vec<Vec<LinearForm>>,
    pub chern: SurfaceChernData,
    pub euler_char: i64,
}

fn form(c: [i64; 2]) -> LinearForm {
    LinearForm::from_terms(&[(e1(), c[0]), (e2(), c[1])])
}

fn pair_of(f: &LinearForm) -> [i64; 2] {
    [f.coeff(e1()), f.coeff(e2())]
}

/// Names of the shipped presets.
pub const PRESETS: [&str; 5] = ["plane", "p1xp1", "f1", "f2", "f3"];

fn preset_rays(name: &str) -> Option<Vec<[i64; 2]>> {
    let hirzebruch = |a: i64| vec![[1, 0], [0, 1], [-1, a], [0, -1]];
    Some(match name {
        "plane" => vec![[1, 0], [0, 1], [-1, -1]],
        "p1xp1" => hirzebruch(0),
        "f1" => hirzebruch(1),
        "f2" => hirzebruch(2),
        "f3" => hirzebruch(3),
        _ => return None,
    })
}

fn embedded_preset(name: &str) -> Option<&'static str> {
    Some(match name {
        "plane" => include_str!("../../presets/plane.json"),
        "p1xp1" => include_str!("../../presets/p1xp1.json"),
        "f1" => include_str!("../../presets/f1.json"),
        "f2" => include_str!("../../presets/f2.json"),
        "f3" => include_str!("../../presets/f3.json"),
        _ => return None,
    })
}

impl ToricSurfaceModel {
    /// Builds the model of a complete smooth fan.
    pub fn from_fan(name: &str, rays: &[[i64; 2]]) -> Result<ToricSurfaceModel> {
        let k = rays.len();
        if k < 3 {
            return Err(Error::Model(format!("fan needs at least 3 rays, got {k}")));
        }
        let det = |a: [i64; 2], b: [i64; 2]| a[0] * b[1] - a[1] * b[0];
        let mut fixed_points = Vec::with_capacity(k);
        let mut bundle_weights = vec![vec![LinearForm::ZERO; k]; k];
        for i in 0..k {
            let (a, b) = (rays[i], rays[(i + 1) % k]);
            if det(a, b) != 1 {
                return Err(Error::Model(format!(
                    "cone ({a:?}, {b:?}) is not smooth and counter-clockwise"
                )));
            }
            // rows of the inverse of [a b]
            let u1 = [b[1], -b[0]];
            let u2 = [-a[1], a[0]];
            fixed_points.push(FixedPoint {
                w1: form(u1),
                w2: form(u2),
            });
            bundle_weights[i][i] = form(u1);
            bundle_weights[(i + 1) % k][i] = form(u2);
        }
        let mut intersection = vec![vec![0i64; k]; k];
        for i in 0..k {
            let prev = rays[(i + k - 1) % k];
            let next = rays[(i + 1) % k];
            let sum = [prev[0] + next[0], prev[1] + next[1]];
            let v = rays[i];
            let b = if v[0] != 0 { sum[0] / v[0] } else { sum[1] / v[1] };
            if sum != [b * v[0], b * v[1]] {
                return Err(Error::Model(format!("ray {i} fails the smoothness relation")));
            }
            intersection[i][i] = -b;
            intersection[i][(i + 1) % k] += 1;
            intersection[(i + 1) % k][i] += 1;
        }
        let canonical = vec![-1; k];
        let kk: i64 = pair_with(&intersection, &canonical, &canonical);
        let c2 = k as i64;
        let model = ToricSurfaceModel {
            name: name.to_string(),
            fixed_points,
            divisor_names: (0..k).map(|i| format!("D{i}")).collect(),
            bundle_weights,
            chern: SurfaceChernData {
                c1_self: kk,
                c2,
                chi_o: (kk + c2) / 12,
                intersection,
                canonical,
            },
            euler_char: k as i64,
        };
        model.validate()?;
        Ok(model)
    }

    /// Builds a shipped preset from its fan, without reading any file.
    pub fn build_preset(name: &str) -> Result<ToricSurfaceModel> {
        let rays = preset_rays(name).ok_or_else(|| unknown_preset(name))?;
        ToricSurfaceModel::from_fan(name, &rays)
    }

    /// Loads a preset: from `$DT4_PRESET_DIR/<name>.json` when that file
    /// exists, otherwise from the copy compiled into the library.
    pub fn preset(name: &str) -> Result<ToricSurfaceModel> {
        if let Ok(dir) = std::env::var("DT4_PRESET_DIR") {
            let path = PathBuf::from(dir).join(format!("{name}.json"));
            if path.exists() {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Model(format!("reading {}: {e}", path.display())))?;
                return ToricSurfaceModel::from_json_str(&text);
            }
        }
        let text = embedded_preset(name).ok_or_else(|| unknown_preset(name))?;
        ToricSurfaceModel::from_json_str(text)
    }

    pub fn from_json_str(text: &str) -> Result<ToricSurfaceModel> {
        let j: ModelJson =
            serde_json::from_str(text).map_err(|e| Error::Model(format!("bad model JSON: {e}")))?;
        ToricSurfaceModel::from_json(j)
    }

    pub fn from_json(j: ModelJson) -> Result<ToricSurfaceModel> {
        let np = j.fixed_points.len();
        let mut bundle_weights = Vec::with_capacity(j.divisors.len());
        for d in &j.divisors {
            let ws = j
                .bundles
                .get(d)
                .ok_or_else(|| Error::Model(format!("no bundle weights for divisor {d}")))?;
            if ws.len() != np {
                return Err(Error::Model(format!(
                    "divisor {d} has {} weights for {np} fixed points",
                    ws.len()
                )));
            }
            bundle_weights.push(ws.iter().map(|&c| form(c)).collect());
        }
        let model = ToricSurfaceModel {
            name: j.name,
            fixed_points: j
                .fixed_points
                .iter()
                .map(|f| FixedPoint {
                    w1: form(f.w1),
                    w2: form(f.w2),
                })
                .collect(),
            divisor_names: j.divisors,
            bundle_weights,
            chern: j.chern,
            euler_char: j.euler_char,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn to_json(&self) -> ModelJson {
        ModelJson {
            name: self.name.clone(),
            fixed_points: self
                .fixed_points
                .iter()
                .map(|f| FixedPointJson {
                    w1: pair_of(&f.w1),
                    w2: pair_of(&f.w2),
                })
                .collect(),
            divisors: self.divisor_names.clone(),
            bundles: self
                .divisor_names
                .iter()
                .zip(&self.bundle_weights)
                .map(|(n, ws)| (n.clone(), ws.iter().map(pair_of).collect()))
                .collect(),
            chern: self.chern.clone(),
            euler_char: self.euler_char,
        }
    }

    fn validate(&self) -> Result<()> {
        let np = self.fixed_points.len();
        let nd = self.divisor_names.len();
        if self.euler_char != np as i64 {
            return Err(Error::Model(format!(
                "euler_char {} differs from {np} fixed points",
                self.euler_char
            )));
        }
        for (i, f) in self.fixed_points.iter().enumerate() {
            let [a, b] = pair_of(&f.w1);
            let [c, d] = pair_of(&f.w2);
            if a * d - b * c == 0 {
                return Err(Error::Model(format!("dependent tangent weights at point {i}")));
            }
            for x in [&f.w1, &f.w2] {
                if x.terms().any(|(v, _)| v != e1() && v != e2()) {
                    return Err(Error::Model(format!("tangent weight at point {i} not in (e1, e2)")));
                }
            }
        }
        let ch = &self.chern;
        if ch.intersection.len() != nd || ch.intersection.iter().any(|r| r.len() != nd) {
            return Err(Error::Model("intersection matrix has wrong shape".into()));
        }
        if ch.canonical.len() != nd {
            return Err(Error::Model("canonical class has wrong length".into()));
        }
        if (ch.c1_self + ch.c2) != 12 * ch.chi_o {
            return Err(Error::Model(format!(
                "Noether relation fails: c1^2 + c2 = {} but 12 chi(O) = {}",
                ch.c1_self + ch.c2,
                12 * ch.chi_o
            )));
        }
        if self.pair(&ch.canonical, &ch.canonical)? != ch.c1_self {
            return Err(Error::Model("c1_self disagrees with K.K".into()));
        }
        // the fiber weight of K at each point is -(w1 + w2)
        for (p, f) in self.fixed_points.iter().enumerate() {
            let kw = self.divisor_weight(&ch.canonical, p)?;
            if kw != -(f.w1 + f.w2) {
                return Err(Error::Model(format!(
                    "canonical weight at point {p} is {kw}, expected -(w1 + w2)"
                )));
            }
        }
        Ok(())
    }

    pub fn num_points(&self) -> usize {
        self.fixed_points.len()
    }

    pub fn lattice_rank(&self) -> usize {
        self.divisor_names.len()
    }

    pub fn check_divisor(&self, d: &[i64]) -> Result<()> {
        if d.len() != self.lattice_rank() {
            return Err(Error::InvalidInput(format!(
                "divisor {d:?} has {} coordinates; model {} has lattice rank {}",
                d.len(),
                self.name,
                self.lattice_rank()
            )));
        }
        Ok(())
    }

    pub fn pair(&self, a: &[i64], b: &[i64]) -> Result<i64> {
        self.check_divisor(a)?;
        self.check_divisor(b)?;
        Ok(pair_with(&self.chern.intersection, a, b))
    }

    pub fn canonical(&self) -> &Divisor {
        &self.chern.canonical
    }

    /// `c_1(S) · d`.
    pub fn c1_dot(&self, d: &[i64]) -> Result<i64> {
        Ok(-self.pair(&self.chern.canonical, d)?)
    }

    /// Riemann–Roch: `χ(O(d)) = d·(d - K)/2 + χ(O)`.
    pub fn chi(&self, d: &[i64]) -> Result<i64> {
        let dk: Vec<i64> = d.iter().zip(self.canonical()).map(|(a, b)| a - b).collect();
        let twice = self.pair(d, &dk)?;
        debug_assert!(twice % 2 == 0);
        Ok(twice / 2 + self.chern.chi_o)
    }

    pub fn p_g(&self) -> i64 {
        self.chern.chi_o - 1
    }

    /// Fiber weight of `O(d)` at fixed point `p`.
    pub fn divisor_weight(&self, d: &[i64], p: usize) -> Result<LinearForm> {
        self.check_divisor(d)?;
        Ok(d
            .iter()
            .zip(&self.bundle_weights)
            .fold(LinearForm::ZERO, |acc, (&c, ws)| acc + ws[p].scale(c)))
    }

    /// Relabels fixed points by the permutation `perm` (new index `i` is old
    /// point `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> ToricSurfaceModel {
        let mut m = self.clone();
        m.fixed_points = perm.iter().map(|&i| self.fixed_points[i].clone()).collect();
        m.bundle_weights = self
            .bundle_weights
            .iter()
            .map(|ws| perm.iter().map(|&i| ws[i]).collect())
            .collect();
        m
    }
}

fn unknown_preset(name: &str) -> Error {
    Error::Model(format!(
        "unknown surface preset {name:?}; known: {}",
        PRESETS.join(", ")
    ))
}

fn pair_with(m: &[Vec<i64>], a: &[i64], b: &[i64]) -> i64 {
    let mut acc = 0;
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            acc += x * m[i][j] * y;
        }
    }
    acc
}

/// A line bundle `O(divisor) ⊗ t^{t_power} ⊗ t'^{tp_power}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistedBundleSpec {
    pub divisor: Divisor,
    #[serde(default)]
    pub t_power: i64,
    #[serde(default)]
    pub tp_power: i64,
}

impl TwistedBundleSpec {
    pub fn new(divisor: Divisor, t_power: i64) -> TwistedBundleSpec {
        TwistedBundleSpec {
            divisor,
            t_power,
            tp_power: 0,
        }
    }

    pub fn trivial(rank: usize) -> TwistedBundleSpec {
        TwistedBundleSpec::new(vec![0; rank], 0)
    }

    /// The constant part of the weight: `t_power·s + tp_power·s'`.
    pub fn twist(&self) -> LinearForm {
        LinearForm::from_terms(&[(s(), self.t_power), (sp(), self.tp_power)])
    }

    pub fn weight_at(&self, model: &ToricSurfaceModel, p: usize) -> Result<LinearForm> {
        Ok(model.divisor_weight(&self.divisor, p)? + self.twist())
    }

    pub fn with_t_power(&self, t_power: i64) -> TwistedBundleSpec {
        TwistedBundleSpec {
            t_power,
            ..self.clone()
        }
    }
}

/// Lattice arithmetic helpers.
pub fn div_add(a: &[i64], b: &[i64]) -> Divisor {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn div_scale(a: &[i64], k: i64) -> Divisor {
    a.iter().map(|x| x * k).collect()
}

pub fn div_sub(a: &[i64], b: &[i64]) -> Divisor {
    div_add(a, &div_scale(b, -1))
}
