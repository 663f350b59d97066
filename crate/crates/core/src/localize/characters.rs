//! Torus characters at fixed points of `S^{[n1]} × S^{[n2]}`.
//!
//! Conventions: the function `x^i y^j` of a chart has weight `-(i w1 + j w2)`
//! and the chart tangent weights are `w1`, `w2`. A line bundle `M` has fiber
//! weight `M_p` at the chart point, so its local sections have weights
//! `M_p - i w1 - j w2`.

use crate::eqalg::{LinearForm, WeightCharacter};
use crate::error::{Error, Result};
use crate::partitions::{HilbFixedPoint, Partition};

use super::model::{ToricSurfaceModel, TwistedBundleSpec};

fn check_points(fp: &HilbFixedPoint, model: &ToricSurfaceModel) -> Result<()> {
    if fp.assignment.len() != model.num_points() {
        return Err(Error::InvalidInput(format!(
            "fixed point has {} charts, model {} has {}",
            fp.assignment.len(),
            model.name,
            model.num_points()
        )));
    }
    Ok(())
}

fn add_box_tangent(ch: &mut WeightCharacter, lambda: &Partition, w1: LinearForm, w2: LinearForm) {
    for b in lambda.boxes() {
        let (a, l) = lambda.arm_leg(b).expect("box of the diagram");
        ch.add_weight(w1.scale(l + 1) - w2.scale(a), 1);
        ch.add_weight(w2.scale(a + 1) - w1.scale(l), 1);
    }
}

/// Tangent space of `S^{[n]}` at a monomial fixed point (arm/leg formula).
pub fn tangent_character(fp: &HilbFixedPoint, model: &ToricSurfaceModel) -> Result<WeightCharacter> {
    check_points(fp, model)?;
    let mut ch = WeightCharacter::new();
    for (lambda, f) in fp.assignment.iter().zip(&model.fixed_points) {
        add_box_tangent(&mut ch, lambda, f.w1, f.w2);
    }
    Ok(ch)
}

/// Chart contribution of `E_M` for the partitions `l1`, `l2` with chart
/// weights `w1`, `w2` and bundle weight `m`.
pub fn e_class_chart(
    l1: &Partition,
    l2: &Partition,
    w1: LinearForm,
    w2: LinearForm,
    m: LinearForm,
) -> WeightCharacter {
    let mut ch = WeightCharacter::new();
    let at = |i: u32, j: u32| w1.scale(i as i64) + w2.scale(j as i64);
    for (i, j) in l1.boxes() {
        ch.add_weight(m + at(i, j) + w1 + w2, 1);
    }
    for (i, j) in l2.boxes() {
        ch.add_weight(m - at(i, j), 1);
    }
    for (ib, jb) in l1.boxes() {
        for (ic, jc) in l2.boxes() {
            let u = m + w1.scale(ib as i64 - ic as i64) + w2.scale(jb as i64 - jc as i64);
            ch.add_weight(u, -1);
            ch.add_weight(u + w1, 1);
            ch.add_weight(u + w2, 1);
            ch.add_weight(u + w1 + w2, -1);
        }
    }
    ch
}

/// `E_M = H•(S, M) - χ(I_1, I_2 ⊗ M)` at a fixed-point pair; rank `n1 + n2`.
pub fn e_class_character(
    fp1: &HilbFixedPoint,
    fp2: &HilbFixedPoint,
    m: &TwistedBundleSpec,
    model: &ToricSurfaceModel,
) -> Result<WeightCharacter> {
    check_points(fp1, model)?;
    check_points(fp2, model)?;
    let mut ch = WeightCharacter::new();
    for (p, f) in model.fixed_points.iter().enumerate() {
        let mp = m.weight_at(model, p)?;
        let part = e_class_chart(&fp1.assignment[p], &fp2.assignment[p], f.w1, f.w2, mp);
        ch = &ch + &part;
    }
    Ok(ch)
}

/// Character of `H•(S, M)`, computed by expanding the fixed-point sum
/// `Σ_p e^{M_p} / ((1 - e^{-w1})(1 - e^{-w2}))` along a generic direction.
pub fn cohomology_character(m: &TwistedBundleSpec, model: &ToricSurfaceModel) -> Result<WeightCharacter> {
    use crate::eqalg::vars::{e1, e2};
    let twist = m.twist();
    let mut toric = Vec::with_capacity(model.num_points());
    for p in 0..model.num_points() {
        toric.push(m.weight_at(model, p)? - twist);
    }
    let pair = |f: &LinearForm| (f.coeff(e1()), f.coeff(e2()));
    let bound = model
        .fixed_points
        .iter()
        .flat_map(|f| [f.w1, f.w2])
        .chain(toric.iter().copied())
        .map(|f| pair(&f).1.abs())
        .max()
        .unwrap_or(0);
    let big = 2 * bound + 1;
    let xi = |f: &LinearForm| {
        let (a, b) = pair(f);
        a * big + b
    };
    let lo = toric.iter().map(&xi).min().unwrap_or(0);
    let mut ch = WeightCharacter::new();
    for (p, f) in model.fixed_points.iter().enumerate() {
        // 1/(1 - e^{-w}) = Σ_{k≥0} e^{-k w} if ξ(w) > 0, else -Σ_{k≥1} e^{k w}.
        let dirs: Vec<(LinearForm, i64, i64)> = [f.w1, f.w2]
            .iter()
            .map(|w| {
                if xi(w) > 0 {
                    (-*w, 0, 1)
                } else {
                    (*w, 1, -1)
                }
            })
            .collect();
        let (d1, s1, sign1) = dirs[0];
        let (d2, s2, sign2) = dirs[1];
        if xi(&d1) >= 0 || xi(&d2) >= 0 {
            return Err(Error::Model("tangent weight orthogonal to the expansion direction".into()));
        }
        let mut k1 = s1;
        loop {
            let base = toric[p] + d1.scale(k1);
            if xi(&base) < lo {
                break;
            }
            let mut k2 = s2;
            loop {
                let w = base + d2.scale(k2);
                if xi(&w) < lo {
                    break;
                }
                ch.add_weight(w, sign1 * sign2);
                k2 += 1;
            }
            k1 += 1;
        }
    }
    Ok(ch.shift(&twist))
}

/// `χ(I_1, I_2 ⊗ M) = H•(S, M) - E_M`; rank `χ(M) - n1 - n2`.
pub fn euler_character_chi(
    fp1: &HilbFixedPoint,
    fp2: &HilbFixedPoint,
    m: &TwistedBundleSpec,
    model: &ToricSurfaceModel,
) -> Result<WeightCharacter> {
    let h = cohomology_character(m, model)?;
    let e = e_class_character(fp1, fp2, m, model)?;
    Ok(&h - &e)
}

/// `V_{L_α} = π_*(O_Z ⊗ L_α)`: one weight per box.
pub fn v_class_character(
    fp: &HilbFixedPoint,
    l_alpha: &TwistedBundleSpec,
    model: &ToricSurfaceModel,
) -> Result<WeightCharacter> {
    check_points(fp, model)?;
    let mut ch = WeightCharacter::new();
    for (p, (lambda, f)) in fp.assignment.iter().zip(&model.fixed_points).enumerate() {
        let lw = l_alpha.weight_at(model, p)?;
        for (i, j) in lambda.boxes() {
            ch.add_weight(lw - f.w1.scale(i as i64) - f.w2.scale(j as i64), 1);
        }
    }
    Ok(ch)
}

/// `T_{S^{[n]}} ⊗ M`: the tangent character with chart `p` shifted by the
/// fiber weight `M_p`.
pub fn twisted_tangent_character(
    fp: &HilbFixedPoint,
    m: &TwistedBundleSpec,
    model: &ToricSurfaceModel,
) -> Result<WeightCharacter> {
    check_points(fp, model)?;
    let mut ch = WeightCharacter::new();
    for (p, (lambda, f)) in fp.assignment.iter().zip(&model.fixed_points).enumerate() {
        let mut part = WeightCharacter::new();
        add_box_tangent(&mut part, lambda, f.w1, f.w2);
        ch = &ch + &part.shift(&m.weight_at(model, p)?);
    }
    Ok(ch)
}
