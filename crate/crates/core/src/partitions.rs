//! Integer partitions and torus-fixed points of Hilbert schemes of points.
//!
//! Box `(i, j)` is row `i`, column `j`, both 0-based with the top row first;
//! it corresponds to the monomial `x^i y^j` of the local chart.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weakly decreasing list of positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Partition> {
        parts.retain(|&p| p > 0);
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!("parts not weakly decreasing: {parts:?}")));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Partition {
        Partition::default()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Length of row `i` (0 beyond the last row).
    pub fn row(&self, i: u32) -> u32 {
        self.parts.get(i as usize).copied().unwrap_or(0)
    }

    /// Length of column `j`.
    pub fn col(&self, j: u32) -> u32 {
        self.parts.iter().take_while(|&&p| p > j).count() as u32
    }

    pub fn contains(&self, (i, j): (u32, u32)) -> bool {
        j < self.row(i)
    }

    pub fn conjugate(&self) -> Partition {
        let n = self.parts.first().copied().unwrap_or(0);
        Partition {
            parts: (0..n).map(|j| self.col(j)).collect(),
        }
    }

    /// Boxes in row-major order.
    pub fn boxes(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (0..p).map(move |j| (i as u32, j)))
    }

    /// `(arm, leg)`: boxes strictly right in the row and strictly below in
    /// the column.
    pub fn arm_leg(&self, b: (u32, u32)) -> Result<(i64, i64)> {
        if !self.contains(b) {
            return Err(Error::InvalidInput(format!("box {b:?} outside {:?}", self.parts)));
        }
        let (i, j) = b;
        Ok((
            self.row(i) as i64 - j as i64 - 1,
            self.col(j) as i64 - i as i64 - 1,
        ))
    }
}

fn partitions_rec(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if n == 0 {
        out.push(Partition { parts: prefix.clone() });
        return;
    }
    for first in (1..=n.min(max)).rev() {
        prefix.push(first);
        partitions_rec(n - first, first, prefix, out);
        prefix.pop();
    }
}

/// All partitions of `n` in reverse-lexicographic order.
pub fn partitions_of(n: i64) -> Result<Vec<Partition>> {
    if n < 0 {
        return Err(Error::InvalidInput(format!("cannot partition negative n = {n}")));
    }
    let n = n as u32;
    let mut out = Vec::new();
    partitions_rec(n, n, &mut Vec::new(), &mut out);
    Ok(out)
}

/// A torus-fixed point of `S^{[n]}`: one partition per fixed point of `S`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbFixedPoint {
    pub assignment: Vec<Partition>,
    pub total: u32,
}

impl HilbFixedPoint {
    pub fn empty(points: usize) -> HilbFixedPoint {
        HilbFixedPoint {
            assignment: vec![Partition::empty(); points],
            total: 0,
        }
    }

    pub fn from_partitions(assignment: Vec<Partition>) -> HilbFixedPoint {
        let total = assignment.iter().map(Partition::size).sum();
        HilbFixedPoint { assignment, total }
    }
}

/// All fixed points of `S^{[n]}` for a surface with `points` torus-fixed
/// points. Point 0 varies slowest, taking sizes `n, n-1, .., 0`; partitions
/// of each size appear in reverse-lexicographic order.
pub fn hilb_fixed_points_on(points: usize, n: u32) -> Vec<HilbFixedPoint> {
    let tables: Vec<Vec<Partition>> = (0..=n)
        .map(|k| partitions_of(k as i64).expect("nonnegative"))
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(points);
    fill(points, n, &tables, &mut current, &mut out);
    out
}

fn fill(
    points: usize,
    remaining: u32,
    tables: &[Vec<Partition>],
    current: &mut Vec<Partition>,
    out: &mut Vec<HilbFixedPoint>,
) {
    if current.len() == points {
        if remaining == 0 {
            out.push(HilbFixedPoint::from_partitions(current.clone()));
        }
        return;
    }
    let sizes: Vec<u32> = if current.len() + 1 == points {
        vec![remaining]
    } else {
        (0..=remaining).rev().collect()
    };
    for k in sizes {
        for p in &tables[k as usize] {
            current.push(p.clone());
            fill(points, remaining - k, tables, current, out);
            current.pop();
        }
    }
}
