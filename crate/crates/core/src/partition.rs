//! Set partitions of {0..p} and integer partitions of p, used as stratum
//! labels, plus fiber summaries of the eigen-decomposition map.

use std::fmt;

use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

use crate::error::{Result, SrError};
use crate::manifold::{PosDiag, SpdMatrix};

/// Partition of {0, …, p−1}. Blocks are sorted internally and ordered by
/// their smallest element. Displayed and serialized with 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    p: usize,
    blocks: Vec<Vec<usize>>,
}

/// Partition of the integer p, parts non-increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct IntPartition(Vec<usize>);

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberSummary {
    pub num_components: u128,
    /// Dimension of each component, Σ kᵢ(kᵢ−1)/2.
    pub component_dim: usize,
    /// Dimension of the fiber as a manifold (equal to `component_dim`,
    /// since every component is a copy of SO(k₁)×…×SO(k_r)).
    pub total_fiber_dim: usize,
    pub component_group_parts: IntPartition,
}

/// Shape of the ellipsoid of a 3×3 SPD matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Triaxial,
    Prolate,
    Oblate,
    Isotropic,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Shape::Triaxial => "triaxial",
            Shape::Prolate => "prolate",
            Shape::Oblate => "oblate",
            Shape::Isotropic => "isotropic",
        };
        f.write_str(s)
    }
}

impl SetPartition {
    /// Builds a partition from 0-based blocks; validates disjointness and coverage.
    pub fn new(p: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; p];
        for b in &blocks {
            if b.is_empty() {
                return Err(SrError::InvalidInput("empty block".into()));
            }
            for &i in b {
                if i >= p || seen[i] {
                    return Err(SrError::InvalidInput(format!("bad or repeated index {i}")));
                }
                seen[i] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(SrError::InvalidInput("blocks do not cover all indices".into()));
        }
        Ok(Self::canonical(p, blocks))
    }

    fn canonical(p: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        SetPartition { p, blocks }
    }

    /// Finest partition: all singletons.
    pub fn top(p: usize) -> Self {
        SetPartition { p, blocks: (0..p).map(|i| vec![i]).collect() }
    }

    /// Coarsest partition: a single block.
    pub fn bottom(p: usize) -> Self {
        SetPartition { p, blocks: vec![(0..p).collect()] }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Index of the block containing `i`.
    pub fn block_of(&self, i: usize) -> usize {
        self.blocks.iter().position(|b| b.contains(&i)).expect("index out of range")
    }

    pub fn int_partition(&self) -> IntPartition {
        IntPartition::from_unsorted(self.blocks.iter().map(|b| b.len()).collect())
    }

    /// Image under a permutation of indices: block B ↦ {π(i) : i ∈ B}.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::canonical(self.p, self.blocks.iter().map(|b| b.iter().map(|&i| perm[i]).collect()).collect())
    }

    /// All set partitions of {0..p}, via restricted growth strings.
    pub fn all(p: usize) -> Vec<SetPartition> {
        let mut out = Vec::new();
        let mut rgs = vec![0usize; p];
        fn rec(i: usize, maxb: usize, rgs: &mut Vec<usize>, out: &mut Vec<SetPartition>) {
            let p = rgs.len();
            if i == p {
                let nb = rgs.iter().max().map_or(0, |m| m + 1);
                let mut blocks = vec![Vec::new(); nb];
                for (j, &b) in rgs.iter().enumerate() {
                    blocks[b].push(j);
                }
                out.push(SetPartition { p, blocks });
                return;
            }
            for b in 0..=maxb {
                rgs[i] = b;
                rec(i + 1, maxb.max(b + 1), rgs, out);
            }
        }
        if p == 0 {
            return out;
        }
        rec(1, 1, &mut rgs, &mut out);
        out
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            let s: Vec<String> = b.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "{{{}}}", s.join(","))?;
        }
        write!(f, "}}")
    }
}

impl Serialize for SetPartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.blocks.len()))?;
        for b in &self.blocks {
            let one: Vec<usize> = b.iter().map(|i| i + 1).collect();
            seq.serialize_element(&one)?;
        }
        seq.end()
    }
}

impl IntPartition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(SrError::InvalidInput("parts must be positive".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(SrError::InvalidInput("parts must be non-increasing".into()));
        }
        Ok(IntPartition(parts))
    }

    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        IntPartition(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn p(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn all(p: usize) -> Vec<IntPartition> {
        fn rec(rem: usize, maxp: usize, cur: &mut Vec<usize>, out: &mut Vec<IntPartition>) {
            if rem == 0 {
                out.push(IntPartition(cur.clone()));
                return;
            }
            for k in (1..=rem.min(maxp)).rev() {
                cur.push(k);
                rec(rem - k, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(p, p, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for IntPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        f.write_str(&s.join("+"))
    }
}

/// Groups indices whose log-entries are within `tol`, closed under chaining.
pub fn partition_of_diag(d: &PosDiag, tol: f64) -> SetPartition {
    let logs = d.logs();
    let p = logs.len();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| logs[a].partial_cmp(&logs[b]).unwrap());
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (n, &i) in order.iter().enumerate() {
        if n > 0 && logs[i] - logs[order[n - 1]] <= tol {
            blocks.last_mut().unwrap().push(i);
        } else {
            blocks.push(vec![i]);
        }
    }
    SetPartition::canonical(p, blocks)
}

/// True iff every block of `k` lies inside a block of `j` (k is finer).
pub fn refines(j: &SetPartition, k: &SetPartition) -> bool {
    j.p == k.p && k.blocks.iter().all(|b| j.blocks.iter().any(|a| b.iter().all(|i| a.contains(i))))
}

/// True iff `b` is obtained by partitioning the parts of `a`.
pub fn refines_int(a: &IntPartition, b: &IntPartition) -> bool {
    if a.p() != b.p() {
        return false;
    }
    fn fill(i: usize, parts: &[usize], room: &mut Vec<usize>) -> bool {
        if i == parts.len() {
            return room.iter().all(|&r| r == 0);
        }
        for j in 0..room.len() {
            // skip bins with the same remaining room already tried
            if room[j] >= parts[i] && !room[..j].contains(&room[j]) {
                room[j] -= parts[i];
                if fill(i + 1, parts, room) {
                    return true;
                }
                room[j] += parts[i];
            }
        }
        false
    }
    let mut room = a.0.clone();
    fill(0, &b.0, &mut room)
}

pub fn stratum_of(x: &SpdMatrix, tol: f64) -> Result<IntPartition> {
    let ev = x.eigenvalues();
    let top = ev[0];
    if top.is_nan() || top <= 0.0 || *ev.last().unwrap() <= 0.0 {
        return Err(SrError::NotSpd);
    }
    Ok(partition_of_diag(&PosDiag::new_unchecked(ev), tol).int_partition())
}

/// (dim S_J, dim S_[J], dim D_J) with r blocks of sizes kᵢ.
pub fn stratum_dims(j: &SetPartition) -> (usize, usize, usize) {
    let p = j.p;
    let r = j.num_blocks();
    let so = p * (p - 1) / 2;
    let sub: usize = j.blocks.iter().map(|b| b.len() * (b.len() - 1) / 2).sum();
    (r + so, r + so - sub, r)
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Number of components and their dimension for a fiber of type `parts`.
pub fn fiber_summary_of(parts: &IntPartition) -> FiberSummary {
    let p = parts.p();
    let r = parts.0.len();
    let denom: u128 = parts.0.iter().map(|&k| factorial(k)).product();
    let num = (1u128 << (r - 1)) * factorial(p) / denom;
    let dim: usize = parts.0.iter().map(|&k| k * (k - 1) / 2).sum();
    FiberSummary { num_components: num, component_dim: dim, total_fiber_dim: dim, component_group_parts: parts.clone() }
}

pub fn fiber_summary(x: &SpdMatrix, tol: f64) -> Result<FiberSummary> {
    Ok(fiber_summary_of(&stratum_of(x, tol)?))
}

/// (number of integer partitions of p, Bell number B_p).
pub fn count_strata(p: usize) -> (u128, u128) {
    // partition numbers by the coin-change recurrence
    let mut part = vec![0u128; p + 1];
    part[0] = 1;
    for k in 1..=p {
        for n in k..=p {
            part[n] += part[n - k];
        }
    }
    // Bell numbers via the Bell triangle
    let mut row = vec![1u128];
    for _ in 1..p {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            let v = next.last().unwrap() + x;
            next.push(v);
        }
        row = next;
    }
    let bell = if p == 0 { 1 } else { *row.last().unwrap() };
    (part[p], bell)
}

/// Ellipsoid shape of a 3×3 SPD matrix from its eigenvalue pattern.
pub fn shape_of(x: &SpdMatrix, tol: f64) -> Result<Shape> {
    if x.dim() != 3 {
        return Err(SrError::BadDimension("shape is defined for p = 3".into()));
    }
    let ev = x.eigenvalues();
    let l: Vec<f64> = ev.iter().map(|v| v.ln()).collect();
    let top_tie = l[0] - l[1] <= tol;
    let low_tie = l[1] - l[2] <= tol;
    Ok(match (top_tie, low_tie) {
        (true, true) => Shape::Isotropic,
        (false, true) => Shape::Prolate,
        (true, false) => Shape::Oblate,
        (false, false) => Shape::Triaxial,
    })
}
