//! Signed permutations S̃_p = I_p ⋊ S_p and the even subgroup S̃_p⁺.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Result, SrError};
use crate::manifold::{EigenPoint, PosDiag, Rotation};
use crate::partition::SetPartition;

pub const MAX_ENUM_P: usize = 8;

/// Diagonal sign-change σ ∈ I_p.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct SignChange(pub Vec<i8>);

impl SignChange {
    pub fn identity(p: usize) -> Self {
        SignChange(vec![1; p])
    }

    pub fn sgn(&self) -> i8 {
        self.0.iter().product()
    }

    pub fn is_even(&self) -> bool {
        self.sgn() == 1
    }

    /// Number of −1 entries.
    pub fn level(&self) -> usize {
        self.0.iter().filter(|&&s| s < 0).count()
    }

    pub fn mat(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.0.len(), self.0.len(), |i, j| if i == j { self.0[i] as f64 } else { 0.0 })
    }

    /// All even sign-changes of length p, in lexicographic order.
    pub fn all_even(p: usize) -> Vec<SignChange> {
        (0..1u32 << p)
            .map(|m| SignChange((0..p).map(|i| if m >> (p - 1 - i) & 1 == 1 { 1 } else { -1 }).collect()))
            .filter(|s| s.is_even())
            .collect()
    }
}

/// (σ, π) acting by mat(σ, π) = I_σ P_π with P_π e_j = e_{π(j)}.
/// Indices are 0-based: `perm[i]` is π(i).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPerm {
    pub signs: Vec<i8>,
    pub perm: Vec<usize>,
}

fn perm_sign(perm: &[usize]) -> i8 {
    let mut seen = vec![false; perm.len()];
    let mut s = 1i8;
    for i in 0..perm.len() {
        if seen[i] {
            continue;
        }
        let mut len = 0;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len % 2 == 0 {
            s = -s;
        }
    }
    s
}

fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &j) in perm.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

fn permutations(p: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; p], &mut out);
    out
}

impl SignedPerm {
    pub fn new(signs: Vec<i8>, perm: Vec<usize>) -> Result<Self> {
        let p = signs.len();
        if perm.len() != p {
            return Err(SrError::DimensionMismatch("signs and perm lengths differ".into()));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(SrError::InvalidInput("signs must be ±1".into()));
        }
        let mut seen = vec![false; p];
        for &j in &perm {
            if j >= p || seen[j] {
                return Err(SrError::InvalidInput("perm is not a permutation".into()));
            }
            seen[j] = true;
        }
        Ok(SignedPerm { signs, perm })
    }

    pub fn identity(p: usize) -> Self {
        SignedPerm { signs: vec![1; p], perm: (0..p).collect() }
    }

    pub fn from_sign_change(s: &SignChange) -> Self {
        SignedPerm { signs: s.0.clone(), perm: (0..s.0.len()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// (σ₁(π₁·σ₂), π₁π₂) where (π·σ)ᵢ = σ_{π⁻¹(i)}.
    pub fn multiply(&self, other: &SignedPerm) -> SignedPerm {
        let p = self.dim();
        let mut signs = self.signs.clone();
        for j in 0..p {
            signs[self.perm[j]] *= other.signs[j];
        }
        let perm = (0..p).map(|i| self.perm[other.perm[i]]).collect();
        SignedPerm { signs, perm }
    }

    /// (π⁻¹·σ, π⁻¹).
    pub fn inverse(&self) -> SignedPerm {
        let inv = invert(&self.perm);
        let signs = (0..self.dim()).map(|i| self.signs[self.perm[i]]).collect();
        SignedPerm { signs, perm: inv }
    }

    pub fn mat(&self) -> DMatrix<f64> {
        let p = self.dim();
        let mut m = DMatrix::zeros(p, p);
        for j in 0..p {
            let i = self.perm[j];
            m[(i, j)] = self.signs[i] as f64;
        }
        m
    }

    pub fn perm_sgn(&self) -> i8 {
        perm_sign(&self.perm)
    }

    pub fn sgn(&self) -> i8 {
        self.signs.iter().product::<i8>() * self.perm_sgn()
    }

    pub fn is_even(&self) -> bool {
        self.sgn() == 1
    }

    /// (π·D)ᵢ = d_{π⁻¹(i)}.
    pub fn act_on_diag(&self, d: &PosDiag) -> PosDiag {
        let v = d.values();
        let mut out = vec![0.0; v.len()];
        for (j, &x) in v.iter().enumerate() {
            out[self.perm[j]] = x;
        }
        PosDiag::new_unchecked(out)
    }

    /// g·(U, D) = (U mat(g)⁻¹, π_g·D).
    pub fn act_on_m(&self, pt: &EigenPoint) -> EigenPoint {
        let u = pt.u.matrix() * self.mat().transpose();
        EigenPoint { u: Rotation::new_unchecked(u), d: self.act_on_diag(&pt.d) }
    }

    /// Full S̃_p, sorted.
    pub fn enumerate_all(p: usize) -> Result<Vec<SignedPerm>> {
        if p > MAX_ENUM_P {
            return Err(SrError::TooLarge(format!("signed permutations of {p} letters")));
        }
        let perms = permutations(p);
        let mut out = Vec::with_capacity(perms.len() << p);
        for m in 0..1u32 << p {
            let signs: Vec<i8> = (0..p).map(|i| if m >> (p - 1 - i) & 1 == 1 { 1 } else { -1 }).collect();
            for q in &perms {
                out.push(SignedPerm { signs: signs.clone(), perm: q.clone() });
            }
        }
        out.sort();
        Ok(out)
    }

    /// S̃_p⁺, sorted; 2^{p−1} p! elements.
    pub fn enumerate_even(p: usize) -> Result<Vec<SignedPerm>> {
        Ok(Self::enumerate_all(p)?.into_iter().filter(|g| g.is_even()).collect())
    }
}

impl Serialize for SignedPerm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SignedPerm", 2)?;
        st.serialize_field("signs", &self.signs)?;
        let one: Vec<usize> = self.perm.iter().map(|i| i + 1).collect();
        st.serialize_field("perm", &one)?;
        st.end()
    }
}

/// Membership in Γ⁰_J = S̃_p⁺ ∩ G⁰_J: π maps every block of J to itself and
/// each diagonal block of mat(g) has determinant +1, i.e.
/// Π_{j∈B} σⱼ · sgn(π|_B) = +1 for every block B.
pub fn gamma0_membership(g: &SignedPerm, j: &SetPartition) -> bool {
    for b in j.blocks() {
        if b.iter().any(|i| !b.contains(&g.perm[*i])) {
            return false;
        }
        let local: Vec<usize> = b.iter().map(|i| b.iter().position(|x| *x == g.perm[*i]).unwrap()).collect();
        let s: i8 = b.iter().map(|&i| g.signs[i]).product();
        if s * perm_sign(&local) != 1 {
            return false;
        }
    }
    true
}

pub fn gamma0(j: &SetPartition) -> Result<Vec<SignedPerm>> {
    Ok(SignedPerm::enumerate_even(j.p())?.into_iter().filter(|g| gamma0_membership(g, j)).collect())
}

/// One representative (the least element) of each double coset
/// Γ⁰_{J_D} g Γ⁰_{J_Λ} in S̃_p⁺.
pub fn double_coset_reps(jd: &SetPartition, jl: &SetPartition) -> Result<Vec<SignedPerm>> {
    if jd.p() != jl.p() {
        return Err(SrError::DimensionMismatch("partitions of different sets".into()));
    }
    let all = SignedPerm::enumerate_even(jd.p())?;
    let h1 = gamma0(jd)?;
    let h2 = gamma0(jl)?;
    let index: HashMap<&SignedPerm, usize> = all.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut seen = vec![false; all.len()];
    let mut reps = Vec::new();
    for (i, g) in all.iter().enumerate() {
        if seen[i] {
            continue;
        }
        reps.push(g.clone());
        for a in &h1 {
            let ag = a.multiply(g);
            for b in &h2 {
                seen[index[&ag.multiply(b)]] = true;
            }
        }
    }
    Ok(reps)
}

/// The double coset Γ⁰_{J_D} g Γ⁰_{J_Λ}, sorted and deduplicated.
pub fn double_coset(g: &SignedPerm, jd: &SetPartition, jl: &SetPartition) -> Result<Vec<SignedPerm>> {
    let h1 = gamma0(jd)?;
    let h2 = gamma0(jl)?;
    let mut out: Vec<SignedPerm> = h1.iter().flat_map(|a| h2.iter().map(move |b| a.multiply(g).multiply(b))).collect();
    out.sort();
    out.dedup();
    Ok(out)
}
