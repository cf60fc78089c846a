//! Graded subspaces of tensor powers with rank and membership services.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Echelon, Insert};
use crate::rational::Rational;
use crate::symplectic::Genus;
use crate::tensor::{letter_at, Tensor, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "L")]
    Lie,
    #[serde(rename = "I")]
    Ideal,
    #[serde(rename = "L_g")]
    SurfaceLie,
    #[serde(rename = "h")]
    Derivation,
    #[serde(rename = "j")]
    J,
    #[serde(rename = "imtau")]
    ImTau,
    #[serde(rename = "custom")]
    Custom,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Label::Lie => "L",
            Label::Ideal => "I",
            Label::SurfaceLie => "L_g",
            Label::Derivation => "h",
            Label::J => "j",
            Label::ImTau => "imtau",
            Label::Custom => "custom",
        };
        write!(f, "{s}")
    }
}

/// Packs the weight of a word (x_i ↦ +e_i, y_i ↦ −e_i) into one key.
#[inline]
pub fn weight_key(w: Word, n: usize) -> u64 {
    let mut key: u64 = 0;
    for i in 0..n {
        let l = letter_at(w, n, i);
        let shift = 8 * (l >> 1) as u64;
        if l & 1 == 0 {
            key = key.wrapping_add(1 << shift);
        } else {
            key = key.wrapping_sub(1 << shift);
        }
    }
    key
}

/// Splits a tensor into its weight-homogeneous components.
pub fn weight_components(t: &Tensor) -> FxHashMap<u64, Vec<(usize, Rational)>> {
    let mut out: FxHashMap<u64, Vec<(usize, Rational)>> = FxHashMap::default();
    for (w, c) in t.terms() {
        out.entry(weight_key(*w, t.degree())).or_default().push((*w as usize, c.clone()));
    }
    out
}

/// Row echelon forms kept separately per weight space.
///
/// Vectors must be weight-homogeneous (every element of an sp-stable
/// subspace spanned by monomial-weight generators is); inhomogeneous inputs
/// are rejected because their span does not decompose blockwise.
#[derive(Clone, Debug, Default)]
pub struct BlockEchelon {
    blocks: FxHashMap<u64, Echelon>,
    track: bool,
    inserted: usize,
    /// Maps (block, local tag) to the global insertion tag.
    tags: FxHashMap<u64, Vec<usize>>,
}

impl BlockEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tracking() -> Self {
        BlockEchelon { track: true, ..Self::default() }
    }

    pub fn rank(&self) -> usize {
        self.blocks.values().map(|e| e.rank()).sum()
    }

    fn block_of(t: &Tensor) -> Result<Option<u64>> {
        let mut key = None;
        for (w, _) in t.terms() {
            let k = weight_key(*w, t.degree());
            match key {
                None => key = Some(k),
                Some(k0) if k0 != k => {
                    return Err(Error::InvalidArgument("tensor is not weight-homogeneous".into()))
                }
                _ => {}
            }
        }
        Ok(key)
    }

    /// Inserts a homogeneous tensor; returns whether it raised the rank.
    pub fn insert(&mut self, t: &Tensor) -> Result<bool> {
        let tag = self.inserted;
        self.inserted += 1;
        let Some(key) = Self::block_of(t)? else { return Ok(false) };
        let track = self.track;
        let e = self.blocks.entry(key).or_insert_with(|| if track { Echelon::tracking() } else { Echelon::new() });
        if track {
            self.tags.entry(key).or_default().push(tag);
        }
        Ok(e.insert_entries(&t.entries()) == Insert::Independent)
    }

    /// Whether `t` (any tensor) lies in the span.
    pub fn contains(&self, t: &Tensor) -> bool {
        weight_components(t)
            .into_iter()
            .all(|(k, v)| self.blocks.get(&k).is_some_and(|e| e.contains_entries(&v)))
    }

    /// Coordinates of `t` in terms of insertion tags (tracking only).
    pub fn coordinates(&self, t: &Tensor) -> Option<Vec<(usize, Rational)>> {
        assert!(self.track, "coordinates require tracking");
        let mut out = Vec::new();
        for (k, v) in weight_components(t) {
            let e = self.blocks.get(&k)?;
            let c = e.coordinates(&v)?;
            let tags = &self.tags[&k];
            out.extend(c.into_iter().map(|(t, x)| (tags[t], x)));
        }
        out.sort_by_key(|e| e.0);
        Some(out)
    }
}

/// A basis of a subspace of H^{⊗degree}, certified independent.
#[derive(Clone, Debug)]
pub struct GradedSubspace {
    pub genus: Genus,
    pub degree: usize,
    pub label: Label,
    basis: Vec<Tensor>,
    echelon: BlockEchelon,
}

impl GradedSubspace {
    pub fn empty(genus: Genus, degree: usize, label: Label) -> Self {
        GradedSubspace { genus, degree, label, basis: Vec::new(), echelon: BlockEchelon::tracking() }
    }

    /// Keeps the independent members of a spanning set.
    pub fn from_spanning<I>(genus: Genus, degree: usize, label: Label, spanning: I) -> Result<Self>
    where
        I: IntoIterator<Item = Tensor>,
    {
        let mut s = Self::empty(genus, degree, label);
        for t in spanning {
            s.push(t)?;
        }
        Ok(s)
    }

    /// Adds `t` if it is independent of the current basis.
    pub fn push(&mut self, t: Tensor) -> Result<bool> {
        if t.degree() != self.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: t.degree() });
        }
        if self.echelon.contains(&t) {
            return Ok(false);
        }
        if BlockEchelon::block_of(&t).is_err() {
            return Err(Error::InvalidArgument("subspace generators must be weight-homogeneous".into()));
        }
        self.echelon.insert(&t)?;
        self.basis.push(t);
        Ok(true)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Tensor] {
        &self.basis
    }

    pub fn into_basis(self) -> Vec<Tensor> {
        self.basis
    }

    pub fn contains(&self, t: &Tensor) -> bool {
        t.degree() == self.degree && self.echelon.contains(t)
    }

    /// Coordinates of `t` on the basis, if `t` lies in the span.
    pub fn coordinates(&self, t: &Tensor) -> Option<Vec<Rational>> {
        let c = self.echelon.coordinates(t)?;
        let mut out = vec![Rational::zero(); self.basis.len()];
        // Basis element i was the i-th successful insert; failed inserts
        // never reach the echelon, so tags are basis indices.
        for (tag, x) in c {
            out[tag] = x;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize) -> Genus {
        Genus::new(n).unwrap()
    }

    #[test]
    fn subspace_membership_and_coordinates() {
        let gg = g(2);
        let a = Tensor::basis(gg, &[0, 1]);
        let b = Tensor::basis(gg, &[1, 0]);
        let c = Tensor::basis(gg, &[2, 3]);
        let s = GradedSubspace::from_spanning(gg, 2, Label::Custom, [a.clone(), b.clone(), a.sub(&b), c.clone()]).unwrap();
        assert_eq!(s.dim(), 3);
        let v = a.scale(&Rational::from_int(2)).add(&c);
        assert_eq!(s.coordinates(&v).unwrap(), vec![Rational::from_int(2), Rational::zero(), Rational::one()]);
        assert!(!s.contains(&Tensor::basis(gg, &[0, 0])));
        assert!(s.contains(&Tensor::omega(gg).sub(&c).add(&Tensor::basis(gg, &[3, 2]))));
    }

    #[test]
    fn inhomogeneous_rejected() {
        let gg = g(1);
        let t = Tensor::basis(gg, &[0, 0]).add(&Tensor::basis(gg, &[0, 1]));
        let mut s = GradedSubspace::empty(gg, 2, Label::Custom);
        assert!(s.push(t).is_err());
    }
}
