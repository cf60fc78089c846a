//! Linear chord diagrams and the invariant tensors and functionals they index.
//!
//! A diagram on 2k vertices is a perfect matching, stored as a partner array
//! with 0-based vertices. Diagrams are enumerated in lexicographic order of
//! their sorted pair lists, and [`LinearChordDiagram::rank`] is the position
//! in that order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::linalg::{self, SparseMatrix, SparseVector};
use crate::rational::Rational;
use crate::symplectic::{mu, Genus, Letter};
use crate::tensor::{letter_at, Tensor, TermMap, Word};

/// (2k−1)!!, the number of linear chord diagrams with k chords.
pub fn double_factorial_odd(k: usize) -> u64 {
    (1..=k as u64).map(|i| 2 * i - 1).product()
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearChordDiagram {
    partner: Vec<u8>,
}

impl LinearChordDiagram {
    /// From 0-based pairs covering 0..2k exactly once.
    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let n = 2 * pairs.len();
        let mut partner = vec![u8::MAX; n];
        for &(a, b) in pairs {
            if a >= n || b >= n || a == b || partner[a] != u8::MAX || partner[b] != u8::MAX {
                return Err(Error::InvalidArgument(format!("{pairs:?} is not a perfect matching")));
            }
            partner[a] = b as u8;
            partner[b] = a as u8;
        }
        Ok(LinearChordDiagram { partner })
    }

    pub fn from_partner(partner: Vec<u8>) -> Result<Self> {
        let n = partner.len();
        for (i, &p) in partner.iter().enumerate() {
            if p as usize >= n || p as usize == i || partner[p as usize] as usize != i {
                return Err(Error::InvalidArgument(format!("{partner:?} is not an involution")));
            }
        }
        Ok(LinearChordDiagram { partner })
    }

    pub fn chords(&self) -> usize {
        self.partner.len() / 2
    }

    pub fn vertices(&self) -> usize {
        self.partner.len()
    }

    pub fn partner(&self, v: usize) -> usize {
        self.partner[v] as usize
    }

    pub fn partners(&self) -> &[u8] {
        &self.partner
    }

    /// Sorted pairs (i, j) with i < j, 0-based.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.partner.len())
            .filter(|&i| (self.partner[i] as usize) > i)
            .map(|i| (i, self.partner[i] as usize))
            .collect()
    }

    /// Sign of the permutation (1 2 … 2k) ↦ (i₁ j₁ … i_k j_k).
    pub fn sign(&self) -> i64 {
        let seq: Vec<usize> = self.pairs().into_iter().flat_map(|(a, b)| [a, b]).collect();
        let mut inv = 0;
        for i in 0..seq.len() {
            for j in i + 1..seq.len() {
                if seq[i] > seq[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Position in the lexicographic enumeration.
    pub fn rank(&self) -> usize {
        let mut remaining: Vec<usize> = (0..self.partner.len()).collect();
        let mut r = 0;
        while !remaining.is_empty() {
            let n = remaining.len();
            let v = remaining[0];
            let p = self.partner[v] as usize;
            let t = remaining.iter().position(|&x| x == p).expect("partner present") - 1;
            r += t * double_factorial_odd(n / 2 - 1) as usize;
            remaining.retain(|&x| x != v && x != p);
        }
        r
    }

    /// Inverse of [`rank`](Self::rank).
    pub fn unrank(k: usize, mut r: usize) -> Self {
        let mut partner = vec![0u8; 2 * k];
        let mut remaining: Vec<usize> = (0..2 * k).collect();
        while !remaining.is_empty() {
            let n = remaining.len();
            let block = double_factorial_odd(n / 2 - 1) as usize;
            let t = r / block;
            r %= block;
            let v = remaining[0];
            let p = remaining[t + 1];
            partner[v] = p as u8;
            partner[p] = v as u8;
            remaining.retain(|&x| x != v && x != p);
        }
        LinearChordDiagram { partner }
    }

    /// Disjoint union with `other` placed after this diagram's vertices.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let n = self.partner.len() as u8;
        let mut partner = self.partner.clone();
        partner.extend(other.partner.iter().map(|&p| p + n));
        LinearChordDiagram { partner }
    }

    /// a_C: sgn C times ω₀ placed on every chord (first factor at the
    /// smaller vertex). Has (2g)^k terms with coefficients ±1.
    pub fn a_tensor(&self, g: Genus) -> Tensor {
        let n = self.vertices();
        let pairs = self.pairs();
        let rank = g.rank();
        let mut m = TermMap::new();
        let total = rank.pow(pairs.len() as u32);
        let mut letters = vec![0 as Letter; n];
        for code in 0..total {
            let mut c = code;
            let mut sign = self.sign();
            for &(a, b) in &pairs {
                let l = (c % rank) as Letter;
                c /= rank;
                letters[a] = l;
                letters[b] = l ^ 1;
                sign *= mu(l, l ^ 1);
            }
            m.add_int(crate::tensor::pack(&letters), sign);
        }
        m.finish(g, n)
    }

    /// α_C(t) = sgn C · Σ_w t_w Π μ(w_i, w_j).
    pub fn alpha_eval(&self, t: &Tensor) -> Result<Rational> {
        let n = self.vertices();
        if t.degree() != n {
            return Err(Error::DegreeMismatch { expected: n, found: t.degree() });
        }
        let pairs = self.pairs();
        let mut acc = Rational::zero();
        for (w, c) in t.terms() {
            if let Some(v) = alpha_word(&pairs, *w, n) {
                acc += c * &Rational::from_int(v);
            }
        }
        Ok(acc * Rational::from_int(self.sign()))
    }

    /// The cycles of the union graph with `other`, as vertex sequences
    /// alternating edges of `other` then `self`, each starting at its
    /// smallest vertex.
    pub fn union_cycles(&self, other: &Self) -> Vec<Vec<usize>> {
        let n = self.vertices();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut v = start;
            loop {
                seen[v] = true;
                cyc.push(v);
                let w = other.partner(v);
                seen[w] = true;
                cyc.push(w);
                v = self.partner(w);
                if v == start {
                    break;
                }
            }
            out.push(cyc);
        }
        out
    }

    /// α_C(a_{C′}) computed from the cycles of C ∪ C′: each cycle of length
    /// 2m traversed with orientation signs s contributes 2g·(−1)^m·Π s.
    pub fn pairing_value(&self, other: &Self, g: Genus) -> Rational {
        let (sign, r) = self.pairing_sign_and_cycles(other);
        Rational::from_int(sign) * Rational::from_int(2 * g.get() as i64).pow(r as u32)
    }

    /// The sign sgn(C, C′) and number r of cycles in the union graph.
    pub fn pairing_sign_and_cycles(&self, other: &Self) -> (i64, usize) {
        assert_eq!(self.vertices(), other.vertices(), "chord counts differ");
        let cycles = self.union_cycles(other);
        let mut sign = self.sign() * other.sign();
        for cyc in &cycles {
            let m = cyc.len() / 2;
            if m % 2 == 1 {
                sign = -sign;
            }
            for i in 0..cyc.len() {
                let (a, b) = (cyc[i], cyc[(i + 1) % cyc.len()]);
                if a > b {
                    sign = -sign;
                }
            }
        }
        (sign, cycles.len())
    }

    /// ε·(2g)^r where r counts components of C ∪ C′ and the sign ε is read
    /// off a direct evaluation of α_C(a_{C′}) at genus one.
    pub fn pairing_formula(&self, other: &Self, g: Genus) -> Rational {
        let r = self.union_cycles(other).len();
        let one = Genus::new(1).expect("genus one");
        let at_one = self.alpha_eval(&other.a_tensor(one)).expect("same degree");
        let eps = at_one / Rational::from_int(2).pow(r as u32);
        eps * Rational::from_int(2 * g.get() as i64).pow(r as u32)
    }

    /// Lexicographically least rotation class.
    pub fn circularize(&self) -> ChordDiagramCircular {
        let n = self.vertices();
        let best = (0..n.max(1))
            .map(|r| {
                let mut partner = vec![0u8; n];
                for v in 0..n {
                    partner[(v + r) % n] = ((self.partner[v] as usize + r) % n) as u8;
                }
                LinearChordDiagram { partner }
            })
            .min_by(|a, b| a.pairs().cmp(&b.pairs()))
            .unwrap_or_else(|| self.clone());
        ChordDiagramCircular { representative: best }
    }
}

/// Π μ over the chords for a single word (None when the product vanishes).
#[inline]
fn alpha_word(pairs: &[(usize, usize)], w: Word, n: usize) -> Option<i64> {
    let mut v = 1;
    for &(a, b) in pairs {
        let m = mu(letter_at(w, n, a), letter_at(w, n, b));
        if m == 0 {
            return None;
        }
        v *= m;
    }
    Some(v)
}

impl fmt::Display for LinearChordDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b) in self.pairs() {
            write!(f, "({},{})", a + 1, b + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for LinearChordDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for LinearChordDiagram {
    type Err = Error;

    /// Parses the 1-based text form "(1,3)(2,4)".
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad chord diagram {s:?}"));
        let mut pairs = Vec::new();
        for part in s.trim().split('(').skip(1) {
            let body = part.trim().strip_suffix(')').ok_or_else(bad)?;
            let (a, b) = body.split_once(',').ok_or_else(bad)?;
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            if a == 0 || b == 0 {
                return Err(bad());
            }
            pairs.push((a - 1, b - 1));
        }
        Self::from_pairs(&pairs)
    }
}

impl Serialize for LinearChordDiagram {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LinearChordDiagram {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A chord diagram up to cyclic rotation of its vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ChordDiagramCircular {
    pub representative: LinearChordDiagram,
}

/// All diagrams with `k` chords in lexicographic order.
pub fn enumerate(k: usize, budget: &Budget) -> Result<Vec<LinearChordDiagram>> {
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one chord".into()));
    }
    budget.check_chords(k)?;
    Ok(enumerate_unchecked(k))
}

pub(crate) fn enumerate_unchecked(k: usize) -> Vec<LinearChordDiagram> {
    let total = double_factorial_odd(k) as usize;
    (0..total).map(|r| LinearChordDiagram::unrank(k, r)).collect()
}

/// The Gram matrix (α_{C_i}(a_{C_j})) over all diagrams with k chords.
pub fn gram_matrix(k: usize, g: Genus, budget: &Budget) -> Result<SparseMatrix> {
    let ds = enumerate(k, budget)?;
    budget.check_work((ds.len() * ds.len()) as u64, "Gram matrix")?;
    let cols = crate::exec::map_slice(&ds, |cj| {
        let col: Vec<Rational> = ds.iter().map(|ci| ci.pairing_value(cj, g)).collect();
        SparseVector::from_dense(&col)
    });
    SparseMatrix::from_columns(ds.len(), cols)
}

/// dim (H^{⊗2k})^Sp as the rank of the Gram matrix.
pub fn invariant_dimension(k: usize, g: Genus, budget: &Budget) -> Result<usize> {
    let gram = gram_matrix(k, g, budget)?;
    linalg::modular::rank_modular_certified_with(&gram, budget)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SumRelationReport {
    pub k: usize,
    pub g: usize,
    pub is_zero: bool,
    pub row_sum: Rational,
    /// "tensor" when Σ a_C was materialized, "gram" when decided through the
    /// nondegenerate invariant pairing.
    pub method: &'static str,
}

/// Checks Σ_C a_C = 0 and the constancy of Σ_C α_{C′}(a_C) over C′.
pub fn verify_sum_relation(k: usize, g: Genus, budget: &Budget) -> Result<SumRelationReport> {
    let ds = enumerate(k, budget)?;
    let sums: Vec<Rational> = crate::exec::map_slice(&ds, |cp| {
        ds.iter().map(|c| cp.pairing_value(c, g)).fold(Rational::zero(), |a, b| a + b)
    });
    let row_sum = sums[0].clone();
    if let Some(bad) = sums.iter().find(|s| **s != row_sum) {
        return Err(Error::Inconsistent(format!(
            "row sums of the Gram matrix are not constant ({row_sum} vs {bad})"
        )));
    }
    let terms = (g.rank() as u64).pow(k as u32) * ds.len() as u64;
    let (is_zero, method) = if terms <= 5_000_000 && 2 * k <= crate::tensor::MAX_DEGREE {
        let mut m = TermMap::new();
        for c in &ds {
            m.add_scaled(&c.a_tensor(g), &Rational::one());
        }
        (m.is_empty(), "tensor")
    } else {
        // α functionals separate invariant tensors, so Σ a_C = 0 iff G·1 = 0;
        // the row sums are exactly the entries of G·1.
        (row_sum.is_zero(), "gram")
    };
    Ok(SumRelationReport { k, g: g.get(), is_zero, row_sum, method })
}

/// 2^k g(g−1)⋯(g−k+1), the predicted common row sum.
pub fn predicted_row_sum(k: usize, g: usize) -> Rational {
    let mut v = Rational::from_int(1 << k);
    for i in 0..k {
        v *= Rational::from_int(g as i64 - i as i64);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize) -> Genus {
        Genus::new(n).unwrap()
    }

    fn d(s: &str) -> LinearChordDiagram {
        s.parse().unwrap()
    }

    #[test]
    fn enumeration_order_and_counts() {
        let b = Budget::default();
        let two: Vec<String> = enumerate(2, &b).unwrap().iter().map(|c| c.to_string()).collect();
        assert_eq!(two, vec!["(1,2)(3,4)", "(1,3)(2,4)", "(1,4)(2,3)"]);
        assert_eq!(enumerate(1, &b).unwrap().len(), 1);
        assert_eq!(enumerate(3, &b).unwrap().len(), 15);
        assert!(enumerate(7, &b).is_err());
        for k in 1..=5 {
            let ds = enumerate_unchecked(k);
            for (i, c) in ds.iter().enumerate() {
                assert_eq!(c.rank(), i);
            }
            assert!(ds.windows(2).all(|w| w[0].pairs() < w[1].pairs()));
        }
    }

    #[test]
    fn signs() {
        assert_eq!(d("(1,2)(3,4)").sign(), 1);
        assert_eq!(d("(1,3)(2,4)").sign(), -1);
        assert_eq!(d("(1,4)(2,3)").sign(), 1);
    }

    #[test]
    fn a_tensor_shapes() {
        assert_eq!(d("(1,2)").a_tensor(g(3)), Tensor::omega(g(3)));
        let t = d("(1,3)(2,4)(5,6)").a_tensor(g(2));
        assert_eq!(t.len(), 64);
        // k = 2, (1,3)(2,4), g = 1: minus the four sign patterns.
        let t = d("(1,3)(2,4)").a_tensor(g(1));
        assert_eq!(t.len(), 4);
        let x1y1x1y1 = crate::tensor::pack(&[0, 0, 1, 1]);
        assert_eq!(t.coeff(x1y1x1y1), Rational::from_int(-1));
    }

    #[test]
    fn alpha_examples() {
        let c = d("(1,2)");
        assert_eq!(c.alpha_eval(&Tensor::omega(g(3))).unwrap(), Rational::from_int(6));
        assert!(c.alpha_eval(&Tensor::zero(g(2), 2)).unwrap().is_zero());
        let v = d("(1,2)(3,4)").alpha_eval(&d("(1,3)(2,4)").a_tensor(g(2))).unwrap();
        assert_eq!(v.abs(), Rational::from_int(4));
        assert!(c.alpha_eval(&Tensor::zero(g(2), 3)).is_err());
    }

    #[test]
    fn pairing_agrees_with_evaluation() {
        for k in 1..=3 {
            let ds = enumerate_unchecked(k);
            for gg in 1..=2 {
                for c in &ds {
                    for cp in &ds {
                        let direct = c.alpha_eval(&cp.a_tensor(g(gg))).unwrap();
                        assert_eq!(c.pairing_value(cp, g(gg)), direct);
                        assert_eq!(c.pairing_formula(cp, g(gg)), direct);
                    }
                }
            }
        }
        let c = d("(1,2)(3,4)");
        assert_eq!(c.pairing_value(&c, g(3)), Rational::from_int(36));
    }

    #[test]
    fn small_dimensions() {
        let b = Budget::default();
        assert_eq!(invariant_dimension(2, g(2), &b).unwrap(), 3);
        assert_eq!(invariant_dimension(2, g(1), &b).unwrap(), 2);
        assert_eq!(invariant_dimension(1, g(1), &b).unwrap(), 1);
        assert_eq!(linalg::rank(&gram_matrix(2, g(1), &b).unwrap()).unwrap(), 2);
    }

    #[test]
    fn sum_relation_examples() {
        let b = Budget::default();
        let r = verify_sum_relation(2, g(1), &b).unwrap();
        assert!(r.is_zero);
        assert!(r.row_sum.is_zero());
        let r = verify_sum_relation(2, g(2), &b).unwrap();
        assert!(!r.is_zero);
        assert_eq!(r.row_sum, Rational::from_int(8));
        assert!(verify_sum_relation(3, g(2), &b).unwrap().is_zero);
    }

    #[test]
    fn circular_classes() {
        assert_eq!(d("(1,2)(3,4)").circularize(), d("(1,4)(2,3)").circularize());
        let classes: std::collections::BTreeSet<_> = enumerate_unchecked(2).iter().map(|c| c.circularize()).collect();
        assert_eq!(classes.len(), 2);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!("(1,1)".parse::<LinearChordDiagram>().is_err());
        assert!("(1,2)(2,3)".parse::<LinearChordDiagram>().is_err());
        assert!("(0,1)".parse::<LinearChordDiagram>().is_err());
    }
}
