//! Sparse tensors in pure tensor powers of H.
//!
//! A basis word u_1 ⊗ ... ⊗ u_n is packed into a `u64`, four bits per letter
//! with the first factor in the most significant position, so numeric order
//! on words is lexicographic order on letter sequences.

use std::collections::BTreeMap;
use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::symplectic::{letter_name, mu, parse_letter, Genus, Letter};

pub type Word = u64;

/// Longest word a `u64` can hold.
pub const MAX_DEGREE: usize = 16;

#[inline]
pub fn pack(letters: &[Letter]) -> Word {
    letters.iter().fold(0, |w, &l| (w << 4) | l as Word)
}

#[inline]
pub fn letter_at(w: Word, n: usize, i: usize) -> Letter {
    ((w >> (4 * (n - 1 - i))) & 15) as Letter
}

pub fn unpack(w: Word, n: usize) -> Vec<Letter> {
    (0..n).map(|i| letter_at(w, n, i)).collect()
}

#[inline]
pub fn concat(a: Word, b: Word, b_len: usize) -> Word {
    if b_len == 0 {
        a
    } else {
        (a << (4 * b_len)) | b
    }
}

/// Slice of `len` letters starting at position `start` of an `n`-letter word.
#[inline]
pub fn subword(w: Word, n: usize, start: usize, len: usize) -> Word {
    if len == 0 {
        return 0;
    }
    let shifted = w >> (4 * (n - start - len));
    if len == 16 {
        shifted
    } else {
        shifted & ((1u64 << (4 * len)) - 1)
    }
}

pub fn word_name(w: Word, n: usize) -> String {
    unpack(w, n).into_iter().map(letter_name).collect::<Vec<_>>().join(".")
}

/// Weight of a word as a vector in Z^g (x_i adds e_i, y_i subtracts it).
pub fn word_weight(w: Word, n: usize, g: usize) -> Vec<i32> {
    let mut out = vec![0; g];
    for i in 0..n {
        let l = letter_at(w, n, i);
        out[(l >> 1) as usize] += if l & 1 == 0 { 1 } else { -1 };
    }
    out
}

/// Accumulates terms before producing a canonical [`Tensor`].
#[derive(Default, Clone, Debug)]
pub struct TermMap(FxHashMap<Word, Rational>);

impl TermMap {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, w: Word, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(w) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add_int(&mut self, w: Word, c: i64) {
        self.add(w, Rational::from_int(c))
    }

    pub fn add_scaled(&mut self, t: &Tensor, c: &Rational) {
        for (w, x) in &t.terms {
            self.add(*w, x * c);
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn finish(self, g: Genus, degree: usize) -> Tensor {
        let mut terms: Vec<(Word, Rational)> = self.0.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by_key(|t| t.0);
        Tensor { g, degree, terms }
    }
}

/// An element of H^{⊗n} with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tensor {
    g: Genus,
    degree: usize,
    terms: Vec<(Word, Rational)>,
}

impl Tensor {
    pub fn zero(g: Genus, degree: usize) -> Self {
        assert!(degree <= MAX_DEGREE, "degree {degree} exceeds {MAX_DEGREE}");
        Tensor { g, degree, terms: Vec::new() }
    }

    /// The empty word with coefficient `c` (degree zero).
    pub fn scalar(g: Genus, c: Rational) -> Self {
        let terms = if c.is_zero() { Vec::new() } else { vec![(0, c)] };
        Tensor { g, degree: 0, terms }
    }

    pub fn basis(g: Genus, letters: &[Letter]) -> Self {
        Self::monomial(g, letters, Rational::one())
    }

    pub fn monomial(g: Genus, letters: &[Letter], c: Rational) -> Self {
        assert!(letters.len() <= MAX_DEGREE);
        debug_assert!(letters.iter().all(|&l| (l as usize) < g.rank()));
        let terms = if c.is_zero() { Vec::new() } else { vec![(pack(letters), c)] };
        Tensor { g, degree: letters.len(), terms }
    }

    pub fn from_terms<I>(g: Genus, degree: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Word, Rational)>,
    {
        let mut m = TermMap::new();
        for (w, c) in terms {
            m.add(w, c);
        }
        m.finish(g, degree)
    }

    /// ω₀ = Σ x_i⊗y_i − y_i⊗x_i, the tensor form of the symplectic class.
    pub fn omega(g: Genus) -> Self {
        let mut m = TermMap::new();
        for i in 0..g.get() as Letter {
            let (x, y) = (2 * i, 2 * i + 1);
            m.add_int(pack(&[x, y]), 1);
            m.add_int(pack(&[y, x]), -1);
        }
        m.finish(g, 2)
    }

    pub fn genus(&self) -> Genus {
        self.g
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[(Word, Rational)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Word, Rational)> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: Word) -> Rational {
        match self.terms.binary_search_by_key(&w, |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    fn check_same(&self, other: &Tensor) {
        assert_eq!(self.g, other.g, "genus mismatch");
        assert_eq!(self.degree, other.degree, "degree mismatch");
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: &Rational, other: &Tensor) -> Tensor {
        self.check_same(other);
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (a, b) = (&self.terms, &other.terms);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, c * &b[j].1));
                j += 1;
            } else {
                let v = &a[i].1 + &(c * &b[j].1);
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        Tensor { g: self.g, degree: self.degree, terms: out }
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        self.axpy(&Rational::one(), other)
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        self.axpy(&-Rational::one(), other)
    }

    pub fn scale(&self, c: &Rational) -> Tensor {
        if c.is_zero() {
            return Tensor::zero(self.g, self.degree);
        }
        Tensor {
            g: self.g,
            degree: self.degree,
            terms: self.terms.iter().map(|(w, x)| (*w, x * c)).collect(),
        }
    }

    pub fn neg(&self) -> Tensor {
        self.scale(&-Rational::one())
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &Tensor) -> Tensor {
        assert_eq!(self.g, other.g, "genus mismatch");
        let degree = self.degree + other.degree;
        assert!(degree <= MAX_DEGREE, "degree {degree} exceeds {MAX_DEGREE}");
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                terms.push((concat(*a, *b, other.degree), x * y));
            }
        }
        // Concatenation preserves lexicographic order.
        Tensor { g: self.g, degree, terms }
    }

    /// Commutator `self ⊗ other − other ⊗ self` in the tensor algebra.
    pub fn bracket(&self, other: &Tensor) -> Tensor {
        let ab = self.tensor(other);
        let ba = other.tensor(self);
        ab.sub(&ba)
    }

    /// Place permutation: the factor at position `i` moves to position `s[i]`
    /// (positions are 0-based). `permute(permute(t, a), b) == permute(t, b∘a)`.
    pub fn permute(&self, s: &[usize]) -> Result<Tensor> {
        let n = self.degree;
        check_permutation(s, n)?;
        let mut m = TermMap::new();
        for (w, c) in &self.terms {
            m.add(permute_word(*w, n, s), c.clone());
        }
        Ok(m.finish(self.g, n))
    }

    /// Applies μ to factors `i < j` (0-based), keeping the others in order.
    pub fn contract(&self, i: usize, j: usize) -> Result<Tensor> {
        let n = self.degree;
        if !(i < j && j < n) {
            return Err(Error::InvalidArgument(format!("contraction positions {i},{j} invalid for degree {n}")));
        }
        let mut m = TermMap::new();
        for (w, c) in &self.terms {
            let v = mu(letter_at(*w, n, i), letter_at(*w, n, j));
            if v != 0 {
                m.add(remove_two(*w, n, i, j), c * &Rational::from_int(v));
            }
        }
        Ok(m.finish(self.g, n - 2))
    }

    /// Leibniz extension of a letter map: every factor in turn is replaced by
    /// the image of its letter (all images must share one degree `d`).
    pub fn leibniz<F>(&self, d: usize, image: F) -> Tensor
    where
        F: Fn(Letter) -> Tensor,
    {
        let n = self.degree;
        let out_deg = n - 1 + d;
        assert!(n >= 1 && out_deg <= MAX_DEGREE, "degree out of range");
        let images: Vec<Tensor> = (0..self.g.rank() as Letter).map(&image).collect();
        let mut m = TermMap::new();
        for (w, c) in &self.terms {
            for pos in 0..n {
                let img = &images[letter_at(*w, n, pos) as usize];
                debug_assert!(img.is_zero() || img.degree == d);
                let prefix = subword(*w, n, 0, pos);
                let suffix_len = n - pos - 1;
                let suffix = subword(*w, n, pos + 1, suffix_len);
                for (iw, ic) in &img.terms {
                    let word = concat(concat(prefix, *iw, d), suffix, suffix_len);
                    m.add(word, c * ic);
                }
            }
        }
        m.finish(self.g, out_deg)
    }

    /// Terms as sparse-vector entries keyed by packed word.
    pub fn entries(&self) -> Vec<(usize, Rational)> {
        self.terms.iter().map(|(w, c)| (*w as usize, c.clone())).collect()
    }

    pub fn from_entries(g: Genus, degree: usize, entries: &[(usize, Rational)]) -> Tensor {
        Tensor::from_terms(g, degree, entries.iter().map(|(w, c)| (*w as Word, c.clone())))
    }

    /// Parses "x1.y1" style words into a tensor with the given coefficients.
    pub fn parse_terms(g: Genus, items: &[(&str, Rational)]) -> Result<Tensor> {
        let mut degree = None;
        let mut m = TermMap::new();
        for (word, c) in items {
            let letters = word.split('.').map(|s| parse_letter(s, g)).collect::<Result<Vec<_>>>()?;
            match degree {
                None => degree = Some(letters.len()),
                Some(d) if d != letters.len() => {
                    return Err(Error::DegreeMismatch { expected: d, found: letters.len() })
                }
                _ => {}
            }
            m.add(pack(&letters), c.clone());
        }
        Ok(m.finish(g, degree.unwrap_or(0)))
    }

    /// Word-name to coefficient map in lexicographic word order.
    pub fn to_named(&self) -> BTreeMap<String, String> {
        self.terms.iter().map(|(w, c)| (word_name(*w, self.degree), c.to_string())).collect()
    }
}

impl Serialize for Tensor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.terms.len()))?;
        for (w, c) in &self.terms {
            map.serialize_entry(&word_name(*w, self.degree), &c.to_string())?;
        }
        map.end()
    }
}

impl fmt::Display for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            let neg = c.signum() < 0;
            let abs = c.abs();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if !abs.is_one() {
                write!(f, "{abs}*")?;
            }
            if self.degree == 0 {
                write!(f, "1")?;
            } else {
                write!(f, "{}", word_name(*w, self.degree))?;
            }
        }
        Ok(())
    }
}

pub fn check_permutation(s: &[usize], n: usize) -> Result<()> {
    if s.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: s.len() });
    }
    let mut seen = vec![false; n];
    for &t in s {
        if t >= n || seen[t] {
            return Err(Error::InvalidArgument(format!("{s:?} is not a permutation of 0..{n}")));
        }
        seen[t] = true;
    }
    Ok(())
}

/// Moves the letter at position `i` to position `s[i]`.
#[inline]
pub fn permute_word(w: Word, n: usize, s: &[usize]) -> Word {
    let mut out = 0;
    for (i, &t) in s.iter().enumerate() {
        out |= (letter_at(w, n, i) as Word) << (4 * (n - 1 - t));
    }
    out
}

/// Drops positions `i < j` from an `n`-letter word.
#[inline]
pub fn remove_two(w: Word, n: usize, i: usize, j: usize) -> Word {
    let a = subword(w, n, 0, i);
    let b = subword(w, n, i + 1, j - i - 1);
    let c = subword(w, n, j + 1, n - j - 1);
    concat(concat(a, b, j - i - 1), c, n - j - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::BasisVector;

    fn g(n: usize) -> Genus {
        Genus::new(n).unwrap()
    }

    fn x(i: usize) -> Letter {
        BasisVector::x(i).letter()
    }

    fn y(i: usize) -> Letter {
        BasisVector::y(i).letter()
    }

    #[test]
    fn omega_shape_and_self_contraction() {
        for n in 1..=4 {
            let w = Tensor::omega(g(n));
            assert_eq!(w.len(), 2 * n);
            assert!(w.terms().iter().all(|(_, c)| c.abs().is_one()));
            let c = w.contract(0, 1).unwrap();
            assert_eq!(c, Tensor::scalar(g(n), Rational::from_int(2 * n as i64)));
        }
        assert_eq!(Tensor::omega(g(1)).to_string(), "x1.y1 - y1.x1");
    }

    #[test]
    fn contraction_examples() {
        let t = Tensor::basis(g(2), &[x(1), x(2), y(1)]);
        assert_eq!(t.contract(0, 2).unwrap(), Tensor::basis(g(2), &[x(2)]));
        let t = Tensor::basis(g(2), &[x(1), x(2), y(2)]);
        assert!(t.contract(0, 2).unwrap().is_zero());
        assert!(t.contract(2, 1).is_err());
    }

    #[test]
    fn permutation_examples() {
        let t = Tensor::basis(g(1), &[x(1), y(1)]);
        assert_eq!(t.permute(&[1, 0]).unwrap(), Tensor::basis(g(1), &[y(1), x(1)]));
        assert_eq!(t.permute(&[0, 1]).unwrap(), t);
        let w = Tensor::omega(g(2));
        assert_eq!(w.permute(&[1, 0]).unwrap(), w.neg());
        assert!(t.permute(&[0, 0]).is_err());
    }

    #[test]
    fn permutation_composition() {
        let t = Tensor::basis(g(3), &[x(1), y(2), x(3), y(1)]);
        let a = [1, 2, 3, 0];
        let b = [2, 0, 3, 1];
        let ba: Vec<usize> = a.iter().map(|&i| b[i]).collect();
        assert_eq!(t.permute(&a).unwrap().permute(&b).unwrap(), t.permute(&ba).unwrap());
    }

    #[test]
    fn bracket_and_leibniz() {
        let a = Tensor::basis(g(1), &[x(1)]);
        let b = Tensor::basis(g(1), &[y(1)]);
        assert_eq!(a.bracket(&b), Tensor::omega(g(1)));
        assert!(a.bracket(&a).is_zero());
        // Identity letter map reproduces degree times the tensor.
        let t = Tensor::omega(g(2));
        let d = t.leibniz(1, |l| Tensor::basis(g(2), &[l]));
        assert_eq!(d, t.scale(&Rational::from_int(2)));
    }

    #[test]
    fn word_helpers() {
        let w = pack(&[1, 2, 3, 4, 5]);
        assert_eq!(subword(w, 5, 1, 3), pack(&[2, 3, 4]));
        assert_eq!(remove_two(w, 5, 1, 3), pack(&[1, 3, 5]));
        assert_eq!(word_name(pack(&[0, 1, 2]), 3), "x1.y1.x2");
        assert_eq!(word_weight(pack(&[0, 1, 2]), 3, 2), vec![0, 1]);
    }
}
