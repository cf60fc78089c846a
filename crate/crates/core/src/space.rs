//! Derived carriers: Λ³H, U = Λ³H/H, S^mH and exterior powers of these.
//!
//! Elements are stored in quotient-canonical form (sorted letters inside
//! exterior and symmetric factors), never as antisymmetrized tensors; the
//! `embed` and `project` maps connect them to pure tensor powers.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rustc_hash::FxHashMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::Echelon;
use crate::rational::Rational;
use crate::symplectic::{letter_name, mu, Genus, Letter};
use crate::tensor::{pack, Tensor, TermMap};

/// One factor of a tensor space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    H,
    Wedge3,
    /// Coordinates in the fixed complement of H inside Λ³H.
    U,
    Sym(usize),
    Ext(usize, Box<Factor>),
}

impl Factor {
    pub fn ext(m: usize, f: Factor) -> Factor {
        Factor::Ext(m, Box::new(f))
    }

    /// Number of stored symbols in one basis word of this factor.
    pub fn word_len(&self) -> usize {
        match self {
            Factor::H | Factor::U => 1,
            Factor::Wedge3 => 3,
            Factor::Sym(m) => *m,
            Factor::Ext(m, f) => m * f.word_len(),
        }
    }

    /// Number of H letters a word expands to under the embedding.
    pub fn tensor_degree(&self) -> Option<usize> {
        match self {
            Factor::H => Some(1),
            Factor::Wedge3 => Some(3),
            Factor::U => None,
            Factor::Sym(m) => Some(*m),
            Factor::Ext(m, f) => f.tensor_degree().map(|d| m * d),
        }
    }

    pub fn dimension(&self, g: Genus) -> u128 {
        let n = g.rank() as u128;
        match self {
            Factor::H => n,
            Factor::Wedge3 => binom(n, 3),
            Factor::U => binom(n, 3).saturating_sub(n),
            Factor::Sym(m) => binom(n + *m as u128 - 1, *m as u128),
            Factor::Ext(m, f) => binom(f.dimension(g), *m as u128),
        }
    }

    /// Canonical form of one word segment and the accompanying sign.
    fn canonicalize(&self, w: &mut [u16]) -> i64 {
        match self {
            Factor::H | Factor::U => 1,
            Factor::Wedge3 => sort_with_sign(w),
            Factor::Sym(_) => {
                w.sort_unstable();
                1
            }
            Factor::Ext(m, f) => {
                let l = f.word_len();
                let mut sign = 1;
                let mut blocks: Vec<Vec<u16>> = Vec::with_capacity(*m);
                for b in w.chunks_mut(l) {
                    sign *= f.canonicalize(b);
                    if sign == 0 {
                        return 0;
                    }
                    blocks.push(b.to_vec());
                }
                sign *= sort_with_sign(&mut blocks);
                if sign != 0 {
                    for (i, b) in blocks.into_iter().enumerate() {
                        w[i * l..(i + 1) * l].copy_from_slice(&b);
                    }
                }
                sign
            }
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::H => write!(f, "H"),
            Factor::Wedge3 => write!(f, "L3H"),
            Factor::U => write!(f, "U"),
            Factor::Sym(m) => write!(f, "S{m}H"),
            Factor::Ext(m, inner) => write!(f, "L{m}({inner})"),
        }
    }
}

pub fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Sorts in place; returns the permutation sign, or 0 on a repeated item.
pub fn sort_with_sign<T: Ord>(v: &mut [T]) -> i64 {
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

/// A tensor product of factors at a fixed genus.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TensorSpace {
    pub genus: Genus,
    pub shape: Vec<Factor>,
}

impl TensorSpace {
    pub fn new(genus: Genus, shape: Vec<Factor>) -> Self {
        TensorSpace { genus, shape }
    }

    pub fn wedge3(g: Genus) -> Self {
        Self::new(g, vec![Factor::Wedge3])
    }

    pub fn u(g: Genus) -> Self {
        Self::new(g, vec![Factor::U])
    }

    pub fn h(g: Genus) -> Self {
        Self::new(g, vec![Factor::H])
    }

    pub fn sym(g: Genus, m: usize) -> Self {
        Self::new(g, vec![Factor::Sym(m)])
    }

    pub fn word_len(&self) -> usize {
        self.shape.iter().map(|f| f.word_len()).sum()
    }

    pub fn dimension(&self) -> u128 {
        self.shape.iter().map(|f| f.dimension(self.genus)).product()
    }

    pub fn tensor_degree(&self) -> Option<usize> {
        self.shape.iter().map(|f| f.tensor_degree()).sum()
    }

    /// Canonical form of a raw word, with sign (0 if the word vanishes).
    pub fn canonicalize(&self, mut w: Vec<u16>) -> (Vec<u16>, i64) {
        let mut sign = 1;
        let mut start = 0;
        for f in &self.shape {
            let l = f.word_len();
            sign *= f.canonicalize(&mut w[start..start + l]);
            if sign == 0 {
                return (w, 0);
            }
            start += l;
        }
        (w, sign)
    }
}

impl fmt::Display for TensorSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.shape.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join("(x)"))
    }
}

/// An element of a derived tensor space, keyed by canonical words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceTensor {
    space: TensorSpace,
    terms: BTreeMap<Vec<u16>, Rational>,
}

impl SpaceTensor {
    pub fn zero(space: TensorSpace) -> Self {
        SpaceTensor { space, terms: BTreeMap::new() }
    }

    /// Builds an element from raw (possibly non-canonical) words.
    pub fn from_raw<I>(space: TensorSpace, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u16>, Rational)>,
    {
        let mut t = SpaceTensor::zero(space);
        for (w, c) in terms {
            t.add_raw(w, c);
        }
        t
    }

    pub fn add_raw(&mut self, w: Vec<u16>, c: Rational) {
        debug_assert_eq!(w.len(), self.space.word_len());
        if c.is_zero() {
            return;
        }
        let (w, s) = self.space.canonicalize(w);
        if s == 0 {
            return;
        }
        let c = if s < 0 { -c } else { c };
        let e = self.terms.entry(w.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn space(&self) -> &TensorSpace {
        &self.space
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u16>, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &[u16]) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn axpy(&self, c: &Rational, other: &SpaceTensor) -> SpaceTensor {
        assert_eq!(self.space, other.space, "space mismatch");
        let mut out = self.clone();
        for (w, x) in &other.terms {
            let e = out.terms.entry(w.clone()).or_insert_with(Rational::zero);
            *e += x * c;
            if e.is_zero() {
                out.terms.remove(w);
            }
        }
        out
    }

    pub fn add(&self, other: &SpaceTensor) -> SpaceTensor {
        self.axpy(&Rational::one(), other)
    }

    pub fn sub(&self, other: &SpaceTensor) -> SpaceTensor {
        self.axpy(&-Rational::one(), other)
    }

    pub fn scale(&self, c: &Rational) -> SpaceTensor {
        if c.is_zero() {
            return SpaceTensor::zero(self.space.clone());
        }
        SpaceTensor {
            space: self.space.clone(),
            terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect(),
        }
    }

    /// Wedge product inside an exterior power: `self ∧ other` where both live
    /// in Λ^a(F), Λ^b(F) and the result in Λ^{a+b}(F).
    pub fn wedge(&self, other: &SpaceTensor) -> Result<SpaceTensor> {
        let (Some(Factor::Ext(a, f)), Some(Factor::Ext(b, f2))) = (self.space.shape.first(), other.space.shape.first())
        else {
            return Err(Error::InvalidArgument("wedge needs exterior-power spaces".into()));
        };
        if f != f2 || self.space.shape.len() != 1 || other.space.shape.len() != 1 {
            return Err(Error::InvalidArgument("wedge factors differ".into()));
        }
        let space = TensorSpace::new(self.space.genus, vec![Factor::Ext(a + b, f.clone())]);
        let mut out = SpaceTensor::zero(space);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.add_raw(w, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Signed sum over all orderings: each exterior factor is fully
    /// antisymmetrized and each symmetric factor symmetrized, with no 1/m!
    /// normalizers. U factors are not embeddable.
    pub fn embed(&self) -> Result<Tensor> {
        let deg = self.space.tensor_degree().ok_or_else(|| Error::InvalidArgument("U factors cannot be embedded".into()))?;
        let mut m = TermMap::new();
        for (w, c) in &self.terms {
            let mut start = 0;
            let mut partial: Vec<(Vec<Letter>, i64)> = vec![(Vec::new(), 1)];
            for f in &self.space.shape {
                let l = f.word_len();
                let expanded = expand_factor(f, &w[start..start + l]);
                start += l;
                let mut next = Vec::with_capacity(partial.len() * expanded.len());
                for (p, s) in &partial {
                    for (e, t) in &expanded {
                        let mut v = p.clone();
                        v.extend_from_slice(e);
                        next.push((v, s * t));
                    }
                }
                partial = next;
            }
            for (letters, s) in partial {
                m.add(pack(&letters), c * &Rational::from_int(s));
            }
        }
        Ok(m.finish(self.space.genus, deg))
    }

    /// The natural projection from a pure tensor power: each tensor word is
    /// grouped into the space's factors and canonicalized.
    pub fn project(space: &TensorSpace, t: &Tensor) -> Result<SpaceTensor> {
        let deg = space.tensor_degree().ok_or_else(|| Error::InvalidArgument("cannot project onto U factors".into()))?;
        if deg != t.degree() || deg != space.word_len() {
            return Err(Error::DegreeMismatch { expected: deg, found: t.degree() });
        }
        let mut out = SpaceTensor::zero(space.clone());
        for (w, c) in t.terms() {
            let letters: Vec<u16> = crate::tensor::unpack(*w, deg).into_iter().map(u16::from).collect();
            out.add_raw(letters, c.clone());
        }
        Ok(out)
    }

    /// Applies a linear map to each block of an exterior power Λ^m(F),
    /// producing an element of Λ^m(F').
    pub fn map_ext_blocks<F>(&self, target: Factor, f: F) -> Result<SpaceTensor>
    where
        F: Fn(&[u16]) -> Vec<(Vec<u16>, Rational)>,
    {
        let Some(Factor::Ext(m, inner)) = self.space.shape.first() else {
            return Err(Error::InvalidArgument("expected an exterior power".into()));
        };
        let l = inner.word_len();
        let space = TensorSpace::new(self.space.genus, vec![Factor::Ext(*m, Box::new(target))]);
        let mut out = SpaceTensor::zero(space);
        for (w, c) in &self.terms {
            let mut partial: Vec<(Vec<u16>, Rational)> = vec![(Vec::new(), c.clone())];
            for b in w.chunks(l) {
                let img = f(b);
                let mut next = Vec::with_capacity(partial.len() * img.len());
                for (p, x) in &partial {
                    for (e, y) in &img {
                        let mut v = p.clone();
                        v.extend_from_slice(e);
                        next.push((v, x * y));
                    }
                }
                partial = next;
            }
            for (v, x) in partial {
                out.add_raw(v, x);
            }
        }
        Ok(out)
    }

    pub fn word_string(&self, w: &[u16]) -> String {
        let mut parts = Vec::new();
        let mut start = 0;
        for f in &self.space.shape {
            let l = f.word_len();
            parts.push(factor_word_string(f, &w[start..start + l], self.space.genus));
            start += l;
        }
        parts.join("|")
    }

    pub fn to_named(&self) -> BTreeMap<String, String> {
        self.terms.iter().map(|(w, c)| (self.word_string(w), c.to_string())).collect()
    }
}

impl Serialize for SpaceTensor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_named().serialize(s)
    }
}

fn factor_word_string(f: &Factor, w: &[u16], g: Genus) -> String {
    let name = |l: u16| letter_name(l as Letter);
    match f {
        Factor::H => name(w[0]),
        Factor::U => {
            let data = u_data(g);
            let b = data.complement[w[0] as usize];
            format!("[{}]", b.iter().map(|&l| letter_name(l)).collect::<Vec<_>>().join("^"))
        }
        Factor::Wedge3 => w.iter().map(|&l| name(l)).collect::<Vec<_>>().join("^"),
        Factor::Sym(_) => w.iter().map(|&l| name(l)).collect::<Vec<_>>().join("*"),
        Factor::Ext(_, inner) => {
            let l = inner.word_len();
            let blocks: Vec<String> = w.chunks(l).map(|b| factor_word_string(inner, b, g)).collect();
            if l == 1 {
                blocks.join("^")
            } else {
                blocks.iter().map(|b| format!("({b})")).collect::<Vec<_>>().join("^")
            }
        }
    }
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn rec(k: usize, p: &mut Vec<usize>, sign: i64, out: &mut Vec<(Vec<usize>, i64)>) {
        if k == p.len() {
            out.push((p.clone(), sign));
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            rec(k + 1, p, if i == k { sign } else { -sign }, out);
            p.swap(k, i);
        }
    }
    rec(0, &mut p, 1, &mut out);
    out
}

/// All signed letter sequences a canonical factor word expands to.
fn expand_factor(f: &Factor, w: &[u16]) -> Vec<(Vec<Letter>, i64)> {
    match f {
        Factor::H => vec![(vec![w[0] as Letter], 1)],
        Factor::U => unreachable!("U has no tensor embedding"),
        Factor::Wedge3 => permutations(3)
            .into_iter()
            .map(|(p, s)| (p.iter().map(|&i| w[i] as Letter).collect(), s))
            .collect(),
        Factor::Sym(m) => permutations(*m)
            .into_iter()
            .map(|(p, _)| (p.iter().map(|&i| w[i] as Letter).collect(), 1))
            .collect(),
        Factor::Ext(m, inner) => {
            let l = inner.word_len();
            let blocks: Vec<Vec<(Vec<Letter>, i64)>> = w.chunks(l).map(|b| expand_factor(inner, b)).collect();
            let mut out = Vec::new();
            for (p, s) in permutations(*m) {
                let mut partial: Vec<(Vec<Letter>, i64)> = vec![(Vec::new(), s)];
                for &bi in &p {
                    let mut next = Vec::new();
                    for (pre, ps) in &partial {
                        for (e, es) in &blocks[bi] {
                            let mut v = pre.clone();
                            v.extend_from_slice(e);
                            next.push((v, ps * es));
                        }
                    }
                    partial = next;
                }
                out.extend(partial);
            }
            out
        }
    }
}

/// ω₀ in wedge form, Σ x_i ∧ y_i ∈ Λ²H.
pub fn omega_wedge(g: Genus) -> SpaceTensor {
    let space = TensorSpace::new(g, vec![Factor::ext(2, Factor::H)]);
    SpaceTensor::from_raw(
        space,
        (0..g.get() as u16).map(|i| (vec![2 * i, 2 * i + 1], Rational::one())),
    )
}

/// Antisymmetrizes an element of H^{⊗3} into Λ³H (word-wise canonical form).
pub fn project_wedge3(t: &Tensor) -> Result<SpaceTensor> {
    SpaceTensor::project(&TensorSpace::wedge3(t.genus()), t)
}

/// Λ³H → H^{⊗3} by the signed sum over all six orderings.
pub fn embed_wedge3(t: &SpaceTensor) -> Result<Tensor> {
    t.embed()
}

/// u ↦ u ∧ ω₀ with ω₀ read in wedge form.
pub fn embed_h_in_wedge3(u: &Tensor) -> Result<SpaceTensor> {
    if u.degree() != 1 {
        return Err(Error::DegreeMismatch { expected: 1, found: u.degree() });
    }
    let g = u.genus();
    let mut out = SpaceTensor::zero(TensorSpace::wedge3(g));
    if g.get() == 1 {
        log::warn!("genus one: Λ³H is zero, so u∧ω₀ vanishes");
        return Ok(out);
    }
    for (w, c) in u.terms() {
        for i in 0..g.get() as u16 {
            out.add_raw(vec![*w as u16, 2 * i, 2 * i + 1], c.clone());
        }
    }
    Ok(out)
}

/// The contraction C: Λ³H → H,
/// C(u∧v∧w) = 2[μ(u,v)w − μ(u,w)v + μ(v,w)u].
///
/// The factor 2 is what makes C(u∧ω₀) = (2g−2)u, so that q kills H.
pub fn contract_wedge3(t: &SpaceTensor) -> Result<Tensor> {
    if t.space().shape != vec![Factor::Wedge3] {
        return Err(Error::InvalidArgument("contraction expects an element of Λ³H".into()));
    }
    let g = t.space().genus;
    let mut m = TermMap::new();
    for (w, c) in t.terms() {
        let (u, v, x) = (w[0] as Letter, w[1] as Letter, w[2] as Letter);
        let two = Rational::from_int(2);
        m.add(x as u64, c * &two * Rational::from_int(mu(u, v)));
        m.add(v as u64, c * &two * Rational::from_int(-mu(u, x)));
        m.add(u as u64, c * &two * Rational::from_int(mu(v, x)));
    }
    Ok(m.finish(g, 1))
}

/// q(ξ) = ξ − C(ξ)∧ω₀ / (2g−2): the equivariant projection of Λ³H that kills H.
pub fn q_map(t: &SpaceTensor) -> Result<SpaceTensor> {
    let g = t.space().genus;
    if g.get() < 2 {
        return Err(Error::InvalidArgument("q-map needs g >= 2".into()));
    }
    let c = contract_wedge3(t)?;
    let lifted = embed_h_in_wedge3(&c)?;
    Ok(t.axpy(&Rational::new(-1, 2 * g.get() as i64 - 2), &lifted))
}

/// Fixed data for U = Λ³H / H at one genus.
#[derive(Debug)]
pub struct UData {
    pub genus: Genus,
    /// All canonical Λ³H words in lexicographic order.
    pub wedge_words: Vec<[Letter; 3]>,
    /// Lexicographically least words completing the image of H.
    pub complement: Vec<[Letter; 3]>,
    /// U-coordinates of every Λ³H basis word.
    projection: FxHashMap<[Letter; 3], Vec<(u16, Rational)>>,
}

impl UData {
    fn build(g: Genus) -> UData {
        let n = g.rank() as Letter;
        let mut wedge_words = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    wedge_words.push([a, b, c]);
                }
            }
        }
        let index: FxHashMap<[Letter; 3], usize> = wedge_words.iter().enumerate().map(|(i, w)| (*w, i)).collect();
        let to_entries = |t: &SpaceTensor| -> Vec<(usize, Rational)> {
            t.terms()
                .iter()
                .map(|(w, c)| (index[&[w[0] as Letter, w[1] as Letter, w[2] as Letter]], c.clone()))
                .collect()
        };
        let mut ech = Echelon::tracking();
        let h_count = if g.get() >= 2 { g.rank() } else { 0 };
        for l in 0..h_count as Letter {
            let img = embed_h_in_wedge3(&Tensor::basis(g, &[l])).expect("degree one");
            ech.insert_entries(&to_entries(&img));
        }
        let mut complement = Vec::new();
        let mut tag_to_u: FxHashMap<usize, u16> = FxHashMap::default();
        for (i, w) in wedge_words.iter().enumerate() {
            let tag = ech.inserted();
            if ech.insert_entries(&[(i, Rational::one())]) == crate::linalg::Insert::Independent {
                tag_to_u.insert(tag, complement.len() as u16);
                complement.push(*w);
            }
        }
        let mut projection = FxHashMap::default();
        for (i, w) in wedge_words.iter().enumerate() {
            let coords = ech.coordinates(&[(i, Rational::one())]).expect("spanning set");
            let mut v: Vec<(u16, Rational)> =
                coords.into_iter().filter_map(|(t, c)| tag_to_u.get(&t).map(|&u| (u, c))).collect();
            v.sort_by_key(|e| e.0);
            projection.insert(*w, v);
        }
        UData { genus: g, wedge_words, complement, projection }
    }

    pub fn dimension(&self) -> usize {
        self.complement.len()
    }

    pub fn project_word(&self, w: [Letter; 3]) -> &[(u16, Rational)] {
        &self.projection[&w]
    }
}

/// Cached U data for a genus.
pub fn u_data(g: Genus) -> Arc<UData> {
    static CACHE: OnceLock<Mutex<FxHashMap<usize, Arc<UData>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(FxHashMap::default()));
    if let Some(d) = cache.lock().expect("cache lock").get(&g.get()) {
        return d.clone();
    }
    let d = Arc::new(UData::build(g));
    cache.lock().expect("cache lock").entry(g.get()).or_insert(d).clone()
}

fn project_u_block(data: &UData, b: &[u16]) -> Vec<(Vec<u16>, Rational)> {
    data.project_word([b[0] as Letter, b[1] as Letter, b[2] as Letter])
        .iter()
        .map(|(u, c)| (vec![*u], c.clone()))
        .collect()
}

/// Λ³H → U: coordinates in the fixed complement of the image of H.
pub fn project_u(t: &SpaceTensor) -> Result<SpaceTensor> {
    let g = t.space().genus;
    if g.get() < 2 {
        return Err(Error::InvalidArgument("U needs g >= 2".into()));
    }
    if t.space().shape != vec![Factor::Wedge3] {
        return Err(Error::InvalidArgument("project_u expects an element of Λ³H".into()));
    }
    let data = u_data(g);
    let mut out = SpaceTensor::zero(TensorSpace::u(g));
    for (w, c) in t.terms() {
        for (v, x) in project_u_block(&data, w) {
            out.add_raw(v, c * &x);
        }
    }
    Ok(out)
}

/// Λ^m(Λ³H) → Λ^m(U), applying `project_u` to every block.
pub fn project_u_ext(t: &SpaceTensor) -> Result<SpaceTensor> {
    let g = t.space().genus;
    if g.get() < 2 {
        return Err(Error::InvalidArgument("U needs g >= 2".into()));
    }
    let data = u_data(g);
    t.map_ext_blocks(Factor::U, |b| project_u_block(&data, b))
}

/// The equivariant section U → Λ³H: a complement word maps to its q-image.
fn u_section_block(g: Genus, data: &UData, b: &[u16]) -> Vec<(Vec<u16>, Rational)> {
    let w = data.complement[b[0] as usize];
    let basis = SpaceTensor::from_raw(
        TensorSpace::wedge3(g),
        [(w.iter().map(|&l| l as u16).collect(), Rational::one())],
    );
    q_map(&basis).expect("g >= 2").terms().iter().map(|(w, c)| (w.clone(), c.clone())).collect()
}

/// Λ^m(U) → Λ^m(Λ³H) through the q-section on every block.
pub fn u_section_ext(t: &SpaceTensor) -> Result<SpaceTensor> {
    let g = t.space().genus;
    if g.get() < 2 {
        return Err(Error::InvalidArgument("U needs g >= 2".into()));
    }
    let data = u_data(g);
    t.map_ext_blocks(Factor::Wedge3, |b| u_section_block(g, &data, b))
}

/// Rank of a family of space tensors living in one space.
pub fn space_rank(ts: &[SpaceTensor]) -> Result<usize> {
    let mut index: BTreeMap<Vec<u16>, usize> = BTreeMap::new();
    for t in ts {
        for w in t.terms().keys() {
            let n = index.len();
            index.entry(w.clone()).or_insert(n);
        }
    }
    let cols: Vec<crate::linalg::SparseVector> = ts
        .iter()
        .map(|t| {
            let mut e: Vec<(usize, Rational)> = t.terms().iter().map(|(w, c)| (index[w], c.clone())).collect();
            e.sort_by_key(|x| x.0);
            crate::linalg::SparseVector::from_entries(index.len(), e)
        })
        .collect::<Result<_>>()?;
    crate::linalg::rank(&crate::linalg::SparseMatrix::from_columns(index.len(), cols)?)
}
