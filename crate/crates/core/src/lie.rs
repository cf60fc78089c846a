//! The free Lie algebra on H inside the tensor algebra, the ideal generated
//! by ω₀, and the surface quotient.

use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::subspace::{GradedSubspace, Label};
use crate::symplectic::{Genus, Letter};
use crate::tensor::{letter_at, pack, permute_word, Tensor, TermMap, Word};

/// The place permutation σ_i (1-based `i`): the factor at position i moves
/// to the front and the factors before it shift one place right.
pub fn sigma(i: usize, n: usize) -> Vec<usize> {
    assert!(i >= 1 && i <= n);
    (0..n)
        .map(|p| if p + 1 == i { 0 } else if p + 1 < i { p + 1 } else { p })
        .collect()
}

/// p_k = (1−σ_k)(1−σ_{k−1})⋯(1−σ₂) as a signed list of place permutations.
#[derive(Clone, Debug)]
pub struct LieProjector {
    pub k: usize,
    pub terms: Vec<(Vec<usize>, i64)>,
}

impl LieProjector {
    pub fn new(k: usize) -> Self {
        let mut terms: Vec<(Vec<usize>, i64)> = vec![((0..k).collect(), 1)];
        for i in 2..=k {
            let s = sigma(i, k);
            let extra: Vec<(Vec<usize>, i64)> = terms
                .iter()
                .map(|(p, c)| (p.iter().map(|&x| s[x]).collect(), -c))
                .collect();
            terms.extend(extra);
        }
        LieProjector { k, terms }
    }

    /// Applies p_k; `t` must have degree k.
    pub fn apply(&self, t: &Tensor) -> Result<Tensor> {
        if t.degree() != self.k {
            return Err(Error::DegreeMismatch { expected: self.k, found: t.degree() });
        }
        Ok(apply_lie_projector(t))
    }
}

/// Applies p_k to a degree-k tensor by the factored form, one (1−σ_i) at a time.
pub fn apply_lie_projector(t: &Tensor) -> Tensor {
    let k = t.degree();
    let mut cur = t.clone();
    for i in 2..=k {
        let s = sigma(i, k);
        let mut m = TermMap::new();
        for (w, c) in cur.terms() {
            m.add(*w, c.clone());
            m.add(permute_word(*w, k, &s), -c);
        }
        cur = m.finish(t.genus(), k);
    }
    cur
}

/// Applies `1 ⊗ … ⊗ 1 ⊗ p_m` to the last `m` factors of a tensor.
pub fn apply_lie_projector_tail(t: &Tensor, m: usize) -> Tensor {
    let n = t.degree();
    assert!(m <= n);
    let off = n - m;
    let mut cur = t.clone();
    for i in 2..=m {
        let local = sigma(i, m);
        let s: Vec<usize> = (0..n).map(|p| if p < off { p } else { off + local[p - off] }).collect();
        let mut acc = TermMap::new();
        for (w, c) in cur.terms() {
            acc.add(*w, c.clone());
            acc.add(permute_word(*w, n, &s), -c);
        }
        cur = acc.finish(t.genus(), n);
    }
    cur
}

/// p_k t = k t, the characterization of Lie elements.
pub fn is_lie_element(t: &Tensor) -> bool {
    let k = t.degree();
    if k == 0 {
        return t.is_zero();
    }
    apply_lie_projector(t) == t.scale(&Rational::from_int(k as i64))
}

fn mobius(n: usize) -> i64 {
    let mut n = n;
    let mut res = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            res = -res;
        }
        p += 1;
    }
    if n > 1 {
        res = -res;
    }
    res
}

fn divisors(k: usize) -> Vec<usize> {
    (1..=k).filter(|d| k % d == 0).collect()
}

/// Witt number (1/k) Σ_{d|k} μ(d) n^{k/d}.
pub fn witt(n: u64, k: usize) -> u128 {
    let mut s: i128 = 0;
    for d in divisors(k) {
        s += mobius(d) as i128 * (n as i128).pow((k / d) as u32);
    }
    (s / k as i128) as u128
}

/// dim L(k) for the free Lie algebra on H of rank 2g.
pub fn lie_dimension(k: usize, g: usize) -> u128 {
    witt(2 * g as u64, k)
}

/// dim L_g(k) for the one-relator quotient by ω₀, from Labute's formula
/// (1/k) Σ_{d|k} μ(k/d) s_d with s_d = 2g s_{d−1} − s_{d−2}, s_0 = 2, s_1 = 2g.
pub fn surface_lie_dimension(k: usize, g: usize) -> u128 {
    let mut s: Vec<i128> = vec![2, 2 * g as i128];
    for d in 2..=k {
        let v = 2 * g as i128 * s[d - 1] - s[d - 2];
        s.push(v);
    }
    let mut total: i128 = 0;
    for d in divisors(k) {
        total += mobius(k / d) as i128 * s[d];
    }
    (total / k as i128) as u128
}

/// dim I(k) = dim L(k) − dim L_g(k).
pub fn ideal_dimension(k: usize, g: usize) -> u128 {
    if k < 2 {
        return 0;
    }
    lie_dimension(k, g) - surface_lie_dimension(k, g)
}

/// Lyndon words of length `k` over `n` letters, in lexicographic order
/// (Duval's algorithm).
pub fn lyndon_words(n: usize, k: usize) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    let mut w: Vec<i64> = vec![-1];
    while !w.is_empty() {
        let last = w.len() - 1;
        w[last] += 1;
        if w.len() == k {
            out.push(w.iter().map(|&x| x as Letter).collect());
        }
        let m = w.len();
        while w.len() < k {
            let x = w[w.len() - m];
            w.push(x);
        }
        while !w.is_empty() && *w.last().expect("nonempty") == n as i64 - 1 {
            w.pop();
        }
    }
    out
}

/// Number of Lyndon words, counted by the same generator without storing them.
pub fn count_lyndon_words(n: usize, k: usize) -> u64 {
    let mut count = 0;
    let mut w: Vec<i64> = vec![-1];
    while !w.is_empty() {
        let last = w.len() - 1;
        w[last] += 1;
        if w.len() == k {
            count += 1;
        }
        let m = w.len();
        while w.len() < k {
            let x = w[w.len() - m];
            w.push(x);
        }
        while !w.is_empty() && *w.last().expect("nonempty") == n as i64 - 1 {
            w.pop();
        }
    }
    count
}

fn is_lyndon(w: &[Letter]) -> bool {
    (1..w.len()).all(|i| w[i..] > *w)
}

/// Standard bracketing of a Lyndon word: [b(u), b(v)] with v the longest
/// proper Lyndon suffix.
pub fn standard_bracket(g: Genus, w: &[Letter]) -> Tensor {
    if w.len() == 1 {
        return Tensor::basis(g, w);
    }
    let split = (1..w.len()).find(|&i| is_lyndon(&w[i..])).expect("a letter suffix is Lyndon");
    let a = standard_bracket(g, &w[..split]);
    let b = standard_bracket(g, &w[split..]);
    a.bracket(&b)
}

/// Lyndon-bracket basis of L(k) at genus g, kept as words and materialized
/// on demand (the full k = 8 bases are large).
#[derive(Clone, Debug)]
pub struct LieBasis {
    pub genus: Genus,
    pub degree: usize,
    pub words: Vec<Vec<Letter>>,
}

impl LieBasis {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn element(&self, i: usize) -> Tensor {
        standard_bracket(self.genus, &self.words[i])
    }

    /// Checks independence: every element's lexicographically least word is
    /// its Lyndon word with coefficient one, so the basis is triangular.
    pub fn certify(&self) -> bool {
        let ok = crate::exec::map_range(self.words.len(), |i| {
            let t = self.element(i);
            t.terms().first().is_some_and(|(w, c)| *w == pack(&self.words[i]) && c.is_one())
        });
        ok.into_iter().all(|b| b)
    }

    /// Materializes the basis as a certified [`GradedSubspace`].
    pub fn to_subspace(&self, budget: &Budget) -> Result<GradedSubspace> {
        budget.check_work(self.words.len() as u64 * (1 << (self.degree.saturating_sub(1))) as u64, "Lie basis")?;
        let elems = crate::exec::map_range(self.words.len(), |i| self.element(i));
        GradedSubspace::from_spanning(self.genus, self.degree, Label::Lie, elems)
    }
}

/// A basis of L(k) indexed by Lyndon words; cardinality equals the Witt number.
pub fn lie_basis(k: usize, g: Genus, budget: &Budget) -> Result<LieBasis> {
    if k == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    if k > 8 || (g.get() > 4 && k > 6) {
        return Err(Error::ResourceLimit(format!("Lie basis at k={k}, g={} exceeds the default bound", g.get())));
    }
    budget.check_work(lie_dimension(k, g.get()) as u64, "Lie basis")?;
    Ok(LieBasis { genus: g, degree: k, words: lyndon_words(g.rank(), k) })
}

/// Basis of the degree-k part of the ideal generated by ω₀:
/// I₂ = ⟨ω₀⟩ and I_{k+1} = span{[h, w]}.
pub fn ideal_basis(k: usize, g: Genus, budget: &Budget) -> Result<GradedSubspace> {
    if k < 2 {
        return Err(Error::InvalidArgument("the ideal starts in degree 2".into()));
    }
    let mut cur = GradedSubspace::from_spanning(g, 2, Label::Ideal, [Tensor::omega(g)])?;
    for d in 3..=k {
        budget.check_work((cur.dim() * g.rank()) as u64 * (1u64 << d.min(20)), "ideal basis")?;
        let gens: Vec<Tensor> = crate::exec::map_range(cur.dim() * g.rank(), |i| {
            let (b, l) = (i / g.rank(), (i % g.rank()) as Letter);
            Tensor::basis(g, &[l]).bracket(&cur.basis()[b])
        });
        cur = GradedSubspace::from_spanning(g, d, Label::Ideal, gens)?;
    }
    Ok(cur)
}

/// L_g(k) = L(k)/I(k) realized by a fixed complement of I(k) in L(k).
#[derive(Clone, Debug)]
pub struct SurfaceQuotient {
    pub ideal: GradedSubspace,
    /// Ideal basis followed by the complement, for coordinates.
    combined: GradedSubspace,
    pub complement: Vec<Tensor>,
}

impl SurfaceQuotient {
    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    /// Coordinates of a Lie element in the complement basis (the projection
    /// L(k) → L_g(k)); `None` if `t` is not in L(k).
    pub fn project(&self, t: &Tensor) -> Option<Vec<Rational>> {
        let c = self.combined.coordinates(t)?;
        Some(c[self.ideal.dim()..].to_vec())
    }

    pub fn subspace(&self) -> Result<GradedSubspace> {
        GradedSubspace::from_spanning(self.ideal.genus, self.ideal.degree, Label::SurfaceLie, self.complement.clone())
    }
}

pub fn quotient_lg(k: usize, g: Genus, budget: &Budget) -> Result<SurfaceQuotient> {
    let ideal = if k >= 2 { ideal_basis(k, g, budget)? } else { GradedSubspace::empty(g, k, Label::Ideal) };
    let lie = lie_basis(k, g, budget)?;
    let mut combined = GradedSubspace::from_spanning(g, k, Label::Custom, ideal.basis().iter().cloned())?;
    let mut complement = Vec::new();
    for i in 0..lie.len() {
        let t = lie.element(i);
        if combined.push(t.clone())? {
            complement.push(t);
        }
    }
    Ok(SurfaceQuotient { ideal, combined, complement })
}

#[derive(Clone, Debug, Serialize)]
pub struct LieDims {
    pub k: usize,
    pub g: usize,
    pub lie: u128,
    pub ideal: u128,
    pub surface: u128,
}

pub fn lie_dims(k: usize, g: usize) -> LieDims {
    LieDims { k, g, lie: lie_dimension(k, g), ideal: ideal_dimension(k, g), surface: surface_lie_dimension(k, g) }
}

/// Letters of a packed word (helper for callers working on Lyndon data).
pub fn word_letters(w: Word, n: usize) -> Vec<Letter> {
    (0..n).map(|i| letter_at(w, n, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g(n: usize) -> Genus {
        Genus::new(n).unwrap()
    }

    fn random_tensor(rng: &mut ChaCha8Rng, gg: Genus, k: usize, terms: usize) -> Tensor {
        let mut m = TermMap::new();
        for _ in 0..terms {
            let letters: Vec<Letter> = (0..k).map(|_| rng.gen_range(0..gg.rank() as Letter)).collect();
            m.add_int(pack(&letters), rng.gen_range(-3..=3));
        }
        m.finish(gg, k)
    }

    #[test]
    fn projector_examples() {
        let gg = g(1);
        let t = Tensor::basis(gg, &[0, 1]);
        assert_eq!(apply_lie_projector(&t), Tensor::omega(gg));
        assert!(apply_lie_projector(&Tensor::basis(gg, &[0, 0])).is_zero());
        let p = LieProjector::new(5);
        assert_eq!(p.terms.len(), 16);
        assert_eq!(p.terms[0], ((0..5).collect::<Vec<_>>(), 1));
    }

    #[test]
    fn projector_is_quasi_idempotent_on_random_tensors() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 2..=6 {
            for _ in 0..5 {
                let t = random_tensor(&mut rng, g(2), k, 6);
                let p = apply_lie_projector(&t);
                assert_eq!(apply_lie_projector(&p), p.scale(&Rational::from_int(k as i64)));
                assert!(is_lie_element(&p));
            }
        }
    }

    #[test]
    fn list_form_matches_factored_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 2..=5 {
            let t = random_tensor(&mut rng, g(2), k, 4);
            let p = LieProjector::new(k);
            let mut m = TermMap::new();
            for (s, c) in &p.terms {
                m.add_scaled(&t.permute(s).unwrap(), &Rational::from_int(*c));
            }
            assert_eq!(m.finish(g(2), k), p.apply(&t).unwrap());
        }
    }

    #[test]
    fn lie_element_examples() {
        assert!(is_lie_element(&Tensor::omega(g(3))));
        let s = Tensor::basis(g(1), &[0, 1]).add(&Tensor::basis(g(1), &[1, 0]));
        assert!(!is_lie_element(&s));
    }

    #[test]
    fn dimension_formulas() {
        assert_eq!(witt(6, 7), 39990);
        assert_eq!(witt(6, 8), 209790);
        assert_eq!(lie_dimension(2, 3), 15);
        assert_eq!(surface_lie_dimension(2, 3), 14);
        assert_eq!(surface_lie_dimension(1, 3), 6);
        for gg in 1..=3 {
            for k in 1..=6 {
                assert_eq!(count_lyndon_words(2 * gg, k) as u128, lie_dimension(k, gg));
            }
        }
    }

    #[test]
    fn lyndon_basis_is_certified() {
        let b = lie_basis(4, g(2), &Budget::default()).unwrap();
        assert_eq!(b.len() as u128, lie_dimension(4, 2));
        assert!(b.certify());
        for i in 0..b.len() {
            assert!(is_lie_element(&b.element(i)));
        }
        let one = lie_basis(1, g(3), &Budget::default()).unwrap();
        assert_eq!(one.len(), 6);
    }

    #[test]
    fn ideal_dimensions() {
        let b = Budget::default();
        assert_eq!(ideal_basis(2, g(2), &b).unwrap().dim(), 1);
        assert_eq!(ideal_basis(3, g(2), &b).unwrap().dim(), 4);
        for gg in 1..=2 {
            for k in 2..=5 {
                let ib = ideal_basis(k, g(gg), &b).unwrap();
                assert_eq!(ib.dim() as u128, ideal_dimension(k, gg), "k={k} g={gg}");
                assert!(ib.basis().iter().all(is_lie_element));
            }
        }
    }

    #[test]
    fn quotient_examples() {
        let b = Budget::default();
        let q = quotient_lg(2, g(3), &b).unwrap();
        assert_eq!(q.dim(), 3 * 5 - 1);
        let p = q.project(&Tensor::omega(g(3))).unwrap();
        assert!(p.iter().all(|c| c.is_zero()));
        let q4 = quotient_lg(4, g(2), &b).unwrap();
        assert_eq!(q4.dim() as u128, surface_lie_dimension(4, 2));
    }

    #[test]
    fn bracket_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let gg = g(2);
        let a = apply_lie_projector(&random_tensor(&mut rng, gg, 2, 5));
        let b = apply_lie_projector(&random_tensor(&mut rng, gg, 1, 3));
        let c = apply_lie_projector(&random_tensor(&mut rng, gg, 2, 5));
        assert!(a.bracket(&a).is_zero());
        let jac = a.bracket(&b).bracket(&c).add(&b.bracket(&c).bracket(&a)).add(&c.bracket(&a).bracket(&b));
        assert!(jac.is_zero());
        assert!(is_lie_element(&a.bracket(&b)));
    }
}
