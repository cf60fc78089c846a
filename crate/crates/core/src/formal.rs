//! Formal calculus on invariant tensors.
//!
//! Every Sp-invariant tensor in H^{⊗2k} is a combination Σ c_C a_C over
//! linear chord diagrams. A [`FormalVec`] stores such a combination by
//! diagram rank. Place permutations, contractions, chord insertion, tensor
//! products and everything built from them (Lie projectors, cyclic sums,
//! derivation brackets, the Casimir) act on these coordinates directly, so
//! invariant computations never materialize (2g)^k-term tensors.
//!
//! Formal coordinates are not unique when g < k (the a_C are dependent); the
//! true value is tested through the Gram matrix: Σ c_C a_C = 0 exactly when
//! Σ_C α_{C′}(a_C) c_C = 0 for every C′.

use std::sync::{Arc, Mutex, OnceLock};

use rustc_hash::FxHashMap;

use crate::chord::{double_factorial_odd, LinearChordDiagram};
use crate::error::{Error, Result};
use crate::lie::sigma;
use crate::linalg::{self, SparseMatrix, SparseVector};
use crate::rational::Rational;
use crate::symplectic::Genus;
use crate::tensor::{Tensor, TermMap};

/// Largest vertex count handled formally.
pub const MAX_VERTICES: usize = 16;

type Partner = [u8; MAX_VERTICES];

fn df_table() -> &'static [u64; 9] {
    static T: OnceLock<[u64; 9]> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = [1u64; 9];
        for (k, v) in t.iter_mut().enumerate() {
            *v = double_factorial_odd(k);
        }
        t
    })
}

#[inline]
fn rank_partner(p: &Partner, n: usize) -> u32 {
    let df = df_table();
    let mut mask: u32 = (1u32 << n) - 1;
    let mut r: u64 = 0;
    while mask != 0 {
        let v = mask.trailing_zeros() as usize;
        let q = p[v] as usize;
        let t = (mask & ((1u32 << q) - 1)).count_ones() as usize - 1;
        let remaining = mask.count_ones() as usize / 2;
        r += t as u64 * df[remaining - 1];
        mask &= !(1u32 << v) & !(1u32 << q);
    }
    r as u32
}

#[inline]
fn sign_partner(p: &Partner, n: usize) -> i64 {
    let mut seq = [0u8; MAX_VERTICES];
    let mut len = 0;
    for i in 0..n {
        if (p[i] as usize) > i {
            seq[len] = i as u8;
            seq[len + 1] = p[i];
            len += 2;
        }
    }
    let mut inv = 0;
    for i in 0..len {
        for j in i + 1..len {
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

/// Cached partner arrays and signs of every diagram with `k` chords.
pub struct DiagramTable {
    pub k: usize,
    partners: Vec<Partner>,
    signs: Vec<i8>,
}

impl DiagramTable {
    fn build(k: usize) -> Self {
        let total = double_factorial_odd(k) as usize;
        let mut partners = Vec::with_capacity(total);
        let mut signs = Vec::with_capacity(total);
        for r in 0..total {
            let d = LinearChordDiagram::unrank(k, r);
            let mut p = [0u8; MAX_VERTICES];
            p[..2 * k].copy_from_slice(d.partners());
            signs.push(sign_partner(&p, 2 * k) as i8);
            partners.push(p);
        }
        DiagramTable { k, partners, signs }
    }

    pub fn len(&self) -> usize {
        self.partners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partners.is_empty()
    }

    pub fn diagram(&self, r: usize) -> LinearChordDiagram {
        LinearChordDiagram::from_partner(self.partners[r][..2 * self.k].to_vec()).expect("valid")
    }
}

pub fn table(k: usize) -> Arc<DiagramTable> {
    assert!(2 * k <= MAX_VERTICES, "too many chords for the formal calculus");
    static CACHE: OnceLock<Mutex<FxHashMap<usize, Arc<DiagramTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(FxHashMap::default()));
    if let Some(t) = cache.lock().expect("lock").get(&k) {
        return t.clone();
    }
    let t = Arc::new(DiagramTable::build(k));
    cache.lock().expect("lock").entry(k).or_insert(t).clone()
}

/// (sign, cycles) of α_C(a_{C′}) = sign·(2g)^cycles for partner arrays.
#[inline]
fn pairing_parts(p: &Partner, sp: i64, q: &Partner, sq: i64, n: usize) -> (i64, u32) {
    let mut seen: u32 = 0;
    let mut sign = sp * sq;
    let mut cycles = 0;
    for start in 0..n {
        if seen & (1 << start) != 0 {
            continue;
        }
        cycles += 1;
        let mut v = start;
        let mut len = 0;
        loop {
            let w = q[v] as usize;
            seen |= (1 << v) | (1 << w);
            if v > w {
                sign = -sign;
            }
            let nv = p[w] as usize;
            if w > nv {
                sign = -sign;
            }
            len += 1;
            v = nv;
            if v == start {
                break;
            }
        }
        if len % 2 == 1 {
            sign = -sign;
        }
    }
    (sign, cycles)
}

/// A formal combination of the invariant tensors a_C, C with `k` chords.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormalVec {
    k: usize,
    terms: Vec<(u32, Rational)>,
}

/// Accumulator for formal vectors.
#[derive(Default)]
struct Acc(FxHashMap<u32, Rational>);

impl Acc {
    #[inline]
    fn add(&mut self, r: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(r).or_insert_with(Rational::zero);
        *e += c;
    }

    fn finish(self, k: usize) -> FormalVec {
        let mut terms: Vec<(u32, Rational)> = self.0.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by_key(|t| t.0);
        FormalVec { k, terms }
    }
}

impl FormalVec {
    pub fn zero(k: usize) -> Self {
        FormalVec { k, terms: Vec::new() }
    }

    /// The single invariant a_C.
    pub fn diagram(c: &LinearChordDiagram) -> Self {
        FormalVec { k: c.chords(), terms: vec![(c.rank() as u32, Rational::one())] }
    }

    pub fn basis(k: usize, r: usize) -> Self {
        FormalVec { k, terms: vec![(r as u32, Rational::one())] }
    }

    /// The scalar 1 in degree zero.
    pub fn one() -> Self {
        FormalVec { k: 0, terms: vec![(0, Rational::one())] }
    }

    pub fn chords(&self) -> usize {
        self.k
    }

    pub fn vertices(&self) -> usize {
        2 * self.k
    }

    pub fn terms(&self) -> &[(u32, Rational)] {
        &self.terms
    }

    pub fn is_formally_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn axpy(&self, c: &Rational, other: &FormalVec) -> FormalVec {
        assert_eq!(self.k, other.k, "chord counts differ");
        let mut acc = Acc::default();
        for (r, x) in &self.terms {
            acc.add(*r, x.clone());
        }
        for (r, x) in &other.terms {
            acc.add(*r, x * c);
        }
        acc.finish(self.k)
    }

    pub fn add(&self, other: &FormalVec) -> FormalVec {
        self.axpy(&Rational::one(), other)
    }

    pub fn sub(&self, other: &FormalVec) -> FormalVec {
        self.axpy(&-Rational::one(), other)
    }

    pub fn scale(&self, c: &Rational) -> FormalVec {
        if c.is_zero() {
            return FormalVec::zero(self.k);
        }
        FormalVec { k: self.k, terms: self.terms.iter().map(|(r, x)| (*r, x * c)).collect() }
    }

    fn for_each_diagram<F: FnMut(&Partner, i64, &Rational)>(&self, mut f: F) {
        if self.k == 0 {
            for (_, c) in &self.terms {
                f(&[0; MAX_VERTICES], 1, c);
            }
            return;
        }
        let t = table(self.k);
        for (r, c) in &self.terms {
            let r = *r as usize;
            f(&t.partners[r], t.signs[r] as i64, c);
        }
    }

    /// Place permutation: the factor at position i moves to `s[i]`.
    pub fn permute(&self, s: &[usize]) -> FormalVec {
        let n = self.vertices();
        assert_eq!(s.len(), n, "permutation length");
        let mut acc = Acc::default();
        self.for_each_diagram(|p, sign, c| {
            let mut q = [0u8; MAX_VERTICES];
            let mut flips = 0;
            for i in 0..n {
                let j = p[i] as usize;
                q[s[i]] = s[j] as u8;
                if i < j && s[i] > s[j] {
                    flips += 1;
                }
            }
            let sq = sign_partner(&q, n);
            let f = sign * sq * if flips % 2 == 0 { 1 } else { -1 };
            acc.add(rank_partner(&q, n), c * &Rational::from_int(f));
        });
        acc.finish(self.k)
    }

    /// Applies μ to factors `i < j`.
    pub fn contract(&self, i: usize, j: usize, g: Genus) -> FormalVec {
        let n = self.vertices();
        assert!(i < j && j < n, "contraction positions");
        let relabel = |v: usize| v - (v > i) as usize - (v > j) as usize;
        let two_g = Rational::from_int(2 * g.get() as i64);
        let mut acc = Acc::default();
        self.for_each_diagram(|p, sign, c| {
            let mut q = [0u8; MAX_VERTICES];
            let factor;
            if p[i] as usize == j {
                for v in 0..n {
                    if v != i && v != j {
                        q[relabel(v)] = relabel(p[v] as usize) as u8;
                    }
                }
                factor = two_g.clone();
            } else {
                let (a, b) = (p[i] as usize, p[j] as usize);
                for v in 0..n {
                    if v != i && v != j && v != a && v != b {
                        q[relabel(v)] = relabel(p[v] as usize) as u8;
                    }
                }
                q[relabel(a)] = relabel(b) as u8;
                q[relabel(b)] = relabel(a) as u8;
                let si = if i < a { 1 } else { -1 };
                let sj = if j < b { 1 } else { -1 };
                let sab = if a < b { 1 } else { -1 };
                factor = Rational::from_int(si * sj * sab);
            }
            let sq = sign_partner(&q, n - 2);
            acc.add(rank_partner(&q, n - 2), c * &factor * Rational::from_int(sign * sq));
        });
        acc.finish(self.k - 1)
    }

    /// Inserts ω₀ at positions `i < j` of the enlarged word (the other
    /// factors keep their order).
    pub fn insert_chord(&self, i: usize, j: usize) -> FormalVec {
        let n = self.vertices() + 2;
        assert!(i < j && j < n, "insertion positions");
        let old_to_new: Vec<usize> = (0..n).filter(|&v| v != i && v != j).collect();
        let mut acc = Acc::default();
        self.for_each_diagram(|p, sign, c| {
            let mut q = [0u8; MAX_VERTICES];
            for (o, &nv) in old_to_new.iter().enumerate() {
                q[nv] = old_to_new[p[o] as usize] as u8;
            }
            q[i] = j as u8;
            q[j] = i as u8;
            let sq = sign_partner(&q, n);
            acc.add(rank_partner(&q, n), c * &Rational::from_int(sign * sq));
        });
        acc.finish(self.k + 1)
    }

    /// Tensor product: a_C ⊗ a_{C′} = a_{C⊔C′}.
    pub fn tensor(&self, other: &FormalVec) -> FormalVec {
        let (n1, n2) = (self.vertices(), other.vertices());
        let n = n1 + n2;
        assert!(n <= MAX_VERTICES, "too many vertices");
        let mut acc = Acc::default();
        self.for_each_diagram(|p, _, c| {
            other.for_each_diagram(|q, _, d| {
                let mut u = [0u8; MAX_VERTICES];
                u[..n1].copy_from_slice(&p[..n1]);
                for v in 0..n2 {
                    u[n1 + v] = q[v] + n1 as u8;
                }
                acc.add(rank_partner(&u, n), c * d);
            });
        });
        acc.finish(self.k + other.k)
    }

    /// `1 ⊗ p_m` on the `m` consecutive factors starting at `start`.
    pub fn lie_projector_on(&self, start: usize, m: usize) -> FormalVec {
        let n = self.vertices();
        assert!(start + m <= n);
        let mut cur = self.clone();
        for i in 2..=m {
            let local = sigma(i, m);
            let s: Vec<usize> =
                (0..n).map(|p| if p >= start && p < start + m { start + local[p - start] } else { p }).collect();
            cur = cur.sub(&cur.permute(&s));
        }
        cur
    }

    pub fn lie_projector(&self) -> FormalVec {
        self.lie_projector_on(0, self.vertices())
    }

    /// Σ_{i=1}^{m} σ_m^i on the block of `m` factors starting at `start`.
    pub fn cyclic_sum_on(&self, start: usize, m: usize) -> FormalVec {
        let n = self.vertices();
        let rot: Vec<usize> = (0..n)
            .map(|p| if p >= start && p < start + m { start + (p - start + 1) % m } else { p })
            .collect();
        let mut acc = self.clone();
        let mut cur = self.clone();
        for _ in 1..m {
            cur = cur.permute(&rot);
            acc = acc.add(&cur);
        }
        acc
    }

    /// The projector onto h(k) on a block of k+2 factors, normalized to be
    /// idempotent: cyclic sum after 1⊗p_{k+1}, divided by (k+1)(k+2).
    pub fn h_projector_on(&self, start: usize, len: usize) -> FormalVec {
        let t = self.lie_projector_on(start + 1, len - 1).cyclic_sum_on(start, len);
        t.scale(&Rational::new(1, ((len - 1) * len) as i64))
    }

    /// Contracts positions i < j, then arranges the survivors so that the
    /// original position `order[t]` ends at place t.
    pub fn contract_arrange(&self, i: usize, j: usize, order: &[usize], g: Genus) -> FormalVec {
        let n = self.vertices();
        let c = self.contract(i, j, g);
        let survivors: Vec<usize> = (0..n).filter(|&v| v != i && v != j).collect();
        let mut target = vec![0usize; n - 2];
        for (t, &orig) in order.iter().enumerate() {
            let cur = survivors.iter().position(|&v| v == orig).expect("survivor");
            target[cur] = t;
        }
        c.permute(&target)
    }

    /// Derivation bracket on a tensor in H^{⊗a} ⊗ H^{⊗b}: with the first
    /// block read as d₁ = u⊗X and the second as d₂ = v⊗Y, returns
    /// [d₁, d₂] = v⊗d₁(Y) − u⊗d₂(X) in H^{⊗(a+b−2)}.
    pub fn derivation_bracket(&self, a: usize, g: Genus) -> FormalVec {
        let n = self.vertices();
        let b = n - a;
        let mut acc = FormalVec::zero(self.k - 1);
        for p in 1..b {
            let mut order = vec![a];
            order.extend(a + 1..a + p);
            order.extend(1..a);
            order.extend(a + p + 1..a + b);
            acc = acc.add(&self.contract_arrange(0, a + p, &order, g));
        }
        for q in 1..a {
            let mut order = vec![0];
            order.extend(1..q);
            order.extend(a + 1..a + b);
            order.extend(q + 1..a);
            acc = acc.add(&self.contract_arrange(q, a, &order, g));
        }
        acc
    }

    /// Casimir operator restricted to the block of `m` factors at `start`:
    /// m(2g+1) + 2 Σ_{i<j} (P_ij − K_ij) with P the swap and K the
    /// contract-then-reinsert-ω₀ operator.
    pub fn casimir_on(&self, start: usize, m: usize, g: Genus) -> FormalVec {
        let n = self.vertices();
        let mut acc = self.scale(&Rational::from_int((m * (2 * g.get() + 1)) as i64));
        let two = Rational::from_int(2);
        for i in start..start + m {
            for j in i + 1..start + m {
                let mut s: Vec<usize> = (0..n).collect();
                s.swap(i, j);
                let swap = self.permute(&s);
                let k = self.contract(i, j, g).insert_chord(i, j);
                acc = acc.axpy(&two, &swap.sub(&k));
            }
        }
        acc
    }

    /// Σ c_C a_C as an explicit tensor.
    pub fn materialize(&self, g: Genus) -> Tensor {
        let mut m = TermMap::new();
        if self.k == 0 {
            return Tensor::scalar(g, self.terms.first().map(|t| t.1.clone()).unwrap_or_else(Rational::zero));
        }
        let t = table(self.k);
        for (r, c) in &self.terms {
            m.add_scaled(&t.diagram(*r as usize).a_tensor(g), c);
        }
        m.finish(g, self.vertices())
    }

    /// The vector (α_{C′}(Σ c_C a_C))_{C′} over all diagrams C′.
    pub fn alpha_values(&self, g: Genus) -> Vec<Rational> {
        let n = self.vertices();
        let t = table(self.k);
        let powers: Vec<Rational> =
            (0..=self.k).map(|r| Rational::from_int(2 * g.get() as i64).pow(r as u32)).collect();
        let terms = &self.terms;
        crate::exec::map_range(t.len(), |rp| {
            let p = &t.partners[rp];
            let sp = t.signs[rp] as i64;
            let mut acc = Rational::zero();
            for (r, c) in terms {
                let r = *r as usize;
                let (s, cyc) = pairing_parts(p, sp, &t.partners[r], t.signs[r] as i64, n);
                let v = &powers[cyc as usize] * c;
                if s > 0 {
                    acc += v;
                } else {
                    acc -= v;
                }
            }
            acc
        })
    }

    pub fn alpha_vector(&self, g: Genus) -> SparseVector {
        SparseVector::from_dense(&self.alpha_values(g))
    }

    /// Whether the invariant tensor this represents vanishes at genus g.
    pub fn vanishes_at(&self, g: Genus) -> bool {
        self.alpha_values(g).iter().all(|x| x.is_zero())
    }

    /// Formal coordinates as a sparse vector of length (2k−1)!!.
    pub fn to_sparse(&self) -> SparseVector {
        let dim = double_factorial_odd(self.k) as usize;
        SparseVector::from_entries(dim, self.terms.iter().map(|(r, c)| (*r as usize, c.clone()))).expect("in range")
    }

    pub fn from_sparse(k: usize, v: &SparseVector) -> FormalVec {
        FormalVec { k, terms: v.entries().iter().map(|(r, c)| (*r as u32, c.clone())).collect() }
    }
}

/// α_C(a_{C′}) read from the cached tables.
pub fn pairing(k: usize, r: usize, rp: usize, g: Genus) -> Rational {
    let t = table(k);
    let (s, cyc) = pairing_parts(&t.partners[r], t.signs[r] as i64, &t.partners[rp], t.signs[rp] as i64, 2 * k);
    Rational::from_int(s) * Rational::from_int(2 * g.get() as i64).pow(cyc)
}

/// Keeps a formally independent subset (exact elimination on coordinates).
pub fn formal_basis(vs: &[FormalVec]) -> Vec<FormalVec> {
    let mut ech = linalg::Echelon::new();
    let mut out = Vec::new();
    for v in vs {
        if ech.insert(&v.to_sparse()) == linalg::Insert::Independent {
            out.push(v.clone());
        }
    }
    out
}

/// Matrix whose columns are the α-vectors of `vs` at genus g.
pub fn alpha_matrix(vs: &[FormalVec], g: Genus) -> Result<SparseMatrix> {
    let Some(first) = vs.first() else {
        return Ok(SparseMatrix::zero(0, 0));
    };
    let k = first.chords();
    if vs.iter().any(|v| v.chords() != k) {
        return Err(Error::InvalidArgument("formal vectors of different degrees".into()));
    }
    let cols: Vec<SparseVector> = vs.iter().map(|v| v.alpha_vector(g)).collect();
    SparseMatrix::from_columns(double_factorial_odd(k) as usize, cols)
}

/// Dimension at genus g of the span of the invariant tensors `vs`.
pub fn rank_at(vs: &[FormalVec], g: Genus) -> Result<usize> {
    if vs.is_empty() {
        return Ok(0);
    }
    let basis = formal_basis(vs);
    let m = alpha_matrix(&basis, g)?;
    linalg::rank_modular_certified(&m)
}

/// dim (span A ∩ span B) at genus g.
pub fn intersection_dim(a: &[FormalVec], b: &[FormalVec], g: Genus) -> Result<usize> {
    let ra = rank_at(a, g)?;
    let rb = rank_at(b, g)?;
    let mut all = a.to_vec();
    all.extend_from_slice(b);
    let rab = rank_at(&all, g)?;
    Ok(ra + rb - rab)
}

/// Coefficients c with Σ c_i vs_i = target at genus g, if any.
pub fn solve_at(vs: &[FormalVec], target: &FormalVec, g: Genus) -> Result<Option<Vec<Rational>>> {
    let m = alpha_matrix(vs, g)?;
    linalg::member(&target.alpha_vector(g), m.columns())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chord::enumerate_unchecked;
    use crate::lie::{apply_lie_projector, apply_lie_projector_tail};

    fn g(n: usize) -> Genus {
        Genus::new(n).unwrap()
    }

    fn all(k: usize) -> Vec<FormalVec> {
        (0..double_factorial_odd(k) as usize).map(|r| FormalVec::basis(k, r)).collect()
    }

    #[test]
    fn ranks_match_chord_module() {
        for k in 1..=5 {
            for r in 0..double_factorial_odd(k) as usize {
                let d = LinearChordDiagram::unrank(k, r);
                let mut p = [0u8; MAX_VERTICES];
                p[..2 * k].copy_from_slice(d.partners());
                assert_eq!(rank_partner(&p, 2 * k) as usize, r);
                assert_eq!(sign_partner(&p, 2 * k), d.sign());
            }
        }
    }

    #[test]
    fn pairing_matches_chord_module() {
        for k in 1..=3 {
            let ds = enumerate_unchecked(k);
            for (i, c) in ds.iter().enumerate() {
                for (j, cp) in ds.iter().enumerate() {
                    assert_eq!(pairing(k, i, j, g(2)), c.pairing_value(cp, g(2)));
                }
            }
        }
    }

    #[test]
    fn permute_matches_materialized() {
        let gg = g(2);
        let perms: Vec<Vec<usize>> = vec![vec![1, 0, 2, 3], vec![2, 0, 3, 1], vec![3, 2, 1, 0], vec![1, 2, 3, 0]];
        for v in all(2) {
            for s in &perms {
                assert_eq!(v.permute(s).materialize(gg), v.materialize(gg).permute(s).unwrap());
            }
        }
        let s = vec![4, 0, 5, 2, 1, 3];
        for v in all(3) {
            assert_eq!(v.permute(&s).materialize(gg), v.materialize(gg).permute(&s).unwrap());
        }
    }

    #[test]
    fn contract_matches_materialized() {
        let gg = g(2);
        for v in all(3) {
            for i in 0..6 {
                for j in i + 1..6 {
                    assert_eq!(v.contract(i, j, gg).materialize(gg), v.materialize(gg).contract(i, j).unwrap());
                }
            }
        }
    }

    #[test]
    fn insert_and_tensor_match_materialized() {
        let gg = g(2);
        let w = Tensor::omega(gg);
        for v in all(2) {
            let t = v.materialize(gg);
            // Inserting at (0, 5) wraps ω₀ around the block.
            let ins = v.insert_chord(0, 5).materialize(gg);
            let mut expect = w.tensor(&t);
            expect = expect.permute(&[0, 5, 1, 2, 3, 4]).unwrap();
            assert_eq!(ins, expect);
            for u in all(1) {
                assert_eq!(v.tensor(&u).materialize(gg), t.tensor(&u.materialize(gg)));
            }
        }
    }

    #[test]
    fn projectors_match_materialized() {
        let gg = g(2);
        for v in all(3) {
            let t = v.materialize(gg);
            assert_eq!(v.lie_projector().materialize(gg), apply_lie_projector(&t));
            assert_eq!(v.lie_projector_on(1, 5).materialize(gg), apply_lie_projector_tail(&t, 5));
        }
    }

    #[test]
    fn gram_detects_vanishing() {
        // Σ a_C = 0 at g = 1 for two chords.
        let s = all(2).into_iter().fold(FormalVec::zero(2), |a, b| a.add(&b));
        assert!(s.vanishes_at(g(1)));
        assert!(!s.vanishes_at(g(2)));
        assert_eq!(rank_at(&all(2), g(1)).unwrap(), 2);
        assert_eq!(rank_at(&all(3), g(3)).unwrap(), 15);
    }

    /// Bilinear extension of the tensor-level bracket to H^{⊗a} ⊗ H^{⊗b}.
    fn tensor_bracket(t: &Tensor, a: usize) -> Tensor {
        use crate::derivation::{DerivationElement, Flavor};
        use crate::tensor::{subword, unpack, Word};
        let gg = t.genus();
        let n = t.degree();
        let mut rests: std::collections::BTreeMap<Word, TermMap> = Default::default();
        for (w, c) in t.terms() {
            rests.entry(subword(*w, n, 0, a)).or_default().add(subword(*w, n, a, n - a), c.clone());
        }
        let mut acc = TermMap::new();
        for (p, rest) in rests {
            let d1 = DerivationElement::new(Tensor::basis(gg, &unpack(p, a)), Flavor::Punctured).unwrap();
            let d2 = DerivationElement::new(rest.finish(gg, n - a), Flavor::Punctured).unwrap();
            acc.add_scaled(&d1.bracket(&d2).unwrap().tensor, &Rational::one());
        }
        acc.finish(gg, n - 2)
    }

    #[test]
    fn derivation_bracket_matches_tensor_bracket() {
        for gg in [g(1), g(2)] {
            for v in all(3) {
                let formal = v.derivation_bracket(3, gg).materialize(gg);
                assert_eq!(formal, tensor_bracket(&v.materialize(gg), 3));
            }
        }
        let gg = g(2);
        for r in (0..double_factorial_odd(4) as usize).step_by(7) {
            let v = FormalVec::basis(4, r);
            assert_eq!(v.derivation_bracket(3, gg).materialize(gg), tensor_bracket(&v.materialize(gg), 3));
            assert_eq!(v.derivation_bracket(4, gg).materialize(gg), tensor_bracket(&v.materialize(gg), 4));
        }
    }

    #[test]
    fn casimir_matches_tensor_casimir() {
        use crate::tensor::{concat, subword};
        let gg = g(2);
        for v in all(3) {
            assert!(v.casimir_on(0, 6, gg).vanishes_at(gg));
            // Casimir on the middle block [1, 4).
            let t = v.materialize(gg);
            let mut acc = TermMap::new();
            for (w, c) in t.terms() {
                let mid = Tensor::from_terms(gg, 3, [(subword(*w, 6, 1, 3), c.clone())]);
                for (mw, mc) in crate::sp::casimir(&mid).terms() {
                    let word = concat(concat(subword(*w, 6, 0, 1), *mw, 3), subword(*w, 6, 4, 2), 2);
                    acc.add(word, mc.clone());
                }
            }
            assert_eq!(v.casimir_on(1, 3, gg).materialize(gg), acc.finish(gg, 6));
        }
    }
}
