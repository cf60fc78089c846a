//! Symplectic derivations of the free Lie algebra.
//!
//! An element of h(k) is stored as a tensor in H^{⊗(k+2)}: the term u⊗X
//! stands for the derivation w ↦ μ(u, w) X of degree k. Membership is the
//! pair of conditions (1⊗p_{k+1})ξ = (k+1)ξ and cyclic invariance.

use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::lie::{apply_lie_projector_tail, ideal_basis, lie_basis, lie_dimension, sigma};
use crate::linalg::{Echelon, Insert};
use crate::rational::Rational;
use crate::space::{SpaceTensor, TensorSpace};
use crate::subspace::{weight_key, GradedSubspace, Label};
use crate::symplectic::{mu, Genus, Letter};
use crate::tensor::{letter_at, subword, Tensor, TermMap};

/// Which tower a derivation belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    /// h_{g,1}: derivations of the free Lie algebra killing ω₀.
    #[serde(rename = "g1")]
    Free,
    /// h_{g,*}: the same conditions read modulo the ideal I.
    #[serde(rename = "g*")]
    Punctured,
    /// h_g: further modulo inner derivations.
    #[serde(rename = "g")]
    Closed,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Free => "g1",
            Flavor::Punctured => "g*",
            Flavor::Closed => "g",
        })
    }
}

/// A derivation of degree `degree`, realized in H⊗L(degree+1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivationElement {
    pub genus: Genus,
    pub degree: usize,
    pub tensor: Tensor,
    pub flavor: Flavor,
}

/// Moves the factor at position 0 to the end: u⊗X ↦ X⊗u.
fn first_to_last(n: usize) -> Vec<usize> {
    (0..n).map(|p| if p == 0 { n - 1 } else { p - 1 }).collect()
}

/// The bracket map H⊗L(k+1) → L(k+2), u⊗X ↦ [u, X].
pub fn bracket_map(t: &Tensor) -> Tensor {
    let n = t.degree();
    t.sub(&t.permute(&first_to_last(n)).expect("valid permutation"))
}

/// Both membership conditions for h(k), with k = degree − 2.
pub fn membership(t: &Tensor) -> bool {
    let n = t.degree();
    if t.is_zero() {
        return true;
    }
    if n < 3 {
        return false;
    }
    let lie = apply_lie_projector_tail(t, n - 1) == t.scale(&Rational::from_int(n as i64 - 1));
    lie && t.permute(&sigma(n, n)).expect("valid permutation") == *t
}

/// Σ over the n rotations of the tensor factors.
pub fn cyclic_sum(t: &Tensor) -> Tensor {
    let n = t.degree();
    let rot: Vec<usize> = (0..n).map(|p| (p + 1) % n).collect();
    let mut acc = TermMap::new();
    let mut cur = t.clone();
    for _ in 0..n {
        acc.add_scaled(&cur, &Rational::one());
        cur = cur.permute(&rot).expect("valid permutation");
    }
    acc.finish(t.genus(), n)
}

/// The idempotent projector of H^{⊗(k+2)} onto h(k):
/// cyclic sum after 1⊗p_{k+1}, divided by (k+1)(k+2).
pub fn h_project(t: &Tensor) -> Tensor {
    let n = t.degree();
    let s = cyclic_sum(&apply_lie_projector_tail(t, n - 1));
    s.scale(&Rational::new(1, ((n - 1) * n) as i64))
}

impl DerivationElement {
    /// Wraps a tensor, checking the membership conditions for the free flavor.
    pub fn new(tensor: Tensor, flavor: Flavor) -> Result<Self> {
        let n = tensor.degree();
        if n < 3 {
            return Err(Error::InvalidArgument("a derivation tensor has degree at least 3".into()));
        }
        if flavor == Flavor::Free && !membership(&tensor) {
            return Err(Error::InvalidArgument("tensor fails the derivation conditions".into()));
        }
        Ok(DerivationElement { genus: tensor.genus(), degree: n - 2, tensor, flavor })
    }

    pub fn is_zero(&self) -> bool {
        self.tensor.is_zero()
    }

    /// The image of one basis letter: Σ μ(u, w) X over the terms u⊗X.
    pub fn image_of_letter(&self, w: Letter) -> Tensor {
        let n = self.tensor.degree();
        let mut m = TermMap::new();
        for (word, c) in self.tensor.terms() {
            let v = mu(letter_at(*word, n, 0), w);
            if v != 0 {
                m.add(subword(*word, n, 1, n - 1), c * &Rational::from_int(v));
            }
        }
        m.finish(self.genus, n - 1)
    }

    /// Leibniz extension to H^{⊗m}.
    pub fn apply(&self, t: &Tensor) -> Tensor {
        if t.degree() == 0 {
            return Tensor::zero(self.genus, self.degree);
        }
        t.leibniz(self.degree + 1, |l| self.image_of_letter(l))
    }

    /// Splits the tensor by its first letter: u ↦ X_u with tensor = Σ u⊗X_u.
    fn by_first_letter(&self) -> FxHashMap<Letter, Tensor> {
        let n = self.tensor.degree();
        let mut parts: FxHashMap<Letter, TermMap> = FxHashMap::default();
        for (word, c) in self.tensor.terms() {
            parts.entry(letter_at(*word, n, 0)).or_default().add(subword(*word, n, 1, n - 1), c.clone());
        }
        parts.into_iter().map(|(l, m)| (l, m.finish(self.genus, n - 1))).collect()
    }

    /// Commutator of derivations: [u⊗X, v⊗Y] = v⊗d₁(Y) − u⊗d₂(X).
    pub fn bracket(&self, other: &DerivationElement) -> Result<DerivationElement> {
        if self.flavor != other.flavor {
            return Err(Error::InvalidArgument(format!("flavor mismatch: {} vs {}", self.flavor, other.flavor)));
        }
        if self.genus != other.genus {
            return Err(Error::InvalidArgument("genus mismatch".into()));
        }
        let g = self.genus;
        let deg = self.degree + other.degree;
        let mut acc = TermMap::new();
        for (v, y) in other.by_first_letter() {
            acc.add_scaled(&Tensor::basis(g, &[v]).tensor(&self.apply(&y)), &Rational::one());
        }
        for (u, x) in self.by_first_letter() {
            acc.add_scaled(&Tensor::basis(g, &[u]).tensor(&other.apply(&x)), &-Rational::one());
        }
        Ok(DerivationElement { genus: g, degree: deg, tensor: acc.finish(g, deg + 2), flavor: self.flavor })
    }

    /// The trace Tr(2k+1) into S^{2k+1}H.
    pub fn trace(&self) -> Result<SpaceTensor> {
        trace_with(self, TraceSlot::Adjacent)
    }
}

/// Which output factor the Hom-slot is paired with in the trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceSlot {
    /// The first output factor (the default realization).
    Adjacent,
    /// The last output factor (the dual realization).
    Last,
}

/// Tr(2k+1): pair the Hom-slot with one output factor by μ, then
/// symmetrize the remaining 2k+1 factors.
pub fn trace_with(d: &DerivationElement, slot: TraceSlot) -> Result<SpaceTensor> {
    if d.degree % 2 == 0 {
        return Err(Error::InvalidArgument(format!("trace is defined in odd degree, got {}", d.degree)));
    }
    let n = d.tensor.degree();
    let j = match slot {
        TraceSlot::Adjacent => 1,
        TraceSlot::Last => n - 1,
    };
    let c = d.tensor.contract(0, j)?;
    SpaceTensor::project(&TensorSpace::sym(d.genus, d.degree), &c)
}

/// h(1) = Λ³H: u∧v∧w ↦ u⊗[v,w] + v⊗[w,u] + w⊗[u,v], which is the full
/// antisymmetrization.
pub fn wedge3_to_derivation(t: &SpaceTensor) -> Result<DerivationElement> {
    DerivationElement::new(t.embed()?, Flavor::Free)
}

/// dim h(k) = 2g·dim L(k+1) − dim L(k+2).
pub fn h_dimension(k: usize, g: usize) -> u128 {
    2 * g as u128 * lie_dimension(k + 1, g) - lie_dimension(k + 2, g)
}

/// Two independent computations of dim h(k).
#[derive(Clone, Debug, Serialize)]
pub struct HDimensionReport {
    pub k: usize,
    pub g: usize,
    pub by_subtraction: u128,
    pub bracket_rank: usize,
    pub kernel_dim: u128,
    pub agree: bool,
}

/// Ranks the bracket map on a basis of H⊗L(k+1) and compares its kernel
/// dimension with the subtraction formula.
pub fn certify_h_dimension(k: usize, g: Genus, budget: &Budget) -> Result<HDimensionReport> {
    let lie = lie_basis(k + 1, g, budget)?;
    let cols = g.rank() * lie.len();
    budget.check_work(cols as u64 * (1u64 << (k + 2).min(40)), "bracket map")?;
    let images = crate::exec::map_range(cols, |i| {
        let (l, b) = ((i % g.rank()) as Letter, i / g.rank());
        bracket_map(&Tensor::basis(g, &[l]).tensor(&lie.element(b)))
    });
    let rank = block_rank(&images)?;
    let kernel_dim = cols as u128 - rank as u128;
    let by_subtraction = h_dimension(k, g.get());
    Ok(HDimensionReport { k, g: g.get(), by_subtraction, bracket_rank: rank, kernel_dim, agree: kernel_dim == by_subtraction })
}

/// Rank of a family of weight-homogeneous tensors, eliminating each weight
/// space separately.
pub fn block_rank(ts: &[Tensor]) -> Result<usize> {
    let mut blocks: FxHashMap<u64, Vec<usize>> = FxHashMap::default();
    for (i, t) in ts.iter().enumerate() {
        if let Some((w, _)) = t.terms().first() {
            blocks.entry(weight_key(*w, t.degree())).or_default().push(i);
        }
    }
    let mut keys: Vec<u64> = blocks.keys().copied().collect();
    keys.sort_unstable();
    let ranks = crate::exec::map_slice(&keys, |k| {
        let mut e = Echelon::new();
        for &i in &blocks[k] {
            e.insert_entries(&ts[i].entries());
        }
        e.rank()
    });
    Ok(ranks.into_iter().sum())
}

/// Kernel of a linear map given by the images of weight-homogeneous source
/// vectors; each kernel vector lists (source index, coefficient).
pub fn block_kernel(images: &[Tensor], source_weights: &[u64]) -> Vec<Vec<(usize, Rational)>> {
    let mut blocks: FxHashMap<u64, Vec<usize>> = FxHashMap::default();
    for (i, w) in source_weights.iter().enumerate() {
        blocks.entry(*w).or_default().push(i);
    }
    let mut keys: Vec<u64> = blocks.keys().copied().collect();
    keys.sort_unstable();
    let per_block = crate::exec::map_slice(&keys, |k| {
        let idx = &blocks[k];
        let mut e = Echelon::tracking();
        let mut out = Vec::new();
        for (local, &i) in idx.iter().enumerate() {
            if let Insert::Dependent(Some(combo)) = e.insert_entries(&images[i].entries()) {
                let mut v: Vec<(usize, Rational)> = combo.into_iter().map(|(t, x)| (idx[t], -x)).collect();
                v.push((idx[local], Rational::one()));
                v.sort_by_key(|e| e.0);
                out.push(v);
            }
        }
        out
    });
    per_block.into_iter().flatten().collect()
}

/// A basis of h(k) at genus g, spanned by the cyclic sums of u⊗b with b
/// running over a Lie basis of L(k+1).
pub fn h_basis(k: usize, g: Genus, budget: &Budget) -> Result<GradedSubspace> {
    let lie = lie_basis(k + 1, g, budget)?;
    let n = g.rank() * lie.len();
    budget.check_work(n as u64 * (k as u64 + 2) * (1u64 << (k + 1).min(40)), "h basis")?;
    let span = crate::exec::map_range(n, |i| {
        let (l, b) = ((i % g.rank()) as Letter, i / g.rank());
        cyclic_sum(&Tensor::basis(g, &[l]).tensor(&lie.element(b)))
    });
    GradedSubspace::from_spanning(g, k + 2, Label::Derivation, span.into_iter().filter(|t| !t.is_zero()))
}

/// j(k) = Ker(H⊗I(k+1) → I(k+2)), the derivations valued in the ideal.
pub fn j_ideal(k: usize, g: Genus, budget: &Budget) -> Result<GradedSubspace> {
    if k < 2 {
        return Err(Error::InvalidArgument("j starts in degree 2".into()));
    }
    let ideal = ideal_basis(k + 1, g, budget)?;
    let sources: Vec<Tensor> = (0..g.rank() * ideal.dim())
        .map(|i| Tensor::basis(g, &[(i % g.rank()) as Letter]).tensor(&ideal.basis()[i / g.rank()]))
        .collect();
    budget.check_work(sources.iter().map(|t| t.len() as u64).sum(), "j ideal")?;
    let images = crate::exec::map_slice(&sources, bracket_map);
    let weights: Vec<u64> = sources.iter().map(|t| weight_key(t.terms()[0].0, k + 2)).collect();
    let kernel = block_kernel(&images, &weights);
    let elems = kernel.into_iter().map(|v| {
        let mut m = TermMap::new();
        for (i, c) in v {
            m.add_scaled(&sources[i], &c);
        }
        m.finish(g, k + 2)
    });
    GradedSubspace::from_spanning(g, k + 2, Label::J, elems)
}

/// The subalgebra generated by a degree-one seed: degree d is spanned by
/// the brackets of the seed with degree d−1 (left-normed brackets suffice).
/// Entry i of the result is the degree i+1 piece.
pub fn generate_subalgebra(seed: &GradedSubspace, up_to: usize, budget: &Budget) -> Result<Vec<GradedSubspace>> {
    if seed.degree != 3 {
        return Err(Error::InvalidArgument("the seed must consist of degree-one derivations".into()));
    }
    if up_to > budget.max_generation_degree {
        return Err(Error::ResourceLimit(format!(
            "generation to degree {up_to} exceeds the configured bound of {}",
            budget.max_generation_degree
        )));
    }
    let g = seed.genus;
    let gens: Vec<DerivationElement> =
        seed.basis().iter().map(|t| DerivationElement::new(t.clone(), Flavor::Free)).collect::<Result<_>>()?;
    let mut out = vec![GradedSubspace::from_spanning(g, 3, Label::ImTau, seed.basis().iter().cloned())?];
    for d in 2..=up_to {
        let prev: Vec<DerivationElement> = out[d - 2]
            .basis()
            .iter()
            .map(|t| DerivationElement { genus: g, degree: d - 1, tensor: t.clone(), flavor: Flavor::Free })
            .collect();
        let pairs: Vec<(usize, usize)> = if d == 2 {
            (0..gens.len()).flat_map(|i| (i + 1..gens.len()).map(move |j| (i, j))).collect()
        } else {
            (0..gens.len()).flat_map(|i| (0..prev.len()).map(move |j| (i, j))).collect()
        };
        budget.check_work(pairs.len() as u64 * (1u64 << (d + 2).min(40)), "subalgebra generation")?;
        let brackets = crate::exec::map_slice(&pairs, |&(i, j)| gens[i].bracket(&prev[j]).map(|b| b.tensor));
        let brackets: Vec<Tensor> = brackets.into_iter().collect::<Result<_>>()?;
        budget.check_time("subalgebra generation")?;
        out.push(GradedSubspace::from_spanning(g, d + 2, Label::ImTau, brackets.into_iter().filter(|t| !t.is_zero()))?);
    }
    Ok(out)
}

/// The degree-one seed h(1) = Λ³H as tensors.
pub fn degree_one_seed(g: Genus) -> Result<GradedSubspace> {
    let r = g.rank() as Letter;
    let mut elems = Vec::new();
    for a in 0..r {
        for b in a + 1..r {
            for c in b + 1..r {
                let w = SpaceTensor::from_raw(TensorSpace::wedge3(g), [(vec![a as u16, b as u16, c as u16], Rational::one())]);
                elems.push(w.embed()?);
            }
        }
    }
    GradedSubspace::from_spanning(g, 3, Label::ImTau, elems)
}

/// The inner derivation ad(X) = [X, ·] for X ∈ L(k+1), as the tensor
/// Σ_i x_i⊗[X, y_i] − y_i⊗[X, x_i].
pub fn inner_derivation(x: &Tensor) -> Tensor {
    let g = x.genus();
    let mut m = TermMap::new();
    for i in 0..g.get() as Letter {
        let (xi, yi) = (Tensor::basis(g, &[2 * i]), Tensor::basis(g, &[2 * i + 1]));
        m.add_scaled(&xi.tensor(&x.bracket(&yi)), &Rational::one());
        m.add_scaled(&yi.tensor(&x.bracket(&xi)), &-Rational::one());
    }
    m.finish(g, x.degree() + 2)
}
