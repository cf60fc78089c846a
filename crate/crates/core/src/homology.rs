//! Low-degree pieces of the Chevalley–Eilenberg complex of h: brackets of
//! the S³H copy in h(3), abelianization data and an invariant 2-cycle
//! detected by the trace.

use log::info;
use serde::{Serialize, Serializer};

use crate::budget::Budget;
use crate::chord::{double_factorial_odd, LinearChordDiagram};
use crate::derivation::{block_rank, h_basis, h_dimension, DerivationElement, Flavor};
use crate::error::{Error, Result};
use crate::formal::{solve_at, FormalVec};
use crate::linalg::{self, SparseMatrix, SparseVector};
use crate::rational::Rational;
use crate::space::{binom, TensorSpace};
use crate::sp::{casimir_eigenvalue, isotypic_project, parse_sum, Partition};
use crate::symplectic::{mu, Genus};
use crate::tensor::{letter_at, Tensor};

/// Permutations of {0, 1, 2}.
const S3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// The irreducible constituents of h(3).
pub fn h3_constituents() -> Vec<Partition> {
    parse_sum("[21]+[31^2]+[3]").expect("valid list")
}

fn s3_partition() -> Partition {
    "[3]".parse().expect("valid partition")
}

/// A 2-chain Σ c (a ∧ b) with deg a ≤ deg b and deg a + deg b fixed.
#[derive(Clone, Debug)]
pub struct GradedChain2 {
    pub genus: Genus,
    pub degree: usize,
    terms: Vec<(Rational, DerivationElement, DerivationElement)>,
}

impl GradedChain2 {
    pub fn new(genus: Genus, degree: usize) -> Self {
        GradedChain2 { genus, degree, terms: Vec::new() }
    }

    /// Adds c (a ∧ b), swapping to put the lower degree first.
    pub fn push(&mut self, c: Rational, a: DerivationElement, b: DerivationElement) -> Result<()> {
        if a.genus != self.genus || b.genus != self.genus {
            return Err(Error::InvalidArgument("genus mismatch".into()));
        }
        if a.degree + b.degree != self.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: a.degree + b.degree });
        }
        if a.degree > b.degree {
            self.terms.push((-c, b, a));
        } else {
            self.terms.push((c, a, b));
        }
        Ok(())
    }

    pub fn terms(&self) -> &[(Rational, DerivationElement, DerivationElement)] {
        &self.terms
    }

    /// ∂(a ∧ b) = [a, b], extended linearly.
    pub fn boundary(&self) -> Result<DerivationElement> {
        let mut acc = Tensor::zero(self.genus, self.degree + 2);
        let mut flavor = Flavor::Free;
        for (c, a, b) in &self.terms {
            let br = a.bracket(b)?;
            flavor = br.flavor;
            acc = acc.axpy(c, &br.tensor);
        }
        Ok(DerivationElement { genus: self.genus, degree: self.degree, tensor: acc, flavor })
    }
}

/// ∂(a ∧ b ∧ c) = −[a,b]∧c + [a,c]∧b − [b,c]∧a.
pub fn boundary3(a: &DerivationElement, b: &DerivationElement, c: &DerivationElement) -> Result<GradedChain2> {
    let deg = a.degree + b.degree + c.degree;
    let mut out = GradedChain2::new(a.genus, deg);
    out.push(-Rational::one(), a.bracket(b)?, c.clone())?;
    out.push(Rational::one(), a.bracket(c)?, b.clone())?;
    out.push(-Rational::one(), b.bracket(c)?, a.clone())?;
    Ok(out)
}

/// Ω(Sym p, Sym q) for p ⊗ q given as one degree-6 tensor: the invariant
/// alternating form on S³H, (1/6) Σ_σ Π μ(p_i, q_σ(i)).
fn omega_joint(x: &Tensor) -> Rational {
    let mut acc = Rational::zero();
    for (w, c) in x.terms() {
        let l: Vec<_> = (0..6).map(|i| letter_at(*w, 6, i)).collect();
        let mut s = 0i64;
        for p in &S3 {
            s += (0..3).map(|i| mu(l[i], l[3 + p[i]])).product::<i64>();
        }
        if s != 0 {
            acc += c * &Rational::from_int(s);
        }
    }
    acc * Rational::new(1, 6)
}

/// Ω(Tr a, Tr b) evaluated on a ⊗ b ∈ H^{⊗5} ⊗ H^{⊗5}.
pub fn cochain_on_tensor(t: &Tensor) -> Result<Rational> {
    if t.degree() != 10 {
        return Err(Error::DegreeMismatch { expected: 10, found: t.degree() });
    }
    Ok(omega_joint(&t.contract(5, 6)?.contract(0, 1)?))
}

/// The pullback along Tr(3) of the invariant 2-form on S³H; only terms of
/// bidegree (3, 3) contribute.
pub fn trace_pullback_cochain(c: &GradedChain2) -> Result<Rational> {
    let mut acc = Rational::zero();
    for (x, a, b) in &c.terms {
        if a.degree == 3 && b.degree == 3 {
            acc += x * &cochain_on_tensor(&a.tensor.tensor(&b.tensor))?;
        }
    }
    Ok(acc)
}

/// The same cochain on a formal chain in H^{⊗5} ⊗ H^{⊗5}.
pub fn formal_cochain(u: &FormalVec, g: Genus) -> Rational {
    let x = u.contract(5, 6, g).contract(0, 1, g);
    let alpha = x.alpha_values(g);
    let mut acc = Rational::zero();
    for p in &S3 {
        let c = LinearChordDiagram::from_pairs(&[(0, 3 + p[0]), (1, 3 + p[1]), (2, 3 + p[2])]).expect("valid diagram");
        let v = &alpha[c.rank()];
        if c.sign() > 0 {
            acc += v;
        } else {
            acc -= v;
        }
    }
    acc * Rational::new(1, 6)
}

/// Dimension of the invariant alternating forms on S³H, computed from
/// block-symmetrized, swap-antisymmetrized chord diagrams.
pub fn invariant_forms_on_s3(g: Genus) -> Result<usize> {
    let sym = |v: &FormalVec, start: usize| {
        let mut acc = FormalVec::zero(v.chords());
        for p in &S3 {
            let s: Vec<usize> = (0..6).map(|i| if i >= start && i < start + 3 { start + p[i - start] } else { i }).collect();
            acc = acc.add(&v.permute(&s));
        }
        acc
    };
    let swap: Vec<usize> = (0..6).map(|i| (i + 3) % 6).collect();
    let vs: Vec<FormalVec> = (0..double_factorial_odd(3) as usize)
        .map(|r| {
            let v = sym(&sym(&FormalVec::basis(3, r), 0), 3);
            v.sub(&v.permute(&swap))
        })
        .collect();
    crate::formal::rank_at(&vs, g)
}

/// A section of Tr(3) on the [3]-isotypic part of h(3): element i has
/// trace equal to the i-th monomial of S³H.
#[derive(Clone, Debug)]
pub struct S3Section {
    pub genus: Genus,
    pub monomials: Vec<Vec<u16>>,
    pub elements: Vec<DerivationElement>,
}

pub fn s3_section(g: Genus, budget: &Budget) -> Result<S3Section> {
    let space = TensorSpace::sym(g, 3);
    let dim = space.dimension() as usize;
    let cons = h3_constituents();
    let target = s3_partition();
    let h3 = h_basis(3, g, budget)?;
    budget.check_time("S3 section")?;
    let projected = crate::exec::map_slice(h3.basis(), |t| isotypic_project(t, &target, &cons));
    let mut picked: Vec<Tensor> = Vec::new();
    let mut traces: Vec<SparseVector> = Vec::new();
    let mut monomials: Vec<Vec<u16>> = Vec::new();
    let mut index = rustc_hash::FxHashMap::default();
    let mut ech = linalg::Echelon::new();
    for p in projected {
        let p = p?;
        if p.is_zero() {
            continue;
        }
        let d = DerivationElement::new(p.clone(), Flavor::Free)?;
        let tr = d.trace()?;
        let mut entries = Vec::new();
        for (w, c) in tr.terms() {
            let n = index.len();
            let i = *index.entry(w.clone()).or_insert_with(|| {
                monomials.push(w.clone());
                n
            });
            entries.push((i, c.clone()));
        }
        entries.sort_by_key(|e| e.0);
        if ech.insert_entries(&entries) == linalg::Insert::Independent {
            picked.push(p);
            traces.push(SparseVector::from_entries(dim, entries)?);
        }
        if picked.len() == dim {
            break;
        }
    }
    if picked.len() != dim {
        return Err(Error::Inconsistent(format!(
            "the [3]-part of h(3) has trace rank {} but dim S3H = {dim}",
            picked.len()
        )));
    }
    let m = SparseMatrix::from_columns(dim, traces)?;
    let mut elements = Vec::with_capacity(dim);
    for i in 0..dim {
        let x = linalg::solve(&m, &SparseVector::unit(dim, i))?
            .ok_or_else(|| Error::Inconsistent("trace is not invertible on the [3]-part".into()))?;
        let mut t = Tensor::zero(g, 5);
        for (j, c) in x.entries() {
            t = t.axpy(c, &picked[*j]);
        }
        elements.push(DerivationElement::new(t, Flavor::Free)?);
    }
    monomials.truncate(dim);
    Ok(S3Section { genus: g, monomials, elements })
}

#[derive(Clone, Debug, Serialize)]
pub struct BracketRankReport {
    pub g: usize,
    pub s3_dim: usize,
    pub lambda2_dim: usize,
    pub rank: usize,
    pub h6_dim: u128,
    pub injective: bool,
}

/// Rank of ξ ∧ η ↦ [ξ, η] on Λ²S³H, with S³H realized inside h(3).
pub fn bracket_rank_s3(g: Genus, budget: &Budget) -> Result<BracketRankReport> {
    if g.get() < 2 {
        return Err(Error::InvalidArgument("the bracket rank check needs g >= 2".into()));
    }
    let sec = s3_section(g, budget)?;
    let n = sec.elements.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    budget.check_work(pairs.len() as u64 * (g.rank() as u64).pow(8) / 64, "S3 brackets")?;
    let images = crate::exec::map_slice(&pairs, |&(i, j)| sec.elements[i].bracket(&sec.elements[j]).map(|d| d.tensor));
    let images: Vec<Tensor> = images.into_iter().collect::<Result<_>>()?;
    budget.check_time("S3 brackets")?;
    let rank = block_rank(&images)?;
    Ok(BracketRankReport {
        g: g.get(),
        s3_dim: n,
        lambda2_dim: pairs.len(),
        rank,
        h6_dim: h_dimension(6, g.get()),
        injective: rank == pairs.len(),
    })
}

/// Cokernel of the bracket in one degree, against the conjectured
/// abelianization Λ³H ⊕ ⊕ S^{2k+1}H.
#[derive(Clone, Debug, Serialize)]
pub struct AbelianizationReport {
    pub degree: usize,
    pub g: usize,
    pub h_dim: u128,
    pub bracket_rank: usize,
    pub coker_dim: u128,
    pub predicted: u128,
    pub matches_prediction: bool,
    pub label: &'static str,
}

pub fn predicted_abelianization(degree: usize, g: usize) -> u128 {
    let n = 2 * g as u128;
    match degree {
        1 => binom(n, 3),
        d if d % 2 == 0 => 0,
        d => binom(n + d as u128 - 1, d as u128),
    }
}

pub fn abelianization_evidence(degree: usize, g: Genus, budget: &Budget) -> Result<AbelianizationReport> {
    if degree == 0 {
        return Err(Error::InvalidArgument("degree starts at 1".into()));
    }
    if degree > 4 && budget.max_generation_degree < degree {
        return Err(Error::ResourceLimit(format!("degree {degree} exceeds the bracket budget")));
    }
    let bases: Vec<Vec<DerivationElement>> = (1..degree)
        .map(|k| {
            h_basis(k, g, budget)?
                .into_basis()
                .into_iter()
                .map(|t| DerivationElement::new(t, Flavor::Free))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    for i in 1..=degree / 2 {
        let j = degree - i;
        let (bi, bj) = (&bases[i - 1], &bases[j - 1]);
        for a in 0..bi.len() {
            let start = if i == j { a + 1 } else { 0 };
            for b in start..bj.len() {
                pairs.push((i, a, b));
            }
        }
    }
    budget.check_work(pairs.len() as u64 * (g.rank() as u64).pow(degree as u32 + 2) / 16, "abelianization")?;
    let images = crate::exec::map_slice(&pairs, |&(i, a, b)| {
        bases[i - 1][a].bracket(&bases[degree - i - 1][b]).map(|d| d.tensor)
    });
    let images: Vec<Tensor> = images.into_iter().collect::<Result<_>>()?;
    let rank = block_rank(&images)?;
    let h_dim = h_dimension(degree, g.get());
    let coker_dim = h_dim - rank as u128;
    let predicted = predicted_abelianization(degree, g.get());
    Ok(AbelianizationReport {
        degree,
        g: g.get(),
        h_dim,
        bracket_rank: rank,
        coker_dim,
        predicted,
        matches_prediction: coker_dim == predicted,
        label: "conjecture evidence",
    })
}

/// A formal chain in Λ²h: a combination of chord diagrams on the
/// concatenated blocks of sizes (first + 2) and (second + 2).
#[derive(Clone, Debug)]
pub struct FormalChain {
    pub bidegree: (usize, usize),
    pub chain: FormalVec,
}

impl Serialize for FormalChain {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            bidegree: (usize, usize),
            terms: &'a [(String, Rational)],
        }
        let terms = crate::invariants::describe(&self.chain);
        Repr { bidegree: self.bidegree, terms: &terms }.serialize(s)
    }
}

impl FormalChain {
    /// ∂ = [first block, second block].
    pub fn boundary(&self, g: Genus) -> FormalVec {
        self.chain.derivation_bracket(self.bidegree.0 + 2, g)
    }
}

/// Where the correction term v of an invariant cycle is searched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionBlock {
    /// h(1) ∧ h(5).
    OneFive,
    /// h(2) ∧ h(4).
    TwoFour,
    /// h(3) ∧ h(3) with the first factor outside the [3]-part, on which
    /// the trace cochain vanishes.
    ThreeThreeOffTrace,
}

impl CorrectionBlock {
    fn bidegree(self) -> (usize, usize) {
        match self {
            CorrectionBlock::OneFive => (1, 5),
            CorrectionBlock::TwoFour => (2, 4),
            CorrectionBlock::ThreeThreeOffTrace => (3, 3),
        }
    }
}

/// An Sp-invariant 2-cycle u − Σ v with u of bidegree (3, 3) built from
/// the S³H copy, together with its trace-cochain value.
#[derive(Clone, Debug, Serialize)]
pub struct InvariantCycle {
    pub g: usize,
    pub seed: String,
    pub u: FormalChain,
    pub v: Vec<FormalChain>,
    pub searched: Vec<CorrectionBlock>,
    pub boundary_u_nonzero: bool,
    pub cycle_boundary_vanishes: bool,
    pub cochain: Rational,
    pub v_cochain: Rational,
}

impl InvariantCycle {
    /// Whether the correction needed more than h(1) ∧ h(5).
    pub fn widened(&self) -> bool {
        self.searched.len() > 1
    }
}

/// Applies the [3]-isotypic projector of h(3) to the block at `start`.
fn project_s3_block(x: &FormalVec, start: usize, g: Genus) -> FormalVec {
    let target = casimir_eigenvalue(&s3_partition(), g);
    let mut cur = x.clone();
    for p in h3_constituents() {
        if p.rows() > g.get() {
            continue;
        }
        let l = casimir_eigenvalue(&p, g);
        if l == target {
            continue;
        }
        let c = cur.casimir_on(start, 5, g);
        cur = c.axpy(&Rational::from_int(-l), &cur).scale(&Rational::new(1, target - l));
    }
    cur
}

fn block_swap(a: usize) -> Vec<usize> {
    // Valid only for equal blocks; a + 2 = 5.
    (0..2 * (a + 2)).map(|i| (i + a + 2) % (2 * (a + 2))).collect()
}

/// Candidate chains in one block (h-projections of every 10-vertex
/// diagram) and their boundaries.
fn block_candidates(block: CorrectionBlock, g: Genus, budget: &Budget) -> Result<(Vec<FormalVec>, Vec<FormalVec>)> {
    let (a, _) = block.bidegree();
    let (la, lb) = (a + 2, 8 - a);
    let mut chains = Vec::new();
    let mut boundaries = Vec::new();
    for r in 0..double_factorial_odd(5) as usize {
        if r % 64 == 0 {
            budget.check_time("cycle candidates")?;
        }
        let mut c = FormalVec::basis(5, r).h_projector_on(0, la).h_projector_on(la, lb);
        if block == CorrectionBlock::ThreeThreeOffTrace {
            let off = c.sub(&project_s3_block(&c, 0, g));
            c = off.sub(&off.permute(&block_swap(3)));
        }
        if c.is_formally_zero() {
            continue;
        }
        boundaries.push(c.derivation_bracket(la, g));
        chains.push(c);
    }
    Ok((chains, boundaries))
}

/// The invariant of Λ²([3] ⊂ h(3)): the first diagram whose block
/// projections give a nonzero trace cochain. Returns the seed diagram, the
/// chain and the cochain value.
pub fn s3_wedge_chain(g: Genus, budget: &Budget) -> Result<(String, FormalChain, Rational)> {
    if g.get() < 2 {
        return Err(Error::InvalidArgument("the S3H copy in h(3) needs g >= 2".into()));
    }
    let swap = block_swap(3);
    for r in 0..double_factorial_odd(5) as usize {
        budget.check_time("invariant 2-cycle search")?;
        let a = FormalVec::basis(5, r).h_projector_on(0, 5).h_projector_on(5, 5);
        if a.is_formally_zero() {
            continue;
        }
        let a = project_s3_block(&project_s3_block(&a, 0, g), 5, g);
        let u = a.sub(&a.permute(&swap));
        let value = formal_cochain(&u, g);
        if !value.is_zero() {
            let seed = LinearChordDiagram::unrank(5, r).to_string();
            return Ok((seed, FormalChain { bidegree: (3, 3), chain: u }, value));
        }
    }
    Err(Error::Inconsistent("no chain in the S3H part has nonzero trace cochain".into()))
}

/// Searches for u in Λ²([3] ⊂ h(3)) with nonzero trace cochain, then
/// solves ∂v = ∂u with v in h(1) ∧ h(5), widening to h(2) ∧ h(4) and then
/// to the part of h(3) ∧ h(3) killed by the trace when that fails.
pub fn find_invariant_two_cycle(g: Genus, budget: &Budget) -> Result<InvariantCycle> {
    let (seed, u, cochain) = s3_wedge_chain(g, budget)?;
    let bu = u.boundary(g);
    let boundary_u_nonzero = !bu.vanishes_at(g);
    let order = [CorrectionBlock::OneFive, CorrectionBlock::TwoFour, CorrectionBlock::ThreeThreeOffTrace];
    let mut chains: Vec<(CorrectionBlock, FormalVec)> = Vec::new();
    let mut boundaries: Vec<FormalVec> = Vec::new();
    let mut searched = Vec::new();
    let mut solution = None;
    for block in order {
        if !searched.is_empty() {
            info!("no correction term in {searched:?}; widening to {block:?}");
        }
        searched.push(block);
        let (c, b) = block_candidates(block, g, budget)?;
        chains.extend(c.into_iter().map(|x| (block, x)));
        boundaries.extend(b);
        if let Some(coef) = solve_at(&boundaries, &bu, g)? {
            solution = Some(coef);
            break;
        }
    }
    let coef = solution.ok_or_else(|| Error::Inconsistent(format!("no v with dv = du in {searched:?}")))?;
    let mut v: Vec<FormalChain> = Vec::new();
    for block in &searched {
        let mut acc = FormalVec::zero(5);
        for (c, (b, x)) in coef.iter().zip(&chains) {
            if b == block && !c.is_zero() {
                acc = acc.axpy(c, x);
            }
        }
        if !acc.is_formally_zero() {
            v.push(FormalChain { bidegree: block.bidegree(), chain: acc });
        }
    }
    let mut residual = bu.clone();
    let mut v_cochain = Rational::zero();
    for x in &v {
        residual = residual.sub(&x.boundary(g));
        if x.bidegree == (3, 3) {
            v_cochain += formal_cochain(&x.chain, g);
        }
    }
    Ok(InvariantCycle {
        g: g.get(),
        seed,
        u,
        v,
        searched,
        boundary_u_nonzero,
        cycle_boundary_vanishes: residual.vanishes_at(g),
        cochain: &cochain - &v_cochain,
        v_cochain,
    })
}
