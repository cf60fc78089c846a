//! Trivalent graphs, their invariant tensors in Λ^{2k}(Λ³H) and Λ^{2k}U,
//! the graph functionals α_Γ, β_Γ and the first genus-degeneration
//! relation expressed in graphs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::budget::Budget;
use crate::chord::{enumerate, LinearChordDiagram};
use crate::error::{Error, Result};
use crate::linalg::{self, SparseMatrix};
use crate::rational::Rational;
use crate::space::{project_u_ext, space_rank, u_section_ext, Factor, SpaceTensor, TensorSpace};
use crate::symplectic::Genus;
use crate::tensor::TermMap;

/// Largest vertex count handled.
pub const MAX_GRAPH_VERTICES: usize = 8;

/// A trivalent multigraph (loops allowed) in canonical form: the edge list
/// is sorted and lexicographically minimal over all relabelings reached by
/// refinement.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrivalentGraph {
    vertices: usize,
    edges: Vec<(u8, u8)>,
}

impl TrivalentGraph {
    /// Builds and canonicalizes; every vertex must have degree 3.
    pub fn new(vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if vertices == 0 || vertices > MAX_GRAPH_VERTICES || vertices % 2 == 1 {
            return Err(Error::InvalidArgument(format!("vertex count {vertices} must be even and at most {MAX_GRAPH_VERTICES}")));
        }
        let mut deg = vec![0; vertices];
        for &(a, b) in edges {
            if a >= vertices || b >= vertices {
                return Err(Error::InvalidArgument(format!("edge {a}-{b} out of range")));
            }
            deg[a] += 1;
            deg[b] += 1;
        }
        if deg.iter().any(|&d| d != 3) {
            return Err(Error::InvalidArgument(format!("degrees {deg:?} are not all 3")));
        }
        let mut m = vec![vec![0u8; vertices]; vertices];
        for &(a, b) in edges {
            m[a][b] += 1;
            if a != b {
                m[b][a] += 1;
            }
        }
        Ok(canonical(&m))
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(u8, u8)] {
        &self.edges
    }

    pub fn has_loop(&self) -> bool {
        self.edges.iter().any(|(a, b)| a == b)
    }

    fn matrix(&self) -> Vec<Vec<u8>> {
        let mut m = vec![vec![0u8; self.vertices]; self.vertices];
        for &(a, b) in &self.edges {
            m[a as usize][b as usize] += 1;
            if a != b {
                m[b as usize][a as usize] += 1;
            }
        }
        m
    }

    /// Vertex sets of the connected components.
    fn component_sets(&self) -> Vec<Vec<usize>> {
        let n = self.vertices;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
            parent[ra] = rb;
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        groups.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.component_sets().len() == 1
    }

    /// Connected components as canonical graphs.
    pub fn components(&self) -> Vec<TrivalentGraph> {
        let mut out: Vec<TrivalentGraph> = self
            .component_sets()
            .into_iter()
            .map(|vs| {
                let idx = |v: u8| vs.iter().position(|&x| x == v as usize).expect("vertex in component");
                let edges: Vec<(usize, usize)> = self
                    .edges
                    .iter()
                    .filter(|(a, _)| vs.contains(&(*a as usize)))
                    .map(|&(a, b)| (idx(a), idx(b)))
                    .collect();
                TrivalentGraph::new(vs.len(), &edges).expect("component is trivalent")
            })
            .collect();
        out.sort();
        out
    }

    /// A linear chord diagram on 3n vertices whose graph is this one: the
    /// slots 3v, 3v+1, 3v+2 belong to vertex v and are used in order.
    pub fn lift(&self) -> LinearChordDiagram {
        let mut next: Vec<usize> = (0..self.vertices).map(|v| 3 * v).collect();
        let mut pairs = Vec::with_capacity(self.edges.len());
        for &(a, b) in &self.edges {
            let x = next[a as usize];
            next[a as usize] += 1;
            let y = next[b as usize];
            next[b as usize] += 1;
            pairs.push((x, y));
        }
        LinearChordDiagram::from_pairs(&pairs).expect("slots form a matching")
    }

    /// Every lift: all vertex orders times all slot orders of the edges.
    pub fn all_lifts(&self) -> Vec<LinearChordDiagram> {
        let n = 3 * self.vertices;
        let mut out: Vec<LinearChordDiagram> = enumerate_matchings(n)
            .into_iter()
            .filter(|d| graph_of_diagram(d).map(|g| &g == self).unwrap_or(false))
            .collect();
        out.sort_by_key(|d| d.rank());
        out
    }
}

fn enumerate_matchings(n: usize) -> Vec<LinearChordDiagram> {
    let k = n / 2;
    (0..crate::chord::double_factorial_odd(k) as usize).map(|r| LinearChordDiagram::unrank(k, r)).collect()
}

impl fmt::Display for TrivalentGraph {
    /// Edge list with 1-based vertices, e.g. "1-2,1-2,1-2".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.edges.iter().map(|(a, b)| format!("{}-{}", a + 1, b + 1)).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for TrivalentGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse graph {s:?}"));
        let mut edges = Vec::new();
        let mut max = 0;
        for e in s.split(',') {
            let (a, b) = e.trim().split_once('-').ok_or_else(bad)?;
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            if a == 0 || b == 0 {
                return Err(bad());
            }
            max = max.max(a).max(b);
            edges.push((a - 1, b - 1));
        }
        TrivalentGraph::new(max, &edges)
    }
}

impl Serialize for TrivalentGraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Equitable colour refinement: colours are ranks of (colour, sorted
/// neighbour profile), so the result does not depend on the labeling.
fn refine(m: &[Vec<u8>], colors: &mut Vec<usize>) {
    let n = m.len();
    loop {
        let sigs: Vec<(usize, Vec<(usize, u8)>)> = (0..n)
            .map(|v| {
                let mut prof: Vec<(usize, u8)> =
                    (0..n).filter(|&u| m[v][u] > 0).map(|u| (colors[u], m[v][u] + if u == v { 100 } else { 0 })).collect();
                prof.sort_unstable();
                (colors[v], prof)
            })
            .collect();
        let mut distinct = sigs.clone();
        distinct.sort();
        distinct.dedup();
        let next: Vec<usize> = sigs.iter().map(|s| distinct.binary_search(s).expect("present")).collect();
        let stable = distinct.len() == colors.iter().collect::<std::collections::BTreeSet<_>>().len();
        *colors = next;
        if stable {
            return;
        }
    }
}

fn edges_under(m: &[Vec<u8>], order: &[usize]) -> Vec<(u8, u8)> {
    // order[v] is the new label of v.
    let n = m.len();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a..n {
            for _ in 0..m[a][b] {
                let (x, y) = (order[a].min(order[b]), order[a].max(order[b]));
                edges.push((x as u8, y as u8));
            }
        }
    }
    edges.sort_unstable();
    edges
}

fn search(m: &[Vec<u8>], colors: Vec<usize>, best: &mut Option<Vec<(u8, u8)>>) {
    let mut colors = colors;
    refine(m, &mut colors);
    let n = m.len();
    let mut counts = vec![0; n];
    for &c in &colors {
        counts[c] += 1;
    }
    match (0..n).find(|&c| counts[c] > 1) {
        None => {
            let e = edges_under(m, &colors);
            if best.as_ref().is_none_or(|b| e < *b) {
                *best = Some(e);
            }
        }
        Some(cell) => {
            for v in (0..n).filter(|&v| colors[v] == cell) {
                // Individualize v: it gets the smallest label in its cell.
                let mut c2: Vec<usize> = colors.iter().map(|&c| 2 * c + 1).collect();
                c2[v] = 2 * cell;
                search(m, c2, best);
            }
        }
    }
}

fn canonical(m: &[Vec<u8>]) -> TrivalentGraph {
    let mut best = None;
    search(m, vec![0; m.len()], &mut best);
    TrivalentGraph { vertices: m.len(), edges: best.expect("at least one leaf") }
}

/// Brute-force canonical form over all n! relabelings (test oracle).
pub fn canonical_by_permutations(g: &TrivalentGraph) -> Vec<(u8, u8)> {
    let m = g.matrix();
    let n = g.vertices;
    let mut p: Vec<usize> = (0..n).collect();
    let mut best = edges_under(&m, &p);
    fn rec(k: usize, p: &mut Vec<usize>, m: &[Vec<u8>], best: &mut Vec<(u8, u8)>) {
        if k == p.len() {
            let e = edges_under(m, p);
            if e < *best {
                *best = e;
            }
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            rec(k + 1, p, m, best);
            p.swap(k, i);
        }
    }
    rec(0, &mut p, &m, &mut best);
    best
}

/// All trivalent graphs on `n` vertices up to isomorphism.
pub fn enumerate_graphs(n: usize, connected_only: bool, loopless_only: bool, budget: &Budget) -> Result<Vec<TrivalentGraph>> {
    if n % 2 == 1 || n == 0 {
        return Err(Error::InvalidArgument(format!("vertex count {n} must be positive and even")));
    }
    if n > MAX_GRAPH_VERTICES {
        return Err(Error::ResourceLimit(format!("{n} vertices exceed the bound of {MAX_GRAPH_VERTICES}")));
    }
    let mut connected: Vec<Vec<TrivalentGraph>> = vec![Vec::new()];
    for size in (2..=n).step_by(2) {
        if connected_only && size < n {
            connected.push(Vec::new());
            continue;
        }
        connected.push(enumerate_connected(size, budget)?);
    }
    let mut out: Vec<TrivalentGraph> = if connected_only {
        connected[n / 2].clone()
    } else {
        let mut all = std::collections::BTreeSet::new();
        unions(n, n, &connected, &mut Vec::new(), &mut all);
        all.into_iter().collect()
    };
    if loopless_only {
        out.retain(|g| !g.has_loop());
    }
    Ok(out)
}

/// Disjoint unions of connected graphs with nonincreasing sizes.
fn unions(
    left: usize,
    max: usize,
    connected: &[Vec<TrivalentGraph>],
    parts: &mut Vec<TrivalentGraph>,
    out: &mut std::collections::BTreeSet<TrivalentGraph>,
) {
    if left == 0 {
        out.insert(disjoint_union(parts));
        return;
    }
    for size in (2..=left.min(max)).rev().step_by(2) {
        for c in &connected[size / 2] {
            if parts.last().is_some_and(|p| p.vertices() == size && c < p) {
                continue;
            }
            parts.push(c.clone());
            unions(left - size, size, connected, parts, out);
            parts.pop();
        }
    }
}

fn disjoint_union(parts: &[TrivalentGraph]) -> TrivalentGraph {
    let mut edges = Vec::new();
    let mut offset = 0;
    for p in parts {
        edges.extend(p.edges.iter().map(|&(a, b)| (a as usize + offset, b as usize + offset)));
        offset += p.vertices;
    }
    TrivalentGraph::new(offset, &edges).expect("union of trivalent graphs")
}

/// Connected graphs, generated only in breadth-first labelings: the
/// smallest neighbour p(w) of each vertex w > 0 satisfies p(w) < w and is
/// nondecreasing in w. Every connected graph has such a labeling.
fn enumerate_connected(n: usize, budget: &Budget) -> Result<Vec<TrivalentGraph>> {
    let mut found = std::collections::BTreeSet::new();
    let mut m = vec![vec![0u8; n]; n];
    let mut rem = vec![3u8; n];
    let mut visited = 0u64;
    fill(0, &mut m, &mut rem, &mut |m| {
        visited += 1;
        let g = canonical(m);
        if g.is_connected() {
            found.insert(g);
        }
    });
    budget.check_work(visited, "graph enumeration")?;
    Ok(found.into_iter().collect())
}

/// Whether the rows 0..v (all complete) still allow a breadth-first labeling.
fn bfs_order_possible(m: &[Vec<u8>], v: usize) -> bool {
    let n = m.len();
    let mut last = 0;
    for w in 1..n {
        let p = (0..v.min(w)).find(|&u| m[u][w] > 0).unwrap_or(usize::MAX);
        if p == usize::MAX && w < v {
            return false;
        }
        if p < last {
            return false;
        }
        last = p;
    }
    true
}

/// Enumerates labeled multigraphs with all degrees 3, vertex by vertex.
fn fill<F: FnMut(&[Vec<u8>])>(v: usize, m: &mut Vec<Vec<u8>>, rem: &mut Vec<u8>, emit: &mut F) {
    let n = m.len();
    if !bfs_order_possible(m, v) {
        return;
    }
    if v == n {
        emit(m);
        return;
    }
    let r = rem[v];
    for loops in 0..=r / 2 {
        m[v][v] = loops;
        rem[v] = r - 2 * loops;
        distribute(v, v + 1, m, rem, emit);
        rem[v] = r;
        m[v][v] = 0;
    }
}

fn distribute<F: FnMut(&[Vec<u8>])>(v: usize, u: usize, m: &mut Vec<Vec<u8>>, rem: &mut Vec<u8>, emit: &mut F) {
    let n = m.len();
    if rem[v] == 0 {
        fill(v + 1, m, rem, emit);
        return;
    }
    if u >= n {
        return;
    }
    let cap = rem[v].min(rem[u]);
    for k in (0..=cap).rev() {
        m[v][u] = k;
        m[u][v] = k;
        rem[v] -= k;
        rem[u] -= k;
        distribute(v, u + 1, m, rem, emit);
        rem[v] += k;
        rem[u] += k;
    }
    m[v][u] = 0;
    m[u][v] = 0;
}

/// The graph of a chord diagram with 3k chords: vertex classes are the
/// consecutive triples, edges are the chords.
pub fn graph_of_diagram(c: &LinearChordDiagram) -> Result<TrivalentGraph> {
    let n = c.vertices();
    if n % 6 != 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("{} chords is not a positive multiple of 3", c.chords())));
    }
    let edges: Vec<(usize, usize)> = c.pairs().into_iter().map(|(a, b)| (a / 3, b / 3)).collect();
    TrivalentGraph::new(n / 3, &edges)
}

/// A product of connected graphs, kept in sorted order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphMonomial {
    components: Vec<TrivalentGraph>,
}

impl GraphMonomial {
    pub fn new(mut components: Vec<TrivalentGraph>) -> Result<Self> {
        if components.iter().any(|c| !c.is_connected()) {
            return Err(Error::InvalidArgument("monomial factors must be connected".into()));
        }
        components.sort();
        Ok(GraphMonomial { components })
    }

    pub fn of_graph(g: &TrivalentGraph) -> Self {
        GraphMonomial { components: g.components() }
    }

    pub fn components(&self) -> &[TrivalentGraph] {
        &self.components
    }

    pub fn vertices(&self) -> usize {
        self.components.iter().map(|c| c.vertices()).sum()
    }
}

impl fmt::Display for GraphMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| format!("({c})")).collect();
        write!(f, "{}", parts.join(""))
    }
}

impl Serialize for GraphMonomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// All monomials in connected graphs with `n` vertices in total.
pub fn graph_monomials(n: usize, budget: &Budget) -> Result<Vec<GraphMonomial>> {
    let mut out: Vec<GraphMonomial> =
        enumerate_graphs(n, false, false, budget)?.iter().map(GraphMonomial::of_graph).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

fn ext_wedge3(g: Genus, m: usize) -> TensorSpace {
    TensorSpace::new(g, vec![Factor::ext(m, Factor::Wedge3)])
}

fn check_size(vertices: usize, g: Genus) -> Result<()> {
    if vertices > 4 || g.get() > 4 {
        return Err(Error::ResourceLimit(format!(
            "graph tensors are materialized only for at most 4 vertices and g <= 4 (got {vertices}, g={})",
            g.get()
        )));
    }
    Ok(())
}

/// p_*(a_C) ∈ Λ^{2k}(Λ³H) for a diagram with 3k chords.
pub fn push_diagram(c: &LinearChordDiagram, g: Genus) -> Result<SpaceTensor> {
    let n = c.vertices();
    if n % 6 != 0 {
        return Err(Error::InvalidArgument("chord count must be a multiple of 3".into()));
    }
    SpaceTensor::project(&ext_wedge3(g, n / 3), &c.a_tensor(g))
}

/// a_Γ = p_*(a_C) for the standard lift C of Γ.
pub fn a_graph(gamma: &TrivalentGraph, g: Genus) -> Result<SpaceTensor> {
    check_size(gamma.vertices(), g)?;
    push_diagram(&gamma.lift(), g)
}

/// a of a monomial: the wedge product of its factors.
pub fn a_monomial(m: &GraphMonomial, g: Genus) -> Result<SpaceTensor> {
    check_size(m.vertices(), g)?;
    let mut acc: Option<SpaceTensor> = None;
    for c in m.components() {
        let t = a_graph(c, g)?;
        acc = Some(match acc {
            None => t,
            Some(a) => a.wedge(&t)?,
        });
    }
    acc.ok_or_else(|| Error::InvalidArgument("empty monomial".into()))
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// α_Γ(t) = α_C(i(t)) / (2k)! with i the signed embedding into H^{⊗6k}.
pub fn alpha_graph(gamma: &TrivalentGraph, t: &SpaceTensor) -> Result<Rational> {
    let n = gamma.vertices();
    let want = ext_wedge3(t.space().genus, n);
    if t.space() != &want {
        return Err(Error::InvalidArgument(format!("expected an element of {want}, got {}", t.space())));
    }
    if t.is_zero() {
        return Ok(Rational::zero());
    }
    let v = gamma.lift().alpha_eval(&t.embed()?)?;
    Ok(v * Rational::new(1, factorial(n)))
}

/// β_Γ = α_Γ ∘ q on Λ^{2k}U, through the q-section.
pub fn beta_graph(gamma: &TrivalentGraph, t: &SpaceTensor) -> Result<Rational> {
    if gamma.has_loop() {
        return Err(Error::InvalidArgument(format!("β is defined for loopless graphs, {gamma} has a loop")));
    }
    alpha_graph(gamma, &u_section_ext(t)?)
}

/// The displayed cocycle representative for e₁ on Λ²(Λ³H):
/// (−3 α_dumbbell + (2g−2) α_theta) / (2g+1).
pub fn e1_cocycle_functional(t: &SpaceTensor) -> Result<Rational> {
    let g = t.space().genus.get() as i64;
    if g < 2 {
        return Err(Error::InvalidArgument("the e1 functional needs g >= 2".into()));
    }
    let a1 = alpha_graph(&dumbbell(), t)?;
    let a2 = alpha_graph(&theta(), t)?;
    Ok((Rational::from_int(-3) * a1 + Rational::from_int(2 * g - 2) * a2) * Rational::new(1, 2 * g + 1))
}

pub fn theta() -> TrivalentGraph {
    "1-2,1-2,1-2".parse().expect("theta")
}

pub fn dumbbell() -> TrivalentGraph {
    "1-1,1-2,2-2".parse().expect("dumbbell")
}

/// Ranks of the graph invariants in degree two at one genus.
#[derive(Clone, Debug, Serialize)]
pub struct GraphRankReport {
    pub g: usize,
    pub monomials: Vec<GraphMonomial>,
    pub rank_wedge3: usize,
    pub rank_u: usize,
    pub alpha_matrix: Vec<Vec<Rational>>,
    pub alpha_rank: usize,
    pub beta_theta_on_theta: Rational,
    pub dumbbell_vanishes_in_u: bool,
}

pub fn degree_two_ranks(g: Genus, budget: &Budget) -> Result<GraphRankReport> {
    let mons = graph_monomials(2, budget)?;
    let graphs: Vec<TrivalentGraph> = mons.iter().map(|m| m.components()[0].clone()).collect();
    let a: Vec<SpaceTensor> = mons.iter().map(|m| a_monomial(m, g)).collect::<Result<_>>()?;
    let u: Vec<SpaceTensor> = a.iter().map(project_u_ext).collect::<Result<_>>()?;
    let alpha_matrix: Vec<Vec<Rational>> =
        graphs.iter().map(|gm| a.iter().map(|t| alpha_graph(gm, t)).collect::<Result<_>>()).collect::<Result<_>>()?;
    let alpha_rank = linalg::rank(&SparseMatrix::from_dense_rows(&alpha_matrix))?;
    let th = theta();
    let ti = graphs.iter().position(|x| *x == th).expect("theta present");
    let db = graphs.iter().position(|x| *x == dumbbell()).expect("dumbbell present");
    Ok(GraphRankReport {
        g: g.get(),
        rank_wedge3: space_rank(&a)?,
        rank_u: space_rank(&u)?,
        alpha_matrix,
        alpha_rank,
        beta_theta_on_theta: beta_graph(&th, &u[ti])?,
        dumbbell_vanishes_in_u: u[db].is_zero(),
        monomials: mons,
    })
}

/// The first relation among the a_C in genus 3k−1, pushed to graphs.
#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub k: usize,
    pub genus: usize,
    pub diagrams: usize,
    /// Σ a_C = 0 in H^{⊗6k} at the relation genus.
    pub vanishes: bool,
    /// Σ a_C ≠ 0 one genus higher.
    pub nonzero_above: bool,
    /// Number of diagrams per graph, ignoring signs.
    pub multiplicities: Vec<(GraphMonomial, usize)>,
    /// Σ_C p_*(a_C) = Σ c_Γ a_Γ.
    pub graph_expansion: Vec<(GraphMonomial, Rational)>,
    /// Whether Σ c_Γ a_Γ vanishes in Λ^{2k}(Λ³H) at the relation genus.
    pub expansion_vanishes: bool,
    /// Whether its image in Λ^{2k}U vanishes there.
    pub expansion_vanishes_in_u: bool,
}

pub fn extract_relation(k: usize, budget: &Budget) -> Result<RelationReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("k starts at 1".into()));
    }
    if k > 1 {
        return Err(Error::ResourceLimit(format!(
            "k={k} needs {} diagrams on {} vertices; only k = 1 is materialized",
            crate::chord::double_factorial_odd(3 * k),
            6 * k
        )));
    }
    let genus = Genus::new(3 * k - 1)?;
    let above = Genus::new(3 * k)?;
    let ds = enumerate(3 * k, budget)?;
    let sum_at = |g: Genus| {
        let mut m = TermMap::new();
        for c in &ds {
            m.add_scaled(&c.a_tensor(g), &Rational::one());
        }
        m.is_empty()
    };
    let vanishes = sum_at(genus);
    let nonzero_above = !sum_at(above);
    // Signs relating p_*(a_C) to a_Γ, read off at a genus where a_Γ ≠ 0.
    let mut mult: BTreeMap<GraphMonomial, usize> = BTreeMap::new();
    let mut coef: BTreeMap<GraphMonomial, Rational> = BTreeMap::new();
    for c in &ds {
        let gr = graph_of_diagram(c)?;
        let mono = GraphMonomial::of_graph(&gr);
        *mult.entry(mono.clone()).or_default() += 1;
        let pushed = push_diagram(c, above)?;
        let reference = a_monomial(&mono, above)?;
        let ratio = proportionality(&pushed, &reference)?;
        *coef.entry(mono).or_insert_with(Rational::zero) += ratio;
    }
    let mut expansion_sum: Option<SpaceTensor> = None;
    let mut expansion_u: Option<SpaceTensor> = None;
    for (mono, c) in &coef {
        let t = a_monomial(mono, genus)?.scale(c);
        let tu = project_u_ext(&t)?;
        expansion_sum = Some(match expansion_sum {
            None => t,
            Some(s) => s.add(&t),
        });
        expansion_u = Some(match expansion_u {
            None => tu,
            Some(s) => s.add(&tu),
        });
    }
    Ok(RelationReport {
        k,
        genus: genus.get(),
        diagrams: ds.len(),
        vanishes,
        nonzero_above,
        multiplicities: mult.into_iter().collect(),
        graph_expansion: coef.into_iter().collect(),
        expansion_vanishes: expansion_sum.is_none_or(|s| s.is_zero()),
        expansion_vanishes_in_u: expansion_u.is_none_or(|s| s.is_zero()),
    })
}

/// The scalar c with a = c·b (b nonzero), or an error.
fn proportionality(a: &SpaceTensor, b: &SpaceTensor) -> Result<Rational> {
    let Some((w, x)) = b.terms().iter().next() else {
        return Err(Error::InvalidArgument("reference tensor is zero".into()));
    };
    let c = a.coeff(w) / x.clone();
    if a != &b.scale(&c) {
        return Err(Error::Inconsistent("pushed diagram is not a multiple of its graph tensor".into()));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(n: usize) -> Genus {
        Genus::new(n).unwrap()
    }

    #[test]
    fn text_forms() {
        assert_eq!(theta().to_string(), "1-2,1-2,1-2");
        assert_eq!(dumbbell().to_string(), "1-1,1-2,2-2");
        assert!(dumbbell().has_loop() && !theta().has_loop());
        assert!("1-2,1-2".parse::<TrivalentGraph>().is_err());
        assert_eq!("2-1,2-1,1-2".parse::<TrivalentGraph>().unwrap(), theta());
    }

    #[test]
    fn graph_counts() {
        let b = Budget::default();
        let connected: Vec<usize> = [2, 4, 6, 8].iter().map(|&n| enumerate_graphs(n, true, false, &b).unwrap().len()).collect();
        assert_eq!(connected, vec![2, 5, 17, 71]);
        assert_eq!(enumerate_graphs(2, true, true, &b).unwrap(), vec![theta()]);
        // Loopless connected cubic multigraphs: 1, 2, 6, 20.
        let loopless: Vec<usize> = [2, 4, 6, 8].iter().map(|&n| enumerate_graphs(n, true, true, &b).unwrap().len()).collect();
        assert_eq!(loopless, vec![1, 2, 6, 20]);
        assert_eq!(graph_monomials(4, &b).unwrap().len(), 5 + 3);
    }

    #[test]
    fn canonical_form_is_relabeling_invariant() {
        let b = Budget::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2, 4, 6] {
            let all = enumerate_graphs(n, false, false, &b).unwrap();
            let brute: std::collections::BTreeSet<_> = all.iter().map(canonical_by_permutations).collect();
            assert_eq!(brute.len(), all.len(), "no collisions at n={n}");
            for gr in &all {
                for _ in 0..5 {
                    let mut p: Vec<usize> = (0..n).collect();
                    p.shuffle(&mut rng);
                    let edges: Vec<(usize, usize)> = gr.edges().iter().map(|&(a, b)| (p[a as usize], p[b as usize])).collect();
                    assert_eq!(&TrivalentGraph::new(n, &edges).unwrap(), gr);
                }
            }
        }
    }

    #[test]
    fn graphs_of_diagrams() {
        let c = LinearChordDiagram::from_pairs(&[(0, 3), (1, 4), (2, 5)]).unwrap();
        assert_eq!(graph_of_diagram(&c).unwrap(), theta());
        let c = LinearChordDiagram::from_pairs(&[(0, 1), (2, 3), (4, 5)]).unwrap();
        assert_eq!(graph_of_diagram(&c).unwrap(), dumbbell());
        assert!(graph_of_diagram(&LinearChordDiagram::from_pairs(&[(0, 1), (2, 3)]).unwrap()).is_err());
        let b = Budget::default();
        for n in [2, 4] {
            for gr in enumerate_graphs(n, false, false, &b).unwrap() {
                assert_eq!(graph_of_diagram(&gr.lift()).unwrap(), gr);
            }
        }
    }

    #[test]
    fn lift_independence_in_degree_two() {
        for gg in [2, 3] {
            for gr in [theta(), dumbbell()] {
                let a = a_graph(&gr, g(gg)).unwrap();
                let lifts = gr.all_lifts();
                assert!(lifts.len() > 1);
                for l in &lifts {
                    assert_eq!(push_diagram(l, g(gg)).unwrap(), a, "{gr} lift {l}");
                }
                // α is lift independent on a spanning set.
                for other in [theta(), dumbbell()] {
                    let t = a_graph(&other, g(gg)).unwrap();
                    let v = alpha_graph(&gr, &t).unwrap();
                    for l in &lifts {
                        assert_eq!(l.alpha_eval(&t.embed().unwrap()).unwrap() * Rational::new(1, 2), v);
                    }
                }
            }
        }
    }

    #[test]
    fn lift_independence_sampled_in_degree_four() {
        let b = Budget::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let gg = g(2);
        for gr in enumerate_graphs(4, false, false, &b).unwrap() {
            let a = a_graph(&gr, gg).unwrap();
            // Random lifts: relabel vertices and permute slots inside each vertex.
            for _ in 0..3 {
                let mut vp: Vec<usize> = (0..4).collect();
                vp.shuffle(&mut rng);
                let slots: Vec<Vec<usize>> = (0..4)
                    .map(|_| {
                        let mut s = vec![0, 1, 2];
                        s.shuffle(&mut rng);
                        s
                    })
                    .collect();
                let base = gr.lift();
                let pairs: Vec<(usize, usize)> = base
                    .pairs()
                    .into_iter()
                    .map(|(x, y)| {
                        let f = |p: usize| 3 * vp[p / 3] + slots[p / 3][p % 3];
                        (f(x), f(y))
                    })
                    .collect();
                let lift = LinearChordDiagram::from_pairs(&pairs).unwrap();
                assert_eq!(graph_of_diagram(&lift).unwrap(), gr);
                assert_eq!(push_diagram(&lift, gg).unwrap(), a);
            }
        }
    }

    #[test]
    fn loop_vanishing() {
        let b = Budget::default();
        for n in [2, 4] {
            for gr in enumerate_graphs(n, false, false, &b).unwrap() {
                let u = project_u_ext(&a_graph(&gr, g(3)).unwrap()).unwrap();
                assert_eq!(u.is_zero(), gr.has_loop(), "{gr}");
            }
        }
        let t = project_u_ext(&a_graph(&dumbbell(), g(3)).unwrap()).unwrap();
        assert!(beta_graph(&dumbbell(), &t).is_err());
        let u = project_u_ext(&a_graph(&theta(), g(3)).unwrap()).unwrap();
        assert!(beta_graph(&theta(), &t).unwrap().is_zero());
        assert!(!beta_graph(&theta(), &u).unwrap().is_zero());
    }

    #[test]
    fn degree_two_stable_ranks() {
        let b = Budget::default();
        for gg in [3, 4] {
            let r = degree_two_ranks(g(gg), &b).unwrap();
            assert_eq!((r.rank_wedge3, r.rank_u, r.alpha_rank), (2, 1, 2));
            assert!(r.dumbbell_vanishes_in_u);
            assert_eq!(r.alpha_matrix[0][1], r.alpha_matrix[1][0]);
        }
    }

    #[test]
    fn alpha_is_linear_and_kills_zero() {
        let gg = g(3);
        let a = a_graph(&theta(), gg).unwrap();
        let d = a_graph(&dumbbell(), gg).unwrap();
        let two = Rational::from_int(2);
        let combo = a.scale(&two).add(&d);
        for gr in [theta(), dumbbell()] {
            let lhs = alpha_graph(&gr, &combo).unwrap();
            let rhs = alpha_graph(&gr, &a).unwrap() * two.clone() + alpha_graph(&gr, &d).unwrap();
            assert_eq!(lhs, rhs);
            assert!(alpha_graph(&gr, &SpaceTensor::zero(a.space().clone())).unwrap().is_zero());
        }
    }

    #[test]
    fn e1_functional() {
        let gg = g(2);
        let a = a_graph(&theta(), gg).unwrap();
        let d = a_graph(&dumbbell(), gg).unwrap();
        for t in [&a, &d] {
            let expect = (Rational::from_int(-3) * alpha_graph(&dumbbell(), t).unwrap()
                + Rational::from_int(2) * alpha_graph(&theta(), t).unwrap())
                * Rational::new(1, 5);
            assert_eq!(e1_cocycle_functional(t).unwrap(), expect);
        }
        assert_eq!(e1_cocycle_functional(&a).unwrap(), Rational::new(576, 5));
    }

    #[test]
    fn first_relation() {
        let r = extract_relation(1, &Budget::default()).unwrap();
        assert_eq!((r.genus, r.diagrams), (2, 15));
        assert!(r.vanishes && r.nonzero_above);
        let mults: Vec<usize> = r.multiplicities.iter().map(|x| x.1).collect();
        assert_eq!(mults.iter().sum::<usize>(), 15);
        assert!(r.expansion_vanishes);
        assert!(r.expansion_vanishes_in_u);
        assert!(extract_relation(2, &Budget::default()).is_err());
    }
}
