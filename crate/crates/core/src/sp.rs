//! The infinitesimal sp(2g) action, the Casimir operator and Weyl dimensions.

use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, Echelon, SparseMatrix, SparseVector};
use crate::rational::Rational;
use crate::space::binom;
use crate::subspace::weight_key;
use crate::symplectic::{mu, Genus, Letter};
use crate::tensor::{letter_at, pack, Tensor, TermMap, Word};

/// A Young diagram [a₁ ≥ a₂ ≥ …], trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!("parts {parts:?} are not weakly decreasing")));
        }
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn rows(&self) -> usize {
        self.parts.len()
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "[0]");
        }
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", s.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts "[3,1,1]" and the compact exponent form "[31^2]" (single
    /// digit parts and exponents). The brackets may be omitted.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse partition {s:?}"));
        let t = s.trim();
        let inner = match t.strip_prefix('[') {
            Some(r) => r.strip_suffix(']').ok_or_else(bad)?,
            None => t,
        };
        let inner: String = inner.chars().filter(|c| !c.is_whitespace()).collect();
        let mut parts = Vec::new();
        if inner.contains(',') {
            for p in inner.split(',') {
                parts.push(p.parse::<usize>().map_err(|_| bad())?);
            }
        } else {
            let chars: Vec<char> = inner.chars().collect();
            let mut i = 0;
            while i < chars.len() {
                let d = chars[i].to_digit(10).ok_or_else(bad)? as usize;
                i += 1;
                let mut reps = 1;
                if i < chars.len() && chars[i] == '^' {
                    i += 1;
                    reps = chars.get(i).and_then(|c| c.to_digit(10)).ok_or_else(bad)? as usize;
                    i += 1;
                }
                parts.extend(std::iter::repeat(d).take(reps));
            }
        }
        Partition::new(parts)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a sum such as "[1^6]+[1^4]+[0]".
pub fn parse_sum(s: &str) -> Result<Vec<Partition>> {
    s.split('+').map(|p| p.trim().parse()).collect()
}

/// Dimension of the irreducible Sp(2g) representation with highest weight
/// `p`; zero when `p` has more than g rows.
pub fn weyl_dim(p: &Partition, g: Genus) -> u128 {
    let g = g.get();
    if p.rows() > g {
        return 0;
    }
    let lam: Vec<i64> = (0..g).map(|i| p.parts.get(i).copied().unwrap_or(0) as i64).collect();
    let l: Vec<i64> = (0..g).map(|i| lam[i] + (g - i) as i64).collect();
    let m: Vec<i64> = (0..g).map(|i| (g - i) as i64).collect();
    let mut num = Rational::one();
    for i in 0..g {
        num *= Rational::new(l[i], m[i]);
        for j in i + 1..g {
            num *= Rational::new((l[i] - l[j]) * (l[i] + l[j]), (m[i] - m[j]) * (m[i] + m[j]));
        }
    }
    num.to_i64().expect("integral dimension") as u128
}

/// Casimir eigenvalue ⟨λ, λ+2ρ⟩ with ρ = (g, g−1, …, 1).
pub fn casimir_eigenvalue(p: &Partition, g: Genus) -> i64 {
    p.parts.iter().enumerate().map(|(i, &a)| a as i64 * (a as i64 + 2 * (g.get() - i) as i64)).sum()
}

/// The generator X_{ab}: w ↦ μ(e_a, w) e_b + μ(e_b, w) e_a (a ≤ b). These
/// span sp(2g) ≅ S²H.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpGenerator {
    pub a: Letter,
    pub b: Letter,
}

impl SpGenerator {
    /// Image of a basis letter as (letter, coefficient) pairs.
    pub fn image(&self, w: Letter) -> Vec<(Letter, i64)> {
        let mut out = Vec::with_capacity(2);
        let ca = mu(self.a, w);
        let cb = mu(self.b, w);
        if self.a == self.b {
            if ca != 0 {
                out.push((self.a, 2 * ca));
            }
        } else {
            if ca != 0 {
                out.push((self.b, ca));
            }
            if cb != 0 {
                out.push((self.a, cb));
            }
        }
        out
    }
}

pub fn generators(g: Genus) -> Vec<SpGenerator> {
    let r = g.rank() as Letter;
    (0..r).flat_map(|a| (a..r).map(move |b| SpGenerator { a, b })).collect()
}

fn set_letter(w: Word, n: usize, i: usize, l: Letter) -> Word {
    let shift = 4 * (n - 1 - i);
    (w & !(0xF << shift)) | ((l as Word) << shift)
}

/// Derivation action of a generator across all tensor factors.
pub fn act(x: &SpGenerator, t: &Tensor) -> Tensor {
    let n = t.degree();
    let mut m = TermMap::new();
    for (w, c) in t.terms() {
        for i in 0..n {
            for (l, v) in x.image(letter_at(*w, n, i)) {
                m.add(set_letter(*w, n, i, l), c * &Rational::from_int(v));
            }
        }
    }
    m.finish(t.genus(), n)
}

/// Swaps factors i and j.
fn swap(t: &Tensor, i: usize, j: usize) -> Tensor {
    let n = t.degree();
    let mut s: Vec<usize> = (0..n).collect();
    s.swap(i, j);
    t.permute(&s).expect("valid permutation")
}

/// K_ij: contract factors i, j and put ω₀ back in their places.
fn contract_reinsert(t: &Tensor, i: usize, j: usize) -> Tensor {
    let n = t.degree();
    let g = t.genus();
    let mut m = TermMap::new();
    for (w, c) in t.terms() {
        let v = mu(letter_at(*w, n, i), letter_at(*w, n, j));
        if v == 0 {
            continue;
        }
        for k in 0..g.get() as Letter {
            let (x, y) = (2 * k, 2 * k + 1);
            let w1 = set_letter(set_letter(*w, n, i, x), n, j, y);
            let w2 = set_letter(set_letter(*w, n, i, y), n, j, x);
            m.add(w1, c * &Rational::from_int(v));
            m.add(w2, c * &Rational::from_int(-v));
        }
    }
    m.finish(g, n)
}

/// The quadratic Casimir on H^{⊗m}, normalized so that it acts on an
/// irreducible [λ] by ⟨λ, λ+2ρ⟩:
/// m(2g+1) + 2 Σ_{i<j} (P_ij − K_ij).
pub fn casimir(t: &Tensor) -> Tensor {
    let n = t.degree();
    let g = t.genus();
    let mut acc = TermMap::new();
    acc.add_scaled(t, &Rational::from_int((n * (2 * g.get() + 1)) as i64));
    let two = Rational::from_int(2);
    for i in 0..n {
        for j in i + 1..n {
            acc.add_scaled(&swap(t, i, j), &two);
            acc.add_scaled(&contract_reinsert(t, i, j), &-two.clone());
        }
    }
    acc.finish(g, n)
}

/// Σ_{a,b} B^{ab} X_a X_b for the trace form B(X, Y) = tr(XY) on H, scaled
/// by `scale`. Used to validate [`casimir`].
pub fn casimir_from_generators(t: &Tensor, scale: &Rational) -> Result<Tensor> {
    let g = t.genus();
    let gens = generators(g);
    let r = g.rank() as Letter;
    let n = gens.len();
    let trace_form = |x: &SpGenerator, y: &SpGenerator| -> i64 {
        let mut s = 0;
        for w in 0..r {
            for (l, c) in y.image(w) {
                for (l2, c2) in x.image(l) {
                    if l2 == w {
                        s += c * c2;
                    }
                }
            }
        }
        s
    };
    let rows: Vec<Vec<i64>> = gens.iter().map(|x| gens.iter().map(|y| trace_form(x, y)).collect()).collect();
    let b = SparseMatrix::from_int_rows(&rows);
    let mut inv_cols = Vec::with_capacity(n);
    for j in 0..n {
        let col = linalg::solve(&b, &SparseVector::unit(n, j))?
            .ok_or_else(|| Error::Inconsistent("trace form is degenerate".into()))?;
        inv_cols.push(col);
    }
    let mut acc = TermMap::new();
    let acted: Vec<Tensor> = gens.iter().map(|x| act(x, t)).collect();
    for (j, col) in inv_cols.iter().enumerate() {
        for (i, c) in col.entries() {
            acc.add_scaled(&act(&gens[*i], &acted[j]), &(c * scale));
        }
    }
    Ok(acc.finish(g, t.degree()))
}

/// Applies Π_{μ≠target} (C − λ_μ)/(λ_target − λ_μ).
pub fn isotypic_project(t: &Tensor, target: &Partition, constituents: &[Partition]) -> Result<Tensor> {
    let g = t.genus();
    if !constituents.contains(target) {
        return Err(Error::InvalidArgument(format!("{target} is not among the constituents")));
    }
    let present: Vec<&Partition> = constituents.iter().filter(|p| p.rows() <= g.get()).collect();
    let lt = casimir_eigenvalue(target, g);
    let mut seen: FxHashMap<i64, &Partition> = FxHashMap::default();
    for p in &present {
        let l = casimir_eigenvalue(p, g);
        if let Some(q) = seen.insert(l, p) {
            if q != *p {
                return Err(Error::InvalidArgument(format!("{q} and {p} share the Casimir eigenvalue {l}")));
            }
        }
    }
    let mut cur = t.clone();
    let mut done: Vec<i64> = Vec::new();
    for p in present {
        let l = casimir_eigenvalue(p, g);
        if l == lt || done.contains(&l) {
            continue;
        }
        done.push(l);
        let c = casimir(&cur);
        cur = c.axpy(&Rational::from_int(-l), &cur).scale(&Rational::new(1, lt - l));
    }
    Ok(cur)
}

/// dim of the joint kernel of all generators on H^{⊗n} (only weight zero
/// words can contribute).
pub fn invariant_kernel_dim(n: usize, g: Genus) -> usize {
    let r = g.rank();
    let mut words: Vec<Word> = Vec::new();
    let total = r.pow(n as u32);
    for idx in 0..total {
        let mut x = idx;
        let mut letters = vec![0 as Letter; n];
        for i in (0..n).rev() {
            letters[i] = (x % r) as Letter;
            x /= r;
        }
        let w = pack(&letters);
        if weight_key(w, n) == 0 {
            words.push(w);
        }
    }
    let gens = generators(g);
    let stride = 1usize << (4 * n);
    let mut ech = Echelon::new();
    for w in &words {
        let t = Tensor::from_terms(g, n, [(*w, Rational::one())]);
        let mut entries = Vec::new();
        for (gi, x) in gens.iter().enumerate() {
            for (iw, c) in act(x, &t).terms() {
                entries.push((gi * stride + *iw as usize, c.clone()));
            }
        }
        entries.sort_by_key(|e| e.0);
        ech.insert_entries(&entries);
    }
    words.len() - ech.rank()
}

/// One column of the degree ≤ 4 structure table.
#[derive(Clone, Debug, Serialize)]
pub struct TableColumn {
    pub name: &'static str,
    pub partitions: Vec<Partition>,
    pub dim: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub degree: usize,
    pub g: usize,
    pub h_dim: u128,
    pub columns: Vec<TableColumn>,
    pub row_sum: u128,
    pub equal: bool,
}

/// The listed decomposition of h(k), k ≤ 4, by columns j, L_g, im τ,
/// cokernel (without trace) and trace.
pub fn table_row(k: usize) -> Result<Vec<(&'static str, &'static str)>> {
    Ok(match k {
        1 => vec![("L_g", "[1]"), ("imtau", "[1^3]")],
        2 => vec![("j", "[0]"), ("L_g", "[1^2]"), ("imtau", "[2^2]")],
        3 => vec![("L_g", "[21]"), ("imtau", "[31^2]"), ("Tr", "[3]")],
        4 => vec![
            ("j", "[2]"),
            ("L_g", "[31]+[21^2]+[2]"),
            ("imtau", "[42]+[31^3]+[2^3]+[31]+[2]"),
            ("cok", "[21^2]"),
        ],
        _ => return Err(Error::InvalidArgument(format!("the table covers degrees 1..=4, got {k}"))),
    })
}

pub fn table_check(k: usize, g: Genus) -> Result<TableReport> {
    let mut columns = Vec::new();
    for (name, list) in table_row(k)? {
        let partitions = parse_sum(list)?;
        let dim = partitions.iter().map(|p| weyl_dim(p, g)).sum();
        columns.push(TableColumn { name, partitions, dim });
    }
    let row_sum = columns.iter().map(|c| c.dim).sum();
    let h_dim = crate::derivation::h_dimension(k, g.get());
    Ok(TableReport { degree: k, g: g.get(), h_dim, columns, row_sum, equal: h_dim == row_sum })
}

/// A dimension identity between a listed decomposition and a known total.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionCheck {
    pub name: String,
    pub g: usize,
    pub listed: Vec<Partition>,
    pub listed_total: u128,
    pub expected: u128,
    pub equal: bool,
}

fn decomposition(name: &str, g: Genus, list: &str, expected: u128) -> Result<DecompositionCheck> {
    let listed = parse_sum(list)?;
    let listed_total = listed.iter().map(|p| weyl_dim(p, g)).sum();
    Ok(DecompositionCheck { name: name.into(), g: g.get(), listed, listed_total, expected, equal: listed_total == expected })
}

/// Λ²U = [1⁶]+[1⁴]+[1²]+[2²1²]+[2²]+[0] against C(dim U, 2).
pub fn lambda2_u_check(g: Genus) -> Result<DecompositionCheck> {
    let n = 2 * g.get() as u128;
    let du = binom(n, 3) - n;
    decomposition("Lambda2 U", g, "[1^6]+[1^4]+[1^2]+[2^21^2]+[2^2]+[0]", binom(du, 2))
}

/// Λ²S³H = [51]+[4]+[3²]+[2²]+[1²]+[0] against C(dim S³H, 2).
pub fn lambda2_s3_check(g: Genus) -> Result<DecompositionCheck> {
    let n = 2 * g.get() as u128;
    let ds = binom(n + 2, 3);
    decomposition("Lambda2 S3H", g, "[51]+[4]+[3^2]+[2^2]+[1^2]+[0]", binom(ds, 2))
}

/// [1³]⊗([2²]+[0]) against its listed decomposition.
pub fn t1_t2_check(g: Genus) -> Result<DecompositionCheck> {
    let a = weyl_dim(&"[1^3]".parse()?, g);
    let b = weyl_dim(&"[2^2]".parse()?, g);
    decomposition(
        "[1^3] x ([2^2]+[0])",
        g,
        "[3^21]+[321^2]+[2^21^3]+[31^2]+[32]+[21^3]+[2^21]+[21]+[1^3]+[1^3]",
        a * (b + 1),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chord::enumerate_unchecked;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g(n: usize) -> Genus {
        Genus::new(n).unwrap()
    }

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn random_tensor(rng: &mut ChaCha8Rng, gg: Genus, k: usize, terms: usize) -> Tensor {
        let mut m = TermMap::new();
        for _ in 0..terms {
            let letters: Vec<Letter> = (0..k).map(|_| rng.gen_range(0..gg.rank() as Letter)).collect();
            m.add_int(pack(&letters), rng.gen_range(-3..=3));
        }
        m.finish(gg, k)
    }

    /// King's symplectic tableaux: semistandard fillings from
    /// 1 < 1' < 2 < 2' < … < g < g' with entries in row i at least i.
    fn king_count(part: &[usize], g: usize) -> u128 {
        let cells: Vec<(usize, usize)> =
            part.iter().enumerate().flat_map(|(r, &len)| (0..len).map(move |c| (r, c))).collect();
        let mut fill = vec![vec![0usize; part.first().copied().unwrap_or(0)]; part.len()];
        fn rec(i: usize, cells: &[(usize, usize)], fill: &mut Vec<Vec<usize>>, g: usize) -> u128 {
            if i == cells.len() {
                return 1;
            }
            let (r, c) = cells[i];
            let mut total = 0;
            for v in 0..2 * g {
                if v / 2 < r {
                    continue;
                }
                if c > 0 && fill[r][c - 1] > v {
                    continue;
                }
                if r > 0 && fill[r - 1][c] >= v {
                    continue;
                }
                fill[r][c] = v;
                total += rec(i + 1, cells, fill, g);
            }
            total
        }
        rec(0, &cells, &mut fill, g)
    }

    fn partitions_up_to(n: usize) -> Vec<Vec<usize>> {
        fn gen(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            out.push(cur.clone());
            for a in (1..=max.min(n)).rev() {
                cur.push(a);
                gen(n - a, a, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        gen(n, n, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn partition_text_forms() {
        assert_eq!(p("[3,1,1]").parts(), &[3, 1, 1]);
        assert_eq!(p("[31^2]"), p("[3,1,1]"));
        assert_eq!(p("2,1"), p("[2,1]"));
        assert_eq!(p("[2^21^2]").parts(), &[2, 2, 1, 1]);
        assert_eq!(p("[0]").rows(), 0);
        assert_eq!(p("[3,1,1]").to_string(), "[3,1,1]");
        assert!("[1,2]".parse::<Partition>().is_err());
        assert_eq!(serde_json::to_string(&p("[21]")).unwrap(), "\"[2,1]\"");
    }

    #[test]
    fn weyl_dimension_examples() {
        for gg in 1..=5 {
            assert_eq!(weyl_dim(&p("[1]"), g(gg)), 2 * gg as u128);
            assert_eq!(weyl_dim(&p("[0]"), g(gg)), 1);
        }
        assert_eq!(weyl_dim(&p("[1^3]"), g(3)), 14);
        assert_eq!(weyl_dim(&p("[31^3]"), g(3)), 0);
        let l = lambda2_u_check(g(6)).unwrap();
        assert!(l.equal, "{l:?}");
        assert_eq!(l.expected, 208 * 207 / 2);
    }

    #[test]
    fn weyl_dimension_matches_king_tableaux() {
        for gg in 1..=4 {
            for part in partitions_up_to(4) {
                let expect = if part.len() > gg { 0 } else { king_count(&part, gg) };
                assert_eq!(weyl_dim(&Partition::new(part.clone()).unwrap(), g(gg)), expect, "{part:?} g={gg}");
            }
        }
    }

    #[test]
    fn casimir_eigenvalue_examples() {
        assert_eq!(casimir_eigenvalue(&p("[21]"), g(2)), 15);
        assert_eq!(casimir_eigenvalue(&p("[3]"), g(2)), 21);
        assert_eq!(casimir_eigenvalue(&p("[21]"), g(3)), 21);
        assert_eq!(casimir_eigenvalue(&p("[31^2]"), g(3)), 35);
        assert_eq!(casimir_eigenvalue(&p("[3]"), g(3)), 27);
    }

    #[test]
    fn generators_preserve_mu_and_kill_invariants() {
        let gg = g(2);
        let om = Tensor::omega(gg);
        for x in generators(gg) {
            for u in 0..4 {
                for v in 0..4 {
                    let s: i64 = x.image(u).iter().map(|(l, c)| c * mu(*l, v)).sum::<i64>()
                        + x.image(v).iter().map(|(l, c)| c * mu(u, *l)).sum::<i64>();
                    assert_eq!(s, 0);
                }
            }
            assert!(act(&x, &om).is_zero());
            for k in 1..=3 {
                for c in enumerate_unchecked(k) {
                    assert!(act(&x, &c.a_tensor(gg)).is_zero());
                }
            }
        }
        assert_eq!(generators(g(3)).len(), 21);
    }

    #[test]
    fn action_is_a_lie_action() {
        let gg = g(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let gens = generators(gg);
        let t = random_tensor(&mut rng, gg, 3, 6);
        for x in &gens {
            for y in &gens {
                // [X, Y] applied letterwise.
                let lhs = act(x, &act(y, &t)).sub(&act(y, &act(x, &t)));
                let comm_on_letters = |l: Letter| {
                    let one = Tensor::basis(gg, &[l]);
                    act(x, &act(y, &one)).sub(&act(y, &act(x, &one)))
                };
                let rhs = t.leibniz(1, comm_on_letters);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn casimir_matches_generator_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for gg in 1..=3 {
            let gg = g(gg);
            let h = Tensor::basis(gg, &[0]);
            let c_h = casimir_from_generators(&h, &Rational::one()).unwrap();
            // Fix the normalization on H, where the Casimir is 2g+1.
            let lam = c_h.coeff(pack(&[0]));
            let scale = Rational::from_int(2 * gg.get() as i64 + 1) / lam;
            for deg in 1..=3 {
                let t = random_tensor(&mut rng, gg, deg, 5);
                assert_eq!(casimir_from_generators(&t, &scale).unwrap(), casimir(&t));
            }
        }
    }

    #[test]
    fn casimir_basic_values_and_commutation() {
        let gg = g(2);
        assert!(casimir(&Tensor::omega(gg)).is_zero());
        let h = Tensor::basis(gg, &[1]);
        assert_eq!(casimir(&h), h.scale(&Rational::from_int(5)));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = random_tensor(&mut rng, gg, 3, 6);
        for x in generators(gg) {
            assert_eq!(casimir(&act(&x, &t)), act(&x, &casimir(&t)));
        }
    }

    #[test]
    fn isotypic_projection_on_h_tensor_h() {
        // H⊗H = [2] + [1²] + [0] at g = 2.
        let gg = g(2);
        let cons = parse_sum("[2]+[1^2]+[0]").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let t = random_tensor(&mut rng, gg, 2, 8);
        let parts: Vec<Tensor> = cons.iter().map(|c| isotypic_project(&t, c, &cons).unwrap()).collect();
        let sum = parts.iter().fold(Tensor::zero(gg, 2), |a, b| a.add(b));
        assert_eq!(sum, t);
        for (c, x) in cons.iter().zip(&parts) {
            assert_eq!(&isotypic_project(x, c, &cons).unwrap(), x);
        }
        // The [0] part is a multiple of ω₀ and the [2] part is symmetric.
        assert!(parts[0].sub(&swap(&parts[0], 0, 1)).is_zero());
        assert!(casimir(&parts[2]).is_zero());
        assert!(isotypic_project(&t, &p("[1]"), &cons).is_err());
    }

    #[test]
    fn repeated_eigenvalues_are_reported() {
        // Search for two distinct weights sharing an eigenvalue.
        let gg = g(3);
        let cands = partitions_up_to(6);
        let mut found = None;
        'outer: for a in &cands {
            for b in &cands {
                if a != b && a.len() <= 3 && b.len() <= 3 {
                    let pa = Partition::new(a.clone()).unwrap();
                    let pb = Partition::new(b.clone()).unwrap();
                    if casimir_eigenvalue(&pa, gg) == casimir_eigenvalue(&pb, gg) {
                        found = Some((pa, pb));
                        break 'outer;
                    }
                }
            }
        }
        let (pa, pb) = found.expect("a clash exists");
        let t = Tensor::basis(gg, &[0]);
        assert!(isotypic_project(&t, &pa, &[pa.clone(), pb]).is_err());
    }

    #[test]
    fn invariant_kernel_matches_chord_ranks() {
        let b = crate::budget::Budget::default();
        for (k, gg) in [(1, 1), (1, 2), (2, 1), (2, 2), (3, 2)] {
            assert_eq!(invariant_kernel_dim(2 * k, g(gg)), crate::chord::invariant_dimension(k, g(gg), &b).unwrap());
        }
    }

    #[test]
    fn table_rows_at_genus_four() {
        for k in 1..=4 {
            let r = table_check(k, g(4)).unwrap();
            assert!(r.equal, "{r:?}");
        }
        assert_eq!(table_check(1, g(3)).unwrap().row_sum, 20);
        assert_eq!(table_check(2, g(3)).unwrap().row_sum, 105);
        assert_eq!(table_check(4, g(4)).unwrap().h_dim, 8820);
    }

    #[test]
    fn listed_decompositions() {
        assert!(lambda2_s3_check(g(3)).unwrap().equal);
        let t = t1_t2_check(g(6)).unwrap();
        assert!(t.equal, "{t:?}");
    }
}
