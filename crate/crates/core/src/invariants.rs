//! Sp-invariant parts of the Lie and derivation spaces, computed with the
//! formal chord-diagram calculus.

use serde::Serialize;

use crate::chord::{double_factorial_odd, LinearChordDiagram};
use crate::error::{Error, Result};
use crate::formal::{intersection_dim, rank_at, FormalVec, MAX_VERTICES};
use crate::rational::Rational;
use crate::symplectic::Genus;

fn all_diagrams(k: usize) -> Vec<FormalVec> {
    (0..double_factorial_odd(k) as usize).map(|r| FormalVec::basis(k, r)).collect()
}

fn check_vertices(n: usize) -> Result<()> {
    if n > MAX_VERTICES {
        return Err(Error::ResourceLimit(format!("{n} vertices exceed the formal bound of {MAX_VERTICES}")));
    }
    Ok(())
}

/// ℓ_C = (1⊗p_{2k+1}) a_{C₀⊔C}, where C₀ joins the two new first vertices.
pub fn formal_ell(c: &LinearChordDiagram) -> FormalVec {
    let n = c.vertices();
    FormalVec::basis(1, 0).tensor(&FormalVec::diagram(c)).lie_projector_on(1, n + 1)
}

/// ξ_C: the sum of ℓ_C over the 2k+2 cyclic rotations.
pub fn formal_xi(c: &LinearChordDiagram) -> FormalVec {
    formal_ell(c).cyclic_sum_on(0, c.vertices() + 2)
}

/// ad(u): on the block [start, end) read as u⊗Z, returns u⊗Z − Z⊗u.
fn ad_on(t: &FormalVec, start: usize, end: usize) -> FormalVec {
    let n = t.vertices();
    let s: Vec<usize> = (0..n)
        .map(|p| {
            if p == start {
                end - 1
            } else if p > start && p < end {
                p - 1
            } else {
                p
            }
        })
        .collect();
    t.sub(&t.permute(&s))
}

/// u₁⊗⋯⊗u_m ↦ [u₁,[u₂,…[u_m, ω₀]]]: the invariant part of I(m+2) is the
/// image of the invariants of H^{⊗m}.
pub fn formal_ideal_element(v: &FormalVec) -> FormalVec {
    let m = v.vertices();
    let mut t = v.tensor(&FormalVec::basis(1, 0));
    for p in (0..m).rev() {
        t = ad_on(&t, p, m + 2);
    }
    t
}

/// Spanning set of L(2k)^Sp: p_{2k} a_C over all C.
pub fn lie_invariants(k: usize) -> Vec<FormalVec> {
    all_diagrams(k).iter().map(|v| v.lie_projector()).collect()
}

/// Spanning set of I(2k)^Sp.
pub fn ideal_invariants(k: usize) -> Vec<FormalVec> {
    if k < 1 {
        return Vec::new();
    }
    if k == 1 {
        return vec![FormalVec::basis(1, 0)];
    }
    all_diagrams(k - 1).iter().map(formal_ideal_element).collect()
}

/// Spanning set of h(2k)^Sp: the h-projector applied to every a_C with
/// k+1 chords.
pub fn h_invariants(k: usize) -> Vec<FormalVec> {
    all_diagrams(k + 1).iter().map(|v| v.h_projector_on(0, 2 * k + 2)).collect()
}

/// Spanning set of (H⊗I(2k+1))^Sp: u₀⊗[u₁,[u₂,…[u_{2k−1}, ω₀]]].
pub fn h_ideal_invariants(k: usize) -> Vec<FormalVec> {
    all_diagrams(k).iter().map(|v| {
        let n = v.vertices();
        let mut t = v.tensor(&FormalVec::basis(1, 0));
        for p in (1..n).rev() {
            t = ad_on(&t, p, n + 2);
        }
        t
    }).collect()
}

pub fn ell_rank(k: usize, g: Genus) -> Result<usize> {
    check_vertices(2 * k + 2)?;
    let v: Vec<FormalVec> = crate::chord::enumerate_unchecked(k).iter().map(formal_ell).collect();
    rank_at(&v, g)
}

pub fn xi_rank(k: usize, g: Genus) -> Result<usize> {
    check_vertices(2 * k + 2)?;
    let v: Vec<FormalVec> = crate::chord::enumerate_unchecked(k).iter().map(formal_xi).collect();
    rank_at(&v, g)
}

/// dim L(2k)^Sp.
pub fn lie_invariant_dim(k: usize, g: Genus) -> Result<usize> {
    check_vertices(2 * k)?;
    rank_at(&lie_invariants(k), g)
}

/// dim L_g(2k)^Sp = dim L(2k)^Sp − dim I(2k)^Sp.
pub fn surface_lie_invariant_dim(k: usize, g: Genus) -> Result<usize> {
    check_vertices(2 * k)?;
    Ok(rank_at(&lie_invariants(k), g)? - rank_at(&ideal_invariants(k), g)?)
}

/// dim h(2k)^Sp.
pub fn h_invariant_dim(k: usize, g: Genus) -> Result<usize> {
    check_vertices(2 * k + 2)?;
    rank_at(&h_invariants(k), g)
}

/// dim j(2k)^Sp = dim (h(2k)^Sp ∩ (H⊗I(2k+1))^Sp).
pub fn j_invariant_dim(k: usize, g: Genus) -> Result<usize> {
    check_vertices(2 * k + 2)?;
    intersection_dim(&h_invariants(k), &h_ideal_invariants(k), g)
}

/// The decomposition of h(2k)^Sp into the ideal part j, the inner part
/// L_g, the Johnson image and the rest. The last two are only separated
/// by a degree-2k generation run, so they are reported jointly unless
/// certified.
#[derive(Clone, Debug, Serialize)]
pub struct SplitTable {
    pub degree: usize,
    pub g: usize,
    pub j: usize,
    #[serde(rename = "L")]
    pub inner: usize,
    pub imtau: Option<usize>,
    pub cok: Option<usize>,
    pub imtau_plus_cok: usize,
    pub total: usize,
    pub xi_rank: usize,
    pub imtau_certified: bool,
    pub note: String,
}

pub fn split_table(k: usize, g: Genus) -> Result<SplitTable> {
    let total = h_invariant_dim(k, g)?;
    let j = j_invariant_dim(k, g)?;
    let inner = surface_lie_invariant_dim(k, g)?;
    let xi = xi_rank(k, g)?;
    let rest = total
        .checked_sub(j + inner)
        .ok_or_else(|| Error::Inconsistent("j and L_g exceed the total".into()))?;
    Ok(SplitTable {
        degree: 2 * k,
        g: g.get(),
        j,
        inner,
        imtau: None,
        cok: None,
        imtau_plus_cok: rest,
        total,
        xi_rank: xi,
        imtau_certified: false,
        note: "stretch: the Johnson image and cokernel are not separated without generating the image in this degree".into(),
    })
}

/// Formal invariant: the tensor Σ c_C a_C written as diagram strings.
pub fn describe(v: &FormalVec) -> Vec<(String, Rational)> {
    if v.chords() == 0 {
        return v.terms().iter().map(|(_, c)| ("()".to_string(), c.clone())).collect();
    }
    v.terms()
        .iter()
        .map(|(r, c)| (LinearChordDiagram::unrank(v.chords(), *r as usize).to_string(), c.clone()))
        .collect()
}
