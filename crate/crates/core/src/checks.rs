//! Self-contained verification reports shared by the command-line driver
//! and the acceptance suite: the Lie projector identity, the q-map, the
//! trace properties, the ℓ_C basis and Sp-invariance of the basic tensors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::budget::Budget;
use crate::chord::{double_factorial_odd, enumerate_unchecked};
use crate::derivation::{h_basis, j_ideal, DerivationElement, Flavor};
use crate::error::{Error, Result};
use crate::invariants::{ell_rank, formal_ell, formal_xi};
use crate::lie::apply_lie_projector;
use crate::rational::Rational;
use crate::sp::{act, generators};
use crate::space::{binom, embed_h_in_wedge3, q_map, space_rank, SpaceTensor, TensorSpace};
use crate::symplectic::{Genus, Letter};
use crate::tensor::{pack, Tensor, TermMap};

/// p_k(p_k(t)) = k·p_k(t) on full bases and on random tensors.
#[derive(Clone, Debug, Serialize)]
pub struct ProjectorReport {
    pub g: usize,
    pub full_basis_max_k: usize,
    pub full_basis_checked: usize,
    pub random_max_k: usize,
    pub random_checked: usize,
    pub seed: u64,
    pub failures: usize,
    pub holds: bool,
}

fn projector_identity(t: &Tensor) -> bool {
    let p = apply_lie_projector(t);
    apply_lie_projector(&p) == p.scale(&Rational::from_int(t.degree() as i64))
}

/// A random tensor of degree `k` with a few small integer coefficients.
pub fn random_tensor(rng: &mut ChaCha8Rng, g: Genus, k: usize, terms: usize) -> Tensor {
    let n = g.rank() as Letter;
    let mut m = TermMap::new();
    for _ in 0..terms {
        let letters: Vec<Letter> = (0..k).map(|_| rng.gen_range(0..n)).collect();
        m.add_int(pack(&letters), rng.gen_range(-3..=3));
    }
    m.finish(g, k)
}

pub fn pk_idempotent(
    g: Genus,
    full_basis_max_k: usize,
    random_count: usize,
    random_max_k: usize,
    seed: u64,
    budget: &Budget,
) -> Result<ProjectorReport> {
    if random_max_k > 16 || full_basis_max_k > 16 {
        return Err(Error::InvalidArgument("tensor degree is capped at 16".into()));
    }
    let n = g.rank();
    let full_work: u64 = (1..=full_basis_max_k).map(|k| (n as u64).pow(k as u32) << k).sum();
    budget.check_work(full_work, "projector identity on full bases")?;
    let mut failures = 0;
    let mut full = 0;
    for k in 1..=full_basis_max_k {
        let total = n.pow(k as u32);
        let ok = crate::exec::map_range(total, |i| {
            let mut r = i;
            let letters: Vec<Letter> = (0..k)
                .map(|_| {
                    let l = (r % n) as Letter;
                    r /= n;
                    l
                })
                .collect();
            projector_identity(&Tensor::basis(g, &letters))
        });
        full += total;
        failures += ok.iter().filter(|x| !**x).count();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Tensor> = (0..random_count)
        .map(|i| random_tensor(&mut rng, g, 1 + i % random_max_k.max(1), 4))
        .collect();
    budget.check_time("projector identity on random tensors")?;
    failures += crate::exec::map_slice(&samples, projector_identity).iter().filter(|x| !**x).count();
    Ok(ProjectorReport {
        g: g.get(),
        full_basis_max_k,
        full_basis_checked: full,
        random_max_k,
        random_checked: random_count,
        seed,
        failures,
        holds: failures == 0,
    })
}

/// q kills u∧ω₀ and is idempotent on Λ³H.
#[derive(Clone, Debug, Serialize)]
pub struct QMapReport {
    pub g: usize,
    pub h_basis_checked: usize,
    pub kills_h: bool,
    pub wedge_basis_checked: usize,
    pub idempotent: bool,
}

pub fn q_map_check(g: Genus) -> Result<QMapReport> {
    let n = g.rank() as Letter;
    let mut kills_h = true;
    for u in 0..n {
        kills_h &= q_map(&embed_h_in_wedge3(&Tensor::basis(g, &[u]))?)?.is_zero();
    }
    let mut idempotent = true;
    let mut count = 0;
    for a in 0..n as u16 {
        for b in a + 1..n as u16 {
            for c in b + 1..n as u16 {
                let x = SpaceTensor::from_raw(TensorSpace::wedge3(g), [(vec![a, b, c], Rational::one())]);
                let q = q_map(&x)?;
                idempotent &= q_map(&q)? == q;
                count += 1;
            }
        }
    }
    Ok(QMapReport { g: g.get(), h_basis_checked: n as usize, kills_h, wedge_basis_checked: count, idempotent })
}

/// Tr(3) kills [h(1), h(2)] and j(3), and is onto S³H; Tr(5) kills
/// sampled brackets of total degree five.
#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    pub g: usize,
    pub bracket_pairs: usize,
    pub brackets_with_nonzero_trace: usize,
    pub j3_dim: usize,
    pub tr3_rank: usize,
    pub s3_dim: u128,
    pub tr5_samples: usize,
    pub tr5_nonzero: usize,
    pub seed: u64,
    pub holds: bool,
}

fn free(t: &Tensor) -> Result<DerivationElement> {
    DerivationElement::new(t.clone(), Flavor::Free)
}

pub fn trace_properties(g: Genus, tr5_samples: usize, seed: u64, budget: &Budget) -> Result<TraceReport> {
    let h1 = h_basis(1, g, budget)?;
    let h2 = h_basis(2, g, budget)?;
    let h3 = h_basis(3, g, budget)?;
    let pairs: Vec<(usize, usize)> =
        (0..h1.dim()).flat_map(|i| (0..h2.dim()).map(move |j| (i, j))).collect();
    budget.check_work(pairs.len() as u64 * 1000, "degree-three brackets")?;
    let bad = crate::exec::map_slice(&pairs, |&(i, j)| -> Result<bool> {
        let br = free(&h1.basis()[i])?.bracket(&free(&h2.basis()[j])?)?;
        Ok(!br.trace()?.is_zero())
    });
    let mut nonzero = 0;
    for b in bad {
        nonzero += b? as usize;
    }
    let j3 = j_ideal(3, g, budget)?;
    let mut j_ok = true;
    for t in j3.basis() {
        j_ok &= free(t)?.trace()?.is_zero();
    }
    let traces: Vec<SpaceTensor> = h3.basis().iter().map(|t| free(t)?.trace()).collect::<Result<_>>()?;
    let tr3_rank = space_rank(&traces)?;
    let s3_dim = binom(g.rank() as u128 + 2, 3);

    let mut tr5_nonzero = 0;
    if tr5_samples > 0 {
        let h4 = h_basis(4, g, budget)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in 0..tr5_samples {
            let (a, b) = if s % 2 == 0 {
                (&h1.basis()[rng.gen_range(0..h1.dim())], &h4.basis()[rng.gen_range(0..h4.dim())])
            } else {
                (&h2.basis()[rng.gen_range(0..h2.dim())], &h3.basis()[rng.gen_range(0..h3.dim())])
            };
            if !free(a)?.bracket(&free(b)?)?.trace()?.is_zero() {
                tr5_nonzero += 1;
            }
            budget.check_time("degree-five trace samples")?;
        }
    }
    Ok(TraceReport {
        g: g.get(),
        bracket_pairs: pairs.len(),
        brackets_with_nonzero_trace: nonzero,
        j3_dim: j3.dim(),
        tr3_rank,
        s3_dim,
        tr5_samples,
        tr5_nonzero,
        seed,
        holds: nonzero == 0 && j_ok && tr3_rank as u128 == s3_dim && tr5_nonzero == 0,
    })
}

/// The ℓ_C over all k-chord diagrams span a space of dimension (2k−1)!!.
#[derive(Clone, Debug, Serialize)]
pub struct EllBasisReport {
    pub k: usize,
    pub g: usize,
    pub rank: usize,
    pub expected: u64,
    pub holds: bool,
}

pub fn ell_basis_check(k: usize, g: Genus) -> Result<EllBasisReport> {
    let rank = ell_rank(k, g)?;
    let expected = double_factorial_odd(k);
    Ok(EllBasisReport { k, g: g.get(), rank, expected, holds: rank as u64 == expected })
}

/// Every generator of sp(2g) annihilates a_C, ℓ_C and ξ_C.
#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub k: usize,
    pub g: usize,
    pub tensors_checked: usize,
    pub generators: usize,
    pub failures: usize,
    pub holds: bool,
}

pub fn sp_invariance(k: usize, g: Genus, budget: &Budget) -> Result<InvarianceReport> {
    let n = g.rank() as u64;
    budget.check_work(n.pow(2 * k as u32 + 2) * (g.get() * (2 * g.get() + 1)) as u64, "invariance check")?;
    let gens = generators(g);
    let mut tensors = Vec::new();
    for c in enumerate_unchecked(k) {
        tensors.push(c.a_tensor(g));
        tensors.push(formal_ell(&c).materialize(g));
        tensors.push(formal_xi(&c).materialize(g));
    }
    let failures: usize = crate::exec::map_slice(&tensors, |t| gens.iter().filter(|x| !act(x, t).is_zero()).count())
        .into_iter()
        .sum();
    Ok(InvarianceReport {
        k,
        g: g.get(),
        tensors_checked: tensors.len(),
        generators: gens.len(),
        failures,
        holds: failures == 0,
    })
}
