use std::path::Path;

use mcgcalc_core::budget::Budget;
use mcgcalc_core::chord::{enumerate, invariant_dimension, predicted_row_sum, verify_sum_relation};
use mcgcalc_core::derivation::{certify_h_dimension, h_basis, h_dimension, j_ideal};
use mcgcalc_core::graphs::{
    a_graph, degree_two_ranks, dumbbell, e1_cocycle_functional, enumerate_graphs, extract_relation, theta,
};
use mcgcalc_core::homology::{abelianization_evidence, bracket_rank_s3, find_invariant_two_cycle};
use mcgcalc_core::invariants::{h_invariant_dim, split_table};
use mcgcalc_core::lie::{lie_basis, lie_dims};
use mcgcalc_core::sp::{lambda2_s3_check, lambda2_u_check, t1_t2_check, table_check, weyl_dim, Partition};
use mcgcalc_core::symplectic::Genus;
use mcgcalc_core::{checks, Error, Rational};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::cache::{self, Cache, CacheError};

/// Why a command did not produce a passing report.
#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Resource(String),
    /// An internal consistency check failed.
    Falsified(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceLimit(_) => Failure::Resource(e.to_string()),
            Error::InvalidArgument(_) | Error::DimensionMismatch { .. } | Error::DegreeMismatch { .. } => {
                Failure::Invalid(e.to_string())
            }
            Error::Inconsistent(_) => Failure::Falsified(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

impl From<CacheError> for Failure {
    fn from(e: CacheError) -> Self {
        Failure::Other(e.to_string())
    }
}

pub struct Outcome {
    pub command: String,
    pub params: Value,
    pub result: Value,
    pub provenance: Value,
    /// False when a verification found a value different from the expected one.
    pub passed: bool,
    pub cache_hits: usize,
}

impl Outcome {
    fn new(command: &str, params: impl Serialize, result: impl Serialize) -> Outcome {
        Outcome {
            command: command.to_string(),
            params: to_value(params),
            result: to_value(result),
            provenance: Value::Null,
            passed: true,
            cache_hits: 0,
        }
    }

    fn claim(mut self, statement: &str, expected: Value, source: &str, passed: bool) -> Outcome {
        self.provenance = json!({ "claim": statement, "expected": expected, "source": source });
        self.passed = passed;
        self
    }
}

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

type Run = Result<Outcome, Failure>;

pub fn run(cmd: &Command, global: &GlobalOpts) -> Run {
    let budget = Budget::scaled(global.budget);
    match cmd {
        Command::Dims { what } => dims(what, &budget),
        Command::Verify { what } => verify(what, global.seed, &budget),
        Command::Graphs { what } => graphs(what, &budget),
        Command::HInvariants { gd, split } => h_invariants(gd, *split),
        Command::Basis { what: BasisCmd::Export { kind, gk } } => basis_export(*kind, gk, global.cache_dir.as_deref(), &budget),
        Command::Cache { what: CacheCmd::Gc { keep_versions, quota_bytes } } => {
            let dir = global.cache_dir.as_deref().ok_or_else(|| Failure::Invalid("cache gc needs --cache-dir".into()))?;
            let report = cache::gc(dir, *keep_versions, *quota_bytes)?;
            Ok(Outcome::new(
                "cache gc",
                json!({ "cache_dir": dir.display().to_string(), "keep_versions": keep_versions, "quota_bytes": quota_bytes }),
                report,
            ))
        }
    }
}

fn per_genus<T>(gs: &GenusRange, mut f: impl FnMut(Genus) -> Result<T, Failure>) -> Result<Vec<T>, Failure> {
    gs.0.iter().map(|&g| f(g)).collect()
}

fn dims(what: &DimsCmd, budget: &Budget) -> Run {
    Ok(match what {
        DimsCmd::Chord(p) => {
            let rows = per_genus(&p.g, |g| {
                Ok(json!({ "k": p.k, "g": g.get(), "dim": invariant_dimension(p.k, g, budget)? }))
            })?;
            Outcome::new("dims chord", p, rows)
        }
        DimsCmd::Lie(p) => Outcome::new("dims lie", p, per_genus(&p.g, |g| Ok(lie_dims(p.k, g.get())))?),
        DimsCmd::H { gk, certify } => {
            let rows = per_genus(&gk.g, |g| {
                if *certify {
                    Ok(to_value(certify_h_dimension(gk.k, g, budget)?))
                } else {
                    Ok(json!({ "k": gk.k, "g": g.get(), "dim": h_dimension(gk.k, g.get()) }))
                }
            })?;
            Outcome::new("dims h", json!({ "g": gk.g, "k": gk.k, "certify": certify }), rows)
        }
        DimsCmd::J(p) => {
            let rows = per_genus(&p.g, |g| Ok(json!({ "k": p.k, "g": g.get(), "dim": j_ideal(p.k, g, budget)?.dim() })))?;
            Outcome::new("dims j", p, rows)
        }
        DimsCmd::Weyl { partition, g } => {
            let part: Partition = partition.parse().map_err(|e: Error| Failure::Invalid(e.to_string()))?;
            let rows = per_genus(&g.g, |gg| {
                Ok(json!({ "partition": part.to_string(), "g": gg.get(), "dim": weyl_dim(&part, gg) }))
            })?;
            Outcome::new("dims weyl", json!({ "partition": partition, "g": g.g }), rows)
        }
    })
}

fn verify(what: &VerifyCmd, seed: u64, budget: &Budget) -> Run {
    Ok(match what {
        VerifyCmd::SumRelation(p) => {
            let mut ok = true;
            let mut expected = Vec::new();
            let rows = per_genus(&p.g, |g| {
                let r = verify_sum_relation(p.k, g, budget)?;
                let want = predicted_row_sum(p.k, g.get());
                ok &= r.is_zero == (g.get() < p.k) && r.row_sum == want;
                expected.push(json!({ "g": g.get(), "is_zero": g.get() < p.k, "row_sum": want }));
                Ok(r)
            })?;
            Outcome::new("verify sum-relation", p, rows).claim(
                "the sum of all a_C vanishes exactly when g < k, and every Gram row sums to 2^k g(g-1)...(g-k+1)",
                Value::Array(expected),
                "published value",
                ok,
            )
        }
        VerifyCmd::PkIdempotent { g, k, random, random_k } => {
            let rows = per_genus(&g.g, |gg| Ok(checks::pk_idempotent(gg, *k, *random, *random_k, seed, budget)?))?;
            let ok = rows.iter().all(|r| r.holds);
            Outcome::new("verify pk-idempotent", json!({ "g": g.g, "k": k, "random": random, "random_k": random_k, "seed": seed }), rows)
                .claim("p_k(p_k(t)) = k p_k(t)", json!({ "failures": 0 }), "published value", ok)
        }
        VerifyCmd::Table(p) => {
            let rows = per_genus(&p.g, |g| Ok(table_check(p.k, g)?))?;
            let ok = rows.iter().all(|r| r.equal);
            Outcome::new("verify table", p, rows).claim(
                "dim h(k) equals the sum of Weyl dimensions over the listed decomposition",
                json!({ "equal": true }),
                "published value",
                ok,
            )
        }
        VerifyCmd::Decompositions(p) => {
            let rows = per_genus(&p.g, |g| Ok(vec![lambda2_u_check(g)?, lambda2_s3_check(g)?, t1_t2_check(g)?]))?;
            let ok = rows.iter().flatten().all(|r| r.equal);
            Outcome::new("verify decompositions", p, rows).claim(
                "each listed decomposition has the dimension of the space it decomposes",
                json!({ "equal": true }),
                "published value",
                ok,
            )
        }
        VerifyCmd::TraceProps { g, samples } => {
            let rows = per_genus(&g.g, |gg| Ok(checks::trace_properties(gg, *samples, seed, budget)?))?;
            let ok = rows.iter().all(|r| r.holds);
            Outcome::new("verify trace-props", json!({ "g": g.g, "samples": samples, "seed": seed }), rows).claim(
                "traces vanish on brackets and on j, and Tr(3) is onto S^3 H",
                json!({ "brackets_with_nonzero_trace": 0, "tr3_rank": "dim S^3 H", "tr5_nonzero": 0 }),
                "published value",
                ok,
            )
        }
        VerifyCmd::QMap(p) => {
            let rows = per_genus(&p.g, |g| Ok(checks::q_map_check(g)?))?;
            let ok = rows.iter().all(|r| r.kills_h && r.idempotent);
            Outcome::new("verify q-map", p, rows).claim(
                "q kills the copy of H in the third exterior power and is a projection",
                json!({ "kills_h": true, "idempotent": true }),
                "published value",
                ok,
            )
        }
        VerifyCmd::Prop47(p) => {
            let mut ok = true;
            let rows = per_genus(&p.g, |g| {
                let r = checks::ell_basis_check(p.k, g)?;
                if g.get() >= p.k {
                    ok &= r.holds;
                }
                Ok(r)
            })?;
            Outcome::new("verify prop4-7", p, rows).claim(
                "the l_C over all k-chord diagrams are linearly independent for k <= g",
                json!({ "rank": "(2k-1)!! where k <= g" }),
                "published value",
                ok,
            )
        }
        VerifyCmd::Prop65(p) => {
            let rows = per_genus(&p.g, |g| Ok(bracket_rank_s3(g, budget)?))?;
            let ok = rows.iter().all(|r| r.injective);
            Outcome::new("verify prop6-5", p, rows).claim(
                "brackets of the S^3 H copy in h(3) map the second exterior power injectively into h(6)",
                json!({ "rank": "dim of the second exterior power of S^3 H" }),
                "published value",
                ok,
            )
        }
        VerifyCmd::Prop66(p) => {
            let mut ok = true;
            let rows = per_genus(&p.g, |g| match find_invariant_two_cycle(g, budget) {
                Ok(c) => {
                    ok &= c.cycle_boundary_vanishes && !c.cochain.is_zero();
                    Ok(json!({ "g": g.get(), "found": true, "cycle": c }))
                }
                Err(Error::Inconsistent(msg)) => {
                    ok = false;
                    Ok(json!({ "g": g.get(), "found": false, "error": msg }))
                }
                Err(e) => Err(e.into()),
            })?;
            Outcome::new("verify prop6-6", p, rows).claim(
                "an Sp-invariant 2-cycle of degree 6 has nonzero trace-pullback cochain",
                json!({ "found": true, "cochain": "nonzero" }),
                "published value",
                ok,
            )
        }
        VerifyCmd::Abelianization(p) => {
            let rows = per_genus(&p.g, |g| Ok(abelianization_evidence(p.degree, g, budget)?))?;
            let ok = rows.iter().all(|r| r.matches_prediction);
            Outcome::new("verify abelianization", p, rows).claim(
                "conjecture evidence: the cokernel of brackets is the third exterior power in degree 1, zero in even degree and S^d H in odd degree d >= 3",
                json!({ "coker_dim": "predicted" }),
                "conjectured value",
                ok,
            )
        }
        VerifyCmd::Invariance(p) => {
            let rows = per_genus(&p.g, |g| Ok(checks::sp_invariance(p.k, g, budget)?))?;
            let ok = rows.iter().all(|r| r.holds);
            Outcome::new("verify invariance", p, rows).claim(
                "every sp(2g) generator annihilates a_C, l_C and xi_C",
                json!({ "failures": 0 }),
                "defining property",
                ok,
            )
        }
    })
}

fn graphs(what: &GraphsCmd, budget: &Budget) -> Run {
    Ok(match what {
        GraphsCmd::Enumerate { vertices, connected, loopless } => {
            let gs = enumerate_graphs(*vertices, *connected, *loopless, budget)?;
            let rows: Vec<Value> = gs
                .iter()
                .map(|g| json!({ "graph": g, "connected": g.is_connected(), "has_loop": g.has_loop() }))
                .collect();
            Outcome::new(
                "graphs enumerate",
                json!({ "vertices": vertices, "connected": connected, "loopless": loopless }),
                json!({ "count": rows.len(), "graphs": rows }),
            )
        }
        GraphsCmd::Ranks(p) => {
            let rows = per_genus(&p.g, |g| Ok(degree_two_ranks(g, budget)?))?;
            Outcome::new("graphs ranks", p, rows)
        }
        GraphsCmd::Relation { k } => {
            let r = extract_relation(*k, budget)?;
            let ok = r.vanishes && r.nonzero_above;
            Outcome::new("graphs relation", json!({ "k": k }), r).claim(
                "the sum of all a_C over 6k-vertex diagrams vanishes at g = 3k-1 and not at g = 3k",
                json!({ "vanishes": true, "nonzero_above": true }),
                "published value",
                ok,
            )
        }
        GraphsCmd::E1(p) => {
            let rows = per_genus(&p.g, |g| {
                let on = |gr| -> Result<Rational, Failure> { Ok(e1_cocycle_functional(&a_graph(&gr, g)?)?) };
                Ok(json!({ "g": g.get(), "on_theta": on(theta())?, "on_dumbbell": on(dumbbell())? }))
            })?;
            Outcome::new("graphs e1", p, rows)
        }
    })
}

fn h_invariants(gd: &GDegree, split: bool) -> Run {
    if gd.degree % 2 == 1 {
        return Err(Failure::Invalid(format!("invariants exist only in even degree, got {}", gd.degree)));
    }
    let k = gd.degree / 2;
    let rows = per_genus(&gd.g, |g| {
        if split {
            Ok(to_value(split_table(k, g)?))
        } else {
            Ok(json!({ "degree": gd.degree, "g": g.get(), "total": h_invariant_dim(k, g)? }))
        }
    })?;
    Ok(Outcome::new("h-invariants", json!({ "g": gd.g, "degree": gd.degree, "split": split }), rows))
}

fn basis_export(kind: BasisKind, gk: &GK, dir: Option<&Path>, budget: &Budget) -> Run {
    let dir = dir.ok_or_else(|| Failure::Invalid("basis export needs --cache-dir".into()))?;
    let cache = Cache::open(dir)?;
    let label = match kind {
        BasisKind::Chord => "chord",
        BasisKind::Lie => "lie",
        BasisKind::H => "h",
        BasisKind::J => "j",
    };
    let mut hits = 0;
    let mut rows = Vec::new();
    for &g in &gk.g.0 {
        let (count, hit) = match cache.load::<Value>(label, g.get(), gk.k) {
            Some((h, _)) => (h.basis_count, true),
            None => {
                let basis: Vec<Value> = match kind {
                    BasisKind::Chord => enumerate(gk.k, budget)?.iter().map(|c| json!(c.to_string())).collect(),
                    BasisKind::Lie => {
                        let b = lie_basis(gk.k, g, budget)?;
                        (0..b.len()).map(|i| to_value(b.element(i))).collect()
                    }
                    BasisKind::H => h_basis(gk.k, g, budget)?.basis().iter().map(to_value).collect(),
                    BasisKind::J => j_ideal(gk.k, g, budget)?.basis().iter().map(to_value).collect(),
                };
                cache.store(label, g.get(), gk.k, &basis)?;
                (basis.len(), false)
            }
        };
        hits += hit as usize;
        let file = cache.path(label, g.get(), gk.k).file_name().map(|f| f.to_string_lossy().into_owned());
        rows.push(json!({ "kind": label, "g": g.get(), "degree": gk.k, "basis_count": count, "file": file, "cache_hit": hit }));
    }
    let mut out = Outcome::new("basis export", json!({ "kind": kind, "g": gk.g, "k": gk.k }), rows);
    out.cache_hits = hits;
    Ok(out)
}
