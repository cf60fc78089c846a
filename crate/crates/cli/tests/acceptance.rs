//! One PASS/FAIL line per acceptance criterion. Criteria that are known
//! not to hold print FAIL with the measured values; the run only aborts
//! when a criterion fails in an undocumented way.

use std::process::Command;
use std::time::Instant;

use mcgcalc_core::budget::Budget;
use mcgcalc_core::checks;
use mcgcalc_core::chord::{
    double_factorial_odd, enumerate, invariant_dimension, predicted_row_sum, verify_sum_relation,
};
use mcgcalc_core::derivation::{h_basis, membership, DerivationElement, Flavor};
use mcgcalc_core::graphs::{a_graph, degree_two_ranks, dumbbell, extract_relation, push_diagram, theta};
use mcgcalc_core::homology::{abelianization_evidence, bracket_rank_s3, find_invariant_two_cycle};
use mcgcalc_core::invariants::{formal_xi, j_invariant_dim, lie_invariant_dim, xi_rank};
use mcgcalc_core::sp::{lambda2_s3_check, lambda2_u_check, t1_t2_check, table_check};
use mcgcalc_core::space::project_u_ext;
use mcgcalc_core::symplectic::Genus;
use mcgcalc_core::Error;

type Check = Result<(bool, String), Error>;

fn g(n: usize) -> Genus {
    Genus::new(n).unwrap()
}

fn c1() -> Check {
    let b = Budget::default();
    let mut seen = Vec::new();
    let mut ok = true;
    for (k, gg) in [(1, 1), (2, 2), (2, 3), (3, 3), (3, 4), (4, 4)] {
        let d = invariant_dimension(k, g(gg), &b)?;
        ok &= d as u64 == double_factorial_odd(k);
        seen.push(format!("({k},{gg})={d}"));
    }
    Ok((ok, seen.join(" ")))
}

fn c2() -> Check {
    let b = Budget::default();
    let mut ok = true;
    let mut seen = Vec::new();
    for k in 2..=4 {
        let d = invariant_dimension(k, g(k - 1), &b)?;
        let r = verify_sum_relation(k, g(k - 1), &b)?;
        ok &= d as u64 == double_factorial_odd(k) - 1 && r.is_zero;
        seen.push(format!("k={k}: dim {d}, sum zero {}", r.is_zero));
    }
    for k in 1..=4 {
        for gg in 1..=5 {
            ok &= verify_sum_relation(k, g(gg), &b)?.row_sum == predicted_row_sum(k, gg);
        }
    }
    Ok((ok, format!("{}; row sums match for k<=4, g<=5: {ok}", seen.join(", "))))
}

fn c3() -> Check {
    let b = Budget::default();
    let mut pairs = 0;
    let mut ok = true;
    for k in 1..=4 {
        let ds = enumerate(k, &b)?;
        for gg in [1, 2] {
            let tensors: Vec<_> = ds.iter().map(|c| c.a_tensor(g(gg))).collect();
            for c in &ds {
                for (cp, t) in ds.iter().zip(&tensors) {
                    ok &= c.pairing_formula(cp, g(gg)) == c.alpha_eval(t)?;
                    pairs += 1;
                }
            }
        }
    }
    Ok((ok, format!("{pairs} pairs at g = 1, 2")))
}

fn c4() -> Check {
    let r = checks::pk_idempotent(g(2), 5, 500, 8, 4, &Budget::default())?;
    Ok((r.holds, format!("{} basis tensors, {} random, {} failures", r.full_basis_checked, r.random_checked, r.failures)))
}

fn c5() -> Check {
    let mut ok = true;
    let mut seen = Vec::new();
    for k in 1..=3 {
        let r = checks::ell_basis_check(k, g(k))?;
        ok &= r.holds;
        seen.push(format!("k={k}: {}", r.rank));
    }
    Ok((ok, seen.join(", ")))
}

fn c6() -> Check {
    let l8 = lie_invariant_dim(4, g(4))?;
    let xi = [xi_rank(3, g(3))?, xi_rank(3, g(2))?, xi_rank(3, g(1))?];
    let j6 = j_invariant_dim(3, g(3))?;
    Ok((l8 == 10 && xi == [5, 4, 1] && j6 == 2, format!("L(8)^Sp={l8}, xi ranks {xi:?}, j(6)^Sp={j6}")))
}

fn c7() -> Check {
    let ds = enumerate(2, &Budget::default())?;
    let zero = ds.iter().all(|c| formal_xi(c).vanishes_at(g(4)));
    Ok((zero, format!("{} diagrams, all xi_C zero: {zero}", ds.len())))
}

fn c8() -> Check {
    let mut ok = true;
    let mut seen = Vec::new();
    for k in 1..=4 {
        let r = table_check(k, g(4))?;
        ok &= r.equal;
        seen.push(format!("h({k})={}", r.h_dim));
    }
    for r in [lambda2_u_check(g(6))?, lambda2_s3_check(g(3))?, t1_t2_check(g(6))?] {
        ok &= r.equal;
        seen.push(format!("{}={}", r.name, r.listed_total));
    }
    Ok((ok, seen.join(", ")))
}

fn c9() -> Check {
    let b = Budget::default();
    let r2 = checks::trace_properties(g(2), 10, 9, &b)?;
    let r3 = checks::trace_properties(g(3), 0, 9, &b)?;
    Ok((
        r2.holds && r3.holds,
        format!(
            "g=2: rank Tr(3) {} of {}, {} brackets, Tr(5) samples {}; g=3: {} brackets, j(3)={}",
            r2.tr3_rank, r2.s3_dim, r2.bracket_pairs, r2.tr5_samples, r3.bracket_pairs, r3.j3_dim
        ),
    ))
}

fn c10() -> Check {
    let mut ok = true;
    for gg in 2..=4 {
        let r = checks::q_map_check(g(gg))?;
        ok &= r.kills_h && r.idempotent;
    }
    Ok((ok, "g = 2, 3, 4".into()))
}

fn c11() -> Check {
    let r = degree_two_ranks(g(3), &Budget::default())?;
    let mut lifts_ok = true;
    let mut lifts = 0;
    for gr in [theta(), dumbbell()] {
        let a = a_graph(&gr, g(3))?;
        for l in gr.all_lifts() {
            lifts_ok &= push_diagram(&l, g(3))? == a;
            lifts += 1;
        }
    }
    let b_dumbbell_zero = project_u_ext(&a_graph(&dumbbell(), g(3))?)?.is_zero();
    Ok((
        r.rank_wedge3 == 2 && r.rank_u == 1 && lifts_ok && b_dumbbell_zero,
        format!("ranks {}/{}, {lifts} lifts agree: {lifts_ok}, b_dumbbell zero: {b_dumbbell_zero}", r.rank_wedge3, r.rank_u),
    ))
}

fn c12() -> Check {
    let r = extract_relation(1, &Budget::default())?;
    let expansion: Vec<String> = r.graph_expansion.iter().map(|(m, c)| format!("{c}*{m}")).collect();
    Ok((r.vanishes && r.nonzero_above, format!("15-term sum zero at g=2, nonzero at g=3; {}", expansion.join(" + "))))
}

fn c13() -> Check {
    let r = bracket_rank_s3(g(2), &Budget::default())?;
    Ok((r.rank == 190 && r.injective, format!("rank {} of {}", r.rank, r.lambda2_dim)))
}

fn c14() -> Check {
    let b = Budget::default();
    let at3 = match find_invariant_two_cycle(g(3), &b) {
        Ok(c) => return Ok((c.cycle_boundary_vanishes && !c.cochain.is_zero(), format!("g=3 cochain {}", c.cochain))),
        Err(Error::Inconsistent(msg)) => msg,
        Err(e) => return Err(e),
    };
    let w = find_invariant_two_cycle(g(4), &b)?;
    let witness = serde_json::to_string(&w).map_err(Error::from)?;
    Ok((
        false,
        format!(
            "g=3 solve infeasible ({at3}); g=4 witness: cochain {}, boundary zero {}, {} bytes serialized",
            w.cochain,
            w.cycle_boundary_vanishes,
            witness.len()
        ),
    ))
}

fn c15() -> Check {
    let b = Budget::default();
    let mut ok = true;
    let mut seen = Vec::new();
    for (d, gg) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let r = abelianization_evidence(d, g(gg), &b)?;
        ok &= r.matches_prediction;
        seen.push(format!("deg {d} g={gg}: coker {} (predicted {})", r.coker_dim, r.predicted));
    }
    Ok((ok, format!("conjecture evidence; {}", seen.join(", "))))
}

fn c16() -> Check {
    let b = Budget::default();
    let mut ok = true;
    let mut notes = Vec::new();
    for (k, gg) in [(1, 2), (2, 2), (1, 3)] {
        let r = checks::sp_invariance(k, g(gg), &b)?;
        ok &= r.holds;
        notes.push(format!("invariance k={k} g={gg}: {}", r.holds));
    }
    // Jacobi and membership on brackets of basis derivations.
    let gg = g(2);
    let h1 = h_basis(1, gg, &b)?;
    let h2 = h_basis(2, gg, &b)?;
    let d = |t: &mcgcalc_core::tensor::Tensor| DerivationElement::new(t.clone(), Flavor::Free);
    let mut jacobi = true;
    let mut members = h1.basis().iter().chain(h2.basis()).all(membership);
    for x in h1.basis() {
        for y in h1.basis() {
            for z in h2.basis().iter().take(6) {
                let (x, y, z) = (d(x)?, d(y)?, d(z)?);
                let a = x.bracket(&y.bracket(&z)?)?;
                let bb = y.bracket(&z.bracket(&x)?)?;
                let c = z.bracket(&x.bracket(&y)?)?;
                jacobi &= a.tensor.add(&bb.tensor).add(&c.tensor).is_zero();
                members &= membership(&a.tensor);
            }
        }
    }
    ok &= jacobi && members;
    notes.push(format!("Jacobi {jacobi}, membership {members}"));
    // Byte-identical CLI reports under a fixed seed.
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_mcgcalc"))
            .args(["--seed", "11", "verify", "pk-idempotent", "--g", "2", "--k", "3", "--random", "50"])
            .output()
            .map(|o| o.stdout)
    };
    let same = run()? == run()?;
    ok &= same;
    notes.push(format!("CLI determinism {same}"));
    Ok((ok, notes.join(", ")))
}

/// Criteria expected to fail, each recorded with its reason.
const KNOWN_FAILURES: &[usize] = &[14, 15];

fn main() {
    let criteria: [(&str, fn() -> Check); 16] = [
        ("chord-diagram dimensions", c1),
        ("first degeneration", c2),
        ("pairing formula", c3),
        ("Lie projector identity", c4),
        ("l_C basis", c5),
        ("degree-six invariants", c6),
        ("degree-four xi vanishing", c7),
        ("table cross-checks", c8),
        ("trace properties", c9),
        ("q-map", c10),
        ("graph calculus", c11),
        ("relation extraction", c12),
        ("S3H bracket injectivity", c13),
        ("invariant 2-cycle", c14),
        ("abelianization evidence", c15),
        ("property suites", c16),
    ];
    let mut unexpected = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        let start = Instant::now();
        let (pass, detail) = match f() {
            Ok(x) => x,
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        println!("criterion {n:>2} {:<4} {name} [{secs:.1}s]: {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass && !KNOWN_FAILURES.contains(&n) {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
