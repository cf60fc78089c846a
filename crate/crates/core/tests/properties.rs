use mcgcalc_core::budget::Budget;
use mcgcalc_core::chord::{enumerate, invariant_dimension, LinearChordDiagram};
use mcgcalc_core::derivation::{h_basis, membership, DerivationElement, Flavor};
use mcgcalc_core::exec;
use mcgcalc_core::graphs::{enumerate_graphs, TrivalentGraph};
use mcgcalc_core::lie::{apply_lie_projector, is_lie_element};
use mcgcalc_core::sp::{act, generators, Partition};
use mcgcalc_core::symplectic::Genus;
use mcgcalc_core::tensor::{pack, Tensor, TermMap};
use mcgcalc_core::Rational;
use proptest::prelude::*;

fn g(n: usize) -> Genus {
    Genus::new(n).unwrap()
}

fn small_rational() -> impl Strategy<Value = (i64, i64)> {
    (-1_000_000_000i64..1_000_000_000, 1i64..1_000_000)
}

fn tensor(gg: usize, k: usize) -> impl Strategy<Value = Tensor> {
    prop::collection::vec((prop::collection::vec(0u8..(2 * gg) as u8, k), -3i64..=3), 1..5).prop_map(move |terms| {
        let mut m = TermMap::new();
        for (letters, c) in terms {
            m.add_int(pack(&letters), c);
        }
        m.finish(g(gg), k)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_field_ops_match_bigrational(a in small_rational(), b in small_rational(), c in small_rational()) {
        let (x, y, z) = (Rational::new(a.0, a.1), Rational::new(b.0, b.1), Rational::new(c.0, c.1));
        let big = |r: &Rational| r.to_big();
        let expect = (big(&x) * big(&y) + big(&z)) * big(&x) - big(&y);
        let got = (x.clone() * y.clone() + z.clone()) * x.clone() - y.clone();
        prop_assert_eq!(got.to_big(), expect);
        if !y.is_zero() {
            prop_assert_eq!((x.clone() / y.clone()) * y.clone(), x.clone());
        }
        prop_assert_eq!(x.to_string().parse::<Rational>().unwrap(), x.clone());
    }

    #[test]
    fn projector_is_quasi_idempotent(t in (1usize..=7).prop_flat_map(|k| tensor(2, k))) {
        let p = apply_lie_projector(&t);
        prop_assert_eq!(apply_lie_projector(&p), p.scale(&Rational::from_int(t.degree() as i64)));
        prop_assert!(is_lie_element(&p));
    }

    #[test]
    fn generators_annihilate_chord_tensors(k in 1usize..=3, gg in 1usize..=3, r in 0usize..15, gen in 0usize..21) {
        let ds = enumerate(k, &Budget::default()).unwrap();
        let c = &ds[r % ds.len()];
        let gens = generators(g(gg));
        prop_assert!(act(&gens[gen % gens.len()], &c.a_tensor(g(gg))).is_zero());
    }

    #[test]
    fn generator_action_is_a_derivation_of_tensor_products(a in tensor(2, 2), b in tensor(2, 1), gen in 0usize..10) {
        let x = &generators(g(2))[gen];
        let lhs = act(x, &a.tensor(&b));
        let rhs = act(x, &a).tensor(&b).add(&a.tensor(&act(x, &b)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn graph_canonical_form_ignores_labels(idx in 0usize..17, perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle()) {
        let all = enumerate_graphs(6, true, false, &Budget::default()).unwrap();
        let gr = &all[idx % all.len()];
        let edges: Vec<(usize, usize)> = gr.edges().iter().map(|&(a, b)| (perm[a as usize], perm[b as usize])).collect();
        prop_assert_eq!(&TrivalentGraph::new(6, &edges).unwrap(), gr);
        prop_assert_eq!(&gr.to_string().parse::<TrivalentGraph>().unwrap(), gr);
    }

    #[test]
    fn chord_diagram_rank_round_trips(k in 1usize..=5, r in 0usize..945) {
        let n = mcgcalc_core::chord::double_factorial_odd(k) as usize;
        let c = LinearChordDiagram::unrank(k, r % n);
        prop_assert_eq!(c.rank(), r % n);
        prop_assert_eq!(LinearChordDiagram::from_pairs(&c.pairs()).unwrap(), c);
    }

    #[test]
    fn partition_text_round_trips(parts in prop::collection::vec(1usize..6, 0..4)) {
        let mut parts = parts;
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let p = Partition::new(parts).unwrap();
        prop_assert_eq!(p.to_string().parse::<Partition>().unwrap(), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn derivation_bracket_satisfies_jacobi(
        cx in prop::collection::vec(-2i64..=2, 4),
        cy in prop::collection::vec(-2i64..=2, 4),
        iz in 0usize..20,
    ) {
        let gg = g(2);
        let b = Budget::default();
        let h1 = h_basis(1, gg, &b).unwrap();
        let h2 = h_basis(2, gg, &b).unwrap();
        let combo = |cs: &[i64]| {
            let mut t = Tensor::zero(gg, 3);
            for (c, e) in cs.iter().zip(h1.basis()) {
                t = t.axpy(&Rational::from_int(*c), e);
            }
            DerivationElement::new(t, Flavor::Free).unwrap()
        };
        let (x, y) = (combo(&cx), combo(&cy));
        let z = DerivationElement::new(h2.basis()[iz % h2.dim()].clone(), Flavor::Free).unwrap();
        let a = x.bracket(&y.bracket(&z).unwrap()).unwrap();
        let bb = y.bracket(&z.bracket(&x).unwrap()).unwrap();
        let c = z.bracket(&x.bracket(&y).unwrap()).unwrap();
        prop_assert!(a.tensor.add(&bb.tensor).add(&c.tensor).is_zero());
        prop_assert!(membership(&x.bracket(&z).unwrap().tensor));
        prop_assert_eq!(x.bracket(&y).unwrap().tensor, y.bracket(&x).unwrap().tensor.neg());
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let b = Budget::default();
    let par = invariant_dimension(3, g(2), &b).unwrap();
    exec::set_sequential(true);
    let seq = invariant_dimension(3, g(2), &b).unwrap();
    exec::set_sequential(false);
    assert_eq!((par, seq), (14, 14));
}
