use std::sync::Arc;

use bracekit::brace::verify_brace_axioms;
use bracekit::filters::{order_filter, prime_factors};
use bracekit::hegedus::{build_hegedus, orthogonal_p_elements, HegedusBrace, HegedusSpec};
use bracekit::ideals::{ideal_closure, is_ideal, socle};
use bracekit::matched::{
    decompose_and_rebuild, validate_iterated, validate_matched_pair, Action, IteratedActionsSpec, IteratedProduct,
    MatchedPairSpec, MatchedProduct,
};
use bracekit::residue::is_prime;
use bracekit::ybe::{canonical_solution, permutation_group, verify_solution};
use bracekit::{AdditiveShape, LeftBrace, Modulus, QuadraticForm, ResidueMatrix, SharedBrace, TableBrace, TrivialBrace, VerifyConfig};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x0b7a_ce5e), failure_persistence: None, ..Config::default() }
}

fn modulus() -> impl Strategy<Value = Modulus> {
    prop_oneof![Just((2, 1)), Just((2, 2)), Just((3, 1)), Just((3, 2)), Just((5, 1))]
        .prop_map(|(p, r)| Modulus::new(p, r).unwrap())
}

fn form(md: Modulus, n: usize) -> impl Strategy<Value = QuadraticForm> {
    proptest::collection::vec(0..md.m(), n * (n + 1) / 2).prop_map(move |c| {
        let mut u = ResidueMatrix::zero(md, n);
        let mut it = c.into_iter();
        for i in 0..n {
            for j in i..n {
                u.set(i, j, it.next().unwrap() as i64);
            }
        }
        QuadraticForm::new(u).unwrap()
    })
}

/// A small brace `H(p^r, n, Q, f)` with `f` drawn from the orthogonal
/// `p`-elements of `Q`.
fn hegedus() -> impl Strategy<Value = HegedusBrace> {
    (modulus(), 1usize..=2)
        .prop_flat_map(|(md, n)| (form(md, n), any::<prop::sample::Index>()))
        .prop_map(|(q, pick)| {
            let fs = orthogonal_p_elements(&q).unwrap();
            build_hegedus(HegedusSpec::new(q, pick.get(&fs).clone()).unwrap())
        })
}

fn cfg() -> VerifyConfig {
    VerifyConfig::default()
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn hegedus_braces_satisfy_the_axioms(b in hegedus()) {
        prop_assert!(verify_brace_axioms(&b, &cfg()).passed());
    }

    #[test]
    fn q_is_a_homomorphism(b in hegedus(), i in 0usize..10_000, j in 0usize..10_000) {
        let n = b.order().unwrap();
        let (x, y) = (b.shape().unrank(i % n), b.shape().unrank(j % n));
        let md = b.spec().modulus();
        prop_assert_eq!(b.q_of(&b.mul(&x, &y)), md.add(b.q_of(&x), b.q_of(&y)));
    }

    #[test]
    fn socle_matches_formula_for_nondegenerate_forms(b in hegedus()) {
        prop_assume!(b.spec().form().is_nondegenerate());
        let t = TableBrace::tabulate(&b, &cfg()).unwrap();
        let predicted: Vec<u32> = b.spec().predicted_socle().unwrap().iter().map(|x| t.index(x)).collect();
        let mut predicted = predicted;
        predicted.sort_unstable();
        prop_assert_eq!(socle(&t), predicted);
    }

    #[test]
    fn closures_are_ideals(b in hegedus(), seed in 0usize..10_000) {
        let t = TableBrace::tabulate(&b, &cfg()).unwrap();
        let cl = ideal_closure(&t, &[(seed % t.order()) as u32]);
        prop_assert!(is_ideal(&t, &cl));
        prop_assert!(is_ideal(&t, &socle(&t)));
    }

    #[test]
    fn canonical_solutions_are_involutive_and_nondegenerate(b in hegedus()) {
        let t = TableBrace::tabulate(&b, &cfg()).unwrap();
        let sol = canonical_solution(&t, &cfg()).unwrap();
        prop_assert!(verify_solution(&sol, &cfg()).passed());
        let g = permutation_group(&sol, 1 << 16).unwrap();
        prop_assert_eq!(g.order * socle(&t).len(), t.order());
    }

    #[test]
    fn lambda_inverse_undoes_lambda(b in hegedus(), i in 0usize..10_000, j in 0usize..10_000) {
        let n = b.order().unwrap();
        let (x, y) = (b.shape().unrank(i % n), b.shape().unrank(j % n));
        prop_assert_eq!(b.lambda_inv(&x, &b.lambda(&x, &y)), y.clone());
        prop_assert_eq!(b.mul(&x, &b.inv(&x)), b.zero());
    }
}

/// `Z/p ⋊ Z/k` with `α_b(x) = u^b x`, `u` of order dividing `k`.
fn semidirect() -> impl Strategy<Value = (u64, u64, u64)> {
    prop_oneof![Just(3u64), Just(5), Just(7), Just(11), Just(13)]
        .prop_flat_map(|p| {
            let divisors: Vec<u64> = (2..p).filter(|k| (p - 1) % k == 0).collect();
            (Just(p), prop::sample::select(divisors), 1..p)
        })
        .prop_map(|(p, k, g)| {
            // u = g^{(p-1)/k} has order dividing k
            let e = (p - 1) / k;
            let u = (0..e).fold(1, |acc, _| acc * g % p);
            (p, k, u)
        })
}

fn scaling(p: u64, u: u64) -> Action {
    let pw = move |base: u64, e: u64| (0..e).fold(1u64, |acc, _| acc * base % p);
    let ui = pw(u, p - 2);
    Action::rule("scale", move |b, x| vec![x[0] * pw(u, b[0]) % p], move |b, x| vec![x[0] * pw(ui, b[0]) % p])
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn two_factor_products_agree((p, k, u) in semidirect()) {
        let g: SharedBrace = Arc::new(TrivialBrace::cyclic(p).unwrap());
        let h: SharedBrace = Arc::new(TrivialBrace::cyclic(k).unwrap());
        let pair = MatchedPairSpec::new(g, h, scaling(p, u), Action::identity());
        prop_assert!(validate_matched_pair(&pair, &cfg()).passed());
        let mp = MatchedProduct::new_unchecked(pair.clone());
        let it_spec = IteratedActionsSpec::from_pair(&pair);
        prop_assert!(validate_iterated(&it_spec, &cfg()).passed());
        let it = IteratedProduct::new_unchecked(it_spec);
        for x in mp.shape().elements() {
            for y in mp.shape().elements() {
                prop_assert_eq!(mp.lambda(&x, &y), it.lambda(&x, &y));
            }
        }
        let t = TableBrace::tabulate(&mp, &cfg()).unwrap();
        prop_assert!(decompose_and_rebuild(&t, &cfg()).unwrap().eta_check);
    }

    #[test]
    fn rank_round_trips(moduli in proptest::collection::vec(2u64..7, 1..4), i in 0usize..10_000) {
        let s = AdditiveShape::new(moduli).unwrap();
        let i = i % s.order().unwrap();
        prop_assert_eq!(s.rank(&s.unrank(i)), i);
    }

    #[test]
    fn inverse_matrices((md, rows) in modulus().prop_flat_map(|md| (Just(md), proptest::collection::vec(proptest::collection::vec(0..md.m(), 3), 3)))) {
        let a = ResidueMatrix::from_residue_rows(md, &rows).unwrap();
        if a.is_invertible() {
            let inv = a.inverse().unwrap();
            prop_assert!(a.mul(&inv).unwrap().is_identity());
        } else {
            prop_assert!(a.inverse().is_err());
        }
    }

    #[test]
    fn determinant_is_multiplicative(md in modulus(), x in proptest::collection::vec(0u64..1000, 18)) {
        let m = md.m();
        let rows = |off: usize| (0..3).map(|i| x[off + 3 * i..off + 3 * i + 3].iter().map(|v| v % m).collect()).collect::<Vec<Vec<u64>>>();
        let a = ResidueMatrix::from_residue_rows(md, &rows(0)).unwrap();
        let b = ResidueMatrix::from_residue_rows(md, &rows(9)).unwrap();
        prop_assert_eq!(a.mul(&b).unwrap().det(), md.mul(a.det(), b.det()));
    }

    #[test]
    fn bilinear_routes_agree(q in modulus().prop_flat_map(|md| form(md, 3)), x in proptest::collection::vec(0u64..100, 6)) {
        let m = q.modulus().m();
        let a: Vec<u64> = x[..3].iter().map(|v| v % m).collect();
        let b: Vec<u64> = x[3..].iter().map(|v| v % m).collect();
        let (va, vb) = (bracekit::ResidueVector::from_residues(q.modulus(), a), bracekit::ResidueVector::from_residues(q.modulus(), b));
        prop_assert_eq!(q.bilinear(&va, &vb).unwrap(), q.bilinear_by_matrix(&va, &vb).unwrap());
    }

    #[test]
    fn prime_powers_are_filtered(n in 2u64..5000) {
        let f = prime_factors(n);
        let verdict = order_filter(n).unwrap();
        if is_prime(n) {
            prop_assert!(verdict.is_possible());
        } else if f.len() == 1 {
            prop_assert!(!verdict.is_possible());
        }
    }
}
