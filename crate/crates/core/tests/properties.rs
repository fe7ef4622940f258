mod common;

use std::collections::BTreeMap;

use common::*;
use goursat::algebras::{decode_tuple, parse_algebra, product, quotient, write_algebra};
use goursat::closure::ClosureOperator;
use goursat::corpus::{corpus, corpus_specs, Family};
use goursat::relations::{compose, con_lattice, congruence_generated, inverse_image, is_congruence, BinRel};
use goursat::terms::{eval_term, parse_identity, parse_term, satisfies_identity, satisfies_identity_ordered};
use goursat::{FiniteAlgebra, Identity, Morphism, Partition, Signature, Term};
use proptest::prelude::*;

const VARS: [&str; 3] = ["x", "y", "z"];

fn group_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0..3usize).prop_map(|i| Term::var(VARS[i])),
        Just(Term::app("e", vec![])),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("i", vec![t])),
            (inner.clone(), inner).prop_map(|(a, b)| Term::app("m", vec![a, b])),
        ]
    })
}

fn small_group() -> impl Strategy<Value = FiniteAlgebra> {
    let names = ["cyclic_group(2)", "cyclic_group(3)", "cyclic_group(4)", "klein4", "sym3"];
    (0..names.len()).prop_map(move |i| goursat::corpus::lookup(names[i]).unwrap().algebra)
}

fn partition(max_n: usize) -> impl Strategy<Value = Partition> {
    (1..=max_n).prop_flat_map(|n| proptest::collection::vec(0..n, n).prop_map(|l| Partition::from_labels(&l)))
}

fn partition_pair(max_n: usize) -> impl Strategy<Value = (Partition, Partition, Partition)> {
    (1..=max_n).prop_flat_map(|n| {
        let lab = move || proptest::collection::vec(0..n, n).prop_map(|l| Partition::from_labels(&l));
        (lab(), lab(), lab())
    })
}

fn binrels(max_n: usize) -> impl Strategy<Value = (BinRel, BinRel, BinRel)> {
    (1..=max_n).prop_flat_map(|n| {
        let rel = move || {
            proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
                BinRel::from_pairs(n, (0..n * n).filter(|&k| bits[k]).map(|k| (k / n, k % n))).unwrap()
            })
        };
        (rel(), rel(), rel())
    })
}

fn random_algebra() -> impl Strategy<Value = FiniteAlgebra> {
    (1..=4usize).prop_flat_map(|n| {
        (proptest::collection::vec(0..n, n * n), proptest::collection::vec(0..n, n)).prop_map(move |(b, u)| {
            let sig = Signature::new([("f", 2), ("g", 1)]).unwrap();
            FiniteAlgebra::new("random", sig, n, vec![b, u]).unwrap()
        })
    })
}

/// A corpus algebra with n ≤ 8 and a subvariety applicable to it.
fn corpus_case() -> impl Strategy<Value = (goursat::corpus::CorpusEntry, goursat::SubvarietySpec)> {
    let cases: Vec<_> = small_corpus(8)
        .into_iter()
        .flat_map(|e| e.applicable_specs().into_iter().map(move |v| (e.clone(), v)))
        .collect();
    (0..cases.len()).prop_map(move |i| cases[i].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn term_render_parse_round_trip(t in group_term()) {
        let sig = Family::Group.signature();
        prop_assert_eq!(parse_term(&t.to_string(), &sig).unwrap(), t);
    }

    #[test]
    fn identity_verdict_is_independent_of_variable_order(
        g in small_group(), l in group_term(), r in group_term(), rot in 0..3usize,
    ) {
        let id = Identity::new(l, r);
        let mut order = id.vars().to_vec();
        let len = order.len();
        if len > 0 {
            order.rotate_left(rot % len);
        }
        let a = satisfies_identity(&g, &id).unwrap();
        let b = satisfies_identity_ordered(&g, &id, &order).unwrap();
        prop_assert_eq!(a.holds(), b.holds());
        if let Some(w) = b.witness() {
            let env: BTreeMap<String, usize> = w.iter().cloned().collect();
            prop_assert_ne!(eval_term(&g, &id.lhs, &env).unwrap(), eval_term(&g, &id.rhs, &env).unwrap());
        }
    }

    #[test]
    fn product_evaluation_is_componentwise(
        a in small_group(), b in small_group(), t in group_term(), vals in proptest::collection::vec(0..64usize, 3),
    ) {
        let prod = product(a.signature(), &[a.clone(), b.clone()]).unwrap();
        let sizes = [a.size(), b.size()];
        let env_of = |f: &dyn Fn(usize) -> usize| -> BTreeMap<String, usize> {
            VARS.iter().zip(&vals).map(|(v, &x)| (v.to_string(), f(x))).collect()
        };
        let whole = eval_term(&prod, &t, &env_of(&|x| x % prod.size())).unwrap();
        let coords = decode_tuple(&sizes, whole);
        for (i, factor) in [&a, &b].into_iter().enumerate() {
            let local = eval_term(factor, &t, &env_of(&|x| decode_tuple(&sizes, x % prod.size())[i])).unwrap();
            prop_assert_eq!(coords[i], local);
        }
    }

    #[test]
    fn closure_axioms_on_random_congruences((e, v) in corpus_case(), i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let a = &e.algebra;
        let op = ClosureOperator::new(v.clone());
        let con = con_lattice(a, None).unwrap();
        let r = con.get(i.index(con.len())).clone();
        let s = con.get(j.index(con.len())).clone();
        let cr = op.closure(a, &r).unwrap();
        let cs = op.closure(a, &s).unwrap();
        prop_assert!(r.is_finer_than(&cr));
        prop_assert_eq!(op.closure(a, &cr).unwrap(), cr.clone());
        if r.is_finer_than(&s) {
            prop_assert!(cr.is_finer_than(&cs));
        }
        let db = op.delta_bar(a).unwrap();
        prop_assert_eq!(&cr, &goursat::relations::join(a, &r, &db).unwrap());
        prop_assert_eq!(
            op.closure(a, &goursat::relations::join(a, &r, &s).unwrap()).unwrap(),
            goursat::relations::join(a, &cr, &cs).unwrap()
        );
        let q = quotient(a, &s).unwrap();
        let target_con = con_lattice(q.target(), None).unwrap();
        let t = target_con.get(i.index(target_con.len()));
        prop_assert_eq!(
            op.closure(a, &inverse_image(&q, t).unwrap()).unwrap(),
            inverse_image(&q, &op.closure(q.target(), t).unwrap()).unwrap()
        );
    }

    #[test]
    fn partition_lattice_laws((p, q, r) in partition_pair(7)) {
        prop_assert_eq!(p.meet(&q), q.meet(&p));
        prop_assert_eq!(p.join_equiv(&q), q.join_equiv(&p));
        prop_assert_eq!(p.meet(&q.meet(&r)), p.meet(&q).meet(&r));
        prop_assert_eq!(p.join_equiv(&q.join_equiv(&r)), p.join_equiv(&q).join_equiv(&r));
        prop_assert_eq!(p.meet(&p.join_equiv(&q)), p.clone());
        prop_assert_eq!(p.join_equiv(&p.meet(&q)), p.clone());
        prop_assert!(p.meet(&q).is_finer_than(&p));
        prop_assert!(p.is_finer_than(&p.join_equiv(&q)));
    }

    #[test]
    fn partition_display_parse_round_trip(p in partition(9)) {
        let text = p.to_string();
        prop_assert_eq!(text.parse::<Partition>().unwrap(), p.clone());
        prop_assert_eq!(Partition::parse_with_size(&text, p.size()).unwrap(), p.clone());
        prop_assert_eq!(p.to_binrel().to_partition().unwrap(), p);
    }

    #[test]
    fn compose_is_associative((r, s, t) in binrels(6)) {
        let left = compose(&compose(&r, &s).unwrap(), &t).unwrap();
        let right = compose(&r, &compose(&s, &t).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(compose(&BinRel::identity(r.size()), &r).unwrap(), r.clone());
        prop_assert_eq!(compose(&r, &s).unwrap().converse(), compose(&s.converse(), &r.converse()).unwrap());
    }

    #[test]
    fn inverse_image_preserves_congruences(a in random_algebra(), pair in (0..4usize, 0..4usize)) {
        let n = a.size();
        let theta = congruence_generated(&a, &[(pair.0 % n, pair.1 % n)]).unwrap();
        let q = quotient(&a, &theta).unwrap();
        for s in con_lattice(q.target(), None).unwrap().congruences() {
            let pre = inverse_image(&q, s).unwrap();
            prop_assert!(is_congruence(&a, &pre).unwrap().holds());
            prop_assert!(theta.is_finer_than(&pre));
        }
    }

    #[test]
    fn algebra_file_round_trip(a in random_algebra()) {
        let parsed = parse_algebra(&write_algebra(&a)).unwrap();
        prop_assert!(parsed.same_structure(&a));
        prop_assert_eq!(parsed.name(), a.name());
    }

    #[test]
    fn congruence_generation_matches_oracle(a in random_algebra(), seeds in proptest::collection::vec((0..4usize, 0..4usize), 0..3)) {
        let n = a.size();
        let pairs: Vec<_> = seeds.iter().map(|&(x, y)| (x % n, y % n)).collect();
        let con = brute_con(&a);
        prop_assert_eq!(congruence_generated(&a, &pairs).unwrap(), brute_cg(&con, n, &pairs));
        let lat = con_lattice(&a, None).unwrap();
        prop_assert_eq!(lat.congruences(), &con[..]);
    }
}

#[test]
fn corpus_algebras_round_trip_through_files() {
    for e in corpus() {
        let text = write_algebra(&e.algebra);
        assert!(parse_algebra(&text).unwrap().same_structure(&e.algebra), "{}", e.name);
    }
    for v in corpus_specs() {
        let text = goursat::terms::render_identities(&v.identities);
        let back: Vec<_> = text
            .lines()
            .map(|l| parse_identity(l, &v.sig).unwrap())
            .collect();
        assert_eq!(back, v.identities, "{}", v.name);
    }
}
