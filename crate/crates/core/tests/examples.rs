mod common;

use std::collections::BTreeMap;

use common::*;
use goursat::algebras::{
    generate_subuniverse, homomorphism_violation, kernel_pair, encode_tuple, product, projection, quotient,
};
use goursat::closure::{
    birkhoff_congruence, check_axioms, closure_by_component, closure_effective, closure_goursat, reflect,
    roundtrip_check, AxiomBounds, AxiomStatus,
};
use goursat::corpus::{self, corpus, lookup, spec};
use goursat::distributivity::{
    check_axiom7, closure_meet_identity_check, image_meet_check, is_distributive, Applicability,
};
use goursat::permutability::{
    find_hm_terms, find_maltsev_term, generate_clone3, goursat_join_check, permutability_level, CloneOptions,
    PermutabilityLevel, SearchOutcome,
};
use goursat::relations::{
    compose, con_lattice, congruence_generated, direct_image, equivalence_closure, inverse_image, is_congruence,
    join, BinRel,
};
use goursat::terms::{eval_term, parse_identity, parse_term, satisfies_identity};
use goursat::{Error, FiniteAlgebra, Morphism, Partition, Signature, Term};

fn p(s: &str) -> Partition {
    s.parse().unwrap()
}

fn alg(name: &str) -> FiniteAlgebra {
    lookup(name).unwrap().algebra
}

fn env(pairs: &[(&str, usize)]) -> BTreeMap<String, usize> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

#[test]
fn term_examples() {
    let sig3 = Signature::new([("p", 3)]).unwrap();
    assert_eq!(
        parse_term("p(x,y,z)", &sig3).unwrap(),
        Term::app("p", vec![Term::var("x"), Term::var("y"), Term::var("z")])
    );
    let gsig = corpus::Family::Group.signature();
    let t = parse_term("m(x,i(y))", &gsig).unwrap();
    assert_eq!(t, Term::app("m", vec![Term::var("x"), Term::app("i", vec![Term::var("y")])]));
    assert_eq!(t.to_string(), "m(x,i(y))");
    let m2 = Signature::new([("m", 2)]).unwrap();
    assert!(matches!(parse_term("m(x,", &m2), Err(Error::Syntax { pos: 4, .. })));
    assert!(parse_term("m(m,x)", &m2).is_err());

    let z4 = alg("cyclic_group(4)");
    let e = |s: &str, vals: &[(&str, usize)]| eval_term(&z4, &parse_term(s, &gsig).unwrap(), &env(vals)).unwrap();
    assert_eq!(e("m(x,y)", &[("x", 1), ("y", 3)]), 0);
    assert_eq!(e("x", &[("x", 2)]), 2);
    assert_eq!(e("m(x,i(x))", &[("x", 3)]), 0);

    let comm = parse_identity("m(x,y) = m(y,x)", &gsig).unwrap();
    assert!(satisfies_identity(&z4, &comm).unwrap().holds());
    let exp2 = parse_identity("m(x,x) = e", &gsig).unwrap();
    assert_eq!(
        satisfies_identity(&z4, &exp2).unwrap().witness().unwrap(),
        &vec![("x".to_string(), 1)]
    );
    let imp = alg("implication_from_boolean(1)");
    let law = parse_identity("imp(imp(x,y),x) = x", imp.signature()).unwrap();
    assert!(satisfies_identity(&imp, &law).unwrap().holds());
}

#[test]
fn algebra_examples() {
    let z2 = alg("cyclic_group(2)");
    let sig = z2.signature().clone();
    let k = product(&sig, &[z2.clone(), z2.clone()]).unwrap();
    let enc = |a, b| encode_tuple(&[2, 2], &[a, b]);
    assert_eq!(k.size(), 4);
    assert_eq!(k.apply_by_name("m", &[enc(0, 1), enc(1, 1)]).unwrap(), enc(1, 0));

    let empty = product(&sig, &[]).unwrap();
    assert_eq!(empty.size(), 1);
    assert!(empty.tables().iter().all(|t| t.iter().all(|&v| v == 0)));
    let single = product(&sig, std::slice::from_ref(&z2)).unwrap();
    assert_eq!(single.tables(), z2.tables());

    let z4 = alg("cyclic_group(4)");
    let q = quotient(&z4, &p("0 2|1 3")).unwrap();
    assert_eq!(q.target().tables(), z2.tables());
    assert_eq!(kernel_pair(&q), p("0 2|1 3"));
    let id = quotient(&z4, &Partition::discrete(4)).unwrap();
    assert!(id.is_bijective());
    assert_eq!(kernel_pair(&id), Partition::discrete(4));
    let collapse = quotient(&z4, &Partition::total(4)).unwrap();
    assert_eq!(collapse.target().size(), 1);
    assert_eq!(kernel_pair(&collapse), Partition::total(4));
    assert!(quotient(&z4, &p("0 1|2 3")).is_err());

    assert_eq!(generate_subuniverse(&z4, &[1]).unwrap(), vec![0, 1, 2, 3]);
    assert_eq!(generate_subuniverse(&z4, &[2]).unwrap(), vec![0, 2]);
    assert_eq!(generate_subuniverse(&z4, &[0, 1, 2, 3]).unwrap(), vec![0, 1, 2, 3]);
}

#[test]
fn quotient_invariants_on_corpus() {
    for e in small_corpus(8) {
        let a = &e.algebra;
        let con = con_lattice(a, None).unwrap();
        for t1 in con.congruences() {
            let q1 = quotient(a, t1).unwrap();
            assert_eq!(&kernel_pair(&q1), t1);
            assert_eq!(q1.target().size(), t1.num_blocks());
            assert!(homomorphism_violation(a, q1.target(), q1.map()).is_none());
            for t2 in con.congruences().iter().filter(|t2| t1.is_finer_than(t2)) {
                let q2 = quotient(a, t2).unwrap();
                let h = q1.factor_through(&q2).unwrap();
                let composite: Vec<usize> = q1.map().iter().map(|&x| h.map()[x]).collect();
                assert_eq!(composite, q2.map());
                assert_eq!(h.target().tables(), q2.target().tables());
            }
        }
    }
}

#[test]
fn projections_are_homomorphisms_with_trivial_kernel_meet() {
    let factors = [alg("cyclic_group(2)"), alg("cyclic_group(3)"), alg("sym3")];
    let prod = product(factors[0].signature(), &factors).unwrap();
    let mut meet = Partition::total(prod.size());
    for i in 0..factors.len() {
        let pi = projection(&prod, &factors, i).unwrap();
        assert!(homomorphism_violation(&prod, &factors[i], pi.map()).is_none());
        meet = meet.meet(&kernel_pair(&pi));
    }
    assert!(meet.is_discrete());
}

#[test]
fn relation_examples() {
    let r = p("0 1|2").to_binrel();
    let s = p("0|1 2").to_binrel();
    let expected = BinRel::from_pairs(3, [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (2, 1), (2, 2)]).unwrap();
    assert_eq!(compose(&r, &s).unwrap(), expected);
    assert_eq!(compose(&BinRel::identity(3), &s).unwrap(), s);
    assert_eq!(compose(&BinRel::full(3), &BinRel::full(3)).unwrap(), BinRel::full(3));

    assert_eq!(equivalence_closure(&r), p("0 1|2"));
    assert_eq!(equivalence_closure(&BinRel::from_pairs(3, [(0, 1), (1, 2)]).unwrap()), Partition::total(3));
    assert_eq!(equivalence_closure(&BinRel::empty(4)), Partition::discrete(4));

    let z4 = alg("cyclic_group(4)");
    assert!(is_congruence(&z4, &p("0 2|1 3")).unwrap().holds());
    assert_eq!(
        is_congruence(&z4, &p("0 1|2 3")).unwrap().witness().unwrap().to_string(),
        "m on ((0,0),(1,1)): 0 vs 2 unrelated"
    );
    assert_eq!(congruence_generated(&z4, &[(0, 2)]).unwrap(), p("0 2|1 3"));
    assert_eq!(congruence_generated(&z4, &[(0, 1)]).unwrap(), Partition::total(4));

    let k = alg("klein4");
    assert_eq!(con_lattice(&k, None).unwrap().len(), 5);
    assert_eq!(join(&k, &p("0 1|2 3"), &p("0 2|1 3")).unwrap(), Partition::total(4));
    let diag = quotient(&k, &p("0 3|1 2")).unwrap();
    assert_eq!(direct_image(&diag, &p("0 1|2 3")).unwrap(), Partition::total(2));
    let q = quotient(&z4, &p("0 2|1 3")).unwrap();
    assert_eq!(inverse_image(&q, &Partition::discrete(2)).unwrap(), p("0 2|1 3"));
    assert_eq!(con_lattice(&alg("singleton"), None).unwrap().len(), 1);
}

#[test]
fn lattice_invariants_on_corpus() {
    for e in corpus() {
        let a = &e.algebra;
        let con = con_lattice(a, None).unwrap();
        assert!(con.modular_law().holds(), "{}", e.name);
        for r in con.congruences() {
            for s in con.congruences() {
                assert!(con.index_of(&r.meet(s)).is_some());
                assert!(con.index_of(&join(a, r, s).unwrap()).is_some());
            }
        }
        for k in con.congruences() {
            let q = quotient(a, k).unwrap();
            for s in con_lattice(q.target(), None).unwrap().congruences() {
                assert!(is_congruence(a, &inverse_image(&q, s).unwrap()).unwrap().holds());
            }
        }
    }
}

#[test]
fn permutability_examples() {
    let k = alg("klein4");
    let (ker1, ker2) = (p("0 1|2 3"), p("0 2|1 3"));
    assert_eq!(permutability_level(&k, &ker1, &ker2).unwrap(), PermutabilityLevel::Two);
    assert_eq!(permutability_level(&k, &ker1, &ker1).unwrap(), PermutabilityLevel::Two);
    assert!(goursat_join_check(&k, &ker1, &ker2).unwrap().holds());
    assert!(goursat_join_check(&k, &ker1, &ker1).unwrap().holds());
    let chain = alg("chain_lattice(3)");
    let (t1, t2) = (p("0 1|2"), p("0|1 2"));
    assert_eq!(permutability_level(&chain, &t1, &t2).unwrap(), PermutabilityLevel::Three);
    assert!(goursat_join_check(&chain, &t1, &t2).unwrap().holds());

    let one = alg("singleton");
    let mut c = generate_clone3(&one, CloneOptions::default()).unwrap();
    c.complete();
    assert_eq!(c.len(), 1);
    assert!(find_maltsev_term(&one, CloneOptions::default()).unwrap().found().is_some());

    let bare = FiniteAlgebra::new("bare", Signature::default(), 3, vec![]).unwrap();
    let mut c = generate_clone3(&bare, CloneOptions::default()).unwrap();
    c.complete();
    assert_eq!(c.len(), 3);

    let z2 = alg("cyclic_group(2)");
    let mut c = generate_clone3(&z2, CloneOptions::default()).unwrap();
    c.complete();
    let xyz: Vec<u8> = tuples(2, 3).iter().map(|t| ((t[0] + t[1] + t[2]) % 2) as u8).collect();
    assert!(c.index_of(&xyz).is_some());
    let (pw, qw) = find_hm_terms(&z2, CloneOptions::default()).unwrap().found().cloned().unwrap();
    assert_eq!(pw.table, xyz.iter().map(|&v| v as usize).collect::<Vec<_>>());
    assert_eq!(qw.table, tuples(2, 3).iter().map(|t| t[2]).collect::<Vec<_>>());

    let lat = alg("two_elt_lattice");
    assert_eq!(find_maltsev_term(&lat, CloneOptions::default()).unwrap(), SearchOutcome::Absent);
    assert_eq!(find_hm_terms(&lat, CloneOptions::default()).unwrap(), SearchOutcome::Absent);
    let imp = alg("implication_from_boolean(1)");
    assert!(find_hm_terms(&imp, CloneOptions::default()).unwrap().found().is_some());
}

#[test]
fn witnesses_reverify_and_force_permutability() {
    for name in ["cyclic_group(4)", "sym3", "boolean_ring(2)", "zmod_vnr(6)", "heyting_chain(3)", "implication_fork"] {
        let a = alg(name);
        let n = a.size();
        let outcome = find_maltsev_term(&a, CloneOptions::default()).unwrap();
        if let Some(w) = outcome.found() {
            let term = w.term.as_ref().unwrap();
            for t in tuples(n, 3) {
                let v = eval_term(&a, term, &env(&[("x", t[0]), ("y", t[1]), ("z", t[2])])).unwrap();
                assert_eq!(v, w.at(n, t[0], t[1], t[2]));
            }
            assert!(goursat::permutability::is_maltsev_table(n, &w.table));
            let con = con_lattice(&a, None).unwrap();
            for r in con.congruences() {
                for s in con.congruences() {
                    assert_eq!(permutability_level(&a, r, s).unwrap(), PermutabilityLevel::Two, "{name}");
                }
            }
        } else {
            assert_eq!(name, "implication_fork");
        }
    }
}

#[test]
fn closure_examples() {
    let exp2 = spec("exponent-2").unwrap();
    let z4 = alg("cyclic_group(4)");
    assert_eq!(birkhoff_congruence(&z4, &exp2).unwrap(), p("0 2|1 3"));
    assert!(birkhoff_congruence(&alg("klein4"), &exp2).unwrap().is_discrete());
    assert!(birkhoff_congruence(&z4, &spec("trivial").unwrap()).unwrap().is_total());

    let eta = reflect(&z4, &exp2).unwrap();
    assert_eq!(eta.target().size(), 2);
    assert!(reflect(&alg("klein4"), &exp2).unwrap().is_bijective());
    let s3 = reflect(&alg("sym3"), &spec("abelian-group").unwrap()).unwrap();
    assert_eq!(s3.target().size(), 2);
    assert_eq!(s3.kernel(), &p("0 3 4|1 2 5"));

    let z8 = alg("cyclic_group(8)");
    let s = p("0 4|1 5|2 6|3 7");
    let eff = closure_effective(&z8, &s, &exp2).unwrap();
    assert_eq!(eff.closure, p("0 2 4 6|1 3 5 7"));
    assert!(!eff.closed && !eff.dense);
    assert_eq!(closure_goursat(&z8, &s, &exp2).unwrap().closure, eff.closure);
    let delta = closure_effective(&z8, &Partition::discrete(8), &exp2).unwrap();
    assert_eq!(delta.closure, birkhoff_congruence(&z8, &exp2).unwrap());
    assert_eq!(closure_goursat(&z8, &Partition::discrete(8), &exp2).unwrap().closure, delta.closure);
    assert!(closure_effective(&z8, &Partition::total(8), &exp2).unwrap().dense);
    let all = spec("all").unwrap();
    for t in con_lattice(&z8, None).unwrap().congruences() {
        assert!(closure_goursat(&z8, t, &all).unwrap().closed);
    }
    assert!(matches!(closure_effective(&z4, &p("0 1|2 3"), &exp2), Err(Error::NotCongruence(_))));

    let cg02 = congruence_generated(&z8, &[(0, 2)]).unwrap();
    assert_eq!(closure_by_component(&s, &Partition::discrete(8), &z8).unwrap(), s);
    assert_eq!(closure_by_component(&s, &Partition::total(8), &z8).unwrap(), Partition::total(8));
    assert_eq!(closure_by_component(&s, &cg02, &z8).unwrap(), cg02);
    let chain = alg("chain_lattice(3)");
    assert!(matches!(
        closure_by_component(&p("0 1|2"), &p("0|1 2"), &chain),
        Err(Error::NotTwoPermutable(_))
    ));
}

#[test]
fn reflection_is_universal() {
    for e in small_corpus(8) {
        let a = &e.algebra;
        for v in e.applicable_specs() {
            let eta = reflect(a, &v).unwrap();
            assert!(v.satisfied_by(eta.target()).unwrap());
            for theta in con_lattice(a, None).unwrap().congruences() {
                let q = quotient(a, theta).unwrap();
                if v.satisfied_by(q.target()).unwrap() {
                    let h = eta.factor_through(&q).unwrap();
                    let composite: Vec<usize> = eta.map().iter().map(|&x| h.map()[x]).collect();
                    assert_eq!(composite, q.map(), "{} {}", e.name, v.name);
                }
            }
        }
    }
}

#[test]
fn axiom_and_roundtrip_examples() {
    let algs = [alg("cyclic_group(4)"), alg("cyclic_group(8)"), alg("klein4")];
    for name in ["exponent-2", "trivial", "all"] {
        let report = check_axioms(&algs, &spec(name).unwrap(), AxiomBounds::default()).unwrap();
        assert!(report.all_pass(), "{name}: {report:?}");
    }
    let tight = AxiomBounds {
        max_size: 4,
        ..AxiomBounds::default()
    };
    let report = check_axioms(&algs, &spec("exponent-2").unwrap(), tight).unwrap();
    assert!(report.results.iter().all(|r| matches!(r.status, AxiomStatus::NotApplicable(_))));

    for (a, v) in [("cyclic_group(4)", "exponent-2"), ("klein4", "exponent-2"), ("cyclic_group(8)", "exponent-2")] {
        assert!(roundtrip_check(&alg(a), &spec(v).unwrap(), None).unwrap().holds());
    }
}

#[test]
fn distributivity_examples() {
    let z4 = alg("cyclic_group(4)");
    assert!(is_distributive(&con_lattice(&z4, None).unwrap()).holds());
    assert!(image_meet_check(&z4, None).unwrap().holds());
    let k = alg("klein4");
    let w = is_distributive(&con_lattice(&k, None).unwrap()).witness().cloned().unwrap();
    assert_eq!((w.a, w.b, w.c), (p("0 1|2 3"), p("0 2|1 3"), p("0 3|1 2")));
    assert!(is_distributive(&con_lattice(&alg("two_elt_lattice"), None).unwrap()).holds());
    let h3 = alg("heyting_chain(3)");
    assert!(image_meet_check(&h3, None).unwrap().holds());

    let boole = spec("boolean-from-heyting").unwrap();
    assert!(check_axiom7(&h3, &boole, None).unwrap().holds());
    let all = spec("all").unwrap();
    assert_eq!(check_axiom7(&k, &all, None).unwrap(), image_meet_check(&k, None).unwrap());
    assert!(check_axiom7(&alg("singleton"), &spec("trivial").unwrap(), None).unwrap().holds());

    assert_eq!(
        closure_meet_identity_check(&h3, &boole, None).unwrap(),
        Applicability::Checked(goursat::Verdict::Holds)
    );
    assert_eq!(
        closure_meet_identity_check(&z4, &spec("exponent-2").unwrap(), None).unwrap(),
        Applicability::Checked(goursat::Verdict::Holds)
    );
    assert!(matches!(
        closure_meet_identity_check(&k, &all, None).unwrap(),
        Applicability::NotApplicable(_)
    ));
    for e in corpus() {
        for v in e.applicable_specs() {
            match closure_meet_identity_check(&e.algebra, &v, None).unwrap() {
                Applicability::Checked(verdict) => assert!(verdict.holds(), "{} {}", e.name, v.name),
                Applicability::NotApplicable(_) => assert_eq!(e.name, "klein4"),
            }
        }
    }
}

#[test]
fn corpus_tags_verify() {
    for e in corpus() {
        let check = e.verify_tags(CloneOptions::default()).unwrap();
        assert!(check.ok(), "{}: {:?}", e.name, check.problems);
        if e.is_implication() && e.name != "implication_fork" {
            assert!(!check.notes.is_empty(), "{}", e.name);
        }
    }
}

#[test]
fn corpus_examples() {
    let z4 = alg("cyclic_group(4)");
    assert_eq!(z4.table(0), &[0, 1, 2, 3, 1, 2, 3, 0, 2, 3, 0, 1, 3, 0, 1, 2]);
    assert_eq!(z4.table(1), &[0, 3, 2, 1]);
    assert_eq!(z4.table(2), &[0]);

    let ring_ids = goursat::terms::parse_identities(
        "mul(x,mul(star(x),star(x))) = star(x)\nmul(mul(x,x),star(x)) = x\n",
        &corpus::Family::VnrRing.signature(),
    )
    .unwrap();
    for name in ["boolean_ring(1)", "zmod_vnr(6)"] {
        assert!(goursat::terms::satisfies_all(&alg(name), &ring_ids).unwrap(), "{name}");
    }
    let heyting = goursat::terms::parse_identities(corpus::Family::Heyting.identities(), &corpus::Family::Heyting.signature()).unwrap();
    assert!(goursat::terms::satisfies_all(&alg("heyting_chain(3)"), &heyting).unwrap());
    assert!(find_maltsev_term(&alg("zmod_vnr(6)"), CloneOptions::default()).unwrap().found().is_some());

    assert!(birkhoff_congruence(&z4, &spec("all").unwrap()).unwrap().is_discrete());
    assert_eq!(
        birkhoff_congruence(&alg("cyclic_group(8)"), &spec("exponent-2").unwrap()).unwrap(),
        congruence_generated(&alg("cyclic_group(8)"), &[(0, 2)]).unwrap()
    );
    assert!(matches!(lookup("zmod_vnr(12)"), Err(Error::InvalidParameters(_))));
    assert!(matches!(lookup("octonions"), Err(Error::UnknownCorpusEntry(_))));
}
