//! Brute-force oracles shared by the integration tests. Everything here is
//! deliberately naive: full enumeration, no union-find, no bitsets.
#![allow(dead_code)]

use std::collections::BTreeMap;

use goursat::terms::eval_term;
use goursat::{FiniteAlgebra, Identity, Partition};

/// All set partitions of `0..n`, via restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    fn rec(i: usize, n: usize, labels: &mut Vec<usize>, max: usize, out: &mut Vec<Partition>) {
        if i == n {
            out.push(Partition::from_labels(labels));
            return;
        }
        for l in 0..=max + 1 {
            labels.push(l);
            rec(i + 1, n, labels, max.max(l), out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut labels = vec![0];
    rec(1, n, &mut labels, 0, &mut out);
    out
}

/// All tuples in `0..n` of length `k`.
pub fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for t in &out {
            for a in 0..n {
                let mut u = t.clone();
                u.push(a);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

/// Compatibility over every pair of componentwise related tuples.
pub fn naive_compatible(alg: &FiniteAlgebra, p: &Partition) -> bool {
    let n = alg.size();
    for op in 0..alg.signature().len() {
        let k = alg.arity(op);
        let ts = tuples(n, k);
        for a in &ts {
            for b in &ts {
                if a.iter().zip(b).all(|(&x, &y)| p.related(x, y))
                    && !p.related(alg.apply(op, a), alg.apply(op, b))
                {
                    return false;
                }
            }
        }
    }
    true
}

/// Congruences by testing every partition, sorted.
pub fn brute_con(alg: &FiniteAlgebra) -> Vec<Partition> {
    let mut v: Vec<Partition> = all_partitions(alg.size())
        .into_iter()
        .filter(|p| naive_compatible(alg, p))
        .collect();
    v.sort();
    v
}

/// Intersection of every congruence containing `pairs`.
pub fn brute_cg(con: &[Partition], n: usize, pairs: &[(usize, usize)]) -> Partition {
    con.iter()
        .filter(|p| pairs.iter().all(|&(a, b)| p.related(a, b)))
        .fold(Partition::total(n), |acc, p| acc.meet(p))
}

/// Relations as boolean matrices.
pub type Matrix = Vec<Vec<bool>>;

pub fn naive_compose(r: &Matrix, s: &Matrix) -> Matrix {
    let n = r.len();
    let mut out = vec![vec![false; n]; n];
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if r[x][y] && s[y][z] {
                    out[x][z] = true;
                }
            }
        }
    }
    out
}

/// Whether `alg/theta` satisfies every identity, evaluated naively in `alg`.
pub fn quotient_satisfies(alg: &FiniteAlgebra, theta: &Partition, ids: &[Identity]) -> bool {
    ids.iter().all(|id| {
        tuples(alg.size(), id.vars().len()).iter().all(|vals| {
            let env: BTreeMap<String, usize> = id.vars().iter().cloned().zip(vals.iter().copied()).collect();
            let l = eval_term(alg, &id.lhs, &env).unwrap();
            let r = eval_term(alg, &id.rhs, &env).unwrap();
            theta.related(l, r)
        })
    })
}

/// Least congruence containing `s` whose quotient satisfies `ids`.
pub fn brute_closure(con: &[Partition], alg: &FiniteAlgebra, s: &Partition, ids: &[Identity]) -> Partition {
    let candidates: Vec<&Partition> = con
        .iter()
        .filter(|t| s.is_finer_than(t) && quotient_satisfies(alg, t, ids))
        .collect();
    let least = candidates
        .iter()
        .fold(Partition::total(alg.size()), |acc, t| acc.meet(t));
    assert!(candidates.contains(&&least), "no least reflecting congruence");
    least
}

/// Least congruence whose quotient satisfies `ids`.
pub fn brute_birkhoff(con: &[Partition], alg: &FiniteAlgebra, ids: &[Identity]) -> Partition {
    brute_closure(con, alg, &Partition::discrete(alg.size()), ids)
}

/// Equivalence closure of the raw image of `s` along the map `f`.
pub fn naive_image(f: &[usize], m: usize, s: &Partition) -> Partition {
    let mut rel = vec![vec![false; m]; m];
    for a in 0..f.len() {
        for b in 0..f.len() {
            if s.related(a, b) {
                rel[f[a]][f[b]] = true;
            }
        }
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                if rel[i][k] && rel[k][j] {
                    rel[i][j] = true;
                }
            }
        }
    }
    let labels: Vec<usize> = (0..m).map(|i| (0..m).find(|&j| rel[i][j]).unwrap()).collect();
    Partition::from_labels(&labels)
}

/// Corpus algebras up to `max` elements.
pub fn small_corpus(max: usize) -> Vec<goursat::corpus::CorpusEntry> {
    goursat::corpus::corpus()
        .into_iter()
        .filter(|e| e.algebra.size() <= max)
        .collect()
}
