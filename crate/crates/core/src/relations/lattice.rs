use std::collections::{HashMap, HashSet};

use super::congruence::congruence_generated;
use super::Partition;
use crate::algebras::FiniteAlgebra;
use crate::{Error, Result, Verdict};

/// Default carrier bound for congruence lattice enumeration. The number of
/// congruences can grow like the Bell numbers, so larger carriers need an
/// explicit override.
pub const DEFAULT_MAX_SIZE: usize = 64;

/// The congruence lattice of an algebra, with its order and operation
/// tables indexed by position in `congruences`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConLattice {
    congruences: Vec<Partition>,
    index: HashMap<Partition, usize>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<usize>>,
    join: Vec<Vec<usize>>,
}

/// Enumerates `Con(alg)`: principal congruences `Cg(a, b)`, then closure
/// under binary joins starting from Δ. Sorted by (number of blocks,
/// canonical label vector).
pub fn con_lattice(alg: &FiniteAlgebra, max_size: Option<usize>) -> Result<ConLattice> {
    let n = alg.size();
    let bound = max_size.unwrap_or(DEFAULT_MAX_SIZE);
    if n > bound {
        return Err(Error::BoundExceeded { size: n, bound });
    }
    let mut principal: Vec<Partition> = Vec::new();
    let mut seen_principal = HashSet::new();
    for a in 0..n {
        for b in a + 1..n {
            let cg = congruence_generated(alg, &[(a, b)])?;
            if seen_principal.insert(cg.clone()) {
                principal.push(cg);
            }
        }
    }

    let bottom = Partition::discrete(n);
    let mut all: HashSet<Partition> = HashSet::from([bottom.clone()]);
    let mut frontier = vec![bottom];
    while let Some(c) = frontier.pop() {
        for p in &principal {
            if p.is_finer_than(&c) {
                continue;
            }
            let j = c.join_equiv(p);
            if all.insert(j.clone()) {
                frontier.push(j);
            }
        }
    }
    let mut congruences: Vec<Partition> = all.into_iter().collect();
    congruences.sort();
    Ok(ConLattice::from_sorted(congruences))
}

impl ConLattice {
    fn from_sorted(congruences: Vec<Partition>) -> ConLattice {
        let k = congruences.len();
        let index: HashMap<Partition, usize> = congruences
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let mut leq = vec![vec![false; k]; k];
        let mut meet = vec![vec![0; k]; k];
        let mut join = vec![vec![0; k]; k];
        for i in 0..k {
            for j in 0..k {
                leq[i][j] = congruences[i].is_finer_than(&congruences[j]);
                meet[i][j] = index[&congruences[i].meet(&congruences[j])];
                join[i][j] = index[&congruences[i].join_equiv(&congruences[j])];
            }
        }
        ConLattice {
            congruences,
            index,
            leq,
            meet,
            join,
        }
    }

    pub fn len(&self) -> usize {
        self.congruences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.congruences.is_empty()
    }

    pub fn congruences(&self) -> &[Partition] {
        &self.congruences
    }

    pub fn get(&self, i: usize) -> &Partition {
        &self.congruences[i]
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.meet[i][j]
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        self.join[i][j]
    }

    pub fn bottom(&self) -> usize {
        self.len() - 1
    }

    pub fn top(&self) -> usize {
        0
    }

    /// Covering pairs `(lower, upper)` of the lattice order, sorted.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let k = self.len();
        let mut out = Vec::new();
        for lo in 0..k {
            for hi in 0..k {
                if lo == hi || !self.leq[lo][hi] {
                    continue;
                }
                let between = (0..k).any(|m| {
                    m != lo && m != hi && self.leq[lo][m] && self.leq[m][hi]
                });
                if !between {
                    out.push((lo, hi));
                }
            }
        }
        out
    }

    /// Whether the lattice is a chain.
    pub fn is_chain(&self) -> bool {
        let k = self.len();
        (0..k).all(|i| (0..k).all(|j| self.leq[i][j] || self.leq[j][i]))
    }

    /// Checks `a ≤ c ⇒ a ∨ (b ∧ c) = (a ∨ b) ∧ c`; the witness is the
    /// lexicographically least failing index triple.
    pub fn modular_law(&self) -> Verdict<(usize, usize, usize)> {
        let k = self.len();
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    if self.leq[a][c]
                        && self.join[a][self.meet[b][c]] != self.meet[self.join[a][b]][c]
                    {
                        return Verdict::Fails((a, b, c));
                    }
                }
            }
        }
        Verdict::Holds
    }
}
