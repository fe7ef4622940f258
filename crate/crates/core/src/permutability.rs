//! Permutability of congruences and ternary term-condition searches.
//!
//! Term searches explore the clone of ternary term operations generated by
//! the three projections, level by level: level `d + 1` holds the new tables
//! obtained by applying one basic operation to tables of level `≤ d`, at
//! least one of them from level `d`. Within a level tables are ordered
//! lexicographically, which fixes the witness a search returns.

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexSet;

use crate::algebras::FiniteAlgebra;
use crate::relations::{compose, compose_all, is_congruence, join, BinRel, Partition};
use crate::terms::Term;
use crate::{Error, Result, Verdict};

/// Default bound on the number of clone elements generated by a search.
pub const DEFAULT_CLONE_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PermutabilityLevel {
    /// `r ∘ s = s ∘ r`
    Two,
    /// `r ∘ s ∘ r = s ∘ r ∘ s` but not 2-permuting
    Three,
    Neither,
}

impl fmt::Display for PermutabilityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PermutabilityLevel::Two => "two",
            PermutabilityLevel::Three => "three",
            PermutabilityLevel::Neither => "neither",
        })
    }
}

fn require_congruences(alg: &FiniteAlgebra, ps: &[&Partition]) -> Result<()> {
    for p in ps {
        if let Verdict::Fails(v) = is_congruence(alg, p)? {
            return Err(Error::NotCongruence(v));
        }
    }
    Ok(())
}

pub fn permutability_level(
    alg: &FiniteAlgebra,
    r: &Partition,
    s: &Partition,
) -> Result<PermutabilityLevel> {
    require_congruences(alg, &[r, s])?;
    let (r, s) = (r.to_binrel(), s.to_binrel());
    if compose(&r, &s)? == compose(&s, &r)? {
        return Ok(PermutabilityLevel::Two);
    }
    if compose_all(&[&r, &s, &r])? == compose_all(&[&s, &r, &s])? {
        Ok(PermutabilityLevel::Three)
    } else {
        Ok(PermutabilityLevel::Neither)
    }
}

/// `r ∘ s ∘ r` differs from the join `r ∨ s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinMismatch {
    pub composite: BinRel,
    pub join: Partition,
}

/// For a 3-permuting pair, checks that the raw composite `r ∘ s ∘ r` already
/// equals the join, with no equivalence-closure step.
pub fn goursat_join_check(
    alg: &FiniteAlgebra,
    r: &Partition,
    s: &Partition,
) -> Result<Verdict<JoinMismatch>> {
    if permutability_level(alg, r, s)? == PermutabilityLevel::Neither {
        return Err(Error::NotThreePermutable(format!("{r} vs {s}")));
    }
    let (rr, sr) = (r.to_binrel(), s.to_binrel());
    let composite = compose_all(&[&rr, &sr, &rr])?;
    let j = join(alg, r, s)?;
    if composite == j.to_binrel() {
        Ok(Verdict::Holds)
    } else {
        Ok(Verdict::Fails(JoinMismatch { composite, join: j }))
    }
}

/// How a clone element was first produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Projection(usize),
    Apply { op: usize, args: Vec<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CloneOptions {
    pub cap: usize,
    /// Keep parent pointers so terms can be reconstructed.
    pub keep_terms: bool,
}

impl Default for CloneOptions {
    fn default() -> Self {
        CloneOptions {
            cap: DEFAULT_CLONE_CAP,
            keep_terms: true,
        }
    }
}

impl CloneOptions {
    pub fn with_cap(cap: usize) -> Self {
        CloneOptions {
            cap,
            ..CloneOptions::default()
        }
    }
}

const VARS: [&str; 3] = ["x", "y", "z"];

/// Ternary term operations of an algebra, generated breadth-first.
#[derive(Debug, Clone)]
pub struct Clone3 {
    alg: FiniteAlgebra,
    options: CloneOptions,
    tables: IndexSet<Box<[u8]>>,
    origins: Vec<Origin>,
    /// Start index of every level.
    levels: Vec<usize>,
    capped: bool,
    saturated: bool,
}

impl Clone3 {
    pub fn new(alg: &FiniteAlgebra, options: CloneOptions) -> Result<Clone3> {
        if options.cap < 3 {
            return Err(Error::InvalidParameters(format!(
                "clone cap must be at least 3, got {}",
                options.cap
            )));
        }
        let n = alg.size();
        if n > 256 {
            return Err(Error::BoundExceeded { size: n, bound: 256 });
        }
        let points = n * n * n;
        let mut level: Vec<(Box<[u8]>, Origin)> = (0..3)
            .map(|i| {
                let t: Box<[u8]> = (0..points)
                    .map(|p| {
                        let coords = [p / (n * n), (p / n) % n, p % n];
                        coords[i] as u8
                    })
                    .collect();
                (t, Origin::Projection(i))
            })
            .collect();
        level.sort_by(|a, b| a.0.cmp(&b.0));
        let mut clone = Clone3 {
            alg: alg.clone(),
            options,
            tables: IndexSet::new(),
            origins: Vec::new(),
            levels: vec![0],
            capped: false,
            saturated: false,
        };
        for (t, o) in level {
            if clone.tables.insert(t) {
                clone.origins.push(o);
            }
        }
        Ok(clone)
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    pub fn size(&self) -> usize {
        self.alg.size()
    }

    /// Whether generation stopped at the cap rather than at a fixpoint.
    pub fn is_capped(&self) -> bool {
        self.capped
    }

    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    pub fn table(&self, i: usize) -> &[u8] {
        &self.tables[i]
    }

    pub fn depth(&self, i: usize) -> usize {
        self.levels.partition_point(|&start| start <= i) - 1
    }

    pub fn index_of(&self, table: &[u8]) -> Option<usize> {
        self.tables.get_index_of(table)
    }

    /// Index range of the most recent level.
    pub fn last_level(&self) -> std::ops::Range<usize> {
        *self.levels.last().unwrap()..self.len()
    }

    /// Generates the next level. Returns `false` once the clone is saturated
    /// or the cap has been hit.
    pub fn next_level(&mut self) -> bool {
        if self.capped || self.saturated {
            return false;
        }
        let n = self.alg.size();
        let points = n * n * n;
        let prev_start = *self.levels.last().unwrap();
        let total = self.len();
        let first_expansion = self.levels.len() == 1;
        let mut fresh: HashMap<Box<[u8]>, Origin> = HashMap::new();
        let mut order: Vec<Box<[u8]>> = Vec::new();
        let room = self.options.cap - total;

        'ops: for op in 0..self.alg.signature().len() {
            let arity = self.alg.arity(op);
            if arity == 0 && !first_expansion {
                continue;
            }
            let mut stop = false;
            crate::terms::for_each_assignment(total, arity, |idx| {
                if arity > 0 && idx.iter().all(|&i| i < prev_start) {
                    return true;
                }
                let cols: Vec<&[u8]> = idx.iter().map(|&i| &*self.tables[i]).collect();
                let mut out = vec![0u8; points];
                let mut argv = vec![0usize; arity];
                for (p, o) in out.iter_mut().enumerate() {
                    for (a, c) in argv.iter_mut().zip(&cols) {
                        *a = c[p] as usize;
                    }
                    *o = self.alg.apply(op, &argv) as u8;
                }
                let out: Box<[u8]> = out.into_boxed_slice();
                if self.tables.contains(&out) || fresh.contains_key(&out) {
                    return true;
                }
                if fresh.len() == room {
                    stop = true;
                    return false;
                }
                fresh.insert(
                    out.clone(),
                    Origin::Apply {
                        op,
                        args: idx.to_vec(),
                    },
                );
                order.push(out);
                true
            });
            if stop {
                self.capped = true;
                break 'ops;
            }
        }
        if fresh.is_empty() {
            if !self.capped {
                self.saturated = true;
            }
            return false;
        }
        order.sort();
        self.levels.push(total);
        for t in order {
            let origin = fresh.remove(&t).unwrap();
            self.tables.insert(t);
            if self.options.keep_terms {
                self.origins.push(origin);
            }
        }
        !self.capped
    }

    /// Runs generation to a fixpoint or the cap.
    pub fn complete(&mut self) {
        while self.next_level() {}
    }

    pub fn term(&self, i: usize) -> Option<Term> {
        if !self.options.keep_terms {
            return None;
        }
        Some(match self.origins.get(i)? {
            Origin::Projection(v) => Term::var(VARS[*v]),
            Origin::Apply { op, args } => {
                let sym = self.alg.signature().symbol(*op).0;
                let children = args
                    .iter()
                    .map(|&a| self.term(a))
                    .collect::<Option<Vec<_>>>()?;
                Term::app(sym, children)
            }
        })
    }

    pub fn witness(&self, i: usize) -> TermWitness {
        TermWitness {
            table: self.table(i).iter().map(|&v| v as usize).collect(),
            term: self.term(i),
        }
    }
}

/// Generates the clone on three variables to a fixpoint or to `cap` tables.
pub fn generate_clone3(alg: &FiniteAlgebra, options: CloneOptions) -> Result<Clone3> {
    let mut c = Clone3::new(alg, options)?;
    c.complete();
    Ok(c)
}

/// A ternary term operation, as a table over `carrier³` (index
/// `x*n² + y*n + z`), with a term producing it when available.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermWitness {
    pub table: Vec<usize>,
    pub term: Option<Term>,
}

impl TermWitness {
    pub fn at(&self, n: usize, x: usize, y: usize, z: usize) -> usize {
        self.table[x * n * n + y * n + z]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Found(T),
    /// The clone reached a fixpoint without a witness.
    Absent,
    /// The cap was hit first; `tables` elements were explored.
    Inconclusive { tables: usize },
}

impl<T> SearchOutcome<T> {
    pub fn found(&self) -> Option<&T> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            _ => None,
        }
    }
}

fn at(t: &[u8], n: usize, x: usize, y: usize, z: usize) -> usize {
    t[x * n * n + y * n + z] as usize
}

/// `p(x,y,y) = x` and `p(x,x,y) = y` everywhere.
pub fn is_maltsev_table(n: usize, t: &[usize]) -> bool {
    (0..n).all(|x| {
        (0..n).all(|y| t[x * n * n + y * n + y] == x && t[x * n * n + x * n + y] == y)
    })
}

/// `p(x,y,y) = x`, `q(x,x,y) = y`, `p(x,x,y) = q(x,y,y)` everywhere.
pub fn is_hm_pair(n: usize, p: &[usize], q: &[usize]) -> bool {
    let idx = |x: usize, y: usize, z: usize| x * n * n + y * n + z;
    (0..n).all(|x| {
        (0..n).all(|y| {
            p[idx(x, y, y)] == x && q[idx(x, x, y)] == y && p[idx(x, x, y)] == q[idx(x, y, y)]
        })
    })
}

fn exhausted<T>(c: &Clone3) -> SearchOutcome<T> {
    if c.is_capped() {
        SearchOutcome::Inconclusive { tables: c.len() }
    } else {
        SearchOutcome::Absent
    }
}

/// Searches for a Mal'tsev term `p(x,x,y) = y = p(y,x,x)`.
pub fn find_maltsev_term(alg: &FiniteAlgebra, options: CloneOptions) -> Result<SearchOutcome<TermWitness>> {
    let n = alg.size();
    let mut c = Clone3::new(alg, options)?;
    let mut range = 0..c.len();
    loop {
        for i in range {
            let t = c.table(i);
            let ok = (0..n).all(|x| (0..n).all(|y| at(t, n, x, y, y) == x && at(t, n, x, x, y) == y));
            if ok {
                return Ok(SearchOutcome::Found(c.witness(i)));
            }
        }
        let grew = c.len();
        c.next_level();
        if c.len() == grew {
            return Ok(exhausted(&c));
        }
        range = c.last_level();
    }
}

/// Searches for Hagemann-Mitschke terms `p, q` witnessing 3-permutability.
/// The chosen pair is the least by (index of `q`, index of `p`) in clone
/// order.
pub fn find_hm_terms(
    alg: &FiniteAlgebra,
    options: CloneOptions,
) -> Result<SearchOutcome<(TermWitness, TermWitness)>> {
    let n = alg.size();
    let mut c = Clone3::new(alg, options)?;
    // p(x,x,y) as a binary table -> least index of a p with p(x,y,y) = x
    let mut p_by_diag: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut qs: Vec<usize> = Vec::new();
    let mut range = 0..c.len();
    loop {
        for i in range.clone() {
            let t = c.table(i);
            let is_p = (0..n).all(|x| (0..n).all(|y| at(t, n, x, y, y) == x));
            if is_p {
                let key: Vec<u8> = (0..n * n)
                    .map(|k| at(t, n, k / n, k / n, k % n) as u8)
                    .collect();
                p_by_diag.entry(key).or_insert(i);
            }
            let is_q = (0..n).all(|x| (0..n).all(|y| at(t, n, x, x, y) == y));
            if is_q {
                qs.push(i);
            }
        }
        for &q in &qs {
            let t = c.table(q);
            let key: Vec<u8> = (0..n * n)
                .map(|k| at(t, n, k / n, k % n, k % n) as u8)
                .collect();
            if let Some(&p) = p_by_diag.get(&key) {
                return Ok(SearchOutcome::Found((c.witness(p), c.witness(q))));
            }
        }
        let grew = c.len();
        c.next_level();
        if c.len() == grew {
            return Ok(exhausted(&c));
        }
        range = c.last_level();
    }
}

/// Levels of every pair of congruences `(i, j)` with `i ≤ j`, by index in
/// `congruences`.
pub fn permutability_table(
    alg: &FiniteAlgebra,
    congruences: &[Partition],
) -> Result<Vec<(usize, usize, PermutabilityLevel)>> {
    let mut out = Vec::new();
    for i in 0..congruences.len() {
        for j in i..congruences.len() {
            out.push((i, j, permutability_level(alg, &congruences[i], &congruences[j])?));
        }
    }
    Ok(out)
}
