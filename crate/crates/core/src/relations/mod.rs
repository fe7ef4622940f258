//! Binary relations and equivalence relations on finite carriers.
//!
//! Composition is read left to right: `(x, z) ∈ r ∘ s` iff there is `y` with
//! `(x, y) ∈ r` and `(y, z) ∈ s`.
//!
//! Partitions are kept in canonical form (elements ascending within a block,
//! blocks ordered by their minimum) and print as literals such as `0 2|1 3`.

mod congruence;
mod lattice;

pub use congruence::{
    congruence_generated, direct_image, direct_image_raw, inverse_image, is_congruence, join,
    CongruenceViolation,
};
pub use lattice::{con_lattice, ConLattice, DEFAULT_MAX_SIZE};
pub(crate) use congruence::congruence_generated_from;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// A binary relation on `0..n` stored as an `n × n` bit matrix, one bitset
/// row per element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinRel {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BinRel {
    pub fn empty(n: usize) -> BinRel {
        let words = n.div_ceil(64).max(1);
        BinRel {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    pub fn identity(n: usize) -> BinRel {
        let mut r = BinRel::empty(n);
        (0..n).for_each(|a| r.insert(a, a));
        r
    }

    pub fn full(n: usize) -> BinRel {
        let mut r = BinRel::empty(n);
        for a in 0..n {
            for b in 0..n {
                r.insert(a, b);
            }
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<BinRel> {
        let mut r = BinRel::empty(n);
        for (a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::ElementOutOfRange {
                    element: a.max(b),
                    size: n,
                });
            }
            r.insert(a, b);
        }
        Ok(r)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn row(&self, a: usize) -> &[u64] {
        &self.bits[a * self.words..(a + 1) * self.words]
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.bits[a * self.words + b / 64] |= 1 << (b % 64);
    }

    /// Successors of `a`, ascending.
    pub fn successors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(a).iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + bit)
            })
        })
    }

    /// All pairs in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|a| self.successors(a).map(move |b| (a, b)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &BinRel) -> bool {
        self.n == other.n && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &BinRel) -> Result<BinRel> {
        check_sizes(self.n, other.n)?;
        let mut r = self.clone();
        r.bits.iter_mut().zip(&other.bits).for_each(|(a, b)| *a |= b);
        Ok(r)
    }

    pub fn converse(&self) -> BinRel {
        let mut r = BinRel::empty(self.n);
        for (a, b) in self.pairs() {
            r.insert(b, a);
        }
        r
    }

    pub fn compose(&self, other: &BinRel) -> Result<BinRel> {
        compose(self, other)
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|a| self.contains(a, a))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().into_iter().all(|(a, b)| self.contains(b, a))
    }

    pub fn is_transitive(&self) -> bool {
        compose(self, self).map(|c| c.is_subset(self)).unwrap_or(false)
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_reflexive() && self.is_symmetric() && self.is_transitive()
    }

    /// The partition this relation describes, if it is an equivalence.
    pub fn to_partition(&self) -> Option<Partition> {
        if !self.is_equivalence() {
            return None;
        }
        let mut labels = vec![usize::MAX; self.n];
        let mut next = 0;
        for a in 0..self.n {
            if labels[a] == usize::MAX {
                for b in self.successors(a) {
                    labels[b] = next;
                }
                next += 1;
            }
        }
        Some(Partition::from_labels(&labels))
    }
}

impl fmt::Display for BinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (a, b)) in self.pairs().into_iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({a},{b})")?;
        }
        write!(f, "}}")
    }
}

fn check_sizes(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::SizeMismatch { expected, found })
    }
}

/// Relational composite `r ∘ s`: first `r`, then `s`.
pub fn compose(r: &BinRel, s: &BinRel) -> Result<BinRel> {
    check_sizes(r.n, s.n)?;
    let mut out = BinRel::empty(r.n);
    let w = r.words;
    for x in 0..r.n {
        let dst = x * w;
        for y in r.successors(x) {
            for k in 0..w {
                out.bits[dst + k] |= s.bits[y * w + k];
            }
        }
    }
    Ok(out)
}

/// Composite of a sequence of relations, left to right.
pub fn compose_all(rels: &[&BinRel]) -> Result<BinRel> {
    let (first, rest) = rels
        .split_first()
        .ok_or_else(|| Error::InvalidPartition("nothing to compose".into()))?;
    rest.iter().try_fold((*first).clone(), |acc, r| compose(&acc, r))
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn from_partition(p: &Partition) -> Self {
        let mut uf = UnionFind::new(p.n);
        for block in p.blocks() {
            for &b in &block[1..] {
                uf.parent[b] = block[0];
            }
        }
        uf
    }

    pub(crate) fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    /// Returns `true` if the classes were distinct.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    pub(crate) fn into_partition(mut self) -> Partition {
        let roots: Vec<usize> = (0..self.parent.len()).map(|a| self.find(a)).collect();
        Partition::from_labels(&roots)
    }
}

/// Least equivalence relation containing `r`.
pub fn equivalence_closure(r: &BinRel) -> Partition {
    let mut uf = UnionFind::new(r.n);
    for (a, b) in r.pairs() {
        uf.union(a, b);
    }
    uf.into_partition()
}

/// An equivalence relation on `0..n` in canonical block form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    labels: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Builds the partition whose blocks are the level sets of `labels`.
    /// Any labelling works; the result is canonicalized.
    pub fn from_labels<T: Eq + std::hash::Hash + Copy>(labels: &[T]) -> Partition {
        let mut seen = std::collections::HashMap::new();
        let mut canon = Vec::with_capacity(labels.len());
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (a, l) in labels.iter().enumerate() {
            let next = seen.len();
            let idx = *seen.entry(*l).or_insert(next);
            if idx == blocks.len() {
                blocks.push(Vec::new());
            }
            blocks[idx].push(a);
            canon.push(idx);
        }
        Partition {
            n: labels.len(),
            labels: canon,
            blocks,
        }
    }

    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Partition> {
        let mut labels = vec![usize::MAX; n];
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &a in block {
                if a >= n {
                    return Err(Error::InvalidPartition(format!(
                        "element {a} outside 0..{n}"
                    )));
                }
                if labels[a] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "element {a} appears twice"
                    )));
                }
                labels[a] = i;
            }
        }
        if let Some(missing) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "element {missing} is not covered"
            )));
        }
        Ok(Partition::from_labels(&labels))
    }

    /// Parses a literal and checks it covers exactly `0..n`.
    pub fn parse_with_size(text: &str, n: usize) -> Result<Partition> {
        let p: Partition = text.parse()?;
        if p.n != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: p.n,
            });
        }
        Ok(p)
    }

    /// Δ: every element in its own block.
    pub fn discrete(n: usize) -> Partition {
        Partition::from_labels(&(0..n).collect::<Vec<_>>())
    }

    /// ∇: a single block.
    pub fn total(n: usize) -> Partition {
        Partition::from_labels(&vec![0u8; n])
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Block index of every element; blocks are numbered by ascending minimum.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, a: usize) -> &[usize] {
        &self.blocks[self.labels[a]]
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.labels[a] == self.labels[b]
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.n
    }

    pub fn is_total(&self) -> bool {
        self.blocks.len() <= 1
    }

    /// `self ⊆ other` as relations.
    pub fn is_finer_than(&self, other: &Partition) -> bool {
        self.n == other.n
            && self
                .blocks
                .iter()
                .all(|b| b.iter().all(|&a| other.labels[a] == other.labels[b[0]]))
    }

    /// Intersection.
    pub fn meet(&self, other: &Partition) -> Partition {
        assert_eq!(self.n, other.n, "meet of partitions of different sizes");
        let pairs: Vec<(usize, usize)> = self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(&a, &b)| (a, b))
            .collect();
        Partition::from_labels(&pairs)
    }

    /// Join in the lattice of all equivalence relations. For two congruences
    /// this is also their join as congruences.
    pub fn join_equiv(&self, other: &Partition) -> Partition {
        assert_eq!(self.n, other.n, "join of partitions of different sizes");
        let mut uf = UnionFind::from_partition(self);
        for block in other.blocks() {
            for &b in &block[1..] {
                uf.union(block[0], b);
            }
        }
        uf.into_partition()
    }

    pub fn to_binrel(&self) -> BinRel {
        let mut r = BinRel::empty(self.n);
        for block in &self.blocks {
            for &a in block {
                for &b in block {
                    r.insert(a, b);
                }
            }
        }
        r
    }

    /// Pairs `(min, a)` of each block, which generate the partition as an
    /// equivalence relation.
    pub fn spanning_pairs(&self) -> Vec<(usize, usize)> {
        self.blocks
            .iter()
            .flat_map(|b| b[1..].iter().map(move |&a| (b[0], a)))
            .collect()
    }
}

/// Ordered by number of blocks, then lexicographically by canonical labels.
impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.blocks.len().cmp(&other.blocks.len()))
            .then_with(|| self.labels.cmp(&other.labels))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            for (j, a) in block.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{a}")?;
            }
        }
        Ok(())
    }
}

/// Parses `0 2|1 3`. The carrier size is the number of listed elements,
/// which must be exactly `0..n`.
impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Partition> {
        let mut blocks = Vec::new();
        for part in s.split('|') {
            let block = part
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| {
                        Error::InvalidPartition(format!("`{t}` is not an element"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
        }
        let n = blocks.iter().map(Vec::len).sum();
        Partition::from_blocks(n, &blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_canonical_form() {
        let p = Partition::from_labels(&[5, 3, 5, 3]);
        assert_eq!(p.blocks(), &[vec![0, 2], vec![1, 3]]);
        assert_eq!(p.labels(), &[0, 1, 0, 1]);
        assert_eq!(p.to_string(), "0 2|1 3");
        let q: Partition = " 3 1 | 2 0 ".parse().unwrap();
        assert_eq!(q, p);
        assert_eq!(Partition::total(1).to_string(), "0");
        assert_eq!(Partition::discrete(3).to_string(), "0|1|2");
    }

    #[test]
    fn partition_literal_errors() {
        assert!("0 1|1 2".parse::<Partition>().is_err());
        assert!("0 2".parse::<Partition>().is_err());
        assert!("0 x".parse::<Partition>().is_err());
        assert!("0||1".parse::<Partition>().is_err());
        assert!(Partition::parse_with_size("0 1", 3).is_err());
    }

    #[test]
    fn partition_order_puts_fewer_blocks_first() {
        let mut ps = [
            Partition::discrete(3),
            "0 1|2".parse().unwrap(),
            Partition::total(3),
            "0|1 2".parse().unwrap(),
        ];
        ps.sort();
        let shown: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, ["0 1 2", "0 1|2", "0|1 2", "0|1|2"]);
    }

    #[test]
    fn compose_identity_and_total() {
        let s = "0 1|2".parse::<Partition>().unwrap().to_binrel();
        assert_eq!(compose(&BinRel::identity(3), &s).unwrap(), s);
        assert_eq!(compose(&s, &BinRel::identity(3)).unwrap(), s);
        let full = BinRel::full(3);
        assert_eq!(compose(&full, &full).unwrap(), full);
        assert!(compose(&full, &BinRel::full(4)).is_err());
    }

    #[test]
    fn compose_two_equivalences_on_three_points() {
        let r = "0 1|2".parse::<Partition>().unwrap().to_binrel();
        let s = "0|1 2".parse::<Partition>().unwrap().to_binrel();
        let mut expected = Vec::new();
        for x in 0..2 {
            for z in 0..3 {
                expected.push((x, z));
            }
        }
        expected.extend([(2, 1), (2, 2)]);
        assert_eq!(compose(&r, &s).unwrap(), BinRel::from_pairs(3, expected).unwrap());
    }

    #[test]
    fn equivalence_closure_cases() {
        let p: Partition = "0 2|1".parse().unwrap();
        assert_eq!(equivalence_closure(&p.to_binrel()), p);
        let chain = BinRel::from_pairs(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(equivalence_closure(&chain), Partition::total(3));
        assert_eq!(equivalence_closure(&BinRel::empty(4)), Partition::discrete(4));
    }

    #[test]
    fn binrel_partition_roundtrip() {
        let p: Partition = "0 3|1|2 4".parse().unwrap();
        let r = p.to_binrel();
        assert!(r.is_equivalence());
        assert_eq!(r.to_partition(), Some(p));
        let not_trans = BinRel::from_pairs(3, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (1, 2), (2, 1)]).unwrap();
        assert!(!not_trans.is_transitive());
        assert_eq!(not_trans.to_partition(), None);
    }

    #[test]
    fn wide_relations_use_multiple_words() {
        let n = 130;
        let mut r = BinRel::empty(n);
        r.insert(0, 129);
        r.insert(129, 64);
        let c = compose(&r, &r).unwrap();
        assert!(c.contains(0, 64));
        assert_eq!(c.len(), 1);
        assert_eq!(r.successors(0).collect::<Vec<_>>(), vec![129]);
    }

    #[test]
    fn meet_and_join_of_partitions() {
        let a: Partition = "0 1|2 3".parse().unwrap();
        let b: Partition = "0 2|1 3".parse().unwrap();
        assert_eq!(a.meet(&b), Partition::discrete(4));
        assert_eq!(a.join_equiv(&b), Partition::total(4));
        assert!(Partition::discrete(4).is_finer_than(&a));
        assert!(!a.is_finer_than(&b));
    }
}
