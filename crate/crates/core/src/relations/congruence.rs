use std::fmt;

use super::{check_sizes, BinRel, Partition, UnionFind};
use crate::algebras::{FiniteAlgebra, Morphism, QuotientMap};
use crate::terms::for_each_assignment;
use crate::{Error, Result, Verdict};

/// Two componentwise related argument tuples whose images under `symbol`
/// are unrelated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceViolation {
    pub symbol: String,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub left_value: usize,
    pub right_value: usize,
}

fn tuple(t: &[usize]) -> String {
    let parts: Vec<String> = t.iter().map(|a| a.to_string()).collect();
    format!("({})", parts.join(","))
}

impl fmt::Display for CongruenceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} on ({},{}): {} vs {} unrelated",
            self.symbol,
            tuple(&self.left),
            tuple(&self.right),
            self.left_value,
            self.right_value
        )
    }
}

/// Checks compatibility of `p` with every operation of `alg`. The witness is
/// the first violating symbol (declaration order) with the lexicographically
/// least pair of related argument tuples.
pub fn is_congruence(alg: &FiniteAlgebra, p: &Partition) -> Result<Verdict<CongruenceViolation>> {
    check_sizes(alg.size(), p.size())?;
    for op in 0..alg.signature().len() {
        if !compatible_one_place(alg, op, p) {
            return Ok(Verdict::Fails(least_violation(alg, op, p)));
        }
    }
    Ok(Verdict::Holds)
}

/// Compatibility with all one-place translations `a ↦ f(.., a, ..)`, checked
/// against block minima. Equivalent to full compatibility by transitivity.
fn compatible_one_place(alg: &FiniteAlgebra, op: usize, p: &Partition) -> bool {
    let arity = alg.arity(op);
    let labels = p.labels();
    let mut ok = true;
    let mut moved = vec![0; arity];
    for_each_assignment(alg.size(), arity, |args| {
        let v = labels[alg.apply(op, args)];
        moved.copy_from_slice(args);
        for i in 0..arity {
            let min = p.block_of(args[i])[0];
            if min != args[i] {
                moved[i] = min;
                if labels[alg.apply(op, &moved)] != v {
                    ok = false;
                    return false;
                }
                moved[i] = args[i];
            }
        }
        true
    });
    ok
}

fn least_violation(alg: &FiniteAlgebra, op: usize, p: &Partition) -> CongruenceViolation {
    let arity = alg.arity(op);
    let labels = p.labels();
    let mut found = None;
    for_each_assignment(alg.size(), arity, |left| {
        let blocks: Vec<&[usize]> = left.iter().map(|&a| p.block_of(a)).collect();
        let lv = alg.apply(op, left);
        let mut right = vec![0; arity];
        let max = blocks.iter().map(|b| b.len()).max().unwrap_or(1);
        for_each_assignment(max, arity, |idx| {
            if idx.iter().zip(&blocks).any(|(&i, b)| i >= b.len()) {
                return true;
            }
            for (r, (&i, b)) in right.iter_mut().zip(idx.iter().zip(&blocks)) {
                *r = b[i];
            }
            let rv = alg.apply(op, &right);
            if labels[lv] != labels[rv] {
                found = Some(CongruenceViolation {
                    symbol: alg.signature().symbol(op).0.to_string(),
                    left: left.to_vec(),
                    right: right.clone(),
                    left_value: lv,
                    right_value: rv,
                });
                return false;
            }
            true
        });
        found.is_none()
    });
    found.expect("one-place check found a violation")
}

/// Least congruence containing `pairs`.
///
/// Union-find over the carrier; every pair that merges two classes is queued
/// and its images under all one-place translations are merged in turn. The
/// queued pairs generate the final equivalence, so closing them under
/// translations gives a compatible relation.
pub fn congruence_generated(alg: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Result<Partition> {
    congruence_generated_from(alg, &Partition::discrete(alg.size()), pairs)
}

/// Least congruence containing the congruence `base` and `pairs`.
pub(crate) fn congruence_generated_from(
    alg: &FiniteAlgebra,
    base: &Partition,
    pairs: &[(usize, usize)],
) -> Result<Partition> {
    let n = alg.size();
    for &(a, b) in pairs {
        alg.check_element(a)?;
        alg.check_element(b)?;
    }
    let mut uf = UnionFind::from_partition(base);
    let mut queue: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in pairs {
        if uf.union(a, b) {
            queue.push((a, b));
        }
    }
    let ops: Vec<usize> = (0..alg.signature().len())
        .filter(|&op| alg.arity(op) > 0)
        .collect();
    while let Some((a, b)) = queue.pop() {
        for &op in &ops {
            let arity = alg.arity(op);
            let mut args_a = vec![0; arity];
            let mut args_b = vec![0; arity];
            for pos in 0..arity {
                for_each_assignment(n, arity - 1, |rest| {
                    let mut k = 0;
                    for i in 0..arity {
                        if i == pos {
                            args_a[i] = a;
                            args_b[i] = b;
                        } else {
                            args_a[i] = rest[k];
                            args_b[i] = rest[k];
                            k += 1;
                        }
                    }
                    let (x, y) = (alg.apply(op, &args_a), alg.apply(op, &args_b));
                    if uf.union(x, y) {
                        queue.push((x, y));
                    }
                    true
                });
            }
        }
    }
    Ok(uf.into_partition())
}

/// Join of two congruences: the congruence generated by their union.
pub fn join(alg: &FiniteAlgebra, r: &Partition, s: &Partition) -> Result<Partition> {
    for p in [r, s] {
        if let Verdict::Fails(v) = is_congruence(alg, p)? {
            return Err(Error::NotCongruence(v));
        }
    }
    let mut pairs = r.spanning_pairs();
    pairs.extend(s.spanning_pairs());
    congruence_generated(alg, &pairs)
}

/// The raw image `{(f a, f b) : (a, b) ∈ s}`, without any closure step.
pub fn direct_image_raw(f: &QuotientMap, s: &Partition) -> Result<BinRel> {
    check_sizes(f.source().size(), s.size())?;
    let mut out = BinRel::empty(f.target().size());
    for block in s.blocks() {
        for &a in block {
            for &b in block {
                out.insert(f.apply(a), f.apply(b));
            }
        }
    }
    Ok(out)
}

/// Regular image of `s` along `f`: the equivalence closure of the raw image.
pub fn direct_image(f: &QuotientMap, s: &Partition) -> Result<Partition> {
    check_sizes(f.source().size(), s.size())?;
    let mut uf = UnionFind::new(f.target().size());
    for block in s.blocks() {
        for &a in &block[1..] {
            uf.union(f.apply(block[0]), f.apply(a));
        }
    }
    Ok(uf.into_partition())
}

/// `f⁻¹(s) = {(a, b) : (f a, f b) ∈ s}`.
pub fn inverse_image<M: Morphism + ?Sized>(f: &M, s: &Partition) -> Result<Partition> {
    check_sizes(f.target().size(), s.size())?;
    let labels: Vec<usize> = f.map().iter().map(|&b| s.labels()[b]).collect();
    Ok(Partition::from_labels(&labels))
}
