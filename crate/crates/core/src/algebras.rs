//! Finite algebras as operation tables, and the maps between them.
//!
//! The carrier of an algebra of size `n` is `0..n`. A symbol of arity `k` is
//! stored as a table of `n^k` entries in row-major order: the entry for
//! `f(a_1,...,a_k)` sits at index `a_1*n^(k-1) + ... + a_k`, so the last
//! argument varies fastest.
//!
//! Products encode tuples in mixed radix with the leftmost factor most
//! significant. Surjective homomorphisms are represented canonically as
//! [`QuotientMap`]s, whose targets index blocks by ascending block minimum.

use std::fmt::Write as _;

use crate::relations::{self, Partition};
use crate::terms::Signature;
use crate::{Error, Result, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    name: String,
    sig: Signature,
    size: usize,
    tables: Vec<Vec<usize>>,
}

fn table_len(n: usize, arity: usize) -> Option<usize> {
    n.checked_pow(arity as u32)
}

impl FiniteAlgebra {
    pub fn new(
        name: impl Into<String>,
        sig: Signature,
        size: usize,
        tables: Vec<Vec<usize>>,
    ) -> Result<FiniteAlgebra> {
        let name = name.into();
        if size == 0 {
            return Err(Error::InvalidAlgebra(format!("`{name}` has an empty carrier")));
        }
        if tables.len() != sig.len() {
            return Err(Error::InvalidAlgebra(format!(
                "`{name}` declares {} symbol(s) but has {} table(s)",
                sig.len(),
                tables.len()
            )));
        }
        for (idx, table) in tables.iter().enumerate() {
            let (sym, arity) = sig.symbol(idx);
            let expected = table_len(size, arity).ok_or_else(|| {
                Error::InvalidAlgebra(format!("table for `{sym}` is too large"))
            })?;
            if table.len() != expected {
                return Err(Error::InvalidAlgebra(format!(
                    "table for `{sym}` has {} entries, expected {expected}",
                    table.len()
                )));
            }
            if let Some(bad) = table.iter().find(|&&v| v >= size) {
                return Err(Error::InvalidAlgebra(format!(
                    "table for `{sym}` contains {bad}, outside 0..{size}"
                )));
            }
        }
        Ok(FiniteAlgebra {
            name,
            sig,
            size,
            tables,
        })
    }

    /// Builds every table by evaluating `f(symbol index, arguments)`.
    pub fn from_fn(
        name: impl Into<String>,
        sig: Signature,
        size: usize,
        mut f: impl FnMut(usize, &[usize]) -> usize,
    ) -> Result<FiniteAlgebra> {
        let mut tables = Vec::with_capacity(sig.len());
        for idx in 0..sig.len() {
            let (_, arity) = sig.symbol(idx);
            let mut table = Vec::new();
            crate::terms::for_each_assignment(size, arity, |args| {
                table.push(f(idx, args));
                true
            });
            tables.push(table);
        }
        FiniteAlgebra::new(name, sig, size, tables)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> FiniteAlgebra {
        self.name = name.into();
        self
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn table(&self, op: usize) -> &[usize] {
        &self.tables[op]
    }

    pub fn tables(&self) -> &[Vec<usize>] {
        &self.tables
    }

    pub fn arity(&self, op: usize) -> usize {
        self.sig.symbol(op).1
    }

    pub fn tuple_index(&self, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.size + a)
    }

    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        debug_assert_eq!(args.len(), self.arity(op));
        self.tables[op][self.tuple_index(args)]
    }

    pub fn apply_by_name(&self, symbol: &str, args: &[usize]) -> Result<usize> {
        let op = self.sig.index_of(symbol).ok_or_else(|| {
            Error::SignatureMismatch(format!("`{symbol}` is not a symbol of `{}`", self.name))
        })?;
        if self.arity(op) != args.len() {
            return Err(Error::Arity {
                symbol: symbol.into(),
                expected: self.arity(op),
                found: args.len(),
            });
        }
        for &a in args {
            self.check_element(a)?;
        }
        Ok(self.apply(op, args))
    }

    pub fn check_element(&self, a: usize) -> Result<()> {
        if a < self.size {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange {
                element: a,
                size: self.size,
            })
        }
    }

    /// Structural equality ignoring names.
    pub fn same_structure(&self, other: &FiniteAlgebra) -> bool {
        self.size == other.size && self.sig == other.sig && self.tables == other.tables
    }

    pub(crate) fn require_same_signature(&self, other: &FiniteAlgebra) -> Result<()> {
        if self.sig == other.sig {
            Ok(())
        } else {
            Err(Error::SignatureMismatch(format!(
                "`{}` has signature {}, `{}` has {}",
                self.name, self.sig, other.name, other.sig
            )))
        }
    }
}

/// Maps between finite algebras, given by their element functions.
pub trait Morphism {
    fn source(&self) -> &FiniteAlgebra;
    fn target(&self) -> &FiniteAlgebra;
    fn map(&self) -> &[usize];

    fn apply(&self, a: usize) -> usize {
        self.map()[a]
    }
}

/// Whether `map` commutes with every operation of `source` and `target`.
/// Returns the first (symbol, argument tuple) that fails.
pub fn homomorphism_violation(
    source: &FiniteAlgebra,
    target: &FiniteAlgebra,
    map: &[usize],
) -> Option<(String, Vec<usize>)> {
    let mut bad = None;
    for op in 0..source.sig.len() {
        let arity = source.arity(op);
        let mut mapped = vec![0; arity];
        crate::terms::for_each_assignment(source.size, arity, |args| {
            for (m, &a) in mapped.iter_mut().zip(args) {
                *m = map[a];
            }
            if map[source.apply(op, args)] != target.apply(op, &mapped) {
                bad = Some((source.sig.symbol(op).0.to_string(), args.to_vec()));
                false
            } else {
                true
            }
        });
        if bad.is_some() {
            break;
        }
    }
    bad
}

/// An arbitrary homomorphism, checked at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homomorphism {
    source: FiniteAlgebra,
    target: FiniteAlgebra,
    map: Vec<usize>,
}

impl Homomorphism {
    pub fn new(source: FiniteAlgebra, target: FiniteAlgebra, map: Vec<usize>) -> Result<Self> {
        source.require_same_signature(&target)?;
        if map.len() != source.size {
            return Err(Error::SizeMismatch {
                expected: source.size,
                found: map.len(),
            });
        }
        for &b in &map {
            target.check_element(b)?;
        }
        if let Some((sym, args)) = homomorphism_violation(&source, &target, &map) {
            return Err(Error::InvalidAlgebra(format!(
                "map does not commute with `{sym}` at {args:?}"
            )));
        }
        Ok(Homomorphism {
            source,
            target,
            map,
        })
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.size];
        self.map.iter().for_each(|&b| hit[b] = true);
        hit.into_iter().all(|h| h)
    }
}

impl Morphism for Homomorphism {
    fn source(&self) -> &FiniteAlgebra {
        &self.source
    }
    fn target(&self) -> &FiniteAlgebra {
        &self.target
    }
    fn map(&self) -> &[usize] {
        &self.map
    }
}

/// The canonical surjection `X → X/θ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientMap {
    source: FiniteAlgebra,
    kernel: Partition,
    target: FiniteAlgebra,
    map: Vec<usize>,
}

impl QuotientMap {
    pub fn kernel(&self) -> &Partition {
        &self.kernel
    }

    pub fn is_bijective(&self) -> bool {
        self.target.size == self.source.size
    }

    /// For `self = q1: X → X/θ1` and `other = q2: X → X/θ2` with θ1 ⊆ θ2,
    /// the induced quotient `X/θ1 → X/θ2`.
    pub fn factor_through(&self, other: &QuotientMap) -> Result<QuotientMap> {
        if !self.source.same_structure(&other.source) {
            return Err(Error::SignatureMismatch(
                "quotient maps have different sources".into(),
            ));
        }
        if !self.kernel.is_finer_than(&other.kernel) {
            return Err(Error::InvalidPartition(format!(
                "kernel {} is not contained in {}",
                self.kernel, other.kernel
            )));
        }
        let induced = relations::direct_image(self, &other.kernel)?;
        quotient(&self.target, &induced)
    }
}

impl Morphism for QuotientMap {
    fn source(&self) -> &FiniteAlgebra {
        &self.source
    }
    fn target(&self) -> &FiniteAlgebra {
        &self.target
    }
    fn map(&self) -> &[usize] {
        &self.map
    }
}

/// Mixed-radix encoding of tuples, leftmost coordinate most significant.
pub fn encode_tuple(sizes: &[usize], coords: &[usize]) -> usize {
    sizes.iter().zip(coords).fold(0, |acc, (&n, &c)| acc * n + c)
}

pub fn decode_tuple(sizes: &[usize], mut code: usize) -> Vec<usize> {
    let mut coords = vec![0; sizes.len()];
    for (c, &n) in coords.iter_mut().zip(sizes).rev() {
        *c = code % n;
        code /= n;
    }
    coords
}

/// Direct product with componentwise operations. The empty product is the
/// one-element algebra over `sig`.
pub fn product(sig: &Signature, factors: &[FiniteAlgebra]) -> Result<FiniteAlgebra> {
    for f in factors {
        if f.signature() != sig {
            return Err(Error::SignatureMismatch(format!(
                "factor `{}` has signature {}, expected {sig}",
                f.name,
                f.signature()
            )));
        }
    }
    let sizes: Vec<usize> = factors.iter().map(|f| f.size).collect();
    let size = sizes
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .ok_or_else(|| Error::InvalidAlgebra("product carrier too large".into()))?;
    let name = if factors.is_empty() {
        "1".to_string()
    } else {
        factors.iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join("x")
    };
    let decoded: Vec<Vec<usize>> = (0..size).map(|c| decode_tuple(&sizes, c)).collect();
    FiniteAlgebra::from_fn(name, sig.clone(), size, |op, args| {
        let coords: Vec<usize> = factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let comp: Vec<usize> = args.iter().map(|&a| decoded[a][i]).collect();
                f.apply(op, &comp)
            })
            .collect();
        encode_tuple(&sizes, &coords)
    })
}

/// The `i`-th projection out of `product(sig, factors)`.
pub fn projection(product_alg: &FiniteAlgebra, factors: &[FiniteAlgebra], i: usize) -> Result<Homomorphism> {
    let sizes: Vec<usize> = factors.iter().map(|f| f.size).collect();
    if sizes.iter().product::<usize>() != product_alg.size || i >= factors.len() {
        return Err(Error::SizeMismatch {
            expected: sizes.iter().product(),
            found: product_alg.size,
        });
    }
    let map = (0..product_alg.size)
        .map(|c| decode_tuple(&sizes, c)[i])
        .collect();
    Homomorphism::new(product_alg.clone(), factors[i].clone(), map)
}

pub fn quotient(alg: &FiniteAlgebra, theta: &Partition) -> Result<QuotientMap> {
    if let Verdict::Fails(v) = relations::is_congruence(alg, theta)? {
        return Err(Error::NotCongruence(v));
    }
    let labels = theta.labels().to_vec();
    let reps: Vec<usize> = theta.blocks().iter().map(|b| b[0]).collect();
    let target = FiniteAlgebra::from_fn(
        format!("{}/{}", alg.name, theta),
        alg.sig.clone(),
        reps.len(),
        |op, args| {
            let lifted: Vec<usize> = args.iter().map(|&b| reps[b]).collect();
            labels[alg.apply(op, &lifted)]
        },
    )?;
    Ok(QuotientMap {
        source: alg.clone(),
        kernel: theta.clone(),
        target,
        map: labels,
    })
}

/// The partition of the source into preimage classes of `f`.
pub fn kernel_pair<M: Morphism + ?Sized>(f: &M) -> Partition {
    Partition::from_labels(f.map())
}

/// Least subset containing `seed` and the constants, closed under all
/// operations. Returned in ascending order.
pub fn generate_subuniverse(alg: &FiniteAlgebra, seed: &[usize]) -> Result<Vec<usize>> {
    let n = alg.size;
    let mut member = vec![false; n];
    let mut elems = Vec::new();
    for &a in seed {
        alg.check_element(a)?;
        if !member[a] {
            member[a] = true;
            elems.push(a);
        }
    }
    loop {
        let before = elems.len();
        for op in 0..alg.sig.len() {
            let arity = alg.arity(op);
            // Enumerate tuples over the current member list by index.
            let current = elems.clone();
            if arity > 0 && current.is_empty() {
                continue;
            }
            let mut args = vec![0; arity];
            crate::terms::for_each_assignment(current.len().max(1), arity, |idx| {
                for (a, &i) in args.iter_mut().zip(idx) {
                    *a = current[i];
                }
                let v = alg.apply(op, &args);
                if !member[v] {
                    member[v] = true;
                    elems.push(v);
                }
                true
            });
        }
        if elems.len() == before {
            break;
        }
    }
    elems.sort_unstable();
    Ok(elems)
}

/// The inclusion of the subalgebra on `universe` (which must be a nonempty
/// subuniverse) into `alg`. Subalgebra elements are renumbered in ascending
/// order.
pub fn subalgebra(alg: &FiniteAlgebra, universe: &[usize]) -> Result<Homomorphism> {
    let mut elems = universe.to_vec();
    elems.sort_unstable();
    elems.dedup();
    if elems.is_empty() {
        return Err(Error::InvalidAlgebra("empty subuniverse".into()));
    }
    let mut index = vec![usize::MAX; alg.size];
    for (i, &a) in elems.iter().enumerate() {
        alg.check_element(a)?;
        index[a] = i;
    }
    let mut closed = true;
    let sub = FiniteAlgebra::from_fn(
        format!("{}[{}]", alg.name, elems.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")),
        alg.sig.clone(),
        elems.len(),
        |op, args| {
            let lifted: Vec<usize> = args.iter().map(|&i| elems[i]).collect();
            let v = index[alg.apply(op, &lifted)];
            if v == usize::MAX {
                closed = false;
                0
            } else {
                v
            }
        },
    )?;
    if !closed {
        return Err(Error::InvalidAlgebra(
            "subset is not closed under the operations".into(),
        ));
    }
    Homomorphism::new(sub, alg.clone(), elems)
}

/// All nonempty subuniverses of `alg`, found by closing every subset of the
/// carrier. Sorted by (size, elements).
pub fn subuniverses(alg: &FiniteAlgebra) -> Result<Vec<Vec<usize>>> {
    let n = alg.size;
    if n > 16 {
        return Err(Error::BoundExceeded { size: n, bound: 16 });
    }
    let mut found = std::collections::BTreeSet::new();
    for mask in 1u32..(1u32 << n) {
        let seed: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        found.insert(generate_subuniverse(alg, &seed)?);
    }
    let mut out: Vec<Vec<usize>> = found.into_iter().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// Reads an algebra in the `.alg` text format:
///
/// ```text
/// algebra NAME
/// size N
/// op SYMBOL ARITY
/// <N^ARITY values, row-major, last argument fastest>
/// ```
///
/// Values may be spread over any number of lines. `#` starts a comment.
pub fn parse_algebra(text: &str) -> Result<FiniteAlgebra> {
    let mut toks = Tokens::new(text);
    toks.keyword("algebra")?;
    let (_, name) = toks.next("an algebra name")?;
    toks.keyword("size")?;
    let (size_line, size) = toks.number("the carrier size")?;
    if size == 0 {
        return Err(Error::Parse {
            line: size_line,
            msg: "carrier size must be at least 1".into(),
        });
    }

    let mut sig = Signature::default();
    let mut tables = Vec::new();
    while !toks.at_end() {
        toks.keyword("op")?;
        let (sym_line, sym) = toks.next("a symbol name")?;
        let (_, arity) = toks.number("an arity")?;
        sig.push(sym.clone(), arity).map_err(|e| e.at_line(sym_line))?;
        let len = table_len(size, arity).ok_or_else(|| Error::Parse {
            line: sym_line,
            msg: format!("table for `{sym}` is too large"),
        })?;
        let mut table = Vec::with_capacity(len);
        for _ in 0..len {
            let (line, v) = toks.number(&format!("a table entry for `{sym}`"))?;
            if v >= size {
                return Err(Error::Parse {
                    line,
                    msg: format!("value {v} outside 0..{size} in table for `{sym}`"),
                });
            }
            table.push(v);
        }
        tables.push(table);
    }
    FiniteAlgebra::new(name, sig, size, tables).map_err(|e| e.at_line(toks.line))
}

struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
    line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .flat_map(|(i, line)| {
                let content = line.split('#').next().unwrap_or("");
                content.split_whitespace().map(move |t| (i + 1, t))
            })
            .collect();
        Tokens {
            items,
            pos: 0,
            line: 1,
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.items.len()
    }

    fn next(&mut self, what: &str) -> Result<(usize, String)> {
        match self.items.get(self.pos) {
            Some(&(line, t)) => {
                self.pos += 1;
                self.line = line;
                Ok((line, t.to_string()))
            }
            None => Err(Error::Parse {
                line: self.line,
                msg: format!("unexpected end of file, expected {what}"),
            }),
        }
    }

    fn keyword(&mut self, want: &str) -> Result<()> {
        let (line, got) = self.next(&format!("`{want}`"))?;
        if got == want {
            Ok(())
        } else {
            Err(Error::Parse {
                line,
                msg: format!("expected `{want}`, found `{got}`"),
            })
        }
    }

    fn number(&mut self, what: &str) -> Result<(usize, usize)> {
        let (line, got) = self.next(what)?;
        got.parse().map(|v| (line, v)).map_err(|_| Error::Parse {
            line,
            msg: format!("expected {what}, found `{got}`"),
        })
    }
}

pub fn write_algebra(alg: &FiniteAlgebra) -> String {
    let mut out = String::new();
    let name: String = alg
        .name
        .chars()
        .map(|c| if c.is_whitespace() || c == '#' { '_' } else { c })
        .collect();
    let _ = writeln!(out, "algebra {name}");
    let _ = writeln!(out, "size {}", alg.size);
    for op in 0..alg.sig.len() {
        let (sym, arity) = alg.sig.symbol(op);
        let _ = writeln!(out, "op {sym} {arity}");
        let row = if arity == 0 { 1 } else { alg.size };
        for chunk in alg.tables[op].chunks(row) {
            let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
    }
    out
}
