//! Built-in algebras and subvariety specs.
//!
//! Entries are addressed by name, with parameters either in parentheses
//! (`cyclic_group(4)`) or after a colon (`cyclic_group:4`).

use std::fmt;

use crate::algebras::{product, FiniteAlgebra};
use crate::closure::SubvarietySpec;
use crate::distributivity::is_distributive;
use crate::permutability::{
    find_hm_terms, find_maltsev_term, is_hm_pair, is_maltsev_table, permutability_level, CloneOptions,
    PermutabilityLevel, SearchOutcome,
};
use crate::relations::con_lattice;
use crate::terms::{for_each_assignment, parse_identities, parse_term, satisfies_all, Compiled, Signature, Term};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Group,
    BooleanRing,
    VnrRing,
    Heyting,
    Implication,
    Lattice,
}

impl Family {
    pub fn signature(self) -> Signature {
        let ops: &[(&str, usize)] = match self {
            Family::Group => &[("m", 2), ("i", 1), ("e", 0)],
            Family::BooleanRing | Family::VnrRing => {
                &[("add", 2), ("neg", 1), ("zero", 0), ("mul", 2), ("one", 0), ("star", 1)]
            }
            Family::Heyting => &[("meet", 2), ("join", 2), ("imp", 2), ("bot", 0), ("top", 0)],
            Family::Implication => &[("imp", 2)],
            Family::Lattice => &[("meet", 2), ("join", 2)],
        };
        Signature::new(ops.iter().copied()).expect("fixed signatures are valid")
    }

    /// The defining identities the family's tables are checked against.
    pub fn identities(self) -> &'static str {
        match self {
            Family::Group => GROUP_IDS,
            Family::BooleanRing => BOOLEAN_RING_IDS,
            Family::VnrRing => VNR_RING_IDS,
            Family::Heyting => HEYTING_IDS,
            Family::Implication => IMPLICATION_IDS,
            Family::Lattice => LATTICE_IDS,
        }
    }

    fn maltsev_term(self) -> Option<&'static str> {
        match self {
            Family::Group => Some("m(m(x,i(y)),z)"),
            Family::BooleanRing | Family::VnrRing => Some("add(add(x,neg(y)),z)"),
            Family::Heyting => Some("meet(imp(imp(x,y),z),imp(imp(z,y),x))"),
            Family::Implication | Family::Lattice => None,
        }
    }

    fn hm_terms(self) -> Option<(&'static str, &'static str)> {
        match self {
            Family::Implication => Some(("imp(imp(z,y),x)", "imp(imp(x,y),z)")),
            _ => None,
        }
    }
}

const GROUP_IDS: &str = "\
m(m(x,y),z) = m(x,m(y,z))
m(x,e) = x
m(e,x) = x
m(x,i(x)) = e
m(i(x),x) = e
";

const RING_IDS: &str = "\
add(add(x,y),z) = add(x,add(y,z))
add(x,y) = add(y,x)
add(x,zero) = x
add(x,neg(x)) = zero
mul(mul(x,y),z) = mul(x,mul(y,z))
mul(x,y) = mul(y,x)
mul(x,one) = x
mul(x,add(y,z)) = add(mul(x,y),mul(x,z))
mul(x,mul(star(x),star(x))) = star(x)
mul(mul(x,x),star(x)) = x
";

const VNR_RING_IDS: &str = RING_IDS;

const BOOLEAN_RING_IDS: &str = concat!(
    "add(add(x,y),z) = add(x,add(y,z))\n",
    "add(x,y) = add(y,x)\n",
    "add(x,zero) = x\n",
    "add(x,neg(x)) = zero\n",
    "mul(mul(x,y),z) = mul(x,mul(y,z))\n",
    "mul(x,y) = mul(y,x)\n",
    "mul(x,one) = x\n",
    "mul(x,add(y,z)) = add(mul(x,y),mul(x,z))\n",
    "mul(x,mul(star(x),star(x))) = star(x)\n",
    "mul(mul(x,x),star(x)) = x\n",
    "mul(x,x) = x\n",
    "star(x) = x\n",
);

const LATTICE_IDS: &str = "\
meet(meet(x,y),z) = meet(x,meet(y,z))
join(join(x,y),z) = join(x,join(y,z))
meet(x,y) = meet(y,x)
join(x,y) = join(y,x)
meet(x,join(x,y)) = x
join(x,meet(x,y)) = x
";

const HEYTING_IDS: &str = "\
meet(meet(x,y),z) = meet(x,meet(y,z))
join(join(x,y),z) = join(x,join(y,z))
meet(x,y) = meet(y,x)
join(x,y) = join(y,x)
meet(x,join(x,y)) = x
join(x,meet(x,y)) = x
meet(x,join(y,z)) = join(meet(x,y),meet(x,z))
meet(x,bot) = bot
join(x,top) = top
join(a,meet(imp(b,a),b)) = a
a = meet(a,imp(b,meet(a,b)))
imp(x,x) = top
meet(x,imp(x,y)) = meet(x,y)
meet(y,imp(x,y)) = y
imp(x,meet(y,z)) = meet(imp(x,y),imp(x,z))
";

const IMPLICATION_IDS: &str = "\
imp(imp(x,y),y) = imp(imp(y,x),x)
imp(imp(x,y),x) = x
imp(x,imp(y,z)) = imp(y,imp(x,z))
";

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Group => "group",
            Family::BooleanRing => "boolean-ring",
            Family::VnrRing => "vnr-ring",
            Family::Heyting => "heyting",
            Family::Implication => "implication",
            Family::Lattice => "lattice",
        })
    }
}

/// Expected permutability of the variety an entry is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PermTag {
    Maltsev,
    GoursatOnly,
    Neither,
}

impl fmt::Display for PermTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PermTag::Maltsev => "maltsev",
            PermTag::GoursatOnly => "goursat-only",
            PermTag::Neither => "neither",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tags {
    pub permutability: PermTag,
    pub distributive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: String,
    pub params: Vec<usize>,
    pub family: Family,
    pub algebra: FiniteAlgebra,
    pub tags: Tags,
}

/// Outcome of the structural checks behind an entry's tags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagCheck {
    pub problems: Vec<String>,
    pub notes: Vec<String>,
}

impl TagCheck {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }
}

fn table3(alg: &FiniteAlgebra, term: &str) -> Result<Vec<usize>> {
    let t = parse_term(term, alg.signature())?;
    let vars = ["x", "y", "z"].map(String::from);
    let c = Compiled::new(&t, alg.signature(), &vars)?;
    let mut out = Vec::with_capacity(alg.size().pow(3));
    for_each_assignment(alg.size(), 3, |env| {
        out.push(c.eval(alg, env));
        true
    });
    Ok(out)
}

impl CorpusEntry {
    pub fn is_group(&self) -> bool {
        self.family == Family::Group
    }

    pub fn is_implication(&self) -> bool {
        self.family == Family::Implication
    }

    /// Corpus specs whose symbols the entry's signature provides.
    pub fn applicable_specs(&self) -> Vec<SubvarietySpec> {
        corpus_specs()
            .into_iter()
            .filter(|v| v.is_applicable(&self.algebra))
            .collect()
    }

    /// Runs the structural checks behind the tags: family identities,
    /// term conditions and Con distributivity.
    pub fn verify_tags(&self, options: CloneOptions) -> Result<TagCheck> {
        let alg = &self.algebra;
        let n = alg.size();
        let mut problems = Vec::new();
        let mut notes = Vec::new();

        let ids = parse_identities(self.family.identities(), alg.signature())?;
        if !satisfies_all(alg, &ids)? {
            problems.push("family identities fail".to_string());
        }

        let con = con_lattice(alg, None)?;
        if is_distributive(&con).holds() != self.tags.distributive {
            problems.push(format!("expected distributive = {}", self.tags.distributive));
        }

        let mut non_two = false;
        let mut non_three = false;
        for r in con.congruences() {
            for s in con.congruences() {
                match permutability_level(alg, r, s)? {
                    PermutabilityLevel::Two => {}
                    PermutabilityLevel::Three => non_two = true,
                    PermutabilityLevel::Neither => non_three = true,
                }
            }
        }

        match self.tags.permutability {
            PermTag::Maltsev => {
                let known = match self.family.maltsev_term() {
                    Some(t) => is_maltsev_table(n, &table3(alg, t)?),
                    None => false,
                };
                if !known && find_maltsev_term(alg, options)?.found().is_none() {
                    problems.push("no Mal'tsev term".to_string());
                }
                if non_two || non_three {
                    problems.push("a congruence pair fails to 2-permute".to_string());
                }
            }
            PermTag::GoursatOnly => {
                let known = match self.family.hm_terms() {
                    Some((p, q)) => is_hm_pair(n, &table3(alg, p)?, &table3(alg, q)?),
                    None => false,
                };
                if !known && find_hm_terms(alg, options)?.found().is_none() {
                    problems.push("no Hagemann-Mitschke terms".to_string());
                }
                if non_three {
                    problems.push("a congruence pair fails to 3-permute".to_string());
                }
                if !non_two {
                    notes.push("vacuous: every congruence pair of this member 2-permutes".to_string());
                }
            }
            PermTag::Neither => {
                if let SearchOutcome::Found(_) = find_hm_terms(alg, options)? {
                    problems.push("unexpected Hagemann-Mitschke terms".to_string());
                }
            }
        }
        Ok(TagCheck { problems, notes })
    }
}

fn group_from_fn(name: String, n: usize, mul: impl Fn(usize, usize) -> usize, inv: impl Fn(usize) -> usize) -> Result<FiniteAlgebra> {
    FiniteAlgebra::from_fn(name, Family::Group.signature(), n, |op, a| match op {
        0 => mul(a[0], a[1]),
        1 => inv(a[0]),
        _ => 0,
    })
}

pub fn cyclic_group(n: usize) -> Result<FiniteAlgebra> {
    if n == 0 {
        return Err(Error::InvalidParameters("cyclic_group needs n ≥ 1".into()));
    }
    group_from_fn(format!("cyclic_group({n})"), n, |a, b| (a + b) % n, |a| (n - a) % n)
}

pub fn klein4() -> Result<FiniteAlgebra> {
    let z2 = cyclic_group(2)?;
    Ok(product(&Family::Group.signature(), &[z2.clone(), z2])?.with_name("klein4"))
}

/// Permutations of {0,1,2} in lexicographic order; `m(a,b)` is `a ∘ b`.
pub fn sym3() -> Result<FiniteAlgebra> {
    let perms: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
    group_from_fn(
        "sym3".into(),
        6,
        |a, b| index([0, 1, 2].map(|k| perms[a][perms[b][k]])),
        |a| {
            let mut inv = [0; 3];
            for k in 0..3 {
                inv[perms[a][k]] = k;
            }
            index(inv)
        },
    )
}

pub fn singleton() -> Result<FiniteAlgebra> {
    group_from_fn("singleton".into(), 1, |_, _| 0, |_| 0)
}

/// `Z2^k` as a Boolean ring on bitmasks, with `a* = a`.
pub fn boolean_ring(k: usize) -> Result<FiniteAlgebra> {
    if k > 6 {
        return Err(Error::InvalidParameters("boolean_ring needs k ≤ 6".into()));
    }
    let n = 1usize << k;
    FiniteAlgebra::from_fn(format!("boolean_ring({k})"), Family::BooleanRing.signature(), n, |op, a| match op {
        0 => a[0] ^ a[1],
        1 | 5 => a[0],
        2 => 0,
        3 => a[0] & a[1],
        _ => n - 1,
    })
}

fn is_squarefree(n: usize) -> bool {
    (2..=n).take_while(|p| p * p <= n).all(|p| !n.is_multiple_of(p * p))
}

/// `Z_n` for squarefree `n`, with the unique pseudo-inverse as star.
pub fn zmod_vnr(n: usize) -> Result<FiniteAlgebra> {
    if n == 0 || !is_squarefree(n) {
        return Err(Error::InvalidParameters(format!("zmod_vnr needs squarefree n ≥ 1, got {n}")));
    }
    let mut star = Vec::with_capacity(n);
    for a in 0..n {
        let candidates: Vec<usize> = (0..n)
            .filter(|&b| a * b % n * b % n == b && a * a % n * b % n == a)
            .collect();
        match candidates.as_slice() {
            [b] => star.push(*b),
            _ => {
                return Err(Error::InvalidAlgebra(format!(
                    "zmod_vnr({n}): {} pseudo-inverses of {a}",
                    candidates.len()
                )))
            }
        }
    }
    FiniteAlgebra::from_fn(format!("zmod_vnr({n})"), Family::VnrRing.signature(), n, |op, a| match op {
        0 => (a[0] + a[1]) % n,
        1 => (n - a[0]) % n,
        2 => 0,
        3 => a[0] * a[1] % n,
        4 => 1 % n,
        _ => star[a[0]],
    })
}

/// The `k`-element chain `0 < … < k-1` as a Heyting algebra.
pub fn heyting_chain(k: usize) -> Result<FiniteAlgebra> {
    if k == 0 {
        return Err(Error::InvalidParameters("heyting_chain needs k ≥ 1".into()));
    }
    FiniteAlgebra::from_fn(format!("heyting_chain({k})"), Family::Heyting.signature(), k, |op, a| match op {
        0 => a[0].min(a[1]),
        1 => a[0].max(a[1]),
        2 => {
            if a[0] <= a[1] {
                k - 1
            } else {
                a[1]
            }
        }
        3 => 0,
        _ => k - 1,
    })
}

/// The implication reduct `x ▷ y = ¬x ∨ y` of the Boolean algebra on `2^k`
/// bitmasks.
pub fn implication_from_boolean(k: usize) -> Result<FiniteAlgebra> {
    if k > 6 {
        return Err(Error::InvalidParameters("implication_from_boolean needs k ≤ 6".into()));
    }
    let n = 1usize << k;
    FiniteAlgebra::from_fn(format!("implication_from_boolean({k})"), Family::Implication.signature(), n, |_, a| {
        (!a[0] | a[1]) & (n - 1)
    })
}

/// The implication algebra on `{a, b, 1}` (elements 0, 1, 2) with `a`, `b`
/// incomparable below `1`.
pub fn implication_fork() -> Result<FiniteAlgebra> {
    let leq = |x: usize, y: usize| x == y || y == 2;
    FiniteAlgebra::from_fn("implication_fork", Family::Implication.signature(), 3, |_, a| {
        if leq(a[0], a[1]) {
            2
        } else {
            a[1]
        }
    })
}

pub fn chain_lattice(k: usize) -> Result<FiniteAlgebra> {
    if k == 0 {
        return Err(Error::InvalidParameters("chain_lattice needs k ≥ 1".into()));
    }
    FiniteAlgebra::from_fn(format!("chain_lattice({k})"), Family::Lattice.signature(), k, |op, a| {
        if op == 0 {
            a[0].min(a[1])
        } else {
            a[0].max(a[1])
        }
    })
}

pub fn two_elt_lattice() -> Result<FiniteAlgebra> {
    Ok(chain_lattice(2)?.with_name("two_elt_lattice"))
}

/// Splits `name(1,2)` or `name:1,2` into the name and its parameters.
pub fn parse_name(text: &str) -> Result<(String, Vec<usize>)> {
    let text = text.trim();
    let bad = || Error::UnknownCorpusEntry(text.to_string());
    let (name, args) = if let Some(open) = text.find('(') {
        let inner = text[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        (&text[..open], inner)
    } else if let Some((name, args)) = text.split_once(':') {
        (name, args)
    } else {
        (text, "")
    };
    let params = args
        .split(',')
        .map(str::trim)
        .filter(|a| !a.is_empty())
        .map(|a| a.parse::<usize>().map_err(|_| bad()))
        .collect::<Result<Vec<_>>>()?;
    Ok((name.trim().to_string(), params))
}

fn canonical_name(name: &str, params: &[usize]) -> String {
    if params.is_empty() {
        name.to_string()
    } else {
        let ps: Vec<String> = params.iter().map(|p| p.to_string()).collect();
        format!("{name}({})", ps.join(","))
    }
}

/// Builds a corpus entry by name and parameters.
pub fn builtin(name: &str, params: &[usize]) -> Result<CorpusEntry> {
    let one = || -> Result<usize> {
        match params {
            [k] => Ok(*k),
            _ => Err(Error::InvalidParameters(format!("{name} takes one parameter"))),
        }
    };
    let none = || -> Result<()> {
        if params.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameters(format!("{name} takes no parameters")))
        }
    };
    let tags = |permutability, distributive| Tags {
        permutability,
        distributive,
    };
    let (family, algebra, tags) = match name {
        "cyclic_group" => (Family::Group, cyclic_group(one()?)?, tags(PermTag::Maltsev, true)),
        "klein4" => (none().map(|_| Family::Group)?, klein4()?, tags(PermTag::Maltsev, false)),
        "sym3" => (none().map(|_| Family::Group)?, sym3()?, tags(PermTag::Maltsev, true)),
        "singleton" => (none().map(|_| Family::Group)?, singleton()?, tags(PermTag::Maltsev, true)),
        "boolean_ring" => (Family::BooleanRing, boolean_ring(one()?)?, tags(PermTag::Maltsev, true)),
        "zmod_vnr" => (Family::VnrRing, zmod_vnr(one()?)?, tags(PermTag::Maltsev, true)),
        "heyting_chain" => (Family::Heyting, heyting_chain(one()?)?, tags(PermTag::Maltsev, true)),
        "implication_from_boolean" => (
            Family::Implication,
            implication_from_boolean(one()?)?,
            tags(PermTag::GoursatOnly, true),
        ),
        "implication_fork" => (
            none().map(|_| Family::Implication)?,
            implication_fork()?,
            tags(PermTag::GoursatOnly, true),
        ),
        "two_elt_lattice" => (none().map(|_| Family::Lattice)?, two_elt_lattice()?, tags(PermTag::Neither, true)),
        "chain_lattice" => (Family::Lattice, chain_lattice(one()?)?, tags(PermTag::Neither, true)),
        _ => return Err(Error::UnknownCorpusEntry(name.to_string())),
    };
    let ids = parse_identities(family.identities(), algebra.signature())?;
    if !satisfies_all(&algebra, &ids)? {
        return Err(Error::InvalidAlgebra(format!("{} fails its family identities", algebra.name())));
    }
    Ok(CorpusEntry {
        name: canonical_name(name, params),
        params: params.to_vec(),
        family,
        algebra,
        tags,
    })
}

/// Looks up an entry by `name(params)` or `name:params`.
pub fn lookup(text: &str) -> Result<CorpusEntry> {
    let (name, params) = parse_name(text)?;
    builtin(&name, &params)
}

/// Names of the default corpus, in listing order.
pub const DEFAULT_CORPUS: &[&str] = &[
    "singleton",
    "cyclic_group(2)",
    "cyclic_group(3)",
    "cyclic_group(4)",
    "cyclic_group(8)",
    "klein4",
    "sym3",
    "boolean_ring(1)",
    "boolean_ring(2)",
    "boolean_ring(3)",
    "zmod_vnr(6)",
    "heyting_chain(2)",
    "heyting_chain(3)",
    "heyting_chain(4)",
    "implication_from_boolean(1)",
    "implication_from_boolean(2)",
    "implication_from_boolean(3)",
    "implication_fork",
    "two_elt_lattice",
    "chain_lattice(3)",
];

pub fn corpus() -> Vec<CorpusEntry> {
    DEFAULT_CORPUS
        .iter()
        .map(|n| lookup(n).expect("default corpus entries build"))
        .collect()
}

const SPEC_SOURCES: &[(&str, Option<Family>, &str)] = &[
    ("trivial", None, "x = y\n"),
    ("all", None, ""),
    ("abelian-group", Some(Family::Group), "m(x,y) = m(y,x)\n"),
    ("exponent-2", Some(Family::Group), "m(x,x) = e\n"),
    ("boolean-from-heyting", Some(Family::Heyting), "imp(imp(x,bot),bot) = x\n"),
    ("idempotent-ring", Some(Family::VnrRing), "mul(x,x) = x\n"),
];

/// The named corpus specs, in listing order.
pub fn corpus_specs() -> Vec<SubvarietySpec> {
    SPEC_SOURCES
        .iter()
        .map(|&(name, family, text)| {
            let sig = family.map(Family::signature).unwrap_or_default();
            SubvarietySpec::parse(name, text, &sig).expect("corpus specs parse")
        })
        .collect()
}

pub fn spec(name: &str) -> Result<SubvarietySpec> {
    corpus_specs()
        .into_iter()
        .find(|v| v.name == name)
        .ok_or_else(|| Error::UnknownCorpusEntry(name.to_string()))
}

/// `.ids` text of a named spec.
pub fn spec_source(name: &str) -> Option<&'static str> {
    SPEC_SOURCES.iter().find(|s| s.0 == name).map(|s| s.2)
}

#[doc(hidden)]
pub fn known_maltsev_term(family: Family) -> Option<Term> {
    family
        .maltsev_term()
        .map(|t| parse_term(t, &family.signature()).expect("fixed terms parse"))
}
