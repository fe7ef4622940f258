//! Closure operators on congruences induced by equational subvarieties.
//!
//! For a subvariety `L` and an algebra `X`, the verbal congruence `Δ̄_X` is
//! the least congruence whose quotient lies in `L`; `X → X/Δ̄_X` is the
//! reflection of `X` into `L`. The closure of a congruence `S` on `X` is the
//! kernel of `X → X/S → λ(X/S)`, i.e. `q⁻¹(Δ̄_{X/S})` for `q: X → X/S`.
//! In a 3-permutable algebra the same closure is the raw composite
//! `Δ̄_X ∘ S ∘ Δ̄_X`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use crate::algebras::{
    product, projection, quotient, subalgebra, subuniverses, FiniteAlgebra,
    Homomorphism, Morphism, QuotientMap,
};
use crate::permutability::{permutability_level, PermutabilityLevel};
use crate::relations::{
    compose, compose_all, con_lattice, congruence_generated, direct_image, inverse_image,
    is_congruence, join, ConLattice, Partition, DEFAULT_MAX_SIZE,
};
use crate::terms::{for_each_assignment, parse_identities, satisfies_all, Compiled, Identity, Signature};
use crate::{Error, Result, Verdict};

/// A subvariety given by finitely many identities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubvarietySpec {
    pub name: String,
    pub sig: Signature,
    pub identities: Vec<Identity>,
}

impl SubvarietySpec {
    pub fn new(name: impl Into<String>, sig: Signature, identities: Vec<Identity>) -> Result<Self> {
        for id in &identities {
            id.check(&sig)?;
        }
        Ok(SubvarietySpec {
            name: name.into(),
            sig,
            identities,
        })
    }

    /// Parses `.ids` text against `sig`.
    pub fn parse(name: impl Into<String>, text: &str, sig: &Signature) -> Result<Self> {
        let ids = parse_identities(text, sig)?;
        SubvarietySpec::new(name, sig.clone(), ids)
    }

    /// Checks that every symbol the identities use exists in `alg` with the
    /// same arity, and that no variable is a symbol of `alg`.
    pub fn check_applicable(&self, alg: &FiniteAlgebra) -> Result<()> {
        for id in &self.identities {
            id.check(alg.signature()).map_err(|e| {
                Error::SignatureMismatch(format!(
                    "identity `{id}` of `{}` does not apply to `{}`: {e}",
                    self.name,
                    alg.name()
                ))
            })?;
        }
        Ok(())
    }

    pub fn is_applicable(&self, alg: &FiniteAlgebra) -> bool {
        self.check_applicable(alg).is_ok()
    }

    pub fn satisfied_by(&self, alg: &FiniteAlgebra) -> Result<bool> {
        self.check_applicable(alg)?;
        satisfies_all(alg, &self.identities)
    }
}

/// Pairs `(lhs(ā), rhs(ā))` over all identities and assignments, where the
/// two sides differ.
fn verbal_pairs(alg: &FiniteAlgebra, v: &SubvarietySpec) -> Result<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    for id in &v.identities {
        let lhs = Compiled::new(&id.lhs, alg.signature(), id.vars())?;
        let rhs = Compiled::new(&id.rhs, alg.signature(), id.vars())?;
        for_each_assignment(alg.size(), id.vars().len(), |env| {
            let (a, b) = (lhs.eval(alg, env), rhs.eval(alg, env));
            if a != b {
                pairs.push((a, b));
            }
            true
        });
    }
    Ok(pairs)
}

/// The least congruence `θ` with `alg/θ ⊨ v`.
///
/// Generates from all verbal pairs, then re-checks the quotient and re-seeds
/// with lifted violations until the quotient satisfies every identity.
pub fn birkhoff_congruence(alg: &FiniteAlgebra, v: &SubvarietySpec) -> Result<Partition> {
    v.check_applicable(alg)?;
    let mut theta = congruence_generated(alg, &verbal_pairs(alg, v)?)?;
    loop {
        let q = quotient(alg, &theta)?;
        let violations = verbal_pairs(q.target(), v)?;
        if violations.is_empty() {
            return Ok(theta);
        }
        let reps: Vec<usize> = theta.blocks().iter().map(|b| b[0]).collect();
        let lifted: Vec<(usize, usize)> = violations.iter().map(|&(a, b)| (reps[a], reps[b])).collect();
        theta = crate::relations::congruence_generated_from(alg, &theta, &lifted)?;
    }
}

/// The reflection `alg → alg/Δ̄` into the subvariety.
pub fn reflect(alg: &FiniteAlgebra, v: &SubvarietySpec) -> Result<QuotientMap> {
    quotient(alg, &birkhoff_congruence(alg, v)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureResult {
    pub input: Partition,
    pub closure: Partition,
    pub delta_bar: Partition,
    /// `X → X/closure`, the composite of `q` with the reflection of `X/S`.
    pub reflection: QuotientMap,
    pub closed: bool,
    pub dense: bool,
}

impl ClosureResult {
    fn new(input: Partition, closure: Partition, delta_bar: Partition, alg: &FiniteAlgebra) -> Result<Self> {
        let reflection = quotient(alg, &closure)?;
        Ok(ClosureResult {
            closed: input == closure,
            dense: closure.is_total(),
            input,
            closure,
            delta_bar,
            reflection,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct StructureKey {
    sig: Signature,
    size: usize,
    tables: Vec<Vec<usize>>,
}

impl StructureKey {
    fn of(alg: &FiniteAlgebra) -> Self {
        StructureKey {
            sig: alg.signature().clone(),
            size: alg.size(),
            tables: alg.tables().to_vec(),
        }
    }
}

/// The closure operator of one subvariety, with `Δ̄` cached per algebra
/// structure.
#[derive(Debug)]
pub struct ClosureOperator {
    spec: SubvarietySpec,
    cache: Mutex<HashMap<StructureKey, Partition>>,
}

fn require_congruence(alg: &FiniteAlgebra, s: &Partition) -> Result<()> {
    match is_congruence(alg, s)? {
        Verdict::Holds => Ok(()),
        Verdict::Fails(v) => Err(Error::NotCongruence(v)),
    }
}

impl ClosureOperator {
    pub fn new(spec: SubvarietySpec) -> Self {
        ClosureOperator {
            spec,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn spec(&self) -> &SubvarietySpec {
        &self.spec
    }

    pub fn delta_bar(&self, alg: &FiniteAlgebra) -> Result<Partition> {
        let key = StructureKey::of(alg);
        if let Some(p) = self.cache.lock().unwrap().get(&key) {
            return Ok(p.clone());
        }
        let p = birkhoff_congruence(alg, &self.spec)?;
        self.cache.lock().unwrap().insert(key, p.clone());
        Ok(p)
    }

    /// Whether `alg` lies in the subcategory defined by "Δ is closed".
    pub fn delta_closed(&self, alg: &FiniteAlgebra) -> Result<bool> {
        Ok(self.delta_bar(alg)?.is_discrete())
    }

    /// `q⁻¹(Δ̄_{X/S})` for `q: X → X/S`.
    pub fn closure(&self, alg: &FiniteAlgebra, s: &Partition) -> Result<Partition> {
        let q = quotient(alg, s)?;
        inverse_image(&q, &self.delta_bar(q.target())?)
    }

    pub fn effective(&self, alg: &FiniteAlgebra, s: &Partition) -> Result<ClosureResult> {
        self.spec.check_applicable(alg)?;
        require_congruence(alg, s)?;
        let closure = self.closure(alg, s)?;
        ClosureResult::new(s.clone(), closure, self.delta_bar(alg)?, alg)
    }

    /// `Δ̄ ∘ S ∘ Δ̄`, with no closure step, cross-checked against
    /// `S ∘ Δ̄ ∘ S`.
    pub fn goursat(&self, alg: &FiniteAlgebra, s: &Partition) -> Result<ClosureResult> {
        self.spec.check_applicable(alg)?;
        require_congruence(alg, s)?;
        let db = self.delta_bar(alg)?;
        let (d, sr) = (db.to_binrel(), s.to_binrel());
        let outer = compose_all(&[&d, &sr, &d])?;
        let inner = compose_all(&[&sr, &d, &sr])?;
        let violation = |detail: String| Error::GoursatViolation {
            algebra: alg.name().to_string(),
            detail,
        };
        let closure = outer.to_partition().ok_or_else(|| {
            violation(format!("Δ̄∘S∘Δ̄ is not an equivalence relation for S = {s}"))
        })?;
        if outer != inner {
            return Err(violation(format!("Δ̄∘S∘Δ̄ ≠ S∘Δ̄∘S for S = {s}")));
        }
        ClosureResult::new(s.clone(), closure, db, alg)
    }

    pub fn reflect(&self, alg: &FiniteAlgebra) -> Result<QuotientMap> {
        quotient(alg, &self.delta_bar(alg)?)
    }
}

pub fn closure_effective(alg: &FiniteAlgebra, s: &Partition, v: &SubvarietySpec) -> Result<ClosureResult> {
    ClosureOperator::new(v.clone()).effective(alg, s)
}

pub fn closure_goursat(alg: &FiniteAlgebra, s: &Partition, v: &SubvarietySpec) -> Result<ClosureResult> {
    ClosureOperator::new(v.clone()).goursat(alg, s)
}

/// `S ∘ R` for a 2-permuting pair, checked against the join `S ∨ R`.
pub fn closure_by_component(s: &Partition, r_comp: &Partition, alg: &FiniteAlgebra) -> Result<Partition> {
    if permutability_level(alg, s, r_comp)? != PermutabilityLevel::Two {
        return Err(Error::NotTwoPermutable(format!("{s} vs {r_comp}")));
    }
    let composite = compose(&s.to_binrel(), &r_comp.to_binrel())?;
    let j = join(alg, s, r_comp)?;
    if composite != j.to_binrel() {
        return Err(Error::GoursatViolation {
            algebra: alg.name().to_string(),
            detail: format!("S∘R ≠ S∨R for S = {s}, R = {r_comp}"),
        });
    }
    Ok(j)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    /// (1) `S ⊆ S̄`
    Extensive,
    /// (2) `S ⊆ T ⇒ S̄ ⊆ T̄`
    Monotone,
    /// (3) `closure(f⁻¹ S) ⊆ f⁻¹(S̄)`
    InverseImage,
    /// (4) `closure(S̄) = S̄`
    Idempotent,
    /// (5) `closure(f⁻¹ S) = f⁻¹(S̄)` for quotient maps
    Effective,
    /// (6) `closure(f S) = f(S̄)`
    Birkhoff,
    /// (6′) `f(Δ̄_X) = Δ̄_Y`
    BirkhoffDelta,
    /// `closure(R ∨ S) = R̄ ∨ S̄`
    Additive,
    /// `f(R ∨ S) = f(R) ∨ f(S)`
    ImageJoin,
    /// `closure(f(R ∨ S)) = closure(f R) ∨ closure(f S)`
    ImageAdditive,
}

impl Axiom {
    pub const ALL: [Axiom; 10] = [
        Axiom::Extensive,
        Axiom::Monotone,
        Axiom::InverseImage,
        Axiom::Idempotent,
        Axiom::Effective,
        Axiom::Birkhoff,
        Axiom::BirkhoffDelta,
        Axiom::Additive,
        Axiom::ImageJoin,
        Axiom::ImageAdditive,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Axiom::Extensive => "1",
            Axiom::Monotone => "2",
            Axiom::InverseImage => "3",
            Axiom::Idempotent => "4",
            Axiom::Effective => "5",
            Axiom::Birkhoff => "6",
            Axiom::BirkhoffDelta => "6'",
            Axiom::Additive => "additive",
            Axiom::ImageJoin => "image-join",
            Axiom::ImageAdditive => "image-additive",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Axiom::Extensive => "S ⊆ cl(S)",
            Axiom::Monotone => "S ⊆ T ⇒ cl(S) ⊆ cl(T)",
            Axiom::InverseImage => "cl(f⁻¹S) ⊆ f⁻¹cl(S)",
            Axiom::Idempotent => "cl(cl(S)) = cl(S)",
            Axiom::Effective => "cl(f⁻¹S) = f⁻¹cl(S), f quotient",
            Axiom::Birkhoff => "cl(f(S)) = f(cl(S))",
            Axiom::BirkhoffDelta => "f(cl(Δ_X)) = cl(Δ_Y)",
            Axiom::Additive => "cl(R∨S) = cl(R)∨cl(S)",
            Axiom::ImageJoin => "f(R∨S) = f(R)∨f(S)",
            Axiom::ImageAdditive => "cl(f(R∨S)) = cl(f(R))∨cl(f(S))",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The arrow an axiom instance quantifies over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArrowDesc {
    Identity,
    /// `X → X/kernel`
    Quotient(Partition),
    /// Inclusion of the subalgebra on these elements.
    Inclusion(Vec<usize>),
    /// `i`-th projection out of the product of the named factors.
    Projection { factors: Vec<String>, index: usize },
}

impl fmt::Display for ArrowDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArrowDesc::Identity => write!(f, "identity"),
            ArrowDesc::Quotient(k) => write!(f, "quotient by {k}"),
            ArrowDesc::Inclusion(u) => {
                let elems: Vec<String> = u.iter().map(|a| a.to_string()).collect();
                write!(f, "inclusion of {{{}}}", elems.join(" "))
            }
            ArrowDesc::Projection { factors, index } => {
                write!(f, "projection {index} of {}", factors.join(" x "))
            }
        }
    }
}

/// A replayable counterexample: on `algebra`, along `arrow`, with the named
/// input congruences, the two sides differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomWitness {
    pub algebra: String,
    pub arrow: ArrowDesc,
    pub inputs: Vec<(String, Partition)>,
    pub lhs: Partition,
    pub rhs: Partition,
}

impl fmt::Display for AxiomWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "on {} along {}", self.algebra, self.arrow)?;
        for (name, p) in &self.inputs {
            write!(f, ", {name} = {p}")?;
        }
        write!(f, ": lhs = {}, rhs = {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomStatus {
    Pass,
    Fail(AxiomWitness),
    NotApplicable(String),
}

impl AxiomStatus {
    pub fn is_pass(&self) -> bool {
        matches!(self, AxiomStatus::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomResult {
    pub axiom: Axiom,
    pub status: AxiomStatus,
    /// Number of instances checked.
    pub instances: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxiomBounds {
    /// Largest carrier whose congruence lattice is enumerated.
    pub max_size: usize,
    /// Largest binary product used for projection arrows in axiom (3).
    pub max_product: usize,
    /// Largest carrier whose subalgebras are enumerated for axiom (3).
    pub max_subalgebra_search: usize,
}

impl Default for AxiomBounds {
    fn default() -> Self {
        AxiomBounds {
            max_size: DEFAULT_MAX_SIZE,
            max_product: 64,
            max_subalgebra_search: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub spec: String,
    pub algebras: Vec<String>,
    pub bounds: AxiomBounds,
    pub results: Vec<AxiomResult>,
    pub notes: Vec<String>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.status.is_pass())
    }

    pub fn status(&self, axiom: Axiom) -> &AxiomStatus {
        &self
            .results
            .iter()
            .find(|r| r.axiom == axiom)
            .expect("every axiom is reported")
            .status
    }
}

struct Tally {
    fail: HashMap<Axiom, AxiomWitness>,
    count: HashMap<Axiom, usize>,
}

impl Tally {
    fn record(&mut self, axiom: Axiom, ok: bool, witness: impl FnOnce() -> AxiomWitness) {
        *self.count.entry(axiom).or_default() += 1;
        if !ok && !self.fail.contains_key(&axiom) {
            self.fail.insert(axiom, witness());
        }
    }
}

/// Per-quotient data reused across the sweeps.
struct QuotientData {
    kernel: Partition,
    map: QuotientMap,
    con: ConLattice,
    /// closure on the target, indexed like `con`
    closures: Vec<Partition>,
    /// image of each source congruence, indexed like the source lattice
    images: Vec<Partition>,
}

fn closures_of(op: &ClosureOperator, alg: &FiniteAlgebra, con: &ConLattice) -> Result<Vec<Partition>> {
    con.congruences().iter().map(|s| op.closure(alg, s)).collect()
}

fn witness(alg: &FiniteAlgebra, arrow: ArrowDesc, inputs: &[(&str, &Partition)], lhs: &Partition, rhs: &Partition) -> AxiomWitness {
    AxiomWitness {
        algebra: alg.name().to_string(),
        arrow,
        inputs: inputs.iter().map(|(n, p)| (n.to_string(), (*p).clone())).collect(),
        lhs: lhs.clone(),
        rhs: rhs.clone(),
    }
}

/// Exhaustively checks the closure-operator axioms for `v` over every
/// congruence and every quotient map of each algebra in `algs`.
///
/// Axiom (3) is checked over quotient maps, subalgebra inclusions and
/// projections out of binary products of the supplied algebras.
pub fn check_axioms(algs: &[FiniteAlgebra], v: &SubvarietySpec, bounds: AxiomBounds) -> Result<AxiomReport> {
    let op = ClosureOperator::new(v.clone());
    let mut tally = Tally {
        fail: HashMap::new(),
        count: HashMap::new(),
    };
    let mut notes = vec![
        "axiom 3 is checked for arrows of the ambient variety, not only arrows between members of the subvariety".to_string(),
    ];
    let mut skipped = Vec::new();
    let mut lattices: Vec<Option<ConLattice>> = Vec::new();

    for alg in algs {
        v.check_applicable(alg)?;
        if alg.size() > bounds.max_size {
            skipped.push(format!("{} (size {} > {})", alg.name(), alg.size(), bounds.max_size));
            lattices.push(None);
            continue;
        }
        let con = con_lattice(alg, Some(bounds.max_size))?;
        sweep_algebra(&op, alg, &con, &mut tally)?;
        sweep_subalgebras(&op, alg, &con, bounds, &mut tally, &mut notes)?;
        lattices.push(Some(con));
    }

    for (i, a) in algs.iter().enumerate() {
        for (j, b) in algs.iter().enumerate().skip(i) {
            let (Some(con_a), Some(con_b)) = (&lattices[i], &lattices[j]) else {
                continue;
            };
            if a.signature() != b.signature() {
                continue;
            }
            if a.size() * b.size() > bounds.max_product {
                notes.push(format!(
                    "projections out of {} x {} skipped (size {} > {})",
                    a.name(),
                    b.name(),
                    a.size() * b.size(),
                    bounds.max_product
                ));
                continue;
            }
            let factors = [a.clone(), b.clone()];
            let prod = product(a.signature(), &factors)?;
            for (index, con) in [(0, con_a), (1, con_b)] {
                let pi = projection(&prod, &factors, index)?;
                let desc = ArrowDesc::Projection {
                    factors: factors.iter().map(|f| f.name().to_string()).collect(),
                    index,
                };
                check_inverse_image_arrow(&op, &pi, con, desc, &mut tally)?;
            }
        }
    }

    let results = Axiom::ALL
        .iter()
        .map(|&axiom| {
            let instances = tally.count.get(&axiom).copied().unwrap_or(0);
            let status = match tally.fail.remove(&axiom) {
                Some(w) => AxiomStatus::Fail(w),
                None if !skipped.is_empty() => {
                    AxiomStatus::NotApplicable(format!("bound exceeded: {}", skipped.join(", ")))
                }
                None => AxiomStatus::Pass,
            };
            AxiomResult {
                axiom,
                status,
                instances,
            }
        })
        .collect();

    Ok(AxiomReport {
        spec: v.name.clone(),
        algebras: algs.iter().map(|a| a.name().to_string()).collect(),
        bounds,
        results,
        notes,
    })
}

/// Axiom (3) along an arbitrary homomorphism `f: Y → X`, for every
/// congruence of `X`.
fn check_inverse_image_arrow<M: Morphism>(
    op: &ClosureOperator,
    f: &M,
    con_x: &ConLattice,
    desc: ArrowDesc,
    tally: &mut Tally,
) -> Result<()> {
    for s in con_x.congruences() {
        let lhs = op.closure(f.source(), &inverse_image(f, s)?)?;
        let rhs = inverse_image(f, &op.closure(f.target(), s)?)?;
        let ok = lhs.is_finer_than(&rhs);
        tally.record(Axiom::InverseImage, ok, || {
            witness(f.source(), desc.clone(), &[("S", s)], &lhs, &rhs)
        });
    }
    Ok(())
}

fn sweep_subalgebras(
    op: &ClosureOperator,
    alg: &FiniteAlgebra,
    con: &ConLattice,
    bounds: AxiomBounds,
    tally: &mut Tally,
    notes: &mut Vec<String>,
) -> Result<()> {
    if alg.size() > bounds.max_subalgebra_search {
        notes.push(format!(
            "subalgebra inclusions of {} skipped (size {} > {})",
            alg.name(),
            alg.size(),
            bounds.max_subalgebra_search
        ));
        return Ok(());
    }
    for universe in subuniverses(alg)? {
        if universe.len() == alg.size() {
            continue;
        }
        let inc: Homomorphism = subalgebra(alg, &universe)?;
        check_inverse_image_arrow(op, &inc, con, ArrowDesc::Inclusion(universe), tally)?;
    }
    Ok(())
}

fn sweep_algebra(op: &ClosureOperator, alg: &FiniteAlgebra, con: &ConLattice, tally: &mut Tally) -> Result<()> {
    let cs = con.congruences();
    let cl = closures_of(op, alg, con)?;
    let db = op.delta_bar(alg)?;
    let id = ArrowDesc::Identity;

    for (s, c) in cs.iter().zip(&cl) {
        tally.record(Axiom::Extensive, s.is_finer_than(c), || {
            witness(alg, id.clone(), &[("S", s)], s, c)
        });
        let cc = op.closure(alg, c)?;
        tally.record(Axiom::Idempotent, &cc == c, || {
            witness(alg, id.clone(), &[("S", s)], &cc, c)
        });
    }
    for i in 0..cs.len() {
        for j in 0..cs.len() {
            if con.leq(i, j) {
                tally.record(Axiom::Monotone, cl[i].is_finer_than(&cl[j]), || {
                    witness(alg, id.clone(), &[("S", &cs[i]), ("T", &cs[j])], &cl[i], &cl[j])
                });
            }
            let joined = con.get(con.join(i, j));
            let lhs = &cl[con.index_of(joined).unwrap()];
            let rhs = cl[i].join_equiv(&cl[j]);
            tally.record(Axiom::Additive, *lhs == rhs, || {
                witness(alg, id.clone(), &[("R", &cs[i]), ("S", &cs[j])], lhs, &rhs)
            });
        }
    }

    let mut quotients = Vec::with_capacity(cs.len());
    for kernel in cs {
        let map = quotient(alg, kernel)?;
        let tcon = con_lattice(map.target(), Some(alg.size()))?;
        let closures = closures_of(op, map.target(), &tcon)?;
        let images = cs.iter().map(|s| direct_image(&map, s)).collect::<Result<_>>()?;
        quotients.push(QuotientData {
            kernel: kernel.clone(),
            map,
            con: tcon,
            closures,
            images,
        });
    }

    for qd in &quotients {
        let f = &qd.map;
        let desc = ArrowDesc::Quotient(qd.kernel.clone());
        let y = f.target();
        for (s, cs_y) in qd.con.congruences().iter().zip(&qd.closures) {
            let lhs = op.closure(alg, &inverse_image(f, s)?)?;
            let rhs = inverse_image(f, cs_y)?;
            tally.record(Axiom::InverseImage, lhs.is_finer_than(&rhs), || {
                witness(alg, desc.clone(), &[("S", s)], &lhs, &rhs)
            });
            tally.record(Axiom::Effective, lhs == rhs, || {
                witness(alg, desc.clone(), &[("S", s)], &lhs, &rhs)
            });
        }

        let db_y = &qd.closures[qd.con.index_of(&Partition::discrete(y.size())).unwrap()];
        let img_db = direct_image(f, &db)?;
        tally.record(Axiom::BirkhoffDelta, &img_db == db_y, || {
            witness(alg, desc.clone(), &[], &img_db, db_y)
        });

        let cl_y = |p: &Partition| -> &Partition { &qd.closures[qd.con.index_of(p).unwrap()] };
        for (i, s) in cs.iter().enumerate() {
            let lhs = cl_y(&qd.images[i]);
            let rhs = direct_image(f, &cl[i])?;
            tally.record(Axiom::Birkhoff, *lhs == rhs, || {
                witness(alg, desc.clone(), &[("S", s)], lhs, &rhs)
            });
        }
    }

    for i in 0..cs.len() {
        for j in 0..cs.len() {
            let joined = con.join(i, j);
            for qd in &quotients {
                let desc = || ArrowDesc::Quotient(qd.kernel.clone());
                let cl_y = |p: &Partition| -> &Partition { &qd.closures[qd.con.index_of(p).unwrap()] };
                let (fr, fs) = (&qd.images[i], &qd.images[j]);
                let inputs = [("R", &cs[i]), ("S", &cs[j])];

                let lhs = &qd.images[joined];
                let rhs = fr.join_equiv(fs);
                tally.record(Axiom::ImageJoin, *lhs == rhs, || {
                    witness(alg, desc(), &inputs, lhs, &rhs)
                });

                let lhs = cl_y(&qd.images[joined]);
                let rhs = cl_y(fr).join_equiv(cl_y(fs));
                tally.record(Axiom::ImageAdditive, *lhs == rhs, || {
                    witness(alg, desc(), &inputs, lhs, &rhs)
                });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoundtripFailure {
    /// `Δ` on `X/Δ̄_X` is not closed.
    ReflectionNotClosed { delta_bar: Partition },
    /// `X/θ ⊨ v` disagrees with "Δ closed" on `X/θ`.
    MembershipMismatch { kernel: Partition, satisfies: bool, delta_closed: bool },
    /// The congruences of `X/S` with quotient in the induced subcategory
    /// have no least element.
    NoLeastReflection { congruence: Partition },
    /// The closure rebuilt from the induced subcategory differs.
    ClosureMismatch { congruence: Partition, direct: Partition, derived: Partition },
}

impl fmt::Display for RoundtripFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoundtripFailure::ReflectionNotClosed { delta_bar } => {
                write!(f, "Δ on the reflection is not closed (closure {delta_bar})")
            }
            RoundtripFailure::MembershipMismatch { kernel, satisfies, delta_closed } => write!(
                f,
                "quotient by {kernel}: satisfies identities = {satisfies}, Δ closed = {delta_closed}"
            ),
            RoundtripFailure::NoLeastReflection { congruence } => {
                write!(f, "no least reflecting congruence on the quotient by {congruence}")
            }
            RoundtripFailure::ClosureMismatch { congruence, direct, derived } => write!(
                f,
                "S = {congruence}: direct closure {direct}, closure from subcategory {derived}"
            ),
        }
    }
}

/// Checks both directions of the correspondence between the subvariety and
/// its closure operator on `alg`:
///
/// * the reflection `X/Δ̄_X` has closed `Δ`;
/// * membership in the subvariety agrees with "Δ closed" on every quotient;
/// * the closure rebuilt from the subcategory {Y : Δ_Y closed} (least
///   congruence of `X/S` whose quotient is in it, pulled back along `q`)
///   equals the direct closure, for every congruence `S`.
pub fn roundtrip_check(alg: &FiniteAlgebra, v: &SubvarietySpec, max_size: Option<usize>) -> Result<Verdict<RoundtripFailure>> {
    let op = ClosureOperator::new(v.clone());
    let eta = op.reflect(alg)?;
    let db_reflection = op.delta_bar(eta.target())?;
    if !db_reflection.is_discrete() {
        return Ok(Verdict::Fails(RoundtripFailure::ReflectionNotClosed {
            delta_bar: db_reflection,
        }));
    }
    let con = con_lattice(alg, max_size)?;
    for theta in con.congruences() {
        let q = quotient(alg, theta)?;
        let satisfies = v.satisfied_by(q.target())?;
        let delta_closed = op.delta_closed(q.target())?;
        if satisfies != delta_closed {
            return Ok(Verdict::Fails(RoundtripFailure::MembershipMismatch {
                kernel: theta.clone(),
                satisfies,
                delta_closed,
            }));
        }
    }
    for s in con.congruences() {
        let q = quotient(alg, s)?;
        let y = q.target();
        let con_y = con_lattice(y, max_size)?;
        let mut least: Option<Partition> = None;
        for theta in con_y.congruences() {
            if op.delta_closed(quotient(y, theta)?.target())? {
                least = Some(match least {
                    None => theta.clone(),
                    Some(l) => l.meet(theta),
                });
            }
        }
        let least = least.expect("the total congruence always reflects");
        if !op.delta_closed(quotient(y, &least)?.target())? {
            return Ok(Verdict::Fails(RoundtripFailure::NoLeastReflection {
                congruence: s.clone(),
            }));
        }
        let derived = inverse_image(&q, &least)?;
        let direct = op.closure(alg, s)?;
        if derived != direct {
            return Ok(Verdict::Fails(RoundtripFailure::ClosureMismatch {
                congruence: s.clone(),
                direct,
                derived,
            }));
        }
    }
    Ok(Verdict::Holds)
}

/// Generators of `Δ̄` as readable equations, for reports.
pub fn verbal_generators(alg: &FiniteAlgebra, v: &SubvarietySpec) -> Result<Vec<(usize, usize)>> {
    v.check_applicable(alg)?;
    let mut pairs = verbal_pairs(alg, v)?;
    pairs.iter_mut().for_each(|p| {
        if p.0 > p.1 {
            *p = (p.1, p.0);
        }
    });
    pairs.sort_unstable();
    pairs.dedup();
    Ok(pairs)
}
