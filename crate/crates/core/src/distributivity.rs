//! Distributivity of congruence lattices and the image-meet condition.
//!
//! An algebra satisfies the image-meet condition when every quotient map
//! `f` preserves binary meets of congruences: `f(R ∧ S) = f(R) ∧ f(S)`.

use std::fmt;

use crate::algebras::{quotient, FiniteAlgebra, Morphism, QuotientMap};
use crate::closure::{ClosureOperator, SubvarietySpec};
use crate::relations::{con_lattice, direct_image, ConLattice, Partition};
use crate::{Result, Verdict};

/// A failing triple for `a ∧ (b ∨ c) = (a ∧ b) ∨ (a ∧ c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributivityWitness {
    pub a: Partition,
    pub b: Partition,
    pub c: Partition,
}

impl fmt::Display for DistributivityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a = {}, b = {}, c = {}", self.a, self.b, self.c)
    }
}

/// Checks the distributive law on every index triple; the witness is the
/// lexicographically least failing triple.
pub fn is_distributive(lat: &ConLattice) -> Verdict<DistributivityWitness> {
    let k = lat.len();
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                let lhs = lat.meet(a, lat.join(b, c));
                let rhs = lat.join(lat.meet(a, b), lat.meet(a, c));
                if lhs != rhs {
                    return Verdict::Fails(DistributivityWitness {
                        a: lat.get(a).clone(),
                        b: lat.get(b).clone(),
                        c: lat.get(c).clone(),
                    });
                }
            }
        }
    }
    Verdict::Holds
}

/// Two congruences and a quotient map along which two meet-derived
/// congruences on the target differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageMeetWitness {
    pub kernel: Partition,
    pub r: Partition,
    pub s: Partition,
    pub lhs: Partition,
    pub rhs: Partition,
}

impl fmt::Display for ImageMeetWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "R = {}, S = {}, quotient by {}: lhs = {}, rhs = {}",
            self.r, self.s, self.kernel, self.lhs, self.rhs
        )
    }
}

/// Runs `check(r, s, f)` over all `(r, s, f)` in lexicographic index order and
/// returns the first failure.
fn sweep(
    con: &ConLattice,
    quotients: &[QuotientMap],
    mut check: impl FnMut(usize, usize, &QuotientMap) -> Result<Option<(Partition, Partition)>>,
) -> Result<Verdict<ImageMeetWitness>> {
    for r in 0..con.len() {
        for s in 0..con.len() {
            for f in quotients {
                if let Some((lhs, rhs)) = check(r, s, f)? {
                    return Ok(Verdict::Fails(ImageMeetWitness {
                        kernel: f.kernel().clone(),
                        r: con.get(r).clone(),
                        s: con.get(s).clone(),
                        lhs,
                        rhs,
                    }));
                }
            }
        }
    }
    Ok(Verdict::Holds)
}

fn all_quotients(alg: &FiniteAlgebra, con: &ConLattice) -> Result<Vec<QuotientMap>> {
    con.congruences().iter().map(|k| quotient(alg, k)).collect()
}

/// `f(R ∧ S) = f(R) ∧ f(S)` for every pair of congruences and every quotient
/// map out of `alg`.
pub fn image_meet_check(alg: &FiniteAlgebra, max_size: Option<usize>) -> Result<Verdict<ImageMeetWitness>> {
    let con = con_lattice(alg, max_size)?;
    let quotients = all_quotients(alg, &con)?;
    sweep(&con, &quotients, |r, s, f| {
        let lhs = direct_image(f, con.get(con.meet(r, s)))?;
        let rhs = direct_image(f, con.get(r))?.meet(&direct_image(f, con.get(s))?);
        Ok((lhs != rhs).then_some((lhs, rhs)))
    })
}

/// `f(cl(R ∧ S)) = cl(f R) ∧ cl(f S)` for every pair of congruences and every
/// quotient map out of `alg`.
pub fn check_axiom7(alg: &FiniteAlgebra, v: &SubvarietySpec, max_size: Option<usize>) -> Result<Verdict<ImageMeetWitness>> {
    v.check_applicable(alg)?;
    let op = ClosureOperator::new(v.clone());
    let con = con_lattice(alg, max_size)?;
    let quotients = all_quotients(alg, &con)?;
    sweep(&con, &quotients, |r, s, f| {
        let y = f.target();
        let lhs = direct_image(f, &op.closure(alg, con.get(con.meet(r, s)))?)?;
        let fr = op.closure(y, &direct_image(f, con.get(r))?)?;
        let fs = op.closure(y, &direct_image(f, con.get(s))?)?;
        let rhs = fr.meet(&fs);
        Ok((lhs != rhs).then_some((lhs, rhs)))
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Applicability<T> {
    Checked(T),
    NotApplicable(String),
}

impl<T> Applicability<T> {
    pub fn checked(&self) -> Option<&T> {
        match self {
            Applicability::Checked(t) => Some(t),
            Applicability::NotApplicable(_) => None,
        }
    }
}

/// A pair of congruences with `cl(R) ∧ cl(S) ≠ cl(R ∧ S)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureMeetWitness {
    pub r: Partition,
    pub s: Partition,
    pub meet_of_closures: Partition,
    pub closure_of_meet: Partition,
}

impl fmt::Display for ClosureMeetWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "R = {}, S = {}: cl(R)∧cl(S) = {}, cl(R∧S) = {}",
            self.r, self.s, self.meet_of_closures, self.closure_of_meet
        )
    }
}

/// `cl(R) ∧ cl(S) = cl(R ∧ S)` for all congruence pairs; only checked when
/// `Con(alg)` is distributive.
pub fn closure_meet_identity_check(
    alg: &FiniteAlgebra,
    v: &SubvarietySpec,
    max_size: Option<usize>,
) -> Result<Applicability<Verdict<ClosureMeetWitness>>> {
    v.check_applicable(alg)?;
    let con = con_lattice(alg, max_size)?;
    if let Verdict::Fails(w) = is_distributive(&con) {
        return Ok(Applicability::NotApplicable(format!(
            "congruence lattice of {} is not distributive ({w})",
            alg.name()
        )));
    }
    let op = ClosureOperator::new(v.clone());
    let cl: Vec<Partition> = con
        .congruences()
        .iter()
        .map(|s| op.closure(alg, s))
        .collect::<Result<_>>()?;
    for r in 0..con.len() {
        for s in 0..con.len() {
            let lhs = cl[r].meet(&cl[s]);
            let rhs = &cl[con.meet(r, s)];
            if lhs != *rhs {
                return Ok(Applicability::Checked(Verdict::Fails(ClosureMeetWitness {
                    r: con.get(r).clone(),
                    s: con.get(s).clone(),
                    meet_of_closures: lhs,
                    closure_of_meet: rhs.clone(),
                })));
            }
        }
    }
    Ok(Applicability::Checked(Verdict::Holds))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistReport {
    pub algebra: String,
    pub congruences: usize,
    pub lattice: Verdict<DistributivityWitness>,
    pub image_meet: Verdict<ImageMeetWitness>,
    /// Axiom (7) per applicable subvariety, by name.
    pub axiom7: Vec<(String, Verdict<ImageMeetWitness>)>,
}

impl DistReport {
    /// Whether the lattice check and the image-meet check agree.
    pub fn consistent(&self) -> bool {
        self.lattice.holds() == self.image_meet.holds()
    }
}

pub fn dist_report(alg: &FiniteAlgebra, specs: &[SubvarietySpec], max_size: Option<usize>) -> Result<DistReport> {
    let con = con_lattice(alg, max_size)?;
    let mut axiom7 = Vec::new();
    for v in specs.iter().filter(|v| v.is_applicable(alg)) {
        axiom7.push((v.name.clone(), check_axiom7(alg, v, max_size)?));
    }
    Ok(DistReport {
        algebra: alg.name().to_string(),
        congruences: con.len(),
        lattice: is_distributive(&con),
        image_meet: image_meet_check(alg, max_size)?,
        axiom7,
    })
}
