//! A workbench for finite universal algebra.
//!
//! Algebras are operation tables over the carrier `0..n`. On top of them the
//! crate computes congruence lattices, relational composites of congruences,
//! verbal (Birkhoff) congruences of equationally defined subvarieties and the
//! closure operator they induce on congruences:
//!
//! ```text
//! closure(S) = q⁻¹(kernel of the reflection of X/S)      (effective route)
//!            = Δ̄ ∘ S ∘ Δ̄ = S ∘ Δ̄ ∘ S                    (3-permutable route)
//! ```
//!
//! together with exhaustive checkers for the closure-operator axioms,
//! 2-/3-permutability, Mal'tsev and Hagemann-Mitschke term conditions, and
//! congruence distributivity.

pub mod algebras;
pub mod cli;
pub mod closure;
pub mod corpus;
pub mod distributivity;
mod error;
pub mod permutability;
pub mod relations;
pub mod report;
pub mod terms;

pub use algebras::{FiniteAlgebra, Homomorphism, Morphism, QuotientMap};
pub use closure::{ClosureOperator, ClosureResult, SubvarietySpec};
pub use error::{Error, Result};
pub use relations::{BinRel, ConLattice, Partition};
pub use terms::{Identity, Signature, Term};

/// Outcome of an exhaustive check: either the property holds everywhere, or
/// it fails with a concrete witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<W> {
    Holds,
    Fails(W),
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(w) => Some(w),
        }
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> Verdict<V> {
        match self {
            Verdict::Holds => Verdict::Holds,
            Verdict::Fails(w) => Verdict::Fails(f(w)),
        }
    }
}

impl<W> From<Option<W>> for Verdict<W> {
    fn from(w: Option<W>) -> Self {
        match w {
            None => Verdict::Holds,
            Some(w) => Verdict::Fails(w),
        }
    }
}
