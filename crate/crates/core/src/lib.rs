//! Finite many-valued model theory over interpreting lattices.
//!
//! An interpreting lattice is a finite algebra carrying at least a lattice
//! join and meet together with a designated prime filter of "true" values.
//! Relational structures valued in such an algebra (P-models) are evaluated
//! with quantifiers read as iterated meets and joins over the domain.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation over immutable inputs: algebra validation, formula
//! parsing/printing/enumeration, evaluation, morphism search, the Boolean
//! translation and its tree-depth machinery, back-and-forth systems, and
//! brute-force checkers for the preservation lemmas. File formats and the
//! command-line front end live in the `mvmt` crate.
#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod algebra;
pub mod backforth;
pub mod bridge;
pub mod fixtures;
pub mod language;
pub mod morphisms;
pub mod preservation;
pub mod semantics;
pub mod structure;

pub use algebra::{
    AlgebraBuilder, AlgebraError, AlgebraKind, ConnectiveSignature, Elem, InterpretingLattice,
    Label, OpRule, Rational,
};
pub use language::{Formula, LanguageError, PredicateLanguage, Quantifier, SentenceClass};
pub use morphisms::{MorphismKind, MorphismWitness, SearchMode};
pub use structure::{PModel, StructureError};
