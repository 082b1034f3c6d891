//! Algebraic equivalence checking for quantum while-programs.
//!
//! The crate is organized around a single term language (non-idempotent
//! Kleene algebra expressions, [`syntax`]) and several semantic backends
//! that evaluate or compare those terms:
//!
//! - [`series`] — word-indexed coefficients in the extended naturals,
//!   bounded equivalence, and exact equivalence of proper expressions via
//!   weighted automata;
//! - [`quantum`] — dense complex matrices, density operators, Kraus-form
//!   superoperators, the Löwner order, effects and measurements;
//! - [`path`] — finitely presented extended operator sums with
//!   possibly-infinite multiplicities and their domination preorder;
//! - [`program`] — the quantum while-language, its denotational semantics,
//!   and the encoder from programs to expressions;
//! - [`interp`] — quantum interpretation of expressions as superoperators,
//!   with explicit convergence certificates;
//! - [`proof`] — a checker for equational/inequational derivations plus a
//!   bundled corpus of proof scripts;
//! - [`normal`] — the single-loop normal form transformation and its
//!   numeric verification;
//! - [`hoare`] — effect algebra, partitions, Hoare triples and the
//!   propositional proof rules.
//!
//! Every capability has a runnable demo under `examples/`; the `nkaq`
//! binary exposes the same operations for batch use.

pub mod corpus;
pub mod hoare;
pub mod interp;
pub mod normal;
pub mod path;
pub mod program;
pub mod proof;
pub mod quantum;
pub mod report;
pub mod series;
pub mod syntax;

pub use series::extnat::ExtNat;
pub use syntax::{Alphabet, Expr, Inequation, Relation, Symbol};
