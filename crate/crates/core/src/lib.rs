//! Knowledge and effort over finite subset spaces.
//!
//! A model is a finite set of points, a family of "opens" (observations)
//! containing the whole set, and a valuation of atoms. Formulas are evaluated
//! at a point together with an open around it: `K φ` holds when φ holds at
//! every point of the open, `[] φ` when φ holds at the point for every
//! smaller open still containing it.
//!
//! Beyond evaluation the crate builds stable splittings of a topology for a
//! formula, extracts finite quotient models, compares a topology with its
//! union-closed bases, and runs bounded satisfiability and validity search.

pub mod axioms;
pub mod decide;
pub mod document;
pub mod error;
pub mod finitemodel;
pub mod formula;
pub mod random;
pub mod semantics;
pub mod space;
pub mod splitting;

pub use error::{Error, ParseError, ParseErrorKind, Result};
pub use formula::{parse, Formula};
pub use semantics::{model_valid, satisfies, Evaluator, Pair, Validity};
pub use space::{Model, PointSet, SubsetSpace, Valuation};
