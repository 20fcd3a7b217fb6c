//! Recovery maps and retrodiction families over finite-dimensional
//! C*-algebras.
//!
//! The library models systems as direct sums of matrix algebras, processes as
//! CPTP superoperators between them, and retrodiction strategies (Petz,
//! rotated and averaged Petz, STH, discard-and-prepare, classical Bayes,
//! classical Surace–Scandi, convex combinations) as maps from a (prior,
//! channel) pair to a channel in the reverse direction. On top of that it
//! provides executable checks for the retrodiction axioms (state
//! preservation, normalization, compositionality, tensoriality, the
//! stabilized variants, inverting, involutivity, agreement with Bayes on
//! classical systems), a deterministic instance suite, and golden
//! reproductions of the built-in counterexample computations.

pub mod algebra;
pub mod axioms;
pub mod channels;
pub mod error;
pub mod experiments;
pub mod json;
pub mod measure;
pub mod retrodiction;
pub mod ss;

pub use algebra::{ad, element_distance, Algebra, Element, FaithfulState, C64, Mat};
pub use algebra::{DEFAULT_FLOOR, DEFAULT_TOL};
pub use channels::{channel_distance, Channel, StatePair};
pub use error::{Error, Result};
pub use measure::Measure;
pub use retrodiction::{evaluate, iterate, Strategy, UnitaryAssignment};
