//! Computer-algebra and numeric-verification engine for the decorated-tree /
//! word-algebra formalism of cancellations in dispersive PDEs with random
//! initial data.
//!
//! The crate builds decorated rooted trees, arborifies them into
//! shuffle-algebra words, evaluates both sides as oscillatory iterated
//! integrals, and mechanically verifies the equivalence theorems and the
//! cancellation identities (three Schrödinger families, the wave
//! integration-by-parts pipeline, `Γ_N` and `𝔠_N`).

// negated float comparisons in parameter validation are deliberate: they
// reject NaN, which `<=` would let through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arborify;
pub mod cancel;
pub mod catalog;
pub mod checks;
pub mod coeff;
pub mod dot;
pub mod dsl;
pub mod error;
pub mod eval;
pub mod freq;
pub mod gen;
pub mod json;
pub mod mc;
pub mod pairing;
pub mod quad;
pub mod tree;
pub mod word;

pub use coeff::ExactCoeff;
pub use error::{AlgebraError, EvalError};
pub use eval::{EvalOutput, EvalParams, Weight};
pub use freq::Frequency;
pub use pairing::{Model, Pairing};
pub use tree::{DecoratedTree, EdgeDecoration, EdgeKind, Forest, RawNode, TreePoly};
pub use word::{Letter, Slot, Word, WordPoly};
