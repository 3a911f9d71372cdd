//! A kernel for Catt with strictly associative and unital composition.
//!
//! Definitional equality is decided by rewriting to normal form with three
//! rules: disc removal, endo-coherence removal and insertion.

pub mod complexity;
pub mod insertion;
pub mod pasting;
pub mod print;
pub mod rewrite;
pub mod suspend;
pub mod syntax;
pub mod tree;
pub mod typing;
pub mod unbiased;

pub use complexity::{syntactic_complexity, OrdinalPoly};
pub use insertion::{Branch, InsertionError, InsertionRedex};
pub use pasting::{ctx_to_tree, tree_to_ctx, Labelling, NotPasting, Side};
pub use rewrite::{def_eq, normalize, Normalizer, ReductionStep, Rule, RuleSet};
pub use syntax::{Ctx, StructuralError, Sub, Term, Type, VarSet};
pub use tree::Tree;
pub use typing::{Checker, ErrorKind, TypingError};
