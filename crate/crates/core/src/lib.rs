//! Groups of automorphisms of rooted `d`-adic trees given by wreath
//! recursions: exact word problem, Mealy-automaton canonicalization, and
//! tools for studying left Engel elements.

pub mod abelian;
pub mod decision;
pub mod engel;
pub mod error;
pub mod mealy;
pub mod perm;
pub mod presentation;
pub mod tree;
pub mod word;
pub mod zoo;

pub use decision::{Budget, Outcome, Stats};
pub use error::{Error, Result};
pub use perm::Perm;
pub use presentation::{GeneratorDef, Presentation};
pub use tree::Vertex;
pub use word::{Letter, Word};
