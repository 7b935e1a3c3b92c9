//! Paradoxical decompositions, Tarski-number bounds and their certificates.

pub mod decomp;
pub mod error;
pub mod forests;
pub mod group;
pub mod gs;
pub mod matching;
pub mod regset;
pub mod subgroup;
pub mod transfer;
pub mod word;
pub mod wreath;

pub use error::{Error, Result};
pub use group::{FreeAbelianGroup, FreeGroup, Group, GroupRegistry};
pub use regset::RegSet;
pub use subgroup::{CosetTransversal, Subgroup, SubgroupGraph};
pub use word::{Alphabet, Letter, Word};
