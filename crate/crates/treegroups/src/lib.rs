//! Finite binary-tree automorphism groups made executable: portraits and
//! their elementary operations, explicit subgroup machinery, uniserial
//! filtrations and element heights, constraint-defined pattern groups with
//! the nearly-maximal enumeration, wreath-recursion automata, and the
//! Hausdorff-dimension / additivity / finite-generation analyses on top.

pub mod analysis;
pub mod automata;
pub mod cli;
pub mod error;
pub mod files;
pub mod gf2;
pub mod groups;
pub mod patterns;
pub mod report;
pub mod stabilizer;
pub mod tree;
pub mod verify;

pub use error::{Error, Result};
