//! Tree algebras for languages of infinite ranked trees.

pub mod algebra;
pub mod automaton;
pub mod branch;
pub mod error;
pub mod formats;
pub mod game;
pub mod graphs;
pub mod omega;
pub mod order;
pub mod report;
pub mod skeleton;
pub mod tree;
pub mod treesg;

pub use error::{Error, Result};
pub use order::{DownSet, Order, PosetSlice, UpSet};
pub use tree::{Address, Node, Ranked, RankedAlphabet, RankedTree, Symbol, Term};
