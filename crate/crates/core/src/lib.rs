pub mod balance_dynamics;
pub mod binary_tree;
pub mod error;
pub mod grammar;
pub mod patterns;
pub mod tamari;

pub use binary_tree::{all_balanced_trees, all_trees, catalan, for_each_tree, LabeledTree, PackedTree, Tree};
pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/trees.md")]
    mod trees {}
    #[doc = include_str!("../../../book/src/closure.md")]
    mod closure {}
    #[doc = include_str!("../../../book/src/patterns.md")]
    mod patterns {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/grammars.md")]
    mod grammars {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
