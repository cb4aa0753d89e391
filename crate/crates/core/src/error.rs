use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("node {position} is out of range for a tree with {nodes} nodes")]
    NodeOutOfRange { position: usize, nodes: usize },

    #[error("node {0} is not a rotation site (its left child is a leaf)")]
    InvalidRotationSite(usize),

    #[error("node {0} is not a left-rotation site (its right child is a leaf)")]
    InvalidLeftRotationSite(usize),

    #[error("trees have different sizes ({left} and {right} nodes)")]
    SizeMismatch { left: usize, right: usize },

    #[error("tree is not balanced")]
    NotBalanced,

    #[error("imbalance pair ({x}, {y}) at node {site} is outside the balanced grid")]
    UnbalancedSite { site: usize, x: i64, y: i64 },

    #[error("word {0:?} is not admissible")]
    NotAdmissible(Vec<u32>),

    #[error("the potential of the empty word is undefined")]
    EmptyWord,

    #[error("lower tree is not below upper tree in the Tamari order")]
    NotComparable,

    #[error("interval is not a hypercube: {0}")]
    NotHypercube(String),

    #[error("invalid marked tree: {0}")]
    InvalidMarking(String),

    #[error("malformed tree: {0}")]
    MalformedTree(String),

    #[error("pattern syntax error at byte {offset}: {message}")]
    PatternSyntax { offset: usize, message: String },

    #[error("polynomial syntax error: {0}")]
    PolynomialSyntax(String),

    #[error("arity mismatch: expected {expected} variables, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("substitution for variable {0} has a nonzero constant term")]
    ConstantTerm(usize),

    #[error("invalid grammar: {0}")]
    InvalidGrammar(String),

    #[error("iteration did not stabilize within {0} steps")]
    NoStabilization(usize),

    #[error("{what} = {value} exceeds the supported bound {bound}")]
    TooLarge { what: &'static str, value: usize, bound: usize },
}
