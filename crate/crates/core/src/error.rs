use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Node indices carried by variants are internal (0-based) indices.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("index set is empty")]
    EmptyIndexSet,
    #[error("diagonal entry C[{i}][{i}] = {value}, expected 2")]
    DiagonalNotTwo { i: usize, value: i64 },
    #[error("off-diagonal entry C[{i}][{j}] = {value} is positive")]
    PositiveOffDiagonal { i: usize, j: usize, value: i64 },
    #[error("zero pattern is asymmetric: C[{i}][{j}] = {cij} but C[{j}][{i}] = {cji}")]
    AsymmetricZeroPattern { i: usize, j: usize, cij: i64, cji: i64 },
    #[error("matrix is not symmetrizable: edge ({i}, {j}) closes an inconsistent cycle")]
    NotSymmetrizable { i: usize, j: usize },
    #[error("node {index} out of range for an index set of size {n}")]
    NodeOutOfRange { index: usize, n: usize },
    #[error("node label {label} is not part of this index set")]
    UnknownLabel { label: i64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("folding is not surjective: source node {node} has an empty fiber")]
    FoldingNotSurjective { node: usize },
    #[error("fiber of source node {source_node} contains adjacent target nodes {a} and {b}")]
    FiberNotOrthogonal { source_node: usize, a: usize, b: usize },
    #[error("aligned condition fails at (i = {i}, j' = {j_prime}): {lhs} != {rhs}")]
    NotAligned { i: usize, j_prime: usize, lhs: i64, rhs: i64 },
    #[error("scaling factor for node {node} is {gamma}, expected a positive integer")]
    NonPositiveScaling { node: usize, gamma: i64 },
    #[error("folding is invalid: {0}")]
    InvalidFolding(String),

    #[error("c-array violates c[{i}][{j}] + c[{j}][{i}] = 1 ({cij} + {cji})")]
    CArraySum { i: usize, j: usize, cij: i64, cji: i64 },
    #[error("c-array entry c[{i}][{j}] = {value} is not in {{0, 1}}")]
    CArrayNotBinary { i: usize, j: usize, value: i64 },
    #[error("Dynkin diagram has an odd cycle through node {node}")]
    OddCycle { node: usize },
    #[error("operation requires a {expected} c-array")]
    StyleMismatch { expected: &'static str },

    #[error("integer overflow in exponent arithmetic")]
    Overflow,
    #[error("monomial has a factor Y({i},{k}) with negative shift")]
    NegativeShift { i: usize, k: i64 },
    #[error("weight is not dominant: coordinate {i} is {value}")]
    NotDominant { i: usize, value: String },
    #[error("zero exponent on Y({i},{k})")]
    ZeroExponent { i: usize, k: i64 },
    #[error("duplicate factor Y({i},{k})")]
    DuplicateKey { i: usize, k: i64 },
    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse { what: &'static str, input: String, reason: String },

    #[error("node cap of {cap} exceeded during generation")]
    NodeCapExceeded { cap: usize },
    #[error("graphs have different index sets ({left} vs {right}) and no relabeling was supplied")]
    IndexSetMismatch { left: usize, right: usize },
    #[error("crystal axiom violated: {0}")]
    AxiomViolation(String),

    #[error("element is not in the virtual crystal: {0}")]
    NotInVirtualCrystal(String),
    #[error("c-arrays are not compatible along the folding ({count} violations)")]
    NotCompatible { count: usize },

    #[error("monomial is not an element of M(infinity) for the type A array: {0}")]
    NotInInfinityCrystal(String),
    #[error("root ({start}, {end}) out of range for rank {n}")]
    RootOutOfRange { start: usize, end: usize, n: usize },
    #[error("word is not reduced: position {position} produces a non-positive or repeated root")]
    NonReducedWord { position: usize },
    #[error("word has length {length}, but the longest element has length {expected}")]
    NotLongestElement { length: usize, expected: usize },
    #[error("Cartan matrix is not of finite type")]
    NotFiniteType,

    #[error("Dynkin diagram is not a path")]
    NotAPath,

    #[error("unknown Cartan type {0:?}")]
    UnknownType(String),
    #[error("unknown folding {0:?}")]
    UnknownFolding(String),
}

impl Error {
    pub(crate) fn parse(what: &'static str, input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            what,
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}
