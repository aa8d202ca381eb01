//! Crystals of Nakajima monomials: highest weight crystals and `B(infinity)`,
//! virtualization along diagram foldings, mutations of the c-array, and the
//! type A Kostant partition model.
//!
//! Internally nodes are 0-based indices. Text and JSON forms use labels,
//! `1..=n` for finite types and `0..=n` for affine types.

pub mod cartan;
pub mod crystal_graph;
pub mod error;
pub mod kostant;
pub mod monomial;
pub mod mutation;
pub mod registry;
pub mod scalar;
pub mod virtualization;

pub use cartan::{
    aligned_constraints, minimal_gamma, pairing, positive_roots_type_a, validate_cartan, CartanJson, CartanMatrix,
    FoldingJson, FoldingSpec, FoldingViolation, GammaConstraint, RootInterval, Weight,
};
pub use crystal_graph::{
    crystal_isomorphic, generate, invariant_violations, stembridge_violations, Bound, Crystal, CrystalGraph,
    GenerateOptions, GraphJson, NodeJson, Truncation, DEFAULT_NODE_CAP,
};
pub use error::{Error, Result};
pub use kostant::{
    bracket_seq, cancel, convex_order, dual_bzl_word, from_lusztig_data, kostant_context, kostant_to_monomial, kp_e,
    kp_f, kp_stats, kp_weight, lusztig_data, monomial_to_kostant, virtualize_lusztig_data, Bracket, BracketKind,
    BracketSeq, KostantCrystal, KostantJson, KostantPartition,
};
pub use monomial::{shift, CArray, CArrayStyle, Monomial, MonomialContext, MonomialCrystal, MonomialJson};
pub use mutation::{
    format_bracket_matrix, lift_mutation, mutate_carray, mutate_monomial, path_order, reorient_path, Mutation,
    Orientation,
};
pub use registry::{cartan_type, folding, FOLDINGS};
pub use scalar::Exponent;
pub use virtualization::{
    check_compatible, CompatibilityViolation, Counterexample, LemmaCheck, Mode, VerificationReport, VirtualContext,
    VirtualCrystal, VirtualStats,
};

/// Monomials with 64-bit exponents.
pub type Monomial64 = Monomial<i64>;
/// Monomials with 128-bit exponents, for deep generation.
pub type Monomial128 = Monomial<i128>;
pub type Weight64 = Weight<i64>;
