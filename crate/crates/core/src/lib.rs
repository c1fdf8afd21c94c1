//! # entmon
//!
//! Entanglement monotones built from families of observables on symmetric
//! tensor powers, together with the abstract preordered-semiring functional
//! framework that puts them in context.
//!
//! The library is organized bottom-up:
//!
//! - [`partitions`]: integer partitions, symmetric-group characters
//!   (Murnaghan–Nakayama), Kronecker and Littlewood–Richardson coefficients,
//!   and classical (Rényi) entropies. All coefficient arithmetic is exact.
//! - [`multilinear`]: multipartite state vectors, tensor products, direct
//!   sums, local maps, marginals, Schmidt data, and the rank-1 sandwiched
//!   Rényi divergence.
//! - [`schurweyl`]: occupation-number bases of symmetric subspaces, isotypic
//!   and flattening projectors applied matrix-free, and the three equivariant
//!   inclusion/embedding isometries between symmetric powers.
//! - [`gmean`]: weighted two-variable operator geometric means, nested
//!   multivariate means with effective-weight tracking, PSD order checks,
//!   and the max-divergence lower bound.
//! - [`observables`]: bipartite, grouped, and geometric-mean observable
//!   families on `Sym^n(H)`, with numeric certification of the five family
//!   axioms on finite instances.
//! - [`functionals`]: finite-copy evaluation and bracketing of the induced
//!   monotones, closed-form bipartite values, and the closed upper/lower
//!   bound sandwich.
//! - [`semiring`]: pluggable preordered semirings with abstract rank,
//!   subrank, functional constructions, and regularization.
//!
//! Entropies and logarithms are base 2 throughout.

pub mod functionals;
pub mod gmean;
pub mod multilinear;
pub mod observables;
pub mod partitions;
pub mod schurweyl;
pub mod semiring;

use thiserror::Error;

/// Dense complex matrix used throughout the crate.
pub type CMat = nalgebra::DMatrix<num_complex::Complex64>;
/// Dense complex vector used throughout the crate.
pub type CVec = nalgebra::DVector<num_complex::Complex64>;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("probability vector not normalized (sum = {0})")]
    NotNormalized(f64),

    #[error("negative probability entry: {0}")]
    NegativeProbability(f64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("zero state vector not allowed here")]
    ZeroState,

    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("negative power of a singular matrix (eigenvalue {0:.3e})")]
    SingularOperand(f64),

    #[error("operand supports are incompatible in strict mode")]
    SupportIncompatible,

    #[error("vector is not in the symmetric subspace (deviation {0:.3e})")]
    NotSymmetric(f64),

    #[error("copy count {n} exceeds the configured cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("operand count mismatch: tree has {expected} leaves, got {got} operands")]
    ArityMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
