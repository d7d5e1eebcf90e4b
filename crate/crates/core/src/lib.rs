//! Certified arithmetic of singular moduli.
//!
//! This crate implements the computational machinery needed to search for, and
//! rule out, rational linear relations `A·x + B·y + C·z ∈ Q` among three
//! pairwise distinct singular moduli (values of the modular `j`-function at
//! imaginary quadratic irrationalities):
//!
//! * [`quadforms`] — exact arithmetic of negative discriminants and reduced
//!   primitive binary quadratic forms, class numbers, and genus-theory
//!   predicates;
//! * [`classgroup`] — Gauss composition, class-group structure, projections
//!   between orders of the same imaginary quadratic field, and the Galois
//!   action on tuples of conjugate singular moduli;
//! * [`ball`] — arbitrary-precision real/complex ball arithmetic with outward
//!   rounding (the carrier for every certified numeric statement made here);
//! * [`modular`] — certified evaluation of `j` at CM points, together with
//!   checks of the classical analytic inequalities for singular moduli;
//! * [`hilbert`] — exact Hilbert class polynomials with certified integer
//!   rounding and a persistent text-file cache;
//! * [`bounds`] — the explicit effective bound functions used by the
//!   discriminant sieves, evaluated as balls or exact integers;
//! * [`detengine`] — the determinant-incompatibility calculus: products of
//!   `exp(c·π·|Δ|^{1/2}) ± 2079` factors, certified threshold solving, and the
//!   associated reference tables;
//! * [`sieve`] — the finite candidate lists of discriminant triples that
//!   survive the bound functions, plus enumeration caps;
//! * [`relations`] — LLL-based integer-relation detection, Liouville-style
//!   certification, rank certificates over conjugate orbits, and the
//!   per-triple decision procedure;
//! * [`pipeline`] — orchestration of the full elimination run and the
//!   reproduction matrix for all reference values.
//!
//! All floating-point results flow through ball arithmetic; an operation may
//! over-approximate its error radius but never under-approximate it, so every
//! strict inequality reported as *certified* is a theorem about the exact
//! values involved.

pub mod arith;
pub mod ball;
pub mod bounds;
pub mod classgroup;
pub mod detengine;
pub mod hilbert;
pub mod modular;
pub mod pipeline;
pub mod quadforms;
pub mod relations;
pub mod sieve;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The integer is not a valid negative discriminant (`< 0` and `≡ 0, 1 mod 4`).
    #[error("not a discriminant: {0} (need a negative integer ≡ 0 or 1 mod 4)")]
    InvalidDiscriminant(i64),
    /// Two operands belong to different discriminants.
    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(i64, i64),
    /// A projection between orders was requested for incompatible
    /// discriminants (different fundamental part, or non-dividing conductor).
    #[error("cannot project discriminant {0} onto {1}: both must share a fundamental discriminant with dividing conductors")]
    IncompatibleProjection(i64, i64),
    /// Working precision was raised to its configured maximum without reaching
    /// the requested certification.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    /// The requested operation cannot make sense at the given precision
    /// (e.g. a detection threshold that is already degenerate).
    #[error("precision too low: {0}")]
    PrecisionTooLow(String),
    /// A certified yes/no answer could not be reached; the caller should retry
    /// with more precision.
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    /// A threshold scenario whose lower bound does not asymptotically dominate
    /// its upper bounds.
    #[error("dominance failure: {0}")]
    DominanceFailure(String),
    /// Parameter outside the supported range of a table or formula.
    #[error("out of range: {0}")]
    OutOfRange(String),
    /// A required external data file is missing.
    #[error("missing external table: {0}")]
    MissingTable(String),
    /// A cache entry or external file failed validation.
    #[error("malformed data: {0}")]
    Malformed(String),
    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
