//! Collision-model simulator for an open qubit coupled to a chain of
//! environment ancillas that are correlated in sequence before (or after)
//! colliding with the system.
//!
//! The reduced system dynamics is computed along three independent routes:
//!
//! * a brute-force evolution of the full system + ancilla chain
//!   ([`model::chain_reduced_state_oracle`]),
//! * iteration of the composite collision map acting on the system plus the
//!   carried memory ancillas ([`maps::CollisionMap`]),
//! * transfer matrices in the Pauli product basis together with closed-form
//!   decoherence functions ([`liouville`]).
//!
//! On top of these, [`measures`] provides the trace-distance based
//! non-Markovianity measure, two-qubit concurrence and quantum mutual
//! information for the interacting ancilla pairs, and the (epsilon, tau)
//! parameter sweeps.

pub mod liouville;
pub mod maps;
pub mod measures;
pub mod model;
pub mod tensor;
pub mod verify;

pub use num_complex::Complex64 as C64;

/// Tolerance for Hermiticity checks on density matrices.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Tolerance for unit-trace checks on density matrices.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalue slack allowed below zero when checking positivity.
pub const PSD_SLACK: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum CcmError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("site index {site} out of range for layout with {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("site {0} has local dimension != 2")]
    NonQubitSite(usize),
    #[error("keep set must be a nonempty subset of the layout sites")]
    InvalidKeepSet,
    #[error("invalid subsystem layout: {0}")]
    InvalidLayout(String),
    #[error("not a valid density matrix: {0}")]
    InvalidDensity(String),
    #[error("ancilla coefficients violate positivity: {0}")]
    AncillaPositivity(String),
    #[error("dimension budget exceeded: {0}")]
    DimensionBudget(String),
    #[error("correlation length {0} requires an explicit correlator unitary")]
    MissingCorrelator(usize),
    #[error("{0} requires correlation length 2, got {1}")]
    UnsupportedLength(&'static str, usize),
    #[error("initial coherence too small to divide out a decoherence function")]
    CoherenceTooSmall,
    #[error("invalid Bloch parametrization: {0}")]
    InvalidBloch(String),
    #[error("decoherence series is empty")]
    EmptySeries,
    #[error("invalid sweep axis: {0}")]
    InvalidAxis(String),
}

pub type Result<T> = std::result::Result<T, CcmError>;
