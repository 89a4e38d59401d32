use thiserror::Error;

/// A search that would exceed its work budget, together with the tightest
/// bracket established before refusing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refusal {
    pub needed: u128,
    pub budget: u64,
    pub lower: u64,
    pub upper: Option<u64>,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} outside supported range 1..={max}", max = crate::topology::MAX_DIMENSION)]
    InvalidDimension(u32),

    #[error("label {label} is not a vertex of CQ_{n}")]
    VertexOutOfRange { label: u64, n: u32 },

    #[error("vertex set over {found} labels used with CQ_{n} ({expected} labels)")]
    UniverseMismatch { n: u32, expected: usize, found: usize },

    #[error("constructions of CQ_{n} disagree: {detail}")]
    ConstructionMismatch { n: u32, detail: String },

    #[error("vertex set is not connected in CQ_{n}")]
    Disconnected { n: u32 },

    #[error(
        "work budget exceeded: {} units needed, budget {}; established bracket [{}, {}]",
        .0.needed, .0.budget, .0.lower,
        .0.upper.map(|u| u.to_string()).unwrap_or_else(|| "?".into())
    )]
    BudgetExceeded(Refusal),

    #[error("no classification applies to |F| = {size} in CQ_{n}")]
    NotApplicable { n: u32, size: usize },

    #[error("fault sets must be distinct")]
    IdenticalFaultSets,

    #[error("witness construction failed at n = {n}: {detail}")]
    WitnessFailure { n: u32, detail: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
