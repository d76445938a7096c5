use thiserror::Error;

/// Domain errors raised by the reductions and their tooling.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {detail}")]
    MalformedLine { line: usize, detail: String },
    #[error("line {line}: edge {i} {j} listed twice")]
    DuplicateEdge { line: usize, i: u64, j: u64 },
    #[error("line {line}: ranks do not form a permutation of 0..{n}")]
    RankNotPermutation { line: usize, n: u64 },
    #[error("line {line}: unknown catalog order `{name}`")]
    UnknownCatalog { line: usize, name: String },
    #[error("the sets U and V share an element")]
    OverlappingSets,
    #[error("no witness realizes the requested type: {0}")]
    WitnessFailure(String),
    #[error("order presentation not supported: {0}")]
    UnsupportedOrder(String),
    #[error("orbital matching pairs orbitals of different parity: {0}")]
    ParityMismatch(String),
    #[error("orbital matching is not order preserving: {0}")]
    OrderMismatch(String),
    #[error("map does not conjugate at {0}")]
    NotConjugating(String),
    #[error("malformed choice set: {0}")]
    MalformedChoiceSet(String),
    #[error("map is not a graph isomorphism: {0}")]
    NotAnIsomorphism(String),
    #[error("vertex of row 0 or 1 sent to row {row}")]
    RowViolation { row: usize },
    #[error("map does not commute with the swap at {0}")]
    NotCommuting(String),
    #[error("graph has {n} vertices, at most {max} supported")]
    TooLarge { n: usize, max: usize },
    #[error("value not resolved within the stage budget: {0}")]
    Unresolved(String),
}

impl Error {
    /// Stable variant name, used in the CLI's `error <Name>: <detail>` lines.
    pub fn name(&self) -> &'static str {
        match self {
            Error::MalformedLine { .. } => "MalformedLine",
            Error::DuplicateEdge { .. } => "DuplicateEdge",
            Error::RankNotPermutation { .. } => "RankNotPermutation",
            Error::UnknownCatalog { .. } => "UnknownCatalog",
            Error::OverlappingSets => "OverlappingSets",
            Error::WitnessFailure(_) => "WitnessFailure",
            Error::UnsupportedOrder(_) => "UnsupportedOrder",
            Error::ParityMismatch(_) => "ParityMismatch",
            Error::OrderMismatch(_) => "OrderMismatch",
            Error::NotConjugating(_) => "NotConjugating",
            Error::MalformedChoiceSet(_) => "MalformedChoiceSet",
            Error::NotAnIsomorphism(_) => "NotAnIsomorphism",
            Error::RowViolation { .. } => "RowViolation",
            Error::NotCommuting(_) => "NotCommuting",
            Error::TooLarge { .. } => "TooLarge",
            Error::Unresolved(_) => "Unresolved",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
