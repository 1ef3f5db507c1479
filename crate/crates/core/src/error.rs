use crate::statevec::PhotonId;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// One off-identity entry of a Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramEntry {
    pub row: usize,
    pub col: usize,
    pub re: f64,
    pub im: f64,
}

impl std::fmt::Display for GramEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "G({},{}) = {}{:+}i",
            self.row, self.col, self.re, self.im
        )
    }
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("label count {labels} does not match register size {register}")]
    LengthMismatch { register: usize, labels: usize },

    #[error("register {0:?} repeats a photon")]
    DuplicatePhoton(Vec<PhotonId>),

    #[error("register of {0} photons exceeds the supported maximum of 10")]
    RegisterTooLarge(usize),

    #[error("registers differ: {left:?} vs {right:?}")]
    RegisterMismatch {
        left: Vec<PhotonId>,
        right: Vec<PhotonId>,
    },

    #[error("registers overlap on photon {0}")]
    OverlappingRegisters(PhotonId),

    #[error("bra register {bra:?} is not contained in state register {state:?}")]
    NotSubset {
        bra: Vec<PhotonId>,
        state: Vec<PhotonId>,
    },

    #[error("photon {0} is not in the register")]
    UnknownPhoton(PhotonId),

    #[error("superposition needs at least one term")]
    EmptySuperposition,

    #[error("state norm {0:e} is too small to normalize")]
    DegenerateState(f64),

    #[error("state norm {0} is not 1")]
    NotNormalized(f64),

    #[error("basis is not orthonormal: {}", join(.0))]
    NonOrthonormal(Vec<GramEntry>),

    #[error("assignment must have 4 rows of equal length, got {0} rows")]
    AssignmentShape(usize),

    #[error("assignment row {row} has {ones} ones, expected exactly one")]
    AssignmentRow { row: usize, ones: usize },

    #[error("assignment entry ({row},{col}) = {value} is not 0 or 1")]
    AssignmentEntry { row: usize, col: usize, value: u8 },

    #[error("assignment column {0} selects no basis state")]
    EmptySubset(usize),

    #[error("assignment has {0} columns, expected 1 to 4")]
    SubsetCount(usize),

    #[error("projector family invariant violated: {0}")]
    FamilyInvariant(String),

    #[error("{what} index {index} out of range (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("no correction rule for Bell outcomes {0}")]
    NoCorrection(String),

    #[error("mode {mode} requires the parity family")]
    ModeFamilyMismatch { mode: &'static str },
}
