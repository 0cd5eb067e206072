use thiserror::Error;

use crate::model::{ObjectId, Violation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("tournament requires at least two objects")]
    TooFewObjects,
    #[error("object names must be non-empty")]
    EmptyName,
    #[error("duplicate object name `{0}`")]
    DuplicateName(String),
    #[error("unknown object name `{0}`")]
    UnknownName(String),
    #[error("object id {0} out of range")]
    ObjectOutOfRange(usize),

    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("matrix is not additively reciprocal")]
    NotReciprocal,
    #[error("matrix is inconsistent along ({}, {}, {}): residual {}", .0.i, .0.k, .0.j, .0.residual)]
    Inconsistent(Violation),
    #[error("champion {0} is not a maximal object of the matrix")]
    ChampionNotMaximal(ObjectId),

    #[error("unknown pairing {0}")]
    UnknownPairing(usize),
    #[error("winner {winner} is not part of pairing {pairing_id}")]
    WinnerNotInPairing { pairing_id: usize, winner: ObjectId },
    #[error("pairing {0} already has a recorded result")]
    AlreadyRecorded(usize),
    #[error("pairing {0} is a bye and takes no result")]
    ByePairing(usize),
    #[error("{cards} cards exceeds the cap of {cap}")]
    CardsOverCap { cards: u32, cap: u32 },
    #[error("ties are not permitted by this configuration")]
    TiesNotAllowed,
    #[error("{0} pairing(s) of the current round are unresolved")]
    UnresolvedPairings(usize),
    #[error("tournament is already finished")]
    TournamentFinished,
    #[error("tournament is not finished")]
    TournamentNotFinished,
    #[error("pairings for this round are already set")]
    PairingsAlreadySet,
    #[error("pairings for this round have not been supplied")]
    PairingsMissing,
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),

    #[error("malformed match matrix: {0}")]
    MalformedMatchMatrix(String),
    #[error("conflicting write at ({i}, {j}): {existing} vs {attempted}")]
    ConflictingEntry { i: usize, j: usize, existing: i64, attempted: i64 },
    #[error("entry ({0}, {1}) read before it was assigned")]
    EmptyRead(usize, usize),

    #[error("invalid ranking: {0}")]
    InvalidRanking(String),
    #[error("value scale is degenerate")]
    DegenerateScale,
    #[error("multiplicative base must be finite and greater than 1, got {0}")]
    InvalidBase(f64),

    #[error("order is not a permutation of all objects")]
    NotPermutation,
    #[error("gap index {index} out of range for {gaps} gaps")]
    GapOutOfRange { index: usize, gaps: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
