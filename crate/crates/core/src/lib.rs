//! Tournament-tree preference elicitation.
//!
//! A knockout tournament over `m` objects asks `m - 1` pairwise questions,
//! each answered with a winner and a number of blank cards. From those
//! answers [`builder`] derives the complete additive preference matrix,
//! which is always reciprocal and consistent. [`evaluation`] turns it into a
//! normalized value scale and ranking, and [`revision`] lets the result be
//! edited in Deck-of-Cards form.
//!
//! ```
//! use ttm_core::{build_preference_matrix, value_scale, ObjectId, ObjectSet, TournamentConfig, TournamentState};
//!
//! let mut t = TournamentState::new(ObjectSet::numbered(4)?, TournamentConfig::default())?;
//! t.record_match(0, ObjectId(0), 1)?;
//! t.record_match(1, ObjectId(2), 0)?;
//! t.advance_round()?;
//! t.record_match(2, ObjectId(0), 3)?;
//! t.advance_round()?;
//!
//! let matrix = build_preference_matrix(&t.match_matrix()?)?;
//! let scale = value_scale(&matrix, t.champion().unwrap())?;
//! assert_eq!(scale.u, vec![5, 3, 1, 0]);
//! # Ok::<(), ttm_core::Error>(())
//! ```

pub mod builder;
pub mod error;
pub mod evaluation;
pub mod interchange;
pub mod model;
pub mod revision;
pub mod sweep;
pub mod tournament;

pub use builder::{
    build_preference_matrix, build_with_trace, pivot_consistency_certificate, BuildTrace, PartialMatrix,
};
pub use error::{Error, Result};
pub use evaluation::{
    card_distribution, ranking, reconstruct_matrix, to_multiplicative, value_scale, MultiplicativeMatrix, Ranking,
    Rational, ResultsDocument, ValueScale, DEFAULT_BASE,
};
pub use model::{
    check_consistency, check_reciprocity, CardRules, ConsistencyReport, MatchMatrix, MatchRecord, ObjectId, ObjectSet,
    PreferenceMatrix, Violation, DEFAULT_CARD_CAP,
};
pub use revision::{Provenance, Revision, RevisionDocument};
pub use tournament::{
    expected_counts, rounds_for, ExpectedCounts, Pairing, PairingPolicy, RoundStats, Status, TournamentConfig,
    TournamentState,
};
