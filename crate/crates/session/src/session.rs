//! The elicitation lifecycle: setup, tournament, results, revision, close.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use ttm_core::{
    build_preference_matrix, ranking, value_scale, ObjectId, ObjectSet, Pairing, PreferenceMatrix, ResultsDocument,
    Revision, TournamentConfig, TournamentState, ValueScale,
};

use crate::error::{Result, SessionError};

/// 128-bit random token rendered as 32 lowercase hex digits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SessionId(String);

impl SessionId {
    pub fn random() -> Self {
        Self(format!("{:032x}", rand::random::<u128>()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl FromStr for SessionId {
    type Err = SessionError;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() == 32 && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)) {
            Ok(Self(s.to_string()))
        } else {
            Err(SessionError::InvalidId(s.to_string()))
        }
    }
}

impl TryFrom<String> for SessionId {
    type Error = SessionError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SessionId> for String {
    fn from(id: SessionId) -> Self {
        id.0
    }
}

impl fmt::Display for SessionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Setup,
    Eliciting,
    Results,
    Revising,
    Closed,
}

impl Phase {
    pub fn has_results(self) -> bool {
        matches!(self, Phase::Results | Phase::Revising | Phase::Closed)
    }
}

/// A judgment on one pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Judgment {
    Winner { winner: ObjectId, cards: u32 },
    Tie,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: SessionId,
    /// Bumped by the store on every successful write.
    pub version: u64,
    pub phase: Phase,
    pub tournament: TournamentState,
    pub matrix: Option<PreferenceMatrix>,
    pub scale: Option<ValueScale>,
    pub revision: Option<Revision>,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
}

impl Session {
    pub fn new(objects: ObjectSet, config: TournamentConfig) -> Result<Self> {
        Self::with_id(SessionId::random(), objects, config, Utc::now())
    }

    pub fn with_id(id: SessionId, objects: ObjectSet, config: TournamentConfig, now: DateTime<Utc>) -> Result<Self> {
        Ok(Self {
            session_id: id,
            version: 0,
            phase: Phase::Setup,
            tournament: TournamentState::new(objects, config)?,
            matrix: None,
            scale: None,
            revision: None,
            created_at: now,
            updated_at: now,
        })
    }

    pub fn objects(&self) -> &ObjectSet {
        self.tournament.objects()
    }

    pub fn config(&self) -> &TournamentConfig {
        self.tournament.config()
    }

    fn require(&self, allowed: &[Phase]) -> Result<()> {
        if allowed.contains(&self.phase) {
            Ok(())
        } else {
            Err(SessionError::WrongPhase { actual: self.phase })
        }
    }

    pub fn start(&mut self) -> Result<()> {
        self.require(&[Phase::Setup])?;
        self.phase = Phase::Eliciting;
        Ok(())
    }

    /// Open pairings of the current round, byes excluded.
    pub fn open_pairings(&self) -> Vec<Pairing> {
        self.tournament.unresolved().copied().collect()
    }

    pub fn set_pairings(&mut self, pairs: Vec<(ObjectId, Option<ObjectId>)>) -> Result<()> {
        self.require(&[Phase::Eliciting])?;
        self.tournament.set_pairings(pairs)?;
        Ok(())
    }

    /// Records one judgment. The round advances as soon as its last pairing
    /// is resolved; the final round builds the matrix and moves to Results.
    pub fn submit(&mut self, pairing_id: usize, judgment: Judgment) -> Result<()> {
        self.require(&[Phase::Eliciting])?;
        let mut next = self.tournament.clone();
        match judgment {
            Judgment::Winner { winner, cards } => next.record_match(pairing_id, winner, cards)?,
            Judgment::Tie => next.record_tie(pairing_id)?,
        };
        if next.is_round_complete() {
            next.advance_round()?;
        }
        if next.is_finished() {
            let matrix = build_preference_matrix(&next.match_matrix()?)?;
            let scale = value_scale(&matrix, next.champion().expect("finished"))?;
            let revision = Revision::from_result(&scale, &ranking(&scale))?;
            self.matrix = Some(matrix);
            self.scale = Some(scale);
            self.revision = Some(revision);
            self.phase = Phase::Results;
        }
        self.tournament = next;
        Ok(())
    }

    fn revision_mut(&mut self) -> Result<&mut Revision> {
        self.require(&[Phase::Results, Phase::Revising])?;
        Ok(self.revision.as_mut().expect("revision exists once results exist"))
    }

    pub fn override_ranking(&mut self, order: Vec<ObjectId>) -> Result<()> {
        self.revision_mut()?.override_ranking(order)?;
        self.phase = Phase::Revising;
        Ok(())
    }

    pub fn set_cards(&mut self, gap: usize, cards: u32) -> Result<()> {
        let rules = self.config().rules;
        self.revision_mut()?.set_cards(gap, cards, &rules)?;
        self.phase = Phase::Revising;
        Ok(())
    }

    pub fn set_tied(&mut self, gap: usize, tied: bool) -> Result<()> {
        let rules = self.config().rules;
        self.revision_mut()?.set_tied(gap, tied, &rules)?;
        self.phase = Phase::Revising;
        Ok(())
    }

    /// Drops the edits and goes back to the tournament's own result.
    pub fn discard_revision(&mut self) -> Result<()> {
        self.require(&[Phase::Revising])?;
        let scale = self.scale.as_ref().expect("results exist");
        self.revision = Some(Revision::from_result(scale, &ranking(scale))?);
        self.phase = Phase::Results;
        Ok(())
    }

    pub fn accept(&mut self) -> Result<()> {
        self.require(&[Phase::Results, Phase::Revising])?;
        self.phase = Phase::Closed;
        Ok(())
    }

    /// Results of the tournament itself, ignoring any revision.
    pub fn tournament_results(&self) -> Result<ResultsDocument> {
        let scale = self.scale.as_ref().ok_or(SessionError::WrongPhase { actual: self.phase })?;
        Ok(ResultsDocument::new(self.objects(), scale)?)
    }

    /// Current matrix and scale: the revision's when one exists.
    pub fn current(&self) -> Result<(PreferenceMatrix, ValueScale)> {
        match (&self.revision, &self.matrix, &self.scale) {
            (Some(rev), _, _) => Ok(rev.recompute()?),
            (None, Some(m), Some(s)) => Ok((m.clone(), s.clone())),
            _ => Err(SessionError::WrongPhase { actual: self.phase }),
        }
    }

    /// The results document for the current state (revision included).
    pub fn results(&self) -> Result<ResultsDocument> {
        let (_, scale) = self.current()?;
        Ok(ResultsDocument::new(self.objects(), &scale)?)
    }

    /// Structural invariants checked after loading a document.
    pub(crate) fn validate(&self) -> Result<()> {
        let schema = |path: &str, message: &str| SessionError::Schema { path: path.into(), message: message.into() };
        let expect = self.phase.has_results();
        if self.matrix.is_some() != expect {
            return Err(schema("matrix", "must be present exactly in the results, revising and closed phases"));
        }
        if self.scale.is_some() != expect {
            return Err(schema("scale", "must be present exactly in the results, revising and closed phases"));
        }
        if expect != self.tournament.is_finished() {
            return Err(schema("tournament", "tournament state does not match phase"));
        }
        if expect && self.revision.is_none() {
            return Err(schema("revision", "missing revision"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_session() -> Session {
        let mut s = Session::new(ObjectSet::numbered(4).unwrap(), TournamentConfig::default()).unwrap();
        s.start().unwrap();
        s
    }

    fn play_example(s: &mut Session) {
        s.submit(0, Judgment::Winner { winner: ObjectId(0), cards: 1 }).unwrap();
        s.submit(1, Judgment::Winner { winner: ObjectId(2), cards: 0 }).unwrap();
        s.submit(2, Judgment::Winner { winner: ObjectId(0), cards: 3 }).unwrap();
    }

    #[test]
    fn session_ids_are_hex_tokens() {
        let id = SessionId::random();
        assert_eq!(id.as_str().len(), 32);
        assert_eq!(id.as_str().parse::<SessionId>().unwrap(), id);
        assert!("../etc/passwd".parse::<SessionId>().is_err());
    }

    #[test]
    fn example_flow() {
        let mut s = example_session();
        assert_eq!(s.open_pairings().len(), 2);
        play_example(&mut s);
        assert_eq!(s.phase, Phase::Results);
        let doc = s.results().unwrap();
        assert_eq!(doc.v_decimal, vec![1.0, 0.6, 0.2, 0.0]);
        assert_eq!(doc, s.tournament_results().unwrap());
        s.validate().unwrap();
    }

    #[test]
    fn phases_are_enforced() {
        let mut s = Session::new(ObjectSet::numbered(2).unwrap(), TournamentConfig::default()).unwrap();
        assert!(matches!(
            s.submit(0, Judgment::Winner { winner: ObjectId(0), cards: 0 }),
            Err(SessionError::WrongPhase { actual: Phase::Setup })
        ));
        s.start().unwrap();
        assert!(matches!(s.set_cards(0, 1), Err(SessionError::WrongPhase { actual: Phase::Eliciting })));
        s.submit(0, Judgment::Winner { winner: ObjectId(0), cards: 0 }).unwrap();
        assert!(matches!(
            s.submit(0, Judgment::Winner { winner: ObjectId(0), cards: 0 }),
            Err(SessionError::WrongPhase { actual: Phase::Results })
        ));
        assert!(matches!(s.discard_revision(), Err(SessionError::WrongPhase { .. })));
        s.accept().unwrap();
        assert!(matches!(s.set_cards(0, 1), Err(SessionError::WrongPhase { actual: Phase::Closed })));
    }

    #[test]
    fn revision_edits_layer_over_tournament() {
        let mut s = example_session();
        play_example(&mut s);
        s.override_ranking(vec![ObjectId(0), ObjectId(2), ObjectId(1), ObjectId(3)]).unwrap();
        assert_eq!(s.phase, Phase::Revising);
        let doc = s.results().unwrap();
        assert_eq!(doc.ranking, vec![vec!["a1"], vec!["a3"], vec!["a2"], vec!["a4"]]);
        assert_eq!(doc.cards_between, vec![0, 0, 0]);
        s.set_cards(0, 2).unwrap();
        assert_eq!(s.results().unwrap().u, vec![5, 1, 2, 0]);
        // the tournament result is untouched
        assert_eq!(s.tournament_results().unwrap().u, vec![5, 3, 1, 0]);
        s.discard_revision().unwrap();
        assert_eq!(s.phase, Phase::Results);
        assert_eq!(s.results().unwrap().u, vec![5, 3, 1, 0]);
    }

    #[test]
    fn failed_submission_leaves_state_untouched() {
        let mut s = example_session();
        let before = s.clone();
        assert!(s.submit(0, Judgment::Winner { winner: ObjectId(3), cards: 0 }).is_err());
        assert!(s.submit(0, Judgment::Tie).is_err());
        assert_eq!(s, before);
    }
}
