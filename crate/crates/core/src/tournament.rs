//! Knockout elicitation: pairing, byes, match recording and round advancement.
//!
//! A tournament over `m` objects asks exactly `m - 1` questions. Each round
//! pairs the objects still in contention; an odd one out gets a bye and
//! advances without being compared.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CardRules, MatchMatrix, MatchRecord, ObjectId, ObjectSet};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingPolicy {
    /// Adjacent objects in the current order are paired; the last one gets
    /// the bye on odd counts.
    #[default]
    Sequential,
    /// The caller supplies every round's pairing via
    /// [`TournamentState::set_pairings`].
    Explicit,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TournamentConfig {
    pub policy: PairingPolicy,
    pub rules: CardRules,
}

/// A scheduled match. `right == None` is a bye.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pairing {
    pub pairing_id: usize,
    pub left: ObjectId,
    pub right: Option<ObjectId>,
}

impl Pairing {
    pub fn is_bye(&self) -> bool {
        self.right.is_none()
    }

    fn involves(&self, id: ObjectId) -> bool {
        self.left == id || self.right == Some(id)
    }

    fn opponent_of(&self, id: ObjectId) -> Option<ObjectId> {
        match self.right {
            Some(right) if self.left == id => Some(right),
            Some(right) if right == id => Some(self.left),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Eliciting,
    Finished,
}

/// Real matches and byes played in one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundStats {
    pub round: u32,
    pub contenders: usize,
    pub matches: usize,
    pub byes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TournamentState {
    objects: ObjectSet,
    config: TournamentConfig,
    alive: Vec<ObjectId>,
    round: u32,
    pending: Vec<Pairing>,
    /// Winner per entry of `pending`; byes are filled in when scheduled.
    outcomes: Vec<Option<ObjectId>>,
    history: Vec<MatchRecord>,
    rounds: Vec<RoundStats>,
    next_pairing_id: usize,
    status: Status,
}

impl TournamentState {
    pub fn new(objects: ObjectSet, config: TournamentConfig) -> Result<Self> {
        if objects.len() < 2 {
            return Err(Error::TooFewObjects);
        }
        let alive = objects.ids().collect();
        let mut state = Self {
            objects,
            config,
            alive,
            round: 1,
            pending: Vec::new(),
            outcomes: Vec::new(),
            history: Vec::new(),
            rounds: Vec::new(),
            next_pairing_id: 0,
            status: Status::Eliciting,
        };
        if config.policy == PairingPolicy::Sequential {
            state.schedule_sequential();
        }
        Ok(state)
    }

    pub fn objects(&self) -> &ObjectSet {
        &self.objects
    }

    pub fn config(&self) -> &TournamentConfig {
        &self.config
    }

    pub fn alive(&self) -> &[ObjectId] {
        &self.alive
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn is_finished(&self) -> bool {
        self.status == Status::Finished
    }

    /// All pairings of the current round, byes and resolved ones included.
    pub fn pending(&self) -> &[Pairing] {
        &self.pending
    }

    pub fn outcome(&self, pairing_id: usize) -> Option<ObjectId> {
        self.pending.iter().position(|p| p.pairing_id == pairing_id).and_then(|idx| self.outcomes[idx])
    }

    /// Pairings of the current round still waiting for a judgment.
    pub fn unresolved(&self) -> impl Iterator<Item = &Pairing> + '_ {
        self.pending.iter().zip(&self.outcomes).filter(|(_, o)| o.is_none()).map(|(p, _)| p)
    }

    /// True when the explicit policy is waiting for this round's pairing.
    pub fn awaiting_pairings(&self) -> bool {
        self.status == Status::Eliciting && self.pending.is_empty()
    }

    pub fn history(&self) -> &[MatchRecord] {
        &self.history
    }

    /// Statistics of every completed round.
    pub fn round_stats(&self) -> &[RoundStats] {
        &self.rounds
    }

    pub fn champion(&self) -> Option<ObjectId> {
        self.is_finished().then(|| self.alive[0])
    }

    fn schedule_sequential(&mut self) {
        let pairs = self.alive.chunks(2).map(|chunk| (chunk[0], chunk.get(1).copied())).collect::<Vec<_>>();
        self.schedule(pairs);
    }

    fn schedule(&mut self, pairs: Vec<(ObjectId, Option<ObjectId>)>) {
        self.pending.clear();
        self.outcomes.clear();
        for (left, right) in pairs {
            self.pending.push(Pairing { pairing_id: self.next_pairing_id, left, right });
            // a bye is considered victorious without comparison
            self.outcomes.push(if right.is_none() { Some(left) } else { None });
            self.next_pairing_id += 1;
        }
    }

    /// Supplies the current round's pairing under the explicit policy. The
    /// pairs must cover every object still in contention exactly once, with
    /// a single bye only when that count is odd.
    pub fn set_pairings(&mut self, pairs: Vec<(ObjectId, Option<ObjectId>)>) -> Result<&[Pairing]> {
        if self.is_finished() {
            return Err(Error::TournamentFinished);
        }
        if !self.pending.is_empty() {
            return Err(Error::PairingsAlreadySet);
        }
        let invalid = |msg: String| Err(Error::InvalidPairing(msg));
        let mut seen = vec![false; self.objects.len()];
        let mut byes = 0;
        for &(left, right) in &pairs {
            if right == Some(left) {
                return invalid(format!("object {} paired with itself", left.0));
            }
            byes += usize::from(right.is_none());
            for id in std::iter::once(left).chain(right) {
                self.objects.check_id(id)?;
                if !self.alive.contains(&id) {
                    return invalid(format!("object {} is not in contention", id.0));
                }
                if std::mem::replace(&mut seen[id.0], true) {
                    return invalid(format!("object {} appears twice", id.0));
                }
            }
        }
        if let Some(missing) = self.alive.iter().find(|id| !seen[id.0]) {
            return invalid(format!("object {} is not paired", missing.0));
        }
        if byes != self.alive.len() % 2 {
            return invalid(format!("expected {} bye(s), found {byes}", self.alive.len() % 2));
        }
        self.schedule(pairs);
        Ok(&self.pending)
    }

    fn locate(&self, pairing_id: usize) -> Result<usize> {
        if self.is_finished() {
            return Err(Error::TournamentFinished);
        }
        let idx =
            self.pending.iter().position(|p| p.pairing_id == pairing_id).ok_or(Error::UnknownPairing(pairing_id))?;
        if self.pending[idx].is_bye() {
            return Err(Error::ByePairing(pairing_id));
        }
        if self.outcomes[idx].is_some() {
            return Err(Error::AlreadyRecorded(pairing_id));
        }
        Ok(idx)
    }

    /// Records that `winner` beats its opponent with `cards` blank cards
    /// placed between them, i.e. by `cards + 1` units.
    pub fn record_match(&mut self, pairing_id: usize, winner: ObjectId, cards: u32) -> Result<MatchRecord> {
        let idx = self.locate(pairing_id)?;
        let pairing = self.pending[idx];
        let loser = pairing.opponent_of(winner).ok_or(Error::WinnerNotInPairing { pairing_id, winner })?;
        self.config.rules.check_cards(cards)?;
        Ok(self.resolve(idx, MatchRecord::from_cards(winner, loser, cards)))
    }

    /// Records declared indifference: zero units, the left object advances.
    pub fn record_tie(&mut self, pairing_id: usize) -> Result<MatchRecord> {
        let idx = self.locate(pairing_id)?;
        if !self.config.rules.allow_ties {
            return Err(Error::TiesNotAllowed);
        }
        let pairing = self.pending[idx];
        let loser = pairing.right.expect("byes are rejected by locate");
        Ok(self.resolve(idx, MatchRecord { winner: pairing.left, loser, units: 0 }))
    }

    fn resolve(&mut self, idx: usize, record: MatchRecord) -> MatchRecord {
        debug_assert!(self.pending[idx].involves(record.winner));
        self.outcomes[idx] = Some(record.winner);
        self.history.push(record);
        record
    }

    pub fn is_round_complete(&self) -> bool {
        !self.pending.is_empty() && self.outcomes.iter().all(Option::is_some)
    }

    /// Moves the winners into the next round in match order, the bye object
    /// last, or finishes when one object remains.
    pub fn advance_round(&mut self) -> Result<()> {
        if self.is_finished() {
            return Err(Error::TournamentFinished);
        }
        if self.pending.is_empty() {
            return Err(Error::PairingsMissing);
        }
        let unresolved = self.outcomes.iter().filter(|o| o.is_none()).count();
        if unresolved > 0 {
            return Err(Error::UnresolvedPairings(unresolved));
        }
        let byes = self.pending.iter().filter(|p| p.is_bye()).count();
        self.rounds.push(RoundStats {
            round: self.round,
            contenders: self.alive.len(),
            matches: self.pending.len() - byes,
            byes,
        });
        let (bye, played): (Vec<_>, Vec<_>) = self.pending.iter().zip(&self.outcomes).partition(|(p, _)| p.is_bye());
        self.alive = played.into_iter().chain(bye).map(|(_, o)| o.expect("all resolved")).collect();
        self.pending.clear();
        self.outcomes.clear();
        if self.alive.len() == 1 {
            self.status = Status::Finished;
        } else {
            self.round += 1;
            if self.config.policy == PairingPolicy::Sequential {
                self.schedule_sequential();
            }
        }
        Ok(())
    }

    /// History plus the closing `(champion, champion, 0)` row.
    pub fn match_matrix(&self) -> Result<MatchMatrix> {
        let champion = self.champion().ok_or(Error::TournamentNotFinished)?;
        let mut rows = self.history.clone();
        rows.push(MatchRecord { winner: champion, loser: champion, units: 0 });
        MatchMatrix::new(rows)
    }
}

/// Counts implied by the bracket size alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedCounts {
    pub comparisons: usize,
    pub rounds: u32,
    /// Slots of the full `2^R` bracket left without a real comparison.
    pub virtual_comparisons: usize,
}

impl ExpectedCounts {
    /// Upper bound on the comparisons of round `r` (1-based).
    pub fn per_round_max(&self, r: u32) -> usize {
        assert!(r >= 1 && r <= self.rounds, "round {r} outside 1..={}", self.rounds);
        1usize << (self.rounds - r)
    }
}

/// `ceil(log2 m)` for `m >= 1`.
pub fn rounds_for(m: usize) -> u32 {
    usize::BITS - (m.max(1) - 1).leading_zeros()
}

pub fn expected_counts(m: usize) -> Result<ExpectedCounts> {
    if m < 2 {
        return Err(Error::TooFewObjects);
    }
    let rounds = rounds_for(m);
    Ok(ExpectedCounts { comparisons: m - 1, rounds, virtual_comparisons: (1usize << rounds) - m })
}
