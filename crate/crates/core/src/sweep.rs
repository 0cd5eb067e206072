//! Batch simulation of random tournaments.
//!
//! Every case is generated from `(seed, index)` alone, so the parallel and
//! sequential drivers produce identical results in identical order. With the
//! `parallel` feature (on by default) [`map_cases`] fans out over rayon;
//! without it everything runs on the calling thread.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::builder::{build_preference_matrix, pivot_consistency_certificate};
use crate::error::Result;
use crate::evaluation::{ranking, reconstruct_matrix, value_scale};
use crate::model::{check_consistency, check_reciprocity, MatchMatrix, ObjectId, ObjectSet, PreferenceMatrix};
use crate::revision::Revision;
use crate::tournament::{PairingPolicy, TournamentConfig, TournamentState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepConfig {
    pub cases: usize,
    pub min_objects: usize,
    pub max_objects: usize,
    /// Elicited units are drawn from `1..=max_units`.
    pub max_units: u32,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { cases: 10_000, min_objects: 2, max_objects: 12, max_units: 10, seed: 0x7474_6d5f_7377_6570 }
    }
}

/// One simulated tournament, finished.
#[derive(Debug, Clone)]
pub struct Case {
    pub index: usize,
    pub tournament: TournamentState,
    pub matches: MatchMatrix,
}

impl Case {
    pub fn m(&self) -> usize {
        self.matches.m()
    }

    pub fn champion(&self) -> ObjectId {
        self.matches.champion()
    }

    /// Per-case generator, independent of the driver's scheduling.
    pub fn rng(seed: u64, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);
        rng
    }
}

/// Plays a full tournament with random pairings, winners and card counts.
/// Half the cases use the sequential policy, the rest shuffle the pairing of
/// every round.
pub fn random_tournament<R: Rng + ?Sized>(m: usize, max_units: u32, rng: &mut R) -> Result<TournamentState> {
    let policy = if rng.random_bool(0.5) { PairingPolicy::Sequential } else { PairingPolicy::Explicit };
    let config = TournamentConfig { policy, ..Default::default() };
    let mut state = TournamentState::new(ObjectSet::numbered(m)?, config)?;
    while !state.is_finished() {
        if state.awaiting_pairings() {
            let mut alive = state.alive().to_vec();
            alive.shuffle(rng);
            let pairs = alive.chunks(2).map(|c| (c[0], c.get(1).copied())).collect();
            state.set_pairings(pairs)?;
        }
        let open: Vec<_> = state.unresolved().copied().collect();
        for pairing in open {
            let right = pairing.right.expect("byes are pre-resolved");
            let winner = if rng.random_bool(0.5) { pairing.left } else { right };
            let cards = rng.random_range(0..max_units.max(1));
            state.record_match(pairing.pairing_id, winner, cards)?;
        }
        state.advance_round()?;
    }
    Ok(state)
}

pub fn generate_case(config: &SweepConfig, index: usize) -> Case {
    let mut rng = Case::rng(config.seed, index);
    let m = rng.random_range(config.min_objects..=config.max_objects);
    let tournament = random_tournament(m, config.max_units, &mut rng).expect("generated moves are valid");
    let matches = tournament.match_matrix().expect("tournament finished");
    Case { index, tournament, matches }
}

/// Applies `f` to every generated case, results in case order.
pub fn map_cases<T, F>(config: &SweepConfig, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Case) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_cases_parallel(config, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_cases_sequential(config, f)
    }
}

pub fn map_cases_sequential<T, F>(config: &SweepConfig, f: F) -> Vec<T>
where
    F: Fn(Case) -> T,
{
    (0..config.cases).map(|i| f(generate_case(config, i))).collect()
}

#[cfg(feature = "parallel")]
pub fn map_cases_parallel<T, F>(config: &SweepConfig, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Case) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..config.cases).into_par_iter().map(|i| f(generate_case(config, i))).collect()
}

/// Library-side audit of one case.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CaseAudit {
    pub reciprocal: bool,
    pub violations: usize,
    pub pivots_certified: bool,
    pub round_trip: bool,
    pub revision_round_trip: bool,
}

impl CaseAudit {
    pub fn passed(&self) -> bool {
        self.reciprocal && self.violations == 0 && self.pivots_certified && self.round_trip && self.revision_round_trip
    }
}

pub fn audit_case(case: &Case) -> Result<CaseAudit> {
    let matrix: PreferenceMatrix = build_preference_matrix(&case.matches)?;
    let report = check_consistency(&matrix);
    let pivots_certified = (0..case.m())
        .map(|p| pivot_consistency_certificate(&matrix, ObjectId(p)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .all(|ok| ok);
    let scale = value_scale(&matrix, case.champion())?;
    let round_trip = reconstruct_matrix(&scale.u) == matrix;
    let revision = Revision::from_result(&scale, &ranking(&scale))?;
    let revision_round_trip = revision.recompute()?.0 == matrix;
    Ok(CaseAudit {
        reciprocal: check_reciprocity(&matrix),
        violations: report.violations.len(),
        pivots_certified,
        round_trip,
        revision_round_trip,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub cases: usize,
    pub failures: usize,
    pub errors: usize,
    pub total_violations: usize,
}

pub fn summarize(audits: &[Result<CaseAudit>]) -> SweepReport {
    audits.iter().fold(SweepReport::default(), |mut acc, audit| {
        acc.cases += 1;
        match audit {
            Ok(a) => {
                acc.failures += usize::from(!a.passed());
                acc.total_violations += a.violations;
            }
            Err(_) => acc.errors += 1,
        }
        acc
    })
}

pub fn audit(config: &SweepConfig) -> SweepReport {
    summarize(&map_cases(config, |case| audit_case(&case)))
}

pub fn audit_sequential(config: &SweepConfig) -> SweepReport {
    summarize(&map_cases_sequential(config, |case| audit_case(&case)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepConfig {
        SweepConfig { cases: 300, ..SweepConfig::default() }
    }

    #[test]
    fn cases_are_reproducible() {
        let config = small();
        let a = generate_case(&config, 17);
        let b = generate_case(&config, 17);
        assert_eq!(a.matches, b.matches);
        assert_eq!(a.tournament, b.tournament);
    }

    #[test]
    fn drivers_agree() {
        let config = small();
        let seq = map_cases_sequential(&config, |c| c.matches);
        let any = map_cases(&config, |c| c.matches);
        assert_eq!(seq, any);
    }

    #[test]
    fn sizes_cover_the_range() {
        let config = small();
        let sizes = map_cases(&config, |c| c.m());
        assert_eq!(*sizes.iter().min().unwrap(), config.min_objects);
        assert_eq!(*sizes.iter().max().unwrap(), config.max_objects);
    }

    #[test]
    fn audit_passes() {
        let report = audit(&small());
        assert_eq!(report, SweepReport { cases: 300, failures: 0, errors: 0, total_violations: 0 });
    }
}
