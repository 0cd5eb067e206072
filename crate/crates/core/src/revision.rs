//! Deck-of-Cards revision of a finished result.
//!
//! A revision is a total order of the objects, best first, with a gap
//! between each consecutive pair. A gap holds `cards` blank cards (worth
//! `cards + 1` units) unless it is marked tied, in which case both objects
//! sit on the same level and the gap is worth zero units.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{card_distribution, reconstruct_matrix, value_scale, Ranking, ValueScale};
use crate::model::{CardRules, ObjectId, ObjectSet, PreferenceMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    FromTtm,
    UserEdited,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Revision {
    order: Vec<ObjectId>,
    cards: Vec<u32>,
    tied: Vec<bool>,
    provenance: Provenance,
}

impl Revision {
    /// Lays out a tournament result. Tie groups are linearized by id with
    /// tied gaps between their members.
    pub fn from_result(scale: &ValueScale, ranking: &Ranking) -> Result<Self> {
        let order: Vec<ObjectId> = ranking.iter().flatten().copied().collect();
        check_permutation(&order, scale.u.len())?;
        let gaps = order.len() - 1;
        // a degenerate scale is a single tie group
        let between = if scale.degenerate { Vec::new() } else { card_distribution(scale, ranking)? };
        let mut cards = Vec::with_capacity(gaps);
        let mut tied = Vec::with_capacity(gaps);
        for (g, group) in ranking.iter().enumerate() {
            for _ in 1..group.len() {
                cards.push(0);
                tied.push(true);
            }
            if let Some(&c) = between.get(g) {
                cards.push(c);
                tied.push(false);
            }
        }
        Ok(Self { order, cards, tied, provenance: Provenance::FromTtm })
    }

    pub fn order(&self) -> &[ObjectId] {
        &self.order
    }

    pub fn cards(&self) -> &[u32] {
        &self.cards
    }

    pub fn tied(&self) -> &[bool] {
        &self.tied
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn gaps(&self) -> usize {
        self.cards.len()
    }

    /// Replaces the order. Every gap is reset to zero cards since nothing is
    /// known yet about the new differences.
    pub fn override_ranking(&mut self, new_order: Vec<ObjectId>) -> Result<()> {
        check_permutation(&new_order, self.order.len())?;
        let gaps = new_order.len() - 1;
        self.order = new_order;
        self.cards = vec![0; gaps];
        self.tied = vec![false; gaps];
        self.provenance = Provenance::UserEdited;
        Ok(())
    }

    fn check_gap(&self, index: usize) -> Result<()> {
        if index >= self.gaps() {
            return Err(Error::GapOutOfRange { index, gaps: self.gaps() });
        }
        Ok(())
    }

    /// Puts `cards` cards in gap `index`, separating the two levels if they
    /// were tied.
    pub fn set_cards(&mut self, index: usize, cards: u32, rules: &CardRules) -> Result<()> {
        self.check_gap(index)?;
        rules.check_cards(cards)?;
        self.cards[index] = cards;
        self.tied[index] = false;
        self.provenance = Provenance::UserEdited;
        Ok(())
    }

    /// Merges (or splits) the levels around gap `index`.
    pub fn set_tied(&mut self, index: usize, tied: bool, rules: &CardRules) -> Result<()> {
        self.check_gap(index)?;
        if tied && !rules.allow_ties {
            return Err(Error::TiesNotAllowed);
        }
        self.tied[index] = tied;
        self.cards[index] = 0;
        self.provenance = Provenance::UserEdited;
        Ok(())
    }

    /// Unit scores indexed by object id, the last object anchored at zero.
    pub fn unit_scores(&self) -> Vec<i64> {
        let mut u = vec![0i64; self.order.len()];
        let mut acc = 0i64;
        for pos in (0..self.order.len()).rev() {
            u[self.order[pos].index()] = acc;
            if pos > 0 {
                let gap = pos - 1;
                if !self.tied[gap] {
                    acc += i64::from(self.cards[gap]) + 1;
                }
            }
        }
        u
    }

    /// Matrix and scale implied by the current order and gaps.
    pub fn recompute(&self) -> Result<(PreferenceMatrix, ValueScale)> {
        let matrix = reconstruct_matrix(&self.unit_scores());
        let scale = value_scale(&matrix, self.order[0])?;
        Ok((matrix, scale))
    }

    pub fn to_document(&self, objects: &ObjectSet) -> RevisionDocument {
        RevisionDocument {
            cards: self.cards.clone(),
            order: self.order.iter().map(|&id| objects.name(id).to_string()).collect(),
            provenance: self.provenance,
            tied: self.tied.clone(),
        }
    }

    pub fn from_document(doc: &RevisionDocument, objects: &ObjectSet) -> Result<Self> {
        let order = doc.order.iter().map(|n| objects.id_of(n)).collect::<Result<Vec<_>>>()?;
        check_permutation(&order, objects.len())?;
        let gaps = order.len() - 1;
        let tied = if doc.tied.is_empty() { vec![false; gaps] } else { doc.tied.clone() };
        if doc.cards.len() != gaps || tied.len() != gaps {
            return Err(Error::InvalidRanking(format!("expected {gaps} gaps")));
        }
        Ok(Self { order, cards: doc.cards.clone(), tied, provenance: doc.provenance })
    }
}

/// Name-based revision interchange.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevisionDocument {
    pub cards: Vec<u32>,
    pub order: Vec<String>,
    pub provenance: Provenance,
    /// Omitted when no gap is tied.
    #[serde(default, skip_serializing_if = "no_ties")]
    pub tied: Vec<bool>,
}

fn no_ties(tied: &[bool]) -> bool {
    !tied.contains(&true)
}

fn check_permutation(order: &[ObjectId], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    if order.len() != m || m == 0 {
        return Err(Error::NotPermutation);
    }
    for id in order {
        match seen.get_mut(id.index()) {
            Some(slot) if !*slot => *slot = true,
            _ => return Err(Error::NotPermutation),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::ranking;
    use crate::model::check_consistency;

    fn ids(raw: &[usize]) -> Vec<ObjectId> {
        raw.iter().copied().map(ObjectId).collect()
    }

    fn revision_for(u: &[i64], champion: usize) -> Revision {
        let scale = value_scale(&reconstruct_matrix(u), ObjectId(champion)).unwrap();
        Revision::from_result(&scale, &ranking(&scale)).unwrap()
    }

    #[test]
    fn example_result_lays_out_as_cards() {
        let rev = revision_for(&[5, 3, 1, 0], 0);
        assert_eq!(rev.order(), ids(&[0, 1, 2, 3]).as_slice());
        assert_eq!(rev.cards(), &[1, 1, 0]);
        assert_eq!(rev.provenance(), Provenance::FromTtm);
        let (matrix, scale) = rev.recompute().unwrap();
        assert_eq!(matrix, reconstruct_matrix(&[5, 3, 1, 0]));
        assert_eq!(scale.u, vec![5, 3, 1, 0]);
    }

    #[test]
    fn two_objects() {
        let rev = revision_for(&[4, 0], 0);
        assert_eq!(rev.cards(), &[3]);
    }

    #[test]
    fn degenerate_is_all_tied() {
        let rev = revision_for(&[0, 0, 0], 0);
        assert_eq!(rev.cards(), &[0, 0]);
        assert_eq!(rev.tied(), &[true, true]);
        assert_eq!(rev.provenance(), Provenance::FromTtm);
        assert!(rev.recompute().unwrap().1.degenerate);
    }

    #[test]
    fn derived_ties_survive_recompute() {
        let u = [3, 2, 2, 0];
        let rev = revision_for(&u, 0);
        assert_eq!(rev.order(), ids(&[0, 1, 2, 3]).as_slice());
        assert_eq!(rev.tied(), &[false, true, false]);
        assert_eq!(rev.cards(), &[0, 0, 1]);
        assert_eq!(rev.recompute().unwrap().0, reconstruct_matrix(&u));
    }

    #[test]
    fn override_resets_cards() {
        let mut rev = revision_for(&[5, 3, 1, 0], 0);
        rev.override_ranking(ids(&[0, 2, 1, 3])).unwrap();
        assert_eq!(rev.cards(), &[0, 0, 0]);
        assert_eq!(rev.provenance(), Provenance::UserEdited);

        let mut same = revision_for(&[5, 3, 1, 0], 0);
        same.override_ranking(ids(&[0, 1, 2, 3])).unwrap();
        assert_eq!(same.cards(), &[0, 0, 0]);

        assert_eq!(rev.override_ranking(ids(&[0, 1, 2])).unwrap_err(), Error::NotPermutation);
        assert_eq!(rev.override_ranking(ids(&[0, 1, 1, 3])).unwrap_err(), Error::NotPermutation);
    }

    #[test]
    fn set_cards_updates_one_gap() {
        let rules = CardRules::default();
        let mut rev = revision_for(&[5, 3, 1, 0], 0);
        rev.set_cards(0, 3, &rules).unwrap();
        assert_eq!(rev.cards(), &[3, 1, 0]);
        assert_eq!(rev.unit_scores(), vec![7, 3, 1, 0]);
        rev.set_cards(0, 0, &rules).unwrap();
        assert_eq!(rev.unit_scores(), vec![4, 3, 1, 0]);
        assert_eq!(rev.set_cards(3, 1, &rules).unwrap_err(), Error::GapOutOfRange { index: 3, gaps: 3 });
        assert!(matches!(rev.set_cards(0, 101, &rules), Err(Error::CardsOverCap { .. })));
    }

    #[test]
    fn staircase_when_all_cards_zero() {
        let mut rev = revision_for(&[5, 3, 1, 0], 0);
        rev.override_ranking(ids(&[3, 2, 1, 0])).unwrap();
        assert_eq!(rev.unit_scores(), vec![0, 1, 2, 3]);
        let (matrix, scale) = rev.recompute().unwrap();
        assert!(check_consistency(&matrix).consistent);
        assert_eq!(scale.winner, ObjectId(3));
    }

    #[test]
    fn ties_need_permission() {
        let mut rev = revision_for(&[5, 3, 1, 0], 0);
        assert_eq!(rev.set_tied(1, true, &CardRules::default()).unwrap_err(), Error::TiesNotAllowed);
        let rules = CardRules { allow_ties: true, ..CardRules::default() };
        rev.set_tied(1, true, &rules).unwrap();
        assert_eq!(rev.unit_scores(), vec![3, 1, 1, 0]);
    }

    #[test]
    fn document_uses_names() {
        let objects = ObjectSet::numbered(4).unwrap();
        let rev = revision_for(&[5, 3, 1, 0], 0);
        let doc = rev.to_document(&objects);
        assert_eq!(
            serde_json::to_string(&doc).unwrap(),
            r#"{"cards":[1,1,0],"order":["a1","a2","a3","a4"],"provenance":"from_ttm"}"#
        );
        assert_eq!(Revision::from_document(&doc, &objects).unwrap(), rev);
    }
}
