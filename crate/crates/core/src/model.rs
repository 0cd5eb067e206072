//! Shared domain types and the exhaustive reciprocity/consistency checks.
//!
//! Everything here is exact integer arithmetic. The checks are deliberately
//! brute force so they can serve as oracles for the matrix builder.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on the number of cards accepted for one comparison.
pub const DEFAULT_CARD_CAP: u32 = 100;

/// Zero-based index of an object inside its [`ObjectSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectId(pub usize);

impl ObjectId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// The objects under evaluation. Ids are positions in `names`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct ObjectSet {
    names: Vec<String>,
}

impl ObjectSet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(|s| s.into().trim().to_string()).collect();
        if names.len() < 2 {
            return Err(Error::TooFewObjects);
        }
        let mut seen = HashSet::with_capacity(names.len());
        for name in &names {
            if name.is_empty() {
                return Err(Error::EmptyName);
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        Ok(Self { names })
    }

    /// Objects named `a1`, `a2`, ..., `am`.
    pub fn numbered(m: usize) -> Result<Self> {
        Self::new((1..=m).map(|i| format!("a{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: ObjectId) -> &str {
        &self.names[id.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id_of(&self, name: &str) -> Result<ObjectId> {
        let name = name.trim();
        self.names.iter().position(|n| n == name).map(ObjectId).ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = ObjectId> + '_ {
        (0..self.names.len()).map(ObjectId)
    }

    pub fn check_id(&self, id: ObjectId) -> Result<ObjectId> {
        if id.0 < self.names.len() {
            Ok(id)
        } else {
            Err(Error::ObjectOutOfRange(id.0))
        }
    }
}

impl TryFrom<Vec<String>> for ObjectSet {
    type Error = Error;

    fn try_from(names: Vec<String>) -> Result<Self> {
        Self::new(names)
    }
}

impl From<ObjectSet> for Vec<String> {
    fn from(set: ObjectSet) -> Self {
        set.names
    }
}

/// Limits applied to elicited judgments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardRules {
    /// Permit declared indifference (a match recorded with zero units).
    pub allow_ties: bool,
    /// Maximum cards for a single comparison; `None` for no limit.
    pub card_cap: Option<u32>,
}

impl Default for CardRules {
    fn default() -> Self {
        Self { allow_ties: false, card_cap: Some(DEFAULT_CARD_CAP) }
    }
}

impl CardRules {
    pub fn check_cards(&self, cards: u32) -> Result<u32> {
        match self.card_cap {
            Some(cap) if cards > cap => Err(Error::CardsOverCap { cards, cap }),
            _ => Ok(cards),
        }
    }
}

/// One comparison: the winner beats the loser by `units` (cards + 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatchRecord {
    pub winner: ObjectId,
    pub loser: ObjectId,
    pub units: u32,
}

impl MatchRecord {
    /// Record for an elicited match where `cards` blank cards were placed.
    pub fn from_cards(winner: ObjectId, loser: ObjectId, cards: u32) -> Self {
        Self { winner, loser, units: cards + 1 }
    }

    pub fn is_convention(&self) -> bool {
        self.winner == self.loser
    }
}

/// Chronological match list of a finished tournament, closed by the
/// convention row `(champion, champion, 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<MatchRecord>", into = "Vec<MatchRecord>")]
pub struct MatchMatrix {
    rows: Vec<MatchRecord>,
}

impl MatchMatrix {
    /// Validates the rows: `m` rows over ids `0..m`, the convention row
    /// last, every non-champion losing exactly once, and no object winning
    /// after it has already been eliminated.
    pub fn new(rows: Vec<MatchRecord>) -> Result<Self> {
        let malformed = |msg: String| Err(Error::MalformedMatchMatrix(msg));
        let m = rows.len();
        if m < 2 {
            return malformed(format!("expected at least 2 rows, found {m}"));
        }
        let last = rows[m - 1];
        if !last.is_convention() || last.units != 0 {
            return malformed("missing convention row (champion, champion, 0) at the end".into());
        }
        let champion = last.winner;
        let mut eliminated = vec![false; m];
        for (row, rec) in rows.iter().enumerate() {
            for id in [rec.winner, rec.loser] {
                if id.0 >= m {
                    return malformed(format!("row {}: object id {} out of range 0..{m}", row + 1, id.0));
                }
            }
            if row == m - 1 {
                break;
            }
            if rec.is_convention() {
                return malformed(format!("row {}: object matched against itself", row + 1));
            }
            if rec.loser == champion {
                return malformed(format!("row {}: champion {} recorded as a loser", row + 1, champion.0));
            }
            if eliminated[rec.winner.0] {
                return malformed(format!("row {}: winner {} was already eliminated", row + 1, rec.winner.0));
            }
            if eliminated[rec.loser.0] {
                return malformed(format!("row {}: repeated loser {}", row + 1, rec.loser.0));
            }
            eliminated[rec.loser.0] = true;
        }
        Ok(Self { rows })
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn champion(&self) -> ObjectId {
        self.rows[self.rows.len() - 1].winner
    }

    /// All rows including the convention row.
    pub fn rows(&self) -> &[MatchRecord] {
        &self.rows
    }

    /// The `m - 1` real matches, chronological.
    pub fn matches(&self) -> &[MatchRecord] {
        &self.rows[..self.rows.len() - 1]
    }
}

impl TryFrom<Vec<MatchRecord>> for MatchMatrix {
    type Error = Error;

    fn try_from(rows: Vec<MatchRecord>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<MatchMatrix> for Vec<MatchRecord> {
    fn from(l: MatchMatrix) -> Self {
        l.rows
    }
}

/// Square additive preference matrix. `entry(i, j) > 0` means `i` is
/// preferred to `j` by that many units.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MatrixDoc", into = "MatrixDoc")]
pub struct PreferenceMatrix {
    m: usize,
    entries: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    m: usize,
    entries: Vec<Vec<i64>>,
}

impl TryFrom<MatrixDoc> for PreferenceMatrix {
    type Error = Error;

    fn try_from(doc: MatrixDoc) -> Result<Self> {
        if doc.entries.len() != doc.m {
            return Err(Error::NotSquare { row: doc.entries.len(), len: 0, expected: doc.m });
        }
        Self::from_rows(doc.entries)
    }
}

impl From<PreferenceMatrix> for MatrixDoc {
    fn from(matrix: PreferenceMatrix) -> Self {
        MatrixDoc { m: matrix.m, entries: matrix.to_rows() }
    }
}

impl PreferenceMatrix {
    pub fn zeros(m: usize) -> Self {
        Self { m, entries: vec![0; m * m] }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let m = rows.len();
        let mut entries = Vec::with_capacity(m * m);
        for (row, values) in rows.into_iter().enumerate() {
            if values.len() != m {
                return Err(Error::NotSquare { row, len: values.len(), expected: m });
            }
            entries.extend(values);
        }
        Ok(Self { m, entries })
    }

    pub(crate) fn from_flat(m: usize, entries: Vec<i64>) -> Self {
        debug_assert_eq!(entries.len(), m * m);
        Self { m, entries }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.m..(i + 1) * self.m]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.m.max(1)).take(self.m).map(<[i64]>::to_vec).collect()
    }
}

/// A triple breaking additive consistency along the path `i -> k -> j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub i: usize,
    pub k: usize,
    pub j: usize,
    /// `M[i][k] + M[k][j] - M[i][j]`
    pub residual: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub reciprocal: bool,
    /// Only evaluated for reciprocal matrices; false otherwise.
    pub consistent: bool,
    pub violations: Vec<Violation>,
}

pub fn check_reciprocity(matrix: &PreferenceMatrix) -> bool {
    let m = matrix.m();
    (0..m).all(|i| (0..m).all(|j| matrix.get(i, j) + matrix.get(j, i) == 0))
}

/// Scans every triple `(i, k, j)`; O(m^3).
pub fn check_consistency(matrix: &PreferenceMatrix) -> ConsistencyReport {
    if !check_reciprocity(matrix) {
        return ConsistencyReport { reciprocal: false, consistent: false, violations: Vec::new() };
    }
    let m = matrix.m();
    let mut violations = Vec::new();
    for i in 0..m {
        for k in 0..m {
            for j in 0..m {
                let residual = matrix.get(i, k) + matrix.get(k, j) - matrix.get(i, j);
                if residual != 0 {
                    violations.push(Violation { i, k, j, residual });
                }
            }
        }
    }
    ConsistencyReport { reciprocal: true, consistent: violations.is_empty(), violations }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn example_matrix() -> PreferenceMatrix {
        PreferenceMatrix::from_rows(vec![vec![0, 2, 4, 5], vec![-2, 0, 2, 3], vec![-4, -2, 0, 1], vec![-5, -3, -1, 0]])
            .unwrap()
    }

    fn matrix(rows: Vec<Vec<i64>>) -> PreferenceMatrix {
        PreferenceMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn reciprocity_examples() {
        assert!(check_reciprocity(&matrix(vec![vec![0, 2], vec![-2, 0]])));
        assert!(!check_reciprocity(&matrix(vec![vec![0, 2], vec![-1, 0]])));
        assert!(check_reciprocity(&example_matrix()));
    }

    #[test]
    fn non_square_is_structural_error() {
        let err = PreferenceMatrix::from_rows(vec![vec![0, 1], vec![-1]]).unwrap_err();
        assert_eq!(err, Error::NotSquare { row: 1, len: 1, expected: 2 });
    }

    #[test]
    fn example_matrix_is_consistent() {
        let report = check_consistency(&example_matrix());
        assert!(report.reciprocal && report.consistent);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn inconsistent_triple_is_reported() {
        let report = check_consistency(&matrix(vec![vec![0, 1, 5], vec![-1, 0, 1], vec![-5, -1, 0]]));
        assert!(report.reciprocal);
        assert!(!report.consistent);
        assert!(report.violations.contains(&Violation { i: 0, k: 1, j: 2, residual: -3 }));
    }

    #[test]
    fn two_by_two_reciprocal_is_consistent() {
        for d in -5..=5 {
            assert!(check_consistency(&matrix(vec![vec![0, d], vec![-d, 0]])).consistent);
        }
    }

    #[test]
    fn non_reciprocal_skips_consistency() {
        let report = check_consistency(&matrix(vec![vec![0, 2], vec![-1, 0]]));
        assert!(!report.reciprocal);
        assert!(!report.consistent);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn object_set_validation() {
        assert_eq!(ObjectSet::new(["a"]).unwrap_err(), Error::TooFewObjects);
        assert_eq!(ObjectSet::new(["a", " "]).unwrap_err(), Error::EmptyName);
        assert_eq!(ObjectSet::new(["a", "a"]).unwrap_err(), Error::DuplicateName("a".into()));
        let set = ObjectSet::new(["x", "y", "z"]).unwrap();
        assert_eq!(set.id_of("z").unwrap(), ObjectId(2));
        assert!(set.id_of("w").is_err());
    }

    #[test]
    fn match_matrix_rejects_malformed_rows() {
        let rec = |w, l, u| MatchRecord { winner: ObjectId(w), loser: ObjectId(l), units: u };
        assert!(MatchMatrix::new(vec![rec(0, 1, 2), rec(2, 3, 1), rec(0, 2, 4), rec(0, 0, 0)]).is_ok());
        // no convention row
        assert!(MatchMatrix::new(vec![rec(0, 1, 2), rec(2, 3, 1), rec(0, 2, 4)]).is_err());
        // repeated loser
        assert!(MatchMatrix::new(vec![rec(0, 1, 2), rec(2, 1, 1), rec(0, 2, 4), rec(0, 0, 0)]).is_err());
        // champion as loser
        assert!(MatchMatrix::new(vec![rec(1, 0, 2), rec(2, 3, 1), rec(0, 2, 4), rec(0, 0, 0)]).is_err());
        // eliminated object wins later
        assert!(MatchMatrix::new(vec![rec(0, 1, 2), rec(1, 3, 1), rec(0, 2, 4), rec(0, 0, 0)]).is_err());
    }

    #[test]
    fn matrix_json_shape() {
        let json = serde_json::to_string(&matrix(vec![vec![0, 2], vec![-2, 0]])).unwrap();
        assert_eq!(json, r#"{"m":2,"entries":[[0,2],[-2,0]]}"#);
        let back: PreferenceMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back.get(0, 1), 2);
        assert!(serde_json::from_str::<PreferenceMatrix>(r#"{"m":2,"entries":[[0,2]]}"#).is_err());
    }
}
