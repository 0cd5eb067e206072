//! Expands a match matrix into the full preference matrix.
//!
//! The expansion runs in a fixed order: diagonal, elicited matches, the
//! champion's column (walking matches newest first), then every remaining
//! cell routed through the champion. No cell is ever written twice with a
//! different value.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{MatchMatrix, ObjectId, PreferenceMatrix};

/// A preference matrix under construction; `None` marks an empty cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialMatrix {
    m: usize,
    cells: Vec<Option<i64>>,
}

impl PartialMatrix {
    fn new(m: usize) -> Self {
        Self { m, cells: vec![None; m * m] }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> Option<i64> {
        self.cells[i * self.m + j]
    }

    fn read(&self, i: usize, j: usize) -> Result<i64> {
        self.get(i, j).ok_or(Error::EmptyRead(i, j))
    }

    fn write(&mut self, i: usize, j: usize, value: i64) -> Result<()> {
        let cell = &mut self.cells[i * self.m + j];
        match *cell {
            Some(existing) if existing != value => Err(Error::ConflictingEntry { i, j, existing, attempted: value }),
            _ => {
                *cell = Some(value);
                Ok(())
            }
        }
    }

    /// Writes `value` at `(i, j)` and its negation at `(j, i)`.
    fn write_pair(&mut self, i: usize, j: usize, value: i64) -> Result<()> {
        self.write(i, j, value)?;
        self.write(j, i, -value)
    }

    pub fn filled(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    fn into_matrix(self) -> Result<PreferenceMatrix> {
        let m = self.m;
        let mut entries = Vec::with_capacity(m * m);
        for (idx, cell) in self.cells.into_iter().enumerate() {
            entries.push(cell.ok_or(Error::EmptyRead(idx / m, idx % m))?);
        }
        Ok(PreferenceMatrix::from_flat(m, entries))
    }
}

impl fmt::Display for PartialMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.m {
            let row: Vec<String> =
                (0..self.m).map(|j| self.get(i, j).map_or_else(|| "-".to_string(), |v| v.to_string())).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Intermediate matrices kept for inspection.
#[derive(Debug, Clone)]
pub struct BuildTrace {
    pub after_matches: PartialMatrix,
    pub after_champion_column: PartialMatrix,
    pub matrix: PreferenceMatrix,
}

pub fn build_preference_matrix(matches: &MatchMatrix) -> Result<PreferenceMatrix> {
    run(matches, false).map(|trace| trace.matrix)
}

/// Same as [`build_preference_matrix`] but keeps the partial matrices.
pub fn build_with_trace(matches: &MatchMatrix) -> Result<BuildTrace> {
    run(matches, true)
}

fn run(matches: &MatchMatrix, keep: bool) -> Result<BuildTrace> {
    let m = matches.m();
    let champ = matches.champion().index();
    let mut grid = PartialMatrix::new(m);

    for i in 0..m {
        grid.write(i, i, 0)?;
    }

    for rec in matches.matches() {
        grid.write_pair(rec.winner.index(), rec.loser.index(), i64::from(rec.units))?;
    }
    let after_matches = if keep { grid.clone() } else { PartialMatrix::new(0) };

    // Newest first: a winner's distance to the champion is known once the
    // later match it lost (or the champion's own column) has been processed.
    for rec in matches.matches().iter().rev() {
        let (w, l) = (rec.winner.index(), rec.loser.index());
        let value = grid.read(l, w)? + grid.read(w, champ)?;
        grid.write_pair(l, champ, value)?;
    }
    let after_champion_column = if keep { grid.clone() } else { PartialMatrix::new(0) };

    for i in 0..m {
        for j in i + 1..m {
            if grid.get(i, j).is_none() {
                let value = grid.read(i, champ)? + grid.read(champ, j)?;
                grid.write_pair(i, j, value)?;
            }
        }
    }

    Ok(BuildTrace { after_matches, after_champion_column, matrix: grid.into_matrix()? })
}

/// True iff every entry routes through `pivot`: `M[i][j] = M[i][p] + M[p][j]`.
/// This alone implies additive consistency.
pub fn pivot_consistency_certificate(matrix: &PreferenceMatrix, pivot: ObjectId) -> Result<bool> {
    let m = matrix.m();
    let p = pivot.index();
    if p >= m {
        return Err(Error::ObjectOutOfRange(p));
    }
    Ok((0..m).all(|i| (0..m).all(|j| matrix.get(i, j) == matrix.get(i, p) + matrix.get(p, j))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{check_consistency, check_reciprocity, MatchRecord};

    fn l(rows: &[(usize, usize, u32)]) -> MatchMatrix {
        MatchMatrix::new(
            rows.iter()
                .map(|&(w, lo, units)| MatchRecord { winner: ObjectId(w), loser: ObjectId(lo), units })
                .collect(),
        )
        .unwrap()
    }

    fn example_l() -> MatchMatrix {
        l(&[(0, 1, 2), (2, 3, 1), (0, 2, 4), (0, 0, 0)])
    }

    fn grid(p: &PartialMatrix) -> Vec<Vec<Option<i64>>> {
        (0..p.m()).map(|i| (0..p.m()).map(|j| p.get(i, j)).collect()).collect()
    }

    #[test]
    fn worked_example_final_matrix() {
        let matrix = build_preference_matrix(&example_l()).unwrap();
        assert_eq!(
            matrix.to_rows(),
            vec![vec![0, 2, 4, 5], vec![-2, 0, 2, 3], vec![-4, -2, 0, 1], vec![-5, -3, -1, 0]]
        );
    }

    #[test]
    fn worked_example_intermediate_matrices() {
        let trace = build_with_trace(&example_l()).unwrap();
        let (n, s) = (None, Some);
        assert_eq!(
            grid(&trace.after_matches),
            vec![
                vec![s(0), s(2), s(4), n],
                vec![s(-2), s(0), n, n],
                vec![s(-4), n, s(0), s(1)],
                vec![n, n, s(-1), s(0)],
            ]
        );
        assert_eq!(
            grid(&trace.after_champion_column),
            vec![
                vec![s(0), s(2), s(4), s(5)],
                vec![s(-2), s(0), n, n],
                vec![s(-4), n, s(0), s(1)],
                vec![s(-5), n, s(-1), s(0)],
            ]
        );
        assert!(!trace.after_champion_column.is_complete());
    }

    #[test]
    fn single_match() {
        let matrix = build_preference_matrix(&l(&[(0, 1, 4), (0, 0, 0)])).unwrap();
        assert_eq!(matrix.to_rows(), vec![vec![0, 4], vec![-4, 0]]);
    }

    #[test]
    fn pivot_certificate_examples() {
        let matrix = build_preference_matrix(&example_l()).unwrap();
        assert!(pivot_consistency_certificate(&matrix, ObjectId(0)).unwrap());
        let bad = PreferenceMatrix::from_rows(vec![vec![0, 1, 5], vec![-1, 0, 1], vec![-5, -1, 0]]).unwrap();
        assert!(!pivot_consistency_certificate(&bad, ObjectId(0)).unwrap());
        assert_eq!(pivot_consistency_certificate(&bad, ObjectId(3)).unwrap_err(), Error::ObjectOutOfRange(3));
    }

    #[test]
    fn every_pivot_certifies_builder_output() {
        // champion 3 beaten by nobody, object 4 took a bye in round one
        let matrix = build_preference_matrix(&l(&[(1, 0, 3), (3, 2, 1), (1, 4, 2), (3, 1, 5), (3, 3, 0)])).unwrap();
        assert!(check_reciprocity(&matrix));
        assert!(check_consistency(&matrix).consistent);
        for p in 0..5 {
            assert!(pivot_consistency_certificate(&matrix, ObjectId(p)).unwrap());
        }
        assert_eq!(matrix.get(4, 3), -7);
    }

    #[test]
    fn zero_unit_ties_are_accepted() {
        let matrix = build_preference_matrix(&l(&[(0, 1, 0), (2, 3, 0), (0, 2, 0), (0, 0, 0)])).unwrap();
        assert_eq!(matrix, PreferenceMatrix::zeros(4));
    }
}
