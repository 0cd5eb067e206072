//! CSV interchange for preference matrices and match matrices.
//!
//! Preference matrix: `m` lines of `m` signed integers, no header.
//! Match matrix: `m` lines `winner,loser,units` by object name, the
//! convention row `(champion, champion, 0)` last.

use crate::error::{Error, Result};
use crate::model::{MatchMatrix, MatchRecord, ObjectSet, PreferenceMatrix};

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes())
}

fn records(text: &str) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut out = Vec::new();
    for rec in reader(text).into_records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push((line, rec));
    }
    Ok(out)
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 output")
}

pub fn matrix_to_csv(matrix: &PreferenceMatrix) -> String {
    let mut w = writer();
    for i in 0..matrix.m() {
        w.write_record(matrix.row(i).iter().map(i64::to_string)).expect("in-memory write");
    }
    finish(w)
}

pub fn matrix_from_csv(text: &str) -> Result<PreferenceMatrix> {
    let recs = records(text)?;
    let m = recs.len();
    let mut rows = Vec::with_capacity(m);
    for (line, rec) in recs {
        if rec.len() != m {
            return Err(Error::Parse { line, message: format!("expected {m} values, found {}", rec.len()) });
        }
        let row = rec
            .iter()
            .map(|field| {
                field.parse::<i64>().map_err(|_| Error::Parse { line, message: format!("`{field}` is not an integer") })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    PreferenceMatrix::from_rows(rows)
}

pub fn match_matrix_to_csv(matches: &MatchMatrix, objects: &ObjectSet) -> String {
    let mut w = writer();
    for rec in matches.rows() {
        w.write_record([objects.name(rec.winner), objects.name(rec.loser), &rec.units.to_string()])
            .expect("in-memory write");
    }
    finish(w)
}

/// Parses a match matrix. Without an object set, objects are numbered in
/// order of first appearance.
pub fn match_matrix_from_csv(text: &str, objects: Option<&ObjectSet>) -> Result<(ObjectSet, MatchMatrix)> {
    let recs = records(text)?;
    let mut parsed = Vec::with_capacity(recs.len());
    for (line, rec) in &recs {
        if rec.len() != 3 {
            return Err(Error::Parse { line: *line, message: format!("expected 3 fields, found {}", rec.len()) });
        }
        let units = rec[2].parse::<u32>().map_err(|_| Error::Parse {
            line: *line,
            message: format!("`{}` is not a non-negative integer", &rec[2]),
        })?;
        parsed.push((*line, rec[0].to_string(), rec[1].to_string(), units));
    }

    let objects = match objects {
        Some(set) => set.clone(),
        None => {
            let mut names: Vec<String> = Vec::new();
            for (_, w, l, _) in &parsed {
                for name in [w, l] {
                    if !names.contains(name) {
                        names.push(name.clone());
                    }
                }
            }
            ObjectSet::new(names)?
        }
    };
    if parsed.len() != objects.len() {
        return Err(Error::MalformedMatchMatrix(format!(
            "{} objects need {} rows, found {}",
            objects.len(),
            objects.len(),
            parsed.len()
        )));
    }
    let rows = parsed
        .into_iter()
        .map(|(line, w, l, units)| {
            let resolve = |name: &str| objects.id_of(name).map_err(|e| Error::Parse { line, message: e.to_string() });
            Ok(MatchRecord { winner: resolve(&w)?, loser: resolve(&l)?, units })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((objects, MatchMatrix::new(rows)?))
}
