//! Plain-text rendering of results.

use std::fmt::Write as _;

use ttm_core::{ConsistencyReport, PreferenceMatrix, ResultsDocument};

/// Ranking, scores and card counts, objects in input order.
pub fn summary(objects: &[String], doc: &ResultsDocument) -> String {
    let ranking: Vec<String> = doc.ranking.iter().map(|group| group.join(" = ")).collect();
    let join = |items: Vec<String>| items.join(", ");
    let mut out = String::new();
    writeln!(out, "ranking: {}", ranking.join(" > ")).unwrap();
    writeln!(out, "objects: {}", objects.join(", ")).unwrap();
    writeln!(out, "u: {}", join(doc.u.iter().map(ToString::to_string).collect())).unwrap();
    writeln!(out, "v: {}", join(doc.v_decimal.iter().map(|v| format!("{v:.4}")).collect())).unwrap();
    if doc.degenerate {
        writeln!(out, "cards between: none, all objects are tied").unwrap();
    } else {
        writeln!(out, "cards between: {}", join(doc.cards_between.iter().map(ToString::to_string).collect())).unwrap();
    }
    out
}

/// One line per defect; empty when the matrix is reciprocal and consistent.
pub fn defects(names: &[String], matrix: &PreferenceMatrix, report: &ConsistencyReport) -> Vec<String> {
    let m = matrix.m();
    let mut lines = Vec::new();
    if !report.reciprocal {
        for i in 0..m {
            for j in i..m {
                let (a, b) = (matrix.get(i, j), matrix.get(j, i));
                if a != -b {
                    lines.push(format!("not reciprocal: {} {}: {a} vs {b}", names[i], names[j]));
                }
            }
        }
    }
    for v in &report.violations {
        lines.push(format!(
            "inconsistent triple: {} {} {}: M[i][k] + M[k][j] - M[i][j] = {}",
            names[v.i], names[v.k], names[v.j], v.residual
        ));
    }
    lines
}
