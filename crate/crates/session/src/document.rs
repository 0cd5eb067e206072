//! Session, match-matrix and results documents.
//!
//! JSON documents are canonical: object keys sorted, no insignificant
//! whitespace.

use serde::de::DeserializeOwned;
use serde::Serialize;
use ttm_core::interchange::{match_matrix_from_csv, match_matrix_to_csv};
use ttm_core::{MatchMatrix, ObjectSet, ResultsDocument};

use crate::error::{Result, SessionError};
use crate::session::Session;

/// Compact JSON with lexicographically sorted keys.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json::Value keeps object keys in a BTreeMap
    let value = serde_json::to_value(value).expect("documents serialize to JSON");
    serde_json::to_string(&value).expect("values serialize")
}

/// Parses a document, reporting the failing field path.
pub fn parse_document<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        let path = err.path().to_string();
        SessionError::Schema { path, message: err.into_inner().to_string() }
    })
}

pub fn save_session(session: &Session) -> String {
    canonical_json(session)
}

pub fn load_session(text: &str) -> Result<Session> {
    let session: Session = parse_document(text)?;
    session.validate()?;
    Ok(session)
}

pub fn import_match_matrix(csv: &str, objects: Option<&ObjectSet>) -> Result<(ObjectSet, MatchMatrix)> {
    Ok(match_matrix_from_csv(csv, objects)?)
}

pub fn export_match_matrix(session: &Session) -> Result<String> {
    Ok(match_matrix_to_csv(&session.tournament.match_matrix()?, session.objects()))
}

pub fn export_results(session: &Session) -> Result<ResultsDocument> {
    session.results()
}
