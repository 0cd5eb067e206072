//! Elicitation sessions: lifecycle, documents and storage.

pub mod document;
pub mod error;
pub mod session;
pub mod store;

pub use document::{
    canonical_json, export_match_matrix, export_results, import_match_matrix, load_session, parse_document,
    save_session,
};
pub use error::{Result, SessionError};
pub use session::{Judgment, Phase, Session, SessionId};
pub use store::{FileStore, MemoryStore, SessionStore};
