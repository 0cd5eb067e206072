use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use serde::Serialize;
use ttm_core::Error as Domain;
use ttm_session::SessionError;

/// Error envelope: `{"error": {"code", "message", "field"?}}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    pub field: Option<String>,
    pub retry: bool,
}

#[derive(Serialize)]
struct Envelope<'a> {
    error: Body<'a>,
}

#[derive(Serialize)]
struct Body<'a> {
    code: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<&'a str>,
    message: &'a str,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    retry: bool,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self { status, code, message: message.into(), field: None, retry: false }
    }

    pub fn field(mut self, field: impl Into<String>) -> Self {
        self.field = Some(field.into());
        self
    }

    pub fn invalid(field: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_request", message).field(field)
    }

    pub fn version_conflict(expected: u64, stored: u64) -> Self {
        let mut err = Self::new(
            StatusCode::CONFLICT,
            "version_conflict",
            format!("session is at version {stored}, request was based on {expected}; reload and retry"),
        );
        err.retry = true;
        err
    }
}

impl From<Domain> for ApiError {
    fn from(err: Domain) -> Self {
        use StatusCode as S;
        let message = err.to_string();
        let (status, code, field) = match &err {
            Domain::UnknownPairing(_) => (S::NOT_FOUND, "unknown_pairing", Some("pairing_id")),
            Domain::AlreadyRecorded(_) => (S::CONFLICT, "already_recorded", Some("pairing_id")),
            Domain::TournamentFinished | Domain::TournamentNotFinished | Domain::PairingsAlreadySet => {
                (S::CONFLICT, "wrong_state", None)
            }
            Domain::TooFewObjects | Domain::EmptyName | Domain::DuplicateName(_) => {
                (S::UNPROCESSABLE_ENTITY, "invalid_objects", Some("objects"))
            }
            Domain::CardsOverCap { .. } => (S::UNPROCESSABLE_ENTITY, "cards_over_cap", Some("cards")),
            Domain::TiesNotAllowed => (S::UNPROCESSABLE_ENTITY, "ties_not_allowed", None),
            Domain::WinnerNotInPairing { .. } | Domain::UnknownName(_) | Domain::ByePairing(_) => {
                (S::UNPROCESSABLE_ENTITY, "invalid_winner", Some("winner"))
            }
            Domain::NotPermutation => (S::UNPROCESSABLE_ENTITY, "invalid_order", Some("order")),
            Domain::GapOutOfRange { .. } => (S::UNPROCESSABLE_ENTITY, "invalid_gap", Some("gap_index")),
            Domain::InvalidPairing(_) | Domain::PairingsMissing => {
                (S::UNPROCESSABLE_ENTITY, "invalid_pairing", Some("pairs"))
            }
            Domain::ConflictingEntry { .. } | Domain::EmptyRead(..) => (S::INTERNAL_SERVER_ERROR, "internal", None),
            _ => (S::UNPROCESSABLE_ENTITY, "invalid_request", None),
        };
        let mut api = ApiError::new(status, code, message);
        api.field = field.map(str::to_string);
        api
    }
}

impl From<SessionError> for ApiError {
    fn from(err: SessionError) -> Self {
        match err {
            SessionError::Domain(e) => e.into(),
            SessionError::WrongPhase { actual } => ApiError::new(
                StatusCode::CONFLICT,
                "wrong_phase",
                format!("not allowed while the session is in phase {actual:?}"),
            ),
            SessionError::NotFound(_) | SessionError::InvalidId(_) => {
                ApiError::new(StatusCode::NOT_FOUND, "not_found", err.to_string())
            }
            SessionError::VersionConflict { expected, stored } => ApiError::version_conflict(expected, stored),
            SessionError::Schema { path, message } => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "schema", message).field(path)
            }
            SessionError::Io(e) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "storage", e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Envelope {
            error: Body { code: self.code, field: self.field.as_deref(), message: &self.message, retry: self.retry },
        };
        let text = serde_json::to_string(&body).expect("envelope serializes");
        (self.status, [(axum::http::header::CONTENT_TYPE, "application/json")], text).into_response()
    }
}
