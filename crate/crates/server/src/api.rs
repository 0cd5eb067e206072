//! Request handlers. Bodies are parsed by hand so that malformed JSON gets
//! the same error envelope as every other failure.

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use ttm_core::{CardRules, ObjectId, ObjectSet, PairingPolicy, ResultsDocument, RevisionDocument, TournamentConfig};
use ttm_session::{canonical_json, parse_document, Judgment, Phase, Session, SessionError, SessionId};

use crate::error::ApiError;
use crate::AppState;

type ApiResult<T = Response> = Result<T, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    let text = std::str::from_utf8(body).map_err(|_| ApiError::invalid("body", "request body is not UTF-8"))?;
    Ok(parse_document(text)?)
}

fn if_match(headers: &HeaderMap) -> ApiResult<Option<u64>> {
    let Some(value) = headers.get(header::IF_MATCH) else { return Ok(None) };
    value
        .to_str()
        .ok()
        .map(|v| v.trim().trim_start_matches("W/").trim_matches('"'))
        .and_then(|v| v.parse().ok())
        .map(Some)
        .ok_or_else(|| ApiError::invalid("If-Match", "If-Match must carry a session version"))
}

fn respond<T: Serialize>(status: StatusCode, version: u64, body: &T) -> Response {
    let mut response = (status, [(header::CONTENT_TYPE, "application/json")], canonical_json(body)).into_response();
    let etag = HeaderValue::from_str(&format!("\"{version}\"")).expect("numeric etag");
    response.headers_mut().insert(header::ETAG, etag);
    response
}

fn non_negative(field: &str, value: i64) -> ApiResult<u32> {
    u32::try_from(value).map_err(|_| ApiError::invalid(field, format!("{field} must be a non-negative integer")))
}

fn resolve(session: &Session, field: &str, name: &str) -> ApiResult<ObjectId> {
    session.objects().id_of(name).map_err(|e| ApiError::from(e).field(field))
}

#[derive(Serialize)]
struct PairingView {
    bye: bool,
    left: String,
    pairing_id: usize,
    right: Option<String>,
    winner: Option<String>,
}

#[derive(Serialize)]
struct PairingsView {
    awaiting_pairings: bool,
    finished: bool,
    objects: Vec<String>,
    pairings: Vec<PairingView>,
    phase: Phase,
    round: u32,
    session_id: String,
    version: u64,
}

fn pairings_view(s: &Session) -> PairingsView {
    let t = &s.tournament;
    let name = |id: ObjectId| s.objects().name(id).to_string();
    PairingsView {
        awaiting_pairings: t.awaiting_pairings(),
        finished: t.is_finished(),
        objects: s.objects().names().to_vec(),
        pairings: t
            .pending()
            .iter()
            .map(|p| PairingView {
                bye: p.is_bye(),
                left: name(p.left),
                pairing_id: p.pairing_id,
                right: p.right.map(name),
                winner: t.outcome(p.pairing_id).map(name),
            })
            .collect(),
        phase: s.phase,
        round: t.round(),
        session_id: s.session_id.to_string(),
        version: s.version,
    }
}

#[derive(Serialize)]
struct ResultsView {
    phase: Phase,
    results: ResultsDocument,
    revision: RevisionDocument,
    session_id: String,
    tournament_results: ResultsDocument,
    version: u64,
}

fn results_view(s: &Session) -> ApiResult<ResultsView> {
    let revision = s.revision.as_ref().ok_or(SessionError::WrongPhase { actual: s.phase })?;
    Ok(ResultsView {
        phase: s.phase,
        results: s.results()?,
        revision: revision.to_document(s.objects()),
        session_id: s.session_id.to_string(),
        tournament_results: s.tournament_results()?,
        version: s.version,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    objects: Vec<String>,
    #[serde(default)]
    policy: PairingPolicy,
    #[serde(default)]
    allow_ties: bool,
    #[serde(default = "default_cap")]
    card_cap: Option<i64>,
}

fn default_cap() -> Option<i64> {
    CardRules::default().card_cap.map(i64::from)
}

pub async fn create_session(State(state): State<AppState>, body: Bytes) -> ApiResult {
    let req: CreateRequest = parse_body(&body)?;
    if req.objects.len() > state.config.max_objects {
        return Err(ApiError::invalid(
            "objects",
            format!("at most {} objects are supported", state.config.max_objects),
        ));
    }
    let objects = ObjectSet::new(req.objects)?;
    let card_cap = req.card_cap.map(|c| non_negative("card_cap", c)).transpose()?;
    let config = TournamentConfig { policy: req.policy, rules: CardRules { allow_ties: req.allow_ties, card_cap } };
    let mut session = Session::new(objects, config)?;
    session.start()?;
    state.store.create(&mut session)?;
    tracing::info!(session = %session.session_id, "session created");
    Ok(respond(StatusCode::CREATED, session.version, &pairings_view(&session)))
}

async fn load(state: &AppState, id: &str) -> ApiResult<Session> {
    let id: SessionId = id.parse()?;
    Ok(state.store.load(&id)?)
}

/// Loads, mutates and stores one session while holding its lock.
async fn mutate<F>(state: &AppState, id: &str, headers: &HeaderMap, f: F) -> ApiResult<Session>
where
    F: FnOnce(&mut Session) -> ApiResult<()>,
{
    let id: SessionId = id.parse()?;
    let expected = if_match(headers)?;
    let lock = state.lock_for(&id);
    let _guard = lock.lock().await;
    let mut session = state.store.load(&id)?;
    if let Some(expected) = expected {
        if expected != session.version {
            return Err(ApiError::version_conflict(expected, session.version));
        }
    }
    f(&mut session)?;
    state.store.update(&mut session)?;
    Ok(session)
}

pub async fn get_session(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let s = load(&state, &id).await?;
    Ok(respond(StatusCode::OK, s.version, &pairings_view(&s)))
}

pub async fn get_pairings(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    get_session(State(state), Path(id)).await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairingsRequest {
    pairs: Vec<(String, Option<String>)>,
}

pub async fn set_pairings(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let req: PairingsRequest = parse_body(&body)?;
    let s = mutate(&state, &id, &headers, |s| {
        let pairs = req
            .pairs
            .iter()
            .map(|(l, r)| Ok((resolve(s, "pairs", l)?, r.as_deref().map(|r| resolve(s, "pairs", r)).transpose()?)))
            .collect::<ApiResult<Vec<_>>>()?;
        Ok(s.set_pairings(pairs)?)
    })
    .await?;
    Ok(respond(StatusCode::OK, s.version, &pairings_view(&s)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchRequest {
    pairing_id: usize,
    #[serde(default)]
    winner: Option<String>,
    #[serde(default)]
    cards: Option<i64>,
    #[serde(default)]
    tie: bool,
}

pub async fn submit_match(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let req: MatchRequest = parse_body(&body)?;
    let s = mutate(&state, &id, &headers, |s| {
        let judgment = if req.tie {
            Judgment::Tie
        } else {
            let name = req.winner.as_deref().ok_or_else(|| ApiError::invalid("winner", "winner is required"))?;
            let cards = req.cards.ok_or_else(|| ApiError::invalid("cards", "cards is required"))?;
            Judgment::Winner { winner: resolve(s, "winner", name)?, cards: non_negative("cards", cards)? }
        };
        Ok(s.submit(req.pairing_id, judgment)?)
    })
    .await?;
    Ok(respond(StatusCode::OK, s.version, &pairings_view(&s)))
}

pub async fn get_results(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let s = load(&state, &id).await?;
    Ok(respond(StatusCode::OK, s.version, &results_view(&s)?))
}

/// The bare results document, byte-stable.
pub async fn export_results(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let s = load(&state, &id).await?;
    let doc = s.results()?;
    Ok(respond(StatusCode::OK, s.version, &doc))
}

pub async fn export_match_matrix(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let s = load(&state, &id).await?;
    let csv = ttm_session::export_match_matrix(&s).map_err(|_| SessionError::WrongPhase { actual: s.phase })?;
    Ok(([(header::CONTENT_TYPE, "text/csv")], csv).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankingRequest {
    order: Vec<String>,
}

pub async fn override_ranking(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let req: RankingRequest = parse_body(&body)?;
    let s = mutate(&state, &id, &headers, |s| {
        let order = req.order.iter().map(|n| resolve(s, "order", n)).collect::<ApiResult<Vec<_>>>()?;
        Ok(s.override_ranking(order)?)
    })
    .await?;
    Ok(respond(StatusCode::OK, s.version, &results_view(&s)?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CardsRequest {
    gap_index: usize,
    cards: i64,
}

pub async fn set_cards(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let req: CardsRequest = parse_body(&body)?;
    let cards = non_negative("cards", req.cards)?;
    let s = mutate(&state, &id, &headers, |s| Ok(s.set_cards(req.gap_index, cards)?)).await?;
    Ok(respond(StatusCode::OK, s.version, &results_view(&s)?))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TieRequest {
    gap_index: usize,
    tied: bool,
}

pub async fn set_tie(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let req: TieRequest = parse_body(&body)?;
    let s = mutate(&state, &id, &headers, |s| Ok(s.set_tied(req.gap_index, req.tied)?)).await?;
    Ok(respond(StatusCode::OK, s.version, &results_view(&s)?))
}

pub async fn discard_revision(State(state): State<AppState>, Path(id): Path<String>, headers: HeaderMap) -> ApiResult {
    let s = mutate(&state, &id, &headers, |s| Ok(s.discard_revision()?)).await?;
    Ok(respond(StatusCode::OK, s.version, &results_view(&s)?))
}

pub async fn accept(State(state): State<AppState>, Path(id): Path<String>, headers: HeaderMap) -> ApiResult {
    let s = mutate(&state, &id, &headers, |s| Ok(s.accept()?)).await?;
    Ok(respond(StatusCode::OK, s.version, &results_view(&s)?))
}
