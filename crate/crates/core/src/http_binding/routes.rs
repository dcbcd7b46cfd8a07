use std::convert::Infallible;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::sse::{Event, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use futures::StreamExt;
use serde_json::json;
use tracing::{debug, error};

use crate::json::JsonValue;
use crate::runtime::{url_segment, RuntimeError, Servient, VirtualThing};
use crate::schema_gen::Violation;
use crate::td_parser::{td_to_json, TD_CONTENT_TYPE};

type AppState = Arc<Servient>;

pub fn router(servient: Arc<Servient>) -> Router {
    Router::new()
        .route("/{thing}", get(thing_description))
        .route("/{thing}/properties", get(read_all_properties))
        .route("/{thing}/properties/{name}", get(read_property).put(write_property))
        .route("/{thing}/actions/{name}", axum::routing::post(invoke_action))
        .route("/{thing}/events/{name}", get(subscribe_event))
        .fallback(|| async { not_found() })
        .method_not_allowed_fallback(|| async {
            error_body(StatusCode::METHOD_NOT_ALLOWED, "method not allowed", None)
        })
        .with_state(servient)
}

fn error_body(status: StatusCode, message: &str, violations: Option<&[Violation]>) -> Response {
    let mut body = json!({ "error": message });
    if let Some(violations) = violations {
        body["violations"] = json!(violations);
    }
    (status, Json(body)).into_response()
}

fn not_found() -> Response {
    error_body(StatusCode::NOT_FOUND, "not found", None)
}

struct ApiError(RuntimeError);

impl From<RuntimeError> for ApiError {
    fn from(err: RuntimeError) -> Self {
        ApiError(err)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let message = self.0.to_string();
        match &self.0 {
            RuntimeError::UnknownProperty(_)
            | RuntimeError::UnknownAction(_)
            | RuntimeError::UnknownEvent(_) => error_body(StatusCode::NOT_FOUND, &message, None),
            RuntimeError::ReadOnlyProperty(_) => error_body(StatusCode::METHOD_NOT_ALLOWED, &message, None),
            RuntimeError::InvalidValue(result) | RuntimeError::InvalidInput(result) => {
                error_body(StatusCode::BAD_REQUEST, &message, Some(&result.violations))
            }
            RuntimeError::MissingInput => {
                let violation = Violation {
                    path: String::new(),
                    rule: "required".into(),
                    detail: "the action declares an input schema but the request has no body".into(),
                };
                error_body(StatusCode::BAD_REQUEST, &message, Some(&[violation]))
            }
            RuntimeError::DuplicateThingName(_) => error_body(StatusCode::CONFLICT, &message, None),
            RuntimeError::Generation(err) => {
                error!("{err}");
                error_body(StatusCode::INTERNAL_SERVER_ERROR, &message, None)
            }
        }
    }
}

fn lookup(servient: &Servient, thing: &str) -> Result<Arc<VirtualThing>, Response> {
    servient.thing(&url_segment(thing)).cloned().ok_or_else(not_found)
}

fn is_json_content_type(headers: &HeaderMap) -> bool {
    headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.split(';').next())
        .is_some_and(|mime| mime.trim().eq_ignore_ascii_case("application/json"))
}

fn accepts_event_stream(headers: &HeaderMap) -> bool {
    headers
        .get_all(header::ACCEPT)
        .iter()
        .filter_map(|v| v.to_str().ok())
        .flat_map(|v| v.split(','))
        .filter_map(|range| range.split(';').next())
        .any(|mime| mime.trim().eq_ignore_ascii_case("text/event-stream"))
}

fn parse_body(body: &[u8]) -> Result<JsonValue, Response> {
    serde_json::from_slice(body)
        .map_err(|e| error_body(StatusCode::BAD_REQUEST, &format!("malformed JSON body: {e}"), None))
}

async fn thing_description(State(servient): State<AppState>, Path(thing): Path<String>) -> Response {
    match lookup(&servient, &thing) {
        Ok(thing) => {
            let body = td_to_json(thing.exposed_td()).to_string();
            ([(header::CONTENT_TYPE, TD_CONTENT_TYPE)], body).into_response()
        }
        Err(resp) => resp,
    }
}

async fn read_all_properties(State(servient): State<AppState>, Path(thing): Path<String>) -> Response {
    let thing = match lookup(&servient, &thing) {
        Ok(thing) => thing,
        Err(resp) => return resp,
    };
    match thing.read_all_properties() {
        Ok(values) => Json(JsonValue::Object(values)).into_response(),
        Err(err) => ApiError(err).into_response(),
    }
}

async fn read_property(
    State(servient): State<AppState>,
    Path((thing, name)): Path<(String, String)>,
) -> Response {
    let thing = match lookup(&servient, &thing) {
        Ok(thing) => thing,
        Err(resp) => return resp,
    };
    match thing.read_property(&name) {
        Ok(value) => Json(value).into_response(),
        Err(err) => ApiError(err).into_response(),
    }
}

async fn write_property(
    State(servient): State<AppState>,
    Path((thing, name)): Path<(String, String)>,
    headers: HeaderMap,
    body: Bytes,
) -> Response {
    let thing = match lookup(&servient, &thing) {
        Ok(thing) => thing,
        Err(resp) => return resp,
    };
    if !thing.original_td().properties.contains_key(&name) {
        return ApiError(RuntimeError::UnknownProperty(name)).into_response();
    }
    if !is_json_content_type(&headers) {
        return error_body(StatusCode::UNSUPPORTED_MEDIA_TYPE, "expected content type application/json", None);
    }
    let value = match parse_body(&body) {
        Ok(value) => value,
        Err(resp) => return resp,
    };
    match thing.write_property(&name, value) {
        Ok(()) => {
            debug!(thing = thing.title(), property = %name, "written");
            StatusCode::NO_CONTENT.into_response()
        }
        Err(err) => ApiError(err).into_response(),
    }
}

async fn invoke_action(
    State(servient): State<AppState>,
    Path((thing, name)): Path<(String, String)>,
    body: Bytes,
) -> Response {
    let thing = match lookup(&servient, &thing) {
        Ok(thing) => thing,
        Err(resp) => return resp,
    };
    let input = if body.iter().all(u8::is_ascii_whitespace) {
        None
    } else {
        match parse_body(&body) {
            Ok(value) => Some(value),
            Err(resp) => return resp,
        }
    };
    match thing.invoke_action(&name, input) {
        Ok(Some(output)) => Json(output).into_response(),
        Ok(None) => StatusCode::NO_CONTENT.into_response(),
        Err(err) => ApiError(err).into_response(),
    }
}

async fn subscribe_event(
    State(servient): State<AppState>,
    Path((thing, name)): Path<(String, String)>,
    headers: HeaderMap,
) -> Response {
    let thing = match lookup(&servient, &thing) {
        Ok(thing) => thing,
        Err(resp) => return resp,
    };
    if !thing.original_td().events.contains_key(&name) {
        return ApiError(RuntimeError::UnknownEvent(name)).into_response();
    }
    if !accepts_event_stream(&headers) {
        return error_body(StatusCode::NOT_ACCEPTABLE, "event subscriptions require Accept: text/event-stream", None);
    }
    let subscription = match thing.subscribe_event(&name) {
        Ok(sub) => sub,
        Err(err) => return ApiError(err).into_response(),
    };
    debug!(thing = thing.title(), event = %name, "subscriber connected");
    let stream = subscription
        .into_stream()
        .map(|payload| Ok::<_, Infallible>(Event::default().data(payload.to_string())));
    Sse::new(stream).into_response()
}
