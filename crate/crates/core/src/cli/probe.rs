//! `probe`: consume a Thing Description the way a client would and check
//! every response against the declared schemas.

use std::fmt;
use std::time::Duration;

use futures::StreamExt;
use reqwest::{Client, StatusCode};
use serde::Serialize;
use url::Url;

use crate::json::{json_eq, JsonValue};
use crate::schema_gen::{generate, validate, RandomSource};
use crate::td_model::{Affordance, AffordanceKind, DataSchema, ThingDescription};
use crate::td_parser::parse_td;

const REQUEST_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, Clone)]
pub struct ProbeOptions {
    /// How long each event is observed.
    pub duration: Duration,
    pub seed: Option<u64>,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions { duration: Duration::from_secs(10), seed: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResult {
    pub affordance: String,
    pub kind: &'static str,
    pub result: Outcome,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbeReport {
    pub results: Vec<ProbeResult>,
}

impl ProbeReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.result == Outcome::Pass)
    }

    /// 0 when everything passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for ProbeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.results.iter().map(|r| r.affordance.len()).max().unwrap_or(0).max(10);
        writeln!(f, "{:<8}  {:<width$}  {:<6}  DETAIL", "KIND", "AFFORDANCE", "RESULT")?;
        for r in &self.results {
            let result = match r.result {
                Outcome::Pass => "PASS",
                Outcome::Fail => "FAIL",
            };
            writeln!(f, "{:<8}  {:<width$}  {:<6}  {}", r.kind, r.affordance, result, r.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProbeError {
    #[error("target unreachable: {0}")]
    Unreachable(String),
    #[error("cannot load Thing Description: {0}")]
    InvalidTd(String),
}

impl ProbeError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Loads the TD from a URL or file and exercises every affordance.
pub async fn probe(target: &str, options: &ProbeOptions) -> Result<ProbeReport, ProbeError> {
    let client = Client::builder()
        .timeout(REQUEST_TIMEOUT)
        .build()
        .map_err(|e| ProbeError::Unreachable(e.to_string()))?;
    let (td, origin) = load_td(&client, target).await?;
    Ok(probe_td(&client, &td, origin.as_ref(), options).await)
}

async fn load_td(client: &Client, target: &str) -> Result<(ThingDescription, Option<Url>), ProbeError> {
    if target.starts_with("http://") || target.starts_with("https://") {
        let url = Url::parse(target).map_err(|e| ProbeError::Unreachable(format!("{target}: {e}")))?;
        let response = client
            .get(url.clone())
            .header(reqwest::header::ACCEPT, "application/td+json, application/json")
            .send()
            .await
            .map_err(|e| ProbeError::Unreachable(format!("{target}: {e}")))?;
        if !response.status().is_success() {
            return Err(ProbeError::Unreachable(format!("{target}: HTTP {}", response.status())));
        }
        let text = response.text().await.map_err(|e| ProbeError::Unreachable(e.to_string()))?;
        let td = parse_td(&text).map_err(|e| ProbeError::InvalidTd(e.to_string()))?;
        Ok((td, Some(url)))
    } else {
        let text = std::fs::read_to_string(target).map_err(|e| ProbeError::Unreachable(format!("{target}: {e}")))?;
        let td = parse_td(&text).map_err(|e| ProbeError::InvalidTd(e.to_string()))?;
        Ok((td, None))
    }
}

/// Absolute URL of an affordance's first form, resolved against `base` and
/// then the URL the TD was fetched from.
fn resolve_href(td: &ThingDescription, origin: Option<&Url>, affordance: &dyn Affordance) -> Result<Url, String> {
    let href = &affordance.forms().first().ok_or("no form")?.href;
    if let Ok(url) = Url::parse(href) {
        return Ok(url);
    }
    let base = match (&td.base, origin) {
        (Some(base), _) => Url::parse(base).map_err(|e| format!("invalid base {base}: {e}"))?,
        (None, Some(origin)) => origin.clone(),
        (None, None) => return Err(format!("relative href {href} without base")),
    };
    base.join(href).map_err(|e| format!("cannot resolve {href}: {e}"))
}

async fn probe_td(
    client: &Client,
    td: &ThingDescription,
    origin: Option<&Url>,
    options: &ProbeOptions,
) -> ProbeReport {
    let mut rng = options.seed.map(RandomSource::new).unwrap_or_else(RandomSource::from_entropy);
    let mut results = Vec::new();
    let record = |name: &str, kind: AffordanceKind, outcome: Result<String, String>| ProbeResult {
        affordance: name.to_owned(),
        kind: kind.label(),
        result: if outcome.is_ok() { Outcome::Pass } else { Outcome::Fail },
        detail: outcome.unwrap_or_else(|e| e),
    };

    for (name, property) in &td.properties {
        let outcome = match resolve_href(td, origin, property) {
            Ok(url) => check_property(client, &url, &property.data_schema, property.read_only, &mut rng).await,
            Err(e) => Err(e),
        };
        results.push(record(name, AffordanceKind::Property, outcome));
    }
    for (name, action) in &td.actions {
        let outcome = match resolve_href(td, origin, action) {
            Ok(url) => check_action(client, &url, action.input.as_ref(), action.output.as_ref(), &mut rng).await,
            Err(e) => Err(e),
        };
        results.push(record(name, AffordanceKind::Action, outcome));
    }

    // Event streams outlive the per-request timeout.
    let stream_client = Client::builder().connect_timeout(REQUEST_TIMEOUT).build().unwrap_or_default();
    let stream_client = &stream_client;
    let event_checks = td.events.iter().map(|(name, event)| {
        let url = resolve_href(td, origin, event);
        let schema = event.data.clone().unwrap_or_default();
        async move {
            let outcome = match url {
                Ok(url) => check_event(stream_client, &url, &schema, options.duration).await,
                Err(e) => Err(e),
            };
            (name, outcome)
        }
    });
    for (name, outcome) in futures::future::join_all(event_checks).await {
        results.push(record(name, AffordanceKind::Event, outcome));
    }
    ProbeReport { results }
}

fn check_value(schema: &DataSchema, value: &JsonValue) -> Result<(), String> {
    let result = validate(schema, value);
    if result.valid {
        return Ok(());
    }
    let rules: Vec<String> = result
        .violations
        .iter()
        .map(|v| format!("{} at \"{}\": {}", v.rule, v.path, v.detail))
        .collect();
    Err(format!("{value} violates schema ({})", rules.join("; ")))
}

async fn get_json(client: &Client, url: &Url) -> Result<JsonValue, String> {
    let response = client.get(url.clone()).send().await.map_err(|e| format!("GET failed: {e}"))?;
    let status = response.status();
    if status != StatusCode::OK {
        return Err(format!("GET returned {status}"));
    }
    response.json().await.map_err(|e| format!("GET body is not JSON: {e}"))
}

async fn check_property(
    client: &Client,
    url: &Url,
    schema: &DataSchema,
    read_only: bool,
    rng: &mut RandomSource,
) -> Result<String, String> {
    let value = get_json(client, url).await?;
    check_value(schema, &value)?;
    if read_only {
        return Ok("read ok (read-only)".into());
    }
    let written = generate(schema, rng, 0).map_err(|e| format!("cannot generate a value to write: {e}"))?;
    let response = client
        .put(url.clone())
        .json(&written)
        .send()
        .await
        .map_err(|e| format!("PUT failed: {e}"))?;
    match response.status() {
        StatusCode::METHOD_NOT_ALLOWED => return Ok("read ok, write rejected as read-only".into()),
        status if status.is_success() => {}
        status => return Err(format!("PUT {written} returned {status}")),
    }
    let reread = get_json(client, url).await?;
    if !json_eq(&reread, &written) {
        return Err(format!("wrote {written} but read back {reread}"));
    }
    Ok("read ok, write persisted".into())
}

async fn check_action(
    client: &Client,
    url: &Url,
    input: Option<&DataSchema>,
    output: Option<&DataSchema>,
    rng: &mut RandomSource,
) -> Result<String, String> {
    let mut request = client.post(url.clone());
    if let Some(schema) = input {
        let value = generate(schema, rng, 0).map_err(|e| format!("cannot generate input: {e}"))?;
        request = request.json(&value);
    }
    let response = request.send().await.map_err(|e| format!("POST failed: {e}"))?;
    let status = response.status();
    if !status.is_success() {
        return Err(format!("POST returned {status}"));
    }
    match output {
        None => Ok(format!("invoked ({status})")),
        Some(schema) => {
            if status != StatusCode::OK {
                return Err(format!("expected output but got {status}"));
            }
            let value: JsonValue = response.json().await.map_err(|e| format!("output is not JSON: {e}"))?;
            check_value(schema, &value)?;
            Ok("invoked, output conforms".into())
        }
    }
}

/// Splits complete SSE messages off the front of `buffer` and returns their
/// `data` fields.
fn drain_sse_messages(buffer: &mut String) -> Vec<String> {
    let mut messages = Vec::new();
    loop {
        let normalized = buffer.replace("\r\n", "\n");
        let Some(end) = normalized.find("\n\n") else {
            *buffer = normalized;
            return messages;
        };
        let block = &normalized[..end];
        let data: Vec<&str> = block
            .lines()
            .filter_map(|line| line.strip_prefix("data:"))
            .map(|d| d.strip_prefix(' ').unwrap_or(d))
            .collect();
        if !data.is_empty() {
            messages.push(data.join("\n"));
        }
        *buffer = normalized[end + 2..].to_owned();
    }
}

async fn check_event(client: &Client, url: &Url, schema: &DataSchema, duration: Duration) -> Result<String, String> {
    let response = client
        .get(url.clone())
        .header(reqwest::header::ACCEPT, "text/event-stream")
        .send()
        .await
        .map_err(|e| format!("subscribe failed: {e}"))?;
    if response.status() != StatusCode::OK {
        return Err(format!("subscribe returned {}", response.status()));
    }
    let mut body = response.bytes_stream();
    let mut buffer = String::new();
    let mut received = 0usize;
    let deadline = tokio::time::sleep(duration);
    tokio::pin!(deadline);
    loop {
        tokio::select! {
            _ = &mut deadline => break,
            chunk = body.next() => match chunk {
                Some(Ok(bytes)) => {
                    buffer.push_str(&String::from_utf8_lossy(&bytes));
                    for data in drain_sse_messages(&mut buffer) {
                        let value: JsonValue = serde_json::from_str(&data)
                            .map_err(|e| format!("event payload is not JSON ({e}): {data}"))?;
                        check_value(schema, &value)?;
                        received += 1;
                    }
                }
                Some(Err(e)) => return Err(format!("stream error: {e}")),
                None => break,
            },
        }
    }
    Ok(match received {
        0 => format!("subscribed, no emissions within {:.1}s", duration.as_secs_f64()),
        n => format!("{n} emissions conform"),
    })
}
