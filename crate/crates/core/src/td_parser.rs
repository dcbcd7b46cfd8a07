//! Thing Description parsing and serialization.

use indexmap::IndexMap;
use serde_json::Map;
use tracing::warn;

use crate::json::{parse_with_duplicates, pointer_token, JsonValue};
use crate::td_model::{
    ActionAffordance, DataSchema, EmptySections, EventAffordance, Form, PropertyAffordance,
    SchemaBoundsError, SchemaType, ThingDescription,
};

/// Media type of a serialized Thing Description.
pub const TD_CONTENT_TYPE: &str = "application/td+json";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TdError {
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("top-level value is not a JSON object")]
    NotAnObject,
    #[error("missing or empty \"title\"")]
    MissingTitle,
    #[error(transparent)]
    InvalidSchemaBounds(#[from] SchemaBoundsError),
    #[error("type mismatch at {path}: expected {expected}")]
    TypeMismatch { path: String, expected: &'static str },
}

/// A non-fatal finding while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub path: String,
    pub message: String,
}

/// Parses a TD document. Warnings are logged.
pub fn parse_td(text: &str) -> Result<ThingDescription, TdError> {
    let (td, warnings) = parse_td_with_warnings(text)?;
    for w in &warnings {
        warn!(path = %w.path, "{}", w.message);
    }
    Ok(td)
}

/// Parses a TD document and returns the warnings instead of logging them.
pub fn parse_td_with_warnings(text: &str) -> Result<(ThingDescription, Vec<ParseWarning>), TdError> {
    let (value, duplicates) =
        parse_with_duplicates(text).map_err(|e| TdError::MalformedJson(e.to_string()))?;
    let mut warnings: Vec<ParseWarning> = duplicates
        .into_iter()
        .map(|path| ParseWarning { path, message: "duplicate key, last occurrence wins".into() })
        .collect();
    let td = td_from_json(value, &mut warnings)?;
    Ok((td, warnings))
}

/// Builds a TD from an already parsed JSON document.
pub fn td_from_json(
    value: JsonValue,
    warnings: &mut Vec<ParseWarning>,
) -> Result<ThingDescription, TdError> {
    let JsonValue::Object(mut doc) = value else {
        return Err(TdError::NotAnObject);
    };
    let title = match doc.get("title") {
        Some(JsonValue::String(s)) if !s.is_empty() => s.clone(),
        _ => return Err(TdError::MissingTitle),
    };
    for required in ["@context", "security"] {
        if !doc.contains_key(required) {
            warnings.push(ParseWarning {
                path: format!("/{required}"),
                message: format!("missing \"{required}\""),
            });
        }
    }

    let mut td = ThingDescription::new(title);
    td.id = optional_string(&doc, "id")?;
    td.description = optional_string(&doc, "description")?;
    td.base = optional_string(&doc, "base")?;
    td.context = doc.get("@context").cloned();
    td.security = doc.get("security").cloned();
    td.security_definitions = doc.get("securityDefinitions").cloned();

    let mut empty = EmptySections::default();
    if let Some(section) = doc.get("properties") {
        for (name, raw) in section_entries(section, "/properties")? {
            let path = format!("/properties/{}", pointer_token(&name));
            td.properties.insert(name, parse_property(raw, &path, warnings)?);
        }
        empty.properties = td.properties.is_empty();
    }
    if let Some(section) = doc.get("actions") {
        for (name, raw) in section_entries(section, "/actions")? {
            let path = format!("/actions/{}", pointer_token(&name));
            td.actions.insert(name, parse_action(raw, &path, warnings)?);
        }
        empty.actions = td.actions.is_empty();
    }
    if let Some(section) = doc.get("events") {
        for (name, raw) in section_entries(section, "/events")? {
            let path = format!("/events/{}", pointer_token(&name));
            td.events.insert(name, parse_event(raw, &path, warnings)?);
        }
        empty.events = td.events.is_empty();
    }
    td.empty_sections = empty;

    for known in KNOWN_MEMBERS {
        doc.shift_remove(*known);
    }
    td.extra = doc;
    Ok(td)
}

const KNOWN_MEMBERS: &[&str] = &[
    "@context",
    "id",
    "title",
    "description",
    "security",
    "securityDefinitions",
    "base",
    "properties",
    "actions",
    "events",
];

fn optional_string(doc: &Map<String, JsonValue>, key: &str) -> Result<Option<String>, TdError> {
    match doc.get(key) {
        None => Ok(None),
        Some(JsonValue::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(mismatch(format!("/{key}"), "string")),
    }
}

fn mismatch(path: String, expected: &'static str) -> TdError {
    TdError::TypeMismatch { path, expected }
}

fn section_entries(section: &JsonValue, path: &str) -> Result<Vec<(String, JsonValue)>, TdError> {
    let JsonValue::Object(map) = section else {
        return Err(mismatch(path.to_owned(), "object"));
    };
    map.iter()
        .map(|(name, raw)| {
            if raw.is_object() {
                Ok((name.clone(), raw.clone()))
            } else {
                Err(mismatch(format!("{path}/{}", pointer_token(name)), "object"))
            }
        })
        .collect()
}

fn parse_property(
    raw: JsonValue,
    path: &str,
    warnings: &mut Vec<ParseWarning>,
) -> Result<PropertyAffordance, TdError> {
    let data_schema = extract_at(&raw, path, warnings)?;
    Ok(PropertyAffordance {
        data_schema,
        read_only: optional_bool(&raw, "readOnly", path)?.unwrap_or(false),
        observable: optional_bool(&raw, "observable", path)?.unwrap_or(false),
        forms: parse_forms(&raw, path)?,
        raw,
    })
}

fn parse_action(
    raw: JsonValue,
    path: &str,
    warnings: &mut Vec<ParseWarning>,
) -> Result<ActionAffordance, TdError> {
    Ok(ActionAffordance {
        input: nested_schema(&raw, "input", path, warnings)?,
        output: nested_schema(&raw, "output", path, warnings)?,
        forms: parse_forms(&raw, path)?,
        raw,
    })
}

fn parse_event(
    raw: JsonValue,
    path: &str,
    warnings: &mut Vec<ParseWarning>,
) -> Result<EventAffordance, TdError> {
    Ok(EventAffordance {
        data: nested_schema(&raw, "data", path, warnings)?,
        forms: parse_forms(&raw, path)?,
        raw,
    })
}

fn nested_schema(
    raw: &JsonValue,
    key: &str,
    path: &str,
    warnings: &mut Vec<ParseWarning>,
) -> Result<Option<DataSchema>, TdError> {
    match raw.get(key) {
        None => Ok(None),
        Some(schema) => extract_at(schema, &format!("{path}/{key}"), warnings).map(Some),
    }
}

fn optional_bool(raw: &JsonValue, key: &str, path: &str) -> Result<Option<bool>, TdError> {
    match raw.get(key) {
        None => Ok(None),
        Some(JsonValue::Bool(b)) => Ok(Some(*b)),
        Some(_) => Err(mismatch(format!("{path}/{key}"), "boolean")),
    }
}

fn parse_forms(raw: &JsonValue, path: &str) -> Result<Vec<Form>, TdError> {
    let Some(forms) = raw.get("forms") else {
        return Ok(Vec::new());
    };
    let JsonValue::Array(forms) = forms else {
        return Err(mismatch(format!("{path}/forms"), "array"));
    };
    forms
        .iter()
        .enumerate()
        .map(|(i, form)| {
            let at = format!("{path}/forms/{i}");
            let href = match form.get("href") {
                Some(JsonValue::String(h)) if !h.is_empty() => h.clone(),
                _ => return Err(mismatch(format!("{at}/href"), "non-empty string")),
            };
            let content_type = match form.get("contentType") {
                None => None,
                Some(JsonValue::String(ct)) => Some(ct.clone()),
                Some(_) => return Err(mismatch(format!("{at}/contentType"), "string")),
            };
            let op = match form.get("op") {
                None => None,
                Some(JsonValue::String(op)) => Some(vec![op.clone()]),
                Some(JsonValue::Array(ops)) => Some(
                    ops.iter()
                        .map(|op| op.as_str().map(str::to_owned))
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(|| mismatch(format!("{at}/op"), "string or array of strings"))?,
                ),
                Some(_) => return Err(mismatch(format!("{at}/op"), "string or array of strings")),
            };
            Ok(Form { href, content_type, op })
        })
        .collect()
}

/// Extracts the generation-relevant schema keywords of an affordance (or of an
/// `input`/`output`/`data` member). Every other member is ignored.
pub fn extract_schema(affordance: &JsonValue) -> Result<DataSchema, TdError> {
    let mut warnings = Vec::new();
    let schema = extract_at(affordance, "", &mut warnings)?;
    for w in &warnings {
        warn!(path = %w.path, "{}", w.message);
    }
    Ok(schema)
}

fn extract_at(
    value: &JsonValue,
    path: &str,
    warnings: &mut Vec<ParseWarning>,
) -> Result<DataSchema, TdError> {
    let schema = extract_unchecked(value, path, warnings)?;
    schema.check().map_err(|mut e| {
        e.path = format!("{path}{}", e.path);
        TdError::InvalidSchemaBounds(e)
    })?;
    Ok(schema)
}

fn extract_unchecked(
    value: &JsonValue,
    path: &str,
    warnings: &mut Vec<ParseWarning>,
) -> Result<DataSchema, TdError> {
    let JsonValue::Object(obj) = value else {
        return Err(mismatch(path.to_owned(), "object"));
    };
    let at = |key: &str| format!("{path}/{key}");
    let mut schema = DataSchema::default();

    if let Some(t) = obj.get("type") {
        let name = t.as_str().ok_or_else(|| mismatch(at("type"), "type name string"))?;
        schema.schema_type =
            Some(SchemaType::from_name(name).ok_or_else(|| mismatch(at("type"), "JSON Schema type name"))?);
    }
    if let Some(e) = obj.get("enum") {
        let values = e.as_array().ok_or_else(|| mismatch(at("enum"), "array"))?;
        schema.enum_values = Some(values.clone());
    }
    schema.const_value = obj.get("const").cloned();
    if let Some(branches) = obj.get("oneOf") {
        let branches = branches.as_array().ok_or_else(|| mismatch(at("oneOf"), "array"))?;
        schema.one_of = Some(
            branches
                .iter()
                .enumerate()
                .map(|(i, b)| extract_unchecked(b, &format!("{path}/oneOf/{i}"), warnings))
                .collect::<Result<_, _>>()?,
        );
    }
    schema.minimum = number_member(obj, "minimum", path)?;
    schema.maximum = number_member(obj, "maximum", path)?;
    if let Some(items) = obj.get("items") {
        schema.items = Some(Box::new(extract_unchecked(items, &at("items"), warnings)?));
    }
    schema.min_items = count_member(obj, "minItems", path)?;
    schema.max_items = count_member(obj, "maxItems", path)?;
    if let Some(props) = obj.get("properties") {
        let props = props.as_object().ok_or_else(|| mismatch(at("properties"), "object"))?;
        let mut out = IndexMap::new();
        for (name, sub) in props {
            let sub_path = format!("{path}/properties/{}", pointer_token(name));
            out.insert(name.clone(), extract_unchecked(sub, &sub_path, warnings)?);
        }
        schema.properties = Some(out);
    }
    if let Some(required) = obj.get("required") {
        let names = required
            .as_array()
            .and_then(|r| r.iter().map(|n| n.as_str().map(str::to_owned)).collect::<Option<Vec<_>>>())
            .ok_or_else(|| mismatch(at("required"), "array of strings"))?;
        for name in &names {
            if !schema.properties.as_ref().is_some_and(|p| p.contains_key(name)) {
                warnings.push(ParseWarning {
                    path: at("required"),
                    message: format!("required member \"{name}\" is not declared in properties"),
                });
            }
        }
        schema.required = Some(names);
    }
    Ok(schema)
}

fn number_member(obj: &Map<String, JsonValue>, key: &str, path: &str) -> Result<Option<f64>, TdError> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v.as_f64().map(Some).ok_or_else(|| mismatch(format!("{path}/{key}"), "number")),
    }
}

fn count_member(obj: &Map<String, JsonValue>, key: &str, path: &str) -> Result<Option<u64>, TdError> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => {
            let count = v.as_u64().or_else(|| {
                v.as_f64().filter(|f| *f >= 0.0 && f.fract() == 0.0 && *f < 1e15).map(|f| f as u64)
            });
            count.map(Some).ok_or_else(|| mismatch(format!("{path}/{key}"), "non-negative integer"))
        }
    }
}

/// Serializes a TD to its JSON document form.
///
/// Member order: `@context`, `id`, `title`, `description`, `security`,
/// `securityDefinitions`, `base`, `properties`, `actions`, `events`, then the
/// unrecognized members in their original order.
pub fn td_to_json(td: &ThingDescription) -> JsonValue {
    let mut out = Map::new();
    if let Some(ctx) = &td.context {
        out.insert("@context".into(), ctx.clone());
    }
    if let Some(id) = &td.id {
        out.insert("id".into(), id.clone().into());
    }
    out.insert("title".into(), td.title.clone().into());
    if let Some(description) = &td.description {
        out.insert("description".into(), description.clone().into());
    }
    if let Some(security) = &td.security {
        out.insert("security".into(), security.clone());
    }
    if let Some(defs) = &td.security_definitions {
        out.insert("securityDefinitions".into(), defs.clone());
    }
    if let Some(base) = &td.base {
        out.insert("base".into(), base.clone().into());
    }
    if !td.properties.is_empty() || td.empty_sections.properties {
        let section = td.properties.iter().map(|(k, p)| (k.clone(), p.raw.clone())).collect();
        out.insert("properties".into(), JsonValue::Object(section));
    }
    if !td.actions.is_empty() || td.empty_sections.actions {
        let section = td.actions.iter().map(|(k, a)| (k.clone(), a.raw.clone())).collect();
        out.insert("actions".into(), JsonValue::Object(section));
    }
    if !td.events.is_empty() || td.empty_sections.events {
        let section = td.events.iter().map(|(k, e)| (k.clone(), e.raw.clone())).collect();
        out.insert("events".into(), JsonValue::Object(section));
    }
    for (key, value) in &td.extra {
        out.entry(key.clone()).or_insert_with(|| value.clone());
    }
    JsonValue::Object(out)
}

/// Serializes a TD as pretty-printed JSON text.
pub fn serialize_td(td: &ThingDescription) -> String {
    serde_json::to_string_pretty(&td_to_json(td)).expect("JSON values always serialize")
}
