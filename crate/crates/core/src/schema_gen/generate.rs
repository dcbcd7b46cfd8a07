use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde_json::Map;
use tracing::warn;

use super::random::RandomSource;
use super::validate::conforms;
use crate::json::{number_from_f64, pointer_token, JsonValue};
use crate::td_model::{DataSchema, SchemaType};

/// Nesting depth at which generation switches to the smallest conforming shape.
pub const DEPTH_CAP: usize = 8;

const INTEGER_RANGE: (f64, f64) = (-128.0, 127.0);
const NUMBER_RANGE: (f64, f64) = (-100.0, 100.0);
const ONE_SIDED_SPAN: f64 = 256.0;
const STRING_LEN: (usize, usize) = (4, 16);
const ARRAY_EXTRA_LEN: u64 = 5;
const MAX_SAFE_INTEGER: f64 = 9_007_199_254_740_991.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenerateError {
    #[error("unsatisfiable schema at {path}: {detail}")]
    Unsatisfiable { path: String, detail: String },
}

/// Generates a random value conforming to `schema`.
///
/// Keyword precedence is `const`, then `enum`, then `oneOf`, then `type`.
/// `depth` is the nesting level of `schema` within the value being built and
/// starts at 0.
pub fn generate(
    schema: &DataSchema,
    rng: &mut RandomSource,
    depth: usize,
) -> Result<JsonValue, GenerateError> {
    gen_at(schema, rng, depth, "")
}

fn unsatisfiable(path: &str, detail: impl Into<String>) -> GenerateError {
    GenerateError::Unsatisfiable { path: path.to_owned(), detail: detail.into() }
}

fn gen_at(
    schema: &DataSchema,
    rng: &mut RandomSource,
    depth: usize,
    path: &str,
) -> Result<JsonValue, GenerateError> {
    if let Some(value) = &schema.const_value {
        return if conforms(schema, value) {
            Ok(value.clone())
        } else {
            Err(unsatisfiable(path, "const value violates the other keywords"))
        };
    }
    if let Some(values) = &schema.enum_values {
        let candidates: Vec<&JsonValue> = values.iter().filter(|v| conforms(schema, v)).collect();
        return candidates
            .choose(rng)
            .map(|v| (*v).clone())
            .ok_or_else(|| unsatisfiable(path, "no enum member satisfies the other keywords"));
    }
    if let Some(branches) = &schema.one_of {
        return gen_one_of(schema, branches, rng, depth, path);
    }
    match effective_type(schema) {
        Some(t) => gen_typed(schema, t, rng, depth, path),
        None => {
            warn!(path, "schema has no type, enum, const or oneOf; generating null");
            Ok(JsonValue::Null)
        }
    }
}

fn effective_type(schema: &DataSchema) -> Option<SchemaType> {
    schema.schema_type.or_else(|| {
        (schema.minimum.is_some() || schema.maximum.is_some()).then_some(SchemaType::Number)
    })
}

fn gen_one_of(
    schema: &DataSchema,
    branches: &[DataSchema],
    rng: &mut RandomSource,
    depth: usize,
    path: &str,
) -> Result<JsonValue, GenerateError> {
    let mut order: Vec<usize> = (0..branches.len()).collect();
    if depth >= DEPTH_CAP {
        order.sort_by_key(|&i| branches[i].nesting());
    } else {
        order.shuffle(rng);
    }
    for i in order {
        if let Ok(value) = gen_at(&branches[i], rng, depth, &format!("{path}/oneOf/{i}")) {
            if conforms(schema, &value) {
                return Ok(value);
            }
        }
    }
    Err(unsatisfiable(path, "no oneOf branch yields a value satisfying the schema"))
}

fn gen_typed(
    schema: &DataSchema,
    schema_type: SchemaType,
    rng: &mut RandomSource,
    depth: usize,
    path: &str,
) -> Result<JsonValue, GenerateError> {
    Ok(match schema_type {
        SchemaType::Null => JsonValue::Null,
        SchemaType::Boolean => JsonValue::Bool(rng.random_bool(0.5)),
        SchemaType::Integer => gen_integer(schema, rng, path)?,
        SchemaType::Number => gen_number(schema, rng),
        SchemaType::String => {
            let len = rng.random_range(STRING_LEN.0..=STRING_LEN.1);
            let s: String = (0..len).map(|_| rng.random_range(b'a'..=b'z') as char).collect();
            JsonValue::String(s)
        }
        SchemaType::Array => gen_array(schema, rng, depth, path)?,
        SchemaType::Object => gen_object(schema, rng, depth, path)?,
    })
}

/// Inclusive range for a numeric schema, filling absent bounds from defaults.
fn numeric_range(schema: &DataSchema, defaults: (f64, f64)) -> (f64, f64) {
    let (floor, ceiling) = INTEGER_RANGE;
    match (schema.minimum, schema.maximum) {
        (Some(lo), Some(hi)) => (lo, hi),
        (None, None) => defaults,
        (Some(lo), None) => {
            let hi = ceiling.min(lo + ONE_SIDED_SPAN);
            (lo, if hi >= lo { hi } else { lo + ONE_SIDED_SPAN })
        }
        (None, Some(hi)) => {
            let lo = floor.max(hi - ONE_SIDED_SPAN);
            (if lo <= hi { lo } else { hi - ONE_SIDED_SPAN }, hi)
        }
    }
}

fn gen_integer(schema: &DataSchema, rng: &mut RandomSource, path: &str) -> Result<JsonValue, GenerateError> {
    let (lo, hi) = numeric_range(schema, INTEGER_RANGE);
    let lo = lo.ceil().max(-MAX_SAFE_INTEGER);
    let hi = hi.floor().min(MAX_SAFE_INTEGER);
    if lo > hi {
        return Err(unsatisfiable(path, "no integer lies within minimum and maximum"));
    }
    Ok(JsonValue::from(rng.random_range(lo as i64..=hi as i64)))
}

fn gen_number(schema: &DataSchema, rng: &mut RandomSource) -> JsonValue {
    let (lo, hi) = numeric_range(schema, NUMBER_RANGE);
    let value = if lo >= hi {
        lo
    } else {
        let raw: f64 = rng.random_range(lo..=hi);
        ((raw * 1e6).round() / 1e6).clamp(lo, hi)
    };
    number_from_f64(value).expect("bounds are finite")
}

fn gen_array(
    schema: &DataSchema,
    rng: &mut RandomSource,
    depth: usize,
    path: &str,
) -> Result<JsonValue, GenerateError> {
    let min = schema.min_items.unwrap_or(0);
    let len = if depth >= DEPTH_CAP {
        min
    } else {
        let max = schema.max_items.map_or(min + ARRAY_EXTRA_LEN, |m| m.min(min + ARRAY_EXTRA_LEN));
        rng.random_range(min..=max)
    };
    let any = DataSchema::default();
    let items = schema.items.as_deref().unwrap_or(&any);
    (0..len)
        .map(|i| gen_at(items, rng, depth + 1, &format!("{path}/{i}")))
        .collect::<Result<Vec<_>, _>>()
        .map(JsonValue::Array)
}

fn gen_object(
    schema: &DataSchema,
    rng: &mut RandomSource,
    depth: usize,
    path: &str,
) -> Result<JsonValue, GenerateError> {
    let required = schema.required.as_deref().unwrap_or(&[]);
    let mut out = Map::new();
    for (name, sub) in schema.properties.iter().flatten() {
        if depth >= DEPTH_CAP && !required.contains(name) {
            continue;
        }
        let sub_path = format!("{path}/{}", pointer_token(name));
        out.insert(name.clone(), gen_at(sub, rng, depth + 1, &sub_path)?);
    }
    for name in required {
        out.entry(name.clone()).or_insert(JsonValue::Null);
    }
    Ok(JsonValue::Object(out))
}
