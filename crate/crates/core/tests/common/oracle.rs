//! Independent checks: a brute-force enumerator of finite schemas, a generic
//! JSON differ, and a structured random schema generator.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

/// Equality with numbers compared by value.
pub fn same(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => x.as_f64() == y.as_f64(),
        (Value::Array(x), Value::Array(y)) => x.len() == y.len() && x.iter().zip(y).all(|(a, b)| same(a, b)),
        (Value::Object(x), Value::Object(y)) => {
            x.len() == y.len() && x.iter().all(|(k, v)| y.get(k).is_some_and(|w| same(v, w)))
        }
        _ => a == b,
    }
}

pub fn contains(set: &[Value], v: &Value) -> bool {
    set.iter().any(|m| same(m, v))
}

fn matches_type(t: &str, v: &Value) -> bool {
    match t {
        "null" => v.is_null(),
        "boolean" => v.is_boolean(),
        "integer" => v.as_f64().is_some_and(|f| f.fract() == 0.0),
        "number" => v.is_number(),
        "string" => v.is_string(),
        "array" => v.is_array(),
        "object" => v.is_object(),
        _ => false,
    }
}

/// Every value conforming to a finite schema, written out by hand-rolled
/// enumeration over the schema JSON. Supports `enum`, `const`, `oneOf`,
/// `boolean`, `null`, bounded `integer` ranges and arrays of those.
pub fn enumerate(schema: &Value) -> Vec<Value> {
    let mut out: Vec<Value> = Vec::new();
    let push = |out: &mut Vec<Value>, v: Value| {
        if !contains(out, &v) {
            out.push(v)
        }
    };
    let ty = schema.get("type").and_then(Value::as_str);
    let candidates: Vec<Value> = if let Some(c) = schema.get("const") {
        vec![c.clone()]
    } else if let Some(e) = schema.get("enum") {
        e.as_array().unwrap().clone()
    } else if let Some(branches) = schema.get("oneOf") {
        branches.as_array().unwrap().iter().flat_map(enumerate).collect()
    } else {
        match ty.expect("finite schema needs a type") {
            "null" => vec![Value::Null],
            "boolean" => vec![json!(false), json!(true)],
            "integer" => {
                let lo = schema["minimum"].as_f64().unwrap().ceil() as i64;
                let hi = schema["maximum"].as_f64().unwrap().floor() as i64;
                assert!(hi - lo <= 20);
                (lo..=hi).map(Value::from).collect()
            }
            "array" => {
                let items = enumerate(&schema["items"]);
                let min = schema.get("minItems").and_then(Value::as_u64).unwrap_or(0) as usize;
                let max = schema["maxItems"].as_u64().unwrap() as usize;
                assert!(max <= 3);
                let mut all = Vec::new();
                let mut layer: Vec<Vec<Value>> = vec![vec![]];
                for len in 0..=max {
                    if len >= min {
                        all.extend(layer.iter().cloned().map(Value::Array));
                    }
                    layer = layer
                        .iter()
                        .flat_map(|prefix| {
                            items.iter().map(move |i| {
                                let mut next = prefix.clone();
                                next.push(i.clone());
                                next
                            })
                        })
                        .collect();
                }
                all
            }
            other => panic!("not enumerable: {other}"),
        }
    };
    for v in candidates {
        let typed = ty.is_none_or(|t| matches_type(t, &v));
        let lo = schema.get("minimum").and_then(Value::as_f64);
        let hi = schema.get("maximum").and_then(Value::as_f64);
        let bounded = v.as_f64().is_none_or(|n| lo.is_none_or(|l| n >= l) && hi.is_none_or(|h| n <= h));
        // const/enum/oneOf candidates must also satisfy the array keywords of
        // the surrounding schema, if any.
        let shaped = match (&v, schema.get("items")) {
            (Value::Array(xs), Some(items)) if schema.get("type").is_none() => {
                let allowed = enumerate(items);
                xs.iter().all(|x| contains(&allowed, x))
            }
            _ => true,
        };
        if typed && bounded && shaped {
            push(&mut out, v);
        }
    }
    out
}

/// Finitely enumerable schemas: small enums, consts, narrow integer ranges,
/// and arrays of at most three of those.
pub fn finite_fixtures() -> Vec<Value> {
    vec![
        json!({"type": "string", "enum": ["Ready", "Brewing", "Error"]}),
        json!({"type": "string", "enum": ["espresso", "cappuccino"]}),
        json!({"enum": [1, "one", null, true, [1], {"a": 1}, 2.5, "x", false, 0]}),
        json!({"type": "integer", "enum": [1, 2, "3", 4.5, 5]}),
        json!({"const": 42}),
        json!({"const": {"nested": [1, "two", null]}}),
        json!({"type": "boolean"}),
        json!({"type": "null"}),
        json!({"type": "integer", "minimum": 0, "maximum": 10}),
        json!({"type": "integer", "minimum": -10, "maximum": 10}),
        json!({"type": "integer", "minimum": 0.5, "maximum": 7.5}),
        json!({"type": "integer", "minimum": 5, "maximum": 5}),
        json!({"oneOf": [{"type": "boolean"}, {"type": "integer", "minimum": 1, "maximum": 3}]}),
        json!({"type": "array", "items": {"type": "integer", "minimum": 0, "maximum": 1}, "minItems": 2, "maxItems": 2}),
        json!({"type": "array", "items": {"type": "integer", "minimum": 1, "maximum": 3}, "maxItems": 3}),
        json!({"type": "array", "items": {"type": "string", "enum": ["a", "b", "c"]}, "minItems": 1, "maxItems": 3}),
        json!({"type": "array", "items": {"type": "boolean"}, "maxItems": 3}),
        json!({"type": "array", "items": {"const": "x"}, "minItems": 0, "maxItems": 1}),
        json!({"type": "array", "items": {"oneOf": [{"type": "null"}, {"enum": [7, 8]}]}, "minItems": 1, "maxItems": 2}),
    ]
}

pub fn random_scalar(rng: &mut ChaCha8Rng) -> Value {
    match rng.random_range(0..6) {
        0 => Value::Null,
        1 => json!(rng.random_bool(0.5)),
        2 => json!(rng.random_range(-12i64..=12)),
        3 => json!((rng.random_range(-200..=200) as f64) / 8.0),
        4 => json!(["a", "b", "c", "x", "Ready", "Espresso", "latte", "1"].choose(rng).unwrap()),
        _ => json!(rng.random_range(0u64..100)),
    }
}

pub fn random_value(rng: &mut ChaCha8Rng, depth: usize) -> Value {
    if depth == 0 || rng.random_bool(0.6) {
        return random_scalar(rng);
    }
    if rng.random_bool(0.5) {
        Value::Array((0..rng.random_range(0..5)).map(|_| random_value(rng, depth - 1)).collect())
    } else {
        let mut m = Map::new();
        for _ in 0..rng.random_range(0..4) {
            m.insert(["a", "b", "nested", "x"].choose(rng).unwrap().to_string(), random_value(rng, depth - 1));
        }
        Value::Object(m)
    }
}

/// A value near `member`: perturbed, extended, truncated or retyped.
pub fn mutate(rng: &mut ChaCha8Rng, member: &Value) -> Value {
    match member {
        Value::Number(n) if rng.random_bool(0.7) => {
            let f = n.as_f64().unwrap();
            match rng.random_range(0..4) {
                0 => json!(f + 1.0),
                1 => json!(f - 1.0),
                2 => json!(f + 0.5),
                _ => json!(f.to_string()),
            }
        }
        Value::String(s) if rng.random_bool(0.7) => match rng.random_range(0..3) {
            0 => json!(format!("{s}x")),
            1 => json!(s.to_uppercase()),
            _ => json!(s.len()),
        },
        Value::Array(xs) if rng.random_bool(0.7) => {
            let mut xs = xs.clone();
            match rng.random_range(0..3) {
                0 => xs.push(random_scalar(rng)),
                1 if !xs.is_empty() => {
                    let i = rng.random_range(0..xs.len());
                    xs[i] = mutate(rng, &xs[i].clone());
                }
                _ => {
                    xs.pop();
                }
            }
            Value::Array(xs)
        }
        _ => random_value(rng, 2),
    }
}

/// JSON pointers of every location where `a` and `b` differ.
pub fn json_diff(a: &Value, b: &Value) -> Vec<String> {
    fn walk(a: &Value, b: &Value, path: String, out: &mut Vec<String>) {
        match (a, b) {
            (Value::Object(x), Value::Object(y)) => {
                for key in x.keys().chain(y.keys().filter(|k| !x.contains_key(*k))) {
                    let sub = format!("{path}/{}", key.replace('~', "~0").replace('/', "~1"));
                    match (x.get(key), y.get(key)) {
                        (Some(u), Some(v)) => walk(u, v, sub, out),
                        _ => out.push(sub),
                    }
                }
            }
            (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
                for (i, (u, v)) in x.iter().zip(y).enumerate() {
                    walk(u, v, format!("{path}/{i}"), out);
                }
            }
            _ if a == b => {}
            _ => out.push(path),
        }
    }
    let mut out = Vec::new();
    walk(a, b, String::new(), &mut out);
    out
}

/// True for `/base` and anything at or below `/<section>/<name>/forms`.
pub fn is_rewritable_path(path: &str) -> bool {
    if path == "/base" {
        return true;
    }
    let parts: Vec<&str> = path.split('/').collect();
    parts.len() >= 4
        && parts[0].is_empty()
        && ["properties", "actions", "events"].contains(&parts[1])
        && parts[3] == "forms"
}

/// A random satisfiable schema over type/enum/const/oneOf, numeric bounds,
/// items/minItems/maxItems and properties/required, nested at most `depth`
/// levels.
pub fn random_schema(rng: &mut ChaCha8Rng, depth: usize) -> Value {
    let composite = if depth == 0 { 0 } else { 3 };
    match rng.random_range(0..12 + composite) {
        0 => json!({}),
        1 => json!({"type": "null"}),
        2 => json!({"type": "boolean"}),
        3 => random_integer(rng),
        4 => random_number(rng),
        5 => json!({"type": "string"}),
        6 => {
            let n = rng.random_range(1..=6);
            let values: Vec<String> = (0..n).map(|i| format!("v{i}_{}", rng.random_range(0..100))).collect();
            json!({"type": "string", "enum": values})
        }
        7 => {
            // Mixed-type enum with at least one conforming member.
            let mut s = random_integer(rng);
            let min = s.get("minimum").and_then(Value::as_f64);
            let max = s.get("maximum").and_then(Value::as_f64);
            let member = match (min, max) {
                (Some(lo), _) => lo.ceil() as i64,
                (None, Some(hi)) => hi.floor() as i64,
                (None, None) => rng.random_range(-5i64..5),
            };
            let mut values = vec![json!(member), json!("nope"), json!(null)];
            if rng.random_bool(0.5) {
                values.push(json!(member as f64 + 0.5));
            }
            s["enum"] = json!(values);
            s
        }
        8 => {
            let value = random_value(rng, 2);
            if rng.random_bool(0.5) {
                json!({"const": value})
            } else {
                let ty = match &value {
                    Value::Null => "null",
                    Value::Bool(_) => "boolean",
                    Value::Number(_) => "number",
                    Value::String(_) => "string",
                    Value::Array(_) => "array",
                    Value::Object(_) => "object",
                };
                json!({"type": ty, "const": value})
            }
        }
        9 => {
            let n = rng.random_range(1..=5);
            json!({"enum": (0..n).map(|_| random_value(rng, 1)).collect::<Vec<_>>()})
        }
        10 => {
            let lo = rng.random_range(-500.0..500.0f64);
            match rng.random_range(0..3) {
                0 => json!({"minimum": lo}),
                1 => json!({"maximum": lo}),
                _ => json!({"minimum": lo, "maximum": lo + rng.random_range(0.0..10.0)}),
            }
        }
        11 => json!({"type": "integer", "minimum": rng.random_range(-3000i64..3000)}),
        12 => {
            let mut s = json!({"type": "array"});
            if rng.random_bool(0.8) {
                s["items"] = random_schema(rng, depth - 1);
            }
            let min = rng.random_range(0u64..3);
            match rng.random_range(0..4) {
                0 => s["minItems"] = json!(min),
                1 => s["maxItems"] = json!(min + rng.random_range(0..3)),
                2 => {
                    s["minItems"] = json!(min);
                    s["maxItems"] = json!(min + rng.random_range(0..3));
                }
                _ => {}
            }
            s
        }
        13 => {
            let n = rng.random_range(0..4);
            let mut props = Map::new();
            for i in 0..n {
                props.insert(format!("p{i}"), random_schema(rng, depth - 1));
            }
            let mut required: Vec<String> = props.keys().filter(|_| rng.random_bool(0.5)).cloned().collect();
            if rng.random_bool(0.2) {
                required.push("undeclared".into());
            }
            let mut s = json!({"type": "object", "properties": props});
            if !required.is_empty() {
                s["required"] = json!(required);
            }
            s
        }
        _ => {
            let n = rng.random_range(1..=3);
            json!({"oneOf": (0..n).map(|_| random_schema(rng, depth - 1)).collect::<Vec<_>>()})
        }
    }
}

fn random_integer(rng: &mut ChaCha8Rng) -> Value {
    let lo = rng.random_range(-1000i64..1000);
    let hi = lo + rng.random_range(0..50);
    match rng.random_range(0..5) {
        0 => json!({"type": "integer"}),
        1 => json!({"type": "integer", "minimum": lo}),
        2 => json!({"type": "integer", "maximum": hi}),
        3 => json!({"type": "integer", "minimum": lo as f64 - 0.25, "maximum": hi as f64 + 0.75}),
        _ => json!({"type": "integer", "minimum": lo, "maximum": hi}),
    }
}

fn random_number(rng: &mut ChaCha8Rng) -> Value {
    let lo = rng.random_range(-1000.0..1000.0f64);
    let hi = lo + rng.random_range(0.0..100.0);
    match rng.random_range(0..4) {
        0 => json!({"type": "number"}),
        1 => json!({"type": "number", "minimum": lo}),
        2 => json!({"type": "number", "maximum": hi}),
        _ => json!({"type": "number", "minimum": lo, "maximum": hi}),
    }
}

/// Nesting depth of schema JSON, counting items/properties/oneOf levels.
pub fn schema_depth(schema: &Value) -> usize {
    let mut children: Vec<&Value> = Vec::new();
    if let Some(items) = schema.get("items") {
        children.push(items);
    }
    if let Some(Value::Object(props)) = schema.get("properties") {
        children.extend(props.values());
    }
    if let Some(Value::Array(branches)) = schema.get("oneOf") {
        children.extend(branches);
    }
    children.into_iter().map(|c| 1 + schema_depth(c)).max().unwrap_or(0)
}
