use serde::Serialize;

use crate::json::{json_eq, pointer_token, JsonValue};
use crate::td_model::{DataSchema, SchemaType};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// JSON pointer to the offending value; `""` is the root.
    pub path: String,
    /// Keyword that failed, e.g. `"enum"` or `"maximum"`.
    pub rule: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationResult {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidationResult {
    fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationResult { valid: violations.is_empty(), violations }
    }

    pub fn rules(&self) -> Vec<&str> {
        self.violations.iter().map(|v| v.rule.as_str()).collect()
    }
}

/// Validates `value` against every keyword of `schema`. Keywords that do not
/// apply to the value's JSON type are skipped, so an empty schema accepts
/// anything.
pub fn validate(schema: &DataSchema, value: &JsonValue) -> ValidationResult {
    let mut violations = Vec::new();
    check(schema, value, "", &mut violations);
    ValidationResult::from_violations(violations)
}

pub(crate) fn conforms(schema: &DataSchema, value: &JsonValue) -> bool {
    let mut violations = Vec::new();
    check(schema, value, "", &mut violations);
    violations.is_empty()
}

fn type_matches(expected: SchemaType, value: &JsonValue) -> bool {
    match (expected, value) {
        (SchemaType::Null, JsonValue::Null) => true,
        (SchemaType::Boolean, JsonValue::Bool(_)) => true,
        (SchemaType::Number, JsonValue::Number(_)) => true,
        (SchemaType::Integer, JsonValue::Number(n)) => {
            n.is_i64() || n.is_u64() || n.as_f64().is_some_and(|f| f.fract() == 0.0)
        }
        (SchemaType::String, JsonValue::String(_)) => true,
        (SchemaType::Array, JsonValue::Array(_)) => true,
        (SchemaType::Object, JsonValue::Object(_)) => true,
        _ => false,
    }
}

fn type_name(value: &JsonValue) -> &'static str {
    match value {
        JsonValue::Null => "null",
        JsonValue::Bool(_) => "boolean",
        JsonValue::Number(_) => "number",
        JsonValue::String(_) => "string",
        JsonValue::Array(_) => "array",
        JsonValue::Object(_) => "object",
    }
}

fn check(schema: &DataSchema, value: &JsonValue, path: &str, out: &mut Vec<Violation>) {
    let mut fail = |rule: &str, detail: String| {
        out.push(Violation { path: path.to_owned(), rule: rule.to_owned(), detail })
    };

    if let Some(expected) = schema.schema_type {
        if !type_matches(expected, value) {
            fail("type", format!("expected {}, found {}", expected.as_str(), type_name(value)));
        }
    }
    if let Some(values) = &schema.enum_values {
        if !values.iter().any(|v| json_eq(v, value)) {
            fail("enum", format!("{value} is not one of {}", JsonValue::Array(values.clone())));
        }
    }
    if let Some(expected) = &schema.const_value {
        if !json_eq(expected, value) {
            fail("const", format!("expected {expected}, found {value}"));
        }
    }
    if let Some(branches) = &schema.one_of {
        if !branches.iter().any(|b| conforms(b, value)) {
            fail("oneOf", format!("matches none of {} branches", branches.len()));
        }
    }
    if let Some(n) = value.as_f64() {
        if let Some(lo) = schema.minimum.filter(|lo| n < *lo) {
            fail("minimum", format!("{value} is less than {lo}"));
        }
        if let Some(hi) = schema.maximum.filter(|hi| n > *hi) {
            fail("maximum", format!("{value} is greater than {hi}"));
        }
    }
    match value {
        JsonValue::Array(elements) => {
            let len = elements.len() as u64;
            if let Some(min) = schema.min_items.filter(|min| len < *min) {
                fail("minItems", format!("{len} items, at least {min} required"));
            }
            if let Some(max) = schema.max_items.filter(|max| len > *max) {
                fail("maxItems", format!("{len} items, at most {max} allowed"));
            }
            if let Some(items) = &schema.items {
                for (i, element) in elements.iter().enumerate() {
                    check(items, element, &format!("{path}/{i}"), out);
                }
            }
        }
        JsonValue::Object(members) => {
            for name in schema.required.iter().flatten() {
                if !members.contains_key(name) {
                    out.push(Violation {
                        path: path.to_owned(),
                        rule: "required".into(),
                        detail: format!("missing member \"{name}\""),
                    });
                }
            }
            for (name, sub) in schema.properties.iter().flatten() {
                if let Some(member) = members.get(name) {
                    check(sub, member, &format!("{path}/{}", pointer_token(name)), out);
                }
            }
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::td_parser::extract_schema;
    use serde_json::json;

    fn schema(v: JsonValue) -> DataSchema {
        extract_schema(&v).unwrap()
    }

    #[test]
    fn enum_membership() {
        let state = schema(json!({"type": "string", "enum": ["Ready", "Brewing", "Error"]}));
        assert!(validate(&state, &json!("Brewing")).valid);
        let r = validate(&state, &json!("Espresso"));
        assert!(!r.valid);
        assert_eq!(r.violations.len(), 1);
        assert_eq!((r.violations[0].path.as_str(), r.violations[0].rule.as_str()), ("", "enum"));
    }

    #[test]
    fn wrong_type_reports_type_and_enum() {
        let brew = schema(json!({"type": "string", "enum": ["espresso", "cappuccino"]}));
        assert!(validate(&brew, &json!("cappuccino")).valid);
        assert_eq!(validate(&brew, &json!(7)).rules(), ["type", "enum"]);
    }

    #[test]
    fn inclusive_integer_bounds() {
        let s = schema(json!({"type": "integer", "minimum": 0, "maximum": 10}));
        assert!(validate(&s, &json!(10)).valid);
        assert!(validate(&s, &json!(0)).valid);
        assert!(validate(&s, &json!(10.0)).valid);
        assert_eq!(validate(&s, &json!(10.5)).rules(), ["type", "maximum"]);
        assert_eq!(validate(&s, &json!(9.5)).rules(), ["type"]);
        assert_eq!(validate(&s, &json!(11)).rules(), ["maximum"]);
        assert_eq!(validate(&s, &json!(-1)).rules(), ["minimum"]);
    }

    #[test]
    fn empty_schema_accepts_everything() {
        for v in [json!(null), json!(true), json!(1.5), json!("x"), json!([1]), json!({"a": {}})] {
            assert!(validate(&DataSchema::default(), &v).valid);
        }
    }

    #[test]
    fn const_uses_numeric_equality() {
        let s = schema(json!({"const": 42}));
        assert!(validate(&s, &json!(42.0)).valid);
        assert_eq!(validate(&s, &json!(43)).rules(), ["const"]);
    }

    #[test]
    fn one_of_needs_any_branch() {
        let s = schema(json!({"oneOf": [{"type": "integer"}, {"type": "number", "minimum": 0}]}));
        // 3 matches both branches; any-match semantics accept it.
        assert!(validate(&s, &json!(3)).valid);
        assert!(validate(&s, &json!(0.5)).valid);
        assert_eq!(validate(&s, &json!(-0.5)).rules(), ["oneOf"]);
    }

    #[test]
    fn arrays_report_element_paths() {
        let s = schema(json!({
            "type": "array",
            "items": {"type": "integer", "minimum": 1, "maximum": 3},
            "minItems": 2,
            "maxItems": 2
        }));
        assert!(validate(&s, &json!([1, 3])).valid);
        let r = validate(&s, &json!([1, 4, "x"]));
        let got: Vec<_> = r.violations.iter().map(|v| (v.path.as_str(), v.rule.as_str())).collect();
        assert_eq!(got, [("", "maxItems"), ("/1", "maximum"), ("/2", "type")]);
        assert_eq!(validate(&s, &json!([])).rules(), ["minItems"]);
    }

    #[test]
    fn objects_check_required_and_present_members() {
        let s = schema(json!({
            "type": "object",
            "properties": {"a/b": {"type": "boolean"}, "n": {"type": "number"}},
            "required": ["n"]
        }));
        assert!(validate(&s, &json!({"n": 1, "extra": "ok"})).valid);
        let r = validate(&s, &json!({"a/b": 1}));
        let got: Vec<_> = r.violations.iter().map(|v| (v.path.as_str(), v.rule.as_str())).collect();
        assert_eq!(got, [("", "required"), ("/a~1b", "type")]);
    }

    #[test]
    fn type_specific_keywords_skip_other_types() {
        let s = schema(json!({"minimum": 5, "minItems": 2, "required": ["x"]}));
        assert!(validate(&s, &json!("text")).valid);
        assert!(!validate(&s, &json!(4)).valid);
        assert!(!validate(&s, &json!([1])).valid);
        assert!(!validate(&s, &json!({})).valid);
    }
}
