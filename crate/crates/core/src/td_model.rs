//! Thing Description data model.
//!
//! Affordances keep their complete original JSON object in `raw`, next to the
//! fields the virtualizer interprets. Serialization always emits `raw`, so
//! anything the model does not understand survives a parse/serialize cycle.

use indexmap::IndexMap;
use serde_json::Map;

use crate::json::JsonValue;

pub const DEFAULT_CONTENT_TYPE: &str = "application/json";

/// JSON Schema primitive type names understood by the generator and validator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemaType {
    Null,
    Boolean,
    Integer,
    Number,
    String,
    Array,
    Object,
}

impl SchemaType {
    pub const ALL: [SchemaType; 7] = [
        SchemaType::Null,
        SchemaType::Boolean,
        SchemaType::Integer,
        SchemaType::Number,
        SchemaType::String,
        SchemaType::Array,
        SchemaType::Object,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemaType::Null => "null",
            SchemaType::Boolean => "boolean",
            SchemaType::Integer => "integer",
            SchemaType::Number => "number",
            SchemaType::String => "string",
            SchemaType::Array => "array",
            SchemaType::Object => "object",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        SchemaType::ALL.into_iter().find(|t| t.as_str() == name)
    }
}

/// The subset of JSON Schema that drives data generation and validation:
/// `type`, `enum`, `const`, `oneOf`, numeric bounds, array and object shape.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DataSchema {
    pub schema_type: Option<SchemaType>,
    pub enum_values: Option<Vec<JsonValue>>,
    pub const_value: Option<JsonValue>,
    pub one_of: Option<Vec<DataSchema>>,
    pub minimum: Option<f64>,
    pub maximum: Option<f64>,
    pub items: Option<Box<DataSchema>>,
    pub min_items: Option<u64>,
    pub max_items: Option<u64>,
    pub properties: Option<IndexMap<String, DataSchema>>,
    pub required: Option<Vec<String>>,
}

/// A schema whose construction invariants do not hold.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid schema bounds at {path}: {detail}")]
pub struct SchemaBoundsError {
    pub path: String,
    pub detail: String,
}

impl DataSchema {
    pub fn of_type(schema_type: SchemaType) -> Self {
        DataSchema { schema_type: Some(schema_type), ..Default::default() }
    }

    /// True when no keyword is set.
    pub fn is_empty(&self) -> bool {
        *self == DataSchema::default()
    }

    /// Checks the construction invariants of this schema and every nested one.
    pub fn check(&self) -> Result<(), SchemaBoundsError> {
        self.check_at("")
    }

    fn check_at(&self, path: &str) -> Result<(), SchemaBoundsError> {
        let fail = |detail: String| Err(SchemaBoundsError { path: path.to_owned(), detail });
        if let (Some(lo), Some(hi)) = (self.minimum, self.maximum) {
            if lo > hi {
                return fail(format!("minimum {lo} exceeds maximum {hi}"));
            }
        }
        for bound in [self.minimum, self.maximum].into_iter().flatten() {
            if !bound.is_finite() {
                return fail("numeric bounds must be finite".into());
            }
        }
        if let (Some(lo), Some(hi)) = (self.min_items, self.max_items) {
            if lo > hi {
                return fail(format!("minItems {lo} exceeds maxItems {hi}"));
            }
        }
        if self.enum_values.as_ref().is_some_and(Vec::is_empty) {
            return fail("enum must not be empty".into());
        }
        if let Some(branches) = &self.one_of {
            if branches.is_empty() {
                return fail("oneOf must not be empty".into());
            }
            for (i, branch) in branches.iter().enumerate() {
                branch.check_at(&format!("{path}/oneOf/{i}"))?;
            }
        }
        if let Some(items) = &self.items {
            items.check_at(&format!("{path}/items"))?;
        }
        if let Some(props) = &self.properties {
            for (name, sub) in props {
                sub.check_at(&format!("{path}/properties/{}", crate::json::pointer_token(name)))?;
            }
        }
        Ok(())
    }

    /// Nesting depth of the schema tree; a schema without sub-schemas has depth 0.
    pub fn nesting(&self) -> usize {
        let items = self.items.iter().map(|s| 1 + s.nesting());
        let props = self.properties.iter().flat_map(|p| p.values()).map(|s| 1 + s.nesting());
        let branches = self.one_of.iter().flatten().map(|s| 1 + s.nesting());
        items.chain(props).chain(branches).max().unwrap_or(0)
    }

    /// Serializes the schema back to its JSON Schema form.
    pub fn to_json(&self) -> JsonValue {
        let mut out = Map::new();
        if let Some(t) = self.schema_type {
            out.insert("type".into(), t.as_str().into());
        }
        if let Some(values) = &self.enum_values {
            out.insert("enum".into(), JsonValue::Array(values.clone()));
        }
        if let Some(value) = &self.const_value {
            out.insert("const".into(), value.clone());
        }
        if let Some(branches) = &self.one_of {
            out.insert("oneOf".into(), branches.iter().map(DataSchema::to_json).collect());
        }
        if let Some(lo) = self.minimum.and_then(crate::json::number_from_f64) {
            out.insert("minimum".into(), lo);
        }
        if let Some(hi) = self.maximum.and_then(crate::json::number_from_f64) {
            out.insert("maximum".into(), hi);
        }
        if let Some(items) = &self.items {
            out.insert("items".into(), items.to_json());
        }
        if let Some(n) = self.min_items {
            out.insert("minItems".into(), n.into());
        }
        if let Some(n) = self.max_items {
            out.insert("maxItems".into(), n.into());
        }
        if let Some(props) = &self.properties {
            let props = props.iter().map(|(k, v)| (k.clone(), v.to_json())).collect();
            out.insert("properties".into(), JsonValue::Object(props));
        }
        if let Some(required) = &self.required {
            out.insert("required".into(), required.clone().into());
        }
        JsonValue::Object(out)
    }
}

/// A protocol binding entry of an affordance.
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    pub href: String,
    pub content_type: Option<String>,
    pub op: Option<Vec<String>>,
}

impl Form {
    pub fn new(href: impl Into<String>) -> Self {
        Form { href: href.into(), content_type: None, op: None }
    }

    pub fn content_type(&self) -> &str {
        self.content_type.as_deref().unwrap_or(DEFAULT_CONTENT_TYPE)
    }

    pub fn to_json(&self) -> JsonValue {
        let mut out = Map::new();
        out.insert("href".into(), self.href.clone().into());
        if let Some(ct) = &self.content_type {
            out.insert("contentType".into(), ct.clone().into());
        }
        if let Some(op) = &self.op {
            out.insert("op".into(), op.clone().into());
        }
        JsonValue::Object(out)
    }
}

/// The three kinds of interaction a Thing offers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AffordanceKind {
    Property,
    Action,
    Event,
}

impl AffordanceKind {
    /// Member name of the TD section, also the URL path segment.
    pub fn section(self) -> &'static str {
        match self {
            AffordanceKind::Property => "properties",
            AffordanceKind::Action => "actions",
            AffordanceKind::Event => "events",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AffordanceKind::Property => "property",
            AffordanceKind::Action => "action",
            AffordanceKind::Event => "event",
        }
    }
}

/// Shared surface of property, action and event affordances.
pub trait Affordance {
    fn forms(&self) -> &[Form];
    fn raw(&self) -> &JsonValue;
    /// Replaces the form list, in both the interpreted field and `raw`.
    fn replace_forms(&mut self, forms: Vec<Form>);
}

macro_rules! impl_affordance {
    ($ty:ty) => {
        impl Affordance for $ty {
            fn forms(&self) -> &[Form] {
                &self.forms
            }

            fn raw(&self) -> &JsonValue {
                &self.raw
            }

            fn replace_forms(&mut self, forms: Vec<Form>) {
                let encoded = forms.iter().map(Form::to_json).collect();
                if let JsonValue::Object(map) = &mut self.raw {
                    map.insert("forms".into(), JsonValue::Array(encoded));
                }
                self.forms = forms;
            }
        }
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyAffordance {
    pub data_schema: DataSchema,
    pub read_only: bool,
    pub observable: bool,
    pub forms: Vec<Form>,
    pub raw: JsonValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionAffordance {
    pub input: Option<DataSchema>,
    pub output: Option<DataSchema>,
    pub forms: Vec<Form>,
    pub raw: JsonValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventAffordance {
    pub data: Option<DataSchema>,
    pub forms: Vec<Form>,
    pub raw: JsonValue,
}

impl_affordance!(PropertyAffordance);
impl_affordance!(ActionAffordance);
impl_affordance!(EventAffordance);

/// Affordance sections that were present but empty in the source document,
/// so that an explicit `"properties": {}` is written back.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EmptySections {
    pub properties: bool,
    pub actions: bool,
    pub events: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThingDescription {
    pub context: Option<JsonValue>,
    pub id: Option<String>,
    pub title: String,
    pub description: Option<String>,
    pub base: Option<String>,
    pub security: Option<JsonValue>,
    pub security_definitions: Option<JsonValue>,
    pub properties: IndexMap<String, PropertyAffordance>,
    pub actions: IndexMap<String, ActionAffordance>,
    pub events: IndexMap<String, EventAffordance>,
    /// Unrecognized top-level members, verbatim and in source order.
    pub extra: Map<String, JsonValue>,
    pub empty_sections: EmptySections,
}

impl ThingDescription {
    /// A TD carrying only a title.
    pub fn new(title: impl Into<String>) -> Self {
        ThingDescription {
            context: None,
            id: None,
            title: title.into(),
            description: None,
            base: None,
            security: None,
            security_definitions: None,
            properties: IndexMap::new(),
            actions: IndexMap::new(),
            events: IndexMap::new(),
            extra: Map::new(),
            empty_sections: EmptySections::default(),
        }
    }

    /// Names of all affordances of one kind, in document order.
    pub fn names(&self, kind: AffordanceKind) -> Vec<&str> {
        match kind {
            AffordanceKind::Property => self.properties.keys().map(String::as_str).collect(),
            AffordanceKind::Action => self.actions.keys().map(String::as_str).collect(),
            AffordanceKind::Event => self.events.keys().map(String::as_str).collect(),
        }
    }
}
