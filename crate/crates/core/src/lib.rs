//! Virtualize a Web of Things device from its Thing Description.
//!
//! A [`ThingDescription`](td_model::ThingDescription) is parsed, each of its
//! properties, actions and events is served over HTTP, and every payload is
//! randomly generated to conform to the data schema declared for it.

pub mod cli;
pub mod fixtures;
pub mod http_binding;
pub mod json;
pub mod runtime;
pub mod schema_gen;
pub mod td_model;
pub mod td_parser;
