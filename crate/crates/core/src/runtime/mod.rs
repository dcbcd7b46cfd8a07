//! The virtual thing runtime: property state, action dispatch, event
//! scheduling and TD rewriting.

mod interval;
mod rewrite;
mod scheduler;
mod servient;
mod thing;

pub use interval::{
    EventConfig, EventMode, FixedInterval, IntervalPolicy, IntervalRegistry, ModeError, RandomInterval,
    Silent, RANDOM_INTERVAL_SECS,
};
pub use rewrite::{affordance_href, rewrite_td, url_segment};
pub use scheduler::{Clock, Emission, EventScheduler, ManualClock, TokioClock};
pub use servient::Servient;
pub use thing::{Subscription, VirtualThing};

use crate::schema_gen::{GenerateError, ValidationResult};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RuntimeError {
    #[error("unknown property \"{0}\"")]
    UnknownProperty(String),
    #[error("unknown action \"{0}\"")]
    UnknownAction(String),
    #[error("unknown event \"{0}\"")]
    UnknownEvent(String),
    #[error("property \"{0}\" is read-only")]
    ReadOnlyProperty(String),
    #[error("value does not conform to the property schema")]
    InvalidValue(ValidationResult),
    #[error("action requires an input")]
    MissingInput,
    #[error("input does not conform to the action input schema")]
    InvalidInput(ValidationResult),
    #[error("a thing titled \"{0}\" is already attached")]
    DuplicateThingName(String),
    #[error(transparent)]
    Generation(#[from] GenerateError),
}
