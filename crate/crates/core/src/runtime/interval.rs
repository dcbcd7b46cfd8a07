//! Event emission interval policies.
//!
//! Each policy decides the gap before the next emission of an event. Policies
//! are registered by name in an [`IntervalRegistry`] and selected at runtime
//! from a `name[:argument]` string such as `none`, `random` or `fixed:2.5`.

use std::fmt;
use std::sync::Arc;
use std::time::Duration;

use indexmap::IndexMap;
use rand::Rng;

use crate::schema_gen::RandomSource;

/// Lower and upper bound, in seconds, of the random emission interval.
pub const RANDOM_INTERVAL_SECS: (f64, f64) = (5.0, 60.0);

pub trait IntervalPolicy: Send + Sync + fmt::Debug {
    /// Registry name and argument, e.g. `fixed:2`.
    fn describe(&self) -> String;

    /// Gap before the next emission, or `None` to stop emitting.
    fn next_gap(&self, rng: &mut RandomSource) -> Option<Duration>;
}

/// Never emits.
#[derive(Debug, Clone, Copy, Default)]
pub struct Silent;

impl IntervalPolicy for Silent {
    fn describe(&self) -> String {
        "none".into()
    }

    fn next_gap(&self, _rng: &mut RandomSource) -> Option<Duration> {
        None
    }
}

/// Uniform gap in `[5, 60]` seconds, drawn again after every emission.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomInterval;

impl IntervalPolicy for RandomInterval {
    fn describe(&self) -> String {
        "random".into()
    }

    fn next_gap(&self, rng: &mut RandomSource) -> Option<Duration> {
        let (lo, hi) = RANDOM_INTERVAL_SECS;
        Some(Duration::from_secs_f64(rng.random_range(lo..=hi)))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FixedInterval {
    seconds: f64,
}

impl FixedInterval {
    pub fn new(seconds: f64) -> Result<Self, ModeError> {
        if seconds.is_finite() && seconds > 0.0 {
            Ok(FixedInterval { seconds })
        } else {
            Err(ModeError::InvalidArgument {
                mode: "fixed".into(),
                detail: format!("interval must be a positive number of seconds, got {seconds}"),
            })
        }
    }

    pub fn seconds(&self) -> f64 {
        self.seconds
    }
}

impl IntervalPolicy for FixedInterval {
    fn describe(&self) -> String {
        format!("fixed:{}", self.seconds)
    }

    fn next_gap(&self, _rng: &mut RandomSource) -> Option<Duration> {
        Some(Duration::from_secs_f64(self.seconds))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModeError {
    #[error("unknown event mode \"{0}\"")]
    Unknown(String),
    #[error("invalid argument for event mode \"{mode}\": {detail}")]
    InvalidArgument { mode: String, detail: String },
}

type Factory = fn(Option<&str>) -> Result<Arc<dyn IntervalPolicy>, ModeError>;

/// Named constructors for interval policies.
pub struct IntervalRegistry {
    factories: IndexMap<&'static str, Factory>,
}

impl IntervalRegistry {
    pub fn empty() -> Self {
        IntervalRegistry { factories: IndexMap::new() }
    }

    /// Registry holding `none`, `random` and `fixed:SECONDS`.
    pub fn builtin() -> Self {
        let mut registry = Self::empty();
        registry.register("none", |arg| {
            no_argument("none", arg)?;
            Ok(Arc::new(Silent))
        });
        registry.register("random", |arg| {
            no_argument("random", arg)?;
            Ok(Arc::new(RandomInterval))
        });
        registry.register("fixed", |arg| {
            let arg = arg.ok_or_else(|| ModeError::InvalidArgument {
                mode: "fixed".into(),
                detail: "expected fixed:SECONDS".into(),
            })?;
            let seconds: f64 = arg.trim().parse().map_err(|_| ModeError::InvalidArgument {
                mode: "fixed".into(),
                detail: format!("\"{arg}\" is not a number"),
            })?;
            Ok(Arc::new(FixedInterval::new(seconds)?))
        });
        registry
    }

    pub fn register(&mut self, name: &'static str, factory: Factory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    /// Builds a policy from `name` or `name:argument`.
    pub fn build(&self, spec: &str) -> Result<EventMode, ModeError> {
        let (name, arg) = match spec.split_once(':') {
            Some((name, arg)) => (name, Some(arg)),
            None => (spec, None),
        };
        let factory = self.factories.get(name).ok_or_else(|| ModeError::Unknown(name.to_owned()))?;
        factory(arg).map(EventMode)
    }
}

fn no_argument(mode: &str, arg: Option<&str>) -> Result<(), ModeError> {
    match arg {
        None => Ok(()),
        Some(arg) => Err(ModeError::InvalidArgument {
            mode: mode.into(),
            detail: format!("takes no argument, got \"{arg}\""),
        }),
    }
}

/// How an event is emitted: a shared handle to an [`IntervalPolicy`].
#[derive(Debug, Clone)]
pub struct EventMode(Arc<dyn IntervalPolicy>);

impl EventMode {
    pub fn none() -> Self {
        EventMode(Arc::new(Silent))
    }

    pub fn random() -> Self {
        EventMode(Arc::new(RandomInterval))
    }

    pub fn fixed(seconds: f64) -> Result<Self, ModeError> {
        Ok(EventMode(Arc::new(FixedInterval::new(seconds)?)))
    }

    pub fn from_policy(policy: Arc<dyn IntervalPolicy>) -> Self {
        EventMode(policy)
    }

    /// Parses a mode with the builtin registry.
    pub fn parse(spec: &str) -> Result<Self, ModeError> {
        IntervalRegistry::builtin().build(spec)
    }

    pub fn policy(&self) -> &Arc<dyn IntervalPolicy> {
        &self.0
    }

    pub fn next_gap(&self, rng: &mut RandomSource) -> Option<Duration> {
        self.0.next_gap(rng)
    }
}

impl PartialEq for EventMode {
    fn eq(&self, other: &Self) -> bool {
        self.0.describe() == other.0.describe()
    }
}

impl Default for EventMode {
    fn default() -> Self {
        EventMode::random()
    }
}

impl fmt::Display for EventMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.describe())
    }
}

/// Default mode plus per-event overrides.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventConfig {
    pub default: EventMode,
    pub overrides: IndexMap<String, EventMode>,
}

impl EventConfig {
    pub fn uniform(mode: EventMode) -> Self {
        EventConfig { default: mode, overrides: IndexMap::new() }
    }

    pub fn mode_for(&self, event: &str) -> &EventMode {
        self.overrides.get(event).unwrap_or(&self.default)
    }
}
