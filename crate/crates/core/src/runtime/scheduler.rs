//! Clock-driven event emission.
//!
//! [`EventScheduler`] is a plain state machine over an abstract timeline: it
//! knows when each event is next due and fires everything due up to a given
//! instant. [`EventScheduler::run`] drives it from a [`Clock`] on tokio.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use tracing::{debug, warn};

use super::interval::{EventConfig, EventMode};
use super::thing::VirtualThing;
use crate::json::JsonValue;
use crate::schema_gen::RandomSource;

/// Monotonic time since an arbitrary origin.
pub trait Clock: Send + Sync + fmt::Debug {
    fn now(&self) -> Duration;
}

/// Tokio's clock, so paused-time tests advance it automatically.
#[derive(Debug, Clone, Copy)]
pub struct TokioClock {
    origin: tokio::time::Instant,
}

impl TokioClock {
    pub fn new() -> Self {
        TokioClock { origin: tokio::time::Instant::now() }
    }
}

impl Default for TokioClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for TokioClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }
}

/// A clock that only moves when told to.
#[derive(Debug, Default)]
pub struct ManualClock {
    nanos: AtomicU64,
}

impl ManualClock {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn advance(&self, by: Duration) {
        self.nanos.fetch_add(by.as_nanos() as u64, Ordering::SeqCst);
    }

    pub fn set(&self, to: Duration) {
        self.nanos.store(to.as_nanos() as u64, Ordering::SeqCst);
    }
}

impl Clock for ManualClock {
    fn now(&self) -> Duration {
        Duration::from_nanos(self.nanos.load(Ordering::SeqCst))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Emission {
    pub event: String,
    pub at: Duration,
    pub payload: JsonValue,
}

#[derive(Debug)]
struct Slot {
    event: String,
    mode: EventMode,
    next_due: Option<Duration>,
}

#[derive(Debug)]
pub struct EventScheduler {
    thing: Arc<VirtualThing>,
    slots: Vec<Slot>,
    rng: RandomSource,
}

impl EventScheduler {
    /// Arms every event of `thing` relative to `now`.
    pub fn new(thing: Arc<VirtualThing>, config: &EventConfig, mut rng: RandomSource, now: Duration) -> Self {
        let slots = thing
            .original_td()
            .events
            .keys()
            .map(|event| {
                let mode = config.mode_for(event).clone();
                let next_due = mode.next_gap(&mut rng).map(|gap| now + gap);
                Slot { event: event.clone(), mode, next_due }
            })
            .collect();
        EventScheduler { thing, slots, rng }
    }

    /// Earliest pending emission time.
    pub fn next_deadline(&self) -> Option<Duration> {
        self.slots.iter().filter_map(|s| s.next_due).min()
    }

    /// Fires every emission due at or before `now`, in time order.
    pub fn advance_to(&mut self, now: Duration) -> Vec<Emission> {
        let mut fired = Vec::new();
        loop {
            let next = self
                .slots
                .iter()
                .enumerate()
                .filter_map(|(i, s)| s.next_due.map(|due| (due, i)))
                .filter(|(due, _)| *due <= now)
                .min();
            match next {
                Some((_, i)) => fired.extend(self.emit_cycle(i)),
                None => return fired,
            }
        }
    }

    /// Emits slot `index` at its due time and schedules the following
    /// emission one gap later.
    fn emit_cycle(&mut self, index: usize) -> Option<Emission> {
        let slot = &mut self.slots[index];
        let at = slot.next_due?;
        slot.next_due = slot.mode.next_gap(&mut self.rng).map(|gap| at + gap);
        match self.thing.publish_event(&slot.event, &mut self.rng) {
            Ok(payload) => {
                debug!(thing = self.thing.title(), event = %slot.event, "emitted");
                Some(Emission { event: slot.event.clone(), at, payload })
            }
            Err(err) => {
                warn!(thing = self.thing.title(), event = %slot.event, "emission failed: {err}");
                None
            }
        }
    }

    /// Drives the scheduler until no emission is pending.
    pub async fn run(mut self, clock: Arc<dyn Clock>) {
        while let Some(due) = self.next_deadline() {
            let now = clock.now();
            if due > now {
                tokio::time::sleep(due - now).await;
            }
            self.advance_to(clock.now().max(due));
        }
    }
}
