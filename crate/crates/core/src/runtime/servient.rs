use std::sync::{Arc, Mutex};

use indexmap::IndexMap;
use tokio::task::JoinHandle;
use tracing::info;

use super::interval::EventConfig;
use super::rewrite::url_segment;
use super::scheduler::{Clock, EventScheduler};
use super::thing::VirtualThing;
use super::RuntimeError;
use crate::schema_gen::RandomSource;
use crate::td_model::ThingDescription;

/// Hosts any number of virtual things below one base URL.
///
/// Thing `i` (in attach order) draws request data from ChaCha stream `2i` and
/// event data from stream `2i + 1` of the servient seed, so a fixed seed
/// reproduces the same values for the same request sequence.
#[derive(Debug)]
pub struct Servient {
    base_url: String,
    seed: u64,
    events: EventConfig,
    things: IndexMap<String, Arc<VirtualThing>>,
    tasks: Mutex<Vec<JoinHandle<()>>>,
}

impl Servient {
    /// `seed` of `None` picks one from system entropy.
    pub fn new(base_url: &str, seed: Option<u64>, events: EventConfig) -> Self {
        Servient {
            base_url: base_url.trim_end_matches('/').to_owned(),
            seed: seed.unwrap_or_else(rand::random),
            events,
            things: IndexMap::new(),
            tasks: Mutex::new(Vec::new()),
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn event_config(&self) -> &EventConfig {
        &self.events
    }

    /// Creates a virtual thing for `td` and attaches it under its title.
    pub fn create_virtual_thing(&mut self, td: ThingDescription) -> Result<Arc<VirtualThing>, RuntimeError> {
        let segment = url_segment(&td.title);
        if self.things.contains_key(&segment) {
            return Err(RuntimeError::DuplicateThingName(td.title));
        }
        let stream = 2 * self.things.len() as u64;
        let rng = RandomSource::new(self.seed).fork(stream);
        let thing = Arc::new(VirtualThing::new(td, &self.base_url, rng));
        self.things.insert(segment, thing.clone());
        Ok(thing)
    }

    pub fn thing(&self, segment: &str) -> Option<&Arc<VirtualThing>> {
        self.things.get(segment)
    }

    pub fn things(&self) -> impl Iterator<Item = &Arc<VirtualThing>> {
        self.things.values()
    }

    /// Spawns one scheduler task per thing. Must be called inside a tokio runtime.
    pub fn start_events(&self, clock: Arc<dyn Clock>) {
        let mut tasks = self.tasks.lock().expect("task lock poisoned");
        for (i, thing) in self.things.values().enumerate() {
            let rng = RandomSource::new(self.seed).fork(2 * i as u64 + 1);
            let scheduler = EventScheduler::new(thing.clone(), &self.events, rng, clock.now());
            for event in thing.original_td().events.keys() {
                info!(thing = thing.title(), event, mode = %self.events.mode_for(event), "event armed");
            }
            tasks.push(tokio::spawn(scheduler.run(clock.clone())));
        }
    }

    /// Stops the schedulers and closes every event subscription.
    pub fn stop_events(&self) {
        for task in self.tasks.lock().expect("task lock poisoned").drain(..) {
            task.abort();
        }
        for thing in self.things.values() {
            thing.close_subscriptions();
        }
    }
}

impl Drop for Servient {
    fn drop(&mut self) {
        if let Ok(tasks) = self.tasks.get_mut() {
            tasks.drain(..).for_each(|t| t.abort());
        }
    }
}
