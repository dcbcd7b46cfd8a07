use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, Weak};

use futures::Stream;
use tokio::sync::mpsc;

use super::rewrite::{rewrite_td, url_segment};
use super::RuntimeError;
use crate::json::JsonValue;
use crate::schema_gen::{generate, validate, RandomSource};
use crate::td_model::ThingDescription;

/// A simulated Thing: serves random schema-conformant data for every
/// affordance of its Thing Description.
///
/// Reads and writes of a single property are serialized by a per-property
/// lock; random generation for requests goes through one shared source.
#[derive(Debug)]
pub struct VirtualThing {
    original_td: ThingDescription,
    exposed_td: ThingDescription,
    segment: String,
    base_url: String,
    property_store: HashMap<String, Mutex<Option<JsonValue>>>,
    rng: Mutex<RandomSource>,
    subscribers: Mutex<HashMap<String, HashMap<u64, mpsc::UnboundedSender<JsonValue>>>>,
    next_subscriber: AtomicU64,
}

impl VirtualThing {
    pub fn new(td: ThingDescription, base_url: &str, rng: RandomSource) -> Self {
        let base_url = base_url.trim_end_matches('/').to_owned();
        let exposed_td = rewrite_td(&td, &base_url);
        let property_store = td.properties.keys().map(|k| (k.clone(), Mutex::new(None))).collect();
        let subscribers = td.events.keys().map(|k| (k.clone(), HashMap::new())).collect();
        VirtualThing {
            segment: url_segment(&td.title),
            original_td: td,
            exposed_td,
            base_url,
            property_store,
            rng: Mutex::new(rng),
            subscribers: Mutex::new(subscribers),
            next_subscriber: AtomicU64::new(0),
        }
    }

    pub fn title(&self) -> &str {
        &self.original_td.title
    }

    /// Percent-encoded title, the first path segment of every route.
    pub fn segment(&self) -> &str {
        &self.segment
    }

    pub fn url(&self) -> String {
        format!("{}/{}", self.base_url, self.segment)
    }

    pub fn original_td(&self) -> &ThingDescription {
        &self.original_td
    }

    pub fn exposed_td(&self) -> &ThingDescription {
        &self.exposed_td
    }

    /// Returns the last written value, or a freshly generated one if the
    /// property was never written.
    pub fn read_property(&self, name: &str) -> Result<JsonValue, RuntimeError> {
        let (slot, affordance) = self.property(name)?;
        let slot = slot.lock().expect("property lock poisoned");
        if let Some(value) = slot.as_ref() {
            return Ok(value.clone());
        }
        let mut rng = self.rng.lock().expect("rng lock poisoned");
        Ok(generate(&affordance.data_schema, &mut rng, 0)?)
    }

    /// Every property, in document order.
    pub fn read_all_properties(&self) -> Result<serde_json::Map<String, JsonValue>, RuntimeError> {
        self.original_td
            .properties
            .keys()
            .map(|name| Ok((name.clone(), self.read_property(name)?)))
            .collect()
    }

    pub fn write_property(&self, name: &str, value: JsonValue) -> Result<(), RuntimeError> {
        let (slot, affordance) = self.property(name)?;
        if affordance.read_only {
            return Err(RuntimeError::ReadOnlyProperty(name.to_owned()));
        }
        let result = validate(&affordance.data_schema, &value);
        if !result.valid {
            return Err(RuntimeError::InvalidValue(result));
        }
        *slot.lock().expect("property lock poisoned") = Some(value);
        Ok(())
    }

    /// Validates the input and returns generated output, if the action declares
    /// an output schema.
    pub fn invoke_action(
        &self,
        name: &str,
        input: Option<JsonValue>,
    ) -> Result<Option<JsonValue>, RuntimeError> {
        let action = self
            .original_td
            .actions
            .get(name)
            .ok_or_else(|| RuntimeError::UnknownAction(name.to_owned()))?;
        if let Some(schema) = &action.input {
            let input = input.ok_or(RuntimeError::MissingInput)?;
            let result = validate(schema, &input);
            if !result.valid {
                return Err(RuntimeError::InvalidInput(result));
            }
        }
        match &action.output {
            None => Ok(None),
            Some(schema) => {
                let mut rng = self.rng.lock().expect("rng lock poisoned");
                Ok(Some(generate(schema, &mut rng, 0)?))
            }
        }
    }

    /// Registers a subscriber; it receives every emission from now on.
    pub fn subscribe_event(self: &Arc<Self>, name: &str) -> Result<Subscription, RuntimeError> {
        let mut subscribers = self.subscribers.lock().expect("subscriber lock poisoned");
        let set = subscribers
            .get_mut(name)
            .ok_or_else(|| RuntimeError::UnknownEvent(name.to_owned()))?;
        let id = self.next_subscriber.fetch_add(1, Ordering::Relaxed);
        let (tx, rx) = mpsc::unbounded_channel();
        set.insert(id, tx);
        Ok(Subscription { id, event: name.to_owned(), rx, thing: Arc::downgrade(self) })
    }

    pub fn subscriber_count(&self, name: &str) -> usize {
        let subscribers = self.subscribers.lock().expect("subscriber lock poisoned");
        subscribers.get(name).map_or(0, HashMap::len)
    }

    fn unsubscribe(&self, event: &str, id: u64) {
        let mut subscribers = self.subscribers.lock().expect("subscriber lock poisoned");
        if let Some(set) = subscribers.get_mut(event) {
            set.remove(&id);
        }
    }

    /// Generates one payload for `name` and delivers it to every current
    /// subscriber. A missing data schema yields `null`.
    pub fn publish_event(&self, name: &str, rng: &mut RandomSource) -> Result<JsonValue, RuntimeError> {
        let event = self
            .original_td
            .events
            .get(name)
            .ok_or_else(|| RuntimeError::UnknownEvent(name.to_owned()))?;
        let payload = match &event.data {
            Some(schema) => generate(schema, rng, 0)?,
            None => JsonValue::Null,
        };
        let mut subscribers = self.subscribers.lock().expect("subscriber lock poisoned");
        if let Some(set) = subscribers.get_mut(name) {
            set.retain(|_, tx| tx.send(payload.clone()).is_ok());
        }
        Ok(payload)
    }

    /// Drops every subscriber, ending their streams.
    pub fn close_subscriptions(&self) {
        let mut subscribers = self.subscribers.lock().expect("subscriber lock poisoned");
        subscribers.values_mut().for_each(HashMap::clear);
    }

    fn property(
        &self,
        name: &str,
    ) -> Result<(&Mutex<Option<JsonValue>>, &crate::td_model::PropertyAffordance), RuntimeError> {
        match (self.property_store.get(name), self.original_td.properties.get(name)) {
            (Some(slot), Some(affordance)) => Ok((slot, affordance)),
            _ => Err(RuntimeError::UnknownProperty(name.to_owned())),
        }
    }
}

/// Receiving end of an event subscription. Dropping it unsubscribes.
#[derive(Debug)]
pub struct Subscription {
    id: u64,
    event: String,
    rx: mpsc::UnboundedReceiver<JsonValue>,
    thing: Weak<VirtualThing>,
}

impl Subscription {
    pub fn event(&self) -> &str {
        &self.event
    }

    /// Next payload, or `None` once the subscription is closed.
    pub async fn recv(&mut self) -> Option<JsonValue> {
        self.rx.recv().await
    }

    /// Next payload if one is already queued.
    pub fn try_recv(&mut self) -> Option<JsonValue> {
        self.rx.try_recv().ok()
    }

    pub fn unsubscribe(self) {}

    pub fn into_stream(self) -> impl Stream<Item = JsonValue> + Send + 'static {
        futures::stream::unfold(self, |mut sub| async move { sub.recv().await.map(|v| (v, sub)) })
    }
}

impl Drop for Subscription {
    fn drop(&mut self) {
        if let Some(thing) = self.thing.upgrade() {
            thing.unsubscribe(&self.event, self.id);
        }
    }
}
