//! Random Thing Descriptions for round-trip and rewrite checks.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use super::oracle::{random_schema, random_value};

fn name(rng: &mut ChaCha8Rng, prefix: &str) -> String {
    let stems = ["temp", "state", "level", "mode", "alarm", "speed", "on", "color"];
    format!("{prefix}{}{}", stems.choose(rng).unwrap(), rng.random_range(0..1000))
}

fn forms(rng: &mut ChaCha8Rng, section: &str, key: &str) -> Value {
    let n = rng.random_range(0..3);
    let list: Vec<Value> = (0..n)
        .map(|i| {
            let mut f = json!({"href": format!("/{section}/{key}/{i}")});
            if rng.random_bool(0.3) {
                f["contentType"] = json!("application/json");
            }
            if rng.random_bool(0.3) {
                f["op"] = json!(["readproperty"]);
            }
            if rng.random_bool(0.2) {
                f["x-custom"] = random_value(rng, 1);
            }
            f
        })
        .collect();
    Value::Array(list)
}

fn with_extras(rng: &mut ChaCha8Rng, mut affordance: Value) -> Value {
    if rng.random_bool(0.4) {
        affordance["title"] = json!("Some title");
    }
    if rng.random_bool(0.3) {
        affordance["description"] = json!("desc with \"quotes\" and \u{00e9}");
    }
    if rng.random_bool(0.3) {
        affordance["unknownMember"] = random_value(rng, 2);
    }
    affordance
}

/// Random TD text: random sections, affordance schemas, forms and unknown members.
pub fn random_td(rng: &mut ChaCha8Rng) -> Value {
    let mut td = Map::new();
    if rng.random_bool(0.8) {
        td.insert("@context".into(), json!("https://www.w3.org/2019/wot/td/v1"));
    }
    if rng.random_bool(0.7) {
        td.insert("id".into(), json!(format!("urn:dev:rand:{}", rng.random_range(0..10_000))));
    }
    let titles = ["Lamp", "Coffee-Machine", "Robot Arm", "Sensor_7", "Tür"];
    td.insert("title".into(), json!(format!("{}{}", titles.choose(rng).unwrap(), rng.random_range(0..100))));
    if rng.random_bool(0.5) {
        td.insert("description".into(), json!("random thing"));
    }
    if rng.random_bool(0.7) {
        td.insert("security".into(), json!(["nosec_sc"]));
        td.insert("securityDefinitions".into(), json!({"nosec_sc": {"scheme": "nosec"}}));
    }
    if rng.random_bool(0.6) {
        td.insert("base".into(), json!(format!("http://10.0.0.{}/", rng.random_range(1..255))));
    }
    for extra in ["custom", "links", "version"] {
        if rng.random_bool(0.4) {
            td.insert(extra.into(), random_value(rng, 3));
        }
    }

    if rng.random_bool(0.85) {
        let mut props = Map::new();
        for _ in 0..rng.random_range(0..4) {
            let key = name(rng, "p_");
            let mut p = random_schema(rng, 2);
            if rng.random_bool(0.3) {
                p["readOnly"] = json!(rng.random_bool(0.5));
            }
            if rng.random_bool(0.2) {
                p["observable"] = json!(true);
            }
            p["forms"] = forms(rng, "properties", &key);
            props.insert(key, with_extras(rng, p));
        }
        td.insert("properties".into(), Value::Object(props));
    }
    if rng.random_bool(0.85) {
        let mut actions = Map::new();
        for _ in 0..rng.random_range(0..4) {
            let key = name(rng, "a_");
            let mut a = json!({});
            if rng.random_bool(0.6) {
                a["input"] = random_schema(rng, 2);
            }
            if rng.random_bool(0.6) {
                a["output"] = random_schema(rng, 2);
            }
            if rng.random_bool(0.3) {
                a["safe"] = json!(false);
            }
            if rng.random_bool(0.9) {
                a["forms"] = forms(rng, "actions", &key);
            }
            actions.insert(key, with_extras(rng, a));
        }
        td.insert("actions".into(), Value::Object(actions));
    }
    if rng.random_bool(0.85) {
        let mut events = Map::new();
        for _ in 0..rng.random_range(0..4) {
            let key = name(rng, "e_");
            let mut e = json!({});
            if rng.random_bool(0.7) {
                e["data"] = random_schema(rng, 2);
            }
            if rng.random_bool(0.2) {
                e["subscription"] = json!({"type": "string"});
            }
            e["forms"] = forms(rng, "events", &key);
            events.insert(key, with_extras(rng, e));
        }
        td.insert("events".into(), Value::Object(events));
    }
    // Shuffle member order so serialization order is exercised.
    let mut entries: Vec<(String, Value)> = td.into_iter().collect();
    for i in (1..entries.len()).rev() {
        let j = rng.random_range(0..=i);
        entries.swap(i, j);
    }
    Value::Object(entries.into_iter().collect())
}
