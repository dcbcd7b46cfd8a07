//! Bundled sample Thing Descriptions.

/// The coffee machine TD used throughout the tests and the README.
pub const COFFEE_MACHINE_TD: &str = include_str!("../fixtures/coffee-machine.td.json");

pub const SMART_LAMP_TD: &str = include_str!("../fixtures/smart-lamp.td.json");

pub const WEATHER_STATION_TD: &str = include_str!("../fixtures/weather-station.td.json");

/// Every bundled TD as `(file name, text)`.
pub const CORPUS: &[(&str, &str)] = &[
    ("coffee-machine.td.json", COFFEE_MACHINE_TD),
    ("smart-lamp.td.json", SMART_LAMP_TD),
    ("weather-station.td.json", WEATHER_STATION_TD),
];
