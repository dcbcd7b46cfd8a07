use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};

use crate::td_model::{Affordance, AffordanceKind, Form, ThingDescription};

/// Everything except RFC 3986 unreserved characters.
const SEGMENT: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

/// Percent-encodes a string for use as one URL path segment.
pub fn url_segment(raw: &str) -> String {
    utf8_percent_encode(raw, SEGMENT).to_string()
}

/// `<base_url>/<thing>/<section>/<name>`.
pub fn affordance_href(base_url: &str, title: &str, kind: AffordanceKind, name: &str) -> String {
    format!("{base_url}/{}/{}/{}", url_segment(title), kind.section(), url_segment(name))
}

/// Returns a copy of `td` whose forms all point at the virtual thing served
/// below `base_url`. Each affordance gets a single form; `base` is dropped.
/// Nothing else changes.
pub fn rewrite_td(td: &ThingDescription, base_url: &str) -> ThingDescription {
    let base_url = base_url.trim_end_matches('/');
    let mut out = td.clone();
    out.base = None;
    let form = |kind, name: &str| vec![Form::new(affordance_href(base_url, &td.title, kind, name))];
    for (name, p) in out.properties.iter_mut() {
        p.replace_forms(form(AffordanceKind::Property, name));
    }
    for (name, a) in out.actions.iter_mut() {
        a.replace_forms(form(AffordanceKind::Action, name));
    }
    for (name, e) in out.events.iter_mut() {
        e.replace_forms(form(AffordanceKind::Event, name));
    }
    out
}
