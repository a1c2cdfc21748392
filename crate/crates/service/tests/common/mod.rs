#![allow(dead_code)]

use std::path::PathBuf;

use rumorlens_service::{load_dataset, Api, Config, Dataset};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture_dataset(config: Config) -> Dataset {
    load_dataset(&fixture("posts.jsonl"), &fixture("users.jsonl"), config).expect("fixture builds")
}

/// API over the five-case fixture, logging verdicts into `audit`.
pub fn fixture_api(config: Config, audit: &std::path::Path) -> Api {
    Api::new(fixture_dataset(config)).with_audit_log(audit)
}

pub fn get(api: &Api, path_and_query: &str) -> (u16, serde_json::Value, String) {
    let r = api.handle(&rumorlens_service::Request::get(path_and_query));
    let v = serde_json::from_str(&r.body).unwrap_or_else(|e| panic!("{path_and_query}: body is not JSON ({e}): {}", r.body));
    (r.status, v, r.body)
}

/// Percent-encodes a query value.
pub fn enc(s: &str) -> String {
    url::form_urlencoded::byte_serialize(s.as_bytes()).collect()
}
pub mod schema;
