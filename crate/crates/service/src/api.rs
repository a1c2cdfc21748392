//! The JSON API as a pure function from request to response. The HTTP server
//! is a thin adapter around [`Api::handle`].

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use chrono::{NaiveDate, Utc};
use percent_encoding::percent_decode_str;
use rumorlens_core::aggregation::{AggregationError, FilterSpec};
use rumorlens_core::ingest::timestamp;
use rumorlens_core::layout::cells_for_day;
use rumorlens_core::projection::ProjectedCase;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cache::{Lookup, Wait};
use crate::pipeline::Dataset;

#[derive(Debug, Clone, Copy)]
pub struct Request<'a> {
    pub method: &'a str,
    /// Raw, still percent-encoded path.
    pub path: &'a str,
    pub query: Option<&'a str>,
    pub body: &'a [u8],
}

impl<'a> Request<'a> {
    pub fn get(path_and_query: &'a str) -> Self {
        let (path, query) = match path_and_query.split_once('?') {
            Some((p, q)) => (p, Some(q)),
            None => (path_and_query, None),
        };
        Request { method: "GET", path, query, body: &[] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub status: u16,
    pub headers: Vec<(&'static str, String)>,
    pub body: String,
}

impl Response {
    fn json<T: Serialize + ?Sized>(status: u16, value: &T) -> Self {
        Response {
            status,
            headers: vec![("content-type", "application/json; charset=utf-8".into())],
            body: serde_json::to_string(value).expect("response serialises"),
        }
    }

    pub fn json_value(&self) -> serde_json::Value {
        serde_json::from_str(&self.body).expect("response body is JSON")
    }
}

#[derive(Debug)]
struct ApiError {
    status: u16,
    field: Option<String>,
    message: String,
    allow: Option<&'static str>,
}

impl ApiError {
    fn bad(field: impl Into<String>, message: impl Into<String>) -> Self {
        ApiError { status: 400, field: Some(field.into()), message: message.into(), allow: None }
    }

    fn not_found(message: impl Into<String>) -> Self {
        ApiError { status: 404, field: None, message: message.into(), allow: None }
    }

    fn internal(status: u16, message: impl Into<String>) -> Self {
        ApiError { status, field: None, message: message.into(), allow: None }
    }

    fn into_response(self) -> Response {
        let mut body = serde_json::Map::new();
        body.insert("error".into(), self.message.into());
        if let Some(f) = self.field {
            body.insert("field".into(), f.into());
        }
        let mut r = Response::json(self.status, &body);
        if let Some(allow) = self.allow {
            r.headers.push(("allow", allow.into()));
        }
        r
    }
}

impl From<AggregationError> for ApiError {
    fn from(e: AggregationError) -> Self {
        ApiError::bad(format!("filter.{}", e.field()), e.to_string())
    }
}

type Query = BTreeMap<String, String>;

fn parse_query(q: Option<&str>) -> Query {
    url::form_urlencoded::parse(q.unwrap_or("").as_bytes()).into_owned().collect()
}

fn parse_filter(q: &Query) -> Result<FilterSpec, ApiError> {
    match q.get("filter").map(|s| s.trim()) {
        None | Some("") => Ok(FilterSpec::default()),
        Some(s) => serde_json::from_str(s).map_err(|e| ApiError::bad("filter", format!("invalid filter: {e}"))),
    }
}

fn parse_usize(q: &Query, key: &str, default: usize) -> Result<usize, ApiError> {
    q.get(key).map_or(Ok(default), |v| {
        v.parse().map_err(|_| ApiError::bad(key, format!("`{key}` must be a non-negative integer, got {v:?}")))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictLabel {
    Approve,
    Refute,
    Undecided,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VerdictBody {
    label: VerdictLabel,
    #[serde(default)]
    note: String,
}

/// One line of the audit log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub case_id: String,
    pub label: VerdictLabel,
    pub note: String,
    #[serde(with = "timestamp")]
    pub recorded_at: chrono::DateTime<Utc>,
}

#[derive(Serialize)]
struct CaseEntry<'a> {
    region: &'a str,
    #[serde(with = "timestamp")]
    created_at: chrono::DateTime<Utc>,
    topic: &'a str,
    influence: u64,
    sentiment: f64,
    keywords: Vec<&'a str>,
    #[serde(flatten)]
    projected: ProjectedCase<f64>,
}

pub struct Api {
    dataset: RwLock<Arc<Dataset>>,
    audit_path: PathBuf,
    audit_lock: Mutex<()>,
}

impl Api {
    pub fn new(dataset: Dataset) -> Self {
        let audit_path = dataset.config.server.audit_log.clone();
        Api { dataset: RwLock::new(Arc::new(dataset)), audit_path, audit_lock: Mutex::new(()) }
    }

    pub fn with_audit_log(mut self, path: impl Into<PathBuf>) -> Self {
        self.audit_path = path.into();
        self
    }

    /// Current dataset. Requests hold on to the snapshot they started with.
    pub fn dataset(&self) -> Arc<Dataset> {
        self.dataset.read().expect("dataset lock").clone()
    }

    /// Swaps in a freshly built dataset; in-flight requests finish on the old one.
    pub fn replace(&self, dataset: Dataset) {
        *self.dataset.write().expect("dataset lock") = Arc::new(dataset);
    }

    pub fn handle(&self, req: &Request) -> Response {
        let ds = self.dataset();
        self.route(&ds, req).unwrap_or_else(ApiError::into_response)
    }

    fn route(&self, ds: &Arc<Dataset>, req: &Request) -> Result<Response, ApiError> {
        let segments: Vec<String> = req
            .path
            .split('/')
            .filter(|s| !s.is_empty())
            .map(|s| percent_decode_str(s).decode_utf8_lossy().into_owned())
            .collect();
        let segs: Vec<&str> = segments.iter().map(String::as_str).collect();
        let q = parse_query(req.query);
        let method = req.method.to_ascii_uppercase();
        let get = |allow: &'static str| -> Result<(), ApiError> {
            if method == allow || (allow == "GET" && method == "HEAD") {
                Ok(())
            } else {
                Err(ApiError { status: 405, field: None, message: format!("method {method} not allowed"), allow: Some(allow) })
            }
        };
        match segs.as_slice() {
            ["api", "regions"] => {
                get("GET")?;
                Ok(Response::json(200, &ds.overview.region_counts(&parse_filter(&q)?)?))
            }
            ["api", "topics", "series"] => {
                get("GET")?;
                let k = parse_usize(&q, "k", ds.config.server.default_keywords)?;
                Ok(Response::json(200, &ds.overview.topic_series(&parse_filter(&q)?, k)?))
            }
            ["api", "cases"] => {
                get("GET")?;
                self.cases(ds, &parse_filter(&q)?)
            }
            ["api", "cases", id, "propagation"] => {
                get("GET")?;
                let case = find_case(ds, id)?;
                let layout = ds.layout(case).map_err(|e| ApiError::internal(422, e.to_string()))?;
                Ok(Response::json(200, &*layout))
            }
            ["api", "cases", id, "histogram"] => {
                get("GET")?;
                Ok(Response::json(200, &ds.histogram(find_case(ds, id)?)))
            }
            ["api", "cases", id, "cells"] => {
                get("GET")?;
                let case = find_case(ds, id)?;
                let raw = q.get("day").ok_or_else(|| ApiError::bad("day", "missing `day` (YYYY-MM-DD)"))?;
                let day = NaiveDate::parse_from_str(raw, "%Y-%m-%d")
                    .map_err(|_| ApiError::bad("day", format!("`day` must be YYYY-MM-DD, got {raw:?}")))?;
                let layout = ds.layout(case).map_err(|e| ApiError::internal(422, e.to_string()))?;
                Ok(Response::json(200, &json!({"case_id": id, "day": day, "post_ids": cells_for_day(&layout, day)})))
            }
            ["api", "cases", id, "verdict"] => {
                get("POST")?;
                find_case(ds, id)?;
                self.verdict(id, req.body)
            }
            ["api", "posts"] => {
                get("GET")?;
                posts(ds, &q)
            }
            ["api", "config"] => {
                get("GET")?;
                let c = &ds.config;
                Ok(Response::json(
                    200,
                    &json!({
                        "taxonomy": c.taxonomy.labels().collect::<Vec<_>>(),
                        "regions": ds.overview.known_regions(),
                        "colors": c.colors,
                        "sentiment_tau": c.sentiment.tau,
                        "geometry": c.geometry,
                        "default_keywords": c.server.default_keywords,
                        "max_posts_per_request": c.server.max_posts_per_request,
                    }),
                ))
            }
            ["api", "report"] => {
                get("GET")?;
                Ok(Response::json(200, &ds.report))
            }
            _ => Err(ApiError::not_found(format!("no route for {}", req.path))),
        }
    }

    fn cases(&self, ds: &Arc<Dataset>, filter: &FilterSpec) -> Result<Response, ApiError> {
        let lookup = ds
            .projection(filter, Wait::UpToSyncLimit)?
            .map_err(|e| ApiError::internal(500, format!("embedding failed: {e}")))?;
        let projection = match lookup {
            Lookup::Ready(p) => p,
            Lookup::Pending { fingerprint } => {
                let secs = ds.config.server.retry_after_secs;
                let mut r = Response::json(202, &json!({"status": "pending", "token": fingerprint, "retry_after": secs}));
                r.headers.push(("retry-after", secs.to_string()));
                return Ok(r);
            }
        };
        let cases: Vec<CaseEntry> = projection
            .glyphs
            .iter()
            .map(|g| {
                let i = ds.case_index(&g.case_id).expect("projected case is known");
                let (row, f) = (ds.cascades[i].root(), &ds.features[i]);
                CaseEntry {
                    region: &row.region,
                    created_at: row.created_at,
                    topic: &f.topic,
                    influence: f.influence,
                    sentiment: f.sentiment,
                    keywords: f.keywords.iter().map(|(t, _)| t.as_str()).collect(),
                    projected: ProjectedCase::from(g),
                }
            })
            .collect();
        Ok(Response::json(200, &json!({"fingerprint": projection.fingerprint, "cases": cases})))
    }

    fn verdict(&self, case_id: &str, body: &[u8]) -> Result<Response, ApiError> {
        let body: VerdictBody = serde_json::from_slice(body).map_err(|e| {
            let field = if e.to_string().contains("label") || e.to_string().contains("variant") { "label" } else { "body" };
            ApiError::bad(field, format!("invalid verdict: {e}"))
        })?;
        let record = Verdict {
            case_id: case_id.to_string(),
            label: body.label,
            note: body.note,
            recorded_at: rumorlens_core::ingest::now_seconds(),
        };
        let mut line = serde_json::to_string(&record).expect("verdict serialises");
        line.push('\n');
        let _guard = self.audit_lock.lock().expect("audit lock");
        OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.audit_path)
            .and_then(|mut f| f.write_all(line.as_bytes()))
            .map_err(|e| ApiError::internal(500, format!("cannot append to audit log: {e}")))?;
        Ok(Response::json(201, &record))
    }
}

fn find_case(ds: &Dataset, id: &str) -> Result<usize, ApiError> {
    ds.case_index(id).ok_or_else(|| ApiError::not_found(format!("unknown case `{id}`")))
}

fn posts(ds: &Dataset, q: &Query) -> Result<Response, ApiError> {
    let raw = q.get("ids").ok_or_else(|| ApiError::bad("ids", "missing `ids`"))?;
    let ids: Vec<&str> = raw.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if ids.is_empty() {
        return Err(ApiError::bad("ids", "`ids` is empty"));
    }
    let max = ds.config.server.max_posts_per_request;
    let limit = parse_usize(q, "limit", max)?;
    if limit > max {
        return Err(ApiError::bad("limit", format!("`limit` may not exceed {max}")));
    }
    let offset = parse_usize(q, "offset", 0)?;
    let unknown: Vec<&str> = ids.iter().copied().filter(|id| ds.post_detail(id).is_none()).collect();
    if !unknown.is_empty() {
        return Err(ApiError::not_found(format!("unknown post ids: {}", unknown.join(", "))));
    }
    let details: Vec<_> = ids.iter().skip(offset).take(limit).filter_map(|id| ds.post_detail(id)).collect();
    Ok(Response::json(200, &details))
}
