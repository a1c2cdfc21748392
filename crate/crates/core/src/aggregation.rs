//! Overview data: filtering, per-region counts and per-topic daily series.
//!
//! A case is located by its root post: region, timestamp and day all come
//! from the root, never from retweets.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::CaseFeatures;
use crate::ingest::{timestamp, Cascade};

pub const OVERSEAS: &str = "overseas";

/// Province-level codes for mainland China, Taiwan, Hong Kong and Macau.
pub const PROVINCE_CODES: [&str; 34] = [
    "AH", "BJ", "CQ", "FJ", "GD", "GS", "GX", "GZ", "HA", "HB", "HE", "HI", "HK", "HL", "HN", "JL", "JS", "JX", "LN",
    "MO", "NM", "NX", "QH", "SC", "SD", "SH", "SN", "SX", "TJ", "TW", "XJ", "XZ", "YN", "ZJ",
];

#[derive(Debug, Error, PartialEq)]
pub enum AggregationError {
    #[error("unknown {field}: {}", values.join(", "))]
    UnknownValues { field: &'static str, values: Vec<String> },
    #[error("time_from must be earlier than time_to")]
    EmptyWindow,
}

impl AggregationError {
    /// Name of the offending filter field.
    pub fn field(&self) -> &'static str {
        match self {
            AggregationError::UnknownValues { field, .. } => field,
            AggregationError::EmptyWindow => "time_from",
        }
    }
}

mod opt_timestamp {
    use chrono::{DateTime, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ts: &Option<DateTime<Utc>>, s: S) -> Result<S::Ok, S::Error> {
        match ts {
            Some(t) => s.serialize_str(&super::timestamp::format(t)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<DateTime<Utc>>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|raw| super::timestamp::parse(&raw).map_err(|e| serde::de::Error::custom(format!("bad timestamp {raw:?}: {e}"))))
            .transpose()
    }
}

/// Conjunction of optional constraints; an absent field does not constrain.
/// The time window is `[time_from, time_to)` on the root timestamp.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topics: Option<BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_timestamp")]
    pub time_from: Option<DateTime<Utc>>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_timestamp")]
    pub time_to: Option<DateTime<Utc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case_ids: Option<BTreeSet<String>>,
}

impl FilterSpec {
    /// Canonical JSON form: sets sorted, absent fields omitted.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("filter serialises")
    }

    pub fn without_regions(&self) -> FilterSpec {
        FilterSpec { regions: None, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseRow {
    pub case_id: String,
    pub region: String,
    #[serde(with = "timestamp")]
    pub created_at: DateTime<Utc>,
    pub topic: String,
    pub keywords: Vec<(String, f64)>,
}

impl CaseRow {
    pub fn from_case(cascade: &Cascade, features: &CaseFeatures) -> Self {
        let root = cascade.root();
        CaseRow {
            case_id: cascade.root_id.clone(),
            region: root.region.clone(),
            created_at: root.created_at,
            topic: features.topic.clone(),
            keywords: features.keywords.clone(),
        }
    }

    pub fn day(&self) -> NaiveDate {
        self.created_at.date_naive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DayCount {
    pub day: NaiveDate,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicSeries {
    pub topic: String,
    pub points: Vec<DayCount>,
    pub keywords_by_day: BTreeMap<NaiveDate, Vec<String>>,
}

/// Every day from `first` to `last` inclusive.
pub fn day_range(first: NaiveDate, last: NaiveDate) -> impl Iterator<Item = NaiveDate> {
    first.iter_days().take_while(move |d| *d <= last)
}

/// Index over case roots backing the overview endpoints.
#[derive(Debug, Clone)]
pub struct Overview {
    rows: Vec<CaseRow>,
    regions: BTreeSet<String>,
    topics: Vec<String>,
}

impl Overview {
    /// `regions` and `topics` are the known vocabularies; regions seen in the
    /// data are added to the former.
    pub fn new<R, T>(mut rows: Vec<CaseRow>, regions: R, topics: T) -> Self
    where
        R: IntoIterator,
        R::Item: Into<String>,
        T: IntoIterator,
        T::Item: Into<String>,
    {
        rows.sort_by(|a, b| (a.created_at, &a.case_id).cmp(&(b.created_at, &b.case_id)));
        let mut regions: BTreeSet<String> = regions.into_iter().map(Into::into).collect();
        regions.extend(rows.iter().map(|r| r.region.clone()));
        let mut topics: Vec<String> = topics.into_iter().map(Into::into).collect();
        for r in &rows {
            if !topics.contains(&r.topic) {
                topics.push(r.topic.clone());
            }
        }
        Self { rows, regions, topics }
    }

    pub fn with_default_regions(rows: Vec<CaseRow>, topics: impl IntoIterator<Item = String>) -> Self {
        Self::new(rows, PROVINCE_CODES.iter().copied().chain([OVERSEAS]), topics)
    }

    pub fn rows(&self) -> &[CaseRow] {
        &self.rows
    }

    pub fn known_regions(&self) -> &BTreeSet<String> {
        &self.regions
    }

    pub fn known_topics(&self) -> &[String] {
        &self.topics
    }

    pub fn validate(&self, f: &FilterSpec) -> Result<(), AggregationError> {
        if let (Some(a), Some(b)) = (f.time_from, f.time_to) {
            if a >= b {
                return Err(AggregationError::EmptyWindow);
            }
        }
        if let Some(regions) = &f.regions {
            let unknown: Vec<String> = regions.iter().filter(|r| !self.regions.contains(*r)).cloned().collect();
            if !unknown.is_empty() {
                return Err(AggregationError::UnknownValues { field: "regions", values: unknown });
            }
        }
        if let Some(topics) = &f.topics {
            let unknown: Vec<String> = topics.iter().filter(|t| !self.topics.contains(t)).cloned().collect();
            if !unknown.is_empty() {
                return Err(AggregationError::UnknownValues { field: "topics", values: unknown });
            }
        }
        Ok(())
    }

    fn matches(f: &FilterSpec, row: &CaseRow) -> bool {
        f.regions.as_ref().is_none_or(|s| s.contains(&row.region))
            && f.topics.as_ref().is_none_or(|s| s.contains(&row.topic))
            && f.case_ids.as_ref().is_none_or(|s| s.contains(&row.case_id))
            && f.time_from.is_none_or(|t| row.created_at >= t)
            && f.time_to.is_none_or(|t| row.created_at < t)
    }

    /// Rows passing the filter, ordered by root timestamp then id.
    pub fn filter_rows(&self, f: &FilterSpec) -> Result<Vec<&CaseRow>, AggregationError> {
        self.validate(f)?;
        Ok(self.rows.iter().filter(|r| Self::matches(f, r)).collect())
    }

    pub fn filter_cases(&self, f: &FilterSpec) -> Result<Vec<String>, AggregationError> {
        Ok(self.filter_rows(f)?.into_iter().map(|r| r.case_id.clone()).collect())
    }

    /// Filtered case counts by root region, with every known region present.
    /// The filter's own region constraint is ignored.
    pub fn region_counts(&self, f: &FilterSpec) -> Result<BTreeMap<String, usize>, AggregationError> {
        let mut counts: BTreeMap<String, usize> = self.regions.iter().map(|r| (r.clone(), 0)).collect();
        for row in self.filter_rows(&f.without_regions())? {
            *counts.entry(row.region.clone()).or_default() += 1;
        }
        Ok(counts)
    }

    /// One zero-filled daily series per topic present in the filtered set,
    /// in taxonomy order, all spanning the filtered set's day range.
    pub fn topic_series(&self, f: &FilterSpec, k: usize) -> Result<Vec<TopicSeries>, AggregationError> {
        let rows = self.filter_rows(f)?;
        let (Some(first), Some(last)) = (rows.iter().map(|r| r.day()).min(), rows.iter().map(|r| r.day()).max())
        else {
            return Ok(Vec::new());
        };

        let mut by_topic: HashMap<&str, BTreeMap<NaiveDate, Vec<&CaseRow>>> = HashMap::new();
        for row in &rows {
            by_topic.entry(row.topic.as_str()).or_default().entry(row.day()).or_default().push(row);
        }
        Ok(self
            .topics
            .iter()
            .filter_map(|topic| {
                let days = by_topic.get(topic.as_str())?;
                let points = day_range(first, last)
                    .map(|day| DayCount { day, count: days.get(&day).map_or(0, Vec::len) })
                    .collect();
                let keywords_by_day = days.iter().map(|(day, cases)| (*day, top_keywords(cases, k))).collect();
                Some(TopicSeries { topic: topic.clone(), points, keywords_by_day })
            })
            .collect())
    }
}

/// Top `k` tokens by summed keyword weight; ties by token.
fn top_keywords(cases: &[&CaseRow], k: usize) -> Vec<String> {
    let mut sums: BTreeMap<&str, f64> = BTreeMap::new();
    for case in cases {
        for (t, w) in &case.keywords {
            *sums.entry(t.as_str()).or_default() += w;
        }
    }
    let mut ranked: Vec<(&str, f64)> = sums.into_iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.into_iter().take(k).map(|(t, _)| t.to_string()).collect()
}
