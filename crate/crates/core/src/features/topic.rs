use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::FeatureError;

pub const OTHER: &str = "Other";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicRule {
    pub label: String,
    #[serde(default)]
    pub triggers: BTreeSet<String>,
}

/// Ordered topic rules ending in a catch-all entry with no triggers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Taxonomy(Vec<TopicRule>);

impl Taxonomy {
    pub fn new(rules: Vec<TopicRule>) -> Result<Self, FeatureError> {
        match rules.last() {
            None => Err(FeatureError::Taxonomy("taxonomy is empty".into())),
            Some(last) if !last.triggers.is_empty() => Err(FeatureError::Taxonomy(format!(
                "last entry `{}` must be a catch-all with no triggers",
                last.label
            ))),
            _ => {
                let mut seen = BTreeSet::new();
                for r in &rules {
                    if !seen.insert(r.label.as_str()) {
                        return Err(FeatureError::Taxonomy(format!("duplicate label `{}`", r.label)));
                    }
                }
                Ok(Self(rules))
            }
        }
    }

    /// Parses and validates a JSON array of rules.
    pub fn from_json(json: &str) -> Result<Self, FeatureError> {
        let rules: Vec<TopicRule> =
            serde_json::from_str(json).map_err(|e| FeatureError::Taxonomy(e.to_string()))?;
        Self::new(rules)
    }

    pub fn rules(&self) -> &[TopicRule] {
        &self.0
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|r| r.label.as_str())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.0.iter().position(|r| r.label == label)
    }

    pub fn catch_all(&self) -> &str {
        &self.0[self.0.len() - 1].label
    }
}

impl<'de> Deserialize<'de> for Taxonomy {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Self::new(Vec::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl Default for Taxonomy {
    fn default() -> Self {
        let rule = |label: &str, triggers: &[&str]| TopicRule {
            label: label.into(),
            triggers: triggers.iter().map(|s| s.to_string()).collect(),
        };
        Taxonomy(vec![
            rule(
                "World News",
                &["election", "protest", "police", "president", "war", "embassy", "fbi", "america", "american",
                  "demonstration", "国际", "美国", "警察", "示威", "游行"],
            ),
            rule(
                "Health",
                &["virus", "vaccine", "covid", "epidemic", "hospital", "mask", "infection", "疫情", "病毒", "疫苗",
                  "口罩", "医院"],
            ),
            rule(
                "Finance",
                &["stock", "bank", "price", "market", "money", "economy", "股市", "银行", "价格", "经济"],
            ),
            rule(
                "Society",
                &["school", "accident", "traffic", "community", "fire", "earthquake", "学校", "事故", "交通", "社区",
                  "地震"],
            ),
            rule(OTHER, &[]),
        ])
    }
}

/// Label whose triggers collect the largest summed keyword weight. Ties go to
/// the earlier rule; no overlap at all yields the catch-all.
pub fn classify_topic<'t>(keywords: &[(String, f64)], taxonomy: &'t Taxonomy) -> &'t str {
    let mut best: Option<(usize, f64)> = None;
    for (i, rule) in taxonomy.rules().iter().enumerate() {
        let score: f64 = keywords.iter().filter(|(t, _)| rule.triggers.contains(t)).map(|(_, w)| *w).sum();
        if score > 0.0 && best.is_none_or(|(_, b)| score > b) {
            best = Some((i, score));
        }
    }
    match best {
        Some((i, _)) => &taxonomy.rules()[i].label,
        None => taxonomy.catch_all(),
    }
}
