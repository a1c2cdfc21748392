//! Per-case feature extraction: keywords, sentiment, topic, influence and
//! root-author metrics, plus the standardised vector fed to the projection.

pub mod sentiment;
pub mod text;
pub mod tfidf;
pub mod topic;

use std::collections::BTreeMap;
use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Cascade, Diagnostic, PostKind, UserProfile};

pub use sentiment::{LexiconScorer, Polarity, SentimentLabel, SentimentScorer};
pub use text::Tokenizer;
pub use tfidf::{tf_idf, Keywords};
pub use topic::{classify_topic, Taxonomy, TopicRule};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("invalid lexicon: {0}")]
    Lexicon(String),
    #[error("invalid taxonomy: {0}")]
    Taxonomy(String),
}

/// Number of scalar columns ahead of the topic one-hot block.
pub const SCALAR_COLUMNS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseFeatures {
    pub case_id: String,
    pub keywords: Vec<(String, f64)>,
    pub sentiment: f64,
    pub topic: String,
    pub influence: u64,
    pub log_fans: f64,
    pub log_followees: f64,
    pub log_tweets: f64,
    pub integrity: f64,
    pub max_depth: usize,
    pub duration_days: f64,
    pub vector: Vec<f64>,
}

/// What the propagation view needs to know about a single post.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostAttrs {
    pub word_count: usize,
    pub sentiment: SentimentLabel,
    pub keyword: Option<String>,
}

pub fn compute_influence(cascade: &Cascade) -> u64 {
    (cascade.size() - 1) as u64
}

/// Share of the five completeness flags that are set.
pub fn profile_integrity(u: &UserProfile) -> f64 {
    let flags = [u.verified, u.has_bio, u.has_avatar, u.has_location, u.has_gender];
    flags.iter().filter(|&&f| f).count() as f64 / flags.len() as f64
}

pub fn log_count(x: u64) -> f64 {
    (1.0 + x as f64).log10()
}

/// Unstandardised feature row:
/// `[log_fans, log_followees, log_tweets, integrity, log10(1+influence),
///   sentiment, max_depth, duration_days, one-hot(topic)...]`.
pub fn raw_vector(cf: &CaseFeatures, taxonomy: &Taxonomy) -> Vec<f64> {
    let mut v = vec![
        cf.log_fans,
        cf.log_followees,
        cf.log_tweets,
        cf.integrity,
        log_count(cf.influence),
        cf.sentiment,
        cf.max_depth as f64,
        cf.duration_days,
    ];
    v.extend(taxonomy.labels().map(|l| if l == cf.topic { 1.0 } else { 0.0 }));
    v
}

/// Column-wise z-scores using the population standard deviation. Constant
/// columns become zeros.
pub fn standardize(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let Some(width) = rows.first().map(Vec::len) else {
        return Vec::new();
    };
    let n = rows.len() as f64;
    let mut out = rows.to_vec();
    for c in 0..width {
        let mean = rows.iter().map(|r| r[c]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        for row in &mut out {
            row[c] = if sd > 1e-12 * (1.0 + mean.abs()) { (row[c] - mean) / sd } else { 0.0 };
        }
    }
    out
}

/// Fills `vector` on every case from dataset-wide column statistics.
pub fn build_feature_vectors(cases: &mut [CaseFeatures], taxonomy: &Taxonomy) {
    let raw: Vec<Vec<f64>> = cases.iter().map(|c| raw_vector(c, taxonomy)).collect();
    for (case, v) in cases.iter_mut().zip(standardize(&raw)) {
        case.vector = v;
    }
}

pub struct FeatureExtractor<'a> {
    pub tokenizer: &'a Tokenizer,
    pub scorer: &'a dyn SentimentScorer,
    pub taxonomy: &'a Taxonomy,
    pub max_keywords: usize,
}

impl FeatureExtractor<'_> {
    /// Extracts features for every cascade. Root authors missing from
    /// `users` get zero metrics and a diagnostic.
    pub fn extract(
        &self,
        cascades: &[Cascade],
        users: &HashMap<String, UserProfile>,
    ) -> Result<(Vec<CaseFeatures>, Vec<Diagnostic>), FeatureError> {
        if cascades.is_empty() {
            return Ok((Vec::new(), Vec::new()));
        }
        let corpus: Vec<Vec<String>> =
            cascades.par_iter().map(|c| self.tokenizer.tokenize(&c.root().text)).collect();
        let keywords = tf_idf::<f64>(&corpus)?;

        let mut diagnostics = Vec::new();
        let mut cases: Vec<CaseFeatures> = cascades
            .iter()
            .zip(keywords)
            .map(|(cascade, mut kw)| {
                kw.truncate(self.max_keywords);
                let root = cascade.root();
                let user = users.get(&root.user_id);
                if user.is_none() {
                    diagnostics.push(Diagnostic::for_record(
                        &root.id,
                        format!("author `{}` has no profile; user metrics set to zero", root.user_id),
                    ));
                }
                let duration = (cascade.last_activity() - root.created_at).num_seconds() as f64 / 86_400.0;
                CaseFeatures {
                    case_id: cascade.root_id.clone(),
                    topic: classify_topic(&kw, self.taxonomy).to_string(),
                    keywords: kw,
                    sentiment: self.scorer.score(&root.text).score,
                    influence: compute_influence(cascade),
                    log_fans: user.map_or(0.0, |u| log_count(u.fans)),
                    log_followees: user.map_or(0.0, |u| log_count(u.followees)),
                    log_tweets: user.map_or(0.0, |u| log_count(u.tweets)),
                    integrity: user.map_or(0.0, profile_integrity),
                    max_depth: cascade.max_depth,
                    duration_days: duration.max(0.0),
                    vector: Vec::new(),
                }
            })
            .collect();
        build_feature_vectors(&mut cases, self.taxonomy);
        Ok((cases, diagnostics))
    }

    /// Word count, sentiment and top TF-IDF token for every post of one
    /// cascade. The TF-IDF corpus is the cascade's own posts.
    pub fn post_attributes(&self, cascade: &Cascade) -> BTreeMap<String, PostAttrs> {
        let corpus: Vec<Vec<String>> = cascade.nodes.values().map(|p| self.tokenizer.tokenize(&p.text)).collect();
        let weights = tf_idf::<f64>(&corpus).unwrap_or_default();
        cascade
            .nodes
            .values()
            .zip(weights)
            .map(|(post, kw)| {
                let attrs = PostAttrs {
                    word_count: text::word_count(&post.text),
                    sentiment: self.scorer.score(&post.text),
                    keyword: if post.kind == PostKind::Original { None } else { kw.into_iter().next().map(|(t, _)| t) },
                };
                (post.id.clone(), attrs)
            })
            .collect()
    }
}
