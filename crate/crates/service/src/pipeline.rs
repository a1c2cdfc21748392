//! End-to-end build: ingest, features, aggregates, then an immutable
//! [`Dataset`] that lazily caches layouts and embeddings.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use rumorlens_core::aggregation::{CaseRow, DayCount, Overview};
use rumorlens_core::features::{CaseFeatures, FeatureError, FeatureExtractor, LexiconScorer, PostAttrs, Tokenizer};
use rumorlens_core::ingest::{
    build_cascades, parse_posts, parse_users, Cascade, Diagnostic, IngestError, Parsed, Post, PostKind, UserProfile,
};
use rumorlens_core::layout::{compute_layout, retweet_histogram, LayoutError};
use rumorlens_core::scalar::min_max_normalize;
use rumorlens_core::PropagationLayout;
use serde::Serialize;

use crate::cache::EmbeddingCache;
use crate::config::{Config, ConfigError};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("cannot open {path}: {source}")]
    Open { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error("no cases")]
    NoCases { diagnostics: Vec<Diagnostic> },
}

impl PipelineError {
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            PipelineError::NoCases { diagnostics } => diagnostics,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timings {
    pub ingest_ms: f64,
    pub features_ms: f64,
    pub aggregates_ms: f64,
    pub total_ms: f64,
}

/// Machine-readable summary of one build.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BuildReport {
    pub posts_read: usize,
    pub post_lines_rejected: usize,
    pub users_read: usize,
    pub user_lines_rejected: usize,
    pub cases: usize,
    /// Posts placed under a root, all depths.
    pub descendants: usize,
    pub retweets: usize,
    pub comments: usize,
    pub posts_dropped: usize,
    pub max_depth: usize,
    pub feature_vector_len: usize,
    pub topics: BTreeMap<String, usize>,
    pub diagnostics: Vec<Diagnostic>,
    pub timings: Timings,
}

/// Everything the API serves. Immutable once built; the caches only ever
/// hold values that are pure functions of the data and config.
pub struct Dataset {
    pub config: Config,
    pub cascades: Vec<Cascade>,
    pub features: Vec<CaseFeatures>,
    pub overview: Overview,
    pub users: HashMap<String, UserProfile>,
    pub report: BuildReport,
    tokenizer: Tokenizer,
    scorer: LexiconScorer,
    case_index: HashMap<String, usize>,
    post_index: HashMap<String, usize>,
    influence_fraction: Vec<f64>,
    post_attrs: Vec<OnceLock<Arc<BTreeMap<String, PostAttrs>>>>,
    layouts: Vec<OnceLock<Result<Arc<PropagationLayout>, LayoutError>>>,
    pub(crate) embeddings: EmbeddingCache,
}

impl std::fmt::Debug for Dataset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dataset").field("cases", &self.cascades.len()).finish_non_exhaustive()
    }
}

/// One post joined with its cascade position, text features and author.
#[derive(Debug, Clone, Serialize)]
pub struct PostDetail<'a> {
    #[serde(flatten)]
    pub post: &'a Post,
    pub case_id: &'a str,
    pub depth: usize,
    pub word_count: usize,
    pub sentiment: rumorlens_core::features::SentimentLabel,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub keyword: Option<String>,
    pub user: Option<&'a UserProfile>,
}

fn open(path: &Path) -> Result<BufReader<File>, PipelineError> {
    File::open(path).map(BufReader::new).map_err(|source| PipelineError::Open { path: path.into(), source })
}

/// Reads both dumps and builds the dataset. `config` falls back to
/// `RUMORLENS_CONFIG`, then to defaults.
pub fn run_pipeline(posts: &Path, users: &Path, config: Option<&Path>) -> Result<Dataset, PipelineError> {
    let config = Config::resolve(config)?;
    load_dataset(posts, users, config)
}

pub fn load_dataset(posts: &Path, users: &Path, config: Config) -> Result<Dataset, PipelineError> {
    let start = Instant::now();
    let posts = parse_posts(open(posts)?)?;
    let users = parse_users(open(users)?)?;
    build_dataset(posts, users, config, start)
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1000.0
}

/// Builds from already parsed records. `start` marks when reading began, so
/// the ingest timing covers parsing.
pub fn build_dataset(
    posts: Parsed<Post>,
    users: Parsed<UserProfile>,
    config: Config,
    start: Instant,
) -> Result<Dataset, PipelineError> {
    config.validate()?;
    let mut report = BuildReport {
        posts_read: posts.records.len(),
        post_lines_rejected: posts.diagnostics.len(),
        users_read: users.records.len(),
        user_lines_rejected: users.diagnostics.len(),
        ..Default::default()
    };
    let mut diagnostics = posts.diagnostics;
    diagnostics.extend(users.diagnostics);

    let set = build_cascades(&posts.records);
    diagnostics.extend(set.diagnostics);
    if set.cascades.is_empty() {
        return Err(PipelineError::NoCases { diagnostics });
    }
    let cascades = set.cascades;
    let mut user_map = HashMap::with_capacity(users.records.len());
    for u in users.records {
        if user_map.contains_key(&u.id) {
            diagnostics.push(Diagnostic::for_record(&u.id, "duplicate user id; first occurrence kept"));
        } else {
            user_map.insert(u.id.clone(), u);
        }
    }
    report.timings.ingest_ms = ms(start);

    let t = Instant::now();
    let tokenizer = config.tokenizer();
    let scorer = config.scorer()?;
    let extractor = FeatureExtractor {
        tokenizer: &tokenizer,
        scorer: &scorer,
        taxonomy: &config.taxonomy,
        max_keywords: config.tokenizer.max_keywords,
    };
    let (features, feature_diags) = extractor.extract(&cascades, &user_map)?;
    diagnostics.extend(feature_diags);
    report.timings.features_ms = ms(t);

    let t = Instant::now();
    let rows: Vec<CaseRow> = cascades.iter().zip(&features).map(|(c, f)| CaseRow::from_case(c, f)).collect();
    let overview = Overview::with_default_regions(rows, config.taxonomy.labels().map(String::from));
    let case_index = cascades.iter().enumerate().map(|(i, c)| (c.root_id.clone(), i)).collect();
    let post_index =
        cascades.iter().enumerate().flat_map(|(i, c)| c.nodes.keys().map(move |id| (id.clone(), i))).collect();
    let influence_fraction = min_max_normalize(&features.iter().map(|f| f.influence as f64).collect::<Vec<_>>());
    for f in &features {
        *report.topics.entry(f.topic.clone()).or_default() += 1;
    }
    report.timings.aggregates_ms = ms(t);

    report.cases = cascades.len();
    report.descendants = cascades.iter().map(|c| c.size() - 1).sum();
    for post in cascades.iter().flat_map(|c| c.nodes.values()) {
        match post.kind {
            PostKind::Retweet => report.retweets += 1,
            PostKind::Comment => report.comments += 1,
            PostKind::Original => {}
        }
    }
    report.posts_dropped = set.dropped;
    report.max_depth = cascades.iter().map(|c| c.max_depth).max().unwrap_or(0);
    report.feature_vector_len = features.first().map_or(0, |f| f.vector.len());
    report.diagnostics = diagnostics;
    report.timings.total_ms = ms(start);

    let n = cascades.len();
    Ok(Dataset {
        config,
        features,
        overview,
        users: user_map,
        report,
        tokenizer,
        scorer,
        case_index,
        post_index,
        influence_fraction,
        post_attrs: (0..n).map(|_| OnceLock::new()).collect(),
        layouts: (0..n).map(|_| OnceLock::new()).collect(),
        embeddings: EmbeddingCache::default(),
        cascades,
    })
}

impl Dataset {
    pub fn case_index(&self, case_id: &str) -> Option<usize> {
        self.case_index.get(case_id).copied()
    }

    pub fn post_attributes(&self, case: usize) -> Arc<BTreeMap<String, PostAttrs>> {
        self.post_attrs[case]
            .get_or_init(|| {
                let extractor = FeatureExtractor {
                    tokenizer: &self.tokenizer,
                    scorer: &self.scorer,
                    taxonomy: &self.config.taxonomy,
                    max_keywords: self.config.tokenizer.max_keywords,
                };
                Arc::new(extractor.post_attributes(&self.cascades[case]))
            })
            .clone()
    }

    pub fn layout(&self, case: usize) -> Result<Arc<PropagationLayout>, LayoutError> {
        self.layouts[case]
            .get_or_init(|| {
                let attrs = self.post_attributes(case);
                compute_layout(
                    &self.cascades[case],
                    &attrs,
                    self.influence_fraction[case],
                    &self.config.geometry.propagation,
                )
                .map(Arc::new)
            })
            .clone()
    }

    pub fn histogram(&self, case: usize) -> Vec<DayCount> {
        retweet_histogram(&self.cascades[case])
    }

    pub fn post_detail(&self, post_id: &str) -> Option<PostDetail<'_>> {
        let case = *self.post_index.get(post_id)?;
        let cascade = &self.cascades[case];
        let post = &cascade.nodes[post_id];
        let attrs = self.post_attributes(case);
        let a = &attrs[post_id];
        Some(PostDetail {
            post,
            case_id: &cascade.root_id,
            depth: cascade.depth[post_id],
            word_count: a.word_count,
            sentiment: a.sentiment,
            keyword: a.keyword.clone(),
            user: self.users.get(&post.user_id),
        })
    }
}
