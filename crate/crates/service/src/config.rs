//! Service configuration, read from a single JSON file.
//!
//! Every section is optional; missing keys fall back to the defaults below.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rumorlens_core::features::sentiment::DEFAULT_TAU;
use rumorlens_core::features::{FeatureError, LexiconScorer, Taxonomy, Tokenizer};
use rumorlens_core::svg::Palette;
use rumorlens_core::{EmbeddingConfig, GeometryConfig, GlyphConfig};
use serde::{Deserialize, Serialize};

pub const CONFIG_ENV: &str = "RUMORLENS_CONFIG";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub tokenizer: TokenizerConfig,
    pub sentiment: SentimentConfig,
    pub taxonomy: Taxonomy,
    pub tsne: EmbeddingConfig,
    pub geometry: Geometry,
    pub colors: Palette,
    pub server: ServerConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TokenizerConfig {
    pub stopwords: Vec<String>,
    /// Keywords kept per case.
    pub max_keywords: usize,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        let stopwords = [
            "a", "an", "and", "are", "as", "at", "be", "by", "for", "from", "has", "in", "is", "it", "its", "of",
            "on", "or", "that", "the", "this", "to", "was", "were", "will", "with", "的", "了", "是", "在", "和",
        ];
        Self { stopwords: stopwords.map(String::from).to_vec(), max_keywords: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SentimentConfig {
    /// Dead zone around zero that counts as neutral.
    pub tau: f64,
    pub lexicon: BTreeMap<String, f64>,
    /// Extra `token<TAB>score` lines, merged over `lexicon`.
    pub lexicon_file: Option<PathBuf>,
}

impl Default for SentimentConfig {
    fn default() -> Self {
        let lexicon = [
            ("good", 0.6),
            ("great", 0.8),
            ("safe", 0.5),
            ("hope", 0.5),
            ("thanks", 0.6),
            ("true", 0.3),
            ("recover", 0.6),
            ("bad", -0.6),
            ("fake", -0.7),
            ("panic", -0.8),
            ("danger", -0.7),
            ("death", -0.9),
            ("lie", -0.7),
            ("fear", -0.7),
            ("rumor", -0.4),
            ("好", 0.6),
            ("平安", 0.6),
            ("希望", 0.5),
            ("谣言", -0.5),
            ("恐慌", -0.8),
            ("危险", -0.7),
            ("死亡", -0.9),
        ];
        Self { tau: DEFAULT_TAU, lexicon: lexicon.iter().map(|(k, v)| (k.to_string(), *v)).collect(), lexicon_file: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Geometry {
    pub propagation: GeometryConfig,
    pub glyph: GlyphConfig,
    /// Side of the projection SVG canvas.
    pub projection_size: Option<f64>,
}

impl Geometry {
    pub fn projection_size(&self) -> f64 {
        self.projection_size.unwrap_or(800.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServerConfig {
    pub port: u16,
    pub host: String,
    /// Filters selecting at most this many cases are embedded inside the
    /// request; larger ones run in the background and answer 202 meanwhile.
    pub sync_embedding_limit: usize,
    /// Seconds suggested to clients polling a running embedding.
    pub retry_after_secs: u64,
    pub audit_log: PathBuf,
    pub default_keywords: usize,
    pub max_posts_per_request: usize,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            port: 8080,
            host: "127.0.0.1".into(),
            sync_embedding_limit: 300,
            retry_after_secs: 2,
            audit_log: PathBuf::from("verdicts.jsonl"),
            default_keywords: 5,
            max_posts_per_request: 500,
        }
    }
}

impl Config {
    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        let cfg = Self::from_json(&text).map_err(|source| ConfigError::Parse { path: path.into(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads `path` if given, else the file named by `RUMORLENS_CONFIG`,
    /// else the defaults.
    pub fn resolve(path: Option<&Path>) -> Result<Self, ConfigError> {
        match path.map(PathBuf::from).or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from)) {
            Some(p) => Self::load(&p),
            None => Ok(Self::default()),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.tsne.validate().map_err(|e| ConfigError::Invalid(format!("tsne: {e}")))?;
        if !(self.sentiment.tau >= 0.0 && self.sentiment.tau < 1.0) {
            return Err(ConfigError::Invalid(format!("sentiment.tau must be in [0, 1), got {}", self.sentiment.tau)));
        }
        if self.tokenizer.max_keywords == 0 {
            return Err(ConfigError::Invalid("tokenizer.max_keywords must be positive".into()));
        }
        let g = &self.geometry.glyph;
        if !(g.r_min > 0.0 && g.r_min <= g.r_max) {
            return Err(ConfigError::Invalid("geometry.glyph needs 0 < r_min <= r_max".into()));
        }
        Ok(())
    }

    pub fn tokenizer(&self) -> Tokenizer {
        Tokenizer::new(&self.tokenizer.stopwords)
    }

    pub fn scorer(&self) -> Result<LexiconScorer, FeatureError> {
        let mut lexicon: std::collections::HashMap<String, f64> =
            self.sentiment.lexicon.iter().map(|(k, v)| (k.clone(), *v)).collect();
        if let Some(path) = &self.sentiment.lexicon_file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| FeatureError::Lexicon(format!("{}: {e}", path.display())))?;
            lexicon.extend(LexiconScorer::parse_lexicon(&text)?);
        }
        LexiconScorer::new(lexicon, self.tokenizer(), self.sentiment.tau)
    }
}
