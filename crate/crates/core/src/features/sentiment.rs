use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::text::Tokenizer;
use super::FeatureError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Negative,
    Neutral,
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentLabel {
    pub score: f64,
    pub label: Polarity,
}

impl SentimentLabel {
    /// Labels `score` with a symmetric dead zone of half-width `tau`.
    pub fn from_score(score: f64, tau: f64) -> Self {
        let score = score.clamp(-1.0, 1.0);
        let label = if score < -tau {
            Polarity::Negative
        } else if score > tau {
            Polarity::Positive
        } else {
            Polarity::Neutral
        };
        Self { score, label }
    }
}

/// Anything that can put a polarity on a post.
pub trait SentimentScorer: Send + Sync {
    fn score(&self, text: &str) -> SentimentLabel;
}

/// Mean of lexicon values over the matched tokens.
#[derive(Debug, Clone)]
pub struct LexiconScorer {
    lexicon: HashMap<String, f64>,
    tokenizer: Tokenizer,
    tau: f64,
}

pub const DEFAULT_TAU: f64 = 0.1;

impl LexiconScorer {
    pub fn new(lexicon: HashMap<String, f64>, tokenizer: Tokenizer, tau: f64) -> Result<Self, FeatureError> {
        if let Some((t, v)) = lexicon.iter().find(|(_, v)| !(-1.0..=1.0).contains(*v)) {
            return Err(FeatureError::Lexicon(format!("score for `{t}` out of [-1, 1]: {v}")));
        }
        Ok(Self { lexicon, tokenizer, tau })
    }

    /// Parses `token<TAB>score` lines.
    pub fn parse_lexicon(contents: &str) -> Result<HashMap<String, f64>, FeatureError> {
        let mut out = HashMap::new();
        for (i, line) in contents.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (tok, score) = line
                .split_once('\t')
                .ok_or_else(|| FeatureError::Lexicon(format!("line {}: expected token<TAB>score", i + 1)))?;
            let score: f64 = score
                .trim()
                .parse()
                .map_err(|e| FeatureError::Lexicon(format!("line {}: {e}", i + 1)))?;
            out.insert(tok.trim().to_lowercase(), score);
        }
        Ok(out)
    }
}

impl SentimentScorer for LexiconScorer {
    fn score(&self, text: &str) -> SentimentLabel {
        let (sum, hits) = self
            .tokenizer
            .tokenize(text)
            .iter()
            .filter_map(|t| self.lexicon.get(t))
            .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
        let score = if hits == 0 { 0.0 } else { sum / hits as f64 };
        SentimentLabel::from_score(score, self.tau)
    }
}

pub fn sentiment_score(text: &str, lexicon: &HashMap<String, f64>) -> SentimentLabel {
    LexiconScorer { lexicon: lexicon.clone(), tokenizer: Tokenizer::default(), tau: DEFAULT_TAU }.score(text)
}
