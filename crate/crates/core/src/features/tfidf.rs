//! Smoothed TF-IDF keyword weighting.
//!
//! `weight(t, d) = count(t, d) / len(d) * (ln((1 + N) / (1 + df(t))) + 1)`

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::scalar::Scalar;

use super::FeatureError;

/// Weighted keywords of one document, heaviest first; ties by token.
pub type Keywords<S> = Vec<(String, S)>;

pub fn idf<S: Scalar>(corpus_size: usize, doc_freq: usize) -> S {
    (S::of_usize(1 + corpus_size) / S::of_usize(1 + doc_freq)).ln() + S::one()
}

pub fn tf_idf<S: Scalar>(corpus: &[Vec<String>]) -> Result<Vec<Keywords<S>>, FeatureError> {
    if corpus.is_empty() {
        return Err(FeatureError::EmptyCorpus);
    }
    let mut df: HashMap<&str, usize> = HashMap::new();
    for doc in corpus {
        let unique: HashSet<&str> = doc.iter().map(String::as_str).collect();
        for t in unique {
            *df.entry(t).or_default() += 1;
        }
    }
    let n = corpus.len();
    Ok(corpus
        .iter()
        .map(|doc| {
            if doc.is_empty() {
                return Vec::new();
            }
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            for t in doc {
                *counts.entry(t.as_str()).or_default() += 1;
            }
            let len = S::of_usize(doc.len());
            let mut weights: Keywords<S> = counts
                .into_iter()
                .map(|(t, c)| (t.to_string(), S::of_usize(c) / len * idf::<S>(n, df[t])))
                .collect();
            sort_keywords(&mut weights);
            weights
        })
        .collect())
}

pub fn sort_keywords<S: Scalar>(kw: &mut Keywords<S>) {
    kw.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal).then_with(|| a.0.cmp(&b.0)));
}
