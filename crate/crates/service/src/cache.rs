//! Embeddings cached per filter fingerprint, with at most one t-SNE run in
//! flight for any fingerprint.

use std::collections::HashMap;
use std::sync::{Arc, Condvar, Mutex};

use rumorlens_core::aggregation::{AggregationError, FilterSpec};
use rumorlens_core::features::CaseFeatures;
use rumorlens_core::projection::{build_glyphs, tsne_embed, ProjectionError};
use rumorlens_core::{GlyphSpec, Matrix};
use sha2::{Digest, Sha256};

use crate::pipeline::Dataset;

/// Hex SHA-256 of the filter's canonical JSON.
pub fn fingerprint(filter: &FilterSpec) -> String {
    hex::encode(Sha256::digest(filter.canonical_json().as_bytes()))
}

/// An embedded case subset, in filter order.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub fingerprint: String,
    pub glyphs: Vec<GlyphSpec>,
    pub final_kl: Option<f64>,
}

#[derive(Debug)]
enum Slot {
    Running,
    Done(Result<Arc<Projection>, ProjectionError>),
}

#[derive(Debug, Default)]
pub struct EmbeddingCache {
    slots: Mutex<HashMap<String, Slot>>,
    finished: Condvar,
}

impl EmbeddingCache {
    fn finish(&self, fp: &str, result: Result<Arc<Projection>, ProjectionError>) {
        self.slots.lock().expect("cache lock").insert(fp.to_string(), Slot::Done(result));
        self.finished.notify_all();
    }

    pub fn len(&self) -> usize {
        self.slots.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wait {
    /// Compute or wait inline regardless of size.
    Always,
    /// Inline up to the configured size; larger sets run in the background.
    UpToSyncLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Lookup {
    Ready(Arc<Projection>),
    Pending { fingerprint: String },
}

impl Dataset {
    fn embed(&self, fp: String, ids: &[String]) -> Result<Arc<Projection>, ProjectionError> {
        let features: Vec<CaseFeatures> = ids
            .iter()
            .map(|id| self.features[self.case_index(id).expect("filtered id is known")].clone())
            .collect();
        let rows: Vec<Vec<f64>> = features.iter().map(|f| f.vector.clone()).collect();
        let x = if rows.is_empty() { Matrix::zeros(0, 0) } else { Matrix::from_rows(&rows) };
        let embedding = tsne_embed(&x, &self.config.tsne)?;
        let glyphs = build_glyphs(&embedding, &features, &self.config.taxonomy, &self.config.geometry.glyph)?;
        Ok(Arc::new(Projection { fingerprint: fp, glyphs, final_kl: embedding.kl_trace.last().copied() }))
    }

    /// Embedding of the cases selected by `filter`, computed at most once.
    pub fn projection(
        self: &Arc<Self>,
        filter: &FilterSpec,
        wait: Wait,
    ) -> Result<Result<Lookup, ProjectionError>, AggregationError> {
        let ids = self.overview.filter_cases(filter)?;
        let fp = fingerprint(filter);
        let inline = wait == Wait::Always || ids.len() <= self.config.server.sync_embedding_limit;
        let cache = &self.embeddings;
        let mut slots = cache.slots.lock().expect("cache lock");
        loop {
            match slots.get(&fp) {
                Some(Slot::Done(r)) => return Ok(r.clone().map(Lookup::Ready)),
                Some(Slot::Running) if inline => slots = cache.finished.wait(slots).expect("cache lock"),
                Some(Slot::Running) => return Ok(Ok(Lookup::Pending { fingerprint: fp })),
                None => break,
            }
        }
        slots.insert(fp.clone(), Slot::Running);
        drop(slots);

        if inline {
            let result = self.embed(fp.clone(), &ids);
            cache.finish(&fp, result.clone());
            Ok(result.map(Lookup::Ready))
        } else {
            let ds = Arc::clone(self);
            let key = fp.clone();
            std::thread::spawn(move || {
                let result = ds.embed(key.clone(), &ids);
                ds.embeddings.finish(&key, result);
            });
            Ok(Ok(Lookup::Pending { fingerprint: fp }))
        }
    }
}
