//! Similarity map: exact t-SNE over case feature vectors and the per-case
//! glyph geometry drawn on top of it.

mod affinity;
mod glyph;
mod tsne;

use thiserror::Error;

use crate::scalar::Scalar;

pub use affinity::{pairwise_affinities, squared_distances, Affinities, MAX_BISECTION_STEPS};
pub use glyph::{build_glyphs, ArcMetric, GlyphArc, GlyphConfig, GlyphSpec, ProjectedCase};
pub use tsne::{kl_divergence, kl_gradient, normalize_coords, tsne_embed, Embedding, EmbeddingConfig, KL_SAMPLE_EVERY};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ProjectionError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("row {0} contains a non-finite value")]
    NonFiniteInput(usize),
    #[error("non-finite value at iteration {iteration}")]
    NonFinite { iteration: usize },
    #[error("invalid embedding config: {0}")]
    Config(String),
    #[error("{features} feature records for {points} embedded points")]
    LengthMismatch { points: usize, features: usize },
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    /// Builds from rows of equal length.
    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self { rows: rows.len(), cols, data: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [S] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [S] {
        &mut self.data
    }
}
