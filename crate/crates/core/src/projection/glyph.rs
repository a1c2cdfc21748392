//! Glyph geometry: a topic-coloured inner disc sized by influence, ringed by
//! four quadrant arcs for the author's fans, followees, tweets and profile
//! integrity. Angles are radians clockwise from 12 o'clock.

use serde::{Deserialize, Serialize};

use super::{Embedding, ProjectionError};
use crate::features::{CaseFeatures, Taxonomy};
use crate::scalar::{min_max_normalize, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArcMetric {
    Fans,
    Followees,
    Tweets,
    Integrity,
}

impl ArcMetric {
    /// Fixed order; quadrants NE, SE, SW, NW.
    pub const ORDER: [ArcMetric; 4] = [ArcMetric::Fans, ArcMetric::Followees, ArcMetric::Tweets, ArcMetric::Integrity];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GlyphConfig<S> {
    pub r_min: S,
    pub r_max: S,
    /// Angular gap left inside each quadrant.
    pub arc_gap: S,
}

impl<S: Scalar> Default for GlyphConfig<S> {
    fn default() -> Self {
        Self { r_min: S::of(0.006), r_max: S::of(0.03), arc_gap: S::of(0.2) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlyphArc<S> {
    pub metric: ArcMetric,
    pub fraction: S,
    pub start: S,
    pub extent: S,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlyphSpec<S> {
    pub case_id: String,
    pub center: [S; 2],
    pub inner_radius: S,
    pub topic_color_index: usize,
    pub arcs: [GlyphArc<S>; 4],
}

/// One element of the embedding export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectedCase<S> {
    pub case_id: String,
    pub x: S,
    pub y: S,
    pub glyph: GlyphBody<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlyphBody<S> {
    pub inner_radius: S,
    pub topic_color_index: usize,
    pub arcs: Vec<GlyphArc<S>>,
}

impl<S: Scalar> From<&GlyphSpec<S>> for ProjectedCase<S> {
    fn from(g: &GlyphSpec<S>) -> Self {
        ProjectedCase {
            case_id: g.case_id.clone(),
            x: g.center[0],
            y: g.center[1],
            glyph: GlyphBody {
                inner_radius: g.inner_radius,
                topic_color_index: g.topic_color_index,
                arcs: g.arcs.to_vec(),
            },
        }
    }
}

/// Glyphs for embedded cases; `features[i]` belongs to `embedding.coords[i]`.
/// Every normalisation range is taken over the whole input once.
pub fn build_glyphs<S: Scalar>(
    embedding: &Embedding<S>,
    features: &[CaseFeatures],
    taxonomy: &Taxonomy,
    cfg: &GlyphConfig<S>,
) -> Result<Vec<GlyphSpec<S>>, ProjectionError> {
    if embedding.coords.len() != features.len() {
        return Err(ProjectionError::LengthMismatch { points: embedding.coords.len(), features: features.len() });
    }
    let column = |f: fn(&CaseFeatures) -> f64| -> Vec<S> { features.iter().map(|c| S::of(f(c))).collect() };
    let influence = min_max_normalize(&column(|c| c.influence as f64));
    let fans = min_max_normalize(&column(|c| c.log_fans));
    let followees = min_max_normalize(&column(|c| c.log_followees));
    let tweets = min_max_normalize(&column(|c| c.log_tweets));

    let quarter = S::FRAC_PI_2();
    let usable = (quarter - cfg.arc_gap).max(S::zero());
    Ok(features
        .iter()
        .enumerate()
        .map(|(i, cf)| {
            let fractions = [fans[i], followees[i], tweets[i], S::of(cf.integrity).max(S::zero()).min(S::one())];
            let arcs = std::array::from_fn(|q| GlyphArc {
                metric: ArcMetric::ORDER[q],
                fraction: fractions[q],
                start: S::of_usize(q) * quarter + cfg.arc_gap / S::of(2.0),
                extent: fractions[q] * usable,
            });
            GlyphSpec {
                case_id: cf.case_id.clone(),
                center: embedding.coords[i],
                inner_radius: (cfg.r_max * influence[i].sqrt()).max(cfg.r_min).min(cfg.r_max),
                topic_color_index: taxonomy.index_of(&cf.topic).unwrap_or(taxonomy.len() - 1),
                arcs,
            }
        })
        .collect())
}
