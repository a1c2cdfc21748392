//! Circular propagation geometry.
//!
//! The root sits in a centre disc sized by influence. Each retweet depth gets
//! one concentric ring; within a ring, each calendar day gets one sector,
//! ordered clockwise from 12 o'clock, separated by a fixed gap. Sectors are
//! filled with one cell per retweet. All angles are radians measured
//! clockwise from 12 o'clock; radii are in the same units as `total_radius`.

mod pack;

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregation::{day_range, DayCount};
use crate::features::{Polarity, PostAttrs};
use crate::ingest::{Cascade, PostKind};
use crate::scalar::Scalar;

pub use pack::{pack_cells, PackItem};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LayoutError {
    #[error("min_ring_width: {depth} rings of at least {min} do not fit in {available}")]
    RingsInfeasible { depth: usize, min: f64, available: f64 },
    #[error("min_sector_angle: {sectors} sectors of at least {min} rad plus gaps do not fit in ring {depth}")]
    SectorsInfeasible { depth: usize, sectors: usize, min: f64 },
    #[error("no attributes for post `{0}`")]
    MissingAttributes(String),
    #[error("invalid geometry config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeometryConfig<S> {
    pub total_radius: S,
    /// Centre radius at full normalised influence, before clamping.
    pub center_scale: S,
    pub center_min: S,
    pub center_max: S,
    /// Space between the centre disc and the first ring.
    pub pad: S,
    pub min_ring_width: S,
    pub gap_angle: S,
    pub min_sector_angle: S,
    /// Keyword label thresholds, in units of a 400-radius layout.
    pub label_min_arc: S,
    pub label_min_radial: S,
}

impl<S: Scalar> Default for GeometryConfig<S> {
    fn default() -> Self {
        Self {
            total_radius: S::of(400.0),
            center_scale: S::of(60.0),
            center_min: S::of(12.0),
            center_max: S::of(60.0),
            pad: S::of(6.0),
            min_ring_width: S::of(8.0),
            gap_angle: S::of(0.004),
            min_sector_angle: S::of(0.006),
            label_min_arc: S::of(28.0),
            label_min_radial: S::of(12.0),
        }
    }
}

impl<S: Scalar> GeometryConfig<S> {
    fn validate(&self) -> Result<(), LayoutError> {
        let checks = [
            ("total_radius", self.total_radius),
            ("center_min", self.center_min),
            ("center_max", self.center_max),
            ("min_ring_width", self.min_ring_width),
            ("gap_angle", self.gap_angle),
            ("min_sector_angle", self.min_sector_angle),
        ];
        if let Some((name, v)) = checks.iter().find(|(_, v)| !(*v > S::zero())) {
            return Err(LayoutError::Config(format!("{name} must be positive, got {v}")));
        }
        if self.center_min > self.center_max || self.center_max + self.pad >= self.total_radius {
            return Err(LayoutError::Config("centre radius bounds must satisfy min <= max < total_radius - pad".into()));
        }
        Ok(())
    }
}

/// An annular wedge: `[theta0, theta0 + extent] x [r0, r1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wedge<S> {
    pub theta0: S,
    pub extent: S,
    pub r0: S,
    pub r1: S,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell<S> {
    pub post_id: String,
    #[serde(rename = "t0")]
    pub theta0: S,
    #[serde(rename = "t1")]
    pub theta1: S,
    pub r0: S,
    pub r1: S,
    #[serde(rename = "words")]
    pub word_count: usize,
    pub sentiment: Polarity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub keyword: Option<String>,
}

impl<S: Scalar> Cell<S> {
    pub fn area(&self) -> S {
        (self.theta1 - self.theta0) * (self.r1 * self.r1 - self.r0 * self.r0) / S::of(2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sector<S> {
    pub day: NaiveDate,
    #[serde(rename = "t0")]
    pub theta_start: S,
    #[serde(rename = "dt")]
    pub theta_extent: S,
    pub cells: Vec<Cell<S>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ring<S> {
    pub depth: usize,
    #[serde(rename = "r0")]
    pub r_inner: S,
    #[serde(rename = "r1")]
    pub r_outer: S,
    pub sectors: Vec<Sector<S>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Center<S> {
    pub r: S,
    pub influence: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagationLayout<S> {
    pub case_id: String,
    pub center: Center<S>,
    pub rings: Vec<Ring<S>>,
    pub total_radius: S,
    pub gap_angle: S,
    pub histogram: Vec<DayCount>,
}

impl<S: Scalar> PropagationLayout<S> {
    pub fn center_radius(&self) -> S {
        self.center.r
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell<S>> {
        self.rings.iter().flat_map(|r| r.sectors.iter().flat_map(|s| s.cells.iter()))
    }

    pub fn cell_count(&self) -> usize {
        self.cells().count()
    }
}

/// Splits `total` proportionally to `weights`, raising any share below `min`
/// to `min` and rescaling the rest. `None` when `n * min > total`.
pub fn allocate<S: Scalar>(weights: &[S], total: S, min: S) -> Option<Vec<S>> {
    let n = weights.len();
    if S::of_usize(n) * min > total {
        return None;
    }
    let mut floored = vec![false; n];
    loop {
        let fixed = floored.iter().filter(|&&f| f).count();
        let free_total = total - S::of_usize(fixed) * min;
        let free_weight: S = weights.iter().zip(&floored).filter(|(_, &f)| !f).map(|(&w, _)| w).sum();
        let shares: Vec<S> = weights
            .iter()
            .zip(&floored)
            .map(|(&w, &f)| if f { min } else { free_total * w / free_weight })
            .collect();
        let mut changed = false;
        for (i, s) in shares.iter().enumerate() {
            if !floored[i] && *s < min {
                floored[i] = true;
                changed = true;
            }
        }
        if !changed || floored.iter().all(|&f| f) {
            return Some(if changed { vec![min; n] } else { shares });
        }
    }
}

/// Per-day retweet counts over a contiguous, zero-filled day range.
pub fn retweet_histogram(cascade: &Cascade) -> Vec<DayCount> {
    let mut counts: BTreeMap<NaiveDate, usize> = BTreeMap::new();
    for post in cascade.nodes.values().filter(|p| p.kind == PostKind::Retweet) {
        *counts.entry(post.day()).or_default() += 1;
    }
    let (Some(first), Some(last)) = (counts.keys().next().copied(), counts.keys().last().copied()) else {
        return Vec::new();
    };
    day_range(first, last).map(|day| DayCount { day, count: counts.get(&day).copied().unwrap_or(0) }).collect()
}

/// Ids of every cell retweeted on `day`, across all rings, inner ring first.
pub fn cells_for_day<S: Scalar>(layout: &PropagationLayout<S>, day: NaiveDate) -> Vec<String> {
    layout
        .rings
        .iter()
        .flat_map(|r| r.sectors.iter().filter(|s| s.day == day))
        .flat_map(|s| s.cells.iter().map(|c| c.post_id.clone()))
        .collect()
}

/// Lays out one cascade. `influence_fraction` is the case's influence
/// min-max normalised over the dataset.
pub fn compute_layout<S: Scalar>(
    cascade: &Cascade,
    attrs: &BTreeMap<String, PostAttrs>,
    influence_fraction: S,
    cfg: &GeometryConfig<S>,
) -> Result<PropagationLayout<S>, LayoutError> {
    cfg.validate()?;
    let center_r = (cfg.center_scale * influence_fraction.max(S::zero()).sqrt())
        .max(cfg.center_min)
        .min(cfg.center_max);

    // depth -> day -> retweets
    let depths = cascade.max_depth;
    let mut by_depth: Vec<BTreeMap<NaiveDate, Vec<PackItem>>> = vec![BTreeMap::new(); depths];
    for post in cascade.nodes.values() {
        if post.id == cascade.root_id {
            continue;
        }
        let a = attrs.get(&post.id).ok_or_else(|| LayoutError::MissingAttributes(post.id.clone()))?;
        if post.kind != PostKind::Retweet {
            continue;
        }
        let d = cascade.depth[&post.id];
        by_depth[d - 1].entry(post.day()).or_default().push(PackItem {
            post_id: post.id.clone(),
            created_at: post.created_at,
            word_count: a.word_count,
            sentiment: a.sentiment.label,
            keyword: a.keyword.clone(),
        });
    }

    let inner = center_r + cfg.pad;
    let available = cfg.total_radius - inner;
    let ring_weights: Vec<S> = by_depth
        .iter()
        .map(|days| (S::of(2.0) + S::of_usize(days.values().map(Vec::len).sum())).log2())
        .collect();
    let widths = allocate(&ring_weights, available, cfg.min_ring_width).ok_or(LayoutError::RingsInfeasible {
        depth: depths,
        min: cfg.min_ring_width.as_f64(),
        available: available.as_f64(),
    })?;

    let full = S::TAU();
    let mut rings = Vec::with_capacity(depths);
    let mut r_lo = inner;
    for (i, (days, width)) in by_depth.iter().zip(&widths).enumerate() {
        let r_hi = if i + 1 == depths { cfg.total_radius } else { r_lo + *width };
        let sector_weights: Vec<S> = days.values().map(|v| S::of_usize(v.len())).collect();
        let free = full - S::of_usize(days.len()) * cfg.gap_angle;
        let extents = allocate(&sector_weights, free, cfg.min_sector_angle).ok_or(LayoutError::SectorsInfeasible {
            depth: i + 1,
            sectors: days.len(),
            min: cfg.min_sector_angle.as_f64(),
        })?;
        let mut theta = cfg.gap_angle / S::of(2.0);
        let sectors = days
            .iter()
            .zip(extents)
            .map(|((day, items), extent)| {
                let wedge = Wedge { theta0: theta, extent, r0: r_lo, r1: r_hi };
                theta += extent + cfg.gap_angle;
                Sector { day: *day, theta_start: wedge.theta0, theta_extent: extent, cells: pack_cells(&wedge, items, cfg) }
            })
            .collect();
        rings.push(Ring { depth: i + 1, r_inner: r_lo, r_outer: r_hi, sectors });
        r_lo = r_hi;
    }

    Ok(PropagationLayout {
        case_id: cascade.root_id.clone(),
        center: Center { r: center_r, influence: (cascade.size() - 1) as u64 },
        rings,
        total_radius: cfg.total_radius,
        gap_angle: cfg.gap_angle,
        histogram: retweet_histogram(cascade),
    })
}
