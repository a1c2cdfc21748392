//! Strip packing of cells inside an annular wedge.
//!
//! Items are split into consecutive radial rows (inner row first) and each
//! row is split angularly (clockwise). Row bands are sized by the annular
//! area their items need, so every cell's area is exactly proportional to
//! `1 + word_count`.

use chrono::{DateTime, Utc};

use super::{Cell, GeometryConfig, Wedge};
use crate::features::Polarity;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct PackItem {
    pub post_id: String,
    pub created_at: DateTime<Utc>,
    pub word_count: usize,
    pub sentiment: Polarity,
    pub keyword: Option<String>,
}

fn weight<S: Scalar>(item: &PackItem) -> S {
    S::of_usize(1 + item.word_count)
}

/// Number of rows that keeps cells roughly square.
fn row_count<S: Scalar>(n: usize, wedge: &Wedge<S>) -> usize {
    let arc = wedge.extent * (wedge.r0 + wedge.r1) / S::of(2.0);
    let depth = wedge.r1 - wedge.r0;
    if arc <= S::zero() {
        return 1;
    }
    let k = (S::of_usize(n) * depth / arc).sqrt().round().to_usize().unwrap_or(1);
    k.clamp(1, n.max(1))
}

/// Packs `items` into `wedge`. Items are ordered by timestamp then id before
/// packing, whatever order they arrive in.
pub fn pack_cells<S: Scalar>(wedge: &Wedge<S>, items: &[PackItem], cfg: &GeometryConfig<S>) -> Vec<Cell<S>> {
    if items.is_empty() {
        return Vec::new();
    }
    let mut items: Vec<&PackItem> = items.iter().collect();
    items.sort_by(|a, b| (a.created_at, &a.post_id).cmp(&(b.created_at, &b.post_id)));

    let total: S = items.iter().map(|i| weight::<S>(i)).sum();
    let k = row_count(items.len(), wedge);

    // Assign each item to a row by the midpoint of its weight interval.
    let mut rows: Vec<Vec<&PackItem>> = vec![Vec::new(); k];
    let mut before = S::zero();
    for item in items {
        let w = weight::<S>(item);
        let mid = (before + w / S::of(2.0)) / total;
        let r = (mid * S::of_usize(k)).floor().to_usize().unwrap_or(0).min(k - 1);
        rows[r].push(item);
        before += w;
    }
    rows.retain(|r| !r.is_empty());

    let (r_in2, r_out2) = (wedge.r0 * wedge.r0, wedge.r1 * wedge.r1);
    let label_scale = cfg.total_radius / S::of(400.0);
    let mut cells = Vec::new();
    let mut r_lo = wedge.r0;
    let mut acc = S::zero();
    let last_row = rows.len() - 1;
    for (ri, row) in rows.iter().enumerate() {
        let row_weight: S = row.iter().map(|i| weight::<S>(i)).sum();
        acc += row_weight;
        let r_hi = if ri == last_row { wedge.r1 } else { (r_in2 + (acc / total) * (r_out2 - r_in2)).sqrt() };

        let mut t_lo = wedge.theta0;
        let mut row_acc = S::zero();
        for (ci, item) in row.iter().enumerate() {
            row_acc += weight::<S>(item);
            let t_hi = if ci == row.len() - 1 {
                wedge.theta0 + wedge.extent
            } else {
                wedge.theta0 + wedge.extent * row_acc / row_weight
            };
            let arc_len = (t_hi - t_lo) * (r_lo + r_hi) / S::of(2.0);
            let labelled = arc_len >= cfg.label_min_arc * label_scale && r_hi - r_lo >= cfg.label_min_radial * label_scale;
            cells.push(Cell {
                post_id: item.post_id.clone(),
                theta0: t_lo,
                theta1: t_hi,
                r0: r_lo,
                r1: r_hi,
                word_count: item.word_count,
                sentiment: item.sentiment,
                keyword: if labelled { item.keyword.clone() } else { None },
            });
            t_lo = t_hi;
        }
        r_lo = r_hi;
    }
    cells
}
