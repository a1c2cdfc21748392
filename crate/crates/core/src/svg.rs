//! Headless SVG rendering of propagation layouts and projection glyphs.
//!
//! Propagation: one `circle.center`, one `circle.ring-boundary` per ring and
//! one `path.cell` per cell. Projection: one `g.glyph` per case holding an
//! inner circle and four `path.arc`s.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::features::Polarity;
use crate::layout::PropagationLayout;
use crate::projection::GlyphSpec;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Palette {
    pub negative: String,
    pub neutral: String,
    pub positive: String,
    /// Indexed by taxonomy position.
    pub topics: Vec<String>,
    pub background: String,
}

impl Default for Palette {
    fn default() -> Self {
        Self {
            negative: "#D0342C".into(),
            neutral: "#E7C24B".into(),
            positive: "#3FA34D".into(),
            topics: ["#1F77B4", "#9467BD", "#FF7F0E", "#8C564B", "#7F7F7F"].map(String::from).to_vec(),
            background: "#FFFFFF".into(),
        }
    }
}

impl Palette {
    pub fn sentiment(&self, p: Polarity) -> &str {
        match p {
            Polarity::Negative => &self.negative,
            Polarity::Neutral => &self.neutral,
            Polarity::Positive => &self.positive,
        }
    }

    pub fn topic(&self, index: usize) -> &str {
        if self.topics.is_empty() {
            "#777777"
        } else {
            &self.topics[index % self.topics.len()]
        }
    }
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Screen point for polar `(theta, r)` around `(cx, cy)`; theta clockwise
/// from 12 o'clock, y pointing down.
fn polar(cx: f64, cy: f64, theta: f64, r: f64) -> (f64, f64) {
    (cx + r * theta.sin(), cy - r * theta.cos())
}

/// Path data for the annular sector `[t0, t1] x [r0, r1]`.
fn annular_sector(cx: f64, cy: f64, t0: f64, t1: f64, r0: f64, r1: f64) -> String {
    let large = if t1 - t0 > std::f64::consts::PI { 1 } else { 0 };
    let (ax, ay) = polar(cx, cy, t0, r1);
    let (bx, by) = polar(cx, cy, t1, r1);
    let (c_x, c_y) = polar(cx, cy, t1, r0);
    let (dx, dy) = polar(cx, cy, t0, r0);
    format!(
        "M{ax:.3},{ay:.3}A{r1:.3},{r1:.3} 0 {large} 1 {bx:.3},{by:.3}L{c_x:.3},{c_y:.3}A{r0:.3},{r0:.3} 0 {large} 0 {dx:.3},{dy:.3}Z"
    )
}

/// Open arc path at radius `r` from `t0` to `t1`.
fn arc(cx: f64, cy: f64, t0: f64, t1: f64, r: f64) -> String {
    let large = if t1 - t0 > std::f64::consts::PI { 1 } else { 0 };
    let (ax, ay) = polar(cx, cy, t0, r);
    let (bx, by) = polar(cx, cy, t1, r);
    format!("M{ax:.3},{ay:.3}A{r:.3},{r:.3} 0 {large} 1 {bx:.3},{by:.3}")
}

pub fn render_propagation<S: Scalar>(layout: &PropagationLayout<S>, palette: &Palette) -> String {
    let margin = 10.0;
    let total = layout.total_radius.as_f64();
    let size = 2.0 * (total + margin);
    let c = total + margin;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}" data-case-id="{}">"#,
        escape(&layout.case_id)
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="{}"/>"#, palette.background);
    for ring in &layout.rings {
        for sector in &ring.sectors {
            for cell in &sector.cells {
                let d = annular_sector(
                    c,
                    c,
                    cell.theta0.as_f64(),
                    cell.theta1.as_f64(),
                    cell.r0.as_f64(),
                    cell.r1.as_f64(),
                );
                let _ = writeln!(
                    out,
                    r#"<path class="cell" data-post-id="{}" data-day="{}" d="{d}" fill="{}" stroke="{}" stroke-width="0.3"/>"#,
                    escape(&cell.post_id),
                    sector.day,
                    palette.sentiment(cell.sentiment),
                    palette.background
                );
            }
        }
        let _ = writeln!(
            out,
            r#"<circle class="ring-boundary" data-depth="{}" cx="{c}" cy="{c}" r="{:.3}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            ring.depth,
            ring.r_outer.as_f64(),
            palette.background
        );
    }
    let _ = writeln!(
        out,
        r##"<circle class="center" cx="{c}" cy="{c}" r="{:.3}" fill="#4A4A4A" data-influence="{}"/>"##,
        layout.center.r.as_f64(),
        layout.center.influence
    );
    for ring in &layout.rings {
        for cell in ring.sectors.iter().flat_map(|s| &s.cells) {
            if let Some(k) = &cell.keyword {
                let mid_t = (cell.theta0.as_f64() + cell.theta1.as_f64()) / 2.0;
                let mid_r = (cell.r0.as_f64() + cell.r1.as_f64()) / 2.0;
                let (x, y) = polar(c, c, mid_t, mid_r);
                let _ = writeln!(
                    out,
                    r#"<text class="keyword" x="{x:.3}" y="{y:.3}" font-size="9" text-anchor="middle" dominant-baseline="middle">{}</text>"#,
                    escape(k)
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Glyph map on a `size` x `size` canvas; glyph radii are fractions of `size`.
pub fn render_projection<S: Scalar>(glyphs: &[GlyphSpec<S>], palette: &Palette, size: f64) -> String {
    let margin = 0.05 * size;
    let inner = size - 2.0 * margin;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="{}"/>"#, palette.background);
    for g in glyphs {
        let x = margin + g.center[0].as_f64() * inner;
        // screen y grows downward
        let y = margin + (1.0 - g.center[1].as_f64()) * inner;
        let r = g.inner_radius.as_f64() * size;
        let band = r * 0.45 + 1.0;
        let _ = writeln!(out, r#"<g class="glyph" data-case-id="{}">"#, escape(&g.case_id));
        let _ = writeln!(
            out,
            r#"<circle class="inner" cx="{x:.3}" cy="{y:.3}" r="{r:.3}" fill="{}"/>"#,
            palette.topic(g.topic_color_index)
        );
        for a in &g.arcs {
            let t0 = a.start.as_f64();
            let d = arc(x, y, t0, t0 + a.extent.as_f64(), r + band);
            let _ = writeln!(
                out,
                r##"<path class="arc" data-metric="{}" d="{d}" fill="none" stroke="#555555" stroke-width="{band:.3}"/>"##,
                serde_json::to_value(a.metric).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
            );
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}
