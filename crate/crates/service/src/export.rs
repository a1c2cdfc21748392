//! Headless SVG export of either view.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use rumorlens_core::aggregation::{AggregationError, FilterSpec};
use rumorlens_core::layout::LayoutError;
use rumorlens_core::projection::ProjectionError;
use rumorlens_core::svg::{render_projection, render_propagation};

use crate::cache::{Lookup, Wait};
use crate::pipeline::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum View {
    Propagation,
    Projection,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Case(String),
    Filter(FilterSpec),
}

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("unknown case `{0}`")]
    UnknownCase(String),
    #[error("the propagation view needs a case id")]
    NeedsCase,
    #[error(transparent)]
    Filter(#[from] AggregationError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

pub fn render_svg(ds: &Arc<Dataset>, view: View, target: &Target) -> Result<String, ExportError> {
    let palette = &ds.config.colors;
    match (view, target) {
        (View::Propagation, Target::Case(id)) => {
            let case = ds.case_index(id).ok_or_else(|| ExportError::UnknownCase(id.clone()))?;
            Ok(render_propagation(&*ds.layout(case)?, palette))
        }
        (View::Propagation, Target::Filter(_)) => Err(ExportError::NeedsCase),
        (View::Projection, target) => {
            let filter = match target {
                Target::Case(id) => {
                    ds.case_index(id).ok_or_else(|| ExportError::UnknownCase(id.clone()))?;
                    FilterSpec { case_ids: Some(BTreeSet::from([id.clone()])), ..Default::default() }
                }
                Target::Filter(f) => f.clone(),
            };
            let Lookup::Ready(p) = ds.projection(&filter, Wait::Always)?? else {
                unreachable!("blocking lookups always finish")
            };
            Ok(render_projection(&p.glyphs, palette, ds.config.geometry.projection_size()))
        }
    }
}

pub fn export_svg(ds: &Arc<Dataset>, view: View, target: &Target, out: &Path) -> Result<(), ExportError> {
    let svg = render_svg(ds, view, target)?;
    std::fs::write(out, svg).map_err(|source| ExportError::Write { path: out.display().to_string(), source })
}
