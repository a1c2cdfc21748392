//! Analytics core for triaging suspected rumors on social media.
//!
//! - [`ingest`]: dump parsing and cascade reconstruction
//! - [`features`]: keywords, sentiment, topic, influence and author metrics
//! - [`projection`]: exact t-SNE similarity map and glyph geometry
//! - [`aggregation`]: region counts and topic time series behind a filter
//! - [`layout`]: circular propagation geometry
//! - [`svg`]: headless rendering of the two geometric views
//!
//! Numeric geometry is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which the service uses throughout.

pub mod aggregation;
pub mod features;
pub mod ingest;
pub mod layout;
pub mod projection;
pub mod scalar;
pub mod svg;

pub use scalar::Scalar;

pub type Matrix = projection::Matrix<f64>;
pub type Embedding = projection::Embedding<f64>;
pub type EmbeddingConfig = projection::EmbeddingConfig<f64>;
pub type GlyphSpec = projection::GlyphSpec<f64>;
pub type GlyphConfig = projection::GlyphConfig<f64>;
pub type GeometryConfig = layout::GeometryConfig<f64>;
pub type PropagationLayout = layout::PropagationLayout<f64>;
pub type Ring = layout::Ring<f64>;
pub type Sector = layout::Sector<f64>;
pub type Cell = layout::Cell<f64>;

pub type Matrix32 = projection::Matrix<f32>;
pub type Embedding32 = projection::Embedding<f32>;
pub type PropagationLayout32 = layout::PropagationLayout<f32>;
