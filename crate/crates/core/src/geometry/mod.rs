//! Piecewise-smooth domains, their corner strata and translation chart covers.

pub mod bump;
pub mod cover;
pub mod domain;
pub mod patch;
pub mod piece;
pub mod presets;
pub mod strata;

pub use cover::{build_chart_cover, validate_outward, ChartCover, CoverOptions, TranslationChart, WeightCache};
pub use domain::{Arc, ArcEnd, BoundingBox, PiecewiseDomain, PlanarFactor, PlanarRegion, Vertex};
pub use patch::FacePatch;
pub use piece::{Curve, PlanarShape, SmoothPiece};
pub use strata::{classify_stratum, domain_verdict, locate_strata, CornerStratum, DomainVerdict, RankData, Verdict};
