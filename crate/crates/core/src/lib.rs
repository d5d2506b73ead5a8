//! Numerical boundary values of holomorphic functions on piecewise-smooth
//! domains in ℂⁿ, n ∈ {1, 2}.
//!
//! The pairing `F(ε) = ∫_{∂Ω} Σᵢ χᵢ f(z − εvᵢ) ψ` is evaluated over a cover of
//! ∂Ω by translation charts, and the behaviour of `F` as `ε → 0` decides
//! whether the boundary current of `f` exists.
//!
//! Everything is generic over the scalar (`f32`, `f64`); the aliases at the
//! crate root fix `f64`.

pub mod asymptotics;
pub mod error;
pub mod functions;
pub mod geometry;
pub mod linalg;
pub mod pairing;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{CPoint, Real, C};

pub type Domain = geometry::PiecewiseDomain<f64>;
pub type Piece = geometry::SmoothPiece<f64>;
pub type Cover = geometry::ChartCover<f64>;
pub type Chart = geometry::TranslationChart<f64>;
pub type Stratum = geometry::CornerStratum<f64>;
pub type Function = functions::HolomorphicFunction<f64>;
pub type Growth = functions::GrowthEstimate<f64>;
pub type Form = pairing::TestForm<f64>;
pub type Sample = pairing::PairingSample<f64>;
pub type Fit = asymptotics::AsymptoticFit<f64>;
