//! Ready-made domains used by tests, scenarios and the reproduction run.

use crate::geometry::domain::{BoundingBox, PiecewiseDomain};
use crate::geometry::piece::SmoothPiece;
use crate::scalar::Real;

/// Pieces of the square `(0, 2)²` in coordinate `coord`, in the order
/// `x > 0`, `x < 2`, `y > 0`, `y < 2`.
pub fn square_pieces<T: Real>(coord: usize) -> Vec<SmoothPiece<T>> {
    let (z, o, two) = (T::zero(), T::one(), T::lit(2.0));
    vec![
        SmoothPiece::half_plane("x>0", coord, [-o, z], z),
        SmoothPiece::half_plane("x<2", coord, [o, z], two),
        SmoothPiece::half_plane("y>0", coord, [z, -o], z),
        SmoothPiece::half_plane("y<2", coord, [z, o], two),
    ]
}

/// `{|x − 1| < 1, |y − 1| < 1} ⊂ ℂ`.
pub fn square<T: Real>() -> PiecewiseDomain<T> {
    let (z, two) = (T::zero(), T::lit(2.0));
    PiecewiseDomain::new(1, square_pieces(0), BoundingBox { lo: [z; 4], hi: [two, two, z, z] })
        .expect("square is a valid domain")
}

/// Unit disc in ℂ.
pub fn disc<T: Real>() -> PiecewiseDomain<T> {
    let b = T::lit(1.25);
    let z = T::zero();
    PiecewiseDomain::new(
        1,
        vec![SmoothPiece::disc("|z|<1", 0, [z, z], T::one())],
        BoundingBox { lo: [-b, -b, z, z], hi: [b, b, z, z] },
    )
    .expect("disc is a valid domain")
}

/// Unit bidisc `D × D ⊂ ℂ²`.
pub fn bidisc<T: Real>() -> PiecewiseDomain<T> {
    let b = T::lit(1.25);
    let z = T::zero();
    PiecewiseDomain::new(
        2,
        vec![SmoothPiece::disc("|z1|<1", 0, [z, z], T::one()), SmoothPiece::disc("|z2|<1", 1, [z, z], T::one())],
        BoundingBox { lo: [-b; 4], hi: [b; 4] },
    )
    .expect("bidisc is a valid domain")
}

/// Square in `z₁` times ℂ, truncated to `|x₂|, |y₂| ≤ half_width` for sampling.
pub fn square_cross_plane<T: Real>(half_width: T) -> PiecewiseDomain<T> {
    let (z, two) = (T::zero(), T::lit(2.0));
    PiecewiseDomain::new(
        2,
        square_pieces(0),
        BoundingBox { lo: [z, z, -half_width, -half_width], hi: [two, two, half_width, half_width] },
    )
    .expect("square × ℂ is a valid domain")
}
