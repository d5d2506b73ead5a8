use crate::scalar::{czero, CPoint, Real, C};

/// Shape of a smooth piece inside one complex coordinate plane.
#[derive(Clone, Debug, PartialEq)]
pub enum PlanarShape<T: Real> {
    /// `ρ = a·x + b·y − c`, with `normal = [a, b]`, `offset = c`.
    HalfPlane { normal: [T; 2], offset: T },
    /// `ρ = |w − center|² − radius²`.
    Disc { center: [T; 2], radius: T },
}

/// One smooth piece `Ωⱼ = {ρⱼ < 0}` of a piecewise-smooth domain.
///
/// Pieces act on a single complex coordinate (`coord`), so every domain built
/// from them is a product of planar domains. `scale` multiplies the defining
/// function and must be positive.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothPiece<T: Real> {
    pub label: String,
    pub coord: usize,
    pub shape: PlanarShape<T>,
    pub scale: T,
}

impl<T: Real> SmoothPiece<T> {
    pub fn half_plane(label: &str, coord: usize, normal: [T; 2], offset: T) -> Self {
        SmoothPiece {
            label: label.to_string(),
            coord,
            shape: PlanarShape::HalfPlane { normal, offset },
            scale: T::one(),
        }
    }

    pub fn disc(label: &str, coord: usize, center: [T; 2], radius: T) -> Self {
        SmoothPiece { label: label.to_string(), coord, shape: PlanarShape::Disc { center, radius }, scale: T::one() }
    }

    /// Same zero set, defining function multiplied by `lambda > 0`.
    pub fn rescaled(&self, lambda: T) -> Self {
        let mut p = self.clone();
        p.scale = p.scale * lambda;
        p
    }

    /// Value of ρ at a point of the coordinate plane.
    pub fn rho_planar(&self, w: C<T>) -> T {
        self.scale
            * match &self.shape {
                PlanarShape::HalfPlane { normal, offset } => normal[0] * w.re + normal[1] * w.im - *offset,
                PlanarShape::Disc { center, radius } => {
                    let d = w - C::new(center[0], center[1]);
                    d.norm_sqr() - *radius * *radius
                }
            }
    }

    /// Gradient of ρ within the coordinate plane.
    pub fn grad_planar(&self, w: C<T>) -> [T; 2] {
        let g = match &self.shape {
            PlanarShape::HalfPlane { normal, .. } => *normal,
            PlanarShape::Disc { center, .. } => {
                let two = T::lit(2.0);
                [two * (w.re - center[0]), two * (w.im - center[1])]
            }
        };
        [self.scale * g[0], self.scale * g[1]]
    }

    pub fn rho(&self, z: &CPoint<T>) -> T {
        self.rho_planar(z[self.coord])
    }

    /// Real gradient in ℝ⁴ ordered `[x1, y1, x2, y2]`.
    pub fn grad(&self, z: &CPoint<T>) -> [T; 4] {
        let g = self.grad_planar(z[self.coord]);
        let mut out = [T::zero(); 4];
        out[2 * self.coord] = g[0];
        out[2 * self.coord + 1] = g[1];
        out
    }

    /// Complex differential ∂ρ: component k is ½(∂ρ/∂x_k − i ∂ρ/∂y_k).
    pub fn del(&self, z: &CPoint<T>) -> [C<T>; 2] {
        let g = self.grad(z);
        let half = T::lit(0.5);
        [C::new(half * g[0], -half * g[1]), C::new(half * g[2], -half * g[3])]
    }

    /// Unit outward normal within the coordinate plane.
    pub fn unit_normal(&self, w: C<T>) -> C<T> {
        let g = self.grad_planar(w);
        let n = C::new(g[0], g[1]);
        n / n.norm()
    }

    /// Euclidean distance from a planar point to the zero set `{ρ = 0}`.
    pub fn distance_to_zero_set(&self, w: C<T>) -> T {
        match &self.shape {
            PlanarShape::HalfPlane { normal, offset } => {
                (normal[0] * w.re + normal[1] * w.im - *offset).abs() / normal[0].hypot(normal[1])
            }
            PlanarShape::Disc { center, radius } => ((w - C::new(center[0], center[1])).norm() - *radius).abs(),
        }
    }

    /// Parametrized zero set, oriented with the interior on the left.
    pub fn curve(&self) -> Curve<T> {
        match &self.shape {
            PlanarShape::HalfPlane { normal, offset } => {
                let n = C::new(normal[0], normal[1]);
                let nn = n.norm_sqr();
                let origin = n * (*offset / nn);
                // rotate outward normal by +90°: interior lies to the left
                let dir = C::new(-normal[1], normal[0]) / nn.sqrt();
                Curve::Line { origin, dir }
            }
            PlanarShape::Disc { center, radius } => {
                Curve::Circle { center: C::new(center[0], center[1]), radius: *radius }
            }
        }
    }

    /// True when the zero set is a straight line parallel to an axis.
    pub fn is_axis_aligned(&self) -> bool {
        match &self.shape {
            PlanarShape::HalfPlane { normal, .. } => normal[0] == T::zero() || normal[1] == T::zero(),
            PlanarShape::Disc { .. } => false,
        }
    }
}

/// Zero set of a piece in its coordinate plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Curve<T: Real> {
    /// `origin + t·dir`, `|dir| = 1`.
    Line { origin: C<T>, dir: C<T> },
    /// `center + radius·e^{it}`.
    Circle { center: C<T>, radius: T },
}

impl<T: Real> Curve<T> {
    pub fn point(&self, t: T) -> C<T> {
        match *self {
            Curve::Line { origin, dir } => origin + dir * t,
            Curve::Circle { center, radius } => center + C::from_polar(radius, t),
        }
    }

    /// Derivative of [`Curve::point`] with respect to the parameter.
    pub fn tangent(&self, t: T) -> C<T> {
        match *self {
            Curve::Line { dir, .. } => dir,
            Curve::Circle { radius, .. } => C::from_polar(radius, t) * C::new(T::zero(), T::one()),
        }
    }

    /// Parameter of the closest curve point. For circles the result is taken
    /// in `[reference − π, reference + π)`.
    pub fn project(&self, w: C<T>, reference: T) -> T {
        match *self {
            Curve::Line { origin, dir } => {
                let d = w - origin;
                d.re * dir.re + d.im * dir.im
            }
            Curve::Circle { center, .. } => {
                let d = w - center;
                if d == czero() {
                    return reference;
                }
                let a = d.arg();
                let two_pi = T::lit(2.0) * T::PI();
                let mut t = a;
                while t < reference - T::PI() {
                    t = t + two_pi;
                }
                while t >= reference + T::PI() {
                    t = t - two_pi;
                }
                t
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbar_rho_matches_finite_differences() {
        let pieces = [
            SmoothPiece::half_plane("x>0", 0, [-1.0, 0.0], 0.0),
            SmoothPiece::half_plane("tilted", 1, [0.6, -0.8], 0.3),
            SmoothPiece::disc("disc", 1, [0.2, -0.1], 1.3).rescaled(3.0),
        ];
        let z = [C::new(0.37, -0.21), C::new(0.55, 0.81)];
        let h = 1e-6;
        for p in &pieces {
            let del = p.del(&z);
            for k in 0..2 {
                let mut zx = z;
                let mut zy = z;
                zx[k] += C::new(h, 0.0);
                let mut zxm = z;
                zxm[k] -= C::new(h, 0.0);
                zy[k] += C::new(0.0, h);
                let mut zym = z;
                zym[k] -= C::new(0.0, h);
                let rx = (p.rho(&zx) - p.rho(&zxm)) / (2.0 * h);
                let ry = (p.rho(&zy) - p.rho(&zym)) / (2.0 * h);
                let want = C::new(0.5 * rx, -0.5 * ry);
                assert!((del[k] - want).norm() < 1e-6, "{} coord {k}", p.label);
            }
        }
    }

    #[test]
    fn disc_del_is_conjugate_coordinate() {
        // ρ = |z|² − 1 gives ∂ρ = z̄ dz
        let p = SmoothPiece::disc("D", 0, [0.0, 0.0], 1.0);
        let z = [C::new(0.6, 0.8), C::new(0.0, 0.0)];
        assert!((p.del(&z)[0] - z[0].conj()).norm() < 1e-15);
    }

    #[test]
    fn curves_keep_interior_on_the_left() {
        for p in [
            SmoothPiece::<f64>::half_plane("y>0", 0, [0.0, -1.0], 0.0),
            SmoothPiece::half_plane("x<2", 0, [1.0, 0.0], 2.0),
            SmoothPiece::disc("D", 0, [1.0, 1.0], 0.5),
        ] {
            let c = p.curve();
            for t in [0.1, 0.7, 2.0] {
                let w = c.point(t);
                assert!(p.rho_planar(w).abs() < 1e-12);
                let left = c.tangent(t) * C::new(0.0, 1.0);
                let inward = w + left * 1e-3 / left.norm();
                assert!(p.rho_planar(inward) < 0.0, "{}", p.label);
            }
        }
    }

    #[test]
    fn distance_and_projection() {
        let p = SmoothPiece::<f64>::half_plane("x>0", 0, [-1.0, 0.0], 0.0);
        assert!((p.distance_to_zero_set(C::new(0.1, 0.5)) - 0.1).abs() < 1e-15);
        let d = SmoothPiece::<f64>::disc("D", 0, [0.0, 0.0], 1.0);
        assert!((d.distance_to_zero_set(C::new(0.0, 0.0)) - 1.0).abs() < 1e-15);
        let c = d.curve();
        let t = c.project(C::new(-2.0, 0.0), 3.0);
        assert!((t - std::f64::consts::PI).abs() < 1e-15);
    }
}
