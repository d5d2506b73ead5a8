use crate::functions::poles::Pole;
use crate::geometry::domain::{Arc, ArcEnd, PiecewiseDomain, PlanarRegion};
use crate::scalar::{czero, CPoint, Real, C};

/// Parametrized piece of ∂Ω: one active arc of a planar factor, crossed with
/// the closure of the other factor when n = 2.
///
/// Parameter order is `t` for n = 1, `(t, u, v)` when the arc lies in the
/// first coordinate and `(u, v, t)` when it lies in the second. With these
/// orders the induced boundary orientation is positive.
#[derive(Clone, Debug)]
pub struct FacePatch<T: Real> {
    pub owner: usize,
    pub coord: usize,
    pub arc: Arc<T>,
    /// Parametrization of the other factor (n = 2 only).
    pub other: Option<PlanarRegion<T>>,
    pub orientation_sign: T,
}

/// Tangent frame: the partial derivatives of the parametrization, as vectors of ℂ².
pub type Frame<T> = [[C<T>; 2]; 3];

impl<T: Real> FacePatch<T> {
    pub fn param_dim(&self) -> usize {
        if self.other.is_some() {
            3
        } else {
            1
        }
    }

    fn t_axis(&self) -> usize {
        if self.other.is_some() && self.coord == 1 {
            2
        } else {
            0
        }
    }

    fn uv_axes(&self) -> usize {
        if self.coord == 0 {
            1
        } else {
            0
        }
    }

    pub fn param_box(&self) -> (Vec<T>, Vec<T>) {
        let mut lo = vec![T::zero(); self.param_dim()];
        let mut hi = lo.clone();
        lo[self.t_axis()] = self.arc.t0;
        hi[self.t_axis()] = self.arc.t1;
        if let Some(r) = &self.other {
            let (rlo, rhi) = r.param_box();
            let a = self.uv_axes();
            lo[a] = rlo[0];
            lo[a + 1] = rlo[1];
            hi[a] = rhi[0];
            hi[a + 1] = rhi[1];
        }
        (lo, hi)
    }

    /// Point and tangent frame at parameter `s`.
    #[inline]
    pub fn map(&self, s: &[T]) -> (CPoint<T>, Frame<T>) {
        let z0 = czero();
        let t = s[self.t_axis()];
        let w = self.arc.point(t);
        let dw = self.arc.curve.tangent(t);
        let mut z = [z0, z0];
        let mut frame = [[z0, z0]; 3];
        z[self.coord] = w;
        frame[self.t_axis()][self.coord] = dw;
        if let Some(r) = &self.other {
            let a = self.uv_axes();
            let m = 1 - self.coord;
            let (p, d, _) = r.map(s[a], s[a + 1]);
            z[m] = p;
            frame[a][m] = d[0];
            frame[a + 1][m] = d[1];
        }
        (z, frame)
    }

    /// Pullback of the (n, n−1)-form with coefficients `g` to the parameter
    /// space, per unit parameter volume.
    ///
    /// n = 1: `g[0] dz`. n = 2: `g[0] dz₁∧dz₂∧dz̄₁ + g[1] dz₁∧dz₂∧dz̄₂`.
    #[inline]
    pub fn pullback(&self, g: &[C<T>; 2], frame: &Frame<T>) -> C<T> {
        let v = if self.other.is_none() {
            g[0] * frame[0][0]
        } else {
            let rows = |k: usize| -> [[C<T>; 3]; 3] {
                let mut m = [[czero(); 3]; 3];
                for a in 0..3 {
                    m[0][a] = frame[a][0];
                    m[1][a] = frame[a][1];
                    m[2][a] = frame[a][k].conj();
                }
                m
            };
            g[0] * det3(&rows(0)) + g[1] * det3(&rows(1))
        };
        v * self.orientation_sign
    }

    /// Whether the point lies on ∂Ω (the other factor may need a membership test).
    pub fn active(&self, domain: &PiecewiseDomain<T>, z: &CPoint<T>) -> bool {
        match &self.other {
            Some(r) if r.is_masked() => domain.planar_contains_closed(1 - self.coord, z[1 - self.coord], T::zero()),
            _ => true,
        }
    }

    /// Parameter values along each axis near which the integrand is singular
    /// or kinked: arc ends at corners, boundary of the other factor, and the
    /// nearest points to pole loci passing within `radius` of the patch.
    pub fn hot_values(&self, domain: &PiecewiseDomain<T>, poles: &[(Pole<T>, T)]) -> Vec<Vec<T>> {
        let mut hot = vec![Vec::new(); self.param_dim()];
        let ta = self.t_axis();
        if matches!(self.arc.ends[0], ArcEnd::Vertex(_)) {
            hot[ta].push(self.arc.t0);
        }
        if matches!(self.arc.ends[1], ArcEnd::Vertex(_)) {
            hot[ta].push(self.arc.t1);
        }
        let m = 1 - self.coord;
        if let Some(r) = &self.other {
            let a = self.uv_axes();
            let has_boundary = !domain.factor(m).arcs.is_empty();
            match r {
                PlanarRegion::Rect { lo, hi } if has_boundary => {
                    for v in &domain.factor(m).vertices {
                        hot[a].push(v.point.re);
                        hot[a + 1].push(v.point.im);
                    }
                    hot[a].extend([lo[0], hi[0]]);
                    hot[a + 1].extend([lo[1], hi[1]]);
                }
                PlanarRegion::Disc { radius, .. } => hot[a].push(*radius),
                _ => {}
            }
        }
        for (p, radius) in poles {
            let Some((k, root)) = p.coordinate_root() else { continue };
            if k == self.coord {
                let (t, d) = self.arc.closest(root);
                if d <= *radius {
                    hot[ta].push(t);
                }
            } else if let Some(r) = &self.other {
                let a = self.uv_axes();
                match r {
                    PlanarRegion::Rect { lo, hi } | PlanarRegion::Masked { lo, hi } => {
                        hot[a].push(root.re.max(lo[0]).min(hi[0]));
                        hot[a + 1].push(root.im.max(lo[1]).min(hi[1]));
                    }
                    PlanarRegion::Disc { center, radius: rr } => {
                        let d = root - center;
                        hot[a].push(d.norm().min(*rr));
                        let mut th = d.arg();
                        if th < T::zero() {
                            th = th + T::lit(2.0) * T::PI();
                        }
                        hot[a + 1].push(th);
                    }
                }
            }
        }
        hot
    }
}

fn det3<T: Real>(m: &[[C<T>; 3]; 3]) -> C<T> {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

impl<T: Real> PiecewiseDomain<T> {
    /// Face patches covering ∂Ω, one per active arc.
    pub fn face_patches(&self) -> Vec<FacePatch<T>> {
        let mut out = Vec::new();
        for k in 0..self.dim() {
            for arc in &self.factor(k).arcs {
                out.push(FacePatch {
                    owner: arc.piece,
                    coord: k,
                    arc: arc.clone(),
                    other: (self.dim() == 2).then(|| self.factor(1 - k).region.clone()),
                    orientation_sign: T::one(),
                });
            }
        }
        out
    }
}
