use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::piece::{Curve, PlanarShape, SmoothPiece};
use crate::scalar::{cdist, czero, CPoint, Real, C};

/// Axis-aligned box in ℝ^{2n}, coordinates ordered `[x1, y1, x2, y2]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox<T: Real> {
    pub lo: [T; 4],
    pub hi: [T; 4],
}

impl<T: Real> BoundingBox<T> {
    pub fn planar(&self, coord: usize) -> ([T; 2], [T; 2]) {
        ([self.lo[2 * coord], self.lo[2 * coord + 1]], [self.hi[2 * coord], self.hi[2 * coord + 1]])
    }
}

/// How an active boundary arc terminates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcEnd {
    /// Meets the zero set of another piece: a corner.
    Vertex(usize),
    /// Cut by the bounding box; not a boundary point of the domain.
    Truncated,
    /// Artificial cut of a closed curve.
    Seam,
}

/// Part of a piece's zero set lying on the boundary of its planar factor.
#[derive(Clone, Debug, PartialEq)]
pub struct Arc<T: Real> {
    pub piece: usize,
    pub curve: Curve<T>,
    pub t0: T,
    pub t1: T,
    pub ends: [ArcEnd; 2],
}

impl<T: Real> Arc<T> {
    pub fn point(&self, t: T) -> C<T> {
        self.curve.point(t)
    }

    pub fn mid(&self) -> T {
        (self.t0 + self.t1) * T::lit(0.5)
    }

    /// Closest parameter on the arc and the distance to it.
    pub fn closest(&self, w: C<T>) -> (T, T) {
        let t = self.curve.project(w, self.mid()).max(self.t0).min(self.t1);
        (t, (self.curve.point(t) - w).norm())
    }

    pub fn distance(&self, w: C<T>) -> T {
        self.closest(w).1
    }

    pub fn length(&self) -> T {
        match self.curve {
            Curve::Line { .. } => self.t1 - self.t0,
            Curve::Circle { radius, .. } => radius * (self.t1 - self.t0),
        }
    }
}

/// Corner of a planar factor where two pieces meet.
#[derive(Clone, Debug, PartialEq)]
pub struct Vertex<T: Real> {
    pub point: C<T>,
    pub pieces: [usize; 2],
}

/// Parametrization of the closure of a planar factor, used for volume
/// integration and for the free coordinate of three-dimensional faces.
#[derive(Clone, Debug, PartialEq)]
pub enum PlanarRegion<T: Real> {
    Rect {
        lo: [T; 2],
        hi: [T; 2],
    },
    /// Polar coordinates `(r, θ) ∈ [0, radius] × [0, 2π]`.
    Disc {
        center: C<T>,
        radius: T,
    },
    /// Bounding rectangle with a membership mask (discontinuous integrand).
    Masked {
        lo: [T; 2],
        hi: [T; 2],
    },
}

impl<T: Real> PlanarRegion<T> {
    pub fn param_box(&self) -> ([T; 2], [T; 2]) {
        match self {
            PlanarRegion::Rect { lo, hi } | PlanarRegion::Masked { lo, hi } => (*lo, *hi),
            PlanarRegion::Disc { radius, .. } => ([T::zero(), T::zero()], [*radius, T::lit(2.0) * T::PI()]),
        }
    }

    /// Point, partial derivatives `∂w/∂u`, `∂w/∂v`, and Jacobian determinant.
    #[inline]
    pub fn map(&self, u: T, v: T) -> (C<T>, [C<T>; 2], T) {
        match self {
            PlanarRegion::Rect { .. } | PlanarRegion::Masked { .. } => {
                (C::new(u, v), [C::new(T::one(), T::zero()), C::new(T::zero(), T::one())], T::one())
            }
            PlanarRegion::Disc { center, .. } => {
                let e = C::from_polar(T::one(), v);
                (*center + e * u, [e, e * C::new(T::zero(), u)], u)
            }
        }
    }

    pub fn is_masked(&self) -> bool {
        matches!(self, PlanarRegion::Masked { .. })
    }

    pub fn area(&self) -> Option<T> {
        match self {
            PlanarRegion::Rect { lo, hi } => Some((hi[0] - lo[0]) * (hi[1] - lo[1])),
            PlanarRegion::Disc { radius, .. } => Some(T::PI() * *radius * *radius),
            PlanarRegion::Masked { .. } => None,
        }
    }
}

/// The planar domain cut out in one complex coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarFactor<T: Real> {
    pub coord: usize,
    pub pieces: Vec<usize>,
    pub arcs: Vec<Arc<T>>,
    pub vertices: Vec<Vertex<T>>,
    pub region: PlanarRegion<T>,
}

/// `Ω = ∩ⱼ Ωⱼ ⊂ ℂⁿ`, n ∈ {1, 2}, with the boundary structure precomputed.
#[derive(Clone, Debug)]
pub struct PiecewiseDomain<T: Real> {
    dim: usize,
    pieces: Vec<SmoothPiece<T>>,
    bbox: BoundingBox<T>,
    factors: Vec<PlanarFactor<T>>,
}

const ARC_SAMPLES: usize = 2048;

impl<T: Real> PiecewiseDomain<T> {
    pub fn new(dim: usize, pieces: Vec<SmoothPiece<T>>, bbox: BoundingBox<T>) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidGeometry(format!("ambient dimension {dim} not in {{1, 2}}")));
        }
        if pieces.is_empty() {
            return Err(Error::InvalidGeometry("no pieces".into()));
        }
        for k in 0..2 * dim {
            if !(bbox.lo[k] < bbox.hi[k]) {
                return Err(Error::InvalidGeometry(format!("degenerate bounding box in axis {k}")));
            }
        }
        for p in &pieces {
            if p.coord >= dim {
                return Err(Error::InvalidGeometry(format!(
                    "piece '{}' acts on coordinate {} of a {dim}-dimensional space",
                    p.label,
                    p.coord + 1
                )));
            }
            if !(p.scale > T::zero()) {
                return Err(Error::InvalidGeometry(format!("piece '{}' has nonpositive scale", p.label)));
            }
            match &p.shape {
                PlanarShape::HalfPlane { normal, .. } if normal[0].hypot(normal[1]) <= T::lit(1e-12) => {
                    return Err(Error::InvalidGeometry(format!("piece '{}' has zero gradient", p.label)))
                }
                PlanarShape::Disc { radius, .. } if !(*radius > T::zero()) => {
                    return Err(Error::InvalidGeometry(format!("piece '{}' has nonpositive radius", p.label)))
                }
                _ => {}
            }
        }
        let factors = (0..dim).map(|k| build_factor(k, &pieces, &bbox)).collect::<Result<Vec<_>>>()?;
        let dom = PiecewiseDomain { dim, pieces, bbox, factors };
        if dom.sample_interior(1, 0).is_empty() {
            return Err(Error::InvalidGeometry("domain has no interior points in its bounding box".into()));
        }
        Ok(dom)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[SmoothPiece<T>] {
        &self.pieces
    }

    pub fn bbox(&self) -> &BoundingBox<T> {
        &self.bbox
    }

    pub fn factors(&self) -> &[PlanarFactor<T>] {
        &self.factors
    }

    pub fn factor(&self, coord: usize) -> &PlanarFactor<T> {
        &self.factors[coord]
    }

    /// Same domain with every defining function multiplied by `lambda > 0`.
    pub fn rescaled(&self, lambda: T) -> Result<Self> {
        let pieces = self.pieces.iter().map(|p| p.rescaled(lambda)).collect();
        Self::new(self.dim, pieces, self.bbox)
    }

    pub fn max_rho(&self, z: &CPoint<T>) -> T {
        self.pieces.iter().map(|p| p.rho(z)).fold(T::neg_infinity(), T::max)
    }

    pub fn in_bbox(&self, z: &CPoint<T>) -> bool {
        let x = crate::scalar::to_real(z);
        (0..2 * self.dim).all(|k| x[k] >= self.bbox.lo[k] && x[k] <= self.bbox.hi[k])
    }

    /// Open membership: every ρⱼ < 0.
    pub fn contains(&self, z: &CPoint<T>) -> bool {
        self.pieces.iter().all(|p| p.rho(z) < T::zero()) && self.in_bbox(z)
    }

    /// Membership of a planar point in the closure of factor `coord`.
    pub fn planar_contains_closed(&self, coord: usize, w: C<T>, tol: T) -> bool {
        let (lo, hi) = self.bbox.planar(coord);
        self.factors[coord].pieces.iter().all(|&j| self.pieces[j].rho_planar(w) <= tol)
            && w.re >= lo[0] - tol
            && w.re <= hi[0] + tol
            && w.im >= lo[1] - tol
            && w.im <= hi[1] + tol
    }

    /// Euclidean distance from an interior point to ∂Ω.
    ///
    /// For `Ω = ∩ Ωⱼ` and `z ∈ Ω`, `dist(z, ∂Ω) = minⱼ dist(z, ∂Ωⱼ)`, and each
    /// piece distance is available in closed form.
    pub fn boundary_distance(&self, z: &CPoint<T>) -> Result<T> {
        let m = self.max_rho(z);
        if m >= T::zero() {
            return Err(Error::OutsideDomain(m.to_f64_lossy()));
        }
        Ok(self.pieces.iter().map(|p| p.distance_to_zero_set(z[p.coord])).fold(T::infinity(), T::min))
    }

    /// Closest point of the boundary of factor `coord` to `w`.
    pub fn nearest_planar_boundary(&self, coord: usize, w: C<T>) -> Option<C<T>> {
        self.factors[coord]
            .arcs
            .iter()
            .filter(|a| a.length() > T::zero())
            .map(|a| {
                let (t, d) = a.closest(w);
                (a.point(t), d)
            })
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(p, _)| p)
    }

    /// Closest point of the closed planar factor to `w` (identity inside).
    pub fn clamp_planar(&self, coord: usize, w: C<T>) -> C<T> {
        if self.planar_contains_closed(coord, w, T::zero()) {
            return w;
        }
        match self.nearest_planar_boundary(coord, w) {
            Some(p) => p,
            None => {
                let (lo, hi) = self.bbox.planar(coord);
                C::new(w.re.max(lo[0]).min(hi[0]), w.im.max(lo[1]).min(hi[1]))
            }
        }
    }

    /// Closest point of ∂Ω to `z`.
    pub fn nearest_boundary_point(&self, z: &CPoint<T>) -> Option<CPoint<T>> {
        let mut best: Option<(CPoint<T>, T)> = None;
        for k in 0..self.dim {
            let Some(bk) = self.nearest_planar_boundary(k, z[k]) else { continue };
            let mut p = *z;
            p[k] = bk;
            for m in 0..self.dim {
                if m != k {
                    p[m] = self.clamp_planar(m, z[m]);
                }
            }
            let d = cdist(&p, z);
            if best.as_ref().is_none_or(|b| d < b.1) {
                best = Some((p, d));
            }
        }
        best.map(|b| b.0)
    }

    /// Pieces whose zero set passes within `tol` of `z`.
    pub fn active_pieces(&self, z: &CPoint<T>, tol: T) -> Vec<usize> {
        (0..self.pieces.len())
            .filter(|&j| self.pieces[j].distance_to_zero_set(z[self.pieces[j].coord]) <= tol)
            .collect()
    }

    /// Deterministic rejection samples of interior points.
    pub fn sample_interior(&self, count: usize, seed: u64) -> Vec<CPoint<T>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut tries = 0usize;
        while out.len() < count && tries < 200_000 + 1000 * count {
            tries += 1;
            let mut x = [T::zero(); 4];
            for (k, xk) in x.iter_mut().enumerate().take(2 * self.dim) {
                let u: f64 = rng.gen();
                *xk = self.bbox.lo[k] + (self.bbox.hi[k] - self.bbox.lo[k]) * T::lit(u);
            }
            let z = crate::scalar::from_real(&x);
            if self.contains(&z) {
                out.push(z);
            }
        }
        out
    }

    /// Boundary points with their active pieces: `per_arc` points along every
    /// arc, and for n = 2 crossed with a `per_arc × per_arc` grid of the other
    /// factor's closure.
    pub fn boundary_samples(&self, per_arc: usize) -> Vec<(CPoint<T>, Vec<usize>)> {
        let mut out = Vec::new();
        let tol = T::lit(1e-9);
        for k in 0..self.dim {
            for arc in &self.factors[k].arcs {
                for i in 0..per_arc {
                    let s = T::lit((i as f64 + 0.5) / per_arc as f64);
                    let w = arc.point(arc.t0 + (arc.t1 - arc.t0) * s);
                    if self.dim == 1 {
                        let z = [w, czero()];
                        out.push((z, self.active_pieces(&z, tol)));
                        continue;
                    }
                    let m = 1 - k;
                    for p in self.planar_grid(m, per_arc) {
                        let mut z = [czero(); 2];
                        z[k] = w;
                        z[m] = p;
                        out.push((z, self.active_pieces(&z, tol)));
                    }
                }
            }
        }
        // corners themselves
        for k in 0..self.dim {
            for v in &self.factors[k].vertices {
                let z = if self.dim == 1 {
                    vec![[v.point, czero()]]
                } else {
                    self.planar_grid(1 - k, per_arc.min(8))
                        .into_iter()
                        .map(|p| {
                            let mut z = [czero(); 2];
                            z[k] = v.point;
                            z[1 - k] = p;
                            z
                        })
                        .collect()
                };
                for z in z {
                    out.push((z, self.active_pieces(&z, tol)));
                }
            }
        }
        out
    }

    /// Points of the closed planar factor: an interior grid plus its boundary.
    fn planar_grid(&self, coord: usize, n: usize) -> Vec<C<T>> {
        let f = &self.factors[coord];
        let (lo, hi) = f.region.param_box();
        let mut pts = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let u = lo[0] + (hi[0] - lo[0]) * T::lit(i as f64 / (n - 1).max(1) as f64);
                let v = lo[1] + (hi[1] - lo[1]) * T::lit((j as f64 + 0.5) / n as f64);
                let (w, _, _) = f.region.map(u, v);
                if self.planar_contains_closed(coord, w, T::lit(1e-9)) {
                    pts.push(w);
                }
            }
        }
        pts
    }

    /// Diameter of the bounding box.
    pub fn diameter(&self) -> T {
        (0..2 * self.dim).map(|k| (self.bbox.hi[k] - self.bbox.lo[k]).powi(2)).sum::<T>().sqrt()
    }
}

/// A piece constraint or a side of the bounding rectangle.
#[derive(Clone, Copy)]
enum Constraint<T: Real> {
    Piece(usize),
    Side { axis: usize, sign: T, value: T },
}

fn build_factor<T: Real>(coord: usize, pieces: &[SmoothPiece<T>], bbox: &BoundingBox<T>) -> Result<PlanarFactor<T>> {
    let ids: Vec<usize> = (0..pieces.len()).filter(|&j| pieces[j].coord == coord).collect();
    let (lo, hi) = bbox.planar(coord);
    let size = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let eval = |c: &Constraint<T>, w: C<T>| -> T {
        match *c {
            Constraint::Piece(k) => pieces[k].rho_planar(w),
            Constraint::Side { axis, sign, value } => {
                let x = if axis == 0 { w.re } else { w.im };
                sign * (x - value)
            }
        }
    };
    let tol_of = |c: &Constraint<T>, w: C<T>| -> T {
        match *c {
            Constraint::Piece(k) => {
                let g = pieces[k].grad_planar(w);
                T::lit(1e-12) * (g[0].hypot(g[1]) * size + T::one())
            }
            Constraint::Side { .. } => T::lit(1e-12) * size,
        }
    };

    let mut arcs = Vec::new();
    for &j in &ids {
        let curve = pieces[j].curve();
        let mut constraints: Vec<Constraint<T>> =
            ids.iter().filter(|&&k| k != j).map(|&k| Constraint::Piece(k)).collect();
        let (mut ta, mut tb, closed) = match curve {
            Curve::Line { origin, dir } => match clip_line(origin, dir, lo, hi, size) {
                Some((a, b)) => (a, b, false),
                None => continue,
            },
            Curve::Circle { .. } => {
                for axis in 0..2 {
                    constraints.push(Constraint::Side { axis, sign: T::one(), value: hi[axis] });
                    constraints.push(Constraint::Side { axis, sign: -T::one(), value: lo[axis] });
                }
                (T::zero(), T::lit(2.0) * T::PI(), true)
            }
        };
        let inside = |c: &Constraint<T>, t: T| {
            let w = curve.point(t);
            eval(c, w) <= tol_of(c, w)
        };
        let mut breaks: Vec<(T, usize)> = Vec::new();
        for (ci, c) in constraints.iter().enumerate() {
            let mut prev_t = ta;
            let mut prev = inside(c, ta);
            for i in 1..=ARC_SAMPLES {
                let t = ta + (tb - ta) * T::lit(i as f64 / ARC_SAMPLES as f64);
                let cur = inside(c, t);
                if cur != prev {
                    let (mut a, mut b) = (prev_t, t);
                    for _ in 0..100 {
                        let m = (a + b) * T::lit(0.5);
                        if m <= a || m >= b {
                            break;
                        }
                        if inside(c, m) == prev {
                            a = m;
                        } else {
                            b = m;
                        }
                    }
                    breaks.push(((a + b) * T::lit(0.5), ci));
                }
                prev = cur;
                prev_t = t;
            }
        }
        breaks.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        // a corner sitting exactly on the bounding box shows no sign change
        let tight_at = |t: T| -> ArcEnd {
            let w = curve.point(t);
            constraints
                .iter()
                .find(|c| matches!(c, Constraint::Piece(_)) && eval(c, w).abs() <= T::lit(1e3) * tol_of(c, w))
                .map(constraint_end)
                .unwrap_or(ArcEnd::Truncated)
        };
        let mut start_end = if closed { ArcEnd::Seam } else { tight_at(ta) };
        let mut end_end = if closed { ArcEnd::Seam } else { tight_at(tb) };
        if closed && !breaks.is_empty() {
            // restart the circle at its first breakpoint
            let (t_first, c_first) = breaks[0];
            ta = t_first;
            tb = t_first + T::lit(2.0) * T::PI();
            breaks.remove(0);
            let end_kind = constraint_end(&constraints[c_first]);
            start_end = end_kind;
            end_end = end_kind;
        }
        let mut cuts = vec![(ta, start_end)];
        cuts.extend(breaks.iter().map(|&(t, ci)| (t, constraint_end(&constraints[ci]))));
        cuts.push((tb, end_end));
        for w in cuts.windows(2) {
            let (t0, e0) = w[0];
            let (t1, e1) = w[1];
            if t1 - t0 <= T::lit(1e-12) * size {
                continue;
            }
            let mid = curve.point((t0 + t1) * T::lit(0.5));
            if constraints.iter().all(|c| eval(c, mid) <= tol_of(c, mid)) {
                arcs.push(Arc { piece: j, curve, t0, t1, ends: [e0, e1] });
            }
        }
    }

    let mut vertices: Vec<Vertex<T>> = Vec::new();
    for a in &arcs {
        for (e, t) in [(a.ends[0], a.t0), (a.ends[1], a.t1)] {
            if let ArcEnd::Vertex(k) = e {
                let p = a.point(t);
                let pair = if a.piece < k { [a.piece, k] } else { [k, a.piece] };
                if !vertices.iter().any(|v| v.pieces == pair && (v.point - p).norm() < T::lit(1e-8) * (T::one() + size))
                {
                    vertices.push(Vertex { point: p, pieces: pair });
                }
            }
        }
    }

    let region = if ids.is_empty() {
        PlanarRegion::Rect { lo, hi }
    } else if ids.iter().all(|&j| pieces[j].is_axis_aligned()) {
        let (mut rlo, mut rhi) = (lo, hi);
        for &j in &ids {
            if let PlanarShape::HalfPlane { normal, offset } = &pieces[j].shape {
                let axis = if normal[0] != T::zero() { 0 } else { 1 };
                let bound = *offset / normal[axis];
                if normal[axis] > T::zero() {
                    rhi[axis] = rhi[axis].min(bound);
                } else {
                    rlo[axis] = rlo[axis].max(bound);
                }
            }
        }
        PlanarRegion::Rect { lo: rlo, hi: rhi }
    } else if ids.len() == 1 {
        match &pieces[ids[0]].shape {
            PlanarShape::Disc { center, radius }
                if center[0] - *radius >= lo[0]
                    && center[0] + *radius <= hi[0]
                    && center[1] - *radius >= lo[1]
                    && center[1] + *radius <= hi[1] =>
            {
                PlanarRegion::Disc { center: C::new(center[0], center[1]), radius: *radius }
            }
            _ => PlanarRegion::Masked { lo, hi },
        }
    } else {
        PlanarRegion::Masked { lo, hi }
    };

    Ok(PlanarFactor { coord, pieces: ids, arcs, vertices, region })
}

fn constraint_end<T: Real>(c: &Constraint<T>) -> ArcEnd {
    match *c {
        Constraint::Piece(k) => ArcEnd::Vertex(k),
        Constraint::Side { .. } => ArcEnd::Truncated,
    }
}

/// Parameter interval of `origin + t·dir` inside the closed rectangle.
fn clip_line<T: Real>(origin: C<T>, dir: C<T>, lo: [T; 2], hi: [T; 2], size: T) -> Option<(T, T)> {
    let slack = T::lit(1e-12) * size;
    let mut a = T::neg_infinity();
    let mut b = T::infinity();
    for (p, d, l, h) in [(origin.re, dir.re, lo[0], hi[0]), (origin.im, dir.im, lo[1], hi[1])] {
        if d.abs() <= T::lit(1e-15) {
            if p < l - slack || p > h + slack {
                return None;
            }
        } else {
            let t1 = (l - p) / d;
            let t2 = (h - p) / d;
            a = a.max(t1.min(t2));
            b = b.min(t1.max(t2));
        }
    }
    (b > a).then_some((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::presets;

    #[test]
    fn square_has_four_edges_and_four_corners() {
        let d = presets::square::<f64>();
        let f = d.factor(0);
        assert_eq!(f.arcs.len(), 4);
        assert_eq!(f.vertices.len(), 4);
        let total: f64 = f.arcs.iter().map(|a| a.length()).sum();
        assert!((total - 8.0).abs() < 1e-12);
        for a in &f.arcs {
            assert!(matches!(a.ends[0], ArcEnd::Vertex(_)) && matches!(a.ends[1], ArcEnd::Vertex(_)));
        }
        let mut corners: Vec<(f64, f64)> = f.vertices.iter().map(|v| (v.point.re, v.point.im)).collect();
        corners.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let want = [(0.0, 0.0), (0.0, 2.0), (2.0, 0.0), (2.0, 2.0)];
        for (c, w) in corners.iter().zip(want) {
            assert!((c.0 - w.0).abs() < 1e-12 && (c.1 - w.1).abs() < 1e-12, "{c:?}");
        }
        assert_eq!(f.region, PlanarRegion::Rect { lo: [0.0, 0.0], hi: [2.0, 2.0] });
    }

    #[test]
    fn disc_factor_is_one_closed_arc() {
        let d = presets::bidisc::<f64>();
        for k in 0..2 {
            let f = d.factor(k);
            assert_eq!(f.arcs.len(), 1);
            assert!(f.vertices.is_empty());
            assert!((f.arcs[0].length() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
            assert!(matches!(f.region, PlanarRegion::Disc { .. }));
        }
    }

    #[test]
    fn boundary_distance_examples() {
        let sq = presets::square::<f64>();
        let z = |a: f64, b: f64| [C::new(a, b), C::new(0.0, 0.0)];
        assert!((sq.boundary_distance(&z(1.0, 1.0)).unwrap() - 1.0).abs() < 1e-12);
        assert!((sq.boundary_distance(&z(0.1, 0.5)).unwrap() - 0.1).abs() < 1e-12);
        assert!(matches!(sq.boundary_distance(&z(-0.1, 0.5)), Err(Error::OutsideDomain(_))));
        let bd = presets::bidisc::<f64>();
        let o = [C::new(0.0, 0.0), C::new(0.0, 0.0)];
        assert!((bd.boundary_distance(&o).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_distance_agrees_with_brute_force_on_square() {
        // brute force: minimum over a dense sampling of the four edges
        let sq = presets::square::<f64>();
        let mut edge = Vec::new();
        for i in 0..=4000 {
            let t = 2.0 * i as f64 / 4000.0;
            edge.extend([C::new(t, 0.0), C::new(t, 2.0), C::new(0.0, t), C::new(2.0, t)]);
        }
        for z in sq.sample_interior(25, 3) {
            let bf = edge.iter().map(|p| (p - z[0]).norm()).fold(f64::INFINITY, f64::min);
            let d = sq.boundary_distance(&z).unwrap();
            assert!((d - bf).abs() <= 1e-3 * bf);
        }
    }

    #[test]
    fn disc_cut_by_half_plane() {
        // half disc {|z| < 1, y > 0}: one arc of the circle, one segment, two corners
        let bbox = BoundingBox { lo: [-1.5, -1.5, 0.0, 0.0], hi: [1.5, 1.5, 0.0, 0.0] };
        let d = PiecewiseDomain::new(
            1,
            vec![SmoothPiece::disc("D", 0, [0.0, 0.0], 1.0), SmoothPiece::half_plane("y>0", 0, [0.0, -1.0], 0.0)],
            bbox,
        )
        .unwrap();
        let f = d.factor(0);
        assert_eq!(f.arcs.len(), 2);
        assert_eq!(f.vertices.len(), 2);
        let lens: f64 = f.arcs.iter().map(|a| a.length()).sum();
        assert!((lens - (std::f64::consts::PI + 2.0)).abs() < 1e-9);
        assert!(f.region.is_masked());
    }

    #[test]
    fn rejects_invalid_input() {
        let bbox = BoundingBox { lo: [0.0; 4], hi: [1.0; 4] };
        assert!(PiecewiseDomain::<f64>::new(3, vec![], bbox).is_err());
        let bad = SmoothPiece::half_plane("zero", 0, [0.0, 0.0], 0.0);
        assert!(PiecewiseDomain::new(1, vec![bad], bbox).is_err());
        // empty intersection
        let a = SmoothPiece::half_plane("x<0.2", 0, [1.0, 0.0], 0.2);
        let b = SmoothPiece::half_plane("x>0.8", 0, [-1.0, 0.0], -0.8);
        assert!(PiecewiseDomain::new(1, vec![a, b], bbox).is_err());
    }
}
