use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::bump::{gate, plateau, smooth_step};
use crate::geometry::domain::{Arc, PiecewiseDomain};
use crate::scalar::{czero, CPoint, Real, C};

/// Bump factor acting on one complex coordinate.
#[derive(Clone, Debug, PartialEq)]
pub enum PlanarBump<T: Real> {
    /// 1 on `|w − center| ≤ inner`, 0 beyond `outer`.
    Ball { center: C<T>, inner: T, outer: T },
    /// Tube around a window `[lo, hi]` of an arc's curve, with smooth parameter
    /// ramps of length `ramp`, switched off where the listed other arcs are at
    /// least as close as this one.
    Strip { arc: Arc<T>, lo: T, hi: T, ramp: T, inner: T, outer: T, gates: Vec<Arc<T>>, gate_lo: T, gate_hi: T },
    /// 0 near the boundary of the factor, 1 farther than `hi` from it.
    Interior { arcs: Vec<Arc<T>>, lo: T, hi: T },
    /// Constant 1.
    Free,
}

impl<T: Real> PlanarBump<T> {
    pub fn eval(&self, w: C<T>) -> T {
        match self {
            PlanarBump::Ball { center, inner, outer } => plateau((w - center).norm(), *inner, *outer),
            PlanarBump::Strip { arc, lo, hi, ramp, inner, outer, gates, gate_lo, gate_hi } => {
                let t = arc.curve.project(w, (*lo + *hi) * T::lit(0.5));
                if t <= *lo - *ramp || t >= *hi + *ramp {
                    return T::zero();
                }
                let d = (arc.curve.point(t) - w).norm();
                if d >= *outer {
                    return T::zero();
                }
                let phi = plateau(d, *inner, *outer)
                    * smooth_step((t - (*lo - *ramp)) / *ramp)
                    * smooth_step(((*hi + *ramp) - t) / *ramp);
                if phi == T::zero() || gates.is_empty() {
                    return phi;
                }
                // off on every other face, on along this one once clear of the others
                let own = arc.distance(w);
                let other = gates.iter().map(|g| g.distance(w)).fold(T::infinity(), T::min);
                phi * gate(other - own, *gate_lo, *gate_hi)
            }
            PlanarBump::Interior { arcs, lo, hi } => {
                let d = arcs.iter().map(|a| a.distance(w)).fold(T::infinity(), T::min);
                gate(d, *lo, *hi)
            }
            PlanarBump::Free => T::one(),
        }
    }
}

/// A chart `U` with a common translation direction `v` and a bump supported in `U`.
#[derive(Clone, Debug)]
pub struct TranslationChart<T: Real> {
    pub label: String,
    /// Representative point of the chart, for reports.
    pub center: CPoint<T>,
    /// `v ∈ ℂⁿ ≅ ℝ^{2n}`.
    pub v: CPoint<T>,
    /// One bump factor per coordinate; the chart bump is their product.
    pub parts: Vec<PlanarBump<T>>,
    /// Minimum of `∇ρⱼ·v` over sampled boundary points of the support.
    pub margin: T,
}

impl<T: Real> TranslationChart<T> {
    /// Chart on a disc `|z₁ − center| < radius` in ℂ, plateau on half the radius.
    pub fn ball(label: &str, center: C<T>, radius: T, v: C<T>) -> Self {
        TranslationChart {
            label: label.to_string(),
            center: [center, czero()],
            v: [v, czero()],
            parts: vec![PlanarBump::Ball { center, inner: radius * T::lit(0.5), outer: radius }],
            margin: T::nan(),
        }
    }

    pub fn bump(&self, z: &CPoint<T>) -> T {
        let mut phi = T::one();
        for (k, p) in self.parts.iter().enumerate() {
            phi = phi * p.eval(z[k]);
            if phi == T::zero() {
                break;
            }
        }
        phi
    }
}

#[derive(Clone, Debug)]
pub struct CoverOptions {
    /// Corner ball radius; also the strip tube width.
    pub radius: f64,
    /// Rotation (radians) applied to every corner vector.
    pub tilt: f64,
    /// Strips per full circle.
    pub sectors_per_circle: usize,
    /// Relative window overlap of neighbouring strips.
    pub overlap: f64,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions { radius: 0.3, tilt: 0.0, sectors_per_circle: 8, overlap: 0.2 }
    }
}

/// Charts covering ∂Ω and the partition of unity `χᵢ = φᵢ / Σ φ`.
#[derive(Clone, Debug)]
pub struct ChartCover<T: Real> {
    pub charts: Vec<TranslationChart<T>>,
    /// Distinct planar bumps per coordinate and, per chart, their indices.
    planar: Vec<Vec<PlanarBump<T>>>,
    index: Vec<[usize; 2]>,
    /// Smallest `Σ φᵢ` seen on sampled boundary points.
    pub min_bump_sum: T,
    /// Largest `|Σ χᵢ − 1|` over the same samples.
    pub partition_defect: T,
    pub samples_checked: usize,
}

impl<T: Real> ChartCover<T> {
    /// Writes `χᵢ(z)` into `out` and returns `Σ φᵢ(z)`. All weights are zero
    /// when no chart reaches `z`.
    pub fn weights(&self, z: &CPoint<T>, out: &mut [T]) -> T {
        let mut vals: [Vec<T>; 2] = [Vec::new(), Vec::new()];
        for (k, bumps) in self.planar.iter().enumerate() {
            vals[k] = bumps.iter().map(|b| b.eval(z[k])).collect();
        }
        let mut sum = T::zero();
        for (i, idx) in self.index.iter().enumerate() {
            let mut phi = vals[0][idx[0]];
            if self.planar.len() > 1 {
                phi = phi * vals[1][idx[1]];
            }
            out[i] = phi;
            sum = sum + phi;
        }
        if sum > T::zero() {
            for o in out.iter_mut() {
                *o = *o / sum;
            }
        }
        sum
    }

    /// As [`ChartCover::weights`], reusing planar bump values already seen
    /// for the same coordinate value. Tensor rules revisit each coordinate
    /// value many times.
    pub fn weights_cached(&self, z: &CPoint<T>, out: &mut [T], cache: &mut WeightCache<T>) -> T {
        let mut base = [0usize; 2];
        for (k, bumps) in self.planar.iter().enumerate() {
            let key = (z[k].re.to_f64_lossy().to_bits(), z[k].im.to_f64_lossy().to_bits());
            let store = &mut cache.store[k];
            base[k] = match cache.index[k].get(&key) {
                Some(&i) => i,
                None => {
                    if store.len() >= WeightCache::<T>::MAX_VALUES {
                        store.clear();
                        cache.index[k].clear();
                    }
                    let i = store.len();
                    store.extend(bumps.iter().map(|b| b.eval(z[k])));
                    cache.index[k].insert(key, i);
                    i
                }
            };
        }
        let mut sum = T::zero();
        for (i, idx) in self.index.iter().enumerate() {
            let mut phi = cache.store[0][base[0] + idx[0]];
            if self.planar.len() > 1 {
                phi = phi * cache.store[1][base[1] + idx[1]];
            }
            out[i] = phi;
            sum = sum + phi;
        }
        if sum > T::zero() {
            for o in out.iter_mut() {
                *o = *o / sum;
            }
        }
        sum
    }

    /// Cover made of the given charts, each validated for an outward vector.
    /// The charts need not reach all of ∂Ω; uncovered points get weight 0.
    pub fn from_charts(domain: &PiecewiseDomain<T>, charts: Vec<TranslationChart<T>>) -> Result<Self> {
        let n = domain.dim();
        let mut planar: Vec<Vec<PlanarBump<T>>> = vec![Vec::new(); n];
        let mut index = Vec::new();
        let mut charts = charts;
        for c in charts.iter_mut() {
            if c.parts.len() != n || c.v.len() < n {
                return Err(Error::InvalidGeometry(format!(
                    "chart {} has {} bump factors for n = {n}",
                    c.label,
                    c.parts.len()
                )));
            }
            let mut idx = [0usize; 2];
            for k in 0..n {
                idx[k] = planar[k].len();
                planar[k].push(c.parts[k].clone());
            }
            index.push(idx);
            c.margin = validate_outward(c, domain);
            if !(c.margin > T::zero()) {
                return Err(Error::NoOutwardVector { center: c.label.clone(), margin: c.margin.to_f64_lossy() });
            }
        }
        Ok(ChartCover { charts, planar, index, min_bump_sum: T::nan(), partition_defect: T::nan(), samples_checked: 0 })
    }

    pub fn len(&self) -> usize {
        self.charts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charts.is_empty()
    }
}

/// Memo of planar bump values keyed by the exact coordinate value.
#[derive(Debug, Default)]
pub struct WeightCache<T: Real> {
    index: [HashMap<(u64, u64), usize>; 2],
    store: [Vec<T>; 2],
}

impl<T: Real> WeightCache<T> {
    const MAX_VALUES: usize = 1 << 20;

    pub fn new() -> Self {
        WeightCache { index: [HashMap::new(), HashMap::new()], store: [Vec::new(), Vec::new()] }
    }
}

struct PlanarChart<T: Real> {
    label: String,
    center: C<T>,
    v: C<T>,
    bump: PlanarBump<T>,
}

fn planar_charts<T: Real>(domain: &PiecewiseDomain<T>, coord: usize, opts: &CoverOptions) -> Vec<PlanarChart<T>> {
    let f = domain.factor(coord);
    let r = T::lit(opts.radius);
    let mut out = Vec::new();
    let rot = C::from_polar(T::one(), T::lit(opts.tilt));
    for v in &f.vertices {
        let n: C<T> = v.pieces.iter().map(|&j| domain.pieces()[j].unit_normal(v.point)).fold(czero(), |a, b| a + b);
        let dir = if n.norm() > T::lit(1e-12) {
            n / n.norm() * rot
        } else {
            // opposite normals: no common outward direction exists
            czero()
        };
        out.push(PlanarChart {
            label: format!("corner {}/{}", domain.pieces()[v.pieces[0]].label, domain.pieces()[v.pieces[1]].label),
            center: v.point,
            v: dir,
            bump: PlanarBump::Ball { center: v.point, inner: r * T::lit(0.5), outer: r },
        });
    }
    let delta = r / T::lit(8.0);
    for (ai, arc) in f.arcs.iter().enumerate() {
        let gates: Vec<Arc<T>> =
            f.arcs.iter().enumerate().filter(|(bi, _)| *bi != ai).map(|(_, b)| b.clone()).collect();
        let pieces = match arc.curve {
            crate::geometry::piece::Curve::Line { .. } => 1,
            crate::geometry::piece::Curve::Circle { .. } => {
                let frac = ((arc.t1 - arc.t0) / (T::lit(2.0) * T::PI())).to_f64_lossy();
                ((opts.sectors_per_circle as f64 * frac).ceil() as usize).max(1)
            }
        };
        let len = (arc.t1 - arc.t0) / T::from_usize_lossy(pieces);
        for s in 0..pieces {
            let lo = arc.t0 + len * T::from_usize_lossy(s);
            let hi = lo + len;
            let mid = arc.point((lo + hi) * T::lit(0.5));
            let label = if pieces == 1 {
                format!("face {}", domain.pieces()[arc.piece].label)
            } else {
                format!("face {} sector {}", domain.pieces()[arc.piece].label, s + 1)
            };
            out.push(PlanarChart {
                label,
                center: mid,
                v: domain.pieces()[arc.piece].unit_normal(mid),
                bump: PlanarBump::Strip {
                    arc: arc.clone(),
                    lo,
                    hi,
                    ramp: len * T::lit(opts.overlap),
                    inner: r * T::lit(0.5),
                    outer: r,
                    gates: gates.clone(),
                    gate_lo: delta,
                    gate_hi: delta * T::lit(2.0),
                },
            });
        }
    }
    out
}

/// Corner balls around every vertex and strips along every face, producted
/// across the two coordinates when n = 2, each with a validated outward vector.
pub fn build_chart_cover<T: Real>(domain: &PiecewiseDomain<T>, opts: &CoverOptions) -> Result<ChartCover<T>> {
    if !(opts.radius > 0.0) || !(0.0..1.0).contains(&opts.overlap) || opts.sectors_per_circle == 0 {
        return Err(Error::InvalidGeometry("invalid chart cover options".into()));
    }
    let r = T::lit(opts.radius);
    let delta = r / T::lit(8.0);
    let per: Vec<Vec<PlanarChart<T>>> = (0..domain.dim()).map(|k| planar_charts(domain, k, opts)).collect();

    let mut planar: Vec<Vec<PlanarBump<T>>> = per.iter().map(|p| p.iter().map(|c| c.bump.clone()).collect()).collect();
    // trailing entry per coordinate: the interior gate (or constant 1)
    let interior: Vec<usize> = (0..domain.dim())
        .map(|k| {
            let arcs = domain.factor(k).arcs.clone();
            planar[k].push(if arcs.is_empty() {
                PlanarBump::Free
            } else {
                PlanarBump::Interior { arcs, lo: delta, hi: delta * T::lit(2.0) }
            });
            planar[k].len() - 1
        })
        .collect();

    let mut charts = Vec::new();
    let mut index = Vec::new();
    let z0 = czero();
    if domain.dim() == 1 {
        for (i, c) in per[0].iter().enumerate() {
            charts.push(TranslationChart {
                label: c.label.clone(),
                center: [c.center, z0],
                v: [c.v, z0],
                parts: vec![c.bump.clone()],
                margin: T::nan(),
            });
            index.push([i, 0]);
        }
    } else {
        let interior_center = |k: usize| domain.sample_interior(1, 7).first().map(|z| z[k]).unwrap_or(z0);
        for (i, a) in per[0].iter().enumerate() {
            charts.push(TranslationChart {
                label: format!("{} x interior", a.label),
                center: [a.center, interior_center(1)],
                v: [a.v, z0],
                parts: vec![a.bump.clone(), planar[1][interior[1]].clone()],
                margin: T::nan(),
            });
            index.push([i, interior[1]]);
        }
        for (j, b) in per[1].iter().enumerate() {
            charts.push(TranslationChart {
                label: format!("interior x {}", b.label),
                center: [interior_center(0), b.center],
                v: [z0, b.v],
                parts: vec![planar[0][interior[0]].clone(), b.bump.clone()],
                margin: T::nan(),
            });
            index.push([interior[0], j]);
        }
        for (i, a) in per[0].iter().enumerate() {
            for (j, b) in per[1].iter().enumerate() {
                let norm = (a.v.norm_sqr() + b.v.norm_sqr()).sqrt();
                charts.push(TranslationChart {
                    label: format!("{} x {}", a.label, b.label),
                    center: [a.center, b.center],
                    v: [a.v / norm, b.v / norm],
                    parts: vec![a.bump.clone(), b.bump.clone()],
                    margin: T::nan(),
                });
                index.push([i, j]);
            }
        }
    }

    for c in charts.iter_mut() {
        c.margin = validate_outward(c, domain);
        if !(c.margin > T::zero()) {
            return Err(Error::NoOutwardVector { center: c.label.clone(), margin: c.margin.to_f64_lossy() });
        }
    }

    let mut cover = ChartCover {
        charts,
        planar,
        index,
        min_bump_sum: T::infinity(),
        partition_defect: T::zero(),
        samples_checked: 0,
    };
    let mut w = vec![T::zero(); cover.len()];
    let samples = domain.boundary_samples(if domain.dim() == 1 { 200 } else { 24 });
    for (z, _) in &samples {
        let s = cover.weights(z, &mut w);
        cover.min_bump_sum = cover.min_bump_sum.min(s);
        let total: T = w.iter().copied().sum();
        cover.partition_defect = cover.partition_defect.max((total - T::one()).abs());
    }
    cover.samples_checked = samples.len();
    if !(cover.min_bump_sum > T::zero()) {
        return Err(Error::InvalidGeometry("chart cover leaves part of the boundary uncovered".into()));
    }
    Ok(cover)
}

/// Minimum over sampled boundary points `p` in the support of the chart and
/// pieces `j` active at `p` of `∇ρⱼ(p)·v`. Positive means `v` points outward
/// along every face the chart meets. Returns `+∞` if the support misses ∂Ω.
pub fn validate_outward<T: Real>(chart: &TranslationChart<T>, domain: &PiecewiseDomain<T>) -> T {
    let pts = support_boundary_points(chart, domain, 200);
    let tol = T::lit(1e-9) * (T::one() + domain.diameter());
    let v = crate::scalar::to_real(&chart.v);
    let mut margin = T::infinity();
    for z in &pts {
        for p in domain.pieces() {
            if p.distance_to_zero_set(z[p.coord]) <= tol {
                let g = p.grad(z);
                let d: T = (0..4).map(|k| g[k] * v[k]).sum();
                margin = margin.min(d);
            }
        }
    }
    margin
}

/// Boundary points of Ω where the chart bump is positive; at least `want`
/// of them whenever the support meets ∂Ω in a set of positive measure.
pub fn support_boundary_points<T: Real>(
    chart: &TranslationChart<T>,
    domain: &PiecewiseDomain<T>,
    want: usize,
) -> Vec<CPoint<T>> {
    let mut density = 256usize;
    loop {
        let pts = support_points_at(chart, domain, density);
        if pts.len() >= want || density >= 16384 {
            return pts;
        }
        density *= 4;
    }
}

fn support_points_at<T: Real>(
    chart: &TranslationChart<T>,
    domain: &PiecewiseDomain<T>,
    density: usize,
) -> Vec<CPoint<T>> {
    let arc_points = |k: usize| -> Vec<C<T>> {
        let mut v = Vec::new();
        for a in &domain.factor(k).arcs {
            for i in 0..=density {
                let s = T::lit(i as f64 / density as f64);
                v.push(a.point(a.t0 + (a.t1 - a.t0) * s));
            }
        }
        v
    };
    let z0 = czero();
    if domain.dim() == 1 {
        return arc_points(0).into_iter().map(|w| [w, z0]).filter(|z| chart.bump(z) > T::zero()).collect();
    }
    let side = ((density as f64).sqrt() as usize).max(8);
    let closure_points = |k: usize| -> Vec<C<T>> {
        let mut v = arc_points(k);
        let (lo, hi) = domain.bbox().planar(k);
        for i in 0..=side {
            for j in 0..=side {
                let w = C::new(
                    lo[0] + (hi[0] - lo[0]) * T::lit(i as f64 / side as f64),
                    lo[1] + (hi[1] - lo[1]) * T::lit(j as f64 / side as f64),
                );
                if domain.planar_contains_closed(k, w, T::zero()) {
                    v.push(w);
                }
            }
        }
        v
    };
    let keep = |k: usize, pts: Vec<C<T>>| -> Vec<C<T>> {
        pts.into_iter().filter(|w| chart.parts[k].eval(*w) > T::zero()).collect()
    };
    let mut out = Vec::new();
    for k in 0..2 {
        let on = keep(k, arc_points(k));
        let other = keep(1 - k, closure_points(1 - k));
        if on.is_empty() || other.is_empty() {
            continue;
        }
        // thin the cross product to a few thousand points
        let total = on.len() * other.len();
        let stride = (total / 4096).max(1);
        let mut idx = 0usize;
        while idx < total {
            let (a, b) = (on[idx / other.len()], other[idx % other.len()]);
            let mut z = [z0, z0];
            z[k] = a;
            z[1 - k] = b;
            out.push(z);
            idx += stride;
        }
    }
    out
}
