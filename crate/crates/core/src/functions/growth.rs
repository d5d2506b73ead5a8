use crate::error::Result;
use crate::functions::{random_directions, HolomorphicFunction};
use crate::geometry::PiecewiseDomain;
use crate::linalg;
use crate::scalar::{czero, from_real, to_real, CPoint, Real, C};

/// Fitted bound `|f(z)| ≈ C / d^k` near the singular part of the boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthEstimate<T: Real> {
    pub k_hat: T,
    pub c_hat: T,
    pub r2: T,
    pub samples_used: usize,
}

const LEVELS: std::ops::RangeInclusive<i32> = 3..=12;

/// Regresses `log max|f|` on `log d` along inward rays ending at the boundary
/// points nearest to the poles (or at corners and face midpoints when `f`
/// has no poles), for `d = 2^{-m}`, `m = 3..12`.
pub fn estimate_growth<T: Real>(
    f: &HolomorphicFunction<T>,
    domain: &PiecewiseDomain<T>,
    n_rays: usize,
) -> Result<GrowthEstimate<T>> {
    f.check_no_interior_poles(domain)?;
    let targets = singular_targets(f, domain);
    let n = domain.dim();
    let dirs: Vec<[T; 4]> = if n == 1 {
        (0..n_rays)
            .map(|i| {
                let a = T::lit(2.0 * std::f64::consts::PI * (i as f64 + 0.5) / n_rays as f64);
                [a.cos(), a.sin(), T::zero(), T::zero()]
            })
            .collect()
    } else {
        random_directions(n_rays, 4, 0x9e3779b9)
    };

    let levels: Vec<i32> = LEVELS.collect();
    let mut envelope = vec![T::zero(); levels.len()];
    let mut used = 0usize;
    for p in &targets {
        let x = to_real(p);
        for u in &dirs {
            let pts: Vec<CPoint<T>> = levels
                .iter()
                .map(|&m| {
                    let d = T::lit(2f64.powi(-m));
                    let mut y = x;
                    for k in 0..2 * n {
                        y[k] = y[k] + d * u[k];
                    }
                    from_real(&y)
                })
                .collect();
            if !pts.iter().all(|z| domain.contains(z)) {
                continue;
            }
            for (e, z) in envelope.iter_mut().zip(&pts) {
                let v = f.eval(z).norm();
                if v.is_finite() {
                    *e = e.max(v);
                }
                used += 1;
            }
        }
    }

    let xs: Vec<T> = levels.iter().map(|&m| T::lit(2f64.powi(-m)).ln()).collect();
    let ys: Vec<T> = envelope.iter().map(|e| e.max(T::min_positive_value()).ln()).collect();
    let rows = xs.len();
    let mut a = Vec::with_capacity(rows * 2);
    for x in &xs {
        a.extend([T::one(), *x]);
    }
    let coef = linalg::least_squares(&a, rows, 2, &ys).unwrap_or_else(|| vec![T::zero(), T::zero()]);
    let (intercept, slope) = (coef[0], coef[1]);
    let mean = ys.iter().copied().sum::<T>() / T::from_usize_lossy(rows);
    let ss_tot: T = ys.iter().map(|y| (*y - mean) * (*y - mean)).sum();
    let ss_res: T = xs.iter().zip(&ys).map(|(x, y)| (*y - intercept - slope * *x).powi(2)).sum();
    let r2 = if ss_tot <= T::lit(1e-24) * (T::one() + mean * mean) {
        T::one()
    } else {
        (T::one() - ss_res / ss_tot).max(T::zero()).min(T::one())
    };
    Ok(GrowthEstimate { k_hat: (-slope).max(T::zero()), c_hat: intercept.exp(), r2, samples_used: used })
}

/// Boundary points where growth is expected.
fn singular_targets<T: Real>(f: &HolomorphicFunction<T>, domain: &PiecewiseDomain<T>) -> Vec<CPoint<T>> {
    let interior = domain.sample_interior(1, 11).first().copied().unwrap_or([czero(), czero()]);
    let lift = |k: usize, w: C<T>| {
        let mut z = interior;
        z[k] = w;
        z
    };
    let mut out = Vec::new();
    for p in f.poles() {
        match p.coordinate_root() {
            Some((k, a)) if k < domain.dim() => {
                if let Some(b) = domain.nearest_planar_boundary(k, a) {
                    out.push(lift(k, b));
                }
            }
            _ => {
                if let Some(b) = domain.nearest_boundary_point(&p.project(&interior)) {
                    out.push(b);
                }
            }
        }
    }
    if out.is_empty() {
        for k in 0..domain.dim() {
            let fac = domain.factor(k);
            out.extend(fac.vertices.iter().map(|v| lift(k, v.point)));
            out.extend(fac.arcs.iter().map(|a| lift(k, a.point(a.mid()))));
        }
    }
    out
}
