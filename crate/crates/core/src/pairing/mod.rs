//! The boundary pairing `F(ε) = Σᵢ ∫_{∂Ω} χᵢ f(z − εvᵢ) ψ`, its volume and
//! face-density oracles, and Weinstock tests.

pub mod face;
pub mod form;
pub mod stokes;
pub mod weinstock;

use std::cell::RefCell;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functions::{HolomorphicFunction, Pole};
use crate::geometry::{ChartCover, PiecewiseDomain, WeightCache};
use crate::quadrature::{integrate_boundary, DiagnosticRow, QuadratureSpec};
use crate::scalar::{czero, CPoint, Real, C};

pub use face::{face_distribution_pairing, FaceDistribution};
pub use form::{Cutoff, TestForm};
pub use stokes::{stokes_oracle, STOKES_SIGN};
pub use weinstock::{force_pairing, weinstock_test, Current, LimitMethod, WeinstockEntry, WeinstockReport};

/// `F(ε)` with its split over charts.
#[derive(Clone, Debug, PartialEq)]
pub struct PairingSample<T: Real> {
    pub epsilon: T,
    pub value: C<T>,
    pub err_est: T,
    pub per_chart: Vec<C<T>>,
    pub cells_used: usize,
}

/// `εₖ = ε₀ rᵏ`, `k = 0..steps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule {
    pub eps0: f64,
    pub ratio: f64,
    pub steps: usize,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { eps0: 0.1, ratio: 0.5, steps: 14 }
    }
}

impl Schedule {
    pub fn validate<T: Real>(&self, domain: &PiecewiseDomain<T>) -> Result<()> {
        let diam = domain.diameter().to_f64_lossy();
        if !(self.eps0 > 0.0 && self.eps0 <= 0.1 * diam) {
            return Err(Error::Unsupported(format!("eps0 = {} must lie in (0, {:.6}]", self.eps0, 0.1 * diam)));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::Unsupported(format!("ratio = {} must lie in (0, 1)", self.ratio)));
        }
        if self.steps == 0 {
            return Err(Error::Unsupported("schedule needs at least one step".into()));
        }
        Ok(())
    }

    pub fn epsilons<T: Real>(&self) -> Vec<T> {
        (0..self.steps).map(|k| T::lit(self.eps0 * self.ratio.powi(k as i32))).collect()
    }
}

/// Distance below which a translated pole counts as sitting on ∂Ω.
pub const POLE_ON_BOUNDARY_TOL: f64 = 1e-9;
/// Translated poles closer than this many ε to a patch trigger pre-refinement.
pub const POLE_REFINE_RADIUS: f64 = 10.0;

fn check_translated_poles<T: Real>(
    domain: &PiecewiseDomain<T>,
    cover: &ChartCover<T>,
    translates: &[HolomorphicFunction<T>],
    eps: T,
) -> Result<()> {
    let tol = T::lit(POLE_ON_BOUNDARY_TOL);
    let mut fallback: Option<Vec<CPoint<T>>> = None;
    for (chart, g) in cover.charts.iter().zip(translates) {
        for p in g.poles() {
            let hit = match p.coordinate_root() {
                Some((k, a)) if k < domain.dim() => domain.nearest_planar_boundary(k, a).and_then(|b| {
                    let d = (a - b).norm();
                    (d < tol && chart.parts[k].eval(b) > T::zero()).then_some(d)
                }),
                Some(_) => None,
                None => {
                    let pts = fallback
                        .get_or_insert_with(|| domain.boundary_samples(256).into_iter().map(|(z, _)| z).collect());
                    pts.iter()
                        .map(|z| (p.distance(z), z))
                        .find(|(d, z)| *d < tol && chart.bump(z) > T::zero())
                        .map(|x| x.0)
                }
            };
            if let Some(d) = hit {
                return Err(Error::PoleOnBoundary { epsilon: eps.to_f64_lossy(), distance: d.to_f64_lossy() });
            }
        }
    }
    Ok(())
}

/// `F(ε)` over the cover with partition of unity `χᵢ = φᵢ / Σφ`.
pub fn pairing_at_epsilon<T: Real>(
    domain: &PiecewiseDomain<T>,
    f: &HolomorphicFunction<T>,
    form: &TestForm<T>,
    cover: &ChartCover<T>,
    eps: T,
    spec: &QuadratureSpec,
) -> Result<PairingSample<T>> {
    pairing_impl(domain, f, form, cover, eps, spec, None)
}

/// As [`pairing_at_epsilon`], appending the refinement history to `diag`.
pub fn pairing_at_epsilon_traced<T: Real>(
    domain: &PiecewiseDomain<T>,
    f: &HolomorphicFunction<T>,
    form: &TestForm<T>,
    cover: &ChartCover<T>,
    eps: T,
    spec: &QuadratureSpec,
    diag: &mut Vec<DiagnosticRow>,
) -> Result<PairingSample<T>> {
    pairing_impl(domain, f, form, cover, eps, spec, Some(diag))
}

fn pairing_impl<T: Real>(
    domain: &PiecewiseDomain<T>,
    f: &HolomorphicFunction<T>,
    form: &TestForm<T>,
    cover: &ChartCover<T>,
    eps: T,
    spec: &QuadratureSpec,
    diag: Option<&mut Vec<DiagnosticRow>>,
) -> Result<PairingSample<T>> {
    spec.validate()?;
    if form.dim() != domain.dim() {
        return Err(Error::Unsupported(format!("form of dimension {} on a domain in C^{}", form.dim(), domain.dim())));
    }
    if !(eps > T::zero()) {
        return Err(Error::Unsupported(format!("epsilon must be positive, got {eps}")));
    }
    f.check_no_interior_poles(domain)?;
    let m = cover.len();
    let translates: Vec<HolomorphicFunction<T>> = cover.charts.iter().map(|c| f.translate(&c.v, eps)).collect();
    check_translated_poles(domain, cover, &translates, eps)?;

    let radius = T::lit(POLE_REFINE_RADIUS) * eps;
    let hot: Vec<(Pole<T>, T)> =
        translates.iter().flat_map(|g| g.poles().iter().map(|p| (p.clone(), radius))).collect();
    let scratch = RefCell::new((WeightCache::new(), vec![T::zero(); m]));
    let integrand = |z: &CPoint<T>, out: &mut [[C<T>; 2]]| {
        let g = form.coefficients(z);
        if g[0] == czero() && g[1] == czero() {
            return;
        }
        let mut guard = scratch.borrow_mut();
        let (cache, w) = &mut *guard;
        if cover.weights_cached(z, w, cache) <= T::zero() {
            return;
        }
        for i in 0..m {
            if w[i] > T::zero() {
                let fv = translates[i].eval(z) * w[i];
                out[i] = [g[0] * fv, g[1] * fv];
            }
        }
    };
    let r = integrate_boundary(domain, m, &integrand, &hot, spec, diag);
    if !r.converged {
        return Err(Error::BudgetExceeded { cells: r.cells_used, err_est: r.err_est.to_f64_lossy() });
    }
    Ok(PairingSample {
        epsilon: eps,
        value: r.value,
        err_est: r.err_est,
        per_chart: r.channels,
        cells_used: r.cells_used,
    })
}

/// `F(εₖ)` for the schedule, evaluated in parallel and returned in schedule order.
pub fn pairing_sequence<T: Real>(
    domain: &PiecewiseDomain<T>,
    f: &HolomorphicFunction<T>,
    form: &TestForm<T>,
    cover: &ChartCover<T>,
    schedule: &Schedule,
    spec: &QuadratureSpec,
) -> Result<Vec<PairingSample<T>>> {
    let (samples, err) = pairing_sequence_partial(domain, f, form, cover, schedule, spec)?;
    match err {
        Some(e) => Err(e),
        None => Ok(samples),
    }
}

/// The longest successful prefix of the schedule, and the first failure.
pub fn pairing_sequence_partial<T: Real>(
    domain: &PiecewiseDomain<T>,
    f: &HolomorphicFunction<T>,
    form: &TestForm<T>,
    cover: &ChartCover<T>,
    schedule: &Schedule,
    spec: &QuadratureSpec,
) -> Result<(Vec<PairingSample<T>>, Option<Error>)> {
    schedule.validate(domain)?;
    spec.validate()?;
    let eps = schedule.epsilons::<T>();
    let results: Vec<Result<PairingSample<T>>> =
        eps.par_iter().map(|&e| pairing_at_epsilon(domain, f, form, cover, e, spec)).collect();
    let mut samples = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(s) => samples.push(s),
            Err(e) => return Ok((samples, Some(e))),
        }
    }
    Ok((samples, None))
}
