//! Adaptive integration over boundary face patches and over the domain.

pub mod adaptive;
pub mod rule;

use crate::error::{Error, Result};
use crate::functions::Pole;
use crate::geometry::{FacePatch, PiecewiseDomain, PlanarRegion};
use crate::scalar::{czero, CPoint, Real, C};

pub use adaptive::{graded_breakpoints, integrate_box};

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of cell splits per integral.
    pub max_subdivisions: usize,
    /// Levels of geometric pre-refinement toward corners and translated poles.
    pub corner_refine_depth: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { rel_tol: 1e-10, abs_tol: 1e-12, max_subdivisions: 100_000, corner_refine_depth: 12 }
    }
}

pub const MAX_SUBDIVISIONS: usize = 1_000_000;

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol >= 1e-13) || !(self.abs_tol > 0.0) {
            return Err(Error::Unsupported(format!(
                "tolerances rel {:e}, abs {:e} out of range (rel ≥ 1e-13, abs > 0)",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_subdivisions > MAX_SUBDIVISIONS {
            return Err(Error::Unsupported(format!(
                "max_subdivisions {} exceeds the budget guard {MAX_SUBDIVISIONS}",
                self.max_subdivisions
            )));
        }
        Ok(())
    }
}

/// Value of an integral, split into channels whose sum is `value`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralResult<T: Real> {
    pub value: C<T>,
    pub channels: Vec<C<T>>,
    pub err_est: T,
    pub cells_used: usize,
    pub converged: bool,
}

impl<T: Real> IntegralResult<T> {
    pub(crate) fn from_channels(channels: Vec<C<T>>, err_est: T, cells_used: usize, converged: bool) -> Self {
        let value = channels.iter().fold(czero(), |a, b| a + *b);
        IntegralResult { value, channels, err_est, cells_used, converged }
    }

    fn empty(channels: usize) -> Self {
        Self::from_channels(vec![czero(); channels], T::zero(), 0, true)
    }

    /// Adds another result channel by channel.
    pub fn accumulate(&mut self, other: &Self) {
        for (a, b) in self.channels.iter_mut().zip(&other.channels) {
            *a = *a + *b;
        }
        self.value = self.channels.iter().fold(czero(), |a, b| a + *b);
        self.err_est = self.err_est + other.err_est;
        self.cells_used += other.cells_used;
        self.converged &= other.converged;
    }

    /// `BudgetExceeded` unless converged.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::BudgetExceeded { cells: self.cells_used, err_est: self.err_est.to_f64_lossy() })
        }
    }
}

/// One line of the refinement history.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticRow {
    pub cells: usize,
    pub re: f64,
    pub im: f64,
    pub err_est: f64,
}

/// Integrates an (n, n−1)-form over one face patch. `form` writes the form
/// coefficients per channel at a boundary point (see [`FacePatch::pullback`]).
/// `poles` lists loci with the proximity radius that triggers pre-refinement.
pub fn integrate_face<T: Real, F>(
    domain: &PiecewiseDomain<T>,
    patch: &FacePatch<T>,
    channels: usize,
    form: &F,
    poles: &[(Pole<T>, T)],
    spec: &QuadratureSpec,
    diag: Option<&mut Vec<DiagnosticRow>>,
) -> IntegralResult<T>
where
    F: Fn(&CPoint<T>, &mut [[C<T>; 2]]),
{
    let dim = patch.param_dim();
    let (lo, hi) = patch.param_box();
    let hot = patch.hot_values(domain, poles);
    let breaks: Vec<Vec<T>> =
        (0..dim).map(|d| graded_breakpoints(lo[d], hi[d], &hot[d], spec.corner_refine_depth)).collect();
    let integrand = |s: &[T], out: &mut [C<T>]| {
        let (z, frame) = patch.map(s);
        if !patch.active(domain, &z) {
            return;
        }
        let mut g = vec![[czero(), czero()]; channels];
        form(&z, &mut g);
        for (o, gc) in out.iter_mut().zip(&g) {
            if *gc != [czero(), czero()] {
                *o = patch.pullback(gc, &frame);
            }
        }
    };
    integrate_box(dim, &breaks, channels, spec, &integrand, diag)
}

/// Sum of [`integrate_face`] over every patch of ∂Ω, in patch order.
pub fn integrate_boundary<T: Real, F>(
    domain: &PiecewiseDomain<T>,
    channels: usize,
    form: &F,
    poles: &[(Pole<T>, T)],
    spec: &QuadratureSpec,
    mut diag: Option<&mut Vec<DiagnosticRow>>,
) -> IntegralResult<T>
where
    F: Fn(&CPoint<T>, &mut [[C<T>; 2]]),
{
    let mut total = IntegralResult::empty(channels);
    for patch in domain.face_patches() {
        let r = integrate_face(domain, &patch, channels, form, poles, spec, diag.as_deref_mut());
        total.accumulate(&r);
    }
    total
}

/// Integrates `f dV` over Ω (Lebesgue measure of ℝ^{2n}) through the product
/// of the planar factor parametrizations.
pub fn integrate_volume<T: Real, F>(
    domain: &PiecewiseDomain<T>,
    f: &F,
    poles: &[Pole<T>],
    spec: &QuadratureSpec,
    diag: Option<&mut Vec<DiagnosticRow>>,
) -> IntegralResult<T>
where
    F: Fn(&CPoint<T>) -> C<T>,
{
    let n = domain.dim();
    let regions: Vec<&PlanarRegion<T>> = (0..n).map(|k| &domain.factor(k).region).collect();
    let mut breaks = Vec::new();
    for (k, r) in regions.iter().enumerate() {
        let (lo, hi) = r.param_box();
        let mut hot: [Vec<T>; 2] = [Vec::new(), Vec::new()];
        match r {
            PlanarRegion::Rect { .. } | PlanarRegion::Masked { .. } => {
                for v in &domain.factor(k).vertices {
                    hot[0].push(v.point.re);
                    hot[1].push(v.point.im);
                }
                for p in poles {
                    if let Some((pk, a)) = p.coordinate_root() {
                        if pk == k {
                            hot[0].push(a.re.max(lo[0]).min(hi[0]));
                            hot[1].push(a.im.max(lo[1]).min(hi[1]));
                        }
                    }
                }
            }
            PlanarRegion::Disc { center, radius } => {
                for p in poles {
                    if let Some((pk, a)) = p.coordinate_root() {
                        if pk == k {
                            let d = a - center;
                            hot[0].push(d.norm().min(*radius));
                            let mut th = d.arg();
                            if th < T::zero() {
                                th = th + T::lit(2.0) * T::PI();
                            }
                            hot[1].push(th);
                        }
                    }
                }
            }
        }
        for a in 0..2 {
            breaks.push(graded_breakpoints(lo[a], hi[a], &hot[a], spec.corner_refine_depth));
        }
    }
    let integrand = |s: &[T], out: &mut [C<T>]| {
        let mut z = [czero(), czero()];
        let mut jac = T::one();
        for (k, r) in regions.iter().enumerate() {
            let (w, _, j) = r.map(s[2 * k], s[2 * k + 1]);
            if r.is_masked() && !domain.planar_contains_closed(k, w, T::zero()) {
                return;
            }
            z[k] = w;
            jac = jac * j;
        }
        if jac == T::zero() {
            return;
        }
        out[0] = f(&z) * jac;
    };
    integrate_box(2 * n, &breaks, 1, spec, &integrand, diag)
}

/// Integrates a real function over `[a, b]`, with pre-refinement toward `hot`.
pub fn integrate_interval<T: Real, F>(a: T, b: T, hot: &[T], spec: &QuadratureSpec, f: &F) -> IntegralResult<T>
where
    F: Fn(T) -> C<T>,
{
    if b < a {
        let mut r = integrate_interval(b, a, hot, spec, f);
        r.value = -r.value;
        for c in r.channels.iter_mut() {
            *c = -*c;
        }
        return r;
    }
    let breaks = vec![graded_breakpoints(a, b, hot, spec.corner_refine_depth)];
    integrate_box(1, &breaks, 1, spec, &|s: &[T], o: &mut [C<T>]| o[0] = f(s[0]), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::presets;

    fn tight() -> QuadratureSpec {
        QuadratureSpec { rel_tol: 1e-12, abs_tol: 1e-14, ..Default::default() }
    }

    #[test]
    fn segment_examples() {
        let r = integrate_interval(0.0, 1.0, &[], &tight(), &|x: f64| C::new(x, 0.0));
        assert!((r.value.re - 0.5).abs() < 1e-12);
        let r = integrate_interval(0.0, 1.0, &[0.0], &tight(), &|x: f64| C::new(1.0 / (x + 0.01), 0.0));
        assert!((r.value.re - 101f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn quarter_circle_length() {
        let d = presets::disc::<f64>();
        let mut p = d.face_patches().remove(0);
        p.arc.t1 = p.arc.t0 + std::f64::consts::FRAC_PI_2;
        // |dz/dt| integrated: use the form conj(dz/dt)/|dz/dt| · dz = |dz|
        let f = |z: &CPoint<f64>, g: &mut [[C<f64>; 2]]| {
            let t = z[0] * C::new(0.0, 1.0);
            g[0] = [t.conj() / t.norm(), czero()];
        };
        let r = integrate_face(&d, &p, 1, &f, &[], &tight(), None);
        assert!((r.value.re - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn green_on_square() {
        let d = presets::square::<f64>();
        let xdz = |z: &CPoint<f64>, g: &mut [[C<f64>; 2]]| g[0] = [C::new(z[0].re, 0.0), czero()];
        let r = integrate_boundary(&d, 1, &xdz, &[], &tight(), None);
        assert!((r.value - C::new(0.0, 4.0)).norm() < 1e-8);
        let dz = |_: &CPoint<f64>, g: &mut [[C<f64>; 2]]| g[0] = [C::new(1.0, 0.0), czero()];
        let r = integrate_boundary(&d, 1, &dz, &[], &tight(), None);
        assert!(r.value.norm() < 1e-10);
    }

    #[test]
    fn volumes() {
        let sq = presets::square::<f64>();
        let r = integrate_volume(&sq, &|_| C::new(1.0, 0.0), &[], &tight(), None);
        assert!((r.value.re - 4.0).abs() < 1e-9);
        let bd = presets::bidisc::<f64>();
        let r = integrate_volume(&bd, &|_| C::new(1.0, 0.0), &[], &tight(), None);
        assert!((r.value.re - std::f64::consts::PI.powi(2)).abs() < 1e-6);
    }

    #[test]
    fn orientation_flip_negates() {
        let d = presets::square::<f64>();
        let f = |z: &CPoint<f64>, g: &mut [[C<f64>; 2]]| g[0] = [z[0] * z[0].conj(), czero()];
        for p in d.face_patches() {
            let a = integrate_face(&d, &p, 1, &f, &[], &tight(), None);
            let mut q = p.clone();
            q.orientation_sign = -1.0;
            let b = integrate_face(&d, &q, 1, &f, &[], &tight(), None);
            assert_eq!(a.value, -b.value);
        }
    }

    #[test]
    fn spec_guard() {
        assert!(QuadratureSpec { max_subdivisions: 2_000_000, ..Default::default() }.validate().is_err());
        assert!(QuadratureSpec { rel_tol: 1e-15, ..Default::default() }.validate().is_err());
        assert!(QuadratureSpec::default().validate().is_ok());
    }
}
