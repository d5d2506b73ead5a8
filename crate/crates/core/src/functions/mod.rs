//! Holomorphic rational functions, their translates and growth exponents.

pub mod expr;
pub mod growth;
pub mod poles;

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::PiecewiseDomain;
use crate::scalar::{czero, CPoint, Real, C};

pub use expr::{parse, Expr, Program, Var};
pub use growth::{estimate_growth, GrowthEstimate};
pub use poles::Pole;

type Evaluator<T> = Arc<dyn Fn(&CPoint<T>) -> C<T> + Send + Sync>;

/// A holomorphic function on ℂⁿ minus finitely many affine pole loci,
/// possibly translated: the value at `z` is `base(z − shift)`.
#[derive(Clone)]
pub struct HolomorphicFunction<T: Real> {
    pub label: String,
    dim: usize,
    base: Evaluator<T>,
    shift: CPoint<T>,
    poles: Vec<Pole<T>>,
}

impl<T: Real> fmt::Debug for HolomorphicFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HolomorphicFunction")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("shift", &self.shift)
            .field("poles", &self.poles)
            .finish()
    }
}

impl<T: Real> HolomorphicFunction<T> {
    /// Compiles a rational expression in `z1, z2` (no conjugates).
    pub fn from_expr(label: &str, e: &Expr<T>, dim: usize) -> Result<Self> {
        if !e.is_holomorphic() {
            return Err(Error::Unsupported(format!("'{label}' depends on a conjugate coordinate")));
        }
        if e.dim_used() > dim {
            return Err(Error::Unsupported(format!("'{label}' uses coordinate z{} in dimension {dim}", e.dim_used())));
        }
        let poles = poles::pole_loci(e)?;
        let prog = e.compile()?;
        Ok(HolomorphicFunction {
            label: label.to_string(),
            dim,
            base: Arc::new(move |z| prog.eval(z)),
            shift: [czero(), czero()],
            poles,
        })
    }

    pub fn parse(src: &str, dim: usize) -> Result<Self> {
        Self::from_expr(src, &expr::parse(src, dim)?, dim)
    }

    /// Wraps a user evaluator. `poles` must list every singular locus.
    pub fn from_fn<F>(label: &str, dim: usize, poles: Vec<Pole<T>>, f: F) -> Self
    where
        F: Fn(&CPoint<T>) -> C<T> + Send + Sync + 'static,
    {
        HolomorphicFunction { label: label.to_string(), dim, base: Arc::new(f), shift: [czero(), czero()], poles }
    }

    pub fn constant(c: C<T>, dim: usize) -> Self {
        Self::from_fn(&format!("{c}"), dim, Vec::new(), move |_| c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Pole loci of the translated function.
    pub fn poles(&self) -> &[Pole<T>] {
        &self.poles
    }

    pub fn shift(&self) -> &CPoint<T> {
        &self.shift
    }

    #[inline]
    pub fn eval(&self, z: &CPoint<T>) -> C<T> {
        (self.base)(&[z[0] - self.shift[0], z[1] - self.shift[1]])
    }

    /// `z ↦ f(z − εv)`; pole loci move by `+εv`.
    pub fn translate(&self, v: &CPoint<T>, eps: T) -> Self {
        let s = [v[0] * eps, v[1] * eps];
        let mut g = self.clone();
        g.shift = [self.shift[0] + s[0], self.shift[1] + s[1]];
        g.poles = self.poles.iter().map(|p| p.shifted(&s)).collect();
        g
    }

    pub fn scaled(&self, k: C<T>) -> Self {
        let f = self.clone();
        let mut g =
            Self::from_fn(&format!("({k})*({})", self.label), self.dim, self.poles.clone(), move |z| f.eval(z) * k);
        g.shift = [czero(), czero()];
        g
    }

    pub fn product(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let mut poles = self.poles.clone();
        poles.extend(other.poles.iter().cloned());
        Self::from_fn(&format!("({})*({})", self.label, other.label), self.dim.max(other.dim), poles, move |z| {
            a.eval(z) * b.eval(z)
        })
    }

    /// Distance from `z` to the nearest pole locus (`+∞` without poles).
    pub fn pole_distance(&self, z: &CPoint<T>) -> T {
        self.poles.iter().map(|p| p.distance(z)).fold(T::infinity(), T::min)
    }

    /// Largest relative Cauchy–Riemann defect `|f_x + i f_y| / (|f_x| + |f_y|)`
    /// over `count` interior points, by central differences.
    pub fn cauchy_riemann_defect(&self, domain: &PiecewiseDomain<T>, count: usize, seed: u64) -> T {
        let pts = domain.sample_interior(count * 4, seed);
        let mut worst = T::zero();
        let mut used = 0;
        for z in pts {
            if used == count {
                break;
            }
            if self.pole_distance(&z) < T::lit(1e-3) {
                continue;
            }
            used += 1;
            let h = T::lit(1e-5) * (T::one() + z[0].norm() + z[1].norm());
            for k in 0..self.dim {
                let at = |d: C<T>| {
                    let mut w = z;
                    w[k] = w[k] + d;
                    self.eval(&w)
                };
                let two_h = h + h;
                let fx = (at(C::new(h, T::zero())) - at(C::new(-h, T::zero()))) / two_h;
                let fy = (at(C::new(T::zero(), h)) - at(C::new(T::zero(), -h))) / two_h;
                let defect = (fx + fy * C::new(T::zero(), T::one())).norm();
                let scale = fx.norm() + fy.norm() + T::lit(1e-10) * (T::one() + self.eval(&z).norm());
                worst = worst.max(defect / scale);
            }
        }
        worst
    }

    /// Fails with `NotHolomorphic` if the Cauchy–Riemann defect at 20
    /// interior points exceeds `1e-5`.
    pub fn check_holomorphic(&self, domain: &PiecewiseDomain<T>) -> Result<T> {
        let d = self.cauchy_riemann_defect(domain, 20, 0x5eed);
        if d > T::lit(1e-5) {
            return Err(Error::NotHolomorphic(d.to_f64_lossy()));
        }
        Ok(d)
    }

    /// Fails with `PoleInside` if some pole locus meets the open domain.
    pub fn check_no_interior_poles(&self, domain: &PiecewiseDomain<T>) -> Result<()> {
        for p in &self.poles {
            if pole_meets_interior(p, domain) {
                return Err(Error::PoleInside(format!("{p:?}")));
            }
        }
        Ok(())
    }

    /// True when some pole locus meets the closed domain.
    pub fn has_poles_on_closure(&self, domain: &PiecewiseDomain<T>) -> bool {
        let tol = T::lit(1e-12) * (T::one() + domain.diameter());
        self.poles.iter().any(|p| pole_meets(p, domain, tol))
    }
}

fn pole_meets_interior<T: Real>(p: &Pole<T>, domain: &PiecewiseDomain<T>) -> bool {
    if let Some((k, a)) = p.coordinate_root() {
        if k >= domain.dim() {
            return false;
        }
        let f = domain.factor(k);
        return f.pieces.iter().all(|&j| domain.pieces()[j].rho_planar(a) < T::zero()) && {
            let (lo, hi) = domain.bbox().planar(k);
            a.re > lo[0] && a.re < hi[0] && a.im > lo[1] && a.im < hi[1]
        };
    }
    locus_grid(p, domain).iter().any(|z| domain.contains(z))
}

fn pole_meets<T: Real>(p: &Pole<T>, domain: &PiecewiseDomain<T>, tol: T) -> bool {
    if let Some((k, a)) = p.coordinate_root() {
        return k < domain.dim() && domain.planar_contains_closed(k, a, tol);
    }
    locus_grid(p, domain).iter().any(|z| domain.max_rho(z) <= tol && domain.in_bbox(z))
}

/// Grid of points on a non-coordinate pole locus in ℂ², over the bounding box scale.
fn locus_grid<T: Real>(p: &Pole<T>, domain: &PiecewiseDomain<T>) -> Vec<CPoint<T>> {
    if domain.dim() < 2 {
        return Vec::new();
    }
    let base = p.project(&[czero(), czero()]);
    // direction spanning the complex line: orthogonal to conj(normal)
    let dir = [-p.normal[1].conj(), p.normal[0].conj()];
    let nd = (dir[0].norm_sqr() + dir[1].norm_sqr()).sqrt();
    let reach = domain.diameter() + base[0].norm() + base[1].norm();
    let mut out = Vec::new();
    let steps = 60;
    for i in 0..=steps {
        for j in 0..=steps {
            let s = C::new(
                reach * T::lit(2.0 * i as f64 / steps as f64 - 1.0),
                reach * T::lit(2.0 * j as f64 / steps as f64 - 1.0),
            ) / nd;
            out.push([base[0] + dir[0] * s, base[1] + dir[1] * s]);
        }
    }
    out
}

/// Deterministic directions on the unit sphere of ℝ^{dim}.
pub(crate) fn random_directions<T: Real>(count: usize, dim: usize, seed: u64) -> Vec<[T; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut v = [T::zero(); 4];
        for vk in v.iter_mut().take(dim) {
            *vk = T::lit(rng.gen::<f64>() * 2.0 - 1.0);
        }
        let n = v.iter().map(|x| *x * *x).sum::<T>().sqrt();
        if n > T::lit(0.1) && n <= T::one() {
            out.push(v.map(|x| x / n));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::presets;

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    #[test]
    fn translate_inverse_square() {
        let f = HolomorphicFunction::<f64>::parse("1/z^2", 1).unwrap();
        let v = [c(-1.0, -1.0), c(0.0, 0.0)];
        let eps = 0.1;
        let g = f.translate(&v, eps);
        let z = [c(0.3, 0.7), c(0.0, 0.0)];
        let want = 1.0 / ((z[0] + c(eps, eps)) * (z[0] + c(eps, eps)));
        assert!((g.eval(&z) - want).norm() < 1e-14);
        let (k, root) = g.poles()[0].coordinate_root().unwrap();
        assert_eq!(k, 0);
        assert!((root - c(-0.1, -0.1)).norm() < 1e-15);
    }

    #[test]
    fn translate_constant_and_affine() {
        let k = HolomorphicFunction::<f64>::constant(c(2.0, -1.0), 1);
        let z = [c(0.4, 0.1), c(0.0, 0.0)];
        assert_eq!(k.translate(&[c(1.0, 3.0), c(0.0, 0.0)], 0.7).eval(&z), c(2.0, -1.0));
        let f = HolomorphicFunction::<f64>::parse("z", 1).unwrap();
        let g = f.translate(&[c(-1.0, 0.0), c(0.0, 0.0)], 0.5);
        assert!((g.eval(&[c(0.0, 0.0), c(0.0, 0.0)]) - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn translations_compose() {
        let f = HolomorphicFunction::<f64>::parse("1/(z - 3) + z^2", 1).unwrap();
        let v = [c(0.6, -0.8), c(0.0, 0.0)];
        let a = f.translate(&v, 0.013).translate(&v, 0.029);
        let b = f.translate(&v, 0.042);
        for z in presets::square::<f64>().sample_interior(10, 1) {
            assert!((a.eval(&z) - b.eval(&z)).norm() <= 1e-14 * (1.0 + b.eval(&z).norm()));
        }
    }

    #[test]
    fn cauchy_riemann_check() {
        let sq = presets::square::<f64>();
        let f = HolomorphicFunction::<f64>::parse("1/z^2 + z^3", 1).unwrap();
        assert!(f.check_holomorphic(&sq).is_ok());
        let bad = HolomorphicFunction::from_fn("conj", 1, vec![], |z: &CPoint<f64>| z[0].conj());
        assert!(matches!(bad.check_holomorphic(&sq), Err(Error::NotHolomorphic(_))));
        assert!(HolomorphicFunction::<f64>::parse("zbar", 1).is_err());
    }

    #[test]
    fn pole_position_tests() {
        let sq = presets::square::<f64>();
        let inside = HolomorphicFunction::<f64>::parse("1/(z - 1 - i)", 1).unwrap();
        assert!(matches!(inside.check_no_interior_poles(&sq), Err(Error::PoleInside(_))));
        let corner = HolomorphicFunction::<f64>::parse("1/z^2", 1).unwrap();
        assert!(corner.check_no_interior_poles(&sq).is_ok());
        assert!(corner.has_poles_on_closure(&sq));
        let outside = HolomorphicFunction::<f64>::parse("1/(z + 0.5)", 1).unwrap();
        assert!(!outside.has_poles_on_closure(&sq));
    }
}
