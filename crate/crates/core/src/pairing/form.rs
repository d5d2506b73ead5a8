use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::functions::{parse, Expr, Program, Var};
use crate::geometry::bump::{plateau, plateau_derivative};
use crate::geometry::PiecewiseDomain;
use crate::scalar::{czero, CPoint, Real, C};

/// Radial plateau in each coordinate: `Πₖ plateau(|zₖ − cₖ|)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Cutoff<T: Real> {
    None,
    Plateau { center: CPoint<T>, inner: [T; 2], outer: [T; 2] },
}

impl<T: Real> Cutoff<T> {
    /// Same radii in every coordinate.
    pub fn radial(center: CPoint<T>, inner: T, outer: T) -> Self {
        Cutoff::Plateau { center, inner: [inner; 2], outer: [outer; 2] }
    }

    /// Value and `∂/∂z̄ₖ` of the cutoff.
    pub fn eval(&self, z: &CPoint<T>, dim: usize) -> (T, [C<T>; 2]) {
        match self {
            Cutoff::None => (T::one(), [czero(), czero()]),
            Cutoff::Plateau { center, inner, outer } => {
                let mut val = [T::one(); 2];
                let mut der = [czero(); 2];
                for k in 0..dim {
                    let w = z[k] - center[k];
                    let r = w.norm();
                    val[k] = plateau(r, inner[k], outer[k]);
                    if r > T::zero() {
                        // ∂r/∂z̄ = w / (2r)
                        der[k] = w * (plateau_derivative(r, inner[k], outer[k]) / (r + r));
                    }
                }
                let v = val[0] * val[1];
                let d = [der[0] * val[1], der[1] * val[0]];
                (v, d)
            }
        }
    }

    /// Whether the cutoff is identically 1 on the closed domain.
    pub fn is_one_on(&self, domain: &PiecewiseDomain<T>) -> bool {
        match self {
            Cutoff::None => true,
            Cutoff::Plateau { center, inner, .. } => (0..domain.dim()).all(|k| {
                let (lo, hi) = domain.bbox().planar(k);
                let corners = [C::new(lo[0], lo[1]), C::new(lo[0], hi[1]), C::new(hi[0], lo[1]), C::new(hi[0], hi[1])];
                corners.iter().all(|c| (*c - center[k]).norm() <= inner[k])
            }),
        }
    }
}

/// Test form of bidegree (n, n−1) with a cutoff:
/// `χ g dz` for n = 1, `χ (g₁ dz₁∧dz₂∧dz̄₁ + g₂ dz₁∧dz₂∧dz̄₂)` for n = 2.
#[derive(Clone, Debug)]
pub struct TestForm<T: Real> {
    pub label: String,
    dim: usize,
    coeffs: Vec<Expr<T>>,
    progs: Vec<Program<T>>,
    /// `dbar[a][k] = ∂gₐ/∂z̄ₖ`.
    dbar: Vec<[Program<T>; 2]>,
    pub cutoff: Cutoff<T>,
}

impl<T: Real> TestForm<T> {
    pub fn new(label: &str, dim: usize, coeffs: Vec<Expr<T>>, cutoff: Cutoff<T>) -> Result<Self> {
        if !(1..=2).contains(&dim) || coeffs.len() != dim {
            return Err(Error::Unsupported(format!("a test form in dimension {dim} needs {dim} coefficients")));
        }
        let progs = coeffs.iter().map(|e| e.compile()).collect::<Result<Vec<_>>>()?;
        let dbar = coeffs
            .iter()
            .map(|e| Ok([e.derivative(Var::Zbar(0)).compile()?, e.derivative(Var::Zbar(1)).compile()?]))
            .collect::<Result<Vec<_>>>()?;
        Ok(TestForm { label: label.to_string(), dim, coeffs, progs, dbar, cutoff })
    }

    /// Coefficients as expressions in `z, zbar, x, y` (and `z2, …`).
    pub fn parse(dim: usize, coeffs: &[&str], cutoff: Cutoff<T>) -> Result<Self> {
        let exprs = coeffs.iter().map(|s| parse(s, dim)).collect::<Result<Vec<_>>>()?;
        let label = coeffs.join(" ; ");
        Self::new(&label, dim, exprs, cutoff)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coefficient_exprs(&self) -> &[Expr<T>] {
        &self.coeffs
    }

    /// `Σ` of two forms with the same cutoff.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim || self.cutoff != other.cutoff {
            return Err(Error::Unsupported("adding forms with different dimension or cutoff".into()));
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| Expr::add(a.clone(), b.clone())).collect();
        Self::new(&format!("({}) + ({})", self.label, other.label), self.dim, coeffs, self.cutoff.clone())
    }

    pub fn scaled(&self, k: C<T>) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|a| Expr::mul(Expr::constant(k), a.clone())).collect();
        Self::new(&format!("({k})*({})", self.label), self.dim, coeffs, self.cutoff.clone())
    }

    /// Coefficients `χ gₐ` at `z` (unused slot zero for n = 1).
    #[inline]
    pub fn coefficients(&self, z: &CPoint<T>) -> [C<T>; 2] {
        let (chi, _) = self.cutoff.eval(z, self.dim);
        let mut out = [czero(); 2];
        if chi == T::zero() {
            return out;
        }
        for (o, p) in out.iter_mut().zip(&self.progs) {
            *o = p.eval(z) * chi;
        }
        out
    }

    /// `∂(χ gₐ)/∂z̄ₖ` at `z`, indexed `[a][k]`.
    pub fn dbar_coefficients(&self, z: &CPoint<T>) -> [[C<T>; 2]; 2] {
        let (chi, dchi) = self.cutoff.eval(z, self.dim);
        let mut out = [[czero(); 2]; 2];
        for a in 0..self.dim {
            let g = self.progs[a].eval(z);
            for k in 0..self.dim {
                out[a][k] = dchi[k] * g + self.dbar[a][k].eval(z) * chi;
            }
        }
        out
    }

    /// `∂̄ψ` as a multiple of the Lebesgue volume element of ℂⁿ:
    /// `2i ∂G/∂z̄` for n = 1, `−4 (∂G₁/∂z̄₂ − ∂G₂/∂z̄₁)` for n = 2.
    pub fn dbar_density(&self, z: &CPoint<T>) -> C<T> {
        let d = self.dbar_coefficients(z);
        if self.dim == 1 {
            d[0][0] * C::new(T::zero(), T::lit(2.0))
        } else {
            (d[0][1] - d[1][0]) * T::lit(-4.0)
        }
    }

    /// Largest deviation between the analytic `∂̄` coefficients and central
    /// differences at `count` random points of the bounding box, relative to
    /// `1 + |coefficients|`.
    pub fn check_dbar(&self, domain: &PiecewiseDomain<T>, count: usize, seed: u64) -> T {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bb = domain.bbox();
        let mut worst = T::zero();
        for _ in 0..count {
            let mut z = [czero(); 2];
            for k in 0..self.dim {
                let (lo, hi) = bb.planar(k);
                let x = lo[0] + (hi[0] - lo[0]) * T::lit(rng.gen::<f64>());
                let y = lo[1] + (hi[1] - lo[1]) * T::lit(rng.gen::<f64>());
                z[k] = C::new(x, y);
            }
            let an = self.dbar_coefficients(&z);
            let h = T::lit(1e-5);
            for k in 0..self.dim {
                let at = |d: C<T>| {
                    let mut w = z;
                    w[k] = w[k] + d;
                    self.coefficients(&w)
                };
                let px = at(C::new(h, T::zero()));
                let mx = at(C::new(-h, T::zero()));
                let py = at(C::new(T::zero(), h));
                let my = at(C::new(T::zero(), -h));
                for a in 0..self.dim {
                    let fx = (px[a] - mx[a]) / (h + h);
                    let fy = (py[a] - my[a]) / (h + h);
                    let fd = (fx + fy * C::new(T::zero(), T::one())) * T::lit(0.5);
                    let scale = T::one() + self.coefficients(&z)[a].norm();
                    worst = worst.max((fd - an[a][k]).norm() / scale);
                }
            }
        }
        worst
    }

    /// Largest `|∂̄ψ|` density over interior and boundary samples of Ω̄, and where.
    pub fn closedness_residual(&self, domain: &PiecewiseDomain<T>) -> (T, CPoint<T>) {
        let mut pts = domain.sample_interior(400, 0xc105ed);
        pts.extend(domain.boundary_samples(64).into_iter().map(|(z, _)| z));
        let mut worst = (T::zero(), [czero(); 2]);
        for z in pts {
            let r = self.dbar_density(&z).norm();
            if !(r <= worst.0) {
                worst = (r, z);
            }
        }
        worst
    }

    /// Fails with `FormNotClosed` unless `∂̄ψ` vanishes on Ω̄ to `tol`.
    pub fn require_closed(&self, domain: &PiecewiseDomain<T>, tol: T) -> Result<()> {
        let (r, z) = self.closedness_residual(domain);
        if !(r <= tol) {
            return Err(Error::FormNotClosed {
                residual: r.to_f64_lossy(),
                at: format!("{:?}", crate::geometry::strata::sample_coords(&z, domain.dim())),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::presets;

    fn paper_cutoff() -> Cutoff<f64> {
        Cutoff::radial([czero(), czero()], 1.0, 1.5)
    }

    #[test]
    fn dbar_matches_differences() {
        let sq = presets::square::<f64>();
        for src in ["x", "z^3", "zbar*z", "y^2 - x"] {
            let f = TestForm::parse(1, &[src], paper_cutoff()).unwrap();
            assert!(f.check_dbar(&sq, 50, 1) < 1e-5, "{src}");
        }
        let bd = presets::bidisc::<f64>();
        let f = TestForm::parse(2, &["zbar1*z2", "zbar2*z1^2"], Cutoff::radial([czero(), czero()], 0.8, 1.2)).unwrap();
        assert!(f.check_dbar(&bd, 50, 2) < 1e-5);
    }

    #[test]
    fn densities() {
        let f = TestForm::<f64>::parse(1, &["x"], Cutoff::None).unwrap();
        assert!((f.dbar_density(&[C::new(0.3, 0.7), czero()]) - C::new(0.0, 1.0)).norm() < 1e-15);
        let g = TestForm::<f64>::parse(2, &["zbar2", "0"], Cutoff::None).unwrap();
        assert!((g.dbar_density(&[czero(), czero()]) - C::new(-4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn closedness() {
        let sq = presets::square::<f64>();
        let near_one = Cutoff::radial([C::new(1.0, 1.0), czero()], 1.5, 2.5);
        assert!(near_one.is_one_on(&sq));
        let w = TestForm::parse(1, &["z^4"], near_one).unwrap();
        assert!(w.require_closed(&sq, 1e-10).is_ok());
        let x = TestForm::parse(1, &["x"], Cutoff::None).unwrap();
        assert!(matches!(x.require_closed(&sq, 1e-10), Err(Error::FormNotClosed { .. })));
        // holomorphic coefficient, but the cutoff bends inside the square
        let w = TestForm::parse(1, &["z"], paper_cutoff()).unwrap();
        assert!(w.require_closed(&sq, 1e-10).is_err());
    }

    #[test]
    fn linear_combinations() {
        let a = TestForm::<f64>::parse(1, &["x"], paper_cutoff()).unwrap();
        let b = TestForm::<f64>::parse(1, &["z^2"], paper_cutoff()).unwrap();
        let s = a.add(&b).unwrap().scaled(C::new(2.0, 0.0)).unwrap();
        let z = [C::new(0.4, 0.9), czero()];
        let want = (a.coefficients(&z)[0] + b.coefficients(&z)[0]) * 2.0;
        assert!((s.coefficients(&z)[0] - want).norm() < 1e-14);
        assert!(a.add(&TestForm::parse(1, &["x"], Cutoff::None).unwrap()).is_err());
    }
}
