//! Closed forms for the corner segment integral
//! `∫₀¹ x dx / (x + c)²`, `c = ε(1+i)`, and its real-part split `I + II`,
//! with finite-difference checks of every antiderivative used.

use crate::quadrature::{integrate_interval, QuadratureSpec};
use crate::scalar::{Real, C};

fn q<T: Real>(x: T, e: T) -> T {
    x * x + T::lit(2.0) * x * e + T::lit(2.0) * e * e
}

/// Integrand of `I`: `x³ / ((x+ε)² + ε²)²`.
pub fn integrand_i<T: Real>(x: T, e: T) -> T {
    let d = q(x, e);
    x * x * x / (d * d)
}

/// Integrand of `∫ x² / ((x+ε)² + ε²)²` (without the `2ε` of `II`).
pub fn integrand_ii<T: Real>(x: T, e: T) -> T {
    let d = q(x, e);
    x * x / (d * d)
}

/// Antiderivative of [`integrand_i`]. The printed form of the source agrees with this one.
pub fn antiderivative_i<T: Real>(x: T, e: T) -> T {
    let d = q(x, e);
    T::lit(0.5) * d.ln() - T::lit(2.0) * ((x + e) / e).atan() + e * x / d
}

/// Antiderivative of [`integrand_ii`].
pub fn antiderivative_ii<T: Real>(x: T, e: T) -> T {
    ((x + e) / e).atan() / e + e / q(x, e)
}

/// The same, as quoted with `ε²` in the rational term.
pub fn antiderivative_ii_quoted<T: Real>(x: T, e: T) -> T {
    ((x + e) / e).atan() / e + e * e / q(x, e)
}

/// `I(ε) = ∫₀¹ x³ dx / ((x+ε)² + ε²)²`.
pub fn closed_form_i<T: Real>(e: T) -> T {
    antiderivative_i(T::one(), e) - antiderivative_i(T::zero(), e)
}

/// `II(ε) = 2ε ∫₀¹ x² dx / ((x+ε)² + ε²)²`.
pub fn closed_form_ii<T: Real>(e: T) -> T {
    T::lit(2.0) * e * (antiderivative_ii(T::one(), e) - antiderivative_ii(T::zero(), e))
}

/// `∫₀¹ x dx / (x+c)² = ln((1+c)/c) + c/(1+c) − 1`, `c = ε(1+i)`.
pub fn closed_form_segment<T: Real>(e: T) -> C<T> {
    let c = C::new(e, e);
    let one = C::new(T::one(), T::zero());
    ((one + c) / c).ln() + c / (one + c) - one
}

/// `lim (I(ε) + ln ε) = −(½ ln 2 + π/2)`.
pub fn i_log_constant<T: Real>() -> T {
    -(T::lit(0.5) * T::LN_2() + T::FRAC_PI_2())
}

/// `lim II(ε)` from the re-derived antiderivative.
pub fn ii_limit<T: Real>() -> T {
    T::FRAC_PI_2() - T::one()
}

/// `lim II(ε)` as stated in the source.
pub fn ii_limit_quoted<T: Real>() -> T {
    T::FRAC_PI_2()
}

/// The definite value of `I` as printed.
pub fn closed_form_i_quoted<T: Real>(e: T) -> T {
    let one = T::one();
    let inv = one / e;
    T::lit(0.5) * (T::lit(0.5) * inv * inv + inv + one).ln() - T::lit(2.0) * (inv + one).atan()
        + T::FRAC_PI_4()
        + e / (one + T::lit(2.0) * e + e * e)
}

/// The definite value of `II` as printed.
pub fn closed_form_ii_quoted<T: Real>(e: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    two * ((one / e + one).atan() - T::FRAC_PI_4()) + two * e * (e * e / (one + two * e + two * e * e) - T::lit(0.5))
}

/// `I(ε)` by adaptive quadrature.
pub fn quadrature_i<T: Real>(e: T, spec: &QuadratureSpec) -> (T, T) {
    let r = integrate_interval(T::zero(), T::one(), &[T::zero()], spec, &|x: T| C::new(integrand_i(x, e), T::zero()));
    (r.value.re, r.err_est)
}

/// `II(ε)` by adaptive quadrature.
pub fn quadrature_ii<T: Real>(e: T, spec: &QuadratureSpec) -> (T, T) {
    let two_e = T::lit(2.0) * e;
    let r = integrate_interval(T::zero(), T::one(), &[T::zero()], spec, &|x: T| {
        C::new(two_e * integrand_ii(x, e), T::zero())
    });
    (r.value.re, r.err_est)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Quoted,
    Rederived,
}

impl Source {
    pub fn code(self) -> &'static str {
        match self {
            Source::Quoted => "quoted",
            Source::Rederived => "rederived",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AntiderivativeCheck {
    pub name: &'static str,
    pub source: Source,
    pub max_rel_err: f64,
    pub worst_at: (f64, f64),
    pub pass: bool,
}

pub const ANTIDERIVATIVE_TOL: f64 = 1e-5;

/// Default `(x, ε)` grid, `x ≥ 1e-3`.
pub fn default_grid() -> Vec<(f64, f64)> {
    let xs = [1e-3, 1e-2, 0.05, 0.1, 0.3, 0.5, 0.8, 1.0];
    let es = [1e-1, 3e-2, 1e-2, 1e-3];
    es.iter().flat_map(|&e| xs.iter().map(move |&x| (x, e))).collect()
}

/// Central differences of each candidate antiderivative, extrapolated in the
/// step, against its integrand; fails above [`ANTIDERIVATIVE_TOL`] relative error.
pub fn verify_antiderivatives(grid: &[(f64, f64)]) -> Vec<AntiderivativeCheck> {
    type Pair = (fn(f64, f64) -> f64, fn(f64, f64) -> f64);
    let candidates: [(&'static str, Source, Pair); 4] = [
        ("I", Source::Quoted, (antiderivative_i, integrand_i)),
        ("I", Source::Rederived, (antiderivative_i, integrand_i)),
        ("II", Source::Quoted, (antiderivative_ii_quoted, integrand_ii)),
        ("II", Source::Rederived, (antiderivative_ii, integrand_ii)),
    ];
    candidates
        .iter()
        .map(|&(name, source, (big_f, f))| {
            let mut worst = 0.0f64;
            let mut at = (f64::NAN, f64::NAN);
            for &(x, e) in grid {
                let d = ridders(|t| big_f(t, e), x, 0.5 * x.min(e));
                let target = f(x, e);
                let rel = (d - target).abs() / target.abs();
                if !(rel <= worst) {
                    worst = rel;
                    at = (x, e);
                }
            }
            AntiderivativeCheck { name, source, max_rel_err: worst, worst_at: at, pass: worst <= ANTIDERIVATIVE_TOL }
        })
        .collect()
}

/// Ridders' extrapolation of central differences `(F(x+h) − F(x−h)) / 2h`
/// over `h, h/1.4, …`; stops when the error estimate grows.
fn ridders(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    const N: usize = 10;
    const CON: f64 = 1.4;
    let con2 = CON * CON;
    let mut a = [[0.0f64; N]; N];
    let mut hh = h;
    a[0][0] = (f(x + hh) - f(x - hh)) / (2.0 * hh);
    let mut best = a[0][0];
    let mut err = f64::INFINITY;
    for i in 1..N {
        hh /= CON;
        a[0][i] = (f(x + hh) - f(x - hh)) / (2.0 * hh);
        let mut fac = con2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= con2;
            let e = (a[j][i] - a[j - 1][i]).abs().max((a[j][i] - a[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = a[j][i];
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    best
}

/// A quoted value checked against the re-derived one, with quadrature deciding.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleConflict {
    pub quantity: String,
    pub epsilon: Option<f64>,
    pub quoted: f64,
    pub rederived: f64,
    pub quadrature: f64,
    /// Which of the two the quadrature value supports (or neither).
    pub verdict: &'static str,
}

fn arbitrate(quoted: f64, rederived: f64, oracle: f64, tol: f64) -> &'static str {
    let q = (quoted - oracle).abs() <= tol * (1.0 + oracle.abs());
    let r = (rederived - oracle).abs() <= tol * (1.0 + oracle.abs());
    match (q, r) {
        (true, true) => "agree",
        (false, true) => "rederived",
        (true, false) => "quoted",
        (false, false) => "neither",
    }
}

/// Quoted definite values and limits of `I`, `II` versus the re-derived
/// forms and direct quadrature.
pub fn oracle_conflicts(epsilons: &[f64], spec: &QuadratureSpec) -> Vec<OracleConflict> {
    let mut out = Vec::new();
    for &e in epsilons {
        let (qi, _) = quadrature_i(e, spec);
        out.push(OracleConflict {
            quantity: "I".into(),
            epsilon: Some(e),
            quoted: closed_form_i_quoted(e),
            rederived: closed_form_i(e),
            quadrature: qi,
            verdict: arbitrate(closed_form_i_quoted(e), closed_form_i(e), qi, 1e-8),
        });
        let (qii, _) = quadrature_ii(e, spec);
        out.push(OracleConflict {
            quantity: "II".into(),
            epsilon: Some(e),
            quoted: closed_form_ii_quoted(e),
            rederived: closed_form_ii(e),
            quadrature: qii,
            verdict: arbitrate(closed_form_ii_quoted(e), closed_form_ii(e), qii, 1e-8),
        });
    }
    let (lim, _) = quadrature_ii_limit(spec);
    out.push(OracleConflict {
        quantity: "lim II".into(),
        epsilon: None,
        quoted: ii_limit_quoted(),
        rederived: ii_limit(),
        quadrature: lim,
        verdict: arbitrate(ii_limit_quoted(), ii_limit(), lim, 1e-5),
    });
    out
}

/// Richardson limit of quadrature values of `II` on `ε = 10⁻² · 2^{−k}`.
pub fn quadrature_ii_limit(spec: &QuadratureSpec) -> (f64, f64) {
    let eps: Vec<f64> = (0..8).map(|k| 1e-2 * 0.5f64.powi(k)).collect();
    let vals: Vec<C<f64>> = eps.iter().map(|&e| C::new(quadrature_ii(e, spec).0, 0.0)).collect();
    let (l, err) = super::fit::richardson_limit(&eps, &vals).expect("geometric schedule");
    (l.re, err)
}
