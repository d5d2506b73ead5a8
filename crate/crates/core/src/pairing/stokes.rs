use crate::error::{Error, Result};
use crate::functions::HolomorphicFunction;
use crate::geometry::PiecewiseDomain;
use crate::pairing::TestForm;
use crate::quadrature::{integrate_volume, IntegralResult, QuadratureSpec};
use crate::scalar::{Real, C};

/// Sign relating `∫_Ω f ∂̄ψ` to the boundary pairing. Fixed by matching
/// `f ≡ 1`, `ψ = x dz` on the square against the boundary integral; the
/// calibration is re-run by the tests.
pub const STOKES_SIGN: f64 = 1.0;

/// Cell budget for the absolute-integrability probe.
pub const L1_CHECK_SUBDIVISIONS: usize = 4000;
const L1_CHECK_REL_TOL: f64 = 1e-6;

/// Fails with `NotL1` unless `∫_Ω |f|` converges within a small budget.
pub fn check_l1<T: Real>(domain: &PiecewiseDomain<T>, f: &HolomorphicFunction<T>, spec: &QuadratureSpec) -> Result<T> {
    let probe = QuadratureSpec {
        rel_tol: L1_CHECK_REL_TOL,
        abs_tol: spec.abs_tol,
        max_subdivisions: L1_CHECK_SUBDIVISIONS,
        corner_refine_depth: spec.corner_refine_depth,
    };
    let r = integrate_volume(domain, &|z| C::new(f.eval(z).norm(), T::zero()), f.poles(), &probe, None);
    if !r.converged || !r.value.re.is_finite() {
        return Err(Error::NotL1(format!(
            "integral of |{}| not resolved within {} cells (estimate {:e} ± {:e})",
            f.label,
            r.cells_used,
            r.value.re.to_f64_lossy(),
            r.err_est.to_f64_lossy()
        )));
    }
    Ok(r.value.re)
}

/// `σ ∫_Ω f ∂̄ψ`, the pairing of `−∂̄(f[Ω])` with ψ for `f ∈ L¹(Ω)`.
pub fn stokes_oracle<T: Real>(
    domain: &PiecewiseDomain<T>,
    f: &HolomorphicFunction<T>,
    form: &TestForm<T>,
    spec: &QuadratureSpec,
) -> Result<IntegralResult<T>> {
    spec.validate()?;
    f.check_no_interior_poles(domain)?;
    check_l1(domain, f, spec)?;
    let sigma = T::lit(STOKES_SIGN);
    let r = integrate_volume(domain, &|z| f.eval(z) * form.dbar_density(z) * sigma, f.poles(), spec, None);
    r.require_converged()
}
