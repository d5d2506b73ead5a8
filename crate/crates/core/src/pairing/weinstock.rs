use crate::asymptotics::{fit_models, DEFAULT_WINDOW};
use crate::error::{Error, Result};
use crate::functions::HolomorphicFunction;
use crate::geometry::{ChartCover, PiecewiseDomain};
use crate::pairing::{face_distribution_pairing, pairing_sequence, FaceDistribution, Schedule, TestForm};
use crate::quadrature::QuadratureSpec;
use crate::scalar::{Real, C};

/// The current being tested: the boundary value of a function, or a sum of
/// face distributions.
#[derive(Clone, Copy, Debug)]
pub enum Current<'a, T: Real> {
    Function { f: &'a HolomorphicFunction<T>, cover: &'a ChartCover<T>, schedule: Schedule },
    Faces(&'a [FaceDistribution<T>]),
}

/// How the pairing value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitMethod {
    /// `f` has no poles on Ω̄: the boundary integral of `f ψ` itself.
    Direct,
    /// Richardson limit of a convergent pairing sequence.
    Richardson,
    /// Face densities integrated directly.
    Faces,
}

impl LimitMethod {
    pub fn code(self) -> &'static str {
        match self {
            LimitMethod::Direct => "direct",
            LimitMethod::Richardson => "richardson",
            LimitMethod::Faces => "faces",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeinstockEntry<T: Real> {
    pub form: String,
    pub value: C<T>,
    pub err_est: T,
    pub method: LimitMethod,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeinstockReport<T: Real> {
    pub entries: Vec<WeinstockEntry<T>>,
    pub tolerance: T,
    pub pass: bool,
}

/// `|∂̄ψ|` above this on Ω̄ means the form is not closed.
pub const CLOSEDNESS_TOL: f64 = 1e-9;

/// `⟨γ, ψ⟩` without checking that ψ is ∂̄-closed.
pub fn force_pairing<T: Real>(
    domain: &PiecewiseDomain<T>,
    current: &Current<'_, T>,
    form: &TestForm<T>,
    spec: &QuadratureSpec,
) -> Result<(C<T>, T, LimitMethod)> {
    match current {
        Current::Faces(d) => {
            let r = face_distribution_pairing(domain, d, form, spec)?;
            Ok((r.value, r.err_est, LimitMethod::Faces))
        }
        Current::Function { f, cover, schedule } => {
            if !f.has_poles_on_closure(domain) {
                let faces = FaceDistribution::restrictions(domain, f);
                let r = face_distribution_pairing(domain, &faces, form, spec)?;
                return Ok((r.value, r.err_est, LimitMethod::Direct));
            }
            let samples = pairing_sequence(domain, f, form, cover, schedule, spec)?;
            let fit = fit_models(&samples, DEFAULT_WINDOW)?;
            match (fit.limit, fit.limit_err) {
                (Some(l), Some(e)) => Ok((l, e, LimitMethod::Richardson)),
                _ => Err(Error::Unsupported(format!(
                    "pairing of {} with {} is {}; no limit to test",
                    f.label,
                    form.label,
                    fit.classification.code()
                ))),
            }
        }
    }
}

/// Pairs the current with each ∂̄-closed form; passes when every
/// `|⟨γ, ω⟩| < tolerance`.
pub fn weinstock_test<T: Real>(
    domain: &PiecewiseDomain<T>,
    current: &Current<'_, T>,
    forms: &[TestForm<T>],
    tolerance: T,
    spec: &QuadratureSpec,
) -> Result<WeinstockReport<T>> {
    for form in forms {
        form.require_closed(domain, T::lit(CLOSEDNESS_TOL))?;
    }
    let mut entries = Vec::with_capacity(forms.len());
    for form in forms {
        let (value, err_est, method) = force_pairing(domain, current, form, spec)?;
        entries.push(WeinstockEntry {
            form: form.label.clone(),
            value,
            err_est,
            method,
            pass: value.norm() < tolerance,
        });
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(WeinstockReport { entries, tolerance, pass })
}
