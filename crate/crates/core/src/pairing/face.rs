use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::functions::HolomorphicFunction;
use crate::geometry::PiecewiseDomain;
use crate::pairing::TestForm;
use crate::quadrature::{integrate_face, IntegralResult, QuadratureSpec};
use crate::scalar::{CPoint, Real, C};

type Density<T> = Arc<dyn Fn(&CPoint<T>) -> C<T> + Send + Sync>;
type Mask<T> = Arc<dyn Fn(&CPoint<T>) -> bool + Send + Sync>;

/// Density `αⱼ` on the face `∂Ωⱼ`, read only where the mask holds.
#[derive(Clone)]
pub struct FaceDistribution<T: Real> {
    pub face_index: usize,
    pub label: String,
    density: Density<T>,
    support_mask: Mask<T>,
}

impl<T: Real> fmt::Debug for FaceDistribution<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FaceDistribution").field("face_index", &self.face_index).field("label", &self.label).finish()
    }
}

impl<T: Real> FaceDistribution<T> {
    pub fn new<D, M>(face_index: usize, label: &str, density: D, support_mask: M) -> Self
    where
        D: Fn(&CPoint<T>) -> C<T> + Send + Sync + 'static,
        M: Fn(&CPoint<T>) -> bool + Send + Sync + 'static,
    {
        FaceDistribution {
            face_index,
            label: label.to_string(),
            density: Arc::new(density),
            support_mask: Arc::new(support_mask),
        }
    }

    /// `αⱼ = f|∂Ωⱼ∩Ω̄` on every face of the domain.
    pub fn restrictions(domain: &PiecewiseDomain<T>, f: &HolomorphicFunction<T>) -> Vec<Self> {
        (0..domain.pieces().len())
            .map(|j| {
                let g = f.clone();
                let dom = domain.clone();
                FaceDistribution::new(
                    j,
                    &format!("{}|face{j}", f.label),
                    move |z| g.eval(z),
                    move |z| (0..dom.dim()).all(|k| dom.planar_contains_closed(k, z[k], T::lit(1e-9))),
                )
            })
            .collect()
    }

    pub fn scaled(&self, k: C<T>) -> Self {
        let d = self.density.clone();
        FaceDistribution {
            face_index: self.face_index,
            label: format!("({k})*{}", self.label),
            density: Arc::new(move |z| d(z) * k),
            support_mask: self.support_mask.clone(),
        }
    }

    #[inline]
    pub fn eval(&self, z: &CPoint<T>) -> Option<C<T>> {
        (self.support_mask)(z).then(|| (self.density)(z))
    }
}

/// `Σⱼ ∫_{∂Ωⱼ∩Ω̄} αⱼ ψ`.
pub fn face_distribution_pairing<T: Real>(
    domain: &PiecewiseDomain<T>,
    distributions: &[FaceDistribution<T>],
    form: &TestForm<T>,
    spec: &QuadratureSpec,
) -> Result<IntegralResult<T>> {
    spec.validate()?;
    let mut total: Option<IntegralResult<T>> = None;
    for patch in domain.face_patches() {
        let here: Vec<&FaceDistribution<T>> = distributions.iter().filter(|d| d.face_index == patch.owner).collect();
        if here.is_empty() {
            continue;
        }
        let integrand = |z: &CPoint<T>, out: &mut [[C<T>; 2]]| {
            let a: C<T> = here.iter().filter_map(|d| d.eval(z)).sum();
            let g = form.coefficients(z);
            out[0] = [g[0] * a, g[1] * a];
        };
        let r = integrate_face(domain, &patch, 1, &integrand, &[], spec, None);
        match total.as_mut() {
            Some(t) => t.accumulate(&r),
            None => total = Some(r),
        }
    }
    let total =
        total.unwrap_or_else(|| IntegralResult::from_channels(vec![C::new(T::zero(), T::zero())], T::zero(), 0, true));
    total.require_converged()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::presets;
    use crate::pairing::Cutoff;

    #[test]
    fn zero_and_scaling() {
        let sq = presets::square::<f64>();
        let form = TestForm::parse(1, &["x"], Cutoff::None).unwrap();
        let spec = QuadratureSpec::default();
        let zero: Vec<_> = (0..4).map(|j| FaceDistribution::new(j, "0", |_| C::new(0.0, 0.0), |_| true)).collect();
        assert_eq!(face_distribution_pairing(&sq, &zero, &form, &spec).unwrap().value, C::new(0.0, 0.0));
        let f = HolomorphicFunction::parse("z", 1).unwrap();
        let a = FaceDistribution::restrictions(&sq, &f);
        let twice: Vec<_> = a.iter().map(|d| d.scaled(C::new(2.0, 0.0))).collect();
        let v1 = face_distribution_pairing(&sq, &a, &form, &spec).unwrap().value;
        let v2 = face_distribution_pairing(&sq, &twice, &form, &spec).unwrap().value;
        assert_eq!(v2, v1 * 2.0);
    }

    #[test]
    fn restriction_of_z_against_x_dz() {
        // ∮ z x dz on the square = ∫∫ 2i ∂_z̄(z x) dA = ∫∫ i z dA = i(4 + 4i)
        let sq = presets::square::<f64>();
        let form = TestForm::parse(1, &["x"], Cutoff::None).unwrap();
        let f = HolomorphicFunction::parse("z", 1).unwrap();
        let v =
            face_distribution_pairing(&sq, &FaceDistribution::restrictions(&sq, &f), &form, &QuadratureSpec::default())
                .unwrap()
                .value;
        assert!((v - C::new(-4.0, 4.0)).norm() < 1e-10, "{v}");
    }
}
