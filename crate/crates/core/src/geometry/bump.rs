//! Smooth cutoff profiles built from `exp(-1/t)`.

use crate::scalar::Real;

fn psi<T: Real>(t: T) -> T {
    if t <= T::zero() {
        T::zero()
    } else {
        (-T::one() / t).exp()
    }
}

fn dpsi<T: Real>(t: T) -> T {
    if t <= T::zero() {
        T::zero()
    } else {
        (-T::one() / t).exp() / (t * t)
    }
}

/// C^∞ step: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
pub fn smooth_step<T: Real>(t: T) -> T {
    let a = psi(t);
    let b = psi(T::one() - t);
    a / (a + b)
}

pub fn smooth_step_derivative<T: Real>(t: T) -> T {
    if t <= T::zero() || t >= T::one() {
        return T::zero();
    }
    let a = psi(t);
    let b = psi(T::one() - t);
    let da = dpsi(t);
    let db = -dpsi(T::one() - t);
    (da * (a + b) - a * (da + db)) / ((a + b) * (a + b))
}

/// 1 on `s ≤ inner`, 0 on `s ≥ outer`, smooth in between.
pub fn plateau<T: Real>(s: T, inner: T, outer: T) -> T {
    // 1 − step(t) = step(1 − t), without the cancellation near the outer edge
    smooth_step((outer - s) / (outer - inner))
}

pub fn plateau_derivative<T: Real>(s: T, inner: T, outer: T) -> T {
    -smooth_step_derivative((s - inner) / (outer - inner)) / (outer - inner)
}

/// 0 on `s ≤ lo`, 1 on `s ≥ hi`.
pub fn gate<T: Real>(s: T, lo: T, hi: T) -> T {
    smooth_step((s - lo) / (hi - lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_limits_and_symmetry() {
        assert_eq!(smooth_step(-0.5_f64), 0.0);
        assert_eq!(smooth_step(1.5_f64), 1.0);
        for t in [0.1, 0.3, 0.5, 0.77] {
            assert!((smooth_step(t) + smooth_step(1.0 - t) - 1.0_f64).abs() < 1e-15);
        }
        assert_eq!(plateau(0.2_f64, 0.5, 1.0), 1.0);
        assert_eq!(plateau(1.2_f64, 0.5, 1.0), 0.0);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let h = 1e-6;
        for s in [0.55_f64, 0.7, 0.9, 0.98] {
            let fd = (plateau(s + h, 0.5, 1.0) - plateau(s - h, 0.5, 1.0)) / (2.0 * h);
            assert!((fd - plateau_derivative(s, 0.5, 1.0)).abs() < 1e-6, "{s}");
        }
    }
}
