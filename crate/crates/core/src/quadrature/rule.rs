//! Tensor-product Gauss–Kronrod 7/15 rule on boxes of dimension ≤ 4.

use crate::scalar::{Real, C};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

pub const NODES: usize = 15;

/// Nodes on `[-1, 1]` with Kronrod and Gauss weights (Gauss weight 0 off the
/// 7-point subset).
pub struct Rule<T: Real> {
    pub x: [T; NODES],
    pub wk: [T; NODES],
    pub wg: [T; NODES],
}

impl<T: Real> Rule<T> {
    pub fn new() -> Self {
        let mut x = [T::zero(); NODES];
        let mut wk = [T::zero(); NODES];
        let mut wg = [T::zero(); NODES];
        for i in 0..7 {
            x[i] = -T::lit(XGK[i]);
            x[NODES - 1 - i] = T::lit(XGK[i]);
            wk[i] = T::lit(WGK[i]);
            wk[NODES - 1 - i] = T::lit(WGK[i]);
            if i % 2 == 1 {
                wg[i] = T::lit(WG[i / 2]);
                wg[NODES - 1 - i] = T::lit(WG[i / 2]);
            }
        }
        x[7] = T::zero();
        wk[7] = T::lit(WGK[7]);
        wg[7] = T::lit(WG[3]);
        Rule { x, wk, wg }
    }
}

impl<T: Real> Default for Rule<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Result of applying the rule pair to one box.
pub struct CellEstimate<T: Real> {
    /// Kronrod value per channel.
    pub value: Vec<C<T>>,
    /// `|K − G_d|` of the channel sum, where `G_d` uses Gauss weights in axis `d` only.
    pub err_dims: [T; 4],
    /// Kronrod integral of the absolute channel sum.
    pub resabs: T,
}

/// Applies the tensor rule to `f` on the box `[lo, hi]` of dimension `dim`.
/// `f` writes one value per channel into its output slice.
pub fn apply<T: Real, F>(
    rule: &Rule<T>,
    lo: &[T; 4],
    hi: &[T; 4],
    dim: usize,
    channels: usize,
    f: &F,
) -> CellEstimate<T>
where
    F: Fn(&[T], &mut [C<T>]),
{
    let half = T::lit(0.5);
    let mut center = [T::zero(); 4];
    let mut hw = [T::zero(); 4];
    let mut vol = T::one();
    for d in 0..dim {
        center[d] = (lo[d] + hi[d]) * half;
        hw[d] = (hi[d] - lo[d]) * half;
        vol = vol * hw[d];
    }
    let mut value = vec![C::new(T::zero(), T::zero()); channels];
    let mut gauss = [C::new(T::zero(), T::zero()); 4];
    let mut resabs = T::zero();
    let mut out = vec![C::new(T::zero(), T::zero()); channels];
    let mut s = [T::zero(); 4];
    let total = NODES.pow(dim as u32);
    let mut idx = [0usize; 4];
    for _ in 0..total {
        let mut wk = T::one();
        for d in 0..dim {
            s[d] = center[d] + hw[d] * rule.x[idx[d]];
            wk = wk * rule.wk[idx[d]];
        }
        for o in out.iter_mut() {
            *o = C::new(T::zero(), T::zero());
        }
        f(&s[..dim], &mut out);
        let mut sum = C::new(T::zero(), T::zero());
        for (v, o) in value.iter_mut().zip(&out) {
            *v = *v + *o * wk;
            sum = sum + *o;
        }
        resabs = resabs + sum.norm() * wk;
        for d in 0..dim {
            let g = rule.wg[idx[d]];
            if g != T::zero() {
                gauss[d] = gauss[d] + sum * (wk / rule.wk[idx[d]] * g);
            }
        }
        // odometer
        for d in 0..dim {
            idx[d] += 1;
            if idx[d] < NODES {
                break;
            }
            idx[d] = 0;
        }
    }
    let mut total_k = C::new(T::zero(), T::zero());
    for v in value.iter_mut() {
        *v = *v * vol;
        total_k = total_k + *v;
    }
    let mut err_dims = [T::zero(); 4];
    for d in 0..dim {
        err_dims[d] = (total_k - gauss[d] * vol).norm();
    }
    CellEstimate { value, err_dims, resabs: resabs * vol }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        let r = Rule::<f64>::new();
        assert!((r.wk.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert!((r.wg.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn exact_for_polynomials() {
        let r = Rule::<f64>::new();
        let lo = [0.0, -1.0, 0.5, 0.0];
        let hi = [1.0, 2.0, 1.5, 0.0];
        // ∫ x⁵ y² z¹³ over the box
        let e = apply(&r, &lo, &hi, 3, 1, &|s: &[f64], o: &mut [C<f64>]| {
            o[0] = C::new(s[0].powi(5) * s[1].powi(2) * s[2].powi(13), 0.0)
        });
        let want = (1.0 / 6.0) * ((8.0 + 1.0) / 3.0) * ((1.5f64.powi(14) - 0.5f64.powi(14)) / 14.0);
        assert!((e.value[0].re - want).abs() < 1e-12 * want);
        // Gauss 7 is exact to degree 13 in each axis, so the estimates vanish
        assert!(e.err_dims.iter().all(|v| *v < 1e-10 * want));
    }
}
