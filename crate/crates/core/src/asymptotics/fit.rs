use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{Real, C};

/// Candidate models for `F(ε)` on one real channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    Const,
    ConstLog,
    ConstPow1,
    ConstLogPow1,
}

impl Model {
    pub const ALL: [Model; 4] = [Model::Const, Model::ConstLog, Model::ConstPow1, Model::ConstLogPow1];

    pub fn code(self) -> &'static str {
        match self {
            Model::Const => "CONST",
            Model::ConstLog => "CONST+LOG",
            Model::ConstPow1 => "CONST+POW1",
            Model::ConstLogPow1 => "CONST+LOG+POW1",
        }
    }

    fn has_log(self) -> bool {
        matches!(self, Model::ConstLog | Model::ConstLogPow1)
    }

    fn has_pow(self) -> bool {
        matches!(self, Model::ConstPow1 | Model::ConstLogPow1)
    }

    fn params(self) -> usize {
        1 + self.has_log() as usize + self.has_pow() as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Classification {
    Convergent,
    Undetermined,
    LogDivergent,
    PowerDivergent,
}

impl Classification {
    pub fn code(self) -> &'static str {
        match self {
            Classification::Convergent => "CONVERGENT",
            Classification::LogDivergent => "LOG_DIVERGENT",
            Classification::PowerDivergent => "POWER_DIVERGENT",
            Classification::Undetermined => "UNDETERMINED",
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, Classification::LogDivergent | Classification::PowerDivergent)
    }
}

/// `value ≈ a + b·ln ε + c·ε⁻¹` on one channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelFit<T: Real> {
    pub model: Model,
    pub a: T,
    pub b: T,
    pub c: T,
    /// RMS misfit of the selected model.
    pub residual: T,
    pub classification: Classification,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticFit<T: Real> {
    /// Real and imaginary channels.
    pub channels: [ChannelFit<T>; 2],
    /// Worst channel.
    pub classification: Classification,
    /// Richardson limit, present iff convergent.
    pub limit: Option<C<T>>,
    /// Spread of the last two extrapolants, when a limit is present.
    pub limit_err: Option<T>,
    pub samples_used: usize,
    pub scale: T,
}

impl<T: Real> AsymptoticFit<T> {
    pub fn residual(&self) -> T {
        self.channels[0].residual.max(self.channels[1].residual)
    }
}

pub const MIN_SAMPLES: usize = 6;
pub const DEFAULT_WINDOW: usize = 8;
const PENALTY: f64 = 10.0;
const SIGNIFICANCE: f64 = 1e-3;
const UNDETERMINED_RESIDUAL: f64 = 1e-2;

/// Fits the last `window` points of `(ε, F(ε))` channel by channel and
/// classifies. Thresholds are relative to the largest `|F|` in the window.
pub fn fit_series<T: Real>(eps: &[T], values: &[C<T>], window: usize) -> Result<AsymptoticFit<T>> {
    fit_series_scaled(eps, values, window, T::zero())
}

/// As [`fit_series`], with thresholds relative to at least `scale_hint`
/// (for values that cancel toward zero, the size of the cancelling parts).
pub fn fit_series_scaled<T: Real>(
    eps: &[T],
    values: &[C<T>],
    window: usize,
    scale_hint: T,
) -> Result<AsymptoticFit<T>> {
    if eps.len() != values.len() {
        return Err(Error::Unsupported("epsilon and value series differ in length".into()));
    }
    if eps.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples { got: eps.len(), need: MIN_SAMPLES });
    }
    let w = window.max(MIN_SAMPLES).min(eps.len());
    let start = eps.len() - w;
    let (eps, values) = (&eps[start..], &values[start..]);
    let scale = values.iter().map(|v| v.norm()).fold(scale_hint, T::max).max(T::min_positive_value());
    let re: Vec<T> = values.iter().map(|v| v.re).collect();
    let im: Vec<T> = values.iter().map(|v| v.im).collect();
    let channels = [fit_channel(eps, &re, scale), fit_channel(eps, &im, scale)];
    let classification = channels[0].classification.max(channels[1].classification);
    let (limit, limit_err) = if classification == Classification::Convergent {
        match richardson_limit(eps, values) {
            Some((l, e)) => (Some(l), Some(e)),
            None => (None, None),
        }
    } else {
        (None, None)
    };
    // a convergent classification without a usable extrapolation is not trusted
    let classification = if classification == Classification::Convergent && limit.is_none() {
        Classification::Undetermined
    } else {
        classification
    };
    Ok(AsymptoticFit { channels, classification, limit, limit_err, samples_used: w, scale })
}

/// One candidate model on one channel, with its penalized selection score.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelCandidate<T: Real> {
    pub model: Model,
    pub a: T,
    pub b: T,
    pub c: T,
    pub residual: T,
    pub score: T,
}

fn candidates<T: Real>(eps: &[T], y: &[T], scale: T) -> Vec<ModelCandidate<T>> {
    let e_min = eps.iter().copied().fold(T::infinity(), T::min);
    let floor = T::lit(1e-12) * scale;
    Model::ALL
        .iter()
        .filter_map(|&model| {
            let (a, b, c, rms) = least_squares_fit(model, eps, y, e_min)?;
            let score = rms.max(floor) * T::lit(PENALTY.powi(model.params() as i32 - 1));
            Some(ModelCandidate { model, a, b, c, residual: rms, score })
        })
        .collect()
}

/// Every model fitted to the real and imaginary channels of the last
/// `window` samples, with the scale used by [`fit_series_scaled`].
pub fn model_candidates<T: Real>(
    eps: &[T],
    values: &[C<T>],
    window: usize,
    scale_hint: T,
) -> Result<[Vec<ModelCandidate<T>>; 2]> {
    if eps.len() != values.len() {
        return Err(Error::Unsupported("epsilon and value series differ in length".into()));
    }
    if eps.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples { got: eps.len(), need: MIN_SAMPLES });
    }
    let w = window.max(MIN_SAMPLES).min(eps.len());
    let start = eps.len() - w;
    let (eps, values) = (&eps[start..], &values[start..]);
    let scale = values.iter().map(|v| v.norm()).fold(scale_hint, T::max).max(T::min_positive_value());
    let re: Vec<T> = values.iter().map(|v| v.re).collect();
    let im: Vec<T> = values.iter().map(|v| v.im).collect();
    Ok([candidates(eps, &re, scale), candidates(eps, &im, scale)])
}

fn fit_channel<T: Real>(eps: &[T], y: &[T], scale: T) -> ChannelFit<T> {
    let e_min = eps.iter().copied().fold(T::infinity(), T::min);
    let mut best: Option<ModelCandidate<T>> = None;
    for cand in candidates(eps, y, scale) {
        if best.as_ref().is_none_or(|b| cand.score < b.score) {
            best = Some(cand);
        }
    }
    let Some(best) = best else {
        return ChannelFit {
            model: Model::Const,
            a: T::nan(),
            b: T::zero(),
            c: T::zero(),
            residual: T::infinity(),
            classification: Classification::Undetermined,
        };
    };
    let mut fit = ChannelFit {
        model: best.model,
        a: best.a,
        b: best.b,
        c: best.c,
        residual: best.residual,
        classification: Classification::Undetermined,
    };
    let sig = T::lit(SIGNIFICANCE) * scale;
    fit.classification = if !(fit.residual <= T::lit(UNDETERMINED_RESIDUAL) * scale) {
        Classification::Undetermined
    } else if fit.c.abs() > sig * e_min {
        Classification::PowerDivergent
    } else if fit.b.abs() > sig {
        Classification::LogDivergent
    } else {
        Classification::Convergent
    };
    fit
}

/// Least squares in the columns `1, ln(ε/ε_min), ε_min/ε`, mapped back to
/// `a + b ln ε + c/ε`.
fn least_squares_fit<T: Real>(model: Model, eps: &[T], y: &[T], e_min: T) -> Option<(T, T, T, T)> {
    let rows = eps.len();
    let cols = model.params();
    let mut m = Vec::with_capacity(rows * cols);
    for e in eps {
        m.push(T::one());
        if model.has_log() {
            m.push((*e / e_min).ln());
        }
        if model.has_pow() {
            m.push(e_min / *e);
        }
    }
    let coef = linalg::least_squares(&m, rows, cols, y)?;
    let mut rss = T::zero();
    for (r, yr) in y.iter().enumerate() {
        let pred: T = (0..cols).map(|j| m[r * cols + j] * coef[j]).sum();
        rss = rss + (*yr - pred) * (*yr - pred);
    }
    let rms = (rss / T::from_usize_lossy(rows)).sqrt();
    let mut it = coef.into_iter();
    let a0 = it.next()?;
    let b = if model.has_log() { it.next()? } else { T::zero() };
    let c0 = if model.has_pow() { it.next()? } else { T::zero() };
    Some((a0 - b * e_min.ln(), b, c0 * e_min, rms))
}

/// Exponents eliminated in turn: `ε` twice (absorbing `ε ln ε`), then `ε²`.
pub const RICHARDSON_EXPONENTS: [i32; 3] = [1, 1, 2];

/// Repeated Richardson elimination for `A_k` sampled at `ε_k = ε₀ r^k`.
/// Consumes `exponents.len() + 1` values; returns the final extrapolant and
/// the previous level for error estimation.
pub fn richardson<T: Real>(values: &[C<T>], ratio: T, exponents: &[i32]) -> Option<(C<T>, C<T>)> {
    if values.len() < exponents.len() + 1 || exponents.is_empty() {
        return None;
    }
    let mut level: Vec<C<T>> = values[values.len() - exponents.len() - 1..].to_vec();
    let mut prev = *level.last()?;
    for &p in exponents {
        let rp = ratio.powi(p);
        let denom = T::one() - rp;
        prev = *level.last()?;
        level = level.windows(2).map(|w| (w[1] - w[0] * rp) / denom).collect();
    }
    Some((level[0], prev))
}

/// Richardson limit over the last four samples of a geometric schedule,
/// with the spread against the previous level as error.
pub fn richardson_limit<T: Real>(eps: &[T], values: &[C<T>]) -> Option<(C<T>, T)> {
    let k = RICHARDSON_EXPONENTS.len() + 1;
    if eps.len() < k {
        return None;
    }
    let tail = &eps[eps.len() - k..];
    let r = tail[1] / tail[0];
    let geometric = tail.windows(2).all(|w| ((w[1] / w[0]) - r).abs() <= T::lit(1e-9) * r);
    if !geometric || !(r > T::zero() && r < T::one()) {
        return None;
    }
    let (l, prev) = richardson(values, r, &RICHARDSON_EXPONENTS)?;
    Some((l, (l - prev).norm()))
}

/// Existence verdict over the fits of a spanning set of test forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Existence {
    ExistsNumerically,
    FailsNumerically,
    Undetermined,
}

impl Existence {
    pub fn code(self) -> &'static str {
        match self {
            Existence::ExistsNumerically => "EXISTS_NUMERICALLY",
            Existence::FailsNumerically => "FAILS_NUMERICALLY",
            Existence::Undetermined => "UNDETERMINED",
        }
    }
}

pub fn classify_bc_existence<T: Real>(fits: &[AsymptoticFit<T>]) -> Existence {
    if fits.iter().any(|f| f.classification.is_divergent()) {
        Existence::FailsNumerically
    } else if !fits.is_empty() && fits.iter().all(|f| f.classification == Classification::Convergent) {
        Existence::ExistsNumerically
    } else {
        Existence::Undetermined
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schedule(n: usize) -> Vec<f64> {
        (0..n).map(|k| 0.1 * 0.5f64.powi(k as i32)).collect()
    }

    fn real_series(g: impl Fn(f64) -> f64) -> (Vec<f64>, Vec<C<f64>>) {
        let e = schedule(14);
        let v = e.iter().map(|&x| C::new(g(x), 0.0)).collect();
        (e, v)
    }

    #[test]
    fn log_growth() {
        let (e, v) = real_series(|x| 3.0 - x.ln());
        let f = fit_series(&e, &v, 8).unwrap();
        assert_eq!(f.channels[0].model, Model::ConstLog);
        assert!((f.channels[0].b + 1.0).abs() < 1e-9);
        assert!((f.channels[0].a - 3.0).abs() < 1e-8);
        assert_eq!(f.classification, Classification::LogDivergent);
        assert!(f.limit.is_none());
    }

    #[test]
    fn linear_tail_converges() {
        let (e, v) = real_series(|x| std::f64::consts::FRAC_PI_2 - 2.0 * x);
        let f = fit_series(&e, &v, 8).unwrap();
        assert_eq!(f.classification, Classification::Convergent);
        assert!((f.limit.unwrap().re - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn power_growth() {
        let (e, v) = real_series(|x| 1.0 + 0.5 / x);
        let f = fit_series(&e, &v, 8).unwrap();
        assert_eq!(f.channels[0].model, Model::ConstPow1);
        assert_eq!(f.classification, Classification::PowerDivergent);
    }

    #[test]
    fn eps_log_eps_tail_is_convergent_and_extrapolated() {
        let (e, v) = real_series(|x| 1.0 + 0.7 * x * x.ln() - 0.3 * x + 2.0 * x * x);
        let f = fit_series(&e, &v, 8).unwrap();
        assert_eq!(f.classification, Classification::Convergent);
        assert!((f.limit.unwrap().re - 1.0).abs() < 1e-9, "{:?}", f.limit);
    }

    #[test]
    fn too_few() {
        let (e, v) = real_series(|x| x);
        assert_eq!(fit_series(&e[..5], &v[..5], 8), Err(Error::TooFewSamples { got: 5, need: 6 }));
    }

    #[test]
    fn scale_invariance() {
        for g in [|x: f64| 3.0 - x.ln(), |x: f64| 1.0 + 0.5 / x, |x: f64| 2.0 - x] {
            let (e, v) = real_series(g);
            let v10: Vec<_> = v.iter().map(|z| z * 10.0).collect();
            let a = fit_series(&e, &v, 8).unwrap();
            let b = fit_series(&e, &v10, 8).unwrap();
            assert_eq!(a.classification, b.classification);
        }
    }

    #[test]
    fn existence_rules() {
        let (e, v) = real_series(|x| 3.0 - x.ln());
        let div = fit_series(&e, &v, 8).unwrap();
        let (e, v) = real_series(|x| 3.0 - x);
        let conv = fit_series(&e, &v, 8).unwrap();
        assert_eq!(classify_bc_existence(&[conv.clone(), div]), Existence::FailsNumerically);
        assert_eq!(classify_bc_existence(std::slice::from_ref(&conv)), Existence::ExistsNumerically);
        let mut und = conv;
        und.classification = Classification::Undetermined;
        assert_eq!(classify_bc_existence(&[und]), Existence::Undetermined);
    }
}
