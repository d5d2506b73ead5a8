//! Behaviour of pairing sequences as `ε → 0`, and closed-form oracles for
//! the corner segment integral.

pub mod closed_form;
pub mod fit;

use crate::error::Result;
use crate::pairing::PairingSample;
use crate::scalar::{Real, C};

pub use closed_form::{
    closed_form_i, closed_form_ii, closed_form_segment, oracle_conflicts, verify_antiderivatives, AntiderivativeCheck,
    OracleConflict, Source,
};
pub use fit::{
    classify_bc_existence, fit_series, fit_series_scaled, model_candidates, richardson, richardson_limit,
    AsymptoticFit, ChannelFit, Classification, Existence, Model, ModelCandidate, DEFAULT_WINDOW, MIN_SAMPLES,
};

/// [`fit_series_scaled`] on a pairing sequence ordered by decreasing ε. The
/// scale is the largest `Σ |per-chart contribution|` in the window, so a
/// limit of zero reached through cancellation is judged against the size of
/// what cancels.
pub fn fit_models<T: Real>(samples: &[PairingSample<T>], window: usize) -> Result<AsymptoticFit<T>> {
    let (eps, vals, hint) = series(samples, window);
    fit_series_scaled(&eps, &vals, window, hint)
}

/// Every candidate model for a pairing sequence, scaled as in [`fit_models`].
pub fn fit_candidates<T: Real>(samples: &[PairingSample<T>], window: usize) -> Result<[Vec<ModelCandidate<T>>; 2]> {
    let (eps, vals, hint) = series(samples, window);
    model_candidates(&eps, &vals, window, hint)
}

fn series<T: Real>(samples: &[PairingSample<T>], window: usize) -> (Vec<T>, Vec<C<T>>, T) {
    let eps: Vec<T> = samples.iter().map(|s| s.epsilon).collect();
    let vals: Vec<C<T>> = samples.iter().map(|s| s.value).collect();
    let start = samples.len().saturating_sub(window.max(MIN_SAMPLES));
    let hint = samples[start..].iter().map(|s| s.per_chart.iter().map(|c| c.norm()).sum::<T>()).fold(T::zero(), T::max);
    (eps, vals, hint)
}
