//! Globally adaptive cubature with a deterministic splitting order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::quadrature::rule::{apply, Rule};
use crate::quadrature::{DiagnosticRow, IntegralResult, QuadratureSpec};
use crate::scalar::{Real, C};

struct Cell<T: Real> {
    lo: [T; 4],
    hi: [T; 4],
    value: Vec<C<T>>,
    err: T,
    err_dims: [T; 4],
    live: bool,
}

/// Heap key: largest error first, then oldest cell.
struct Key {
    err: f64,
    idx: usize,
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then_with(|| other.idx.cmp(&self.idx))
    }
}

/// Breakpoints along one axis: the ends, every hot value, and a geometric
/// grading of `depth` levels on both sides of each hot value.
pub fn graded_breakpoints<T: Real>(lo: T, hi: T, hot: &[T], depth: usize) -> Vec<T> {
    let width = hi - lo;
    let mut pts = vec![lo, hi];
    // hot values closer than the finest grading step share one grading
    let finest = width * T::lit(0.5f64.powi(depth as i32));
    let mut centers: Vec<T> = hot.iter().copied().filter(|h| *h >= lo && *h <= hi).collect();
    centers.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    centers.dedup_by(|a, b| (*a - *b).abs() < finest);
    for h in centers {
        pts.push(h);
        let mut step = width;
        for _ in 0..depth {
            step = step * T::lit(0.5);
            for p in [h - step, h + step] {
                if p > lo && p < hi {
                    pts.push(p);
                }
            }
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let tiny = T::lit(1e-13) * (width.abs() + T::one());
    pts.dedup_by(|a, b| (*a - *b).abs() <= tiny);
    pts
}

/// Integrates `f` over `[lo, hi] ⊂ ℝ^dim` starting from the tensor grid of
/// `breaks` (one sorted breakpoint list per axis).
pub fn integrate_box<T: Real, F>(
    dim: usize,
    breaks: &[Vec<T>],
    channels: usize,
    spec: &QuadratureSpec,
    f: &F,
    mut diag: Option<&mut Vec<DiagnosticRow>>,
) -> IntegralResult<T>
where
    F: Fn(&[T], &mut [C<T>]),
{
    let rule = Rule::<T>::new();
    let eps = T::epsilon();
    let floor = T::lit(50.0) * eps;
    let mut cells: Vec<Cell<T>> = Vec::new();
    let mut heap = BinaryHeap::new();

    let eval = |lo: [T; 4], hi: [T; 4]| -> Cell<T> {
        let est = apply(&rule, &lo, &hi, dim, channels, f);
        let raw: T = est.err_dims[..dim].iter().copied().sum();
        let err = raw.max(floor * est.resabs);
        Cell { lo, hi, value: est.value, err, err_dims: est.err_dims, live: true }
    };

    // initial tensor grid
    let counts: Vec<usize> = breaks.iter().map(|b| b.len() - 1).collect();
    let total: usize = counts.iter().product();
    let mut idx = vec![0usize; dim];
    for _ in 0..total {
        let mut lo = [T::zero(); 4];
        let mut hi = [T::zero(); 4];
        for d in 0..dim {
            lo[d] = breaks[d][idx[d]];
            hi[d] = breaks[d][idx[d] + 1];
        }
        cells.push(eval(lo, hi));
        for d in 0..dim {
            idx[d] += 1;
            if idx[d] < counts[d] {
                break;
            }
            idx[d] = 0;
        }
    }
    let mut total_val = vec![C::new(T::zero(), T::zero()); channels];
    let mut total_err = T::zero();
    for (i, c) in cells.iter().enumerate() {
        for (t, v) in total_val.iter_mut().zip(&c.value) {
            *t = *t + *v;
        }
        total_err = total_err + c.err;
        heap.push(Key { err: c.err.to_f64_lossy(), idx: i });
    }

    let abs_tol = T::lit(spec.abs_tol);
    let rel_tol = T::lit(spec.rel_tol);
    let mut splits = 0usize;
    let mut next_log = 1usize;
    let converged;
    loop {
        let sum: C<T> = total_val.iter().fold(C::new(T::zero(), T::zero()), |a, b| a + *b);
        let tol = abs_tol.max(rel_tol * sum.norm());
        if let Some(rows) = diag.as_deref_mut() {
            if splits == 0 || splits >= next_log {
                rows.push(DiagnosticRow {
                    cells: cells.iter().filter(|c| c.live).count(),
                    re: sum.re.to_f64_lossy(),
                    im: sum.im.to_f64_lossy(),
                    err_est: total_err.to_f64_lossy(),
                });
                next_log = (splits * 2).max(1);
            }
        }
        if total_err <= tol {
            converged = true;
            break;
        }
        if splits >= spec.max_subdivisions {
            converged = false;
            break;
        }
        let Some(Key { idx: i, .. }) = heap.pop() else {
            // every remaining cell is at resolution limit
            converged = false;
            break;
        };
        let (lo, hi, err_dims) = (cells[i].lo, cells[i].hi, cells[i].err_dims);
        let mut axis = 0;
        for d in 1..dim {
            if err_dims[d] > err_dims[axis] {
                axis = d;
            }
        }
        let mid = (lo[axis] + hi[axis]) * T::lit(0.5);
        if !(mid > lo[axis] && mid < hi[axis]) {
            continue;
        }
        let mut hi_a = hi;
        hi_a[axis] = mid;
        let mut lo_b = lo;
        lo_b[axis] = mid;
        let a = eval(lo, hi_a);
        let b = eval(lo_b, hi);
        cells[i].live = false;
        for ((t, p), (va, vb)) in total_val.iter_mut().zip(&cells[i].value).zip(a.value.iter().zip(&b.value)) {
            *t = *t - *p + *va + *vb;
        }
        total_err = total_err - cells[i].err + a.err + b.err;
        for c in [a, b] {
            heap.push(Key { err: c.err.to_f64_lossy(), idx: cells.len() });
            cells.push(c);
        }
        splits += 1;
        if splits.is_multiple_of(1024) {
            // refresh the running error sum to keep drift out of the stopping test
            total_err = cells.iter().filter(|c| c.live).map(|c| c.err).sum();
        }
    }

    // fixed summation order: creation index
    let mut value = vec![C::new(T::zero(), T::zero()); channels];
    let mut err = T::zero();
    let mut live = 0usize;
    for c in cells.iter().filter(|c| c.live) {
        for (t, v) in value.iter_mut().zip(&c.value) {
            *t = *t + *v;
        }
        err = err + c.err;
        live += 1;
    }
    IntegralResult::from_channels(value, err, live, converged)
}
