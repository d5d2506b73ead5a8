//! Small dense kernels: singular values by one-sided Jacobi, numerical rank,
//! and a pivoted Gaussian solve. Matrices here are at most 4×8.

use crate::scalar::{Real, C};

/// Singular values of a real `rows × cols` matrix stored row-major,
/// sorted in decreasing order.
pub fn singular_values<T: Real>(a: &[T], rows: usize, cols: usize) -> Vec<T> {
    assert_eq!(a.len(), rows * cols);
    // Work on the orientation with fewer columns so rotations act on columns.
    let (m, n, mut w) = if cols <= rows {
        (rows, cols, a.to_vec())
    } else {
        let mut t = vec![T::zero(); rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                t[j * rows + i] = a[i * cols + j];
            }
        }
        (cols, rows, t)
    };
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..m {
                    let x = w[i * n + p];
                    let y = w[i * n + q];
                    alpha = alpha + x * x;
                    beta = beta + y * y;
                    gamma = gamma + x * y;
                }
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == T::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let x = w[i * n + p];
                    let y = w[i * n + q];
                    w[i * n + p] = c * x - s * y;
                    w[i * n + q] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = (0..n).map(|j| (0..m).map(|i| w[i * n + j] * w[i * n + j]).sum::<T>().sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Number of singular values above `rel_threshold · σ_max`.
pub fn numerical_rank<T: Real>(a: &[T], rows: usize, cols: usize, rel_threshold: T) -> usize {
    let sv = singular_values(a, rows, cols);
    let smax = sv.first().copied().unwrap_or_else(T::zero);
    if smax == T::zero() {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_threshold * smax).count()
}

/// Rank over ℂ of a complex `rows × cols` matrix, computed from the real
/// embedding `[[A, -B], [B, A]]` whose singular values are those of `A + iB`
/// each repeated twice.
pub fn complex_rank<T: Real>(a: &[C<T>], rows: usize, cols: usize, rel_threshold: T) -> usize {
    let (r2, c2) = (2 * rows, 2 * cols);
    let mut e = vec![T::zero(); r2 * c2];
    for i in 0..rows {
        for j in 0..cols {
            let z = a[i * cols + j];
            e[i * c2 + j] = z.re;
            e[i * c2 + cols + j] = -z.im;
            e[(rows + i) * c2 + j] = z.im;
            e[(rows + i) * c2 + cols + j] = z.re;
        }
    }
    numerical_rank(&e, r2, c2, rel_threshold) / 2
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when a pivot falls below `1e-14 · max|a|`.
pub fn solve<T: Real>(a: &[T], b: &[T]) -> Option<Vec<T>> {
    let n = b.len();
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    if scale == T::zero() {
        return None;
    }
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| m[i * n + k].abs().partial_cmp(&m[j * n + k].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap();
        if m[piv * n + k].abs() <= T::lit(1e-14) * scale {
            return None;
        }
        if piv != k {
            for j in 0..n {
                m.swap(k * n + j, piv * n + j);
            }
            x.swap(k, piv);
        }
        for i in (k + 1)..n {
            let f = m[i * n + k] / m[k * n + k];
            for j in k..n {
                m[i * n + j] = m[i * n + j] - f * m[k * n + j];
            }
            x[i] = x[i] - f * x[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in (k + 1)..n {
            s = s - m[k * n + j] * x[j];
        }
        x[k] = s / m[k * n + k];
    }
    Some(x)
}

/// Least-squares solution of the overdetermined system `a x ≈ b`
/// (`rows × cols`, row-major, `rows ≥ cols`) by Householder QR.
/// Returns `None` for a rank-deficient design.
pub fn least_squares<T: Real>(a: &[T], rows: usize, cols: usize, b: &[T]) -> Option<Vec<T>> {
    assert!(rows >= cols && a.len() == rows * cols && b.len() == rows);
    let mut r = a.to_vec();
    let mut y = b.to_vec();
    let scale = r.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    for k in 0..cols {
        let norm = (k..rows).map(|i| r[i * cols + k] * r[i * cols + k]).sum::<T>().sqrt();
        if norm <= T::lit(1e-13) * scale {
            return None;
        }
        let alpha = if r[k * cols + k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..rows).map(|i| r[i * cols + k]).collect();
        v[0] = v[0] - alpha;
        let vnorm2 = v.iter().map(|x| *x * *x).sum::<T>();
        if vnorm2 == T::zero() {
            continue;
        }
        for j in k..cols {
            let dot = (k..rows).map(|i| v[i - k] * r[i * cols + j]).sum::<T>();
            let f = T::lit(2.0) * dot / vnorm2;
            for i in k..rows {
                r[i * cols + j] = r[i * cols + j] - f * v[i - k];
            }
        }
        let dot = (k..rows).map(|i| v[i - k] * y[i]).sum::<T>();
        let f = T::lit(2.0) * dot / vnorm2;
        for i in k..rows {
            y[i] = y[i] - f * v[i - k];
        }
    }
    let mut x = vec![T::zero(); cols];
    for k in (0..cols).rev() {
        let mut s = y[k];
        for j in (k + 1)..cols {
            s = s - r[k * cols + j] * x[j];
        }
        x[k] = s / r[k * cols + k];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_values_of_diagonal() {
        let a = [3.0_f64, 0.0, 0.0, 0.0, -2.0, 0.0];
        let sv = singular_values(&a, 2, 3);
        assert!((sv[0] - 3.0).abs() < 1e-14 && (sv[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn singular_values_match_closed_form_2x2() {
        // [[1, 2], [3, 4]]: σ² are the eigenvalues of AᵀA = [[10, 14], [14, 20]].
        let a = [1.0_f64, 2.0, 3.0, 4.0];
        let sv = singular_values(&a, 2, 2);
        let tr = 30.0_f64;
        let det = 10.0 * 20.0 - 14.0 * 14.0;
        let disc = (tr * tr / 4.0 - det).sqrt();
        let expect = [(tr / 2.0 + disc).sqrt(), (tr / 2.0 - disc).sqrt()];
        assert!((sv[0] - expect[0]).abs() < 1e-12);
        assert!((sv[1] - expect[1]).abs() < 1e-12);
    }

    #[test]
    fn rank_detects_parallel_rows() {
        let a = [1.0, 2.0, 0.0, 2.0, 4.0, 0.0];
        assert_eq!(numerical_rank(&a, 2, 3, 1e-8), 1);
        let b = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        assert_eq!(numerical_rank(&b, 2, 3, 1e-8), 2);
    }

    #[test]
    fn complex_rank_sees_complex_dependence() {
        // rows (1, i) and (i, -1) are dependent over C but not over R.
        let a = [C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(0.0, 1.0), C::new(-1.0, 0.0)];
        assert_eq!(complex_rank(&a, 2, 2, 1e-8), 1);
        let b = [C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 1.0)];
        assert_eq!(complex_rank(&b, 2, 2, 1e-8), 2);
    }

    #[test]
    fn solve_and_least_squares() {
        let x = solve(&[2.0_f64, 1.0, 1.0, 3.0], &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
        assert!(solve(&[1.0, 2.0, 2.0, 4.0], &[1.0, 1.0]).is_none());
        // fit y = 2 + 3t exactly
        let ts = [0.0, 1.0, 2.0, 3.0];
        let a: Vec<f64> = ts.iter().flat_map(|&t| [1.0, t]).collect();
        let b: Vec<f64> = ts.iter().map(|t| 2.0 + 3.0 * t).collect();
        let c = least_squares(&a, 4, 2, &b).unwrap();
        assert!((c[0] - 2.0).abs() < 1e-12 && (c[1] - 3.0).abs() < 1e-12);
    }
}
