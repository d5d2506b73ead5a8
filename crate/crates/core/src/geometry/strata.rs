use log::debug;

use crate::geometry::domain::PiecewiseDomain;
use crate::linalg;
use crate::scalar::{cdist, from_real, to_real, CPoint, Real, C};

/// Genericity verdict for one stratum `B_S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Generic,
    NonGenericComplexRank,
    NonGenericCardinality,
    NotTransversal,
    Empty,
}

impl Verdict {
    pub fn code(self) -> &'static str {
        match self {
            Verdict::Generic => "GENERIC",
            Verdict::NonGenericComplexRank => "NON_GENERIC_COMPLEX_RANK",
            Verdict::NonGenericCardinality => "NON_GENERIC_CARDINALITY",
            Verdict::NotTransversal => "NOT_TRANSVERSAL",
            Verdict::Empty => "EMPTY",
        }
    }
}

/// Ranks of the differentials at one sample point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankData {
    pub real_rank: usize,
    pub complex_rank: usize,
}

/// `B_S = ∩_{j∈S} ∂Ωⱼ ∩ Ω̄` with sample points and a verdict.
#[derive(Clone, Debug)]
pub struct CornerStratum<T: Real> {
    pub subset: Vec<usize>,
    pub samples: Vec<CPoint<T>>,
    pub verdict: Option<Verdict>,
    pub rank_data: Vec<RankData>,
}

/// Summary over all strata with `|S| ≥ 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainVerdict {
    GenericCorners,
    NonGenericCorners,
    NotTransversal,
}

impl DomainVerdict {
    pub fn code(self) -> &'static str {
        match self {
            DomainVerdict::GenericCorners => "GENERIC_CORNERS",
            DomainVerdict::NonGenericCorners => "NON_GENERIC_CORNERS",
            DomainVerdict::NotTransversal => "NOT_TRANSVERSAL",
        }
    }
}

const MAX_SAMPLES: usize = 64;
const NEWTON_ITERS: usize = 50;
const RANK_THRESHOLD: f64 = 1e-8;

/// Samples every nonempty subset of pieces, faces included.
///
/// Seeds are centres of a `grid_resolution^{2n}` grid over the bounding box
/// whose cells come within a half diagonal of every zero set in `S`; each seed
/// is refined by damped Gauss–Newton with the minimal-norm step. Strata are
/// returned unclassified.
pub fn locate_strata<T: Real>(domain: &PiecewiseDomain<T>, grid_resolution: usize) -> Vec<CornerStratum<T>> {
    let res = grid_resolution.max(8);
    let n = domain.pieces().len();
    let dims = 2 * domain.dim();
    let bbox = domain.bbox();
    let widths: Vec<T> = (0..dims).map(|k| (bbox.hi[k] - bbox.lo[k]) / T::from_usize_lossy(res)).collect();
    let half_diag = widths.iter().map(|w| *w * *w).sum::<T>().sqrt() * T::lit(0.5);
    let diam = domain.diameter();
    let cells = res.pow(dims as u32);

    let mut out = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let subset: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        let mut samples: Vec<CPoint<T>> = Vec::new();
        let mut failures = 0usize;
        for cell in 0..cells {
            let mut x = [T::zero(); 4];
            let mut c = cell;
            for (k, xk) in x.iter_mut().enumerate().take(dims) {
                let i = c % res;
                c /= res;
                *xk = bbox.lo[k] + widths[k] * (T::from_usize_lossy(i) + T::lit(0.5));
            }
            let z = from_real(&x);
            let near = subset.iter().all(|&j| {
                let p = &domain.pieces()[j];
                p.distance_to_zero_set(z[p.coord]) <= half_diag
            });
            if !near {
                continue;
            }
            match newton(domain, &subset, x) {
                Some(p) => {
                    let pz = from_real(&p);
                    let tol = T::lit(1e-9) * (T::one() + diam);
                    let inside = (0..n).filter(|j| !subset.contains(j)).all(|j| domain.pieces()[j].rho(&pz) <= tol);
                    let in_box = (0..dims).all(|k| p[k] >= bbox.lo[k] - tol && p[k] <= bbox.hi[k] + tol);
                    if inside && in_box && !samples.iter().any(|q| cdist(q, &pz) < T::lit(1e-8) * diam) {
                        samples.push(pz);
                    }
                }
                None => failures += 1,
            }
        }
        if failures > 0 {
            debug!("stratum {subset:?}: Newton failed from {failures} seed cells (skipped)");
        }
        if samples.len() > MAX_SAMPLES {
            let step = samples.len() as f64 / MAX_SAMPLES as f64;
            samples = (0..MAX_SAMPLES).map(|i| samples[(i as f64 * step) as usize]).collect();
        }
        out.push(CornerStratum { subset, samples, verdict: None, rank_data: Vec::new() });
    }
    out
}

fn newton<T: Real>(domain: &PiecewiseDomain<T>, subset: &[usize], mut x: [T; 4]) -> Option<[T; 4]> {
    let dims = 2 * domain.dim();
    let m = subset.len();
    let residual = |x: &[T; 4]| -> Vec<T> {
        let z = from_real(x);
        subset.iter().map(|&j| domain.pieces()[j].rho(&z)).collect()
    };
    let norm = |r: &[T]| r.iter().map(|v| *v * *v).sum::<T>().sqrt();
    let scale = {
        let z = from_real(&x);
        subset
            .iter()
            .map(|&j| {
                let g = domain.pieces()[j].grad(&z);
                g.iter().map(|v| *v * *v).sum::<T>().sqrt()
            })
            .fold(T::zero(), T::max)
            * (T::one() + domain.diameter())
    };
    let tol = T::lit(1e-13) * (T::one() + scale);
    let mut r = residual(&x);
    for _ in 0..NEWTON_ITERS {
        let rn = norm(&r);
        if rn <= tol {
            return Some(x);
        }
        let z = from_real(&x);
        let jac: Vec<[T; 4]> = subset.iter().map(|&j| domain.pieces()[j].grad(&z)).collect();
        let mut jjt = vec![T::zero(); m * m];
        for a in 0..m {
            for b in 0..m {
                jjt[a * m + b] = (0..dims).map(|k| jac[a][k] * jac[b][k]).sum();
            }
        }
        let y = linalg::solve(&jjt, &r)?;
        let mut step = [T::zero(); 4];
        for (k, sk) in step.iter_mut().enumerate().take(dims) {
            *sk = (0..m).map(|a| jac[a][k] * y[a]).sum();
        }
        let mut lambda = T::one();
        loop {
            let mut xn = x;
            for k in 0..dims {
                xn[k] = x[k] - lambda * step[k];
            }
            let rn_new = residual(&xn);
            if norm(&rn_new) < rn || lambda < T::lit(1e-6) {
                x = xn;
                r = rn_new;
                break;
            }
            lambda = lambda * T::lit(0.5);
        }
    }
    (norm(&r) <= tol).then_some(x)
}

/// Assigns the verdict from cardinality, real rank of `{dρⱼ}` and complex rank
/// of `{∂ρⱼ}` at every sample.
pub fn classify_stratum<T: Real>(domain: &PiecewiseDomain<T>, mut stratum: CornerStratum<T>) -> CornerStratum<T> {
    let n = domain.dim();
    let s = stratum.subset.len();
    let thr = T::lit(RANK_THRESHOLD);
    stratum.rank_data = stratum
        .samples
        .iter()
        .map(|z| {
            let mut real = Vec::with_capacity(s * 2 * n);
            let mut cplx: Vec<C<T>> = Vec::with_capacity(s * n);
            for &j in &stratum.subset {
                let p = &domain.pieces()[j];
                real.extend_from_slice(&p.grad(z)[..2 * n]);
                cplx.extend_from_slice(&p.del(z)[..n]);
            }
            RankData {
                real_rank: linalg::numerical_rank(&real, s, 2 * n, thr),
                complex_rank: linalg::complex_rank(&cplx, s, n, thr),
            }
        })
        .collect();
    let verdict = if stratum.samples.is_empty() {
        Verdict::Empty
    } else if s > n {
        Verdict::NonGenericCardinality
    } else if stratum.rank_data.iter().any(|r| r.real_rank < s) {
        Verdict::NotTransversal
    } else if stratum.rank_data.iter().any(|r| r.complex_rank < s) {
        Verdict::NonGenericComplexRank
    } else {
        Verdict::Generic
    };
    stratum.verdict = Some(verdict);
    stratum
}

/// Domain-level verdict from the classified corner strata (`|S| ≥ 2`).
pub fn domain_verdict<T: Real>(strata: &[CornerStratum<T>]) -> DomainVerdict {
    let corners: Vec<Verdict> = strata.iter().filter(|s| s.subset.len() >= 2).filter_map(|s| s.verdict).collect();
    if corners.contains(&Verdict::NotTransversal) {
        DomainVerdict::NotTransversal
    } else if corners.iter().any(|v| matches!(v, Verdict::NonGenericCardinality | Verdict::NonGenericComplexRank)) {
        DomainVerdict::NonGenericCorners
    } else {
        DomainVerdict::GenericCorners
    }
}

/// Real coordinates of a sample, for reports.
pub fn sample_coords<T: Real>(z: &CPoint<T>, dim: usize) -> Vec<f64> {
    to_real(z)[..2 * dim].iter().map(|v| v.to_f64_lossy()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::presets;

    fn classify_all<T: Real>(d: &PiecewiseDomain<T>) -> Vec<CornerStratum<T>> {
        locate_strata(d, 8).into_iter().map(|s| classify_stratum(d, s)).collect()
    }

    #[test]
    fn square_corner_at_origin() {
        let d = presets::square::<f64>();
        let strata = classify_all(&d);
        let s = strata.iter().find(|s| s.subset == vec![0, 2]).unwrap();
        assert_eq!(s.samples.len(), 1);
        assert!(s.samples[0][0].norm() < 1e-12);
        assert_eq!(s.verdict, Some(Verdict::NonGenericCardinality));
        let parallel = strata.iter().find(|s| s.subset == vec![0, 1]).unwrap();
        assert_eq!(parallel.verdict, Some(Verdict::Empty));
        let corners: Vec<_> = strata.iter().filter(|s| s.subset.len() >= 2 && !s.samples.is_empty()).collect();
        assert_eq!(corners.len(), 4);
        assert_eq!(domain_verdict(&strata), DomainVerdict::NonGenericCorners);
    }

    #[test]
    fn bidisc_torus_is_generic() {
        let d = presets::bidisc::<f64>();
        let strata = classify_all(&d);
        let t = strata.iter().find(|s| s.subset == vec![0, 1]).unwrap();
        assert!(t.samples.len() > 4);
        for z in &t.samples {
            assert!((z[0].norm() - 1.0).abs() < 1e-10 && (z[1].norm() - 1.0).abs() < 1e-10);
        }
        assert_eq!(t.verdict, Some(Verdict::Generic));
        assert_eq!(domain_verdict(&strata), DomainVerdict::GenericCorners);
    }

    #[test]
    fn square_cross_plane_has_complex_rank_defect() {
        let d = presets::square_cross_plane::<f64>(1.0);
        let strata = classify_all(&d);
        let s = strata.iter().find(|s| s.subset == vec![0, 2]).unwrap();
        assert!(!s.samples.is_empty());
        for z in &s.samples {
            assert!(z[0].norm() < 1e-12);
        }
        assert_eq!(s.verdict, Some(Verdict::NonGenericComplexRank));
        assert!(s.rank_data.iter().all(|r| r.real_rank == 2 && r.complex_rank == 1));
    }
}
