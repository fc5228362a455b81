//! Monte Carlo realization of the averaged operators
//!
//! `T_m(h) = E[ h(t_m) ]`, where `t_m` is the first row of `circ(c_1) ... circ(c_m)`
//! and the `c_j` are independent uniform draws from the simplex under the chosen
//! [`Mode`]. Each `T_m` is a positive linear functional with `T_m(1) = 1`; in face mode
//! `T_m(h)` tends to `h(1/n, ..., 1/n)`.

use serde::Serialize;

use crate::circulant::multiply_into;
use crate::closed_forms;
use crate::error::{Error, Result};
use crate::parallel;
use crate::quadrature::GaussLegendre;
use crate::scalar::{to_f64_vec, Real};
use crate::simplex::{fill, Mode, MonteCarlo};
use crate::stats::{chunk_sizes, substream, Moments};

/// `sum_j |t_j - 1/n|`; zero exactly at the barycenter.
pub fn g_distance<T: Real>(t: &[T]) -> T {
    let inv = T::one() / T::from_usize_lossy(t.len().max(1));
    t.iter().map(|&x| (x - inv).abs()).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatorEstimate<T> {
    pub m: usize,
    pub n: usize,
    pub samples: usize,
    pub mean: T,
    pub stderr: T,
    pub mode: Mode,
    pub seed: u64,
}

/// Estimates `T_m(target)` from `mc.samples` independent draws of `(c_1, ..., c_m)`.
///
/// The product row is accumulated by repeated cyclic convolution. Results depend on
/// `(target, n, m, samples, mode, seed)` only, not on `mc.workers`.
pub fn estimate_tm<T, F>(target: F, n: usize, m: usize, mode: Mode, mc: MonteCarlo) -> Result<OperatorEstimate<T>>
where
    T: Real,
    F: Fn(&[T]) -> T + Sync,
{
    if n == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if m == 0 {
        return Err(Error::domain("depth m must be at least 1"));
    }
    if mc.samples == 0 {
        return Err(Error::domain("sample count must be positive"));
    }
    let sizes: Vec<usize> = chunk_sizes(mc.samples).collect();
    let parts = parallel::map_indexed(sizes.len(), mc.workers, |chunk| {
        let mut rng = substream(mc.seed, chunk as u64);
        let mut t = vec![T::zero(); n];
        let mut c = vec![T::zero(); n];
        let mut next = vec![T::zero(); n];
        let mut acc = Moments::new();
        for _ in 0..sizes[chunk] {
            fill(mode, &mut t, &mut rng);
            for _ in 1..m {
                fill(mode, &mut c, &mut rng);
                multiply_into(&t, &c, &mut next);
                std::mem::swap(&mut t, &mut next);
            }
            let v = target(&t);
            if !v.is_finite() {
                return Err(Error::evaluation(to_f64_vec(&t), format!("target returned {v}")));
            }
            acc.push(v);
        }
        Ok(acc)
    });
    let mut total = Moments::new();
    for part in parts {
        total.merge(&part?);
    }
    Ok(OperatorEstimate {
        m,
        n,
        samples: mc.samples,
        mean: total.mean(),
        stderr: total.std_error(),
        mode,
        seed: mc.seed,
    })
}

/// `n * E|c1 - 1/n|` for the flat-Dirichlet marginal density `(n-1)(1-x)^{n-2}`:
/// the per-step factor of the triangle-inequality bound on `T_m(g)` in face mode.
pub fn face_decay_bound<T: Real>(n: usize) -> T {
    if n <= 1 {
        return T::zero();
    }
    let nf = T::from_usize_lossy(n);
    let inv = T::one() / nf;
    let rule = GaussLegendre::<T>::new(n.max(8));
    let density_scale = nf - T::one();
    let e = rule.integrate_split(T::zero(), T::one(), &[inv], |x| {
        (x - inv).abs() * density_scale * (T::one() - x).powi(n as i32 - 2)
    });
    nf * e
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecaySeries<T> {
    pub estimates: Vec<OperatorEstimate<T>>,
    /// `exp(slope)` of least squares on `(m, ln mean)`.
    pub fitted_ratio: Option<T>,
    /// [`face_decay_bound`] in face mode; no bound is claimed in solid mode.
    pub bound: Option<T>,
    /// `rho_n` as a decimal, reported in both modes.
    pub rho: f64,
}

/// Estimates `T_m(target)` for `m = 1..=m_max`, every depth using the same seed.
pub fn decay_experiment<T, F>(target: F, n: usize, m_max: usize, mode: Mode, mc: MonteCarlo) -> Result<DecaySeries<T>>
where
    T: Real,
    F: Fn(&[T]) -> T + Sync,
{
    if m_max < 2 {
        return Err(Error::domain("m_max must be at least 2"));
    }
    let estimates = (1..=m_max)
        .map(|m| estimate_tm(&target, n, m, mode, mc))
        .collect::<Result<Vec<_>>>()?;
    let fitted_ratio = fit_ratio(&estimates);
    let bound = (mode == Mode::Face).then(|| face_decay_bound(n));
    let rho = closed_forms::rho(n)?.decimal;
    Ok(DecaySeries {
        estimates,
        fitted_ratio,
        bound,
        rho,
    })
}

/// Geometric ratio fitted over the points with `mean > 5 * stderr`; `None` when any
/// mean is non-positive or fewer than two points qualify.
pub fn fit_ratio<T: Real>(estimates: &[OperatorEstimate<T>]) -> Option<T> {
    if estimates.iter().any(|e| !(e.mean > T::zero())) {
        return None;
    }
    let five = T::lit(5.0);
    let pts: Vec<(T, T)> = estimates
        .iter()
        .filter(|e| e.mean > five * e.stderr)
        .map(|e| (T::from_usize_lossy(e.m), e.mean.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = T::from_usize_lossy(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / k;
    let my = pts.iter().map(|p| p.1).sum::<T>() / k;
    let sxy: T = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: T = pts.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    Some((sxy / sxx).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConclusionReport<T> {
    pub n: usize,
    pub m_max: usize,
    pub estimate: OperatorEstimate<T>,
    /// `h(1/n, ..., 1/n)`.
    pub limit: T,
    pub deviation: T,
    /// `3 * stderr + slack`.
    pub threshold: T,
    pub converged: bool,
}

/// Compares `T_{m_max}(h)` (face mode) with `h` at the barycenter.
pub fn korovkin_conclusion_check<T, F>(h: F, n: usize, m_max: usize, mc: MonteCarlo, slack: T) -> Result<ConclusionReport<T>>
where
    T: Real,
    F: Fn(&[T]) -> T + Sync,
{
    let bary = vec![T::one() / T::from_usize_lossy(n.max(1)); n];
    let limit = h(&bary);
    if !limit.is_finite() {
        return Err(Error::evaluation(to_f64_vec(&bary), format!("h returned {limit}")));
    }
    let estimate = estimate_tm(&h, n, m_max, Mode::Face, mc)?;
    let deviation = (estimate.mean - limit).abs();
    let threshold = T::lit(3.0) * estimate.stderr + slack;
    Ok(ConclusionReport {
        n,
        m_max,
        limit,
        deviation,
        threshold,
        converged: deviation <= threshold,
        estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mc(samples: usize, seed: u64) -> MonteCarlo {
        MonteCarlo::new(samples, seed)
    }

    #[test]
    fn g_goldens() {
        assert_eq!(g_distance(&[0.25f64; 4]), 0.0);
        assert!((g_distance(&[1.0f64, 0.0]) - 1.0).abs() < 1e-15);
        assert!((g_distance(&[1.0f64, 0.0, 0.0]) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn constant_target_is_exact() {
        for mode in [Mode::Solid, Mode::Face] {
            for (n, m) in [(1, 1), (2, 3), (4, 5)] {
                let e = estimate_tm(|_: &[f64]| 1.0, n, m, mode, mc(5000, 3)).unwrap();
                assert_eq!(e.mean, 1.0);
                assert_eq!(e.stderr, 0.0);
            }
        }
    }

    #[test]
    fn g_at_depth_one_and_four() {
        let e1 = estimate_tm(g_distance::<f64>, 2, 1, Mode::Face, mc(100_000, 42)).unwrap();
        assert!((e1.mean - 0.5).abs() < 3.0 * e1.stderr, "{e1:?}");
        let e4 = estimate_tm(g_distance::<f64>, 2, 4, Mode::Face, mc(100_000, 42)).unwrap();
        assert!((e4.mean - 1.0 / 16.0).abs() < 3.0 * e4.stderr, "{e4:?}");
    }

    #[test]
    fn invalid_arguments() {
        assert!(estimate_tm(g_distance::<f64>, 2, 0, Mode::Face, mc(10, 1)).is_err());
        assert!(estimate_tm(g_distance::<f64>, 0, 1, Mode::Face, mc(10, 1)).is_err());
        assert!(estimate_tm(g_distance::<f64>, 2, 1, Mode::Face, mc(0, 1)).is_err());
        assert!(decay_experiment(g_distance::<f64>, 2, 1, Mode::Face, mc(10, 1)).is_err());
        let err = estimate_tm(|t: &[f64]| 1.0 / (t[0] - t[0]), 2, 1, Mode::Face, mc(10, 1)).unwrap_err();
        assert!(matches!(err, Error::Evaluation { .. }));
    }

    #[test]
    fn face_bound_goldens() {
        assert_eq!(face_decay_bound::<f64>(1), 0.0);
        assert!((face_decay_bound::<f64>(2) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn decay_fit_for_two_dimensions() {
        let s = decay_experiment(g_distance::<f64>, 2, 6, Mode::Face, mc(50_000, 8)).unwrap();
        assert_eq!(s.estimates.len(), 6);
        assert!((s.fitted_ratio.unwrap() - 0.5).abs() < 0.05);
        assert_eq!(s.bound, Some(0.5));
        assert!((s.rho - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fit_of_exact_geometric_sequence() {
        let est: Vec<_> = (1..=5)
            .map(|m| OperatorEstimate {
                m,
                n: 2,
                samples: 1,
                mean: 0.3f64.powi(m as i32) * 2.0,
                stderr: 0.0,
                mode: Mode::Face,
                seed: 0,
            })
            .collect();
        assert!((fit_ratio(&est).unwrap() - 0.3).abs() < 1e-12);
        let mut bad = est.clone();
        bad[2].mean = 0.0;
        assert!(fit_ratio(&bad).is_none());
    }

    #[test]
    fn conclusion_goldens() {
        let r = korovkin_conclusion_check(|_: &[f64]| 7.0, 3, 4, mc(2000, 1), 0.0).unwrap();
        assert_eq!(r.estimate.mean, 7.0);
        assert!(r.converged);
        let r = korovkin_conclusion_check(g_distance::<f64>, 2, 10, mc(100_000, 5), 1e-2).unwrap();
        assert_eq!(r.limit, 0.0);
        assert!(r.converged, "{r:?}");
        let r = korovkin_conclusion_check(|t: &[f64]| t[0], 2, 6, mc(100_000, 6), 0.0).unwrap();
        assert!(r.converged, "{r:?}");
    }
}
