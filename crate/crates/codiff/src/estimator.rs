//! Empirical cross-codifference from a bivariate sample path.
//!
//! The estimator replaces the characteristic function with its empirical
//! counterpart at the three points (1, -1), (1, 0), (0, -1) and combines the
//! principal logarithms:
//!
//! ```text
//! CD_hat(k) = ln phi_hat(1, -1; k) - ln phi_hat(1, 0; k) - ln phi_hat(0, -1; k)
//! ```
//!
//! The true codifference is real; the imaginary part of the estimate is kept
//! as a finite-sample diagnostic.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::theory::CodiffSeries;
use crate::var::BiTrajectory;

/// Empirical characteristic function values below this modulus make the
/// logarithm numerically meaningless and are reported as failures.
pub const MODULUS_FLOOR: f64 = 1e-3;

/// One empirical characteristic function evaluation
/// `phi_hat(u, v; k) = mean of exp(i (u x1_t + v x2_{t+k}))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcfPoint {
    pub u: f64,
    pub v: f64,
    pub k: i64,
    pub re: f64,
    pub im: f64,
}

impl EcfPoint {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Empirical characteristic function of the pair `(x1_t, x2_{t+k})` averaged
/// over the `n - |k|` complete pairs in the sample.
pub fn empirical_cf(traj: &BiTrajectory, u: f64, v: f64, k: i64) -> Result<EcfPoint> {
    if !(u.is_finite() && v.is_finite()) {
        return Err(Error::invalid(format!(
            "characteristic function arguments must be finite, got ({u}, {v})"
        )));
    }
    let n = traj.len();
    let m = k.unsigned_abs() as usize;
    if m > n - 2 {
        return Err(Error::LagOutOfRange { k, n });
    }
    let x1 = traj.x1();
    let x2 = traj.x2();
    let count = n - m;
    let mut re = 0.0;
    let mut im = 0.0;
    for t in 0..count {
        // k >= 0 pairs x1_t with x2_{t+k}; k < 0 pairs x1_{t+|k|} with x2_t.
        let (a, b) = if k >= 0 {
            (x1[t], x2[t + m])
        } else {
            (x1[t + m], x2[t])
        };
        let (s, c) = (u * a + v * b).sin_cos();
        re += c;
        im += s;
    }
    // True division: one correctly rounded operation, so a sum of `count`
    // equal terms averages back to that term exactly.
    let count = count as f64;
    Ok(EcfPoint {
        u,
        v,
        k,
        re: re / count,
        im: im / count,
    })
}

/// Empirical codifference at one lag. `value` is the real part; `imag` is
/// the residual imaginary part, zero in the infinite-sample limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodiffEstimate {
    pub value: f64,
    pub imag: f64,
}

pub fn empirical_codiff(traj: &BiTrajectory, k: i64) -> Result<CodiffEstimate> {
    let joint = empirical_cf(traj, 1.0, -1.0, k)?;
    let first = empirical_cf(traj, 1.0, 0.0, k)?;
    let second = empirical_cf(traj, 0.0, -1.0, k)?;
    let mut log_sum = Complex64::new(0.0, 0.0);
    for (point, sign) in [(&joint, 1.0), (&first, -1.0), (&second, -1.0)] {
        let modulus = point.modulus();
        if modulus < MODULUS_FLOOR {
            return Err(Error::DegenerateCf {
                u: point.u,
                v: point.v,
                k,
                modulus,
                floor: MODULUS_FLOOR,
            });
        }
        log_sum += point.as_complex().ln() * sign;
    }
    Ok(CodiffEstimate {
        value: log_sum.re,
        imag: log_sum.im,
    })
}

/// Empirical codifference over all lags `|k| <= h_max`.
pub fn empirical_codiff_series(traj: &BiTrajectory, h_max: i64) -> Result<CodiffSeries> {
    CodiffSeries::from_fn(h_max, |k| Ok(empirical_codiff(traj, k)?.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::stable::{CovMatrix2, NoiseSpec};
    use crate::var::{simulate, Theta, VarModel};

    fn tiny() -> BiTrajectory {
        BiTrajectory::new(vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]).unwrap()
    }

    #[test]
    fn hand_checked_three_point_sample() {
        let traj = tiny();
        // k = 1 pairs (1,5), (2,6); phi(1,-1) = (e^{-4i} + e^{-4i})/2.
        let p = empirical_cf(&traj, 1.0, -1.0, 1).unwrap();
        assert!((p.re - (-4.0f64).cos()).abs() < 1e-15);
        assert!((p.im - (-4.0f64).sin()).abs() < 1e-15);
        // k = -1 pairs (2,4), (3,5); both phases are -2.
        let q = empirical_cf(&traj, 1.0, -1.0, -1).unwrap();
        assert!((q.re - (-2.0f64).cos()).abs() < 1e-15);
        assert!((q.im - (-2.0f64).sin()).abs() < 1e-15);
        // k = 0 averages e^{-3i}, e^{-3i}, e^{-3i}.
        let r = empirical_cf(&traj, 1.0, -1.0, 0).unwrap();
        assert!((r.re - (-3.0f64).cos()).abs() < 1e-15);
    }

    #[test]
    fn codiff_estimate_on_the_tiny_sample() {
        // All three pairs at k = 1 have identical phases, so each ECF is a
        // unit-modulus point and the estimate is exactly computable:
        // ln e^{-4i} - ln e^{1.5i+...}; freeze via direct complex arithmetic.
        let traj = tiny();
        let joint = empirical_cf(&traj, 1.0, -1.0, 1).unwrap().as_complex();
        let first = empirical_cf(&traj, 1.0, 0.0, 1).unwrap().as_complex();
        let second = empirical_cf(&traj, 0.0, -1.0, 1).unwrap().as_complex();
        let expected = joint.ln() - first.ln() - second.ln();
        let est = empirical_codiff(&traj, 1).unwrap();
        assert!((est.value - expected.re).abs() < 1e-15);
        assert!((est.imag - expected.im).abs() < 1e-15);
    }

    #[test]
    fn lag_bounds_are_enforced() {
        let traj = tiny();
        assert!(empirical_cf(&traj, 1.0, -1.0, 1).is_ok());
        assert!(matches!(
            empirical_cf(&traj, 1.0, -1.0, 2),
            Err(Error::LagOutOfRange { k: 2, n: 3 })
        ));
        assert!(matches!(
            empirical_cf(&traj, 1.0, -1.0, -2),
            Err(Error::LagOutOfRange { k: -2, n: 3 })
        ));
        assert!(empirical_cf(&traj, f64::NAN, 0.0, 0).is_err());
    }

    #[test]
    fn ecf_modulus_never_exceeds_one() {
        let model = VarModel::new(
            Theta::new(0.6, 0.2, 0.1, 0.9).unwrap(),
            NoiseSpec::gaussian(CovMatrix2::new(0.3, 0.2, 0.3).unwrap()),
        )
        .unwrap();
        let mut r = rng::master(41);
        let traj = simulate(&model, 500, 100, &mut r).unwrap();
        for k in [-5, -1, 0, 1, 5] {
            for (u, v) in [(1.0, -1.0), (1.0, 0.0), (0.0, -1.0), (0.7, 0.4)] {
                let p = empirical_cf(&traj, u, v, k).unwrap();
                assert!(p.modulus() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn lag_zero_is_invariant_under_pair_permutation() {
        let model = VarModel::new(
            Theta::new(0.6, 0.2, 0.1, 0.9).unwrap(),
            NoiseSpec::gaussian(CovMatrix2::new(0.3, 0.2, 0.3).unwrap()),
        )
        .unwrap();
        let mut r = rng::master(42);
        let traj = simulate(&model, 400, 100, &mut r).unwrap();
        let base = empirical_codiff(&traj, 0).unwrap();

        // Reverse both components in time: the same multiset of pairs.
        let x1: Vec<f64> = traj.x1().iter().rev().copied().collect();
        let x2: Vec<f64> = traj.x2().iter().rev().copied().collect();
        let reversed = BiTrajectory::new(x1, x2).unwrap();
        let rev = empirical_codiff(&reversed, 0).unwrap();
        assert!((base.value - rev.value).abs() < 1e-9);
        assert!((base.imag - rev.imag).abs() < 1e-9);
    }

    #[test]
    fn series_matches_elementwise_estimates() {
        let model = VarModel::new(
            Theta::new(0.6, 0.2, 0.1, 0.9).unwrap(),
            NoiseSpec::gaussian(CovMatrix2::new(0.3, 0.2, 0.3).unwrap()),
        )
        .unwrap();
        let mut r = rng::master(43);
        let traj = simulate(&model, 300, 100, &mut r).unwrap();
        let series = empirical_codiff_series(&traj, 4).unwrap();
        for k in -4..=4 {
            assert_eq!(
                series.value(k).unwrap(),
                empirical_codiff(&traj, k).unwrap().value
            );
        }
    }

    #[test]
    fn degenerate_cf_is_reported_with_its_point() {
        // x1 alternates 0, pi so exp(i x1) alternates 1, -1 and the marginal
        // ECF at (1, 0) averages to zero on an even count.
        let n = 64;
        let x1: Vec<f64> = (0..n)
            .map(|t| if t % 2 == 0 { 0.0 } else { std::f64::consts::PI })
            .collect();
        let x2 = vec![0.0; n];
        let traj = BiTrajectory::new(x1, x2).unwrap();
        match empirical_codiff(&traj, 0) {
            Err(Error::DegenerateCf { u, v, modulus, .. }) => {
                assert_eq!((u, v), (1.0, -1.0));
                assert!(modulus < MODULUS_FLOOR);
            }
            other => panic!("expected degenerate CF error, got {other:?}"),
        }
    }

    #[test]
    fn gaussian_estimates_track_the_cross_covariance() {
        // For Gaussian noise the codifference equals the cross-covariance,
        // so an independent moment estimator provides the oracle; block
        // resampling calibrates the comparison tolerance.
        let theta = Theta::new(0.6, 0.2, 0.1, 0.9).unwrap();
        let cov = CovMatrix2::new(0.3, 0.2, 0.3).unwrap();
        let model = VarModel::new(theta, NoiseSpec::gaussian(cov)).unwrap();
        let mut r = rng::master(44);
        let n = 60_000;
        let traj = simulate(&model, n, 1000, &mut r).unwrap();
        let x1 = traj.x1();
        let x2 = traj.x2();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (m1, m2) = (mean(x1), mean(x2));
        for k in [-3i64, 0, 2] {
            let est = empirical_codiff(&traj, k).unwrap();
            let m = k.unsigned_abs() as usize;
            let count = n - m;
            let pair = |t: usize| if k >= 0 { (x1[t], x2[t + m]) } else { (x1[t + m], x2[t]) };
            let xcov = (0..count)
                .map(|t| {
                    let (a, b) = pair(t);
                    (a - m1) * (b - m2)
                })
                .sum::<f64>()
                / count as f64;

            // Spread of 20 block means bounds the sampling error of both
            // estimators up to a small numerical floor.
            let blocks = 20;
            let bl = count / blocks;
            let block_means: Vec<f64> = (0..blocks)
                .map(|b| {
                    (b * bl..(b + 1) * bl)
                        .map(|t| {
                            let (a, bb) = pair(t);
                            (a - m1) * (bb - m2)
                        })
                        .sum::<f64>()
                        / bl as f64
                })
                .collect();
            let bm = mean(&block_means);
            let sd = (block_means.iter().map(|v| (v - bm).powi(2)).sum::<f64>()
                / (blocks - 1) as f64)
                .sqrt();
            let tol = 2.0 * sd / (blocks as f64).sqrt() + 1e-3;
            assert!(
                (est.value - xcov).abs() < tol.max(0.02),
                "k={k}: codiff {} vs xcov {xcov}, tol {tol}",
                est.value
            );
            assert!(est.imag.abs() < 0.05, "k={k}: imag {}", est.imag);
        }
    }
}
