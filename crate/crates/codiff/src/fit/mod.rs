//! Parameter estimation from an observed trajectory.
//!
//! The pipeline mirrors how the codifference series constrains a diagonal
//! model: the forward tail of `|CD(h)|` decays like `a4^h` and the backward
//! tail like `a1^|h|`, so a profiled least-squares fit of `c * a^h` on each
//! side recovers the diagonal coefficients. Inverse filtering with the
//! fitted coefficients then exposes the innovations, whose stability index
//! and covariance are estimated by a characteristic-function distance.

mod mc;
mod nm;
mod noise_cf;

pub use mc::{run_mc_study, McStudy, McSummary};
pub use noise_cf::{default_noise_init, fit_noise_cf, CfGrid, NoiseFit, NoiseInit};

use crate::error::{Error, Result};
use crate::estimator::empirical_codiff_series;
use crate::theory::CodiffSeries;
use crate::var::{BiTrajectory, Theta};

/// Decay rates are searched inside this open interval; the endpoints stand
/// for degenerate (immediately flat) and near-unit-root behavior.
pub const RATE_LO: f64 = 0.01;
pub const RATE_HI: f64 = 0.99;

const PRESCAN_POINTS: usize = 20;
const RATE_TOL: f64 = 1e-6;

/// Which tail of the codifference series a decay fit reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LagSide {
    /// Lags `h_min ..= h_max`.
    Positive,
    /// Lags `-h_max ..= -h_min`, read as `|CD(-h)|` at distance `h`.
    Negative,
}

/// Least-squares fit of `|CD| ~ amplitude * rate^h` on one lag side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub amplitude: f64,
    pub sse: f64,
    pub h_min: i64,
    pub h_max: i64,
}

/// Joint fit of both sides under a shared rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PooledDecayFit {
    pub rate: f64,
    pub amplitude_pos: f64,
    pub amplitude_neg: f64,
    pub sse: f64,
    pub h_min: i64,
    pub h_max: i64,
}

fn side_values(
    series: &CodiffSeries,
    side: LagSide,
    h_min: i64,
    h_max: i64,
) -> Result<Vec<f64>> {
    if h_min < 1 {
        return Err(Error::invalid(format!(
            "decay fits read lags at distance 1 or more, got h_min = {h_min}"
        )));
    }
    if h_max - h_min + 1 < 2 {
        return Err(Error::UnderdeterminedFit { h_min, h_max });
    }
    let mut values = Vec::with_capacity((h_max - h_min + 1) as usize);
    for h in h_min..=h_max {
        let lag = match side {
            LagSide::Positive => h,
            LagSide::Negative => -h,
        };
        let v = series.value(lag).ok_or_else(|| {
            Error::invalid(format!(
                "series covers {}..={} but the fit needs lag {lag}",
                series.h_min(),
                series.h_max()
            ))
        })?;
        values.push(v);
    }
    // The amplitude is unconstrained in sign, so the values are fitted as
    // they are, but a window of exact zeros pins down no rate at all.
    if values.iter().all(|&v| v == 0.0) {
        return Err(Error::UnderdeterminedFit { h_min, h_max });
    }
    Ok(values)
}

/// Amplitude minimizing the sum of squares for a fixed rate: with
/// `g_h = rate^h`, the optimum is `sum(g v) / sum(g^2)`.
pub fn profile_amplitude(rate: f64, h_min: i64, values: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &v) in values.iter().enumerate() {
        let g = rate.powi(h_min as i32 + i as i32);
        num += g * v;
        den += g * g;
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

fn profiled_sse(rate: f64, h_min: i64, values: &[f64]) -> (f64, f64) {
    let c = profile_amplitude(rate, h_min, values);
    let sse = values
        .iter()
        .enumerate()
        .map(|(i, &v)| (v - c * rate.powi(h_min as i32 + i as i32)).powi(2))
        .sum();
    (c, sse)
}

/// Coarse scan over the rate interval followed by golden-section refinement
/// between the scan minimizer's neighbors.
fn minimize_rate(f: impl Fn(f64) -> f64) -> f64 {
    let step = (RATE_HI - RATE_LO) / (PRESCAN_POINTS - 1) as f64;
    let at = |i: usize| RATE_LO + step * i as f64;
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..PRESCAN_POINTS {
        let v = f(at(i));
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let lo = at(best_i.saturating_sub(1));
    let hi = at((best_i + 1).min(PRESCAN_POINTS - 1));
    golden_min(f, lo, hi)
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > RATE_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Fits `amplitude * rate^h` to the absolute codifference on one lag side
/// over distances `h_min ..= h_max`.
pub fn fit_decay(
    series: &CodiffSeries,
    side: LagSide,
    h_min: i64,
    h_max: i64,
) -> Result<DecayFit> {
    let values = side_values(series, side, h_min, h_max)?;
    let rate = minimize_rate(|a| profiled_sse(a, h_min, &values).1);
    let (amplitude, sse) = profiled_sse(rate, h_min, &values);
    Ok(DecayFit {
        rate,
        amplitude,
        sse,
        h_min,
        h_max,
    })
}

/// Fits both sides with one shared rate and per-side amplitudes, minimizing
/// the summed SSE.
pub fn fit_decay_pooled(series: &CodiffSeries, h_min: i64, h_max: i64) -> Result<PooledDecayFit> {
    let pos = side_values(series, LagSide::Positive, h_min, h_max)?;
    let neg = side_values(series, LagSide::Negative, h_min, h_max)?;
    let rate = minimize_rate(|a| profiled_sse(a, h_min, &pos).1 + profiled_sse(a, h_min, &neg).1);
    let (amplitude_pos, sse_pos) = profiled_sse(rate, h_min, &pos);
    let (amplitude_neg, sse_neg) = profiled_sse(rate, h_min, &neg);
    Ok(PooledDecayFit {
        rate,
        amplitude_pos,
        amplitude_neg,
        sse: sse_pos + sse_neg,
        h_min,
        h_max,
    })
}

/// Diagonal coefficients read off the two tails: the forward tail decays at
/// `a4`, the backward tail at `a1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaDiagonalFit {
    pub a1_hat: f64,
    pub a4_hat: f64,
    pub positive: DecayFit,
    pub negative: DecayFit,
}

pub fn fit_theta_diagonal_from_series(
    series: &CodiffSeries,
    h_min: i64,
    h_max: i64,
) -> Result<ThetaDiagonalFit> {
    let positive = fit_decay(series, LagSide::Positive, h_min, h_max)?;
    let negative = fit_decay(series, LagSide::Negative, h_min, h_max)?;
    Ok(ThetaDiagonalFit {
        a1_hat: negative.rate,
        a4_hat: positive.rate,
        positive,
        negative,
    })
}

pub fn fit_theta_diagonal(traj: &BiTrajectory, h_min: i64, h_max: i64) -> Result<ThetaDiagonalFit> {
    let series = empirical_codiff_series(traj, h_max)?;
    fit_theta_diagonal_from_series(&series, h_min, h_max)
}

/// Inverse filter `z(t) = x(t) - Theta x(t-1)`, one observation shorter than
/// the input (and therefore needing at least three observations).
pub fn extract_noise(traj: &BiTrajectory, theta: &Theta) -> Result<BiTrajectory> {
    let x1 = traj.x1();
    let x2 = traj.x2();
    let n = traj.len();
    let mut z1 = Vec::with_capacity(n - 1);
    let mut z2 = Vec::with_capacity(n - 1);
    for t in 1..n {
        z1.push(x1[t] - theta.a1 * x1[t - 1] - theta.a2 * x2[t - 1]);
        z2.push(x2[t] - theta.a3 * x1[t - 1] - theta.a4 * x2[t - 1]);
    }
    BiTrajectory::new(z1, z2)
}

/// Options for [`fit_pipeline`].
#[derive(Debug, Clone)]
pub struct FitOptions {
    pub h_min: i64,
    pub h_max: i64,
    pub assume_equal_diagonal: bool,
    /// Starting point for the noise fit; a moment-based default otherwise.
    pub init: Option<NoiseInit>,
    pub grid: CfGrid,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            h_min: 1,
            h_max: 10,
            assume_equal_diagonal: false,
            init: None,
            grid: CfGrid::unit_square_default(),
        }
    }
}

/// Full estimation result: diagonal coefficients from the codifference
/// tails, then the noise parameters from the inverse-filtered innovations.
#[derive(Debug, Clone)]
pub struct PipelineFit {
    pub a1_hat: f64,
    pub a4_hat: f64,
    /// Whether the two rates were constrained to be equal.
    pub pooled: bool,
    pub amplitude_pos: f64,
    pub amplitude_neg: f64,
    pub decay_sse: f64,
    pub noise: NoiseFit,
}

pub fn fit_pipeline(traj: &BiTrajectory, opts: &FitOptions) -> Result<PipelineFit> {
    let series =
        empirical_codiff_series(traj, opts.h_max).map_err(|e| e.in_stage("empirical-series"))?;
    let (a1_hat, a4_hat, amplitude_pos, amplitude_neg, decay_sse) =
        if opts.assume_equal_diagonal {
            let p = fit_decay_pooled(&series, opts.h_min, opts.h_max)
                .map_err(|e| e.in_stage("decay-fit"))?;
            (p.rate, p.rate, p.amplitude_pos, p.amplitude_neg, p.sse)
        } else {
            let t = fit_theta_diagonal_from_series(&series, opts.h_min, opts.h_max)
                .map_err(|e| e.in_stage("decay-fit"))?;
            (
                t.a1_hat,
                t.a4_hat,
                t.positive.amplitude,
                t.negative.amplitude,
                t.positive.sse + t.negative.sse,
            )
        };
    let theta = Theta::diagonal(a1_hat, a4_hat).map_err(|e| e.in_stage("decay-fit"))?;
    let innovations = extract_noise(traj, &theta).map_err(|e| e.in_stage("noise-extraction"))?;
    let init = match opts.init {
        Some(i) => i,
        None => default_noise_init(&innovations).map_err(|e| e.in_stage("noise-cf-fit"))?,
    };
    let noise = fit_noise_cf(&innovations, &init, &opts.grid)
        .map_err(|e| e.in_stage("noise-cf-fit"))?;
    Ok(PipelineFit {
        a1_hat,
        a4_hat,
        pooled: opts.assume_equal_diagonal,
        amplitude_pos,
        amplitude_neg,
        decay_sse,
        noise,
    })
}
