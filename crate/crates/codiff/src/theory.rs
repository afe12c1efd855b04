//! Theoretical cross-codifference series of the stationary VAR(1) model.
//!
//! For `CD(h) = CD(X1(t), X2(t+h))` the moving-average representation turns
//! the codifference into a sum over the weight matrices: with
//! `P_j = Theta^j` carrying the X1 weights in its first row and the X2
//! weights in its second,
//!
//! ```text
//! CD(h) = sum_j [ logcf(p11 - q21, p12 - q22) - logcf(p11, p12) - logcf(-q21, -q22) ]
//! ```
//!
//! where for `h >= 0` the pair is `(P, Q) = (Theta^j, Theta^{j+h})` and for
//! `h < 0` it is `(Theta^{j+|h|}, Theta^j)`, the free index `j` running from
//! zero. Only the noise log characteristic function enters, so one evaluator
//! covers every noise model; the Gaussian and sub-Gaussian closed forms below
//! are independent routes to the same numbers and are cross-checked in the
//! tests. In the Gaussian case the codifference equals the cross-covariance.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stable::{CovMatrix2, NoiseSpec};
use crate::var::{check_stationarity, theta_power, Mat2, Theta};

/// Default truncation of the weight sums: the free index runs `0..=50`.
pub const DEFAULT_J_TRUNC: usize = 50;

fn ensure_stationary(theta: &Theta) -> Result<()> {
    let c = check_stationarity(theta);
    if !c.stationary {
        return Err(Error::NonStationary {
            rho: c.spectral_radius,
        });
    }
    Ok(())
}

/// Calls `f(P, Q)` for each term of the lag-`h` series truncated at
/// `j_trunc` (inclusive free index).
fn for_each_weight_pair(theta: &Theta, h: i64, j_trunc: usize, mut f: impl FnMut(&Mat2, &Mat2)) {
    let m = theta.mat();
    let mut low = Mat2::IDENTITY;
    let mut high = theta_power(theta, h.unsigned_abs() as usize);
    for _ in 0..=j_trunc {
        if h >= 0 {
            f(&low, &high);
        } else {
            f(&high, &low);
        }
        low = low.mul(&m);
        high = high.mul(&m);
    }
}

/// Cross-codifference at signed lag `h` for any noise model, using only the
/// noise log characteristic function.
pub fn codiff_general(theta: &Theta, noise: &NoiseSpec, h: i64, j_trunc: usize) -> Result<f64> {
    codiff_general_with(theta, |t1, t2| noise.log_cf(t1, t2), h, j_trunc)
}

/// [`codiff_general`] over an arbitrary noise log characteristic function
/// `log E e^{i(t1 Z1 + t2 Z2)}`.
pub fn codiff_general_with<F>(theta: &Theta, log_cf: F, h: i64, j_trunc: usize) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    ensure_stationary(theta)?;
    let mut sum = 0.0;
    for_each_weight_pair(theta, h, j_trunc, |p, q| {
        sum += log_cf(p.m11 - q.m21, p.m12 - q.m22)
            - log_cf(p.m11, p.m12)
            - log_cf(-q.m21, -q.m22);
    });
    Ok(sum)
}

fn gaussian_term(cov: &CovMatrix2, p: &Mat2, q: &Mat2) -> f64 {
    cov.r11() * p.m11 * q.m21
        + cov.r22() * p.m12 * q.m22
        + cov.r12() * (p.m11 * q.m22 + p.m12 * q.m21)
}

fn sub_gaussian_term(alpha: f64, cov: &CovMatrix2, p: &Mat2, q: &Mat2) -> f64 {
    let e = 0.5 * alpha;
    (0.5 * cov.quad_form(p.m11, p.m12)).powf(e)
        + (0.5 * cov.quad_form(q.m21, q.m22)).powf(e)
        - (0.5 * cov.quad_form(p.m11 - q.m21, p.m12 - q.m22)).powf(e)
}

/// Gaussian closed form: the series of bilinear weight products
/// `R11 a1_j a3_{j+h} + R22 a2_j a4_{j+h} + R12 (a1_j a4_{j+h} + a2_j a3_{j+h})`
/// (indices swapped for `h < 0`), which equals the cross-covariance.
pub fn codiff_gaussian(theta: &Theta, cov: &CovMatrix2, h: i64, j_trunc: usize) -> Result<f64> {
    ensure_stationary(theta)?;
    let mut sum = 0.0;
    for_each_weight_pair(theta, h, j_trunc, |p, q| sum += gaussian_term(cov, p, q));
    Ok(sum)
}

/// Per-term view of [`codiff_gaussian`], used by the degeneration checks.
pub fn codiff_gaussian_terms(
    theta: &Theta,
    cov: &CovMatrix2,
    h: i64,
    j_trunc: usize,
) -> Result<Vec<f64>> {
    ensure_stationary(theta)?;
    let mut terms = Vec::with_capacity(j_trunc + 1);
    for_each_weight_pair(theta, h, j_trunc, |p, q| terms.push(gaussian_term(cov, p, q)));
    Ok(terms)
}

/// Sub-Gaussian closed form: each term is
/// `(1/2)^{alpha/2} (|q(x1 row)|^{alpha/2} + |q(x2 row)|^{alpha/2} - |q(difference)|^{alpha/2})`
/// in the covariance quadratic form `q`.
///
/// `alpha` may be 2, where the series degenerates termwise to the Gaussian
/// one; the sampling path does not accept that boundary, this evaluator does.
pub fn codiff_subgaussian(
    theta: &Theta,
    alpha: f64,
    cov: &CovMatrix2,
    h: i64,
    j_trunc: usize,
) -> Result<f64> {
    validate_alpha(alpha)?;
    ensure_stationary(theta)?;
    let mut sum = 0.0;
    for_each_weight_pair(theta, h, j_trunc, |p, q| {
        sum += sub_gaussian_term(alpha, cov, p, q)
    });
    Ok(sum)
}

/// Per-term view of [`codiff_subgaussian`].
pub fn codiff_subgaussian_terms(
    theta: &Theta,
    alpha: f64,
    cov: &CovMatrix2,
    h: i64,
    j_trunc: usize,
) -> Result<Vec<f64>> {
    validate_alpha(alpha)?;
    ensure_stationary(theta)?;
    let mut terms = Vec::with_capacity(j_trunc + 1);
    for_each_weight_pair(theta, h, j_trunc, |p, q| {
        terms.push(sub_gaussian_term(alpha, cov, p, q))
    });
    Ok(terms)
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::invalid(format!(
            "codifference closed forms require alpha in (1, 2], got {alpha}"
        )));
    }
    Ok(())
}

/// Diagonal-coefficient models whose codifference series collapses to a
/// closed expression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormModel {
    /// Diagonal `Theta`, Gaussian noise with independent components:
    /// the cross-codifference vanishes identically.
    GaussIndep { a1: f64, a4: f64, cov: CovMatrix2 },
    /// Diagonal `Theta`, general Gaussian covariance:
    /// `CD(h) = R12 a4^h / (1 - a1 a4)` forward, with `a1` in place of `a4`
    /// backward.
    GaussDiag { a1: f64, a4: f64, cov: CovMatrix2 },
    /// Diagonal `Theta`, sub-Gaussian noise: two geometric sums plus a
    /// residual series evaluated to a tolerance.
    SubGaussDiag {
        alpha: f64,
        a1: f64,
        a4: f64,
        cov: CovMatrix2,
    },
}

/// Evaluates the closed-form codifference of `model` at signed lag `h`.
///
/// `tail_tol` bounds the dropped tail of the residual sum in the
/// sub-Gaussian case; the Gaussian forms are exact and ignore it.
pub fn codiff_example_closed_form(model: &ClosedFormModel, h: i64, tail_tol: f64) -> Result<f64> {
    if !(tail_tol > 0.0 && tail_tol.is_finite()) {
        return Err(Error::invalid(format!(
            "tail tolerance must be positive and finite, got {tail_tol}"
        )));
    }
    match *model {
        ClosedFormModel::GaussIndep { a1, a4, cov } => {
            validate_diag_rates(a1, a4)?;
            if cov.r12() != 0.0 {
                return Err(Error::invalid(
                    "independent-component form requires r12 = 0",
                ));
            }
            Ok(0.0)
        }
        ClosedFormModel::GaussDiag { a1, a4, cov } => {
            validate_diag_rates(a1, a4)?;
            let denom = 1.0 - a1 * a4;
            if h >= 0 {
                Ok(cov.r12() * a4.powi(h as i32) / denom)
            } else {
                Ok(cov.r12() * a1.powi((-h) as i32) / denom)
            }
        }
        ClosedFormModel::SubGaussDiag { alpha, a1, a4, cov } => {
            validate_alpha(alpha)?;
            validate_diag_rates(a1, a4)?;
            let e = 0.5 * alpha;
            let c = 0.5f64.powf(e);
            let geom1 = 1.0 - a1.abs().powf(alpha);
            let geom4 = 1.0 - a4.abs().powf(alpha);
            if h >= 0 {
                let t1 = cov.r11().powf(e) / geom1;
                let t2 = cov.r22().powf(e) * a4.abs().powf(alpha * h as f64) / geom4;
                let t3 = diag_residual_sum(alpha, &cov, a1, a4, 1.0, a4.powi(h as i32), tail_tol);
                Ok(c * (t1 + t2 - t3))
            } else {
                let hh = (-h) as i32;
                let t1 = cov.r11().powf(e) * a1.abs().powf(alpha * f64::from(hh)) / geom1;
                let t2 = cov.r22().powf(e) / geom4;
                let t3 = diag_residual_sum(alpha, &cov, a1, a4, a1.powi(hh), 1.0, tail_tol);
                Ok(c * (t1 + t2 - t3))
            }
        }
    }
}

fn validate_diag_rates(a1: f64, a4: f64) -> Result<()> {
    if !(a1.abs() < 1.0 && a4.abs() < 1.0) {
        return Err(Error::invalid(format!(
            "closed forms require |a1| < 1 and |a4| < 1, got ({a1}, {a4})"
        )));
    }
    Ok(())
}

/// `sum_j |p1^2 R11 - 2 p1 p4 R12 + p4^2 R22|^{alpha/2}` where the trackers
/// start at the given values and are multiplied by `a1`, `a4` each step.
/// Stops once a geometric envelope bounds the remaining tail below
/// `tail_tol`.
fn diag_residual_sum(
    alpha: f64,
    cov: &CovMatrix2,
    a1: f64,
    a4: f64,
    p1_init: f64,
    p4_init: f64,
    tail_tol: f64,
) -> f64 {
    let e = 0.5 * alpha;
    let ratio = a1.abs().max(a4.abs()).powf(alpha);
    let mut p1 = p1_init;
    let mut p4 = p4_init;
    let mut sum = 0.0;
    loop {
        let inner = p1 * p1 * cov.r11() - 2.0 * p1 * p4 * cov.r12() + p4 * p4 * cov.r22();
        sum += inner.abs().powf(e);
        // Envelope dominates every later term by powers of `ratio`.
        let env = (p1 * p1 * cov.r11() + 2.0 * (p1 * p4 * cov.r12()).abs() + p4 * p4 * cov.r22())
            .powf(e);
        if env * ratio / (1.0 - ratio) < tail_tol {
            return sum;
        }
        p1 *= a1;
        p4 *= a4;
    }
}

/// Geometric decay rates of the codifference tails for a diagonal model with
/// positive rates: `a4` as `h -> +inf`, `a1` as `h -> -inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticRates {
    pub rate_pos: f64,
    pub rate_neg: f64,
}

pub fn codiff_asymptotic_rate(theta: &Theta, alpha: f64) -> Result<AsymptoticRates> {
    if !theta.is_diagonal() {
        return Err(Error::invalid(
            "asymptotic rates are defined for diagonal coefficients only",
        ));
    }
    if !(theta.a1 > 0.0 && theta.a1 < 1.0 && theta.a4 > 0.0 && theta.a4 < 1.0) {
        return Err(Error::invalid(format!(
            "asymptotic rates require diagonal entries in (0, 1), got ({}, {})",
            theta.a1, theta.a4
        )));
    }
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::invalid(format!(
            "asymptotic rates require alpha in (1, 2], got {alpha}"
        )));
    }
    Ok(AsymptoticRates {
        rate_pos: theta.a4,
        rate_neg: theta.a1,
    })
}

/// Codifference values on the signed lag range `h_min ..= h_min + len - 1`,
/// which always contains lag zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodiffSeries {
    h_min: i64,
    values: Vec<f64>,
}

impl CodiffSeries {
    pub fn new(h_min: i64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("codifference series must be nonempty"));
        }
        let h_max = h_min + values.len() as i64 - 1;
        if h_min > 0 || h_max < 0 {
            return Err(Error::invalid(format!(
                "lag range {h_min}..={h_max} must contain zero"
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("codifference values must be finite"));
        }
        Ok(CodiffSeries { h_min, values })
    }

    /// Builds the series by evaluating `f` on each lag of `-h_max ..= h_max`.
    pub fn from_fn(h_max: i64, mut f: impl FnMut(i64) -> Result<f64>) -> Result<Self> {
        if h_max < 0 {
            return Err(Error::invalid(format!("h_max must be >= 0, got {h_max}")));
        }
        let mut values = Vec::with_capacity(2 * h_max as usize + 1);
        for h in -h_max..=h_max {
            values.push(f(h)?);
        }
        CodiffSeries::new(-h_max, values)
    }

    pub fn h_min(&self) -> i64 {
        self.h_min
    }

    pub fn h_max(&self) -> i64 {
        self.h_min + self.values.len() as i64 - 1
    }

    pub fn value(&self, h: i64) -> Option<f64> {
        if h < self.h_min {
            return None;
        }
        self.values.get((h - self.h_min) as usize).copied()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.h_min + i as i64, v))
    }
}

/// Theoretical series over `|h| <= h_max` for the model's noise kind.
pub fn theory_series(
    theta: &Theta,
    noise: &NoiseSpec,
    h_max: i64,
    j_trunc: usize,
) -> Result<CodiffSeries> {
    CodiffSeries::from_fn(h_max, |h| match noise {
        NoiseSpec::Gaussian { cov } => codiff_gaussian(theta, cov, h, j_trunc),
        NoiseSpec::SubGaussian { alpha, cov } => {
            codiff_subgaussian(theta, *alpha, cov, h, j_trunc)
        }
    })
}
