//! Alpha-stable noise models and their characteristic functions.
//!
//! Univariate draws use the Chambers-Mallows-Stuck transform for the
//! parameterization in which the characteristic function of
//! `S_alpha(sigma, beta, mu)` is, for `alpha != 1`,
//!
//! ```text
//! E e^{i theta X} = exp{ -sigma^alpha |theta|^alpha (1 - i beta sign(theta) tan(pi alpha / 2)) + i mu theta }
//! ```
//!
//! and, for `alpha == 1`,
//!
//! ```text
//! E e^{i theta X} = exp{ -sigma |theta| (1 + i beta sign(theta) (2/pi) log|theta|) + i mu theta }
//! ```
//!
//! The bivariate noise is either a correlated Gaussian pair with covariance
//! `R`, characteristic function `exp{-1/2 (t1^2 R11 + 2 t1 t2 R12 + t2^2 R22)}`,
//! or a sub-Gaussian vector `(A^{1/2} G1, A^{1/2} G2)` where `A` is a totally
//! skewed positive `alpha/2`-stable subordinator with scale
//! `cos(pi alpha / 4)^{2/alpha}`, independent of the Gaussian pair. That scale
//! makes the Laplace transform of `A` equal to `exp{-lambda^{alpha/2}}`, so the
//! vector's characteristic function is
//!
//! ```text
//! E e^{i(t1 Z1 + t2 Z2)} = exp{ -(1/2)^{alpha/2} |t1^2 R11 + 2 t1 t2 R12 + t2^2 R22|^{alpha/2} }
//! ```
//!
//! which degenerates to the Gaussian form at `alpha = 2`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Exp1, Open01, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};

/// Parameters of a univariate alpha-stable law `S_alpha(sigma, beta, mu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StableParams {
    alpha: f64,
    sigma: f64,
    beta: f64,
    mu: f64,
}

impl StableParams {
    /// Validates `0 < alpha <= 2`, `sigma > 0`, `-1 <= beta <= 1`, `mu` finite.
    pub fn new(alpha: f64, sigma: f64, beta: f64, mu: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::invalid(format!(
                "stability index alpha must lie in (0, 2], got {alpha}"
            )));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!(
                "scale sigma must be positive and finite, got {sigma}"
            )));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return Err(Error::invalid(format!(
                "skewness beta must lie in [-1, 1], got {beta}"
            )));
        }
        if !mu.is_finite() {
            return Err(Error::invalid(format!("shift mu must be finite, got {mu}")));
        }
        Ok(StableParams {
            alpha,
            sigma,
            beta,
            mu,
        })
    }

    /// Symmetric law `S_alpha(sigma, 0, 0)`.
    pub fn symmetric(alpha: f64, sigma: f64) -> Result<Self> {
        StableParams::new(alpha, sigma, 0.0, 0.0)
    }

    /// The positive `alpha/2`-stable subordinator used by the sub-Gaussian
    /// construction: `S_{alpha/2}(cos(pi alpha / 4)^{2/alpha}, 1, 0)`.
    ///
    /// Requires `alpha < 2` so the subordinator index `alpha/2` is below 1,
    /// which together with `beta = 1` and `mu = 0` makes every draw positive.
    pub fn subordinator(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::invalid(format!(
                "subordinator requires alpha in (0, 2), got {alpha}"
            )));
        }
        let scale = (FRAC_PI_2 * alpha / 2.0).cos().powf(2.0 / alpha);
        StableParams::new(alpha / 2.0, scale, 1.0, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Log characteristic function `log E e^{i theta X}` at a real argument.
    pub fn log_cf(&self, theta: f64) -> Complex64 {
        if theta == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let sign = theta.signum();
        let at = theta.abs();
        if self.alpha == 1.0 {
            let re = -self.sigma * at;
            let im = -self.sigma * at * self.beta * sign * (2.0 / PI) * at.ln() + self.mu * theta;
            Complex64::new(re, im)
        } else {
            let sa = self.sigma.powf(self.alpha) * at.powf(self.alpha);
            let re = -sa;
            let im = sa * self.beta * sign * (FRAC_PI_2 * self.alpha).tan() + self.mu * theta;
            Complex64::new(re, im)
        }
    }
}

/// One draw from `S_alpha(sigma, beta, mu)` via the Chambers-Mallows-Stuck
/// transform.
///
/// `U` is uniform on `(-pi/2, pi/2)`, `W` standard exponential, both from
/// `rng`. The `alpha == 1` branch is taken only on an exact match; values
/// near 1 go through the general formula, which is continuous in alpha away
/// from the branch point.
pub fn sample_stable<R: Rng + ?Sized>(params: &StableParams, rng: &mut R) -> f64 {
    let StableParams {
        alpha,
        sigma,
        beta,
        mu,
    } = *params;
    let u01: f64 = rng.sample(Open01);
    let u = (u01 - 0.5) * PI;
    let w: f64 = rng.sample(Exp1);

    if alpha == 1.0 {
        let xi = FRAC_PI_2 + beta * u;
        let x = (2.0 / PI) * (xi * u.tan() - beta * ((FRAC_PI_2 * w * u.cos()) / xi).ln());
        sigma * x + (2.0 / PI) * beta * sigma * sigma.ln() + mu
    } else {
        let tpa = (FRAC_PI_2 * alpha).tan();
        let b = (beta * tpa).atan() / alpha;
        let s = (1.0 + beta * beta * tpa * tpa).powf(1.0 / (2.0 * alpha));
        let aub = alpha * (u + b);
        let x = s * aub.sin() / u.cos().powf(1.0 / alpha)
            * ((u - aub).cos() / w).powf((1.0 - alpha) / alpha);
        sigma * x + mu
    }
}

/// Covariance matrix `[[r11, r12], [r12, r22]]` of the underlying Gaussian
/// pair. Construction enforces positive semi-definiteness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovMatrix2 {
    r11: f64,
    r12: f64,
    r22: f64,
}

/// Relative determinant threshold below which the matrix is treated as
/// rank one when factorizing.
const DEGENERATE_DET_REL: f64 = 1e-12;

impl CovMatrix2 {
    pub fn new(r11: f64, r12: f64, r22: f64) -> Result<Self> {
        if !(r11.is_finite() && r12.is_finite() && r22.is_finite()) {
            return Err(Error::invalid("covariance entries must be finite"));
        }
        if r11 < 0.0 || r22 < 0.0 {
            return Err(Error::invalid(format!(
                "diagonal covariance entries must be nonnegative, got ({r11}, {r22})"
            )));
        }
        if r12 * r12 > r11 * r22 {
            return Err(Error::invalid(format!(
                "covariance is not positive semi-definite: r12^2 = {} > r11 r22 = {}",
                r12 * r12,
                r11 * r22
            )));
        }
        Ok(CovMatrix2 { r11, r12, r22 })
    }

    pub fn diagonal(r11: f64, r22: f64) -> Result<Self> {
        CovMatrix2::new(r11, 0.0, r22)
    }

    pub fn r11(&self) -> f64 {
        self.r11
    }

    pub fn r12(&self) -> f64 {
        self.r12
    }

    pub fn r22(&self) -> f64 {
        self.r22
    }

    pub fn det(&self) -> f64 {
        self.r11 * self.r22 - self.r12 * self.r12
    }

    /// Quadratic form `u^2 r11 + 2 u v r12 + v^2 r22`, clamped at zero.
    ///
    /// The form is nonnegative for a PSD matrix; the clamp only removes
    /// negative rounding residue near the null direction of a singular
    /// matrix, where downstream code raises it to a fractional power.
    pub fn quad_form(&self, u: f64, v: f64) -> f64 {
        (u * u * self.r11 + 2.0 * u * v * self.r12 + v * v * self.r22).max(0.0)
    }

    /// Lower-triangular square root `[l11, l21, l22]` with an explicit
    /// rank-one branch when the determinant is negligible, so that exact
    /// linear dependence survives in the samples instead of dissolving into
    /// rounding noise.
    pub(crate) fn sqrt_factor(&self) -> [f64; 3] {
        if self.det() <= DEGENERATE_DET_REL * self.r11 * self.r22 {
            if self.r11 > 0.0 {
                let l11 = self.r11.sqrt();
                [l11, self.r12 / l11, 0.0]
            } else {
                [0.0, 0.0, self.r22.sqrt()]
            }
        } else {
            let l11 = self.r11.sqrt();
            let l21 = self.r12 / l11;
            let l22 = (self.r22 - l21 * l21).max(0.0).sqrt();
            [l11, l21, l22]
        }
    }
}

/// Noise model of the autoregression: Gaussian or sub-Gaussian alpha-stable,
/// both white in time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum NoiseSpec {
    Gaussian { cov: CovMatrix2 },
    SubGaussian { alpha: f64, cov: CovMatrix2 },
}

impl NoiseSpec {
    pub fn gaussian(cov: CovMatrix2) -> Self {
        NoiseSpec::Gaussian { cov }
    }

    /// Sub-Gaussian noise with `alpha` strictly inside `(1, 2)`; the boundary
    /// `alpha = 2` is represented by the Gaussian variant.
    pub fn sub_gaussian(alpha: f64, cov: CovMatrix2) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::invalid(format!(
                "sub-Gaussian noise requires alpha in (1, 2), got {alpha}"
            )));
        }
        Ok(NoiseSpec::SubGaussian { alpha, cov })
    }

    pub fn cov(&self) -> &CovMatrix2 {
        match self {
            NoiseSpec::Gaussian { cov } => cov,
            NoiseSpec::SubGaussian { cov, .. } => cov,
        }
    }

    /// Log characteristic function of one noise vector at `(t1, t2)`.
    /// Always real and nonpositive, zero at the origin.
    pub fn log_cf(&self, t1: f64, t2: f64) -> f64 {
        match self {
            NoiseSpec::Gaussian { cov } => gaussian_log_cf(cov, t1, t2),
            NoiseSpec::SubGaussian { alpha, cov } => sub_gaussian_log_cf(*alpha, cov, t1, t2),
        }
    }

    /// One noise vector.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(f64, f64)> {
        Ok(PreparedNoise::new(self)?.draw(rng))
    }
}

/// `log E e^{i(t1 G1 + t2 G2)} = -1/2 q(t1, t2)` for the Gaussian pair.
pub fn gaussian_log_cf(cov: &CovMatrix2, t1: f64, t2: f64) -> f64 {
    -0.5 * cov.quad_form(t1, t2)
}

/// `log E e^{i(t1 Z1 + t2 Z2)} = -(q(t1, t2) / 2)^{alpha/2}` for the
/// sub-Gaussian vector.
///
/// Defined as a formal expression for any `alpha` in `(0, 2]`; at
/// `alpha = 2` it coincides with [`gaussian_log_cf`].
pub fn sub_gaussian_log_cf(alpha: f64, cov: &CovMatrix2, t1: f64, t2: f64) -> f64 {
    -(0.5 * cov.quad_form(t1, t2)).powf(0.5 * alpha)
}

/// Correlated Gaussian pair with covariance `cov`.
pub fn sample_gaussian_pair<R: Rng + ?Sized>(cov: &CovMatrix2, rng: &mut R) -> (f64, f64) {
    pair_from_factor(&cov.sqrt_factor(), rng)
}

/// Sub-Gaussian pair `(A^{1/2} G1, A^{1/2} G2)`: one subordinator draw `A`
/// multiplies one fresh Gaussian pair, so repeated calls produce white noise.
pub fn sample_subgaussian_pair<R: Rng + ?Sized>(
    alpha: f64,
    cov: &CovMatrix2,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::invalid(format!(
            "sub-Gaussian sampling requires alpha in (1, 2), got {alpha}"
        )));
    }
    let sub = StableParams::subordinator(alpha)?;
    let s = sample_stable(&sub, rng).sqrt();
    let (g1, g2) = sample_gaussian_pair(cov, rng);
    Ok((s * g1, s * g2))
}

pub(crate) fn pair_from_factor<R: Rng + ?Sized>(l: &[f64; 3], rng: &mut R) -> (f64, f64) {
    let n1: f64 = rng.sample(StandardNormal);
    let n2: f64 = rng.sample(StandardNormal);
    (l[0] * n1, l[1] * n1 + l[2] * n2)
}

/// Noise sampler with the covariance factorization and subordinator
/// parameters resolved once, for use in simulation loops.
#[derive(Debug, Clone)]
pub(crate) enum PreparedNoise {
    Gaussian { factor: [f64; 3] },
    SubGaussian { sub: StableParams, factor: [f64; 3] },
}

impl PreparedNoise {
    pub(crate) fn new(spec: &NoiseSpec) -> Result<Self> {
        match spec {
            NoiseSpec::Gaussian { cov } => Ok(PreparedNoise::Gaussian {
                factor: cov.sqrt_factor(),
            }),
            NoiseSpec::SubGaussian { alpha, cov } => Ok(PreparedNoise::SubGaussian {
                sub: StableParams::subordinator(*alpha)?,
                factor: cov.sqrt_factor(),
            }),
        }
    }

    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        match self {
            PreparedNoise::Gaussian { factor } => pair_from_factor(factor, rng),
            PreparedNoise::SubGaussian { sub, factor } => {
                let s = sample_stable(sub, rng).sqrt();
                let (g1, g2) = pair_from_factor(factor, rng);
                (s * g1, s * g2)
            }
        }
    }
}
