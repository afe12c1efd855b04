//! Bidimensional VAR(1) model `X(t) = Theta X(t-1) + Z(t)`.
//!
//! For a stationary coefficient matrix (spectral radius below one) the
//! process has the moving-average representation `X(t) = sum_j Theta^j Z(t-j)`
//! whose weights decay geometrically; everything downstream (theoretical
//! codifference series, simulation, inverse filtering) is built from the
//! entries of the powers `Theta^j`.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stable::{NoiseSpec, PreparedNoise};

/// Spectral radii closer to one than this margin are rejected as
/// non-stationary; the truncated series used everywhere would be
/// meaningless that close to the unit circle.
pub const STATIONARITY_MARGIN: f64 = 1e-9;

/// Default number of warm-up steps discarded before recording a trajectory.
pub const DEFAULT_BURN_IN: usize = 1000;

/// Plain 2x2 matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mat2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 {
        m11: 1.0,
        m12: 0.0,
        m21: 0.0,
        m22: 1.0,
    };

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            m11: self.m11 * o.m11 + self.m12 * o.m21,
            m12: self.m11 * o.m12 + self.m12 * o.m22,
            m21: self.m21 * o.m11 + self.m22 * o.m21,
            m22: self.m21 * o.m12 + self.m22 * o.m22,
        }
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.m11
            .abs()
            .max(self.m12.abs())
            .max(self.m21.abs())
            .max(self.m22.abs())
    }
}

/// Autoregression coefficients `[[a1, a2], [a3, a4]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theta {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl Theta {
    pub fn new(a1: f64, a2: f64, a3: f64, a4: f64) -> Result<Self> {
        if ![a1, a2, a3, a4].iter().all(|a| a.is_finite()) {
            return Err(Error::invalid("autoregression entries must be finite"));
        }
        Ok(Theta { a1, a2, a3, a4 })
    }

    pub fn diagonal(a1: f64, a4: f64) -> Result<Self> {
        Theta::new(a1, 0.0, 0.0, a4)
    }

    pub fn mat(&self) -> Mat2 {
        Mat2 {
            m11: self.a1,
            m12: self.a2,
            m21: self.a3,
            m22: self.a4,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.a2 == 0.0 && self.a3 == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationarityCheck {
    pub stationary: bool,
    pub spectral_radius: f64,
}

/// Spectral radius of the 2x2 coefficient matrix from the closed-form
/// eigenvalues: real pair `(tr +- sqrt(disc)) / 2` when the discriminant is
/// nonnegative, modulus `sqrt(det)` for the complex pair otherwise.
pub fn check_stationarity(theta: &Theta) -> StationarityCheck {
    let tr = theta.a1 + theta.a4;
    let det = theta.a1 * theta.a4 - theta.a2 * theta.a3;
    let disc = tr * tr - 4.0 * det;
    let rho = if disc >= 0.0 {
        let s = disc.sqrt();
        (0.5 * (tr + s)).abs().max((0.5 * (tr - s)).abs())
    } else {
        det.sqrt()
    };
    StationarityCheck {
        stationary: rho < 1.0 - STATIONARITY_MARGIN,
        spectral_radius: rho,
    }
}

/// `Theta^j` by repeated multiplication; `j = 0` gives the identity.
pub fn theta_power(theta: &Theta, j: usize) -> Mat2 {
    let m = theta.mat();
    let mut p = Mat2::IDENTITY;
    for _ in 0..j {
        p = p.mul(&m);
    }
    p
}

/// Consecutive powers `Theta^0 = I, Theta^1, ..., Theta^{J-1}`, the
/// moving-average weights of the process.
///
/// In adaptive mode the count `J` is the first power index whose largest
/// entry falls below the tail tolerance: that power is the first one
/// *omitted*, so the dropped tail is bounded by the tolerance times a
/// geometric factor.
#[derive(Debug, Clone)]
pub struct ThetaPowers {
    powers: Vec<Mat2>,
    capped: bool,
}

impl ThetaPowers {
    /// Stores powers until `max_abs(Theta^j) < tail_tol`, capping the count
    /// at `j_max_cap`. `capped()` reports whether the cap cut the sequence
    /// short of the tolerance.
    pub fn adaptive(theta: &Theta, tail_tol: f64, j_max_cap: usize) -> Result<Self> {
        if !(tail_tol > 0.0 && tail_tol.is_finite()) {
            return Err(Error::invalid(format!(
                "tail tolerance must be positive and finite, got {tail_tol}"
            )));
        }
        if j_max_cap == 0 {
            return Err(Error::invalid("power cap must be at least 1"));
        }
        let m = theta.mat();
        let mut powers = vec![Mat2::IDENTITY];
        let mut next = m;
        loop {
            if next.max_abs() < tail_tol {
                return Ok(ThetaPowers {
                    powers,
                    capped: false,
                });
            }
            if powers.len() >= j_max_cap {
                return Ok(ThetaPowers {
                    powers,
                    capped: true,
                });
            }
            powers.push(next);
            next = next.mul(&m);
        }
    }

    /// Stores all powers `Theta^0 ..= Theta^max_index` unconditionally.
    pub fn fixed(theta: &Theta, max_index: usize) -> Self {
        let m = theta.mat();
        let mut powers = Vec::with_capacity(max_index + 1);
        let mut p = Mat2::IDENTITY;
        for _ in 0..=max_index {
            powers.push(p);
            p = p.mul(&m);
        }
        ThetaPowers {
            powers,
            capped: false,
        }
    }

    /// Number of stored powers.
    pub fn order(&self) -> usize {
        self.powers.len()
    }

    /// Highest stored power index.
    pub fn max_index(&self) -> usize {
        self.powers.len() - 1
    }

    pub fn power(&self, j: usize) -> Option<&Mat2> {
        self.powers.get(j)
    }

    pub fn powers(&self) -> &[Mat2] {
        &self.powers
    }

    /// True when the adaptive construction hit its cap before reaching the
    /// tail tolerance; the stored weights then underrepresent the tail.
    pub fn capped(&self) -> bool {
        self.capped
    }
}

/// Validated model: stationary coefficients plus a noise specification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarModel {
    theta: Theta,
    noise: NoiseSpec,
}

impl VarModel {
    pub fn new(theta: Theta, noise: NoiseSpec) -> Result<Self> {
        let check = check_stationarity(&theta);
        if !check.stationary {
            return Err(Error::NonStationary {
                rho: check.spectral_radius,
            });
        }
        Ok(VarModel { theta, noise })
    }

    pub fn theta(&self) -> &Theta {
        &self.theta
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.noise
    }
}

/// Observed bivariate series, both components the same length `N >= 2`,
/// all values finite.
#[derive(Debug, Clone, PartialEq)]
pub struct BiTrajectory {
    x1: Vec<f64>,
    x2: Vec<f64>,
}

impl BiTrajectory {
    pub fn new(x1: Vec<f64>, x2: Vec<f64>) -> Result<Self> {
        if x1.len() != x2.len() {
            return Err(Error::invalid(format!(
                "component lengths differ: {} vs {}",
                x1.len(),
                x2.len()
            )));
        }
        if x1.len() < 2 {
            return Err(Error::invalid(format!(
                "trajectory needs at least 2 observations, got {}",
                x1.len()
            )));
        }
        if !(x1.iter().all(|v| v.is_finite()) && x2.iter().all(|v| v.is_finite())) {
            return Err(Error::invalid("trajectory values must be finite"));
        }
        Ok(BiTrajectory { x1, x2 })
    }

    pub fn len(&self) -> usize {
        self.x1.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least two observations
    }

    pub fn x1(&self) -> &[f64] {
        &self.x1
    }

    pub fn x2(&self) -> &[f64] {
        &self.x2
    }
}

/// Simulates `n` observations after discarding `burn_in` warm-up steps from
/// a zero initial state.
pub fn simulate<R: Rng + ?Sized>(
    model: &VarModel,
    n: usize,
    burn_in: usize,
    rng: &mut R,
) -> Result<BiTrajectory> {
    simulate_with_innovations(model, n, burn_in, rng).map(|(traj, _)| traj)
}

/// Like [`simulate`] but also returns the innovations, aligned so that the
/// t-th noise vector is the one entering the t-th recorded observation.
/// Useful for verifying inverse filtering.
pub fn simulate_with_innovations<R: Rng + ?Sized>(
    model: &VarModel,
    n: usize,
    burn_in: usize,
    rng: &mut R,
) -> Result<(BiTrajectory, BiTrajectory)> {
    if n < 2 {
        return Err(Error::invalid(format!(
            "trajectory length must be at least 2, got {n}"
        )));
    }
    let th = model.theta();
    let noise = PreparedNoise::new(model.noise())?;
    let (mut x1, mut x2) = (0.0f64, 0.0f64);
    for _ in 0..burn_in {
        let (z1, z2) = noise.draw(rng);
        let y1 = th.a1 * x1 + th.a2 * x2 + z1;
        let y2 = th.a3 * x1 + th.a4 * x2 + z2;
        x1 = y1;
        x2 = y2;
    }
    let mut out1 = Vec::with_capacity(n);
    let mut out2 = Vec::with_capacity(n);
    let mut inn1 = Vec::with_capacity(n);
    let mut inn2 = Vec::with_capacity(n);
    for _ in 0..n {
        let (z1, z2) = noise.draw(rng);
        let y1 = th.a1 * x1 + th.a2 * x2 + z1;
        let y2 = th.a3 * x1 + th.a4 * x2 + z2;
        x1 = y1;
        x2 = y2;
        out1.push(x1);
        out2.push(x2);
        inn1.push(z1);
        inn2.push(z2);
    }
    Ok((
        BiTrajectory::new(out1, out2)?,
        BiTrajectory::new(inn1, inn2)?,
    ))
}
