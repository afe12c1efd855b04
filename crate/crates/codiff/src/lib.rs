//! Cross-codifference analysis for bivariate VAR(1) processes driven by
//! Gaussian or sub-Gaussian alpha-stable white noise.
//!
//! The codifference of two jointly stable variables is
//!
//! ```text
//! CD(Y1, Y2) = log E e^{i(Y1 - Y2)} - log E e^{i Y1} - log E e^{-i Y2}
//! ```
//!
//! which reduces to the covariance in the Gaussian case and stays finite for
//! alpha-stable models, where second moments do not exist. This crate covers
//! the full workflow for the two-dimensional autoregression
//! `X(t) = Theta X(t-1) + Z(t)`:
//!
//! * [`stable`] - noise models: univariate alpha-stable sampling, correlated
//!   Gaussian pairs, sub-Gaussian vectors, and their characteristic functions;
//! * [`var`] - the VAR(1) model itself: stationarity, simulation, matrix
//!   powers and moving-average weights;
//! * [`theory`] - theoretical cross-codifference series (general form and
//!   closed forms for Gaussian and sub-Gaussian noise);
//! * [`estimator`] - empirical characteristic functions and the empirical
//!   cross-codifference;
//! * [`fit`] - decay-rate fitting for diagonal `Theta`, inverse filtering,
//!   CF-distance noise fitting, and seeded Monte Carlo studies;
//! * [`config`] + [`io`] - declarative experiment configs and CSV artifacts.

pub mod config;
pub mod error;
pub mod estimator;
pub mod fit;
pub mod io;
pub mod rng;
pub mod stable;
pub mod theory;
pub mod var;

pub use error::{Error, Result};
