//! TOML experiment configuration shared by the command-line tools.
//!
//! Only the `[model]` table is mandatory; every other section falls back to
//! defaults, so a minimal file fully describes a model and still drives
//! simulation, theory, fitting, and Monte Carlo runs. Unknown keys are
//! rejected everywhere to catch typos early.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{CfGrid, FitOptions, McStudy, NoiseInit};
use crate::stable::{CovMatrix2, NoiseSpec};
use crate::var::{Theta, ThetaPowers, VarModel};

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub simulate: SimulateConfig,
    #[serde(default)]
    pub theory: TheoryConfig,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub mc: McConfig,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub noise: NoiseConfig,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseConfig {
    Gaussian {
        r11: f64,
        r12: f64,
        r22: f64,
    },
    SubGaussian {
        alpha: f64,
        r11: f64,
        r12: f64,
        r22: f64,
    },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub n: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            n: 10_000,
            burn_in: 1000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct TheoryConfig {
    pub h_max: i64,
    pub j_trunc: usize,
    /// When set, the truncation is chosen adaptively so the first omitted
    /// weight matrix falls below this tolerance, overriding `j_trunc`.
    pub tail_tol: Option<f64>,
}

impl Default for TheoryConfig {
    fn default() -> Self {
        TheoryConfig {
            h_max: 10,
            j_trunc: crate::theory::DEFAULT_J_TRUNC,
            tail_tol: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitConfig {
    pub h_min: i64,
    pub h_max: i64,
    pub assume_equal_diagonal: bool,
    /// Optional explicit start for the noise fit; both `alpha_init` and
    /// `cov_init` (as `[r11, r12, r22]`) must be given together.
    pub alpha_init: Option<f64>,
    pub cov_init: Option<[f64; 3]>,
    pub grid_points: usize,
    pub grid_half_width: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            h_min: 1,
            h_max: 10,
            assume_equal_diagonal: false,
            alpha_init: None,
            cov_init: None,
            grid_points: 5,
            grid_half_width: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct McConfig {
    pub lengths: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            lengths: vec![1000, 10_000, 50_000],
            replications: 200,
            seed: 9001,
        }
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_theta(&self) -> Result<Theta> {
        Theta::new(self.model.a1, self.model.a2, self.model.a3, self.model.a4)
    }

    pub fn to_noise(&self) -> Result<NoiseSpec> {
        match self.model.noise {
            NoiseConfig::Gaussian { r11, r12, r22 } => {
                Ok(NoiseSpec::gaussian(CovMatrix2::new(r11, r12, r22)?))
            }
            NoiseConfig::SubGaussian {
                alpha,
                r11,
                r12,
                r22,
            } => NoiseSpec::sub_gaussian(alpha, CovMatrix2::new(r11, r12, r22)?),
        }
    }

    pub fn to_model(&self) -> Result<VarModel> {
        VarModel::new(self.to_theta()?, self.to_noise()?)
    }

    /// Truncation index for theory evaluations: adaptive when a tail
    /// tolerance is configured, the fixed `j_trunc` otherwise.
    pub fn effective_j_trunc(&self) -> Result<usize> {
        match self.theory.tail_tol {
            None => Ok(self.theory.j_trunc),
            Some(tol) => {
                let theta = self.to_theta()?;
                let powers = ThetaPowers::adaptive(&theta, tol, 100_000)?;
                if powers.capped() {
                    return Err(Error::Config(format!(
                        "tail tolerance {tol} not reached within 100000 weights"
                    )));
                }
                Ok(powers.max_index())
            }
        }
    }

    pub fn to_fit_options(&self) -> Result<FitOptions> {
        let init = match (self.fit.alpha_init, self.fit.cov_init) {
            (None, None) => None,
            (Some(alpha), Some([r11, r12, r22])) => Some(NoiseInit {
                alpha,
                cov: CovMatrix2::new(r11, r12, r22)?,
            }),
            _ => {
                return Err(Error::Config(
                    "alpha_init and cov_init must be given together".into(),
                ))
            }
        };
        Ok(FitOptions {
            h_min: self.fit.h_min,
            h_max: self.fit.h_max,
            assume_equal_diagonal: self.fit.assume_equal_diagonal,
            init,
            grid: CfGrid::lattice(self.fit.grid_points, self.fit.grid_half_width)?,
        })
    }

    pub fn to_mc_study(&self) -> Result<McStudy> {
        Ok(McStudy {
            model: self.to_model()?,
            lengths: self.mc.lengths.clone(),
            replications: self.mc.replications,
            burn_in: self.simulate.burn_in,
            h_fit_min: self.fit.h_min,
            h_fit_max: self.fit.h_max,
            assume_equal_diagonal: self.fit.assume_equal_diagonal,
            seed: self.mc.seed,
            grid: CfGrid::lattice(self.fit.grid_points, self.fit.grid_half_width)?,
        })
    }
}
