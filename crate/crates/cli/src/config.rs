//! Config file layout. Every block is optional and every field has a
//! default, so `{}` is a valid config.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use symbreak_core::measurement::{InitialState, MIN_POINTS_PER_FRINGE};
use symbreak_core::ModeModel;

use crate::error::CliError;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub fringe: Option<FringeConfig>,
    pub detect: Option<DetectConfig>,
    pub scaling: Option<ScalingConfig>,
    pub bcs: Option<BcsConfig>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Orbital model as written in a config: a ring given by `(k, L)` or by a
/// winding count, or released Gaussians given by `(ω, d)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Ring {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        wavenumber: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        windings: Option<u32>,
        length: f64,
    },
    Gaussian {
        trap_frequency: f64,
        separation: f64,
    },
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self::Ring { wavenumber: None, windings: Some(3), length: 10.0 }
    }
}

impl ModelConfig {
    pub fn build(&self) -> Result<ModeModel, CliError> {
        let model = match *self {
            Self::Ring { wavenumber: Some(k), windings: None, length } => ModeModel::ring(k, length),
            Self::Ring { wavenumber: None, windings: Some(w), length } => ModeModel::ring_with_windings(w, length),
            Self::Ring { .. } => {
                return Err(CliError::Config("ring model needs exactly one of `wavenumber`, `windings`".into()))
            }
            Self::Gaussian { trap_frequency, separation } => ModeModel::gaussian(trap_frequency, separation),
        };
        model.map_err(CliError::invalid)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FringeConfig {
    pub model: ModelConfig,
    /// Atoms per condensate.
    pub n: usize,
    pub t: f64,
    pub thetas: Vec<f64>,
    pub points: usize,
}

impl Default for FringeConfig {
    fn default() -> Self {
        Self { model: ModelConfig::default(), n: 100, t: 0.0, thetas: vec![0.0], points: 1024 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectConfig {
    pub model: ModelConfig,
    pub n: usize,
    pub detections: usize,
    pub t: f64,
    pub runs: usize,
    pub initial: InitialState,
    pub points_per_fringe: usize,
    pub phase_bins: usize,
    pub position_bins: usize,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            n: 500,
            detections: 1000,
            t: 0.0,
            runs: 200,
            initial: InitialState::Number,
            points_per_fringe: MIN_POINTS_PER_FRINGE,
            phase_bins: 36,
            position_bins: 32,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingConfig {
    pub model: ModelConfig,
    /// Atoms per condensate for the density scans.
    pub n_values: Vec<usize>,
    pub position: f64,
    pub t: f64,
    pub cell_volume: f64,
    pub theta: f64,
    /// Mode counts for the product-state families.
    pub theorem_n_values: Vec<usize>,
    /// Pair modes per side for the junction current family.
    pub pair_modes: Vec<usize>,
    pub pair_coupling: f64,
    pub pair_range: usize,
    pub pair_theta_a: f64,
    pub pair_theta_b: f64,
    pub gap: f64,
    pub half_bandwidth: f64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            n_values: vec![100, 1000, 10000],
            position: 1.1,
            t: 0.0,
            cell_volume: 0.01,
            theta: 0.3,
            theorem_n_values: vec![10, 100, 1000, 10000],
            pair_modes: vec![64, 256, 1024, 4096],
            pair_coupling: 1.0,
            pair_range: 2,
            pair_theta_a: FRAC_PI_2,
            pair_theta_b: 0.0,
            gap: 1.0,
            half_bandwidth: 20.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridPoint {
    pub modes: usize,
    pub half_bandwidth: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BcsConfig {
    pub gap: f64,
    pub tunneling_sq: f64,
    pub decay_modes: usize,
    pub decay_half_bandwidth: f64,
    pub replicas: Vec<usize>,
    pub dthetas: Vec<f64>,
    /// Lead discretizations of the critical-current convergence table,
    /// coarsest first.
    pub convergence: Vec<GridPoint>,
    pub current_points: usize,
    pub projection_grid: usize,
    pub measured_theta: f64,
}

impl Default for BcsConfig {
    fn default() -> Self {
        Self {
            gap: 1.0,
            tunneling_sq: 1e-4,
            decay_modes: 200,
            decay_half_bandwidth: 20.0,
            replicas: vec![1, 2, 4, 8, 16],
            dthetas: vec![0.25, 0.5, 1.0, PI],
            convergence: vec![
                GridPoint { modes: 2000, half_bandwidth: 50.0 },
                GridPoint { modes: 4000, half_bandwidth: 100.0 },
                GridPoint { modes: 10000, half_bandwidth: 500.0 },
                GridPoint { modes: 20000, half_bandwidth: 1000.0 },
            ],
            current_points: 73,
            projection_grid: 36,
            measured_theta: PI / 3.0,
        }
    }
}
