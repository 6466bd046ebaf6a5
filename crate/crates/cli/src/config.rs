//! Run configuration: a flat JSON document merged under command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use qbm_core::{BathModel, BathSpec, SuperpositionSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const DEFAULT_MAX_GRID: usize = 10_000_000;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    #[value(alias = "ohmic-free")]
    #[serde(alias = "ohmic-free")]
    Ohmic,
    #[value(alias = "single-relaxation-free")]
    #[serde(alias = "single-relaxation-free")]
    Srt,
    #[value(alias = "ohmic-oscillator")]
    #[serde(alias = "ohmic-oscillator")]
    Oscillator,
}

impl From<ModelName> for BathModel {
    fn from(m: ModelName) -> Self {
        match m {
            ModelName::Ohmic => BathModel::OhmicFree,
            ModelName::Srt => BathModel::SingleRelaxationFree,
            ModelName::Oscillator => BathModel::OhmicOscillator,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every key is optional; the same names are accepted as `--flags`.
#[derive(Debug, Clone, Default, Deserialize, Args)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    /// Bath model.
    #[arg(long, global = true, value_enum)]
    pub model: Option<ModelName>,
    /// Friction constant zeta (mass/time). Exclusive with --gamma.
    #[arg(long, global = true)]
    pub zeta: Option<f64>,
    /// Relaxation rate gamma = zeta/m (1/time). Exclusive with --zeta.
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Memory time of the single relaxation time model.
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Temperature kT (energy).
    #[arg(long, global = true)]
    pub temp: Option<f64>,
    #[arg(long, global = true)]
    pub mass: Option<f64>,
    /// Oscillator frequency.
    #[arg(long, global = true)]
    pub omega0: Option<f64>,
    /// Drude cutoff of the fluctuation spectrum; required for Ohmic <xdot^2>.
    #[arg(long, global = true)]
    pub cutoff: Option<f64>,
    #[arg(long, global = true)]
    pub hbar: Option<f64>,
    /// Packet width sigma.
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    /// Packet separation d.
    #[arg(long, global = true)]
    pub dist: Option<f64>,
    /// Last sample time.
    #[arg(long, global = true)]
    pub tmax: Option<f64>,
    /// Number of sample times, including t = 0.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub spacing: Option<Spacing>,
    /// Points per grid axis.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Evaluation time for grid dumps.
    #[arg(long, global = true)]
    pub time: Option<f64>,
    /// Fix two phase-space coordinates, e.g. `p1=0,p2=0`.
    #[arg(long, global = true)]
    pub slice: Option<String>,
    /// Refuse grids with more points than this.
    #[arg(long, global = true)]
    pub max_grid: Option<usize>,
    /// Choose sigma so that the crossing time equals this value.
    #[arg(long, global = true)]
    pub calibrate: Option<f64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($field:ident),*) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError(format!("config {}: {e}", path.display())))
    }

    /// Flags in `self` win over keys in `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        overlay!(
            base, self, model, zeta, gamma, tau, temp, mass, omega0, cutoff, hbar, sigma, dist, tmax, samples,
            spacing, grid, time, slice, max_grid, calibrate, out, format
        )
    }

    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        let model = self.model.unwrap_or(ModelName::Ohmic);
        let mass = self.mass.unwrap_or(1.0);
        let zeta = match (self.zeta, self.gamma) {
            (Some(_), Some(_)) => return Err(ConfigError("give zeta or gamma, not both".into())),
            (Some(z), None) => z,
            (None, Some(g)) => g * mass,
            (None, None) => mass,
        };
        let tau = match (model, self.tau) {
            (ModelName::Srt, None) => return Err(ConfigError("model srt needs tau".into())),
            (ModelName::Srt, Some(t)) => t,
            (_, Some(_)) => return Err(ConfigError("tau applies only to model srt".into())),
            (_, None) => 0.0,
        };
        let omega0 = match (model, self.omega0) {
            (ModelName::Oscillator, None) => return Err(ConfigError("model oscillator needs omega0".into())),
            (ModelName::Oscillator, Some(w)) => w,
            (_, Some(_)) => return Err(ConfigError("omega0 applies only to model oscillator".into())),
            (_, None) => 0.0,
        };
        let bath = BathSpec {
            model: model.into(),
            zeta,
            tau,
            kt: self.temp.unwrap_or(0.0),
            mass,
            omega0,
            cutoff: self.cutoff,
            hbar: self.hbar.unwrap_or(1.0),
        };
        bath.validate().map_err(|e| ConfigError(e.to_string()))?;
        let state = SuperpositionSpec::new(self.sigma.unwrap_or(1.0), self.dist.unwrap_or(2.0), mass, bath.hbar)
            .map_err(|e| ConfigError(e.to_string()))?;
        let tmax = self.tmax.unwrap_or(20.0);
        if !(tmax.is_finite() && tmax > 0.0) {
            return Err(ConfigError(format!("tmax must be positive, got {tmax}")));
        }
        let samples = self.samples.unwrap_or(101);
        if samples < 2 {
            return Err(ConfigError(format!("samples must be at least 2, got {samples}")));
        }
        let time = self.time.unwrap_or(1.0);
        if !(time.is_finite() && time >= 0.0) {
            return Err(ConfigError(format!("time must be non-negative, got {time}")));
        }
        if let Some(target) = self.calibrate {
            if !(target.is_finite() && target > 0.0 && target < tmax) {
                return Err(ConfigError(format!("calibrate target must lie in (0, tmax), got {target}")));
            }
        }
        Ok(Resolved {
            bath,
            state,
            tmax,
            samples,
            spacing: self.spacing.unwrap_or(Spacing::Linear),
            grid: self.grid.unwrap_or(32),
            time,
            slice: self.slice.clone(),
            max_grid: self.max_grid.unwrap_or(DEFAULT_MAX_GRID),
            calibrate: self.calibrate,
        })
    }
}

/// A validated configuration with defaults filled in.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub bath: BathSpec,
    pub state: SuperpositionSpec,
    pub tmax: f64,
    pub samples: usize,
    pub spacing: Spacing,
    pub grid: usize,
    pub time: f64,
    pub slice: Option<String>,
    pub max_grid: usize,
    pub calibrate: Option<f64>,
}

impl Resolved {
    /// SHA-256 of the canonical JSON of every setting that affects the numbers.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("plain data serializes");
        Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// `t = 0` first, then `samples - 1` further times ending at `tmax`.
    pub fn times(&self) -> Vec<f64> {
        let n = self.samples;
        match self.spacing {
            Spacing::Linear => (0..n).map(|i| self.tmax * i as f64 / (n - 1) as f64).collect(),
            Spacing::Log => {
                if n == 2 {
                    return vec![0.0, self.tmax];
                }
                qbm_core::entanglement::sample_times(self.tmax, n)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_keys() {
        let file: RunConfig = serde_json::from_str(r#"{"sigma": 2.0, "dist": 3.0, "model": "srt", "tau": 0.5}"#).unwrap();
        let flags = RunConfig {
            sigma: Some(0.7),
            ..Default::default()
        };
        let merged = flags.over(file).resolve().unwrap();
        assert_eq!(merged.state.sigma, 0.7);
        assert_eq!(merged.state.d, 3.0);
        assert_eq!(merged.bath.model, BathModel::SingleRelaxationFree);
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let err = serde_json::from_str::<RunConfig>("{\n  \"sigma\": 1,\n  \"sigmaa\": 2\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("sigmaa") && msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn gamma_scales_with_mass() {
        let cfg = RunConfig {
            gamma: Some(2.0),
            mass: Some(3.0),
            ..Default::default()
        };
        assert_eq!(cfg.resolve().unwrap().bath.zeta, 6.0);
        let both = RunConfig {
            gamma: Some(2.0),
            zeta: Some(1.0),
            ..Default::default()
        };
        assert!(both.resolve().is_err());
    }

    #[test]
    fn model_parameters_are_checked() {
        let srt = RunConfig {
            model: Some(ModelName::Srt),
            ..Default::default()
        };
        assert!(srt.resolve().is_err());
        let stray = RunConfig {
            omega0: Some(1.0),
            ..Default::default()
        };
        assert!(stray.resolve().is_err());
    }

    #[test]
    fn hash_tracks_physics_only() {
        let a = RunConfig::default().resolve().unwrap();
        let b = RunConfig {
            out: Some("x.csv".into()),
            format: Some(Format::Json),
            ..Default::default()
        }
        .resolve()
        .unwrap();
        let c = RunConfig {
            sigma: Some(1.5),
            ..Default::default()
        }
        .resolve()
        .unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn time_grids_start_at_zero_and_end_at_tmax() {
        for spacing in [Spacing::Linear, Spacing::Log] {
            let r = RunConfig {
                spacing: Some(spacing),
                samples: Some(17),
                tmax: Some(50.0),
                ..Default::default()
            }
            .resolve()
            .unwrap();
            let t = r.times();
            assert_eq!(t.len(), 17);
            assert_eq!(t[0], 0.0);
            assert_eq!(*t.last().unwrap(), 50.0);
            assert!(t.windows(2).all(|w| w[1] > w[0]));
        }
    }
}
