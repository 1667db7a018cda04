//! Run manifests: which integrals, which input states, which circuit shape.
//!
//! Times are in atomic units and energies in Hartree. Relative paths are
//! resolved against the directory holding the manifest.

use std::path::{Path, PathBuf};

use qpde::analysis::Sector;
use qpde::circuits::CircuitMode;
use qpde::evolution::EvolutionPath;
use qpde::state_prep::StateSpecFile;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Circuit shapes shipped with the tool.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// 12 ancillas, t = 10, dt ∈ {0.5, 1.0, 1.25}.
    H2,
    /// 10 ancillas, t = 10, dt ∈ {0.5, 1.0, 1.25}.
    Methylene,
}

impl Preset {
    fn n_ancilla(self) -> usize {
        match self {
            Preset::H2 => 12,
            Preset::Methylene => 10,
        }
    }

    fn total_time(self) -> f64 {
        10.0
    }

    fn dt(self) -> Vec<f64> {
        vec![0.5, 1.0, 1.25]
    }
}

/// An input state given inline or as a path to a JSON state-spec file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSource {
    File(String),
    Inline(StateSpecFile),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|k| self.start + (self.stop - self.start) * k as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

/// Manifest as written on disk; every field except `fcidump` and `phi0`
/// may come from a preset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestFile {
    #[serde(default)]
    pub preset: Option<Preset>,
    pub fcidump: String,
    pub phi0: StateSource,
    #[serde(default)]
    pub phi1: Option<StateSource>,
    #[serde(default)]
    pub n_ancilla: Option<usize>,
    /// Checked against twice the orbital count when present.
    #[serde(default)]
    pub n_system: Option<usize>,
    #[serde(default)]
    pub total_time: Option<f64>,
    #[serde(default)]
    pub dt: Option<Vec<f64>>,
    #[serde(default)]
    pub path: Option<EvolutionPath>,
    #[serde(default)]
    pub mode: Option<CircuitMode>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output_dir: Option<String>,
    #[serde(default)]
    pub min_mass: Option<f64>,
    #[serde(default)]
    pub sector: Option<Sector>,
    #[serde(default)]
    pub bpde_grid: Option<GridSpec>,
}

pub const DEFAULT_MIN_MASS: f64 = 0.005;

/// Manifest with presets applied and paths resolved.
#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub fcidump: PathBuf,
    pub phi0: StateSpecFile,
    pub phi1: Option<StateSpecFile>,
    pub n_ancilla: usize,
    pub n_system: Option<usize>,
    pub total_time: f64,
    pub dt: Vec<f64>,
    pub path: EvolutionPath,
    pub mode: CircuitMode,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub min_mass: f64,
    pub sector: Option<Sector>,
    pub bpde_grid: Option<GridSpec>,
}

impl ManifestFile {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("manifest: {e}")))
    }

    /// Applies presets, loads state files and resolves paths against `base`.
    pub fn resolve(self, base: &Path) -> Result<RunManifest, CliError> {
        let preset = self.preset;
        let n_ancilla = self
            .n_ancilla
            .or(preset.map(Preset::n_ancilla))
            .ok_or_else(|| CliError::Input("manifest: n_ancilla is required without a preset".into()))?;
        if n_ancilla == 0 {
            return Err(CliError::Input("manifest: n_ancilla must be at least 1".into()));
        }
        let total_time = self
            .total_time
            .or(preset.map(Preset::total_time))
            .ok_or_else(|| CliError::Input("manifest: total_time is required without a preset".into()))?;
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(CliError::Input(format!("manifest: total_time must be positive, got {total_time}")));
        }
        let dt = self.dt.or(preset.map(Preset::dt)).unwrap_or_default();
        if dt.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(CliError::Input("manifest: dt values must be positive".into()));
        }
        let min_mass = self.min_mass.unwrap_or(DEFAULT_MIN_MASS);
        if !(min_mass > 0.0 && min_mass < 1.0) {
            return Err(CliError::Input(format!("manifest: min_mass must lie in (0, 1), got {min_mass}")));
        }
        let fcidump = existing(base, &self.fcidump)?;
        let phi0 = load_state(base, self.phi0)?;
        let phi1 = self.phi1.map(|s| load_state(base, s)).transpose()?;
        Ok(RunManifest {
            fcidump,
            phi0,
            phi1,
            n_ancilla,
            n_system: self.n_system,
            total_time,
            dt,
            path: self.path.unwrap_or(EvolutionPath::Compiled),
            mode: self.mode.unwrap_or(CircuitMode::Qpde),
            seed: self.seed.unwrap_or(0),
            output_dir: base.join(self.output_dir.as_deref().unwrap_or("out")),
            min_mass,
            sector: self.sector,
            bpde_grid: self.bpde_grid,
        })
    }
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        ManifestFile::from_json(&text)
            .map_err(|e| e.context(&path.display().to_string()))?
            .resolve(base)
    }
}

fn existing(base: &Path, relative: &str) -> Result<PathBuf, CliError> {
    let p = base.join(relative);
    if !p.is_file() {
        return Err(CliError::Input(format!("{}: file not found", p.display())));
    }
    Ok(p)
}

fn load_state(base: &Path, source: StateSource) -> Result<StateSpecFile, CliError> {
    match source {
        StateSource::Inline(spec) => Ok(spec),
        StateSource::File(rel) => {
            let p = existing(base, &rel)?;
            let text = std::fs::read_to_string(&p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            StateSpecFile::from_json(&text).map_err(|e| CliError::from(e).context(&p.display().to_string()))
        }
    }
}
