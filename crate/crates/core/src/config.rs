//! TOML run configuration with documented defaults and validation.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{ModeSet, Molecule, Pulse};
use crate::grid::SpatialGrid;
use crate::integrals::{CouplingOptions, PhaseConvention};
use crate::observables::WignerGrid;

/// Coupling that puts the strongest low-order single-molecule bonding photon
/// number at 1e-10 for the default molecule (R = 2, a = 1) and pulse.
pub const DEFAULT_G0: f64 = 6.1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseSection {
    pub wavelength_nm: f64,
    pub intensity_w_cm2: f64,
    pub n_cycles: u32,
    /// Carrier-envelope phase in radians.
    pub cep: f64,
}

impl Default for PulseSection {
    fn default() -> Self {
        Self { wavelength_nm: 800.0, intensity_w_cm2: 5e14, n_cycles: 8, cep: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MoleculeSection {
    /// Interatomic distances to sweep, atomic units.
    pub r_au: Vec<f64>,
    pub softcore_au: f64,
}

impl Default for MoleculeSection {
    fn default() -> Self {
        Self { r_au: vec![2.0], softcore_au: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModesSection {
    pub q_cutoff: usize,
    pub g0: f64,
}

impl Default for ModesSection {
    fn default() -> Self {
        Self { q_cutoff: 100, g0: DEFAULT_G0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Spectrum,
    Wigner,
    Entangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CachePolicy {
    /// Reuse a cached trace when its metadata matches, otherwise compute and store.
    #[default]
    Use,
    /// Always recompute and overwrite.
    Refresh,
    /// Never touch the cache directory (downstream stages recompute traces).
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// Molecule numbers to sweep.
    pub n_mol: Vec<u64>,
    pub outputs: Vec<Output>,
    /// Modes for Wigner maps; empty selects the even mode with the largest
    /// photon-added amplitude plus the even mode with the smallest one below it.
    pub wigner_modes: Vec<usize>,
    /// Split orders for the conditioned partition entropy; empty means all.
    pub partition_splits: Vec<usize>,
    /// Modes for the log-negativity bound; empty means all.
    pub logneg_modes: Vec<usize>,
    /// Highest order reported in Wigner-maximum tables.
    pub wigner_max_orders: usize,
    pub output_dir: String,
    pub cache_dir: String,
    pub cache: CachePolicy,
    /// Seed for randomized checks.
    pub seed: u64,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            n_mol: vec![1],
            outputs: vec![Output::Spectrum, Output::Wigner, Output::Entangle],
            wigner_modes: Vec::new(),
            partition_splits: Vec::new(),
            logneg_modes: Vec::new(),
            wigner_max_orders: 20,
            output_dir: "out".into(),
            cache_dir: ".hhgqo-cache".into(),
            cache: CachePolicy::Use,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsSection {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub absorber_width: f64,
    /// Requested time step; rounded down to divide the pulse evenly.
    pub dt: f64,
    pub pulse_envelope: bool,
    pub phase: PhaseConvention,
    /// Allowed norm growth during real-time propagation.
    pub norm_growth_tol: f64,
    /// Largest max|mu_ab|/max|mu_bb| considered consistent with first order.
    pub max_truncation_ratio: f64,
    /// Largest N_a considered perturbative.
    pub max_perturbative_na: f64,
    pub wigner_points: usize,
    pub wigner_half_width: f64,
    /// Target of the optional g0 calibration and the window of orders it scans.
    pub calibration_target: f64,
    pub calibration_window: usize,
}

impl Default for NumericsSection {
    fn default() -> Self {
        let g = SpatialGrid::reference();
        let w = WignerGrid::default();
        Self {
            x_min: g.x_min,
            x_max: g.x_max,
            n_points: g.n_points,
            absorber_width: g.absorber_width,
            dt: 0.02,
            pulse_envelope: true,
            phase: PhaseConvention::Composed,
            norm_growth_tol: 1e-6,
            max_truncation_ratio: 1.0,
            max_perturbative_na: 1.0,
            wigner_points: w.points,
            wigner_half_width: w.half_width,
            calibration_target: 1e-10,
            calibration_window: 13,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub pulse: PulseSection,
    pub molecule: MoleculeSection,
    pub modes: ModesSection,
    pub run: RunSection,
    pub numerics: NumericsSection,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(s).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config is always serialisable")
    }

    /// SHA-256 of the canonical TOML rendering.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml_string().as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        self.pulse()?;
        self.grid()?;
        let m = &self.molecule;
        if m.r_au.is_empty() {
            return Err(config_err("molecule.r_au must list at least one distance"));
        }
        for &r in &m.r_au {
            Molecule::new(r, m.softcore_au).map_err(|e| config_err(e.to_string()))?;
        }
        self.mode_set()?;
        let run = &self.run;
        if run.n_mol.is_empty() {
            return Err(config_err("run.n_mol must list at least one molecule number"));
        }
        if run.n_mol.contains(&0) {
            return Err(config_err("run.n_mol entries must be >= 1"));
        }
        if run.outputs.is_empty() {
            return Err(config_err("run.outputs must not be empty"));
        }
        let qc = self.modes.q_cutoff;
        if let Some(q) = run.wigner_modes.iter().chain(&run.logneg_modes).find(|&&q| q == 0 || q > qc) {
            return Err(config_err(format!("mode {q} outside 1..={qc}")));
        }
        if let Some(s) = run.partition_splits.iter().find(|&&s| s == 0 || s >= qc) {
            return Err(config_err(format!("partition split {s} outside 1..{qc}")));
        }
        if run.output_dir.is_empty() {
            return Err(config_err("run.output_dir must not be empty"));
        }
        let n = &self.numerics;
        if !(n.dt > 0.0) {
            return Err(config_err("numerics.dt must be positive"));
        }
        let limit = crate::dipole::max_time_step(&self.pulse()?, qc);
        if n.dt > limit {
            return Err(config_err(format!(
                "numerics.dt = {} does not resolve harmonic {qc}; use dt <= {limit:.5}",
                n.dt
            )));
        }
        if n.wigner_points < 2 || !(n.wigner_half_width > 0.0) {
            return Err(config_err("Wigner grid needs >= 2 points and a positive half width"));
        }
        if !(n.norm_growth_tol > 0.0) || !(n.max_truncation_ratio > 0.0) || !(n.max_perturbative_na > 0.0) {
            return Err(config_err("tolerances must be positive"));
        }
        if !(n.calibration_target > 0.0) || n.calibration_window == 0 {
            return Err(config_err("calibration target and window must be positive"));
        }
        Ok(())
    }

    pub fn pulse(&self) -> Result<Pulse> {
        let p = &self.pulse;
        Pulse::new(p.wavelength_nm, p.intensity_w_cm2, p.n_cycles, p.cep).map_err(|e| config_err(e.to_string()))
    }

    pub fn molecules(&self) -> Result<Vec<Molecule>> {
        self.molecule.r_au.iter().map(|&r| Molecule::new(r, self.molecule.softcore_au)).collect()
    }

    pub fn grid(&self) -> Result<SpatialGrid> {
        let n = &self.numerics;
        SpatialGrid::new(n.x_min, n.x_max, n.n_points, n.absorber_width).map_err(|e| config_err(e.to_string()))
    }

    pub fn mode_set(&self) -> Result<ModeSet> {
        ModeSet::new(self.pulse()?.omega(), self.modes.q_cutoff, self.modes.g0).map_err(|e| config_err(e.to_string()))
    }

    pub fn coupling_options(&self) -> CouplingOptions {
        CouplingOptions { pulse_envelope: self.numerics.pulse_envelope, phase: self.numerics.phase }
    }

    pub fn wigner_grid(&self) -> WignerGrid {
        WignerGrid { points: self.numerics.wigner_points, half_width: self.numerics.wigner_half_width }
    }
}
