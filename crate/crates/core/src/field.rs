//! Driving pulse, molecular model and the quantised mode comb.
//!
//! Everything is in Hartree atomic units; lab units appear only in the
//! constructors that take them.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Photon energy of 1 Hartree expressed as a vacuum wavelength in nm.
pub const HARTREE_WAVELENGTH_NM: f64 = 45.563_352_5;
/// Intensity (W/cm^2) of a linearly polarised field of amplitude 1 a.u.
pub const ATOMIC_INTENSITY_W_CM2: f64 = 3.509_447_58e16;
/// One atomic unit of time in femtoseconds.
pub const AU_TIME_FS: f64 = 2.418_884_326_6e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Envelope {
    SinSquared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub wavelength_nm: f64,
    pub peak_intensity_w_cm2: f64,
    pub n_cycles: u32,
    pub envelope: Envelope,
    pub carrier_phase: f64,
}

impl Pulse {
    pub fn new(wavelength_nm: f64, peak_intensity_w_cm2: f64, n_cycles: u32, carrier_phase: f64) -> Result<Self> {
        if !(wavelength_nm > 0.0) || !wavelength_nm.is_finite() {
            return Err(Error::InvalidParameter(format!("wavelength must be positive, got {wavelength_nm}")));
        }
        if !(peak_intensity_w_cm2 > 0.0) || !peak_intensity_w_cm2.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "peak intensity must be positive, got {peak_intensity_w_cm2}"
            )));
        }
        if n_cycles < 1 {
            return Err(Error::InvalidParameter("pulse needs at least one cycle".into()));
        }
        if !carrier_phase.is_finite() {
            return Err(Error::InvalidParameter("carrier phase must be finite".into()));
        }
        Ok(Self { wavelength_nm, peak_intensity_w_cm2, n_cycles, envelope: Envelope::SinSquared, carrier_phase })
    }

    /// 800 nm, 5e14 W/cm^2, eight cycles, zero carrier-envelope phase.
    pub fn reference() -> Self {
        Self::new(800.0, 5e14, 8, 0.0).expect("reference pulse is valid")
    }

    pub fn omega(&self) -> f64 {
        HARTREE_WAVELENGTH_NM / self.wavelength_nm
    }

    pub fn peak_field(&self) -> f64 {
        (self.peak_intensity_w_cm2 / ATOMIC_INTENSITY_W_CM2).sqrt()
    }

    pub fn duration(&self) -> f64 {
        self.n_cycles as f64 * 2.0 * PI / self.omega()
    }

    /// Envelope value; callers are expected to stay inside [0, duration].
    #[inline]
    pub fn envelope_at(&self, t: f64) -> f64 {
        match self.envelope {
            Envelope::SinSquared => {
                let s = (PI * t / self.duration()).sin();
                s * s
            }
        }
    }

    /// Classical field E0 f(t) sin(w t + phase) at a time inside the pulse.
    pub fn classical_field(&self, t: f64) -> Result<f64> {
        let duration = self.duration();
        // Allow for accumulated rounding on the last grid point.
        let slack = 1e-9 * duration;
        if !(t >= -slack && t <= duration + slack) {
            return Err(Error::OutsidePulse { t, duration });
        }
        let t = t.clamp(0.0, duration);
        Ok(self.peak_field() * self.envelope_at(t) * (self.omega() * t + self.carrier_phase).sin())
    }
}

/// Symmetric two-centre soft-core molecule with centres at +-R/2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Molecule {
    pub interatomic_distance_au: f64,
    pub softcore_param_au: f64,
}

impl Molecule {
    pub fn new(interatomic_distance_au: f64, softcore_param_au: f64) -> Result<Self> {
        if !(interatomic_distance_au > 0.0) || !interatomic_distance_au.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "interatomic distance must be positive, got {interatomic_distance_au}"
            )));
        }
        if !(softcore_param_au > 0.0) || !softcore_param_au.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "soft-core parameter must be positive, got {softcore_param_au}"
            )));
        }
        Ok(Self { interatomic_distance_au, softcore_param_au })
    }

    pub fn centers(&self) -> [f64; 2] {
        let h = 0.5 * self.interatomic_distance_au;
        [h, -h]
    }

    #[inline]
    pub fn single_center_potential(&self, center: f64, x: f64) -> f64 {
        let d = x - center;
        -1.0 / (d * d + self.softcore_param_au * self.softcore_param_au).sqrt()
    }

    #[inline]
    pub fn potential(&self, x: f64) -> f64 {
        let [r, l] = self.centers();
        self.single_center_potential(r, x) + self.single_center_potential(l, x)
    }
}

/// Harmonic comb q*w_L, q = 1..=q_cutoff, with couplings g_q = g0 sqrt(q).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    pub omega_l: f64,
    pub q_cutoff: usize,
    pub coupling_g0: f64,
}

impl ModeSet {
    pub fn new(omega_l: f64, q_cutoff: usize, coupling_g0: f64) -> Result<Self> {
        if !(omega_l > 0.0) || !omega_l.is_finite() {
            return Err(Error::InvalidParameter(format!("laser frequency must be positive, got {omega_l}")));
        }
        if q_cutoff < 2 {
            return Err(Error::InvalidParameter(format!("q_cutoff must be at least 2, got {q_cutoff}")));
        }
        if !(coupling_g0 > 0.0) || !coupling_g0.is_finite() {
            return Err(Error::InvalidParameter(format!("coupling g0 must be positive, got {coupling_g0}")));
        }
        Ok(Self { omega_l, q_cutoff, coupling_g0 })
    }

    pub fn len(&self) -> usize {
        self.q_cutoff
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn orders(&self) -> impl Iterator<Item = usize> {
        1..=self.q_cutoff
    }

    pub fn frequency(&self, q: usize) -> f64 {
        q as f64 * self.omega_l
    }

    pub fn coupling(&self, q: usize) -> f64 {
        self.coupling_g0 * (q as f64).sqrt()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.orders().map(|q| self.frequency(q)).collect()
    }

    pub fn couplings(&self) -> Vec<f64> {
        self.orders().map(|q| self.coupling(q)).collect()
    }

    pub fn with_g0(&self, coupling_g0: f64) -> Result<Self> {
        Self::new(self.omega_l, self.q_cutoff, coupling_g0)
    }
}

pub fn mode_frequencies(modes: &ModeSet) -> Vec<f64> {
    modes.frequencies()
}
