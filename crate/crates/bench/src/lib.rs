//! Shared fixtures for the criterion benchmarks in benches/.

use hhgqo_core::dipole::{TraceDiagnostics, TRACE_FORMAT_VERSION};
use hhgqo_core::{DipoleTrace, Molecule, Pulse, SpatialGrid, TraceMeta, C64};

/// Trace with the reference pulse length and step, filled with a few
/// harmonics so the quadratures see realistic oscillation.
pub fn synthetic_trace() -> DipoleTrace {
    let pulse = Pulse::reference();
    let w = pulse.omega();
    let n_steps = (pulse.duration() / 0.02).ceil() as usize;
    let dt = pulse.duration() / n_steps as f64;
    let times: Vec<f64> = (0..=n_steps).map(|k| k as f64 * dt).collect();
    let signal =
        |t: f64, phase: f64| (1..=40).step_by(2).map(|q| (q as f64 * w * t + phase).sin() / q as f64).sum::<f64>();
    let grid = SpatialGrid::reference();
    DipoleTrace {
        mu_bb: times.iter().map(|&t| C64::new(signal(t, 0.0), 0.0)).collect(),
        mu_aa: times.iter().map(|&t| C64::new(signal(t, 0.3), 0.0)).collect(),
        mu_ab: times.iter().map(|&t| C64::new(0.7 + 0.1 * signal(t, 1.1), 0.05 * signal(t, 0.5))).collect(),
        e_cl: times.iter().map(|&t| pulse.classical_field(t).unwrap_or(0.0)).collect(),
        times,
        meta: TraceMeta {
            version: TRACE_FORMAT_VERSION,
            molecule: Molecule::new(2.0, 1.0).expect("valid molecule"),
            pulse,
            grid_hash: grid.fingerprint(),
            grid,
            dt,
            diagnostics: TraceDiagnostics {
                orbital_energy: -0.67,
                overlap: 0.66,
                energy_bonding: -1.24,
                energy_antibonding: -0.83,
                final_norm_bonding: 1.0,
                final_norm_antibonding: 1.0,
            },
        },
    }
}
