#![allow(dead_code)]

use hhgqo_core::dipole::{TraceDiagnostics, TRACE_FORMAT_VERSION};
use hhgqo_core::{DipoleTrace, Molecule, Pulse, SpatialGrid, TraceMeta, C64};

/// Trace sampled from closed-form dipole signals on a uniform grid.
pub fn synthetic_trace(
    n_steps: usize,
    dt: f64,
    mu_bb: impl Fn(f64) -> f64,
    mu_aa: impl Fn(f64) -> f64,
    mu_ab: impl Fn(f64) -> C64,
) -> DipoleTrace {
    let times: Vec<f64> = (0..=n_steps).map(|k| k as f64 * dt).collect();
    let grid = SpatialGrid::reference();
    DipoleTrace {
        mu_bb: times.iter().map(|&t| C64::new(mu_bb(t), 0.0)).collect(),
        mu_aa: times.iter().map(|&t| C64::new(mu_aa(t), 0.0)).collect(),
        mu_ab: times.iter().map(|&t| mu_ab(t)).collect(),
        e_cl: vec![0.0; times.len()],
        times,
        meta: TraceMeta {
            version: TRACE_FORMAT_VERSION,
            molecule: Molecule::new(2.0, 1.0).unwrap(),
            pulse: Pulse::reference(),
            grid_hash: grid.fingerprint(),
            grid,
            dt,
            diagnostics: TraceDiagnostics {
                orbital_energy: -0.5,
                overlap: 0.5,
                energy_bonding: -1.0,
                energy_antibonding: -0.8,
                final_norm_bonding: 1.0,
                final_norm_antibonding: 1.0,
            },
        },
    }
}

pub fn rel_diff(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}
