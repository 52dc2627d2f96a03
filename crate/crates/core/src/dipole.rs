//! Two-centre soft-core molecule on a grid: atomic orbitals, LCAO states and
//! split-step propagation producing the time-dependent dipole matrix elements.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{Molecule, Pulse};
use crate::grid::{kinetic_energy, SpatialGrid, Spectral, Wavefunction};

pub const TRACE_FORMAT_VERSION: u32 = 1;

/// Controls for imaginary-time relaxation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxSettings {
    /// Imaginary time steps, applied coarse to fine.
    pub steps: Vec<f64>,
    pub energy_tol: f64,
    pub max_iterations: usize,
    /// Iterations between energy evaluations.
    pub check_every: usize,
}

impl Default for RelaxSettings {
    fn default() -> Self {
        Self { steps: vec![0.1, 0.01], energy_tol: 1e-8, max_iterations: 200_000, check_every: 20 }
    }
}

#[derive(Debug, Clone)]
pub struct Orbital {
    pub wavefunction: Wavefunction,
    pub energy: f64,
    pub iterations: usize,
}

/// Ground state of a single soft-core centre by imaginary-time relaxation.
pub fn ground_orbital(center: f64, molecule: &Molecule, grid: &SpatialGrid) -> Result<Orbital> {
    ground_orbital_with(center, molecule, grid, &RelaxSettings::default())
}

pub fn ground_orbital_with(
    center: f64,
    molecule: &Molecule,
    grid: &SpatialGrid,
    settings: &RelaxSettings,
) -> Result<Orbital> {
    if center - 20.0 < grid.x_min || center + 20.0 > grid.x_max {
        return Err(Error::InvalidParameter(format!(
            "grid [{}, {}] must extend 20 a.u. beyond the centre at {center}",
            grid.x_min, grid.x_max
        )));
    }
    let xs = grid.xs();
    let v: Vec<f64> = xs.iter().map(|&x| molecule.single_center_potential(center, x)).collect();
    let ks = grid.wavenumbers();
    let mut spectral = Spectral::new(grid.n_points);

    let mut psi = Wavefunction::from_real(&xs.iter().map(|x| (-(x - center).powi(2) / 2.0).exp()).collect::<Vec<_>>());
    psi.normalize(grid.dx);
    let energy_of = |psi: &Wavefunction, spectral: &mut Spectral| {
        kinetic_energy(psi, grid, spectral)
            + psi.amplitudes.iter().zip(&v).map(|(a, v)| a.norm_sqr() * v).sum::<f64>() * grid.dx
    };

    let mut energy = energy_of(&psi, &mut spectral);
    let mut iterations = 0usize;
    for &tau in &settings.steps {
        let half_v: Vec<f64> = v.iter().map(|v| (-0.5 * tau * v).exp()).collect();
        let kin: Vec<f64> = ks.iter().map(|k| (-0.5 * tau * k * k).exp()).collect();
        let mut residual = f64::INFINITY;
        let mut stage_iters = 0usize;
        while residual >= settings.energy_tol {
            for _ in 0..settings.check_every {
                for (a, h) in psi.amplitudes.iter_mut().zip(&half_v) {
                    *a *= h;
                }
                spectral.apply_diagonal_real(&mut psi.amplitudes, &kin);
                for (a, h) in psi.amplitudes.iter_mut().zip(&half_v) {
                    *a *= h;
                }
                psi.normalize(grid.dx);
            }
            stage_iters += settings.check_every;
            iterations += settings.check_every;
            let e = energy_of(&psi, &mut spectral);
            residual = (e - energy).abs();
            energy = e;
            if stage_iters >= settings.max_iterations {
                return Err(Error::NoConvergence { iterations, residual });
            }
        }
    }
    // Node-free ground state: drop the numerically tiny imaginary part and sign.
    let mut wavefunction = Wavefunction::from_real(&psi.amplitudes.iter().map(|a| a.norm()).collect::<Vec<_>>());
    wavefunction.normalize(grid.dx);
    let energy = energy_of(&wavefunction, &mut spectral);
    Ok(Orbital { wavefunction, energy, iterations })
}

#[derive(Debug, Clone)]
pub struct LcaoStates {
    pub bonding: Wavefunction,
    pub antibonding: Wavefunction,
    /// <g_L|g_R>
    pub overlap: f64,
    pub orbital_energy: f64,
}

/// Bonding (g_R + g_L)/sqrt(2+2S) and antibonding (g_R - g_L)/sqrt(2-2S).
pub fn build_lcao_states(molecule: &Molecule, grid: &SpatialGrid) -> Result<LcaoStates> {
    if !grid.is_symmetric() {
        return Err(Error::InvalidParameter("LCAO construction needs a grid symmetric about x = 0".into()));
    }
    let [right, _] = molecule.centers();
    let g_r = ground_orbital(right, molecule, grid)?;
    lcao_from_orbital(&g_r.wavefunction, g_r.energy, grid)
}

pub fn lcao_from_orbital(g_r: &Wavefunction, orbital_energy: f64, grid: &SpatialGrid) -> Result<LcaoStates> {
    // On a symmetric grid the left orbital is the exact mirror image.
    let g_l = g_r.mirrored();
    let overlap = g_l.inner(g_r, grid.dx).re;
    if overlap.abs() >= 1.0 - 1e-12 {
        return Err(Error::DegenerateOverlap(overlap));
    }
    let nb = (2.0 + 2.0 * overlap).sqrt();
    let na = (2.0 - 2.0 * overlap).sqrt();
    let n = grid.n_points;
    let mut bonding = vec![C64::new(0.0, 0.0); n];
    let mut antibonding = vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        let (r, l) = (g_r.amplitudes[i].re, g_l.amplitudes[i].re);
        bonding[i] = C64::new((r + l) / nb, 0.0);
        antibonding[i] = C64::new((r - l) / na, 0.0);
    }
    // Impose exact parity so that <b|a> vanishes identically.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let s = 0.5 * (bonding[i] + bonding[j]);
        bonding[i] = s;
        bonding[j] = s;
        let d = 0.5 * (antibonding[i] - antibonding[j]);
        antibonding[i] = d;
        antibonding[j] = -d;
    }
    if n % 2 == 1 {
        antibonding[n / 2] = C64::new(0.0, 0.0);
    }
    let mut bonding = Wavefunction { amplitudes: bonding };
    let mut antibonding = Wavefunction { amplitudes: antibonding };
    bonding.normalize(grid.dx);
    antibonding.normalize(grid.dx);
    Ok(LcaoStates { bonding, antibonding, overlap, orbital_energy })
}

/// R = (b + a)/sqrt2, L = (b - a)/sqrt2.
pub fn localized_states(bonding: &Wavefunction, antibonding: &Wavefunction) -> (Wavefunction, Wavefunction) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let r = bonding.amplitudes.iter().zip(&antibonding.amplitudes).map(|(b, a)| (b + a) * s).collect();
    let l = bonding.amplitudes.iter().zip(&antibonding.amplitudes).map(|(b, a)| (b - a) * s).collect();
    (Wavefunction { amplitudes: r }, Wavefunction { amplitudes: l })
}

/// <psi| H_0 |psi> for the field-free two-centre Hamiltonian.
pub fn field_free_energy(psi: &Wavefunction, molecule: &Molecule, grid: &SpatialGrid) -> f64 {
    let mut spectral = Spectral::new(grid.n_points);
    let v: f64 =
        psi.amplitudes.iter().enumerate().map(|(i, a)| a.norm_sqr() * molecule.potential(grid.x(i))).sum::<f64>()
            * grid.dx;
    kinetic_energy(psi, grid, &mut spectral) + v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDiagnostics {
    pub orbital_energy: f64,
    pub overlap: f64,
    pub energy_bonding: f64,
    pub energy_antibonding: f64,
    pub final_norm_bonding: f64,
    pub final_norm_antibonding: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub version: u32,
    pub molecule: Molecule,
    pub pulse: Pulse,
    pub grid: SpatialGrid,
    pub grid_hash: String,
    pub dt: f64,
    pub diagnostics: TraceDiagnostics,
}

/// Time series of <Ui|x|Uj> for the bonding/antibonding pair and the driving field.
#[derive(Debug, Clone, PartialEq)]
pub struct DipoleTrace {
    pub times: Vec<f64>,
    pub mu_bb: Vec<C64>,
    pub mu_aa: Vec<C64>,
    pub mu_ab: Vec<C64>,
    pub e_cl: Vec<f64>,
    pub meta: TraceMeta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    /// max|mu_ab| / max|mu_bb|
    pub peak_ratio: f64,
    /// Fraction of samples where both diagonal elements exceed |mu_ab|.
    pub pointwise_fraction: f64,
}

impl DipoleTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.meta.dt
    }

    /// Length, ordering, uniform step and hermiticity checks.
    pub fn validate(&self) -> Result<()> {
        let n = self.times.len();
        if n < 2 || [self.mu_bb.len(), self.mu_aa.len(), self.mu_ab.len(), self.e_cl.len()].iter().any(|&m| m != n) {
            return Err(Error::Format("trace columns have inconsistent lengths".into()));
        }
        let dt = self.meta.dt;
        for (k, t) in self.times.iter().enumerate() {
            if (t - k as f64 * dt).abs() > 1e-9 * dt.max(1.0) * (k as f64).max(1.0) {
                return Err(Error::Format(format!("sample {k} is off the uniform time grid")));
            }
        }
        for (name, col) in [("mu_bb", &self.mu_bb), ("mu_aa", &self.mu_aa)] {
            let max_re = col.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
            let max_im = col.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            if max_im > 1e-8 * max_re.max(1e-300) && max_im > 1e-14 {
                return Err(Error::Format(format!("{name} has an imaginary part {max_im:e}")));
            }
        }
        Ok(())
    }

    pub fn truncation_report(&self) -> TruncationReport {
        let max = |v: &[C64]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let ok = (0..self.len())
            .filter(|&k| {
                let ab = self.mu_ab[k].norm();
                self.mu_bb[k].norm() > ab && self.mu_aa[k].norm() > ab
            })
            .count();
        TruncationReport {
            peak_ratio: max(&self.mu_ab) / max(&self.mu_bb).max(1e-300),
            pointwise_fraction: ok as f64 / self.len() as f64,
        }
    }

    pub fn envelope(&self) -> Vec<f64> {
        self.times.iter().map(|&t| self.meta.pulse.envelope_at(t.clamp(0.0, self.meta.pulse.duration()))).collect()
    }
}

/// Largest step that still samples the cutoff harmonic 50 times per period.
pub fn max_time_step(pulse: &Pulse, q_cutoff: usize) -> f64 {
    0.02 * 2.0 * PI / (q_cutoff as f64 * pulse.omega())
}

/// Propagates bonding and antibonding states through the pulse.
pub fn propagate_semiclassical(
    molecule: &Molecule,
    pulse: &Pulse,
    grid: &SpatialGrid,
    dt: f64,
    q_cutoff: usize,
) -> Result<DipoleTrace> {
    let limit = max_time_step(pulse, q_cutoff);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::UnresolvedCutoff { dt, limit });
    }
    let lcao = build_lcao_states(molecule, grid)?;
    let duration = pulse.duration();
    let n_steps = (duration / dt - 1e-9).ceil() as usize;
    let dt = duration / n_steps as f64;
    let field = |t: f64| pulse.classical_field(t.min(duration)).unwrap_or(0.0);
    propagate_pair(molecule, pulse, grid, &lcao, dt, n_steps, &field, 1e-6)
}

/// Strang split-step propagation of the LCAO pair under an arbitrary field.
///
/// `pulse` is stored as metadata only; the field actually applied is `field`.
#[allow(clippy::too_many_arguments)]
pub fn propagate_pair(
    molecule: &Molecule,
    pulse: &Pulse,
    grid: &SpatialGrid,
    lcao: &LcaoStates,
    dt: f64,
    n_steps: usize,
    field: &(dyn Fn(f64) -> f64 + Sync),
    norm_growth_tol: f64,
) -> Result<DipoleTrace> {
    let n = grid.n_points;
    let xs = grid.xs();
    let v: Vec<f64> = xs.iter().map(|&x| molecule.potential(x)).collect();
    let mask = grid.absorber_mask();
    let kinetic: Vec<C64> = grid.wavenumbers().iter().map(|k| C64::from_polar(1.0, -0.5 * k * k * dt)).collect();

    let mut psi_b = lcao.bonding.clone();
    let mut psi_a = lcao.antibonding.clone();
    let mut spec_b = Spectral::new(n);
    let mut spec_a = Spectral::new(n);
    let mut half = vec![C64::new(0.0, 0.0); n];

    let cap = n_steps + 1;
    let mut trace = DipoleTrace {
        times: Vec::with_capacity(cap),
        mu_bb: Vec::with_capacity(cap),
        mu_aa: Vec::with_capacity(cap),
        mu_ab: Vec::with_capacity(cap),
        e_cl: Vec::with_capacity(cap),
        meta: TraceMeta {
            version: TRACE_FORMAT_VERSION,
            molecule: molecule.clone(),
            pulse: pulse.clone(),
            grid: grid.clone(),
            grid_hash: grid.fingerprint(),
            dt,
            diagnostics: TraceDiagnostics {
                orbital_energy: lcao.orbital_energy,
                overlap: lcao.overlap,
                energy_bonding: field_free_energy(&lcao.bonding, molecule, grid),
                energy_antibonding: field_free_energy(&lcao.antibonding, molecule, grid),
                final_norm_bonding: 1.0,
                final_norm_antibonding: 1.0,
            },
        },
    };
    let record = |trace: &mut DipoleTrace, k: usize, b: &Wavefunction, a: &Wavefunction| {
        let t = k as f64 * dt;
        trace.times.push(t);
        trace.mu_bb.push(C64::new(b.weighted_inner(b, &xs, grid.dx).re, 0.0));
        trace.mu_aa.push(C64::new(a.weighted_inner(a, &xs, grid.dx).re, 0.0));
        trace.mu_ab.push(a.weighted_inner(b, &xs, grid.dx));
        trace.e_cl.push(field(t));
    };
    record(&mut trace, 0, &psi_b, &psi_a);

    for k in 0..n_steps {
        let e_mid = field((k as f64 + 0.5) * dt);
        for ((h, &x), &vx) in half.iter_mut().zip(&xs).zip(&v) {
            *h = C64::from_polar(1.0, -0.5 * dt * (vx + x * e_mid));
        }
        let step = |psi: &mut Wavefunction, spec: &mut Spectral| {
            for (p, h) in psi.amplitudes.iter_mut().zip(&half) {
                *p *= h;
            }
            spec.apply_diagonal(&mut psi.amplitudes, &kinetic);
            for ((p, h), m) in psi.amplitudes.iter_mut().zip(&half).zip(&mask) {
                *p *= h * m;
            }
        };
        rayon::join(|| step(&mut psi_b, &mut spec_b), || step(&mut psi_a, &mut spec_a));
        if k % 64 == 63 || k + 1 == n_steps {
            for psi in [&psi_b, &psi_a] {
                let norm = psi.norm_sqr(grid.dx);
                if !norm.is_finite() || norm > 1.0 + norm_growth_tol {
                    return Err(Error::Unstable { t: (k + 1) as f64 * dt, norm });
                }
            }
        }
        record(&mut trace, k + 1, &psi_b, &psi_a);
    }
    trace.meta.diagnostics.final_norm_bonding = psi_b.norm_sqr(grid.dx);
    trace.meta.diagnostics.final_norm_antibonding = psi_a.norm_sqr(grid.dx);
    Ok(trace)
}
