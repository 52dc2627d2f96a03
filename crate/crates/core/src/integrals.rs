//! Mode displacements, phases and first-order transition amplitudes obtained
//! from a dipole trace by trapezoidal quadrature.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dipole::DipoleTrace;
use crate::error::{Error, Result};
use crate::field::ModeSet;

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalElement {
    Bonding,
    Antibonding,
}

/// How the phase factor inside the transition integrals is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PhaseConvention {
    /// Full propagator composition: the displacement cross phase and the
    /// split phi phases combine into the global phase of the bonding path,
    /// so the integrand carries no extra phase.
    #[default]
    Composed,
    /// Only the displacement cross phase theta_b(t, t1) is applied.
    DisplacementOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingOptions {
    /// Multiply the mode couplings by the pulse envelope f(t).
    pub pulse_envelope: bool,
    pub phase: PhaseConvention,
}

impl Default for CouplingOptions {
    fn default() -> Self {
        Self { pulse_envelope: true, phase: PhaseConvention::Composed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementSet {
    /// chi_q(t_end, t0), including the molecule-number factor for bonding.
    pub chi: Vec<C64>,
    pub phase_phi: f64,
    pub source: DiagonalElement,
    pub n_mol: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionAmplitudes {
    pub h1: Vec<C64>,
    pub h2: Vec<C64>,
    #[serde(rename = "H2")]
    pub big_h2: C64,
    pub n_mol: u64,
}

impl TransitionAmplitudes {
    pub fn zeros(q_cutoff: usize, n_mol: u64) -> Self {
        let z = C64::new(0.0, 0.0);
        Self { h1: vec![z; q_cutoff], h2: vec![z; q_cutoff], big_h2: z, n_mol }
    }

    pub fn from_parts(h1: Vec<C64>, h2: Vec<C64>, n_mol: u64) -> Self {
        let big_h2 = h2.iter().sum();
        Self { h1, h2, big_h2, n_mol }
    }

    /// sum |h1|^2 + |H2|^2
    pub fn norm_na(&self) -> f64 {
        self.h1.iter().map(|z| z.norm_sqr()).sum::<f64>() + self.big_h2.norm_sqr()
    }
}

/// Quadrature view of a trace: sample spacing, envelope weights and the
/// index range being integrated.
struct Quadrature<'a> {
    trace: &'a DipoleTrace,
    dt: f64,
    coupling_env: Vec<f64>,
}

impl<'a> Quadrature<'a> {
    fn new(trace: &'a DipoleTrace, opts: &CouplingOptions) -> Result<Self> {
        trace.validate()?;
        let coupling_env = if opts.pulse_envelope { trace.envelope() } else { vec![1.0; trace.len()] };
        Ok(Self { trace, dt: trace.dt(), coupling_env })
    }

    fn index_of(&self, t: f64) -> Result<usize> {
        let k = (t / self.dt).round();
        if (t - k * self.dt).abs() > 1e-6 * self.dt || k < 0.0 || k as usize >= self.trace.len() {
            return Err(Error::InvalidParameter(format!("time {t} is not a sample of the trace")));
        }
        Ok(k as usize)
    }

    fn diagonal(&self, which: DiagonalElement) -> Vec<f64> {
        let mu = match which {
            DiagonalElement::Bonding => &self.trace.mu_bb,
            DiagonalElement::Antibonding => &self.trace.mu_aa,
        };
        mu.iter().zip(&self.coupling_env).map(|(m, f)| m.re * f).collect()
    }

    /// Running integral of s(t) e^{i w t} from the first sample.
    fn cumulative(&self, s: &[f64], omega: f64) -> Vec<C64> {
        let h = 0.5 * self.dt;
        let mut out = Vec::with_capacity(s.len());
        let mut acc = C64::new(0.0, 0.0);
        let mut prev = C64::new(0.0, 0.0);
        for (k, (&v, &t)) in s.iter().zip(&self.trace.times).enumerate() {
            let cur = C64::from_polar(v, omega * t);
            if k > 0 {
                acc += (prev + cur) * h;
            }
            out.push(acc);
            prev = cur;
        }
        out
    }
}

fn scale_for(which: DiagonalElement, n_mol: u64) -> f64 {
    match which {
        DiagonalElement::Bonding => n_mol as f64,
        DiagonalElement::Antibonding => 1.0,
    }
}

/// chi_q(t_to, t_from) = -g_q int e^{i w_q tau} f mu_ii dtau, scaled by N for bonding.
pub fn chi_displacement(
    trace: &DipoleTrace,
    which: DiagonalElement,
    modes: &ModeSet,
    n_mol: u64,
    t_from: f64,
    t_to: f64,
    opts: &CouplingOptions,
) -> Result<Vec<C64>> {
    let quad = Quadrature::new(trace, opts)?;
    let (i0, i1) = (quad.index_of(t_from)?, quad.index_of(t_to)?);
    let zero = C64::new(0.0, 0.0);
    if i1 <= i0 {
        return Ok(vec![zero; modes.len()]);
    }
    let s = quad.diagonal(which);
    let scale = scale_for(which, n_mol);
    Ok(modes
        .orders()
        .map(|q| {
            let w = modes.frequency(q);
            let mut acc = zero;
            for k in i0..i1 {
                let a = C64::from_polar(s[k], w * trace.times[k]);
                let b = C64::from_polar(s[k + 1], w * trace.times[k + 1]);
                acc += (a + b) * (0.5 * quad.dt);
            }
            -acc * modes.coupling(q) * scale
        })
        .collect())
}

/// phi_i(t_to, t_from) = sum_q g_q^2 int int_{t2<t1} f mu(t1) f mu(t2) sin(w_q (t1 - t2)),
/// scaled by N^2 for bonding.
pub fn phase_phi_between(
    trace: &DipoleTrace,
    which: DiagonalElement,
    modes: &ModeSet,
    n_mol: u64,
    t_from: f64,
    t_to: f64,
    opts: &CouplingOptions,
) -> Result<f64> {
    let quad = Quadrature::new(trace, opts)?;
    let (i0, i1) = (quad.index_of(t_from)?, quad.index_of(t_to)?);
    if i1 <= i0 {
        return Ok(0.0);
    }
    let s = quad.diagonal(which);
    let h = 0.5 * quad.dt;
    let per_mode: Vec<f64> = modes
        .orders()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&q| {
            let w = modes.frequency(q);
            // Inner running integral of s e^{-i w t} restarted at t_from.
            let mut inner = C64::new(0.0, 0.0);
            let mut outer = 0.0;
            let mut prev_out = 0.0;
            let mut prev_in = C64::from_polar(s[i0], -w * trace.times[i0]);
            for (&sk, &t) in s[i0 + 1..=i1].iter().zip(&trace.times[i0 + 1..=i1]) {
                let cur_in = C64::from_polar(sk, -w * t);
                inner += (prev_in + cur_in) * h;
                let cur_out = sk * (C64::from_polar(1.0, w * t) * inner).im;
                outer += (prev_out + cur_out) * h;
                prev_in = cur_in;
                prev_out = cur_out;
            }
            modes.coupling(q).powi(2) * outer
        })
        .collect();
    let scale = scale_for(which, n_mol);
    Ok(per_mode.iter().sum::<f64>() * scale * scale)
}

pub fn phase_phi(
    trace: &DipoleTrace,
    which: DiagonalElement,
    modes: &ModeSet,
    n_mol: u64,
    t: f64,
    opts: &CouplingOptions,
) -> Result<f64> {
    phase_phi_between(trace, which, modes, n_mol, 0.0, t, opts)
}

/// theta_b(t_end, t1) = N^2 sum_q (chi(t,t1) chi(t1,t0)^* - c.c.)/2, purely imaginary.
pub fn theta_b(
    trace: &DipoleTrace,
    modes: &ModeSet,
    n_mol: u64,
    t_end: f64,
    t1: f64,
    opts: &CouplingOptions,
) -> Result<C64> {
    let late = chi_displacement(trace, DiagonalElement::Bonding, modes, 1, t1, t_end, opts)?;
    let early = chi_displacement(trace, DiagonalElement::Bonding, modes, 1, 0.0, t1, opts)?;
    let n = n_mol as f64;
    let s: f64 = late.iter().zip(&early).map(|(a, b)| (a * b.conj()).im).sum();
    Ok(I * (n * n * s))
}

/// Classical field radiated by the bonding displacement at sample time t,
/// -i N f(t) sum_q g_q [chi_q^* e^{i w t} - chi_q e^{-i w t}] with chi_q = chi_q(t, t0).
pub fn classical_backaction_field(
    trace: &DipoleTrace,
    modes: &ModeSet,
    n_mol: u64,
    t: f64,
    opts: &CouplingOptions,
) -> Result<f64> {
    Ok(backaction_field_per_mode(trace, modes, n_mol, t, opts)?.iter().sum())
}

pub fn backaction_field_per_mode(
    trace: &DipoleTrace,
    modes: &ModeSet,
    n_mol: u64,
    t: f64,
    opts: &CouplingOptions,
) -> Result<Vec<f64>> {
    let quad = Quadrature::new(trace, opts)?;
    let k = quad.index_of(t)?;
    let chi = chi_displacement(trace, DiagonalElement::Bonding, modes, 1, 0.0, t, opts)?;
    let env = quad.coupling_env[k];
    let n = n_mol as f64;
    Ok(modes
        .orders()
        .zip(&chi)
        .map(|(q, c)| {
            let e = C64::from_polar(1.0, modes.frequency(q) * trace.times[k]);
            let z = -I * n * env * modes.coupling(q) * (c.conj() * e - c * e.conj());
            z.re
        })
        .collect())
}

/// Everything the state assembly needs, computed in one pass over the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeAmplitudes {
    pub bonding: DisplacementSet,
    pub transitions: TransitionAmplitudes,
    /// max |theta_b(t_end, t1)| over the pulse
    pub max_theta: f64,
}

/// Displacements and h1/h2/H2 at the end of the pulse.
pub fn transition_amplitudes(
    trace: &DipoleTrace,
    modes: &ModeSet,
    n_mol: u64,
    opts: &CouplingOptions,
) -> Result<ModeAmplitudes> {
    if n_mol == 0 {
        return Err(Error::InvalidParameter("molecule number must be at least 1".into()));
    }
    let quad = Quadrature::new(trace, opts)?;
    let n = n_mol as f64;
    let sqrt_n = n.sqrt();
    let s_bb = quad.diagonal(DiagonalElement::Bonding);
    let len = trace.len();
    let t_end = trace.times[len - 1];
    let orders: Vec<usize> = modes.orders().collect();

    // Single-molecule running displacements, one array per mode.
    let running: Vec<Vec<C64>> = orders
        .par_iter()
        .map(|&q| {
            let g = modes.coupling(q);
            quad.cumulative(&s_bb, modes.frequency(q)).into_iter().map(|c| -c * g).collect()
        })
        .collect();
    let finals: Vec<C64> = running.iter().map(|r| r[len - 1]).collect();

    // theta_b(t_end, t_k) / (i N^2) for every sample.
    let mut theta = vec![0.0; len];
    for (r, x) in running.iter().zip(&finals) {
        for (th, c) in theta.iter_mut().zip(r) {
            *th += ((x - c) * c.conj()).im;
        }
    }
    let max_theta = theta.iter().fold(0.0f64, |m, v| m.max((n * n * v).abs()));
    let phase_factor: Vec<C64> = match opts.phase {
        PhaseConvention::Composed => vec![C64::new(1.0, 0.0); len],
        PhaseConvention::DisplacementOnly => {
            if max_theta > 700.0 {
                return Err(Error::PhaseOverflow(max_theta));
            }
            theta.iter().map(|v| (I * (n * n * v)).exp()).collect()
        }
    };

    let weights: Vec<f64> = (0..len).map(|k| if k == 0 || k + 1 == len { 0.5 * quad.dt } else { quad.dt }).collect();
    let ab: Vec<C64> = trace.mu_ab.iter().zip(&phase_factor).zip(&weights).map(|((m, p), w)| m * p * *w).collect();

    let per_mode: Vec<(C64, C64)> = orders
        .par_iter()
        .zip(running.par_iter())
        .map(|(&q, chi)| {
            let w = modes.frequency(q);
            let g = modes.coupling(q);
            let mut h1 = C64::new(0.0, 0.0);
            let mut h2 = C64::new(0.0, 0.0);
            for k in 0..len {
                let e = C64::from_polar(1.0, w * trace.times[k]);
                let f = quad.coupling_env[k];
                h1 += ab[k] * (f * e);
                // Per-mode classical field per molecule: 2 g f Im(chi^* e^{i w t}).
                let field = 2.0 * g * f * (chi[k].conj() * e).im;
                h2 += ab[k] * field;
            }
            (-I * sqrt_n * g * h1, -I * sqrt_n * n * h2)
        })
        .collect();
    let (h1, h2): (Vec<C64>, Vec<C64>) = per_mode.into_iter().unzip();

    let phi_b = phase_phi_between(trace, DiagonalElement::Bonding, modes, n_mol, 0.0, t_end, opts)?;
    Ok(ModeAmplitudes {
        bonding: DisplacementSet {
            chi: finals.iter().map(|c| c * n).collect(),
            phase_phi: phi_b,
            source: DiagonalElement::Bonding,
            n_mol,
        },
        transitions: TransitionAmplitudes::from_parts(h1, h2, n_mol),
        max_theta,
    })
}

/// Coupling g0 that makes the largest single-molecule bonding photon number
/// among orders 1..=window equal to `target`.
pub fn calibrate_g0(
    trace: &DipoleTrace,
    modes: &ModeSet,
    target: f64,
    window: usize,
    opts: &CouplingOptions,
) -> Result<f64> {
    if !(target > 0.0) {
        return Err(Error::InvalidParameter("calibration target must be positive".into()));
    }
    let unit = modes.with_g0(1.0)?;
    let t_end = trace.times[trace.len() - 1];
    let chi = chi_displacement(trace, DiagonalElement::Bonding, &unit, 1, 0.0, t_end, opts)?;
    let peak = chi.iter().take(window.max(1)).map(|c| c.norm_sqr()).fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::InvalidParameter("trace has no bonding response to calibrate against".into()));
    }
    Ok((target / peak).sqrt())
}
