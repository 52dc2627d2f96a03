//! Photon-number spectra and single-mode Wigner functions in closed form.
//!
//! Tracing the rank-one multimode states down to one mode always leaves a
//! mixture of |0> and |1> in that mode's displaced frame, so every
//! single-mode quantity reduces to a 2x2 density matrix plus a centre.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_PI, SQRT_2};

use crate::error::{Error, Result};
use crate::state::{ElectronState, FieldComponent, JointState};

/// Unconditioned or conditioned field state: sum_k |c_k><c_k| / sum_k <c_k|c_k>.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub components: Vec<FieldComponent>,
}

impl FieldState {
    pub fn pure(c: FieldComponent) -> Self {
        Self { components: vec![c] }
    }

    /// Field state with the electron traced out.
    pub fn unconditioned(joint: &JointState) -> Self {
        Self { components: vec![joint.first.clone(), joint.second.clone()] }
    }

    pub fn modes(&self) -> usize {
        self.components.first().map_or(0, |c| c.modes())
    }

    pub fn total_norm(&self) -> f64 {
        self.components.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn reduced(&self, q: usize) -> Result<ModeDensity> {
        let modes = self.modes();
        if q == 0 || q > modes {
            return Err(Error::ModeOutOfRange { q, q_cutoff: modes });
        }
        let total = self.total_norm();
        if !(total > 0.0) {
            return Err(Error::ZeroProbability);
        }
        let idx = q - 1;
        let center = self.components[0].frame[idx];
        let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
        for c in &self.components {
            if (c.frame[idx] - center).norm() > 1e-12 * (1.0 + center.norm()) {
                return Err(Error::InvalidParameter("mixture components use different frames".into()));
            }
            let s = c.single[idx];
            let v = c.vacuum;
            // Photons in other modes trace to extra vacuum weight here.
            rho[0][0] += c.norm_sqr() - s.norm_sqr();
            rho[1][1] += s.norm_sqr();
            rho[0][1] += v * s.conj();
            rho[1][0] += s * v.conj();
        }
        for row in &mut rho {
            for z in row.iter_mut() {
                *z /= total;
            }
        }
        Ok(ModeDensity { center, rho })
    }
}

/// Normalised single-mode state D(center) rho D(center)^dag with rho on {|0>, |1>}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeDensity {
    pub center: C64,
    /// rho[m][n] = <m|rho|n>
    pub rho: [[C64; 2]; 2],
}

impl ModeDensity {
    pub fn mean_photon_number(&self) -> f64 {
        let c = self.center;
        self.rho[1][1].re + c.norm_sqr() * (self.rho[0][0].re + self.rho[1][1].re) + 2.0 * (c * self.rho[0][1]).re
    }

    /// W(beta) = (1/pi) Tr[rho D(beta) Parity D(beta)^dag].
    pub fn wigner(&self, beta: C64) -> f64 {
        let d = beta - self.center;
        let r2 = d.norm_sqr();
        let p00 = self.rho[0][0].re;
        let p11 = self.rho[1][1].re;
        FRAC_1_PI * (-2.0 * r2).exp() * (p00 + p11 * (4.0 * r2 - 1.0) + 4.0 * (self.rho[0][1] * d).re)
    }

    /// Global maximum of the Wigner function and where it occurs.
    pub fn wigner_max(&self) -> (f64, C64) {
        let a = self.rho[0][0].re - self.rho[1][1].re;
        let p = self.rho[1][1].re;
        let m = self.rho[0][1].norm();
        // Along the best direction W = e^{-2r^2}(a + 4p r^2 + 4m r)/pi.
        let radial = |r: f64| FRAC_1_PI * (-2.0 * r * r).exp() * (a + 4.0 * p * r * r + 4.0 * m * r);
        // Stationary points solve 4p r^3 + 4m r^2 + (a - 2p) r - m = 0.
        let cubic = |r: f64| ((4.0 * p * r + 4.0 * m) * r + (a - 2.0 * p)) * r - m;
        let mut best = (radial(0.0), 0.0);
        let n = 2000;
        let r_max = 4.0;
        let mut prev = cubic(0.0);
        for k in 1..=n {
            let hi = r_max * k as f64 / n as f64;
            let cur = cubic(hi);
            if prev == 0.0 || prev.signum() != cur.signum() {
                let (mut lo_r, mut hi_r) = (hi - r_max / n as f64, hi);
                let mut f_lo = prev;
                for _ in 0..80 {
                    let mid = 0.5 * (lo_r + hi_r);
                    let f_mid = cubic(mid);
                    if (f_mid <= 0.0) == (f_lo <= 0.0) {
                        lo_r = mid;
                        f_lo = f_mid;
                    } else {
                        hi_r = mid;
                    }
                }
                let r = 0.5 * (lo_r + hi_r);
                let w = radial(r);
                if w > best.0 {
                    best = (w, r);
                }
            }
            prev = cur;
        }
        let dir = if m > 0.0 { (self.rho[0][1] / m).conj() } else { C64::new(1.0, 0.0) };
        (best.0, self.center + dir * best.1)
    }

    /// Azimuthal average of W on the circle of radius r around the centre.
    pub fn radial_average(&self, r: f64) -> f64 {
        let (p00, p11) = (self.rho[0][0].re, self.rho[1][1].re);
        FRAC_1_PI * (-2.0 * r * r).exp() * (p00 + p11 * (4.0 * r * r - 1.0))
    }

    /// Radius of the ring where the azimuthal average peaks, when it does so
    /// away from the centre (single-photon weight above a third of the vacuum weight).
    pub fn ring_radius(&self) -> Option<f64> {
        let (p00, p11) = (self.rho[0][0].re, self.rho[1][1].re);
        if 3.0 * p11 <= p00 {
            return None;
        }
        Some((0.5 - (p00 - p11) / (4.0 * p11)).sqrt())
    }
}

pub fn mean_photon_number(state: &FieldState, q: usize) -> Result<f64> {
    Ok(state.reduced(q)?.mean_photon_number())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub q: Vec<usize>,
    /// <Phi_b|n_q|Phi_b> = |N chi_q|^2
    pub n_bonding: Vec<f64>,
    /// Photon added on top of the displaced vacuum, |h1_q|^2.
    pub n_antibonding: Vec<f64>,
    /// Mean photon number of the unconditioned field state.
    pub n_total: Vec<f64>,
    pub population_bonding: f64,
    pub population_antibonding: f64,
}

pub fn spectrum(joint: &JointState) -> Result<SpectrumReport> {
    let energy = joint.to_energy()?;
    let total = FieldState::unconditioned(&energy);
    let qs: Vec<usize> = (1..=energy.modes()).collect();
    let n_total = qs.iter().map(|&q| mean_photon_number(&total, q)).collect::<Result<Vec<_>>>()?;
    let bonding_frame = &energy.first;
    let mut n_bonding = Vec::with_capacity(qs.len());
    let mut n_antibonding = Vec::with_capacity(qs.len());
    for i in 0..qs.len() {
        n_bonding.push(bonding_frame.frame[i].norm_sqr());
        n_antibonding.push(energy.second.single[i].norm_sqr());
    }
    Ok(SpectrumReport {
        q: qs,
        n_bonding,
        n_antibonding,
        n_total,
        population_bonding: energy.probability(ElectronState::Bonding)?,
        population_antibonding: energy.probability(ElectronState::Antibonding)?,
    })
}

/// Plateau and cutoff positions of a harmonic spectrum plus the odd/even
/// dominance of the two components at low order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumStructure {
    /// Last order of the low-frequency plateau.
    pub plateau_break: usize,
    /// Mean log10 level of each plateau segment.
    pub first_level: f64,
    pub second_level: f64,
    /// Last order before the final decline.
    pub cutoff: usize,
    /// (q, n_bonding / n_antibonding) at odd q up to the window.
    pub odd_bonding_ratio: Vec<(usize, f64)>,
    /// (q, n_antibonding / n_bonding) at even q up to the window.
    pub even_antibonding_ratio: Vec<(usize, f64)>,
}

/// Fits log10 of the three-point upper envelope of n_bonding + n_antibonding
/// with a constant first plateau, a sloped second plateau and a sloped
/// decline, and returns the two knots.
pub fn spectrum_structure(report: &SpectrumReport, low_window: usize) -> Result<SpectrumStructure> {
    let n = report.q.len();
    if n < 16 {
        return Err(Error::InvalidParameter("structure analysis needs at least 16 orders".into()));
    }
    let s: Vec<f64> = report.n_bonding.iter().zip(&report.n_antibonding).map(|(b, a)| (b + a).max(1e-300)).collect();
    let u: Vec<f64> = (0..n).map(|i| s[i.saturating_sub(1)].max(s[i]).max(s[(i + 1).min(n - 1)]).log10()).collect();
    let mut pre = vec![(0.0, 0.0); n + 1];
    for i in 0..n {
        pre[i + 1] = (pre[i].0 + u[i], pre[i].1 + u[i] * u[i]);
    }
    let sse_const = |a: usize, b: usize| {
        let m = (b - a) as f64;
        let (s1, s2) = (pre[b].0 - pre[a].0, pre[b].1 - pre[a].1);
        (s2 - s1 * s1 / m, s1 / m)
    };
    // Least-squares line on u[a..b]: (sse, mean).
    let sse_line = |a: usize, b: usize| {
        let m = (b - a) as f64;
        let mx = (a + b - 1) as f64 / 2.0;
        let my = u[a..b].iter().sum::<f64>() / m;
        let (mut sxx, mut sxy) = (0.0, 0.0);
        for (i, y) in u[a..b].iter().enumerate() {
            let dx = (a + i) as f64 - mx;
            sxx += dx * dx;
            sxy += dx * (y - my);
        }
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let e = u[a..b].iter().enumerate().map(|(i, y)| (y - my - slope * ((a + i) as f64 - mx)).powi(2)).sum::<f64>();
        (e, my)
    };
    let tails: Vec<f64> = (0..n).map(|a| sse_line(a, n).0).collect();
    let mut best = (f64::INFINITY, 0, 0, 0.0, 0.0);
    for b in 3..n {
        let (e1, l1) = sse_const(0, b);
        for (c, tail) in tails.iter().enumerate().take(n.saturating_sub(4)).skip(b + 5) {
            let (e2, l2) = sse_line(b, c);
            let e = e1 + e2 + tail;
            if e < best.0 {
                best = (e, b, c, l1, l2);
            }
        }
    }
    let (_, b, c, l1, l2) = best;
    let ratio = |x: f64, y: f64| if y > 0.0 { x / y } else { f64::INFINITY };
    let low = low_window.min(n);
    Ok(SpectrumStructure {
        plateau_break: report.q[b - 1],
        first_level: l1,
        second_level: l2,
        cutoff: report.q[c - 1],
        odd_bonding_ratio: (0..low)
            .filter(|i| report.q[*i] % 2 == 1)
            .map(|i| (report.q[i], ratio(report.n_bonding[i], report.n_antibonding[i])))
            .collect(),
        even_antibonding_ratio: (0..low)
            .filter(|i| report.q[*i] % 2 == 0)
            .map(|i| (report.q[i], ratio(report.n_antibonding[i], report.n_bonding[i])))
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    /// Points per axis.
    pub points: usize,
    /// Half width of the square window in units of beta.
    pub half_width: f64,
}

impl Default for WignerGrid {
    /// 201 x 201 points over four coherent-state widths (sigma = 1/2) each way.
    fn default() -> Self {
        Self { points: 201, half_width: 2.0 }
    }
}

/// Wigner function sampled on a square grid centred on the mode's frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerMap {
    pub q: usize,
    /// Axis samples of beta relative to the frame (real and imaginary parts).
    pub axis: Vec<f64>,
    /// values[i * n + j] = W(frame_offset + axis[j] + i axis[i])
    pub values: Vec<f64>,
    pub frame_offset: C64,
    /// False when the state's peak lies outside the window.
    pub support_inside: bool,
}

impl WignerMap {
    pub fn at(&self, re_idx: usize, im_idx: usize) -> f64 {
        self.values[im_idx * self.axis.len() + re_idx]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Integral over the quadratures x = sqrt2 Re beta, p = sqrt2 Im beta.
    pub fn quadrature_integral(&self) -> f64 {
        let n = self.axis.len();
        if n < 2 {
            return 0.0;
        }
        let h = (self.axis[1] - self.axis[0]) * SQRT_2;
        let w = |i: usize| if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += w(i) * w(j) * self.values[i * n + j];
            }
        }
        s * h * h
    }
}

pub fn wigner_single_mode(state: &FieldState, q: usize, grid: &WignerGrid) -> Result<WignerMap> {
    if grid.points < 2 || !(grid.half_width > 0.0) {
        return Err(Error::InvalidParameter("Wigner grid needs >= 2 points and a positive width".into()));
    }
    let rho = state.reduced(q)?;
    let n = grid.points;
    let axis: Vec<f64> = (0..n).map(|k| -grid.half_width + 2.0 * grid.half_width * k as f64 / (n - 1) as f64).collect();
    let mut values = Vec::with_capacity(n * n);
    for &im in &axis {
        for &re in &axis {
            values.push(rho.wigner(rho.center + C64::new(re, im)));
        }
    }
    let (_, peak) = rho.wigner_max();
    let off = peak - rho.center;
    let support_inside = off.re.abs() <= grid.half_width && off.im.abs() <= grid.half_width;
    Ok(WignerMap { q, axis, values, frame_offset: rho.center, support_inside })
}

pub fn wigner_max(state: &FieldState, q: usize) -> Result<f64> {
    Ok(state.reduced(q)?.wigner_max().0)
}
