//! Uniform 1D grid, wavefunctions on it and the spectral kinetic operator.

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub dx: f64,
    pub absorber_width: f64,
}

impl SpatialGrid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize, absorber_width: f64) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidParameter(format!("bad grid extent [{x_min}, {x_max}]")));
        }
        if n_points < 16 {
            return Err(Error::InvalidParameter(format!("grid needs at least 16 points, got {n_points}")));
        }
        let span = x_max - x_min;
        if !(absorber_width >= 0.0) || absorber_width >= span / 4.0 {
            return Err(Error::InvalidParameter(format!(
                "absorber width {absorber_width} must lie in [0, {})",
                span / 4.0
            )));
        }
        Ok(Self { x_min, x_max, n_points, dx: span / (n_points - 1) as f64, absorber_width })
    }

    /// [-400, 400] a.u., 8192 points, 80 a.u. absorber.
    pub fn reference() -> Self {
        Self::new(-400.0, 400.0, 8192, 80.0).expect("reference grid is valid")
    }

    pub fn symmetric(half_width: f64, n_points: usize, absorber_width: f64) -> Result<Self> {
        Self::new(-half_width, half_width, n_points, absorber_width)
    }

    pub fn is_symmetric(&self) -> bool {
        (self.x_min + self.x_max).abs() <= 1e-12 * self.x_max.abs().max(1.0)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        // Evaluate from the nearer edge so mirrored points are exact negatives.
        if 2 * i < self.n_points {
            self.x_min + i as f64 * self.dx
        } else {
            self.x_max - (self.n_points - 1 - i) as f64 * self.dx
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = 2.0 * PI / (n as f64 * self.dx);
        (0..n).map(|j| if j < n.div_ceil(2) { j as f64 * dk } else { (j as f64 - n as f64) * dk }).collect()
    }

    /// cos^(1/8) mask: one in the interior, falling to zero at both edges.
    pub fn absorber_mask(&self) -> Vec<f64> {
        let w = self.absorber_width;
        (0..self.n_points)
            .map(|i| {
                if w <= 0.0 {
                    return 1.0;
                }
                let x = self.x(i);
                let depth = (self.x_min + w - x).max(x - (self.x_max - w));
                if depth <= 0.0 {
                    1.0
                } else if depth >= w {
                    0.0
                } else {
                    (0.5 * PI * depth / w).cos().powf(0.125)
                }
            })
            .collect()
    }

    /// Stable identifier of the discretisation, used to key caches.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for v in [self.x_min, self.x_max, self.dx, self.absorber_width] {
            h.update(v.to_le_bytes());
        }
        h.update((self.n_points as u64).to_le_bytes());
        hex::encode(&h.finalize()[..8])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    pub amplitudes: Vec<C64>,
}

impl Wavefunction {
    pub fn from_real(values: &[f64]) -> Self {
        Self { amplitudes: values.iter().map(|&v| C64::new(v, 0.0)).collect() }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn inner(&self, other: &Wavefunction, dx: f64) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum::<C64>() * dx
    }

    pub fn norm_sqr(&self, dx: f64) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * dx
    }

    pub fn normalize(&mut self, dx: f64) {
        let n = self.norm_sqr(dx).sqrt();
        for a in &mut self.amplitudes {
            *a /= n;
        }
    }

    /// <self| w(x) |other> for a real multiplicative weight.
    pub fn weighted_inner(&self, other: &Wavefunction, weight: &[f64], dx: f64) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).zip(weight).map(|((a, b), &w)| a.conj() * b * w).sum::<C64>() * dx
    }

    pub fn mirrored(&self) -> Self {
        Self { amplitudes: self.amplitudes.iter().rev().copied().collect() }
    }
}

/// Forward/inverse FFT pair with owned scratch, normalised so that
/// `inverse(forward(v)) == v`.
pub struct Spectral {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<C64>,
    scale: f64,
}

impl Spectral {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Self { forward, inverse, scratch: vec![C64::new(0.0, 0.0); len], scale: 1.0 / n as f64 }
    }

    /// Multiplies `psi` by `factor(k)` in momentum space.
    pub fn apply_diagonal(&mut self, psi: &mut [C64], factor: &[C64]) {
        self.forward.process_with_scratch(psi, &mut self.scratch);
        for (p, f) in psi.iter_mut().zip(factor) {
            *p *= f * self.scale;
        }
        self.inverse.process_with_scratch(psi, &mut self.scratch);
    }

    pub fn apply_diagonal_real(&mut self, psi: &mut [C64], factor: &[f64]) {
        self.forward.process_with_scratch(psi, &mut self.scratch);
        for (p, f) in psi.iter_mut().zip(factor) {
            *p *= f * self.scale;
        }
        self.inverse.process_with_scratch(psi, &mut self.scratch);
    }
}

/// <psi| p^2/2 |psi> evaluated spectrally.
pub fn kinetic_energy(psi: &Wavefunction, grid: &SpatialGrid, spectral: &mut Spectral) -> f64 {
    let ks = grid.wavenumbers();
    let mut tmp = psi.amplitudes.clone();
    let half_k2: Vec<f64> = ks.iter().map(|k| 0.5 * k * k).collect();
    spectral.apply_diagonal_real(&mut tmp, &half_k2);
    psi.inner(&Wavefunction { amplitudes: tmp }, grid.dx).re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_grid_mirrors_exactly() {
        let g = SpatialGrid::reference();
        assert!(g.is_symmetric());
        for i in 0..g.n_points {
            assert_eq!(g.x(i), -g.x(g.n_points - 1 - i));
        }
        assert_eq!(g.x(0), -400.0);
        assert_eq!(g.x(g.n_points - 1), 400.0);
    }

    #[test]
    fn mask_profile() {
        let g = SpatialGrid::new(-100.0, 100.0, 2048, 20.0).unwrap();
        let m = g.absorber_mask();
        assert_eq!(m[0], 0.0);
        assert_eq!(m[1024], 1.0);
        assert!(m.iter().all(|v| (0.0..=1.0).contains(v)));
        // Monotone inside the left absorber.
        let edge = (20.0 / g.dx) as usize;
        assert!(m[..edge].windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn absorber_too_wide_rejected() {
        assert!(SpatialGrid::new(-10.0, 10.0, 64, 5.0).is_err());
        assert!(SpatialGrid::new(10.0, -10.0, 64, 1.0).is_err());
    }

    #[test]
    fn spectral_roundtrip_and_gaussian_kinetic_energy() {
        let g = SpatialGrid::new(-40.0, 40.0, 1024, 0.0).unwrap();
        let mut s = Spectral::new(g.n_points);
        let sigma: f64 = 1.3;
        let mut psi =
            Wavefunction::from_real(&g.xs().iter().map(|x| (-x * x / (4.0 * sigma * sigma)).exp()).collect::<Vec<_>>());
        psi.normalize(g.dx);
        let mut copy = psi.amplitudes.clone();
        s.apply_diagonal_real(&mut copy, &vec![1.0; g.n_points]);
        for (a, b) in copy.iter().zip(&psi.amplitudes) {
            assert!((a - b).norm() < 1e-13);
        }
        // <p^2>/2 = 1/(8 sigma^2) for this Gaussian.
        let t = kinetic_energy(&psi, &g, &mut s);
        assert!((t - 1.0 / (8.0 * sigma * sigma)).abs() < 1e-10, "{t}");
    }
}
