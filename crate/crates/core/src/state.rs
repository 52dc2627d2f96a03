//! Field states after the pulse and the joint electron-field state.
//!
//! Every field state handled here has the rank-one structure
//! D(frame) (sum_q s_q |1_q> + v |0>), so it is stored as the frame, the
//! single-photon amplitudes and the vacuum amplitude. Nothing is ever
//! expanded into a Fock tensor.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::integrals::{DisplacementSet, TransitionAmplitudes};

/// D(chi)|0>, carrying the global phase of the bonding path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacedVacuum {
    pub chi: Vec<C64>,
    pub global_phase: f64,
}

/// D(chi_frame)(sum_q h1_q |1_q> + H2 |0>), unnormalised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonAddedState {
    pub chi_frame: Vec<C64>,
    pub h1: Vec<C64>,
    #[serde(rename = "H2")]
    pub big_h2: C64,
    pub norm_na: f64,
}

impl PhotonAddedState {
    pub fn new(chi_frame: Vec<C64>, h1: Vec<C64>, big_h2: C64) -> Result<Self> {
        if chi_frame.len() != h1.len() {
            return Err(Error::ModeMismatch { expected: chi_frame.len(), found: h1.len() });
        }
        let norm_na = h1.iter().map(|z| z.norm_sqr()).sum::<f64>() + big_h2.norm_sqr();
        Ok(Self { chi_frame, h1, big_h2, norm_na })
    }
}

/// General member of the rank-one family: D(frame)(sum_q single_q |1_q> + vacuum |0>).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldComponent {
    pub frame: Vec<C64>,
    pub single: Vec<C64>,
    pub vacuum: C64,
}

impl FieldComponent {
    pub fn displaced_vacuum(frame: Vec<C64>) -> Self {
        let n = frame.len();
        Self { frame, single: vec![C64::new(0.0, 0.0); n], vacuum: C64::new(1.0, 0.0) }
    }

    pub fn modes(&self) -> usize {
        self.frame.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.single.iter().map(|z| z.norm_sqr()).sum::<f64>() + self.vacuum.norm_sqr()
    }

    /// <self|other>; both must share the same displacement frame.
    pub fn inner(&self, other: &FieldComponent) -> Result<C64> {
        self.check_frame(other)?;
        Ok(self.single.iter().zip(&other.single).map(|(a, b)| a.conj() * b).sum::<C64>()
            + self.vacuum.conj() * other.vacuum)
    }

    fn check_frame(&self, other: &FieldComponent) -> Result<()> {
        if self.modes() != other.modes() {
            return Err(Error::ModeMismatch { expected: self.modes(), found: other.modes() });
        }
        let same = self.frame.iter().zip(&other.frame).all(|(a, b)| (a - b).norm() <= 1e-12 * (1.0 + a.norm()));
        if !same {
            return Err(Error::InvalidParameter("components live in different displacement frames".into()));
        }
        Ok(())
    }

    /// a x + b y in a shared frame.
    pub fn combine(a: C64, x: &FieldComponent, b: C64, y: &FieldComponent) -> Result<FieldComponent> {
        x.check_frame(y)?;
        Ok(FieldComponent {
            frame: x.frame.clone(),
            single: x.single.iter().zip(&y.single).map(|(p, q)| a * p + b * q).collect(),
            vacuum: a * x.vacuum + b * y.vacuum,
        })
    }

    pub fn scaled(&self, c: C64) -> FieldComponent {
        FieldComponent {
            frame: self.frame.clone(),
            single: self.single.iter().map(|z| z * c).collect(),
            vacuum: self.vacuum * c,
        }
    }

    pub fn normalized(&self) -> Result<FieldComponent> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(Error::ZeroProbability);
        }
        Ok(self.scaled(C64::new(1.0 / n.sqrt(), 0.0)))
    }
}

impl From<&DisplacedVacuum> for FieldComponent {
    fn from(v: &DisplacedVacuum) -> Self {
        FieldComponent::displaced_vacuum(v.chi.clone())
    }
}

impl From<&PhotonAddedState> for FieldComponent {
    fn from(p: &PhotonAddedState) -> Self {
        FieldComponent { frame: p.chi_frame.clone(), single: p.h1.clone(), vacuum: p.big_h2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElectronBasis {
    /// (bonding, antibonding)
    Energy,
    /// (right-localised, left-localised)
    Localized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElectronState {
    Bonding,
    Antibonding,
    Right,
    Left,
}

impl ElectronState {
    fn basis(self) -> (ElectronBasis, usize) {
        match self {
            ElectronState::Bonding => (ElectronBasis::Energy, 0),
            ElectronState::Antibonding => (ElectronBasis::Energy, 1),
            ElectronState::Right => (ElectronBasis::Localized, 0),
            ElectronState::Left => (ElectronBasis::Localized, 1),
        }
    }
}

/// |e_1>|first> + |e_2>|second>, divided by sqrt(total_norm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointState {
    pub basis: ElectronBasis,
    pub first: FieldComponent,
    pub second: FieldComponent,
    pub total_norm: f64,
    /// Common phase of both components; never affects observables.
    pub global_phase: f64,
}

/// Energy-basis joint state from the bonding displacement and the transition amplitudes.
pub fn assemble_joint(chi_b: &DisplacementSet, amps: &TransitionAmplitudes) -> Result<JointState> {
    let q = chi_b.chi.len();
    for len in [amps.h1.len(), amps.h2.len()] {
        if len != q {
            return Err(Error::ModeMismatch { expected: q, found: len });
        }
    }
    let vacuum = DisplacedVacuum { chi: chi_b.chi.clone(), global_phase: chi_b.phase_phi };
    let added = PhotonAddedState::new(chi_b.chi.clone(), amps.h1.clone(), amps.big_h2)?;
    Ok(JointState {
        basis: ElectronBasis::Energy,
        first: (&vacuum).into(),
        second: (&added).into(),
        total_norm: 1.0 + added.norm_na,
        global_phase: chi_b.phase_phi,
    })
}

impl JointState {
    pub fn modes(&self) -> usize {
        self.first.modes()
    }

    /// Unnormalised field component attached to one electronic state.
    pub fn component(&self, which: ElectronState) -> Result<FieldComponent> {
        let (basis, idx) = which.basis();
        let state = if basis == self.basis { self.clone() } else { self.switch_basis()? };
        Ok(if idx == 0 { state.first } else { state.second })
    }

    /// Rotation (e1 +- e2)/sqrt2 between energy and localised bases; its own inverse.
    pub fn switch_basis(&self) -> Result<JointState> {
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        let first = FieldComponent::combine(s, &self.first, s, &self.second)?;
        let second = FieldComponent::combine(s, &self.first, -s, &self.second)?;
        let basis = match self.basis {
            ElectronBasis::Energy => ElectronBasis::Localized,
            ElectronBasis::Localized => ElectronBasis::Energy,
        };
        Ok(JointState { basis, first, second, total_norm: self.total_norm, global_phase: self.global_phase })
    }

    pub fn to_localized(&self) -> Result<JointState> {
        match self.basis {
            ElectronBasis::Energy => self.switch_basis(),
            ElectronBasis::Localized => Ok(self.clone()),
        }
    }

    pub fn to_energy(&self) -> Result<JointState> {
        match self.basis {
            ElectronBasis::Localized => self.switch_basis(),
            ElectronBasis::Energy => Ok(self.clone()),
        }
    }

    /// Probability of finding the electron in `which`.
    pub fn probability(&self, which: ElectronState) -> Result<f64> {
        Ok(self.component(which)?.norm_sqr() / self.total_norm)
    }

    /// Field state after projecting the electron onto `which`, normalised.
    pub fn condition(&self, which: ElectronState) -> Result<FieldComponent> {
        self.component(which)?.normalized()
    }

    /// Antibonding component normalised to one.
    pub fn normalized_antibonding(&self) -> Result<FieldComponent> {
        self.condition(ElectronState::Antibonding)
    }

    /// Antibonding norm N_a in the energy basis.
    pub fn norm_na(&self) -> Result<f64> {
        Ok(self.component(ElectronState::Antibonding)?.norm_sqr())
    }

    /// Electron-state Gram matrix element rho_ij = <Phi_j|Phi_i> / total_norm.
    pub fn electron_matrix(&self) -> Result<[[C64; 2]; 2]> {
        let comps = [&self.first, &self.second];
        let mut m = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = comps[j].inner(comps[i])? / self.total_norm;
            }
        }
        Ok(m)
    }

    /// Multiplies one component by a phase, for covariance checks.
    pub fn with_component_phase(&self, second: bool, phase: f64) -> JointState {
        let mut out = self.clone();
        let c = C64::from_polar(1.0, phase);
        if second {
            out.second = out.second.scaled(c);
        } else {
            out.first = out.first.scaled(c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::DiagonalElement;

    fn toy() -> JointState {
        let chi_b = DisplacementSet {
            chi: vec![C64::new(0.3, -0.1), C64::new(-0.2, 0.4), C64::new(0.05, 0.0)],
            phase_phi: 0.7,
            source: DiagonalElement::Bonding,
            n_mol: 1,
        };
        let amps = TransitionAmplitudes::from_parts(
            vec![C64::new(0.1, 0.2), C64::new(-0.3, 0.05), C64::new(0.0, 0.15)],
            vec![C64::new(0.02, -0.01), C64::new(0.01, 0.03), C64::new(-0.02, 0.0)],
            1,
        );
        assemble_joint(&chi_b, &amps).unwrap()
    }

    #[test]
    fn zero_amplitudes_give_product_state() {
        let chi_b = DisplacementSet {
            chi: vec![C64::new(1.0, 0.0); 2],
            phase_phi: 0.0,
            source: DiagonalElement::Bonding,
            n_mol: 1,
        };
        let j = assemble_joint(&chi_b, &TransitionAmplitudes::zeros(2, 1)).unwrap();
        assert_eq!(j.total_norm, 1.0);
        assert!(matches!(j.condition(ElectronState::Antibonding), Err(Error::ZeroProbability)));
        assert_eq!(j.condition(ElectronState::Bonding).unwrap(), FieldComponent::displaced_vacuum(chi_b.chi.clone()));
        let loc = j.to_localized().unwrap();
        let r = loc.first.clone();
        assert!((r.vacuum - C64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert_eq!(loc.first, loc.second);
    }

    #[test]
    fn antibonding_population_matches_norm_identity() {
        let j = toy();
        let na = j.norm_na().unwrap();
        let p = j.probability(ElectronState::Antibonding).unwrap();
        assert!((p - na / (1.0 + na)).abs() < 1e-15);
        let total: f64 =
            [ElectronState::Bonding, ElectronState::Antibonding].iter().map(|&s| j.probability(s).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-14);
        let total: f64 = [ElectronState::Right, ElectronState::Left].iter().map(|&s| j.probability(s).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn basis_change_is_an_involution() {
        let j = toy();
        let back = j.switch_basis().unwrap().switch_basis().unwrap();
        assert_eq!(back.basis, ElectronBasis::Energy);
        for (a, b) in j.second.single.iter().zip(&back.second.single) {
            assert!((a - b).norm() < 1e-14);
        }
        assert!((j.second.vacuum - back.second.vacuum).norm() < 1e-14);
        assert!((j.first.vacuum - back.first.vacuum).norm() < 1e-14);
    }

    #[test]
    fn overlap_identity_recovers_h2() {
        let j = toy();
        let na = j.norm_na().unwrap();
        let phi_b = j.component(ElectronState::Bonding).unwrap();
        let phi_a = j.normalized_antibonding().unwrap();
        let lhs = phi_b.inner(&phi_a).unwrap() * na.sqrt();
        assert!((lhs - j.second.vacuum).norm() < 1e-15);
    }

    #[test]
    fn localized_conditioning_shifts_vacuum_amplitude() {
        let j = toy();
        let r = j.component(ElectronState::Right).unwrap().scaled(C64::new(2f64.sqrt(), 0.0));
        let h2 = j.second.vacuum;
        assert!((r.vacuum - (C64::new(1.0, 0.0) + h2)).norm() < 1e-14);
        for (a, b) in r.single.iter().zip(&j.second.single) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
