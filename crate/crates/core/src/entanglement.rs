//! Electron-field entropy, frequency-partition entropy and the
//! log-negativity bound for the unconditioned field state.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle;
use crate::state::{ElectronBasis, FieldComponent, JointState};

const CLIP: f64 = 1e-12;

/// Hermitian, unit-trace 2x2 density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitDensity {
    pub m: [[C64; 2]; 2],
    pub basis: ElectronBasis,
}

impl QubitDensity {
    pub fn new(m: [[C64; 2]; 2], basis: ElectronBasis) -> Result<Self> {
        let tr = m[0][0].re + m[1][1].re;
        if (tr - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("density trace is {tr}, expected 1")));
        }
        if (m[0][1] - m[1][0].conj()).norm() > 1e-12 || m[0][0].im.abs() > 1e-12 || m[1][1].im.abs() > 1e-12 {
            return Err(Error::InvalidParameter("density matrix is not Hermitian".into()));
        }
        Ok(Self { m, basis })
    }

    pub fn diagonal(p0: f64, p1: f64) -> Result<Self> {
        let z = C64::new(0.0, 0.0);
        Self::new([[C64::new(p0, 0.0), z], [z, C64::new(p1, 0.0)]], ElectronBasis::Energy)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        hermitian2_eigenvalues(self.m[0][0].re, self.m[1][1].re, self.m[0][1])
    }
}

fn hermitian2_eigenvalues(a: f64, d: f64, b: C64) -> [f64; 2] {
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = (half * half + b.norm_sqr()).sqrt();
    [mean - r, mean + r]
}

/// -sum p log2 p with 0 log 0 = 0; tiny negative eigenvalues are clipped.
pub fn entropy_of(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < -CLIP {
            return Err(Error::NegativeEigenvalue(l));
        }
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s.max(0.0))
}

pub fn von_neumann_entropy(rho: &QubitDensity) -> Result<f64> {
    entropy_of(&rho.eigenvalues())
}

/// Reduced electronic state with the field traced out, in the joint state's basis.
pub fn electron_reduced_density(joint: &JointState) -> Result<QubitDensity> {
    QubitDensity::new(joint.electron_matrix()?, joint.basis)
}

pub fn electron_entropy(joint: &JointState) -> Result<f64> {
    von_neumann_entropy(&electron_reduced_density(joint)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionSpec {
    /// A = {q <= split}, B = {q > split}.
    Split(usize),
    /// A = {q}, B = every other mode.
    Single(usize),
}

impl PartitionSpec {
    pub fn in_a(&self, q: usize) -> bool {
        match *self {
            PartitionSpec::Split(s) => q <= s,
            PartitionSpec::Single(s) => q == s,
        }
    }

    fn validate(&self, q_cutoff: usize) -> Result<()> {
        let ok = match *self {
            PartitionSpec::Split(s) => s >= 1 && s < q_cutoff,
            PartitionSpec::Single(s) => s >= 1 && s <= q_cutoff,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("partition {self:?} is invalid for {q_cutoff} modes")))
        }
    }
}

/// Normalised state sqrt(N_A)|1_A 0_B> + sqrt(N_B)|0_A 1_B> + c|0_A 0_B>.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoQubitState {
    pub sqrt_na: f64,
    pub sqrt_nb: f64,
    pub vacuum: C64,
}

impl TwoQubitState {
    /// Reduced state of A on {|0_A>, |1_A>}.
    pub fn reduced_a(&self) -> [[C64; 2]; 2] {
        let c = self.vacuum;
        [
            [C64::new(self.sqrt_nb.powi(2) + c.norm_sqr(), 0.0), c * self.sqrt_na],
            [c.conj() * self.sqrt_na, C64::new(self.sqrt_na.powi(2), 0.0)],
        ]
    }

    /// Product of the two Schmidt coefficients.
    pub fn schmidt_product(&self) -> f64 {
        self.sqrt_na * self.sqrt_nb
    }

    pub fn entropy(&self) -> Result<f64> {
        let r = self.reduced_a();
        entropy_of(&hermitian2_eigenvalues(r[0][0].re, r[1][1].re, r[0][1]))
    }
}

/// Groups the photon amplitudes of a field state into the two sets of a partition.
pub fn partition_state(field: &FieldComponent, spec: PartitionSpec) -> Result<TwoQubitState> {
    spec.validate(field.modes())?;
    let (mut na, mut nb) = (0.0, 0.0);
    for (i, s) in field.single.iter().enumerate() {
        if spec.in_a(i + 1) {
            na += s.norm_sqr();
        } else {
            nb += s.norm_sqr();
        }
    }
    let total = na + nb + field.vacuum.norm_sqr();
    if !(total > 0.0) {
        return Err(Error::ZeroProbability);
    }
    Ok(TwoQubitState {
        sqrt_na: (na / total).sqrt(),
        sqrt_nb: (nb / total).sqrt(),
        vacuum: field.vacuum / total.sqrt(),
    })
}

pub fn partition_entropy(field: &FieldComponent, spec: PartitionSpec) -> Result<f64> {
    partition_state(field, spec)?.entropy()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LognegBound {
    pub value: f64,
    /// Set when the antibonding component vanishes and the bound is trivially zero.
    pub zero_antibonding: bool,
}

/// log2(1 + 2 s1 s2) for the normalised antibonding component, mode q vs the rest.
pub fn logneg_lower_bound(joint: &JointState, q: usize) -> Result<LognegBound> {
    let energy = joint.to_energy()?;
    if energy.second.norm_sqr() == 0.0 {
        return Ok(LognegBound { value: 0.0, zero_antibonding: true });
    }
    let two = partition_state(&energy.second, PartitionSpec::Single(q))?;
    Ok(LognegBound { value: (1.0 + 2.0 * two.schmidt_product()).log2(), zero_antibonding: false })
}

/// Exact log-negativity of the unconditioned field state, mode q vs the rest,
/// from a dense partial transpose. Only for a handful of modes.
pub fn brute_force_logneg(joint: &JointState, q: usize, fock_cutoff: usize) -> Result<f64> {
    if joint.modes() > 4 || fock_cutoff > 4 {
        return Err(Error::OracleGuard(format!(
            "dense log-negativity needs <= 4 modes and cutoff <= 4 (got {} modes, cutoff {fock_cutoff})",
            joint.modes()
        )));
    }
    let energy = joint.to_energy()?;
    let rho = oracle::dense_mixture(&[&energy.first, &energy.second], fock_cutoff)?;
    let negativity = oracle::partial_transpose_negativity(&rho, energy.modes(), fock_cutoff, &[q])?;
    Ok((2.0 * negativity + 1.0).log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    ElectronEntropyVsMolecules,
    ElectronEntropyVsDistance,
    PartitionEntropy,
    LognegBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub kind: ReportKind,
    pub sweep: Vec<f64>,
    pub values: Vec<f64>,
    pub r_au: Option<f64>,
    pub n_mol: Option<u64>,
    pub label: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_examples() {
        assert_eq!(von_neumann_entropy(&QubitDensity::diagonal(1.0, 0.0).unwrap()).unwrap(), 0.0);
        assert!((von_neumann_entropy(&QubitDensity::diagonal(0.5, 0.5).unwrap()).unwrap() - 1.0).abs() < 1e-15);
        let s = von_neumann_entropy(&QubitDensity::diagonal(0.9, 0.1).unwrap()).unwrap();
        assert!((s - 0.4690).abs() < 5e-5, "{s}");
    }

    #[test]
    fn clipping_and_rejection() {
        assert_eq!(entropy_of(&[1.0 + 5e-13, -5e-13]).unwrap(), 0.0);
        assert!(matches!(entropy_of(&[1.1, -0.1]), Err(Error::NegativeEigenvalue(_))));
    }

    #[test]
    fn partition_examples() {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let all_a = FieldComponent { frame: vec![z; 3], single: vec![o, o, z], vacuum: z };
        assert!(partition_entropy(&all_a, PartitionSpec::Split(2)).unwrap().abs() < 1e-15);
        let bell = FieldComponent { frame: vec![z; 2], single: vec![o, o], vacuum: z };
        assert!((partition_entropy(&bell, PartitionSpec::Split(1)).unwrap() - 1.0).abs() < 1e-15);
        assert!(partition_state(&bell, PartitionSpec::Split(2)).is_err());
        let empty = FieldComponent { frame: vec![z; 2], single: vec![z, z], vacuum: z };
        assert!(matches!(partition_state(&empty, PartitionSpec::Split(1)), Err(Error::ZeroProbability)));
    }

    #[test]
    fn bound_examples() {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        let joint = |single: Vec<C64>, vacuum: C64| {
            let n = single.len();
            let second = FieldComponent { frame: vec![z; n], single, vacuum };
            JointState {
                basis: ElectronBasis::Energy,
                first: FieldComponent::displaced_vacuum(vec![z; n]),
                total_norm: 1.0 + second.norm_sqr(),
                second,
                global_phase: 0.0,
            }
        };
        let product = joint(vec![o, z, z], z);
        assert!(logneg_lower_bound(&product, 1).unwrap().value.abs() < 1e-15);
        let bell = joint(vec![o, o, z], z);
        assert!((logneg_lower_bound(&bell, 1).unwrap().value - 1.0).abs() < 1e-15);
        let none = joint(vec![z, z, z], z);
        let b = logneg_lower_bound(&none, 1).unwrap();
        assert!(b.zero_antibonding && b.value == 0.0);
    }
}
