//! Dense Fock-space reference implementations for a few modes.
//!
//! Slow and independent of the closed forms elsewhere in the crate; used to
//! check them. States are tensors over `modes` modes with levels
//! 0..=cutoff; mode 1 is the fastest-varying index.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_PI;

use crate::entanglement::{self, entropy_of, PartitionSpec};
use crate::error::{Error, Result};
use crate::integrals::{DiagonalElement, DisplacementSet, TransitionAmplitudes};
use crate::observables::FieldState;
use crate::state::{assemble_joint, FieldComponent, JointState};

pub const MAX_MODES: usize = 4;
pub const MAX_CUTOFF: usize = 8;
/// Largest working dimension for displacement operators applied to low-lying states.
const MAX_PADDED_DIM: usize = 200;

/// Levels needed so that D(delta) acting on the first `d` levels is not
/// affected by truncating the generator.
fn padded_dim(d: usize, delta: f64) -> usize {
    // Photon distribution of D|k> is centred at |delta|^2 with width ~|delta|.
    (d + 24 + (delta * delta + 10.0 * delta).ceil() as usize).min(MAX_PADDED_DIM)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameHandling {
    /// Keep the displacement as a separate record (exact).
    Record,
    /// Multiply the truncated displacement operators into the tensor.
    Apply,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    pub modes: usize,
    pub cutoff: usize,
    pub coeffs: Vec<C64>,
    /// Displacement still to be applied, when recorded rather than applied.
    pub frame: Option<Vec<C64>>,
    /// Largest ||D^dag D - 1|| among the operators that were applied.
    pub unitarity_defect: f64,
}

impl DenseState {
    pub fn dim(&self) -> usize {
        (self.cutoff + 1).pow(self.modes as u32)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    fn frame_of(&self, q: usize) -> C64 {
        self.frame.as_ref().map_or(C64::new(0.0, 0.0), |f| f[q - 1])
    }
}

fn check_guards(modes: usize, cutoff: usize) -> Result<()> {
    if modes == 0 || modes > MAX_MODES {
        return Err(Error::OracleGuard(format!("mode count {modes} outside 1..={MAX_MODES}")));
    }
    if cutoff == 0 || cutoff > MAX_CUTOFF {
        return Err(Error::OracleGuard(format!("Fock cutoff {cutoff} outside 1..={MAX_CUTOFF}")));
    }
    Ok(())
}

/// Truncated annihilation operator on levels 0..dim.
pub fn annihilation(dim: usize) -> DMatrix<C64> {
    DMatrix::from_fn(dim, dim, |i, j| if j == i + 1 { C64::new((j as f64).sqrt(), 0.0) } else { C64::new(0.0, 0.0) })
}

/// exp(alpha a^dag - alpha^* a) on `dim` levels and its unitarity defect.
pub fn displacement_matrix(alpha: C64, dim: usize) -> (DMatrix<C64>, f64) {
    let a = annihilation(dim);
    let gen = a.adjoint() * alpha - &a * alpha.conj();
    let d = gen.exp();
    let defect = (d.adjoint() * &d - DMatrix::identity(dim, dim)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    (d, defect)
}

/// Applies a single-mode matrix along mode q of a tensor.
fn apply_on_mode(coeffs: &[C64], modes: usize, cutoff: usize, q: usize, m: &DMatrix<C64>) -> Vec<C64> {
    let d = cutoff + 1;
    let stride = d.pow((q - 1) as u32);
    let mut out = vec![C64::new(0.0, 0.0); coeffs.len()];
    let total = d.pow(modes as u32);
    for base in 0..total {
        if (base / stride) % d != 0 {
            continue;
        }
        for i in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..d {
                acc += m[(i, j)] * coeffs[base + j * stride];
            }
            out[base + i * stride] = acc;
        }
    }
    out
}

/// Dense tensor of a rank-one field state.
pub fn densify(c: &FieldComponent, cutoff: usize, handling: FrameHandling) -> Result<DenseState> {
    let modes = c.modes();
    check_guards(modes, cutoff)?;
    let d = cutoff + 1;
    let mut coeffs = vec![C64::new(0.0, 0.0); d.pow(modes as u32)];
    coeffs[0] = c.vacuum;
    for (i, s) in c.single.iter().enumerate() {
        coeffs[d.pow(i as u32)] += s;
    }
    match handling {
        FrameHandling::Record => {
            Ok(DenseState { modes, cutoff, coeffs, frame: Some(c.frame.clone()), unitarity_defect: 0.0 })
        }
        FrameHandling::Apply => {
            let mut defect: f64 = 0.0;
            for (i, alpha) in c.frame.iter().enumerate() {
                if alpha.norm() > cutoff as f64 / 3.0 {
                    return Err(Error::OracleGuard(format!(
                        "|displacement| {} too large for cutoff {cutoff}",
                        alpha.norm()
                    )));
                }
                if alpha.norm() == 0.0 {
                    continue;
                }
                let (dm, err) = displacement_matrix(*alpha, d);
                defect = defect.max(err);
                coeffs = apply_on_mode(&coeffs, modes, cutoff, i + 1, &dm);
            }
            if defect > 1e-8 {
                return Err(Error::OracleGuard(format!("displacement unitarity defect {defect:e}")));
            }
            Ok(DenseState { modes, cutoff, coeffs, frame: None, unitarity_defect: defect })
        }
    }
}

/// Reduced density matrix of the kept modes (in ascending order), in the
/// tensor's own frame.
pub fn dense_reduced(state: &DenseState, keep: &[usize]) -> DMatrix<C64> {
    let d = state.cutoff + 1;
    let kd = d.pow(keep.len() as u32);
    let digits = |idx: usize| -> Vec<usize> { (0..state.modes).map(|m| (idx / d.pow(m as u32)) % d).collect() };
    let mut rho = DMatrix::zeros(kd, kd);
    let norm = state.norm_sqr();
    // Group coefficients by the traced-out digits.
    let dim = state.dim();
    let mut groups: std::collections::BTreeMap<Vec<usize>, Vec<(usize, C64)>> = Default::default();
    for idx in 0..dim {
        let c = state.coeffs[idx];
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let dg = digits(idx);
        let mut kept = 0;
        let mut rest = Vec::new();
        for (m, &v) in dg.iter().enumerate() {
            if let Some(pos) = keep.iter().position(|&k| k == m + 1) {
                kept += v * d.pow(pos as u32);
            } else {
                rest.push(v);
            }
        }
        groups.entry(rest).or_default().push((kept, c));
    }
    for entries in groups.values() {
        for &(i, a) in entries {
            for &(j, b) in entries {
                rho[(i, j)] += a * b.conj() / norm;
            }
        }
    }
    rho
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DenseOperator {
    Number(usize),
    Parity(usize),
    /// D(beta) Parity D(beta)^dag on one mode, beta in the lab frame.
    DisplacedParity(usize, C64),
}

/// Expectation value of a single-mode operator in the lab frame.
pub fn dense_expectation(state: &DenseState, op: DenseOperator) -> Result<f64> {
    let q = match op {
        DenseOperator::Number(q) | DenseOperator::Parity(q) | DenseOperator::DisplacedParity(q, _) => q,
    };
    if q == 0 || q > state.modes {
        return Err(Error::ModeOutOfRange { q, q_cutoff: state.modes });
    }
    let rho = dense_reduced(state, &[q]);
    let d = state.cutoff + 1;
    let shift = state.frame_of(q);
    match op {
        DenseOperator::Number(_) => {
            let a = annihilation(d) + DMatrix::identity(d, d) * shift;
            Ok((rho * a.adjoint() * a).trace().re)
        }
        DenseOperator::Parity(_) => displaced_parity(&rho, -shift),
        DenseOperator::DisplacedParity(_, beta) => displaced_parity(&rho, beta - shift),
    }
}

/// Tr[rho D(delta) Parity D(delta)^dag] with the operator built on a padded space.
fn displaced_parity(rho: &DMatrix<C64>, delta: C64) -> Result<f64> {
    let d = rho.nrows();
    let k = padded_dim(d, delta.norm());
    if k == MAX_PADDED_DIM {
        return Err(Error::OracleGuard(format!("|beta - center| = {} too large for the dense parity", delta.norm())));
    }
    let a = annihilation(k);
    let gen = a.adjoint() * delta - &a * delta.conj();
    // Only the first d rows of D are needed: <m|D P D^dag|n> for m, n < d.
    let rows = gen.exp().rows(0, d).into_owned();
    let defect = (&rows * rows.adjoint() - DMatrix::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if defect > 1e-8 {
        return Err(Error::OracleGuard(format!("displacement unitarity defect {defect:e}")));
    }
    let mut signed = rows.clone();
    for (j, mut col) in signed.column_iter_mut().enumerate() {
        if j % 2 == 1 {
            col.neg_mut();
        }
    }
    let block = signed * rows.adjoint();
    Ok((rho * block).trace().re)
}

/// Wigner function (1/pi) <D Parity D^dag> of mode q at lab-frame beta.
pub fn dense_wigner(state: &DenseState, q: usize, beta: C64) -> Result<f64> {
    Ok(FRAC_1_PI * dense_expectation(state, DenseOperator::DisplacedParity(q, beta))?)
}

/// Normalised density matrix sum_k |c_k><c_k| / sum_k <c_k|c_k> in the common frame.
pub fn dense_mixture(components: &[&FieldComponent], cutoff: usize) -> Result<DMatrix<C64>> {
    let first = components.first().ok_or_else(|| Error::OracleGuard("empty mixture".into()))?;
    check_guards(first.modes(), cutoff)?;
    let dim = (cutoff + 1).pow(first.modes() as u32);
    let mut rho = DMatrix::zeros(dim, dim);
    let mut total = 0.0;
    for c in components {
        let s = densify(c, cutoff, FrameHandling::Record)?;
        let v = nalgebra::DVector::from_vec(s.coeffs);
        rho += &v * v.adjoint();
        total += c.norm_sqr();
    }
    if !(total > 0.0) {
        return Err(Error::ZeroProbability);
    }
    Ok(rho / C64::new(total, 0.0))
}

/// Sum of |negative eigenvalues| of rho after transposing the listed modes.
pub fn partial_transpose_negativity(
    rho: &DMatrix<C64>,
    modes: usize,
    cutoff: usize,
    transpose: &[usize],
) -> Result<f64> {
    let d = cutoff + 1;
    let dim = d.pow(modes as u32);
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::OracleGuard(format!("density is {}x{}, expected {dim}", rho.nrows(), rho.ncols())));
    }
    let swap = |i: usize, j: usize| -> (usize, usize) {
        let (mut ni, mut nj) = (i, j);
        for &q in transpose {
            let s = d.pow((q - 1) as u32);
            let (di, dj) = ((i / s) % d, (j / s) % d);
            ni = ni - di * s + dj * s;
            nj = nj - dj * s + di * s;
        }
        (ni, nj)
    };
    let pt = DMatrix::from_fn(dim, dim, |i, j| {
        let (a, b) = swap(i, j);
        rho[(a, b)]
    });
    let eig = pt.symmetric_eigenvalues();
    Ok(eig.iter().filter(|&&l| l < 0.0).map(|l| -l).sum())
}

pub fn dense_entropy(rho: &DMatrix<C64>) -> Result<f64> {
    let eig: Vec<f64> = rho.clone().symmetric_eigenvalues().iter().copied().collect();
    entropy_of(&eig)
}

/// Electron reduced density from dense field vectors.
pub fn dense_electron_density(joint: &JointState, cutoff: usize) -> Result<[[C64; 2]; 2]> {
    let a = densify(&joint.first, cutoff, FrameHandling::Record)?;
    let b = densify(&joint.second, cutoff, FrameHandling::Record)?;
    let vecs = [&a.coeffs, &b.coeffs];
    let mut m = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = vecs[j].iter().zip(vecs[i]).map(|(x, y)| x.conj() * y).sum::<C64>() / joint.total_norm;
        }
    }
    Ok(m)
}

/// Partition entropy of a pure field state from a dense partial trace.
pub fn dense_partition_entropy(field: &FieldComponent, spec: PartitionSpec, cutoff: usize) -> Result<f64> {
    let s = densify(&field.normalized()?, cutoff, FrameHandling::Record)?;
    let keep: Vec<usize> = (1..=s.modes).filter(|&q| spec.in_a(q)).collect();
    dense_entropy(&dense_reduced(&s, &keep))
}

/// log2(2 N + 1) of the normalised antibonding component, mode q vs the rest.
pub fn dense_component_logneg(field: &FieldComponent, q: usize, cutoff: usize) -> Result<f64> {
    let normalized = field.normalized()?;
    let rho = dense_mixture(&[&normalized], cutoff)?;
    let n = partial_transpose_negativity(&rho, field.modes(), cutoff, &[q])?;
    Ok((2.0 * n + 1.0).log2())
}

/// Random joint state: displacements inside |chi| <= chi_max, O(1) amplitudes.
pub fn random_toy_joint(rng: &mut ChaCha8Rng, modes: usize, chi_max: f64) -> JointState {
    let mut disk = |r: f64| {
        let rad = r * rng.random::<f64>().sqrt();
        C64::from_polar(rad, rng.random::<f64>() * std::f64::consts::TAU)
    };
    let chi: Vec<C64> = (0..modes).map(|_| disk(chi_max)).collect();
    let h1: Vec<C64> = (0..modes).map(|_| disk(1.0)).collect();
    let h2: Vec<C64> = (0..modes).map(|_| disk(0.6)).collect();
    let set = DisplacementSet { chi, phase_phi: 0.0, source: DiagonalElement::Bonding, n_mol: 1 };
    assemble_joint(&set, &TransitionAmplitudes::from_parts(h1, h2, 1)).expect("consistent lengths")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub id: String,
    pub description: String,
    pub expected: f64,
    pub oracle: f64,
}

impl CaseResult {
    pub fn abs_diff(&self) -> f64 {
        (self.expected - self.oracle).abs()
    }
}

pub const CASE_IDS: &[&str] = &[
    "vacuum-tensor",
    "single-photon-tensor",
    "coherent-poisson",
    "coherent-number",
    "vacuum-number",
    "single-photon-parity",
    "photon-plus-vacuum-number",
    "coherent-wigner-max",
    "entropy-diag-0.9",
    "bell-negativity",
    "product-negativity",
    "random-rank2-negativity",
];

/// Recomputes one of the tagged reference examples with the dense oracle.
pub fn run_case(id: &str, seed: u64) -> Result<CaseResult> {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let case = |description: &str, expected: f64, oracle: f64| CaseResult {
        id: id.to_string(),
        description: description.to_string(),
        expected,
        oracle,
    };
    match id {
        "vacuum-tensor" => {
            let s = densify(&FieldComponent::displaced_vacuum(vec![z; 2]), 4, FrameHandling::Apply)?;
            Ok(case("weight of |0,0> in the dense vacuum", 1.0, s.coeffs[0].norm_sqr()))
        }
        "single-photon-tensor" => {
            let c = FieldComponent { frame: vec![z; 2], single: vec![z, one], vacuum: z };
            let s = densify(&c, 4, FrameHandling::Apply)?;
            Ok(case("weight of |0,1> for a photon in mode 2", 1.0, s.coeffs[5].norm_sqr()))
        }
        "coherent-poisson" => {
            let s = densify(&FieldComponent::displaced_vacuum(vec![C64::new(0.5, 0.0)]), 8, FrameHandling::Apply)?;
            Ok(case("<n> of D(0.5)|0> at cutoff 8", 0.25, dense_expectation(&s, DenseOperator::Number(1))?))
        }
        "coherent-number" => {
            let s = densify(&FieldComponent::displaced_vacuum(vec![one]), 8, FrameHandling::Apply)?;
            Ok(case("<n> of D(1)|0> at cutoff 8", 1.0, dense_expectation(&s, DenseOperator::Number(1))?))
        }
        "vacuum-number" => {
            let s = densify(&FieldComponent::displaced_vacuum(vec![z]), 4, FrameHandling::Apply)?;
            Ok(case("<n> of the vacuum", 0.0, dense_expectation(&s, DenseOperator::Number(1))?))
        }
        "single-photon-parity" => {
            let s = densify(&FieldComponent { frame: vec![z], single: vec![one], vacuum: z }, 4, FrameHandling::Apply)?;
            Ok(case("parity of |1>", -1.0, dense_expectation(&s, DenseOperator::Parity(1))?))
        }
        "photon-plus-vacuum-number" => {
            let c = FieldComponent { frame: vec![z], single: vec![one], vacuum: one };
            let closed = crate::observables::mean_photon_number(&FieldState::pure(c.clone()), 1)?;
            let s = densify(&c.normalized()?, 4, FrameHandling::Record)?;
            Ok(case("<n> of (|1> + |0>)/sqrt2", closed, dense_expectation(&s, DenseOperator::Number(1))?))
        }
        "coherent-wigner-max" => {
            let chi = C64::new(0.7, -0.4);
            let s = densify(&FieldComponent::displaced_vacuum(vec![chi]), 4, FrameHandling::Record)?;
            Ok(case("Wigner function of D(chi)|0> at beta = chi", FRAC_1_PI, dense_wigner(&s, 1, chi)?))
        }
        "entropy-diag-0.9" => {
            let rho =
                DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(0.9, 0.0), C64::new(0.1, 0.0)]));
            let closed = entanglement::von_neumann_entropy(&entanglement::QubitDensity::diagonal(0.9, 0.1)?)?;
            Ok(case("entropy of diag(0.9, 0.1)", closed, dense_entropy(&rho)?))
        }
        "bell-negativity" => {
            let c = FieldComponent { frame: vec![z; 2], single: vec![one, one], vacuum: z };
            let rho = dense_mixture(&[&c], 2)?;
            Ok(case("negativity of (|10> + |01>)/sqrt2", 0.5, partial_transpose_negativity(&rho, 2, 2, &[1])?))
        }
        "product-negativity" => {
            let c = FieldComponent { frame: vec![z; 2], single: vec![one, z], vacuum: z };
            let rho = dense_mixture(&[&c], 2)?;
            Ok(case("negativity of |10>", 0.0, partial_transpose_negativity(&rho, 2, 2, &[1])?))
        }
        "random-rank2-negativity" => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let joint = random_toy_joint(&mut rng, 3, 1.0);
            let two = entanglement::partition_state(&joint.second, PartitionSpec::Single(1))?;
            let rho = dense_mixture(&[&joint.second.normalized()?], 3)?;
            Ok(case(
                "negativity of a random photon-added state vs the Schmidt product",
                two.schmidt_product(),
                partial_transpose_negativity(&rho, 3, 3, &[1])?,
            ))
        }
        other => Err(Error::Config(format!("unknown oracle case '{other}'; known cases: {}", CASE_IDS.join(", ")))),
    }
}
