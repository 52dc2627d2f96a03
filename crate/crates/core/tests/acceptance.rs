//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.
//!
//! Set HHGQO_ACCEPTANCE_STRICT=1 to exit non-zero when any criterion fails.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_PI, TAU};
use std::fs;
use std::path::Path;
use std::time::Instant;

use hhgqo_core::cache;
use hhgqo_core::config::{CachePolicy, RunConfig};
use hhgqo_core::entanglement::{self, PartitionSpec};
use hhgqo_core::integrals::{self, TransitionAmplitudes};
use hhgqo_core::observables::{self, FieldState, SpectrumReport};
use hhgqo_core::oracle::{self, DenseOperator, FrameHandling};
use hhgqo_core::pipeline::Pipeline;
use hhgqo_core::state::{assemble_joint, ElectronState, FieldComponent, JointState};
use hhgqo_core::{DipoleTrace, C64};

const SEED: u64 = 0x5eed_2024;
const RANDOM_CASES: usize = 200;
const EXACT_TOL: f64 = 1e-8;
const BETA_SAMPLES: usize = 25;
/// Fock cutoff of the dense partial transpose in the bound check.
const BOUND_CUTOFF: usize = 4;
const DISTANCES: [f64; 3] = [2.0, 2.5, 3.5];
const MOLECULES: [u64; 4] = [1, 1_000, 1_000_000, 1_000_000_000];

struct Outcome {
    id: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(id: &'static str, name: &'static str, pass: bool, detail: String) -> Self {
        Self { id, name, pass, detail, notes: Vec::new() }
    }
}

// ---------------------------------------------------------------------------
// Randomised quantum-optical checks

fn weighted_components(joint: &JointState) -> Vec<(f64, FieldComponent)> {
    [&joint.first, &joint.second]
        .into_iter()
        .filter(|c| c.norm_sqr() > 0.0)
        .map(|c| (c.norm_sqr() / joint.total_norm, c.normalized().expect("non-zero component")))
        .collect()
}

fn dense_mixture_value(parts: &[(f64, FieldComponent)], cutoff: usize, f: impl Fn(&oracle::DenseState) -> f64) -> f64 {
    parts.iter().map(|(w, c)| w * f(&oracle::densify(c, cutoff, FrameHandling::Record).expect("guards hold"))).sum()
}

fn to_dmatrix(m: &[[C64; 2]; 2]) -> DMatrix<C64> {
    DMatrix::from_fn(2, 2, |i, j| m[i][j])
}

/// Largest deviation between closed forms and the dense oracle on one random state.
fn oracle_deviation(rng: &mut ChaCha8Rng) -> f64 {
    let modes = rng.random_range(1..=3usize);
    let cutoff = rng.random_range(1..=6usize);
    let joint = oracle::random_toy_joint(rng, modes, 1.0);
    let mut worst: f64 = 0.0;

    let localized = joint.to_localized().unwrap();
    let total = FieldState::unconditioned(&joint);
    let total_parts = weighted_components(&joint);
    let conditioned: Vec<FieldComponent> = [ElectronState::Antibonding, ElectronState::Right, ElectronState::Left]
        .iter()
        .map(|&s| joint.condition(s).unwrap())
        .collect();

    for q in 1..=modes {
        // Mean photon numbers of the mixture and of each conditioned state.
        let closed = observables::mean_photon_number(&total, q).unwrap();
        let dense = dense_mixture_value(&total_parts, cutoff, |s| {
            oracle::dense_expectation(s, DenseOperator::Number(q)).unwrap()
        });
        worst = worst.max((closed - dense).abs());
        for c in &conditioned {
            let closed = observables::mean_photon_number(&FieldState::pure(c.clone()), q).unwrap();
            let s = oracle::densify(c, cutoff, FrameHandling::Record).unwrap();
            worst = worst.max((closed - oracle::dense_expectation(&s, DenseOperator::Number(q)).unwrap()).abs());
            // Reduced single-mode density in the displaced frame.
            let rho = FieldState::pure(c.clone()).reduced(q).unwrap();
            let dense_rho = oracle::dense_reduced(&s, &[q]);
            for i in 0..=cutoff {
                for j in 0..=cutoff {
                    let closed = if i < 2 && j < 2 { rho.rho[i][j] } else { C64::new(0.0, 0.0) };
                    worst = worst.max((closed - dense_rho[(i, j)]).norm());
                }
            }
        }
    }

    // Wigner values of the mixture at random phase-space points.
    let q = rng.random_range(1..=modes);
    let rho = total.reduced(q).unwrap();
    for _ in 0..BETA_SAMPLES {
        let r = 2.5 * rng.random::<f64>().sqrt();
        let beta = rho.center + C64::from_polar(r, TAU * rng.random::<f64>());
        let dense = dense_mixture_value(&total_parts, cutoff, |s| oracle::dense_wigner(s, q, beta).unwrap());
        worst = worst.max((rho.wigner(beta) - dense).abs());
    }

    // Electron state and its entropy.
    let closed_e = entanglement::electron_reduced_density(&joint).unwrap();
    let dense_e = oracle::dense_electron_density(&joint, cutoff).unwrap();
    for (closed_row, dense_row) in closed_e.m.iter().zip(&dense_e) {
        for (a, b) in closed_row.iter().zip(dense_row) {
            worst = worst.max((a - b).norm());
        }
    }
    let s_closed = entanglement::von_neumann_entropy(&closed_e).unwrap();
    let s_dense = oracle::dense_entropy(&to_dmatrix(&dense_e)).unwrap();
    worst = worst.max((s_closed - s_dense).abs());
    let s_local = entanglement::electron_entropy(&localized).unwrap();
    worst = worst.max((s_local - s_closed).abs());

    // Partition entropies of the conditioned states and the negativity bound.
    if modes >= 2 {
        for c in &conditioned {
            for split in 1..modes {
                let closed = entanglement::partition_entropy(c, PartitionSpec::Split(split)).unwrap();
                let dense = oracle::dense_partition_entropy(c, PartitionSpec::Split(split), cutoff).unwrap();
                worst = worst.max((closed - dense).abs());
            }
        }
        for q in 1..=modes {
            let closed = entanglement::logneg_lower_bound(&joint, q).unwrap().value;
            let dense = oracle::dense_component_logneg(&joint.normalized_antibonding().unwrap(), q, cutoff).unwrap();
            worst = worst.max((closed - dense).abs());
        }
    }
    worst
}

fn criterion_oracle() -> Outcome {
    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let worst = (0..RANDOM_CASES).map(|_| oracle_deviation(&mut rng)).fold(0.0, f64::max);
    let secs = clock.elapsed().as_secs_f64();
    Outcome::new(
        "1",
        "oracle equivalence",
        worst <= EXACT_TOL && secs < 120.0,
        format!("max |closed - dense| = {worst:.2e} over {RANDOM_CASES} states (tol {EXACT_TOL:e}); {secs:.1} s (limit 120 s)"),
    )
}

fn criterion_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xb0);
    let mut violations = 0;
    let mut checks = 0;
    let mut worst_gap: f64 = 0.0;
    for _ in 0..RANDOM_CASES {
        let modes = rng.random_range(2..=3usize);
        let joint = oracle::random_toy_joint(&mut rng, modes, 1.0);
        for q in 1..=modes {
            let bound = entanglement::logneg_lower_bound(&joint, q).unwrap().value;
            let exact = entanglement::brute_force_logneg(&joint, q, BOUND_CUTOFF).unwrap();
            checks += 1;
            if exact < bound - 1e-10 {
                violations += 1;
                worst_gap = worst_gap.max(bound - exact);
            }
        }
    }
    let mut out = Outcome::new(
        "2",
        "negativity bound validity",
        violations == 0,
        format!("{violations} of {checks} cases with exact log-negativity below the bound (largest shortfall {worst_gap:.3})"),
    );
    // The bound is built from the pure antibonding component alone; the
    // mixture with the bonding vacuum can only lower the negativity.
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let joint = JointState {
        basis: hhgqo_core::ElectronBasis::Energy,
        first: FieldComponent::displaced_vacuum(vec![z, z]),
        second: FieldComponent { frame: vec![z, z], single: vec![o, o], vacuum: z },
        total_norm: 3.0,
        global_phase: 0.0,
    };
    out.notes.push(format!(
        "example: vacuum + Bell mixture has exact {:.4} vs bound {:.4}",
        entanglement::brute_force_logneg(&joint, 1, BOUND_CUTOFF).unwrap(),
        entanglement::logneg_lower_bound(&joint, 1).unwrap().value
    ));
    out
}

fn criterion_coherent_wigner() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xc0);
    let mut worst: f64 = 0.0;
    for _ in 0..RANDOM_CASES {
        let modes = rng.random_range(1..=5usize);
        let scale = 10f64.powf(rng.random_range(-3.0..3.0));
        let chi: Vec<C64> =
            (0..modes).map(|_| C64::from_polar(scale * rng.random::<f64>(), TAU * rng.random::<f64>())).collect();
        let state = FieldState::pure(FieldComponent::displaced_vacuum(chi));
        for q in 1..=modes {
            worst = worst.max((observables::wigner_max(&state, q).unwrap() - FRAC_1_PI).abs());
        }
    }
    Outcome::new(
        "3",
        "coherent-state Wigner maximum",
        worst <= 1e-10,
        format!("max |W_max - 1/pi| = {worst:.2e} over {RANDOM_CASES} displaced vacua (tol 1e-10)"),
    )
}

// ---------------------------------------------------------------------------
// Checks on the simulated molecule

struct Simulation {
    traces: BTreeMap<String, DipoleTrace>,
    config: RunConfig,
    trace_seconds: f64,
}

fn key(r: f64) -> String {
    format!("{r:.3}")
}

impl Simulation {
    fn trace(&self, r: f64) -> &DipoleTrace {
        &self.traces[&key(r)]
    }

    fn joint(&self, r: f64, n: u64) -> (integrals::ModeAmplitudes, JointState) {
        let amps = integrals::transition_amplitudes(
            self.trace(r),
            &self.config.mode_set().unwrap(),
            n,
            &self.config.coupling_options(),
        )
        .unwrap();
        let joint = assemble_joint(&amps.bonding, &amps.transitions).unwrap();
        (amps, joint)
    }

    fn spectrum(&self, r: f64, n: u64) -> SpectrumReport {
        observables::spectrum(&self.joint(r, n).1).unwrap()
    }
}

fn reference_config() -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.molecule.r_au = DISTANCES.to_vec();
    cfg.run.n_mol = MOLECULES.to_vec();
    cfg.run.partition_splits = vec![1, 2, 5, 10, 20, 50, 99];
    cfg.run.logneg_modes = vec![1, 2, 6];
    cfg.run.wigner_modes = vec![2, 6];
    cfg
}

fn collect_csv(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        if p.extension().is_some_and(|e| e == "csv") {
            out.insert(p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap());
        }
    }
    out
}

/// Runs the full pipeline three times (fresh, cached, cached again) and
/// returns the traces plus the determinism verdict.
fn simulate(work: &Path) -> (Simulation, Outcome) {
    let cache_dir = work.join("cache");
    let mut cfg = reference_config();
    cfg.run.cache = CachePolicy::Refresh;
    let fresh = Pipeline::new(cfg.clone(), work.join("fresh"), cache_dir.clone()).unwrap();
    let clock = Instant::now();
    let m_fresh = fresh.run().unwrap();
    let trace_seconds = m_fresh.stages.iter().find(|s| s.stage == "traces").map_or(0.0, |s| s.seconds);
    let total_seconds = clock.elapsed().as_secs_f64();

    cfg.run.cache = CachePolicy::Use;
    let cached = Pipeline::new(cfg.clone(), work.join("cached"), cache_dir.clone()).unwrap();
    let m_cached = cached.run().unwrap();
    let again = Pipeline::new(cfg.clone(), work.join("again"), cache_dir.clone()).unwrap();
    again.run().unwrap();

    let a = collect_csv(&work.join("fresh"));
    let b = collect_csv(&work.join("cached"));
    let c = collect_csv(&work.join("again"));
    let identical = !a.is_empty() && a == b && b == c;
    let all_hits = m_cached.cache_hits.len() == DISTANCES.len();
    let outcome = Outcome::new(
        "10",
        "determinism and cache soundness",
        identical && all_hits,
        format!(
            "{} CSV files byte-identical across fresh/cached/repeat runs: {identical}; cache hits {}/{}; first run {total_seconds:.0} s",
            a.len(),
            m_cached.cache_hits.len(),
            DISTANCES.len()
        ),
    );

    let mut traces = BTreeMap::new();
    let (pulse, grid) = (cfg.pulse().unwrap(), cfg.grid().unwrap());
    for m in cfg.molecules().unwrap() {
        let path = cache::trace_path(&cache_dir, &m, &pulse, &grid, cfg.numerics.dt);
        traces.insert(key(m.interatomic_distance_au), cache::read_trace(&path).unwrap());
    }
    (Simulation { traces, config: cfg, trace_seconds }, outcome)
}

fn criterion_scaling(sim: &Simulation) -> Outcome {
    let base = sim.spectrum(2.0, 1);
    let mut worst: f64 = 0.0;
    for n in [10u64, 10_000, 100_000_000] {
        let s = sim.spectrum(2.0, n);
        let nf = n as f64;
        for i in 0..base.q.len() {
            if base.n_bonding[i] > 0.0 {
                worst = worst.max((s.n_bonding[i] / base.n_bonding[i] / (nf * nf) - 1.0).abs());
            }
            if base.n_antibonding[i] > 0.0 {
                worst = worst.max((s.n_antibonding[i] / base.n_antibonding[i] / nf - 1.0).abs());
            }
        }
    }
    Outcome::new(
        "4",
        "many-molecule scaling",
        worst <= 1e-10,
        format!("max relative deviation from N^2 / N scaling = {worst:.2e} for N in {{10, 1e4, 1e8}} (tol 1e-10)"),
    )
}

fn criterion_structure(sim: &Simulation) -> Outcome {
    let report = sim.spectrum(2.0, 1);
    let st = observables::spectrum_structure(&report, 13).unwrap();
    let break_ok = (st.plateau_break as i64 - 13).abs() <= 3 && st.first_level - st.second_level >= 1.0;
    let cutoff_ok = (st.cutoff as i64 - 80).abs() <= 15;
    let odd_ok = st.odd_bonding_ratio.iter().all(|&(_, r)| r >= 3.0);
    let even_ok = st.even_antibonding_ratio.iter().all(|&(_, r)| r >= 3.0);
    let runtime_ok = sim.trace_seconds < 1800.0;
    let fmt = |v: &[(usize, f64)]| v.iter().map(|(q, r)| format!("{q}:{r:.2}")).collect::<Vec<_>>().join(" ");
    let mut out = Outcome::new(
        "5",
        "spectrum structure at R = 2.0",
        break_ok && cutoff_ok && odd_ok && even_ok && runtime_ok,
        format!(
            "(a) break at q = {} (target 13 +- 3), plateau drop {:.2} decades (>= 1): {}; (b) cutoff q = {} (80 +- 15): {}; (c) odd/even dominance >= 3x: {}; TDSE {:.0} s for {} distances (< 1800 s)",
            st.plateau_break,
            st.first_level - st.second_level,
            break_ok,
            st.cutoff,
            cutoff_ok,
            odd_ok && even_ok,
            sim.trace_seconds,
            DISTANCES.len()
        ),
    );
    out.notes.push(format!("odd q  n_b/n_a: {}", fmt(&st.odd_bonding_ratio)));
    out.notes.push(format!("even q n_a/n_b: {}", fmt(&st.even_antibonding_ratio)));
    out
}

fn criterion_photon_levels(sim: &Simulation) -> Outcome {
    let report = sim.spectrum(2.0, 1);
    let st = observables::spectrum_structure(&report, 13).unwrap();
    let low = report.n_total.iter().take(13).copied().fold(0.0, f64::max).log10();
    let at_cutoff = report.n_total[st.cutoff - 1].log10();
    let calibrated = integrals::calibrate_g0(
        sim.trace(2.0),
        &sim.config.mode_set().unwrap(),
        sim.config.numerics.calibration_target,
        sim.config.numerics.calibration_window,
        &sim.config.coupling_options(),
    )
    .unwrap();
    let g0 = sim.config.modes.g0;
    let pass = (low + 10.0).abs() <= 2.0 && (at_cutoff + 16.0).abs() <= 2.0 && (calibrated / g0 - 1.0).abs() <= 0.05;
    Outcome::new(
        "6",
        "single-molecule photon levels",
        pass,
        format!(
            "log10 n: first plateau {low:.2} (-10 +- 2), cutoff q = {} {at_cutoff:.2} (-16 +- 2); calibrated g0 {calibrated:.3e} vs default {g0:.3e} (5%)",
            st.cutoff
        ),
    )
}

fn criterion_ring(sim: &Simulation) -> Outcome {
    let (amps, joint) = sim.joint(2.0, 1);
    let h1 = &amps.transitions.h1;
    let even: Vec<usize> = (2..=h1.len()).step_by(2).collect();
    let strongest = *even.iter().max_by(|a, b| h1[*a - 1].norm_sqr().total_cmp(&h1[*b - 1].norm_sqr())).unwrap();
    let weakest = *even
        .iter()
        .filter(|&&q| q <= 20)
        .min_by(|a, b| h1[*a - 1].norm_sqr().total_cmp(&h1[*b - 1].norm_sqr()))
        .unwrap();
    let state = FieldState::pure(joint.normalized_antibonding().unwrap());
    let strong = state.reduced(strongest).unwrap();
    let weak = state.reduced(weakest).unwrap();
    let w0 = strong.wigner(strong.center);
    let ring = strong.ring_radius().map(|r| strong.radial_average(r));
    let dip = ring.is_some_and(|w| w0 < w);
    let (_, weak_peak) = weak.wigner_max();
    let single_peak = weak.ring_radius().is_none() && (weak_peak - weak.center).norm() < 0.5;
    let mut out = Outcome::new(
        "7",
        "Wigner ring of the antibonding-conditioned state",
        dip && single_peak,
        format!(
            "q = {strongest} (max |h1|^2): W(center) = {w0:.4}, ring average {}: dip {dip}; q = {weakest} (min |h1|^2): single-peaked {single_peak}",
            ring.map_or("none".to_string(), |w| format!("{w:.4}"))
        ),
    );
    out.notes
        .push(format!("single-photon weight on q = {strongest}: {:.3} (a ring needs > 0.25)", strong.rho[1][1].re));
    out
}

fn criterion_wigner_trend(sim: &Simulation) -> Outcome {
    let n = 1_000_000_000;
    let orders = [2usize, 4, 6, 8];
    let mut table = Vec::new();
    for &r in &DISTANCES {
        let total = FieldState::unconditioned(&sim.joint(r, n).1);
        table.push(orders.iter().map(|&q| observables::wigner_max(&total, q).unwrap()).collect::<Vec<_>>());
    }
    let below = table.iter().flatten().all(|&w| w < FRAC_1_PI - 1e-12);
    let monotone = (0..orders.len()).all(|j| table.windows(2).all(|w| w[1][j] > w[0][j]));
    let deficits: Vec<String> = DISTANCES
        .iter()
        .zip(&table)
        .map(|(r, row)| {
            format!("R={r}: [{}]", row.iter().map(|w| format!("{:.1e}", FRAC_1_PI - w)).collect::<Vec<_>>().join(", "))
        })
        .collect();
    let mut out = Outcome::new(
        "8",
        "Wigner maximum trends at N = 1e9",
        below && monotone,
        format!("max W < 1/pi on q = 2,4,6,8: {below}; strictly increasing with R: {monotone}"),
    );
    out.notes.push(format!("1/pi - max W: {}", deficits.join("; ")));
    out
}

fn criterion_entanglement(sim: &Simulation) -> Outcome {
    let entropy = |r: f64, n: u64| entanglement::electron_entropy(&sim.joint(r, n).1).unwrap();
    let by_n: Vec<f64> = MOLECULES.iter().map(|&n| entropy(2.0, n)).collect();
    let rising_n = by_n.windows(2).all(|w| w[1] > w[0]);
    let by_r: Vec<f64> = DISTANCES.iter().map(|&r| entropy(r, 1_000_000_000)).collect();
    let falling_r = by_r.windows(2).all(|w| w[1] < w[0]);

    let (amps, joint) = sim.joint(2.0, 1);
    let qc = amps.transitions.h1.len();
    let cond = joint.normalized_antibonding().unwrap();
    let splits: Vec<f64> =
        (1..qc).map(|s| entanglement::partition_entropy(&cond, PartitionSpec::Split(s)).unwrap()).collect();
    let (arg, s_max) = splits.iter().enumerate().fold((0, f64::MIN), |b, (i, &v)| if v > b.1 { (i + 1, v) } else { b });
    let h1_peak = (1..=qc)
        .max_by(|a, b| amps.transitions.h1[a - 1].norm_sqr().total_cmp(&amps.transitions.h1[b - 1].norm_sqr()))
        .unwrap();
    let interior = arg > 1 && arg < qc - 1;
    let at_peak = (arg as i64 - h1_peak as i64).abs() <= 1;

    let big = sim.joint(2.0, 1_000_000_000).1;
    let localized_max = [ElectronState::Right, ElectronState::Left]
        .iter()
        .flat_map(|&s| {
            let c = big.condition(s).unwrap();
            (1..qc).map(move |k| entanglement::partition_entropy(&c, PartitionSpec::Split(k)).unwrap())
        })
        .fold(0.0, f64::max);
    let separated = s_max >= 10.0 * localized_max;

    let mut out = Outcome::new(
        "9",
        "entanglement trends",
        rising_n && falling_r && interior && at_peak && separated,
        format!(
            "S_elec rising in N: {rising_n}; falling in R at N = 1e9: {falling_r}; partition maximum interior: {interior} and at the |h1|^2 peak (split {arg} vs q {h1_peak}): {at_peak}; antibonding {s_max:.3} >= 10x localized {localized_max:.1e}: {separated}"
        ),
    );
    out.notes.push(format!(
        "S_elec(R = 2) for N = {:?}: [{}]",
        MOLECULES,
        by_n.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>().join(", ")
    ));
    out.notes.push(format!(
        "S_elec(N = 1e9) for R = {:?}: [{}]",
        DISTANCES,
        by_r.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>().join(", ")
    ));
    let s_12 = entropy(2.0, 1_200_000_000);
    let within3 = |ours: f64, theirs: f64| ours > 0.0 && (ours / theirs).max(theirs / ours) <= 3.0;
    out.notes.push(format!(
        "reported, not gated: S_elec(R = 2, N = 1.2e9) = {s_12:.3e} vs 0.75 (factor 3: {})",
        within3(s_12, 0.75)
    ));
    for (r, reference) in [(2.0, 0.69), (2.5, 0.99), (3.5, 0.78)] {
        let c = sim.joint(r, 1).1.normalized_antibonding().unwrap();
        let m =
            (1..qc).map(|s| entanglement::partition_entropy(&c, PartitionSpec::Split(s)).unwrap()).fold(0.0, f64::max);
        out.notes.push(format!(
            "reported, not gated: max partition entropy at R = {r}: {m:.3} vs {reference} (factor 3: {})",
            within3(m, reference)
        ));
    }
    let na = |n: u64| sim.joint(2.0, n).0.transitions.norm_na();
    out.notes.push(format!(
        "N_a at R = 2: N = 1: {:.2e}, N = 1e4: {:.2e}, N = 1e9: {:.2e}",
        na(1),
        na(10_000),
        na(1_000_000_000)
    ));
    out
}

fn check_magnitudes(sim: &Simulation) -> Vec<String> {
    // Sanity on the amplitude bookkeeping shared by several criteria.
    let t: &TransitionAmplitudes = &sim.joint(2.0, 1).0.transitions;
    vec![format!(
        "sum |h1|^2 = {:.3e}, |H2|^2 = {:.3e} at R = 2, N = 1",
        t.h1.iter().map(|z| z.norm_sqr()).sum::<f64>(),
        t.big_h2.norm_sqr()
    )]
}

fn main() {
    let clock = Instant::now();
    let mut outcomes = vec![criterion_oracle(), criterion_bound(), criterion_coherent_wigner()];

    let work = tempfile::tempdir().expect("temporary directory");
    let (sim, determinism) = simulate(work.path());
    outcomes.push(criterion_scaling(&sim));
    outcomes.push(criterion_structure(&sim));
    outcomes.push(criterion_photon_levels(&sim));
    outcomes.push(criterion_ring(&sim));
    outcomes.push(criterion_wigner_trend(&sim));
    outcomes.push(criterion_entanglement(&sim));
    outcomes.push(determinism);

    println!("acceptance criteria");
    for o in &outcomes {
        println!("{} {:>2} {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.name, o.detail);
        for n in &o.notes {
            println!("        {n}");
        }
    }
    for line in check_magnitudes(&sim) {
        println!("info: {line}");
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    println!(
        "summary: {}/{} criteria passed{}; {:.0} s",
        outcomes.len() - failed.len(),
        outcomes.len(),
        if failed.is_empty() { String::new() } else { format!(", failing: {}", failed.join(", ")) },
        clock.elapsed().as_secs_f64()
    );
    if !failed.is_empty() && std::env::var("HHGQO_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
