//! Batch runner: config -> cached dipole traces -> amplitudes -> reports.
//!
//! Every stage writes CSV tables plus JSON sidecars into the output
//! directory and returns a [`RunManifest`] listing them with checksums.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::cache;
use crate::config::{CachePolicy, Output, RunConfig};
use crate::dipole::{self, DipoleTrace, TruncationReport};
use crate::entanglement::{self, PartitionSpec};
use crate::error::{Error, Result};
use crate::field::Molecule;
use crate::integrals::{self, ModeAmplitudes};
use crate::observables::{self, FieldState};
use crate::state::{assemble_joint, ElectronState, JointState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Dipole,
    Spectrum,
    Wigner,
    Entangle,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Dipole => "dipole",
            Stage::Spectrum => "spectrum",
            Stage::Wigner => "wigner",
            Stage::Entangle => "entangle",
        }
    }
}

impl From<Output> for Stage {
    fn from(o: Output) -> Self {
        match o {
            Output::Spectrum => Stage::Spectrum,
            Output::Wigner => Stage::Wigner,
            Output::Entangle => Stage::Entangle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Path relative to the output directory.
    pub path: String,
    pub sha256: String,
}

/// Whether a sweep point stays inside the regime the first-order solution assumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityFlags {
    pub r_au: f64,
    pub n_mol: u64,
    pub truncation: TruncationReport,
    pub truncation_ok: bool,
    pub norm_na: f64,
    pub perturbative: bool,
    pub max_theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub code_version: String,
    pub seed: u64,
    pub stages: Vec<StageTiming>,
    pub cache_hits: Vec<f64>,
    pub outputs: Vec<OutputFile>,
    pub validity: Vec<ValidityFlags>,
}

/// One (R, N_mol) point with everything downstream stages need.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub r_au: f64,
    pub n_mol: u64,
    pub amplitudes: ModeAmplitudes,
    pub joint: JointState,
    pub validity: ValidityFlags,
}

pub struct Pipeline {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub cache_dir: PathBuf,
}

struct TraceSet {
    traces: Vec<(Molecule, DipoleTrace)>,
    cache_hits: Vec<f64>,
}

fn num(x: f64) -> String {
    format!("{x:.12e}")
}

fn tag(r: f64, n: u64) -> String {
    format!("R{r:.3}_N{n}")
}

impl Pipeline {
    pub fn new(config: RunConfig, out_dir: PathBuf, cache_dir: PathBuf) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, out_dir, cache_dir })
    }

    /// Uses the directories named in the config.
    pub fn from_config(config: RunConfig) -> Result<Self> {
        let out = PathBuf::from(&config.run.output_dir);
        let cache = PathBuf::from(&config.run.cache_dir);
        Self::new(config, out, cache)
    }

    fn trace_path(&self, molecule: &Molecule) -> Result<PathBuf> {
        Ok(cache::trace_path(
            &self.cache_dir,
            molecule,
            &self.config.pulse()?,
            &self.config.grid()?,
            self.config.numerics.dt,
        ))
    }

    fn compute_trace(&self, molecule: &Molecule) -> Result<DipoleTrace> {
        let cfg = &self.config;
        let pulse = cfg.pulse()?;
        let grid = cfg.grid()?;
        let lcao = dipole::build_lcao_states(molecule, &grid)?;
        let duration = pulse.duration();
        let dt_limit = dipole::max_time_step(&pulse, cfg.modes.q_cutoff);
        if cfg.numerics.dt > dt_limit {
            return Err(Error::UnresolvedCutoff { dt: cfg.numerics.dt, limit: dt_limit });
        }
        let n_steps = (duration / cfg.numerics.dt - 1e-9).ceil() as usize;
        let dt = duration / n_steps as f64;
        let field = |t: f64| pulse.classical_field(t.min(duration)).unwrap_or(0.0);
        dipole::propagate_pair(molecule, &pulse, &grid, &lcao, dt, n_steps, &field, cfg.numerics.norm_growth_tol)
    }

    /// Cached trace whose metadata matches the current config, if any.
    fn cached_trace(&self, molecule: &Molecule) -> Result<Option<DipoleTrace>> {
        let path = self.trace_path(molecule)?;
        if !path.exists() {
            return Ok(None);
        }
        let trace = cache::read_trace(&path)?;
        let m = &trace.meta;
        let matches = m.molecule == *molecule
            && m.pulse == self.config.pulse()?
            && m.grid_hash == self.config.grid()?.fingerprint()
            && m.version == dipole::TRACE_FORMAT_VERSION;
        Ok(matches.then_some(trace))
    }

    /// Traces for every configured distance. With `produce` set, missing or
    /// stale entries are computed (and stored unless caching is off);
    /// otherwise they must already be cached.
    fn traces(&self, produce: bool) -> Result<TraceSet> {
        let policy = self.config.run.cache;
        let molecules = self.config.molecules()?;
        if policy != CachePolicy::Off {
            fs::create_dir_all(&self.cache_dir)?;
        }
        let results: Vec<Result<(Molecule, DipoleTrace, bool)>> = molecules
            .par_iter()
            .map(|m| {
                let cached = match policy {
                    CachePolicy::Use => self.cached_trace(m)?,
                    _ => None,
                };
                if let Some(t) = cached {
                    return Ok((m.clone(), t, true));
                }
                if !produce && policy != CachePolicy::Off {
                    return Err(Error::MissingArtifact(format!(
                        "no cached dipole trace for R = {:.3} a.u. in {}; run `dipole` first",
                        m.interatomic_distance_au,
                        self.cache_dir.display()
                    )));
                }
                let t = self.compute_trace(m)?;
                if policy != CachePolicy::Off {
                    cache::write_trace(&self.trace_path(m)?, &t)?;
                }
                Ok((m.clone(), t, false))
            })
            .collect();
        let mut set = TraceSet { traces: Vec::new(), cache_hits: Vec::new() };
        for r in results {
            let (m, t, hit) = r?;
            if hit {
                set.cache_hits.push(m.interatomic_distance_au);
            }
            set.traces.push((m, t));
        }
        Ok(set)
    }

    /// Amplitudes and joint states for every (R, N_mol) pair, in config order.
    pub fn sweep(&self, traces: &[(Molecule, DipoleTrace)]) -> Result<Vec<SweepPoint>> {
        let cfg = &self.config;
        let modes = cfg.mode_set()?;
        let opts = cfg.coupling_options();
        let pairs: Vec<(usize, u64)> =
            (0..traces.len()).flat_map(|i| cfg.run.n_mol.iter().map(move |&n| (i, n))).collect();
        pairs
            .par_iter()
            .map(|&(i, n)| {
                let (m, trace) = &traces[i];
                let amplitudes = integrals::transition_amplitudes(trace, &modes, n, &opts)?;
                let joint = assemble_joint(&amplitudes.bonding, &amplitudes.transitions)?;
                let truncation = trace.truncation_report();
                let norm_na = amplitudes.transitions.norm_na();
                let validity = ValidityFlags {
                    r_au: m.interatomic_distance_au,
                    n_mol: n,
                    truncation,
                    truncation_ok: truncation.peak_ratio <= cfg.numerics.max_truncation_ratio,
                    norm_na,
                    perturbative: norm_na <= cfg.numerics.max_perturbative_na,
                    max_theta: amplitudes.max_theta,
                };
                Ok(SweepPoint { r_au: m.interatomic_distance_au, n_mol: n, amplitudes, joint, validity })
            })
            .collect()
    }

    fn write(&self, name: &str, contents: &str, outputs: &mut Vec<OutputFile>) -> Result<()> {
        fs::create_dir_all(&self.out_dir)?;
        fs::write(self.out_dir.join(name), contents)?;
        outputs.push(OutputFile { path: name.to_string(), sha256: cache::checksum(contents.as_bytes()) });
        Ok(())
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T, outputs: &mut Vec<OutputFile>) -> Result<()> {
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))? + "\n";
        self.write(name, &text, outputs)
    }

    fn dipole_outputs(&self, traces: &[(Molecule, DipoleTrace)], outputs: &mut Vec<OutputFile>) -> Result<()> {
        #[derive(Serialize)]
        struct Summary<'a> {
            r_au: f64,
            samples: usize,
            dt: f64,
            diagnostics: &'a dipole::TraceDiagnostics,
            truncation: TruncationReport,
            cache_key: String,
        }
        for (m, t) in traces {
            let summary = Summary {
                r_au: m.interatomic_distance_au,
                samples: t.len(),
                dt: t.dt(),
                diagnostics: &t.meta.diagnostics,
                truncation: t.truncation_report(),
                cache_key: cache::trace_key(m, &t.meta.pulse, &t.meta.grid, self.config.numerics.dt),
            };
            self.write_json(&format!("dipole_R{:.3}.json", m.interatomic_distance_au), &summary, outputs)?;
        }
        Ok(())
    }

    fn spectrum_outputs(
        &self,
        traces: &[(Molecule, DipoleTrace)],
        points: &[SweepPoint],
        outputs: &mut Vec<OutputFile>,
    ) -> Result<()> {
        let cfg = &self.config;
        let modes = cfg.mode_set()?;
        let mut calibrated = BTreeMap::new();
        for (m, t) in traces {
            let g0 = integrals::calibrate_g0(
                t,
                &modes,
                cfg.numerics.calibration_target,
                cfg.numerics.calibration_window,
                &cfg.coupling_options(),
            )?;
            calibrated.insert(format!("{:.3}", m.interatomic_distance_au), g0);
        }
        for p in points {
            let report = observables::spectrum(&p.joint)?;
            let mut csv = String::from("q,n_bonding,n_antibonding,n_total,parity\n");
            for i in 0..report.q.len() {
                let q = report.q[i];
                let parity = if q % 2 == 1 { "odd" } else { "even" };
                let _ = writeln!(
                    csv,
                    "{q},{},{},{},{parity}",
                    num(report.n_bonding[i]),
                    num(report.n_antibonding[i]),
                    num(report.n_total[i])
                );
            }
            let name = format!("spectrum_{}", tag(p.r_au, p.n_mol));
            self.write(&format!("{name}.csv"), &csv, outputs)?;
            #[derive(Serialize)]
            struct Sidecar<'a> {
                r_au: f64,
                n_mol: u64,
                g0: f64,
                calibrated_g0: Option<f64>,
                population_bonding: f64,
                population_antibonding: f64,
                structure: Option<observables::SpectrumStructure>,
                validity: &'a ValidityFlags,
            }
            let structure = observables::spectrum_structure(&report, 13).ok();
            let side = Sidecar {
                r_au: p.r_au,
                n_mol: p.n_mol,
                g0: cfg.modes.g0,
                calibrated_g0: calibrated.get(&format!("{:.3}", p.r_au)).copied(),
                population_bonding: report.population_bonding,
                population_antibonding: report.population_antibonding,
                structure,
                validity: &p.validity,
            };
            self.write_json(&format!("{name}.json"), &side, outputs)?;
        }
        Ok(())
    }

    /// Configured Wigner modes, or the even modes with the largest and the
    /// smallest photon-added amplitude.
    pub fn wigner_modes(&self, point: &SweepPoint) -> Vec<usize> {
        if !self.config.run.wigner_modes.is_empty() {
            return self.config.run.wigner_modes.clone();
        }
        let h1 = &point.amplitudes.transitions.h1;
        let limit = self.config.run.wigner_max_orders.min(h1.len());
        let even: Vec<usize> = (2..=h1.len()).step_by(2).collect();
        let strongest = even.iter().copied().max_by(|a, b| h1[a - 1].norm_sqr().total_cmp(&h1[b - 1].norm_sqr()));
        let weakest = even
            .iter()
            .copied()
            .filter(|&q| q <= limit)
            .min_by(|a, b| h1[a - 1].norm_sqr().total_cmp(&h1[b - 1].norm_sqr()));
        let mut out: Vec<usize> = strongest.into_iter().chain(weakest).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn wigner_outputs(&self, points: &[SweepPoint], outputs: &mut Vec<OutputFile>) -> Result<()> {
        let grid = self.config.wigner_grid();
        let max_orders = self.config.run.wigner_max_orders.min(self.config.modes.q_cutoff);
        let rendered: Vec<Result<Vec<(String, String)>>> = points
            .par_iter()
            .map(|p| {
                let mut files = Vec::new();
                let conditioned = FieldState::pure(p.joint.normalized_antibonding()?);
                let total = FieldState::unconditioned(&p.joint);
                for q in self.wigner_modes(p) {
                    let map = observables::wigner_single_mode(&conditioned, q, &grid)?;
                    let rho = conditioned.reduced(q)?;
                    let (w_max, at) = rho.wigner_max();
                    let mut csv = String::from("re_beta,im_beta,w\n");
                    for (i, &im) in map.axis.iter().enumerate() {
                        for (j, &re) in map.axis.iter().enumerate() {
                            let _ = writeln!(csv, "{},{},{}", num(re), num(im), num(map.at(j, i)));
                        }
                    }
                    let name = format!("wigner_{}_q{q}_antibonding", tag(p.r_au, p.n_mol));
                    #[derive(Serialize)]
                    struct Sidecar {
                        r_au: f64,
                        n_mol: u64,
                        q: usize,
                        conditioning: &'static str,
                        frame_offset: [f64; 2],
                        w_max: f64,
                        w_at_center: f64,
                        peak_distance: f64,
                        ring_radius: Option<f64>,
                        w_on_ring: Option<f64>,
                        mean_photon_number: f64,
                        h1_norm_sqr: f64,
                        support_inside: bool,
                        points: usize,
                        half_width: f64,
                    }
                    let center_value = rho.wigner(rho.center);
                    let side = Sidecar {
                        r_au: p.r_au,
                        n_mol: p.n_mol,
                        q,
                        conditioning: "antibonding",
                        frame_offset: [map.frame_offset.re, map.frame_offset.im],
                        w_max,
                        w_at_center: center_value,
                        peak_distance: (at - rho.center).norm(),
                        ring_radius: rho.ring_radius(),
                        w_on_ring: rho.ring_radius().map(|r| rho.radial_average(r)),
                        mean_photon_number: rho.mean_photon_number(),
                        h1_norm_sqr: p.amplitudes.transitions.h1[q - 1].norm_sqr(),
                        support_inside: map.support_inside,
                        points: grid.points,
                        half_width: grid.half_width,
                    };
                    files.push((format!("{name}.csv"), csv));
                    files.push((
                        format!("{name}.json"),
                        serde_json::to_string_pretty(&side).map_err(|e| Error::Format(e.to_string()))? + "\n",
                    ));
                }
                let mut csv = String::from("q,w_max_total,w_max_antibonding,deficit_total\n");
                for q in (2..=max_orders).step_by(2) {
                    let wt = total.reduced(q)?.wigner_max().0;
                    let wa = conditioned.reduced(q)?.wigner_max().0;
                    let _ = writeln!(csv, "{q},{},{},{}", num(wt), num(wa), num(std::f64::consts::FRAC_1_PI - wt));
                }
                files.push((format!("wigner_max_{}.csv", tag(p.r_au, p.n_mol)), csv));
                Ok(files)
            })
            .collect();
        for files in rendered {
            for (name, text) in files? {
                self.write(&name, &text, outputs)?;
            }
        }
        Ok(())
    }

    fn entangle_outputs(&self, points: &[SweepPoint], outputs: &mut Vec<OutputFile>) -> Result<()> {
        let qc = self.config.modes.q_cutoff;
        let splits: Vec<usize> = if self.config.run.partition_splits.is_empty() {
            (1..qc).collect()
        } else {
            self.config.run.partition_splits.clone()
        };
        let logneg_modes: Vec<usize> = if self.config.run.logneg_modes.is_empty() {
            (1..=qc).collect()
        } else {
            self.config.run.logneg_modes.clone()
        };
        let mut electron = String::from("r_au,n_mol,entropy,norm_na,p_antibonding,perturbative\n");
        for p in points {
            let s = entanglement::electron_entropy(&p.joint)?;
            let _ = writeln!(
                electron,
                "{:.6},{},{},{},{},{}",
                p.r_au,
                p.n_mol,
                num(s),
                num(p.validity.norm_na),
                num(p.joint.probability(ElectronState::Antibonding)?),
                p.validity.perturbative
            );
            let tg = tag(p.r_au, p.n_mol);
            let conds = [ElectronState::Antibonding, ElectronState::Right, ElectronState::Left];
            let fields = conds.iter().map(|&c| p.joint.condition(c)).collect::<Result<Vec<_>>>()?;
            let mut csv = String::from("split,antibonding,right,left\n");
            for &sq in &splits {
                let vals = fields
                    .iter()
                    .map(|f| entanglement::partition_entropy(f, PartitionSpec::Split(sq)))
                    .collect::<Result<Vec<_>>>()?;
                let _ = writeln!(csv, "{sq},{},{},{}", num(vals[0]), num(vals[1]), num(vals[2]));
            }
            self.write(&format!("partition_entropy_{tg}.csv"), &csv, outputs)?;
            let mut csv = String::from("q,logneg_bound\n");
            for &q in &logneg_modes {
                let b = entanglement::logneg_lower_bound(&p.joint, q)?;
                let _ = writeln!(csv, "{q},{}", num(b.value));
            }
            self.write(&format!("logneg_bound_{tg}.csv"), &csv, outputs)?;
        }
        self.write("electron_entropy.csv", &electron, outputs)
    }

    /// Runs one subcommand. Downstream stages read traces from the cache.
    pub fn run_stage(&self, stage: Stage) -> Result<RunManifest> {
        self.execute(&[stage], stage == Stage::Dipole)
    }

    /// Full pipeline: traces are produced as needed, then every configured output.
    pub fn run(&self) -> Result<RunManifest> {
        let mut stages = vec![Stage::Dipole];
        stages.extend(self.config.run.outputs.iter().map(|&o| Stage::from(o)));
        self.execute(&stages, true)
    }

    fn execute(&self, stages: &[Stage], produce: bool) -> Result<RunManifest> {
        let mut timings = Vec::new();
        let mut outputs = Vec::new();
        let clock = Instant::now();
        let traces = self.traces(produce).map_err(|e| e.in_stage("dipole"))?;
        timings.push(StageTiming { stage: "traces".into(), seconds: clock.elapsed().as_secs_f64() });

        let downstream = stages.iter().any(|&s| s != Stage::Dipole);
        let clock = Instant::now();
        let points =
            if downstream { self.sweep(&traces.traces).map_err(|e| e.in_stage("amplitudes"))? } else { Vec::new() };
        if downstream {
            timings.push(StageTiming { stage: "amplitudes".into(), seconds: clock.elapsed().as_secs_f64() });
        }
        for &stage in stages {
            let clock = Instant::now();
            let res = match stage {
                Stage::Dipole => self.dipole_outputs(&traces.traces, &mut outputs),
                Stage::Spectrum => self.spectrum_outputs(&traces.traces, &points, &mut outputs),
                Stage::Wigner => self.wigner_outputs(&points, &mut outputs),
                Stage::Entangle => self.entangle_outputs(&points, &mut outputs),
            };
            res.map_err(|e| e.in_stage(stage.name()))?;
            timings.push(StageTiming { stage: stage.name().into(), seconds: clock.elapsed().as_secs_f64() });
        }
        outputs.sort_by(|a, b| a.path.cmp(&b.path));
        let manifest = RunManifest {
            config_hash: self.config.hash(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.config.run.seed,
            stages: timings,
            cache_hits: traces.cache_hits,
            outputs,
            validity: points.iter().map(|p| p.validity.clone()).collect(),
        };
        let label = if stages.len() == 1 { stages[0].name() } else { "run" };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Format(e.to_string()))? + "\n";
        fs::create_dir_all(&self.out_dir)?;
        fs::write(self.out_dir.join(format!("manifest_{label}.json")), text)?;
        Ok(manifest)
    }
}

/// Reads a CSV written by the pipeline into rows of strings.
pub fn read_csv(path: &Path) -> Result<Vec<Vec<String>>> {
    let text = fs::read_to_string(path)?;
    Ok(text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect())
}
