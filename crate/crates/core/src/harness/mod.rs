//! Experiment runner: truth simulation, observer runs, sweeps and comparisons.

mod config;
mod report;

use std::time::Instant;

use serde::Serialize;

pub use config::{BenchmarkKind, ScenarioConfig, Seeds, TankSection, UncertaintyFactors};
pub use report::{compare_table, write_compare, write_steps, write_sweep};

use crate::benchmarks::{simulate_truth, TruthRun};
use crate::error::{Error, Result};
use crate::metrics::{hull_volume_term, normalize, width_term, DirectionSet, MetricReport};
use crate::observer::{Observer, ObserverConfig};

/// One row of the per-step CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub scenario: String,
    pub seed: u64,
    pub k: usize,
    #[serde(rename = "M_k")]
    pub m_k: usize,
    pub step_ms: f64,
    pub hullvol_term: f64,
    pub width_term: f64,
    pub sound: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub seed: u64,
    pub report: MetricReport,
    /// Whether the true state lay in the union at each step.
    pub sound: Vec<bool>,
}

impl RunOutcome {
    pub fn all_sound(&self) -> bool {
        self.sound.iter().all(|&s| s)
    }

    pub fn records(&self, scenario: &str) -> Vec<StepRecord> {
        let r = &self.report;
        (0..r.hullvol_terms.len())
            .map(|k| StepRecord {
                scenario: scenario.to_string(),
                seed: self.seed,
                k,
                m_k: r.box_counts[k],
                step_ms: r.step_ms[k],
                hullvol_term: r.hullvol_terms[k],
                width_term: r.width_terms[k],
                sound: self.sound[k],
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub scenario: String,
    pub m_max: usize,
    pub runs: Vec<RunOutcome>,
}

impl ScenarioOutcome {
    fn mean(&self, f: impl Fn(&RunOutcome) -> f64) -> f64 {
        self.runs.iter().map(f).sum::<f64>() / self.runs.len() as f64
    }

    pub fn v_tilde(&self) -> f64 {
        self.mean(|r| r.report.v_tilde)
    }

    pub fn w_tilde(&self) -> f64 {
        self.mean(|r| r.report.w_tilde)
    }

    pub fn mean_step_ms(&self) -> f64 {
        self.mean(|r| r.report.mean_step_ms())
    }

    pub fn all_sound(&self) -> bool {
        self.runs.iter().all(RunOutcome::all_sound)
    }

    pub fn records(&self) -> Vec<StepRecord> {
        self.runs.iter().flat_map(|r| r.records(&self.scenario)).collect()
    }
}

/// Runs the observer along a simulated trajectory, timing initialization
/// (k = 0) and every step. Metric terms are computed outside the timed region.
pub fn run_once(observer: &Observer, truth: &TruthRun, dirs: &DirectionSet) -> Result<RunOutcome> {
    let steps = truth.inputs.len();
    let mut hullvol = Vec::with_capacity(steps + 1);
    let mut widths = Vec::with_capacity(steps + 1);
    let mut counts = Vec::with_capacity(steps + 1);
    let mut times = Vec::with_capacity(steps + 1);
    let mut sound = Vec::with_capacity(steps + 1);

    let t = Instant::now();
    let mut current = observer
        .initialize(&truth.measurements[0])
        .map_err(|e| e.at_step(0))?;
    times.push(t.elapsed().as_secs_f64() * 1e3);

    for k in 0..=steps {
        if k > 0 {
            let t = Instant::now();
            current = observer
                .step(current, &truth.inputs[k - 1], &truth.measurements[k])
                .map_err(|e| e.at_step(k))?;
            times.push(t.elapsed().as_secs_f64() * 1e3);
        }
        hullvol.push(hull_volume_term(&current)?);
        widths.push(width_term(&current, dirs)?);
        counts.push(current.len());
        sound.push(current.contains_point(&truth.states[k]));
    }

    Ok(RunOutcome {
        seed: truth.seed,
        report: MetricReport::from_terms(hullvol, widths, counts, times)?,
        sound,
    })
}

/// Runs all repetitions of a scenario; repetition `r` uses seed `truth + r`.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    cfg.validate()?;
    let model = cfg.build_model()?;
    let inputs = cfg.inputs(&model);
    let x0 = cfg.initial_state(&model)?;
    let dirs = DirectionSet::for_dim(model.state_dim(), cfg.seeds.directions);
    let observer = Observer::new(model.clone(), cfg.observer.clone())?;

    let runs = (0..cfg.repeats as u64)
        .map(|r| {
            let truth = simulate_truth(&model, &x0, &inputs, cfg.seeds.truth + r)?;
            run_once(&observer, &truth, &dirs)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ScenarioOutcome {
        scenario: cfg.scenario_id(),
        m_max: cfg.observer.m_max,
        runs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub scenario: String,
    pub m_max: usize,
    pub repeats: usize,
    pub v_tilde: f64,
    pub w_tilde: f64,
    pub mean_step_ms: f64,
    pub sound: bool,
}

impl From<&ScenarioOutcome> for SweepRow {
    fn from(o: &ScenarioOutcome) -> Self {
        SweepRow {
            scenario: o.scenario.clone(),
            m_max: o.m_max,
            repeats: o.runs.len(),
            v_tilde: o.v_tilde(),
            w_tilde: o.w_tilde(),
            mean_step_ms: o.mean_step_ms(),
            sound: o.all_sound(),
        }
    }
}

/// Runs the scenario once per `M_max` value.
pub fn sweep(cfg: &ScenarioConfig, m_values: &[usize]) -> Result<Vec<SweepRow>> {
    if m_values.is_empty() {
        return Err(Error::InvalidConfig("sweep needs at least one M_max value".into()));
    }
    m_values
        .iter()
        .map(|&m| {
            let mut c = cfg.clone();
            c.observer.m_max = m;
            run_scenario(&c).map(|o| SweepRow::from(&o))
        })
        .collect()
}

/// A named observer configuration for [`compare`].
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub label: String,
    pub observer: ObserverConfig,
}

impl Variant {
    pub fn with_m_max(base: &ObserverConfig, m_max: usize) -> Self {
        Variant {
            label: format!("M_max={m_max}"),
            observer: ObserverConfig {
                m_max,
                ..base.clone()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub scenario: String,
    pub variant: String,
    pub m_max: usize,
    pub v_tilde: f64,
    pub w_tilde: f64,
    pub v_hat: f64,
    pub w_hat: f64,
    pub mean_step_ms: f64,
    pub sound: bool,
}

/// Runs every variant on the same trajectories and normalizes the tightness
/// metrics by the best variant.
pub fn compare(cfg: &ScenarioConfig, variants: &[Variant]) -> Result<Vec<CompareRow>> {
    if variants.is_empty() {
        return Err(Error::InvalidConfig("compare needs at least one variant".into()));
    }
    let outcomes = variants
        .iter()
        .map(|v| {
            let mut c = cfg.clone();
            c.observer = v.observer.clone();
            run_scenario(&c)
        })
        .collect::<Result<Vec<_>>>()?;
    let raw: Vec<(f64, f64)> = outcomes.iter().map(|o| (o.v_tilde(), o.w_tilde())).collect();
    let norm = normalize(&raw)?;
    Ok(variants
        .iter()
        .zip(&outcomes)
        .zip(norm)
        .map(|((v, o), n)| CompareRow {
            scenario: o.scenario.clone(),
            variant: v.label.clone(),
            m_max: v.observer.m_max,
            v_tilde: o.v_tilde(),
            w_tilde: o.w_tilde(),
            v_hat: n.v_hat,
            w_hat: n.w_hat,
            mean_step_ms: o.mean_step_ms(),
            sound: o.all_sound(),
        })
        .collect())
}
