//! Experiment orchestration: build a quantizer, drive it over a stream,
//! record metrics, repeat across seeds, and average.
//!
//! Repeated runs execute in parallel; outputs are merged by run index so a
//! given (config, seed) pair always produces identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use rayon::prelude::*;

use rbvq_core::baseline::OkMeans;
use rbvq_core::codebook::RbParams;
use rbvq_core::metrics::{self, EvalWindow, MetricsRecord};
use rbvq_core::ngrb::{Ngrb, NgrbParams};
use rbvq_core::okrb::{Okrb, OkrbParams};
use rbvq_core::somrb::{Somrb, SomrbParams};
use rbvq_core::stream::{Dataset, DriftKind, DriftSchedule};
use rbvq_core::{Quantizer, RandomSource, RbPolicy, StepReport};

use crate::config::{Method, Params};
use crate::io;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalScope {
    /// Metrics against every point of the (single) dataset.
    Dataset,
    /// Metrics against the last `window` stream points.
    Window,
}

#[derive(Debug, Clone)]
pub struct StreamSpec {
    pub segments: Vec<Dataset>,
    /// `None` means a single static dataset.
    pub kind: Option<DriftKind>,
    pub segment_length: u64,
}

impl StreamSpec {
    pub fn single(dataset: Dataset) -> Self {
        Self {
            segments: vec![dataset],
            kind: None,
            segment_length: u64::MAX,
        }
    }

    pub fn dim(&self) -> usize {
        self.segments.first().map(Dataset::dim).unwrap_or(0)
    }

    fn build(&self, rng: RandomSource) -> anyhow::Result<DriftSchedule> {
        match self.kind {
            None => Ok(DriftSchedule::single(self.segments[0].clone(), rng)),
            Some(kind) => DriftSchedule::new(self.segments.clone(), kind, self.segment_length, rng)
                .context("stream"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub method: Method,
    pub params: Params,
    pub units: usize,
    pub iterations: u64,
    pub eval_stride: u64,
    pub window: usize,
    pub eval_scope: EvalScope,
    pub stream: StreamSpec,
}

/// One built quantizer. The enum keeps the concrete graph types reachable
/// for topology metrics and export.
#[derive(Debug, Clone)]
pub enum Model {
    Okrb(Okrb),
    Somrb(Box<Somrb>),
    Ngrb(Ngrb),
    OkMeans(OkMeans),
}

impl Model {
    pub fn build(
        method: Method,
        params: &Params,
        units: usize,
        dim: usize,
        seed: u64,
    ) -> anyhow::Result<Model> {
        let mut rng = RandomSource::substream(seed, 0);
        let rb = RbParams::new(params.th_rb, params.beta).context("rb params")?;
        let model = match method {
            Method::Okrb | Method::OkrbEb => {
                let policy = if method == Method::Okrb {
                    RbPolicy::WinCount(rb)
                } else {
                    RbPolicy::ErrorUtility(rb)
                };
                let p = OkrbParams::new(params.epsilon).context("epsilon")?;
                Model::Okrb(Okrb::new(units, dim, p, policy, &mut rng)?)
            }
            Method::Okmeans => Model::OkMeans(OkMeans::new(units, dim, params.epsilon, &mut rng)?),
            Method::Somrb | Method::SomrbEb | Method::Som => {
                let policy = match method {
                    Method::Somrb => RbPolicy::WinCount(rb),
                    Method::SomrbEb => RbPolicy::ErrorUtility(rb),
                    _ => RbPolicy::Disabled,
                };
                let p = SomrbParams::new(params.epsilon, params.sigma).context("som params")?;
                Model::Somrb(Box::new(Somrb::new(units, dim, p, policy, rng)?))
            }
            Method::Ngrb | Method::NgrbEb | Method::Ng => {
                let policy = match method {
                    Method::Ngrb => RbPolicy::WinCount(rb),
                    Method::NgrbEb => RbPolicy::ErrorUtility(rb),
                    _ => RbPolicy::Disabled,
                };
                let p = NgrbParams::new(params.epsilon, params.lambda, params.a_max)
                    .context("ng params")?;
                Model::Ngrb(Ngrb::new(units, dim, p, policy, &mut rng)?)
            }
        };
        Ok(model)
    }

    /// Writes the final topology next to `stem`: a `.units` table of
    /// reference vectors, a `.edges` list (with ages for the gas graph),
    /// and a `.positions` table for the lattice map. Returns the files
    /// written; vector-only methods write just the units table.
    pub fn export_graph(&self, stem: &Path) -> anyhow::Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        let units_path = stem.with_extension("units");
        let mut out = String::new();
        for (i, u) in self.codebook().units().iter().enumerate() {
            let coords: Vec<String> = u.w.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("{} {}\n", i, coords.join(" ")));
        }
        fs::write(&units_path, out).with_context(|| format!("write {}", units_path.display()))?;
        written.push(units_path);

        match self {
            Model::Somrb(q) => {
                let pos_path = stem.with_extension("positions");
                let mut out = String::new();
                for i in 0..q.codebook().len() {
                    let (x, y) = q.grid().position(i);
                    out.push_str(&format!("{i} {x} {y}\n"));
                }
                fs::write(&pos_path, out)
                    .with_context(|| format!("write {}", pos_path.display()))?;
                written.push(pos_path);

                let edge_path = stem.with_extension("edges");
                let mut out = String::new();
                for (a, b) in q.grid().edges() {
                    out.push_str(&format!("{a} {b}\n"));
                }
                fs::write(&edge_path, out)
                    .with_context(|| format!("write {}", edge_path.display()))?;
                written.push(edge_path);
            }
            Model::Ngrb(q) => {
                let edge_path = stem.with_extension("edges");
                let mut out = String::new();
                for (a, b, age) in q.graph().edges() {
                    out.push_str(&format!("{a} {b} {age}\n"));
                }
                fs::write(&edge_path, out)
                    .with_context(|| format!("write {}", edge_path.display()))?;
                written.push(edge_path);
            }
            Model::Okrb(_) | Model::OkMeans(_) => {}
        }
        Ok(written)
    }
}

impl Quantizer for Model {
    fn codebook(&self) -> &rbvq_core::Codebook {
        match self {
            Model::Okrb(q) => q.codebook(),
            Model::Somrb(q) => q.codebook(),
            Model::Ngrb(q) => q.codebook(),
            Model::OkMeans(q) => q.codebook(),
        }
    }

    fn step(&mut self, x: &[f64]) -> rbvq_core::Result<StepReport> {
        match self {
            Model::Okrb(q) => q.step(x),
            Model::Somrb(q) => q.step(x),
            Model::Ngrb(q) => q.step(x),
            Model::OkMeans(q) => q.step(x),
        }
    }

    fn adjacency(&self) -> Option<Vec<Vec<usize>>> {
        match self {
            Model::Somrb(q) => q.adjacency(),
            Model::Ngrb(q) => q.adjacency(),
            Model::Okrb(_) | Model::OkMeans(_) => None,
        }
    }
}

/// Derives an independent seed from a master seed and a salt (splitmix64).
pub fn derive_seed(master: u64, salt: u64) -> u64 {
    let mut z = master ^ salt.wrapping_mul(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn evaluate(
    iteration: u64,
    t: u64,
    model: &Model,
    scope: EvalScope,
    window: &EvalWindow,
    dataset: &Dataset,
) -> anyhow::Result<MetricsRecord> {
    let cb = model.codebook();
    let (mse, dead) = match scope {
        EvalScope::Dataset => (
            metrics::mse(dataset.points(), cb)?,
            metrics::dead_units(dataset.points(), cb)?,
        ),
        EvalScope::Window => (
            metrics::mse(window.points(), cb)?,
            metrics::dead_units(window.points(), cb)?,
        ),
    };
    let (avg_degree, avg_clustering) = match model.adjacency() {
        Some(adj) => (metrics::avg_degree(&adj), metrics::avg_clustering(&adj)),
        None => (0.0, 0.0),
    };
    Ok(MetricsRecord {
        iteration,
        mse,
        dead_units: dead as f64,
        avg_degree,
        avg_clustering,
        rb_count: window.rb_count(t) as f64,
    })
}

/// One seeded training run. The model is seeded from substream 0 of `seed`
/// and the input stream from substream 1, so runs with distinct seeds are
/// independent while remaining reproducible. Records are taken every
/// `eval_stride` steps; a record's `iteration` is the number of completed
/// steps, and its RB count covers the last `window` steps.
pub fn run_one(exp: &Experiment, seed: u64) -> anyhow::Result<(Vec<MetricsRecord>, Model)> {
    let dim = exp.stream.dim();
    if dim == 0 {
        bail!("stream has no segments");
    }
    let mut model = Model::build(exp.method, &exp.params, exp.units, dim, seed)?;
    let mut schedule = exp.stream.build(RandomSource::substream(seed, 1))?;
    let mut window = EvalWindow::new(exp.window);
    let mut records = Vec::with_capacity((exp.iterations / exp.eval_stride.max(1)) as usize + 1);
    for t in 0..exp.iterations {
        let (x, _segment) = schedule.next_input(t);
        let report = model.step(x)?;
        window.push(t, x);
        if report.rb_fired {
            window.record_rb(t);
        }
        if (t + 1) % exp.eval_stride == 0 {
            records.push(evaluate(
                t + 1,
                t,
                &model,
                exp.eval_scope,
                &window,
                &exp.stream.segments[0],
            )?);
        }
    }
    Ok((records, model))
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    /// Per-run metric trajectories, indexed by run (seed order).
    pub per_run: Vec<Vec<MetricsRecord>>,
    /// Pointwise mean across runs.
    pub mean: Vec<MetricsRecord>,
    /// Final model of the first run, for graph export.
    pub first_model: Model,
}

/// Runs `runs` seeded repetitions (seed, seed+1, ...) in parallel and
/// averages the records pointwise.
pub fn run_many(exp: &Experiment, seed: u64, runs: usize) -> anyhow::Result<ExperimentOutcome> {
    if runs == 0 {
        bail!("runs: must be at least 1");
    }
    let results: Vec<(Vec<MetricsRecord>, Model)> = (0..runs)
        .into_par_iter()
        .map(|r| run_one(exp, seed + r as u64))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut models: Vec<Option<Model>> = results.iter().map(|_| None).collect();
    let mut per_run = Vec::with_capacity(runs);
    for (i, (records, model)) in results.into_iter().enumerate() {
        per_run.push(records);
        models[i] = Some(model);
    }
    let first_model = models
        .into_iter()
        .next()
        .flatten()
        .expect("at least one run");
    let mean = mean_records(&per_run)?;
    Ok(ExperimentOutcome {
        per_run,
        mean,
        first_model,
    })
}

/// Pointwise mean of aligned trajectories.
pub fn mean_records(per_run: &[Vec<MetricsRecord>]) -> anyhow::Result<Vec<MetricsRecord>> {
    let Some(first) = per_run.first() else {
        bail!("no runs to average");
    };
    for r in per_run {
        if r.len() != first.len() {
            bail!("runs produced different record counts");
        }
    }
    let k = per_run.len() as f64;
    Ok((0..first.len())
        .map(|i| {
            let iter0 = first[i].iteration;
            let mut acc = MetricsRecord {
                iteration: iter0,
                mse: 0.0,
                dead_units: 0.0,
                avg_degree: 0.0,
                avg_clustering: 0.0,
                rb_count: 0.0,
            };
            for r in per_run {
                debug_assert_eq!(r[i].iteration, iter0);
                acc.mse += r[i].mse;
                acc.dead_units += r[i].dead_units;
                acc.avg_degree += r[i].avg_degree;
                acc.avg_clustering += r[i].avg_clustering;
                acc.rb_count += r[i].rb_count;
            }
            acc.mse /= k;
            acc.dead_units /= k;
            acc.avg_degree /= k;
            acc.avg_clustering /= k;
            acc.rb_count /= k;
            acc
        })
        .collect())
}

impl ExperimentOutcome {
    /// Writes run_000.csv .. run_NNN.csv plus mean.csv into `dir`.
    pub fn write_csvs(&self, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("create {}", dir.display()))?;
        let mut written = Vec::new();
        for (i, records) in self.per_run.iter().enumerate() {
            let path = dir.join(format!("run_{i:03}.csv"));
            io::write_metrics_csv(&path, records)?;
            written.push(path);
        }
        let mean_path = dir.join("mean.csv");
        io::write_metrics_csv(&mean_path, &self.mean)?;
        written.push(mean_path);
        Ok(written)
    }

    /// One-line summary of the final averaged record.
    pub fn summary(&self) -> String {
        match self.mean.last() {
            Some(r) => format!(
                "final (iteration {}): mse {:.6}, dead {:.2}, degree {:.3}, clustering {:.4}, rb/window {:.2}",
                r.iteration, r.mse, r.dead_units, r.avg_degree, r.avg_clustering, r.rb_count
            ),
            None => "no evaluations recorded".into(),
        }
    }
}

/// Convenience used by tests and the tuning loop: train without metrics.
pub fn train_only(
    method: Method,
    params: &Params,
    units: usize,
    stream: &StreamSpec,
    iterations: u64,
    seed: u64,
) -> anyhow::Result<Model> {
    let mut model = Model::build(method, params, units, stream.dim(), seed)?;
    let mut schedule = stream.build(RandomSource::substream(seed, 1))?;
    for t in 0..iterations {
        let (x, _) = schedule.next_input(t);
        model.step(x)?;
    }
    Ok(model)
}

/// One stderr line describing the experiment about to run.
pub fn log_experiment(exp: &Experiment, seed: u64, runs: usize) {
    log::info!(
        "method={} units={} iters={} stride={} window={} scope={:?} segments={} seed={} runs={}",
        exp.method.name(),
        exp.units,
        exp.iterations,
        exp.eval_stride,
        exp.window,
        exp.eval_scope,
        exp.stream.segments.len(),
        seed,
        runs
    );
}
