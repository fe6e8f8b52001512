//! Hyperparameter grid search minimizing the normalized mean quantization
//! error (NMSE) over the blobs, circles, and moons generators.
//!
//! Every parameter combination trains on each dataset `runs_per_combo`
//! times; the per-dataset error (mean unsquared nearest-unit distance over
//! the whole dataset, averaged across runs) is normalized by the worst
//! combination's value for that dataset and summed. Run seeds depend only
//! on (dataset, run), never on the combination, so all combinations train
//! against identical inits and draw orders and the comparison is fair.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context};
use rayon::prelude::*;

use rbvq_core::metrics::mean_quantization_error;
use rbvq_core::stream::{make_blobs, make_circles, make_moons, Dataset};
use rbvq_core::{Quantizer, RandomSource};

use crate::config::{Method, Params};
use crate::runner::{self, StreamSpec};

#[derive(Debug, Clone)]
pub struct Axis {
    pub name: &'static str,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ParamGrid {
    pub method: Method,
    pub axes: Vec<Axis>,
}

impl ParamGrid {
    /// The default search space per method.
    pub fn table_defaults(method: Method) -> ParamGrid {
        let axis = |name: &'static str, values: &[f64]| Axis {
            name,
            values: values.to_vec(),
        };
        let th = [0.01, 0.05, 0.1, 0.5];
        let beta = [0.005, 0.001, 0.0005, 0.0001];
        let axes = match method {
            Method::Okrb | Method::OkrbEb => vec![
                axis("epsilon", &[0.05, 0.1, 0.2, 0.3]),
                axis("th_rb", &th),
                axis("beta", &beta),
            ],
            Method::Somrb | Method::SomrbEb => vec![
                axis("epsilon", &[0.05, 0.1, 0.2, 0.3]),
                axis("sigma", &[0.5, 0.75, 1.0, 2.0]),
                axis("th_rb", &th),
                axis("beta", &beta),
            ],
            Method::Ngrb | Method::NgrbEb => vec![
                axis("lambda", &[0.5, 1.0, 2.0, 4.0]),
                axis("epsilon", &[0.05, 0.1, 0.2, 0.3]),
                axis("a_max", &[25.0, 50.0, 75.0, 100.0]),
                axis("th_rb", &th),
                axis("beta", &beta),
            ],
            Method::Okmeans => vec![axis("epsilon", &[0.05, 0.1, 0.2, 0.3, 0.4, 0.5])],
            Method::Som => vec![
                axis("epsilon", &[0.05, 0.1, 0.2, 0.3, 0.4]),
                axis("sigma", &[0.5, 0.75, 1.0, 2.0, 3.0]),
            ],
            Method::Ng => vec![
                axis("lambda", &[0.5, 1.0, 2.0, 4.0]),
                axis("epsilon", &[0.05, 0.1, 0.2, 0.3]),
                axis("a_max", &[25.0, 50.0, 75.0, 100.0]),
            ],
        };
        ParamGrid { method, axes }
    }

    pub fn combo_count(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Cartesian product in axis order; the first axis varies slowest.
    pub fn combos(&self) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new()];
        for axis in &self.axes {
            let mut next = Vec::with_capacity(out.len() * axis.values.len());
            for prefix in &out {
                for &v in &axis.values {
                    let mut c = prefix.clone();
                    c.push(v);
                    next.push(c);
                }
            }
            out = next;
        }
        out
    }

    /// Method defaults with the combo's named axes substituted in.
    pub fn params_for(&self, combo: &[f64]) -> anyhow::Result<Params> {
        let mut p = self.method.default_params();
        for (axis, &v) in self.axes.iter().zip(combo) {
            match axis.name {
                "epsilon" => p.epsilon = v,
                "sigma" => p.sigma = v,
                "lambda" => p.lambda = v,
                "a_max" => p.a_max = v as u32,
                "th_rb" => p.th_rb = v,
                "beta" => p.beta = v,
                other => bail!("unknown parameter axis {other:?}"),
            }
        }
        Ok(p)
    }

    /// Replaces one axis's values, keeping the table order of axes.
    pub fn override_axis(&mut self, name: &str, values: Vec<f64>) -> anyhow::Result<()> {
        match self.axes.iter_mut().find(|a| a.name == name) {
            Some(axis) => {
                if values.is_empty() {
                    bail!("axis {name:?}: value list must not be empty");
                }
                axis.values = values;
                Ok(())
            }
            None => bail!(
                "axis {name:?} does not apply to {} (axes: {})",
                self.method.name(),
                self.axes
                    .iter()
                    .map(|a| a.name)
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TuneRow {
    pub combo: Vec<f64>,
    pub mse_per_dataset: Vec<f64>,
    pub nmse: f64,
}

#[derive(Debug, Clone)]
pub struct TuneResult {
    pub method: Method,
    pub axis_names: Vec<&'static str>,
    pub dataset_names: Vec<String>,
    /// One row per combo, in combo order.
    pub rows: Vec<TuneRow>,
    /// Index into `rows` of the NMSE minimizer (first on ties).
    pub best: usize,
}

impl TuneResult {
    pub fn best_row(&self) -> &TuneRow {
        &self.rows[self.best]
    }
}

/// The three tuning datasets, generated once from the master seed.
pub fn tuning_datasets(seed: u64) -> Vec<Dataset> {
    let mut blobs_rng = RandomSource::substream(seed, 100);
    let mut circles_rng = RandomSource::substream(seed, 101);
    let mut moons_rng = RandomSource::substream(seed, 102);
    vec![
        make_blobs(1000, &mut blobs_rng),
        make_circles(1000, 0.05, &mut circles_rng),
        make_moons(1000, 0.05, &mut moons_rng),
    ]
}

pub fn grid_search(
    grid: &ParamGrid,
    units: usize,
    runs_per_combo: usize,
    iterations: u64,
    seed: u64,
) -> anyhow::Result<TuneResult> {
    if runs_per_combo == 0 {
        bail!("runs_per_combo: must be at least 1");
    }
    let combos = grid.combos();
    if combos.is_empty() {
        bail!("grid has no combinations");
    }
    let datasets = tuning_datasets(seed);

    let per_combo: Vec<Vec<f64>> = combos
        .par_iter()
        .map(|combo| -> anyhow::Result<Vec<f64>> {
            let params = grid.params_for(combo)?;
            let mut avg = Vec::with_capacity(datasets.len());
            for (m, ds) in datasets.iter().enumerate() {
                let stream = StreamSpec::single(ds.clone());
                let mut total = 0.0;
                for r in 0..runs_per_combo {
                    // seed depends on (dataset, run) only: fair across combos
                    let run_seed = runner::derive_seed(seed, (m as u64) << 32 | r as u64);
                    let model = runner::train_only(
                        grid.method,
                        &params,
                        units,
                        &stream,
                        iterations,
                        run_seed,
                    )?;
                    total += mean_quantization_error(ds.points(), model.codebook())?;
                }
                avg.push(total / runs_per_combo as f64);
            }
            Ok(avg)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    let mut max_per_dataset = vec![0.0f64; datasets.len()];
    for row in &per_combo {
        for (m, &v) in row.iter().enumerate() {
            max_per_dataset[m] = max_per_dataset[m].max(v);
        }
    }
    let rows: Vec<TuneRow> = combos
        .into_iter()
        .zip(per_combo)
        .map(|(combo, mse_per_dataset)| {
            let nmse = mse_per_dataset
                .iter()
                .zip(&max_per_dataset)
                .map(|(&v, &mx)| if mx > 0.0 { v / mx } else { 0.0 })
                .sum();
            TuneRow {
                combo,
                mse_per_dataset,
                nmse,
            }
        })
        .collect();
    let mut best = 0;
    for (i, row) in rows.iter().enumerate() {
        if row.nmse < rows[best].nmse {
            best = i;
        }
    }
    Ok(TuneResult {
        method: grid.method,
        axis_names: grid.axes.iter().map(|a| a.name).collect(),
        dataset_names: datasets.iter().map(|d| d.name().to_owned()).collect(),
        rows,
        best,
    })
}

/// Writes the full table sorted by NMSE (ascending, stable).
pub fn write_tune_csv(path: &Path, result: &TuneResult) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    let mut header: Vec<String> = result.axis_names.iter().map(|s| s.to_string()).collect();
    for name in &result.dataset_names {
        header.push(format!("mse_{name}"));
    }
    header.push("nmse".into());
    writeln!(w, "{}", header.join(","))?;
    let mut order: Vec<usize> = (0..result.rows.len()).collect();
    order.sort_by(|&a, &b| result.rows[a].nmse.total_cmp(&result.rows[b].nmse));
    for i in order {
        let row = &result.rows[i];
        let mut cells: Vec<String> = row.combo.iter().map(|v| v.to_string()).collect();
        cells.extend(row.mse_per_dataset.iter().map(|v| v.to_string()));
        cells.push(row.nmse.to_string());
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()?;
    Ok(())
}
