//! Command-line benchmark harness for remove-birth vector quantization.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};

use rbvq::config::{self, Method};
use rbvq::datasets;
use rbvq::io::{self, LabelColumn};
use rbvq::plot;
use rbvq::runner;
use rbvq::tune::{self, ParamGrid};

#[derive(Parser)]
#[command(
    name = "rbvq",
    version,
    about = "Streaming vector quantization with remove-birth updating: run experiments, tune, plot"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Train a configured method on a stream and emit metrics CSVs
    Run(RunArgs),
    /// Grid-search hyperparameters, minimizing NMSE over blobs/circles/moons
    Tune(TuneArgs),
    /// Render metric trajectories from metrics CSVs into an SVG
    Plot(PlotArgs),
    /// Generate or validate dataset CSVs
    Datasets {
        #[command(subcommand)]
        cmd: DatasetsCmd,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Override the config's base seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's run count (seeds seed..seed+runs-1)
    #[arg(long)]
    runs: Option<usize>,
    /// Override the config's output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the first run's final topology to <stem>.units/.edges/.positions
    #[arg(long)]
    export_graph: Option<PathBuf>,
}

#[derive(Args)]
struct TuneArgs {
    /// Method whose default grid to search
    #[arg(long)]
    method: String,
    #[arg(long, default_value_t = 100)]
    units: usize,
    /// Training iterations per run
    #[arg(long, default_value_t = 50_000)]
    iters: u64,
    /// Runs per combination per dataset
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the full result table (CSV, sorted by NMSE)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace one axis's values, e.g. --axis epsilon=0.05,0.1 (repeatable)
    #[arg(long = "axis", value_parser = parse_axis)]
    axes: Vec<(String, Vec<f64>)>,
}

#[derive(Args)]
struct PlotArgs {
    /// Metric column to plot (mse, dead_units, avg_degree, avg_clustering, rb_count)
    #[arg(long)]
    metric: String,
    /// Log10-scale the y axis
    #[arg(long)]
    log_y: bool,
    /// Output SVG path
    #[arg(long)]
    out: PathBuf,
    /// Metrics CSV files, one line each
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum DatasetsCmd {
    /// Write every builtin dataset as a CSV into a directory
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check dataset CSVs against the expected characteristics table
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        has_header: bool,
        /// none | last
        #[arg(long)]
        label_column: Option<String>,
    },
}

fn parse_axis(s: &str) -> Result<(String, Vec<f64>), String> {
    let (name, rest) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=v1,v2,... got {s:?}"))?;
    let values = rest
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
        .collect::<Result<Vec<f64>, String>>()?;
    if values.is_empty() {
        return Err("axis needs at least one value".into());
    }
    Ok((name.to_string(), values))
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Tune(args) => cmd_tune(args),
        Cmd::Plot(args) => plot::render_line_svg(&args.inputs, &args.metric, args.log_y, &args.out)
            .map(|()| println!("wrote {}", args.out.display())),
        Cmd::Datasets { cmd } => match cmd {
            DatasetsCmd::Generate { out, seed } => cmd_generate(out, seed),
            DatasetsCmd::Validate {
                files,
                has_header,
                label_column,
            } => cmd_validate(files, has_header, label_column),
        },
    }
}

fn cmd_run(args: RunArgs) -> anyhow::Result<()> {
    let mut cfg = config::parse_file(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(runs) = args.runs {
        cfg.runs = runs;
    }
    if let Some(out) = args.out {
        cfg.out = Some(out);
    }
    let out_dir = cfg
        .out
        .clone()
        .ok_or_else(|| anyhow!("out: set it in the config or pass --out"))?;
    let exp = config::resolve(&cfg)?;
    runner::log_experiment(&exp, cfg.seed, cfg.runs);
    let outcome = runner::run_many(&exp, cfg.seed, cfg.runs)?;
    let files = outcome.write_csvs(&out_dir)?;
    println!("wrote {} files to {}", files.len(), out_dir.display());
    println!("{}", outcome.summary());
    if let Some(stem) = args.export_graph.or(cfg.export_graph) {
        let written = outcome.first_model.export_graph(&stem)?;
        for f in &written {
            println!("wrote {}", f.display());
        }
        if written.len() == 1 {
            println!(
                "note: {} keeps no graph, wrote units only",
                exp.method.name()
            );
        }
    }
    Ok(())
}

fn cmd_tune(args: TuneArgs) -> anyhow::Result<()> {
    let method = Method::from_name(&args.method).ok_or_else(|| {
        anyhow!(
            "method: unknown {:?} (expected one of {})",
            args.method,
            Method::ALL.map(|m| m.name()).join(", ")
        )
    })?;
    let mut grid = ParamGrid::table_defaults(method);
    for (name, values) in &args.axes {
        grid.override_axis(name, values.clone())?;
    }
    log::info!(
        "tuning {} over {} combinations, {} runs x {} iterations each",
        method.name(),
        grid.combo_count(),
        args.runs,
        args.iters
    );
    let result = tune::grid_search(&grid, args.units, args.runs, args.iters, args.seed)?;
    let best = result.best_row();
    let named: Vec<String> = result
        .axis_names
        .iter()
        .zip(&best.combo)
        .map(|(n, v)| format!("{n}={v}"))
        .collect();
    println!("best combo: {} (nmse {:.6})", named.join(" "), best.nmse);
    for (name, v) in result.dataset_names.iter().zip(&best.mse_per_dataset) {
        println!("  {name}: {v:.6}");
    }
    if let Some(out) = args.out {
        tune::write_tune_csv(&out, &result)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_generate(out: PathBuf, seed: u64) -> anyhow::Result<()> {
    std::fs::create_dir_all(&out).with_context(|| format!("create {}", out.display()))?;
    for &name in datasets::BUILTIN_NAMES {
        let ds = datasets::builtin(name, None, seed).expect("known builtin");
        let path = out.join(format!("{name}.csv"));
        io::save_csv_dataset(&path, &ds)?;
        println!(
            "wrote {} ({} points, dim {})",
            path.display(),
            ds.len(),
            ds.dim()
        );
    }
    Ok(())
}

fn cmd_validate(
    files: Vec<PathBuf>,
    has_header: bool,
    label_column: Option<String>,
) -> anyhow::Result<()> {
    let label = match label_column.as_deref() {
        None | Some("none") => LabelColumn::None,
        Some("last") => LabelColumn::Last,
        Some(other) => bail!("label-column: unknown value {other:?} (use none|last)"),
    };
    let mut failures = 0usize;
    for path in &files {
        let ds = io::load_csv_dataset(path, has_header, label)?;
        let Some(exp) = datasets::expected(ds.name()) else {
            println!(
                "{}: SKIP (no expected characteristics for {:?})",
                path.display(),
                ds.name()
            );
            continue;
        };
        let issues = datasets::validate(&ds, exp);
        if issues.is_empty() {
            let (lo, hi) = ds.value_range();
            println!(
                "{}: OK (n={}, d={}, range [{lo:.3}, {hi:.3}], std {:.3})",
                path.display(),
                ds.len(),
                ds.dim(),
                ds.value_std()
            );
        } else {
            failures += 1;
            println!("{}: FAIL", path.display());
            for issue in issues {
                println!("  {issue}");
            }
        }
    }
    if failures > 0 {
        bail!("{failures} file(s) failed validation");
    }
    Ok(())
}
