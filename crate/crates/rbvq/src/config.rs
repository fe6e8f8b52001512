//! Run configuration: method names, tuned default parameters, and the TOML
//! config file schema.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use rbvq_core::stream::{Dataset, DriftKind};
use serde::Deserialize;

use crate::datasets;
use crate::io::{self, LabelColumn};
use crate::runner::{EvalScope, Experiment, StreamSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Okrb,
    Somrb,
    Ngrb,
    OkrbEb,
    SomrbEb,
    NgrbEb,
    Okmeans,
    Som,
    Ng,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Okrb,
        Method::Somrb,
        Method::Ngrb,
        Method::OkrbEb,
        Method::SomrbEb,
        Method::NgrbEb,
        Method::Okmeans,
        Method::Som,
        Method::Ng,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Okrb => "okrb",
            Method::Somrb => "somrb",
            Method::Ngrb => "ngrb",
            Method::OkrbEb => "okrb_eb",
            Method::SomrbEb => "somrb_eb",
            Method::NgrbEb => "ngrb_eb",
            Method::Okmeans => "okmeans",
            Method::Som => "som",
            Method::Ng => "ng",
        }
    }

    pub fn from_name(s: &str) -> Option<Method> {
        Method::ALL.iter().copied().find(|m| m.name() == s)
    }

    /// Tuned defaults for each method.
    pub fn default_params(self) -> Params {
        match self {
            Method::Okrb => Params {
                epsilon: 0.1,
                th_rb: 0.01,
                beta: 0.005,
                ..Params::BASE
            },
            Method::OkrbEb => Params {
                epsilon: 0.3,
                th_rb: 0.01,
                beta: 0.005,
                ..Params::BASE
            },
            Method::Okmeans => Params {
                epsilon: 0.5,
                ..Params::BASE
            },
            Method::Somrb => Params {
                epsilon: 0.2,
                sigma: 0.5,
                th_rb: 0.1,
                beta: 0.0001,
                ..Params::BASE
            },
            Method::SomrbEb => Params {
                epsilon: 0.3,
                sigma: 0.5,
                th_rb: 0.5,
                beta: 0.0005,
                ..Params::BASE
            },
            Method::Som => Params {
                epsilon: 0.4,
                sigma: 0.5,
                ..Params::BASE
            },
            Method::Ngrb => Params {
                epsilon: 0.3,
                lambda: 0.5,
                a_max: 75,
                th_rb: 0.01,
                beta: 0.005,
                ..Params::BASE
            },
            Method::NgrbEb => Params {
                epsilon: 0.3,
                lambda: 1.0,
                a_max: 100,
                th_rb: 0.01,
                beta: 0.005,
                ..Params::BASE
            },
            Method::Ng => Params {
                epsilon: 0.3,
                lambda: 2.0,
                a_max: 75,
                ..Params::BASE
            },
        }
    }
}

/// Flat parameter bundle; each method reads the fields it uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub epsilon: f64,
    pub sigma: f64,
    pub lambda: f64,
    pub a_max: u32,
    pub th_rb: f64,
    pub beta: f64,
}

impl Params {
    const BASE: Params = Params {
        epsilon: 0.1,
        sigma: 0.5,
        lambda: 0.5,
        a_max: 75,
        th_rb: 0.01,
        beta: 0.005,
    };
}

fn default_units() -> usize {
    100
}
fn default_stride() -> u64 {
    100
}
fn default_window() -> usize {
    1000
}
fn default_runs() -> usize {
    1
}
fn default_segment_length() -> u64 {
    100_000
}
fn default_t_dur() -> u64 {
    10_000
}
fn default_segment_n() -> usize {
    1000
}
fn default_kind() -> String {
    "static".into()
}

/// TOML schema of a run config. Unknown fields are rejected so typos are
/// reported by name.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub method: String,
    #[serde(default = "default_units")]
    pub units: usize,
    pub iterations: u64,
    #[serde(default = "default_stride")]
    pub eval_stride: u64,
    #[serde(default = "default_window")]
    pub window: usize,
    /// "dataset" (metrics over the whole static dataset) or "window"
    /// (metrics over the last `window` stream points). Defaults to dataset
    /// for single-segment streams and window otherwise.
    #[serde(default)]
    pub eval_scope: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub export_graph: Option<PathBuf>,
    #[serde(default)]
    pub params: ParamsOverride,
    pub stream: StreamSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsOverride {
    pub epsilon: Option<f64>,
    pub sigma: Option<f64>,
    pub lambda: Option<f64>,
    pub a_max: Option<u32>,
    pub th_rb: Option<f64>,
    pub beta: Option<f64>,
}

impl ParamsOverride {
    pub fn apply(&self, mut p: Params) -> Params {
        if let Some(v) = self.epsilon {
            p.epsilon = v;
        }
        if let Some(v) = self.sigma {
            p.sigma = v;
        }
        if let Some(v) = self.lambda {
            p.lambda = v;
        }
        if let Some(v) = self.a_max {
            p.a_max = v;
        }
        if let Some(v) = self.th_rb {
            p.th_rb = v;
        }
        if let Some(v) = self.beta {
            p.beta = v;
        }
        p
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamSection {
    /// static | sudden | gradual | recurring
    #[serde(default = "default_kind")]
    pub kind: String,
    /// Builtin dataset names or CSV file paths.
    pub segments: Vec<String>,
    #[serde(default = "default_segment_length")]
    pub segment_length: u64,
    #[serde(default = "default_t_dur")]
    pub t_dur: u64,
    /// Point count for the sized builtin generators (blobs, circles, moons).
    #[serde(default = "default_segment_n")]
    pub segment_n: usize,
    /// Seed for builtin dataset generation (separate from the run seed so
    /// every run trains against the same data).
    #[serde(default)]
    pub data_seed: u64,
    #[serde(default)]
    pub has_header: bool,
    /// none | last
    #[serde(default)]
    pub label_column: Option<String>,
}

pub fn parse_file(path: &Path) -> anyhow::Result<RunConfigFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let cfg: RunConfigFile =
        toml::from_str(&text).with_context(|| format!("config {}", path.display()))?;
    Ok(cfg)
}

/// Loads one stream segment: a builtin name or a CSV path.
pub fn load_segment(spec: &str, stream: &StreamSection) -> anyhow::Result<Dataset> {
    if let Some(ds) = datasets::builtin(spec, Some(stream.segment_n), stream.data_seed) {
        return Ok(ds);
    }
    let path = Path::new(spec);
    if !path.exists() {
        bail!(
            "stream.segments: {spec:?} is neither a builtin dataset ({}) nor an existing file",
            datasets::BUILTIN_NAMES.join(", ")
        );
    }
    let label = match stream.label_column.as_deref() {
        None | Some("none") => LabelColumn::None,
        Some("last") => LabelColumn::Last,
        Some(other) => bail!("stream.label_column: unknown value {other:?} (use none|last)"),
    };
    io::load_csv_dataset(path, stream.has_header, label).map_err(|e| anyhow!(e))
}

/// Validates the parsed file and materializes datasets into an experiment.
pub fn resolve(cfg: &RunConfigFile) -> anyhow::Result<Experiment> {
    let method = Method::from_name(&cfg.method).ok_or_else(|| {
        anyhow!(
            "method: unknown {:?} (expected one of {})",
            cfg.method,
            Method::ALL.map(|m| m.name()).join(", ")
        )
    })?;
    if cfg.iterations == 0 {
        bail!("iterations: must be at least 1");
    }
    if cfg.eval_stride == 0 {
        bail!("eval_stride: must be at least 1");
    }
    if cfg.window == 0 {
        bail!("window: must be at least 1");
    }
    if cfg.runs == 0 {
        bail!("runs: must be at least 1");
    }
    if cfg.stream.segments.is_empty() {
        bail!("stream.segments: must name at least one dataset");
    }
    let segments: Vec<Dataset> = cfg
        .stream
        .segments
        .iter()
        .map(|s| load_segment(s, &cfg.stream))
        .collect::<anyhow::Result<_>>()?;

    let kind = match cfg.stream.kind.as_str() {
        "static" => {
            if segments.len() != 1 {
                bail!("stream.kind: static streams take exactly one segment");
            }
            None
        }
        "sudden" => Some(DriftKind::Sudden),
        "gradual" => Some(DriftKind::Gradual {
            t_dur: cfg.stream.t_dur,
        }),
        "recurring" => Some(DriftKind::Recurring),
        other => {
            bail!("stream.kind: unknown value {other:?} (use static|sudden|gradual|recurring)")
        }
    };

    let eval_scope = match cfg.eval_scope.as_deref() {
        Some("dataset") => {
            if segments.len() != 1 {
                bail!("eval_scope: dataset scope needs a single-segment stream");
            }
            EvalScope::Dataset
        }
        Some("window") => EvalScope::Window,
        None => {
            if segments.len() == 1 {
                EvalScope::Dataset
            } else {
                EvalScope::Window
            }
        }
        Some(other) => bail!("eval_scope: unknown value {other:?} (use dataset|window)"),
    };

    let params = cfg.params.apply(method.default_params());
    Ok(Experiment {
        method,
        params,
        units: cfg.units,
        iterations: cfg.iterations,
        eval_stride: cfg.eval_stride,
        window: cfg.window,
        eval_scope,
        stream: StreamSpec {
            segments,
            kind,
            segment_length: cfg.stream.segment_length,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let cfg: RunConfigFile = toml::from_str(
            r#"
            method = "okrb"
            iterations = 1000
            [stream]
            segments = ["blobs"]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.units, 100);
        assert_eq!(cfg.eval_stride, 100);
        let exp = resolve(&cfg).unwrap();
        assert_eq!(exp.method, Method::Okrb);
        assert_eq!(exp.params.epsilon, 0.1);
        assert_eq!(exp.stream.segments[0].len(), 1000);
        assert!(matches!(exp.eval_scope, EvalScope::Dataset));
    }

    #[test]
    fn unknown_field_is_named() {
        let err = toml::from_str::<RunConfigFile>(
            r#"
            method = "okrb"
            iterations = 1000
            bogus_field = 3
            [stream]
            segments = ["blobs"]
            "#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("bogus_field"));
    }

    #[test]
    fn unknown_method_is_rejected() {
        let cfg: RunConfigFile = toml::from_str(
            r#"
            method = "kmeans++"
            iterations = 10
            [stream]
            segments = ["blobs"]
            "#,
        )
        .unwrap();
        let err = resolve(&cfg).unwrap_err().to_string();
        assert!(err.contains("method"), "{err}");
    }

    #[test]
    fn params_override_applies() {
        let cfg: RunConfigFile = toml::from_str(
            r#"
            method = "ngrb"
            iterations = 10
            [params]
            epsilon = 0.05
            a_max = 25
            [stream]
            segments = ["blobs"]
            "#,
        )
        .unwrap();
        let exp = resolve(&cfg).unwrap();
        assert_eq!(exp.params.epsilon, 0.05);
        assert_eq!(exp.params.a_max, 25);
        assert_eq!(exp.params.lambda, 0.5); // untouched default
    }

    #[test]
    fn static_kind_rejects_multiple_segments() {
        let cfg: RunConfigFile = toml::from_str(
            r#"
            method = "okrb"
            iterations = 10
            [stream]
            kind = "static"
            segments = ["blobs", "moons"]
            "#,
        )
        .unwrap();
        let err = resolve(&cfg).unwrap_err().to_string();
        assert!(err.contains("static"), "{err}");
    }

    #[test]
    fn default_scope_follows_segment_count() {
        let cfg: RunConfigFile = toml::from_str(
            r#"
            method = "okrb"
            iterations = 10
            [stream]
            kind = "sudden"
            segments = ["blobs", "moons"]
            "#,
        )
        .unwrap();
        let exp = resolve(&cfg).unwrap();
        assert!(matches!(exp.eval_scope, EvalScope::Window));
    }

    #[test]
    fn every_method_name_roundtrips() {
        for m in Method::ALL {
            assert_eq!(Method::from_name(m.name()), Some(m));
        }
        assert_eq!(Method::from_name("bogus"), None);
    }
}
