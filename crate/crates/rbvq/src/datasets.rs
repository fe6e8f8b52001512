//! Builtin datasets and expected-characteristics validation.
//!
//! Besides the three synthetic generators from the core crate (blobs,
//! circles, moons), this module synthesizes deterministic stand-ins for the
//! classic clustering benchmark files (aggregation, compound, t48k, t710k,
//! iris, wine, digits). Each stand-in reproduces the original's point
//! count, dimensionality, and value range (cluster layouts are
//! approximations of the classic layouts), so experiments that depend on
//! range mismatch between data and the unit init keep their meaning.
//! `validate` checks any loaded dataset against the expected table.

use rbvq_core::stream::{make_blobs, make_circles, make_moons, Dataset};
use rbvq_core::RandomSource;

/// Expected dataset characteristics: exact point count and dimension, the
/// pooled value range, and the pooled standard deviation. `approx_range`
/// marks generators whose range is only nominal (noise widens it).
#[derive(Debug, Clone, Copy)]
pub struct Characteristics {
    pub name: &'static str,
    pub n: usize,
    pub d: usize,
    pub std: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub approx_range: bool,
}

pub const CHARACTERISTICS: &[Characteristics] = &[
    Characteristics {
        name: "blobs",
        n: 1000,
        d: 2,
        std: None,
        min: None,
        max: None,
        approx_range: true,
    },
    Characteristics {
        name: "circles",
        n: 1000,
        d: 2,
        std: None,
        min: Some(-1.0),
        max: Some(1.0),
        approx_range: true,
    },
    Characteristics {
        name: "moons",
        n: 1000,
        d: 2,
        std: None,
        min: Some(-1.0),
        max: Some(2.0),
        approx_range: true,
    },
    Characteristics {
        name: "aggregation",
        n: 788,
        d: 2,
        std: Some(9.44),
        min: Some(1.95),
        max: Some(36.6),
        approx_range: false,
    },
    Characteristics {
        name: "compound",
        n: 399,
        d: 2,
        std: Some(8.69),
        min: Some(5.75),
        max: Some(42.9),
        approx_range: false,
    },
    Characteristics {
        name: "t48k",
        n: 8000,
        d: 2,
        std: Some(147.0),
        min: Some(14.6),
        max: Some(635.0),
        approx_range: false,
    },
    Characteristics {
        name: "t710k",
        n: 10000,
        d: 2,
        std: Some(170.0),
        min: Some(0.797),
        max: Some(696.0),
        approx_range: false,
    },
    Characteristics {
        name: "iris",
        n: 150,
        d: 4,
        std: Some(1.97),
        min: Some(0.1),
        max: Some(7.9),
        approx_range: false,
    },
    Characteristics {
        name: "wine",
        n: 178,
        d: 13,
        std: Some(216.0),
        min: Some(0.13),
        max: Some(1680.0),
        approx_range: false,
    },
    Characteristics {
        name: "digits",
        n: 1797,
        d: 64,
        std: Some(6.02),
        min: Some(0.0),
        max: Some(16.0),
        approx_range: false,
    },
];

pub fn expected(name: &str) -> Option<&'static Characteristics> {
    CHARACTERISTICS.iter().find(|c| c.name == name)
}

pub const BUILTIN_NAMES: &[&str] = &[
    "blobs",
    "circles",
    "moons",
    "aggregation",
    "compound",
    "t48k",
    "t710k",
    "iris",
    "wine",
    "digits",
];

/// Builds a builtin dataset. `n_override` applies only to the three
/// parameterless generators (blobs, circles, moons); the benchmark
/// stand-ins keep their fixed sizes. Deterministic given (name, seed).
pub fn builtin(name: &str, n_override: Option<usize>, seed: u64) -> Option<Dataset> {
    let mut rng = RandomSource::substream(seed, fxhash(name));
    let n = n_override.unwrap_or(1000);
    match name {
        "blobs" => Some(make_blobs(n, &mut rng)),
        "circles" => Some(make_circles(n, 0.05, &mut rng)),
        "moons" => Some(make_moons(n, 0.05, &mut rng)),
        "aggregation" => Some(aggregation_like(&mut rng)),
        "compound" => Some(compound_like(&mut rng)),
        "t48k" => Some(t48k_like(&mut rng)),
        "t710k" => Some(t710k_like(&mut rng)),
        "iris" => Some(iris_like(&mut rng)),
        "wine" => Some(wine_like(&mut rng)),
        "digits" => Some(digits_like(&mut rng)),
        _ => None,
    }
}

/// Checks a dataset against expected characteristics; returns the list of
/// violations (empty means it passes). Range is checked to 2% (or loosely
/// for approximate generators), pooled std to 30%.
pub fn validate(ds: &Dataset, exp: &Characteristics) -> Vec<String> {
    let mut issues = Vec::new();
    if ds.len() != exp.n {
        issues.push(format!("point count {} != expected {}", ds.len(), exp.n));
    }
    if ds.dim() != exp.d {
        issues.push(format!("dimension {} != expected {}", ds.dim(), exp.d));
    }
    let (lo, hi) = ds.value_range();
    let range_tol = |v: f64| {
        if exp.approx_range {
            0.35
        } else {
            0.02 * v.abs().max(1.0)
        }
    };
    if let Some(min) = exp.min {
        if (lo - min).abs() > range_tol(min) {
            issues.push(format!("min value {lo:.4} != expected {min}"));
        }
    }
    if let Some(max) = exp.max {
        if (hi - max).abs() > range_tol(max) {
            issues.push(format!("max value {hi:.4} != expected {max}"));
        }
    }
    if let Some(std) = exp.std {
        let got = ds.value_std();
        if (got - std).abs() > 0.30 * std {
            issues.push(format!("pooled std {got:.3} != expected {std} (30% tol)"));
        }
    }
    issues
}

// stable tiny hash so each builtin gets its own substream
fn fxhash(name: &str) -> u64 {
    name.bytes().fold(0xcbf29ce484222325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x100000001b3)
    })
}

struct Cluster {
    center: &'static [f64],
    spread: &'static [f64],
    /// mixes spread[0]'s draw into later coordinates, tilting the cluster
    shear: f64,
    count: usize,
}

fn mixture(name: &str, dim: usize, clusters: &[Cluster], rng: &mut RandomSource) -> Vec<f64> {
    let total: usize = clusters.iter().map(|c| c.count).sum();
    let mut data = Vec::with_capacity(total * dim);
    for c in clusters {
        assert_eq!(c.center.len(), dim, "{name}: bad cluster spec");
        for _ in 0..c.count {
            let first = rng.normal();
            data.push(c.center[0] + c.spread[0] * first);
            for d in 1..dim {
                data.push(c.center[d] + c.spread[d] * rng.normal() + c.shear * c.spread[0] * first);
            }
        }
    }
    data
}

fn uniform_noise(
    data: &mut Vec<f64>,
    count: usize,
    lo: &[f64],
    hi: &[f64],
    rng: &mut RandomSource,
) {
    for _ in 0..count {
        for d in 0..lo.len() {
            data.push(rng.range_f64(lo[d], hi[d]));
        }
    }
}

/// Affine map of all coordinates so the pooled range lands on [lo, hi].
fn rescale_to(data: &mut [f64], lo: f64, hi: f64) {
    let cur_lo = data.iter().cloned().fold(f64::INFINITY, f64::min);
    let cur_hi = data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scale = (hi - lo) / (cur_hi - cur_lo);
    for v in data.iter_mut() {
        *v = lo + (*v - cur_lo) * scale;
    }
}

fn aggregation_like(rng: &mut RandomSource) -> Dataset {
    let clusters = [
        Cluster {
            center: &[7.0, 25.0],
            spread: &[1.7, 1.7],
            shear: 0.0,
            count: 45,
        },
        Cluster {
            center: &[20.0, 27.0],
            spread: &[2.6, 2.2],
            shear: 0.0,
            count: 170,
        },
        Cluster {
            center: &[32.0, 22.0],
            spread: &[1.9, 1.9],
            shear: 0.0,
            count: 102,
        },
        Cluster {
            center: &[12.0, 10.0],
            spread: &[3.1, 2.7],
            shear: 0.0,
            count: 273,
        },
        Cluster {
            center: &[6.0, 4.0],
            spread: &[1.0, 1.0],
            shear: 0.0,
            count: 34,
        },
        Cluster {
            center: &[24.0, 7.0],
            spread: &[2.3, 2.0],
            shear: 0.0,
            count: 130,
        },
        Cluster {
            center: &[33.0, 12.0],
            spread: &[1.3, 1.3],
            shear: 0.0,
            count: 34,
        },
    ];
    let mut data = mixture("aggregation", 2, &clusters, rng);
    rescale_to(&mut data, 1.95, 36.6);
    Dataset::new("aggregation", 2, data).expect("generated data is valid")
}

fn compound_like(rng: &mut RandomSource) -> Dataset {
    let clusters = [
        Cluster {
            center: &[12.0, 19.0],
            spread: &[1.5, 1.5],
            shear: 0.0,
            count: 50,
        },
        Cluster {
            center: &[20.0, 17.0],
            spread: &[2.2, 1.9],
            shear: 0.0,
            count: 92,
        },
        Cluster {
            center: &[13.0, 9.0],
            spread: &[1.2, 1.2],
            shear: 0.0,
            count: 38,
        },
        Cluster {
            center: &[27.0, 11.0],
            spread: &[1.6, 1.6],
            shear: 0.0,
            count: 45,
        },
        Cluster {
            center: &[35.0, 15.0],
            spread: &[3.3, 2.9],
            shear: 0.0,
            count: 158,
        },
        Cluster {
            center: &[38.0, 7.0],
            spread: &[0.8, 0.8],
            shear: 0.0,
            count: 16,
        },
    ];
    let mut data = mixture("compound", 2, &clusters, rng);
    rescale_to(&mut data, 5.75, 42.9);
    Dataset::new("compound", 2, data).expect("generated data is valid")
}

fn t48k_like(rng: &mut RandomSource) -> Dataset {
    // Six thin sinusoidal filaments plus sparse background noise. The
    // filament geometry (long, curvy, narrow) is the defining trait of this
    // benchmark and is what pushes a gas network toward chain-like topology.
    struct Snake {
        start: (f64, f64),
        length: f64,
        amplitude: f64,
        period: f64,
        phase: f64,
        thickness: f64,
        count: usize,
    }
    let snakes = [
        Snake {
            start: (30.0, 250.0),
            length: 260.0,
            amplitude: 30.0,
            period: 160.0,
            phase: 0.0,
            thickness: 6.0,
            count: 1300,
        },
        Snake {
            start: (340.0, 270.0),
            length: 260.0,
            amplitude: 26.0,
            period: 140.0,
            phase: 1.5,
            thickness: 6.0,
            count: 1300,
        },
        Snake {
            start: (40.0, 160.0),
            length: 280.0,
            amplitude: 24.0,
            period: 180.0,
            phase: 3.0,
            thickness: 6.0,
            count: 1250,
        },
        Snake {
            start: (360.0, 150.0),
            length: 250.0,
            amplitude: 28.0,
            period: 150.0,
            phase: 4.4,
            thickness: 6.0,
            count: 1250,
        },
        Snake {
            start: (30.0, 60.0),
            length: 270.0,
            amplitude: 22.0,
            period: 170.0,
            phase: 2.2,
            thickness: 6.0,
            count: 1250,
        },
        Snake {
            start: (350.0, 50.0),
            length: 260.0,
            amplitude: 26.0,
            period: 155.0,
            phase: 5.1,
            thickness: 6.0,
            count: 1050,
        },
    ];
    let mut data = Vec::with_capacity(8000 * 2);
    for s in &snakes {
        for _ in 0..s.count {
            let along = rng.range_f64(0.0, s.length);
            let x = s.start.0 + along;
            let y = s.start.1
                + s.amplitude * (core::f64::consts::TAU * along / s.period + s.phase).sin()
                + s.thickness * rng.normal();
            data.push(x);
            data.push(y);
        }
    }
    uniform_noise(&mut data, 600, &[0.0, 0.0], &[640.0, 330.0], rng);
    rescale_to(&mut data, 14.6, 635.0);
    Dataset::new("t48k", 2, data).expect("generated data is valid")
}

fn t710k_like(rng: &mut RandomSource) -> Dataset {
    let clusters = [
        Cluster {
            center: &[80.0, 280.0],
            spread: &[34.0, 22.0],
            shear: 0.0,
            count: 1000,
        },
        Cluster {
            center: &[250.0, 300.0],
            spread: &[40.0, 20.0],
            shear: 0.3,
            count: 1000,
        },
        Cluster {
            center: &[420.0, 280.0],
            spread: &[36.0, 24.0],
            shear: -0.3,
            count: 1000,
        },
        Cluster {
            center: &[600.0, 300.0],
            spread: &[30.0, 22.0],
            shear: 0.0,
            count: 1000,
        },
        Cluster {
            center: &[100.0, 120.0],
            spread: &[38.0, 20.0],
            shear: -0.25,
            count: 1000,
        },
        Cluster {
            center: &[280.0, 80.0],
            spread: &[42.0, 18.0],
            shear: 0.25,
            count: 1000,
        },
        Cluster {
            center: &[450.0, 130.0],
            spread: &[34.0, 22.0],
            shear: 0.0,
            count: 1000,
        },
        Cluster {
            center: &[620.0, 90.0],
            spread: &[30.0, 18.0],
            shear: -0.2,
            count: 1000,
        },
        Cluster {
            center: &[350.0, 200.0],
            spread: &[38.0, 20.0],
            shear: 0.2,
            count: 1000,
        },
    ];
    let mut data = mixture("t710k", 2, &clusters, rng);
    uniform_noise(&mut data, 1000, &[0.0, 0.0], &[700.0, 350.0], rng);
    rescale_to(&mut data, 0.797, 696.0);
    Dataset::new("t710k", 2, data).expect("generated data is valid")
}

fn iris_like(rng: &mut RandomSource) -> Dataset {
    let clusters = [
        Cluster {
            center: &[5.0, 3.4, 1.5, 0.25],
            spread: &[0.35, 0.38, 0.17, 0.1],
            shear: 0.0,
            count: 50,
        },
        Cluster {
            center: &[5.9, 2.8, 4.3, 1.3],
            spread: &[0.5, 0.31, 0.47, 0.2],
            shear: 0.0,
            count: 50,
        },
        Cluster {
            center: &[6.6, 3.0, 5.6, 2.0],
            spread: &[0.63, 0.32, 0.55, 0.27],
            shear: 0.0,
            count: 50,
        },
    ];
    let mut data = mixture("iris", 4, &clusters, rng);
    rescale_to(&mut data, 0.1, 7.9);
    Dataset::new("iris", 4, data).expect("generated data is valid")
}

fn wine_like(rng: &mut RandomSource) -> Dataset {
    // 13 features with magnitudes spanning four orders: the last
    // (proline-like) dominates the pooled spread.
    let clusters = [
        Cluster {
            center: &[
                13.7, 2.0, 2.5, 17.0, 106.0, 2.8, 3.0, 0.29, 1.9, 5.5, 1.06, 3.2, 1100.0,
            ],
            spread: &[
                0.46, 0.7, 0.23, 2.5, 10.0, 0.34, 0.4, 0.07, 0.41, 1.2, 0.12, 0.36, 220.0,
            ],
            shear: 0.0,
            count: 59,
        },
        Cluster {
            center: &[
                12.3, 1.9, 2.2, 20.2, 95.0, 2.3, 2.1, 0.36, 1.6, 3.1, 1.05, 2.8, 520.0,
            ],
            spread: &[
                0.54, 1.0, 0.32, 3.3, 17.0, 0.55, 0.7, 0.12, 0.6, 0.9, 0.2, 0.5, 160.0,
            ],
            shear: 0.0,
            count: 71,
        },
        Cluster {
            center: &[
                13.2, 3.3, 2.4, 21.4, 99.0, 1.7, 0.78, 0.45, 1.15, 7.4, 0.68, 1.68, 630.0,
            ],
            spread: &[
                0.53, 1.1, 0.18, 2.3, 11.0, 0.36, 0.29, 0.12, 0.41, 2.3, 0.11, 0.27, 115.0,
            ],
            shear: 0.0,
            count: 48,
        },
    ];
    let mut data = mixture("wine", 13, &clusters, rng);
    rescale_to(&mut data, 0.13, 1680.0);
    Dataset::new("wine", 13, data).expect("generated data is valid")
}

fn digits_like(rng: &mut RandomSource) -> Dataset {
    // 10 cluster templates over 64 pixel intensities in 0..=16, blurred
    // with noise, clamped and rounded like the original integer images.
    let mut templates: Vec<Vec<f64>> = Vec::with_capacity(10);
    for _ in 0..10 {
        templates.push(
            (0..64)
                .map(|_| {
                    if rng.unit_f64() < 0.45 {
                        0.0
                    } else {
                        rng.range_f64(4.0, 16.0)
                    }
                })
                .collect(),
        );
    }
    let mut data = Vec::with_capacity(1797 * 64);
    for i in 0..1797 {
        for &base in &templates[i % 10] {
            let v = base + 2.5 * rng.normal();
            data.push(v.clamp(0.0, 16.0).round());
        }
    }
    Dataset::new("digits", 64, data).expect("generated data is valid")
}
