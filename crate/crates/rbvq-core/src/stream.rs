//! Datasets, synthetic generators, and the concept-drift stream composer.
//!
//! A stream draws one input per iteration, uniformly at random (with
//! replacement) from the currently active dataset. Drift kinds:
//!
//! - sudden: the active dataset switches at every segment boundary;
//! - gradual: inside the `t_dur` iterations before a boundary the old
//!   dataset is drawn with probability p_old = (boundary - t) / t_dur,
//!   the new one otherwise;
//! - recurring: the first two datasets alternate at every boundary.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::rng::RandomSource;

/// An immutable set of D-dimensional points, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    dim: usize,
    data: Vec<f64>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParam("dimension must be positive"));
        }
        if data.is_empty() {
            return Err(Error::EmptyPoints);
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidParam("data length not a multiple of dim"));
        }
        for (i, chunk) in data.chunks_exact(dim).enumerate() {
            if !chunk.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite { index: i });
            }
        }
        Ok(Self {
            name: name.into(),
            dim,
            data,
        })
    }

    pub fn from_points(name: impl Into<String>, points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map(Vec::len).unwrap_or(0);
        let mut data = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            data.extend_from_slice(p);
        }
        Self::new(name, dim, data)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// Smallest and largest coordinate value across all points.
    pub fn value_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.data {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    /// Standard deviation pooled over every coordinate of every point.
    pub fn value_std(&self) -> f64 {
        let n = self.data.len() as f64;
        let mean = self.data.iter().sum::<f64>() / n;
        let var = self
            .data
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / n;
        math::sqrt(var)
    }
}

/// Three isotropic unit-variance Gaussian clusters with centers drawn
/// uniformly from [-10, 10]^2; `n` points split as evenly as possible.
pub fn make_blobs(n: usize, rng: &mut RandomSource) -> Dataset {
    assert!(n >= 1);
    let k = 3;
    let centers: Vec<(f64, f64)> = (0..k)
        .map(|_| (rng.range_f64(-10.0, 10.0), rng.range_f64(-10.0, 10.0)))
        .collect();
    let mut counts = [n / k; 3];
    for extra in counts.iter_mut().take(n % k) {
        *extra += 1;
    }
    let mut data = Vec::with_capacity(n * 2);
    for (c, &count) in centers.iter().zip(&counts) {
        for _ in 0..count {
            data.push(c.0 + rng.normal());
            data.push(c.1 + rng.normal());
        }
    }
    Dataset::new("blobs", 2, data).expect("generated data is valid")
}

/// Two concentric circles, radii 1 and 0.5, with Gaussian coordinate noise.
/// Pass `noise = 0.0` to get the exact circles.
pub fn make_circles(n: usize, noise: f64, rng: &mut RandomSource) -> Dataset {
    assert!(n >= 1);
    let n_out = n / 2;
    let n_in = n - n_out;
    let mut data = Vec::with_capacity(n * 2);
    for i in 0..n_out {
        let th = core::f64::consts::TAU * i as f64 / n_out as f64;
        data.push(math::cos(th));
        data.push(math::sin(th));
    }
    for i in 0..n_in {
        let th = core::f64::consts::TAU * i as f64 / n_in as f64;
        data.push(0.5 * math::cos(th));
        data.push(0.5 * math::sin(th));
    }
    if noise > 0.0 {
        for v in &mut data {
            *v += noise * rng.normal();
        }
    }
    Dataset::new("circles", 2, data).expect("generated data is valid")
}

/// Two interleaved half-circle arcs with Gaussian coordinate noise.
/// Pass `noise = 0.0` to get the exact arcs.
pub fn make_moons(n: usize, noise: f64, rng: &mut RandomSource) -> Dataset {
    assert!(n >= 1);
    let n_out = n / 2;
    let n_in = n - n_out;
    let mut data = Vec::with_capacity(n * 2);
    let arc = |i: usize, count: usize| {
        if count <= 1 {
            0.0
        } else {
            core::f64::consts::PI * i as f64 / (count - 1) as f64
        }
    };
    for i in 0..n_out {
        let th = arc(i, n_out);
        data.push(math::cos(th));
        data.push(math::sin(th));
    }
    for i in 0..n_in {
        let th = arc(i, n_in);
        data.push(1.0 - math::cos(th));
        data.push(0.5 - math::sin(th));
    }
    if noise > 0.0 {
        for v in &mut data {
            *v += noise * rng.normal();
        }
    }
    Dataset::new("moons", 2, data).expect("generated data is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftKind {
    Sudden,
    Gradual { t_dur: u64 },
    Recurring,
}

/// Ordered dataset segments plus the drift rule; yields one input per
/// iteration. Draws are deterministic given the seed and the t sequence.
#[derive(Debug, Clone)]
pub struct DriftSchedule {
    segments: Vec<Dataset>,
    kind: DriftKind,
    segment_length: u64,
    rng: RandomSource,
}

impl DriftSchedule {
    pub fn new(
        segments: Vec<Dataset>,
        kind: DriftKind,
        segment_length: u64,
        rng: RandomSource,
    ) -> Result<Self> {
        let Some(first) = segments.first() else {
            return Err(Error::EmptyPoints);
        };
        let dim = first.dim();
        if segments.iter().any(|s| s.dim() != dim) {
            return Err(Error::InvalidParam("segments must share one dimension"));
        }
        if segment_length == 0 {
            return Err(Error::InvalidParam("segment_length must be positive"));
        }
        match kind {
            DriftKind::Gradual { t_dur } => {
                if t_dur == 0 || t_dur > segment_length {
                    return Err(Error::InvalidParam("t_dur must be in 1..=segment_length"));
                }
            }
            DriftKind::Recurring => {
                if segments.len() < 2 {
                    return Err(Error::InvalidParam("recurring drift needs 2 segments"));
                }
            }
            DriftKind::Sudden => {}
        }
        Ok(Self {
            segments,
            kind,
            segment_length,
            rng,
        })
    }

    /// Single static dataset: every draw comes from it.
    pub fn single(dataset: Dataset, rng: RandomSource) -> Self {
        Self {
            segments: alloc::vec![dataset],
            kind: DriftKind::Sudden,
            segment_length: u64::MAX,
            rng,
        }
    }

    pub fn dim(&self) -> usize {
        self.segments[0].dim()
    }

    pub fn segments(&self) -> &[Dataset] {
        &self.segments
    }

    pub fn segment_length(&self) -> u64 {
        self.segment_length
    }

    /// The input for iteration `t` and the index of the segment it came
    /// from. Consumes one uniform draw for the point index, plus one more
    /// inside a gradual-drift window for the old/new choice.
    pub fn next_input(&mut self, t: u64) -> (&[f64], usize) {
        let seg = self.active_segment(t);
        let ds = &self.segments[seg];
        let i = self.rng.index(ds.len());
        (ds.point(i), seg)
    }

    fn active_segment(&mut self, t: u64) -> usize {
        let k = (t / self.segment_length) as usize;
        let last = self.segments.len() - 1;
        match self.kind {
            DriftKind::Sudden => k.min(last),
            DriftKind::Recurring => k % 2,
            DriftKind::Gradual { t_dur } => {
                let k = k.min(last);
                let rem = t % self.segment_length;
                if k < last && rem >= self.segment_length - t_dur {
                    // drifting toward segment k+1; p_old is 1 at the window
                    // start and reaches 0 exactly at the boundary
                    let boundary = (k as u64 + 1) * self.segment_length;
                    let p_old = (boundary - t) as f64 / t_dur as f64;
                    if self.rng.unit_f64() < p_old {
                        k
                    } else {
                        k + 1
                    }
                } else {
                    k
                }
            }
        }
    }
}
