//! Evaluation quantities: quantization error, dead units, topology metrics,
//! and the sliding evaluation window for streaming runs.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::codebook::{squared_distance, Codebook};
use crate::error::{Error, Result};
use crate::math;

/// One evaluation snapshot. Counts are kept as floats so that pointwise
/// means across runs fit the same record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRecord {
    pub iteration: u64,
    pub mse: f64,
    pub dead_units: f64,
    pub avg_degree: f64,
    pub avg_clustering: f64,
    pub rb_count: f64,
}

impl MetricsRecord {
    pub const CSV_HEADER: &'static str =
        "iteration,mse,dead_units,avg_degree,avg_clustering,rb_count";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.iteration,
            self.mse,
            self.dead_units,
            self.avg_degree,
            self.avg_clustering,
            self.rb_count
        )
    }
}

fn nearest_sq_dist(x: &[f64], cb: &Codebook) -> f64 {
    cb.units()
        .iter()
        .map(|u| squared_distance(x, &u.w))
        .fold(f64::INFINITY, f64::min)
}

/// Mean squared distance from each point to its nearest unit.
pub fn mse<'a, I>(points: I, cb: &Codebook) -> Result<f64>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut total = 0.0;
    let mut m = 0usize;
    for x in points {
        cb.check_dim(x)?;
        total += nearest_sq_dist(x, cb);
        m += 1;
    }
    if m == 0 {
        return Err(Error::EmptyPoints);
    }
    Ok(total / m as f64)
}

/// Mean unsquared distance from each point to its nearest unit; the
/// quantity the hyperparameter search normalizes.
pub fn mean_quantization_error<'a, I>(points: I, cb: &Codebook) -> Result<f64>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut total = 0.0;
    let mut m = 0usize;
    for x in points {
        cb.check_dim(x)?;
        total += math::sqrt(nearest_sq_dist(x, cb));
        m += 1;
    }
    if m == 0 {
        return Err(Error::EmptyPoints);
    }
    Ok(total / m as f64)
}

/// Number of units that are nearest to no point (ties assign the point to
/// the lowest unit id, which cannot change the dead count).
pub fn dead_units<'a, I>(points: I, cb: &Codebook) -> Result<usize>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut assigned = vec![false; cb.len()];
    let mut m = 0usize;
    for x in points {
        assigned[cb.find_winner(x)?] = true;
        m += 1;
    }
    if m == 0 {
        return Err(Error::EmptyPoints);
    }
    Ok(assigned.iter().filter(|a| !**a).count())
}

/// Average degree 2L/N from sorted adjacency lists.
pub fn avg_degree(adjacency: &[Vec<usize>]) -> f64 {
    if adjacency.is_empty() {
        return 0.0;
    }
    let total: usize = adjacency.iter().map(Vec::len).sum();
    total as f64 / adjacency.len() as f64
}

/// Mean over units of the local clustering coefficient 2t/(k(k-1)); units
/// of degree < 2 contribute 0. Adjacency lists must be sorted.
pub fn avg_clustering(adjacency: &[Vec<usize>]) -> f64 {
    if adjacency.is_empty() {
        return 0.0;
    }
    let mut sum = 0.0;
    for nbrs in adjacency {
        let k = nbrs.len();
        if k < 2 {
            continue;
        }
        let mut triangles = 0usize;
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if adjacency[a].binary_search(&b).is_ok() {
                    triangles += 1;
                }
            }
        }
        sum += 2.0 * triangles as f64 / (k * (k - 1)) as f64;
    }
    sum / adjacency.len() as f64
}

/// Sliding buffer of the last W stream points plus RB-event timestamps.
/// `rb_count(t)` counts events in the half-open window (t - W, t].
#[derive(Debug, Clone)]
pub struct EvalWindow {
    capacity: usize,
    points: VecDeque<Vec<f64>>,
    rb_events: VecDeque<u64>,
}

impl EvalWindow {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        Self {
            capacity,
            points: VecDeque::with_capacity(capacity + 1),
            rb_events: VecDeque::new(),
        }
    }

    pub fn push(&mut self, t: u64, x: &[f64]) {
        let mut buf = if self.points.len() == self.capacity {
            self.points.pop_front().expect("non-empty at capacity")
        } else {
            Vec::with_capacity(x.len())
        };
        buf.clear();
        buf.extend_from_slice(x);
        self.points.push_back(buf);
        // timestamps arrive in order; drop events that left the window
        let w = self.capacity as u64;
        while let Some(&e) = self.rb_events.front() {
            if e + w <= t {
                self.rb_events.pop_front();
            } else {
                break;
            }
        }
    }

    pub fn record_rb(&mut self, t: u64) {
        self.rb_events.push_back(t);
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.iter().map(Vec::as_slice)
    }

    /// RB events with timestamps in (t - W, t].
    pub fn rb_count(&self, t: u64) -> usize {
        let w = self.capacity as u64;
        self.rb_events
            .iter()
            .filter(|&&e| e + w > t && e <= t)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::Unit;

    fn cb(points: &[&[f64]]) -> Codebook {
        Codebook::from_units(
            points
                .iter()
                .map(|w| Unit {
                    w: w.to_vec(),
                    c: 0.0,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn mse_direct_cases() {
        let one = Codebook::from_units(vec![Unit {
            w: vec![1.0, 0.0],
            c: 0.0,
        }])
        .unwrap();
        let pts: Vec<&[f64]> = vec![&[0.0, 0.0], &[2.0, 0.0]];
        assert_eq!(mse(pts, &one).unwrap(), 1.0);

        let two = cb(&[&[0.0, 0.0], &[3.0, 0.0]]);
        let pts: Vec<&[f64]> = vec![&[0.0, 0.0], &[4.0, 0.0]];
        assert_eq!(mse(pts, &two).unwrap(), 0.5);

        let pts: Vec<&[f64]> = vec![&[0.0, 0.0], &[3.0, 0.0]];
        assert_eq!(mse(pts, &two).unwrap(), 0.0);
    }

    #[test]
    fn mse_empty_points_is_an_error() {
        let two = cb(&[&[0.0, 0.0], &[3.0, 0.0]]);
        let empty: Vec<&[f64]> = vec![];
        assert_eq!(mse(empty, &two), Err(Error::EmptyPoints));
    }

    #[test]
    fn unsquared_error_cases() {
        let one = Codebook::from_units(vec![Unit {
            w: vec![1.0, 0.0],
            c: 0.0,
        }])
        .unwrap();
        let pts: Vec<&[f64]> = vec![&[0.0, 0.0], &[2.0, 0.0]];
        assert_eq!(mean_quantization_error(pts, &one).unwrap(), 1.0);

        let two = cb(&[&[0.0, 0.0], &[3.0, 0.0]]);
        let pts: Vec<&[f64]> = vec![&[0.0, 0.0], &[4.0, 0.0]];
        assert_eq!(mean_quantization_error(pts, &two).unwrap(), 0.5);
    }

    #[test]
    fn dead_unit_cases() {
        let two = cb(&[&[0.0, 0.0], &[10.0, 0.0]]);
        let near_zero: Vec<&[f64]> = vec![&[0.1, 0.0], &[0.2, 0.0]];
        assert_eq!(dead_units(near_zero, &two).unwrap(), 1);

        let spread: Vec<&[f64]> = vec![&[0.1, 0.0], &[9.9, 0.0]];
        assert_eq!(dead_units(spread, &two).unwrap(), 0);

        let five = cb(&[&[0.0], &[1.0], &[2.0], &[3.0], &[4.0]]);
        let single: Vec<&[f64]> = vec![&[0.0]];
        assert_eq!(dead_units(single, &five).unwrap(), 4);
    }

    #[test]
    fn degree_cases() {
        assert_eq!(avg_degree(&[vec![], vec![]]), 0.0);
        // complete graph on 4 units
        let k4: Vec<Vec<usize>> = (0..4)
            .map(|u| (0..4).filter(|&v| v != u).collect())
            .collect();
        assert_eq!(avg_degree(&k4), 3.0);
    }

    #[test]
    fn clustering_triangle_and_star() {
        let tri = vec![vec![1, 2], vec![0, 2], vec![0, 1]];
        assert_eq!(avg_clustering(&tri), 1.0);
        let star = vec![vec![1, 2, 3], vec![0], vec![0], vec![0]];
        assert_eq!(avg_clustering(&star), 0.0);
    }

    #[test]
    #[allow(clippy::needless_range_loop)] // the oracle stays in index form
    fn clustering_matches_brute_force_on_random_graph() {
        // 12 units, deterministic pseudo-random edges
        let n = 12usize;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            state >> 33
        };
        for a in 0..n {
            for b in (a + 1)..n {
                if next() % 3 == 0 {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
        }
        let fast = avg_clustering(&adj);
        // oracle: enumerate all vertex triples
        let has = |a: usize, b: usize| adj[a].contains(&b);
        let mut sum = 0.0;
        for u in 0..n {
            let k = adj[u].len();
            if k < 2 {
                continue;
            }
            let mut t = 0usize;
            for a in 0..n {
                for b in (a + 1)..n {
                    if a != u && b != u && has(u, a) && has(u, b) && has(a, b) {
                        t += 1;
                    }
                }
            }
            sum += 2.0 * t as f64 / (k * (k - 1)) as f64;
        }
        let oracle = sum / n as f64;
        assert!((fast - oracle).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&fast));
    }

    #[test]
    fn rb_window_counting() {
        let mut w = EvalWindow::new(1000);
        assert_eq!(w.rb_count(5000), 0);
        w.record_rb(4001);
        w.record_rb(4500);
        w.record_rb(5000);
        assert_eq!(w.rb_count(5000), 3);
        // event at exactly t - 1000 is excluded
        let mut w = EvalWindow::new(1000);
        w.record_rb(4000);
        assert_eq!(w.rb_count(5000), 0);
    }

    #[test]
    fn window_keeps_last_w_points() {
        let mut w = EvalWindow::new(3);
        for t in 0..5u64 {
            w.push(t, &[t as f64, 0.0]);
        }
        assert_eq!(w.len(), 3);
        let firsts: Vec<f64> = w.points().map(|p| p[0]).collect();
        assert_eq!(firsts, vec![2.0, 3.0, 4.0]);
    }

    #[test]
    fn csv_row_format() {
        let r = MetricsRecord {
            iteration: 100,
            mse: 0.5,
            dead_units: 3.0,
            avg_degree: 3.6,
            avg_clustering: 0.0,
            rb_count: 2.0,
        };
        assert_eq!(r.to_csv_row(), "100,0.5,3,3.6,0,2");
        assert_eq!(
            MetricsRecord::CSV_HEADER,
            "iteration,mse,dead_units,avg_degree,avg_clustering,rb_count"
        );
    }
}
