//! Neural gas with remove-birth updating and aging edges.
//!
//! Every step ranks all units by distance to the input and moves each one
//! with weight exp(-rank / lambda), so adaptation strength depends on rank
//! rather than on distance and is unaffected by the data's value range. The
//! two nearest units get a fresh edge, edges at the winner age by one, and
//! edges older than a_max are dropped. RB updating rebirths the
//! least-winning unit between the most-winning unit and its strongest
//! neighbor (or the nearest unit in reference space when it has none).

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::codebook::{squared_distance, Codebook};
use crate::error::{Error, Result};
use crate::error_based::ErrorUtilityState;
use crate::math;
use crate::quantizer::{Quantizer, RbPolicy, StepReport};
use crate::rng::RandomSource;

/// Undirected edges with per-edge ages, stored as a symmetric matrix.
/// Unit counts stay around 100, so the dense form is the simple honest one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GasGraph {
    n: usize,
    ages: Vec<Option<u32>>,
}

impl GasGraph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ages: vec![None; n * n],
        }
    }

    fn idx(&self, a: usize, b: usize) -> usize {
        a * self.n + b
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.ages[self.idx(a, b)].is_some()
    }

    pub fn age(&self, a: usize, b: usize) -> Option<u32> {
        self.ages[self.idx(a, b)]
    }

    /// Creates the edge or resets its age to zero.
    pub fn set_edge(&mut self, a: usize, b: usize) {
        assert_ne!(a, b, "self edges are not allowed");
        let (i, j) = (self.idx(a, b), self.idx(b, a));
        self.ages[i] = Some(0);
        self.ages[j] = Some(0);
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        let (i, j) = (self.idx(a, b), self.idx(b, a));
        self.ages[i] = None;
        self.ages[j] = None;
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&m| self.has_edge(u, m))
    }

    pub fn degree(&self, u: usize) -> usize {
        self.neighbors(u).count()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n)
            .map(|a| ((a + 1)..self.n).filter(|&b| self.has_edge(a, b)).count())
            .sum()
    }

    /// Edges as (low id, high id, age), sorted.
    pub fn edges(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                if let Some(age) = self.age(a, b) {
                    out.push((a, b, age));
                }
            }
        }
        out
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|u| self.neighbors(u).collect()).collect()
    }

    fn age_incident(&mut self, u: usize) {
        for m in 0..self.n {
            let i = self.idx(u, m);
            if let Some(age) = self.ages[i] {
                self.ages[i] = Some(age + 1);
                let j = self.idx(m, u);
                self.ages[j] = Some(age + 1);
            }
        }
    }

    fn prune_incident(&mut self, u: usize, a_max: u32) {
        for m in 0..self.n {
            if self.age(u, m).is_some_and(|a| a > a_max) {
                self.remove_edge(u, m);
            }
        }
    }

    fn remove_incident(&mut self, u: usize) {
        for m in 0..self.n {
            self.remove_edge(u, m);
        }
    }

    /// Symmetry, no self edges, and every age within the lifetime bound.
    pub fn check_invariants(&self, a_max: u32) -> core::result::Result<(), String> {
        for a in 0..self.n {
            if self.has_edge(a, a) {
                return Err(String::from("self edge"));
            }
            for b in 0..self.n {
                if self.age(a, b) != self.age(b, a) {
                    return Err(String::from("asymmetric edge"));
                }
                if self.age(a, b).is_some_and(|x| x > a_max) {
                    return Err(String::from("edge older than a_max"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NgrbParams {
    epsilon: f64,
    lambda: f64,
    a_max: u32,
}

impl NgrbParams {
    pub fn new(epsilon: f64, lambda: f64, a_max: u32) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParam("epsilon must be in (0, 1]"));
        }
        if lambda.is_nan() || lambda <= 0.0 {
            return Err(Error::InvalidParam("lambda must be positive"));
        }
        if a_max == 0 {
            return Err(Error::InvalidParam("a_max must be at least 1"));
        }
        Ok(Self {
            epsilon,
            lambda,
            a_max,
        })
    }

    pub fn epsilon(self) -> f64 {
        self.epsilon
    }

    pub fn lambda(self) -> f64 {
        self.lambda
    }

    pub fn a_max(self) -> u32 {
        self.a_max
    }
}

/// Distance rank of every unit for input `x`: rank 0 is the winner, ties to
/// the lower id. The returned vector maps unit id to rank and is always a
/// permutation of 0..N.
pub fn rank_units(x: &[f64], cb: &Codebook) -> Result<Vec<usize>> {
    cb.check_dim(x)?;
    let d: Vec<f64> = cb
        .units()
        .iter()
        .map(|u| squared_distance(x, &u.w))
        .collect();
    let mut order: Vec<usize> = (0..cb.len()).collect();
    order.sort_unstable_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let mut ranks = vec![0usize; cb.len()];
    for (r, &u) in order.iter().enumerate() {
        ranks[u] = r;
    }
    Ok(ranks)
}

#[derive(Debug, Clone)]
pub struct Ngrb {
    cb: Codebook,
    graph: GasGraph,
    params: NgrbParams,
    policy: RbPolicy,
    eb: Option<ErrorUtilityState>,
}

impl Ngrb {
    pub fn new(
        n: usize,
        dim: usize,
        params: NgrbParams,
        policy: RbPolicy,
        rng: &mut RandomSource,
    ) -> Result<Self> {
        let cb = Codebook::random(n, dim, rng)?;
        Self::from_parts(cb, GasGraph::new(n), params, policy)
    }

    pub fn from_parts(
        cb: Codebook,
        graph: GasGraph,
        params: NgrbParams,
        policy: RbPolicy,
    ) -> Result<Self> {
        if graph.len() != cb.len() {
            return Err(Error::InvalidParam("codebook and graph sizes differ"));
        }
        let eb = policy
            .uses_error_metric()
            .then(|| ErrorUtilityState::new(cb.len(), policy.beta().unwrap_or(0.0)));
        Ok(Self {
            cb,
            graph,
            params,
            policy,
            eb,
        })
    }

    pub fn graph(&self) -> &GasGraph {
        &self.graph
    }

    pub fn params(&self) -> NgrbParams {
        self.params
    }
}

impl Quantizer for Ngrb {
    fn codebook(&self) -> &Codebook {
        &self.cb
    }

    fn step(&mut self, x: &[f64]) -> Result<StepReport> {
        if let Some(eb) = &mut self.eb {
            eb.accumulate(x, &self.cb)?;
        }
        let ranks = rank_units(x, &self.cb)?;
        let (mut n0, mut n1) = (0, 0);
        for (u, &r) in ranks.iter().enumerate() {
            if r == 0 {
                n0 = u;
            } else if r == 1 {
                n1 = u;
            }
        }
        for (u, &rank) in ranks.iter().enumerate() {
            let h = math::exp(-(rank as f64) / self.params.lambda);
            self.cb.move_toward(u, x, self.params.epsilon * h);
        }
        self.graph.set_edge(n0, n1);
        self.graph.age_incident(n0);
        self.graph.prune_incident(n0, self.params.a_max);
        self.cb.add_win(n0);

        let trig = match &self.policy {
            RbPolicy::Disabled => None,
            RbPolicy::WinCount(p) => self.cb.rb_trigger(p.th_rb(), 0..self.cb.len()),
            RbPolicy::ErrorUtility(p) => self
                .eb
                .as_ref()
                .and_then(|eb| eb.trigger(p.th_rb(), 0..self.cb.len())),
        };
        let mut rb_fired = false;
        if let Some(t) = trig {
            if let Some(blend) = rb_update(&mut self.cb, &mut self.graph, t.n_min, t.n_max) {
                if let Some(eb) = &mut self.eb {
                    eb.blend_into(t.n_min, &blend);
                }
                rb_fired = true;
            }
        }
        if let Some(beta) = self.policy.beta() {
            self.cb.decay_counts(beta);
        }
        Ok(StepReport {
            winner: n0,
            rb_fired,
        })
    }

    fn adjacency(&self) -> Option<Vec<Vec<usize>>> {
        Some(self.graph.adjacency())
    }
}

/// Drops every edge of `n_min`, rebirths it at the midpoint of `n_max` and
/// f, and connects it to both with fresh edges. f is the most-winning graph
/// neighbor of `n_max`, or the reference-space nearest unit (excluding both
/// extremes) when `n_max` is isolated. Returns the blend pair, or `None`
/// when fewer than three units make f unselectable and the update is
/// skipped.
pub fn rb_update(
    cb: &mut Codebook,
    graph: &mut GasGraph,
    n_min: usize,
    n_max: usize,
) -> Option<[usize; 2]> {
    debug_assert_ne!(n_min, n_max);
    if cb.len() < 3 {
        log::warn!("ngrb: rb update skipped, needs at least 3 units");
        return None;
    }
    graph.remove_incident(n_min);
    let mut f: Option<usize> = None;
    for m in graph.neighbors(n_max) {
        match f {
            None => f = Some(m),
            Some(cur) => {
                let (cm, cc) = (cb.unit(m).c, cb.unit(cur).c);
                if cm > cc || (cm == cc && m < cur) {
                    f = Some(m);
                }
            }
        }
    }
    let f = match f {
        Some(f) => f,
        None => cb
            .nearest_excluding(n_max, &[n_max, n_min])
            .expect("at least 3 units"),
    };
    cb.blend_into(n_min, &[n_max, f]);
    graph.set_edge(n_min, n_max);
    if f != n_max {
        graph.set_edge(n_min, f);
    }
    Some([n_max, f])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::{RbParams, Unit};

    fn cb(points: &[&[f64]], counts: &[f64]) -> Codebook {
        Codebook::from_units(
            points
                .iter()
                .zip(counts)
                .map(|(w, &c)| Unit { w: w.to_vec(), c })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn ranks_sort_by_distance() {
        let book = cb(&[&[0.0, 0.1], &[0.0, 0.3], &[0.0, 0.2]], &[0.0; 3]);
        assert_eq!(rank_units(&[0.0, 0.0], &book).unwrap(), vec![0, 2, 1]);
    }

    #[test]
    fn ranks_tie_by_id_and_form_permutation() {
        let book = cb(&[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, 0.0]], &[0.0; 3]);
        let ranks = rank_units(&[0.0, 0.0], &book).unwrap();
        assert_eq!(ranks, vec![0, 1, 2]);
        let mut sorted = ranks.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2]);
    }

    #[test]
    fn step_moves_units_by_rank() {
        let book = cb(&[&[0.0, 0.0], &[1.0, 0.0], &[3.0, 0.0]], &[0.0; 3]);
        let params = NgrbParams::new(0.3, 0.5, 75).unwrap();
        let mut q = Ngrb::from_parts(book, GasGraph::new(3), params, RbPolicy::Disabled).unwrap();
        q.step(&[0.0, 0.0]).unwrap();
        // rank 0 moves by eps*1 toward x (already there), rank 1 by eps*e^-2
        let e2 = (-2.0f64).exp();
        assert_eq!(q.codebook().unit(0).w[0], 0.0);
        assert!((q.codebook().unit(1).w[0] - (1.0 - 0.3 * e2)).abs() < 1e-12);
    }

    #[test]
    fn step_links_two_nearest_units() {
        let book = cb(&[&[0.0, 0.0], &[1.0, 0.0], &[3.0, 0.0]], &[0.0; 3]);
        let params = NgrbParams::new(0.3, 0.5, 75).unwrap();
        let mut q = Ngrb::from_parts(book, GasGraph::new(3), params, RbPolicy::Disabled).unwrap();
        q.step(&[0.1, 0.0]).unwrap();
        // fresh edge is aged once with the rest of the winner's edges
        assert_eq!(q.graph().age(0, 1), Some(1));
        assert!(!q.graph().has_edge(0, 2));
    }

    #[test]
    fn edge_past_lifetime_is_removed() {
        let book = cb(&[&[0.0, 0.0], &[1.0, 0.0], &[3.0, 0.0]], &[0.0; 3]);
        let params = NgrbParams::new(0.3, 0.5, 2).unwrap();
        let mut graph = GasGraph::new(3);
        graph.set_edge(0, 2);
        let mut q = Ngrb::from_parts(book, graph, params, RbPolicy::Disabled).unwrap();
        // winner is 0 each step; edge (0,2) ages 1, 2, 3 then is pruned
        for _ in 0..2 {
            q.step(&[0.0, 0.0]).unwrap();
            assert!(q.graph().has_edge(0, 2));
        }
        q.step(&[0.0, 0.0]).unwrap();
        assert!(!q.graph().has_edge(0, 2));
        q.graph().check_invariants(2).unwrap();
    }

    #[test]
    fn rb_update_prefers_strongest_neighbor() {
        let mut book = cb(
            &[&[2.0, 0.0], &[0.0, 0.0], &[1.0, 1.0], &[9.0, 9.0]],
            &[10.0, 3.0, 7.0, 0.0],
        );
        let mut g = GasGraph::new(4);
        g.set_edge(0, 1);
        g.set_edge(0, 2);
        let blend = rb_update(&mut book, &mut g, 3, 0).unwrap();
        assert_eq!(blend, [0, 2]); // neighbor with the larger count wins
        assert!(g.has_edge(3, 0) && g.has_edge(3, 2));
        assert_eq!(g.age(3, 0), Some(0));
    }

    #[test]
    fn rb_update_isolated_max_falls_back_to_nearest() {
        let mut book = cb(&[&[2.0, 0.0], &[0.0, 0.0], &[9.0, 9.0]], &[10.0, 2.0, 0.0]);
        let mut g = GasGraph::new(3);
        let blend = rb_update(&mut book, &mut g, 2, 0).unwrap();
        assert_eq!(blend, [0, 1]);
        assert_eq!(book.unit(2).w, vec![1.0, 0.0]);
        assert_eq!(book.unit(2).c, 6.0);
        assert!(g.has_edge(2, 0) && g.has_edge(2, 1));
    }

    #[test]
    fn rb_update_clears_old_edges_of_removed_unit() {
        let mut book = cb(
            &[&[2.0, 0.0], &[0.0, 0.0], &[1.0, 1.0], &[9.0, 9.0]],
            &[10.0, 3.0, 7.0, 0.0],
        );
        let mut g = GasGraph::new(4);
        g.set_edge(3, 1);
        g.set_edge(3, 2);
        g.set_edge(0, 2);
        rb_update(&mut book, &mut g, 3, 0).unwrap();
        assert!(!g.has_edge(3, 1), "stale edge survived the rebirth");
        assert!(g.has_edge(3, 0) && g.has_edge(3, 2));
    }

    #[test]
    fn rb_update_skipped_below_three_units() {
        let mut book = cb(&[&[0.0], &[1.0]], &[5.0, 0.0]);
        let mut g = GasGraph::new(2);
        assert_eq!(rb_update(&mut book, &mut g, 1, 0), None);
    }

    #[test]
    fn rb_run_keeps_graph_invariants() {
        let params = NgrbParams::new(0.3, 0.5, 10).unwrap();
        let policy = RbPolicy::WinCount(RbParams::new(0.05, 0.01).unwrap());
        let mut rng = RandomSource::from_seed(12);
        let mut q = Ngrb::new(12, 2, params, policy, &mut rng).unwrap();
        let mut stream = RandomSource::from_seed(77);
        let mut fired = 0;
        for _ in 0..3000 {
            let c = if stream.unit_f64() < 0.5 { 5.0 } else { 15.0 };
            let x = [c + stream.unit_f64(), c + stream.unit_f64()];
            let r = q.step(&x).unwrap();
            if r.rb_fired {
                fired += 1;
            }
            q.graph().check_invariants(10).unwrap();
            assert_eq!(q.codebook().len(), 12);
        }
        assert!(fired > 0);
    }
}
