//! Self-organizing map with remove-birth updating on an integer lattice.
//!
//! Units occupy distinct vertices of an unbounded 2-D integer lattice and
//! are connected exactly to occupied 4-neighbors, so every degree is at
//! most 4 and the graph never contains a triangle. Every step updates all
//! reference vectors with a Gaussian falloff in lattice distance from the
//! winner. RB updating vacates the least-winning unit's vertex and rebirths
//! the unit on an empty vertex adjacent to the most-winning unit that still
//! has room (degree < 4); births may extend past the initial square.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::codebook::{Codebook, Unit};
use crate::error::{Error, Result};
use crate::error_based::ErrorUtilityState;
use crate::math;
use crate::quantizer::{Quantizer, RbPolicy, StepReport};
use crate::rng::RandomSource;

const OFFSETS: [(i64, i64); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

/// Occupied-vertex map of the lattice, with explicit edges kept in lockstep
/// with the one-unit-per-vertex occupancy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    pos: Vec<(i64, i64)>,
    occupied: BTreeMap<(i64, i64), usize>,
    adj: Vec<BTreeSet<usize>>,
}

impl GridMap {
    /// Initial layout: unit n at (n / L, n mod L) with L = ⌊√N⌋; rows past
    /// the L×L square simply continue the formula when N is not square.
    pub fn lattice(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidParam("grid needs at least 4 units"));
        }
        let l = n.isqrt() as i64;
        let pos = (0..n as i64).map(|i| (i / l, i % l)).collect();
        Self::from_positions(pos)
    }

    /// Builds a grid from explicit positions; edges are derived from
    /// 4-adjacency.
    pub fn from_positions(pos: Vec<(i64, i64)>) -> Result<Self> {
        let mut occupied = BTreeMap::new();
        for (n, &p) in pos.iter().enumerate() {
            if occupied.insert(p, n).is_some() {
                return Err(Error::InvalidParam("duplicate lattice position"));
            }
        }
        let adj = pos
            .iter()
            .map(|&(x, y)| {
                OFFSETS
                    .iter()
                    .filter_map(|&(dx, dy)| occupied.get(&(x + dx, y + dy)).copied())
                    .collect()
            })
            .collect();
        Ok(Self { pos, occupied, adj })
    }

    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    pub fn position(&self, n: usize) -> (i64, i64) {
        self.pos[n]
    }

    pub fn unit_at(&self, vertex: (i64, i64)) -> Option<usize> {
        self.occupied.get(&vertex).copied()
    }

    pub fn degree(&self, n: usize) -> usize {
        self.adj[n].len()
    }

    pub fn neighbors(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[n].iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges as (low id, high id) pairs, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (n, nbrs) in self.adj.iter().enumerate() {
            for &m in nbrs.iter() {
                if n < m {
                    out.push((n, m));
                }
            }
        }
        out
    }

    /// Sorted adjacency lists, the form the graph metrics consume.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        self.adj
            .iter()
            .map(|s| s.iter().copied().collect())
            .collect()
    }

    /// Empty vertices among the 4-neighbors of `vertex`, in fixed offset
    /// order so that a seeded draw over them is reproducible.
    pub fn empty_neighbors(&self, vertex: (i64, i64)) -> Vec<(i64, i64)> {
        OFFSETS
            .iter()
            .map(|&(dx, dy)| (vertex.0 + dx, vertex.1 + dy))
            .filter(|v| !self.occupied.contains_key(v))
            .collect()
    }

    fn vacate(&mut self, n: usize) {
        self.occupied.remove(&self.pos[n]);
        let nbrs: Vec<usize> = self.adj[n].iter().copied().collect();
        for m in nbrs {
            self.adj[m].remove(&n);
        }
        self.adj[n].clear();
    }

    fn place(&mut self, n: usize, vertex: (i64, i64)) {
        debug_assert!(!self.occupied.contains_key(&vertex));
        self.pos[n] = vertex;
        self.occupied.insert(vertex, n);
        for (dx, dy) in OFFSETS {
            if let Some(&m) = self.occupied.get(&(vertex.0 + dx, vertex.1 + dy)) {
                if m != n {
                    self.adj[n].insert(m);
                    self.adj[m].insert(n);
                }
            }
        }
    }

    /// Full reconstruction check: positions distinct, occupancy consistent,
    /// edges exactly the occupied 4-neighbor pairs, degrees at most 4.
    pub fn check_invariants(&self) -> core::result::Result<(), String> {
        if self.occupied.len() != self.pos.len() {
            return Err(String::from("positions are not pairwise distinct"));
        }
        for (n, &p) in self.pos.iter().enumerate() {
            if self.unit_at(p) != Some(n) {
                return Err(String::from("occupancy map out of sync"));
            }
        }
        let rebuilt = Self::from_positions(self.pos.clone())
            .map_err(|_| String::from("duplicate positions"))?;
        if rebuilt.adj != self.adj {
            return Err(String::from("edges differ from 4-neighbor reconstruction"));
        }
        if self.adj.iter().any(|s| s.len() > 4) {
            return Err(String::from("degree exceeds 4"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SomrbParams {
    epsilon: f64,
    sigma: f64,
}

impl SomrbParams {
    pub fn new(epsilon: f64, sigma: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParam("epsilon must be in (0, 1]"));
        }
        if sigma.is_nan() || sigma <= 0.0 {
            return Err(Error::InvalidParam("sigma must be positive"));
        }
        Ok(Self { epsilon, sigma })
    }

    pub fn epsilon(self) -> f64 {
        self.epsilon
    }

    pub fn sigma(self) -> f64 {
        self.sigma
    }
}

/// Gaussian lattice-distance falloff h(d) = exp(-d² / 2σ²).
pub fn neighborhood(d: f64, sigma: f64) -> f64 {
    math::exp(-(d * d) / (2.0 * sigma * sigma))
}

#[derive(Debug, Clone)]
pub struct Somrb {
    cb: Codebook,
    grid: GridMap,
    params: SomrbParams,
    policy: RbPolicy,
    eb: Option<ErrorUtilityState>,
    rng: RandomSource,
}

impl Somrb {
    /// Grid-seeded instance: unit n starts at lattice vertex (n/L, n mod L)
    /// with reference vector ((n/L)/L, (n mod L)/L, 0, ..., 0).
    pub fn new(
        n: usize,
        dim: usize,
        params: SomrbParams,
        policy: RbPolicy,
        rng: RandomSource,
    ) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParam(
                "somrb needs dimension >= 2 to embed the grid",
            ));
        }
        let grid = GridMap::lattice(n)?;
        let l = n.isqrt() as f64;
        let units = (0..n)
            .map(|i| {
                let (px, py) = grid.position(i);
                let mut w = alloc::vec![0.0; dim];
                w[0] = px as f64 / l;
                w[1] = py as f64 / l;
                Unit { w, c: 0.0 }
            })
            .collect();
        let cb = Codebook::from_units(units)?;
        Self::from_parts(cb, grid, params, policy, rng)
    }

    pub fn from_parts(
        cb: Codebook,
        grid: GridMap,
        params: SomrbParams,
        policy: RbPolicy,
        rng: RandomSource,
    ) -> Result<Self> {
        if cb.len() != grid.len() {
            return Err(Error::InvalidParam("codebook and grid sizes differ"));
        }
        if cb.len() < 4 {
            return Err(Error::InvalidParam("somrb needs at least 4 units"));
        }
        let eb = policy
            .uses_error_metric()
            .then(|| ErrorUtilityState::new(cb.len(), policy.beta().unwrap_or(0.0)));
        Ok(Self {
            cb,
            grid,
            params,
            policy,
            eb,
            rng,
        })
    }

    pub fn grid(&self) -> &GridMap {
        &self.grid
    }

    pub fn params(&self) -> SomrbParams {
        self.params
    }
}

impl Quantizer for Somrb {
    fn codebook(&self) -> &Codebook {
        &self.cb
    }

    fn step(&mut self, x: &[f64]) -> Result<StepReport> {
        let winner = match &mut self.eb {
            Some(eb) => eb.accumulate(x, &self.cb)?.0,
            None => self.cb.find_winner(x)?,
        };
        let wp = self.grid.position(winner);
        for n in 0..self.cb.len() {
            let (px, py) = self.grid.position(n);
            let (dx, dy) = ((px - wp.0) as f64, (py - wp.1) as f64);
            let h = neighborhood(math::sqrt(dx * dx + dy * dy), self.params.sigma);
            self.cb.move_toward(n, x, self.params.epsilon * h);
        }
        self.cb.add_win(winner);

        // n_max must keep an empty neighboring vertex, so only units with
        // degree < 4 are eligible; n_min ranges over all units.
        let grid = &self.grid;
        let eligible = (0..self.cb.len()).filter(|&n| grid.degree(n) < 4);
        let trig = match &self.policy {
            RbPolicy::Disabled => None,
            RbPolicy::WinCount(p) => self.cb.rb_trigger(p.th_rb(), eligible),
            RbPolicy::ErrorUtility(p) => self
                .eb
                .as_ref()
                .and_then(|eb| eb.trigger(p.th_rb(), eligible)),
        };
        let mut rb_fired = false;
        if let Some(t) = trig {
            let blend = rb_update(
                &mut self.cb,
                &mut self.grid,
                t.n_min,
                t.n_max,
                &mut self.rng,
            );
            if let Some(eb) = &mut self.eb {
                eb.blend_into(t.n_min, &blend);
            }
            rb_fired = true;
        }
        if let Some(beta) = self.policy.beta() {
            self.cb.decay_counts(beta);
        }
        Ok(StepReport { winner, rb_fired })
    }

    fn adjacency(&self) -> Option<Vec<Vec<usize>>> {
        Some(self.grid.adjacency())
    }
}

/// Vacates `n_min`'s vertex (its old vertex becomes a legal birth site),
/// rebirths the unit on an empty vertex adjacent to `n_max` chosen uniformly
/// at random, and connects it to every occupied 4-neighbor. The reborn w and
/// c are averaged over: (a) its new neighbors when it has more than one;
/// (b) otherwise n_max plus n_max's other neighbors when any exist;
/// (c) otherwise n_max and the unit nearest to n_max in reference space.
/// Returns the blend set used.
pub fn rb_update(
    cb: &mut Codebook,
    grid: &mut GridMap,
    n_min: usize,
    n_max: usize,
    rng: &mut RandomSource,
) -> Vec<usize> {
    debug_assert_ne!(n_min, n_max);
    grid.vacate(n_min);
    let sites = grid.empty_neighbors(grid.position(n_max));
    debug_assert!(!sites.is_empty(), "n_max was picked with degree < 4");
    let site = sites[rng.index(sites.len())];
    grid.place(n_min, site);

    let m_min: Vec<usize> = grid.neighbors(n_min).collect();
    let blend: Vec<usize> = if m_min.len() > 1 {
        m_min
    } else {
        // the sole neighbor is n_max itself
        let mut m_max: Vec<usize> = grid.neighbors(n_max).filter(|&u| u != n_min).collect();
        m_max.push(n_max);
        if m_max.len() > 1 {
            m_max
        } else {
            let f = cb
                .nearest_excluding(n_max, &[n_max, n_min])
                .expect("grid holds at least 4 units");
            alloc::vec![n_max, f]
        }
    };
    cb.blend_into(n_min, &blend);
    blend
}
