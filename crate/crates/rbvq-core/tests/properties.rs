//! Property suites: decay closed form, scale/translation invariance of the
//! win machinery, graph invariants under randomized runs, and brute-force
//! oracles for the evaluation metrics.

use proptest::prelude::*;

use rbvq_core::baseline::OkMeans;
use rbvq_core::codebook::{Codebook, RbParams, Unit};
use rbvq_core::error_based::ErrorUtilityState;
use rbvq_core::metrics;
use rbvq_core::ngrb::{rank_units, GasGraph, Ngrb, NgrbParams};
use rbvq_core::okrb::{Okrb, OkrbParams};
use rbvq_core::somrb::{Somrb, SomrbParams};
use rbvq_core::stream::make_blobs;
use rbvq_core::{Quantizer, RandomSource, RbPolicy};

fn unit(w: &[f64], c: f64) -> Unit {
    Unit { w: w.to_vec(), c }
}

fn affine(points: &[Vec<f64>], s: f64, b: &[f64]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| p.iter().zip(b).map(|(v, off)| s * v + off).collect())
        .collect()
}

proptest! {
    #[test]
    fn decay_matches_closed_form(
        c0 in 1e-6f64..1e6,
        beta in 1e-5f64..0.5,
        t in 1usize..2000,
    ) {
        let expected = c0 * libm::pow(1.0 - beta, t as f64);
        // subnormal territory has no relative precision to speak of
        prop_assume!(expected > 1e-290);
        let mut cb = Codebook::from_units(vec![unit(&[0.0], c0), unit(&[1.0], 0.0)]).unwrap();
        for _ in 0..t {
            cb.decay_counts(beta);
        }
        let rel = (cb.unit(0).c - expected).abs() / expected;
        prop_assert!(rel <= 1e-9, "rel error {rel}");
    }

    #[test]
    fn win_metric_invariant_under_positive_scaling(
        counts in proptest::collection::vec(0.0f64..1e6, 2..20),
        scale in 1e-6f64..1e6,
    ) {
        let units: Vec<Unit> = counts.iter().map(|&c| unit(&[0.0], c)).collect();
        let cb = Codebook::from_units(units).unwrap();
        let scaled: Vec<Unit> = counts.iter().map(|&c| unit(&[0.0], c * scale)).collect();
        let cb_scaled = Codebook::from_units(scaled).unwrap();
        match (cb.win_metric(), cb_scaled.win_metric()) {
            (None, None) => {}
            (Some(a), Some(b)) => {
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x - y).abs() < 1e-12);
                }
            }
            _ => prop_assert!(false, "metric definedness changed under scaling"),
        }
    }

    #[test]
    fn winner_invariant_under_affine_map(
        seed in 0u64..1000,
        s in prop_oneof![Just(0.01f64), Just(1.0), Just(100.0), 1e-3f64..1e3],
        bx in -50.0f64..50.0,
        by in -50.0f64..50.0,
    ) {
        let mut rng = RandomSource::from_seed(seed);
        let cb = Codebook::random(12, 2, &mut rng).unwrap();
        let x = vec![rng.unit_f64() * 4.0 - 2.0, rng.unit_f64() * 4.0 - 2.0];
        let b = [bx, by];
        let mapped_units: Vec<Unit> = cb
            .units()
            .iter()
            .map(|u| unit(&[s * u.w[0] + b[0], s * u.w[1] + b[1]], u.c))
            .collect();
        let cb2 = Codebook::from_units(mapped_units).unwrap();
        let x2 = [s * x[0] + b[0], s * x[1] + b[1]];
        prop_assert_eq!(cb.find_winner(&x).unwrap(), cb2.find_winner(&x2).unwrap());
    }

    #[test]
    fn ranks_are_a_permutation_with_decreasing_factor(
        seed in 0u64..1000,
        n in 2usize..30,
    ) {
        let mut rng = RandomSource::from_seed(seed);
        let cb = Codebook::random(n, 3, &mut rng).unwrap();
        let x = vec![rng.unit_f64(), rng.unit_f64(), rng.unit_f64()];
        let ranks = rank_units(&x, &cb).unwrap();
        let mut sorted = ranks.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
        // neighborhood factor strictly decreases in rank
        let lambda = 0.7;
        for r in 1..n {
            let prev = (-((r - 1) as f64) / lambda).exp();
            let cur = (-(r as f64) / lambda).exp();
            prop_assert!(cur < prev);
        }
    }

    #[test]
    fn mse_and_dead_units_match_brute_force(
        seed in 0u64..2000,
        n in 2usize..20,
        m in 1usize..200,
    ) {
        let mut rng = RandomSource::from_seed(seed);
        let cb = Codebook::random(n, 2, &mut rng).unwrap();
        let points: Vec<Vec<f64>> = (0..m)
            .map(|_| vec![rng.unit_f64() * 8.0 - 4.0, rng.unit_f64() * 8.0 - 4.0])
            .collect();
        let refs: Vec<&[f64]> = points.iter().map(Vec::as_slice).collect();

        // independent double loop
        let mut total = 0.0;
        let mut assigned = vec![0usize; n];
        for p in &points {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (i, u) in cb.units().iter().enumerate() {
                let mut d = 0.0;
                for (a, b) in p.iter().zip(&u.w) {
                    d += (a - b) * (a - b);
                }
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            total += best_d;
            assigned[best] += 1;
        }
        let oracle_mse = total / m as f64;
        let oracle_dead = assigned.iter().filter(|&&k| k == 0).count();

        let got_mse = metrics::mse(refs.iter().copied(), &cb).unwrap();
        let got_dead = metrics::dead_units(refs.iter().copied(), &cb).unwrap();
        let denom = oracle_mse.abs().max(1e-30);
        prop_assert!((got_mse - oracle_mse).abs() / denom <= 1e-9);
        prop_assert_eq!(got_dead, oracle_dead);
    }

    #[test]
    fn mse_and_dead_units_invariant_under_unit_permutation(
        seed in 0u64..1000,
        n in 2usize..15,
        m in 1usize..100,
        rot in 1usize..14,
    ) {
        let mut rng = RandomSource::from_seed(seed);
        let cb = Codebook::random(n, 2, &mut rng).unwrap();
        let points: Vec<Vec<f64>> = (0..m)
            .map(|_| vec![rng.unit_f64() * 4.0, rng.unit_f64() * 4.0])
            .collect();
        let rotated = Codebook::from_units(
            (0..n)
                .map(|i| cb.unit((i + rot) % n).clone())
                .collect(),
        )
        .unwrap();
        let refs = || points.iter().map(Vec::as_slice);
        let mse_a = metrics::mse(refs(), &cb).unwrap();
        let mse_b = metrics::mse(refs(), &rotated).unwrap();
        prop_assert!((mse_a - mse_b).abs() <= 1e-12 * mse_a.abs().max(1.0));
        prop_assert_eq!(
            metrics::dead_units(refs(), &cb).unwrap(),
            metrics::dead_units(refs(), &rotated).unwrap()
        );
    }

    #[test]
    #[allow(clippy::needless_range_loop)] // the oracle stays in index form
    fn clustering_matches_triple_enumeration(
        seed in 0u64..2000,
        n in 3usize..14,
        density in 1u32..4,
    ) {
        let mut rng = RandomSource::from_seed(seed);
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for a in 0..n {
            for b in (a + 1)..n {
                if rng.index(4) < density as usize {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
        }
        let got = metrics::avg_clustering(&adj);
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
        prop_assert!((got - oracle).abs() <= 1e-9);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&got));
    }

    #[test]
    fn error_utility_scales_quadratically(
        seed in 0u64..1000,
        s in prop_oneof![Just(0.01f64), Just(100.0), 0.1f64..10.0],
    ) {
        let mut rng = RandomSource::from_seed(seed);
        let cb = Codebook::random(6, 2, &mut rng).unwrap();
        let x = vec![rng.unit_f64() * 2.0, rng.unit_f64() * 2.0];
        let mapped: Vec<Unit> = cb
            .units()
            .iter()
            .map(|u| unit(&[s * u.w[0], s * u.w[1]], u.c))
            .collect();
        let cb2 = Codebook::from_units(mapped).unwrap();
        let x2 = [s * x[0], s * x[1]];

        let beta = 0.01;
        let mut st = ErrorUtilityState::new(6, beta);
        let mut st2 = ErrorUtilityState::new(6, beta);
        let (w1, _) = st.accumulate(&x, &cb).unwrap();
        let (w2, _) = st2.accumulate(&x2, &cb2).unwrap();
        prop_assert_eq!(w1, w2);
        let e = st.error(w1);
        let e2 = st2.error(w2);
        if e > 1e-12 {
            let ratio = e2 / e;
            prop_assert!((ratio - s * s).abs() / (s * s) < 1e-9, "E ratio {ratio}");
            // the trigger ratio itself stays scale free
            let u = st.utility(w1);
            let u2 = st2.utility(w2);
            if u > 1e-12 {
                prop_assert!(((u2 / e2) - (u / e)).abs() < 1e-9);
            }
        }
    }
}

/// Runs a quantizer over a stream, returning (winner ids, rb flags, final counters).
fn drive<Q: Quantizer>(q: &mut Q, stream: &[Vec<f64>]) -> (Vec<usize>, Vec<bool>, Vec<f64>) {
    let mut winners = Vec::with_capacity(stream.len());
    let mut fires = Vec::with_capacity(stream.len());
    for x in stream {
        let r = q.step(x).unwrap();
        winners.push(r.winner);
        fires.push(r.rb_fired);
    }
    let counters = q.codebook().units().iter().map(|u| u.c).collect();
    (winners, fires, counters)
}

fn blob_stream(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = RandomSource::from_seed(seed);
    let ds = make_blobs(1000, &mut rng);
    let mut draw = RandomSource::substream(seed, 1);
    (0..n)
        .map(|_| ds.point(draw.index(ds.len())).to_vec())
        .collect()
}

/// The full win-count sequence (and with it every RB decision) is identical
/// when inputs and the initial codebook are jointly scaled and translated.
#[test]
fn okrb_run_invariant_under_affine_map() {
    let stream = blob_stream(2000, 42);
    for &s in &[0.01, 1.0, 100.0] {
        let b = [3.5, -12.0];
        let mut rng = RandomSource::from_seed(7);
        let cb = Codebook::random(20, 2, &mut rng).unwrap();
        let mapped = Codebook::from_units(
            cb.units()
                .iter()
                .map(|u| unit(&[s * u.w[0] + b[0], s * u.w[1] + b[1]], u.c))
                .collect(),
        )
        .unwrap();

        let params = OkrbParams::new(0.1).unwrap();
        let policy = RbPolicy::WinCount(RbParams::new(0.01, 0.005).unwrap());
        let mut a = Okrb::from_codebook(cb, params, policy).unwrap();
        let mut z = Okrb::from_codebook(mapped, params, policy).unwrap();

        let (wa, fa, ca) = drive(&mut a, &stream);
        let (wz, fz, cz) = drive(&mut z, &affine(&stream, s, &b));
        assert_eq!(wa, wz, "winner sequence differs at s={s}");
        assert_eq!(fa, fz, "rb decisions differ at s={s}");
        assert_eq!(ca, cz, "counter arithmetic differs at s={s}");
    }
}

#[test]
fn ngrb_run_invariant_under_affine_map() {
    let stream = blob_stream(1000, 43);
    for &s in &[0.01, 100.0] {
        let b = [-2.0, 8.0];
        let mut rng = RandomSource::from_seed(9);
        let cb = Codebook::random(15, 2, &mut rng).unwrap();
        let mapped = Codebook::from_units(
            cb.units()
                .iter()
                .map(|u| unit(&[s * u.w[0] + b[0], s * u.w[1] + b[1]], u.c))
                .collect(),
        )
        .unwrap();
        let params = NgrbParams::new(0.3, 0.5, 75).unwrap();
        let policy = RbPolicy::WinCount(RbParams::new(0.01, 0.005).unwrap());
        let mut a = Ngrb::from_parts(cb, GasGraph::new(15), params, policy).unwrap();
        let mut z = Ngrb::from_parts(mapped, GasGraph::new(15), params, policy).unwrap();
        let (wa, fa, ca) = drive(&mut a, &stream);
        let (wz, fz, cz) = drive(&mut z, &affine(&stream, s, &b));
        assert_eq!(wa, wz);
        assert_eq!(fa, fz);
        assert_eq!(ca, cz);
        assert_eq!(a.graph().edges(), z.graph().edges());
    }
}

#[test]
fn somrb_run_invariant_under_affine_map() {
    let stream = blob_stream(1000, 44);
    for &s in &[0.01, 100.0] {
        let b = [1.0, 1.0];
        let build = || {
            Somrb::new(
                16,
                2,
                SomrbParams::new(0.2, 0.5).unwrap(),
                RbPolicy::WinCount(RbParams::new(0.1, 0.005).unwrap()),
                RandomSource::from_seed(5),
            )
            .unwrap()
        };
        let mut a = build();
        let template = build();
        let mapped = Codebook::from_units(
            template
                .codebook()
                .units()
                .iter()
                .map(|u| unit(&[s * u.w[0] + b[0], s * u.w[1] + b[1]], u.c))
                .collect(),
        )
        .unwrap();
        let mut z = Somrb::from_parts(
            mapped,
            template.grid().clone(),
            SomrbParams::new(0.2, 0.5).unwrap(),
            RbPolicy::WinCount(RbParams::new(0.1, 0.005).unwrap()),
            RandomSource::from_seed(5),
        )
        .unwrap();
        let (wa, fa, ca) = drive(&mut a, &stream);
        let (wz, fz, cz) = drive(&mut z, &affine(&stream, s, &b));
        assert_eq!(wa, wz);
        assert_eq!(fa, fz);
        assert_eq!(ca, cz);
        assert_eq!(a.grid().edges(), z.grid().edges());
    }
}

/// Randomized stepping keeps the lattice and gas-graph invariants intact and
/// the unit count constant; unit-count constancy also covers okrb/okmeans.
#[test]
fn graph_invariants_under_randomized_runs() {
    for seed in 0..4u64 {
        let mut rng = RandomSource::from_seed(seed);
        let som_params = SomrbParams::new(0.2, 0.5).unwrap();
        let ng_params = NgrbParams::new(0.3, 0.5, 20).unwrap();
        let policy = RbPolicy::WinCount(RbParams::new(0.1, 0.01).unwrap());
        let mut som =
            Somrb::new(16, 2, som_params, policy, RandomSource::substream(seed, 2)).unwrap();
        let mut ng = Ngrb::new(16, 2, ng_params, policy, &mut rng).unwrap();
        let mut ok = Okrb::new(16, 2, OkrbParams::new(0.1).unwrap(), policy, &mut rng).unwrap();
        let mut km = OkMeans::new(16, 2, 0.5, &mut rng).unwrap();

        let mut stream = RandomSource::substream(seed, 3);
        for t in 0..2000u64 {
            // drifting box keeps RB busy
            let shift = (t / 500) as f64 * 5.0;
            let x = [shift + stream.unit_f64(), shift + stream.unit_f64()];
            som.step(&x).unwrap();
            ng.step(&x).unwrap();
            ok.step(&x).unwrap();
            km.step(&x).unwrap();
            if t % 50 == 0 {
                som.grid().check_invariants().unwrap();
                ng.graph().check_invariants(20).unwrap();
            }
            assert_eq!(som.codebook().len(), 16);
            assert_eq!(ng.codebook().len(), 16);
            assert_eq!(ok.codebook().len(), 16);
            assert_eq!(km.codebook().len(), 16);
        }
        som.grid().check_invariants().unwrap();
        ng.graph().check_invariants(20).unwrap();
    }
}
