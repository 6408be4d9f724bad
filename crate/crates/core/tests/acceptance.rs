//! Acceptance run: one PASS or FAIL line per criterion.
//!
//! `cargo test --release --test acceptance` runs all twelve; numbers given
//! after `--` select a subset, e.g. `-- 6 7`.

mod common;

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{insert, random_batches, Draw};
use tdn_influence::harness::{
    generate_synthetic, run_experiment, without_wall_clock, Algorithm, ExperimentConfig, LifetimeSpec, SyntheticSpec,
};
use tdn_influence::histogram::PassRecord;
use tdn_influence::tdn::{EdgeId, LifetimeAssigner};
use tdn_influence::{BasicReduction, HistApprox, Lifetime, LifetimePolicy, NodeId, NodeSet, Oracle, SieveState, TdnGraph};

const STREAMS: u64 = 200;
const MINUTES_5: Duration = Duration::from_secs(300);

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }
}

/// A small random stream for the exhaustive checks.
struct Small {
    k: usize,
    eps: f64,
    max: u32,
    batches: Vec<Vec<(u64, u64, Lifetime)>>,
}

fn small_streams(salt: u64, max_lifetime: u32, finite: bool) -> Vec<Small> {
    (0..STREAMS)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(salt * 1_000_003 + i);
            let n = rng.gen_range(4..=12);
            let steps = rng.gen_range(1..=10);
            let k = [1, 2, 3][i as usize % 3];
            let eps = [0.1, 0.2][(i as usize / 3) % 2];
            let max = rng.gen_range(1..=max_lifetime);
            let draw = match (finite, i % 2) {
                (false, _) => Draw::Infinite,
                (true, 0) => Draw::Geometric([0.3, 0.5][rng.gen_range(0..2)], max),
                (true, _) => Draw::Constant(rng.gen_range(1..=max)),
            };
            Small {
                k,
                eps,
                max,
                batches: random_batches(&mut rng, n, steps, 5, draw),
            }
        })
        .collect()
}

fn opt(g: &TdnGraph, k: usize) -> usize {
    Oracle::new().brute_force_opt(&g.view(), k).unwrap().1
}

fn c1_sieve() -> Verdict {
    let start = Instant::now();
    let (mut steps, mut violations) = (0, Vec::new());
    for (i, s) in small_streams(1, 1, false).iter().enumerate() {
        let mut g = TdnGraph::new();
        let mut o = Oracle::new();
        let mut sieve = SieveState::new(s.k, s.eps).unwrap();
        for batch in &s.batches {
            let fresh = insert(&mut g, batch);
            sieve.feed(&g.view(), &mut o, &fresh);
            let value = sieve.current_solution(&g).1;
            let best = opt(&g, s.k);
            steps += 1;
            if (value as f64) < (0.5 - s.eps) * best as f64 {
                violations.push(format!("stream {i} t={}: {value} vs OPT {best}", g.now()));
            }
            g.advance_time();
        }
    }
    let elapsed = start.elapsed();
    Verdict::new(
        violations.is_empty() && elapsed < Duration::from_secs(60),
        format!(
            "value >= (1/2-eps)*OPT: {} violations over {STREAMS} streams, {steps} steps, {:.1} s{}",
            violations.len(),
            elapsed.as_secs_f64(),
            first(&violations)
        ),
    )
}

fn c2_basic_and_c4_head() -> (Verdict, Verdict) {
    let (mut steps, mut violations, mut uncovered) = (0, Vec::new(), Vec::new());
    for (i, s) in small_streams(2, 5, true).iter().enumerate() {
        let mut g = TdnGraph::new().with_max_lifetime(s.max);
        let mut o = Oracle::new();
        let mut r = BasicReduction::new(s.k, s.eps, s.max).unwrap().track_processed();
        for batch in &s.batches {
            let fresh = insert(&mut g, batch);
            r.process(&g, &mut o, &fresh).unwrap();
            let mut head: Vec<EdgeId> = r.instance(1).unwrap().processed_edges().unwrap().to_vec();
            head.sort_unstable();
            let alive: Vec<EdgeId> = g.alive_edges().map(|e| e.id).collect();
            if head != alive {
                uncovered.push(format!("stream {i} t={}: head {head:?} vs alive {alive:?}", g.now()));
            }
            let value = r.query(&g).1;
            let best = opt(&g, s.k);
            steps += 1;
            if (value as f64) < (0.5 - s.eps) * best as f64 {
                violations.push(format!("stream {i} t={}: {value} vs OPT {best}", g.now()));
            }
            r.advance();
            g.advance_time();
        }
    }
    (
        Verdict::new(
            violations.is_empty(),
            format!(
                "value >= (1/2-eps)*OPT, geometric and constant lifetimes, L <= 5: {} violations over {STREAMS} streams, {steps} steps{}",
                violations.len(),
                first(&violations)
            ),
        ),
        Verdict::new(
            uncovered.is_empty(),
            format!(
                "head processed multiset equals E_t: {} mismatches over {steps} steps{}",
                uncovered.len(),
                first(&uncovered)
            ),
        ),
    )
}

/// Criterion 3 plus the pass records criterion 8 inspects.
fn c3_hist() -> (Verdict, Vec<(usize, f64, Vec<PassRecord>)>) {
    let (mut steps, mut plain_bad, mut refined_bad) = (0, Vec::new(), Vec::new());
    let mut passes = Vec::new();
    for (i, s) in small_streams(3, 6, true).iter().enumerate() {
        let mut g = TdnGraph::new().with_max_lifetime(s.max);
        let (mut o1, mut o2) = (Oracle::new(), Oracle::new());
        let mut plain = HistApprox::new(s.k, s.eps, s.max).unwrap().record_passes();
        let mut refined = HistApprox::new(s.k, s.eps, s.max).unwrap().refine_head(true);
        for batch in &s.batches {
            let fresh = insert(&mut g, batch);
            let a = plain.step(&g, &mut o1, &fresh).unwrap();
            let b = refined.step(&g, &mut o2, &fresh).unwrap();
            let best = opt(&g, s.k) as f64;
            steps += 1;
            if (a.value as f64) < (1.0 / 3.0 - s.eps) * best {
                plain_bad.push(format!("stream {i} t={}: {} vs OPT {best}", g.now(), a.value));
            }
            if (b.value as f64) < (0.5 - s.eps) * best {
                refined_bad.push(format!("stream {i} t={}: refined {} vs OPT {best}", g.now(), b.value));
            }
            g.advance_time();
        }
        passes.push((s.k, s.eps, plain.take_passes()));
    }
    let verdict = Verdict::new(
        plain_bad.is_empty() && refined_bad.is_empty(),
        format!(
            "value >= (1/3-eps)*OPT: {} violations; refined head >= (1/2-eps)*OPT: {} violations; {STREAMS} streams, {steps} steps{}{}",
            plain_bad.len(),
            refined_bad.len(),
            first(&plain_bad),
            first(&refined_bad)
        ),
    );
    (verdict, passes)
}

fn c5_sieve_invariant() -> Verdict {
    let (mut checks, mut violations) = (0, Vec::new());
    for (i, s) in small_streams(1, 1, false).iter().enumerate() {
        let mut g = TdnGraph::new();
        let mut o = Oracle::new();
        let mut sieve = SieveState::new(s.k, s.eps).unwrap();
        for batch in &s.batches {
            let fresh = insert(&mut g, batch);
            sieve.feed(&g.view(), &mut o, &fresh);
            let mut check = Oracle::new();
            for (theta, set) in sieve.candidates(&g) {
                checks += 1;
                let f = check.spread(&g.view(), &set);
                if (f as f64) < set.len() as f64 * theta {
                    violations.push(format!("stream {i} t={}: f={f} |S|={} θ={theta:.3}", g.now(), set.len()));
                }
            }
            g.advance_time();
        }
    }
    Verdict::new(
        violations.is_empty(),
        format!(
            "f(S_θ) >= |S_θ|·θ: {} violations over {checks} threshold checks{}",
            violations.len(),
            first(&violations)
        ),
    )
}

fn size_bound(k: usize, eps: f64) -> usize {
    2 * ((k as f64).ln() / (1.0 / (1.0 - eps)).ln()).ceil() as usize + 4
}

fn c8_histogram(small: &[(usize, f64, Vec<PassRecord>)]) -> Verdict {
    let mut runs: Vec<(String, usize, f64, Vec<PassRecord>)> = small
        .iter()
        .enumerate()
        .map(|(i, (k, eps, p))| (format!("small stream {i}"), *k, *eps, p.clone()))
        .collect();

    // one mid-sized synthetic stream on top of the exhaustive ones
    let (k, eps, max) = (10, 0.2, 300);
    let spec: SyntheticSpec = "300,10,1500,100".parse().unwrap();
    let mut assigner = LifetimeAssigner::new(LifetimePolicy::Geometric { p: 0.005, max: Some(max) }, 8).unwrap();
    let mut g = TdnGraph::new().with_max_lifetime(max);
    let mut o = Oracle::new();
    let mut h = HistApprox::new(k, eps, max).unwrap().record_passes();
    for batch in generate_synthetic(&spec, 8) {
        let t = g.now();
        let (accepted, _) = assigner.assign(&batch.records);
        let fresh = g
            .insert_batch(accepted.into_iter().map(|mut e| {
                e.arrival = t;
                e
            }))
            .unwrap();
        h.step(&g, &mut o, &fresh).unwrap();
        g.advance_time();
    }
    runs.push(("synthetic 300,10,1500,100 geom(0.005) L=300".into(), k, eps, h.take_passes()));

    let (mut count, mut triple_bad, mut size_bad) = (0, Vec::new(), Vec::new());
    let mut largest = (0, 0, String::new());
    for (name, k, eps, passes) in &runs {
        let bound = size_bound(*k, *eps);
        for pass in passes {
            count += 1;
            for i in 0..pass.g.len().saturating_sub(2) {
                if pass.g[i + 2] as f64 >= (1.0 - eps) * pass.g[i] as f64 {
                    triple_bad.push(format!("{name} t={}: g={:?}", pass.time, pass.g));
                    break;
                }
            }
            if pass.indices.len() > bound {
                size_bad.push(format!("{name} t={}: |x|={} > {bound}, g={:?}", pass.time, pass.indices.len(), pass.g));
            }
            if pass.indices.len() > largest.0 {
                largest = (pass.indices.len(), bound, name.clone());
            }
        }
    }
    Verdict::new(
        triple_bad.is_empty() && size_bad.is_empty(),
        format!(
            "{count} passes: triple property violated in {}, size bound violated in {}; largest |x| {} (bound {}) on {}{}{}",
            triple_bad.len(),
            size_bad.len(),
            largest.0,
            largest.1,
            largest.2,
            first(&triple_bad),
            first(&size_bad)
        ),
    )
}

fn c6_config() -> ExperimentConfig {
    ExperimentConfig {
        algorithms: vec![Algorithm::HistApprox, Algorithm::LazyGreedy, Algorithm::Greedy],
        k: 10,
        epsilon: 0.2,
        lifetime: LifetimeSpec::Geometric(0.001),
        max_lifetime: Some(1000),
        synthetic: Some("500,20,5000,100".parse().unwrap()),
        seed: 1,
        ..ExperimentConfig::default()
    }
}

fn c7_config() -> ExperimentConfig {
    ExperimentConfig {
        algorithms: vec![Algorithm::HistApprox, Algorithm::BasicReduction],
        max_lifetime: Some(200),
        ..c6_config()
    }
}

/// Ratios of `a` to `b`: (total calls, mean value).
fn ratios(r: &tdn_influence::harness::ExperimentResult, a: Algorithm, b: Algorithm) -> (f64, f64, String) {
    let (x, y) = (r.summary(a).unwrap(), r.summary(b).unwrap());
    (
        x.calls.total() as f64 / y.calls.total() as f64,
        x.mean_value / y.mean_value,
        format!(
            "{a} {} calls, mean value {:.2}; {b} {} calls, mean value {:.2}",
            x.calls.total(),
            x.mean_value,
            y.calls.total(),
            y.mean_value
        ),
    )
}

fn metrics_of(config: &ExperimentConfig, dir: &std::path::Path, name: &str) -> (tdn_influence::harness::ExperimentResult, String) {
    let path = dir.join(name);
    let config = ExperimentConfig {
        out: Some(path.clone()),
        ..config.clone()
    };
    let result = run_experiment(&config).unwrap();
    (result, std::fs::read_to_string(path).unwrap())
}

fn single_protocol(config: &ExperimentConfig) -> ExperimentConfig {
    ExperimentConfig {
        single: true,
        steps: Some(5000),
        ..config.clone()
    }
}

fn c6_greedy(dir: &std::path::Path) -> (Verdict, String) {
    let start = Instant::now();
    let (r, text) = metrics_of(&c6_config(), dir, "c6.csv");
    let elapsed = start.elapsed();
    let (calls, _, detail) = ratios(&r, Algorithm::HistApprox, Algorithm::LazyGreedy);
    let (_, value, _) = ratios(&r, Algorithm::HistApprox, Algorithm::Greedy);

    let s = run_experiment(&single_protocol(&c6_config())).unwrap();
    let (s_calls, s_value, _) = ratios(&s, Algorithm::HistApprox, Algorithm::LazyGreedy);
    let verdict = Verdict::new(
        calls <= 1.0 / 3.0 && value >= 0.90 && elapsed < MINUTES_5,
        format!(
            "calls hist/lazy-greedy {calls:.3} (need <= 0.333), value hist/greedy {value:.4} (need >= 0.90), {:.0} s; {detail}\n    info: one interaction per step, 5000 steps: calls {s_calls:.3}, value {s_value:.4}",
            elapsed.as_secs_f64()
        ),
    );
    (verdict, text)
}

fn c7_basic() -> Verdict {
    let start = Instant::now();
    let r = run_experiment(&c7_config()).unwrap();
    let elapsed = start.elapsed();
    let (calls, value, detail) = ratios(&r, Algorithm::HistApprox, Algorithm::BasicReduction);
    let s = run_experiment(&single_protocol(&c7_config())).unwrap();
    let (s_calls, s_value, _) = ratios(&s, Algorithm::HistApprox, Algorithm::BasicReduction);
    Verdict::new(
        calls <= 0.5 && value >= 0.95 && elapsed < MINUTES_5,
        format!(
            "calls hist/basic {calls:.3} (need <= 0.5), value hist/basic {value:.4} (need >= 0.95), {:.0} s; {detail}\n    info: one interaction per step, 5000 steps: calls {s_calls:.3}, value {s_value:.4}",
            elapsed.as_secs_f64()
        ),
    )
}

fn c9_oracle() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = Vec::new();
    for trial in 0..1000 {
        let n = rng.gen_range(2..=10u64);
        let m = rng.gen_range(0..=3 * n as usize);
        let mut g = TdnGraph::new();
        insert(
            &mut g,
            &(0..m)
                .map(|_| {
                    let u = rng.gen_range(0..n);
                    let v = (u + rng.gen_range(1..n)) % n;
                    (u, v, Lifetime::Infinite)
                })
                .collect::<Vec<_>>(),
        );
        let mut nodes: Vec<u64> = (0..n).collect();
        nodes.shuffle(&mut rng);
        let v = NodeId(nodes[0]);
        let t_len = rng.gen_range(0..n as usize);
        let s_len = rng.gen_range(0..=t_len);
        let t: NodeSet = nodes[1..=t_len].iter().map(|&x| NodeId(x)).collect();
        let s: NodeSet = nodes[1..=s_len].iter().map(|&x| NodeId(x)).collect();
        let mut o = Oracle::new();
        let view = g.view();
        let (fs, ft) = (o.spread(&view, &s), o.spread(&view, &t));
        let (ds, dt) = (o.marginal_gain(&view, &s, v), o.marginal_gain(&view, &t, v));
        if fs > ft || ds < dt {
            violations.push(format!("trial {trial}: f(S)={fs} f(T)={ft} δ_S={ds} δ_T={dt}"));
        }
    }
    Verdict::new(
        violations.is_empty(),
        format!(
            "monotone and submodular on 1000 (S ⊆ T, v) triples: {} violations{}",
            violations.len(),
            first(&violations)
        ),
    )
}

fn c10_fig2() -> Verdict {
    let mut g = TdnGraph::new().with_max_lifetime(3);
    let lifetimes = |edges: &[(u64, u64, u32)]| -> Vec<(u64, u64, Lifetime)> {
        edges.iter().map(|&(u, v, l)| (u, v, Lifetime::Finite(l))).collect()
    };
    insert(&mut g, &lifetimes(&[(1, 2, 1), (1, 3, 1), (1, 4, 2), (5, 3, 3), (6, 4, 1), (6, 7, 1)]));
    let at_t = Oracle::new().brute_force_opt(&g.view(), 2).unwrap();
    g.advance_time();
    insert(&mut g, &lifetimes(&[(5, 2, 1), (7, 4, 2), (7, 6, 3)]));
    let at_t1 = Oracle::new().brute_force_opt(&g.view(), 2).unwrap();
    let want_t: NodeSet = [1u64, 6].into_iter().collect();
    let want_t1: NodeSet = [5u64, 7].into_iter().collect();
    Verdict::new(
        at_t == (want_t, 6) && at_t1 == (want_t1, 6),
        format!(
            "brute force k=2: {:?} = {} at t, {:?} = {} at t+1",
            at_t.0.to_vec(),
            at_t.1,
            at_t1.0.to_vec(),
            at_t1.1
        ),
    )
}

fn c11_memory() -> Verdict {
    let spec: SyntheticSpec = "5000,100,400,0".parse().unwrap();
    let mut assigner = LifetimeAssigner::new(LifetimePolicy::Geometric { p: 0.1, max: None }, 11).unwrap();
    let mut g = TdnGraph::new();
    let mut counts = Vec::new();
    for batch in generate_synthetic(&spec, 11) {
        let t = g.now();
        let (accepted, _) = assigner.assign(&batch.records);
        g.insert_batch(accepted.into_iter().map(|mut e| {
            e.arrival = t;
            e
        }))
        .unwrap();
        if t >= 100 {
            counts.push(g.alive_edge_count());
        }
        g.advance_time();
    }
    let (lo, hi) = (*counts.iter().min().unwrap(), *counts.iter().max().unwrap());
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    Verdict::new(
        lo >= 850 && hi <= 1150,
        format!(
            "alive edges over steps 100..400: min {lo}, max {hi}, mean {mean:.1} (need all within 1000 ± 15%)"
        ),
    )
}

fn c12_determinism(dir: &std::path::Path, first_run: &str) -> Verdict {
    let (_, again) = metrics_of(&c6_config(), dir, "c12.csv");
    let same = without_wall_clock(first_run) == without_wall_clock(&again);
    Verdict::new(
        same,
        format!(
            "two replays of the criterion 6 configuration, {} lines each, identical apart from wall clock: {same}",
            again.lines().count()
        ),
    )
}

fn first(items: &[String]) -> String {
    items.first().map(|s| format!("; first: {s}")).unwrap_or_default()
}

fn main() {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let run = |n: u32| wanted.is_empty() || wanted.contains(&n);
    let dir = tempfile::tempdir().unwrap();
    let mut failed = Vec::new();
    let mut report = |n: u32, name: &str, v: Verdict| {
        println!("criterion {n:>2} {} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass {
            failed.push(n);
        }
    };

    if run(1) {
        report(1, "sieve-adn approximation", c1_sieve());
    }
    if run(2) || run(4) {
        let (basic, head) = c2_basic_and_c4_head();
        if run(2) {
            report(2, "basic-reduction approximation", basic);
        }
        if run(4) {
            report(4, "head coverage", head);
        }
    }
    if run(3) || run(8) {
        let (hist, passes) = c3_hist();
        if run(3) {
            report(3, "hist-approx approximation", hist);
        }
        if run(8) {
            report(8, "histogram structure", c8_histogram(&passes));
        }
    }
    if run(5) {
        report(5, "sieve threshold invariant", c5_sieve_invariant());
    }
    let mut c6_text = None;
    if run(6) {
        let (v, text) = c6_greedy(dir.path());
        report(6, "efficiency vs greedy", v);
        c6_text = Some(text);
    }
    if run(7) {
        report(7, "efficiency vs basic-reduction", c7_basic());
    }
    if run(9) {
        report(9, "oracle properties", c9_oracle());
    }
    if run(10) {
        report(10, "two-step example", c10_fig2());
    }
    if run(11) {
        report(11, "memory model", c11_memory());
    }
    if run(12) {
        let text = c6_text.unwrap_or_else(|| metrics_of(&c6_config(), dir.path(), "c6.csv").1);
        report(12, "determinism", c12_determinism(dir.path(), &text));
    }

    if failed.is_empty() {
        println!("all selected criteria pass");
    } else {
        println!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
