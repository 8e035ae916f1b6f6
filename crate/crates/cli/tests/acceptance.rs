//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use hypercolor_core::bounds::{
    check_theorem4, eval_w, evaluate_degree_bound, evaluate_threshold_bound, find_min_k_condition3, omega_max,
    phi, BoundId, OmegaRule, ThresholdParams, WParams,
};
use hypercolor_core::model::{expected_edge_count, sample_coupled, sample_stream, theorem2_p, ModelParams};
use hypercolor_core::oracle::{chromatic_number, is_r_choosable_over_palette, is_r_colorable, ChromaticNumber, Choosability, OracleLimits};
use hypercolor_core::recolor::{color, derive_params, trial};
use hypercolor_core::sweep::{run_sweep, wilson_interval, Method, PGrid, SweepConfig};
use hypercolor_core::{Hypergraph, Triangle};

type Verdict = Result<String, String>;

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, format!("took {elapsed:?}, limit {limit:?}"))
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn fano() -> Hypergraph {
    let edges = [[1, 2, 3], [1, 4, 5], [1, 6, 7], [2, 4, 6], [2, 5, 7], [3, 4, 7], [3, 5, 6]];
    Hypergraph::new(7, 3, edges.iter().map(|e| e.to_vec()).collect()).unwrap()
}

fn c1_parameters() -> Verdict {
    let start = Instant::now();
    let big = derive_params(1_000_000, 2, 2.0, 4.0, 2).map_err(|e| e.to_string())?;
    let small = derive_params(100, 2, 2.0, 4.0, 1).map_err(|e| e.to_string())?;
    let phi_big = phi(1e6).map_err(|e| e.to_string())?;
    let phi_small = phi(100.0).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(big.t == 2, format!("t(1e6) = {}", big.t))?;
    check(small.t == 1, format!("t(100) = {}", small.t))?;
    let q = 2.0 * 100f64.ln() / 100.0;
    check(rel(small.q, q) < 1e-12, format!("q(100) = {}", small.q))?;
    check(phi_big == 2.0 && phi_small == 4.0, format!("phi = {phi_big}, {phi_small}"))?;
    within(elapsed, Duration::from_millis(1))?;
    Ok(format!("t=2,1 q={q:.6} phi=2,4 in {elapsed:?}"))
}

/// High-precision reference for summand 2 at k = 10^6 (tests/oracles in the core crate).
const SUMMAND2_1E6: f64 = 1.748_867_848_621_322;

fn c2_condition3() -> Verdict {
    let start = Instant::now();
    let lo = check_theorem4(1_000_000, 2, omega_max(1e6), 2.0, 4.0, 100).map_err(|e| e.to_string())?;
    let hi = check_theorem4(10_000_000_000_000, 2, omega_max(1e13), 2.0, 4.0, 100).map_err(|e| e.to_string())?;
    let k = find_min_k_condition3(OmegaRule::LogRatio, 2.0, 4.0, 1_000_000, 10_000_000_000_000)
        .map_err(|e| e.to_string())?
        .ok_or("no k found")?;
    let at = |k: u64| hypercolor_core::bounds::condition3(k, omega_max(k as f64), 2.0, 4.0).map(|c| c.holds);
    let endpoints = (at(k).map_err(|e| e.to_string())?, at(k - 1).map_err(|e| e.to_string())?);
    let elapsed = start.elapsed();
    let s2 = lo.condition3.summands[1].ok_or("summand 2 undefined")?.value();
    check(!lo.condition3.holds, "condition3 holds at 1e6")?;
    check(lo.condition3.dominant() == 2, "summand 2 not dominant at 1e6")?;
    check(s2 > 0.25 && rel(s2, SUMMAND2_1E6) < 0.01, format!("summand 2 = {s2}"))?;
    check(hi.condition3.holds, "condition3 fails at 1e13")?;
    check(1_000_000 < k && k < 10_000_000_000_000, format!("min k = {k}"))?;
    check(endpoints == (true, false), format!("re-evaluation at k, k-1 gave {endpoints:?}"))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("summand2={s2:.6} min_k={k} in {elapsed:?}"))
}

/// Value of the dependency sum at the criterion point from a 60-digit evaluation.
const W_30_REFERENCE: f64 = 1.715_380_803_524_782_6e-7;

fn c3_w_sum() -> Verdict {
    let start = Instant::now();
    let q = 2.0 * 30f64.ln() / 30.0;
    let w = eval_w(&WParams { k: 30, r: 2, omega: 1, t: 2, q, p: q, d: 100 }).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let v = w.value.value();
    check(rel(v, W_30_REFERENCE) < 1e-9, format!("W = {v}"))?;
    within(elapsed, Duration::from_millis(10))?;
    Ok(format!("W={v:.12e} in {elapsed:?}"))
}

fn c4_generator() -> Verdict {
    let start = Instant::now();
    let params = ModelParams::new(12, 3, 0.05, 2024).unwrap();
    let runs = 2000;
    let counts: Vec<f64> = (0..runs).map(|s| sample_stream(&params, s).unwrap().m() as f64).collect();
    let mean = counts.iter().sum::<f64>() / runs as f64;
    let se = (220.0 * 0.05 * 0.95 / runs as f64).sqrt();
    let mut nested = 0;
    for seed in 0..100 {
        let hs = sample_coupled(12, 3, &[0.03, 0.06], seed).map_err(|e| e.to_string())?;
        let big: BTreeSet<&[u32]> = hs[1].edges().collect();
        nested += hs[0].edges().all(|e| big.contains(e)) as usize;
    }
    let elapsed = start.elapsed();
    let expected = expected_edge_count(&params);
    check((mean - expected).abs() <= 4.0 * se, format!("mean {mean} vs {expected} (4 SE = {})", 4.0 * se))?;
    check(nested == 100, format!("{nested}/100 coupled pairs nested"))?;
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!("mean m={mean:.4} (target 11, 4SE={:.3}) coupling 100/100 in {elapsed:?}", 4.0 * se))
}

fn set(h: &Hypergraph, e: usize) -> BTreeSet<u32> {
    h.edge(e).iter().copied().collect()
}

fn sticks_out(a: &BTreeSet<u32>, b: &BTreeSet<u32>, c: &BTreeSet<u32>) -> bool {
    a.intersection(b).any(|v| !c.contains(v))
}

fn c5_structure() -> Verdict {
    let start = Instant::now();
    let params = ModelParams::new(15, 3, 0.08, 77).unwrap();
    let mut triangles_seen = 0;
    for s in 0..100 {
        let h = sample_stream(&params, s).unwrap();
        let m = h.m();
        let sets: Vec<_> = (0..m).map(|e| set(&h, e)).collect();
        let mut all = Vec::new();
        for a in 0..m {
            for b in a + 1..m {
                for c in b + 1..m {
                    let (x, y, z) = (&sets[a], &sets[b], &sets[c]);
                    if sticks_out(x, y, z) && sticks_out(x, z, y) && sticks_out(y, z, x) {
                        all.push(Triangle([a, b, c]));
                    }
                }
            }
        }
        check(h.triangle_count() == all.len(), format!("sample {s}: triangle count"))?;
        triangles_seen += all.len();
        for u in 0..m {
            let mine: Vec<&Triangle> = all.iter().filter(|t| t.contains(u)).collect();
            let mut got = h.triangles_containing(u).unwrap();
            got.sort();
            check(got.iter().eq(mine.iter().copied()), format!("sample {s}: T_{u}"))?;
            for u2 in (0..m).filter(|&x| x != u) {
                let want = mine.iter().filter(|t| t.contains(u2)).count();
                check(h.edge_degree_wrt(u2, u).unwrap() == want, format!("sample {s}: D({u2},{u})"))?;
            }
            for v in 1..=h.n() as u32 {
                let want = mine
                    .iter()
                    .filter(|t| {
                        let (a, b) = t.others(u);
                        sets[a].contains(&v) && sets[b].contains(&v) && !sets[u].contains(&v)
                    })
                    .count();
                check(h.vertex_degree_wrt(v as usize, u).unwrap() == want, format!("sample {s}: d({v},{u})"))?;
            }
        }
        let sizes: Vec<usize> =
            (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).map(|(a, b)| sets[a].intersection(&sets[b]).count()).collect();
        for l in 1..=3 {
            check(h.is_l_simple(l) == sizes.iter().all(|&x| x <= l), format!("sample {s}: {l}-simple"))?;
            check(h.count_heavy_pairs(l) == sizes.iter().filter(|&&x| x >= l).count(), format!("sample {s}: heavy pairs"))?;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!("100 samples, {triangles_seen} triangles, all queries exact in {elapsed:?}"))
}

fn c6_soundness() -> Verdict {
    let instances = [(12, 3, 0.05, 2), (20, 4, 0.002, 2), (15, 3, 0.1, 3), (30, 5, 0.0002, 2), (10, 3, 0.3, 2)];
    let limits = OracleLimits::default();
    let (mut trials, mut successes, mut proper_phase1) = (0, 0, 0);
    for (i, &(n, k, p, r)) in instances.iter().enumerate() {
        let model = ModelParams::new(n, k, p, i as u64).unwrap();
        let params = derive_params(k, r, 2.0, 4.0, 1).map_err(|e| e.to_string())?;
        for s in 0..2000u64 {
            let h = sample_stream(&model, s / 20).unwrap();
            let t = trial(&h, &params, s, 0).map_err(|e| e.to_string())?;
            let out = color(&h, &params, 1, s).map_err(|e| e.to_string())?;
            trials += 1;
            if out.success {
                successes += 1;
                let c = out.coloring.as_ref().unwrap();
                check(h.is_proper(c).unwrap(), format!("improper success on instance {i}, seed {s}"))?;
                check(*c == t.zeta, "outcome differs from its trial trace")?;
                if s % 20 == 0 && n <= limits.max_vertices {
                    let verdict = is_r_colorable(&h, r, &limits).map_err(|e| e.to_string())?.is_colorable();
                    check(verdict != Some(false), "success on an uncolorable instance")?;
                }
            }
            if h.is_proper(&t.xi).unwrap() {
                proper_phase1 += 1;
                check(t.zeta == t.xi, format!("proper phase-1 coloring changed (instance {i}, seed {s})"))?;
            }
        }
    }
    Ok(format!("{trials} trials, {successes} successes all proper, {proper_phase1} proper phase-1 colorings unchanged"))
}

fn c7_oracle() -> Verdict {
    let start = Instant::now();
    let limits = OracleLimits::default();
    let chi = |h: &Hypergraph| match chromatic_number(h, &limits) {
        Ok(ChromaticNumber::Exact { chi, .. }) => Ok(chi),
        other => Err(format!("{other:?}")),
    };
    let f = fano();
    check(is_r_colorable(&f, 2, &limits).map_err(|e| e.to_string())?.is_colorable() == Some(false), "Fano 2-colorable")?;
    check(chi(&f)? == 3, "chi(Fano) != 3")?;
    check(chi(&Hypergraph::complete(5, 3).unwrap())? == 3, "chi(K_5^(3)) != 3")?;
    check(chi(&Hypergraph::new(4, 4, vec![vec![1, 2, 3, 4]]).unwrap())? == 2, "chi(single edge) != 2")?;
    let mut agree = 0;
    for (h, r) in [(f.clone(), 2), (f, 3), (Hypergraph::complete(5, 3).unwrap(), 2), (Hypergraph::complete(6, 3).unwrap(), 3)] {
        let col = is_r_colorable(&h, r, &limits).map_err(|e| e.to_string())?.is_colorable();
        let ch = is_r_choosable_over_palette(&h, r, r, &limits).map_err(|e| e.to_string())?;
        check(col == Some(ch == Choosability::ChoosableOverPalette), format!("choosability over palette {r} disagrees"))?;
        agree += 1;
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("Fano chi=3, K5(3) chi=3, edge chi=2, {agree} palette checks agree in {elapsed:?}"))
}

fn c8_colorer_vs_oracle() -> Verdict {
    let start = Instant::now();
    let limits = OracleLimits::default();
    let params = derive_params(3, 2, 2.0, 4.0, omega_max(3.0)).map_err(|e| e.to_string())?;
    let mut chosen = None;
    for p in [0.15, 0.175, 0.2, 0.225, 0.25, 0.275, 0.3] {
        let model = ModelParams::new(10, 3, p, 8).unwrap();
        let hs: Vec<Hypergraph> = (0..200).map(|s| sample_stream(&model, s).unwrap()).collect();
        let verdicts: Vec<bool> = hs
            .iter()
            .map(|h| is_r_colorable(h, 2, &limits).map_err(|e| e.to_string())?.is_colorable().ok_or("oracle budget".to_string()))
            .collect::<Result<_, _>>()?;
        let frac = verdicts.iter().filter(|&&v| v).count() as f64 / 200.0;
        if (0.3..=0.7).contains(&frac) {
            chosen = Some((p, frac, hs, verdicts));
            break;
        }
    }
    let (p, frac, hs, verdicts) = chosen.ok_or("no grid p gives a colorable fraction in [0.3, 0.7]")?;
    let (mut hit, mut colorable, mut false_success) = (0, 0, 0);
    for (s, (h, &ok)) in hs.iter().zip(&verdicts).enumerate() {
        let out = color(h, &params, 200, s as u64).map_err(|e| e.to_string())?;
        if ok {
            colorable += 1;
            hit += out.success as usize;
        } else {
            false_success += out.success as usize;
        }
    }
    let elapsed = start.elapsed();
    let rate = hit as f64 / colorable as f64;
    check(rate >= 0.9, format!("colorer found {hit}/{colorable} colorable instances"))?;
    check(false_success == 0, format!("{false_success} successes on uncolorable instances"))?;
    within(elapsed, Duration::from_secs(120))?;
    Ok(format!("p={p} colorable={frac:.3} colorer {hit}/{colorable} ({:.1}%), 0 false successes in {elapsed:?}", 100.0 * rate))
}

fn c9_phase_transition() -> Verdict {
    let start = Instant::now();
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let config = SweepConfig {
        n: 14,
        k: 3,
        r: 2,
        p_grid: PGrid::Linear { from: 0.0, to: 0.24, steps: 12 },
        samples_per_point: 200,
        method: Method::Oracle,
        max_trials: 100,
        seed: 14,
        alpha: None,
        b: None,
        omega: None,
        q: None,
        threads,
    };
    let rows = run_sweep(&config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(rows.iter().all(|r| r.unknown == 0), "undecided samples")?;
    let est: Vec<f64> = rows.iter().map(|r| r.estimate.unwrap()).collect();
    let mut inversions = 0;
    for w in rows.windows(2) {
        if w[1].estimate > w[0].estimate {
            inversions += 1;
            check(w[1].ci_low <= w[0].ci_high, format!("inversion at p={} outside CI overlap", w[1].p))?;
        }
    }
    check(inversions <= 1, format!("{inversions} inversions"))?;
    check(est[0] == 1.0, format!("estimate at p=0 is {}", est[0]))?;
    check(*est.last().unwrap() < 0.05, format!("estimate at top is {}", est.last().unwrap()))?;
    within(elapsed, Duration::from_secs(300))?;
    let curve: Vec<String> = est.iter().map(|e| format!("{e:.3}")).collect();
    Ok(format!("curve [{}], {inversions} inversion(s) in {elapsed:?}", curve.join(" ")))
}

fn c10_two_simple_trend() -> Verdict {
    let start = Instant::now();
    let mut fracs = Vec::new();
    for n in [100usize, 200, 400] {
        let p = theorem2_p(n, 5, 2).map_err(|e| e.to_string())?.value();
        let model = ModelParams::new(n, 5, p, n as u64).map_err(|e| e.to_string())?;
        let simple = (0..200).filter(|&s| sample_stream(&model, s).unwrap().is_l_simple(2)).count();
        fracs.push((n, simple, wilson_interval(simple, 200).unwrap()));
    }
    let elapsed = start.elapsed();
    for w in fracs.windows(2) {
        let ((n0, a, ci_a), (n1, b, ci_b)) = (w[0], w[1]);
        check(b >= a || ci_b.1 >= ci_a.0, format!("2-simple fraction drops from n={n0} to n={n1} beyond CI"))?;
    }
    within(elapsed, Duration::from_secs(300))?;
    let shown: Vec<String> = fracs.iter().map(|(n, s, _)| format!("n={n}:{:.3}", *s as f64 / 200.0)).collect();
    Ok(format!("{} in {elapsed:?}", shown.join(" ")))
}

fn c11_hierarchy() -> Verdict {
    let start = Instant::now();
    let mut checked = 0;
    for k in 3..=50u64 {
        for r in 2..=10u64 {
            let params = ThresholdParams::new(1000, k, r);
            let t2 = evaluate_threshold_bound(BoundId::Thm2, &params).map_err(|e| e.to_string())?;
            let l2 = evaluate_threshold_bound(BoundId::Lemma2, &params).map_err(|e| e.to_string())?;
            let lo = evaluate_degree_bound(BoundId::ErdLovLower, k, r).map_err(|e| e.to_string())?;
            let hi = evaluate_degree_bound(BoundId::KostRodl, k, r).map_err(|e| e.to_string())?;
            for v in [t2, l2, lo, hi] {
                check(v.ln().is_finite() && v.sign() == 1, format!("non-finite or non-positive at k={k} r={r}"))?;
            }
            check(t2 < l2, format!("thm2 >= lemma2 at k={k} r={r}"))?;
            check(lo <= hi, format!("erdlov_lower > kost_rodl at k={k} r={r}"))?;
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!("{checked} (k, r) pairs in {elapsed:?}"))
}

fn c12_determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for threads in ["1", "8"] {
        let path = dir.path().join(format!("sweep{threads}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_hypercolor"))
            .args(["sweep", "--n", "10", "--k", "3", "--r", "2", "--p-from", "0", "--p-to", "0.4", "--p-steps", "6"])
            .args(["--samples", "40", "--method", "both", "--seed", "12", "--max-trials", "50", "--threads", threads])
            .arg("-o")
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        check(status.success(), format!("sweep with {threads} threads exited {status}"))?;
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    check(outputs[0] == outputs[1], "CSV differs between 1 and 8 threads")?;
    Ok(format!("{} bytes identical across 1 and 8 threads", outputs[0].len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 12] = [
        ("parameter formulas", c1_parameters),
        ("summand condition regime", c2_condition3),
        ("dependency sum vs reference", c3_w_sum),
        ("generator statistics", c4_generator),
        ("structural queries vs brute force", c5_structure),
        ("colorer soundness and conservativity", c6_soundness),
        ("oracle ground truths", c7_oracle),
        ("colorer vs oracle", c8_colorer_vs_oracle),
        ("phase-transition shape", c9_phase_transition),
        ("2-simplicity trend", c10_two_simple_trend),
        ("bound hierarchy", c11_hierarchy),
        ("end-to-end determinism", c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
