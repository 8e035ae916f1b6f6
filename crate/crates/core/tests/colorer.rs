//! Properties of the recoloring colorer on random instances.

use hypercolor_core::model::{sample_stream, ModelParams};
use hypercolor_core::oracle::{is_r_colorable, OracleLimits};
use hypercolor_core::recolor::{color, color_from_lists, derive_params, phase2_with_eta, trial, trial_from_lists};
use hypercolor_core::{Coloring, Hypergraph, ListAssignment};
use proptest::prelude::*;

fn xi_monochromatic_vertices(h: &Hypergraph, xi: &[u32]) -> Vec<bool> {
    let mut out = vec![false; h.n()];
    for e in h.edges() {
        let c = xi[e[0] as usize - 1];
        if e.iter().all(|&v| xi[v as usize - 1] == c) {
            for &v in e {
                out[v as usize - 1] = true;
            }
        }
    }
    out
}

#[test]
fn recolored_vertices_lie_in_monochromatic_edges() {
    let model = ModelParams::new(40, 4, 0.0015, 3).unwrap();
    let params = derive_params(4, 2, 2.0, 4.0, 1).unwrap();
    for run in 0..1000u64 {
        let h = sample_stream(&model, run).unwrap();
        let t = trial(&h, &params, run, 0).unwrap();
        let mono = xi_monochromatic_vertices(&h, t.xi.as_slice());
        for (i, (&x, &z)) in t.xi.as_slice().iter().zip(t.zeta.as_slice()).enumerate() {
            if x != z {
                assert!(mono[i], "run {run}: vertex {} recolored outside a monochromatic edge", i + 1);
                assert_eq!(z, t.eta[i]);
            }
        }
    }
}

#[test]
fn proposal_frequencies_match_p_recolor() {
    let params = derive_params(20, 3, 2.0, 4.0, 1).unwrap();
    let h = Hypergraph::empty(50, 20).unwrap();
    let runs = 400u64;
    let mut counts = [0usize; 4];
    for run in 0..runs {
        for &e in &trial(&h, &params, 77, run).unwrap().eta {
            counts[e as usize] += 1;
        }
    }
    let total = (runs * 50) as f64;
    let p = params.p_recolor;
    for (u, &c) in counts.iter().enumerate() {
        let expected = if u == 0 { 1.0 - 3.0 * p } else { p };
        let se = (expected * (1.0 - expected) / total).sqrt();
        assert!((c as f64 / total - expected).abs() <= 4.0 * se, "color {u}: {c}");
    }
}

#[test]
fn phase1_is_uniform() {
    let params = derive_params(5, 3, 2.0, 4.0, 1).unwrap();
    let h = Hypergraph::empty(10, 5).unwrap();
    let runs = 10_000u64;
    let mut counts = [0usize; 4];
    for run in 0..runs {
        counts[trial(&h, &params, 5, run).unwrap().xi.color(4) as usize] += 1;
    }
    let se = (1.0 / 3.0 * 2.0 / 3.0 / runs as f64).sqrt();
    for &c in &counts[1..] {
        assert!((c as f64 / runs as f64 - 1.0 / 3.0).abs() <= 4.0 * se);
    }
}

#[test]
fn single_edge_always_colored_within_fifty_trials() {
    let h = Hypergraph::new(3, 3, vec![vec![1, 2, 3]]).unwrap();
    let params = derive_params(3, 2, 2.0, 4.0, 1).unwrap();
    for seed in 0..1000 {
        assert!(color(&h, &params, 50, seed).unwrap().success);
    }
}

#[test]
fn successes_are_proper_and_confirmed_by_the_oracle() {
    let limits = OracleLimits::default();
    for (i, (n, k, p, r)) in [(10, 3, 0.2, 2), (12, 3, 0.1, 2), (9, 4, 0.3, 2), (10, 3, 0.6, 3)].into_iter().enumerate() {
        let model = ModelParams::new(n, k, p, i as u64).unwrap();
        let params = derive_params(k, r, 2.0, 4.0, 1).unwrap();
        for s in 0..50 {
            let h = sample_stream(&model, s).unwrap();
            let out = color(&h, &params, 30, s).unwrap();
            if out.success {
                assert!(h.is_proper(out.coloring.as_ref().unwrap()).unwrap());
                assert_eq!(is_r_colorable(&h, r, &limits).unwrap().is_colorable(), Some(true));
            }
        }
    }
}

#[test]
fn identical_lists_behave_like_plain_coloring() {
    // same success rate within sampling error over many instances
    let model = ModelParams::new(10, 3, 0.25, 4).unwrap();
    let params = derive_params(3, 2, 2.0, 4.0, 1).unwrap();
    let lists = ListAssignment::uniform(10, 2);
    let (mut plain, mut listed) = (0, 0);
    let runs = 600u64;
    for s in 0..runs {
        let h = sample_stream(&model, s).unwrap();
        plain += color(&h, &params, 1, s).unwrap().success as usize;
        listed += color_from_lists(&h, &lists, &params, 1, s + 1_000_000).unwrap().success as usize;
    }
    let (a, b) = (plain as f64 / runs as f64, listed as f64 / runs as f64);
    let se = (a * (1.0 - a) / runs as f64 + b * (1.0 - b) / runs as f64).sqrt();
    assert!((a - b).abs() <= 4.0 * se.max(1e-3), "{a} vs {b}");
}

#[test]
fn list_outcomes_respect_lists() {
    let model = ModelParams::new(9, 3, 0.2, 6).unwrap();
    let params = derive_params(3, 2, 2.0, 4.0, 1).unwrap();
    for s in 0..1000u64 {
        let h = sample_stream(&model, s % 50).unwrap();
        let lists = ListAssignment::new(
            2,
            (0..9).map(|v| vec![1 + ((s + v) % 3) as u32, 4 + (s * v % 2) as u32]).collect(),
        )
        .unwrap();
        let t = trial_from_lists(&h, &lists, &params, s, 0).unwrap();
        assert!(lists.admits(&t.zeta));
        assert!(lists.admits(&t.xi));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn zeta_takes_xi_or_a_nonzero_proposal(seed in any::<u64>(), p in 0.05f64..0.5) {
        let h = sample_stream(&ModelParams::new(12, 3, p, seed).unwrap(), 0).unwrap();
        let params = derive_params(3, 2, 2.0, 4.0, 2).unwrap();
        let t = trial(&h, &params, seed, 1).unwrap();
        for i in 0..h.n() {
            let z = t.zeta.as_slice()[i];
            prop_assert!(z != 0);
            prop_assert!(z == t.xi.as_slice()[i] || z == t.eta[i]);
        }
    }

    #[test]
    fn proper_phase1_is_left_alone(seed in any::<u64>(), eta in proptest::collection::vec(0u32..3, 12)) {
        let h = sample_stream(&ModelParams::new(12, 3, 0.1, seed).unwrap(), 0).unwrap();
        let params = derive_params(3, 2, 2.0, 4.0, 1).unwrap();
        let xi = Coloring::new((0..12).map(|i| 1 + ((seed >> i) & 1) as u32).collect()).unwrap();
        if h.is_proper(&xi).unwrap() {
            prop_assert_eq!(phase2_with_eta(&h, &params, &xi, eta), xi);
        }
    }
}
