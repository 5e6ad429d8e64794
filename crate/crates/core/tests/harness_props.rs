use cameo_core::graphgen::{self, CameoParams};
use cameo_core::harness::{self, ExperimentConfig};
use cameo_core::pathconn;
use cameo_core::stats;
use cameo_core::weights::{self, WeightDistribution};
use rand::{Rng, SeedableRng};

fn base(dist: WeightDistribution, c: f64, alpha: f64, n: usize, trials: usize) -> ExperimentConfig {
    ExperimentConfig {
        distribution: dist,
        c,
        alpha,
        n_list: vec![n],
        k_list: vec![1, 2, 3, 4, 5, 6, 8, 10],
        trials,
        pair_budget: 2000,
        master_seed: 21,
        output_path: String::new(),
        gamma_k_limit: 0,
        gamma_pair_budget: 10,
        resample_weights: false,
    }
}

/// Independent homogeneous simulator: every pair flips a coin with `p = 2c/n`.
fn homogeneous_reach(n: usize, c: f64, k_list: &[usize], pairs: usize, seed: u64) -> Vec<f64> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let p = 2.0 * c / n as f64;
    let mut adj = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
    }
    let mut hits = vec![0usize; k_list.len()];
    for _ in 0..pairs {
        let s = rng.gen_range(0..n);
        let mut t = rng.gen_range(0..n - 1);
        if t >= s {
            t += 1;
        }
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        for (h, &k) in hits.iter_mut().zip(k_list) {
            *h += (dist[t] <= k) as usize;
        }
    }
    hits.iter().map(|&h| h as f64 / pairs as f64).collect()
}

#[test]
fn homogeneous_reach_matches_independent_simulator() {
    let n = 10_000;
    let trials = 6;
    let config = base(WeightDistribution::exponential(1.0).unwrap(), 2.0, 0.0, n, trials);
    let scan = harness::run_threshold_scan(&config).unwrap();
    for (idx, &k) in config.k_list.iter().enumerate() {
        let ours: Vec<f64> = scan.cells.iter().map(|c| c.reach[idx]).collect();
        let theirs: Vec<f64> =
            (0..trials as u64).map(|t| homogeneous_reach(n, 2.0, &config.k_list, 2000, 100 + t)[idx]).collect();
        let (m1, s1) = stats::mean_stderr(&ours);
        let (m2, s2) = stats::mean_stderr(&theirs);
        let se = (s1 * s1 + s2 * s2).sqrt().max(1e-4);
        assert!((m1 - m2).abs() <= 3.0 * se, "k={k}: {m1} vs {m2} (se {se})");
    }
}

#[test]
fn scan_reach_is_monotone_and_deterministic() {
    let mut config = base(WeightDistribution::power_law(3.0).unwrap(), 1.5, 0.3, 3000, 4);
    config.n_list = vec![1000, 3000];
    config.gamma_k_limit = 2;
    let a = harness::run_threshold_scan(&config).unwrap();
    for cell in &a.cells {
        assert!(cell.reach.windows(2).all(|w| w[0] <= w[1]));
    }
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = one.install(|| harness::run_threshold_scan(&config).unwrap());
    let (mut x, mut y) = (Vec::new(), Vec::new());
    a.write_csv(&mut x).unwrap();
    b.write_csv(&mut y).unwrap();
    assert_eq!(x, y);
}

#[test]
fn mean_edge_count_matches_design_density() {
    let check = harness::edge_density_check(&WeightDistribution::power_law(3.0).unwrap(), 10_000, 2.0, 0.3, 20, 8).unwrap();
    assert_eq!(check.expected, 19998.0);
    assert!((check.mean / check.expected - 1.0).abs() < 0.02);
}

#[test]
fn single_edge_second_moment_is_inverse_probability() {
    let config = base(WeightDistribution::exponential(1.0).unwrap(), 1.0, 0.3, 40, 3000);
    let n = 40;
    let s = weights::sample_weights(&config.distribution, n, 0.3, cameo_core::rng::derive_seed(21, &[0, n as u64])).unwrap();
    let params = CameoParams::new(n, 1.0, 0.3).unwrap();
    let p = graphgen::edge_probability(&params, &s, 0, 1).unwrap();
    let r = harness::second_moment_ratio(&config, 0, 1, 1).unwrap();
    let (ratio, se) = (r.ratio.unwrap(), r.stderr.unwrap());
    assert!((ratio - 1.0 / p).abs() <= 3.0 * se, "{ratio} +- {se} vs {}", 1.0 / p);
}

#[test]
fn subcritical_second_moment_is_absent() {
    let config = base(WeightDistribution::power_law(3.0).unwrap(), 0.05, 0.25, 400, 200);
    let r = harness::second_moment_ratio(&config, 10, 20, 4).unwrap();
    assert!(r.ratio.is_none() && r.diagnostic.is_some());
}

#[test]
fn subcritical_has_no_giant_component() {
    let config = base(WeightDistribution::power_law(3.0).unwrap(), 0.2, 0.25, 20_000, 5);
    let scan = harness::run_threshold_scan(&ExperimentConfig { resample_weights: true, ..config }).unwrap();
    for cell in &scan.cells {
        assert!((cell.largest_component as f64) < 0.05 * cell.n as f64);
    }
}

#[test]
fn convergent_truncated_moment_matches_ergodic_average() {
    let d = WeightDistribution::exponential(1.0).unwrap();
    let t = harness::validate_lemma3(&d, 0.5, &[1_000_000], 10, 2).unwrap();
    assert!(!t.divergent);
    assert!((t.rows[0].median_ratio - 1.0).abs() < 0.05, "{:?}", t.rows);
}

#[test]
fn essential_diameter_of_high_alpha_graph_is_small() {
    let d = WeightDistribution::exponential(1.0).unwrap();
    let n = 20_000;
    let params = CameoParams::new(n, 2.0, 0.75).unwrap();
    let s = weights::sample_weights(&d, n, 0.75, 12).unwrap();
    let g = graphgen::generate(&params, &s, 12, graphgen::Method::Envelope).unwrap();
    let e = pathconn::essential_diameter_upper(&g, 0.01, 16, 1).unwrap().unwrap();
    assert!(e.upper_bound <= 6 && e.witness_size == 200, "{e:?}");
}
