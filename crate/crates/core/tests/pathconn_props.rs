use cameo_core::graphgen::Graph;
use cameo_core::pathconn;
use proptest::prelude::*;

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let len = pairs.len();
        prop::collection::vec(any::<bool>(), len).prop_map(move |keep| {
            let edges: Vec<(usize, usize)> = pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e).collect();
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

fn oracle(g: &Graph, i: usize, j: usize, k: usize) -> u128 {
    fn go(g: &Graph, path: &mut Vec<usize>, j: usize, k: usize) -> u128 {
        let last = *path.last().unwrap();
        if path.len() == k {
            return g.has_edge(last, j) as u128;
        }
        let mut total = 0;
        for v in 0..g.n() {
            if v != j && !path.contains(&v) && g.has_edge(last, v) {
                path.push(v);
                total += go(g, path, j, k);
                path.pop();
            }
        }
        total
    }
    go(g, &mut vec![i], j, k)
}

/// Smallest diameter over connected induced subgraphs on exactly `size` vertices.
fn essential_oracle(g: &Graph, size: usize) -> Option<usize> {
    let n = g.n();
    let mut best: Option<usize> = None;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != size {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let mut diam = 0;
        let mut connected = true;
        for &s in &members {
            let mut dist = vec![usize::MAX; n];
            dist[s] = 0;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in g.neighbors(v) {
                    let w = w as usize;
                    if mask >> w & 1 == 1 && dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
            for &t in &members {
                if dist[t] == usize::MAX {
                    connected = false;
                } else {
                    diam = diam.max(dist[t]);
                }
            }
        }
        if connected {
            best = Some(best.map_or(diam, |b: usize| b.min(diam)));
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn counts_match_oracle_and_are_symmetric(g in graph(7), a in 0usize..7, b in 0usize..7, k in 1usize..=6) {
        let (i, j) = (a % g.n(), b % g.n());
        prop_assume!(i != j);
        let c = pathconn::count_simple_paths(&g, i, j, k).unwrap();
        prop_assert_eq!(c, oracle(&g, i, j, k));
        prop_assert_eq!(c, pathconn::count_simple_paths(&g, j, i, k).unwrap());
        if k == 1 {
            prop_assert_eq!(c, g.has_edge(i, j) as u128);
        }
    }

    #[test]
    fn adding_an_edge_never_decreases_counts(g in graph(8), a in 0usize..8, b in 0usize..8, u in 0usize..8, v in 0usize..8, k in 1usize..=7) {
        let n = g.n();
        let (i, j, u, v) = (a % n, b % n, u % n, v % n);
        prop_assume!(i != j && u != v && !g.has_edge(u, v));
        let bigger = g.with_edge(u, v).unwrap();
        prop_assert!(pathconn::count_simple_paths(&bigger, i, j, k).unwrap() >= pathconn::count_simple_paths(&g, i, j, k).unwrap());
    }

    #[test]
    fn distance_zero_count_below_distance(g in graph(9), a in 0usize..9, b in 0usize..9, k in 1usize..=8) {
        let (i, j) = (a % g.n(), b % g.n());
        prop_assume!(i != j);
        let d = pathconn::distance(&g, i, j);
        if d.is_none_or(|d| d as usize > k) {
            prop_assert_eq!(pathconn::count_simple_paths(&g, i, j, k).unwrap(), 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn essential_bound_is_never_below_the_optimum(g in graph(12), eps in 0.05f64..0.5, seed in any::<u64>()) {
        let n = g.n();
        let size = (eps * n as f64).ceil() as usize;
        prop_assume!(size <= 6);
        let est = pathconn::essential_diameter_upper(&g, eps, 4, seed).unwrap();
        match (est, essential_oracle(&g, size)) {
            (Some(e), Some(opt)) => {
                prop_assert!(e.upper_bound >= opt);
                prop_assert!(e.upper_bound <= 2 * e.witness_radius);
                prop_assert!(e.witness_size >= size);
            }
            (None, _) => {
                let (_, sizes) = g.components();
                prop_assert!(sizes.iter().all(|&s| s < size));
            }
            (Some(e), None) => prop_assert!(false, "bound {e:?} without a connected witness"),
        }
    }
}

#[test]
fn sampled_epl_is_within_three_standard_errors() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(3);
    for trial in 0..10u64 {
        let n = 200;
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| rng.gen::<f64>() < 0.015).collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        let exact = pathconn::distance_stats(&g, usize::MAX, 0).unwrap();
        assert!(exact.epl_exact);
        let sampled = pathconn::distance_stats(&g, 500, trial).unwrap();
        assert!(!sampled.epl_exact);
        let (e, s, se) = (exact.epl.unwrap(), sampled.epl.unwrap(), sampled.epl_stderr.unwrap());
        assert!((e - s).abs() <= 3.0 * se, "trial {trial}: exact {e}, sampled {s} +- {se}");
        assert!(e >= 1.0 && exact.component_diameter as f64 >= e);
    }
}

#[test]
fn gamma_stats_are_scheduling_independent() {
    let g = Graph::from_edges(40, &(0..40).flat_map(|u| [(u, (u + 1) % 40), (u, (u + 7) % 40)]).collect::<Vec<_>>()).unwrap();
    let a = pathconn::gamma_stats(&g, 4, 50, 9).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| pathconn::gamma_stats(&g, 4, 50, 9).unwrap());
    assert_eq!(a, b);
    assert!(!a.exhaustive);
}
