//! Graph measurements: simple-path counts `Γ_k`, distances, expected path
//! length, component diameter and ε-essential diameter bounds.

use std::collections::VecDeque;
use std::fmt;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{CameoError, Result};
use crate::graphgen::Graph;
use crate::rng::{self, Domain};
use crate::stats;

/// Default node-expansion budget for one simple-path count.
pub const DEFAULT_EXPANSION_BUDGET: u64 = 100_000_000;
/// Components up to this size get an exact diameter from a full BFS sweep.
pub const EXACT_DIAMETER_LIMIT: usize = 50_000;
/// Essential-diameter witnesses up to this size get an exact induced diameter.
pub const EXACT_WITNESS_LIMIT: usize = 5_000;

const UNREACHED: u32 = u32::MAX;

/// BFS distances from `source`, `u32::MAX` for unreached vertices.
/// With `max_depth`, vertices farther than it are left unreached.
pub fn bfs_distances(g: &Graph, source: usize, max_depth: Option<u32>) -> Vec<u32> {
    let mut dist = vec![UNREACHED; g.n()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source as u32);
    let limit = max_depth.unwrap_or(u32::MAX - 1);
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize];
        if d >= limit {
            continue;
        }
        for &w in g.neighbors(v as usize) {
            if dist[w as usize] == UNREACHED {
                dist[w as usize] = d + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// `d(source, target)` by BFS that stops at the target.
pub fn distance(g: &Graph, source: usize, target: usize) -> Option<u32> {
    distance_within(g, source, target, u32::MAX)
}

/// `d(source, target)` when it is at most `limit`, else `None`.
pub fn distance_within(g: &Graph, source: usize, target: usize, limit: u32) -> Option<u32> {
    if source == target {
        return Some(0);
    }
    let mut dist = vec![UNREACHED; g.n()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source as u32);
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize];
        if d >= limit {
            return None;
        }
        for &w in g.neighbors(v as usize) {
            if dist[w as usize] == UNREACHED {
                if w as usize == target {
                    return Some(d + 1);
                }
                dist[w as usize] = d + 1;
                queue.push_back(w);
            }
        }
    }
    None
}

/// `Γ_k(i, j)` for one pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathCensus {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub simple_path_count: u128,
}

pub fn census(g: &Graph, i: usize, j: usize, k: usize, budget: u64) -> Result<PathCensus> {
    let simple_path_count = count_simple_paths_with_budget(g, i, j, k, budget)?;
    Ok(PathCensus { i, j, k, simple_path_count })
}

/// Number of simple paths with exactly `k` edges from `i` to `j`.
pub fn count_simple_paths(g: &Graph, i: usize, j: usize, k: usize) -> Result<u128> {
    count_simple_paths_with_budget(g, i, j, k, DEFAULT_EXPANSION_BUDGET)
}

/// Depth-limited search from `i`, pruned by BFS levels from `j`: a branch at
/// `v` with `r` edges left is abandoned when `d(v, j) > r`.
///
/// Exceeding `budget` node expansions is a resource error; no partial count is returned.
pub fn count_simple_paths_with_budget(g: &Graph, i: usize, j: usize, k: usize, budget: u64) -> Result<u128> {
    let n = g.n();
    if i == j {
        return Err(CameoError::domain("path endpoints must differ"));
    }
    if i >= n || j >= n {
        return Err(CameoError::domain(format!("vertex out of range for n={n}")));
    }
    if k == 0 {
        return Err(CameoError::domain("path length must be >= 1"));
    }
    let to_target = bfs_distances(g, j, Some(k as u32));
    if to_target[i] as usize > k {
        return Ok(0);
    }

    struct Search<'a> {
        g: &'a Graph,
        target: usize,
        to_target: &'a [u32],
        on_path: Vec<bool>,
        expansions: u64,
        budget: u64,
    }

    impl Search<'_> {
        fn extend(&mut self, v: usize, left: usize) -> Result<u128> {
            let mut count = 0u128;
            for &w in self.g.neighbors(v) {
                let w = w as usize;
                if w == self.target {
                    count += (left == 1) as u128;
                    continue;
                }
                if left == 1 || self.on_path[w] || self.to_target[w] as usize > left - 1 {
                    continue;
                }
                self.expansions += 1;
                if self.expansions > self.budget {
                    return Err(CameoError::resource(format!(
                        "simple-path search exceeded {} node expansions",
                        self.budget
                    )));
                }
                self.on_path[w] = true;
                count += self.extend(w, left - 1)?;
                self.on_path[w] = false;
            }
            Ok(count)
        }
    }

    let mut search = Search { g, target: j, to_target: &to_target, on_path: vec![false; n], expansions: 0, budget };
    search.on_path[i] = true;
    search.extend(i, k)
}

/// Maximum and mean `Γ_k` over sampled pairs and sampled edges.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaStats {
    pub k: usize,
    /// Max over every pair examined (sampled pairs and sampled edges).
    pub gamma_max: u128,
    /// Mean over edges of the graph; `None` for a graph without edges.
    pub gamma_mean_edges: Option<f64>,
    pub gamma_mean_edges_stderr: Option<f64>,
    /// Mean over uniformly sampled distinct pairs.
    pub gamma_mean_pairs: f64,
    pub gamma_mean_pairs_stderr: f64,
    pub pairs_examined: usize,
    pub edges_examined: usize,
    /// True when every pair and every edge was examined.
    pub exhaustive: bool,
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

fn sample_pairs(n: usize, count: usize, seed: u64, stream: u64) -> Vec<(usize, usize)> {
    let mut rng = rng::stream(seed, Domain::Pairs, stream);
    (0..count)
        .map(|_| {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            (u, v)
        })
        .collect()
}

/// `Γ_k` statistics over at most `pair_budget` pairs and `pair_budget` edges.
pub fn gamma_stats(g: &Graph, k: usize, pair_budget: usize, seed: u64) -> Result<GammaStats> {
    gamma_stats_with_budget(g, k, pair_budget, seed, DEFAULT_EXPANSION_BUDGET)
}

pub fn gamma_stats_with_budget(
    g: &Graph,
    k: usize,
    pair_budget: usize,
    seed: u64,
    expansion_budget: u64,
) -> Result<GammaStats> {
    if pair_budget == 0 {
        return Err(CameoError::domain("pair budget must be >= 1"));
    }
    let n = g.n();
    if n < 2 {
        return Err(CameoError::domain("gamma statistics need at least two vertices"));
    }
    let total_pairs = n * (n - 1) / 2;
    let pairs_exhaustive = total_pairs <= pair_budget;
    let pairs = if pairs_exhaustive { all_pairs(n) } else { sample_pairs(n, pair_budget, seed, 0) };
    let m = g.edge_count();
    let edges_exhaustive = m <= pair_budget;
    let edges: Vec<(usize, usize)> = if edges_exhaustive {
        g.edges().collect()
    } else {
        let all: Vec<(usize, usize)> = g.edges().collect();
        let mut rng = rng::stream(seed, Domain::Pairs, 1);
        (0..pair_budget).map(|_| all[rng.gen_range(0..m)]).collect()
    };
    let count = |&(u, v): &(usize, usize)| count_simple_paths_with_budget(g, u, v, k, expansion_budget);
    let pair_counts = pairs.par_iter().map(count).collect::<Result<Vec<u128>>>()?;
    let edge_counts = edges.par_iter().map(count).collect::<Result<Vec<u128>>>()?;
    let gamma_max = pair_counts.iter().chain(&edge_counts).copied().max().unwrap_or(0);
    let as_f64 = |v: &[u128]| v.iter().map(|&x| x as f64).collect::<Vec<f64>>();
    let (pm, pse) = stats::mean_stderr(&as_f64(&pair_counts));
    let (gamma_mean_edges, gamma_mean_edges_stderr) = if edge_counts.is_empty() {
        (None, None)
    } else {
        let (em, ese) = stats::mean_stderr(&as_f64(&edge_counts));
        (Some(em), Some(if edges_exhaustive { 0.0 } else { ese }))
    };
    Ok(GammaStats {
        k,
        gamma_max,
        gamma_mean_edges,
        gamma_mean_edges_stderr,
        gamma_mean_pairs: pm,
        gamma_mean_pairs_stderr: if pairs_exhaustive { 0.0 } else { pse },
        pairs_examined: pair_counts.len(),
        edges_examined: edge_counts.len(),
        exhaustive: pairs_exhaustive && edges_exhaustive,
    })
}

/// Distances of `count` uniformly sampled distinct pairs; `None` when
/// disconnected or farther than `max_depth`.
pub fn sample_pair_distances(g: &Graph, count: usize, seed: u64, max_depth: Option<u32>) -> Vec<Option<u32>> {
    if g.n() < 2 {
        return Vec::new();
    }
    let limit = max_depth.unwrap_or(u32::MAX);
    let pairs = sample_pairs(g.n(), count, seed, 2);
    pairs.par_iter().map(|&(u, v)| distance_within(g, u, v, limit)).collect()
}

/// Distance summary over same-component pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceStats {
    /// Mean distance over same-component pairs; `None` without edges.
    pub epl: Option<f64>,
    pub epl_stderr: Option<f64>,
    pub median_distance: Option<f64>,
    /// True when every same-component pair was measured.
    pub epl_exact: bool,
    pub component_diameter: usize,
    /// False when the diameter is a double-sweep lower bound.
    pub diameter_exact: bool,
    pub largest_component_size: usize,
    pub pair_sample_size: usize,
}

/// Eccentricity-based lower bound: a few double sweeps from random starts.
fn double_sweep(g: &Graph, members: &[u32], sweeps: usize, seed: u64) -> usize {
    let mut rng = rng::stream(seed, Domain::Pairs, 3);
    let mut best = 0;
    for _ in 0..sweeps.max(1) {
        let start = members[rng.gen_range(0..members.len())] as usize;
        let d0 = bfs_distances(g, start, None);
        let far = members.iter().copied().max_by_key(|&v| d0[v as usize]).unwrap() as usize;
        let d1 = bfs_distances(g, far, None);
        let ecc = members.iter().map(|&v| d1[v as usize]).max().unwrap() as usize;
        best = best.max(ecc);
    }
    best
}

/// Expected path length and component diameter.
///
/// Same-component pairs are measured exhaustively when there are at most
/// `pair_budget` of them and sampled uniformly otherwise.
pub fn distance_stats(g: &Graph, pair_budget: usize, seed: u64) -> Result<DistanceStats> {
    distance_stats_with_limit(g, pair_budget, seed, EXACT_DIAMETER_LIMIT)
}

pub fn distance_stats_with_limit(
    g: &Graph,
    pair_budget: usize,
    seed: u64,
    exact_diameter_limit: usize,
) -> Result<DistanceStats> {
    if pair_budget == 0 {
        return Err(CameoError::domain("pair budget must be >= 1"));
    }
    let n = g.n();
    let (label, sizes) = g.components();
    let largest = sizes.iter().copied().max().unwrap_or(0);
    let same_pairs: u128 = sizes.iter().map(|&s| (s as u128) * (s as u128 - 1) / 2).sum();
    if same_pairs == 0 {
        return Ok(DistanceStats {
            epl: None,
            epl_stderr: None,
            median_distance: None,
            epl_exact: true,
            component_diameter: 0,
            diameter_exact: true,
            largest_component_size: largest,
            pair_sample_size: 0,
        });
    }

    let mut members: Vec<Vec<u32>> = vec![Vec::new(); sizes.len()];
    for v in 0..n {
        members[label[v] as usize].push(v as u32);
    }

    let exact_pairs = same_pairs <= pair_budget as u128;
    let distances: Vec<f64> = if exact_pairs {
        (0..n)
            .into_par_iter()
            .flat_map_iter(|u| {
                let d = bfs_distances(g, u, None);
                members[label[u] as usize]
                    .iter()
                    .filter(move |&&v| v as usize > u)
                    .map(move |&v| d[v as usize] as f64)
                    .collect::<Vec<_>>()
            })
            .collect()
    } else {
        // Ordered same-component pairs are uniform when u is drawn with weight
        // |C(u)| - 1 and v uniformly from C(u) \ {u}.
        let mut cumulative = Vec::with_capacity(n);
        let mut acc = 0u64;
        for v in 0..n {
            acc += sizes[label[v] as usize] as u64 - 1;
            cumulative.push(acc);
        }
        let mut rng = rng::stream(seed, Domain::Pairs, 4);
        let pairs: Vec<(usize, usize)> = (0..pair_budget)
            .map(|_| {
                let r = rng.gen_range(0..acc);
                let u = cumulative.partition_point(|&c| c <= r);
                let comp = &members[label[u] as usize];
                let mut v = comp[rng.gen_range(0..comp.len())] as usize;
                while v == u {
                    v = comp[rng.gen_range(0..comp.len())] as usize;
                }
                (u, v)
            })
            .collect();
        pairs.par_iter().map(|&(u, v)| distance(g, u, v).unwrap() as f64).collect()
    };
    let (mean, se) = stats::mean_stderr(&distances);

    let (component_diameter, diameter_exact) = if largest <= exact_diameter_limit {
        let diam = (0..n)
            .into_par_iter()
            .filter(|&v| sizes[label[v] as usize] > 1)
            .map(|v| bfs_distances(g, v, None).into_iter().filter(|&d| d != UNREACHED).max().unwrap_or(0))
            .max()
            .unwrap_or(0);
        (diam as usize, true)
    } else {
        let big = sizes.iter().position(|&s| s == largest).unwrap();
        (double_sweep(g, &members[big], 4, seed), false)
    };

    Ok(DistanceStats {
        epl: Some(mean),
        epl_stderr: Some(if exact_pairs { 0.0 } else { se }),
        median_distance: stats::median(&distances),
        epl_exact: exact_pairs,
        component_diameter,
        diameter_exact,
        largest_component_size: largest,
        pair_sample_size: distances.len(),
    })
}

/// Certified upper bound on the ε-essential diameter.
#[derive(Debug, Clone, PartialEq)]
pub struct EssentialDiameterEstimate {
    pub epsilon: f64,
    pub upper_bound: usize,
    pub witness_center: usize,
    pub witness_radius: usize,
    /// `⌈εn⌉`, the size of the witness vertex set.
    pub witness_size: usize,
    /// True when `upper_bound` is the witness's exact induced diameter, false for `2·radius`.
    pub witness_diameter_exact: bool,
    pub centers_tried: usize,
}

/// Diameter of the subgraph induced on `members` (assumed connected).
fn induced_diameter(g: &Graph, members: &[u32]) -> usize {
    let mut index = vec![u32::MAX; g.n()];
    for (i, &v) in members.iter().enumerate() {
        index[v as usize] = i as u32;
    }
    (0..members.len())
        .into_par_iter()
        .map(|s| {
            let mut dist = vec![UNREACHED; members.len()];
            let mut queue = VecDeque::new();
            dist[s] = 0;
            queue.push_back(s);
            let mut far = 0;
            while let Some(a) = queue.pop_front() {
                far = far.max(dist[a]);
                for &w in g.neighbors(members[a] as usize) {
                    let b = index[w as usize];
                    if b != u32::MAX && dist[b as usize] == UNREACHED {
                        dist[b as usize] = dist[a] + 1;
                        queue.push_back(b as usize);
                    }
                }
            }
            far as usize
        })
        .max()
        .unwrap_or(0)
}

/// First `size` vertices in BFS order from `center` and the radius they span.
///
/// Every vertex's BFS parent precedes it, so the prefix induces a connected
/// subgraph of diameter at most twice the radius.
fn bfs_prefix(g: &Graph, center: usize, size: usize) -> Option<(Vec<u32>, usize)> {
    let mut dist = vec![UNREACHED; g.n()];
    let mut order = Vec::with_capacity(size);
    let mut queue = VecDeque::new();
    dist[center] = 0;
    queue.push_back(center as u32);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        if order.len() == size {
            return Some((order, dist[v as usize] as usize));
        }
        for &w in g.neighbors(v as usize) {
            if dist[w as usize] == UNREACHED {
                dist[w as usize] = dist[v as usize] + 1;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Upper bound on `min_{|V*| = ⌈εn⌉} diam(G|V*)` from BFS balls around
/// sampled centers. Half the centers are the highest-degree vertices, the
/// rest uniform. `None` when no component holds `⌈εn⌉` vertices.
pub fn essential_diameter_upper(
    g: &Graph,
    epsilon: f64,
    center_budget: usize,
    seed: u64,
) -> Result<Option<EssentialDiameterEstimate>> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(CameoError::domain(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    if center_budget == 0 {
        return Err(CameoError::domain("center budget must be >= 1"));
    }
    let n = g.n();
    let target = ((epsilon * n as f64).ceil() as usize).clamp(1, n.max(1));
    let (label, sizes) = g.components();
    let eligible: Vec<usize> = (0..n).filter(|&v| sizes[label[v] as usize] >= target).collect();
    if eligible.is_empty() {
        return Ok(None);
    }

    let mut by_degree = eligible.clone();
    by_degree.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    let top = center_budget.div_ceil(2).min(by_degree.len());
    let mut centers: Vec<usize> = by_degree[..top].to_vec();
    let mut rng = rng::stream(seed, Domain::Centers, 0);
    for _ in top..center_budget {
        centers.push(eligible[rng.gen_range(0..eligible.len())]);
    }
    centers.sort_unstable();
    centers.dedup();

    let candidates: Vec<(usize, usize, usize, bool)> = centers
        .par_iter()
        .filter_map(|&c| {
            let (prefix, radius) = bfs_prefix(g, c, target)?;
            if target <= EXACT_WITNESS_LIMIT {
                Some((induced_diameter(g, &prefix), radius, c, true))
            } else {
                Some((2 * radius, radius, c, false))
            }
        })
        .collect();
    let best = candidates.into_iter().min().expect("eligible centers reach the target size");
    Ok(Some(EssentialDiameterEstimate {
        epsilon,
        upper_bound: best.0,
        witness_center: best.2,
        witness_radius: best.1,
        witness_size: target,
        witness_diameter_exact: best.3,
        centers_tried: centers.len(),
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flag {
    Exact,
    /// Mean over a random sample of pairs; `stderr` carries the sampling error.
    Sampled,
    LowerBound,
    UpperBound,
    BudgetExhausted,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flag::Exact => "exact",
            Flag::Sampled => "sampled",
            Flag::LowerBound => "lower_bound",
            Flag::UpperBound => "upper_bound",
            Flag::BudgetExhausted => "budget_exhausted",
        })
    }
}

/// One row of the measurement CSV `metric,k,value,stderr,budget,flag`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRow {
    pub metric: String,
    pub k: Option<usize>,
    pub value: Option<f64>,
    pub stderr: Option<f64>,
    pub budget: Option<u64>,
    pub flag: Flag,
}

pub const MEASUREMENT_HEADER: &str = "metric,k,value,stderr,budget,flag";

pub fn write_measurements<W: Write>(mut out: W, rows: &[MeasurementRow]) -> Result<()> {
    writeln!(out, "{MEASUREMENT_HEADER}")?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.metric,
            r.k.map(|k| k.to_string()).unwrap_or_default(),
            opt(r.value),
            opt(r.stderr),
            r.budget.map(|b| b.to_string()).unwrap_or_default(),
            r.flag
        )?;
    }
    Ok(())
}
