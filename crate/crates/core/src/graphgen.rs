//! Cameo graph generation and the first-moment formulas of the model.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{CameoError, Result};
use crate::rng::{self, Domain};
use crate::weights::WeightSample;

/// Model parameters `(n, c, α)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameoParams {
    pub n: usize,
    pub c: f64,
    pub alpha: f64,
}

impl CameoParams {
    pub fn new(n: usize, c: f64, alpha: f64) -> Result<Self> {
        if n < 2 {
            return Err(CameoError::domain(format!("need n >= 2, got {n}")));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(CameoError::domain(format!("need c > 0, got {c}")));
        }
        if !alpha.is_finite() {
            return Err(CameoError::domain("alpha must be finite"));
        }
        Ok(Self { n, c, alpha })
    }

    fn check_sample(&self, sample: &WeightSample) -> Result<()> {
        if sample.n() != self.n {
            return Err(CameoError::domain(format!(
                "weight sample has {} vertices, parameters expect {}",
                sample.n(),
                self.n
            )));
        }
        if sample.alpha != self.alpha {
            return Err(CameoError::domain(format!(
                "weight sample was built for alpha={}, parameters use alpha={}",
                sample.alpha, self.alpha
            )));
        }
        Ok(())
    }

    /// `c/S` for the given sample.
    fn scale(&self, sample: &WeightSample) -> f64 {
        self.c / sample.normalizer
    }

    /// Expected edge count `c(n-1)` of the unclamped model.
    pub fn expected_edge_count(&self) -> f64 {
        self.c * (self.n as f64 - 1.0)
    }
}

#[inline]
fn clamped(scale: f64, yi: f64, yj: f64) -> f64 {
    (scale * (yi + yj)).min(1.0)
}

/// `p_ij = min{(c/S)(y_i + y_j), 1}`.
pub fn edge_probability(params: &CameoParams, sample: &WeightSample, i: usize, j: usize) -> Result<f64> {
    params.check_sample(sample)?;
    if i == j {
        return Err(CameoError::domain("edge probability of a loop is undefined"));
    }
    if i >= params.n || j >= params.n {
        return Err(CameoError::domain(format!("vertex out of range for n={}", params.n)));
    }
    Ok(clamped(params.scale(sample), sample.ys[i], sample.ys[j]))
}

/// Expected degree `c(1 + (n-2) y_i / S)`, from the unclamped probabilities.
pub fn expected_degree(params: &CameoParams, sample: &WeightSample, i: usize) -> Result<f64> {
    params.check_sample(sample)?;
    if i >= params.n {
        return Err(CameoError::domain(format!("vertex {i} out of range for n={}", params.n)));
    }
    let n = params.n as f64;
    Ok(params.c * (1.0 + (n - 2.0) * sample.ys[i] / sample.normalizer))
}

/// Number of unordered pairs whose raw probability `(c/S)(y_i+y_j)` exceeds 1.
pub fn clamped_pair_count(params: &CameoParams, sample: &WeightSample) -> Result<u64> {
    params.check_sample(sample)?;
    let scale = params.scale(sample);
    let mut ys = sample.ys.clone();
    ys.sort_by(f64::total_cmp);
    let mut count = 0u64;
    for (i, &yi) in ys.iter().enumerate() {
        let rest = &ys[i + 1..];
        let first = rest.partition_point(|&yj| scale * (yi + yj) <= 1.0);
        count += (rest.len() - first) as u64;
    }
    Ok(count)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Independent Bernoulli trial for every pair; `O(n²)`.
    Exact,
    /// Rows in descending-`y` order with geometric skips under a decreasing bound.
    Envelope,
}

impl FromStr for Method {
    type Err = CameoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "envelope" => Ok(Method::Envelope),
            _ => Err(CameoError::parse(format!("unknown generation method `{s}`"))),
        }
    }
}

/// Samples a graph with independent edges `P(i ~ j) = p_ij`.
///
/// Row `v` draws from stream `(seed, v)`, so the result does not depend on
/// the thread schedule.
pub fn generate(params: &CameoParams, sample: &WeightSample, seed: u64, method: Method) -> Result<Graph> {
    params.check_sample(sample)?;
    let n = params.n;
    let scale = params.scale(sample);
    let ys = &sample.ys;
    let edges: Vec<(u32, u32)> = match method {
        Method::Exact => (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let mut rng = rng::stream(seed, Domain::Edges, i as u64);
                let yi = ys[i];
                (i + 1..n)
                    .filter(move |&j| rng.gen::<f64>() < clamped(scale, yi, ys[j]))
                    .map(move |j| (i as u32, j as u32))
            })
            .collect(),
        Method::Envelope => {
            let mut order: Vec<u32> = (0..n as u32).collect();
            order.sort_by(|&a, &b| ys[b as usize].total_cmp(&ys[a as usize]).then(a.cmp(&b)));
            let order = &order;
            (0..n)
                .into_par_iter()
                .flat_map_iter(|r| {
                    let v = order[r];
                    let mut rng = rng::stream(seed, Domain::Edges, v as u64);
                    envelope_row(&mut rng, scale, ys, order, r).into_iter().map(move |u| (v.min(u), v.max(u)))
                })
                .collect()
        }
    };
    Ok(Graph::from_simple_edges(n, &edges))
}

/// One envelope row: candidates are the positions after `r` in descending-`y`
/// order, so `p(v, order[s])` is nonincreasing in `s` and the probability at
/// the last proposal bounds every later one.
fn envelope_row<R: Rng>(rng: &mut R, scale: f64, ys: &[f64], order: &[u32], r: usize) -> Vec<u32> {
    let n = order.len();
    let yv = ys[order[r] as usize];
    let mut out = Vec::new();
    let mut s = r + 1;
    if s >= n {
        return out;
    }
    let mut bound = clamped(scale, yv, ys[order[s] as usize]);
    while s < n && bound > 0.0 {
        if bound < 1.0 {
            let skip = (rng::open_unit(rng).ln() / (-bound).ln_1p()).floor();
            if skip >= (n - s) as f64 {
                break;
            }
            s += skip as usize;
        }
        let u = order[s];
        let p = clamped(scale, yv, ys[u as usize]);
        if p >= bound || rng.gen::<f64>() * bound < p {
            out.push(u);
        }
        bound = p;
        s += 1;
    }
    out
}

/// Undirected simple graph on `0..n` in compressed adjacency form.
///
/// Neighbor lists are sorted; every edge is stored in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Graph {
    /// Builds from an edge list, rejecting loops, duplicates and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > u32::MAX as usize {
            return Err(CameoError::resource("vertex count exceeds u32 range"));
        }
        let mut norm: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(CameoError::domain(format!("edge ({u}, {v}) out of range for n={n}")));
            }
            if u == v {
                return Err(CameoError::domain(format!("loop at vertex {u}")));
            }
            norm.push((u.min(v) as u32, u.max(v) as u32));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(CameoError::domain(format!("duplicate edge ({}, {})", w[0].0, w[0].1)));
        }
        Ok(Self::from_simple_edges(n, &norm))
    }

    /// Trusted constructor: `edges` must already be simple.
    fn from_simple_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0u32; offsets[n]];
        for &(u, v) in edges {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
            targets[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        for v in 0..n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Self { offsets, targets }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_simple_edges(n, &[])
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<(u32, u32)> =
            (0..n as u32).flat_map(|u| (u + 1..n as u32).map(move |v| (u, v))).collect();
        Self::from_simple_edges(n, &edges)
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (v - 1, v)).collect();
        Self::from_simple_edges(n, &edges)
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (v - 1, v)).collect();
        if n > 2 {
            edges.push((0, n as u32 - 1));
        }
        Self::from_simple_edges(n, &edges)
    }

    /// Star with hub 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<(u32, u32)> = (1..=leaves as u32).map(|v| (0, v)).collect();
        Self::from_simple_edges(leaves + 1, &edges)
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && v < self.n() && self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u).iter().filter(move |&&v| v as usize > u).map(move |&v| (u, v as usize))
        })
    }

    /// Copy with one extra edge; errors if it exists already.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Self> {
        let mut edges: Vec<(usize, usize)> = self.edges().collect();
        edges.push((u, v));
        Self::from_edges(self.n(), &edges)
    }

    /// Component label per vertex and the size of each component.
    pub fn components(&self) -> (Vec<u32>, Vec<usize>) {
        let n = self.n();
        let mut label = vec![u32::MAX; n];
        let mut sizes = Vec::new();
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != u32::MAX {
                continue;
            }
            let id = sizes.len() as u32;
            label[s] = id;
            stack.push(s as u32);
            let mut size = 0;
            while let Some(v) = stack.pop() {
                size += 1;
                for &w in self.neighbors(v as usize) {
                    if label[w as usize] == u32::MAX {
                        label[w as usize] = id;
                        stack.push(w);
                    }
                }
            }
            sizes.push(size);
        }
        (label, sizes)
    }

    pub fn largest_component_size(&self) -> usize {
        self.components().1.into_iter().max().unwrap_or(0)
    }

    /// Checks symmetry, sortedness and the absence of loops and multi-edges.
    pub fn is_simple(&self) -> bool {
        (0..self.n()).all(|u| {
            let nb = self.neighbors(u);
            nb.windows(2).all(|w| w[0] < w[1])
                && nb.iter().all(|&v| v as usize != u && self.has_edge(v as usize, u))
        })
    }

    /// Writes the edge-list format: a header line, then `u v` with `u < v`, sorted.
    pub fn write_edge_list<W: Write>(&self, mut out: W, header: &EdgeListHeader) -> Result<()> {
        writeln!(out, "{header}")?;
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }

    /// Reads an edge list; `n` comes from the header, or from the largest index if absent.
    pub fn read_edge_list<R: BufRead>(input: R) -> Result<(Self, Option<EdgeListHeader>)> {
        let mut header = None;
        let mut edges = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if t.starts_with('#') {
                if lineno == 0 {
                    header = Some(t.parse::<EdgeListHeader>()?);
                }
                continue;
            }
            let mut it = t.split_whitespace();
            let mut next = || -> Result<usize> {
                it.next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| CameoError::parse(format!("line {}: expected `u v`", lineno + 1)))
            };
            let (u, v) = (next()?, next()?);
            edges.push((u, v));
        }
        let n = match &header {
            Some(h) => h.n,
            None => edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0),
        };
        Ok((Self::from_edges(n, &edges)?, header))
    }
}

/// Header line `# cameo n=<n> c=<c> alpha=<alpha> seed=<seed>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeListHeader {
    pub n: usize,
    pub c: f64,
    pub alpha: f64,
    pub seed: u64,
}

impl std::fmt::Display for EdgeListHeader {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "# cameo n={} c={} alpha={} seed={}", self.n, self.c, self.alpha, self.seed)
    }
}

impl FromStr for EdgeListHeader {
    type Err = CameoError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || CameoError::parse(format!("malformed edge-list header `{s}`"));
        let rest = s.trim().strip_prefix('#').ok_or_else(bad)?.trim();
        let rest = rest.strip_prefix("cameo").ok_or_else(bad)?;
        let (mut n, mut c, mut alpha, mut seed) = (None, None, None, None);
        for kv in rest.split_whitespace() {
            let (k, v) = kv.split_once('=').ok_or_else(bad)?;
            match k {
                "n" => n = v.parse().ok(),
                "c" => c = v.parse().ok(),
                "alpha" => alpha = v.parse().ok(),
                "seed" => seed = v.parse().ok(),
                _ => return Err(bad()),
            }
        }
        Ok(Self {
            n: n.ok_or_else(bad)?,
            c: c.ok_or_else(bad)?,
            alpha: alpha.ok_or_else(bad)?,
            seed: seed.ok_or_else(bad)?,
        })
    }
}

/// Degree → number of vertices with that degree.
pub fn empirical_degree_histogram(g: &Graph) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for v in 0..g.n() {
        *h.entry(g.degree(v)).or_insert(0) += 1;
    }
    h
}
