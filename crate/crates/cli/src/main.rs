use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cameo_core::analytic;
use cameo_core::graphgen::{self, CameoParams, EdgeListHeader, Graph, Method};
use cameo_core::harness::{self, ExperimentConfig};
use cameo_core::pathconn::{self, Flag, MeasurementRow};
use cameo_core::weights::{self, WeightDistribution, WeightSample};
use cameo_core::CameoError;
use clap::{Parser, Subcommand, ValueEnum};

const EXIT_USAGE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_RESOURCE: u8 = 4;

/// Cameo random graphs: generation, analytic predictions and measurements.
#[derive(Parser, Debug)]
#[command(name = "cameo", version)]
struct Cli {
    /// Worker threads (default: all available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Master seed; falls back to CAMEO_SEED, then to a random seed.
    #[arg(long, global = true, env = "CAMEO_SEED")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample weights and generate a graph as an edge list.
    Gen {
        /// Number of vertices.
        #[arg(long)]
        n: usize,
        /// Edge density: the expected edge count is c(n-1).
        #[arg(long)]
        c: f64,
        /// Affinity exponent in [0, 1).
        #[arg(long)]
        alpha: f64,
        /// Weight density, e.g. powerlaw:gamma=3, exponential:rate=1, gaussiantail:scale=1.
        #[arg(long)]
        dist: WeightDistribution,
        /// Sampler: exact pair-by-pair or envelope skipping.
        #[arg(long, value_enum, default_value_t = MethodArg::Envelope)]
        method: MethodArg,
        /// Edge-list output path (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the weight sample as CSV.
        #[arg(long)]
        weights_out: Option<PathBuf>,
    },
    /// Degree histogram of an edge-list graph as CSV `degree,count`.
    Degrees {
        /// Edge-list input path.
        #[arg(long)]
        graph: PathBuf,
    },
    /// Path-expansion coefficients C_m as CSV `m,C_m`.
    Coeffs {
        /// Word length L (number of binomial factors minus one).
        #[arg(long = "L", visible_alias = "l")]
        l: usize,
        /// Also evaluate the generating functions at z.
        #[arg(long)]
        z: Option<f64>,
    },
    /// Threshold regime and jump length as a key=value block.
    Predict {
        /// Weight density.
        #[arg(long)]
        dist: WeightDistribution,
        /// Edge density.
        #[arg(long)]
        c: f64,
        /// Affinity exponent.
        #[arg(long)]
        alpha: f64,
        /// Graph size for the numeric jump length ln n / ln B.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Count simple paths of length k between two vertices.
    Paths {
        /// Edge-list input path.
        #[arg(long)]
        graph: PathBuf,
        /// First endpoint.
        #[arg(long)]
        i: usize,
        /// Second endpoint.
        #[arg(long)]
        j: usize,
        /// Path length in edges.
        #[arg(long)]
        k: usize,
        /// Node-expansion budget for the search.
        #[arg(long, default_value_t = pathconn::DEFAULT_EXPANSION_BUDGET)]
        budget: u64,
        /// Weight CSV of the graph; adds expected walk and path counts.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Measure distances, diameters and path counts as CSV `metric,k,value,stderr,budget,flag`.
    Measure {
        /// Edge-list input path.
        #[arg(long)]
        graph: PathBuf,
        /// Measure expected path length, median distance and component diameter.
        #[arg(long)]
        epl: bool,
        /// Measure an upper bound on the essential diameter.
        #[arg(long)]
        essdiam: bool,
        /// Vertex fraction for the essential diameter.
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        /// Also measure path-count statistics for these lengths (comma separated).
        #[arg(long, value_delimiter = ',')]
        gamma_k: Vec<usize>,
        /// Pairs sampled for distance and path-count statistics.
        #[arg(long, default_value_t = 10_000)]
        pair_budget: usize,
        /// Ball centers tried for the essential diameter.
        #[arg(long, default_value_t = 32)]
        center_budget: usize,
    },
    /// Run a threshold scan from a JSON config; writes CSV and manifest.
    Scan {
        /// Config path.
        #[arg(long)]
        config: PathBuf,
    },
    /// Check weight-distribution asymptotics; prints a CSV table.
    Validate {
        /// Which check to run.
        #[arg(long, value_enum)]
        lemma: LemmaArg,
        /// Weight density.
        #[arg(long)]
        dist: WeightDistribution,
        /// Sample sizes (comma separated).
        #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
        n_list: Vec<usize>,
        /// Trials per sample size.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Exponent of the induced values phi^-beta (checks 2 and 3).
        #[arg(long, default_value_t = 1.5)]
        beta: f64,
        /// Largest weight on the regularity grid (appendix).
        #[arg(long, default_value_t = 50.0)]
        omega_max: f64,
        /// Grid points for the regularity check (appendix).
        #[arg(long, default_value_t = 12)]
        points: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MethodArg {
    Exact,
    Envelope,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LemmaArg {
    /// Growth of the maximum weight.
    #[value(name = "1")]
    MaxWeight,
    /// Tail exponent of phi^-beta against a Hill estimate.
    #[value(name = "2")]
    InducedTail,
    /// Truncated moment against the ergodic average of phi^-beta.
    #[value(name = "3")]
    TruncatedMoment,
    /// Logarithmic-derivative regularity of the density.
    #[value(name = "appendix")]
    Regularity,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let seed = cli.seed.unwrap_or_else(rand::random);
    match run(cli.command, seed, cli.seed.is_some()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CameoError::Domain(_) => EXIT_DOMAIN,
                CameoError::Resource(_) => EXIT_RESOURCE,
                CameoError::Parse(_) | CameoError::Io(_) => EXIT_USAGE,
            })
        }
    }
}

fn output(path: Option<&Path>) -> cameo_core::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_graph(path: &Path) -> cameo_core::Result<(Graph, Option<EdgeListHeader>)> {
    Graph::read_edge_list(BufReader::new(File::open(path)?))
}

fn run(command: Command, seed: u64, seed_given: bool) -> cameo_core::Result<()> {
    let mut out = output(None)?;
    match command {
        Command::Gen { n, c, alpha, dist, method, out: path, weights_out } => {
            eprintln!("seed={seed}");
            let params = CameoParams::new(n, c, alpha)?;
            let sample = weights::sample_weights(&dist, n, alpha, seed)?;
            let method = match method {
                MethodArg::Exact => Method::Exact,
                MethodArg::Envelope => Method::Envelope,
            };
            let g = graphgen::generate(&params, &sample, seed, method)?;
            let mut sink = output(path.as_deref())?;
            g.write_edge_list(&mut sink, &EdgeListHeader { n, c, alpha, seed })?;
            sink.flush()?;
            if let Some(p) = weights_out {
                let mut w = output(Some(&p))?;
                sample.write_csv(&mut w)?;
                w.flush()?;
            }
            eprintln!("edges={} expected={}", g.edge_count(), params.expected_edge_count());
        }
        Command::Degrees { graph } => {
            eprintln!("seed={seed}");
            let (g, _) = read_graph(&graph)?;
            writeln!(out, "degree,count")?;
            for (d, count) in graphgen::empirical_degree_histogram(&g) {
                writeln!(out, "{d},{count}")?;
            }
        }
        Command::Coeffs { l, z } => {
            eprintln!("seed={seed}");
            let p = analytic::path_coefficients(l)?;
            writeln!(out, "m,C_m")?;
            for (m, c) in p.coeffs.iter().enumerate() {
                writeln!(out, "{m},{c}")?;
            }
            if let Some(z) = z {
                let (fx, fy) = analytic::generating_function(l, z)?;
                writeln!(out, "\nz,fX,fY,total")?;
                writeln!(out, "{z},{fx},{fy},{}", fx + fy)?;
            }
        }
        Command::Predict { dist, c, alpha, n } => {
            eprintln!("seed={seed}");
            if alpha == 0.5 {
                return Err(CameoError::Domain(
                    "boundary case: alpha = 1/2 separates the two regimes and has no prediction".into(),
                ));
            }
            let p = analytic::predict_threshold(&dist, c, alpha)?;
            write!(out, "{}", p.to_key_value(n))?;
        }
        Command::Paths { graph, i, j, k, budget, weights } => {
            eprintln!("seed={seed}");
            let (g, header) = read_graph(&graph)?;
            let census = pathconn::census(&g, i, j, k, budget)?;
            writeln!(out, "i={i}\nj={j}\nk={k}\nsimple_path_count={}", census.simple_path_count)?;
            if let Some(wpath) = weights {
                let header = header.ok_or_else(|| {
                    CameoError::Parse("analytic comparison needs the edge-list header for c and alpha".into())
                })?;
                let sample = WeightSample::read_csv(BufReader::new(File::open(wpath)?), header.alpha)?;
                let params = CameoParams::new(header.n, header.c, header.alpha)?;
                let walks = analytic::expected_gamma_walks(&sample, header.c, k, i, j)?;
                writeln!(out, "expected_walks={walks}")?;
                match analytic::expected_gamma_paths_exact(&params, &sample, k, i, j) {
                    Ok(v) => writeln!(out, "expected_paths={v}")?,
                    Err(CameoError::Resource(_)) => writeln!(out, "expected_paths=NA")?,
                    Err(e) => return Err(e),
                }
            }
        }
        Command::Measure { graph, epl, essdiam, epsilon, gamma_k, pair_budget, center_budget } => {
            eprintln!("seed={seed}");
            let (g, _) = read_graph(&graph)?;
            let rows = measure(&g, epl, essdiam, epsilon, &gamma_k, pair_budget, center_budget, seed)?;
            pathconn::write_measurements(&mut out, &rows)?;
        }
        Command::Scan { config } => {
            let mut cfg = ExperimentConfig::read(&config)?;
            if seed_given {
                cfg.master_seed = seed;
            }
            eprintln!("seed={}", cfg.master_seed);
            let result = harness::run_threshold_scan(&cfg)?;
            let (csv, manifest) = result.write_outputs()?;
            writeln!(out, "results={}\nmanifest={}", csv.display(), manifest.display())?;
        }
        Command::Validate { lemma, dist, n_list, trials, beta, omega_max, points } => {
            eprintln!("seed={seed}");
            validate(&mut out, lemma, &dist, &n_list, trials, beta, omega_max, points, seed)?;
        }
    }
    out.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn measure(
    g: &Graph,
    epl: bool,
    essdiam: bool,
    epsilon: f64,
    gamma_k: &[usize],
    pair_budget: usize,
    center_budget: usize,
    seed: u64,
) -> cameo_core::Result<Vec<MeasurementRow>> {
    let row = |metric: &str, k: Option<usize>, value: Option<f64>, stderr: Option<f64>, budget: Option<u64>, flag| {
        MeasurementRow { metric: metric.into(), k, value, stderr, budget, flag }
    };
    let budget = Some(pair_budget as u64);
    let mut rows = vec![
        row("vertices", None, Some(g.n() as f64), None, None, Flag::Exact),
        row("edges", None, Some(g.edge_count() as f64), None, None, Flag::Exact),
        row("largest_component", None, Some(g.largest_component_size() as f64), None, None, Flag::Exact),
    ];
    if epl {
        let d = pathconn::distance_stats(g, pair_budget, seed)?;
        let flag = if d.epl_exact { Flag::Exact } else { Flag::Sampled };
        rows.push(row("epl", None, d.epl, d.epl_stderr, budget, flag));
        rows.push(row("median_distance", None, d.median_distance, None, budget, flag));
        let flag = if d.diameter_exact { Flag::Exact } else { Flag::LowerBound };
        rows.push(row("component_diameter", None, Some(d.component_diameter as f64), None, None, flag));
    }
    if essdiam {
        let cb = Some(center_budget as u64);
        match pathconn::essential_diameter_upper(g, epsilon, center_budget, seed)? {
            Some(e) => {
                rows.push(row("essential_diameter", None, Some(e.upper_bound as f64), None, cb, Flag::UpperBound));
                rows.push(row("essential_witness_radius", None, Some(e.witness_radius as f64), None, cb, Flag::Exact));
                rows.push(row("essential_witness_size", None, Some(e.witness_size as f64), None, cb, Flag::Exact));
            }
            None => rows.push(row("essential_diameter", None, None, None, cb, Flag::UpperBound)),
        }
    }
    for &k in gamma_k {
        match pathconn::gamma_stats(g, k, pair_budget, seed) {
            Ok(s) => {
                let flag = if s.exhaustive { Flag::Exact } else { Flag::Sampled };
                rows.push(row("gamma_max", Some(k), Some(s.gamma_max as f64), None, budget, flag));
                rows.push(row("gamma_mean_edges", Some(k), s.gamma_mean_edges, s.gamma_mean_edges_stderr, budget, flag));
                rows.push(row(
                    "gamma_mean_pairs",
                    Some(k),
                    Some(s.gamma_mean_pairs),
                    Some(s.gamma_mean_pairs_stderr),
                    budget,
                    flag,
                ));
            }
            Err(CameoError::Resource(_)) => {
                for metric in ["gamma_max", "gamma_mean_edges", "gamma_mean_pairs"] {
                    rows.push(row(metric, Some(k), None, None, Some(pathconn::DEFAULT_EXPANSION_BUDGET), Flag::BudgetExhausted));
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

#[allow(clippy::too_many_arguments)]
fn validate(
    out: &mut dyn Write,
    lemma: LemmaArg,
    dist: &WeightDistribution,
    n_list: &[usize],
    trials: usize,
    beta: f64,
    omega_max: f64,
    points: usize,
    seed: u64,
) -> cameo_core::Result<()> {
    match lemma {
        LemmaArg::MaxWeight => {
            writeln!(out, "n,median_ratio,median_log_n_ratio,median_max_weight,expected_max_weight")?;
            for r in harness::validate_lemma1(dist, n_list, trials, seed)? {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.n, r.median_ratio, r.median_log_n_ratio, r.median_max_weight, r.expected_max_weight
                )?;
            }
        }
        LemmaArg::InducedTail => {
            writeln!(out, "n,beta,predicted_exponent,median_hill_exponent")?;
            for r in harness::validate_lemma2(dist, beta, n_list, trials, seed)? {
                writeln!(out, "{},{},{},{}", r.n, r.beta, r.predicted_exponent, r.median_hill_exponent)?;
            }
        }
        LemmaArg::TruncatedMoment => {
            let t = harness::validate_lemma3(dist, beta, n_list, trials, seed)?;
            if let Some(d) = &t.diagnostic {
                eprintln!("note: {d}");
            }
            writeln!(out, "n,truncated_moment,median_normalized_log_ratio,median_ratio")?;
            for r in &t.rows {
                writeln!(out, "{},{},{},{}", r.n, r.truncated_moment, r.median_normalized_log_ratio, r.median_ratio)?;
            }
        }
        LemmaArg::Regularity => {
            writeln!(out, "omega,regularity_exponent")?;
            for (w, v) in harness::validate_regularity(dist, omega_max, points)? {
                writeln!(out, "{w},{v}")?;
            }
        }
    }
    Ok(())
}
