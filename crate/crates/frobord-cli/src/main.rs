//! Batch command-line frontend for the `frobord` library: order
//! distributions and their statistics, group censuses, candidate coefficient
//! sets, curve point counting, and the attempt-count experiment.
//!
//! Every output file starts with `#` header lines echoing the tool version
//! and the effective configuration, so a run can be reproduced from its
//! artifact alone. All randomness flows from an explicit `--seed`; stochastic
//! commands refuse to run without one. Given the same argv and seed, output
//! files are byte-identical, independently of `--jobs`.

use std::fmt::Display;
use std::fs::File;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use frobord::atkin::{candidates, weighted_candidates};
use frobord::classdist::{
    dist_closed, moments_closed_form, moments_exact, order_distribution, Method, OrderDist,
    TABLE3_LABELS,
};
use frobord::curves::{frobenius_charpoly, point_counts, random_curve};
use frobord::experiment::{crt_charpoly, run_experiment, ExperimentConfig, OrderScope};
use frobord::intutil::first_primes;
use frobord::symplectic::{census, random_symplectic, OrderEngine};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Sweeps longer than this many primes (and the l = 7 census) are the
/// heavy modes that need an explicit opt-in.
const BIG_SWEEP: usize = 100;

#[derive(Parser)]
#[command(name = "frobord", version, about = "Frobenius order statistics toolkit")]
struct Cli {
    /// Worker thread count; results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Closed,
    Census,
    Mc,
}

#[derive(Subcommand)]
enum Command {
    /// Order distribution of Sp4(F_l) by closed form, census, or sampling.
    Dist {
        #[arg(long)]
        ell: u64,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Sample count (mc method only).
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Allow the heavy modes (census at l = 7).
        #[arg(long)]
        big: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact mean/variance of the closed-form distribution next to the
    /// asymptotic formulas.
    Moments {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// The two most probable orders.
    Modes {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Bucketed order-range percentages averaged over a prime sweep.
    Table3 {
        /// Sweep the first N primes (those below 7 are skipped).
        #[arg(long)]
        primes: usize,
        #[arg(long)]
        big: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Normalized-order histogram rows (order / l^2) per swept prime.
    Heatmap {
        #[arg(long)]
        primes: usize,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long)]
        big: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exhaustive order census of Sp4(F_l).
    Census {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        big: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Orders of uniform random Sp2g(F_l) elements.
    Sample {
        #[arg(long)]
        ell: u64,
        #[arg(long, default_value_t = 2)]
        g: u32,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Candidate characteristic-polynomial coefficients for one projective
    /// order (--r), or the probability-weighted list over a scope (--orders).
    Candidates {
        #[arg(long, default_value_t = 2)]
        g: u32,
        #[arg(long)]
        ell: u64,
        #[arg(long, default_value_t = 1)]
        q: u64,
        #[arg(long, conflicts_with = "orders")]
        r: Option<u64>,
        /// "all", "half", or a comma-separated order list (g = 2 only).
        #[arg(long)]
        orders: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random curve corpus with exact point counts and Frobenius
    /// coefficients.
    CountCurve {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        curves: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Attempt-count comparison: classical enumeration vs the weighted list.
    Experiment {
        #[arg(long)]
        p: u64,
        /// Auxiliary prime; repeat the flag for several. Ineligible values
        /// (l < 5, l = p, p != 1 mod l) are skipped with a warning.
        #[arg(long = "ell", required = true)]
        ells: Vec<u64>,
        #[arg(long)]
        curves: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// "half" for {(l-1)/2, (l+1)/2}, "all", or a comma-separated list.
        #[arg(long, default_value = "half")]
        orders: String,
        /// Full results JSON.
        #[arg(long)]
        out: PathBuf,
        /// Optional per-l summary CSV.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// One curve, its coefficients mod several primes, and the CRT
    /// reconstruction of the exact values.
    CrtDemo {
        #[arg(long)]
        p: u64,
        #[arg(long = "ell", required = true)]
        ells: Vec<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return std::process::ExitCode::FAILURE;
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .expect("thread pool is initialized once");
    }
    match run(cli.command) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::FAILURE
        }
    }
}

type CliResult = Result<(), Box<dyn std::error::Error>>;

fn require_seed(seed: Option<u64>) -> Result<u64, Box<dyn std::error::Error>> {
    seed.ok_or_else(|| "this command is stochastic; pass an explicit --seed".into())
}

/// Opens the output file and writes the `#` configuration header.
fn open_output(path: &PathBuf, command: &str, kv: &[(&str, String)]) -> std::io::Result<File> {
    let mut f = File::create(path)?;
    writeln!(f, "# frobord {VERSION}")?;
    writeln!(f, "# command: {command}")?;
    for (k, v) in kv {
        writeln!(f, "# {k}: {v}")?;
    }
    Ok(f)
}

fn s<T: Display>(v: T) -> String {
    v.to_string()
}

fn opt<T: Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

fn write_dist_rows(f: File, dist: &OrderDist) -> CliResult {
    let mut w = csv::Writer::from_writer(f);
    w.write_record(["order", "probability_num", "probability_den", "probability_float"])?;
    for (&order, p) in &dist.probs {
        w.write_record([
            s(order),
            p.numer().to_string(),
            p.denom().to_string(),
            s(dist.prob_f64(order)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// First `n` primes with the sub-7 ones (no closed form) dropped.
fn sweep_primes(n: usize, big: bool) -> Result<Vec<u64>, Box<dyn std::error::Error>> {
    if n > BIG_SWEEP && !big {
        return Err(format!("sweeping {n} primes is a heavy run; pass --big").into());
    }
    Ok(first_primes(n).into_iter().filter(|&l| l >= 7).collect())
}

fn parse_scope(orders: &str) -> Result<OrderScope, Box<dyn std::error::Error>> {
    match orders {
        "all" => Ok(OrderScope::All),
        "half" => Ok(OrderScope::HalfEllPair),
        list => {
            let v: Result<Vec<u64>, _> = list.split(',').map(|t| t.trim().parse()).collect();
            Ok(OrderScope::Orders(v.map_err(|_| {
                format!("--orders must be \"all\", \"half\", or a comma-separated list, got {list:?}")
            })?))
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Dist { ell, method, samples, seed, big, out } => {
            let (m, label) = match method {
                MethodArg::Closed => (Method::Closed { allow_small: true }, "closed"),
                MethodArg::Census => (Method::Census { big }, "census"),
                MethodArg::Mc => {
                    let samples = samples.ok_or("--method mc needs --samples")?;
                    (Method::MonteCarlo { samples, seed: require_seed(seed)? }, "mc")
                }
            };
            let dist = order_distribution(ell, m)?;
            let f = open_output(&out, "dist", &[
                ("ell", s(ell)),
                ("method", label.into()),
                ("samples", opt(&samples)),
                ("seed", opt(&seed)),
            ])?;
            write_dist_rows(f, &dist)
        }
        Command::Moments { ell, out } => {
            let exact = moments_exact(&dist_closed(ell, false)?);
            let asym = moments_closed_form(ell)?;
            let f = open_output(&out, "moments", &[("ell", s(ell))])?;
            let mut w = csv::Writer::from_writer(f);
            w.write_record([
                "ell",
                "mean_exact",
                "variance_exact",
                "mean_asymptotic",
                "variance_asymptotic",
            ])?;
            w.write_record([
                s(ell),
                format!("{:.11e}", exact.mean),
                format!("{:.11e}", exact.variance),
                format!("{:.11e}", asym.mean),
                format!("{:.11e}", asym.variance),
            ])?;
            w.flush()?;
            Ok(())
        }
        Command::Modes { ell, out } => {
            let dist = dist_closed(ell, true)?;
            let f = open_output(&out, "modes", &[("ell", s(ell))])?;
            let mut w = csv::Writer::from_writer(f);
            w.write_record(["ell", "rank", "order", "probability_float"])?;
            for (rank, order) in dist.modes(2).into_iter().enumerate() {
                w.write_record([s(ell), s(rank + 1), s(order), s(dist.prob_f64(order))])?;
            }
            w.flush()?;
            Ok(())
        }
        Command::Table3 { primes, big, out } => {
            let ls = sweep_primes(primes, big)?;
            let t = frobord::classdist::table3_aggregate(&ls)?;
            let f = open_output(&out, "table3", &[
                ("primes_requested", s(primes)),
                ("primes_swept", s(ls.len())),
                ("range", format!("{}..{}", ls.first().unwrap_or(&0), ls.last().unwrap_or(&0))),
                ("intervals", "half-open (a,b], first range closed at 1".into()),
            ])?;
            let mut w = csv::Writer::from_writer(f);
            w.write_record(TABLE3_LABELS)?;
            w.write_record(t.percents.map(s))?;
            w.flush()?;
            Ok(())
        }
        Command::Heatmap { primes, bins, big, out } => {
            let ls = sweep_primes(primes, big)?;
            let h = frobord::classdist::heatmap_data(&ls, bins)?;
            let f = open_output(&out, "heatmap", &[
                ("primes_requested", s(primes)),
                ("primes_swept", s(ls.len())),
                ("bins", s(bins)),
                ("normalized_max", s(h.max_norm)),
            ])?;
            let mut w = csv::Writer::from_writer(f);
            w.write_record(["ell", "bin_lo", "bin_hi", "mass"])?;
            let width = h.max_norm / bins as f64;
            for row in &h.rows {
                for (i, &mass) in row.mass.iter().enumerate() {
                    w.write_record([
                        s(row.l),
                        s(i as f64 * width),
                        s((i + 1) as f64 * width),
                        s(mass),
                    ])?;
                }
            }
            w.flush()?;
            Ok(())
        }
        Command::Census { ell, big, out } => {
            let c = census(ell, big)?;
            let total: u128 = c.counts.values().sum();
            let f = open_output(&out, "census", &[
                ("ell", s(ell)),
                ("total_elements", s(total)),
            ])?;
            let mut w = csv::Writer::from_writer(f);
            w.write_record(["order", "count"])?;
            for (order, count) in &c.counts {
                w.write_record([s(order), s(count)])?;
            }
            w.flush()?;
            Ok(())
        }
        Command::Sample { ell, g, samples, seed, out } => {
            let seed = require_seed(seed)?;
            let mut eng = OrderEngine::new(g, ell)?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let f = open_output(&out, "sample", &[
                ("ell", s(ell)),
                ("g", s(g)),
                ("samples", s(samples)),
                ("seed", s(seed)),
            ])?;
            let mut w = csv::Writer::from_writer(f);
            w.write_record(["index", "order"])?;
            for i in 0..samples {
                let m = random_symplectic(g, ell, &mut rng)?;
                w.write_record([s(i), s(eng.order_of(&m))])?;
            }
            w.flush()?;
            Ok(())
        }
        Command::Candidates { g, ell, q, r, orders, out } => {
            let (list, mode) = match (&r, &orders) {
                (Some(r), None) => (candidates(g, ell, q, *r)?.entries, format!("r={r}")),
                (None, Some(o)) => {
                    if g != 2 {
                        return Err("--orders weighting applies to g = 2 only".into());
                    }
                    let scope = parse_scope(o)?;
                    let dist = dist_closed(ell, true)?;
                    let sel: Option<Vec<u64>> = match scope {
                        OrderScope::All => None,
                        OrderScope::HalfEllPair => Some(vec![(ell - 1) / 2, (ell + 1) / 2]),
                        OrderScope::Orders(v) => Some(v),
                    };
                    (weighted_candidates(ell, q, &dist, sel.as_deref())?, format!("orders={o}"))
                }
                _ => return Err("pass exactly one of --r or --orders".into()),
            };
            let f = open_output(&out, "candidates", &[
                ("g", s(g)),
                ("ell", s(ell)),
                ("q", s(q)),
                ("scope", mode.clone()),
            ])?;
            let mut w = csv::Writer::from_writer(f);
            let mut header = vec!["ell".into(), "q".into(), "r".into()];
            header.extend((1..=g).map(|i| format!("a{i}")));
            header.push("weight".into());
            w.write_record(&header)?;
            let rcol = r.map(s).unwrap_or_default();
            for c in &list {
                let mut rec = vec![s(ell), s(q), rcol.clone()];
                rec.extend(c.a.iter().map(s));
                rec.push(c.weight.as_ref().and_then(|w| w.to_f64()).map(s).unwrap_or_default());
                w.write_record(&rec)?;
            }
            w.flush()?;
            Ok(())
        }
        Command::CountCurve { p, curves, seed, out } => {
            let seed = require_seed(seed)?;
            let f = open_output(&out, "count-curve", &[
                ("p", s(p)),
                ("curves", s(curves)),
                ("seed", s(seed)),
            ])?;
            let mut w = csv::Writer::from_writer(f);
            w.write_record(["p", "f4", "f3", "f2", "f1", "f0", "n1", "n2", "a1", "a2"])?;
            use rayon::prelude::*;
            let rows: Result<Vec<_>, frobord::Error> = (0..curves)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha20Rng::seed_from_u64(seed.wrapping_add(i as u64));
                    let c = random_curve(p, &mut rng)?;
                    let n = point_counts(&c)?;
                    let (a1, a2) = frobenius_charpoly(&n, p)?;
                    Ok((c.f, n, a1, a2))
                })
                .collect();
            for (fc, n, a1, a2) in rows? {
                w.write_record([
                    s(p),
                    s(fc[4]),
                    s(fc[3]),
                    s(fc[2]),
                    s(fc[1]),
                    s(fc[0]),
                    s(n.n1),
                    s(n.n2),
                    s(a1),
                    s(a2),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
        Command::Experiment { p, ells, curves, seed, orders, out, summary } => {
            let seed = require_seed(seed)?;
            let scope = parse_scope(&orders)?;
            let mut eligible = Vec::new();
            for l in ells {
                if l >= 5 && l != p && frobord::ff::PrimeField::new(l).is_ok() && p % l == 1 {
                    eligible.push(l);
                } else {
                    eprintln!("warning: skipping ell={l} (needs prime l >= 5, l != p, p = 1 mod l)");
                }
            }
            if eligible.is_empty() {
                return Err("no eligible auxiliary primes left".into());
            }
            let config = ExperimentConfig {
                p,
                ells: eligible,
                n_curves: curves,
                seed,
                scope,
                output: Some(out.clone()),
            };
            let stats = run_experiment(&config)?;
            #[derive(Serialize)]
            struct Output<'a> {
                version: &'a str,
                #[serde(flatten)]
                stats: &'a frobord::experiment::AttemptStats,
            }
            let mut f = File::create(&out)?;
            serde_json::to_writer_pretty(&mut f, &Output { version: VERSION, stats: &stats })?;
            writeln!(f)?;
            if let Some(path) = summary {
                let f = open_output(&path, "experiment", &[
                    ("p", s(p)),
                    ("ells", format!("{:?}", stats.config.ells)),
                    ("curves", s(curves)),
                    ("seed", s(seed)),
                    ("orders", orders.clone()),
                ])?;
                let mut w = csv::Writer::from_writer(f);
                w.write_record([
                    "p",
                    "ell",
                    "n_curves",
                    "mean_classical",
                    "mean_list",
                    "reduction_pct",
                ])?;
                for e in &stats.per_ell {
                    w.write_record([
                        s(p),
                        s(e.ell),
                        s(curves),
                        s(e.mean_classical),
                        s(e.mean_list),
                        s(e.reduction_pct),
                    ])?;
                }
                w.flush()?;
            }
            Ok(())
        }
        Command::CrtDemo { p, ells, seed, out } => {
            let seed = require_seed(seed)?;
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let curve = random_curve(p, &mut rng)?;
            let n = point_counts(&curve)?;
            let (a1, a2) = frobenius_charpoly(&n, p)?;
            let residues: Vec<(u64, (u64, u64))> = ells
                .iter()
                .map(|&l| {
                    (l, (a1.rem_euclid(l as i64) as u64, a2.rem_euclid(l as i64) as u64))
                })
                .collect();
            let reconstructed = crt_charpoly(&residues)?;
            let modulus: u128 = ells.iter().map(|&l| l as u128).product();
            #[derive(Serialize)]
            struct Demo {
                version: String,
                p: u64,
                seed: u64,
                f: [u64; 5],
                n1: u64,
                n2: u64,
                a1: i64,
                a2: i64,
                residues: Vec<(u64, (u64, u64))>,
                combined_modulus: u128,
                /// Whether the modulus covers the Weil range |a2| <= 6p.
                sufficient_modulus: bool,
                reconstructed: (i64, i64),
                exact: bool,
            }
            let demo = Demo {
                version: VERSION.into(),
                p,
                seed,
                f: curve.f,
                n1: n.n1,
                n2: n.n2,
                a1,
                a2,
                residues,
                combined_modulus: modulus,
                sufficient_modulus: modulus > 12 * p as u128,
                reconstructed,
                exact: reconstructed == (a1, a2),
            };
            let mut f = File::create(&out)?;
            serde_json::to_writer_pretty(&mut f, &demo)?;
            writeln!(f)?;
            Ok(())
        }
    }
}
