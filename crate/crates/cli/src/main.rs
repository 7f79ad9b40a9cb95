//! Command-line harness for the partition-function library: compute any
//! formula, run the full cross-validation matrix, or benchmark the formulas
//! against each other. JSON in, JSON (or a table) out; logs go to stderr.
//!
//! Exit codes: 0 success, 1 failed validation check, 2 configuration error,
//! 3 numeric guard violation (the message names the guard).

mod config;

use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{parse_mode, CfgError, JobConfig};
use dwpf::formulas::method_terms;
use dwpf::suite::{default_checks, evaluate, method_by_name, SuiteConfig};
use dwpf::{BracketMode, Error, Method};

#[derive(Parser)]
#[command(
    name = "dwpf",
    version,
    about = "Domain-wall and reflecting-end partition functions: compute, cross-validate, benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON job configuration file
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,
    /// Random seed (overrides the config file)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: DWPF_THREADS or all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Tolerance override applied to every (non-control) check
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Bracket mode: trig | elliptic | rational
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Emit JSON (default)
    #[arg(long, global = true, conflicts_with = "table")]
    json: bool,
    /// Emit a human-readable table instead of JSON
    #[arg(long, global = true)]
    table: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the requested formulas on one parameter set
    Compute {
        /// System size (overrides the config file)
        #[arg(short = 'L', long)]
        l: Option<usize>,
        /// Formula name (repeatable); defaults to the config's list
        #[arg(long = "formula")]
        formulas: Vec<String>,
    },
    /// Run the full cross-validation matrix
    Validate {
        /// Run only the negative-control checks (they are expected to
        /// detect the injected perturbations)
        #[arg(long)]
        perturb: bool,
        /// Include wall-clock timings in the report (off by default so the
        /// JSON report is byte-reproducible)
        #[arg(long)]
        timings: bool,
    },
    /// Time each formula across a range of system sizes
    Bench {
        #[arg(long, default_value_t = 2)]
        lmin: usize,
        #[arg(long, default_value_t = 8)]
        lmax: usize,
    },
}

fn fail_config(msg: &str) -> ! {
    eprintln!("config error: {msg}");
    std::process::exit(2);
}

fn fail_guard(err: &Error) -> ! {
    match err {
        Error::InvalidParams(_) | Error::InvalidContext(_) | Error::SizeLimit { .. } => {
            fail_config(&err.to_string())
        }
        _ => {
            eprintln!("numeric guard violation: {err}");
            std::process::exit(3);
        }
    }
}

fn fail_cfg_error(err: CfgError) -> ! {
    match err {
        CfgError::Config(msg) => fail_config(&msg),
        CfgError::Guard(e) => {
            eprintln!("numeric guard violation: {e}");
            std::process::exit(3);
        }
    }
}

fn load_config(common: &Common) -> JobConfig {
    let mut cfg = match &common.config {
        None => JobConfig::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .unwrap_or_else(|e| fail_config(&format!("cannot read {}: {e}", path.display())));
            serde_json::from_str(&text).unwrap_or_else(|e| {
                fail_config(&format!("invalid JSON in {}: {e}", path.display()))
            })
        }
    };
    if cfg.schema != 1 {
        fail_config(&format!("unsupported schema version {}", cfg.schema));
    }
    if let Some(seed) = common.seed {
        cfg.seed = Some(seed);
    }
    if let Some(t) = common.threads {
        cfg.threads = Some(t);
    }
    if let Some(t) = common.tol {
        cfg.tol = Some(t);
    }
    if let Some(mode) = &common.mode {
        cfg.mode = Some(mode.clone());
    }
    cfg
}

fn resolve_mode(cfg: &JobConfig) -> BracketMode {
    let name = cfg.mode.as_deref().unwrap_or("trig");
    parse_mode(name).unwrap_or_else(|e| fail_config(&e))
}

fn resolve_threads(cfg: &JobConfig) -> usize {
    cfg.threads
        .or_else(|| {
            std::env::var("DWPF_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or_else(num_threads_default)
}

fn num_threads_default() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

#[derive(Serialize)]
struct ComputeResult {
    method: &'static str,
    value: [f64; 2],
    scale: f64,
    wall_time_ms: f64,
    terms: u64,
}

#[derive(Serialize)]
struct ComputeReport {
    schema: u32,
    mode: &'static str,
    l: usize,
    seed: Option<u64>,
    results: Vec<ComputeResult>,
}

fn cmd_compute(common: &Common, l_flag: Option<usize>, formulas_flag: &[String]) -> i32 {
    let mut cfg = load_config(common);
    if let Some(l) = l_flag {
        cfg.l = l;
    }
    if !formulas_flag.is_empty() {
        cfg.formulas = formulas_flag.to_vec();
    }
    if cfg.formulas.is_empty() {
        cfg.formulas = vec!["izergin".into()];
    }
    let mode = resolve_mode(&cfg);
    let methods: Vec<Method> = cfg
        .formulas
        .iter()
        .map(|name| {
            method_by_name(name)
                .unwrap_or_else(|| fail_config(&format!("unknown formula '{name}'")))
        })
        .collect();
    let reflecting = methods
        .iter()
        .any(|&m| dwpf::suite::method_is_reflecting(m));
    let p = match cfg.params(mode, reflecting) {
        Ok(p) => p,
        Err(e) => fail_cfg_error(e),
    };
    let mut results = Vec::new();
    for m in methods {
        let start = Instant::now();
        let v = match evaluate(m, &p) {
            Ok(v) => v,
            Err(e) => fail_guard(&e),
        };
        let dt = start.elapsed().as_secs_f64() * 1e3;
        results.push(ComputeResult {
            method: m.name(),
            value: [v.value.re, v.value.im],
            scale: v.scale,
            wall_time_ms: dt,
            terms: method_terms(m, p.l),
        });
    }
    let report = ComputeReport {
        schema: 1,
        mode: mode.name(),
        l: cfg.l,
        seed: cfg.seed,
        results,
    };
    if common.table {
        println!(
            "{:<32} {:>24} {:>24} {:>12} {:>10}",
            "method", "re", "im", "scale", "ms"
        );
        for r in &report.results {
            println!(
                "{:<32} {:>24.16e} {:>24.16e} {:>12.3e} {:>10.3}",
                r.method, r.value[0], r.value[1], r.scale, r.wall_time_ms
            );
        }
    } else {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    }
    0
}

#[derive(Serialize)]
struct CheckRow {
    id: String,
    lhs: &'static str,
    rhs: &'static str,
    l: usize,
    seed: u64,
    residual: f64,
    tolerance: f64,
    /// Negative controls expect residual > tolerance
    expected: &'static str,
    pass: bool,
}

#[derive(Serialize)]
struct Summary {
    total: usize,
    passed: usize,
    failed: usize,
}

#[derive(Serialize)]
struct ValidationReport {
    schema: u32,
    seed: u64,
    threads: usize,
    checks: Vec<CheckRow>,
    summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<Vec<(String, f64)>>,
}

fn cmd_validate(common: &Common, perturb: bool, timings: bool) -> i32 {
    let cfg = load_config(common);
    let threads = resolve_threads(&cfg);
    let master_seed = cfg.seed.unwrap_or(20240);
    let suite_cfg = SuiteConfig {
        master_seed,
        ..SuiteConfig::default()
    };
    let mut checks = default_checks(&suite_cfg);
    if perturb {
        checks.retain(|c| c.expect_large);
    }
    if let Some(tol) = cfg.tol {
        for c in &mut checks {
            if !c.expect_large {
                c.tol = tol;
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap_or_else(|e| fail_config(&format!("cannot build thread pool: {e}")));
    use rayon::prelude::*;
    let outcomes: Vec<(usize, Result<f64, Error>, f64)> = pool.install(|| {
        checks
            .par_iter()
            .enumerate()
            .map(|(i, c)| {
                let start = Instant::now();
                let r = (c.body)();
                (i, r, start.elapsed().as_secs_f64() * 1e3)
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(checks.len());
    let mut times = Vec::with_capacity(checks.len());
    let mut passed = 0usize;
    for (i, outcome, ms) in outcomes {
        let c = &checks[i];
        let (residual, pass) = match outcome {
            Ok(r) => (r, c.passes(r)),
            Err(e) => {
                eprintln!("check {} errored: {e}", c.id);
                (f64::NAN, false)
            }
        };
        if pass {
            passed += 1;
        }
        times.push((c.id.clone(), ms));
        rows.push(CheckRow {
            id: c.id.clone(),
            lhs: c.lhs,
            rhs: c.rhs,
            l: c.l,
            seed: c.seed,
            residual,
            tolerance: c.tol,
            expected: if c.expect_large { "large" } else { "small" },
            pass,
        });
    }
    let report = ValidationReport {
        schema: 1,
        seed: master_seed,
        threads,
        summary: Summary {
            total: rows.len(),
            passed,
            failed: rows.len() - passed,
        },
        checks: rows,
        wall_time_ms: if timings { Some(times) } else { None },
    };
    if common.table {
        println!(
            "{:<38} {:>3} {:>12} {:>9} {:>7} {:>6}",
            "check", "L", "residual", "tol", "expect", "pass"
        );
        for r in &report.checks {
            println!(
                "{:<38} {:>3} {:>12.3e} {:>9.1e} {:>7} {:>6}",
                r.id, r.l, r.residual, r.tolerance, r.expected, r.pass
            );
        }
        println!(
            "summary: {} / {} passed",
            report.summary.passed, report.summary.total
        );
    } else {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    }
    if report.summary.failed == 0 {
        0
    } else {
        1
    }
}

#[derive(Serialize)]
struct BenchRow {
    method: &'static str,
    l: usize,
    wall_time_ms: f64,
    terms: u64,
}

#[derive(Serialize)]
struct BenchReport {
    schema: u32,
    seed: u64,
    rows: Vec<BenchRow>,
    /// At the top of the range the determinant must be the fastest of the
    /// available closed forms.
    ordering_ok: bool,
}

fn cmd_bench(common: &Common, lmin: usize, lmax: usize) -> i32 {
    let cfg = load_config(common);
    let seed = cfg.seed.unwrap_or(20240);
    let mode = resolve_mode(&cfg);
    let ctx = match cfg.context(mode) {
        Ok(c) => c,
        Err(e) => fail_config(&e),
    };
    if lmin == 0 || lmax < lmin {
        fail_config("need 1 <= lmin <= lmax");
    }
    let mut rows = Vec::new();
    let mut ordering_ok = true;
    for l in lmin..=lmax.min(12) {
        let p = match dwpf::ParamSampler::new(seed ^ (l as u64)).draw_params(&ctx, l, false, false)
        {
            Ok(p) => p,
            Err(e) => fail_guard(&e),
        };
        let mut timed = |m: Method| -> Option<f64> {
            let limit = match m {
                Method::Enumerate => 4,
                Method::Recipe => 7,
                Method::SymmetrizedSum | Method::AntisymSum | Method::LagrangeSum => 9,
                _ => 12,
            };
            if l > limit {
                return None;
            }
            let reps = if l <= 6 { 5 } else { 1 };
            let mut best = f64::INFINITY;
            for _ in 0..reps {
                let start = Instant::now();
                if let Err(e) = evaluate(m, &p) {
                    fail_guard(&e);
                }
                best = best.min(start.elapsed().as_secs_f64() * 1e3);
            }
            rows.push(BenchRow {
                method: m.name(),
                l,
                wall_time_ms: best,
                terms: method_terms(m, l),
            });
            Some(best)
        };
        timed(Method::Enumerate);
        timed(Method::Contract);
        let t_det = timed(Method::Izergin);
        let t_sym = timed(Method::SymmetrizedSum);
        timed(Method::AntisymSum);
        timed(Method::LagrangeSum);
        if l >= 8 {
            if let (Some(det), Some(sym)) = (t_det, t_sym) {
                if det >= sym {
                    ordering_ok = false;
                }
            }
        }
    }
    let report = BenchReport {
        schema: 1,
        seed,
        rows,
        ordering_ok,
    };
    if common.table {
        println!("{:<24} {:>3} {:>12} {:>12}", "method", "L", "ms", "terms");
        for r in &report.rows {
            println!(
                "{:<24} {:>3} {:>12.4} {:>12}",
                r.method, r.l, r.wall_time_ms, r.terms
            );
        }
        println!("ordering_ok: {}", report.ordering_ok);
    } else {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    }
    let _ = std::io::stdout().flush();
    0
}

fn main() {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Compute { l, formulas } => cmd_compute(&cli.common, *l, formulas),
        Command::Validate { perturb, timings } => cmd_validate(&cli.common, *perturb, *timings),
        Command::Bench { lmin, lmax } => cmd_bench(&cli.common, *lmin, *lmax),
    };
    std::process::exit(code);
}
