use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;
use sunitgap::cache::UnitCache;
use sunitgap::config::{ConfigLayer, RunConfig};
use sunitgap::dataset_io::{load_dataset, write_atomic, write_dataset, write_summary_csv, DatasetFile};
use sunitgap::parallel::{enumerate_parallel, hensel_family_parallel, pool};
use sunitgap::report::{build_report, write_report_csv, ReportParams};
use sunitgap::{AppError, AppResult, TOOL_VERSION};
use sunitgap_core::arith::{s_part, ExponentVector, FactorBudget, PrimeSet};
use sunitgap_core::bounds::{
    gpf_shape, kappa_p2, kappa_pd, log_star, matveev_shape, schinzel_rhs, tau_shape, yu_shape, PrimeStats,
};
use sunitgap_core::hensel::find_witness_prime;
use sunitgap_core::quadfield::{reduce_height_with, QuadInt};
use sunitgap_core::search::{
    fixed_rhs_exponent, solve_fixed_rhs, solve_sunit_rhs, Dataset, SearchBudget, SearchWindow,
};

#[derive(Parser)]
#[command(name = "sunitgap", version, about = "Squares minus T-units: S-parts, search and bounds")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Split n into its S-part, cofactor and sign.
    Spart {
        #[arg(short = 'n', allow_negative_numbers = true)]
        n: BigInt,
        #[arg(short = 'S', value_delimiter = ',', required = true)]
        s: Vec<u64>,
    },
    /// Exhaustive (x, a) window search; writes a JSON-lines dataset and a CSV summary.
    Enumerate(WindowArgs),
    /// Solve x^2 - N = m for fixed m, or x^2 - N = +-U with U an S-unit.
    Solve(SolveArgs),
    /// Hensel-lifted witnesses x^2 = N mod p^k.
    Hensel(HenselArgs),
    /// Fundamental unit of Q(sqrt D).
    Fundunit {
        #[arg(short = 'D')]
        d: u64,
    },
    /// Height reduction alpha = delta * eta^m.
    Reduce(ReduceArgs),
    /// Evaluate a bound shape; all constants must be given.
    Bounds {
        #[command(subcommand)]
        which: BoundCmd,
    },
    /// Join a dataset with the fitted bounds into a CSV report.
    Report {
        #[arg(long)]
        dataset: PathBuf,
        /// Exponent constant; fitted from the data when absent.
        #[arg(long)]
        c: Option<f64>,
        /// Constant of the prime-factor bound; fitted when absent.
        #[arg(long = "c-t")]
        c_t: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct WindowArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(short = 'S', value_delimiter = ',')]
    s: Option<Vec<u64>>,
    #[arg(short = 'T', value_delimiter = ',')]
    t: Option<Vec<u64>>,
    #[arg(long = "xmax")]
    x_max: Option<u64>,
    /// One bound for every prime of T, or one per prime.
    #[arg(long = "exp-max", value_delimiter = ',')]
    exp_max: Option<Vec<u32>>,
    /// Allow x sharing a prime with T.
    #[arg(long)]
    no_coprime: bool,
    #[arg(long)]
    workers: Option<usize>,
    /// Pollard rho iteration cap per factorization.
    #[arg(long)]
    factor_budget: Option<u64>,
    /// Refuse windows with more (x, a) tuples than this.
    #[arg(long)]
    max_window: Option<u128>,
    /// Output path; `.jsonl` and `.csv` are written next to each other.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl WindowArgs {
    fn layer(&self) -> AppResult<ConfigLayer> {
        let file = match &self.config {
            Some(p) => ConfigLayer::parse(&std::fs::read_to_string(p)?, &p.display().to_string())?,
            None => ConfigLayer::default(),
        };
        let flags = ConfigLayer {
            s_primes: self.s.clone(),
            t_primes: self.t.clone(),
            x_max: self.x_max,
            exp_max: self.exp_max.clone(),
            require_coprime: self.no_coprime.then_some(false),
            workers: self.workers,
            factor_budget: self.factor_budget,
            max_window: self.max_window,
            out: self.out.clone(),
        };
        Ok(file.overlay(ConfigLayer::from_env()?).overlay(flags))
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(short = 'T', value_delimiter = ',', required = true)]
    t: Vec<u64>,
    /// Right-hand side for the fixed mode.
    #[arg(short = 'm', allow_negative_numbers = true, conflicts_with = "s")]
    m: Option<BigInt>,
    /// S for the S-unit mode.
    #[arg(short = 'S', value_delimiter = ',')]
    s: Option<Vec<u64>>,
    #[arg(long = "xmax")]
    x_max: u64,
    /// Defaults, in the fixed mode, to the largest exponents with q^e <= xmax^2 + |m|.
    #[arg(long = "exp-max", value_delimiter = ',')]
    exp_max: Option<Vec<u32>>,
    #[arg(long)]
    no_coprime: bool,
    #[arg(long)]
    max_window: Option<u128>,
    /// CSV of the solutions.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HenselArgs {
    #[arg(short = 'T', value_delimiter = ',', required = true)]
    t: Vec<u64>,
    #[arg(short = 'a', value_delimiter = ',', required = true)]
    a: Vec<u32>,
    #[arg(short = 'p', required_unless_present = "find_p")]
    p: Option<u64>,
    #[arg(short = 'k', conflicts_with_all = ["k_min", "k_max"])]
    k: Option<u32>,
    #[arg(long, requires = "k_max")]
    k_min: Option<u32>,
    #[arg(long, requires = "k_min")]
    k_max: Option<u32>,
    /// Print the smallest usable p (from --from upwards) and exit.
    #[arg(long)]
    find_p: bool,
    #[arg(long, default_value_t = 3)]
    from: u64,
    #[arg(long)]
    workers: Option<usize>,
    /// Dataset output with S = {p}.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(short = 'D', required_unless_present = "input")]
    d: Option<u64>,
    #[arg(short = 'u', allow_negative_numbers = true, required_unless_present = "input")]
    u: Option<BigInt>,
    #[arg(short = 'v', allow_negative_numbers = true, required_unless_present = "input")]
    v: Option<BigInt>,
    #[arg(long, default_value_t = 1)]
    den: u8,
    /// Batch file of `D u v [den]` lines.
    #[arg(long, conflicts_with_all = ["d", "u", "v"])]
    input: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum BoundCmd {
    LogStar {
        x: f64,
    },
    KappaP2 {
        #[arg(short = 'S', value_delimiter = ',', required = true)]
        s: Vec<u64>,
        #[arg(long)]
        c: f64,
    },
    KappaPd {
        #[arg(short = 'S', value_delimiter = ',', required = true)]
        s: Vec<u64>,
        #[arg(long)]
        c: f64,
        #[arg(short = 'd')]
        d: u32,
    },
    Tau {
        #[arg(short = 'S', value_delimiter = ',', required = true)]
        s: Vec<u64>,
        #[arg(long)]
        c: f64,
    },
    Schinzel {
        #[arg(short = 'M')]
        m: f64,
        #[arg(long)]
        c: f64,
    },
    GpfShape {
        #[arg(short = 'X')]
        x: f64,
    },
    Matveev {
        #[arg(long, value_delimiter = ',', required = true)]
        heights: Vec<f64>,
        #[arg(short = 'B')]
        b: f64,
        #[arg(long)]
        c1: f64,
    },
    Yu {
        #[arg(short = 'p')]
        p: u64,
        #[arg(long)]
        degree: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        heights: Vec<f64>,
        #[arg(short = 'B')]
        b: f64,
        #[arg(long)]
        c2: f64,
    },
}

fn workers_from(flag: Option<usize>) -> AppResult<usize> {
    let layer = ConfigLayer::from_env()?.overlay(ConfigLayer { workers: flag, ..Default::default() });
    Ok(layer
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
        .max(1))
}

fn paren(v: &[u32]) -> String {
    format!("({})", v.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
}

fn with_ext(p: &Path, ext: &str) -> PathBuf {
    p.with_extension(ext)
}

fn save_dataset(out: &Path, file: &DatasetFile) -> AppResult<()> {
    let jsonl = with_ext(out, "jsonl");
    let csv = with_ext(out, "csv");
    write_atomic(&jsonl, |w| write_dataset(w, file))?;
    write_atomic(&csv, |w| write_summary_csv(w, file))?;
    println!("dataset = {}", jsonl.display());
    println!("summary = {}", csv.display());
    Ok(())
}

fn print_summary(ds: &Dataset) {
    let s = ds.summary();
    println!("records = {}", s.records);
    println!("skipped_zero_delta = {}", s.skipped.zero_delta);
    println!("skipped_not_coprime = {}", s.skipped.not_coprime);
    if let (Some(q), Some(i)) = (s.max_ratio, s.argmax) {
        let r = &ds.records[i];
        println!("max_ratio = {q}");
        println!("argmax = x {} a {} delta {}", r.x, paren(r.a.exps()), r.delta);
    }
    if let Some(g) = s.min_gpf {
        println!("min_gpf = {g}");
    }
    println!("gpf_unknown = {}", s.gpf_unknown);
    println!("s_unit_records = {}", s.s_unit_records);
}

fn cmd_spart(n: &BigInt, s: Vec<u64>) -> AppResult<()> {
    let f = s_part(n, &PrimeSet::new(s)?)?;
    let sign = if f.negative { '-' } else { '+' };
    println!("{} * {}, sign {sign}", f.spart_value(), f.cofactor);
    println!("spart = {}", f.spart);
    Ok(())
}

fn cmd_enumerate(args: &WindowArgs) -> AppResult<()> {
    let run = RunConfig::resolve(&args.layer()?)?;
    let ds = enumerate_parallel(&run.s, &run.t, &run.window, &run.budget, run.workers)?;
    print_summary(&ds);
    if let Some(out) = &run.out {
        save_dataset(out, &DatasetFile { config: run.echo(), dataset: ds })?;
    }
    Ok(())
}

/// Largest `e` with `q^e <= bound`.
fn max_exponent(q: u64, bound: &BigUint) -> u32 {
    let q = BigUint::from(q);
    let mut e = 0;
    let mut pow = q.clone();
    while &pow <= bound {
        e += 1;
        pow *= &q;
    }
    e
}

fn cmd_solve(args: &SolveArgs) -> AppResult<()> {
    let t = PrimeSet::new(args.t.clone())?;
    let mut budget = SearchBudget::default();
    if let Some(limit) = args.max_window {
        budget.max_window = limit;
    }
    let exp_max = |derived: Option<&BigUint>| -> AppResult<Vec<u32>> {
        match (args.exp_max.as_deref(), derived) {
            (Some([e]), _) => Ok(vec![*e; t.len()]),
            (Some(v), _) => Ok(v.to_vec()),
            (None, Some(bound)) => Ok(t.primes().iter().map(|&q| max_exponent(q, bound)).collect()),
            (None, None) => Err(AppError::Usage("--exp-max is required in the S-unit mode".into())),
        }
    };
    let mut lines = Vec::new();
    match (&args.m, &args.s) {
        (Some(m), None) => {
            let bound = BigUint::from(args.x_max).pow(2) + m.magnitude();
            let exps = exp_max(Some(&bound))?;
            let sols = solve_fixed_rhs(&t, m, args.x_max, &exps, &budget)?;
            println!("# x^2 - N = {m}, T = {t}, x <= {}, exp_max = {}", args.x_max, paren(&exps));
            for (x, a) in &sols {
                println!("x = {x}, a = {}, N = {}", paren(a.exps()), a.value());
                lines.push(vec![x.to_string(), paren(a.exps()), a.value().to_string(), m.to_string()]);
            }
            println!("solutions = {}", sols.len());
            if let Some(c) = fixed_rhs_exponent(&sols, m) {
                println!("max log x / log|2m| = {c}");
            }
            println!("complete within the window only");
            if let Some(out) = &args.out {
                write_solutions(out, &["x", "a", "n_value", "m"], &lines)?;
            }
        }
        (None, Some(s)) => {
            let s = PrimeSet::new(s.clone())?;
            let mut window = SearchWindow::new(args.x_max, exp_max(None)?);
            window.require_coprime = !args.no_coprime;
            let sols = solve_sunit_rhs(&s, &t, &window, &budget)?;
            println!("# x^2 - N = +-U, S = {s}, T = {t}, x <= {}, exp_max = {}", args.x_max, paren(&window.exp_max));
            for sol in &sols {
                let sign = if sol.sign < 0 { '-' } else { '+' };
                println!("x = {}, a = {}, u = {}, sign {sign}", sol.x, paren(sol.a.exps()), paren(sol.u.exps()));
                lines.push(vec![sol.x.to_string(), paren(sol.a.exps()), paren(sol.u.exps()), sign.to_string()]);
            }
            println!("solutions = {}", sols.len());
            println!("complete within the window only");
            if let Some(out) = &args.out {
                write_solutions(out, &["x", "a", "u", "sign"], &lines)?;
            }
        }
        _ => return Err(AppError::Usage("give either -m or -S".into())),
    }
    Ok(())
}

fn write_solutions(out: &Path, header: &[&str], lines: &[Vec<String>]) -> AppResult<()> {
    write_atomic(out, |w| {
        writeln!(w, "# sunitgap {TOOL_VERSION}")?;
        let mut csv = csv::Writer::from_writer(w);
        let io = |e: csv::Error| AppError::Io(std::io::Error::other(e));
        csv.write_record(header).map_err(io)?;
        for l in lines {
            csv.write_record(l).map_err(io)?;
        }
        csv.flush()?;
        Ok(())
    })
}

fn cmd_hensel(args: &HenselArgs) -> AppResult<()> {
    let t = PrimeSet::new(args.t.clone())?;
    let a = ExponentVector::new(t.clone(), args.a.clone())?;
    if args.find_p {
        let p = find_witness_prime(&a, args.from)
            .ok_or_else(|| AppError::Core(sunitgap_core::Error::NoWitness("no prime found".into())))?;
        println!("p = {p}");
        return Ok(());
    }
    let p = args.p.expect("clap enforces -p");
    let ks = match (args.k, args.k_min, args.k_max) {
        (Some(k), _, _) => k..k + 1,
        (None, Some(lo), Some(hi)) if lo <= hi => lo..hi + 1,
        (None, Some(_), Some(_)) => return Err(AppError::Usage("k_min exceeds k_max".into())),
        _ => return Err(AppError::Usage("give -k or --k-min/--k-max".into())),
    };
    let workers = workers_from(args.workers)?;
    let fam = hensel_family_parallel(&a, p, ks.clone(), workers)?;
    for w in &fam.witnesses {
        println!(
            "k = {}, x = {}, N = {}, delta = {}, spart = {}, ratio = {}",
            w.k, w.x, w.n_value, w.delta, w.spart_value, w.ratio
        );
    }
    for (k, e) in &fam.skipped {
        println!("k = {k}: {e}");
    }
    if fam.witnesses.is_empty() {
        if let Some((_, e)) = fam.skipped.into_iter().next() {
            return Err(e.into());
        }
        return Ok(());
    }
    if let Some(out) = &args.out {
        let ds = Dataset::from_witnesses(&fam.witnesses, &FactorBudget::default())?;
        let mut config = BTreeMap::new();
        config.insert("t_primes".into(), args.t.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
        config.insert("a".into(), paren(&args.a));
        config.insert("p".into(), p.to_string());
        config.insert("k_min".into(), ks.start.to_string());
        config.insert("k_max".into(), (ks.end - 1).to_string());
        config.insert("workers".into(), workers.to_string());
        config.insert("out".into(), out.display().to_string());
        save_dataset(out, &DatasetFile { config, dataset: ds })?;
    }
    Ok(())
}

fn cmd_fundunit(d: u64) -> AppResult<()> {
    let unit = UnitCache::new().get(d)?;
    println!("{}, norm {}", unit.eta, unit.norm);
    println!("log eta = {}", unit.log_eta);
    Ok(())
}

fn parse_reduce_line(line: &str) -> Result<(u64, BigInt, BigInt, u8), String> {
    let f: Vec<&str> = line.split_whitespace().collect();
    if !(3..=4).contains(&f.len()) {
        return Err("expected `D u v [den]`".into());
    }
    let bad = |s: &str| format!("bad number '{s}'");
    let d = f[0].parse().map_err(|_| bad(f[0]))?;
    let u = f[1].parse().map_err(|_| bad(f[1]))?;
    let v = f[2].parse().map_err(|_| bad(f[2]))?;
    let den = match f.get(3) {
        Some(s) => s.parse().map_err(|_| bad(s))?,
        None => 1,
    };
    Ok((d, u, v, den))
}

fn cmd_reduce(args: &ReduceArgs) -> AppResult<()> {
    let cache = UnitCache::new();
    let Some(input) = &args.input else {
        let d = args.d.expect("clap enforces -D");
        let alpha = QuadInt::new(d, args.u.clone().expect("-u"), args.v.clone().expect("-v"), args.den)?;
        let unit = cache.get(d)?;
        let (m, delta) = reduce_height_with(&alpha, &unit)?;
        let bound = 0.5 * (ln_norm(&alpha) + unit.log_eta);
        println!("alpha = {alpha}");
        println!("m = {m}");
        println!("delta = {delta}");
        println!("h(delta) = {}", delta.weil_height()?);
        println!("bound = {bound}");
        return Ok(());
    };
    let name = input.display().to_string();
    let file = std::io::BufReader::new(std::fs::File::open(input)?);
    let mut jobs = Vec::new();
    for (i, line) in file.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim().to_string();
        if body.is_empty() {
            continue;
        }
        let job = parse_reduce_line(&body).map_err(|m| AppError::parse(&name, i + 1, m))?;
        jobs.push(job);
    }
    let results: Vec<AppResult<String>> = pool(workers_from(args.workers)?)?.install(|| {
        jobs.par_iter()
            .map(|(d, u, v, den)| {
                let alpha = QuadInt::new(*d, u.clone(), v.clone(), *den)?;
                let (m, delta) = reduce_height_with(&alpha, &cache.get(*d)?)?;
                Ok(format!("{d} {u} {v} {den} {m} {} {} {}", delta.u(), delta.v(), delta.den()))
            })
            .collect()
    });
    println!("# D u v den m delta_u delta_v delta_den");
    for r in results {
        println!("{}", r?);
    }
    Ok(())
}

fn ln_norm(alpha: &QuadInt) -> f64 {
    let n = alpha.norm();
    let mag = n.magnitude();
    let bits = mag.bits();
    let shift = bits.saturating_sub(63);
    let top: u64 = (mag >> shift).try_into().unwrap_or(u64::MAX);
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

fn cmd_bounds(which: &BoundCmd) -> AppResult<()> {
    let stats = |s: &[u64]| -> AppResult<PrimeStats> { Ok(PrimeStats::new(&PrimeSet::new(s.to_vec())?)?) };
    let value = match which {
        BoundCmd::LogStar { x } => log_star(*x)?,
        BoundCmd::KappaP2 { s, c } => kappa_p2(&stats(s)?, *c)?,
        BoundCmd::KappaPd { s, c, d } => kappa_pd(&stats(s)?, *c, *d)?,
        BoundCmd::Tau { s, c } => tau_shape(&stats(s)?, *c)?,
        BoundCmd::Schinzel { m, c } => schinzel_rhs(*m, *c)?,
        BoundCmd::GpfShape { x } => gpf_shape(*x)?,
        BoundCmd::Matveev { heights, b, c1 } => matveev_shape(heights, *b, *c1)?,
        BoundCmd::Yu { p, degree, heights, b, c2 } => yu_shape(*p, *degree, heights, *b, *c2)?,
    };
    println!("{value}");
    Ok(())
}

fn cmd_report(dataset: &Path, c: Option<f64>, c_t: Option<f64>, out: Option<&Path>) -> AppResult<()> {
    let file = load_dataset(dataset)?;
    let report = build_report(file.as_ref(), ReportParams { c, c_t })?;
    match out {
        Some(out) => {
            write_atomic(out, |w| write_report_csv(w, &report))?;
            println!("report = {}", out.display());
        }
        None => write_report_csv(std::io::stdout().lock(), &report)?,
    }
    Ok(())
}

fn run(cli: Cli) -> AppResult<()> {
    match &cli.cmd {
        Cmd::Spart { n, s } => cmd_spart(n, s.clone()),
        Cmd::Enumerate(args) => cmd_enumerate(args),
        Cmd::Solve(args) => cmd_solve(args),
        Cmd::Hensel(args) => cmd_hensel(args),
        Cmd::Fundunit { d } => cmd_fundunit(*d),
        Cmd::Reduce(args) => cmd_reduce(args),
        Cmd::Bounds { which } => cmd_bounds(which),
        Cmd::Report { dataset, c, c_t, out } => cmd_report(dataset, *c, *c_t, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
