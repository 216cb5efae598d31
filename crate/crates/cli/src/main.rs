use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qpip::arith::primes_up_to;
use qpip::ideals::{parse_ideal, random_prime_norm_ideal, RightIdeal};
use qpip::quat::{maximal_order, Order, QuatAlgebra};
use qpip::reduction::{
    build_factor_base, from_text, gbuild, naive_generator, principal_generator, to_text, verify_generator,
    BuildConfig, GReductionStructure, Solution, SolveConfig, DEFAULT_EXPAND_DIGITS,
};
use qpip::Error;

/// Principal ideal testing in maximal orders of indefinite quaternion algebras over ℚ.
#[derive(Parser)]
#[command(name = "qpip", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ramification, discriminants and a maximal order basis.
    Info {
        #[arg(long, allow_hyphen_values = true)]
        algebra: String,
    },
    /// Build a reduction structure and write it to a file.
    Gbuild {
        #[arg(long, allow_hyphen_values = true)]
        algebra: String,
        #[arg(long)]
        bound: Option<u32>,
        #[arg(long)]
        structure: PathBuf,
        #[command(flatten)]
        budgets: BuildBudgets,
    },
    /// Find a generator of a right ideal.
    Solve {
        #[arg(long, conflicts_with = "algebra")]
        structure: Option<PathBuf>,
        /// Build a structure in memory instead of loading one.
        #[arg(long, allow_hyphen_values = true)]
        algebra: Option<String>,
        #[arg(long)]
        bound: Option<u32>,
        /// "gens: t,u,v,w ; ..." or "hnf: 16 ints / denom".
        #[arg(long, allow_hyphen_values = true, required_unless_present = "batch")]
        ideal: Option<String>,
        /// Solve one random ideal of every prime norm below this bound.
        #[arg(long, conflicts_with = "ideal")]
        batch: Option<u32>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        budgets: SolveBudgets,
        #[command(flatten)]
        build: BuildBudgets,
        /// Per-ideal timing CSV for batch mode.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Random algebras in a discriminant range, one random ideal each.
    Bench {
        #[arg(long, default_value_t = 1)]
        delta_min: u64,
        #[arg(long, default_value_t = 10_000)]
        delta_max: u64,
        #[arg(long, default_value_t = 10)]
        count: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Upper bound on the prime norm of the sampled ideals.
        #[arg(long, default_value_t = 1000)]
        max_norm: u32,
        #[command(flatten)]
        budgets: SolveBudgets,
        #[command(flatten)]
        build: BuildBudgets,
        /// Write the rows here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Copy)]
struct BuildBudgets {
    /// Elements enumerated per relation search.
    #[arg(long, default_value_t = 200_000)]
    budget_enum: u64,
    /// Elements enumerated per unit search.
    #[arg(long, default_value_t = qpip::units::DEFAULT_SEARCH_BUDGET)]
    budget_units: u64,
}

#[derive(Args, Clone, Copy)]
struct SolveBudgets {
    #[arg(long, default_value_t = 1000)]
    budget_attempts: u32,
    #[arg(long, default_value_t = DEFAULT_EXPAND_DIGITS)]
    budget_digits: usize,
}

impl BuildBudgets {
    fn config(&self) -> BuildConfig {
        BuildConfig { enum_budget: self.budget_enum, unit_budget: self.budget_units }
    }
}

impl SolveBudgets {
    fn config(&self) -> SolveConfig {
        SolveConfig { attempts: self.budget_attempts, expand_digits: self.budget_digits, ..SolveConfig::default() }
    }
}

enum Failure {
    Lib(Error),
    Io(String),
    Unverified(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn io(e: std::io::Error, path: &std::path::Path) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExhausted(_) | Error::SizeCap(_) | Error::FactorizationCap(_) | Error::PrecisionExhausted => 3,
        Error::Invariant(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Info { algebra } => info(&algebra),
        Command::Gbuild { algebra, bound, structure, budgets } => cmd_gbuild(&algebra, bound, &structure, budgets),
        Command::Solve { structure, algebra, bound, ideal, batch, seed, budgets, build, csv } => {
            cmd_solve(structure, algebra, bound, ideal, batch, seed, budgets, build, csv)
        }
        Command::Bench { delta_min, delta_max, count, seed, max_norm, budgets, build, csv } => {
            cmd_bench(delta_min, delta_max, count, seed, max_norm, budgets, build, csv)
        }
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Unverified(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
    }
}

fn order_for(algebra: &str) -> Result<Arc<Order>, Failure> {
    let alg: QuatAlgebra = algebra.parse()?;
    Ok(Arc::new(maximal_order(Arc::new(alg))?))
}

fn list(xs: &[BigInt]) -> String {
    let parts: Vec<String> = xs.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

fn info(algebra: &str) -> Result<(), Failure> {
    let o = order_for(algebra)?;
    let alg = o.alg();
    println!("algebra    ({alg})");
    println!("ramified   {}", list(alg.ramified()));
    println!("delta      {}", alg.delta());
    println!("disc       {}", alg.disc());
    println!("indefinite yes");
    println!("maximal order basis:");
    for b in o.display_basis() {
        println!("  {b}");
    }
    Ok(())
}

fn build(o: &Arc<Order>, bound: Option<u32>, budgets: BuildBudgets) -> Result<(GReductionStructure, f64), Failure> {
    let start = Instant::now();
    let fb = build_factor_base(o.alg(), bound);
    let s = gbuild(o, &fb, &budgets.config())?;
    Ok((s, start.elapsed().as_secs_f64() * 1e3))
}

fn cmd_gbuild(algebra: &str, bound: Option<u32>, path: &PathBuf, budgets: BuildBudgets) -> Result<(), Failure> {
    let o = order_for(algebra)?;
    let (s, ms) = build(&o, bound, budgets)?;
    fs::write(path, to_text(&s)).map_err(|e| io(e, path))?;
    let fb = s.factor_base();
    println!("algebra     ({})", o.alg());
    println!("factor base {} (bound {})", list(fb.primes()), fb.bound());
    println!("relations   {}", s.relations().len());
    for l in s.local_structures() {
        let stats: Vec<String> = (0..2)
            .map(|side| {
                let longest = l.table(side).iter().map(|t| t.word.len()).max().unwrap_or(0);
                format!("side {side}: {} units, longest word {longest}", l.generators(side).len())
            })
            .collect();
        println!("p = {:<4}    {}", l.p(), stats.join("; "));
    }
    println!("written     {}", path.display());
    eprintln!("build time {ms:.1} ms");
    Ok(())
}

fn load_or_build(
    structure: Option<PathBuf>,
    algebra: Option<String>,
    bound: Option<u32>,
    budgets: BuildBudgets,
) -> Result<GReductionStructure, Failure> {
    match (structure, algebra) {
        (Some(path), _) => {
            let text = fs::read_to_string(&path).map_err(|e| io(e, &path))?;
            Ok(from_text(&text)?)
        }
        (None, Some(a)) => Ok(build(&order_for(&a)?, bound, budgets)?.0),
        (None, None) => Err(Failure::Lib(Error::InvalidInput("need --structure or --algebra".into()))),
    }
}

fn solve_one(i: &RightIdeal, s: &GReductionStructure, rng: &mut ChaCha8Rng, cfg: &SolveConfig) -> Result<Solution, Failure> {
    let sol = principal_generator(i, s, rng, cfg)?;
    if let Some(w) = &sol.expanded {
        if !verify_generator(i, w) {
            return Err(Failure::Unverified("generator fails w·O = I".into()));
        }
    }
    Ok(sol)
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    structure: Option<PathBuf>,
    algebra: Option<String>,
    bound: Option<u32>,
    ideal: Option<String>,
    batch: Option<u32>,
    seed: u64,
    budgets: SolveBudgets,
    build_budgets: BuildBudgets,
    csv: Option<PathBuf>,
) -> Result<(), Failure> {
    let s = load_or_build(structure, algebra, bound, build_budgets)?;
    let o = s.order().clone();
    let cfg = budgets.config();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if let Some(limit) = batch {
        return solve_batch(&s, limit, &mut rng, &cfg, csv);
    }
    let i = parse_ideal(o.clone(), ideal.as_deref().expect("required by clap"))?;
    if !i.is_integral() {
        return Err(Failure::Lib(Error::InvalidInput("ideal is not integral".into())));
    }
    let start = Instant::now();
    let sol = solve_one(&i, &s, &mut rng, &cfg)?;
    println!("algebra      ({})", o.alg());
    println!("norm         {}", i.norm());
    match &sol.expanded {
        Some(w) => {
            println!("generator    {w}");
            println!("|nrd|        {}", o.alg().nrd(w).abs());
        }
        None => {
            println!("generator    compact, {} factors (over the digit cap)", sol.generator.size());
            println!("|nrd|        {}", sol.generator.nrd(o.alg()).abs());
        }
    }
    println!("attempts     {}", sol.attempts);
    println!("smooth-rate  {:.4}", sol.smooth_rate);
    println!("verification PASS");
    eprintln!("solve time {:.1} ms", start.elapsed().as_secs_f64() * 1e3);
    Ok(())
}

fn solve_batch(
    s: &GReductionStructure,
    limit: u32,
    rng: &mut ChaCha8Rng,
    cfg: &SolveConfig,
    csv: Option<PathBuf>,
) -> Result<(), Failure> {
    let o = s.order();
    let mut rows = vec!["norm,attempts,smooth_rate,solve_ms,verified".to_string()];
    let mut total = 0.0;
    let mut n = 0;
    for l in primes_up_to(limit.saturating_sub(1)) {
        let l = BigInt::from(l);
        if o.alg().is_ramified(&l) {
            continue;
        }
        let i = random_prime_norm_ideal(o, &l, rng)?;
        let start = Instant::now();
        let sol = solve_one(&i, s, rng, cfg)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        total += ms;
        n += 1;
        println!("norm {l:<4} attempts {:<4} PASS", sol.attempts);
        rows.push(format!("{l},{},{:.4},{ms:.3},PASS", sol.attempts, sol.smooth_rate));
    }
    println!("solved {n} ideals, all verified");
    if n > 0 {
        eprintln!("mean solve time {:.1} ms", total / f64::from(n));
    }
    if let Some(path) = csv {
        fs::write(&path, rows.join("\n") + "\n").map_err(|e| io(e, &path))?;
    }
    Ok(())
}

/// A random indefinite algebra with `Δ` in the range, or `None` after many tries.
fn random_algebra(rng: &mut ChaCha8Rng, lo: u64, hi: u64) -> Option<QuatAlgebra> {
    for _ in 0..100_000 {
        let a: i64 = rng.gen_range(-60..=60);
        let b: i64 = rng.gen_range(-60..=60);
        if a == 0 || b == 0 || (a < 0 && b < 0) {
            continue;
        }
        let Ok(alg) = QuatAlgebra::new(a, b) else { continue };
        let d = alg.disc().to_u64().unwrap_or(u64::MAX);
        if (lo..=hi).contains(&d) {
            return Some(alg);
        }
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    lo: u64,
    hi: u64,
    count: u32,
    seed: u64,
    max_norm: u32,
    budgets: SolveBudgets,
    build_budgets: BuildBudgets,
    csv: Option<PathBuf>,
) -> Result<(), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = budgets.config();
    let primes = primes_up_to(max_norm.max(2));
    let mut out: Box<dyn Write> = match &csv {
        Some(path) => Box::new(fs::File::create(path).map_err(|e| io(e, path))?),
        None => Box::new(std::io::stdout()),
    };
    let w = |out: &mut Box<dyn Write>, line: String| writeln!(out, "{line}").map_err(|e| Failure::Io(e.to_string()));
    w(&mut out, "delta,norm,attempts,smooth_rate,build_ms,solve_ms".into())?;
    for _ in 0..count {
        let alg = random_algebra(&mut rng, lo, hi)
            .ok_or_else(|| Error::InvalidInput(format!("no indefinite algebra with discriminant in [{lo}, {hi}]")))?;
        let delta = alg.disc();
        let o = Arc::new(maximal_order(Arc::new(alg))?);
        let (s, build_ms) = match build(&o, None, build_budgets) {
            Ok(x) => x,
            Err(Failure::Lib(e)) if exit_code(&e) == 3 => {
                w(&mut out, format!("{delta},,,,timeout,"))?;
                continue;
            }
            Err(e) => return Err(e),
        };
        let l = BigInt::from(primes[rng.gen_range(0..primes.len())]);
        let i = random_prime_norm_ideal(&o, &l, &mut rng)?;
        let start = Instant::now();
        let row = match principal_generator(&i, &s, &mut rng, &cfg) {
            Ok(sol) => {
                let ms = start.elapsed().as_secs_f64() * 1e3;
                let ok = sol.expanded.as_ref().is_none_or(|x| verify_generator(&i, x));
                if !ok {
                    return Err(Failure::Unverified(format!("generator fails w·O = I at Δ = {delta}")));
                }
                if delta <= BigInt::from(10_000) {
                    let naive = match naive_generator(&i, 1_000_000) {
                        Ok(x) if verify_generator(&i, &x) => "agree",
                        Ok(_) => return Err(Failure::Unverified(format!("naive generator fails at Δ = {delta}"))),
                        Err(_) => "naive budget exhausted",
                    };
                    eprintln!("Δ = {delta}, norm {l}: oracle {naive}");
                }
                format!("{delta},{l},{},{:.4},{build_ms:.3},{ms:.3}", sol.attempts, sol.smooth_rate)
            }
            Err(e) if exit_code(&e) == 3 => format!("{delta},{l},{},0,{build_ms:.3},timeout", cfg.attempts),
            Err(e) => return Err(e.into()),
        };
        w(&mut out, row)?;
    }
    Ok(())
}
