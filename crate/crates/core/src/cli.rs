//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a checked identity or inequality fails,
//! 2 on usage or input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::asymptotics::{gd_trace, gdk_trace, generalized_trace, validate_gamma};
use crate::bounds::{
    bound_scan, decompose, envelope_crossing_loglog, pi3_from_decomposition,
    pi3_inequality_check, ExponentMode,
};
use crate::corpus::corpus;
use crate::density::density_trace;
use crate::irreducibility::{check_irreducible, Status};
use crate::modular::{classify, count_distinct_roots_gcd, count_distinct_roots_scan};
use crate::primes::{factorize, primes_up_to, SieveConfig, DEFAULT_BUDGET};
use crate::report::{bound_csv, bound_json, density_csv, density_json, fmt_float, trace_csv, trace_json};
use crate::totient::{phi_p_batch, phi_p_bruteforce, phi_p_lemma};
use crate::{Error, Polynomial};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "polytot", version, about = "Generalized totient analysis toolkit")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Output format (default: human-readable line for phi/delta/roots/pi3, CSV otherwise)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads
    #[arg(long, global = true, env = "POLYTOT_THREADS")]
    threads: Option<usize>,
    /// Largest sieve or table limit allowed
    #[arg(long, global = true, env = "POLYTOT_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Seed for randomized checks
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Proceed when irreducibility cannot be settled
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// phi_P(n) by brute force and by the product formula
    Phi {
        #[arg(short = 'P', long = "poly", allow_hyphen_values = true)]
        poly: String,
        #[arg(short = 'n')]
        n: u64,
    },
    /// Fixed divisor gcd_k P(k)
    Delta {
        #[arg(short = 'P', long = "poly", allow_hyphen_values = true)]
        poly: String,
    },
    /// Root counts f(p) and g(p)
    Roots {
        #[arg(short = 'P', long = "poly", allow_hyphen_values = true)]
        poly: String,
        #[arg(short = 'p')]
        p: u64,
    },
    /// Densities of the prime classes by root count
    Density {
        #[arg(short = 'P', long = "poly", allow_hyphen_values = true)]
        poly: String,
        #[arg(short = 'X', long = "limit")]
        limit: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<u64>,
    },
    /// prod (1 - d/p) over d < p <= x and its normalization
    Mertens {
        #[arg(short = 'd', default_value_t = 1)]
        d: u64,
        #[arg(short = 'x', long = "limit")]
        limit: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<u64>,
    },
    /// Partial products of G_d, or of G_{d,k} with -P and -k
    Gd {
        #[arg(short = 'd')]
        d: Option<u64>,
        #[arg(short = 'P', long = "poly", allow_hyphen_values = true)]
        poly: Option<String>,
        #[arg(short = 'k')]
        k: Option<usize>,
        #[arg(short = 'x', long = "limit")]
        limit: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<u64>,
    },
    /// Scan phi_P(n) (log log n)^e / n over 16 <= n <= X
    Bound {
        #[arg(short = 'P', long = "poly", allow_hyphen_values = true)]
        poly: String,
        #[arg(short = 'X', long = "limit")]
        limit: u64,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        /// qd-empirical, safe-d, or a number
        #[arg(long, default_value = "qd-empirical")]
        exponent: String,
        /// Keep every stride-th CSV row (the minimizer is always kept)
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// The tail-product inequality chain for one n
    Pi3 {
        #[arg(short = 'P', long = "poly", allow_hyphen_values = true)]
        poly: String,
        #[arg(short = 'n')]
        n: u64,
    },
    /// Oracle and invariant suites at reduced scale
    Selftest,
}

/// Validated settings of a `bound` run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub polynomial: Polynomial,
    pub limit: u64,
    pub epsilon: f64,
    pub exponent_mode: ExponentMode,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub budget: u64,
    pub threads: usize,
    pub force: bool,
}

impl RunConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if self.limit > self.budget {
            return Err(Error::BudgetExceeded {
                limit: self.limit,
                budget: self.budget,
            });
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if self.threads == 0 {
            return Err(Error::InvalidArgument("thread count must be at least 1".into()));
        }
        Ok(())
    }
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = std::result::Result<String, Failure>;

fn parse_poly(text: &str) -> std::result::Result<Polynomial, Failure> {
    text.parse::<Polynomial>().map_err(Failure::from)
}

fn require_irreducible(poly: &Polynomial, force: bool) -> std::result::Result<(), Failure> {
    let verdict = check_irreducible(poly);
    match verdict.status {
        Status::ProvenIrreducible => Ok(()),
        Status::ProvenReducible => Err(Failure::Usage(format!(
            "{} is reducible: {}",
            poly.pretty(),
            verdict.witness.map(|w| w.to_string()).unwrap_or_default()
        ))),
        Status::Unknown if force => Ok(()),
        Status::Unknown => Err(Failure::Usage(format!(
            "could not decide irreducibility of {}; pass --force to proceed",
            poly.pretty()
        ))),
    }
}

fn limits(limit: Option<u64>, checkpoints: &[u64]) -> std::result::Result<Vec<u64>, Failure> {
    match (checkpoints.is_empty(), limit) {
        (false, _) => Ok(checkpoints.to_vec()),
        (true, Some(x)) => Ok(vec![x]),
        (true, None) => Err(Failure::Usage("give a limit or --checkpoints".into())),
    }
}

fn to_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn run_command(cmd: Command, g: &GlobalArgs, threads: usize) -> CmdResult {
    let cfg = SieveConfig::with_budget(g.budget);
    match cmd {
        Command::Phi { poly, n } => {
            let poly = parse_poly(&poly)?;
            if n < 2 {
                return Err(Failure::Usage(format!("n >= 2 required, got {n}")));
            }
            let brute = phi_p_bruteforce(&poly, n)?.value;
            let lemma = phi_p_lemma(&poly, &factorize(n)?)?.value;
            let text = match g.format {
                None => format!("phi_P({n}) = {lemma} (bruteforce={brute}, lemma={lemma})\n"),
                Some(Format::Csv) => format!("n,bruteforce,lemma\n{n},{brute},{lemma}\n"),
                Some(Format::Json) => to_json(&json!({
                    "n": n, "bruteforce": brute, "lemma": lemma, "agree": brute == lemma
                })),
            };
            if brute != lemma {
                return Err(Failure::Check(format!(
                    "{text}mismatch: bruteforce={brute}, lemma={lemma}"
                )));
            }
            Ok(text)
        }
        Command::Delta { poly } => {
            let delta = parse_poly(&poly)?.fixed_divisor()?;
            Ok(match g.format {
                None => format!("{delta}\n"),
                Some(Format::Csv) => format!("delta\n{delta}\n"),
                Some(Format::Json) => to_json(&json!({ "delta": delta })),
            })
        }
        Command::Roots { poly, p } => {
            let rec = classify(&parse_poly(&poly)?, p)?;
            Ok(match g.format {
                None => format!("f={} g={}\n", rec.f, rec.g),
                Some(Format::Csv) => format!(
                    "p,f,g,reduced_degree,ramified\n{},{},{},{},{}\n",
                    rec.p, rec.f, rec.g, rec.reduced_degree, rec.ramified
                ),
                Some(Format::Json) => to_json(&json!(rec)),
            })
        }
        Command::Density { poly, limit, checkpoints } => {
            let poly = parse_poly(&poly)?;
            require_irreducible(&poly, g.force)?;
            let reports = density_trace(&poly, &limits(limit, &checkpoints)?, &cfg)?;
            Ok(match g.format {
                Some(Format::Json) => to_json(&density_json(&reports)),
                _ => density_csv(&reports),
            })
        }
        Command::Mertens { d, limit, checkpoints } => {
            let traces = generalized_trace(d, &limits(limit, &checkpoints)?, &cfg)?;
            Ok(match g.format {
                Some(Format::Json) => to_json(&trace_json(&traces)),
                _ => trace_csv(&traces),
            })
        }
        Command::Gd { d, poly, k, limit, checkpoints } => {
            let xs = limits(limit, &checkpoints)?;
            let traces = match (d, poly, k) {
                (Some(d), None, None) => gd_trace(d, &xs, &cfg)?,
                (None, Some(poly), Some(k)) => {
                    let poly = parse_poly(&poly)?;
                    require_irreducible(&poly, g.force)?;
                    gdk_trace(&poly, k, &xs, &cfg)?
                }
                _ => return Err(Failure::Usage("use either -d D or -P POLY -k K".into())),
            };
            Ok(match g.format {
                Some(Format::Json) => to_json(&trace_json(&traces)),
                _ => trace_csv(&traces),
            })
        }
        Command::Bound { poly, limit, epsilon, exponent, stride } => {
            let config = RunConfig {
                polynomial: parse_poly(&poly)?,
                limit,
                epsilon,
                exponent_mode: exponent.parse()?,
                format: g.format.unwrap_or(Format::Csv),
                out: g.out.clone(),
                budget: g.budget,
                threads,
                force: g.force,
            };
            config.validate()?;
            require_irreducible(&config.polynomial, config.force)?;
            let scan = bound_scan(
                &config.polynomial,
                config.limit,
                config.epsilon,
                config.exponent_mode,
                &cfg,
            )?;
            Ok(match config.format {
                Format::Json => to_json(&bound_json(&scan.report)),
                Format::Csv => bound_csv(&scan.rows, Some(scan.report.argmin), stride),
            })
        }
        Command::Pi3 { poly, n } => {
            let poly = parse_poly(&poly)?;
            let check = pi3_inequality_check(&poly, &factorize(n.max(2))?)?;
            let crossing = envelope_crossing_loglog(poly.degree(), 0.99);
            let text = match g.format {
                None => format!(
                    "n={} pi3={} tail_lower={} envelope={} holds={}\n\
                     envelope reaches 0.99 once log log n >= {}\n",
                    check.n,
                    fmt_float(check.pi3),
                    fmt_float(check.tail_lower),
                    fmt_float(check.envelope),
                    check.holds,
                    fmt_float(crossing)
                ),
                Some(Format::Csv) => format!(
                    "n,pi3,tail_lower,envelope,holds\n{},{},{},{},{}\n",
                    check.n,
                    fmt_float(check.pi3),
                    fmt_float(check.tail_lower),
                    fmt_float(check.envelope),
                    check.holds
                ),
                Some(Format::Json) => to_json(&json!({
                    "check": check,
                    "envelope_099_loglog": crossing,
                })),
            };
            if check.holds {
                Ok(text)
            } else {
                Err(Failure::Check(format!("{text}inequality chain violated")))
            }
        }
        Command::Selftest => selftest(g.seed, &cfg),
    }
}

struct Suite {
    name: &'static str,
    checks: u64,
    failures: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < 5 {
            self.failures.push(what());
        }
    }
}

const SELFTEST_LIMIT: u64 = 10_000;

fn selftest(seed: u64, cfg: &SieveConfig) -> CmdResult {
    let polys = corpus();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut suites = Vec::new();

    let mut s = Suite::new("gamma");
    let gamma = validate_gamma();
    s.check(gamma.is_ok(), || format!("{gamma:?}"));
    suites.push(s);

    let mut s = Suite::new("lemma-oracle");
    for p in &polys {
        let table = phi_p_batch(p, 2000, cfg)?;
        for n in 2..=2000 {
            let brute = phi_p_bruteforce(p, n)?.value;
            let lemma = phi_p_lemma(p, &factorize(n)?)?.value;
            s.check(brute == lemma && lemma == table.get(n), || {
                format!("{p}: n={n} brute={brute} lemma={lemma} batch={}", table.get(n))
            });
        }
    }
    suites.push(s);

    let mut s = Suite::new("classic-totient");
    let table = phi_p_batch(&Polynomial::x(), SELFTEST_LIMIT, cfg)?;
    for n in 2..=SELFTEST_LIMIT {
        let euler = factorize(n)?
            .distinct_primes()
            .fold(n, |acc, p| acc / p * (p - 1));
        s.check(table.get(n) == euler, || format!("n={n}"));
    }
    suites.push(s);

    let mut s = Suite::new("root-oracle");
    let primes = primes_up_to(5000, cfg)?;
    for p in &polys {
        for &q in &primes {
            let (a, b) = (count_distinct_roots_scan(p, q)?, count_distinct_roots_gcd(p, q)?);
            s.check(a == b, || format!("{p} mod {q}: scan={a} gcd={b}"));
        }
    }
    suites.push(s);

    let mut s = Suite::new("density");
    for p in &polys {
        let r = density_trace(p, &[SELFTEST_LIMIT], cfg)?.remove(0);
        let alpha: f64 = r.alpha_hat.iter().sum();
        let recip: f64 = r.recip_sums.iter().sum::<f64>()
            + r.excluded.iter().map(|&q| 1.0 / q as f64).sum::<f64>();
        s.check((alpha - 1.0).abs() < 1e-12, || format!("{p}: sum alpha = {alpha}"));
        s.check((recip - r.recip_total).abs() < 1e-12, || format!("{p}: reciprocal sums"));
        s.check((r.weighted_sum - 1.0).abs() < 0.1, || {
            format!("{p}: weighted sum {}", r.weighted_sum)
        });
    }
    suites.push(s);

    let mut s = Suite::new("pi-decomposition");
    for p in &polys {
        let table = phi_p_batch(p, SELFTEST_LIMIT, cfg)?;
        let delta = p.fixed_divisor()?;
        let lo = crate::bounds::decomposition_threshold(p.degree()).floor() as u64 + 1;
        let mut tested = 0;
        while tested < 200 {
            let n = rng.gen_range(lo..=SELFTEST_LIMIT);
            if crate::polynomial::gcd_u128(n as u128, delta) != 1 {
                continue;
            }
            tested += 1;
            let per_prime: Vec<(u64, u64)> = table
                .factor(n)
                .distinct_primes()
                .map(|q| (q, table.root_count(q)))
                .collect();
            let dec = decompose(n, p.degree(), &per_prime)?;
            s.check(dec.matches_exactly(table.get(n)), || format!("{p}: n={n}"));
            let chain = pi3_from_decomposition(&dec);
            s.check(chain.holds, || format!("{p}: pi3 chain at n={n}"));
        }
    }
    suites.push(s);

    let mut s = Suite::new("bound-scan");
    let x2p1: Polynomial = "1,0,1".parse().expect("literal");
    let qd = bound_scan(&x2p1, SELFTEST_LIMIT, 0.1, ExponentMode::QdEmpirical, cfg)?.report;
    let safe = bound_scan(&x2p1, SELFTEST_LIMIT, 0.1, ExponentMode::SafeD, cfg)?.report;
    s.check(qd.min_ratio > 0.0 && !qd.flagged, || format!("min ratio {}", qd.min_ratio));
    s.check(safe.min_ratio >= qd.min_ratio, || {
        format!("safe-d {} < qd {}", safe.min_ratio, qd.min_ratio)
    });
    suites.push(s);

    let mut out = format!("{:<18} {:>8}  status\n", "suite", "checks");
    let mut failed = false;
    for s in &suites {
        let status = if s.failures.is_empty() { "ok" } else { "FAILED" };
        failed |= !s.failures.is_empty();
        out.push_str(&format!("{:<18} {:>8}  {status}\n", s.name, s.checks));
        for f in &s.failures {
            out.push_str(&format!("    {f}\n"));
        }
    }
    if failed {
        Err(Failure::Check(out))
    } else {
        Ok(out)
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    let threads = cli.global.threads.unwrap_or_else(|| {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    });
    if threads == 0 {
        let _ = writeln!(stderr, "error: thread count must be at least 1");
        return 2;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker threads: {e}");
            return 2;
        }
    };
    let global = cli.global;
    let command = cli.command;
    let result = pool.install(|| run_command(command, &global, threads));
    let (text, code) = match result {
        Ok(text) => (text, 0),
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return 2;
        }
        Err(Failure::Check(text)) => (text, 1),
    };
    match &global.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => {
            let _ = write!(stdout, "{text}");
        }
    }
    if code == 1 {
        let _ = writeln!(stderr, "check failed");
    }
    code
}
