//! `lehmer-lab` command line.
//!
//! Exit codes: 0 success, 1 failed check or I/O error, 2 invalid input,
//! 3 work budget exceeded.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lehmer_core::analysis::{fit_exponent, Family, DEFAULT_SEED};
use lehmer_core::counting::ProblemSpec;
use lehmer_core::expsum::{exp_sum_crt, lemma_normalizer, ExpSumArgs};
use lehmer_core::ntcore::{build_crt_plan, Modulus};

use crate::checks::{self, CheckOutcome};
use crate::output::{
    fmt_sig, read_scan_csv, to_json, write_scan_csv, CheckDoc, CheckLine, ComplexValue, CountDoc, ExpSumDoc, FitDoc,
    Meta, ParityDoc, ScanDoc,
};
use crate::par::Workers;
use crate::scan::{scan_family, Problem, ScanConfig, DEFAULT_WORK_BUDGET};
use crate::{Error, Result};

pub const SEED_ENV: &str = "LEHMER_LAB_SEED";

const AFTER_HELP: &str = "\
Vector flags (--k, --m, --a, --lambda) take comma-separated integers. Negative
entries use a leading minus with no space, e.g. --k 1,-1 or --k=-2,1.

The default seed is 0xC0FFEE; LEHMER_LAB_SEED overrides it when --seed is absent.";

#[derive(Debug, Parser)]
#[command(
    name = "lehmer-lab",
    version,
    about = "Exact Lehmer-type counts, sparse exponential sums and error-term scans"
)]
#[command(after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count N_q(m, a; k) and compare with phi(q) / (m_1 ... m_s).
    Count {
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        vectors: Vectors,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate the exponential sum over the units modulo q.
    Expsum {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        k: IntList,
        #[arg(long, allow_hyphen_values = true)]
        lambda: IntList,
        /// Also evaluate through the prime-power factorization of q.
        #[arg(long)]
        crt: bool,
        #[command(flatten)]
        common: Common,
    },
    /// How often n^k and its inverse n^(-k) share parity, for odd q.
    Parity {
        #[arg(long)]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep a family of moduli and report count, main term and error per modulus.
    Scan {
        #[command(flatten)]
        scan: ScanArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Least-squares fit of ln|E| against ln q, over a fresh scan or a scan CSV.
    Fit {
        #[command(flatten)]
        scan: ScanArgs,
        /// Read records from a scan CSV instead of scanning.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run verification batteries and print one pass/fail line per battery.
    Check {
        /// Orthogonality identity for every l up to --l-max.
        #[arg(long)]
        identities: bool,
        /// Geometric-sum bound ratios for l up to --l-max.
        #[arg(long)]
        bounds: bool,
        /// Direct counting against the congruence-system count.
        #[arg(long)]
        oracle: bool,
        /// Cell sums over all residue vectors equal phi(q).
        #[arg(long)]
        partition: bool,
        /// Direct against CRT-factored exponential sums.
        #[arg(long)]
        crt: bool,
        /// Kloosterman sums modulo primes against 2 sqrt(q).
        #[arg(long)]
        weil: bool,
        /// Exact closing estimate on the products of U_j.
        #[arg(long = "u-bounds")]
        u_bounds: bool,
        /// All of the above.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 200)]
        l_max: u64,
        /// Instances per randomized battery (defaults per battery).
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
struct Vectors {
    #[arg(long, allow_hyphen_values = true)]
    k: IntList,
    #[arg(long, allow_hyphen_values = true)]
    m: IntList,
    #[arg(long, allow_hyphen_values = true)]
    a: IntList,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Prime)]
    family: FamilyArg,
    #[arg(long)]
    q_min: Option<u64>,
    #[arg(long)]
    q_max: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<IntList>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<IntList>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<IntList>,
    /// Scan the same-parity problem for (k, -k) using the first entry of --k.
    #[arg(long)]
    parity: bool,
    /// Random coefficient vectors per modulus for the exponential-sum ratio.
    #[arg(long, default_value_t = 0)]
    samples: usize,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = Format::Pretty)]
    format: Format,
    /// Write data to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
    /// Maximum estimated modular operations before refusing to run.
    #[arg(long, default_value_t = DEFAULT_WORK_BUDGET)]
    work_budget: f64,
    /// Report 0 for every timing field so output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Prime,
    Odd,
    All,
    PrimePower,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Prime => Family::Prime,
            FamilyArg::Odd => Family::Odd,
            FamilyArg::All => Family::All,
            FamilyArg::PrimePower => Family::PrimePower,
        }
    }
}

/// Comma-separated integer vector.
#[derive(Debug, Clone, PartialEq, Eq)]
struct IntList(Vec<i64>);

impl FromStr for IntList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|_| format!("'{t}' is not an integer")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(IntList)
    }
}

impl IntList {
    fn unsigned(&self, flag: &str) -> Result<Vec<u64>> {
        self.0
            .iter()
            .map(|&x| u64::try_from(x).map_err(|_| Error::Invalid(format!("--{flag} entries must be nonnegative"))))
            .collect()
    }
}

struct Ctx {
    seed: u64,
    workers: Workers,
    format: Format,
    timing: bool,
    started: Instant,
}

impl Ctx {
    fn meta(&self) -> Meta {
        let wall = if self.timing {
            self.started.elapsed().as_secs_f64()
        } else {
            0.0
        };
        Meta::new(self.seed, wall)
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => {
            let v = v.trim();
            let parsed = match v.strip_prefix("0x").or_else(|| v.strip_prefix("0X")) {
                Some(hex) => u64::from_str_radix(hex, 16),
                None => v.parse(),
            };
            parsed.map_err(|_| Error::Invalid(format!("{SEED_ENV}='{v}' is not an unsigned integer")))
        }
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn spec_from(k: &IntList, m: &IntList, a: &IntList) -> Result<ProblemSpec> {
    if k.0.len() != m.0.len() || k.0.len() != a.0.len() {
        return Err(Error::Invalid(format!(
            "vector lengths disagree: --k has {}, --m has {}, --a has {}",
            k.0.len(),
            m.0.len(),
            a.0.len()
        )));
    }
    Ok(ProblemSpec::new(k.0.clone(), m.unsigned("m")?, a.0.clone())?)
}

fn describe(e: &Error) -> String {
    match e {
        Error::Core(lehmer_core::Error::ZeroExponent { index }) => {
            format!("k contains zero component (position {index}): exponents must be nonzero")
        }
        other => other.to_string(),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::RangeTooLarge { .. } => 3,
        Error::Core(_) | Error::Invalid(_) => 2,
        _ => 1,
    }
}

/// Parse `argv` (including the program name) and run. Data goes to `out`
/// unless `--out` names a file; diagnostics go to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", describe(&e));
            exit_code(&e)
        }
    }
}

fn common_of(cmd: &Command) -> &Common {
    match cmd {
        Command::Count { common, .. }
        | Command::Expsum { common, .. }
        | Command::Parity { common, .. }
        | Command::Scan { common, .. }
        | Command::Fit { common, .. }
        | Command::Check { common, .. } => common,
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let common = common_of(&cli.command);
    let ctx = Ctx {
        seed: resolve_seed(common.seed)?,
        workers: Workers::new(common.jobs as usize)?,
        format: common.format,
        timing: !common.no_timing,
        started: Instant::now(),
    };
    let mut buf: Vec<u8> = Vec::new();
    let code = match &cli.command {
        Command::Count { q, vectors, .. } => cmd_count(&ctx, *q, vectors, &mut buf)?,
        Command::Expsum { q, k, lambda, crt, .. } => cmd_expsum(&ctx, *q, k, lambda, *crt, &mut buf)?,
        Command::Parity { q, k, .. } => cmd_parity(&ctx, *q, *k, &mut buf)?,
        Command::Scan { scan, common } => cmd_scan(&ctx, scan, common.work_budget, &mut buf, err)?,
        Command::Fit { scan, input, common } => cmd_fit(&ctx, scan, input.as_ref(), common.work_budget, &mut buf, err)?,
        Command::Check { .. } => cmd_check(&ctx, &cli.command, &mut buf)?,
    };
    match &common.out {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            f.write_all(&buf)?;
            f.flush()?;
        }
        None => out.write_all(&buf)?,
    }
    Ok(code)
}

fn cmd_count(ctx: &Ctx, q: u64, v: &Vectors, out: &mut Vec<u8>) -> Result<i32> {
    let spec = spec_from(&v.k, &v.m, &v.a)?;
    let modulus = Modulus::new(q)?;
    let report = ctx.workers.count_report(&modulus, &spec)?;
    let doc = CountDoc::new(&report, ctx.meta());
    match ctx.format {
        Format::Json => writeln!(out, "{}", to_json(&doc)?)?,
        Format::Csv => {
            writeln!(out, "q,k,m,a,N,main,error,abs_error")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                doc.q,
                join(spec.k()),
                join(spec.m()),
                join(spec.a()),
                doc.count,
                fmt_sig(doc.main),
                fmt_sig(doc.error),
                fmt_sig(doc.abs_error)
            )?
        }
        Format::Pretty => {
            writeln!(out, "q = {}  phi(q) = {}", q, modulus.phi())?;
            writeln!(out, "k = {:?}  m = {:?}  a = {:?}", spec.k(), spec.m(), spec.a())?;
            writeln!(out, "N = {}", doc.count)?;
            writeln!(out, "main term = {} ({})", doc.main_exact, fmt_sig(doc.main))?;
            writeln!(out, "error = {}", fmt_sig(doc.error))?;
            match doc.normalized_exponent {
                Some(e) => writeln!(out, "ln|E| / ln q = {}", fmt_sig(e))?,
                None => writeln!(out, "|E| < 1 (negligible)")?,
            }
            if !doc.coprime {
                writeln!(
                    out,
                    "note: some m_j shares a factor with q; the asymptotic formula does not apply"
                )?;
            }
            if doc.oversized_progression {
                writeln!(out, "note: some m_j >= q")?;
            }
        }
    }
    Ok(0)
}

fn join(v: &[impl ToString]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
}

fn cmd_expsum(ctx: &Ctx, q: u64, k: &IntList, lambda: &IntList, crt: bool, out: &mut Vec<u8>) -> Result<i32> {
    let modulus = Modulus::new(q)?;
    let args = ExpSumArgs::new(modulus.clone(), k.0.clone(), lambda.0.clone())?;
    let direct = ctx.workers.exp_sum_direct(&args);
    let crt_sum = if crt {
        Some(exp_sum_crt(&args, &build_crt_plan(&modulus))?)
    } else {
        None
    };
    let lemma_ratio = lemma_normalizer(&args).ok().map(|n| direct.abs() / n);
    let doc = ExpSumDoc {
        q,
        k: args.exponents().to_vec(),
        lambda: args.coefficients().to_vec(),
        gcd_class: args.gcd_class(),
        terms: direct.terms,
        direct: ComplexValue {
            re: direct.re,
            im: direct.im,
            abs: direct.abs(),
        },
        crt: crt_sum.map(|c| ComplexValue {
            re: c.re,
            im: c.im,
            abs: c.abs(),
        }),
        lemma_ratio,
        meta: ctx.meta(),
    };
    match ctx.format {
        Format::Json => writeln!(out, "{}", to_json(&doc)?)?,
        Format::Csv => {
            writeln!(out, "q,k,lambda,d,terms,re,im,abs,crt_re,crt_im,lemma_ratio")?;
            let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
            writeln!(
                out,
                "{q},{},{},{},{},{:e},{:e},{:e},{},{},{}",
                join(&doc.k),
                join(&doc.lambda),
                doc.gcd_class.map(|d| d.to_string()).unwrap_or_default(),
                doc.terms,
                doc.direct.re,
                doc.direct.im,
                doc.direct.abs,
                opt(doc.crt.as_ref().map(|c| c.re)),
                opt(doc.crt.as_ref().map(|c| c.im)),
                opt(doc.lemma_ratio)
            )?
        }
        Format::Pretty => {
            writeln!(
                out,
                "S = {} + {}i  (|S| = {}, {} terms)",
                fmt_sig(doc.direct.re),
                fmt_sig(doc.direct.im),
                fmt_sig(doc.direct.abs),
                doc.terms
            )?;
            if let Some(c) = &doc.crt {
                writeln!(out, "CRT product = {} + {}i", fmt_sig(c.re), fmt_sig(c.im))?;
            }
            match (doc.gcd_class, doc.lemma_ratio) {
                (Some(d), Some(r)) => writeln!(out, "d = {d}  |S| / (d^(1/s) q^(1-1/s)) = {}", fmt_sig(r))?,
                _ => writeln!(out, "all coefficients zero")?,
            }
        }
    }
    Ok(0)
}

fn cmd_parity(ctx: &Ctx, q: u64, k: i64, out: &mut Vec<u8>) -> Result<i32> {
    let report = ctx.workers.parity_report(&Modulus::new(q)?, k)?;
    let doc = ParityDoc {
        report,
        meta: ctx.meta(),
    };
    let r = &doc.report;
    match ctx.format {
        Format::Json => writeln!(out, "{}", to_json(&doc)?)?,
        Format::Csv => {
            writeln!(out, "q,k,both_even,both_odd,same_parity,main,error")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.q,
                r.k,
                r.both_even,
                r.both_odd,
                r.same_parity,
                fmt_sig(r.main.to_f64()),
                fmt_sig(r.error)
            )?;
        }
        Format::Pretty => {
            writeln!(out, "q = {}  k = {}", r.q, r.k)?;
            writeln!(
                out,
                "both even = {}  both odd = {}  same parity = {}",
                r.both_even, r.both_odd, r.same_parity
            )?;
            writeln!(out, "phi(q)/2 = {}  error = {}", r.main, fmt_sig(r.error))?;
        }
    }
    Ok(0)
}

fn scan_config(ctx: &Ctx, s: &ScanArgs, budget: f64) -> Result<ScanConfig> {
    let q_min = s.q_min.ok_or_else(|| Error::Invalid("--q-min is required".into()))?;
    let q_max = s.q_max.ok_or_else(|| Error::Invalid("--q-max is required".into()))?;
    if q_min > q_max {
        return Err(Error::Invalid(format!("--q-min {q_min} exceeds --q-max {q_max}")));
    }
    let k = s.k.as_ref().ok_or_else(|| Error::Invalid("--k is required".into()))?;
    let problem = if s.parity {
        let k0 = *k.0.first().ok_or_else(|| Error::Invalid("--k is empty".into()))?;
        if k0 == 0 {
            return Err(Error::Core(lehmer_core::Error::ZeroExponent { index: 0 }));
        }
        Problem::Parity { k: k0 }
    } else {
        let m =
            s.m.as_ref()
                .ok_or_else(|| Error::Invalid("--m is required unless --parity is set".into()))?;
        let a =
            s.a.as_ref()
                .ok_or_else(|| Error::Invalid("--a is required unless --parity is set".into()))?;
        Problem::Count {
            spec: spec_from(k, m, a)?,
        }
    };
    Ok(ScanConfig {
        family: s.family.into(),
        q_min,
        q_max,
        problem,
        samples: s.samples,
        seed: ctx.seed,
        work_budget: budget,
        timing: ctx.timing,
    })
}

fn cmd_scan(ctx: &Ctx, s: &ScanArgs, budget: f64, out: &mut Vec<u8>, err: &mut dyn Write) -> Result<i32> {
    let cfg = scan_config(ctx, s, budget)?;
    let result = scan_family(&ctx.workers, &cfg)?;
    for skip in &result.skipped {
        writeln!(err, "skipped q={}: {}", skip.q, skip.reason)?;
    }
    match ctx.format {
        Format::Csv => write_scan_csv(&mut *out, &result.records)?,
        Format::Json => {
            let doc = ScanDoc {
                problem: cfg.problem,
                family: cfg.family,
                q_min: cfg.q_min,
                q_max: cfg.q_max,
                records: result.records,
                skipped: result.skipped,
                meta: ctx.meta(),
            };
            writeln!(out, "{}", to_json(&doc)?)?;
        }
        Format::Pretty => {
            writeln!(
                out,
                "{:>10} {:>10} {:>10} {:>16} {:>14}",
                "q", "phi", "N", "main", "error"
            )?;
            for r in &result.records {
                writeln!(
                    out,
                    "{:>10} {:>10} {:>10} {:>16} {:>14}",
                    r.q,
                    r.phi,
                    r.count,
                    fmt_sig(r.main),
                    fmt_sig(r.error)
                )?;
            }
        }
    }
    Ok(0)
}

fn cmd_fit(
    ctx: &Ctx,
    s: &ScanArgs,
    input: Option<&PathBuf>,
    budget: f64,
    out: &mut Vec<u8>,
    err: &mut dyn Write,
) -> Result<i32> {
    let records = match input {
        Some(path) => read_scan_csv(File::open(path)?)?,
        None => {
            let result = scan_family(&ctx.workers, &scan_config(ctx, s, budget)?)?;
            writeln!(
                err,
                "scanned {} moduli ({} skipped)",
                result.records.len(),
                result.skipped.len()
            )?;
            result.records
        }
    };
    let fit = fit_exponent(&records)?;
    let doc = FitDoc {
        fit,
        records: records.len(),
        meta: ctx.meta(),
    };
    match ctx.format {
        Format::Json => writeln!(out, "{}", to_json(&doc)?)?,
        Format::Csv => {
            writeln!(out, "slope,intercept,r_squared,n_points,filtered_zero_errors")?;
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_sig(fit.slope),
                fmt_sig(fit.intercept),
                fmt_sig(fit.r_squared),
                fit.n_points,
                fit.filtered_zero_errors
            )?;
        }
        Format::Pretty => {
            writeln!(
                out,
                "slope = {}  intercept = {}  r^2 = {}",
                fmt_sig(fit.slope),
                fmt_sig(fit.intercept),
                fmt_sig(fit.r_squared)
            )?;
            writeln!(
                out,
                "{} points used, {} with |E| < 1 excluded",
                fit.n_points, fit.filtered_zero_errors
            )?;
        }
    }
    Ok(0)
}

fn cmd_check(ctx: &Ctx, cmd: &Command, out: &mut Vec<u8>) -> Result<i32> {
    let Command::Check {
        identities,
        bounds,
        oracle,
        partition,
        crt,
        weil,
        u_bounds,
        all,
        l_max,
        samples,
        ..
    } = cmd
    else {
        unreachable!("cmd_check called with another subcommand")
    };
    if *l_max == 0 {
        return Err(Error::Invalid("--l-max must be at least 1".into()));
    }
    let any = *identities || *bounds || *oracle || *partition || *crt || *weil || *u_bounds;
    let pick = |flag: bool| flag || *all || !any;
    let n = |default: usize| samples.unwrap_or(default);
    let w = &ctx.workers;
    let mut results: Vec<CheckOutcome> = Vec::new();
    if pick(*identities) {
        results.push(checks::orthogonality(*l_max));
    }
    if pick(*bounds) {
        results.push(checks::geometric_bounds((*l_max).max(3))?);
    }
    if pick(*oracle) {
        results.push(checks::oracle_equivalence(w, ctx.seed, n(200), 2000)?);
    }
    if pick(*partition) {
        results.push(checks::partition_identity(w, ctx.seed, n(50), 500)?);
    }
    if pick(*crt) {
        results.push(checks::crt_agreement(w, ctx.seed, n(300), 10_000)?);
    }
    if pick(*weil) {
        results.push(checks::weil(w, ctx.seed, 2000, n(10))?);
    }
    if pick(*u_bounds) {
        results.push(checks::closing_estimate(ctx.seed, n(100), 10_000)?);
    }
    let ok = results.iter().all(CheckOutcome::ok);
    match ctx.format {
        Format::Json => {
            let checks = results
                .iter()
                .map(|r| CheckLine {
                    name: r.name.into(),
                    passed: r.passed,
                    total: r.total,
                })
                .collect();
            writeln!(
                out,
                "{}",
                to_json(&CheckDoc {
                    checks,
                    meta: ctx.meta()
                })?
            )?;
        }
        Format::Csv => {
            for r in &results {
                out.write_all(r.csv.as_bytes())?;
            }
        }
        Format::Pretty => {
            for r in &results {
                writeln!(out, "{}", r.summary())?;
            }
        }
    }
    Ok(if ok { 0 } else { 1 })
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
