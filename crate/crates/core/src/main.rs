use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use residue_det::claims::{check_prime, verify_lemma_2_1_random, Case, CheckReport, ClaimId, ClaimScope, VerifyConfig};
use residue_det::curves::{CurveCounts, CurveFamily};
use residue_det::matrix::DetConfig;
use residue_det::modular::{kth_power_residues, PrimeModulus};
use residue_det::sweep::{
    exit_code, read_jsonl, run_sweep, sort_records, truncate_digits, write_csv, write_jsonl, Format, Record,
    SweepConfig, DEFAULT_MUS,
};
use residue_det::{Error, Result};

const USAGE_EXIT: u8 = 2;

#[derive(Parser)]
#[command(name = "residue-det", version, about = "Verify determinant identities for k-th power residue matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check claims for a single prime (and optionally one k).
    Verify(VerifyArgs),
    /// Check claims over a range of primes in parallel.
    Sweep(SweepArgs),
    /// Print the curve traces a, b, c, d for one (p, k).
    Counts(CountsArgs),
    /// Convert a JSONL results file into canonically sorted CSV or JSONL.
    Export(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Jsonl,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Jsonl => Format::Jsonl,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Args)]
struct Caps {
    /// Largest p for claims needing exact determinants.
    #[arg(long, default_value_t = 600)]
    exact_cap: u64,
    /// Largest p for claims decided modulo p.
    #[arg(long, default_value_t = 3000)]
    modp_cap: u64,
    /// Largest p for the (p-1)-square reciprocal matrix B_p.
    #[arg(long, default_value_t = 200)]
    bp_cap: u64,
    /// Largest p for Carlitz characteristic polynomials.
    #[arg(long, default_value_t = 31)]
    carlitz_cap: u64,
    /// Matrix size from which exact determinants switch from Bareiss to CRT.
    #[arg(long, default_value_t = DetConfig::default().crt_threshold)]
    crt_threshold: usize,
}

impl Caps {
    fn config(&self) -> Result<VerifyConfig> {
        if self.crt_threshold == 0 {
            return Err(Error::Config("crt-threshold must be at least 1".into()));
        }
        Ok(VerifyConfig {
            det: DetConfig { crt_threshold: self.crt_threshold },
            exact_cap: self.exact_cap,
            modp_cap: self.modp_cap,
            bp_cap: self.bp_cap,
            carlitz_cap: self.carlitz_cap,
        })
    }
}

#[derive(Args)]
struct Shared {
    /// Comma-separated claim ids or groups (THM_A, THM_B, COR_1, SUN, ALL).
    #[arg(long)]
    claims: Option<String>,
    /// Seed for the random circulant factorization check.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Number of random circulants to factor.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Values of mu for the Carlitz check.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = DEFAULT_MUS)]
    mu: Vec<i64>,
    /// Output file; JSONL is appended, CSV is overwritten.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Jsonl)]
    format: FormatArg,
    #[command(flatten)]
    caps: Caps,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    k: Option<u64>,
    /// Trust that p is prime and skip the Miller-Rabin test. Results for
    /// composite p are meaningless.
    #[arg(long)]
    skip_primality_check: bool,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 3)]
    p_min: u64,
    #[arg(long)]
    p_max: u64,
    /// Restrict (p, k) claims to these k.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<u64>>,
    /// Worker threads.
    #[arg(long, env = "RESIDUE_DET_JOBS", default_value_t = 1)]
    jobs: usize,
    /// Write elapsed_ms as 0 so outputs are byte-reproducible.
    #[arg(long)]
    no_timing: bool,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Args)]
struct CountsArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    k: u64,
    /// Trust that p is prime and skip the Miller-Rabin test.
    #[arg(long)]
    skip_primality_check: bool,
}

#[derive(Args)]
struct ExportArgs {
    /// JSONL file produced by verify or sweep.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Errors in the request itself map to exit code 2; everything else is a
/// runtime failure.
enum Failure {
    Usage(Error),
    Runtime(Error),
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e)
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Sweep(a) => sweep(a),
        Command::Counts(a) => counts(a),
        Command::Export(a) => export(a),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE_EXIT)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn modulus(p: u64, skip_check: bool) -> std::result::Result<PrimeModulus, Failure> {
    if skip_check { PrimeModulus::new_unchecked(p) } else { PrimeModulus::new(p) }.map_err(usage)
}

fn parse_claims(s: Option<&str>) -> std::result::Result<Vec<ClaimId>, Failure> {
    match s {
        Some(s) => {
            let claims = ClaimId::parse_list(s).map_err(usage)?;
            if claims.is_empty() {
                return Err(usage(Error::Config("no claims selected".into())));
            }
            Ok(claims)
        }
        None => Ok(ClaimId::ALL.to_vec()),
    }
}

fn verify(a: VerifyArgs) -> std::result::Result<i32, Failure> {
    let p = modulus(a.p, a.skip_primality_check)?;
    let cfg = a.shared.caps.config().map_err(usage)?;
    let explicit = a.shared.claims.is_some();
    let mut claims = parse_claims(a.shared.claims.as_deref())?;
    if let Some(k) = a.k {
        // Surface k < 2 and k not dividing p - 1 as input errors.
        kth_power_residues(p, k).map_err(usage)?;
    } else if explicit {
        if let Some(c) = claims.iter().find(|c| c.scope() == ClaimScope::Case) {
            return Err(usage(Error::Config(format!("--k is required for {c}"))));
        }
    } else {
        claims.retain(|c| c.scope() != ClaimScope::Case);
    }

    let case = a.k.map(|k| Case::new(p, k, &cfg));
    let mut reports: Vec<CheckReport> = Vec::new();
    for claim in claims {
        match claim.scope() {
            ClaimScope::Case => reports.push(case.as_ref().expect("k checked above").check(claim)),
            ClaimScope::Prime => {
                let mus: &[i64] = if claim == ClaimId::CarlitzFmu { &a.shared.mu } else { &[0] };
                reports.extend(mus.iter().map(|&mu| check_prime(claim, p, mu, &cfg)));
            }
            ClaimScope::Global => reports.push(verify_lemma_2_1_random(a.shared.seed, a.shared.trials)),
        }
    }

    let mut stdout = io::stdout().lock();
    for r in &reports {
        writeln!(stdout, "{}", render_report(r))?;
    }
    let mut records: Vec<Record> = reports.iter().map(|r| Record::from_report(r, true)).collect();
    sort_records(&mut records);
    if let Some(path) = &a.shared.out {
        match a.shared.format.into() {
            Format::Jsonl => {
                write_jsonl(&records, File::options().create(true).append(true).open(path)?)?;
            }
            Format::Csv => write_csv(&records, File::create(path)?)?,
        }
    }
    let worst = reports.iter().map(|r| r.status).max();
    Ok(worst.map(exit_code).unwrap_or(0))
}

fn render_report(r: &CheckReport) -> String {
    let witnesses: Vec<String> =
        r.witnesses.iter().map(|(k, v)| format!("{k}={}", truncate_digits(&v.to_string()))).collect();
    let mut line = format!("{:<18} {:<5} p={} k={}", r.claim.as_str(), r.status.as_str(), r.p, r.k);
    if let Some(g) = r.g {
        line += &format!(" g={g}");
    }
    if !witnesses.is_empty() {
        line += &format!("  {}", witnesses.join(" "));
    }
    if let Some(note) = &r.note {
        line += &format!("  [{note}]");
    }
    line
}

fn sweep(a: SweepArgs) -> std::result::Result<i32, Failure> {
    let mut cfg = SweepConfig::new(a.p_min, a.p_max);
    cfg.ks = a.k;
    cfg.claims = parse_claims(a.shared.claims.as_deref())?;
    cfg.jobs = a.jobs;
    cfg.out = a.shared.out;
    cfg.format = a.shared.format.into();
    cfg.seed = a.shared.seed;
    cfg.trials = a.shared.trials;
    cfg.mus = a.shared.mu;
    cfg.verify = a.shared.caps.config().map_err(usage)?;
    cfg.timing = !a.no_timing;
    cfg.validate().map_err(usage)?;
    let outcome = run_sweep(&cfg)?;
    if cfg.out.is_none() {
        write_jsonl(&outcome.records, io::stdout().lock())?;
    }
    eprint!("{}", outcome.summary.render());
    Ok(outcome.summary.exit_code())
}

fn counts(a: CountsArgs) -> std::result::Result<i32, Failure> {
    let p = modulus(a.p, a.skip_primality_check)?;
    let rs = kth_power_residues(p, a.k).map_err(usage)?;
    let fast = CurveCounts::compute(&rs);
    let naive = CurveCounts::compute_naive(&rs);
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "p={} k={} m={} g={}", p, rs.k(), rs.m(), fast.g_used)?;
    let mut agree = true;
    for family in CurveFamily::ALL {
        let (Some(x), y) = (fast.get(family), naive.get(family)) else { continue };
        let ok = Some(x) == y;
        agree &= ok;
        writeln!(
            stdout,
            "{family:?}: trace={x} naive={} {}",
            y.unwrap_or_default(),
            if ok { "ok" } else { "MISMATCH" }
        )?;
    }
    if let Some(s) = fast.c2_plus_d2() {
        writeln!(stdout, "c^2+d^2={s}")?;
    }
    Ok(if agree { 0 } else { 3 })
}

fn export(a: ExportArgs) -> std::result::Result<i32, Failure> {
    let mut records = read_jsonl(&a.input)?;
    sort_records(&mut records);
    let sink: Box<dyn Write> = match &a.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    match a.format.into() {
        Format::Csv => write_csv(&records, sink)?,
        Format::Jsonl => write_jsonl(&records, sink)?,
    }
    Ok(0)
}
