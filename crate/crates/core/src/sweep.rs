//! Parallel sweeps over prime ranges, the line-oriented record format and
//! CSV export.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Duration;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::claims::{
    check_prime, verify_lemma_2_1_random, Case, CheckReport, ClaimId, ClaimScope, Status, VerifyConfig,
};
use crate::error::{Error, Result};
use crate::modular::{divisors, is_prime, PrimeModulus};

/// Big integers longer than this many digits are truncated in CSV cells.
pub const CSV_DIGIT_LIMIT: usize = 40;

pub const DEFAULT_MUS: [i64; 4] = [-1, 0, 1, 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Csv,
}

/// One output line. Witnesses are decimal strings so that arbitrarily large
/// integers survive JSON round trips.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub p: u64,
    pub k: u64,
    pub claim: ClaimId,
    pub status: String,
    pub witnesses: BTreeMap<String, String>,
    pub elapsed_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Record {
    pub fn from_report(r: &CheckReport, timing: bool) -> Self {
        Record {
            p: r.p,
            k: r.k,
            claim: r.claim,
            status: r.status.as_str().to_string(),
            witnesses: r.witnesses.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
            elapsed_ms: if timing { r.elapsed.as_millis() as u64 } else { 0 },
            g: r.g,
            note: r.note.clone(),
        }
    }

    pub fn to_report(&self) -> Result<CheckReport> {
        let witnesses = self
            .witnesses
            .iter()
            .map(|(k, v)| {
                v.parse::<BigInt>()
                    .map(|b| (k.clone(), b))
                    .map_err(|_| Error::Config(format!("witness {k} = {v:?} is not an integer")))
            })
            .collect::<Result<_>>()?;
        Ok(CheckReport {
            claim: self.claim,
            p: self.p,
            k: self.k,
            status: self.status.parse()?,
            note: self.note.clone(),
            witnesses,
            elapsed: Duration::from_millis(self.elapsed_ms),
            g: self.g,
        })
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }
}

/// Canonical order: `(p, k, claim)`, ties broken by the serialized line.
pub fn sort_records(records: &mut [Record]) {
    records.sort_by_cached_key(|r| (r.p, r.k, r.claim, r.to_json_line()));
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub p_min: u64,
    pub p_max: u64,
    /// Restrict per-(p, k) claims to these `k`; `None` means every divisor.
    pub ks: Option<Vec<u64>>,
    pub claims: Vec<ClaimId>,
    pub jobs: usize,
    /// Records are appended here as they complete.
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub trials: usize,
    pub mus: Vec<i64>,
    pub verify: VerifyConfig,
    /// When false, `elapsed_ms` is written as 0 so outputs are reproducible.
    pub timing: bool,
}

impl SweepConfig {
    pub fn new(p_min: u64, p_max: u64) -> Self {
        SweepConfig {
            p_min,
            p_max,
            ks: None,
            claims: ClaimId::ALL.to_vec(),
            jobs: 1,
            out: None,
            format: Format::Jsonl,
            seed: 42,
            trials: 1000,
            mus: DEFAULT_MUS.to_vec(),
            verify: VerifyConfig::default(),
            timing: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p_min > self.p_max {
            return Err(Error::Config(format!("p-min {} exceeds p-max {}", self.p_min, self.p_max)));
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        if self.claims.is_empty() {
            return Err(Error::Config("no claims selected".into()));
        }
        if let Some(k) = self.ks.iter().flatten().find(|&&k| k < 2) {
            return Err(Error::DegenerateK(*k));
        }
        if self.verify.det.crt_threshold == 0 {
            return Err(Error::Config("crt-threshold must be at least 1".into()));
        }
        Ok(())
    }
}

/// A unit of parallel work.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Task {
    Case { p: u64, k: u64, claims: Vec<ClaimId> },
    Prime { p: u64, claims: Vec<ClaimId> },
    Lemma,
}

impl Task {
    /// Rough cost used to start expensive work first.
    fn weight(&self) -> u64 {
        match self {
            Task::Case { p, k, .. } => (p / k).pow(3),
            Task::Prime { p, .. } => p.pow(3),
            Task::Lemma => 1 << 20,
        }
    }
}

/// Whether `claim` says anything about `(p, k)`. Inadmissible pairs are left
/// out of sweeps instead of being recorded as SKIP.
pub fn admissible(claim: ClaimId, p: u64, k: u64) -> bool {
    let m = (p - 1).checked_div(k).unwrap_or(0);
    match claim {
        ClaimId::ThmAI | ClaimId::ThmC => k.is_multiple_of(2) && m % 2 == 1,
        ClaimId::ThmAII => k.is_multiple_of(2) && m.is_multiple_of(2),
        ClaimId::ThmBI => k % 2 == 1 && p % 4 == 1,
        ClaimId::ThmBII => k % 2 == 1 && p % 4 == 3,
        ClaimId::Cor2 => k % 2 == 1,
        ClaimId::Cor1I | ClaimId::Cor1II | ClaimId::RemarkPrimeList => k == 3 && p % 12 == 1,
        ClaimId::SunAp => p % 4 == 3,
        ClaimId::SunBp => p % 3 == 2,
        ClaimId::SunS1p | ClaimId::CarlitzFmu | ClaimId::Lemma21 => true,
    }
}

pub fn plan(cfg: &SweepConfig) -> Vec<Task> {
    let mut tasks = Vec::new();
    let by_scope = |s| cfg.claims.iter().copied().filter(move |c| c.scope() == s);
    for p in (cfg.p_min.max(3)..=cfg.p_max).filter(|&p| p % 2 == 1 && is_prime(p)) {
        for k in divisors(p - 1) {
            if k < 2 || cfg.ks.as_ref().is_some_and(|ks| !ks.contains(&k)) {
                continue;
            }
            let claims: Vec<_> = by_scope(ClaimScope::Case).filter(|&c| admissible(c, p, k)).collect();
            if !claims.is_empty() {
                tasks.push(Task::Case { p, k, claims });
            }
        }
        let claims: Vec<_> = by_scope(ClaimScope::Prime).filter(|&c| admissible(c, p, 0)).collect();
        if !claims.is_empty() {
            tasks.push(Task::Prime { p, claims });
        }
    }
    if cfg.claims.contains(&ClaimId::Lemma21) {
        tasks.push(Task::Lemma);
    }
    tasks.sort_by_key(|t| std::cmp::Reverse(t.weight()));
    tasks
}

pub fn run_task(task: &Task, cfg: &SweepConfig) -> Vec<CheckReport> {
    match task {
        Task::Case { p, k, claims } => {
            let p = PrimeModulus::new_unchecked(*p).expect("planned primes are odd");
            let case = Case::new(p, *k, &cfg.verify);
            claims.iter().map(|&c| case.check(c)).collect()
        }
        Task::Prime { p, claims } => {
            let p = PrimeModulus::new_unchecked(*p).expect("planned primes are odd");
            claims
                .iter()
                .flat_map(|&c| {
                    let mus: &[i64] = if c == ClaimId::CarlitzFmu { &cfg.mus } else { &[0] };
                    mus.iter().map(move |&mu| check_prime(c, p, mu, &cfg.verify))
                })
                .collect()
        }
        Task::Lemma => vec![verify_lemma_2_1_random(cfg.seed, cfg.trials)],
    }
}

/// Per-claim status counts plus the headline findings of a run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub counts: BTreeMap<ClaimId, BTreeMap<Status, usize>>,
    /// Primes `p = 1 (mod 12)` seen with `p | det W_p(3)`.
    pub dividing_primes: BTreeSet<u64>,
}

impl Summary {
    pub fn from_records(records: &[Record]) -> Result<Self> {
        let mut s = Summary::default();
        for r in records {
            let status: Status = r.status.parse()?;
            *s.counts.entry(r.claim).or_default().entry(status).or_default() += 1;
            if matches!(r.claim, ClaimId::Cor1II | ClaimId::RemarkPrimeList)
                && r.witnesses.get("p_divides_det").is_some_and(|v| v == "1")
            {
                s.dividing_primes.insert(r.p);
            }
        }
        Ok(s)
    }

    pub fn worst(&self) -> Option<Status> {
        self.counts.values().flat_map(|m| m.keys().copied()).max()
    }

    pub fn exit_code(&self) -> i32 {
        exit_code(self.worst().unwrap_or(Status::Pass))
    }

    /// Fixed-width table of claims against statuses.
    pub fn render(&self) -> String {
        let order = [Status::Pass, Status::Fail, Status::Skip, Status::Fatal];
        let mut out = format!("{:<18}", "claim");
        for st in order {
            out += &format!("{:>8}", st.as_str());
        }
        out.push('\n');
        for (claim, m) in &self.counts {
            out += &format!("{:<18}", claim.as_str());
            for st in order {
                out += &format!("{:>8}", m.get(&st).copied().unwrap_or(0));
            }
            out.push('\n');
        }
        let primes: Vec<String> = self.dividing_primes.iter().map(u64::to_string).collect();
        out += &format!(
            "primes p = 1 (mod 12) with p | det W_p(3): {}\n",
            if primes.is_empty() { "none".to_string() } else { primes.join(", ") }
        );
        out
    }
}

pub fn exit_code(worst: Status) -> i32 {
    match worst {
        Status::Pass | Status::Skip => 0,
        Status::Fail => 1,
        Status::Fatal => 3,
    }
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    /// Canonically sorted.
    pub records: Vec<Record>,
    pub summary: Summary,
}

/// Runs every planned task on a pool of `cfg.jobs` threads. JSONL output is
/// appended line by line as results arrive; CSV is written once at the end
/// in canonical order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    let tasks = plan(cfg);
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build().map_err(|e| Error::Config(e.to_string()))?;

    let mut sink = match (&cfg.out, cfg.format) {
        (Some(path), Format::Jsonl) => Some(BufWriter::new(OpenOptions::new().create(true).append(true).open(path)?)),
        _ => None,
    };
    let (tx, rx) = mpsc::channel::<Vec<CheckReport>>();
    let records = std::thread::scope(|scope| -> Result<Vec<Record>> {
        let writer = scope.spawn(move || -> Result<Vec<Record>> {
            let mut records = Vec::new();
            for batch in rx {
                for report in batch {
                    let rec = Record::from_report(&report, cfg.timing);
                    if let Some(w) = sink.as_mut() {
                        writeln!(w, "{}", rec.to_json_line())?;
                    }
                    records.push(rec);
                }
                if let Some(w) = sink.as_mut() {
                    w.flush()?;
                }
            }
            Ok(records)
        });
        pool.install(|| {
            tasks.par_iter().for_each_with(tx, |tx, task| {
                // The receiver only disappears if the writer failed; that
                // error is reported below.
                let _ = tx.send(run_task(task, cfg));
            })
        });
        writer.join().expect("writer thread panicked")
    })?;

    let mut records = records;
    sort_records(&mut records);
    if let (Some(path), Format::Csv) = (&cfg.out, cfg.format) {
        write_csv(&records, File::create(path)?)?;
    }
    let summary = Summary::from_records(&records)?;
    Ok(SweepOutcome { records, summary })
}

pub fn read_jsonl(path: &Path) -> Result<Vec<Record>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

pub fn write_jsonl(records: &[Record], w: impl Write) -> Result<()> {
    let mut w = BufWriter::new(w);
    for r in records {
        writeln!(w, "{}", r.to_json_line())?;
    }
    w.flush()?;
    Ok(())
}

/// Shortens integers beyond [`CSV_DIGIT_LIMIT`] digits, keeping the leading
/// digits and stating the full length.
pub fn truncate_digits(v: &str) -> String {
    let digits = v.trim_start_matches('-');
    if digits.len() <= CSV_DIGIT_LIMIT {
        return v.to_string();
    }
    let sign = if v.starts_with('-') { "-" } else { "" };
    format!("{sign}{}...[overflow: {} digits]", &digits[..CSV_DIGIT_LIMIT], digits.len())
}

/// Fixed columns, then one column per witness name seen in any record.
pub fn write_csv(records: &[Record], w: impl Write) -> Result<()> {
    let names: BTreeSet<&str> = records.iter().flat_map(|r| r.witnesses.keys().map(String::as_str)).collect();
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["p", "k", "claim", "status", "g", "elapsed_ms", "note"];
    header.extend(names.iter().copied());
    out.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.p.to_string(),
            r.k.to_string(),
            r.claim.as_str().to_string(),
            r.status.clone(),
            r.g.map(|g| g.to_string()).unwrap_or_default(),
            r.elapsed_ms.to_string(),
            r.note.clone().unwrap_or_default(),
        ];
        row.extend(names.iter().map(|n| r.witnesses.get(*n).map(|v| truncate_digits(v)).unwrap_or_default()));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}
