//! `seqlab`: generate sequences, compute complexity profiles, run verifiers,
//! reproduce tables and run conjecture scans.
//!
//! Exit codes: 0 success, 1 a verifier or table row failed, 2 usage or input
//! error.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use seqlab::adic::{
    adic_min, adic_oracle_with_bound, connection, phi2, phi2_symmetric, ADIC_ORACLE_BOUND,
};
use seqlab::maxorder::{moc_oracle_with_bound, moc_periodic, moc_profile, MOC_ORACLE_BOUND};
use seqlab::measures::{correlation2, expansion_complexity, linear_profile, Expansion};
use seqlab::numtheory;
use seqlab::relations::{
    conjecture_scan, reports_to_csv, reports_to_json, reproduce_table, run_all, run_claim,
    Status, VerifyOptions, CLAIM_IDS, DEFAULT_GRID_RATIO, DEFAULT_SCAN_C,
};
use seqlab::seqcore::write_bits;
use seqlab::seqspec::{parse_seqspec, SeqSpec};

const ORACLE_ENV: &str = "SEQLAB_ORACLE_BOUNDS";

#[derive(Parser)]
#[command(name = "seqlab", version, about = "Complexity measures of binary sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Write the first N terms as a bit file.
    Generate {
        #[arg(long)]
        seq: String,
        #[arg(long, visible_alias = "nmax")]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-prefix table of the requested measures.
    Analyze {
        #[arg(long)]
        seq: String,
        #[arg(long, visible_alias = "nmax")]
        n: usize,
        /// Comma-separated: moc, adic, linear, correlation, expansion,
        /// moc-oracle, adic-oracle.
        #[arg(long, default_value = "moc,adic,linear")]
        measures: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Period, connection integer, 2-adic, maximum-order and linear
    /// complexity of a periodic sequence.
    Periodic {
        #[arg(long)]
        seq: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verifier by claim id, or `all`.
    Verify {
        claim: String,
        #[arg(long = "exhaustive-T")]
        exhaustive_t: Option<usize>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute a reference table and diff it against the expected values.
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare log2 mu(N) with N/2 on a grid of prefix lengths.
    Scan {
        #[arg(long)]
        seq: String,
        #[arg(long, visible_alias = "n")]
        nmax: usize,
        #[arg(long, default_value_t = DEFAULT_SCAN_C)]
        c: f64,
        #[arg(long, default_value_t = DEFAULT_GRID_RATIO)]
        grid_ratio: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure categories mapped to exit codes.
enum Failure {
    Usage(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn spec(text: &str) -> Result<SeqSpec, Failure> {
    parse_seqspec(text).map_err(|e| usage(format!("--seq {text}: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Measure {
    Moc,
    Adic,
    Linear,
    Correlation,
    Expansion,
    MocOracle,
    AdicOracle,
}

impl Measure {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "moc" => Measure::Moc,
            "adic" => Measure::Adic,
            "linear" => Measure::Linear,
            "correlation" => Measure::Correlation,
            "expansion" => Measure::Expansion,
            "moc-oracle" => Measure::MocOracle,
            "adic-oracle" => Measure::AdicOracle,
            _ => return None,
        })
    }

    fn columns(self) -> &'static [&'static str] {
        match self {
            Measure::Moc => &["moc"],
            Measure::Adic => &["mu", "log2_mu"],
            Measure::Linear => &["linear"],
            Measure::Correlation => &["c2"],
            Measure::Expansion => &["expansion"],
            Measure::MocOracle => &["moc_oracle"],
            Measure::AdicOracle => &["mu_oracle"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct OracleBounds {
    moc: usize,
    adic: usize,
}

/// Parses `moc=N,adic=N` from the environment; missing keys keep defaults.
fn oracle_bounds() -> Result<OracleBounds, Failure> {
    let mut bounds = OracleBounds {
        moc: MOC_ORACLE_BOUND,
        adic: ADIC_ORACLE_BOUND,
    };
    let Ok(text) = std::env::var(ORACLE_ENV) else {
        return Ok(bounds);
    };
    for item in text.split(',').filter(|s| !s.is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| usage(format!("{ORACLE_ENV}: expected key=value, found '{item}'")))?;
        let value: usize = value
            .parse()
            .map_err(|_| usage(format!("{ORACLE_ENV}: bad number '{value}'")))?;
        match key {
            "moc" => bounds.moc = value,
            "adic" if value < 63 => bounds.adic = value,
            "adic" => return Err(usage(format!("{ORACLE_ENV}: adic bound must be below 63"))),
            _ => return Err(usage(format!("{ORACLE_ENV}: unknown key '{key}'"))),
        }
    }
    Ok(bounds)
}

#[derive(Serialize)]
struct AnalyzeRow {
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    moc: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    log2_mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    linear: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c2: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expansion: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    moc_oracle: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu_oracle: Option<String>,
}

impl AnalyzeRow {
    fn cells(&self, measures: &[Measure]) -> Vec<String> {
        let mut cells = vec![self.n.to_string()];
        let opt = |v: &Option<usize>| v.map_or(String::new(), |x| x.to_string());
        for m in measures {
            match m {
                Measure::Moc => cells.push(opt(&self.moc)),
                Measure::Adic => {
                    cells.push(self.mu.clone().unwrap_or_default());
                    cells.push(self.log2_mu.map_or(String::new(), |x| format!("{x:.6}")));
                }
                Measure::Linear => cells.push(opt(&self.linear)),
                Measure::Correlation => {
                    cells.push(self.c2.map_or(String::new(), |x| x.to_string()))
                }
                Measure::Expansion => cells.push(opt(&self.expansion)),
                Measure::MocOracle => cells.push(opt(&self.moc_oracle)),
                Measure::AdicOracle => cells.push(self.mu_oracle.clone().unwrap_or_default()),
            }
        }
        cells
    }
}

fn parse_measures(text: &str) -> Result<Vec<Measure>, Failure> {
    let mut measures = Vec::new();
    for name in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let m = Measure::parse(name).ok_or_else(|| usage(format!("unknown measure '{name}'")))?;
        measures.push(m);
    }
    if measures.is_empty() {
        return Err(usage("--measures is empty"));
    }
    measures.sort();
    measures.dedup();
    Ok(measures)
}

fn analyze(seq: &str, n: usize, measures: &str, format: Format) -> Result<String, Failure> {
    let measures = parse_measures(measures)?;
    let bounds = oracle_bounds()?;
    if measures.contains(&Measure::MocOracle) && n > bounds.moc {
        return Err(usage(format!(
            "moc-oracle limited to N <= {} (raise with {ORACLE_ENV}=moc=...)",
            bounds.moc
        )));
    }
    if measures.contains(&Measure::AdicOracle) && n > bounds.adic {
        return Err(usage(format!(
            "adic-oracle limited to N <= {} (raise with {ORACLE_ENV}=adic=...)",
            bounds.adic
        )));
    }
    let spec = spec(seq)?;
    let w = spec.word(n).map_err(usage)?;
    let has = |m: Measure| measures.contains(&m);
    let moc = has(Measure::Moc).then(|| moc_profile(&w));
    let linear = (has(Measure::Linear) || has(Measure::Expansion)).then(|| linear_profile(&w));
    let rows: Vec<AnalyzeRow> = (1..=n)
        .map(|k| {
            let prefix = w.prefix(k);
            let mu = has(Measure::Adic).then(|| adic_min(&w, k).mu);
            let l = linear.as_ref().map(|p| *p.at(k));
            AnalyzeRow {
                n: k,
                moc: moc.as_ref().map(|p| *p.at(k)),
                log2_mu: mu.as_ref().map(numtheory::log2),
                mu: mu.map(|m| m.to_string()),
                linear: l.filter(|_| has(Measure::Linear)),
                c2: has(Measure::Correlation)
                    .then(|| correlation2(&prefix).ok().map(|(c, _)| c))
                    .flatten(),
                expansion: has(Measure::Expansion).then(|| {
                    let l = l.expect("computed with expansion");
                    match expansion_complexity(&w, k, (l + 1).min(k + 2 - l)) {
                        Expansion::Degree { degree, .. } => degree,
                        Expansion::AboveBound => unreachable!("E <= min(L+1, N+2-L)"),
                    }
                }),
                moc_oracle: has(Measure::MocOracle).then(|| {
                    moc_oracle_with_bound(&prefix, bounds.moc)
                        .expect("length checked")
                        .m
                }),
                mu_oracle: has(Measure::AdicOracle).then(|| {
                    adic_oracle_with_bound(&w, k, bounds.adic)
                        .expect("length checked")
                        .mu
                        .to_string()
                }),
            }
        })
        .collect();
    Ok(match format {
        Format::Json => json(&serde_json::json!({ "seq": spec.to_string(), "rows": rows })),
        Format::Csv => {
            let mut header = vec!["N"];
            for m in &measures {
                header.extend_from_slice(m.columns());
            }
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record(&header).map_err(io::Error::from)?;
            for r in &rows {
                wtr.write_record(r.cells(&measures)).map_err(io::Error::from)?;
            }
            let body = String::from_utf8(wtr.into_inner().map_err(|e| e.into_error())?)
                .expect("utf-8");
            format!(
                "# seqlab analyze v1: {} seq={}\n{body}",
                header.join(","),
                spec
            )
        }
    })
}

fn json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct PeriodicReport {
    seq: String,
    period: String,
    t: usize,
    a: String,
    q: String,
    phi2: f64,
    phi2_symmetric: f64,
    m: usize,
    l: usize,
}

fn periodic(seq: &str, format: Format) -> Result<String, Failure> {
    let spec = spec(seq)?;
    let s = spec
        .period()
        .map_err(usage)?
        .ok_or_else(|| usage(format!("{spec} is not periodic")))?;
    let rep = connection(&s);
    let t = s.len();
    let l = *linear_profile(&s.unroll(2 * t)).last().expect("t >= 1");
    let report = PeriodicReport {
        seq: spec.to_string(),
        period: s.period().to_string(),
        t,
        a: rep.a.to_string(),
        q: rep.q.to_string(),
        phi2: phi2(&s).log2(),
        phi2_symmetric: phi2_symmetric(&s).log2(),
        m: moc_periodic(&s),
        l,
    };
    Ok(match format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record(["T", "A", "q", "phi2", "phi2_symmetric", "M", "L", "period"])
                .map_err(io::Error::from)?;
            wtr.write_record([
                report.t.to_string(),
                report.a.clone(),
                report.q.clone(),
                format!("{:.6}", report.phi2),
                format!("{:.6}", report.phi2_symmetric),
                report.m.to_string(),
                report.l.to_string(),
                report.period.clone(),
            ])
            .map_err(io::Error::from)?;
            let body = String::from_utf8(wtr.into_inner().map_err(|e| e.into_error())?)
                .expect("utf-8");
            format!(
                "# seqlab periodic v1: T,A,q,phi2,phi2_symmetric,M,L,period seq={}\n{body}",
                report.seq
            )
        }
    })
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Generate { seq, n, out } => {
            let w = spec(&seq)?.word(n).map_err(usage)?;
            let mut buf = Vec::new();
            write_bits(&w, &mut buf)?;
            emit(&out, &String::from_utf8(buf).expect("ascii"))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze {
            seq,
            n,
            measures,
            format,
            out,
        } => {
            emit(&out, &analyze(&seq, n, &measures, format)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Periodic { seq, format, out } => {
            emit(&out, &periodic(&seq, format)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            claim,
            exhaustive_t,
            format,
            out,
        } => {
            let opts = VerifyOptions {
                exhaustive_t,
                ..VerifyOptions::default()
            };
            let reports = if claim == "all" {
                run_all(&opts)
            } else {
                run_claim(&claim, &opts).ok_or_else(|| {
                    usage(format!(
                        "unknown claim '{claim}'; expected one of: all, {}",
                        CLAIM_IDS.join(", ")
                    ))
                })?
            };
            let text = match format {
                Format::Csv => reports_to_csv(&reports),
                Format::Json => {
                    let mut s = reports_to_json(&reports);
                    s.push('\n');
                    s
                }
            };
            emit(&out, &text)?;
            let failed: Vec<_> = reports.iter().filter(|r| r.failed()).collect();
            for r in &failed {
                eprintln!(
                    "FAILED {} {}: {}",
                    r.claim_id,
                    r.instance,
                    r.evidence_text()
                );
            }
            Ok(if failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Tables { which, format, out } => {
            let table = reproduce_table(which).expect("range-checked by clap");
            let text = match format {
                Format::Csv => table.to_csv(),
                Format::Json => {
                    let mut s = table.to_json();
                    s.push('\n');
                    s
                }
            };
            emit(&out, &text)?;
            for r in table.mismatches() {
                eprintln!("MISMATCH q={}", r.q);
            }
            Ok(if table.all_match() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Scan {
            seq,
            nmax,
            c,
            grid_ratio,
            format,
            out,
        } => {
            if grid_ratio.is_nan() || grid_ratio <= 1.0 {
                return Err(usage("--grid-ratio must exceed 1"));
            }
            if c.is_nan() || c < 0.0 {
                return Err(usage("--c must be non-negative"));
            }
            let spec = spec(&seq)?;
            let report = conjecture_scan(&spec, nmax, c, grid_ratio).map_err(usage)?;
            let text = match format {
                Format::Csv => report.to_csv(),
                Format::Json => {
                    let mut s = report.to_json();
                    s.push('\n');
                    s
                }
            };
            emit(&out, &text)?;
            eprintln!(
                "scan {}: {} (report only), max |deviation| {:.6}",
                report.spec,
                if report.status == Status::Pass {
                    "within bound"
                } else {
                    "outside bound"
                },
                report.max_abs_deviation()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("seqlab: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("seqlab: {e}");
            ExitCode::from(2)
        }
    }
}
