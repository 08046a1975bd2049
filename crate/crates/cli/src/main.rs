//! `leech24`: expansions, certificates and evaluations from the command line.
//!
//! Exit codes: 0 on success, 1 when a certificate fails or a computation
//! errors, 2 on usage errors.

mod report;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use leech24_core::forms::{FormCatalog, FORM_NAMES};
use leech24_core::magic::{self, FKind, Which};
use leech24_core::real::Real;
use leech24_core::HalfExp;
use rayon::prelude::*;
use serde_json::json;

pub use report::CertificateReport;

const DEFAULT_ORDER: i64 = 60;
const MIN_CERT_ORDER: i64 = 10;

#[derive(Parser, Debug)]
#[command(name = "leech24", version, about = "Exact expansions, Sturm certificates and magic-function values")]
struct Cli {
    /// Truncation order, e.g. `q60` or `60`.
    #[arg(long, global = true, env = "LEECH24_ORDER", value_parser = parse_order)]
    order: Option<i64>,

    /// Decimal digits for numerical evaluation.
    #[arg(long, global = true, default_value_t = 30, value_parser = clap::value_parser!(u32).range(10..=200))]
    digits: u32,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for independent computations.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the exact q-expansion of a form through q^order.
    Expand {
        /// One of E2, E4, E6, Delta, Th00_4, Th01_4, Th10_4, phi, Phi1, Phi2, psiI, psiS, psiT.
        form: String,
    },
    /// Run the identity checks, bounds, tail check and all certificates.
    Certify,
    /// Evaluate a, b, f or fhat at radii given by --r or --grid.
    Eval {
        #[arg(value_parser = ["a", "b", "f", "fhat"])]
        which: String,
        /// A radius such as `1.5`, `sqrt(2)` or `2*sqrt(3)`; repeatable.
        #[arg(long = "r", allow_hyphen_values = true)]
        r: Vec<String>,
        /// `start:stop:count`, endpoints included.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Print the table of exact special values.
    Values,
}

/// Resolved settings shared by all subcommands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub order: HalfExp,
    pub digits: u32,
    pub out: Option<PathBuf>,
    pub jobs: usize,
}

/// A usage error, reported with exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(Usage(msg.into()))
}

fn parse_order(s: &str) -> Result<i64, String> {
    let t = s.trim();
    let digits = t.strip_prefix("q^").or_else(|| t.strip_prefix('q')).unwrap_or(t);
    let n: i64 = digits.parse().map_err(|_| format!("cannot parse order `{s}`; use e.g. q60 or 60"))?;
    if n < 1 {
        return Err(format!("order must be at least q1, got `{s}`"));
    }
    Ok(n)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let config = RunConfig {
        order: HalfExp::q(cli.order.unwrap_or(DEFAULT_ORDER)),
        digits: cli.digits,
        out: cli.out.clone(),
        jobs: cli.jobs.max(1),
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.jobs).build()?;
    pool.install(|| match cli.command {
        Command::Expand { form } => cmd_expand(&form, &config, cli.format.unwrap_or(Format::Text)),
        Command::Certify => cmd_certify(&config, cli.format.unwrap_or(Format::Json)),
        Command::Eval { which, r, grid } => {
            cmd_eval(&which, &r, grid.as_deref(), &config, cli.format.unwrap_or(Format::Csv))
        }
        Command::Values => cmd_values(&config, cli.format.unwrap_or(Format::Text)),
    })
}

fn emit(config: &RunConfig, text: &str) -> anyhow::Result<()> {
    match &config.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn resolve_form(name: &str) -> anyhow::Result<&'static str> {
    let norm = |s: &str| s.to_lowercase().replace(['_', '-'], "");
    let wanted = norm(name);
    FORM_NAMES
        .iter()
        .find(|f| norm(f) == wanted || norm(f.trim_end_matches("_4")) == wanted)
        .copied()
        .ok_or_else(|| usage(format!("unknown form `{name}`; known forms: {}", FORM_NAMES.join(", "))))
}

fn cmd_expand(form: &str, config: &RunConfig, format: Format) -> anyhow::Result<u8> {
    let name = resolve_form(form)?;
    // `--order N` shows every term through q^N
    let catalog = FormCatalog::build(config.order + HalfExp::q(1))?;
    let series = catalog.get(name)?;
    let text = match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&json!({ "form": name, "series": series.to_json() }))?),
        Format::Csv => {
            let mut s = String::from("exponent,coefficient\n");
            for (e, c) in series.body.terms() {
                s.push_str(&format!("{e},{}\n", leech24_core::series::fmt_rat(c)));
            }
            s
        }
        Format::Text => {
            let mut factors = Vec::new();
            if series.i_power == 1 {
                factors.push("i".to_string());
            }
            if series.pi_power != 0 {
                factors.push(format!("π^{}", series.pi_power));
            }
            let prefix = if factors.is_empty() { String::new() } else { format!("{}·", factors.join("·")) };
            if prefix.is_empty() {
                format!("{name} = {}\n", series.body)
            } else {
                format!("{name} = {prefix}({})\n", series.body)
            }
        }
    };
    emit(config, &text)?;
    Ok(0)
}

fn cmd_certify(config: &RunConfig, format: Format) -> anyhow::Result<u8> {
    let n = config.order.twice() / 2;
    if n < MIN_CERT_ORDER {
        return Err(usage(format!("certification needs order at least q{MIN_CERT_ORDER}, got q{n}")));
    }
    let fault = std::env::var("LEECH24_FAULT_INJECT").ok();
    let report = report::build(config, fault.as_deref())?;
    let text = match format {
        Format::Json | Format::Csv => format!("{}\n", serde_json::to_string_pretty(&report.to_json())?),
        Format::Text => report.to_text(),
    };
    emit(config, &text)?;
    if !report.ok() {
        eprint!("{}", report.failure_transcript());
    }
    Ok(if report.ok() { 0 } else { 1 })
}

fn parse_grid(spec: &str, prec: u32) -> anyhow::Result<Vec<Real>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!("grid `{spec}` must be start:stop:count")));
    }
    let start = magic::parse_radius(parts[0], prec).map_err(|e| usage(e.to_string()))?;
    let stop = magic::parse_radius(parts[1], prec).map_err(|e| usage(e.to_string()))?;
    let count: usize = parts[2].parse().map_err(|_| usage(format!("bad grid count `{}`", parts[2])))?;
    if count == 0 || (count == 1 && start != stop) {
        return Err(usage("grid count must be at least 2 unless start equals stop"));
    }
    if stop < start {
        return Err(usage("grid stop lies below start"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = &(&stop - &start) / &Real::from_int(count as i64 - 1, prec);
    Ok((0..count).map(|i| &start + &(&step * &Real::from_int(i as i64, prec))).collect())
}

enum Target {
    Magic(Which),
    F(FKind),
}

fn cmd_eval(which: &str, rs: &[String], grid: Option<&str>, config: &RunConfig, format: Format) -> anyhow::Result<u8> {
    let target = match which {
        "a" => Target::Magic(Which::A),
        "b" => Target::Magic(Which::B),
        "f" => Target::F(FKind::F),
        "fhat" => Target::F(FKind::FHat),
        other => return Err(usage(format!("unknown function `{other}`"))),
    };
    let prec = magic::working_prec(config.digits);
    let mut radii = Vec::new();
    for r in rs {
        radii.push(magic::parse_radius(r, prec).map_err(|e| usage(e.to_string()))?);
    }
    if let Some(g) = grid {
        radii.extend(parse_grid(g, prec)?);
    }
    if radii.is_empty() {
        return Err(usage("give at least one --r or a --grid"));
    }
    let digits = config.digits;
    let values: Vec<magic::BallValue> = radii
        .par_iter()
        .map(|r| match target {
            Target::Magic(w) => magic::eval_magic(w, r, digits),
            Target::F(k) => magic::eval_f(k, r, digits),
        })
        .collect::<Result<_, _>>()
        .map_err(|e| anyhow!(e))?;
    let d = digits as usize;
    let text = match format {
        Format::Csv => {
            let mut s = format!("r,{which},{which}_radius,rigor\n");
            for (r, v) in radii.iter().zip(&values) {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    r.to_sci(d.min(20)),
                    v.mid.to_sci(d),
                    v.radius.to_sci(3),
                    v.rigor.as_str()
                ));
            }
            s
        }
        Format::Json => {
            let rows: Vec<_> = radii
                .iter()
                .zip(&values)
                .map(|(r, v)| json!({ "r": r.to_sci(d.min(20)), which: v.to_json(d) }))
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&rows)?)
        }
        Format::Text => radii
            .iter()
            .zip(&values)
            .map(|(r, v)| format!("{which}({}) = {v}\n", r.to_sci(d.min(20))))
            .collect(),
    };
    emit(config, &text)?;
    Ok(0)
}

fn cmd_values(config: &RunConfig, format: Format) -> anyhow::Result<u8> {
    let rows = report::value_rows(config.digits)?;
    let text = match format {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(
                &rows
                    .iter()
                    .map(|r| json!({ "name": r.name, "value": r.value, "provenance": r.provenance, "numeric": r.numeric }))
                    .collect::<Vec<_>>()
            )?
        ),
        Format::Csv => {
            let mut s = String::from("name,value,provenance,numeric\n");
            for r in &rows {
                s.push_str(&format!("\"{}\",\"{}\",{},{}\n", r.name, r.value, r.provenance, r.numeric));
            }
            s
        }
        Format::Text => {
            let width = rows.iter().map(|r| r.name.chars().count()).max().unwrap_or(0);
            rows.iter()
                .map(|r| {
                    let pad = " ".repeat(width - r.name.chars().count());
                    format!("{}{pad}  {} ({})  ≈ {}\n", r.name, r.value, r.provenance, r.numeric)
                })
                .collect()
        }
    };
    emit(config, &text)?;
    Ok(0)
}
