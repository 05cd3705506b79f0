//! Command-line harness over the incidence lab.
//!
//! Exit codes: 0 when every verdict holds, 2 when some bound is violated (a
//! genuine counter-finding), 1 on configuration or budget errors. Progress
//! goes to standard error; standard output carries reports when `--out -`.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use incidence_lab::cayley;
use incidence_lab::error::LabError;
use incidence_lab::ffield::FieldDescriptor;
use incidence_lab::harness::{self, ExperimentConfig, Suite};
use incidence_lab::incidence::{self, SampleStrategy};
use incidence_lab::polyspace::{PolySpace, SupportDescriptor};
use incidence_lab::report::{write_csv_summary, write_jsonl, VerdictRow};
use incidence_lab::Budget;

#[derive(Parser)]
#[command(name = "labcli", about = "Cayley color graph incidence laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(clap::Args, Clone, Debug)]
struct FieldArgs {
    /// Field order q = p^s; mutually exclusive with --p/--s.
    #[arg(long, conflicts_with_all = ["p", "s"])]
    q: Option<u64>,
    /// Characteristic.
    #[arg(long)]
    p: Option<u32>,
    /// Extension degree.
    #[arg(long, default_value_t = 1)]
    s: u32,
    /// Modulus coefficients, constant first, overriding the built-in table.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
}

impl FieldArgs {
    fn descriptor(&self) -> Result<FieldDescriptor, LabError> {
        let (p, s) = match (self.q, self.p) {
            (Some(q), None) => factor_prime_power(q)?,
            (None, Some(p)) => (p, self.s),
            _ => {
                return Err(LabError::InvalidParameter(
                    "give either --q or --p (with optional --s)".into(),
                ))
            }
        };
        Ok(FieldDescriptor {
            p,
            s,
            modulus: self.modulus.clone(),
        })
    }
}

fn factor_prime_power(q: u64) -> Result<(u32, u32), LabError> {
    if q < 2 {
        return Err(LabError::InvalidParameter("q must be at least 2".into()));
    }
    let mut p = 2u64;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut s = 0u32;
            let mut n = q;
            while n.is_multiple_of(p) {
                n /= p;
                s += 1;
            }
            if n != 1 {
                return Err(LabError::InvalidParameter(format!(
                    "{q} is not a prime power"
                )));
            }
            return Ok((p as u32, s));
        }
        p += 1;
    }
    Ok((q as u32, 1))
}

fn parse_support(text: &str) -> Result<SupportDescriptor, LabError> {
    if text.trim_start().starts_with('{') {
        serde_json::from_str(text)
            .map_err(|e| LabError::InvalidParameter(format!("bad support JSON: {e}")))
    } else {
        Ok(SupportDescriptor::Preset(text.to_string()))
    }
}

#[derive(Subcommand)]
enum Commands {
    /// Run verification suites over a grid of spaces.
    Verify {
        /// Experiment config (JSON); the built-in grid when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Suites to run, overriding the config.
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u32>,
        /// Report path stem (writes PATH.jsonl and PATH.csv), or `-`.
        #[arg(long, default_value = "-")]
        out: String,
        /// Stdout format when --out -.
        #[arg(long, value_enum, default_value_t = Format::Jsonl)]
        format: Format,
        /// Cap on q^dim enumeration size.
        #[arg(long)]
        budget_elems: Option<u64>,
    },
    /// Print a space: field, support, dimensions, star verdict, prediction.
    Describe {
        #[command(flatten)]
        field: FieldArgs,
        /// Support descriptor: `full:m,r`, `x1-shifted:m,r`, or JSON.
        support: String,
    },
    /// Compute a Cayley color graph spectrum: either the incidence graph of
    /// a polynomial space, or an imported connection function.
    Spectrum {
        #[command(flatten)]
        field: FieldArgs,
        /// Support descriptor; required unless --group/--table are given.
        support: Option<String>,
        /// Group descriptor JSON, e.g. `{"kind":"vector","p":3,"n":2}` or
        /// `{"kind":"product","orders":[4,6]}`.
        #[arg(long, requires = "table", conflicts_with = "support")]
        group: Option<String>,
        /// Connection function as a JSON array: integers, floats, or
        /// [re, im] pairs, one entry per group element.
        #[arg(long, requires = "group")]
        table: Option<String>,
        #[arg(long)]
        budget_elems: Option<u64>,
    },
    /// Scan incidence-sum concentration over sampled families.
    TauScan {
        #[command(flatten)]
        field: FieldArgs,
        support: String,
        /// Strategies to sample; all four when omitted.
        #[arg(long = "strategy")]
        strategies: Vec<String>,
        /// Family sizes, comma separated; powers of q when omitted.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<u64>>,
        #[arg(long, default_value_t = 5)]
        trials: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        budget_elems: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, LabError> {
    match cli.command {
        Commands::Verify {
            config,
            suites,
            seed,
            trials,
            out,
            format,
            budget_elems,
        } => {
            let mut cfg: ExperimentConfig = match config {
                Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
                None => harness::default_config(),
            };
            if !suites.is_empty() {
                cfg.suites = suites
                    .iter()
                    .map(|s| Suite::parse(s))
                    .collect::<Result<_, _>>()?;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(trials) = trials {
                cfg.trials = trials;
            }
            if let Some(max) = budget_elems {
                cfg.budgets.max_space = max;
            }
            let outcome = harness::execute(&cfg)?;
            emit_rows(&outcome.rows, &out, format)?;
            eprintln!(
                "[labcli] {} verdicts, {}",
                outcome.rows.len(),
                if outcome.all_hold {
                    "all hold"
                } else {
                    "VIOLATIONS FOUND"
                }
            );
            Ok(if outcome.all_hold {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Commands::Describe { field, support } => {
            let text = harness::describe(
                &field.descriptor()?,
                &parse_support(&support)?,
                Budget::default(),
            )?;
            print!("{text}");
            Ok(ExitCode::SUCCESS)
        }
        Commands::Spectrum {
            field,
            support,
            group,
            table,
            budget_elems,
        } => {
            let mut budget = Budget::default();
            if let Some(max) = budget_elems {
                budget.max_space = max;
                budget.max_spectrum = max;
            }
            let doc = match (support, group, table) {
                (Some(support), None, None) => {
                    let ctx = std::sync::Arc::new(field.descriptor()?.build()?);
                    let space = PolySpace::new(ctx, parse_support(&support)?.build()?, budget)?;
                    let conn = incidence::incidence_connection(&space)?;
                    let report = cayley::spectrum(&conn, &budget)?;
                    let star = space.has_property_star();
                    json!({
                        "field": format!("GF({})", space.q()),
                        "support": support,
                        "dim": space.dim(),
                        "size": space.size(),
                        "star": star.describe(),
                        "lambda": report.lambda,
                        "trivial": report.trivial.as_integer().map(|n| n.to_string()),
                        "multiset": multiset_json(&report),
                        "predicted": if star.holds() {
                            json!(incidence::predicted_spectrum_multiset(&space))
                        } else {
                            json!(null)
                        },
                    })
                }
                (None, Some(group), Some(table)) => {
                    let conn = parse_connection(&group, &table)?;
                    let report = cayley::spectrum(&conn, &budget)?;
                    json!({
                        "group": conn.group(),
                        "order": conn.order(),
                        "hermitian": conn.is_hermitian(),
                        "lambda": report.lambda,
                        "trivial": report.trivial.as_integer().map(|n| n.to_string()),
                        "multiset": multiset_json(&report),
                    })
                }
                _ => {
                    return Err(LabError::InvalidParameter(
                        "give either a support descriptor or --group with --table".into(),
                    ))
                }
            };
            println!("{doc}");
            Ok(ExitCode::SUCCESS)
        }
        Commands::TauScan {
            field,
            support,
            strategies,
            sizes,
            trials,
            seed,
            budget_elems,
        } => {
            let mut budget = Budget::default();
            if let Some(max) = budget_elems {
                budget.max_space = max;
            }
            let ctx = std::sync::Arc::new(field.descriptor()?.build()?);
            let space = PolySpace::new(ctx, parse_support(&support)?.build()?, budget)?;
            let conn = incidence::incidence_connection(&space)?;
            let strategies = if strategies.is_empty() {
                SampleStrategy::ALL.to_vec()
            } else {
                strategies
                    .iter()
                    .map(|s| SampleStrategy::parse(s))
                    .collect::<Result<_, _>>()?
            };
            let sizes = match sizes {
                Some(sizes) => sizes,
                None => {
                    let mut out = Vec::new();
                    let mut n = space.q();
                    while n <= space.size() {
                        out.push(n);
                        match n.checked_mul(space.q()) {
                            Some(next) => n = next,
                            None => break,
                        }
                    }
                    out
                }
            };
            let rows = incidence::tau_scan(&space, &conn, &strategies, &sizes, trials, seed)?;
            let mut violated = false;
            for row in &rows {
                violated |= row.within_star_bound == Some(false);
                println!("{}", serde_json::to_string(row)?);
            }
            Ok(if violated {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn emit_rows(rows: &[VerdictRow], out: &str, format: Format) -> Result<(), LabError> {
    if out == "-" {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        match format {
            Format::Jsonl => write_jsonl(rows, &mut lock)?,
            Format::Csv => write_csv_summary(rows, &mut lock)?,
        }
        lock.flush()?;
    } else {
        let jsonl_path = format!("{out}.jsonl");
        let csv_path = format!("{out}.csv");
        let mut jsonl = Vec::new();
        write_jsonl(rows, &mut jsonl)?;
        std::fs::write(&jsonl_path, jsonl)?;
        let mut csv = Vec::new();
        write_csv_summary(rows, &mut csv)?;
        std::fs::write(&csv_path, csv)?;
        eprintln!("[labcli] wrote {jsonl_path} and {csv_path}");
    }
    Ok(())
}

fn multiset_json(report: &cayley::SpectrumReport) -> serde_json::Value {
    let entries: Vec<serde_json::Value> = report
        .multiset
        .iter()
        .map(|(v, k)| match v.as_integer() {
            Some(n) => json!({"value": n.to_string(), "multiplicity": k}),
            None => {
                let z = v.to_complex();
                json!({"value": [z.re, z.im], "multiplicity": k})
            }
        })
        .collect();
    json!(entries)
}

/// Imported connection function: a group descriptor plus a JSON array of
/// colors. Integer entries on a vector group go through the exact path;
/// floats and [re, im] pairs go through the numeric path.
fn parse_connection(group: &str, table: &str) -> Result<cayley::ConnectionFunction, LabError> {
    let group: cayley::GroupDesc = serde_json::from_str(group)
        .map_err(|e| LabError::InvalidParameter(format!("bad group descriptor: {e}")))?;
    let raw: Vec<serde_json::Value> = serde_json::from_str(table)
        .map_err(|e| LabError::InvalidParameter(format!("bad connection table: {e}")))?;
    let all_integers = raw.iter().all(|v| v.as_i64().is_some());
    let vector_group = matches!(group, cayley::GroupDesc::Vector { .. });
    if all_integers && vector_group {
        let values = raw.iter().map(|v| v.as_i64().unwrap()).collect();
        return cayley::ConnectionFunction::new_exact(group, values);
    }
    let values = raw
        .iter()
        .map(|v| match v {
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(|x| num_complex::Complex64::new(x, 0.0))
                .ok_or_else(|| LabError::InvalidParameter("non-finite color".into())),
            serde_json::Value::Array(pair) if pair.len() == 2 => {
                let re = pair[0].as_f64();
                let im = pair[1].as_f64();
                match (re, im) {
                    (Some(re), Some(im)) => Ok(num_complex::Complex64::new(re, im)),
                    _ => Err(LabError::InvalidParameter(
                        "complex color entries need two numbers".into(),
                    )),
                }
            }
            other => Err(LabError::InvalidParameter(format!(
                "connection table entry {other} is not a color"
            ))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    cayley::ConnectionFunction::new_numeric(group, values)
}
