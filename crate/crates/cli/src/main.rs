use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use rigidmetric::glue::{self, BoundVerdict, Partition, PipelineOptions};
use rigidmetric::numbers::rational::approx_f64;
use rigidmetric::numbers::{format_rational, parse_rational, Enclosure};
use rigidmetric::product::{tau_metric, SemiMetricGauge, Word};
use rigidmetric::rigidify::perturb_strongly_rigid;
use rigidmetric::verify::{self, Report, Verdict};
use rigidmetric::{Certificate, Error, FiniteMetric, Rational};

const EXIT_FAIL: u8 = 1;
const EXIT_UNRESOLVED: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_INVALID: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "rigidmetric", version, about = "Strongly rigid perturbations of finite metric spaces")]
struct Cli {
    /// Seed for the dense value streams.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on coefficient events inspected by exact comparisons.
    #[arg(long, global = true, default_value_t = 64)]
    max_precision: u64,
    /// Output format for metrics. CSV needs rational entries.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Add decimal approximations to metric output (not authoritative).
    #[arg(long, global = true)]
    approx: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Check {
    Metric,
    Strict,
    Sr,
    Rigid,
    Lnm,
    Embed,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Perturb a rational metric into a strongly rigid one within epsilon.
    Rigidify {
        input: PathBuf,
        #[arg(long)]
        epsilon: String,
        /// Run the full pipeline (independence-certified output).
        #[arg(long)]
        full: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Certificate path for --full; defaults to OUTPUT with a .cert.json suffix.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Amalgamate block metrics through a hub metric.
    Glue {
        /// Partition JSON: {"blocks": [[...], ...], "hubs": [...]}.
        #[arg(long)]
        partition: PathBuf,
        /// One metric per block, in partition order.
        #[arg(long = "block", required = true)]
        blocks: Vec<PathBuf>,
        #[arg(long)]
        hub: PathBuf,
        /// Reference metric for the amalgamation bound check.
        #[arg(long, requires = "epsilon")]
        reference: Option<PathBuf>,
        #[arg(long, requires = "reference")]
        epsilon: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The tau metric on all words of a given length.
    Product {
        #[arg(long)]
        alphabet: u64,
        #[arg(long)]
        length: usize,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1)]
        gauge: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run one oracle on a metric and print a JSON report.
    Verify {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long, value_enum)]
        check: Check,
        /// Scale for the lnm check.
        #[arg(long)]
        m: Option<u32>,
        /// Base point label for the embed check.
        #[arg(long)]
        xi: Option<String>,
    },
    /// Sup distance between two metrics on the same points.
    Dist { a: PathBuf, b: PathBuf },
    /// Re-verify a certificate file.
    Indep { certificate: PathBuf },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => EXIT_PARSE,
            Error::Unresolved(_) => EXIT_UNRESOLVED,
            _ => EXIT_INVALID,
        };
        Failure::new(code, e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("cannot read {}: {e}", path.display())))
}

fn parse_json(path: &Path) -> CliResult<Value> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

/// JSON if the file starts with `{`, CSV otherwise. Syntax errors exit 3,
/// well-formed inputs that violate metric invariants exit 4.
fn load_metric(path: &Path) -> CliResult<FiniteMetric> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
        FiniteMetric::deserialize(value)
            .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))
    } else {
        FiniteMetric::from_csv(&text).map_err(|e| {
            let f = Failure::from(e);
            Failure::new(f.code, format!("{}: {}", path.display(), f.message))
        })
    }
}

fn rational_arg(s: &str, what: &str) -> CliResult<Rational> {
    parse_rational(s).map_err(|e| Failure::new(EXIT_PARSE, format!("{what}: {e}")))
}

fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match output {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::new(EXIT_INVALID, format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render_metric(cli: &Cli, d: &FiniteMetric) -> CliResult<String> {
    match cli.format {
        Format::Csv => Ok(d.to_csv()?),
        Format::Json if cli.approx => {
            let mut value = serde_json::to_value(d).expect("metric serializes");
            let approx: Vec<Vec<f64>> = d
                .matrix()
                .iter()
                .map(|row| row.iter().map(|x| approx_f64(&x.eval(4).lo)).collect())
                .collect();
            value["approx"] = json!(approx);
            Ok(serde_json::to_string_pretty(&value).expect("value serializes"))
        }
        Format::Json => Ok(d.to_json()),
    }
}

fn certificate_path(explicit: Option<&Path>, output: Option<&Path>) -> Option<PathBuf> {
    explicit.map(Path::to_path_buf).or_else(|| {
        output.map(|o| {
            let stem = o.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            o.with_file_name(format!("{stem}.cert.json"))
        })
    })
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Unresolved => EXIT_UNRESOLVED,
    }
}

fn print_report(report: &Report) -> u8 {
    println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
    verdict_code(report.verdict)
}

fn render_enclosure(e: &Enclosure, approx: bool) -> String {
    let exact = if e.lo == e.hi {
        format_rational(&e.lo)
    } else {
        format!("[{}, {}]", format_rational(&e.lo), format_rational(&e.hi))
    };
    if approx {
        format!("{exact} (~{})", approx_f64(&e.hi))
    } else {
        exact
    }
}

fn run(cli: &Cli) -> CliResult<u8> {
    let p = cli.max_precision;
    match &cli.command {
        Command::Rigidify { input, epsilon, full, output, certificate } => {
            let d = load_metric(input)?;
            let eps = rational_arg(epsilon, "--epsilon")?;
            if *full {
                let opts = PipelineOptions { max_precision: p };
                let (out, cert) = glue::rigidify_full_with(&d, &eps, &opts)?;
                emit(output.as_deref(), &render_metric(cli, &out)?)?;
                if let Some(path) = certificate_path(certificate.as_deref(), output.as_deref()) {
                    emit(Some(&path), &cert.to_json())?;
                }
            } else {
                let out = perturb_strongly_rigid(&d, &eps, cli.seed)?;
                emit(output.as_deref(), &render_metric(cli, &out)?)?;
            }
            Ok(0)
        }
        Command::Glue { partition, blocks, hub, reference, epsilon, output } => {
            let partition: Partition = serde_json::from_value(parse_json(partition)?)
                .map_err(|e| Failure::new(EXIT_INVALID, format!("partition: {e}")))?;
            let block_metrics = blocks.iter().map(|b| load_metric(b)).collect::<CliResult<Vec<_>>>()?;
            let hub = load_metric(hub)?;
            let amalgam = glue::amalgamate(&partition, &block_metrics, &hub)?;
            emit(output.as_deref(), &render_metric(cli, &amalgam)?)?;
            let (Some(reference), Some(epsilon)) = (reference, epsilon) else { return Ok(0) };
            let d = load_metric(reference)?;
            let eps = rational_arg(epsilon, "--epsilon")?;
            let report = glue::sup_bound_check(&d, &amalgam, &partition, &eps)?;
            eprintln!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            Ok(match report.verdict {
                BoundVerdict::Pass => 0,
                BoundVerdict::Unresolved => EXIT_UNRESOLVED,
                BoundVerdict::Fail | BoundVerdict::PreconditionFailure => EXIT_FAIL,
            })
        }
        Command::Product { alphabet, length, k, gauge, output } => {
            if *alphabet == 0 || *length == 0 {
                return Err(Failure::new(EXIT_INVALID, "alphabet and length must be positive"));
            }
            let words = Word::all(*alphabet, *length);
            let d = tau_metric(&SemiMetricGauge::new(*gauge), *k, &words)?;
            emit(output.as_deref(), &render_metric(cli, &d)?)?;
            Ok(0)
        }
        Command::Verify { metric, check, m, xi } => {
            let d = load_metric(metric)?;
            let report = match check {
                Check::Metric => verify::is_metric(&d, p),
                Check::Strict => verify::is_strict_triangle(&d, p),
                Check::Sr => verify::is_strongly_rigid(&d, p),
                Check::Rigid => verify::is_rigid(&d, p),
                Check::Lnm => {
                    let m = m.ok_or_else(|| Failure::new(EXIT_INVALID, "--check lnm needs --m"))?;
                    verify::lnm_membership(&d, m, p)
                }
                Check::Embed => {
                    let label = xi.as_deref().ok_or_else(|| Failure::new(EXIT_INVALID, "--check embed needs --xi"))?;
                    let idx = d
                        .index_of(label)
                        .ok_or_else(|| Failure::new(EXIT_INVALID, format!("no point labeled {label:?}")))?;
                    verify::distance_embedding_check(&d, idx, p)
                }
            };
            Ok(print_report(&report))
        }
        Command::Dist { a, b } => {
            let e = verify::sup_distance(&load_metric(a)?, &load_metric(b)?)?;
            println!("{}", render_enclosure(&e, cli.approx));
            Ok(0)
        }
        Command::Indep { certificate } => {
            let cert = Certificate::from_json(&read(certificate)?)?;
            match cert.verify(p) {
                Ok(()) => {
                    println!("ok: {} independence entries verified", cert.independence.len());
                    Ok(0)
                }
                Err(msg) => {
                    println!("fail: {msg}");
                    Ok(EXIT_FAIL)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    // Usage errors exit with the parse code so they never read as "unresolved".
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
