//! `betashift` command-line front end.
//!
//! Exit status: 0 on success, 1 when a check fails or a computation cannot
//! be certified, 2 on usage errors (bad flags, bad β spec, bad config).
//! Errors are also written to stderr as one JSON object.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use betashift::config::{load_config, Format, RunConfig};
use betashift::construct::{build_irregular, schedule, verify_spike};
use betashift::density::{density_summary, density_trace, spectrum_dim, DigitStream};
use betashift::expansion::{digits, expansion_of_one, greedy_digits, one_cycle, zero_run_table};
use betashift::verify::{verify_suite, Faults, VerifyOptions};
use betashift::{cylinder, language, output, parse_rational, Beta, Error, Real, Word};

#[derive(Parser)]
#[command(
    name = "betashift",
    version,
    about = "Certified beta-expansions and irregularity diagnostics"
)]
struct Cli {
    /// Flat `key = value` configuration file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Width of reported enclosures, as `p/q` or a decimal.
    #[arg(long, global = true)]
    eps: Option<String>,
    /// Maximum bisection steps for any enclosure of β.
    #[arg(long, global = true)]
    refine_budget: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BetaArg {
    /// `dec:<literal>`, `poly:<c0>,..,<cd>@[<lo>,<hi>]` or `dseq:<path>`.
    #[arg(long)]
    beta: String,
}

#[derive(Subcommand)]
enum Command {
    /// Digits of x under T (or the greedy algorithm).
    Expand {
        #[command(flatten)]
        beta: BetaArg,
        /// The point, as `p/q` or a decimal, in (0, 1].
        #[arg(long)]
        x: String,
        #[arg(short = 'n', long = "n")]
        n: usize,
        /// Use the greedy expansion on [0, 1) instead.
        #[arg(long)]
        greedy: bool,
    },
    /// The expansion of 1.
    One {
        #[command(flatten)]
        beta: BetaArg,
        #[arg(short = 'n', long = "n")]
        n: usize,
    },
    /// Zero-run lengths t_n, running maxima and lambda_hat.
    Zeroruns {
        #[command(flatten)]
        beta: BetaArg,
        #[arg(short = 'n', long = "n")]
        n: usize,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Whether a word is admissible.
    Admissible {
        #[command(flatten)]
        beta: BetaArg,
        #[arg(long)]
        word: Word,
    },
    /// All admissible words of length n.
    Enumerate {
        #[command(flatten)]
        beta: BetaArg,
        #[arg(short = 'n', long = "n")]
        n: usize,
        /// Largest n accepted.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Cylinder of a word: left endpoint, exact length, k*, fullness.
    Cylinder {
        #[command(flatten)]
        beta: BetaArg,
        #[arg(long)]
        word: Word,
    },
    /// Density trace d_n along a digit stream.
    Trace {
        #[command(flatten)]
        beta: BetaArg,
        #[command(flatten)]
        source: TraceSource,
        #[arg(short = 'n', long = "n")]
        n: usize,
        #[command(flatten)]
        sched: ScheduleArgs,
        /// First n of the tail used for the summary.
        #[arg(long, default_value_t = 1)]
        tail_start: usize,
        #[arg(long)]
        gap_tol: Option<f64>,
    },
    /// Build an extremely irregular point and check its spikes.
    Construct {
        #[command(flatten)]
        beta: BetaArg,
        #[command(flatten)]
        sched: ScheduleArgs,
    },
    /// Evaluate the dimension formula for (lambda, delta).
    Spectrum {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Run the property suite over one or more bases.
    Verify {
        /// Repeatable.
        #[arg(long = "beta", required = true)]
        betas: Vec<String>,
        /// Negative control: perturb k* in the cylinder oracle.
        #[arg(long, value_parser = ["k-star"])]
        inject_fault: Option<String>,
        /// Include wall-clock timings.
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct TraceSource {
    /// Trace the orbit of this point.
    #[arg(long)]
    x: Option<String>,
    /// Trace the expansion of 1.
    #[arg(long)]
    one: bool,
    /// Trace the constructed point.
    #[arg(long)]
    construct: bool,
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long)]
    seed: Option<String>,
    /// Number of blocks.
    #[arg(long)]
    k: Option<usize>,
    /// Lower bound m_k >= ratio * h_k.
    #[arg(long)]
    ratio: Option<usize>,
    /// Largest m searched.
    #[arg(long)]
    cap: Option<usize>,
}

/// Errors that end the run, split by exit status.
enum Failure {
    Usage(String, String),
    Compute(Error),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidBetaSpec(_) | Error::ConfigParse { .. } | Error::DigitFile(_) => {
                Failure::Usage(e.kind().to_string(), e.to_string())
            }
            _ => Failure::Compute(e),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Compute(Error::from(e))
    }
}

type Outcome = std::result::Result<(), Failure>;

fn usage(message: String) -> Failure {
    Failure::Usage("UsageError".into(), message)
}

fn build_config(cli: &Cli) -> std::result::Result<RunConfig, Failure> {
    let mut cfg = load_config(cli.config.as_deref())?;
    let mut overrides: Vec<(&str, String)> = Vec::new();
    if let Some(f) = &cli.format {
        overrides.push(("format", f.clone()));
    }
    if let Some(e) = &cli.eps {
        overrides.push(("eps", e.clone()));
    }
    if let Some(b) = cli.refine_budget {
        overrides.push(("refine_budget", b.to_string()));
    }
    let sched = match &cli.command {
        Command::Trace { sched, .. } | Command::Construct { sched, .. } => Some(sched),
        _ => None,
    };
    if let Some(s) = sched {
        if let Some(v) = &s.seed {
            overrides.push(("seed", v.clone()));
        }
        if let Some(v) = s.k {
            overrides.push(("k", v.to_string()));
        }
        if let Some(v) = s.ratio {
            overrides.push(("r", v.to_string()));
        }
        if let Some(v) = s.cap {
            overrides.push(("search_cap", v.to_string()));
        }
    }
    match &cli.command {
        Command::Enumerate { cap: Some(c), .. } => overrides.push(("enum_cap", c.to_string())),
        Command::Zeroruns { budget: Some(b), .. } => overrides.push(("zero_run_budget", b.to_string())),
        Command::Trace { gap_tol: Some(g), .. } => overrides.push(("gap_tol", g.to_string())),
        _ => {}
    }
    for (k, v) in overrides {
        cfg.set(k, &v).map_err(|m| usage(format!("--{k}: {m}")))?;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    Ok(cfg)
}

struct Emitter {
    format: Format,
    out: Box<dyn Write>,
}

impl Emitter {
    fn new(cfg: &RunConfig) -> io::Result<Emitter> {
        let out: Box<dyn Write> = match &cfg.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Emitter {
            format: cfg.format,
            out,
        })
    }

    /// CSV gets `rows`; JSON gets `doc` inside the versioned envelope.
    fn emit<R: Serialize, D: Serialize>(&mut self, kind: &str, rows: &[R], doc: &D) -> Outcome {
        match self.format {
            Format::Csv => output::write_csv(rows, &mut self.out)?,
            Format::Json => output::write_json(kind, doc, &mut self.out)?,
        }
        self.out.flush()?;
        Ok(())
    }
}

fn parse_beta(spec: &str, cfg: &RunConfig) -> std::result::Result<Beta, Failure> {
    Ok(Beta::parse_with(spec, &cfg.beta_options())?)
}

fn parse_point(beta: &Beta, x: &str) -> std::result::Result<Real, Failure> {
    let v = parse_rational(x).ok_or_else(|| usage(format!("--x: expected p/q or a decimal, got {x:?}")))?;
    Ok(Real::from_ratio(beta, v))
}

#[derive(Serialize)]
struct DigitsRow<'a> {
    beta: &'a str,
    x: &'a str,
    n: usize,
    digits: String,
}

#[derive(Serialize)]
struct WordRow {
    word: String,
}

#[derive(Serialize)]
struct AdmissibleRow<'a> {
    beta: &'a str,
    word: String,
    admissible: bool,
}

#[derive(Serialize)]
struct SpectrumRow {
    lambda: f64,
    delta: f64,
    dim: f64,
}

#[derive(Serialize)]
struct VerifyRow<'a> {
    check: &'a str,
    beta: &'a str,
    status: &'static str,
    detail: &'a str,
}

fn run(cli: Cli) -> Outcome {
    let cfg = build_config(&cli)?;
    let mut em = Emitter::new(&cfg)?;
    match cli.command {
        Command::Expand { beta, x, n, greedy } => {
            let b = parse_beta(&beta.beta, &cfg)?;
            let point = parse_point(&b, &x)?;
            let w = if greedy {
                greedy_digits(&point, n)?
            } else {
                digits(&point, n)?
            };
            let row = DigitsRow {
                beta: b.label(),
                x: &x,
                n,
                digits: w.to_string(),
            };
            em.emit("expand", &[&row], &row)
        }
        Command::One { beta, n } => {
            let b = parse_beta(&beta.beta, &cfg)?;
            let w = expansion_of_one(&b, n)?;
            let row = DigitsRow {
                beta: b.label(),
                x: "1",
                n,
                digits: w.to_string(),
            };
            let cycle = one_cycle(&b).map(|(start, period)| json!({ "start": start, "period": period }));
            let doc = json!({ "beta": b.label(), "n": n, "digits": w.to_string(), "cycle": cycle });
            em.emit("one", &[&row], &doc)
        }
        Command::Zeroruns { beta, n, .. } => {
            let b = parse_beta(&beta.beta, &cfg)?;
            let table = zero_run_table(&b, n, cfg.zero_run_budget)?;
            em.emit("zeroruns", &table.records, &table)
        }
        Command::Admissible { beta, word } => {
            let b = parse_beta(&beta.beta, &cfg)?;
            word.check_alphabet(b.alphabet_size())?;
            let ok = language::is_admissible(&b, &word)?;
            let row = AdmissibleRow {
                beta: b.label(),
                word: word.to_string(),
                admissible: ok,
            };
            em.emit("admissible", &[&row], &row)
        }
        Command::Enumerate { beta, n, .. } => {
            let b = parse_beta(&beta.beta, &cfg)?;
            let slice = language::enumerate_words_capped(&b, n, cfg.enum_cap)?;
            let rows: Vec<WordRow> = slice.words.iter().map(|w| WordRow { word: w.to_string() }).collect();
            em.emit("enumerate", &rows, &slice)
        }
        Command::Cylinder { beta, word } => {
            let b = parse_beta(&beta.beta, &cfg)?;
            let info = cylinder::cylinder(&b, &word)?;
            let row = info.row()?;
            let doc = json!({
                "beta": b.label(),
                "word": word.to_string(),
                "k_star": info.k_star,
                "left": info.left.refine(&cfg.eps)?,
                "length": info.length.refine(&cfg.eps)?,
                "full": info.fullness.as_str(),
            });
            em.emit("cylinder", &[&row], &doc)
        }
        Command::Trace {
            beta,
            source,
            n,
            tail_start,
            ..
        } => {
            let b = parse_beta(&beta.beta, &cfg)?;
            let (stream, n) = if let Some(x) = &source.x {
                (DigitStream::Point(parse_point(&b, x)?), n)
            } else if source.one {
                (DigitStream::One(b.clone()), n)
            } else {
                let sched = schedule(&b, &cfg.seed, cfg.k_blocks, cfg.r, cfg.search_cap)?;
                let c = build_irregular(&b, &sched, &cfg.eps)?;
                (c.stream, n.max(sched.len()))
            };
            let trace = density_trace(&stream, n)?;
            let summary = density_summary(&trace, tail_start, cfg.gap_tol)?;
            let doc = json!({ "trace": &trace, "summary": summary });
            em.emit("trace", &trace.rows(), &doc)
        }
        Command::Construct { beta, .. } => {
            let b = parse_beta(&beta.beta, &cfg)?;
            let sched = schedule(&b, &cfg.seed, cfg.k_blocks, cfg.r, cfg.search_cap)?;
            if let Some(w) = &sched.warning {
                eprintln!("warning: {w}");
            }
            let c = build_irregular(&b, &sched, &cfg.eps)?;
            let trace = density_trace(&c.stream, sched.len())?;
            let spikes = verify_spike(&b, &sched, &trace)?;
            let doc = json!({ "construction": c.summary(), "spikes": &spikes });
            em.emit("construct", &spikes.spikes, &doc)
        }
        Command::Spectrum { lambda, delta } => {
            let dim = spectrum_dim(lambda, delta)?;
            let row = SpectrumRow { lambda, delta, dim };
            em.emit("spectrum", &[&row], &row)
        }
        Command::Verify {
            betas,
            inject_fault,
            timing,
        } => {
            let faults = Faults {
                k_star_offset: if inject_fault.is_some() { 1 } else { 0 },
            };
            let opts = VerifyOptions {
                config: cfg.clone(),
                faults,
                timing,
            };
            let report = verify_suite(&betas, &opts);
            let rows: Vec<VerifyRow> = report
                .results
                .iter()
                .map(|r| VerifyRow {
                    check: &r.check,
                    beta: &r.beta,
                    status: match r.status {
                        betashift::verify::Status::Pass => "pass",
                        betashift::verify::Status::Fail => "fail",
                        betashift::verify::Status::Skipped => "skipped",
                    },
                    detail: &r.detail,
                })
                .collect();
            em.emit("verify", &rows, &report)?;
            if report.ok() {
                Ok(())
            } else {
                Err(Failure::Check(format!("{} check(s) failed", report.failed)))
            }
        }
    }
}

fn report_error(kind: &str, message: &str) {
    let doc = json!({
        "schema_version": betashift::SCHEMA_VERSION,
        "error": kind,
        "message": message,
    });
    eprintln!("{doc}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(kind, m)) => {
            report_error(&kind, &m);
            ExitCode::from(2)
        }
        Err(Failure::Compute(e)) => {
            report_error(e.kind(), &e.to_string());
            ExitCode::from(1)
        }
        Err(Failure::Check(m)) => {
            report_error("CheckFailure", &m);
            ExitCode::from(1)
        }
    }
}
