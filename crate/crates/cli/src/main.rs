use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use tuz_core::coder::{recursive_coding, CoderError, CodingState};
use tuz_core::gf::FieldConfig;
use tuz_core::io::{parse_network, to_json, CodeReport, MinCuts, NetworkDoc, ParseError, ParsedNetwork};
use tuz_core::netgraph::{Network, RandomDagParams};
use tuz_core::reduction::{reduce, ReductionSequence};
use tuz_core::rng::SplitRng;

mod sweep;

const VERSION: &str = env!("TUZ_VERSION");

#[derive(Parser)]
#[command(name = "tuz", version = VERSION, about = "Linear codes for two-unicast-Z networks")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct GlobalOpts {
    /// Prime modulus of the coding field.
    #[arg(long, global = true, default_value_t = 65521)]
    field_prime: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Attempts per randomized step.
    #[arg(long, global = true, default_value_t = 16)]
    retries: usize,
    /// Append per-stage tables and Granks to reports.
    #[arg(long, global = true)]
    trace: bool,
    /// Treat warnings as errors.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce and code a network, then print its report.
    Code { network: PathBuf },
    /// Print the achieved rate region.
    Rates { network: PathBuf },
    /// Print the GNS cut-set bound and pairwise min-cuts.
    Gns { network: PathBuf },
    /// Print the destination-reduction stage table.
    Reduce { network: PathBuf },
    /// Check single-unicast codes against max-flow on random networks.
    VerifyMfmc {
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Check rate pair (1, 1) on random networks with GNS bound at least 2.
    SweepTheorem1 {
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Print a random network document.
    Gen {
        #[arg(long, default_value_t = 8)]
        vertices: usize,
        #[arg(long, default_value_t = 3)]
        max_in_degree: usize,
    },
}

enum Failure {
    Invalid(String),
    Exhausted(String),
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<CoderError> for Failure {
    fn from(e: CoderError) -> Self {
        match e {
            CoderError::RetryExhausted { .. } => Failure::Exhausted(e.to_string()),
            other => Failure::Invalid(other.to_string()),
        }
    }
}

fn load(path: &Path, opts: &GlobalOpts) -> Result<ParsedNetwork, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    let parsed = parse_network(&text, opts.strict)?;
    for w in &parsed.warnings {
        eprintln!("{}: {w}", path.display());
    }
    Ok(parsed)
}

fn field(opts: &GlobalOpts) -> Result<FieldConfig, Failure> {
    FieldConfig::new(opts.field_prime).map_err(|e| Failure::Invalid(e.to_string()))
}

fn code(net: &Network, opts: &GlobalOpts) -> Result<(ReductionSequence, CodingState), Failure> {
    let seq = reduce(net).map_err(|e| Failure::Invalid(e.to_string()))?;
    let mut rng = SplitRng::new(opts.seed);
    let st = recursive_coding(&seq, field(opts)?, &mut rng, opts.retries)?;
    Ok((seq, st))
}

#[derive(Serialize)]
struct GnsOutput {
    gns: Option<usize>,
    mincuts: MinCuts,
    single_edge_gns: Option<String>,
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Code { network } => {
            let net = load(network, opts)?.network;
            let (seq, st) = code(&net, opts)?;
            let rates = st.rate_report()?;
            Ok(to_json(&CodeReport::new(
                &seq, &st, &rates, opts.seed, VERSION, opts.trace,
            )))
        }
        Command::Rates { network } => {
            let net = load(network, opts)?.network;
            let (_, st) = code(&net, opts)?;
            Ok(to_json(&st.rate_report()?))
        }
        Command::Gns { network } => {
            let net = load(network, opts)?.network;
            let cuts = net.cut_report();
            Ok(to_json(&GnsOutput {
                gns: cuts.gns,
                mincuts: MinCuts::from(&cuts),
                single_edge_gns: net.has_single_edge_gns().map(|e| net.edge_name(e).to_string()),
            }))
        }
        Command::Reduce { network } => {
            let net = load(network, opts)?.network;
            let seq = reduce(&net).map_err(|e| Failure::Invalid(e.to_string()))?;
            Ok(to_json(&seq.trace()))
        }
        Command::VerifyMfmc { trials } => Ok(to_json(&sweep::verify_mfmc(
            *trials,
            opts.seed,
            field(opts)?,
            opts.retries,
        ))),
        Command::SweepTheorem1 { trials } => Ok(to_json(&sweep::theorem1(
            *trials,
            opts.seed,
            field(opts)?,
            opts.retries,
        ))),
        Command::Gen {
            vertices,
            max_in_degree,
        } => {
            let params = RandomDagParams {
                n_vertices: *vertices,
                max_in_degree: *max_in_degree,
                seed: opts.seed,
                ..RandomDagParams::default()
            };
            let net = Network::random_dag(&params).map_err(|e| Failure::Invalid(e.to_string()))?;
            Ok(to_json(&NetworkDoc::from_network(&net)))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Exhausted(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
