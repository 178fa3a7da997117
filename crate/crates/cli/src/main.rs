//! Command-line front end for exact group-testing MAP inference.
//!
//! Subcommands: `gen-graph` writes an instance file, `simulate` samples
//! states and runs the tests, `infer` computes posteriors, `verify`
//! checks the transform identities behind the dual engine, and `bench`
//! times the engines. All I/O is UTF-8 JSON; `-` means stdin/stdout.
//! Randomness always sits behind an explicit `--seed` (default 0).
//!
//! Exit codes: 0 success, 1 verification failure, 2 bad input, 3 model
//! inconsistency (an observation impossible under the noiseless model).

use std::io::Read;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use gtmap_core::formats::{GraphFile, ObservationFile, SimulationFile};
use gtmap_core::holo::{
    check_delta_lemma_with, check_duality_with, check_seq_lemma_with, worked_example_mismatches,
    LocalTransform,
};
use gtmap_core::{
    build_pooling_graph, posterior_report, random_pooling_graph, reduce, run_tests, sample_states,
    DualOptions, Method, OracleOptions, PoolingGraph, PriorVector, StateVector,
};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Core(#[from] gtmap_core::Error),
    #[error("failed to read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("verification failed")]
    VerificationFailed,
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed => 1,
            CliError::Core(
                gtmap_core::Error::InconsistentObservation { .. } | gtmap_core::Error::ZeroEvidence,
            ) => 3,
            _ => 2,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "gtmap",
    version,
    about = "Exact bitwise MAP inference for pooled group testing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an instance file: pooling graph plus per-object priors
    GenGraph(GenGraphArgs),
    /// Sample object states from the priors and run the pooled tests
    Simulate(SimulateArgs),
    /// Compute per-object posteriors and MAP decisions
    Infer(InferArgs),
    /// Check the local identities the dual engine is built on
    Verify(VerifyArgs),
    /// Time the inference engines on one instance
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Naive,
    Dual,
    DualFast,
}

impl From<MethodArg> for Method {
    fn from(value: MethodArg) -> Self {
        match value {
            MethodArg::Naive => Method::Naive,
            MethodArg::Dual => Method::Dual,
            MethodArg::DualFast => Method::DualFast,
        }
    }
}

#[derive(Args)]
struct GenGraphArgs {
    /// Number of objects
    #[arg(long)]
    objects: usize,
    /// Number of random tests
    #[arg(long)]
    tests: Option<usize>,
    /// Members per random test
    #[arg(long)]
    group_size: Option<usize>,
    /// Explicit groups like "0,1;1,2"; overrides random generation
    #[arg(long)]
    manual: Option<String>,
    /// Prior positivity probability, shared by every object
    #[arg(long, default_value_t = 0.05)]
    prior: f64,
    /// Seed for random group generation
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path, - for stdout
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct SimulateArgs {
    /// Instance file, - for stdin
    #[arg(long)]
    graph: String,
    /// Seed for state sampling
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed states like "0,1,0"; skips sampling
    #[arg(long)]
    states: Option<String>,
    /// Output path, - for stdout
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct InferArgs {
    /// Instance file, - for stdin
    #[arg(long)]
    graph: String,
    /// Observation file, - for stdin
    #[arg(long)]
    obs: String,
    /// Posterior engine
    #[arg(long, value_enum, default_value_t = MethodArg::DualFast)]
    method: MethodArg,
    /// Worker threads for the dual engines; output is identical for any value
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Object cap for the naive engine
    #[arg(long, default_value_t = 20)]
    max_naive_objects: usize,
    /// Test cap for the dual engines
    #[arg(long, default_value_t = 28)]
    max_dual_tests: usize,
    /// Output path, - for stdout
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest arity for the skewed-equality check
    #[arg(long, default_value_t = 10)]
    seq_max_r: usize,
    /// Largest arity for the delta-contraction check
    #[arg(long, default_value_t = 8)]
    delta_max_r: usize,
    /// Corrupt the theta table before checking (negative control)
    #[arg(long, hide = true)]
    corrupt_theta: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance file, - for stdin
    #[arg(long)]
    graph: String,
    /// Observation file, - for stdin
    #[arg(long)]
    obs: String,
    /// Engines to time, comma separated
    #[arg(long, value_enum, value_delimiter = ',', default_value = "dual-fast")]
    methods: Vec<MethodArg>,
    /// Timed repetitions per engine; the median is reported
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    /// Worker threads for the dual engines
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Object cap for the naive engine
    #[arg(long, default_value_t = 20)]
    max_naive_objects: usize,
    /// Test cap for the dual engines
    #[arg(long, default_value_t = 28)]
    max_dual_tests: usize,
    /// Where to write the JSON records, - for stdout
    #[arg(long)]
    out: Option<String>,
}

/// One timed engine run (or a cap refusal) on an instance; n and m are
/// the reduced sizes the engine actually saw. The checksum sums every
/// p_positive so runs of different engines can be cross-checked.
#[derive(Debug, Serialize)]
struct BenchRecord {
    method: String,
    n: usize,
    m: usize,
    feasible: bool,
    wall_time_s: Option<f64>,
    checksum: Option<f64>,
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|source| CliError::Read {
                path: "stdin".into(),
                source,
            })?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.into(),
            source,
        })
    }
}

fn read_json<T: DeserializeOwned>(path: &str) -> Result<T, CliError> {
    let text = read_input(path)?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: if path == "-" {
            "stdin".into()
        } else {
            path.into()
        },
        source,
    })
}

fn write_text(path: &str, text: &str) -> Result<(), CliError> {
    if path == "-" {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(path, text).map_err(|source| CliError::Write {
            path: path.into(),
            source,
        })
    }
}

fn write_json<T: Serialize>(path: &str, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string(value).expect("value serializes");
    text.push('\n');
    write_text(path, &text)
}

fn parse_index_list(text: &str, what: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("{what}: cannot parse index {tok:?}")))
        })
        .collect()
}

fn parse_bit_list(text: &str, what: &str) -> Result<Vec<u8>, CliError> {
    text.split(',')
        .map(|tok| match tok.trim() {
            "0" => Ok(0),
            "1" => Ok(1),
            other => Err(CliError::Usage(format!(
                "{what}: expected bit, got {other:?}"
            ))),
        })
        .collect()
}

fn load_instance(path: &str) -> Result<(PoolingGraph, PriorVector), CliError> {
    let file: GraphFile = read_json(path)?;
    Ok(file.into_parts()?)
}

fn run_gen_graph(args: GenGraphArgs) -> Result<(), CliError> {
    let graph = if let Some(manual) = &args.manual {
        let groups: Vec<Vec<usize>> = manual
            .split(';')
            .map(|g| parse_index_list(g, "--manual"))
            .collect::<Result<_, _>>()?;
        if let Some(tests) = args.tests {
            if tests != groups.len() {
                return Err(CliError::Usage(format!(
                    "--tests {tests} contradicts {} manual groups",
                    groups.len()
                )));
            }
        }
        build_pooling_graph(args.objects, groups)?
    } else {
        let tests = args
            .tests
            .ok_or_else(|| CliError::Usage("--tests is required without --manual".into()))?;
        let group_size = args
            .group_size
            .ok_or_else(|| CliError::Usage("--group-size is required without --manual".into()))?;
        random_pooling_graph(args.objects, tests, group_size, args.seed)?
    };
    let priors = PriorVector::uniform(args.objects, args.prior)?;
    write_json(&args.out, &GraphFile::new(&graph, &priors))
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let (graph, priors) = load_instance(&args.graph)?;
    let states = match &args.states {
        Some(text) => StateVector::new(parse_bit_list(text, "--states")?)?,
        None => sample_states(&priors, args.seed),
    };
    let observation = run_tests(&graph, &states)?;
    write_json(&args.out, &SimulationFile::new(&states, &observation))
}

fn run_infer(args: InferArgs) -> Result<(), CliError> {
    let (graph, priors) = load_instance(&args.graph)?;
    let observation = read_json::<ObservationFile>(&args.obs)?.into_observation()?;
    let oracle_opts = OracleOptions {
        max_objects: args.max_naive_objects,
        ..OracleOptions::default()
    };
    let dual_opts = DualOptions {
        max_tests: args.max_dual_tests,
        workers: args.workers,
    };
    let report = posterior_report(
        &graph,
        &priors,
        &observation,
        args.method.into(),
        &oracle_opts,
        &dual_opts,
    )?;
    write_json(&args.out, &report)
}

#[derive(Serialize)]
struct VerifySummary {
    pass: bool,
    duality: bool,
    /// index r-1: skewed-equality identity at arity r
    seq: Vec<bool>,
    /// index r-1: delta contraction at arity r, all branches, both
    /// bits, priors {0.1, 0.3, 0.5, 0.7, 0.9}
    delta: Vec<bool>,
    worked_example: bool,
    mismatches: Vec<String>,
}

fn run_verify(args: VerifyArgs) -> Result<(), CliError> {
    let mut transform = LocalTransform::standard();
    if args.corrupt_theta {
        transform.theta[0][1] = -transform.theta[0][1];
    }
    let report_line = |pass: bool, label: &str| {
        println!("[{}] {label}", if pass { "PASS" } else { "FAIL" });
        pass
    };

    let duality = report_line(check_duality_with(&transform), "duality contraction");

    let mut seq = Vec::new();
    for r in 1..=args.seq_max_r {
        let pass = check_seq_lemma_with(r, &transform)?;
        seq.push(report_line(pass, &format!("skewed equality, arity {r}")));
    }

    let priors = [0.1, 0.3, 0.5, 0.7, 0.9];
    let mut delta = Vec::new();
    for r in 1..=args.delta_max_r {
        let mut pass = true;
        for pivot in [false, true] {
            for b in 0..2u8 {
                for q in priors {
                    pass &= check_delta_lemma_with(r, pivot, b, q, &transform)?;
                }
            }
        }
        delta.push(report_line(
            pass,
            &format!("delta contraction, arity {r} (both branches, both bits, 5 priors)"),
        ));
    }

    let mismatches = worked_example_mismatches();
    let worked_example = report_line(mismatches.is_empty(), "worked 3x2 instance");
    for line in &mismatches {
        println!("    {line}");
    }

    let pass = duality && seq.iter().all(|&p| p) && delta.iter().all(|&p| p) && worked_example;
    let summary = VerifySummary {
        pass,
        duality,
        seq,
        delta,
        worked_example,
        mismatches,
    };
    println!(
        "{}",
        serde_json::to_string(&summary).expect("summary serializes")
    );
    if pass {
        Ok(())
    } else {
        Err(CliError::VerificationFailed)
    }
}

fn run_bench(args: BenchArgs) -> Result<(), CliError> {
    if args.repeat == 0 {
        return Err(CliError::Usage("--repeat must be at least 1".into()));
    }
    let (graph, priors) = load_instance(&args.graph)?;
    let observation = read_json::<ObservationFile>(&args.obs)?.into_observation()?;
    let rp = reduce(&graph, &observation, &priors)?;
    let (n, m) = (rp.n(), rp.m());
    let oracle_opts = OracleOptions {
        max_objects: args.max_naive_objects,
        ..OracleOptions::default()
    };
    let dual_opts = DualOptions {
        max_tests: args.max_dual_tests,
        workers: args.workers,
    };

    let mut records = Vec::new();
    for method in &args.methods {
        let name = format!("{}", Method::from(*method));
        let infeasible = match method {
            MethodArg::Naive => n > oracle_opts.max_objects,
            MethodArg::Dual | MethodArg::DualFast => m > dual_opts.max_tests,
        };
        if infeasible {
            println!("{name}: infeasible (n={n}, m={m} exceeds the configured cap)");
            records.push(BenchRecord {
                method: name,
                n,
                m,
                feasible: false,
                wall_time_s: None,
                checksum: None,
            });
            continue;
        }
        let mut times = Vec::with_capacity(args.repeat);
        let mut checksum = 0.0;
        for _ in 0..args.repeat {
            let start = Instant::now();
            let report = posterior_report(
                &graph,
                &priors,
                &observation,
                (*method).into(),
                &oracle_opts,
                &dual_opts,
            )?;
            times.push(start.elapsed().as_secs_f64());
            checksum = report.objects.iter().map(|o| o.p_positive).sum();
        }
        times.sort_by(|a, b| a.total_cmp(b));
        let median = times[times.len() / 2];
        println!(
            "{name}: n={n} m={m} median {median:.6} s over {} run(s), checksum {checksum:.9}",
            args.repeat
        );
        records.push(BenchRecord {
            method: name,
            n,
            m,
            feasible: true,
            wall_time_s: Some(median),
            checksum: Some(checksum),
        });
    }
    if let Some(out) = &args.out {
        write_json(out, &records)?;
    }
    Ok(())
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::GenGraph(args) => run_gen_graph(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Infer(args) => run_infer(args),
        Command::Verify(args) => run_verify(args),
        Command::Bench(args) => run_bench(args),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
