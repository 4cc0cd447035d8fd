//! Command-line front end: generators, the four coloring modes, verification,
//! stream conversion, decomposition dumps and benchmark presets.

mod color;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sparsecolor::decomposition::{
    exact_extended_decomposition, verify_decomposition, DecompositionBounds, DecompositionDump,
    HssDecomposition,
};
use sparsecolor::graph::generate::{generate, GeneratorSpec, GraphModel};
use sparsecolor::graph::{to_stream, write_stream, StreamHeader};
use sparsecolor::harness::acceptance::{run_criterion, Preset, CRITERIA};
use sparsecolor::harness::{decompose, verify_coloring, DecompositionMode, OfflineConfig};
use sparsecolor::hashing::derive_seed;
use sparsecolor::SCHEMA_VERSION;

use crate::color::ColorArgs;
use crate::files::{open_out, read_graph, ColoringFile};

/// Exit code for algorithmic failures and invalid outputs. Usage errors use
/// clap's code 2; I/O and parse errors use 1.
pub const FAILURE_EXIT: u8 = 3;

#[derive(Parser)]
#[command(name = "sparsecolor", version, about = "Palette-sparsification (Δ+1) coloring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it as an edge list.
    Gen(GenArgs),
    /// Color a graph (or stream) in one of the four models.
    Color(ColorArgs),
    /// Check a coloring file against a graph.
    Verify(VerifyArgs),
    /// Convert a graph into a dynamic stream with churn.
    Stream(StreamArgs),
    /// Run acceptance presets and write a CSV table.
    Bench(BenchArgs),
    /// Compute, dump or check a sparse/dense decomposition.
    Decomp(DecompArgs),
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum ModelName {
    GnpCapped,
    RegularLike,
    CliqueCollection,
    ColoringHard,
    MatchingHard,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, value_enum, required_unless_present = "spec")]
    model: Option<ModelName>,
    /// JSON generator spec; the only way to build a union.
    #[arg(long, conflicts_with = "model")]
    spec: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability for gnp_capped; defaults to delta/(n-1).
    #[arg(long)]
    p: Option<f64>,
    /// Degree cap (gnp_capped) or target degree (regular_like).
    #[arg(long)]
    delta: Option<usize>,
    /// List size of the negative-control family; clique size defaults to K+2.
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    graph: PathBuf,
    coloring: PathBuf,
    /// Also require every color to come from the vertex's sampled list.
    #[arg(long)]
    strict_list: bool,
}

#[derive(clap::Args)]
struct StreamArgs {
    graph: PathBuf,
    /// Extra pairs inserted and later deleted, as a fraction of m.
    #[arg(long, default_value_t = 0.0)]
    churn: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetName {
    Acceptance,
    Quick,
}

#[derive(clap::Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "quick")]
    preset: PresetName,
    /// Comma-separated criterion numbers; all by default.
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<u8>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct DecompArgs {
    graph: PathBuf,
    #[arg(long, default_value_t = 1.0 / 6.0)]
    eps: f64,
    /// Use the sampled decomposition instead of the exact one.
    #[arg(long)]
    sampled: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the decomposition as JSON.
    #[arg(long)]
    dump: Option<PathBuf>,
    /// Verify this dump instead of computing a decomposition.
    #[arg(long, conflicts_with_all = ["sampled", "dump"])]
    check: Option<PathBuf>,
}

/// Printed on stdout when a run fails for algorithmic reasons.
#[derive(Serialize)]
pub struct FailureReport {
    pub schema_version: u32,
    pub status: &'static str,
    pub command: &'static str,
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

impl FailureReport {
    pub fn new(command: &'static str, kind: impl Into<String>, message: impl Into<String>) -> Self {
        FailureReport {
            schema_version: SCHEMA_VERSION,
            status: "failed",
            command,
            kind: kind.into(),
            message: message.into(),
            detail: None,
        }
    }

    pub fn from_error(command: &'static str, e: &sparsecolor::Error) -> Self {
        Self::new(command, e.kind(), e.to_string())
    }

    pub fn emit(&self) -> ExitCode {
        println!("{}", serde_json::to_string_pretty(self).expect("report serializes"));
        ExitCode::from(FAILURE_EXIT)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Color(a) => color::run(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Stream(a) => cmd_stream(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Decomp(a) => cmd_decomp(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn need(value: Option<usize>, flag: &str) -> anyhow::Result<usize> {
    value.with_context(|| format!("--{flag} is required for this model"))
}

fn cmd_gen(a: GenArgs) -> anyhow::Result<ExitCode> {
    let spec = match (a.spec, a.model) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<GeneratorSpec>(&text).context("parsing generator spec")?
        }
        (None, Some(model)) => {
            let model = match model {
                ModelName::GnpCapped => {
                    let n = need(a.n, "n")?;
                    let max_degree = need(a.delta, "delta")?;
                    let p = a.p.unwrap_or(max_degree as f64 / n.saturating_sub(1).max(1) as f64);
                    GraphModel::GnpCapped { n, p, max_degree }
                }
                ModelName::RegularLike => GraphModel::RegularLike {
                    n: need(a.n, "n")?,
                    degree: need(a.delta, "delta")?,
                },
                ModelName::CliqueCollection => {
                    let clique_size = match (a.size, a.k) {
                        (Some(s), _) => s,
                        (None, Some(k)) => k + 2,
                        (None, None) => bail!("--size or --K is required for clique_collection"),
                    };
                    GraphModel::CliqueCollection {
                        clique_size,
                        count: need(a.count, "count")?,
                    }
                }
                ModelName::ColoringHard => GraphModel::ColoringHard { n: need(a.n, "n")? },
                ModelName::MatchingHard => GraphModel::MatchingHard { n: need(a.n, "n")? },
            };
            GeneratorSpec::new(model, a.seed)
        }
        (None, None) => bail!("either --model or --spec is required"),
    };
    let graph = match generate(&spec) {
        Ok(g) => g,
        Err(e) => return Ok(FailureReport::from_error("gen", &e).emit()),
    };
    graph.write_edge_list(open_out(a.output.as_deref())?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: VerifyArgs) -> anyhow::Result<ExitCode> {
    let graph = read_graph(&a.graph)?;
    let file = ColoringFile::read(&a.coloring)?;
    let palette = file.palette()?;
    if a.strict_list && palette.is_none() {
        bail!("--strict-list needs a coloring file that carries its palette");
    }
    let report = verify_coloring(&graph, &file.colors, palette.as_ref(), a.strict_list);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.is_clean() && file.colors.len() == graph.n() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FAILURE_EXIT)
    })
}

fn cmd_stream(a: StreamArgs) -> anyhow::Result<ExitCode> {
    let graph = read_graph(&a.graph)?;
    let events = match to_stream(&graph, a.churn, derive_seed(a.seed, "stream")) {
        Ok(e) => e,
        Err(e) => return Ok(FailureReport::from_error("stream", &e).emit()),
    };
    let header = StreamHeader {
        n: Some(graph.n()),
        delta: Some(graph.max_degree()),
    };
    write_stream(open_out(a.output.as_deref())?, header, &events)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(a: BenchArgs) -> anyhow::Result<ExitCode> {
    let preset = match a.preset {
        PresetName::Acceptance => Preset::Acceptance,
        PresetName::Quick => Preset::Quick,
    };
    let ids: Vec<u8> = if a.criteria.is_empty() { CRITERIA.to_vec() } else { a.criteria };
    if let Some(bad) = ids.iter().find(|c| !CRITERIA.contains(c)) {
        bail!("unknown criterion {bad}");
    }
    let mut out = csv::Writer::from_writer(open_out(a.output.as_deref())?);
    for id in ids {
        for row in run_criterion(id, preset) {
            eprintln!("{}", row.line());
            out.serialize(&row)?;
        }
        out.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_decomp(a: DecompArgs) -> anyhow::Result<ExitCode> {
    let graph = read_graph(&a.graph)?;
    let (decomp, bounds): (HssDecomposition, _) = if let Some(path) = &a.check {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let dump: DecompositionDump = serde_json::from_str(&text).context("parsing decomposition")?;
        let eps = dump.eps;
        (dump.into(), DecompositionBounds::exact(eps))
    } else if a.sampled {
        let mut cfg = OfflineConfig::new(a.seed);
        cfg.eps = a.eps;
        cfg.decomposition = DecompositionMode::Sampled;
        match decompose(&graph, &cfg) {
            Ok(d) => (d, DecompositionBounds::sampled(a.eps / 10.0)),
            Err(e) => return Ok(FailureReport::from_error("decomp", &e).emit()),
        }
    } else {
        match exact_extended_decomposition(&graph, a.eps) {
            Ok(d) => (d, DecompositionBounds::exact(a.eps)),
            Err(e) => return Ok(FailureReport::from_error("decomp", &e).emit()),
        }
    };
    if let Some(path) = &a.dump {
        serde_json::to_writer_pretty(open_out(Some(path))?, &decomp.dump(&graph))?;
    }
    let report = verify_decomposition(&graph, &decomp, bounds);
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.is_valid() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FAILURE_EXIT)
    })
}
