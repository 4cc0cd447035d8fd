use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::bail;
use clap::ValueEnum;

use sparsecolor::graph::{replay, to_stream, QueryOracle};
use sparsecolor::harness::{color_offline, verify_coloring, DecompositionMode, OfflineConfig};
use sparsecolor::hashing::derive_seed;
use sparsecolor::mpc::{default_memory_cap, run_mpc, MpcConfig};
use sparsecolor::palette::{Palette, PaletteSpec};
use sparsecolor::query_runner::{run_query_model, QueryRunConfig};
use sparsecolor::sketch::Fidelity;
use sparsecolor::stream_runner::{run_stream, StreamRunConfig};
use sparsecolor::{Color, Graph, SCHEMA_VERSION};

use crate::files::{open_out, read_input, ColoringFile, Input};
use crate::FailureReport;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Offline,
    Stream,
    Query,
    Mpc,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Offline => "offline",
            Mode::Stream => "stream",
            Mode::Query => "query",
            Mode::Mpc => "mpc",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FidelityName {
    Ideal,
    Sketch,
}

#[derive(clap::Args)]
pub struct ColorArgs {
    /// Edge list, or a stream file for `--mode stream`.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "offline")]
    mode: Mode,
    /// uniform, uniform:K or bernoulli:ALPHA,EPS
    #[arg(long, default_value = "uniform")]
    palette: PaletteSpec,
    /// Fail instead of leaving a vertex's sampled list.
    #[arg(long)]
    strict_list: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0 / 6.0)]
    eps: f64,
    /// Coloring JSON (stdout by default).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the mode's report JSON here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Offline: use the sampled decomposition.
    #[arg(long)]
    sampled: bool,
    /// Stream: churn applied when the input is an edge list.
    #[arg(long, default_value_t = 0.0)]
    churn: f64,
    #[arg(long, value_enum, default_value = "ideal")]
    fidelity: FidelityName,
    /// Stream: declared degree bound; defaults to the file header or the graph.
    #[arg(long)]
    delta: Option<usize>,
    /// Stream: ignore any known bound and spend a pass counting degrees.
    #[arg(long, conflicts_with = "delta")]
    estimate_delta: bool,
    /// Stream: vertex count when the stream file has no header.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 16)]
    machines: usize,
    /// MPC words per machine; defaults to 8·n·ln²n.
    #[arg(long)]
    cap: Option<u64>,
    /// MPC: derive randomness privately (three rounds).
    #[arg(long)]
    private: bool,
}

struct Colored {
    graph: Graph,
    colors: Vec<Color>,
    palette: Option<Palette>,
    report: serde_json::Value,
}

pub fn run(a: ColorArgs) -> anyhow::Result<ExitCode> {
    let input = read_input(&a.input)?;
    if a.mode != Mode::Stream && matches!(input, Input::Stream { .. }) {
        bail!("stream files can only be colored with --mode stream");
    }
    let out = match color(&a, input) {
        Ok(c) => c,
        Err(e) => return Ok(FailureReport::from_error(a.mode.name(), &e).emit()),
    };
    let strict = a.strict_list && out.palette.is_some();
    let verify = verify_coloring(&out.graph, &out.colors, out.palette.as_ref(), strict);
    if let Some(path) = &a.report {
        serde_json::to_writer_pretty(open_out(Some(path))?, &out.report)?;
    }
    if !verify.is_clean() {
        let mut failure = FailureReport::new(a.mode.name(), "invalid_coloring", "output failed verification");
        failure.detail = Some(serde_json::to_value(&verify)?);
        return Ok(failure.emit());
    }
    let file = ColoringFile {
        schema_version: SCHEMA_VERSION,
        mode: a.mode.name().into(),
        n: out.graph.n(),
        delta: out.graph.max_degree(),
        colors: out.colors,
        palette: out.palette.as_ref().map(Palette::to_json),
        verify,
        report: out.report,
    };
    let mut w = open_out(a.output.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &file)?;
    writeln!(w)?;
    Ok(ExitCode::SUCCESS)
}

fn json(v: &impl serde::Serialize) -> sparsecolor::Result<serde_json::Value> {
    Ok(serde_json::to_value(v)?)
}

fn color(a: &ColorArgs, input: Input) -> sparsecolor::Result<Colored> {
    match a.mode {
        Mode::Offline => {
            let Input::Graph(graph) = input else { unreachable!() };
            let mut cfg = OfflineConfig::new(a.seed);
            cfg.palette = a.palette;
            cfg.eps = a.eps;
            cfg.pipeline.strict_list = a.strict_list;
            if a.sampled {
                cfg.decomposition = DecompositionMode::Sampled;
            }
            let out = color_offline(&graph, &cfg)?;
            Ok(Colored {
                report: json(&out.report)?,
                colors: out.colors,
                palette: Some(out.palette),
                graph,
            })
        }
        Mode::Stream => {
            let (n, declared, events) = match input {
                Input::Graph(g) => {
                    let events = to_stream(&g, a.churn, derive_seed(a.seed, "stream"))?;
                    (g.n(), Some(g.max_degree()), events)
                }
                Input::Stream { header, events } => {
                    let n = a.n.or(header.n).unwrap_or_else(|| {
                        events.iter().map(|e| e.edge.hi() as usize + 1).max().unwrap_or(0)
                    });
                    (n, header.delta, events)
                }
            };
            let graph = replay(n, &events)?;
            let mut cfg = StreamRunConfig::new(n, 0, a.seed);
            cfg.delta = if a.estimate_delta { None } else { a.delta.or(declared) };
            cfg.palette = a.palette;
            cfg.eps = a.eps;
            cfg.fidelity = match a.fidelity {
                FidelityName::Ideal => Fidelity::Ideal,
                FidelityName::Sketch => Fidelity::Sketch,
            };
            cfg.pipeline.strict_list = a.strict_list;
            let out = run_stream(&events, &cfg)?;
            Ok(Colored {
                report: json(&out.report)?,
                colors: out.colors,
                palette: Some((*out.palette).clone()),
                graph,
            })
        }
        Mode::Query => {
            let Input::Graph(graph) = input else { unreachable!() };
            let mut cfg = QueryRunConfig::new(a.seed);
            cfg.palette = a.palette;
            cfg.eps = a.eps;
            cfg.pipeline.strict_list = a.strict_list;
            let mut oracle = QueryOracle::new(&graph);
            let out = run_query_model(&mut oracle, graph.n(), graph.max_degree(), &cfg)?;
            Ok(Colored {
                report: json(&out.report)?,
                colors: out.colors,
                palette: None,
                graph,
            })
        }
        Mode::Mpc => {
            let Input::Graph(graph) = input else { unreachable!() };
            let cap = a.cap.unwrap_or_else(|| default_memory_cap(graph.n(), 8.0));
            let mut cfg = MpcConfig::new(a.machines, cap, !a.private, a.seed);
            cfg.palette = a.palette;
            cfg.eps = a.eps;
            cfg.pipeline.strict_list = a.strict_list;
            let out = run_mpc(&graph, &cfg)?;
            Ok(Colored {
                report: json(&out.report)?,
                colors: out.colors,
                palette: None,
                graph,
            })
        }
    }
}
