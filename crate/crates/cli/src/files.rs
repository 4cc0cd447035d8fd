use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use sparsecolor::graph::{read_stream, StreamEvent, StreamHeader};
use sparsecolor::harness::VerifyReport;
use sparsecolor::palette::{Palette, PaletteFile};
use sparsecolor::{Color, Graph};

pub fn open_out(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open_in(path: &Path) -> anyhow::Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

pub fn read_graph(path: &Path) -> anyhow::Result<Graph> {
    Graph::read_edge_list(open_in(path)?).with_context(|| format!("reading graph {}", path.display()))
}

/// A coloring input: an edge list, or a stream file ("+ u v" / "- u v").
pub enum Input {
    Graph(Graph),
    Stream {
        header: StreamHeader,
        events: Vec<StreamEvent>,
    },
}

pub fn read_input(path: &Path) -> anyhow::Result<Input> {
    let mut first = String::new();
    {
        let mut r = open_in(path)?;
        loop {
            first.clear();
            if r.read_line(&mut first)? == 0 || !first.trim().is_empty() {
                break;
            }
        }
    }
    let t = first.trim_start();
    let is_stream = t.starts_with('+') || t.starts_with('-') || (t.starts_with('#') && t.contains("n="));
    if is_stream {
        let (header, events) =
            read_stream(open_in(path)?).with_context(|| format!("reading stream {}", path.display()))?;
        Ok(Input::Stream { header, events })
    } else {
        Ok(Input::Graph(read_graph(path)?))
    }
}

/// What `color` writes and `verify` reads.
#[derive(Serialize, Deserialize)]
pub struct ColoringFile {
    pub schema_version: u32,
    pub mode: String,
    pub n: usize,
    pub delta: usize,
    pub colors: Vec<Color>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub palette: Option<PaletteFile>,
    pub verify: VerifyReport,
    pub report: serde_json::Value,
}

impl ColoringFile {
    pub fn read(path: &Path) -> anyhow::Result<Self> {
        serde_json::from_reader(open_in(path)?).with_context(|| format!("parsing coloring {}", path.display()))
    }

    pub fn palette(&self) -> anyhow::Result<Option<Palette>> {
        self.palette
            .as_ref()
            .map(|p| Palette::from_json(p).context("rebuilding palette"))
            .transpose()
    }
}
