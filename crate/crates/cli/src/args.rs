use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kepler_core::geometry::{Aabb, Point3};
use kepler_core::scoring::ScoreScheme;
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "kepler", version, about = "Local density decompositions and scores of sphere packings")]
pub struct Cli {
    #[command(flatten)]
    pub out: OutputArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct OutputArgs {
    /// Output file (stdout when absent).
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Emit CSV instead of JSON.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Manifest path (default: next to the output, or ./manifest.json).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Generate a packing.
    Gen(GenArgs),
    /// Build the hybrid decomposition and report its pieces and anomalies.
    Decompose(Selection),
    /// Score decomposition stars.
    Score(ScoreArgs),
    /// Empirical score bound θ and the resulting density bound.
    Bound(BoundArgs),
    /// Run the invariant checks.
    Verify(VerifyArgs),
    /// Summarize result files written by the other commands.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lattice {
    Fcc,
    Hcp,
    Dodeca,
    Pentaprism,
    Random,
    JitteredFcc,
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    /// Packing family.
    #[arg(long, value_enum)]
    pub lattice: Lattice,
    /// Lattice shells around the origin (fcc, hcp, jittered-fcc).
    #[arg(long, default_value_t = 6)]
    pub shells: usize,
    /// Box edge (random).
    #[arg(long, default_value_t = 40.0)]
    pub edge: f64,
    /// RNG seed (random, jittered-fcc).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Nearest-neighbor distance (jittered-fcc).
    #[arg(long, default_value_t = 2.1)]
    pub spacing: f64,
    /// Largest displacement (jittered-fcc).
    #[arg(long, default_value_t = 0.04)]
    pub jitter: f64,
    /// Pentagon radius (pentaprism).
    #[arg(long)]
    pub prism_radius: Option<f64>,
    /// Pentagon height above the central sphere (pentaprism).
    #[arg(long)]
    pub prism_half_height: Option<f64>,
    /// Leave out the two axial spheres (pentaprism).
    #[arg(long)]
    pub no_axial: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Focus {
    pub center: Point3,
    pub half: f64,
}

impl Focus {
    pub fn aabb(&self) -> Aabb {
        Aabb::cube(self.center, self.half)
    }
}

fn parse_focus(s: &str) -> Result<Focus, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [x, y, z, h] if h > 0.0 && v.iter().all(|c| c.is_finite()) => {
            Ok(Focus { center: Point3::new(x, y, z), half: h })
        }
        _ => Err("expected x,y,z,half with half > 0".into()),
    }
}

#[derive(Debug, Args, Serialize)]
pub struct Selection {
    /// Packing JSON file.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Vertices to work on (default: every interior vertex, within the focus if given).
    #[arg(long, value_delimiter = ',')]
    pub vertices: Vec<usize>,
    /// Restrict the work to the cube x,y,z,half.
    #[arg(long, value_parser = parse_focus)]
    pub focus: Option<Focus>,
}

#[derive(Debug, Args, Serialize)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub sel: Selection,
    /// Scheme: hf, voronoi[:B], fejes-toth[:t], hsiang, hales-delaunay (repeatable; default all).
    #[arg(long = "scheme")]
    pub schemes: Vec<ScoreScheme>,
    /// Include region weights and faces in JSON output.
    #[arg(long)]
    pub detail: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct BoundArgs {
    /// Packing JSON file; optional when --theta is given.
    #[arg(short, long)]
    pub input: Option<PathBuf>,
    /// Vertices whose stars enter θ (default: every interior vertex, within the focus if given).
    #[arg(long, value_delimiter = ',')]
    pub vertices: Vec<usize>,
    /// Restrict the work to the cube x,y,z,half.
    #[arg(long, value_parser = parse_focus)]
    pub focus: Option<Focus>,
    /// Scheme: hf, voronoi[:B], fejes-toth[:t], hsiang, hales-delaunay (repeatable; default all).
    #[arg(long = "scheme")]
    pub schemes: Vec<ScoreScheme>,
    /// Evaluate the bound at this θ instead of estimating it.
    #[arg(long)]
    pub theta: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub sel: Selection,
    /// Sample points for the coverage check.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    /// Samples per region for the oracle agreement check.
    #[arg(long, default_value_t = 200_000)]
    pub oracle_samples: usize,
    /// Regions of each kind compared against the oracle.
    #[arg(long, default_value_t = 6)]
    pub oracle_regions: usize,
    /// Agreement threshold in standard errors.
    #[arg(long, default_value_t = 4.0)]
    pub sigmas: f64,
    /// Base seed of the Monte Carlo checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest telescoping cube side; 0 skips the check.
    #[arg(long, default_value_t = 6.0)]
    pub telescoping_side: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// Result files written by decompose, score, bound or verify.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}
