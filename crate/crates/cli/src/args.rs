use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use spatial_influence::InfluenceForm;

#[derive(Debug, Parser)]
#[command(name = "spinf", version, about = "Local influence of locations on Moran's I")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// LIF of every location of a dataset.
    #[command(args_override_self = true)]
    Lif(LifArgs),
    /// Local Moran's I with permutation p-values.
    #[command(args_override_self = true)]
    Lisa(LisaArgs),
    /// Monte Carlo LIF experiment on SAR fields over a lattice.
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Influence surfaces over (z1, lag sum) and (z1, MC).
    #[command(args_override_self = true)]
    Surface(SurfaceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Recentered,
    Simplified,
}

impl From<FormArg> for InfluenceForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Recentered => InfluenceForm::Recentered,
            FormArg::Simplified => InfluenceForm::Simplified,
        }
    }
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("weights_source").required(true).args(["weights", "lattice"])))]
pub struct DataArgs {
    /// Attribute CSV (comma separated, header row).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "id")]
    pub id_col: String,
    #[arg(long, default_value = "value")]
    pub value_col: String,
    /// GAL contiguity file.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Lattice `ROWSxCOLS`; input rows are cells in row-major order.
    #[arg(long)]
    pub lattice: Option<String>,
    #[arg(long, requires = "lattice")]
    pub torus: bool,
    /// Queen instead of rook contiguity for --lattice.
    #[arg(long, requires = "lattice")]
    pub queen: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also write SVG maps (lattice inputs only).
    #[arg(long)]
    pub svg: bool,
    /// `reds`, `greys` or `#rrggbb:#rrggbb`.
    #[arg(long, default_value = "reds")]
    pub palette: String,
}

#[derive(Debug, Clone, Args)]
pub struct InfluenceArgs {
    /// Integration half width in standard deviations.
    #[arg(long, default_value_t = 2.0)]
    pub half_width: f64,
    /// Use exact contamination of each location's own value.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, value_enum, default_value_t = FormArg::Recentered)]
    pub form: FormArg,
    /// Points of the exported influence curves (odd).
    #[arg(long, default_value_t = 81)]
    pub curve_points: usize,
}

#[derive(Debug, Clone, Args)]
pub struct LifArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub influence: InfluenceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// GeoJSON FeatureCollection to annotate with the results.
    #[arg(long)]
    pub geojson: Option<PathBuf>,
    /// Feature property matched against ids (defaults to --id-col).
    #[arg(long)]
    pub join_key: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct LisaArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 999)]
    pub permutations: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub geojson: Option<PathBuf>,
    #[arg(long)]
    pub join_key: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value = "10x10")]
    pub lattice: String,
    #[arg(long)]
    pub torus: bool,
    #[arg(long)]
    pub queen: bool,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 1000)]
    pub replications: usize,
    #[command(flatten)]
    pub influence: InfluenceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SurfaceArgs {
    /// Number of locations the surfaces refer to.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Comma separated MC levels.
    #[arg(long, default_value = "-0.7,-0.4667,-0.2333,0,0.2333,0.4667,0.7", allow_hyphen_values = true)]
    pub mc_levels: String,
    /// `LO:HI`
    #[arg(long, default_value = "-2:2", allow_hyphen_values = true)]
    pub z1_range: String,
    #[arg(long, default_value = "-2:2", allow_hyphen_values = true)]
    pub lag_range: String,
    #[arg(long, default_value = "-0.7:0.7", allow_hyphen_values = true)]
    pub mc_range: String,
    /// `Z1POINTSxLAGPOINTS`
    #[arg(long, default_value = "41x41")]
    pub grid: String,
    #[arg(long, default_value_t = 29)]
    pub mc_points: usize,
    #[arg(long, value_enum, default_value_t = FormArg::Recentered)]
    pub form: FormArg,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}
