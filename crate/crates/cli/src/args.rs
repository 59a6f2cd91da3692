use std::path::PathBuf;

use affred::baselines::Standardization;
use affred::SearchOptions;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::{CliError, CliResult, Command, GammaMode, InputSource, PlotOptions, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "affred", version, about = "Origin-centric affine reduction of dimensionality")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Center the data and write its canonical form H, Λ^½, G' and rank.
    Canonize(Common),
    /// Find the best rank-q origin-centric image Z = HB.
    Reduce(Common),
    /// Classical principal components with a biplot.
    Pca(Common),
    /// Affine commutative median by hull peeling.
    Median(Common),
    /// PCA and the origin-centric reduction side by side (q = 2).
    Compare(Common),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StandardizeArg {
    None,
    Mean,
    Correlation,
}

#[derive(Debug, Args)]
pub struct Common {
    /// CSV file with a header row.
    #[arg(long, group = "source", required_unless_present = "fixture")]
    pub input: Option<PathBuf>,
    /// Bundled dataset: hexagon, grid6 or longley.
    #[arg(long, group = "source")]
    pub fixture: Option<String>,
    /// Column with point labels (default: first non-numeric column).
    #[arg(long)]
    pub label_column: Option<String>,
    /// Numeric column with point multiplicities.
    #[arg(long)]
    pub weights: Option<String>,
    /// Origin: mean, point:<i> (0-based), median or file:<path>.
    #[arg(long, default_value = "mean")]
    pub gamma: GammaMode,
    /// Target dimension.
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    /// Relative singular-value cutoff for the canonical rank.
    #[arg(long, default_value_t = affred::canonical::DEFAULT_RANK_TOLERANCE)]
    pub rank_tol: f64,
    /// Number of random starts.
    #[arg(long, default_value_t = SearchOptions::default().n_starts)]
    pub starts: usize,
    #[arg(long, default_value_t = SearchOptions::default().seed)]
    pub seed: u64,
    /// Worker threads for the multi-start search (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Column scaling; pca and compare default to correlation, the rest to none.
    #[arg(long, value_enum)]
    pub standardize: Option<StandardizeArg>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Marker area proportional to distance from the origin.
    #[arg(long)]
    pub plot_radius_size: bool,
    /// Omit variable arrows from biplots.
    #[arg(long)]
    pub no_axis_arrows: bool,
}

impl Cli {
    pub fn into_run(self) -> CliResult<(Command, RunConfig)> {
        let (command, args) = match self.command {
            Sub::Canonize(a) => (Command::Canonize, a),
            Sub::Reduce(a) => (Command::Reduce, a),
            Sub::Pca(a) => (Command::Pca, a),
            Sub::Median(a) => (Command::Median, a),
            Sub::Compare(a) => (Command::Compare, a),
        };
        Ok((command, args.into_config(command)?))
    }
}

impl Common {
    pub fn into_config(self, command: Command) -> CliResult<RunConfig> {
        let input = match (self.input, self.fixture) {
            (Some(p), None) => InputSource::Path(p),
            (None, Some(f)) => InputSource::Fixture(f),
            _ => return Err(CliError::Input("give exactly one of --input and --fixture".into())),
        };
        let standardization = match self.standardize {
            None => command.default_standardization(),
            Some(StandardizeArg::None) => None,
            Some(StandardizeArg::Mean) => Some(Standardization::Mean),
            Some(StandardizeArg::Correlation) => Some(Standardization::Correlation),
        };
        let mut config = RunConfig::new(input, self.out);
        config.label_column = self.label_column;
        config.weights_column = self.weights;
        config.gamma = self.gamma;
        config.q = self.q;
        config.rank_tolerance = self.rank_tol;
        config.standardization = standardization;
        config.search = SearchOptions { n_starts: self.starts, seed: self.seed, workers: self.workers, ..Default::default() };
        config.plot = PlotOptions { radius_size: self.plot_radius_size, axis_arrows: !self.no_axis_arrows };
        Ok(config)
    }
}
