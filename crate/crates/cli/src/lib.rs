//! Command-line pipeline: read a scatter, center it, build its canonical
//! form, then reduce, run PCA, peel a median or compare the two reductions.
//! Each command writes a JSON report plus CSV and SVG artifacts.

pub mod args;
pub mod commands;
pub mod input;
pub mod report;
pub mod svg;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use affred::baselines::Standardization;
use affred::SearchOptions;
use serde::{Deserialize, Serialize};

pub use commands::{run, Command};
pub use report::RunReport;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input data, flags or configuration.
    #[error("{0}")]
    Input(String),
    /// A failure inside the numerical pipeline or while writing results.
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Internal(_) => "internal",
        }
    }

    /// Machine-readable form written to stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": { "kind": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() }
        })
        .to_string()
    }
}

impl From<affred::Error> for CliError {
    fn from(e: affred::Error) -> Self {
        use affred::Error as E;
        match e {
            E::Input(_) | E::Degenerate(_) | E::Load(_) => CliError::Input(e.to_string()),
            E::Search { .. } | E::Solver { .. } => CliError::Internal(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSource {
    Path(PathBuf),
    Fixture(String),
}

/// Origin choice: the centroid, one of the points, the affine median, or a
/// vector of weights read from a file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GammaMode {
    Mean,
    Point(usize),
    Median,
    File(PathBuf),
}

impl fmt::Display for GammaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaMode::Mean => write!(f, "mean"),
            GammaMode::Point(i) => write!(f, "point:{i}"),
            GammaMode::Median => write!(f, "median"),
            GammaMode::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for GammaMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mean" => Ok(GammaMode::Mean),
            "median" => Ok(GammaMode::Median),
            _ => {
                if let Some(i) = s.strip_prefix("point:") {
                    i.parse().map(GammaMode::Point).map_err(|_| format!("bad point index in {s:?}"))
                } else if let Some(p) = s.strip_prefix("file:").filter(|p| !p.is_empty()) {
                    Ok(GammaMode::File(PathBuf::from(p)))
                } else {
                    Err(format!("unknown gamma mode {s:?}; expected mean, point:<i>, median or file:<path>"))
                }
            }
        }
    }
}

impl TryFrom<String> for GammaMode {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<GammaMode> for String {
    fn from(g: GammaMode) -> String {
        g.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotOptions {
    /// Marker area proportional to the recovered radius.
    pub radius_size: bool,
    /// Draw variable arrows on biplots.
    pub axis_arrows: bool,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions { radius_size: false, axis_arrows: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: InputSource,
    /// Column holding point labels; by default the first non-numeric one.
    pub label_column: Option<String>,
    /// Numeric column holding point multiplicities.
    pub weights_column: Option<String>,
    pub gamma: GammaMode,
    pub q: usize,
    pub rank_tolerance: f64,
    /// Column scaling applied before anything else.
    pub standardization: Option<Standardization>,
    pub search: SearchOptions,
    pub out: PathBuf,
    pub plot: PlotOptions,
}

impl RunConfig {
    pub fn new(input: InputSource, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            input,
            label_column: None,
            weights_column: None,
            gamma: GammaMode::Mean,
            q: 2,
            rank_tolerance: affred::canonical::DEFAULT_RANK_TOLERANCE,
            standardization: None,
            search: SearchOptions::default(),
            out: out.into(),
            plot: PlotOptions::default(),
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.q == 0 {
            return Err(CliError::Input("q must be at least 1".into()));
        }
        self.search.validate()?;
        Ok(())
    }
}

/// Parses `argv`, runs the command and returns the process exit code. Errors
/// go to stderr as JSON.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let err = CliError::Input(e.render().to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    let (command, config) = match cli.into_run() {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{}", e.to_json());
            return e.exit_code();
        }
    };
    match run(command, &config) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
