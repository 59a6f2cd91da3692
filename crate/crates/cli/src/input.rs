//! CSV and fixture ingestion, and origin selection.

use std::path::Path;

use affred::centering::{affine_median_gamma, mean_gamma, point_gamma};
use affred::fixtures::{self, LONGLEY_VARIABLES};
use affred::{CenteringVector, Configuration, MedianResult};
use nalgebra::DMatrix;

use crate::{CliError, CliResult, GammaMode, InputSource, RunConfig};

/// A configuration together with the names of its coordinate columns.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub configuration: Configuration,
    pub variables: Vec<String>,
}

pub fn load(config: &RunConfig) -> CliResult<Dataset> {
    match &config.input {
        InputSource::Fixture(name) => {
            if config.label_column.is_some() || config.weights_column.is_some() {
                return Err(CliError::Input("label and weight columns apply only to CSV input".into()));
            }
            fixture(name)
        }
        InputSource::Path(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            parse_csv(&text, config.label_column.as_deref(), config.weights_column.as_deref())
        }
    }
}

pub fn fixture(name: &str) -> CliResult<Dataset> {
    let (configuration, variables) = match name {
        "hexagon" => (fixtures::hexagon_h(), vec!["h1".into(), "h2".into()]),
        "grid6" => (fixtures::six_point_grid_h(), vec!["h1".into(), "h2".into()]),
        "longley" => (fixtures::longley()?, LONGLEY_VARIABLES.iter().map(|s| s.to_string()).collect()),
        _ => return Err(CliError::Input(format!("unknown fixture {name:?}; available: hexagon, grid6, longley"))),
    };
    Ok(Dataset { configuration, variables })
}

/// Reads a headed CSV. Every column other than the label and weight columns
/// must be numeric.
pub fn parse_csv(text: &str, label_column: Option<&str>, weights_column: Option<&str>) -> CliResult<Dataset> {
    let bad = |msg: String| CliError::Input(msg);
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| bad(format!("cannot read CSV header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let rows: Vec<Vec<String>> = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<Result<_, _>>()
        .map_err(|e| bad(format!("malformed CSV: {e}")))?;
    if header.is_empty() || rows.is_empty() {
        return Err(bad("CSV needs a header row and at least one data row".into()));
    }
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| bad(format!("no column named {name:?}; columns are {header:?}")))
    };
    let numeric = |j: usize| rows.iter().all(|r| r[j].parse::<f64>().is_ok());
    let label_idx = match label_column {
        Some(name) => Some(find(name)?),
        None => (0..header.len()).find(|&j| !numeric(j)),
    };
    let weight_idx = weights_column.map(find).transpose()?;
    if label_idx.is_some() && label_idx == weight_idx {
        return Err(bad("the label column cannot also hold weights".into()));
    }
    let coord_cols: Vec<usize> = (0..header.len()).filter(|&j| Some(j) != label_idx && Some(j) != weight_idx).collect();
    if coord_cols.is_empty() {
        return Err(bad("no numeric coordinate columns".into()));
    }
    let parse = |i: usize, j: usize| -> CliResult<f64> {
        let v: f64 = rows[i][j]
            .parse()
            .map_err(|_| bad(format!("row {}, column {:?}: {:?} is not a number", i + 1, header[j], rows[i][j])))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad(format!("row {}, column {:?} is not finite", i + 1, header[j])))
        }
    };
    let n = rows.len();
    let mut coords = DMatrix::zeros(n, coord_cols.len());
    for i in 0..n {
        for (k, &j) in coord_cols.iter().enumerate() {
            coords[(i, k)] = parse(i, j)?;
        }
    }
    let mut configuration = Configuration::new(coords)?;
    if let Some(j) = label_idx {
        configuration = configuration.with_labels(rows.iter().map(|r| r[j].clone()).collect())?;
    }
    if let Some(j) = weight_idx {
        let weights = (0..n).map(|i| parse(i, j)).collect::<CliResult<Vec<f64>>>()?;
        configuration = configuration.with_weights(weights)?;
    }
    Ok(Dataset { configuration, variables: coord_cols.iter().map(|&j| header[j].clone()).collect() })
}

/// Reads centering weights separated by commas, whitespace or newlines.
pub fn read_gamma_file(path: &Path, n: usize) -> CliResult<CenteringVector> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read gamma file {}: {e}", path.display())))?;
    let values = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| CliError::Input(format!("gamma file: {s:?} is not a number"))))
        .collect::<CliResult<Vec<f64>>>()?;
    if values.len() != n {
        return Err(CliError::Input(format!("gamma file has {} entries for {n} points", values.len())));
    }
    Ok(CenteringVector::new(values)?)
}

/// The centering vector for `mode`, with the peeling record when the median
/// was requested.
pub fn resolve_gamma(mode: &GammaMode, c: &Configuration) -> CliResult<(CenteringVector, Option<MedianResult>)> {
    let n = c.n_points();
    Ok(match mode {
        GammaMode::Mean => (mean_gamma(n)?, None),
        GammaMode::Point(i) => (point_gamma(n, *i)?, None),
        GammaMode::File(p) => (read_gamma_file(p, n)?, None),
        GammaMode::Median => {
            let m = affine_median_gamma(c)?;
            (m.gamma.clone(), Some(m))
        }
    })
}
