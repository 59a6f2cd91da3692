//! Built-in datasets and a registry of oracle values for regression checks.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Configuration;
use crate::error::{Error, Result};

const LONGLEY_CSV: &str = include_str!("../data/longley.csv");

/// SHA-256 of the bundled `data/longley.csv`.
pub const LONGLEY_SHA256: &str = "1ec00dfe50b2cf328817bd95f3e6fc904359543633f07795226931f54f3120ef";

/// Column order of the Longley variables.
pub const LONGLEY_VARIABLES: [&str; 6] = ["GNP_DEFLATOR", "GNP", "UNEMPLOYED", "ARMED_FORCES", "POPULATION", "EMPLOYED"];

/// Six points at 60° spacing on the circle of radius `1/√3`. Already in
/// canonical form: columns sum to zero and `H'H = I₂`.
pub fn hexagon_h() -> Configuration {
    let r = 1.0 / 3f64.sqrt();
    let coords = DMatrix::from_fn(6, 2, |k, j| {
        let a = k as f64 * std::f64::consts::PI / 3.0;
        r * if j == 0 { a.cos() } else { a.sin() }
    });
    Configuration::new(coords).expect("finite")
}

/// Two columns of three points: `x = ±1/√6`, `y ∈ {−½, 0, ½}`. Also in
/// canonical form. Its one-dimensional images include a "pair of triplets"
/// (project on `x`) and a "triplet of pairs" (project on `y`), each a local
/// minimum of the reduction objective.
pub fn six_point_grid_h() -> Configuration {
    let a = 1.0 / 6f64.sqrt();
    let rows: Vec<[f64; 2]> = [-a, a]
        .iter()
        .flat_map(|&x| [-0.5, 0.0, 0.5].map(|y| [x, y]))
        .collect();
    Configuration::from_rows(&rows).expect("finite")
}

/// The 16×6 Longley table, rows labeled by year.
pub fn longley() -> Result<Configuration> {
    parse_longley(LONGLEY_CSV)
}

/// Loads a Longley table from `path`, which must match the pinned checksum.
pub fn longley_from_path(path: &std::path::Path) -> Result<Configuration> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Load(format!("{}: {e}", path.display())))?;
    parse_longley(&text)
}

fn parse_longley(text: &str) -> Result<Configuration> {
    let digest: String = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    if digest != LONGLEY_SHA256 {
        return Err(Error::Load(format!("longley checksum mismatch: expected {LONGLEY_SHA256}, got {digest}")));
    }
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    if header.len() != 7 || header[0] != "YEAR" || header[1..] != LONGLEY_VARIABLES {
        return Err(Error::Load(format!("unexpected longley header {header:?}")));
    }
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for (k, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Load(format!("longley row {k} has {} fields", fields.len())));
        }
        labels.push(fields[0].to_string());
        for f in &fields[1..] {
            values.push(f.parse::<f64>().map_err(|e| Error::Load(format!("longley row {k}: {e}")))?);
        }
    }
    Configuration::new(DMatrix::from_row_slice(labels.len(), 6, &values))?.with_labels(labels)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub value: f64,
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub configuration: Configuration,
    pub expected: BTreeMap<String, Expected>,
}

/// Named fixtures and their oracle values.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    fixtures: BTreeMap<String, Fixture>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The bundled fixtures with their recorded oracle values.
    pub fn builtin() -> Result<Self> {
        let mut reg = Registry::new();
        reg.add("hexagon", hexagon_h())?;
        reg.add("grid6", six_point_grid_h())?;
        reg.add("longley", longley()?)?;
        for (name, key, value, provenance) in BUILTIN_EXPECTED {
            reg.register_expected(name, key, *value, provenance)?;
        }
        Ok(reg)
    }

    pub fn add(&mut self, name: &str, configuration: Configuration) -> Result<()> {
        if self.fixtures.contains_key(name) {
            return Err(Error::input(format!("fixture {name} already registered")));
        }
        let fixture = Fixture { name: name.to_string(), configuration, expected: BTreeMap::new() };
        self.fixtures.insert(name.to_string(), fixture);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Fixture> {
        self.fixtures.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.fixtures.keys().map(String::as_str)
    }

    pub fn register_expected(&mut self, name: &str, key: &str, value: f64, provenance: &str) -> Result<()> {
        let fixture = self
            .fixtures
            .get_mut(name)
            .ok_or_else(|| Error::input(format!("no fixture named {name}")))?;
        if fixture.expected.contains_key(key) {
            return Err(Error::input(format!("{name} already has an expected value for {key}")));
        }
        fixture.expected.insert(key.to_string(), Expected { value, provenance: provenance.to_string() });
        Ok(())
    }

    pub fn expected(&self, name: &str, key: &str) -> Option<&Expected> {
        self.fixtures.get(name)?.expected.get(key)
    }
}

/// Keys use the full ordered-pair sum. Longley values are for correlation
/// standardization, mean centering, `q = 2`, seed 1 and 100 random starts.
const BUILTIN_EXPECTED: &[(&str, &str, f64, &str)] = &[
    ("hexagon", "q1_global_norm2", 8.0, "closed form; angle×scale grid oracle"),
    ("grid6", "q1_global_norm2", 56.0 / 9.0, "closed form; angle×scale grid oracle"),
    ("grid6", "q1_second_norm2", 7.0, "closed form; angle×scale grid oracle"),
    ("longley", "q2_global_norm2", 38.39128137003815, "first registered run"),
    ("longley", "q2_min_radius", 0.3096229187020523, "first registered run"),
];
