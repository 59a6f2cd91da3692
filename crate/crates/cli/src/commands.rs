//! The five commands. Each writes `report.json` plus command-specific CSV and
//! SVG files into the output directory.

use std::path::{Path, PathBuf};
use std::time::Instant;

use affred::baselines::{pca, standardize, swarm_stats, variable_axes, variable_structure, Standardization, VariableAxes};
use affred::centering::center;
use affred::optimizer::reduce;
use affred::{canonical_form, canonical_form_weighted, CanonicalForm, Configuration, MedianResult, ReductionResult};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::input::{load, resolve_gamma, Dataset};
use crate::report::{run_id, AxesSummary, CanonicalSummary, PcaSummary, ReductionSummary, RunReport, Timing};
use crate::svg::{document, radius_markers, Panel};
use crate::{CliError, CliResult, RunConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Canonize,
    Reduce,
    Pca,
    Median,
    Compare,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Canonize => "canonize",
            Command::Reduce => "reduce",
            Command::Pca => "pca",
            Command::Median => "median",
            Command::Compare => "compare",
        }
    }

    /// Column scaling used when none is requested on the command line.
    pub fn default_standardization(self) -> Option<Standardization> {
        match self {
            Command::Pca | Command::Compare => Some(Standardization::Correlation),
            _ => None,
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub files: Vec<PathBuf>,
}

struct Context<'a> {
    command: Command,
    config: &'a RunConfig,
    data: Dataset,
    files: Vec<PathBuf>,
}

impl Context<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.config.out.join(name)
    }

    fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.path(name);
        std::fs::write(&path, contents).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
        self.files.push(path);
        Ok(())
    }

    fn write_table(&mut self, name: &str, columns: &[String], m: &DMatrix<f64>, labels: &[String]) -> CliResult<()> {
        let path = self.path(name);
        write_csv(&path, columns, m, labels)?;
        self.files.push(path);
        Ok(())
    }

    fn labels(&self) -> Vec<String> {
        self.data.configuration.all_labels()
    }

    fn report(&self) -> RunReport {
        let c = &self.data.configuration;
        RunReport {
            run_id: run_id(self.command.name(), self.config),
            command: self.command.name().into(),
            config: self.config.clone(),
            n_points: c.n_points(),
            dim: c.dim(),
            labels: self.labels(),
            variables: self.data.variables.clone(),
            seed: self.config.search.seed,
            canonical: None,
            reduction: None,
            pca: None,
            swarm: None,
            median: None,
            timing: Timing::default(),
        }
    }

    fn legend(&self, extra: &[String]) -> Vec<String> {
        let cfg = self.config;
        let mut lines = vec![
            format!("gamma: {}   q: {}   seed: {}   starts: {}", cfg.gamma, cfg.q, cfg.search.seed, cfg.search.n_starts),
            format!("standardization: {}", standardization_name(self.standardization())),
        ];
        if cfg.plot.radius_size {
            lines.push("marker area proportional to distance from the origin".into());
        }
        lines.extend_from_slice(extra);
        lines
    }

    fn standardization(&self) -> Option<Standardization> {
        self.config.standardization
    }

    /// The configuration after the requested column scaling.
    fn prepared(&self) -> CliResult<Configuration> {
        Ok(match self.standardization() {
            Some(mode) => standardize(&self.data.configuration, mode).map_err(|e| self.name_column(e))?,
            None => self.data.configuration.clone(),
        })
    }

    fn name_column(&self, e: affred::Error) -> CliError {
        let msg = e.to_string();
        for (j, name) in self.data.variables.iter().enumerate() {
            if msg.contains(&format!("column {j} has")) {
                return CliError::Input(msg.replace(&format!("column {j}"), &format!("column {j} ({name})")));
            }
        }
        e.into()
    }
}

fn standardization_name(s: Option<Standardization>) -> &'static str {
    match s {
        None => "none",
        Some(Standardization::Mean) => "mean",
        Some(Standardization::Correlation) => "correlation",
    }
}

fn write_csv(path: &Path, columns: &[String], m: &DMatrix<f64>, labels: &[String]) -> CliResult<()> {
    let fail = |e: &dyn std::fmt::Display| CliError::Internal(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(|e| fail(&e))?;
    let mut header = vec!["label".to_string()];
    header.extend_from_slice(columns);
    w.write_record(&header).map_err(|e| fail(&e))?;
    for (i, row) in m.row_iter().enumerate() {
        let mut rec = vec![labels[i].clone()];
        rec.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(|e| fail(&e))?;
    }
    w.flush().map_err(|e| fail(&e))
}

fn numbered(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

pub fn run(command: Command, config: &RunConfig) -> CliResult<Outcome> {
    let started = Instant::now();
    config.validate()?;
    if command == Command::Compare && config.q != 2 {
        return Err(CliError::Input(format!("compare draws planar panels and needs q = 2, got {}", config.q)));
    }
    let data = load(config)?;
    std::fs::create_dir_all(&config.out)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", config.out.display())))?;
    let mut ctx = Context { command, config, data, files: Vec::new() };
    let mut report = ctx.report();
    match command {
        Command::Canonize => canonize(&mut ctx, &mut report)?,
        Command::Reduce => reduce_cmd(&mut ctx, &mut report)?,
        Command::Pca => pca_cmd(&mut ctx, &mut report)?,
        Command::Median => median_cmd(&mut ctx, &mut report)?,
        Command::Compare => compare(&mut ctx, &mut report)?,
    }
    report.timing.total_seconds = started.elapsed().as_secs_f64();
    let json = report.to_json()?;
    ctx.write("report.json", &json)?;
    Ok(Outcome { report, files: ctx.files })
}

fn canonical(ctx: &Context, c: &Configuration) -> CliResult<(CanonicalForm, Option<MedianResult>)> {
    let (gamma, median) = resolve_gamma(&ctx.config.gamma, c)?;
    let tol = ctx.config.rank_tolerance;
    let cf = if c.weights().is_some() { canonical_form_weighted(c, &gamma, tol)? } else { canonical_form(c, &gamma, tol)? };
    Ok((cf, median))
}

fn canonize(ctx: &mut Context, report: &mut RunReport) -> CliResult<()> {
    let c = ctx.prepared()?;
    let (cf, median) = canonical(ctx, &c)?;
    let labels = ctx.labels();
    let centered = center(&c, &cf.gamma)?;
    ctx.write_table("h.csv", &numbered("h", cf.rank), &cf.h, &labels)?;
    let variables = ctx.data.variables.clone();
    ctx.write_table("centered.csv", &variables, centered.coords(), &labels)?;
    report.canonical = Some(CanonicalSummary::from(&cf));
    report.median = median;
    Ok(())
}

struct Reduced {
    cf: CanonicalForm,
    result: ReductionResult,
    summary: ReductionSummary,
    seconds: f64,
}

fn origin_centric(ctx: &Context, c: &Configuration) -> CliResult<(Reduced, Option<MedianResult>)> {
    let (cf, median) = canonical(ctx, c)?;
    let t = Instant::now();
    let result = reduce(&cf, ctx.config.q, &ctx.config.search)?;
    let seconds = t.elapsed().as_secs_f64();
    let vars = &ctx.data.variables;
    let summary = ReductionSummary::new(
        ctx.config.q,
        &result,
        AxesSummary::new(vars, &variable_axes(&cf, &result.b)?),
        AxesSummary::new(vars, &variable_structure(&cf, &result.b)?),
    );
    Ok((Reduced { cf, result, summary, seconds }, median))
}

fn reduction_panel(ctx: &Context, red: &Reduced, swarm: &affred::baselines::SwarmStats) -> Panel {
    let z = &red.result.z;
    let shown = z.ncols().min(2);
    Panel {
        title: format!("origin-centric, Norm² = {:.6}", red.result.value),
        points: z.row_iter().map(|r| r.iter().take(shown).copied().collect()).collect(),
        labels: ctx.labels(),
        origin_marker: true,
        rings: vec![swarm.min_radius, swarm.max_radius],
        marker_px: ctx.config.plot.radius_size.then(|| radius_markers(&swarm.radii)),
        arrows: Vec::new(),
    }
}

fn reduce_cmd(ctx: &mut Context, report: &mut RunReport) -> CliResult<()> {
    let c = ctx.prepared()?;
    let (red, median) = origin_centric(ctx, &c)?;
    let labels = ctx.labels();
    let swarm = swarm_stats(&red.result.z, &labels)?;
    ctx.write_table("z.csv", &numbered("z", ctx.config.q), &red.result.z, &labels)?;
    let mut extra = vec![format!("min radius {:.4}, max radius {:.4}", swarm.min_radius, swarm.max_radius)];
    if ctx.config.q > 2 {
        extra.push(format!("showing the first two of {} reduced coordinates", ctx.config.q));
    }
    let svg = document(&[reduction_panel(ctx, &red, &swarm)], &ctx.legend(&extra));
    ctx.write("reduce.svg", &svg)?;
    report.canonical = Some(CanonicalSummary::from(&red.cf));
    report.timing.search_seconds = Some(red.seconds);
    report.reduction = Some(red.summary);
    report.swarm = Some(swarm);
    report.median = median;
    Ok(())
}

fn pca_summary(ctx: &Context, c: &Configuration) -> CliResult<(PcaSummary, Panel)> {
    let q = ctx.config.q;
    let p = pca(c, q)?;
    let axes = VariableAxes::from_map(p.loadings.clone());
    let arrows = if ctx.config.plot.axis_arrows && q >= 2 { arrows(&ctx.data.variables, &axes) } else { Vec::new() };
    let shown = q.min(2);
    let panel = Panel {
        title: format!(
            "PCA, {:.1}% explained",
            100.0 * p.explained_fraction.iter().take(shown).sum::<f64>()
        ),
        points: p.scores.row_iter().map(|r| r.iter().take(shown).copied().collect()).collect(),
        labels: ctx.labels(),
        arrows,
        ..Default::default()
    };
    Ok((PcaSummary::new(q, &p, AxesSummary::new(&ctx.data.variables, &axes)), panel))
}

/// Arrow per defined variable, lengths relative to the longest.
fn arrows(variables: &[String], axes: &VariableAxes) -> Vec<(String, [f64; 2], f64)> {
    let top = axes.norms.iter().copied().fold(0.0, f64::max);
    variables
        .iter()
        .enumerate()
        .filter(|&(j, _)| axes.defined[j])
        .map(|(j, name)| {
            let d = axes.directions.row(j);
            (name.clone(), [d[0], d[1]], axes.norms[j] / top)
        })
        .collect()
}

fn pca_cmd(ctx: &mut Context, report: &mut RunReport) -> CliResult<()> {
    let c = ctx.prepared()?;
    let (summary, panel) = pca_summary(ctx, &c)?;
    let labels = ctx.labels();
    let scores = DMatrix::from_fn(labels.len(), summary.q, |i, j| summary.scores[i][j]);
    ctx.write_table("scores.csv", &numbered("pc", summary.q), &scores, &labels)?;
    let fractions: Vec<String> = summary.explained_fraction.iter().map(|f| format!("{f:.4}")).collect();
    let svg = document(&[panel], &ctx.legend(&[format!("explained fractions: {}", fractions.join(", "))]));
    ctx.write("pca.svg", &svg)?;
    report.pca = Some(summary);
    Ok(())
}

fn median_cmd(ctx: &mut Context, report: &mut RunReport) -> CliResult<()> {
    let m = affred::centering::affine_median_gamma(&ctx.data.configuration)?;
    let text: String = m.gamma.as_slice().iter().map(|g| format!("{g}\n")).collect();
    ctx.write("gamma.txt", &text)?;
    report.median = Some(m);
    Ok(())
}

fn compare(ctx: &mut Context, report: &mut RunReport) -> CliResult<()> {
    let c = ctx.prepared()?;
    let (pca_sum, pca_panel) = pca_summary(ctx, &c)?;
    let (red, median) = origin_centric(ctx, &c)?;
    let labels = ctx.labels();
    let swarm = swarm_stats(&red.result.z, &labels)?;
    let mut right = reduction_panel(ctx, &red, &swarm);
    if ctx.config.plot.axis_arrows {
        right.arrows = arrows(&ctx.data.variables, &variable_structure(&red.cf, &red.result.b)?);
    }
    let extra = [
        format!(
            "PCA explained: {:.4}, {:.4}   origin-centric Norm²: {:.6}",
            pca_sum.explained_fraction[0], pca_sum.explained_fraction[1], red.result.value
        ),
        format!("min radius {:.4}, max radius {:.4}", swarm.min_radius, swarm.max_radius),
    ];
    let svg = document(&[pca_panel, right], &ctx.legend(&extra));
    ctx.write("compare.svg", &svg)?;
    ctx.write_table("z.csv", &numbered("z", 2), &red.result.z, &labels)?;
    report.canonical = Some(CanonicalSummary::from(&red.cf));
    report.timing.search_seconds = Some(red.seconds);
    report.reduction = Some(red.summary);
    report.pca = Some(pca_sum);
    report.swarm = Some(swarm);
    report.median = median;
    Ok(())
}
