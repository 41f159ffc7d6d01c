//! Command implementations behind the `louvain` binary.
//!
//! Three commands share one loading path: `run` detects communities once
//! and writes a membership file plus a key/value report, `bench` repeats
//! detection and reports the geometric-mean runtime with the
//! arithmetic-mean modularity, and `scale` sweeps thread counts and emits
//! a CSV table. Timing always covers the algorithm only, never file I/O.
//!
//! Exit-code contract: 0 success, 1 usage error, 2 input error, 3 runtime
//! error.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::algo::{louvain, LouvainParams, LouvainResult};
use crate::graph::{build_csr, load_edge_list, load_matrix_market, CsrGraph};
use crate::metrics::Membership;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    MatrixMarket,
    EdgeList,
}

/// Everything a detection run needs: the input file and the solver knobs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    pub format: InputFormat,
    pub weighted: bool,
    pub params: LouvainParams,
}

/// Loads and builds the input graph (not part of any reported timing).
pub fn load_graph(config: &RunConfig) -> Result<CsrGraph, CliError> {
    let list = match config.format {
        InputFormat::MatrixMarket => load_matrix_market(&config.input),
        InputFormat::EdgeList => load_edge_list(&config.input, config.weighted),
    }
    .map_err(|e| CliError::Input(e.to_string()))?;
    Ok(build_csr(&list))
}

/// One measured detection; the timing wraps the solver call only.
fn detect(g: &CsrGraph, params: &LouvainParams) -> Result<(LouvainResult, f64), CliError> {
    let started = std::time::Instant::now();
    let result = louvain(g, params).map_err(|e| CliError::Usage(e.to_string()))?;
    let elapsed = started.elapsed().as_secs_f64();
    let _ = result
        .modularity
        .ok_or_else(|| CliError::Input("graph has no edges".into()))?;
    Ok((result, elapsed))
}

/// Statistics of one or more runs on a single graph, serialized as
/// `key: value` lines (keys documented in the repository README).
#[derive(Debug, Clone)]
pub struct RunReport {
    pub graph: String,
    pub vertices: usize,
    pub edges: usize,
    pub threads: usize,
    pub repeats: usize,
    pub times_s: Vec<f64>,
    pub time_mean_s: f64,
    pub time_geomean_s: f64,
    pub modularity: f64,
    pub modularity_mean: f64,
    pub communities: usize,
    pub passes: usize,
    pub iterations_per_pass: Vec<usize>,
    pub time_local_moving_s: f64,
    pub time_aggregation_s: f64,
    pub time_other_s: f64,
}

impl RunReport {
    fn collect(
        graph_name: &str,
        g: &CsrGraph,
        params: &LouvainParams,
        results: &[(LouvainResult, f64)],
    ) -> RunReport {
        let times: Vec<f64> = results.iter().map(|(_, t)| *t).collect();
        let qs: Vec<f64> = results
            .iter()
            .map(|(r, _)| r.modularity.unwrap_or(f64::NAN))
            .collect();
        let last = &results[results.len() - 1].0;
        RunReport {
            graph: graph_name.to_string(),
            vertices: g.order(),
            edges: g.undirected_edge_count(),
            threads: params.thread_count,
            repeats: results.len(),
            time_mean_s: mean(&times),
            time_geomean_s: geomean(&times),
            times_s: times,
            modularity: *qs.last().unwrap(),
            modularity_mean: mean(&qs),
            communities: last.community_count(),
            passes: last.passes,
            iterations_per_pass: last.iterations_per_pass.clone(),
            time_local_moving_s: last.timings.local_moving.as_secs_f64(),
            time_aggregation_s: last.timings.aggregation.as_secs_f64(),
            time_other_s: last.timings.other.as_secs_f64(),
        }
    }

    /// The structured-text form: one `key: value` per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph: {}", self.graph);
        let _ = writeln!(out, "vertices: {}", self.vertices);
        let _ = writeln!(out, "edges: {}", self.edges);
        let _ = writeln!(out, "threads: {}", self.threads);
        let _ = writeln!(out, "repeats: {}", self.repeats);
        let _ = writeln!(out, "times_s: {}", join(&self.times_s));
        let _ = writeln!(out, "time_mean_s: {}", self.time_mean_s);
        let _ = writeln!(out, "time_geomean_s: {}", self.time_geomean_s);
        let _ = writeln!(out, "modularity: {}", self.modularity);
        let _ = writeln!(out, "modularity_mean: {}", self.modularity_mean);
        let _ = writeln!(out, "communities: {}", self.communities);
        let _ = writeln!(out, "passes: {}", self.passes);
        let _ = writeln!(
            out,
            "iterations_per_pass: {}",
            join(&self.iterations_per_pass)
        );
        let _ = writeln!(out, "time_local_moving_s: {}", self.time_local_moving_s);
        let _ = writeln!(out, "time_aggregation_s: {}", self.time_aggregation_s);
        let _ = writeln!(out, "time_other_s: {}", self.time_other_s);
        out
    }
}

fn join<T: std::fmt::Display>(values: &[T]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn geomean(values: &[f64]) -> f64 {
    let sum: f64 = values.iter().map(|&v| v.max(1e-12).ln()).sum();
    (sum / values.len() as f64).exp()
}

fn graph_name(config: &RunConfig) -> String {
    config
        .input
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| config.input.display().to_string())
}

/// Writes `vertex community` lines, zero-based, ascending by vertex.
pub fn write_membership(path: &Path, memb: &Membership) -> Result<(), CliError> {
    let mut out = String::with_capacity(memb.len() * 8);
    for (vertex, community) in memb.iter().enumerate() {
        let _ = writeln!(out, "{vertex} {community}");
    }
    fs::write(path, out)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Parses a membership file written by [`write_membership`].
pub fn read_membership(path: &Path) -> Result<Membership, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut assignment = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let mut fields = line.split_whitespace();
        let (Some(v), Some(c), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(CliError::Input(format!(
                "{}:{}: expected 'vertex community'",
                path.display(),
                idx + 1
            )));
        };
        let v: usize = v.parse().map_err(|_| {
            CliError::Input(format!("{}:{}: invalid vertex id", path.display(), idx + 1))
        })?;
        if v != assignment.len() {
            return Err(CliError::Input(format!(
                "{}:{}: vertex ids must be ascending from 0",
                path.display(),
                idx + 1
            )));
        }
        let c: usize = c.parse().map_err(|_| {
            CliError::Input(format!(
                "{}:{}: invalid community id",
                path.display(),
                idx + 1
            ))
        })?;
        assignment.push(c);
    }
    Ok(Membership::from_vec(assignment))
}

fn write_report(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// `run`: one detection, membership + report files, summary on `out`.
pub fn cmd_run(
    config: &RunConfig,
    output: &Path,
    report: &Path,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let g = load_graph(config)?;
    let measured = detect(&g, &config.params)?;
    let rep = RunReport::collect(
        &graph_name(config),
        &g,
        &config.params,
        std::slice::from_ref(&measured),
    );
    let result = &measured.0;

    write_membership(output, &result.membership)?;
    write_report(report, &rep.to_text())?;

    let io_err = |e: std::io::Error| CliError::Runtime(e.to_string());
    writeln!(
        out,
        "graph: {} ({} vertices, {} edges)",
        rep.graph, rep.vertices, rep.edges
    )
    .map_err(io_err)?;
    writeln!(out, "modularity: {:.6}", rep.modularity).map_err(io_err)?;
    writeln!(out, "communities: {}", rep.communities).map_err(io_err)?;
    writeln!(
        out,
        "passes: {} (iterations per pass: {})",
        rep.passes,
        join(&rep.iterations_per_pass)
    )
    .map_err(io_err)?;
    writeln!(
        out,
        "time: {:.6} s (local-moving {:.6}, aggregation {:.6}, other {:.6})",
        rep.times_s[0], rep.time_local_moving_s, rep.time_aggregation_s, rep.time_other_s
    )
    .map_err(io_err)?;
    writeln!(out, "membership written to {}", output.display()).map_err(io_err)?;
    writeln!(out, "report written to {}", report.display()).map_err(io_err)?;
    Ok(())
}

/// `bench`: `repeats` detections, geometric-mean runtime and
/// arithmetic-mean modularity.
pub fn cmd_bench(
    config: &RunConfig,
    repeats: usize,
    report: Option<&Path>,
    out: &mut impl Write,
) -> Result<RunReport, CliError> {
    if repeats == 0 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    let g = load_graph(config)?;
    let mut results = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        results.push(detect(&g, &config.params)?);
    }
    let rep = RunReport::collect(&graph_name(config), &g, &config.params, &results);
    if let Some(path) = report {
        write_report(path, &rep.to_text())?;
    }
    out.write_all(rep.to_text().as_bytes())
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(rep)
}

/// `scale`: bench at each thread count; CSV columns are
/// `threads,total,local_moving,aggregation,other,modularity` with
/// geometric-mean times in seconds and arithmetic-mean modularity.
pub fn cmd_scale(
    config: &RunConfig,
    thread_counts: &[usize],
    repeats: usize,
    report: Option<&Path>,
    out: &mut impl Write,
) -> Result<(), CliError> {
    if repeats == 0 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    if thread_counts.is_empty() {
        return Err(CliError::Usage("--threads needs at least one count".into()));
    }
    let g = load_graph(config)?;

    let mut csv = String::from("threads,total,local_moving,aggregation,other,modularity\n");
    for &threads in thread_counts {
        let params = LouvainParams {
            thread_count: threads,
            ..config.params.clone()
        };
        let mut results = Vec::with_capacity(repeats);
        for _ in 0..repeats {
            results.push(detect(&g, &params)?);
        }
        let local: Vec<f64> = results
            .iter()
            .map(|(r, _)| r.timings.local_moving.as_secs_f64())
            .collect();
        let agg: Vec<f64> = results
            .iter()
            .map(|(r, _)| r.timings.aggregation.as_secs_f64())
            .collect();
        let other: Vec<f64> = results
            .iter()
            .map(|(r, _)| r.timings.other.as_secs_f64())
            .collect();
        let totals: Vec<f64> = results.iter().map(|(_, t)| *t).collect();
        let qs: Vec<f64> = results
            .iter()
            .map(|(r, _)| r.modularity.unwrap_or(f64::NAN))
            .collect();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            threads,
            geomean(&totals),
            geomean(&local),
            geomean(&agg),
            geomean(&other),
            mean(&qs)
        );
    }

    if let Some(path) = report {
        write_report(path, &csv)?;
    }
    out.write_all(csv.as_bytes())
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(())
}
