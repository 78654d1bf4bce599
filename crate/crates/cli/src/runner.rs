//! Pipeline execution: a validated config in, CSV/JSON artifacts out.

use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use ndarray::Array1;
use serde::Serialize;

use qwalk_core::observables::{classical_reference, l1_distance, stationary_distribution};
use qwalk_core::{
    assemble, diagonalize, enumerate_basis, evolve, localized_initial_state, run_ensemble, Graph,
    ObservableSeries, StationaryDistribution,
};

use crate::config::{Observable, RunConfig, ValidatedRun};
use crate::output::{write_text, SeriesFile, TableFile, MANIFEST_SCHEMA, SUMMARY_SCHEMA};

pub struct RunReport {
    pub label: String,
    pub dimension: usize,
    pub wall_ms: u128,
    pub outputs: Vec<String>,
    /// Ensemble runs only: disorder strength and tail-averaged IPR, the
    /// pair a strength sweep is after.
    pub strength: Option<f64>,
    pub mean_long_time_ipr: Option<f64>,
}

#[derive(Serialize)]
struct Summary {
    schema: &'static str,
    label: String,
    manifest: String,
    graph: GraphEcho,
    sectors: Vec<usize>,
    dimension: usize,
    grid: GridEcho,
    initial_site: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    disorder: Option<DisorderEcho>,
    results: Results,
    files: Vec<String>,
}

#[derive(Serialize)]
struct GraphEcho {
    kind: &'static str,
    size: usize,
    nodes: usize,
    layers: usize,
}

#[derive(Serialize)]
struct GridEcho {
    t_max: f64,
    points: usize,
}

#[derive(Serialize)]
struct DisorderEcho {
    strength: f64,
    realizations: usize,
    seed: u64,
    /// First grid index of the long-time window behind the averaged
    /// distribution and IPR figures.
    tail_from_index: usize,
}

#[derive(Serialize)]
struct Results {
    final_sigma: f64,
    max_sigma: f64,
    max_mean_n: f64,
    final_ipr: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_long_time_ipr: Option<f64>,
}

#[derive(Serialize)]
struct Manifest {
    schema: &'static str,
    code_version: &'static str,
    label: String,
    dimension: usize,
    wall_ms: u128,
    config: RunConfig,
    /// (seed, stream) pair behind every realization of an ensemble.
    #[serde(skip_serializing_if = "Option::is_none")]
    seed_ledger: Option<Vec<(u64, u64)>>,
    outputs: Vec<String>,
}

pub fn execute(cfg: &RunConfig, out_dir: &Path) -> anyhow::Result<RunReport> {
    let v = cfg.validate()?;
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;

    let started = Instant::now();
    let manifest_name = format!("{}.manifest.json", v.label);
    let mut outputs = Vec::new();

    let space = enumerate_basis(&v.graph, &v.sectors)?;
    let mut disorder_echo = None;
    let mut seed_ledger = None;
    let mut mean_long_time_ipr = None;
    let mut side_tables: Vec<(String, TableFile)> = Vec::new();

    let series: ObservableSeries = match &v.disorder {
        Some(spec) => {
            let result = run_ensemble(
                &v.graph,
                &v.params,
                spec,
                &v.sectors,
                &v.grid,
                v.initial_site,
            )?;
            disorder_echo = Some(DisorderEcho {
                strength: spec.strength(),
                realizations: spec.realizations(),
                seed: spec.seed(),
                tail_from_index: result.tail_from_index,
            });
            seed_ledger = Some(result.per_realization_seeds.clone());
            mean_long_time_ipr = Some(result.mean_long_time_ipr);
            side_tables.push((
                format!("{}.distribution.csv", v.label),
                TableFile {
                    manifest: manifest_name.clone(),
                    nodes: (0..v.graph.node_count()).collect(),
                    columns: vec![
                        (
                            "mean_probability".into(),
                            result.mean_distribution.probabilities.to_vec(),
                        ),
                        (
                            "mean_log_probability".into(),
                            result.mean_log_distribution.clone(),
                        ),
                    ],
                },
            ));
            result.mean_series
        }
        None => {
            let h = assemble(&v.graph, &space, &v.params)?;
            let spectral = diagonalize(h)?;
            let psi0 = localized_initial_state(&space, v.initial_site)?;
            if v.observables.contains(&Observable::Stationary) {
                let pi = stationary_distribution(&spectral, &psi0, &space, &v.graph)?;
                side_tables.push((
                    format!("{}.stationary.csv", v.label),
                    TableFile {
                        manifest: manifest_name.clone(),
                        nodes: (0..v.graph.node_count()).collect(),
                        columns: vec![("probability".into(), pi.probabilities.to_vec())],
                    },
                ));
            }
            let states = evolve(&spectral, &psi0, &v.grid)?;
            drop(spectral);
            ObservableSeries::from_states(&v.graph, &space, &v.grid, &states)?
        }
    };

    let series_file = SeriesFile {
        manifest: manifest_name.clone(),
        columns: series_columns(&v, &series)?,
    };
    let series_name = format!("{}.series.csv", v.label);
    write_text(&out_dir.join(&series_name), &series_file.render())?;
    outputs.push(series_name);

    for (name, table) in &side_tables {
        write_text(&out_dir.join(name), &table.render())?;
        outputs.push(name.clone());
    }

    let summary = Summary {
        schema: SUMMARY_SCHEMA,
        label: v.label.clone(),
        manifest: manifest_name.clone(),
        graph: GraphEcho {
            kind: v.graph.kind().as_str(),
            size: v.graph.size(),
            nodes: v.graph.node_count(),
            layers: v.graph.layer_count(),
        },
        sectors: v.sectors.clone(),
        dimension: v.dimension,
        grid: GridEcho {
            t_max: v.grid.max_time(),
            points: v.grid.len(),
        },
        initial_site: v.initial_site,
        disorder: disorder_echo,
        results: Results {
            final_sigma: *series.sigma.last().unwrap(),
            max_sigma: series.sigma.iter().cloned().fold(0.0, f64::max),
            max_mean_n: series.mean_n.iter().cloned().fold(0.0, f64::max),
            final_ipr: *series.ipr.last().unwrap(),
            mean_long_time_ipr,
        },
        files: outputs.clone(),
    };
    let summary_name = format!("{}.summary.json", v.label);
    write_text(
        &out_dir.join(&summary_name),
        &(serde_json::to_string_pretty(&summary)? + "\n"),
    )?;
    outputs.push(summary_name);

    let manifest = Manifest {
        schema: MANIFEST_SCHEMA,
        code_version: env!("CARGO_PKG_VERSION"),
        label: v.label.clone(),
        dimension: v.dimension,
        wall_ms: started.elapsed().as_millis(),
        config: cfg.clone(),
        seed_ledger,
        outputs: outputs.clone(),
    };
    write_text(
        &out_dir.join(&manifest_name),
        &(serde_json::to_string_pretty(&manifest)? + "\n"),
    )?;
    outputs.push(manifest_name);

    Ok(RunReport {
        label: v.label,
        dimension: v.dimension,
        wall_ms: manifest.wall_ms,
        outputs,
        strength: v.disorder.as_ref().map(|d| d.strength()),
        mean_long_time_ipr,
    })
}

/// Cross-variant index written after a preset completes, so sweeps (for
/// example long-time IPR against disorder strength) land in one artifact.
#[derive(Serialize)]
struct PresetIndex<'a> {
    schema: &'static str,
    preset: &'a str,
    variants: Vec<IndexRow>,
}

#[derive(Serialize)]
struct IndexRow {
    label: String,
    summary: String,
    dimension: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    strength: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mean_long_time_ipr: Option<f64>,
}

pub const PRESET_INDEX_SCHEMA: &str = "qwalk-preset-index-v1";

pub fn write_preset_index(
    name: &str,
    reports: &[RunReport],
    out_dir: &Path,
) -> anyhow::Result<String> {
    let index = PresetIndex {
        schema: PRESET_INDEX_SCHEMA,
        preset: name,
        variants: reports
            .iter()
            .map(|r| IndexRow {
                label: r.label.clone(),
                summary: format!("{}.summary.json", r.label),
                dimension: r.dimension,
                strength: r.strength,
                mean_long_time_ipr: r.mean_long_time_ipr,
            })
            .collect(),
    };
    let file = format!("{name}.index.json");
    write_text(
        &out_dir.join(&file),
        &(serde_json::to_string_pretty(&index)? + "\n"),
    )?;
    Ok(file)
}

fn series_columns(
    v: &ValidatedRun,
    series: &ObservableSeries,
) -> anyhow::Result<Vec<(String, Vec<f64>)>> {
    let mut cols: Vec<(String, Vec<f64>)> = vec![("time".into(), series.grid.times().to_vec())];
    for &obs in &v.observables {
        match obs {
            Observable::Sigma => cols.push(("sigma".into(), series.sigma.clone())),
            Observable::MeanN => cols.push(("mean_n".into(), series.mean_n.clone())),
            Observable::Ipr => cols.push(("ipr".into(), series.ipr.clone())),
            Observable::Distribution => {
                for node in 0..v.graph.node_count() {
                    let col = series
                        .distributions
                        .iter()
                        .map(|d| d.probabilities[node])
                        .collect();
                    cols.push((format!("node_{node}"), col));
                }
            }
            Observable::Layers => {
                for layer in v.graph.min_layer()..=v.graph.max_layer() {
                    cols.push((
                        format!("layer_{layer}"),
                        series.layer_series(&v.graph, layer)?,
                    ));
                }
            }
            Observable::L1Uniform => {
                let target = uniform_target(&v.graph);
                let col = series
                    .distributions
                    .iter()
                    .map(|d| l1_distance(d, &target))
                    .collect::<qwalk_core::Result<Vec<f64>>>()?;
                cols.push(("l1_uniform".into(), col));
            }
            Observable::Classical => {
                cols.push((
                    "classical".into(),
                    classical_reference(&series.grid, v.classical_prefactor)?,
                ));
            }
            Observable::Stationary => {}
        }
    }
    Ok(cols)
}

fn uniform_target(graph: &Graph) -> StationaryDistribution {
    let n = graph.node_count();
    StationaryDistribution {
        probabilities: Array1::from_elem(n, 1.0 / n as f64),
    }
}
