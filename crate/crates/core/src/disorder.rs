//! On-site disorder: sampling, ensemble execution, and deterministic
//! averaging.
//!
//! Each realization draws its samples from an independent, index-addressed
//! RNG stream derived from one base seed, so realizations can run in
//! parallel while repeat runs stay bit-identical regardless of thread
//! count. Reduction happens sequentially in realization order.

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{QwError, Result};
use crate::graph::Graph;
use crate::hamiltonian::{assemble, ModelParams};
use crate::hilbert::enumerate_basis;
use crate::observables::{ObservableSeries, SiteDistribution};
use crate::spectral::{diagonalize, evolve, localized_initial_state, TimeGrid};

/// Lower bound applied before taking logs of averaged probabilities.
const LOG_FLOOR: f64 = 1e-300;

#[derive(Clone, Debug)]
pub struct DisorderSpec {
    strength: f64,
    realizations: usize,
    seed: u64,
}

impl DisorderSpec {
    pub fn new(strength: f64, realizations: usize, seed: u64) -> Result<Self> {
        if strength.is_nan() || strength < 0.0 {
            return Err(QwError::InvalidArgument(format!(
                "disorder strength must be nonnegative, got {strength}"
            )));
        }
        if realizations == 0 {
            return Err(QwError::InvalidArgument(
                "ensemble needs at least one realization".into(),
            ));
        }
        Ok(DisorderSpec {
            strength,
            realizations,
            seed,
        })
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn realizations(&self) -> usize {
        self.realizations
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// On-site energies for one realization: i.i.d. uniform on [−w/2, +w/2],
/// drawn from stream `realization_index` of the base seed. Bit-identical
/// on repeat calls.
pub fn sample_disorder(spec: &DisorderSpec, realization_index: usize, n_sites: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(realization_index as u64);
    let w = spec.strength;
    (0..n_sites)
        .map(|_| (rng.random::<f64>() - 0.5) * w)
        .collect()
}

#[derive(Clone, Debug)]
pub struct EnsembleResult {
    /// Arithmetic mean over realizations, per grid time.
    pub mean_series: ObservableSeries,
    /// Per-realization IPR averaged over the tail window, then averaged
    /// over realizations.
    pub mean_long_time_ipr: f64,
    pub per_realization_long_time_ipr: Vec<f64>,
    /// Tail-window site distribution averaged over realizations.
    pub mean_distribution: SiteDistribution,
    /// ln of each realization's tail-window distribution, averaged over
    /// realizations (the log of the geometric mean profile).
    pub mean_log_distribution: Vec<f64>,
    /// (base seed, stream index) per realization.
    pub per_realization_seeds: Vec<(u64, u64)>,
    /// First grid index inside the tail window [T_max/2, T_max].
    pub tail_from_index: usize,
}

fn tail_start(grid: &TimeGrid) -> usize {
    let half = grid.max_time() / 2.0;
    grid.times().iter().position(|&t| t >= half).unwrap_or(0)
}

fn run_realization(
    graph: &Graph,
    params_base: &ModelParams,
    spec: &DisorderSpec,
    sectors: &[usize],
    grid: &TimeGrid,
    initial_site: usize,
    index: usize,
) -> Result<ObservableSeries> {
    let eps = sample_disorder(spec, index, graph.node_count());
    let params = params_base.clone().with_disorder(eps);
    let space = enumerate_basis(graph, sectors)?;
    let h = assemble(graph, &space, &params)?;
    let decomposition = diagonalize(h)?;
    let psi0 = localized_initial_state(&space, initial_site)?;
    let states = evolve(&decomposition, &psi0, grid)?;
    ObservableSeries::from_states(graph, &space, grid, &states)
}

/// Full disorder ensemble: sample, assemble, diagonalize, evolve, and
/// average per grid time. Long-time quantities use the window
/// [T_max/2, T_max]; its first grid index is reported in the result.
pub fn run_ensemble(
    graph: &Graph,
    params_base: &ModelParams,
    spec: &DisorderSpec,
    sectors: &[usize],
    grid: &TimeGrid,
    initial_site: usize,
) -> Result<EnsembleResult> {
    if !params_base.onsite_disorder.is_empty() {
        return Err(QwError::InvalidArgument(
            "base parameters already carry a disorder realization".into(),
        ));
    }
    let r = spec.realizations;
    let all: Vec<ObservableSeries> = (0..r)
        .into_par_iter()
        .map(|index| {
            run_realization(graph, params_base, spec, sectors, grid, initial_site, index)
                .map_err(|e| (index, e))
        })
        .collect::<std::result::Result<_, (usize, QwError)>>()
        .map_err(|(index, e)| {
            QwError::NumericalFailure(format!(
                "realization {index} (seed {}, stream {index}) failed: {e}",
                spec.seed
            ))
        })?;

    let n_times = grid.len();
    let n_sites = graph.node_count();
    let tail_from = tail_start(grid);
    let inv_r = 1.0 / r as f64;

    let mut mean_sigma = vec![0.0f64; n_times];
    let mut mean_n = vec![0.0f64; n_times];
    let mut mean_ipr = vec![0.0f64; n_times];
    let mut mean_dists = vec![Array1::<f64>::zeros(n_sites); n_times];
    let mut per_tail_ipr = Vec::with_capacity(r);
    let mut mean_tail_dist = Array1::<f64>::zeros(n_sites);
    let mut mean_log_dist = vec![0.0f64; n_sites];

    for series in &all {
        for k in 0..n_times {
            mean_sigma[k] += series.sigma[k] * inv_r;
            mean_n[k] += series.mean_n[k] * inv_r;
            mean_ipr[k] += series.ipr[k] * inv_r;
            mean_dists[k].scaled_add(inv_r, &series.distributions[k].probabilities);
        }
        let tail_len = (n_times - tail_from) as f64;
        let tail_ipr: f64 = series.ipr[tail_from..].iter().sum::<f64>() / tail_len;
        per_tail_ipr.push(tail_ipr);

        let mut tail_dist = Array1::<f64>::zeros(n_sites);
        for dist in &series.distributions[tail_from..] {
            tail_dist += &dist.probabilities;
        }
        tail_dist /= tail_len;
        for site in 0..n_sites {
            mean_log_dist[site] += tail_dist[site].max(LOG_FLOOR).ln() * inv_r;
        }
        mean_tail_dist.scaled_add(inv_r, &tail_dist);
    }

    let mean_series = ObservableSeries {
        grid: grid.clone(),
        sigma: mean_sigma,
        mean_n,
        ipr: mean_ipr,
        distributions: mean_dists.into_iter().map(SiteDistribution::new).collect(),
    };
    let mean_long_time_ipr = per_tail_ipr.iter().sum::<f64>() / r as f64;
    Ok(EnsembleResult {
        mean_series,
        mean_long_time_ipr,
        per_realization_long_time_ipr: per_tail_ipr,
        mean_distribution: SiteDistribution::new(mean_tail_dist),
        mean_log_distribution: mean_log_dist,
        per_realization_seeds: (0..r as u64).map(|s| (spec.seed, s)).collect(),
        tail_from_index: tail_from,
    })
}
