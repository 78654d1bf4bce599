//! Observables evaluated on propagated states: site densities, wave-packet
//! spread, particle number, participation ratio, distribution distances,
//! mixing time, and infinite-time averages.
//!
//! The per-site probability for multi-particle states is the normalized
//! occupation density ⟨n̂_ν⟩/⟨N̂⟩, which reduces to |⟨ν|Ψ⟩|² whenever Ψ lies
//! in the one-particle sector.

use ndarray::Array1;

use crate::error::{QwError, Result};
use crate::graph::Graph;
use crate::hilbert::HilbertSpace;
use crate::spectral::{SpectralDecomposition, StateVector, TimeGrid};

/// Vacuum cutoff: a total occupation below this has no meaningful density.
const DENSITY_FLOOR: f64 = 1e-14;

/// Relative tolerance for treating eigenvalues as degenerate when forming
/// infinite-time averages.
const DEGENERACY_RTOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SiteDistribution {
    pub probabilities: Array1<f64>,
}

impl SiteDistribution {
    pub fn new(probabilities: Array1<f64>) -> Self {
        debug_assert!(probabilities.iter().all(|&p| p >= -1e-12));
        SiteDistribution { probabilities }
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn uniform(n: usize) -> Self {
        SiteDistribution {
            probabilities: Array1::from_elem(n, 1.0 / n as f64),
        }
    }

    /// Total probability on one layer of the graph.
    pub fn layer_sum(&self, graph: &Graph, layer: usize) -> Result<f64> {
        if layer < graph.min_layer() || layer > graph.max_layer() {
            return Err(QwError::InvalidLayer {
                layer,
                min: graph.min_layer(),
                max: graph.max_layer(),
            });
        }
        Ok(self
            .probabilities
            .iter()
            .enumerate()
            .filter(|&(node, _)| graph.layer_of(node) == layer)
            .map(|(_, &p)| p)
            .sum())
    }
}

#[derive(Clone, Debug)]
pub struct StationaryDistribution {
    pub probabilities: Array1<f64>,
}

/// Per-time observables for one propagated trajectory.
#[derive(Clone, Debug)]
pub struct ObservableSeries {
    pub grid: TimeGrid,
    pub sigma: Vec<f64>,
    pub mean_n: Vec<f64>,
    pub ipr: Vec<f64>,
    pub distributions: Vec<SiteDistribution>,
}

impl ObservableSeries {
    pub fn from_states(
        graph: &Graph,
        space: &HilbertSpace,
        grid: &TimeGrid,
        states: &[StateVector],
    ) -> Result<Self> {
        if states.len() != grid.len() {
            return Err(QwError::GridMismatch(format!(
                "{} states for {} grid times",
                states.len(),
                grid.len()
            )));
        }
        let mut sigma_v = Vec::with_capacity(states.len());
        let mut mean_n_v = Vec::with_capacity(states.len());
        let mut ipr_v = Vec::with_capacity(states.len());
        let mut dists = Vec::with_capacity(states.len());
        for state in states {
            let dist = site_density(state, space, graph)?;
            sigma_v.push(sigma(&dist, graph));
            mean_n_v.push(occupation_total(state, space));
            ipr_v.push(ipr(&dist));
            dists.push(dist);
        }
        Ok(ObservableSeries {
            grid: grid.clone(),
            sigma: sigma_v,
            mean_n: mean_n_v,
            ipr: ipr_v,
            distributions: dists,
        })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Probability on one graph layer at every grid time.
    pub fn layer_series(&self, graph: &Graph, layer: usize) -> Result<Vec<f64>> {
        self.distributions
            .iter()
            .map(|d| d.layer_sum(graph, layer))
            .collect()
    }
}

/// ⟨N̂⟩ evaluated directly from occupation counts.
fn occupation_total(state: &StateVector, space: &HilbertSpace) -> f64 {
    state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(a, amp)| amp.norm_sqr() * space.particle_count(a) as f64)
        .sum()
}

/// Normalized occupation density p_ν = ⟨n̂_ν⟩/⟨N̂⟩ over graph nodes.
pub fn site_density(
    state: &StateVector,
    space: &HilbertSpace,
    graph: &Graph,
) -> Result<SiteDistribution> {
    debug_assert_eq!(space.n_sites(), graph.node_count());
    if state.dimension() != space.dimension() {
        return Err(QwError::DimensionMismatch(format!(
            "state dimension {} vs basis {}",
            state.dimension(),
            space.dimension()
        )));
    }
    let n = space.n_sites();
    let mut weights = vec![0.0f64; n];
    let mut total = 0.0f64;
    for (a, amp) in state.amplitudes.iter().enumerate() {
        let prob = amp.norm_sqr();
        if prob == 0.0 {
            continue;
        }
        let mut occ = space.state(a);
        total += prob * occ.count_ones() as f64;
        while occ != 0 {
            let site = occ.trailing_zeros() as usize;
            weights[site] += prob;
            occ &= occ - 1;
        }
    }
    if total < DENSITY_FLOOR {
        return Err(QwError::UndefinedDensity);
    }
    let probabilities = Array1::from_iter(weights.into_iter().map(|w| w / total));
    Ok(SiteDistribution::new(probabilities))
}

/// Standard deviation of the node coordinate under `dist`.
pub fn sigma(dist: &SiteDistribution, graph: &Graph) -> f64 {
    let mut m1 = 0.0f64;
    let mut m2 = 0.0f64;
    for (node, &p) in dist.probabilities.iter().enumerate() {
        let c = graph.coordinate_of(node);
        m1 += c * p;
        m2 += c * c * p;
    }
    (m2 - m1 * m1).max(0.0).sqrt()
}

/// ⟨Ψ|N̂|Ψ⟩ for a state over `space`.
pub fn mean_particle_number(state: &StateVector, space: &HilbertSpace) -> f64 {
    occupation_total(state, space)
}

/// Inverse participation ratio Σ p². Ranges from 1/N (uniform) to 1
/// (single site).
pub fn ipr(dist: &SiteDistribution) -> f64 {
    dist.probabilities.iter().map(|&p| p * p).sum()
}

pub fn l1_distance(dist: &SiteDistribution, target: &StationaryDistribution) -> Result<f64> {
    if dist.len() != target.probabilities.len() {
        return Err(QwError::DimensionMismatch(format!(
            "distribution length {} vs target {}",
            dist.len(),
            target.probabilities.len()
        )));
    }
    Ok(dist
        .probabilities
        .iter()
        .zip(target.probabilities.iter())
        .map(|(&p, &q)| (p - q).abs())
        .sum())
}

/// Smallest grid time from which the walk stays within `eps` of `target`
/// (in L1) for the rest of the horizon. `None` when even the final grid
/// point is farther than `eps`.
pub fn mixing_time(
    series: &ObservableSeries,
    target: &StationaryDistribution,
    eps: f64,
) -> Result<Option<f64>> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(QwError::InvalidArgument(format!(
            "mixing threshold must be positive, got {eps}"
        )));
    }
    let mut start = None;
    for (k, dist) in series.distributions.iter().enumerate().rev() {
        if l1_distance(dist, target)? <= eps {
            start = Some(k);
        } else {
            break;
        }
    }
    Ok(start.map(|k| series.grid.times()[k]))
}

/// Infinite-time average of the site density. Projects the initial state
/// onto each (near-)degenerate eigenspace and accumulates the densities;
/// cross terms inside a group survive the time average and are kept.
pub fn stationary_distribution(
    spec: &SpectralDecomposition,
    psi0: &StateVector,
    space: &HilbertSpace,
    graph: &Graph,
) -> Result<StationaryDistribution> {
    debug_assert_eq!(space.n_sites(), graph.node_count());
    let dim = spec.dimension();
    if psi0.dimension() != dim || space.dimension() != dim {
        return Err(QwError::DimensionMismatch(format!(
            "decomposition {}, state {}, basis {}",
            dim,
            psi0.dimension(),
            space.dimension()
        )));
    }
    let (c_re, c_im) = spec.overlaps(psi0);
    let e = spec.eigenvalues();
    let tol = DEGENERACY_RTOL * spec.spectral_scale().max(1.0);

    let n = space.n_sites();
    let mut weights = vec![0.0f64; n];
    let mut total = 0.0f64;
    let mut lo = 0;
    while lo < dim {
        let mut hi = lo + 1;
        while hi < dim && e[hi] - e[hi - 1] <= tol {
            hi += 1;
        }
        // Component of psi0 inside this eigenspace, in the site basis.
        let mut phi_re = Array1::<f64>::zeros(dim);
        let mut phi_im = Array1::<f64>::zeros(dim);
        for lambda in lo..hi {
            phi_re.scaled_add(c_re[lambda], &spec.eigenvector(lambda));
            phi_im.scaled_add(c_im[lambda], &spec.eigenvector(lambda));
        }
        for a in 0..dim {
            let prob = phi_re[a] * phi_re[a] + phi_im[a] * phi_im[a];
            if prob == 0.0 {
                continue;
            }
            let mut occ = space.state(a);
            total += prob * occ.count_ones() as f64;
            while occ != 0 {
                let site = occ.trailing_zeros() as usize;
                weights[site] += prob;
                occ &= occ - 1;
            }
        }
        lo = hi;
    }
    if total < DENSITY_FLOOR {
        return Err(QwError::UndefinedDensity);
    }
    let probabilities = Array1::from_iter(weights.into_iter().map(|w| w / total));
    Ok(StationaryDistribution { probabilities })
}

/// Probability of finding the walker anywhere in `layer`.
pub fn layer_probability(
    state: &StateVector,
    space: &HilbertSpace,
    graph: &Graph,
    layer: usize,
) -> Result<f64> {
    site_density(state, space, graph)?.layer_sum(graph, layer)
}

/// Reference diffusive curve prefactor·√τ, emitted alongside σ series.
pub fn classical_reference(grid: &TimeGrid, prefactor: f64) -> Result<Vec<f64>> {
    if prefactor.is_nan() || prefactor <= 0.0 {
        return Err(QwError::InvalidArgument(format!(
            "reference prefactor must be positive, got {prefactor}"
        )));
    }
    Ok(grid.times().iter().map(|&tau| prefactor * tau.sqrt()).collect())
}

/// Time average of site densities over a window of grid indices.
pub fn averaged_density(
    series: &ObservableSeries,
    from_index: usize,
) -> Result<SiteDistribution> {
    if from_index >= series.len() {
        return Err(QwError::InvalidArgument(format!(
            "window start {} beyond series length {}",
            from_index,
            series.len()
        )));
    }
    let n = series.distributions[0].len();
    let mut acc = Array1::<f64>::zeros(n);
    let count = series.len() - from_index;
    for dist in &series.distributions[from_index..] {
        acc += &dist.probabilities;
    }
    acc /= count as f64;
    Ok(SiteDistribution::new(acc))
}
