//! Hard-core occupation basis restricted to particle-number sectors.
//!
//! A basis state is a bitmask over graph nodes (bit i set = node i
//! occupied; at most one particle per site). The space enumerates every
//! mask whose popcount lies in the admitted sectors, ordered by particle
//! count and then by ascending mask value. That order is total and
//! deterministic, so indices are stable across runs.

use std::collections::HashMap;

use crate::error::{QwError, Result};
use crate::graph::Graph;
use crate::hamiltonian::ModelParams;

pub type Occupation = u64;

#[derive(Clone, Debug)]
pub struct HilbertSpace {
    n_sites: usize,
    sectors: Vec<usize>,
    states: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

impl HilbertSpace {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn sectors(&self) -> &[usize] {
        &self.sectors
    }

    pub fn dimension(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn state(&self, index: usize) -> Occupation {
        self.states[index]
    }

    pub fn particle_count(&self, index: usize) -> u32 {
        self.states[index].count_ones()
    }

    pub fn index_of(&self, occupation: Occupation) -> Option<usize> {
        self.index.get(&occupation).copied()
    }
}

/// All C(N, n) masks of popcount n in ascending numeric order, via Gosper's
/// next-bit-permutation step.
fn masks_of_weight(n_sites: usize, n: usize) -> Vec<Occupation> {
    if n == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let limit: Occupation = 1 << n_sites;
    let mut v: Occupation = (1 << n) - 1;
    while v < limit {
        out.push(v);
        let t = v | (v - 1);
        v = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
        if v == 0 {
            break;
        }
    }
    out
}

pub fn enumerate_basis(graph: &Graph, sectors: &[usize]) -> Result<HilbertSpace> {
    let n_sites = graph.node_count();
    if n_sites > 63 {
        return Err(QwError::InvalidSize(format!(
            "occupation masks support up to 63 sites, got {n_sites}"
        )));
    }
    if sectors.is_empty() {
        return Err(QwError::InvalidArgument("sector list is empty".into()));
    }
    let mut sorted = sectors.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != sectors.len() {
        return Err(QwError::InvalidSector("duplicate sector".into()));
    }
    if let Some(&bad) = sorted.iter().find(|&&n| n > n_sites) {
        return Err(QwError::InvalidSector(format!(
            "sector {bad} exceeds {n_sites} sites"
        )));
    }
    let mut states = Vec::new();
    for &n in &sorted {
        states.extend(masks_of_weight(n_sites, n));
    }
    let index = states.iter().enumerate().map(|(k, &s)| (s, k)).collect();
    Ok(HilbertSpace {
        n_sites,
        sectors: sorted,
        states,
        index,
    })
}

/// Sectors the model couples to a single walker, truncated at
/// `max_particles`: odd counts when only pair terms act, every count when
/// single-particle terms act, and just {1} for the number-conserving model.
pub fn default_sectors(params: &ModelParams, max_particles: usize) -> Vec<usize> {
    if params.gamma_single != 0.0 {
        (0..=max_particles).collect()
    } else if params.delta_pair != 0.0 {
        (1..=max_particles).step_by(2).collect()
    } else {
        vec![1]
    }
}
