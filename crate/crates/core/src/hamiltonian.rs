//! Assembly of the lattice Hamiltonian in the enumerated occupation basis.
//!
//! The model carries a detuned on-site energy ω_i = Δε + ε_i, a
//! density-density coupling v on edges, hopping t across edges, and two
//! number-nonconserving couplings: Δ creates or annihilates a particle pair
//! on the two ends of an edge, γ creates or annihilates a single particle
//! anywhere. All couplings are real, so the matrix is real symmetric.
//!
//! Hard-core operators act as two-level raising/lowering operators that
//! commute between sites: every nonzero matrix element has amplitude equal
//! to its coupling constant, with no exchange signs and no occupation
//! square-root factors.

use ndarray::{Array1, Array2};

use crate::error::{QwError, Result};
use crate::graph::Graph;
use crate::hilbert::HilbertSpace;

#[derive(Clone, Debug)]
pub struct ModelParams {
    /// Detuning Δε of every site, in units of the hopping amplitude.
    pub delta_eps: f64,
    /// Hopping amplitude t. Sets the unit of energy and time.
    pub t_hop: f64,
    /// Nearest-neighbour density-density coupling v.
    pub v_int: f64,
    /// Pair creation/annihilation amplitude Δ on edges.
    pub delta_pair: f64,
    /// Single-particle creation/annihilation amplitude γ.
    pub gamma_single: f64,
    /// Per-site disorder ε_i. Empty means the ideal lattice.
    pub onsite_disorder: Vec<f64>,
}

impl ModelParams {
    pub fn ideal(delta_eps: f64, t_hop: f64, v_int: f64, delta_pair: f64, gamma_single: f64) -> Self {
        ModelParams {
            delta_eps,
            t_hop,
            v_int,
            delta_pair,
            gamma_single,
            onsite_disorder: Vec::new(),
        }
    }

    pub fn with_disorder(mut self, eps: Vec<f64>) -> Self {
        self.onsite_disorder = eps;
        self
    }

    pub fn all_finite(&self) -> bool {
        [self.delta_eps, self.t_hop, self.v_int, self.delta_pair, self.gamma_single]
            .iter()
            .all(|x| x.is_finite())
            && self.onsite_disorder.iter().all(|x| x.is_finite())
    }

    /// The number-nonconserving treatment assumes Δ, γ ≪ Δε. Returns a
    /// warning string if that is badly violated; callers decide whether to
    /// surface it.
    pub fn perturbative_advisory(&self) -> Option<String> {
        let scale = self.delta_eps.abs();
        let worst = self.delta_pair.abs().max(self.gamma_single.abs());
        if worst > 0.0 && worst * 5.0 > scale {
            Some(format!(
                "couplings (delta={}, gamma={}) are not small against delta_eps={}; \
                 truncated sectors may be inaccurate",
                self.delta_pair, self.gamma_single, self.delta_eps
            ))
        } else {
            None
        }
    }
}

#[derive(Clone, Debug)]
enum Storage {
    Dense(Array2<f64>),
    Diagonal(Array1<f64>),
}

/// Real-symmetric operator on the enumerated basis. Diagonal operators
/// (number, parity) are stored compactly; `element` and `to_dense` present
/// both storages uniformly.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    dim: usize,
    storage: Storage,
}

impl HermitianOperator {
    pub fn from_dense(matrix: Array2<f64>) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols());
        HermitianOperator {
            dim: matrix.nrows(),
            storage: Storage::Dense(matrix),
        }
    }

    pub fn from_diagonal(diag: Array1<f64>) -> Self {
        HermitianOperator {
            dim: diag.len(),
            storage: Storage::Diagonal(diag),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn element(&self, row: usize, col: usize) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m[(row, col)],
            Storage::Diagonal(d) => {
                if row == col {
                    d[row]
                } else {
                    0.0
                }
            }
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.storage, Storage::Diagonal(_))
    }

    pub fn diagonal(&self) -> Array1<f64> {
        match &self.storage {
            Storage::Dense(m) => m.diag().to_owned(),
            Storage::Diagonal(d) => d.clone(),
        }
    }

    pub fn to_dense(&self) -> Array2<f64> {
        match &self.storage {
            Storage::Dense(m) => m.clone(),
            Storage::Diagonal(d) => Array2::from_diag(d),
        }
    }

    /// Consumes the operator, yielding a dense matrix without copying when
    /// it already is one.
    pub fn into_dense(self) -> Array2<f64> {
        match self.storage {
            Storage::Dense(m) => m,
            Storage::Diagonal(d) => Array2::from_diag(&d),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match &self.storage {
            Storage::Diagonal(_) => true,
            Storage::Dense(m) => {
                for a in 0..self.dim {
                    for b in (a + 1)..self.dim {
                        if m[(a, b)] != m[(b, a)] {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    /// Largest absolute element, a cheap scale for tolerances.
    pub fn max_abs(&self) -> f64 {
        match &self.storage {
            Storage::Dense(m) => m.iter().fold(0.0f64, |acc, &x| acc.max(x.abs())),
            Storage::Diagonal(d) => d.iter().fold(0.0f64, |acc, &x| acc.max(x.abs())),
        }
    }
}

/// Builds the model matrix column by column: for each basis state, apply
/// every Hamiltonian term and scatter the amplitudes onto the connected
/// states. Targets outside the admitted sectors are dropped, which is
/// exactly the sector truncation. Paired terms (create/annihilate) connect
/// disjoint state pairs with equal constant amplitudes, so the result is
/// symmetric without post-correction.
pub fn assemble(graph: &Graph, space: &HilbertSpace, params: &ModelParams) -> Result<HermitianOperator> {
    let n_sites = graph.node_count();
    if space.n_sites() != n_sites {
        return Err(QwError::DimensionMismatch(format!(
            "basis over {} sites, graph has {}",
            space.n_sites(),
            n_sites
        )));
    }
    if !params.onsite_disorder.is_empty() && params.onsite_disorder.len() != n_sites {
        return Err(QwError::DimensionMismatch(format!(
            "disorder vector length {} does not match {} sites",
            params.onsite_disorder.len(),
            n_sites
        )));
    }
    if !params.all_finite() {
        return Err(QwError::InvalidArgument("non-finite model parameter".into()));
    }
    let dim = space.dimension();
    let mut h = Array2::<f64>::zeros((dim, dim));
    let eps = |i: usize| -> f64 {
        if params.onsite_disorder.is_empty() {
            0.0
        } else {
            params.onsite_disorder[i]
        }
    };

    for a in 0..dim {
        let s = space.state(a);
        let mut diag = 0.0;
        for i in 0..n_sites {
            if s >> i & 1 == 1 {
                diag += params.delta_eps + eps(i);
            }
        }
        if params.v_int != 0.0 {
            for &(i, j) in graph.edges() {
                if s >> i & 1 == 1 && s >> j & 1 == 1 {
                    diag += params.v_int;
                }
            }
        }
        h[(a, a)] += diag;

        for &(i, j) in graph.edges() {
            let bi = 1u64 << i;
            let bj = 1u64 << j;
            let occ_i = s & bi != 0;
            let occ_j = s & bj != 0;
            if occ_i != occ_j {
                // Hop across the edge.
                if params.t_hop != 0.0 {
                    if let Some(b) = space.index_of(s ^ (bi | bj)) {
                        h[(b, a)] += params.t_hop;
                    }
                }
            } else if params.delta_pair != 0.0 {
                let target = if occ_i { s & !(bi | bj) } else { s | bi | bj };
                if let Some(b) = space.index_of(target) {
                    h[(b, a)] += params.delta_pair;
                }
            }
        }

        if params.gamma_single != 0.0 {
            for i in 0..n_sites {
                if let Some(b) = space.index_of(s ^ (1u64 << i)) {
                    h[(b, a)] += params.gamma_single;
                }
            }
        }
    }

    Ok(HermitianOperator::from_dense(h))
}

/// Diagonal operator with entries (-1)^(particle count).
pub fn parity_operator(space: &HilbertSpace) -> HermitianOperator {
    let diag = (0..space.dimension())
        .map(|a| if space.particle_count(a).is_multiple_of(2) { 1.0 } else { -1.0 })
        .collect();
    HermitianOperator::from_diagonal(diag)
}

/// Diagonal operator counting particles.
pub fn number_operator(space: &HilbertSpace) -> HermitianOperator {
    let diag = (0..space.dimension())
        .map(|a| space.particle_count(a) as f64)
        .collect();
    HermitianOperator::from_diagonal(diag)
}
