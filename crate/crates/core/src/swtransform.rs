//! First-order effective one-particle model for the pair coupling on an
//! ideal chain, obtained by a Schrieffer-Wolff rotation that eliminates
//! the sector-changing Δ terms.
//!
//! The rotation trades Δ for a next-nearest-neighbour hop
//! t' = -3Δ²/(2Δε) and a site-dependent shift ω'_i = Δε - (Δ²/Δε)·m*_i,
//! where m*_i counts the nearest-neighbour pairs of the chain that do not
//! touch site i. Only the ideal lattice with γ = 0 is supported; the
//! disordered generalization needs per-state energy denominators and is
//! deliberately not wired up.

use ndarray::Array2;

use crate::error::{QwError, Result};
use crate::hamiltonian::{HermitianOperator, ModelParams};
use crate::observables::ObservableSeries;

#[derive(Clone, Debug)]
pub struct EffectiveHamiltonian {
    pub onsite: Vec<f64>,
    pub nn_hop: f64,
    pub nnn_hop: f64,
    matrix: HermitianOperator,
}

impl EffectiveHamiltonian {
    /// One-particle matrix over chain sites, bandwidth 2. Site order
    /// matches the one-particle sector of the occupation basis, so states
    /// and observables can be reused directly.
    pub fn as_matrix(&self) -> &HermitianOperator {
        &self.matrix
    }

    pub fn into_matrix(self) -> HermitianOperator {
        self.matrix
    }
}

/// Number of nearest-neighbour pairs of an N-site chain not involving
/// site m: N-2 at the edges, N-3 in the interior (0 for N=2).
pub fn m_star(m: usize, n: usize) -> usize {
    assert!(n >= 2 && m < n, "site {m} outside chain of {n}");
    let touching = usize::from(m > 0) + usize::from(m + 1 < n);
    (n - 1) - touching
}

pub fn build_effective(params: &ModelParams, n: usize) -> Result<EffectiveHamiltonian> {
    if n < 2 {
        return Err(QwError::InvalidSize(format!(
            "effective chain needs at least 2 sites, got {n}"
        )));
    }
    if params.delta_eps == 0.0 {
        return Err(QwError::SingularDenominator(
            "effective couplings divide by delta_eps".into(),
        ));
    }
    if params.gamma_single != 0.0 {
        return Err(QwError::UnsupportedRegime(
            "effective model is derived for gamma = 0".into(),
        ));
    }
    if !params.onsite_disorder.is_empty() {
        return Err(QwError::UnsupportedRegime(
            "effective model is derived for the ideal lattice only".into(),
        ));
    }
    let delta = params.delta_pair;
    let delta_eps = params.delta_eps;
    let t = params.t_hop;
    let nnn_hop = -3.0 * delta * delta / (2.0 * delta_eps);
    let onsite: Vec<f64> = (0..n)
        .map(|i| delta_eps - (delta * delta / delta_eps) * m_star(i, n) as f64)
        .collect();

    let mut matrix = Array2::<f64>::zeros((n, n));
    for (i, &w) in onsite.iter().enumerate() {
        matrix[(i, i)] = w;
    }
    for i in 0..n - 1 {
        matrix[(i, i + 1)] = t;
        matrix[(i + 1, i)] = t;
    }
    for i in 0..n.saturating_sub(2) {
        matrix[(i, i + 2)] = nnn_hop;
        matrix[(i + 2, i)] = nnn_hop;
    }
    Ok(EffectiveHamiltonian {
        onsite,
        nn_hop: t,
        nnn_hop,
        matrix: HermitianOperator::from_dense(matrix),
    })
}

/// Pointwise differences between two observable series on the same grid.
#[derive(Clone, Debug)]
pub struct DynamicsComparison {
    pub per_time_sigma_diff: Vec<f64>,
    pub per_time_l1_diff: Vec<f64>,
    pub per_time_max_density_diff: Vec<f64>,
    /// Summary scalar: max over the grid of |σ_full - σ_effective|.
    pub max_sigma_diff: f64,
}

pub fn compare_dynamics(
    full: &ObservableSeries,
    effective: &ObservableSeries,
) -> Result<DynamicsComparison> {
    if full.grid.times() != effective.grid.times() {
        return Err(QwError::GridMismatch(
            "comparison requires identical time grids".into(),
        ));
    }
    let mut sigma_diff = Vec::with_capacity(full.len());
    let mut l1_diff = Vec::with_capacity(full.len());
    let mut max_density_diff = Vec::with_capacity(full.len());
    for k in 0..full.len() {
        let a = &full.distributions[k].probabilities;
        let b = &effective.distributions[k].probabilities;
        if a.len() != b.len() {
            return Err(QwError::DimensionMismatch(format!(
                "distribution lengths {} vs {}",
                a.len(),
                b.len()
            )));
        }
        let mut l1 = 0.0f64;
        let mut max = 0.0f64;
        for (&pa, &pb) in a.iter().zip(b.iter()) {
            let d = (pa - pb).abs();
            l1 += d;
            max = max.max(d);
        }
        sigma_diff.push((full.sigma[k] - effective.sigma[k]).abs());
        l1_diff.push(l1);
        max_density_diff.push(max);
    }
    let max_sigma_diff = sigma_diff.iter().copied().fold(0.0f64, f64::max);
    Ok(DynamicsComparison {
        per_time_sigma_diff: sigma_diff,
        per_time_l1_diff: l1_diff,
        per_time_max_density_diff: max_density_diff,
        max_sigma_diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_chain;
    use crate::hamiltonian::assemble;
    use crate::hilbert::enumerate_basis;
    use crate::spectral::{diagonalize, evolve, localized_initial_state, TimeGrid};

    #[test]
    fn m_star_edges_and_interior() {
        for n in 3..=10 {
            assert_eq!(m_star(0, n), n - 2);
            assert_eq!(m_star(n - 1, n), n - 2);
        }
        assert_eq!(m_star(2, 5), 2);
        assert_eq!(m_star(0, 2), 0);
        assert_eq!(m_star(1, 2), 0);
        for m in 1..4 {
            assert_eq!(m_star(m, 5), 2);
        }
    }

    #[test]
    fn nnn_hop_value_and_scaling() {
        let params = ModelParams::ideal(20.0, 1.0, 0.0, 1.0, 0.0);
        let eff = build_effective(&params, 5).unwrap();
        assert_eq!(eff.nnn_hop, -0.075);
        assert_eq!(eff.nn_hop, 1.0);

        let doubled = ModelParams::ideal(20.0, 1.0, 0.0, 2.0, 0.0);
        assert_eq!(build_effective(&doubled, 5).unwrap().nnn_hop, 4.0 * eff.nnn_hop);
        let stiffer = ModelParams::ideal(40.0, 1.0, 0.0, 1.0, 0.0);
        assert_eq!(build_effective(&stiffer, 5).unwrap().nnn_hop, eff.nnn_hop / 2.0);
        assert!(eff.nnn_hop < 0.0);
    }

    #[test]
    fn onsite_shift_examples() {
        let params = ModelParams::ideal(20.0, 1.0, 0.0, 1.0, 0.0);
        let eff = build_effective(&params, 5).unwrap();
        assert!((eff.onsite[0] - 19.85).abs() < 1e-14);
        assert!((eff.onsite[4] - 19.85).abs() < 1e-14);
        assert!((eff.onsite[2] - (20.0 - 2.0 / 20.0)).abs() < 1e-14);
    }

    #[test]
    fn matrix_is_symmetric_with_bandwidth_two() {
        let params = ModelParams::ideal(20.0, 1.0, 0.0, 0.7, 0.0);
        let eff = build_effective(&params, 8).unwrap();
        let m = eff.as_matrix();
        assert!(m.is_symmetric());
        for i in 0..8usize {
            for j in 0..8usize {
                let want_zero = i.abs_diff(j) > 2;
                assert_eq!(m.element(i, j) == 0.0, want_zero, "({i},{j})");
            }
        }
    }

    #[test]
    fn zero_pair_coupling_recovers_tight_binding() {
        let params = ModelParams::ideal(20.0, 1.0, 0.0, 0.0, 0.0);
        let eff = build_effective(&params, 6).unwrap();
        assert_eq!(eff.nnn_hop, 0.0);
        assert!(eff.onsite.iter().all(|&w| w == 20.0));

        let graph = build_chain(6).unwrap();
        let space = enumerate_basis(&graph, &[1]).unwrap();
        let full = assemble(&graph, &space, &params).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                assert!((eff.as_matrix().element(i, j) - full.element(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn unsupported_regimes_error() {
        let singular = ModelParams::ideal(0.0, 1.0, 0.0, 1.0, 0.0);
        assert!(matches!(
            build_effective(&singular, 5),
            Err(QwError::SingularDenominator(_))
        ));
        let with_gamma = ModelParams::ideal(20.0, 1.0, 0.0, 1.0, 0.5);
        assert!(matches!(
            build_effective(&with_gamma, 5),
            Err(QwError::UnsupportedRegime(_))
        ));
        let disordered = ModelParams::ideal(20.0, 1.0, 0.0, 1.0, 0.0).with_disorder(vec![0.1; 5]);
        assert!(matches!(
            build_effective(&disordered, 5),
            Err(QwError::UnsupportedRegime(_))
        ));
        assert!(build_effective(&ModelParams::ideal(20.0, 1.0, 0.0, 1.0, 0.0), 1).is_err());
    }

    fn one_particle_series(
        h: HermitianOperator,
        graph: &crate::graph::Graph,
        grid: &TimeGrid,
        site: usize,
    ) -> ObservableSeries {
        let space = enumerate_basis(graph, &[1]).unwrap();
        let spec = diagonalize(h).unwrap();
        let psi0 = localized_initial_state(&space, site).unwrap();
        let states = evolve(&spec, &psi0, grid).unwrap();
        ObservableSeries::from_states(graph, &space, grid, &states).unwrap()
    }

    #[test]
    fn comparison_of_identical_runs_is_zero() {
        let graph = build_chain(5).unwrap();
        let grid = TimeGrid::uniform(3.0, 12).unwrap();
        let params = ModelParams::ideal(20.0, 1.0, 0.0, 0.0, 0.0);
        let eff = build_effective(&params, 5).unwrap();
        let a = one_particle_series(eff.as_matrix().clone(), &graph, &grid, 2);
        let b = one_particle_series(eff.into_matrix(), &graph, &grid, 2);
        let report = compare_dynamics(&a, &b).unwrap();
        assert_eq!(report.max_sigma_diff, 0.0);
        assert!(report.per_time_l1_diff.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn delta_zero_effective_matches_full_dynamics() {
        let graph = build_chain(5).unwrap();
        let grid = TimeGrid::uniform(4.0, 16).unwrap();
        let params = ModelParams::ideal(20.0, 1.0, 0.0, 0.0, 0.0);

        let space = enumerate_basis(&graph, &[1]).unwrap();
        let full_h = assemble(&graph, &space, &params).unwrap();
        let full = one_particle_series(full_h, &graph, &grid, 2);

        let eff = build_effective(&params, 5).unwrap();
        let effective = one_particle_series(eff.into_matrix(), &graph, &grid, 2);

        let report = compare_dynamics(&full, &effective).unwrap();
        assert!(report.max_sigma_diff < 1e-10);
        assert!(report.per_time_max_density_diff.iter().all(|&d| d < 1e-10));
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let graph = build_chain(4).unwrap();
        let params = ModelParams::ideal(20.0, 1.0, 0.0, 0.0, 0.0);
        let eff = build_effective(&params, 4).unwrap();
        let a = one_particle_series(
            eff.as_matrix().clone(),
            &graph,
            &TimeGrid::uniform(2.0, 8).unwrap(),
            1,
        );
        let b = one_particle_series(
            eff.into_matrix(),
            &graph,
            &TimeGrid::uniform(2.0, 10).unwrap(),
            1,
        );
        assert!(matches!(compare_dynamics(&a, &b), Err(QwError::GridMismatch(_))));
    }
}
