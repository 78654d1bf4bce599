//! Numerical engine for continuous-time quantum walks of hard-core bosons
//! whose particle number is allowed to fluctuate.
//!
//! A walk lives on a chain, a binary tree, or a glued pair of binary trees
//! ([`graph`]). States are expanded in an occupation basis restricted to
//! selected particle-number sectors ([`hilbert`]), the Hamiltonian carries
//! hopping, interactions, and pair/single creation terms that connect those
//! sectors ([`hamiltonian`]), and propagation goes through a full
//! eigendecomposition ([`spectral`]). On top of that sit measurement
//! routines ([`observables`]), disorder ensembles ([`disorder`]), and an
//! effective one-particle model valid for weak pair coupling
//! ([`swtransform`]).

// Ties the BLAS/LAPACK symbols used by `spectral` (and ndarray's GEMM) to
// the system OpenBLAS.
extern crate openblas_src;

pub mod disorder;
pub mod error;
pub mod graph;
pub mod hamiltonian;
pub mod hilbert;
pub mod observables;
pub mod spectral;
pub mod swtransform;

pub use disorder::{run_ensemble, DisorderSpec, EnsembleResult};
pub use error::{QwError, Result};
pub use graph::{build_binary_tree, build_chain, build_glued_tree, Graph, GraphKind};
pub use hamiltonian::{assemble, number_operator, parity_operator, HermitianOperator, ModelParams};
pub use hilbert::{default_sectors, enumerate_basis, HilbertSpace};
pub use observables::{ObservableSeries, SiteDistribution, StationaryDistribution};
pub use spectral::{
    diagonalize, evolve, localized_initial_state, oracle_propagate, SpectralDecomposition,
    StateVector, TimeGrid,
};
