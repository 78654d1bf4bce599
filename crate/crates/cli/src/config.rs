//! TOML-backed run descriptions and their validation into engine types.
//!
//! A [`RunConfig`] is the serialized form; [`RunConfig::validate`] turns it
//! into a [`ValidatedRun`] holding live engine objects, rejecting anything
//! inconsistent before a single matrix element is computed.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use qwalk_core::{
    build_binary_tree, build_chain, build_glued_tree, default_sectors, enumerate_basis,
    DisorderSpec, Graph, GraphKind, ModelParams, TimeGrid,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Name used as the prefix of every emitted file.
    pub label: String,
    pub graph: GraphSection,
    pub model: ModelSection,
    #[serde(default)]
    pub sectors: SectorSection,
    pub grid: GridSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disorder: Option<DisorderSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    /// "chain", "binary-tree", or "glued-binary-tree".
    pub kind: String,
    /// Sites for a chain, depth for either tree kind.
    pub size: usize,
}

/// Model parameters, all in units of the hopping amplitude t.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub delta_eps: f64,
    #[serde(default = "one")]
    pub t_hop: f64,
    #[serde(default)]
    pub v_int: f64,
    #[serde(default)]
    pub delta_pair: f64,
    #[serde(default)]
    pub gamma_single: f64,
}

fn one() -> f64 {
    1.0
}

/// Either an explicit particle-number list or a cap handed to
/// [`default_sectors`]; leaving both out means "cap at three particles".
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particles: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_particles: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t_max: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// Defaults to the graph's natural starting node: the middle of a
    /// chain, the root of a tree.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSection {
    pub strength: f64,
    pub realizations: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
    /// Column selection; `None` means the default set for the graph kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observables: Option<Vec<String>>,
    /// Prefactor of the √τ reference column, when `classical` is selected.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical_prefactor: Option<f64>,
}

/// One column family of the emitted series, or a side artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Sigma,
    MeanN,
    Ipr,
    Distribution,
    Layers,
    L1Uniform,
    Classical,
    Stationary,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::Sigma => "sigma",
            Observable::MeanN => "mean_n",
            Observable::Ipr => "ipr",
            Observable::Distribution => "distribution",
            Observable::Layers => "layers",
            Observable::L1Uniform => "l1_uniform",
            Observable::Classical => "classical",
            Observable::Stationary => "stationary",
        }
    }

    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "sigma" => Observable::Sigma,
            "mean_n" => Observable::MeanN,
            "ipr" => Observable::Ipr,
            "distribution" => Observable::Distribution,
            "layers" => Observable::Layers,
            "l1_uniform" => Observable::L1Uniform,
            "classical" => Observable::Classical,
            "stationary" => Observable::Stationary,
            _ => return None,
        })
    }
}

/// A config whose every field has been checked and converted.
pub struct ValidatedRun {
    pub label: String,
    pub graph: Graph,
    pub sectors: Vec<usize>,
    pub dimension: usize,
    pub params: ModelParams,
    pub grid: TimeGrid,
    pub initial_site: usize,
    pub disorder: Option<DisorderSpec>,
    pub observables: Vec<Observable>,
    pub classical_prefactor: f64,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<RunConfig> {
        toml::from_str(text).context("config does not match the expected schema")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> anyhow::Result<ValidatedRun> {
        if self.label.is_empty() || !is_slug(&self.label) {
            bail!(
                "label {:?} must be a nonempty lowercase slug (a-z, 0-9, '-')",
                self.label
            );
        }

        let graph = match self.graph.kind.as_str() {
            "chain" => build_chain(self.graph.size),
            "binary-tree" => build_binary_tree(self.graph.size),
            "glued-binary-tree" => build_glued_tree(self.graph.size),
            other => bail!(
                "unknown graph kind {other:?}; expected chain, binary-tree, or glued-binary-tree"
            ),
        }?;

        let m = &self.model;
        let params = ModelParams::ideal(
            m.delta_eps,
            m.t_hop,
            m.v_int,
            m.delta_pair,
            m.gamma_single,
        );
        if !params.all_finite() {
            bail!("model parameters must all be finite");
        }

        let sectors = match (&self.sectors.particles, self.sectors.max_particles) {
            (Some(_), Some(_)) => {
                bail!("give either sectors.particles or sectors.max_particles, not both")
            }
            (Some(list), None) => list.clone(),
            (None, cap) => default_sectors(&params, cap.unwrap_or(3)),
        };
        let space = enumerate_basis(&graph, &sectors)?;
        let dimension = space.dimension();

        let grid = TimeGrid::uniform(self.grid.t_max, self.grid.steps)?;

        let initial_site = self
            .initial
            .site
            .unwrap_or_else(|| graph.default_initial_node());
        if initial_site >= graph.node_count() {
            bail!(
                "initial site {initial_site} out of range: graph has {} nodes",
                graph.node_count()
            );
        }

        let disorder = match &self.disorder {
            Some(d) => Some(DisorderSpec::new(d.strength, d.realizations, d.seed)?),
            None => None,
        };

        let observables = self.resolve_observables(&graph, disorder.is_some())?;

        let classical_prefactor = self.output.classical_prefactor.unwrap_or(1.0);
        if observables.contains(&Observable::Classical)
            && (classical_prefactor.is_nan() || classical_prefactor <= 0.0)
        {
            bail!("classical_prefactor must be positive, got {classical_prefactor}");
        }

        Ok(ValidatedRun {
            label: self.label.clone(),
            graph,
            sectors,
            dimension,
            params,
            grid,
            initial_site,
            disorder,
            observables,
            classical_prefactor,
        })
    }

    fn resolve_observables(
        &self,
        graph: &Graph,
        disordered: bool,
    ) -> anyhow::Result<Vec<Observable>> {
        let selected = match &self.output.observables {
            Some(names) => {
                if names.is_empty() {
                    bail!("output.observables must not be empty when present");
                }
                let mut out = Vec::new();
                for name in names {
                    let obs = Observable::parse(name).ok_or_else(|| {
                        anyhow::anyhow!(
                            "unknown observable {name:?}; expected one of sigma, mean_n, ipr, \
                             distribution, layers, l1_uniform, classical, stationary"
                        )
                    })?;
                    if out.contains(&obs) {
                        bail!("observable {name:?} listed twice");
                    }
                    out.push(obs);
                }
                out
            }
            None => {
                let mut out = vec![
                    Observable::Sigma,
                    Observable::MeanN,
                    Observable::Ipr,
                    Observable::Distribution,
                ];
                if graph.kind() != GraphKind::Chain {
                    out.push(Observable::Layers);
                }
                out
            }
        };

        if graph.kind() == GraphKind::Chain && selected.contains(&Observable::Layers) {
            bail!("layer columns are only defined for tree graphs");
        }
        if disordered && selected.contains(&Observable::Stationary) {
            bail!("the stationary distribution is defined for clean runs only");
        }
        Ok(selected)
    }
}

fn is_slug(s: &str) -> bool {
    s.chars()
        .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-')
}
