//! Canned parameter sets for the published figure family.
//!
//! Each preset expands to one or more labeled run configs. Runtimes below
//! assume a single CPU; the full-size disordered ensembles are faithful to
//! the source data and take hours, so reduced variants are provided where a
//! quick check of the same trend is wanted.

use crate::config::{
    DisorderSection, GraphSection, GridSection, InitialSection, ModelSection, OutputSection,
    RunConfig, SectorSection,
};

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub runtime: &'static str,
    pub configs: Vec<RunConfig>,
}

pub fn find(name: &str) -> Option<Preset> {
    catalog().into_iter().find(|p| p.name == name)
}

struct Builder {
    cfg: RunConfig,
}

/// Starts from the conventions shared by most figures: hopping 1, detuning
/// 20, clean lattice, series over τ ≤ 15.
fn run(label: &str, kind: &str, size: usize) -> Builder {
    Builder {
        cfg: RunConfig {
            label: label.into(),
            graph: GraphSection {
                kind: kind.into(),
                size,
            },
            model: ModelSection {
                delta_eps: 20.0,
                t_hop: 1.0,
                v_int: 0.0,
                delta_pair: 0.0,
                gamma_single: 0.0,
            },
            sectors: SectorSection::default(),
            grid: GridSection {
                t_max: 15.0,
                steps: 1500,
            },
            initial: InitialSection::default(),
            disorder: None,
            output: OutputSection::default(),
        },
    }
}

impl Builder {
    fn detuning(mut self, delta_eps: f64) -> Self {
        self.cfg.model.delta_eps = delta_eps;
        self
    }
    fn pair(mut self, delta_pair: f64) -> Self {
        self.cfg.model.delta_pair = delta_pair;
        self
    }
    fn single(mut self, gamma: f64) -> Self {
        self.cfg.model.gamma_single = gamma;
        self
    }
    fn interaction(mut self, v: f64) -> Self {
        self.cfg.model.v_int = v;
        self
    }
    fn particles(mut self, list: &[usize]) -> Self {
        self.cfg.sectors.particles = Some(list.to_vec());
        self
    }
    fn grid(mut self, t_max: f64, steps: usize) -> Self {
        self.cfg.grid = GridSection { t_max, steps };
        self
    }
    fn disorder(mut self, strength: f64, realizations: usize, seed: u64) -> Self {
        self.cfg.disorder = Some(DisorderSection {
            strength,
            realizations,
            seed,
        });
        self
    }
    fn observables(mut self, names: &[&str]) -> Self {
        self.cfg.output.observables = Some(names.iter().map(|s| s.to_string()).collect());
        self
    }
    fn classical(mut self, prefactor: f64) -> Self {
        self.cfg.output.classical_prefactor = Some(prefactor);
        self
    }
    fn tree_columns(self) -> Self {
        self.observables(&["sigma", "mean_n", "ipr", "distribution", "layers", "l1_uniform"])
    }
    fn stationary(self) -> Self {
        self.observables(&["sigma", "distribution", "stationary"])
    }
    fn done(self) -> RunConfig {
        self.cfg
    }
}

pub fn catalog() -> Vec<Preset> {
    vec![
        Preset {
            name: "smoke",
            summary: "five-site tight-binding sanity run",
            runtime: "under a second",
            configs: vec![run("smoke", "chain", 5).grid(1.0, 100).done()],
        },
        Preset {
            name: "fig1-upper",
            summary: "41-site chain, pair coupling at detunings 10 and 20 vs the free walk",
            runtime: "tens of minutes",
            configs: vec![
                run("ballistic", "chain", 41)
                    .observables(&["sigma", "mean_n", "ipr", "distribution", "classical"])
                    .classical(1.0)
                    .done(),
                run("de10", "chain", 41).detuning(10.0).pair(1.0).done(),
                run("de20", "chain", 41).pair(1.0).done(),
            ],
        },
        Preset {
            name: "fig1-lower",
            summary: "41-site chain, pair coupling with attractive and repulsive interactions",
            runtime: "tens of minutes",
            configs: vec![
                run("v-plus", "chain", 41).pair(1.0).interaction(1.0).done(),
                run("v-minus", "chain", 41).pair(1.0).interaction(-1.0).done(),
            ],
        },
        Preset {
            name: "fig2",
            summary: "19-site chain, particle-number truncation at 1, 3, and 5 particles",
            runtime: "tens of minutes for the five-particle variant",
            configs: vec![
                run("p1", "chain", 19).pair(1.0).particles(&[1]).done(),
                run("p13", "chain", 19).pair(1.0).particles(&[1, 3]).done(),
                run("p135", "chain", 19).pair(1.0).particles(&[1, 3, 5]).done(),
                run("inset-w10", "chain", 19)
                    .pair(1.0)
                    .disorder(10.0, 50, 11)
                    .grid(100.0, 500)
                    .done(),
            ],
        },
        Preset {
            name: "fig3",
            summary: "41-site chain, single-particle coupling γ=t against pair coupling Δ=t",
            runtime: "tens of minutes",
            configs: vec![
                run("ballistic", "chain", 41).done(),
                run("gamma", "chain", 41).single(1.0).done(),
                run("delta", "chain", 41).pair(1.0).done(),
            ],
        },
        Preset {
            name: "fig4-upper",
            summary: "41-site disordered chain, averaged distributions for Δ/t in {1, 1/2, 1/10}",
            runtime: "hours",
            configs: vec![
                run("d1", "chain", 41)
                    .pair(1.0)
                    .disorder(10.0, 100, 17)
                    .grid(100.0, 500)
                    .done(),
                run("d05", "chain", 41)
                    .pair(0.5)
                    .disorder(10.0, 100, 17)
                    .grid(100.0, 500)
                    .done(),
                run("d01", "chain", 41)
                    .pair(0.1)
                    .disorder(10.0, 100, 17)
                    .grid(100.0, 500)
                    .done(),
            ],
        },
        Preset {
            name: "fig4-lower",
            summary: "41-site disordered chain, long-time IPR across disorder strengths",
            runtime: "hours",
            configs: fig4_lower_configs(41, &[2.0, 4.0, 6.0, 8.0, 10.0], 100, 19),
        },
        Preset {
            name: "fig4-lower-reduced",
            summary: "25-site variant of fig4-lower showing the same IPR ordering",
            runtime: "under half an hour",
            configs: fig4_lower_configs(25, &[5.0, 10.0], 50, 11),
        },
        Preset {
            name: "fig6",
            summary: "depth-5 binary tree from the root: spreading and approach to uniformity",
            runtime: "minutes",
            configs: vec![
                run("free", "binary-tree", 5).tree_columns().done(),
                run("de10", "binary-tree", 5)
                    .detuning(10.0)
                    .pair(1.0)
                    .tree_columns()
                    .done(),
                run("de20", "binary-tree", 5).pair(1.0).tree_columns().done(),
            ],
        },
        Preset {
            name: "fig7",
            summary: "depth-5 binary tree, stationary distributions with and without pair coupling",
            runtime: "minutes",
            configs: vec![
                run("free", "binary-tree", 5).stationary().done(),
                run("de10", "binary-tree", 5)
                    .detuning(10.0)
                    .pair(1.0)
                    .stationary()
                    .done(),
                run("de20", "binary-tree", 5).pair(1.0).stationary().done(),
            ],
        },
        Preset {
            name: "fig9",
            summary: "glued depth-4 trees, head-to-bottom transfer, ideal and disordered",
            runtime: "ideal variants in minutes, disordered in about an hour",
            configs: vec![
                run("ideal-free", "glued-binary-tree", 4)
                    .grid(12.0, 1200)
                    .tree_columns()
                    .done(),
                run("ideal-de10", "glued-binary-tree", 4)
                    .detuning(10.0)
                    .pair(1.0)
                    .grid(12.0, 1200)
                    .tree_columns()
                    .done(),
                run("ideal-de20", "glued-binary-tree", 4)
                    .pair(1.0)
                    .grid(12.0, 1200)
                    .tree_columns()
                    .done(),
                run("w5-free", "glued-binary-tree", 4)
                    .disorder(5.0, 100, 23)
                    .grid(6.0, 300)
                    .tree_columns()
                    .done(),
                run("w5-de10", "glued-binary-tree", 4)
                    .detuning(10.0)
                    .pair(1.0)
                    .disorder(5.0, 100, 23)
                    .grid(6.0, 300)
                    .tree_columns()
                    .done(),
                run("w5-de20", "glued-binary-tree", 4)
                    .pair(1.0)
                    .disorder(5.0, 100, 23)
                    .grid(6.0, 300)
                    .tree_columns()
                    .done(),
            ],
        },
        Preset {
            name: "fig10",
            summary: "glued depth-4 trees, disorder-averaged node distributions per detuning",
            runtime: "about an hour",
            configs: vec![
                run("d0", "glued-binary-tree", 4)
                    .disorder(5.0, 100, 23)
                    .grid(6.0, 300)
                    .tree_columns()
                    .done(),
                run("de10", "glued-binary-tree", 4)
                    .detuning(10.0)
                    .pair(1.0)
                    .disorder(5.0, 100, 23)
                    .grid(6.0, 300)
                    .tree_columns()
                    .done(),
                run("de20", "glued-binary-tree", 4)
                    .pair(1.0)
                    .disorder(5.0, 100, 23)
                    .grid(6.0, 300)
                    .tree_columns()
                    .done(),
            ],
        },
    ]
}

fn fig4_lower_configs(
    sites: usize,
    strengths: &[f64],
    realizations: usize,
    seed: u64,
) -> Vec<RunConfig> {
    let mut out = Vec::new();
    for &w in strengths {
        for (tag, delta) in [("d0", 0.0), ("d1", 1.0)] {
            let label = format!("w{}-{}", w as u64, tag);
            let mut b = run(&label, "chain", sites).grid(100.0, if sites > 30 { 500 } else { 250 });
            if delta != 0.0 {
                b = b.pair(delta).particles(&[1, 3]);
            } else {
                // The Δ=0 arm stays in the one-particle sector but is still
                // ensemble-averaged like its partner.
                b = b.particles(&[1]);
            }
            out.push(b.disorder(w, realizations, seed).done());
        }
    }
    out
}
