use std::path::{Path, PathBuf};

use anyhow::bail;
use clap::{Parser, Subcommand};

use qwalk_cli::config::{DisorderSection, RunConfig};
use qwalk_cli::output::read_text;
use qwalk_cli::{exit_code_for, presets, runner};

#[derive(Parser)]
#[command(
    name = "qwalk",
    version,
    about = "Continuous-time quantum walks with fluctuating particle number"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the run described by a TOML config file.
    Run {
        config: PathBuf,
        /// Output directory (default: the config's, else qwalk-out/<label>).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        label: Option<String>,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        initial_site: Option<usize>,
        /// Disorder strength; with --realizations and --seed this can also
        /// add an ensemble to a clean config.
        #[arg(long)]
        strength: Option<f64>,
        #[arg(long)]
        realizations: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Execute every variant of a named preset.
    Preset {
        name: String,
        /// Output directory (default: qwalk-out/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the variant configs as TOML instead of running them.
        #[arg(long)]
        emit_config: bool,
    },
    /// List the preset catalog.
    ListPresets,
    /// Parse and validate a config file without running it.
    Validate { config: PathBuf },
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = dispatch(cli.command) {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code_for(&err));
    }
}

fn dispatch(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Run {
            config,
            out,
            label,
            t_max,
            steps,
            initial_site,
            strength,
            realizations,
            seed,
        } => {
            let mut cfg = RunConfig::from_toml(&read_text(&config)?)?;
            if let Some(label) = label {
                cfg.label = label;
            }
            if let Some(t_max) = t_max {
                cfg.grid.t_max = t_max;
            }
            if let Some(steps) = steps {
                cfg.grid.steps = steps;
            }
            if let Some(site) = initial_site {
                cfg.initial.site = Some(site);
            }
            apply_disorder_overrides(&mut cfg, strength, realizations, seed)?;

            let out_dir = out.unwrap_or_else(|| default_out_dir(&cfg));
            report(&runner::execute(&cfg, &out_dir)?, &out_dir);
            Ok(())
        }

        Command::Preset {
            name,
            out,
            emit_config,
        } => {
            let Some(preset) = presets::find(&name) else {
                bail!(
                    "unknown preset {name:?}; `qwalk list-presets` shows what is available"
                );
            };
            if emit_config {
                for cfg in &preset.configs {
                    println!("# variant: {}", cfg.label);
                    println!("{}", cfg.to_toml());
                }
                return Ok(());
            }
            let out_dir = out.unwrap_or_else(|| PathBuf::from("qwalk-out").join(preset.name));
            let mut reports = Vec::new();
            for cfg in &preset.configs {
                let r = runner::execute(cfg, &out_dir)?;
                report(&r, &out_dir);
                reports.push(r);
            }
            let index = runner::write_preset_index(preset.name, &reports, &out_dir)?;
            println!("{}: wrote {index}", preset.name);
            Ok(())
        }

        Command::ListPresets => {
            for preset in presets::catalog() {
                println!(
                    "{:<20} {} variant(s); {}; runtime: {}",
                    preset.name,
                    preset.configs.len(),
                    preset.summary,
                    preset.runtime
                );
            }
            Ok(())
        }

        Command::Validate { config } => {
            let cfg = RunConfig::from_toml(&read_text(&config)?)?;
            let v = cfg.validate()?;
            println!(
                "ok: label {}, {} of size {} ({} nodes), sectors {:?}, dimension {}, {} time points{}",
                v.label,
                v.graph.kind().as_str(),
                v.graph.size(),
                v.graph.node_count(),
                v.sectors,
                v.dimension,
                v.grid.len(),
                match &v.disorder {
                    Some(d) => format!(
                        ", ensemble of {} realizations at w={} (seed {})",
                        d.realizations(),
                        d.strength(),
                        d.seed()
                    ),
                    None => String::new(),
                }
            );
            Ok(())
        }
    }
}

fn apply_disorder_overrides(
    cfg: &mut RunConfig,
    strength: Option<f64>,
    realizations: Option<usize>,
    seed: Option<u64>,
) -> anyhow::Result<()> {
    if strength.is_none() && realizations.is_none() && seed.is_none() {
        return Ok(());
    }
    match &mut cfg.disorder {
        Some(d) => {
            if let Some(w) = strength {
                d.strength = w;
            }
            if let Some(r) = realizations {
                d.realizations = r;
            }
            if let Some(s) = seed {
                d.seed = s;
            }
        }
        None => match (strength, realizations, seed) {
            (Some(strength), Some(realizations), Some(seed)) => {
                cfg.disorder = Some(DisorderSection {
                    strength,
                    realizations,
                    seed,
                });
            }
            _ => bail!(
                "the config has no [disorder] section; adding one from flags needs \
                 --strength, --realizations, and --seed together"
            ),
        },
    }
    Ok(())
}

fn default_out_dir(cfg: &RunConfig) -> PathBuf {
    match &cfg.output.directory {
        Some(dir) => PathBuf::from(dir),
        None => Path::new("qwalk-out").join(&cfg.label),
    }
}

fn report(report: &runner::RunReport, out_dir: &Path) {
    println!(
        "{}: dimension {}, {} file(s) in {} ({} ms)",
        report.label,
        report.dimension,
        report.outputs.len(),
        out_dir.display(),
        report.wall_ms
    );
}
