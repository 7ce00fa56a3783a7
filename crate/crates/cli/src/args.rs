use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use vdsp::pipeline::RunConfig;
use vdsp::targets::{Family, TargetSpec};
use vdsp::train::{LossKind, TrainConfig};

#[derive(Parser, Debug)]
#[command(name = "vdsp", version, about = "Variational disentangling state preparation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a target state and export its amplitudes.
    Target(Common),
    /// Train a bare PQC (distance loss by default).
    Train(Common),
    /// Matrix-product disentangler baseline.
    Mpd(Common),
    /// Entropy-minimizing PQC followed by an MPD.
    Vdsp(Common),
    /// VDSP, PQC and MPD for layer counts 1..=max-layers.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6)]
        max_layers: usize,
    },
    /// Maximum MPO bond dimension of random PQCs.
    MpoTable {
        #[arg(long, default_value_t = 10)]
        max_qubits: usize,
        #[arg(long, default_value_t = vdsp::tensornet::DEFAULT_SVD_CUTOFF)]
        cutoff: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Run the rows of a benchmark manifest.
    Bench {
        /// Manifest file; the built-in tables when omitted.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Restrict to these tables (repeatable).
        #[arg(long = "table")]
        tables: Vec<String>,
        #[arg(long)]
        max_qubits: Option<usize>,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// Include wall-clock times in the reports.
        #[arg(long)]
        timings: bool,
    },
}

/// Flags shared by the single-run subcommands. Anything given here overrides
/// the configuration file.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// TOML file with `target`, `train`, `vl`, `mpd_layers` and `loss`.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub qubits: Option<usize>,
    /// normal1d, normal2d, ricker1d, ricker2d or sparse.
    #[arg(long)]
    pub family: Option<String>,
    /// Mean; `x,y` for normal2d.
    #[arg(long, value_delimiter = ',')]
    pub mu: Vec<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Covariance `a,b,c,d` (row-major) for normal2d.
    #[arg(long, value_delimiter = ',')]
    pub cov: Vec<f64>,
    /// Non-zero amplitudes of a sparse target.
    #[arg(long)]
    pub d: Option<usize>,
    /// Seed of the sparse target sampler.
    #[arg(long, default_value_t = 0)]
    pub target_seed: u64,
    /// Variational layers.
    #[arg(long)]
    pub vl: Option<usize>,
    #[arg(long)]
    pub mpd_layers: Option<usize>,
    /// distance, infidelity, cumulative_ee or sparse_ee.
    #[arg(long)]
    pub loss: Option<LossKind>,
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    /// Also write circuit.qasm.
    #[arg(long)]
    pub qasm: bool,
    /// Include wall-clock times in the reports.
    #[arg(long)]
    pub timings: bool,
}

/// Config file merged with command-line overrides.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub target: TargetSpec,
    pub train: TrainConfig,
    pub vl: usize,
    pub mpd_layers: usize,
    pub loss: Option<LossKind>,
}

pub fn train_overrides(mut cfg: TrainConfig, iters: Option<usize>, seed: Option<u64>, lr: Option<f64>) -> TrainConfig {
    if let Some(i) = iters {
        cfg.max_iters = i;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(lr) = lr {
        cfg.learning_rate = lr;
    }
    cfg
}

impl Common {
    pub fn resolve(&self) -> Result<Resolved> {
        let base = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                RunConfig::from_toml_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => RunConfig::default(),
        };
        let target = match (&self.family, base.target) {
            (Some(name), base_target) => {
                let n = self
                    .qubits
                    .or(base_target.map(|t| t.n_qubits()))
                    .context("--qubits is required")?;
                TargetSpec::with_default_grid(self.family_from_flags(name)?, n)
            }
            (None, Some(mut t)) => {
                if let Some(n) = self.qubits {
                    t.grid.n_qubits = n;
                }
                t
            }
            (None, None) => bail!("no target given: pass --family or a config file with a [target] table"),
        };
        target.validate()?;
        let train = train_overrides(base.train, self.iters, self.seed, self.lr);
        train.validate()?;
        Ok(Resolved {
            target,
            train,
            vl: self.vl.or(base.vl).unwrap_or(3),
            mpd_layers: self.mpd_layers.or(base.mpd_layers).unwrap_or(1),
            loss: self.loss.or(base.loss),
        })
    }

    fn family_from_flags(&self, name: &str) -> Result<Family> {
        let family = match name {
            "normal1d" => Family::Normal1d {
                mu: self.mu.first().copied().unwrap_or(0.5),
                sigma: self.sigma.unwrap_or(0.1),
            },
            "normal2d" => {
                let mu = match self.mu.as_slice() {
                    [] => [0.5, 0.5],
                    [m] => [*m, *m],
                    [x, y] => [*x, *y],
                    _ => bail!("--mu takes one or two values for normal2d"),
                };
                let cov = match self.cov.as_slice() {
                    [] => [[0.1, 0.01], [0.01, 0.1]],
                    [a, b, c, d] => [[*a, *b], [*c, *d]],
                    _ => bail!("--cov takes four values a,b,c,d"),
                };
                Family::Normal2d { mu, cov }
            }
            "ricker1d" => Family::Ricker1d {
                sigma: self.sigma.unwrap_or(0.2),
            },
            "ricker2d" => Family::Ricker2d {
                sigma: self.sigma.unwrap_or(0.15),
            },
            "sparse" => Family::Sparse {
                d: self.d.context("--d is required for sparse targets")?,
                seed: self.target_seed,
            },
            other => bail!("unknown family {other:?}"),
        };
        Ok(family)
    }
}
