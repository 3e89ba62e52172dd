//! Argument surface: one shared parameter set across all subcommands, with
//! an optional JSON config file whose keys mirror the flags.  Flags
//! override file values; unknown file keys are rejected.

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "ifsm", version, about = "filter-bank and IFS measure computations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the unitarity of a filter bank and report the worst defect.
    Validate(Params),
    /// Enumerate the depth-k atoms of the measure induced by a vector.
    Atoms(Params),
    /// Fourier transform of the depth-k atomic measure on a t-grid.
    Fourier(Params),
    /// Distribution function of the depth-k atomic measure on an x-grid.
    Cdf(Params),
    /// Integrate a named test function against the atomic measure.
    Integrate(Params),
    /// Absolute-continuity test of the channel pushforwards.
    Cyclicity(Params),
    /// Deterministic cascade approximation of an IFS fixed-point measure.
    #[command(name = "hutchinson-cascade")]
    HutchinsonCascade(Params),
    /// Chaos-game sampling of an IFS fixed-point measure.
    #[command(name = "hutchinson-chaos")]
    HutchinsonChaos(Params),
    /// Exact moments of an IFS fixed-point measure.
    Moments(Params),
    /// Joint adjoint eigenvector search plus the defining-relation defects.
    #[command(name = "eigen-check")]
    EigenCheck(Params),
    /// Compare the eigenvalue-weighted cascade against the atom tree.
    #[command(name = "cross-check")]
    CrossCheck(Params),
    /// Distribution-function convergence table across depths.
    Convergence(Params),
}

impl Command {
    pub fn params(&self) -> &Params {
        match self {
            Command::Validate(p)
            | Command::Atoms(p)
            | Command::Fourier(p)
            | Command::Cdf(p)
            | Command::Integrate(p)
            | Command::Cyclicity(p)
            | Command::HutchinsonCascade(p)
            | Command::HutchinsonChaos(p)
            | Command::Moments(p)
            | Command::EigenCheck(p)
            | Command::CrossCheck(p)
            | Command::Convergence(p) => p,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Atoms(_) => "atoms",
            Command::Fourier(_) => "fourier",
            Command::Cdf(_) => "cdf",
            Command::Integrate(_) => "integrate",
            Command::Cyclicity(_) => "cyclicity",
            Command::HutchinsonCascade(_) => "hutchinson-cascade",
            Command::HutchinsonChaos(_) => "hutchinson-chaos",
            Command::Moments(_) => "moments",
            Command::EigenCheck(_) => "eigen-check",
            Command::CrossCheck(_) => "cross-check",
            Command::Convergence(_) => "convergence",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Params {
    /// Filter bank: a JSON file path or a builtin name
    /// (haar, shift, d4, fourier:N, monomial:N).
    #[arg(long)]
    pub bank: Option<String>,
    /// Coefficient vector: a JSON file path or a basis spec like `e0`.
    #[arg(long)]
    pub vector: Option<String>,
    /// Affine IFS: a JSON file path or a builtin name (cantor, dyadic).
    #[arg(long)]
    pub ifs: Option<String>,
    /// Partition depth.
    #[arg(long)]
    pub k: Option<u32>,
    /// Fourier grid `a:b:n` (n points from a to b inclusive).
    #[arg(long, value_name = "A:B:N", allow_hyphen_values = true)]
    pub t_grid: Option<String>,
    /// Evaluation grid `a:b:n`.
    #[arg(long, value_name = "A:B:N", allow_hyphen_values = true)]
    pub x_grid: Option<String>,
    /// Subtree mass below which enumeration prunes (default 0).
    #[arg(long)]
    pub prune_eps: Option<f64>,
    /// RNG seed for the chaos game.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Starting point of the cascade (default 0).
    #[arg(long)]
    pub seed_point: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config file supplying any of these parameters.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Circle sample count for `validate` (default 4·span+1).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Unitarity tolerance for `validate` (default 1e-10).
    #[arg(long)]
    pub unitarity_tol: Option<f64>,
    /// Sample count for the chaos game (default 1000000).
    #[arg(long)]
    pub n_samples: Option<u64>,
    /// Burn-in iterations for the chaos game (default 100).
    #[arg(long)]
    pub burn_in: Option<u64>,
    /// Histogram bin count for the chaos game.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Coefficient window half-width for `eigen-check`.
    #[arg(long)]
    pub window: Option<i64>,
    /// Residual tolerance for `eigen-check` (default 1e-8).
    #[arg(long)]
    pub eigen_tol: Option<f64>,
    /// Mass floor for absolute-continuity tests (default 1e-12).
    #[arg(long)]
    pub ac_tol: Option<f64>,
    /// Highest moment order for `moments` (default 6).
    #[arg(long)]
    pub max_order: Option<u32>,
    /// Test function for `integrate`: one, x, xsq, cos2pi, sin2pi.
    #[arg(long)]
    pub psi: Option<String>,
    /// `∫|t·ψ̂(t)|dt` for the certified integration bound.
    #[arg(long)]
    pub moment: Option<f64>,
    /// Lowest depth for `convergence`.
    #[arg(long)]
    pub k_min: Option<u32>,
    /// Highest depth for `convergence` (compared against).
    #[arg(long)]
    pub k_max: Option<u32>,
}

/// File form of [`Params`]; every key optional, unknown keys rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    pub bank: Option<String>,
    pub vector: Option<String>,
    pub ifs: Option<String>,
    pub k: Option<u32>,
    pub t_grid: Option<String>,
    pub x_grid: Option<String>,
    pub prune_eps: Option<f64>,
    pub seed: Option<u64>,
    pub seed_point: Option<f64>,
    pub out: Option<PathBuf>,
    pub samples: Option<usize>,
    pub unitarity_tol: Option<f64>,
    pub n_samples: Option<u64>,
    pub burn_in: Option<u64>,
    pub bins: Option<usize>,
    pub window: Option<i64>,
    pub eigen_tol: Option<f64>,
    pub ac_tol: Option<f64>,
    pub max_order: Option<u32>,
    pub psi: Option<String>,
    pub moment: Option<f64>,
    pub k_min: Option<u32>,
    pub k_max: Option<u32>,
}

impl Params {
    /// Fills unset flags from the config file.
    pub fn merged_with(mut self, file: ParamFile) -> Params {
        macro_rules! fill {
            ($($field:ident),* $(,)?) => {
                $( if self.$field.is_none() { self.$field = file.$field; } )*
            };
        }
        fill!(
            bank, vector, ifs, k, t_grid, x_grid, prune_eps, seed, seed_point, out, samples,
            unitarity_tol, n_samples, burn_in, bins, window, eigen_tol, ac_tol, max_order, psi,
            moment, k_min, k_max,
        );
        self
    }
}
