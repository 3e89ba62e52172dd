//! Command implementations and the operation → subcommand ownership table.

use crate::config::{Cli, ParamFile, Params};
use ifs_measures::cuntz::{
    default_window, solve_joint_eigenproblem, verify_cuntz_relations, EIGEN_TOL,
};
use ifs_measures::diagnostics::{
    convergence_profile, cyclicity_test, eigen_cross_check, pushforward_measure,
    radon_nikodym_profile, AC_TOL,
};
use ifs_measures::filterbank::{
    daubechies4_bank, fourier_basis_bank, monomial_bank, FilterBank, UNITARITY_TOL,
};
use ifs_measures::hutchinson::{
    attractor_cover, cascade, chaos_game, self_similarity_residual, solve_moments, AffineIFS,
    cantor_ifs, dyadic_ifs,
};
use ifs_measures::io;
use ifs_measures::nadic::{
    atom_tree, atom_tree_with_stats, cdf, fourier_error_bound, fourier_of_atoms, integrate,
};
use ifs_measures::{CoeffVector, Error};
use serde::Serialize;
use std::fmt;
use std::io::Write;
use std::path::Path;

/// Which subcommand owns each library operation.  Integration tests assert
/// the table covers every operation exactly once, so no operation is left
/// unreachable from the batch surface.
pub const OP_OWNERS: &[(&str, &str)] = &[
    ("validate_filterbank", "validate"),
    ("fourier_basis_bank", "validate"),
    ("monomial_bank", "validate"),
    ("apply_s", "cyclicity"),
    ("apply_s_star", "atoms"),
    ("verify_cuntz_relations", "eigen-check"),
    ("solve_joint_eigenproblem", "eigen-check"),
    ("atom_tree", "atoms"),
    ("refine", "convergence"),
    ("fourier_of_atoms", "fourier"),
    ("fourier_error_bound", "fourier"),
    ("cdf", "cdf"),
    ("integrate", "integrate"),
    ("refinement_residual", "convergence"),
    ("cascade", "hutchinson-cascade"),
    ("chaos_game", "hutchinson-chaos"),
    ("solve_moments", "moments"),
    ("self_similarity_residual", "hutchinson-cascade"),
    ("attractor_cover", "hutchinson-cascade"),
    ("pushforward_measure", "cyclicity"),
    ("cyclicity_test", "cyclicity"),
    ("radon_nikodym_profile", "cyclicity"),
    ("eigen_cross_check", "cross-check"),
    ("convergence_profile", "convergence"),
];

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed inputs and bad parameters (exit 1).
    Input(String),
    /// A bank or vector failed its validation gate (exit 2).
    Validation(String),
    /// Enumeration cap exceeded (exit 3).
    Overflow(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Overflow(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Validation(m) | CliError::Overflow(m) => {
                f.write_str(m)
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DepthOverflow { .. } => CliError::Overflow(e.to_string()),
            Error::NotUnitVector { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

type CliResult = Result<(), CliError>;

pub fn dispatch(cli: Cli) -> CliResult {
    let name = cli.command.name();
    let mut params = cli.command.params().clone();
    if let Some(path) = params.config.clone() {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))?;
        let file: ParamFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))?;
        params = params.merged_with(file);
    }
    match name {
        "validate" => run_validate(&params),
        "atoms" => run_atoms(&params),
        "fourier" => run_fourier(&params),
        "cdf" => run_cdf(&params),
        "integrate" => run_integrate(&params),
        "cyclicity" => run_cyclicity(&params),
        "hutchinson-cascade" => run_cascade(&params),
        "hutchinson-chaos" => run_chaos(&params),
        "moments" => run_moments(&params),
        "eigen-check" => run_eigen_check(&params),
        "cross-check" => run_cross_check(&params),
        "convergence" => run_convergence(&params),
        _ => unreachable!("clap accepts only known subcommands"),
    }
}

// ---- input loading -------------------------------------------------------

fn load_bank(params: &Params) -> Result<FilterBank, CliError> {
    let spec = params
        .bank
        .as_deref()
        .ok_or_else(|| CliError::Input("--bank is required".into()))?;
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| CliError::Input(format!("{spec}: {e}")))?;
        return Ok(io::bank_from_json(&text)?);
    }
    let builtin = match spec {
        "haar" => Some(fourier_basis_bank(2)?),
        "shift" => Some(monomial_bank(2)?),
        "d4" => Some(daubechies4_bank()),
        _ => {
            if let Some(n) = spec.strip_prefix("fourier:") {
                let n: usize = n
                    .parse()
                    .map_err(|_| CliError::Input(format!("bad channel count in `{spec}`")))?;
                Some(fourier_basis_bank(n)?)
            } else if let Some(n) = spec.strip_prefix("monomial:") {
                let n: usize = n
                    .parse()
                    .map_err(|_| CliError::Input(format!("bad channel count in `{spec}`")))?;
                Some(monomial_bank(n)?)
            } else {
                None
            }
        }
    };
    builtin.ok_or_else(|| {
        CliError::Input(format!(
            "`{spec}` is neither a file nor a builtin bank (haar, shift, d4, fourier:N, monomial:N)"
        ))
    })
}

/// Loads the bank and enforces the unitarity gate every measure command
/// sits behind.
fn load_validated_bank(params: &Params) -> Result<FilterBank, CliError> {
    let fb = load_bank(params)?;
    let report = fb.validate_default()?;
    if !report.passed {
        return Err(CliError::Validation(format!(
            "filter bank is not unitary: defect {:e} at angle {:.6}",
            report.max_defect, report.worst_z
        )));
    }
    Ok(fb)
}

fn load_vector(params: &Params) -> Result<CoeffVector, CliError> {
    let spec = params
        .vector
        .as_deref()
        .ok_or_else(|| CliError::Input("--vector is required".into()))?;
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| CliError::Input(format!("{spec}: {e}")))?;
        return Ok(io::vector_from_json(&text)?);
    }
    if let Some(n) = spec.strip_prefix('e') {
        if let Ok(n) = n.parse::<i64>() {
            return Ok(CoeffVector::basis(n));
        }
    }
    Err(CliError::Input(format!(
        "`{spec}` is neither a file nor a basis spec like `e0`"
    )))
}

fn load_ifs(params: &Params) -> Result<AffineIFS, CliError> {
    let spec = params
        .ifs
        .as_deref()
        .ok_or_else(|| CliError::Input("--ifs is required".into()))?;
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| CliError::Input(format!("{spec}: {e}")))?;
        return Ok(io::ifs_from_json(&text)?);
    }
    match spec {
        "cantor" => Ok(cantor_ifs()),
        "dyadic" => Ok(dyadic_ifs()),
        _ => Err(CliError::Input(format!(
            "`{spec}` is neither a file nor a builtin IFS (cantor, dyadic)"
        ))),
    }
}

fn require_k(params: &Params) -> Result<u32, CliError> {
    params
        .k
        .ok_or_else(|| CliError::Input("--k is required".into()))
}

/// `a:b:n` → n points from a to b inclusive.
fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Input(format!(
            "grid `{spec}` must look like a:b:n"
        )));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::Input(format!("bad grid start `{}`", parts[0])))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::Input(format!("bad grid end `{}`", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| CliError::Input(format!("bad grid count `{}`", parts[2])))?;
    if n == 0 {
        return Err(CliError::Input("grid needs at least one point".into()));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect())
}

fn emit(params: &Params, bytes: &[u8]) -> CliResult {
    match &params.out {
        Some(path) => Ok(io::write_atomic(path, bytes)?),
        None => {
            std::io::stdout()
                .write_all(bytes)
                .map_err(|e| CliError::Input(e.to_string()))?;
            Ok(())
        }
    }
}

// ---- commands ------------------------------------------------------------

fn run_validate(params: &Params) -> CliResult {
    let fb = load_bank(params)?;
    let samples = params.samples.unwrap_or_else(|| fb.default_samples());
    let tol = params.unitarity_tol.unwrap_or(UNITARITY_TOL);
    let report = fb.validate(samples, tol)?;
    let mut text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
    text.push('\n');
    emit(params, text.as_bytes())?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "unitarity defect {:e} exceeds {tol:e}",
            report.max_defect
        )))
    }
}

fn run_atoms(params: &Params) -> CliResult {
    let fb = load_validated_bank(params)?;
    let f = load_vector(params)?;
    let k = require_k(params)?;
    let prune = params.prune_eps.unwrap_or(0.0);
    let (mu, stats) = atom_tree_with_stats(&fb, &f, k, prune)?;
    let mut buf = Vec::new();
    io::write_atoms_csv(&mu, &mut buf)?;
    emit(params, &buf)?;
    eprintln!(
        "atoms: {} atoms, {} leaves visited, pruned mass {:?}",
        mu.n_atoms(),
        stats.leaves_visited,
        stats.pruned_mass
    );
    Ok(())
}

fn run_fourier(params: &Params) -> CliResult {
    let fb = load_validated_bank(params)?;
    let f = load_vector(params)?;
    let k = require_k(params)?;
    let grid = parse_grid(
        params
            .t_grid
            .as_deref()
            .ok_or_else(|| CliError::Input("--t-grid is required".into()))?,
    )?;
    let mu = atom_tree(&fb, &f, k, params.prune_eps.unwrap_or(0.0))?;
    let values = fourier_of_atoms(&mu, &grid);
    let mut buf = Vec::new();
    io::write_series_csv(grid.iter().copied().zip(values), &mut buf)?;
    emit(params, &buf)?;
    let worst = grid
        .iter()
        .map(|&t| fourier_error_bound(t, k, fb.n_channels() as u32))
        .fold(0.0f64, f64::max);
    eprintln!("fourier: certified truncation bound ≤ {worst:e} over the grid");
    Ok(())
}

fn run_cdf(params: &Params) -> CliResult {
    let fb = load_validated_bank(params)?;
    let f = load_vector(params)?;
    let k = require_k(params)?;
    let grid = parse_grid(
        params
            .x_grid
            .as_deref()
            .ok_or_else(|| CliError::Input("--x-grid is required".into()))?,
    )?;
    let mu = atom_tree(&fb, &f, k, params.prune_eps.unwrap_or(0.0))?;
    let values = cdf(&mu, &grid);
    let mut buf = Vec::new();
    io::write_cdf_csv(grid.iter().copied().zip(values), &mut buf)?;
    emit(params, &buf)
}

#[derive(Serialize)]
struct IntegrateOut<'a> {
    psi: &'a str,
    k: u32,
    value: f64,
    bound: Option<f64>,
}

fn run_integrate(params: &Params) -> CliResult {
    let fb = load_validated_bank(params)?;
    let f = load_vector(params)?;
    let k = require_k(params)?;
    let name = params.psi.as_deref().unwrap_or("one");
    let psi: fn(f64) -> f64 = match name {
        "one" => |_| 1.0,
        "x" => |x| x,
        "xsq" => |x| x * x,
        "cos2pi" => |x| (std::f64::consts::TAU * x).cos(),
        "sin2pi" => |x| (std::f64::consts::TAU * x).sin(),
        other => {
            return Err(CliError::Input(format!(
                "unknown psi `{other}` (one, x, xsq, cos2pi, sin2pi)"
            )))
        }
    };
    let mu = atom_tree(&fb, &f, k, params.prune_eps.unwrap_or(0.0))?;
    let (value, bound) = integrate(&mu, psi, params.moment);
    let mut text = serde_json::to_string_pretty(&IntegrateOut {
        psi: name,
        k,
        value,
        bound,
    })
    .map_err(Error::from)?;
    text.push('\n');
    emit(params, text.as_bytes())
}

fn run_cyclicity(params: &Params) -> CliResult {
    let fb = load_validated_bank(params)?;
    let f = load_vector(params)?;
    let k = require_k(params)?;
    let ac_tol = params.ac_tol.unwrap_or(AC_TOL);
    let report = cyclicity_test(&fb, &f, k, ac_tol)?;
    let mut text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
    text.push('\n');
    emit(params, text.as_bytes())?;
    // per-channel density profiles on stderr
    let base = atom_tree(&fb, &f, k, 0.0)?;
    for j in 0..fb.n_channels() {
        let push = pushforward_measure(&fb, &f, j, k)?;
        let profile = radon_nikodym_profile(&push, &base, ac_tol)?;
        let lo = profile
            .ratios
            .iter()
            .map(|&(_, r)| r)
            .fold(f64::INFINITY, f64::min);
        let hi = profile
            .ratios
            .iter()
            .map(|&(_, r)| r)
            .fold(f64::NEG_INFINITY, f64::max);
        eprintln!(
            "cyclicity: channel {j}: {} density atoms (ratios in [{lo:?}, {hi:?}]), {} singular",
            profile.ratios.len(),
            profile.singular.len()
        );
    }
    Ok(())
}

fn run_cascade(params: &Params) -> CliResult {
    let ifs = load_ifs(params)?;
    let k = require_k(params)?;
    let seed = params.seed_point.unwrap_or(0.0);
    let cloud = cascade(&ifs, k, seed)?;
    let mut buf = Vec::new();
    io::write_cloud_csv(&cloud, &mut buf)?;
    emit(params, &buf)?;
    let residual = self_similarity_residual(&ifs, &cloud)?;
    let cover = attractor_cover(&ifs, k.max(1))?;
    eprintln!(
        "cascade: {} atoms, self-similarity residual {residual:e}, cover max diameter {:e}, non-overlapping: {}",
        cloud.n_atoms(),
        cover.max_diameter,
        cover.non_overlapping
    );
    Ok(())
}

fn run_chaos(params: &Params) -> CliResult {
    let ifs = load_ifs(params)?;
    let stats = chaos_game(
        &ifs,
        params.n_samples.unwrap_or(1_000_000),
        params.burn_in.unwrap_or(100),
        params.seed.unwrap_or(0),
        params.bins,
    )?;
    let mut text = serde_json::to_string_pretty(&stats).map_err(Error::from)?;
    text.push('\n');
    emit(params, text.as_bytes())
}

fn run_moments(params: &Params) -> CliResult {
    let ifs = load_ifs(params)?;
    let max_order = params.max_order.unwrap_or(6);
    let moments = solve_moments(&ifs, max_order);
    let mut buf = String::from("order,value\n");
    for (r, m) in moments.iter().enumerate() {
        buf.push_str(&format!("{r},{m:?}\n"));
    }
    emit(params, buf.as_bytes())
}

#[derive(Serialize)]
struct EigenOut {
    found: bool,
    window: i64,
    eigen_tol: f64,
    /// Best residual seen; absent when the window search had no candidate.
    residual: Option<f64>,
    lambdas: Vec<[f64; 2]>,
    sum_lambda_sq: f64,
    vector: Vec<(i64, f64, f64)>,
    cuntz_relations: ifs_measures::cuntz::CuntzRelationsReport,
}

fn run_eigen_check(params: &Params) -> CliResult {
    let fb = load_validated_bank(params)?;
    let window = params.window.unwrap_or_else(|| default_window(&fb));
    let tol = params.eigen_tol.unwrap_or(EIGEN_TOL);
    let sol = solve_joint_eigenproblem(&fb, window, tol)?;
    let probes: Vec<CoeffVector> = (-2..=2).map(CoeffVector::basis).collect();
    let relations = verify_cuntz_relations(&fb, &probes, 1e-10)?;
    let out = EigenOut {
        found: sol.found,
        window,
        eigen_tol: tol,
        residual: sol.residual.is_finite().then_some(sol.residual),
        lambdas: sol.lambdas.iter().map(|l| [l.re, l.im]).collect(),
        sum_lambda_sq: sol
            .lambdas
            .iter()
            .map(|l| l.norm_sqr())
            .fold(0.0, |a, x| a + x),
        vector: sol.vector.entries().map(|(n, c)| (n, c.re, c.im)).collect(),
        cuntz_relations: relations,
    };
    let mut text = serde_json::to_string_pretty(&out).map_err(Error::from)?;
    text.push('\n');
    emit(params, text.as_bytes())
}

fn run_cross_check(params: &Params) -> CliResult {
    let fb = load_validated_bank(params)?;
    let k = params.k.unwrap_or(8);
    let report = eigen_cross_check(&fb, k)?;
    let mut text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
    text.push('\n');
    emit(params, text.as_bytes())
}

fn run_convergence(params: &Params) -> CliResult {
    let fb = load_validated_bank(params)?;
    let f = load_vector(params)?;
    let k_min = params
        .k_min
        .ok_or_else(|| CliError::Input("--k-min is required".into()))?;
    let k_max = params
        .k_max
        .ok_or_else(|| CliError::Input("--k-max is required".into()))?;
    let grid = parse_grid(
        params
            .x_grid
            .as_deref()
            .ok_or_else(|| CliError::Input("--x-grid is required".into()))?,
    )?;
    let rows = convergence_profile(&fb, &f, k_min, k_max, &grid)?;
    let mut buf = String::from("k,sup_diff,refinement_residual\n");
    for row in &rows {
        buf.push_str(&format!(
            "{},{:?},{:?}\n",
            row.k, row.sup_diff, row.refinement_residual
        ));
    }
    emit(params, buf.as_bytes())
}
