//! Command-line driver: reads matrix JSON, runs one experiment, emits a report.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde_json::json;

use schurlab::gaps::{gap, kernel, semigap};
use schurlab::lab::{
    fmt_float, ginibre_with_norm, holder_csv, holder_ratio_with, rng_from_seed, trial_seed, HolderRow,
};
use schurlab::{
    forward_demo_perturb, forward_gap_lower_bound, gk_profile, kernel_semigap_ratio, matrix_from_json,
    measure_backward, operator_norm, schur_decompose, schur_with_first_vector, verify_schur, BackwardOptions,
    CMatrix, EigenOrder, LabError,
};

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Schur form of --input
    Schur,
    /// Gohberg-Kaashoek numbers of --input
    Gk,
    /// kernel gap and semigap between --input and --input2
    Gap,
    /// backward reconstruction under random perturbations of --input
    Backward,
    /// bridge two Jordan chains of --input (J₀) under similarity --input2 (P₀, default I)
    ForwardDemo,
    /// eigenvalue Hölder ratios along --input2 − --input, or random directions without --input2
    EigHolder,
}

impl Command {
    fn tabular(self) -> bool {
        matches!(self, Command::Backward | Command::ForwardDemo | Command::EigHolder)
    }

    fn default_decades(self) -> Vec<f64> {
        match self {
            Command::Backward => vec![1e-3, 1e-5, 1e-7, 1e-9],
            _ => vec![1e-2, 1e-4, 1e-6, 1e-8],
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Parser)]
#[command(name = "schurlab", version, about = "Perturbation experiments for Schur decompositions")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub input2: Option<PathBuf>,
    /// comma separated, strictly decreasing
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub decades: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    pub rank_tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub cluster_tol: f64,
    /// write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv for tabular commands, json otherwise
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input(String),
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Violation(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Violation(m) => write!(f, "invariant violation: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        match e {
            LabError::NumericFailure { .. } | LabError::PairingFailure { .. } => CliError::Violation(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// A finished report. `violations` counts results that broke a numeric invariant.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: String,
    pub violations: usize,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.violations > 0 {
            2
        } else {
            0
        }
    }
}

pub fn parse_matrix_file(path: &Path) -> Result<CMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    matrix_from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn matrix_id(path: &Path) -> String {
    path.file_stem().map_or_else(|| "matrix".to_string(), |s| s.to_string_lossy().into_owned())
}

fn to_json(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serialises");
    s.push('\n');
    s
}

/// Runs the experiment and writes the report to `config.out` when set.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    let format = config.format.unwrap_or(if config.command.tabular() { Format::Csv } else { Format::Json });
    if format == Format::Csv && !config.command.tabular() {
        return Err(CliError::Input(format!("{:?} has no CSV form; use --format json", config.command)));
    }
    for (name, tol) in [("--rank-tol", config.rank_tol), ("--cluster-tol", config.cluster_tol)] {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(CliError::Input(format!("{name} must be positive, got {tol}")));
        }
    }
    let decades = if config.decades.is_empty() { config.command.default_decades() } else { config.decades.clone() };
    schurlab::lab::validate_decades(&decades)?;
    let a0 = parse_matrix_file(&config.input)?;
    let id = matrix_id(&config.input);
    log::info!("{:?} on {id} ({}x{})", config.command, a0.rows(), a0.cols());

    let outcome = match config.command {
        Command::Schur => run_schur(&id, &a0)?,
        Command::Gk => run_gk(&id, &a0, config)?,
        Command::Gap => run_gap(&a0, config)?,
        Command::Backward => run_backward(&id, &a0, &decades, config, format)?,
        Command::ForwardDemo => run_forward(&id, &a0, &decades, config, format)?,
        Command::EigHolder => run_holder(&id, &a0, &decades, config, format)?,
    };
    if let Some(path) = &config.out {
        fs::write(path, &outcome.report).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(outcome)
}

fn second_input(config: &RunConfig) -> Result<CMatrix, CliError> {
    let path = config
        .input2
        .as_ref()
        .ok_or_else(|| CliError::Input(format!("{:?} needs --input2", config.command)))?;
    parse_matrix_file(path)
}

fn run_schur(id: &str, a: &CMatrix) -> Result<Outcome, CliError> {
    let s = schur_decompose(a, &EigenOrder::default())?;
    let check = verify_schur(a, &s);
    let limit = 1e-8 * operator_norm(a)?.max(1.0);
    let violations = usize::from(!(check <= limit));
    let report = json!({ "matrix_id": id, "schur": s, "check": check });
    Ok(Outcome { report: to_json(&report), violations })
}

fn run_gk(id: &str, a: &CMatrix, config: &RunConfig) -> Result<Outcome, CliError> {
    let p = gk_profile(a, config.cluster_tol, config.rank_tol)?;
    let report = json!({ "matrix_id": id, "profile": p });
    Ok(Outcome { report: to_json(&report), violations: 0 })
}

fn run_gap(a0: &CMatrix, config: &RunConfig) -> Result<Outcome, CliError> {
    let a = second_input(config)?;
    let kr = kernel_semigap_ratio(a0, &a, config.rank_tol)?;
    let (k0, amb0) = kernel(a0, config.rank_tol)?;
    let (k, amb) = kernel(&a, config.rank_tol)?;
    let report = json!({
        "kernel_dims": [k0.dim(), k.dim()],
        "gap": gap(&k0, &k)?,
        "semigap": semigap(&k, &k0)?,
        "semigap_reverse": semigap(&k0, &k)?,
        "norm_diff": kr.norm_diff,
        "ratio": kr.ratio,
        "uncertain": kr.uncertain || amb0 || amb,
    });
    Ok(Outcome { report: to_json(&report), violations: 0 })
}

fn run_backward(
    id: &str,
    a0: &CMatrix,
    decades: &[f64],
    config: &RunConfig,
    format: Format,
) -> Result<Outcome, CliError> {
    let opts = BackwardOptions { rank_tol: config.rank_tol, cluster_tol: config.cluster_tol };
    let rep = measure_backward(id, a0, decades, config.trials, config.seed, &opts)?;
    if rep.pairing_failures() > 0 {
        log::warn!("{} trials skipped after pairing failures", rep.pairing_failures());
    }
    let report = match format {
        Format::Csv => rep.to_csv(),
        Format::Json => rep.to_json() + "\n",
    };
    Ok(Outcome { report, violations: rep.invariant_violations })
}

/// First 1-based position `j` where `J₀` starts a new block of the eigenvalue at `j`.
fn bridge_position(j0: &CMatrix) -> Option<usize> {
    (1..j0.rows()).find(|&j| j0[(j - 1, j)].norm() == 0.0 && j0[(j - 1, j - 1)] == j0[(j, j)])
}

fn run_forward(
    id: &str,
    j0: &CMatrix,
    decades: &[f64],
    config: &RunConfig,
    format: Format,
) -> Result<Outcome, CliError> {
    let p0 = match &config.input2 {
        Some(path) => parse_matrix_file(path)?,
        None => CMatrix::identity(j0.rows()),
    };
    let j = bridge_position(j0)
        .ok_or_else(|| CliError::Input("J₀ has no two adjacent blocks with the same eigenvalue".into()))?;
    let mut rows = Vec::new();
    let mut violations = 0;
    for &eps in decades {
        let d = forward_demo_perturb(&p0, j0, j, eps)?;
        let nd = operator_norm(&(&d.a - &d.a0))?;
        let scale = operator_norm(&d.a0)?.max(1.0);
        if nd > eps + 1e-12 * scale {
            violations += 1;
        }
        let s0 = schur_with_first_vector(&d.a0, &d.u1, &EigenOrder::FirstDiagonal)?;
        let b = forward_gap_lower_bound(&d.a0, &s0.u, &s0.t, &d.a, 0)?;
        let g0 = gk_profile(&d.a0, config.cluster_tol, config.rank_tol)?;
        let g = gk_profile(&d.a, config.cluster_tol, config.rank_tol)?;
        rows.push(json!({
            "epsilon": eps,
            "norm_diff": nd,
            "residual": d.residual,
            "distance": b.distance,
            "bound": b.bound,
            "uncertain": b.uncertain,
            "gk_changed": !g.same_structure(&g0),
            "a": d.a,
        }));
    }
    let report = match format {
        Format::Csv => {
            let mut out = String::from("matrix_id,epsilon,norm_diff,residual,distance,bound,gk_changed\n");
            for r in &rows {
                let f = |k: &str| fmt_float(r[k].as_f64().unwrap_or(f64::NAN));
                out.push_str(&format!(
                    "{id},{},{},{},{},{},{}\n",
                    f("epsilon"),
                    f("norm_diff"),
                    f("residual"),
                    f("distance"),
                    f("bound"),
                    r["gk_changed"]
                ));
            }
            out
        }
        Format::Json => to_json(&json!({ "matrix_id": id, "bridge": j, "p0": p0, "rows": rows })),
    };
    Ok(Outcome { report, violations })
}

fn run_holder(
    id: &str,
    a0: &CMatrix,
    decades: &[f64],
    config: &RunConfig,
    format: Format,
) -> Result<Outcome, CliError> {
    let mut rows = Vec::new();
    match &config.input2 {
        Some(_) => {
            let a = second_input(config)?;
            if a.rows() != a0.rows() || a.cols() != a0.cols() {
                return Err(CliError::Input("--input and --input2 differ in shape".into()));
            }
            let dir = &a - a0;
            let nd = operator_norm(&dir)?;
            if nd == 0.0 {
                return Err(CliError::Input("--input2 equals --input; no direction to follow".into()));
            }
            for &eps in decades {
                let a_eps = a0 + &dir.scale_real(eps / nd);
                let record = holder_ratio_with(a0, &a_eps, config.cluster_tol)?;
                rows.push(HolderRow { matrix_id: id.to_string(), seed: config.seed, epsilon: eps, record });
            }
        }
        None => {
            for (d, &eps) in decades.iter().enumerate() {
                for t in 0..config.trials {
                    let seed = trial_seed(config.seed, d, t);
                    let e: CMatrix = ginibre_with_norm(a0.rows(), eps, &mut rng_from_seed(seed))?;
                    let record = holder_ratio_with(a0, &(a0 + &e), config.cluster_tol)?;
                    rows.push(HolderRow { matrix_id: id.to_string(), seed, epsilon: eps, record });
                }
            }
        }
    }
    let report = match format {
        Format::Csv => holder_csv(&rows),
        Format::Json => to_json(&json!({ "matrix_id": id, "seed": config.seed, "rows": rows })),
    };
    Ok(Outcome { report, violations: 0 })
}
