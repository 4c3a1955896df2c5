//! Command-line front end: argument parsing, the verification suites and
//! report output. The `nogo` binary is a thin wrapper around [`run`].

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::contrast::{
    bloch_sphere_check, inconsistency_report, quantum_contrast, quantum_contrast_closed_form,
    ContrastReport, QUADRATURE_TOL,
};
use crate::error::Error;
use crate::hv::{
    check_expectation_lemma, custom_model, deterministic_model, hemisphere_assignment, ks_model,
    Budget, CheckReport, CustomModelFile, FiniteProbabilitySpace, HVModel, ModelKind, SIGMA_BAND,
};
use crate::qm::{
    born_probability, direction_operator, expectation, pauli, DensityOperator, OutcomeSet,
};
use crate::report::{
    emit_report, Bounds, ConfigEcho, ErrorBands, Format, Metadata, Report, Results,
};
use crate::sphere::{orthogonality_table, product_gauss_grid, SphericalGrid, RNG_NAME};
use crate::{HV_BOUND, QUANTUM_BOUND};

/// Random finite spaces drawn by `lemma-check`.
const LEMMA_SPACES: usize = 100;
const LEMMA_MAX_POINTS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Bloch-ball bound, closed form, orthogonality and Born-rule checks.
    VerifyQuantum,
    /// Hidden-variable contrast, spectrum support and distribution rule.
    VerifyHv,
    /// Quantum versus hidden-variable contrast and the combined verdict.
    Contrast,
    /// Rearrangement identity behind `Tr[ψA] = E_ψ(A)` on finite spaces.
    LemmaCheck,
    /// Every suite above.
    All,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyQuantum => "verify-quantum",
            Command::VerifyHv => "verify-hv",
            Command::Contrast => "contrast",
            Command::LemmaCheck => "lemma-check",
            Command::All => "all",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelChoice {
    Ks,
    Deterministic,
    CustomFile(PathBuf),
}

impl ModelChoice {
    fn name(&self) -> String {
        match self {
            ModelChoice::Ks => "ks".into(),
            ModelChoice::Deterministic => "deterministic".into(),
            ModelChoice::CustomFile(p) => format!("custom-file:{}", p.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub state: [f64; 3],
    pub model: ModelChoice,
    pub grid: (usize, usize),
    pub samples: u64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            state: [0.0, 0.0, 1.0],
            model: ModelChoice::Ks,
            grid: (8, 16),
            samples: 1_000_000,
            seed: 42,
            output: None,
            format: Format::Text,
        }
    }

    /// Parses command-line arguments (including the program name).
    pub fn from_args<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        Cli::try_parse_from(args)?.into_config()
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "nogo",
    version,
    about = "Spin-1/2 Bloch-sphere versus hidden-variable contrast laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Bloch vector of the state.
    #[arg(long, global = true, default_value = "0,0,1", value_parser = parse_triple, allow_hyphen_values = true)]
    state: [f64; 3],

    /// `ks`, `deterministic`, or `custom-file <PATH>`.
    #[arg(long, global = true, num_args = 1..=2, value_names = ["KIND", "PATH"], default_value = "ks")]
    model: Vec<String>,

    /// Polar and azimuthal node counts.
    #[arg(long, global = true, default_value = "8,16", value_parser = parse_grid)]
    grid: (usize, usize),

    /// Monte-Carlo samples per direction for sampled models.
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,

    /// Root seed for every random stream.
    #[arg(long, global = true, env = "NOGO_SEED", default_value_t = 42)]
    seed: u64,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
}

impl Cli {
    fn into_config(self) -> Result<RunConfig, clap::Error> {
        let model = match self.model.as_slice() {
            [kind] if kind == "ks" => ModelChoice::Ks,
            [kind] if kind == "deterministic" => ModelChoice::Deterministic,
            [kind, path] if kind == "custom-file" => ModelChoice::CustomFile(path.into()),
            other => {
                let msg = format!(
                    "unknown model {other:?}; expected ks, deterministic or custom-file <PATH>\n"
                );
                return Err(clap::Error::raw(clap::error::ErrorKind::InvalidValue, msg));
            }
        };
        Ok(RunConfig {
            command: self.command,
            state: self.state,
            model,
            grid: self.grid,
            samples: self.samples,
            seed: self.seed,
            output: self.output,
            format: self.format,
        })
    }
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [x, y, z] if parts.iter().all(|v| v.is_finite()) => Ok([*x, *y, *z]),
        _ => Err(format!("expected three finite numbers x,y,z, got {s:?}")),
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [np, na] => Ok((*np, *na)),
        _ => Err(format!("expected NP,NA, got {s:?}")),
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(#[from] Error),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl RunError {
    /// 2 for usage problems (bad flags, states outside the Bloch ball,
    /// malformed model files), 3 for I/O and numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => 2,
            RunError::Numeric(Error::InvalidArgument(_) | Error::BlochViolation { .. }) => 2,
            RunError::Numeric(_) | RunError::Io { .. } => 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    /// 0 when every check passes (and always for `contrast`), 1 otherwise.
    pub exit_code: i32,
    pub report: Report,
    pub bytes: Vec<u8>,
}

/// Runs the selected suite, serializes the report and writes it to
/// `config.output` when one is given.
pub fn run(config: &RunConfig) -> Result<RunOutcome, RunError> {
    let psi = DensityOperator::from_bloch(config.state)?;
    let grid = product_gauss_grid(config.grid.0, config.grid.1)?;
    let budget = Budget::Samples(config.samples);

    let (results, exit_code) = match config.command {
        Command::VerifyQuantum => {
            let r = verify_quantum(&psi, &grid)?;
            let code = exit_for(&r);
            (r, code)
        }
        Command::VerifyHv => {
            let model = build_model(config)?;
            let r = verify_hv(&psi, &model, &grid, budget)?;
            let code = exit_for(&r);
            (r, code)
        }
        Command::Contrast => {
            let model = build_model(config)?;
            (contrast(&psi, &model, &grid, budget)?, 0)
        }
        Command::LemmaCheck => {
            let r = lemma_check(&psi, config.seed)?;
            let code = exit_for(&r);
            (r, code)
        }
        Command::All => {
            let model = build_model(config)?;
            let quantum = verify_quantum(&psi, &grid)?;
            let hv = verify_hv(&psi, &model, &grid, budget)?;
            let lemma = lemma_check(&psi, config.seed)?;
            let mut merged = contrast(&psi, &model, &grid, budget)?;
            let passed = [&quantum, &hv, &lemma]
                .iter()
                .all(|r| r.passed == Some(true));
            merged.checks = [quantum.checks, hv.checks, lemma.checks].concat();
            merged.passed = Some(passed);
            (merged, if passed { 0 } else { 1 })
        }
    };

    let report = Report {
        command: config.command.name().to_string(),
        config: ConfigEcho {
            state: config.state,
            model: config.model.name(),
            grid: [config.grid.0, config.grid.1],
            samples: config.samples,
            seed: config.seed,
            format: config.format.name().to_string(),
        },
        results,
        metadata: Metadata {
            seed: config.seed,
            rng_name: RNG_NAME.to_string(),
            grid: [config.grid.0, config.grid.1],
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
    };
    let bytes = emit_report(&report, config.format);
    if let Some(path) = &config.output {
        fs::write(path, &bytes).map_err(|source| RunError::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(RunOutcome {
        exit_code,
        report,
        bytes,
    })
}

fn exit_for(results: &Results) -> i32 {
    if results.passed == Some(true) {
        0
    } else {
        1
    }
}

fn build_model(config: &RunConfig) -> Result<HVModel, RunError> {
    match &config.model {
        ModelChoice::Ks => {
            let norm = config.state.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(RunError::Usage(
                    "the ks model needs a pure state (unit Bloch vector)".into(),
                ));
            }
            Ok(ks_model(config.state, config.seed)?)
        }
        ModelChoice::Deterministic => Ok(deterministic_model(hemisphere_assignment)),
        ModelChoice::CustomFile(path) => {
            let text = fs::read_to_string(path).map_err(|source| RunError::Io {
                path: path.clone(),
                source,
            })?;
            let file: CustomModelFile = serde_json::from_str(&text)
                .map_err(|e| RunError::Usage(format!("{}: {e}", path.display())))?;
            Ok(custom_model(&file)?)
        }
    }
}

fn all_passed(checks: &[CheckReport]) -> bool {
    checks.iter().all(|c| c.passed)
}

fn verify_quantum(psi: &DensityOperator, grid: &SphericalGrid) -> Result<Results, Error> {
    let quantum = quantum_contrast(psi, grid)?;
    let bloch = bloch_sphere_check(psi);
    let closed = quantum_contrast_closed_form(psi);

    let table = orthogonality_table(grid)?;
    let mut worst_orth: f64 = 0.0;
    for (a, row) in table.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            let want = if a == b { QUANTUM_BOUND } else { 0.0 };
            worst_orth = worst_orth.max((v - want).abs());
        }
    }

    let plus = OutcomeSet::point(1.0);
    let minus = OutcomeSet::point(-1.0);
    let mut worst_norm: f64 = 0.0;
    let mut worst_consistency: f64 = 0.0;
    for node in grid.nodes() {
        let op = direction_operator(&node.direction);
        let p = born_probability(psi, &op, &plus);
        let q = born_probability(psi, &op, &minus);
        worst_norm = worst_norm.max((p + q - 1.0).abs());
        worst_consistency =
            worst_consistency.max((expectation(psi, &node.direction) - (p - q)).abs());
    }

    let mut quantum_bound = CheckReport::compare("quantum_bound", quantum, QUANTUM_BOUND, 0.0);
    quantum_bound.passed = quantum <= QUANTUM_BOUND + QUADRATURE_TOL;
    quantum_bound.deviation = (quantum - QUANTUM_BOUND).max(0.0);
    quantum_bound.tolerance = QUADRATURE_TOL;
    let checks = vec![
        bloch.to_check_report(),
        quantum_bound,
        CheckReport::compare("closed_form", quantum, closed, 1e-10),
        CheckReport::compare("orthogonality", worst_orth, 0.0, 1e-12),
        CheckReport::compare("born_normalization", worst_norm, 0.0, 1e-12),
        CheckReport::compare("expectation_consistency", worst_consistency, 0.0, 1e-12),
    ];
    Ok(Results {
        quantum_value: Some(quantum),
        bounds: Some(Bounds {
            quantum: QUANTUM_BOUND,
            hv: HV_BOUND,
        }),
        bloch_norm_sq: Some(bloch.norm_sq),
        passed: Some(all_passed(&checks)),
        checks,
        ..Results::default()
    })
}

fn verify_hv(
    psi: &DensityOperator,
    model: &HVModel,
    grid: &SphericalGrid,
    budget: Budget,
) -> Result<Results, Error> {
    let report = inconsistency_report(psi, model, grid, budget)?;
    let mut checks: Vec<CheckReport> = report
        .checks
        .iter()
        .filter(|c| {
            matches!(
                c.check.as_str(),
                "spectrum_support" | "distribution_rule" | "hv_bound"
            )
        })
        .cloned()
        .collect();
    let band = SIGMA_BAND * report.hv_std_error + QUADRATURE_TOL;
    match model.kind() {
        ModelKind::KochenSpecker { bloch } => {
            let norm_sq: f64 = bloch.iter().map(|x| x * x).sum();
            checks.push(CheckReport::compare(
                "sign_model_oracle",
                report.hv_value,
                QUANTUM_BOUND * norm_sq,
                band,
            ));
        }
        ModelKind::Deterministic => {
            checks.push(CheckReport::compare(
                "dispersion_free_saturation",
                report.hv_value,
                HV_BOUND,
                band,
            ));
        }
        ModelKind::Custom => {}
    }
    Ok(Results {
        model: Some(report.model.clone()),
        model_state_dependence: Some(report.model_state_dependence.clone()),
        hv_value: Some(report.hv_value),
        bounds: Some(Bounds {
            quantum: QUANTUM_BOUND,
            hv: HV_BOUND,
        }),
        errors_sigma: Some(ErrorBands::new(report.hv_std_error)),
        proposition_flags: Some(report.proposition_flags.clone()),
        passed: Some(all_passed(&checks)),
        checks,
        nodes: report.nodes,
        ..Results::default()
    })
}

fn contrast(
    psi: &DensityOperator,
    model: &HVModel,
    grid: &SphericalGrid,
    budget: Budget,
) -> Result<Results, Error> {
    let report: ContrastReport = inconsistency_report(psi, model, grid, budget)?;
    Ok(Results {
        model: Some(report.model),
        model_state_dependence: Some(report.model_state_dependence),
        quantum_value: Some(report.quantum_value),
        hv_value: Some(report.hv_value),
        bounds: Some(Bounds {
            quantum: report.quantum_bound,
            hv: report.hv_bound,
        }),
        bloch_norm_sq: Some(report.bloch_norm_sq),
        proposition_flags: Some(report.proposition_flags),
        errors_sigma: Some(ErrorBands::new(report.hv_std_error)),
        gap_ratio: report.gap_ratio,
        contradiction: Some(report.contradiction),
        verdict: Some(report.verdict),
        warnings: report.warnings,
        checks: report.checks,
        nodes: report.nodes,
        ..Results::default()
    })
}

fn lemma_check(psi: &DensityOperator, seed: u64) -> Result<Results, Error> {
    let mut checks = Vec::new();
    // Two-point spaces carrying the Born distribution of each Pauli axis.
    for axis in 1..=3 {
        let a = pauli(axis)?;
        let p = born_probability(psi, &a, &OutcomeSet::point(1.0));
        let space = FiniteProbabilitySpace::new(vec![p, 1.0 - p])?;
        let lemma = check_expectation_lemma(&space, &[1.0, -1.0], psi, &a)?;
        let mut report = lemma.to_check_report();
        report.check = format!("expectation_lemma_axis_{axis}");
        checks.push(report);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sz = pauli(3)?;
    let mut failures = 0u64;
    let mut worst: f64 = 0.0;
    for _ in 0..LEMMA_SPACES {
        let points = rng.random_range(1..=LEMMA_MAX_POINTS);
        let raw: Vec<f64> = (0..points).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let drift = 1.0 - weights.iter().sum::<f64>();
        weights[0] += drift;
        let f: Vec<f64> = (0..points)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let space = FiniteProbabilitySpace::new(weights)?;
        let lemma = check_expectation_lemma(&space, &f, psi, &sz)?;
        worst = worst.max(lemma.rearrangement_deviation);
        if !lemma.passed {
            failures += 1;
        }
    }
    let mut random = CheckReport::compare("rearrangement_random_spaces", worst, 0.0, 1e-12);
    random.passed = failures == 0;
    random.violations = Some(failures);
    random.evaluations = Some(LEMMA_SPACES as u64);
    checks.push(random);

    Ok(Results {
        passed: Some(all_passed(&checks)),
        checks,
        ..Results::default()
    })
}
