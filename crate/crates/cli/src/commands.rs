use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use rotafactor_core::example::{table1_loadings, table1_target};
use rotafactor_core::report::{results_csv, summary_markdown, two_decimals};
use rotafactor_core::simulation::parse_conditions_csv;
use rotafactor_core::{
    build_icm_target, omt_rotate, ot_rotate, run_study, ConditionResult, Matrix, Method, Preset,
    RotationError, RotationOptions, RotationSolution, SimulationError, Summary, TargetSpec,
};

use crate::matrix_io::{matrix_csv_full, matrix_csv_rounded, read_matrix};
use crate::{CliError, MethodChoice, OutputFormat, RotateArgs, SimulateArgs, DEFAULT_SEED};

fn rotation_error(e: RotationError) -> CliError {
    match e {
        RotationError::InvalidTarget(_)
        | RotationError::ShapeMismatch { .. }
        | RotationError::InvalidOptions(_) => CliError::Input(e.to_string()),
        _ => CliError::Numerical(e.to_string()),
    }
}

fn simulation_error(e: SimulationError) -> CliError {
    match e {
        SimulationError::Model(_) | SimulationError::Linalg(_) => CliError::Numerical(e.to_string()),
        _ => CliError::Input(e.to_string()),
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Input(format!("writing output: {e}")))
}

#[derive(Serialize)]
struct RotationJson<'a> {
    method: &'a str,
    pattern: Vec<Vec<f64>>,
    phi: Vec<Vec<f64>>,
    congruence: f64,
    per_factor_congruence: &'a [f64],
    kappa: f64,
    ridge_applied: f64,
}

fn load_target(args: &RotateArgs, loadings: &Matrix) -> Result<TargetSpec, CliError> {
    if args.icm {
        let q = args.q.unwrap_or(0);
        let p = loadings.rows();
        if q == 0 || !p.is_multiple_of(q) {
            return Err(CliError::Input(format!(
                "--icm needs --q to divide the {p} variables, got q = {q}"
            )));
        }
        return build_icm_target(p, q).map_err(rotation_error);
    }
    let path = args.target.as_deref().ok_or_else(|| {
        CliError::Input("either --target or --icm is required".into())
    })?;
    let m = read_matrix(path)?;
    TargetSpec::new(m).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn run_rotate(args: &RotateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let loadings = read_matrix(&args.loadings)?;
    let target = load_target(args, &loadings)?;
    let options = RotationOptions {
        kappa_max: args.kappa_max,
        ridge_step: args.ridge_step,
        max_ridge_iters: args.max_ridge_iters,
    };
    options.validate().map_err(rotation_error)?;

    let methods: &[Method] = match args.method {
        MethodChoice::Omt => &[Method::MeanTarget],
        MethodChoice::Ot => &[Method::Target],
        MethodChoice::Both => &[Method::Target, Method::MeanTarget],
    };
    let mut solutions = Vec::new();
    for &m in methods {
        let sol = match m {
            Method::Target => ot_rotate(&loadings, &target),
            Method::MeanTarget => omt_rotate(&loadings, &target, &options),
        };
        solutions.push(sol.map_err(rotation_error)?);
    }

    if let Some(dir) = &args.write_pattern {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        for sol in &solutions {
            let path = dir.join(format!("pattern_{}.csv", sol.method.short_name()));
            let header = format!("{} pattern", sol.method.short_name());
            std::fs::write(&path, matrix_csv_full(&sol.pattern, Some(&header)))
                .map_err(|e| io_error(&path, e))?;
        }
    }

    let mut text = String::new();
    for sol in &solutions {
        match args.format {
            OutputFormat::Csv => text.push_str(&solution_csv(sol)),
            OutputFormat::Markdown => text.push_str(&solution_markdown(sol)),
            OutputFormat::Json => {
                let json = RotationJson {
                    method: sol.method.short_name(),
                    pattern: sol.pattern.to_rows(),
                    phi: sol.phi.to_rows(),
                    congruence: sol.congruence,
                    per_factor_congruence: &sol.per_factor_congruence,
                    kappa: sol.kappa,
                    ridge_applied: sol.ridge_applied,
                };
                let line = serde_json::to_string(&json)
                    .map_err(|e| CliError::Numerical(format!("serialising result: {e}")))?;
                text.push_str(&line);
                text.push('\n');
            }
        }
    }
    emit(out, &text)
}

fn joined(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn solution_csv(sol: &RotationSolution) -> String {
    let name = sol.method.short_name();
    let mut s = String::new();
    let _ = writeln!(s, "# method,{name}");
    s.push_str(&matrix_csv_rounded(&sol.pattern, Some("pattern")));
    s.push_str(&matrix_csv_full(&sol.pattern, Some("pattern full precision")));
    s.push_str(&matrix_csv_rounded(&sol.phi, Some("phi")));
    s.push_str(&matrix_csv_full(&sol.phi, Some("phi full precision")));
    let _ = writeln!(s, "# congruence\n{}", sol.congruence);
    let _ = writeln!(s, "# per_factor_congruence\n{}", joined(&sol.per_factor_congruence));
    let _ = writeln!(s, "# kappa\n{}", sol.kappa);
    let _ = writeln!(s, "# ridge_applied\n{}", sol.ridge_applied);
    s
}

fn markdown_matrix(m: &Matrix, row_label: &str) -> String {
    let mut s = String::new();
    let heads: Vec<String> = (1..=m.cols()).map(|j| format!("F{j}")).collect();
    let _ = writeln!(s, "| {row_label} | {} |", heads.join(" | "));
    let _ = writeln!(s, "|---|{}", "---|".repeat(m.cols()));
    for i in 0..m.rows() {
        let cells: Vec<String> = m.row(i).iter().map(|&v| two_decimals(v)).collect();
        let _ = writeln!(s, "| {} | {} |", i + 1, cells.join(" | "));
    }
    s
}

fn solution_markdown(sol: &RotationSolution) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "## {}\n", sol.method.short_name().to_uppercase());
    s.push_str(&markdown_matrix(&sol.pattern, "variable"));
    s.push('\n');
    s.push_str(&markdown_matrix(&sol.phi, "factor"));
    let _ = writeln!(s, "\n- congruence: {}", sol.congruence);
    let _ = writeln!(s, "- per-factor congruence: {}", joined(&sol.per_factor_congruence));
    let _ = writeln!(s, "- kappa: {}", sol.kappa);
    let _ = writeln!(s, "- ridge applied: {}\n", sol.ridge_applied);
    let _ = writeln!(s, "Pattern, full precision:\n\n```csv");
    s.push_str(&matrix_csv_full(&sol.pattern, None));
    s.push_str("```\n\n");
    s
}

#[derive(Serialize)]
struct SummaryJson {
    mean: f64,
    sd: f64,
}

impl From<Summary> for SummaryJson {
    fn from(s: Summary) -> Self {
        Self { mean: s.mean, sd: s.sd }
    }
}

#[derive(Serialize)]
struct ConditionJson {
    n: usize,
    p: usize,
    q: usize,
    per_factor: usize,
    level: String,
    rho: f64,
    reps_requested: usize,
    reps_valid: usize,
    extraction_failures: usize,
    rotation_failures: usize,
    ot_congruence: SummaryJson,
    omt_congruence: SummaryJson,
    ot_mean_phi: SummaryJson,
    omt_mean_phi: SummaryJson,
    ot_bias: f64,
    omt_bias: f64,
}

impl From<&ConditionResult> for ConditionJson {
    fn from(r: &ConditionResult) -> Self {
        let c = &r.condition;
        Self {
            n: c.n,
            p: c.p(),
            q: c.q,
            per_factor: c.per_factor,
            level: c.level.to_string(),
            rho: c.rho,
            reps_requested: r.replications_requested,
            reps_valid: r.replications_valid,
            extraction_failures: r.extraction_failures,
            rotation_failures: r.rotation_failures,
            ot_congruence: r.ot_congruence.into(),
            omt_congruence: r.omt_congruence.into(),
            ot_mean_phi: r.ot_mean_phi.into(),
            omt_mean_phi: r.omt_mean_phi.into(),
            ot_bias: r.bias_ot,
            omt_bias: r.bias_omt,
        }
    }
}

pub fn run_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let conditions = match (&args.preset, &args.conditions) {
        (Some(name), _) => name.parse::<Preset>().map_err(simulation_error)?.conditions(),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            parse_conditions_csv(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        }
        (None, None) => {
            return Err(CliError::Input("either --preset or --conditions is required".into()))
        }
    };
    if args.reps == 0 {
        return Err(CliError::Input("--reps must be at least 1".into()));
    }
    if args.parallelism == 0 {
        return Err(CliError::Input("--parallelism must be at least 1".into()));
    }
    let seed = args.seed.unwrap_or(DEFAULT_SEED);
    let results = run_study(&conditions, args.reps, seed, args.parallelism).map_err(simulation_error)?;

    let dir = &args.out;
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let csv_path = dir.join("results.csv");
    std::fs::write(&csv_path, results_csv(&results)).map_err(|e| io_error(&csv_path, e))?;
    if args.format == OutputFormat::Json {
        let rows: Vec<ConditionJson> = results.iter().map(ConditionJson::from).collect();
        let json = serde_json::to_string_pretty(&rows)
            .map_err(|e| CliError::Numerical(format!("serialising results: {e}")))?;
        let json_path = dir.join("results.json");
        std::fs::write(&json_path, json + "\n").map_err(|e| io_error(&json_path, e))?;
    }
    let summary_path = dir.join("summary.md");
    std::fs::write(&summary_path, summary_markdown(&results, args.reps, seed))
        .map_err(|e| io_error(&summary_path, e))?;
    emit(out, &format!("{}\n", summary_path.display()))
}

fn panel_row(m: &Matrix, i: usize) -> String {
    m.row(i).iter().map(|&v| format!("{:>6}", two_decimals(v))).collect()
}

pub fn run_example(out: &mut dyn Write) -> Result<(), CliError> {
    let l_u = table1_loadings();
    let target = table1_target();
    let ot = ot_rotate(&l_u, &target).map_err(rotation_error)?;
    let omt = omt_rotate(&l_u, &target, &RotationOptions::default()).map_err(rotation_error)?;

    let q = l_u.cols();
    let heads: String = (1..=q).map(|j| format!("{:>6}", format!("F{j}"))).collect();
    let width = heads.len();
    let mut s = String::new();
    let _ = writeln!(s, "Population example: {} variables, {q} factors\n", l_u.rows());
    let title = format!("{:>4}  {:<width$}  {:<width$}  {:<width$}", "", "Initial", "OT", "OMT");
    let _ = writeln!(s, "{}", title.trim_end());
    let _ = writeln!(s, "{:>4}  {heads}  {heads}  {heads}", "var");
    for i in 0..l_u.rows() {
        let _ = writeln!(
            s,
            "{:>4}  {}  {}  {}",
            i + 1,
            panel_row(&l_u, i),
            panel_row(&ot.pattern, i),
            panel_row(&omt.pattern, i)
        );
    }
    for (name, sol) in [("OT", &ot), ("OMT", &omt)] {
        let _ = writeln!(s, "\nFactor inter-correlations ({name})");
        let _ = writeln!(s, "{:>4}  {heads}", "");
        for i in 0..q {
            let _ = writeln!(s, "{:>4}  {}", format!("F{}", i + 1), panel_row(&sol.phi, i));
        }
        let _ = writeln!(s, "congruence {}", two_decimals(sol.congruence));
    }
    emit(out, &s)
}
