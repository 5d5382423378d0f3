//! Batch front door for the snmls library.
//!
//! Every subcommand reads one JSON problem file and writes one JSON
//! report, to stdout or to `--out`.  Exit codes: 0 feasible/pass,
//! 1 infeasible/fail, 2 input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use snmls::io::{
    to_canonical_json, vec_to_pairs, ComponentJson, FeasibilityReportJson, GraphJson, MatrixJson,
    ProblemFile, SeriesJson,
};
use snmls::linalg::{min_eig_herm, opnorm};
use snmls::pick::{commutative_pick, schur_toeplitz};
use snmls::solve::{solve_problem, verify_solution, SolveOptions};
use snmls::stein::{solve_stein, Feasibility, SteinOptions};
use snmls::{C64, CVec, Error, InterpolationData};

#[derive(Parser)]
#[command(
    name = "snmls",
    version,
    about = "Structured noncommutative multidimensional linear systems: \
             graph checks, Stein feasibility, interpolation, verification, \
             simulation"
)]
struct Cli {
    #[command(subcommand)]
    mode: Mode,
}

#[derive(Subcommand)]
enum Mode {
    /// Check a graph descriptor for admissibility and report its constants.
    CheckGraph(CommonArgs),
    /// Settle Stein-identity feasibility and emit a certificate.
    Feasibility(CommonArgs),
    /// Solve the interpolation problem and emit parametrized solutions.
    Solve(CommonArgs),
    /// Verify a candidate solution series against the data set.
    Verify(CommonArgs),
    /// Run the system recursion and report energy balances.
    Simulate(CommonArgs),
    /// Schur problem on a lower-inclusive word set, via left data.
    Nsp(CommonArgs),
    /// Commutative unit-ball Pick kernel and PSD verdict.
    Pick(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON problem file.
    file: PathBuf,
    /// Truncation order for produced series [default: 4].
    #[arg(long)]
    order: Option<usize>,
    /// Numerical tolerance [default: 1e-8].
    #[arg(long)]
    tol: Option<f64>,
    /// Random seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Iteration cap for the feasibility solver [default: 5000].
    #[arg(long)]
    max_iter: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Options resolved in order: defaults, then the problem file's
/// `options` block, then explicit command-line flags.
struct Resolved {
    order: usize,
    tol: f64,
    seed: u64,
    max_iter: usize,
    num_parameters: usize,
    samples: usize,
}

fn resolve(args: &CommonArgs, file: &ProblemFile) -> Resolved {
    let o = file.options.clone().unwrap_or_default();
    Resolved {
        order: args.order.or(o.order).unwrap_or(4),
        tol: args.tol.or(o.tol).unwrap_or(1e-8),
        seed: args.seed.or(o.seed).unwrap_or(0),
        max_iter: args.max_iter.or(o.max_iter).unwrap_or(5000),
        num_parameters: o.num_parameters.unwrap_or(3),
        samples: o.samples.unwrap_or(8),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (&CommonArgs, fn(&ProblemFile, &Resolved) -> snmls::Result<Outcome>) =
        match &cli.mode {
            Mode::CheckGraph(a) => (a, run_check_graph),
            Mode::Feasibility(a) => (a, run_feasibility),
            Mode::Solve(a) => (a, run_solve),
            Mode::Verify(a) => (a, run_verify),
            Mode::Simulate(a) => (a, run_simulate),
            Mode::Nsp(a) => (a, run_nsp),
            Mode::Pick(a) => (a, run_pick),
        };
    match execute(args, run) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

struct Outcome {
    report: String,
    pass: bool,
}

fn execute(
    args: &CommonArgs,
    run: fn(&ProblemFile, &Resolved) -> snmls::Result<Outcome>,
) -> snmls::Result<u8> {
    let text = std::fs::read_to_string(&args.file).map_err(|e| {
        Error::Input(format!("cannot read {}: {e}", args.file.display()))
    })?;
    let file = ProblemFile::parse(&text)?;
    let resolved = resolve(args, &file);
    let outcome = run(&file, &resolved)?;
    match &args.out {
        Some(path) => std::fs::write(path, &outcome.report).map_err(|e| {
            Error::Input(format!("cannot write {}: {e}", path.display()))
        })?,
        None => print!("{}", outcome.report),
    }
    Ok(if outcome.pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct GraphReport {
    admissible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    components: Option<Vec<ComponentJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    num_components: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    num_sources: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    num_ranges: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    num_edges: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_sources: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_ranges: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_left: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_right: Option<f64>,
}

fn run_check_graph(file: &ProblemFile, _r: &Resolved) -> snmls::Result<Outcome> {
    let descriptor = file
        .graph
        .as_ref()
        .ok_or_else(|| Error::Input("missing required field 'graph'".into()))?;
    match descriptor.to_graph() {
        Ok(g) => {
            let report = GraphReport {
                admissible: true,
                reason: None,
                components: match GraphJson::from_graph(&g) {
                    GraphJson::Components { components } => Some(components),
                    GraphJson::Preset(_) => None,
                },
                num_components: Some(g.num_components()),
                num_sources: Some(g.num_sources()),
                num_ranges: Some(g.num_ranges()),
                num_edges: Some(g.num_edges()),
                max_sources: Some(g.max_sources()),
                max_ranges: Some(g.max_ranges()),
                rho_left: Some(g.rho_left()),
                rho_right: Some(g.rho_right()),
            };
            Ok(Outcome {
                report: to_canonical_json(&report)?,
                pass: true,
            })
        }
        // A syntactically valid component list that violates admissibility
        // is a negative check result, not an input error.
        Err(Error::Graph(reason)) => {
            let report = GraphReport {
                admissible: false,
                reason: Some(reason),
                components: None,
                num_components: None,
                num_sources: None,
                num_ranges: None,
                num_edges: None,
                max_sources: None,
                max_ranges: None,
                rho_left: None,
                rho_right: None,
            };
            Ok(Outcome {
                report: to_canonical_json(&report)?,
                pass: false,
            })
        }
        Err(e) => Err(e),
    }
}

fn stein_options(r: &Resolved) -> SteinOptions {
    SteinOptions {
        max_iter: r.max_iter,
        tol: r.tol,
        seed: r.seed,
        restarts: 3,
    }
}

fn feasibility_outcome(
    data: &InterpolationData,
    r: &Resolved,
) -> snmls::Result<(FeasibilityReportJson, bool)> {
    let ops = data.stein_operators()?;
    let sol = solve_stein(&ops, &stein_options(r))?;
    let pass = sol.verdict == Feasibility::Feasible;
    Ok((FeasibilityReportJson::from_solution(&sol), pass))
}

fn run_feasibility(file: &ProblemFile, r: &Resolved) -> snmls::Result<Outcome> {
    let data = file.interpolation_data()?;
    let (report, pass) = feasibility_outcome(&data, r)?;
    Ok(Outcome {
        report: to_canonical_json(&report)?,
        pass,
    })
}

#[derive(Serialize)]
struct SolutionJson {
    label: String,
    interpolation_residual: f64,
    interpolation_exact: bool,
    schur_max_norm: f64,
    schur_all_exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    coupled_gap: Option<f64>,
    series: SeriesJson,
}

#[derive(Serialize)]
struct SolveReportJson {
    feasibility: FeasibilityReportJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta_star: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unitarity_defect: Option<f64>,
    solutions: Vec<SolutionJson>,
}

fn run_solve(file: &ProblemFile, r: &Resolved) -> snmls::Result<Outcome> {
    let data = file.interpolation_data()?;
    let opts = SolveOptions {
        order: r.order,
        tol: r.tol,
        seed: r.seed,
        max_iter: r.max_iter,
        num_parameters: r.num_parameters,
        rank_tol: 1e-10,
        schur_samples: r.samples,
    };
    let rep = solve_problem(&data, &opts)?;
    let pass = rep.stein.verdict == Feasibility::Feasible;
    let report = SolveReportJson {
        feasibility: FeasibilityReportJson::from_solution(&rep.stein),
        delta: rep.parametrization.as_ref().map(|p| p.universal.delta()),
        delta_star: rep
            .parametrization
            .as_ref()
            .map(|p| p.universal.delta_star()),
        unitarity_defect: rep
            .parametrization
            .as_ref()
            .map(|p| p.universal.unitarity_defect()),
        solutions: rep
            .solutions
            .iter()
            .map(|s| SolutionJson {
                label: s.label.clone(),
                interpolation_residual: s.interpolation_residual,
                interpolation_exact: s.interpolation_exact,
                schur_max_norm: s.schur.max_norm,
                schur_all_exact: s.schur.all_exact,
                coupled_gap: s.coupled_gap,
                series: SeriesJson::from_series(&s.series),
            })
            .collect(),
    };
    Ok(Outcome {
        report: to_canonical_json(&report)?,
        pass,
    })
}

#[derive(Serialize)]
struct VerifyReportJson {
    interpolation_residual: f64,
    interpolation_exact: bool,
    schur_max_norm: f64,
    schur_all_exact: bool,
    schur_samples: usize,
    interpolation_pass: bool,
    schur_pass: bool,
    pass: bool,
}

fn run_verify(file: &ProblemFile, r: &Resolved) -> snmls::Result<Outcome> {
    let data = file.interpolation_data()?;
    let f = file
        .solution
        .as_ref()
        .ok_or_else(|| Error::Input("missing required field 'solution'".into()))?
        .to_series()?;
    let rep = verify_solution(&data, &f, r.samples, r.seed, r.tol)?;
    let report = VerifyReportJson {
        interpolation_residual: rep.interpolation_residual,
        interpolation_exact: rep.interpolation_exact,
        schur_max_norm: rep.schur.max_norm,
        schur_all_exact: rep.schur.all_exact,
        schur_samples: rep.schur.samples,
        interpolation_pass: rep.interpolation_pass,
        schur_pass: rep.schur_pass,
        pass: rep.pass(),
    };
    Ok(Outcome {
        report: to_canonical_json(&report)?,
        pass: rep.pass(),
    })
}

#[derive(Serialize)]
struct TrajectoryRecordJson {
    word: Vec<usize>,
    state: Vec<[f64; 2]>,
    output: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct LevelBalanceJson {
    level: usize,
    lhs: f64,
    rhs: f64,
    slack: f64,
}

#[derive(Serialize)]
struct SimulateReportJson {
    horizon: usize,
    conservativity_defect: f64,
    records: Vec<TrajectoryRecordJson>,
    stepwise: Vec<LevelBalanceJson>,
    telescoped: Vec<LevelBalanceJson>,
    final_slack: f64,
    worst_slack: f64,
    pass: bool,
}

fn run_simulate(file: &ProblemFile, r: &Resolved) -> snmls::Result<Outcome> {
    let col = file
        .colligation
        .as_ref()
        .ok_or_else(|| Error::Input("missing required field 'colligation'".into()))?
        .to_colligation()?;
    let horizon = file.horizon.unwrap_or(r.order);
    let initial = match &file.initial {
        Some(pairs) => snmls::io::pairs_to_vec(pairs),
        None => CVec::zeros(col.source_state_dim()),
    };
    let inputs = file.simulation_inputs(col.dim_in())?;
    let traj = col.simulate(&initial, &inputs, horizon)?;
    let energy = col.energy_balance(&traj, &inputs, horizon);
    let records = traj
        .outputs
        .iter()
        .map(|(w, y)| TrajectoryRecordJson {
            word: w.letters().collect(),
            state: vec_to_pairs(traj.states.get(w).expect("state for every output word")),
            output: vec_to_pairs(y),
        })
        .collect();
    let level = |lb: &snmls::colligation::LevelBalance| LevelBalanceJson {
        level: lb.level,
        lhs: lb.lhs,
        rhs: lb.rhs,
        slack: lb.slack,
    };
    let worst = energy.worst_slack();
    let pass = worst >= -r.tol;
    let report = SimulateReportJson {
        horizon,
        conservativity_defect: col.conservativity_defect(),
        records,
        stepwise: energy.stepwise.iter().map(level).collect(),
        telescoped: energy.telescoped.iter().map(level).collect(),
        final_slack: energy.final_slack,
        worst_slack: worst,
        pass,
    };
    Ok(Outcome {
        report: to_canonical_json(&report)?,
        pass,
    })
}

#[derive(Serialize)]
struct NspReportJson {
    feasibility: FeasibilityReportJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    toeplitz_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    toeplitz_feasible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdicts_agree: Option<bool>,
}

fn run_nsp(file: &ProblemFile, r: &Resolved) -> snmls::Result<Outcome> {
    let g = file.require_graph()?;
    let dim_in = file
        .dim_in
        .ok_or_else(|| Error::Input("missing required field 'dim_in'".into()))?;
    let dim_out = file
        .dim_out
        .ok_or_else(|| Error::Input("missing required field 'dim_out'".into()))?;
    let targets = file.nsp_targets(dim_out, dim_in)?;
    let side = snmls::data::nsp_to_left_data(&g, &targets, dim_in, dim_out)?;
    let data = InterpolationData::left_only(g.clone(), dim_in, dim_out, side)?;
    let (feasibility, pass) = feasibility_outcome(&data, r)?;

    // One-variable cross-check: a lower-inclusive set in a single letter
    // is a run of powers, so the data is a Schur coefficient problem and
    // the block Toeplitz criterion must agree.
    let mut toeplitz_norm = None;
    let mut toeplitz_feasible = None;
    let mut verdicts_agree = None;
    if g.components() == [(1, 1)] {
        let mut coeffs = targets.clone();
        coeffs.sort_by_key(|(w, _)| w.len());
        let coeffs: Vec<_> = coeffs.into_iter().map(|(_, m)| m).collect();
        let rep = schur_toeplitz(&coeffs)?;
        toeplitz_norm = Some(rep.norm);
        toeplitz_feasible = Some(rep.feasible);
        verdicts_agree = Some(rep.feasible == pass);
    }
    let report = NspReportJson {
        feasibility,
        toeplitz_norm,
        toeplitz_feasible,
        verdicts_agree,
    };
    Ok(Outcome {
        report: to_canonical_json(&report)?,
        pass,
    })
}

#[derive(Serialize)]
struct PickReportJson {
    kernel: MatrixJson,
    min_eig: f64,
    feasible: bool,
}

fn run_pick(file: &ProblemFile, _r: &Resolved) -> snmls::Result<Outcome> {
    let points = file
        .points
        .as_ref()
        .ok_or_else(|| Error::Input("missing required field 'points'".into()))?;
    if points.is_empty() {
        return Err(Error::Input("'points' must be nonempty".into()));
    }
    let lambdas: Vec<Vec<C64>> = points
        .iter()
        .map(|p| p.lambda.iter().map(|z| C64::new(z[0], z[1])).collect())
        .collect();
    let row = |pairs: &[[f64; 2]]| {
        nalgebra::DMatrix::from_iterator(1, pairs.len(), pairs.iter().map(|z| C64::new(z[0], z[1])))
    };
    let b: Vec<_> = points.iter().map(|p| row(&p.b)).collect();
    let c: Vec<_> = points.iter().map(|p| row(&p.c)).collect();
    let k = commutative_pick(&lambdas, &b, &c)?;
    let min_eig = min_eig_herm(&k);
    let feasible = min_eig >= -1e-9 * (1.0 + opnorm(&k));
    let report = PickReportJson {
        kernel: MatrixJson::from_mat(&k),
        min_eig,
        feasible,
    };
    Ok(Outcome {
        report: to_canonical_json(&report)?,
        pass: feasible,
    })
}
