//! End-to-end driver: data set in, certified verdict and parametrized
//! solution family out.

use crate::data::{schur_sample, InterpolationData, SchurSample};
use crate::quotient::build_isometry;
use crate::series::NcSeries;
use crate::stein::{solve_stein, Feasibility, SteinOptions, SteinSolution};
use crate::universal::{couple, generate_parameters, SigmaParts, UniversalColligation};
use crate::Result;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Truncation order of the produced solution series.
    pub order: usize,
    pub tol: f64,
    pub seed: u64,
    pub max_iter: usize,
    /// How many parameters to push through the parametrization.
    pub num_parameters: usize,
    pub rank_tol: f64,
    /// Nilpotent sample count for the Schur check of each solution.
    pub schur_samples: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            order: 4,
            tol: 1e-8,
            seed: 0,
            max_iter: 5000,
            num_parameters: 3,
            rank_tol: 1e-10,
            schur_samples: 8,
        }
    }
}

/// One produced solution and its certificates.
#[derive(Debug, Clone)]
pub struct SolutionReport {
    pub label: String,
    pub series: NcSeries,
    pub interpolation_residual: f64,
    pub interpolation_exact: bool,
    pub schur: SchurSample,
    /// Transfer gap between the coupled colligation and the feedback
    /// formula, when the parameter carried a realization.
    pub coupled_gap: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub stein: SteinSolution,
    pub parametrization: Option<Parametrization>,
    pub solutions: Vec<SolutionReport>,
}

#[derive(Debug, Clone)]
pub struct Parametrization {
    pub universal: UniversalColligation,
    pub sigma: SigmaParts,
}

/// Solve the interpolation problem: settle Stein feasibility, build the
/// universal colligation from the kernels, and produce one solution per
/// generated parameter.
pub fn solve_problem(data: &InterpolationData, opts: &SolveOptions) -> Result<SolveReport> {
    let ops = data.stein_operators()?;
    let stein = solve_stein(
        &ops,
        &SteinOptions {
            max_iter: opts.max_iter,
            tol: opts.tol,
            seed: opts.seed,
            restarts: 3,
        },
    )?;
    if stein.verdict != Feasibility::Feasible {
        return Ok(SolveReport {
            stein,
            parametrization: None,
            solutions: Vec::new(),
        });
    }
    let kernels = stein.kernels.as_ref().expect("feasible verdict has kernels");
    let gram_tol = opts.tol.max(10.0 * stein.residual);
    let iso = build_isometry(&ops, kernels, opts.rank_tol, gram_tol)?;
    let universal = UniversalColligation::from_isometry(&data.graph, &iso)?;
    let sigma = universal.sigma(opts.order);
    let mut rng = crate::random::rng_from_seed(opts.seed.wrapping_add(1));
    let params = generate_parameters(
        &mut rng,
        &data.graph,
        universal.delta(),
        universal.delta_star(),
        opts.order,
        opts.num_parameters,
    );
    let mut solutions = Vec::with_capacity(params.len());
    for (i, param) in params.iter().enumerate() {
        let f = sigma.lft(&param.series)?;
        let (interpolation_residual, interpolation_exact) = data.interpolation_residual(&f)?;
        let schur = schur_sample(
            &f,
            &data.graph,
            opts.schur_samples,
            opts.seed.wrapping_add(100 + i as u64),
            0.99,
        )?;
        let coupled_gap = match &param.colligation {
            Some(col) => {
                let coupled = couple(&universal, col)?;
                Some(coupled.transfer_series(opts.order).max_diff(&f))
            }
            None => None,
        };
        solutions.push(SolutionReport {
            label: param.label.clone(),
            series: f,
            interpolation_residual,
            interpolation_exact,
            schur,
            coupled_gap,
        });
    }
    Ok(SolveReport {
        stein,
        parametrization: Some(Parametrization { universal, sigma }),
        solutions,
    })
}

/// Independent checks for a candidate solution series.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub interpolation_residual: f64,
    pub interpolation_exact: bool,
    pub schur: SchurSample,
    pub interpolation_pass: bool,
    pub schur_pass: bool,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.interpolation_pass && self.schur_pass
    }
}

pub fn verify_solution(
    data: &InterpolationData,
    f: &NcSeries,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerifyReport> {
    let (interpolation_residual, interpolation_exact) = data.interpolation_residual(f)?;
    let schur = schur_sample(f, &data.graph, samples, seed, 0.99)?;
    Ok(VerifyReport {
        interpolation_residual,
        interpolation_exact,
        interpolation_pass: interpolation_residual <= tol,
        schur_pass: schur.max_norm <= 1.0 + tol.max(1e-8),
        schur,
    })
}
