use std::fmt::Write as _;

use serde::Serialize;
use sinecone_core::conformal_einstein::{case1_solution, einstein_check};
use sinecone_core::metric_builders::{conformal_rescale, lookup, product_cylinder};

use crate::report::fmt_sig;
use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    /// Base fixture `M`; the sweep runs on `M × ℝ`.
    pub fixture: String,
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub rs: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// Multiply the base metric by this constant.
    pub base_scale: Option<f64>,
    /// Rescale the base so that `Ric = (n−1)β² g` for each β.
    pub match_base: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub beta: f64,
    pub gamma: f64,
    pub r: f64,
    pub lambda_fit: f64,
    /// `max(‖Ric − λ_fit g‖, |λ_fit − r|)`.
    pub max_residual: f64,
    pub passed: bool,
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, CliError> {
    if spec.betas.is_empty() || spec.gammas.is_empty() || spec.rs.is_empty() {
        return Err(CliError::Usage("sweep grid is empty".into()));
    }
    if let Some(b) = spec.betas.iter().find(|b| **b == 0.0 || !b.is_finite()) {
        return Err(CliError::Usage(format!("beta must be nonzero, got {b}")));
    }
    if let Some(r) = spec.rs.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
        return Err(CliError::Usage(format!("r must be positive, got {r}")));
    }
    if spec.samples < crate::suites::MIN_SAMPLES {
        return Err(CliError::Usage(format!("--samples must be at least {}", crate::suites::MIN_SAMPLES)));
    }
    if spec.base_scale.is_some() && spec.match_base {
        return Err(CliError::Usage("--base-scale and --match-base are exclusive".into()));
    }
    let fx = lookup(&spec.fixture)?;
    let n = fx.dim();
    let base_lambda = fx.einstein_constant();
    if spec.match_base && !base_lambda.is_some_and(|l| l > 0.0) {
        return Err(CliError::Usage(format!("--match-base needs a positive Einstein base, `{}` is not one", fx.name)));
    }
    let points = fx.sample_box.clone().with(-2.0, 2.0).sample(spec.seed, spec.samples);
    let mut rows = Vec::new();
    for &beta in &spec.betas {
        let scale = match (spec.base_scale, base_lambda) {
            (Some(c), _) => c,
            (None, Some(l)) if spec.match_base => l / ((n as f64 - 1.0) * beta * beta),
            _ => 1.0,
        };
        let base = if scale == 1.0 { fx.metric.clone() } else { fx.metric.scaled(scale) };
        let cyl = product_cylinder(&base);
        for &gamma in &spec.gammas {
            for &r in &spec.rs {
                let (_, f) = case1_solution(r, n, beta, gamma)?;
                let e = einstein_check(&conformal_rescale(&cyl, &f), &points, spec.tol)?;
                let max_residual = e.max_residual.max((e.lambda_fit - r).abs());
                rows.push(SweepRow { beta, gamma, r, lambda_fit: e.lambda_fit, max_residual, passed: max_residual <= spec.tol });
            }
        }
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("beta,gamma,r,lambda_fit,max_residual,passed\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_sig(r.beta),
            fmt_sig(r.gamma),
            fmt_sig(r.r),
            fmt_sig(r.lambda_fit),
            fmt_sig(r.max_residual),
            r.passed
        );
    }
    out
}
