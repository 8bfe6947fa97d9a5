use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::DMatrix;

use crate::error::{GeomError, Result};
use crate::jets::lift_values;
use crate::tensor_core::{MetricField, ScalarField};

/// Tensor-product grid: one `(nodes, lo, hi)` triple per chart axis.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureGrid {
    pub axes: Vec<(usize, f64, f64)>,
}

impl QuadratureGrid {
    pub fn new(axes: Vec<(usize, f64, f64)>) -> Self {
        Self { axes }
    }

    pub fn uniform(nodes: usize, ranges: &[(f64, f64)]) -> Self {
        Self { axes: ranges.iter().map(|&(lo, hi)| (nodes, lo, hi)).collect() }
    }

    /// Same ranges, half the nodes per axis (at least one).
    pub fn halved(&self) -> Self {
        Self { axes: self.axes.iter().map(|&(n, lo, hi)| ((n / 2).max(1), lo, hi)).collect() }
    }

    pub fn point_count(&self) -> usize {
        self.axes.iter().map(|a| a.0).product()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// `|Q_n − Q_{n/2}|`, floored at a few ulps of the value.
    pub error_estimate: f64,
    pub points: usize,
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule mapped to `[lo, hi]`.
pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n.max(1)).unwrap());
    let (half, mid) = (0.5 * (hi - lo), 0.5 * (hi + lo));
    rule.iter().map(|(x, w)| (mid + half * x, half * w)).collect()
}

fn integrate_once(
    g: &MetricField,
    grid: &QuadratureGrid,
    integrand: &dyn Fn(&[f64], &DMatrix<f64>) -> Result<f64>,
) -> Result<f64> {
    let dim = g.dim();
    if grid.axes.len() != dim {
        return Err(GeomError::DimensionMismatch { expected: dim, found: grid.axes.len() });
    }
    let rules: Vec<Vec<(f64, f64)>> = grid.axes.iter().map(|&(n, lo, hi)| gauss_legendre(n, lo, hi)).collect();
    let mut idx = vec![0usize; dim];
    let mut p = vec![0.0; dim];
    let mut total = 0.0;
    'outer: loop {
        let mut w = 1.0;
        for (a, &i) in idx.iter().enumerate() {
            p[a] = rules[a][i].0;
            w *= rules[a][i].1;
        }
        let gv = g.eval_jets(&lift_values(&p)).values();
        let det = gv.determinant();
        if !(det > 0.0) {
            return Err(GeomError::NotPositiveDefinite(p.clone()));
        }
        let f = integrand(&p, &gv)?;
        if !f.is_finite() {
            return Err(GeomError::NonFinite(format!("integrand at {p:?}")));
        }
        total += w * f * det.sqrt();
        for a in (0..dim).rev() {
            idx[a] += 1;
            if idx[a] < rules[a].len() {
                continue 'outer;
            }
            idx[a] = 0;
        }
        break;
    }
    Ok(total)
}

/// `Σ w_i f(p_i, g(p_i)) √det g(p_i)` over the grid, with the half-resolution error estimate.
/// The integrand receives the chart point and the metric components there.
pub fn chart_quadrature_with(
    g: &MetricField,
    grid: &QuadratureGrid,
    integrand: impl Fn(&[f64], &DMatrix<f64>) -> Result<f64>,
) -> Result<QuadratureResult> {
    let value = integrate_once(g, grid, &integrand)?;
    let coarse = integrate_once(g, &grid.halved(), &integrand)?;
    Ok(QuadratureResult {
        value,
        error_estimate: (value - coarse).abs().max(64.0 * f64::EPSILON * value.abs()),
        points: grid.point_count(),
    })
}

/// Integral of a scalar field against the Riemannian volume of `g` over the grid box.
pub fn chart_quadrature(g: &MetricField, integrand: &ScalarField, grid: &QuadratureGrid) -> Result<QuadratureResult> {
    chart_quadrature_with(g, grid, |p, _| Ok(integrand.eval_jets(&lift_values(p)).value()))
}
