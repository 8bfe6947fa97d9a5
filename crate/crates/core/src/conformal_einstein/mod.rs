//! Conformally Einstein cylinders: the conformal Ricci change, the `a(t)+b(x)`
//! split of the conformal factor and the residual systems it leads to.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::jets::{lift_point, Jet2};
use crate::metric_builders::{chart_quadrature_with, QuadratureGrid, QuadratureResult};
use crate::tensor_core::{
    curvature_from, frame_operator_norm, grad_norm_sq, hessian_of_jet, laplacian_with, partial_difference,
    MetricField, PointGeometry, ScalarField,
};

/// Step for finite differences of already-differentiated quantities.
pub const FD_STEP: f64 = 1e-3;

type ProfileJet = dyn Fn(Jet2) -> Jet2 + Send + Sync;
type ProfileThird = dyn Fn(f64) -> f64 + Send + Sync;

/// A function of `t` alone, jet-evaluable up to second order, with its third derivative supplied.
#[derive(Clone)]
pub struct TimeProfile {
    jet: Arc<ProfileJet>,
    third: Arc<ProfileThird>,
}

impl fmt::Debug for TimeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TimeProfile(a(0) = {})", self.value(0.0))
    }
}

impl TimeProfile {
    pub fn new(
        jet: impl Fn(Jet2) -> Jet2 + Send + Sync + 'static,
        third: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { jet: Arc::new(jet), third: Arc::new(third) }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |t| t.constant_like(c), |_| 0.0)
    }

    /// `amp · cosh(βt + γ)`.
    pub fn cosh(amp: f64, beta: f64, gamma: f64) -> Self {
        Self::new(
            move |t| (t * beta + gamma).cosh() * amp,
            move |t| amp * beta.powi(3) * (beta * t + gamma).sinh(),
        )
    }

    pub fn eval_jet(&self, t: Jet2) -> Jet2 {
        (self.jet)(t)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval_jet(Jet2::constant(t, 0)).value()
    }

    /// `(a, a′, a″, a‴)` at `t`.
    pub fn derivatives(&self, t: f64) -> [f64; 4] {
        let j = self.eval_jet(Jet2::from_parts(t, &[1.0], &[vec![0.0]]).expect("one-dimensional jet"));
        [j.value(), j.d(0), j.dd(0, 0), (self.third)(t)]
    }

    /// `a + c`.
    pub fn shifted(&self, c: f64) -> Self {
        let (j, th) = (self.jet.clone(), self.third.clone());
        Self::new(move |t| j(t) + c, move |t| th(t))
    }
}

/// `e^{−f} = a(t) + b(x)` on a cylinder `M × ℝ`.
#[derive(Clone, Debug)]
pub struct SplitConformalFactor {
    pub a: TimeProfile,
    pub b: ScalarField,
    /// `dim M`.
    pub n: usize,
    /// `(δ, ε, ε′)`, when the factor is meant to satisfy `a″ = δa + ε`, `Δb = nδb + ε′`.
    pub separation: Option<(f64, f64, f64)>,
}

impl SplitConformalFactor {
    pub fn new(a: TimeProfile, b: ScalarField, n: usize) -> Self {
        Self { a, b, n, separation: None }
    }

    pub fn with_separation(mut self, delta: f64, eps: f64, eps_prime: f64) -> Self {
        self.separation = Some((delta, eps, eps_prime));
        self
    }

    /// `(a + c, b − c)`, which describes the same conformal factor.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            a: self.a.shifted(c),
            b: self.b.map(move |v| v - c),
            n: self.n,
            separation: self.separation.map(|(d, e, e2)| (d, e - d * c, e2 + self.n as f64 * d * c)),
        }
    }

    /// `a(t) + b(x)` on the cylinder chart, `t` last.
    pub fn sum_field(&self) -> ScalarField {
        let (a, b, n) = (self.a.clone(), self.b.clone(), self.n);
        ScalarField::new(move |x: &[Jet2]| a.eval_jet(x[n]) + b.eval_jets(&x[..n]))
    }

    /// `f = −ln(a + b)` on the cylinder chart.
    pub fn conformal_factor(&self) -> ScalarField {
        self.sum_field().map(|s| -s.ln())
    }

    /// Smallest `a + b` over the given cylinder points; must be positive.
    pub fn min_sum(&self, points: &[Vec<f64>]) -> f64 {
        let s = self.sum_field();
        points.iter().map(|p| s.value_at(p)).fold(f64::INFINITY, f64::min)
    }
}

/// `Ric(e^{2f} g) = Ric − (D−2)(∇df − df⊗df) + (Δf − (D−2)|df|²) g` with `D = dim g` and
/// the positive Laplacian.
pub fn conformal_ricci(g: &MetricField, f: &ScalarField, p: &[f64]) -> Result<DMatrix<f64>> {
    let geom = PointGeometry::new(g, p)?;
    let curv = curvature_from(&geom);
    let fj = f.at(p)?;
    let d = g.dim() as f64;
    let h = hessian_of_jet(&fj, &geom);
    let df = nalgebra::DVector::from_fn(g.dim(), |i, _| fj.d(i));
    let lap = -(geom.ginv.component_mul(&h)).sum();
    let norm = grad_norm_sq(&fj, &geom);
    Ok(&curv.ricci - (h - &df * df.transpose()) * (d - 2.0) + &geom.g * (lap - (d - 2.0) * norm))
}

/// `X ↦ X(∂_t f) − X(f) ∂_t f` over the coordinate directions of `M`, on a chart with `t` last.
pub fn mixed_ricci_residual(f: &ScalarField, p: &[f64]) -> Result<Vec<f64>> {
    let fj = f.at(p)?;
    let t = p.len() - 1;
    Ok((0..t).map(|i| fj.dd(i, t) - fj.d(i) * fj.d(t)).collect())
}

/// Residuals of the two equations
/// `r = (n a″ − Δb)(a+b) − n a′² − n|db|²` and `(n−1) a″ g = (a+b) Ric + (n−1) H(b)`.
/// The matrix residual is an operator norm in a `g`-orthonormal frame.
pub fn system_sy_residual(
    split: &SplitConformalFactor,
    g: &MetricField,
    r: f64,
    p: &[f64],
    t: f64,
) -> Result<(f64, f64)> {
    let geom = PointGeometry::new(g, p)?;
    let curv = curvature_from(&geom);
    let bj = split.b.at(p)?;
    let [a, a1, a2, _] = split.a.derivatives(t);
    let s = a + bj.value();
    if !(s > 0.0) {
        return Err(GeomError::OutsideDomain(p.iter().copied().chain([t]).collect()));
    }
    let n = split.n as f64;
    let hb = hessian_of_jet(&bj, &geom);
    let lap = -(geom.ginv.component_mul(&hb)).sum();
    let scalar = (n * a2 - lap) * s - n * a1 * a1 - n * grad_norm_sq(&bj, &geom) - r;
    let m = &geom.g * ((n - 1.0) * a2) - &curv.ricci * s - hb * (n - 1.0);
    Ok((scalar.abs(), frame_operator_norm(&m, &geom.g)))
}

/// Case-1 profile `a(t) = √(r/(nβ²)) cosh(βt+γ)`; `e^{2f} = α² cosh⁻²(βt+γ)` with `α² = nβ²/r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Case1Profile {
    pub alpha_sq: f64,
    pub beta: f64,
    pub gamma: f64,
    pub r: f64,
    pub n: usize,
}

impl Case1Profile {
    pub fn amplitude(&self) -> f64 {
        (self.r / (self.n as f64 * self.beta * self.beta)).sqrt()
    }

    pub fn profile(&self) -> TimeProfile {
        TimeProfile::cosh(self.amplitude(), self.beta, self.gamma)
    }

    /// `a″a − a′² − r/n`.
    pub fn ode_residual(&self, t: f64) -> f64 {
        let [a, a1, a2, _] = self.profile().derivatives(t);
        a2 * a - a1 * a1 - self.r / self.n as f64
    }

    /// Einstein constant the base must carry: `Ric^M = (n−1)β² g`.
    pub fn base_einstein_constant(&self) -> f64 {
        (self.n as f64 - 1.0) * self.beta * self.beta
    }
}

/// The Case-1 conformal factor `f = −ln a(t)` on the cylinder over an `n`-manifold (`t` last).
pub fn case1_solution(r: f64, n: usize, beta: f64, gamma: f64) -> Result<(Case1Profile, ScalarField)> {
    if !(r > 0.0) {
        return Err(GeomError::InvalidParameter(format!("Einstein constant r = {r} must be positive")));
    }
    if beta == 0.0 || !beta.is_finite() {
        return Err(GeomError::InvalidParameter(format!("beta = {beta} must be nonzero")));
    }
    if n < 2 {
        return Err(GeomError::InvalidParameter(format!("base dimension {n} must be at least 2")));
    }
    let prof = Case1Profile { alpha_sq: n as f64 * beta * beta / r, beta, gamma, r, n };
    let a = prof.profile();
    let f = ScalarField::new(move |x: &[Jet2]| -a.eval_jet(x[n]).ln());
    Ok((prof, f))
}

/// Maxima of the four separation residuals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Case3Residuals {
    /// `|a‴ − δa′|` over the `t` samples.
    pub third_order: f64,
    /// `|X(Δb) − nδ X(b)|` over the `M` samples and coordinate directions.
    pub laplacian_gradient: f64,
    /// `|a″ − δa − ε|`.
    pub a_equation: f64,
    /// `|Δb − nδb − ε′|`.
    pub b_equation: f64,
}

impl Case3Residuals {
    pub fn max(&self) -> f64 {
        self.third_order.max(self.laplacian_gradient).max(self.a_equation).max(self.b_equation)
    }
}

pub fn case3_separation_residuals(
    split: &SplitConformalFactor,
    g: &MetricField,
    m_points: &[Vec<f64>],
    t_points: &[f64],
) -> Result<Case3Residuals> {
    let (delta, eps, eps2) = split
        .separation
        .ok_or_else(|| GeomError::InvalidParameter("separation constants (δ, ε, ε′) are not set".into()))?;
    let n = split.n as f64;
    let mut out = Case3Residuals::default();
    for &t in t_points {
        let [a, a1, a2, a3] = split.a.derivatives(t);
        out.third_order = out.third_order.max((a3 - delta * a1).abs());
        out.a_equation = out.a_equation.max((a2 - delta * a - eps).abs());
    }
    let lap_b = |q: &[f64]| laplacian_with(&split.b, &PointGeometry::new(g, q)?);
    for p in m_points {
        let bj = split.b.at(p)?;
        out.b_equation = out.b_equation.max((lap_b(p)? - n * delta * bj.value() - eps2).abs());
        for axis in 0..p.len() {
            let x_lap = partial_difference(p, axis, FD_STEP, lap_b)?;
            out.laplacian_gradient = out.laplacian_gradient.max((x_lap - n * delta * bj.d(axis)).abs());
        }
    }
    Ok(out)
}

/// Maxima over `points` of `‖H(b) + δ b g‖` and `‖Ric − (n−1)δ g‖` in orthonormal frames.
pub fn obata_residual(b: &ScalarField, g: &MetricField, delta: f64, points: &[Vec<f64>]) -> Result<(f64, f64)> {
    let n = g.dim() as f64;
    let (mut hres, mut eres) = (0.0f64, 0.0f64);
    for p in points {
        let geom = PointGeometry::new(g, p)?;
        let bj = b.at(p)?;
        let h = hessian_of_jet(&bj, &geom) + &geom.g * (delta * bj.value());
        hres = hres.max(frame_operator_norm(&h, &geom.g));
        let ric = curvature_from(&geom).ricci - &geom.g * ((n - 1.0) * delta);
        eres = eres.max(frame_operator_norm(&ric, &geom.g));
    }
    Ok((hres, eres))
}

/// `∫_M ((n+1)|db|² + r) dv` by chart quadrature.
pub fn case2_obstruction(
    g: &MetricField,
    b: &ScalarField,
    r: f64,
    n: usize,
    grid: &QuadratureGrid,
) -> Result<QuadratureResult> {
    if !(r > 0.0) {
        return Err(GeomError::InvalidParameter(format!("Einstein constant r = {r} must be positive")));
    }
    let c = n as f64 + 1.0;
    chart_quadrature_with(g, grid, |p, gv| {
        let bj = b.eval_jets(&lift_point(p)?);
        let ginv = gv.clone().try_inverse().ok_or_else(|| GeomError::SingularMetric(p.to_vec()))?;
        let mut norm = 0.0;
        for i in 0..p.len() {
            for j in 0..p.len() {
                norm += ginv[(i, j)] * bj.d(i) * bj.d(j);
            }
        }
        Ok(c * norm + r)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EinsteinReport {
    pub lambda_fit: f64,
    pub max_residual: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub passed: bool,
}

/// Trace-fitted Einstein constant and the worst orthonormal-frame norm of `Ric − λg`.
pub fn einstein_check(g: &MetricField, points: &[Vec<f64>], tol: f64) -> Result<EinsteinReport> {
    if points.len() < 10 {
        return Err(GeomError::InvalidParameter(format!("einstein_check needs at least 10 points, got {}", points.len())));
    }
    let d = g.dim() as f64;
    let mut packs = Vec::with_capacity(points.len());
    for p in points {
        packs.push(curvature_from(&PointGeometry::new(g, p)?));
    }
    let lambda = packs.iter().map(|c| c.scalar / d).sum::<f64>() / packs.len() as f64;
    let max_residual = packs
        .iter()
        .map(|c| frame_operator_norm(&(&c.ricci - &c.g * lambda), &c.g))
        .fold(0.0, f64::max);
    Ok(EinsteinReport {
        lambda_fit: lambda,
        max_residual,
        samples: points.len(),
        tolerance: tol,
        passed: max_residual <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_builders::{conformal_rescale, product_cylinder, round_sphere, round_sphere_angular, stereographic_height};
    use crate::tensor_core::curvature;
    use std::f64::consts::PI;

    fn s5() -> MetricField {
        round_sphere(5, 1.0)
    }

    const P5: [f64; 5] = [0.3, -0.2, 0.5, 0.1, -0.4];

    #[test]
    fn zero_factor_returns_ricci() {
        let g = s5();
        let a = conformal_ricci(&g, &ScalarField::constant(0.0), &P5).unwrap();
        assert!((a - curvature(&g, &P5).unwrap().ricci).amax() < 1e-15);
    }

    #[test]
    fn two_paths_on_cosh_cylinder() {
        let cyl = product_cylinder(&s5());
        let f = ScalarField::coordinate(5).map(|t| -t.cosh().ln());
        let p = [0.3, -0.2, 0.5, 0.1, -0.4, 0.8];
        let closed = conformal_ricci(&cyl, &f, &p).unwrap();
        let rescaled = conformal_rescale(&cyl, &f);
        let direct = curvature(&rescaled, &p).unwrap();
        assert!((&closed - &direct.ricci).amax() < 1e-9);
        assert!((&closed - direct.g * 5.0).amax() < 1e-6);
    }

    #[test]
    fn mixed_residual() {
        let split = SplitConformalFactor::new(TimeProfile::cosh(1.0, 1.0, 0.2), stereographic_height().scale(0.3), 5);
        let r = mixed_ricci_residual(&split.conformal_factor(), &[0.3, -0.2, 0.5, 0.1, -0.4, 0.8]).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-9));
        let f = ScalarField::new(|x: &[Jet2]| x[0] * x[2]);
        // X(f′) − X(f)f′ = 1 − x₁t
        let r = mixed_ricci_residual(&f, &[1.0, 1.0, -1.0]).unwrap();
        assert!((r[0] - 2.0).abs() < 1e-14 && r[1].abs() < 1e-14);
        let r = mixed_ricci_residual(&f, &[1.0, 1.0, 0.0]).unwrap();
        assert!(r[0] > 0.1);
        let g = ScalarField::new(|x: &[Jet2]| x[2].sin() * 3.0);
        assert!(mixed_ricci_residual(&g, &[0.4, 1.0, 0.3]).unwrap().iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn system_sy() {
        let g = s5();
        let cosh = SplitConformalFactor::new(TimeProfile::cosh(1.0, 1.0, 0.0), ScalarField::constant(0.0), 5);
        let (s, m) = system_sy_residual(&cosh, &g, 5.0, &P5, 0.7).unwrap();
        assert!(s < 1e-7 && m < 1e-7);
        let (s, _) = system_sy_residual(&cosh, &g, 7.0, &P5, 0.7).unwrap();
        assert!((s - 2.0).abs() < 1e-9);

        // b = 0.2·x₆ pairs with Ric = 4g and H(b) = −b g, so only the scalar equation moves (r = 4.8)
        let tilted = SplitConformalFactor::new(TimeProfile::cosh(1.0, 1.0, 0.0), stereographic_height().scale(0.2), 5);
        let (s, m) = system_sy_residual(&tilted, &g, 5.0, &P5, 0.7).unwrap();
        assert!(m < 1e-9);
        assert!((s - 0.2).abs() < 1e-9);
        let (s, _) = system_sy_residual(&tilted, &g, 4.8, &P5, -1.1).unwrap();
        assert!(s < 1e-9);

        // rescaling the base breaks the Ricci pairing
        let (_, m) = system_sy_residual(&tilted, &round_sphere(5, 1.3), 5.0, &P5, 0.7).unwrap();
        assert!(m > 1e-3);
    }

    #[test]
    fn case1_profiles() {
        let (p, f) = case1_solution(5.0, 5, 1.0, 0.0).unwrap();
        assert_eq!(p.alpha_sq, 1.0);
        for t in [-2.0, -0.5, 0.0, 0.3, 1.9] {
            assert!(p.ode_residual(t).abs() < 1e-12);
            let e2f = (2.0 * f.value_at(&[0.0, 0.0, 0.0, 0.0, 0.0, t])).exp();
            assert!((e2f - 1.0 / (t as f64).cosh().powi(2)).abs() < 1e-14);
        }
        let (p6, _) = case1_solution(6.0, 6, 1.0, 0.0).unwrap();
        assert_eq!(p6.amplitude(), 1.0);
        let (pg, _) = case1_solution(5.0, 5, 1.0, 0.4).unwrap();
        assert!((pg.profile().value(0.0) - p.profile().value(0.4)).abs() < 1e-15);
        assert!(case1_solution(-1.0, 5, 1.0, 0.0).is_err());
        assert!(case1_solution(5.0, 5, 0.0, 0.0).is_err());
        let (q, _) = case1_solution(3.0, 4, 2.0, 0.0).unwrap();
        assert!((q.alpha_sq - 16.0 / 3.0).abs() < 1e-15);
        assert!((q.base_einstein_constant() - 12.0).abs() < 1e-15);
    }

    #[test]
    fn case3_on_the_sphere() {
        let g = s5();
        let pts = vec![P5.to_vec(), vec![-0.1, 0.6, 0.2, -0.3, 0.05]];
        let split = SplitConformalFactor::new(TimeProfile::cosh(1.0, 1.0, 0.0), stereographic_height(), 5)
            .with_separation(1.0, 0.0, 0.0);
        let res = case3_separation_residuals(&split, &g, &pts, &[-1.0, 0.0, 0.5]).unwrap();
        assert!(res.max() < 1e-7, "{res:?}");

        let sq = SplitConformalFactor::new(
            TimeProfile::cosh(1.0, 1.0, 0.0),
            stereographic_height().map(|v| v.sqr()),
            5,
        )
        .with_separation(1.0, 0.0, 0.0);
        let res = case3_separation_residuals(&sq, &g, &pts, &[0.5]).unwrap();
        assert!(res.b_equation > 0.5);

        let shifted = split.shifted(0.7);
        let f0 = split.conformal_factor();
        let f1 = shifted.conformal_factor();
        let p = [0.3, -0.2, 0.5, 0.1, -0.4, 0.8];
        assert!((f0.value_at(&p) - f1.value_at(&p)).abs() < 1e-14);
        let a = system_sy_residual(&split, &g, 5.0, &P5, 0.3).unwrap();
        let b = system_sy_residual(&shifted, &g, 5.0, &P5, 0.3).unwrap();
        assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
        let res = case3_separation_residuals(&shifted, &g, &pts, &[-1.0, 0.5]).unwrap();
        assert!(res.max() < 1e-7, "{res:?}");
    }

    #[test]
    fn obata() {
        let (h, e) = obata_residual(&stereographic_height(), &s5(), 1.0, &[P5.to_vec()]).unwrap();
        assert!(h < 1e-7 && e < 1e-7);
        let (h, _) = obata_residual(&stereographic_height().map(|v| v.sqr()), &s5(), 1.0, &[P5.to_vec(), vec![0.0; 5]]).unwrap();
        assert!(h > 0.5);
    }

    #[test]
    fn case2_integrals() {
        let ranges = |n: usize| {
            let mut r = vec![(0.0, PI); n - 1];
            r.push((0.0, 2.0 * PI));
            r
        };
        let height = ScalarField::coordinate(0).map(|t| t.cos());
        let s2 = round_sphere_angular(2, 1.0);
        let q = case2_obstruction(&s2, &height, 1.0, 2, &QuadratureGrid::uniform(24, &ranges(2))).unwrap();
        assert!((q.value / (12.0 * PI) - 1.0).abs() < 1e-2);
        let s5a = round_sphere_angular(5, 1.0);
        let grid = QuadratureGrid::uniform(8, &ranges(5));
        let q = case2_obstruction(&s5a, &height, 5.0, 5, &grid).unwrap();
        assert!((q.value / (10.0 * PI.powi(3)) - 1.0).abs() < 1e-2, "{q:?}");
        let q = case2_obstruction(&s5a, &ScalarField::constant(0.0), 5.0, 5, &grid).unwrap();
        assert!((q.value / (5.0 * PI.powi(3)) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn einstein_reports() {
        let pts: Vec<Vec<f64>> = (0..10).map(|k| (0..6).map(|i| ((k * 7 + i * 3) % 11) as f64 / 11.0 - 0.5).collect()).collect();
        let rep = einstein_check(&round_sphere(6, 1.0), &pts, 1e-7).unwrap();
        assert!(rep.passed && (rep.lambda_fit - 5.0).abs() < 1e-9);
        let (_, f) = case1_solution(5.0, 5, 1.0, 0.0).unwrap();
        let g = conformal_rescale(&product_cylinder(&s5()), &f);
        let rep = einstein_check(&g, &pts, 1e-6).unwrap();
        assert!(rep.passed && (rep.lambda_fit - 5.0).abs() < 1e-6, "{rep:?}");
        let rep = einstein_check(&product_cylinder(&s5()), &pts, 1e-6).unwrap();
        assert!(!rep.passed && rep.max_residual > 0.05);
        assert!(einstein_check(&s5(), &pts[..3], 1e-6).is_err());
    }
}
