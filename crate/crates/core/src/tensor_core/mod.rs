//! Pointwise tensor calculus on a single chart.
//!
//! Fields are closures over coordinate jets; evaluating them at lifted
//! coordinates yields components together with their first and second
//! partial derivatives. Curvature is assembled from `∂²g`, `∂g` and `g⁻¹`
//! directly, so no third-order jets are ever needed.

mod arrays;
pub mod forms;

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

pub use arrays::{Tensor3, Tensor4};
pub use forms::{
    exterior_derivative, hodge_star, inner_product, metric_contraction, volume_form, wedge, Form,
    FormCoeff, FormField, JetForm,
};

use crate::error::{GeomError, Result};
use crate::jets::{lift_point, lift_values, Jet2, JetMat};

pub type ComponentsFn = dyn Fn(&[Jet2]) -> JetMat + Send + Sync;
pub type DomainFn = dyn Fn(&[f64]) -> bool + Send + Sync;

/// Orientation of a chart, used by the Hodge star.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }
}

/// A smooth function on a chart.
#[derive(Clone)]
pub struct ScalarField {
    eval: Arc<dyn Fn(&[Jet2]) -> Jet2 + Send + Sync>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ScalarField")
    }
}

impl ScalarField {
    pub fn new(f: impl Fn(&[Jet2]) -> Jet2 + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(f) }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |x: &[Jet2]| Jet2::constant(c, x.first().map_or(0, Jet2::dim)))
    }

    /// The `i`-th chart coordinate.
    pub fn coordinate(i: usize) -> Self {
        Self::new(move |x: &[Jet2]| x[i])
    }

    pub fn eval_jets(&self, x: &[Jet2]) -> Jet2 {
        (self.eval)(x)
    }

    pub fn at(&self, p: &[f64]) -> Result<Jet2> {
        let j = self.eval_jets(&lift_point(p)?);
        if !j.is_finite() {
            return Err(GeomError::NonFinite(format!("scalar field at {p:?}")));
        }
        Ok(j)
    }

    pub fn value_at(&self, p: &[f64]) -> f64 {
        self.eval_jets(&lift_values(p)).value()
    }

    /// Pointwise composition `x ↦ f(self(x))` with a jet function.
    pub fn map(&self, f: impl Fn(Jet2) -> Jet2 + Send + Sync + 'static) -> Self {
        let inner = self.clone();
        Self::new(move |x: &[Jet2]| f(inner.eval_jets(x)))
    }

    /// Precomposition with a change of coordinates given by jet components.
    pub fn compose(&self, map: impl Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync + 'static) -> Self {
        let inner = self.clone();
        Self::new(move |x: &[Jet2]| inner.eval_jets(&map(x)))
    }

    pub fn add(&self, other: &ScalarField) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Self::new(move |x: &[Jet2]| a.eval_jets(x) + b.eval_jets(x))
    }

    pub fn mul(&self, other: &ScalarField) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Self::new(move |x: &[Jet2]| a.eval_jets(x) * b.eval_jets(x))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(move |v| v * s)
    }
}

/// Chart-level Riemannian metric.
#[derive(Clone)]
pub struct MetricField {
    dim: usize,
    components: Arc<ComponentsFn>,
    domain: Arc<DomainFn>,
    orientation: Option<Orientation>,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("dim", &self.dim)
            .field("orientation", &self.orientation)
            .finish_non_exhaustive()
    }
}

impl MetricField {
    /// A metric whose components are given as a jet function of the coordinates.
    /// The default domain is the whole chart with positive orientation.
    pub fn new(dim: usize, components: impl Fn(&[Jet2]) -> JetMat + Send + Sync + 'static) -> Self {
        Self {
            dim,
            components: Arc::new(components),
            domain: Arc::new(|_| true),
            orientation: Some(Orientation::Positive),
        }
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(dim, move |x: &[Jet2]| JetMat::identity(dim, x.first().map_or(0, Jet2::dim)))
    }

    pub fn with_domain(mut self, domain: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        self.domain = Arc::new(domain);
        self
    }

    pub fn with_orientation(mut self, orientation: Option<Orientation>) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn orientation(&self) -> Option<Orientation> {
        self.orientation
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim && (self.domain)(p)
    }

    pub fn eval_jets(&self, x: &[Jet2]) -> JetMat {
        (self.components)(x)
    }

    fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim {
            return Err(GeomError::DimensionMismatch { expected: self.dim, found: p.len() });
        }
        if !(self.domain)(p) {
            return Err(GeomError::OutsideDomain(p.to_vec()));
        }
        Ok(())
    }

    /// Components with first and second partials at `p`.
    pub fn jets_at(&self, p: &[f64]) -> Result<JetMat> {
        self.check_point(p)?;
        Ok(self.eval_jets(&lift_point(p)?))
    }

    /// Component values only at `p`.
    pub fn values_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        Ok(self.eval_jets(&lift_values(p)).values())
    }

    /// Metric values, inverse and Christoffel symbols at `p`.
    pub fn geometry_at(&self, p: &[f64]) -> Result<PointGeometry> {
        PointGeometry::new(self, p)
    }

    /// The metric `c·g`.
    pub fn scaled(&self, c: f64) -> MetricField {
        let inner = self.clone();
        let dim = self.dim;
        MetricField {
            dim,
            components: Arc::new(move |x: &[Jet2]| {
                let m = inner.eval_jets(x);
                JetMat::from_fn(dim, |i, j| m[(i, j)] * c)
            }),
            domain: self.domain.clone(),
            orientation: self.orientation,
        }
    }

    /// Symmetry residual and smallest eigenvalue at `p`.
    pub fn validate_at(&self, p: &[f64]) -> Result<(f64, f64)> {
        let g = self.values_at(p)?;
        let asym = (&g - g.transpose()).amax();
        let sym = (&g + g.transpose()) * 0.5;
        let min_eig = sym.symmetric_eigenvalues().min();
        Ok((asym, min_eig))
    }
}

/// Metric data at a point: values, inverse, jets and Christoffel symbols.
#[derive(Clone, Debug)]
pub struct PointGeometry {
    pub point: Vec<f64>,
    pub jets: JetMat,
    pub g: DMatrix<f64>,
    pub ginv: DMatrix<f64>,
    /// `gamma[(k, i, j)] = Γ^k_ij`.
    pub gamma: Tensor3,
}

impl PointGeometry {
    pub fn new(metric: &MetricField, p: &[f64]) -> Result<Self> {
        let jets = metric.jets_at(p)?;
        if !(0..metric.dim).all(|i| (0..metric.dim).all(|j| jets[(i, j)].is_finite())) {
            return Err(GeomError::NonFinite(format!("metric components at {p:?}")));
        }
        let g = jets.values();
        let ginv = invert_metric(&g, p)?;
        let gamma = christoffel_from(&jets, &ginv);
        Ok(Self { point: p.to_vec(), jets, g, ginv, gamma })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `∂_k g_ij`.
    pub fn dg(&self, k: usize, i: usize, j: usize) -> f64 {
        self.jets[(i, j)].d(k)
    }

    pub fn sqrt_det(&self) -> f64 {
        self.g.determinant().sqrt()
    }
}

fn invert_metric(g: &DMatrix<f64>, p: &[f64]) -> Result<DMatrix<f64>> {
    let scale = g.amax().max(f64::MIN_POSITIVE);
    match g.clone().cholesky() {
        Some(ch) => {
            let det = g.determinant();
            if det.abs() <= 1e-14 * scale.powi(g.nrows() as i32) {
                return Err(GeomError::SingularMetric(p.to_vec()));
            }
            Ok(ch.inverse())
        }
        None => {
            if g.determinant().abs() <= 1e-14 * scale.powi(g.nrows() as i32) {
                Err(GeomError::SingularMetric(p.to_vec()))
            } else {
                Err(GeomError::NotPositiveDefinite(p.to_vec()))
            }
        }
    }
}

/// `Γ_{m,ij} = ½(∂_i g_jm + ∂_j g_im − ∂_m g_ij)`.
fn christoffel_first_kind(jets: &JetMat) -> Tensor3 {
    let n = jets.size();
    Tensor3::from_fn(n, |m, i, j| {
        0.5 * (jets[(j, m)].d(i) + jets[(i, m)].d(j) - jets[(i, j)].d(m))
    })
}

fn christoffel_from(jets: &JetMat, ginv: &DMatrix<f64>) -> Tensor3 {
    let n = jets.size();
    let low = christoffel_first_kind(jets);
    Tensor3::from_fn(n, |k, i, j| (0..n).map(|m| ginv[(k, m)] * low[(m, i, j)]).sum())
}

/// Christoffel symbols `Γ^k_ij` of the Levi-Civita connection at `p`.
pub fn christoffel(g: &MetricField, p: &[f64]) -> Result<Tensor3> {
    Ok(PointGeometry::new(g, p)?.gamma)
}

/// Curvature data at a point.
#[derive(Clone, Debug)]
pub struct CurvaturePack {
    pub gamma: Tensor3,
    /// `riemann_low[(i, j, k, l)] = g(R(∂_i, ∂_j)∂_k, ∂_l)` with
    /// `R(X, Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y]`.
    pub riemann_low: Tensor4,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    pub g: DMatrix<f64>,
    pub ginv: DMatrix<f64>,
}

impl CurvaturePack {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// Largest residual of the pair symmetries `R_ijkl = −R_jikl = −R_ijlk = R_klij`.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.dim();
        let r = &self.riemann_low;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = r[(i, j, k, l)];
                        worst = worst
                            .max((v + r[(j, i, k, l)]).abs())
                            .max((v + r[(i, j, l, k)]).abs())
                            .max((v - r[(k, l, i, j)]).abs());
                    }
                }
            }
        }
        worst
    }

    /// Largest residual of `R_ijkl + R_iklj + R_iljk = 0`.
    pub fn bianchi_residual(&self) -> f64 {
        let n = self.dim();
        let r = &self.riemann_low;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        worst = worst.max((r[(i, j, k, l)] + r[(i, k, l, j)] + r[(i, l, j, k)]).abs());
                    }
                }
            }
        }
        worst
    }

    /// Residual of `Ric_ik = g^{jl} R_jikl` and of Ricci symmetry.
    pub fn ricci_trace_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for k in 0..n {
                let mut tr = 0.0;
                for j in 0..n {
                    for l in 0..n {
                        tr += self.ginv[(j, l)] * self.riemann_low[(j, i, k, l)];
                    }
                }
                worst = worst
                    .max((tr - self.ricci[(i, k)]).abs())
                    .max((self.ricci[(i, k)] - self.ricci[(k, i)]).abs());
            }
        }
        worst
    }
}

/// Riemann, Ricci and scalar curvature at `p`.
pub fn curvature(g: &MetricField, p: &[f64]) -> Result<CurvaturePack> {
    let geom = PointGeometry::new(g, p)?;
    Ok(curvature_from(&geom))
}

pub fn curvature_from(geom: &PointGeometry) -> CurvaturePack {
    let n = geom.dim();
    let jets = &geom.jets;
    let ginv = &geom.ginv;
    let gamma = &geom.gamma;
    let low = christoffel_first_kind(jets);

    // ∂_a g^{km} = −g^{kp} ∂_a g_pq g^{qm}
    let mut dginv = vec![DMatrix::<f64>::zeros(n, n); n];
    for (a, slot) in dginv.iter_mut().enumerate() {
        let dga = jets.partial(a);
        *slot = -(ginv * dga * ginv);
    }
    // dgamma[a][(k, i, j)] = ∂_a Γ^k_ij
    let mut dgamma = Vec::with_capacity(n);
    for a in 0..n {
        let dlow = Tensor3::from_fn(n, |m, i, j| {
            0.5 * (jets[(j, m)].dd(a, i) + jets[(i, m)].dd(a, j) - jets[(i, j)].dd(a, m))
        });
        let t = Tensor3::from_fn(n, |k, i, j| {
            (0..n)
                .map(|m| dginv[a][(k, m)] * low[(m, i, j)] + ginv[(k, m)] * dlow[(m, i, j)])
                .sum()
        });
        dgamma.push(t);
    }
    // R^l_{kij} = ∂_i Γ^l_jk − ∂_j Γ^l_ik + Γ^l_im Γ^m_jk − Γ^l_jm Γ^m_ik
    let mut up = Tensor4::zeros(n);
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut v = dgamma[i][(l, j, k)] - dgamma[j][(l, i, k)];
                    for m in 0..n {
                        v += gamma[(l, i, m)] * gamma[(m, j, k)] - gamma[(l, j, m)] * gamma[(m, i, k)];
                    }
                    up[(l, k, i, j)] = v;
                }
            }
        }
    }
    let mut riemann_low = Tensor4::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    riemann_low[(i, j, k, l)] = (0..n).map(|m| geom.g[(l, m)] * up[(m, k, i, j)]).sum();
                }
            }
        }
    }
    let mut ricci = DMatrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                for l in 0..n {
                    s += ginv[(j, l)] * riemann_low[(j, i, k, l)];
                }
            }
            ricci[(i, k)] = s;
        }
    }
    let scalar = (ginv.component_mul(&ricci)).sum();
    CurvaturePack {
        gamma: gamma.clone(),
        riemann_low,
        ricci,
        scalar,
        g: geom.g.clone(),
        ginv: ginv.clone(),
    }
}

/// Covariant Hessian `∇db` of a function.
pub fn hessian(b: &ScalarField, g: &MetricField, p: &[f64]) -> Result<DMatrix<f64>> {
    let geom = PointGeometry::new(g, p)?;
    hessian_with(b, &geom)
}

pub fn hessian_with(b: &ScalarField, geom: &PointGeometry) -> Result<DMatrix<f64>> {
    let bj = b.at(&geom.point)?;
    Ok(hessian_of_jet(&bj, geom))
}

pub fn hessian_of_jet(bj: &Jet2, geom: &PointGeometry) -> DMatrix<f64> {
    let n = geom.dim();
    DMatrix::from_fn(n, n, |i, j| {
        bj.dd(i, j) - (0..n).map(|k| geom.gamma[(k, i, j)] * bj.d(k)).sum::<f64>()
    })
}

/// Laplacian with the positive-spectrum sign, `Δb = −g^{ij} H(b)_ij`.
pub fn laplacian(b: &ScalarField, g: &MetricField, p: &[f64]) -> Result<f64> {
    let geom = PointGeometry::new(g, p)?;
    laplacian_with(b, &geom)
}

pub fn laplacian_with(b: &ScalarField, geom: &PointGeometry) -> Result<f64> {
    let h = hessian_with(b, geom)?;
    Ok(-(geom.ginv.component_mul(&h)).sum())
}

/// `|db|²_g` at the point of `geom`.
pub fn grad_norm_sq(bj: &Jet2, geom: &PointGeometry) -> f64 {
    let n = geom.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += geom.ginv[(i, j)] * bj.d(i) * bj.d(j);
        }
    }
    s
}

/// Variance of a two-index tensor field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorKind {
    /// Components `T_ij`.
    Covariant02,
    /// Components `T^i_j`.
    Mixed11,
}

/// A two-index tensor field given by jet components.
#[derive(Clone)]
pub struct TensorField2 {
    pub kind: TensorKind,
    components: Arc<ComponentsFn>,
}

impl fmt::Debug for TensorField2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TensorField2").field("kind", &self.kind).finish_non_exhaustive()
    }
}

impl TensorField2 {
    pub fn new(kind: TensorKind, f: impl Fn(&[Jet2]) -> JetMat + Send + Sync + 'static) -> Self {
        Self { kind, components: Arc::new(f) }
    }

    pub fn eval_jets(&self, x: &[Jet2]) -> JetMat {
        (self.components)(x)
    }

    /// The metric itself as a (0,2) field.
    pub fn from_metric(g: &MetricField) -> Self {
        let g = g.clone();
        Self::new(TensorKind::Covariant02, move |x: &[Jet2]| g.eval_jets(x))
    }
}

/// `∇T` with the derivative index first: `out[(k, i, j)] = ∇_k T_ij` (or `∇_k T^i_j`).
pub fn covariant_derivative(t: &TensorField2, g: &MetricField, p: &[f64]) -> Result<Tensor3> {
    let geom = PointGeometry::new(g, p)?;
    let comps = t.eval_jets(&lift_point(p)?);
    Ok(covariant_derivative_of(t.kind, &comps, &geom))
}

pub fn covariant_derivative_of(kind: TensorKind, comps: &JetMat, geom: &PointGeometry) -> Tensor3 {
    let n = geom.dim();
    let gam = &geom.gamma;
    Tensor3::from_fn(n, |k, i, j| {
        let mut v = comps[(i, j)].d(k);
        for m in 0..n {
            v += match kind {
                TensorKind::Covariant02 => {
                    -gam[(m, k, i)] * comps[(m, j)].value() - gam[(m, k, j)] * comps[(i, m)].value()
                }
                TensorKind::Mixed11 => {
                    gam[(i, k, m)] * comps[(m, j)].value() - gam[(m, k, j)] * comps[(i, m)].value()
                }
            };
        }
        v
    })
}

/// Largest eigenvalue magnitude of `A` measured in a `g`-orthonormal frame.
pub fn frame_operator_norm(a: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
    let Some(ch) = g.clone().cholesky() else {
        return f64::NAN;
    };
    let l = ch.l();
    let Some(linv) = l.clone().try_inverse() else {
        return f64::NAN;
    };
    let m = &linv * a * linv.transpose();
    let sym = (&m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Eigenvalues of `g⁻¹A` for symmetric `A`, ascending.
pub fn frame_eigenvalues(a: &DMatrix<f64>, g: &DMatrix<f64>) -> Vec<f64> {
    let Some(ch) = g.clone().cholesky() else {
        return vec![];
    };
    let Some(linv) = ch.l().try_inverse() else {
        return vec![];
    };
    let m = &linv * a * linv.transpose();
    let sym = (&m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Fourth-order central difference `f′(0) ≈ (f(−2h) − 8f(−h) + 8f(h) − f(2h)) / 12h`.
pub fn central_difference(h: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    Ok((f(-2.0 * h)? - 8.0 * f(-h)? + 8.0 * f(h)? - f(2.0 * h)?) / (12.0 * h))
}

/// Partial derivative of a pointwise quantity along chart axis `axis`, by [`central_difference`].
pub fn partial_difference(p: &[f64], axis: usize, h: f64, mut f: impl FnMut(&[f64]) -> Result<f64>) -> Result<f64> {
    let mut q = p.to_vec();
    central_difference(h, |s| {
        q[axis] = p[axis] + s;
        f(&q)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn stereo_sphere(n: usize) -> MetricField {
        MetricField::new(n, move |x: &[Jet2]| {
            let cd = x[0].dim();
            let mut s = Jet2::constant(1.0, cd);
            for xi in x {
                s += *xi * *xi;
            }
            let conf = s.recip().sqr() * 4.0;
            JetMat::from_fn(n, |i, j| if i == j { conf } else { Jet2::constant(0.0, cd) })
        })
    }

    #[test]
    fn flat_space_has_no_christoffels() {
        let g = MetricField::euclidean(3);
        assert_eq!(christoffel(&g, &[0.1, 0.2, 0.3]).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn stereographic_origin_is_critical() {
        let g = stereo_sphere(2);
        assert!(christoffel(&g, &[0.0, 0.0]).unwrap().max_abs() < 1e-15);
        // finite-difference oracle on 4/(1+|x|²)² at a generic point
        let p = [0.3, -0.2];
        let gam = christoffel(&g, &p).unwrap();
        let h = 1e-5;
        let conf = |x: f64, y: f64| 4.0 / (1.0 + x * x + y * y).powi(2);
        let d0 = (conf(p[0] + h, p[1]) - conf(p[0] - h, p[1])) / (2.0 * h);
        let c = conf(p[0], p[1]);
        // Γ^0_00 = ∂_0 c / (2c)
        assert_abs_diff_eq!(gam[(0, 0, 0)], d0 / (2.0 * c), epsilon = 1e-8);
    }

    #[test]
    fn sphere_curvature_is_constant() {
        for n in 2..=6 {
            let g = stereo_sphere(n);
            let p: Vec<f64> = (0..n).map(|i| 0.1 * i as f64 - 0.2).collect();
            let c = curvature(&g, &p).unwrap();
            let err = (&c.ricci - &c.g * (n as f64 - 1.0)).amax();
            assert!(err < 1e-10, "n={n} err={err}");
            assert_abs_diff_eq!(c.scalar, (n * (n - 1)) as f64, epsilon = 1e-9);
            assert!(c.symmetry_residual() < 1e-10);
            assert!(c.bianchi_residual() < 1e-10);
            assert!(c.ricci_trace_residual() < 1e-12);
        }
    }

    #[test]
    fn obata_identity_on_sphere() {
        let n = 4;
        let g = stereo_sphere(n);
        // last ambient coordinate (|u|²−1)/(|u|²+1)
        let b = ScalarField::new(|x: &[Jet2]| {
            let mut s = Jet2::constant(0.0, x[0].dim());
            for xi in x {
                s += *xi * *xi;
            }
            (s - 1.0) / (s + 1.0)
        });
        let p = [0.3, -0.5, 0.2, 0.7];
        let h = hessian(&b, &g, &p).unwrap();
        let gv = g.values_at(&p).unwrap();
        let bv = b.value_at(&p);
        assert!((&h + &gv * bv).amax() < 1e-12);
        let lap = laplacian(&b, &g, &p).unwrap();
        assert_abs_diff_eq!(lap, n as f64 * bv, epsilon = 1e-12);
    }

    #[test]
    fn metric_is_parallel() {
        let g = stereo_sphere(3);
        let t = TensorField2::from_metric(&g);
        let nabla = covariant_derivative(&t, &g, &[0.4, 0.1, -0.3]).unwrap();
        assert!(nabla.max_abs() < 1e-13);
    }

    #[test]
    fn singular_and_indefinite_metrics_are_rejected() {
        let sing = MetricField::new(2, |x: &[Jet2]| {
            let cd = x[0].dim();
            JetMat::from_fn(2, |i, j| Jet2::constant(if i == 0 && j == 0 { 1.0 } else { 0.0 }, cd))
        });
        assert!(matches!(christoffel(&sing, &[0.0, 0.0]), Err(GeomError::SingularMetric(_))));
        let indef = MetricField::new(2, |x: &[Jet2]| {
            let cd = x[0].dim();
            JetMat::from_fn(2, |i, j| Jet2::constant(if i != j { 0.0 } else if i == 0 { 1.0 } else { -1.0 }, cd))
        });
        assert!(matches!(curvature(&indef, &[0.0, 0.0]), Err(GeomError::NotPositiveDefinite(_))));
        let boxed = MetricField::euclidean(2).with_domain(|p| p[0] > 0.0);
        assert!(matches!(curvature(&boxed, &[-1.0, 0.0]), Err(GeomError::OutsideDomain(_))));
    }

    #[test]
    fn frame_norm_is_coordinate_free() {
        let g = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![4.0, 9.0]));
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![4.0, -18.0]));
        assert_abs_diff_eq!(frame_operator_norm(&a, &g), 2.0, epsilon = 1e-14);
        assert_eq!(frame_eigenvalues(&a, &g), vec![-2.0, 1.0]);
    }
}
