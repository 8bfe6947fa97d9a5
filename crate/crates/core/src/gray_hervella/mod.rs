//! Almost Hermitian structures: fundamental form, Nijenhuis tensor, the
//! Gray–Hervella splitting of `∇Ω` and the Lee form.

pub mod octonion;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::jets::{lift_point, lift_values, Jet2, JetMat};
use crate::metric_builders::{conformal_rescale, EndomorphismFn};
use crate::tensor_core::{
    covariant_derivative_of, inner_product, metric_contraction, Form, FormField, JetForm, MetricField,
    PointGeometry, ScalarField, Tensor3, TensorKind,
};

pub use octonion::{cross7, octonionic_s6, FANO_TRIPLES};

/// Tolerance for `J² = −1` and `h(J·,J·) = h`.
pub const STRUCTURE_TOL: f64 = 1e-9;

/// Step for differentiating the Lee form.
pub const LEE_FD_STEP: f64 = 1e-3;

/// A metric together with a compatible almost complex structure `J^i_j`.
#[derive(Clone)]
pub struct AlmostHermitianField {
    pub metric: MetricField,
    j: EndomorphismFn,
}

impl fmt::Debug for AlmostHermitianField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlmostHermitianField(dim {})", self.metric.dim())
    }
}

/// `J` on `ℝ^{2m}` with coordinates `(x₁, y₁, …, x_m, y_m)`: `J∂x = ∂y`, `J∂y = −∂x`.
pub fn standard_complex_structure(dim: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(dim, dim);
    for k in 0..dim / 2 {
        j[(2 * k + 1, 2 * k)] = 1.0;
        j[(2 * k, 2 * k + 1)] = -1.0;
    }
    j
}

impl AlmostHermitianField {
    pub fn new(metric: MetricField, j: impl Fn(&[Jet2]) -> JetMat + Send + Sync + 'static) -> Self {
        Self { metric, j: Arc::new(j) }
    }

    /// A structure whose `J` has constant components in the chart.
    pub fn constant_j(metric: MetricField, j: DMatrix<f64>) -> Self {
        let n = j.nrows();
        Self::new(metric, move |x: &[Jet2]| {
            let cd = x[0].dim();
            JetMat::from_fn(n, |a, b| Jet2::constant(j[(a, b)], cd))
        })
    }

    /// Flat `ℂ^m` as `ℝ^{2m}` with the standard `J`.
    pub fn flat_kahler(m: usize) -> Self {
        Self::constant_j(MetricField::euclidean(2 * m), standard_complex_structure(2 * m))
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn j_handle(&self) -> EndomorphismFn {
        self.j.clone()
    }

    pub fn j_jets(&self, x: &[Jet2]) -> JetMat {
        (self.j)(x)
    }

    pub fn j_at(&self, p: &[f64]) -> DMatrix<f64> {
        self.j_jets(&lift_values(p)).values()
    }

    /// Same `J` over a different metric.
    pub fn with_metric(&self, metric: MetricField) -> Self {
        Self { metric, j: self.j.clone() }
    }

    /// `Ω_ij = h_ik J^k_j` as jet components.
    pub fn omega_jets(&self, x: &[Jet2]) -> JetMat {
        self.metric.eval_jets(x).matmul(&self.j_jets(x))
    }

    /// The fundamental form as a form field.
    pub fn omega_field(&self) -> FormField {
        let s = self.clone();
        let n = self.dim();
        FormField::new(n, 2, move |x: &[Jet2]| {
            let om = s.omega_jets(x);
            let mut f = JetForm::zeros(n, 2, x[0].dim());
            for a in 0..n {
                for b in a + 1..n {
                    f.set(&[a, b], om[(a, b)]);
                }
            }
            f
        })
    }

    /// `(max |J² + 1|, max |JᵀhJ − h| / max |h|)` at `p`.
    pub fn validate_at(&self, p: &[f64]) -> Result<(f64, f64)> {
        let h = self.metric.values_at(p)?;
        let j = self.j_at(p);
        let n = self.dim();
        let j2 = (&j * &j + DMatrix::identity(n, n)).amax();
        let compat = (j.transpose() * &h * &j - &h).amax() / h.amax();
        Ok((j2, compat))
    }

    fn check_at(&self, p: &[f64]) -> Result<()> {
        let (j2, compat) = self.validate_at(p)?;
        if !(j2 <= STRUCTURE_TOL) {
            return Err(GeomError::StructureViolation { check: "J² = −1".into(), residual: j2, tolerance: STRUCTURE_TOL });
        }
        if !(compat <= STRUCTURE_TOL) {
            return Err(GeomError::StructureViolation {
                check: "h(J·,J·) = h".into(),
                residual: compat,
                tolerance: STRUCTURE_TOL,
            });
        }
        Ok(())
    }

    /// Pointwise data needed by everything in this module.
    pub fn point(&self, p: &[f64]) -> Result<HermitianPoint> {
        self.check_at(p)?;
        let geom = PointGeometry::new(&self.metric, p)?;
        let x = lift_point(p)?;
        let jj = self.j_jets(&x);
        let om = self.metric.eval_jets(&x).matmul(&jj);
        let nabla_j = covariant_derivative_of(TensorKind::Mixed11, &jj, &geom);
        let nabla_omega = covariant_derivative_of(TensorKind::Covariant02, &om, &geom);
        let n = p.len();
        let d_omega = Tensor3::from_fn(n, |a, b, c| {
            nabla_omega[(a, b, c)] + nabla_omega[(b, c, a)] + nabla_omega[(c, a, b)]
        });
        Ok(HermitianPoint { j: jj.values(), omega: om.values(), geom, nabla_j, nabla_omega, d_omega })
    }
}

/// `J`, `Ω`, `∇J`, `∇Ω` and `dΩ` at one point. Derivative index first:
/// `nabla_omega[(k, i, j)] = (∇_k Ω)_ij`.
#[derive(Clone, Debug)]
pub struct HermitianPoint {
    pub geom: PointGeometry,
    pub j: DMatrix<f64>,
    pub omega: DMatrix<f64>,
    pub nabla_j: Tensor3,
    pub nabla_omega: Tensor3,
    /// `dΩ` as a totally skew array.
    pub d_omega: Tensor3,
}

impl HermitianPoint {
    pub fn dim(&self) -> usize {
        self.j.nrows()
    }

    pub fn omega_form(&self) -> Form<f64> {
        two_form(&self.omega)
    }

    pub fn d_omega_form(&self) -> Form<f64> {
        three_form(&self.d_omega)
    }

    /// `T(…, J·, …)` with `J` inserted into each slot flagged in `slots`.
    fn with_j(&self, t: &Tensor3, slots: [bool; 3]) -> Tensor3 {
        let n = self.dim();
        let mut cur = t.clone();
        for (s, &on) in slots.iter().enumerate() {
            if !on {
                continue;
            }
            cur = Tensor3::from_fn(n, |a, b, c| {
                let idx = [a, b, c];
                (0..n)
                    .map(|m| {
                        let mut k = idx;
                        k[s] = m;
                        cur[(k[0], k[1], k[2])] * self.j[(m, idx[s])]
                    })
                    .sum()
            });
        }
        cur
    }

    /// Projection of a 3-form onto its `(3,0)+(0,3)` part.
    pub fn type30_part(&self, psi: &Tensor3) -> Tensor3 {
        let a = self.with_j(psi, [false, true, true]);
        let b = self.with_j(psi, [true, false, true]);
        let c = self.with_j(psi, [true, true, false]);
        psi.sub(&a).sub(&b).sub(&c).scale(0.25)
    }

    /// `θ = Ω⌟dΩ / (2(m−1))`, normalized so that `θ = df` for `e^{2f}` times a Kähler metric.
    pub fn lee_form(&self) -> Result<Vec<f64>> {
        let m = self.dim() / 2;
        let c = metric_contraction(&self.omega_form(), &self.d_omega_form(), &self.geom.ginv)?;
        Ok(c.coeffs().iter().map(|v| v / (2.0 * (m as f64 - 1.0))).collect())
    }

    /// The `∇Ω` of a conformally Kähler structure with Lee form `θ`:
    /// `L(θ)_xyz = −θ_y Ω_xz − θ_z Ω_yx + h_xy Ω(θ♯, z) + h_xz Ω(y, θ♯)`.
    pub fn lee_injection(&self, theta: &[f64]) -> Tensor3 {
        let n = self.dim();
        let sharp: Vec<f64> = (0..n).map(|i| (0..n).map(|k| self.geom.ginv[(i, k)] * theta[k]).sum()).collect();
        let om_sharp_left: Vec<f64> = (0..n).map(|z| (0..n).map(|m| sharp[m] * self.omega[(m, z)]).sum()).collect();
        let h = &self.geom.g;
        Tensor3::from_fn(n, |x, y, z| {
            -theta[y] * self.omega[(x, z)] - theta[z] * self.omega[(y, x)] + h[(x, y)] * om_sharp_left[z]
                - h[(x, z)] * om_sharp_left[y]
        })
    }

    /// `N(X,Y,Z) = h(N(X,Y), Z)` with
    /// `N(X,Y) = (∇_{JX}J)Y − (∇_{JY}J)X − J(∇_X J)Y + J(∇_Y J)X`.
    pub fn nijenhuis(&self) -> Tensor3 {
        let n = self.dim();
        let (j, dj) = (&self.j, &self.nabla_j);
        let mut up = Tensor3::zeros(n);
        for x in 0..n {
            for y in 0..n {
                for i in 0..n {
                    let mut v = 0.0;
                    for k in 0..n {
                        v += j[(k, x)] * dj[(k, i, y)] - j[(k, y)] * dj[(k, i, x)];
                        v += -j[(i, k)] * dj[(x, k, y)] + j[(i, k)] * dj[(y, k, x)];
                    }
                    up[(x, y, i)] = v;
                }
            }
        }
        let h = &self.geom.g;
        Tensor3::from_fn(n, |x, y, z| (0..n).map(|i| h[(z, i)] * up[(x, y, i)]).sum())
    }

    /// Symmetric part of `(X, Y) ↦ (∇_X Ω)(Y, ·)`; vanishes exactly for nearly Kähler structures.
    pub fn nearly_kahler_defect(&self) -> f64 {
        let t = &self.nabla_omega;
        let s = Tensor3::from_fn(self.dim(), |x, y, z| 0.5 * (t[(x, y, z)] + t[(y, x, z)]));
        s.norm_sq(&self.geom.ginv).max(0.0).sqrt()
    }
}

fn two_form(m: &DMatrix<f64>) -> Form<f64> {
    let n = m.nrows();
    let mut f = Form::<f64>::zeros(n, 2, 0);
    for a in 0..n {
        for b in a + 1..n {
            f.set(&[a, b], m[(a, b)]);
        }
    }
    f
}

fn three_form(t: &Tensor3) -> Form<f64> {
    let n = t.dim();
    let mut f = Form::<f64>::zeros(n, 3, 0);
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                f.set(&[a, b, c], t[(a, b, c)]);
            }
        }
    }
    f
}

/// The four Gray–Hervella components of `∇Ω` at a point.
#[derive(Clone, Debug)]
pub struct GHComponents {
    pub w1_norm: f64,
    pub w2_norm: f64,
    pub w3_norm: f64,
    pub w4_norm: f64,
    /// `‖∇Ω‖²`, all indices raised.
    pub nabla_norm_sq: f64,
    pub lee: Vec<f64>,
    pub n1: Tensor3,
    pub n2: Tensor3,
    pub parts: [Tensor3; 4],
}

impl GHComponents {
    pub fn norms(&self) -> [f64; 4] {
        [self.w1_norm, self.w2_norm, self.w3_norm, self.w4_norm]
    }

    /// `|‖∇Ω‖² − Σ wᵢ²|`.
    pub fn orthogonality_residual(&self) -> f64 {
        (self.nabla_norm_sq - self.norms().iter().map(|w| w * w).sum::<f64>()).abs()
    }

    /// Largest `|⟨Wᵢ, Wⱼ⟩|` over `i ≠ j`.
    pub fn max_cross_term(&self, ginv: &DMatrix<f64>) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for k in i + 1..4 {
                worst = worst.max(self.parts[i].inner(&self.parts[k], ginv).abs());
            }
        }
        worst
    }

    /// `(max |n1 + its transpositions|, max |cyclic sum of n2|)`: both vanish by construction.
    pub fn nijenhuis_invariants(&self) -> (f64, f64) {
        let n = self.n1.dim();
        let skew = Tensor3::from_fn(n, |a, b, c| {
            (self.n1[(a, b, c)] + self.n1[(b, a, c)]).abs()
                + (self.n1[(a, b, c)] + self.n1[(a, c, b)]).abs()
        });
        let cyc = Tensor3::from_fn(n, |a, b, c| self.n2[(a, b, c)] + self.n2[(b, c, a)] + self.n2[(c, a, b)]);
        (skew.max_abs(), cyc.max_abs())
    }
}

/// `Ω` at `p`, after checking the structure invariants there.
pub fn fundamental_form(s: &AlmostHermitianField, p: &[f64]) -> Result<Form<f64>> {
    s.check_at(p)?;
    let h = s.metric.values_at(p)?;
    Ok(two_form(&(h * s.j_at(p))))
}

/// `(N₁, N₂)`: the totally skew part of the lowered Nijenhuis tensor and the remainder.
pub fn nijenhuis_split(s: &AlmostHermitianField, p: &[f64]) -> Result<(Tensor3, Tensor3)> {
    let hp = s.point(p)?;
    Ok(split_nijenhuis(&hp.nijenhuis()))
}

fn split_nijenhuis(nij: &Tensor3) -> (Tensor3, Tensor3) {
    let n = nij.dim();
    let n1 = Tensor3::from_fn(n, |a, b, c| (nij[(a, b, c)] + nij[(b, c, a)] + nij[(c, a, b)]) / 3.0);
    let n2 = nij.sub(&n1);
    (n1, n2)
}

/// Splits `∇Ω = W₁ + W₂ + W₃ + W₄`:
/// `W₁ = ⅓ (dΩ)^{(3,0)+(0,3)}`, `W₄ = L(θ)`, the `J`-invariant half of `∇Ω` is `W₃ + W₄`
/// and the anti-invariant half is `W₁ + W₂`.
pub fn gh_decompose(s: &AlmostHermitianField, p: &[f64]) -> Result<GHComponents> {
    let dim = s.dim();
    if dim < 6 || dim % 2 != 0 {
        return Err(GeomError::DimensionUnsupported(dim));
    }
    let hp = s.point(p)?;
    decompose_point(&hp)
}

pub fn decompose_point(hp: &HermitianPoint) -> Result<GHComponents> {
    let ginv = &hp.geom.ginv;
    let nab = &hp.nabla_omega;
    let w1 = hp.type30_part(&hp.d_omega).scale(1.0 / 3.0);
    let flipped = hp.with_j(nab, [true, true, false]);
    let invariant = nab.add(&flipped).scale(0.5);
    let anti = nab.sub(&flipped).scale(0.5);
    let lee = hp.lee_form()?;
    let w4 = hp.lee_injection(&lee);
    let w3 = invariant.sub(&w4);
    let w2 = anti.sub(&w1);
    let norm = |t: &Tensor3| t.norm_sq(ginv).max(0.0).sqrt();
    let (n1, n2) = split_nijenhuis(&hp.nijenhuis());
    Ok(GHComponents {
        w1_norm: norm(&w1),
        w2_norm: norm(&w2),
        w3_norm: norm(&w3),
        w4_norm: norm(&w4),
        nabla_norm_sq: nab.norm_sq(ginv),
        lee,
        n1,
        n2,
        parts: [w1, w2, w3, w4],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum GHClass {
    W1,
    W2,
    W3,
    W4,
}

impl fmt::Display for GHClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GHClass::W1 => "W1",
            GHClass::W2 => "W2",
            GHClass::W3 => "W3",
            GHClass::W4 => "W4",
        };
        f.write_str(s)
    }
}

/// A set of Gray–Hervella classes; empty means Kähler.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GHType(pub BTreeSet<GHClass>);

impl GHType {
    pub fn of(classes: &[GHClass]) -> Self {
        Self(classes.iter().copied().collect())
    }

    pub fn contains(&self, c: GHClass) -> bool {
        self.0.contains(&c)
    }
}

impl fmt::Display for GHType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("Kahler");
        }
        let parts: Vec<String> = self.0.iter().map(GHClass::to_string).collect();
        f.write_str(&parts.join("+"))
    }
}

/// Per-class maxima of the component norms over `points`.
pub fn component_maxima(s: &AlmostHermitianField, points: &[Vec<f64>]) -> Result<[f64; 4]> {
    let mut worst = [0.0f64; 4];
    for p in points {
        let c = gh_decompose(s, p)?;
        for (w, v) in worst.iter_mut().zip(c.norms()) {
            *w = w.max(v);
        }
    }
    Ok(worst)
}

/// Classes whose component norm exceeds `tol` somewhere on `points`.
pub fn classify_type(s: &AlmostHermitianField, points: &[Vec<f64>], tol: f64) -> Result<GHType> {
    if points.len() < 10 {
        return Err(GeomError::InvalidParameter(format!("classification needs at least 10 points, got {}", points.len())));
    }
    let maxima = component_maxima(s, points)?;
    let classes = [GHClass::W1, GHClass::W2, GHClass::W3, GHClass::W4];
    Ok(GHType(classes.iter().zip(maxima).filter(|(_, m)| *m > tol).map(|(c, _)| *c).collect()))
}

/// `(e^{2f} h, J)`.
pub fn conformal_transform(s: &AlmostHermitianField, f: &ScalarField) -> AlmostHermitianField {
    s.with_metric(conformal_rescale(&s.metric, f))
}

pub fn lee_form(s: &AlmostHermitianField, p: &[f64]) -> Result<Vec<f64>> {
    s.point(p)?.lee_form()
}

/// `∂_axis θ` by a fourth-order central difference.
fn lee_partial(s: &AlmostHermitianField, p: &[f64], axis: usize) -> Result<Vec<f64>> {
    let h = LEE_FD_STEP;
    let mut q = p.to_vec();
    let mut at = |shift: f64| -> Result<Vec<f64>> {
        q[axis] = p[axis] + shift;
        lee_form(s, &q)
    };
    let (m2, m1, p1, p2) = (at(-2.0 * h)?, at(-h)?, at(h)?, at(2.0 * h)?);
    Ok((0..p.len()).map(|i| (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h)).collect())
}

fn lee_jacobian(s: &AlmostHermitianField, p: &[f64]) -> Result<DMatrix<f64>> {
    let n = p.len();
    let mut d = DMatrix::zeros(n, n);
    for k in 0..n {
        let col = lee_partial(s, p, k)?;
        for i in 0..n {
            d[(k, i)] = col[i];
        }
    }
    Ok(d)
}

/// `dθ` at `p` (finite differences of the pointwise Lee form).
pub fn lee_differential(s: &AlmostHermitianField, p: &[f64]) -> Result<Form<f64>> {
    let d = lee_jacobian(s, p)?;
    Ok(two_form(&(&d - d.transpose())))
}

/// Largest `|dθ|` over `points`.
pub fn lee_form_closedness(s: &AlmostHermitianField, points: &[Vec<f64>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in points {
        let dtheta = lee_differential(s, p)?;
        let ginv = s.metric.geometry_at(p)?.ginv;
        worst = worst.max(inner_product(&dtheta, &dtheta, &ginv)?.max(0.0).sqrt());
    }
    Ok(worst)
}

/// Largest `|∇θ|` over `points`.
pub fn lee_form_parallelism(s: &AlmostHermitianField, points: &[Vec<f64>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in points {
        let d = lee_jacobian(s, p)?;
        let geom = s.metric.geometry_at(p)?;
        let theta = lee_form(s, p)?;
        let n = p.len();
        let nab = DMatrix::from_fn(n, n, |k, i| {
            d[(k, i)] - (0..n).map(|m| geom.gamma[(m, k, i)] * theta[m]).sum::<f64>()
        });
        let norm = (&geom.ginv * &nab * &geom.ginv).component_mul(&nab).sum();
        worst = worst.max(norm.max(0.0).sqrt());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_core::{exterior_derivative, wedge};

    fn p6() -> Vec<f64> {
        vec![0.3, -0.2, 0.5, 0.1, -0.4, 0.25]
    }

    /// `J = A J₀ A⁻¹`, `h = A⁻ᵀA⁻¹` with a point-dependent `A`: generically all four classes.
    pub(crate) fn generic_structure() -> AlmostHermitianField {
        let a = |x: &[Jet2]| {
            let cd = x[0].dim();
            JetMat::from_fn(6, |i, j| {
                let base = if i == j { 1.0 } else { 0.0 };
                let wobble = (x[(i + 2 * j) % 6] * (0.3 + 0.1 * i as f64) + 0.2 * j as f64).sin() * 0.25;
                wobble + Jet2::constant(base, cd)
            })
        };
        let j0 = standard_complex_structure(6);
        let metric = MetricField::new(6, move |x: &[Jet2]| {
            let ainv = a(x).inverse().expect("A invertible near the origin");
            ainv.transpose().matmul(&ainv)
        });
        AlmostHermitianField::new(metric, move |x: &[Jet2]| {
            let am = a(x);
            let cd = x[0].dim();
            let jm = JetMat::from_fn(6, |i, j| Jet2::constant(j0[(i, j)], cd));
            am.matmul(&jm).matmul(&am.inverse().expect("A invertible near the origin"))
        })
    }

    #[test]
    fn flat_kahler() {
        let s = AlmostHermitianField::flat_kahler(3);
        let om = fundamental_form(&s, &p6()).unwrap();
        assert_eq!(om.get(&[0, 1]), -1.0);
        let c = gh_decompose(&s, &p6()).unwrap();
        assert!(c.norms().iter().all(|w| *w < 1e-12));
        let (n1, n2) = nijenhuis_split(&s, &p6()).unwrap();
        assert!(n1.max_abs() < 1e-14 && n2.max_abs() < 1e-14);
        assert!(exterior_derivative(&s.omega_field(), &p6()).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn invariant_violations_are_reported() {
        let bad = AlmostHermitianField::constant_j(MetricField::euclidean(6), DMatrix::identity(6, 6));
        assert!(matches!(fundamental_form(&bad, &p6()), Err(GeomError::StructureViolation { .. })));
        let four = AlmostHermitianField::flat_kahler(2);
        assert!(matches!(gh_decompose(&four, &[0.0; 4]), Err(GeomError::DimensionUnsupported(4))));
    }

    #[test]
    fn d_omega_matches_exterior_derivative() {
        let s = generic_structure();
        let hp = s.point(&p6()).unwrap();
        let direct = exterior_derivative(&s.omega_field(), &p6()).unwrap();
        assert!(hp.d_omega_form().sub(&direct).max_abs() < 1e-12);
    }

    #[test]
    fn generic_structure_is_orthogonally_split() {
        let s = generic_structure();
        for p in [p6(), vec![-0.1, 0.2, 0.0, 0.4, 0.3, -0.3]] {
            let (j2, compat) = s.validate_at(&p).unwrap();
            assert!(j2 < 1e-12 && compat < 1e-12);
            let c = gh_decompose(&s, &p).unwrap();
            assert!(c.norms().iter().all(|w| *w > 1e-3), "{:?}", c.norms());
            assert!(c.orthogonality_residual() < 1e-10);
            let ginv = s.metric.geometry_at(&p).unwrap().ginv;
            assert!(c.max_cross_term(&ginv) < 1e-10);
            let (skew, cyc) = c.nijenhuis_invariants();
            assert!(skew < 1e-12 && cyc < 1e-12);
        }
    }

    #[test]
    fn conformally_flat_kahler_is_pure_w4() {
        let f = ScalarField::coordinate(0);
        let s = conformal_transform(&AlmostHermitianField::flat_kahler(3), &f);
        let c = gh_decompose(&s, &p6()).unwrap();
        assert!(c.w4_norm > 0.1);
        assert!(c.w1_norm < 1e-10 && c.w2_norm < 1e-10 && c.w3_norm < 1e-10);
        assert!((c.lee[0] - 1.0).abs() < 1e-12 && c.lee[1..].iter().all(|v| v.abs() < 1e-12));
        // dΩ̃ = 2 df ∧ Ω̃
        let om = s.point(&p6()).unwrap().omega_form();
        let expect = wedge(&Form::from_covector(&[2.0, 0.0, 0.0, 0.0, 0.0, 0.0]), &om);
        assert!(s.point(&p6()).unwrap().d_omega_form().sub(&expect).max_abs() < 1e-12);
        assert!(lee_form_closedness(&s, &[p6()]).unwrap() < 1e-7);
    }

    #[test]
    fn lee_shift_under_rescaling() {
        let s = generic_structure();
        let f = ScalarField::new(|x: &[Jet2]| (x[1] * 0.7).sin() + x[3].sqr() * 0.3);
        let t = conformal_transform(&s, &f);
        let p = p6();
        let (a, b) = (lee_form(&s, &p).unwrap(), lee_form(&t, &p).unwrap());
        let df = f.at(&p).unwrap();
        for i in 0..6 {
            assert!((b[i] - a[i] - df.d(i)).abs() < 1e-10);
        }
    }
}
