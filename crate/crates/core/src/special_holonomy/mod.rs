//! Sasaki–Einstein `S⁵`, its Kähler cone, the `G₂` cylinder over the cone, the
//! induced nearly Kähler sine-cone and the two structures on the cylinder `M × ℝ`.

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::gray_hervella::AlmostHermitianField;
use crate::jets::{lift_values, Jet2, JetMat};
use crate::metric_builders::{
    cone_metric, cone_over_join, cone_product_map, cylinder_to_cone, cylinder_to_sine_cone, product_cylinder,
    product_of_cones, pullback_endomorphism, pullback_form, pullback_metric, round_sphere,
    stereographic_embedding,
};
use crate::tensor_core::{
    curvature, exterior_derivative, frame_operator_norm, hodge_star, volume_form, Form, FormField, JetForm,
    MetricField, Orientation,
};

/// `ψ_re ∧ ψ_im = PSI_NORMALIZATION · (2/3) ω³`, fixed by the flat `ℝ⁶` case.
pub const PSI_NORMALIZATION: f64 = 1.0;

/// One named residual of a structure check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedResidual {
    pub name: String,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureReport {
    pub checks: Vec<NamedResidual>,
    pub tolerance: f64,
}

impl StructureReport {
    fn new(tolerance: f64) -> Self {
        Self { checks: Vec::new(), tolerance }
    }

    fn record(&mut self, name: &str, value: f64) {
        match self.checks.iter_mut().find(|c| c.name == name) {
            Some(c) => c.residual = c.residual.max(value),
            None => self.checks.push(NamedResidual { name: name.to_string(), residual: value }),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.residual)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.residual <= self.tolerance)
    }
}

#[derive(Clone, Debug)]
struct ComplexForm {
    re: JetForm,
    im: JetForm,
}

impl ComplexForm {
    fn wedge(&self, o: &ComplexForm) -> ComplexForm {
        ComplexForm {
            re: self.re.wedge(&o.re).sub(&self.im.wedge(&o.im)),
            im: self.re.wedge(&o.im).add(&self.im.wedge(&o.re)),
        }
    }

    fn times(&self, (a, b): (Jet2, Jet2)) -> ComplexForm {
        ComplexForm {
            re: self.re.scale(a).sub(&self.im.scale(b)),
            im: self.im.scale(a).add(&self.re.scale(b)),
        }
    }

    fn add(&self, o: &ComplexForm) -> ComplexForm {
        ComplexForm { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    fn sub(&self, o: &ComplexForm) -> ComplexForm {
        ComplexForm { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }
}

/// Contact form and transverse `SU(2)` forms of a 5-dimensional Sasaki manifold.
#[derive(Clone, Debug)]
pub struct SasakiSU2Structure {
    pub base: MetricField,
    pub eta: FormField,
    pub omega1: FormField,
    pub omega2: FormField,
    pub omega3: FormField,
}

impl SasakiSU2Structure {
    /// Same forms over a different metric (for controls).
    pub fn with_base(&self, base: MetricField) -> Self {
        Self { base, ..self.clone() }
    }

    /// Reeb field `ξ = g⁻¹η`.
    pub fn xi_at(&self, p: &[f64]) -> Result<Vec<f64>> {
        let ginv = self.base.geometry_at(p)?.ginv;
        let eta = self.eta.eval_jets(&lift_values(p)).value();
        Ok((0..p.len()).map(|i| (0..p.len()).map(|k| ginv[(i, k)] * eta.get(&[k])).sum()).collect())
    }
}

/// Round unit `S⁵ ⊂ ℂ³` in the stereographic chart, with ambient coordinates
/// `(x₁, y₁, x₂, y₂, x₃, y₃)`, `η = Σ(x dy − y dx)`, `ω₁ = −Σ dx∧dy` and
/// `ω₂ + iω₃ = conj(z₁ dz₂∧dz₃ − z₂ dz₁∧dz₃ + z₃ dz₁∧dz₂)`, all restricted.
pub fn round_s5_sasaki() -> SasakiSU2Structure {
    let emb = stereographic_embedding(5);
    let eta_amb = FormField::new(6, 1, |x: &[Jet2]| {
        let mut f = JetForm::zeros(6, 1, x[0].dim());
        for k in 0..3 {
            f.set(&[2 * k + 1], x[2 * k]);
            f.set(&[2 * k], -x[2 * k + 1]);
        }
        f
    });
    let omega1_amb = FormField::new(6, 2, |x: &[Jet2]| {
        let mut f = JetForm::zeros(6, 2, x[0].dim());
        for k in 0..3 {
            f.set(&[2 * k, 2 * k + 1], x[0].constant_like(-1.0));
        }
        f
    });
    let holo = |x: &[Jet2]| {
        let cd = x[0].dim();
        let dz = |k: usize| ComplexForm { re: JetForm::basis(6, 2 * k, cd), im: JetForm::basis(6, 2 * k + 1, cd) };
        let z = |k: usize| (x[2 * k], x[2 * k + 1]);
        let t1 = dz(1).wedge(&dz(2)).times(z(0));
        let t2 = dz(0).wedge(&dz(2)).times(z(1));
        let t3 = dz(0).wedge(&dz(1)).times(z(2));
        t1.sub(&t2).add(&t3)
    };
    let omega2_amb = FormField::new(6, 2, move |x: &[Jet2]| holo(x).re);
    let omega3_amb = FormField::new(6, 2, move |x: &[Jet2]| holo(x).im.scale_f64(-1.0));
    SasakiSU2Structure {
        // oriented so that η∧ω₁∧ω₁ = 2 vol
        base: round_sphere(5, 1.0).with_orientation(Some(Orientation::Positive)),
        eta: pullback_form(&emb, &eta_amb),
        omega1: pullback_form(&emb, &omega1_amb),
        omega2: pullback_form(&emb, &omega2_amb),
        omega3: pullback_form(&emb, &omega3_amb),
    }
}

fn form_norm(f: &Form<f64>) -> f64 {
    f.max_abs()
}

/// All `SasakiSU2Structure` invariants and `Ric = 4g` at the given points.
pub fn se_verify(s: &SasakiSU2Structure, points: &[Vec<f64>], tol: f64) -> Result<StructureReport> {
    let mut rep = StructureReport::new(tol);
    for p in points {
        let x = lift_values(p);
        let eta = s.eta.eval_jets(&x).value();
        let om = [&s.omega1, &s.omega2, &s.omega3].map(|w| w.eval_jets(&x).value());
        let xi = s.xi_at(p)?;
        rep.record("eta(xi) = 1", (xi.iter().enumerate().map(|(i, v)| v * eta.get(&[i])).sum::<f64>() - 1.0).abs());
        let xi_om = om.iter().map(|w| form_norm(&w.interior(&xi))).fold(0.0, f64::max);
        rep.record("xi _| omega_i = 0", xi_om);
        let top = om[0].wedge(&om[0]);
        let mut pair: f64 = 0.0;
        for i in 0..3 {
            for j in i..3 {
                let w = om[i].wedge(&om[j]);
                let expect = if i == j { top.clone() } else { top.scale_f64(0.0) };
                pair = pair.max(form_norm(&w.sub(&expect)));
            }
        }
        rep.record("omega_i ^ omega_j = delta_ij omega_1^2", pair);
        let g = s.base.values_at(p)?;
        let vol = volume_form(&g, s.base.orientation())?;
        rep.record("eta ^ omega_1^2 = 2 vol", form_norm(&eta.wedge(&top).sub(&vol.scale_f64(2.0))));
        let d_eta = exterior_derivative(&s.eta, p)?;
        rep.record("d eta = -2 omega_1", form_norm(&d_eta.add(&om[0].scale_f64(2.0))));
        let d2 = exterior_derivative(&s.omega2, p)?;
        rep.record("d omega_2 = 3 eta ^ omega_3", form_norm(&d2.sub(&eta.wedge(&om[2]).scale_f64(3.0))));
        let d3 = exterior_derivative(&s.omega3, p)?;
        rep.record("d omega_3 = -3 eta ^ omega_2", form_norm(&d3.add(&eta.wedge(&om[1]).scale_f64(3.0))));
        let c = curvature(&s.base, p)?;
        rep.record("Ric = 4g", frame_operator_norm(&(&c.ricci - &c.g * 4.0), &c.g));
    }
    Ok(rep)
}

/// `g + (c² − 1) η⊗η`: the Reeb direction stretched by `c`.
pub fn squashed_metric(s: &SasakiSU2Structure, c: f64) -> MetricField {
    let (g, eta) = (s.base.clone(), s.eta.clone());
    let n = s.base.dim();
    let k = c * c - 1.0;
    MetricField::new(n, move |x: &[Jet2]| {
        let m = g.eval_jets(x);
        let e = eta.eval_jets(x);
        JetMat::from_fn(n, |i, j| m[(i, j)] + e.get(&[i]) * e.get(&[j]) * k)
    })
    .with_orientation(s.base.orientation())
}

/// Round `S⁵` forms over the squashed metric `g + 3η⊗η`: Einstein fails and so do the structure equations.
pub fn squashed_s5() -> SasakiSU2Structure {
    let s = round_s5_sasaki();
    let g = squashed_metric(&s, 2.0);
    s.with_base(g)
}

fn lift_base_form(f: &FormField, dim: usize) -> impl Fn(&[Jet2]) -> JetForm + Send + Sync + 'static {
    let f = f.clone();
    let n = f.dim();
    let map: Vec<usize> = (0..n).collect();
    move |x: &[Jet2]| f.eval_jets(&x[..n]).embed(dim, &map)
}

/// `SU(3)` data on the cone `r²g + dr²` (radial coordinate `cone_r` last):
/// `ω = r²ω₁ − r dr∧η`, `Ψ = r²(ω₂ + iω₃)∧(dr − i r η)`.
#[derive(Clone, Debug)]
pub struct ConeSU3 {
    pub cone_metric: MetricField,
    pub omega: FormField,
    pub psi_re: FormField,
    pub psi_im: FormField,
}

pub fn kahler_cone(s: &SasakiSU2Structure) -> ConeSU3 {
    let n = s.base.dim();
    let d = n + 1;
    let eta = lift_base_form(&s.eta, d);
    let w1 = lift_base_form(&s.omega1, d);
    let w2 = lift_base_form(&s.omega2, d);
    let w3 = lift_base_form(&s.omega3, d);
    let omega = FormField::new(d, 2, move |x: &[Jet2]| {
        let r = x[n];
        let dr = JetForm::basis(d, n, x[0].dim());
        w1(x).scale(r.sqr()).sub(&dr.wedge(&eta(x)).scale(r))
    });
    let eta = lift_base_form(&s.eta, d);
    let psi = std::sync::Arc::new(move |x: &[Jet2]| {
        let r = x[n];
        let cd = x[0].dim();
        let theta = ComplexForm { re: w2(x), im: w3(x) };
        let tail = ComplexForm { re: JetForm::basis(d, n, cd), im: eta(x).scale(-r) };
        let out = theta.wedge(&tail);
        ComplexForm { re: out.re.scale(r.sqr()), im: out.im.scale(r.sqr()) }
    });
    let psi2 = psi.clone();
    let metric = cone_metric(&s.base);
    let mut cone = ConeSU3 {
        cone_metric: metric,
        omega,
        psi_re: FormField::new(d, 3, move |x: &[Jet2]| psi(x).re),
        psi_im: FormField::new(d, 3, move |x: &[Jet2]| psi2(x).im),
    };
    // orient the cone by ω³/6
    let p: Vec<f64> = (0..d).map(|i| if i == n { 1.0 } else { 0.1 * (i as f64 + 1.0) }).collect();
    let om = cone.omega.eval_jets(&lift_values(&p)).value();
    let top = om.wedge(&om).wedge(&om);
    let sign = if top.coeffs()[0] >= 0.0 { Orientation::Positive } else { Orientation::Negative };
    cone.cone_metric = cone.cone_metric.with_orientation(Some(sign));
    cone
}

impl ConeSU3 {
    pub fn dim(&self) -> usize {
        self.cone_metric.dim()
    }

    /// `J = g⁻¹ω`, so that `ω(X, Y) = g(JX, Y)`.
    pub fn complex_structure(&self) -> impl Fn(&[Jet2]) -> JetMat + Send + Sync + 'static {
        let (g, om) = (self.cone_metric.clone(), self.omega.clone());
        let d = self.dim();
        move |x: &[Jet2]| {
            let w = om.eval_jets(x);
            let wm = JetMat::from_fn(d, |i, j| w.get(&[i, j]));
            let ginv = g.eval_jets(x).inverse().unwrap_or_else(|_| JetMat::zeros(d, x[0].dim()));
            ginv.matmul(&wm)
        }
    }

    pub fn hermitian(&self) -> AlmostHermitianField {
        AlmostHermitianField::new(self.cone_metric.clone(), self.complex_structure())
    }

    /// Torsion, algebraic normalization and Ricci-flatness residuals.
    pub fn residuals(&self, points: &[Vec<f64>], tol: f64) -> Result<StructureReport> {
        let mut rep = StructureReport::new(tol);
        for p in points {
            let x = lift_values(p);
            let om = self.omega.eval_jets(&x).value();
            let (re, im) = (self.psi_re.eval_jets(&x).value(), self.psi_im.eval_jets(&x).value());
            let g = self.cone_metric.values_at(p)?;
            let vol = volume_form(&g, self.cone_metric.orientation())?;
            let top = om.wedge(&om).wedge(&om).scale_f64(1.0 / 6.0);
            let scale = vol.max_abs().max(1.0);
            rep.record("omega^3/6 = vol", form_norm(&top.sub(&vol)) / scale);
            rep.record(
                "psi_re ^ psi_im = (2/3) omega^3",
                form_norm(&re.wedge(&im).sub(&top.scale_f64(4.0 * PSI_NORMALIZATION))) / scale,
            );
            rep.record("omega ^ psi = 0", form_norm(&om.wedge(&re)).max(form_norm(&om.wedge(&im))));
            rep.record("d omega = 0", form_norm(&exterior_derivative(&self.omega, p)?));
            rep.record("d psi_re = 0", form_norm(&exterior_derivative(&self.psi_re, p)?));
            rep.record("d psi_im = 0", form_norm(&exterior_derivative(&self.psi_im, p)?));
            let c = curvature(&self.cone_metric, p)?;
            rep.record("Ric = 0", frame_operator_norm(&c.ricci, &c.g));
        }
        Ok(rep)
    }
}

/// `G₂` data on the cylinder over the cone, chart `(u, cone_r, cyl_t)`:
/// `φ = ω∧dt + ψ_re`, `*φ = σ(½ω∧ω + ψ_im∧dt)`.
#[derive(Clone, Debug)]
pub struct G2Pack {
    pub metric7: MetricField,
    pub phi: FormField,
    pub star_phi: FormField,
    pub orientation: Orientation,
}

pub fn g2_from_su3(c: &ConeSU3, orientation: Orientation) -> G2Pack {
    let d = c.dim();
    let n7 = d + 1;
    let map: Vec<usize> = (0..d).collect();
    let (om, re, im) = (c.omega.clone(), c.psi_re.clone(), c.psi_im.clone());
    let map2 = map.clone();
    let phi = FormField::new(n7, 3, move |x: &[Jet2]| {
        let cd = x[0].dim();
        let dt = JetForm::basis(n7, d, cd);
        let w = om.eval_jets(&x[..d]).embed(n7, &map);
        w.wedge(&dt).add(&re.eval_jets(&x[..d]).embed(n7, &map))
    });
    let om = c.omega.clone();
    let sigma = orientation.sign();
    let star_phi = FormField::new(n7, 4, move |x: &[Jet2]| {
        let cd = x[0].dim();
        let dt = JetForm::basis(n7, d, cd);
        let w = om.eval_jets(&x[..d]).embed(n7, &map2);
        let i = im.eval_jets(&x[..d]).embed(n7, &map2);
        w.wedge(&w).scale_f64(0.5).add(&i.wedge(&dt)).scale_f64(sigma)
    });
    let base_orient = c.cone_metric.orientation().unwrap_or(Orientation::Positive);
    let o7 = if sigma > 0.0 { base_orient } else { base_orient.flipped() };
    G2Pack { metric7: product_cylinder(&c.cone_metric).with_orientation(Some(o7)), phi, star_phi, orientation }
}

impl G2Pack {
    pub fn residuals(&self, points: &[Vec<f64>], tol: f64) -> Result<StructureReport> {
        let mut rep = StructureReport::new(tol);
        for p in points {
            let x = lift_values(p);
            let phi = self.phi.eval_jets(&x).value();
            let star = self.star_phi.eval_jets(&x).value();
            let g = self.metric7.values_at(p)?;
            rep.record("d phi = 0", form_norm(&exterior_derivative(&self.phi, p)?));
            rep.record("d *phi = 0", form_norm(&exterior_derivative(&self.star_phi, p)?));
            let hs = hodge_star(&phi, &g, self.metric7.orientation())?;
            rep.record("hodge(phi) = *phi", form_norm(&hs.sub(&star)) / star.max_abs().max(1.0));
            let vol = volume_form(&g, Some(Orientation::Positive))?;
            let seven = phi.wedge(&star).sub(&vol.scale_f64(7.0 * self.orientation.sign()));
            rep.record("phi ^ *phi = 7 vol", form_norm(&seven) / vol.max_abs().max(1.0));
            let c = curvature(&self.metric7, p)?;
            rep.record("Ric = 0", frame_operator_norm(&c.ricci, &c.g));
        }
        Ok(rep)
    }

    /// `φ∧*φ` divided by the coordinate-positive volume form: `±7` depending on the orientation.
    pub fn phi_star_ratio(&self, p: &[f64]) -> Result<f64> {
        let x = lift_values(p);
        let top = self.phi.eval_jets(&x).value().wedge(&self.star_phi.eval_jets(&x).value());
        let vol = volume_form(&self.metric7.values_at(p)?, Some(Orientation::Positive))?;
        Ok(top.coeffs()[0] / vol.coeffs()[0])
    }

    /// `g(P(u,v), w) = φ(u,v,w)` at `p`.
    pub fn cross_product_at(&self, p: &[f64], u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        let phi = self.phi.eval_jets(&lift_values(p)).value();
        let ginv = self.metric7.geometry_at(p)?.ginv;
        let low = phi.interior(u).interior(v);
        let n = p.len();
        Ok((0..n).map(|i| (0..n).map(|k| ginv[(i, k)] * low.get(&[k])).sum()).collect())
    }
}

/// Largest componentwise mismatch between `Φ*((t²g+dt²) + (s²h+ds²))` and
/// `R²(sin²θ g + cos²θ h + dθ²) + dR²` under `(t, s) = (R sin θ, R cos θ)`.
/// `h = None` is the metric of a point; `flip` uses `s = R sin θ` as a control.
pub fn cone_product_isometry(
    g: &MetricField,
    h: Option<&MetricField>,
    points: &[Vec<f64>],
    flip: bool,
) -> Result<f64> {
    let m = h.map_or(0, MetricField::dim);
    let map = cone_product_map(g.dim(), m, flip);
    let pulled = pullback_metric(&map, &product_of_cones(g, h))?;
    let cone = cone_over_join(g, h);
    let mut worst: f64 = 0.0;
    for p in points {
        let total = n_total(g, h);
        if p.len() != total {
            return Err(GeomError::DimensionMismatch { expected: total, found: p.len() });
        }
        let (theta, radius) = (p[total - 2], p[total - 1]);
        if !(radius > 0.0 && theta > 0.0 && theta < std::f64::consts::FRAC_PI_2) {
            return Err(GeomError::OutsideDomain(p.clone()));
        }
        let x = lift_values(p);
        // evaluated without the domain check so that degenerate controls still report a residual
        let a = pulled.eval_jets(&x).values();
        let b = cone.values_at(p)?;
        worst = worst.max((a - b).amax());
    }
    Ok(worst)
}

fn n_total(g: &MetricField, h: Option<&MetricField>) -> usize {
    g.dim() + h.map_or(0, MetricField::dim) + 2
}

/// Nearly Kähler structure on the sine-cone (chart `(u, angle_theta)`). In polar coordinates
/// `(u, θ, R)` with `cone_r = R sin θ`, `cyl_t = R cos θ` the cylinder over the cone is the cone
/// over the sine-cone; on `R = 1` the radial field is `∂_R` and `Ω = ∂_R ⌟ φ`, `J = h⁻¹Ω`.
pub fn nk_from_g2(g2: &G2Pack) -> AlmostHermitianField {
    let d = g2.metric7.dim() - 1;
    let polar = cone_product_map(d - 1, 0, false);
    let phi_polar = pullback_form(&polar, &g2.phi);
    let g7 = g2.metric7.clone();
    let level = move |x: &[Jet2]| {
        let mut y = x.to_vec();
        y.push(Jet2::constant(1.0, x[0].dim()));
        y
    };
    let lift = level.clone();
    let metric = MetricField::new(d, move |x: &[Jet2]| {
        let y = lift(x);
        let jac = polar.jacobian_jets(&y);
        let g = g7.eval_jets(&polar.apply_jets(&y));
        JetMat::from_fn(d, |a, b| {
            let mut acc = x[0].constant_like(0.0);
            for i in 0..=d {
                for j in 0..=d {
                    acc += jac[i][a] * jac[j][b] * g[(i, j)];
                }
            }
            acc
        })
    })
    .with_domain(move |p| p[d - 1] > 0.0 && p[d - 1] < std::f64::consts::PI)
    .with_orientation(Some(Orientation::Positive));
    let h = metric.clone();
    let j = move |x: &[Jet2]| {
        let cd = x[0].dim();
        let phi = phi_polar.eval_jets(&level(x));
        let om = JetMat::from_fn(d, |b, c| phi.get(&[d, b, c]));
        let hinv = h.eval_jets(x).inverse().unwrap_or_else(|_| JetMat::zeros(d, cd));
        hinv.matmul(&om)
    };
    AlmostHermitianField::new(metric, j)
}

/// The `W₁ + W₄` structure on the cylinder over `(M, g/β²)`: the nearly Kähler `J` of the
/// sine-cone pulled back by `(u, t) ↦ (u, 2 atan e^{βt+γ})`.
pub fn cylinder_w1w4(s: &SasakiSU2Structure, beta: f64, gamma: f64) -> Result<AlmostHermitianField> {
    if beta == 0.0 || !beta.is_finite() {
        return Err(GeomError::InvalidParameter(format!("beta = {beta} must be nonzero")));
    }
    let nk = nk_from_g2(&g2_from_su3(&kahler_cone(s), Orientation::Positive));
    let n = s.base.dim();
    let phi = cylinder_to_sine_cone(n, beta, gamma);
    let jh = nk.j_handle();
    let j = pullback_endomorphism(&phi, move |x: &[Jet2]| jh(x));
    let metric = product_cylinder(&s.base.scaled(1.0 / (beta * beta)));
    Ok(AlmostHermitianField::new(metric, j))
}

/// The Vaisman structure on `(M × ℝ, g + dt²)`: the cone's complex structure pulled back by `(u, t) ↦ (u, e^t)`.
pub fn vaisman_cylinder(s: &SasakiSU2Structure) -> AlmostHermitianField {
    let cone = kahler_cone(s);
    let j = pullback_endomorphism(&cylinder_to_cone(s.base.dim()), cone.complex_structure());
    AlmostHermitianField::new(product_cylinder(&s.base), j)
}

/// Largest componentwise gap between `α² sech²(βt+γ)(g + dt²)` and
/// `(α²/β²) φ*(β² sin²s g + ds²)` with `φ(x, t) = (x, 2 atan e^{βt+γ})`, chart `(x, cyl_t)`.
pub fn sine_cone_pullback_residual(g: &MetricField, beta: f64, gamma: f64, alpha_sq: f64, points: &[Vec<f64>]) -> Result<f64> {
    if beta == 0.0 || !beta.is_finite() {
        return Err(GeomError::InvalidParameter(format!("beta = {beta} must be nonzero")));
    }
    let n = g.dim();
    let phi = cylinder_to_sine_cone(n, beta, gamma);
    let rhs = pullback_metric(&phi, &crate::metric_builders::sine_cone_metric(&g.scaled(beta * beta)))?;
    let cyl = product_cylinder(g);
    let mut worst: f64 = 0.0;
    for p in points {
        let sech2 = (beta * p[n] + gamma).cosh().powi(-2);
        let lhs = cyl.values_at(p)? * (alpha_sq * sech2);
        let r = rhs.values_at(p)? * (alpha_sq / (beta * beta));
        worst = worst.max((lhs - r).amax());
    }
    Ok(worst)
}

/// Expected Lee form of [`cylinder_w1w4`]: `θ = β tanh(βt+γ) dt`.
pub fn cylinder_w1w4_lee(beta: f64, gamma: f64, t: f64) -> f64 {
    beta * (beta * t + gamma).tanh()
}
