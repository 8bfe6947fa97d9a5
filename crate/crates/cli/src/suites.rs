use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use sinecone_core::conformal_einstein::{case1_solution, einstein_check, mixed_ricci_residual, system_sy_residual, SplitConformalFactor};
use sinecone_core::gray_hervella::{
    decompose_point, lee_form, lee_form_closedness, lee_form_parallelism, AlmostHermitianField, GHClass, GHType,
};
use sinecone_core::metric_builders::{lookup, ExpectedProperty, FixtureEntry, SampleBox};
use sinecone_core::special_holonomy::{
    cone_product_isometry, cylinder_w1w4, g2_from_su3, kahler_cone, nk_from_g2, se_verify, sine_cone_pullback_residual,
    vaisman_cylinder, SasakiSU2Structure, StructureReport,
};
use sinecone_core::tensor_core::{curvature, MetricField, Orientation, ScalarField};
use sinecone_core::GeomError;

use crate::report::{Check, Reported, SuiteResult};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Theorem1,
    GhClassify,
    ConeChain,
    Theorem4,
    CurvatureCore,
}

pub const ALL_SUITES: [Suite; 5] = [Suite::Theorem1, Suite::GhClassify, Suite::ConeChain, Suite::Theorem4, Suite::CurvatureCore];

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Theorem1 => "theorem1",
            Suite::GhClassify => "gh-classify",
            Suite::ConeChain => "cone-chain",
            Suite::Theorem4 => "theorem4",
            Suite::CurvatureCore => "curvature-core",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Suite::Theorem1 => "Einstein check of a metric; for Case-1 fixtures also the conformal system and profile ODE",
            Suite::GhClassify => "Gray-Hervella classification of an almost Hermitian fixture against its expectations",
            Suite::ConeChain => "Sasaki-Einstein pack, Kahler cone, G2 cylinder and the induced nearly Kahler sine-cone",
            Suite::Theorem4 => "W1+W4 and Vaisman structures on the cylinder over a Sasaki-Einstein fixture",
            Suite::CurvatureCore => "Riemann symmetries, first Bianchi identity and the expected Einstein constant",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        ALL_SUITES
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown suite `{s}` (see list-suites)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub samples: usize,
    pub tol: Option<f64>,
    pub seed: u64,
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { samples: 100, tol: None, seed: 0, timing: false }
    }
}

pub const MIN_SAMPLES: usize = 10;

struct Ctx {
    opts: RunOptions,
    checks: Vec<Check>,
    reported: BTreeMap<String, Reported>,
}

impl Ctx {
    fn check(&mut self, name: impl Into<String>, residual: f64, default_tol: f64) {
        self.checks.push(Check::new(name, residual, self.opts.tol.unwrap_or(default_tol)));
    }

    /// Counts are compared exactly and ignore the override.
    fn count(&mut self, name: impl Into<String>, count: usize) {
        self.checks.push(Check::new(name, count as f64, 0.0));
    }

    fn tol(&self, default_tol: f64) -> f64 {
        self.opts.tol.unwrap_or(default_tol)
    }

    fn number(&mut self, key: &str, v: f64) {
        self.reported.insert(key.to_string(), Reported::Number(v));
    }

    fn text(&mut self, key: &str, v: impl Into<String>) {
        self.reported.insert(key.to_string(), Reported::Text(v.into()));
    }

    fn structure(&mut self, prefix: &str, r: &StructureReport, default_tol: f64) {
        for c in &r.checks {
            self.check(format!("{prefix}/{}", c.name), c.residual, default_tol);
        }
    }

    /// Seeded points; stage `k` of a suite draws from its own stream.
    fn points(&self, b: &SampleBox, stage: u64) -> Vec<Vec<f64>> {
        b.sample(self.opts.seed.wrapping_add(stage.wrapping_mul(0x9E37_79B9_7F4A_7C15)), self.opts.samples)
    }
}

pub fn run_suite(suite: Suite, fixture: &str, opts: RunOptions) -> Result<SuiteResult, CliError> {
    if opts.samples < MIN_SAMPLES {
        return Err(CliError::Usage(format!("--samples must be at least {MIN_SAMPLES}")));
    }
    if let Some(t) = opts.tol {
        if !(t >= 0.0) {
            return Err(CliError::Usage(format!("--tol must be a nonnegative number, got {t}")));
        }
    }
    let fx = lookup(fixture)?;
    let start = Instant::now();
    let mut ctx = Ctx { opts, checks: Vec::new(), reported: BTreeMap::new() };
    match suite {
        Suite::Theorem1 => theorem1(&fx, &mut ctx)?,
        Suite::GhClassify => gh_classify(&fx, &mut ctx)?,
        Suite::ConeChain => cone_chain(sasaki_of(&fx)?, &mut ctx)?,
        Suite::Theorem4 => theorem4(sasaki_of(&fx)?, &mut ctx)?,
        Suite::CurvatureCore => curvature_core(&fx, &mut ctx)?,
    }
    let passed = ctx.checks.iter().all(|c| c.passed);
    Ok(SuiteResult {
        suite: suite.name().to_string(),
        fixture: fx.name,
        samples: opts.samples,
        tolerance_override: opts.tol,
        checks: ctx.checks,
        reported: ctx.reported,
        passed,
        wall_time_ms: if opts.timing { start.elapsed().as_millis() as u64 } else { 0 },
    })
}

fn sasaki_of(fx: &FixtureEntry) -> Result<&SasakiSU2Structure, CliError> {
    fx.sasaki()
        .ok_or_else(|| GeomError::MissingStructure { fixture: fx.name.clone(), what: "Sasaki structure" }.into())
}

fn theorem1(fx: &FixtureEntry, ctx: &mut Ctx) -> Result<(), CliError> {
    let pts = ctx.points(&fx.sample_box, 0);
    let e = einstein_check(&fx.metric, &pts, ctx.tol(1e-6))?;
    ctx.check("einstein_check", e.max_residual, 1e-6);
    ctx.number("lambda_fit", e.lambda_fit);
    if let Some(lambda) = fx.einstein_constant() {
        ctx.check("einstein_constant", (e.lambda_fit - lambda).abs(), 1e-6);
    }
    for prop in &fx.expected_properties {
        if let ExpectedProperty::Case1 { r, n, beta, gamma } = *prop {
            let base = fx
                .base
                .as_ref()
                .ok_or_else(|| GeomError::MissingStructure { fixture: fx.name.clone(), what: "cylinder base" })?;
            let (profile, f) = case1_solution(r, n, beta, gamma)?;
            let split = SplitConformalFactor::new(profile.profile(), ScalarField::constant(0.0), n);
            let (mut sy, mut ode, mut mixed) = (0.0f64, 0.0f64, 0.0f64);
            for p in &pts {
                let (s, m) = system_sy_residual(&split, base, r, &p[..n], p[n])?;
                sy = sy.max(s).max(m);
                ode = ode.max(profile.ode_residual(p[n]).abs());
                mixed = mixed_ricci_residual(&f, p)?.into_iter().fold(mixed, |a, v| a.max(v.abs()));
            }
            ctx.check("system_sy", sy, 1e-7);
            ctx.check("ode_residual", ode, 1e-12);
            ctx.check("mixed_ricci", mixed, 1e-9);
            ctx.number("alpha_sq", profile.alpha_sq);
        }
    }
    Ok(())
}

const GH_TOL: f64 = 1e-6;

/// Classification, orthogonality and J-validity checks shared by the Hermitian suites.
fn classify(
    prefix: &str,
    s: &AlmostHermitianField,
    pts: &[Vec<f64>],
    expected: Option<&GHType>,
    ctx: &mut Ctx,
) -> Result<GHType, CliError> {
    let mut maxima = [0.0f64; 4];
    let (mut ortho, mut valid) = (0.0f64, 0.0f64);
    for p in pts {
        let (j2, compat) = s.validate_at(p)?;
        valid = valid.max(j2).max(compat);
        let c = decompose_point(&s.point(p)?)?;
        for (m, v) in maxima.iter_mut().zip(c.norms()) {
            *m = m.max(v);
        }
        ortho = ortho.max(c.orthogonality_residual());
    }
    let classes = [GHClass::W1, GHClass::W2, GHClass::W3, GHClass::W4];
    let thr = ctx.tol(GH_TOL);
    let found = GHType(classes.iter().zip(maxima).filter(|(_, m)| *m > thr).map(|(c, _)| *c).collect());
    ctx.check(format!("{prefix}almost_hermitian"), valid, 1e-8);
    ctx.check(format!("{prefix}orthogonality"), ortho, 1e-6);
    ctx.text(&format!("{prefix}gh_type"), found.to_string());
    for (c, m) in classes.iter().zip(maxima) {
        ctx.number(&format!("{prefix}{}_max_norm", c.to_string().to_lowercase()), m);
    }
    if let Some(exp) = expected {
        let absent = classes.iter().zip(maxima).filter(|(c, _)| !exp.contains(**c)).map(|(_, m)| m).fold(0.0, f64::max);
        ctx.check(format!("{prefix}gh_absent_classes"), absent, GH_TOL);
        let mismatched = classes.iter().filter(|c| exp.contains(**c) != found.contains(**c)).count();
        ctx.count(format!("{prefix}gh_type_mismatch"), mismatched);
        ctx.text(&format!("{prefix}gh_type_expected"), exp.to_string());
    }
    Ok(found)
}

fn nabla_norm_gap(s: &AlmostHermitianField, pts: &[Vec<f64>], value: f64) -> Result<f64, CliError> {
    let mut worst = 0.0f64;
    for p in pts {
        worst = worst.max((decompose_point(&s.point(p)?)?.nabla_norm_sq - value).abs());
    }
    Ok(worst)
}

fn lee_gap(s: &AlmostHermitianField, potential: &ScalarField, pts: &[Vec<f64>]) -> Result<f64, CliError> {
    let mut worst = 0.0f64;
    for p in pts {
        let theta = lee_form(s, p)?;
        let df = potential.at(p)?;
        for (i, t) in theta.iter().enumerate() {
            worst = worst.max((t - df.d(i)).abs());
        }
    }
    Ok(worst)
}

fn nijenhuis_max(s: &AlmostHermitianField, pts: &[Vec<f64>]) -> Result<f64, CliError> {
    let mut worst = 0.0f64;
    for p in pts {
        worst = worst.max(s.point(p)?.nijenhuis().max_abs());
    }
    Ok(worst)
}

fn einstein_checks(prefix: &str, g: &MetricField, pts: &[Vec<f64>], lambda: f64, tol: f64, ctx: &mut Ctx) -> Result<(), CliError> {
    let e = einstein_check(g, pts, ctx.tol(tol))?;
    ctx.check(format!("{prefix}einstein_check"), e.max_residual, tol);
    ctx.check(format!("{prefix}einstein_constant"), (e.lambda_fit - lambda).abs(), tol);
    ctx.number(&format!("{prefix}lambda_fit"), e.lambda_fit);
    Ok(())
}

fn gh_classify(fx: &FixtureEntry, ctx: &mut Ctx) -> Result<(), CliError> {
    let s = fx
        .hermitian()
        .ok_or_else(|| GeomError::MissingStructure { fixture: fx.name.clone(), what: "almost Hermitian structure" })?;
    let pts = ctx.points(&fx.sample_box, 0);
    let expected = fx.expected_gh_type();
    classify("", s, &pts, expected.as_ref(), ctx)?;
    for prop in &fx.expected_properties {
        match prop {
            ExpectedProperty::NablaOmegaNormSq { value } => {
                let gap = nabla_norm_gap(s, &pts, *value)?;
                ctx.check("nabla_omega_norm_sq", gap, 1e-4);
            }
            ExpectedProperty::Einstein { lambda } => einstein_checks("", &s.metric, &pts, *lambda, 1e-7, ctx)?,
            ExpectedProperty::ExactLeeForm => {
                if let Some(f) = &fx.lee_potential {
                    ctx.check("lee_form_exact", lee_gap(s, f, &pts)?, 1e-8);
                }
            }
            ExpectedProperty::ClosedLeeForm => ctx.check("lee_form_closed", lee_form_closedness(s, &pts)?, 1e-6),
            ExpectedProperty::ParallelLeeForm => ctx.check("lee_form_parallel", lee_form_parallelism(s, &pts)?, 1e-6),
            ExpectedProperty::Integrable => ctx.check("nijenhuis", nijenhuis_max(s, &pts)?, 1e-8),
            _ => {}
        }
    }
    Ok(())
}

fn extend(b: &SampleBox, lo: f64, hi: f64) -> SampleBox {
    b.clone().with(lo, hi)
}

fn cone_chain(s: &SasakiSU2Structure, ctx: &mut Ctx) -> Result<(), CliError> {
    let base_box = SampleBox::cube(s.base.dim(), -1.0, 1.0);
    let pts = ctx.points(&base_box, 0);
    ctx.structure("sasaki", &se_verify(s, &pts, 1e-7)?, 1e-7);
    let cone = kahler_cone(s);
    let cone_box = extend(&base_box, 0.5, 2.0);
    let cone_pts = ctx.points(&cone_box, 1);
    ctx.structure("cone", &cone.residuals(&cone_pts, 1e-6)?, 1e-6);
    let g2 = g2_from_su3(&cone, Orientation::Positive);
    let g2_pts = ctx.points(&extend(&cone_box, -2.0, 2.0), 2);
    ctx.structure("g2", &g2.residuals(&g2_pts, 1e-6)?, 1e-6);
    let polar_box = extend(&extend(&base_box, 0.1, FRAC_PI_2 - 0.1), 0.5, 2.0);
    let polar_pts = ctx.points(&polar_box, 3);
    ctx.check("cone_product_identity", cone_product_isometry(&s.base, None, &polar_pts, false)?, 1e-9);
    let nk = nk_from_g2(&g2);
    let sine_pts = ctx.points(&extend(&base_box, 0.3, PI - 0.3), 4);
    classify("nk/", &nk, &sine_pts, Some(&GHType::of(&[GHClass::W1])), ctx)?;
    ctx.check("nk/nabla_omega_norm_sq", nabla_norm_gap(&nk, &sine_pts, 24.0)?, 1e-4);
    einstein_checks("nk/", &nk.metric, &sine_pts, 5.0, 1e-5, ctx)
}

fn theorem4(s: &SasakiSU2Structure, ctx: &mut Ctx) -> Result<(), CliError> {
    let cyl_box = SampleBox::cube(s.base.dim(), -1.0, 1.0).with(-2.0, 2.0);
    let pts = ctx.points(&cyl_box, 0);
    for (beta, gamma) in [(1.0, 0.0), (2.0, 0.3)] {
        let r = sine_cone_pullback_residual(&s.base, beta, gamma, 1.0, &pts)?;
        ctx.check(format!("si_isometry(beta={beta},gamma={gamma})"), r, 1e-9);
    }
    let w = cylinder_w1w4(s, 1.0, 0.0)?;
    classify("w1w4/", &w, &pts, Some(&GHType::of(&[GHClass::W1, GHClass::W4])), ctx)?;
    ctx.check("w1w4/lee_form_closed", lee_form_closedness(&w, &pts)?, 1e-6);
    let log_cosh = ScalarField::new(|x: &[sinecone_core::Jet2]| x[5].cosh().ln());
    ctx.check("w1w4/lee_form_exact", lee_gap(&w, &log_cosh, &pts)?, 1e-8);
    let v = vaisman_cylinder(s);
    classify("vaisman/", &v, &pts, Some(&GHType::of(&[GHClass::W4])), ctx)?;
    ctx.check("vaisman/lee_form_parallel", lee_form_parallelism(&v, &pts)?, 1e-6);
    ctx.check("vaisman/nijenhuis", nijenhuis_max(&v, &pts)?, 1e-8);
    let minus_t = ScalarField::new(|x: &[sinecone_core::Jet2]| -x[5]);
    ctx.check("vaisman/lee_form_exact", lee_gap(&v, &minus_t, &pts)?, 1e-8);
    let mut same = 0.0f64;
    for p in &pts {
        same = same.max((w.metric.values_at(p)? - v.metric.values_at(p)?).amax());
    }
    ctx.check("shared_cylinder_metric", same, 1e-12);
    Ok(())
}

fn curvature_core(fx: &FixtureEntry, ctx: &mut Ctx) -> Result<(), CliError> {
    let pts = ctx.points(&fx.sample_box, 0);
    let (mut sym, mut bianchi, mut trace, mut ric) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let lambda = fx.einstein_constant();
    for p in &pts {
        let c = curvature(&fx.metric, p)?;
        sym = sym.max(c.symmetry_residual());
        bianchi = bianchi.max(c.bianchi_residual());
        trace = trace.max(c.ricci_trace_residual());
        if let Some(l) = lambda {
            ric = ric.max((&c.ricci - &c.g * l).amax());
        }
    }
    ctx.check("riemann_symmetry", sym, 1e-9);
    ctx.check("first_bianchi", bianchi, 1e-9);
    ctx.check("ricci_trace", trace, 1e-9);
    if let Some(l) = lambda {
        ctx.check("ricci_minus_lambda_g", ric, 1e-7);
        ctx.number("expected_lambda", l);
    }
    Ok(())
}
