use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{conformal_rescale, product_cylinder, round_sphere, round_sphere_angular, sine_cone_metric};
use crate::conformal_einstein::case1_solution;
use crate::error::{GeomError, Result};
use crate::gray_hervella::{conformal_transform, octonion::octonionic_s6, AlmostHermitianField, GHClass, GHType};
use crate::special_holonomy::{
    cylinder_w1w4, g2_from_su3, kahler_cone, nk_from_g2, round_s5_sasaki, squashed_s5, vaisman_cylinder,
    SasakiSU2Structure,
};
use crate::tensor_core::{MetricField, Orientation, ScalarField};

/// Coordinate ranges for sampling, one per chart axis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleBox {
    pub ranges: Vec<(f64, f64)>,
}

impl SampleBox {
    pub fn new(ranges: Vec<(f64, f64)>) -> Self {
        Self { ranges }
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self { ranges: vec![(lo, hi); dim] }
    }

    pub fn with(mut self, lo: f64, hi: f64) -> Self {
        self.ranges.push((lo, hi));
        self
    }

    pub fn dim(&self) -> usize {
        self.ranges.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && self.ranges.iter().zip(p).all(|(&(lo, hi), &x)| lo <= x && x <= hi)
    }

    /// Uniform points drawn from a ChaCha8 stream seeded with `seed`.
    pub fn sample(&self, seed: u64, count: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| self.ranges.iter().map(|&(lo, hi)| if hi > lo { rng.random_range(lo..hi) } else { lo }).collect())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExpectedProperty {
    Einstein { lambda: f64 },
    NotEinstein { min_residual: f64 },
    ScalarCurvature { value: f64 },
    GhType { classes: Vec<GHClass> },
    NablaOmegaNormSq { value: f64 },
    SasakiEinstein,
    /// `e^{2f}(g + dt²)` solving the Case-1 profile with these constants.
    Case1 { r: f64, n: usize, beta: f64, gamma: f64 },
    /// Lee form equal to `d` of the entry's `lee_potential`.
    ExactLeeForm,
    ClosedLeeForm,
    ParallelLeeForm,
    Integrable,
}

impl ExpectedProperty {
    pub fn gh_type(&self) -> Option<GHType> {
        match self {
            ExpectedProperty::GhType { classes } => Some(GHType::of(classes)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum FixtureStructure {
    None,
    Hermitian(AlmostHermitianField),
    Sasaki(SasakiSU2Structure),
}

#[derive(Clone, Debug)]
pub struct FixtureEntry {
    pub name: String,
    pub description: &'static str,
    pub metric: MetricField,
    pub structure: FixtureStructure,
    pub sample_box: SampleBox,
    pub expected_properties: Vec<ExpectedProperty>,
    pub lee_potential: Option<ScalarField>,
    /// Base `M` of a cylinder fixture `M × ℝ`.
    pub base: Option<MetricField>,
}

impl FixtureEntry {
    fn new(name: impl Into<String>, description: &'static str, metric: MetricField, sample_box: SampleBox) -> Self {
        Self {
            name: name.into(),
            description,
            metric,
            structure: FixtureStructure::None,
            sample_box,
            expected_properties: Vec::new(),
            lee_potential: None,
            base: None,
        }
    }

    fn base(mut self, g: MetricField) -> Self {
        self.base = Some(g);
        self
    }

    fn lee_potential(mut self, f: ScalarField) -> Self {
        self.lee_potential = Some(f);
        self.expected_properties.push(ExpectedProperty::ExactLeeForm);
        self
    }

    pub fn expects(&self, p: &ExpectedProperty) -> bool {
        self.expected_properties.contains(p)
    }

    fn structure(mut self, s: FixtureStructure) -> Self {
        self.structure = s;
        self
    }

    fn expect(mut self, p: ExpectedProperty) -> Self {
        self.expected_properties.push(p);
        self
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn hermitian(&self) -> Option<&AlmostHermitianField> {
        match &self.structure {
            FixtureStructure::Hermitian(h) => Some(h),
            _ => None,
        }
    }

    pub fn sasaki(&self) -> Option<&SasakiSU2Structure> {
        match &self.structure {
            FixtureStructure::Sasaki(s) => Some(s),
            _ => None,
        }
    }

    pub fn einstein_constant(&self) -> Option<f64> {
        self.expected_properties.iter().find_map(|p| match p {
            ExpectedProperty::Einstein { lambda } => Some(*lambda),
            _ => None,
        })
    }

    pub fn expected_gh_type(&self) -> Option<GHType> {
        self.expected_properties.iter().find_map(ExpectedProperty::gh_type)
    }

    pub fn sample(&self, seed: u64, count: usize) -> Vec<Vec<f64>> {
        self.sample_box.sample(seed, count)
    }
}

fn ball(dim: usize) -> SampleBox {
    SampleBox::cube(dim, -1.0, 1.0)
}

fn euclidean(n: usize) -> FixtureEntry {
    FixtureEntry::new(format!("euclidean_{n}"), "flat R^n", MetricField::euclidean(n), SampleBox::cube(n, -2.0, 2.0))
        .expect(ExpectedProperty::Einstein { lambda: 0.0 })
}

fn sphere(n: usize) -> FixtureEntry {
    FixtureEntry::new(
        format!("round_sphere_{n}"),
        "unit round sphere, stereographic chart",
        round_sphere(n, 1.0),
        ball(n),
    )
    .expect(ExpectedProperty::Einstein { lambda: (n - 1) as f64 })
}

fn angular_sphere(n: usize) -> FixtureEntry {
    let mut b = SampleBox::cube(n - 1, 0.1, PI - 0.1);
    b.ranges.push((0.0, 2.0 * PI));
    FixtureEntry::new(format!("round_sphere_angular_{n}"), "unit round sphere, iterated angular chart", round_sphere_angular(n, 1.0), b)
        .expect(ExpectedProperty::Einstein { lambda: (n - 1) as f64 })
}

fn cylinder_box() -> SampleBox {
    ball(5).with(-2.0, 2.0)
}

fn sine_box() -> SampleBox {
    ball(5).with(0.3, PI - 0.3)
}

/// Every named fixture, in listing order.
pub fn fixture_registry() -> Vec<FixtureEntry> {
    let mut out: Vec<FixtureEntry> = (2..=7).map(euclidean).collect();
    out.extend((2..=6).map(sphere));
    out.push(angular_sphere(2));
    out.push(angular_sphere(5));
    let s5 = round_sphere(5, 1.0);
    let sasaki = round_s5_sasaki();
    let cyl = product_cylinder(&s5);
    out.push(
        FixtureEntry::new("cylinder_s5", "Riemannian cylinder over the unit S^5", cyl.clone(), cylinder_box())
            .base(s5.clone())
            .expect(ExpectedProperty::ScalarCurvature { value: 20.0 }),
    );
    let flat = AlmostHermitianField::flat_kahler(3);
    out.push(
        FixtureEntry::new("flat_c3_kahler", "C^3 with its constant complex structure", flat.metric.clone(), SampleBox::cube(6, -2.0, 2.0))
            .structure(FixtureStructure::Hermitian(flat))
            .expect(ExpectedProperty::Einstein { lambda: 0.0 })
            .expect(ExpectedProperty::GhType { classes: vec![] }),
    );
    let pot = ScalarField::new(|x: &[crate::Jet2]| x[0].sin() * 0.4 + x[3] * x[5] * 0.2);
    let conf = conformal_transform(&AlmostHermitianField::flat_kahler(3), &pot);
    out.push(
        FixtureEntry::new("conformal_c3_kahler", "e^{2f} times flat C^3, f = 0.4 sin x1 + 0.2 x4 x6", conf.metric.clone(), SampleBox::cube(6, -2.0, 2.0))
            .structure(FixtureStructure::Hermitian(conf))
            .expect(ExpectedProperty::GhType { classes: vec![GHClass::W4] })
            .expect(ExpectedProperty::Integrable)
            .expect(ExpectedProperty::ClosedLeeForm)
            .lee_potential(pot),
    );
    let s6 = octonionic_s6();
    out.push(
        FixtureEntry::new("s6_octonion_nk", "S^6 with the octonionic almost complex structure", s6.metric.clone(), SampleBox::cube(6, -1.5, 1.5))
            .structure(FixtureStructure::Hermitian(s6))
            .expect(ExpectedProperty::Einstein { lambda: 5.0 })
            .expect(ExpectedProperty::GhType { classes: vec![GHClass::W1] })
            .expect(ExpectedProperty::NablaOmegaNormSq { value: 24.0 }),
    );
    out.push(
        FixtureEntry::new("s5_sasaki", "round S^5 with its Hopf contact and SU(2) forms", sasaki.base.clone(), ball(5))
            .structure(FixtureStructure::Sasaki(sasaki.clone()))
            .expect(ExpectedProperty::Einstein { lambda: 4.0 })
            .expect(ExpectedProperty::SasakiEinstein),
    );
    let squashed = squashed_s5();
    out.push(
        FixtureEntry::new("squashed_s5", "S^5 with the Hopf fibre stretched by 2", squashed.base.clone(), ball(5))
            .structure(FixtureStructure::Sasaki(squashed.clone()))
            .expect(ExpectedProperty::NotEinstein { min_residual: 0.05 }),
    );
    let (_, f) = case1_solution(5.0, 5, 1.0, 0.0).expect("admissible constants");
    out.push(
        FixtureEntry::new("case1_cylinder", "cosh^-2 t (g_S5 + dt^2)", conformal_rescale(&cyl, &f), cylinder_box())
            .expect(ExpectedProperty::Einstein { lambda: 5.0 })
            .base(s5.clone())
            .expect(ExpectedProperty::Case1 { r: 5.0, n: 5, beta: 1.0, gamma: 0.0 }),
    );
    out.push(
        FixtureEntry::new("sine_cone_s5", "sine-cone over the unit S^5", sine_cone_metric(&s5), sine_box())
            .expect(ExpectedProperty::Einstein { lambda: 5.0 }),
    );
    out.push(
        FixtureEntry::new("sine_cone_squashed_s5", "sine-cone over the squashed S^5", sine_cone_metric(&squashed.base), sine_box())
            .expect(ExpectedProperty::NotEinstein { min_residual: 0.05 }),
    );
    let cone = kahler_cone(&sasaki);
    out.push(
        FixtureEntry::new("cone_s5_kahler", "Kahler cone over the round S^5", cone.cone_metric.clone(), ball(5).with(0.5, 2.0))
            .structure(FixtureStructure::Hermitian(cone.hermitian()))
            .expect(ExpectedProperty::Einstein { lambda: 0.0 })
            .expect(ExpectedProperty::GhType { classes: vec![] }),
    );
    let nk = nk_from_g2(&g2_from_su3(&cone, Orientation::Positive));
    out.push(
        FixtureEntry::new("sine_cone_s5_nk", "nearly Kahler sine-cone over S^5 from the G2 cylinder", nk.metric.clone(), sine_box())
            .structure(FixtureStructure::Hermitian(nk))
            .expect(ExpectedProperty::Einstein { lambda: 5.0 })
            .expect(ExpectedProperty::GhType { classes: vec![GHClass::W1] })
            .expect(ExpectedProperty::NablaOmegaNormSq { value: 24.0 }),
    );
    let w1w4 = cylinder_w1w4(&sasaki, 1.0, 0.0).expect("beta = 1 is admissible");
    out.push(
        FixtureEntry::new("cylinder_w1w4_s5", "W1+W4 structure on the cylinder over S^5", w1w4.metric.clone(), cylinder_box())
            .structure(FixtureStructure::Hermitian(w1w4))
            .expect(ExpectedProperty::GhType { classes: vec![GHClass::W1, GHClass::W4] })
            .expect(ExpectedProperty::ClosedLeeForm)
            .lee_potential(ScalarField::new(|x: &[crate::Jet2]| x[5].cosh().ln())),
    );
    let vaisman = vaisman_cylinder(&sasaki);
    out.push(
        FixtureEntry::new("cylinder_vaisman_s5", "Vaisman structure on the cylinder over S^5", vaisman.metric.clone(), cylinder_box())
            .structure(FixtureStructure::Hermitian(vaisman))
            .expect(ExpectedProperty::GhType { classes: vec![GHClass::W4] })
            .expect(ExpectedProperty::ParallelLeeForm)
            .expect(ExpectedProperty::Integrable)
            .lee_potential(ScalarField::new(|x: &[crate::Jet2]| -x[5])),
    );
    out
}

pub fn fixture_names() -> Vec<String> {
    fixture_registry().into_iter().map(|f| f.name).collect()
}

pub fn lookup(name: &str) -> Result<FixtureEntry> {
    fixture_registry()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| GeomError::UnknownFixture(name.to_string()))
}
