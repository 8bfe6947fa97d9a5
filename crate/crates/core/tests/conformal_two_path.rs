use sinecone_core::conformal_einstein::{case1_solution, conformal_ricci, einstein_check, system_sy_residual, SplitConformalFactor, TimeProfile};
use sinecone_core::metric_builders::{conformal_rescale, lookup, product_cylinder, round_sphere};
use sinecone_core::tensor_core::{curvature, frame_operator_norm, ScalarField};
use sinecone_core::Jet2;

fn factors(dim: usize) -> Vec<ScalarField> {
    let last = dim - 1;
    vec![
        ScalarField::new(move |x: &[Jet2]| x[0].sin() * 0.3 + x[last] * 0.1),
        ScalarField::new(move |x: &[Jet2]| (x[1].sqr() + 1.0).ln() * 0.4),
        ScalarField::new(move |x: &[Jet2]| (x[0] * x[last]).cos() * -0.25),
        ScalarField::new(move |x: &[Jet2]| (x[last] * 0.5).tanh() * 0.5 + x[1] * 0.05),
        ScalarField::new(|x: &[Jet2]| {
            let mut s = x[0].constant_like(0.0);
            for (i, xi) in x.iter().enumerate() {
                s += *xi * (0.1 * (i as f64 + 1.0));
            }
            s.exp() * 0.2
        }),
    ]
}

#[test]
fn conformal_ricci_matches_direct_curvature() {
    for name in ["euclidean_3", "cylinder_s5", "round_sphere_6"] {
        let fx = lookup(name).unwrap();
        for (k, f) in factors(fx.dim()).iter().enumerate() {
            let rescaled = conformal_rescale(&fx.metric, f);
            for p in fx.sample(100 + k as u64, 20) {
                let a = conformal_ricci(&fx.metric, f, &p).unwrap();
                let c = curvature(&rescaled, &p).unwrap();
                assert!(frame_operator_norm(&(a - &c.ricci), &c.g) < 1e-6, "{name} factor {k}");
            }
        }
    }
}

#[test]
fn case1_scaling_coherence() {
    // base S⁵ of radius 1/β carries Ric = 4β² g, matching (n−1)β²
    for (beta, r) in [(0.5, 5.0), (2.0, 5.0), (1.0, 3.0)] {
        let base = round_sphere(5, 1.0 / beta);
        let (prof, f) = case1_solution(r, 5, beta, 0.2).unwrap();
        assert!((prof.base_einstein_constant() - 4.0 * beta * beta).abs() < 1e-12);
        let g = conformal_rescale(&product_cylinder(&base), &f);
        let pts = lookup("cylinder_s5").unwrap().sample(5, 10);
        let e = einstein_check(&g, &pts, 1e-6).unwrap();
        assert!(e.passed && (e.lambda_fit - r).abs() < 1e-6, "beta {beta} r {r}: {e:?}");
        let split = SplitConformalFactor::new(prof.profile(), ScalarField::constant(0.0), 5);
        for p in &pts[..3] {
            let (s, m) = system_sy_residual(&split, &base, r, &p[..5], p[5]).unwrap();
            assert!(s < 1e-7 && m < 1e-7);
        }
    }
    // β = 1 on the unit sphere is also fine, β = 1 on radius 2 is not
    let (_, f) = case1_solution(5.0, 5, 1.0, 0.0).unwrap();
    let wrong = conformal_rescale(&product_cylinder(&round_sphere(5, 2.0)), &f);
    let pts = lookup("cylinder_s5").unwrap().sample(6, 10);
    assert!(einstein_check(&wrong, &pts, 1e-6).unwrap().max_residual > 0.01);
}

#[test]
fn time_profile_shift_is_a_translation() {
    let a = TimeProfile::cosh(1.3, 0.7, 0.2);
    let b = a.shifted(0.5);
    for t in [-1.0, 0.0, 0.8] {
        assert!((b.value(t) - a.value(t) - 0.5).abs() < 1e-14);
    }
}
