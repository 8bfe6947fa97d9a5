use std::f64::consts::{FRAC_PI_2, PI};
use std::process::{Command, ExitCode};
use std::time::Instant;

use sinecone_cli::{run_suite, run_sweep, RunOptions, Suite, SuiteResult, SweepSpec};
use sinecone_core::conformal_einstein::{case2_obstruction, conformal_ricci, obata_residual};
use sinecone_core::metric_builders::{
    lookup, round_sphere, round_sphere_angular, stereographic_height, QuadratureGrid, SampleBox,
};
use sinecone_core::special_holonomy::{cone_product_isometry, sine_cone_pullback_residual};
use sinecone_core::tensor_core::{curvature, frame_operator_norm, laplacian, ScalarField};
use sinecone_core::Jet2;

type Outcome = Result<String, String>;

fn opts(samples: usize, seed: u64) -> RunOptions {
    RunOptions { samples, tol: None, seed, timing: false }
}

fn suite(s: Suite, fixture: &str, samples: usize, seed: u64) -> Result<SuiteResult, String> {
    run_suite(s, fixture, opts(samples, seed)).map_err(|e| e.to_string())
}

fn residual(r: &SuiteResult, name: &str) -> Result<f64, String> {
    r.check(name).map(|c| c.max_residual).ok_or_else(|| format!("{} {} has no check `{name}`", r.suite, r.fixture))
}

fn within(what: &str, value: f64, tol: f64) -> Result<(), String> {
    if value <= tol {
        Ok(())
    } else {
        Err(format!("{what} = {value:.3e} exceeds {tol:.0e}"))
    }
}

fn all_pass(r: &SuiteResult) -> Result<(), String> {
    match r.first_failure() {
        None => Ok(()),
        Some(c) => Err(format!("{} {}: {} = {:.3e} > {:.0e}", r.suite, r.fixture, c.name, c.max_residual, c.tolerance)),
    }
}

fn curvature_core() -> Outcome {
    let (mut ric, mut sym) = (0.0f64, 0.0f64);
    for n in 2..=6 {
        let r = suite(Suite::CurvatureCore, &format!("round_sphere_{n}"), 100, n as u64)?;
        let e = residual(&r, "ricci_minus_lambda_g")?;
        let s = residual(&r, "riemann_symmetry")?.max(residual(&r, "first_bianchi")?);
        within(&format!("S^{n} |Ric - (n-1)g|"), e, 1e-7)?;
        within(&format!("S^{n} symmetry/Bianchi"), s, 1e-9)?;
        ric = ric.max(e);
        sym = sym.max(s);
    }
    Ok(format!("max |Ric-(n-1)g| {ric:.1e}, symmetry/Bianchi {sym:.1e}"))
}

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

fn conformal_two_path() -> Outcome {
    let mut worst = 0.0f64;
    for name in ["euclidean_3", "cylinder_s5", "round_sphere_6"] {
        let fx = lookup(name).map_err(|e| e.to_string())?;
        for (k, f) in factors(fx.dim()).iter().enumerate() {
            let rescaled = sinecone_core::metric_builders::conformal_rescale(&fx.metric, f);
            for p in fx.sample(1000 + k as u64, 100) {
                let a = conformal_ricci(&fx.metric, f, &p).map_err(|e| e.to_string())?;
                let c = curvature(&rescaled, &p).map_err(|e| e.to_string())?;
                let d = frame_operator_norm(&(a - &c.ricci), &c.g);
                within(&format!("{name} factor {k}"), d, 1e-6)?;
                worst = worst.max(d);
            }
        }
    }
    Ok(format!("3 fixtures x 5 factors x 100 points, max gap {worst:.1e}"))
}

fn case1_end_to_end() -> Outcome {
    let r = suite(Suite::Theorem1, "case1_cylinder", 100, 7)?;
    let lambda = r.number("lambda_fit").ok_or("lambda_fit missing")?;
    within("|lambda - 5|", (lambda - 5.0).abs(), 1e-6)?;
    within("einstein residual", residual(&r, "einstein_check")?, 1e-6)?;
    within("system (sy)", residual(&r, "system_sy")?, 1e-7)?;
    within("profile ODE", residual(&r, "ode_residual")?, 1e-12)?;
    Ok(format!(
        "lambda {lambda}, Einstein {:.1e}, system {:.1e}, ODE {:.1e}",
        residual(&r, "einstein_check")?,
        residual(&r, "system_sy")?,
        residual(&r, "ode_residual")?
    ))
}

fn isometries() -> Outcome {
    let s5 = round_sphere(5, 1.0);
    let cyl = SampleBox::cube(5, -1.0, 1.0).with(-2.0, 2.0).sample(4, 200);
    let mut si = 0.0f64;
    for (beta, gamma) in [(1.0, 0.0), (2.0, 0.3)] {
        let r = sine_cone_pullback_residual(&s5, beta, gamma, 1.0, &cyl).map_err(|e| e.to_string())?;
        within(&format!("pullback at beta={beta}, gamma={gamma}"), r, 1e-9)?;
        si = si.max(r);
    }
    let polar = SampleBox::cube(5, -1.0, 1.0).with(0.05, FRAC_PI_2 - 0.05).with(0.5, 2.0).sample(5, 200);
    let point = cone_product_isometry(&s5, None, &polar, false).map_err(|e| e.to_string())?;
    within("cone product with a point", point, 1e-9)?;
    let s1 = round_sphere(1, 1.0);
    let pairs = SampleBox::cube(2, -2.0, 2.0).with(0.05, FRAC_PI_2 - 0.05).with(0.5, 2.0).sample(6, 200);
    let circles = cone_product_isometry(&s1, Some(&s1), &pairs, false).map_err(|e| e.to_string())?;
    within("cone product of two circles", circles, 1e-9)?;
    Ok(format!("pullback {si:.1e}, cone product (point) {point:.1e}, (S1 x S1) {circles:.1e}"))
}

fn case2_and_case3() -> Outcome {
    let mut ranges = vec![(0.0, PI); 4];
    ranges.push((0.0, 2.0 * PI));
    let height = ScalarField::coordinate(0).map(|t| t.cos());
    let q = case2_obstruction(&round_sphere_angular(5, 1.0), &height, 5.0, 5, &QuadratureGrid::uniform(8, &ranges))
        .map_err(|e| e.to_string())?;
    let target = 10.0 * PI.powi(3);
    if !(q.value > 0.0) {
        return Err(format!("integral {} is not positive", q.value));
    }
    within("relative integral error", (q.value / target - 1.0).abs(), 1e-2)?;

    let g = round_sphere(5, 1.0);
    let b = stereographic_height();
    let pts = SampleBox::cube(5, -1.0, 1.0).sample(8, 100);
    let (h, _) = obata_residual(&b, &g, 1.0, &pts).map_err(|e| e.to_string())?;
    let mut lap = 0.0f64;
    for p in &pts {
        let d = laplacian(&b, &g, p).map_err(|e| e.to_string())? - 5.0 * b.value_at(p);
        lap = lap.max(d.abs());
    }
    within("|H(b) + b g|", h, 1e-7)?;
    within("|Lap b - 5b|", lap, 1e-7)?;
    let (control, _) = obata_residual(&b.map(|v| v.sqr()), &g, 1.0, &pts).map_err(|e| e.to_string())?;
    if control <= 0.5 {
        return Err(format!("non-eigenfunction control residual {control:.3e} is not above 0.5"));
    }
    Ok(format!(
        "integral {:.4} vs 10 pi^3 = {target:.4}, Obata {h:.1e}/{lap:.1e}, control {control:.2}",
        q.value
    ))
}

fn gray_hervella() -> Outcome {
    let mut ortho = 0.0f64;
    let flat = suite(Suite::GhClassify, "flat_c3_kahler", 100, 1)?;
    all_pass(&flat)?;
    if flat.text("gh_type") != Some("Kahler") {
        return Err(format!("flat C^3 classified {:?}", flat.text("gh_type")));
    }
    let s6 = suite(Suite::GhClassify, "s6_octonion_nk", 100, 2)?;
    all_pass(&s6)?;
    if s6.text("gh_type") != Some("W1") {
        return Err(format!("S^6 classified {:?}", s6.text("gh_type")));
    }
    within("| |nabla Omega|^2 - 24 |", residual(&s6, "nabla_omega_norm_sq")?, 1e-4)?;
    within("S^6 |Ric - 5g|", residual(&s6, "einstein_check")?.max(residual(&s6, "einstein_constant")?), 1e-7)?;
    let conf = suite(Suite::GhClassify, "conformal_c3_kahler", 100, 3)?;
    all_pass(&conf)?;
    if conf.text("gh_type") != Some("W4") {
        return Err(format!("conformal Kahler classified {:?}", conf.text("gh_type")));
    }
    within("|theta - df|", residual(&conf, "lee_form_exact")?, 1e-8)?;
    for r in [&flat, &s6, &conf] {
        let o = residual(r, "orthogonality")?;
        within(&format!("{} orthogonality", r.fixture), o, 1e-6)?;
        ortho = ortho.max(o);
    }
    Ok(format!(
        "flat Kahler, S^6 W1 (|nabla Omega|^2 gap {:.1e}), conformal W4 (theta gap {:.1e}), orthogonality {ortho:.1e}",
        residual(&s6, "nabla_omega_norm_sq")?,
        residual(&conf, "lee_form_exact")?
    ))
}

fn cone_chain() -> Outcome {
    let r = suite(Suite::ConeChain, "s5_sasaki", 100, 5)?;
    all_pass(&r)?;
    let group = |prefix: &str| r.checks.iter().filter(|c| c.name.starts_with(prefix)).map(|c| c.max_residual).fold(0.0, f64::max);
    within("Sasaki structure equations", group("sasaki/"), 1e-7)?;
    within("cone closedness and flatness", group("cone/"), 1e-6)?;
    within("G2 closed and coclosed", residual(&r, "g2/d phi = 0")?.max(residual(&r, "g2/d *phi = 0")?), 1e-6)?;
    if r.text("nk/gh_type") != Some("W1") {
        return Err(format!("sine-cone classified {:?}", r.text("nk/gh_type")));
    }
    let lambda = r.number("nk/lambda_fit").ok_or("nk/lambda_fit missing")?;
    within("sine-cone |lambda - 5|", (lambda - 5.0).abs(), 1e-5)?;
    within("sine-cone Einstein", residual(&r, "nk/einstein_check")?, 1e-5)?;
    Ok(format!(
        "Sasaki {:.1e}, cone {:.1e}, G2 {:.1e}, nearly Kahler W1 with lambda {lambda}",
        group("sasaki/"),
        group("cone/"),
        group("g2/")
    ))
}

fn cylinder_structures() -> Outcome {
    let r = suite(Suite::Theorem4, "s5_sasaki", 100, 6)?;
    all_pass(&r)?;
    if r.text("w1w4/gh_type") != Some("W1+W4") {
        return Err(format!("W1+W4 cylinder classified {:?}", r.text("w1w4/gh_type")));
    }
    if r.text("vaisman/gh_type") != Some("W4") {
        return Err(format!("Vaisman cylinder classified {:?}", r.text("vaisman/gh_type")));
    }
    within("d theta", residual(&r, "w1w4/lee_form_closed")?, 1e-6)?;
    within("theta - d ln cosh t", residual(&r, "w1w4/lee_form_exact")?, 1e-8)?;
    within("nabla theta", residual(&r, "vaisman/lee_form_parallel")?, 1e-6)?;
    within("Nijenhuis", residual(&r, "vaisman/nijenhuis")?, 1e-8)?;
    Ok(format!(
        "W1+W4 (d theta {:.1e}), Vaisman W4 (nabla theta {:.1e}, N {:.1e})",
        residual(&r, "w1w4/lee_form_closed")?,
        residual(&r, "vaisman/lee_form_parallel")?,
        residual(&r, "vaisman/nijenhuis")?
    ))
}

fn negative_controls() -> Outcome {
    let sq = residual(&suite(Suite::Theorem1, "squashed_s5", 100, 9)?, "einstein_check")?;
    let cone = residual(&suite(Suite::Theorem1, "sine_cone_squashed_s5", 100, 9)?, "einstein_check")?;
    if !(sq > 0.05 && cone > 0.05) {
        return Err(format!("squashed {sq:.3e}, sine-cone of squashed {cone:.3e}; both must exceed 0.05"));
    }
    let spec = SweepSpec {
        fixture: "round_sphere_5".into(),
        betas: vec![1.0],
        gammas: vec![0.0, 0.3, -0.5],
        rs: vec![5.0, 2.0],
        samples: 100,
        seed: 9,
        tol: 1e-5,
        base_scale: Some(4.0),
        match_base: false,
    };
    let rows = run_sweep(&spec).map_err(|e| e.to_string())?;
    let least = rows.iter().map(|r| r.max_residual).fold(f64::INFINITY, f64::min);
    if rows.iter().any(|r| r.passed) || !(least > 0.01) {
        return Err(format!("mismatched sweep rows: smallest residual {least:.3e}"));
    }
    Ok(format!("squashed {sq:.2}, sine-cone of squashed {cone:.2}, mismatched sweep min {least:.2}"))
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("sinecone-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let run = |path: &std::path::Path| -> Result<Vec<u8>, String> {
        let o = Command::new(env!("CARGO_BIN_EXE_sinecone"))
            .args(["report", "--format", "json", "--seed", "42", "--samples", "50", "--out"])
            .arg(path)
            .args(["--run", "curvature-core:round_sphere_4", "--run", "theorem1:case1_cylinder"])
            .args(["--run", "gh-classify:s6_octonion_nk", "--run", "cone-chain:s5_sasaki"])
            .output()
            .map_err(|e| e.to_string())?;
        if o.status.code() != Some(0) {
            return Err(format!("report exited {:?}", o.status.code()));
        }
        std::fs::read(path).map_err(|e| e.to_string())
    };
    let a = run(&dir.join("a.json"))?;
    let b = run(&dir.join("b.json"))?;
    let verify = || {
        Command::new(env!("CARGO_BIN_EXE_sinecone"))
            .args(["verify", "theorem1", "case1_cylinder", "--seed", "7"])
            .output()
            .map(|o| o.stdout)
            .map_err(|e| e.to_string())
    };
    let (va, vb) = (verify()?, verify()?);
    let _ = std::fs::remove_dir_all(&dir);
    if a != b || va != vb {
        return Err("reports differ between runs".into());
    }
    Ok(format!("report ({} bytes) and verify output byte-identical", a.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("curvature core on round spheres", curvature_core),
        ("conformal Ricci two-path agreement", conformal_two_path),
        ("Case-1 conformally Einstein cylinder", case1_end_to_end),
        ("cylinder/sine-cone and cone-product isometries", isometries),
        ("Case-2 obstruction and Case-3 Obata identities", case2_and_case3),
        ("Gray-Hervella classification", gray_hervella),
        ("Sasaki-Einstein to nearly Kahler cone chain", cone_chain),
        ("W1+W4 and Vaisman cylinders", cylinder_structures),
        ("negative controls", negative_controls),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail}) [{secs:.1}s]", k + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {}: {name} ({detail}) [{secs:.1}s]", k + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria pass", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
