//! Constructors for the metrics used throughout the crate, chart quadrature,
//! and the named fixture registry.

mod maps;
pub mod quadrature;
pub mod registry;

use std::sync::Arc;

pub use maps::{pullback_endomorphism, pullback_form, pullback_metric, CoordinateMap};
pub use quadrature::{chart_quadrature, chart_quadrature_with, gauss_legendre, QuadratureGrid, QuadratureResult};
pub use registry::{fixture_names, fixture_registry, lookup, ExpectedProperty, FixtureEntry, FixtureStructure, SampleBox};

use crate::jets::{Jet2, JetMat};
use crate::tensor_core::{MetricField, ScalarField};

fn squared_norm(x: &[Jet2]) -> Jet2 {
    let mut s = Jet2::constant(0.0, x[0].dim());
    for xi in x {
        s += *xi * *xi;
    }
    s
}

/// Round `n`-sphere of the given radius in the stereographic chart on `ℝⁿ`:
/// `g_ij = 4 radius² δ_ij / (1+|x|²)²`, with `Ric = (n−1)/radius² · g`.
pub fn round_sphere(n: usize, radius: f64) -> MetricField {
    let r2 = radius * radius;
    MetricField::new(n, move |x: &[Jet2]| {
        let cd = x[0].dim();
        let conf = (squared_norm(x) + 1.0).recip().sqr() * (4.0 * r2);
        JetMat::from_fn(n, |i, j| if i == j { conf } else { Jet2::constant(0.0, cd) })
    })
}

/// Inverse stereographic projection `ℝⁿ → Sⁿ ⊂ ℝⁿ⁺¹` onto the unit sphere.
pub fn stereographic_embedding(n: usize) -> CoordinateMap {
    CoordinateMap::new(
        n,
        n + 1,
        move |u: &[Jet2]| {
            let s = squared_norm(u);
            let inv = (s + 1.0).recip();
            let mut out: Vec<Jet2> = u.iter().map(|ui| *ui * inv * 2.0).collect();
            out.push((s - 1.0) * inv);
            out
        },
        move |u: &[Jet2]| {
            let cd = u[0].dim();
            let s = squared_norm(u);
            let inv = (s + 1.0).recip();
            let inv2 = inv.sqr();
            let mut rows: Vec<Vec<Jet2>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let diag = if i == j { inv * 2.0 } else { Jet2::constant(0.0, cd) };
                            diag - u[i] * u[j] * inv2 * 4.0
                        })
                        .collect()
                })
                .collect();
            rows.push((0..n).map(|j| u[j] * inv2 * 4.0).collect());
            rows
        },
    )
}

/// The last ambient coordinate `x_{n+1}` restricted to the unit sphere, in the stereographic chart.
pub fn stereographic_height() -> ScalarField {
    ScalarField::new(|u: &[Jet2]| {
        let s = squared_norm(u);
        (s - 1.0) / (s + 1.0)
    })
}

/// Round `n`-sphere in iterated angular coordinates `(θ₁, …, θ_{n−1}, φ)`, with
/// `g = dθ₁² + sin²θ₁ dθ₂² + … + (Π sin²θ_i) dφ²`. The ambient height is `cos θ₁`.
pub fn round_sphere_angular(n: usize, radius: f64) -> MetricField {
    let r2 = radius * radius;
    MetricField::new(n, move |x: &[Jet2]| {
        let cd = x[0].dim();
        let mut diag = Vec::with_capacity(n);
        let mut w = Jet2::constant(r2, cd);
        for i in 0..n {
            diag.push(w);
            if i + 1 < n {
                w = w * x[i].sin().sqr();
            }
        }
        JetMat::from_fn(n, |i, j| if i == j { diag[i] } else { Jet2::constant(0.0, cd) })
    })
}

/// Block metric `g ⊕ dt²` with `t` as the last coordinate.
pub fn product_cylinder(g: &MetricField) -> MetricField {
    warped_product(g, |t| t.constant_like(1.0), |_| true)
}

/// Warped product `w(t)² g + dt²`, `t` last.
pub fn warped_product(
    g: &MetricField,
    warp: impl Fn(Jet2) -> Jet2 + Send + Sync + 'static,
    t_domain: impl Fn(f64) -> bool + Send + Sync + 'static,
) -> MetricField {
    let n = g.dim();
    let inner = g.clone();
    let inner_dom = g.clone();
    MetricField::new(n + 1, move |x: &[Jet2]| {
        let cd = x[0].dim();
        let w2 = warp(x[n]).sqr();
        let base = inner.eval_jets(&x[..n]);
        JetMat::from_fn(n + 1, |i, j| {
            if i < n && j < n {
                base[(i, j)] * w2
            } else if i == n && j == n {
                Jet2::constant(1.0, cd)
            } else {
                Jet2::constant(0.0, cd)
            }
        })
    })
    .with_domain(move |p| t_domain(p[n]) && inner_dom.contains(&p[..n]))
    .with_orientation(g.orientation())
}

/// Riemannian cone `r² g + dr²` on `M × (0, ∞)`, radial coordinate last.
pub fn cone_metric(g: &MetricField) -> MetricField {
    warped_product(g, |r| r, |r| r > 0.0)
}

/// Sine-cone `sin² s · g + ds²` on `M × (0, π)`, `s` last.
pub fn sine_cone_metric(g: &MetricField) -> MetricField {
    warped_product(g, |s| s.sin(), |s| s > 0.0 && s < std::f64::consts::PI)
}

/// `e^{2f} g`.
pub fn conformal_rescale(g: &MetricField, f: &ScalarField) -> MetricField {
    let n = g.dim();
    let (inner, f) = (g.clone(), f.clone());
    let dom = g.clone();
    MetricField::new(n, move |x: &[Jet2]| {
        let e2f = (f.eval_jets(x) * 2.0).exp();
        let base = inner.eval_jets(x);
        JetMat::from_fn(n, |i, j| base[(i, j)] * e2f)
    })
    .with_domain(move |p| dom.contains(p))
    .with_orientation(g.orientation())
}

/// Riemannian product `g ⊕ h`, coordinates of `g` first.
pub fn product_metric(g: &MetricField, h: &MetricField) -> MetricField {
    let (n, m) = (g.dim(), h.dim());
    let (gi, hi) = (g.clone(), h.clone());
    let (gd, hd) = (g.clone(), h.clone());
    MetricField::new(n + m, move |x: &[Jet2]| {
        let cd = x[0].dim();
        let a = gi.eval_jets(&x[..n]);
        let b = hi.eval_jets(&x[n..]);
        JetMat::from_fn(n + m, |i, j| {
            if i < n && j < n {
                a[(i, j)]
            } else if i >= n && j >= n {
                b[(i - n, j - n)]
            } else {
                Jet2::constant(0.0, cd)
            }
        })
    })
    .with_domain(move |p| gd.contains(&p[..n]) && hd.contains(&p[n..]))
}

/// `(x, t) ↦ (x, 2 atan(e^{βt+γ}))`, from the cylinder `M × ℝ` onto the sine-cone `M × (0, π)`.
pub fn cylinder_to_sine_cone(base_dim: usize, beta: f64, gamma: f64) -> CoordinateMap {
    let n = base_dim;
    CoordinateMap::new(
        n + 1,
        n + 1,
        move |y: &[Jet2]| {
            let mut out = y[..n].to_vec();
            out.push(crate::jets::gudermannian_angle(&(y[n] * beta + gamma)));
            out
        },
        move |y: &[Jet2]| {
            let cd = y[0].dim();
            // ds/dt = β sech(βt+γ)
            let ds = (y[n] * beta + gamma).cosh().recip() * beta;
            (0..=n)
                .map(|a| {
                    (0..=n)
                        .map(|i| {
                            if a == n && i == n {
                                ds
                            } else {
                                Jet2::constant(if a == i { 1.0 } else { 0.0 }, cd)
                            }
                        })
                        .collect()
                })
                .collect()
        },
    )
}

/// `(x, t) ↦ (x, e^t)`, from the cylinder onto the cone.
pub fn cylinder_to_cone(base_dim: usize) -> CoordinateMap {
    let n = base_dim;
    CoordinateMap::new(
        n + 1,
        n + 1,
        move |y: &[Jet2]| {
            let mut out = y[..n].to_vec();
            out.push(y[n].exp());
            out
        },
        move |y: &[Jet2]| {
            let cd = y[0].dim();
            let e = y[n].exp();
            (0..=n)
                .map(|a| {
                    (0..=n)
                        .map(|i| if a == n && i == n { e } else { Jet2::constant(if a == i { 1.0 } else { 0.0 }, cd) })
                        .collect()
                })
                .collect()
        },
    )
}

/// Polar change `(…, θ, R) ↦ (…, t = R sin θ, s = R cos θ)` used for the cone-product identity.
///
/// `layout` describes where the two planar coordinates sit: the source chart is
/// `(x_g, x_h, θ, R)` and the target chart is `(x_g, t, x_h, s)`; `flip` replaces
/// `s = R cos θ` by `s = R sin θ` (a deliberately wrong map for controls).
pub fn cone_product_map(g_dim: usize, h_dim: usize, flip: bool) -> CoordinateMap {
    let (n, m) = (g_dim, h_dim);
    let src = n + m + 2;
    let map_fn = move |y: &[Jet2]| -> Vec<Jet2> {
        let (theta, radius) = (y[n + m], y[n + m + 1]);
        let t = radius * theta.sin();
        let s = if flip { radius * theta.sin() } else { radius * theta.cos() };
        let mut out = y[..n].to_vec();
        out.push(t);
        out.extend_from_slice(&y[n..n + m]);
        out.push(s);
        out
    };
    let jac_fn = move |y: &[Jet2]| -> Vec<Vec<Jet2>> {
        let cd = y[0].dim();
        let z = Jet2::constant(0.0, cd);
        let one = Jet2::constant(1.0, cd);
        let (theta, radius) = (y[n + m], y[n + m + 1]);
        let (st, ct) = (theta.sin(), theta.cos());
        let mut rows = vec![vec![z; src]; src];
        for i in 0..n {
            rows[i][i] = one;
        }
        for i in 0..m {
            rows[n + 1 + i][n + i] = one;
        }
        // t = R sin θ
        rows[n][n + m] = radius * ct;
        rows[n][n + m + 1] = st;
        if flip {
            rows[src - 1][n + m] = radius * ct;
            rows[src - 1][n + m + 1] = st;
        } else {
            rows[src - 1][n + m] = -(radius * st);
            rows[src - 1][n + m + 1] = ct;
        }
        rows
    };
    CoordinateMap::new(src, src, map_fn, jac_fn)
}

/// `R²(sin²θ g + cos²θ h + dθ²) + dR²` on the chart `(x_g, x_h, θ, R)`.
pub fn cone_over_join(g: &MetricField, h: Option<&MetricField>) -> MetricField {
    let n = g.dim();
    let m = h.map_or(0, MetricField::dim);
    let total = n + m + 2;
    let (gi, hi) = (g.clone(), h.cloned());
    MetricField::new(total, move |x: &[Jet2]| {
        let cd = x[0].dim();
        let (theta, radius) = (x[n + m], x[n + m + 1]);
        let r2 = radius.sqr();
        let a = gi.eval_jets(&x[..n]);
        let b = hi.as_ref().map(|h| h.eval_jets(&x[n..n + m]));
        let (s2, c2) = (theta.sin().sqr() * r2, theta.cos().sqr() * r2);
        JetMat::from_fn(total, |i, j| {
            if i < n && j < n {
                a[(i, j)] * s2
            } else if i >= n && i < n + m && j >= n && j < n + m {
                b.as_ref().map_or(Jet2::constant(0.0, cd), |b| b[(i - n, j - n)] * c2)
            } else if i == n + m && j == n + m {
                r2
            } else if i == total - 1 && j == total - 1 {
                Jet2::constant(1.0, cd)
            } else {
                Jet2::constant(0.0, cd)
            }
        })
    })
    .with_domain(move |p| p[n + m + 1] > 0.0)
}

/// `(t² g + dt²) + (s² h + ds²)` on the chart `(x_g, t, x_h, s)`; with `h = None`
/// the second factor is the line `ds²`.
pub fn product_of_cones(g: &MetricField, h: Option<&MetricField>) -> MetricField {
    let left = cone_metric(g);
    let right = match h {
        Some(h) => cone_metric(h),
        None => MetricField::euclidean(1),
    };
    let cone_g = left.clone();
    let n = g.dim();
    let m = h.map_or(0, MetricField::dim);
    let right_c = right.clone();
    // the line factor has no domain restriction; cone factors need positive radii
    let hm = h.is_some();
    MetricField::new(n + m + 2, move |x: &[Jet2]| {
        let cd = x[0].dim();
        let a = cone_g.eval_jets(&x[..n + 1]);
        let b = right_c.eval_jets(&x[n + 1..]);
        JetMat::from_fn(n + m + 2, |i, j| {
            if i <= n && j <= n {
                a[(i, j)]
            } else if i > n && j > n {
                b[(i - n - 1, j - n - 1)]
            } else {
                Jet2::constant(0.0, cd)
            }
        })
    })
    .with_domain(move |p| p[n] > 0.0 && (!hm || p[n + m + 1] > 0.0))
}

/// Shared handle type for jet-valued endomorphism fields (almost complex structures).
pub type EndomorphismFn = Arc<dyn Fn(&[Jet2]) -> JetMat + Send + Sync>;
