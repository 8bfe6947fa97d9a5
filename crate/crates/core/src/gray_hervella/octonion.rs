use std::ops::{Add, Mul, Sub};

use crate::jets::{Jet2, JetMat};
use crate::metric_builders::{round_sphere, stereographic_embedding};
use crate::tensor_core::Orientation;

use super::AlmostHermitianField;

/// Lines of the Fano plane, zero-based: `e_a × e_b = e_c` for `(a, b, c)` and its cyclic shifts.
pub const FANO_TRIPLES: [(usize, usize, usize); 7] =
    [(0, 1, 3), (1, 2, 4), (2, 3, 5), (3, 4, 6), (4, 5, 0), (5, 6, 1), (6, 0, 2)];

/// Cross product on `Im 𝕆 = ℝ⁷`.
pub fn cross7<T>(u: &[T], v: &[T], zero: T) -> [T; 7]
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    let mut out = [zero; 7];
    for &(a, b, c) in &FANO_TRIPLES {
        out[c] = out[c] + (u[a] * v[b] - u[b] * v[a]);
        out[a] = out[a] + (u[b] * v[c] - u[c] * v[b]);
        out[b] = out[b] + (u[c] * v[a] - u[a] * v[c]);
    }
    out
}

/// Round unit `S⁶` in the stereographic chart with `J_x v = x × v`.
pub fn octonionic_s6() -> AlmostHermitianField {
    let emb = stereographic_embedding(6);
    let j = move |u: &[Jet2]| {
        let cd = u[0].dim();
        let zero = Jet2::constant(0.0, cd);
        let x = emb.apply_jets(u);
        let e = emb.jacobian_jets(u);
        // E^T E = λ² I with λ² = 4/(1+|u|²)²
        let mut s = zero;
        for ui in u {
            s += *ui * *ui;
        }
        let inv_lambda_sq = (s + 1.0).sqr() * 0.25;
        let mut out = JetMat::zeros(6, cd);
        for col in 0..6 {
            let ev: Vec<Jet2> = (0..7).map(|a| e[a][col]).collect();
            let w = cross7(&x, &ev, zero);
            for row in 0..6 {
                let mut acc = zero;
                for a in 0..7 {
                    acc += e[a][row] * w[a];
                }
                out[(row, col)] = acc * inv_lambda_sq;
            }
        }
        out
    };
    // oriented by Ω³/6, which is opposite to dx¹∧…∧dx⁶ in this chart
    AlmostHermitianField::new(round_sphere(6, 1.0).with_orientation(Some(Orientation::Negative)), j)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_product_norm_identity() {
        let u = [0.3, -1.2, 0.5, 0.7, 0.1, -0.4, 0.9];
        let v = [1.1, 0.2, -0.3, 0.5, -0.8, 0.6, 0.05];
        let w = cross7(&u, &v, 0.0);
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let lhs = dot(&w, &w);
        let rhs = dot(&u, &u) * dot(&v, &v) - dot(&u, &v).powi(2);
        assert!((lhs - rhs).abs() < 1e-12);
        assert!(dot(&w, &u).abs() < 1e-13 && dot(&w, &v).abs() < 1e-13);
        let uu = cross7(&u, &cross7(&u, &v, 0.0), 0.0);
        // u × (u × v) = (u·v)u − |u|² v
        for i in 0..7 {
            assert!((uu[i] - (dot(&u, &v) * u[i] - dot(&u, &u) * v[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn octonionic_sphere_is_strict_nearly_kahler() {
        use crate::gray_hervella::{fundamental_form, gh_decompose, nijenhuis_split};
        use crate::tensor_core::volume_form;
        let s = octonionic_s6();
        for p in [[0.3, -0.2, 0.5, 0.1, -0.4, 0.25], [1.2, 0.4, -0.7, 0.0, 0.3, -1.5]] {
            let (j2, compat) = s.validate_at(&p).unwrap();
            assert!(j2 < 1e-12 && compat < 1e-12);
            let c = gh_decompose(&s, &p).unwrap();
            assert!((c.nabla_norm_sq - 24.0).abs() < 1e-9, "{}", c.nabla_norm_sq);
            assert!((c.w1_norm.powi(2) - 24.0).abs() < 1e-9);
            assert!(c.w2_norm < 1e-9 && c.w3_norm < 1e-9 && c.w4_norm < 1e-9);
            let (n1, n2) = nijenhuis_split(&s, &p).unwrap();
            assert!(n2.max_abs() < 1e-9 && n1.max_abs() > 0.1);
            assert!(s.point(&p).unwrap().nearly_kahler_defect() < 1e-10);
            let om = fundamental_form(&s, &p).unwrap();
            let top = om.wedge(&om).wedge(&om).scale(1.0 / 6.0);
            let vol = volume_form(&s.metric.values_at(&p).unwrap(), s.metric.orientation()).unwrap();
            assert!(top.sub(&vol).max_abs() < 1e-8 * vol.max_abs(), "{top:?} {vol:?}");
        }
    }
}
