use std::fmt;
use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::jets::{lift_point, lift_values, Jet2, JetMat};
use crate::tensor_core::{FormField, MetricField};

type MapFn = dyn Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync;
type JacFn = dyn Fn(&[Jet2]) -> Vec<Vec<Jet2>> + Send + Sync;

/// A smooth map between charts, with its Jacobian supplied as jet components.
///
/// The Jacobian is given explicitly rather than read off the gradients of
/// `map`: pulling back a metric needs the *derivatives* of the Jacobian,
/// which would otherwise require third-order jets.
#[derive(Clone)]
pub struct CoordinateMap {
    source_dim: usize,
    target_dim: usize,
    map: Arc<MapFn>,
    jacobian: Arc<JacFn>,
}

impl fmt::Debug for CoordinateMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoordinateMap({} -> {})", self.source_dim, self.target_dim)
    }
}

impl CoordinateMap {
    /// `jacobian(y)[a][i] = ∂F^a/∂y^i`.
    pub fn new(
        source_dim: usize,
        target_dim: usize,
        map: impl Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync + 'static,
        jacobian: impl Fn(&[Jet2]) -> Vec<Vec<Jet2>> + Send + Sync + 'static,
    ) -> Self {
        Self { source_dim, target_dim, map: Arc::new(map), jacobian: Arc::new(jacobian) }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(
            n,
            n,
            |y: &[Jet2]| y.to_vec(),
            move |y: &[Jet2]| {
                let cd = y[0].dim();
                (0..n)
                    .map(|a| (0..n).map(|i| Jet2::constant(if a == i { 1.0 } else { 0.0 }, cd)).collect())
                    .collect()
            },
        )
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn apply_jets(&self, y: &[Jet2]) -> Vec<Jet2> {
        (self.map)(y)
    }

    pub fn jacobian_jets(&self, y: &[Jet2]) -> Vec<Vec<Jet2>> {
        (self.jacobian)(y)
    }

    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        self.apply_jets(&lift_values(p)).iter().map(Jet2::value).collect()
    }

    pub fn jacobian_at(&self, p: &[f64]) -> nalgebra::DMatrix<f64> {
        let jac = self.jacobian_jets(&lift_values(p));
        nalgebra::DMatrix::from_fn(self.target_dim, self.source_dim, |a, i| jac[a][i].value())
    }

    /// Largest mismatch between the supplied Jacobian (value and derivatives) and
    /// the gradients/Hessians of the map components.
    pub fn jacobian_consistency(&self, p: &[f64]) -> Result<f64> {
        let y = lift_point(p)?;
        let f = self.apply_jets(&y);
        let jac = self.jacobian_jets(&y);
        let mut worst: f64 = 0.0;
        for a in 0..self.target_dim {
            for i in 0..self.source_dim {
                worst = worst.max((jac[a][i].value() - f[a].d(i)).abs());
                for k in 0..self.source_dim {
                    worst = worst.max((jac[a][i].d(k) - f[a].dd(i, k)).abs());
                }
            }
        }
        Ok(worst)
    }

    /// `outer ∘ self`.
    pub fn then(&self, outer: &CoordinateMap) -> CoordinateMap {
        assert_eq!(self.target_dim, outer.source_dim);
        let (inner, outer_c) = (self.clone(), outer.clone());
        let (inner2, outer2) = (self.clone(), outer.clone());
        let mid = self.target_dim;
        CoordinateMap::new(
            self.source_dim,
            outer.target_dim,
            move |y: &[Jet2]| outer_c.apply_jets(&inner.apply_jets(y)),
            move |y: &[Jet2]| {
                let cd = y[0].dim();
                let x = inner2.apply_jets(y);
                let ji = inner2.jacobian_jets(y);
                let jo = outer2.jacobian_jets(&x);
                jo.iter()
                    .map(|row| {
                        (0..ji[0].len())
                            .map(|i| {
                                let mut acc = Jet2::constant(0.0, cd);
                                for b in 0..mid {
                                    acc += row[b] * ji[b][i];
                                }
                                acc
                            })
                            .collect()
                    })
                    .collect()
            },
        )
    }

    /// Rank check and image-domain check for pulling back `h` at `p`.
    pub fn check_pullback_at(&self, h: &MetricField, p: &[f64]) -> Result<()> {
        let q = self.apply(p);
        if !h.contains(&q) {
            return Err(GeomError::OutsideDomain(q));
        }
        let jac = self.jacobian_at(p);
        let rank = jac.rank(1e-10 * jac.amax().max(1.0));
        if rank < self.source_dim {
            return Err(GeomError::RankDeficient(p.to_vec()));
        }
        Ok(())
    }
}

/// `(φ*h)_ij = ∂_i φ^a ∂_j φ^b h_ab(φ)`.
pub fn pullback_metric(phi: &CoordinateMap, h: &MetricField) -> Result<MetricField> {
    if phi.target_dim != h.dim() {
        return Err(GeomError::DimensionMismatch { expected: h.dim(), found: phi.target_dim });
    }
    let n = phi.source_dim;
    let m = phi.target_dim;
    let (phi_c, h_c) = (phi.clone(), h.clone());
    let (phi_d, h_d) = (phi.clone(), h.clone());
    Ok(MetricField::new(n, move |y: &[Jet2]| {
        let cd = y[0].dim();
        let x = phi_c.apply_jets(y);
        let jac = phi_c.jacobian_jets(y);
        let hm = h_c.eval_jets(&x);
        // (hJ)_{a j}
        let hj: Vec<Vec<Jet2>> = (0..m)
            .map(|a| {
                (0..n)
                    .map(|j| {
                        let mut acc = Jet2::constant(0.0, cd);
                        for b in 0..m {
                            acc += hm[(a, b)] * jac[b][j];
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        JetMat::from_fn(n, |i, j| {
            let mut acc = Jet2::constant(0.0, cd);
            for a in 0..m {
                acc += jac[a][i] * hj[a][j];
            }
            acc
        })
    })
    .with_domain(move |p| phi_d.check_pullback_at(&h_d, p).is_ok())
    .with_orientation(h.orientation()))
}

/// Pullback of a differential form.
pub fn pullback_form(phi: &CoordinateMap, alpha: &FormField) -> FormField {
    assert_eq!(phi.target_dim, alpha.dim());
    let (phi, alpha_c) = (phi.clone(), alpha.clone());
    FormField::new(phi.source_dim, alpha.degree(), move |y: &[Jet2]| {
        let x = phi.apply_jets(y);
        alpha_c.eval_jets(&x).pullback(&phi.jacobian_jets(y))
    })
}

/// Conjugates an endomorphism field through a local diffeomorphism:
/// `(φ*J)(y) = Dφ(y)⁻¹ J(φ(y)) Dφ(y)`.
pub fn pullback_endomorphism(
    phi: &CoordinateMap,
    j: impl Fn(&[Jet2]) -> JetMat + Send + Sync + 'static,
) -> impl Fn(&[Jet2]) -> JetMat + Send + Sync + 'static {
    assert_eq!(phi.source_dim, phi.target_dim);
    let n = phi.source_dim;
    let phi = phi.clone();
    move |y: &[Jet2]| {
        let x = phi.apply_jets(y);
        let jac = phi.jacobian_jets(y);
        let d = JetMat::from_fn(n, |a, i| jac[a][i]);
        let dinv = d.inverse().unwrap_or_else(|_| JetMat::zeros(n, y[0].dim()));
        dinv.matmul(&j(&x)).matmul(&d)
    }
}
