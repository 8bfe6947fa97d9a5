//! Differential forms stored on strictly increasing multi-indices.
//!
//! A `k`-form `α = Σ_I α_I dx^I` keeps one coefficient per increasing
//! multi-index `I`, so antisymmetry holds by construction. Wedge products use
//! the determinant normalization (`dx^1 ∧ dx^2` has component 1 at `(1,2)`).

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::DMatrix;

use super::Orientation;
use crate::error::{GeomError, Result};
use crate::jets::{jet_det, lift_point, Jet2};

pub trait FormCoeff:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn zero(chart_dim: usize) -> Self;
    fn chart_dim(&self) -> usize;
}

impl FormCoeff for f64 {
    fn zero(_: usize) -> Self {
        0.0
    }
    fn chart_dim(&self) -> usize {
        0
    }
}

impl FormCoeff for Jet2 {
    fn zero(chart_dim: usize) -> Self {
        Jet2::constant(0.0, chart_dim)
    }
    fn chart_dim(&self) -> usize {
        self.dim()
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Strictly increasing multi-indices of length `k` in `0..n`, lexicographic.
pub fn multi_indices(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::with_capacity(binomial(n, k));
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn rank(n: usize, idx: &[usize]) -> usize {
    let k = idx.len();
    let mut r = 0;
    let mut prev: isize = -1;
    for (pos, &c) in idx.iter().enumerate() {
        for j in (prev + 1) as usize..c {
            r += binomial(n - 1 - j, k - 1 - pos);
        }
        prev = c as isize;
    }
    r
}

/// Sorts `idx`, returning the permutation sign, or `None` on a repeated index.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Form<C = f64> {
    dim: usize,
    degree: usize,
    coeffs: Vec<C>,
}

pub type JetForm = Form<Jet2>;

impl<C: FormCoeff> Form<C> {
    pub fn zeros(dim: usize, degree: usize, chart_dim: usize) -> Self {
        Self { dim, degree, coeffs: vec![C::zero(chart_dim); binomial(dim, degree)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn chart_dim(&self) -> usize {
        self.coeffs.first().map_or(0, FormCoeff::chart_dim)
    }

    /// A 0-form.
    pub fn scalar(dim: usize, c: C) -> Self {
        Self { dim, degree: 0, coeffs: vec![c] }
    }

    /// The coordinate 1-form `dx^i` with constant coefficients.
    pub fn dx(dim: usize, i: usize, chart_dim: usize) -> Self
    where
        C: From<f64>,
    {
        let mut f = Self::zeros(dim, 1, chart_dim);
        f.coeffs[i] = C::from(1.0) + C::zero(chart_dim);
        f
    }

    pub fn from_covector(v: &[C]) -> Self {
        Self { dim: v.len(), degree: 1, coeffs: v.to_vec() }
    }

    /// Component with arbitrary (unsorted) indices.
    pub fn get(&self, idx: &[usize]) -> C {
        debug_assert_eq!(idx.len(), self.degree);
        match sort_with_sign(idx) {
            Some((sorted, sign)) => self.coeffs[rank(self.dim, &sorted)] * sign,
            None => C::zero(self.chart_dim()),
        }
    }

    /// Adds `c` to the component at `idx` (unsorted indices allowed).
    pub fn add_to(&mut self, idx: &[usize], c: C) {
        if let Some((sorted, sign)) = sort_with_sign(idx) {
            let r = rank(self.dim, &sorted);
            self.coeffs[r] = self.coeffs[r] + c * sign;
        }
    }

    pub fn set(&mut self, idx: &[usize], c: C) {
        if let Some((sorted, sign)) = sort_with_sign(idx) {
            let r = rank(self.dim, &sorted);
            self.coeffs[r] = c * sign;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, C)> + '_ {
        multi_indices(self.dim, self.degree).into_iter().zip(self.coeffs.iter().copied())
    }

    pub fn wedge(&self, other: &Form<C>) -> Form<C> {
        assert_eq!(self.dim, other.dim, "wedge of forms on different charts");
        let k = self.degree + other.degree;
        let cd = self.chart_dim().max(other.chart_dim());
        let mut out = Form::zeros(self.dim, k, cd);
        if k > self.dim {
            return out;
        }
        let left = multi_indices(self.dim, self.degree);
        let right = multi_indices(other.dim, other.degree);
        for (i, a) in left.iter().enumerate() {
            for (j, b) in right.iter().enumerate() {
                if a.iter().any(|x| b.contains(x)) {
                    continue;
                }
                let mut idx = a.clone();
                idx.extend_from_slice(b);
                out.add_to(&idx, self.coeffs[i] * other.coeffs[j]);
            }
        }
        out
    }

    pub fn scale(&self, s: C) -> Form<C> {
        Form { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(|c| *c * s).collect() }
    }

    pub fn scale_f64(&self, s: f64) -> Form<C> {
        Form { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(|c| *c * s).collect() }
    }

    pub fn add(&self, other: &Form<C>) -> Form<C> {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree));
        Form {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn sub(&self, other: &Form<C>) -> Form<C> {
        self.add(&other.scale_f64(-1.0))
    }

    /// Re-indexes into a chart of dimension `new_dim`, sending index `i` to `map[i]`.
    pub fn embed(&self, new_dim: usize, map: &[usize]) -> Form<C> {
        let mut out = Form::zeros(new_dim, self.degree, self.chart_dim());
        for (idx, c) in self.iter() {
            let mapped: Vec<usize> = idx.iter().map(|&i| map[i]).collect();
            out.add_to(&mapped, c);
        }
        out
    }

    /// Interior product with a vector in the first slot.
    pub fn interior(&self, v: &[C]) -> Form<C> {
        assert!(self.degree > 0);
        let cd = self.chart_dim();
        let mut out = Form::zeros(self.dim, self.degree - 1, cd);
        for (r, idx) in multi_indices(self.dim, self.degree - 1).into_iter().enumerate() {
            let mut acc = C::zero(cd);
            for (i, vi) in v.iter().enumerate() {
                let mut full = vec![i];
                full.extend_from_slice(&idx);
                acc = acc + *vi * self.get(&full);
            }
            out.coeffs[r] = acc;
        }
        out
    }

    /// Pullback through a map with Jacobian `jac[a][i] = ∂F^a/∂y^i`
    /// (rows indexed by this form's chart, columns by the source chart).
    pub fn pullback(&self, jac: &[Vec<C>]) -> Form<C>
    where
        C: PullbackDet,
    {
        assert_eq!(jac.len(), self.dim);
        let src = jac.first().map_or(0, Vec::len);
        let cd = self.chart_dim();
        let k = self.degree;
        let mut out = Form::zeros(src, k, cd);
        let targets = multi_indices(self.dim, k);
        for (r, i_idx) in multi_indices(src, k).into_iter().enumerate() {
            let mut acc = C::zero(cd);
            for (t, a_idx) in targets.iter().enumerate() {
                let block: Vec<Vec<C>> =
                    a_idx.iter().map(|&a| i_idx.iter().map(|&i| jac[a][i]).collect()).collect();
                acc = acc + self.coeffs[t] * C::det(&block, cd);
            }
            out.coeffs[r] = acc;
        }
        out
    }
}

/// Determinants of small coefficient blocks, for pullbacks.
pub trait PullbackDet: FormCoeff {
    fn det(block: &[Vec<Self>], chart_dim: usize) -> Self;
}

impl PullbackDet for Jet2 {
    fn det(block: &[Vec<Self>], chart_dim: usize) -> Self {
        jet_det(block, chart_dim)
    }
}

impl PullbackDet for f64 {
    fn det(block: &[Vec<Self>], _: usize) -> Self {
        small_det(block)
    }
}

fn small_det(block: &[Vec<f64>]) -> f64 {
    let k = block.len();
    match k {
        0 => 1.0,
        1 => block[0][0],
        2 => block[0][0] * block[1][1] - block[0][1] * block[1][0],
        _ => DMatrix::from_fn(k, k, |i, j| block[i][j]).determinant(),
    }
}

impl Form<f64> {
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl From<f64> for Jet2 {
    fn from(v: f64) -> Self {
        Jet2::constant(v, 0)
    }
}

impl JetForm {
    pub fn value(&self) -> Form<f64> {
        Form { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(Jet2::value).collect() }
    }

    /// Coefficientwise partial derivative along chart coordinate `k`.
    pub fn partial(&self, k: usize) -> Form<f64> {
        Form { dim: self.dim, degree: self.degree, coeffs: self.coeffs.iter().map(|c| c.d(k)).collect() }
    }

    /// Constant-coefficient `dx^i` in a chart whose jets have dimension `chart_dim`.
    pub fn basis(dim: usize, i: usize, chart_dim: usize) -> JetForm {
        let mut f = Form::zeros(dim, 1, chart_dim);
        f.coeffs[i] = Jet2::constant(1.0, chart_dim);
        f
    }

    /// Exterior derivative of an evaluated jet form, `dα = Σ_i dx^i ∧ ∂_i α`.
    pub fn exterior_derivative(&self) -> Result<Form<f64>> {
        if self.degree >= self.dim {
            return Err(GeomError::DegreeOverflow { degree: self.degree, dim: self.dim });
        }
        if self.chart_dim() != self.dim {
            return Err(GeomError::DimensionMismatch { expected: self.dim, found: self.chart_dim() });
        }
        let mut out = Form::<f64>::zeros(self.dim, self.degree + 1, 0);
        for i in 0..self.dim {
            let mut dxi = Form::<f64>::zeros(self.dim, 1, 0);
            dxi.coeffs[i] = 1.0;
            out = out.add(&dxi.wedge(&self.partial(i)));
        }
        Ok(out)
    }
}

/// A differential form given by jet components on a chart.
#[derive(Clone)]
pub struct FormField {
    dim: usize,
    degree: usize,
    components: Arc<dyn Fn(&[Jet2]) -> JetForm + Send + Sync>,
}

impl Debug for FormField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FormField").field("dim", &self.dim).field("degree", &self.degree).finish()
    }
}

impl FormField {
    pub fn new(dim: usize, degree: usize, f: impl Fn(&[Jet2]) -> JetForm + Send + Sync + 'static) -> Self {
        Self { dim, degree, components: Arc::new(f) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval_jets(&self, x: &[Jet2]) -> JetForm {
        (self.components)(x)
    }

    pub fn at(&self, p: &[f64]) -> Result<JetForm> {
        if p.len() != self.dim {
            return Err(GeomError::DimensionMismatch { expected: self.dim, found: p.len() });
        }
        Ok(self.eval_jets(&lift_point(p)?))
    }

    pub fn wedge(&self, other: &FormField) -> FormField {
        let (a, b) = (self.clone(), other.clone());
        FormField::new(self.dim, self.degree + other.degree, move |x| {
            a.eval_jets(x).wedge(&b.eval_jets(x))
        })
    }

    pub fn add(&self, other: &FormField) -> FormField {
        let (a, b) = (self.clone(), other.clone());
        FormField::new(self.dim, self.degree, move |x| a.eval_jets(x).add(&b.eval_jets(x)))
    }

    pub fn scale(&self, s: f64) -> FormField {
        let a = self.clone();
        FormField::new(self.dim, self.degree, move |x| a.eval_jets(x).scale_f64(s))
    }

    /// The coordinate differential `dx^i`.
    pub fn coordinate_differential(dim: usize, i: usize) -> FormField {
        FormField::new(dim, 1, move |x| JetForm::basis(dim, i, x[0].dim()))
    }
}

/// `dψ` at `p`.
pub fn exterior_derivative(psi: &FormField, p: &[f64]) -> Result<Form<f64>> {
    if psi.degree >= psi.dim {
        return Err(GeomError::DegreeOverflow { degree: psi.degree, dim: psi.dim });
    }
    psi.at(p)?.exterior_derivative()
}

pub fn wedge<C: FormCoeff>(a: &Form<C>, b: &Form<C>) -> Form<C> {
    a.wedge(b)
}

/// Raises every index: `α^I = Σ_A det(g⁻¹[I, A]) α_A`.
fn raise(alpha: &Form<f64>, ginv: &DMatrix<f64>) -> Form<f64> {
    let idx = multi_indices(alpha.dim, alpha.degree);
    let mut out = Form::<f64>::zeros(alpha.dim, alpha.degree, 0);
    for (r, i_idx) in idx.iter().enumerate() {
        let mut acc = 0.0;
        for (a, a_idx) in idx.iter().enumerate() {
            if alpha.coeffs[a] == 0.0 {
                continue;
            }
            let block: Vec<Vec<f64>> =
                i_idx.iter().map(|&i| a_idx.iter().map(|&j| ginv[(i, j)]).collect()).collect();
            acc += small_det(&block) * alpha.coeffs[a];
        }
        out.coeffs[r] = acc;
    }
    out
}

/// Pointwise inner product of forms of equal degree.
pub fn inner_product(a: &Form<f64>, b: &Form<f64>, ginv: &DMatrix<f64>) -> Result<f64> {
    if a.degree != b.degree || a.dim != b.dim {
        return Err(GeomError::DegreeMismatch(format!("{} vs {}", a.degree, b.degree)));
    }
    Ok(raise(a, ginv).coeffs.iter().zip(&b.coeffs).map(|(x, y)| x * y).sum())
}

/// The Riemannian volume form `±√det g dx^1 ∧ … ∧ dx^n`.
pub fn volume_form(g: &DMatrix<f64>, orientation: Option<Orientation>) -> Result<Form<f64>> {
    let o = orientation.ok_or(GeomError::Unoriented)?;
    let n = g.nrows();
    let mut v = Form::<f64>::zeros(n, n, 0);
    v.coeffs[0] = o.sign() * g.determinant().sqrt();
    Ok(v)
}

/// Hodge star, characterized by `ψ ∧ *χ = ⟨ψ, χ⟩ vol_g`.
pub fn hodge_star(alpha: &Form<f64>, g: &DMatrix<f64>, orientation: Option<Orientation>) -> Result<Form<f64>> {
    let o = orientation.ok_or(GeomError::Unoriented)?;
    let n = alpha.dim;
    if g.nrows() != n {
        return Err(GeomError::DimensionMismatch { expected: n, found: g.nrows() });
    }
    let ginv = g.clone().try_inverse().ok_or_else(|| GeomError::SingularMetric(vec![]))?;
    let up = raise(alpha, &ginv);
    let vol = o.sign() * g.determinant().sqrt();
    let k = alpha.degree;
    let mut out = Form::<f64>::zeros(n, n - k, 0);
    for (r, j_idx) in multi_indices(n, n - k).into_iter().enumerate() {
        let comp: Vec<usize> = (0..n).filter(|i| !j_idx.contains(i)).collect();
        let mut full = comp.clone();
        full.extend_from_slice(&j_idx);
        let (_, sign) = sort_with_sign(&full).expect("complementary indices are distinct");
        out.coeffs[r] = vol * sign * up.get(&comp);
    }
    Ok(out)
}

/// The 1-form `(Ω⌟ψ)(Z) = ½ g^{ia} g^{jb} Ω_ab ψ_ijZ` for a 2-form `Ω` and 3-form `ψ`.
pub fn metric_contraction(omega: &Form<f64>, psi: &Form<f64>, ginv: &DMatrix<f64>) -> Result<Form<f64>> {
    if omega.degree != 2 || psi.degree != 3 {
        return Err(GeomError::DegreeMismatch(format!(
            "contraction needs a 2-form and a 3-form, got {} and {}",
            omega.degree, psi.degree
        )));
    }
    let n = omega.dim;
    let up = raise(omega, ginv);
    let mut out = Form::<f64>::zeros(n, 1, 0);
    for z in 0..n {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += up.get(&[i, j]) * psi.get(&[i, j, z]);
                }
            }
        }
        out.coeffs[z] = 0.5 * acc;
    }
    Ok(out)
}
