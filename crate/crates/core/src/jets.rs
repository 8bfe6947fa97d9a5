//! Second-order forward-mode differentiation.
//!
//! A [`Jet2`] carries a value together with its gradient and (dense,
//! symmetric) Hessian with respect to the coordinates of a chart of
//! dimension `d <= MAX_DIM`. Every metric, function, form and coordinate map
//! in this crate is written as a function of coordinate jets, so that partial
//! derivatives up to order two come out of ordinary arithmetic.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use thiserror::Error;

/// Largest chart dimension supported by [`Jet2`].
pub const MAX_DIM: usize = 7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("coordinate index {index} out of range for chart dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("chart dimension {0} exceeds the supported maximum of {MAX_DIM}")]
    DimensionTooLarge(usize),
    #[error("chart dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{function}: argument {value} outside domain")]
    Domain { function: &'static str, value: f64 },
}

/// Value, gradient and Hessian of a scalar quantity at a chart point.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet2 {
    dim: usize,
    value: f64,
    grad: [f64; MAX_DIM],
    hess: [[f64; MAX_DIM]; MAX_DIM],
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim;
        let hess: Vec<&[f64]> = (0..d).map(|i| &self.hess[i][..d]).collect();
        f.debug_struct("Jet2")
            .field("value", &self.value)
            .field("grad", &&self.grad[..d])
            .field("hess", &hess)
            .finish()
    }
}

impl Jet2 {
    /// A constant (zero gradient and Hessian) in a chart of dimension `dim`.
    ///
    /// Panics if `dim > MAX_DIM`.
    pub fn constant(value: f64, dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "chart dimension {dim} exceeds {MAX_DIM}");
        Self {
            dim,
            value,
            grad: [0.0; MAX_DIM],
            hess: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    /// Builds a jet from explicit parts. The Hessian is symmetrized.
    pub fn from_parts(value: f64, grad: &[f64], hess: &[Vec<f64>]) -> Result<Self, JetError> {
        let dim = grad.len();
        if dim > MAX_DIM {
            return Err(JetError::DimensionTooLarge(dim));
        }
        if hess.len() != dim {
            return Err(JetError::DimensionMismatch { left: dim, right: hess.len() });
        }
        let mut j = Self::constant(value, dim);
        j.grad[..dim].copy_from_slice(grad);
        for i in 0..dim {
            if hess[i].len() != dim {
                return Err(JetError::DimensionMismatch { left: dim, right: hess[i].len() });
            }
            for k in i..dim {
                let h = 0.5 * (hess[i][k] + hess[k][i]);
                j.hess[i][k] = h;
                j.hess[k][i] = h;
            }
        }
        Ok(j)
    }

    /// Same chart dimension as `self`, constant value.
    pub fn constant_like(&self, value: f64) -> Self {
        Self::constant(value, self.dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad[..self.dim]
    }

    /// Partial derivative along coordinate `i`.
    pub fn d(&self, i: usize) -> f64 {
        debug_assert!(i < self.dim);
        self.grad[i]
    }

    /// Second partial derivative along coordinates `i`, `j`.
    pub fn dd(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.dim && j < self.dim);
        self.hess[i][j]
    }

    pub fn hess_row(&self, i: usize) -> &[f64] {
        &self.hess[i][..self.dim]
    }

    pub fn is_finite(&self) -> bool {
        let d = self.dim;
        self.value.is_finite()
            && self.grad[..d].iter().all(|x| x.is_finite())
            && self.hess[..d].iter().all(|row| row[..d].iter().all(|x| x.is_finite()))
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(
            self.dim, other.dim,
            "jet chart dimension mismatch: {} vs {}",
            self.dim, other.dim
        );
    }

    /// Chain rule for a scalar function with derivatives `(f, f', f'')` at the value.
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let d = self.dim;
        let mut out = Self::constant(f0, d);
        for i in 0..d {
            out.grad[i] = f1 * self.grad[i];
        }
        for i in 0..d {
            for k in i..d {
                let h = f1 * self.hess[i][k] + f2 * self.grad[i] * self.grad[k];
                out.hess[i][k] = h;
                out.hess[k][i] = h;
            }
        }
        out
    }

    pub fn recip(&self) -> Self {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    pub fn sqr(&self) -> Self {
        *self * *self
    }

    pub fn powi(&self, k: i32) -> Self {
        let v = self.value;
        let kf = f64::from(k);
        let f1 = if k == 0 { 0.0 } else { kf * v.powi(k - 1) };
        let f2 = if k == 0 || k == 1 { 0.0 } else { kf * (kf - 1.0) * v.powi(k - 2) };
        self.chain(v.powi(k), f1, f2)
    }

    pub fn powf(&self, e: f64) -> Self {
        let v = self.value;
        self.chain(v.powf(e), e * v.powf(e - 1.0), e * (e - 1.0) * v.powf(e - 2.0))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sinh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(s, c, s)
    }

    pub fn cosh(&self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.chain(c, s, c)
    }

    pub fn tanh(&self) -> Self {
        let t = self.value.tanh();
        let sech2 = 1.0 - t * t;
        self.chain(t, sech2, -2.0 * t * sech2)
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let v = self.value;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }

    pub fn atan(&self) -> Self {
        let v = self.value;
        let q = 1.0 / (1.0 + v * v);
        self.chain(v.atan(), q, -2.0 * v * q * q)
    }
}

/// Seeds coordinate `i` of the chart point `p`.
pub fn lift_coordinate(p: &[f64], i: usize) -> Result<Jet2, JetError> {
    let d = p.len();
    if d > MAX_DIM {
        return Err(JetError::DimensionTooLarge(d));
    }
    if i >= d {
        return Err(JetError::IndexOutOfRange { index: i, dim: d });
    }
    let mut j = Jet2::constant(p[i], d);
    j.grad[i] = 1.0;
    Ok(j)
}

/// Seeds every coordinate of `p`.
pub fn lift_point(p: &[f64]) -> Result<Vec<Jet2>, JetError> {
    (0..p.len()).map(|i| lift_coordinate(p, i)).collect()
}

/// Value-only jets (chart dimension zero), for callers that need no derivatives.
pub fn lift_values(p: &[f64]) -> Vec<Jet2> {
    p.iter().map(|&v| Jet2::constant(v, 0)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Operand {
    Jet(Jet2),
    Real(f64),
}

impl From<f64> for Operand {
    fn from(v: f64) -> Self {
        Operand::Real(v)
    }
}

impl From<Jet2> for Operand {
    fn from(j: Jet2) -> Self {
        Operand::Jet(j)
    }
}

/// Checked binary arithmetic on jets.
pub fn jet_arith(op: ArithOp, x: &Jet2, y: impl Into<Operand>) -> Result<Jet2, JetError> {
    let y = y.into();
    if let Operand::Jet(yj) = &y {
        if yj.dim != x.dim {
            return Err(JetError::DimensionMismatch { left: x.dim, right: yj.dim });
        }
    }
    match (op, y) {
        (ArithOp::Add, Operand::Jet(y)) => Ok(*x + y),
        (ArithOp::Add, Operand::Real(y)) => Ok(*x + y),
        (ArithOp::Sub, Operand::Jet(y)) => Ok(*x - y),
        (ArithOp::Sub, Operand::Real(y)) => Ok(*x - y),
        (ArithOp::Mul, Operand::Jet(y)) => Ok(*x * y),
        (ArithOp::Mul, Operand::Real(y)) => Ok(*x * y),
        (ArithOp::Div, Operand::Jet(y)) => {
            if y.value == 0.0 {
                return Err(JetError::DivisionByZero);
            }
            Ok(*x / y)
        }
        (ArithOp::Div, Operand::Real(y)) => {
            if y == 0.0 {
                return Err(JetError::DivisionByZero);
            }
            Ok(*x / y)
        }
        (ArithOp::Pow, Operand::Real(e)) => {
            if e.fract() == 0.0 && e.abs() <= f64::from(i32::MAX) {
                if x.value == 0.0 && e < 0.0 {
                    return Err(JetError::DivisionByZero);
                }
                Ok(x.powi(e as i32))
            } else if x.value > 0.0 {
                Ok(x.powf(e))
            } else {
                Err(JetError::Domain { function: "pow", value: x.value })
            }
        }
        (ArithOp::Pow, Operand::Jet(e)) => {
            if x.value <= 0.0 {
                return Err(JetError::Domain { function: "pow", value: x.value });
            }
            Ok((e * x.ln()).exp())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Ln,
    Sqrt,
    Atan,
}

impl Elementary {
    pub fn name(self) -> &'static str {
        match self {
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Sinh => "sinh",
            Elementary::Cosh => "cosh",
            Elementary::Tanh => "tanh",
            Elementary::Exp => "exp",
            Elementary::Ln => "ln",
            Elementary::Sqrt => "sqrt",
            Elementary::Atan => "atan",
        }
    }
}

/// Checked elementary function application.
pub fn jet_apply(fun: Elementary, x: &Jet2) -> Result<Jet2, JetError> {
    let domain_err = || JetError::Domain { function: fun.name(), value: x.value };
    let out = match fun {
        Elementary::Sin => x.sin(),
        Elementary::Cos => x.cos(),
        Elementary::Sinh => x.sinh(),
        Elementary::Cosh => x.cosh(),
        Elementary::Tanh => x.tanh(),
        Elementary::Exp => x.exp(),
        Elementary::Ln => {
            if x.value <= 0.0 {
                return Err(domain_err());
            }
            x.ln()
        }
        Elementary::Sqrt => {
            // the derivative blows up at zero
            if x.value <= 0.0 {
                return Err(domain_err());
            }
            x.sqrt()
        }
        Elementary::Atan => x.atan(),
    };
    if !out.is_finite() && x.is_finite() {
        return Err(domain_err());
    }
    Ok(out)
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: Jet2) -> Jet2 {
        self.check_dim(&rhs);
        let d = self.dim;
        self.value += rhs.value;
        for i in 0..d {
            self.grad[i] += rhs.grad[i];
            for k in 0..d {
                self.hess[i][k] += rhs.hess[i][k];
            }
        }
        self
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: Jet2) -> Jet2 {
        self.check_dim(&rhs);
        let d = self.dim;
        self.value -= rhs.value;
        for i in 0..d {
            self.grad[i] -= rhs.grad[i];
            for k in 0..d {
                self.hess[i][k] -= rhs.hess[i][k];
            }
        }
        self
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        self.check_dim(&rhs);
        let d = self.dim;
        let (u, v) = (self.value, rhs.value);
        let mut out = Jet2::constant(u * v, d);
        for i in 0..d {
            out.grad[i] = u * rhs.grad[i] + v * self.grad[i];
        }
        for i in 0..d {
            for k in i..d {
                let h = u * rhs.hess[i][k]
                    + v * self.hess[i][k]
                    + self.grad[i] * rhs.grad[k]
                    + self.grad[k] * rhs.grad[i];
                out.hess[i][k] = h;
                out.hess[k][i] = h;
            }
        }
        out
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self * -1.0
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: f64) -> Jet2 {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(mut self, rhs: f64) -> Jet2 {
        let d = self.dim;
        self.value *= rhs;
        for i in 0..d {
            self.grad[i] *= rhs;
            for k in 0..d {
                self.hess[i][k] *= rhs;
            }
        }
        self
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div<f64> for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: f64) -> Jet2 {
        self * (1.0 / rhs)
    }
}

impl Add<Jet2> for f64 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        rhs + self
    }
}

impl Sub<Jet2> for f64 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        -rhs + self
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs * self
    }
}

impl Div<Jet2> for f64 {
    type Output = Jet2;
    fn div(self, rhs: Jet2) -> Jet2 {
        rhs.recip() * self
    }
}

impl AddAssign for Jet2 {
    fn add_assign(&mut self, rhs: Jet2) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet2 {
    fn sub_assign(&mut self, rhs: Jet2) {
        *self = *self - rhs;
    }
}

impl MulAssign for Jet2 {
    fn mul_assign(&mut self, rhs: Jet2) {
        *self = *self * rhs;
    }
}

impl MulAssign<f64> for Jet2 {
    fn mul_assign(&mut self, rhs: f64) {
        *self = *self * rhs;
    }
}

/// `2·atan(exp(x))`, the map from a cylinder coordinate to a sine-cone angle.
pub fn gudermannian_angle(x: &Jet2) -> Jet2 {
    x.exp().atan() * 2.0
}

/// Square matrix of jets, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct JetMat {
    n: usize,
    data: Vec<Jet2>,
}

impl JetMat {
    pub fn zeros(n: usize, chart_dim: usize) -> Self {
        Self { n, data: vec![Jet2::constant(0.0, chart_dim); n * n] }
    }

    pub fn identity(n: usize, chart_dim: usize) -> Self {
        let mut m = Self::zeros(n, chart_dim);
        for i in 0..n {
            m[(i, i)] = Jet2::constant(1.0, chart_dim);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Jet2) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn chart_dim(&self) -> usize {
        self.data.first().map_or(0, Jet2::dim)
    }

    pub fn values(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self[(i, j)].value())
    }

    /// Partial derivatives `∂_k M` as a plain matrix.
    pub fn partial(&self, k: usize) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.n, self.n, |i, j| self[(i, j)].d(k))
    }

    pub fn matmul(&self, rhs: &JetMat) -> JetMat {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let cd = self.chart_dim();
        JetMat::from_fn(n, |i, j| {
            let mut acc = Jet2::constant(0.0, cd);
            for k in 0..n {
                acc += self[(i, k)] * rhs[(k, j)];
            }
            acc
        })
    }

    pub fn transpose(&self) -> JetMat {
        JetMat::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: &Jet2) -> JetMat {
        JetMat::from_fn(self.n, |i, j| self[(i, j)] * *s)
    }

    /// Gauss–Jordan inverse with partial pivoting on values.
    pub fn inverse(&self) -> Result<JetMat, JetError> {
        let n = self.n;
        let cd = self.chart_dim();
        let mut a = self.clone();
        let mut inv = JetMat::identity(n, cd);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[(r, col)].value().abs().total_cmp(&a[(s, col)].value().abs()))
                .unwrap_or(col);
            if a[(pivot, col)].value().abs() < 1e-300 {
                return Err(JetError::DivisionByZero);
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a[(col, col)].recip();
            for j in 0..n {
                a[(col, j)] = a[(col, j)] * p;
                inv[(col, j)] = inv[(col, j)] * p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)];
                if factor.value() == 0.0 && factor.grad().iter().all(|g| *g == 0.0) {
                    continue;
                }
                for j in 0..n {
                    let ac = a[(col, j)];
                    let ic = inv[(col, j)];
                    a[(r, j)] -= factor * ac;
                    inv[(r, j)] -= factor * ic;
                }
            }
        }
        Ok(inv)
    }
}

impl std::ops::Index<(usize, usize)> for JetMat {
    type Output = Jet2;
    fn index(&self, (i, j): (usize, usize)) -> &Jet2 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for JetMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Jet2 {
        &mut self.data[i * self.n + j]
    }
}

/// Determinant of a small square block of jets by cofactor expansion.
pub fn jet_det(m: &[Vec<Jet2>], chart_dim: usize) -> Jet2 {
    match m.len() {
        0 => Jet2::constant(1.0, chart_dim),
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        n => {
            let mut acc = Jet2::constant(0.0, chart_dim);
            for c in 0..n {
                let minor: Vec<Vec<Jet2>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| *v).collect())
                    .collect();
                let term = m[0][c] * jet_det(&minor, chart_dim);
                if c % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use approx::assert_abs_diff_eq;

    fn fd_grad_hess(f: &dyn Fn(&[f64]) -> f64, p: &[f64], h: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
        let d = p.len();
        let mut grad = vec![0.0; d];
        let mut hess = vec![vec![0.0; d]; d];
        let shift = |i: usize, a: f64, j: usize, b: f64| {
            let mut q = p.to_vec();
            q[i] += a;
            q[j] += b;
            f(&q)
        };
        for i in 0..d {
            grad[i] = (shift(i, h, i, 0.0) - shift(i, -h, i, 0.0)) / (2.0 * h);
            for j in 0..d {
                hess[i][j] = (shift(i, h, j, h) - shift(i, h, j, -h) - shift(i, -h, j, h)
                    + shift(i, -h, j, -h))
                    / (4.0 * h * h);
            }
        }
        (grad, hess)
    }

    #[test]
    fn lift_seeds_basis_vector() {
        let j = lift_coordinate(&[0.3, 1.2], 1).unwrap();
        assert_eq!(j.value(), 1.2);
        assert_eq!(j.grad(), &[0.0, 1.0]);
        assert!(j.hess_row(0).iter().chain(j.hess_row(1)).all(|h| *h == 0.0));
        let j = lift_coordinate(&[5.0], 0).unwrap();
        assert_eq!((j.value(), j.grad()), (5.0, &[1.0][..]));
        let k = j + 2.0;
        assert_eq!((k.value(), k.grad()), (7.0, &[1.0][..]));
        assert_eq!(k.dd(0, 0), 0.0);
    }

    #[test]
    fn lift_rejects_bad_index() {
        assert_eq!(
            lift_coordinate(&[1.0, 2.0], 2),
            Err(JetError::IndexOutOfRange { index: 2, dim: 2 })
        );
        assert!(matches!(lift_coordinate(&[0.0; 8], 0), Err(JetError::DimensionTooLarge(8))));
    }

    #[test]
    fn square_and_sech() {
        let x = lift_coordinate(&[3.0], 0).unwrap();
        let y = x * x;
        assert_eq!((y.value(), y.d(0), y.dd(0, 0)), (9.0, 6.0, 2.0));

        let t = lift_coordinate(&[0.0], 0).unwrap();
        let s = jet_arith(ArithOp::Div, &t.constant_like(1.0), t.cosh() + 0.0).unwrap();
        // finite-difference oracle on sech
        let (g, h) = fd_grad_hess(&|p: &[f64]| 1.0 / p[0].cosh(), &[0.0], 1e-4);
        assert_abs_diff_eq!(s.value(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.d(0), g[0], epsilon = 1e-8);
        assert_abs_diff_eq!(s.dd(0, 0), h[0][0], epsilon = 1e-6);
        assert_abs_diff_eq!(s.dd(0, 0), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn elementary_examples() {
        let t = lift_coordinate(&[0.0], 0).unwrap();
        let c = jet_apply(Elementary::Cosh, &t).unwrap();
        assert_eq!((c.value(), c.d(0), c.dd(0, 0)), (1.0, 0.0, 1.0));

        let s = gudermannian_angle(&t);
        let (g, _) = fd_grad_hess(&|p: &[f64]| 2.0 * p[0].exp().atan(), &[0.0], 1e-4);
        assert_abs_diff_eq!(s.value(), PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.d(0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.d(0), g[0], epsilon = 1e-8);

        let t1 = lift_coordinate(&[1.0], 0).unwrap();
        let l = jet_apply(Elementary::Ln, &t1.cosh()).unwrap();
        let (g, h) = fd_grad_hess(&|p: &[f64]| p[0].cosh().ln(), &[1.0], 1e-4);
        assert_abs_diff_eq!(l.d(0), g[0], epsilon = 1e-8);
        assert_abs_diff_eq!(l.dd(0, 0), h[0][0], epsilon = 1e-6);
        assert_abs_diff_eq!(l.d(0), 0.76159, epsilon = 1e-5);
        assert_abs_diff_eq!(l.dd(0, 0), 0.41997, epsilon = 1e-5);
    }

    #[test]
    fn domain_errors_name_the_function() {
        let x = lift_coordinate(&[-1.0], 0).unwrap();
        assert_eq!(
            jet_apply(Elementary::Ln, &x),
            Err(JetError::Domain { function: "ln", value: -1.0 })
        );
        assert!(matches!(jet_apply(Elementary::Sqrt, &x), Err(JetError::Domain { function: "sqrt", .. })));
        assert_eq!(jet_arith(ArithOp::Div, &x, 0.0), Err(JetError::DivisionByZero));
        assert!(matches!(jet_arith(ArithOp::Pow, &x, 0.5), Err(JetError::Domain { function: "pow", .. })));
        assert!(jet_arith(ArithOp::Pow, &x, 3.0).is_ok());
        let z = lift_coordinate(&[0.0], 0).unwrap();
        assert_eq!(jet_arith(ArithOp::Div, &x, z), Err(JetError::DivisionByZero));
        let y = lift_coordinate(&[1.0, 2.0], 0).unwrap();
        assert_eq!(
            jet_arith(ArithOp::Add, &x, y),
            Err(JetError::DimensionMismatch { left: 1, right: 2 })
        );
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn operator_dimension_mismatch_panics() {
        let x = lift_coordinate(&[1.0], 0).unwrap();
        let y = lift_coordinate(&[1.0, 2.0], 0).unwrap();
        let _ = x + y;
    }

    #[test]
    fn pow_matches_repeated_product() {
        let x = lift_coordinate(&[1.3, -0.4], 0).unwrap() + lift_coordinate(&[1.3, -0.4], 1).unwrap();
        let p = jet_arith(ArithOp::Pow, &x, 3.0).unwrap();
        let q = x * x * x;
        for i in 0..2 {
            assert_abs_diff_eq!(p.d(i), q.d(i), epsilon = 1e-12);
            for k in 0..2 {
                assert_abs_diff_eq!(p.dd(i, k), q.dd(i, k), epsilon = 1e-12);
            }
        }
        let pj = jet_arith(ArithOp::Pow, &x, x.constant_like(2.5)).unwrap();
        let pf = jet_arith(ArithOp::Pow, &x, 2.5).unwrap();
        assert_abs_diff_eq!(pj.dd(0, 1), pf.dd(0, 1), epsilon = 1e-12);
    }

    #[test]
    fn hyperbolic_identity_is_exact() {
        let p = [0.7, -1.1, 0.3];
        let x = lift_point(&p).unwrap();
        let arg = x[0] * x[1] + x[2].sin();
        let diff = arg.cosh().sqr() - arg.sinh().sqr();
        assert_abs_diff_eq!(diff.value(), 1.0, epsilon = 1e-12);
        assert!(diff.grad().iter().all(|g| g.abs() < 1e-12));
        for i in 0..3 {
            assert!(diff.hess_row(i).iter().all(|h| h.abs() < 1e-11));
        }
    }

    #[test]
    fn jet_inverse_matches_derivative_of_inverse() {
        let p = [0.2, 0.5];
        let x = lift_point(&p).unwrap();
        let m = JetMat::from_fn(2, |i, j| match (i, j) {
            (0, 0) => x[0].exp() + 1.0,
            (0, 1) => x[1] * x[0],
            (1, 0) => x[1].sin(),
            _ => x[1].cosh() + 2.0,
        });
        let inv = m.inverse().unwrap();
        let prod = m.matmul(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let e = prod[(i, j)];
                assert_abs_diff_eq!(e.value(), if i == j { 1.0 } else { 0.0 }, epsilon = 1e-13);
                assert!(e.grad().iter().all(|g| g.abs() < 1e-12));
                assert!((0..2).all(|a| e.hess_row(a).iter().all(|h| h.abs() < 1e-11)));
            }
        }
    }

    #[test]
    fn determinant_by_cofactors() {
        let c = |v| Jet2::constant(v, 0);
        let m = vec![
            vec![c(2.0), c(1.0), c(0.0)],
            vec![c(1.0), c(3.0), c(1.0)],
            vec![c(0.0), c(1.0), c(4.0)],
        ];
        assert_abs_diff_eq!(jet_det(&m, 0).value(), 18.0, epsilon = 1e-14);
    }
}
