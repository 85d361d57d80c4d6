//! Semi-Euclidean linear algebra on E⁵, R^{4,1} and R^{5,1}.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Tolerance for accepting a matrix as a group element.
pub const TAU_GROUP: f64 = 1e-9;

/// Which diagonal bilinear form is in force.
///
/// For `dim == 5` the metric is `diag(1, 1, 1, eps, eps*c)`, the Gram
/// matrix of the moving frame `(e0, ..., e4)`. For `dim == 6` it is
/// `diag(1, 1, 1, 1, 1, -1)`: five space slots followed by one time slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    dim: usize,
    c: i32,
    eps: i32,
}

fn check_sign(name: &str, v: i32) -> Result<()> {
    if v == 1 || v == -1 {
        Ok(())
    } else {
        Err(GeomError::Signature(format!("{name} must be +1 or -1, got {v}")))
    }
}

impl Signature {
    pub fn new(dim: usize, c: i32, eps: i32) -> Result<Self> {
        check_sign("c", c)?;
        check_sign("eps", eps)?;
        match dim {
            5 if c == 1 && eps != 1 => Err(GeomError::Signature(
                "c = 1 forces eps = 1".into(),
            )),
            5 => Ok(Self { dim, c, eps }),
            6 => Ok(Self { dim, c: -1, eps: 1 }),
            _ => Err(GeomError::Signature(format!("dimension {dim} unsupported"))),
        }
    }

    /// Frame signature `diag(1,1,1,eps,eps*c)`.
    pub fn frame(c: i32, eps: i32) -> Result<Self> {
        Self::new(5, c, eps)
    }

    /// The ambient E⁵ (c = 1) or R^{4,1} (c = -1) containing S⁴_c.
    pub fn ambient(c: i32) -> Result<Self> {
        Self::new(5, c, 1)
    }

    pub fn euclidean5() -> Self {
        Self { dim: 5, c: 1, eps: 1 }
    }

    pub fn lorentz5() -> Self {
        Self { dim: 5, c: -1, eps: 1 }
    }

    /// R^{5,1}, time-like slot last.
    pub fn lorentz6() -> Self {
        Self { dim: 6, c: -1, eps: 1 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn c(&self) -> i32 {
        self.c
    }

    pub fn eps(&self) -> i32 {
        self.eps
    }

    /// Diagonal entries of J.
    pub fn diag(&self) -> Vec<f64> {
        if self.dim == 6 {
            vec![1.0, 1.0, 1.0, 1.0, 1.0, -1.0]
        } else {
            let e = self.eps as f64;
            vec![1.0, 1.0, 1.0, e, e * self.c as f64]
        }
    }

    pub fn metric(&self) -> Matrix {
        Matrix::from_diagonal(&Vector::from_vec(self.diag()))
    }
}

/// `uᵀ J v`.
pub fn inner(u: &Vector, v: &Vector, sig: Signature) -> f64 {
    assert_eq!(u.len(), sig.dim(), "vector length does not match signature");
    assert_eq!(v.len(), sig.dim(), "vector length does not match signature");
    sig.diag()
        .iter()
        .zip(u.iter().zip(v.iter()))
        .map(|(j, (a, b))| j * a * b)
        .sum()
}

/// `J·v`, the index-lowered vector.
pub fn lower(v: &Vector, sig: Signature) -> Vector {
    assert_eq!(v.len(), sig.dim());
    Vector::from_iterator(v.len(), sig.diag().iter().zip(v.iter()).map(|(j, x)| j * x))
}

/// Max-norm of `GᵀJG − J`.
pub fn group_residual_raw(g: &Matrix, sig: Signature) -> f64 {
    assert_eq!(g.nrows(), sig.dim());
    assert_eq!(g.ncols(), sig.dim());
    let j = sig.metric();
    (g.transpose() * &j * g - j).amax()
}

/// Max-norm of `XᵀJ + JX`.
pub fn algebra_residual_raw(x: &Matrix, sig: Signature) -> f64 {
    let j = sig.metric();
    (x.transpose() * &j + &j * x).amax()
}

pub fn group_residual(g: &FrameMatrix) -> f64 {
    group_residual_raw(&g.g, g.sig)
}

/// An element of SO(J): columns are the moving frame `e0 .. e_{dim-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameMatrix {
    g: Matrix,
    sig: Signature,
}

impl FrameMatrix {
    pub fn new(g: Matrix, sig: Signature) -> Result<Self> {
        let res = group_residual_raw(&g, sig);
        if !(res <= TAU_GROUP) {
            return Err(GeomError::NotInGroup(res));
        }
        let det = g.determinant();
        if !((det - 1.0).abs() <= TAU_GROUP * (1.0 + g.amax().powi(sig.dim() as i32))) {
            return Err(GeomError::NotInGroup((det - 1.0).abs()));
        }
        Ok(Self { g, sig })
    }

    /// Wraps a matrix without the membership check; used by integrators
    /// whose output is checked separately.
    pub fn new_unchecked(g: Matrix, sig: Signature) -> Self {
        Self { g, sig }
    }

    pub fn identity(sig: Signature) -> Self {
        Self {
            g: Matrix::identity(sig.dim(), sig.dim()),
            sig,
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.g
    }

    pub fn into_matrix(self) -> Matrix {
        self.g
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn column(&self, i: usize) -> Vector {
        self.g.column(i).into_owned()
    }

    /// Right multiplication `G·exp(X)`.
    pub fn right_mul_exp(&self, x: &Matrix) -> Self {
        Self {
            g: &self.g * expm(x),
            sig: self.sig,
        }
    }

    pub fn mul(&self, other: &FrameMatrix) -> Self {
        assert_eq!(self.sig, other.sig);
        Self {
            g: &self.g * &other.g,
            sig: self.sig,
        }
    }

    /// `G⁻¹ = J⁻¹ Gᵀ J`.
    pub fn inverse(&self) -> Self {
        let j = self.sig.metric();
        Self {
            g: &j * self.g.transpose() * &j,
            sig: self.sig,
        }
    }
}

/// An element of the Lie algebra of SO(J).
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    x: Matrix,
    sig: Signature,
}

impl AlgebraElement {
    pub fn new(x: Matrix, sig: Signature) -> Result<Self> {
        assert_eq!(x.nrows(), sig.dim());
        assert_eq!(x.ncols(), sig.dim());
        let res = algebra_residual_raw(&x, sig);
        if !(res <= 1e-12 * (1.0 + x.amax())) {
            return Err(GeomError::Inconsistent(format!(
                "matrix is not in the algebra (residual {res:.3e})"
            )));
        }
        Ok(Self { x, sig })
    }

    pub fn zero(sig: Signature) -> Self {
        Self {
            x: Matrix::zeros(sig.dim(), sig.dim()),
            sig,
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.x
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            x: &self.x * s,
            sig: self.sig,
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> Self {
        assert_eq!(self.sig, other.sig);
        Self {
            x: &self.x + &other.x,
            sig: self.sig,
        }
    }

    pub fn exp(&self) -> FrameMatrix {
        FrameMatrix::new_unchecked(expm(&self.x), self.sig)
    }
}

pub fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    a * b - b * a
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with the degree-13 Padé
/// approximant.
pub fn expm(x: &Matrix) -> Matrix {
    assert!(x.is_square(), "expm needs a square matrix");
    assert!(x.iter().all(|v| v.is_finite()), "expm input is not finite");
    let n = x.nrows();
    let norm1 = (0..n)
        .map(|j| x.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm1 > THETA13 {
        (norm1 / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = x * 2f64.powi(-s);
    let b = &PADE13;
    let id = Matrix::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Padé denominator is singular");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize, n: usize) -> Vector {
        let mut v = Vector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn inner_examples() {
        let s = Signature::lorentz5();
        assert_eq!(inner(&e(0, 5), &e(0, 5), s), 1.0);
        assert_eq!(inner(&e(4, 5), &e(4, 5), s), -1.0);
        let n = Vector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(inner(&n, &n, s), 0.0);
    }

    #[test]
    fn signature_rules() {
        assert!(Signature::new(5, 1, -1).is_err());
        assert!(Signature::new(5, 2, 1).is_err());
        assert!(Signature::new(4, 1, 1).is_err());
        assert_eq!(Signature::frame(-1, -1).unwrap().diag(), vec![1.0, 1.0, 1.0, -1.0, 1.0]);
        assert_eq!(Signature::lorentz6().diag()[5], -1.0);
    }

    #[test]
    fn residual_examples() {
        let s = Signature::euclidean5();
        assert_eq!(group_residual(&FrameMatrix::identity(s)), 0.0);
        let mut g = Matrix::identity(5, 5);
        g[(1, 1)] = 2.0;
        assert_eq!(group_residual_raw(&g, s), 3.0);
        assert!(FrameMatrix::new(g, s).is_err());
    }

    #[test]
    fn expm_zero_and_rotation() {
        let z = Matrix::zeros(5, 5);
        assert_eq!(expm(&z), Matrix::identity(5, 5));
        let th = std::f64::consts::FRAC_PI_2;
        let mut x = Matrix::zeros(5, 5);
        x[(1, 2)] = -th;
        x[(2, 1)] = th;
        let r = expm(&x);
        let mut want = Matrix::identity(5, 5);
        want[(1, 1)] = 0.0;
        want[(2, 2)] = 0.0;
        want[(1, 2)] = -1.0;
        want[(2, 1)] = 1.0;
        assert!((r - want).amax() < 1e-15);
    }

    #[test]
    fn expm_boost_relative_accuracy() {
        for &s in &[0.3, 2.0, 10.0, 25.0] {
            let mut x = Matrix::zeros(5, 5);
            x[(0, 4)] = s;
            x[(4, 0)] = s;
            let r = expm(&x);
            let (ch, sh) = (s.cosh(), s.sinh());
            assert!(((r[(0, 0)] - ch) / ch).abs() < 1e-13, "s={s}");
            assert!(((r[(0, 4)] - sh) / ch).abs() < 1e-13, "s={s}");
            assert!((r[(1, 1)] - 1.0).abs() < 1e-13);
            assert!(algebra_residual_raw(&x, Signature::lorentz5()) == 0.0);
        }
    }

    #[test]
    fn expm_inverse_pair() {
        let mut x = Matrix::zeros(5, 5);
        x[(0, 1)] = 1.3;
        x[(1, 0)] = -1.3;
        x[(2, 4)] = 0.7;
        x[(4, 2)] = 0.7;
        let p = expm(&x) * expm(&(-&x));
        assert!((p - Matrix::identity(5, 5)).amax() < 1e-13);
    }

    #[test]
    fn frame_inverse() {
        let s = Signature::lorentz5();
        let mut x = Matrix::zeros(5, 5);
        x[(0, 4)] = 0.4;
        x[(4, 0)] = 0.4;
        x[(1, 2)] = 0.2;
        x[(2, 1)] = -0.2;
        let g = AlgebraElement::new(x, s).unwrap().exp();
        let p = g.mul(&g.inverse());
        assert!((p.matrix() - Matrix::identity(5, 5)).amax() < 1e-14);
    }
}
