//! Finite-difference oracle: jets, fundamental forms, normal-form frames
//! and curvatures for any parametric immersion into a quadric.

use nalgebra::{Matrix2, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::catalog::Immersion;
use crate::error::{GeomError, Result};
use crate::linalg::{inner, lower, Matrix, Signature, Vector};

/// Step control for [`jet`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetConfig {
    pub step: f64,
    /// Combine steps h and h/2 to cancel the O(h²) error term.
    pub richardson: bool,
}

impl Default for JetConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            richardson: true,
        }
    }
}

/// Position and first and second partial derivatives at a parameter point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub params: Vec<f64>,
    pub point: Vector,
    pub first: Vec<Vector>,
    /// Symmetric: `second[i][j] == second[j][i]`.
    pub second: Vec<Vec<Vector>>,
    pub sig: Signature,
    /// Value of ⟨p, p⟩ defining the ambient quadric.
    pub quadric: f64,
}

impl Jet {
    pub fn dim(&self) -> usize {
        self.first.len()
    }

    /// Sectional curvature of the quadric ⟨p, p⟩ = q, which is 1/q.
    pub fn ambient_curvature(&self) -> f64 {
        1.0 / self.quadric
    }

    /// Largest of |⟨p,p⟩ − q| and |⟨p, ∂ᵢp⟩|.
    pub fn quadric_defect(&self) -> f64 {
        let mut d = (inner(&self.point, &self.point, self.sig) - self.quadric).abs();
        for f in &self.first {
            d = d.max(inner(&self.point, f, self.sig).abs());
        }
        d
    }
}

/// Jet of a surface.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceJet(Jet);

impl SurfaceJet {
    pub fn new(j: Jet) -> Result<Self> {
        if j.dim() != 2 {
            return Err(GeomError::Degenerate(format!(
                "surface jet needs 2 parameters, got {}",
                j.dim()
            )));
        }
        Ok(Self(j))
    }

    pub fn jet(&self) -> &Jet {
        &self.0
    }

    pub fn p(&self) -> &Vector {
        &self.0.point
    }

    pub fn du(&self) -> &Vector {
        &self.0.first[0]
    }

    pub fn dv(&self) -> &Vector {
        &self.0.first[1]
    }

    pub fn duu(&self) -> &Vector {
        &self.0.second[0][0]
    }

    pub fn duv(&self) -> &Vector {
        &self.0.second[0][1]
    }

    pub fn dvv(&self) -> &Vector {
        &self.0.second[1][1]
    }
}

/// Jet of a hypersurface of the quadric.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperJet(Jet);

impl HyperJet {
    pub fn new(j: Jet) -> Result<Self> {
        if j.dim() + 2 != j.sig.dim() {
            return Err(GeomError::Degenerate(format!(
                "{} parameters do not give a hypersurface of a quadric in dimension {}",
                j.dim(),
                j.sig.dim()
            )));
        }
        Ok(Self(j))
    }

    pub fn jet(&self) -> &Jet {
        &self.0
    }
}

/// Central-difference jet with optional one-level Richardson extrapolation.
pub fn jet(imm: &dyn Immersion, u: &[f64], cfg: &JetConfig) -> Result<Jet> {
    let n = imm.param_dim();
    if u.len() != n {
        return Err(GeomError::Domain(format!("expected {n} parameters, got {}", u.len())));
    }
    if !imm.domain().contains_with_margin(u, 10.0 * cfg.step) {
        return Err(GeomError::Domain(format!(
            "point {u:?} is closer than {} to the chart boundary",
            10.0 * cfg.step
        )));
    }
    let f = |d: &[(usize, f64)]| -> Result<Vector> {
        let mut v = u.to_vec();
        for &(i, s) in d {
            v[i] += s;
        }
        imm.eval(&v)
    };
    let p = imm.eval(u)?;
    let raw = |h: f64| -> Result<(Vec<Vector>, Vec<Vec<Vector>>)> {
        let mut first = Vec::with_capacity(n);
        let mut second = vec![vec![Vector::zeros(p.len()); n]; n];
        for i in 0..n {
            let fp = f(&[(i, h)])?;
            let fm = f(&[(i, -h)])?;
            first.push((&fp - &fm) / (2.0 * h));
            second[i][i] = (&fp - &p * 2.0 + &fm) / (h * h);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let d = f(&[(i, h), (j, h)])? - f(&[(i, h), (j, -h)])? - f(&[(i, -h), (j, h)])?
                    + f(&[(i, -h), (j, -h)])?;
                let d = d / (4.0 * h * h);
                second[j][i] = d.clone();
                second[i][j] = d;
            }
        }
        Ok((first, second))
    };
    let (mut first, mut second) = raw(cfg.step)?;
    if cfg.richardson {
        let (f2, s2) = raw(0.5 * cfg.step)?;
        for i in 0..n {
            first[i] = (&f2[i] * 4.0 - &first[i]) / 3.0;
            for j in 0..n {
                second[i][j] = (&s2[i][j] * 4.0 - &second[i][j]) / 3.0;
            }
        }
    }
    Ok(Jet {
        params: u.to_vec(),
        point: p,
        first,
        second,
        sig: imm.signature(),
        quadric: imm.quadric(),
    })
}

pub fn surface_jet(imm: &dyn Immersion, u: &[f64], cfg: &JetConfig) -> Result<SurfaceJet> {
    SurfaceJet::new(jet(imm, u, cfg)?)
}

pub fn hyper_jet(imm: &dyn Immersion, u: &[f64], cfg: &JetConfig) -> Result<HyperJet> {
    HyperJet::new(jet(imm, u, cfg)?)
}

/// Pseudo-orthonormal basis of the J-orthogonal complement of `span`,
/// with the sign ⟨n, n⟩ of each vector. Space-like vectors come first.
pub fn orthogonal_complement(span: &[Vector], sig: Signature) -> Result<(Vec<Vector>, Vec<f64>)> {
    let dim = sig.dim();
    let k = span.len();
    let b = Matrix::from_columns(span);
    let jb = Matrix::from_columns(&span.iter().map(|v| lower(v, sig)).collect::<Vec<_>>());
    let g = b.transpose() * &jb;
    let scale: f64 = (0..k).map(|i| g[(i, i)].abs()).product::<f64>().max(f64::MIN_POSITIVE);
    if g.determinant().abs() <= 1e-12 * scale {
        return Err(GeomError::Degenerate("spanning vectors are dependent or null".into()));
    }
    let ginv = g
        .try_inverse()
        .ok_or_else(|| GeomError::Degenerate("singular Gram matrix".into()))?;
    let proj = Matrix::identity(dim, dim) - &b * ginv * jb.transpose();
    let eig = SymmetricEigen::new(&proj * proj.transpose());
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let m = dim - k;
    let basis: Vec<Vector> = order[..m]
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    let kmat = Matrix::from_columns(&basis);
    let gram = kmat.transpose() * sig.metric() * &kmat;
    let ge = SymmetricEigen::new(gram);
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&i, &j| ge.eigenvalues[j].total_cmp(&ge.eigenvalues[i]));
    let mut normals = Vec::with_capacity(m);
    let mut signs = Vec::with_capacity(m);
    for i in idx {
        let l = ge.eigenvalues[i];
        if l.abs() < 1e-10 {
            return Err(GeomError::Degenerate("complement contains a null direction".into()));
        }
        normals.push(&kmat * ge.eigenvectors.column(i) / l.abs().sqrt());
        signs.push(l.signum());
    }
    Ok((normals, signs))
}

/// First and second fundamental forms with their frames.
#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalForms {
    /// Coordinate Gram matrix ⟨∂ᵢ, ∂ⱼ⟩.
    pub first: Matrix,
    /// ⟨∂ᵢ∂ⱼ p, n_k⟩ in coordinates, one matrix per normal.
    pub second: Vec<Matrix>,
    /// Orthonormal tangent frame, `tangent[a] = Σᵢ coeffs[(a, i)] ∂ᵢ`.
    pub tangent: Vec<Vector>,
    pub coeffs: Matrix,
    pub normals: Vec<Vector>,
    pub normal_signs: Vec<f64>,
    pub sig: Signature,
}

impl FundamentalForms {
    /// Second fundamental form along normal `k` in the orthonormal tangent frame.
    pub fn shape(&self, k: usize) -> Matrix {
        &self.coeffs * &self.second[k] * self.coeffs.transpose()
    }

    /// Shape operator in direction `w` (any normal vector) in the
    /// orthonormal frame: ⟨A_w X, Y⟩ = ⟨α(X, Y), w⟩.
    pub fn shape_along(&self, w: &Vector) -> Matrix {
        let n = self.tangent.len();
        let mut a = Matrix::zeros(n, n);
        for (k, nk) in self.normals.iter().enumerate() {
            let comp = self.normal_signs[k] * inner(nk, w, self.sig);
            a += self.shape(k) * comp;
        }
        a
    }
}

pub fn fundamental_forms(j: &Jet) -> Result<FundamentalForms> {
    let n = j.dim();
    let sig = j.sig;
    let first = Matrix::from_fn(n, n, |a, b| inner(&j.first[a], &j.first[b], sig));
    let det = first.determinant();
    if !(det > 1e-10) {
        return Err(GeomError::Degenerate(format!("first fundamental form det = {det:e}")));
    }
    // Orthonormal frame from the Cholesky factor: I = L Lᵀ, coefficients L⁻¹.
    let chol = first
        .clone()
        .cholesky()
        .ok_or_else(|| GeomError::Degenerate("first fundamental form is not positive".into()))?;
    let coeffs = chol
        .l()
        .try_inverse()
        .ok_or_else(|| GeomError::Degenerate("singular Cholesky factor".into()))?;
    let tangent: Vec<Vector> = (0..n)
        .map(|a| (0..n).fold(Vector::zeros(sig.dim()), |acc, i| acc + &j.first[i] * coeffs[(a, i)]))
        .collect();
    let mut span = vec![j.point.clone()];
    span.extend(j.first.iter().cloned());
    let (normals, normal_signs) = orthogonal_complement(&span, sig)?;
    let second = normals
        .iter()
        .map(|nk| Matrix::from_fn(n, n, |a, b| inner(&j.second[a][b], nk, sig)))
        .collect();
    Ok(FundamentalForms {
        first,
        second,
        tangent,
        coeffs,
        normals,
        normal_signs,
        sig,
    })
}

/// Gaussian curvature from the Gauss equation of the ambient quadric.
pub fn gaussian_curvature(j: &SurfaceJet) -> Result<f64> {
    let ff = fundamental_forms(j.jet())?;
    let mut k = j.jet().ambient_curvature();
    for (idx, s) in ff.normal_signs.iter().enumerate() {
        let m = ff.shape(idx);
        k += s * (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]);
    }
    Ok(k)
}

/// Normal-form frames of a surface with two-dimensional normal space:
/// `A1 = a·[[0,1],[1,0]]` and `A2 = a·diag(h, −c/h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeData {
    pub point: Vector,
    pub e1: Vector,
    pub e2: Vector,
    pub xi1: Vector,
    pub xi2: Vector,
    /// Shape operators along ξ₁ and ξ₂ in the frame (e1, e2), as measured.
    pub a1: Matrix2<f64>,
    pub a2: Matrix2<f64>,
    pub a: f64,
    pub h: f64,
    pub eps: i32,
    pub c: i32,
    pub sig: Signature,
    /// Max deviation of (a1, a2) from the ideal normal form, relative to `a`.
    pub residual: f64,
}

impl ShapeData {
    /// Shape operator along `Ct ξ₁ + St ξ₂`.
    pub fn shape_along(&self, ct: f64, st: f64) -> Matrix2<f64> {
        self.a1 * ct + self.a2 * st
    }

    fn normal_form_residual(&self) -> f64 {
        let ideal1 = Matrix2::new(0.0, self.a, self.a, 0.0);
        let ideal2 = Matrix2::new(self.a * self.h, 0.0, 0.0, -self.a * self.c as f64 / self.h);
        (self.a1 - ideal1).amax().max((self.a2 - ideal2).amax()) / self.a
    }
}

/// Options for [`canonical_frames_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct FrameOptions {
    /// Points with |h − 1| below this are rejected when c = 1.
    pub delta_min: f64,
    /// Coordinate direction that e₁ should align with when c = −1, where the
    /// normal form does not single out an axis.
    pub hint: usize,
}

impl Default for FrameOptions {
    fn default() -> Self {
        Self {
            delta_min: 1e-3,
            hint: 0,
        }
    }
}

pub fn canonical_frames(j: &SurfaceJet, c: i32) -> Result<ShapeData> {
    canonical_frames_with(j, c, &FrameOptions::default())
}

fn m2(m: &Matrix) -> Matrix2<f64> {
    Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

fn normal_plane(ff: &FundamentalForms) -> Result<()> {
    if ff.normals.len() != 2 {
        return Err(GeomError::Degenerate(format!(
            "normal space has dimension {}, expected 2",
            ff.normals.len()
        )));
    }
    Ok(())
}

pub fn canonical_frames_with(j: &SurfaceJet, c: i32, opts: &FrameOptions) -> Result<ShapeData> {
    let ff = fundamental_forms(j.jet())?;
    normal_plane(&ff)?;
    let sig = ff.sig;
    let s1 = m2(&ff.shape(0));
    let s2 = m2(&ff.shape(1));
    let (sg1, sg2) = (ff.normal_signs[0], ff.normal_signs[1]);
    let (tr1, tr2) = (s1.trace(), s2.trace());
    let scale = s1.amax().max(s2.amax());
    if tr1.hypot(tr2) <= 1e-9 * scale.max(1.0) {
        return Err(GeomError::MinimalPoint { h: 1.0 });
    }
    // Trace-free normal line and its orthogonal partner.
    let (x, y) = (tr2, -tr1);
    let q1 = sg1 * x * x + sg2 * y * y;
    if q1.abs() <= 1e-8 * (x * x + y * y) {
        return Err(GeomError::Inconsistent("trace-free normal line is light-like".into()));
    }
    let eps = q1.signum() as i32;
    let n1 = q1.abs().sqrt();
    let (x1, y1) = (x / n1, y / n1);
    let (x2, y2) = (sg2 * y / n1, -sg1 * x / n1);
    let mut xi1 = &ff.normals[0] * x1 + &ff.normals[1] * y1;
    let mut xi2 = &ff.normals[0] * x2 + &ff.normals[1] * y2;
    let mut a1 = s1 * x1 + s2 * y1;
    let mut a2 = s1 * x2 + s2 * y2;

    let (p, q) = (0.5 * (a1[(0, 0)] - a1[(1, 1)]), a1[(0, 1)]);
    let phi = 0.5 * (-p).atan2(q);
    let (sp, cp) = phi.sin_cos();
    let rot = Matrix2::new(cp, sp, -sp, cp);
    let mut e1 = &ff.tangent[0] * cp + &ff.tangent[1] * sp;
    let mut e2 = &ff.tangent[0] * (-sp) + &ff.tangent[1] * cp;
    a1 = rot * a1 * rot.transpose();
    a2 = rot * a2 * rot.transpose();

    let swap = if c == 1 {
        a2[(1, 1)].abs() > a2[(0, 0)].abs()
    } else {
        let hint = &j.jet().first[opts.hint];
        inner(&e2, hint, sig).abs() > inner(&e1, hint, sig).abs()
    };
    if swap {
        std::mem::swap(&mut e1, &mut e2);
        let perm = Matrix2::new(0.0, 1.0, 1.0, 0.0);
        a1 = perm * a1 * perm;
        a2 = perm * a2 * perm;
    }
    if a2[(0, 0)] < 0.0 {
        xi2 = -xi2;
        a2 = -a2;
    }
    if a1[(0, 1)] < 0.0 {
        // Only reachable through roundoff when a is tiny.
        xi1 = -xi1;
        a1 = -a1;
    }
    let a = 0.5 * (a1[(0, 1)] + a1[(1, 0)]);
    if !(a > 0.0) {
        return Err(GeomError::Degenerate("vanishing normal-form parameter a".into()));
    }
    let h = a2[(0, 0)] / a;
    if c == 1 && (h - 1.0).abs() < opts.delta_min {
        return Err(GeomError::MinimalPoint { h });
    }
    let mut sd = ShapeData {
        point: j.p().clone(),
        e1,
        e2,
        xi1,
        xi2,
        a1,
        a2,
        a,
        h,
        eps,
        c,
        sig,
        residual: 0.0,
    };
    sd.residual = sd.normal_form_residual();
    Ok(sd)
}

/// Frames at a minimal point where the second fundamental form has the
/// Veronese pattern `A1 = a·[[0,1],[1,0]]`, `A2 = a·diag(1,−1)` in any
/// orthonormal tangent frame. The tangent frame is the coordinate one.
pub fn veronese_like_frames(j: &SurfaceJet) -> Result<ShapeData> {
    let ff = fundamental_forms(j.jet())?;
    normal_plane(&ff)?;
    let sig = ff.sig;
    let alpha = |a: usize, b: usize| -> Vector {
        (0..2).fold(Vector::zeros(sig.dim()), |acc, k| {
            acc + &ff.normals[k] * (ff.normal_signs[k] * ff.shape(k)[(a, b)])
        })
    };
    let a12 = alpha(0, 1);
    let a11 = alpha(0, 0);
    let n12 = inner(&a12, &a12, sig);
    let n11 = inner(&a11, &a11, sig);
    if !(n12 > 0.0 && n11 > 0.0) {
        return Err(GeomError::Degenerate("second fundamental form is not Veronese-like".into()));
    }
    let xi1 = &a12 / n12.sqrt();
    let xi2 = &a11 / n11.sqrt();
    let a1 = m2(&ff.shape_along(&xi1));
    let a2 = m2(&ff.shape_along(&xi2));
    let a = a1[(0, 1)];
    let mut sd = ShapeData {
        point: j.p().clone(),
        e1: ff.tangent[0].clone(),
        e2: ff.tangent[1].clone(),
        xi1,
        xi2,
        a1,
        a2,
        a,
        h: 1.0,
        eps: 1,
        c: 1,
        sig,
        residual: 0.0,
    };
    sd.residual = sd.normal_form_residual();
    Ok(sd)
}

/// Shape operator of a hypersurface in an orthonormal tangent frame.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperShape {
    pub matrix: Matrix,
    /// Principal curvatures in ascending order.
    pub eigenvalues: Vec<f64>,
    pub normal: Vector,
    /// ⟨N, N⟩.
    pub normal_sign: f64,
}

impl HyperShape {
    /// Index of the eigenvalue of least magnitude.
    pub fn nullity_index(&self) -> usize {
        (0..self.eigenvalues.len())
            .min_by(|&i, &j| self.eigenvalues[i].abs().total_cmp(&self.eigenvalues[j].abs()))
            .expect("empty spectrum")
    }
}

pub fn hyper_shape(j: &HyperJet) -> Result<HyperShape> {
    let ff = fundamental_forms(j.jet())?;
    let m = ff.shape(0) * ff.normal_signs[0];
    let sym = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym.clone());
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(HyperShape {
        matrix: sym,
        eigenvalues: ev,
        normal: ff.normals[0].clone(),
        normal_sign: ff.normal_signs[0],
    })
}

/// Ricci eigenvalues of a hypersurface of the space form of curvature `c`
/// (ambient dimension n + 1) with principal curvatures `k`:
/// Ric(eᵢ) = (n − 1)c + kᵢ(σ − kᵢ).
pub fn ricci_eigenvalues(c: i32, k: &[f64]) -> Vec<f64> {
    let n = k.len() as f64;
    let sigma: f64 = k.iter().sum();
    k.iter()
        .map(|&ki| (n - 1.0) * c as f64 + ki * (sigma - ki))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{ImmersionId, Immersion};
    use approx::assert_abs_diff_eq;

    #[test]
    fn ricci_examples() {
        let s3 = 3f64.sqrt();
        let r = ricci_eigenvalues(1, &[s3, 0.0, -s3]);
        assert_abs_diff_eq!(r.as_slice(), &[-1.0, 2.0, -1.0][..], epsilon = 1e-14);
        assert_eq!(ricci_eigenvalues(-1, &[0.0; 3]), vec![-2.0; 3]);
    }

    #[test]
    fn great_sphere_is_totally_geodesic() {
        struct Great;
        impl Immersion for Great {
            fn param_dim(&self) -> usize {
                2
            }
            fn signature(&self) -> Signature {
                Signature::euclidean5()
            }
            fn quadric(&self) -> f64 {
                1.0
            }
            fn domain(&self) -> crate::catalog::DomainSpec {
                crate::catalog::DomainSpec::new(vec![(0.0, 3.1), (0.0, 6.3)], vec![false, true])
            }
            fn eval(&self, u: &[f64]) -> Result<Vector> {
                let (sf, cf) = u[0].sin_cos();
                let (sp, cp) = u[1].sin_cos();
                Ok(Vector::from_row_slice(&[sf * cp, 0.0, sf * sp, cf, 0.0]))
            }
        }
        let j = surface_jet(&Great, &[1.1, 0.4], &JetConfig::default()).unwrap();
        let ff = fundamental_forms(j.jet()).unwrap();
        for k in 0..2 {
            assert!(ff.shape(k).amax() < 1e-7);
        }
        assert_abs_diff_eq!(gaussian_curvature(&j).unwrap(), 1.0, epsilon = 1e-7);
    }

    #[test]
    fn margin_is_enforced() {
        let id = ImmersionId::RotPolar { c: 1 };
        let cfg = JetConfig::default();
        assert!(matches!(jet(&id, &[0.005, 0.0], &cfg), Err(GeomError::Domain(_))));
    }

    #[test]
    fn complement_of_lorentz_point() {
        let sig = Signature::lorentz5();
        let p = crate::catalog::clifford_polar(0.3, 0.2);
        let (n, s) = orthogonal_complement(std::slice::from_ref(&p), sig).unwrap();
        assert_eq!(n.len(), 4);
        assert_eq!(s, vec![1.0, 1.0, 1.0, -1.0]);
        for (a, sa) in n.iter().zip(&s) {
            assert!(inner(a, &p, sig).abs() < 1e-13);
            assert!((inner(a, a, sig) - sa).abs() < 1e-12);
        }
    }

    #[test]
    fn rot_polar_frames() {
        let cfg = JetConfig::default();
        let j = surface_jet(&ImmersionId::RotPolar { c: 1 }, &[0.4, 1.0], &cfg).unwrap();
        let sd = canonical_frames(&j, 1).unwrap();
        assert_abs_diff_eq!(sd.a, 2.0 / 3.0, epsilon = 1e-6);
        let want_h = (2.0 / (3.0 * 0.8f64.cos() - 1.0)).sqrt();
        assert_abs_diff_eq!(sd.h, want_h, epsilon = 1e-6);
        assert!(sd.residual < 1e-6);

        let j = surface_jet(
            &ImmersionId::RotPolar { c: -1 },
            &[std::f64::consts::FRAC_PI_2, 0.3],
            &cfg,
        )
        .unwrap();
        let sd = canonical_frames(&j, -1).unwrap();
        assert_abs_diff_eq!(sd.h, 0.5f64.sqrt(), epsilon = 1e-6);
        assert_eq!(sd.eps, 1);
    }

    #[test]
    fn veronese_is_minimal() {
        let j = surface_jet(&ImmersionId::Veronese, &[1.0, 0.5], &JetConfig::default()).unwrap();
        assert!(matches!(canonical_frames(&j, 1), Err(GeomError::MinimalPoint { .. })));
        let sd = veronese_like_frames(&j).unwrap();
        assert_abs_diff_eq!(sd.a, 1.0 / 3f64.sqrt(), epsilon = 1e-6);
        assert!(sd.residual < 1e-6);
    }
}
