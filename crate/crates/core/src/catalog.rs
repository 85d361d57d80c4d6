//! Closed-form immersions: polar surfaces, their Gauss-parametrized
//! hypersurfaces and the algebraic curves and hypersurfaces containing them.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::linalg::{inner, Signature, Vector};

const SQRT2: f64 = std::f64::consts::SQRT_2;
const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Distance from a singular boundary at which charts refuse to evaluate.
pub const BOUNDARY_GUARD: f64 = 1e-9;

/// r₀ = arccos(√(2/3)), where 3cos(2r) − 1 vanishes.
pub fn r0() -> f64 {
    (2.0f64 / 3.0).sqrt().acos()
}

/// Open interval of the polar radius `r` for the rotational surfaces.
pub fn rot_range(c: i32) -> (f64, f64) {
    if c == 1 {
        (0.0, r0())
    } else {
        (r0(), PI - r0())
    }
}

fn check_c(c: i32) -> Result<()> {
    if c == 1 || c == -1 {
        Ok(())
    } else {
        Err(GeomError::Domain(format!("c must be +1 or -1, got {c}")))
    }
}

fn check_rot_r(c: i32, r: f64) -> Result<()> {
    check_c(c)?;
    let (lo, hi) = rot_range(c);
    let ok = if c == 1 {
        // r = 0 is only a polar-coordinate singularity; the surface is smooth there.
        r >= 0.0 && r < hi - BOUNDARY_GUARD
    } else {
        r > lo + BOUNDARY_GUARD && r < hi - BOUNDARY_GUARD
    };
    if ok {
        Ok(())
    } else {
        Err(GeomError::Domain(format!(
            "r = {r} outside ({lo}, {hi}) for c = {c}"
        )))
    }
}

fn assert_unit3(x: [f64; 3]) {
    let n = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    assert!((n - 1.0).abs() <= 1e-12, "expected a unit vector, |x|² = {n}");
}

fn v5(a: [f64; 5]) -> Vector {
    Vector::from_row_slice(&a)
}

/// Map from symmetric 3×3 matrices to R⁵ with g₁(x) = Φ(xxᵀ − I/3).
fn veronese_phi(m: [[f64; 3]; 3]) -> Vector {
    v5([
        SQRT3 * m[1][2],
        SQRT3 * m[2][0],
        SQRT3 * m[0][1],
        0.5 * SQRT3 * (m[0][0] - m[1][1]),
        -1.5 * m[2][2],
    ])
}

fn outer_sym(a: [f64; 3], b: [f64; 3]) -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = a[i] * b[j] + b[i] * a[j];
        }
    }
    m
}

/// Minimal Veronese embedding of RP² into S⁴.
pub fn veronese(x: [f64; 3]) -> Vector {
    assert_unit3(x);
    let [a, b, c] = x;
    v5([
        SQRT3 * b * c,
        SQRT3 * c * a,
        SQRT3 * a * b,
        0.5 * SQRT3 * (a * a - b * b),
        0.5 * (a * a + b * b - 2.0 * c * c),
    ])
}

/// Unit normals of the Veronese surface at `x`, built from an orthonormal
/// tangent pair `(u, x × u)` of S².
pub fn veronese_normals(x: [f64; 3], u: [f64; 3]) -> (Vector, Vector) {
    assert_unit3(x);
    assert_unit3(u);
    let w = cross(x, u);
    let mut d = outer_sym(u, u);
    let ww = outer_sym(w, w);
    for i in 0..3 {
        for j in 0..3 {
            d[i][j] = 0.5 * (d[i][j] - ww[i][j]);
        }
    }
    let n1 = veronese_phi(d) / SQRT3;
    let n2 = veronese_phi(outer_sym(u, w)) / SQRT3;
    (n1, n2)
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Point of S² and its coordinate frame in the spherical chart (φ, ψ).
pub fn spherical(phi: f64, psi: f64) -> ([f64; 3], [f64; 3], [f64; 3]) {
    let (sf, cf) = phi.sin_cos();
    let (sp, cp) = psi.sin_cos();
    (
        [sf * cp, sf * sp, cf],
        [cf * cp, cf * sp, -sf],
        [-sp, cp, 0.0],
    )
}

/// Flat torus in the de Sitter space S⁴₋₁ ⊂ R^{4,1} with metric 2(dx² + dy²).
pub fn clifford_polar(x: f64, y: f64) -> Vector {
    let (sx, cx) = x.sin_cos();
    let (sy, cy) = y.sin_cos();
    v5([
        2.0 * cx * cy - 1.0,
        -SQRT2 * sx * cy,
        -SQRT2 * cx * sy,
        SQRT2 * sx * sy,
        SQRT2 * (1.0 - cx * cy),
    ])
}

/// The isometry of R^{4,1} carrying `e0(exp γ(√2x, √2y))` onto
/// [`clifford_polar`].
pub const CLIFFORD_ISOMETRY: [f64; 5] = [1.0, -1.0, -1.0, 1.0, -1.0];

/// Rotationally symmetric polar surface in S⁴_c.
pub fn rot_polar(c: i32, r: f64, theta: f64) -> Result<Vector> {
    check_rot_r(c, r)?;
    let (st, ct) = theta.sin_cos();
    let (s2t, c2t) = (2.0 * theta).sin_cos();
    let sr = r.sin();
    let (s2r, c2r) = (2.0 * r).sin_cos();
    let q = (3.0 * c2r - 1.0) / (2.0 * c as f64);
    Ok(v5([
        3.0 * st * sr * c2r,
        3.0 * ct * sr * c2r,
        1.5 * s2t * sr * s2r,
        1.5 * c2t * sr * s2r,
        q.max(0.0).powf(1.5),
    ]))
}

/// t₀ = h along the rotational surface.
pub fn rot_t0(c: i32, r: f64) -> f64 {
    (2.0 * c as f64 / (3.0 * (2.0 * r).cos() - 1.0)).sqrt()
}

/// t₁ along the rotational surface (t₂ vanishes there).
pub fn rot_t1(r: f64) -> f64 {
    (2.0 * r).sin() / (3.0 * (2.0 * r).cos() - 1.0)
}

/// Smooth parametrization of the c = 1 rotational surface by the unit
/// sphere; the circle w = 0 is the crease.
pub fn sphere_chart_y(u: f64, v: f64, w: f64) -> Vector {
    assert_unit3([u, v, w]);
    let a = 1.0 + 2.0 * w * w;
    let b = (2.0 + w * w).sqrt();
    v5([
        u * a / SQRT3,
        v * a / SQRT3,
        2.0 * u * v * b / SQRT3,
        (u * u - v * v) * b / SQRT3,
        w * w * w,
    ])
}

/// Coordinates of the rotational surface point `(r, θ)` on the unit sphere
/// of [`sphere_chart_y`], upper sheet.
pub fn y_substitution(r: f64, theta: f64) -> (f64, f64, f64) {
    let (st, ct) = theta.sin_cos();
    let sr = r.sin();
    (
        SQRT3 * st * sr,
        SQRT3 * ct * sr,
        ((3.0 * (2.0 * r).cos() - 1.0) / 2.0).max(0.0).sqrt(),
    )
}

/// The reflection `x₄ ↦ −x₄`. With the substitution of [`y_substitution`],
/// `sphere_chart_y(u, v, w) = reflect_x4(rot_polar(1, r, θ))`.
pub fn reflect_x4(p: &Vector) -> Vector {
    let mut q = p.clone();
    q[3] = -q[3];
    q
}

/// Isolated rank-two hypersurface of S⁴ (c = 1) or H⁴ (c = -1).
///
/// For c = -1 the fiber is `sinh α · e3 + cosh α · e4`, which keeps the
/// point on the hyperbolic sheet.
pub fn fhat_c(c: i32, r: f64, theta: f64, alpha: f64) -> Result<Vector> {
    check_rot_r(c, r)?;
    let (cc, ss) = if c == 1 {
        (alpha.cos(), alpha.sin())
    } else {
        (alpha.sinh(), alpha.cosh())
    };
    let (st, ct) = theta.sin_cos();
    let (s2t, c2t) = (2.0 * theta).sin_cos();
    let (sr, cr) = r.sin_cos();
    let (s2r, c2r) = (2.0 * r).sin_cos();
    let q = ((3.0 * c2r - 1.0) / (2.0 * c as f64)).max(0.0).sqrt();
    Ok(v5([
        cc * s2t * c2r - ss * c2t * cr * q,
        cc * c2t * c2r + ss * s2t * cr * q,
        cc * st * s2r - 2.0 * ss * ct * sr * q,
        cc * ct * s2r + 2.0 * ss * st * sr * q,
        1.5 * ss * (c2r - 1.0),
    ]))
}

/// The fixed isometry `(x1..x5) ↦ (x4, −x3, −x2, x1, x5)` carrying the unit
/// normal bundle of [`rot_polar`] onto the image of [`fhat_c`].
pub fn fhat_isometry(p: &Vector) -> Vector {
    v5([p[3], -p[2], -p[1], p[0], p[4]])
}

/// Clifford torus of radius √2 in R⁴ and its unit normal `h_xy/√2`.
fn clifford_h(x: f64, y: f64) -> ([f64; 4], [f64; 4]) {
    let (sx, cx) = x.sin_cos();
    let (sy, cy) = y.sin_cos();
    (
        [SQRT2 * cx * cy, SQRT2 * cx * sy, SQRT2 * sx * cy, SQRT2 * sx * sy],
        [sx * sy, -sx * cy, -cx * sy, cx * cy],
    )
}

/// Complete rank-two hypersurface of H⁴ built from the Clifford torus.
pub fn f_minus1(x: f64, y: f64, t: f64) -> Vector {
    let (h, xi) = clifford_h(x, y);
    let (ch, sh) = (t.cosh(), t.sinh());
    let mut out = [0.0; 5];
    for i in 0..4 {
        out[i] = (ch * h[i] + SQRT2 * sh * xi[i]) / SQRT2;
    }
    out[4] = SQRT2 * ch;
    v5(out)
}

/// Polar surface `(2g₁, 1)/√3` in S⁵₋₁ ⊂ R^{5,1}.
pub fn h5_polar(x: [f64; 3]) -> Vector {
    let g = veronese(x);
    let mut v = Vector::zeros(6);
    for i in 0..5 {
        v[i] = 2.0 * g[i] / SQRT3;
    }
    v[5] = 1.0 / SQRT3;
    v
}

/// Rank-two hypersurface of H⁵: `(cosh s · g₁(x) + √3 sinh s · ξ, 2 cosh s)/√3`.
pub fn h5_hyper(s: f64, x: [f64; 3], xi: &Vector) -> Vector {
    assert_eq!(xi.len(), 5);
    let g = veronese(x);
    assert!(
        (xi.norm() - 1.0).abs() <= 1e-10 && g.dot(xi).abs() <= 1e-10,
        "xi must be a unit normal of the Veronese surface"
    );
    let (ch, sh) = (s.cosh(), s.sinh());
    let mut v = Vector::zeros(6);
    for i in 0..5 {
        v[i] = (ch * g[i] + SQRT3 * sh * xi[i]) / SQRT3;
    }
    v[5] = 2.0 * ch / SQRT3;
    v
}

/// β(r) = 3 sin r (cos 2r, sin 2r / 2).
pub fn beta_curve(r: f64) -> (f64, f64) {
    let s = 3.0 * r.sin();
    let (s2, c2) = (2.0 * r).sin_cos();
    (s * c2, 0.5 * s * s2)
}

pub fn beta_poly_residual(x: f64, y: f64) -> f64 {
    let q = x * x + 4.0 * y * y;
    q * q * q - 9.0 * q * q + 81.0 * y * y
}

/// Value and magnitude scale of the degree-12 polynomial cutting out the
/// image of [`fhat_c`]. The scale is the polynomial evaluated with every
/// term replaced by its absolute value, which bounds the rounding error.
///
/// The polynomial is homogenised by Q = ⟨p, p⟩ so that it also vanishes on
/// the hyperbolic sheet; on the unit sphere it is the plain quartic-in-R form.
pub fn fhat_poly_terms(p: &Vector, c: i32) -> (f64, f64) {
    assert_eq!(p.len(), 5);
    let (x1, x2, x3, x4, x5) = (p[0], p[1], p[2], p[3], p[4]);
    let cf = c as f64;
    let r = 8.0 * x1 * x1 + 8.0 * x2 * x2 - x3 * x3 - x4 * x4;
    let q = x1 * x1 + x2 * x2 + x3 * x3 + x4 * x4 + cf * x5 * x5;
    let cubic = x1 * (x3 * x3 - x4 * x4) + 2.0 * x2 * x3 * x4;
    let x52 = x5 * x5;
    let lhs = 64.0 * x52 * x52 * (r + q) * q * q * q;
    let inner_t = x52 * (r * r - 4.0 * r * q - 8.0 * q * q) - 27.0 * cf * cubic * cubic;
    let rhs = inner_t * inner_t;

    let ra = 8.0 * x1 * x1 + 8.0 * x2 * x2 + x3 * x3 + x4 * x4;
    let qa = x1 * x1 + x2 * x2 + x3 * x3 + x4 * x4 + x5 * x5;
    let ca = x1.abs() * (x3 * x3 + x4 * x4) + 2.0 * (x2 * x3 * x4).abs();
    let lhs_a = 64.0 * x52 * x52 * (ra + qa) * qa.powi(3);
    let inner_a = x52 * (ra * ra + 4.0 * ra * qa + 8.0 * qa * qa) + 27.0 * ca * ca;
    (lhs - rhs, lhs_a + inner_a * inner_a)
}

pub fn fhat_poly_residual(p: &Vector, c: i32) -> f64 {
    fhat_poly_terms(p, c).0
}

/// First-order distance from `p` to the zero set of the polynomial in
/// [`fhat_poly_terms`], |P| / |∇P|, divided by `1 + |p|`. The gradient is
/// taken by central differences.
pub fn fhat_poly_distance(p: &Vector, c: i32) -> f64 {
    let v = fhat_poly_residual(p, c);
    if v == 0.0 {
        return 0.0;
    }
    let size = 1.0 + p.norm();
    let h = 1e-6 * size;
    let mut grad2 = 0.0;
    for i in 0..p.len() {
        let (mut a, mut b) = (p.clone(), p.clone());
        a[i] += h;
        b[i] -= h;
        let d = (fhat_poly_residual(&a, c) - fhat_poly_residual(&b, c)) / (2.0 * h);
        grad2 += d * d;
    }
    v.abs() / grad2.sqrt() / size
}

/// Parameter box of a chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub ranges: Vec<(f64, f64)>,
    pub periodic: Vec<bool>,
}

impl DomainSpec {
    pub fn new(ranges: Vec<(f64, f64)>, periodic: Vec<bool>) -> Self {
        assert_eq!(ranges.len(), periodic.len());
        Self { ranges, periodic }
    }

    pub fn dim(&self) -> usize {
        self.ranges.len()
    }

    /// Whether `u` lies at least `margin` inside every non-periodic range.
    pub fn contains_with_margin(&self, u: &[f64], margin: f64) -> bool {
        u.len() == self.dim()
            && self
                .ranges
                .iter()
                .zip(&self.periodic)
                .zip(u)
                .all(|(((lo, hi), per), x)| *per || (*x >= lo + margin && *x <= hi - margin))
    }

    /// Tensor grid with `n` points per axis, inset by `inset` (as a fraction
    /// of the range) from non-periodic ends.
    pub fn grid(&self, n: usize, inset: f64) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = self
            .ranges
            .iter()
            .zip(&self.periodic)
            .map(|(&(lo, hi), &per)| {
                (0..n)
                    .map(|i| {
                        if per {
                            lo + (hi - lo) * i as f64 / n as f64
                        } else {
                            let a = lo + inset * (hi - lo);
                            let b = hi - inset * (hi - lo);
                            if n == 1 {
                                0.5 * (a + b)
                            } else {
                                a + (b - a) * i as f64 / (n - 1) as f64
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        let mut out = vec![Vec::new()];
        for axis in &axes {
            out = out
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

/// A parametric immersion into a quadric of a semi-Euclidean space.
pub trait Immersion: Sync {
    fn param_dim(&self) -> usize;
    fn signature(&self) -> Signature;
    /// Target value of ⟨p, p⟩.
    fn quadric(&self) -> f64;
    fn domain(&self) -> DomainSpec;
    fn eval(&self, u: &[f64]) -> Result<Vector>;
}

/// The catalog of explicit immersions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "tag")]
pub enum ImmersionId {
    Veronese,
    CliffordPolar,
    RotPolar { c: i32 },
    SphereChartY,
    FhatC { c: i32 },
    FMinus1,
    H5Polar,
    H5Hyper,
    CartanF1,
}

impl ImmersionId {
    pub const TAGS: [&'static str; 9] = [
        "veronese",
        "clifford_polar",
        "rot_polar",
        "sphere_chart_Y",
        "fhat_c",
        "f_minus1",
        "h5_polar",
        "h5_hyper",
        "cartan_f1",
    ];

    /// Parses a tag; `c` is required for `rot_polar` and `fhat_c` and
    /// ignored otherwise.
    pub fn from_tag(tag: &str, c: Option<i32>) -> Result<Self> {
        let need_c = || -> Result<i32> {
            let c = c.ok_or_else(|| GeomError::Domain(format!("{tag} needs c")))?;
            check_c(c)?;
            Ok(c)
        };
        Ok(match tag {
            "veronese" => Self::Veronese,
            "clifford_polar" => Self::CliffordPolar,
            "rot_polar" => Self::RotPolar { c: need_c()? },
            "sphere_chart_Y" | "sphere_chart_y" => Self::SphereChartY,
            "fhat_c" => Self::FhatC { c: need_c()? },
            "f_minus1" => Self::FMinus1,
            "h5_polar" => Self::H5Polar,
            "h5_hyper" => Self::H5Hyper,
            "cartan_f1" => Self::CartanF1,
            _ => return Err(GeomError::Domain(format!("unknown immersion `{tag}`"))),
        })
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Self::Veronese => "veronese",
            Self::CliffordPolar => "clifford_polar",
            Self::RotPolar { .. } => "rot_polar",
            Self::SphereChartY => "sphere_chart_Y",
            Self::FhatC { .. } => "fhat_c",
            Self::FMinus1 => "f_minus1",
            Self::H5Polar => "h5_polar",
            Self::H5Hyper => "h5_hyper",
            Self::CartanF1 => "cartan_f1",
        }
    }

    /// Curvature sign of the space form the surface or hypersurface is tied to.
    pub fn c(&self) -> i32 {
        match self {
            Self::Veronese | Self::SphereChartY | Self::CartanF1 => 1,
            Self::CliffordPolar | Self::FMinus1 | Self::H5Polar | Self::H5Hyper => -1,
            Self::RotPolar { c } | Self::FhatC { c } => *c,
        }
    }

    pub fn is_surface(&self) -> bool {
        self.param_dim() == 2
    }
}

impl fmt::Display for ImmersionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RotPolar { c } | Self::FhatC { c } => write!(f, "{}(c={c})", self.tag()),
            _ => f.write_str(self.tag()),
        }
    }
}

const FIBER_SPAN: f64 = 3.0;

impl Immersion for ImmersionId {
    fn param_dim(&self) -> usize {
        match self {
            Self::Veronese | Self::CliffordPolar | Self::RotPolar { .. } => 2,
            Self::SphereChartY | Self::H5Polar => 2,
            Self::FhatC { .. } | Self::FMinus1 | Self::CartanF1 => 3,
            Self::H5Hyper => 4,
        }
    }

    fn signature(&self) -> Signature {
        match self {
            Self::Veronese | Self::SphereChartY | Self::CartanF1 => Signature::euclidean5(),
            Self::CliffordPolar | Self::FMinus1 => Signature::lorentz5(),
            Self::RotPolar { c } | Self::FhatC { c } => {
                if *c == 1 {
                    Signature::euclidean5()
                } else {
                    Signature::lorentz5()
                }
            }
            Self::H5Polar | Self::H5Hyper => Signature::lorentz6(),
        }
    }

    fn quadric(&self) -> f64 {
        match self {
            Self::FhatC { c } => *c as f64,
            Self::FMinus1 | Self::H5Hyper => -1.0,
            _ => 1.0,
        }
    }

    fn domain(&self) -> DomainSpec {
        let sphere = || vec![(0.0, PI), (0.0, TAU)];
        match self {
            Self::Veronese | Self::SphereChartY | Self::H5Polar => {
                DomainSpec::new(sphere(), vec![false, true])
            }
            Self::CliffordPolar => DomainSpec::new(vec![(0.0, TAU), (0.0, TAU)], vec![true, true]),
            Self::RotPolar { c } => {
                DomainSpec::new(vec![rot_range(*c), (0.0, TAU)], vec![false, true])
            }
            Self::FhatC { c } => {
                let fiber = if *c == 1 { (0.0, TAU) } else { (-FIBER_SPAN, FIBER_SPAN) };
                DomainSpec::new(
                    vec![rot_range(*c), (0.0, TAU), fiber],
                    vec![false, true, *c == 1],
                )
            }
            Self::FMinus1 => DomainSpec::new(
                vec![(0.0, TAU), (0.0, TAU), (-FIBER_SPAN, FIBER_SPAN)],
                vec![true, true, false],
            ),
            Self::CartanF1 => {
                let mut r = sphere();
                r.push((0.0, TAU));
                DomainSpec::new(r, vec![false, true, true])
            }
            Self::H5Hyper => {
                let mut r = sphere();
                r.push((0.0, TAU));
                r.push((-FIBER_SPAN, FIBER_SPAN));
                DomainSpec::new(r, vec![false, true, true, false])
            }
        }
    }

    fn eval(&self, u: &[f64]) -> Result<Vector> {
        if u.len() != self.param_dim() {
            return Err(GeomError::Domain(format!(
                "{self} takes {} parameters, got {}",
                self.param_dim(),
                u.len()
            )));
        }
        Ok(match self {
            Self::Veronese => veronese(spherical(u[0], u[1]).0),
            Self::CliffordPolar => clifford_polar(u[0], u[1]),
            Self::RotPolar { c } => rot_polar(*c, u[0], u[1])?,
            Self::SphereChartY => {
                let [a, b, w] = spherical(u[0], u[1]).0;
                sphere_chart_y(a, b, w)
            }
            Self::FhatC { c } => fhat_c(*c, u[0], u[1], u[2])?,
            Self::FMinus1 => f_minus1(u[0], u[1], u[2]),
            Self::H5Polar => h5_polar(spherical(u[0], u[1]).0),
            Self::CartanF1 => {
                let (x, du, _) = spherical(u[0], u[1]);
                let (n1, n2) = veronese_normals(x, du);
                n1 * u[2].cos() + n2 * u[2].sin()
            }
            Self::H5Hyper => {
                let (x, du, _) = spherical(u[0], u[1]);
                let (n1, n2) = veronese_normals(x, du);
                let xi = n1 * u[2].cos() + n2 * u[2].sin();
                h5_hyper(u[3], x, &xi)
            }
        })
    }
}

/// |⟨p, p⟩ − target| for a catalog point.
pub fn quadric_defect(imm: &dyn Immersion, p: &Vector) -> f64 {
    (inner(p, p, imm.signature()) - imm.quadric()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn veronese_examples() {
        let p = veronese([1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(p.as_slice(), &[0.0, 0.0, 0.0, SQRT3 / 2.0, 0.5][..], epsilon = 1e-15);
        let p = veronese([0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(p.as_slice(), &[0.0, 0.0, 0.0, 0.0, -1.0][..], epsilon = 1e-15);
    }

    #[test]
    fn veronese_matches_phi() {
        let (x, _, _) = spherical(0.7, 2.1);
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = x[i] * x[j] - if i == j { 1.0 / 3.0 } else { 0.0 };
            }
        }
        assert!((veronese_phi(m) - veronese(x)).amax() < 1e-15);
    }

    #[test]
    fn veronese_normals_are_orthonormal_and_normal() {
        for &(phi, psi) in &[(0.4, 0.1), (1.3, 2.9), (2.6, 5.0)] {
            let (x, du, dv) = spherical(phi, psi);
            let (n1, n2) = veronese_normals(x, du);
            let p = veronese(x);
            let h = 1e-6;
            let tu = (veronese(spherical(phi + h, psi).0) - veronese(spherical(phi - h, psi).0)) / (2.0 * h);
            let tv = (veronese(spherical(phi, psi + h).0) - veronese(spherical(phi, psi - h).0)) / (2.0 * h);
            let _ = dv;
            for n in [&n1, &n2] {
                assert!((n.norm() - 1.0).abs() < 1e-14);
                assert!(n.dot(&p).abs() < 1e-14);
                assert!(n.dot(&tu).abs() < 1e-8);
                assert!(n.dot(&tv).abs() < 1e-8);
            }
            assert!(n1.dot(&n2).abs() < 1e-14);
        }
    }

    #[test]
    fn clifford_examples() {
        let s = Signature::lorentz5();
        let p = clifford_polar(0.0, 0.0);
        assert_abs_diff_eq!(p.as_slice(), &[1.0, 0.0, 0.0, 0.0, 0.0][..], epsilon = 1e-15);
        let p = clifford_polar(PI / 2.0, 0.0);
        assert_abs_diff_eq!(p.as_slice(), &[-1.0, -SQRT2, 0.0, 0.0, SQRT2][..], epsilon = 1e-15);
        assert_abs_diff_eq!(inner(&p, &p, s), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rot_polar_examples() {
        let p = rot_polar(1, 0.0, 0.3).unwrap();
        assert_abs_diff_eq!(p.as_slice(), &[0.0, 0.0, 0.0, 0.0, 1.0][..], epsilon = 1e-15);
        let th = 0.8;
        let p = rot_polar(-1, PI / 2.0, th).unwrap();
        let want = [-3.0 * th.sin(), -3.0 * th.cos(), 0.0, 0.0, 2.0 * SQRT2];
        assert_abs_diff_eq!(p.as_slice(), &want[..], epsilon = 1e-14);
        assert_abs_diff_eq!(inner(&p, &p, Signature::lorentz5()), 1.0, epsilon = 1e-12);
        assert!(rot_polar(1, r0(), 0.0).is_err());
        assert!(rot_polar(-1, r0() + 1e-10, 0.0).is_err());
        assert!(rot_polar(-1, 0.2, 0.0).is_err());
    }

    #[test]
    fn sphere_chart_examples() {
        assert_abs_diff_eq!(
            sphere_chart_y(0.0, 0.0, 1.0).as_slice(),
            &[0.0, 0.0, 0.0, 0.0, 1.0][..],
            epsilon = 1e-15
        );
        let p = sphere_chart_y(1.0, 0.0, 0.0);
        let want = [1.0 / SQRT3, 0.0, 0.0, SQRT2 / SQRT3, 0.0];
        assert_abs_diff_eq!(p.as_slice(), &want[..], epsilon = 1e-15);
    }

    #[test]
    fn sphere_chart_matches_rot_polar() {
        for (r, th) in [(0.3, 0.7), (0.5, 2.0), (0.05, 4.0)] {
            let (u, v, w) = y_substitution(r, th);
            let p = reflect_x4(&rot_polar(1, r, th).unwrap());
            assert_abs_diff_eq!(sphere_chart_y(u, v, w).as_slice(), p.as_slice(), epsilon = 1e-14);
        }
    }

    #[test]
    fn fhat_examples() {
        let (r, th) = (0.3, 0.9);
        let p = fhat_c(1, r, th, 0.0).unwrap();
        let want = [
            (2.0 * th).sin() * (2.0 * r).cos(),
            (2.0 * th).cos() * (2.0 * r).cos(),
            th.sin() * (2.0 * r).sin(),
            th.cos() * (2.0 * r).sin(),
            0.0,
        ];
        assert_abs_diff_eq!(p.as_slice(), &want[..], epsilon = 1e-15);
        let al = 0.4;
        let p = fhat_c(1, 0.0, th, al).unwrap();
        let want = [(2.0 * th - al).sin(), (2.0 * th - al).cos(), 0.0, 0.0, 0.0];
        assert_abs_diff_eq!(p.as_slice(), &want[..], epsilon = 1e-15);
        let p = fhat_c(-1, 1.3, 2.0, -0.7).unwrap();
        assert_abs_diff_eq!(inner(&p, &p, Signature::lorentz5()), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn f_minus1_example() {
        let p = f_minus1(0.0, 0.0, 0.0);
        assert_abs_diff_eq!(p.as_slice(), &[1.0, 0.0, 0.0, 0.0, SQRT2][..], epsilon = 1e-15);
    }

    #[test]
    fn h5_examples() {
        let s = Signature::lorentz6();
        let p = h5_polar([1.0, 0.0, 0.0]);
        let want = [0.0, 0.0, 0.0, 1.0, 1.0 / SQRT3, 1.0 / SQRT3];
        assert_abs_diff_eq!(p.as_slice(), &want[..], epsilon = 1e-15);
        assert_abs_diff_eq!(inner(&p, &p, s), 1.0, epsilon = 1e-15);
        let (x, du, _) = spherical(0.9, 0.2);
        let (n1, _) = veronese_normals(x, du);
        let f = h5_hyper(0.0, x, &n1);
        let g = veronese(x);
        for i in 0..5 {
            assert_abs_diff_eq!(f[i], g[i] / SQRT3, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(f[5], 2.0 / SQRT3, epsilon = 1e-15);
        assert_abs_diff_eq!(inner(&f, &f, s), -1.0, epsilon = 1e-14);
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_curve(0.0), (0.0, 0.0));
        let (x, y) = beta_curve(PI / 2.0);
        assert_abs_diff_eq!(x, -3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(y, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(beta_poly_residual(x, y), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn fhat_poly_examples() {
        assert_eq!(fhat_poly_residual(&v5([1.0, 0.0, 0.0, 0.0, 0.0]), 1), 0.0);
        assert_eq!(fhat_poly_residual(&v5([0.0, 0.0, 0.0, 0.0, 1.0]), 1), 0.0);
        assert_eq!(fhat_poly_residual(&v5([0.0, 0.0, 0.0, 0.0, 1.0]), -1), 0.0);
    }

    #[test]
    fn fhat_poly_detects_points_off_the_variety() {
        for (c, r) in [(1, 0.4), (-1, 1.2)] {
            let p = fhat_c(c, r, 0.7, 0.9).unwrap();
            let (v, scale) = fhat_poly_terms(&p, c);
            assert!(v.abs() < 1e-14 * scale);
            assert!(fhat_poly_distance(&p, c) < 1e-12);
            for i in 0..5 {
                let mut q = p.clone();
                q[i] += 1e-3;
                assert!(fhat_poly_distance(&q, c) > 1e-6, "c={c} i={i}");
            }
        }
    }

    #[test]
    fn tags_round_trip() {
        for tag in ImmersionId::TAGS {
            let id = ImmersionId::from_tag(tag, Some(-1)).unwrap();
            assert_eq!(id.tag(), tag);
        }
        assert!(ImmersionId::from_tag("rot_polar", None).is_err());
        assert!(ImmersionId::from_tag("torus", Some(1)).is_err());
    }

    #[test]
    fn grid_shape() {
        let d = ImmersionId::RotPolar { c: 1 }.domain();
        let g = d.grid(5, 0.05);
        assert_eq!(g.len(), 25);
        assert!(g.iter().all(|u| d.contains_with_margin(u, 1e-3)));
    }
}
