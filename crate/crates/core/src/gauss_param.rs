//! Gauss parametrization: the unit normal bundle Λ of a polar surface, the
//! hypersurface f̂(p, w) = w and the shape operators A_w along the fibers.

use nalgebra::Matrix2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::Immersion;
use crate::error::{GeomError, Result};
use crate::linalg::{inner, Vector};
use crate::numgeom::{
    canonical_frames_with, fundamental_forms, surface_jet, veronese_like_frames, FrameOptions,
    JetConfig, ShapeData, SurfaceJet,
};

/// Half-width of the hyperbolic fiber parameter range.
pub const FIBER_RANGE: f64 = 3.0;

/// A point `Ct ξ₁ + St ξ₂` of Λ, with `c Ct² + St² = eps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalDirection {
    pub ct: f64,
    pub st: f64,
    pub eps: i32,
    pub c: i32,
}

impl NormalDirection {
    pub fn new(ct: f64, st: f64, eps: i32, c: i32) -> Result<Self> {
        let lhs = c as f64 * ct * ct + st * st;
        if (lhs - eps as f64).abs() > 1e-12 * (1.0 + ct * ct + st * st) {
            return Err(GeomError::Domain(format!(
                "({ct}, {st}) violates c·Ct² + St² = eps ({lhs} vs {eps})"
            )));
        }
        Ok(Self { ct, st, eps, c })
    }
}

/// Sample of Λ: `n` points on the circle (c = 1) or `n/2` on each branch of
/// the hyperbola `(sinh t, ±cosh t)`, `t ∈ [−T, T]` (c = −1).
pub fn lambda_grid(c: i32, eps: i32, n: usize) -> Result<Vec<NormalDirection>> {
    if n < 2 {
        return Err(GeomError::Domain("fiber grid needs at least 2 points".into()));
    }
    match (c, eps) {
        (1, 1) => Ok((0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                NormalDirection { ct: t.cos(), st: t.sin(), eps, c }
            })
            .collect()),
        (-1, 1) => {
            let half = n / 2;
            let mut out = Vec::with_capacity(2 * half);
            for sheet in [1.0, -1.0] {
                for k in 0..half {
                    let t = if half == 1 {
                        0.0
                    } else {
                        -FIBER_RANGE + 2.0 * FIBER_RANGE * k as f64 / (half - 1) as f64
                    };
                    out.push(NormalDirection { ct: t.sinh(), st: sheet * t.cosh(), eps, c });
                }
            }
            Ok(out)
        }
        _ => Err(GeomError::Domain(format!(
            "no rank-two family with c = {c}, eps = {eps}"
        ))),
    }
}

/// A point of the hypersurface f̂ over a polar surface point.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberSample {
    pub base: Vec<f64>,
    pub dir: NormalDirection,
    pub position: Vector,
}

pub fn f_hat(shape: &ShapeData, base: &[f64], dir: NormalDirection) -> FiberSample {
    FiberSample {
        base: base.to_vec(),
        dir,
        position: &shape.xi1 * dir.ct + &shape.xi2 * dir.st,
    }
}

pub fn shape_aw(shape: &ShapeData, dir: NormalDirection) -> (Matrix2<f64>, f64) {
    let a = shape.shape_along(dir.ct, dir.st);
    let d = a.determinant();
    (a, d)
}

pub fn regularity(dir: NormalDirection, shape: &ShapeData) -> bool {
    shape_aw(shape, dir).1.abs() > 1e-10
}

/// Nonzero principal curvatures of f̂ at `(p, w)`: the eigenvalues of A_w⁻¹,
/// followed by the nullity value 0.
pub fn fhat_principal_curvatures(shape: &ShapeData, dir: NormalDirection) -> Result<[f64; 3]> {
    let (a, _) = shape_aw(shape, dir);
    let inv = a
        .try_inverse()
        .ok_or_else(|| GeomError::Singular("A_w is not invertible".into()))?;
    let sym = (inv + inv.transpose()) * 0.5;
    let ev = sym.symmetric_eigenvalues();
    let (lo, hi) = if ev[0] <= ev[1] { (ev[0], ev[1]) } else { (ev[1], ev[0]) };
    Ok([lo, hi, 0.0])
}

/// Mean curvature data at a point of f̂.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanCurvature {
    /// `c·eps·St·(h² − c)/(h·a)`.
    pub hypersurface: f64,
    /// `(h² − 1)²/h²`, the squared mean curvature of the polar surface (c = 1 only).
    pub surface_sq: Option<f64>,
}

pub fn mean_curvature(shape: &ShapeData, dir: NormalDirection) -> MeanCurvature {
    mean_curvature_from(shape.c, shape.eps, shape.h, shape.a, dir.st)
}

pub fn mean_curvature_from(c: i32, eps: i32, h: f64, a: f64, st: f64) -> MeanCurvature {
    let cf = c as f64;
    MeanCurvature {
        hypersurface: cf * eps as f64 * st * (h * h - cf) / (h * a),
        surface_sq: (c == 1).then(|| (h * h - 1.0).powi(2) / (h * h)),
    }
}

/// How the normal frame of each base point is obtained during a scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameMode {
    /// Normal-form frames; minimal points are errors.
    Canonical,
    /// Frames for surfaces made of minimal Veronese-like points.
    VeroneseLike,
    /// Codimension-three surfaces of S⁵₋₁ with one time-like normal ξ₀:
    /// `w = cosh r ξ₀ + sinh r (cos t ξ₁ + sin t ξ₂)`.
    TimelikeSphere,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetScanConfig {
    pub fibers: usize,
    pub mode: FrameMode,
    pub jet: JetConfig,
    pub frames: FrameOptions,
}

impl Default for DetScanConfig {
    fn default() -> Self {
        Self {
            fibers: 64,
            mode: FrameMode::Canonical,
            jet: JetConfig::default(),
            frames: FrameOptions::default(),
        }
    }
}

/// Outcome of a det-constancy scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetScanReport {
    pub reference: f64,
    pub max_dev: f64,
    pub worst_base: Vec<f64>,
    pub worst_fiber: usize,
    pub min_det: f64,
    pub max_det: f64,
    pub base_points: usize,
    pub samples: usize,
    /// Range of the measured normal-form parameter `a`.
    pub a_range: (f64, f64),
}

struct PointScan {
    dets: Vec<f64>,
    a: f64,
}

fn scan_point(j: &SurfaceJet, c: i32, cfg: &DetScanConfig) -> Result<PointScan> {
    match cfg.mode {
        FrameMode::Canonical | FrameMode::VeroneseLike => {
            let sd = if cfg.mode == FrameMode::Canonical {
                canonical_frames_with(j, c, &cfg.frames)?
            } else {
                veronese_like_frames(j)?
            };
            let dirs = lambda_grid(c, sd.eps, cfg.fibers)?;
            Ok(PointScan {
                dets: dirs.iter().map(|d| shape_aw(&sd, *d).1).collect(),
                a: sd.a,
            })
        }
        FrameMode::TimelikeSphere => {
            let ff = fundamental_forms(j.jet())?;
            if ff.normals.len() != 3 || ff.normal_signs != [1.0, 1.0, -1.0] {
                return Err(GeomError::Degenerate(
                    "expected a normal space with two space-like and one time-like direction".into(),
                ));
            }
            let (x0, x1, x2) = (&ff.normals[2], &ff.normals[0], &ff.normals[1]);
            let nt = 8.min(cfg.fibers);
            let nr = (cfg.fibers / nt).max(1);
            let mut dets = Vec::with_capacity(nr * nt);
            for ir in 0..nr {
                let r = FIBER_RANGE * ir as f64 / nr as f64;
                for it in 0..nt {
                    let t = std::f64::consts::TAU * it as f64 / nt as f64;
                    let w = x0 * r.cosh() + (x1 * t.cos() + x2 * t.sin()) * r.sinh();
                    let a = ff.shape_along(&w);
                    dets.push(a.determinant());
                }
            }
            let a0 = ff.shape_along(x0);
            Ok(PointScan {
                dets,
                a: 0.5 * a0.trace(),
            })
        }
    }
}

/// Scans det A_w over `base_grid × Λ` using oracle frames and compares with
/// `reference`.
pub fn det_scan(
    imm: &dyn Immersion,
    c: i32,
    base_grid: &[Vec<f64>],
    reference: f64,
    cfg: &DetScanConfig,
) -> Result<DetScanReport> {
    let jets: Vec<(Vec<f64>, SurfaceJet)> = base_grid
        .par_iter()
        .map(|u| {
            surface_jet(imm, u, &cfg.jet)
                .map(|j| (u.clone(), j))
                .map_err(|e| e.at(format!("{u:?}")))
        })
        .collect::<Result<_>>()?;
    det_scan_jets(&jets, c, reference, cfg)
}

/// [`det_scan`] over precomputed jets, each labelled by its base point.
pub fn det_scan_jets(
    jets: &[(Vec<f64>, SurfaceJet)],
    c: i32,
    reference: f64,
    cfg: &DetScanConfig,
) -> Result<DetScanReport> {
    let scans: Vec<PointScan> = jets
        .par_iter()
        .map(|(u, j)| scan_point(j, c, cfg).map_err(|e| e.at(format!("{u:?}"))))
        .collect::<Result<_>>()?;
    let mut rep = DetScanReport {
        reference,
        max_dev: 0.0,
        worst_base: jets.first().map(|(u, _)| u.clone()).unwrap_or_default(),
        worst_fiber: 0,
        min_det: f64::INFINITY,
        max_det: f64::NEG_INFINITY,
        base_points: jets.len(),
        samples: 0,
        a_range: (f64::INFINITY, f64::NEG_INFINITY),
    };
    for ((u, _), s) in jets.iter().zip(&scans) {
        rep.a_range = (rep.a_range.0.min(s.a), rep.a_range.1.max(s.a));
        for (k, &d) in s.dets.iter().enumerate() {
            rep.samples += 1;
            rep.min_det = rep.min_det.min(d);
            rep.max_det = rep.max_det.max(d);
            let dev = (d - reference).abs();
            if !(dev <= rep.max_dev) {
                rep.max_dev = dev;
                rep.worst_base = u.clone();
                rep.worst_fiber = k;
            }
        }
    }
    Ok(rep)
}

/// |⟨position, g⟩| and |⟨position, position⟩ − c| for a fiber sample.
pub fn fiber_defects(sample: &FiberSample, shape: &ShapeData) -> (f64, f64) {
    let sig = shape.sig;
    (
        inner(&sample.position, &shape.point, sig).abs(),
        (inner(&sample.position, &sample.position, sig) - shape.c as f64).abs(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Signature;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lambda_examples() {
        let g = lambda_grid(1, 1, 4).unwrap();
        let want = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];
        for (d, (c, s)) in g.iter().zip(want) {
            assert_abs_diff_eq!(d.ct, c, epsilon = 1e-15);
            assert_abs_diff_eq!(d.st, s, epsilon = 1e-15);
        }
        let g = lambda_grid(-1, 1, 3 * 2).unwrap();
        assert_eq!((g[1].ct, g[1].st), (0.0, 1.0));
        assert_eq!((g[4].ct, g[4].st), (0.0, -1.0));
        for d in lambda_grid(-1, 1, 64).unwrap() {
            let r = -d.ct * d.ct + d.st * d.st - 1.0;
            assert!(r.abs() <= 1e-14 * (1.0 + d.st * d.st));
        }
        assert!(lambda_grid(-1, -1, 8).is_err());
        assert!(lambda_grid(1, 1, 1).is_err());
    }

    fn fake_shape(a2: Matrix2<f64>) -> ShapeData {
        let z = Vector::zeros(5);
        ShapeData {
            point: z.clone(),
            e1: z.clone(),
            e2: z.clone(),
            xi1: z.clone(),
            xi2: z,
            a1: Matrix2::new(0.0, 1.0, 1.0, 0.0),
            a2,
            a: 1.0,
            h: 1.0,
            eps: 1,
            c: 1,
            sig: Signature::euclidean5(),
            residual: 0.0,
        }
    }

    #[test]
    fn regularity_examples() {
        let s = fake_shape(Matrix2::zeros());
        let d = NormalDirection::new(0.0, 1.0, 1, 1).unwrap();
        assert!(!regularity(d, &s));
        let d = NormalDirection::new(1.0, 0.0, 1, 1).unwrap();
        assert!(regularity(d, &s));
    }

    #[test]
    fn mean_curvature_examples() {
        let m = mean_curvature_from(1, 1, 1.0, 2.0 / 3.0, 0.7);
        assert_eq!(m.hypersurface, 0.0);
        assert_eq!(m.surface_sq, Some(0.0));
        assert_eq!(mean_curvature_from(1, 1, 1.7, 2.0 / 3.0, 0.0).hypersurface, 0.0);
        assert_eq!(mean_curvature_from(-1, 1, 0.7, 2.0 / 3.0, 1.0).surface_sq, None);
    }

    #[test]
    fn direction_constraint() {
        assert!(NormalDirection::new(0.6, 0.8, 1, 1).is_ok());
        assert!(NormalDirection::new(0.6, 0.9, 1, 1).is_err());
        assert!(NormalDirection::new(1.0, 2f64.sqrt(), 1, -1).is_ok());
    }
}
