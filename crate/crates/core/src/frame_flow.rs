//! Frame integration: the Maurer–Cartan form η of a reduced state, a
//! fourth-order commutator-free Lie-group stepper for `dG = G η`, the
//! closed-form rotational and flat solutions, and lattice generation of
//! family surfaces.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{rot_t0, rot_t1, DomainSpec, Immersion, CLIFFORD_ISOMETRY};
use crate::error::{GeomError, Result};
use crate::leafspace::{
    first_integral, n_relative_norm, seed_u0, t_derivatives, waist_radius, TState, L_MAX,
};
use crate::linalg::{commutator, expm, AlgebraElement, FrameMatrix, Matrix, Signature, Vector};

const SQRT2: f64 = std::f64::consts::SQRT_2;
const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Weights and nodes of the two-exponential commutator-free scheme.
const CF_A1: f64 = 0.25 + SQRT3 / 6.0;
const CF_A2: f64 = 0.25 - SQRT3 / 6.0;
const GAUSS1: f64 = 0.5 - SQRT3 / 6.0;
const GAUSS2: f64 = 0.5 + SQRT3 / 6.0;

/// Flows stop when |t₀² − c| falls below this.
pub const MINIMAL_MARGIN: f64 = 1e-3;
/// Flows stop when the relative size of N falls below this (C₁ ∪ C₂).
pub const CURVE_MARGIN: f64 = 1e-6;

fn frame_sig(s: &TState) -> Result<Signature> {
    Signature::frame(s.c, s.eps)
}

fn eta_matrix(s: &TState, w: (f64, f64)) -> Matrix {
    let (w1, w2) = w;
    let (k1, k2) = s.omega();
    let (m1, m2) = s.mu();
    let om = k1 * w1 + k2 * w2;
    let mu = m1 * w1 + m2 * w2;
    let (a, h, c, e) = (s.a, s.t0, s.c as f64, s.eps as f64);
    #[rustfmt::skip]
    let rows = [
        0.0, -w1,              -w2,              0.0,       0.0,
        w1,  0.0,              -om,              -a * w2,   -a * h * w1,
        w2,  om,               0.0,              -a * w1,   a * c * w2 / h,
        0.0, e * a * w2,       e * a * w1,       0.0,       -c * mu,
        0.0, e * c * a * h * w1, -e * a * w2 / h, mu,        0.0,
    ];
    Matrix::from_row_slice(5, 5, &rows)
}

/// η evaluated on the tangent vector with coframe values `omega = (ω₁, ω₂)`.
pub fn eta_of(s: &TState, omega: (f64, f64)) -> Result<AlgebraElement> {
    t_derivatives(s)?;
    AlgebraElement::new(eta_matrix(s, omega), frame_sig(s)?)
}

/// Reduced state and frame.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub t: TState,
    pub g: FrameMatrix,
    /// Signed arclength travelled along E₁ and E₂.
    pub arclength: [f64; 2],
}

impl FlowState {
    pub fn new(t: TState) -> Result<Self> {
        Ok(Self {
            g: FrameMatrix::identity(frame_sig(&t)?),
            t,
            arclength: [0.0; 2],
        })
    }

    /// The surface point e₀.
    pub fn position(&self) -> Vector {
        self.g.column(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    E1,
    E2,
}

impl Direction {
    fn coframe(self) -> (f64, f64) {
        match self {
            Direction::E1 => (1.0, 0.0),
            Direction::E2 => (0.0, 1.0),
        }
    }

    fn index(self) -> usize {
        match self {
            Direction::E1 => 0,
            Direction::E2 => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub dir: Direction,
    pub length: f64,
    pub step: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub legs: Vec<Leg>,
}

impl PathSpec {
    pub fn single(dir: Direction, length: f64, step: f64) -> Self {
        Self { legs: vec![Leg { dir, length, step }] }
    }

    pub fn then(mut self, dir: Direction, length: f64, step: f64) -> Self {
        self.legs.push(Leg { dir, length, step });
        self
    }
}

/// Result of [`flow`]: the final state and, if the path was cut short, why.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowOutcome {
    pub state: FlowState,
    pub stopped: Option<String>,
    pub substeps: usize,
}

fn t_vec(s: &TState, family: bool) -> Vec<f64> {
    if family {
        vec![s.t0, s.t1, s.t2]
    } else {
        vec![s.t0, s.t1, s.t2, s.t3]
    }
}

fn with_vec(s: &TState, v: &[f64]) -> TState {
    let mut out = s.with_t([v[0], v[1], v[2]]);
    if v.len() == 4 {
        out.t3 = v[3];
    }
    out
}

fn field(s: &TState, w: (f64, f64), family: bool) -> Result<Vec<f64>> {
    let d = t_derivatives(s)?.along(w);
    Ok(if family { d[..3].to_vec() } else { d.to_vec() })
}

fn axpy(x: &[f64], a: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(p, q)| p + a * q).collect()
}

/// Flows stop when t₀ exceeds this (approach to a crease).
pub const DIVERGENCE_BOUND: f64 = 1e6;

fn stop_reason(s: &TState) -> Option<String> {
    let t = [s.t0, s.t1, s.t2, s.t3];
    if t.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_BOUND) {
        return Some("state diverged (crease approach)".into());
    }
    if s.gap().abs() < MINIMAL_MARGIN {
        return Some(format!("t0² − c = {:.3e} is within the minimal-point margin", s.gap()));
    }
    if s.is_family() && n_relative_norm(&s.leaf_point()) < CURVE_MARGIN {
        return Some("state reached C1 ∪ C2".into());
    }
    None
}

/// One step of length `h` along coframe direction `w`.
fn step(t: &TState, g: &Matrix, w: (f64, f64), h: f64, family: bool) -> Result<(TState, Matrix)> {
    let y0 = t_vec(t, family);
    let k1 = field(t, w, family)?;
    let k2 = field(&with_vec(t, &axpy(&y0, 0.5 * h, &k1)), w, family)?;
    let k3 = field(&with_vec(t, &axpy(&y0, 0.5 * h, &k2)), w, family)?;
    let k4 = field(&with_vec(t, &axpy(&y0, h, &k3)), w, family)?;
    let y1: Vec<f64> = (0..y0.len())
        .map(|i| y0[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    let t1 = with_vec(t, &y1);
    let f1 = field(&t1, w, family)?;
    // Cubic Hermite interpolant of t at the Gauss nodes.
    let at = |th: f64| -> TState {
        let h00 = 2.0 * th.powi(3) - 3.0 * th * th + 1.0;
        let h10 = th.powi(3) - 2.0 * th * th + th;
        let h01 = -2.0 * th.powi(3) + 3.0 * th * th;
        let h11 = th.powi(3) - th * th;
        let v: Vec<f64> = (0..y0.len())
            .map(|i| h00 * y0[i] + h10 * h * k1[i] + h01 * y1[i] + h11 * h * f1[i])
            .collect();
        with_vec(t, &v)
    };
    let e1 = eta_matrix(&at(GAUSS1), w);
    let e2 = eta_matrix(&at(GAUSS2), w);
    if e1.iter().chain(e2.iter()).any(|v| !v.is_finite()) {
        return Err(GeomError::Singular("non-finite connection along step".into()));
    }
    let x1 = (&e1 * CF_A1 + &e2 * CF_A2) * h;
    let x2 = (&e1 * CF_A2 + &e2 * CF_A1) * h;
    Ok((t1, g * expm(&x1) * expm(&x2)))
}

/// Integrates state and frame along a sequence of E₁/E₂ legs.
///
/// Family states keep t₃ = 0; other states integrate all four invariants.
pub fn flow(fs: &FlowState, path: &PathSpec) -> Result<FlowOutcome> {
    let family = fs.t.is_family();
    let mut t = fs.t;
    let mut g = fs.g.matrix().clone();
    let mut arc = fs.arclength;
    let mut substeps = 0;
    let sig = fs.g.sig();
    for leg in &path.legs {
        if !(leg.step > 0.0) {
            return Err(GeomError::Domain(format!("step {} must be positive", leg.step)));
        }
        if leg.length == 0.0 {
            continue;
        }
        let n = (leg.length.abs() / leg.step).ceil().max(1.0) as usize;
        let h = leg.length / n as f64;
        let w = leg.dir.coframe();
        for _ in 0..n {
            let (t1, g1) = match step(&t, &g, w, h, family) {
                Ok(next) => next,
                Err(e) => {
                    return Ok(FlowOutcome {
                        state: FlowState { t, g: FrameMatrix::new_unchecked(g, sig), arclength: arc },
                        stopped: Some(e.to_string()),
                        substeps,
                    })
                }
            };
            t = t1;
            g = g1;
            arc[leg.dir.index()] += h;
            substeps += 1;
            if let Some(reason) = stop_reason(&t) {
                return Ok(FlowOutcome {
                    state: FlowState { t, g: FrameMatrix::new_unchecked(g, sig), arclength: arc },
                    stopped: Some(reason),
                    substeps,
                });
            }
        }
    }
    Ok(FlowOutcome {
        state: FlowState { t, g: FrameMatrix::new_unchecked(g, sig), arclength: arc },
        stopped: None,
        substeps,
    })
}

fn flow_complete(fs: &FlowState, path: &PathSpec) -> Result<FlowState> {
    let out = flow(fs, path)?;
    match out.stopped {
        None => Ok(out.state),
        Some(r) => Err(GeomError::Singular(r)),
    }
}

/// Observed versus predicted commutator of the E₁ and E₂ flows on t.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolonomyDefect {
    /// t(E₁ then E₂) − t(E₂ then E₁).
    pub observed: [f64; 3],
    /// s²·[E₁, E₂]t.
    pub predicted: [f64; 3],
}

impl HolonomyDefect {
    pub fn observed_norm(&self) -> f64 {
        self.observed.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn mismatch(&self) -> f64 {
        (0..3)
            .map(|i| (self.observed[i] - self.predicted[i]).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Bracket coefficients: [E₁, E₂] = b₁E₁ + b₂E₂.
pub fn bracket_coefficients(s: &TState) -> (f64, f64) {
    let g = s.gap();
    (s.t0 * s.t0 * s.t2 / g, -(s.c as f64) * s.t1 / g)
}

pub fn holonomy_defect(fs: &FlowState, s: f64) -> Result<HolonomyDefect> {
    if !(s.abs() <= 1e-2) {
        return Err(GeomError::Domain(format!("holonomy step {s} exceeds 1e-2")));
    }
    let h = s.abs() / 16.0;
    let a = flow_complete(fs, &PathSpec::single(Direction::E1, s, h).then(Direction::E2, s, h))?;
    let b = flow_complete(fs, &PathSpec::single(Direction::E2, s, h).then(Direction::E1, s, h))?;
    let d = t_derivatives(&fs.t)?;
    let (b1, b2) = bracket_coefficients(&fs.t);
    let mut predicted = [0.0; 3];
    for (i, p) in predicted.iter_mut().enumerate() {
        *p = s * s * (b1 * d.d[i].0 + b2 * d.d[i].1);
    }
    Ok(HolonomyDefect {
        observed: [a.t.t0 - b.t.t0, a.t.t1 - b.t.t1, a.t.t2 - b.t.t2],
        predicted,
    })
}

/// Right-action integration of `G' = G·A(s)` with Gauss-node evaluation.
pub fn integrate_right(g0: &Matrix, a: impl Fn(f64) -> Matrix, s0: f64, s1: f64, n: usize) -> Matrix {
    let h = (s1 - s0) / n.max(1) as f64;
    let mut g = g0.clone();
    for k in 0..n.max(1) {
        let s = s0 + k as f64 * h;
        let e1 = a(s + GAUSS1 * h);
        let e2 = a(s + GAUSS2 * h);
        g = g * expm(&((&e1 * CF_A1 + &e2 * CF_A2) * h)) * expm(&((&e1 * CF_A2 + &e2 * CF_A1) * h));
    }
    g
}

/// η = η₁ dr + η₂ dθ on the rotational surfaces.
pub fn rot_eta1(c: i32, r: f64) -> Matrix {
    let t = rot_t0(c, r);
    let c = c as f64;
    #[rustfmt::skip]
    let m = [
        0.0, -3.0,        0.0,  0.0, 0.0,
        3.0, 0.0,         0.0,  0.0, -2.0 * t,
        0.0, 0.0,         0.0, -2.0, 0.0,
        0.0, 0.0,         2.0,  0.0, 0.0,
        0.0, 2.0 * c * t, 0.0,  0.0, 0.0,
    ];
    Matrix::from_row_slice(5, 5, &m)
}

pub fn rot_eta2(c: i32, r: f64) -> Matrix {
    let t = rot_t0(c, r);
    let (s, co) = r.sin_cos();
    let c = c as f64;
    #[rustfmt::skip]
    let m = [
        0.0,     0.0,       -3.0 * s,       0.0,             0.0,
        0.0,     0.0,       -co,            -2.0 * s,        0.0,
        3.0 * s, co,        0.0,            0.0,             2.0 * c * s / t,
        0.0,     2.0 * s,   0.0,            0.0,             2.0 * c * co / t,
        0.0,     0.0,       -2.0 * s / t,   -2.0 * co / t,   0.0,
    ];
    Matrix::from_row_slice(5, 5, &m)
}

/// dη₂/dr, using t₀' = 3t₀t₁.
pub fn rot_eta2_prime(c: i32, r: f64) -> Matrix {
    let t = rot_t0(c, r);
    let t1 = rot_t1(r);
    let (s, co) = r.sin_cos();
    let c = c as f64;
    let inv = 1.0 / t;
    let dinv = -3.0 * t1 / t;
    let ds_t = co * inv + s * dinv;
    let dc_t = -s * inv + co * dinv;
    #[rustfmt::skip]
    let m = [
        0.0,      0.0,      -3.0 * co,   0.0,          0.0,
        0.0,      0.0,      s,           -2.0 * co,    0.0,
        3.0 * co, -s,       0.0,         0.0,          2.0 * c * ds_t,
        0.0,      2.0 * co, 0.0,         0.0,          2.0 * c * dc_t,
        0.0,      0.0,      -2.0 * ds_t, -2.0 * dc_t,  0.0,
    ];
    Matrix::from_row_slice(5, 5, &m)
}

/// Reference radius where T(r) = I.
pub fn rot_reference_r(c: i32) -> f64 {
    if c == 1 {
        0.3
    } else {
        std::f64::consts::FRAC_PI_2
    }
}

/// Closed-form data of the rotational frame `G(r, θ) = e^{θH} T(r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RotClosedForm {
    pub eta1: Matrix,
    pub eta2: Matrix,
    pub t: Matrix,
    pub h: Matrix,
}

impl RotClosedForm {
    pub fn frame(&self, theta: f64) -> Matrix {
        expm(&(&self.h * theta)) * &self.t
    }
}

pub fn rot_closed_form(c: i32, r: f64) -> Result<RotClosedForm> {
    crate::catalog::rot_polar(c, r, 0.0)?;
    let r_ref = rot_reference_r(c);
    let n = ((r - r_ref).abs() / 1e-3).ceil().max(1.0) as usize;
    let t = integrate_right(&Matrix::identity(5, 5), |s| rot_eta1(c, s), r_ref, r, n);
    let sig = Signature::ambient(c)?;
    let tinv = FrameMatrix::new_unchecked(t.clone(), sig).inverse().into_matrix();
    let eta2 = rot_eta2(c, r);
    let h = &t * &eta2 * tinv;
    Ok(RotClosedForm { eta1: rot_eta1(c, r), eta2, t, h })
}

/// Generators of γ: `γ(x, y) = x·GX + y·GY`.
pub fn clifford_generators() -> (Matrix, Matrix) {
    let r = 1.0 / SQRT2;
    #[rustfmt::skip]
    let gx = [
        0.0, -1.0, 0.0, 0.0, 0.0,
        1.0, 0.0,  0.0, 0.0, -r,
        0.0, 0.0,  0.0, -r,  0.0,
        0.0, 0.0,  r,   0.0, 0.0,
        0.0, -r,   0.0, 0.0, 0.0,
    ];
    #[rustfmt::skip]
    let gy = [
        0.0, 0.0, -1.0, 0.0, 0.0,
        0.0, 0.0, 0.0,  -r,  0.0,
        1.0, 0.0, 0.0,  0.0, -r,
        0.0, r,   0.0,  0.0, 0.0,
        0.0, 0.0, -r,   0.0, 0.0,
    ];
    (Matrix::from_row_slice(5, 5, &gx), Matrix::from_row_slice(5, 5, &gy))
}

/// `e^{γ(x, y)}`; fails if the generators do not commute.
pub fn clifford_closed_form(x: f64, y: f64) -> Result<FrameMatrix> {
    let (gx, gy) = clifford_generators();
    let comm = commutator(&gx, &gy).amax();
    if comm > 1e-14 {
        return Err(GeomError::Inconsistent(format!("γ generators do not commute ({comm:e})")));
    }
    Ok(FrameMatrix::new_unchecked(expm(&(gx * x + gy * y)), Signature::lorentz5()))
}

/// The flat torus as `D·e₀(e^{γ(√2x, √2y)})`, which reproduces the
/// parametrization with metric 2(dx² + dy²).
pub fn clifford_point(x: f64, y: f64) -> Result<Vector> {
    let g = clifford_closed_form(SQRT2 * x, SQRT2 * y)?;
    let e0 = g.column(0);
    Ok(Vector::from_iterator(5, e0.iter().zip(CLIFFORD_ISOMETRY).map(|(a, d)| a * d)))
}

/// Lattice geometry and stepping for [`generate_surface`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatchSpec {
    pub n: usize,
    pub half_width: f64,
    pub step: f64,
}

impl Default for PatchSpec {
    fn default() -> Self {
        Self { n: 30, half_width: 0.15, step: 1e-3 }
    }
}

impl PatchSpec {
    pub fn coords(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                if self.n == 1 {
                    0.0
                } else {
                    -self.half_width + 2.0 * self.half_width * i as f64 / (self.n - 1) as f64
                }
            })
            .collect()
    }
}

/// Seed state on L⁻¹(level): u₂ = 0, u₁ the waist radius, u₀ the largest root.
pub fn leaf_seed(c: i32, level: f64) -> Result<TState> {
    if !(level > 0.0 && level < L_MAX) {
        return Err(GeomError::Domain(format!("level {level} outside (0, 4/27)")));
    }
    let u1 = waist_radius(level)?;
    let min_u0 = if c == 1 { 1.0 + MINIMAL_MARGIN } else { MINIMAL_MARGIN };
    let u0 = seed_u0(c, level, u1, min_u0)?;
    TState::family(c, u0, u1, 0.0)
}

/// A lattice of frames on a generated family surface. `nodes[i][j]` sits at
/// E₁-arclength `xs[i]` followed by E₂-arclength `ys[j]` from the seed.
#[derive(Clone, Debug)]
pub struct GeneratedSurface {
    pub c: i32,
    pub level: f64,
    pub seed: TState,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub nodes: Vec<Vec<Option<FlowState>>>,
    pub diagnostics: Vec<String>,
    pub step: f64,
}

impl GeneratedSurface {
    pub fn node_count(&self) -> usize {
        self.nodes.iter().flatten().filter(|n| n.is_some()).count()
    }

    pub fn positions(&self) -> Vec<Vec<Option<Vector>>> {
        self.nodes
            .iter()
            .map(|row| row.iter().map(|n| n.as_ref().map(FlowState::position)).collect())
            .collect()
    }
}

fn march(start: &FlowState, dir: Direction, targets: &[f64], step: f64) -> Vec<Option<FlowState>> {
    // Walk outward from 0 in both directions, keeping states at the targets.
    let mut out: Vec<Option<FlowState>> = vec![None; targets.len()];
    for sign in [1.0, -1.0] {
        let mut idx: Vec<usize> = (0..targets.len())
            .filter(|&i| if sign > 0.0 { targets[i] >= 0.0 } else { targets[i] < 0.0 })
            .collect();
        idx.sort_by(|&a, &b| targets[a].abs().total_cmp(&targets[b].abs()));
        let mut cur = start.clone();
        let mut at = 0.0;
        for i in idx {
            let len = targets[i] - at;
            match flow(&cur, &PathSpec::single(dir, len, step)) {
                Ok(o) if o.stopped.is_none() => {
                    cur = o.state;
                    at = targets[i];
                    out[i] = Some(cur.clone());
                }
                _ => break,
            }
        }
    }
    out
}

pub fn generate_surface(c: i32, level: f64, patch: &PatchSpec) -> Result<GeneratedSurface> {
    if !(patch.step > 0.0 && patch.step <= 1e-2) {
        return Err(GeomError::Domain(format!("step {} outside (0, 1e-2]", patch.step)));
    }
    let seed = leaf_seed(c, level)?;
    let start = FlowState::new(seed)?;
    let xs = patch.coords();
    let ys = patch.coords();
    let columns = march(&start, Direction::E1, &xs, patch.step);
    let nodes: Vec<Vec<Option<FlowState>>> = columns
        .par_iter()
        .map(|base| match base {
            Some(b) => march(b, Direction::E2, &ys, patch.step),
            None => vec![None; ys.len()],
        })
        .collect();
    let missing = nodes.iter().flatten().filter(|n| n.is_none()).count();
    let mut diagnostics = Vec::new();
    if missing > 0 {
        diagnostics.push(format!(
            "{missing} of {} lattice nodes not reached (leaf boundary)",
            xs.len() * ys.len()
        ));
    }
    Ok(GeneratedSurface { c, level, seed, xs, ys, nodes, diagnostics, step: patch.step })
}

/// Local chart `(δx, δy) ↦ e₀` after flowing E₁ by δx then E₂ by δy.
#[derive(Clone, Debug)]
pub struct FlowChart {
    pub base: FlowState,
    pub step: f64,
}

impl FlowChart {
    pub fn new(base: FlowState) -> Self {
        Self { base, step: 2.5e-4 }
    }

    fn frame_at(&self, dx: f64, dy: f64) -> Result<Matrix> {
        let p = PathSpec::single(Direction::E1, dx, self.step).then(Direction::E2, dy, self.step);
        Ok(flow_complete(&self.base, &p)?.g.into_matrix())
    }
}

impl Immersion for FlowChart {
    fn param_dim(&self) -> usize {
        2
    }

    fn signature(&self) -> Signature {
        self.base.g.sig()
    }

    fn quadric(&self) -> f64 {
        1.0
    }

    fn domain(&self) -> DomainSpec {
        DomainSpec::new(vec![(-1.0, 1.0), (-1.0, 1.0)], vec![false, false])
    }

    fn eval(&self, u: &[f64]) -> Result<Vector> {
        Ok(self.frame_at(u[0], u[1])?.column(0).into_owned())
    }
}

/// Gauss-parametrized hypersurface over a [`FlowChart`]:
/// `(δx, δy, τ) ↦ cos τ e₃ + sin τ e₄` (c = 1) or `sinh τ e₃ + cosh τ e₄` (c = −1).
#[derive(Clone, Debug)]
pub struct FlowHyperChart {
    pub chart: FlowChart,
}

impl Immersion for FlowHyperChart {
    fn param_dim(&self) -> usize {
        3
    }

    fn signature(&self) -> Signature {
        self.chart.signature()
    }

    fn quadric(&self) -> f64 {
        self.chart.base.t.c as f64
    }

    fn domain(&self) -> DomainSpec {
        DomainSpec::new(vec![(-1.0, 1.0), (-1.0, 1.0), (-10.0, 10.0)], vec![false, false, false])
    }

    fn eval(&self, u: &[f64]) -> Result<Vector> {
        let g = self.chart.frame_at(u[0], u[1])?;
        let (a, b) = if self.chart.base.t.c == 1 {
            (u[2].cos(), u[2].sin())
        } else {
            (u[2].sinh(), u[2].cosh())
        };
        Ok(g.column(3) * a + g.column(4) * b)
    }
}

/// Distance between e₀ reached by E₁(x)·E₂(y) and by an E₂(y')·E₁(x')
/// path ending at the same invariants t, with (x', y') found by Gauss–Newton.
pub fn path_independence(seed: &FlowState, x: f64, y: f64, step: f64) -> Result<f64> {
    let target = flow_complete(seed, &PathSpec::single(Direction::E1, x, step).then(Direction::E2, y, step))?;
    let tt = [target.t.t0, target.t.t1, target.t.t2];
    let other = |xp: f64, yp: f64| -> Result<FlowState> {
        flow_complete(seed, &PathSpec::single(Direction::E2, yp, step).then(Direction::E1, xp, step))
    };
    let resid = |s: &FlowState| [s.t.t0 - tt[0], s.t.t1 - tt[1], s.t.t2 - tt[2]];
    let (mut xp, mut yp) = (x, y);
    for _ in 0..30 {
        let base = other(xp, yp)?;
        let r = resid(&base);
        if r.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-13 {
            break;
        }
        let d = 1e-6;
        let rx = resid(&other(xp + d, yp)?);
        let ry = resid(&other(xp, yp + d)?);
        let jac = nalgebra::Matrix3x2::from_fn(|i, j| if j == 0 { (rx[i] - r[i]) / d } else { (ry[i] - r[i]) / d });
        let jt = jac.transpose();
        let normal: nalgebra::Matrix2<f64> = jt * jac;
        let rhs = jt * nalgebra::Vector3::from(r);
        let delta = normal
            .try_inverse()
            .ok_or_else(|| GeomError::Degenerate("singular Gauss-Newton system".into()))?
            * rhs;
        xp -= delta[0];
        yp -= delta[1];
    }
    let end = other(xp, yp)?;
    Ok((end.position() - target.position()).amax())
}

/// Drift of L along a flow path and the group residual at its end.
pub fn conservation(fs: &FlowState, path: &PathSpec) -> Result<(f64, f64, usize)> {
    let l0 = first_integral(&fs.t.leaf_point());
    let out = flow(fs, path)?;
    if let Some(r) = out.stopped {
        return Err(GeomError::Singular(r));
    }
    let l1 = first_integral(&out.state.t.leaf_point());
    Ok((
        (l1 - l0).abs(),
        crate::linalg::group_residual(&out.state.g),
        out.substeps,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::group_residual;

    #[test]
    fn eta_matches_clifford_generator() {
        let s = TState::new([1.0, 0.0, 0.0, 0.0], 1.0 / SQRT2, 1, -1).unwrap();
        let (gx, gy) = clifford_generators();
        let e = eta_of(&s, (1.0, 0.0)).unwrap();
        assert!((e.matrix() - gx).amax() < 1e-15);
        let e = eta_of(&s, (0.0, 1.0)).unwrap();
        assert!((e.matrix() - gy).amax() < 1e-15);
    }

    #[test]
    fn eta_matches_rot_eta() {
        for (c, r) in [(1, 0.4), (-1, 1.2), (-1, 2.0)] {
            let s = TState::family(c, rot_t0(c, r), rot_t1(r), 0.0).unwrap();
            let e1 = eta_of(&s, (3.0, 0.0)).unwrap();
            assert!((e1.matrix() - rot_eta1(c, r)).amax() < 1e-12);
            let e2 = eta_of(&s, (0.0, 3.0 * r.sin())).unwrap();
            assert!((e2.matrix() - rot_eta2(c, r)).amax() < 1e-12, "c={c} r={r}");
        }
    }

    #[test]
    fn zero_path_is_identity() {
        let fs = FlowState::new(TState::family(1, 1.8, 0.5, 0.1).unwrap()).unwrap();
        let out = flow(&fs, &PathSpec::single(Direction::E1, 0.0, 1e-3)).unwrap();
        assert_eq!(out.state, fs);
    }

    #[test]
    fn clifford_commutes() {
        let (gx, gy) = clifford_generators();
        assert!(commutator(&gx, &gy).amax() < 1e-15);
        let g = clifford_closed_form(0.0, 0.0).unwrap();
        assert_eq!(g.matrix(), &Matrix::identity(5, 5));
        let p = clifford_point(std::f64::consts::PI, std::f64::consts::PI).unwrap();
        let q = crate::catalog::clifford_polar(std::f64::consts::PI, std::f64::consts::PI);
        assert!((p - q).amax() < 1e-12);
    }

    #[test]
    fn group_membership_survives_flow() {
        let fs = FlowState::new(TState::family(-1, 1.4, 0.6, 0.0).unwrap()).unwrap();
        let out = flow(&fs, &PathSpec::single(Direction::E2, 0.5, 1e-3)).unwrap();
        assert!(out.stopped.is_none());
        assert!(group_residual(&out.state.g) < 1e-12);
    }

    #[test]
    fn seeds_are_on_leaf() {
        for c in [1, -1] {
            let s = leaf_seed(c, 0.1).unwrap();
            assert!((first_integral(&s.leaf_point()) - 0.1).abs() < 1e-12);
        }
        assert!(leaf_seed(1, L_MAX).is_err());
    }

    #[test]
    fn holonomy_cases() {
        let flat = FlowState::new(TState::family(1, 1.5, 0.0, 0.0).unwrap()).unwrap();
        let d = holonomy_defect(&flat, 1e-2).unwrap();
        let d2 = holonomy_defect(&flat, 5e-3).unwrap();
        assert_eq!(d.predicted, [0.0; 3]);
        assert!(d.observed_norm() / d2.observed_norm() > 6.0);

        let generic = FlowState::new(TState::family(1, 1.8982, 0.7084, 0.05).unwrap()).unwrap();
        let a = holonomy_defect(&generic, 1e-2).unwrap();
        let b = holonomy_defect(&generic, 5e-3).unwrap();
        let ratio = a.observed_norm() / b.observed_norm();
        assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
        assert!(a.mismatch() < 0.05 * a.observed_norm());

        let r = 0.4;
        let rot = FlowState::new(TState::family(1, rot_t0(1, r), rot_t1(r), 0.0).unwrap()).unwrap();
        let (b1, b2) = bracket_coefficients(&rot.t);
        assert_eq!(b1, 0.0);
        assert!(b2 != 0.0);
    }

    #[test]
    fn leaf_conservation() {
        let omega = FlowState::new(TState::family(-1, 1.0, 0.0, 0.0).unwrap()).unwrap();
        let square = PathSpec::single(Direction::E1, 1.0, 1e-3)
            .then(Direction::E2, 1.0, 1e-3)
            .then(Direction::E1, -1.0, 1e-3)
            .then(Direction::E2, -1.0, 1e-3)
            .then(Direction::E1, 1.0, 1e-3);
        let out = flow(&omega, &square).unwrap();
        assert!(out.stopped.is_none(), "{:?}", out.stopped);
        assert!(first_integral(&out.state.t.leaf_point()).abs() <= 1e-9);
        // Straight legs from this state diverge at arclength 3π/2.
        let blowup = flow(&omega, &PathSpec::single(Direction::E1, 5.0, 1e-3)).unwrap();
        assert!(blowup.stopped.is_some());
        assert!((blowup.state.arclength[0] - 1.5 * std::f64::consts::PI).abs() < 1e-2);
        let seed = FlowState::new(leaf_seed(1, 0.12).unwrap()).unwrap();
        let (drift, residual, _) = conservation(&seed, &PathSpec::single(Direction::E2, 5.0, 1e-3)).unwrap();
        assert!(drift <= 1e-8, "{drift:e}");
        assert!(residual <= 1e-9);
    }

    #[test]
    fn rot_closed_form_identities() {
        for c in [1, -1] {
            let (lo, hi) = crate::catalog::rot_range(c);
            let h0 = rot_closed_form(c, lo + 0.3 * (hi - lo)).unwrap().h;
            for k in 1..10 {
                let r = lo + (hi - lo) * (0.05 + 0.9 * k as f64 / 10.0);
                let rc = rot_closed_form(c, r).unwrap();
                let br = commutator(&rc.eta1, &rc.eta2) + rot_eta2_prime(c, r);
                assert!(br.amax() < 1e-13);
                assert!((&rc.h - &h0).amax() < 1e-8, "c={c} r={r}");
            }
        }
    }

    #[test]
    fn rot_closed_form_congruent_to_catalog() {
        use crate::catalog::rot_polar;
        use crate::linalg::inner;
        for c in [1, -1] {
            let sig = Signature::ambient(c).unwrap();
            let (lo, hi) = crate::catalog::rot_range(c);
            let mut ours = Vec::new();
            let mut theirs = Vec::new();
            for i in 0..4 {
                let r = lo + (hi - lo) * (0.2 + 0.2 * i as f64);
                let rc = rot_closed_form(c, r).unwrap();
                for j in 0..4 {
                    let th = 0.7 * j as f64;
                    ours.push(rc.frame(th).column(0).into_owned());
                    theirs.push(rot_polar(c, r, th).unwrap());
                }
            }
            for a in 0..ours.len() {
                for b in 0..ours.len() {
                    let d = inner(&ours[a], &ours[b], sig) - inner(&theirs[a], &theirs[b], sig);
                    assert!(d.abs() < 1e-6, "c={c} {a} {b} {d:e}");
                }
            }
        }
    }

    #[test]
    fn generation_rejects_degenerate_leaf() {
        assert!(generate_surface(1, L_MAX, &PatchSpec::default()).is_err());
        assert!(generate_surface(1, 0.0, &PatchSpec::default()).is_err());
    }
}
