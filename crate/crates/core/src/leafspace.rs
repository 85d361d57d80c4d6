//! Reduced state space (t₀, t₁, t₂, t₃): evolution of the invariants along
//! the dual frame, the compatibility polynomial R₀, and the foliation of the
//! family's (u₀, u₁, u₂)-space by the levels of the first integral L.

use std::sync::OnceLock;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{rot_t0, rot_t1};
use crate::error::{GeomError, Result};

/// The family's normal-form parameter a = 2/3.
pub const FAMILY_A: f64 = 2.0 / 3.0;

/// Upper bound of the first integral.
pub const L_MAX: f64 = 4.0 / 27.0;

/// Reduced invariants with their constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TState {
    pub t0: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub a: f64,
    pub eps: i32,
    pub c: i32,
}

impl TState {
    pub fn new(t: [f64; 4], a: f64, eps: i32, c: i32) -> Result<Self> {
        if !matches!(c, 1 | -1) || !matches!(eps, 1 | -1) || (c == 1 && eps != 1) {
            return Err(GeomError::Domain(format!("invalid signs c = {c}, eps = {eps}")));
        }
        if !(t[0] > 0.0) {
            return Err(GeomError::Domain(format!("t0 = {} must be positive", t[0])));
        }
        let s = Self { t0: t[0], t1: t[1], t2: t[2], t3: t[3], a, eps, c };
        s.check_regular()?;
        Ok(s)
    }

    /// Member of the family a = 2/3, eps = 1, t₃ = 0.
    pub fn family(c: i32, t0: f64, t1: f64, t2: f64) -> Result<Self> {
        Self::new([t0, t1, t2, 0.0], FAMILY_A, 1, c)
    }

    pub fn is_family(&self) -> bool {
        self.a == FAMILY_A && self.eps == 1 && self.t3 == 0.0
    }

    pub fn gap(&self) -> f64 {
        self.t0 * self.t0 - self.c as f64
    }

    fn check_regular(&self) -> Result<()> {
        if self.gap().abs() < 1e-12 {
            return Err(GeomError::Singular(format!(
                "t0² = c at t0 = {} (minimal point)",
                self.t0
            )));
        }
        Ok(())
    }

    pub fn leaf_point(&self) -> LeafPoint {
        LeafPoint { u: [self.t0, self.t1, self.t2], c: self.c }
    }

    pub fn with_t(&self, t: [f64; 3]) -> Self {
        Self { t0: t[0], t1: t[1], t2: t[2], ..*self }
    }

    /// Connection coefficients (ω(E₁), ω(E₂)) of the tangent connection form.
    pub fn omega(&self) -> (f64, f64) {
        let g = self.gap();
        (-self.t0 * self.t0 * self.t2 / g, self.c as f64 * self.t1 / g)
    }

    /// Coefficients (μ(E₁), μ(E₂)) of the normal connection form.
    pub fn mu(&self) -> (f64, f64) {
        let g = self.gap();
        let c = self.c as f64;
        (
            2.0 * c * self.t0.powi(3) * self.t2 / g,
            -2.0 * c * self.t1 / (self.t0 * g),
        )
    }
}

/// `dtᵢ = d[i].0 ω₁ + d[i].1 ω₂` for i = 0..3.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TDerivatives {
    pub d: [(f64, f64); 4],
}

impl TDerivatives {
    /// Derivative of (t₀, t₁, t₂, t₃) along `ω₁ E₁ + ω₂ E₂`.
    pub fn along(&self, w: (f64, f64)) -> [f64; 4] {
        self.d.map(|(x, y)| x * w.0 + y * w.1)
    }
}

pub fn t_derivatives(s: &TState) -> Result<TDerivatives> {
    s.check_regular()?;
    let TState { t0, t1, t2, t3, a, eps, c } = *s;
    let (c, e) = (c as f64, eps as f64);
    let ea2 = e * a * a;
    let g = t0 * t0 - c;
    let t02 = t0 * t0;
    let t04 = t02 * t02;
    let t11 = (c * ea2 * (5.0 * t04 - 4.0 * c * t02 - 1.0)
        + 2.0 * c * (t04 * (t2 * t2 - 1.0) - 2.0 * t1 * t1)
        + 2.0 * t02 * (2.0 * t1 * t1 + 1.0))
        / (2.0 * g);
    let t22 = (ea2 * (5.0 - 4.0 * c * t02 - t04) + 2.0 * c * t02 * (2.0 * t2 * t2 + 1.0)
        - 2.0 * (2.0 * t04 * t2 * t2 - t1 * t1 + 1.0))
        / (2.0 * t02 * g);
    let t12 = t3 / t0 - t1 * t2 * t02 / g;
    let t21 = t3 / t0 - t1 * t2 * c / g;
    let k = 9.0 * ea2 - 4.0;
    let d3 = (
        c * t0 * t02 * t2 * k + 6.0 * t1 * t3,
        (c * t1 * k - 4.0 * t0 * t2 * t3) / t0,
    );
    Ok(TDerivatives {
        d: [(t0 * t1, t0 * t2), (t11, t12), (t21, t22), d3],
    })
}

/// Compatibility polynomial; it equals 20c·t₃² on the family.
pub fn r0(s: &TState) -> f64 {
    let TState { t0, t1, t2, t3, a, eps, c } = *s;
    let (c, e) = (c as f64, eps as f64);
    let ea2 = e * a * a;
    let t02 = t0 * t0;
    let t04 = t02 * t02;
    20.0 * c * t3 * t3
        - (9.0 * ea2 - 4.0)
            * (ea2 * (t04 + 10.0 * c * t02 + 1.0) - 12.0 * (t04 * t2 * t2 + t1 * t1)
                - 4.0 * c * t02)
}

/// Exact evaluation of [`r0`] over 64-bit rationals. `None` on overflow.
pub fn r0_exact(
    t: [Ratio<i64>; 4],
    a: Ratio<i64>,
    eps: i64,
    c: i64,
) -> Option<Ratio<i64>> {
    let r = |n: i64| Ratio::from_integer(n);
    let mul = |x: Ratio<i64>, y: Ratio<i64>| x.checked_mul(&y);
    let add = |x: Ratio<i64>, y: Ratio<i64>| x.checked_add(&y);
    let sub = |x: Ratio<i64>, y: Ratio<i64>| x.checked_sub(&y);
    let [t0, t1, t2, t3] = t;
    let ea2 = mul(r(eps), mul(a, a)?)?;
    let t02 = mul(t0, t0)?;
    let t04 = mul(t02, t02)?;
    let first = mul(r(20 * c), mul(t3, t3)?)?;
    let k = sub(mul(r(9), ea2)?, r(4))?;
    let quad = add(add(t04, mul(r(10 * c), t02)?)?, r(1))?;
    let tt = add(mul(t04, mul(t2, t2)?)?, mul(t1, t1)?)?;
    let bracket = sub(sub(mul(ea2, quad)?, mul(r(12), tt)?)?, mul(r(4 * c), t02)?)?;
    sub(first, mul(k, bracket)?)
}

/// Point of the family's reduced space (u₀, u₁, u₂) = (t₀, t₁, t₂).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafPoint {
    pub u: [f64; 3],
    pub c: i32,
}

impl LeafPoint {
    pub fn new(u: [f64; 3], c: i32) -> Result<Self> {
        if !(u[0] > 0.0) {
            return Err(GeomError::Domain(format!("u0 = {} must be positive", u[0])));
        }
        if !matches!(c, 1 | -1) {
            return Err(GeomError::Domain(format!("c = {c}")));
        }
        Ok(Self { u, c })
    }

    /// The involution (u₀, u₁, u₂) ↦ (1/u₀, u₂, u₁).
    pub fn flip(&self) -> Self {
        Self { u: [1.0 / self.u[0], self.u[2], self.u[1]], c: self.c }
    }
}

/// Monomial `u0^e0 u1^e1 u2^e2` with coefficient `even + c·odd`.
#[derive(Clone, Copy, Debug)]
struct Term {
    e: [i32; 3],
    even: f64,
    odd: f64,
}

const fn t(e0: i32, e1: i32, e2: i32, even: f64, odd: f64) -> Term {
    Term { e: [e0, e1, e2], even, odd }
}

/// Polynomial in (u₀, u₁, u₂, c) divided by a common denominator.
#[derive(Clone, Copy, Debug)]
struct Poly {
    terms: &'static [Term],
    denom: f64,
}

impl Poly {
    fn eval(&self, u: [f64; 3], c: f64) -> f64 {
        self.terms
            .iter()
            .map(|m| (m.even + c * m.odd) * u[0].powi(m.e[0]) * u[1].powi(m.e[1]) * u[2].powi(m.e[2]))
            .sum::<f64>()
            / self.denom
    }

    /// Sum of absolute term values, the natural cancellation scale.
    fn scale(&self, u: [f64; 3], c: f64) -> f64 {
        self.terms
            .iter()
            .map(|m| {
                ((m.even + c * m.odd) * u[0].powi(m.e[0]) * u[1].powi(m.e[1]) * u[2].powi(m.e[2])).abs()
            })
            .sum::<f64>()
            / self.denom
    }
}

// t₀²(t₀² − c)·dt = P ω₁ + Q ω₂ on the family.
const P: [Poly; 3] = [
    Poly { terms: &[t(5, 1, 0, 9.0, 0.0), t(3, 1, 0, 0.0, -9.0)], denom: 9.0 },
    Poly {
        terms: &[
            t(6, 0, 2, 0.0, 9.0),
            t(6, 0, 0, 0.0, 1.0),
            t(4, 2, 0, 18.0, 0.0),
            t(4, 0, 0, 1.0, 0.0),
            t(2, 2, 0, 0.0, -18.0),
            t(2, 0, 0, 0.0, -2.0),
        ],
        denom: 9.0,
    },
    Poly { terms: &[t(2, 1, 1, 0.0, -9.0)], denom: 9.0 },
];

const Q: [Poly; 3] = [
    Poly { terms: &[t(5, 0, 1, 9.0, 0.0), t(3, 0, 1, 0.0, -9.0)], denom: 9.0 },
    Poly { terms: &[t(4, 1, 1, -9.0, 0.0)], denom: 9.0 },
    Poly {
        terms: &[
            t(4, 0, 2, -18.0, 0.0),
            t(4, 0, 0, -2.0, 0.0),
            t(2, 0, 2, 0.0, 18.0),
            t(2, 0, 0, 0.0, 1.0),
            t(0, 2, 0, 9.0, 0.0),
            t(0, 0, 0, 1.0, 0.0),
        ],
        denom: 9.0,
    },
];

// P × Q = t₀²(t₀² − c)·N.
const N: [Poly; 3] = [
    Poly {
        terms: &[
            t(6, 0, 4, 0.0, -162.0),
            t(6, 0, 2, 0.0, -36.0),
            t(6, 0, 0, 0.0, -2.0),
            t(4, 2, 2, -324.0, 0.0),
            t(4, 2, 0, -36.0, 0.0),
            t(4, 0, 2, -27.0, 0.0),
            t(4, 0, 0, -3.0, 0.0),
            t(2, 2, 2, 0.0, 324.0),
            t(2, 2, 0, 0.0, 27.0),
            t(2, 0, 2, 0.0, 36.0),
            t(2, 0, 0, 0.0, 3.0),
            t(0, 4, 0, 162.0, 0.0),
            t(0, 2, 0, 36.0, 0.0),
            t(0, 0, 0, 2.0, 0.0),
        ],
        denom: 81.0,
    },
    Poly {
        terms: &[
            t(5, 1, 2, 162.0, 0.0),
            t(5, 1, 0, 18.0, 0.0),
            t(3, 1, 2, 0.0, -243.0),
            t(3, 1, 0, 0.0, -9.0),
            t(1, 3, 0, -81.0, 0.0),
            t(1, 1, 0, -9.0, 0.0),
        ],
        denom: 81.0,
    },
    Poly {
        terms: &[
            t(7, 0, 3, 0.0, -81.0),
            t(7, 0, 1, 0.0, -9.0),
            t(5, 2, 1, -243.0, 0.0),
            t(5, 0, 1, -9.0, 0.0),
            t(3, 2, 1, 0.0, 162.0),
            t(3, 0, 1, 0.0, 18.0),
        ],
        denom: 81.0,
    },
];

fn eval3(p: &[Poly; 3], u: [f64; 3], c: f64) -> [f64; 3] {
    [p[0].eval(u, c), p[1].eval(u, c), p[2].eval(u, c)]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm3(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// P and Q at a leaf point.
pub fn pq(p: &LeafPoint) -> ([f64; 3], [f64; 3]) {
    let c = p.c as f64;
    (eval3(&P, p.u, c), eval3(&Q, p.u, c))
}

/// Largest relative residual of `P × Q − t₀²(t₀² − c)N` over random points.
pub fn table_division_residual(samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for k in 0..samples {
        let c = if k % 2 == 0 { 1.0 } else { -1.0 };
        let u = [rng.gen_range(0.2..3.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        let pv = eval3(&P, u, c);
        let qv = eval3(&Q, u, c);
        let lhs = cross(pv, qv);
        let w = u[0] * u[0] * (u[0] * u[0] - c);
        let nv = eval3(&N, u, c);
        let scale = norm3(pv) * norm3(qv) + 1e-300;
        for i in 0..3 {
            worst = worst.max((lhs[i] - w * nv[i]).abs() / scale);
        }
    }
    worst
}

fn tables_verified() -> Result<()> {
    static CHECK: OnceLock<f64> = OnceLock::new();
    let res = *CHECK.get_or_init(|| table_division_residual(64, 0x5eed));
    if res <= 1e-9 {
        Ok(())
    } else {
        Err(GeomError::Inconsistent(format!(
            "N table does not divide P × Q (residual {res:.3e})"
        )))
    }
}

/// The vector field N with θ = ⟨N, du⟩.
pub fn n_vec(p: &LeafPoint) -> Result<[f64; 3]> {
    tables_verified()?;
    Ok(eval3(&N, p.u, p.c as f64))
}

/// ‖N‖ divided by the term scale of N; small values mean the point lies on C₁ ∪ C₂.
pub fn n_relative_norm(p: &LeafPoint) -> f64 {
    let c = p.c as f64;
    let v = eval3(&N, p.u, c);
    let s: f64 = N.iter().map(|q| q.scale(p.u, c)).sum();
    norm3(v) / s
}

pub fn theta_eval(p: &LeafPoint, du: [f64; 3]) -> Result<f64> {
    let n = n_vec(p)?;
    Ok(n[0] * du[0] + n[1] * du[1] + n[2] * du[2])
}

/// The first integral of the leaf distribution.
pub fn first_integral(p: &LeafPoint) -> f64 {
    let [u0, u1, u2] = p.u;
    let c = p.c as f64;
    let a = 9.0 * u1 * u1 + 1.0;
    let b = 9.0 * u2 * u2 + 1.0;
    let u02 = u0 * u0;
    let num = u02 * u02 * (u02 * b + c * a).powi(2);
    let den = u02 * u02 * b + c * u02 + a;
    num / (den * den * den)
}

/// Sine of the angle between ∇L (central differences) and N.
pub fn grad_check_l(p: &LeafPoint) -> Result<f64> {
    if n_relative_norm(p) < 1e-6 {
        return Err(GeomError::Domain("point lies on C1 or C2".into()));
    }
    let n = n_vec(p)?;
    let mut g = [0.0; 3];
    for i in 0..3 {
        let h = 1e-5 * p.u[i].abs().max(1.0);
        let mut a = *p;
        let mut b = *p;
        a.u[i] += h;
        b.u[i] -= h;
        g[i] = (first_integral(&a) - first_integral(&b)) / (2.0 * h);
    }
    let gn = norm3(g);
    if gn == 0.0 {
        return Err(GeomError::Degenerate("∇L vanishes".into()));
    }
    Ok(norm3(cross(g, n)) / (gn * norm3(n)))
}

/// Point of C₁ (u₂ = 0, 9u₁² = (2u₀² + c)(u₀² − c)), positive branch.
pub fn c1_point(u0: f64, c: i32) -> Option<LeafPoint> {
    let cf = c as f64;
    let s = (2.0 * u0 * u0 + cf) * (u0 * u0 - cf) / 9.0;
    (u0 > 0.0 && s >= 0.0).then(|| LeafPoint { u: [u0, s.sqrt(), 0.0], c })
}

/// Point of C₂ (u₁ = 0, 9u₂² = (2u₀⁻² + c)(u₀⁻² − c)), positive branch.
pub fn c2_point(u0: f64, c: i32) -> Option<LeafPoint> {
    c1_point(1.0 / u0, c).map(|p| p.flip())
}

/// L on the circle of radius r about the axis point (1, 0, 0), c = 1.
pub fn circle_law(r: f64) -> f64 {
    let x = 9.0 * r * r;
    (x + 2.0).powi(2) / (x + 3.0).powi(3)
}

/// Radius r with `circle_law(r) = level`, for 0 < level < 4/27.
pub fn waist_radius(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < L_MAX) {
        return Err(GeomError::Domain(format!("level {level} outside (0, 4/27)")));
    }
    // (x − 1)²/x³ is decreasing for x = 9r² + 3 ≥ 3.
    let f = |x: f64| (x - 1.0).powi(2) / x.powi(3) - level;
    let (mut lo, mut hi) = (3.0, 6.0);
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Ok(((0.5 * (lo + hi) - 3.0) / 9.0).max(0.0).sqrt())
}

/// Topology of a level set of L.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "tag")]
pub enum LeafTopology {
    /// Two pairs of pants glued along the circle of the given radius.
    PairOfPantsUnion { waist_radius: f64 },
    TwoCylinders,
}

impl LeafTopology {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::PairOfPantsUnion { .. } => "pair_of_pants_union",
            Self::TwoCylinders => "two_cylinders",
        }
    }
}

pub fn leaf_classify(level: f64, c: i32) -> Result<LeafTopology> {
    if !(level > 0.0 && level < L_MAX) {
        return Err(GeomError::Domain(format!("level {level} outside (0, 4/27)")));
    }
    match c {
        1 => Ok(LeafTopology::PairOfPantsUnion { waist_radius: waist_radius(level)? }),
        -1 => Ok(LeafTopology::TwoCylinders),
        _ => Err(GeomError::Domain(format!("c = {c}"))),
    }
}

/// |9t₁² − (2t₀² + c)(t₀² − c)| along the rotational surface.
pub fn rot_locus_check(r: f64, c: i32) -> Result<f64> {
    crate::catalog::rot_polar(c, r, 0.0)?;
    let t0 = rot_t0(c, r);
    let t1 = rot_t1(r);
    let cf = c as f64;
    Ok((9.0 * t1 * t1 - (2.0 * t0 * t0 + cf) * (t0 * t0 - cf)).abs())
}

/// Derivative of (t₀, t₁, t₂) along E₁ (`dir = 0`) or E₂ (`dir = 1`) on the family.
pub fn family_field(s: &TState, dir: usize) -> Result<[f64; 3]> {
    let d = t_derivatives(s)?;
    let v = if dir == 0 { d.along((1.0, 0.0)) } else { d.along((0.0, 1.0)) };
    Ok([v[0], v[1], v[2]])
}

/// Classical RK4 along E₁ or E₂ in t-space only.
pub fn t_flow(s: &TState, dir: usize, length: f64, steps: usize) -> Result<TState> {
    let h = length / steps.max(1) as f64;
    let mut cur = *s;
    let add = |s: &TState, k: [f64; 3], f: f64| s.with_t([s.t0 + f * k[0], s.t1 + f * k[1], s.t2 + f * k[2]]);
    for _ in 0..steps.max(1) {
        let k1 = family_field(&cur, dir)?;
        let k2 = family_field(&add(&cur, k1, 0.5 * h), dir)?;
        let k3 = family_field(&add(&cur, k2, 0.5 * h), dir)?;
        let k4 = family_field(&add(&cur, k3, h), dir)?;
        cur = cur.with_t([
            cur.t0 + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            cur.t1 + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            cur.t2 + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        ]);
        cur.check_regular()?;
    }
    Ok(cur)
}

/// Closed-form and flow-based values of h⁴ΔH/2 for H = (h² − 1)²/h².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperharmonicCheck {
    pub closed_form: f64,
    pub from_flows: f64,
    /// |from_flows − closed_form| / max(1, |closed_form|).
    pub residual: f64,
}

/// Right-hand side (4h⁶+h⁴+2h²+1)t₁² + h²(h⁶+2h⁴+h²+4)t₂² + (h⁴−1)²/9.
pub fn superharmonic_rhs(s: &TState) -> f64 {
    let h2 = s.t0 * s.t0;
    let h4 = h2 * h2;
    let h6 = h4 * h2;
    (4.0 * h6 + h4 + 2.0 * h2 + 1.0) * s.t1 * s.t1
        + h2 * (h6 + 2.0 * h4 + h2 + 4.0) * s.t2 * s.t2
        + (h4 - 1.0).powi(2) / 9.0
}

pub fn superharmonic_identity(s: &TState) -> Result<SuperharmonicCheck> {
    if !(s.c == 1 && s.is_family()) {
        return Err(GeomError::Domain("identity holds on the c = 1 family only".into()));
    }
    let hfun = |s: &TState| {
        let h2 = s.t0 * s.t0;
        (h2 - 1.0).powi(2) / h2
    };
    let d = 2e-3;
    let mut first = [0.0; 2];
    let mut second = [0.0; 2];
    let h0 = hfun(s);
    for dir in 0..2 {
        let fwd = hfun(&t_flow(s, dir, d, 8)?);
        let bwd = hfun(&t_flow(s, dir, -d, 8)?);
        first[dir] = (fwd - bwd) / (2.0 * d);
        second[dir] = (fwd - 2.0 * h0 + bwd) / (d * d);
    }
    let (w1, w2) = s.omega();
    let lap = second[0] + second[1] - w1 * first[1] + w2 * first[0];
    let h4 = s.t0.powi(4);
    let from_flows = h4 * lap / 2.0;
    let closed_form = superharmonic_rhs(s);
    Ok(SuperharmonicCheck {
        closed_form,
        from_flows,
        residual: (from_flows - closed_form).abs() / closed_form.abs().max(1.0),
    })
}

/// A point of a level set of L.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafSample {
    pub u: [f64; 3],
    pub l: f64,
}

/// Points of L⁻¹(level) over an `n × n` grid of (u₁, u₂) ∈ [−span, span]²,
/// with every root in u₀ ∈ [10⁻², 10²] located by bisection.
pub fn sample_leaf(c: i32, level: f64, n: usize, span: f64) -> Result<Vec<LeafSample>> {
    if !(level > 0.0 && level < L_MAX) {
        return Err(GeomError::Domain(format!("level {level} outside (0, 4/27)")));
    }
    let m = 400;
    let u0s: Vec<f64> = (0..=m).map(|k| 10f64.powf(-2.0 + 4.0 * k as f64 / m as f64)).collect();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let lin = |k: usize| if n == 1 { 0.0 } else { -span + 2.0 * span * k as f64 / (n - 1) as f64 };
            let (u1, u2) = (lin(i), lin(j));
            let f = |u0: f64| first_integral(&LeafPoint { u: [u0, u1, u2], c }) - level;
            for w in u0s.windows(2) {
                let (mut lo, mut hi) = (w[0], w[1]);
                let (flo, fhi) = (f(lo), f(hi));
                if flo == 0.0 || flo.signum() == fhi.signum() {
                    continue;
                }
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if f(mid).signum() == flo.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let u = [0.5 * (lo + hi), u1, u2];
                out.push(LeafSample { u, l: first_integral(&LeafPoint { u, c }) });
            }
        }
    }
    Ok(out)
}

/// Largest root u₀ > min_u0 of L(u₀, u₁, 0) = level, by scanning and bisection.
pub fn seed_u0(c: i32, level: f64, u1: f64, min_u0: f64) -> Result<f64> {
    let f = |u0: f64| first_integral(&LeafPoint { u: [u0, u1, 0.0], c }) - level;
    let m = 4000;
    let hi_end = 50.0;
    let mut prev = hi_end;
    let mut fprev = f(prev);
    for k in 1..=m {
        let x = hi_end - (hi_end - min_u0) * k as f64 / m as f64;
        let fx = f(x);
        if fx.signum() != fprev.signum() {
            let (mut lo, mut hi) = (x, prev);
            let flo = fx;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid).signum() == flo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev = x;
        fprev = fx;
    }
    Err(GeomError::Domain(format!(
        "no seed on L = {level} at u1 = {u1} for c = {c}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn derivative_examples() {
        let s = TState::family(-1, 1.0, 0.0, 0.0).unwrap();
        let d = t_derivatives(&s).unwrap();
        assert_abs_diff_eq!(d.d[0].0, 0.0);
        assert_abs_diff_eq!(d.d[1].0, 1.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.d[1].1, 0.0);
        assert_abs_diff_eq!(d.d[2].1, -1.0 / 9.0, epsilon = 1e-15);
        assert_eq!(d.d[3], (0.0, 0.0));
        let bad = TState { c: 1, ..s };
        assert!(matches!(t_derivatives(&bad), Err(GeomError::Singular(_))));
        assert!(TState::family(1, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn dt3_general() {
        let s = TState::new([1.5, 0.4, 0.0, 0.0], 0.5, 1, 1).unwrap();
        let d = t_derivatives(&s).unwrap();
        assert_eq!(d.d[3].0, 0.0);
        assert_abs_diff_eq!(d.d[3].1, 0.4 * (9.0 * 0.25 - 4.0) / 1.5, epsilon = 1e-15);
    }

    #[test]
    fn pq_match_derivatives() {
        for &(c, u) in &[(1, [1.7, 0.3, -0.8]), (-1, [0.6, -1.1, 0.4])] {
            let s = TState::family(c, u[0], u[1], u[2]).unwrap();
            let d = t_derivatives(&s).unwrap();
            let w = s.t0 * s.t0 * s.gap();
            let (p, q) = pq(&s.leaf_point());
            for i in 0..3 {
                assert_abs_diff_eq!(p[i], w * d.d[i].0, epsilon = 1e-12);
                assert_abs_diff_eq!(q[i], w * d.d[i].1, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn r0_examples() {
        let s = TState::family(1, 1.4, 0.3, 0.2).unwrap();
        assert_abs_diff_eq!(r0(&s), 0.0, epsilon = 1e-15);
        let s = TState { t3: 1.0, ..s };
        assert_abs_diff_eq!(r0(&s), 20.0, epsilon = 1e-13);
        // eps = −1 is only allowed for c = −1.
        let s = TState::new([2.0, 0.0, 0.0, 0.0], FAMILY_A, -1, -1).unwrap();
        let ea2 = -4.0 / 9.0;
        let want = -(9.0 * ea2 - 4.0) * (ea2 * (16.0 - 40.0 + 1.0) + 16.0);
        assert_abs_diff_eq!(r0(&s), want, epsilon = 1e-12);
    }

    #[test]
    fn r0_exact_matches_float() {
        let q = |n, d| Ratio::new(n, d);
        let t = [q(3, 2), q(-1, 3), q(2, 5), q(1, 7)];
        let v = r0_exact(t, q(2, 3), 1, -1).unwrap();
        assert_eq!(v, q(-20, 1) * q(1, 49));
        let s = TState::new([1.5, -1.0 / 3.0, 0.4, 1.0 / 7.0], 0.5, 1, 1).unwrap();
        let v = r0_exact(t, q(1, 2), 1, 1).unwrap();
        assert_abs_diff_eq!(*v.numer() as f64 / *v.denom() as f64, r0(&s), epsilon = 1e-12);
    }

    #[test]
    fn tables_divide() {
        assert!(table_division_residual(200, 3) < 1e-12);
    }

    #[test]
    fn n_vanishes_on_c1_example() {
        let p = LeafPoint::new([2f64.sqrt(), 5f64.sqrt() / 3.0, 0.0], 1).unwrap();
        let n = n_vec(&p).unwrap();
        assert!(norm3(n) < 1e-10);
        assert_abs_diff_eq!(first_integral(&p), L_MAX, epsilon = 1e-15);
    }

    #[test]
    fn l_examples() {
        let r = 0.37;
        let p = LeafPoint::new([1.0, r * 0.3f64.cos(), r * 0.3f64.sin()], 1).unwrap();
        assert_abs_diff_eq!(first_integral(&p), circle_law(r), epsilon = 1e-15);
        let (u1, u2) = (0.4, 0.9);
        let u0 = ((9.0 * u1 * u1 + 1.0) / (9.0 * u2 * u2 + 1.0f64)).sqrt();
        assert_abs_diff_eq!(first_integral(&LeafPoint::new([u0, u1, u2], -1).unwrap()), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn waist_limits() {
        let near = waist_radius(L_MAX * (1.0 - 1e-12)).unwrap();
        assert!(near < 1e-2 && near < waist_radius(L_MAX * (1.0 - 1e-6)).unwrap());
        assert!(waist_radius(1e-8).unwrap() > 100.0);
        let r = waist_radius(0.1).unwrap();
        assert_abs_diff_eq!(circle_law(r), 0.1, epsilon = 1e-14);
        assert_eq!(leaf_classify(0.1, -1).unwrap(), LeafTopology::TwoCylinders);
        assert!(leaf_classify(0.2, 1).is_err());
        assert!(leaf_classify(0.0, 1).is_err());
    }

    #[test]
    fn rot_locus_examples() {
        assert!(rot_locus_check(std::f64::consts::FRAC_PI_2, -1).unwrap() < 1e-14);
        assert!(rot_locus_check(1e-8, 1).unwrap() < 1e-12);
        assert!(rot_locus_check(0.1, -1).is_err());
    }

    #[test]
    fn superharmonic_examples() {
        let s = TState::family(1, 2.0, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(superharmonic_rhs(&s), 306.0, epsilon = 1e-12);
        let s = TState { t0: 1.0, t1: 0.0, t2: 0.0, ..s };
        assert_eq!(superharmonic_rhs(&s), 0.0);
        let s = TState::family(1, 1.6, 0.7, -0.4).unwrap();
        let chk = superharmonic_identity(&s).unwrap();
        assert!(chk.residual < 1e-4, "{chk:?}");
    }

    #[test]
    fn seeds() {
        let r = waist_radius(0.1).unwrap();
        let u0 = seed_u0(1, 0.1, r, 1.001).unwrap();
        assert_abs_diff_eq!(u0, 1.8982, epsilon = 1e-3);
        let u0 = seed_u0(-1, 0.1, r, 1e-3).unwrap();
        assert_abs_diff_eq!(u0, 1.4763, epsilon = 1e-3);
    }
}
