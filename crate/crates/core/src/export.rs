//! Lattice meshes and their OBJ, PLY and CSV writers.
//!
//! Points live in R⁵ or R⁶ on a quadric. For viewing they are sent to R³:
//! round spheres stereographically from the south pole −e_last, hyperbolic
//! spaces to the Poincaré ball, De Sitter space by radial normalisation.
//! In each case the leading three coordinates of the result are kept.

use std::fmt::Write as _;

use crate::catalog::{beta_curve, beta_poly_residual, r0 as crease_radius, rot_range, Immersion, ImmersionId};
use crate::error::{GeomError, Result};
use crate::frame_flow::GeneratedSurface;
use crate::leafspace::LeafSample;
use crate::linalg::{Signature, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Projection {
    Stereographic,
    PoincareBall,
    Radial,
}

impl Projection {
    /// The projection suited to the quadric ⟨p, p⟩ = `quadric` in `sig`.
    pub fn for_quadric(sig: Signature, quadric: f64) -> Self {
        let lorentzian = sig.diag().iter().any(|&d| d < 0.0);
        match (lorentzian, quadric < 0.0) {
            (false, _) => Self::Stereographic,
            (true, true) => Self::PoincareBall,
            (true, false) => Self::Radial,
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Self::Stereographic => "stereographic from -e_last, then keep x1..x3",
            Self::PoincareBall => "Poincare ball x_i / (1 + |x_last|), then keep x1..x3",
            Self::Radial => "radial normalisation x / |x|, then keep x1..x3",
        }
    }

    pub fn apply(&self, p: &Vector) -> [f64; 3] {
        let n = p.len();
        let last = p[n - 1];
        let scale = match self {
            Self::Stereographic => 1.0 / (1.0 + last),
            Self::PoincareBall => 1.0 / (1.0 + last.abs()),
            Self::Radial => 1.0 / p.norm(),
        };
        [p[0] * scale, p[1] * scale, p[2] * scale]
    }
}

/// A rectangular lattice of sampled points. Missing nodes are `None` and
/// drop every face that touches them.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub rows: usize,
    pub cols: usize,
    /// Parameter values per node, row-major.
    pub params: Vec<Vec<f64>>,
    pub points: Vec<Option<Vector>>,
    /// Per-node marker written to CSV (e.g. crease proximity).
    pub flags: Vec<bool>,
    pub flag_name: String,
    pub param_names: Vec<String>,
    /// Close the lattice across the last row / last column.
    pub wrap: [bool; 2],
    pub projection: Projection,
    pub title: String,
}

impl Lattice {
    pub fn vertex_count(&self) -> usize {
        self.points.iter().filter(|p| p.is_some()).count()
    }

    fn index(&self, i: usize, j: usize) -> usize {
        i * self.cols + j
    }

    /// Triangles over present vertices, as indices into the present-vertex
    /// list. Each lattice cell gives (a, b, c) and (a, c, d) with a → b along
    /// columns, so orientation follows the parameter order.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut map = vec![usize::MAX; self.points.len()];
        let mut k = 0;
        for (slot, p) in map.iter_mut().zip(&self.points) {
            if p.is_some() {
                *slot = k;
                k += 1;
            }
        }
        let mut out = Vec::new();
        let span = |n: usize, wrap: bool| if wrap && n > 2 { n } else { n.saturating_sub(1) };
        for i in 0..span(self.rows, self.wrap[0]) {
            let i1 = (i + 1) % self.rows;
            for j in 0..span(self.cols, self.wrap[1]) {
                let j1 = (j + 1) % self.cols;
                let q = [
                    map[self.index(i, j)],
                    map[self.index(i, j1)],
                    map[self.index(i1, j1)],
                    map[self.index(i1, j)],
                ];
                if q.contains(&usize::MAX) {
                    continue;
                }
                out.push([q[0], q[1], q[2]]);
                out.push([q[0], q[2], q[3]]);
            }
        }
        out
    }

    fn projected(&self) -> Vec<[f64; 3]> {
        self.points.iter().flatten().map(|p| self.projection.apply(p)).collect()
    }

    pub fn to_obj(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {}", self.title);
        let _ = writeln!(s, "# projection: {}", self.projection.describe());
        for [x, y, z] in self.projected() {
            let _ = writeln!(s, "v {x:.12e} {y:.12e} {z:.12e}");
        }
        for [a, b, c] in self.triangles() {
            let _ = writeln!(s, "f {} {} {}", a + 1, b + 1, c + 1);
        }
        s
    }

    pub fn to_ply(&self) -> String {
        let verts = self.projected();
        let tris = self.triangles();
        let mut s = String::from("ply\nformat ascii 1.0\n");
        let _ = writeln!(s, "comment {}", self.title);
        let _ = writeln!(s, "comment projection: {}", self.projection.describe());
        let _ = writeln!(s, "element vertex {}", verts.len());
        s.push_str("property double x\nproperty double y\nproperty double z\n");
        let _ = writeln!(s, "element face {}", tris.len());
        s.push_str("property list uchar int vertex_indices\nend_header\n");
        for [x, y, z] in verts {
            let _ = writeln!(s, "{x:.12e} {y:.12e} {z:.12e}");
        }
        for [a, b, c] in tris {
            let _ = writeln!(s, "3 {a} {b} {c}");
        }
        s
    }

    /// One row per present node with the full ambient coordinates.
    pub fn to_csv(&self) -> String {
        let dim = self.points.iter().flatten().map(|p| p.len()).next().unwrap_or(5);
        let mut s = String::new();
        let _ = writeln!(s, "# {}", self.title);
        let _ = writeln!(s, "# projection (viewing only): {}", self.projection.describe());
        let mut head: Vec<String> = vec!["i".into(), "j".into()];
        head.extend(self.param_names.iter().cloned());
        head.extend((1..=dim).map(|k| format!("x{k}")));
        head.push(self.flag_name.clone());
        s.push_str(&head.join(","));
        s.push('\n');
        for i in 0..self.rows {
            for j in 0..self.cols {
                let k = self.index(i, j);
                let Some(p) = &self.points[k] else { continue };
                let mut row: Vec<String> = vec![i.to_string(), j.to_string()];
                row.extend(self.params[k].iter().map(|v| format!("{v:.15e}")));
                row.extend(p.iter().map(|v| format!("{v:.15e}")));
                row.push(u8::from(self.flags[k]).to_string());
                s.push_str(&row.join(","));
                s.push('\n');
            }
        }
        s
    }
}

/// Options for sampling a catalog immersion.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSpec {
    pub rows: usize,
    pub cols: usize,
    /// Values of the leading parameters of a hypersurface; the last two
    /// parameters span the lattice.
    pub fixed: Vec<f64>,
    /// Nodes with r closer than this to the crease radius are flagged
    /// (isolated hypersurfaces only).
    pub crease_band: f64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self { rows: 40, cols: 40, fixed: Vec::new(), crease_band: 0.02 }
    }
}

fn axis(lo: f64, hi: f64, n: usize, periodic: bool) -> Vec<f64> {
    (0..n)
        .map(|i| match (periodic, n) {
            (_, 1) => 0.5 * (lo + hi),
            (true, _) => lo + (hi - lo) * i as f64 / n as f64,
            // Open ends stay a hair inside the domain.
            (false, _) => {
                let pad = 1e-6 * (hi - lo);
                lo + pad + (hi - lo - 2.0 * pad) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Samples a catalog immersion on a `rows × cols` lattice over its last two
/// parameters.
pub fn sample_immersion(id: ImmersionId, spec: &SampleSpec) -> Result<Lattice> {
    if spec.rows < 2 || spec.cols < 2 {
        return Err(GeomError::Domain("lattice needs at least 2 × 2 nodes".into()));
    }
    let dom = id.domain();
    let d = dom.dim();
    let lead = d - 2;
    let fixed: Vec<f64> = if spec.fixed.is_empty() {
        dom.ranges[..lead].iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
    } else {
        spec.fixed.clone()
    };
    if fixed.len() != lead {
        return Err(GeomError::Domain(format!("{id} needs {lead} fixed parameter(s), got {}", fixed.len())));
    }
    for (k, &v) in fixed.iter().enumerate() {
        let (lo, hi) = dom.ranges[k];
        if !(lo..=hi).contains(&v) {
            return Err(GeomError::Domain(format!("fixed parameter {k} = {v} outside [{lo}, {hi}]")));
        }
    }
    let us = axis(dom.ranges[lead].0, dom.ranges[lead].1, spec.rows, dom.periodic[lead]);
    let vs = axis(dom.ranges[lead + 1].0, dom.ranges[lead + 1].1, spec.cols, dom.periodic[lead + 1]);
    let crease = |u: &[f64]| -> bool {
        match id {
            ImmersionId::FhatC { c } => {
                let (lo, hi) = rot_range(c);
                let r = u[0];
                let edges: &[f64] = if c == 1 { &[hi] } else { &[lo, hi] };
                edges.iter().any(|e| (r - e).abs() < spec.crease_band)
            }
            _ => false,
        }
    };
    let mut params = Vec::with_capacity(spec.rows * spec.cols);
    let mut points = Vec::with_capacity(params.capacity());
    let mut flags = Vec::with_capacity(params.capacity());
    for &u in &us {
        for &v in &vs {
            let mut x = fixed.clone();
            x.push(u);
            x.push(v);
            points.push(id.eval(&x).ok());
            flags.push(crease(&x));
            params.push(x);
        }
    }
    let param_names = match id {
        ImmersionId::FhatC { .. } | ImmersionId::RotPolar { .. } => ["r", "theta", "alpha"][..d].iter().map(|s| s.to_string()).collect(),
        _ => (1..=d).map(|k| format!("u{k}")).collect(),
    };
    let title = if lead == 0 {
        format!("{id} on a {}x{} lattice", spec.rows, spec.cols)
    } else {
        format!("{id} slice {fixed:?} on a {}x{} lattice (crease radius {:.12})", spec.rows, spec.cols, crease_radius())
    };
    Ok(Lattice {
        rows: spec.rows,
        cols: spec.cols,
        params,
        points,
        flags,
        flag_name: "crease_proximity".into(),
        param_names,
        wrap: [dom.periodic[lead], dom.periodic[lead + 1]],
        projection: Projection::for_quadric(id.signature(), id.quadric()),
        title,
    })
}

/// The lattice of a generated surface; nodes where the flow stopped are
/// missing.
pub fn generated_lattice(g: &GeneratedSurface) -> Lattice {
    let rows = g.xs.len();
    let cols = g.ys.len();
    let mut params = Vec::with_capacity(rows * cols);
    let mut points = Vec::with_capacity(rows * cols);
    for (i, row) in g.positions().into_iter().enumerate() {
        for (j, p) in row.into_iter().enumerate() {
            params.push(vec![g.xs[i], g.ys[j]]);
            points.push(p);
        }
    }
    let sig = Signature::ambient(g.c).expect("c is ±1");
    Lattice {
        rows,
        cols,
        flags: vec![false; params.len()],
        params,
        points,
        flag_name: "flag".into(),
        param_names: vec!["s1".into(), "s2".into()],
        wrap: [false, false],
        projection: Projection::for_quadric(sig, 1.0),
        title: format!("generated polar surface c={} R={} ({rows}x{cols})", g.c, g.level),
    }
}

/// r, x, y, polynomial residual along the profile curve, r ∈ [0, π].
pub fn beta_csv(n: usize) -> String {
    let mut s = String::from("r,x,y,residual\n");
    for k in 0..n {
        let r = if n == 1 { 0.0 } else { std::f64::consts::PI * k as f64 / (n - 1) as f64 };
        let (x, y) = beta_curve(r);
        let _ = writeln!(s, "{r:.15e},{x:.15e},{y:.15e},{:.3e}", beta_poly_residual(x, y));
    }
    s
}

pub fn leaf_csv(samples: &[LeafSample]) -> String {
    let mut s = String::from("u0,u1,u2,L\n");
    for p in samples {
        let _ = writeln!(s, "{:.15e},{:.15e},{:.15e},{:.15e}", p.u[0], p.u[1], p.u[2], p.l);
    }
    s
}

/// A per-node curvature record for sidecar CSVs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureRecord {
    pub i: usize,
    pub j: usize,
    pub gaussian: f64,
    pub det_min: f64,
    pub det_max: f64,
}

pub fn curvature_csv(records: &[CurvatureRecord]) -> String {
    let mut s = String::from("i,j,gaussian_curvature,det_min,det_max\n");
    for r in records {
        let _ = writeln!(s, "{},{},{:.15e},{:.15e},{:.15e}", r.i, r.j, r.gaussian, r.det_min, r.det_max);
    }
    s
}
