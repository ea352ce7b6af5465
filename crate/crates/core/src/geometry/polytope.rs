//! Bounded intersections of open half-spaces `{x : a_i . x < b_i}` in two or three dimensions.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::vecops::{distance, dot, norm};

#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    pub(crate) faces: Vec<Halfspace>,
    pub(crate) normal_lengths: Vec<f64>,
    pub(crate) vertices: Vec<Vec<f64>>,
    pub(crate) witness: Vec<f64>,
}

impl Polytope {
    pub(crate) fn new(faces: Vec<Halfspace>) -> Result<Self> {
        let n = faces
            .first()
            .map(|h| h.normal.len())
            .ok_or_else(|| Error::InvalidDomain("polytope needs at least one half-space".into()))?;
        if !(2..=3).contains(&n) {
            return Err(Error::UnsupportedDimension { dimension: n, what: "polytope" });
        }
        let mut normal_lengths = Vec::with_capacity(faces.len());
        for (i, h) in faces.iter().enumerate() {
            if h.normal.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: h.normal.len() });
            }
            let len = norm(&h.normal);
            if !(len > 0.0) || !len.is_finite() || !h.offset.is_finite() {
                return Err(Error::InvalidDomain(format!("half-space {i} has a degenerate normal")));
            }
            normal_lengths.push(len);
        }
        if has_recession_direction(&faces, n) {
            return Err(Error::DegenerateDomain("half-spaces do not bound a region".into()));
        }
        let vertices = enumerate_vertices(&faces, n);
        if vertices.len() < n + 1 {
            return Err(Error::EmptyInterior);
        }
        let mut witness = vec![0.0; n];
        for v in &vertices {
            for (w, x) in witness.iter_mut().zip(v) {
                *w += x / vertices.len() as f64;
            }
        }
        let poly = Polytope { faces, normal_lengths, vertices, witness };
        if !poly.contains(&poly.witness) {
            return Err(Error::EmptyInterior);
        }
        Ok(poly)
    }

    pub fn faces(&self) -> &[Halfspace] {
        &self.faces
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// A point strictly inside the polytope (the vertex centroid).
    pub fn interior_witness(&self) -> &[f64] {
        &self.witness
    }

    pub(crate) fn contains(&self, x: &[f64]) -> bool {
        self.faces.iter().all(|h| dot(&h.normal, x) < h.offset)
    }

    /// Exit distance and the index of the face that is hit; ties go to the lowest index.
    pub(crate) fn exit_face(&self, xi: &[f64], w: &[f64]) -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for (i, h) in self.faces.iter().enumerate() {
            let aw = dot(&h.normal, w);
            if aw > 0.0 {
                let t = (h.offset - dot(&h.normal, xi)) / aw;
                if best.is_none_or(|(tb, _)| t < tb) {
                    best = Some((t, i));
                }
            }
        }
        best
    }

    pub(crate) fn exit(&self, xi: &[f64], w: &[f64], normal: Option<&mut [f64]>) -> f64 {
        let (t, face) = self.exit_face(xi, w).expect("bounded polytope always has a face ahead of every direction");
        if let Some(nu) = normal {
            let len = self.normal_lengths[face];
            for (o, a) in nu.iter_mut().zip(&self.faces[face].normal) {
                *o = a / len;
            }
        }
        t
    }

    pub(crate) fn boundary_distance(&self, x: &[f64]) -> f64 {
        self.faces
            .iter()
            .zip(&self.normal_lengths)
            .map(|(h, len)| (h.offset - dot(&h.normal, x)) / len)
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }

    pub(crate) fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(distance(a, b));
            }
        }
        d
    }

    pub(crate) fn bounding_ball(&self) -> (Vec<f64>, f64) {
        let n = self.witness.len();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for v in &self.vertices {
            for k in 0..n {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let radius = self.vertices.iter().map(|v| distance(v, &center)).fold(0.0, f64::max);
        (center, radius)
    }

    pub(crate) fn translated(&self, shift: &[f64]) -> Self {
        let faces = self
            .faces
            .iter()
            .map(|h| Halfspace { normal: h.normal.clone(), offset: h.offset + dot(&h.normal, shift) })
            .collect();
        let move_pt = |p: &Vec<f64>| p.iter().zip(shift).map(|(a, b)| a + b).collect::<Vec<f64>>();
        Polytope {
            faces,
            normal_lengths: self.normal_lengths.clone(),
            vertices: self.vertices.iter().map(move_pt).collect(),
            witness: move_pt(&self.witness),
        }
    }
}

/// True when some nonzero `d` has `a_i . d <= 0` for every face, i.e. the region is unbounded.
fn has_recession_direction(faces: &[Halfspace], n: usize) -> bool {
    let rows: Vec<f64> = faces.iter().flat_map(|h| h.normal.iter().cloned()).collect();
    let a = DMatrix::from_row_slice(faces.len(), n, &rows);
    if a.rank(1e-12 * a.norm()) < n {
        return true;
    }
    let scale: f64 = faces.iter().map(|h| norm(&h.normal)).fold(0.0, f64::max);
    let tol = 1e-12 * scale;
    let feasible = |d: &[f64]| norm(d) > tol && faces.iter().all(|h| dot(&h.normal, d) <= tol * norm(d));
    // Extreme rays of the recession cone lie on n-1 of the face hyperplanes.
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    match n {
        2 => {
            for h in faces {
                candidates.push(vec![-h.normal[1], h.normal[0]]);
            }
        }
        _ => {
            for (i, p) in faces.iter().enumerate() {
                for q in &faces[i + 1..] {
                    let (a, b) = (&p.normal, &q.normal);
                    candidates.push(vec![
                        a[1] * b[2] - a[2] * b[1],
                        a[2] * b[0] - a[0] * b[2],
                        a[0] * b[1] - a[1] * b[0],
                    ]);
                }
            }
        }
    }
    candidates.iter().any(|d| {
        let neg: Vec<f64> = d.iter().map(|v| -v).collect();
        feasible(d) || feasible(&neg)
    })
}

fn enumerate_vertices(faces: &[Halfspace], n: usize) -> Vec<Vec<f64>> {
    let m = faces.len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut push = |idx: &[usize]| {
        let rows: Vec<f64> = idx.iter().flat_map(|&i| faces[i].normal.iter().cloned()).collect();
        let a = DMatrix::from_row_slice(n, n, &rows);
        let b = DVector::from_iterator(n, idx.iter().map(|&i| faces[i].offset));
        let Some(v) = a.lu().solve(&b) else { return };
        let v: Vec<f64> = v.iter().cloned().collect();
        if v.iter().any(|x| !x.is_finite()) {
            return;
        }
        let scale = 1.0 + norm(&v);
        let ok = faces.iter().all(|h| dot(&h.normal, &v) <= h.offset + 1e-9 * scale * norm(&h.normal));
        if ok && !out.iter().any(|u| distance(u, &v) <= 1e-12 * scale) {
            out.push(v);
        }
    };
    if n == 2 {
        for i in 0..m {
            for j in i + 1..m {
                push(&[i, j]);
            }
        }
    } else {
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    push(&[i, j, k]);
                }
            }
        }
    }
    out
}
