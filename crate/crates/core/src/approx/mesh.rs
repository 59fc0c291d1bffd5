use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

pub type Point = [f64; 2];

/// How the representative point `d_i` of each triangle is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum Representative {
    Centroid,
    /// The point of each triangle nearest to the projection of its centroid onto a segment.
    Aligned { from: Point, to: Point },
    Explicit(Vec<Point>),
}

/// Triangulated planar region with one representative point per triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeshRecord", into = "MeshRecord")]
pub struct Mesh2D {
    nodes: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    areas: Vec<f64>,
    representatives: Vec<Point>,
    extension: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshRecord {
    pub nodes: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representatives: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub extension: usize,
}

fn is_zero(v: &usize) -> bool {
    *v == 0
}

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn centroid(p: [Point; 3]) -> Point {
    [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0]
}

fn closest_on_segment(x: Point, a: Point, b: Point) -> Point {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 == 0.0 { 0.0 } else { (((x[0] - a[0]) * d[0] + (x[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) };
    [a[0] + t * d[0], a[1] + t * d[1]]
}

fn dist2(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Point of triangle `p` nearest to the projection of its centroid onto `[a, b]`.
fn nearest_to_segment(p: [Point; 3], a: Point, b: Point) -> Point {
    closest_in_triangle(closest_on_segment(centroid(p), a, b), p)
}

fn closest_in_triangle(x: Point, p: [Point; 3]) -> Point {
    if barycentric(x, p).is_some_and(|w| w.iter().all(|&v| v >= 0.0)) {
        return x;
    }
    let mut best = (f64::INFINITY, p[0]);
    for k in 0..3 {
        let c = closest_on_segment(x, p[k], p[(k + 1) % 3]);
        let d = dist2(c, x);
        if d < best.0 {
            best = (d, c);
        }
    }
    best.1
}

pub(crate) fn barycentric(x: Point, p: [Point; 3]) -> Option<[f64; 3]> {
    let area = signed_area(p[0], p[1], p[2]);
    if area == 0.0 {
        return None;
    }
    let w1 = signed_area(x, p[1], p[2]) / area;
    let w2 = signed_area(p[0], x, p[2]) / area;
    Some([w1, w2, 1.0 - w1 - w2])
}

impl Mesh2D {
    /// Validates positive area (counter-clockwise) for every triangle.
    pub fn new(nodes: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if nodes.iter().flatten().any(|v| !v.is_finite()) {
            return param("mesh nodes must be finite");
        }
        let mut tris = triangles;
        let mut areas = Vec::with_capacity(tris.len());
        for (index, t) in tris.iter_mut().enumerate() {
            if t.iter().any(|&i| i >= nodes.len()) {
                return param(format!("triangle {index} references a missing node"));
            }
            let mut area = signed_area(nodes[t[0]], nodes[t[1]], nodes[t[2]]);
            if area < 0.0 {
                t.swap(1, 2);
                area = -area;
            }
            let scale = dist2(nodes[t[0]], nodes[t[1]]).max(dist2(nodes[t[0]], nodes[t[2]]));
            if !(area > 1e-14 * scale) {
                return Err(Error::DegenerateTriangle { index, area });
            }
            areas.push(area);
        }
        if tris.is_empty() {
            return param("mesh has no triangles");
        }
        let mut mesh = Self { nodes, triangles: tris, areas, representatives: Vec::new(), extension: 0 };
        mesh.set_representatives(Representative::Centroid)?;
        Ok(mesh)
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn representatives(&self) -> &[Point] {
        &self.representatives
    }

    /// Number of outer rings added around the lattice.
    pub fn extension(&self) -> usize {
        self.extension
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub(crate) fn corners(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn set_representatives(&mut self, rep: Representative) -> Result<()> {
        let reps: Vec<Point> = match rep {
            Representative::Centroid => (0..self.triangles.len()).map(|t| centroid(self.corners(t))).collect(),
            Representative::Aligned { from, to } => {
                (0..self.triangles.len()).map(|t| nearest_to_segment(self.corners(t), from, to)).collect()
            }
            Representative::Explicit(points) => {
                if points.len() != self.triangles.len() {
                    return param(format!("{} representatives for {} triangles", points.len(), self.triangles.len()));
                }
                for (t, &x) in points.iter().enumerate() {
                    if !self.contains(t, x) {
                        return param(format!("representative {t} lies outside its triangle"));
                    }
                }
                points
            }
        };
        self.representatives = reps;
        Ok(())
    }

    pub fn with_representatives(mut self, rep: Representative) -> Result<Self> {
        self.set_representatives(rep)?;
        Ok(self)
    }

    fn contains(&self, t: usize, x: Point) -> bool {
        barycentric(x, self.corners(t)).is_some_and(|w| w.iter().all(|&v| v >= -1e-12))
    }

    /// Containing triangle and barycentric weights of `x`.
    pub fn locate(&self, x: Point) -> Option<(usize, [f64; 3])> {
        (0..self.triangles.len()).find_map(|t| {
            let w = barycentric(x, self.corners(t))?;
            w.iter().all(|&v| v >= -1e-12).then(|| (t, w.map(|v| v.max(0.0))))
        })
    }
}

/// Regular lattice over `bbox = [xmin, ymin, xmax, ymax]`, `n` nodes per side,
/// plus `extension` rings of equal-size cells; squares split along the rising diagonal.
pub fn lattice_mesh_2d(bbox: [f64; 4], nodes_per_side: usize, extension: usize) -> Result<Mesh2D> {
    let [x0, y0, x1, y1] = bbox;
    if nodes_per_side < 2 {
        return param(format!("a lattice needs at least 2 nodes per side, got {nodes_per_side}"));
    }
    if !(x1 > x0 && y1 > y0) {
        return param("bounding box must have positive width and height");
    }
    let dx = (x1 - x0) / (nodes_per_side - 1) as f64;
    let dy = (y1 - y0) / (nodes_per_side - 1) as f64;
    let side = nodes_per_side + 2 * extension;
    let offset = extension as f64;
    let mut nodes = Vec::with_capacity(side * side);
    for j in 0..side {
        for i in 0..side {
            nodes.push([x0 + (i as f64 - offset) * dx, y0 + (j as f64 - offset) * dy]);
        }
    }
    let idx = |i: usize, j: usize| j * side + i;
    let mut triangles = Vec::with_capacity(2 * (side - 1) * (side - 1));
    for j in 0..side - 1 {
        for i in 0..side - 1 {
            triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    let mut mesh = Mesh2D::new(nodes, triangles)?;
    mesh.extension = extension;
    Ok(mesh)
}

impl TryFrom<MeshRecord> for Mesh2D {
    type Error = Error;
    fn try_from(r: MeshRecord) -> Result<Self> {
        let mut mesh = Mesh2D::new(r.nodes, r.triangles)?;
        mesh.extension = r.extension;
        if let Some(reps) = r.representatives {
            mesh.set_representatives(Representative::Explicit(reps))?;
        }
        Ok(mesh)
    }
}

impl From<Mesh2D> for MeshRecord {
    fn from(m: Mesh2D) -> Self {
        let centroids: Vec<Point> = (0..m.triangles.len()).map(|t| centroid(m.corners(t))).collect();
        let representatives = (centroids != m.representatives).then_some(m.representatives);
        MeshRecord { nodes: m.nodes, triangles: m.triangles, representatives, extension: m.extension }
    }
}
