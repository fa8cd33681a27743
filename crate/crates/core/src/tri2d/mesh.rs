//! Conforming triangle meshes with one shared point DoF per vertex and per
//! edge midpoint. Periodic meshes identify vertices through a slot map;
//! geometry always uses the unwrapped coordinates of each triangle.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PampaError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Sorted vertex slots.
    pub slots: [usize; 2],
    /// `(triangle, local edge)`; local edge `e` joins local vertices `e` and
    /// `(e + 1) % 3`.
    pub tris: Vec<(usize, usize)>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.tris.len() == 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    vertex_slot: Vec<usize>,
    n_vertex_slots: usize,
    edges: Vec<Edge>,
    tri_edges: Vec<[usize; 3]>,
}

fn signed_area(p: &[[f64; 2]; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}

impl TriMesh {
    pub fn new(vertices: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let slots = (0..vertices.len()).collect();
        Self::with_slots(vertices, triangles, slots)
    }

    /// `vertex_slot[v]` names the point DoF of vertex `v`; vertices sharing a
    /// slot are identified.
    pub fn with_slots(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        vertex_slot: Vec<usize>,
    ) -> Result<Self> {
        let bad = |m: String| Err(PampaError::InvalidMesh(m));
        if triangles.is_empty() {
            return bad("mesh has no triangles".into());
        }
        if vertex_slot.len() != vertices.len() {
            return bad("slot map length differs from vertex count".into());
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return bad("non-finite vertex coordinate".into());
        }
        let n_vertex_slots = vertex_slot.iter().max().map_or(0, |m| m + 1);
        let mut used = vec![false; n_vertex_slots];
        for &s in &vertex_slot {
            used[s] = true;
        }
        if used.iter().any(|u| !u) {
            return bad("vertex slots are not contiguous".into());
        }
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return bad(format!("triangle {t} references a missing vertex"));
            }
            let s = tri.map(|v| vertex_slot[v]);
            if s[0] == s[1] || s[1] == s[2] || s[0] == s[2] {
                return bad(format!("triangle {t} repeats a vertex"));
            }
            let area = signed_area(&tri.map(|v| vertices[v]));
            if !(area > 0.0) {
                return bad(format!(
                    "triangle {t} is not counterclockwise (area {area})"
                ));
            }
        }

        let mut edges: Vec<Edge> = Vec::new();
        let mut lookup: HashMap<[usize; 2], usize> = HashMap::new();
        let mut tri_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut te = [0; 3];
            for (e, slot) in te.iter_mut().enumerate() {
                let a = vertex_slot[tri[e]];
                let b = vertex_slot[tri[(e + 1) % 3]];
                let key = [a.min(b), a.max(b)];
                let idx = *lookup.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        slots: key,
                        tris: Vec::new(),
                    });
                    edges.len() - 1
                });
                edges[idx].tris.push((t, e));
                *slot = idx;
            }
            tri_edges.push(te);
        }
        for (i, edge) in edges.iter().enumerate() {
            match edge.tris.as_slice() {
                [_] => {}
                [(t0, e0), (t1, e1)] => {
                    // conforming neighbours traverse the edge in opposite directions
                    let start = |t: usize, e: usize| vertex_slot[triangles[t][e]];
                    if start(*t0, *e0) == start(*t1, *e1) {
                        return bad(format!("edge {i} has inconsistent orientation"));
                    }
                }
                _ => {
                    return bad(format!(
                        "edge {i} is shared by {} triangles",
                        edge.tris.len()
                    ))
                }
            }
        }
        Ok(Self {
            vertices,
            triangles,
            vertex_slot,
            n_vertex_slots,
            edges,
            tri_edges,
        })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_vertex_slots(&self) -> usize {
        self.n_vertex_slots
    }

    /// Number of point DoFs: vertex slots, then one per edge.
    pub fn n_points(&self) -> usize {
        self.n_vertex_slots + self.edges.len()
    }

    pub fn is_closed(&self) -> bool {
        self.edges.iter().all(|e| !e.is_boundary())
    }

    pub fn coords(&self, t: usize) -> [[f64; 2]; 3] {
        self.triangles[t].map(|v| self.vertices[v])
    }

    pub fn area(&self, t: usize) -> f64 {
        signed_area(&self.coords(t))
    }

    pub fn perimeter(&self, t: usize) -> f64 {
        let p = self.coords(t);
        (0..3)
            .map(|e| {
                let (a, b) = (p[e], p[(e + 1) % 3]);
                (b[0] - a[0]).hypot(b[1] - a[1])
            })
            .sum()
    }

    /// `|K| / |dK|`, the length scale in the time-step bound.
    pub fn cell_measure(&self, t: usize) -> f64 {
        self.area(t) / self.perimeter(t)
    }

    pub fn min_cell_measure(&self) -> f64 {
        (0..self.n_triangles())
            .map(|t| self.cell_measure(t))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.area(t)).sum()
    }

    pub fn edge_of(&self, t: usize, e: usize) -> usize {
        self.tri_edges[t][e]
    }

    /// Point DoF of local node `n` of triangle `t` (vertices 0..3, edge
    /// midpoints 3..6).
    pub fn point_slot(&self, t: usize, n: usize) -> usize {
        if n < 3 {
            self.vertex_slot[self.triangles[t][n]]
        } else {
            self.n_vertex_slots + self.tri_edges[t][n - 3]
        }
    }

    pub fn point_slots(&self, t: usize) -> [usize; 6] {
        std::array::from_fn(|n| self.point_slot(t, n))
    }

    /// Physical position of local node `n` of triangle `t`.
    pub fn node_position(&self, t: usize, n: usize) -> [f64; 2] {
        let p = self.coords(t);
        if n < 3 {
            p[n]
        } else {
            let (a, b) = (p[n - 3], p[(n - 2) % 3]);
            [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
        }
    }

    /// Whether point DoF `slot` lies on a boundary edge.
    pub fn boundary_points(&self) -> Vec<bool> {
        let mut out = vec![false; self.n_points()];
        for (i, e) in self.edges.iter().enumerate() {
            if e.is_boundary() {
                out[e.slots[0]] = true;
                out[e.slots[1]] = true;
                out[self.n_vertex_slots + i] = true;
            }
        }
        out
    }

    /// Structured mesh of `nx * ny` rectangles, each cut along its
    /// lower-left to upper-right diagonal. Interior vertices (all vertices
    /// when periodic) are moved by up to `jitter` cell widths.
    pub fn structured(
        lower: [f64; 2],
        upper: [f64; 2],
        nx: usize,
        ny: usize,
        periodic: bool,
        jitter: f64,
        seed: u64,
    ) -> Result<Self> {
        if nx == 0 || ny == 0 || (periodic && (nx < 3 || ny < 3)) {
            return Err(PampaError::InvalidMesh(format!(
                "bad grid size {nx} x {ny}"
            )));
        }
        if !(upper[0] > lower[0] && upper[1] > lower[1]) {
            return Err(PampaError::InvalidMesh("empty domain".into()));
        }
        if !(0.0..0.3).contains(&jitter) {
            return Err(PampaError::InvalidArgument(format!(
                "jitter {jitter} outside [0, 0.3)"
            )));
        }
        let hx = (upper[0] - lower[0]) / nx as f64;
        let hy = (upper[1] - lower[1]) / ny as f64;
        let (sx, sy) = if periodic { (nx, ny) } else { (nx + 1, ny + 1) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let offsets: Vec<[f64; 2]> = (0..sx * sy)
            .map(|s| {
                let (i, j) = (s % sx, s / sx);
                let interior = periodic || (i > 0 && i < nx && j > 0 && j < ny);
                if interior && jitter > 0.0 {
                    [
                        jitter * hx * rng.random_range(-1.0..1.0),
                        jitter * hy * rng.random_range(-1.0..1.0),
                    ]
                } else {
                    [0.0, 0.0]
                }
            })
            .collect();
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        let mut slots = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                let s = (i % sx) + (j % sy) * sx;
                vertices.push([
                    lower[0] + i as f64 * hx + offsets[s][0],
                    lower[1] + j as f64 * hy + offsets[s][1],
                ]);
                slots.push(s);
            }
        }
        let v = |i: usize, j: usize| i + j * (nx + 1);
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                triangles.push([v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
                triangles.push([v(i, j), v(i + 1, j + 1), v(i, j + 1)]);
            }
        }
        if periodic {
            Self::with_slots(vertices, triangles, slots)
        } else {
            Self::new(vertices, triangles)
        }
    }

    /// Text format: `NV NT`, then `NV` lines `x y`, then `NT` lines `i j k`
    /// (0-based, counterclockwise).
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: &str| PampaError::InvalidMesh(m.to_string());
        let mut tokens = text.split_whitespace();
        let mut next = |what: &str| tokens.next().ok_or_else(|| bad(&format!("missing {what}")));
        let nv: usize = next("vertex count")?
            .parse()
            .map_err(|_| bad("bad vertex count"))?;
        let nt: usize = next("triangle count")?
            .parse()
            .map_err(|_| bad("bad triangle count"))?;
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let x: f64 = next("x")?.parse().map_err(|_| bad("bad coordinate"))?;
            let y: f64 = next("y")?.parse().map_err(|_| bad("bad coordinate"))?;
            vertices.push([x, y]);
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let mut tri = [0; 3];
            for v in &mut tri {
                *v = next("vertex index")?
                    .parse()
                    .map_err(|_| bad("bad vertex index"))?;
            }
            triangles.push(tri);
        }
        if tokens.next().is_some() {
            return Err(bad("trailing data after the last triangle"));
        }
        Self::new(vertices, triangles)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Writes the mesh in the text format. Periodic identification is not
    /// representable and is dropped.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.vertices.len(), self.triangles.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{:e} {:e}", v[0], v[1]);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> TriMesh {
        TriMesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn two_triangle_square() {
        let m = square();
        assert_eq!(m.edges().len(), 5);
        assert_eq!(m.n_points(), 9);
        assert_eq!(m.edges().iter().filter(|e| !e.is_boundary()).count(), 1);
        assert!((m.total_area() - 1.0).abs() < 1e-15);
        assert!((m.cell_measure(0) - 0.5 / (2.0 + 2f64.sqrt())).abs() < 1e-15);
        assert_eq!(m.node_position(0, 4), [1.0, 0.5]);
        assert_eq!(m.boundary_points().iter().filter(|b| **b).count(), 8);
    }

    #[test]
    fn rejects_bad_meshes() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert!(TriMesh::new(v.clone(), vec![[0, 2, 1]]).is_err());
        assert!(TriMesh::new(v.clone(), vec![[0, 1, 7]]).is_err());
        assert!(TriMesh::new(v.clone(), vec![]).is_err());
        // same edge traversed twice in the same direction
        let w = vec![[0.0, 0.0], [1.0, 0.0], [0.5, 1.0], [0.5, 0.5]];
        assert!(TriMesh::new(w, vec![[0, 1, 2], [0, 1, 3]]).is_err());
    }

    #[test]
    fn periodic_grid_is_closed() {
        let m = TriMesh::structured([0.0, 0.0], [1.0, 1.0], 4, 5, true, 0.2, 1).unwrap();
        assert!(m.is_closed());
        assert_eq!(m.n_vertex_slots(), 20);
        // Euler on the torus: V - E + F = 0
        assert_eq!(m.edges().len(), 20 + m.n_triangles());
        assert!((m.total_area() - 1.0).abs() < 1e-13);
        assert!(TriMesh::structured([0.0, 0.0], [1.0, 1.0], 2, 5, true, 0.0, 1).is_err());
    }

    #[test]
    fn open_grid_counts() {
        let m = TriMesh::structured([-1.0, -1.0], [1.0, 1.0], 3, 2, false, 0.1, 9).unwrap();
        assert_eq!(m.n_triangles(), 12);
        assert_eq!(m.n_vertex_slots(), 12);
        assert_eq!(m.edges().iter().filter(|e| e.is_boundary()).count(), 10);
        assert!((m.total_area() - 4.0).abs() < 1e-13);
    }

    #[test]
    fn text_round_trip() {
        let m = TriMesh::structured([0.0, 0.0], [2.0, 1.0], 3, 3, false, 0.1, 4).unwrap();
        let back = TriMesh::parse(&m.to_text()).unwrap();
        assert_eq!(back, m);
        assert!(TriMesh::parse("3 1\n0 0\n1 0\n0 1\n0 1").is_err());
        assert!(TriMesh::parse("3 1\n0 0\n1 0\n0 1\n0 1 2 5").is_err());
        assert!(TriMesh::parse("3 1\n0 0\n1 0\n0 1\n0 2 1").is_err());
    }
}
