//! Triangulations, derived edge data, newest-vertex bisection and uniform
//! red refinement.
//!
//! A [`Mesh`] stores vertex coordinates and counter-clockwise vertex triples.
//! Slit domains are represented by geometrically coincident but distinct
//! vertices, so the two sides of a slit carry distinct boundary edges.
//! Local edge `j` of a triangle is always the edge opposite local vertex `j`.

mod geometry;
mod io;
mod refine;
mod topology;

pub use geometry::Geometry;
pub use io::{read_mesh, write_mesh};
pub use refine::{initial_refinement_edges, refine_bisec3, refine_nvb, refine_uniform};
pub use topology::{EdgeTopology, BOUNDARY};

use crate::{Error, Point, Result};

/// A conforming triangulation with its newest-vertex bisection state.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub coords: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    /// Local index (0..3) of the refinement edge of each triangle.
    pub refinement_edge: Vec<u8>,
}

impl Mesh {
    /// Builds a mesh from raw data, reordering clockwise triangles and
    /// choosing the longest edge of every triangle as its refinement edge.
    pub fn new(coords: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let mesh = Mesh {
            refinement_edge: vec![0; triangles.len()],
            coords,
            triangles,
        };
        let mut mesh = fix_local_enumeration(mesh)?;
        let topo = EdgeTopology::build(&mesh)?;
        mesh.refinement_edge = initial_refinement_edges(&mesh, &topo);
        Ok(mesh)
    }

    pub fn num_vertices(&self) -> usize {
        self.coords.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices_of(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.coords[a], self.coords[b], self.coords[c]]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [p, q, r] = self.vertices_of(t);
        signed_area(p, q, r)
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [p, q, r] = self.vertices_of(t);
        [(p[0] + q[0] + r[0]) / 3.0, (p[1] + q[1] + r[1]) / 3.0]
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.signed_area(t)).sum()
    }

    /// Smallest interior angle (radians) over all triangles.
    pub fn min_angle(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| {
                let v = self.vertices_of(t);
                (0..3)
                    .map(|j| {
                        let o = v[j];
                        let a = sub(v[(j + 1) % 3], o);
                        let b = sub(v[(j + 2) % 3], o);
                        let cos = dot(a, b) / (norm(a) * norm(b));
                        cos.clamp(-1.0, 1.0).acos()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Scales every coordinate by `s`.
    pub fn scaled(&self, s: f64) -> Mesh {
        let mut out = self.clone();
        for p in &mut out.coords {
            p[0] *= s;
            p[1] *= s;
        }
        out
    }
}

/// Reorders the vertices of clockwise triangles so that every triangle is
/// counter-clockwise. Rejects out-of-range indices and degenerate triangles.
pub fn fix_local_enumeration(mut mesh: Mesh) -> Result<Mesh> {
    let nv = mesh.coords.len();
    for (t, tri) in mesh.triangles.iter_mut().enumerate() {
        for &v in tri.iter() {
            if v >= nv {
                return Err(Error::VertexOutOfRange {
                    triangle: t,
                    vertex: v,
                    count: nv,
                });
            }
        }
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
            return Err(Error::RepeatedVertex(t));
        }
        let [p, q, r] = [mesh.coords[tri[0]], mesh.coords[tri[1]], mesh.coords[tri[2]]];
        let area = signed_area(p, q, r);
        let scale = [norm(sub(q, p)), norm(sub(r, q)), norm(sub(p, r))]
            .into_iter()
            .fold(0.0, f64::max);
        if !(area.abs() > 1e-14 * scale * scale) {
            return Err(Error::DegenerateTriangle(t));
        }
        if area < 0.0 {
            tri.swap(1, 2);
        }
    }
    if mesh.refinement_edge.len() != mesh.triangles.len() {
        mesh.refinement_edge = vec![0; mesh.triangles.len()];
    }
    Ok(mesh)
}

pub(crate) fn signed_area(p: Point, q: Point, r: Point) -> f64 {
    0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
}

pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clockwise_triangle_is_reordered() {
        let mesh = Mesh {
            coords: vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]],
            triangles: vec![[0, 1, 2]],
            refinement_edge: vec![0],
        };
        let fixed = fix_local_enumeration(mesh).unwrap();
        assert_eq!(fixed.triangles[0], [0, 2, 1]);
        assert!(fixed.signed_area(0) > 0.0);
    }

    #[test]
    fn counter_clockwise_mesh_is_unchanged() {
        let mesh = Mesh {
            coords: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            triangles: vec![[0, 1, 2], [0, 2, 3]],
            refinement_edge: vec![0, 0],
        };
        let fixed = fix_local_enumeration(mesh.clone()).unwrap();
        assert_eq!(fixed, mesh);
    }

    #[test]
    fn collinear_triangle_is_rejected_with_index() {
        let mesh = Mesh {
            coords: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [2.0, 0.0]],
            triangles: vec![[0, 1, 2], [0, 1, 3]],
            refinement_edge: vec![0, 0],
        };
        match fix_local_enumeration(mesh) {
            Err(Error::DegenerateTriangle(1)) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn out_of_range_vertex_is_rejected() {
        let mesh = Mesh {
            coords: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            triangles: vec![[0, 1, 5]],
            refinement_edge: vec![0],
        };
        assert!(matches!(
            fix_local_enumeration(mesh),
            Err(Error::VertexOutOfRange { triangle: 0, vertex: 5, .. })
        ));
    }
}
