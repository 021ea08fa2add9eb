use super::{norm, signed_area, EdgeTopology, Mesh};
use crate::Point;

/// Areas, edge lengths, unit normals and midpoints.
///
/// The normal of an edge is the outward unit normal of its `T₊` triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub area: Vec<f64>,
    pub length: Vec<f64>,
    pub normal: Vec<Point>,
    pub midpoint: Vec<Point>,
}

impl Geometry {
    pub fn compute(mesh: &Mesh, topo: &EdgeTopology) -> Self {
        let area = mesh
            .triangles
            .iter()
            .map(|&[a, b, c]| signed_area(mesh.coords[a], mesh.coords[b], mesh.coords[c]))
            .collect();

        let ne = topo.num_edges();
        let mut length = Vec::with_capacity(ne);
        let mut normal = Vec::with_capacity(ne);
        let mut midpoint = Vec::with_capacity(ne);
        for s in 0..ne {
            let tp = topo.triangles_of_edge[s][0];
            let q = topo.local_pos[s][0] as usize;
            let tri = mesh.triangles[tp];
            // counter-clockwise traversal of T₊ along the edge
            let start = mesh.coords[tri[(q + 1) % 3]];
            let end = mesh.coords[tri[(q + 2) % 3]];
            let tangent = [end[0] - start[0], end[1] - start[1]];
            let h = norm(tangent);
            length.push(h);
            normal.push([tangent[1] / h, -tangent[0] / h]);
            midpoint.push([0.5 * (start[0] + end[0]), 0.5 * (start[1] + end[1])]);
        }

        Geometry {
            area,
            length,
            normal,
            midpoint,
        }
    }
}
