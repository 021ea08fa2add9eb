use super::Mesh;
use crate::{Error, Result};

/// Sentinel stored as the minus-triangle of a boundary edge.
pub const BOUNDARY: usize = usize::MAX;

/// Edge-oriented connectivity derived from a [`Mesh`].
///
/// Edges are numbered lexicographically by their sorted endpoint indices.
/// For an interior edge the adjacent triangle with the smaller index is `T₊`,
/// which fixes the orientation of the edge normal.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTopology {
    /// Sorted endpoint pair of every edge.
    pub edge_vertices: Vec<[usize; 2]>,
    /// Edge indices of every triangle; local edge `j` is opposite vertex `j`.
    pub edges_of_triangle: Vec<[usize; 3]>,
    /// `[T₊, T₋]` per edge, with `T₋ == BOUNDARY` on the boundary.
    pub triangles_of_edge: Vec<[usize; 2]>,
    pub is_interior: Vec<bool>,
    /// Local edge index of the edge inside `T₊` and `T₋` (the `q`, `r` pair).
    pub local_pos: Vec<[u8; 2]>,
}

impl EdgeTopology {
    pub fn build(mesh: &Mesh) -> Result<Self> {
        let nt = mesh.num_triangles();
        // (min, max, triangle, local edge)
        let mut half: Vec<(usize, usize, usize, u8)> = Vec::with_capacity(3 * nt);
        for (t, tri) in mesh.triangles.iter().enumerate() {
            for j in 0..3 {
                let a = tri[(j + 1) % 3];
                let b = tri[(j + 2) % 3];
                half.push((a.min(b), a.max(b), t, j as u8));
            }
        }
        half.sort_unstable();

        let mut edge_vertices = Vec::with_capacity(3 * nt / 2 + 1);
        let mut triangles_of_edge = Vec::with_capacity(edge_vertices.capacity());
        let mut local_pos = Vec::with_capacity(edge_vertices.capacity());
        let mut is_interior = Vec::with_capacity(edge_vertices.capacity());
        let mut edges_of_triangle = vec![[0usize; 3]; nt];

        let mut i = 0;
        while i < half.len() {
            let (a, b, t0, j0) = half[i];
            let mut k = i + 1;
            while k < half.len() && half[k].0 == a && half[k].1 == b {
                k += 1;
            }
            let s = edge_vertices.len();
            edge_vertices.push([a, b]);
            match k - i {
                1 => {
                    triangles_of_edge.push([t0, BOUNDARY]);
                    local_pos.push([j0, 0]);
                    is_interior.push(false);
                    edges_of_triangle[t0][j0 as usize] = s;
                }
                2 => {
                    // sorted by triangle index, so half[i] is T₊
                    let (_, _, t1, j1) = half[i + 1];
                    triangles_of_edge.push([t0, t1]);
                    local_pos.push([j0, j1]);
                    is_interior.push(true);
                    edges_of_triangle[t0][j0 as usize] = s;
                    edges_of_triangle[t1][j1 as usize] = s;
                }
                _ => return Err(Error::NonConforming(a, b)),
            }
            i = k;
        }

        Ok(EdgeTopology {
            edge_vertices,
            edges_of_triangle,
            triangles_of_edge,
            is_interior,
            local_pos,
        })
    }

    pub fn num_edges(&self) -> usize {
        self.edge_vertices.len()
    }

    pub fn num_interior_edges(&self) -> usize {
        self.is_interior.iter().filter(|&&b| b).count()
    }

    /// Marks vertices that lie on at least one boundary edge.
    pub fn boundary_vertices(&self, num_vertices: usize) -> Vec<bool> {
        let mut on_boundary = vec![false; num_vertices];
        for (s, [a, b]) in self.edge_vertices.iter().enumerate() {
            if !self.is_interior[s] {
                on_boundary[*a] = true;
                on_boundary[*b] = true;
            }
        }
        on_boundary
    }
}
