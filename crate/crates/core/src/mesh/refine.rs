use std::collections::VecDeque;

use super::{norm, sub, EdgeTopology, Mesh, BOUNDARY};
use crate::Result;

/// Picks the longest edge of every triangle as its refinement edge, breaking
/// ties by the smaller global edge index.
///
/// Compatibility of the resulting assignment is not verified; the closure in
/// [`refine_nvb`] keeps any assignment conforming.
pub fn initial_refinement_edges(mesh: &Mesh, topo: &EdgeTopology) -> Vec<u8> {
    mesh.triangles
        .iter()
        .enumerate()
        .map(|(t, tri)| {
            let mut best = 0usize;
            let mut best_len = -1.0;
            for j in 0..3 {
                let len = norm(sub(mesh.coords[tri[(j + 1) % 3]], mesh.coords[tri[(j + 2) % 3]]));
                let tie = (len - best_len).abs() <= 1e-12 * len.max(best_len);
                let s = topo.edges_of_triangle[t][j];
                let s_best = topo.edges_of_triangle[t][best];
                if (!tie && len > best_len) || (tie && s < s_best) {
                    best = j;
                    best_len = len;
                }
            }
            best as u8
        })
        .collect()
}

/// Newest-vertex bisection of the marked triangles with conforming closure.
///
/// Every marked triangle is bisected at least once. New vertices are created
/// in edge order, so the result is deterministic.
pub fn refine_nvb(mesh: &Mesh, marked: &[usize]) -> Result<Mesh> {
    let topo = EdgeTopology::build(mesh)?;
    let mut marked_edge = vec![false; topo.num_edges()];
    for &t in marked {
        marked_edge[topo.edges_of_triangle[t][mesh.refinement_edge[t] as usize]] = true;
    }
    close_marking(mesh, &topo, &mut marked_edge);
    Ok(bisect_marked(mesh, &topo, &marked_edge))
}

/// Red refinement: every triangle is split into four similar triangles by
/// joining its edge midpoints. Refinement edges of the children are
/// reassigned to their longest edges, so adaptive refinement can continue.
pub fn refine_uniform(mesh: &Mesh) -> Result<Mesh> {
    let topo = EdgeTopology::build(mesh)?;
    let mut coords = mesh.coords.clone();
    let midpoint: Vec<usize> = topo
        .edge_vertices
        .iter()
        .map(|&[a, b]| {
            let (pa, pb) = (mesh.coords[a], mesh.coords[b]);
            coords.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
            coords.len() - 1
        })
        .collect();
    let mut triangles = Vec::with_capacity(4 * mesh.num_triangles());
    for (t, &[v0, v1, v2]) in mesh.triangles.iter().enumerate() {
        // m[j] is the midpoint of the edge opposite vertex j
        let m = topo.edges_of_triangle[t].map(|s| midpoint[s]);
        triangles.extend([[v0, m[2], m[1]], [m[2], v1, m[0]], [m[1], m[0], v2], [m[0], m[1], m[2]]]);
    }
    Mesh::new(coords, triangles)
}

/// Newest-vertex bisection of every edge: each triangle is split into four
/// by three bisections, keeping the newest-vertex state.
pub fn refine_bisec3(mesh: &Mesh) -> Result<Mesh> {
    let topo = EdgeTopology::build(mesh)?;
    let marked_edge = vec![true; topo.num_edges()];
    Ok(bisect_marked(mesh, &topo, &marked_edge))
}

/// Marks the refinement edge of every triangle that has any marked edge.
fn close_marking(mesh: &Mesh, topo: &EdgeTopology, marked_edge: &mut [bool]) {
    let mut queue: VecDeque<usize> = (0..mesh.num_triangles()).collect();
    while let Some(t) = queue.pop_front() {
        let edges = topo.edges_of_triangle[t];
        let refine = edges[mesh.refinement_edge[t] as usize];
        if marked_edge[refine] || !edges.iter().any(|&s| marked_edge[s]) {
            continue;
        }
        marked_edge[refine] = true;
        for &n in &topo.triangles_of_edge[refine] {
            if n != BOUNDARY && n != t {
                queue.push_back(n);
            }
        }
    }
}

fn bisect_marked(mesh: &Mesh, topo: &EdgeTopology, marked_edge: &[bool]) -> Mesh {
    let mut coords = mesh.coords.clone();
    let mut midpoint = vec![usize::MAX; topo.num_edges()];
    for (s, &m) in marked_edge.iter().enumerate() {
        if m {
            let [a, b] = topo.edge_vertices[s];
            let (pa, pb) = (mesh.coords[a], mesh.coords[b]);
            midpoint[s] = coords.len();
            coords.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
        }
    }

    let mut triangles = Vec::with_capacity(mesh.num_triangles() * 2);
    let mut refinement_edge = Vec::with_capacity(triangles.capacity());
    let mut emit = |tri: [usize; 3], r: u8| {
        triangles.push(tri);
        refinement_edge.push(r);
    };

    for (t, &tri) in mesh.triangles.iter().enumerate() {
        let j = mesh.refinement_edge[t] as usize;
        let edges = topo.edges_of_triangle[t];
        let m = midpoint[edges[j]];
        if m == usize::MAX {
            emit(tri, j as u8);
            continue;
        }
        let peak = tri[j];
        let left = tri[(j + 1) % 3];
        let right = tri[(j + 2) % 3];

        // child [peak, left, m]; its refinement edge peak-left is the old edge opposite `right`
        let m_left = midpoint[edges[(j + 2) % 3]];
        if m_left == usize::MAX {
            emit([peak, left, m], 2);
        } else {
            emit([m, peak, m_left], 2);
            emit([m, m_left, left], 1);
        }

        // child [peak, m, right]; its refinement edge right-peak is the old edge opposite `left`
        let m_right = midpoint[edges[(j + 1) % 3]];
        if m_right == usize::MAX {
            emit([peak, m, right], 1);
        } else {
            emit([m, right, m_right], 2);
            emit([m, m_right, peak], 1);
        }
    }

    Mesh {
        coords,
        triangles,
        refinement_edge,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lone_triangle() -> Mesh {
        Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]]).unwrap()
    }

    #[test]
    fn lone_triangle_bisection() {
        let mesh = lone_triangle();
        assert_eq!(mesh.refinement_edge, vec![0]);
        let fine = refine_nvb(&mesh, &[0]).unwrap();
        assert_eq!(fine.num_triangles(), 2);
        assert_eq!(fine.num_vertices(), 4);
        assert_eq!(fine.coords[3], [0.5, 0.5]);
        for t in 0..2 {
            assert!(fine.triangles[t].contains(&3));
            assert!(fine.signed_area(t) > 0.0);
            // the new vertex is the peak of both children
            let r = fine.refinement_edge[t] as usize;
            assert_eq!(fine.triangles[t][r], 3);
        }
    }

    #[test]
    fn empty_marking_is_identity() {
        let mesh = lone_triangle();
        assert_eq!(refine_nvb(&mesh, &[]).unwrap(), mesh);
    }

    #[test]
    fn uniform_refinement_quadruples() {
        let mesh = lone_triangle();
        for fine in [refine_uniform(&mesh).unwrap(), refine_bisec3(&mesh).unwrap()] {
            assert_eq!(fine.num_triangles(), 4);
            assert_eq!(fine.num_vertices(), 6);
            assert!((fine.total_area() - 0.5).abs() < 1e-15);
            EdgeTopology::build(&fine).unwrap();
        }
    }

    #[test]
    fn red_children_are_similar() {
        let mesh = Mesh::new(vec![[0.0, 0.0], [2.0, 0.0], [0.5, 1.5]], vec![[0, 1, 2]]).unwrap();
        let fine = refine_uniform(&mesh).unwrap();
        for t in 0..4 {
            assert!((fine.signed_area(t) - mesh.signed_area(0) / 4.0).abs() < 1e-15);
        }
        assert!((fine.min_angle() - mesh.min_angle()).abs() < 1e-12);
    }

    #[test]
    fn closure_keeps_conformity() {
        // two triangles sharing the diagonal; marking one must not leave a hanging node
        let mesh = Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap();
        let fine = refine_nvb(&mesh, &[0]).unwrap();
        let fine = refine_nvb(&fine, &[0]).unwrap();
        let topo = EdgeTopology::build(&fine).unwrap();
        let nb = topo.num_edges() - topo.num_interior_edges();
        // no hanging nodes: boundary edge lengths add up to the perimeter
        let geom = super::super::Geometry::compute(&fine, &topo);
        let perimeter: f64 = (0..topo.num_edges())
            .filter(|&s| !topo.is_interior[s])
            .map(|s| geom.length[s])
            .sum();
        assert!((perimeter - 4.0).abs() < 1e-12, "{nb} boundary edges, perimeter {perimeter}");
    }
}
