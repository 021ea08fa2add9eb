//! Brute-force oracles shared by the integration tests and the acceptance
//! target. Nothing here uses the crate's basis, geometry or assembly code.
#![allow(dead_code)]

use c0ip::mesh::Mesh;
use c0ip::Point;

/// Dense `B = A − J − Jᵀ + C` and `N = A + C` over all P2 dofs.
pub struct DenseSystem {
    pub b: Vec<Vec<f64>>,
    pub n: Vec<Vec<f64>>,
    /// `∫ φ_j` (load vector for `f ≡ 1`).
    pub load_one: Vec<f64>,
}

/// Quadratic `c₀ + c₁x + c₂y + c₃x² + c₄xy + c₅y²`.
#[derive(Clone, Copy)]
struct Quadratic([f64; 6]);

impl Quadratic {
    fn value(&self, p: Point) -> f64 {
        let c = self.0;
        c[0] + c[1] * p[0] + c[2] * p[1] + c[3] * p[0] * p[0] + c[4] * p[0] * p[1] + c[5] * p[1] * p[1]
    }
    fn gradient(&self, p: Point) -> Point {
        let c = self.0;
        [c[1] + 2.0 * c[3] * p[0] + c[4] * p[1], c[2] + c[4] * p[0] + 2.0 * c[5] * p[1]]
    }
    fn hessian(&self) -> [[f64; 2]; 2] {
        let c = self.0;
        [[2.0 * c[3], c[4]], [c[4], 2.0 * c[5]]]
    }
}

fn monomials(p: Point) -> [f64; 6] {
    [1.0, p[0], p[1], p[0] * p[0], p[0] * p[1], p[1] * p[1]]
}

/// Solves `M X = I` by Gaussian elimination with partial pivoting.
fn invert6(mut m: [[f64; 6]; 6]) -> [[f64; 6]; 6] {
    let mut inv = [[0.0; 6]; 6];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..6 {
        let piv = (col..6).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, piv);
        inv.swap(col, piv);
        let d = m[col][col];
        assert!(d.abs() > 1e-14, "singular Vandermonde matrix");
        for k in 0..6 {
            m[col][k] /= d;
            inv[col][k] /= d;
        }
        for r in 0..6 {
            if r != col {
                let f = m[r][col];
                for k in 0..6 {
                    m[r][k] -= f * m[col][k];
                    inv[r][k] -= f * inv[col][k];
                }
            }
        }
    }
    inv
}

fn midpoint(a: Point, b: Point) -> Point {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

fn area(p: &[Point; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1])).abs()
}

/// Lexicographically sorted edge list; edge `s` owns dof `nv + s`.
pub fn sorted_edges(mesh: &Mesh) -> Vec<[usize; 2]> {
    let mut edges: Vec<[usize; 2]> = mesh
        .triangles
        .iter()
        .flat_map(|t| [[t[0], t[1]], [t[1], t[2]], [t[2], t[0]]])
        .map(|[a, b]| [a.min(b), a.max(b)])
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

struct Element {
    /// Global dof of each local node (3 vertices, then the midpoints of
    /// edges v0v1, v1v2, v2v0).
    dofs: [usize; 6],
    basis: [Quadratic; 6],
    vertices: [Point; 3],
    area: f64,
}

impl Element {
    fn basis_of(&self, dof: usize) -> Option<Quadratic> {
        self.dofs.iter().position(|&d| d == dof).map(|i| self.basis[i])
    }
}

fn elements(mesh: &Mesh, edges: &[[usize; 2]]) -> Vec<Element> {
    let nv = mesh.coords.len();
    let edge_dof = |a: usize, b: usize| nv + edges.binary_search(&[a.min(b), a.max(b)]).unwrap();
    mesh.triangles
        .iter()
        .map(|&[i, j, k]| {
            let v = [mesh.coords[i], mesh.coords[j], mesh.coords[k]];
            let nodes = [v[0], v[1], v[2], midpoint(v[0], v[1]), midpoint(v[1], v[2]), midpoint(v[2], v[0])];
            let mut vander = [[0.0; 6]; 6];
            for (r, p) in nodes.iter().enumerate() {
                vander[r] = monomials(*p);
            }
            // column q of V⁻¹ holds the coefficients of the basis function of node q
            let inv = invert6(vander);
            let basis = std::array::from_fn(|q| Quadratic(std::array::from_fn(|c| inv[c][q])));
            Element {
                dofs: [i, j, k, edge_dof(i, j), edge_dof(j, k), edge_dof(k, i)],
                basis,
                vertices: v,
                area: area(&v),
            }
        })
        .collect()
}

/// Three-point Gauss–Legendre rule on `[0, 1]`.
fn gauss3() -> [(f64, f64); 3] {
    let d = 0.5 * (3.0f64 / 5.0).sqrt();
    [(0.5 - d, 5.0 / 18.0), (0.5, 8.0 / 18.0), (0.5 + d, 5.0 / 18.0)]
}

/// Degree-2 triangle rule (edge midpoints, equal weights) for `∫ φ`.
fn integrate_on(el: &Element, q: &Quadratic) -> f64 {
    let v = el.vertices;
    let mids = [midpoint(v[0], v[1]), midpoint(v[1], v[2]), midpoint(v[2], v[0])];
    el.area * mids.iter().map(|&p| q.value(p)).sum::<f64>() / 3.0
}

/// Assembles the interior penalty system with prefactor `a` and degree 2 by
/// evaluating every integral of the bilinear form directly.
pub fn brute_force_system(mesh: &Mesh, a: f64) -> DenseSystem {
    let edges = sorted_edges(mesh);
    let els = elements(mesh, &edges);
    let ndof = mesh.coords.len() + edges.len();
    let mut amat = vec![vec![0.0; ndof]; ndof];
    let mut jmat = vec![vec![0.0; ndof]; ndof];
    let mut cmat = vec![vec![0.0; ndof]; ndof];
    let mut load_one = vec![0.0; ndof];

    for el in &els {
        for (i, &gi) in el.dofs.iter().enumerate() {
            load_one[gi] += integrate_on(el, &el.basis[i]);
            let hi = el.basis[i].hessian();
            for (j, &gj) in el.dofs.iter().enumerate() {
                let hj = el.basis[j].hessian();
                let mut frob = 0.0;
                for r in 0..2 {
                    for c in 0..2 {
                        frob += hi[r][c] * hj[r][c];
                    }
                }
                amat[gi][gj] += el.area * frob;
            }
        }
    }

    for &[p, q] in &edges {
        let adjacent: Vec<&Element> = els.iter().filter(|e| e.dofs.contains(&p) && e.dofs.contains(&q)).collect();
        let (pp, pq) = (mesh.coords[p], mesh.coords[q]);
        let h = (pq[0] - pp[0]).hypot(pq[1] - pp[1]);
        let mut nu = [(pq[1] - pp[1]) / h, -(pq[0] - pp[0]) / h];
        let t1 = adjacent[0];
        let centroid = [
            (t1.vertices[0][0] + t1.vertices[1][0] + t1.vertices[2][0]) / 3.0,
            (t1.vertices[0][1] + t1.vertices[1][1] + t1.vertices[2][1]) / 3.0,
        ];
        if nu[0] * (centroid[0] - pp[0]) + nu[1] * (centroid[1] - pp[1]) > 0.0 {
            nu = [-nu[0], -nu[1]];
        }
        let sigma = match adjacent.len() {
            1 => 3.0 * a * h * h / adjacent[0].area,
            2 => 0.75 * a * h * h * (1.0 / adjacent[0].area + 1.0 / adjacent[1].area),
            n => panic!("edge with {n} triangles"),
        };
        let patch: Vec<usize> = {
            let mut d: Vec<usize> = adjacent.iter().flat_map(|e| e.dofs).collect();
            d.sort_unstable();
            d.dedup();
            d
        };
        // side factors: ν-derivatives are taken with ν outward of T1
        let sides: Vec<(f64, &Element)> = adjacent.iter().enumerate().map(|(k, e)| (if k == 0 { 1.0 } else { -1.0 }, *e)).collect();
        let jump = |dof: usize, x: Point| -> f64 {
            sides
                .iter()
                .filter_map(|(s, e)| e.basis_of(dof).map(|b| s * (b.gradient(x)[0] * nu[0] + b.gradient(x)[1] * nu[1])))
                .sum()
        };
        let mean = |dof: usize| -> f64 {
            sides
                .iter()
                .filter_map(|(_, e)| {
                    e.basis_of(dof).map(|b| {
                        let hb = b.hessian();
                        nu[0] * (hb[0][0] * nu[0] + hb[0][1] * nu[1]) + nu[1] * (hb[1][0] * nu[0] + hb[1][1] * nu[1])
                    })
                })
                .sum::<f64>()
                / sides.len() as f64
        };
        for &(s, w) in &gauss3() {
            let x = [pp[0] + s * (pq[0] - pp[0]), pp[1] + s * (pq[1] - pp[1])];
            for &gi in &patch {
                let (mi, ji) = (mean(gi), jump(gi, x));
                for &gj in &patch {
                    let jj = jump(gj, x);
                    jmat[gi][gj] += h * w * mi * jj;
                    cmat[gi][gj] += sigma / h * h * w * ji * jj;
                }
            }
        }
    }

    let b = (0..ndof)
        .map(|i| (0..ndof).map(|j| amat[i][j] - jmat[i][j] - jmat[j][i] + cmat[i][j]).collect())
        .collect();
    let n = (0..ndof).map(|i| (0..ndof).map(|j| amat[i][j] + cmat[i][j]).collect()).collect();
    DenseSystem { b, n, load_one }
}

/// `max |x − y| / max |y|` over all entries.
pub fn relative_max_difference(x: &[Vec<f64>], y: &[Vec<f64>]) -> f64 {
    let scale = y.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = x
        .iter()
        .flatten()
        .zip(y.iter().flatten())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    diff / scale
}

/// The fixed set of meshes with at most four triangles.
pub fn small_meshes() -> Vec<(&'static str, Mesh)> {
    let m = |coords: Vec<Point>, tris: Vec<[usize; 3]>| Mesh::new(coords, tris).unwrap();
    vec![
        ("reference triangle", m(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]])),
        ("scalene triangle", m(vec![[0.1, -0.2], [1.3, 0.4], [0.2, 0.9]], vec![[0, 1, 2]])),
        (
            "two-triangle square",
            m(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], vec![[0, 1, 2], [0, 2, 3]]),
        ),
        (
            "three-triangle fan",
            m(
                vec![[0.0, 0.0], [1.0, 0.1], [0.4, 0.9], [-0.7, 0.6], [-0.9, -0.5]],
                vec![[0, 1, 2], [0, 2, 3], [0, 3, 4]],
            ),
        ),
        (
            "four-triangle star",
            m(
                vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.5], [0.0, 1.5], [1.1, 0.7]],
                vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]],
            ),
        ),
        (
            "four-triangle strip",
            m(
                vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.2], [0.1, 1.0], [1.2, 1.1], [2.1, 0.9]],
                vec![[0, 1, 4], [0, 4, 3], [1, 2, 5], [1, 5, 4]],
            ),
        ),
    ]
}

/// Smallest cardinality of a subset carrying a `theta` share of `Σ eta2`,
/// by enumeration of all subsets.
pub fn brute_force_min_marking(eta2: &[f64], theta: f64) -> usize {
    let n = eta2.len();
    let total: f64 = eta2.iter().sum();
    (0u32..1 << n)
        .filter(|mask| {
            let s: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| eta2[i]).sum();
            s >= theta * total * (1.0 - 1e-12)
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap()
}
