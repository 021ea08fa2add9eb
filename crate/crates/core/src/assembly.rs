//! Local element/edge matrices and global assembly of
//! `B = A − J − Jᵀ + C` and `N = A + C`.
//!
//! Degrees of freedom are the P2 Lagrange nodes: all vertices first, then
//! one midpoint per edge. Homogeneous clamped boundary conditions are imposed
//! by restricting to the interior dofs (interior vertices and midpoints of
//! interior edges).
//!
//! Edge matrices live on the edge patch `T₊ ∪ T₋`, whose nine nodes are
//! enumerated as
//!
//! ```text
//! Q₀ = P⁺_{q+1}, Q₁ = M⁺_q, Q₂ = P⁺_{q+2}         (on E)
//! Q₃ = M⁺_{q+1}, Q₄ = P⁺_q, Q₅ = M⁺_{q+2}         (T₊ only)
//! Q₆ = M⁻_{r+1}, Q₇ = P⁻_r, Q₈ = M⁻_{r+2}         (T₋ only)
//! ```
//!
//! with `q`, `r` the local positions of E in T₊ and T₋ (indices mod 3).
//! Boundary edges only have the first six nodes.

use crate::basis::{binormal, frobenius, P2ElementData};
use crate::linsolve::{SolverKind, SpdSolver};
use crate::mesh::{EdgeTopology, Geometry, Mesh};
use crate::quadrature::SIMPSON;
use crate::sparse::{norm2, CsrMatrix};
use crate::{Error, Point, Result};

/// Global numbering of the P2 degrees of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub num_vertices: usize,
    pub num_edges: usize,
    /// Dofs of `P₀, P₁, P₂, M₀, M₁, M₂` per triangle.
    pub global4e: Vec<[usize; 6]>,
    /// Sorted interior dofs `I(Ω)`.
    pub interior_dofs: Vec<usize>,
    pub is_interior: Vec<bool>,
}

impl DofMap {
    pub fn new(mesh: &Mesh, topo: &EdgeTopology) -> Self {
        let nv = mesh.num_vertices();
        let ne = topo.num_edges();
        let global4e = mesh
            .triangles
            .iter()
            .zip(&topo.edges_of_triangle)
            .map(|(t, s)| [t[0], t[1], t[2], nv + s[0], nv + s[1], nv + s[2]])
            .collect();
        let on_boundary = topo.boundary_vertices(nv);
        let mut is_interior = vec![false; nv + ne];
        for v in 0..nv {
            is_interior[v] = !on_boundary[v];
        }
        for s in 0..ne {
            is_interior[nv + s] = topo.is_interior[s];
        }
        let interior_dofs = (0..nv + ne).filter(|&i| is_interior[i]).collect();
        DofMap {
            num_vertices: nv,
            num_edges: ne,
            global4e,
            interior_dofs,
            is_interior,
        }
    }

    pub fn len(&self) -> usize {
        self.num_vertices + self.num_edges
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of interior dofs, the reported `ndof`.
    pub fn ndof(&self) -> usize {
        self.interior_dofs.len()
    }

    /// Nodal interpolation of `u` (values at vertices and edge midpoints).
    pub fn interpolate(&self, mesh: &Mesh, geom: &Geometry, u: impl Fn(Point) -> f64) -> Vec<f64> {
        mesh.coords.iter().map(|&p| u(p)).chain(geom.midpoint.iter().map(|&p| u(p))).collect()
    }
}

/// Position of the edge-patch node `Q_i` in T₊ (the first six) and in T₋.
///
/// Entry `i` of a column is the local node/shape index of `Q_i` in that
/// triangle; the T₊ column covers `Q₀..Q₅`, the T₋ column `Q₀..Q₂, Q₆..Q₈`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndArray {
    pub plus: [usize; 6],
    pub minus: [usize; 6],
}

impl IndArray {
    pub fn new(q: usize, r: usize) -> Self {
        let psi = |m: usize| m % 3;
        IndArray {
            plus: [psi(q + 1), 3 + q, psi(q + 2), 3 + psi(q + 1), q, 3 + psi(q + 2)],
            // on T₋ the edge is traversed in the opposite direction
            minus: [psi(r + 2), 3 + r, psi(r + 1), 3 + psi(r + 1), r, 3 + psi(r + 2)],
        }
    }

    /// Local index in T₋ of the patch node `Q_i`, if it belongs to T₋.
    pub fn minus_local(&self, i: usize) -> Option<usize> {
        match i {
            0..=2 => Some(self.minus[i]),
            6..=8 => Some(self.minus[i - 3]),
            _ => None,
        }
    }

    /// Local index in T₊ of the patch node `Q_i`, if it belongs to T₊.
    pub fn plus_local(&self, i: usize) -> Option<usize> {
        (i < 6).then(|| self.plus[i])
    }
}

/// Normal-derivative jumps and Hessian-binormal averages on one edge patch.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePatch {
    pub edge: usize,
    pub interior: bool,
    pub length: f64,
    pub normal: Point,
    /// Global dofs of `Q₀..Q₈` (six on boundary edges).
    pub dofs: Vec<usize>,
    /// `jump[j][α] = [∇φ_α(Q_j)·ν]_E` for the three edge nodes `Q₀, Q₁, Q₂`.
    pub jump: [[f64; 9]; 3],
    /// `⟨(D²φ_α ν)·ν⟩_E`; the plain trace on boundary edges.
    pub mean: [f64; 9],
    /// `(D²φ_α ν)·ν` from T₊ and from T₋, before averaging.
    pub binormal_plus: [f64; 9],
    pub binormal_minus: [f64; 9],
}

impl EdgePatch {
    pub fn new(topo: &EdgeTopology, geom: &Geometry, dofs: &DofMap, elements: &[P2ElementData], s: usize) -> Self {
        let [tp, tm] = topo.triangles_of_edge[s];
        let interior = topo.is_interior[s];
        let q = topo.local_pos[s][0] as usize;
        let r = topo.local_pos[s][1] as usize;
        let ind = IndArray::new(q, r);
        let nu = geom.normal[s];
        let count = if interior { 9 } else { 6 };

        let mut patch_dofs = Vec::with_capacity(count);
        for i in 0..count {
            patch_dofs.push(match ind.plus_local(i) {
                Some(l) => dofs.global4e[tp][l],
                None => dofs.global4e[tm][ind.minus_local(i).unwrap()],
            });
        }

        let mut jump = [[0.0; 9]; 3];
        let mut binormal_plus = [0.0; 9];
        let mut binormal_minus = [0.0; 9];
        let ep = &elements[tp];
        for i in 0..6 {
            let shape = ind.plus[i];
            binormal_plus[i] = binormal(&ep.hessians[shape], nu);
            for (j, row) in jump.iter_mut().enumerate() {
                let g = ep.grad_at_nodes[ind.plus[j]][shape];
                row[i] += g[0] * nu[0] + g[1] * nu[1];
            }
        }
        if interior {
            let em = &elements[tm];
            for i in [0, 1, 2, 6, 7, 8] {
                let shape = ind.minus_local(i).unwrap();
                binormal_minus[i] = binormal(&em.hessians[shape], nu);
                for (j, row) in jump.iter_mut().enumerate() {
                    let g = em.grad_at_nodes[ind.minus[j]][shape];
                    row[i] -= g[0] * nu[0] + g[1] * nu[1];
                }
            }
        }
        let mut mean = [0.0; 9];
        for i in 0..9 {
            mean[i] = if interior {
                0.5 * (binormal_plus[i] + binormal_minus[i])
            } else {
                binormal_plus[i]
            };
        }

        EdgePatch {
            edge: s,
            interior,
            length: geom.length[s],
            normal: nu,
            dofs: patch_dofs,
            jump,
            mean,
            binormal_plus,
            binormal_minus,
        }
    }

    pub fn len(&self) -> usize {
        self.dofs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dofs.is_empty()
    }
}

/// `A_αβ(T) = |T| D²φ_α : D²φ_β`.
pub fn local_stiffness(data: &P2ElementData, area: f64) -> [[f64; 6]; 6] {
    let mut a = [[0.0; 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            a[i][j] = area * frobenius(&data.hessians[i], &data.hessians[j]);
        }
    }
    a
}

/// Edge-midpoint rule: vertex entries vanish, `b₃₊ⱼ = |T|/3 · f(Mⱼ)`.
pub fn local_rhs(f_at_midpoints: [f64; 3], area: f64) -> [f64; 6] {
    let w = area / 3.0;
    [0.0, 0.0, 0.0, w * f_at_midpoints[0], w * f_at_midpoints[1], w * f_at_midpoints[2]]
}

/// `J_αβ(E) = h_E ⟨(D²φ_α ν)·ν⟩ [∇φ_β(Q₁)·ν]` (the jump is affine along E,
/// so the midpoint value integrates it exactly).
pub fn local_jump_matrix(patch: &EdgePatch) -> [[f64; 9]; 9] {
    let mut m = [[0.0; 9]; 9];
    for i in 0..9 {
        for j in 0..9 {
            m[i][j] = patch.length * patch.mean[i] * patch.jump[1][j];
        }
    }
    m
}

/// `C_αβ(E) = σ Σⱼ wⱼ [∇φ_α(Qⱼ)·ν][∇φ_β(Qⱼ)·ν]` with Simpson weights,
/// i.e. `σ/h_E ∫_E [∂_ν φ_α][∂_ν φ_β] ds` exactly.
pub fn local_penalty_matrix(patch: &EdgePatch, sigma: f64) -> [[f64; 9]; 9] {
    let mut m = [[0.0; 9]; 9];
    for i in 0..9 {
        for j in 0..9 {
            m[i][j] = sigma * (0..3).map(|k| SIMPSON[k] * patch.jump[k][i] * patch.jump[k][j]).sum::<f64>();
        }
    }
    m
}

/// Global matrices over all `N = |V| + |E|` dofs.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub stiffness: CsrMatrix,
    pub jump: CsrMatrix,
    pub penalty: CsrMatrix,
    /// `B = A − J − Jᵀ + C`.
    pub system: CsrMatrix,
    /// `N = A + C`.
    pub norm: CsrMatrix,
    pub load: Vec<f64>,
}

/// Everything derived from a mesh that assembly and post-processing need.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub topo: EdgeTopology,
    pub geom: Geometry,
    pub dofs: DofMap,
    pub elements: Vec<P2ElementData>,
}

impl Discretization {
    pub fn new(mesh: &Mesh) -> Result<Self> {
        let topo = EdgeTopology::build(mesh)?;
        let geom = Geometry::compute(mesh, &topo);
        let dofs = DofMap::new(mesh, &topo);
        let elements = element_data(mesh)?;
        Ok(Discretization {
            topo,
            geom,
            dofs,
            elements,
        })
    }

    pub fn patch(&self, s: usize) -> EdgePatch {
        EdgePatch::new(&self.topo, &self.geom, &self.dofs, &self.elements, s)
    }
}

pub fn element_data(mesh: &Mesh) -> Result<Vec<P2ElementData>> {
    (0..mesh.num_triangles())
        .map(|t| P2ElementData::new(mesh.vertices_of(t)).map_err(|_| Error::DegenerateTriangle(t)))
        .collect()
}

/// Assembles `A`, `J`, `C`, `B`, `N` and the load vector.
pub fn assemble(
    mesh: &Mesh,
    disc: &Discretization,
    sigma: &[f64],
    f: &dyn Fn(Point) -> f64,
) -> Result<AssembledSystem> {
    let dofs = &disc.dofs;
    let n = dofs.len();
    if sigma.len() != disc.topo.num_edges() {
        return Err(Error::InvalidParameter(format!(
            "{} penalty values for {} edges",
            sigma.len(),
            disc.topo.num_edges()
        )));
    }

    let mut a_trip = Vec::with_capacity(36 * mesh.num_triangles());
    let mut load = vec![0.0; n];
    for t in 0..mesh.num_triangles() {
        let area = disc.geom.area[t];
        let g = dofs.global4e[t];
        let local = local_stiffness(&disc.elements[t], area);
        for i in 0..6 {
            for j in 0..6 {
                a_trip.push((g[i], g[j], local[i][j]));
            }
        }
        let s4e = disc.topo.edges_of_triangle[t];
        let fm = [0, 1, 2].map(|j| f(disc.geom.midpoint[s4e[j]]));
        let b = local_rhs(fm, area);
        for i in 0..6 {
            load[g[i]] += b[i];
        }
    }

    let mut j_trip = Vec::with_capacity(81 * disc.topo.num_edges());
    let mut c_trip = Vec::with_capacity(81 * disc.topo.num_edges());
    for s in 0..disc.topo.num_edges() {
        let patch = disc.patch(s);
        let jm = local_jump_matrix(&patch);
        let cm = local_penalty_matrix(&patch, sigma[s]);
        for (i, &gi) in patch.dofs.iter().enumerate() {
            for (j, &gj) in patch.dofs.iter().enumerate() {
                j_trip.push((gi, gj, jm[i][j]));
                c_trip.push((gi, gj, cm[i][j]));
            }
        }
    }

    let stiffness = CsrMatrix::from_triplets(n, n, a_trip);
    let jump = CsrMatrix::from_triplets(n, n, j_trip);
    let penalty = CsrMatrix::from_triplets(n, n, c_trip);
    let jt = jump.transpose();
    let system = stiffness
        .linear_combination(1.0, &jump.linear_combination(1.0, &jt, 1.0), -1.0)
        .linear_combination(1.0, &penalty, 1.0);
    let norm = stiffness.linear_combination(1.0, &penalty, 1.0);
    Ok(AssembledSystem {
        stiffness,
        jump,
        penalty,
        system,
        norm,
        load,
    })
}

/// Restriction of the system to the interior dofs.
#[derive(Debug, Clone)]
pub struct RestrictedSystem {
    pub system: CsrMatrix,
    pub norm: CsrMatrix,
    pub load: Vec<f64>,
}

impl RestrictedSystem {
    pub fn new(sys: &AssembledSystem, dofs: &DofMap) -> Self {
        RestrictedSystem {
            system: sys.system.restrict(&dofs.interior_dofs),
            norm: sys.norm.restrict(&dofs.interior_dofs),
            load: dofs.interior_dofs.iter().map(|&i| sys.load[i]).collect(),
        }
    }
}

/// P2 coefficient vector over all dofs, zero on the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSolution {
    pub coefficients: Vec<f64>,
    /// `‖B_II x_I − b_I‖ / ‖b_I‖`.
    pub relative_residual: f64,
}

/// Solves `B_II x_I = b_I` with an existing factorization of `B_II`.
pub fn solve_restricted(restricted: &RestrictedSystem, solver: &SpdSolver, dofs: &DofMap) -> Result<DiscreteSolution> {
    let x_i = solver.solve(&restricted.load)?;
    let res: Vec<f64> = restricted
        .system
        .matvec(&x_i)
        .iter()
        .zip(&restricted.load)
        .map(|(ax, b)| ax - b)
        .collect();
    let bnorm = norm2(&restricted.load);
    let relative_residual = if bnorm > 0.0 { norm2(&res) / bnorm } else { norm2(&res) };
    let mut coefficients = vec![0.0; dofs.len()];
    for (k, &i) in dofs.interior_dofs.iter().enumerate() {
        coefficients[i] = x_i[k];
    }
    Ok(DiscreteSolution {
        coefficients,
        relative_residual,
    })
}

/// Restricts to `I(Ω)`, factorizes and solves.
pub fn restrict_and_solve(sys: &AssembledSystem, dofs: &DofMap, kind: SolverKind) -> Result<DiscreteSolution> {
    let restricted = RestrictedSystem::new(sys, dofs);
    if restricted.load.is_empty() {
        return Ok(DiscreteSolution {
            coefficients: vec![0.0; dofs.len()],
            relative_residual: 0.0,
        });
    }
    let solver = SpdSolver::new(&restricted.system, kind)?;
    solve_restricted(&restricted, &solver, dofs)
}
