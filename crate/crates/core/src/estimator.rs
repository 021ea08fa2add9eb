//! Residual a posteriori error estimator for quadratic elements and
//! Dörfler marking.
//!
//! For `k = 2` the discrete solution has piecewise constant Hessians, so
//! `Δ²u_IP` and the jumps of `∂_ν Δu_IP` vanish and
//!
//! ```text
//! η²(T) = |T|² ‖f‖²_{L²(T)}
//!       + Σ_{E ∈ ℰ(T)}     σ_E²/h_E ‖[∂_ν u_IP]_E‖²_{L²(E)}
//!       + Σ_{E ∈ ℰ(T)∩ℰ(Ω)} h_E ‖[∂²_νν u_IP]_E‖²_{L²(E)}
//! ```
//!
//! with `h_T⁴ = |T|²`, `‖f‖²_{L²(T)}` by the edge-midpoint rule, the
//! gradient jumps by Simpson's rule (exact) and the constant Hessian jumps
//! exactly. Every edge term is charged to all adjacent triangles.

use crate::assembly::Discretization;
use crate::mesh::{Mesh, BOUNDARY};
use crate::quadrature::SIMPSON;
use crate::{Error, Point, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorField {
    pub eta2: Vec<f64>,
    pub eta: f64,
}

pub fn estimate(
    mesh: &Mesh,
    disc: &Discretization,
    sigma: &[f64],
    u: &[f64],
    f: &dyn Fn(Point) -> f64,
) -> EstimatorField {
    let geom = &disc.geom;
    let mut eta2: Vec<f64> = (0..mesh.num_triangles())
        .map(|t| {
            let area = geom.area[t];
            let f2: f64 = disc.topo.edges_of_triangle[t]
                .iter()
                .map(|&s| f(geom.midpoint[s]).powi(2))
                .sum();
            area * area * area / 3.0 * f2
        })
        .collect();

    for s in 0..disc.topo.num_edges() {
        let patch = disc.patch(s);
        let local: Vec<f64> = patch.dofs.iter().map(|&g| u[g]).collect();
        let jump_at = |j: usize| -> f64 { local.iter().zip(&patch.jump[j]).map(|(c, v)| c * v).sum() };
        let mut term: f64 = sigma[s].powi(2) * (0..3).map(|j| SIMPSON[j] * jump_at(j).powi(2)).sum::<f64>();
        if patch.interior {
            let hess_jump: f64 = local
                .iter()
                .enumerate()
                .map(|(i, c)| c * (patch.binormal_plus[i] - patch.binormal_minus[i]))
                .sum();
            term += (patch.length * hess_jump).powi(2);
        }
        for &t in &disc.topo.triangles_of_edge[s] {
            if t != BOUNDARY {
                eta2[t] += term;
            }
        }
    }

    let eta = eta2.iter().sum::<f64>().sqrt();
    EstimatorField { eta2, eta }
}

/// Smallest set `M` with `Σ_{T∈M} η²(T) ≥ θ Σ_T η²(T)`, chosen greedily by
/// decreasing `η²(T)`, ties broken by the smaller index. Returned sorted.
pub fn dorfler_mark(eta2: &[f64], theta: f64) -> Result<Vec<usize>> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidParameter(format!("bulk parameter must lie in (0, 1], got {theta}")));
    }
    let mut order: Vec<usize> = (0..eta2.len()).collect();
    order.sort_by(|&a, &b| eta2[b].total_cmp(&eta2[a]).then(a.cmp(&b)));
    // summing in the same order makes θ = 1 reach the total exactly
    let total: f64 = order.iter().map(|&t| eta2[t]).sum();
    let mut marked = Vec::new();
    if total <= 0.0 {
        return Ok(marked);
    }
    let goal = theta * total;
    let mut sum = 0.0;
    for &t in &order {
        if sum >= goal {
            break;
        }
        sum += eta2[t];
        marked.push(t);
    }
    marked.sort_unstable();
    Ok(marked)
}
