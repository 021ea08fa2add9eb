//! Quadratic Lagrange shape functions on a triangle.
//!
//! With barycentric coordinates λ₁, λ₂, λ₃ of the vertices P₁, P₂, P₃ the
//! shape functions are φⱼ = λⱼ(2λⱼ − 1) for the vertices and
//! φ₃₊ⱼ = 4λₖλₗ for the midpoint Mⱼ of the edge opposite Pⱼ. Local node
//! order is P₁, P₂, P₃, M₁, M₂, M₃ (0-based here). By duality, node `n` is the
//! interpolation node of shape function `n`.

use crate::{Error, Point, Result};

/// A symmetric 2×2 matrix stored row-major.
pub type Sym2 = [[f64; 2]; 2];

/// Barycentric coordinates of the six local nodes.
pub const NODE_BARYCENTRIC: [[f64; 3]; 6] = [
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [0.0, 0.5, 0.5],
    [0.5, 0.0, 0.5],
    [0.5, 0.5, 0.0],
];

/// Per-triangle derivative data of the six P2 shape functions.
#[derive(Debug, Clone, PartialEq)]
pub struct P2ElementData {
    pub grad_lambda: [Point; 3],
    /// `grad_at_nodes[node][shape]` is ∇φ_shape evaluated at local node `node`.
    pub grad_at_nodes: [[Point; 6]; 6],
    pub hessians: [Sym2; 6],
}

impl P2ElementData {
    pub fn new(vertices: [Point; 3]) -> Result<Self> {
        let grad_lambda = barycentric_gradients(vertices)?;
        Ok(P2ElementData {
            grad_at_nodes: p2_gradients_at_nodes(&grad_lambda),
            hessians: p2_hessians(&grad_lambda),
            grad_lambda,
        })
    }
}

/// Solves `[1 1 1; P₁ P₂ P₃] [∇λ₁ᵀ; ∇λ₂ᵀ; ∇λ₃ᵀ] = [0 0; 1 0; 0 1]` by Cramer's rule.
pub fn barycentric_gradients(vertices: [Point; 3]) -> Result<[Point; 3]> {
    let [p1, p2, p3] = vertices;
    let det = (p2[0] - p1[0]) * (p3[1] - p1[1]) - (p3[0] - p1[0]) * (p2[1] - p1[1]);
    let scale = [
        (p2[0] - p1[0]).hypot(p2[1] - p1[1]),
        (p3[0] - p2[0]).hypot(p3[1] - p2[1]),
        (p1[0] - p3[0]).hypot(p1[1] - p3[1]),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if !(det.abs() > 1e-14 * scale * scale) {
        return Err(Error::DegenerateTriangle(0));
    }
    let grad = |a: Point, b: Point| [(a[1] - b[1]) / det, (b[0] - a[0]) / det];
    Ok([grad(p2, p3), grad(p3, p1), grad(p1, p2)])
}

/// Gradients of the six shape functions at barycentric point `lambda`.
pub fn p2_gradients_at(grad_lambda: &[Point; 3], lambda: [f64; 3]) -> [Point; 6] {
    let mut out = [[0.0; 2]; 6];
    for j in 0..3 {
        let (k, l) = ((j + 1) % 3, (j + 2) % 3);
        let c = 4.0 * lambda[j] - 1.0;
        out[j] = [c * grad_lambda[j][0], c * grad_lambda[j][1]];
        out[3 + j] = [
            4.0 * (lambda[k] * grad_lambda[l][0] + lambda[l] * grad_lambda[k][0]),
            4.0 * (lambda[k] * grad_lambda[l][1] + lambda[l] * grad_lambda[k][1]),
        ];
    }
    out
}

/// Gradients of φ₁..φ₆ at the nodes P₁..P₃, M₁..M₃.
pub fn p2_gradients_at_nodes(grad_lambda: &[Point; 3]) -> [[Point; 6]; 6] {
    NODE_BARYCENTRIC.map(|lambda| p2_gradients_at(grad_lambda, lambda))
}

/// Constant Hessians D²φⱼ = 4∇λⱼ⊗∇λⱼ and D²φ₃₊ⱼ = 4(∇λₖ⊗∇λₗ + ∇λₗ⊗∇λₖ).
pub fn p2_hessians(grad_lambda: &[Point; 3]) -> [Sym2; 6] {
    let outer = |a: Point, b: Point| [[a[0] * b[0], a[0] * b[1]], [a[1] * b[0], a[1] * b[1]]];
    let mut out = [[[0.0; 2]; 2]; 6];
    for j in 0..3 {
        let (k, l) = ((j + 1) % 3, (j + 2) % 3);
        let jj = outer(grad_lambda[j], grad_lambda[j]);
        let kl = outer(grad_lambda[k], grad_lambda[l]);
        let lk = outer(grad_lambda[l], grad_lambda[k]);
        for r in 0..2 {
            for c in 0..2 {
                out[j][r][c] = 4.0 * jj[r][c];
                out[3 + j][r][c] = 4.0 * (kl[r][c] + lk[r][c]);
            }
        }
    }
    out
}

/// Values of the six shape functions at barycentric point `lambda`.
pub fn p2_values_at(lambda: [f64; 3]) -> [f64; 6] {
    let mut out = [0.0; 6];
    for j in 0..3 {
        let (k, l) = ((j + 1) % 3, (j + 2) % 3);
        out[j] = lambda[j] * (2.0 * lambda[j] - 1.0);
        out[3 + j] = 4.0 * lambda[k] * lambda[l];
    }
    out
}

/// Frobenius product A : B.
pub fn frobenius(a: &Sym2, b: &Sym2) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

/// (H ν)·ν.
pub fn binormal(h: &Sym2, nu: Point) -> f64 {
    nu[0] * (h[0][0] * nu[0] + h[0][1] * nu[1]) + nu[1] * (h[1][0] * nu[0] + h[1][1] * nu[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const REF: [Point; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

    #[test]
    fn reference_barycentric_gradients() {
        let g = barycentric_gradients(REF).unwrap();
        assert_eq!(g, [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn scaled_reference_gradients() {
        let g = barycentric_gradients([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]]).unwrap();
        assert_eq!(g[1], [0.5, 0.0]);
    }

    #[test]
    fn degenerate_triangle_is_rejected() {
        assert!(barycentric_gradients([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).is_err());
    }

    #[test]
    fn gradients_at_nodes_reference() {
        let data = P2ElementData::new(REF).unwrap();
        // ∇φ₁(P₁) = 3∇λ₁
        assert_eq!(data.grad_at_nodes[0][0], [-3.0, -3.0]);
        // ∇φ₄(P₁) = 0
        assert_eq!(data.grad_at_nodes[0][3], [0.0, 0.0]);
        let sum = data.grad_at_nodes[4].iter().fold([0.0, 0.0], |a, g| [a[0] + g[0], a[1] + g[1]]);
        assert_abs_diff_eq!(sum[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sum[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn gradient_table_matches_closed_form() {
        let tri = [[0.3, -0.2], [1.7, 0.4], [0.1, 1.3]];
        let g = barycentric_gradients(tri).unwrap();
        let nodes = p2_gradients_at_nodes(&g);
        let scale = |c: f64, v: Point| [c * v[0], c * v[1]];
        let add = |a: Point, b: Point| [a[0] + b[0], a[1] + b[1]];
        for j in 0..3 {
            let (k, l) = ((j + 1) % 3, (j + 2) % 3);
            let expected = [
                (j, j, scale(3.0, g[j])),
                (k, j, scale(-1.0, g[j])),
                (3 + j, j, scale(-1.0, g[j])),
                (3 + k, j, g[j]),
                (j, 3 + j, [0.0, 0.0]),
                (k, 3 + j, scale(4.0, g[l])),
                (3 + j, 3 + j, scale(2.0, add(g[k], g[l]))),
                (3 + k, 3 + j, scale(2.0, g[k])),
            ];
            for (node, shape, value) in expected {
                let got = nodes[node][shape];
                assert_abs_diff_eq!(got[0], value[0], epsilon = 1e-13);
                assert_abs_diff_eq!(got[1], value[1], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn reference_hessians() {
        let h = p2_hessians(&barycentric_gradients(REF).unwrap());
        assert_eq!(h[1], [[4.0, 0.0], [0.0, 0.0]]);
        assert_eq!(h[0], [[4.0, 4.0], [4.0, 4.0]]);
        let mut sum = [[0.0; 2]; 2];
        for m in &h {
            for r in 0..2 {
                for c in 0..2 {
                    sum[r][c] += m[r][c];
                }
            }
        }
        assert_eq!(sum, [[0.0; 2]; 2]);
    }

    #[test]
    fn duality() {
        for (n, &lambda) in NODE_BARYCENTRIC.iter().enumerate() {
            let values = p2_values_at(lambda);
            for (shape, v) in values.iter().enumerate() {
                let expected = if shape == n { 1.0 } else { 0.0 };
                assert_eq!(*v, expected);
            }
        }
    }
}
