//! Quadrature rules on triangles and intervals.

use crate::Point;

/// A point in barycentric coordinates with its weight (weights sum to 1).
pub type BaryWeight = ([f64; 3], f64);

/// Symmetric 7-point rule, exact for polynomials of degree 5.
pub fn triangle_degree5() -> [BaryWeight; 7] {
    let s15 = 15f64.sqrt();
    let a1 = (6.0 - s15) / 21.0;
    let b1 = (9.0 + 2.0 * s15) / 21.0;
    let a2 = (6.0 + s15) / 21.0;
    let b2 = (9.0 - 2.0 * s15) / 21.0;
    let w1 = (155.0 - s15) / 1200.0;
    let w2 = (155.0 + s15) / 1200.0;
    let third = 1.0 / 3.0;
    [
        ([third, third, third], 9.0 / 40.0),
        ([b1, a1, a1], w1),
        ([a1, b1, a1], w1),
        ([a1, a1, b1], w1),
        ([b2, a2, a2], w2),
        ([a2, b2, a2], w2),
        ([a2, a2, b2], w2),
    ]
}

/// Simpson weights for the endpoints and the midpoint of an interval.
pub const SIMPSON: [f64; 3] = [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0];

/// Gauss–Legendre nodes and weights on [0, 1] (weights sum to 1).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n > 0);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Newton iteration on P_n from the Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Conical-product rule on a triangle with `n²` points, exact for degree `2n − 2`.
pub fn triangle_conical(n: usize) -> Vec<BaryWeight> {
    let g = gauss_legendre(n);
    let mut out = Vec::with_capacity(n * n);
    for &(u, wu) in &g {
        for &(v, wv) in &g {
            // Duffy map (u, v) ↦ (u, (1 − u) v), Jacobian (1 − u), reference area ½
            let l1 = u;
            let l2 = (1.0 - u) * v;
            out.push(([1.0 - l1 - l2, l1, l2], 2.0 * wu * wv * (1.0 - u)));
        }
    }
    out
}

/// Maps barycentric coordinates to a physical point.
pub fn to_physical(vertices: &[Point; 3], lambda: [f64; 3]) -> Point {
    [
        lambda[0] * vertices[0][0] + lambda[1] * vertices[1][0] + lambda[2] * vertices[2][0],
        lambda[0] * vertices[0][1] + lambda[1] * vertices[1][1] + lambda[2] * vertices[2][1],
    ]
}
