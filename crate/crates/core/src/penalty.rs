//! Edge-local penalty parameters.
//!
//! The penalty on an edge is built from one contribution per adjacent cell,
//! each of the form `c · h_E² / |T|`, where `c` depends only on the prefactor
//! `a` and the polynomial degree. The result is dimensionless and needs no
//! tuning beyond `a > 1`, which guarantees a stability constant of at least
//! `κ = 1 − 1/√a`.

use crate::mesh::{EdgeTopology, Geometry};
use crate::{Error, Result};

/// Global penalty settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyConfig {
    /// Prefactor; `a > 1` guarantees stability, `a = 1` is accepted but flagged.
    pub a: f64,
    /// Polynomial degree, at least 2.
    pub k: u32,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        PenaltyConfig { a: 2.0, k: 2 }
    }
}

/// Per-edge penalties together with the guaranteed stability constant.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyField {
    pub sigma: Vec<f64>,
    /// `1 − 1/√a`.
    pub kappa: f64,
    /// Set when `a ≤ 1`, for which the stability estimate is not guaranteed.
    pub unjustified: bool,
}

/// One edge of a rectangular mesh, for [`sigma_rectangle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectangleEdge {
    pub length: f64,
    pub area_plus: f64,
    /// `None` for boundary edges.
    pub area_minus: Option<f64>,
}

pub fn kappa(a: f64) -> f64 {
    1.0 - 1.0 / a.sqrt()
}

fn check_a(a: f64) -> Result<bool> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::InvalidPenalty(format!("prefactor a must be positive, got {a}")));
    }
    let unjustified = a <= 1.0;
    if unjustified {
        log::warn!("penalty prefactor a = {a} <= 1: stability is not guaranteed");
    }
    Ok(unjustified)
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidPenalty(format!("polynomial degree must be at least 2, got {k}")));
    }
    Ok(())
}

fn field(sigma: Vec<f64>, a: f64, unjustified: bool) -> PenaltyField {
    PenaltyField {
        sigma,
        kappa: kappa(a),
        unjustified,
    }
}

/// Penalty for a triangulation with uniform degree `k`:
/// interior `3ak(k−1)h²/8 · (1/|T₊| + 1/|T₋|)`, boundary `3ak(k−1)h²/(2|T₊|)`.
pub fn sigma_triangle(cfg: &PenaltyConfig, geom: &Geometry, topo: &EdgeTopology) -> Result<PenaltyField> {
    check_k(cfg.k)?;
    let degrees = vec![cfg.k; geom.area.len()];
    sigma_variable_degree(cfg.a, &degrees, geom, topo)
}

/// Penalty with a degree `k_T` per triangle: each adjacent triangle
/// contributes `3a k_T(k_T−1) h²/(8|T|)`, and a boundary edge counts its
/// single triangle four times.
pub fn sigma_variable_degree(
    a: f64,
    degrees: &[u32],
    geom: &Geometry,
    topo: &EdgeTopology,
) -> Result<PenaltyField> {
    let unjustified = check_a(a)?;
    if degrees.len() != geom.area.len() {
        return Err(Error::InvalidPenalty(format!(
            "{} degrees given for {} triangles",
            degrees.len(),
            geom.area.len()
        )));
    }
    for &k in degrees {
        check_k(k)?;
    }
    let contribution = |t: usize| {
        let k = degrees[t] as f64;
        k * (k - 1.0) / geom.area[t]
    };
    let sigma = (0..topo.num_edges())
        .map(|s| {
            let [tp, tm] = topo.triangles_of_edge[s];
            let h2 = geom.length[s] * geom.length[s];
            if topo.is_interior[s] {
                3.0 * a * h2 / 8.0 * (contribution(tp) + contribution(tm))
            } else {
                3.0 * a * h2 / 2.0 * contribution(tp)
            }
        })
        .collect();
    Ok(field(sigma, a, unjustified))
}

/// Penalty for axis-aligned rectangles of degree `k` (tensor-product
/// polynomials): interior `a(k−1)²h²(1/|T₊| + 1/|T₋|)`, boundary `4a(k−1)²h²/|T₊|`.
pub fn sigma_rectangle(cfg: &PenaltyConfig, edges: &[RectangleEdge]) -> Result<PenaltyField> {
    let unjustified = check_a(cfg.a)?;
    check_k(cfg.k)?;
    let c = cfg.a * ((cfg.k - 1) as f64).powi(2);
    let mut sigma = Vec::with_capacity(edges.len());
    for (s, e) in edges.iter().enumerate() {
        let areas_ok = e.area_plus > 0.0 && e.area_minus.map_or(true, |m| m > 0.0);
        if !areas_ok || !(e.length > 0.0) {
            return Err(Error::InvalidPenalty(format!("rectangle edge {s} has non-positive size")));
        }
        let h2 = e.length * e.length;
        sigma.push(match e.area_minus {
            Some(m) => c * h2 * (1.0 / e.area_plus + 1.0 / m),
            None => 4.0 * c * h2 / e.area_plus,
        });
    }
    Ok(field(sigma, cfg.a, unjustified))
}
