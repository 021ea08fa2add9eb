//! Benchmark domains, exact solutions and the discrete energy error.
//!
//! The L-shape and cusp problems use the corner-singular solution
//! `u = (1 − x²)²(1 − y²)² r^{1+α} g_{α,ω}(φ − φ_s)`, differentiated with
//! [`Jet`] arithmetic to obtain `f = Δ²u`. The dumbbell-slit and four-slit
//! problems use `f ≡ 1` and have no known solution. The smooth square
//! problem `u = (x(1 − x)y(1 − y))²` is an extra polynomial test case.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::assembly::Discretization;
use crate::basis::Sym2;
use crate::jet::Jet;
use crate::mesh::Mesh;
use crate::quadrature::{to_physical, triangle_degree5, SIMPSON};
use crate::{Error, Point, Result};

pub const LSHAPE_ALPHA: f64 = 0.5444837;
pub const CUSP_ALPHA: f64 = 0.50500969;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
pub enum BenchmarkName {
    #[serde(rename = "lshape")]
    #[value(name = "lshape")]
    LShape,
    #[serde(rename = "cusp")]
    #[value(name = "cusp")]
    Cusp,
    #[serde(rename = "dumbbell")]
    #[value(name = "dumbbell")]
    Dumbbell,
    #[serde(rename = "fourslit")]
    #[value(name = "fourslit")]
    FourSlit,
    #[serde(rename = "square_smooth")]
    #[value(name = "square_smooth")]
    SquareSmooth,
}

impl BenchmarkName {
    pub const ALL: [BenchmarkName; 5] = [
        BenchmarkName::LShape,
        BenchmarkName::Cusp,
        BenchmarkName::Dumbbell,
        BenchmarkName::FourSlit,
        BenchmarkName::SquareSmooth,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BenchmarkName::LShape => "lshape",
            BenchmarkName::Cusp => "cusp",
            BenchmarkName::Dumbbell => "dumbbell",
            BenchmarkName::FourSlit => "fourslit",
            BenchmarkName::SquareSmooth => "square_smooth",
        }
    }
}

impl fmt::Display for BenchmarkName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BenchmarkName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BenchmarkName::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown benchmark '{s}'")))
    }
}

/// Which second bracket of the angular function to use.
///
/// `Symmetric` uses `sin((α−1)φ)/(α−1) − sin((α+1)φ)/(α+1)`, for which
/// `g(ω) = g'(ω) = 0` holds and `u` is clamped on the reentrant edges.
/// `Printed` uses `(α−1)` in both denominators of that bracket; the
/// resulting `u` does not vanish on the edge `φ − φ_s = ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GVariant {
    #[default]
    Symmetric,
    Printed,
}

/// The angular function `g_{α,ω}` applied to a jet.
pub fn g_alpha_omega(phi: &Jet, alpha: f64, omega: f64, variant: GVariant) -> Result<Jet> {
    if (alpha - 1.0).abs() < 1e-12 || (alpha + 1.0).abs() < 1e-12 {
        return Err(Error::InvalidParameter(format!("g is undefined for alpha = {alpha}")));
    }
    let (am, ap) = (alpha - 1.0, alpha + 1.0);
    let c1 = (am * omega).sin() / am - (ap * omega).sin() / ap;
    let c2 = (am * omega).cos() - (ap * omega).cos();
    let second_denominator = match variant {
        GVariant::Symmetric => ap,
        GVariant::Printed => am,
    };
    let first = (*phi * am).cos() - (*phi * ap).cos();
    let second = (*phi * am).sin() / am - (*phi * ap).sin() / second_denominator;
    Ok(first * c1 - second * c2)
}

/// Scalar `g_{α,ω}(φ)`.
pub fn g_value(phi: f64, alpha: f64, omega: f64, variant: GVariant) -> Result<f64> {
    Ok(g_alpha_omega(&Jet::var_x(phi), alpha, omega, variant)?.value())
}

/// `sin²(αω) − α² sin²(ω)`.
pub fn noncharacteristic_residual(alpha: f64, omega: f64) -> f64 {
    (alpha * omega).sin().powi(2) - alpha * alpha * omega.sin().powi(2)
}

/// Value and derivatives of an exact solution at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub value: f64,
    pub gradient: Point,
    pub hessian: Sym2,
    pub bilaplacian: f64,
}

impl From<Jet> for Derivatives {
    fn from(j: Jet) -> Self {
        Derivatives {
            value: j.value(),
            gradient: j.gradient(),
            hessian: j.hessian(),
            bilaplacian: j.bilaplacian(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactSolution {
    /// `(1 − x²)²(1 − y²)² r^{1+α} g_{α,ω}(φ − shift)`, with `φ` taken in
    /// `[shift, shift + 2π)`.
    Singular {
        alpha: f64,
        omega: f64,
        shift: f64,
        variant: GVariant,
    },
    /// `(x(1 − x)y(1 − y))²` on the unit square.
    Smooth,
}

impl ExactSolution {
    pub fn jet(&self, p: Point) -> Result<Jet> {
        let x = Jet::var_x(p[0]);
        let y = Jet::var_y(p[1]);
        match *self {
            ExactSolution::Singular {
                alpha,
                omega,
                shift,
                variant,
            } => {
                if p[0].hypot(p[1]) < 1e-300 {
                    return Err(Error::SingularPoint);
                }
                let cx = Jet::constant(1.0) - x * x;
                let cy = Jet::constant(1.0) - y * y;
                let cutoff = cx * cx * cy * cy;
                let radial = (x * x + y * y).powf(0.5 * (1.0 + alpha));
                let phi = Jet::polar_angle(&x, &y, shift);
                let g = g_alpha_omega(&(phi - shift), alpha, omega, variant)?;
                Ok(cutoff * radial * g)
            }
            ExactSolution::Smooth => {
                let px = x * x * (Jet::constant(1.0) - x) * (Jet::constant(1.0) - x);
                let py = y * y * (Jet::constant(1.0) - y) * (Jet::constant(1.0) - y);
                Ok(px * py)
            }
        }
    }

    pub fn eval(&self, p: Point) -> Result<Derivatives> {
        self.jet(p).map(Derivatives::from)
    }

    pub fn value(&self, p: Point) -> Result<f64> {
        Ok(self.jet(p)?.value())
    }

    /// `f = Δ²u`.
    pub fn rhs(&self, p: Point) -> Result<f64> {
        Ok(self.jet(p)?.bilaplacian())
    }
}

/// Closed-form `Δ²u` of the smooth square solution, `24p(y) + 2p''(x)p''(y) + 24p(x)`
/// with `p(t) = t²(1 − t)²`.
pub fn smooth_rhs_closed_form(p: Point) -> f64 {
    let q = |t: f64| t * t - 2.0 * t * t * t + t * t * t * t;
    let q2 = |t: f64| 2.0 - 12.0 * t + 12.0 * t * t;
    24.0 * q(p[1]) + 2.0 * q2(p[0]) * q2(p[1]) + 24.0 * q(p[0])
}

/// A benchmark problem: initial mesh, load and (optionally) exact solution.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub name: BenchmarkName,
    pub initial_mesh: Mesh,
    pub alpha: Option<f64>,
    pub omega: Option<f64>,
    pub exact: Option<ExactSolution>,
}

impl Benchmark {
    pub fn new(name: BenchmarkName, variant: GVariant) -> Self {
        let singular = |alpha: f64, omega: f64, shift: f64| ExactSolution::Singular {
            alpha,
            omega,
            shift,
            variant,
        };
        let (mesh, alpha, omega, exact) = match name {
            BenchmarkName::LShape => {
                let omega = 1.5 * PI;
                (lshape_mesh(), Some(LSHAPE_ALPHA), Some(omega), Some(singular(LSHAPE_ALPHA, omega, FRAC_PI_2)))
            }
            BenchmarkName::Cusp => {
                let omega = 1.75 * PI;
                (cusp_mesh(), Some(CUSP_ALPHA), Some(omega), Some(singular(CUSP_ALPHA, omega, FRAC_PI_4)))
            }
            BenchmarkName::Dumbbell => (dumbbell_mesh(), None, None, None),
            BenchmarkName::FourSlit => (fourslit_mesh(), None, None, None),
            BenchmarkName::SquareSmooth => (square_mesh(), None, None, Some(ExactSolution::Smooth)),
        };
        Benchmark {
            name,
            initial_mesh: mesh,
            alpha,
            omega,
            exact,
        }
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// The load `f`; `f ≡ 1` without an exact solution.
    pub fn rhs(&self, p: Point) -> f64 {
        match &self.exact {
            // quadrature points never hit the corner; map the error to NaN so it surfaces
            Some(u) => u.rhs(p).unwrap_or(f64::NAN),
            None => 1.0,
        }
    }
}

/// `(−1, 1)² \ [0, 1)²` with six triangles, diagonals through the origin.
pub fn lshape_mesh() -> Mesh {
    let coords = vec![
        [-1.0, -1.0],
        [0.0, -1.0],
        [1.0, -1.0],
        [1.0, 0.0],
        [0.0, 0.0],
        [-1.0, 0.0],
        [-1.0, 1.0],
        [0.0, 1.0],
    ];
    let triangles = vec![[0, 1, 4], [0, 4, 5], [1, 2, 4], [2, 3, 4], [5, 4, 6], [4, 7, 6]];
    Mesh::new(coords, triangles).expect("valid L-shape mesh")
}

/// `(−1, 1)² \ conv{(0,0), (1,0), (1,1)}`: the L-shape plus the triangle
/// `(0,0), (1,1), (0,1)`.
pub fn cusp_mesh() -> Mesh {
    let l = lshape_mesh();
    let mut coords = l.coords.clone();
    coords.push([1.0, 1.0]);
    let mut triangles = l.triangles.clone();
    triangles.push([4, 8, 7]);
    Mesh::new(coords, triangles).expect("valid cusp mesh")
}

/// Unit square split along the diagonal from (0,0) to (1,1).
pub fn square_mesh() -> Mesh {
    Mesh::new(
        vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        vec![[0, 1, 2], [0, 2, 3]],
    )
    .expect("valid square mesh")
}

/// Triangulates the cells of a tensor grid selected by `keep(centre)`.
/// `duplicate(point, centre)` selects the second copy of a slit vertex for
/// the cell with that centre.
fn grid_mesh(
    xs: &[f64],
    ys: &[f64],
    keep: impl Fn(Point) -> bool,
    duplicate: impl Fn(Point, Point) -> bool,
) -> Mesh {
    use std::collections::BTreeMap;
    let mut index: BTreeMap<(usize, usize, bool), usize> = BTreeMap::new();
    let mut coords: Vec<Point> = Vec::new();
    let mut triangles = Vec::new();
    for j in 0..ys.len() - 1 {
        for i in 0..xs.len() - 1 {
            let centre = [0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])];
            if !keep(centre) {
                continue;
            }
            let mut vertex = |a: usize, b: usize| {
                let p = [xs[a], ys[b]];
                let key = (a, b, duplicate(p, centre));
                *index.entry(key).or_insert_with(|| {
                    coords.push(p);
                    coords.len() - 1
                })
            };
            let v00 = vertex(i, j);
            let v10 = vertex(i + 1, j);
            let v11 = vertex(i + 1, j + 1);
            let v01 = vertex(i, j + 1);
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    Mesh::new(coords, triangles).expect("valid grid mesh")
}

/// Reconstruction of the dumbbell-slit domain
/// `((−1, 5) × (−1, 1) \ [1, 3] × [−0.75, 1)) \ (−1, 0] × {0}`.
pub fn dumbbell_mesh() -> Mesh {
    let mut xs = vec![-1.0, -0.5, 0.0, 0.5, 1.0];
    xs.extend((1..=8).map(|i| 1.0 + 0.25 * i as f64));
    xs.extend([3.5, 4.0, 4.5, 5.0]);
    let ys = [-1.0, -0.75, -0.5, 0.0, 0.5, 1.0];
    grid_mesh(
        &xs,
        &ys,
        |c| c[0] < 1.0 || c[0] > 3.0 || c[1] < -0.75,
        |p, c| p[1] == 0.0 && p[0] < 0.0 && c[1] > 0.0,
    )
}

/// Reconstruction of the four-slit domain: the square `(−1, 1)²` with a slit
/// of length 1/2 entering from the midpoint of every side.
pub fn fourslit_mesh() -> Mesh {
    let g = [-1.0, -0.5, 0.0, 0.5, 1.0];
    grid_mesh(
        &g,
        &g,
        |_| true,
        |p, c| {
            let horizontal = p[1] == 0.0 && p[0].abs() == 1.0 && c[1] > 0.0;
            let vertical = p[0] == 0.0 && p[1].abs() == 1.0 && c[0] > 0.0;
            horizontal || vertical
        },
    )
}

/// `‖u − u_IP‖_h`: the piecewise `H²` seminorm of the error by a degree-5
/// rule on every triangle, plus the penalty part `c_IP(u_IP, u_IP)` (the
/// normal-derivative jumps of the exact solution vanish).
pub fn energy_error(
    mesh: &Mesh,
    disc: &Discretization,
    sigma: &[f64],
    u_ip: &[f64],
    exact: &ExactSolution,
) -> Result<f64> {
    let rule = triangle_degree5();
    let mut sum = 0.0;
    for t in 0..mesh.num_triangles() {
        let g = disc.dofs.global4e[t];
        let mut h = [[0.0; 2]; 2];
        for (a, hess) in disc.elements[t].hessians.iter().enumerate() {
            for r in 0..2 {
                for c in 0..2 {
                    h[r][c] += u_ip[g[a]] * hess[r][c];
                }
            }
        }
        let verts = mesh.vertices_of(t);
        let area = disc.geom.area[t];
        for (lambda, w) in rule.iter() {
            let d = exact.eval(to_physical(&verts, *lambda))?;
            let mut e2 = 0.0;
            for r in 0..2 {
                for c in 0..2 {
                    e2 += (d.hessian[r][c] - h[r][c]).powi(2);
                }
            }
            sum += area * w * e2;
        }
    }
    for (s, &sig) in sigma.iter().enumerate() {
        let patch = disc.patch(s);
        for (j, w) in SIMPSON.iter().enumerate() {
            let jump: f64 = patch.dofs.iter().zip(&patch.jump[j]).map(|(&g, v)| u_ip[g] * v).sum();
            sum += sig * w * jump * jump;
        }
    }
    Ok(sum.sqrt())
}
