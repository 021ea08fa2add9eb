//! Bivariate truncated Taylor polynomials of total degree 4.
//!
//! A [`Jet`] stores `c[i][j] = ∂ˣⁱ∂ʸʲ f / (i! j!)` at a base point for
//! `i + j ≤ 4`, which is enough for values through the bilaplacian.
//! Elementary functions are applied by composing with their univariate
//! Taylor expansion.

use std::ops::{Add, Div, Mul, Neg, Sub};

pub const ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c: [[f64; ORDER + 1]; ORDER + 1],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [[0.0; ORDER + 1]; ORDER + 1];
        c[0][0] = v;
        Jet { c }
    }

    /// The coordinate function `x` expanded at `x₀`.
    pub fn var_x(x0: f64) -> Self {
        let mut j = Jet::constant(x0);
        j.c[1][0] = 1.0;
        j
    }

    /// The coordinate function `y` expanded at `y₀`.
    pub fn var_y(y0: f64) -> Self {
        let mut j = Jet::constant(y0);
        j.c[0][1] = 1.0;
        j
    }

    pub fn value(&self) -> f64 {
        self.c[0][0]
    }

    pub fn gradient(&self) -> [f64; 2] {
        [self.c[1][0], self.c[0][1]]
    }

    pub fn hessian(&self) -> [[f64; 2]; 2] {
        [[2.0 * self.c[2][0], self.c[1][1]], [self.c[1][1], 2.0 * self.c[0][2]]]
    }

    /// `∂ˣⁱ∂ʸʲ f` at the base point.
    pub fn derivative(&self, i: usize, j: usize) -> f64 {
        self.c[i][j] * factorial(i) * factorial(j)
    }

    /// `Δ²f = f_xxxx + 2 f_xxyy + f_yyyy`.
    pub fn bilaplacian(&self) -> f64 {
        24.0 * self.c[4][0] + 8.0 * self.c[2][2] + 24.0 * self.c[0][4]
    }

    fn scale(mut self, s: f64) -> Self {
        for row in &mut self.c {
            for v in row {
                *v *= s;
            }
        }
        self
    }

    /// `Σₙ tₙ (self − self₀)ⁿ` for the Taylor coefficients `t` of a
    /// univariate function at `self₀`.
    pub fn compose(&self, t: [f64; ORDER + 1]) -> Self {
        let mut h = *self;
        h.c[0][0] = 0.0;
        let mut out = Jet::constant(t[0]);
        let mut power = Jet::constant(1.0);
        for &tn in &t[1..] {
            power = power * h;
            out = out + power.scale(tn);
        }
        out
    }

    pub fn recip(&self) -> Self {
        let x = self.value();
        let mut t = [0.0; ORDER + 1];
        let mut p = 1.0 / x;
        for (n, tn) in t.iter_mut().enumerate() {
            *tn = if n % 2 == 0 { p } else { -p };
            p /= x;
        }
        self.compose(t)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s / 2.0, -c / 6.0, s / 24.0])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c / 2.0, s / 6.0, c / 24.0])
    }

    /// `selfᵖ` for a positive base value.
    pub fn powf(&self, p: f64) -> Self {
        let x = self.value();
        let mut t = [0.0; ORDER + 1];
        let mut coeff = 1.0;
        for (n, tn) in t.iter_mut().enumerate() {
            *tn = coeff * x.powf(p - n as f64);
            coeff *= (p - n as f64) / (n as f64 + 1.0);
        }
        self.compose(t)
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    pub fn atan(&self) -> Self {
        let x = self.value();
        let q = 1.0 / (1.0 + x * x);
        self.compose([
            x.atan(),
            q,
            -x * q * q,
            (3.0 * x * x - 1.0) / 3.0 * q * q * q,
            -x * (x * x - 1.0) * q * q * q * q,
        ])
    }

    /// Polar angle of `(x, y)` with the base value chosen in
    /// `[branch_start, branch_start + 2π)`.
    pub fn polar_angle(x: &Jet, y: &Jet, branch_start: f64) -> Self {
        let (x0, y0) = (x.value(), y.value());
        let mut phi0 = y0.atan2(x0);
        let tau = std::f64::consts::TAU;
        while phi0 < branch_start {
            phi0 += tau;
        }
        while phi0 >= branch_start + tau {
            phi0 -= tau;
        }
        // tan(φ − φ₀) = (x₀y − y₀x)/(x₀x + y₀y)
        let num = *y * x0 - *x * y0;
        let den = *x * x0 + *y * y0;
        (num / den).atan() + phi0
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        for i in 0..=ORDER {
            for j in 0..=ORDER - i {
                self.c[i][j] += rhs.c[i][j];
            }
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = Jet::constant(0.0);
        for i in 0..=ORDER {
            for j in 0..=ORDER - i {
                let a = self.c[i][j];
                if a == 0.0 {
                    continue;
                }
                for k in 0..=ORDER - i - j {
                    for l in 0..=ORDER - i - j - k {
                        out.c[i + k][j + l] += a * rhs.c[k][l];
                    }
                }
            }
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0][0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, rhs: f64) -> Jet {
        self + (-rhs)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self.scale(1.0 / rhs)
    }
}
