//! Minimal 2-vector / 2x2 matrix arithmetic with closed-form matrix
//! exponentials, sized for the group and flow formulas of this crate.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

/// A point or vector of the plane factor of the group.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, rhs: Vec2) -> f64 {
        self.x * rhs.x + self.y * rhs.y
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Counter-clockwise quarter turn: (x, y) -> (-y, x).
    ///
    /// This single orientation is fixed once and used by the group product,
    /// the bracket and the coset projection alike.
    pub fn rot90(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

/// Row-major 2x2 real matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2 { a: 0.0, b: 0.0, c: 0.0, d: 0.0 };
    pub const IDENTITY: Mat2 = Mat2 { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn diag(a: f64, d: f64) -> Self {
        Mat2::new(a, 0.0, 0.0, d)
    }

    pub fn trace(self) -> f64 {
        self.a + self.d
    }

    pub fn det(self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn transpose(self) -> Mat2 {
        Mat2::new(self.a, self.c, self.b, self.d)
    }

    pub fn mul_vec(self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    pub fn scale(self, k: f64) -> Mat2 {
        Mat2::new(self.a * k, self.b * k, self.c * k, self.d * k)
    }

    pub fn mul(self, rhs: Mat2) -> Mat2 {
        Mat2::new(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }

    /// e^{tau * M}, closed form.
    ///
    /// Split M = mu*I + N with mu = tr/2; N is traceless, so N^2 = delta*I
    /// with delta = mu^2 - det M, and the exponential reduces to the scalar
    /// pair cosh/sinhc evaluated on delta*tau^2 (series below 1e-4 to cover
    /// the repeated-eigenvalue limit without a branch error).
    pub fn exp_scaled(self, tau: f64) -> Mat2 {
        let mu = self.trace() / 2.0;
        let n = self - Mat2::IDENTITY.scale(mu);
        let delta = mu * mu - self.det();
        let y = delta * tau * tau;
        let (c, s) = cosh_sinhc(y);
        let e = (mu * tau).exp();
        (Mat2::IDENTITY.scale(c) + n.scale(tau * s)).scale(e)
    }

    /// Integral of e^{s*M} for s from 0 to tau, closed form.
    ///
    /// Evaluated spectrally: with eigenvalues x1, x2 of M the entire function
    /// g(x) = (e^{tau x} - 1)/x gives g(M) = gbar*I + gdiff*N, where gbar and
    /// gdiff are the symmetric value and divided difference of g at x1, x2.
    /// Complex eigenvalues are handled with complex scalars; the nearly
    /// repeated case falls back to g(mu)*I + g'(mu)*N.
    pub fn integral_exp(self, tau: f64) -> Mat2 {
        let mu = self.trace() / 2.0;
        let n = self - Mat2::IDENTITY.scale(mu);
        let delta = mu * mu - self.det();
        let root = Complex64::new(delta, 0.0).sqrt();
        let sep = 2.0 * root.norm() * tau.abs();
        if sep < 1e-5 {
            let g = g_scalar(mu, tau);
            let gp = g_prime_scalar(mu, tau);
            Mat2::IDENTITY.scale(g) + n.scale(gp)
        } else {
            let x1 = Complex64::new(mu, 0.0) + root;
            let x2 = Complex64::new(mu, 0.0) - root;
            let g1 = g_complex(x1, tau);
            let g2 = g_complex(x2, tau);
            let gbar = (g1 + g2) / 2.0;
            let gdiff = (g1 - g2) / (x1 - x2);
            Mat2::IDENTITY.scale(gbar.re) + n.scale(gdiff.re)
        }
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        Mat2::new(self.a + rhs.a, self.b + rhs.b, self.c + rhs.c, self.d + rhs.d)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        Mat2::new(self.a - rhs.a, self.b - rhs.b, self.c - rhs.c, self.d - rhs.d)
    }
}

/// cosh(sqrt(y)) and sinh(sqrt(y))/sqrt(y) as entire functions of y,
/// valid for either sign of y.
fn cosh_sinhc(y: f64) -> (f64, f64) {
    if y.abs() < 1e-4 {
        let c = 1.0 + y / 2.0 + y * y / 24.0 + y * y * y / 720.0;
        let s = 1.0 + y / 6.0 + y * y / 120.0 + y * y * y / 5040.0;
        (c, s)
    } else if y > 0.0 {
        let r = y.sqrt();
        (r.cosh(), r.sinh() / r)
    } else {
        let r = (-y).sqrt();
        (r.cos(), r.sin() / r)
    }
}

/// (e^{tau x} - 1) / x for real x, series near the removable singularity.
fn g_scalar(x: f64, tau: f64) -> f64 {
    let u = tau * x;
    if u.abs() < 1e-4 {
        tau * (1.0 + u / 2.0 + u * u / 6.0 + u * u * u / 24.0 + u * u * u * u / 120.0)
    } else {
        u.exp_m1() / x
    }
}

/// d/dx of (e^{tau x} - 1)/x for real x.
fn g_prime_scalar(x: f64, tau: f64) -> f64 {
    let u = tau * x;
    if u.abs() < 1e-4 {
        tau * tau
            * (0.5 + u / 3.0 + u * u / 8.0 + u * u * u / 30.0 + u * u * u * u / 144.0)
    } else {
        let e = u.exp();
        (u * e - (e - 1.0)) / (x * x)
    }
}

/// (e^{tau x} - 1) / x for complex x.
fn g_complex(x: Complex64, tau: f64) -> Complex64 {
    let u = x * tau;
    if u.norm() < 1e-4 {
        (Complex64::new(1.0, 0.0) + u / 2.0 + u * u / 6.0 + u * u * u / 24.0) * tau
    } else {
        (u.exp() - 1.0) / x
    }
}
