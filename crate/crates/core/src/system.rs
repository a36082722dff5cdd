//! From an invariant generator pair on the group to the induced planar
//! system: invariance test, projection, rank condition, case classification,
//! and normal forms with their conjugating maps.

use crate::heisenberg::{AlgebraElement, DerivationMatrix};
use crate::{Error, Result};

/// The seven scalars of the induced planar system
///
/// ```text
///   s' = beta*s + w*b
///   t' = (lambda+beta)*t + alpha*s^2/2 + gamma*s + w*(c + a*s)
/// ```
///
/// subject to `alpha = 0` whenever `gamma != 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lambda: f64,
}

impl SystemParams {
    pub fn new(a: f64, b: f64, c: f64, alpha: f64, beta: f64, gamma: f64, lambda: f64) -> Result<Self> {
        let p = SystemParams { a, b, c, alpha, beta, gamma, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha != 0.0 && self.gamma != 0.0 {
            return Err(Error::Constraint(
                "alpha and gamma cannot both be nonzero".into(),
            ));
        }
        let all = [self.a, self.b, self.c, self.alpha, self.beta, self.gamma, self.lambda];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::Constraint("parameters must be finite".into()));
        }
        Ok(())
    }
}

/// Compact control range [w-, w+] with 0 in its interior.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlRange {
    pub omega_minus: f64,
    pub omega_plus: f64,
}

impl ControlRange {
    pub fn new(omega_minus: f64, omega_plus: f64) -> Result<Self> {
        if !(omega_minus < 0.0 && 0.0 < omega_plus) {
            return Err(Error::Constraint(
                "control range must satisfy omega_minus < 0 < omega_plus".into(),
            ));
        }
        Ok(ControlRange { omega_minus, omega_plus })
    }

    pub fn contains(&self, w: f64) -> bool {
        self.omega_minus <= w && w <= self.omega_plus
    }

    /// Largest symmetric slack: min(-w-, w+).
    pub fn symmetric_radius(&self) -> f64 {
        (-self.omega_minus).min(self.omega_plus)
    }
}

/// Exhaustive, mutually exclusive classification of the parameter space.
/// Degeneracy of the drift (beta*(lambda+beta) = 0) is decided first; the
/// remaining tags split the degenerate set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseTag {
    /// alpha = 0, beta = 0, lambda = 0
    Flat,
    /// alpha = 0, beta = 0, lambda != 0
    Contracting,
    /// alpha = 0, beta != 0, lambda = -beta
    Band,
    /// alpha != 0, lambda = beta = 0
    Quadratic,
    /// alpha != 0, lambda != beta: a shear removes the quadratic term
    Reducible,
    /// beta*(lambda+beta) != 0, out of scope
    NonSingular,
}

/// Which closed subgroups stay invariant under the flow of a derivation.
/// `LineTimesLattice` subsumes `Line` (it adds the condition beta = -lambda).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvarianceKind {
    InvariantLine,
    InvariantLineTimesZ,
    Neither,
}

/// Invertible polynomial change of coordinates of the restricted shape
///
/// ```text
///   (s, t) -> (p*s, q*s + k*s^2 + r*t),    p != 0, r != 0,
/// ```
///
/// which is closed under composition and inversion; every conjugation used
/// by the normal forms lives in this family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolyMap2 {
    pub p: f64,
    pub q: f64,
    pub k: f64,
    pub r: f64,
}

impl PolyMap2 {
    pub fn identity() -> Self {
        PolyMap2 { p: 1.0, q: 0.0, k: 0.0, r: 1.0 }
    }

    pub fn new(p: f64, q: f64, k: f64, r: f64) -> Result<Self> {
        if p == 0.0 || r == 0.0 {
            return Err(Error::Constraint("coordinate map must be invertible".into()));
        }
        Ok(PolyMap2 { p, q, k, r })
    }

    pub fn forward(&self, s: f64, t: f64) -> (f64, f64) {
        (self.p * s, self.q * s + self.k * s * s + self.r * t)
    }

    pub fn inverse(&self) -> PolyMap2 {
        PolyMap2 {
            p: 1.0 / self.p,
            q: -self.q / (self.p * self.r),
            k: -self.k / (self.p * self.p * self.r),
            r: 1.0 / self.r,
        }
    }

    pub fn backward(&self, s: f64, t: f64) -> (f64, f64) {
        let inv = self.inverse();
        inv.forward(s, t)
    }

    /// Composition: apply `self` first, then `next`.
    pub fn then(&self, next: &PolyMap2) -> PolyMap2 {
        PolyMap2 {
            p: next.p * self.p,
            q: next.q * self.p + next.r * self.q,
            k: next.r * self.k + next.k * self.p * self.p,
            r: next.r * self.r,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == PolyMap2::identity()
    }
}

/// Decide which of the two non-normal subgroups (the horizontal line, or the
/// line times the integer lattice in the center) is invariant under the flow.
///
/// The line R*e1 x {0} is invariant iff A is upper triangular with eta along
/// e2, and the off-diagonal entry vanishes whenever eta does not; the lattice
/// variant additionally needs the diagonal to be (lambda, -lambda).
pub fn invariance_check(d: &DerivationMatrix) -> InvarianceKind {
    let a = d.a;
    let line = a.c == 0.0 && d.eta.x == 0.0 && (a.b == 0.0 || d.eta.y == 0.0);
    if !line {
        return InvarianceKind::Neither;
    }
    if a.d == -a.a {
        InvarianceKind::InvariantLineTimesZ
    } else {
        InvarianceKind::InvariantLine
    }
}

/// Project the pair (linear field, invariant field) through the coset map
/// pi((x, y), z) = (y, z + x*y/2) and read off the planar coefficients.
pub fn induce_system(d: &DerivationMatrix, b: &AlgebraElement) -> Result<SystemParams> {
    if invariance_check(d) == InvarianceKind::Neither {
        return Err(Error::NotInvariant);
    }
    SystemParams::new(
        b.zeta.x,
        b.zeta.y,
        b.alpha,
        d.a.b,
        d.a.d,
        d.eta.y,
        d.a.a,
    )
}

/// Value of the rank-condition expression b*((b*alpha + a*(lambda-beta))^2 +
/// (b*gamma + c*lambda)^2); the condition holds iff it is nonzero.
pub fn larc_value(p: &SystemParams) -> f64 {
    let u = p.b * p.alpha + p.a * (p.lambda - p.beta);
    let v = p.b * p.gamma + p.c * p.lambda;
    p.b * (u * u + v * v)
}

/// Rank condition, exact comparison: the inputs are user-given scalars.
pub fn larc(p: &SystemParams) -> bool {
    larc_value(p) != 0.0
}

pub fn classify_case(p: &SystemParams) -> CaseTag {
    if p.beta * (p.lambda + p.beta) != 0.0 {
        return CaseTag::NonSingular;
    }
    if p.alpha == 0.0 {
        if p.beta == 0.0 {
            if p.lambda == 0.0 {
                CaseTag::Flat
            } else {
                CaseTag::Contracting
            }
        } else {
            // degeneracy forces lambda = -beta here
            CaseTag::Band
        }
    } else if p.lambda == 0.0 && p.beta == 0.0 {
        CaseTag::Quadratic
    } else {
        // alpha != 0 and lambda != beta (lambda = beta != 0 is non-degenerate)
        CaseTag::Reducible
    }
}

/// Bring the system to the normal form of its case and return the
/// conjugating coordinate map together with the final tag.
///
/// Target shapes (in the returned parameters):
/// - Flat: unchanged dynamics, sign-normalized so b > 0 and gamma > 0.
/// - Contracting: b = 1, gamma = 0, a >= 0.
/// - Band: b = -beta, c = 0 with gamma > 0 when gamma != 0, else a >= 0.
/// - Quadratic: c = 0.
/// - Reducible: the quadratic term is sheared away first, then the
///   resulting Contracting or Band branch is normalized.
///
/// Сomposed sign reflections act on the state only, so the signs of lambda
/// and beta are invariants and are returned as given.
pub fn normal_form(p: &SystemParams, w: &ControlRange) -> Result<(SystemParams, PolyMap2, CaseTag)> {
    p.validate()?;
    w.contains(0.0); // range validated on construction
    let tag = classify_case(p);
    match tag {
        CaseTag::NonSingular => Err(Error::UnsupportedCase(tag)),
        CaseTag::Flat => {
            if !larc(p) {
                return Err(Error::LarcViolated);
            }
            // b' = es*b, gamma' = es*et*gamma, a' = es*et*a, c' = et*c
            let es = p.b.signum();
            let et = (p.gamma * p.b).signum();
            let m = PolyMap2::new(es, 0.0, 0.0, et)?;
            let np = SystemParams::new(es * et * p.a, es * p.b, et * p.c, 0.0, 0.0, es * et * p.gamma, 0.0)?;
            Ok((np, m, CaseTag::Flat))
        }
        CaseTag::Contracting => {
            if !larc(p) {
                return Err(Error::LarcViolated);
            }
            // (s, t) -> (s/b, t + (gamma/lambda) s) gives b = 1, gamma = 0
            let m1 = PolyMap2::new(1.0 / p.b, p.gamma / p.lambda, 0.0, 1.0)?;
            let a1 = p.a * p.b;
            let c1 = p.c + p.gamma * p.b / p.lambda;
            let (m, a2, c2) = if a1 < 0.0 {
                (m1.then(&PolyMap2::new(1.0, 0.0, 0.0, -1.0)?), -a1, -c1)
            } else {
                (m1, a1, c1)
            };
            let np = SystemParams::new(a2, 1.0, c2, 0.0, 0.0, 0.0, p.lambda)?;
            Ok((np, m, CaseTag::Contracting))
        }
        CaseTag::Band => {
            if !larc(p) {
                return Err(Error::LarcViolated);
            }
            // (s, t) -> (-beta*s/b, -(c/b)*s + t) kills the constant control
            // term and puts the horizontal part in relaxation shape.
            let m1 = PolyMap2::new(-p.beta / p.b, -p.c / p.b, 0.0, 1.0)?;
            let a1 = -p.a * p.b / p.beta;
            let g1 = p.c - p.gamma * p.b / p.beta;
            let flip = if g1 != 0.0 { g1 < 0.0 } else { a1 < 0.0 };
            let (m, a2, g2) = if flip {
                (m1.then(&PolyMap2::new(1.0, 0.0, 0.0, -1.0)?), -a1, -g1)
            } else {
                (m1, a1, g1)
            };
            let np = SystemParams::new(a2, -p.beta, 0.0, 0.0, p.beta, g2, p.lambda)?;
            Ok((np, m, CaseTag::Band))
        }
        CaseTag::Quadratic => {
            // c != 0 needs the shear (s, t - (c/b) s), hence b != 0, which is
            // exactly the rank condition of this branch; c = 0 needs nothing.
            if p.c != 0.0 {
                if !larc(p) {
                    return Err(Error::LarcViolated);
                }
                let m = PolyMap2::new(1.0, -p.c / p.b, 0.0, 1.0)?;
                let np = SystemParams::new(p.a, p.b, 0.0, p.alpha, 0.0, 0.0, 0.0)?;
                Ok((np, m, CaseTag::Quadratic))
            } else {
                let np = *p;
                Ok((np, PolyMap2::identity(), CaseTag::Quadratic))
            }
        }
        CaseTag::Reducible => {
            if !larc(p) {
                return Err(Error::LarcViolated);
            }
            // shear away the quadratic term, then normalize the residual case
            let k = p.alpha / (2.0 * (p.lambda - p.beta));
            let m1 = PolyMap2::new(1.0, 0.0, k, 1.0)?;
            let p1 = SystemParams::new(
                p.a + p.alpha * p.b / (p.lambda - p.beta),
                p.b,
                p.c,
                0.0,
                p.beta,
                p.gamma,
                p.lambda,
            )?;
            let (np, m2, tag2) = normal_form(&p1, w)?;
            Ok((np, m1.then(&m2), tag2))
        }
    }
}
