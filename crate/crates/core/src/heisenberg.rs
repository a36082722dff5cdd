//! The 3-d nilpotent group on R^2 x R with twisted product, its algebra,
//! derivations, automorphisms, and the flows of linear vector fields.

use crate::mat2::{Mat2, Vec2};

/// Group element (v, z) with product
/// (v1, z1) * (v2, z2) = (v1 + v2, z1 + z2 + <v1, rot90(v2)>/2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement {
    pub v: Vec2,
    pub z: f64,
}

impl GroupElement {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        GroupElement { v: Vec2::new(x, y), z }
    }

    pub fn identity() -> Self {
        GroupElement { v: Vec2::ZERO, z: 0.0 }
    }

    /// Inverse; the group is 2-step nilpotent so it is plain negation.
    pub fn inverse(self) -> Self {
        GroupElement { v: -self.v, z: -self.z }
    }
}

/// Algebra element (zeta, alpha) with bracket
/// [(z1, a1), (z2, a2)] = (0, <z1, rot90(z2)>).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgebraElement {
    pub zeta: Vec2,
    pub alpha: f64,
}

impl AlgebraElement {
    pub fn new(x: f64, y: f64, alpha: f64) -> Self {
        AlgebraElement { zeta: Vec2::new(x, y), alpha }
    }

    pub fn zero() -> Self {
        AlgebraElement { zeta: Vec2::ZERO, alpha: 0.0 }
    }
}

pub fn group_mul(g1: GroupElement, g2: GroupElement) -> GroupElement {
    GroupElement {
        v: g1.v + g2.v,
        z: g1.z + g2.z + 0.5 * g1.v.dot(g2.v.rot90()),
    }
}

pub fn lie_bracket(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement {
    AlgebraElement {
        zeta: Vec2::ZERO,
        alpha: x.zeta.dot(y.zeta.rot90()),
    }
}

/// A 3x3 block matrix [[A, 0], [eta^T, corner]] acting on the algebra.
///
/// With `corner = tr A` this is a derivation of the bracket (the canonical
/// constructor); `with_corner` admits arbitrary corners so that the failure
/// of the derivation identity, and of the flow automorphism property, can be
/// exhibited for wrong corners.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivationMatrix {
    pub a: Mat2,
    pub eta: Vec2,
    pub corner: f64,
}

impl DerivationMatrix {
    pub fn new(a: Mat2, eta: Vec2) -> Self {
        DerivationMatrix { a, eta, corner: a.trace() }
    }

    pub fn with_corner(a: Mat2, eta: Vec2, corner: f64) -> Self {
        DerivationMatrix { a, eta, corner }
    }

    /// Apply the matrix to an algebra element.
    pub fn apply(&self, x: AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            zeta: self.a.mul_vec(x.zeta),
            alpha: self.eta.dot(x.zeta) + self.corner * x.alpha,
        }
    }

    /// Check D[X,Y] = [DX,Y] + [X,DY] on the standard basis pairs.
    pub fn is_derivation(&self, tol: f64) -> bool {
        let basis = [
            AlgebraElement::new(1.0, 0.0, 0.0),
            AlgebraElement::new(0.0, 1.0, 0.0),
            AlgebraElement::new(0.0, 0.0, 1.0),
        ];
        for x in basis {
            for y in basis {
                let lhs = self.apply(lie_bracket(x, y));
                let rhs = lie_bracket(self.apply(x), y);
                let rhs2 = lie_bracket(x, self.apply(y));
                let d = Vec2::new(
                    lhs.zeta.x - rhs.zeta.x - rhs2.zeta.x,
                    lhs.zeta.y - rhs.zeta.y - rhs2.zeta.y,
                );
                let da = lhs.alpha - rhs.alpha - rhs2.alpha;
                if d.norm() > tol || da.abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// The linear vector field the matrix induces on the group:
    /// (v, z) -> (A v, <eta, v> + corner * z).
    pub fn field(&self, g: GroupElement) -> (Vec2, f64) {
        (self.a.mul_vec(g.v), self.eta.dot(g.v) + self.corner * g.z)
    }
}

/// Automorphism (v, z) -> (P v, <eta, v> + det(P) z); requires det P != 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AutomorphismMatrix {
    pub p: Mat2,
    pub eta: Vec2,
}

impl AutomorphismMatrix {
    pub fn new(p: Mat2, eta: Vec2) -> Result<Self, crate::Error> {
        if p.det() == 0.0 {
            return Err(crate::Error::Constraint("automorphism block must be invertible".into()));
        }
        Ok(AutomorphismMatrix { p, eta })
    }

    pub fn apply(&self, g: GroupElement) -> GroupElement {
        GroupElement {
            v: self.p.mul_vec(g.v),
            z: self.eta.dot(g.v) + self.p.det() * g.z,
        }
    }
}

/// Integral of e^{s B^T} eta for s from 0 to tau.
pub fn lambda_op(b: Mat2, eta: Vec2, tau: f64) -> Vec2 {
    b.transpose().integral_exp(tau).mul_vec(eta)
}

/// Time-tau flow of the linear vector field of `d`:
/// (e^{tau A} v, <e^{tau c} Lambda_tau^{A - c I} eta, v> + z e^{tau c}).
pub fn linear_flow(d: &DerivationMatrix, g: GroupElement, tau: f64) -> GroupElement {
    let c = d.corner;
    let ecz = (tau * c).exp();
    let b = d.a - Mat2::IDENTITY.scale(c);
    let lam = lambda_op(b, d.eta, tau) * ecz;
    GroupElement {
        v: d.a.exp_scaled(tau).mul_vec(g.v),
        z: lam.dot(g.v) + g.z * ecz,
    }
}

/// True iff the time-tau flow respects the product on every sample pair.
pub fn flow_automorphism_check(
    d: &DerivationMatrix,
    tau: f64,
    samples: &[(GroupElement, GroupElement)],
    tol: f64,
) -> bool {
    for &(g1, g2) in samples {
        let lhs = linear_flow(d, group_mul(g1, g2), tau);
        let rhs = group_mul(linear_flow(d, g1, tau), linear_flow(d, g2, tau));
        let dv = lhs.v - rhs.v;
        if dv.norm() > tol || (lhs.z - rhs.z).abs() > tol {
            return false;
        }
    }
    true
}
