//! Shared oracles for the integration suites. Everything here is kept
//! independent of the closed-form implementation paths it cross-checks.

#![allow(dead_code)]

use hlcs_core::flows::State;
use hlcs_core::system::SystemParams;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Dense bivariate polynomial in (s, t), exact coefficient arithmetic on a
/// fixed monomial grid. Degrees stay tiny here (the fields are quadratic and
/// brackets lose a degree per slot), so a 8x8 grid is plenty.
#[derive(Clone, Copy, Debug)]
pub struct Poly2 {
    pub c: [[f64; 8]; 8], // c[i][j] multiplies s^i t^j
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2 { c: [[0.0; 8]; 8] }
    }

    pub fn constant(v: f64) -> Self {
        let mut p = Poly2::zero();
        p.c[0][0] = v;
        p
    }

    pub fn mono(i: usize, j: usize, v: f64) -> Self {
        let mut p = Poly2::zero();
        p.c[i][j] = v;
        p
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for i in 0..8 {
            for j in 0..8 {
                out.c[i][j] = self.c[i][j] + other.c[i][j];
            }
        }
        out
    }

    pub fn sub(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for i in 0..8 {
            for j in 0..8 {
                out.c[i][j] = self.c[i][j] - other.c[i][j];
            }
        }
        out
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for i in 0..8 {
            for j in 0..8 {
                if self.c[i][j] == 0.0 {
                    continue;
                }
                for k in 0..8 - i {
                    for l in 0..8 - j {
                        out.c[i + k][j + l] += self.c[i][j] * other.c[k][l];
                    }
                }
            }
        }
        out
    }

    pub fn d_s(&self) -> Poly2 {
        let mut out = Poly2::zero();
        for i in 1..8 {
            for j in 0..8 {
                out.c[i - 1][j] = self.c[i][j] * i as f64;
            }
        }
        out
    }

    pub fn d_t(&self) -> Poly2 {
        let mut out = Poly2::zero();
        for i in 0..8 {
            for j in 1..8 {
                out.c[i][j - 1] = self.c[i][j] * j as f64;
            }
        }
        out
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        let mut acc = 0.0;
        for i in (0..8).rev() {
            let mut row = 0.0;
            for j in (0..8).rev() {
                row = row * t + self.c[i][j];
            }
            acc = acc * s + row;
        }
        acc
    }
}

/// Planar polynomial vector field.
#[derive(Clone, Copy, Debug)]
pub struct PolyField {
    pub fs: Poly2,
    pub ft: Poly2,
}

impl PolyField {
    /// Exact Lie bracket [f, g] = Dg f - Df g.
    pub fn bracket(&self, other: &PolyField) -> PolyField {
        let dg_f_s = other.fs.d_s().mul(&self.fs).add(&other.fs.d_t().mul(&self.ft));
        let dg_f_t = other.ft.d_s().mul(&self.fs).add(&other.ft.d_t().mul(&self.ft));
        let df_g_s = self.fs.d_s().mul(&other.fs).add(&self.fs.d_t().mul(&other.ft));
        let df_g_t = self.ft.d_s().mul(&other.fs).add(&self.ft.d_t().mul(&other.ft));
        PolyField {
            fs: dg_f_s.sub(&df_g_s),
            ft: dg_f_t.sub(&df_g_t),
        }
    }

    pub fn eval(&self, s: f64, t: f64) -> (f64, f64) {
        (self.fs.eval(s, t), self.ft.eval(s, t))
    }
}

/// Drift field of the planar system as an exact polynomial pair.
pub fn drift_field(p: &SystemParams) -> PolyField {
    // (beta s, (lambda+beta) t + alpha/2 s^2 + gamma s)
    PolyField {
        fs: Poly2::mono(1, 0, p.beta),
        ft: Poly2::mono(0, 1, p.lambda + p.beta)
            .add(&Poly2::mono(2, 0, 0.5 * p.alpha))
            .add(&Poly2::mono(1, 0, p.gamma)),
    }
}

/// Control field of the planar system.
pub fn control_field(p: &SystemParams) -> PolyField {
    // (b, c + a s)
    PolyField {
        fs: Poly2::constant(p.b),
        ft: Poly2::constant(p.c).add(&Poly2::mono(1, 0, p.a)),
    }
}

/// Independent rank-condition oracle: generate the bracket closure of the
/// drift and control fields up to word length four (exact polynomial
/// arithmetic), then demand pointwise rank two at generic sample states and
/// on the locus where the two base fields are parallel, where degeneracy, if
/// any, must show up.
pub fn larc_oracle(p: &SystemParams, rng: &mut ChaCha8Rng) -> bool {
    let x = drift_field(p);
    let b = control_field(p);
    let xb = x.bracket(&b);
    let mut fields = vec![x, b, xb];
    let depth3: Vec<PolyField> = vec![xb.bracket(&x), xb.bracket(&b)];
    for f in &depth3 {
        fields.push(*f);
        fields.push(f.bracket(&x));
        fields.push(f.bracket(&b));
    }

    let mut states: Vec<(f64, f64)> = (0..5)
        .map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
        .collect();
    states.extend(parallel_locus_states(p, rng));

    states.iter().all(|&(s, t)| {
        let vals: Vec<(f64, f64)> = fields.iter().map(|f| f.eval(s, t)).collect();
        let mut best: f64 = 0.0;
        for i in 0..vals.len() {
            for j in i + 1..vals.len() {
                best = best.max((vals[i].0 * vals[j].1 - vals[i].1 * vals[j].0).abs());
            }
        }
        best > 1e-9
    })
}

/// States where det(drift, control) vanishes: the only places the base pair
/// can lose rank, so the oracle must probe them.
fn parallel_locus_states(p: &SystemParams, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    // det = beta s (c + a s) - b ((lambda+beta) t + alpha/2 s^2 + gamma s)
    let mut out = Vec::new();
    let tcoef = -p.b * (p.lambda + p.beta);
    if tcoef != 0.0 {
        for _ in 0..3 {
            let s: f64 = rng.gen_range(-3.0..3.0);
            let rest = p.beta * s * (p.c + p.a * s) - p.b * (0.5 * p.alpha * s * s + p.gamma * s);
            out.push((s, -rest / tcoef));
        }
    } else {
        // det is a polynomial in s alone: probe its roots at random heights
        let c2 = p.beta * p.a - 0.5 * p.b * p.alpha;
        let c1 = p.beta * p.c - p.b * p.gamma;
        let roots: Vec<f64> = if c2 != 0.0 {
            let disc = c1 * c1;
            let _ = disc;
            vec![0.0, -c1 / c2]
        } else {
            vec![0.0]
        };
        for r in roots {
            out.push((r, rng.gen_range(-3.0..3.0)));
            out.push((r, rng.gen_range(-3.0..3.0)));
        }
    }
    out
}

pub fn rand_state(rng: &mut ChaCha8Rng, lim: f64) -> State {
    State::new(rng.gen_range(-lim..lim), rng.gen_range(-lim..lim))
}

/// Nonzero draw bounded away from zero.
pub fn rand_signed(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let mag = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        mag
    } else {
        -mag
    }
}
