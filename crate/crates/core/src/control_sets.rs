//! Analytic control-set descriptions and membership predicates for every
//! degenerate case, stated in normal-form coordinates and pulled back through
//! the recorded conjugation.

use crate::flows::{exp_m1_m_x, f_omega, State};
use crate::grid::GridWindow;
use crate::system::{classify_case, larc, CaseTag, ControlRange, PolyMap2, SystemParams};
use crate::{Error, Result};

/// Shape of a control set (or family of control sets) in the normal chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionKind {
    /// The whole plane (flat case).
    WholePlane,
    /// Closure R x (-c/lambda)*Omega (contracting case, a = 0).
    HorizontalStripClosure,
    /// Closure R^2 minus the two negatively invariant regions
    /// (contracting case, a > 0).
    ComplementOfCpCm,
    /// Omega x R (band case, gamma != 0).
    OmegaBand,
    /// The one-point sets {(0, t)} (band with gamma = 0, and quadratic case).
    SingletonFamily,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    Closed,
    Open,
    Unknown,
}

/// A control-set description: region kind plus the normal-form parameters it
/// is stated in, and the chart mapping query coordinates into that normal
/// form (identity right after construction, composed by pullback).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlSetDescription {
    pub kind: RegionKind,
    pub params: SystemParams,
    pub range: ControlRange,
    pub topology: Topology,
    pub chart: PolyMap2,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Verdict {
    Inside,
    Boundary(f64),
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionSample {
    pub state: State,
    pub verdict: Verdict,
}

/// Closed strip bounds of the contracting a = 0 case: the interval swept by
/// -(c/lambda) * omega over the control range.
pub fn strip_bounds(p: &SystemParams, w: &ControlRange) -> (f64, f64) {
    let e1 = -p.c * w.omega_minus / p.lambda;
    let e2 = -p.c * w.omega_plus / p.lambda;
    (e1.min(e2), e1.max(e2))
}

/// Both strict line inequalities of the lower invariant region.
pub fn cminus_member(p: &SystemParams, w: &ControlRange, v: State) -> bool {
    f_omega(p, w.omega_minus, v) < 0.0 && f_omega(p, w.omega_plus, v) < 0.0
}

/// Signed spatial gap to the lower invariant region: the larger of the two
/// line functionals, each normalized by its gradient norm. Negative inside.
fn cminus_gap(p: &SystemParams, w: &ControlRange, v: State) -> f64 {
    let l2 = p.lambda * p.lambda;
    let norm = |omega: f64| (l2 * l2 + (omega * p.lambda * p.a).powi(2)).sqrt();
    let gm = f_omega(p, w.omega_minus, v) / norm(w.omega_minus);
    let gp = f_omega(p, w.omega_plus, v) / norm(w.omega_plus);
    gm.max(gp)
}

/// Signed spatial gap to the upper invariant region: t minus the extremal
/// curve through (-c/a, 0) whose first coordinate passes through s in
/// nonnegative time, normalized by the curve slope. Positive inside. Both
/// extreme controls are admissible exactly on the ray they sweep; where both
/// apply the larger gap decides.
fn cplus_gap(p: &SystemParams, w: &ControlRange, v: State) -> f64 {
    let sa = v.s + p.c / p.a;
    let l = p.lambda;
    let mut best = f64::NEG_INFINITY;
    for omega in [w.omega_minus, w.omega_plus] {
        let tau = sa / omega;
        if tau >= 0.0 {
            let curve_t = p.a * omega * omega / (l * l) * exp_m1_m_x(l * tau);
            // slope of the curve: t rate over s rate at this point
            let slope = (l * curve_t + omega * (p.c + p.a * v.s)) / omega;
            best = best.max((v.t - curve_t) / (1.0 + slope * slope).sqrt());
        }
    }
    best
}

/// Membership in the upper negatively invariant region (strict).
pub fn cplus_member(p: &SystemParams, w: &ControlRange, v: State) -> bool {
    cplus_gap(p, w, v) > 0.0
}

/// Strict sign test of the product of two line functionals: the controllable
/// double wedge between the zero lines of omega1 and omega2.
pub fn band_member(omega1: f64, omega2: f64, p: &SystemParams, v: State) -> bool {
    f_omega(p, omega1, v) * f_omega(p, omega2, v) < 0.0
}

/// Analytic control-set list for a system in the normal form of `tag`.
pub fn control_sets(
    tag: CaseTag,
    p: &SystemParams,
    w: &ControlRange,
) -> Result<Vec<ControlSetDescription>> {
    let mk = |kind, topology| ControlSetDescription {
        kind,
        params: *p,
        range: *w,
        topology,
        chart: PolyMap2::identity(),
    };
    match tag {
        CaseTag::NonSingular | CaseTag::Reducible => Err(Error::UnsupportedCase(tag)),
        CaseTag::Flat => {
            if !larc(p) {
                return Err(Error::LarcViolated);
            }
            Ok(vec![mk(RegionKind::WholePlane, Topology::Closed)])
        }
        CaseTag::Contracting => {
            if !larc(p) {
                return Err(Error::LarcViolated);
            }
            let topology = if p.lambda < 0.0 { Topology::Closed } else { Topology::Open };
            if p.a == 0.0 {
                Ok(vec![mk(RegionKind::HorizontalStripClosure, topology)])
            } else if p.a > 0.0 {
                Ok(vec![mk(RegionKind::ComplementOfCpCm, topology)])
            } else {
                Err(Error::Constraint("contracting normal form requires a >= 0".into()))
            }
        }
        CaseTag::Band => {
            if !larc(p) {
                return Err(Error::LarcViolated);
            }
            if p.gamma != 0.0 {
                Ok(vec![mk(RegionKind::OmegaBand, Topology::Closed)])
            } else {
                Ok(vec![mk(RegionKind::SingletonFamily, Topology::Closed)])
            }
        }
        // the one-point conclusion of this branch does not lean on the rank
        // condition, so no gate here
        CaseTag::Quadratic => Ok(vec![mk(RegionKind::SingletonFamily, Topology::Closed)]),
    }
}

/// Uniform membership front end. Boundary verdicts are raised when the
/// vertical distance to a defining equality is at most `tol`.
pub fn membership(desc: &ControlSetDescription, v: State, tol: f64) -> RegionSample {
    let (s, t) = desc.chart.forward(v.s, v.t);
    let q = State::new(s, t);
    let p = &desc.params;
    let w = &desc.range;
    let verdict = match desc.kind {
        RegionKind::WholePlane => Verdict::Inside,
        RegionKind::HorizontalStripClosure => {
            let (lo, hi) = strip_bounds(p, w);
            interval_verdict(q.t, lo, hi, tol)
        }
        RegionKind::OmegaBand => interval_verdict(q.s, w.omega_minus, w.omega_plus, tol),
        RegionKind::SingletonFamily => {
            if q.s == 0.0 {
                Verdict::Inside
            } else if q.s.abs() <= tol {
                Verdict::Boundary(tol)
            } else {
                Verdict::Outside
            }
        }
        RegionKind::ComplementOfCpCm => {
            let gm = cminus_gap(p, w, q);
            let gp = cplus_gap(p, w, q);
            if gm.abs() <= tol || gp.abs() <= tol {
                Verdict::Boundary(tol)
            } else if gm < 0.0 || gp > 0.0 {
                Verdict::Outside
            } else {
                Verdict::Inside
            }
        }
    };
    RegionSample { state: v, verdict }
}

fn interval_verdict(x: f64, lo: f64, hi: f64, tol: f64) -> Verdict {
    if (x - lo).abs() <= tol || (x - hi).abs() <= tol {
        Verdict::Boundary(tol)
    } else if lo < x && x < hi {
        Verdict::Inside
    } else {
        Verdict::Outside
    }
}

/// Pull a description back through a conjugating map: membership of the
/// result at v equals membership of `desc` at map.forward(v).
pub fn pullback_region(desc: &ControlSetDescription, map: &PolyMap2) -> ControlSetDescription {
    ControlSetDescription {
        chart: map.then(&desc.chart),
        ..*desc
    }
}

/// Membership raster over a grid window: one (s, t, code) triple per cell
/// center with code 1 = inside, 0 = boundary, -1 = outside.
pub fn rasterize(desc: &ControlSetDescription, win: &GridWindow, tol: f64) -> Vec<(f64, f64, i8)> {
    (0..win.cell_count())
        .map(|idx| {
            let c = win.center(idx);
            let code = match membership(desc, c, tol).verdict {
                Verdict::Inside => 1,
                Verdict::Boundary(_) => 0,
                Verdict::Outside => -1,
            };
            (c.s, c.t, code)
        })
        .collect()
}

/// CSV export of [`rasterize`]: header `s,t,verdict`.
pub fn raster_csv(raster: &[(f64, f64, i8)]) -> String {
    let mut out = String::from("s,t,verdict\n");
    for (s, t, code) in raster {
        out.push_str(&format!("{},{},{}\n", crate::fmt_f64(*s), crate::fmt_f64(*t), code));
    }
    out
}

/// Human-readable closure of the region, used by the command line front end.
pub fn closure_text(desc: &ControlSetDescription) -> String {
    match desc.kind {
        RegionKind::WholePlane => "R^2".to_string(),
        RegionKind::HorizontalStripClosure => {
            let (lo, hi) = strip_bounds(&desc.params, &desc.range);
            format!("R x [{}, {}]", lo, hi)
        }
        RegionKind::ComplementOfCpCm => "R^2 \\ (C+ u C-)".to_string(),
        RegionKind::OmegaBand => {
            format!("[{}, {}] x R", desc.range.omega_minus, desc.range.omega_plus)
        }
        RegionKind::SingletonFamily => "{(0, t) : t in R}".to_string(),
    }
}

/// Sanity check used by callers that require a description list for a system
/// straight out of `normal_form`.
pub fn control_sets_checked(p: &SystemParams, w: &ControlRange) -> Result<Vec<ControlSetDescription>> {
    control_sets(classify_case(p), p, w)
}
