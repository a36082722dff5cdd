//! Constructive steering: executable versions of the concatenation
//! arguments behind each controllability statement, with endpoints verified
//! by exact replay. The planner certifies existence; it does not optimize.

use crate::control_sets::{control_sets, membership, Verdict};
use crate::flows::{exact_segment_unchecked, f_omega, propagate, ControlSchedule, State};
use crate::system::{CaseTag, ControlRange, SystemParams};
use crate::{Error, Result};

/// A steering plan together with its replay error and the name of the
/// construction that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct SteeringResult {
    pub schedule: ControlSchedule,
    pub endpoint_error: f64,
    pub construction: &'static str,
}

const BISECT_TOL: f64 = 1e-13;
const MAX_EXPAND: usize = 70;

/// Bracketed bisection; `f(lo)` and `f(hi)` must have opposite signs.
fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    if flo > 0.0 {
        std::mem::swap(&mut lo, &mut hi);
        flo = f(lo);
        debug_assert!(flo <= 0.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= BISECT_TOL * (1.0 + mid.abs()) {
            return mid;
        }
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Grow `x` geometrically from `start` until `f` changes sign against
/// `f(start)`, then bisect. Returns None when no sign change shows up.
fn expand_and_bisect<F: Fn(f64) -> f64 + Copy>(f: F, start: f64, step0: f64, dir: f64) -> Option<f64> {
    let f0 = f(start);
    if f0 == 0.0 {
        return Some(start);
    }
    let mut step = step0;
    let mut prev = start;
    for _ in 0..MAX_EXPAND {
        let x = start + dir * step;
        let fx = f(x);
        if fx == 0.0 {
            return Some(x);
        }
        if fx.is_nan() {
            step *= 2.0;
            continue;
        }
        if fx.signum() != f0.signum() {
            return Some(bisect(f, prev, x));
        }
        prev = x;
        step *= 2.0;
    }
    None
}

/// Stable real roots of a2 x^2 + a1 x + a0, ascending. Falls back to the
/// linear root when the leading coefficient vanishes.
fn quadratic_roots(a2: f64, a1: f64, a0: f64) -> Vec<f64> {
    if a2 == 0.0 {
        if a1 == 0.0 {
            return Vec::new();
        }
        return vec![-a0 / a1];
    }
    let disc = a1 * a1 - 4.0 * a2 * a0;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let q = -0.5 * (a1 + a1.signum() * sq);
    let mut roots = if a1 == 0.0 {
        let r = (sq / (2.0 * a2)).abs();
        vec![-r, r]
    } else {
        let r1 = q / a2;
        let r2 = if q != 0.0 { a0 / q } else { r1 };
        vec![r1, r2]
    };
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

fn finish(
    tag: CaseTag,
    p: &SystemParams,
    w: &ControlRange,
    v0: State,
    v1: State,
    raw: Vec<(f64, f64)>,
    construction: &'static str,
) -> Result<SteeringResult> {
    let mut pairs = Vec::with_capacity(raw.len());
    for (d, omega) in raw {
        let d = if d < 0.0 && d > -1e-9 { 0.0 } else { d };
        if d < 0.0 {
            return Err(Error::BracketFailure(format!(
                "negative duration {d} from {construction}"
            )));
        }
        if omega < w.omega_minus - 1e-12 || omega > w.omega_plus + 1e-12 {
            return Err(Error::BracketFailure(format!(
                "control {omega} out of range from {construction}"
            )));
        }
        if d > 0.0 {
            pairs.push((d, omega.clamp(w.omega_minus, w.omega_plus)));
        }
    }
    let schedule = ControlSchedule::from_pairs(&pairs)?;
    let end = propagate(tag, p, v0, &schedule)?;
    Ok(SteeringResult {
        schedule,
        endpoint_error: end.dist(&v1),
        construction,
    })
}

// ---------------------------------------------------------------------------
// Flat case
// ---------------------------------------------------------------------------

/// Parabola traced by the constant-control orbit through `vref` in the flat
/// normal form, evaluated at abscissa `s`.
fn flat_parabola(p: &SystemParams, vref: State, omega: f64, s: f64) -> f64 {
    let r = p.a * omega + p.gamma;
    let aa = r / (2.0 * p.b * omega);
    let ll = (vref.s * r + p.c * omega) / (p.b * omega);
    let ds = s - vref.s;
    aa * ds * ds + ll * ds + vref.t
}

/// Smallest positive switch time at which the `omega_ride` orbit from `from`
/// meets the parabola of (`vref`, `omega_par`). The difference of the two
/// second components is a quadratic in time.
fn flat_crossing(
    p: &SystemParams,
    from: State,
    omega_ride: f64,
    vref: State,
    omega_par: f64,
) -> Option<f64> {
    let r_ride = p.a * omega_ride + p.gamma;
    let p2 = 0.5 * p.b * omega_ride * r_ride;
    let p1 = from.s * r_ride + p.c * omega_ride;

    let r_par = p.a * omega_par + p.gamma;
    let aa = r_par / (2.0 * p.b * omega_par);
    let ll = (vref.s * r_par + p.c * omega_par) / (p.b * omega_par);
    let d = from.s - vref.s;
    let e = p.b * omega_ride;

    let g2 = p2 - aa * e * e;
    let g1 = p1 - 2.0 * aa * d * e - ll * e;
    let g0 = from.t - aa * d * d - ll * d - vref.t;
    quadratic_roots(g2, g1, g0)
        .into_iter()
        .find(|&t| t > 1e-12)
}

/// One-segment solution when the target sits on an admissible orbit of the
/// start point.
fn flat_single_segment(
    p: &SystemParams,
    w: &ControlRange,
    v0: State,
    v1: State,
) -> Option<Vec<(f64, f64)>> {
    let ds = v1.s - v0.s;
    let dt = v1.t - v0.t;
    if ds == 0.0 {
        // vertical coasting at rate gamma * s
        if v0.s == 0.0 {
            return None;
        }
        let tau = dt / (p.gamma * v0.s);
        if tau > 0.0 {
            return Some(vec![(tau, 0.0)]);
        }
        return None;
    }
    let kk = ds * (v1.s + v0.s) / (2.0 * p.b);
    let rr = dt - p.c * ds / p.b;
    let den = rr - p.a * kk;
    if den == 0.0 {
        return None;
    }
    let omega = p.gamma * kk / den;
    if omega == 0.0 || !w.contains(omega) {
        return None;
    }
    let tau = ds / (p.b * omega);
    if tau <= 0.0 {
        return None;
    }
    // accept only if the ride really lands on the target
    let end = exact_segment_unchecked(CaseTag::Flat, p, v0, omega, tau);
    if end.dist(&v1) < 1e-9 {
        Some(vec![(tau, omega)])
    } else {
        None
    }
}

/// Two-segment plan for a start inside the region bounded by the upward
/// parabola through the target: descend with the negative control onto one
/// of the target's orbits and ride it in.
fn flat_from_inside(
    p: &SystemParams,
    v0: State,
    v1: State,
    w0: f64,
    w1: f64,
) -> Option<(Vec<(f64, f64)>, &'static str)> {
    // plan A: descend onto the w1-parabola, ride right
    if let Some(tau0) = flat_crossing(p, v0, w0, v1, w1) {
        let mid = exact_segment_unchecked(CaseTag::Flat, p, v0, w0, tau0);
        if mid.s <= v1.s + 1e-9 {
            let tau1 = (v1.s - mid.s) / (p.b * w1);
            return Some((vec![(tau0, w0), (tau1.max(0.0), w1)], "inside_descend_ride"));
        }
    }
    // plan B: ascend onto the w0-parabola, ride left
    if let Some(tau0) = flat_crossing(p, v0, w1, v1, w0) {
        let mid = exact_segment_unchecked(CaseTag::Flat, p, v0, w1, tau0);
        if mid.s >= v1.s - 1e-9 {
            let tau1 = (v1.s - mid.s) / (p.b * w0);
            return Some((vec![(tau0, w1), (tau1.max(0.0), w0)], "inside_ascend_ride"));
        }
    }
    None
}

/// Steering in the flat normal form (b > 0, gamma > 0). Follows the
/// two-step concatenation pattern: ride/descend between translated
/// parabolas, with an upward coast to enter the target's parabola region
/// when starting outside it.
pub fn steer_flat(p: &SystemParams, w: &ControlRange, v0: State, v1: State) -> Result<SteeringResult> {
    if !(p.alpha == 0.0 && p.beta == 0.0 && p.lambda == 0.0) {
        return Err(Error::PreconditionViolated("flat normal form required".into()));
    }
    if !(p.b > 0.0 && p.gamma > 0.0) {
        return Err(Error::PreconditionViolated(
            "flat steering expects the sign-normalized chart (b > 0, gamma > 0)".into(),
        ));
    }
    if v0 == v1 {
        return finish(CaseTag::Flat, p, w, v0, v1, vec![], "trivial");
    }
    if let Some(raw) = flat_single_segment(p, w, v0, v1) {
        return finish(CaseTag::Flat, p, w, v0, v1, raw, "single_segment");
    }

    let eps = if p.a != 0.0 {
        w.symmetric_radius().min(p.gamma / (2.0 * p.a.abs()))
    } else {
        w.symmetric_radius()
    };
    let (w0, w1) = (-eps / 2.0, eps / 2.0);

    let p1_at_s0 = flat_parabola(p, v1, w1, v0.s);
    let scale = 1.0 + v0.t.abs() + p1_at_s0.abs();
    let inside = v0.t - p1_at_s0 > -1e-12 * scale;

    if inside {
        if (v0.t - p1_at_s0).abs() <= 1e-12 * scale && v0.s <= v1.s {
            let tau = (v1.s - v0.s) / (p.b * w1);
            return finish(CaseTag::Flat, p, w, v0, v1, vec![(tau, w1)], "ride_own_parabola");
        }
        if let Some((raw, name)) = flat_from_inside(p, v0, v1, w0, w1) {
            return finish(CaseTag::Flat, p, w, v0, v1, raw, name);
        }
    } else {
        // outside: ride right, coast straight up into the target parabola
        if v1.s > 0.0 && v1.s >= v0.s {
            let tau_a = (v1.s - v0.s) / (p.b * w1);
            let mid = exact_segment_unchecked(CaseTag::Flat, p, v0, w1, tau_a);
            let tau_c = (v1.t - mid.t) / (p.gamma * v1.s);
            if tau_c >= 0.0 {
                return finish(
                    CaseTag::Flat,
                    p,
                    w,
                    v0,
                    v1,
                    vec![(tau_a, w1), (tau_c, 0.0)],
                    "ride_coast_in",
                );
            }
        }
    }

    // universal fallback: escape to a positive abscissa, coast up past the
    // target parabola, then the inside construction applies
    let sc = v0.s.max(0.0) + 1.0;
    let tau_a = (sc - v0.s) / (p.b * w1);
    let mid = exact_segment_unchecked(CaseTag::Flat, p, v0, w1, tau_a);
    let t_in = flat_parabola(p, v1, w1, sc) + 1.0;
    let tau_c = (t_in - mid.t) / (p.gamma * sc);
    if tau_c < 0.0 {
        // already above: drop the coast
        if let Some((mut raw, _)) = flat_from_inside(p, mid, v1, w0, w1) {
            let mut full = vec![(tau_a, w1)];
            full.append(&mut raw);
            return finish(CaseTag::Flat, p, w, v0, v1, full, "escape_inside");
        }
        return Err(Error::BracketFailure("flat fallback found no crossing".into()));
    }
    let high = State::new(sc, t_in);
    if let Some((mut raw, _)) = flat_from_inside(p, high, v1, w0, w1) {
        let mut full = vec![(tau_a, w1), (tau_c, 0.0)];
        full.append(&mut raw);
        return finish(CaseTag::Flat, p, w, v0, v1, full, "escape_coast_inside");
    }
    Err(Error::BracketFailure("flat fallback found no crossing".into()))
}

// ---------------------------------------------------------------------------
// Contracting case, a = 0 (strip)
// ---------------------------------------------------------------------------

fn strip_equilibrium(p: &SystemParams, omega: f64) -> f64 {
    -p.c * omega / p.lambda
}

/// Time to move the second coordinate from `t_from` to `t_target` under a
/// constant control, found by bisection on the monotone closed form.
fn strip_hit_time(p: &SystemParams, t_from: f64, omega: f64, t_target: f64) -> Option<f64> {
    let e = strip_equilibrium(p, omega);
    if t_from == t_target {
        return Some(0.0);
    }
    if t_from == e {
        return None; // frozen at the equilibrium, cannot move
    }
    let f = |tau: f64| (p.lambda * tau).exp() * (t_from - e) + e - t_target;
    expand_and_bisect(f, 0.0, 0.25, 1.0).filter(|&t| t >= 0.0)
}

fn check_contracting_pattern(p: &SystemParams) -> Result<()> {
    if p.alpha == 0.0 && p.beta == 0.0 && p.gamma == 0.0 && p.b == 1.0 && p.lambda != 0.0 {
        Ok(())
    } else {
        Err(Error::PreconditionViolated("contracting normal form required".into()))
    }
}

/// Three-step steering in the strip case: reach a coasting fiber, drift
/// horizontally, re-enter the target. An out-and-back excursion substitutes
/// for the coast when neither fiber direction matches.
pub fn steer_strip(p: &SystemParams, w: &ControlRange, v0: State, v1: State) -> Result<SteeringResult> {
    check_contracting_pattern(p)?;
    if p.a != 0.0 {
        return Err(Error::PreconditionViolated("strip steering requires a = 0".into()));
    }
    let (lo, hi) = crate::control_sets::strip_bounds(p, w);
    for v in [v0, v1] {
        if !(lo < v.t && v.t < hi) {
            return Err(Error::NotInControlSet);
        }
    }
    if v0 == v1 {
        return finish(CaseTag::Contracting, p, w, v0, v1, vec![], "trivial");
    }

    // single coast along the fiber both points already share
    if v1.t == v0.t {
        let what = -p.lambda * v0.t / p.c;
        if what != 0.0 && w.omega_minus < what && what < w.omega_plus {
            let tau = (v1.s - v0.s) / what;
            if tau > 0.0 {
                return finish(
                    CaseTag::Contracting,
                    p,
                    w,
                    v0,
                    v1,
                    vec![(tau, what)],
                    "fiber_coast",
                );
            }
        }
    }

    let delta = w.symmetric_radius() / 2.0;
    let reach_fiber = |t_from: f64, s_from: f64, t_f: f64| -> Option<(Vec<(f64, f64)>, f64)> {
        if t_from == t_f {
            return Some((vec![], s_from));
        }
        for omega in [w.omega_minus, w.omega_plus] {
            if let Some(tau) = strip_hit_time(p, t_from, omega, t_f) {
                return Some((vec![(tau, omega)], s_from + omega * tau));
            }
        }
        None
    };
    let arrival = |t_to: f64, s_to: f64, t_f: f64| -> Option<(Vec<(f64, f64)>, f64)> {
        if t_to == t_f {
            return Some((vec![], s_to));
        }
        for omega in [w.omega_minus, w.omega_plus] {
            if let Some(tau) = strip_hit_time(p, t_f, omega, t_to) {
                return Some((vec![(tau, omega)], s_to - omega * tau));
            }
        }
        None
    };

    for what in [delta, -delta] {
        let t_f = strip_equilibrium(p, what);
        if !(lo < t_f && t_f < hi) {
            continue;
        }
        let Some((seg_i, s_dep)) = reach_fiber(v0.t, v0.s, t_f) else { continue };
        let Some((seg_iii, s_arr)) = arrival(v1.t, v1.s, t_f) else { continue };
        let shift = s_arr - s_dep;
        if shift == 0.0 || shift / what > 0.0 {
            let mut raw = seg_i;
            if shift != 0.0 {
                raw.push((shift / what, what));
            }
            raw.extend(seg_iii);
            return finish(CaseTag::Contracting, p, w, v0, v1, raw, "fiber_three_step");
        }
    }

    // excursion fallback on the positive fiber: leave the fiber and come
    // back, trading the vertical detour for a horizontal shift of the
    // needed sign
    let what = delta;
    let t_f = strip_equilibrium(p, what);
    let (seg_i, s_dep) =
        reach_fiber(v0.t, v0.s, t_f).ok_or_else(|| Error::BracketFailure("fiber unreachable".into()))?;
    let (seg_iii, s_arr) =
        arrival(v1.t, v1.s, t_f).ok_or_else(|| Error::BracketFailure("arrival unsolvable".into()))?;
    let shift = s_arr - s_dep;
    let w_out = if shift > 0.0 { w.omega_plus } else { w.omega_minus };
    let w_back = if shift > 0.0 { w.omega_minus } else { w.omega_plus };
    let xi = |tau_out: f64| -> Option<(f64, f64)> {
        let t_mid = (p.lambda * tau_out).exp() * (t_f - strip_equilibrium(p, w_out))
            + strip_equilibrium(p, w_out);
        let tau_back = strip_hit_time(p, t_mid, w_back, t_f)?;
        Some((w_out * tau_out + w_back * tau_back, tau_back))
    };
    let err = |tau_out: f64| xi(tau_out).map(|x| x.0 - shift).unwrap_or(f64::NAN);
    let tau_out = expand_and_bisect(err, 0.0, 0.25, 1.0)
        .ok_or_else(|| Error::BracketFailure("excursion shift not bracketed".into()))?;
    let (_, tau_back) = xi(tau_out).ok_or_else(|| Error::BracketFailure("excursion broke".into()))?;
    let mut raw = seg_i;
    raw.push((tau_out, w_out));
    raw.push((tau_back, w_back));
    raw.extend(seg_iii);
    finish(CaseTag::Contracting, p, w, v0, v1, raw, "fiber_excursion")
}

// ---------------------------------------------------------------------------
// Contracting case, a > 0 (wedge band and complement)
// ---------------------------------------------------------------------------

fn check_wedge_pattern(p: &SystemParams) -> Result<()> {
    check_contracting_pattern(p)?;
    if !(p.a > 0.0) {
        return Err(Error::PreconditionViolated("this construction requires a > 0".into()));
    }
    if !(p.lambda < 0.0) {
        return Err(Error::PreconditionViolated(
            "the loop geometry is available in the stable chart (lambda < 0)".into(),
        ));
    }
    Ok(())
}

/// Orbit graph of the constant-control solution through `v`: second
/// coordinate as a function of the abscissa.
fn orbit_t(p: &SystemParams, v: State, omega: f64, s: f64) -> f64 {
    let l = p.lambda;
    let f0 = f_omega(p, omega, v);
    ((l * (s - v.s) / omega).exp() * f0 - omega * (l * (p.c + p.a * s) + p.a * omega)) / (l * l)
}

/// Gap between the backward-extended extreme orbits through `x` (negative
/// control) and `y` (positive control).
fn lens_gap(p: &SystemParams, w: &ControlRange, x: State, y: State, s: f64) -> f64 {
    orbit_t(p, x, w.omega_minus, s) - orbit_t(p, y, w.omega_plus, s)
}

/// Wedge sign pattern: true when the negative-control functional is the
/// positive one (the right-opening wedge).
fn is_right_wedge(p: &SystemParams, w: &ControlRange, v: State) -> bool {
    f_omega(p, w.omega_minus, v) > 0.0
}

fn in_open_wedge(p: &SystemParams, w: &ControlRange, v: State, margin: f64) -> bool {
    let fm = f_omega(p, w.omega_minus, v);
    let fp = f_omega(p, w.omega_plus, v);
    let l2 = p.lambda * p.lambda;
    fm * fp < 0.0 && fm.abs() / l2 > margin && fp.abs() / l2 > margin
}

/// Two extreme-control legs from `x` to `y`, where the two points sit in
/// opposite wedges of the controllable band; the switch point is the outer
/// intersection of their extreme orbits.
fn half_loop(p: &SystemParams, w: &ControlRange, x: State, y: State) -> Result<Vec<(f64, f64)>> {
    let (wn, wp) = (w.omega_minus, w.omega_plus);
    if is_right_wedge(p, w, x) {
        if is_right_wedge(p, w, y) {
            return Err(Error::PreconditionViolated("half loop needs opposite wedges".into()));
        }
        // ride left along the negative-control orbit, then right into y
        let h = |s: f64| lens_gap(p, w, x, y, s);
        let s_start = y.s;
        if h(s_start) <= 0.0 {
            return Err(Error::BracketFailure("lens gap has the wrong sign".into()));
        }
        let step0 = (x.s - y.s).abs().max(1.0);
        let sx = expand_and_bisect(h, s_start, step0, -1.0)
            .ok_or_else(|| Error::BracketFailure("left lens intersection not found".into()))?;
        Ok(vec![((sx - x.s) / wn, wn), ((y.s - sx) / wp, wp)])
    } else {
        if !is_right_wedge(p, w, y) {
            return Err(Error::PreconditionViolated("half loop needs opposite wedges".into()));
        }
        // ride right along the positive-control orbit, then left into y
        let h = |s: f64| lens_gap(p, w, y, x, s);
        let s_start = y.s;
        if h(s_start) >= 0.0 {
            return Err(Error::BracketFailure("lens gap has the wrong sign".into()));
        }
        let step0 = (x.s - y.s).abs().max(1.0);
        let sy = expand_and_bisect(h, s_start, step0, 1.0)
            .ok_or_else(|| Error::BracketFailure("right lens intersection not found".into()))?;
        Ok(vec![((sy - x.s) / wp, wp), ((y.s - sy) / wn, wn)])
    }
}

/// Closed loop through two points sitting in opposite wedges of the
/// controllable band, built from the two outer intersections of their
/// extreme orbits.
pub fn closed_orbit(p: &SystemParams, w: &ControlRange, v1: State, v2: State) -> Result<SteeringResult> {
    check_wedge_pattern(p)?;
    let ok = f_omega(p, w.omega_minus, v1) > 0.0
        && f_omega(p, w.omega_plus, v1) < 0.0
        && f_omega(p, w.omega_minus, v2) < 0.0
        && f_omega(p, w.omega_plus, v2) > 0.0;
    if !ok {
        return Err(Error::PreconditionViolated(
            "loop endpoints must show opposite strict sign patterns".into(),
        ));
    }
    let mut raw = half_loop(p, w, v1, v2)?;
    raw.extend(half_loop(p, w, v2, v1)?);
    finish(CaseTag::Contracting, p, w, v1, v1, raw, "closed_orbit")
}

/// Entry point into the band at a prescribed wedge, riding a small interior
/// control whose orbit hugs its own asymptote line out into the band.
fn ride_into_band(
    p: &SystemParams,
    w: &ControlRange,
    v0: State,
    want_right_wedge: bool,
    margin: f64,
) -> Result<(Vec<(f64, f64)>, State)> {
    if in_open_wedge(p, w, v0, margin) && is_right_wedge(p, w, v0) == want_right_wedge {
        return Ok((vec![], v0));
    }
    let delta = w.symmetric_radius() / 2.0;
    // positive interior control drives the pattern to the right wedge
    let wt = if want_right_wedge { delta } else { -delta };
    let mut tau = 0.5;
    for _ in 0..MAX_EXPAND {
        let x = exact_segment_unchecked(CaseTag::Contracting, p, v0, wt, tau);
        if in_open_wedge(p, w, x, margin) && is_right_wedge(p, w, x) == want_right_wedge {
            return Ok((vec![(tau, wt)], x));
        }
        tau *= 2.0;
    }
    Err(Error::BracketFailure("band entry ride diverged".into()))
}

/// Far point of the given asymptote line inside the band, approached from
/// the side the line's own control rides in from.
fn line_entry_point(
    p: &SystemParams,
    w: &ControlRange,
    omega_line: f64,
    s_anchor: f64,
    margin: f64,
) -> Result<State> {
    let line_t = |s: f64| -omega_line * (p.lambda * (p.c + p.a * s) + p.a * omega_line)
        / (p.lambda * p.lambda);
    let mut dist = 1.0;
    for _ in 0..MAX_EXPAND {
        let s = s_anchor - omega_line.signum() * dist;
        let v = State::new(s, line_t(s));
        if in_open_wedge(p, w, v, margin) {
            return Ok(v);
        }
        dist *= 2.0;
    }
    Err(Error::BracketFailure("line never enters the band".into()))
}

/// Steering inside the closure complement of the two invariant regions in
/// the a > 0 contracting chart: descend into the controllable band along an
/// asymptote, traverse it with extreme-orbit legs, and exit along the line
/// through the target (directly, or after a detour through the anchor
/// abscissa when the target sits above the horizontal axis).
pub fn steer_complement(
    p: &SystemParams,
    w: &ControlRange,
    v0: State,
    v1: State,
) -> Result<SteeringResult> {
    check_wedge_pattern(p)?;
    let desc = &control_sets(CaseTag::Contracting, p, w)?[0];
    for v in [v0, v1] {
        if membership(desc, v, 1e-9).verdict != Verdict::Inside {
            return Err(Error::NotInControlSet);
        }
    }
    if v0 == v1 {
        return finish(CaseTag::Contracting, p, w, v0, v1, vec![], "trivial");
    }

    let margin = 1e-2;
    let l = p.lambda;
    let delta = w.symmetric_radius() / 2.0;

    // phase C: how the plan will arrive at v1
    let band_target = f_omega(p, w.omega_minus, v1) * f_omega(p, w.omega_plus, v1) < 0.0;
    let (entry, segs_c): (State, Vec<(f64, f64)>) = if band_target {
        (v1, vec![])
    } else if v1.t <= 0.0 {
        // a zero line of some admissible control passes through v1; ride it
        let roots = quadratic_roots(p.a, l * (p.c + p.a * v1.s), l * l * v1.t);
        let omega_star = roots
            .iter()
            .copied()
            .filter(|&r| r != 0.0 && w.omega_minus < r && r < w.omega_plus)
            .max_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
            .ok_or_else(|| Error::BracketFailure("no admissible line through the target".into()))?;
        let v2s = line_entry_point(p, w, omega_star, v1.s, margin)?;
        (v2s, vec![((v1.s - v2s.s) / omega_star, omega_star)])
    } else {
        // detour: trace the target's extreme orbit back to the anchor
        // abscissa, pick an opposite-sign line crossed on the way in, and
        // ride that line from the band
        let s_axis = -p.c / p.a;
        let w_i = if p.a * v1.s + p.c > 0.0 { w.omega_plus } else { w.omega_minus };
        let tau1 = (v1.s - s_axis) / w_i;
        let t_star = orbit_t(p, v1, w_i, s_axis);
        if !(t_star < 0.0) {
            return Err(Error::BracketFailure("backward orbit missed the lower axis".into()));
        }
        let cap = l.abs() * (-t_star / p.a).sqrt();
        let omega_star = -w_i.signum() * delta.min(cap / 2.0);
        let start = State::new(s_axis, t_star);
        let gamma_f = |rho: f64| {
            f_omega(
                p,
                omega_star,
                exact_segment_unchecked(CaseTag::Contracting, p, start, w_i, rho),
            )
        };
        if gamma_f(0.0) >= 0.0 || gamma_f(tau1) <= 0.0 {
            return Err(Error::BracketFailure("line crossing not bracketed on the inbound orbit".into()));
        }
        let rho = bisect(gamma_f, 0.0, tau1);
        let v1s = exact_segment_unchecked(CaseTag::Contracting, p, start, w_i, rho);
        let v2s = line_entry_point(p, w, omega_star, v1s.s, margin)?;
        (
            v2s,
            vec![((v1s.s - v2s.s) / omega_star, omega_star), (tau1 - rho, w_i)],
        )
    };

    // phases A and B: enter the band in the wedge opposite the entry point,
    // then traverse with two extreme legs
    if v0 == entry {
        return finish(CaseTag::Contracting, p, w, v0, v1, segs_c, "already_at_entry");
    }
    let entry_right = is_right_wedge(p, w, entry);
    let entry_in_band = f_omega(p, w.omega_minus, entry) * f_omega(p, w.omega_plus, entry) < 0.0;
    if !entry_in_band {
        return Err(Error::BracketFailure("band entry point is not inside the band".into()));
    }
    let (mut raw, x) = ride_into_band(p, w, v0, !entry_right, margin)?;
    raw.extend(half_loop(p, w, x, entry)?);
    raw.extend(segs_c);
    finish(CaseTag::Contracting, p, w, v0, v1, raw, "band_traverse")
}

// ---------------------------------------------------------------------------
// Band case, gamma != 0
// ---------------------------------------------------------------------------

/// Vertical drift accumulated by a constant-control stretch in the band
/// normal form.
fn band_drift(p: &SystemParams, s0: f64, omega: f64, tau: f64) -> f64 {
    (p.a * omega + p.gamma) * (omega * tau + (s0 - omega) * (p.beta * tau).exp_m1() / p.beta)
}

/// Exact time for the relaxation coordinate to hit a target from `s0` under
/// control `omega`; requires the target strictly between `s0` and `omega`.
fn band_hit_time(p: &SystemParams, s0: f64, omega: f64, s_target: f64) -> Option<f64> {
    if s_target == s0 {
        return Some(0.0);
    }
    let ratio = (omega - s_target) / (omega - s0);
    if !(ratio > 0.0 && ratio < 1.0) {
        return None;
    }
    Some(ratio.ln() / p.beta)
}

/// Steering in the band normal form with nonzero vertical drift
/// coefficient: drive the relaxation coordinate to the central fiber
/// exactly, shift the vertical coordinate with an out-and-back excursion,
/// and re-enter the target abscissa exactly.
pub fn steer_band(p: &SystemParams, w: &ControlRange, v0: State, v1: State) -> Result<SteeringResult> {
    let band_form = p.alpha == 0.0 && p.beta != 0.0 && p.lambda == -p.beta && p.c == 0.0 && p.b == -p.beta;
    if !band_form {
        return Err(Error::PreconditionViolated("band normal form required".into()));
    }
    if p.gamma == 0.0 {
        return Err(Error::PreconditionViolated(
            "band steering needs a nonzero vertical drift coefficient".into(),
        ));
    }
    if !(p.beta < 0.0) {
        return Err(Error::PreconditionViolated(
            "band steering is available in the relaxing chart (beta < 0)".into(),
        ));
    }
    for v in [v0, v1] {
        if !(w.omega_minus < v.s && v.s < w.omega_plus) {
            return Err(Error::NotInControlSet);
        }
    }
    if v0 == v1 {
        return finish(CaseTag::Band, p, w, v0, v1, vec![], "trivial");
    }

    let delta = w.symmetric_radius() / 2.0;
    let mut raw: Vec<(f64, f64)> = Vec::new();
    let mut t_now = v0.t;

    // (i) land exactly on the central fiber
    if v0.s != 0.0 {
        let wa = -v0.s.signum() * delta;
        let tau = band_hit_time(p, v0.s, wa, 0.0)
            .ok_or_else(|| Error::BracketFailure("fiber hit time unsolvable".into()))?;
        t_now += band_drift(p, v0.s, wa, tau);
        raw.push((tau, wa));
    }

    // (iii), pre-solved: leave the fiber for the target abscissa
    let mut segs_out: Vec<(f64, f64)> = Vec::new();
    let mut drift_out = 0.0;
    if v1.s != 0.0 {
        let span = if v1.s > 0.0 { w.omega_plus } else { w.omega_minus };
        let wc = 0.5 * (v1.s + span);
        let tau = band_hit_time(p, 0.0, wc, v1.s)
            .ok_or_else(|| Error::BracketFailure("target hit time unsolvable".into()))?;
        drift_out = band_drift(p, 0.0, wc, tau);
        segs_out.push((tau, wc));
    }

    // (ii) shift the vertical coordinate on the fiber by an out-and-back
    // excursion whose endpoint returns to the fiber exactly
    let need = v1.t - drift_out - t_now;
    if need != 0.0 {
        let mut de = delta.min(p.gamma.abs() / (2.0 * (p.a.abs() + 1.0)));
        // choose the excursion side whose asymptotic drift rate matches
        let side = [de, -de]
            .into_iter()
            .find(|&o| ((p.a * o + p.gamma) * o).signum() == need.signum());
        let w_out = match side {
            Some(o) => o,
            None => {
                de /= 4.0;
                [de, -de]
                    .into_iter()
                    .find(|&o| ((p.a * o + p.gamma) * o).signum() == need.signum())
                    .ok_or_else(|| Error::BracketFailure("no drift direction matches".into()))?
            }
        };
        let w_back = -w_out.signum() * delta;
        let excursion = |tau_out: f64| -> Option<(f64, f64)> {
            let s_mid = (p.beta * tau_out).exp() * (0.0 - w_out) + w_out;
            let tau_back = band_hit_time(p, s_mid, w_back, 0.0)?;
            let total = band_drift(p, 0.0, w_out, tau_out) + band_drift(p, s_mid, w_back, tau_back);
            Some((total, tau_back))
        };
        let err = |tau_out: f64| excursion(tau_out).map(|x| x.0 - need).unwrap_or(f64::NAN);
        let tau_out = expand_and_bisect(err, 0.0, 0.25, 1.0)
            .ok_or_else(|| Error::BracketFailure("excursion drift not bracketed".into()))?;
        let (_, tau_back) =
            excursion(tau_out).ok_or_else(|| Error::BracketFailure("excursion broke".into()))?;
        raw.push((tau_out, w_out));
        raw.push((tau_back, w_back));
    }

    raw.extend(segs_out);
    finish(CaseTag::Band, p, w, v0, v1, raw, "fiber_shift_reenter")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn range() -> ControlRange {
        ControlRange::new(-1.0, 1.0).unwrap()
    }

    fn flat_p() -> SystemParams {
        SystemParams::new(0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn flat_trivial_and_single_segment() {
        let p = flat_p();
        let w = range();
        let r = steer_flat(&p, &w, State::new(0.3, 0.4), State::new(0.3, 0.4)).unwrap();
        assert!(r.schedule.segments.is_empty());
        assert_eq!(r.endpoint_error, 0.0);

        // the target lies on the unit-control orbit of the origin
        let r = steer_flat(&p, &w, State::new(0.0, 0.0), State::new(1.0, 0.5)).unwrap();
        assert_eq!(r.construction, "single_segment");
        assert_eq!(r.schedule.segments.len(), 1);
        let seg = r.schedule.segments[0];
        assert!((seg.omega - 1.0).abs() < 1e-12);
        assert!((seg.duration - 1.0).abs() < 1e-12);
        assert!(r.endpoint_error < 1e-10);
    }

    #[test]
    fn flat_random_pairs() {
        let p = SystemParams::new(0.4, 1.0, -0.3, 0.0, 0.0, 1.0, 0.0).unwrap();
        let w = range();
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for _ in 0..60 {
            let v0 = State::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let v1 = State::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let r = steer_flat(&p, &w, v0, v1).unwrap();
            assert!(r.endpoint_error <= 1e-8, "{v0:?} -> {v1:?}: {} via {}", r.endpoint_error, r.construction);
            for seg in &r.schedule.segments {
                assert!(seg.duration >= 0.0 && w.contains(seg.omega));
            }
            // exact controllability is symmetric: the reverse problem solves too
            let back = steer_flat(&p, &w, v1, v0).unwrap();
            assert!(back.endpoint_error <= 1e-8);
        }
    }

    #[test]
    fn strip_fast_paths_and_random_pairs() {
        let p = SystemParams::new(0.0, 1.0, 1.0, 0.0, 0.0, 0.0, -1.0).unwrap();
        let w = range();

        // both points on a common coasting fiber
        let r = steer_strip(&p, &w, State::new(0.0, 0.5), State::new(2.0, 0.5)).unwrap();
        assert_eq!(r.construction, "fiber_coast");
        assert_eq!(r.schedule.segments.len(), 1);
        assert!(r.endpoint_error < 1e-9);

        // target outside the strip closure is rejected
        assert_eq!(
            steer_strip(&p, &w, State::new(0.0, 0.0), State::new(1.0, 1.5)),
            Err(Error::NotInControlSet)
        );

        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..40 {
            let v0 = State::new(rng.gen_range(-3.0..3.0), rng.gen_range(-0.95..0.95));
            let v1 = State::new(rng.gen_range(-3.0..3.0), rng.gen_range(-0.95..0.95));
            let r = steer_strip(&p, &w, v0, v1).unwrap();
            assert!(r.endpoint_error <= 1e-6, "{v0:?} -> {v1:?}: {}", r.endpoint_error);
        }
    }

    #[test]
    fn closed_orbit_and_preconditions() {
        let p = SystemParams::new(1.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0).unwrap();
        let w = range();
        // right wedge point and left wedge point
        let v1 = State::new(3.0, 0.0);
        let v2 = State::new(-3.0, 0.0);
        assert!(f_omega(&p, -1.0, v1) > 0.0 && f_omega(&p, 1.0, v1) < 0.0);
        let r = closed_orbit(&p, &w, v1, v2).unwrap();
        assert!(r.endpoint_error <= 1e-6, "loop error {}", r.endpoint_error);
        assert_eq!(r.schedule.segments.len(), 4);

        // equal endpoints violate the sign pattern
        assert!(matches!(
            closed_orbit(&p, &w, v1, v1),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn closed_orbit_passes_through_second_point() {
        let p = SystemParams::new(1.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0).unwrap();
        let w = range();
        let v1 = State::new(2.5, -0.5);
        let v2 = State::new(-2.0, -0.3);
        assert!(f_omega(&p, -1.0, v2) < 0.0 && f_omega(&p, 1.0, v2) > 0.0);
        let r = closed_orbit(&p, &w, v1, v2).unwrap();
        // replay the first two legs only
        let first_half = ControlSchedule::new(r.schedule.segments[..2].to_vec());
        let mid = propagate(CaseTag::Contracting, &p, v1, &first_half).unwrap();
        assert!(mid.dist(&v2) <= 1e-6, "midpoint gap {}", mid.dist(&v2));
    }

    #[test]
    fn complement_random_pairs_and_rejection() {
        let p = SystemParams::new(1.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0).unwrap();
        let w = range();
        let desc = &control_sets(CaseTag::Contracting, &p, &w).unwrap()[0];
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut done = 0;
        while done < 25 {
            let v0 = State::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            let v1 = State::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
            let inside = |v: State| membership(desc, v, 1e-6).verdict == Verdict::Inside;
            if !inside(v0) || !inside(v1) {
                continue;
            }
            let r = steer_complement(&p, &w, v0, v1).unwrap();
            assert!(r.endpoint_error <= 1e-5, "{v0:?} -> {v1:?}: {} via {}", r.endpoint_error, r.construction);
            done += 1;
        }

        // a point above the anchor curves is rejected
        assert_eq!(
            steer_complement(&p, &w, State::new(0.0, -0.5), State::new(0.0, 5.0)),
            Err(Error::NotInControlSet)
        );
    }

    #[test]
    fn band_steering_examples() {
        let p = SystemParams::new(0.5, 1.0, 0.0, 0.0, -1.0, 1.0, 1.0).unwrap();
        let w = range();
        let r = steer_band(&p, &w, State::new(0.0, 0.0), State::new(0.0, 1.0)).unwrap();
        assert!(r.endpoint_error <= 1e-6, "{}", r.endpoint_error);
        // downward shifts must also close
        let r = steer_band(&p, &w, State::new(0.3, 0.5), State::new(-0.4, -2.0)).unwrap();
        assert!(r.endpoint_error <= 1e-6, "{}", r.endpoint_error);

        // abscissa outside the control range is rejected
        assert_eq!(
            steer_band(&p, &w, State::new(0.0, 0.0), State::new(1.5, 0.0)),
            Err(Error::NotInControlSet)
        );
    }

    #[test]
    fn band_steering_random_pairs() {
        let p = SystemParams::new(0.5, 1.0, 0.0, 0.0, -1.0, 1.0, 1.0).unwrap();
        let w = range();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..40 {
            let v0 = State::new(rng.gen_range(-0.9..0.9), rng.gen_range(-3.0..3.0));
            let v1 = State::new(rng.gen_range(-0.9..0.9), rng.gen_range(-3.0..3.0));
            let r = steer_band(&p, &w, v0, v1).unwrap();
            assert!(r.endpoint_error <= 1e-6, "{v0:?} -> {v1:?}: {}", r.endpoint_error);
        }
    }
}
