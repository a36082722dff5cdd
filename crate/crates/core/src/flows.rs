//! Closed-form constant-control solutions per degenerate case, piecewise
//! constant concatenation, the auxiliary functionals of the contracting and
//! band cases, and an independent fixed-step RK4 integrator.

use crate::system::{CaseTag, SystemParams};
use crate::{Error, Result};

/// A point of the plane coset space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct State {
    pub s: f64,
    pub t: f64,
}

impl State {
    pub fn new(s: f64, t: f64) -> Self {
        State { s, t }
    }

    pub fn dist(&self, other: &State) -> f64 {
        ((self.s - other.s).powi(2) + (self.t - other.t).powi(2)).sqrt()
    }
}

/// One constant-control piece of a schedule; durations are nonnegative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlSegment {
    pub duration: f64,
    pub omega: f64,
}

impl ControlSegment {
    pub fn new(duration: f64, omega: f64) -> Result<Self> {
        if !(duration >= 0.0) || !duration.is_finite() || !omega.is_finite() {
            return Err(Error::Constraint("segment duration must be finite and >= 0".into()));
        }
        Ok(ControlSegment { duration, omega })
    }
}

/// Ordered list of constant-control segments.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ControlSchedule {
    pub segments: Vec<ControlSegment>,
}

impl ControlSchedule {
    pub fn new(segments: Vec<ControlSegment>) -> Self {
        ControlSchedule { segments }
    }

    pub fn empty() -> Self {
        ControlSchedule { segments: Vec::new() }
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let segments = pairs
            .iter()
            .map(|&(d, w)| ControlSegment::new(d, w))
            .collect::<Result<Vec<_>>>()?;
        Ok(ControlSchedule { segments })
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// CSV serialization: header `duration,omega`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("duration,omega\n");
        for seg in &self.segments {
            out.push_str(&format!("{},{}\n", crate::fmt_f64(seg.duration), crate::fmt_f64(seg.omega)));
        }
        out
    }

    /// Parse CSV rows `duration,omega`; a header line is tolerated.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with("duration")) {
                continue;
            }
            let mut it = line.split(',');
            let d = it
                .next()
                .and_then(|x| x.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Constraint(format!("bad schedule row {}", i + 1)))?;
            let w = it
                .next()
                .and_then(|x| x.trim().parse::<f64>().ok())
                .ok_or_else(|| Error::Constraint(format!("bad schedule row {}", i + 1)))?;
            pairs.push((d, w));
        }
        ControlSchedule::from_pairs(&pairs)
    }
}

/// Solution curve sampled at strictly increasing times starting from 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<(f64, State)>,
}

impl Trajectory {
    pub fn final_state(&self) -> State {
        self.samples.last().expect("trajectory is never empty").1
    }

    pub fn final_time(&self) -> f64 {
        self.samples.last().expect("trajectory is never empty").0
    }

    /// CSV serialization: header `time,s,t`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,s,t\n");
        for (time, st) in &self.samples {
            out.push_str(&format!(
                "{},{},{}\n",
                crate::fmt_f64(*time),
                crate::fmt_f64(st.s),
                crate::fmt_f64(st.t)
            ));
        }
        out
    }
}

/// e^x - 1 - x with a series below |x| < 1e-4 to avoid the cancellation in
/// the removable singularity of (e^x - 1 - x)/x^2.
pub(crate) fn exp_m1_m_x(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        x2 * (0.5 + x / 6.0 + x2 / 24.0 + x2 * x / 120.0)
    } else {
        x.exp_m1() - x
    }
}

fn check_normal_pattern(tag: CaseTag, p: &SystemParams) -> Result<()> {
    let ok = match tag {
        CaseTag::Flat => p.alpha == 0.0 && p.beta == 0.0 && p.lambda == 0.0,
        CaseTag::Contracting => {
            p.alpha == 0.0 && p.beta == 0.0 && p.gamma == 0.0 && p.b == 1.0 && p.lambda != 0.0
        }
        CaseTag::Band => {
            p.alpha == 0.0 && p.beta != 0.0 && p.lambda == -p.beta && p.c == 0.0 && p.b == -p.beta
        }
        CaseTag::Quadratic => {
            p.alpha != 0.0 && p.beta == 0.0 && p.lambda == 0.0 && p.gamma == 0.0 && p.c == 0.0
        }
        CaseTag::Reducible | CaseTag::NonSingular => false,
    };
    if ok {
        Ok(())
    } else if matches!(tag, CaseTag::Reducible | CaseTag::NonSingular) {
        Err(Error::UnsupportedCase(tag))
    } else {
        Err(Error::Constraint(format!("parameters are not in {tag:?} normal form")))
    }
}

/// Closed-form constant-control solution at time `tau` (which may be
/// negative) for a system in the normal form of `tag`.
pub fn exact_segment(tag: CaseTag, p: &SystemParams, v0: State, omega: f64, tau: f64) -> Result<State> {
    check_normal_pattern(tag, p)?;
    Ok(exact_segment_unchecked(tag, p, v0, omega, tau))
}

pub(crate) fn exact_segment_unchecked(
    tag: CaseTag,
    p: &SystemParams,
    v0: State,
    omega: f64,
    tau: f64,
) -> State {
    match tag {
        CaseTag::Flat => {
            // s' = w b, t' = (a w + gamma) s + c w
            let s = v0.s + omega * p.b * tau;
            let r = p.a * omega + p.gamma;
            let t = 0.5 * p.b * omega * r * tau * tau + (v0.s * r + p.c * omega) * tau + v0.t;
            State::new(s, t)
        }
        CaseTag::Contracting => {
            // s' = w, t' = lambda t + w (c + a s); the second component is
            // recovered from the exponential identity of the affine
            // functional below.
            let s = v0.s + tau * omega;
            let f0 = f_omega(p, omega, v0);
            let l2 = p.lambda * p.lambda;
            let t = ((p.lambda * tau).exp() * f0
                - omega * (p.lambda * (p.c + p.a * s) + p.a * omega))
                / l2;
            State::new(s, t)
        }
        CaseTag::Band => {
            // s' = beta (s - w), t' = (a w + gamma) s
            let e = (p.beta * tau).exp();
            let s = e * (v0.s - omega) + omega;
            let drift = (p.a * omega + p.gamma)
                * (omega * tau + (v0.s - omega) * (p.beta * tau).exp_m1() / p.beta);
            State::new(s, v0.t + drift)
        }
        CaseTag::Quadratic => {
            // s' = w b, t' = alpha s^2 / 2 + a w s, polynomial in tau
            let s0 = v0.s;
            let wb = omega * p.b;
            let i1 = s0 * tau + 0.5 * wb * tau * tau; // integral of s
            let i2 = s0 * s0 * tau + s0 * wb * tau * tau + wb * wb * tau * tau * tau / 3.0;
            let t = v0.t + 0.5 * p.alpha * i2 + p.a * omega * i1;
            State::new(s0 + wb * tau, t)
        }
        CaseTag::Reducible | CaseTag::NonSingular => unreachable!("rejected by pattern check"),
    }
}

/// Concatenate exact segments over a schedule, sampling every `sample_step`
/// within each segment plus every segment endpoint.
pub fn simulate(
    tag: CaseTag,
    p: &SystemParams,
    v0: State,
    schedule: &ControlSchedule,
    sample_step: f64,
) -> Result<Trajectory> {
    check_normal_pattern(tag, p)?;
    if !(sample_step > 0.0) {
        return Err(Error::Constraint("sample step must be positive".into()));
    }
    let mut samples = vec![(0.0, v0)];
    let mut t0 = 0.0;
    let mut v = v0;
    for seg in &schedule.segments {
        if seg.duration == 0.0 {
            continue;
        }
        let mut local = sample_step;
        while local < seg.duration {
            let st = exact_segment_unchecked(tag, p, v, seg.omega, local);
            samples.push((t0 + local, st));
            local += sample_step;
        }
        v = exact_segment_unchecked(tag, p, v, seg.omega, seg.duration);
        t0 += seg.duration;
        samples.push((t0, v));
    }
    Ok(Trajectory { samples })
}

/// Final state of a schedule without intermediate samples.
pub fn propagate(tag: CaseTag, p: &SystemParams, v0: State, schedule: &ControlSchedule) -> Result<State> {
    check_normal_pattern(tag, p)?;
    let mut v = v0;
    for seg in &schedule.segments {
        v = exact_segment_unchecked(tag, p, v, seg.omega, seg.duration);
    }
    Ok(v)
}

/// Affine functional of the contracting normal form:
/// F_w(s, t) = lambda^2 t + w (lambda (c + a s) + a w).
///
/// Its zero set is a line, and along the constant-control solution it scales
/// by e^{lambda tau}; the zero lines are the trajectory asymptotes.
pub fn f_omega(p: &SystemParams, omega: f64, v: State) -> f64 {
    p.lambda * p.lambda * v.t + omega * (p.lambda * (p.c + p.a * v.s) + p.a * omega)
}

/// Residual |F_w(solution at tau) - e^{lambda tau} F_w(v)| of the exponential
/// identity; identically ~0 and used as a test primitive.
pub fn flow_identity_residual(p: &SystemParams, omega: f64, v: State, tau: f64) -> f64 {
    let end = exact_segment_unchecked(CaseTag::Contracting, p, v, omega, tau);
    (f_omega(p, omega, end) - (p.lambda * tau).exp() * f_omega(p, omega, v)).abs()
}

/// Canonical sigma for [`lyapunov_f`]: strictly dominates |w| on the range.
pub fn sigma_for_f(w: &crate::system::ControlRange) -> f64 {
    (-w.omega_minus).max(w.omega_plus) + 1.0
}

/// Log-barrier functional of the band normal form with gamma = 0:
/// F(s, t) = t + (a sigma / beta) s - (a sigma^2 / beta) ln(s + sigma).
pub fn lyapunov_f(p: &SystemParams, sigma: f64, v: State) -> Result<f64> {
    if v.s + sigma <= 0.0 {
        return Err(Error::Domain(format!("s + sigma = {} must be positive", v.s + sigma)));
    }
    let k = p.a * sigma / p.beta;
    Ok(v.t + k * v.s - k * sigma * (v.s + sigma).ln())
}

/// Trajectory derivative of [`lyapunov_f`]: a (w + sigma) s^2 / (s + sigma).
pub fn lyapunov_f_rate(p: &SystemParams, sigma: f64, v: State, omega: f64) -> f64 {
    p.a * (omega + sigma) * v.s * v.s / (v.s + sigma)
}

/// Canonical sigma for [`lyapunov_g`]; the same expression covers both signs
/// of the quadratic coefficient. Fails only when that coefficient vanishes.
pub fn sigma_for_g(p: &SystemParams, w: &crate::system::ControlRange) -> Result<f64> {
    if p.alpha == 0.0 {
        return Err(Error::NoValidSigma);
    }
    let wmax = (-w.omega_minus).max(w.omega_plus);
    // the stored tuple drives t' with alpha/2, which is the coefficient
    // sigma has to dominate
    Ok((1.0 + wmax * p.b.abs()) / (0.5 * p.alpha))
}

/// Cubic functional of the quadratic normal form, written for the dynamics
/// t' = (alpha/2) s^2 + a w s of the stored parameters:
/// G(s, t) = 6 sigma t - 6 ((a/2)/b) sigma s^2 + 2 s^3.
pub fn lyapunov_g(p: &SystemParams, sigma: f64, v: State) -> f64 {
    6.0 * sigma * v.t - 3.0 * (p.a / p.b) * sigma * v.s * v.s + 2.0 * v.s * v.s * v.s
}

/// Trajectory derivative of [`lyapunov_g`]: 6 (sigma alpha/2 + w b) s^2.
pub fn lyapunov_g_rate(p: &SystemParams, sigma: f64, v: State, omega: f64) -> f64 {
    6.0 * (sigma * 0.5 * p.alpha + omega * p.b) * v.s * v.s
}

/// Right-hand side of the general system (any parameters, including the
/// non-degenerate ones).
pub fn vector_field(p: &SystemParams, v: State, omega: f64) -> (f64, f64) {
    (
        p.beta * v.s + omega * p.b,
        (p.lambda + p.beta) * v.t + 0.5 * p.alpha * v.s * v.s + p.gamma * v.s + omega * (p.c + p.a * v.s),
    )
}

fn rk4_step(p: &SystemParams, v: State, omega: f64, h: f64) -> State {
    let k1 = vector_field(p, v, omega);
    let k2 = vector_field(p, State::new(v.s + 0.5 * h * k1.0, v.t + 0.5 * h * k1.1), omega);
    let k3 = vector_field(p, State::new(v.s + 0.5 * h * k2.0, v.t + 0.5 * h * k2.1), omega);
    let k4 = vector_field(p, State::new(v.s + h * k3.0, v.t + h * k3.1), omega);
    State::new(
        v.s + h * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0) / 6.0,
        v.t + h * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1) / 6.0,
    )
}

/// Classical fixed-step RK4 over one constant-control stretch; `tau` may be
/// negative, in which case the steps run backward.
pub fn rk4_segment(p: &SystemParams, v0: State, omega: f64, tau: f64, step: f64) -> State {
    assert!(step > 0.0, "step must be positive");
    if tau == 0.0 {
        return v0;
    }
    let n = (tau.abs() / step).ceil().max(1.0) as usize;
    let h = tau / n as f64;
    let mut v = v0;
    for _ in 0..n {
        v = rk4_step(p, v, omega, h);
    }
    v
}

/// Classical fixed-step RK4 over a schedule on the raw vector field.
pub fn rk4_integrate(p: &SystemParams, v0: State, schedule: &ControlSchedule, step: f64) -> Trajectory {
    assert!(step > 0.0, "step must be positive");
    let mut samples = vec![(0.0, v0)];
    let mut v = v0;
    let mut t0 = 0.0;
    for seg in &schedule.segments {
        if seg.duration == 0.0 {
            continue;
        }
        let n = (seg.duration / step).ceil().max(1.0) as usize;
        let h = seg.duration / n as f64;
        for i in 0..n {
            v = rk4_step(p, v, seg.omega, h);
            samples.push((t0 + (i + 1) as f64 * h, v));
        }
        t0 += seg.duration;
    }
    Trajectory { samples }
}
