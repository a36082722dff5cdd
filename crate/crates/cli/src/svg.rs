//! Deterministic SVG phase portraits: region shading from the membership
//! raster, the zero lines and anchor curves of the contracting chart,
//! orbit parabolas of the flat chart, and optional trajectories.

use hlcs_core::control_sets::{membership, ControlSetDescription, Verdict};
use hlcs_core::flows::{exact_segment, f_omega, State, Trajectory};
use hlcs_core::grid::GridWindow;
use hlcs_core::system::{CaseTag, ControlRange, PolyMap2, SystemParams};

const SIZE: f64 = 720.0;
const MARGIN: f64 = 40.0;

struct Frame {
    win: GridWindow,
}

impl Frame {
    fn x(&self, s: f64) -> f64 {
        MARGIN + (s - self.win.s_min) / (self.win.s_max - self.win.s_min) * SIZE
    }

    fn y(&self, t: f64) -> f64 {
        MARGIN + (self.win.t_max - t) / (self.win.t_max - self.win.t_min) * SIZE
    }

    fn fmt(&self, v: f64) -> String {
        format!("{:.2}", v)
    }
}

fn polyline(frame: &Frame, pts: &[(f64, f64)], style: &str) -> String {
    let mut out = String::from("<polyline fill=\"none\" ");
    out.push_str(style);
    out.push_str(" points=\"");
    for (s, t) in pts {
        if !s.is_finite() || !t.is_finite() {
            continue;
        }
        out.push_str(&format!("{},{} ", frame.fmt(frame.x(*s)), frame.fmt(frame.y(*t))));
    }
    out.push_str("\"/>\n");
    out
}

/// Render the phase portrait of a (possibly pulled back) control-set
/// description over the window, with chart-aware overlays.
pub fn render(
    desc: &ControlSetDescription,
    tag: CaseTag,
    normalized: &SystemParams,
    map: &PolyMap2,
    range: &ControlRange,
    win: &GridWindow,
    trajectory: Option<&Trajectory>,
) -> String {
    let frame = Frame { win: *win };
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\">\n",
        SIZE + 2.0 * MARGIN,
        SIZE + 2.0 * MARGIN
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // region shading on a coarse raster, compressed to per-row runs
    let n = 120usize;
    let ds = (win.s_max - win.s_min) / n as f64;
    let dt = (win.t_max - win.t_min) / n as f64;
    for j in 0..n {
        let t = win.t_min + (j as f64 + 0.5) * dt;
        let mut run_start: Option<usize> = None;
        let mut run_kind = 0i8;
        for i in 0..=n {
            let code = if i < n {
                let s = win.s_min + (i as f64 + 0.5) * ds;
                match membership(desc, State::new(s, t), dt.max(ds)).verdict {
                    Verdict::Inside => 1,
                    Verdict::Boundary(_) => 2,
                    Verdict::Outside => 0,
                }
            } else {
                -1
            };
            if run_start.map(|_| run_kind) != Some(code) {
                if let Some(start) = run_start {
                    if run_kind > 0 {
                        let fill = if run_kind == 1 { "#9ecae1" } else { "#fdd0a2" };
                        out.push_str(&format!(
                            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
                            frame.fmt(frame.x(win.s_min + start as f64 * ds)),
                            frame.fmt(frame.y(t + dt / 2.0)),
                            frame.fmt((i - start) as f64 * ds / (win.s_max - win.s_min) * SIZE),
                            frame.fmt(dt / (win.t_max - win.t_min) * SIZE),
                            fill
                        ));
                    }
                }
                run_start = if code >= 0 { Some(i) } else { None };
                run_kind = code.max(0);
            }
        }
    }

    // chart overlays, drawn in original coordinates through the inverse map
    let inv = map.inverse();
    let back = |s: f64, t: f64| inv.forward(s, t);
    match tag {
        CaseTag::Contracting => {
            // zero lines of the extreme-control functionals
            for omega in [range.omega_minus, range.omega_plus] {
                let pts: Vec<(f64, f64)> = (0..=200)
                    .map(|k| {
                        let s = win.s_min + (win.s_max - win.s_min) * k as f64 / 200.0;
                        let t = -omega
                            * (normalized.lambda * (normalized.c + normalized.a * s)
                                + normalized.a * omega)
                            / (normalized.lambda * normalized.lambda);
                        back(s, t)
                    })
                    .collect();
                out.push_str(&polyline(&frame, &pts, "stroke=\"#636363\" stroke-dasharray=\"6 4\" stroke-width=\"1.5\""));
            }
            if normalized.a > 0.0 {
                // extremal curves from the anchor point
                let va = State::new(-normalized.c / normalized.a, 0.0);
                for omega in [range.omega_minus, range.omega_plus] {
                    let pts: Vec<(f64, f64)> = (0..=300)
                        .map(|k| {
                            let tau = 8.0 * k as f64 / 300.0;
                            let v = exact_segment(CaseTag::Contracting, normalized, va, omega, tau)
                                .unwrap();
                            back(v.s, v.t)
                        })
                        .collect();
                    out.push_str(&polyline(&frame, &pts, "stroke=\"#e6550d\" stroke-width=\"1.5\""));
                }
                let _ = f_omega(normalized, range.omega_plus, va);
            }
        }
        CaseTag::Flat => {
            // orbit parabolas through the window center for both extremes
            for omega in [range.omega_minus / 2.0, range.omega_plus / 2.0] {
                let pts: Vec<(f64, f64)> = (0..=300)
                    .map(|k| {
                        let tau = -6.0 + 12.0 * k as f64 / 300.0;
                        let v = exact_segment(CaseTag::Flat, normalized, State::new(0.0, 0.0), omega, tau)
                            .unwrap();
                        back(v.s, v.t)
                    })
                    .collect();
                out.push_str(&polyline(&frame, &pts, "stroke=\"#e6550d\" stroke-width=\"1.5\""));
            }
        }
        CaseTag::Band | CaseTag::Quadratic => {
            // central fiber and, for the band, the control interval borders
            let fibers: Vec<f64> = if tag == CaseTag::Band && normalized.gamma != 0.0 {
                vec![range.omega_minus, 0.0, range.omega_plus]
            } else {
                vec![0.0]
            };
            for sf in fibers {
                let pts: Vec<(f64, f64)> = (0..=100)
                    .map(|k| {
                        let t = win.t_min + (win.t_max - win.t_min) * k as f64 / 100.0;
                        back(sf, t)
                    })
                    .collect();
                out.push_str(&polyline(&frame, &pts, "stroke=\"#636363\" stroke-dasharray=\"6 4\" stroke-width=\"1.5\""));
            }
        }
        _ => {}
    }

    if let Some(tr) = trajectory {
        let pts: Vec<(f64, f64)> = tr.samples.iter().map(|(_, v)| (v.s, v.t)).collect();
        out.push_str(&polyline(&frame, &pts, "stroke=\"#a50f15\" stroke-width=\"2\""));
    }

    // axes and frame
    let style = "stroke=\"black\" stroke-width=\"1\"";
    if win.s_min < 0.0 && win.s_max > 0.0 {
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {} opacity=\"0.4\"/>\n",
            frame.fmt(frame.x(0.0)),
            frame.fmt(frame.y(win.t_min)),
            frame.fmt(frame.x(0.0)),
            frame.fmt(frame.y(win.t_max)),
            style
        ));
    }
    if win.t_min < 0.0 && win.t_max > 0.0 {
        out.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {} opacity=\"0.4\"/>\n",
            frame.fmt(frame.x(win.s_min)),
            frame.fmt(frame.y(0.0)),
            frame.fmt(frame.x(win.s_max)),
            frame.fmt(frame.y(0.0)),
            style
        ));
    }
    out.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" {}/>\n",
        MARGIN, MARGIN, SIZE, SIZE, style
    ));
    for k in 0..=4 {
        let s = win.s_min + (win.s_max - win.s_min) * k as f64 / 4.0;
        let t = win.t_min + (win.t_max - win.t_min) * k as f64 / 4.0;
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            frame.fmt(frame.x(s)),
            frame.fmt(SIZE + MARGIN + 16.0),
            s
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{}</text>\n",
            frame.fmt(MARGIN - 6.0),
            frame.fmt(frame.y(t) + 4.0),
            t
        ));
    }
    out.push_str("</svg>\n");
    out
}
