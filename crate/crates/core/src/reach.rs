//! Brute-force reachability oracle: grid the window, connect cells by one
//! time-quantum exact transitions under sampled controls, and extract the
//! mutually reachable regions as strongly connected components.

pub use crate::grid::GridWindow;

use crate::control_sets::{membership, ControlSetDescription, Verdict};
use crate::flows::{exact_segment_unchecked, State};
use crate::system::{CaseTag, ControlRange, SystemParams};
use crate::{Error, Result};
use rayon::prelude::*;

/// Directed one-step reachability graph over the grid cells.
#[derive(Clone, Debug, PartialEq)]
pub struct ReachGraph {
    pub win: GridWindow,
    pub dt: f64,
    pub controls: Vec<f64>,
    /// edges[i] holds the sorted, deduplicated successor cells of cell i
    pub edges: Vec<Vec<u32>>,
}

impl ReachGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(|e| e.len()).sum()
    }

    /// CSV export: header `from_cell,to_cell`.
    pub fn edges_csv(&self) -> String {
        let mut out = String::from("from_cell,to_cell\n");
        for (i, outs) in self.edges.iter().enumerate() {
            for j in outs {
                out.push_str(&format!("{},{}\n", i, j));
            }
        }
        out
    }
}

/// Control samples: uniform over the range with both endpoints, with the
/// value closest to zero snapped to exactly zero.
fn control_samples(w: &ControlRange, n: usize) -> Vec<f64> {
    let mut controls: Vec<f64> = (0..n)
        .map(|i| w.omega_minus + (w.omega_plus - w.omega_minus) * i as f64 / (n - 1) as f64)
        .collect();
    controls[0] = w.omega_minus;
    controls[n - 1] = w.omega_plus;
    let mut snap = 0;
    for (i, c) in controls.iter().enumerate() {
        if c.abs() < controls[snap].abs() {
            snap = i;
        }
    }
    controls[snap] = 0.0;
    controls
}

/// Build the transition graph. Transitions that leave the window are dropped
/// rather than clamped. Deterministic: per-cell successor lists are built
/// independently and collected in cell order, so the result is identical
/// across thread counts.
pub fn build_reach_graph(
    tag: CaseTag,
    p: &SystemParams,
    w: &ControlRange,
    win: &GridWindow,
    dt: f64,
    n_controls: usize,
) -> Result<ReachGraph> {
    if !(dt > 0.0) {
        return Err(Error::Constraint("time quantum must be positive".into()));
    }
    if n_controls < 3 {
        return Err(Error::Constraint("need at least 3 control samples".into()));
    }
    if win.n_s() < 20 || win.n_t() < 20 {
        return Err(Error::WindowTooCoarse);
    }
    if matches!(tag, CaseTag::Reducible | CaseTag::NonSingular) {
        return Err(Error::UnsupportedCase(tag));
    }
    let controls = control_samples(w, n_controls);
    let n = win.cell_count();
    let edges: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|idx| {
            let from = win.center(idx);
            let mut outs: Vec<u32> = controls
                .iter()
                .filter_map(|&omega| {
                    let to = exact_segment_unchecked(tag, p, from, omega, dt);
                    win.cell_of(to).map(|j| j as u32)
                })
                .collect();
            outs.sort_unstable();
            outs.dedup();
            outs
        })
        .collect();
    Ok(ReachGraph { win: *win, dt, controls, edges })
}

/// Strongly connected components with at least one internal edge (size two
/// or more, or a single cell with a self-loop): the approximate version of
/// the stay-inside property. Components are returned with sorted cells,
/// ordered by their smallest cell.
pub fn approx_control_sets(g: &ReachGraph) -> Vec<Vec<u32>> {
    let sccs = tarjan_scc(&g.edges);
    let mut keep: Vec<Vec<u32>> = sccs
        .into_iter()
        .filter(|comp| {
            comp.len() > 1 || {
                let c = comp[0];
                g.edges[c as usize].binary_search(&c).is_ok()
            }
        })
        .map(|mut comp| {
            comp.sort_unstable();
            comp
        })
        .collect();
    keep.sort_by_key(|c| c[0]);
    keep
}

/// Iterative Tarjan strongly-connected-components over adjacency lists.
fn tarjan_scc(adj: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let n = adj.len();
    const UNSET: u32 = u32::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next = 0u32;
    let mut out: Vec<Vec<u32>> = Vec::new();
    // call frames: (node, position in its adjacency list)
    let mut frames: Vec<(u32, usize)> = Vec::new();

    for root in 0..n as u32 {
        if index[root as usize] != UNSET {
            continue;
        }
        frames.push((root, 0));
        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            let vi = v as usize;
            if *pos == 0 {
                index[vi] = next;
                low[vi] = next;
                next += 1;
                stack.push(v);
                on_stack[vi] = true;
            }
            let mut descended = false;
            while *pos < adj[vi].len() {
                let u = adj[vi][*pos];
                *pos += 1;
                let ui = u as usize;
                if index[ui] == UNSET {
                    frames.push((u, 0));
                    descended = true;
                    break;
                } else if on_stack[ui] {
                    low[vi] = low[vi].min(index[ui]);
                }
            }
            if descended {
                continue;
            }
            // v is finished
            if low[vi] == index[vi] {
                let mut comp = Vec::new();
                loop {
                    let u = stack.pop().expect("tarjan stack underflow");
                    on_stack[u as usize] = false;
                    comp.push(u);
                    if u == v {
                        break;
                    }
                }
                out.push(comp);
            }
            frames.pop();
            if let Some(&mut (parent, _)) = frames.last_mut() {
                let pi = parent as usize;
                low[pi] = low[pi].min(low[vi]);
            }
        }
    }
    out
}

/// CSV export of components: header `cell_index,component_id`.
pub fn components_csv(sets: &[Vec<u32>]) -> String {
    let mut out = String::from("cell_index,component_id\n");
    for (id, comp) in sets.iter().enumerate() {
        for c in comp {
            out.push_str(&format!("{},{}\n", c, id));
        }
    }
    out
}

/// Fraction of interior, non-boundary cells whose analytic inside/outside
/// verdict matches oracle membership (cell belongs to some component). The
/// boundary band uses the cell size as tolerance.
pub fn compare(desc: &ControlSetDescription, sets: &[Vec<u32>], win: &GridWindow) -> f64 {
    let mut member = vec![false; win.cell_count()];
    for comp in sets {
        for &c in comp {
            member[c as usize] = true;
        }
    }
    let mut total = 0usize;
    let mut agree = 0usize;
    for idx in 0..win.cell_count() {
        if !win.is_interior(idx) {
            continue;
        }
        let verdict = membership(desc, win.center(idx), win.h).verdict;
        let analytic_in = match verdict {
            Verdict::Boundary(_) => continue,
            Verdict::Inside => true,
            Verdict::Outside => false,
        };
        total += 1;
        if analytic_in == member[idx] {
            agree += 1;
        }
    }
    if total == 0 {
        return 1.0;
    }
    agree as f64 / total as f64
}

/// Width (in s) and center offset of a component, measured on cell centers
/// and padded by one cell size; used to check the collapse of the singleton
/// families.
pub fn component_s_extent(comp: &[u32], win: &GridWindow) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &c in comp {
        let s = win.center(c as usize).s;
        lo = lo.min(s);
        hi = hi.max(s);
    }
    (hi - lo + win.h, (hi + lo) / 2.0)
}

/// Convenience wrapper for planners and tests: centers of a component.
pub fn component_centers(comp: &[u32], win: &GridWindow) -> Vec<State> {
    comp.iter().map(|&c| win.center(c as usize)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control_sets::control_sets;
    use crate::system::CaseTag;

    fn range() -> ControlRange {
        ControlRange::new(-1.0, 1.0).unwrap()
    }

    #[test]
    fn control_sampling_includes_extremes_and_zero() {
        let c = control_samples(&range(), 5);
        assert_eq!(c, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let c = control_samples(&ControlRange::new(-0.4, 1.2).unwrap(), 5);
        assert_eq!(c[0], -0.4);
        assert_eq!(c[4], 1.2);
        assert!(c.contains(&0.0));
    }

    #[test]
    fn tarjan_on_known_graph() {
        // 0 <-> 1, 2 -> 0, 3 isolated with self loop
        let adj = vec![vec![1], vec![0], vec![0], vec![3]];
        let mut sccs = tarjan_scc(&adj);
        for c in &mut sccs {
            c.sort_unstable();
        }
        sccs.sort();
        assert!(sccs.contains(&vec![0, 1]));
        assert!(sccs.contains(&vec![2]));
        assert!(sccs.contains(&vec![3]));
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = SystemParams::new(0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0).unwrap();
        let win = GridWindow::new(-1.0, 1.0, -1.0, 1.0, 0.5).unwrap();
        assert_eq!(
            build_reach_graph(CaseTag::Flat, &p, &range(), &win, 0.1, 5),
            Err(Error::WindowTooCoarse)
        );
        let win = GridWindow::new(-1.0, 1.0, -1.0, 1.0, 0.05).unwrap();
        assert!(build_reach_graph(CaseTag::Flat, &p, &range(), &win, 0.1, 2).is_err());
        assert!(build_reach_graph(CaseTag::Flat, &p, &range(), &win, 0.0, 5).is_err());
    }

    #[test]
    fn zero_drift_cells_reach_horizontal_neighbors() {
        // s' = w, t' = 0 at gamma = c = a = 0 is pure horizontal motion;
        // rank is deficient but transitions are still well defined
        let p = SystemParams::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let win = GridWindow::new(-1.0, 1.0, -1.0, 1.0, 0.05).unwrap();
        let g = build_reach_graph(CaseTag::Flat, &p, &range(), &win, 0.1, 5).unwrap();
        let idx = win.cell_of(State::new(0.025, 0.025)).unwrap();
        let left = win.cell_of(State::new(0.025 - 0.1, 0.025)).unwrap() as u32;
        let right = win.cell_of(State::new(0.025 + 0.1, 0.025)).unwrap() as u32;
        assert!(g.edges[idx].contains(&left));
        assert!(g.edges[idx].contains(&right));
        assert!(g.edges[left as usize].contains(&(idx as u32)));
        assert!(g.edges[right as usize].contains(&(idx as u32)));
    }

    #[test]
    fn band_cells_outside_interval_only_contract_inward() {
        // relaxation toward the control interval: a cell right of it never
        // receives an edge from cells even further right
        let p = SystemParams::new(0.0, 1.0, 0.0, 0.0, -1.0, 1.0, 1.0).unwrap();
        let win = GridWindow::new(-3.0, 3.0, -3.0, 3.0, 0.1).unwrap();
        let g = build_reach_graph(CaseTag::Band, &p, &range(), &win, 0.1, 5).unwrap();
        for from in 0..win.cell_count() {
            let s_from = win.center(from).s;
            if s_from <= 1.0 {
                continue;
            }
            for &to in &g.edges[from] {
                assert!(
                    win.center(to as usize).s <= s_from + win.h / 2.0,
                    "outward move right of the interval"
                );
            }
        }
    }

    #[test]
    fn flat_graph_interior_is_strongly_connected() {
        // control-dominated field: both vertical hop directions register in
        // every column, half controls translate horizontally
        let p = SystemParams::new(0.0, 1.0, 0.55, 0.0, 0.0, 0.02, 0.0).unwrap();
        let win = GridWindow::new(-2.0, 2.0, -2.0, 2.0, 0.1).unwrap();
        let g = build_reach_graph(CaseTag::Flat, &p, &range(), &win, 0.1, 5).unwrap();
        let sets = approx_control_sets(&g);
        let biggest = sets.iter().map(|c| c.len()).max().unwrap();
        let interior = (0..win.cell_count()).filter(|&i| win.is_interior(i)).count();
        assert!(biggest as f64 >= 0.9 * interior as f64, "{biggest} of {interior}");
    }

    #[test]
    fn determinism_across_thread_counts() {
        let p = SystemParams::new(0.0, 1.0, 1.0, 0.0, 0.0, 0.0, -1.0).unwrap();
        let win = GridWindow::new(-2.0, 2.0, -2.0, 2.0, 0.1).unwrap();
        let g1 = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| build_reach_graph(CaseTag::Contracting, &p, &range(), &win, 0.1, 5).unwrap());
        let g4 = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| build_reach_graph(CaseTag::Contracting, &p, &range(), &win, 0.1, 5).unwrap());
        assert_eq!(g1.edges, g4.edges);
    }

    #[test]
    fn strip_agreement_on_a_coarse_grid() {
        let p = SystemParams::new(0.0, 1.0, 1.0, 0.0, 0.0, 0.0, -1.0).unwrap();
        let w = range();
        let win = GridWindow::new(-3.0, 3.0, -3.0, 3.0, 0.1).unwrap();
        let g = build_reach_graph(CaseTag::Contracting, &p, &w, &win, 0.1, 5).unwrap();
        let sets = approx_control_sets(&g);
        let desc = &control_sets(CaseTag::Contracting, &p, &w).unwrap()[0];
        let score = compare(desc, &sets, &win);
        assert!(score >= 0.9, "agreement {score}");
    }

    #[test]
    fn graph_and_component_csv_shapes() {
        let p = SystemParams::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.2, 0.0).unwrap();
        let win = GridWindow::new(-1.0, 1.0, -1.0, 1.0, 0.1).unwrap();
        let g = build_reach_graph(CaseTag::Flat, &p, &range(), &win, 0.1, 3).unwrap();
        assert!(g.edges_csv().starts_with("from_cell,to_cell\n"));
        let sets = approx_control_sets(&g);
        assert!(components_csv(&sets).starts_with("cell_index,component_id\n"));
    }
}
