//! Uniform cell grid over a rectangular window of the plane.

use crate::flows::State;
use crate::{Error, Result};

/// Rectangular window subdivided into square cells of side `h`; the grid
/// covers `[s_min, s_min + n_s h) x [t_min, t_min + n_t h)` where the counts
/// are the rounded quotients of the side lengths by `h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridWindow {
    pub s_min: f64,
    pub s_max: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub h: f64,
}

impl GridWindow {
    pub fn new(s_min: f64, s_max: f64, t_min: f64, t_max: f64, h: f64) -> Result<Self> {
        if !(s_min < s_max && t_min < t_max && h > 0.0) {
            return Err(Error::Constraint("window bounds must be ordered and h > 0".into()));
        }
        Ok(GridWindow { s_min, s_max, t_min, t_max, h })
    }

    pub fn n_s(&self) -> usize {
        (((self.s_max - self.s_min) / self.h).round() as usize).max(1)
    }

    pub fn n_t(&self) -> usize {
        (((self.t_max - self.t_min) / self.h).round() as usize).max(1)
    }

    pub fn cell_count(&self) -> usize {
        self.n_s() * self.n_t()
    }

    pub fn center(&self, idx: usize) -> State {
        let ns = self.n_s();
        let i = idx % ns;
        let j = idx / ns;
        State::new(
            self.s_min + (i as f64 + 0.5) * self.h,
            self.t_min + (j as f64 + 0.5) * self.h,
        )
    }

    /// Cell containing the point, or None when it falls outside the grid.
    pub fn cell_of(&self, v: State) -> Option<usize> {
        let ns = self.n_s() as isize;
        let nt = self.n_t() as isize;
        let i = ((v.s - self.s_min) / self.h).floor() as isize;
        let j = ((v.t - self.t_min) / self.h).floor() as isize;
        if i < 0 || j < 0 || i >= ns || j >= nt {
            None
        } else {
            Some((j * ns + i) as usize)
        }
    }

    /// Cells whose h-neighborhood stays inside the window, i.e. everything
    /// off the outermost ring.
    pub fn is_interior(&self, idx: usize) -> bool {
        let ns = self.n_s();
        let nt = self.n_t();
        let i = idx % ns;
        let j = idx / ns;
        i > 0 && j > 0 && i + 1 < ns && j + 1 < nt
    }
}
