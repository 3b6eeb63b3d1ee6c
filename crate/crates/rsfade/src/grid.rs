//! Uniform rectangular grids with Dirichlet-interior indexing.

use crate::error::{Error, Result};

/// A uniform grid on [x_lo, x_hi] × [y_lo, y_hi] with m1 × m2 cells.
///
/// Nodes are x_i = x_lo + i Δx (i = 0..=m1) and y_j = y_lo + j Δy; the
/// homogeneous Dirichlet boundary makes only the (m1-1) × (m2-1) interior
/// nodes unknowns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub m1: usize,
    pub m2: usize,
}

impl GridSpec {
    pub fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64, m1: usize, m2: usize) -> Result<Self> {
        if !(x_lo.is_finite() && x_hi.is_finite() && y_lo.is_finite() && y_hi.is_finite()) {
            return Err(Error::InvalidArgument("grid edges must be finite".into()));
        }
        if x_hi <= x_lo || y_hi <= y_lo {
            return Err(Error::InvalidArgument(
                "grid edges must satisfy x_lo < x_hi and y_lo < y_hi".into(),
            ));
        }
        if m1 < 2 || m2 < 2 {
            return Err(Error::InvalidArgument(
                "cell counts m1, m2 must be at least 2".into(),
            ));
        }
        Ok(Self {
            x_lo,
            x_hi,
            y_lo,
            y_hi,
            m1,
            m2,
        })
    }

    /// Square grid with the same cell count in both directions.
    pub fn square(lo: f64, hi: f64, m: usize) -> Result<Self> {
        Self::new(lo, hi, lo, hi, m, m)
    }

    pub fn dx(&self) -> f64 {
        (self.x_hi - self.x_lo) / self.m1 as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_hi - self.y_lo) / self.m2 as f64
    }

    /// Interior point count along x.
    pub fn nx(&self) -> usize {
        self.m1 - 1
    }

    /// Interior point count along y.
    pub fn ny(&self) -> usize {
        self.m2 - 1
    }

    /// Node coordinate x_i for i = 0..=m1.
    pub fn x(&self, i: usize) -> f64 {
        self.x_lo + i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_lo + j as f64 * self.dy()
    }

    /// Interior x coordinate for the unknown index i = 0..nx (node i+1).
    pub fn interior_x(&self, i: usize) -> f64 {
        self.x(i + 1)
    }

    pub fn interior_y(&self, j: usize) -> f64 {
        self.y(j + 1)
    }
}
