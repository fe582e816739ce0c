//! Piecewise Hermite interpolation on a [`Grid`].

use super::Grid;
use crate::error::{Error, Result};

/// C¹ piecewise cubic through values and first derivatives.
#[derive(Debug, Clone)]
pub struct CubicHermite {
    grid: Grid,
    y: Vec<f64>,
    dy: Vec<f64>,
}

impl CubicHermite {
    pub fn new(grid: Grid, y: Vec<f64>, dy: Vec<f64>) -> Result<Self> {
        if y.len() != grid.len() || dy.len() != grid.len() {
            return Err(Error::InvalidInput("Hermite data length differs from grid".into()));
        }
        Ok(Self { grid, y, dy })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Value and derivative at `x` (extrapolates the end cubics outside the grid).
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let i = self.grid.cell(x);
        let x0 = self.grid.nodes()[i];
        let h = self.grid.nodes()[i + 1] - x0;
        let t = (x - x0) / h;
        let (y0, y1, d0, d1) = (self.y[i], self.y[i + 1], self.dy[i], self.dy[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let v = h00 * y0 + h * h10 * d0 + h01 * y1 + h * h11 * d1;
        let dv = (6.0 * t2 - 6.0 * t) * (y0 - y1) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * d0
            + (3.0 * t2 - 2.0 * t) * d1;
        (v, dv)
    }
}

/// C² piecewise quintic through values, first and second derivatives.
#[derive(Debug, Clone)]
pub struct QuinticHermite {
    grid: Grid,
    y: Vec<f64>,
    dy: Vec<f64>,
    d2y: Vec<f64>,
}

impl QuinticHermite {
    pub fn new(grid: Grid, y: Vec<f64>, dy: Vec<f64>, d2y: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        if y.len() != n || dy.len() != n || d2y.len() != n {
            return Err(Error::InvalidInput("Hermite data length differs from grid".into()));
        }
        Ok(Self { grid, y, dy, d2y })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn derivatives(&self) -> &[f64] {
        &self.dy
    }

    /// `(p, p', p'')` at `x`.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        let i = self.grid.cell(x);
        let x0 = self.grid.nodes()[i];
        let h = self.grid.nodes()[i + 1] - x0;
        let t = (x - x0) / h;
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (d0, d1) = (self.dy[i], self.dy[i + 1]);
        let (s0, s1) = (self.d2y[i], self.d2y[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let t5 = t4 * t;
        let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
        let h3 = 0.5 * (t3 - 2.0 * t4 + t5);
        let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        let h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
        let v = y0 * h0 + y1 * h5 + h * (d0 * h1 + d1 * h4) + h * h * (s0 * h2 + s1 * h3);

        let g0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
        let g1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
        let g2 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
        let g3 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
        let g4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
        let dv = (y0 - y1) * g0 / h + d0 * g1 + d1 * g4 + h * (s0 * g2 + s1 * g3);

        let k0 = -60.0 * t + 180.0 * t2 - 120.0 * t3;
        let k1 = -36.0 * t + 96.0 * t2 - 60.0 * t3;
        let k2 = 0.5 * (2.0 - 18.0 * t + 36.0 * t2 - 20.0 * t3);
        let k3 = 0.5 * (6.0 * t - 24.0 * t2 + 20.0 * t3);
        let k4 = -24.0 * t + 84.0 * t2 - 60.0 * t3;
        let d2v = (y0 - y1) * k0 / (h * h) + (d0 * k1 + d1 * k4) / h + s0 * k2 + s1 * k3;
        (v, dv, d2v)
    }
}
