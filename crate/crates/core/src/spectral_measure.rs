//! Connection coefficient `a(k²)` and spectral density `ρ'(k²) = 1/(4π|a|²)`.
//!
//! `a` is the Wronskian `(i/2)W(Φ, Ψ̄)` taken where both the inner series and
//! the inward-integrated Weyl solution are accurate, at `rk ∈ {0.4, 0.5, 0.6}`.
//! The three values must agree; their spread is recorded as a health check.

use crate::eigenfunctions::{EigenSystem, Eigenfunction, WRONSKIAN_RADII};
use crate::error::{Error, Result};
use crate::numerics::Grid;
use crate::operator::Operator;
use num_complex::Complex64;
use rayon::prelude::*;

/// Largest tolerated relative spread of the three Wronskian evaluations.
pub const MAX_SPREAD: f64 = 1e-5;

/// `a(k²)` for one `k`, with the spread check applied.
pub fn connection_coefficient(sys: &EigenSystem, k: f64) -> Result<Complex64> {
    let ef = sys.eigenfunction(k)?;
    check_spread(&ef)?;
    Ok(ef.a_conn())
}

fn check_spread(ef: &Eigenfunction) -> Result<()> {
    if !(ef.spread() <= MAX_SPREAD) {
        return Err(Error::Inconsistent(format!(
            "Wronskian evaluations at rk = {:?} disagree by {:.2e} (k = {})",
            WRONSKIAN_RADII,
            ef.spread(),
            ef.k()
        )));
    }
    Ok(())
}

/// `1/(4π|a|²)`.
pub fn density_from(a: Complex64) -> f64 {
    1.0 / (4.0 * std::f64::consts::PI * a.norm_sqr())
}

/// `⟨k⟩ = √(1+k²)`.
pub fn japanese(k: f64) -> f64 {
    (1.0 + k * k).sqrt()
}

/// Tabulated `a(k²)` and `ρ'(k²)`.
#[derive(Debug, Clone)]
pub struct SpectralMeasure {
    operator: Operator,
    k_grid: Vec<f64>,
    a_vals: Vec<Complex64>,
    density: Vec<f64>,
    spreads: Vec<f64>,
    floor: Vec<f64>,
}

/// Default frequency grid: 240 log-spaced nodes on `[0.02, 20]`.
pub fn default_k_grid() -> Grid {
    Grid::log_uniform(0.02, 20.0, 240).expect("static grid is valid")
}

/// Tabulates the measure on `k_grid` (positive, increasing).
pub fn build_measure(sys: &EigenSystem, k_grid: &Grid) -> Result<SpectralMeasure> {
    if k_grid.first() <= 0.0 {
        return Err(Error::InvalidInput("spectral measure needs k > 0".into()));
    }
    let rows: Vec<(Complex64, f64, f64)> = k_grid
        .nodes()
        .par_iter()
        .map(|&k| {
            let ef = sys.eigenfunction(k)?;
            check_spread(&ef)?;
            let r = WRONSKIAN_RADII[1] / k;
            let (f, df) = ef.eval(r);
            let floor = (f.abs() * k.sqrt()).max(df.abs() / k.sqrt());
            Ok((ef.a_conn(), ef.spread(), floor))
        })
        .collect::<Result<_>>()?;
    let a_vals: Vec<Complex64> = rows.iter().map(|r| r.0).collect();
    Ok(SpectralMeasure {
        operator: sys.operator(),
        k_grid: k_grid.nodes().to_vec(),
        density: a_vals.iter().map(|&a| density_from(a)).collect(),
        a_vals,
        spreads: rows.iter().map(|r| r.1).collect(),
        floor: rows.iter().map(|r| r.2).collect(),
    })
}

impl SpectralMeasure {
    pub fn operator(&self) -> Operator {
        self.operator
    }

    pub fn degree(&self) -> u32 {
        self.operator.degree
    }

    pub fn k_grid(&self) -> &[f64] {
        &self.k_grid
    }

    pub fn a_values(&self) -> &[Complex64] {
        &self.a_vals
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn spreads(&self) -> &[f64] {
        &self.spreads
    }

    pub fn max_spread(&self) -> f64 {
        self.spreads.iter().cloned().fold(0.0, f64::max)
    }

    /// `max(|Φ|√k, |∂_rΦ|/√k)` at `r = 0.5/k`, the quantity that keeps `|a|`
    /// away from zero even where `Φ` itself vanishes.
    pub fn oscillation_floor(&self) -> &[f64] {
        &self.floor
    }

    /// `⟨k⟩^n |a(k²)|` at each node (`n` the degree).
    pub fn weighted_magnitudes(&self) -> Vec<f64> {
        let n = self.degree() as i32;
        self.k_grid.iter().zip(&self.a_vals).map(|(&k, a)| japanese(k).powi(n) * a.norm()).collect()
    }

    /// `(m, M)`: the range of `⟨k⟩^n |a(k²)|` over the grid.
    pub fn band(&self) -> (f64, f64) {
        let w = self.weighted_magnitudes();
        let lo = w.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = w.iter().cloned().fold(0.0, f64::max);
        (lo, hi)
    }

    /// Largest relative jump of `a` between adjacent nodes.
    pub fn max_adjacent_jump(&self) -> f64 {
        self.a_vals
            .windows(2)
            .map(|w| (w[1] - w[0]).norm() / w[0].norm().max(w[1].norm()))
            .fold(0.0, f64::max)
    }

    /// Largest second divided difference of `k ↦ ⟨k⟩a(k²)` in `ln k`.
    pub fn symbol_second_difference(&self) -> f64 {
        let g: Vec<Complex64> =
            self.k_grid.iter().zip(&self.a_vals).map(|(&k, &a)| a * japanese(k)).collect();
        let u: Vec<f64> = self.k_grid.iter().map(|k| k.ln()).collect();
        let mut worst: f64 = 0.0;
        for i in 1..g.len().saturating_sub(1) {
            let d1 = (g[i + 1] - g[i]) / (u[i + 1] - u[i]);
            let d0 = (g[i] - g[i - 1]) / (u[i] - u[i - 1]);
            worst = worst.max(((d1 - d0) / (0.5 * (u[i + 1] - u[i - 1]))).norm());
        }
        worst
    }
}
