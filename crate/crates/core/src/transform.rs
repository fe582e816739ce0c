//! Distorted Fourier transform for `H₁`, `H₂` and its Littlewood–Paley pieces.
//!
//! Forward: `F(k) = ∫₀^∞ Φ(r,k²) √r f(r) dr`.
//! Inverse: `√r f(r) = ∫ Φ(r,k²) F(k) 2k ρ'(k²) dk`.
//!
//! Both integrals are discretized by composite Gauss–Legendre panels. The `k`
//! panels are log-graded toward `k = 0`, no wider than a fixed fraction of the
//! shortest oscillation period `2π/(r_max + extent)`, and broken at every edge
//! of the dyadic cutoffs so that each smooth transition is integrated on its
//! own panels. The `r` panels break at the support edges of the data. A plan
//! either stores the matrix `Φ(r_i, k_j)` or regenerates rows on demand,
//! skipping any `k` where the spectral data vanish.

use crate::eigenfunctions::{EigenSystem, Eigenfunction};
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, CubicHermite, Grid, GridKind};
use crate::operator::Operator;
use crate::spectral_measure::density_from;
use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::Arc;

/// Compactly supported bump `amp·(1 - (r-r₀)²/w²)^m` on `|r - r₀| ≤ w`; the
/// default power `m = 3` makes it exactly `C²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub r0: f64,
    pub w: f64,
    pub amp: f64,
    pub power: u32,
}

impl Bump {
    pub fn new(r0: f64, w: f64) -> Result<Self> {
        if !(w > 0.0 && r0 - w >= 0.0 && r0.is_finite() && w.is_finite()) {
            return Err(Error::InvalidInput(format!("bump needs w > 0 and r0 - w >= 0 (got r0={r0}, w={w})")));
        }
        Ok(Self { r0, w, amp: 1.0, power: 3 })
    }

    pub fn scaled(self, amp: f64) -> Self {
        Self { amp: self.amp * amp, ..self }
    }

    /// Same bump with power `m ≥ 3` (smoother, faster decaying transform).
    pub fn with_power(self, m: u32) -> Self {
        Self { power: m.max(3), ..self }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.r0 - self.w, self.r0 + self.w)
    }

    /// `(f, f', f'')`.
    pub fn eval(&self, r: f64) -> (f64, f64, f64) {
        let x = (r - self.r0) / self.w;
        if x.abs() >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let s = 1.0 - x * x;
        let w = self.w;
        let m = self.power as i32;
        let mf = m as f64;
        let f = s.powi(m);
        let d1 = -2.0 * mf * x * s.powi(m - 1) / w;
        let d2 = (4.0 * mf * (mf - 1.0) * x * x * s.powi(m - 2) - 2.0 * mf * s.powi(m - 1)) / (w * w);
        (self.amp * f, self.amp * d1, self.amp * d2)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    /// `r^{-1/2} H (√r f)` for the reduced operator of `sys` (threshold
    /// included), from the exact derivatives of the bump.
    pub fn apply_operator(&self, sys: &EigenSystem, r: f64) -> f64 {
        let (f, d1, d2) = self.eval(r);
        if f == 0.0 && d1 == 0.0 && d2 == 0.0 {
            return 0.0;
        }
        let s = r.sqrt();
        let h = s * f;
        let h2 = s * d2 + d1 / s - f / (4.0 * r * s);
        let op = sys.operator();
        let q = op.potential(sys.profile(), r) + op.threshold();
        (-h2 + q * h) / s
    }
}

/// Dyadic cutoffs: `φ = 1` on `[-5/4, 5/4]`, `0` outside `[-8/5, 8/5]`,
/// `φ_ℓ(x) = φ(2^{-ℓ}x) - φ(2^{-ℓ+1}x)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BandCutoffs;

const PLATEAU: f64 = 1.25;
const EDGE: f64 = 1.6;

fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

impl BandCutoffs {
    pub fn base(&self, x: f64) -> f64 {
        let x = x.abs();
        if x <= PLATEAU {
            1.0
        } else if x >= EDGE {
            0.0
        } else {
            1.0 - smooth_step((x - PLATEAU) / (EDGE - PLATEAU))
        }
    }

    pub fn band(&self, l: i32, x: f64) -> f64 {
        let s = 2f64.powi(-l);
        self.base(s * x) - self.base(2.0 * s * x)
    }

    /// `Σ_{ℓ=lo..=hi} φ_ℓ(x)`, which telescopes to `φ(2^{-hi}x) - φ(2^{1-lo}x)`.
    pub fn band_sum(&self, lo: i32, hi: i32, x: f64) -> f64 {
        (lo..=hi).map(|l| self.band(l, x)).sum()
    }

    /// Closed support `2^ℓ·[5/8, 8/5]` of `φ_ℓ`.
    pub fn support(&self, l: i32) -> (f64, f64) {
        let s = 2f64.powi(l);
        (s * PLATEAU / 2.0, s * EDGE)
    }

    /// Every point where `φ_ℓ` changes smoothness class, for `ℓ ∈ [lo, hi]`.
    pub fn breakpoints(&self, lo: i32, hi: i32) -> Vec<f64> {
        let mut out = Vec::new();
        for l in lo..=hi + 1 {
            let s = 2f64.powi(l);
            out.push(s * PLATEAU / 2.0);
            out.push(s * EDGE / 2.0);
        }
        out
    }
}

/// Radial function sampled on a grid (plain `f(r)`; the `√r` weight is applied
/// inside the transform).
#[derive(Debug, Clone)]
pub struct FieldSample {
    grid: Grid,
    values: Vec<f64>,
    weights: Option<Vec<f64>>,
    support: Option<(f64, f64)>,
}

impl FieldSample {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput("field values and grid differ in length".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("field values must be finite".into()));
        }
        Ok(Self { grid, values, weights: None, support: None })
    }

    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = Some((lo, hi));
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        self.support
    }

    /// Quadrature weights in `dr` when the sample sits on a plan's nodes.
    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// `(∫|f|² r dr)^{1/2}`, by the attached quadrature or the trapezoid rule.
    pub fn l2_norm(&self) -> f64 {
        self.integrate(|r, v| v * v * r).sqrt()
    }

    /// `∫|f| r dr`.
    pub fn l1_norm(&self) -> f64 {
        self.integrate(|r, v| v.abs() * r)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    fn integrate(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        let r = self.grid.nodes();
        match &self.weights {
            Some(w) => r.iter().zip(&self.values).zip(w).map(|((&r, &v), &w)| w * g(r, v)).sum(),
            None => r
                .windows(2)
                .zip(self.values.windows(2))
                .map(|(rr, vv)| 0.5 * (rr[1] - rr[0]) * (g(rr[0], vv[0]) + g(rr[1], vv[1])))
                .sum(),
        }
    }

    /// `self - other` (same grid).
    pub fn sub(&self, other: &FieldSample) -> Result<FieldSample> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `self + other` (same grid).
    pub fn add(&self, other: &FieldSample) -> Result<FieldSample> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, c: f64) -> FieldSample {
        FieldSample { values: self.values.iter().map(|v| c * v).collect(), ..self.clone() }
    }

    fn zip_with(&self, other: &FieldSample, f: impl Fn(f64, f64) -> f64) -> Result<FieldSample> {
        if self.grid.nodes() != other.grid.nodes() {
            return Err(Error::InvalidInput("field samples live on different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(FieldSample { values, support: None, ..self.clone() })
    }

    /// Cubic Hermite interpolation (slopes by finite differences), zero outside the grid.
    pub fn interpolator(&self) -> Result<CubicHermite> {
        let x = self.grid.nodes();
        let y = &self.values;
        let n = x.len();
        let dy: Vec<f64> = (0..n)
            .map(|i| {
                let (a, b) = if i == 0 { (0, 1) } else if i == n - 1 { (n - 2, n - 1) } else { (i - 1, i + 1) };
                (y[b] - y[a]) / (x[b] - x[a])
            })
            .collect();
        CubicHermite::new(self.grid.clone(), y.clone(), dy)
    }
}

/// Spectral-side function on a plan's `k` nodes.
#[derive(Debug, Clone)]
pub struct SpectrumSample {
    operator: Operator,
    k: Vec<f64>,
    values: Vec<Complex64>,
    /// Quadrature weight times `2kρ'(k²)` at each node.
    measure: Vec<f64>,
}

impl SpectrumSample {
    pub fn operator(&self) -> Operator {
        self.operator
    }

    pub fn k_grid(&self) -> &[f64] {
        &self.k
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn measure_weights(&self) -> &[f64] {
        &self.measure
    }

    /// Same nodes, new values.
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != self.k.len() {
            return Err(Error::InvalidInput("spectrum length mismatch".into()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidInput("spectrum values must be finite".into()));
        }
        Ok(Self { values, ..self.clone() })
    }

    /// Pointwise multiplier `m(k)`.
    pub fn multiply(&self, m: impl Fn(f64) -> Complex64) -> Self {
        let values = self.k.iter().zip(&self.values).map(|(&k, &v)| m(k) * v).collect();
        Self { values, ..self.clone() }
    }

    /// `(∫|F|² 2kρ' dk)^{1/2}`, equal to `‖f‖_{L²(r dr)}` for data in the
    /// continuous subspace.
    pub fn l2_norm(&self) -> f64 {
        self.values.iter().zip(&self.measure).map(|(v, w)| v.norm_sqr() * w).sum::<f64>().sqrt()
    }

    /// Largest `|F|·k·2kρ'` over the top 5% of the grid relative to its
    /// maximum: a crude indicator of `k`-truncation error.
    pub fn tail_indicator(&self) -> f64 {
        let kmax = *self.k.last().unwrap_or(&0.0);
        let mut top: f64 = 0.0;
        let mut all: f64 = 0.0;
        for (i, &k) in self.k.iter().enumerate() {
            let w = if i + 1 < self.k.len() { self.k[i + 1] - k } else { 1.0 };
            let v = self.values[i].norm() * self.measure[i] / w.max(1e-300);
            all = all.max(v);
            if k >= 0.95 * kmax {
                top = top.max(v);
            }
        }
        if all == 0.0 {
            0.0
        } else {
            top / all
        }
    }
}

/// Composite Gauss–Legendre rule with panel breaks.
#[derive(Debug, Clone)]
pub struct PanelRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    breaks: Vec<f64>,
}

impl PanelRule {
    /// Panels on `[a, b]` breaking at every point of `forced` inside the
    /// interval, no wider than `width(x)` at their left end, at least
    /// `min_per_gap` panels between consecutive forced breaks, with `order`
    /// nodes each.
    pub fn new(
        a: f64,
        b: f64,
        forced: &[f64],
        width: impl Fn(f64) -> f64,
        min_per_gap: usize,
        order: usize,
    ) -> Result<Self> {
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidInput(format!("bad panel interval [{a}, {b}]")));
        }
        let mut anchors = vec![a, b];
        anchors.extend(forced.iter().copied().filter(|&x| x > a && x < b));
        anchors.sort_by(|x, y| x.partial_cmp(y).unwrap());
        anchors.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * x.abs().max(1.0));
        let mut breaks = vec![a];
        for g in anchors.windows(2) {
            let (x0, x1) = (g[0], g[1]);
            let mut pts = vec![x0];
            let mut x = x0;
            loop {
                let h = width(x).max(1e-12 * x1.abs().max(1.0));
                if x + 1.5 * h >= x1 {
                    break;
                }
                x += h;
                pts.push(x);
            }
            pts.push(x1);
            // Enforce the minimum count by splitting the widest panels.
            while pts.len() - 1 < min_per_gap {
                let (i, _) = pts
                    .windows(2)
                    .enumerate()
                    .map(|(i, w)| (i, w[1] - w[0]))
                    .fold((0, 0.0), |acc, v| if v.1 > acc.1 { v } else { acc });
                let mid = 0.5 * (pts[i] + pts[i + 1]);
                pts.insert(i + 1, mid);
            }
            breaks.extend_from_slice(&pts[1..]);
        }
        let (gx, gw) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity((breaks.len() - 1) * order);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in breaks.windows(2) {
            let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            for (x, wt) in gx.iter().zip(&gw) {
                nodes.push(c + h * x);
                weights.push(h * wt);
            }
        }
        Ok(Self { nodes, weights, breaks })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Discretization choices for a [`SpectralPlan`].
#[derive(Debug, Clone)]
pub struct PlanConfig {
    /// Frequency range `[k_min, k_max]`.
    pub k_min: f64,
    pub k_max: f64,
    /// Radial range `[0, r_max]` of both inputs and outputs.
    pub r_max: f64,
    /// Forced radial panel breaks (support edges of the data).
    pub r_breaks: Vec<f64>,
    /// Dyadic bands whose cutoff edges become `k` panel breaks.
    pub bands: Option<(i32, i32)>,
    /// Largest radius at which the data live, for sizing `k` panels; the
    /// oscillation frequency of the `k` integrands is at most `r_max + extent`.
    pub extent: f64,
    /// Extra phase rate in `k` (e.g. `t·max|ω'|` for time evolution).
    pub extra_frequency: f64,
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    /// Store `Φ(r_i,k_j)` when the matrix has at most this many entries.
    pub store_limit: usize,
    /// Refuse plans needing more `k` nodes than this.
    pub max_k_nodes: usize,
}

impl Default for PlanConfig {
    fn default() -> Self {
        Self {
            k_min: 1e-3,
            k_max: 40.0,
            r_max: 20.0,
            r_breaks: Vec::new(),
            bands: Some((-5, 6)),
            extent: 20.0,
            extra_frequency: 0.0,
            order: 16,
            store_limit: 12_000_000,
            max_k_nodes: 400_000,
        }
    }
}

/// Half-width times frequency allowed per Gauss panel.
const PANEL_PHASE: f64 = 5.0;

/// A discretized transform pair for one operator.
#[derive(Debug, Clone)]
pub struct SpectralPlan {
    sys: Arc<EigenSystem>,
    config: PlanConfig,
    k: PanelRule,
    r: PanelRule,
    a: Vec<Complex64>,
    density: Vec<f64>,
    spread: f64,
    phi: Option<Vec<f64>>,
}

impl SpectralPlan {
    pub fn new(sys: Arc<EigenSystem>, config: PlanConfig) -> Result<Self> {
        let c = &config;
        if !(c.k_min >= sys.k_min() && c.k_max > c.k_min && c.r_max > 0.0 && c.order >= 2) {
            return Err(Error::InvalidInput(format!(
                "plan needs k_min >= {:.3e}, k_max > k_min, r_max > 0 (got k in [{}, {}], r_max = {})",
                sys.k_min(),
                c.k_min,
                c.k_max,
                c.r_max
            )));
        }
        let freq = c.r_max + c.extent + c.extra_frequency;
        let dk = 2.0 * PANEL_PHASE / freq;
        let band_breaks = match c.bands {
            Some((lo, hi)) => BandCutoffs.breakpoints(lo, hi),
            None => Vec::new(),
        };
        let k_panels = ((c.k_max - c.k_min) / dk) as usize;
        if k_panels * c.order > c.max_k_nodes {
            return Err(Error::Resolution(format!(
                "resolving phase rate {freq:.1} on k in [{}, {}] needs about {} nodes (budget {})",
                c.k_min,
                c.k_max,
                k_panels * c.order,
                c.max_k_nodes
            )));
        }
        let min_gap = if c.bands.is_some() { 3 } else { 1 };
        let k = PanelRule::new(c.k_min, c.k_max, &band_breaks, |x| dk.min(0.25 * x), min_gap, c.order)?;
        let dr = (2.0 * PANEL_PHASE / c.k_max).min(2.0);
        let r = PanelRule::new(0.0, c.r_max, &c.r_breaks, |_| dr, 1, c.order)?;

        let store = k.len().saturating_mul(r.len()) <= c.store_limit;
        let rows: Vec<(Complex64, f64, Option<Vec<f64>>)> = k
            .nodes()
            .par_iter()
            .map(|&kk| {
                let (ef, row) = if store {
                    let ef = sys.eigenfunction_to(kk, c.r_max)?;
                    let row = r.nodes().iter().map(|&x| ef.value(x)).collect();
                    (ef, Some(row))
                } else {
                    (sys.eigenfunction(kk)?, None)
                };
                Ok((ef.a_conn(), ef.spread(), row))
            })
            .collect::<Result<_>>()?;
        let a: Vec<Complex64> = rows.iter().map(|x| x.0).collect();
        let density = a.iter().map(|&x| density_from(x)).collect();
        let spread = rows.iter().map(|x| x.1).fold(0.0, f64::max);
        let phi = if store {
            let mut m = Vec::with_capacity(k.len() * r.len());
            for row in rows {
                m.extend(row.2.expect("rows stored"));
            }
            Some(m)
        } else {
            None
        };
        Ok(Self { sys, config, k, r, a, density, spread, phi })
    }

    pub fn system(&self) -> &EigenSystem {
        &self.sys
    }

    pub fn operator(&self) -> Operator {
        self.sys.operator()
    }

    pub fn config(&self) -> &PlanConfig {
        &self.config
    }

    pub fn k_nodes(&self) -> &[f64] {
        self.k.nodes()
    }

    pub fn k_weights(&self) -> &[f64] {
        self.k.weights()
    }

    pub fn r_nodes(&self) -> &[f64] {
        self.r.nodes()
    }

    pub fn r_weights(&self) -> &[f64] {
        self.r.weights()
    }

    pub fn a_values(&self) -> &[Complex64] {
        &self.a
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Worst Wronskian spread over the plan's `k` nodes.
    pub fn max_spread(&self) -> f64 {
        self.spread
    }

    pub fn is_stored(&self) -> bool {
        self.phi.is_some()
    }

    /// `W_j · 2k_j ρ'(k_j²)`.
    pub fn measure_weights(&self) -> Vec<f64> {
        self.k
            .nodes()
            .iter()
            .zip(self.k.weights())
            .zip(&self.density)
            .map(|((&k, &w), &d)| w * 2.0 * k * d)
            .collect()
    }

    fn r_grid(&self) -> Grid {
        Grid::new(self.r.nodes().to_vec(), GridKind::Composite).expect("panel nodes increase")
    }

    /// Samples `f` on the plan's radial nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> FieldSample {
        let values = self.r.nodes().iter().map(|&r| f(r)).collect();
        FieldSample { grid: self.r_grid(), values, weights: Some(self.r.weights().to_vec()), support: None }
    }

    /// Samples a bump, recording its support.
    pub fn sample_bump(&self, b: &Bump) -> FieldSample {
        self.sample_bumps(std::slice::from_ref(b))
    }

    /// Samples a sum of bumps, recording the hull of their supports.
    pub fn sample_bumps(&self, bumps: &[Bump]) -> FieldSample {
        let (lo, hi) = hull(bumps);
        self.sample(|r| bumps.iter().map(|b| b.value(r)).sum()).with_support(lo, hi)
    }

    /// Brings `f` onto the plan's nodes (interpolating if it lives elsewhere).
    pub fn adopt(&self, f: &FieldSample) -> Result<FieldSample> {
        if f.grid.nodes() == self.r.nodes() {
            let mut g = f.clone();
            g.weights = Some(self.r.weights().to_vec());
            return Ok(g);
        }
        let interp = f.interpolator()?;
        let (lo, hi) = (f.grid.first(), f.grid.last());
        let mut g = self.sample(|r| if r < lo || r > hi { 0.0 } else { interp.eval(r).0 });
        g.support = f.support;
        Ok(g)
    }

    /// Row `Φ(r_i, k_j)` restricted to node indices `range`.
    fn row(&self, j: usize, range: std::ops::Range<usize>) -> Result<Vec<f64>> {
        match &self.phi {
            Some(m) => {
                let n = self.r.len();
                Ok(m[j * n + range.start..j * n + range.end].to_vec())
            }
            None => {
                let top = self.r.nodes()[range.end.max(1) - 1];
                let ef: Eigenfunction = self.sys.eigenfunction_to(self.k.nodes()[j], top)?;
                Ok(self.r.nodes()[range].iter().map(|&x| ef.value(x)).collect())
            }
        }
    }

    fn support_range(&self, f: &FieldSample) -> std::ops::Range<usize> {
        let r = self.r.nodes();
        let mut lo = 0;
        let mut hi = r.len();
        let vals = &f.values;
        while lo < hi && vals[lo] == 0.0 {
            lo += 1;
        }
        while hi > lo && vals[hi - 1] == 0.0 {
            hi -= 1;
        }
        lo..hi
    }

    /// `F(k_j) = Σ_i w_i Φ(r_i,k_j) √r_i f(r_i)` for every `k_j` with `keep(k_j)`.
    pub fn forward_where(&self, f: &FieldSample, keep: impl Fn(f64) -> bool + Sync) -> Result<SpectrumSample> {
        let f = self.adopt(f)?;
        let range = self.support_range(&f);
        let r = self.r.nodes();
        let w = self.r.weights();
        let g: Vec<f64> = range.clone().map(|i| w[i] * r[i].sqrt() * f.values[i]).collect();
        let values: Vec<Complex64> = (0..self.k.len())
            .into_par_iter()
            .map(|j| {
                if range.is_empty() || !keep(self.k.nodes()[j]) {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let row = self.row(j, range.clone())?;
                Ok(Complex64::new(row.iter().zip(&g).map(|(a, b)| a * b).sum(), 0.0))
            })
            .collect::<Result<_>>()?;
        Ok(SpectrumSample {
            operator: self.operator(),
            k: self.k.nodes().to_vec(),
            values,
            measure: self.measure_weights(),
        })
    }

    /// Forward transform on every node.
    pub fn forward(&self, f: &FieldSample) -> Result<SpectrumSample> {
        self.forward_where(f, |_| true)
    }

    /// Real part of the synthesis `r^{-1/2} Σ_j W_j 2k_jρ'_j Φ(r,k_j) F_j`.
    pub fn inverse(&self, spec: &SpectrumSample) -> Result<FieldSample> {
        let mut out = self.synthesize(std::slice::from_ref(&spec.values))?;
        Ok(out.remove(0))
    }

    /// Several syntheses sharing one pass over the rows.
    pub fn synthesize(&self, spectra: &[Vec<Complex64>]) -> Result<Vec<FieldSample>> {
        let nk = self.k.len();
        let nr = self.r.len();
        for s in spectra {
            if s.len() != nk {
                return Err(Error::InvalidInput("spectrum does not match the plan's k nodes".into()));
            }
        }
        let mw = self.measure_weights();
        let active: Vec<usize> =
            (0..nk).filter(|&j| spectra.iter().any(|s| s[j].re != 0.0 || s[j].im != 0.0)).collect();
        let ns = spectra.len();
        let acc = active
            .par_iter()
            .try_fold(
                || vec![0.0; ns * nr],
                |mut acc, &j| -> Result<Vec<f64>> {
                    let row = self.row(j, 0..nr)?;
                    for (s, spec) in spectra.iter().enumerate() {
                        let c = mw[j] * spec[j].re;
                        if c == 0.0 {
                            continue;
                        }
                        let dst = &mut acc[s * nr..(s + 1) * nr];
                        for (d, p) in dst.iter_mut().zip(&row) {
                            *d += c * p;
                        }
                    }
                    Ok(acc)
                },
            )
            .try_reduce(
                || vec![0.0; ns * nr],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(&b) {
                        *x += y;
                    }
                    Ok(a)
                },
            )?;
        let r = self.r.nodes();
        Ok((0..ns)
            .map(|s| {
                let values = (0..nr).map(|i| acc[s * nr + i] / r[i].sqrt()).collect();
                FieldSample { grid: self.r_grid(), values, weights: Some(self.r.weights().to_vec()), support: None }
            })
            .collect())
    }

    /// `P_ℓ f = inverse(φ_ℓ · forward f)`, touching only `k` inside the band.
    pub fn project_band(&self, l: i32, f: &FieldSample) -> Result<FieldSample> {
        let (lo, hi) = BandCutoffs.support(l);
        let spec = self.forward_where(f, |k| k > lo && k < hi)?;
        let spec = spec.multiply(|k| Complex64::new(BandCutoffs.band(l, k), 0.0));
        self.inverse(&spec)
    }

    /// `P_ℓ f` for every `ℓ` in `bands`, from one forward transform and one
    /// synthesis pass.
    pub fn project_bands(&self, bands: &[i32], f: &FieldSample) -> Result<Vec<FieldSample>> {
        let spec = self.forward(f)?;
        let spectra: Vec<Vec<Complex64>> = bands
            .iter()
            .map(|&l| spec.multiply(|k| Complex64::new(BandCutoffs.band(l, k), 0.0)).values)
            .collect();
        self.synthesize(&spectra)
    }

    /// `inverse(forward f)`: the identity for `H₂`, the projection onto the
    /// continuous subspace for `H₁`.
    pub fn round_trip(&self, f: &FieldSample) -> Result<FieldSample> {
        self.inverse(&self.forward(f)?)
    }
}

/// Weighted Fourier-side norms of `F = forward(f)/a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierNorms {
    /// `‖w₀ F‖_∞`.
    pub sup: f64,
    /// `‖w₁ ∂_k F‖_{L²(dk)}`.
    pub d1: f64,
    /// `‖w₂ ∂_k² F‖_{L²(dk)}`.
    pub d2: f64,
}

/// Weight `k^k_pow ⟨k⟩^bracket_pow`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormWeight {
    pub k_pow: f64,
    pub bracket_pow: f64,
}

impl NormWeight {
    pub fn bracket(p: f64) -> Self {
        Self { k_pow: 0.0, bracket_pow: p }
    }

    pub fn eval(&self, k: f64) -> f64 {
        let mut w = (1.0 + k * k).sqrt().powf(self.bracket_pow);
        if self.k_pow != 0.0 {
            w *= k.powf(self.k_pow);
        }
        w
    }
}

fn hull(bumps: &[Bump]) -> (f64, f64) {
    bumps.iter().map(|b| b.support()).fold((f64::INFINITY, 0.0), |(a, b), (lo, hi)| (a.min(lo), b.max(hi)))
}

/// Gauss–Legendre rule on the hull of the supports, broken at every edge.
fn bump_rule(bumps: &[Bump], dr: f64) -> Result<PanelRule> {
    if bumps.is_empty() {
        return Err(Error::InvalidInput("at least one bump is required".into()));
    }
    let (lo, hi) = hull(bumps);
    let edges: Vec<f64> = bumps.iter().flat_map(|b| [b.support().0, b.support().1]).collect();
    let w = bumps.iter().map(|b| b.w).fold(f64::INFINITY, f64::min);
    PanelRule::new(lo, hi, &edges, |_| dr.min(w / 2.0), 2, 16)
}

/// `∫ Φ(r,0) √r f(r) dr` for a sum of bumps: the overlap with the regular
/// threshold solution, which fixes the transform at `k = 0`.
pub fn threshold_moment(sys: &EigenSystem, bumps: &[Bump]) -> Result<f64> {
    let rule = bump_rule(bumps, 0.1)?;
    Ok(rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&r, &w)| w * sys.basis().phi0(r).0 * r.sqrt() * bumps.iter().map(|b| b.value(r)).sum::<f64>())
        .sum())
}

/// Rescales the last bump so that the threshold moment of the sum vanishes.
/// For `H₁` this is what makes `∂_k F` and `∂_k² F` square integrable at
/// `k = 0`, since `1/a` oscillates like `cos(2ν ln k)` there.
pub fn cancel_threshold_moment(sys: &EigenSystem, bumps: &[Bump]) -> Result<Vec<Bump>> {
    if bumps.len() < 2 {
        return Err(Error::InvalidInput("cancelling the threshold moment needs at least two bumps".into()));
    }
    let (head, last) = bumps.split_at(bumps.len() - 1);
    let m_head = threshold_moment(sys, head)?;
    let m_last = threshold_moment(sys, last)?;
    if m_last == 0.0 {
        return Err(Error::Singular("last bump has zero threshold moment".into()));
    }
    let mut out = head.to_vec();
    out.push(last[0].scaled(-m_head / m_last));
    Ok(out)
}

/// `F(k) = forward(f)(k)/a(k²)` on the uniform grid `k_i = i·dk`, `i = 1..=n`,
/// for `f` a sum of bumps.
pub fn normalized_spectrum(sys: &EigenSystem, f: &[Bump], dk: f64, n: usize) -> Result<Vec<(f64, Complex64)>> {
    let kmax = dk * n as f64;
    let rule = bump_rule(f, (2.0 * PANEL_PHASE / kmax).min(0.5))?;
    let hi = hull(f).1;
    let g: Vec<f64> = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&r, &w)| w * r.sqrt() * f.iter().map(|b| b.value(r)).sum::<f64>())
        .collect();
    (1..=n)
        .into_par_iter()
        .map(|i| {
            let k = dk * i as f64;
            let ef = sys.eigenfunction_to(k, hi)?;
            let tr: f64 = rule.nodes().iter().zip(&g).map(|(&r, &w)| w * ef.value(r)).sum();
            Ok((k, Complex64::new(tr, 0.0) / ef.a_conn()))
        })
        .collect()
}

/// Norms of a uniformly sampled `F`, one weight per norm; derivatives by
/// centered differences.
pub fn fourier_norms(samples: &[(f64, Complex64)], weights: [NormWeight; 3]) -> FourierNorms {
    let n = samples.len();
    let sup = samples.iter().map(|(k, f)| weights[0].eval(*k) * f.norm()).fold(0.0, f64::max);
    if n < 3 {
        return FourierNorms { sup, d1: 0.0, d2: 0.0 };
    }
    let dk = samples[1].0 - samples[0].0;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for i in 1..n - 1 {
        let k = samples[i].0;
        let fp = (samples[i + 1].1 - samples[i - 1].1) / (2.0 * dk);
        let fpp = (samples[i + 1].1 - 2.0 * samples[i].1 + samples[i - 1].1) / (dk * dk);
        d1 += (weights[1].eval(k) * fp.norm()).powi(2) * dk;
        d2 += (weights[2].eval(k) * fpp.norm()).powi(2) * dk;
    }
    FourierNorms { sup, d1: d1.sqrt(), d2: d2.sqrt() }
}
