//! Composite Chebyshev–Lobatto panels in the logarithmic variable `u = ln r`.
//!
//! Functions are stored by their values at the panel nodes. Inside each panel
//! they are represented by the interpolating polynomial in `u`, which gives
//! spectral accuracy for the power laws and `√r·cos(ν ln r)` oscillations that
//! dominate the threshold problems. Cumulative integrals are exact for that
//! polynomial representation.

use super::quad::gauss_legendre;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LogPanels {
    m: usize,
    breaks: Vec<f64>,
    xref: Vec<f64>,
    bw: Vec<f64>,
    /// `cum[p*(m+1)+q] = ∫_{-1}^{x_p} ℓ_q`.
    cum: Vec<f64>,
    r: Vec<f64>,
    u: Vec<f64>,
}

impl LogPanels {
    /// Panels covering `[r_lo, r_hi]` with width at most `du_max` in `ln r`, with a
    /// break at every radius in `forced`, and `m+1` nodes per panel.
    pub fn new(r_lo: f64, r_hi: f64, du_max: f64, forced: &[f64], m: usize) -> Result<Self> {
        if !(r_lo > 0.0 && r_hi > r_lo && du_max > 0.0 && m >= 2) {
            return Err(Error::InvalidInput(format!(
                "bad panel layout: r in [{r_lo}, {r_hi}], du_max={du_max}, m={m}"
            )));
        }
        let mut anchors: Vec<f64> = vec![r_lo.ln(), r_hi.ln()];
        for &f in forced {
            if f > r_lo && f < r_hi {
                anchors.push(f.ln());
            }
        }
        anchors.sort_by(|a, b| a.partial_cmp(b).unwrap());
        anchors.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let mut breaks = vec![anchors[0]];
        for w in anchors.windows(2) {
            let cells = ((w[1] - w[0]) / du_max).ceil().max(1.0) as usize;
            for c in 1..=cells {
                breaks.push(if c == cells { w[1] } else { w[0] + (w[1] - w[0]) * c as f64 / cells as f64 });
            }
        }

        let xref: Vec<f64> =
            (0..=m).map(|p| -(std::f64::consts::PI * p as f64 / m as f64).cos()).collect();
        let mut bw: Vec<f64> = (0..=m).map(|p| if p % 2 == 0 { 1.0 } else { -1.0 }).collect();
        bw[0] *= 0.5;
        bw[m] *= 0.5;

        let (gx, gw) = gauss_legendre(m + 12);
        let mut cum = vec![0.0; (m + 1) * (m + 1)];
        for p in 1..=m {
            let (a, b) = (-1.0, xref[p]);
            let half = 0.5 * (b - a);
            for (x, w) in gx.iter().zip(&gw) {
                let s = a + half * (x + 1.0);
                let basis = lagrange_all(&xref, &bw, s);
                for q in 0..=m {
                    cum[p * (m + 1) + q] += half * w * basis[q];
                }
            }
        }

        let ncell = breaks.len() - 1;
        let mut u = Vec::with_capacity(ncell * m + 1);
        for c in 0..ncell {
            let (a, b) = (breaks[c], breaks[c + 1]);
            for (p, x) in xref.iter().enumerate().take(m) {
                let _ = p;
                u.push(0.5 * (a + b) + 0.5 * (b - a) * x);
            }
        }
        u.push(breaks[ncell]);
        let r = u.iter().map(|v| v.exp()).collect();
        Ok(Self { m, breaks, xref, bw, cum, r, u })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.r
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.r[0]
    }

    pub fn r_max(&self) -> f64 {
        self.r[self.r.len() - 1]
    }

    pub fn cells(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn order(&self) -> usize {
        self.m
    }

    /// Global index of the node sitting exactly on the break nearest to `r`.
    pub fn break_node(&self, r: f64) -> usize {
        let lu = r.ln();
        let mut best = 0;
        for (c, b) in self.breaks.iter().enumerate() {
            if (b - lu).abs() < (self.breaks[best] - lu).abs() {
                best = c;
            }
        }
        best * self.m
    }

    fn cell_of(&self, u: f64) -> usize {
        let n = self.breaks.len();
        self.breaks.partition_point(|&b| b <= u).saturating_sub(1).min(n - 2)
    }

    /// Interpolates node values at `r` (clamped into the panel range).
    pub fn interp(&self, values: &[f64], r: f64) -> f64 {
        let u = r.ln().clamp(self.breaks[0], self.breaks[self.breaks.len() - 1]);
        let c = self.cell_of(u);
        let (a, b) = (self.breaks[c], self.breaks[c + 1]);
        let x = (2.0 * u - a - b) / (b - a);
        let base = c * self.m;
        let mut num = 0.0;
        let mut den = 0.0;
        for p in 0..=self.m {
            let d = x - self.xref[p];
            if d == 0.0 {
                return values[base + p];
            }
            let t = self.bw[p] / d;
            num += t * values[base + p];
            den += t;
        }
        num / den
    }

    /// Barycentric weights for evaluating at `r`: returns `(first node, weights)`
    /// so that `f(r) ≈ Σ w_p f[first+p]`. Lets callers interpolate many
    /// tabulated functions at the same radius cheaply.
    pub fn stencil(&self, r: f64) -> (usize, Vec<f64>) {
        let u = r.ln().clamp(self.breaks[0], self.breaks[self.breaks.len() - 1]);
        let c = self.cell_of(u);
        let (a, b) = (self.breaks[c], self.breaks[c + 1]);
        let x = (2.0 * u - a - b) / (b - a);
        (c * self.m, lagrange_all(&self.xref, &self.bw, x))
    }

    /// `I_i = ∫_{r_anchor}^{r_i} g(s) ds` (signed), sweeping outward from the
    /// anchor so that no large partial sums are ever subtracted.
    pub fn integrate_from(&self, g: &[f64], anchor: usize) -> Vec<f64> {
        let m = self.m;
        let n = self.r.len();
        assert_eq!(g.len(), n, "integrand length differs from panel nodes");
        // Integrand in u: g(r)·r.
        let gu: Vec<f64> = g.iter().zip(&self.r).map(|(a, b)| a * b).collect();
        let local = |c: usize| -> Vec<f64> {
            let half = 0.5 * (self.breaks[c + 1] - self.breaks[c]);
            let base = c * m;
            (0..=m)
                .map(|p| {
                    let row = &self.cum[p * (m + 1)..(p + 1) * (m + 1)];
                    half * row.iter().zip(&gu[base..=base + m]).map(|(s, v)| s * v).sum::<f64>()
                })
                .collect()
        };
        let mut out = vec![0.0; n];
        let ca = (anchor / m).min(self.cells() - 1);
        let pa = anchor - ca * m;
        let la = local(ca);
        for p in 0..=m {
            out[ca * m + p] = la[p] - la[pa];
        }
        for c in ca + 1..self.cells() {
            let l = local(c);
            let start = out[c * m];
            for p in 1..=m {
                out[c * m + p] = start + l[p];
            }
        }
        for c in (0..ca).rev() {
            let l = local(c);
            let end = out[(c + 1) * m];
            for p in 0..m {
                out[c * m + p] = end - (l[m] - l[p]);
            }
        }
        out
    }

    /// `∫_0^{r_i} g`, using a power-law fit of the first two nodes for `[0, r_min]`.
    pub fn integrate_from_zero(&self, g: &[f64]) -> Vec<f64> {
        let head = power_law_head(self.r[0], self.r[1], g[0], g[1]);
        let mut out = self.integrate_from(g, 0);
        for v in out.iter_mut() {
            *v += head;
        }
        out
    }

    /// `∫_{r_i}^{r_max} g`.
    pub fn integrate_to_end(&self, g: &[f64]) -> Vec<f64> {
        let mut out = self.integrate_from(g, self.r.len() - 1);
        for v in out.iter_mut() {
            *v = -*v;
        }
        out
    }

    pub fn log_nodes(&self) -> &[f64] {
        &self.u
    }
}

/// `∫_0^{r0} g` assuming `g ∝ s^p` there, with `p` read off two samples.
fn power_law_head(r0: f64, r1: f64, g0: f64, g1: f64) -> f64 {
    if g0 == 0.0 {
        return 0.0;
    }
    if g1 == 0.0 || g0.signum() != g1.signum() {
        return 0.0;
    }
    let p = (g1 / g0).ln() / (r1 / r0).ln();
    if p <= -1.0 {
        return 0.0;
    }
    r0 * g0 / (p + 1.0)
}

fn lagrange_all(xref: &[f64], bw: &[f64], x: f64) -> Vec<f64> {
    let n = xref.len();
    let mut out = vec![0.0; n];
    for p in 0..n {
        if x == xref[p] {
            out[p] = 1.0;
            return out;
        }
    }
    let mut den = 0.0;
    for p in 0..n {
        let t = bw[p] / (x - xref[p]);
        out[p] = t;
        den += t;
    }
    for v in out.iter_mut() {
        *v /= den;
    }
    out
}
