//! Linear flows by spectral synthesis and their decay diagnostics.
//!
//! Each flow is a multiplier on the distorted transform of the data. With
//! `ω(k) = √(k² + σ)` (`σ` the threshold), the second-order flows are written
//! in real form, `V(t) = cos(ωt) F + sin(ωt) G / ω`, which is the same as the
//! half-wave pair `e^{±iωt} F̃_±` recombined. Heat is `e^{-t(k² + σ)} F`.
//! All requested times share one pass over the eigenfunction rows.

use crate::eigenfunctions::EigenSystem;
use crate::error::{Error, Result};
use crate::operator::OperatorKind;
use crate::transform::{
    fourier_norms, normalized_spectrum, Bump, FieldSample, FourierNorms, NormWeight, PlanConfig, SpectralPlan,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flow {
    Heat,
    KleinGordon,
    Wave,
}

impl Flow {
    pub fn name(&self) -> &'static str {
        match self {
            Flow::Heat => "heat",
            Flow::KleinGordon => "kg",
            Flow::Wave => "wave",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "heat" => Ok(Flow::Heat),
            "kg" | "klein-gordon" | "klein_gordon" => Ok(Flow::KleinGordon),
            "wave" => Ok(Flow::Wave),
            _ => Err(Error::InvalidInput(format!("unknown flow '{s}' (expected heat, kg or wave)"))),
        }
    }

    fn oscillatory(&self) -> bool {
        !matches!(self, Flow::Heat)
    }
}

/// Initial datum: an analytic bump or samples on some radial grid.
#[derive(Debug, Clone)]
pub enum InitialData {
    /// Sum of bumps.
    Bumps(Vec<Bump>),
    Sampled(FieldSample),
}

impl InitialData {
    pub fn bump(b: Bump) -> Self {
        InitialData::Bumps(vec![b])
    }

    fn support_top(&self) -> f64 {
        match self {
            InitialData::Bumps(b) => b.iter().map(|b| b.support().1).fold(0.0, f64::max),
            InitialData::Sampled(f) => f.support().map(|s| s.1).unwrap_or_else(|| f.grid().last()),
        }
    }

    fn breaks(&self) -> Vec<f64> {
        match self {
            InitialData::Bumps(b) => b.iter().flat_map(|b| [b.support().0, b.support().1]).collect(),
            InitialData::Sampled(f) => f.support().map(|(a, b)| vec![a, b]).unwrap_or_default(),
        }
    }

    fn sample(&self, plan: &SpectralPlan) -> Result<FieldSample> {
        match self {
            InitialData::Bumps(b) => Ok(plan.sample_bumps(b)),
            InitialData::Sampled(f) => plan.adopt(f),
        }
    }
}

/// What to evolve, for how long, and on which grids.
#[derive(Debug, Clone)]
pub struct EvolutionSpec {
    pub flow: Flow,
    pub operator: OperatorKind,
    pub f: InitialData,
    /// Initial velocity (second-order flows only).
    pub g: Option<InitialData>,
    pub times: Vec<f64>,
    /// Output radius; `None` picks one that contains the propagating front.
    pub r_max: Option<f64>,
    pub k_max: f64,
    pub k_min: f64,
}

impl EvolutionSpec {
    pub fn new(flow: Flow, operator: OperatorKind, f: InitialData, times: Vec<f64>) -> Self {
        Self { flow, operator, f, g: None, times, r_max: None, k_max: 20.0, k_min: 1e-3 }
    }

    pub fn with_velocity(mut self, g: InitialData) -> Self {
        self.g = Some(g);
        self
    }

    pub fn with_r_max(mut self, r_max: f64) -> Self {
        self.r_max = Some(r_max);
        self
    }

    pub fn with_k_max(mut self, k_max: f64) -> Self {
        self.k_max = k_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match (self.flow, self.operator) {
            (Flow::KleinGordon, OperatorKind::H2) => {
                return Err(Error::InvalidInput("the Klein-Gordon flow belongs to H1".into()))
            }
            (Flow::Wave, OperatorKind::H1) => return Err(Error::InvalidInput("the wave flow belongs to H2".into())),
            _ => {}
        }
        if self.g.is_some() && !self.flow.oscillatory() {
            return Err(Error::InvalidInput("heat flow takes no initial velocity".into()));
        }
        if self.times.is_empty() || self.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::InvalidInput("times must be finite and non-negative".into()));
        }
        Ok(())
    }

    fn t_max(&self) -> f64 {
        self.times.iter().cloned().fold(0.0, f64::max)
    }

    /// Output radius used when none is given.
    pub fn default_r_max(&self) -> f64 {
        let top = self.f.support_top().max(self.g.as_ref().map_or(0.0, |g| g.support_top()));
        let t = self.t_max();
        match self.flow {
            Flow::Heat => top + 8.0 * t.sqrt() + 10.0,
            _ => top + t + 20.0,
        }
    }

    /// Transform discretization resolving every requested time.
    pub fn plan_config(&self) -> PlanConfig {
        let mut breaks = self.f.breaks();
        if let Some(g) = &self.g {
            breaks.extend(g.breaks());
        }
        let top = self.f.support_top().max(self.g.as_ref().map_or(0.0, |g| g.support_top()));
        // Beyond this the heat multiplier is below e^{-40} at the earliest time.
        let t_first = self.times.iter().cloned().filter(|&t| t > 0.0).fold(f64::INFINITY, f64::min);
        let k_max = match self.flow {
            Flow::Heat if t_first.is_finite() && self.times.iter().all(|&t| t > 0.0) => {
                self.k_max.min((40.0 / t_first).sqrt()).max(2.0 * self.k_min)
            }
            _ => self.k_max,
        };
        PlanConfig {
            k_min: self.k_min,
            k_max,
            r_max: self.r_max.unwrap_or_else(|| self.default_r_max()),
            r_breaks: breaks,
            bands: None,
            extent: top,
            extra_frequency: if self.flow.oscillatory() { self.t_max() } else { 0.0 },
            store_limit: 4_000_000,
            ..PlanConfig::default()
        }
    }
}

/// Solutions at the requested times with transform-side bookkeeping.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub flow: Flow,
    pub operator: OperatorKind,
    pub times: Vec<f64>,
    pub solutions: Vec<FieldSample>,
    /// `Σ 2kρ'W (ω²|V|² + |∂_tV|²)` per time (second-order flows).
    pub energies: Option<Vec<f64>>,
    /// `sup_k |e^{iωt} F̃₊(k)|` per time (second-order flows).
    pub half_wave_sup: Option<Vec<f64>>,
    /// `k`-truncation indicator of the data's transform.
    pub tail: f64,
}

/// Builds the plan and evolves.
pub fn evolve(sys: Arc<EigenSystem>, spec: &EvolutionSpec) -> Result<Evolution> {
    spec.validate()?;
    if sys.operator().kind != spec.operator {
        return Err(Error::InvalidInput("eigen-system and evolution spec name different operators".into()));
    }
    let plan = SpectralPlan::new(sys, spec.plan_config())?;
    evolve_on(&plan, spec)
}

/// Evolves on an existing plan (whose `k` panels must resolve `t_max`).
pub fn evolve_on(plan: &SpectralPlan, spec: &EvolutionSpec) -> Result<Evolution> {
    spec.validate()?;
    let sigma = plan.operator().threshold();
    let f = spec.f.sample(plan)?;
    let fs = plan.forward(&f)?;
    let gs = match &spec.g {
        Some(g) => Some(plan.forward(&g.sample(plan)?)?),
        None => None,
    };
    let k = fs.k_grid().to_vec();
    let mw = fs.measure_weights().to_vec();
    let omega: Vec<f64> = k.iter().map(|k| (k * k + sigma).sqrt()).collect();
    let fv: Vec<f64> = fs.values().iter().map(|v| v.re).collect();
    let gv: Vec<f64> = match &gs {
        Some(g) => g.values().iter().map(|v| v.re).collect(),
        None => vec![0.0; k.len()],
    };
    let mut spectra = Vec::with_capacity(spec.times.len());
    let mut energies = Vec::new();
    let mut hw = Vec::new();
    for &t in &spec.times {
        let v: Vec<Complex64> = match spec.flow {
            Flow::Heat => (0..k.len()).map(|j| Complex64::new((-t * (k[j] * k[j] + sigma)).exp() * fv[j], 0.0)).collect(),
            _ => {
                let mut e = 0.0;
                let mut sup: f64 = 0.0;
                let vals = (0..k.len())
                    .map(|j| {
                        let (s, c) = (omega[j] * t).sin_cos();
                        let w = omega[j];
                        let val = c * fv[j] + s * gv[j] / w;
                        let vt = -w * s * fv[j] + c * gv[j];
                        e += mw[j] * (w * w * val * val + vt * vt);
                        let plus = 0.5 * Complex64::new(fv[j], -gv[j] / w) * Complex64::from_polar(1.0, w * t);
                        sup = sup.max(plus.norm());
                        Complex64::new(val, 0.0)
                    })
                    .collect();
                energies.push(e);
                hw.push(sup);
                vals
            }
        };
        spectra.push(v);
    }
    let solutions = plan.synthesize(&spectra)?;
    let osc = spec.flow.oscillatory();
    Ok(Evolution {
        flow: spec.flow,
        operator: spec.operator,
        times: spec.times.clone(),
        solutions,
        energies: osc.then_some(energies),
        half_wave_sup: osc.then_some(hw),
        tail: fs.tail_indicator(),
    })
}

/// Decay diagnostics of a computed evolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub flow: Flow,
    pub times: Vec<f64>,
    /// `sup_r |v(t, r)|`.
    pub sup: Vec<f64>,
    /// `sup_r √t √(|t - r| + 1) |v(t, r)|` (wave only).
    pub weighted_sup: Option<Vec<f64>>,
    /// Least-squares slope of `ln sup` against `ln t` over the final decade.
    pub exponent: f64,
    /// `max / min` of `t · sup` over all times.
    pub t_sup_ratio: f64,
}

impl DecayReport {
    /// `max / (value at the first time)` of the wave-weighted sup.
    pub fn weighted_growth(&self) -> Option<f64> {
        self.weighted_sup.as_ref().map(|w| w.iter().cloned().fold(0.0, f64::max) / w[0])
    }
}

/// Builds the report from solution samples (at least 6 positive times
/// spanning 1.5 decades).
pub fn decay_report(flow: Flow, times: &[f64], solutions: &[FieldSample]) -> Result<DecayReport> {
    if times.len() != solutions.len() {
        return Err(Error::InvalidInput("one solution per time is required".into()));
    }
    let tmin = times.iter().cloned().fold(f64::INFINITY, f64::min);
    let tmax = times.iter().cloned().fold(0.0, f64::max);
    if times.len() < 6 || !(tmin > 0.0) || tmax / tmin < 10f64.powf(1.5) {
        return Err(Error::InvalidInput(format!(
            "decay report needs >= 6 positive times spanning >= 1.5 decades (got {} times on [{tmin}, {tmax}])",
            times.len()
        )));
    }
    let sup: Vec<f64> = solutions.iter().map(|s| s.sup_norm()).collect();
    let weighted_sup = (flow == Flow::Wave).then(|| {
        times
            .iter()
            .zip(solutions)
            .map(|(&t, s)| {
                s.grid()
                    .nodes()
                    .iter()
                    .zip(s.values())
                    .map(|(&r, &v)| t.sqrt() * ((t - r).abs() + 1.0).sqrt() * v.abs())
                    .fold(0.0, f64::max)
            })
            .collect()
    });
    let tail: Vec<(f64, f64)> =
        times.iter().zip(&sup).filter(|(&t, _)| t >= tmax / 10.0).map(|(&t, &s)| (t.ln(), s.ln())).collect();
    let exponent = slope(&tail);
    let ts: Vec<f64> = times.iter().zip(&sup).map(|(t, s)| t * s).collect();
    let t_sup_ratio = ts.iter().cloned().fold(0.0, f64::max) / ts.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(DecayReport { flow, times: times.to_vec(), sup, weighted_sup, exponent, t_sup_ratio })
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Both sides of the weighted pointwise decay bound at each time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedEstimateReport {
    pub flow: Flow,
    pub times: Vec<f64>,
    /// `sup_r |v(t, r)|`.
    pub lhs: Vec<f64>,
    /// Right-hand side with unit constant.
    pub rhs: Vec<f64>,
    pub norms_f: [f64; 3],
    pub norms_g: Option<[f64; 3]>,
}

impl WeightedEstimateReport {
    pub fn ratios(&self) -> Vec<f64> {
        self.lhs.iter().zip(&self.rhs).map(|(l, r)| l / r).collect()
    }

    /// Implied constant: the largest ratio.
    pub fn max_ratio(&self) -> f64 {
        self.ratios().into_iter().fold(0.0, f64::max)
    }

    /// `max / min` of the ratio over the sampled times.
    pub fn ratio_spread(&self) -> f64 {
        let r = self.ratios();
        r.iter().cloned().fold(0.0, f64::max) / r.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Exponent standing in for `1/2+`.
pub const HALF_PLUS: f64 = 0.51;

fn weights(flow: Flow, velocity: bool) -> Result<[NormWeight; 3]> {
    let b = NormWeight::bracket;
    Ok(match (flow, velocity) {
        (Flow::KleinGordon, false) => [b(2.0), b(11.0 / 4.0), b(17.0 / 4.0)],
        (Flow::KleinGordon, true) => [b(1.0), b(7.0 / 4.0), b(13.0 / 4.0)],
        (Flow::Wave, false) => [
            NormWeight { k_pow: 1.0, bracket_pow: HALF_PLUS },
            NormWeight { k_pow: 1.0, bracket_pow: 0.5 },
            b(0.0),
        ],
        (Flow::Wave, true) => [b(HALF_PLUS), b(0.5), b(0.0)],
        (Flow::Heat, _) => return Err(Error::InvalidInput("weighted estimates concern the kg and wave flows".into())),
    })
}

fn rhs(flow: Flow, t: f64, nf: &FourierNorms, ng: Option<&FourierNorms>) -> f64 {
    let part = |n: &FourierNorms| match flow {
        Flow::KleinGordon => n.sup / t + n.d1 / t.powf(1.25) + n.d2 / t.powf(1.75),
        _ => n.sup / t.sqrt() + n.d1 / t,
    };
    part(nf) + ng.map_or(0.0, part)
}

/// Uniform `k` spacing and top frequency for the weighted norms.
pub const NORM_DK: f64 = 0.01;
pub const NORM_K_MAX: f64 = 20.0;

/// Evaluates `sup_r|v(t)|` and the weighted Fourier-norm bound for data that
/// are sums of bumps.
pub fn verify_weighted_estimates(
    sys: Arc<EigenSystem>,
    flow: Flow,
    f: &[Bump],
    g: Option<&[Bump]>,
    times: &[f64],
) -> Result<WeightedEstimateReport> {
    let n = (NORM_K_MAX / NORM_DK).round() as usize;
    let nf = fourier_norms(&normalized_spectrum(&sys, f, NORM_DK, n)?, weights(flow, false)?);
    let ng = match g {
        Some(g) => Some(fourier_norms(&normalized_spectrum(&sys, g, NORM_DK, n)?, weights(flow, true)?)),
        None => None,
    };
    let mut spec = EvolutionSpec::new(flow, sys.operator().kind, InitialData::Bumps(f.to_vec()), times.to_vec());
    if let Some(g) = g {
        spec = spec.with_velocity(InitialData::Bumps(g.to_vec()));
    }
    let ev = evolve(sys, &spec)?;
    let lhs: Vec<f64> = ev.solutions.iter().map(|s| s.sup_norm()).collect();
    let rhs = times.iter().map(|&t| rhs(flow, t, &nf, ng.as_ref())).collect();
    Ok(WeightedEstimateReport {
        flow,
        times: times.to_vec(),
        lhs,
        rhs,
        norms_f: [nf.sup, nf.d1, nf.d2],
        norms_g: ng.map(|n| [n.sup, n.d1, n.d2]),
    })
}
