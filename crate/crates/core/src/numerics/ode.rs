//! Dormand–Prince 5(4) with Hairer's 4th-order continuous extension.
//!
//! Integration runs in either direction (`t_end < t0` integrates backward).
//! Accepted steps are exposed to a callback as [`Segment`]s, which is how event
//! detection (shooting) and streaming evaluation at many output points are done
//! without storing a whole trajectory.

use super::Tolerance;
use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Step-control settings.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub tol: Tolerance,
    pub h_init: Option<f64>,
    /// Upper bound on |h|; `None` means the whole span.
    pub h_max: Option<f64>,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn new(tol: Tolerance) -> Self {
        Self { tol, h_init: None, h_max: None, max_steps: 2_000_000 }
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = Some(h_max);
        self
    }

    pub fn with_h_init(mut self, h: f64) -> Self {
        self.h_init = Some(h);
        self
    }
}

/// One accepted step with its dense interpolant.
pub struct Segment<'a> {
    pub t0: f64,
    pub h: f64,
    pub y0: &'a [f64],
    pub y1: &'a [f64],
    rcont: &'a [f64],
}

impl Segment<'_> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn dim(&self) -> usize {
        self.y0.len()
    }

    /// Whether `t` lies in the closed step interval.
    pub fn contains(&self, t: f64) -> bool {
        let (lo, hi) = if self.h > 0.0 { (self.t0, self.t1()) } else { (self.t1(), self.t0) };
        t >= lo && t <= hi
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        dense_eval(self.rcont, self.dim(), self.t0, self.h, t, out);
    }
}

fn dense_eval(rcont: &[f64], n: usize, t0: f64, h: f64, t: f64, out: &mut [f64]) {
    let s = (t - t0) / h;
    let s1 = 1.0 - s;
    for i in 0..n {
        let r1 = rcont[i];
        let r2 = rcont[n + i];
        let r3 = rcont[2 * n + i];
        let r4 = rcont[3 * n + i];
        let r5 = rcont[4 * n + i];
        out[i] = r1 + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5)));
    }
}

/// What the step callback wants next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Final state of a [`solve`] call.
#[derive(Debug, Clone)]
pub struct Finish {
    pub t: f64,
    pub y: Vec<f64>,
    pub steps: usize,
    /// True when the callback asked to stop before `t_end`.
    pub stopped: bool,
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t_end`, handing every accepted step
/// to `on_step`.
pub fn solve<F, C>(
    mut rhs: F,
    t0: f64,
    t_end: f64,
    y0: &[f64],
    opts: &OdeOptions,
    mut on_step: C,
) -> Result<Finish>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    C: FnMut(&Segment) -> Control,
{
    let n = y0.len();
    if !(t0.is_finite() && t_end.is_finite()) {
        return Err(Error::InvalidInput("ODE span must be finite".into()));
    }
    if t_end == t0 {
        return Ok(Finish { t: t0, y: y0.to_vec(), steps: 0, stopped: false });
    }
    let dir = (t_end - t0).signum();
    let span = (t_end - t0).abs();
    let h_max = opts.h_max.unwrap_or(span).min(span);
    let (rtol, atol) = (opts.tol.rel, opts.tol.abs);

    let mut y = y0.to_vec();
    let mut y_new = vec![0.0; n];
    let mut y_stage = vec![0.0; n];
    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; n]).collect();
    let mut rcont = vec![0.0; 5 * n];
    let mut t = t0;
    rhs(t, &y, &mut k[0]);

    let scale = |yi: f64, yn: f64| atol + rtol * yi.abs().max(yn.abs());

    // Initial step following Hairer–Nørsett–Wanner, II.4.
    let mut h = match opts.h_init {
        Some(h) => h.abs().min(h_max),
        None => {
            let mut d0 = 0.0;
            let mut d1 = 0.0;
            for i in 0..n {
                let sc = scale(y[i], y[i]);
                d0 += (y[i] / sc).powi(2);
                d1 += (k[0][i] / sc).powi(2);
            }
            let (d0, d1) = ((d0 / n as f64).sqrt(), (d1 / n as f64).sqrt());
            let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            let h0 = h0.min(h_max);
            for i in 0..n {
                y_stage[i] = y[i] + dir * h0 * k[0][i];
            }
            rhs(t + dir * h0, &y_stage, &mut k[1]);
            let mut d2 = 0.0;
            for i in 0..n {
                d2 += ((k[1][i] - k[0][i]) / scale(y[i], y[i])).powi(2);
            }
            let d2 = (d2 / n as f64).sqrt() / h0;
            let h1 = if d1.max(d2) <= 1e-15 {
                (h0 * 1e-3).max(1e-6)
            } else {
                (0.01 / d1.max(d2)).powf(0.2)
            };
            (100.0 * h0).min(h1).min(h_max)
        }
    };

    let mut steps = 0usize;
    let mut last_rejected = false;
    loop {
        if steps >= opts.max_steps {
            return Err(Error::TooManySteps { steps, r: t, target: t_end });
        }
        let remaining = (t_end - t).abs();
        let mut last = false;
        if h >= remaining * (1.0 - 1e-12) {
            h = remaining;
            last = true;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { r: t, h });
        }
        let hs = dir * h;

        macro_rules! stage {
            ($dst:expr, $c:expr, $($coef:expr => $ki:expr),+) => {{
                for i in 0..n {
                    y_stage[i] = y[i] + hs * (0.0 $(+ $coef * k[$ki][i])+);
                }
                let (head, tail) = k.split_at_mut($dst);
                let _ = head;
                rhs(t + $c * hs, &y_stage, &mut tail[0]);
            }};
        }
        stage!(1, C2, A21 => 0);
        stage!(2, C3, A31 => 0, A32 => 1);
        stage!(3, C4, A41 => 0, A42 => 1, A43 => 2);
        stage!(4, C5, A51 => 0, A52 => 1, A53 => 2, A54 => 3);
        stage!(5, 1.0, A61 => 0, A62 => 1, A63 => 2, A64 => 3, A65 => 4);
        for i in 0..n {
            y_new[i] = y[i]
                + hs * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i]
                    + A76 * k[5][i]);
        }
        {
            let (head, tail) = k.split_at_mut(6);
            let _ = head;
            rhs(t + hs, &y_new, &mut tail[0]);
        }

        let mut err = 0.0;
        for i in 0..n {
            let e = hs
                * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i]
                    + E7 * k[6][i]);
            err += (e / scale(y[i], y_new[i])).powi(2);
        }
        let err = (err / n as f64).sqrt();
        steps += 1;

        if !err.is_finite() {
            h *= 0.2;
            last_rejected = true;
            continue;
        }
        if err <= 1.0 {
            for i in 0..n {
                let ydiff = y_new[i] - y[i];
                let bspl = hs * k[0][i] - ydiff;
                rcont[i] = y[i];
                rcont[n + i] = ydiff;
                rcont[2 * n + i] = bspl;
                rcont[3 * n + i] = ydiff - hs * k[6][i] - bspl;
                rcont[4 * n + i] = hs
                    * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i]
                        + D6 * k[5][i] + D7 * k[6][i]);
            }
            let t_next = if last { t_end } else { t + hs };
            let seg = Segment { t0: t, h: t_next - t, y0: &y, y1: &y_new, rcont: &rcont };
            let ctl = on_step(&seg);
            t = t_next;
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            if ctl == Control::Stop {
                return Ok(Finish { t, y, steps, stopped: true });
            }
            if last {
                return Ok(Finish { t, y, steps, stopped: false });
            }
            let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 5.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(h_max);
            last_rejected = false;
        } else {
            let fac = (0.9 * err.powf(-0.2)).max(0.2);
            h *= fac;
            last_rejected = true;
        }
    }
}

/// A stored solution with dense evaluation anywhere in its span.
#[derive(Debug, Clone)]
pub struct Trajectory {
    dim: usize,
    t0s: Vec<f64>,
    hs: Vec<f64>,
    rcont: Vec<f64>,
    t_start: f64,
    t_end: f64,
    y_end: Vec<f64>,
}

impl Trajectory {
    pub fn span(&self) -> (f64, f64) {
        (self.t_start, self.t_end)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn steps(&self) -> usize {
        self.t0s.len()
    }

    pub fn final_state(&self) -> &[f64] {
        &self.y_end
    }

    /// State at `t`; `t` is clamped into the span.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out);
        out
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let forward = self.t_end > self.t_start;
        let (lo, hi) = if forward { (self.t_start, self.t_end) } else { (self.t_end, self.t_start) };
        let t = t.clamp(lo, hi);
        let idx = if forward {
            self.t0s.partition_point(|&s| s <= t)
        } else {
            self.t0s.partition_point(|&s| s >= t)
        }
        .saturating_sub(1)
        .min(self.t0s.len() - 1);
        let n = self.dim;
        dense_eval(&self.rcont[5 * n * idx..5 * n * (idx + 1)], n, self.t0s[idx], self.hs[idx], t, out);
    }
}

/// Integrates over `span = (t0, t_end)` and keeps the dense output of every step.
pub fn integrate_ode<F>(rhs: F, span: (f64, f64), init: &[f64], tol: Tolerance) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    integrate_ode_with(rhs, span, init, &OdeOptions::new(tol))
}

pub fn integrate_ode_with<F>(
    rhs: F,
    span: (f64, f64),
    init: &[f64],
    opts: &OdeOptions,
) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = init.len();
    let mut t0s = Vec::new();
    let mut hs = Vec::new();
    let mut rc = Vec::new();
    let fin = solve(rhs, span.0, span.1, init, opts, |seg| {
        t0s.push(seg.t0);
        hs.push(seg.h);
        rc.extend_from_slice(seg.rcont);
        Control::Continue
    })?;
    if t0s.is_empty() {
        // Zero-length span: a constant segment.
        t0s.push(span.0);
        hs.push(1.0);
        let mut r = vec![0.0; 5 * n];
        r[..n].copy_from_slice(init);
        rc = r;
    }
    Ok(Trajectory { dim: n, t0s, hs, rcont: rc, t_start: span.0, t_end: fin.t, y_end: fin.y })
}

/// Integrates and records the state at each of `points` (which must be sorted in
/// the direction of integration and lie inside the span).
pub fn integrate_to_points<F>(
    rhs: F,
    span: (f64, f64),
    init: &[f64],
    opts: &OdeOptions,
    points: &[f64],
) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = init.len();
    let mut out = Vec::with_capacity(points.len());
    let mut next = 0usize;
    let forward = span.1 > span.0;
    // Points at the very start are just the initial state.
    while next < points.len() && ((forward && points[next] <= span.0) || (!forward && points[next] >= span.0)) {
        out.push(init.to_vec());
        next += 1;
    }
    solve(rhs, span.0, span.1, init, opts, |seg| {
        while next < points.len() && seg.contains(points[next]) {
            let mut v = vec![0.0; n];
            seg.eval_into(points[next], &mut v);
            out.push(v);
            next += 1;
        }
        if next >= points.len() {
            Control::Stop
        } else {
            Control::Continue
        }
    })?;
    if out.len() != points.len() {
        return Err(Error::InvalidInput(format!(
            "{} output points lie outside the integration span",
            points.len() - out.len()
        )));
    }
    Ok(out)
}
