//! Gauss–Kronrod adaptive quadrature, Gauss–Legendre rules, and an
//! oscillation-aware wrapper that cuts the domain at the local wavelength.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208980634940,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Default
{
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

fn gk21<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[10];
    let mut gauss = T::default();
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        let s = f1 + f2;
        kron = kron + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).magnitude())
}

struct Piece<T> {
    a: f64,
    b: f64,
    val: T,
    err: f64,
}

impl<T> PartialEq for Piece<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Piece<T> {}
impl<T> PartialOrd for Piece<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Piece<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive GK21 with an absolute error target `abs` and relative
/// target `rel`; returns `(value, error estimate)`.
pub fn adaptive<T: QuadValue, F: FnMut(f64) -> T>(
    mut f: F,
    a: f64,
    b: f64,
    rel: f64,
    abs: f64,
    max_pieces: usize,
) -> Result<(T, f64)> {
    if a == b {
        return Ok((T::default(), 0.0));
    }
    let (v, e) = gk21(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, val: v, err: e });
    let mut total = v;
    let mut total_err = e;
    let mut pieces = 1usize;
    loop {
        let target = abs.max(rel * total.magnitude());
        if total_err <= target {
            break;
        }
        let worst = heap.pop().expect("heap never empties");
        let m = 0.5 * (worst.a + worst.b);
        // Width has collapsed to rounding level: nothing more can be gained here.
        if (worst.b - worst.a).abs() <= 4.0 * f64::EPSILON * m.abs().max(f64::MIN_POSITIVE)
            || pieces >= max_pieces
        {
            heap.push(worst);
            if total_err <= 10.0 * target {
                break;
            }
            return Err(Error::QuadratureNonConvergence { a, b, err: total_err });
        }
        let (v1, e1) = gk21(&mut f, worst.a, m);
        let (v2, e2) = gk21(&mut f, m, worst.b);
        total = total - worst.val + v1 + v2;
        total_err += e1 + e2 - worst.err;
        heap.push(Piece { a: worst.a, b: m, val: v1, err: e1 });
        heap.push(Piece { a: m, b: worst.b, val: v2, err: e2 });
        pieces += 1;
    }
    // Re-sum to shed accumulated rounding from the running updates.
    let mut s = T::default();
    let mut es = 0.0;
    for p in heap.iter() {
        s = s + p.val;
        es += p.err;
    }
    Ok((s, es))
}

/// `∫_a^b f` with `|error| ≤ tol·(1+|I|)`; integrable endpoint singularities are
/// resolved by repeated bisection toward the endpoint.
pub fn quad_adaptive<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput("quad_adaptive needs a finite interval".into()));
    }
    adaptive(f, a, b, 0.5 * tol, 0.5 * tol, 20_000).map(|(v, _)| v)
}

/// `∫_a^∞ f` through the map `x = a + t/(1-t)`.
pub fn quad_to_infinity<F: FnMut(f64) -> f64>(mut f: F, a: f64, tol: f64) -> Result<f64> {
    let g = |t: f64| {
        let s = 1.0 - t;
        f(a + t / s) / (s * s)
    };
    adaptive(g, 0.0, 1.0, 0.5 * tol, 0.5 * tol, 20_000).map(|(v, _)| v)
}

/// `∫_a^b A(x) e^{iφ(x)} dx`. The domain is cut into pieces no longer than the
/// local wavelength `2π/|φ'|`, each integrated adaptively.
pub fn quad_oscillatory<A, P, D>(
    amp: A,
    phase: P,
    dphase: D,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Complex64>
where
    A: Fn(f64) -> Complex64,
    P: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::InvalidInput("quad_oscillatory needs a finite interval a <= b".into()));
    }
    let len = b - a;
    if len == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    const MAX_PIECES: usize = 2_000_000;
    let mut total = Complex64::new(0.0, 0.0);
    let mut x = a;
    let mut pieces = 0usize;
    while x < b {
        let w = dphase(x).abs();
        let width = if w > 0.0 { (2.0 * std::f64::consts::PI / w).min(b - x) } else { b - x };
        let x1 = if width >= b - x { b } else { x + width };
        let share = (x1 - x) / len;
        let (v, _) = adaptive(
            |t| amp(t) * Complex64::from_polar(1.0, phase(t)),
            x,
            x1,
            0.25 * tol,
            0.5 * tol * share,
            2_000,
        )
        .map_err(|e| Error::UnresolvedPhase { a: x, b: x1, reason: e.to_string() })?;
        total += v;
        x = x1;
        pieces += 1;
        if pieces > MAX_PIECES {
            return Err(Error::UnresolvedPhase {
                a,
                b,
                reason: format!("more than {MAX_PIECES} wavelength pieces"),
            });
        }
    }
    Ok(total)
}

/// Nodes (ascending) and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}
