//! Brent's method on a sign-changing bracket.

use crate::error::{Error, Result};

/// A located root together with the final bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub lo: f64,
    pub hi: f64,
    pub fx: f64,
}

impl Root {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Finds a root of `f` in `[a, b]`, shrinking the bracket to width `≤ tol`.
pub fn find_root_bracketed<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Root> {
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(Root { x: a, lo: a, hi: a, fx: 0.0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, lo: b, hi: b, fx: 0.0 });
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NoSignChange { a, b, fa, fb });
    }
    // b is the best iterate, c keeps the sign opposite to b.
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..500 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.25 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            let (lo, hi) = if b < c { (b, c) } else { (c, b) };
            // Report the bracket honestly; when fb == 0 it collapses to a point.
            let (lo, hi) = if fb == 0.0 { (b, b) } else { (lo, hi) };
            if hi - lo > tol && fb != 0.0 {
                // Close the bracket from the other side by one bisection sweep.
                return finish_by_bisection(&mut f, lo, hi, tol);
            }
            return Ok(Root { x: b, lo, hi, fx: fb });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    let (lo, hi) = if b < c { (b, c) } else { (c, b) };
    finish_by_bisection(&mut f, lo, hi, tol)
}

fn finish_by_bisection<F: FnMut(f64) -> f64>(f: &mut F, mut lo: f64, mut hi: f64, tol: f64) -> Result<Root> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo.signum() == fhi.signum() {
        return Err(Error::NoSignChange { a: lo, b: hi, fa: flo, fb: fhi });
    }
    while hi - lo > tol {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(Root { x: m, lo: m, hi: m, fx: 0.0 });
        }
        if fm.signum() == flo.signum() {
            lo = m;
            flo = fm;
        } else {
            hi = m;
        }
    }
    let x = 0.5 * (lo + hi);
    Ok(Root { x, lo, hi, fx: f(x) })
}
