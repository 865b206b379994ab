//! Gauss–Legendre rules and endpoint-singular integration.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes per panel of the composite rule.
pub const PANEL_NODES: usize = 64;
const MAX_PANELS: usize = 1 << 14;

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn panel_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_NODES))
}

/// Composite Gauss–Legendre with `panels` equal panels.
pub fn composite<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = panel_rule();
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let mid = a + h * (k as f64 + 0.5);
        let half = 0.5 * h;
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(w) {
            s += wi * f(mid + half * xi);
        }
        total += s * half;
    }
    total
}

fn panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let (x, w) = panel_rule();
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let (mut s, mut abs) = (0.0, 0.0);
    for (xi, wi) in x.iter().zip(w) {
        let v = wi * f(mid + half * xi);
        s += v;
        abs += v.abs();
    }
    (s * half, abs * half.abs())
}

/// Adaptive bisection on Gauss–Legendre panels until the estimated error is
/// below `rtol` of the integral.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rtol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (coarse, coarse_abs) = panel(&mut f, a, b);
    let tol = rtol * coarse.abs().max(1e-3 * coarse_abs);
    let mut stack = vec![(a, b, coarse, 0usize)];
    let (mut total, mut err) = (0.0, 0.0);
    let mut evaluations = 0usize;
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let (left, labs) = panel(&mut f, lo, mid);
        let (right, rabs) = panel(&mut f, mid, hi);
        evaluations += 1;
        let diff = (left + right - whole).abs();
        let share = tol * (hi - lo).abs() / (b - a).abs();
        if diff <= share || diff <= 1e-14 * (labs + rabs) || depth >= 48 || evaluations > MAX_PANELS
            || (hi - lo).abs() < 1e-13 * lo.abs().max(hi.abs())
        {
            total += left + right;
            err += diff;
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    let rel = err / total.abs().max(1e-300);
    // `err` sums coarse-vs-fine differences and overestimates the error of the
    // retained fine values by a wide margin.
    if rel > 1e4 * rtol {
        return Err(Error::Quadrature(rel));
    }
    Ok(total)
}

/// Which ends of [lo, hi] carry an inverse-square-root singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularEnds {
    Both,
    Lower,
    Upper,
    Neither,
}

/// ∫_lo^hi f(q) dq after the substitution q = mid + hw·sin θ (or its one-sided
/// variant). The integrand also receives the distances q − lo and hi − q,
/// computed without cancellation.
pub fn integrate_singular_with<F: FnMut(f64, f64, f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    ends: SingularEnds,
    rtol: f64,
) -> Result<f64> {
    let width = hi - lo;
    // 1 − sin θ = 2 sin²(π/4 − θ/2)
    let one_minus_sin = |t: f64| 2.0 * (0.25 * PI - 0.5 * t).sin().powi(2);
    match ends {
        SingularEnds::Both => {
            let hw = 0.5 * width;
            integrate(
                |t| {
                    let (dlo, dhi) = (hw * one_minus_sin(-t), hw * one_minus_sin(t));
                    let q = if dlo < dhi { lo + dlo } else { hi - dhi };
                    f(q, dlo, dhi) * hw * t.cos()
                },
                -0.5 * PI,
                0.5 * PI,
                rtol,
            )
        }
        SingularEnds::Upper => integrate(
            |t| {
                let dhi = width * one_minus_sin(t);
                let dlo = width * t.sin();
                let q = if dlo < dhi { lo + dlo } else { hi - dhi };
                f(q, dlo, dhi) * width * t.cos()
            },
            0.0,
            0.5 * PI,
            rtol,
        ),
        SingularEnds::Lower => integrate(
            |t| {
                let dlo = width * one_minus_sin(t);
                let dhi = width * t.sin();
                let q = if dlo < dhi { lo + dlo } else { hi - dhi };
                f(q, dlo, dhi) * width * t.cos()
            },
            0.0,
            0.5 * PI,
            rtol,
        ),
        SingularEnds::Neither => integrate(|q| f(q, q - lo, hi - q), lo, hi, rtol),
    }
}

pub fn integrate_singular<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    ends: SingularEnds,
    rtol: f64,
) -> Result<f64> {
    integrate_singular_with(|q, _, _| f(q), lo, hi, ends, rtol)
}
