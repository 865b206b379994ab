//! Mathieu characteristic values from truncated tridiagonal Fourier blocks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eigenvalues of the symmetric tridiagonal matrix (diagonal d, off-diagonal e,
/// e[i] couples i and i+1) by implicit QL with Wilkinson shifts. Ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if off.len() + 1 != n.max(1) {
        return Err(Error::Contract(format!("off-diagonal length {} for dimension {n}", off.len())));
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::SolverNonConvergence { block: "tridiagonal" });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MathieuValues {
    pub g: f64,
    /// a_0, a_2, a_4, … (π-periodic even solutions).
    pub a: Vec<f64>,
    /// b_2, b_4, … (π-periodic odd solutions).
    pub b: Vec<f64>,
    /// Truncation used for the last converged pass.
    pub modes: usize,
}

fn blocks(g: f64, modes: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    // cos(2kx), k = 0..modes; sin(2kx), k = 1..modes
    let da: Vec<f64> = (0..=modes).map(|k| (2 * k * 2 * k) as f64).collect();
    let mut ea = vec![g; modes];
    if modes > 0 {
        ea[0] = std::f64::consts::SQRT_2 * g;
    }
    let db: Vec<f64> = (1..=modes).map(|k| (2 * k * 2 * k) as f64).collect();
    let eb = vec![g; modes.saturating_sub(1)];
    Ok((tridiagonal_eigenvalues(&da, &ea)?, tridiagonal_eigenvalues(&db, &eb)?))
}

/// First `count` values a_{2n} and b_{2n+2} of y″ + (a − 2g cos 2x)y = 0,
/// with the tail doubled until the last one is converged to 1e−12.
pub fn mathieu_characteristics(g: f64, count: usize) -> Result<MathieuValues> {
    if count == 0 {
        return Err(Error::Contract("count must be at least 1".into()));
    }
    let mut modes = count + 16 + (2.0 * g.abs().sqrt()) as usize;
    let (mut a, mut b) = blocks(g, modes)?;
    for _ in 0..20 {
        let next = 2 * modes;
        let (a2, b2) = blocks(g, next)?;
        let la = a[count - 1];
        let lb = b[count - 1];
        let ok = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(1.0);
        let done = ok(la, a2[count - 1]) && ok(lb, b2[count - 1]);
        a = a2;
        b = b2;
        modes = next;
        if done {
            a.truncate(count);
            b.truncate(count);
            return Ok(MathieuValues { g, a, b, modes });
        }
    }
    Err(Error::SolverNonConvergence { block: "mathieu" })
}
