//! Potential families with analytic derivatives and turning-point location.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::brent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Line,
    Circle2Pi,
}

/// Shapes of a metastable island centred at q = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum IslandShape {
    /// Ascending coefficients c₀ + c₁q + c₂q² + …
    Polynomial { coeffs: Vec<f64> },
    /// V = ω²/2 · (q² − q^(2m+2)/edge^(2m)): harmonic core, steep drop at `edge`.
    Steep { omega: f64, edge: f64, m: u32 },
    /// V = ω²q²/2 for |q| ≤ edge and 0 outside (hard-wall island).
    Sharp { omega: f64, edge: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameters", rename_all = "snake_case")]
pub enum PotentialKind {
    /// V = (q² − a²)²
    QuarticDoubleWell { a: f64 },
    /// V = −γ cos q on the circle
    Pendulum { gamma: f64 },
    /// V = (q² − a²)²(q² − b²)
    TripleWell { a: f64, b: f64 },
    Island(IslandShape),
    /// Ascending coefficients.
    GeneralPolynomial { coeffs: Vec<f64> },
}

/// Crossing type of a turning point, read left to right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Crossing {
    EnteringForbidden,
    EnteringAllowed,
    /// Jump of V across E (piecewise kinds only).
    Wall,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoint {
    pub q: f64,
    pub crossing: Crossing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurningPointSet {
    pub energy: f64,
    pub points: Vec<TurningPoint>,
    /// True when the roots were confirmed against companion-matrix eigenvalues.
    pub companion_checked: bool,
}

impl TurningPointSet {
    pub fn positions(&self) -> Vec<f64> {
        self.points.iter().map(|t| t.q).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential1D {
    pub kind: PotentialKind,
}

trait Field: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    fn c(x: f64) -> Self;
    fn cos(self) -> Self;
    fn sin(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn re(self) -> f64;
}

impl Field for f64 {
    fn c(x: f64) -> Self {
        x
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn re(self) -> f64 {
        self
    }
}

impl Field for Complex64 {
    fn c(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn cos(self) -> Self {
        Complex64::cos(self)
    }
    fn sin(self) -> Self {
        Complex64::sin(self)
    }
    fn powi(self, n: i32) -> Self {
        Complex64::powi(&self, n)
    }
    fn re(self) -> f64 {
        self.re
    }
}

fn falling(n: u32, k: u32) -> f64 {
    (0..k).map(|j| (n - j) as f64).product()
}

fn poly_derivative<T: Field>(coeffs: &[f64], q: T, order: u32) -> T {
    let mut acc = T::c(0.0);
    for j in (order as usize..coeffs.len()).rev() {
        acc = acc * q + T::c(coeffs[j] * falling(j as u32, order));
    }
    acc
}

fn eval_generic<T: Field>(kind: &PotentialKind, q: T, order: u32) -> T {
    match kind {
        PotentialKind::QuarticDoubleWell { a } => {
            let u = (q - T::c(*a)) * (q + T::c(*a));
            match order {
                0 => u * u,
                1 => T::c(4.0) * q * u,
                2 => T::c(4.0) * u + T::c(8.0) * q * q,
                3 => T::c(24.0) * q,
                _ => T::c(24.0),
            }
        }
        PotentialKind::Pendulum { gamma } => {
            let g = T::c(*gamma);
            match order {
                0 => -(g * q.cos()),
                1 => g * q.sin(),
                2 => g * q.cos(),
                3 => -(g * q.sin()),
                _ => -(g * q.cos()),
            }
        }
        PotentialKind::TripleWell { a, b } => {
            // Leibniz rule on f = (q² − a²)², g = q² − b².
            let u = (q - T::c(*a)) * (q + T::c(*a));
            let f = [u * u, T::c(4.0) * q * u, T::c(4.0) * u + T::c(8.0) * q * q, T::c(24.0) * q, T::c(24.0)];
            let g = [(q - T::c(*b)) * (q + T::c(*b)), T::c(2.0) * q, T::c(2.0), T::c(0.0), T::c(0.0)];
            let n = order as usize;
            let mut acc = T::c(0.0);
            for k in 0..=n {
                let binom = falling(n as u32, k as u32) / falling(k as u32, k as u32);
                acc = acc + T::c(binom) * f[k] * g[n - k];
            }
            acc
        }
        PotentialKind::GeneralPolynomial { coeffs } | PotentialKind::Island(IslandShape::Polynomial { coeffs }) => {
            poly_derivative(coeffs, q, order)
        }
        PotentialKind::Island(IslandShape::Steep { omega, edge, m }) => {
            let w2 = 0.5 * omega * omega;
            let big = 2 * m + 2;
            let harmonic = match order {
                0 => q * q,
                1 => T::c(2.0) * q,
                2 => T::c(2.0),
                _ => T::c(0.0),
            };
            let s = q * T::c(1.0 / edge);
            let tail = T::c(falling(big, order) * edge.powi(2 - order as i32)) * s.powi((big - order) as i32);
            T::c(w2) * (harmonic - tail)
        }
        PotentialKind::Island(IslandShape::Sharp { omega, edge }) => {
            if q.re().abs() > *edge {
                return T::c(0.0);
            }
            let w2 = omega * omega;
            match order {
                0 => T::c(0.5 * w2) * q * q,
                1 => T::c(w2) * q,
                2 => T::c(w2),
                _ => T::c(0.0),
            }
        }
    }
}

impl Potential1D {
    pub fn new(kind: PotentialKind) -> Self {
        Potential1D { kind }
    }

    pub fn quartic(a: f64) -> Self {
        Self::new(PotentialKind::QuarticDoubleWell { a })
    }

    pub fn pendulum(gamma: f64) -> Self {
        Self::new(PotentialKind::Pendulum { gamma })
    }

    pub fn triple_well(a: f64, b: f64) -> Self {
        Self::new(PotentialKind::TripleWell { a, b })
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self::new(PotentialKind::GeneralPolynomial { coeffs })
    }

    /// ω²q²/2 as a general polynomial.
    pub fn harmonic(omega: f64) -> Self {
        Self::polynomial(vec![0.0, 0.0, 0.5 * omega * omega])
    }

    pub fn island(shape: IslandShape) -> Self {
        Self::new(PotentialKind::Island(shape))
    }

    pub fn topology(&self) -> Topology {
        match self.kind {
            PotentialKind::Pendulum { .. } => Topology::Circle2Pi,
            _ => Topology::Line,
        }
    }

    pub fn symmetric(&self) -> bool {
        match &self.kind {
            PotentialKind::GeneralPolynomial { coeffs } | PotentialKind::Island(IslandShape::Polynomial { coeffs }) => {
                coeffs.iter().skip(1).step_by(2).all(|&c| c == 0.0)
            }
            _ => true,
        }
    }

    /// Derivative of the given order (0..=4) at real q.
    pub fn eval(&self, q: f64, order: u32) -> Result<f64> {
        if order > 4 {
            return Err(Error::Contract(format!("derivative order {order} not in 0..=4")));
        }
        if !q.is_finite() {
            return Err(Error::Contract(format!("non-finite q = {q}")));
        }
        Ok(eval_generic(&self.kind, q, order))
    }

    /// Derivative of the given order (0..=4) at complex q.
    pub fn eval_complex(&self, q: Complex64, order: u32) -> Result<Complex64> {
        if order > 4 {
            return Err(Error::Contract(format!("derivative order {order} not in 0..=4")));
        }
        Ok(eval_generic(&self.kind, q, order))
    }

    #[inline]
    pub fn v(&self, q: f64) -> f64 {
        eval_generic(&self.kind, q, 0)
    }

    #[inline]
    pub fn dv(&self, q: f64) -> f64 {
        eval_generic(&self.kind, q, 1)
    }

    #[inline]
    pub fn d2v(&self, q: f64) -> f64 {
        eval_generic(&self.kind, q, 2)
    }

    #[inline]
    pub fn v_c(&self, q: Complex64) -> Complex64 {
        eval_generic(&self.kind, q, 0)
    }

    #[inline]
    pub fn dv_c(&self, q: Complex64) -> Complex64 {
        eval_generic(&self.kind, q, 1)
    }

    #[inline]
    pub fn d2v_c(&self, q: Complex64) -> Complex64 {
        eval_generic(&self.kind, q, 2)
    }

    /// Ascending coefficients for kinds whose roots can be cross-checked by a companion matrix.
    pub fn polynomial_coefficients(&self) -> Option<Vec<f64>> {
        match &self.kind {
            PotentialKind::QuarticDoubleWell { a } => {
                let a2 = a * a;
                Some(vec![a2 * a2, 0.0, -2.0 * a2, 0.0, 1.0])
            }
            PotentialKind::TripleWell { a, b } => {
                let (a2, b2) = (a * a, b * b);
                Some(vec![-a2 * a2 * b2, 0.0, a2 * a2 + 2.0 * a2 * b2, 0.0, -(2.0 * a2 + b2), 0.0, 1.0])
            }
            PotentialKind::GeneralPolynomial { coeffs } | PotentialKind::Island(IslandShape::Polynomial { coeffs }) => {
                Some(coeffs.clone())
            }
            _ => None,
        }
    }

    /// ω = sqrt(V''(q_eq)) at a well bottom.
    pub fn harmonic_frequency(&self, q_eq: f64) -> Result<f64> {
        let c = self.eval(q_eq, 2)?;
        if c <= 0.0 {
            return Err(Error::NotAWell { q: q_eq, curvature: c });
        }
        let slope = self.dv(q_eq);
        if slope.abs() > 1e-8 * c.max(1.0) {
            return Err(Error::Contract(format!("V'({q_eq}) = {slope:e} is not zero")));
        }
        Ok(c.sqrt())
    }

    /// Real roots of V(q) = E in `bracket`, sorted, polished by Brent's method.
    pub fn turning_points(&self, energy: f64, bracket: (f64, f64)) -> Result<TurningPointSet> {
        let (lo, hi) = bracket;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Contract(format!("bad bracket [{lo}, {hi}]")));
        }
        const SAMPLES: usize = 512;
        let scale = energy.abs().max(1.0);
        let dx = (hi - lo) / SAMPLES as f64;
        let grid: Vec<f64> = (0..=SAMPLES).map(|i| lo + dx * i as f64).collect();
        let xtol = 1e-14 * (lo.abs().max(hi.abs())).max(1.0);

        // Reject energies sitting on a critical value of V.
        let slopes: Vec<f64> = grid.iter().map(|&q| self.dv(q)).collect();
        for i in 0..SAMPLES {
            let (s0, s1) = (slopes[i], slopes[i + 1]);
            let qc = if s0 == 0.0 {
                Some(grid[i])
            } else if s0.signum() != s1.signum() && s1 != 0.0 {
                brent(|q| self.dv(q), grid[i], grid[i + 1], xtol).ok()
            } else {
                None
            };
            if let Some(qc) = qc {
                if (self.v(qc) - energy).abs() < 1e-9 * scale {
                    return Err(Error::DegenerateTurningPoint { q: qc, energy });
                }
            }
        }

        let f = |q: f64| self.v(q) - energy;
        let vals: Vec<f64> = grid.iter().map(|&q| f(q)).collect();
        let mut points = Vec::new();
        for i in 0..SAMPLES {
            let (f0, f1) = (vals[i], vals[i + 1]);
            let root = if f0 == 0.0 {
                Some(grid[i])
            } else if f1 != 0.0 && f0.signum() != f1.signum() {
                Some(brent(f, grid[i], grid[i + 1], xtol)?)
            } else if f1 == 0.0 && i + 1 == SAMPLES {
                Some(grid[i + 1])
            } else {
                None
            };
            if let Some(q) = root {
                let crossing = if f(q).abs() > 1e-10 * scale {
                    Crossing::Wall
                } else if f1 > f0 {
                    Crossing::EnteringForbidden
                } else {
                    Crossing::EnteringAllowed
                };
                if crossing == Crossing::Wall && !self.has_walls() {
                    return Err(Error::Root(format!("root polish failed at q = {q}")));
                }
                points.push(TurningPoint { q, crossing });
            }
        }

        let mut companion_checked = false;
        if let Some(coeffs) = self.polynomial_coefficients() {
            let mut c = coeffs;
            c[0] -= energy;
            if let Some(extra) = companion_real_roots(&c) {
                companion_checked = true;
                for r in extra.into_iter().filter(|&r| r > lo && r < hi) {
                    if points.iter().any(|t| (t.q - r).abs() < 1e-6 * r.abs().max(1.0)) {
                        continue;
                    }
                    // A close pair missed by sampling: polish between the pair's neighbourhood.
                    let w = 1e-3 * r.abs().max(1.0);
                    let a = (r - w).max(lo);
                    let b = (r + w).min(hi);
                    if f(a).signum() != f(b).signum() {
                        let q = brent(f, a, b, xtol)?;
                        let crossing =
                            if f(b) > f(a) { Crossing::EnteringForbidden } else { Crossing::EnteringAllowed };
                        points.push(TurningPoint { q, crossing });
                    }
                }
            }
        }
        points.sort_by(|a, b| a.q.partial_cmp(&b.q).unwrap());
        points.dedup_by(|a, b| (a.q - b.q).abs() < 1e-12);
        Ok(TurningPointSet { energy, points, companion_checked })
    }

    fn has_walls(&self) -> bool {
        matches!(self.kind, PotentialKind::Island(IslandShape::Sharp { .. }))
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match &self.kind {
            PotentialKind::QuarticDoubleWell { a } => format!("quartic_double_well(a={a})"),
            PotentialKind::Pendulum { gamma } => format!("pendulum(gamma={gamma})"),
            PotentialKind::TripleWell { a, b } => format!("triple_well(a={a},b={b})"),
            PotentialKind::Island(s) => format!("island({s:?})"),
            PotentialKind::GeneralPolynomial { coeffs } => format!("general_polynomial({coeffs:?})"),
        }
    }

    /// Period of the potential in q when it lives on a circle.
    pub fn period(&self) -> Option<f64> {
        match self.topology() {
            Topology::Circle2Pi => Some(2.0 * PI),
            Topology::Line => None,
        }
    }
}

/// Real roots (|Im| small) of Σ cₖ qᵏ from the eigenvalues of the companion matrix.
pub fn companion_real_roots(coeffs: &[f64]) -> Option<Vec<f64>> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.len() > 1 && *c.last().unwrap() == 0.0 {
        c.pop();
    }
    let d = c.len() - 1;
    if d == 0 {
        return None;
    }
    // even polynomials: solve in u = q², whose roots the QR iteration separates easily
    if d >= 2 && c.iter().skip(1).step_by(2).all(|&x| x == 0.0) {
        let half: Vec<f64> = c.iter().step_by(2).copied().collect();
        let us = companion_real_roots(&half)?;
        let mut out = Vec::new();
        for u in us {
            if u > 0.0 {
                out.extend([-u.sqrt(), u.sqrt()]);
            } else if u == 0.0 {
                out.push(0.0);
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return Some(out);
    }
    let lead = c[d];
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        m[(i, d - 1)] = -c[i] / lead;
    }
    let eig = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)?.complex_eigenvalues();
    let mut out: Vec<f64> =
        eig.iter().filter(|z| z.im.abs() < 1e-7 * z.norm().max(1.0)).map(|z| z.re).collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples_eval() {
        assert_eq!(Potential1D::quartic(1.0).eval(1.0, 2).unwrap(), 8.0);
        assert_eq!(Potential1D::pendulum(1.0).eval(0.0, 0).unwrap(), -1.0);
        let a: f64 = 7.0 / 4.0;
        let b: f64 = 0.5;
        let v0 = Potential1D::triple_well(a, b).eval(0.0, 0).unwrap();
        assert!((v0 + a.powi(4) * b * b).abs() < 1e-14);
        assert!((v0 + 2.344_726_562_5).abs() < 1e-12);
    }

    #[test]
    fn order_out_of_range() {
        assert!(matches!(Potential1D::quartic(1.0).eval(0.3, 5), Err(Error::Contract(_))));
    }

    #[test]
    fn frequencies() {
        let w = Potential1D::quartic(1.0).harmonic_frequency(1.0).unwrap();
        assert!((w - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(Potential1D::pendulum(1.0).harmonic_frequency(0.0).unwrap(), 1.0);
        let a: f64 = 1.75;
        let b: f64 = 0.5;
        let w = Potential1D::triple_well(a, b).harmonic_frequency(a).unwrap();
        assert!((w - (8.0 * a * a * (a * a - b * b)).sqrt()).abs() < 1e-12);
        assert!((w - 8.30098).abs() < 1e-5);
        assert!(matches!(Potential1D::quartic(1.0).harmonic_frequency(0.0), Err(Error::NotAWell { .. })));
    }

    #[test]
    fn quartic_turning_points() {
        let tp = Potential1D::quartic(1.0).turning_points(0.5, (0.0, 2.0)).unwrap();
        let q = tp.positions();
        assert_eq!(q.len(), 2);
        assert!((q[0] - (1.0 - 0.5f64.sqrt()).sqrt()).abs() < 1e-12);
        assert!((q[1] - (1.0 + 0.5f64.sqrt()).sqrt()).abs() < 1e-12);
        assert!((q[0] - 0.541196).abs() < 1e-6 && (q[1] - 1.306563).abs() < 1e-6);
        assert!(tp.companion_checked);
        assert_eq!(tp.points[0].crossing, Crossing::EnteringAllowed);
        assert_eq!(tp.points[1].crossing, Crossing::EnteringForbidden);
    }

    #[test]
    fn degenerate_turning_point() {
        let r = Potential1D::quartic(1.0).turning_points(0.0, (0.5, 2.0));
        assert!(matches!(r, Err(Error::DegenerateTurningPoint { .. })));
    }

    #[test]
    fn triple_well_three_roots() {
        let p = Potential1D::triple_well(1.75, 0.5);
        let tp = p.turning_points(0.1, (0.0, 3.0)).unwrap();
        assert_eq!(tp.points.len(), 3);
        let comp = companion_real_roots(&{
            let mut c = p.polynomial_coefficients().unwrap();
            c[0] -= 0.1;
            c
        })
        .unwrap();
        let positive: Vec<f64> = comp.into_iter().filter(|&r| r > 0.0).collect();
        for (a, b) in tp.positions().iter().zip(&positive) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn sharp_island_wall() {
        let p = Potential1D::island(IslandShape::Sharp { omega: 1.0, edge: 2.0 });
        let tp = p.turning_points(0.5, (0.0, 3.0)).unwrap();
        assert_eq!(tp.points.len(), 2);
        assert_eq!(tp.points[1].crossing, Crossing::Wall);
        assert!((tp.points[1].q - 2.0).abs() < 1e-12);
    }
}
