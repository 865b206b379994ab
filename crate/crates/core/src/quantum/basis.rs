//! Truncated bases and parity-adapted Hamiltonian blocks.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::{Potential1D, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisKind {
    /// Periodic grid of `points` nodes on [−L, L) for potentials on the line.
    FourierGrid { half_width: f64, points: usize },
    /// Plane waves e^{ikq}, |k| ≤ max_mode, on the circle.
    FourierModes { max_mode: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub kind: BasisKind,
    pub hbar: f64,
}

impl BasisSpec {
    pub fn grid(half_width: f64, points: usize, hbar: f64) -> Self {
        BasisSpec { kind: BasisKind::FourierGrid { half_width, points }, hbar }
    }

    pub fn modes(max_mode: usize, hbar: f64) -> Self {
        BasisSpec { kind: BasisKind::FourierModes { max_mode }, hbar }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0) {
            return Err(Error::Contract(format!("ħ must be positive, got {}", self.hbar)));
        }
        match self.kind {
            BasisKind::FourierGrid { half_width, points } => {
                if points < 16 || points % 2 != 0 {
                    return Err(Error::Contract(format!("grid needs an even N ≥ 16, got {points}")));
                }
                if !(half_width > 0.0) {
                    return Err(Error::Contract(format!("box half-width must be positive, got {half_width}")));
                }
            }
            BasisKind::FourierModes { max_mode } => {
                if 2 * max_mode + 1 < 16 {
                    return Err(Error::Contract(format!("need 2K + 1 ≥ 16 modes, got K = {max_mode}")));
                }
            }
        }
        Ok(())
    }

    /// Dimension of the full (both parities) truncated space.
    pub fn dimension(&self) -> usize {
        match self.kind {
            BasisKind::FourierGrid { points, .. } => points,
            BasisKind::FourierModes { max_mode } => 2 * max_mode + 1,
        }
    }

    /// Starting basis for levels up to `e_max`: for the line, L = 3× the
    /// outermost turning point and a spacing resolving the largest classical
    /// momentum; for the circle, enough modes to cover √(2(E_max − V_min))/ħ.
    pub fn initial(potential: &Potential1D, hbar: f64, e_max: f64) -> Result<BasisSpec> {
        match potential.topology() {
            Topology::Circle2Pi => {
                let v_min = (0..256).map(|i| potential.v(2.0 * PI * i as f64 / 256.0)).fold(f64::INFINITY, f64::min);
                let p = (2.0 * (e_max - v_min).max(0.0)).sqrt();
                let k = ((2.0 * p / hbar).ceil() as usize + 16).max(8);
                Ok(BasisSpec::modes(k, hbar))
            }
            Topology::Line => {
                let (q_t, v_min) = outermost_turning_point(potential, e_max)?;
                let half_width = 3.0 * q_t.max(1e-3);
                let p = (2.0 * (e_max - v_min).max(0.0)).sqrt().max(hbar / q_t.max(1e-3));
                // grid momentum πħ/dx at four times the classical maximum
                let dx = PI * hbar / (4.0 * p);
                let n = ((2.0 * half_width / dx).ceil() as usize).max(64);
                Ok(BasisSpec::grid(half_width, n + n % 2, hbar))
            }
        }
    }

    /// Same kind with twice the resolution.
    pub fn refined(&self) -> BasisSpec {
        let kind = match self.kind {
            BasisKind::FourierGrid { half_width, points } => BasisKind::FourierGrid { half_width, points: 2 * points },
            BasisKind::FourierModes { max_mode } => BasisKind::FourierModes { max_mode: 2 * max_mode },
        };
        BasisSpec { kind, hbar: self.hbar }
    }
}

/// Largest |q| with V(q) ≤ E (searched on both sides), and min V over the scan.
fn outermost_turning_point(potential: &Potential1D, energy: f64) -> Result<(f64, f64)> {
    let mut reach = 1.0;
    let confined = |r: f64| potential.v(r) > energy && potential.v(-r) > energy && potential.dv(r) > 0.0 && potential.dv(-r) < 0.0;
    while !confined(reach) {
        reach *= 1.5;
        if reach > 1e6 {
            return Err(Error::Contract(format!("{} does not confine energy {energy}", potential.label())));
        }
    }
    let samples = 4096;
    let mut q_t: f64 = 0.0;
    let mut v_min = f64::INFINITY;
    for i in 0..=samples {
        let q = reach * i as f64 / samples as f64;
        for s in [q, -q] {
            let v = potential.v(s);
            v_min = v_min.min(v);
            if v <= energy {
                q_t = q_t.max(q);
            }
        }
    }
    if !v_min.is_finite() || v_min > energy {
        return Err(Error::Contract(format!("no classically allowed region at E = {energy}")));
    }
    Ok((q_t + reach / samples as f64, v_min))
}

/// The two real symmetric parity blocks of Ĥ.
#[derive(Debug, Clone)]
pub struct ParityBlocks {
    pub even: DMatrix<f64>,
    pub odd: DMatrix<f64>,
    pub basis: BasisSpec,
}

/// Periodic sinc kernel t[d] = (1/N)Σ_k ε_k cos(2πkd/N), ε_k = ħ²κ_k²/2.
fn kinetic_kernel(n: usize, half_width: f64, hbar: f64) -> Vec<f64> {
    let dk = PI / half_width;
    let eps: Vec<f64> = (0..n)
        .map(|k| {
            let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            0.5 * hbar * hbar * (signed * dk).powi(2)
        })
        .collect();
    (0..n)
        .map(|d| {
            let mut s = 0.0;
            for (k, e) in eps.iter().enumerate() {
                s += e * (2.0 * PI * ((k * d) % n) as f64 / n as f64).cos();
            }
            s / n as f64
        })
        .collect()
}

/// Grid node positions q_j = −L + j·2L/N.
pub fn grid_nodes(half_width: f64, points: usize) -> Vec<f64> {
    let dx = 2.0 * half_width / points as f64;
    (0..points).map(|j| -half_width + j as f64 * dx).collect()
}

pub fn build_hamiltonian(potential: &Potential1D, basis: &BasisSpec) -> Result<ParityBlocks> {
    basis.validate()?;
    match (basis.kind, potential.topology()) {
        (BasisKind::FourierGrid { half_width, points }, Topology::Line) => {
            if !potential.symmetric() {
                return Err(Error::IncompatibleBasis {
                    basis: "fourier_grid",
                    reason: "parity blocks need a symmetric potential".into(),
                });
            }
            Ok(grid_blocks(potential, half_width, points, basis))
        }
        (BasisKind::FourierModes { max_mode }, Topology::Circle2Pi) => modes_blocks(potential, max_mode, basis),
        (BasisKind::FourierGrid { .. }, _) => Err(Error::IncompatibleBasis {
            basis: "fourier_grid",
            reason: "grid basis is for potentials on the line".into(),
        }),
        (BasisKind::FourierModes { .. }, _) => Err(Error::IncompatibleBasis {
            basis: "fourier_modes",
            reason: "plane-wave basis is for potentials on the circle".into(),
        }),
    }
}

/// Parity basis on the grid with centre c = N/2: even {δ_c, (δ_{c+j}+δ_{c−j})/√2, δ_0},
/// odd {(δ_{c+j}−δ_{c−j})/√2}, j = 1..c−1.
fn grid_blocks(potential: &Potential1D, half_width: f64, n: usize, basis: &BasisSpec) -> ParityBlocks {
    let c = n / 2;
    let t = kinetic_kernel(n, half_width, basis.hbar);
    let nodes = grid_nodes(half_width, n);
    let tk = |i: usize, j: usize| t[(i + n - j) % n];
    let h = |i: usize, j: usize| tk(i, j) + if i == j { potential.v(nodes[i]) } else { 0.0 };
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // even basis vector k as (index, coefficient) pairs
    let even_vec = |k: usize| -> Vec<(usize, f64)> {
        if k == 0 {
            vec![(c, 1.0)]
        } else if k == c {
            vec![(0, 1.0)]
        } else {
            vec![(c + k, r), (c - k, r)]
        }
    };
    let odd_vec = |k: usize| -> Vec<(usize, f64)> { vec![(c + k + 1, r), (c - k - 1, -r)] };
    let fill = |dim: usize, vecs: &dyn Fn(usize) -> Vec<(usize, f64)>| {
        let cols: Vec<Vec<(usize, f64)>> = (0..dim).map(vecs).collect();
        let mut m = DMatrix::zeros(dim, dim);
        for a in 0..dim {
            for b in a..dim {
                let mut s = 0.0;
                for &(i, ci) in &cols[a] {
                    for &(j, cj) in &cols[b] {
                        s += ci * cj * h(i, j);
                    }
                }
                m[(a, b)] = s;
                m[(b, a)] = s;
            }
        }
        m
    };
    let even = fill(c + 1, &even_vec);
    let odd = fill(c - 1, &odd_vec);
    ParityBlocks { even, odd, basis: *basis }
}

/// Cosine/sine blocks for the pendulum: diagonal ħ²k²/2, coupling −γ/2
/// (−γ/√2 between k = 0 and k = 1 in the cosine block).
fn modes_blocks(potential: &Potential1D, k_max: usize, basis: &BasisSpec) -> Result<ParityBlocks> {
    let gamma = match potential.kind {
        crate::potentials::PotentialKind::Pendulum { gamma } => gamma,
        _ => {
            return Err(Error::IncompatibleBasis { basis: "fourier_modes", reason: "only the pendulum is supported".into() })
        }
    };
    let h2 = basis.hbar * basis.hbar;
    let mut even = DMatrix::zeros(k_max + 1, k_max + 1);
    for k in 0..=k_max {
        even[(k, k)] = 0.5 * h2 * (k * k) as f64;
        if k < k_max {
            let c = if k == 0 { -gamma * std::f64::consts::FRAC_1_SQRT_2 } else { -0.5 * gamma };
            even[(k, k + 1)] = c;
            even[(k + 1, k)] = c;
        }
    }
    let mut odd = DMatrix::zeros(k_max, k_max);
    for i in 0..k_max {
        let k = i + 1;
        odd[(i, i)] = 0.5 * h2 * (k * k) as f64;
        if i + 1 < k_max {
            odd[(i, i + 1)] = -0.5 * gamma;
            odd[(i + 1, i)] = -0.5 * gamma;
        }
    }
    Ok(ParityBlocks { even, odd, basis: *basis })
}

/// Grid amplitudes of an even/odd block vector, for plotting and edge checks.
pub fn grid_amplitudes(points: usize, even: bool, coeffs: &[f64]) -> Vec<f64> {
    let c = points / 2;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = vec![0.0; points];
    if even {
        psi[c] = coeffs[0];
        for k in 1..c {
            psi[c + k] = r * coeffs[k];
            psi[c - k] = r * coeffs[k];
        }
        psi[0] = coeffs[c];
    } else {
        for k in 1..c {
            psi[c + k] = r * coeffs[k - 1];
            psi[c - k] = -r * coeffs[k - 1];
        }
    }
    psi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pendulum_block_entries() {
        let p = Potential1D::pendulum(1.0);
        let b = build_hamiltonian(&p, &BasisSpec::modes(10, 0.5)).unwrap();
        for k in 0..5 {
            assert!((b.even[(k, k)] - 0.125 * (k * k) as f64).abs() < 1e-15);
        }
        assert!((b.even[(0, 1)] + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((b.even[(1, 2)] + 0.5).abs() < 1e-15);
        assert!((b.odd[(0, 1)] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn grid_potential_on_diagonal_of_full_operator() {
        // the even block entry for δ_c is T(0) + V(0)
        let p = Potential1D::quartic(1.0);
        let basis = BasisSpec::grid(3.0, 32, 0.1);
        let b = build_hamiltonian(&p, &basis).unwrap();
        let t0 = kinetic_kernel(32, 3.0, 0.1)[0];
        assert!((b.even[(0, 0)] - (t0 + 1.0)).abs() < 1e-13);
        let nodes = grid_nodes(3.0, 32);
        assert_eq!(nodes[16], 0.0);
        assert!((b.even[(16, 16)] - (t0 + p.v(-3.0))).abs() < 1e-12);
    }

    #[test]
    fn topology_mismatch_is_rejected() {
        let p = Potential1D::pendulum(1.0);
        assert!(matches!(build_hamiltonian(&p, &BasisSpec::grid(3.0, 32, 0.1)), Err(Error::IncompatibleBasis { .. })));
        let q = Potential1D::quartic(1.0);
        assert!(matches!(build_hamiltonian(&q, &BasisSpec::modes(10, 0.1)), Err(Error::IncompatibleBasis { .. })));
        assert!(BasisSpec::grid(3.0, 15, 0.1).validate().is_err());
    }
}
