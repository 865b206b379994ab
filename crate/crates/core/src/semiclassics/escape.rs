//! Escape rates out of a metastable island.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::actions::{primitive_in, Landscape, OrbitKind};
use super::ebk::{ebk_energy, Well};
use crate::error::{Error, Result};
use crate::estimate::Warning;
use crate::potentials::{IslandShape, Potential1D, PotentialKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeRate {
    pub rate: f64,
    pub energy: f64,
    /// Barrier action of the dominant (right) escape orbit.
    pub s_tilde_c: f64,
    pub period_c: f64,
    /// 2 for symmetric islands, 1 otherwise.
    pub multiplicity: f64,
    /// The dimensionless prefactor fₙ, fixed to 1.
    pub prefactor: f64,
    pub warnings: Vec<Warning>,
}

/// Γ = (f/T_c(E))e^{−S̃_c(E)/ħ} at a given island energy.
pub fn escape_rate_at_energy(potential: &Potential1D, energy: f64, hbar: f64) -> Result<EscapeRate> {
    let landscape = Landscape::of(potential)?;
    if !matches!(landscape, Landscape::Island { .. }) {
        return Err(Error::Contract(format!("{} is not an island potential", potential.label())));
    }
    let right = primitive_in(potential, &landscape, OrbitKind::IslandC, energy)?;
    let mut warnings = Vec::new();
    let multiplicity = if potential.symmetric() {
        2.0
    } else {
        let left = primitive_in(potential, &landscape, OrbitKind::IslandCLeft, energy)?;
        if left.s_tilde <= right.s_tilde {
            warnings.push(Warning::LeftBarrierNotSubdominant { left: left.s_tilde, right: right.s_tilde });
        }
        1.0
    };
    let prefactor = 1.0;
    let rate = multiplicity * prefactor / right.period * (-right.s_tilde / hbar).exp();
    Ok(EscapeRate {
        rate,
        energy,
        s_tilde_c: right.s_tilde,
        period_c: right.period,
        multiplicity,
        prefactor,
        warnings,
    })
}

/// Escape rate of the n-th island quasi-mode, Eₙ from EBK inside the island.
pub fn escape_rate(potential: &Potential1D, n: usize, hbar: f64) -> Result<EscapeRate> {
    let energy = ebk_energy(potential, Well::Island, n, hbar)?;
    escape_rate_at_energy(potential, energy, hbar)
}

/// Harmonic-island estimate S̃_c ≈ (2E/ω)[√a√(a−1) − ln(√a + √(a−1))], a = ωA/(2πE).
pub fn sharp_island_action(energy: f64, omega: f64, area: f64) -> Result<f64> {
    let a = omega * area / (2.0 * PI * energy);
    if !(a > 1.0) {
        return Err(Error::EnergyAboveIsland(a));
    }
    let (sa, sa1) = (a.sqrt(), (a - 1.0).sqrt());
    // ln(√a + √(a−1)) = asinh(√(a−1))
    Ok(2.0 * energy / omega * (sa * sa1 - sa1.asinh()))
}

/// Phase-space area used by the sharp-island estimate: the harmonic ellipse
/// that reaches the island edge, πωq₀².
pub fn island_area(potential: &Potential1D) -> Result<(f64, f64)> {
    match potential.kind {
        PotentialKind::Island(IslandShape::Steep { omega, edge, .. })
        | PotentialKind::Island(IslandShape::Sharp { omega, edge }) => Ok((omega, PI * omega * edge * edge)),
        _ => Err(Error::Contract("island area is defined for steep or sharp islands".into())),
    }
}
