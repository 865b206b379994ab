//! Semiclassical contributions of equilibria and orbits to tr(Ŝ^{(1−η)/2} Û(T)).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::orbits::{composed_action, orbit_period, Family, OrbitTopology};
use crate::error::{Error, Result};
use crate::estimate::{Method, SplittingEstimate};
use crate::potentials::Potential1D;
use crate::roots::brent;
use crate::semiclassics::{primitive, Landscape, OrbitKind};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// e^{−iH_e T/ħ} / (e^{λT/2} − η e^{−λT/2}).
pub fn equilibrium_contribution(h_e: f64, lambda: Complex64, t: Complex64, eta: i32, hbar: f64) -> Result<Complex64> {
    if eta != 1 && eta != -1 {
        return Err(Error::Contract(format!("η must be ±1, got {eta}")));
    }
    let (a, b) = ((0.5 * lambda * t).exp(), (-0.5 * lambda * t).exp());
    let den = a - eta as f64 * b;
    if den.norm() <= 1e-14 * (a.norm() + b.norm()) {
        return Err(Error::NongenericTime);
    }
    Ok((-I * h_e * t / hbar).exp() / den)
}

/// dT/dE of the composed period, by a five-point central difference.
pub fn period_derivative(topology: &OrbitTopology, potential: &Potential1D) -> Result<Complex64> {
    let e = topology.energy;
    let room = match topology.family {
        Family::Pendulum => e + potential.v(0.0),
        _ => e,
    };
    let d = 1e-3 * room.abs().max(1e-300);
    let at = |x: f64| orbit_period(&topology.at_energy(x), potential);
    let (p1, m1, p2, m2) = (at(e + d)?, at(e - d)?, at(e + 2.0 * d)?, at(e - 2.0 * d)?);
    Ok((8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * d))
}

/// (−1)^μ (Σ_β T_β / √(−2ηiπħ)) √(dE/dT) e^{iS/ħ}.
pub fn orbit_contribution(
    topology: &OrbitTopology,
    potential: &Potential1D,
    hbar: f64,
    branch_times: &[Complex64],
) -> Result<Complex64> {
    if branch_times.is_empty() {
        return Err(Error::Contract("no branch times".into()));
    }
    let t = orbit_period(topology, potential)?;
    let dtde = period_derivative(topology, potential)?;
    if dtde.norm() <= 1e-12 * t.norm() / topology.energy.abs().max(1e-300) {
        return Err(Error::Caustic);
    }
    let s = composed_action(topology, potential)?;
    let sign = if topology.mu % 2 == 0 { 1.0 } else { -1.0 };
    let sum: Complex64 = branch_times.iter().sum();
    let norm = (-2.0 * topology.eta as f64 * I * PI * hbar).sqrt();
    Ok(sign * sum / norm * (1.0 / dtde).sqrt() * (I * s / hbar).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSumEstimate {
    pub estimate: SplittingEstimate,
    /// Energy of the half symmetric orbit with T_c(E) = −2 Im T.
    pub energy: f64,
    pub time: Complex64,
    pub trace_su: Complex64,
    pub trace_u: Complex64,
}

/// Ground splitting from the w_r = 0 half orbit in the numerator and the two
/// well-bottom equilibria in the denominator.
pub fn double_well_orbit_sum(potential: &Potential1D, hbar: f64, im_t: f64) -> Result<OrbitSumEstimate> {
    let (a, v_min, v_max) = match Landscape::of(potential)? {
        Landscape::DoubleWell { a, v_min, v_max } => (a, v_min, v_max),
        _ => return Err(Error::Contract("the orbit-sum splitting needs a symmetric double well".into())),
    };
    if !(im_t < 0.0) {
        return Err(Error::Domain(format!("Im T = {im_t} must be negative")));
    }
    let target = -2.0 * im_t;
    let width = v_max - v_min;
    let f = |e: f64| primitive(potential, OrbitKind::C, e).map(|t| t.period - target).unwrap_or(f64::NAN);
    let (lo, hi) = (v_min + 1e-8 * width, v_max - 1e-6 * width);
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo > 0.0 && fhi < 0.0) {
        return Err(Error::Domain(format!("no energy with T_c(E) = {target}")));
    }
    let energy = brent(f, lo, hi, 1e-15 * width)?;
    let topo = OrbitTopology::double_well(potential, energy, 0, 0, -1, 0)?;
    let t = orbit_period(&topo, potential)?;
    let trace_su = orbit_contribution(&topo, potential, hbar, &[t, t])?;
    let omega = potential.harmonic_frequency(a)?;
    let trace_u = 2.0 * equilibrium_contribution(v_min, I * omega, t, 1, hbar)?;
    let delta = 2.0 * hbar / (I * t) * trace_su / trace_u;
    let mut estimate = SplittingEstimate::from_complex(delta, Method::Semiclassical);
    estimate.diagnostics.energy = Some(energy);
    Ok(OrbitSumEstimate { estimate, energy, time: t, trace_su, trace_u })
}
