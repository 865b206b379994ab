//! Resonant tunnelling through the triple well: finite Fabry–Pérot sums over
//! central-well repetitions and their K → ∞ limit.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::actions::{primitive_in, ActionTable, Landscape, OrbitKind};
use super::ebk::{ebk_energy, Well};
use crate::error::{Error, Result};
use crate::estimate::{Method, SplittingEstimate};
use crate::potentials::Potential1D;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceConfig {
    /// T_m/T_r ≈ m/r.
    pub m: u32,
    pub r: u32,
    pub nu_r: f64,
    pub nu_m: f64,
    /// Number of central repetitions; None for the K → ∞ limit.
    pub k: Option<u64>,
    /// Wick angle of T = |T|e^{−iθ}.
    pub theta: f64,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl ResonanceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.r == 0 || gcd(self.m, self.r) != 1 {
            return Err(Error::Contract(format!("m = {}, r = {} must be coprime positive integers", self.m, self.r)));
        }
        if self.k == Some(0) {
            return Err(Error::Contract("K must be at least 1".into()));
        }
        if !(self.theta >= 0.0) {
            return Err(Error::Contract(format!("θ = {} must be non-negative", self.theta)));
        }
        Ok(())
    }
}

/// Actions and periods of the r, m and c orbits at the lateral EBK energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonantTables {
    pub energy: f64,
    pub r: ActionTable,
    pub m: ActionTable,
    pub c: ActionTable,
}

impl ResonantTables {
    pub fn nu_r(&self, hbar: f64) -> f64 {
        self.r.s_tilde / (2.0 * PI * hbar) - 0.5
    }

    pub fn nu_m(&self, hbar: f64) -> f64 {
        self.m.s_tilde / (2.0 * PI * hbar) - 0.5
    }

    /// T = (K + ½)T_m − iT_c.
    pub fn time_for_k(&self, k: u64) -> Complex64 {
        Complex64::new((k as f64 + 0.5) * self.m.period, -self.c.period)
    }
}

fn triple_well(potential: &Potential1D) -> Result<Landscape> {
    match Landscape::of(potential)? {
        l @ Landscape::TripleWell { .. } => Ok(l),
        _ => Err(Error::Contract(format!("{} is not a triple well", potential.label()))),
    }
}

pub fn resonant_tables(potential: &Potential1D, n: usize, hbar: f64) -> Result<ResonantTables> {
    let landscape = triple_well(potential)?;
    let energy = ebk_energy(potential, Well::Lateral, n, hbar)?;
    Ok(ResonantTables {
        energy,
        r: primitive_in(potential, &landscape, OrbitKind::R, energy)?,
        m: primitive_in(potential, &landscape, OrbitKind::M, energy)?,
        c: primitive_in(potential, &landscape, OrbitKind::C, energy)?,
    })
}

/// Resonance coordinates for a given K (None: K → ∞).
pub fn coordinates(potential: &Potential1D, n: usize, hbar: f64, k: Option<u64>) -> Result<ResonanceConfig> {
    let t = resonant_tables(potential, n, hbar)?;
    let theta = match k {
        Some(k) => {
            let tt = t.time_for_k(k);
            (-tt.im).atan2(tt.re)
        }
        None => 0.0,
    };
    Ok(ResonanceConfig { m: 2, r: 1, nu_r: t.nu_r(hbar), nu_m: t.nu_m(hbar), k, theta })
}

/// Fabry–Pérot sum at complex T:
/// (2ħ/T)e^{−S̃_c/ħ} Σ (w_r + 1)e^{iw_r(S̃_r/ħ − π) + iw_m(S̃_m/ħ − π)}
/// over w_r T_r + w_m T_m = Re T − T_m/2, matched to within `tolerance` (τ = 0).
pub fn resonant_splitting_sum_with(
    tables: &ResonantTables,
    hbar: f64,
    t: Complex64,
    tolerance: f64,
) -> Result<SplittingEstimate> {
    if t.im > 0.0 {
        return Err(Error::Domain(format!("Im T = {} must be non-positive", t.im)));
    }
    let (tr, tm) = (tables.r.period, tables.m.period);
    let reach = t.re - 0.5 * tm;
    let phase_r = tables.r.s_tilde / hbar - PI;
    let phase_m = tables.m.s_tilde / hbar - PI;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut terms = 0usize;
    if reach > -tolerance {
        let max_m = ((reach + tolerance) / tm).floor().max(0.0) as u64;
        for w_m in 0..=max_m {
            let rest = reach - w_m as f64 * tm;
            let w_r = (rest / tr).round();
            if w_r < 0.0 || (rest - w_r * tr).abs() > tolerance {
                continue;
            }
            // reduce phases before multiplying to keep the sum well conditioned
            let phase = (w_r * phase_r).rem_euclid(2.0 * PI) + (w_m as f64 * phase_m).rem_euclid(2.0 * PI);
            sum += (w_r + 1.0) * Complex64::from_polar(1.0, phase);
            terms += 1;
        }
    }
    if terms == 0 {
        return Err(Error::EmptySum(t.re));
    }
    let value = 2.0 * hbar / t * (-tables.c.s_tilde / hbar).exp() * sum;
    let mut est = SplittingEstimate::from_complex(value, Method::ResonantSum);
    est.diagnostics.energy = Some(tables.energy);
    est.diagnostics.truncation_residual = Some(terms as f64);
    Ok(est)
}

/// Fabry–Pérot sum with the default matching tolerance T_r/20.
pub fn resonant_splitting_sum(potential: &Potential1D, n: usize, hbar: f64, t: Complex64) -> Result<SplittingEstimate> {
    let tables = resonant_tables(potential, n, hbar)?;
    let tol = tables.r.period / 20.0;
    resonant_splitting_sum_with(&tables, hbar, t, tol)
}

/// Fabry–Pérot sum along the family T = (K + ½)T_m − iT_c.
pub fn resonant_splitting_k(potential: &Potential1D, n: usize, hbar: f64, k: u64) -> Result<SplittingEstimate> {
    if k == 0 {
        return Err(Error::Contract("K must be at least 1".into()));
    }
    let tables = resonant_tables(potential, n, hbar)?;
    let tol = tables.r.period / 20.0;
    resonant_splitting_sum_with(&tables, hbar, tables.time_for_k(k), tol)
}

/// K → ∞ limit (ħ/T_r)e^{−S̃_c/ħ}/|sin π(mν_r − rν_m)| with m = 2, r = 1.
pub fn resonant_splitting_limit_from(tables: &ResonantTables, hbar: f64) -> Result<SplittingEstimate> {
    let arg = PI * (2.0 * tables.nu_r(hbar) - tables.nu_m(hbar));
    let s = arg.sin().abs();
    if s < 1e-12 {
        return Err(Error::ExactResonance(hbar));
    }
    let value = hbar / tables.r.period * (-tables.c.s_tilde / hbar).exp() / s;
    let mut est = SplittingEstimate::new(value, Method::ResonantLimit);
    est.diagnostics.energy = Some(tables.energy);
    Ok(est)
}

pub fn resonant_splitting_limit(potential: &Potential1D, n: usize, hbar: f64) -> Result<SplittingEstimate> {
    let tables = resonant_tables(potential, n, hbar)?;
    resonant_splitting_limit_from(&tables, hbar)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodRatioReport {
    pub energies: Vec<f64>,
    pub ratios: Vec<f64>,
    /// max |T_m/T_r − 2|
    pub max_deviation: f64,
    /// max − min of the ratio over the grid
    pub spread: f64,
}

/// T_m/T_r over an energy grid inside (0, V_max).
pub fn period_ratio_check(potential: &Potential1D, energies: &[f64]) -> Result<PeriodRatioReport> {
    let landscape = Landscape::of(potential)?;
    let (lo, hi) = landscape.window();
    let mut ratios = Vec::with_capacity(energies.len());
    for &e in energies {
        if !(e > lo.max(0.0) && e < hi) {
            return Err(Error::Domain(format!("E = {e} outside (0, V_max)")));
        }
        let r = primitive_in(potential, &landscape, OrbitKind::R, e)?;
        let m = primitive_in(potential, &landscape, OrbitKind::M, e)?;
        ratios.push(m.period / r.period);
    }
    let max_deviation = ratios.iter().map(|x| (x - 2.0).abs()).fold(0.0, f64::max);
    let (mn, mx) = ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    Ok(PeriodRatioReport { energies: energies.to_vec(), ratios, max_deviation, spread: mx - mn })
}
