//! Instanton splitting formulas for the double well and the pendulum.

use std::f64::consts::{E as EULER, PI};

use super::actions::{primitive_in, Landscape, OrbitKind};
use super::asymptotics::asymptotic_constants;
use super::ebk::{ebk_energy, Well};
use crate::error::{Error, Result};
use crate::estimate::{Method, SplittingEstimate};
use crate::potentials::Potential1D;

fn double_well(potential: &Potential1D) -> Result<(Landscape, f64)> {
    let landscape = Landscape::of(potential)?;
    match landscape {
        Landscape::DoubleWell { a, .. } => Ok((landscape, potential.harmonic_frequency(a)?)),
        _ => Err(Error::Contract(format!("{} is not a symmetric double well", potential.label()))),
    }
}

/// Λ(ħ) = −S̃_c(ħω/2)/(2ħ) + ln(ħω/π), the reference subtracted in ln-splitting plots.
pub fn lambda_subtraction(potential: &Potential1D, hbar: f64) -> Result<f64> {
    let (landscape, w) = double_well(potential)?;
    let c = primitive_in(potential, &landscape, OrbitKind::C, 0.5 * hbar * w)?;
    Ok(-c.s_tilde / (2.0 * hbar) + (hbar * w / PI).ln())
}

/// Ground-doublet instanton splitting (ħω/√π)e^{−S̃_c(ħω/2)/2ħ}.
///
/// `diagnostics.alternative` holds the second printed form
/// 2aω√(eħω/π)e^{A}e^{−S̃_c(0)/2ħ}.
pub fn splitting_ground_instanton(potential: &Potential1D, hbar: f64) -> Result<SplittingEstimate> {
    let (landscape, w) = double_well(potential)?;
    let e0 = 0.5 * hbar * w;
    let c = primitive_in(potential, &landscape, OrbitKind::C, e0)?;
    let value = hbar * w / PI.sqrt() * (-c.s_tilde / (2.0 * hbar)).exp();
    let k = asymptotic_constants(potential)?;
    let alt = 2.0 * k.a * w * (EULER * hbar * w / PI).sqrt() * k.a_const.exp() * (-k.s_c0 / (2.0 * hbar)).exp();
    let mut est = SplittingEstimate::new(value, Method::Semiclassical);
    est.diagnostics.energy = Some(e0);
    est.diagnostics.alternative = Some(alt);
    Ok(est)
}

/// (2ħ/T_r(E))e^{−S̃_c(E)/2ħ} evaluated at E = ħω/2, T_r = 2π/ω.
pub fn splitting_leading_order(potential: &Potential1D, hbar: f64) -> Result<SplittingEstimate> {
    let (landscape, w) = double_well(potential)?;
    let e0 = 0.5 * hbar * w;
    let c = primitive_in(potential, &landscape, OrbitKind::C, e0)?;
    let mut est = SplittingEstimate::new(hbar * w / PI * (-c.s_tilde / (2.0 * hbar)).exp(), Method::Asymptotic);
    est.diagnostics.energy = Some(e0);
    Ok(est)
}

/// Δₙ = (2ħ/T_r(Eₙ))e^{−S̃_c(Eₙ)/2ħ} with Eₙ from EBK. Works for symmetric
/// double wells (lateral tori) and the pendulum (rotational tori).
pub fn splitting_excited(potential: &Potential1D, n: usize, hbar: f64) -> Result<SplittingEstimate> {
    let landscape = Landscape::of(potential)?;
    let well = match landscape {
        Landscape::DoubleWell { .. } => Well::Lateral,
        Landscape::Pendulum { .. } => Well::Rotation,
        _ => return Err(Error::Contract(format!("no excited splitting formula for {}", potential.label()))),
    };
    let e = ebk_energy(potential, well, n, hbar)?;
    let r = primitive_in(potential, &landscape, OrbitKind::R, e)?;
    let c = primitive_in(potential, &landscape, OrbitKind::C, e)?;
    let mut est =
        SplittingEstimate::new(2.0 * hbar / r.period * (-c.s_tilde / (2.0 * hbar)).exp(), Method::Semiclassical);
    est.diagnostics.energy = Some(e);
    Ok(est)
}

/// Free-rotor limit (1/(πn^{4n−1}))(e/2)^{4n}ħ²(γ/ħ²)^{2n}, computed in logs.
pub fn pendulum_splitting_asymptotic(n: usize, gamma: f64, hbar: f64) -> Result<SplittingEstimate> {
    if n == 0 || !(hbar > 0.0) || gamma < 0.0 {
        return Err(Error::Contract(format!("need n ≥ 1, ħ > 0, γ ≥ 0 (n = {n}, ħ = {hbar}, γ = {gamma})")));
    }
    if gamma == 0.0 {
        return Ok(SplittingEstimate::new(0.0, Method::Asymptotic));
    }
    let nf = n as f64;
    let ln = -PI.ln() - (4.0 * nf - 1.0) * nf.ln() + 4.0 * nf * (1.0 - 2f64.ln()) + 2.0 * hbar.ln()
        + 2.0 * nf * (gamma / (hbar * hbar)).ln();
    let mut est = SplittingEstimate::new(ln.exp(), Method::Asymptotic);
    est.diagnostics.energy = Some(0.5 * nf * nf * hbar * hbar);
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_forms_and_subtraction() {
        let p = Potential1D::quartic(1.0);
        for &inv in &[6.0, 9.0, 12.0] {
            let hbar = 1.0 / inv;
            let g = splitting_ground_instanton(&p, hbar).unwrap();
            let lam = lambda_subtraction(&p, hbar).unwrap();
            assert!((g.value.ln() - lam - PI.sqrt().ln()).abs() < 1e-12);
            let ll = splitting_leading_order(&p, hbar).unwrap();
            assert!((ll.value.ln() - lam).abs() < 1e-12);
        }
        let g = splitting_ground_instanton(&p, 1.0 / 24.0).unwrap();
        assert!((g.value / g.diagnostics.alternative.unwrap() - 1.0).abs() < 0.02);
    }

    #[test]
    fn pendulum_asymptotic_scaling_in_gamma() {
        let a = pendulum_splitting_asymptotic(3, 0.5, 0.2).unwrap().value;
        let b = pendulum_splitting_asymptotic(3, 0.25, 0.2).unwrap().value;
        assert!((a / b - 64.0).abs() < 1e-9);
        assert_eq!(pendulum_splitting_asymptotic(3, 0.0, 0.2).unwrap().value, 0.0);
    }

    #[test]
    fn pendulum_elliptic_and_asymptotic_agree_deep_in_rotation() {
        let p = Potential1D::pendulum(1.0);
        // E ≈ n²ħ²/2 = 8γ; the gap widens like nγ²/E² as n grows at fixed E
        let hbar = 0.4;
        let n = 10;
        let ell = splitting_excited(&p, n, hbar).unwrap().value;
        let asy = pendulum_splitting_asymptotic(n, 1.0, hbar).unwrap().value;
        assert!((ell / asy).ln().abs() < 1.1f64.ln(), "{ell:e} vs {asy:e}");
    }
}
