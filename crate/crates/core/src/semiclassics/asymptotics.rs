//! Small-energy expansions of the double-well actions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::actions::{Landscape, QUAD_RTOL};
use super::quadrature::integrate;
use crate::error::{Error, Result};
use crate::potentials::Potential1D;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants {
    /// Regularized integral ∫₀^a (ω/√(2V) − 1/(a−q)) dq.
    pub a_const: f64,
    /// π(5V‴(a)² − 3ω²V⁗(a))/(24ω⁷).
    pub b_const: f64,
    pub omega: f64,
    /// Well position.
    pub a: f64,
    /// Barrier action at the well-bottom energy, 4∫₀^a √(2V) dq.
    pub s_c0: f64,
}

pub fn asymptotic_constants(potential: &Potential1D) -> Result<AsymptoticConstants> {
    let a = match Landscape::of(potential)? {
        Landscape::DoubleWell { a, v_min, .. } => {
            if v_min.abs() > 1e-14 {
                return Err(Error::Contract(format!("well bottom V(a) = {v_min} is not zero")));
            }
            a
        }
        _ => return Err(Error::Contract("asymptotic constants need a symmetric double well".into())),
    };
    let omega = potential.harmonic_frequency(a)?;
    let a_const = integrate(
        |q| {
            let v = potential.v(q);
            omega / (2.0 * v).sqrt() - 1.0 / (a - q)
        },
        0.0,
        a,
        QUAD_RTOL,
    )?;
    let v3 = potential.eval(a, 3)?;
    let v4 = potential.eval(a, 4)?;
    let b_const = PI * (5.0 * v3 * v3 - 3.0 * omega * omega * v4) / (24.0 * omega.powi(7));
    let s_c0 = 4.0 * integrate(|q| (2.0 * potential.v(q)).sqrt(), 0.0, a, QUAD_RTOL)?;
    Ok(AsymptoticConstants { a_const, b_const, omega, a, s_c0 })
}

/// (S̃_c, S̃_r) from the leading terms of the E → 0⁺ expansions.
pub fn asymptotic_actions(c: &AsymptoticConstants, energy: f64) -> (f64, f64) {
    let w = c.omega;
    let s_c = c.s_c0 + (4.0 * energy / w) * ((2.0 * energy).sqrt() / (2.0 * c.a * w)).ln()
        - 2.0 * (2.0 * c.a_const + 1.0) * energy / w;
    let s_r = 2.0 * PI * energy / w + c.b_const * energy * energy;
    (s_c, s_r)
}

/// E = 2a²ω²e^{2A}e^{ω Im T}.
pub fn energy_from_imaginary_time(c: &AsymptoticConstants, im_t: f64) -> f64 {
    2.0 * c.a * c.a * c.omega * c.omega * (2.0 * c.a_const).exp() * (c.omega * im_t).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_constants() {
        let c = asymptotic_constants(&Potential1D::quartic(1.0)).unwrap();
        assert!((c.a_const - 2f64.ln()).abs() < 1e-10);
        let w = 2.0 * 2f64.sqrt();
        assert!((c.b_const - PI * 2304.0 / (24.0 * w.powi(7))).abs() < 1e-14);
        assert!((c.b_const - 0.20826).abs() < 1e-5);
        assert!((c.s_c0 - 8.0 * 2f64.sqrt() / 3.0).abs() < 1e-12);
        // 2a²ω²e^{2A} = 64
        assert!((energy_from_imaginary_time(&c, 0.0) - 64.0).abs() < 1e-8);
    }

    #[test]
    fn symmetric_toy_without_anharmonicity_has_zero_b() {
        let c = AsymptoticConstants { a_const: 0.0, b_const: 0.0, omega: 1.0, a: 1.0, s_c0: 1.0 };
        let (s_c, _) = asymptotic_actions(&c, 1e-300);
        assert!((s_c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn energy_decreases_with_im_t() {
        let c = asymptotic_constants(&Potential1D::quartic(1.0)).unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..20 {
            let e = energy_from_imaginary_time(&c, -(k as f64));
            assert!(e < prev && e > 0.0);
            prev = e;
        }
        let e = energy_from_imaginary_time(&c, -4.0);
        assert!((e - 64.0 * (-8.0 * 2f64.sqrt()).exp()).abs() < 1e-12);
    }
}
