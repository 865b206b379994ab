//! EBK torus energies.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::actions::{action_allowed, outer_crossing, primitive_in, Landscape, OrbitKind};
use crate::error::{Error, Result};
use crate::potentials::Potential1D;
use crate::roots::brent;

/// Which family of tori is quantized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "well", rename_all = "snake_case")]
pub enum Well {
    /// Right lateral well of a double or triple well.
    Lateral,
    /// Central well of the triple well.
    Central,
    /// Pendulum rotations above the separatrix, S̃_r = 2πnħ.
    Rotation,
    /// Metastable island around q = 0.
    Island,
    /// Any confining single well around a minimum at `center`.
    Single { center: f64 },
}

/// Reduced action of the torus family at energy E, with the quantization
/// offset (½ for librations, 0 for rotations).
fn well_action(potential: &Potential1D, landscape: Option<&Landscape>, well: Well, energy: f64) -> Result<f64> {
    let orbit = match well {
        Well::Lateral => OrbitKind::R,
        Well::Central => OrbitKind::M,
        Well::Rotation => OrbitKind::R,
        Well::Island => OrbitKind::Island,
        Well::Single { center } => {
            let lo = outer_crossing(potential, energy, center, -1.0)?;
            let hi = outer_crossing(potential, energy, center, 1.0)?;
            return Ok(action_allowed(potential, energy, lo, hi)?.s_tilde);
        }
    };
    let landscape = landscape.ok_or_else(|| Error::Contract("no landscape".into()))?;
    Ok(primitive_in(potential, landscape, orbit, energy)?.s_tilde)
}

/// Energy window of the family.
fn window(potential: &Potential1D, landscape: Option<&Landscape>, well: Well) -> Result<(f64, f64)> {
    match (well, landscape) {
        (Well::Single { center }, _) => Ok((potential.v(center), f64::INFINITY)),
        (Well::Lateral, Some(Landscape::DoubleWell { v_min, v_max, .. })) => Ok((*v_min, *v_max)),
        (Well::Lateral, Some(Landscape::TripleWell { v_max, .. })) => Ok((0.0, *v_max)),
        (Well::Central, Some(Landscape::TripleWell { v_min, v_max, .. })) => Ok((*v_min, *v_max)),
        (Well::Rotation, Some(Landscape::Pendulum { gamma })) => Ok((*gamma, f64::INFINITY)),
        (Well::Island, Some(l @ Landscape::Island { .. })) => Ok(l.window()),
        _ => Err(Error::Contract(format!("{well:?} is not a well of {}", potential.label()))),
    }
}

/// Root of S̃_well(E) = (n + ½)2πħ (rotations: 2πnħ).
pub fn ebk_energy(potential: &Potential1D, well: Well, n: usize, hbar: f64) -> Result<f64> {
    if !(hbar > 0.0) {
        return Err(Error::Contract(format!("ħ must be positive, got {hbar}")));
    }
    let landscape = match well {
        Well::Single { .. } => None,
        _ => Some(Landscape::of(potential)?),
    };
    let (lo, hi) = window(potential, landscape.as_ref(), well)?;
    let target = match well {
        Well::Rotation => 2.0 * PI * n as f64 * hbar,
        _ => 2.0 * PI * (n as f64 + 0.5) * hbar,
    };
    let scale = if hi.is_finite() { lo.abs().max(hi.abs()) } else { lo.abs() }.max(1.0);
    let margin = 2e-9 * scale;
    let e_lo = lo + margin;
    // Librations shrink to zero action at the well bottom; only rotations
    // need the lower end evaluated.
    let f = |e: f64| {
        if e <= e_lo && well != Well::Rotation {
            Ok(-target)
        } else {
            well_action(potential, landscape.as_ref(), well, e).map(|s| s - target)
        }
    };
    if f(e_lo)? > 0.0 {
        return Err(Error::BelowSeparatrix { n });
    }
    let (e_hi, f_hi) = if hi.is_finite() {
        // approach the barrier top geometrically; quadrature there is slow
        let top = hi - margin;
        let mut k = 1;
        loop {
            let e = (lo + (hi - lo) * (1.0 - 0.5f64.powi(k))).min(top);
            let v = f(e)?;
            if v > 0.0 {
                break (e, v);
            }
            if e >= top {
                return Err(Error::AboveBarrier { n, target, max_action: v + target });
            }
            k += 1;
        }
    } else {
        let mut e = lo.abs().max(1.0) * 2.0 + lo;
        loop {
            let v = f(e)?;
            if v > 0.0 {
                break (e, v);
            }
            e = lo + 2.0 * (e - lo);
            if !e.is_finite() {
                return Err(Error::Root("EBK bracket expansion failed".into()));
            }
        }
    };
    let _ = f_hi;
    // Errors inside the bracket (quadrature) are surfaced after the search.
    let mut failure = None;
    let root = brent(
        |e| match f(e) {
            Ok(v) => v,
            Err(err) => {
                failure.get_or_insert(err);
                0.0
            }
        },
        e_lo,
        e_hi,
        1e-13 * scale,
    )?;
    match failure {
        Some(err) => Err(err),
        None => Ok(root),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_levels_are_exact() {
        let w = 1.3;
        let p = Potential1D::harmonic(w);
        for n in 0..6 {
            let e = ebk_energy(&p, Well::Single { center: 0.0 }, n, 0.1).unwrap();
            assert!((e - (n as f64 + 0.5) * 0.1 * w).abs() < 1e-11, "n = {n}: {e}");
        }
    }

    #[test]
    fn quartic_ground_state_close_to_half_omega() {
        let p = Potential1D::quartic(1.0);
        let hbar = 1.0 / 12.0;
        let w = 2.0 * 2f64.sqrt();
        let e = ebk_energy(&p, Well::Lateral, 0, hbar).unwrap();
        assert!((e - hbar * w / 2.0).abs() < 0.2 * hbar * w / 2.0);
    }

    #[test]
    fn above_barrier_is_an_error() {
        let p = Potential1D::quartic(1.0);
        assert!(matches!(ebk_energy(&p, Well::Lateral, 40, 1.0 / 12.0), Err(Error::AboveBarrier { .. })));
    }

    #[test]
    fn pendulum_rotation_levels() {
        let p = Potential1D::pendulum(1.0);
        let hbar = 0.1;
        // free-rotor limit E ≈ n²ħ²/2 at large n
        let e = ebk_energy(&p, Well::Rotation, 60, hbar).unwrap();
        assert!((e - 18.0).abs() / 18.0 < 0.01);
        assert!(matches!(ebk_energy(&p, Well::Rotation, 3, hbar), Err(Error::BelowSeparatrix { .. })));
    }

    #[test]
    fn triple_well_lateral_ground_state() {
        let p = Potential1D::triple_well(1.75, 0.5);
        let hbar = 1.0 / 6.6;
        let e = ebk_energy(&p, Well::Lateral, 0, hbar).unwrap();
        let w = p.harmonic_frequency(1.75).unwrap();
        assert!(e > 0.0 && (e - hbar * w / 2.0).abs() < 0.2 * hbar * w / 2.0);
    }
}
