//! Reduced actions and periods of primitive orbits.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::elliptic::elliptic_ke_complement;
use super::quadrature::{integrate, integrate_singular_with, SingularEnds};
use crate::error::{Error, Result};
use crate::potentials::{IslandShape, Potential1D, PotentialKind};
use crate::roots::brent;

/// Relative accuracy requested from every action/period quadrature.
pub const QUAD_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Allowed,
    Forbidden,
}

/// How an integral over [lo, hi] is turned into a loop action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Multiplicity {
    /// 2∫_lo^hi, both ends turning points.
    Loop,
    /// 4∫_0^hi over half of a symmetric interval; lo must be the centre 0.
    MirroredHalf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionPeriod {
    pub s_tilde: f64,
    pub period: f64,
}

/// Primitive orbits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitKind {
    /// Lateral real oscillation (pendulum: rotation).
    R,
    /// Forbidden loop between the wells (pendulum: loop in the (Im q, Re p) plane).
    C,
    /// Central-well real oscillation.
    M,
    /// Real oscillation inside an island.
    Island,
    /// Escape instanton across the right island barrier.
    IslandC,
    /// Escape instanton across the left island barrier.
    IslandCLeft,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionTable {
    pub orbit: OrbitKind,
    pub energy: f64,
    pub s_tilde: f64,
    pub period: f64,
    pub turning_points: Vec<f64>,
    /// Sign s with T = s·dS̃/dE.
    pub duality: f64,
}

fn end_is_turning(potential: &Potential1D, energy: f64, q: f64) -> bool {
    (potential.v(q) - energy).abs() <= 1e-8 * energy.abs().max(1.0)
}

fn has_walls(potential: &Potential1D) -> bool {
    matches!(potential.kind, PotentialKind::Island(IslandShape::Sharp { .. }))
}

/// 2∫ or 4∫ of √(2|E−V|) and of 1/√(2|E−V|), with endpoint singularities removed.
pub fn action_integral(
    potential: &Potential1D,
    energy: f64,
    lo: f64,
    hi: f64,
    region: Region,
    multiplicity: Multiplicity,
) -> Result<ActionPeriod> {
    if !(lo < hi) {
        return Err(Error::Contract(format!("empty interval [{lo}, {hi}]")));
    }
    let lo_turn = end_is_turning(potential, energy, lo);
    let hi_turn = end_is_turning(potential, energy, hi);
    let walls = has_walls(potential);
    let lo_ok = lo_turn || walls || (multiplicity == Multiplicity::MirroredHalf && lo == 0.0);
    if multiplicity == Multiplicity::MirroredHalf && (lo != 0.0 || !potential.symmetric()) {
        return Err(Error::Contract("mirrored half-interval needs lo = 0 and a symmetric potential".into()));
    }
    if !lo_ok || !(hi_turn || walls) {
        return Err(Error::Contract(format!("[{lo}, {hi}] is not bounded by turning points at E = {energy}")));
    }
    for (q, turn) in [(lo, lo_turn), (hi, hi_turn)] {
        if turn && potential.dv(q).abs() < 1e-9 {
            return Err(Error::DegenerateTurningPoint { q, energy });
        }
    }
    let ends = match (lo_turn, hi_turn) {
        (true, true) => SingularEnds::Both,
        (true, false) => SingularEnds::Lower,
        (false, true) => SingularEnds::Upper,
        (false, false) => SingularEnds::Neither,
    };
    let sign = match region {
        Region::Allowed => 1.0,
        Region::Forbidden => -1.0,
    };
    let (dlo, dhi) = (potential.dv(lo).abs(), potential.dv(hi).abs());
    // Taylor data V^(k)(t)/k! at turning-point ends; V(t) = E is taken as exact
    // so the integrand vanishes at the end itself.
    let taylor = |t: f64| -> Result<[f64; 5]> {
        Ok([
            0.0,
            potential.eval(t, 1)?,
            potential.eval(t, 2)? / 2.0,
            potential.eval(t, 3)? / 6.0,
            potential.eval(t, 4)? / 24.0,
        ])
    };
    let t_lo = if lo_turn { Some(taylor(lo)?) } else { None };
    let t_hi = if hi_turn { Some(taylor(hi)?) } else { None };
    let near = 1e-5 * (hi - lo);
    // 2|E − V| from the Taylor series next to a turning point, where direct
    // evaluation loses all digits, with a first-order fallback for rounding.
    let gap = |q: f64, a: f64, b: f64| {
        let series = |c: &[f64; 5], d: f64| c[0] - d * (c[1] + d * (c[2] + d * (c[3] + d * c[4])));
        let diff = match (t_lo.as_ref(), t_hi.as_ref()) {
            (Some(c), _) if a <= b && a < near => series(c, a),
            (_, Some(c)) if b < a && b < near => series(c, -b),
            _ => energy - potential.v(q),
        };
        let g = 2.0 * sign * diff;
        if g > 0.0 {
            g
        } else {
            let lin = if a < b { dlo * a } else { dhi * b };
            (2.0 * lin).max(f64::MIN_POSITIVE)
        }
    };
    let factor = match multiplicity {
        Multiplicity::Loop => 2.0,
        Multiplicity::MirroredHalf => 4.0,
    };
    let s = integrate_singular_with(|q, a, b| gap(q, a, b).sqrt(), lo, hi, ends, QUAD_RTOL)?;
    let t = integrate_singular_with(|q, a, b| 1.0 / gap(q, a, b).sqrt(), lo, hi, ends, QUAD_RTOL)?;
    Ok(ActionPeriod { s_tilde: factor * s, period: factor * t })
}

/// S̃ = 2∫√(2(E−V)), T = 2∫dq/√(2(E−V)) over an allowed interval.
pub fn action_allowed(potential: &Potential1D, energy: f64, lo: f64, hi: f64) -> Result<ActionPeriod> {
    action_integral(potential, energy, lo, hi, Region::Allowed, Multiplicity::Loop)
}

/// Barrier action with an explicit multiplicity convention.
pub fn action_forbidden(
    potential: &Potential1D,
    energy: f64,
    lo: f64,
    hi: f64,
    multiplicity: Multiplicity,
) -> Result<ActionPeriod> {
    action_integral(potential, energy, lo, hi, Region::Forbidden, multiplicity)
}

/// Location of the features needed to pick turning points for each family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Landscape {
    /// Symmetric double well: minima at ±a, barrier top at 0.
    DoubleWell { a: f64, v_min: f64, v_max: f64 },
    Pendulum { gamma: f64 },
    /// Lateral minima at ±a, barrier tops at ±q_max, central minimum at 0.
    TripleWell { a: f64, q_max: f64, v_min: f64, v_max: f64 },
    /// Island around 0 with barrier tops at q_left < 0 < q_right.
    Island { q_left: f64, q_right: f64, v_left: f64, v_right: f64, v_min: f64 },
}

fn first_positive_slope_root(potential: &Potential1D, sign: f64, reach: f64) -> Result<f64> {
    let n = 4096;
    let dq = reach / n as f64;
    let mut prev = potential.dv(sign * dq);
    for i in 2..=n {
        let q = sign * dq * i as f64;
        let cur = potential.dv(q);
        if cur.signum() != prev.signum() {
            let (a, b) = (sign * dq * (i - 1) as f64, q);
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            return brent(|x| potential.dv(x), a, b, 1e-15);
        }
        prev = cur;
    }
    Err(Error::Contract("no stationary point found".into()))
}

impl Landscape {
    pub fn of(potential: &Potential1D) -> Result<Landscape> {
        match &potential.kind {
            PotentialKind::QuarticDoubleWell { a } => Ok(Landscape::DoubleWell { a: *a, v_min: 0.0, v_max: a.powi(4) }),
            PotentialKind::Pendulum { gamma } => Ok(Landscape::Pendulum { gamma: *gamma }),
            PotentialKind::TripleWell { a, b } => {
                let q_max = ((a * a + 2.0 * b * b) / 3.0).sqrt();
                Ok(Landscape::TripleWell { a: *a, q_max, v_min: potential.v(0.0), v_max: potential.v(q_max) })
            }
            PotentialKind::GeneralPolynomial { .. } => {
                if !potential.symmetric() || potential.d2v(0.0) >= 0.0 {
                    return Err(Error::Contract("general polynomial is not a symmetric double well".into()));
                }
                let a = first_positive_slope_root(potential, 1.0, 100.0)?;
                Ok(Landscape::DoubleWell { a, v_min: potential.v(a), v_max: potential.v(0.0) })
            }
            PotentialKind::Island(shape) => {
                let (q_left, q_right) = match shape {
                    IslandShape::Sharp { edge, .. } => (-edge, *edge),
                    IslandShape::Steep { edge, m, .. } => {
                        let q = edge * (1.0 / (*m as f64 + 1.0)).powf(1.0 / (2.0 * *m as f64));
                        (-q, q)
                    }
                    IslandShape::Polynomial { .. } => {
                        let r = first_positive_slope_root(potential, 1.0, 100.0)?;
                        let l = first_positive_slope_root(potential, -1.0, 100.0)?;
                        (l, r)
                    }
                };
                let inner = |q: f64| {
                    // value just inside a wall
                    potential.v(q - q.signum() * 1e-15 * q.abs().max(1.0))
                };
                Ok(Landscape::Island {
                    q_left,
                    q_right,
                    v_left: inner(q_left),
                    v_right: inner(q_right),
                    v_min: potential.v(0.0),
                })
            }
        }
    }

    /// Energy window (exclusive) in which the primitive orbits exist.
    pub fn window(&self) -> (f64, f64) {
        match *self {
            Landscape::DoubleWell { v_min, v_max, .. } => (v_min, v_max),
            Landscape::Pendulum { gamma } => (gamma, f64::INFINITY),
            Landscape::TripleWell { v_max, .. } => (0.0, v_max),
            Landscape::Island { v_left, v_right, v_min, .. } => (v_min, v_left.min(v_right)),
        }
    }
}

fn crossing(potential: &Potential1D, energy: f64, a: f64, b: f64) -> Result<f64> {
    let xtol = 1e-15 * a.abs().max(b.abs()).max(1.0);
    brent(|q| potential.v(q) - energy, a, b, xtol)
}

/// Outward search from `start` (where V < E) for V = E.
pub(crate) fn outer_crossing(potential: &Potential1D, energy: f64, start: f64, dir: f64) -> Result<f64> {
    let mut step = 0.25 * start.abs().max(0.25);
    let mut a = start;
    for _ in 0..200 {
        let b = a + dir * step;
        if potential.v(b) > energy {
            let (x, y) = if a < b { (a, b) } else { (b, a) };
            return crossing(potential, energy, x, y);
        }
        a = b;
        step *= 1.5;
    }
    Err(Error::Root("no outer turning point".into()))
}

pub(crate) fn check_window(landscape: &Landscape, energy: f64) -> Result<()> {
    let (lo, hi) = landscape.window();
    let scale = energy.abs().max(1.0);
    if !(energy > lo && energy < hi) {
        return Err(Error::Domain(format!("E = {energy} outside the window ({lo}, {hi})")));
    }
    if (energy - lo).abs() < 1e-9 * scale || (hi - energy).abs() < 1e-9 * scale {
        let q = match *landscape {
            Landscape::DoubleWell { a, .. } => {
                if (energy - lo).abs() < (hi - energy).abs() {
                    a
                } else {
                    0.0
                }
            }
            Landscape::TripleWell { q_max, .. } => q_max,
            Landscape::Pendulum { .. } => std::f64::consts::PI,
            Landscape::Island { q_right, .. } => q_right,
        };
        return Err(Error::DegenerateTurningPoint { q, energy });
    }
    Ok(())
}

fn pendulum_tables(gamma: f64, energy: f64, orbit: OrbitKind) -> Result<ActionTable> {
    match orbit {
        OrbitKind::R => {
            // E + γ cos q = (E − γ) + 2γ cos²(q/2), exact near q = π
            let gap = |q: f64| 2.0 * ((energy - gamma) + 2.0 * gamma * (0.5 * q).cos().powi(2));
            let s = 2.0 * integrate(|q| gap(q).sqrt(), 0.0, PI, QUAD_RTOL)?;
            let t = 2.0 * integrate(|q| 1.0 / gap(q).sqrt(), 0.0, PI, QUAD_RTOL)?;
            Ok(ActionTable { orbit, energy, s_tilde: s, period: t, turning_points: vec![], duality: 1.0 })
        }
        OrbitKind::C => {
            // Libration in the transformed potential γ cosh y, y = −Im q.
            let y0 = (energy / gamma).acosh();
            // E − γ cosh(y0 − d) = γ sinh y0 sinh d − 2E sinh²(d/2)
            let sh0 = (energy / gamma - 1.0).sqrt() * (energy / gamma + 1.0).sqrt();
            let gap = |d: f64| {
                let g = 2.0 * (gamma * sh0 * d.sinh() - 2.0 * energy * (0.5 * d).sinh().powi(2));
                g.max(f64::MIN_POSITIVE)
            };
            let s = integrate_singular_with(|_, _, d| gap(d).sqrt(), 0.0, y0, SingularEnds::Upper, QUAD_RTOL)?;
            let t = integrate_singular_with(|_, _, d| 1.0 / gap(d).sqrt(), 0.0, y0, SingularEnds::Upper, QUAD_RTOL)?;
            Ok(ActionTable {
                orbit,
                energy,
                s_tilde: 4.0 * s,
                period: 4.0 * t,
                turning_points: vec![-y0, y0],
                duality: 1.0,
            })
        }
        _ => Err(Error::Contract(format!("pendulum has no {orbit:?} orbit"))),
    }
}

/// Action, period and turning points of a primitive orbit at energy E.
pub fn primitive(potential: &Potential1D, orbit: OrbitKind, energy: f64) -> Result<ActionTable> {
    let landscape = Landscape::of(potential)?;
    primitive_in(potential, &landscape, orbit, energy)
}

pub fn primitive_in(
    potential: &Potential1D,
    landscape: &Landscape,
    orbit: OrbitKind,
    energy: f64,
) -> Result<ActionTable> {
    check_window(landscape, energy)?;
    let table = |ap: ActionPeriod, tps: Vec<f64>, duality: f64| ActionTable {
        orbit,
        energy,
        s_tilde: ap.s_tilde,
        period: ap.period,
        turning_points: tps,
        duality,
    };
    match (*landscape, orbit) {
        (Landscape::Pendulum { gamma }, _) => pendulum_tables(gamma, energy, orbit),
        (Landscape::DoubleWell { a, .. }, OrbitKind::R) => {
            let q_r = crossing(potential, energy, 0.0, a)?;
            let q_rp = outer_crossing(potential, energy, a, 1.0)?;
            Ok(table(action_allowed(potential, energy, q_r, q_rp)?, vec![q_r, q_rp], 1.0))
        }
        (Landscape::DoubleWell { a, .. }, OrbitKind::C) => {
            let q_r = crossing(potential, energy, 0.0, a)?;
            Ok(table(action_forbidden(potential, energy, 0.0, q_r, Multiplicity::MirroredHalf)?, vec![-q_r, q_r], -1.0))
        }
        (Landscape::TripleWell { a, q_max, .. }, OrbitKind::R) => {
            let q1 = crossing(potential, energy, q_max, a)?;
            let q2 = outer_crossing(potential, energy, a, 1.0)?;
            Ok(table(action_allowed(potential, energy, q1, q2)?, vec![q1, q2], 1.0))
        }
        (Landscape::TripleWell { q_max, .. }, OrbitKind::M) => {
            let q0 = crossing(potential, energy, 0.0, q_max)?;
            let ap = action_integral(potential, energy, 0.0, q0, Region::Allowed, Multiplicity::MirroredHalf)?;
            Ok(table(ap, vec![-q0, q0], 1.0))
        }
        (Landscape::TripleWell { a, q_max, .. }, OrbitKind::C) => {
            let q0 = crossing(potential, energy, 0.0, q_max)?;
            let q1 = crossing(potential, energy, q_max, a)?;
            Ok(table(action_forbidden(potential, energy, q0, q1, Multiplicity::Loop)?, vec![q0, q1], -1.0))
        }
        (Landscape::Island { q_left, q_right, .. }, OrbitKind::Island) => {
            let l = crossing(potential, energy, q_left, 0.0)?;
            let r = crossing(potential, energy, 0.0, q_right)?;
            Ok(table(action_allowed(potential, energy, l, r)?, vec![l, r], 1.0))
        }
        (Landscape::Island { q_right, .. }, OrbitKind::IslandC) => {
            let r = crossing(potential, energy, 0.0, q_right)?;
            let r2 = island_outer(potential, energy, q_right, 1.0)?;
            Ok(table(action_forbidden(potential, energy, r, r2, Multiplicity::Loop)?, vec![r, r2], -1.0))
        }
        (Landscape::Island { q_left, .. }, OrbitKind::IslandCLeft) => {
            let l = crossing(potential, energy, q_left, 0.0)?;
            let l2 = island_outer(potential, energy, q_left, -1.0)?;
            Ok(table(action_forbidden(potential, energy, l2, l, Multiplicity::Loop)?, vec![l2, l], -1.0))
        }
        _ => Err(Error::Contract(format!("{orbit:?} orbit does not exist for {}", potential.label()))),
    }
}

/// Outer turning point beyond an island barrier top (walls count as turning points).
fn island_outer(potential: &Potential1D, energy: f64, q_top: f64, dir: f64) -> Result<f64> {
    if let PotentialKind::Island(IslandShape::Sharp { edge, .. }) = potential.kind {
        return Ok(dir * edge);
    }
    let mut step = 1e-3 * q_top.abs().max(1e-3);
    let mut a = q_top;
    for _ in 0..400 {
        let b = a + dir * step;
        if potential.v(b) < energy {
            let (x, y) = if a < b { (a, b) } else { (b, a) };
            return crossing(potential, energy, x, y);
        }
        a = b;
        step *= 1.3;
    }
    Err(Error::Root("no outer island turning point".into()))
}

/// Pendulum closed forms: (S̃_r, T_r, S̃_c).
pub fn pendulum_closed_forms(gamma: f64, energy: f64) -> Result<(f64, f64, f64)> {
    if energy <= gamma {
        return Err(Error::Domain(format!("pendulum closed forms need E > γ, got {energy}")));
    }
    let sum = energy + gamma;
    // modulus √(2γ/(E+γ)), complement √((E−γ)/(E+γ)); and the reverse for S̃_c
    let kp_r = ((energy - gamma) / sum).sqrt();
    let (k_r, e_r) = elliptic_ke_complement(kp_r)?;
    let kp_c = (2.0 * gamma / sum).sqrt();
    let (k_c, e_c) = elliptic_ke_complement(kp_c)?;
    let root = (2.0 * sum).sqrt();
    let s_r = 4.0 * root * e_r;
    let t_r = 2.0 * 2f64.sqrt() / sum.sqrt() * k_r;
    let s_c = 8.0 * root * (k_c - e_c);
    Ok((s_r, t_r, s_c))
}
