//! Real-q complex orbits assembled from primitive pieces between turning points.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::integrator::{rk4_step, ComplexState, Flow, Sample, Trajectory, DRIFT_TOL};
use super::path::{ComplexTimePath, Direction};
use crate::error::{Error, Result};
use crate::potentials::{Potential1D, PotentialKind};
use crate::semiclassics::{primitive, OrbitKind};

/// Regime of a piece between two consecutive junction points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Leg {
    /// Real time, real p.
    Allowed,
    /// Descending imaginary time.
    Forbidden,
}

impl Leg {
    fn direction(self) -> Direction {
        match self {
            Leg::Allowed => Direction::Real,
            Leg::Forbidden => Direction::ImaginaryDescending,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    DoubleWell,
    TripleWell,
    Pendulum,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Windings {
    pub w_r: u32,
    pub w_c: u32,
    pub w_m: u32,
}

/// Half traversals of each primitive orbit (a rotation counts as one).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Traversals {
    /// r or l pieces (pendulum: full rotations).
    pub lateral: u32,
    /// m pieces.
    pub central: u32,
    /// c pieces.
    pub forbidden: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitTopology {
    pub energy: f64,
    pub family: Family,
    /// Junction points in order, starting point first. For the pendulum these
    /// are values of Re q on the section through q = π.
    pub sequence: Vec<f64>,
    pub legs: Vec<Leg>,
    pub windings: Windings,
    pub traversals: Traversals,
    pub eta: i32,
    pub mu: u32,
    /// Regime of the first piece.
    pub branch: Leg,
}

fn family_of(potential: &Potential1D) -> Family {
    match potential.kind {
        PotentialKind::QuarticDoubleWell { .. } => Family::DoubleWell,
        PotentialKind::TripleWell { .. } => Family::TripleWell,
        PotentialKind::Pendulum { .. } => Family::Pendulum,
        _ => Family::General,
    }
}

fn check_eta(eta: i32) -> Result<()> {
    if eta == 1 || eta == -1 {
        Ok(())
    } else {
        Err(Error::Contract(format!("η must be ±1, got {eta}")))
    }
}

/// Sorted real turning points at E together with the regime of each gap.
fn turning_layout(potential: &Potential1D, energy: f64) -> Result<(Vec<f64>, Vec<Leg>)> {
    let mut reach: f64 = 1.0;
    if let Some(mut c) = potential.polynomial_coefficients() {
        c[0] -= energy;
        if let Some(roots) = crate::potentials::companion_real_roots(&c) {
            reach = roots.iter().fold(reach, |m, r| m.max(r.abs()));
        }
    }
    while potential.v(reach) <= energy || potential.v(-reach) <= energy {
        reach *= 2.0;
        if reach > 1e6 {
            return Err(Error::Topology(format!("{} does not confine E = {energy}", potential.label())));
        }
    }
    let points = potential.turning_points(energy, (-1.5 * reach, 1.5 * reach))?.positions();
    let gaps = points
        .windows(2)
        .map(|w| if potential.v(0.5 * (w[0] + w[1])) < energy { Leg::Allowed } else { Leg::Forbidden })
        .collect();
    Ok((points, gaps))
}

impl OrbitTopology {
    /// Topology from an explicit turning-point sequence on a confining potential.
    pub fn from_sequence(potential: &Potential1D, energy: f64, sequence: &[f64], eta: i32) -> Result<OrbitTopology> {
        check_eta(eta)?;
        let family = family_of(potential);
        if family == Family::Pendulum {
            return Err(Error::Topology("pendulum orbits are built with OrbitTopology::pendulum".into()));
        }
        if sequence.len() < 2 {
            return Err(Error::Topology("a sequence needs at least two turning points".into()));
        }
        let (points, gaps) = turning_layout(potential, energy)?;
        let tol = 1e-8 * points.iter().fold(1.0f64, |m, q| m.max(q.abs()));
        let index = |q: f64| {
            points
                .iter()
                .position(|&r| (r - q).abs() <= tol)
                .ok_or_else(|| Error::Topology(format!("q = {q} is not a turning point at E = {energy}")))
        };
        let idx: Vec<usize> = sequence.iter().map(|&q| index(q)).collect::<Result<_>>()?;
        let mut legs = Vec::with_capacity(idx.len() - 1);
        let mut tr = Traversals::default();
        for w in idx.windows(2) {
            let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
            if b != a + 1 {
                return Err(Error::Topology(format!(
                    "turning points {} and {} are not adjacent",
                    points[w[0]], points[w[1]]
                )));
            }
            let leg = gaps[a];
            legs.push(leg);
            match leg {
                Leg::Forbidden => tr.forbidden += 1,
                Leg::Allowed if points[a] < 0.0 && points[b] > 0.0 => tr.central += 1,
                Leg::Allowed => tr.lateral += 1,
            }
        }
        let (first, last) = (sequence[0], *sequence.last().unwrap());
        let target = eta as f64 * first;
        if (last - target).abs() > tol {
            return Err(Error::Topology(format!("sequence ends at {last}, expected η·start = {target}")));
        }
        let half = ((1 - eta) / 2) as u32;
        let windings = match family {
            Family::TripleWell => Windings { w_r: tr.lateral / 2, w_c: tr.forbidden / 2, w_m: tr.central / 2 },
            _ => Windings { w_r: tr.lateral / 2, w_c: tr.forbidden.saturating_sub(half) / 2, w_m: tr.central / 2 },
        };
        let mu = match family {
            Family::TripleWell => windings.w_r + windings.w_m + 3,
            _ => windings.w_r + windings.w_c + windings.w_m + half,
        };
        Ok(OrbitTopology {
            energy,
            family,
            sequence: sequence.to_vec(),
            branch: legs[0],
            legs,
            windings,
            traversals: tr,
            eta,
            mu,
        })
    }

    /// Double-well orbit starting at the inner right turning point: `r_before`
    /// loops on r, then the c pieces with the remaining w_r − r_before loops on
    /// l after the first crossing.
    pub fn double_well(
        potential: &Potential1D,
        energy: f64,
        w_r: u32,
        w_c: u32,
        eta: i32,
        r_before: u32,
    ) -> Result<OrbitTopology> {
        check_eta(eta)?;
        if r_before > w_r {
            return Err(Error::Topology(format!("r_before = {r_before} exceeds w_r = {w_r}")));
        }
        let (points, _) = turning_layout(potential, energy)?;
        let pos: Vec<f64> = points.iter().copied().filter(|&q| q > 0.0).collect();
        if pos.len() != 2 {
            return Err(Error::Topology(format!("E = {energy} is not below the double-well barrier")));
        }
        let (q_r, q_rp) = (pos[0], pos[1]);
        let halves = 2 * w_c + ((1 - eta) / 2) as u32;
        let mut seq = vec![q_r];
        for _ in 0..r_before {
            seq.extend([q_rp, q_r]);
        }
        if halves == 0 {
            if r_before != w_r {
                return Err(Error::Topology("without c pieces all r loops come first".into()));
            }
        } else {
            seq.push(-q_r);
            for _ in r_before..w_r {
                seq.extend([-q_rp, -q_r]);
            }
            for k in 1..halves {
                seq.push(if k % 2 == 1 { q_r } else { -q_r });
            }
        }
        if seq.len() < 2 {
            return Err(Error::Topology("empty orbit".into()));
        }
        OrbitTopology::from_sequence(potential, energy, &seq, eta)
    }

    /// Triple-well orbit r → c → m → −c → l (η = −1).
    pub fn triple_well(potential: &Potential1D, energy: f64, w_r: u32, w_m: u32, r_before: u32) -> Result<OrbitTopology> {
        if r_before > w_r {
            return Err(Error::Topology(format!("r_before = {r_before} exceeds w_r = {w_r}")));
        }
        let (points, _) = turning_layout(potential, energy)?;
        let pos: Vec<f64> = points.iter().copied().filter(|&q| q > 0.0).collect();
        if pos.len() != 3 {
            return Err(Error::Topology(format!("E = {energy} does not give three positive turning points")));
        }
        let (q0, q1, q2) = (pos[0], pos[1], pos[2]);
        let mut seq = vec![q1];
        for _ in 0..r_before {
            seq.extend([q2, q1]);
        }
        seq.extend([q0, -q0]);
        for _ in 0..w_m {
            seq.extend([q0, -q0]);
        }
        seq.push(-q1);
        for _ in r_before..w_r {
            seq.extend([-q2, -q1]);
        }
        OrbitTopology::from_sequence(potential, energy, &seq, -1)
    }

    /// Pendulum orbit through q = π: rotations and half loops of c, the first
    /// `r_before` rotations coming before the first half loop.
    pub fn pendulum(
        potential: &Potential1D,
        energy: f64,
        w_r: u32,
        w_c: u32,
        eta: i32,
        r_before: u32,
    ) -> Result<OrbitTopology> {
        check_eta(eta)?;
        let gamma = match potential.kind {
            PotentialKind::Pendulum { gamma } => gamma,
            _ => return Err(Error::Topology("not a pendulum".into())),
        };
        if energy <= gamma {
            return Err(Error::Topology(format!("E = {energy} is below the separatrix γ = {gamma}")));
        }
        if r_before > w_r {
            return Err(Error::Topology(format!("r_before = {r_before} exceeds w_r = {w_r}")));
        }
        let halves = 2 * w_c + ((1 - eta) / 2) as u32;
        if halves == 0 && r_before != w_r {
            return Err(Error::Topology("without c pieces all rotations come first".into()));
        }
        let mut legs = Vec::new();
        let mut seq = vec![PI];
        let (mut q, mut dir) = (PI, 1.0);
        let rotate = |n: u32, legs: &mut Vec<Leg>, seq: &mut Vec<f64>, q: &mut f64, dir: f64| {
            for _ in 0..n {
                *q += 2.0 * PI * dir;
                legs.push(Leg::Allowed);
                seq.push(*q);
            }
        };
        rotate(r_before, &mut legs, &mut seq, &mut q, dir);
        for k in 0..halves {
            legs.push(Leg::Forbidden);
            seq.push(q);
            dir = -dir;
            if k == 0 {
                rotate(w_r - r_before, &mut legs, &mut seq, &mut q, dir);
            }
        }
        if legs.is_empty() {
            return Err(Error::Topology("empty orbit".into()));
        }
        let tr = Traversals { lateral: w_r, central: 0, forbidden: halves };
        Ok(OrbitTopology {
            energy,
            family: Family::Pendulum,
            sequence: seq,
            branch: legs[0],
            legs,
            windings: Windings { w_r, w_c, w_m: 0 },
            traversals: tr,
            eta,
            mu: w_c + ((1 - eta) / 2) as u32,
        })
    }

    /// Same piece counts at another energy (for derivatives in E).
    pub fn at_energy(&self, energy: f64) -> OrbitTopology {
        OrbitTopology { energy, ..self.clone() }
    }
}

/// Primitive periods and reduced actions used by the composition laws.
struct Primitives {
    lateral: (f64, f64),
    central: (f64, f64),
    forbidden: (f64, f64),
}

fn primitives(potential: &Potential1D, family: Family, energy: f64, tr: &Traversals) -> Result<Primitives> {
    let get = |kind: OrbitKind, needed: bool| -> Result<(f64, f64)> {
        if !needed {
            return Ok((0.0, 0.0));
        }
        let t = primitive(potential, kind, energy)?;
        Ok((t.s_tilde, t.period))
    };
    let lateral = get(OrbitKind::R, tr.lateral > 0)?;
    let forbidden = get(OrbitKind::C, tr.forbidden > 0)?;
    let central = match family {
        Family::TripleWell => get(OrbitKind::M, tr.central > 0)?,
        _ if tr.central > 0 => {
            return Err(Error::Topology("central allowed pieces need the triple well".into()));
        }
        _ => (0.0, 0.0),
    };
    if family == Family::General {
        return Err(Error::Topology("composition laws are tabulated for the named families only".into()));
    }
    Ok(Primitives { lateral, central, forbidden })
}

/// T = w_r T_r − i w_c T_c − i(1−η)/4 T_c (double well, pendulum) or
/// w_r T_r + (w_m + ½) T_m − i T_c (triple well), from half-traversal counts.
pub fn orbit_period(topology: &OrbitTopology, potential: &Potential1D) -> Result<Complex64> {
    let tr = &topology.traversals;
    let p = primitives(potential, topology.family, topology.energy, tr)?;
    let lateral = match topology.family {
        Family::Pendulum => tr.lateral as f64,
        _ => 0.5 * tr.lateral as f64,
    };
    // a c traversal is half a loop for every family
    Ok(Complex64::new(lateral * p.lateral.1 + 0.5 * tr.central as f64 * p.central.1, -0.5 * tr.forbidden as f64 * p.forbidden.1))
}

/// Composed action: S_r = S̃_r − E T_r on allowed pieces, i(S̃_c + E T_c)/2 per
/// c piece on real-q families and −i(S̃_c − E T_c)/2 on the pendulum.
pub fn composed_action(topology: &OrbitTopology, potential: &Potential1D) -> Result<Complex64> {
    let tr = &topology.traversals;
    let e = topology.energy;
    let p = primitives(potential, topology.family, e, tr)?;
    let lateral = match topology.family {
        Family::Pendulum => tr.lateral as f64,
        _ => 0.5 * tr.lateral as f64,
    };
    let real = lateral * (p.lateral.0 - e * p.lateral.1) + 0.5 * tr.central as f64 * (p.central.0 - e * p.central.1);
    let (s_c, t_c) = p.forbidden;
    let imag = match topology.family {
        Family::Pendulum => -0.5 * tr.forbidden as f64 * (s_c - e * t_c),
        _ => 0.5 * tr.forbidden as f64 * (s_c + e * t_c),
    };
    Ok(Complex64::new(real, imag))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitOptions {
    /// Initial |dt| per RK4 step; halved until the drift tolerance holds.
    pub step: f64,
    pub max_halvings: u32,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions { step: 2e-3, max_halvings: 6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealQOrbit {
    pub topology: OrbitTopology,
    pub trajectory: Trajectory,
    /// Staircase realised by the legs.
    pub path: ComplexTimePath,
    /// Duration of each leg, as complex time.
    pub leg_times: Vec<Complex64>,
    /// |end − η·start| in the doubled phase space (Re q taken mod 2π on the circle).
    pub closure_residual: f64,
}

impl RealQOrbit {
    pub fn total_time(&self) -> Complex64 {
        self.path.total()
    }
}

/// Action of a constructed orbit, accumulated with the flow.
pub fn orbit_action(orbit: &RealQOrbit) -> Complex64 {
    orbit.trajectory.action()
}

const MAX_LEG_STEPS: usize = 4_000_000;

enum Event {
    /// Zero of Re p.
    RePZero,
    /// Zero of Im p.
    ImPZero,
    /// Re q reaches the value.
    ReQ(f64),
    /// Im q returns to zero.
    ImQZero,
}

impl Event {
    fn value(&self, y: &Flow) -> f64 {
        match *self {
            Event::RePZero => y.state.p.re,
            Event::ImPZero => y.state.p.im,
            Event::ReQ(target) => y.state.q.re - target,
            Event::ImQZero => y.state.q.im,
        }
    }

    fn snap(&self, y: &mut Flow) {
        match *self {
            Event::RePZero | Event::ImPZero => {
                y.state.p = Complex64::new(0.0, 0.0);
                y.state.q.im = 0.0;
            }
            Event::ReQ(target) => y.state.q.re = target,
            Event::ImQZero => {
                y.state.q.im = 0.0;
                y.state.p.im = 0.0;
            }
        }
    }
}

/// March from `y` until the event changes sign, then bisect inside the last step.
fn integrate_leg(
    potential: &Potential1D,
    y: Flow,
    leg: Leg,
    event: &Event,
    h: f64,
    t0: Complex64,
    s0: f64,
    samples: &mut Vec<Sample>,
) -> Result<(Flow, f64)> {
    let unit = leg.direction().unit();
    let mut cur = y;
    let mut elapsed = 0.0;
    let mut prev_sign = 0.0;
    for _ in 0..MAX_LEG_STEPS {
        let next = rk4_step(potential, &cur, unit * h);
        let g = event.value(&next);
        if prev_sign != 0.0 && g.signum() != prev_sign {
            // bisection on the partial step
            let (mut a, mut b) = (0.0, h);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let gm = event.value(&rk4_step(potential, &cur, unit * m));
                if gm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if gm.signum() == prev_sign {
                    a = m;
                } else {
                    b = m;
                }
                if b - a <= 1e-13 * (elapsed + h).max(1.0) {
                    break;
                }
            }
            let dt = 0.5 * (a + b);
            let mut end = rk4_step(potential, &cur, unit * dt);
            event.snap(&mut end);
            elapsed += dt;
            samples.push(Sample { s: s0 + elapsed, t: t0 + unit * elapsed, state: end.state, action: end.action });
            return Ok((end, elapsed));
        }
        if g != 0.0 {
            prev_sign = g.signum();
        }
        cur = next;
        elapsed += h;
        samples.push(Sample { s: s0 + elapsed, t: t0 + unit * elapsed, state: cur.state, action: cur.action });
    }
    Err(Error::Topology("a leg did not reach its next junction point".into()))
}

fn attempt(potential: &Potential1D, topology: &OrbitTopology, h: f64) -> Result<RealQOrbit> {
    let start = match topology.family {
        Family::Pendulum => {
            let gamma = -potential.v(0.0);
            ComplexState::real(PI, (2.0 * (topology.energy - gamma)).sqrt())
        }
        _ => ComplexState::real(topology.sequence[0], 0.0),
    };
    let mut y = Flow::start(start);
    let mut samples = vec![Sample { s: 0.0, t: Complex64::new(0.0, 0.0), state: start, action: y.action }];
    let mut path = ComplexTimePath::default();
    let mut leg_times = Vec::with_capacity(topology.legs.len());
    let (mut t, mut s) = (Complex64::new(0.0, 0.0), 0.0);
    for (i, &leg) in topology.legs.iter().enumerate() {
        let event = match (topology.family, leg) {
            (Family::Pendulum, Leg::Allowed) => Event::ReQ(topology.sequence[i + 1]),
            (Family::Pendulum, Leg::Forbidden) => Event::ImQZero,
            (_, Leg::Allowed) => Event::RePZero,
            (_, Leg::Forbidden) => Event::ImPZero,
        };
        let (next, dur) = integrate_leg(potential, y, leg, &event, h, t, s, &mut samples)?;
        y = next;
        let dt = leg.direction().unit() * dur;
        t += dt;
        s += dur;
        leg_times.push(dt);
        path.push(leg.direction(), dur)?;
    }
    let end = y.state;
    let closure_residual = match topology.family {
        Family::Pendulum => {
            let target = -start;
            let mut dq = end.q - target.q;
            dq.re -= 2.0 * PI * (dq.re / (2.0 * PI)).round();
            let dq = if topology.eta == 1 {
                let mut d = end.q - start.q;
                d.re -= 2.0 * PI * (d.re / (2.0 * PI)).round();
                d
            } else {
                dq
            };
            let dp = end.p - if topology.eta == 1 { start.p } else { -start.p };
            (dq.norm_sqr() + dp.norm_sqr()).sqrt()
        }
        _ => {
            let target = if topology.eta == 1 { start } else { -start };
            end.distance(&target)
        }
    };
    let mut trajectory = Trajectory {
        samples,
        tangent: y.tangent,
        initial_energy: Complex64::new(topology.energy, 0.0),
        drift: 0.0,
        steps_per_segment: 0,
    };
    trajectory.measure_drift(potential);
    Ok(RealQOrbit { topology: topology.clone(), trajectory, path, leg_times, closure_residual })
}

/// Integrates the orbit leg by leg, stopping each leg at its junction point,
/// and halves the step until the energy drift tolerance holds.
pub fn build_real_q_orbit(potential: &Potential1D, topology: &OrbitTopology, options: &OrbitOptions) -> Result<RealQOrbit> {
    if !(options.step > 0.0) {
        return Err(Error::Contract("orbit step must be positive".into()));
    }
    let mut h = options.step;
    let mut drift = f64::NAN;
    for _ in 0..=options.max_halvings {
        let orbit = attempt(potential, topology, h)?;
        drift = orbit.trajectory.drift;
        if drift <= DRIFT_TOL {
            return Ok(orbit);
        }
        h *= 0.5;
    }
    Err(Error::IntegrationAccuracy { drift, halvings: options.max_halvings })
}
