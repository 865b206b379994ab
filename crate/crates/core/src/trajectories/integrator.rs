//! Fourth-order integration of Hamilton's equations with complex time steps.

use std::io::Write;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::path::ComplexTimePath;
use crate::error::{Error, Result};
use crate::potentials::Potential1D;

/// Relative energy drift accepted along a run.
pub const DRIFT_TOL: f64 = 1e-10;
/// Step halvings tried before giving up.
pub const MAX_HALVINGS: u32 = 10;
/// Endpoint change between successive halvings accepted as converged.
pub const ENDPOINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexState {
    pub q: Complex64,
    pub p: Complex64,
}

impl ComplexState {
    pub fn new(q: Complex64, p: Complex64) -> Self {
        ComplexState { q, p }
    }

    pub fn real(q: f64, p: f64) -> Self {
        ComplexState { q: Complex64::new(q, 0.0), p: Complex64::new(p, 0.0) }
    }

    pub fn energy(&self, potential: &Potential1D) -> Complex64 {
        0.5 * self.p * self.p + potential.v_c(self.q)
    }

    /// Euclidean norm in the doubled phase space (Re q, Im q, Re p, Im p).
    pub fn distance(&self, other: &ComplexState) -> f64 {
        ((self.q - other.q).norm_sqr() + (self.p - other.p).norm_sqr()).sqrt()
    }
}

impl std::ops::Neg for ComplexState {
    type Output = ComplexState;
    fn neg(self) -> ComplexState {
        ComplexState { q: -self.q, p: -self.p }
    }
}

/// Phase point together with the accumulated action and tangent map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flow {
    pub state: ComplexState,
    pub action: Complex64,
    pub tangent: Matrix2<Complex64>,
}

impl Flow {
    pub fn start(state: ComplexState) -> Flow {
        Flow { state, action: Complex64::new(0.0, 0.0), tangent: Matrix2::identity() }
    }
}

fn rate(potential: &Potential1D, y: &Flow) -> Flow {
    let (q, p) = (y.state.q, y.state.p);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let jac = Matrix2::new(zero, one, -potential.d2v_c(q), zero);
    Flow {
        state: ComplexState { q: p, p: -potential.dv_c(q) },
        // p dq/dt − H
        action: 0.5 * p * p - potential.v_c(q),
        tangent: jac * y.tangent,
    }
}

fn axpy(y: &Flow, k: &Flow, h: Complex64) -> Flow {
    Flow {
        state: ComplexState { q: y.state.q + h * k.state.q, p: y.state.p + h * k.state.p },
        action: y.action + h * k.action,
        tangent: y.tangent + k.tangent * h,
    }
}

/// One classical RK4 step of complex size `dt`.
pub fn rk4_step(potential: &Potential1D, y: &Flow, dt: Complex64) -> Flow {
    let k1 = rate(potential, y);
    let k2 = rate(potential, &axpy(y, &k1, 0.5 * dt));
    let k3 = rate(potential, &axpy(y, &k2, 0.5 * dt));
    let k4 = rate(potential, &axpy(y, &k3, dt));
    let sixth = dt / 6.0;
    Flow {
        state: ComplexState {
            q: y.state.q + sixth * (k1.state.q + 2.0 * k2.state.q + 2.0 * k3.state.q + k4.state.q),
            p: y.state.p + sixth * (k1.state.p + 2.0 * k2.state.p + 2.0 * k3.state.p + k4.state.p),
        },
        action: y.action + sixth * (k1.action + 2.0 * k2.action + 2.0 * k3.action + k4.action),
        tangent: y.tangent + (k1.tangent + k2.tangent * Complex64::new(2.0, 0.0) + k3.tangent * Complex64::new(2.0, 0.0) + k4.tangent) * sixth,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// Path parameter: accumulated |dt|.
    pub s: f64,
    pub t: Complex64,
    pub state: ComplexState,
    pub action: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Tangent map from the first to the last sample.
    pub tangent: Matrix2<Complex64>,
    pub initial_energy: Complex64,
    /// max |H − H₀| / max(1, |H₀|) over the samples.
    pub drift: f64,
    pub steps_per_segment: usize,
}

impl Trajectory {
    pub fn start(&self) -> ComplexState {
        self.samples[0].state
    }

    pub fn end(&self) -> ComplexState {
        self.samples.last().expect("trajectory has samples").state
    }

    pub fn total_time(&self) -> Complex64 {
        self.samples.last().map_or(Complex64::new(0.0, 0.0), |s| s.t)
    }

    /// Action accumulated alongside the flow.
    pub fn action(&self) -> Complex64 {
        self.samples.last().map_or(Complex64::new(0.0, 0.0), |s| s.action)
    }

    /// Action by trapezoid accumulation of p dq − H dt between samples.
    pub fn trapezoid_action(&self, potential: &Potential1D) -> Complex64 {
        self.samples
            .windows(2)
            .map(|w| {
                let (a, b) = (&w[0], &w[1]);
                let p = 0.5 * (a.state.p + b.state.p);
                let h = 0.5 * (a.state.energy(potential) + b.state.energy(potential));
                p * (b.state.q - a.state.q) - h * (b.t - a.t)
            })
            .sum()
    }

    pub fn determinant(&self) -> Complex64 {
        self.tangent.determinant()
    }

    pub(crate) fn measure_drift(&mut self, potential: &Potential1D) {
        let h0 = self.initial_energy;
        let scale = h0.norm().max(1.0);
        self.drift = self.samples.iter().map(|s| (s.state.energy(potential) - h0).norm()).fold(0.0, f64::max) / scale;
    }

    /// CSV rows (s, Re q, Im q, Re p, Im p, Re t, Im t) with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", TRAJECTORY_CSV_HEADER)?;
        for s in &self.samples {
            writeln!(
                out,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                s.s, s.state.q.re, s.state.q.im, s.state.p.re, s.state.p.im, s.t.re, s.t.im
            )?;
        }
        Ok(())
    }
}

pub const TRAJECTORY_CSV_HEADER: &str = "s,re_q,im_q,re_p,im_p,re_t,im_t";

fn run(potential: &Potential1D, state0: ComplexState, path: &ComplexTimePath, steps: usize) -> Trajectory {
    let mut y = Flow::start(state0);
    let mut t0 = Complex64::new(0.0, 0.0);
    let mut s = 0.0;
    let mut samples = vec![Sample { s, t: t0, state: state0, action: y.action }];
    for seg in &path.segments {
        let h = seg.duration / steps as f64;
        let dt = seg.direction.unit() * h;
        for k in 1..=steps {
            y = rk4_step(potential, &y, dt);
            s += h;
            samples.push(Sample { s, t: t0 + dt * k as f64, state: y.state, action: y.action });
        }
        t0 += seg.direction.unit() * seg.duration;
        samples.last_mut().expect("segment sample").t = t0;
    }
    let mut traj = Trajectory {
        samples,
        tangent: y.tangent,
        initial_energy: state0.energy(potential),
        drift: 0.0,
        steps_per_segment: steps,
    };
    traj.measure_drift(potential);
    traj
}

/// Fixed-step integration along `path`. The step is halved until the energy
/// drift is below `DRIFT_TOL` and the endpoint agrees with the half-step run
/// to `ENDPOINT_TOL`; the finer run is returned.
pub fn integrate_complex(
    potential: &Potential1D,
    state0: ComplexState,
    path: &ComplexTimePath,
    steps_per_segment: usize,
) -> Result<Trajectory> {
    if steps_per_segment == 0 {
        return Err(Error::Contract("steps_per_segment must be positive".into()));
    }
    if !(state0.q.re.is_finite() && state0.q.im.is_finite() && state0.p.re.is_finite() && state0.p.im.is_finite()) {
        return Err(Error::Contract("initial state is not finite".into()));
    }
    let mut coarse = run(potential, state0, path, steps_per_segment);
    let mut drift = coarse.drift;
    for halving in 1..=MAX_HALVINGS {
        let fine = run(potential, state0, path, steps_per_segment << halving);
        drift = fine.drift;
        let (a, b) = (coarse.end(), fine.end());
        let scale = 1.0 + b.q.norm() + b.p.norm();
        let change = a.distance(&b) + (coarse.action() - fine.action()).norm();
        if drift <= DRIFT_TOL && change <= ENDPOINT_TOL * scale {
            return Ok(fine);
        }
        coarse = fine;
    }
    Err(Error::IntegrationAccuracy { drift, halvings: MAX_HALVINGS })
}

/// Monodromy matrix of a real periodic orbit through `state` with period T.
pub fn monodromy(potential: &Potential1D, q: f64, p: f64, period: f64, steps: usize) -> Result<Matrix2<f64>> {
    let path = ComplexTimePath::staircase(period, 0.0)?;
    let traj = integrate_complex(potential, ComplexState::real(q, p), &path, steps)?;
    let m = traj.tangent;
    Ok(Matrix2::new(m[(0, 0)].re, m[(0, 1)].re, m[(1, 0)].re, m[(1, 1)].re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn harmonic_period_returns() {
        let w = 1.3;
        let pot = Potential1D::harmonic(w);
        let s0 = ComplexState::real(0.7, -0.2);
        let path = ComplexTimePath::staircase(2.0 * PI / w, 0.0).unwrap();
        let traj = integrate_complex(&pot, s0, &path, 400).unwrap();
        assert!(traj.end().distance(&s0) < 1e-9);
        assert!((traj.total_time() - 2.0 * PI / w).norm() < 1e-14);
        let m = monodromy(&pot, 0.7, -0.2, 2.0 * PI / w, 400).unwrap();
        assert!((m - Matrix2::identity()).abs().max() < 1e-9);
    }

    #[test]
    fn harmonic_imaginary_time_is_hyperbolic() {
        let pot = Potential1D::harmonic(1.0);
        let s0 = ComplexState::real(1.0, 0.0);
        let path = ComplexTimePath::staircase(0.0, 2.0).unwrap();
        let traj = integrate_complex(&pot, s0, &path, 400).unwrap();
        // q(t) = cos t with t = −iτ gives cosh τ
        assert!((traj.end().q - Complex64::new(2f64.cosh(), 0.0)).norm() < 1e-9);
        assert!(traj.drift < DRIFT_TOL);
    }

    #[test]
    fn harmonic_action_over_a_period() {
        let w = 2.0;
        let pot = Potential1D::harmonic(w);
        let s0 = ComplexState::real(0.5, 0.0);
        let e = s0.energy(&pot).re;
        let t = 2.0 * PI / w;
        let traj = integrate_complex(&pot, s0, &ComplexTimePath::staircase(t, 0.0).unwrap(), 1000).unwrap();
        let expected = 2.0 * PI * e / w - e * t;
        assert!((traj.action() - expected).norm() < 1e-10);
        let trap = (traj.trapezoid_action(&pot) - expected).norm();
        assert!(trap < 1e-5, "{trap}");
    }

    #[test]
    fn equilibrium_tangent_rotates() {
        let pot = Potential1D::quartic(1.0);
        let w = pot.harmonic_frequency(1.0).unwrap();
        let t = 0.37;
        let m = monodromy(&pot, 1.0, 0.0, t, 200).unwrap();
        let tr = m.trace();
        assert!((tr - 2.0 * (w * t).cos()).abs() < 1e-10);
        assert!((m.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_header() {
        let pot = Potential1D::harmonic(1.0);
        let traj =
            integrate_complex(&pot, ComplexState::real(1.0, 0.0), &ComplexTimePath::staircase(0.1, 0.1).unwrap(), 2)
                .unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("s,re_q,im_q,re_p,im_p,re_t,im_t\n"));
        assert_eq!(text.lines().count(), 2 + 2 * traj.steps_per_segment);
    }
}
