//! Sliding the step of a one-step staircase for the half symmetric orbit of
//! the double well at T = 2T_r − iT_c/2.

use semitunnel::semiclassics::{primitive, OrbitKind};
use semitunnel::trajectories::{integrate_complex, ComplexState, ComplexTimePath, Direction, Segment, Trajectory};
use semitunnel::{Complex64, Potential1D};

const E: f64 = 0.2;

struct Setup {
    pot: Potential1D,
    t_r: f64,
    t_c: f64,
    q_r: f64,
}

fn setup() -> Setup {
    let pot = Potential1D::quartic(1.0);
    let t_r = primitive(&pot, OrbitKind::R, E).unwrap().period;
    let t_c = primitive(&pot, OrbitKind::C, E).unwrap().period;
    Setup { pot, t_r, t_c, q_r: (1.0 - E.sqrt()).sqrt() }
}

fn one_step(s: &Setup, tau: f64) -> ComplexTimePath {
    let mut path = ComplexTimePath::default();
    path.push(Direction::Real, tau).unwrap();
    path.push(Direction::ImaginaryDescending, 0.5 * s.t_c).unwrap();
    path.push(Direction::Real, 2.0 * s.t_r - tau).unwrap();
    path
}

/// The left-well state that reaches the inner turning point −q_r after real time τ,
/// found by running forward from the turning point and reversing p.
fn start_reaching_turning_point(s: &Setup, tau: f64) -> ComplexState {
    let path = ComplexTimePath::new(vec![Segment { direction: Direction::Real, duration: tau }]).unwrap();
    let end = integrate_complex(&s.pot, ComplexState::real(-s.q_r, 0.0), &path, 200).unwrap().end();
    ComplexState::new(end.q, -end.p)
}

fn max_im_q(t: &Trajectory) -> f64 {
    t.samples.iter().map(|x| x.state.q.im.abs()).fold(0.0, f64::max)
}

fn mirrored(a: ComplexState, b: ComplexState) -> f64 {
    a.distance(&ComplexState::new(-b.q, -b.p))
}

#[test]
fn orbit_through_the_turning_point_keeps_q_real_and_closes() {
    let s = setup();
    let tau = 0.3 * s.t_r;
    let start = start_reaching_turning_point(&s, tau);
    assert!(start.q.re < -s.q_r && start.energy(&s.pot).re - E < 1e-9);
    let traj = integrate_complex(&s.pot, start, &one_step(&s, tau), 200).unwrap();
    let t = traj.total_time();
    assert!((t - Complex64::new(2.0 * s.t_r, -0.5 * s.t_c)).norm() < 1e-12);
    assert!(max_im_q(&traj) < 1e-8, "Im q reached {}", max_im_q(&traj));
    assert!(mirrored(traj.end(), start) < 1e-8);
}

#[test]
fn sliding_the_step_pushes_the_same_start_off_the_real_section() {
    let s = setup();
    let tau = 0.3 * s.t_r;
    let start = start_reaching_turning_point(&s, tau);
    let traj = integrate_complex(&s.pot, start, &one_step(&s, tau + 0.05 * s.t_r), 200).unwrap();
    assert!(max_im_q(&traj) > 1e-3);
    // same complex orbit, same end point: only the section it visits changed
    assert!(mirrored(traj.end(), start) < 1e-8);
}

#[test]
fn a_new_start_restores_a_real_orbit_after_the_slide() {
    let s = setup();
    let (tau, slid) = (0.3 * s.t_r, 0.35 * s.t_r);
    let first = start_reaching_turning_point(&s, tau);
    let moved = start_reaching_turning_point(&s, slid);
    assert!(moved.q.re < first.q.re);
    let traj = integrate_complex(&s.pot, moved, &one_step(&s, slid), 200).unwrap();
    assert!(max_im_q(&traj) < 1e-8);
    assert!(mirrored(traj.end(), moved) < 1e-8);
}

#[test]
fn shifting_by_a_full_period_winds_once_in_the_left_well() {
    let s = setup();
    let tau = 0.3 * s.t_r;
    let start = start_reaching_turning_point(&s, tau);
    let traj = integrate_complex(&s.pot, start, &one_step(&s, tau + s.t_r), 200).unwrap();
    assert!(max_im_q(&traj) < 1e-8);
    assert!(mirrored(traj.end(), start) < 1e-8);
    // the crossing now happens after a full left loop
    let crossing = traj.samples.iter().find(|x| x.t.im < 0.0).unwrap();
    assert!(crossing.t.re > s.t_r);
    let left_before = traj.samples.iter().filter(|x| x.t.im == 0.0).all(|x| x.state.q.re < 0.0);
    assert!(left_before);
}
