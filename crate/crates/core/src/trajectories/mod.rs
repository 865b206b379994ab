//! Complex-time classical dynamics and trace contributions of orbits.

pub mod contributions;
pub mod integrator;
pub mod orbits;
pub mod path;

pub use contributions::{
    double_well_orbit_sum, equilibrium_contribution, orbit_contribution, period_derivative, OrbitSumEstimate,
};
pub use integrator::{
    integrate_complex, monodromy, rk4_step, ComplexState, Flow, Sample, Trajectory, DRIFT_TOL, TRAJECTORY_CSV_HEADER,
};
pub use orbits::{
    build_real_q_orbit, composed_action, orbit_action, orbit_period, Family, Leg, OrbitOptions, OrbitTopology,
    RealQOrbit, Traversals, Windings,
};
pub use path::{ComplexTimePath, Direction, Segment};
