//! Fixtures shared by the kernel benchmarks.

use semitunnel::Potential1D;

pub const HBAR: f64 = 1.0 / 12.0;

pub fn double_well() -> Potential1D {
    Potential1D::quartic(1.0)
}

pub fn triple_well() -> Potential1D {
    Potential1D::triple_well(1.75, 0.5)
}

pub fn pendulum() -> Potential1D {
    Potential1D::pendulum(1.0)
}
