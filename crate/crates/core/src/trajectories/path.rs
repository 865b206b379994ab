//! Staircase time paths in the complex t plane.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Real,
    /// Along −i.
    ImaginaryDescending,
}

impl Direction {
    /// dt per unit of path length.
    pub fn unit(self) -> Complex64 {
        match self {
            Direction::Real => Complex64::new(1.0, 0.0),
            Direction::ImaginaryDescending => Complex64::new(0.0, -1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub direction: Direction,
    pub duration: f64,
}

/// Ordered segments; Im t is non-increasing by construction.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexTimePath {
    pub segments: Vec<Segment>,
}

impl ComplexTimePath {
    pub fn new(segments: Vec<Segment>) -> Result<ComplexTimePath> {
        for s in &segments {
            if !(s.duration.is_finite() && s.duration > 0.0) {
                return Err(Error::Contract(format!("segment duration {} must be finite and positive", s.duration)));
            }
        }
        Ok(ComplexTimePath { segments })
    }

    /// One real step then one imaginary step (either may be skipped when zero).
    pub fn staircase(real: f64, imag: f64) -> Result<ComplexTimePath> {
        let mut path = ComplexTimePath::default();
        path.push(Direction::Real, real)?;
        path.push(Direction::ImaginaryDescending, imag)?;
        Ok(path)
    }

    /// Appends a segment, merging it with the last one when the direction repeats.
    /// Zero durations are ignored.
    pub fn push(&mut self, direction: Direction, duration: f64) -> Result<()> {
        if duration == 0.0 {
            return Ok(());
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::Contract(format!("segment duration {duration} must be finite and positive")));
        }
        match self.segments.last_mut() {
            Some(last) if last.direction == direction => last.duration += duration,
            _ => self.segments.push(Segment { direction, duration }),
        }
        Ok(())
    }

    pub fn total(&self) -> Complex64 {
        self.segments.iter().map(|s| s.direction.unit() * s.duration).sum()
    }

    /// Number of imaginary steps.
    pub fn steps(&self) -> usize {
        self.segments.iter().filter(|s| s.direction == Direction::ImaginaryDescending).count()
    }
}

impl fmt::Display for ComplexTimePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .segments
            .iter()
            .map(|s| match s.direction {
                Direction::Real => format!("+{:.12}", s.duration),
                Direction::ImaginaryDescending => format!("-{:.12}i", s.duration),
            })
            .collect();
        write!(f, "[{}]", parts.join(" "))
    }
}
