//! Run configuration: flag parsing helpers and the config-file overlay.

use std::fs;
use std::path::{Path, PathBuf};

use semitunnel::PotentialKind;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Uniform grid `start:stop:count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn single(x: f64) -> Grid {
        Grid { start: x, stop: x, count: 1 }
    }

    pub fn parse(s: &str) -> Result<Grid, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| CliError::Config(format!("bad number '{t}' in grid '{s}'")));
        let grid = match parts.as_slice() {
            [x] => Grid::single(num(x)?),
            [a, b, n] => Grid {
                start: num(a)?,
                stop: num(b)?,
                count: n.trim().parse().map_err(|_| CliError::Config(format!("bad count '{n}' in grid '{s}'")))?,
            },
            _ => return Err(CliError::Config(format!("grid '{s}' is not start:stop:count"))),
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.count == 0 {
            return Err(CliError::Config("empty grid".into()));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(CliError::Config("grid bounds must be finite".into()));
        }
        if self.stop < self.start || (self.count == 1 && self.stop != self.start) {
            return Err(CliError::Config(format!(
                "grid {}:{}:{} is not monotone increasing",
                self.start, self.stop, self.count
            )));
        }
        if self.count > 1 && self.stop == self.start {
            return Err(CliError::Config("grid with several points needs stop > start".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|k| if k + 1 == self.count { self.stop } else { self.start + h * k as f64 }).collect()
    }
}

/// Rectangular grid of complex times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TGrid {
    pub re: Grid,
    pub im: Grid,
}

impl TGrid {
    /// `re=start:stop:count,im=start:stop:count`
    pub fn parse(s: &str) -> Result<TGrid, CliError> {
        let (mut re, mut im) = (None, None);
        for part in s.split(',') {
            match part.split_once('=') {
                Some(("re", g)) => re = Some(Grid::parse(g)?),
                Some(("im", g)) => im = Some(Grid::parse(g)?),
                _ => return Err(CliError::Config(format!("T grid '{s}' is not re=a:b:n,im=c:d:m"))),
            }
        }
        match (re, im) {
            (Some(re), Some(im)) => Ok(TGrid { re, im }),
            _ => Err(CliError::Config(format!("T grid '{s}' needs both re= and im="))),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.re.validate()?;
        self.im.validate()?;
        if self.im.stop > 0.0 {
            return Err(CliError::Config("Im T must be non-positive".into()));
        }
        Ok(())
    }
}

pub fn parse_t(s: &str) -> Result<[f64; 2], CliError> {
    let bad = || CliError::Config(format!("T '{s}' is not re,im"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok([a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?])
}

/// `3`, `1-9` or `0,2,5`.
pub fn parse_levels(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Config(format!("levels '{s}' is not n, a-b or a list"));
    let mut out = Vec::new();
    for part in s.split(',') {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if b < a {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.trim().parse().map_err(|_| bad())?),
        }
    }
    Ok(out)
}

/// Orbit topology request for the `orbit` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitSpec {
    pub energy: f64,
    /// w_r and the second winding (w_c, or w_m for the triple well).
    pub windings: [u32; 2],
    pub eta: i32,
    /// Lateral windings placed before the crossing.
    pub r_before: u32,
}

/// Everything needed to rerun a command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub potential: PotentialKind,
    pub hbar_inverse: Grid,
    pub methods: Vec<String>,
    pub levels: Vec<usize>,
    pub t: Option<[f64; 2]>,
    pub t_grid: Option<TGrid>,
    pub out: PathBuf,
    pub strict: bool,
    pub tolerances: Tolerances,
    pub orbit: Option<OrbitSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Tolerances {
    /// Highest energy the exact spectrum must resolve.
    pub e_max: Option<f64>,
    /// Initial step of the orbit integrator.
    pub orbit_step: Option<f64>,
}

/// Partial config read from a file; present fields win over flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub potential: Option<PotentialKind>,
    pub hbar_inverse: Option<Grid>,
    pub methods: Option<Vec<String>>,
    pub levels: Option<Vec<usize>>,
    pub t: Option<[f64; 2]>,
    pub t_grid: Option<TGrid>,
    pub out: Option<PathBuf>,
    pub strict: Option<bool>,
    pub tolerances: Option<Tolerances>,
    pub orbit: Option<OrbitSpec>,
}

impl ConfigFile {
    /// Reads a config file or the `config` member of a previous manifest.
    pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let Some(inner) = value.get_mut("config") {
            value = inner.take();
        }
        serde_json::from_value(value).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn overlay(self, mut c: RunConfig) -> RunConfig {
        if let Some(v) = self.potential {
            c.potential = v;
        }
        if let Some(v) = self.hbar_inverse {
            c.hbar_inverse = v;
        }
        if let Some(v) = self.methods {
            c.methods = v;
        }
        if let Some(v) = self.levels {
            c.levels = v;
        }
        if self.t.is_some() {
            c.t = self.t;
        }
        if self.t_grid.is_some() {
            c.t_grid = self.t_grid;
        }
        if let Some(v) = self.out {
            c.out = v;
        }
        if let Some(v) = self.strict {
            c.strict = v;
        }
        if let Some(v) = self.tolerances {
            c.tolerances = v;
        }
        if self.orbit.is_some() {
            c.orbit = self.orbit;
        }
        c
    }
}

pub fn load_potential(path: &Path) -> Result<PotentialKind, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
