//! Parity-resolved spectra and exact splittings.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::basis::{build_hamiltonian, grid_amplitudes, BasisKind, BasisSpec, ParityBlocks};
use crate::error::{Error, Result};
use crate::estimate::{Method, SplittingEstimate, Warning};
use crate::potentials::Potential1D;

/// Largest eigenvector amplitude allowed in the outer 5% of the box.
pub const EDGE_AMPLITUDE: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub energy: f64,
    pub parity: Parity,
    /// Index inside its parity block.
    pub index: usize,
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub basis: BasisSpec,
    pub even_energies: Vec<f64>,
    pub odd_energies: Vec<f64>,
    /// Columns are eigenvectors in the parity-block basis.
    pub even_vectors: DMatrix<f64>,
    pub odd_vectors: DMatrix<f64>,
    /// All levels, ascending.
    pub levels: Vec<Level>,
    /// Edge amplitude per even/odd level (0 for the circle).
    pub even_edge: Vec<f64>,
    pub odd_edge: Vec<f64>,
}

fn solve_block(m: DMatrix<f64>, block: &'static str) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((vec![], DMatrix::zeros(0, 0)));
    }
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 0).ok_or(Error::SolverNonConvergence { block })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    Ok((values, vectors))
}

fn edge_amplitudes(basis: &BasisSpec, vectors: &DMatrix<f64>, even: bool) -> Vec<f64> {
    match basis.kind {
        BasisKind::FourierModes { .. } => vec![0.0; vectors.ncols()],
        BasisKind::FourierGrid { points, .. } => {
            let c = points / 2;
            let band = (points / 40).max(1);
            (0..vectors.ncols())
                .map(|k| {
                    let col: Vec<f64> = vectors.column(k).iter().copied().collect();
                    let psi = grid_amplitudes(points, even, &col);
                    (0..band)
                        .flat_map(|j| [psi[j], psi[(2 * c - 1 - j) % points]])
                        .map(f64::abs)
                        .fold(0.0, f64::max)
                })
                .collect()
        }
    }
}

pub fn diagonalize(blocks: ParityBlocks) -> Result<SpectralDecomposition> {
    let basis = blocks.basis;
    let (even_energies, even_vectors) = solve_block(blocks.even, "even")?;
    let (odd_energies, odd_vectors) = solve_block(blocks.odd, "odd")?;
    let mut levels: Vec<Level> = even_energies
        .iter()
        .enumerate()
        .map(|(index, &energy)| Level { energy, parity: Parity::Even, index })
        .chain(odd_energies.iter().enumerate().map(|(index, &energy)| Level { energy, parity: Parity::Odd, index }))
        .collect();
    levels.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    let even_edge = edge_amplitudes(&basis, &even_vectors, true);
    let odd_edge = edge_amplitudes(&basis, &odd_vectors, false);
    Ok(SpectralDecomposition {
        basis,
        even_energies,
        odd_energies,
        even_vectors,
        odd_vectors,
        levels,
        even_edge,
        odd_edge,
    })
}

/// Builds and diagonalizes on `basis`.
pub fn spectrum(potential: &Potential1D, basis: &BasisSpec) -> Result<SpectralDecomposition> {
    diagonalize(build_hamiltonian(potential, basis)?)
}

/// Spectrum converged for all levels below `e_max`: starts from
/// [`BasisSpec::initial`] and doubles the resolution until those levels move by
/// less than 1e−13·max(1, |E|) in both blocks.
/// Largest relative level shift accepted between successive refinements.
/// Eigen-solver rounding grows with the dimension, so tighter values stall.
pub const CONVERGENCE_RTOL: f64 = 1e-11;

/// Largest basis dimension the dense solver is asked to handle.
pub const MAX_DIMENSION: usize = 8192;

fn checked(basis: BasisSpec) -> Result<BasisSpec> {
    if basis.dimension() > MAX_DIMENSION {
        return Err(Error::Domain(format!("basis dimension {} exceeds {MAX_DIMENSION}", basis.dimension())));
    }
    Ok(basis)
}

pub fn converged_spectrum(potential: &Potential1D, hbar: f64, e_max: f64) -> Result<SpectralDecomposition> {
    let mut basis = checked(BasisSpec::initial(potential, hbar, e_max)?)?;
    let mut prev = spectrum(potential, &basis)?;
    for _ in 0..3 {
        basis = checked(basis.refined())?;
        let cur = spectrum(potential, &basis)?;
        let moved = |a: &[f64], b: &[f64]| {
            a.iter().zip(b).filter(|(x, _)| **x <= e_max).all(|(x, y)| (x - y).abs() <= CONVERGENCE_RTOL * x.abs().max(1.0))
        };
        if moved(&prev.even_energies, &cur.even_energies) && moved(&prev.odd_energies, &cur.odd_energies) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::SolverNonConvergence { block: "basis refinement" })
}

impl SpectralDecomposition {
    pub fn hbar(&self) -> f64 {
        self.basis.hbar
    }

    pub fn energies(&self, parity: Parity) -> &[f64] {
        match parity {
            Parity::Even => &self.even_energies,
            Parity::Odd => &self.odd_energies,
        }
    }

    pub fn vectors(&self, parity: Parity) -> &DMatrix<f64> {
        match parity {
            Parity::Even => &self.even_vectors,
            Parity::Odd => &self.odd_vectors,
        }
    }

    pub fn edge(&self, level: &Level) -> f64 {
        match level.parity {
            Parity::Even => self.even_edge[level.index],
            Parity::Odd => self.odd_edge[level.index],
        }
    }

    /// Largest edge amplitude among levels below `e_max`.
    pub fn max_edge_amplitude(&self, e_max: f64) -> f64 {
        self.levels.iter().filter(|l| l.energy <= e_max).map(|l| self.edge(l)).fold(0.0, f64::max)
    }

    /// Odd level closest in energy to `energy`.
    fn nearest(&self, parity: Parity, energy: f64, skip: Option<usize>) -> Option<Level> {
        self.energies(parity)
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != skip)
            .min_by(|a, b| (a.1 - energy).abs().partial_cmp(&(b.1 - energy).abs()).unwrap())
            .map(|(index, &e)| Level { energy: e, parity, index })
    }

    /// Doublet n: the n-th even level and the odd level nearest to it.
    pub fn doublet(&self, n: usize) -> Result<(Level, Level)> {
        let e = *self
            .even_energies
            .get(n)
            .ok_or_else(|| Error::Contract(format!("even level {n} not in the truncated spectrum")))?;
        let plus = Level { energy: e, parity: Parity::Even, index: n };
        let minus = self.nearest(Parity::Odd, e, None).ok_or_else(|| Error::Contract("empty odd block".into()))?;
        Ok((plus, minus))
    }

    /// Doublet anchored on the level nearest `anchor`, paired with the nearest
    /// level of opposite parity.
    pub fn doublet_at(&self, anchor: f64) -> Result<(Level, Level)> {
        let first = *self
            .levels
            .iter()
            .min_by(|a, b| (a.energy - anchor).abs().partial_cmp(&(b.energy - anchor).abs()).unwrap())
            .ok_or_else(|| Error::Contract("empty spectrum".into()))?;
        let other = match first.parity {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        };
        let partner = self.nearest(other, first.energy, None).ok_or_else(|| Error::Contract("empty block".into()))?;
        Ok(if first.parity == Parity::Even { (first, partner) } else { (partner, first) })
    }

    /// |E⁻ − E⁺| of a pair with the signed difference kept in diagnostics.
    pub fn splitting_of(&self, plus: Level, minus: Level) -> SplittingEstimate {
        let signed = minus.energy - plus.energy;
        let mut est = SplittingEstimate::new(signed.abs(), Method::Exact);
        est.diagnostics.raw = Some([signed, 0.0]);
        est.diagnostics.energy = Some(0.5 * (plus.energy + minus.energy));
        let gap = signed.abs();
        let centre = 0.5 * (plus.energy + minus.energy);
        let third = self
            .levels
            .iter()
            .filter(|l| !(l.parity == plus.parity && l.index == plus.index))
            .filter(|l| !(l.parity == minus.parity && l.index == minus.index))
            .map(|l| (l.energy - centre).abs())
            .fold(f64::INFINITY, f64::min);
        if third < 3.0 * gap {
            est.warn(Warning::ResonanceAmbiguity { gap, third_level_distance: third });
        }
        let edge = self.edge(&plus).max(self.edge(&minus));
        if edge > EDGE_AMPLITUDE {
            est.warn(Warning::EdgeAmplitude { amplitude: edge });
        }
        est.diagnostics.truncation_residual = Some(edge);
        est
    }
}

pub fn exact_splitting(spec: &SpectralDecomposition, n: usize) -> Result<SplittingEstimate> {
    let (plus, minus) = spec.doublet(n)?;
    Ok(spec.splitting_of(plus, minus))
}

pub fn exact_splitting_at(spec: &SpectralDecomposition, anchor: f64) -> Result<SplittingEstimate> {
    let (plus, minus) = spec.doublet_at(anchor)?;
    Ok(spec.splitting_of(plus, minus))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_levels() {
        let w = 1.7;
        let p = Potential1D::harmonic(w);
        let spec = converged_spectrum(&p, 1.0, 12.0 * w).unwrap();
        for n in 0..=10 {
            let l = spec.levels[n];
            assert!((l.energy - (n as f64 + 0.5) * w).abs() < 1e-8, "{n}: {}", l.energy);
            assert_eq!(l.parity, if n % 2 == 0 { Parity::Even } else { Parity::Odd });
        }
        assert!(spec.max_edge_amplitude(10.0 * w) < EDGE_AMPLITUDE);
    }

    #[test]
    fn free_rotor_has_exact_doublets() {
        let p = Potential1D::pendulum(0.0);
        let spec = spectrum(&p, &BasisSpec::modes(20, 0.3)).unwrap();
        for n in 1..8 {
            let (plus, minus) = spec.doublet(n).unwrap();
            assert_eq!(minus.index, n - 1);
            assert_eq!(spec.splitting_of(plus, minus).value, 0.0);
        }
    }

    #[test]
    fn eigenvectors_orthonormal() {
        let p = Potential1D::quartic(1.0);
        let spec = spectrum(&p, &BasisSpec::grid(4.0, 128, 0.1)).unwrap();
        for v in [&spec.even_vectors, &spec.odd_vectors] {
            let g = v.transpose() * v;
            let dev = (g - DMatrix::identity(v.ncols(), v.ncols())).abs().max();
            assert!(dev < 1e-12);
        }
    }
}
