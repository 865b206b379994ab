//! Complex-time trace estimators of splittings.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::spectrum::{Level, Parity, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::estimate::{Method, SplittingEstimate, Warning};

/// Contamination above which an estimate is flagged.
pub const CONTAMINATION_WARN: f64 = 1e-2;
/// |T|Δ/2ħ above which the small-phase expansion is flagged.
pub const PHASE_WARN: f64 = 0.1;

/// e^z − 1 without cancellation for small |z|.
pub fn expm1_complex(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    Complex64::new(z.re.exp_m1() * c - 2.0 * half * half, z.re.exp() * s)
}

/// Operator Π = |Φ⟩⟨Φ| + Ŝ|Φ⟩⟨Φ|Ŝ built from Φ = (Φ₊ + Φ₋)/√2, i.e. the block
/// diagonal Φ₊Φ₊ᵀ ⊕ Φ₋Φ₋ᵀ.
#[derive(Debug, Clone)]
pub enum QuasiProjector {
    Identity,
    Doublet { n: usize, even: DVector<f64>, odd: DVector<f64> },
}

impl QuasiProjector {
    /// Quasi-mode from the exact eigenvectors of doublet n.
    pub fn exact(spec: &SpectralDecomposition, n: usize) -> Result<QuasiProjector> {
        let (plus, minus) = spec.doublet(n)?;
        Ok(QuasiProjector::Doublet {
            n,
            even: spec.even_vectors.column(plus.index).into_owned(),
            odd: spec.odd_vectors.column(minus.index).into_owned(),
        })
    }

    /// Quasi-mode from arbitrary block vectors (normalized here).
    pub fn from_vectors(n: usize, even: DVector<f64>, odd: DVector<f64>) -> Result<QuasiProjector> {
        let (ne, no) = (even.norm(), odd.norm());
        if ne == 0.0 || no == 0.0 {
            return Err(Error::Contract("quasi-mode components must be non-zero".into()));
        }
        Ok(QuasiProjector::Doublet { n, even: even / ne, odd: odd / no })
    }

    /// ⟨φ|Π|φ⟩ for an eigenvector φ of the given level.
    pub fn weight(&self, spec: &SpectralDecomposition, level: &Level) -> f64 {
        match self {
            QuasiProjector::Identity => 1.0,
            QuasiProjector::Doublet { even, odd, .. } => {
                let (v, phi) = match level.parity {
                    Parity::Even => (&spec.even_vectors, even),
                    Parity::Odd => (&spec.odd_vectors, odd),
                };
                v.column(level.index).dot(phi).powi(2)
            }
        }
    }

    /// (Π_even, Π_odd) in the parity-block basis.
    pub fn block_matrices(&self, spec: &SpectralDecomposition) -> (DMatrix<f64>, DMatrix<f64>) {
        match self {
            QuasiProjector::Identity => (
                DMatrix::identity(spec.even_energies.len(), spec.even_energies.len()),
                DMatrix::identity(spec.odd_energies.len(), spec.odd_energies.len()),
            ),
            QuasiProjector::Doublet { even, odd, .. } => (even * even.transpose(), odd * odd.transpose()),
        }
    }
}

/// One term e^{−iE T/ħ} relative to a reference energy.
struct Terms {
    /// (even level, odd level) pairs and unpaired levels, each with weights.
    pairs: Vec<(Level, Level)>,
    single: Vec<Level>,
}

fn pair_levels(spec: &SpectralDecomposition) -> Terms {
    let ne = spec.even_energies.len();
    let no = spec.odd_energies.len();
    let offset = match spec.basis.kind {
        super::basis::BasisKind::FourierModes { .. } => 1usize,
        super::basis::BasisKind::FourierGrid { .. } => 0,
    };
    let mut pairs = Vec::new();
    let mut single = Vec::new();
    let mut odd_used = vec![false; no];
    for i in 0..ne {
        let plus = Level { energy: spec.even_energies[i], parity: Parity::Even, index: i };
        if i >= offset && i - offset < no {
            let j = i - offset;
            odd_used[j] = true;
            pairs.push((plus, Level { energy: spec.odd_energies[j], parity: Parity::Odd, index: j }));
        } else {
            single.push(plus);
        }
    }
    for (j, used) in odd_used.iter().enumerate() {
        if !used {
            single.push(Level { energy: spec.odd_energies[j], parity: Parity::Odd, index: j });
        }
    }
    Terms { pairs, single }
}

/// Σ w e^{−i(E−E_s)T/ħ} and Σ w·parity·e^{…} with map E → F(E) applied first.
struct Sums {
    plain: Complex64,
    signed: Complex64,
    /// signed and plain contributions of the target pair
    target_signed: Complex64,
    target_plain: Complex64,
    /// largest plain/signed contribution outside the target pair
    other_plain: f64,
    other_signed: f64,
}

fn sums<F: Fn(f64) -> f64>(
    spec: &SpectralDecomposition,
    t: Complex64,
    projector: &QuasiProjector,
    map: F,
    target: Option<(Level, Level)>,
) -> Result<Sums> {
    if t.im > 0.0 {
        return Err(Error::Domain(format!("Im T = {} > 0: the propagator is unbounded", t.im)));
    }
    let hbar = spec.hbar();
    let terms = pair_levels(spec);
    // shift by the smallest mapped energy carrying weight
    let mut shift = f64::INFINITY;
    for l in &spec.levels {
        if projector.weight(spec, l) > 1e-300 {
            shift = shift.min(map(l.energy));
        }
    }
    if !shift.is_finite() {
        shift = 0.0;
    }
    let z = |e: f64| (Complex64::new(0.0, -(map(e) - shift)) * t / hbar).exp();
    let is_target = |l: &Level| target.map_or(false, |(a, b)| (l.parity, l.index) == (a.parity, a.index) || (l.parity, l.index) == (b.parity, b.index));
    let mut s = Sums {
        plain: Complex64::new(0.0, 0.0),
        signed: Complex64::new(0.0, 0.0),
        target_signed: Complex64::new(0.0, 0.0),
        target_plain: Complex64::new(0.0, 0.0),
        other_plain: 0.0,
        other_signed: 0.0,
    };
    let mut add = |plain: Complex64, signed: Complex64, target: bool| {
        s.plain += plain;
        s.signed += signed;
        if target {
            s.target_plain += plain;
            s.target_signed += signed;
        } else {
            s.other_plain = s.other_plain.max(plain.norm());
            s.other_signed = s.other_signed.max(signed.norm());
        }
    };
    for (plus, minus) in &terms.pairs {
        let (we, wo) = (projector.weight(spec, plus), projector.weight(spec, minus));
        if we == 0.0 && wo == 0.0 {
            continue;
        }
        let zo = z(minus.energy);
        let ze = z(plus.energy);
        // z₊ − z₋ = z₋·expm1(−i(F(E₊) − F(E₋))T/ħ)
        let arg = Complex64::new(0.0, -(map(plus.energy) - map(minus.energy))) * t / hbar;
        // expm1 only where the pair nearly cancels; elsewhere it may overflow against an underflowed z₋
        let diff = if arg.norm() < 1.0 { zo * expm1_complex(arg) } else { ze - zo };
        let signed = wo * diff + (we - wo) * ze;
        let plain = we * ze + wo * zo;
        let target_pair = is_target(plus) && is_target(minus);
        if target_pair {
            add(plain, signed, true);
        } else if is_target(plus) || is_target(minus) {
            // target levels paired differently: split the pair
            add(we * ze, we * ze, is_target(plus));
            add(wo * zo, -wo * zo, is_target(minus));
        } else {
            add(plain, signed, false);
        }
    }
    for l in &terms.single {
        let w = projector.weight(spec, l);
        if w == 0.0 {
            continue;
        }
        let zl = w * z(l.energy);
        add(zl, l.parity.sign() * zl, is_target(l));
    }
    Ok(s)
}

/// tr(Ŝ^{(1−η)/2} Π Û(T)) = Σ w·(parity)·e^{−iEₙT/ħ}.
pub fn trace_u(spec: &SpectralDecomposition, t: Complex64, eta: i32, projector: Option<&QuasiProjector>) -> Result<Complex64> {
    if eta != 1 && eta != -1 {
        return Err(Error::Contract(format!("η must be ±1, got {eta}")));
    }
    let p = projector.cloned().unwrap_or(QuasiProjector::Identity);
    let mut shift = f64::INFINITY;
    for l in &spec.levels {
        if p.weight(spec, l) > 1e-300 {
            shift = shift.min(l.energy);
        }
    }
    if !shift.is_finite() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let s = sums(spec, t, &p, |e| e, None)?;
    let back = (Complex64::new(0.0, -shift) * t / spec.hbar()).exp();
    Ok(back * if eta == 1 { s.plain } else { s.signed })
}

fn estimate(
    spec: &SpectralDecomposition,
    t: Complex64,
    projector: &QuasiProjector,
    map: impl Fn(f64) -> f64,
    target: (Level, Level),
    method: Method,
) -> Result<SplittingEstimate> {
    if t.norm() == 0.0 {
        return Err(Error::Domain("T = 0".into()));
    }
    let s = sums(spec, t, projector, &map, Some(target))?;
    let ratio = s.signed / s.plain;
    let value = Complex64::new(2.0 * spec.hbar(), 0.0) / (Complex64::new(0.0, 1.0) * t) * ratio;
    let mut est = SplittingEstimate::from_complex(value, method);
    let contamination = (s.other_plain / s.target_plain.norm()).max(s.other_signed / s.target_signed.norm());
    est.diagnostics.contamination = Some(contamination);
    if !(contamination < CONTAMINATION_WARN) {
        est.warn(Warning::ExcitedContamination { ratio: contamination });
    }
    let gap = (map(target.0.energy) - map(target.1.energy)).abs();
    let phase = t.norm() * gap / (2.0 * spec.hbar());
    if phase > PHASE_WARN {
        est.warn(Warning::LargePhase { value: phase });
    }
    est.diagnostics.energy = Some(0.5 * (target.0.energy + target.1.energy));
    est.diagnostics.alternative = Some((target.1.energy - target.0.energy).abs());
    Ok(est)
}

/// Δ₀(T) = (2ħ/iT) tr(ŜÛ)/tr(Û).
pub fn delta0_trace(spec: &SpectralDecomposition, t: Complex64) -> Result<SplittingEstimate> {
    let target = spec.doublet(0)?;
    estimate(spec, t, &QuasiProjector::Identity, |e| e, target, Method::Trace)
}

/// Δₙ(T) = (2ħ/iT) tr(ŜΠₙÛ)/tr(ΠₙÛ), by default with the exact-eigenvector quasi-mode.
pub fn deltan_trace(
    spec: &SpectralDecomposition,
    n: usize,
    t: Complex64,
    projector: Option<&QuasiProjector>,
) -> Result<SplittingEstimate> {
    let target = spec.doublet(n)?;
    let owned;
    let p = match projector {
        Some(p) => p,
        None => {
            owned = QuasiProjector::exact(spec, n)?;
            &owned
        }
    };
    estimate(spec, t, p, |e| e, target, Method::Trace)
}

/// Trace estimator for Ĥ′ = (Ĥ − E_ref)^{2N}, returning |Δ′|^{1/2N}.
pub fn deltan_power_trick(
    spec: &SpectralDecomposition,
    n: usize,
    e_ref: f64,
    power: u32,
    t: Complex64,
    projector: Option<&QuasiProjector>,
) -> Result<SplittingEstimate> {
    if power == 0 {
        return Err(Error::Contract("power trick needs N ≥ 1".into()));
    }
    let target = spec.doublet(n)?;
    let k = 2 * power as i32;
    let map = move |e: f64| (e - e_ref).powi(k);
    let p = projector.cloned().unwrap_or(QuasiProjector::Identity);
    let mut est = estimate(spec, t, &p, map, target, Method::PowerTrick)?;
    let raw = est.value;
    est.value = raw.powf(1.0 / k as f64);
    let top = map(target.0.energy).max(map(target.1.energy));
    for l in &spec.levels {
        let is_target = (l.parity, l.index) == (target.0.parity, target.0.index)
            || (l.parity, l.index) == (target.1.parity, target.1.index);
        if !is_target && map(l.energy) <= top {
            est.warn(Warning::PowerTrickAmbiguity { level: l.index });
        }
    }
    est.diagnostics.alternative = Some(raw);
    Ok(est)
}

/// Mean value and relative standard deviation of an estimator over a T set.
pub fn plateau<F: FnMut(Complex64) -> Result<SplittingEstimate>>(ts: &[Complex64], mut f: F) -> Result<(f64, f64)> {
    if ts.is_empty() {
        return Err(Error::Contract("empty T set".into()));
    }
    let values: Vec<f64> = ts.iter().map(|&t| f(t).map(|e| e.value)).collect::<Result<_>>()?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
    Ok((mean, var.sqrt() / mean))
}

/// Default diagnostic grid: Im T ∈ {−3k/ω}, Re T uniform in [0, 2T_r].
pub fn default_t_grid(omega: f64, t_r: f64, n_im: usize, n_re: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n_im * n_re);
    for k in 1..=n_im {
        for j in 0..n_re {
            let re = if n_re > 1 { 2.0 * t_r * j as f64 / (n_re - 1) as f64 } else { 0.0 };
            out.push(Complex64::new(re, -3.0 * k as f64 / omega));
        }
    }
    out
}

/// Whether the topology gives unpaired ground levels (circle: even level 0).
pub fn has_unpaired_ground(spec: &SpectralDecomposition) -> bool {
    matches!(spec.basis.kind, super::basis::BasisKind::FourierModes { .. })
}
