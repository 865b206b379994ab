use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Trace,
    PowerTrick,
    Semiclassical,
    Asymptotic,
    ResonantSum,
    ResonantLimit,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Trace => "trace",
            Method::PowerTrick => "power-trick",
            Method::Semiclassical => "semiclassical",
            Method::Asymptotic => "asymptotic",
            Method::ResonantSum => "resonant-sum",
            Method::ResonantLimit => "resonant-limit",
        }
    }
}

/// Non-fatal conditions attached to an estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Warning {
    /// A third level sits close to the doublet, so the pairing is ambiguous.
    ResonanceAmbiguity { gap: f64, third_level_distance: f64 },
    /// Excited levels are not suppressed enough by Im T.
    ExcitedContamination { ratio: f64 },
    /// |T| Δ / 2ħ is not small.
    LargePhase { value: f64 },
    /// The power-trick map F sends another level below the target doublet.
    PowerTrickAmbiguity { level: usize },
    /// Edge amplitude of the retained eigenvectors exceeds the threshold.
    EdgeAmplitude { amplitude: f64 },
    /// The left barrier of an asymmetric island is not subdominant.
    LeftBarrierNotSubdominant { left: f64, right: f64 },
    Other { message: String },
}

impl Warning {
    pub fn code(&self) -> &'static str {
        match self {
            Warning::ResonanceAmbiguity { .. } => "resonance-ambiguity",
            Warning::ExcitedContamination { .. } => "excited-contamination",
            Warning::LargePhase { .. } => "large-phase",
            Warning::PowerTrickAmbiguity { .. } => "power-trick-ambiguity",
            Warning::EdgeAmplitude { .. } => "edge-amplitude",
            Warning::LeftBarrierNotSubdominant { .. } => "left-barrier",
            Warning::Other { .. } => "other",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// The complex (or signed) quantity whose modulus is `value`.
    pub raw: Option<[f64; 2]>,
    pub im_re_ratio: Option<f64>,
    pub plateau_flatness: Option<f64>,
    pub truncation_residual: Option<f64>,
    pub contamination: Option<f64>,
    /// Energy at which a semiclassical formula was evaluated.
    pub energy: Option<f64>,
    /// Secondary value (alternative printed form, reference value, ...).
    pub alternative: Option<f64>,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingEstimate {
    pub value: f64,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl SplittingEstimate {
    pub fn new(value: f64, method: Method) -> Self {
        SplittingEstimate { value, method, diagnostics: Diagnostics::default() }
    }

    pub fn from_complex(z: Complex64, method: Method) -> Self {
        let mut e = SplittingEstimate::new(z.norm(), method);
        e.diagnostics.raw = Some([z.re, z.im]);
        e.diagnostics.im_re_ratio = Some(if z.re == 0.0 { f64::INFINITY } else { (z.im / z.re).abs() });
        e
    }

    pub fn raw(&self) -> Option<Complex64> {
        self.diagnostics.raw.map(|[re, im]| Complex64::new(re, im))
    }

    pub fn has_warnings(&self) -> bool {
        !self.diagnostics.warnings.is_empty()
    }

    pub fn warn(&mut self, w: Warning) {
        self.diagnostics.warnings.push(w);
    }
}
