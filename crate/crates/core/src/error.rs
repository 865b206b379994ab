use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("q = {q} is not a well bottom (V'' = {curvature})")]
    NotAWell { q: f64, curvature: f64 },
    #[error("degenerate turning point at q = {q} for E = {energy} (critical value of V)")]
    DegenerateTurningPoint { q: f64, energy: f64 },
    #[error("basis {basis} is incompatible with the potential: {reason}")]
    IncompatibleBasis { basis: &'static str, reason: String },
    #[error("eigen-solver failed to converge on the {block} block")]
    SolverNonConvergence { block: &'static str },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no quantized level below the barrier (n = {n}, target action {target}, max action {max_action})")]
    AboveBarrier { n: usize, target: f64, max_action: f64 },
    #[error("quantized level falls below the separatrix (n = {n})")]
    BelowSeparatrix { n: usize },
    #[error("exact resonance: |sin| = {0:e} in the resonant limit formula")]
    ExactResonance(f64),
    #[error("no admissible winding pair matches R(T) = {0}")]
    EmptySum(f64),
    #[error("integration accuracy not reached: drift {drift:e} after {halvings} step halvings")]
    IntegrationAccuracy { drift: f64, halvings: u32 },
    #[error("topology error: {0}")]
    Topology(String),
    #[error("non-generic time: denominator of the equilibrium contribution vanishes")]
    NongenericTime,
    #[error("caustic: dT/dE vanishes")]
    Caustic,
    #[error("energy above the island: a = {0} <= 1")]
    EnergyAboveIsland(f64),
    #[error("quadrature did not converge (last change {0:e})")]
    Quadrature(f64),
    #[error("root finder failed: {0}")]
    Root(String),
}

pub type Result<T> = std::result::Result<T, Error>;
