//! The four subcommands.

use std::fs;

use rayon::prelude::*;
use semitunnel::quantum::{
    converged_spectrum, delta0_trace, deltan_trace, exact_splitting, exact_splitting_at, mathieu_characteristics,
    Parity, SpectralDecomposition,
};
use semitunnel::quantum::traces::CONTAMINATION_WARN;
use semitunnel::roots::brent;
use semitunnel::semiclassics::{
    ebk_energy, escape_rate, lambda_subtraction, pendulum_splitting_asymptotic, resonant_splitting_k,
    resonant_splitting_limit, splitting_excited, splitting_ground_instanton, splitting_leading_order, Landscape, Well,
};
use semitunnel::trajectories::{
    build_real_q_orbit, composed_action, orbit_action, orbit_period, OrbitOptions, OrbitTopology,
};
use semitunnel::{Complex64, Error, Potential1D, PotentialKind, SplittingEstimate};
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{self, num, Conventions, Manifest, OutputFile};
use crate::CliError;

pub const METHODS: &[&str] = &[
    "exact",
    "instanton",
    "leading-order",
    "semiclassical",
    "asymptotic",
    "resonant-limit",
    "resonant-sum:<K>",
    "trace",
    "escape",
];

fn numerical(e: Error) -> CliError {
    match e {
        Error::Contract(_) | Error::Topology(_) => CliError::Config(e.to_string()),
        _ => CliError::Numerical(e.to_string()),
    }
}

/// Errors that only mean a grid point lies outside a formula's domain.
fn out_of_domain(e: &Error) -> Option<&'static str> {
    match e {
        Error::BelowSeparatrix { .. } => Some("below-separatrix"),
        Error::AboveBarrier { .. } => Some("above-barrier"),
        Error::ExactResonance(_) => Some("exact-resonance"),
        Error::EmptySum(_) => Some("empty-sum"),
        Error::EnergyAboveIsland(_) => Some("above-island"),
        Error::Domain(_) => Some("domain"),
        _ => None,
    }
}

fn e_max(cfg: &RunConfig, pot: &Potential1D) -> Result<f64, CliError> {
    if let Some(e) = cfg.tolerances.e_max {
        return Ok(e);
    }
    match Landscape::of(pot) {
        Ok(Landscape::Pendulum { gamma }) => Ok(3.0 * gamma),
        Ok(l @ (Landscape::DoubleWell { .. } | Landscape::TripleWell { .. })) => Ok(l.window().1),
        _ => Err(CliError::Config(format!("{} needs tolerances.e_max (--e-max)", pot.label()))),
    }
}

fn finish(cfg: &RunConfig, command: &str, outputs: Vec<OutputFile>, metrics: serde_json::Value, warnings: Vec<String>) -> Result<(), CliError> {
    let manifest = Manifest {
        schema_version: output::SCHEMA_VERSION,
        tool: "semitunnel".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        config: cfg.clone(),
        conventions: Conventions::default(),
        outputs,
        metrics,
        warnings: warnings.clone(),
    };
    output::write_manifest(&cfg.out, &manifest)?;
    if cfg.strict && !warnings.is_empty() {
        return Err(CliError::Strict(warnings.join("; ")));
    }
    Ok(())
}

fn prepare(cfg: &RunConfig) -> Result<Potential1D, CliError> {
    cfg.hbar_inverse.validate()?;
    if cfg.hbar_inverse.start <= 0.0 {
        return Err(CliError::Config("1/ħ must be positive".into()));
    }
    fs::create_dir_all(&cfg.out).map_err(|e| output::io(&cfg.out, e))?;
    Ok(Potential1D::new(cfg.potential.clone()))
}

fn warning_codes(e: &SplittingEstimate) -> Vec<String> {
    e.diagnostics.warnings.iter().map(|w| w.code().to_string()).collect()
}

pub fn spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let pot = prepare(cfg)?;
    let e_max = e_max(cfg, &pot)?;
    let points = cfg.hbar_inverse.points();
    let results: Vec<(f64, SpectralDecomposition)> = points
        .par_iter()
        .map(|&inv| converged_spectrum(&pot, 1.0 / inv, e_max).map(|s| (inv, s)).map_err(numerical))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    let mut doublets = Vec::new();
    let mut gaps = Vec::new();
    let mut warnings = Vec::new();
    for (inv, spec) in &results {
        for l in spec.levels.iter().filter(|l| l.energy <= e_max) {
            let parity = match l.parity {
                Parity::Even => "even",
                Parity::Odd => "odd",
            };
            rows.push(vec![num(*inv), l.index.to_string(), parity.to_string(), format!("{:.17e}", l.energy)]);
        }
        let mut per = Vec::new();
        for n in 0.. {
            let Ok((plus, minus)) = spec.doublet(n) else { break };
            if plus.energy.max(minus.energy) > e_max {
                break;
            }
            let est = spec.splitting_of(plus, minus);
            let codes = warning_codes(&est);
            for w in &codes {
                warnings.push(format!("1/ħ = {inv}, n = {n}: {w}"));
            }
            doublets.push(vec![
                num(*inv),
                n.to_string(),
                format!("{:.17e}", plus.energy),
                format!("{:.17e}", minus.energy),
                num(est.value),
                codes.join("|"),
            ]);
            per.push(json!({ "n": n, "gap": est.value }));
        }
        gaps.push(json!({ "hbar_inverse": inv, "doublets": per }));
    }
    let levels = output::write_csv(&cfg.out, "spectrum.csv", "spectrum", output::SPECTRUM_COLUMNS, &rows)?;
    let pairs = output::write_csv(&cfg.out, "doublets.csv", "spectrum", output::DOUBLET_COLUMNS, &doublets)?;
    finish(cfg, "spectrum", vec![levels, pairs], json!({ "e_max": e_max, "doublet_gaps": gaps }), warnings)
}

pub fn trace_grid(cfg: &RunConfig) -> Result<(), CliError> {
    let pot = prepare(cfg)?;
    let grid = cfg.t_grid.ok_or_else(|| CliError::Config("trace-grid needs --T-grid".into()))?;
    grid.validate()?;
    let e_max = e_max(cfg, &pot)?;
    let ts: Vec<Complex64> =
        grid.im.points().iter().rev().flat_map(|&im| grid.re.points().into_iter().map(move |re| Complex64::new(re, im))).collect();
    let mut rows = Vec::new();
    let mut metrics = Vec::new();
    let mut warnings = Vec::new();
    for inv in cfg.hbar_inverse.points() {
        let spec = converged_spectrum(&pot, 1.0 / inv, e_max).map_err(numerical)?;
        let exact = exact_splitting(&spec, 0).map_err(numerical)?.value;
        let values: Vec<Result<SplittingEstimate, Error>> =
            ts.par_iter().map(|&t| if t.norm() == 0.0 { Err(Error::Domain("T = 0".into())) } else { delta0_trace(&spec, t) }).collect();
        let mut admissible = Vec::new();
        for (t, v) in ts.iter().zip(values) {
            match v {
                Ok(est) => {
                    let z = est.raw().unwrap_or(Complex64::new(est.value, 0.0));
                    let codes = warning_codes(&est);
                    let contamination = est.diagnostics.contamination.unwrap_or(f64::NAN);
                    if codes.is_empty() && contamination < CONTAMINATION_WARN {
                        admissible.push(z.re);
                    }
                    let status = if codes.is_empty() { "ok".to_string() } else { codes.join("|") };
                    rows.push(vec![num(inv), num(t.re), num(t.im), num(z.re), num(z.im), num(contamination), status]);
                }
                Err(e) => match out_of_domain(&e) {
                    Some(code) => rows.push(vec![num(inv), num(t.re), num(t.im), String::new(), String::new(), String::new(), code.into()]),
                    None => return Err(numerical(e)),
                },
            }
        }
        let n = admissible.len() as f64;
        let (mean, flatness) = if admissible.is_empty() {
            warnings.push(format!("1/ħ = {inv}: no admissible T in the grid"));
            (f64::NAN, f64::NAN)
        } else {
            let mean = admissible.iter().sum::<f64>() / n;
            let var = admissible.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
            (mean, var.sqrt() / mean.abs())
        };
        if flatness >= 1e-2 {
            warnings.push(format!("1/ħ = {inv}: plateau flatness {flatness:e} ≥ 1e-2"));
        }
        metrics.push(json!({
            "hbar_inverse": inv,
            "exact_splitting": exact,
            "admissible_points": admissible.len(),
            "plateau_mean": mean,
            "plateau_flatness": flatness,
        }));
    }
    let out = output::write_csv(&cfg.out, "trace_grid.csv", "trace-grid", output::TRACE_GRID_COLUMNS, &rows)?;
    finish(cfg, "trace-grid", vec![out], json!({ "plateau": metrics }), warnings)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ScanMethod {
    Exact,
    Instanton,
    LeadingOrder,
    Semiclassical,
    Asymptotic,
    ResonantLimit,
    ResonantSum(u64),
    Trace,
    Escape,
}

impl ScanMethod {
    fn parse(s: &str) -> Result<ScanMethod, CliError> {
        Ok(match s {
            "exact" => ScanMethod::Exact,
            "instanton" => ScanMethod::Instanton,
            "leading-order" => ScanMethod::LeadingOrder,
            "semiclassical" => ScanMethod::Semiclassical,
            "asymptotic" => ScanMethod::Asymptotic,
            "resonant-limit" => ScanMethod::ResonantLimit,
            "trace" => ScanMethod::Trace,
            "escape" => ScanMethod::Escape,
            _ => match s.strip_prefix("resonant-sum:").map(str::parse::<u64>) {
                Some(Ok(k)) if k > 0 => ScanMethod::ResonantSum(k),
                _ => {
                    return Err(CliError::Config(format!("unknown method '{s}' (known: {})", METHODS.join(", "))));
                }
            },
        })
    }

    fn ground_only(self) -> bool {
        matches!(self, ScanMethod::Instanton | ScanMethod::LeadingOrder)
    }

    fn needs_spectrum(self) -> bool {
        matches!(self, ScanMethod::Exact | ScanMethod::Trace)
    }
}

fn gamma_of(pot: &Potential1D) -> Option<f64> {
    match pot.kind {
        PotentialKind::Pendulum { gamma } => Some(gamma),
        _ => None,
    }
}

/// ħ²/8 · (a₂ₙ, b₂ₙ) at g = 4γ/ħ².
fn pendulum_doublet(n: usize, gamma: f64, hbar: f64) -> semitunnel::Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Contract("the pendulum ground level is not a doublet".into()));
    }
    let m = mathieu_characteristics(4.0 * gamma / (hbar * hbar), n + 1)?;
    let s = hbar * hbar / 8.0;
    Ok((s * m.a[n], s * m.b[n - 1]))
}

/// 1/ħ at which E_n⁺ reaches the separatrix.
fn pendulum_cutoff(n: usize, gamma: f64) -> semitunnel::Result<f64> {
    let scale = 1.0 / gamma.sqrt();
    let f = |inv: f64| pendulum_doublet(n, gamma, 1.0 / inv).map(|d| d.0 - gamma).unwrap_or(f64::NAN);
    brent(f, 0.1 * scale, 2.0 * n as f64 * scale, 1e-10)
}

fn scan_point(
    pot: &Potential1D,
    method: ScanMethod,
    n: usize,
    inv: f64,
    spec: Option<&SpectralDecomposition>,
    t: Option<Complex64>,
) -> semitunnel::Result<SplittingEstimate> {
    let hbar = 1.0 / inv;
    match method {
        ScanMethod::Exact => match pot.kind {
            PotentialKind::Pendulum { gamma } => {
                let (plus, minus) = pendulum_doublet(n, gamma, hbar)?;
                let mut est = SplittingEstimate::new((plus - minus).abs(), semitunnel::Method::Exact);
                est.diagnostics.energy = Some(0.5 * (plus + minus));
                Ok(est)
            }
            PotentialKind::TripleWell { .. } => {
                let anchor = ebk_energy(pot, Well::Lateral, n, hbar)?;
                exact_splitting_at(spec.expect("spectrum"), anchor)
            }
            _ => exact_splitting(spec.expect("spectrum"), n),
        },
        ScanMethod::Instanton => splitting_ground_instanton(pot, hbar),
        ScanMethod::LeadingOrder => splitting_leading_order(pot, hbar),
        ScanMethod::Semiclassical => splitting_excited(pot, n, hbar),
        ScanMethod::Asymptotic => {
            let gamma = gamma_of(pot).ok_or_else(|| Error::Contract("the free-rotor limit needs the pendulum".into()))?;
            pendulum_splitting_asymptotic(n, gamma, hbar)
        }
        ScanMethod::ResonantLimit => resonant_splitting_limit(pot, n, hbar),
        ScanMethod::ResonantSum(k) => resonant_splitting_k(pot, n, hbar, k),
        ScanMethod::Trace => {
            let t = t.ok_or_else(|| Error::Contract("the trace method needs --T".into()))?;
            let spec = spec.expect("spectrum");
            if n == 0 {
                delta0_trace(spec, t)
            } else {
                deltan_trace(spec, n, t, None)
            }
        }
        ScanMethod::Escape => {
            let r = escape_rate(pot, n, hbar)?;
            let mut est = SplittingEstimate::new(r.rate, semitunnel::Method::Semiclassical);
            est.diagnostics.energy = Some(r.energy);
            est.diagnostics.warnings = r.warnings;
            Ok(est)
        }
    }
}

/// ln(value/exact) for the rows of one (ħ, n) block that has an exact row.
fn fill_ln_ratio(block: &mut [Vec<String>]) {
    let Some(exact) = block.iter().find(|r| r[2] == "exact").and_then(|r| r[4].parse::<f64>().ok()) else { return };
    for r in block.iter_mut() {
        if let Ok(ln) = r[4].parse::<f64>() {
            r[5] = num(ln - exact);
        }
    }
}

pub fn scan(cfg: &RunConfig) -> Result<(), CliError> {
    let pot = prepare(cfg)?;
    if cfg.methods.is_empty() || cfg.levels.is_empty() {
        return Err(CliError::Config("scan needs at least one method and one level".into()));
    }
    let methods: Vec<ScanMethod> = cfg.methods.iter().map(|m| ScanMethod::parse(m)).collect::<Result<_, _>>()?;
    let t = cfg.t.map(|[re, im]| Complex64::new(re, im));
    if methods.contains(&ScanMethod::Trace) && t.is_none() {
        return Err(CliError::Config("the trace method needs --T".into()));
    }
    let spectral = methods.iter().any(|m| m.needs_spectrum())
        && !(gamma_of(&pot).is_some() && !methods.contains(&ScanMethod::Trace));
    let e_max = if spectral { Some(e_max(cfg, &pot)?) } else { None };
    let double_well = matches!(Landscape::of(&pot), Ok(Landscape::DoubleWell { .. }));
    let cutoffs: Vec<(usize, f64)> = match gamma_of(&pot) {
        Some(gamma) => cfg
            .levels
            .iter()
            .filter(|&&n| n > 0)
            .map(|&n| pendulum_cutoff(n, gamma).map(|c| (n, c)).map_err(numerical))
            .collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    let blocks: Vec<(Vec<Vec<String>>, Vec<String>)> = cfg
        .hbar_inverse
        .points()
        .par_iter()
        .map(|&inv| -> Result<_, CliError> {
            let spec = match e_max {
                Some(e) => Some(converged_spectrum(&pot, 1.0 / inv, e).map_err(numerical)?),
                None => None,
            };
            let lambda = if double_well { num(lambda_subtraction(&pot, 1.0 / inv).map_err(numerical)?) } else { String::new() };
            let mut rows = Vec::new();
            let mut warnings = Vec::new();
            for &n in &cfg.levels {
                let start = rows.len();
                let beyond = cutoffs.iter().any(|&(m, c)| m == n && inv > c);
                for (&method, name) in methods.iter().zip(&cfg.methods) {
                    if method.ground_only() && n != 0 {
                        continue;
                    }
                    let mut row = vec![num(inv), n.to_string(), name.clone()];
                    match scan_point(&pot, method, n, inv, spec.as_ref(), t) {
                        Ok(est) => {
                            let codes = warning_codes(&est);
                            for c in &codes {
                                warnings.push(format!("1/ħ = {inv}, n = {n}, {name}: {c}"));
                            }
                            let status = if beyond { "beyond-cutoff" } else { "ok" };
                            row.extend([
                                num(est.value),
                                num(est.value.ln()),
                                String::new(),
                                lambda.clone(),
                                est.diagnostics.energy.map_or(String::new(), num),
                                status.to_string(),
                                codes.join("|"),
                            ]);
                        }
                        Err(e) => match out_of_domain(&e) {
                            Some(code) => row.extend([
                                String::new(),
                                String::new(),
                                String::new(),
                                lambda.clone(),
                                String::new(),
                                code.to_string(),
                                String::new(),
                            ]),
                            None => return Err(numerical(e)),
                        },
                    }
                    rows.push(row);
                }
                fill_ln_ratio(&mut rows[start..]);
            }
            Ok((rows, warnings))
        })
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for (r, w) in blocks {
        rows.extend(r);
        warnings.extend(w);
    }
    let out = output::write_csv(&cfg.out, "scan.csv", "scan", output::SCAN_COLUMNS, &rows)?;
    let cut: Vec<_> = cutoffs.iter().map(|&(n, c)| json!({ "n": n, "hbar_inverse_max": c })).collect();
    finish(cfg, "scan", vec![out], json!({ "e_max": e_max, "separatrix_cutoffs": cut }), warnings)
}

pub fn orbit(cfg: &RunConfig) -> Result<(), CliError> {
    let pot = prepare(cfg)?;
    let spec = cfg.orbit.clone().ok_or_else(|| CliError::Config("orbit needs --energy and --windings".into()))?;
    let [w1, w2] = spec.windings;
    let topo = match pot.kind {
        PotentialKind::QuarticDoubleWell { .. } => {
            OrbitTopology::double_well(&pot, spec.energy, w1, w2, spec.eta, spec.r_before)
        }
        PotentialKind::Pendulum { .. } => OrbitTopology::pendulum(&pot, spec.energy, w1, w2, spec.eta, spec.r_before),
        PotentialKind::TripleWell { .. } => {
            if spec.eta != -1 {
                return Err(CliError::Config("triple-well orbits are half symmetric orbits (η = −1)".into()));
            }
            OrbitTopology::triple_well(&pot, spec.energy, w1, w2, spec.r_before)
        }
        _ => return Err(CliError::Config(format!("no orbit family for {}", pot.label()))),
    }
    .map_err(numerical)?;
    let mut options = OrbitOptions::default();
    if let Some(step) = cfg.tolerances.orbit_step {
        options.step = step;
    }
    let orbit = build_real_q_orbit(&pot, &topo, &options).map_err(numerical)?;
    let path = cfg.out.join("trajectory.csv");
    let file = fs::File::create(&path).map_err(|e| output::io(&path, e))?;
    orbit.trajectory.write_csv(std::io::BufWriter::new(file)).map_err(|e| output::io(&path, e))?;
    let staircase = orbit.path.to_string();
    println!("{staircase}");
    let period = orbit_period(&topo, &pot).map_err(numerical)?;
    let action = orbit_action(&orbit);
    let composed = composed_action(&topo, &pot).map_err(numerical)?;
    let c = |z: Complex64| [z.re, z.im];
    let metrics = json!({
        "staircase": staircase,
        "sequence": topo.sequence,
        "mu": topo.mu,
        "total_time": c(orbit.total_time()),
        "composed_period": c(period),
        "action": c(action),
        "composed_action": c(composed),
        "closure_residual": orbit.closure_residual,
        "determinant": c(orbit.trajectory.determinant()),
        "energy_drift": orbit.trajectory.drift,
        "leg_times": orbit.leg_times.iter().map(|&z| c(z)).collect::<Vec<_>>(),
    });
    let mut warnings = Vec::new();
    if orbit.closure_residual > 1e-8 {
        warnings.push(format!("closure residual {:e}", orbit.closure_residual));
    }
    let out = OutputFile {
        file: "trajectory.csv".into(),
        schema: output::schema_name("orbit"),
        columns: output::ORBIT_COLUMNS.iter().map(|s| s.to_string()).collect(),
        rows: orbit.trajectory.samples.len(),
    };
    finish(cfg, "orbit", vec![out], metrics, warnings)
}

