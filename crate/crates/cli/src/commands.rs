//! The four subcommands. Each builds its rows, possibly in parallel, and
//! hands them to [`crate::output::emit`] in grid order.

use std::f64::consts::FRAC_PI_2;

use clap::Args;
use num_complex::Complex64;
use photonet::circuits::{angles_from_coefficients, coefficients_from_angles, generate_w, WCoefficients};
use photonet::detection::{DetectorKind, DetectorModel};
use photonet::fock::Occupation;
use photonet::teleport::{
    averaged_fidelity_probability, critical_eta, critical_eta_bisection, critical_eta_closed_form, max_fidelity,
    EventSet, Network, ProtocolSimulator, TeleportParams, CLASSICAL_LIMIT,
};
use photonet::verification::{run_verification, VerifyConfig};
use photonet::witness::scan_all_pairs;
use photonet::bloch::BlochMethod;
use rayon::prelude::*;
use serde::Serialize;

use crate::output::emit;
use crate::{Common, Failure, WSource};

/// Coefficient vectors whose squared norm is this close to one are rescaled;
/// anything further off is treated as a typo.
const NORM_SLACK: f64 = 1e-6;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

/// Parses a real number. Angles are radians only, so anything that looks
/// like a degree suffix is refused instead of guessed.
fn parse_real(flag: &str, s: &str) -> Result<f64, Failure> {
    let t = s.trim();
    if t.ends_with("deg") || t.ends_with('°') || t.ends_with('d') {
        return Err(usage(format!("--{flag} {t}: angles and phases are given in radians only")));
    }
    let v: f64 = t.parse().map_err(|_| usage(format!("--{flag}: cannot parse {t:?} as a number")))?;
    if !v.is_finite() {
        return Err(usage(format!("--{flag}: {t} is not finite")));
    }
    Ok(v)
}

fn parse_list(flag: &str, items: &[String]) -> Result<Vec<f64>, Failure> {
    if items.is_empty() {
        return Err(usage(format!("--{flag} needs at least one value")));
    }
    items.iter().map(|s| parse_real(flag, s)).collect()
}

fn parse_eta(items: &[String]) -> Result<Vec<f64>, Failure> {
    let etas = parse_list("eta", items)?;
    for &e in &etas {
        if e == 0.0 {
            return Err(usage("--eta 0: detectors of zero efficiency never click, so nothing can be measured; use η in (0, 1]"));
        }
        if !(e > 0.0 && e <= 1.0) {
            return Err(usage(format!("--eta {e} outside (0, 1]")));
        }
    }
    Ok(etas)
}

fn parse_detector(s: &str) -> Result<DetectorKind, Failure> {
    s.parse().map_err(|e: photonet::Error| usage(e.to_string()))
}

fn w_from_source(source: &WSource, phases: Option<&[String]>) -> Result<WCoefficients, Failure> {
    let moduli: Vec<f64> = match (&source.symmetric, &source.coeffs) {
        (Some(n), None) => {
            if *n < 2 {
                return Err(usage(format!("--symmetric {n}: a W state needs at least 2 modes")));
            }
            vec![1.0 / (*n as f64).sqrt(); *n]
        }
        (None, Some(c)) => parse_list("coeffs", c)?,
        _ => return Err(usage("give exactly one of --symmetric or --coeffs")),
    };
    if moduli.len() < 2 {
        return Err(usage("a W state needs at least 2 coefficients"));
    }
    let phases = match phases {
        Some(p) => {
            let p = parse_list("phases", p)?;
            if p.len() != moduli.len() {
                return Err(usage(format!("--phases has {} values for {} modes", p.len(), moduli.len())));
            }
            p
        }
        None => vec![0.0; moduli.len()],
    };
    let norm: f64 = moduli.iter().map(|x| x * x).sum();
    if (norm - 1.0).abs() > NORM_SLACK {
        return Err(usage(format!("coefficients have squared norm {norm}, expected 1")));
    }
    let alphas = moduli.iter().zip(&phases).map(|(&r, &p)| Complex64::from_polar(r / norm.sqrt(), p)).collect();
    WCoefficients::new(alphas).map_err(|e| usage(e.to_string()))
}

#[derive(Serialize)]
struct WSourceConfig {
    symmetric: Option<usize>,
    coeffs: Option<Vec<String>>,
}

impl From<&WSource> for WSourceConfig {
    fn from(s: &WSource) -> Self {
        WSourceConfig { symmetric: s.symmetric, coeffs: s.coeffs.clone() }
    }
}

#[derive(Serialize)]
struct WstateConfig {
    command: &'static str,
    #[serde(flatten)]
    source: WSourceConfig,
    phases: Option<Vec<String>>,
}

#[derive(Serialize)]
struct WstateRow {
    mode: usize,
    alpha_re: f64,
    alpha_im: f64,
    alpha_abs: f64,
    theta: Option<f64>,
    phi: f64,
    sim_re: f64,
    sim_im: f64,
    round_trip_error: f64,
}

pub fn wstate(common: &Common, source: &WSource, phases: Option<&[String]>) -> Result<(), Failure> {
    let w = w_from_source(source, phases)?;
    let n = w.num_modes();
    let angles = angles_from_coefficients(&w);
    let psi = generate_w(&angles);
    let sim: Vec<_> = (0..n).map(|k| psi.amplitude(&Occupation::single(n, k))).collect();
    let err = sim
        .iter()
        .zip(w.alphas())
        .map(|(s, a)| (s - a).norm())
        .fold(coefficients_from_angles(&angles).max_distance(&w), f64::max);
    // `+ 0.0` turns negative zeros into plain zeros in the output.
    let rows: Vec<WstateRow> = (0..n)
        .map(|k| WstateRow {
            mode: k + 1,
            alpha_re: w.alphas()[k].re + 0.0,
            alpha_im: w.alphas()[k].im + 0.0,
            alpha_abs: w.alphas()[k].norm(),
            theta: angles.thetas().get(k).copied(),
            phi: angles.phis().map_or(0.0, |p| p[k] + 0.0),
            sim_re: sim[k].re + 0.0,
            sim_im: sim[k].im + 0.0,
            round_trip_error: err,
        })
        .collect();
    let config = WstateConfig { command: "wstate", source: source.into(), phases: phases.map(|p| p.to_vec()) };
    emit(common.output.as_deref(), common.format(), &config, &rows).map_err(Failure::Runtime)
}

#[derive(Serialize)]
struct WitnessConfig {
    command: &'static str,
    #[serde(flatten)]
    source: WSourceConfig,
    eta: Vec<f64>,
    detector: DetectorKind,
}

#[derive(Serialize)]
struct WitnessRow {
    row_type: &'static str,
    n: usize,
    eta: f64,
    detector: DetectorKind,
    i: Option<usize>,
    j: Option<usize>,
    p_ij: Option<f64>,
    lhs: Option<f64>,
    rhs: Option<f64>,
    ratio_closed: Option<f64>,
    ratio_sim: Option<f64>,
    violated: bool,
    note: Option<&'static str>,
}

pub fn witness_scan(common: &Common, source: &WSource, eta: &[String], detector: &str) -> Result<(), Failure> {
    let w = w_from_source(source, None)?;
    let etas = parse_eta(eta)?;
    let kind = parse_detector(detector)?;
    let mut rows = Vec::new();
    for &e in &etas {
        let report = scan_all_pairs(&w, DetectorModel::new(e).map_err(runtime)?, kind);
        for p in &report.pairs {
            rows.push(WitnessRow {
                row_type: "pair",
                n: report.n,
                eta: e,
                detector: kind,
                i: Some(p.pair.0 + 1),
                j: Some(p.pair.1 + 1),
                p_ij: Some(p.p_ij),
                lhs: Some(p.lhs),
                rhs: Some(p.rhs),
                ratio_closed: p.ratio_closed,
                ratio_sim: Some(p.ratio),
                violated: p.violated,
                note: p.note.map(|_| "zero-coefficient"),
            });
        }
        rows.push(WitnessRow {
            row_type: "summary",
            n: report.n,
            eta: e,
            detector: kind,
            i: None,
            j: None,
            p_ij: None,
            lhs: None,
            rhs: None,
            ratio_closed: None,
            ratio_sim: None,
            violated: report.all_violated,
            note: None,
        });
    }
    let config = WitnessConfig { command: "witness-scan", source: source.into(), eta: etas, detector: kind };
    emit(common.output.as_deref(), common.format(), &config, &rows).map_err(Failure::Runtime)
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct TeleportArgs {
    /// Network sizes.
    #[arg(long = "N", value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Cooperating parties; every valid value when omitted.
    #[arg(long = "m", value_delimiter = ',')]
    m: Option<Vec<usize>>,
    /// Detector efficiencies in (0, 1].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    eta: Option<Vec<String>>,
    /// Bell-splitter angles in radians, within [0, π/2].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Option<Vec<String>>,
    /// d10, d01 or both.
    #[arg(long, default_value = "d10")]
    events: String,
    #[arg(long, default_value = "number-resolving")]
    detector: String,
    /// Report the best angle instead of a fixed one.
    #[arg(long)]
    optimize: bool,
    /// Report the efficiency above which the fidelity beats 2/3.
    #[arg(long = "critical-eta", conflicts_with = "optimize")]
    critical_eta: bool,
}

#[derive(Serialize)]
struct TeleportConfig<'a> {
    command: &'static str,
    #[serde(flatten)]
    args: &'a TeleportArgs,
}

#[derive(Serialize)]
struct TeleportRow {
    n: usize,
    m: usize,
    eta: f64,
    theta: f64,
    detector: DetectorKind,
    events: EventSet,
    optimized: bool,
    fidelity: f64,
    probability: f64,
    r_theta: f64,
    r_prime_theta: f64,
    fidelity_sim: f64,
    probability_sim: f64,
    residual: f64,
    beats_classical: bool,
}

#[derive(Serialize)]
struct CriticalRow {
    n: usize,
    m: usize,
    detector: DetectorKind,
    critical_eta: f64,
    closed_form: Option<f64>,
    bisection: f64,
    residual: Option<f64>,
}

fn m_values(n: usize, given: Option<&[usize]>) -> Result<Vec<usize>, Failure> {
    if n < 2 {
        return Err(usage(format!("--N {n}: the network needs at least 2 parties")));
    }
    match given {
        None => Ok((0..=n - 2).collect()),
        Some(ms) => {
            if let Some(&bad) = ms.iter().find(|&&m| m + 2 > n) {
                return Err(usage(format!("--m {bad} exceeds N - 2 = {} for N = {n}", n - 2)));
            }
            Ok(ms.to_vec())
        }
    }
}

pub fn teleport(common: &Common, args: &TeleportArgs) -> Result<(), Failure> {
    let kind = parse_detector(&args.detector)?;
    let events: EventSet = args.events.parse().map_err(|e: photonet::Error| usage(e.to_string()))?;
    let config = TeleportConfig { command: "teleport", args };
    let mut nm = Vec::new();
    for &n in &args.n {
        for m in m_values(n, args.m.as_deref())? {
            nm.push((n, m));
        }
    }
    if args.critical_eta {
        let rows = nm
            .par_iter()
            .map(|&(n, m)| -> Result<CriticalRow, Failure> {
                let bisection = critical_eta_bisection(n, m, kind, 1e-12).map_err(runtime)?;
                Ok(match kind {
                    DetectorKind::NumberResolving => {
                        let closed = critical_eta_closed_form(n, m).map_err(runtime)?;
                        CriticalRow {
                            n,
                            m,
                            detector: kind,
                            critical_eta: closed,
                            closed_form: Some(closed),
                            bisection,
                            residual: Some((closed - bisection).abs()),
                        }
                    }
                    DetectorKind::OnOff => {
                        let value = critical_eta(n, m, kind).map_err(runtime)?;
                        CriticalRow { n, m, detector: kind, critical_eta: value, closed_form: None, bisection, residual: None }
                    }
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        return emit(common.output.as_deref(), common.format(), &config, &rows).map_err(Failure::Runtime);
    }

    let etas = parse_eta(args.eta.as_deref().ok_or_else(|| usage("--eta is required"))?)?;
    let thetas: Vec<Option<f64>> = if args.optimize {
        vec![None]
    } else {
        let list = parse_list("theta", args.theta.as_deref().ok_or_else(|| usage("--theta is required unless --optimize or --critical-eta is given"))?)?;
        if let Some(bad) = list.iter().find(|t| !(0.0..=FRAC_PI_2).contains(*t)) {
            return Err(usage(format!("--theta {bad} outside [0, π/2] (radians)")));
        }
        list.into_iter().map(Some).collect()
    };
    let mut grid = Vec::new();
    for &(n, m) in &nm {
        for &eta in &etas {
            for &theta in &thetas {
                grid.push((n, m, eta, theta));
            }
        }
    }
    let rows = grid
        .par_iter()
        .map(|&(n, m, eta, theta)| -> Result<TeleportRow, Failure> {
            let net = Network::new(n, m, eta, kind).map_err(|e| usage(e.to_string()))?;
            let theta = match theta {
                Some(t) => t,
                None => max_fidelity(&net, events).theta,
            };
            let params = TeleportParams::new(net, theta, events).map_err(|e| usage(e.to_string()))?;
            let closed = averaged_fidelity_probability(&params);
            let sim = ProtocolSimulator::new(net)
                .and_then(|s| s.average(params.theta, events, BlochMethod::DEFAULT_QUADRATURE))
                .map_err(runtime)?;
            Ok(TeleportRow {
                n,
                m,
                eta,
                theta: params.theta,
                detector: kind,
                events,
                optimized: args.optimize,
                fidelity: closed.avg_fidelity,
                probability: closed.avg_probability,
                r_theta: closed.r_theta,
                r_prime_theta: closed.r_prime_theta,
                fidelity_sim: sim.fidelity,
                probability_sim: sim.probability,
                residual: (sim.fidelity - closed.avg_fidelity).abs().max((sim.probability - closed.avg_probability).abs()),
                beats_classical: closed.avg_fidelity > CLASSICAL_LIMIT,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    emit(common.output.as_deref(), common.format(), &config, &rows).map_err(Failure::Runtime)
}

#[derive(Serialize)]
struct VerifyRow {
    id: &'static str,
    passed: bool,
    residual: f64,
    tolerance: f64,
    description: String,
}

pub fn verify(common: &Common, mc_samples: usize) -> Result<(), Failure> {
    if let Some(t) = common.tolerance {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(usage(format!("--tolerance {t} must be a non-negative number")));
        }
    }
    if mc_samples < 2 {
        return Err(usage("--mc-samples must be at least 2"));
    }
    let cfg = VerifyConfig { tolerance_override: common.tolerance, seed: common.seed, mc_samples };
    let report = run_verification(&cfg).map_err(runtime)?;
    let rows: Vec<VerifyRow> = report
        .claims
        .iter()
        .map(|c| VerifyRow {
            id: c.id,
            passed: c.passed,
            residual: c.residual,
            tolerance: c.tolerance,
            description: c.description.clone(),
        })
        .collect();
    #[derive(Serialize)]
    struct Config<'a> {
        command: &'static str,
        #[serde(flatten)]
        cfg: &'a VerifyConfig,
    }
    emit(common.output.as_deref(), common.format(), &Config { command: "verify", cfg: &cfg }, &rows)
        .map_err(Failure::Runtime)?;
    let failed: Vec<&str> = report.claims.iter().filter(|c| !c.passed).map(|c| c.id).collect();
    eprintln!("{}/{} claims passed", report.claims.len() - failed.len(), report.claims.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed.join(", ")))
    }
}
