//! Named cross-checks between the closed forms and the simulator, each
//! reduced to a residual and a tolerance.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bloch::{BlochMethod, UnknownQubit};
use crate::circuits::{angles_from_coefficients, coefficients_from_angles, generate_w, symmetric_angles, WCoefficients};
use crate::detection::{lossy_moments, lossy_moments_ancilla, DetectorKind, DetectorModel};
use crate::error::Result;
use crate::fock::Occupation;
use crate::teleport::{
    averaged_fidelity_probability, bell_events, bob_state, conditional_resource, critical_eta,
    critical_eta_bisection, critical_eta_closed_form, max_fidelity, optimal_theta_closed_form, BellEvent, EventSet,
    Network, ProtocolSimulator, TeleportParams, CLASSICAL_LIMIT,
};
use crate::witness::{reduced_pair, scan_all_pairs, witness_ratio_closed_form, witness_ratio_simulated};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim {
    pub id: &'static str,
    pub description: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    /// Replaces every claim's own tolerance.
    pub tolerance_override: Option<f64>,
    pub seed: u64,
    pub mc_samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { tolerance_override: None, seed: 42, mc_samples: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub claims: Vec<Claim>,
    pub all_passed: bool,
}

/// Efficiency grid shared by the exhaustive checks.
pub const ETA_GRID: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

/// Angle grid and Bob phase grid for the non-advantageous events.
pub const NON_ADVANTAGEOUS_THETAS: usize = 1000;
pub const NON_ADVANTAGEOUS_PHASES: usize = 64;

struct Ctx {
    rng: ChaCha8Rng,
    cfg: VerifyConfig,
    claims: Vec<Claim>,
}

impl Ctx {
    fn push(&mut self, id: &'static str, description: String, residual: f64, tolerance: f64) {
        let tolerance = self.cfg.tolerance_override.unwrap_or(tolerance);
        let passed = residual.is_finite() && residual <= tolerance;
        self.claims.push(Claim { id, description, residual, tolerance, passed });
    }

    fn eta(&mut self) -> f64 {
        1.0 - self.rng.random::<f64>()
    }

    fn complex(&mut self, modulus: f64) -> Complex64 {
        Complex64::from_polar(modulus, 2.0 * PI * self.rng.random::<f64>())
    }

    fn random_w(&mut self, n: usize) -> Result<WCoefficients> {
        let raw: Vec<Complex64> = (0..n)
            .map(|_| {
                let r = self.rng.random::<f64>() + 0.05;
                self.complex(r)
            })
            .collect();
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        WCoefficients::new(raw.into_iter().map(|z| z / norm).collect())
    }

    fn random_network(&mut self, max_n: usize) -> Result<Network> {
        let n = self.rng.random_range(2..=max_n);
        let m = self.rng.random_range(0..=n - 2);
        let kind = if self.rng.random::<bool>() { DetectorKind::OnOff } else { DetectorKind::NumberResolving };
        let eta = self.eta();
        Network::new(n, m, eta, kind)
    }
}

fn symmetric_w(ctx: &mut Ctx) -> Result<()> {
    let mut worst: f64 = 0.0;
    for n in 2..=8 {
        let psi = generate_w(&symmetric_angles(n)?);
        for k in 0..n {
            let a = psi.amplitude(&Occupation::single(n, k));
            worst = worst.max((a - Complex64::new(1.0 / (n as f64).sqrt(), 0.0)).norm());
        }
        worst = worst.max((psi.norm_sqr() - 1.0).abs());
    }
    ctx.push("w-symmetric", "splitter chain gives amplitudes 1/√N for N = 2..8".into(), worst, 1e-12);
    Ok(())
}

fn w_round_trip(ctx: &mut Ctx) -> Result<()> {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = ctx.rng.random_range(2..=8);
        let w = ctx.random_w(n)?;
        let angles = angles_from_coefficients(&w);
        worst = worst.max(coefficients_from_angles(&angles).max_distance(&w));
        let psi = generate_w(&angles);
        for k in 0..n {
            worst = worst.max((psi.amplitude(&Occupation::single(n, k)) - w.alphas()[k]).norm());
        }
    }
    ctx.push("w-round-trip", "coefficients → angles → circuit reproduces 200 random W states".into(), worst, 1e-12);
    Ok(())
}

fn witness_checks(ctx: &mut Ctx) -> Result<()> {
    let (mut worst, mut not_violated, mut loss_model): (f64, usize, f64) = (0.0, 0, 0.0);
    for _ in 0..1000 {
        let p = ctx.rng.random::<f64>() * 0.98 + 0.01;
        let share = ctx.rng.random::<f64>() * 0.98 + 0.01;
        let ai = ctx.complex((p * share).sqrt());
        let aj = ctx.complex((p * (1.0 - share)).sqrt());
        let rest = Complex64::new((1.0 - ai.norm_sqr() - aj.norm_sqr()).max(0.0).sqrt(), 0.0);
        let w = WCoefficients::new(vec![ai, aj, rest])?;
        let det = DetectorModel::new(ctx.eta())?;
        let rho2 = reduced_pair(&w, 0, 1)?;
        let sim = witness_ratio_simulated(&rho2, det)?.ratio;
        let closed = witness_ratio_closed_form(ai, aj, det);
        worst = worst.max((sim - closed).abs());
        if !(sim < 1.0) {
            not_violated += 1;
        }
        let a = lossy_moments(&rho2, det)?;
        let b = lossy_moments_ancilla(&rho2, det)?;
        loss_model = loss_model
            .max((a.var_jx - b.var_jx).abs())
            .max((a.var_jy - b.var_jy).abs())
            .max((a.n_plus - b.n_plus).abs());
    }
    ctx.push("witness-closed-form", "interferometer simulation matches the closed-form ratio (1000 samples)".into(), worst, 1e-10);
    ctx.push(
        "witness-violation",
        "pairs with nonzero coefficients and η > 0 always give a ratio below 1 (count of exceptions)".into(),
        not_violated as f64,
        0.0,
    );
    ctx.push("witness-loss-model", "η² variance scaling agrees with explicit loss splitters".into(), loss_model, 1e-12);

    let w = WCoefficients::symmetric(3)?;
    let r = witness_ratio_simulated(&reduced_pair(&w, 0, 1)?, DetectorModel::ideal())?.ratio;
    ctx.push("witness-n3-ideal", "symmetric N = 3 pair at η = 1 has ratio 11/15".into(), (r - 11.0 / 15.0).abs(), 1e-12);

    let mut diff: f64 = 0.0;
    let mut states = vec![WCoefficients::symmetric(3)?, WCoefficients::symmetric(5)?];
    states.push(ctx.random_w(4)?);
    for w in &states {
        for eta in ETA_GRID {
            let det = DetectorModel::new(eta)?;
            let a = scan_all_pairs(w, det, DetectorKind::NumberResolving);
            let b = scan_all_pairs(w, det, DetectorKind::OnOff);
            for (x, y) in a.pairs.iter().zip(&b.pairs) {
                diff = diff.max((x.ratio - y.ratio).abs()).max((x.lhs - y.lhs).abs());
            }
            if a.all_violated != b.all_violated {
                diff = f64::INFINITY;
            }
        }
    }
    ctx.push("witness-onoff", "pair scan is identical with on-off detectors".into(), diff, 1e-12);
    Ok(())
}

fn resource(ctx: &mut Ctx) -> Result<()> {
    let mut worst: f64 = 0.0;
    for n in 2..=8 {
        for m in 0..=n - 2 {
            for eta in ETA_GRID {
                let net = Network::new(n, m, eta, DetectorKind::NumberResolving)?;
                let sim = ProtocolSimulator::new(net)?;
                worst = worst.max((sim.resource().matrix() - conditional_resource(&net).matrix()).norm());
            }
        }
    }
    ctx.push("resource", "conditioned W state is (2/N)|Ψ+><Ψ+| + ((N-ηm-2)/N)|00><00|".into(), worst, 1e-12);
    Ok(())
}

fn bob_states(ctx: &mut Ctx) -> Result<()> {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let net = ctx.random_network(8)?;
        let theta = FRAC_PI_2 * ctx.rng.random::<f64>();
        let q = UnknownQubit::from_bloch(PI * ctx.rng.random::<f64>(), 2.0 * PI * ctx.rng.random::<f64>());
        let params = TeleportParams::new(net, theta, EventSet::Both)?;
        let sim = ProtocolSimulator::new(net)?;
        for e in [BellEvent::D10, BellEvent::D01] {
            let a = sim.bob_state(&q, theta, e, crate::teleport::sim::bob_phase(e, theta))?;
            let b = bob_state(e, &q, &params)?;
            worst = worst.max((a.matrix() - b.matrix()).norm());
        }
    }
    ctx.push("bob-state", "simulated Bob states match the closed form (200 samples)".into(), worst, 1e-11);
    Ok(())
}

fn averages(ctx: &mut Ctx) -> Result<()> {
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let net = ctx.random_network(8)?;
        let theta = FRAC_PI_2 * ctx.rng.random::<f64>();
        let events = [EventSet::D10, EventSet::D01, EventSet::Both][ctx.rng.random_range(0..3)];
        let closed = averaged_fidelity_probability(&TeleportParams::new(net, theta, events)?);
        let sim = ProtocolSimulator::new(net)?.average(theta, events, BlochMethod::DEFAULT_QUADRATURE)?;
        worst = worst
            .max((sim.fidelity - closed.avg_fidelity).abs())
            .max((sim.probability - closed.avg_probability).abs());
    }
    ctx.push(
        "teleport-averages",
        "Bloch-averaged simulation matches the closed-form fidelity and probability (200 samples)".into(),
        worst,
        1e-8,
    );

    let net = Network::new(4, 1, 0.7, DetectorKind::NumberResolving)?;
    let closed = averaged_fidelity_probability(&TeleportParams::new(net, 0.6, EventSet::D10)?);
    let mc = ProtocolSimulator::new(net)?.average(
        0.6,
        EventSet::D10,
        BlochMethod::MonteCarlo { samples: ctx.cfg.mc_samples, seed: ctx.cfg.seed },
    )?;
    ctx.push(
        "teleport-monte-carlo",
        format!(
            "Monte Carlo average over {} qubits within 5 standard errors ({:.3e})",
            ctx.cfg.mc_samples, mc.fidelity_std_error
        ),
        (mc.fidelity - closed.avg_fidelity).abs(),
        5.0 * mc.fidelity_std_error,
    );
    Ok(())
}

fn optimum(ctx: &mut Ctx) -> Result<()> {
    let (mut angle, mut value): (f64, f64) = (0.0, 0.0);
    for n in 2..=8 {
        for m in 0..=n - 2 {
            for eta in ETA_GRID {
                let net = Network::new(n, m, eta, DetectorKind::NumberResolving)?;
                let closed = max_fidelity(&net, EventSet::D10);
                let numeric = crate::numeric::maximize(
                    |t| averaged_fidelity_probability(&TeleportParams::new(net, t, EventSet::D10).unwrap()).avg_fidelity,
                    0.0,
                    FRAC_PI_2,
                    257,
                    1e-10,
                );
                angle = angle.max((numeric.0 - optimal_theta_closed_form(&net, EventSet::D10)).abs());
                let sim = ProtocolSimulator::new(net)?.average(closed.theta, EventSet::D10, BlochMethod::DEFAULT_QUADRATURE)?;
                value = value
                    .max((sim.fidelity - closed.fidelity).abs())
                    .max((sim.probability - closed.probability).abs());
            }
        }
    }
    ctx.push("optimal-angle", "closed-form optimal angle matches numeric maximization".into(), angle, 1e-8);
    ctx.push("max-fidelity", "closed-form maximum fidelity and probability match simulation".into(), value, 1e-8);

    let net = Network::new(2, 0, 1.0, DetectorKind::NumberResolving)?;
    let r = ProtocolSimulator::new(net)?.average(std::f64::consts::FRAC_PI_4, EventSet::Both, BlochMethod::DEFAULT_QUADRATURE)?;
    ctx.push(
        "epr-ideal",
        "N = 2, η = 1, both events at θ = π/4 give fidelity 1 and probability 1/2".into(),
        (r.fidelity - 1.0).abs().max((r.probability - 0.5).abs()),
        1e-12,
    );
    Ok(())
}

fn critical(ctx: &mut Ctx) -> Result<()> {
    let c30 = critical_eta_closed_form(3, 0)?;
    let c31 = critical_eta_closed_form(3, 1)?;
    let b30 = critical_eta_bisection(3, 0, DetectorKind::NumberResolving, 1e-12)?;
    let b31 = critical_eta_bisection(3, 1, DetectorKind::NumberResolving, 1e-12)?;
    let res = [
        (c30 - (3.0 - 5f64.sqrt()) / 2.0).abs(),
        (c31 - (2.0 - 2f64.sqrt()) / 2.0).abs(),
        (b30 - c30).abs(),
        (b31 - c31).abs(),
    ];
    ctx.push(
        "critical-eta-n3",
        format!("η^c(3,0) = {c30:.10}, η^c(3,1) = {c31:.10}, closed form and bisection agree"),
        res.into_iter().fold(0.0, f64::max),
        1e-9,
    );

    let mut worst: f64 = 0.0;
    for n in 3..=12usize {
        let nf = n as f64;
        let top = critical_eta_closed_form(n, n - 2)?;
        worst = worst.max((top - (1.0 - 1.0 / (nf - 1.0).sqrt())).abs());
        let next = critical_eta_closed_form(n, n - 3)?;
        worst = worst.max((next - (2.0 * nf - 3.0 - (4.0 * nf - 7.0).sqrt()) / (2.0 * nf - 4.0)).abs());
    }
    ctx.push("critical-eta-families", "m = N-2 and m = N-3 families for N = 3..12".into(), worst, 1e-12);

    let p30 = critical_eta(3, 0, DetectorKind::OnOff)?;
    let p31 = critical_eta(3, 1, DetectorKind::OnOff)?;
    ctx.push(
        "critical-eta-onoff",
        format!("on-off η'(3,0) = {p30:.10} vs 0.583, η'(3,1) = {p31:.10} vs 0.435"),
        (p30 - 0.583).abs().max((p31 - 0.435).abs()),
        5e-3,
    );
    Ok(())
}

fn non_advantageous(ctx: &mut Ctx) -> Result<()> {
    let events: Vec<BellEvent> = bell_events().into_iter().filter(|e| !e.is_advantageous()).collect();
    let mut best: f64 = f64::NEG_INFINITY;
    for n in 2..=5 {
        for m in 0..=n - 2 {
            for eta in ETA_GRID {
                let sim = ProtocolSimulator::new(Network::new(n, m, eta, DetectorKind::NumberResolving)?)?;
                for o in sim.best_fidelity_per_event(&events, NON_ADVANTAGEOUS_THETAS, NON_ADVANTAGEOUS_PHASES)? {
                    best = best.max(o.fidelity);
                }
            }
        }
    }
    ctx.push(
        "non-advantageous",
        format!("D00, D20, D11, D02 never beat 2/3 (best {best:.6}); residual is the excess"),
        (best - CLASSICAL_LIMIT).max(0.0),
        1e-9,
    );
    Ok(())
}

fn orderings(ctx: &mut Ctx) -> Result<()> {
    let mut violations = 0usize;
    for n in 2..=12 {
        for m in 0..=n - 2 {
            for k in 1..=20 {
                let eta = k as f64 / 20.0;
                let net = Network::new(n, m, eta, DetectorKind::NumberResolving)?;
                let single = max_fidelity(&net, EventSet::D10).fidelity;
                if max_fidelity(&net, EventSet::Both).fidelity > single + 1e-15 {
                    violations += 1;
                }
                if m + 3 <= n {
                    let more = Network::new(n, m + 1, eta, DetectorKind::NumberResolving)?;
                    if max_fidelity(&more, EventSet::D10).fidelity <= single {
                        violations += 1;
                    }
                }
                for j in 1..10 {
                    let theta = FRAC_PI_2 * j as f64 / 10.0;
                    let nr = averaged_fidelity_probability(&TeleportParams::new(net, theta, EventSet::D10)?);
                    let on = averaged_fidelity_probability(&TeleportParams::new(
                        net.with_detector(DetectorKind::OnOff),
                        theta,
                        EventSet::D10,
                    )?);
                    if on.avg_fidelity >= nr.avg_fidelity {
                        violations += 1;
                    }
                }
            }
            if n >= 3 {
                let c = critical_eta_closed_form(n, m)?;
                if m + 3 <= n && critical_eta_closed_form(n, m + 1)? >= c {
                    violations += 1;
                }
                if critical_eta_closed_form(n + 1, m)? <= c {
                    violations += 1;
                }
            }
        }
    }
    ctx.push(
        "orderings",
        "both-event ≤ single-event fidelity, strict growth in m, on-off penalty, η^c monotone (violations)".into(),
        violations as f64,
        0.0,
    );
    Ok(())
}

/// Runs every claim. The output depends only on `cfg`.
pub fn run_verification(cfg: &VerifyConfig) -> Result<VerificationReport> {
    let mut ctx = Ctx { rng: ChaCha8Rng::seed_from_u64(cfg.seed), cfg: cfg.clone(), claims: Vec::new() };
    symmetric_w(&mut ctx)?;
    w_round_trip(&mut ctx)?;
    witness_checks(&mut ctx)?;
    resource(&mut ctx)?;
    bob_states(&mut ctx)?;
    averages(&mut ctx)?;
    optimum(&mut ctx)?;
    critical(&mut ctx)?;
    non_advantageous(&mut ctx)?;
    orderings(&mut ctx)?;
    let all_passed = ctx.claims.iter().all(|c| c.passed);
    Ok(VerificationReport { claims: ctx.claims, all_passed })
}
