//! Conditional teleportation over a single-photon W network.
//!
//! Alice (mode A) and Bob (mode B) share an N-mode W state; `m` further
//! parties measure their modes and announce that they saw nothing. Alice
//! mixes her half of the resulting two-mode resource with the unknown qubit
//! `a|1> + b|0>` on a splitter of angle θ and keeps only the outcomes where
//! exactly one of her two detectors fires. Bob may only correct by a phase.
//!
//! Closed forms live here; [`sim`] runs the same protocol through the Fock
//! space machinery.

pub mod sim;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::bloch::UnknownQubit;
use crate::circuits::{generate_w, symmetric_angles};
use crate::detection::{condition, povm_number, DetectorKind, DetectorModel};
use crate::error::{Error, Result};
use crate::fock::{partial_trace, DensityOperator, FockSpace, Occupation, PureState, DEFAULT_CUTOFF};
use crate::numeric::{bisect, maximize};
use crate::tolerance::TOL;

pub use sim::{BobChannel, EventOptimum, ProtocolSimulator, SimulatedAverage};

/// Best fidelity achievable without entanglement.
pub const CLASSICAL_LIMIT: f64 = 2.0 / 3.0;

/// Which of Alice's advantageous outcomes are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventSet {
    D10,
    D01,
    Both,
}

impl EventSet {
    pub fn events(&self) -> &'static [BellEvent] {
        match self {
            EventSet::D10 => &[BellEvent::D10],
            EventSet::D01 => &[BellEvent::D01],
            EventSet::Both => &[BellEvent::D10, BellEvent::D01],
        }
    }
}

impl fmt::Display for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventSet::D10 => "d10",
            EventSet::D01 => "d01",
            EventSet::Both => "both",
        })
    }
}

impl FromStr for EventSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d10" => Ok(EventSet::D10),
            "d01" => Ok(EventSet::D01),
            "both" => Ok(EventSet::Both),
            _ => Err(Error::InvalidParameter(format!("unknown event set {s:?} (d10, d01, both)"))),
        }
    }
}

/// Photon counts `(c, d)` reported by Alice's two detectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BellEvent {
    D00,
    D10,
    D01,
    D20,
    D11,
    D02,
}

impl BellEvent {
    pub fn counts(&self) -> (usize, usize) {
        match self {
            BellEvent::D00 => (0, 0),
            BellEvent::D10 => (1, 0),
            BellEvent::D01 => (0, 1),
            BellEvent::D20 => (2, 0),
            BellEvent::D11 => (1, 1),
            BellEvent::D02 => (0, 2),
        }
    }

    /// Only a single click singles out a Bell state.
    pub fn is_advantageous(&self) -> bool {
        matches!(self, BellEvent::D10 | BellEvent::D01)
    }
}

impl fmt::Display for BellEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (c, d) = self.counts();
        write!(f, "D{c}{d}")
    }
}

/// Every outcome Alice can see with at most two photons.
pub fn bell_events() -> [BellEvent; 6] {
    use BellEvent::*;
    [D00, D10, D01, D20, D11, D02]
}

/// Network size, number of cooperating parties and detectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Network {
    n: usize,
    m: usize,
    eta: f64,
    detector: DetectorKind,
}

impl Network {
    pub fn new(n: usize, m: usize, eta: f64, detector: DetectorKind) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("network needs N >= 2, got {n}")));
        }
        if m + 2 > n {
            return Err(Error::InvalidParameter(format!("m = {m} cooperating parties exceeds N - 2 = {}", n - 2)));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter(format!("efficiency {eta} outside (0, 1]")));
        }
        Ok(Network { n, m, eta, detector })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn detector(&self) -> DetectorKind {
        self.detector
    }

    pub fn detector_model(&self) -> DetectorModel {
        DetectorModel::new(self.eta).expect("validated")
    }

    pub fn with_detector(self, detector: DetectorKind) -> Self {
        Network { detector, ..self }
    }

    /// `N - ηm - 2`, the vacuum weight of the resource times N.
    fn vacuum_excess(&self) -> f64 {
        self.n as f64 - self.eta * self.m as f64 - 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TeleportParams {
    pub network: Network,
    pub theta: f64,
    pub events: EventSet,
}

impl TeleportParams {
    pub fn new(network: Network, theta: f64, events: EventSet) -> Result<Self> {
        if !(-TOL.angle..=FRAC_PI_2 + TOL.angle).contains(&theta) {
            return Err(Error::InvalidParameter(format!("splitter angle {theta} outside [0, π/2]")));
        }
        Ok(TeleportParams { network, theta: theta.clamp(0.0, FRAC_PI_2), events })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TeleportReport {
    pub params: TeleportParams,
    pub avg_fidelity: f64,
    pub avg_probability: f64,
    pub r_theta: f64,
    /// Extra vacuum term of on-off detection; zero for number-resolving.
    pub r_prime_theta: f64,
    pub optimal_theta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxFidelity {
    pub fidelity: f64,
    pub probability: f64,
    pub theta: f64,
}

/// `R(θ) = (N - ηm - 2) cos²θ + 1 - η`.
pub fn r_theta(network: &Network, theta: f64) -> f64 {
    network.vacuum_excess() * theta.cos().powi(2) + 1.0 - network.eta
}

/// `R'(θ) = 2η sin²θ cos²θ`.
pub fn r_prime(eta: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    2.0 * eta * s * s * c * c
}

/// Vacuum term that enters with `|a|²` for the given event, including the
/// on-off penalty when applicable.
fn event_vacuum_term(network: &Network, theta: f64, event: BellEvent) -> Result<f64> {
    let r = match event {
        BellEvent::D10 => r_theta(network, theta),
        BellEvent::D01 => r_theta(network, theta + FRAC_PI_2),
        _ => return Err(Error::InvalidParameter(format!("{event} has no closed form"))),
    };
    Ok(match network.detector {
        DetectorKind::NumberResolving => r,
        DetectorKind::OnOff => r + r_prime(network.eta, theta),
    })
}

/// `(2/N)|Ψ+><Ψ+| + ((N - ηm - 2)/N)|00><00|`, unnormalized, on modes (A, B).
pub fn conditional_resource(network: &Network) -> DensityOperator {
    let space = FockSpace::new(2, DEFAULT_CUTOFF);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = PureState::new(
        2,
        vec![
            (Occupation::new(vec![1, 0]), Complex64::new(h, 0.0)),
            (Occupation::new(vec![0, 1]), Complex64::new(h, 0.0)),
        ],
    )
    .expect("normalized");
    let bell = DensityOperator::from_pure(&psi, &space).expect("fits cutoff");
    let vac = DensityOperator::vacuum(&space);
    let n = network.n as f64;
    DensityOperator::mixture(&[(2.0 / n, &bell), (network.vacuum_excess() / n, &vac)])
        .expect("weights are non-negative")
        .into_branch()
}

/// Same resource obtained by generating the W state with the splitter chain,
/// conditioning modes `2..2+m` on no click and tracing the rest out.
pub fn simulate_conditional_resource(network: &Network) -> Result<DensityOperator> {
    let w = generate_w(&symmetric_angles(network.n)?);
    let rho = DensityOperator::from_pure(&w, &FockSpace::new(network.n, DEFAULT_CUTOFF))?;
    let none = povm_number(0, network.detector_model(), DEFAULT_CUTOFF)?;
    let assignments: Vec<(usize, &_)> = (2..2 + network.m).map(|k| (k, &none)).collect();
    let conditioned = condition(&rho, &assignments)?;
    partial_trace(&conditioned, &[0, 1])
}

/// Bob's unnormalized state after `event`, including his correction (a π
/// phase after D01). Its trace is the event probability.
pub fn bob_state(event: BellEvent, qubit: &UnknownQubit, params: &TeleportParams) -> Result<DensityOperator> {
    let net = &params.network;
    let vac = event_vacuum_term(net, params.theta, event)?;
    let (s, c) = params.theta.sin_cos();
    // Amplitudes on |1> and |0> after the correction.
    let (one, zero) = match event {
        BellEvent::D10 => (qubit.a() * c, qubit.b() * s),
        _ => (qubit.a() * s, qubit.b() * c),
    };
    let space = FockSpace::new(1, DEFAULT_CUTOFF);
    let scale = Complex64::new(net.eta / net.n as f64, 0.0);
    let v = nalgebra::DVector::from_vec(vec![zero, one, Complex64::default()]);
    let mut matrix = &v * v.adjoint();
    matrix[(0, 0)] += Complex64::new(qubit.a().norm_sqr() * vac, 0.0);
    DensityOperator::from_parts(space, matrix * scale, false)
}

/// Bloch-averaged `(∫ P F, ∫ P)` for one advantageous event.
fn event_moments(network: &Network, theta: f64, event: BellEvent) -> Result<(f64, f64)> {
    let vac = event_vacuum_term(network, theta, event)?;
    let k = network.eta / network.n as f64;
    let s2 = (2.0 * theta).sin();
    Ok((k / 6.0 * (2.0 + s2 + vac), k / 2.0 * (1.0 + vac)))
}

/// Closed-form averaged fidelity and success probability.
pub fn averaged_fidelity_probability(params: &TeleportParams) -> TeleportReport {
    let net = &params.network;
    let (num, den) = params
        .events
        .events()
        .iter()
        .map(|&e| event_moments(net, params.theta, e).expect("advantageous event"))
        .fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
    TeleportReport {
        params: *params,
        avg_fidelity: num / den,
        avg_probability: den,
        r_theta: r_theta(net, params.theta),
        r_prime_theta: match net.detector {
            DetectorKind::NumberResolving => 0.0,
            DetectorKind::OnOff => r_prime(net.eta, params.theta),
        },
        optimal_theta: None,
    }
}

/// Averaged fidelity written without the overall `η/N`, so that it stays
/// defined at η = 0.
fn fidelity_at(n: usize, m: usize, eta: f64, kind: DetectorKind, theta: f64, events: EventSet) -> f64 {
    let net = Network { n, m, eta, detector: kind };
    let s2 = (2.0 * theta).sin();
    let (num, den) = events
        .events()
        .iter()
        .map(|&e| event_vacuum_term(&net, theta, e).expect("advantageous event"))
        .fold((0.0, 0.0), |acc, v| (acc.0 + (2.0 + s2 + v) / 3.0, acc.1 + 1.0 + v));
    num / den
}

/// Optimal splitter angle for number-resolving detectors:
/// `cos θ = (2 - η)/√((2 - η)² + (N - ηm - η)²)` for D10, its complement
/// for D01 and π/4 for both events.
pub fn optimal_theta_closed_form(network: &Network, events: EventSet) -> f64 {
    let t = (network.n as f64 - network.eta * (network.m as f64 + 1.0)).atan2(2.0 - network.eta);
    match events {
        EventSet::D10 => t,
        EventSet::D01 => FRAC_PI_2 - t,
        EventSet::Both => FRAC_PI_4,
    }
}

const GOLDEN_TOL: f64 = 1e-10;
const COARSE_POINTS: usize = 257;

fn numeric_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    maximize(f, lo, hi, COARSE_POINTS, GOLDEN_TOL)
}

/// Angle maximizing the averaged fidelity: closed form for number-resolving
/// detectors, numeric for on-off ones.
pub fn optimal_theta(network: &Network, events: EventSet) -> f64 {
    match network.detector {
        DetectorKind::NumberResolving => optimal_theta_closed_form(network, events),
        DetectorKind::OnOff => max_fidelity(network, events).theta,
    }
}

/// Maximum averaged fidelity over θ and the success probability there.
pub fn max_fidelity(network: &Network, events: EventSet) -> MaxFidelity {
    let (n, eta) = (network.n as f64, network.eta);
    let m = network.m as f64;
    match (network.detector, events) {
        (DetectorKind::NumberResolving, EventSet::Both) => {
            let k = n - eta * (m + 2.0) + 2.0;
            MaxFidelity { fidelity: (1.0 + 4.0 / k) / 3.0, probability: eta / (2.0 * n) * k, theta: FRAC_PI_4 }
        }
        (DetectorKind::NumberResolving, _) => {
            let x = n - eta * m - eta;
            let g = 2.0 - eta;
            let fidelity = (1.0 + (n - eta * (m + 2.0) + 2.0) / (g * x)) / 3.0;
            let probability = eta * g / (2.0 * n) * (1.0 + g * (n - eta * m - 2.0) / (g * g + x * x));
            MaxFidelity { fidelity, probability, theta: optimal_theta_closed_form(network, events) }
        }
        (DetectorKind::OnOff, _) => {
            let f = |t: f64| fidelity_at(network.n, network.m, eta, DetectorKind::OnOff, t, events);
            // Both-event fidelity is symmetric about π/4.
            let hi = if events == EventSet::Both { FRAC_PI_4 } else { FRAC_PI_2 };
            let (theta, fidelity) = numeric_max(f, 0.0, hi);
            let params = TeleportParams::new(*network, theta, events).expect("angle in range");
            MaxFidelity { fidelity, probability: averaged_fidelity_probability(&params).avg_probability, theta }
        }
    }
}

/// Numerically maximized fidelity as a function of η, defined on `[0, 1]`.
fn max_fidelity_at(n: usize, m: usize, eta: f64, kind: DetectorKind, events: EventSet) -> f64 {
    let f = |t: f64| fidelity_at(n, m, eta, kind, t, events);
    let hi = if events == EventSet::Both { FRAC_PI_4 } else { FRAC_PI_2 };
    numeric_max(f, 0.0, hi).1
}

fn check_nm(n: usize, m: usize) -> Result<()> {
    if n < 2 || m + 2 > n {
        return Err(Error::InvalidParameter(format!("need N >= 2 and m <= N - 2, got N = {n}, m = {m}")));
    }
    Ok(())
}

/// `η^c = (N + m - √((N - m - 2)² + 4(m + 1)))/(2(m + 1))`: above it the
/// single-event fidelity beats the classical limit.
pub fn critical_eta_closed_form(n: usize, m: usize) -> Result<f64> {
    check_nm(n, m)?;
    let (n, m) = (n as f64, m as f64);
    Ok((n + m - ((n - m - 2.0).powi(2) + 4.0 * (m + 1.0)).sqrt()) / (2.0 * (m + 1.0)))
}

/// Root of `F̄max(η) = 2/3` by bisection on `[0, 1]`, with `F̄max` the
/// closed form for number-resolving detectors and the numeric maximum for
/// on-off detectors. Returns 0 when every η > 0 already beats the limit.
pub fn critical_eta_bisection(n: usize, m: usize, kind: DetectorKind, tol: f64) -> Result<f64> {
    check_nm(n, m)?;
    let g = |eta: f64| match kind {
        DetectorKind::NumberResolving if eta > 0.0 => {
            Network::new(n, m, eta, kind).map(|net| max_fidelity(&net, EventSet::D10).fidelity).unwrap() - CLASSICAL_LIMIT
        }
        _ => max_fidelity_at(n, m, eta, kind, EventSet::D10) - CLASSICAL_LIMIT,
    };
    if g(0.0) > -1e-12 {
        return Ok(0.0);
    }
    bisect(g, 0.0, 1.0, tol)
}

/// Critical efficiency: closed form for number-resolving detectors,
/// bisection for on-off ones.
pub fn critical_eta(n: usize, m: usize, kind: DetectorKind) -> Result<f64> {
    match kind {
        DetectorKind::NumberResolving => critical_eta_closed_form(n, m),
        DetectorKind::OnOff => critical_eta_bisection(n, m, kind, 1e-12),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::grid_max;
    use DetectorKind::{NumberResolving as Nr, OnOff};

    fn net(n: usize, m: usize, eta: f64) -> Network {
        Network::new(n, m, eta, Nr).unwrap()
    }

    #[test]
    fn network_validation() {
        assert!(Network::new(3, 2, 0.5, Nr).is_err());
        assert!(Network::new(1, 0, 0.5, Nr).is_err());
        assert!(Network::new(3, 1, 0.0, Nr).is_err());
        assert!(Network::new(3, 1, 1.1, Nr).is_err());
        assert!(TeleportParams::new(net(3, 0, 1.0), 2.0, EventSet::D10).is_err());
    }

    #[test]
    fn six_events_two_advantageous() {
        let all = bell_events();
        assert_eq!(all.len(), 6);
        let adv: Vec<_> = all.iter().filter(|e| e.is_advantageous()).collect();
        assert_eq!(adv, [&BellEvent::D10, &BellEvent::D01]);
        assert_eq!(BellEvent::D11.to_string(), "D11");
        assert_eq!("Both".parse::<EventSet>().unwrap(), EventSet::Both);
    }

    #[test]
    fn resource_examples() {
        let o = |v: [u8; 2]| Occupation::new(v.to_vec());
        let r = conditional_resource(&net(2, 0, 0.4));
        assert!((r.trace() - 1.0).abs() < 1e-15);
        assert!(r.element(&o([0, 0]), &o([0, 0])).norm() < 1e-15);
        let r = conditional_resource(&net(3, 1, 1.0));
        assert!((r.trace() - 2.0 / 3.0).abs() < 1e-15);
        let r = conditional_resource(&net(4, 0, 0.3));
        assert!((r.element(&o([0, 0]), &o([0, 0])).re - 0.5).abs() < 1e-15);
        assert!((r.element(&o([1, 0]), &o([0, 1])).re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn resource_matches_simulation() {
        for n in 2..=6 {
            for m in 0..=n - 2 {
                for eta in [0.25, 1.0] {
                    let nw = net(n, m, eta);
                    let a = conditional_resource(&nw);
                    let b = simulate_conditional_resource(&nw).unwrap();
                    assert!((a.matrix() - b.matrix()).norm() < 1e-12, "N={n} m={m} η={eta}");
                }
            }
        }
    }

    #[test]
    fn bob_state_examples() {
        let p = TeleportParams::new(net(2, 0, 1.0), FRAC_PI_4, EventSet::D10).unwrap();
        let one = UnknownQubit::new(Complex64::new(1.0, 0.0), Complex64::default()).unwrap();
        assert!((bob_state(BellEvent::D10, &one, &p).unwrap().trace() - 0.25).abs() < 1e-15);
        let zero = UnknownQubit::new(Complex64::default(), Complex64::new(1.0, 0.0)).unwrap();
        let p = TeleportParams::new(net(4, 1, 0.6), 0.3, EventSet::D10).unwrap();
        let rho = bob_state(BellEvent::D10, &zero, &p).unwrap();
        let expect = 0.6 / 4.0 * 0.3f64.sin().powi(2);
        assert!((rho.matrix()[(0, 0)].re - expect).abs() < 1e-15);
        assert!((rho.trace() - expect).abs() < 1e-15);
        assert!(bob_state(BellEvent::D11, &zero, &p).is_err());
    }

    #[test]
    fn ideal_two_mode_both_events() {
        let p = TeleportParams::new(net(2, 0, 1.0), FRAC_PI_4, EventSet::Both).unwrap();
        let r = averaged_fidelity_probability(&p);
        assert!((r.avg_fidelity - 1.0).abs() < 1e-12);
        assert!((r.avg_probability - 0.5).abs() < 1e-12);
    }

    #[test]
    fn optimal_angle_examples() {
        assert!((optimal_theta_closed_form(&net(2, 0, 1.0), EventSet::D10) - FRAC_PI_4).abs() < 1e-15);
        let t = optimal_theta_closed_form(&net(3, 0, 0.5), EventSet::D10);
        assert!((t.cos() - 1.5 / (1.5f64 * 1.5 + 2.5 * 2.5).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn closed_form_maximum_is_attained_at_the_optimal_angle() {
        for (n, m, eta) in [(3, 0, 0.5), (5, 2, 0.8), (8, 6, 0.3), (2, 0, 0.7)] {
            let nw = net(n, m, eta);
            let best = max_fidelity(&nw, EventSet::D10);
            let at = averaged_fidelity_probability(&TeleportParams::new(nw, best.theta, EventSet::D10).unwrap());
            assert!((at.avg_fidelity - best.fidelity).abs() < 1e-12);
            assert!((at.avg_probability - best.probability).abs() < 1e-12);
            let (t, f) = numeric_max(|t| fidelity_at(n, m, eta, Nr, t, EventSet::D10), 0.0, FRAC_PI_2);
            assert!((t - best.theta).abs() < 1e-8 && (f - best.fidelity).abs() < 1e-12, "{n} {m} {eta}: {} {}", t - best.theta, f - best.fidelity);
        }
    }

    #[test]
    fn ideal_detector_maximum() {
        for n in 2..=8 {
            for m in 0..=n - 2 {
                let f = max_fidelity(&net(n, m, 1.0), EventSet::D10).fidelity;
                let k = (n - m) as f64;
                assert!((f - (1.0 + k / (k - 1.0)) / 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn three_party_critical_efficiencies() {
        let c30 = critical_eta_closed_form(3, 0).unwrap();
        let c31 = critical_eta_closed_form(3, 1).unwrap();
        assert!((c30 - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((c31 - (2.0 - 2f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((critical_eta_bisection(3, 0, Nr, 1e-12).unwrap() - c30).abs() < 1e-10);
        assert_eq!(critical_eta_closed_form(2, 0).unwrap(), 0.0);
        assert_eq!(critical_eta_bisection(2, 0, OnOff, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn onoff_critical_efficiencies() {
        let e30 = critical_eta(3, 0, OnOff).unwrap();
        let e31 = critical_eta(3, 1, OnOff).unwrap();
        assert!((e30 - 0.583_341_615_057_022_8).abs() < 1e-11, "{e30}");
        assert!((e31 - 0.435_519_031_506_913_8).abs() < 1e-11, "{e31}");
    }

    #[test]
    fn onoff_maximum_matches_dense_grid() {
        let nw = Network::new(3, 1, 0.5, OnOff).unwrap();
        let best = max_fidelity(&nw, EventSet::D10);
        let (_, grid) = grid_max(|t| fidelity_at(3, 1, 0.5, OnOff, t, EventSet::D10), 0.0, FRAC_PI_2, 10_001);
        assert!(best.fidelity >= grid - 1e-14 && best.fidelity - grid < 1e-8);
    }
}
