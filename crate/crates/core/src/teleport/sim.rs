//! The teleportation protocol run through the Fock-space simulator:
//! W generation, conditioning of the cooperating modes, the Bell splitter,
//! Alice's lossy detection and Bob's phase correction.
//!
//! Mode order of the joint state is `(u, A, B)`: the unknown qubit, Alice's
//! and Bob's halves of the resource.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{simulate_conditional_resource, BellEvent, EventSet, Network};
use crate::bloch::{bloch_average, bloch_nodes, BlochMethod, UnknownQubit};
use crate::circuits::bell_splitter;
use crate::detection::{condition, povm_number, povm_onoff, DetectorKind, PovmElement};
use crate::error::{Error, Result};
use crate::fock::{tensor, DensityOperator, FockSpace, FockUnitary, MixingConvention, ModeTransform, DEFAULT_CUTOFF};

/// Bob's phase after an advantageous event: the one of `{0, π}` that turns
/// the `sin 2θ` overlap term positive.
pub fn bob_phase(event: BellEvent, theta: f64) -> f64 {
    let positive = (2.0 * theta).sin() >= 0.0;
    match (event, positive) {
        (BellEvent::D10, true) | (BellEvent::D01, false) => 0.0,
        (BellEvent::D10, false) | (BellEvent::D01, true) => PI,
        _ => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulatedAverage {
    pub fidelity: f64,
    pub probability: f64,
    /// First-order estimate that ignores the correlation between numerator
    /// and denominator; zero for quadrature.
    pub fidelity_std_error: f64,
    pub probability_std_error: f64,
}

/// Best Bloch-averaged fidelity found for one event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EventOptimum {
    pub event: BellEvent,
    pub fidelity: f64,
    pub theta: f64,
    pub phase: f64,
}

/// The linear map from the qubit density operator to Bob's unnormalized
/// state (before his correction), stored through its images of `|i><j|`.
#[derive(Debug, Clone)]
pub struct BobChannel {
    images: [[DMatrix<Complex64>; 2]; 2],
}

impl BobChannel {
    /// Bob's state for `qubit` after a phase shift `phase`.
    pub fn apply(&self, qubit: &UnknownQubit, phase: f64) -> DMatrix<Complex64> {
        let c = [qubit.b(), qubit.a()];
        let dim = self.images[0][0].nrows();
        let mut out = DMatrix::zeros(dim, dim);
        for i in 0..2 {
            for j in 0..2 {
                out += &self.images[i][j] * (c[i] * c[j].conj());
            }
        }
        DMatrix::from_fn(dim, dim, |r, s| out[(r, s)] * Complex64::from_polar(1.0, -(r as f64 - s as f64) * phase))
    }

    /// `(<φ|ρ_B|φ>, tr ρ_B)`.
    pub fn fidelity_terms(&self, qubit: &UnknownQubit, phase: f64) -> (f64, f64) {
        let c = [qubit.b(), qubit.a()];
        let coherence = Complex64::from_polar(1.0, -phase);
        let (mut f, mut p) = (0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                let w = c[i] * c[j].conj();
                let e = &self.images[i][j];
                p += (w * e.trace()).re;
                let over = c[0].norm_sqr() * e[(0, 0)]
                    + c[1].norm_sqr() * e[(1, 1)]
                    + c[1].conj() * e[(1, 0)] * c[0] * coherence
                    + c[0].conj() * e[(0, 1)] * c[1] * coherence.conj();
                f += (w * over).re;
            }
        }
        (f, p)
    }

    /// Bloch averages of the phase-independent part of the overlap, of the
    /// `|1><0|` coherence and of the trace, so that the averaged overlap at
    /// phase φ is `diag + 2 Re(coherence e^{-iφ})`.
    fn phase_profile(&self, moments: &QubitMoments) -> (f64, Complex64, f64) {
        let (mut diag, mut coh, mut p) = (0.0, Complex64::default(), 0.0);
        for i in 0..2 {
            for j in 0..2 {
                let e = &self.images[i][j];
                for n in 0..2 {
                    diag += (moments.fourth[i][j][n][n] * e[(n, n)]).re;
                }
                coh += moments.fourth[i][j][1][0] * e[(1, 0)];
                p += (moments.second[i][j] * e.trace()).re;
            }
        }
        (diag, coh, p)
    }
}

/// Bloch averages `E[c_i c_j*]` and `E[c_i c_j* c_n* c_k]` of the qubit
/// amplitudes `c = (b, a)`.
struct QubitMoments {
    second: [[Complex64; 2]; 2],
    fourth: [[[[Complex64; 2]; 2]; 2]; 2],
}

impl QubitMoments {
    fn from_nodes(nodes: &[(UnknownQubit, f64)]) -> Self {
        let zero = Complex64::default();
        let mut out = QubitMoments { second: [[zero; 2]; 2], fourth: [[[[zero; 2]; 2]; 2]; 2] };
        for (q, w) in nodes {
            let c = [q.b(), q.a()];
            for i in 0..2 {
                for j in 0..2 {
                    let cij = c[i] * c[j].conj() * *w;
                    out.second[i][j] += cij;
                    for n in 0..2 {
                        for k in 0..2 {
                            out.fourth[i][j][n][k] += cij * c[n].conj() * c[k];
                        }
                    }
                }
            }
        }
        out
    }
}

/// The protocol for one network, with its conditioned resource computed once.
#[derive(Debug, Clone)]
pub struct ProtocolSimulator {
    network: Network,
    resource: DensityOperator,
    /// `|i><j| ⊗ resource` for the qubit basis, indexed `2i + j`.
    basis_inputs: Vec<DensityOperator>,
}

impl ProtocolSimulator {
    pub fn new(network: Network) -> Result<Self> {
        let resource = simulate_conditional_resource(&network)?;
        let space = FockSpace::new(1, DEFAULT_CUTOFF);
        let mut basis_inputs = Vec::with_capacity(4);
        for i in 0..2 {
            for j in 0..2 {
                let mut x = DMatrix::zeros(space.dim(), space.dim());
                x[(i, j)] = Complex64::new(1.0, 0.0);
                basis_inputs.push(tensor(&DensityOperator::from_parts(space.clone(), x, false)?, &resource)?);
            }
        }
        Ok(ProtocolSimulator { network, resource, basis_inputs })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    /// Unnormalized two-mode resource shared by Alice and Bob.
    pub fn resource(&self) -> &DensityOperator {
        &self.resource
    }

    /// Alice's POVM elements on `(c, d)`. On-off detectors only resolve
    /// D00, D10 (read as "c clicks") and D01.
    fn alice_povms(&self, event: BellEvent) -> Result<[PovmElement; 2]> {
        let det = self.network.detector_model();
        match self.network.detector() {
            DetectorKind::NumberResolving => {
                let (c, d) = event.counts();
                Ok([povm_number(c, det, DEFAULT_CUTOFF)?, povm_number(d, det, DEFAULT_CUTOFF)?])
            }
            DetectorKind::OnOff => {
                let (on, off) = (povm_onoff(true, det, DEFAULT_CUTOFF), povm_onoff(false, det, DEFAULT_CUTOFF));
                match event {
                    BellEvent::D00 => Ok([off.clone(), off]),
                    BellEvent::D10 => Ok([on, off]),
                    BellEvent::D01 => Ok([off, on]),
                    _ => Err(Error::InvalidParameter(format!("on-off detectors cannot resolve {event}"))),
                }
            }
        }
    }

    /// Joint state through the splitter and Alice's detectors, one Bob
    /// operator per event.
    fn propagate(&self, joint: &DensityOperator, unitary: &FockUnitary, povms: &[[PovmElement; 2]]) -> Result<Vec<DensityOperator>> {
        let mixed = unitary.apply(joint)?;
        povms.iter().map(|[c, d]| condition(&mixed, &[(0, c), (1, d)])).collect()
    }

    fn splitter(&self, theta: f64) -> Result<FockUnitary> {
        let space = FockSpace::new(3, DEFAULT_CUTOFF);
        FockUnitary::two_mode(&space, (0, 1), &bell_splitter(theta), MixingConvention::Heisenberg)
    }

    /// Bob's unnormalized state after `event` and a phase shift `phase`.
    pub fn bob_state(&self, qubit: &UnknownQubit, theta: f64, event: BellEvent, phase: f64) -> Result<DensityOperator> {
        let joint = tensor(&qubit.density(DEFAULT_CUTOFF), &self.resource)?;
        let out = self.propagate(&joint, &self.splitter(theta)?, &[self.alice_povms(event)?])?;
        out[0].apply_phase(0, phase)
    }

    /// Bob channels for several events at one splitter angle.
    pub fn channels(&self, theta: f64, events: &[BellEvent]) -> Result<Vec<BobChannel>> {
        let unitary = self.splitter(theta)?;
        let povms = events.iter().map(|&e| self.alice_povms(e)).collect::<Result<Vec<_>>>()?;
        let per_input = self
            .basis_inputs
            .iter()
            .map(|joint| self.propagate(joint, &unitary, &povms))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..events.len())
            .map(|e| {
                let img = |k: usize| per_input[k][e].matrix().clone();
                BobChannel { images: [[img(0), img(1)], [img(2), img(3)]] }
            })
            .collect())
    }

    /// Bloch-averaged fidelity and probability of the advantageous events in
    /// `events`, with Bob applying [`bob_phase`].
    pub fn average(&self, theta: f64, events: EventSet, method: BlochMethod) -> Result<SimulatedAverage> {
        let list = events.events();
        let channels = self.channels(theta, list)?;
        let (mut num, mut den, mut num_se, mut den_se) = (0.0, 0.0, 0.0, 0.0);
        for (ch, &e) in channels.iter().zip(list) {
            let phase = bob_phase(e, theta);
            let f = bloch_average(|q| ch.fidelity_terms(q, phase).0, method);
            let p = bloch_average(|q| ch.fidelity_terms(q, phase).1, method);
            num += f.mean;
            den += p.mean;
            num_se += f.std_error;
            den_se += p.std_error;
        }
        let fidelity = num / den;
        let rel = ((num_se / num).powi(2) + (den_se / den).powi(2)).sqrt();
        Ok(SimulatedAverage {
            fidelity,
            probability: den,
            fidelity_std_error: fidelity * rel,
            probability_std_error: den_se,
        })
    }

    /// Same as [`Self::average`] with quadrature, but simulating the whole
    /// protocol separately at every node instead of using the channel.
    pub fn average_direct(&self, theta: f64, events: EventSet) -> Result<SimulatedAverage> {
        let BlochMethod::Quadrature { polar, azimuth } = BlochMethod::DEFAULT_QUADRATURE else {
            unreachable!()
        };
        let (mut num, mut den) = (0.0, 0.0);
        for (q, w) in bloch_nodes(polar, azimuth) {
            for &e in events.events() {
                let rho = self.bob_state(&q, theta, e, bob_phase(e, theta))?;
                num += w * crate::fock::overlap_fidelity(&rho, &q.to_state())?;
                den += w * rho.trace();
            }
        }
        Ok(SimulatedAverage { fidelity: num / den, probability: den, fidelity_std_error: 0.0, probability_std_error: 0.0 })
    }

    /// Largest Bloch-averaged fidelity of each event over `theta_points`
    /// angles in `[0, π]` and `phase_points` Bob phases in `[0, 2π)`.
    /// Angles where the event never happens are skipped.
    pub fn best_fidelity_per_event(
        &self,
        events: &[BellEvent],
        theta_points: usize,
        phase_points: usize,
    ) -> Result<Vec<EventOptimum>> {
        let BlochMethod::Quadrature { polar, azimuth } = BlochMethod::DEFAULT_QUADRATURE else {
            unreachable!()
        };
        let moments = QubitMoments::from_nodes(&bloch_nodes(polar, azimuth));
        let step = PI / (theta_points.max(2) - 1) as f64;
        let per_theta: Vec<Vec<EventOptimum>> = (0..theta_points)
            .into_par_iter()
            .map(|k| {
                let theta = step * k as f64;
                let channels = self.channels(theta, events)?;
                Ok(channels
                    .iter()
                    .zip(events)
                    .map(|(ch, &event)| {
                        let (diag, coh, p) = ch.phase_profile(&moments);
                        let mut best = EventOptimum { event, fidelity: f64::NEG_INFINITY, theta, phase: 0.0 };
                        if p <= 1e-13 {
                            return best;
                        }
                        for l in 0..phase_points {
                            let phase = TAU * l as f64 / phase_points as f64;
                            let f = (diag + 2.0 * (coh * Complex64::from_polar(1.0, -phase)).re) / p;
                            if f > best.fidelity {
                                best = EventOptimum { event, fidelity: f, theta, phase };
                            }
                        }
                        best
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        Ok((0..events.len())
            .map(|e| {
                per_theta
                    .iter()
                    .map(|row| row[e])
                    .fold(per_theta[0][e], |a, b| if b.fidelity > a.fidelity { b } else { a })
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::teleport::{averaged_fidelity_probability, bob_state as closed_bob_state, TeleportParams, CLASSICAL_LIMIT};
    use std::f64::consts::FRAC_PI_4;

    fn sim(n: usize, m: usize, eta: f64, kind: DetectorKind) -> ProtocolSimulator {
        ProtocolSimulator::new(Network::new(n, m, eta, kind).unwrap()).unwrap()
    }

    #[test]
    fn simulated_bob_state_matches_closed_form() {
        let q = UnknownQubit::from_bloch(1.1, 0.7);
        for kind in [DetectorKind::NumberResolving, DetectorKind::OnOff] {
            let s = sim(4, 1, 0.7, kind);
            for theta in [0.0, 0.4, FRAC_PI_4, 1.3] {
                let p = TeleportParams::new(*s.network(), theta, EventSet::D10).unwrap();
                for e in [BellEvent::D10, BellEvent::D01] {
                    let a = s.bob_state(&q, theta, e, bob_phase(e, theta)).unwrap();
                    let b = closed_bob_state(e, &q, &p).unwrap();
                    assert!((a.matrix() - b.matrix()).norm() < 1e-12, "{kind} θ={theta} {e}");
                }
            }
        }
    }

    #[test]
    fn channel_agrees_with_direct_path() {
        let s = sim(3, 1, 0.6, DetectorKind::NumberResolving);
        let q = UnknownQubit::from_bloch(2.0, -0.4);
        let events = [BellEvent::D00, BellEvent::D11, BellEvent::D20];
        let chans = s.channels(0.9, &events).unwrap();
        for (ch, &e) in chans.iter().zip(&events) {
            let direct = s.bob_state(&q, 0.9, e, 0.3).unwrap();
            assert!((ch.apply(&q, 0.3) - direct.matrix()).norm() < 1e-13);
        }
    }

    #[test]
    fn averaged_simulation_matches_closed_form() {
        for kind in [DetectorKind::NumberResolving, DetectorKind::OnOff] {
            let s = sim(5, 2, 0.45, kind);
            for events in [EventSet::D10, EventSet::D01, EventSet::Both] {
                let p = TeleportParams::new(*s.network(), 0.6, events).unwrap();
                let closed = averaged_fidelity_probability(&p);
                let quad = s.average(0.6, events, BlochMethod::DEFAULT_QUADRATURE).unwrap();
                let direct = s.average_direct(0.6, events).unwrap();
                for got in [quad, direct] {
                    assert!((got.fidelity - closed.avg_fidelity).abs() < 1e-12);
                    assert!((got.probability - closed.avg_probability).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn monte_carlo_average_is_consistent() {
        let s = sim(3, 0, 0.8, DetectorKind::NumberResolving);
        let mc = s.average(0.5, EventSet::D10, BlochMethod::MonteCarlo { samples: 100_000, seed: 11 }).unwrap();
        let p = TeleportParams::new(*s.network(), 0.5, EventSet::D10).unwrap();
        let closed = averaged_fidelity_probability(&p);
        assert!(mc.fidelity_std_error > 0.0);
        assert!((mc.fidelity - closed.avg_fidelity).abs() < 6.0 * mc.fidelity_std_error);
    }

    #[test]
    fn phase_rule_is_the_better_binary_choice() {
        let s = sim(3, 1, 0.9, DetectorKind::NumberResolving);
        let q = UnknownQubit::from_bloch(0.8, 0.2);
        for theta in [0.3, 1.2, 2.0, 2.9] {
            let ch = s.channels(theta, &[BellEvent::D10, BellEvent::D01]).unwrap();
            for (c, e) in ch.iter().zip([BellEvent::D10, BellEvent::D01]) {
                let chosen = c.fidelity_terms(&q, bob_phase(e, theta)).0;
                let other = c.fidelity_terms(&q, bob_phase(e, theta) + PI).0;
                assert!(chosen >= other - 1e-15);
            }
        }
    }

    #[test]
    fn non_advantageous_events_stay_classical() {
        let s = sim(3, 1, 1.0, DetectorKind::NumberResolving);
        let events = [BellEvent::D00, BellEvent::D20, BellEvent::D11, BellEvent::D02];
        for best in s.best_fidelity_per_event(&events, 101, 16).unwrap() {
            assert!(best.fidelity <= CLASSICAL_LIMIT + 1e-9, "{:?}", best);
        }
    }
}
