//! Averages over input qubits `a|1> + b|0>` distributed uniformly on the
//! Bloch sphere, `a = cos(θ/2) e^{-iφ}`, `b = sin(θ/2)`, with measure
//! `dμ = sin θ dθ dφ / 4π`.
//!
//! Under this measure `|a|² = (1 + cos θ)/2` is uniform on `[0, 1]`, so any
//! integrand that is a polynomial in `|a|²` averages in closed form:
//! `E[|a|^{2k}] = 1/(k + 1)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{DensityOperator, FockSpace, Occupation, PureState};
use crate::numeric::gauss_legendre;
use crate::tolerance::TOL;

/// Single-rail qubit `a|1> + b|0>` to be teleported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnknownQubit {
    a: Complex64,
    b: Complex64,
}

impl UnknownQubit {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr();
        if (norm - 1.0).abs() > TOL.norm {
            return Err(Error::NotNormalized(norm));
        }
        Ok(UnknownQubit { a, b })
    }

    /// Bloch-sphere point `(θ, φ)`.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        UnknownQubit {
            a: Complex64::from_polar((theta / 2.0).cos(), -phi),
            b: Complex64::new((theta / 2.0).sin(), 0.0),
        }
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// Pure state on one mode.
    pub fn to_state(&self) -> PureState {
        PureState::new(
            1,
            vec![(Occupation::new(vec![1]), self.a), (Occupation::new(vec![0]), self.b)],
        )
        .expect("normalized by construction")
    }

    pub fn density(&self, cutoff: usize) -> DensityOperator {
        DensityOperator::from_pure(&self.to_state(), &FockSpace::new(1, cutoff.max(1)))
            .expect("qubit fits any cutoff >= 1")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BlochMethod {
    /// Gauss–Legendre in `cos θ` times the trapezoidal rule in `φ`.
    Quadrature { polar: usize, azimuth: usize },
    /// Uniform sampling from a seeded ChaCha stream.
    MonteCarlo { samples: usize, seed: u64 },
}

impl BlochMethod {
    /// Exact for every integrand of degree <= 7 in `cos θ` and `e^{±iφ}`,
    /// which covers all photon-number polynomials appearing here.
    pub const DEFAULT_QUADRATURE: BlochMethod = BlochMethod::Quadrature { polar: 4, azimuth: 8 };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochEstimate {
    pub mean: f64,
    /// Standard error of the mean; zero for deterministic rules.
    pub std_error: f64,
}

/// Quadrature nodes with weights summing to one.
pub fn bloch_nodes(polar: usize, azimuth: usize) -> Vec<(UnknownQubit, f64)> {
    let (x, w) = gauss_legendre(polar);
    let mut out = Vec::with_capacity(polar * azimuth);
    for (cos_t, wt) in x.iter().zip(&w) {
        let theta = cos_t.clamp(-1.0, 1.0).acos();
        for l in 0..azimuth {
            let phi = TAU * l as f64 / azimuth as f64;
            out.push((UnknownQubit::from_bloch(theta, phi), wt / 2.0 / azimuth as f64));
        }
    }
    out
}

const CHUNK: usize = 1 << 16;

fn random_qubit(rng: &mut ChaCha8Rng) -> UnknownQubit {
    let cos_t: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi: f64 = TAU * rng.random::<f64>();
    UnknownQubit::from_bloch(cos_t.acos(), phi)
}

/// `∫dμ f`.
pub fn bloch_average<F>(f: F, method: BlochMethod) -> BlochEstimate
where
    F: Fn(&UnknownQubit) -> f64 + Sync,
{
    match method {
        BlochMethod::Quadrature { polar, azimuth } => {
            let mean = bloch_nodes(polar, azimuth).iter().map(|(q, w)| w * f(q)).sum();
            BlochEstimate { mean, std_error: 0.0 }
        }
        BlochMethod::MonteCarlo { samples, seed } => {
            let chunks = samples.div_ceil(CHUNK);
            // One stream per chunk: the result does not depend on scheduling.
            let partial: Vec<(f64, f64)> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(c as u64);
                    let count = CHUNK.min(samples - c * CHUNK);
                    (0..count).fold((0.0, 0.0), |(s, s2), _| {
                        let v = f(&random_qubit(&mut rng));
                        (s + v, s2 + v * v)
                    })
                })
                .collect();
            let (sum, sum_sq) = partial.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
            let n = samples as f64;
            let mean = sum / n;
            let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
            BlochEstimate { mean, std_error: (var / n).sqrt() }
        }
    }
}

/// Closed-form average of `Σ_k coeffs[k] |a|^{2k}`.
pub fn bloch_average_polynomial(coeffs: &[f64]) -> f64 {
    coeffs.iter().enumerate().map(|(k, c)| c / (k as f64 + 1.0)).sum()
}
