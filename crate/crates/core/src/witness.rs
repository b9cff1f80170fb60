//! Pairwise entanglement test for W states.
//!
//! Any separable two-mode state satisfies
//! `[1 + 4(ΔJ_x)²][1 + 4(ΔJ_y)²] >= (1 + <N_+>)²`. The reduced state of any
//! two modes of a W state violates it for every detector efficiency η > 0,
//! with the closed-form ratio
//! `(1 - 4η² Re²[α_i* α_j]/(1 + η p_ij)) (1 - 4η² Im²[α_i* α_j]/(1 + η p_ij))`.
//! Violation for every one of the `N(N-1)/2` pairs rules out every
//! separable partition of the modes.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuits::WCoefficients;
use crate::detection::{detected_moments, lossy_moments, DetectorKind, DetectorModel, LossyMoments};
use crate::error::{Error, Result};
use crate::fock::{partial_trace, DensityOperator, FockSpace, Occupation, PureState, DEFAULT_CUTOFF};
use crate::tolerance::TOL;

/// Why a pair was not certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairNote {
    /// One of the two coefficients vanishes; the pair state is a product.
    ZeroCoefficient,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairWitnessResult {
    pub pair: (usize, usize),
    /// Ideal photon number of the pair, `|α_i|² + |α_j|²` for W pairs.
    pub p_ij: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub ratio_closed: Option<f64>,
    pub violated: bool,
    pub note: Option<PairNote>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessScanReport {
    pub n: usize,
    pub eta: f64,
    pub detector: DetectorKind,
    pub pairs: Vec<PairWitnessResult>,
    pub all_violated: bool,
}

/// `ratio < 1 - tol`.
pub fn is_violation(ratio: f64) -> bool {
    ratio < 1.0 - TOL.violation
}

fn check_pair(w: &WCoefficients, i: usize, j: usize) -> Result<()> {
    let n = w.num_modes();
    for m in [i, j] {
        if m >= n {
            return Err(Error::ModeOutOfRange { mode: m, num_modes: n });
        }
    }
    if i == j {
        return Err(Error::InvalidModes(format!("pair needs two distinct modes, got ({i}, {j})")));
    }
    let (ai, aj) = (w.alphas()[i], w.alphas()[j]);
    if ai.norm_sqr() == 0.0 && aj.norm_sqr() == 0.0 {
        return Err(Error::DegeneratePair { i, j });
    }
    Ok(())
}

/// Density operator of the full W state.
pub fn w_density(w: &WCoefficients) -> DensityOperator {
    DensityOperator::from_pure(&w.to_state(), &FockSpace::new(w.num_modes(), DEFAULT_CUTOFF))
        .expect("single photon fits the default cutoff")
}

/// Reduced state of modes `(i, j)`, obtained by tracing the full W density
/// operator over the other modes.
pub fn reduced_pair(w: &WCoefficients, i: usize, j: usize) -> Result<DensityOperator> {
    check_pair(w, i, j)?;
    partial_trace(&w_density(w), &[i, j])
}

/// `p |Ψ_ij><Ψ_ij| + (1 - p)|00><00|` with
/// `√p |Ψ_ij> = α_i|10> + α_j|01>` and `p = |α_i|² + |α_j|²`.
pub fn reduced_pair_closed_form(w: &WCoefficients, i: usize, j: usize) -> Result<DensityOperator> {
    check_pair(w, i, j)?;
    let (ai, aj) = (w.alphas()[i], w.alphas()[j]);
    let p = ai.norm_sqr() + aj.norm_sqr();
    let space = FockSpace::new(2, DEFAULT_CUTOFF);
    let scale = 1.0 / p.sqrt();
    let psi = PureState::new(
        2,
        vec![
            (Occupation::new(vec![1, 0]), ai * scale),
            (Occupation::new(vec![0, 1]), aj * scale),
        ],
    )?;
    let bell = DensityOperator::from_pure(&psi, &space)?;
    let vac = DensityOperator::vacuum(&space);
    let mut rho = DensityOperator::mixture(&[(p, &bell), (1.0 - p, &vac)])?;
    if !rho.is_normalized() {
        rho = rho.normalize()?;
    }
    Ok(rho)
}

fn result_from_moments(ideal_n: f64, m: LossyMoments) -> PairWitnessResult {
    let lhs = (1.0 + 4.0 * m.var_jx) * (1.0 + 4.0 * m.var_jy);
    let rhs = (1.0 + m.n_plus).powi(2);
    let ratio = lhs / rhs;
    PairWitnessResult {
        pair: (0, 1),
        p_ij: ideal_n,
        lhs,
        rhs,
        ratio,
        ratio_closed: None,
        violated: is_violation(ratio),
        note: None,
    }
}

/// Witness ratio from the interferometer readout with lossy moments.
pub fn witness_ratio_simulated(rho2: &DensityOperator, det: DetectorModel) -> Result<PairWitnessResult> {
    let ideal = crate::detection::ideal_moments(rho2)?;
    Ok(result_from_moments(ideal.n_plus, lossy_moments(rho2, det)?))
}

/// Witness ratio from simulated clicks of the given detector back-end.
pub fn witness_ratio_detected(
    rho2: &DensityOperator,
    det: DetectorModel,
    kind: DetectorKind,
) -> Result<PairWitnessResult> {
    let ideal = crate::detection::ideal_moments(rho2)?;
    Ok(result_from_moments(ideal.n_plus, detected_moments(rho2, det, kind)?))
}

/// Closed-form witness ratio for the pair `(α_i, α_j)`.
pub fn witness_ratio_closed_form(alpha_i: Complex64, alpha_j: Complex64, det: DetectorModel) -> f64 {
    let eta = det.eta();
    let p = alpha_i.norm_sqr() + alpha_j.norm_sqr();
    let z = alpha_i.conj() * alpha_j;
    let denom = 1.0 + eta * p;
    (1.0 - 4.0 * eta * eta * z.re * z.re / denom) * (1.0 - 4.0 * eta * eta * z.im * z.im / denom)
}

/// Tests all `N(N-1)/2` pairs. The simulated ratio uses lossy moments for
/// number-resolving detectors and click statistics for on-off detectors.
pub fn scan_all_pairs(w: &WCoefficients, det: DetectorModel, kind: DetectorKind) -> WitnessScanReport {
    let n = w.num_modes();
    let full = w_density(w);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let results: Vec<PairWitnessResult> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (ai, aj) = (w.alphas()[i], w.alphas()[j]);
            let rho2 = partial_trace(&full, &[i, j]).expect("pair modes are valid");
            let mut r = match kind {
                DetectorKind::NumberResolving => witness_ratio_simulated(&rho2, det),
                DetectorKind::OnOff => witness_ratio_detected(&rho2, det, kind),
            }
            .expect("reduced pair is a normalized two-mode state");
            r.pair = (i, j);
            r.ratio_closed = Some(witness_ratio_closed_form(ai, aj, det));
            if ai.norm_sqr() == 0.0 || aj.norm_sqr() == 0.0 {
                r.violated = false;
                r.note = Some(PairNote::ZeroCoefficient);
            }
            r
        })
        .collect();
    let all_violated = results.iter().all(|r| r.violated);
    WitnessScanReport { n, eta: det.eta(), detector: kind, pairs: results, all_violated }
}
