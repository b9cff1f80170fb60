//! Nonideal photodetection.
//!
//! A detector of efficiency η that reports `k` photons out of `l` incident
//! ones is the photon-number diagonal POVM
//! `Π_k = Σ_{l>=k} C(l, k) η^k (1-η)^{l-k} |l><l|`. An on-off detector only
//! separates `Π_0` from `Π_s = I - Π_0`. All elements are stored as their
//! diagonals, truncated at the space cutoff.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::Serialize;

use crate::circuits::bell_splitter;
use crate::error::{Error, Result};
use crate::fock::{partial_trace, tensor, DensityOperator, FockSpace, ModeTransform};
use crate::tolerance::TOL;

/// Photodetector with quantum efficiency `eta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorModel {
    eta: f64,
}

impl DetectorModel {
    pub fn new(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter(format!("efficiency {eta} outside [0, 1]")));
        }
        Ok(DetectorModel { eta })
    }

    pub fn ideal() -> Self {
        DetectorModel { eta: 1.0 }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorKind {
    NumberResolving,
    OnOff,
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetectorKind::NumberResolving => "number-resolving",
            DetectorKind::OnOff => "on-off",
        })
    }
}

impl FromStr for DetectorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "number-resolving" | "nr" | "pnr" => Ok(DetectorKind::NumberResolving),
            "onoff" | "on-off" => Ok(DetectorKind::OnOff),
            other => Err(Error::InvalidParameter(format!("unknown detector kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Count(usize),
    Off,
    On,
}

impl Outcome {
    /// Number reported to the experimenter: the count, or 0/1 for off/on.
    pub fn value(&self) -> f64 {
        match *self {
            Outcome::Count(k) => k as f64,
            Outcome::Off => 0.0,
            Outcome::On => 1.0,
        }
    }
}

/// Single-mode POVM element, diagonal in the photon-number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    outcome: Outcome,
    weights: Vec<f64>,
}

impl PovmElement {
    /// Identity element (an unmeasured mode) up to `cutoff` photons.
    pub fn identity(cutoff: usize) -> Self {
        PovmElement { outcome: Outcome::On, weights: vec![1.0; cutoff + 1] }
    }

    pub fn outcome(&self) -> Outcome {
        self.outcome
    }

    /// `<n|Π|n>` for `n = 0..=cutoff`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, n: usize) -> f64 {
        self.weights.get(n).copied().unwrap_or(0.0)
    }

    pub fn cutoff(&self) -> usize {
        self.weights.len() - 1
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64)
}

/// `Π_k` truncated at `cutoff`.
pub fn povm_number(k: usize, det: DetectorModel, cutoff: usize) -> Result<PovmElement> {
    if k > cutoff {
        return Err(Error::InvalidParameter(format!("outcome {k} exceeds the cutoff {cutoff}")));
    }
    let eta = det.eta;
    let weights = (0..=cutoff)
        .map(|l| {
            if l < k {
                0.0
            } else {
                binomial(l, k) * eta.powi(k as i32) * (1.0 - eta).powi((l - k) as i32)
            }
        })
        .collect();
    Ok(PovmElement { outcome: Outcome::Count(k), weights })
}

/// `Π_0` for `on == false`, `Π_s = I - Π_0` for `on == true`.
pub fn povm_onoff(on: bool, det: DetectorModel, cutoff: usize) -> PovmElement {
    let off: Vec<f64> = (0..=cutoff).map(|l| (1.0 - det.eta).powi(l as i32)).collect();
    if on {
        PovmElement { outcome: Outcome::On, weights: off.iter().map(|w| 1.0 - w).collect() }
    } else {
        PovmElement { outcome: Outcome::Off, weights: off }
    }
}

/// Complete outcome set of one detector.
pub fn povm_family(kind: DetectorKind, det: DetectorModel, cutoff: usize) -> Vec<PovmElement> {
    match kind {
        DetectorKind::NumberResolving => (0..=cutoff)
            .map(|k| povm_number(k, det, cutoff).expect("k <= cutoff"))
            .collect(),
        DetectorKind::OnOff => vec![povm_onoff(false, det, cutoff), povm_onoff(true, det, cutoff)],
    }
}

/// Post-selects `rho` on the given detector outcomes and traces the measured
/// modes out: returns `tr_measured(√Π ρ √Π)`, unnormalized, whose trace is
/// the outcome probability. Remaining modes keep their relative order. When
/// every mode is measured the result lives on the zero-mode space and its
/// single entry is the probability.
pub fn condition(rho: &DensityOperator, assignments: &[(usize, &PovmElement)]) -> Result<DensityOperator> {
    let space = rho.space();
    let n = space.num_modes();
    let mut roots: Vec<Option<Vec<f64>>> = vec![None; n];
    for &(mode, el) in assignments {
        space.check_mode(mode)?;
        if roots[mode].is_some() {
            return Err(Error::InvalidModes(format!("mode {mode} assigned two outcomes")));
        }
        if el.weights.len() < space.cutoff() + 1 {
            return Err(Error::DimensionMismatch { expected: space.cutoff() + 1, found: el.weights.len() });
        }
        if el.weights.iter().any(|w| !(-TOL.trace..=1.0 + TOL.trace).contains(w)) {
            return Err(Error::InvalidOperator("POVM element is not between 0 and I".into()));
        }
        roots[mode] = Some(el.weights.iter().map(|w| w.max(0.0).sqrt()).collect());
    }
    let scale: Vec<f64> = space
        .basis()
        .iter()
        .map(|occ| {
            roots
                .iter()
                .enumerate()
                .filter_map(|(m, r)| r.as_ref().map(|r| r[occ.get(m)]))
                .product()
        })
        .collect();
    let m = rho.matrix();
    let dim = space.dim();
    let projected = DMatrix::from_fn(dim, dim, |r, c| m[(r, c)] * (scale[r] * scale[c]));
    let keep: Vec<usize> = (0..n).filter(|&k| roots[k].is_none()).collect();
    let env: Vec<usize> = (0..n).filter(|&k| roots[k].is_some()).collect();
    let reduced = FockSpace::new(keep.len(), space.cutoff());
    let branch = rho.with_matrix(projected).into_branch();
    let matrix = crate::fock::density_trace_matrix(&branch, &keep, &env, &reduced);
    DensityOperator::from_parts(reduced, matrix, false)
}

/// Measured second moments of the two-mode witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossyMoments {
    /// `(ΔJ_x)²` as observed.
    pub var_jx: f64,
    /// `(ΔJ_y)²` as observed.
    pub var_jy: f64,
    /// `<N_+>` as observed.
    pub n_plus: f64,
}

/// Statistics of the photon counts `n_c`, `n_d` at the two interferometer
/// outputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountStatistics {
    pub mean_diff: f64,
    pub mean_diff_sq: f64,
    pub mean_total: f64,
}

impl CountStatistics {
    pub fn diff_variance(&self) -> f64 {
        self.mean_diff_sq - self.mean_diff * self.mean_diff
    }

    /// Ideal-detector statistics read off the diagonal of a two-mode state.
    pub fn ideal(out: &DensityOperator) -> Self {
        let mut s = CountStatistics { mean_diff: 0.0, mean_diff_sq: 0.0, mean_total: 0.0 };
        for (k, occ) in out.space().basis().iter().enumerate() {
            let p = out.matrix()[(k, k)].re;
            let d = occ.get(0) as f64 - occ.get(1) as f64;
            s.mean_diff += p * d;
            s.mean_diff_sq += p * d * d;
            s.mean_total += p * occ.total() as f64;
        }
        s
    }
}

/// Interferometer phase for reading out `J_x`.
pub const PHASE_JX: f64 = 0.0;
/// Interferometer phase for reading out `J_y`.
pub const PHASE_JY: f64 = FRAC_PI_2;

/// Two-mode interferometer: phase shifter `phase` on mode 1, then a 50:50
/// splitter. The output count difference `n_c - n_d` equals `2 J_x` at phase
/// 0 and `2 J_y` at phase π/2.
pub fn interferometer_output(rho2: &DensityOperator, phase: f64) -> Result<DensityOperator> {
    if rho2.num_modes() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: rho2.num_modes() });
    }
    rho2.apply_phase(1, phase)?.apply_two_mode_unitary((0, 1), &bell_splitter(FRAC_PI_4))
}

fn require_normalized_pair(rho2: &DensityOperator) -> Result<()> {
    if rho2.num_modes() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: rho2.num_modes() });
    }
    let tr = rho2.trace();
    if !rho2.is_normalized() || (tr - 1.0).abs() > TOL.trace {
        return Err(Error::NotNormalized(tr));
    }
    Ok(())
}

/// Ideal moments `((ΔJ_x)², (ΔJ_y)², <N_+>)` read from the interferometer.
pub fn ideal_moments(rho2: &DensityOperator) -> Result<LossyMoments> {
    require_normalized_pair(rho2)?;
    let x = CountStatistics::ideal(&interferometer_output(rho2, PHASE_JX)?);
    let y = CountStatistics::ideal(&interferometer_output(rho2, PHASE_JY)?);
    Ok(LossyMoments {
        var_jx: x.diff_variance() / 4.0,
        var_jy: y.diff_variance() / 4.0,
        n_plus: x.mean_total,
    })
}

/// Moments seen through detectors of efficiency η:
/// `4(ΔJ_η)² = η²·4(ΔJ)² + η(1-η)<N_+>` and `<N_+,η> = η<N_+>`.
pub fn lossy_moments(rho2: &DensityOperator, det: DetectorModel) -> Result<LossyMoments> {
    let ideal = ideal_moments(rho2)?;
    let eta = det.eta;
    let shot = eta * (1.0 - eta) * ideal.n_plus;
    Ok(LossyMoments {
        var_jx: (eta * eta * 4.0 * ideal.var_jx + shot) / 4.0,
        var_jy: (eta * eta * 4.0 * ideal.var_jy + shot) / 4.0,
        n_plus: eta * ideal.n_plus,
    })
}

/// Loss modelled explicitly: each output mode passes a splitter of
/// transmittance η whose other port is vacuum, `c_η = √η c + √(1-η) v`,
/// before ideal counting.
pub fn lossy_moments_ancilla(rho2: &DensityOperator, det: DetectorModel) -> Result<LossyMoments> {
    require_normalized_pair(rho2)?;
    let t = det.eta.sqrt();
    let r = (1.0 - det.eta).sqrt();
    let loss = Matrix2::new(
        Complex64::new(t, 0.0),
        Complex64::new(r, 0.0),
        Complex64::new(-r, 0.0),
        Complex64::new(t, 0.0),
    );
    let ancillas = DensityOperator::vacuum(&FockSpace::new(2, rho2.space().cutoff()));
    let stats = |phase: f64| -> Result<CountStatistics> {
        let out = interferometer_output(rho2, phase)?;
        let lossy = tensor(&out, &ancillas)?
            .apply_two_mode_unitary((0, 2), &loss)?
            .apply_two_mode_unitary((1, 3), &loss)?;
        Ok(CountStatistics::ideal(&partial_trace(&lossy, &[0, 1])?))
    };
    let x = stats(PHASE_JX)?;
    let y = stats(PHASE_JY)?;
    Ok(LossyMoments {
        var_jx: x.diff_variance() / 4.0,
        var_jy: y.diff_variance() / 4.0,
        n_plus: x.mean_total,
    })
}

/// Count statistics of POVM outcomes at the interferometer output.
pub fn detected_statistics(out: &DensityOperator, det: DetectorModel, kind: DetectorKind) -> Result<CountStatistics> {
    let family = povm_family(kind, det, out.space().cutoff());
    let mut s = CountStatistics { mean_diff: 0.0, mean_diff_sq: 0.0, mean_total: 0.0 };
    for ec in &family {
        for ed in &family {
            let p = condition(out, &[(0, ec), (1, ed)])?.trace();
            let (vc, vd) = (ec.outcome.value(), ed.outcome.value());
            s.mean_diff += p * (vc - vd);
            s.mean_diff_sq += p * (vc - vd) * (vc - vd);
            s.mean_total += p * (vc + vd);
        }
    }
    Ok(s)
}

/// Witness moments built from simulated detector clicks with the given
/// detector back-end.
pub fn detected_moments(rho2: &DensityOperator, det: DetectorModel, kind: DetectorKind) -> Result<LossyMoments> {
    require_normalized_pair(rho2)?;
    let x = detected_statistics(&interferometer_output(rho2, PHASE_JX)?, det, kind)?;
    let y = detected_statistics(&interferometer_output(rho2, PHASE_JY)?, det, kind)?;
    Ok(LossyMoments {
        var_jx: x.diff_variance() / 4.0,
        var_jy: y.diff_variance() / 4.0,
        n_plus: x.mean_total,
    })
}
