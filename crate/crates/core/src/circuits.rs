//! W-state preparation with a chain of beam splitters.
//!
//! A single photon enters mode 0. Splitter `j` mixes the adjacent modes
//! `(j, j + 1)` with the Heisenberg matrix
//!
//! ```text
//! [ sin θ_j   -cos θ_j ]
//! [ cos θ_j    sin θ_j ]
//! ```
//!
//! and an optional phase shifter `e^{-i φ_j}` follows each output. Under the
//! convention of [`crate::fock::MixingConvention::Heisenberg`] the output
//! amplitudes are exactly
//! `α_j = (Π_{i<j} cos θ_i) sin θ_j e^{-i φ_j}` and
//! `α_N = (Π_{i<N} cos θ_i) e^{-i φ_N}`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{MixingConvention, ModeTransform, Occupation, PureState};
use crate::tolerance::TOL;

/// Amplitudes `α_1..α_N` of `Σ α_j |0..1_j..0>`.
#[derive(Debug, Clone, PartialEq)]
pub struct WCoefficients {
    alphas: Vec<Complex64>,
}

impl WCoefficients {
    pub fn new(alphas: Vec<Complex64>) -> Result<Self> {
        if alphas.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "a W state needs at least two modes, got {}",
                alphas.len()
            )));
        }
        if alphas.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        let norm: f64 = alphas.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > TOL.norm {
            return Err(Error::NotNormalized(norm));
        }
        Ok(WCoefficients { alphas })
    }

    pub fn from_real(alphas: &[f64]) -> Result<Self> {
        Self::new(alphas.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// `α_j = 1/√N` for every mode.
    pub fn symmetric(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("symmetric W needs N >= 2, got {n}")));
        }
        let a = 1.0 / (n as f64).sqrt();
        Self::new(vec![Complex64::new(a, 0.0); n])
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    pub fn num_modes(&self) -> usize {
        self.alphas.len()
    }

    /// The W state as a sparse pure state.
    pub fn to_state(&self) -> PureState {
        let n = self.num_modes();
        PureState::new(
            n,
            self.alphas.iter().enumerate().map(|(j, &a)| (Occupation::single(n, j), a)),
        )
        .expect("coefficients are normalized")
    }

    /// Largest entrywise distance to `other`.
    pub fn max_distance(&self, other: &WCoefficients) -> f64 {
        self.alphas
            .iter()
            .zip(&other.alphas)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Splitter angles `θ_1..θ_{N-1}` and optional output phases `φ_1..φ_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitterAngles {
    thetas: Vec<f64>,
    phis: Option<Vec<f64>>,
}

impl SplitterAngles {
    pub fn new(thetas: Vec<f64>, phis: Option<Vec<f64>>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::InvalidParameter("at least one splitter angle is required".into()));
        }
        for &t in &thetas {
            if !(t >= -TOL.angle && t <= FRAC_PI_2 + TOL.angle) {
                return Err(Error::InvalidParameter(format!("splitter angle {t} outside [0, π/2]")));
            }
        }
        if let Some(p) = &phis {
            if p.len() != thetas.len() + 1 {
                return Err(Error::InvalidParameter(format!(
                    "expected {} phases, got {}",
                    thetas.len() + 1,
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter("non-finite phase".into()));
            }
        }
        Ok(SplitterAngles { thetas, phis })
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> Option<&[f64]> {
        self.phis.as_deref()
    }

    pub fn num_modes(&self) -> usize {
        self.thetas.len() + 1
    }
}

/// Closed-form output amplitudes of the splitter chain.
pub fn coefficients_from_angles(angles: &SplitterAngles) -> WCoefficients {
    let n = angles.num_modes();
    let mut alphas = Vec::with_capacity(n);
    let mut prefix = 1.0;
    for &t in &angles.thetas {
        alphas.push(Complex64::new(prefix * t.sin(), 0.0));
        prefix *= t.cos();
    }
    alphas.push(Complex64::new(prefix, 0.0));
    if let Some(phis) = &angles.phis {
        for (a, &phi) in alphas.iter_mut().zip(phis) {
            *a *= Complex64::from_polar(1.0, -phi);
        }
    }
    WCoefficients { alphas }
}

/// Inverse of [`coefficients_from_angles`].
///
/// `θ_j = atan2(|α_j|, sqrt(Σ_{k>j} |α_k|²))`. Once the remaining tail has
/// vanished every later angle is set to zero. Phases are `φ_j = -arg α_j`
/// (zero for vanishing coefficients).
pub fn angles_from_coefficients(w: &WCoefficients) -> SplitterAngles {
    let moduli: Vec<f64> = w.alphas.iter().map(|a| a.norm()).collect();
    let n = moduli.len();
    let mut tails = vec![0.0; n + 1];
    for j in (0..n).rev() {
        tails[j] = tails[j + 1] + moduli[j] * moduli[j];
    }
    let thetas = (0..n - 1)
        .map(|j| if tails[j] == 0.0 { 0.0 } else { moduli[j].atan2(tails[j + 1].sqrt()) })
        .collect();
    let phis: Vec<f64> = w
        .alphas
        .iter()
        .map(|a| if a.norm_sqr() == 0.0 { 0.0 } else { -a.arg() })
        .collect();
    let phis = if phis.iter().all(|&p| p == 0.0) { None } else { Some(phis) };
    SplitterAngles { thetas, phis }
}

/// Angles producing `α_j = 1/√N`: `sin θ_j = 1/√(N - j + 1)` for `j = 1..N-1`.
pub fn symmetric_angles(n: usize) -> Result<SplitterAngles> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("symmetric W needs N >= 2, got {n}")));
    }
    let thetas = (1..n).map(|j| (1.0 / ((n - j + 1) as f64).sqrt()).asin()).collect();
    Ok(SplitterAngles { thetas, phis: None })
}

/// Heisenberg matrix of the chain splitter acting on modes `(j, j + 1)`.
pub fn chain_splitter(theta: f64) -> Matrix2<Complex64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(
        Complex64::new(s, 0.0),
        Complex64::new(-c, 0.0),
        Complex64::new(c, 0.0),
        Complex64::new(s, 0.0),
    )
}

/// Heisenberg matrix of the Bell-measurement splitter mapping modes
/// `(u, a)` to `(c, d)`: `[[cos θ, sin θ], [-sin θ, cos θ]]`.
pub fn bell_splitter(theta: f64) -> Matrix2<Complex64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(
        Complex64::new(c, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(c, 0.0),
    )
}

/// Simulates the splitter chain on `|1, 0, ..., 0>`.
pub fn generate_w(angles: &SplitterAngles) -> PureState {
    generate_w_with(angles, MixingConvention::Heisenberg)
}

pub fn generate_w_with(angles: &SplitterAngles, convention: MixingConvention) -> PureState {
    let n = angles.num_modes();
    let mut state = PureState::fock(Occupation::single(n, 0));
    for (j, &t) in angles.thetas.iter().enumerate() {
        state = state
            .apply_two_mode_unitary_with((j, j + 1), &chain_splitter(t), convention)
            .expect("rotation on adjacent modes");
    }
    if let Some(phis) = &angles.phis {
        for (j, &phi) in phis.iter().enumerate() {
            state = state.apply_phase(j, phi).expect("mode in range");
        }
    }
    state
}
