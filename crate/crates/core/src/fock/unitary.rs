//! Passive two-mode transformations and single-mode phase shifts.
//!
//! A 2x2 matrix `u` acting on modes `(i, j)` is read as a Heisenberg map on
//! annihilation operators,
//!
//! ```text
//! (a_i', a_j')^T = u (a_i, a_j)^T,
//! ```
//!
//! so that a creation operator of the input is carried to
//! `a_p^dagger -> sum_q u[q][p] a_q^dagger` (the transpose of `u` acts on
//! creation operators). With this reading the W-state splitter chain fed in
//! mode 0 produces the positive amplitudes `sin θ_1`, `cos θ_1 sin θ_2`, ...
//! with no sign bookkeeping. [`MixingConvention::Transposed`] applies `u`
//! itself to the creation operators instead; it exists to check that every
//! reported scalar is convention independent.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use super::basis::{FockSpace, Occupation};
use super::density::DensityOperator;
use super::state::PureState;
use crate::error::{Error, Result};
use crate::tolerance::TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MixingConvention {
    #[default]
    Heisenberg,
    Transposed,
}

impl MixingConvention {
    fn creation_map(self, u: &Matrix2<Complex64>) -> Matrix2<Complex64> {
        match self {
            MixingConvention::Heisenberg => *u,
            MixingConvention::Transposed => u.transpose(),
        }
    }
}

pub fn check_unitary(u: &Matrix2<Complex64>) -> Result<()> {
    let defect = (u * u.adjoint() - Matrix2::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if defect > TOL.unitary || !defect.is_finite() {
        return Err(Error::NotUnitary(defect));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, t| acc * t as f64)
}

/// Image of the number state `occ` under the two-mode map. `v` is the
/// matrix acting on creation operators (column p holds the image of
/// `a_p^dagger`).
fn pair_action(occ: &Occupation, i: usize, j: usize, v: &Matrix2<Complex64>) -> Vec<(Occupation, Complex64)> {
    let ni = occ.get(i);
    let nj = occ.get(j);
    let total = ni + nj;
    let mut coeff = vec![Complex64::default(); total + 1];
    for k in 0..=ni {
        let left = v[(0, 0)].powu(k as u32) * v[(1, 0)].powu((ni - k) as u32) * binomial(ni, k);
        for l in 0..=nj {
            let right = v[(0, 1)].powu(l as u32) * v[(1, 1)].powu((nj - l) as u32) * binomial(nj, l);
            coeff[k + l] += left * right;
        }
    }
    let norm_in = (factorial(ni) * factorial(nj)).sqrt();
    coeff
        .into_iter()
        .enumerate()
        .filter(|(_, c)| c.norm_sqr() > 0.0)
        .map(|(p, c)| {
            let q = total - p;
            let scale = (factorial(p) * factorial(q)).sqrt() / norm_in;
            (occ.with(i, p).with(j, q), c * scale)
        })
        .collect()
}

fn check_pair(num_modes: usize, i: usize, j: usize) -> Result<()> {
    for m in [i, j] {
        if m >= num_modes {
            return Err(Error::ModeOutOfRange { mode: m, num_modes });
        }
    }
    if i == j {
        return Err(Error::InvalidModes(format!("two-mode unitary needs distinct modes, got ({i}, {j})")));
    }
    Ok(())
}

/// A two-mode transformation expanded to a full matrix on one Fock space, for
/// repeated application.
#[derive(Debug, Clone)]
pub struct FockUnitary {
    space: FockSpace,
    matrix: DMatrix<Complex64>,
}

impl FockUnitary {
    pub fn two_mode(
        space: &FockSpace,
        modes: (usize, usize),
        u: &Matrix2<Complex64>,
        convention: MixingConvention,
    ) -> Result<Self> {
        check_unitary(u)?;
        check_pair(space.num_modes(), modes.0, modes.1)?;
        let v = convention.creation_map(u);
        let dim = space.dim();
        let mut matrix = DMatrix::zeros(dim, dim);
        for (col, occ) in space.basis().iter().enumerate() {
            for (out, amp) in pair_action(occ, modes.0, modes.1, &v) {
                let row = space.index_of(&out).expect("passive maps conserve photon number");
                matrix[(row, col)] += amp;
            }
        }
        Ok(FockUnitary { space: space.clone(), matrix })
    }

    /// Phase shifter `|n> -> e^{-i n phi} |n>` on `mode`.
    pub fn phase(space: &FockSpace, mode: usize, phi: f64) -> Result<Self> {
        space.check_mode(mode)?;
        let diag = space
            .basis()
            .iter()
            .map(|o| Complex64::from_polar(1.0, -(o.get(mode) as f64) * phi));
        let matrix = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(space.dim(), diag));
        Ok(FockUnitary { space: space.clone(), matrix })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `U rho U^dagger`.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        if rho.space() != &self.space {
            return Err(Error::DimensionMismatch { expected: self.space.dim(), found: rho.space().dim() });
        }
        Ok(rho.with_matrix(&self.matrix * rho.matrix() * self.matrix.adjoint()))
    }
}

/// States that passive linear optics can act on.
pub trait ModeTransform: Sized {
    fn apply_two_mode_unitary_with(
        &self,
        modes: (usize, usize),
        u: &Matrix2<Complex64>,
        convention: MixingConvention,
    ) -> Result<Self>;

    /// Phase shift `|n> -> e^{-i n phi}|n>` on one mode.
    fn apply_phase(&self, mode: usize, phi: f64) -> Result<Self>;

    fn apply_two_mode_unitary(&self, modes: (usize, usize), u: &Matrix2<Complex64>) -> Result<Self> {
        self.apply_two_mode_unitary_with(modes, u, MixingConvention::Heisenberg)
    }
}

impl ModeTransform for PureState {
    fn apply_two_mode_unitary_with(
        &self,
        modes: (usize, usize),
        u: &Matrix2<Complex64>,
        convention: MixingConvention,
    ) -> Result<Self> {
        check_unitary(u)?;
        check_pair(self.num_modes(), modes.0, modes.1)?;
        let v = convention.creation_map(u);
        let mut out: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        for (occ, amp) in self.iter() {
            for (target, c) in pair_action(occ, modes.0, modes.1, &v) {
                *out.entry(target).or_default() += amp * c;
            }
        }
        out.retain(|_, a| a.norm_sqr() > 1e-32);
        Ok(PureState::from_map_unchecked(self.num_modes(), out, self.is_branch()))
    }

    fn apply_phase(&self, mode: usize, phi: f64) -> Result<Self> {
        if mode >= self.num_modes() {
            return Err(Error::ModeOutOfRange { mode, num_modes: self.num_modes() });
        }
        let out = self
            .iter()
            .map(|(o, a)| (o.clone(), a * Complex64::from_polar(1.0, -(o.get(mode) as f64) * phi)))
            .collect();
        Ok(PureState::from_map_unchecked(self.num_modes(), out, self.is_branch()))
    }
}

impl ModeTransform for DensityOperator {
    fn apply_two_mode_unitary_with(
        &self,
        modes: (usize, usize),
        u: &Matrix2<Complex64>,
        convention: MixingConvention,
    ) -> Result<Self> {
        FockUnitary::two_mode(self.space(), modes, u, convention)?.apply(self)
    }

    fn apply_phase(&self, mode: usize, phi: f64) -> Result<Self> {
        FockUnitary::phase(self.space(), mode, phi)?.apply(self)
    }
}

/// Free-function form of [`ModeTransform::apply_two_mode_unitary`].
pub fn apply_two_mode_unitary<T: ModeTransform>(
    state: &T,
    modes: (usize, usize),
    u: &Matrix2<Complex64>,
) -> Result<T> {
    state.apply_two_mode_unitary(modes, u)
}
