use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;

use super::basis::{FockSpace, Occupation};
use crate::error::{Error, Result};
use crate::tolerance::TOL;

/// Sparse pure state: occupation tuple -> amplitude.
///
/// A state whose norm is below one is only legal as an explicitly flagged
/// post-selected branch.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_modes: usize,
    amplitudes: BTreeMap<Occupation, Complex64>,
    branch: bool,
}

impl PureState {
    /// Builds a normalized state. Zero amplitudes are dropped.
    pub fn new(
        num_modes: usize,
        amplitudes: impl IntoIterator<Item = (Occupation, Complex64)>,
    ) -> Result<Self> {
        let state = Self::collect(num_modes, amplitudes, false)?;
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > TOL.norm {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Builds a post-selected branch with norm² in (0, 1].
    pub fn branch(
        num_modes: usize,
        amplitudes: impl IntoIterator<Item = (Occupation, Complex64)>,
    ) -> Result<Self> {
        let state = Self::collect(num_modes, amplitudes, true)?;
        let norm = state.norm_sqr();
        if norm <= 0.0 || norm > 1.0 + TOL.norm {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    fn collect(
        num_modes: usize,
        amplitudes: impl IntoIterator<Item = (Occupation, Complex64)>,
        branch: bool,
    ) -> Result<Self> {
        let mut map: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        for (occ, amp) in amplitudes {
            if occ.num_modes() != num_modes {
                return Err(Error::DimensionMismatch { expected: num_modes, found: occ.num_modes() });
            }
            *map.entry(occ).or_default() += amp;
        }
        map.retain(|_, a| a.norm_sqr() > 0.0);
        Ok(PureState { num_modes, amplitudes: map, branch })
    }

    pub(crate) fn from_map_unchecked(
        num_modes: usize,
        amplitudes: BTreeMap<Occupation, Complex64>,
        branch: bool,
    ) -> Self {
        PureState { num_modes, amplitudes, branch }
    }

    pub fn vacuum(num_modes: usize) -> Self {
        Self::fock(Occupation::vacuum(num_modes))
    }

    /// The number state `occ`.
    pub fn fock(occ: Occupation) -> Self {
        let num_modes = occ.num_modes();
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(occ, Complex64::new(1.0, 0.0));
        PureState { num_modes, amplitudes, branch: false }
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn is_branch(&self) -> bool {
        self.branch
    }

    pub fn amplitude(&self, occ: &Occupation) -> Complex64 {
        self.amplitudes.get(occ).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    /// Largest total photon number carried with nonzero amplitude.
    pub fn max_photons(&self) -> usize {
        self.amplitudes.keys().map(Occupation::total).max().unwrap_or(0)
    }

    /// Dense amplitude vector in `space`'s basis ordering.
    pub fn to_vector(&self, space: &FockSpace) -> Result<DVector<Complex64>> {
        if space.num_modes() != self.num_modes {
            return Err(Error::DimensionMismatch { expected: space.num_modes(), found: self.num_modes });
        }
        let mut v = DVector::zeros(space.dim());
        for (occ, amp) in &self.amplitudes {
            let k = space.index_of(occ).ok_or_else(|| Error::CutoffOverflow {
                cutoff: space.cutoff(),
                detail: format!("basis state {occ} is outside the space"),
            })?;
            v[k] = *amp;
        }
        Ok(v)
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.num_modes != other.num_modes {
            return Err(Error::DimensionMismatch { expected: self.num_modes, found: other.num_modes });
        }
        Ok(self
            .amplitudes
            .iter()
            .map(|(occ, a)| a.conj() * other.amplitude(occ))
            .sum())
    }
}
