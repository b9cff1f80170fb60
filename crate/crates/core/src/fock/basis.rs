use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Photon numbers per mode, e.g. `|1, 0, 0>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occupation(Vec<u8>);

impl Occupation {
    pub fn new(counts: Vec<u8>) -> Self {
        Occupation(counts)
    }

    pub fn vacuum(num_modes: usize) -> Self {
        Occupation(vec![0; num_modes])
    }

    /// Single photon in `mode`, vacuum elsewhere.
    pub fn single(num_modes: usize, mode: usize) -> Self {
        let mut counts = vec![0; num_modes];
        counts[mode] = 1;
        Occupation(counts)
    }

    pub fn counts(&self) -> &[u8] {
        &self.0
    }

    pub fn num_modes(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, mode: usize) -> usize {
        self.0[mode] as usize
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&n| n as usize).sum()
    }

    pub(crate) fn with(&self, mode: usize, n: usize) -> Self {
        let mut counts = self.0.clone();
        counts[mode] = n as u8;
        Occupation(counts)
    }

    /// Projects onto the listed modes, in the listed order.
    pub(crate) fn select(&self, modes: &[usize]) -> Self {
        Occupation(modes.iter().map(|&m| self.0[m]).collect())
    }

    pub(crate) fn concat(&self, other: &Occupation) -> Self {
        let mut counts = self.0.clone();
        counts.extend_from_slice(&other.0);
        Occupation(counts)
    }
}

impl From<Vec<u8>> for Occupation {
    fn from(counts: Vec<u8>) -> Self {
        Occupation(counts)
    }
}

impl From<&[u8]> for Occupation {
    fn from(counts: &[u8]) -> Self {
        Occupation(counts.to_vec())
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (k, n) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ">")
    }
}

/// All occupation tuples on `num_modes` modes with at most `total_cutoff`
/// photons, in graded lexicographic order: ascending total photon number,
/// then ascending lexicographic order on the counts.
pub fn canonical_basis(num_modes: usize, total_cutoff: usize) -> Vec<Occupation> {
    let mut out = Vec::new();
    let mut buf = vec![0u8; num_modes];
    for total in 0..=total_cutoff {
        compositions(&mut buf, 0, total, &mut out);
    }
    out
}

fn compositions(buf: &mut [u8], pos: usize, remaining: usize, out: &mut Vec<Occupation>) {
    if pos + 1 >= buf.len() {
        if let Some(last) = buf.last_mut() {
            *last = remaining as u8;
            out.push(Occupation(buf.to_vec()));
        } else if remaining == 0 {
            out.push(Occupation(Vec::new()));
        }
        return;
    }
    for n in 0..=remaining {
        buf[pos] = n as u8;
        compositions(buf, pos + 1, remaining - n, out);
    }
}

#[derive(Debug)]
struct SpaceInner {
    num_modes: usize,
    cutoff: usize,
    basis: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

/// A truncated multimode Fock space together with the ordering of its
/// basis. Cloning is cheap.
#[derive(Debug, Clone)]
pub struct FockSpace(Arc<SpaceInner>);

impl FockSpace {
    /// Space with the canonical (graded lexicographic) ordering.
    pub fn new(num_modes: usize, cutoff: usize) -> Self {
        Self::from_basis(num_modes, cutoff, canonical_basis(num_modes, cutoff))
    }

    fn from_basis(num_modes: usize, cutoff: usize, basis: Vec<Occupation>) -> Self {
        let index = basis.iter().cloned().enumerate().map(|(k, o)| (o, k)).collect();
        FockSpace(Arc::new(SpaceInner { num_modes, cutoff, basis, index }))
    }

    /// Same space with the basis reordered: entry `k` of the new ordering is
    /// entry `perm[k]` of the current one.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let dim = self.dim();
        if perm.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: perm.len() });
        }
        let mut seen = vec![false; dim];
        for &p in perm {
            if p >= dim || seen[p] {
                return Err(Error::InvalidParameter("not a permutation of the basis".into()));
            }
            seen[p] = true;
        }
        let basis = perm.iter().map(|&p| self.0.basis[p].clone()).collect();
        Ok(Self::from_basis(self.num_modes(), self.cutoff(), basis))
    }

    pub fn num_modes(&self) -> usize {
        self.0.num_modes
    }

    pub fn cutoff(&self) -> usize {
        self.0.cutoff
    }

    pub fn dim(&self) -> usize {
        self.0.basis.len()
    }

    pub fn basis(&self) -> &[Occupation] {
        &self.0.basis
    }

    pub fn occupation(&self, k: usize) -> &Occupation {
        &self.0.basis[k]
    }

    pub fn index_of(&self, occ: &Occupation) -> Option<usize> {
        self.0.index.get(occ).copied()
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.num_modes() {
            return Err(Error::ModeOutOfRange { mode, num_modes: self.num_modes() });
        }
        Ok(())
    }
}

impl PartialEq for FockSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.num_modes() == other.num_modes()
                && self.cutoff() == other.cutoff()
                && self.basis() == other.basis())
    }
}
