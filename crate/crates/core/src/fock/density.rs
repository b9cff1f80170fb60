use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::basis::{FockSpace, Occupation};
use super::state::PureState;
use crate::error::{Error, Result};
use crate::tolerance::TOL;

/// Hermitian, positive semidefinite operator on a truncated Fock space.
///
/// Post-selected branches are carried unnormalized: their trace is the
/// probability of the branch. `normalized` records whether unit trace is an
/// invariant of this value.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    space: FockSpace,
    matrix: DMatrix<Complex64>,
    normalized: bool,
}

impl DensityOperator {
    /// Validates Hermiticity, positivity and the trace bound.
    pub fn new(space: FockSpace, matrix: DMatrix<Complex64>, normalized: bool) -> Result<Self> {
        let rho = Self::from_parts(space, matrix, normalized)?;
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_parts(
        space: FockSpace,
        matrix: DMatrix<Complex64>,
        normalized: bool,
    ) -> Result<Self> {
        let dim = space.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: matrix.nrows() });
        }
        Ok(DensityOperator { space, matrix, normalized })
    }

    /// `|psi><psi|`; flagged normalized unless `psi` is a post-selected branch.
    pub fn from_pure(psi: &PureState, space: &FockSpace) -> Result<Self> {
        let v = psi.to_vector(space)?;
        let matrix = &v * v.adjoint();
        Ok(DensityOperator { space: space.clone(), matrix, normalized: !psi.is_branch() })
    }

    pub fn vacuum(space: &FockSpace) -> Self {
        Self::from_pure(&PureState::vacuum(space.num_modes()), space)
            .expect("vacuum belongs to every space")
    }

    /// Weighted sum of operators on a common space. The result is normalized
    /// only if the weights of normalized components sum to one.
    pub fn mixture(components: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?
            .1;
        let space = first.space.clone();
        let mut matrix = DMatrix::zeros(space.dim(), space.dim());
        for (w, rho) in components {
            if rho.space != space {
                return Err(Error::DimensionMismatch { expected: space.dim(), found: rho.space.dim() });
            }
            if *w < 0.0 {
                return Err(Error::InvalidParameter(format!("negative mixture weight {w}")));
            }
            matrix += &rho.matrix * Complex64::new(*w, 0.0);
        }
        let out = DensityOperator { space, matrix, normalized: false };
        let normalized = (out.trace() - 1.0).abs() <= TOL.trace;
        Ok(DensityOperator { normalized, ..out })
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn num_modes(&self) -> usize {
        self.space.num_modes()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Matrix element `<row|rho|col>` by occupation; zero outside the space.
    pub fn element(&self, row: &Occupation, col: &Occupation) -> Complex64 {
        match (self.space.index_of(row), self.space.index_of(col)) {
            (Some(r), Some(c)) => self.matrix[(r, c)],
            _ => Complex64::default(),
        }
    }

    /// Copy rescaled to unit trace.
    pub fn normalize(&self) -> Result<Self> {
        let tr = self.trace();
        if tr <= 0.0 {
            return Err(Error::NotNormalized(tr));
        }
        Ok(DensityOperator {
            space: self.space.clone(),
            matrix: &self.matrix / Complex64::new(tr, 0.0),
            normalized: true,
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        let diff = &self.matrix - self.matrix.adjoint();
        diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        let defect = self.max_hermiticity_defect();
        if defect > TOL.hermitian {
            return Err(Error::InvalidOperator(format!("not Hermitian (defect {defect:e})")));
        }
        let tr = self.trace();
        if tr > 1.0 + TOL.trace || (self.normalized && (tr - 1.0).abs() > TOL.trace) {
            return Err(Error::NotNormalized(tr));
        }
        let lowest = self.min_eigenvalue();
        if lowest < TOL.psd {
            return Err(Error::InvalidOperator(format!("negative eigenvalue {lowest:e}")));
        }
        Ok(())
    }

    /// Same operator expressed in another ordering of the same space.
    pub fn reorder(&self, target: &FockSpace) -> Result<Self> {
        if target.num_modes() != self.num_modes() || target.cutoff() != self.space.cutoff() {
            return Err(Error::DimensionMismatch { expected: self.space.dim(), found: target.dim() });
        }
        let map: Vec<usize> = target
            .basis()
            .iter()
            .map(|o| self.space.index_of(o).expect("same space"))
            .collect();
        let dim = target.dim();
        let matrix = DMatrix::from_fn(dim, dim, |r, c| self.matrix[(map[r], map[c])]);
        Ok(DensityOperator { space: target.clone(), matrix, normalized: self.normalized })
    }

    pub(crate) fn with_matrix(&self, matrix: DMatrix<Complex64>) -> Self {
        DensityOperator { space: self.space.clone(), matrix, normalized: self.normalized }
    }

    pub(crate) fn into_branch(self) -> Self {
        DensityOperator { normalized: false, ..self }
    }
}

/// `a ⊗ b` on the concatenated modes. The cutoff of the result is the larger
/// of the two cutoffs; any population that would exceed it is an error.
pub fn tensor(a: &DensityOperator, b: &DensityOperator) -> Result<DensityOperator> {
    let cutoff = a.space.cutoff().max(b.space.cutoff());
    let space = FockSpace::new(a.num_modes() + b.num_modes(), cutoff);
    let mut placement: Vec<(usize, usize, usize)> = Vec::new();
    for (ia, oa) in a.space.basis().iter().enumerate() {
        for (ib, ob) in b.space.basis().iter().enumerate() {
            match space.index_of(&oa.concat(ob)) {
                Some(k) => placement.push((ia, ib, k)),
                None => {
                    let weight = a.matrix[(ia, ia)].re * b.matrix[(ib, ib)].re;
                    if weight > TOL.overflow_weight {
                        return Err(Error::CutoffOverflow {
                            cutoff,
                            detail: format!("{oa} ⊗ {ob} carries weight {weight:e}"),
                        });
                    }
                }
            }
        }
    }
    let mut matrix = DMatrix::zeros(space.dim(), space.dim());
    for &(ia, ib, r) in &placement {
        for &(ja, jb, c) in &placement {
            matrix[(r, c)] = a.matrix[(ia, ja)] * b.matrix[(ib, jb)];
        }
    }
    Ok(DensityOperator { space, matrix, normalized: a.normalized && b.normalized })
}

/// Traces out every mode not listed in `keep`. Kept modes appear in the
/// result in the order given.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    if keep.is_empty() {
        return Err(Error::InvalidModes("partial trace must keep at least one mode".into()));
    }
    let n = rho.num_modes();
    let mut seen = vec![false; n];
    for &m in keep {
        rho.space.check_mode(m)?;
        if seen[m] {
            return Err(Error::InvalidModes(format!("mode {m} listed twice")));
        }
        seen[m] = true;
    }
    let env: Vec<usize> = (0..n).filter(|m| !seen[*m]).collect();
    let reduced = FockSpace::new(keep.len(), rho.space.cutoff());
    Ok(DensityOperator {
        matrix: trace_matrix(rho, keep, &env, &reduced),
        space: reduced,
        normalized: rho.normalized,
    })
}

pub(crate) fn trace_matrix(
    rho: &DensityOperator,
    keep: &[usize],
    env: &[usize],
    reduced: &FockSpace,
) -> DMatrix<Complex64> {
    // Ordered map: summation order, and so the last bits, must not vary between runs.
    let mut groups: BTreeMap<Occupation, Vec<(usize, usize)>> = BTreeMap::new();
    for (k, occ) in rho.space.basis().iter().enumerate() {
        let kept = reduced.index_of(&occ.select(keep)).expect("sub-tuple respects cutoff");
        groups.entry(occ.select(env)).or_default().push((kept, k));
    }
    let mut out = DMatrix::zeros(reduced.dim(), reduced.dim());
    for members in groups.values() {
        for &(r, fr) in members {
            for &(c, fc) in members {
                out[(r, c)] += rho.matrix[(fr, fc)];
            }
        }
    }
    out
}

/// `<psi|rho|psi>` for a normalized `psi`.
pub fn overlap_fidelity(rho: &DensityOperator, psi: &PureState) -> Result<f64> {
    if psi.num_modes() != rho.num_modes() {
        return Err(Error::DimensionMismatch { expected: rho.num_modes(), found: psi.num_modes() });
    }
    let norm = psi.norm_sqr();
    if (norm - 1.0).abs() > TOL.norm {
        return Err(Error::NotNormalized(norm));
    }
    let v = psi.to_vector(&rho.space)?;
    Ok((v.adjoint() * &rho.matrix * &v)[(0, 0)].re)
}
