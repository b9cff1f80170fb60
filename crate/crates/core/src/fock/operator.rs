use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::basis::FockSpace;
use super::density::DensityOperator;
use crate::error::{Error, Result};

/// Linear operator on a truncated Fock space, in the space's basis ordering.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    space: FockSpace,
    matrix: DMatrix<Complex64>,
}

impl ModeOperator {
    pub fn new(space: FockSpace, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != space.dim() || matrix.ncols() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: matrix.nrows() });
        }
        Ok(ModeOperator { space, matrix })
    }

    pub fn identity(space: &FockSpace) -> Self {
        ModeOperator { space: space.clone(), matrix: DMatrix::identity(space.dim(), space.dim()) }
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Annihilation operator of `mode`, truncated to the space.
    pub fn annihilation(space: &FockSpace, mode: usize) -> Result<Self> {
        space.check_mode(mode)?;
        let mut matrix = DMatrix::zeros(space.dim(), space.dim());
        for (col, occ) in space.basis().iter().enumerate() {
            let n = occ.get(mode);
            if n > 0 {
                let row = space.index_of(&occ.with(mode, n - 1)).expect("lowering stays inside");
                matrix[(row, col)] = Complex64::new((n as f64).sqrt(), 0.0);
            }
        }
        Ok(ModeOperator { space: space.clone(), matrix })
    }

    /// Creation operator of `mode`; matrix elements leaving the space are dropped.
    pub fn creation(space: &FockSpace, mode: usize) -> Result<Self> {
        Ok(Self::annihilation(space, mode)?.adjoint())
    }

    pub fn number(space: &FockSpace, mode: usize) -> Result<Self> {
        space.check_mode(mode)?;
        let diag = space.basis().iter().map(|o| Complex64::new(o.get(mode) as f64, 0.0));
        let matrix = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(space.dim(), diag));
        Ok(ModeOperator { space: space.clone(), matrix })
    }

    /// Photon hopping `a_to^dagger a_from`. Number conserving, hence exact in
    /// any total-photon truncation.
    pub fn hopping(space: &FockSpace, to: usize, from: usize) -> Result<Self> {
        if to == from {
            return Self::number(space, to);
        }
        space.check_mode(to)?;
        space.check_mode(from)?;
        let mut matrix = DMatrix::zeros(space.dim(), space.dim());
        for (col, occ) in space.basis().iter().enumerate() {
            let nf = occ.get(from);
            if nf == 0 {
                continue;
            }
            let nt = occ.get(to);
            let target = occ.with(from, nf - 1).with(to, nt + 1);
            let row = space.index_of(&target).expect("hopping conserves photon number");
            matrix[(row, col)] = Complex64::new(((nf * (nt + 1)) as f64).sqrt(), 0.0);
        }
        Ok(ModeOperator { space: space.clone(), matrix })
    }

    /// `J_x = (a^dagger b + a b^dagger) / 2` for modes `a`, `b`.
    pub fn jx(space: &FockSpace, a: usize, b: usize) -> Result<Self> {
        let ab = Self::hopping(space, a, b)?;
        let ba = Self::hopping(space, b, a)?;
        Ok((&ab + &ba).scale(Complex64::new(0.5, 0.0)))
    }

    /// `J_y = (a^dagger b - a b^dagger) / 2i`.
    pub fn jy(space: &FockSpace, a: usize, b: usize) -> Result<Self> {
        let ab = Self::hopping(space, a, b)?;
        let ba = Self::hopping(space, b, a)?;
        Ok((&ab - &ba).scale(Complex64::new(0.0, -0.5)))
    }

    /// `J_z = (a^dagger a - b^dagger b) / 2`.
    pub fn jz(space: &FockSpace, a: usize, b: usize) -> Result<Self> {
        let na = Self::number(space, a)?;
        let nb = Self::number(space, b)?;
        Ok((&na - &nb).scale(Complex64::new(0.5, 0.0)))
    }

    /// `N_+ = a^dagger a + b^dagger b`.
    pub fn n_plus(space: &FockSpace, a: usize, b: usize) -> Result<Self> {
        Ok(&Self::number(space, a)? + &Self::number(space, b)?)
    }

    pub fn adjoint(&self) -> Self {
        ModeOperator { space: self.space.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        ModeOperator { space: self.space.clone(), matrix: &self.matrix * z }
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &ModeOperator) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.matrix - self.matrix.adjoint()).iter().all(|z| z.norm() <= tol)
    }
}

impl Add for &ModeOperator {
    type Output = ModeOperator;
    fn add(self, rhs: &ModeOperator) -> ModeOperator {
        ModeOperator { space: self.space.clone(), matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub for &ModeOperator {
    type Output = ModeOperator;
    fn sub(self, rhs: &ModeOperator) -> ModeOperator {
        ModeOperator { space: self.space.clone(), matrix: &self.matrix - &rhs.matrix }
    }
}

impl Mul for &ModeOperator {
    type Output = ModeOperator;
    fn mul(self, rhs: &ModeOperator) -> ModeOperator {
        ModeOperator { space: self.space.clone(), matrix: &self.matrix * &rhs.matrix }
    }
}

/// `tr(rho op)`.
pub fn expectation(rho: &DensityOperator, op: &ModeOperator) -> Result<Complex64> {
    if rho.space() != op.space() {
        return Err(Error::DimensionMismatch { expected: rho.space().dim(), found: op.space().dim() });
    }
    let m = rho.matrix();
    let dim = m.nrows();
    let mut acc = Complex64::default();
    for r in 0..dim {
        for c in 0..dim {
            acc += m[(r, c)] * op.matrix[(c, r)];
        }
    }
    Ok(acc)
}

/// `<op^2> - <op>^2` for Hermitian `op`.
pub fn variance(rho: &DensityOperator, op: &ModeOperator) -> Result<f64> {
    let mean = expectation(rho, op)?.re;
    let sq = expectation(rho, &(op * op))?.re;
    Ok(sq - mean * mean)
}
