//! Numerical tolerances shared by every module.

/// Tolerance record. Every comparison against a physical invariant goes
/// through one of these fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Entrywise Hermiticity of density operators.
    pub hermitian: f64,
    /// Lowest admissible eigenvalue of a density operator.
    pub psd: f64,
    /// Trace bounds (`trace <= 1 + trace`, and `|trace - 1| <= trace` when normalized).
    pub trace: f64,
    /// Norm bound of pure states and W coefficient vectors.
    pub norm: f64,
    /// Max entrywise deviation of `U U^dagger` from the identity.
    pub unitary: f64,
    /// Probability weight below which a cutoff overflow is treated as absent.
    pub overflow_weight: f64,
    /// Strict margin below one for a witness ratio to count as a violation.
    pub violation: f64,
    /// Slack on splitter-angle ranges.
    pub angle: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-12,
        psd: -1e-10,
        trace: 1e-12,
        norm: 1e-12,
        unitary: 1e-12,
        overflow_weight: 1e-15,
        violation: 1e-12,
        angle: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

pub const TOL: Tolerances = Tolerances::DEFAULT;
