//! One-dimensional maximization, root bracketing and Gauss–Legendre rules.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(x_max, f(x_max))` once the bracket is narrower than `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    // Endpoints are candidates too: the maximum of a monotone f sits there.
    [(a, f(a)), (b, f(b)), (x1, f1), (x2, f2)]
        .into_iter()
        .fold((lo, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
}

/// Maximum of a smooth `f` on `[lo, hi]`: a coarse grid picks the cell,
/// golden-section search narrows it, and an interior optimum is then
/// polished by bisecting the central-difference derivative. Comparing
/// function values alone cannot place a smooth maximum closer than about
/// `√ε`; the derivative sign can.
pub fn maximize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, grid_points: usize, tol: f64) -> (f64, f64) {
    let (x0, _) = grid_max(&f, lo, hi, grid_points);
    let h = (hi - lo) / (grid_points - 1) as f64;
    let (x, fx) = golden_section_max(&f, (x0 - h).max(lo), (x0 + h).min(hi), tol);
    let step = 1e-5 * (hi - lo);
    let reach = 1e-6 * (hi - lo);
    let (a, b) = (x - reach, x + reach);
    if a - step < lo || b + step > hi {
        return (x, fx);
    }
    let slope = |t: f64| f(t + step) - f(t - step);
    match bisect(slope, a, b, 1e-14 * (hi - lo)) {
        Ok(r) if f(r) >= fx - 4.0 * f64::EPSILON * fx.abs().max(1.0) => (r, f(r)),
        _ => (x, fx),
    }
}

/// Brute-force maximum of `f` over `points` equally spaced samples of `[lo, hi]`.
pub fn grid_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    let step = (hi - lo) / (points - 1) as f64;
    (0..points)
        .map(|k| {
            let x = lo + step * k as f64;
            (x, f(x))
        })
        .fold((lo, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
}

/// Bisection for a root of `f` on `[lo, hi]`, to a bracket width of `tol`.
/// An exact zero at either end is returned as is.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoBracket { lo, hi });
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_interior_and_boundary_maxima() {
        let (x, fx) = golden_section_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8 && fx.abs() < 1e-15);
        let (x, _) = golden_section_max(|x| x, 0.0, 1.0, 1e-10);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn maximize_locates_flat_optimum_precisely() {
        let (x, _) = maximize(|x| 1.0 - (x - 0.7).powi(2), 0.0, 2.0, 65, 1e-10);
        assert!((x - 0.7).abs() < 1e-10, "{x}");
        let (x, _) = maximize(|x| -x, 0.0, 2.0, 65, 1e-10);
        assert_eq!(x, 0.0);
    }

    #[test]
    fn bisection_on_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        assert!(matches!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-9), Err(Error::NoBracket { .. })));
        assert_eq!(bisect(|x| x, 0.0, 1.0, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in 1..=10 {
            let (x, w) = gauss_legendre(n);
            for deg in 0..2 * n {
                let quad: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((quad - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }
}
