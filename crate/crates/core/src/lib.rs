//! Numerical laboratory for q-deformed `sl(2)` current algebras over the unit
//! disk.
//!
//! The crate is organised bottom-up:
//!
//! * [`qnum`]: scalar q-numbers and the removable-singularity q-ratio.
//! * [`irreps`]: spin-j matrices of `sl(2, C)` and the deformation map onto
//!   `sl_q(2, C)`.
//! * [`current`]: quadrature on the disk, matrix-valued currents and their
//!   pointwise exponentials.
//! * [`bergman`]: the weight-2 Möbius representation on the Bergman space and
//!   its one-cocycle, in a truncated monomial basis.
//! * [`directint`]: node-wise direct integrals of the above, plus the
//!   infinitesimal quantities θ̃, ν̃ and φ̃.
//! * [`fock`]: coherent-state calculus on the symmetric Fock space, the group
//!   action ũ, the infinitesimal representation π and the highest-weight check.

pub mod bergman;
pub mod current;
pub mod directint;
mod error;
pub mod fock;
pub mod irreps;
pub mod mat2;
pub mod qnum;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Least-squares slope of `log(err)` against `log(param)`.
///
/// Used by every convergence scan in the crate. Pairs with a non-positive
/// component are skipped; returns `NaN` when fewer than two points remain.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_power_law() {
        let pts: Vec<_> = [1e-1, 1e-2, 1e-3].iter().map(|&g| (g, 3.0 * g * g)).collect();
        assert!((loglog_slope(&pts) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn slope_needs_two_positive_points() {
        assert!(loglog_slope(&[(1.0, 0.0), (2.0, 1.0)]).is_nan());
    }
}
