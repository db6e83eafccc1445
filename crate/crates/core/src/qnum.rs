//! Scalar q-numbers.
//!
//! Every q-scalar is evaluated as a ratio of hyperbolic sines,
//! `[x]_q = sinh(γx) / sinh(γ)` with `γ = ln q`, which stays well conditioned
//! as `γ → 0`. The classical point `q = 1` is dispatched to exact formulas.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Below this magnitude the q-ratio switches to its two-term series.
pub const QRATIO_SERIES_THRESHOLD: f64 = 1e-8;

/// The deformation parameter `q > 0` together with `γ = ln q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DeformationParam {
    q: f64,
    gamma: f64,
}

impl DeformationParam {
    pub fn new(q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::InvalidDeformation(q));
        }
        let gamma = if q == 1.0 { 0.0 } else { q.ln() };
        Ok(Self { q, gamma })
    }

    /// Builds the parameter from `γ` directly, keeping `γ` exact.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::InvalidDeformation(gamma.exp()));
        }
        let q = gamma.exp();
        if q == 1.0 {
            return Ok(Self::classical());
        }
        Ok(Self { q, gamma })
    }

    pub fn classical() -> Self {
        Self { q: 1.0, gamma: 0.0 }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_classical(&self) -> bool {
        self.gamma == 0.0
    }
}

impl TryFrom<f64> for DeformationParam {
    type Error = Error;

    fn try_from(q: f64) -> Result<Self> {
        Self::new(q)
    }
}

impl From<DeformationParam> for f64 {
    fn from(p: DeformationParam) -> f64 {
        p.q
    }
}

/// `[x]_q = sinh(γx)/sinh(γ)`; returns `x` itself at `q = 1`.
pub fn qnumber(x: Complex64, p: DeformationParam) -> Complex64 {
    if p.is_classical() {
        return x;
    }
    (x * p.gamma).sinh() / p.gamma.sinh()
}

/// `[x]_q / x`, with the removable singularity at `x = 0` filled by its limit.
pub fn qratio(x: Complex64, p: DeformationParam) -> Complex64 {
    if p.is_classical() {
        return Complex64::new(1.0, 0.0);
    }
    let g = p.gamma;
    if x.norm() < QRATIO_SERIES_THRESHOLD {
        let gx = x * g;
        return (1.0 + gx * gx / 6.0) * (g / g.sinh());
    }
    qnumber(x, p) / x
}

/// The test-function deformation `sinh(γξ)/sinh(γ)`; equals `ξ` at `q = 1`.
pub fn sinh_ratio(xi: Complex64, p: DeformationParam) -> Complex64 {
    if p.is_classical() {
        return xi;
    }
    (xi * p.gamma).sinh() / p.gamma.sinh()
}

/// Real-argument convenience wrapper around [`qnumber`].
pub fn qnumber_real(x: f64, p: DeformationParam) -> f64 {
    qnumber(Complex64::new(x, 0.0), p).re
}


#[cfg(test)]
mod tests {
    use super::naive::qnumber_alt;
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn p(q: f64) -> DeformationParam {
        DeformationParam::new(q).unwrap()
    }

    #[test]
    fn rejects_non_positive_q() {
        for q in [0.0, -1.0, -0.5, f64::NAN, f64::INFINITY] {
            assert!(DeformationParam::new(q).is_err(), "q = {q}");
        }
    }

    #[test]
    fn gamma_vanishes_only_at_one() {
        assert!(p(1.0).is_classical());
        assert_eq!(p(1.0).gamma(), 0.0);
        assert!(!p(1.0 + 1e-12).is_classical());
        assert!(DeformationParam::from_gamma(0.0).unwrap().is_classical());
    }

    #[test]
    fn qnumber_examples() {
        for q in [0.5, 0.9, 2.0, 7.0] {
            assert_eq!(qnumber(c(0.0), p(q)), c(0.0));
            assert!((qnumber(c(1.0), p(q)) - 1.0).norm() < 1e-15);
        }
        assert!((qnumber(c(2.0), p(2.0)) - 2.5).norm() < 1e-15);
        assert_eq!(qnumber(c(3.7), p(1.0)), c(3.7));
    }

    #[test]
    fn qratio_examples() {
        // Limit value, frozen from ln(2)/sinh(ln 2) = ln(2)/0.75.
        let expected = std::f64::consts::LN_2 / 0.75;
        assert!((qratio(c(0.0), p(2.0)).re - expected).abs() < 1e-15);
        assert!((expected - 0.924_196_240_746_593_6).abs() < 1e-15);
        // Independent cross-check through the q-number at a small argument.
        let eps = 1e-6;
        let fd = qnumber(c(eps), p(2.0)).re / eps;
        assert!((fd - expected).abs() < 1e-11);

        assert!((qratio(c(2.0), p(2.0)) - 1.25).norm() < 1e-15);
        for x in [-3.0, 0.0, 1e-9, 4.2] {
            assert_eq!(qratio(c(x), p(1.0)), c(1.0));
        }
    }

    #[test]
    fn qratio_is_continuous_across_series_threshold() {
        let q = p(2.0);
        let below = qratio(c(0.99 * QRATIO_SERIES_THRESHOLD), q);
        let above = qratio(c(1.01 * QRATIO_SERIES_THRESHOLD), q);
        assert!((below - above).norm() < 1e-15);
    }

    #[test]
    fn sinh_ratio_examples() {
        assert!((sinh_ratio(c(1.0), p(0.5)) - 1.0).norm() < 1e-15);
        assert_eq!(sinh_ratio(c(0.0), p(2.0)), c(0.0));
        assert!((sinh_ratio(c(2.0), p(2.0)) - 2.5).norm() < 1e-15);
        assert_eq!(sinh_ratio(c(0.3), p(1.0)), c(0.3));
    }

    #[test]
    fn two_formulas_agree_on_grid() {
        for q in [0.5, 0.9, 1.1, 2.0] {
            for k in 0..=400 {
                let x = -20.0 + 0.1 * k as f64;
                let a = qnumber(c(x), p(q));
                let b = qnumber_alt(c(x), p(q));
                let scale = a.norm().max(1e-300);
                assert!((a - b).norm() / scale < 1e-13 || (a - b).norm() < 1e-15, "q={q} x={x}");
            }
        }
    }

    #[test]
    fn q_identity_on_integers() {
        // [a][b+1] - [b][a+1] = [a-b]; tolerance relative to the product scale.
        for q in [0.5, 0.9, 1.1, 2.0] {
            let qp = p(q);
            for a in -10..=10 {
                for b in -10..=10 {
                    let (a, b) = (a as f64, b as f64);
                    let t1 = qnumber_real(a, qp) * qnumber_real(b + 1.0, qp);
                    let t2 = qnumber_real(b, qp) * qnumber_real(a + 1.0, qp);
                    let rhs = qnumber_real(a - b, qp);
                    let scale = t1.abs().max(t2.abs()).max(1.0);
                    assert!(((t1 - t2) - rhs).abs() / scale < 1e-12, "q={q} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn classical_limit_is_second_order() {
        let x = c(1.7);
        let pts: Vec<(f64, f64)> = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3]
            .iter()
            .map(|&g| {
                let pp = DeformationParam::from_gamma(g).unwrap();
                (g, (qnumber(x, pp) - x).norm())
            })
            .collect();
        let slope = crate::loglog_slope(&pts);
        assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
    }

    proptest! {
        #[test]
        fn antisymmetric(x in -20.0f64..20.0, q in 0.2f64..5.0) {
            let qp = p(q);
            let a = qnumber(c(x), qp);
            let b = qnumber(c(-x), qp);
            prop_assert!((a + b).norm() <= 4.0 * f64::EPSILON * a.norm().max(1.0));
        }

        #[test]
        fn qratio_times_x_is_qnumber(x in 1e-6f64..10.0, q in 0.2f64..5.0) {
            let qp = p(q);
            let lhs = qratio(c(x), qp) * x;
            let rhs = qnumber(c(x), qp);
            prop_assert!((lhs - rhs).norm() <= 1e-13 * rhs.norm().max(1.0));
        }
    }
}
