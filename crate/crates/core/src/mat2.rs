//! Fixed-size 2×2 complex matrices.
//!
//! Node values of currents and group currents are 2×2, so they get a small
//! `Copy` type instead of a heap-allocated array.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `[[m00, m01], [m10, m11]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat2 {
    pub m: [[Complex64; 2]; 2],
}

impl Mat2 {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Self::new(a, ZERO, ZERO, d)
    }

    pub fn a(&self) -> Complex64 {
        self.m[0][0]
    }
    pub fn b(&self) -> Complex64 {
        self.m[0][1]
    }
    pub fn c(&self) -> Complex64 {
        self.m[1][0]
    }
    pub fn d(&self) -> Complex64 {
        self.m[1][1]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.a() * s, self.b() * s, self.c() * s, self.d() * s)
    }

    /// Inverse through the adjugate; callers guarantee a non-zero determinant.
    pub fn inverse(&self) -> Self {
        let det = self.det();
        Self::new(self.d() / det, -self.b() / det, -self.c() / det, self.a() / det)
    }

    pub fn commutator(&self, other: &Mat2) -> Mat2 {
        *self * *other - *other * *self
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| z.is_finite())
    }

    /// Deviation from the disk-preserving form `[[a, conj c], [c, conj a]]`
    /// with `|a|² − |c|² = 1`.
    pub fn pseudo_unitary_defect(&self) -> f64 {
        let shape = (self.d() - self.a().conj())
            .norm()
            .max((self.b() - self.c().conj()).norm());
        let form = (self.a().norm_sqr() - self.c().norm_sqr() - 1.0).abs();
        shape.max(form)
    }

    /// `exp(tA)` in closed form.
    ///
    /// The trace part factors out as `e^{t·tr/2}`; on the trace-free part
    /// `exp(tA₀) = cosh(tΔ)·I + sinh(tΔ)/Δ·A₀` with `Δ² = -det A₀`. Both
    /// coefficients are entire in `(tΔ)²`, so small arguments use their power
    /// series and no square-root branch is ever chosen there.
    pub fn exp(&self, t: f64) -> Mat2 {
        let half_tr = self.trace() * 0.5;
        let a0 = *self - Mat2::identity().scale(half_tr);
        let delta_sq = -a0.det();
        let z = delta_sq * (t * t);
        let (ch, sh) = cosh_sinhc(z);
        let core = Mat2::identity().scale(ch) + a0.scale(sh * t);
        if half_tr == ZERO {
            core
        } else {
            core.scale((half_tr * t).exp())
        }
    }

    /// Scaling-and-squaring Taylor exponential of `tA`; a reference for
    /// [`Mat2::exp`] that shares none of its algebra.
    pub fn exp_scaling_squaring(&self, t: f64) -> Mat2 {
        let a = self.scale(t.into());
        let norm = a.max_norm() * 2.0;
        let mut squarings = 0u32;
        let mut scale = 1.0;
        while norm * scale > 0.25 {
            scale *= 0.5;
            squarings += 1;
        }
        let a = a.scale(scale.into());
        let mut term = Mat2::identity();
        let mut sum = Mat2::identity();
        for k in 1..=24 {
            term = (term * a).scale((1.0 / k as f64).into());
            sum = sum + term;
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }
}

/// `(cosh √z, sinh √z / √z)`, entire in `z`.
fn cosh_sinhc(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 1.0 {
        let mut ch = ONE;
        let mut sh = ONE;
        let mut term = ONE;
        for k in 1..=30 {
            // term = z^k / (2k)!
            term = term * z / ((2 * k - 1) as f64 * (2 * k) as f64);
            ch += term;
            sh += term / (2 * k + 1) as f64;
            if term.norm() < 1e-18 {
                break;
            }
        }
        (ch, sh)
    } else {
        let s = z.sqrt();
        (s.cosh(), s.sinh() / s)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a() + o.a(), self.b() + o.b(), self.c() + o.c(), self.d() + o.d())
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a() - o.a(), self.b() - o.b(), self.c() - o.c(), self.d() - o.d())
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale((-1.0).into())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let m = &self.m;
        let n = &o.m;
        Mat2::new(
            m[0][0] * n[0][0] + m[0][1] * n[1][0],
            m[0][0] * n[0][1] + m[0][1] * n[1][1],
            m[1][0] * n[0][0] + m[1][1] * n[1][0],
            m[1][0] * n[0][1] + m[1][1] * n[1][1],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn entry() -> impl Strategy<Value = Complex64> {
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(r, i)| cx(r, i))
    }

    fn traceless() -> impl Strategy<Value = Mat2> {
        (entry(), entry(), entry()).prop_map(|(a, b, c)| Mat2::new(a, b, c, -a))
    }

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(Mat2::zero().exp(0.7), Mat2::identity());
    }

    #[test]
    fn nilpotent_exp_is_exact() {
        let e = Mat2::new(ZERO, cx(0.3, -1.2), ZERO, ZERO);
        let t = 0.37;
        assert_eq!(e.exp(t), Mat2::identity() + e.scale(t.into()));
        let f = Mat2::new(ZERO, ZERO, cx(2.0, 0.5), ZERO);
        assert_eq!(f.exp(t), Mat2::identity() + f.scale(t.into()));
    }

    #[test]
    fn diagonal_exp() {
        let alpha = cx(0.8, 0.3);
        let g = Mat2::diag(alpha, -alpha).exp(1.3);
        let expected = Mat2::diag((alpha * 1.3).exp(), (-alpha * 1.3).exp());
        assert!((g - expected).max_norm() < 1e-14);
    }

    #[test]
    fn large_argument_branch_matches_reference() {
        let a = Mat2::new(cx(1.5, 0.2), cx(-2.0, 1.0), cx(0.7, 0.0), cx(-1.5, -0.2));
        let g = a.exp(1.0);
        let r = a.exp_scaling_squaring(1.0);
        assert!((g - r).max_norm() < 1e-11 * r.max_norm());
    }

    #[test]
    fn general_trace_factors_out() {
        let a = Mat2::new(cx(0.4, 0.0), cx(0.2, 0.1), cx(-0.3, 0.0), cx(0.9, 0.2));
        let g = a.exp(0.8);
        assert!((g.det() - (a.trace() * 0.8).exp()).norm() < 1e-14);
        assert!((g - a.exp_scaling_squaring(0.8)).max_norm() < 1e-13);
    }

    #[test]
    fn inverse_roundtrip() {
        let g = Mat2::new(cx(1.1, 0.2), cx(0.3, 0.0), cx(0.1, -0.4), cx(0.9, 0.0));
        assert!((g * g.inverse() - Mat2::identity()).max_norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn closed_form_matches_scaling_squaring(a in traceless(), t in -1.0f64..1.0) {
            let g = a.exp(t);
            let r = a.exp_scaling_squaring(t);
            prop_assert!((g - r).max_norm() < 1e-12);
        }

        #[test]
        fn one_parameter_group_law(a in traceless(), s in -1.0f64..1.0, t in -1.0f64..1.0) {
            let lhs = a.exp(s + t);
            let rhs = a.exp(s) * a.exp(t);
            prop_assert!((lhs - rhs).max_norm() < 1e-12);
        }

        #[test]
        fn traceless_exp_has_unit_det(a in traceless(), t in -1.0f64..1.0) {
            prop_assert!((a.exp(t).det() - 1.0).norm() < 1e-12);
        }
    }
}
