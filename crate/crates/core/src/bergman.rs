//! The Bergman space `L²_hol(D)` in a truncated orthonormal monomial basis.
//!
//! Basis: `ê_n(z) = sqrt((n+1)/π) · zⁿ`, `n = 0..=N`. A group element
//! `g = [[a, b], [c, d]]` acts with weight 2 through its inverse,
//!
//! ```text
//! [O(g) f](z) = (a − cz)^{-2} · f((dz − b) / (a − cz)),
//! ```
//!
//! and carries the one-cocycle `b(g)(z) = c / (a − cz)`. With this sign of
//! `b`, `O(g g') = O(g) O(g')` and `b(g g') = b(g) + O(g) b(g')` hold for the
//! ordinary matrix product.
//!
//! Operator entries are exact Taylor coefficients: `O(g) zⁿ` expands as the
//! finite binomial `(dz − b)ⁿ` convolved with the negative-binomial series of
//! `(a − cz)^{-(n+2)}`. Rows above `N` are dropped, so products of truncated
//! operators are only trusted on the window of degrees `≤ N/2`.

use std::f64::consts::PI;

use ndarray::{s, Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::mat2::Mat2;
use crate::{Error, Result};

/// Group elements are plain 2×2 matrices `[[a, b], [c, d]]`.
pub type GroupElement2x2 = Mat2;

/// Pseudo-unitarity defect accepted by [`verify_unitary`].
pub const PSEUDO_UNITARY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Norm of `ê_n`'s monomial, `‖zⁿ‖ = sqrt(π/(n+1))`.
fn monomial_norm(n: usize) -> f64 {
    (PI / (n as f64 + 1.0)).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BergmanVector {
    coeffs: Array1<Complex64>,
}

impl BergmanVector {
    pub fn zeros(degree: usize) -> Self {
        Self {
            coeffs: Array1::zeros(degree + 1),
        }
    }

    pub fn from_coeffs(coeffs: Array1<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a Bergman vector needs at least one coefficient");
        Self { coeffs }
    }

    /// From Taylor coefficients `f(z) = Σ m_n zⁿ`.
    pub fn from_monomial(monomial: &[Complex64]) -> Self {
        Self::from_coeffs(
            monomial
                .iter()
                .enumerate()
                .map(|(n, m)| m * monomial_norm(n))
                .collect(),
        )
    }

    /// The unit function `λ₀(z) = 1`: coefficient `sqrt(π)` on `ê_0`.
    pub fn unit_function(degree: usize) -> Self {
        let mut v = Self::zeros(degree);
        v.coeffs[0] = Complex64::new(PI.sqrt(), 0.0);
        v
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &Array1<Complex64> {
        &self.coeffs
    }

    pub fn to_monomial(&self) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c / monomial_norm(n))
            .collect()
    }

    /// `⟨self, other⟩`, conjugate-linear in `other`.
    pub fn inner(&self, other: &BergmanVector) -> Complex64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Evaluates the truncated series at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut zn = Complex64::new(1.0, 0.0);
        let mut acc = ZERO;
        for (n, c) in self.coeffs.iter().enumerate() {
            acc += c * zn / monomial_norm(n);
            zn *= z;
        }
        acc
    }

    /// ℓ² norm of the coefficients of degree `≤ window`.
    pub fn window_norm(&self, window: usize) -> f64 {
        self.coeffs
            .iter()
            .take(window + 1)
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BergmanOperator {
    matrix: Array2<Complex64>,
}

impl BergmanOperator {
    pub fn identity(degree: usize) -> Self {
        Self {
            matrix: Array2::eye(degree + 1),
        }
    }

    pub fn from_matrix(matrix: Array2<Complex64>) -> Self {
        assert!(matrix.is_square(), "Bergman operators are square");
        Self { matrix }
    }

    pub fn degree(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }

    pub fn apply(&self, v: &BergmanVector) -> BergmanVector {
        BergmanVector::from_coeffs(self.matrix.dot(&v.coeffs))
    }

    pub fn compose(&self, other: &BergmanOperator) -> BergmanOperator {
        BergmanOperator::from_matrix(self.matrix.dot(&other.matrix))
    }

    /// Largest entry modulus of `self − other` on the leading
    /// `(window+1)²` block.
    pub fn window_distance(&self, other: &BergmanOperator, window: usize) -> f64 {
        let w = window + 1;
        let a = self.matrix.slice(s![..w, ..w]);
        let b = other.matrix.slice(s![..w, ..w]);
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

/// A residual measured on the degree `≤ window` block, with the geometric
/// tail estimate `max |c/a|^{window}` of the elements involved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowResidual {
    pub residual: f64,
    pub tail_bound: f64,
    pub window: usize,
}

/// `|c/a|`, the radius parameter of the Möbius expansion.
pub fn expansion_ratio(g: &GroupElement2x2) -> f64 {
    g.c().norm() / g.a().norm()
}

fn check_expansion(g: &GroupElement2x2) -> Result<()> {
    if g.a().norm() == 0.0 {
        return Err(Error::ExpansionDivergent { ratio: f64::INFINITY });
    }
    let ratio = expansion_ratio(g);
    if !(ratio < 1.0) || !g.is_finite() {
        return Err(Error::ExpansionDivergent { ratio });
    }
    Ok(())
}

/// The disk-preserving element with `a = cosh s·e^{iφ}`, `c = sinh s·e^{iφ'}`,
/// `b = conj c`, `d = conj a`.
pub fn pseudo_unitary(s: f64, phi: f64, phi_prime: f64) -> GroupElement2x2 {
    let a = Complex64::from_polar(s.cosh(), phi);
    let c = Complex64::from_polar(s.sinh(), phi_prime);
    Mat2::new(a, c.conj(), c, a.conj())
}

pub fn mobius_operator(g: &GroupElement2x2, degree: usize) -> Result<BergmanOperator> {
    mobius_operator_signed(g, degree, -1.0)
}

/// The Möbius matrix with argument `(dz + sign·b)/(a − cz)`.
///
/// `sign = -1` is the representation; `sign = +1` is kept for the regression
/// test that rules it out.
pub(crate) fn mobius_operator_signed(
    g: &GroupElement2x2,
    degree: usize,
    sign: f64,
) -> Result<BergmanOperator> {
    check_expansion(g)?;
    let (a, b, c, d) = (g.a(), g.b() * sign, g.c(), g.d());
    let rho = c / a;
    let inv_a = a.inv();
    let size = degree + 1;
    let mut m = Array2::<Complex64>::zeros((size, size));

    // Column n holds the coefficients of (a − cz)^{-2} · wⁿ with
    // w(z) = (dz + b)/(a − cz), built by repeated multiplication by w.
    // Expanding (dz + b)ⁿ and (a − cz)^{-(n+2)} separately instead loses
    // about ((1 + |ρ|)/(1 − |ρ|))ⁿ to cancellation.
    //   w = b/a + ((d + bρ)/a) Σ_{l≥1} ρ^{l−1} z^l
    let w0 = b * inv_a;
    let w_rest = (d + b * rho) * inv_a;
    let inv_a2 = inv_a * inv_a;
    let mut col: Vec<Complex64> = Vec::with_capacity(size);
    let mut p = inv_a2;
    for k in 0..size {
        col.push(p * (k as f64 + 1.0));
        p *= rho;
    }
    let mut next = vec![ZERO; size];
    for n in 0..size {
        for k in 0..size {
            m[[k, n]] = col[k] * ((n as f64 + 1.0) / (k as f64 + 1.0)).sqrt();
        }
        // shifted geometric sum t_k = Σ_{l≥1} ρ^{l−1} col[k − l]
        let mut t = ZERO;
        for k in 0..size {
            if k > 0 {
                t = col[k - 1] + rho * t;
            }
            next[k] = w0 * col[k] + w_rest * t;
        }
        std::mem::swap(&mut col, &mut next);
    }
    Ok(BergmanOperator { matrix: m })
}

/// Coefficients of `c/(a − cz) = Σ_k (c/a)^{k+1} z^k`.
pub fn cocycle_vector(g: &GroupElement2x2, degree: usize) -> Result<BergmanVector> {
    check_expansion(g)?;
    let rho = g.c() / g.a();
    let mut mono = Vec::with_capacity(degree + 1);
    let mut p = rho;
    for _ in 0..=degree {
        mono.push(p);
        p *= rho;
    }
    Ok(BergmanVector::from_monomial(&mono))
}

fn tail_bound(gs: &[&GroupElement2x2], window: usize) -> f64 {
    gs.iter()
        .map(|g| expansion_ratio(g))
        .fold(0.0, f64::max)
        .powi(window as i32)
}

/// `‖b(g·g') − b(g) − O(g) b(g')‖` on degrees `≤ N/2`.
pub fn verify_cocycle_identity(
    g: &GroupElement2x2,
    gp: &GroupElement2x2,
    degree: usize,
) -> Result<WindowResidual> {
    let prod = *g * *gp;
    let lhs = cocycle_vector(&prod, degree)?;
    let bg = cocycle_vector(g, degree)?;
    let bgp = cocycle_vector(gp, degree)?;
    let og = mobius_operator(g, degree)?;
    let rhs = og.apply(&bgp);
    let window = degree / 2;
    let diff = BergmanVector::from_coeffs(&lhs.coeffs - &bg.coeffs - &rhs.coeffs);
    Ok(WindowResidual {
        residual: diff.window_norm(window),
        tail_bound: tail_bound(&[g, gp, &prod], window),
        window,
    })
}

/// `‖O(g·g') − O(g) O(g')‖` on the degree `≤ N/2` block.
pub fn verify_homomorphism(
    g: &GroupElement2x2,
    gp: &GroupElement2x2,
    degree: usize,
) -> Result<WindowResidual> {
    let prod = *g * *gp;
    let direct = mobius_operator(&prod, degree)?;
    let composed = mobius_operator(g, degree)?.compose(&mobius_operator(gp, degree)?);
    let window = degree / 2;
    Ok(WindowResidual {
        residual: direct.window_distance(&composed, window),
        tail_bound: tail_bound(&[g, gp, &prod], window),
        window,
    })
}

/// `‖O(g)† O(g) − I‖` on the degree `≤ N/2` block, for disk-preserving `g`.
pub fn verify_unitary(g: &GroupElement2x2, degree: usize) -> Result<WindowResidual> {
    let defect = g.pseudo_unitary_defect();
    if !(defect <= PSEUDO_UNITARY_TOL) {
        return Err(Error::NotPseudoUnitary(defect));
    }
    let o = mobius_operator(g, degree)?;
    let gram = o.matrix.t().mapv(|z| z.conj()).dot(&o.matrix);
    let window = degree / 2;
    Ok(WindowResidual {
        residual: BergmanOperator::from_matrix(gram).window_distance(&BergmanOperator::identity(degree), window),
        tail_bound: tail_bound(&[g], window),
        window,
    })
}
