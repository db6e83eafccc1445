//! Spin-j representations of `sl(2, C)` and their q-deformation.
//!
//! Basis vectors are ordered by descending weight, `m = j, j-1, …, -j`, so
//! `h0` is `diag(j, …, -j)`, `e0` is strictly upper triangular and `f0`
//! strictly lower triangular. Generators are normalised as
//! `[h0, e0] = e0`, `[h0, f0] = -f0`, `[e0, f0] = 2 h0`.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qnum::{qnumber, qratio, DeformationParam};
use crate::{Error, Result};

/// Default upper bound on `2j + 1`.
pub const DEFAULT_DIM_CAP: usize = 64;

/// A non-negative half-integer, stored as `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Spin(u32);

impl Spin {
    pub const fn from_twice(twice_j: u32) -> Self {
        Spin(twice_j)
    }

    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !j.is_finite() || j < 0.0 || twice.fract() != 0.0 || twice > u32::MAX as f64 {
            return Err(Error::InvalidSpin(j));
        }
        Ok(Spin(twice as u32))
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    /// All spins `0, 1/2, …, self`.
    pub fn up_to(self) -> impl Iterator<Item = Spin> {
        (0..=self.0).map(Spin)
    }
}

impl TryFrom<f64> for Spin {
    type Error = Error;
    fn try_from(j: f64) -> Result<Self> {
        Spin::new(j)
    }
}

impl From<Spin> for f64 {
    fn from(s: Spin) -> f64 {
        s.value()
    }
}

impl std::fmt::Display for Spin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// The classical generators of the spin-j irrep.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinIrrep {
    pub j: Spin,
    pub e0: Array2<Complex64>,
    pub f0: Array2<Complex64>,
    pub h0: Array2<Complex64>,
}

impl SpinIrrep {
    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    /// Value of the center on this irrep.
    pub fn center_value(&self) -> f64 {
        self.j.value()
    }

    /// Weight `m` of the `k`-th basis vector.
    pub fn weight(&self, k: usize) -> f64 {
        self.j.value() - k as f64
    }
}

/// Images of the generators under the deformation map, together with the
/// irrep they came from.
#[derive(Debug, Clone)]
pub struct DeformedTriple<'a> {
    pub e: Array2<Complex64>,
    pub f: Array2<Complex64>,
    pub h: Array2<Complex64>,
    pub param: DeformationParam,
    pub source: &'a SpinIrrep,
}

/// Max-norms of `[h,e] − e`, `[h,f] + f` and `[e,f] − [2h]_q`.
///
/// Each residual comes with the magnitude of the products it is a difference
/// of (`‖h‖‖e‖`, `‖h‖‖f‖`, `max(‖e‖‖f‖, ‖[2h]_q‖)`); the floating-point floor
/// of a residual grows with its scale.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CommutatorResidual {
    pub raise: f64,
    pub lower: f64,
    pub bracket: f64,
    pub raise_scale: f64,
    pub lower_scale: f64,
    pub bracket_scale: f64,
}

impl CommutatorResidual {
    pub fn max_abs(&self) -> f64 {
        self.raise.max(self.lower).max(self.bracket)
    }

    /// Largest residual divided by `max(1, scale)`.
    pub fn max_scaled(&self) -> f64 {
        (self.raise / self.raise_scale.max(1.0))
            .max(self.lower / self.lower_scale.max(1.0))
            .max(self.bracket / self.bracket_scale.max(1.0))
    }

    /// Componentwise maximum, for folding over many triples.
    pub fn merge(self, o: CommutatorResidual) -> CommutatorResidual {
        CommutatorResidual {
            raise: self.raise.max(o.raise),
            lower: self.lower.max(o.lower),
            bracket: self.bracket.max(o.bracket),
            raise_scale: self.raise_scale.max(o.raise_scale),
            lower_scale: self.lower_scale.max(o.lower_scale),
            bracket_scale: self.bracket_scale.max(o.bracket_scale),
        }
    }
}

pub fn build_spin_irrep(j: Spin) -> Result<SpinIrrep> {
    build_spin_irrep_with_cap(j, DEFAULT_DIM_CAP)
}

pub fn build_spin_irrep_with_cap(j: Spin, cap: usize) -> Result<SpinIrrep> {
    let dim = j.dim();
    if dim > cap {
        return Err(Error::DimensionCap {
            twice_j: j.twice(),
            dim,
            cap,
        });
    }
    let jv = j.value();
    let mut e0 = Array2::zeros((dim, dim));
    let mut f0 = Array2::zeros((dim, dim));
    let mut h0 = Array2::zeros((dim, dim));
    for k in 0..dim {
        let m = jv - k as f64;
        h0[[k, k]] = Complex64::new(m, 0.0);
        if k > 0 {
            // weight m -> m + 1
            e0[[k - 1, k]] = Complex64::new(((jv - m) * (jv + m + 1.0)).sqrt(), 0.0);
        }
        if k + 1 < dim {
            // weight m -> m - 1
            f0[[k + 1, k]] = Complex64::new(((jv + m) * (jv - m + 1.0)).sqrt(), 0.0);
        }
    }
    Ok(SpinIrrep { j, e0, f0, h0 })
}

/// `e = e0·g(j − h0)`, `f = f0·g(j + h0)`, `h = h0` with `g(x) = [x]_q / x`.
///
/// `h0` is diagonal, so `g` acts on its eigenvalues and the product with the
/// classical generator scales columns.
pub fn deform(irrep: &SpinIrrep, p: DeformationParam) -> DeformedTriple<'_> {
    let j = irrep.center_value();
    let dim = irrep.dim();
    let mut e = irrep.e0.clone();
    let mut f = irrep.f0.clone();
    for k in 0..dim {
        let m = irrep.h0[[k, k]];
        let ge = qratio(j - m, p);
        let gf = qratio(j + m, p);
        e.column_mut(k).mapv_inplace(|z| z * ge);
        f.column_mut(k).mapv_inplace(|z| z * gf);
    }
    DeformedTriple {
        e,
        f,
        h: irrep.h0.clone(),
        param: p,
        source: irrep,
    }
}

/// Applies `x ↦ [scale·x]_q` to the eigenvalues of a diagonal matrix.
pub fn q_bracket_of_cartan(
    h: &Array2<Complex64>,
    scale: f64,
    p: DeformationParam,
) -> Result<Array2<Complex64>> {
    let off = off_diagonal_norm(h);
    if off > 0.0 {
        return Err(Error::NotDiagonal(off));
    }
    let mut out = Array2::zeros(h.raw_dim());
    for k in 0..h.nrows() {
        out[[k, k]] = qnumber(h[[k, k]] * scale, p);
    }
    Ok(out)
}

pub fn commutator_residual(t: &DeformedTriple<'_>) -> CommutatorResidual {
    let he = commutator(&t.h, &t.e);
    let hf = commutator(&t.h, &t.f);
    let ef = commutator(&t.e, &t.f);
    let q2h = q_bracket_of_cartan(&t.h, 2.0, t.param).expect("h is diagonal by construction");
    let (nh, ne, nf) = (max_norm(&t.h), max_norm(&t.e), max_norm(&t.f));
    CommutatorResidual {
        raise: max_norm(&(&he - &t.e)),
        lower: max_norm(&(&hf + &t.f)),
        bracket: max_norm(&(&ef - &q2h)),
        raise_scale: nh * ne,
        lower_scale: nh * nf,
        bracket_scale: (ne * nf).max(max_norm(&q2h)),
    }
}

/// Max-norm distance between the deformed and the classical generators.
pub fn classical_distance(t: &DeformedTriple<'_>) -> f64 {
    max_norm(&(&t.e - &t.source.e0))
        .max(max_norm(&(&t.f - &t.source.f0)))
        .max(max_norm(&(&t.h - &t.source.h0)))
}

pub fn commutator(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    a.dot(b) - b.dot(a)
}

pub fn max_norm(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn off_diagonal_norm(a: &Array2<Complex64>) -> f64 {
    a.indexed_iter()
        .filter(|((i, j), _)| i != j)
        .map(|(_, z)| z.norm())
        .fold(0.0, f64::max)
}
