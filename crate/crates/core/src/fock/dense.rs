//! Explicit symmetric tensors for small spaces.
//!
//! Used only to validate the closed-form coherent-state inner products: each
//! state is materialised sector by sector up to `P` particles in the
//! orthonormal coordinates of the whole direct-integral space, and the
//! truncated tensor inner product is compared with the closed form. The
//! difference must stay below the analytic tail of the dropped sectors.

use ndarray::Array1;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CoherentState;
use crate::{Error, Result};

pub const DENSE_MAX_DIM: usize = 8;
pub const DENSE_MAX_PARTICLES: usize = 4;
/// Slack added to every tail bound.
pub const DENSE_ABS_SLACK: f64 = 1e-12;

/// Sector tensors, `sectors[n]` of length `dimⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    pub sectors: Vec<Array1<Complex64>>,
}

impl DenseState {
    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.sectors
            .iter()
            .zip(&other.sectors)
            .map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum::<Complex64>())
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseFock {
    dim: usize,
    cutoff: usize,
}

impl DenseFock {
    pub fn new(dim: usize, cutoff: usize) -> Result<Self> {
        if dim > DENSE_MAX_DIM || cutoff > DENSE_MAX_PARTICLES {
            return Err(Error::DenseTooLarge(format!(
                "dimension {dim} with {cutoff} particles exceeds {DENSE_MAX_DIM} and {DENSE_MAX_PARTICLES}"
            )));
        }
        Ok(Self { dim, cutoff })
    }

    fn check(&self, v: &[Complex64]) -> Result<()> {
        if v.len() == self.dim {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(format!("vector of length {} in dimension {}", v.len(), self.dim)))
        }
    }

    /// Sectors `h^{⊗n}/sqrt(n!)`.
    pub fn exp(&self, h: &[Complex64]) -> Result<DenseState> {
        self.check(h)?;
        let mut sectors = Vec::with_capacity(self.cutoff + 1);
        let mut power = Array1::from_elem(1, Complex64::new(1.0, 0.0));
        let mut fact = 1.0;
        for n in 0..=self.cutoff {
            if n > 0 {
                power = kron(&power, h);
                fact *= n as f64;
            }
            sectors.push(power.mapv(|x| x / fact.sqrt()));
        }
        Ok(DenseState { sectors })
    }

    /// Sectors `Σ_{placements} h ⊗ … ⊗ v ⊗ … ⊗ h / sqrt(n!)`.
    pub fn ray(&self, v: &[Complex64], h: &[Complex64]) -> Result<DenseState> {
        self.check(v)?;
        self.check(h)?;
        let mut sectors = Vec::with_capacity(self.cutoff + 1);
        let mut power = Array1::from_elem(1, Complex64::new(1.0, 0.0));
        let mut placed = Array1::from_elem(1, Complex64::new(0.0, 0.0));
        let mut fact = 1.0;
        for n in 0..=self.cutoff {
            if n > 0 {
                placed = kron(&placed, h) + kron(&power, v);
                power = kron(&power, h);
                fact *= n as f64;
            }
            sectors.push(placed.mapv(|x| x / fact.sqrt()));
        }
        Ok(DenseState { sectors })
    }

    pub fn state(&self, s: &CoherentState) -> Result<DenseState> {
        match s {
            CoherentState::Exp(h) => self.exp(h.to_flat().as_slice().unwrap()),
            CoherentState::Ray { direction, base } => {
                self.ray(direction.to_flat().as_slice().unwrap(), base.to_flat().as_slice().unwrap())
            }
        }
    }
}

fn kron(a: &Array1<Complex64>, b: &[Complex64]) -> Array1<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// `Σ_{n>P} c·xⁿ⁻ˢ/(n−s)!` for a shift `s`.
fn shifted_tail(x: f64, cutoff: usize, shift: usize) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0; // x^m / m!, m = n - shift
    let start = (cutoff + 1).saturating_sub(shift);
    for m in 1..=start + 300 {
        term *= x / m as f64;
        if m >= start {
            sum += term;
        }
    }
    if start == 0 {
        sum += 1.0;
    }
    sum
}

/// Analytic bound on the contribution of sectors above `cutoff` to
/// `⟨s, t⟩`.
pub fn pair_tail(s: &CoherentState, t: &CoherentState, cutoff: usize) -> Result<f64> {
    use CoherentState::*;
    let x = s.base().inner(t.base())?.norm();
    Ok(match (s, t) {
        (Exp(_), Exp(_)) => shifted_tail(x, cutoff, 0),
        (Ray { direction: v, .. }, Exp(hp)) => v.inner(hp)?.norm() * shifted_tail(x, cutoff, 1),
        (Exp(h), Ray { direction: vp, .. }) => h.inner(vp)?.norm() * shifted_tail(x, cutoff, 1),
        (Ray { direction: v, base: h }, Ray { direction: vp, base: hp }) => {
            v.inner(vp)?.norm() * shifted_tail(x, cutoff, 1)
                + (v.inner(hp)? * h.inner(vp)?).norm() * shifted_tail(x, cutoff, 2)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenseCrossCheck {
    pub dim: usize,
    pub cutoff: usize,
    pub pairs: usize,
    pub max_abs_deviation: f64,
    pub max_relative_deviation: f64,
    pub max_tail_bound: f64,
    /// Largest `deviation − tail`; the check passes when this stays below
    /// [`DENSE_ABS_SLACK`].
    pub max_excess: f64,
    pub passed: bool,
}

/// Compares every pairwise closed-form inner product among `states` with
/// the explicit tensor computation truncated at `cutoff` particles.
pub fn dense_backend_crosscheck(states: &[CoherentState], cutoff: usize) -> Result<DenseCrossCheck> {
    let dim = states.first().map_or(0, |s| s.base().to_flat().len());
    let fock = DenseFock::new(dim, cutoff)?;
    let dense = states.iter().map(|s| fock.state(s)).collect::<Result<Vec<_>>>()?;
    let mut out = DenseCrossCheck {
        dim,
        cutoff,
        pairs: 0,
        max_abs_deviation: 0.0,
        max_relative_deviation: 0.0,
        max_tail_bound: 0.0,
        max_excess: f64::NEG_INFINITY,
        passed: true,
    };
    for (s, ds) in states.iter().zip(&dense) {
        for (t, dt) in states.iter().zip(&dense) {
            let closed = s.inner(t)?;
            let dev = (closed - ds.inner(dt)).norm();
            let tail = pair_tail(s, t, cutoff)?;
            out.pairs += 1;
            out.max_abs_deviation = out.max_abs_deviation.max(dev);
            if closed.norm() > 0.0 {
                out.max_relative_deviation = out.max_relative_deviation.max(dev / closed.norm());
            }
            out.max_tail_bound = out.max_tail_bound.max(tail);
            out.max_excess = out.max_excess.max(dev - tail);
        }
    }
    out.passed = out.max_excess <= DENSE_ABS_SLACK;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bergman::BergmanVector;
    use crate::current::DiskMesh;
    use crate::directint::DirectIntegralVector;
    use std::sync::Arc;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// 2 nodes × degree 3 = dimension 8.
    fn space() -> Arc<DiskMesh> {
        Arc::new(DiskMesh::new(1, 2).unwrap())
    }

    fn vector(mesh: &Arc<DiskMesh>, seed: f64, norm: f64) -> DirectIntegralVector {
        let nodes = (0..mesh.len())
            .map(|i| {
                BergmanVector::from_coeffs(Array1::from_shape_fn(4, |n| {
                    let t = seed + 0.9 * i as f64 + 1.7 * n as f64;
                    cx(t.sin(), (3.0 * t).cos())
                }))
            })
            .collect();
        let v = DirectIntegralVector::new(mesh.clone(), nodes).unwrap();
        let s = norm / v.norm();
        v.scale(cx(s, 0.0))
    }

    #[test]
    fn size_cap() {
        assert!(matches!(DenseFock::new(9, 2), Err(Error::DenseTooLarge(_))));
        assert!(matches!(DenseFock::new(4, 5), Err(Error::DenseTooLarge(_))));
    }

    #[test]
    fn vacuum_pairs_are_exact() {
        let m = space();
        let z = DirectIntegralVector::zeros(m, 3);
        let r = dense_backend_crosscheck(&[CoherentState::Exp(z.clone()), CoherentState::Exp(z)], 4).unwrap();
        assert_eq!(r.max_abs_deviation, 0.0);
        assert!(r.passed);
    }

    #[test]
    fn exp_pair_within_tail() {
        let m = space();
        let h = vector(&m, 0.3, 0.5);
        let hp = vector(&m, 1.1, 0.5);
        let states = [CoherentState::Exp(h), CoherentState::Exp(hp)];
        let r = dense_backend_crosscheck(&states, 4).unwrap();
        assert_eq!(r.dim, 8);
        assert!(r.passed, "{r:?}");
        // Full tail at |⟨h,h⟩| = 0.25; its leading term is 0.25⁵/5!.
        let full: f64 = (5..40).map(|n| 0.25f64.powi(n) / (1..=n).map(f64::from).product::<f64>()).sum();
        assert!(r.max_abs_deviation <= full + 1e-12);
        assert!(r.max_abs_deviation > 0.25f64.powi(5) / 120.0);
        assert!(r.max_abs_deviation > 0.0);
    }

    #[test]
    fn ray_pairs_within_tail() {
        let m = space();
        let states = [
            CoherentState::Exp(vector(&m, 0.2, 0.5)),
            CoherentState::Ray {
                direction: vector(&m, 2.2, 0.8),
                base: vector(&m, 0.7, 0.5),
            },
            CoherentState::Ray {
                direction: vector(&m, 4.1, 0.6),
                base: vector(&m, 3.3, 0.4),
            },
        ];
        let r = dense_backend_crosscheck(&states, 4).unwrap();
        assert_eq!(r.pairs, 9);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn tail_vanishes_when_truncation_is_exact() {
        let m = space();
        let z = DirectIntegralVector::zeros(m.clone(), 3);
        let s = CoherentState::Ray {
            direction: vector(&m, 1.0, 1.0),
            base: z,
        };
        // Ray(v, 0) is a pure one-particle state.
        let r = dense_backend_crosscheck(&[s], 1).unwrap();
        assert!(r.max_abs_deviation < 1e-15);
    }
}
