//! The symmetric Fock space over a direct integral, handled through
//! coherent states.
//!
//! `Exp[h] = Σ_n h^{⊗n}/sqrt(n!)` and its ray derivative
//! `Ray(v, h) = d/ds Exp[h + s v]|_{s=0}` span everything the group and
//! algebra actions produce on coherent vectors, and their inner products
//! have closed forms:
//!
//! ```text
//! ⟨Exp h, Exp h'⟩       = e^{⟨h,h'⟩}
//! ⟨Ray(v,h), Exp h'⟩    = ⟨v,h'⟩ e^{⟨h,h'⟩}
//! ⟨Ray(v,h), Ray(v',h')⟩ = (⟨v,v'⟩ + ⟨v,h'⟩⟨h,v'⟩) e^{⟨h,h'⟩}
//! ```
//!
//! Nothing here truncates particle number. [`frame`] evaluates norms of
//! combinations without the cancellation that the Gram expansion suffers,
//! and [`dense`] cross-checks the closed forms against explicit tensors.

pub mod dense;
pub mod frame;
mod highest;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::current::{exp_current, CurrentElement, GroupCurrent};
use crate::directint::{lift_cocycle, lift_operator, nu, phi, theta, DirectIntegralVector};
use crate::Result;

pub use frame::{frame_norm, FrameNorm};
pub use highest::{check_highest_weight, weight_scaling_check, HighestWeightReport, WeightScalingReport};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub enum CoherentState {
    Exp(DirectIntegralVector),
    Ray {
        direction: DirectIntegralVector,
        base: DirectIntegralVector,
    },
}

impl CoherentState {
    pub fn base(&self) -> &DirectIntegralVector {
        match self {
            CoherentState::Exp(h) => h,
            CoherentState::Ray { base, .. } => base,
        }
    }

    /// Closed-form `⟨self, other⟩`.
    pub fn inner(&self, other: &CoherentState) -> Result<Complex64> {
        use CoherentState::*;
        let e = self.base().inner(other.base())?.exp();
        Ok(match (self, other) {
            (Exp(_), Exp(_)) => e,
            (Ray { direction: v, .. }, Exp(hp)) => v.inner(hp)? * e,
            (Exp(h), Ray { direction: vp, .. }) => h.inner(vp)? * e,
            (Ray { direction: v, base: h }, Ray { direction: vp, base: hp }) => {
                (v.inner(vp)? + v.inner(hp)? * h.inner(vp)?) * e
            }
        })
    }

    pub fn norm_sqr(&self) -> Result<f64> {
        Ok(self.inner(self)?.re)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub weight: Complex64,
    pub state: CoherentState,
}

/// A finite linear combination of coherent states.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoherentCombo {
    terms: Vec<Term>,
}

impl CoherentCombo {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn exp(h: DirectIntegralVector) -> Self {
        Self::single(Complex64::new(1.0, 0.0), CoherentState::Exp(h))
    }

    pub fn ray(direction: DirectIntegralVector, base: DirectIntegralVector) -> Self {
        Self::single(Complex64::new(1.0, 0.0), CoherentState::Ray { direction, base })
    }

    pub fn single(weight: Complex64, state: CoherentState) -> Self {
        Self {
            terms: vec![Term { weight, state }],
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn push(&mut self, weight: Complex64, state: CoherentState) {
        self.terms.push(Term { weight, state });
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    weight: t.weight * s,
                    state: t.state.clone(),
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &CoherentCombo) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { terms }
    }

    pub fn sub(&self, other: &CoherentCombo) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Drops terms whose weight is exactly zero.
    pub fn pruned(&self) -> Self {
        Self {
            terms: self.terms.iter().filter(|t| t.weight != ZERO).cloned().collect(),
        }
    }

    /// `⟨self, Ω⟩` with `Ω = Exp[0]`: each `Exp` term contributes its weight
    /// and each `Ray` term nothing.
    pub fn vacuum_component(&self) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| matches!(t.state, CoherentState::Exp(_)))
            .map(|t| t.weight)
            .sum()
    }

    /// The one-particle sector: `h` for `Exp[h]`, `v` for `Ray(v, h)`.
    pub fn one_particle(&self) -> Option<Result<DirectIntegralVector>> {
        let mut iter = self.terms.iter().map(|t| {
            let v = match &t.state {
                CoherentState::Exp(h) => h,
                CoherentState::Ray { direction, .. } => direction,
            };
            v.scale(t.weight)
        });
        let first = iter.next()?;
        Some(iter.try_fold(first, |acc, v| acc.add(&v)))
    }
}

/// `⟨x, y⟩` expanded over term pairs.
pub fn inner(x: &CoherentCombo, y: &CoherentCombo) -> Result<Complex64> {
    let mut acc = ZERO;
    for s in &x.terms {
        for t in &y.terms {
            acc += s.weight * t.weight.conj() * s.state.inner(&t.state)?;
        }
    }
    Ok(acc)
}

/// `‖x‖²` from the Gram expansion. Loses accuracy when the combination
/// nearly cancels; see [`frame_norm`].
pub fn gram_norm_sqr(x: &CoherentCombo) -> Result<f64> {
    Ok(inner(x, x)?.re)
}

/// `ũ(f) Exp[h] = e^{-‖b̃‖²/2 - ⟨Õh, b̃⟩} Exp[Õh + b̃]`.
pub fn apply_u(f: &GroupCurrent, h: &DirectIntegralVector) -> Result<CoherentCombo> {
    let (weight, k) = u_parts(f, h)?;
    Ok(CoherentCombo::single(weight, CoherentState::Exp(k)))
}

fn u_parts(f: &GroupCurrent, h: &DirectIntegralVector) -> Result<(Complex64, DirectIntegralVector)> {
    let degree = h.degree();
    let o = lift_operator(f, degree)?;
    let b = lift_cocycle(f, degree)?;
    let oh = o.apply(h)?;
    let weight = (-0.5 * b.norm_sqr() - oh.inner(&b)?).exp();
    Ok((weight, oh.add(&b)?))
}

/// `π(σ) Exp[h] = (−iφ̃(σ) − ⟨h, ν̃_σ⟩) Exp[h] + Ray(θ̃(σ)h + ν̃_σ, h)`.
///
/// `θ̃` is differentiated numerically with `step`; it is skipped when `h`
/// vanishes.
pub fn apply_pi(sigma: &CurrentElement, h: &DirectIntegralVector, step: f64) -> Result<CoherentCombo> {
    let phase = -I * phi(sigma);
    Ok(CoherentCombo::exp(h.clone())
        .scale(phase)
        .add(&apply_pi_without_phase(sigma, h, step)?))
}

/// [`apply_pi`] without the `−iφ̃(σ) Exp[h]` term, i.e. the part that the
/// derivative of `ũ` reproduces.
pub fn apply_pi_without_phase(
    sigma: &CurrentElement,
    h: &DirectIntegralVector,
    step: f64,
) -> Result<CoherentCombo> {
    let degree = h.degree();
    let nu_v = nu(sigma, degree);
    let direction = if h.norm_sqr() == 0.0 {
        nu_v.clone()
    } else {
        theta(sigma, degree, step)?.apply(h)?.add(&nu_v)?
    };
    let mut out = CoherentCombo::zero();
    out.push(-h.inner(&nu_v)?, CoherentState::Exp(h.clone()));
    out.push(Complex64::new(1.0, 0.0), CoherentState::Ray { direction, base: h.clone() });
    Ok(out)
}

/// `[ũ(e^{sσ}) − ũ(e^{−sσ})] Exp[h] / 2s`.
pub fn pi_finite_difference(sigma: &CurrentElement, h: &DirectIntegralVector, step: f64) -> Result<CoherentCombo> {
    let plus = apply_u(&exp_current(sigma, step), h)?;
    let minus = apply_u(&exp_current(sigma, -step), h)?;
    Ok(plus.sub(&minus).scale(Complex64::new(0.5 / step, 0.0)))
}

/// One Richardson level on [`pi_finite_difference`] with steps `s`, `s/2`.
pub fn pi_richardson(sigma: &CurrentElement, h: &DirectIntegralVector, step: f64) -> Result<CoherentCombo> {
    let coarse = pi_finite_difference(sigma, h, step)?;
    let fine = pi_finite_difference(sigma, h, 0.5 * step)?;
    Ok(fine
        .scale(Complex64::new(4.0 / 3.0, 0.0))
        .sub(&coarse.scale(Complex64::new(1.0 / 3.0, 0.0))))
}

/// Distances between the analytic and finite-difference generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiConsistencyReport {
    pub steps: Vec<f64>,
    pub distances: Vec<f64>,
    pub slope: f64,
    pub richardson_step: f64,
    pub richardson_residual: f64,
    /// Norm of the `−iφ̃(σ) Exp[h]` term, which the finite difference lacks.
    pub phase_gap: f64,
    pub phase_term: Complex64,
}

/// Compares [`apply_pi_without_phase`] with central differences of `ũ`
/// at each of `steps`, and with the Richardson combination at
/// `richardson_step`.
pub fn pi_consistency(
    sigma: &CurrentElement,
    h: &DirectIntegralVector,
    steps: &[f64],
    richardson_step: f64,
    theta_step: f64,
) -> Result<PiConsistencyReport> {
    let analytic = apply_pi_without_phase(sigma, h, theta_step)?;
    let distances = steps
        .iter()
        .map(|&s| Ok(frame_norm(&analytic.sub(&pi_finite_difference(sigma, h, s)?))?.norm))
        .collect::<Result<Vec<f64>>>()?;
    let pts: Vec<(f64, f64)> = steps.iter().copied().zip(distances.iter().copied()).collect();
    let richardson_residual = frame_norm(&analytic.sub(&pi_richardson(sigma, h, richardson_step)?))?.norm;
    let phase_term = -I * phi(sigma);
    Ok(PiConsistencyReport {
        steps: steps.to_vec(),
        distances,
        slope: crate::loglog_slope(&pts),
        richardson_step,
        richardson_residual,
        phase_gap: phase_term.norm() * (0.5 * h.norm_sqr()).exp(),
        phase_term,
    })
}

/// How `ũ(f)ũ(f')` and `ũ(ff')` differ on one coherent vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupCompatibility {
    /// Scalar `c` with `ũ(f)ũ(f') Exp[h] ≈ c · ũ(ff') Exp[h]`.
    pub multiplier: Complex64,
    /// `| |c| − 1 |`.
    pub modulus_defect: f64,
    /// Distance between the two exponent vectors.
    pub vector_residual: f64,
}

pub fn group_compatibility(
    f: &GroupCurrent,
    fp: &GroupCurrent,
    h: &DirectIntegralVector,
) -> Result<GroupCompatibility> {
    let (w_inner, k_inner) = u_parts(fp, h)?;
    let (w_outer, k_composed) = u_parts(f, &k_inner)?;
    let (w_direct, k_direct) = u_parts(&f.mul(fp)?, h)?;
    let multiplier = w_outer * w_inner / w_direct;
    Ok(GroupCompatibility {
        multiplier,
        modulus_defect: (multiplier.norm() - 1.0).abs(),
        vector_residual: k_composed.distance(&k_direct)?,
    })
}
