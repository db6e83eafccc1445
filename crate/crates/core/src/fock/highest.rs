//! The vacuum `Ω = Exp[0]` as a highest-weight vector.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{apply_pi, frame_norm, CoherentCombo};
use crate::current::{build_deformed_generators, DiskMesh, TestFunction};
use crate::directint::{phi, DirectIntegralVector, DEFAULT_FD_STEP};
use crate::qnum::{sinh_ratio, DeformationParam};
use crate::Result;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// What `π(e(ξ))`, `π(f(ξ))`, `π(h(ξ))` do to the vacuum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighestWeightReport {
    /// `‖π(e(ξ))Ω‖`.
    pub e_residual: f64,
    /// `|⟨π(f(ξ))Ω, Ω⟩|`.
    pub f_vacuum_component: f64,
    /// Norm of the one-particle part of `π(f(ξ))Ω`.
    pub f_one_particle_norm: f64,
    /// Largest deviation of the one-particle node functions from
    /// `sinh(γξ(x))/sinh γ · λ₀`.
    pub f_node_deviation: f64,
    /// Per-node amplitude of `λ₀` in the one-particle part.
    pub f_node_values: Vec<Complex64>,
    /// `Σ_i w_i · amplitude_i`.
    pub f_amplitude: Complex64,
    /// `⟨π(h(ξ))Ω, Ω⟩`.
    pub h_eigenvalue: Complex64,
    /// `‖π(h(ξ))Ω − h_eigenvalue·Ω‖`.
    pub h_eigen_residual: f64,
    /// Norm of the one-particle part of `π(h(ξ))Ω`.
    pub h_one_particle_residual: f64,
    /// `−i ∫ h(ξ)₁₁ dμ = −i ∫ ξ/2 dμ`.
    pub character: Complex64,
    /// `−i ∫ sinh(γξ)/sinh γ dμ`, the alternative closed form for the
    /// eigenvalue; reported next to `character`, not compared.
    pub sinh_form_value: Complex64,
}

impl HighestWeightReport {
    /// Largest difference between two reports over the node amplitudes and
    /// the scalar entries.
    pub fn distance(&self, other: &HighestWeightReport) -> f64 {
        let nodes = self
            .f_node_values
            .iter()
            .zip(&other.f_node_values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        [
            nodes,
            (self.f_amplitude - other.f_amplitude).norm(),
            (self.h_eigenvalue - other.h_eigenvalue).norm(),
            (self.character - other.character).norm(),
            (self.sinh_form_value - other.sinh_form_value).norm(),
            (self.e_residual - other.e_residual).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn check_highest_weight(
    xi: &TestFunction,
    p: DeformationParam,
    mesh: &Arc<DiskMesh>,
    degree: usize,
) -> Result<HighestWeightReport> {
    let gens = build_deformed_generators(xi, mesh, p)?;
    let omega = DirectIntegralVector::zeros(mesh.clone(), degree);
    let vacuum = CoherentCombo::exp(omega.clone());

    let pe = apply_pi(&gens.e, &omega, DEFAULT_FD_STEP)?;
    let pf = apply_pi(&gens.f, &omega, DEFAULT_FD_STEP)?;
    let ph = apply_pi(&gens.h, &omega, DEFAULT_FD_STEP)?;

    let f_one = pf.one_particle().expect("π(f)Ω has terms")?;
    let root_pi = PI.sqrt();
    let xs = xi.sample(mesh)?;
    let mut f_node_values = Vec::with_capacity(mesh.len());
    let mut f_node_deviation: f64 = 0.0;
    for (node, x) in f_one.nodes().iter().zip(&xs) {
        let amp = node.coeffs()[0] / root_pi;
        let want = sinh_ratio(*x, p);
        let higher = node.coeffs().iter().skip(1).map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        f_node_deviation = f_node_deviation.max((amp - want).norm() * root_pi + higher);
        f_node_values.push(amp);
    }
    let f_amplitude = mesh.integrate_values(&f_node_values);

    let h_eigenvalue = ph.vacuum_component();
    let h_one = ph.one_particle().expect("π(h)Ω has terms")?;
    let h_eigen_residual = frame_norm(&ph.sub(&vacuum.scale(h_eigenvalue)))?.norm;

    let sinh_values: Vec<Complex64> = xs.iter().map(|&x| sinh_ratio(x, p)).collect();
    Ok(HighestWeightReport {
        e_residual: frame_norm(&pe)?.norm,
        f_vacuum_component: pf.vacuum_component().norm(),
        f_one_particle_norm: f_one.norm(),
        f_node_deviation,
        f_node_values,
        f_amplitude,
        h_eigenvalue,
        h_eigen_residual,
        h_one_particle_residual: h_one.norm(),
        character: -I * phi(&gens.h),
        sinh_form_value: -I * mesh.integrate_values(&sinh_values),
    })
}

/// How the weight data respond to scaling every quadrature weight by `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightScalingReport {
    pub scale: f64,
    pub character_ratio: Complex64,
    pub f_amplitude_ratio: Complex64,
    /// `|Λ_s − s·Λ| / |s·Λ|`.
    pub character_rel_error: f64,
    /// Same for the integrated `f` amplitude.
    pub f_amplitude_rel_error: f64,
}

pub fn weight_scaling_check(
    xi: &TestFunction,
    p: DeformationParam,
    mesh: &Arc<DiskMesh>,
    degree: usize,
    scale: f64,
) -> Result<WeightScalingReport> {
    let base = check_highest_weight(xi, p, mesh, degree)?;
    let scaled_mesh = Arc::new(mesh.with_scaled_weights(scale));
    let scaled = check_highest_weight(xi, p, &scaled_mesh, degree)?;
    let rel = |new: Complex64, old: Complex64| {
        let want = old * scale;
        if want.norm() > 0.0 {
            (new - want).norm() / want.norm()
        } else {
            new.norm()
        }
    };
    Ok(WeightScalingReport {
        scale,
        character_ratio: scaled.character / base.character,
        f_amplitude_ratio: scaled.f_amplitude / base.f_amplitude,
        character_rel_error: rel(scaled.character, base.character),
        f_amplitude_rel_error: rel(scaled.f_amplitude, base.f_amplitude),
    })
}
