//! Direct integrals of Bergman spaces over the disk mesh.
//!
//! A vector holds one Bergman vector per node. The quadrature weights enter
//! only through the inner product, so node components stay comparable to
//! single-site vectors.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::Array1;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bergman::{cocycle_vector, mobius_operator, BergmanOperator, BergmanVector};
use crate::current::{check_mesh, exp_current, CurrentElement, DiskMesh, GroupCurrent};
use crate::mat2::Mat2;
use crate::{Error, Result};

/// Default finite-difference step for derivatives at the identity.
pub const DEFAULT_FD_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct DirectIntegralVector {
    mesh: Arc<DiskMesh>,
    nodes: Vec<BergmanVector>,
}

impl DirectIntegralVector {
    pub fn new(mesh: Arc<DiskMesh>, nodes: Vec<BergmanVector>) -> Result<Self> {
        if nodes.len() != mesh.len() {
            return Err(Error::SpaceMismatch(format!(
                "{} node vectors for a mesh of {} nodes",
                nodes.len(),
                mesh.len()
            )));
        }
        if let Some(first) = nodes.first() {
            if nodes.iter().any(|v| v.degree() != first.degree()) {
                return Err(Error::SpaceMismatch("node vectors have different degrees".into()));
            }
        }
        Ok(Self { mesh, nodes })
    }

    pub fn zeros(mesh: Arc<DiskMesh>, degree: usize) -> Self {
        let nodes = vec![BergmanVector::zeros(degree); mesh.len()];
        Self { mesh, nodes }
    }

    /// The same vector at every node.
    pub fn constant(mesh: Arc<DiskMesh>, v: &BergmanVector) -> Self {
        let nodes = vec![v.clone(); mesh.len()];
        Self { mesh, nodes }
    }

    pub fn mesh(&self) -> &Arc<DiskMesh> {
        &self.mesh
    }

    pub fn nodes(&self) -> &[BergmanVector] {
        &self.nodes
    }

    pub fn degree(&self) -> usize {
        self.nodes.first().map_or(0, |v| v.degree())
    }

    /// `Σ_i w_i ⟨u_i, v_i⟩`, conjugate-linear in `other`.
    pub fn inner(&self, other: &DirectIntegralVector) -> Result<Complex64> {
        self.check_same(other)?;
        Ok(self
            .nodes
            .iter()
            .zip(&other.nodes)
            .zip(self.mesh.weights())
            .map(|((u, v), w)| u.inner(v) * w)
            .sum())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.nodes
            .iter()
            .zip(self.mesh.weights())
            .map(|(v, w)| v.norm_sqr() * w)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn add(&self, other: &DirectIntegralVector) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DirectIntegralVector) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            mesh: self.mesh.clone(),
            nodes: self
                .nodes
                .iter()
                .map(|v| BergmanVector::from_coeffs(v.coeffs().mapv(|c| c * s)))
                .collect(),
        }
    }

    pub fn distance(&self, other: &DirectIntegralVector) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// Coordinates `sqrt(w_i)·c_{i,n}` in an orthonormal basis of the whole
    /// space, node-major.
    pub fn to_flat(&self) -> Array1<Complex64> {
        self.nodes
            .iter()
            .zip(self.mesh.weights())
            .flat_map(|(v, w)| {
                let s = w.sqrt();
                v.coeffs().iter().map(move |c| c * s).collect::<Vec<_>>()
            })
            .collect()
    }

    /// Inverse of [`DirectIntegralVector::to_flat`].
    pub fn from_flat(mesh: Arc<DiskMesh>, degree: usize, flat: &Array1<Complex64>) -> Result<Self> {
        let stride = degree + 1;
        if flat.len() != stride * mesh.len() {
            return Err(Error::SpaceMismatch(format!(
                "flat vector of length {} for {} nodes of degree {}",
                flat.len(),
                mesh.len(),
                degree
            )));
        }
        let nodes = mesh
            .weights()
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let s = 1.0 / w.sqrt();
                BergmanVector::from_coeffs(
                    flat.slice(ndarray::s![i * stride..(i + 1) * stride]).mapv(|c| c * s),
                )
            })
            .collect();
        Ok(Self { mesh, nodes })
    }

    pub fn is_finite(&self) -> bool {
        self.nodes.iter().all(|v| v.is_finite())
    }

    fn check_same(&self, other: &DirectIntegralVector) -> Result<()> {
        check_mesh(&self.mesh, &other.mesh)?;
        if self.degree() != other.degree() {
            return Err(Error::SpaceMismatch(format!(
                "truncation degrees {} and {}",
                self.degree(),
                other.degree()
            )));
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &DirectIntegralVector,
        f: impl Fn(&Array1<Complex64>, &Array1<Complex64>) -> Array1<Complex64>,
    ) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            mesh: self.mesh.clone(),
            nodes: self
                .nodes
                .iter()
                .zip(&other.nodes)
                .map(|(a, b)| BergmanVector::from_coeffs(f(a.coeffs(), b.coeffs())))
                .collect(),
        })
    }
}

/// Block-diagonal operator, one block per node.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectIntegralOperator {
    mesh: Arc<DiskMesh>,
    blocks: Vec<BergmanOperator>,
}

impl DirectIntegralOperator {
    pub fn new(mesh: Arc<DiskMesh>, blocks: Vec<BergmanOperator>) -> Result<Self> {
        if blocks.len() != mesh.len() {
            return Err(Error::SpaceMismatch(format!(
                "{} blocks for a mesh of {} nodes",
                blocks.len(),
                mesh.len()
            )));
        }
        Ok(Self { mesh, blocks })
    }

    pub fn identity(mesh: Arc<DiskMesh>, degree: usize) -> Self {
        let blocks = vec![BergmanOperator::identity(degree); mesh.len()];
        Self { mesh, blocks }
    }

    pub fn mesh(&self) -> &Arc<DiskMesh> {
        &self.mesh
    }

    pub fn blocks(&self) -> &[BergmanOperator] {
        &self.blocks
    }

    pub fn degree(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.degree())
    }

    pub fn apply(&self, v: &DirectIntegralVector) -> Result<DirectIntegralVector> {
        check_mesh(&self.mesh, &v.mesh)?;
        if self.degree() != v.degree() {
            return Err(Error::SpaceMismatch("operator and vector degrees differ".into()));
        }
        Ok(DirectIntegralVector {
            mesh: v.mesh.clone(),
            nodes: self.blocks.iter().zip(&v.nodes).map(|(b, x)| b.apply(x)).collect(),
        })
    }

    /// `a·self + b·other`, blockwise.
    pub fn combine(&self, a: f64, other: &DirectIntegralOperator, b: f64) -> Result<Self> {
        check_mesh(&self.mesh, &other.mesh)?;
        Ok(Self {
            mesh: self.mesh.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(x, y)| BergmanOperator::from_matrix(x.matrix() * a + y.matrix() * b))
                .collect(),
        })
    }

    /// Largest entry modulus of `self − other` over all blocks.
    pub fn max_distance(&self, other: &DirectIntegralOperator) -> Result<f64> {
        check_mesh(&self.mesh, &other.mesh)?;
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(x, y)| x.matrix().iter().zip(y.matrix().iter()).map(|(p, q)| (p - q).norm()).collect::<Vec<_>>())
            .fold(0.0, f64::max))
    }

    pub fn max_norm(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.matrix().iter().map(|z| z.norm()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }
}

pub fn lift_operator(f: &GroupCurrent, degree: usize) -> Result<DirectIntegralOperator> {
    let blocks = node_map(f.values(), |g| mobius_operator(g, degree))?;
    Ok(DirectIntegralOperator {
        mesh: f.mesh().clone(),
        blocks,
    })
}

pub fn lift_cocycle(f: &GroupCurrent, degree: usize) -> Result<DirectIntegralVector> {
    let nodes = node_map(f.values(), |g| cocycle_vector(g, degree))?;
    Ok(DirectIntegralVector {
        mesh: f.mesh().clone(),
        nodes,
    })
}

fn node_map<T: Send>(values: &[Mat2], f: impl Fn(&Mat2) -> Result<T> + Sync) -> Result<Vec<T>> {
    values
        .par_iter()
        .enumerate()
        .map(|(i, g)| f(g).map_err(|e| Error::at_node(i, e)))
        .collect()
}

fn check_step(step: f64) -> Result<()> {
    if step.is_finite() && step > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {step}")))
    }
}

/// `[Õ(e^{tσ}) − Õ(e^{−tσ})] / 2t` without extrapolation.
pub fn theta_central(sigma: &CurrentElement, degree: usize, step: f64) -> Result<DirectIntegralOperator> {
    check_step(step)?;
    let plus = lift_operator(&exp_current(sigma, step), degree)?;
    let minus = lift_operator(&exp_current(sigma, -step), degree)?;
    let h = 0.5 / step;
    plus.combine(h, &minus, -h)
}

/// Derivative of `t ↦ Õ(e^{tσ})` at `t = 0`: central differences at `step`
/// and `step/2` combined by one Richardson level.
pub fn theta(sigma: &CurrentElement, degree: usize, step: f64) -> Result<DirectIntegralOperator> {
    let coarse = theta_central(sigma, degree, step)?;
    let fine = theta_central(sigma, degree, 0.5 * step)?;
    fine.combine(4.0 / 3.0, &coarse, -1.0 / 3.0)
}

/// Derivative of `t ↦ b̃(e^{tσ})` at `t = 0`: the node value is
/// `σ₂₁(x)·λ₀`.
pub fn nu(sigma: &CurrentElement, degree: usize) -> DirectIntegralVector {
    let root_pi = PI.sqrt();
    let nodes = (0..sigma.mesh().len())
        .map(|i| {
            let mut c = Array1::zeros(degree + 1);
            c[0] = sigma.lambda_lower(i) * root_pi;
            BergmanVector::from_coeffs(c)
        })
        .collect();
    DirectIntegralVector {
        mesh: sigma.mesh().clone(),
        nodes,
    }
}

/// Central-difference path for [`nu`], used to cross-check the closed form.
pub fn nu_finite_difference(sigma: &CurrentElement, degree: usize, step: f64) -> Result<DirectIntegralVector> {
    check_step(step)?;
    let plus = lift_cocycle(&exp_current(sigma, step), degree)?;
    let minus = lift_cocycle(&exp_current(sigma, -step), degree)?;
    Ok(plus.sub(&minus)?.scale(Complex64::new(0.5 / step, 0.0)))
}

/// `∫ σ₁₁ dμ`.
pub fn phi(sigma: &CurrentElement) -> Complex64 {
    let alpha: Vec<Complex64> = (0..sigma.mesh().len()).map(|i| sigma.alpha(i)).collect();
    sigma.mesh().integrate_values(&alpha)
}
