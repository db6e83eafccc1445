//! Norms of coherent combinations through a reduced frame.
//!
//! Every state in a combination lives in the Fock space over the span of its
//! own base and direction vectors. An orthonormal frame of that span (at most
//! two vectors per term) turns each state into a function of a few complex
//! variables, whose coefficients in the orthonormal monomials
//! `z^α/sqrt(α!)` are
//!
//! ```text
//! Exp[k]    → k^α / sqrt(α!)
//! Ray(v, h) → Σ_i v_i α_i h^{α−e_i} / sqrt(α!)
//! ```
//!
//! The weighted sum of coefficients is formed first and squared afterwards,
//! so near-cancelling combinations (finite differences) keep their relative
//! accuracy. Particle number is cut at the first `P` for which the
//! triangle-inequality tail bound drops below a small fraction of the term
//! sizes.

use ndarray::Array1;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CoherentCombo, CoherentState};
use crate::current::check_mesh;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Vectors whose residual after projection falls below this fraction of
/// their norm do not extend the frame.
const RANK_TOL: f64 = 1e-14;
const TAIL_FRACTION: f64 = 1e-15;
const MAX_CUTOFF: usize = 80;
const MAX_MONOMIALS: f64 = 5e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameNorm {
    pub norm: f64,
    /// Upper bound on the norm of the sectors above `particle_cutoff`.
    pub tail_bound: f64,
    pub frame_dim: usize,
    pub particle_cutoff: usize,
}

pub fn frame_norm(x: &CoherentCombo) -> Result<FrameNorm> {
    let x = x.pruned();
    let terms = x.terms();
    if terms.is_empty() {
        return Ok(FrameNorm {
            norm: 0.0,
            tail_bound: 0.0,
            frame_dim: 0,
            particle_cutoff: 0,
        });
    }
    let first = terms[0].state.base();
    for t in terms {
        for v in state_vectors(&t.state) {
            check_mesh(first.mesh(), v.mesh())?;
            if v.degree() != first.degree() {
                return Err(Error::SpaceMismatch("coherent states of different truncation degree".into()));
            }
        }
    }

    let mut frame: Vec<Array1<Complex64>> = Vec::new();
    let flats: Vec<Vec<Array1<Complex64>>> = terms
        .iter()
        .map(|t| state_vectors(&t.state).iter().map(|v| v.to_flat()).collect())
        .collect();
    for v in flats.iter().flatten() {
        extend_frame(&mut frame, v);
    }
    let coords = |v: &Array1<Complex64>| -> Vec<Complex64> { frame.iter().map(|q| dot(v, q)).collect() };

    let mut kinds = Vec::with_capacity(terms.len());
    let mut scale = 0.0;
    for (t, f) in terms.iter().zip(&flats) {
        let kind = match &t.state {
            CoherentState::Exp(_) => Local::Exp { base: coords(&f[0]) },
            CoherentState::Ray { .. } => Local::Ray {
                base: coords(&f[1]),
                direction: coords(&f[0]),
            },
        };
        scale += t.weight.norm() * t.state.norm_sqr()?.sqrt();
        kinds.push((t.weight, kind));
    }

    let r = frame.len();
    let target = TAIL_FRACTION * scale.max(1.0);
    let mut cutoff = 0;
    let mut tail = tail_bound(&kinds, 0);
    while tail > target && cutoff < MAX_CUTOFF && monomial_count(r, cutoff + 1) <= MAX_MONOMIALS {
        cutoff += 1;
        tail = tail_bound(&kinds, cutoff);
    }

    let tables: Vec<Tables> = kinds.iter().map(|(_, k)| Tables::new(k, r, cutoff)).collect();
    let weights: Vec<Complex64> = kinds.iter().map(|(w, _)| *w).collect();
    let is_ray: Vec<bool> = kinds.iter().map(|(_, k)| matches!(k, Local::Ray { .. })).collect();
    let mut walker = Walker {
        tables: &tables,
        weights: &weights,
        is_ray: &is_ray,
        dims: r,
        buffers: vec![vec![(ZERO, ZERO); terms.len()]; r + 1],
        sum: 0.0,
    };
    for slot in walker.buffers[0].iter_mut() {
        *slot = (ONE, ZERO);
    }
    walker.walk(0, cutoff);
    Ok(FrameNorm {
        norm: walker.sum.sqrt(),
        tail_bound: tail,
        frame_dim: r,
        particle_cutoff: cutoff,
    })
}

fn state_vectors(s: &CoherentState) -> Vec<&crate::directint::DirectIntegralVector> {
    match s {
        CoherentState::Exp(h) => vec![h],
        CoherentState::Ray { direction, base } => vec![direction, base],
    }
}

/// `Σ a_i conj(b_i)`.
fn dot(a: &Array1<Complex64>, b: &Array1<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

fn vec_norm(a: &Array1<Complex64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Classical Gram–Schmidt, applied twice.
fn extend_frame(frame: &mut Vec<Array1<Complex64>>, v: &Array1<Complex64>) {
    let norm = vec_norm(v);
    if norm == 0.0 {
        return;
    }
    let mut w = v.clone();
    for _ in 0..2 {
        for q in frame.iter() {
            let c = dot(&w, q);
            w.zip_mut_with(q, |x, y| *x -= c * y);
        }
    }
    let rest = vec_norm(&w);
    if rest > RANK_TOL * norm {
        frame.push(w.mapv(|x| x / rest));
    }
}

enum Local {
    Exp { base: Vec<Complex64> },
    Ray { base: Vec<Complex64>, direction: Vec<Complex64> },
}

fn local_norms(k: &Local) -> (f64, f64) {
    let n = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    match k {
        Local::Exp { base } => (n(base), 0.0),
        Local::Ray { base, direction } => (n(base), n(direction)),
    }
}

/// `Σ_t |w_t| · ‖sectors above P of state t‖`.
fn tail_bound(kinds: &[(Complex64, Local)], cutoff: usize) -> f64 {
    kinds
        .iter()
        .map(|(w, k)| {
            let (a, vv) = local_norms(k);
            // n-particle norm² of Exp[h] is aⁿ/n!; of Ray(v,h) at most
            // ‖v‖²·(a^{n-1}/(n-1)! + a^{n-1}/(n-2)!).
            let mut sum = 0.0;
            let mut term = 1.0; // a^n / n!
            for n in 1..=cutoff + 400 {
                let prev = term; // a^{n-1}/(n-1)!
                term *= a / n as f64;
                if n > cutoff {
                    sum += match k {
                        Local::Exp { .. } => term,
                        Local::Ray { .. } => vv * prev * n as f64,
                    };
                }
                if n > cutoff && prev < 1e-300 {
                    break;
                }
            }
            w.norm() * sum.sqrt()
        })
        .sum()
}

fn monomial_count(r: usize, p: usize) -> f64 {
    // C(p + r, r)
    (1..=r).fold(1.0, |acc, i| acc * (p + i) as f64 / i as f64)
}

/// Per-dimension factors `e_i(a) = h_i^a/sqrt(a!)` and
/// `d_i(a) = v_i a h_i^{a-1}/sqrt(a!)`.
struct Tables {
    exp: Vec<Vec<Complex64>>,
    ray: Vec<Vec<Complex64>>,
}

impl Tables {
    fn new(k: &Local, r: usize, cutoff: usize) -> Self {
        let (base, direction) = match k {
            Local::Exp { base } => (base, None),
            Local::Ray { base, direction } => (base, Some(direction)),
        };
        let mut exp = Vec::with_capacity(r);
        let mut ray = Vec::with_capacity(r);
        for i in 0..r {
            let h = base[i];
            let mut e = Vec::with_capacity(cutoff + 1);
            let mut d = Vec::with_capacity(cutoff + 1);
            e.push(ONE);
            d.push(ZERO);
            // running h^{a-1}/sqrt((a-1)!)
            let mut prev = ONE;
            for a in 1..=cutoff {
                let s = (a as f64).sqrt();
                let cur = prev * h / s;
                e.push(cur);
                d.push(match direction {
                    Some(v) => v[i] * prev * s,
                    None => ZERO,
                });
                prev = cur;
            }
            exp.push(e);
            ray.push(d);
        }
        Self { exp, ray }
    }
}

struct Walker<'a> {
    tables: &'a [Tables],
    weights: &'a [Complex64],
    is_ray: &'a [bool],
    dims: usize,
    buffers: Vec<Vec<(Complex64, Complex64)>>,
    sum: f64,
}

impl Walker<'_> {
    fn walk(&mut self, dim: usize, remaining: usize) {
        if dim == self.dims {
            let coef: Complex64 = self.buffers[dim]
                .iter()
                .zip(self.weights)
                .zip(self.is_ray)
                .map(|(((a, b), w), ray)| w * if *ray { *b } else { *a })
                .sum();
            self.sum += coef.norm_sqr();
            return;
        }
        for a in 0..=remaining {
            for t in 0..self.weights.len() {
                let (pa, pb) = self.buffers[dim][t];
                let e = self.tables[t].exp[dim][a];
                let d = self.tables[t].ray[dim][a];
                self.buffers[dim + 1][t] = (pa * e, pb * e + pa * d);
            }
            self.walk(dim + 1, remaining - a);
        }
    }
}
