//! The verification suites behind each subcommand.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use ndarray::Array1;
use qcurrent::bergman::{
    expansion_ratio, pseudo_unitary, verify_cocycle_identity, verify_homomorphism, verify_unitary, BergmanVector,
    GroupElement2x2,
};
use qcurrent::current::{
    build_classical_generators, build_deformed_generators, compare_deformation_paths, deform_current,
    pointwise_residual, CurrentElement, DiskMesh, GroupCurrent, TestFunction,
};
use qcurrent::directint::{nu, nu_finite_difference, theta, DirectIntegralVector};
use qcurrent::fock::dense::dense_backend_crosscheck;
use qcurrent::fock::{
    apply_u, check_highest_weight, gram_norm_sqr, group_compatibility, pi_consistency, weight_scaling_check,
    CoherentCombo, CoherentState,
};
use qcurrent::irreps::{build_spin_irrep_with_cap, classical_distance, commutator_residual, deform, Spin};
use qcurrent::mat2::Mat2;
use qcurrent::qnum::DeformationParam;
use qcurrent::{loglog_slope, Complex64};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::report::{SuiteBuilder, SuiteReport, TableRow};

pub type SuiteOutput = (SuiteReport, BTreeMap<String, f64>);

/// Scan parameters for every `q → 1` limit.
pub const GAMMA_SCAN: [f64; 3] = [1e-1, 1e-2, 1e-3];
/// Step schedule for the generator consistency scan.
pub const PI_STEPS: [f64; 4] = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
/// Cocycle truncation sweep.
pub const DEGREE_SWEEP: [usize; 3] = [16, 32, 64];
/// Deviations below this are rounding; a scan that never rises above it
/// is exact and has no slope.
const EXACT_FLOOR: f64 = 1e-13;
/// Rounding level of the cocycle residual on the sweep.
const SWEEP_FLOOR: f64 = 1e-14;
/// Tolerance for checks that must come out exactly zero.
const EXACT: f64 = f64::MIN_POSITIVE;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn param(q: f64) -> Result<DeformationParam, String> {
    DeformationParam::new(q).map_err(|e| e.to_string())
}

fn mesh(cfg: &RunConfig) -> Result<Arc<DiskMesh>, String> {
    DiskMesh::new(cfg.radial_order, cfg.angular_order)
        .map(Arc::new)
        .map_err(|e| e.to_string())
}

fn rng(cfg: &RunConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Disk-preserving element with `|c/a| = tanh s ≤ max_ratio`.
fn random_element(rng: &mut ChaCha8Rng, max_ratio: f64) -> GroupElement2x2 {
    pseudo_unitary(
        rng.random_range(0.0..max_ratio.atanh()),
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
    )
}

fn random_current(rng: &mut ChaCha8Rng, mesh: &Arc<DiskMesh>, max_ratio: f64) -> Result<GroupCurrent, String> {
    let values = (0..mesh.len()).map(|_| random_element(rng, max_ratio)).collect();
    GroupCurrent::new(mesh.clone(), values).map_err(|e| e.to_string())
}

/// Random vector supported on degrees `≤ support`, scaled to `norm`.
fn random_vector(
    rng: &mut ChaCha8Rng,
    mesh: &Arc<DiskMesh>,
    degree: usize,
    support: usize,
    norm: f64,
) -> Result<DirectIntegralVector, String> {
    let nodes = (0..mesh.len())
        .map(|_| {
            BergmanVector::from_coeffs(Array1::from_shape_fn(degree + 1, |n| {
                if n <= support {
                    cx(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                } else {
                    cx(0.0, 0.0)
                }
            }))
        })
        .collect();
    let v = DirectIntegralVector::new(mesh.clone(), nodes).map_err(|e| e.to_string())?;
    let n = v.norm();
    Ok(v.scale(cx(norm / n, 0.0)))
}

fn field(mesh: &Arc<DiskMesh>, f: impl Fn(Complex64) -> Mat2) -> Result<CurrentElement, String> {
    CurrentElement::new(mesh.clone(), mesh.nodes().iter().map(|&x| f(x)).collect()).map_err(|e| e.to_string())
}

/// Generic non-trivial current used by the derivative checks.
fn sample_sigma(mesh: &Arc<DiskMesh>) -> Result<CurrentElement, String> {
    field(mesh, |x| {
        Mat2::new(cx(0.2, 0.1) * x, cx(0.3, -0.1), cx(0.4, 0.2) + x * 0.5, -cx(0.2, 0.1) * x)
    })
}

/// Short name for a test function, prefixed by its position in the config.
pub fn label(k: usize, tf: &TestFunction) -> String {
    let kind = match tf {
        TestFunction::Constant { value } => format!("constant_{value}"),
        TestFunction::Coordinate => "coordinate".into(),
        TestFunction::RadialSquared => "radial_squared".into(),
        TestFunction::GaussianBump { amplitude, width } => format!("gaussian_{amplitude}_{width}"),
        TestFunction::Sampled { .. } => "sampled".into(),
    };
    format!("tf{k}_{kind}")
}

/// Records a `γ → 0` scan and checks that its log-log slope is
/// `target ± tol`. A scan that stays at rounding level is exact and passes.
fn slope_check(b: &mut SuiteBuilder, name: &str, table: &str, points: Vec<(f64, f64)>, target: f64, tol: f64) {
    let exact = points.iter().all(|(_, d)| *d < EXACT_FLOOR);
    let slope = loglog_slope(&points);
    b.table(
        table,
        "gamma",
        points.iter().map(|&(g, d)| TableRow { parameter: g, value: slope, residual: d }).collect(),
    );
    b.note(&format!("{name} slope"), if exact { None } else { Some(slope) });
    b.check::<String>(name, tol, || Ok(if exact { 0.0 } else { (slope - target).abs() }));
}

pub fn verify_algebra(cfg: &RunConfig) -> SuiteOutput {
    let mut b = SuiteBuilder::new("verify_algebra");
    let tol = &cfg.tolerances;

    for &q in &cfg.q_values {
        let mut rows = Vec::new();
        let mut scaled: f64 = 0.0;
        b.check(&format!("commutator q={q}"), tol.commutator, || {
            let p = param(q)?;
            let mut worst: f64 = 0.0;
            for j in cfg.spin_max.up_to() {
                let irrep = build_spin_irrep_with_cap(j, cfg.dim_cap).map_err(|e| e.to_string())?;
                let r = commutator_residual(&deform(&irrep, p));
                worst = worst.max(r.max_abs());
                scaled = scaled.max(r.max_scaled());
                rows.push(TableRow { parameter: j.value(), value: r.max_scaled(), residual: r.max_abs() });
            }
            Ok::<_, String>(worst)
        });
        b.note(&format!("commutator q={q} scaled residual"), scaled);
        b.table(&format!("commutator_q{q}"), "spin", rows);
    }

    // The spin-1/2 field ξ ≡ 1 with center 1/2 is the one smeared triple
    // whose node-wise brackets close.
    for &q in &cfg.q_values {
        b.check(&format!("current relations q={q}"), tol.commutator, || {
            let m = mesh(cfg)?;
            let p = param(q)?;
            let classical = build_classical_generators(&TestFunction::constant(1.0), &m).map_err(|e| e.to_string())?;
            let center = vec![cx(0.5, 0.0); m.len()];
            let d = deform_current(&classical, &center, p).map_err(|e| e.to_string())?;
            pointwise_residual(&d, p).map(|r| r.max_abs()).map_err(|e| e.to_string())
        });
    }

    if let Ok(m) = mesh(cfg) {
        for (k, tf) in cfg.test_functions.iter().enumerate() {
            for &q in &cfg.q_values {
                if let Ok(r) = param(q).and_then(|p| compare_deformation_paths(tf, &m, p).map_err(|e| e.to_string())) {
                    b.note(&format!("deformation paths {} q={q}", label(k, tf)), r);
                }
            }
        }
    }

    let scan_spin = cfg.spin_max.max(Spin::from_twice(2));
    match build_spin_irrep_with_cap(scan_spin, cfg.dim_cap.max(3)) {
        Ok(irrep) => {
            let pts = GAMMA_SCAN
                .iter()
                .map(|&g| (g, classical_distance(&deform(&irrep, DeformationParam::from_gamma(g).unwrap()))))
                .collect();
            b.note("irrep classical limit spin", scan_spin.value());
            slope_check(&mut b, "irrep classical limit", "irrep_classical_limit", pts, tol.slope_target, tol.slope);
        }
        Err(e) => b.check("irrep classical limit", tol.slope, || Err(e.to_string())),
    }

    match current_scan(cfg) {
        Ok(pts) => slope_check(
            &mut b,
            "current classical limit",
            "current_classical_limit",
            pts,
            tol.slope_target,
            tol.slope,
        ),
        Err(e) => b.check("current classical limit", tol.slope, || Err(e)),
    }
    b.finish()
}

/// Largest generator distance over the configured test functions.
fn current_scan(cfg: &RunConfig) -> Result<Vec<(f64, f64)>, String> {
    let m = mesh(cfg)?;
    let mut pts = Vec::new();
    for &g in &GAMMA_SCAN {
        let p = DeformationParam::from_gamma(g).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for tf in &cfg.test_functions {
            let classical = build_deformed_generators(tf, &m, DeformationParam::classical()).map_err(|e| e.to_string())?;
            let d = build_deformed_generators(tf, &m, p).map_err(|e| e.to_string())?;
            worst = worst.max(d.distance(&classical).map_err(|e| e.to_string())?);
        }
        pts.push((g, worst));
    }
    Ok(pts)
}

pub fn verify_cocycle(cfg: &RunConfig) -> SuiteOutput {
    let mut b = SuiteBuilder::new("verify_cocycle");
    let tol = &cfg.tolerances;
    let n = cfg.bergman_degree;
    let mut draw = rng(cfg, 2);
    let pairs: Vec<(Mat2, Mat2)> = (0..cfg.samples)
        .map(|_| (random_element(&mut draw, cfg.max_expansion_ratio), random_element(&mut draw, cfg.max_expansion_ratio)))
        .collect();
    b.note(
        "max expansion ratio drawn",
        pairs.iter().map(|(g, gp)| expansion_ratio(g).max(expansion_ratio(gp))).fold(0.0, f64::max),
    );

    b.check("cocycle identity pairs", EXACT, || {
        let id = Mat2::identity();
        let mut worst: f64 = 0.0;
        for (g, _) in pairs.iter().take(10) {
            worst = worst
                .max(verify_cocycle_identity(&id, g, n)?.residual)
                .max(verify_cocycle_identity(g, &id, n)?.residual);
        }
        Ok::<_, qcurrent::Error>(worst)
    });

    let mut tail: f64 = 0.0;
    b.check("cocycle random pairs", tol.cocycle, || {
        let mut worst: f64 = 0.0;
        for (k, (g, gp)) in pairs.iter().enumerate() {
            let r = verify_cocycle_identity(g, gp, n).map_err(|e| format!("sample {k}: {e}"))?;
            worst = worst.max(r.residual);
            tail = tail.max(r.tail_bound);
        }
        Ok::<_, String>(worst)
    });
    b.note("cocycle tail bound", tail);

    let mut tail: f64 = 0.0;
    let mut over = 0usize;
    b.check("homomorphism random pairs", tol.homomorphism, || {
        let mut worst: f64 = 0.0;
        for (k, (g, gp)) in pairs.iter().enumerate() {
            let r = verify_homomorphism(g, gp, n).map_err(|e| format!("sample {k}: {e}"))?;
            worst = worst.max(r.residual);
            tail = tail.max(r.tail_bound);
            over += usize::from(!(r.residual < tol.homomorphism));
        }
        Ok::<_, String>(worst)
    });
    b.note("homomorphism tail bound", tail);
    b.note("homomorphism pairs over tolerance", over);

    let mut tail: f64 = 0.0;
    let mut r = rng(cfg, 8);
    let boosts: Vec<Mat2> = std::iter::once(pseudo_unitary(cfg.unitary_max_rapidity, 0.0, 0.0))
        .chain((0..cfg.samples).map(|_| {
            pseudo_unitary(
                r.random_range(0.0..cfg.unitary_max_rapidity),
                r.random_range(0.0..TAU),
                r.random_range(0.0..TAU),
            )
        }))
        .collect();
    b.check("pseudo-unitarity", tol.unitary, || {
        let mut worst: f64 = 0.0;
        for (k, g) in boosts.iter().enumerate() {
            let r = verify_unitary(g, n).map_err(|e| format!("sample {k}: {e}"))?;
            worst = worst.max(r.residual);
            tail = tail.max(r.tail_bound);
        }
        Ok::<_, String>(worst)
    });
    b.note("pseudo-unitarity tail bound", tail);

    let sweep_pairs = &pairs[..pairs.len().min(20)];
    let mut rows = Vec::new();
    // Counts steps where the residual grows while still above rounding.
    b.check("degree sweep decreasing", 1.0, || {
        let mut prev = f64::INFINITY;
        let mut increases = 0usize;
        for &deg in &DEGREE_SWEEP {
            let mut worst: f64 = 0.0;
            let mut bound: f64 = 0.0;
            for (g, gp) in sweep_pairs {
                let r = verify_cocycle_identity(g, gp, deg)?;
                worst = worst.max(r.residual);
                bound = bound.max(r.tail_bound);
            }
            rows.push(TableRow { parameter: deg as f64, value: bound, residual: worst });
            increases += usize::from(worst >= prev && worst > SWEEP_FLOOR);
            prev = worst;
        }
        Ok::<_, qcurrent::Error>(increases as f64)
    });
    b.table("cocycle_degree_sweep", "degree", rows);
    b.finish()
}

pub fn verify_rep(cfg: &RunConfig) -> SuiteOutput {
    let mut b = SuiteBuilder::new("verify_rep");
    let m = match mesh(cfg) {
        Ok(m) => m,
        Err(e) => {
            b.check("mesh", 0.0, || Err(e));
            return b.finish();
        }
    };
    let tol = &cfg.tolerances;
    let deg = cfg.rep_degree;
    let support = deg.min(8);
    if let Some(w) = m.exactness_warning(deg) {
        b.note("mesh exactness warning", w);
    }

    b.check::<String>("total weight", tol.quadrature, || Ok((m.total_weight() - PI).abs()));
    b.check::<String>("second moment", tol.quadrature, || {
        Ok((m.integrate(|x| x.norm_sqr().into()) - PI / 2.0).norm())
    });
    b.check::<String>("first moment", tol.quadrature, || Ok(m.integrate(|x| x).norm()));
    b.check::<String>("unit function norm", tol.quadrature, || {
        Ok((BergmanVector::unit_function(deg).norm_sqr() - PI).abs())
    });
    b.check("nu norm", tol.nu_norm, || {
        let s = CurrentElement::constant(m.clone(), Mat2::from_real(0.0, 0.0, 1.0, 0.0));
        Ok::<_, String>((nu(&s, deg).norm_sqr() - PI * PI).abs())
    });

    let mut rows = Vec::new();
    b.check("nu finite difference slope", tol.slope, || {
        let sigma = sample_sigma(&m)?;
        let exact = nu(&sigma, deg);
        let mut pts = Vec::new();
        for step in [4.0 * cfg.fd_step, 2.0 * cfg.fd_step, cfg.fd_step] {
            let fd = nu_finite_difference(&sigma, deg, step).map_err(|e| e.to_string())?;
            pts.push((step, fd.distance(&exact).map_err(|e| e.to_string())?));
        }
        let slope = loglog_slope(&pts);
        rows = pts.iter().map(|&(s, d)| TableRow { parameter: s, value: slope, residual: d }).collect();
        Ok::<_, String>((slope - tol.slope_target).abs())
    });
    b.table("nu_step_scan", "step", rows);

    let mut r = rng(cfg, 3);
    b.check("u isometry", tol.isometry, || {
        let mut worst: f64 = 0.0;
        for _ in 0..cfg.coherent_samples {
            let f = random_current(&mut r, &m, cfg.max_expansion_ratio)?;
            let norm = r.random_range(0.1..=1.0);
            let h = random_vector(&mut r, &m, deg, support, norm)?;
            let out = apply_u(&f, &h).map_err(|e| e.to_string())?;
            let got = gram_norm_sqr(&out).map_err(|e| e.to_string())?.sqrt();
            worst = worst.max((got - (0.5 * h.norm_sqr()).exp()).abs());
        }
        Ok::<_, String>(worst)
    });

    let mut r = rng(cfg, 4);
    b.check("group compatibility", tol.group_compatibility, || {
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let f = random_current(&mut r, &m, cfg.max_expansion_ratio)?;
            let fp = random_current(&mut r, &m, cfg.max_expansion_ratio)?;
            let h = random_vector(&mut r, &m, deg, support.min(6), 0.7)?;
            let c = group_compatibility(&f, &fp, &h).map_err(|e| e.to_string())?;
            worst = worst.max(c.vector_residual).max(c.modulus_defect);
        }
        Ok::<_, String>(worst)
    });

    let mut r = rng(cfg, 5);
    let report = sample_sigma(&m).and_then(|sigma| {
        let h = random_vector(&mut r, &m, deg, support.min(6), 0.6)?;
        pi_consistency(&sigma, &h, &PI_STEPS, cfg.fd_step, cfg.fd_step).map_err(|e| e.to_string())
    });
    match report {
        Ok(rep) => {
            b.table(
                "pi_step_scan",
                "step",
                rep.steps
                    .iter()
                    .zip(&rep.distances)
                    .map(|(&s, &d)| TableRow { parameter: s, value: rep.slope, residual: d })
                    .collect(),
            );
            b.check::<String>("pi finite difference slope", tol.slope, || Ok((rep.slope - tol.slope_target).abs()));
            b.check::<String>("pi richardson", tol.pi_richardson, || Ok(rep.richardson_residual));
            b.note("pi phase gap", rep.phase_gap);
            b.note("pi phase term", rep.phase_term);
        }
        Err(e) => {
            b.check("pi finite difference slope", tol.slope, || Err(e.clone()));
            b.check("pi richardson", tol.pi_richardson, || Err(e));
        }
    }

    let tdeg = cfg.theta_degree;
    b.check("theta linearity", tol.theta_linearity, || {
        let s1 = field(&m, |x| Mat2::new(cx(0.3, 0.0) * x, cx(0.1, 0.2), x, cx(-0.3, 0.0) * x))?;
        let s2 = field(&m, |x| Mat2::new(cx(-0.1, 0.2), x.conj(), cx(0.2, 0.0), cx(0.1, -0.2)))?;
        let (a, c) = (0.7, -1.3);
        let run = || -> qcurrent::Result<f64> {
            let combo = s1.scale(cx(a, 0.0)).add(&s2.scale(cx(c, 0.0)))?;
            let lhs = theta(&combo, tdeg, cfg.fd_step)?;
            let rhs = theta(&s1, tdeg, cfg.fd_step)?.combine(a, &theta(&s2, tdeg, cfg.fd_step)?, c)?;
            Ok(lhs.max_distance(&rhs)? / lhs.max_norm().max(1.0))
        };
        run().map_err(|e| e.to_string())
    });

    let mut r = rng(cfg, 6);
    let d = cfg.dense_check_dims;
    let mut dense_note = None;
    b.check("dense backend", tol.dense_slack, || {
        let dm = Arc::new(DiskMesh::new(d.radial_order, d.angular_order).map_err(|e| e.to_string())?);
        let mut states = Vec::with_capacity(d.states);
        for k in 0..d.states {
            let norm = r.random_range(0.0..=d.max_norm);
            let base = random_vector(&mut r, &dm, d.degree, d.degree, norm)?;
            if k % 2 == 0 {
                states.push(CoherentState::Exp(base));
            } else {
                let norm = r.random_range(0.1..=1.0);
                let direction = random_vector(&mut r, &dm, d.degree, d.degree, norm)?;
                states.push(CoherentState::Ray { direction, base });
            }
        }
        let c = dense_backend_crosscheck(&states, d.particles).map_err(|e| e.to_string())?;
        dense_note = Some(c);
        Ok::<_, String>(c.max_excess.max(0.0))
    });
    if let Some(c) = dense_note {
        b.note("dense backend", c);
    }

    let mut r = rng(cfg, 7);
    b.check("gram positivity", EXACT, || {
        let mut lowest = f64::INFINITY;
        for _ in 0..10 {
            let mut x = CoherentCombo::zero();
            for k in 0..4 {
                let h = random_vector(&mut r, &m, deg.min(3), deg.min(3), 0.6)?;
                let w = cx(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
                if k % 2 == 0 {
                    x.push(w, CoherentState::Exp(h));
                } else {
                    let v = random_vector(&mut r, &m, deg.min(3), deg.min(3), 0.4)?;
                    x.push(w, CoherentState::Ray { direction: v, base: h });
                }
            }
            lowest = lowest.min(gram_norm_sqr(&x).map_err(|e| e.to_string())?);
        }
        Ok::<_, String>((-lowest).max(0.0))
    });
    b.finish()
}

pub fn highest_weight(cfg: &RunConfig) -> SuiteOutput {
    let mut b = SuiteBuilder::new("highest_weight");
    let m = match mesh(cfg) {
        Ok(m) => m,
        Err(e) => {
            b.check("mesh", 0.0, || Err(e));
            return b.finish();
        }
    };
    let tol = &cfg.tolerances;
    let deg = cfg.rep_degree;

    for (k, tf) in cfg.test_functions.iter().enumerate() {
        let name = label(k, tf);
        for &q in &cfg.q_values {
            let tag = format!("{name} q={q}");
            let rep = param(q).and_then(|p| check_highest_weight(tf, p, &m, deg).map_err(|e| e.to_string()));
            let rep = match rep {
                Ok(r) => r,
                Err(e) => {
                    b.check(&format!("highest weight {tag}"), 0.0, || Err(e));
                    continue;
                }
            };
            b.check::<String>(&format!("raising annihilates vacuum {tag}"), tol.raising, || Ok(rep.e_residual));
            b.check::<String>(&format!("lowering vacuum component {tag}"), tol.vacuum_component, || {
                Ok(rep.f_vacuum_component)
            });
            b.check::<String>(&format!("lowering node values {tag}"), tol.node_values, || Ok(rep.f_node_deviation));
            b.check::<String>(&format!("cartan eigenvector {tag}"), tol.cartan_one_particle, || {
                Ok(rep.h_eigen_residual.max(rep.h_one_particle_residual))
            });
            b.check::<String>(&format!("cartan eigenvalue {tag}"), tol.cartan_one_particle, || {
                Ok((rep.h_eigenvalue - rep.character).norm())
            });
            b.note(
                &format!("eigenvalue {tag}"),
                serde_json::json!({
                    "computed": rep.h_eigenvalue,
                    "character": rep.character,
                    "sinh_form": rep.sinh_form_value,
                    "discrepancy": (rep.character - rep.sinh_form_value).norm(),
                }),
            );

            b.check(&format!("weight scaling {tag}"), tol.weight_scaling, || {
                let p = param(q)?;
                let r = weight_scaling_check(tf, p, &m, deg, cfg.weight_scale).map_err(|e| e.to_string())?;
                Ok::<_, String>(r.character_rel_error.max(r.f_amplitude_rel_error))
            });
        }

        let scan = (|| -> qcurrent::Result<Vec<(f64, f64)>> {
            let classical = check_highest_weight(tf, DeformationParam::classical(), &m, deg)?;
            GAMMA_SCAN
                .iter()
                .map(|&g| Ok((g, check_highest_weight(tf, DeformationParam::from_gamma(g)?, &m, deg)?.distance(&classical))))
                .collect()
        })();
        let check = format!("classical limit {name}");
        match scan {
            Ok(pts) => slope_check(
                &mut b,
                &check,
                &format!("classical_limit_{name}"),
                pts,
                tol.slope_target,
                tol.slope,
            ),
            Err(e) => b.check(&check, tol.slope, || Err(e)),
        }
    }
    b.finish()
}

/// Node positions, weights and sampled test functions, one row per node.
pub fn dump_mesh(cfg: &RunConfig, path: &std::path::Path) -> Result<(), String> {
    let m = mesh(cfg)?;
    let samples = cfg
        .test_functions
        .iter()
        .map(|tf| tf.sample(&m).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut w = csv::Writer::from_path(path).map_err(|e| e.to_string())?;
    let mut header = vec!["node_re".to_string(), "node_im".into(), "weight".into()];
    for (k, tf) in cfg.test_functions.iter().enumerate() {
        let l = label(k, tf);
        header.push(format!("{l}_re"));
        header.push(format!("{l}_im"));
    }
    w.write_record(&header).map_err(|e| e.to_string())?;
    for (i, (x, wt)) in m.nodes().iter().zip(m.weights()).enumerate() {
        let mut row = vec![x.re.to_string(), x.im.to_string(), wt.to_string()];
        for s in &samples {
            row.push(s[i].re.to_string());
            row.push(s[i].im.to_string());
        }
        w.write_record(&row).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        RunConfig {
            spin_max: Spin::from_twice(4),
            samples: 10,
            coherent_samples: 4,
            bergman_degree: 64,
            rep_degree: 24,
            max_expansion_ratio: 0.2,
            radial_order: 4,
            angular_order: 6,
            ..RunConfig::default()
        }
    }

    #[test]
    fn algebra_suite_passes_on_small_config() {
        let (r, _) = verify_algebra(&small());
        assert!(r.passed, "{r:#?}");
        assert!(r.checks.iter().any(|c| c.name == "irrep classical limit"));
    }

    #[test]
    fn classical_q_is_exact() {
        let cfg = RunConfig { q_values: vec![1.0], ..small() };
        let (r, _) = verify_algebra(&cfg);
        for c in r.checks.iter().filter(|c| c.name.starts_with("commutator")) {
            assert!(c.passed && c.residual < 1e-14, "{c:?}");
        }
    }

    #[test]
    fn cocycle_suite_passes() {
        let (r, _) = verify_cocycle(&small());
        assert!(r.passed, "{r:#?}");
        let id = r.checks.iter().find(|c| c.name == "cocycle identity pairs").unwrap();
        assert_eq!(id.residual, 0.0);
    }

    #[test]
    fn suites_are_seed_deterministic() {
        let cfg = small();
        assert_eq!(verify_cocycle(&cfg).0, verify_cocycle(&cfg).0);
        let other = RunConfig { seed: cfg.seed + 1, ..cfg.clone() };
        assert_ne!(verify_cocycle(&cfg).0, verify_cocycle(&other).0);
    }

    #[test]
    fn labels_are_distinct() {
        let tfs = RunConfig::default().test_functions;
        assert_ne!(label(0, &tfs[0]), label(1, &tfs[1]));
        assert_eq!(label(0, &tfs[0]), "tf0_constant_1");
    }
}
