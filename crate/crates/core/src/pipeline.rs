//! From a Lie algebra to a naive classical limit, in five stages:
//! actions per `N`, representation solutions, the Kirillov–Kostant algebra and
//! its quantization maps, the kernel chain, and the cone over the resulting
//! discrete diagram.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

// float methods for no_std builds; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Error;
use crate::limits::{check_cone, ConeCheck, ConeDescriptor, Leg};
use crate::linalg::{numerical_rank, Matrix, RANK_TOLERANCE};
use crate::model::{action_value, eom_residual, solve_matrix_model, ModelConfig, SolveOptions};
use crate::poisson::{jacobi_defect, poisson_bracket, PoissonStructure, StructureConstants};
use crate::poly::Polynomial;
use crate::quantize::{defect, exponents_of_degree, QuantizationMap, Route};
use crate::reps::{hbar_for_k, su2_irrep, validate_repset, RepSet};
use crate::span::{kernel_dim_closed_form, sphere_basis, KernelChain};
use crate::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOptions {
    /// Degree bound of the subspace on which kernels are compared.
    pub degree: u32,
    /// Re-solve the equation of motion starting from each representation.
    pub solve: bool,
    pub solver: SolveOptions,
    /// Tolerance on representation defects, EOM residuals and exact defects.
    pub tolerance: f64,
    /// User representations, one per entry of the `k` list; su(2) irreps when absent.
    pub reps: Option<Vec<RepSet>>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            degree: 3,
            solve: true,
            solver: SolveOptions::default(),
            tolerance: 1e-10,
            reps: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageReport {
    pub stage: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Stage-2 data for one matrix size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepRow {
    pub k: usize,
    pub hbar: f64,
    pub rep_deviation: f64,
    pub eom_residual: f64,
    pub action: f64,
    pub solver_iterations: usize,
}

/// Stage-3 data for one quantization map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LegRow {
    pub k: usize,
    pub truncation: u32,
    /// `max_ij ||[q x_i, q x_j] - hbar q({x_i, x_j})||_F`.
    pub generator_defect: f64,
    /// `||q(C) - nu Id||_F` for the quadratic Casimir `C`.
    pub relation_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct PipelineReport {
    pub stages: Vec<StageReport>,
    pub reps: Vec<RepRow>,
    pub jacobi_defect: f64,
    /// `max_i ||{C, x_i}||`, zero when the Casimir relation generates a Poisson ideal.
    pub casimir_closure: f64,
    pub casimir_value: f64,
    pub legs: Vec<LegRow>,
    pub kernel_chain: Option<KernelChain>,
    pub kernel_closed_form: Option<Vec<usize>>,
    pub kernels_nested: bool,
    pub cone: Option<ConeCheck>,
    pub vertex: String,
    pub passed: bool,
}

/// A failed stage together with everything computed before the failure.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineError {
    pub stage: u8,
    pub message: String,
    pub report: PipelineReport,
}

impl core::fmt::Display for PipelineError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "stage {}: {}", self.stage, self.message)
    }
}

struct Run {
    report: PipelineReport,
}

impl Run {
    fn fail(mut self, stage: u8, name: &'static str, message: String) -> PipelineError {
        self.report.stages.push(StageReport {
            stage,
            name,
            pass: false,
            detail: message.clone(),
        });
        self.report.passed = false;
        PipelineError {
            stage,
            message,
            report: self.report,
        }
    }

    fn pass(&mut self, stage: u8, name: &'static str, detail: String) {
        self.report.stages.push(StageReport {
            stage,
            name,
            pass: true,
            detail,
        });
    }
}

fn err(e: Error) -> String {
    format!("{e}")
}

/// `C = sum g^{mu nu} x_mu x_nu` as a polynomial.
fn casimir_polynomial(inverse: &Matrix) -> Polynomial {
    let d = inverse.dim();
    let mut terms = Vec::new();
    for mu in 0..d {
        for nu in 0..d {
            let mut e = alloc::vec![0u32; d];
            e[mu] += 1;
            e[nu] += 1;
            terms.push((e, inverse[(mu, nu)]));
        }
    }
    Polynomial::from_terms(d, terms).expect("finite metric")
}

/// Runs the five stages for the structure constants `s` over `ks`.
pub fn inverse_pipeline(s: &StructureConstants, ks: &[usize], opts: &PipelineOptions) -> Result<PipelineReport, PipelineError> {
    let mut run = Run {
        report: PipelineReport::default(),
    };
    let tol = opts.tolerance;

    // 1: one action per matrix size
    const S1: &str = "actions";
    if ks.is_empty() || ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(run.fail(1, S1, "k list must be nonempty and strictly increasing".into()));
    }
    if let Some(reps) = &opts.reps {
        if reps.len() != ks.len() {
            return Err(run.fail(1, S1, format!("{} representation sets for {} sizes", reps.len(), ks.len())));
        }
    } else if !s.is_su2() {
        return Err(run.fail(1, S1, "only su(2) with f = i eps has built-in representations".into()));
    }
    let mut configs = Vec::with_capacity(ks.len());
    for (i, &k) in ks.iter().enumerate() {
        let hbar = match &opts.reps {
            Some(reps) => reps[i].hbar.re,
            None => match hbar_for_k(k) {
                Ok(h) => h,
                Err(e) => return Err(run.fail(1, S1, format!("k = {k}: {}", err(e)))),
            },
        };
        match ModelConfig::new(k, hbar, s.clone()) {
            Ok(cfg) => configs.push(cfg),
            Err(e) => return Err(run.fail(1, S1, format!("k = {k}: {}", err(e)))),
        }
    }
    let condition = configs[0].killing_condition();
    run.pass(1, S1, format!("{} actions, Killing metric condition number {condition:.3e}", ks.len()));

    // 2: representation solutions of the equation of motion
    const S2: &str = "solutions";
    let mut reps = Vec::with_capacity(ks.len());
    for (i, (&k, cfg)) in ks.iter().zip(&configs).enumerate() {
        let mut rep = match &opts.reps {
            Some(r) => r[i].clone(),
            None => {
                let gens = su2_irrep(k).expect("k >= 2 checked in stage 1").iter().map(|j| j.scale_real(cfg.hbar())).collect();
                RepSet {
                    generators: gens,
                    hbar: C64::new(cfg.hbar(), 0.0),
                    structure: s.clone(),
                }
            }
        };
        let rep_deviation = match validate_repset(&rep) {
            Ok(d) => d,
            Err(e) => return Err(run.fail(2, S2, format!("k = {k}: {}", err(e)))),
        };
        if !(rep_deviation <= tol) {
            return Err(run.fail(2, S2, format!("k = {k}: representation defect {rep_deviation:.3e} exceeds {tol:.1e}")));
        }
        let mut iterations = 0;
        if opts.solve {
            match solve_matrix_model(cfg, &rep.generators, &opts.solver) {
                Ok(sol) if sol.converged => {
                    iterations = sol.iterations;
                    rep.generators = sol.x;
                }
                Ok(sol) => {
                    return Err(run.fail(2, S2, format!("k = {k}: solver stopped at gradient norm {:.3e}", sol.grad_norm)));
                }
                Err(e) => return Err(run.fail(2, S2, format!("k = {k}: {}", err(e)))),
            }
        }
        let eom = match eom_residual(&rep.generators, cfg) {
            Ok(r) => r,
            Err(e) => return Err(run.fail(2, S2, format!("k = {k}: {}", err(e)))),
        };
        if !(eom <= tol) {
            return Err(run.fail(2, S2, format!("k = {k}: EOM residual {eom:.3e} exceeds {tol:.1e}")));
        }
        let action = action_value(&rep.generators, cfg).map(|a| a.re).unwrap_or(f64::NAN);
        run.report.reps.push(RepRow {
            k,
            hbar: cfg.hbar(),
            rep_deviation,
            eom_residual: eom,
            action,
            solver_iterations: iterations,
        });
        reps.push(rep);
    }
    run.pass(2, S2, format!("{} representations solve the equation of motion", reps.len()));

    // 3: Kirillov–Kostant algebra and quantization maps
    const S3: &str = "quantization";
    let d = s.dim();
    let kk = PoissonStructure::KirillovKostant(s.clone());
    let mut probes: Vec<Polynomial> = (1..=2)
        .flat_map(|deg| exponents_of_degree(d, deg))
        .map(|e| Polynomial::monomial(d, e, C64::new(1.0, 0.0)))
        .collect();
    probes.truncate(12);
    let mut jac = 0.0f64;
    for f in &probes {
        for g in &probes {
            for h in &probes {
                match jacobi_defect(&kk, f, g, h) {
                    Ok(p) => jac = jac.max(p.norm()),
                    Err(e) => return Err(run.fail(3, S3, err(e))),
                }
            }
        }
    }
    run.report.jacobi_defect = jac;
    let casimir = casimir_polynomial(configs[0].inverse_killing());
    let mut closure = 0.0f64;
    for i in 0..d {
        match poisson_bracket(&casimir, &Polynomial::var(d, i), &kk) {
            Ok(p) => closure = closure.max(p.norm()),
            Err(e) => return Err(run.fail(3, S3, err(e))),
        }
    }
    run.report.casimir_closure = closure;
    if jac > tol || closure > tol {
        return Err(run.fail(3, S3, format!("Jacobi defect {jac:.3e}, Casimir closure {closure:.3e}")));
    }

    let mut maps = Vec::with_capacity(ks.len());
    let mut nu = None;
    let mut sphere = s.is_su2();
    for ((&k, rep), cfg) in ks.iter().zip(&reps).zip(&configs) {
        let n = cfg.n();
        let c_image = {
            let xu: Vec<Matrix> = (0..d)
                .map(|mu| {
                    let mut acc = Matrix::zeros(n);
                    for nu_ in 0..d {
                        acc.axpy(cfg.inverse_killing()[(mu, nu_)], &rep.generators[nu_]);
                    }
                    acc
                })
                .collect();
            xu.iter().zip(&rep.generators).fold(Matrix::zeros(n), |acc, (a, b)| &acc + &(a * b))
        };
        let value = c_image.trace() / n as f64;
        let relation_deviation = (&c_image - &Matrix::identity(n).scale(value)).frobenius_norm();
        if relation_deviation > tol.max(1e-8) * (1.0 + value.norm()) {
            return Err(run.fail(3, S3, format!("k = {k}: Casimir image is not scalar (deviation {relation_deviation:.3e})")));
        }
        match nu {
            None => nu = Some(value),
            Some(v) if (v - value).norm() > 1e-8 => sphere = false,
            _ => {}
        }
        // the sphere relation sum x_a^2 = 1 needs g = 2 Id and nu = 1/2
        let q = if sphere && (value - C64::new(0.5, 0.0)).norm() <= 1e-8 {
            QuantizationMap::new(kk.clone(), Route::Harmonic, rep.hbar, rep.generators.clone(), (k - 1) as u32)
        } else {
            sphere = false;
            QuantizationMap::from_repset(rep)
        };
        let q = match q {
            Ok(q) => q,
            Err(e) => return Err(run.fail(3, S3, format!("k = {k}: {}", err(e)))),
        };
        let mut gen_defect = 0.0f64;
        for i in 0..d {
            for j in (i + 1)..d {
                match defect(&Polynomial::var(d, i), &Polynomial::var(d, j), &q) {
                    Ok(m) => gen_defect = gen_defect.max(m.frobenius_norm()),
                    Err(e) => return Err(run.fail(3, S3, err(e))),
                }
            }
        }
        if gen_defect > tol {
            return Err(run.fail(3, S3, format!("k = {k}: generator defect {gen_defect:.3e}")));
        }
        run.report.legs.push(LegRow {
            k,
            truncation: q.truncation_degree(),
            generator_defect: gen_defect,
            relation_deviation,
        });
        maps.push(q);
    }
    // round away the last-digit noise of the trace
    let nu = (nu.unwrap_or_default().re * 1e12).round() / 1e12;
    run.report.casimir_value = nu;
    let algebra = if s.is_su2() { "su(2)" } else { "g" };
    run.report.vertex = if sphere {
        format!("Kirillov-Kostant Poisson algebra of {algebra} modulo the Casimir relation C = {nu} (the sphere x_a x_a = 1)")
    } else {
        format!("Kirillov-Kostant Poisson algebra of {algebra}")
    };
    run.pass(
        3,
        S3,
        format!("Jacobi defect {jac:.1e}, Casimir closure {closure:.1e}, {} quantization maps", maps.len()),
    );

    // 4: kernel chain on the degree-bounded subspace
    const S4: &str = "kernel chain";
    let basis: Vec<Polynomial> = if sphere {
        sphere_basis(opts.degree)
    } else {
        (0..=opts.degree)
            .flat_map(|t| exponents_of_degree(d, t))
            .map(|e| Polynomial::monomial(d, e, C64::new(1.0, 0.0)))
            .collect()
    };
    let mut columns = Vec::with_capacity(maps.len());
    for q in &maps {
        match q.quantize_all(&basis) {
            Ok(imgs) => columns.push(imgs.into_iter().map(|m| m.as_slice().to_vec()).collect::<Vec<_>>()),
            Err(e) => return Err(run.fail(4, S4, err(e))),
        }
    }
    let rows: Vec<(usize, usize)> = ks
        .iter()
        .zip(&columns)
        .map(|(&k, cols)| (k, basis.len() - numerical_rank(cols, RANK_TOLERANCE)))
        .collect();
    let strict = rows.windows(2).all(|w| if w[0].1 > 0 { w[1].1 < w[0].1 } else { w[1].1 == 0 });
    // ker q_J inside ker q_N  <=>  stacking q_N onto q_J adds no rank
    let mut nested = true;
    for a in 0..columns.len() {
        for b in (a + 1)..columns.len() {
            let stacked: Vec<Vec<C64>> = columns[b]
                .iter()
                .zip(&columns[a])
                .map(|(x, y)| x.iter().chain(y.iter()).copied().collect())
                .collect();
            if numerical_rank(&stacked, RANK_TOLERANCE) != numerical_rank(&columns[b], RANK_TOLERANCE) {
                nested = false;
            }
        }
    }
    run.report.kernels_nested = nested;
    let closed: Option<Vec<usize>> = sphere.then(|| ks.iter().map(|&k| kernel_dim_closed_form(k, opts.degree)).collect());
    let matches_closed = closed
        .as_ref()
        .is_none_or(|c| c.iter().zip(&rows).all(|(a, r)| *a == r.1));
    run.report.kernel_closed_form = closed;
    run.report.kernel_chain = Some(KernelChain {
        degree: opts.degree,
        rows: rows.clone(),
        strict,
    });
    if !(strict && nested && matches_closed) {
        return Err(run.fail(
            4,
            S4,
            format!("kernel dims {rows:?}: strict {strict}, nested {nested}, closed form {matches_closed}"),
        ));
    }
    run.pass(
        4,
        S4,
        format!("kernel dims {rows:?} on degree <= {}; no injective morphisms, diagram is discrete", opts.degree),
    );

    // 5: the vertex with its legs is a cone over the discrete diagram
    const S5: &str = "classical limit";
    let legs = ks
        .iter()
        .zip(maps)
        .map(|(&k, q)| Leg::quantization(format!("q_{k}"), q))
        .collect();
    let cone = ConeDescriptor {
        vertex: kk,
        legs,
        morphisms: Vec::new(),
    };
    let check = match check_cone(&cone, &basis) {
        Ok(c) => c,
        Err(e) => return Err(run.fail(5, S5, err(e))),
    };
    run.report.cone = Some(check);
    if !check.pass {
        return Err(run.fail(5, S5, format!("cone deviation {:.3e}", check.max_deviation)));
    }
    let vertex = run.report.vertex.clone();
    run.pass(5, S5, format!("naive classical limit: {vertex}"));
    run.report.passed = true;
    Ok(run.report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn su2_end_to_end() {
        let report = inverse_pipeline(&StructureConstants::su2(), &[2, 3, 4, 5], &PipelineOptions::default()).unwrap();
        assert!(report.passed);
        assert_eq!(report.stages.len(), 5);
        assert!(report.stages.iter().all(|s| s.pass));
        assert!(report.vertex.contains("Kirillov-Kostant"));
        let chain = report.kernel_chain.unwrap();
        assert_eq!(chain.rows, alloc::vec![(2, 12), (3, 7), (4, 0), (5, 0)]);
        assert!((report.casimir_value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_size_is_vacuous() {
        let report = inverse_pipeline(&StructureConstants::su2(), &[2], &PipelineOptions::default()).unwrap();
        assert!(report.passed);
        assert_eq!(report.cone.unwrap().comparisons, 0);
    }

    #[test]
    fn corrupted_rep_fails_stage_two() {
        let mut reps: Vec<RepSet> = [2, 3].iter().map(|&k| RepSet::su2(k).unwrap()).collect();
        reps[1].generators[0][(0, 1)] += C64::new(1e-3, 0.0);
        let opts = PipelineOptions {
            reps: Some(reps),
            ..PipelineOptions::default()
        };
        let e = inverse_pipeline(&StructureConstants::su2(), &[2, 3], &opts).unwrap_err();
        assert_eq!(e.stage, 2);
        assert!(!e.report.passed);
        assert!(e.message.contains("representation defect"));
    }

    #[test]
    fn bad_k_list_fails_stage_one() {
        let e = inverse_pipeline(&StructureConstants::su2(), &[3, 2], &PipelineOptions::default()).unwrap_err();
        assert_eq!(e.stage, 1);
        let e = inverse_pipeline(&StructureConstants::su2_real(), &[2], &PipelineOptions::default()).unwrap_err();
        assert_eq!(e.stage, 1);
    }
}
