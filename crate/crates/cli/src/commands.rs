//! The subcommands. Each returns a [`Report`]; errors mean the input was unusable.

use std::path::Path;

use anyhow::{bail, Context};
use matreg_core::limits::{scaling_exponent, ScalingFit, ScalingScan};
use matreg_core::model::{
    action_value, classify_solution, solve_matrix_model, Method, ModelConfig, SolutionKind, SolveOptions,
};
use matreg_core::moyal::{intertwiner_defect, moyal_product, MoyalSpec};
use matreg_core::pipeline::{inverse_pipeline, PipelineOptions, PipelineReport};
use matreg_core::poisson::StructureConstants;
use matreg_core::quantize::{defect, exponents_of_degree, QuantizationMap, TorusMap};
use matreg_core::reps::{clock_shift, hbar_for_k, su2_irrep, RepSet};
use matreg_core::span::{generated_algebra_dim, kernel_dim, kernel_dim_closed_form};
use matreg_core::{Matrix, Polynomial, TorusFunction, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::formats::{
    complex, MatrixJson, MoyalSpecJson, PolynomialJson, RepSetJson, StructureJson, TorusFunctionJson,
};

/// Exact identities (irrep relations, exact defects, torus relations).
pub const EXACT_TOL: f64 = 1e-12;
/// Relations accumulated over sums of many products.
pub const RELATION_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
    pub csv: String,
    pub passed: bool,
}

fn csv_of<T: Serialize>(rows: &[T]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn core<T>(r: matreg_core::Result<T>) -> anyhow::Result<T> {
    r.map_err(|e| anyhow::anyhow!("{e}"))
}

pub fn read_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> anyhow::Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SphereRow {
    pub k: usize,
    pub hbar: f64,
    pub hbar2: f64,
    pub casimir_deviation: f64,
    pub linear_defect: f64,
    /// `None` above the span size limit.
    pub algebra_dim: Option<usize>,
    pub kernel_dim: usize,
    pub kernel_closed_form: usize,
    pub pass: bool,
}

/// Per-`k` fuzzy-sphere table, plus a defect scan of `x1 x2, x2 x3` when the
/// range has enough points for a fit.
pub fn fuzzy_sphere(ks: &[usize], degree: u32, span_max_k: usize) -> anyhow::Result<Report> {
    if ks[0] < 2 {
        bail!("the fuzzy sphere needs k >= 2");
    }
    let x = |a| Polynomial::var(3, a);
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let j = core(su2_irrep(k))?;
        let cas = j.iter().fold(Matrix::zeros(k), |acc, m| &acc + &(m * m));
        let casimir_deviation = (&cas - &Matrix::identity(k).scale_real(0.25 * (k * k - 1) as f64)).frobenius_norm();
        let q = core(QuantizationMap::sphere(k))?;
        let mut linear_defect = 0.0f64;
        for a in 0..3 {
            for b in 0..3 {
                linear_defect = linear_defect.max(core(defect(&x(a), &x(b), &q))?.frobenius_norm());
            }
        }
        let algebra_dim = if k <= span_max_k {
            Some(core(generated_algebra_dim(&j, 2 * (k - 1)))?)
        } else {
            None
        };
        let kd = core(kernel_dim(k, degree))?;
        let closed = kernel_dim_closed_form(k, degree);
        let hbar = core(hbar_for_k(k))?;
        let pass = casimir_deviation <= RELATION_TOL
            && linear_defect <= EXACT_TOL
            && algebra_dim.is_none_or(|d| d == k * k)
            && kd == closed;
        rows.push(SphereRow {
            k,
            hbar,
            hbar2: hbar * hbar,
            casimir_deviation,
            linear_defect,
            algebra_dim,
            kernel_dim: kd,
            kernel_closed_form: closed,
            pass,
        });
    }
    let scan = match scaling_exponent(&(&x(0) * &x(1)), &(&x(1) * &x(2)), QuantizationMap::sphere, ks) {
        Ok(s) => Some(scan_json("sphere", ["x1 x2", "x2 x3"], &s)),
        Err(matreg_core::Error::InsufficientData { .. }) => None,
        Err(e) => bail!("{e}"),
    };
    let passed = rows.iter().all(|r| r.pass) && scan.as_ref().is_none_or(|s| s["verdict"] != "fail");
    Ok(Report {
        json: json!({ "degree": degree, "rows": rows, "scan": scan, "passed": passed }),
        csv: csv_of(&rows)?,
        passed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TorusRow {
    pub k: usize,
    pub hbar: f64,
    /// Largest of `||U^k - Id||`, `||V^k - Id||`, `||VU - qUV||`.
    pub identity_deviation: f64,
    pub algebra_dim: usize,
    pub pass: bool,
}

pub fn fuzzy_torus(ks: &[usize]) -> anyhow::Result<Report> {
    if ks[0] < 1 {
        bail!("the fuzzy torus needs k >= 1");
    }
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let (u, v, q) = core(clock_shift(k))?;
        let id = Matrix::identity(k);
        let identity_deviation = [
            (&u.pow(k as u32) - &id).frobenius_norm(),
            (&v.pow(k as u32) - &id).frobenius_norm(),
            (&(&v * &u) - &(&u * &v).scale(q)).frobenius_norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        let algebra_dim = core(generated_algebra_dim(&[u, v], (2 * (k - 1)).max(1)))?;
        rows.push(TorusRow {
            k,
            hbar: 2.0 / k as f64,
            identity_deviation,
            algebra_dim,
            pass: identity_deviation <= EXACT_TOL && algebra_dim == k * k,
        });
    }
    let y = |a, b| TorusFunction::mode(a, b, C64::new(1.0, 0.0));
    let scan = match scaling_exponent(&y(1, 0), &y(0, 1), TorusMap::new, ks) {
        Ok(s) => Some(scan_json("torus", ["y(1,0)", "y(0,1)"], &s)),
        Err(matreg_core::Error::InsufficientData { .. }) => None,
        Err(e) => bail!("{e}"),
    };
    let passed = rows.iter().all(|r| r.pass) && scan.as_ref().is_none_or(|s| s["verdict"] != "fail");
    Ok(Report {
        json: json!({ "rows": rows, "scan": scan, "passed": passed }),
        csv: csv_of(&rows)?,
        passed,
    })
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MoyalConfig {
    /// Explicit products; random ones are drawn when empty.
    pub specs: Vec<MoyalSpecJson>,
    pub random_specs: usize,
    pub triples: usize,
    pub pairs: usize,
    pub degree: u32,
    pub tolerance: f64,
}

impl Default for MoyalConfig {
    fn default() -> Self {
        Self {
            specs: Vec::new(),
            random_specs: 10,
            triples: 100,
            pairs: 100,
            degree: 4,
            tolerance: RELATION_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MoyalRow {
    pub spec: usize,
    pub h11: f64,
    pub h12: f64,
    pub h21: f64,
    pub h22: f64,
    pub associativity: f64,
    pub intertwiner: f64,
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-1.0..1.0)
}

/// Polynomial in two variables of degree at most `d`, each monomial present
/// with probability one half.
fn random_poly(rng: &mut ChaCha8Rng, d: u32) -> Polynomial {
    let mut terms = Vec::new();
    for e in (0..=d).flat_map(|t| exponents_of_degree(2, t)) {
        if rng.random_bool(0.5) {
            terms.push((e, C64::new(unit(rng), unit(rng))));
        }
    }
    Polynomial::from_terms(2, terms).expect("finite coefficients")
}

pub fn moyal(cfg: &MoyalConfig, seed: u64) -> anyhow::Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let specs: Vec<MoyalSpec> = if cfg.specs.is_empty() {
        (0..cfg.random_specs)
            .map(|_| {
                let h = [[C64::new(unit(&mut rng), 0.0), C64::new(unit(&mut rng), 0.0)], [
                    C64::new(unit(&mut rng), 0.0),
                    C64::new(unit(&mut rng), 0.0),
                ]];
                MoyalSpec::new(h, C64::new(0.0, 1.0))
            })
            .collect()
    } else {
        cfg.specs.iter().map(MoyalSpec::from).collect()
    };
    if specs.is_empty() {
        bail!("no star products to test");
    }
    let mut rows: Vec<MoyalRow> = specs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let h = s.h();
            MoyalRow {
                spec: i,
                h11: h[0][0].re,
                h12: h[0][1].re,
                h21: h[1][0].re,
                h22: h[1][1].re,
                associativity: 0.0,
                intertwiner: 0.0,
            }
        })
        .collect();
    for t in 0..cfg.triples {
        let i = t % specs.len();
        let (f, g, h) = (random_poly(&mut rng, cfg.degree), random_poly(&mut rng, cfg.degree), random_poly(&mut rng, cfg.degree));
        let s = &specs[i];
        let left = core(moyal_product(&core(moyal_product(&f, &g, s))?, &h, s))?;
        let right = core(moyal_product(&f, &core(moyal_product(&g, &h, s))?, s))?;
        rows[i].associativity = rows[i].associativity.max((&left - &right).norm());
    }
    for t in 0..cfg.pairs {
        let i = t % specs.len();
        let (f, g) = (random_poly(&mut rng, cfg.degree), random_poly(&mut rng, cfg.degree));
        rows[i].intertwiner = rows[i].intertwiner.max(core(intertwiner_defect(&f, &g, &specs[i]))?);
    }
    let assoc = rows.iter().map(|r| r.associativity).fold(0.0, f64::max);
    let inter = rows.iter().map(|r| r.intertwiner).fold(0.0, f64::max);
    let passed = assoc <= cfg.tolerance && inter <= cfg.tolerance;
    let spec_json: Vec<MoyalSpecJson> = specs.iter().map(MoyalSpecJson::from).collect();
    Ok(Report {
        json: json!({
            "specs": spec_json,
            "rows": rows,
            "associativity_max": assoc,
            "intertwiner_max": inter,
            "tolerance": cfg.tolerance,
            "passed": passed,
        }),
        csv: csv_of(&rows)?,
        passed,
    })
}

fn scan_json(family: &str, pair: [&str; 2], s: &ScalingScan) -> Value {
    let (slope, intercept, residual) = match s.fit {
        ScalingFit::Exact => (None, None, None),
        ScalingFit::Fit { slope, intercept, residual, .. } => (Some(slope), Some(intercept), Some(residual)),
    };
    let verdict = match s.fit {
        ScalingFit::Exact => "exact",
        f if f.passes() => "pass",
        _ => "fail",
    };
    let rows: Vec<Value> = s
        .rows
        .iter()
        .map(|r| json!({ "k": r.k, "hbar": r.hbar, "defect_norm": r.defect_norm, "frobenius": r.frobenius }))
        .collect();
    json!({
        "family": family,
        "pair": pair,
        "rows": rows,
        "slope": slope,
        "intercept": intercept,
        "residual": residual,
        "verdict": verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Sphere,
    Torus,
}

/// The observable pair of a scan; sphere pairs are polynomials in three
/// variables, torus pairs are Fourier sums.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub sphere: Option<[PolynomialJson; 2]>,
    pub torus: Option<[TorusFunctionJson; 2]>,
}

#[derive(Clone, Debug, Serialize)]
struct ScanCsvRow {
    k: usize,
    hbar: f64,
    defect_norm: f64,
    frobenius: f64,
}

pub fn defect_scan(family: Family, ks: &[usize], cfg: &ScanConfig) -> anyhow::Result<Report> {
    let (scan, pair) = match family {
        Family::Sphere => {
            if ks[0] < 2 {
                bail!("the fuzzy sphere needs k >= 2");
            }
            let x = |a| Polynomial::var(3, a);
            let (f, g) = match &cfg.sphere {
                Some([f, g]) => (Polynomial::try_from(f)?, Polynomial::try_from(g)?),
                None => (&x(0) * &x(1), &x(1) * &x(2)),
            };
            if f.nvars() != 3 || g.nvars() != 3 {
                bail!("sphere observables take three variables");
            }
            let pair = [describe_poly(&f), describe_poly(&g)];
            (core(scaling_exponent(&f, &g, QuantizationMap::sphere, ks))?, pair)
        }
        Family::Torus => {
            if ks[0] < 1 {
                bail!("the fuzzy torus needs k >= 1");
            }
            let y = |a, b| TorusFunction::mode(a, b, C64::new(1.0, 0.0));
            let (f, g) = match &cfg.torus {
                Some([f, g]) => (TorusFunction::from(f), TorusFunction::from(g)),
                None => (y(1, 0), y(0, 1)),
            };
            let pair = [describe_torus(&f), describe_torus(&g)];
            (core(scaling_exponent(&f, &g, TorusMap::new, ks))?, pair)
        }
    };
    let fam = match family {
        Family::Sphere => "sphere",
        Family::Torus => "torus",
    };
    let json = scan_json(fam, [pair[0].as_str(), pair[1].as_str()], &scan);
    let passed = scan.fit.passes();
    let rows: Vec<ScanCsvRow> = scan
        .rows
        .iter()
        .map(|r| ScanCsvRow {
            k: r.k,
            hbar: r.hbar,
            defect_norm: r.defect_norm,
            frobenius: r.frobenius,
        })
        .collect();
    Ok(Report {
        json,
        csv: csv_of(&rows)?,
        passed,
    })
}

fn describe_poly(p: &Polynomial) -> String {
    serde_json::to_string(&PolynomialJson::from(p)).unwrap_or_default()
}

fn describe_torus(f: &TorusFunction) -> String {
    serde_json::to_string(&TorusFunctionJson::from(f)).unwrap_or_default()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    /// `hbar_N J^a`, shifted by `perturbation` relative noise.
    #[default]
    Su2,
    /// Hermitian Gaussian matrices of unit scale.
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    #[default]
    Newton,
    GradientDescent,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelFileConfig {
    /// Defaults to `hbar_N = 2 / sqrt(N^2 - 1)`.
    pub hbar: Option<f64>,
    /// Defaults to su(2) with `f = i eps`.
    pub structure: Option<StructureJson>,
    pub penalty_weight: f64,
    pub casimir_targets: Vec<f64>,
    pub init: Init,
    pub perturbation: f64,
    pub method: MethodName,
    pub max_iter: usize,
    pub tol: f64,
    pub step: f64,
    /// Threshold for reporting a representation or commuting solution.
    pub classify_tol: f64,
}

impl Default for ModelFileConfig {
    fn default() -> Self {
        let s = SolveOptions::default();
        Self {
            hbar: None,
            structure: None,
            penalty_weight: 0.0,
            casimir_targets: vec![0.5],
            init: Init::Su2,
            perturbation: 0.01,
            method: MethodName::Newton,
            max_iter: s.max_iter,
            tol: s.tol,
            step: s.step,
            classify_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
struct TraceCsvRow {
    n: usize,
    iter: usize,
    action: f64,
    grad_norm: f64,
    eom_residual: f64,
}

fn gaussian_hermitian(rng: &mut ChaCha8Rng, n: usize, amp: f64) -> Matrix {
    let m = Matrix::from_fn(n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * amp);
    (&m + &m.adjoint()).scale_real(0.5)
}

/// Solves the matrix model for every `N` in `ns` and classifies the result.
pub fn matrix_model(ns: &[usize], cfg: &ModelFileConfig, seed: u64) -> anyhow::Result<Report> {
    let structure = match &cfg.structure {
        Some(s) => StructureConstants::try_from(s)?,
        None => StructureConstants::su2(),
    };
    if cfg.init == Init::Su2 && !structure.is_su2() {
        bail!("su2 initialization needs the su(2) structure constants with f = i eps");
    }
    let opts = SolveOptions {
        method: match cfg.method {
            MethodName::Newton => Method::Newton,
            MethodName::GradientDescent => Method::GradientDescent,
        },
        step: cfg.step,
        max_iter: cfg.max_iter,
        tol: cfg.tol,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = Vec::new();
    let mut trace = Vec::new();
    let mut passed = true;
    for &n in ns {
        let hbar = match cfg.hbar {
            Some(h) => h,
            None => core(hbar_for_k(n))?,
        };
        let model = core(core(ModelConfig::new(n, hbar, structure.clone()))?.with_penalty(cfg.penalty_weight, cfg.casimir_targets.clone()))?;
        let d = structure.dim();
        let init: Vec<Matrix> = match cfg.init {
            Init::Su2 => {
                let x: Vec<Matrix> = core(su2_irrep(n))?.iter().map(|j| j.scale_real(hbar)).collect();
                let scale = x.iter().map(Matrix::frobenius_norm).sum::<f64>() / (d * n) as f64;
                x.iter()
                    .map(|a| a + &gaussian_hermitian(&mut rng, n, cfg.perturbation * scale))
                    .collect()
            }
            Init::Random => (0..d).map(|_| gaussian_hermitian(&mut rng, n, 1.0)).collect(),
        };
        let sol = core(solve_matrix_model(&model, &init, &opts))?;
        let kind = core(classify_solution(&sol.x, &model, cfg.classify_tol))?;
        let (class, rep_deviation) = match kind {
            SolutionKind::Representation { deviation } => ("representation", Some(deviation)),
            SolutionKind::Commuting => ("commuting", None),
            SolutionKind::Other { deviation } => ("other", Some(deviation)),
        };
        let action = core(action_value(&sol.x, &model))?;
        passed &= sol.converged;
        trace.extend(sol.trace.iter().map(|t| TraceCsvRow {
            n,
            iter: t.iter,
            action: t.action,
            grad_norm: t.grad_norm,
            eom_residual: t.eom_residual,
        }));
        results.push(json!({
            "n": n,
            "hbar": hbar,
            "converged": sol.converged,
            "iterations": sol.iterations,
            "grad_norm": sol.grad_norm,
            "eom_residual": sol.eom_residual,
            "casimir_deviation": sol.casimir_deviation,
            "action": complex(action),
            "classification": class,
            "rep_deviation": rep_deviation,
            "solution": sol.x.iter().map(MatrixJson::from).collect::<Vec<_>>(),
        }));
    }
    Ok(Report {
        json: json!({ "results": results, "passed": passed }),
        csv: csv_of(&trace)?,
        passed,
    })
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineFileConfig {
    pub structure: Option<StructureJson>,
    /// One representation per entry of the `k` list.
    pub reps: Option<Vec<RepSetJson>>,
    pub solve: bool,
    pub tolerance: f64,
}

impl Default for PipelineFileConfig {
    fn default() -> Self {
        let o = PipelineOptions::default();
        Self {
            structure: None,
            reps: None,
            solve: o.solve,
            tolerance: o.tolerance,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
struct StageCsvRow<'a> {
    stage: u8,
    name: &'a str,
    pass: bool,
    detail: &'a str,
}

fn pipeline_json(r: &PipelineReport, failed_stage: Option<u8>) -> Value {
    let stages: Vec<Value> = r
        .stages
        .iter()
        .map(|s| json!({ "stage": s.stage, "name": s.name, "verdict": if s.pass { "pass" } else { "fail" }, "detail": s.detail }))
        .collect();
    let reps: Vec<Value> = r
        .reps
        .iter()
        .map(|x| {
            json!({
                "k": x.k, "hbar": x.hbar, "rep_deviation": x.rep_deviation,
                "eom_residual": x.eom_residual, "action": x.action, "solver_iterations": x.solver_iterations,
            })
        })
        .collect();
    let legs: Vec<Value> = r
        .legs
        .iter()
        .map(|l| {
            json!({
                "k": l.k, "truncation": l.truncation,
                "generator_defect": l.generator_defect, "relation_deviation": l.relation_deviation,
            })
        })
        .collect();
    let chain = r.kernel_chain.as_ref().map(|c| {
        json!({
            "degree": c.degree,
            "rows": c.rows.iter().map(|&(k, d)| json!({ "k": k, "kernel_dim": d })).collect::<Vec<_>>(),
            "strict": c.strict,
        })
    });
    let cone = r
        .cone
        .map(|c| json!({ "pass": c.pass, "max_deviation": c.max_deviation, "comparisons": c.comparisons }));
    json!({
        "stages": stages,
        "failed_stage": failed_stage,
        "reps": reps,
        "jacobi_defect": r.jacobi_defect,
        "casimir_closure": r.casimir_closure,
        "casimir_value": r.casimir_value,
        "legs": legs,
        "kernel_chain": chain,
        "kernel_closed_form": r.kernel_closed_form,
        "kernels_nested": r.kernels_nested,
        "cone": cone,
        "vertex": r.vertex,
        "passed": r.passed,
    })
}

pub fn pipeline(ks: &[usize], degree: u32, cfg: &PipelineFileConfig) -> anyhow::Result<Report> {
    let structure = match &cfg.structure {
        Some(s) => StructureConstants::try_from(s)?,
        None => StructureConstants::su2(),
    };
    let reps = match &cfg.reps {
        Some(r) => Some(r.iter().map(RepSet::try_from).collect::<anyhow::Result<Vec<_>>>()?),
        None => None,
    };
    let opts = PipelineOptions {
        degree,
        solve: cfg.solve,
        tolerance: cfg.tolerance,
        reps,
        ..PipelineOptions::default()
    };
    let (report, failed) = match inverse_pipeline(&structure, ks, &opts) {
        Ok(r) => (r, None),
        Err(e) => (e.report, Some(e.stage)),
    };
    let rows: Vec<StageCsvRow> = report
        .stages
        .iter()
        .map(|s| StageCsvRow {
            stage: s.stage,
            name: s.name,
            pass: s.pass,
            detail: &s.detail,
        })
        .collect();
    Ok(Report {
        json: pipeline_json(&report, failed),
        csv: csv_of(&rows)?,
        passed: report.passed,
    })
}
