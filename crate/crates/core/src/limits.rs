//! Classical-limit checks: cone commutativity over a diagram of quantizations,
//! log-log scaling of the quantization defect, finite-degree equivalence of two
//! quantizations, and the rescaling that defeats any would-be strong limit.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, Matrix, RANK_TOLERANCE};
use crate::moyal::{family_intertwiner, moyal_product, MoyalSpec};
use crate::poisson::PoissonStructure;
use crate::poly::{Exponents, Polynomial};
use crate::quantize::{defect, rescale_qmap, QuantizationMap, Quantizer};
use crate::C64;

/// Deviation allowed in cone and equivalence checks, relative to `1 + |value|`.
pub const CHECK_TOLERANCE: f64 = 1e-10;

/// Minimum fitted exponent accepted as `O~(hbar^{1+eps})` with `eps > 0`.
pub const SLOPE_THRESHOLD: f64 = 1.5;

/// Defects at or below this normalized norm count as exactly zero.
pub const ZERO_DEFECT: f64 = 1e-12;

/// The image of an observable in a target algebra.
#[derive(Clone, Debug, PartialEq)]
pub enum Image {
    Matrix(Matrix),
    Poly(Polynomial),
}

impl Image {
    pub fn norm(&self) -> f64 {
        match self {
            Image::Matrix(m) => m.frobenius_norm(),
            Image::Poly(p) => p.norm(),
        }
    }

    /// Norm of the difference; images of different kinds never agree.
    pub fn distance(&self, other: &Image) -> Result<f64> {
        match (self, other) {
            (Image::Matrix(a), Image::Matrix(b)) => {
                crate::error::ensure_dim(a.dim(), b.dim())?;
                Ok((a - b).frobenius_norm())
            }
            (Image::Poly(a), Image::Poly(b)) => Ok(a.checked_sub(b)?.norm()),
            _ => Err(Error::InvalidInput("comparing a matrix with a polynomial")),
        }
    }
}

/// The associative algebra a leg lands in.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Matrices,
    Moyal(MoyalSpec),
}

impl Target {
    pub fn product(&self, a: &Image, b: &Image) -> Result<Image> {
        match (self, a, b) {
            (Target::Matrices, Image::Matrix(x), Image::Matrix(y)) => Ok(Image::Matrix(x.matmul(y)?)),
            (Target::Moyal(spec), Image::Poly(x), Image::Poly(y)) => Ok(Image::Poly(moyal_product(x, y, spec)?)),
            _ => Err(Error::InvalidInput("image does not live in this target")),
        }
    }
}

pub type LegFn<'a> = Box<dyn Fn(&Polynomial) -> Result<Image> + 'a>;
pub type ImageFn<'a> = Box<dyn Fn(&Image) -> Result<Image> + 'a>;
pub type PolyFn<'a> = Box<dyn Fn(&Polynomial) -> Result<Polynomial> + 'a>;

/// One quantization map out of the vertex, with the algebra it lands in.
pub struct Leg<'a> {
    pub name: String,
    pub target: Target,
    pub map: LegFn<'a>,
}

impl<'a> Leg<'a> {
    pub fn new(name: impl Into<String>, target: Target, map: LegFn<'a>) -> Self {
        Self {
            name: name.into(),
            target,
            map,
        }
    }

    pub fn quantization(name: impl Into<String>, q: QuantizationMap) -> Self {
        Self::new(name, Target::Matrices, Box::new(move |f| q.quantize(f).map(Image::Matrix)))
    }

    /// The inclusion `q_H : P -> (P, *_H)`.
    pub fn moyal_inclusion(name: impl Into<String>, spec: MoyalSpec) -> Self {
        Self::new(
            name,
            Target::Moyal(spec),
            Box::new(|f| {
                crate::error::ensure_dim(2, f.nvars())?;
                Ok(Image::Poly(f.clone()))
            }),
        )
    }

    pub fn apply(&self, f: &Polynomial) -> Result<Image> {
        (self.map)(f)
    }
}

/// A diagram morphism `m : D(from) -> D(to)` that the cone must commute with.
pub struct ConeMorphism<'a> {
    pub from: usize,
    pub to: usize,
    pub map: ImageFn<'a>,
}

impl<'a> ConeMorphism<'a> {
    /// The Moyal family isomorphism `t_{p,r}` between two star products.
    pub fn moyal_intertwiner(from: usize, to: usize, spec_from: MoyalSpec, spec_to: MoyalSpec) -> Self {
        Self {
            from,
            to,
            map: Box::new(move |img| match img {
                Image::Poly(p) => Ok(Image::Poly(family_intertwiner(p, &spec_from, &spec_to)?)),
                Image::Matrix(_) => Err(Error::InvalidInput("intertwiner expects a polynomial")),
            }),
        }
    }
}

/// A vertex algebra with legs into each object of a diagram.
pub struct ConeDescriptor<'a> {
    pub vertex: PoissonStructure,
    pub legs: Vec<Leg<'a>>,
    pub morphisms: Vec<ConeMorphism<'a>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeCheck {
    pub pass: bool,
    pub max_deviation: f64,
    pub comparisons: usize,
}

/// Checks `m(t_from(f)) = t_to(f)` for every morphism and every basis element.
pub fn check_cone(c: &ConeDescriptor<'_>, test_basis: &[Polynomial]) -> Result<ConeCheck> {
    for m in &c.morphisms {
        if m.from >= c.legs.len() || m.to >= c.legs.len() {
            return Err(Error::InvalidInput("morphism references a missing leg"));
        }
    }
    for f in test_basis {
        crate::error::ensure_dim(c.vertex.nvars(), f.nvars())?;
    }
    let mut worst = 0.0f64;
    let mut comparisons = 0;
    for m in &c.morphisms {
        for f in test_basis {
            let via = (m.map)(&c.legs[m.from].apply(f)?)?;
            let direct = c.legs[m.to].apply(f)?;
            worst = worst.max(via.distance(&direct)? / (1.0 + direct.norm()));
            comparisons += 1;
        }
    }
    Ok(ConeCheck {
        pass: worst <= CHECK_TOLERANCE,
        max_deviation: worst,
        comparisons,
    })
}

/// One point of a defect scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    pub k: usize,
    pub hbar: f64,
    /// `||D||_F / sqrt(dim)`, the quantity that is fitted.
    pub defect_norm: f64,
    pub frobenius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScalingFit {
    /// Every defect vanished: the pair is quantized exactly.
    Exact,
    /// Least-squares line `log defect = slope log hbar + intercept`.
    Fit { slope: f64, intercept: f64, residual: f64, points: usize },
}

impl ScalingFit {
    /// Whether the scan is consistent with `O~(hbar^{1+eps})`.
    pub fn passes(&self) -> bool {
        match *self {
            ScalingFit::Exact => true,
            ScalingFit::Fit { slope, .. } => slope >= SLOPE_THRESHOLD,
        }
    }

    pub fn slope(&self) -> Option<f64> {
        match *self {
            ScalingFit::Exact => None,
            ScalingFit::Fit { slope, .. } => Some(slope),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingScan {
    pub rows: Vec<ScanRow>,
    pub fit: ScalingFit,
}

/// Least-squares slope, intercept and RMS residual of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    (slope, intercept, (ss / n).sqrt())
}

/// Fits the exponent of `||D(f, g)||` against `|hbar_k|` over `ks`.
///
/// Rows with a zero defect are reported but left out of the fit. All zero is
/// the exact case; one or two nonzero rows is too little to fit.
pub fn scaling_exponent<Q, F>(f: &Q::Observable, g: &Q::Observable, family: F, ks: &[usize]) -> Result<ScalingScan>
where
    Q: Quantizer,
    F: Fn(usize) -> Result<Q>,
{
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let q = family(k)?;
        let d = defect(f, g, &q)?;
        let frob = d.frobenius_norm();
        rows.push(ScanRow {
            k,
            hbar: q.hbar().norm(),
            defect_norm: frob / (q.dim() as f64).sqrt(),
            frobenius: frob,
        });
    }
    let (x, y): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.defect_norm > ZERO_DEFECT)
        .map(|r| (r.hbar.ln(), r.defect_norm.ln()))
        .unzip();
    let fit = match x.len() {
        0 => ScalingFit::Exact,
        n if n < 3 => return Err(Error::InsufficientData { nonzero: n }),
        n => {
            let (slope, intercept, residual) = linear_fit(&x, &y);
            ScalingFit::Fit {
                slope,
                intercept,
                residual,
                points: n,
            }
        }
    };
    Ok(ScalingScan { rows, fit })
}

/// Outcome of a finite-degree equivalence check between two quantizations.
#[derive(Clone, Debug, PartialEq)]
pub struct Equivalence {
    pub equivalent: bool,
    /// Dimensions of the spans of images and pairwise products on each side.
    pub dim_a: usize,
    pub dim_b: usize,
    /// Rank of the iso on side A's span; equal to `dim_a` when injective.
    pub iso_rank: Option<usize>,
    pub multiplicative_deviation: Option<f64>,
    pub square_deviation: Option<f64>,
}

/// Coordinates of images in a common basis (matrix entries or monomial coefficients).
fn vectorize(images: &[Image]) -> Result<Vec<Vec<C64>>> {
    let mut monos: BTreeMap<Exponents, usize> = BTreeMap::new();
    for img in images {
        if let Image::Poly(p) = img {
            for (e, _) in p.terms() {
                let next = monos.len();
                monos.entry(e.clone()).or_insert(next);
            }
        }
    }
    let mut out = Vec::with_capacity(images.len());
    let mut mat_len = None;
    for img in images {
        match img {
            Image::Matrix(m) => {
                let len = m.as_slice().len();
                if *mat_len.get_or_insert(len) != len {
                    return Err(Error::InvalidInput("images of different sizes"));
                }
                out.push(m.as_slice().to_vec());
            }
            Image::Poly(p) => {
                let mut v = alloc::vec![C64::new(0.0, 0.0); monos.len()];
                for (e, c) in p.terms() {
                    v[monos[e]] = *c;
                }
                out.push(v);
            }
        }
    }
    if mat_len.is_some() && !monos.is_empty() {
        return Err(Error::InvalidInput("mixed matrix and polynomial images"));
    }
    Ok(out)
}

/// Images of `basis` together with all their pairwise products.
fn words_up_to_two(leg: &Leg<'_>, basis: &[Polynomial]) -> Result<(Vec<Image>, Vec<Image>)> {
    let singles = basis.iter().map(|f| leg.apply(f)).collect::<Result<Vec<_>>>()?;
    let mut all = singles.clone();
    for a in &singles {
        for b in &singles {
            all.push(leg.target.product(a, b)?);
        }
    }
    Ok((singles, all))
}

/// Checks that `iso` identifies the degree-truncated images of `qa` and `qb`.
///
/// The spans of images and of pairwise products must have equal dimension,
/// `iso` must be injective on side A's span and multiplicative on words of
/// length two, and when `phi` is given the square `iso o qa = qb o phi` must
/// commute on `basis`.
pub fn equivalence_check(
    qa: &Leg<'_>,
    qb: &Leg<'_>,
    iso: &ImageFn<'_>,
    phi: Option<&PolyFn<'_>>,
    basis: &[Polynomial],
) -> Result<Equivalence> {
    let (singles_a, all_a) = words_up_to_two(qa, basis)?;
    let (_, all_b) = words_up_to_two(qb, basis)?;
    let dim_a = numerical_rank(&vectorize(&all_a)?, RANK_TOLERANCE);
    let dim_b = numerical_rank(&vectorize(&all_b)?, RANK_TOLERANCE);
    let mut out = Equivalence {
        equivalent: false,
        dim_a,
        dim_b,
        iso_rank: None,
        multiplicative_deviation: None,
        square_deviation: None,
    };
    if dim_a != dim_b {
        return Ok(out);
    }
    let mapped = all_a.iter().map(iso).collect::<Result<Vec<_>>>()?;
    let iso_rank = numerical_rank(&vectorize(&mapped)?, RANK_TOLERANCE);
    out.iso_rank = Some(iso_rank);

    let n = singles_a.len();
    let mut mult = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let lhs = &mapped[n + i * n + j];
            let rhs = qb.target.product(&mapped[i], &mapped[j])?;
            mult = mult.max(lhs.distance(&rhs)? / (1.0 + rhs.norm()));
        }
    }
    out.multiplicative_deviation = Some(mult);

    let mut square_ok = true;
    if let Some(phi) = phi {
        let mut worst = 0.0f64;
        for (f, a) in basis.iter().zip(&mapped) {
            let rhs = qb.apply(&phi(f)?)?;
            worst = worst.max(a.distance(&rhs)? / (1.0 + rhs.norm()));
        }
        out.square_deviation = Some(worst);
        square_ok = worst <= CHECK_TOLERANCE;
    }
    out.equivalent = iso_rank == dim_a && mult <= CHECK_TOLERANCE && square_ok;
    Ok(out)
}

/// Monomials in `nvars` variables of total degree at most `d`.
pub fn monomial_basis(nvars: usize, d: u32) -> Vec<Polynomial> {
    (0..=d)
        .flat_map(|t| crate::quantize::exponents_of_degree(nvars, t))
        .map(|e| Polynomial::monomial(nvars, e, C64::new(1.0, 0.0)))
        .collect()
}

/// `q^{hbar/2}`: a quantization with strictly smaller `|hbar|` than `q`.
pub fn strong_limit_falsifier(q: &QuantizationMap) -> Result<QuantizationMap> {
    rescale_qmap(q, q.hbar() * 0.5)
}
