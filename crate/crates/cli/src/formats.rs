//! JSON shapes for the core types. Complex numbers are `[re, im]` pairs except
//! in polynomial terms, which carry `re` and `im` fields.

use anyhow::{bail, ensure, Context};
use matreg_core::moyal::MoyalSpec;
use matreg_core::poisson::{PoissonStructure, StructureConstants};
use matreg_core::quantize::{QuantizationMap, Route};
use matreg_core::reps::RepSet;
use matreg_core::{Matrix, Polynomial, TorusFunction, C64};
use serde::{Deserialize, Serialize};

pub type Complex = [f64; 2];

pub fn complex(z: C64) -> Complex {
    [z.re, z.im]
}

pub fn c64(z: Complex) -> C64 {
    C64::new(z[0], z[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exps: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub nvars: usize,
    pub terms: Vec<Term>,
}

impl From<&Polynomial> for PolynomialJson {
    fn from(p: &Polynomial) -> Self {
        Self {
            nvars: p.nvars(),
            terms: p
                .terms()
                .map(|(e, c)| Term {
                    exps: e.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl TryFrom<&PolynomialJson> for Polynomial {
    type Error = anyhow::Error;

    fn try_from(p: &PolynomialJson) -> anyhow::Result<Self> {
        let terms = p.terms.iter().map(|t| (t.exps.clone(), C64::new(t.re, t.im)));
        Polynomial::from_terms(p.nvars, terms).map_err(|e| anyhow::anyhow!("bad polynomial: {e}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusTerm {
    pub index: [u32; 2],
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusFunctionJson {
    pub terms: Vec<TorusTerm>,
}

impl From<&TorusFunction> for TorusFunctionJson {
    fn from(f: &TorusFunction) -> Self {
        Self {
            terms: f
                .terms()
                .map(|(&(a, b), c)| TorusTerm {
                    index: [a, b],
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl From<&TorusFunctionJson> for TorusFunction {
    fn from(f: &TorusFunctionJson) -> Self {
        TorusFunction::from_terms(f.terms.iter().map(|t| ((t.index[0], t.index[1]), C64::new(t.re, t.im))))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    /// Row-major.
    pub entries: Vec<Complex>,
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        Self {
            dim: m.dim(),
            entries: m.as_slice().iter().copied().map(complex).collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for Matrix {
    type Error = anyhow::Error;

    fn try_from(m: &MatrixJson) -> anyhow::Result<Self> {
        let data = m.entries.iter().copied().map(c64).collect();
        Matrix::from_row_major(m.dim, data).map_err(|e| anyhow::anyhow!("bad matrix: {e}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoyalSpecJson {
    #[serde(rename = "H")]
    pub h: [[Complex; 2]; 2],
    pub nu: Complex,
}

impl From<&MoyalSpec> for MoyalSpecJson {
    fn from(s: &MoyalSpec) -> Self {
        let h = s.h();
        Self {
            h: [[complex(h[0][0]), complex(h[0][1])], [complex(h[1][0]), complex(h[1][1])]],
            nu: complex(s.nu()),
        }
    }
}

impl From<&MoyalSpecJson> for MoyalSpec {
    fn from(s: &MoyalSpecJson) -> Self {
        let h = s.h.map(|row| row.map(c64));
        MoyalSpec::new(h, c64(s.nu))
    }
}

/// Structure constants `f_ij^k`, flattened with `k` fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureJson {
    pub dim: usize,
    pub f: Vec<Complex>,
}

impl From<&StructureConstants> for StructureJson {
    fn from(s: &StructureConstants) -> Self {
        Self {
            dim: s.dim(),
            f: s.as_slice().iter().copied().map(complex).collect(),
        }
    }
}

impl TryFrom<&StructureJson> for StructureConstants {
    type Error = anyhow::Error;

    fn try_from(s: &StructureJson) -> anyhow::Result<Self> {
        StructureConstants::new(s.dim, s.f.iter().copied().map(c64).collect()).map_err(|e| anyhow::anyhow!("bad structure constants: {e}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepSetJson {
    pub generators: Vec<MatrixJson>,
    pub hbar: Complex,
    pub structure: StructureJson,
}

impl From<&RepSet> for RepSetJson {
    fn from(r: &RepSet) -> Self {
        Self {
            generators: r.generators.iter().map(MatrixJson::from).collect(),
            hbar: complex(r.hbar),
            structure: (&r.structure).into(),
        }
    }
}

impl TryFrom<&RepSetJson> for RepSet {
    type Error = anyhow::Error;

    fn try_from(r: &RepSetJson) -> anyhow::Result<Self> {
        let generators = r.generators.iter().map(Matrix::try_from).collect::<anyhow::Result<Vec<_>>>()?;
        let structure = StructureConstants::try_from(&r.structure)?;
        ensure!(generators.len() == structure.dim(), "{} generators for a {}-dimensional algebra", generators.len(), structure.dim());
        Ok(RepSet {
            generators,
            hbar: c64(r.hbar),
            structure,
        })
    }
}

pub fn source_kind(s: &PoissonStructure) -> &'static str {
    match s {
        PoissonStructure::Canonical2D => "canonical-2d",
        PoissonStructure::KirillovKostant(_) => "kirillov-kostant",
        PoissonStructure::SphereQuotient => "sphere-quotient",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantizationMapJson {
    pub source: String,
    pub route: String,
    pub hbar: Complex,
    pub dim: usize,
    pub truncation: u32,
    /// Images of the coordinate functions, including any output scale.
    pub images: Vec<MatrixJson>,
}

impl From<&QuantizationMap> for QuantizationMapJson {
    fn from(q: &QuantizationMap) -> Self {
        let images = q.images();
        Self {
            source: source_kind(q.structure()).into(),
            route: match q.route() {
                Route::Harmonic => "harmonic",
                Route::Symmetric => "symmetric",
            }
            .into(),
            hbar: complex(matreg_core::quantize::Quantizer::hbar(q)),
            dim: images.first().map_or(0, Matrix::dim),
            truncation: q.truncation_degree(),
            images: images.iter().map(MatrixJson::from).collect(),
        }
    }
}

/// Parses `a..b` (inclusive), `a..=b`, `a,b,c` or a single `a`.
pub fn parse_k_range(s: &str) -> anyhow::Result<Vec<usize>> {
    let s = s.trim();
    let ks: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().with_context(|| format!("bad range start in {s:?}"))?;
        let b: usize = b.trim().trim_start_matches('=').trim().parse().with_context(|| format!("bad range end in {s:?}"))?;
        (a..=b).collect()
    } else {
        s.split(',')
            .map(|t| t.trim().parse::<usize>().with_context(|| format!("bad k value {t:?}")))
            .collect::<anyhow::Result<_>>()?
    };
    if ks.is_empty() {
        bail!("empty k range {s:?}");
    }
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        bail!("k values must be strictly increasing in {s:?}");
    }
    Ok(ks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_k_range("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_k_range("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_k_range("4").unwrap(), vec![4]);
        assert_eq!(parse_k_range("2, 7").unwrap(), vec![2, 7]);
        assert!(parse_k_range("5..2").is_err());
        assert!(parse_k_range("3,3").is_err());
        assert!(parse_k_range("x").is_err());
    }

    #[test]
    fn round_trips() {
        let p = &Polynomial::var(3, 0) * &Polynomial::var(3, 2).scale(C64::new(0.5, -1.0));
        let back = Polynomial::try_from(&PolynomialJson::from(&p)).unwrap();
        assert_eq!(back, p);

        let rep = RepSet::su2(3).unwrap();
        let json = serde_json::to_string(&RepSetJson::from(&rep)).unwrap();
        let back = RepSet::try_from(&serde_json::from_str::<RepSetJson>(&json).unwrap()).unwrap();
        assert_eq!(back, rep);

        let spec = MoyalSpec::star_p(0.3);
        let json = serde_json::to_value(MoyalSpecJson::from(&spec)).unwrap();
        assert!(json.get("H").is_some());
        let back = MoyalSpec::from(&serde_json::from_value::<MoyalSpecJson>(json).unwrap());
        assert_eq!(back.h(), spec.h());

        let f = TorusFunction::mode(1, 2, C64::new(2.0, 0.0));
        assert_eq!(TorusFunction::from(&TorusFunctionJson::from(&f)), f);
    }

    #[test]
    fn bad_inputs() {
        let bad = MatrixJson {
            dim: 2,
            entries: vec![[1.0, 0.0]; 3],
        };
        assert!(Matrix::try_from(&bad).is_err());
        let p = PolynomialJson {
            nvars: 2,
            terms: vec![Term {
                exps: vec![1, 0, 0],
                re: 1.0,
                im: 0.0,
            }],
        };
        assert!(Polynomial::try_from(&p).is_err());
    }
}
