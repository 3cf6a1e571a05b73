//! Quantization maps into matrix algebras: the fuzzy sphere `t_k`, the fuzzy
//! torus `q_k`, symmetrized Lie-algebra quantizations `q_mu`, and the defect
//! `[q f, q g] - c hbar q({f, g})` that measures how far a map is from exact.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{Matrix, SpanBasis, RANK_TOLERANCE};
use crate::poisson::{poisson_bracket, torus_bracket, PoissonStructure};
use crate::poly::{Exponents, Polynomial, TorusFunction};
use crate::reps::{clock_shift, hbar_for_k, su2_irrep, RepSet};
use crate::sphere::{harmonic_decompose, multinomial};
use crate::C64;

/// Anything that sends classical observables to matrices with a Planck constant.
pub trait Quantizer {
    type Observable;

    fn hbar(&self) -> C64;
    fn dim(&self) -> usize;
    fn quantize(&self, f: &Self::Observable) -> Result<Matrix>;
    fn bracket(&self, f: &Self::Observable, g: &Self::Observable) -> Result<Self::Observable>;
    /// `c` in `[q f, q g] = c hbar q({f, g}) + ...`.
    fn commutator_factor(&self) -> C64;
}

/// `D = [q f, q g] - c hbar q({f, g})`; its Frobenius norm is the defect size.
pub fn defect<Q: Quantizer>(f: &Q::Observable, g: &Q::Observable, q: &Q) -> Result<Matrix> {
    let qf = q.quantize(f)?;
    let qg = q.quantize(g)?;
    let qb = q.quantize(&q.bracket(f, g)?)?;
    let mut d = qf.commutator(&qg);
    d.axpy(-(q.commutator_factor() * q.hbar()), &qb);
    Ok(d)
}

/// Average of the products of `word` over all orderings; `Id` for the empty word.
pub fn symmetrize(word: &[Matrix], dim: usize) -> Result<Matrix> {
    for m in word {
        ensure_dim(dim, m.dim())?;
    }
    if word.len() > 20 {
        return Err(Error::InvalidInput("symmetrized words are limited to 20 letters"));
    }
    // sums[s] = sum over orderings of the letters in subset s of their product
    let n = word.len();
    let mut sums: Vec<Matrix> = Vec::with_capacity(1 << n);
    sums.push(Matrix::identity(dim));
    for s in 1usize..(1 << n) {
        let mut acc = Matrix::zeros(dim);
        for (i, m) in word.iter().enumerate() {
            if s & (1 << i) != 0 {
                acc += &(m * &sums[s & !(1 << i)]);
            }
        }
        sums.push(acc);
    }
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    Ok(sums[(1 << n) - 1].scale_real(1.0 / fact))
}

/// Memoized symmetrized monomials `sym(e_1^{m_1} ... e_d^{m_d})`.
///
/// The sum over distinct words with content `m` satisfies
/// `W(m) = sum_a e_a W(m - unit_a)`; dividing by the multinomial gives the
/// average over all orderings.
struct SymmetricProducts<'a> {
    gens: &'a [Matrix],
    dim: usize,
    words: BTreeMap<Exponents, Matrix>,
}

impl<'a> SymmetricProducts<'a> {
    fn new(gens: &'a [Matrix], dim: usize) -> Self {
        Self {
            gens,
            dim,
            words: BTreeMap::new(),
        }
    }

    fn word_sum(&mut self, m: &[u32]) -> Matrix {
        if let Some(w) = self.words.get(m) {
            return w.clone();
        }
        let w = if m.iter().all(|&e| e == 0) {
            Matrix::identity(self.dim)
        } else {
            let mut acc = Matrix::zeros(self.dim);
            let mut sub = m.to_vec();
            for a in 0..m.len() {
                if m[a] == 0 {
                    continue;
                }
                sub[a] -= 1;
                let inner = self.word_sum(&sub);
                sub[a] += 1;
                acc += &(&self.gens[a] * &inner);
            }
            acc
        };
        self.words.insert(m.to_vec(), w.clone());
        w
    }

    fn monomial(&mut self, m: &[u32]) -> Matrix {
        self.word_sum(m).scale_real(1.0 / multinomial(m))
    }

    /// `sum_e c_e sym(e^e)` over the terms of `p` of degree at most `max_degree`.
    fn apply(&mut self, p: &Polynomial, max_degree: u32) -> Matrix {
        let mut out = Matrix::zeros(self.dim);
        for (e, c) in p.terms() {
            if e.iter().sum::<u32>() <= max_degree {
                let s = self.monomial(e);
                out.axpy(*c, &s);
            }
        }
        out
    }
}

/// How a polynomial is turned into a combination of symmetrized products.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Trace-free tensors of the sphere quotient (needs `sum_a e_a^2 = Id`).
    Harmonic,
    /// Plain monomial coefficients.
    Symmetric,
}

/// A quantization map determined by its generator images.
///
/// Higher-degree monomials go to fully symmetrized products of the generator
/// images, and degrees above `truncation` are dropped. `scale` multiplies the
/// whole map, so `rescale_qmap` realizes `q^x = (x / hbar) q`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizationMap {
    structure: PoissonStructure,
    route: Route,
    hbar: C64,
    dim: usize,
    generators: Vec<Matrix>,
    truncation: u32,
    scale: C64,
}

impl QuantizationMap {
    pub fn new(structure: PoissonStructure, route: Route, hbar: C64, generators: Vec<Matrix>, truncation: u32) -> Result<Self> {
        if hbar.norm() == 0.0 || !hbar.is_finite() {
            return Err(Error::InvalidInput("a quantization map needs a finite nonzero hbar"));
        }
        ensure_dim(structure.nvars(), generators.len())?;
        if route == Route::Harmonic && structure.nvars() != 3 {
            return Err(Error::InvalidInput("the harmonic route is defined on three variables"));
        }
        let dim = generators.first().map(Matrix::dim).ok_or(Error::InvalidInput("no generator images"))?;
        for g in &generators {
            ensure_dim(dim, g.dim())?;
            if !g.is_finite() {
                return Err(Error::NonFinite);
            }
        }
        Ok(Self {
            structure,
            route,
            hbar,
            dim,
            generators,
            truncation,
            scale: C64::new(1.0, 0.0),
        })
    }

    /// The fuzzy sphere `t_k`: `x^a -> hbar_k J^a`, harmonic degrees below `k`.
    pub fn sphere(k: usize) -> Result<Self> {
        let hbar = hbar_for_k(k)?;
        let gens = su2_irrep(k)?.iter().map(|j| j.scale_real(hbar)).collect();
        Self::new(PoissonStructure::SphereQuotient, Route::Harmonic, C64::new(hbar, 0.0), gens, (k - 1) as u32)
    }

    /// `q_mu` for a representation: Kirillov–Kostant source, symmetrized
    /// monomials, truncation at the degree where their span stabilizes.
    pub fn from_repset(rep: &RepSet) -> Result<Self> {
        let dim = rep.dim()?;
        let n = truncation_degree(&rep.generators, dim)?;
        Self::new(
            PoissonStructure::KirillovKostant(rep.structure.clone()),
            Route::Symmetric,
            rep.hbar,
            rep.generators.clone(),
            n,
        )
    }

    pub fn structure(&self) -> &PoissonStructure {
        &self.structure
    }

    pub fn route(&self) -> Route {
        self.route
    }

    pub fn truncation_degree(&self) -> u32 {
        self.truncation
    }

    pub fn scale(&self) -> C64 {
        self.scale
    }

    /// Images of the coordinate functions, including the overall scale.
    pub fn images(&self) -> Vec<Matrix> {
        self.generators.iter().map(|g| g.scale(self.scale)).collect()
    }

    /// Quantizes several polynomials, sharing the symmetrized-product cache.
    pub fn quantize_all(&self, fs: &[Polynomial]) -> Result<Vec<Matrix>> {
        let mut sym = SymmetricProducts::new(&self.generators, self.dim);
        fs.iter().map(|f| self.quantize_with(f, &mut sym)).collect()
    }

    fn quantize_with(&self, f: &Polynomial, sym: &mut SymmetricProducts<'_>) -> Result<Matrix> {
        ensure_dim(self.structure.nvars(), f.nvars())?;
        let m = match self.route {
            Route::Symmetric => sym.apply(f, self.truncation),
            Route::Harmonic => {
                let dec = harmonic_decompose(f)?.truncated(self.truncation + 1);
                let mut out = Matrix::zeros(self.dim);
                for t in dec.tensors() {
                    out += &sym.apply(t.as_polynomial(), t.rank());
                }
                out
            }
        };
        Ok(m.scale(self.scale))
    }
}

impl Quantizer for QuantizationMap {
    type Observable = Polynomial;

    fn hbar(&self) -> C64 {
        self.hbar
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn quantize(&self, f: &Polynomial) -> Result<Matrix> {
        let mut sym = SymmetricProducts::new(&self.generators, self.dim);
        self.quantize_with(f, &mut sym)
    }

    fn bracket(&self, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
        poisson_bracket(f, g, &self.structure)
    }

    fn commutator_factor(&self) -> C64 {
        self.structure.commutator_factor()
    }
}

/// The fuzzy torus `q_k(y_{l1,l2}) = U^{l1} V^{l2}` with `hbar = 2/k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusMap {
    k: usize,
    u: Matrix,
    v: Matrix,
}

impl TorusMap {
    pub fn new(k: usize) -> Result<Self> {
        let (u, v, _) = clock_shift(k)?;
        Ok(Self { k, u, v })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl Quantizer for TorusMap {
    type Observable = TorusFunction;

    fn hbar(&self) -> C64 {
        C64::new(2.0 / self.k as f64, 0.0)
    }

    fn dim(&self) -> usize {
        self.k
    }

    fn quantize(&self, f: &TorusFunction) -> Result<Matrix> {
        let k = self.k as u32;
        let mut out = Matrix::zeros(self.k);
        for (&(l1, l2), c) in f.terms() {
            let y = self.u.pow(l1 % k).matmul(&self.v.pow(l2 % k))?;
            out.axpy(*c, &y);
        }
        Ok(out)
    }

    fn bracket(&self, f: &TorusFunction, g: &TorusFunction) -> Result<TorusFunction> {
        Ok(torus_bracket(f, g))
    }

    fn commutator_factor(&self) -> C64 {
        C64::new(0.0, 1.0)
    }
}

/// `t_k(f)` for a polynomial on the sphere.
pub fn quantize_sphere(f: &Polynomial, k: usize) -> Result<Matrix> {
    QuantizationMap::sphere(k)?.quantize(f)
}

/// `q_k(f)` for a function on the torus.
pub fn quantize_torus(f: &TorusFunction, k: usize) -> Result<Matrix> {
    TorusMap::new(k)?.quantize(f)
}

/// `q_mu(f)` for a representation set.
pub fn quantize_lie(f: &Polynomial, rep: &RepSet) -> Result<Matrix> {
    QuantizationMap::from_repset(rep)?.quantize(f)
}

/// Smallest degree `n` at which the span of symmetrized monomials of degree
/// at most `n` stops growing (or fills the whole matrix algebra).
pub fn truncation_degree(gens: &[Matrix], dim: usize) -> Result<u32> {
    if gens.is_empty() {
        return Err(Error::InvalidInput("no generators"));
    }
    for g in gens {
        ensure_dim(dim, g.dim())?;
    }
    let d = gens.len();
    let mut sym = SymmetricProducts::new(gens, dim);
    let mut span = SpanBasis::new(dim * dim, RANK_TOLERANCE);
    span.insert(Matrix::identity(dim).as_slice());
    let mut degree = 0u32;
    loop {
        if span.is_full() {
            return Ok(degree);
        }
        let next = degree + 1;
        let mut grew = false;
        for e in exponents_of_degree(d, next) {
            if span.insert(sym.monomial(&e).as_slice()) {
                grew = true;
            }
        }
        if !grew {
            return Ok(degree);
        }
        degree = next;
    }
}

/// All exponent vectors of length `n` with total degree `d`.
pub fn exponents_of_degree(n: usize, d: u32) -> Vec<Exponents> {
    let mut out = Vec::new();
    let mut cur = alloc::vec![0u32; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Exponents>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
    }
    if n > 0 {
        rec(0, d, &mut cur, &mut out);
    }
    out
}

/// `q^x = (x / hbar) q`, a quantization map with `hbar(q^x) = x`.
pub fn rescale_qmap(q: &QuantizationMap, x: C64) -> Result<QuantizationMap> {
    if x.norm() == 0.0 || !x.is_finite() {
        return Err(Error::InvalidInput("rescaling needs a finite nonzero hbar"));
    }
    let mut out = q.clone();
    out.scale = q.scale * x / q.hbar;
    out.hbar = x;
    Ok(out)
}

/// `q (+) q`: every image doubled block-diagonally, same `hbar`.
pub fn direct_sum_qmap(q: &QuantizationMap) -> QuantizationMap {
    let mut out = q.clone();
    out.generators = q.generators.iter().map(|g| Matrix::block_diagonal(&[g, g])).collect();
    out.dim = 2 * q.dim;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn x(a: usize) -> Polynomial {
        Polynomial::var(3, a)
    }

    #[test]
    fn sphere_examples() {
        let [_, _, j3] = su2_irrep(2).unwrap();
        let h = hbar_for_k(2).unwrap();
        assert!((&quantize_sphere(&x(2), 2).unwrap() - &j3.scale_real(h)).frobenius_norm() < 1e-15);
        assert_eq!(quantize_sphere(&Polynomial::one(3), 5).unwrap(), Matrix::identity(5));
        let sq = quantize_sphere(&x(0).pow(2), 2).unwrap();
        assert!((&sq - &Matrix::identity(2).scale_real(1.0 / 3.0)).frobenius_norm() < 1e-15);
        assert!(quantize_sphere(&x(0), 1).is_err());
    }

    #[test]
    fn sphere_relation_maps_to_identity() {
        let r2 = &(&x(0).pow(2) + &x(1).pow(2)) + &x(2).pow(2);
        for k in 2..7 {
            let m = quantize_sphere(&r2, k).unwrap();
            assert!((&m - &Matrix::identity(k)).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn symmetrize_examples() {
        let [a, b, c] = su2_irrep(3).unwrap();
        assert_eq!(symmetrize(std::slice::from_ref(&a), 3).unwrap(), a);
        let ab = symmetrize(&[a.clone(), b.clone()], 3).unwrap();
        assert!((&ab - &(&(&a * &b) + &(&b * &a)).scale_real(0.5)).frobenius_norm() < 1e-14);
        assert_eq!(symmetrize(&[], 3).unwrap(), Matrix::identity(3));
        // oracle: explicit sum over the six orderings
        let w = [&a, &b, &c];
        let mut brute = Matrix::zeros(3);
        for p in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            brute += &(&(w[p[0]] * w[p[1]]) * w[p[2]]);
        }
        let s = symmetrize(&[a.clone(), b.clone(), c.clone()], 3).unwrap();
        assert!((&s - &brute.scale_real(1.0 / 6.0)).frobenius_norm() < 1e-13);
        assert!(symmetrize(&[a, Matrix::zeros(2)], 3).is_err());
    }

    #[test]
    fn memoized_monomial_matches_word_symmetrization() {
        let [a, b, c] = su2_irrep(4).unwrap();
        let gens = [a.clone(), b.clone(), c.clone()];
        let mut sym = SymmetricProducts::new(&gens, 4);
        let m = sym.monomial(&[2, 0, 1]);
        let s = symmetrize(&[a.clone(), a, c], 4).unwrap();
        assert!((&m - &s).frobenius_norm() < 1e-13);
    }

    #[test]
    fn lie_examples() {
        let rep = RepSet::su2(2).unwrap();
        assert_eq!(quantize_lie(&x(1), &rep).unwrap(), rep.generators[1]);
        let m = quantize_lie(&(&x(0) * &x(1)), &rep).unwrap();
        assert!(m.frobenius_norm() < 1e-15);
        let q = QuantizationMap::from_repset(&RepSet::su2(4).unwrap()).unwrap();
        assert_eq!(q.truncation_degree(), 3);
        let high = &x(0).pow(5) + &x(1);
        assert_eq!(q.quantize(&high).unwrap(), q.quantize(&x(1)).unwrap());
    }

    #[test]
    fn sphere_linear_defect_vanishes() {
        for k in 2..8 {
            let q = QuantizationMap::sphere(k).unwrap();
            let d = defect(&x(0), &x(1), &q).unwrap();
            assert!(d.frobenius_norm() < 1e-12);
            assert!(defect(&x(2), &x(2), &q).unwrap().frobenius_norm() == 0.0);
        }
    }

    #[test]
    fn torus_examples() {
        let (u, v, _) = clock_shift(3).unwrap();
        let f = TorusFunction::from_terms([((1, 0), r(1.0)), ((0, 1), C64::new(0.0, 2.0))]);
        let m = quantize_torus(&f, 3).unwrap();
        assert!((&m - &(&u + &v.scale(C64::new(0.0, 2.0)))).frobenius_norm() < 1e-15);
        assert_eq!(quantize_torus(&TorusFunction::mode(0, 0, r(1.0)), 4).unwrap(), Matrix::identity(4));
    }

    #[test]
    fn rescale_and_direct_sum() {
        let q = QuantizationMap::sphere(3).unwrap();
        let same = rescale_qmap(&q, q.hbar()).unwrap();
        assert!((same.scale() - r(1.0)).norm() < 1e-15);
        let two = rescale_qmap(&q, q.hbar() * 2.0).unwrap();
        assert_eq!(two.hbar(), q.hbar() * 2.0);
        let f = &x(0) * &x(1);
        let g = &x(1) * &x(2);
        let d0 = defect(&f, &g, &q).unwrap();
        let d2 = defect(&f, &g, &two).unwrap();
        assert!((&d2 - &d0.scale_real(4.0)).frobenius_norm() < 1e-12);
        assert!(rescale_qmap(&q, r(0.0)).is_err());

        let s = direct_sum_qmap(&q);
        assert_eq!(s.dim(), 6);
        let ds = defect(&f, &g, &s).unwrap();
        assert!((ds.frobenius_norm() - 2f64.sqrt() * d0.frobenius_norm()).abs() < 1e-12);
        assert!(defect(&x(0), &x(1), &s).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn exponent_enumeration() {
        assert_eq!(exponents_of_degree(3, 2).len(), 6);
        assert_eq!(exponents_of_degree(2, 0), vec![vec![0, 0]]);
    }
}
