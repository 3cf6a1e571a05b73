//! Linear-algebra facts about the images of quantization maps: the dimension
//! of the generated matrix algebra, kernels of the fuzzy-sphere maps, and the
//! first truncation that tells two observables apart.

use alloc::vec::Vec;

use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{numerical_rank, Matrix, SpanBasis, RANK_TOLERANCE};
use crate::poly::Polynomial;
use crate::quantize::QuantizationMap;
use crate::sphere::{harmonic_basis, harmonic_decompose};

/// Dimension of the span of `Id` and all words in `gens` of length at most
/// `max_word_len`.
///
/// Words of length `l + 1` are only formed from the words of length `l` that
/// enlarged the span, which bounds the work by `dim^2` insertions per letter.
pub fn generated_algebra_dim(gens: &[Matrix], max_word_len: usize) -> Result<usize> {
    let dim = gens.first().map(Matrix::dim).ok_or(Error::InvalidInput("empty generator list"))?;
    for g in gens {
        ensure_dim(dim, g.dim())?;
    }
    if max_word_len == 0 {
        return Err(Error::InvalidInput("word length must be at least 1"));
    }
    let mut span = SpanBasis::new(dim * dim, RANK_TOLERANCE);
    let id = Matrix::identity(dim);
    span.insert(id.as_slice());
    let mut frontier = alloc::vec![id];
    for _ in 0..max_word_len {
        let mut next = Vec::new();
        for w in &frontier {
            for g in gens {
                let v = g * w;
                if span.insert(v.as_slice()) {
                    next.push(v);
                }
            }
        }
        if next.is_empty() || span.is_full() {
            break;
        }
        frontier = next;
    }
    Ok(span.dim())
}

/// Harmonic basis of the sphere polynomials of degree at most `d`, `(d + 1)^2` elements.
pub fn sphere_basis(d: u32) -> Vec<Polynomial> {
    (0..=d).flat_map(harmonic_basis).collect()
}

/// `dim {f : deg f <= d, t_k(f) = 0}`, the nullity of `t_k` on the harmonic basis.
pub fn kernel_dim(k: usize, d: u32) -> Result<usize> {
    let q = QuantizationMap::sphere(k)?;
    let basis = sphere_basis(d);
    let columns: Vec<Vec<_>> = q.quantize_all(&basis)?.into_iter().map(|m| m.as_slice().to_vec()).collect();
    Ok(basis.len() - numerical_rank(&columns, RANK_TOLERANCE))
}

/// `sum_{l=k}^{d} (2l + 1)`, the number of harmonics `t_k` kills up to degree `d`.
pub fn kernel_dim_closed_form(k: usize, d: u32) -> usize {
    (k..=d as usize).map(|l| 2 * l + 1).sum()
}

/// Kernel dimensions along an increasing list of `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelChain {
    pub degree: u32,
    pub rows: Vec<(usize, usize)>,
    /// Strictly decreasing while positive, and zero once zero.
    pub strict: bool,
}

pub fn kernel_chain_check(ks: &[usize], d: u32) -> Result<KernelChain> {
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("k list must be strictly increasing"));
    }
    let rows = ks.iter().map(|&k| kernel_dim(k, d).map(|n| (k, n))).collect::<Result<Vec<_>>>()?;
    let strict = rows.windows(2).all(|w| if w[0].1 > 0 { w[1].1 < w[0].1 } else { w[1].1 == 0 });
    Ok(KernelChain { degree: d, rows, strict })
}

/// Threshold on `||t_k(f) - t_k(g)||_F` above which the images count as distinct.
pub const SEPARATION_THRESHOLD: f64 = 1e-10;

/// Smallest `k` with `t_k(f) != t_k(g)`, or `None` when `f = g` on the sphere.
///
/// `t_1` keeps only the constant term. A difference whose top harmonic has
/// degree `l` is visible from `k = l + 1` on, so the scan stops there.
pub fn separating_index(f: &Polynomial, g: &Polynomial) -> Result<Option<usize>> {
    ensure_dim(3, f.nvars())?;
    ensure_dim(3, g.nvars())?;
    let diff = harmonic_decompose(&(f - g))?;
    let top = match diff.max_degree() {
        None => return Ok(None),
        Some(l) => l as usize,
    };
    if diff.constant().norm() > SEPARATION_THRESHOLD {
        return Ok(Some(1));
    }
    for k in 2..=top + 1 {
        let q = QuantizationMap::sphere(k)?;
        let imgs = q.quantize_all(&[f.clone(), g.clone()])?;
        if (&imgs[0] - &imgs[1]).frobenius_norm() > SEPARATION_THRESHOLD {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reps::{clock_shift, su2_irrep};

    #[test]
    fn generated_dims() {
        let j: Vec<Matrix> = su2_irrep(2).unwrap().into();
        assert_eq!(generated_algebra_dim(&j, 2).unwrap(), 4);
        assert_eq!(generated_algebra_dim(&[Matrix::identity(3)], 5).unwrap(), 1);
        let (u, v, _) = clock_shift(3).unwrap();
        assert_eq!(generated_algebra_dim(&[u, v], 4).unwrap(), 9);
        assert!(generated_algebra_dim(&[], 2).is_err());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_dim(2, 1).unwrap(), 0);
        assert_eq!(kernel_dim(2, 2).unwrap(), 5);
        assert_eq!(kernel_dim(5, 3).unwrap(), 0);
        for k in 2..6 {
            assert_eq!(kernel_dim(k, 4).unwrap(), kernel_dim_closed_form(k, 4));
        }
        let chain = kernel_chain_check(&[2, 3, 4], 3).unwrap();
        assert!(chain.strict);
        assert_eq!(chain.rows, alloc::vec![(2, 12), (3, 7), (4, 0)]);
        let flat = kernel_chain_check(&[2, 3, 4], 0).unwrap();
        assert!(flat.rows.iter().all(|r| r.1 == 0));
    }

    #[test]
    fn separation() {
        let x = |a| Polynomial::var(3, a);
        assert_eq!(separating_index(&x(0), &x(1)).unwrap(), Some(2));
        assert_eq!(separating_index(&x(0), &x(0)).unwrap(), None);
        let r2 = &(&x(0).pow(2) + &x(1).pow(2)) + &x(2).pow(2);
        assert_eq!(separating_index(&r2, &Polynomial::one(3)).unwrap(), None);
        let h = &x(0) * &x(1);
        assert_eq!(separating_index(&(&x(2) + &h), &x(2)).unwrap(), Some(3));
    }
}
