//! Polynomials on the two-sphere: normal forms modulo `sum (x^a)^2 = 1` and
//! the expansion into symmetric trace-free (harmonic) coefficient tensors.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_dim, Result};
use crate::poly::{Exponents, Polynomial, ZERO_THRESHOLD};
use crate::C64;

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `r^2 = (x^1)^2 + (x^2)^2 + (x^3)^2`.
pub fn radius_squared() -> Polynomial {
    Polynomial::from_terms(3, [(vec![2, 0, 0], r(1.0)), (vec![0, 2, 0], r(1.0)), (vec![0, 0, 2], r(1.0))])
        .expect("valid exponents")
}

/// Canonical representative modulo `r^2 - 1`, obtained by rewriting
/// `(x^3)^2 -> 1 - (x^1)^2 - (x^2)^2` until every term has `x^3`-degree at most one.
pub fn sphere_normal_form(p: &Polynomial) -> Result<Polynomial> {
    ensure_dim(3, p.nvars())?;
    let mut work: Vec<(Exponents, C64)> = p.terms().map(|(e, c)| (e.clone(), *c)).collect();
    let mut out = Polynomial::zero(3);
    while let Some((e, c)) = work.pop() {
        if e[2] < 2 {
            out.add_term(e, c);
            continue;
        }
        let lowered = [e[0], e[1], e[2] - 2];
        work.push((lowered.to_vec(), c));
        work.push((vec![lowered[0] + 2, lowered[1], lowered[2]], -c));
        work.push((vec![lowered[0], lowered[1] + 2, lowered[2]], -c));
    }
    out.prune(ZERO_THRESHOLD);
    Ok(out)
}

/// Monomials of total degree at most `n` in normal form (`x^3`-degree at most one).
/// There are `(n + 1)^2` of them.
pub fn normal_form_monomials(n: u32) -> Vec<Exponents> {
    let mut out = Vec::new();
    for d in 0..=n {
        out.extend(normal_form_monomials_of_degree(d));
    }
    out
}

/// Normal-form monomials of exact degree `d`; `2d + 1` of them.
pub fn normal_form_monomials_of_degree(d: u32) -> Vec<Exponents> {
    let mut out = Vec::new();
    for c in 0..=1u32.min(d) {
        for a in (0..=(d - c)).rev() {
            out.push(vec![a, d - c - a, c]);
        }
    }
    out
}

/// Euclidean Laplacian in three variables.
pub fn laplacian(p: &Polynomial) -> Polynomial {
    let mut out = Polynomial::zero(p.nvars());
    for i in 0..p.nvars() {
        let mut e = vec![0; p.nvars()];
        e[i] = 2;
        out = &out + &p.derivative_multi(&e);
    }
    out
}

/// Harmonic part of a homogeneous polynomial of degree `l` in three variables:
/// `H(p) = sum_j (-1)^j r^{2j} Lap^j p / (2^j j! prod_{i=1..j} (2l + 1 - 2i))`.
pub fn harmonic_projection(p: &Polynomial, l: u32) -> Polynomial {
    let r2 = radius_squared();
    let mut out = Polynomial::zero(3);
    let mut lap = p.clone();
    let mut r_pow = Polynomial::one(3);
    let mut coef = 1.0;
    let mut j = 0u32;
    while !lap.is_zero() {
        out = &out + &(&r_pow * &lap).scale(r(coef));
        j += 1;
        if 2 * j > l {
            break;
        }
        lap = laplacian(&lap);
        r_pow = &r_pow * &r2;
        coef *= -1.0 / (2.0 * j as f64 * (2 * l + 1 - 2 * j) as f64);
    }
    out
}

/// Exact division by `r^2`; returns `(quotient, remainder)` with the remainder
/// of `x^3`-degree at most one.
pub fn divide_by_radius_squared(p: &Polynomial) -> (Polynomial, Polynomial) {
    let mut work: Vec<(Exponents, C64)> = p.terms().map(|(e, c)| (e.clone(), *c)).collect();
    let mut quotient = Polynomial::zero(3);
    let mut rem = Polynomial::zero(3);
    // Process highest x^3 powers first so each rewrite only creates lower ones.
    work.sort_by_key(|(e, _)| e[2]);
    while let Some((e, c)) = work.pop() {
        if e[2] < 2 {
            rem.add_term(e, c);
            continue;
        }
        let q = vec![e[0], e[1], e[2] - 2];
        quotient.add_term(q.clone(), c);
        work.push((vec![q[0] + 2, q[1], q[2]], -c));
        work.push((vec![q[0], q[1] + 2, q[2]], -c));
        work.sort_by_key(|(e, _)| e[2]);
    }
    quotient.prune(ZERO_THRESHOLD);
    rem.prune(ZERO_THRESHOLD);
    (quotient, rem)
}

/// A completely symmetric rank-`l` tensor in three dimensions, stored as the
/// homogeneous polynomial `f_{a1..al} x^{a1} ... x^{al}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricTensor {
    rank: u32,
    poly: Polynomial,
}

impl SymmetricTensor {
    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn as_polynomial(&self) -> &Polynomial {
        &self.poly
    }

    /// Component `f_{a1..al}` for 0-based indices.
    pub fn component(&self, idx: &[usize]) -> C64 {
        assert_eq!(idx.len(), self.rank as usize, "index count must equal tensor rank");
        let mut e = [0u32; 3];
        for &a in idx {
            e[a] += 1;
        }
        self.poly.coeff(&e) / multinomial(&e)
    }

    /// Largest component of the contraction over the first two indices; zero for trace-free tensors.
    pub fn trace_defect(&self) -> f64 {
        if self.rank < 2 {
            return 0.0;
        }
        let lap = laplacian(&self.poly);
        let denom = (self.rank * (self.rank - 1)) as f64;
        lap.terms().map(|(e, c)| (c / (denom * multinomial(e))).norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
}

/// `l! / (e_0! e_1! e_2!)` for `l = sum e_i`.
pub fn multinomial(e: &[u32]) -> f64 {
    let l: u32 = e.iter().sum();
    let mut num = 1.0;
    for k in 1..=l {
        num *= k as f64;
    }
    e.iter().fold(num, |acc, &k| acc / (1..=k).map(|x| x as f64).product::<f64>())
}

/// Expansion `f = f_0 + f_a x^a + f_ab x^a x^b + ...` with every tensor
/// symmetric and trace-free; index `l` holds the rank-`l` tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicDecomposition {
    tensors: Vec<SymmetricTensor>,
}

impl HarmonicDecomposition {
    pub fn tensors(&self) -> &[SymmetricTensor] {
        &self.tensors
    }

    /// The rank-`l` tensor (zero if `l` exceeds the stored degree).
    pub fn tensor(&self, l: u32) -> SymmetricTensor {
        self.tensors.get(l as usize).cloned().unwrap_or(SymmetricTensor {
            rank: l,
            poly: Polynomial::zero(3),
        })
    }

    pub fn constant(&self) -> C64 {
        self.tensor(0).poly.coeff(&[0, 0, 0])
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.tensors.iter().rposition(|t| !t.is_zero()).map(|l| l as u32)
    }

    /// Sum of the harmonic pieces as an ordinary polynomial.
    pub fn recompose(&self) -> Polynomial {
        self.tensors.iter().fold(Polynomial::zero(3), |acc, t| &acc + &t.poly)
    }

    /// Harmonic pieces of degree below `k`, i.e. what survives `t_k`.
    pub fn truncated(&self, below: u32) -> Self {
        Self {
            tensors: self.tensors.iter().take(below as usize).cloned().collect(),
        }
    }
}

/// Unique decomposition of the class of `p` into symmetric trace-free tensors.
///
/// Works from the top degree down: the harmonic part of each homogeneous piece
/// is kept, and the remainder (divisible by `r^2`) is pushed two degrees lower.
pub fn harmonic_decompose(p: &Polynomial) -> Result<HarmonicDecomposition> {
    ensure_dim(3, p.nvars())?;
    let top = match p.degree() {
        None => return Ok(HarmonicDecomposition { tensors: Vec::new() }),
        Some(d) => d,
    };
    let mut pieces: Vec<Polynomial> = (0..=top).map(|d| p.homogeneous_part(d)).collect();
    let mut tensors: Vec<SymmetricTensor> = (0..=top)
        .map(|l| SymmetricTensor {
            rank: l,
            poly: Polynomial::zero(3),
        })
        .collect();
    for d in (0..=top).rev() {
        let piece = core::mem::replace(&mut pieces[d as usize], Polynomial::zero(3));
        if piece.is_zero() {
            continue;
        }
        let h = harmonic_projection(&piece, d);
        let rest = &piece - &h;
        if !rest.is_zero() && d >= 2 {
            let (q, _rem) = divide_by_radius_squared(&rest);
            pieces[(d - 2) as usize] = &pieces[(d - 2) as usize] + &q;
        }
        tensors[d as usize].poly = h;
    }
    while tensors.last().is_some_and(|t| t.is_zero()) {
        tensors.pop();
    }
    Ok(HarmonicDecomposition { tensors })
}

/// A basis of the degree-`l` harmonic polynomials (`2l + 1` elements), the
/// harmonic projections of the normal-form monomials of degree `l`.
pub fn harmonic_basis(l: u32) -> Vec<Polynomial> {
    normal_form_monomials_of_degree(l)
        .into_iter()
        .map(|e| harmonic_projection(&Polynomial::monomial(3, e, r(1.0)), l))
        .collect()
}
