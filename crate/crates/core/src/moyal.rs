//! Moyal star products `*_H` on polynomials in two variables and the
//! intertwiner `T = exp(-nu/2 K_ij d_i d_j)` onto the antisymmetric product `*_J`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_dim, Result};
use crate::linalg::Matrix;
use crate::poly::Polynomial;
use crate::C64;

/// A Moyal product `f *_H g = f exp(nu <-d_i H_ij d_j->) g`.
///
/// `H = J + K` is split into its antisymmetric part `J` and symmetric part `K`
/// at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct MoyalSpec {
    h: [[C64; 2]; 2],
    nu: C64,
    j: [[C64; 2]; 2],
    k: [[C64; 2]; 2],
}

impl MoyalSpec {
    pub fn new(h: [[C64; 2]; 2], nu: C64) -> Self {
        let half = C64::new(0.5, 0.0);
        let mut j = [[C64::new(0.0, 0.0); 2]; 2];
        let mut k = j;
        for a in 0..2 {
            for b in 0..2 {
                j[a][b] = (h[a][b] - h[b][a]) * half;
                k[a][b] = (h[a][b] + h[b][a]) * half;
            }
        }
        Self { h, nu, j, k }
    }

    /// The product `*_p` with `x *_p y - y *_p x = i p`, written with
    /// `nu = i` and `H = [[0, p/2], [-p/2, 0]]`.
    pub fn star_p(p: f64) -> Self {
        let z = C64::new(0.0, 0.0);
        let half = C64::new(p / 2.0, 0.0);
        Self::new([[z, half], [-half, z]], C64::new(0.0, 1.0))
    }

    pub fn h(&self) -> [[C64; 2]; 2] {
        self.h
    }

    pub fn nu(&self) -> C64 {
        self.nu
    }

    pub fn antisymmetric_part(&self) -> [[C64; 2]; 2] {
        self.j
    }

    pub fn symmetric_part(&self) -> [[C64; 2]; 2] {
        self.k
    }

    /// The same `nu` with `H` replaced by its antisymmetric part.
    pub fn antisymmetric(&self) -> Self {
        Self::new(self.j, self.nu)
    }

    /// The same `H` with `nu = 0`: the pointwise product.
    pub fn classical(&self) -> Self {
        Self::new(self.h, C64::new(0.0, 0.0))
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `f *_H g`, exact on polynomials.
///
/// The bidifferential operator `(sum_ij H_ij d_i (x) d_j)^l` is expanded with
/// the multinomial theorem over its four commuting terms, so each order costs
/// one pass over `(a, b, c, d)` with `a + b + c + d = l`.
pub fn moyal_product(f: &Polynomial, g: &Polynomial, spec: &MoyalSpec) -> Result<Polynomial> {
    ensure_dim(2, f.nvars())?;
    ensure_dim(2, g.nvars())?;
    let (df, dg) = match (f.degree(), g.degree()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Ok(Polynomial::zero(2)),
    };
    let h = spec.h;
    let max_order = df.min(dg);
    let mut out = f * g;
    let mut nu_pow = C64::new(1.0, 0.0);
    for l in 1..=max_order {
        nu_pow *= spec.nu;
        if nu_pow.norm() == 0.0 {
            break;
        }
        for a in 0..=l {
            for b in 0..=(l - a) {
                for c in 0..=(l - a - b) {
                    let d = l - a - b - c;
                    let coef = nu_pow
                        * h[0][0].powu(a)
                        * h[0][1].powu(b)
                        * h[1][0].powu(c)
                        * h[1][1].powu(d)
                        / (factorial(a) * factorial(b) * factorial(c) * factorial(d));
                    if coef.norm() == 0.0 {
                        continue;
                    }
                    let lf = f.derivative_multi(&[a + b, c + d]);
                    if lf.is_zero() {
                        continue;
                    }
                    let rg = g.derivative_multi(&[a + c, b + d]);
                    if rg.is_zero() {
                        continue;
                    }
                    out = &out + &(&lf * &rg).scale(coef);
                }
            }
        }
    }
    Ok(out)
}

/// Applies `exp(s * (K_11 d_1^2 + 2 K_12 d_1 d_2 + K_22 d_2^2))` to `f`.
fn exp_second_order(f: &Polynomial, k: &[[C64; 2]; 2], s: C64) -> Polynomial {
    let two = C64::new(2.0, 0.0);
    let mut out = f.clone();
    let mut term = f.clone();
    let mut l = 0u32;
    loop {
        l += 1;
        let lap = &(&term.derivative_multi(&[2, 0]).scale(k[0][0]) + &term.derivative_multi(&[1, 1]).scale(two * k[0][1]))
            + &term.derivative_multi(&[0, 2]).scale(k[1][1]);
        term = lap.scale(s / l as f64);
        if term.is_zero() {
            break;
        }
        out = &out + &term;
    }
    out
}

/// `T(f) = exp(-nu/2 K_ij d_i d_j) f`.
pub fn intertwiner_apply(f: &Polynomial, spec: &MoyalSpec) -> Result<Polynomial> {
    ensure_dim(2, f.nvars())?;
    Ok(exp_second_order(f, &spec.k, spec.nu * -0.5))
}

/// `T^{-1}(f) = exp(+nu/2 K_ij d_i d_j) f`.
pub fn intertwiner_inverse(f: &Polynomial, spec: &MoyalSpec) -> Result<Polynomial> {
    ensure_dim(2, f.nvars())?;
    Ok(exp_second_order(f, &spec.k, spec.nu * 0.5))
}

/// `||T(f *_H g) - T(f) *_J T(g)||`, zero when `T` is an algebra isomorphism.
pub fn intertwiner_defect(f: &Polynomial, g: &Polynomial, spec: &MoyalSpec) -> Result<f64> {
    let lhs = intertwiner_apply(&moyal_product(f, g, spec)?, spec)?;
    let j = spec.antisymmetric();
    let rhs = moyal_product(&intertwiner_apply(f, spec)?, &intertwiner_apply(g, spec)?, &j)?;
    Ok((&lhs - &rhs).norm())
}

/// The family intertwiner `t_{p,r} = T_r^{-1} o T_p` from `(P, *_p)` to `(P, *_r)`,
/// routed through the antisymmetric reference products.
pub fn family_intertwiner(f: &Polynomial, from: &MoyalSpec, to: &MoyalSpec) -> Result<Polynomial> {
    intertwiner_inverse(&intertwiner_apply(f, from)?, to)
}

/// Monomials in two variables of total degree at most `d`, ordered by degree.
pub fn monomials_up_to(d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=d {
        for a in (0..=total).rev() {
            out.push(vec![a, total - a]);
        }
    }
    out
}

/// Matrix of `T` on the degree-`<= d` monomials of [`monomials_up_to`], one
/// column per input monomial. `T` only lowers degree, so the matrix is upper
/// unitriangular in this ordering.
pub fn intertwiner_matrix(spec: &MoyalSpec, d: u32) -> Matrix {
    let basis = monomials_up_to(d);
    let n = basis.len();
    let mut m = Matrix::zeros(n);
    for (col, e) in basis.iter().enumerate() {
        let img = exp_second_order(&Polynomial::monomial(2, e.clone(), C64::new(1.0, 0.0)), &spec.k, spec.nu * -0.5);
        for (row, f) in basis.iter().enumerate() {
            m[(row, col)] = img.coeff(f);
        }
    }
    m
}
