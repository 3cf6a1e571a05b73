//! Lie structure constants and the Poisson brackets built on them.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure_dim, Error, Result};
use crate::poly::{Polynomial, TorusFunction};
use crate::sphere::sphere_normal_form;
use crate::C64;

/// Rank-3 tensor `f[i][j][k]` of structure constants, `[e_i, e_j] = f_ij^k e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    f: Vec<C64>,
}

/// Levi-Civita symbol on `{0, 1, 2}`.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

impl StructureConstants {
    /// Validates antisymmetry and the Jacobi identity before accepting the tensor.
    pub fn new(dim: usize, f: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("Lie algebra dimension must be positive"));
        }
        ensure_dim(dim * dim * dim, f.len())?;
        let sc = Self { dim, f };
        let scale = sc.f.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let defect = sc.antisymmetry_defect().max(sc.jacobi_defect());
        if defect > 1e-10 * scale * scale {
            return Err(Error::InvalidStructure { defect });
        }
        Ok(sc)
    }

    /// Builds the tensor from a function of `(i, j, k)`.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize, usize) -> C64) -> Result<Self> {
        let mut data = Vec::with_capacity(dim * dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    data.push(f(i, j, k));
                }
            }
        }
        Self::new(dim, data)
    }

    /// su(2) in the convention `[e_i, e_j] = i eps_ijk e_k` (Hermitian generators).
    pub fn su2() -> Self {
        Self::from_fn(3, |i, j, k| C64::new(0.0, levi_civita(i, j, k))).expect("su(2) is a Lie algebra")
    }

    /// su(2) with real constants `[e_i, e_j] = eps_ijk e_k`.
    pub fn su2_real() -> Self {
        Self::from_fn(3, |i, j, k| C64::new(levi_civita(i, j, k), 0.0)).expect("su(2) is a Lie algebra")
    }

    pub fn abelian(dim: usize) -> Self {
        Self {
            dim,
            f: vec![C64::new(0.0, 0.0); dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> C64 {
        self.f[(i * self.dim + j) * self.dim + k]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.f
    }

    pub fn antisymmetry_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    worst = worst.max((self.get(i, j, k) + self.get(j, i, k)).norm());
                }
            }
        }
        worst
    }

    /// Max over `(i, j, l, m)` of `|sum_k f_ij^k f_kl^m + f_jl^k f_ki^m + f_li^k f_kj^m|`.
    pub fn jacobi_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    for m in 0..d {
                        let s: C64 = (0..d)
                            .map(|k| {
                                self.get(i, j, k) * self.get(k, l, m)
                                    + self.get(j, l, k) * self.get(k, i, m)
                                    + self.get(l, i, k) * self.get(k, j, m)
                            })
                            .sum();
                        worst = worst.max(s.norm());
                    }
                }
            }
        }
        worst
    }

    pub fn is_su2(&self) -> bool {
        self.dim == 3 && self.f.iter().zip(Self::su2().f.iter()).all(|(a, b)| (a - b).norm() < 1e-12)
    }
}

/// The Poisson structures the crate knows how to differentiate.
#[derive(Clone, Debug, PartialEq)]
pub enum PoissonStructure {
    /// `{f, g} = d_x f d_y g - d_y f d_x g` on two variables.
    Canonical2D,
    /// Linear bracket `omega_ij = f_ij^k x^k` on `d` variables.
    KirillovKostant(StructureConstants),
    /// Three variables modulo `sum (x^a)^2 = 1` with `{x^a, x^b} = eps^{abc} x^c`.
    SphereQuotient,
}

impl PoissonStructure {
    pub fn nvars(&self) -> usize {
        match self {
            PoissonStructure::Canonical2D => 2,
            PoissonStructure::KirillovKostant(sc) => sc.dim(),
            PoissonStructure::SphereQuotient => 3,
        }
    }

    /// The bivector entry `omega_ij` as a polynomial.
    pub fn omega(&self, i: usize, j: usize) -> Polynomial {
        let n = self.nvars();
        match self {
            PoissonStructure::Canonical2D => {
                let v = match (i, j) {
                    (0, 1) => 1.0,
                    (1, 0) => -1.0,
                    _ => 0.0,
                };
                Polynomial::constant(n, C64::new(v, 0.0))
            }
            PoissonStructure::KirillovKostant(sc) => {
                Polynomial::from_terms(n, (0..n).map(|k| (unit(n, k), sc.get(i, j, k)))).expect("valid exponents")
            }
            PoissonStructure::SphereQuotient => Polynomial::from_terms(
                n,
                (0..n).map(|k| (unit(n, k), C64::new(levi_civita(i, j, k), 0.0))),
            )
            .expect("valid exponents"),
        }
    }

    /// The factor multiplying `hbar` in the leading commutator term.
    ///
    /// Real brackets correspond to `[q f, q g] ~ i hbar q({f, g})`. Lie brackets
    /// already carry any `i` inside the structure constants, so
    /// `[q f, q g] ~ hbar q({f, g})`.
    pub fn commutator_factor(&self) -> C64 {
        match self {
            PoissonStructure::KirillovKostant(_) => C64::new(1.0, 0.0),
            _ => C64::new(0.0, 1.0),
        }
    }
}

fn unit(n: usize, k: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[k] = 1;
    e
}

/// `{f, g} = sum_ij d_i f omega_ij d_j g`.
///
/// On the sphere quotient the result is returned in normal form.
pub fn poisson_bracket(f: &Polynomial, g: &Polynomial, s: &PoissonStructure) -> Result<Polynomial> {
    let n = s.nvars();
    ensure_dim(n, f.nvars())?;
    ensure_dim(n, g.nvars())?;
    let df: Vec<Polynomial> = (0..n).map(|i| f.derivative(i)).collect();
    let dg: Vec<Polynomial> = (0..n).map(|j| g.derivative(j)).collect();
    let mut out = Polynomial::zero(n);
    for i in 0..n {
        if df[i].is_zero() {
            continue;
        }
        for j in 0..n {
            if i == j || dg[j].is_zero() {
                continue;
            }
            let w = s.omega(i, j);
            if w.is_zero() {
                continue;
            }
            out = &out + &(&(&df[i] * &w) * &dg[j]);
        }
    }
    match s {
        PoissonStructure::SphereQuotient => sphere_normal_form(&out),
        _ => Ok(out),
    }
}

/// `{{f,g},h} + {{g,h},f} + {{h,f},g}`; zero for a genuine Poisson structure.
pub fn jacobi_defect(s: &PoissonStructure, f: &Polynomial, g: &Polynomial, h: &Polynomial) -> Result<Polynomial> {
    let fg = poisson_bracket(f, g, s)?;
    let gh = poisson_bracket(g, h, s)?;
    let hf = poisson_bracket(h, f, s)?;
    let a = poisson_bracket(&fg, h, s)?;
    let b = poisson_bracket(&gh, f, s)?;
    let c = poisson_bracket(&hf, g, s)?;
    Ok(&(&a + &b) + &c)
}

/// `{y_l, y_m} = -pi (l1 m2 - l2 m1) y_{l+m}`, extended bilinearly.
pub fn torus_bracket(f: &TorusFunction, g: &TorusFunction) -> TorusFunction {
    let pi = core::f64::consts::PI;
    TorusFunction::from_terms(f.terms().flat_map(|(l, cl)| {
        g.terms().map(move |(m, cm)| {
            let cross = l.0 as f64 * m.1 as f64 - l.1 as f64 * m.0 as f64;
            ((l.0 + m.0, l.1 + m.1), cl * cm * (-pi * cross))
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn kk_su2_real_bracket_of_coordinates() {
        let s = PoissonStructure::KirillovKostant(StructureConstants::su2_real());
        let b = poisson_bracket(&Polynomial::var(3, 0), &Polynomial::var(3, 1), &s).unwrap();
        assert_eq!(b, Polynomial::var(3, 2));
    }

    #[test]
    fn kk_su2_complex_convention_carries_i() {
        let s = PoissonStructure::KirillovKostant(StructureConstants::su2());
        let b = poisson_bracket(&Polynomial::var(3, 1), &Polynomial::var(3, 2), &s).unwrap();
        assert_eq!(b, Polynomial::var(3, 0).scale(C64::new(0.0, 1.0)));
    }

    #[test]
    fn canonical_bracket_of_x_squared_and_y() {
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let b = poisson_bracket(&x.pow(2), &y, &PoissonStructure::Canonical2D).unwrap();
        assert_eq!(b, x.scale(r(2.0)));
    }

    #[test]
    fn bracket_with_self_vanishes() {
        let f = Polynomial::from_terms(3, [(vec![2, 1, 0], r(1.5)), (vec![0, 0, 3], C64::new(0.0, 2.0))]).unwrap();
        for s in [
            PoissonStructure::KirillovKostant(StructureConstants::su2()),
            PoissonStructure::SphereQuotient,
        ] {
            assert!(poisson_bracket(&f, &f, &s).unwrap().is_zero());
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let s = PoissonStructure::Canonical2D;
        let e = poisson_bracket(&Polynomial::var(3, 0), &Polynomial::var(2, 0), &s).unwrap_err();
        assert_eq!(e, Error::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn jacobi_of_coordinates_and_constants() {
        let s = PoissonStructure::KirillovKostant(StructureConstants::su2());
        let x: Vec<Polynomial> = (0..3).map(|i| Polynomial::var(3, i)).collect();
        assert!(jacobi_defect(&s, &x[0], &x[1], &x[2]).unwrap().is_zero());
        let one = Polynomial::one(3);
        assert!(jacobi_defect(&s, &one, &one, &one).unwrap().is_zero());
    }

    #[test]
    fn rejects_non_lie_constants() {
        // antisymmetric but violates Jacobi: [e0,e1] = e0, [e1,e2] = e1, [e0,e2] = e2 ... pick a known failure
        let bad = StructureConstants::from_fn(3, |i, j, k| {
            let v = match (i, j, k) {
                (0, 1, 2) => 1.0,
                (1, 0, 2) => -1.0,
                (0, 2, 0) => 1.0,
                (2, 0, 0) => -1.0,
                (1, 2, 1) => 1.0,
                (2, 1, 1) => -1.0,
                _ => 0.0,
            };
            r(v)
        });
        assert!(matches!(bad, Err(Error::InvalidStructure { .. })));
        let nonanti = StructureConstants::from_fn(2, |i, _, _| r(i as f64));
        assert!(matches!(nonanti, Err(Error::InvalidStructure { .. })));
    }

    #[test]
    fn torus_bracket_values() {
        let pi = core::f64::consts::PI;
        let b = torus_bracket(&TorusFunction::mode(1, 0, r(1.0)), &TorusFunction::mode(0, 1, r(1.0)));
        assert!((b.coeff(1, 1) - r(-pi)).norm() < 1e-15);
        assert!(torus_bracket(&TorusFunction::mode(1, 0, r(1.0)), &TorusFunction::mode(1, 0, r(1.0))).is_zero());
        let b = torus_bracket(&TorusFunction::mode(2, 1, r(1.0)), &TorusFunction::mode(1, 3, r(1.0)));
        assert!((b.coeff(3, 4) - r(-5.0 * pi)).norm() < 1e-14);
    }
}
