//! Concrete matrix generators: su(2) irreps, clock and shift matrices, and
//! user-supplied representation sets.

use alloc::vec::Vec;

// float methods for no_std builds; shadowed by inherent methods when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poisson::StructureConstants;
use crate::C64;

/// The `k`-dimensional irrep `(J1, J2, J3)` of su(2), `[J^a, J^b] = i eps_abc J^c`.
///
/// Highest-weight construction: `J3 = diag(j, j-1, .., -j)` with `j = (k-1)/2`
/// and ladder entries `sqrt(j(j+1) - m(m+1))`.
pub fn su2_irrep(k: usize) -> Result<[Matrix; 3]> {
    if k < 2 {
        return Err(Error::InvalidInput("su(2) irrep dimension must be at least 2"));
    }
    let j = (k as f64 - 1.0) / 2.0;
    let m = |i: usize| j - i as f64;
    let mut raise = Matrix::zeros(k);
    for i in 1..k {
        let mi = m(i);
        raise[(i - 1, i)] = C64::new((j * (j + 1.0) - mi * (mi + 1.0)).sqrt(), 0.0);
    }
    let lower = raise.adjoint();
    let j1 = (&raise + &lower).scale_real(0.5);
    let j2 = (&raise - &lower).scale(C64::new(0.0, -0.5));
    let j3 = Matrix::diagonal(&(0..k).map(|i| C64::new(m(i), 0.0)).collect::<Vec<_>>());
    Ok([j1, j2, j3])
}

/// `hbar_k = 2 / sqrt(k^2 - 1)`, the value making `sum_a (hbar J^a)^2 = Id`.
pub fn hbar_for_k(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidInput("hbar_k needs k >= 2"));
    }
    let k = k as f64;
    Ok(2.0 / (k * k - 1.0).sqrt())
}

/// Clock `U = diag(q^0, .., q^{k-1})`, cyclic shift `V` and `q = exp(2 pi i / k)`,
/// with `V U = q U V`.
pub fn clock_shift(k: usize) -> Result<(Matrix, Matrix, C64)> {
    if k < 1 {
        return Err(Error::InvalidInput("clock and shift need k >= 1"));
    }
    let q = root_of_unity(k, 1);
    let u = Matrix::diagonal(&(0..k).map(|i| root_of_unity(k, i)).collect::<Vec<_>>());
    let v = Matrix::from_fn(k, |r, c| if c == (r + 1) % k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    Ok((u, v, q))
}

/// `exp(2 pi i n / k)`, reduced mod `k` before the trig call.
pub fn root_of_unity(k: usize, n: usize) -> C64 {
    let angle = 2.0 * core::f64::consts::PI * (n % k) as f64 / k as f64;
    C64::new(angle.cos(), angle.sin())
}

/// `Y_{l1,l2} = U^{l1} V^{l2}`.
pub fn torus_generator(k: usize, l1: u32, l2: u32) -> Result<Matrix> {
    let (u, v, _) = clock_shift(k)?;
    u.pow(l1).matmul(&v.pow(l2))
}

/// Generators `e_i` of a Lie-algebra representation with `[e_i, e_j] = hbar f_ij^k e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct RepSet {
    pub generators: Vec<Matrix>,
    pub hbar: C64,
    pub structure: StructureConstants,
}

impl RepSet {
    /// `e_a = hbar_k J^a` with `f = i eps`.
    pub fn su2(k: usize) -> Result<Self> {
        let hbar = hbar_for_k(k)?;
        let generators = su2_irrep(k)?.iter().map(|j| j.scale_real(hbar)).collect();
        Ok(Self {
            generators,
            hbar: C64::new(hbar, 0.0),
            structure: StructureConstants::su2(),
        })
    }

    /// Common matrix dimension, checking that there is one.
    pub fn dim(&self) -> Result<usize> {
        if self.generators.len() != self.structure.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.structure.dim(),
                found: self.generators.len(),
            });
        }
        let n = self.generators.first().map_or(0, Matrix::dim);
        for g in &self.generators {
            crate::error::ensure_dim(n, g.dim())?;
        }
        Ok(n)
    }
}

/// `max_{i,j} ||[e_i, e_j] - hbar f_ij^k e_k||_F`.
pub fn validate_repset(r: &RepSet) -> Result<f64> {
    r.dim()?;
    let d = r.generators.len();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in (i + 1)..d {
            let mut dev = r.generators[i].commutator(&r.generators[j]);
            for k in 0..d {
                let c = r.hbar * r.structure.get(i, j, k);
                if c.norm() != 0.0 {
                    dev.axpy(-c, &r.generators[k]);
                }
            }
            worst = worst.max(dev.frobenius_norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::levi_civita;

    fn i() -> C64 {
        C64::new(0.0, 1.0)
    }

    #[test]
    fn spin_half_is_pauli_halves() {
        let [j1, j2, j3] = su2_irrep(2).unwrap();
        let h = C64::new(0.5, 0.0);
        let z = C64::new(0.0, 0.0);
        assert_eq!(j1, Matrix::from_row_major(2, alloc::vec![z, h, h, z]).unwrap());
        assert_eq!(j2, Matrix::from_row_major(2, alloc::vec![z, -i() * 0.5, i() * 0.5, z]).unwrap());
        assert_eq!(j3, Matrix::diagonal(&[h, -h]));
    }

    #[test]
    fn commutators_and_casimir() {
        for k in 2..=12 {
            let j = su2_irrep(k).unwrap();
            for a in 0..3 {
                for b in 0..3 {
                    let mut dev = j[a].commutator(&j[b]);
                    for c in 0..3 {
                        dev.axpy(-i() * levi_civita(a, b, c), &j[c]);
                    }
                    assert!(dev.frobenius_norm() < 1e-12, "k={k}");
                }
            }
            let cas = &(&(&j[0] * &j[0]) + &(&j[1] * &j[1])) + &(&j[2] * &j[2]);
            let target = Matrix::identity(k).scale_real((k * k - 1) as f64 / 4.0);
            assert!((&cas - &target).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn hbar_values() {
        assert!((hbar_for_k(2).unwrap().powi(2) - 4.0 / 3.0).abs() < 1e-15);
        assert!((hbar_for_k(3).unwrap() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!(hbar_for_k(1).is_err());
        assert!(su2_irrep(1).is_err());
    }

    #[test]
    fn clock_shift_relations() {
        let (u, v, q) = clock_shift(1).unwrap();
        assert_eq!(u, Matrix::identity(1));
        assert_eq!(v, Matrix::identity(1));
        assert_eq!(q, C64::new(1.0, 0.0));
        let (u, v, q) = clock_shift(4).unwrap();
        assert!((&(&v * &u) - &(&u * &v).scale(q)).frobenius_norm() < 1e-14);
        let (u, v, _) = clock_shift(3).unwrap();
        assert!((&u.pow(3) - &Matrix::identity(3)).frobenius_norm() < 1e-12);
        assert!((&v.pow(3) - &Matrix::identity(3)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn torus_commutator_prefactor() {
        let k = 5;
        let q = root_of_unity(k, 1);
        let y10 = torus_generator(k, 1, 0).unwrap();
        let y01 = torus_generator(k, 0, 1).unwrap();
        let y11 = torus_generator(k, 1, 1).unwrap();
        let lhs = y10.commutator(&y01);
        let rhs = y11.scale(C64::new(1.0, 0.0) - q);
        assert!((&lhs - &rhs).frobenius_norm() < 1e-13);
        assert_eq!(torus_generator(k, 0, 0).unwrap(), Matrix::identity(k));
    }

    #[test]
    fn repset_validation() {
        let r = RepSet::su2(4).unwrap();
        assert!(validate_repset(&r).unwrap() < 1e-12);
        let mut wrong = r.clone();
        wrong.hbar *= 1.1;
        assert!(validate_repset(&wrong).unwrap() > 1e-3);
        let zero = RepSet {
            generators: alloc::vec![Matrix::zeros(3); 3],
            hbar: C64::new(0.0, 0.0),
            structure: StructureConstants::su2(),
        };
        assert_eq!(validate_repset(&zero).unwrap(), 0.0);
        let mut ragged = r;
        ragged.generators[1] = Matrix::zeros(2);
        assert!(validate_repset(&ragged).is_err());
    }
}
