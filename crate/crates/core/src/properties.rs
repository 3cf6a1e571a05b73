//! Randomized algebraic laws that hold for every input, not just the examples.

use alloc::vec::Vec;

use proptest::prelude::*;

use crate::linalg::Matrix;
use crate::model::{eom_residual, ModelConfig};
use crate::moyal::{moyal_product, MoyalSpec};
use crate::poisson::{poisson_bracket, PoissonStructure, StructureConstants};
use crate::poly::Polynomial;
use crate::quantize::{QuantizationMap, Quantizer};
use crate::sphere::{harmonic_decompose, normal_form_monomials, sphere_normal_form};
use crate::C64;

fn poly(nvars: usize, max_deg: u32) -> impl Strategy<Value = Polynomial> {
    let term = (proptest::collection::vec(0..=max_deg, nvars), -1.0..1.0f64, -1.0..1.0f64);
    proptest::collection::vec(term, 0..6).prop_map(move |ts| {
        let ts = ts
            .into_iter()
            .map(|(mut e, re, im)| {
                // keep the total degree within bounds
                while e.iter().sum::<u32>() > max_deg {
                    let i = e.iter().position(|&x| x > 0).unwrap();
                    e[i] -= 1;
                }
                (e, C64::new(re, im))
            })
            .collect::<Vec<_>>();
        Polynomial::from_terms(nvars, ts).unwrap()
    })
}

fn structures() -> impl Strategy<Value = PoissonStructure> {
    prop_oneof![
        Just(PoissonStructure::Canonical2D),
        Just(PoissonStructure::KirillovKostant(StructureConstants::su2())),
        Just(PoissonStructure::SphereQuotient),
    ]
}

fn close(a: &Polynomial, b: &Polynomial, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm() + b.norm())
}

/// Three polynomials in the variable count of a random structure.
fn bracket_case() -> impl Strategy<Value = (PoissonStructure, Polynomial, Polynomial, Polynomial)> {
    structures().prop_flat_map(|s| {
        let n = s.nvars();
        (Just(s), poly(n, 3), poly(n, 3), poly(n, 3))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bracket_is_antisymmetric((s, f, g, _) in bracket_case()) {
        let fg = poisson_bracket(&f, &g, &s).unwrap();
        let gf = poisson_bracket(&g, &f, &s).unwrap();
        prop_assert!(close(&fg, &-&gf, 1e-12));
    }

    #[test]
    fn bracket_is_bilinear((s, f, g, h) in bracket_case(), a in -2.0..2.0f64) {
        let a = C64::new(a, 0.5);
        let lhs = poisson_bracket(&(&f.scale(a) + &g), &h, &s).unwrap();
        let rhs = &poisson_bracket(&f, &h, &s).unwrap().scale(a) + &poisson_bracket(&g, &h, &s).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn bracket_obeys_leibniz((s, f, g, h) in bracket_case()) {
        // the quotient bracket is only defined up to the sphere relation
        prop_assume!(!matches!(s, PoissonStructure::SphereQuotient));
        let lhs = poisson_bracket(&f, &(&g * &h), &s).unwrap();
        let rhs = &(&poisson_bracket(&f, &g, &s).unwrap() * &h) + &(&g * &poisson_bracket(&f, &h, &s).unwrap());
        prop_assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn normal_form_is_idempotent(p in poly(3, 4)) {
        let n = sphere_normal_form(&p).unwrap();
        prop_assert!(close(&sphere_normal_form(&n).unwrap(), &n, 1e-12));
        prop_assert!(n.terms().all(|(e, _)| e[2] <= 1));
    }

    #[test]
    fn harmonic_round_trip(p in poly(3, 4)) {
        let n = sphere_normal_form(&p).unwrap();
        let back = sphere_normal_form(&harmonic_decompose(&p).unwrap().recompose()).unwrap();
        prop_assert!(close(&back, &n, 1e-10));
    }

    #[test]
    fn moyal_laws(f in poly(2, 3), g in poly(2, 3), h in poly(2, 3), p in -2.0..2.0f64) {
        let spec = MoyalSpec::star_p(p);
        let fg = moyal_product(&f, &g, &spec).unwrap();
        let left = moyal_product(&fg, &h, &spec).unwrap();
        let right = moyal_product(&f, &moyal_product(&g, &h, &spec).unwrap(), &spec).unwrap();
        prop_assert!(close(&left, &right, 1e-11));
        let bound = f.degree().unwrap_or(0) + g.degree().unwrap_or(0);
        prop_assert!(fg.degree().unwrap_or(0) <= bound);
        let classical = moyal_product(&f, &g, &spec.classical()).unwrap();
        prop_assert!(close(&classical, &(&f * &g), 1e-14));
    }

    #[test]
    fn quantization_is_linear(f in poly(3, 3), g in poly(3, 3), a in -2.0..2.0f64, k in 2usize..6) {
        let q = QuantizationMap::sphere(k).unwrap();
        let a = C64::new(a, -0.3);
        let lhs = q.quantize(&(&f.scale(a) + &g)).unwrap();
        let rhs = &q.quantize(&f).unwrap().scale(a) + &q.quantize(&g).unwrap();
        prop_assert!((&lhs - &rhs).frobenius_norm() <= 1e-10 * (1.0 + rhs.frobenius_norm()));
    }

    #[test]
    fn eom_is_gauge_invariant(
        entries in proptest::collection::vec(-1.0..1.0f64, 54),
        phases in proptest::collection::vec(0.0..6.3f64, 3),
        shift in 0usize..3,
    ) {
        let cfg = ModelConfig::su2(3).unwrap();
        let x: Vec<Matrix> = entries
            .chunks(18)
            .map(|c| Matrix::from_fn(3, |i, j| C64::new(c[2 * (3 * i + j)], c[2 * (3 * i + j) + 1])))
            .collect();
        // a unitary: cyclic permutation times diagonal phases
        let u = Matrix::from_fn(3, |i, j| {
            if (i + shift) % 3 == j { C64::from_polar(1.0, phases[i]) } else { C64::new(0.0, 0.0) }
        });
        let ud = u.adjoint();
        let y: Vec<Matrix> = x.iter().map(|m| &(&u * m) * &ud).collect();
        let a = eom_residual(&x, &cfg).unwrap();
        let b = eom_residual(&y, &cfg).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a));
    }
}

#[test]
fn normal_form_dimension() {
    for n in 0..6u32 {
        assert_eq!(normal_form_monomials(n).len(), ((n + 1) * (n + 1)) as usize);
    }
}
