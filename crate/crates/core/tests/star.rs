use heis_core::quantize::{weyl_quantize, HermiteBasisSpec};
use heis_core::star::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() }
}

fn antisymmetric(n: usize, upper: &[f64]) -> AntisymmetricForm {
    let mut m = DMatrix::zeros(n, n);
    let mut it = upper.iter();
    for j in 0..n {
        for k in j + 1..n {
            let v = *it.next().unwrap();
            m[(j, k)] = v;
            m[(k, j)] = -v;
        }
    }
    AntisymmetricForm::new(m).unwrap()
}

/// Random polynomial in `n` variables of degree at most `deg` with a few terms.
fn poly_strategy(n: usize, deg: u32) -> impl Strategy<Value = PolySymbol> {
    prop::collection::vec((prop::collection::vec(0..=deg, n), -2.0..2.0f64, -1.0..1.0f64), 1..5).prop_map(move |terms| {
        let mut p = PolySymbol::zero(n);
        for (mut e, re, im) in terms {
            while e.iter().sum::<u32>() > deg {
                let j = e.iter().position(|&v| v > 0).unwrap();
                e[j] -= 1;
            }
            p.add_term(MultiIndex::new(e), Complex64::new(re, im));
        }
        p
    })
}

fn case_strategy(deg: u32) -> impl Strategy<Value = (usize, AntisymmetricForm, PolySymbol, PolySymbol, PolySymbol)> {
    (1usize..=4).prop_flat_map(move |n| {
        (
            Just(n),
            prop::collection::vec(-2.0..2.0f64, n * (n - 1) / 2),
            poly_strategy(n, deg),
            poly_strategy(n, deg),
            poly_strategy(n, deg),
        )
            .prop_map(|(n, upper, f, g, h)| (n, antisymmetric(n, &upper), f, g, h))
    })
}

#[test]
fn coordinate_product_matches_operator_product() {
    // Q(xi_1) Q(xi_2) = Q(xi_1 # xi_2) in the Hermite basis
    let spec = HermiteBasisSpec::new(1, 20, 9.0, 64).unwrap();
    let j = AntisymmetricForm::standard(1);
    let (x1, x2) = (PolySymbol::coordinate(2, 0), PolySymbol::coordinate(2, 1));
    let prod = moyal_product(&x1, &x2, &j).unwrap();
    let expected = &x1.pointwise_mul(&x2).unwrap() + &PolySymbol::constant(2, Complex64::new(0.0, 0.5));
    assert!(prod.relative_distance(&expected) == 0.0);
    let lhs = weyl_quantize(&x1, &spec).unwrap().compose(&weyl_quantize(&x2, &spec).unwrap()).unwrap();
    let rhs = weyl_quantize(&prod, &spec).unwrap();
    assert!(lhs.block_distance(&rhs.entries, spec.trusted_block()).error < 1e-13);
}

#[test]
fn three_random_covectors_symmetrize_to_the_monomial() {
    let forms = vec![vec![0.3, -1.2, 0.5, 2.0], vec![1.1, 0.4, -0.7, 0.2], vec![-0.6, 0.9, 1.3, -1.5]];
    let a = antisymmetric(4, &[0.7, -1.1, 0.4, 1.9, -0.3, 0.8]);
    let sym = symmetrized_product(&forms, &a).unwrap();
    let mono = forms.iter().fold(PolySymbol::one(4), |acc, f| acc.pointwise_mul(&PolySymbol::linear(f)).unwrap());
    assert!(sym.relative_distance(&mono) < 1e-12);
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn moyal_product_is_associative((_, a, f, g, h) in case_strategy(4)) {
        let left = moyal_product(&moyal_product(&f, &g, &a).unwrap(), &h, &a).unwrap();
        let right = moyal_product(&f, &moyal_product(&g, &h, &a).unwrap(), &a).unwrap();
        prop_assert!(left.relative_distance(&right) < 1e-10);
    }

    #[test]
    fn zero_form_gives_pointwise_product((n, _, f, g, _) in case_strategy(4)) {
        let prod = moyal_product(&f, &g, &AntisymmetricForm::zero(n)).unwrap();
        prop_assert_eq!(prod, f.pointwise_mul(&g).unwrap());
    }

    #[test]
    fn degree_is_subadditive((_, a, f, g, _) in case_strategy(4)) {
        let prod = moyal_product(&f, &g, &a).unwrap();
        prop_assert!(prod.degree().unwrap_or(0) <= f.degree().unwrap_or(0) + g.degree().unwrap_or(0));
    }

    #[test]
    fn left_xi_is_the_coordinate_product((n, a, f, _, _) in case_strategy(4), axis in 0usize..4) {
        let axis = axis % n;
        let lhs = left_xi(axis, &f, &a).unwrap();
        let rhs = moyal_product(&PolySymbol::coordinate(n, axis), &f, &a).unwrap();
        prop_assert!(lhs.relative_distance(&rhs) < 1e-14);
    }

    #[test]
    fn sharp_power_is_a_product_of_linear_factors(
        (n, a, _, _, _) in case_strategy(0),
        raw in prop::collection::vec(0u32..=3, 4),
    ) {
        let mut e: Vec<u32> = raw[..n].to_vec();
        while e.iter().sum::<u32>() > 6 {
            let j = e.iter().position(|&v| v > 0).unwrap();
            e[j] -= 1;
        }
        let alpha = MultiIndex::new(e.clone());
        let mut expected = PolySymbol::one(n);
        for j in (0..n).rev() {
            for _ in 0..e[j] {
                expected = moyal_product(&PolySymbol::coordinate(n, j), &expected, &a).unwrap();
            }
        }
        let got = sharp_power(&alpha, &a).unwrap();
        prop_assert!(got.relative_distance(&expected) < 1e-12);
        // leading term is the plain monomial
        prop_assert_eq!(got.coefficient(&alpha), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn symmetrized_product_is_the_monomial(
        (n, a, _, _, _) in case_strategy(0),
        count in 0usize..5,
        coeffs in prop::collection::vec(-2.0..2.0f64, 16),
    ) {
        let forms: Vec<Vec<f64>> = (0..count).map(|i| coeffs[i * 4..i * 4 + n].to_vec()).collect();
        let sym = symmetrized_product(&forms, &a).unwrap();
        let mono = forms.iter().fold(PolySymbol::one(n), |acc, f| acc.pointwise_mul(&PolySymbol::linear(f)).unwrap());
        prop_assert!(sym.relative_distance(&mono) < 1e-12);
    }
}

fn metric_strategy(n: usize) -> impl Strategy<Value = MetricForm> {
    prop::collection::vec(-1.0..1.0f64, n * n).prop_map(move |v| {
        let m = DMatrix::from_row_slice(n, n, &v);
        MetricForm::new(&m * m.transpose() + DMatrix::identity(n, n) * 0.5).unwrap()
    })
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn williamson_frames_satisfy_both_invariants(
        d in 1usize..=3,
        seed in prop::collection::vec(-1.0..1.0f64, 36),
        upper in prop::collection::vec(-2.0..2.0f64, 15),
    ) {
        let n = 2 * d;
        let m = DMatrix::from_row_slice(n, n, &seed[..n * n]);
        let g = MetricForm::new(&m * m.transpose() + DMatrix::identity(n, n) * 0.5).unwrap();
        let mut w = antisymmetric(n, &upper[..n * (n - 1) / 2]);
        if williamson_eigenvalues(&g, &w).is_err() {
            w = AntisymmetricForm::standard(d);
        }
        let frame = symplectic_frame(&g, &w).unwrap();
        let (dw, dg) = frame.defects(&g, &w);
        prop_assert!(dw < 1e-8 && dg < 1e-8, "{dw:e} {dg:e}");
        // 1/2 xi^T G^{-1} xi = sum_j B_j (s_j^2 + varsigma_j^2)/2
        let ginv = g.matrix().clone().try_inverse().unwrap();
        let b = frame.frequencies().to_vec();
        for k in 0..3 {
            let xi: Vec<f64> = (0..n).map(|i| seed[(i + 7 * k) % 36]).collect();
            let v = nalgebra::DVector::from_column_slice(&xi);
            let lhs = 0.5 * (v.transpose() * &ginv * &v)[(0, 0)];
            let y = frame.coordinates(&xi);
            let rhs: f64 = (0..d).map(|j| b[j] * (y[j] * y[j] + y[d + j] * y[d + j]) / 2.0).sum();
            prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn williamson_homogeneity(g in metric_strategy(2), t in 0.1..5.0f64, v in 0.2..3.0f64) {
        let w = AntisymmetricForm::elementary(2, 0, 1, v);
        let b = williamson_eigenvalues(&g, &w).unwrap();
        let bt = williamson_eigenvalues(&g, &w.scaled(t)).unwrap();
        prop_assert!((bt[0] - t * b[0]).abs() < 1e-10 * (1.0 + bt[0]));
    }

    #[test]
    fn radial_pullbacks_are_frame_independent(
        g in metric_strategy(4),
        upper in prop::collection::vec(-2.0..2.0f64, 6),
        angles in prop::collection::vec(-3.0..3.0f64, 2),
    ) {
        let w = antisymmetric(4, &upper);
        prop_assume!(williamson_eigenvalues(&g, &w).is_ok());
        let frame = symplectic_frame(&g, &w).unwrap();
        let other = frame.rotated(&angles);
        let b = frame.frequencies().to_vec();
        let grid = GridSpec::new(4, 2.0, 6).unwrap();
        let f = |y: &[f64]| {
            let q: f64 = (0..2).map(|j| b[j] * (y[j] * y[j] + y[2 + j] * y[2 + j]) / 2.0).sum();
            Complex64::new((-q).exp() * (1.0 + q), 0.0)
        };
        let sym = |fr: &SymplecticFrame| GridSymbol::from_fn(grid, |xi| f(&fr.coordinates(xi)));
        prop_assert!(sym(&frame).sup_distance_within(&sym(&other), 10.0).unwrap() < 1e-8);
    }
}
