use std::f64::consts::PI;

use heis_core::quantize::hermite::{cross_wigner, hermite_functions};
use heis_core::quantize::*;
use heis_core::star::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn gaussian(x: &[f64], width: f64) -> f64 {
    (-x.iter().map(|v| v * v).sum::<f64>() / (2.0 * width * width)).exp()
}

/// `(2 pi)^{-1} int e^{i v t} h_m(s + t/2) h_n(s - t/2) dt` by the trapezoid rule.
fn wigner_by_quadrature(m: usize, n: usize, s: f64, v: f64) -> Complex64 {
    let levels = m.max(n) + 1;
    let (mut a, mut b) = (vec![0.0; levels], vec![0.0; levels]);
    let step = 1e-3;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut t = -40.0;
    while t <= 40.0 {
        hermite_functions(levels, s + t / 2.0, &mut a);
        hermite_functions(levels, s - t / 2.0, &mut b);
        acc += Complex64::from_polar(1.0, v * t) * (a[m] * b[n]);
        t += step;
    }
    acc * step / (2.0 * PI)
}

#[test]
fn cross_wigner_matches_defining_integral() {
    let levels = 6;
    let mut scratch = vec![0.0; levels];
    let mut w = vec![Complex64::new(0.0, 0.0); levels * levels];
    for &(s, v) in &[(0.3, -0.7), (-1.1, 0.4), (0.0, 0.0), (1.5, 1.2)] {
        cross_wigner(levels, s, v, &mut scratch, &mut w);
        for (m, n) in [(0, 0), (1, 0), (0, 1), (3, 1), (2, 5), (5, 5)] {
            let oracle = wigner_by_quadrature(m, n, s, v);
            let got = w[m * levels + n];
            assert!((got - oracle).norm() < 1e-9, "W_{m}{n}({s},{v}): {got} vs {oracle}");
        }
    }
}

#[test]
fn constant_one_quantizes_to_identity() {
    let spec = HermiteBasisSpec::new(1, 20, 9.0, 64).unwrap();
    let q = weyl_quantize(&PolySymbol::one(2), &spec).unwrap();
    assert_eq!(q.entries, DMatrix::identity(20, 20));
    let spec2 = HermiteBasisSpec::new(2, 5, 6.5, 16).unwrap();
    let q2 = weyl_quantize(&PolySymbol::one(4), &spec2).unwrap();
    assert_eq!(q2.entries, DMatrix::identity(25, 25));
}

#[test]
fn oscillator_quantizes_to_half_integers() {
    let spec = HermiteBasisSpec::new(1, 40, 11.0, 256).unwrap();
    let q = weyl_quantize(&PolySymbol::harmonic_oscillator(1), &spec).unwrap();
    let target = DMatrix::from_fn(40, 40, |i, j| if i == j { c(i as f64 + 0.5) } else { c(0.0) });
    let cmp = q.block_distance(&target, spec.trusted_block());
    assert_eq!(cmp.block, 30);
    assert!(cmp.error < 1e-8);
    let spec2 = HermiteBasisSpec::new(2, 6, 7.0, 16).unwrap();
    let q2 = weyl_quantize(&PolySymbol::harmonic_oscillator(2), &spec2).unwrap();
    for i in 0..36 {
        let (m1, m2) = (i / 6, i % 6);
        assert!((q2.entries[(i, i)] - c((m1 + m2) as f64 + 1.0)).norm() < 1e-12);
    }
}

#[test]
fn position_is_tridiagonal() {
    let spec = HermiteBasisSpec::new(1, 16, 8.5, 64).unwrap();
    let q = weyl_quantize(&PolySymbol::coordinate(2, 0), &spec).unwrap();
    for i in 0..16 {
        for j in 0..16 {
            let expected = if j == i + 1 {
                ((i as f64 + 1.0) / 2.0).sqrt()
            } else if i == j + 1 {
                ((j as f64 + 1.0) / 2.0).sqrt()
            } else {
                0.0
            };
            assert!((q.entries[(i, j)] - c(expected)).norm() < 1e-14);
        }
    }
}

#[test]
fn grid_and_polynomial_paths_agree_on_windowed_symbols() {
    let spec = HermiteBasisSpec::new(1, 40, 11.0, 256).unwrap();
    // e^{-|xi|^2 / (2 w^2)} = e^{-H / w^2} is diagonal with entries 2w^2/(2w^2+1) * ((2w^2-1)/(2w^2+1))^m (Mehler).
    let w: f64 = 1.3;
    let a = GridSymbol::from_fn(spec.grid(), |x| c(gaussian(x, w)));
    let q = weyl_quantize(&a, &spec).unwrap();
    let ratio = (2.0 * w * w - 1.0) / (2.0 * w * w + 1.0);
    let target = DMatrix::from_fn(40, 40, |i, j| if i == j { c(2.0 * w * w / (2.0 * w * w + 1.0) * ratio.powi(i as i32)) } else { c(0.0) });
    assert!(q.block_distance(&target, 40).error < 1e-10);
}

#[test]
fn trace_rule() {
    let spec = HermiteBasisSpec::new(1, 40, 11.0, 256).unwrap();
    let a = GridSymbol::from_fn(spec.grid(), |x| c((1.0 + 0.5 * x[0] + 0.2 * x[1] * x[1]) * gaussian(x, 1.4)));
    let q = weyl_quantize(&a, &spec).unwrap();
    let integral = a.integral() / (2.0 * PI);
    let rel = ((q.trace() - integral) / integral).norm();
    assert!(rel < 1e-4, "{rel:e}");
}

#[test]
fn round_trip_on_windowed_symbols() {
    let spec = HermiteBasisSpec::new(1, 40, 11.0, 256).unwrap();
    let a = GridSymbol::from_fn(spec.grid(), |x| {
        Complex64::new(1.0 + x[0] - 0.3 * x[1] * x[1], 0.2 * x[0] * x[1]) * gaussian(x, 1.0)
    });
    let back = wigner_symbol(&weyl_quantize(&a, &spec).unwrap(), &spec).unwrap();
    let err = back.sup_distance_within(&a, spec.halfwidth / 2.0).unwrap();
    assert!(err < 1e-5, "{err:e}");
}

#[test]
fn identity_dequantizes_to_one() {
    let spec = HermiteBasisSpec::new(1, 128, 18.0, 384).unwrap();
    let one = wigner_symbol(&OperatorMatrix::identity(1, 128), &spec).unwrap();
    let err = one.sup_distance_within(&GridSymbol::constant(spec.grid(), c(1.0)), 9.0).unwrap();
    assert!(err < 1e-6, "{err:e}");
}

#[test]
fn oscillator_matrix_dequantizes_to_oscillator() {
    let spec = HermiteBasisSpec::new(1, 128, 18.0, 256).unwrap();
    let diag: Vec<Complex64> = (0..128).map(|m| c(m as f64 + 0.5)).collect();
    let h = wigner_symbol(&OperatorMatrix::from_diagonal(1, 128, &diag).unwrap(), &spec).unwrap();
    let exact = GridSymbol::from_fn(spec.grid(), |x| c((x[0] * x[0] + x[1] * x[1]) / 2.0));
    let err = h.sup_distance_within(&exact, 9.0).unwrap();
    assert!(err < 1e-6, "{err:e}");
}

#[test]
fn ground_state_projector_symbol() {
    let spec = HermiteBasisSpec::new(1, 20, 9.0, 128).unwrap();
    let mut diag = vec![c(0.0); 20];
    diag[0] = c(1.0);
    let p = wigner_symbol(&OperatorMatrix::from_diagonal(1, 20, &diag).unwrap(), &spec).unwrap();
    let exact = GridSymbol::from_fn(spec.grid(), |x| c(2.0 * gaussian(x, 1.0 / 2f64.sqrt())));
    assert!(p.sup_distance_within(&exact, 9.0).unwrap() < 1e-14);
}

#[test]
fn tensor_dequantization_of_ground_state() {
    let spec = HermiteBasisSpec::new(2, 6, 7.0, 32).unwrap();
    let mut diag = vec![c(0.0); 36];
    diag[0] = c(1.0);
    let p = wigner_symbol(&OperatorMatrix::from_diagonal(2, 6, &diag).unwrap(), &spec).unwrap();
    let exact = GridSymbol::from_fn(spec.grid(), |x| c(4.0 * gaussian(x, 1.0 / 2f64.sqrt())));
    assert!(p.sup_distance_within(&exact, 7.0).unwrap() < 1e-13);
    let back = weyl_quantize(&p, &spec).unwrap();
    assert!((back.entries[(0, 0)] - c(1.0)).norm() < 1e-6, "{}", back.entries[(0, 0)]);
}

#[test]
fn product_of_ones_is_one() {
    let spec = HermiteBasisSpec::new(1, 128, 18.0, 256).unwrap();
    let one = GridSymbol::constant(spec.grid(), c(1.0));
    let p = weyl_product_grid(&one, &one, &spec).unwrap();
    let err = p.sup_distance_within(&one, 9.0).unwrap();
    assert!(err < 1e-6, "{err:e}");
}

fn poly_on_grid(p: &PolySymbol, spec: &HermiteBasisSpec) -> GridSymbol {
    GridSymbol::from_fn(spec.grid(), |x| p.evaluate(x))
}

#[test]
fn oscillator_square_matches_moyal_product() {
    let spec = HermiteBasisSpec::new(1, 128, 18.0, 256).unwrap();
    let h = PolySymbol::harmonic_oscillator(1);
    let exact = moyal_product(&h, &h, &AntisymmetricForm::standard(1)).unwrap();
    // H # H = H^2 - 1/4
    let shifted = &exact - &h.pointwise_mul(&h).unwrap();
    assert!((shifted.coefficient(&MultiIndex::zero(2)) - c(-0.25)).norm() < 1e-15);
    let hg = poly_on_grid(&h, &spec);
    let got = weyl_product_grid(&hg, &hg, &spec).unwrap();
    let err = got.sup_distance_within(&poly_on_grid(&exact, &spec), 4.0).unwrap();
    assert!(err < 1e-5, "{err:e}");
}

#[test]
fn equivalence_with_star_calculus_for_low_degree_pairs() {
    let spec = HermiteBasisSpec::new(1, 96, 16.0, 384).unwrap();
    let j = AntisymmetricForm::standard(1);
    let m = |e: [u32; 2], v: f64| PolySymbol::monomial(MultiIndex::new(e.to_vec()), c(v));
    let pairs = [
        (PolySymbol::coordinate(2, 0), PolySymbol::coordinate(2, 1)),
        (&m([2, 0], 1.0) + &m([0, 1], -0.5), &m([1, 1], 1.0) + &m([0, 3], 0.3)),
        (&m([4, 0], 0.1) + &m([1, 0], 1.0), &m([0, 4], 0.1) + &m([2, 2], -0.05)),
    ];
    for (f, g) in &pairs {
        let exact = moyal_product(f, g, &j).unwrap();
        let got = weyl_product_grid(&poly_on_grid(f, &spec), &poly_on_grid(g, &spec), &spec).unwrap();
        let err = got.sup_distance_within(&poly_on_grid(&exact, &spec), 3.0).unwrap();
        assert!(err < 1e-5, "{f} # {g}: {err:e}");
    }
}

#[test]
fn nonstandard_form_reduces_to_weyl_product_through_a_frame() {
    let w = AntisymmetricForm::elementary(2, 0, 1, 2.5);
    let g = MetricForm::diagonal(&[1.0, 3.0]).unwrap();
    let frame = symplectic_frame(&g, &w).unwrap();
    let s = frame.matrix().clone();
    let s_inv_t = s.transpose().try_inverse().unwrap();
    let f = &PolySymbol::coordinate(2, 0) + &PolySymbol::monomial(MultiIndex::new(vec![1, 1]), c(0.7));
    let h = &PolySymbol::monomial(MultiIndex::new(vec![0, 2]), c(1.0)) + &PolySymbol::coordinate(2, 1);
    let direct = moyal_product(&f, &h, &w).unwrap();
    let spec = HermiteBasisSpec::new(1, 64, 14.0, 128).unwrap();
    let ff = f.linear_substitution(&s_inv_t).unwrap();
    let hh = h.linear_substitution(&s_inv_t).unwrap();
    let prod = weyl_quantize(&ff, &spec).unwrap().compose(&weyl_quantize(&hh, &spec).unwrap()).unwrap();
    let sym = wigner_symbol(&prod, &spec).unwrap();
    let expected = GridSymbol::from_fn(spec.grid(), |eta| {
        let xi = &s_inv_t * nalgebra::DVector::from_column_slice(eta);
        direct.evaluate(xi.as_slice())
    });
    let err = sym.sup_distance_within(&expected, 2.5).unwrap();
    assert!(err < 1e-5, "{err:e}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn quantization_is_linear(alpha in -2.0..2.0f64, beta in -2.0..2.0f64, w1 in 0.6..1.5f64, shift in -1.0..1.0f64) {
        let spec = HermiteBasisSpec::new(1, 12, 8.0, 64).unwrap();
        let a = GridSymbol::from_fn(spec.grid(), |x| c(gaussian(x, w1)));
        let b = GridSymbol::from_fn(spec.grid(), |x| Complex64::new(x[0] + shift, x[1]) * gaussian(x, 1.0));
        let combo = a.scale(c(alpha)).add(&b.scale(c(beta))).unwrap();
        let lhs = weyl_quantize(&combo, &spec).unwrap();
        let rhs = weyl_quantize(&a, &spec).unwrap().scale(c(alpha)).add(&weyl_quantize(&b, &spec).unwrap().scale(c(beta))).unwrap();
        prop_assert!((lhs.entries - rhs.entries).norm() < 1e-10);
    }

    #[test]
    fn real_symbols_give_hermitian_matrices(p in -1.0..1.0f64, q in -1.0..1.0f64, w1 in 0.6..1.5f64) {
        let spec = HermiteBasisSpec::new(1, 12, 8.0, 64).unwrap();
        let a = GridSymbol::from_fn(spec.grid(), |x| c((1.0 + p * x[0] + q * x[0] * x[1]) * gaussian(x, w1)));
        let m = weyl_quantize(&a, &spec).unwrap();
        prop_assert!(m.hermitian);
        prop_assert!(m.hermitian_defect() < 1e-10);
    }
}
