//! The fiberwise product `#_A` on polynomial and grid symbols.
//!
//! For an antisymmetric form `A` on the fiber,
//! `(f #_A g)(xi) = [exp((i/2) A(d_xi, d_eta)) f(xi) g(eta)]_{xi = eta}`.
//! On polynomials the exponential series terminates, so the product is exact.
//! Left multiplication by a coordinate is the first-order operator
//! `xi_j #_A f = (xi_j + (i/2) sum_k A_jk d_k) f`.

use num_complex::Complex64;

use super::forms::AntisymmetricForm;
use super::grid::GridSymbol;
use super::poly::{MultiIndex, PolySymbol};
use crate::error::{Error, Result};

const HALF_I: Complex64 = Complex64 { re: 0.0, im: 0.5 };

fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// `(sum_{j,k} A_jk X_j Y_k)^order` as a polynomial in `2n` commuting variables.
fn bilinear_power(a: &AntisymmetricForm, order: u32) -> PolySymbol {
    let n = a.dim();
    let mut base = PolySymbol::zero(2 * n);
    for j in 0..n {
        for k in 0..n {
            let v = a.get(j, k);
            if v != 0.0 {
                let mut e = vec![0; 2 * n];
                e[j] += 1;
                e[n + k] += 1;
                base.add_term(MultiIndex::new(e), Complex64::new(v, 0.0));
            }
        }
    }
    let mut acc = PolySymbol::one(2 * n);
    for _ in 0..order {
        acc = &acc * &base;
    }
    acc
}

/// Exact `f #_A g` for polynomial symbols.
pub fn moyal_product(f: &PolySymbol, g: &PolySymbol, a: &AntisymmetricForm) -> Result<PolySymbol> {
    let n = a.dim();
    check_dims(n, f.dim())?;
    check_dims(n, g.dim())?;
    let (Some(df), Some(dg)) = (f.degree(), g.degree()) else {
        return Ok(PolySymbol::zero(n));
    };
    let mut out = f.pointwise_mul(g)?;
    if a.is_zero() {
        return Ok(out);
    }
    let mut prefactor = Complex64::new(1.0, 0.0);
    for order in 1..=df.min(dg) {
        prefactor *= HALF_I / order as f64;
        let kernel = bilinear_power(a, order);
        for (gamma, &c) in kernel.terms() {
            let (alpha, beta) = gamma.entries().split_at(n);
            let fa = f.derivative_multi(&MultiIndex::new(alpha.to_vec()));
            if fa.is_zero() {
                continue;
            }
            let gb = g.derivative_multi(&MultiIndex::new(beta.to_vec()));
            if gb.is_zero() {
                continue;
            }
            let term = fa.pointwise_mul(&gb)?.scale(c * prefactor);
            out = &out + &term;
        }
    }
    Ok(out)
}

/// Left multiplication by the linear symbol `xi -> c . xi`.
pub fn left_linear(covector: &[f64], f: &PolySymbol, a: &AntisymmetricForm) -> Result<PolySymbol> {
    let n = a.dim();
    check_dims(n, covector.len())?;
    check_dims(n, f.dim())?;
    let mut out = PolySymbol::linear(covector).pointwise_mul(f)?;
    for k in 0..n {
        let w: f64 = (0..n).map(|j| covector[j] * a.get(j, k)).sum();
        if w != 0.0 {
            out = &out + &f.derivative(k).scale(HALF_I * w);
        }
    }
    Ok(out)
}

/// Symbols on which `xi_j #_A .` can act.
pub trait LeftXi: Sized {
    fn left_xi(&self, axis: usize, a: &AntisymmetricForm) -> Result<Self>;
}

impl LeftXi for PolySymbol {
    fn left_xi(&self, axis: usize, a: &AntisymmetricForm) -> Result<Self> {
        let n = a.dim();
        check_dims(n, self.dim())?;
        if axis >= n {
            return Err(Error::AxisOutOfRange { axis, dim: n });
        }
        let mut e = vec![0.0; n];
        e[axis] = 1.0;
        left_linear(&e, self, a)
    }
}

impl LeftXi for GridSymbol {
    /// Grid version; derivatives by sixth-order central differences, so the
    /// symbol should decay towards the grid boundary.
    fn left_xi(&self, axis: usize, a: &AntisymmetricForm) -> Result<Self> {
        let n = a.dim();
        check_dims(n, self.dim())?;
        if axis >= n {
            return Err(Error::AxisOutOfRange { axis, dim: n });
        }
        let spec = *self.spec();
        let mut xi = vec![0.0; n];
        let mut values: Vec<Complex64> = self
            .values()
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                spec.point(k, &mut xi);
                v * xi[axis]
            })
            .collect();
        for k in 0..n {
            let w = a.get(axis, k);
            if w == 0.0 {
                continue;
            }
            let d = self.derivative(k)?;
            for (v, dv) in values.iter_mut().zip(d.values()) {
                *v += HALF_I * w * dv;
            }
        }
        GridSymbol::new(spec, values)
    }
}

/// `xi_axis #_A f` on either representation.
pub fn left_xi<S: LeftXi>(axis: usize, f: &S, a: &AntisymmetricForm) -> Result<S> {
    f.left_xi(axis, a)
}

/// `xi^{#alpha} = xi_1^{#alpha_1} # ... # xi_n^{#alpha_n}`, built by applying
/// `left_xi` to `1` from the rightmost factor.
pub fn sharp_power(alpha: &MultiIndex, a: &AntisymmetricForm) -> Result<PolySymbol> {
    let n = a.dim();
    check_dims(n, alpha.dim())?;
    let mut acc = PolySymbol::one(n);
    for axis in (0..n).rev() {
        for _ in 0..alpha.entries()[axis] {
            acc = acc.left_xi(axis, a)?;
        }
    }
    Ok(acc)
}

/// `(1/N!) sum_sigma f_{sigma(1)} # ... # f_{sigma(N)}` for linear forms `f_i`.
///
/// Evaluated over subsets rather than permutations:
/// `S(T) = sum_{i in T} f_i # S(T \ {i})`, so the cost is `O(2^N N)` products.
pub fn symmetrized_product(linear_forms: &[Vec<f64>], a: &AntisymmetricForm) -> Result<PolySymbol> {
    let n = a.dim();
    for f in linear_forms {
        check_dims(n, f.len())?;
    }
    let count = linear_forms.len();
    if count == 0 {
        return Ok(PolySymbol::one(n));
    }
    if count > 20 {
        return Err(Error::InvalidBasis(format!("{count} factors is too many to symmetrize")));
    }
    let mut table: Vec<PolySymbol> = Vec::with_capacity(1 << count);
    table.push(PolySymbol::one(n));
    for mask in 1usize..(1 << count) {
        let mut acc = PolySymbol::zero(n);
        for (i, f) in linear_forms.iter().enumerate() {
            if mask & (1 << i) != 0 {
                acc = &acc + &left_linear(f, &table[mask ^ (1 << i)], a)?;
            }
        }
        table.push(acc);
    }
    let factorial: f64 = (1..=count).map(|k| k as f64).product();
    Ok(table[(1 << count) - 1].scale(Complex64::new(1.0 / factorial, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::star::grid::GridSpec;

    fn x(n: usize, j: usize) -> PolySymbol {
        PolySymbol::coordinate(n, j)
    }

    #[test]
    fn commutative_case_is_pointwise() {
        let f = x(2, 0);
        let g = x(2, 1);
        let p = moyal_product(&f, &g, &AntisymmetricForm::zero(2)).unwrap();
        assert_eq!(p, &f * &g);
    }

    #[test]
    fn coordinate_commutator() {
        let a = AntisymmetricForm::elementary(2, 0, 1, 1.0);
        let p = moyal_product(&x(2, 0), &x(2, 1), &a).unwrap();
        let expected = &(&x(2, 0) * &x(2, 1)) + &PolySymbol::constant(2, HALF_I);
        assert!(p.relative_distance(&expected) < 1e-15);
        let q = moyal_product(&x(2, 1), &x(2, 0), &a).unwrap();
        let expected = &(&x(2, 0) * &x(2, 1)) - &PolySymbol::constant(2, HALF_I);
        assert!(q.relative_distance(&expected) < 1e-15);
    }

    #[test]
    fn unit_is_neutral() {
        let a = AntisymmetricForm::standard(1);
        let f = &(&x(2, 0) * &x(2, 0)) + &x(2, 1);
        assert_eq!(moyal_product(&f, &PolySymbol::one(2), &a).unwrap(), f);
        assert_eq!(moyal_product(&PolySymbol::one(2), &f, &a).unwrap(), f);
    }

    #[test]
    fn left_xi_agrees_with_product() {
        let a = AntisymmetricForm::elementary(2, 0, 1, 1.0);
        assert_eq!(left_xi(0, &PolySymbol::one(2), &a).unwrap(), x(2, 0));
        let p = left_xi(0, &x(2, 1), &a).unwrap();
        assert_eq!(p, moyal_product(&x(2, 0), &x(2, 1), &a).unwrap());
        assert!(matches!(left_xi(2, &x(2, 1), &a), Err(Error::AxisOutOfRange { .. })));
    }

    #[test]
    fn sharp_powers() {
        let a = AntisymmetricForm::elementary(2, 0, 1, 1.0);
        assert_eq!(sharp_power(&MultiIndex::new(vec![1, 0]), &a).unwrap(), x(2, 0));
        let p = sharp_power(&MultiIndex::new(vec![1, 1]), &a).unwrap();
        let expected = &(&x(2, 0) * &x(2, 1)) + &PolySymbol::constant(2, HALF_I);
        assert!(p.relative_distance(&expected) < 1e-15);
        let sq = sharp_power(&MultiIndex::new(vec![2, 0]), &a).unwrap();
        assert_eq!(sq, &x(2, 0) * &x(2, 0));
        assert_eq!(sq, moyal_product(&x(2, 0), &x(2, 0), &a).unwrap());
    }

    #[test]
    fn symmetrization_cancels_commutators() {
        let a = AntisymmetricForm::elementary(2, 0, 1, 1.0);
        let p = symmetrized_product(&[vec![1.0, 0.0], vec![0.0, 1.0]], &a).unwrap();
        assert!(p.relative_distance(&(&x(2, 0) * &x(2, 1))) < 1e-15);
        assert_eq!(symmetrized_product(&[vec![1.0, 0.0]], &a).unwrap(), x(2, 0));
        assert_eq!(symmetrized_product(&[], &a).unwrap(), PolySymbol::one(2));
    }

    #[test]
    fn grid_left_xi_on_gaussian() {
        let a = AntisymmetricForm::standard(1);
        let spec = GridSpec::new(2, 8.0, 256).unwrap();
        let gauss = GridSymbol::from_fn(spec, |x| Complex64::new((-(x[0] * x[0] + x[1] * x[1])).exp(), 0.0));
        let out = left_xi(0, &gauss, &a).unwrap();
        let exact = GridSymbol::from_fn(spec, |x| {
            let g = (-(x[0] * x[0] + x[1] * x[1])).exp();
            Complex64::new(x[0] * g, 0.5 * (-2.0 * x[1] * g))
        });
        let err = out.sup_distance_within(&exact, 100.0).unwrap();
        assert!(err < 1e-6, "max error {err}");
    }
}
