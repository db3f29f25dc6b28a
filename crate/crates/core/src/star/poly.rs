//! Exact polynomial symbols on phase space.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent vector `alpha` of a monomial `xi^alpha`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// The unit index `e_axis`.
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut e = vec![0; dim];
        e[axis] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// A complex polynomial on `R^n`, stored as a sparse map from exponents to
/// coefficients. Exact zeros are never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolySymbol {
    dim: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl PolySymbol {
    pub fn zero(dim: usize) -> Self {
        PolySymbol { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut p = PolySymbol::zero(dim);
        p.add_term(MultiIndex::zero(dim), c);
        p
    }

    pub fn one(dim: usize) -> Self {
        PolySymbol::constant(dim, Complex64::new(1.0, 0.0))
    }

    /// The coordinate function `xi_axis`.
    pub fn coordinate(dim: usize, axis: usize) -> Self {
        PolySymbol::monomial(MultiIndex::unit(dim, axis), Complex64::new(1.0, 0.0))
    }

    pub fn monomial(alpha: MultiIndex, c: Complex64) -> Self {
        let mut p = PolySymbol::zero(alpha.dim());
        p.add_term(alpha, c);
        p
    }

    /// The linear form `xi -> sum_j c_j xi_j`.
    pub fn linear(covector: &[f64]) -> Self {
        let dim = covector.len();
        let mut p = PolySymbol::zero(dim);
        for (j, &c) in covector.iter().enumerate() {
            p.add_term(MultiIndex::unit(dim, j), Complex64::new(c, 0.0));
        }
        p
    }

    /// Harmonic oscillator `(|s|^2 + |varsigma|^2)/2` on `R^{2d}`.
    pub fn harmonic_oscillator(d: usize) -> Self {
        let mut p = PolySymbol::zero(2 * d);
        for j in 0..2 * d {
            let mut e = vec![0; 2 * d];
            e[j] = 2;
            p.add_term(MultiIndex(e), Complex64::new(0.5, 0.0));
        }
        p
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, Complex64)>) -> Result<Self> {
        let mut p = PolySymbol::zero(dim);
        for (alpha, c) in terms {
            if alpha.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: alpha.dim() });
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> Complex64 {
        self.terms.get(alpha).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest total order among stored terms; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::order).max()
    }

    pub fn add_term(&mut self, alpha: MultiIndex, c: Complex64) {
        debug_assert_eq!(alpha.dim(), self.dim);
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(alpha);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = *o.get() + c;
                if v == Complex64::new(0.0, 0.0) {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
        }
    }

    pub fn scale(&self, c: Complex64) -> PolySymbol {
        let mut p = PolySymbol::zero(self.dim);
        for (alpha, &v) in &self.terms {
            p.add_term(alpha.clone(), v * c);
        }
        p
    }

    /// Partial derivative with respect to `xi_axis`.
    pub fn derivative(&self, axis: usize) -> PolySymbol {
        let mut p = PolySymbol::zero(self.dim);
        for (alpha, &c) in &self.terms {
            let e = alpha.0[axis];
            if e == 0 {
                continue;
            }
            let mut beta = alpha.0.clone();
            beta[axis] -= 1;
            p.add_term(MultiIndex(beta), c * e as f64);
        }
        p
    }

    /// Mixed derivative `d^alpha`.
    pub fn derivative_multi(&self, alpha: &MultiIndex) -> PolySymbol {
        let mut p = PolySymbol::zero(self.dim);
        'terms: for (beta, &c) in &self.terms {
            let mut factor = 1.0;
            let mut gamma = beta.0.clone();
            for (j, &a) in alpha.0.iter().enumerate() {
                if a > gamma[j] {
                    continue 'terms;
                }
                for t in 0..a {
                    factor *= (gamma[j] - t) as f64;
                }
                gamma[j] -= a;
            }
            p.add_term(MultiIndex(gamma), c * factor);
        }
        p
    }

    pub fn evaluate(&self, xi: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(alpha, &c)| {
                let m: f64 = alpha.0.iter().zip(xi).map(|(&e, &x)| x.powi(e as i32)).product();
                c * m
            })
            .sum()
    }

    /// Largest coefficient modulus (0 for the zero polynomial).
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max |self - other| / max(|self|, |other|, tiny)` over coefficients.
    pub fn relative_distance(&self, other: &PolySymbol) -> f64 {
        let diff = self - other;
        let scale = self.max_abs_coefficient().max(other.max_abs_coefficient()).max(f64::MIN_POSITIVE);
        diff.max_abs_coefficient() / scale
    }

    /// Real and imaginary parts taken coefficient-wise are real polynomials;
    /// this returns true if every coefficient is real.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im == 0.0)
    }

    fn check_dim(&self, other: &PolySymbol) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(())
    }

    /// Composition with a linear map: `xi -> self(m xi)`.
    pub fn linear_substitution(&self, m: &nalgebra::DMatrix<f64>) -> Result<PolySymbol> {
        if m.nrows() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: m.nrows() });
        }
        let n = m.ncols();
        let rows: Vec<PolySymbol> = (0..self.dim)
            .map(|j| PolySymbol::linear(&m.row(j).iter().copied().collect::<Vec<_>>()))
            .collect();
        let mut out = PolySymbol::zero(n);
        for (alpha, &c) in &self.terms {
            let mut term = PolySymbol::constant(n, c);
            for (j, &e) in alpha.0.iter().enumerate() {
                for _ in 0..e {
                    term = term.pointwise_mul(&rows[j])?;
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Pointwise (commutative) product.
    pub fn pointwise_mul(&self, other: &PolySymbol) -> Result<PolySymbol> {
        self.check_dim(other)?;
        let mut p = PolySymbol::zero(self.dim);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                p.add_term(a.add(b), ca * cb);
            }
        }
        Ok(p)
    }
}

impl Add for &PolySymbol {
    type Output = PolySymbol;
    fn add(self, rhs: &PolySymbol) -> PolySymbol {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in polynomial sum");
        let mut p = self.clone();
        for (alpha, &c) in &rhs.terms {
            p.add_term(alpha.clone(), c);
        }
        p
    }
}

impl Sub for &PolySymbol {
    type Output = PolySymbol;
    fn sub(self, rhs: &PolySymbol) -> PolySymbol {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in polynomial difference");
        let mut p = self.clone();
        for (alpha, &c) in &rhs.terms {
            p.add_term(alpha.clone(), -c);
        }
        p
    }
}

impl Neg for &PolySymbol {
    type Output = PolySymbol;
    fn neg(self) -> PolySymbol {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &PolySymbol {
    type Output = PolySymbol;
    /// Pointwise product; panics on dimension mismatch.
    fn mul(self, rhs: &PolySymbol) -> PolySymbol {
        self.pointwise_mul(rhs).expect("dimension mismatch in polynomial product")
    }
}

impl fmt::Display for PolySymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (alpha, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", c.re, c.im)?;
            for (j, &e) in alpha.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "·ξ{}", j + 1)?,
                    _ => write!(f, "·ξ{}^{}", j + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_coefficients_are_pruned() {
        let mut p = PolySymbol::coordinate(2, 0);
        p.add_term(MultiIndex::unit(2, 0), c(-1.0));
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
    }

    #[test]
    fn derivative_of_monomial() {
        let p = PolySymbol::monomial(MultiIndex::new(vec![3, 2]), c(2.0));
        let d = p.derivative_multi(&MultiIndex::new(vec![2, 1]));
        assert_eq!(d, PolySymbol::monomial(MultiIndex::new(vec![1, 1]), c(24.0)));
        assert!(p.derivative_multi(&MultiIndex::new(vec![4, 0])).is_zero());
    }

    #[test]
    fn pointwise_product_and_evaluation() {
        let x = PolySymbol::coordinate(2, 0);
        let y = PolySymbol::coordinate(2, 1);
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p.degree(), Some(2));
        let v = p.evaluate(&[3.0, 2.0]);
        assert!((v - c(5.0)).norm() < 1e-15);
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let x = PolySymbol::coordinate(2, 0);
        let y = PolySymbol::coordinate(3, 0);
        assert!(matches!(x.pointwise_mul(&y), Err(Error::DimensionMismatch { .. })));
    }
}
