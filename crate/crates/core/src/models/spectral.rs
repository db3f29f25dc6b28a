//! Symbol spectra, sharp inverses and spectral-window symbols.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantize::{weyl_quantize, wigner_symbol, HermiteBasisSpec, OperatorMatrix, Quantize};
use crate::star::forms::{williamson_eigenvalues, AntisymmetricForm, MetricForm, SymplecticFrame};
use crate::star::grid::{GridSpec, GridSymbol};

pub const MERGE_TOLERANCE: f64 = 1e-9;
pub const CONDITION_LIMIT: f64 = 1e8;

/// Sorted `(value, multiplicity)` pairs below `cutoff`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolSpectrum {
    pub values: Vec<(f64, usize)>,
    pub cutoff: f64,
}

impl SymbolSpectrum {
    pub fn from_values(mut raw: Vec<f64>, cutoff: f64) -> Self {
        raw.retain(|&v| v <= cutoff);
        raw.sort_by(f64::total_cmp);
        let mut values: Vec<(f64, usize)> = Vec::new();
        for v in raw {
            match values.last_mut() {
                Some((last, count)) if (v - *last).abs() <= MERGE_TOLERANCE => *count += 1,
                _ => values.push((v, 1)),
            }
        }
        SymbolSpectrum { values, cutoff }
    }

    pub fn total_multiplicity(&self) -> usize {
        self.values.iter().map(|v| v.1).sum()
    }
}

/// `{sum_i B_i (alpha_i + 1/2) + V_j}` below `cutoff`, with `B` the Williamson
/// frequencies of `(G, W)`.
pub fn spectrum_of_symbol(
    g: &MetricForm,
    w: &AntisymmetricForm,
    potential_eigenvalues: &[f64],
    cutoff: f64,
) -> Result<SymbolSpectrum> {
    if !cutoff.is_finite() {
        return Err(Error::InvalidModel("cutoff must be finite".into()));
    }
    let b = williamson_eigenvalues(g, w)?;
    let ground: f64 = b.iter().sum::<f64>() / 2.0;
    let mut raw = Vec::new();
    for &v in potential_eigenvalues {
        enumerate_levels(&b, 0, ground + v, cutoff, &mut raw);
    }
    Ok(SymbolSpectrum::from_values(raw, cutoff))
}

fn enumerate_levels(b: &[f64], axis: usize, value: f64, cutoff: f64, out: &mut Vec<f64>) {
    if value > cutoff + MERGE_TOLERANCE {
        return;
    }
    if axis == b.len() {
        out.push(value);
        return;
    }
    let mut v = value;
    while v <= cutoff + MERGE_TOLERANCE {
        enumerate_levels(b, axis + 1, v, cutoff, out);
        v += b[axis];
    }
}

fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// `wigner_symbol(Q(a)^{-1})`: the inverse of `a` for the Weyl product.
pub fn sharp_inverse<S: Quantize + ?Sized>(a: &S, spec: &HermiteBasisSpec) -> Result<GridSymbol> {
    let q = weyl_quantize(a, spec)?;
    let k = spec.trusted_block().min(q.size());
    let block = q.entries.view((0, 0), (k, k)).into_owned();
    let cond = condition_number(&block).max(condition_number(&q.entries));
    if !(cond < CONDITION_LIMIT) {
        return Err(Error::NotInvertible(cond));
    }
    let inv = q.entries.clone().try_inverse().ok_or(Error::NotInvertible(f64::INFINITY))?;
    let op = OperatorMatrix::new(q.d, q.levels, inv, false)?;
    wigner_symbol(&op, spec)
}

/// Symbol of `1_{[e_minus, e_plus]}(Q(a))` for a real symbol `a`.
pub fn spectral_window_symbol<S: Quantize + ?Sized>(
    a: &S,
    e_minus: f64,
    e_plus: f64,
    spec: &HermiteBasisSpec,
) -> Result<GridSymbol> {
    if !(e_minus < e_plus) {
        return Err(Error::InvalidModel(format!("empty window [{e_minus}, {e_plus}]")));
    }
    let q = weyl_quantize(a, spec)?;
    if !q.hermitian {
        return Err(Error::InvalidModel("spectral windows need a real symbol".into()));
    }
    let n = q.size();
    let hermitian = DMatrix::from_fn(n, n, |i, j| (q.entries[(i, j)] + q.entries[(j, i)].conj()) * 0.5);
    let eig = hermitian.symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let resolution = q.hermitian_defect().max(f64::EPSILON * scale * n as f64);
    let margin = 10.0 * resolution;
    let mut projector = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        for boundary in [e_minus, e_plus] {
            if (lambda - boundary).abs() < margin {
                return Err(Error::WindowTooClose { boundary, eigenvalue: lambda, margin });
            }
        }
        if lambda > e_minus && lambda < e_plus {
            let v = eig.eigenvectors.column(idx);
            projector += v * v.adjoint();
        }
    }
    let op = OperatorMatrix::new(q.d, q.levels, projector, true)?;
    wigner_symbol(&op, spec)
}

/// Samples `f(S^T xi)` for the normal-form coordinates of `frame`.
pub fn pullback_through_frame(
    frame: &SymplecticFrame,
    grid: &GridSpec,
    f: impl Fn(&[f64]) -> Complex64,
) -> Result<GridSymbol> {
    if frame.dim() != grid.dim {
        return Err(Error::DimensionMismatch { expected: frame.dim(), got: grid.dim });
    }
    Ok(GridSymbol::from_fn(*grid, |xi| f(&frame.coordinates(xi))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expect(s: &SymbolSpectrum, want: &[(f64, usize)]) {
        assert_eq!(s.values.len(), want.len(), "{:?}", s.values);
        for (a, b) in s.values.iter().zip(want) {
            assert!((a.0 - b.0).abs() < 1e-12 && a.1 == b.1, "{:?} vs {:?}", a, b);
        }
    }

    #[test]
    fn unit_oscillator_levels() {
        let s = spectrum_of_symbol(&MetricForm::identity(2), &AntisymmetricForm::standard(1), &[0.0], 4.0).unwrap();
        expect(&s, &[(0.5, 1), (1.5, 1), (2.5, 1), (3.5, 1)]);
    }

    #[test]
    fn two_dimensional_degeneracy() {
        let s = spectrum_of_symbol(&MetricForm::identity(4), &AntisymmetricForm::standard(2), &[0.0], 4.0).unwrap();
        expect(&s, &[(1.0, 1), (2.0, 2), (3.0, 3), (4.0, 4)]);
    }

    #[test]
    fn potential_splitting() {
        let s = spectrum_of_symbol(&MetricForm::identity(2), &AntisymmetricForm::standard(1), &[-0.1, 0.1], 1.7).unwrap();
        expect(&s, &[(0.4, 1), (0.6, 1), (1.4, 1), (1.6, 1)]);
    }

    #[test]
    fn singular_form_is_rejected() {
        let w = AntisymmetricForm::zero(2);
        assert!(spectrum_of_symbol(&MetricForm::identity(2), &w, &[0.0], 3.0).is_err());
    }
}
