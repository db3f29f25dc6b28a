//! Symbols sampled on a uniform tensor grid centred at the origin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on the number of stored samples (about 1 GiB of complex values).
const MAX_SAMPLES: usize = 1 << 26;

/// Axis layout of a [`GridSymbol`]: `points` cell-centred nodes on
/// `[-halfwidth, halfwidth]`, spacing `2 * halfwidth / points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub halfwidth: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(dim: usize, halfwidth: f64, points: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGrid("dimension must be positive".into()));
        }
        if !(halfwidth.is_finite() && halfwidth > 0.0) {
            return Err(Error::InvalidGrid(format!("halfwidth {halfwidth} must be positive")));
        }
        if points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points per axis, got {points}")));
        }
        let total = (points as u128).checked_pow(dim as u32).unwrap_or(u128::MAX);
        if total > MAX_SAMPLES as u128 {
            return Err(Error::InvalidGrid(format!("{points}^{dim} samples exceeds the cap {MAX_SAMPLES}")));
        }
        Ok(GridSpec { dim, halfwidth, points })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.halfwidth / self.points as f64
    }

    pub fn axis(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points).map(|i| -self.halfwidth + (i as f64 + 0.5) * h).collect()
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-axis indices of a flat (row-major, axis 0 slowest) index.
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for a in (0..self.dim).rev() {
            out[a] = flat % self.points;
            flat /= self.points;
        }
    }

    pub fn point(&self, flat: usize, out: &mut [f64]) {
        let h = self.spacing();
        let mut idx = vec![0; self.dim];
        self.unravel(flat, &mut idx);
        for (x, i) in out.iter_mut().zip(idx) {
            *x = -self.halfwidth + (i as f64 + 0.5) * h;
        }
    }

    /// Stride of `axis` in the flat layout.
    pub fn stride(&self, axis: usize) -> usize {
        self.points.pow((self.dim - 1 - axis) as u32)
    }
}

/// Complex samples of a symbol on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSymbol {
    spec: GridSpec,
    values: Vec<Complex64>,
}

impl GridSymbol {
    pub fn new(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!("expected {} values, got {}", spec.len(), values.len())));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidGrid("non-finite sample".into()));
        }
        Ok(GridSymbol { spec, values })
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let mut xi = vec![0.0; spec.dim];
        let values = (0..spec.len())
            .map(|k| {
                spec.point(k, &mut xi);
                f(&xi)
            })
            .collect();
        GridSymbol { spec, values }
    }

    /// Samples a radial function `f(|xi|^2)`; evaluates `f` once per distinct radius.
    pub fn from_radial(spec: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let axis = spec.axis();
        let mut cache: std::collections::HashMap<Vec<usize>, Complex64> = std::collections::HashMap::new();
        let mut idx = vec![0; spec.dim];
        let values = (0..spec.len())
            .map(|k| {
                spec.unravel(k, &mut idx);
                // Fold indices by the grid's reflection symmetry and sort: the
                // radius only depends on the multiset of |x_i|.
                let mut key: Vec<usize> =
                    idx.iter().map(|&i| (2 * i as i64 - (spec.points as i64 - 1)).unsigned_abs() as usize).collect();
                key.sort_unstable();
                *cache.entry(key).or_insert_with(|| {
                    let r2: f64 = idx.iter().map(|&i| axis[i] * axis[i]).sum();
                    f(r2)
                })
            })
            .collect();
        GridSymbol { spec, values }
    }

    pub fn constant(spec: GridSpec, c: Complex64) -> Self {
        GridSymbol { spec, values: vec![c; spec.len()] }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GridSymbol {
        GridSymbol { spec: self.spec, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &GridSymbol, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<GridSymbol> {
        if self.spec != other.spec {
            return Err(Error::InvalidGrid("grids differ".into()));
        }
        Ok(GridSymbol {
            spec: self.spec,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &GridSymbol) -> Result<GridSymbol> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, c: Complex64) -> GridSymbol {
        self.map(|v| v * c)
    }

    /// `max |self - other|` over grid points with `|xi| <= radius`.
    pub fn sup_distance_within(&self, other: &GridSymbol, radius: f64) -> Result<f64> {
        if self.spec != other.spec {
            return Err(Error::InvalidGrid("grids differ".into()));
        }
        let mut xi = vec![0.0; self.spec.dim];
        let mut worst: f64 = 0.0;
        for k in 0..self.values.len() {
            self.spec.point(k, &mut xi);
            if xi.iter().map(|x| x * x).sum::<f64>() <= radius * radius {
                worst = worst.max((self.values[k] - other.values[k]).norm());
            }
        }
        Ok(worst)
    }

    /// `max |self|` over points with `|xi| <= radius`.
    pub fn sup_norm_within(&self, radius: f64) -> f64 {
        let mut xi = vec![0.0; self.spec.dim];
        let mut worst: f64 = 0.0;
        for (k, v) in self.values.iter().enumerate() {
            self.spec.point(k, &mut xi);
            if xi.iter().map(|x| x * x).sum::<f64>() <= radius * radius {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    /// Trapezoid approximation of `int a dxi`.
    pub fn integral(&self) -> Complex64 {
        let h = self.spec.spacing();
        self.values.iter().sum::<Complex64>() * h.powi(self.spec.dim as i32)
    }

    /// Sixth-order central difference along `axis`; samples outside the grid
    /// are treated as zero.
    pub fn derivative(&self, axis: usize) -> Result<GridSymbol> {
        if axis >= self.spec.dim {
            return Err(Error::AxisOutOfRange { axis, dim: self.spec.dim });
        }
        const W: [f64; 3] = [45.0 / 60.0, -9.0 / 60.0, 1.0 / 60.0];
        let stride = self.spec.stride(axis);
        let m = self.spec.points;
        let inv_h = 1.0 / self.spec.spacing();
        let mut idx = vec![0; self.spec.dim];
        let values = (0..self.values.len())
            .map(|k| {
                self.spec.unravel(k, &mut idx);
                let i = idx[axis];
                let mut acc = Complex64::new(0.0, 0.0);
                for (o, w) in W.iter().enumerate() {
                    let off = o + 1;
                    let plus = if i + off < m { self.values[k + off * stride] } else { Complex64::new(0.0, 0.0) };
                    let minus = if i >= off { self.values[k - off * stride] } else { Complex64::new(0.0, 0.0) };
                    acc += (plus - minus) * *w;
                }
                acc * inv_h
            })
            .collect();
        Ok(GridSymbol { spec: self.spec, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_is_symmetric() {
        let spec = GridSpec::new(1, 2.0, 8).unwrap();
        let ax = spec.axis();
        for i in 0..8 {
            assert!((ax[i] + ax[7 - i]).abs() < 1e-15);
        }
        assert!((spec.spacing() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn radial_cache_matches_direct() {
        let spec = GridSpec::new(2, 3.0, 17).unwrap();
        let direct = GridSymbol::from_fn(spec, |x| Complex64::new((-(x[0] * x[0] + x[1] * x[1])).exp(), 0.0));
        let radial = GridSymbol::from_radial(spec, |r2| Complex64::new((-r2).exp(), 0.0));
        assert!(direct.sup_distance_within(&radial, 10.0).unwrap() < 1e-15);
    }

    #[test]
    fn sixth_order_derivative_of_gaussian() {
        let spec = GridSpec::new(1, 8.0, 256).unwrap();
        let g = GridSymbol::from_fn(spec, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0));
        let exact = GridSymbol::from_fn(spec, |x| Complex64::new(-2.0 * x[0] * (-x[0] * x[0]).exp(), 0.0));
        let err = g.derivative(0).unwrap().sup_distance_within(&exact, 8.0).unwrap();
        assert!(err < 2e-7, "{err}");
    }

    #[test]
    fn invalid_specs() {
        assert!(GridSpec::new(0, 1.0, 4).is_err());
        assert!(GridSpec::new(1, -1.0, 4).is_err());
        assert!(GridSpec::new(4, 1.0, 1024).is_err());
        let spec = GridSpec::new(1, 1.0, 4).unwrap();
        assert!(GridSymbol::new(spec, vec![Complex64::new(0.0, 0.0); 3]).is_err());
    }
}
