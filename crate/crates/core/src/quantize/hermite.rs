//! Hermite functions, normalized Laguerre functions and the cross-Wigner
//! functions of Hermite pairs.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::star::grid::GridSpec;

/// Values `h_0(x), ..., h_{levels-1}(x)` of the orthonormal Hermite functions,
/// by the three-term recurrence
/// `h_{n+1} = sqrt(2/(n+1)) x h_n - sqrt(n/(n+1)) h_{n-1}`.
pub fn hermite_functions(levels: usize, x: f64, out: &mut [f64]) {
    debug_assert!(out.len() >= levels);
    if levels == 0 {
        return;
    }
    out[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if levels > 1 {
        out[1] = std::f64::consts::SQRT_2 * x * out[0];
    }
    for n in 1..levels.saturating_sub(1) {
        let nf = n as f64;
        out[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
    }
}

/// Mass of `h_n` outside `[-halfwidth, halfwidth]`.
pub fn hermite_tail_mass(n: usize, halfwidth: f64) -> f64 {
    let turning = (2.0 * n as f64 + 1.0).sqrt();
    let end = halfwidth.max(turning) + 14.0;
    let step = 2e-3;
    let steps = ((end - halfwidth) / step).ceil() as usize;
    let mut buf = vec![0.0; n + 1];
    let mut acc = 0.0;
    for i in 0..=steps {
        let x = halfwidth + i as f64 * step;
        hermite_functions(n + 1, x, &mut buf);
        let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
        acc += w * buf[n] * buf[n];
    }
    2.0 * acc * step
}

/// Smallest halfwidth (on a 0.25 lattice) meeting the tail-mass bound.
pub fn minimal_halfwidth(levels: usize, tail_bound: f64) -> f64 {
    let mut r = 1.0;
    while hermite_tail_mass(levels - 1, r) >= tail_bound {
        r += 0.25;
    }
    r
}

/// Normalized Laguerre functions
/// `l_n^k(x) = sqrt(n!/(n+k)!) x^{k/2} e^{-x/2} L_n^k(x)` for `n < count`.
pub fn laguerre_functions(k: usize, x: f64, count: usize, out: &mut [f64]) {
    if count == 0 {
        return;
    }
    let kf = k as f64;
    out[0] = if k == 0 {
        (-0.5 * x).exp()
    } else if x <= 0.0 {
        0.0
    } else {
        (0.5 * kf * x.ln() - 0.5 * x - 0.5 * ln_factorial(k)).exp()
    };
    if count > 1 {
        out[1] = (kf + 1.0 - x) * out[0] / (kf + 1.0).sqrt();
    }
    for n in 1..count.saturating_sub(1) {
        let nf = n as f64;
        out[n + 1] = ((2.0 * nf + kf + 1.0 - x) * out[n] - (nf * (nf + kf)).sqrt() * out[n - 1])
            / ((nf + 1.0) * (nf + kf + 1.0)).sqrt();
    }
}

pub fn ln_factorial(n: usize) -> f64 {
    statrs::function::factorial::ln_factorial(n as u64)
}

/// All cross-Wigner functions
/// `W_mn(s, varsigma) = (2 pi)^{-1} int e^{i varsigma t} h_m(s + t/2) h_n(s - t/2) dt`
/// at one phase-space point, written row-major into `out` (`levels^2` entries).
///
/// Closed form: `W_{n+k,n} = (-1)^n / pi * e^{i k theta} l_n^k(2 r^2)` with
/// `s + i varsigma = r e^{i theta}`, and `W_{n,n+k} = conj(W_{n+k,n})`.
pub fn cross_wigner(levels: usize, s: f64, varsigma: f64, scratch: &mut [f64], out: &mut [Complex64]) {
    let r2 = s * s + varsigma * varsigma;
    let x = 2.0 * r2;
    let r = r2.sqrt();
    let unit = if r > 0.0 { Complex64::new(s / r, varsigma / r) } else { Complex64::new(1.0, 0.0) };
    let mut phase = Complex64::new(1.0 / PI, 0.0);
    for k in 0..levels {
        let count = levels - k;
        laguerre_functions(k, x, count, scratch);
        for n in 0..count {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let w = phase * (sign * scratch[n]);
            out[(n + k) * levels + n] = w;
            if k > 0 {
                out[n * levels + n + k] = w.conj();
            }
        }
        phase *= unit;
    }
}

/// Dequantization taper `w(t) = erfc((t - center)/width)/2` on the level
/// fraction `t = (m + 1/2)/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Taper {
    pub center: f64,
    pub width: f64,
}

impl Default for Taper {
    fn default() -> Self {
        Taper { center: 0.65, width: 0.07 }
    }
}

impl Taper {
    pub fn weight(&self, t: f64) -> f64 {
        0.5 * erfc((t - self.center) / self.width)
    }
}

/// Truncated tensor Hermite basis and the phase-space grid used with it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermiteBasisSpec {
    /// Configuration-space dimension (phase space is `R^{2d}`).
    pub d: usize,
    /// Hermite functions per axis.
    pub levels: usize,
    pub halfwidth: f64,
    pub points: usize,
    /// Dequantization taper; `None` sums the truncated expansion as is.
    pub taper: Option<Taper>,
}

pub const TAIL_BOUND: f64 = 1e-10;

impl HermiteBasisSpec {
    pub fn new(d: usize, levels: usize, halfwidth: f64, points: usize) -> Result<Self> {
        let spec = HermiteBasisSpec { d, levels, halfwidth, points, taper: Some(Taper::default()) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_taper(mut self, taper: Option<Taper>) -> Result<Self> {
        self.taper = taper;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidBasis("d must be positive".into()));
        }
        if self.levels == 0 {
            return Err(Error::InvalidBasis("at least one level required".into()));
        }
        if let Some(t) = self.taper {
            if !(t.center.is_finite() && t.width > 0.0) {
                return Err(Error::InvalidBasis(format!("invalid taper {t:?}")));
            }
        }
        GridSpec::new(2 * self.d, self.halfwidth, self.points)?;
        if hermite_tail_mass(self.levels - 1, self.halfwidth) >= TAIL_BOUND {
            return Err(Error::HalfwidthTooSmall {
                levels: self.levels,
                halfwidth: self.halfwidth,
                needed: minimal_halfwidth(self.levels, TAIL_BOUND),
            });
        }
        Ok(())
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec { dim: 2 * self.d, halfwidth: self.halfwidth, points: self.points }
    }

    /// Matrix size `levels^d`.
    pub fn size(&self) -> usize {
        self.levels.pow(self.d as u32)
    }

    /// Largest trusted block size `levels - 10` (at least 1).
    pub fn trusted_block(&self) -> usize {
        self.levels.saturating_sub(10).max(1)
    }

    /// Per-level dequantization weights `sqrt(w((m + 1/2)/N))`.
    pub fn taper(&self) -> Vec<f64> {
        let n = self.levels as f64;
        (0..self.levels)
            .map(|m| match self.taper {
                Some(t) => t.weight((m as f64 + 0.5) / n).sqrt(),
                None => 1.0,
            })
            .collect()
    }
}

/// Hermite functions sampled on the axis grid of a basis spec.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteTable {
    pub axis: Vec<f64>,
    /// `values[n][i] = h_n(axis[i])`.
    pub values: Vec<Vec<f64>>,
}

impl HermiteTable {
    /// Trapezoid Gram matrix `max |<h_i, h_j> - delta_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let h = self.axis[1] - self.axis[0];
        let n = self.values.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..=i {
                let g: f64 = self.values[i].iter().zip(&self.values[j]).map(|(a, b)| a * b).sum::<f64>() * h;
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }
}

pub fn hermite_table(spec: &HermiteBasisSpec) -> Result<HermiteTable> {
    spec.validate()?;
    let axis = spec.grid().axis();
    let mut values = vec![vec![0.0; axis.len()]; spec.levels];
    let mut buf = vec![0.0; spec.levels];
    for (i, &x) in axis.iter().enumerate() {
        hermite_functions(spec.levels, x, &mut buf);
        for n in 0..spec.levels {
            values[n][i] = buf[n];
        }
    }
    Ok(HermiteTable { axis, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_closed_form() {
        let spec = HermiteBasisSpec::new(1, 1, 7.0, 64).unwrap();
        let t = hermite_table(&spec).unwrap();
        for (i, &x) in t.axis.iter().enumerate() {
            let exact = PI.powf(-0.25) * (-x * x / 2.0).exp();
            assert!((t.values[0][i] - exact).abs() < 1e-15);
        }
    }

    #[test]
    fn first_excited_state_is_odd() {
        let mut buf = [0.0; 2];
        hermite_functions(2, 0.0, &mut buf);
        assert_eq!(buf[1], 0.0);
        hermite_functions(2, 0.7, &mut buf);
        let a = buf[1];
        hermite_functions(2, -0.7, &mut buf);
        assert!((a + buf[1]).abs() < 1e-15);
    }

    #[test]
    fn orthonormal_on_grid() {
        let spec = HermiteBasisSpec::new(1, 40, 11.0, 512).unwrap();
        let t = hermite_table(&spec).unwrap();
        let defect = t.orthonormality_defect();
        assert!(defect < 1e-8, "{defect}");
    }

    #[test]
    fn halfwidth_ten_is_too_small_for_forty_levels() {
        let tail = hermite_tail_mass(39, 10.0);
        assert!(tail > TAIL_BOUND && tail < 1e-4, "{tail:e}");
        let raw = HermiteBasisSpec { d: 1, levels: 40, halfwidth: 10.0, points: 512, taper: None };
        assert!(hermite_table(&raw).is_err());
    }

    #[test]
    fn halfwidth_check() {
        let err = HermiteBasisSpec::new(1, 40, 8.0, 256).unwrap_err();
        match err {
            Error::HalfwidthTooSmall { needed, .. } => assert!(needed > 10.0 && needed <= 11.5, "{needed}"),
            e => panic!("unexpected {e}"),
        }
        assert!(HermiteBasisSpec::new(1, 40, 11.0, 256).is_ok());
    }

    #[test]
    fn laguerre_functions_match_explicit_polynomials() {
        // L_2^1(x) = (x^2 - 6x + 6)/2
        let x: f64 = 1.3;
        let mut out = [0.0; 3];
        laguerre_functions(1, x, 3, &mut out);
        let l2 = (x * x - 6.0 * x + 6.0) / 2.0;
        let expected = (2.0f64 / 6.0).sqrt() * x.sqrt() * (-x / 2.0).exp() * l2;
        assert!((out[2] - expected).abs() < 1e-14);
    }

    #[test]
    fn taper_endpoints() {
        let t = Taper::default();
        assert!((t.weight(0.65) - 0.5).abs() < 1e-15);
        assert!((t.weight(0.2) - 1.0).abs() < 1e-9);
        assert!(t.weight(1.0) < 1e-12);
    }
}
