//! Resolvent and spectral-projector symbols of the harmonic oscillator `H = |xi|^2 / 2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantize::hermite::ln_factorial;
use crate::star::grid::{GridSpec, GridSymbol};

pub const DEFAULT_POLE_MARGIN: f64 = 1e-3;
/// Terms kept in the binomial expansion of `(1 - u/2)^beta`.
const BINOMIAL_TERMS: usize = 80;

/// Parameters of `R_{d,z}`, the symbol of `(H^w - z)^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolventQuery {
    pub d: usize,
    pub z: Complex64,
    pub pole_margin: f64,
}

impl ResolventQuery {
    pub fn new(d: usize, z: Complex64) -> Result<Self> {
        Self::with_margin(d, z, DEFAULT_POLE_MARGIN)
    }

    pub fn with_margin(d: usize, z: Complex64, pole_margin: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidModel("d must be positive".into()));
        }
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::OutsideValidity(format!("non-finite z = {z}")));
        }
        if z.re >= d as f64 {
            return Err(Error::OutsideValidity(format!("Re z = {} must be below d = {d}", z.re)));
        }
        let (pole, distance) = nearest_pole(d, z);
        if distance < pole_margin {
            return Err(Error::NearPole { re: z.re, im: z.im, pole, distance });
        }
        Ok(ResolventQuery { d, z, pole_margin })
    }
}

/// Nearest point of `d/2 + N` and its distance to `z`.
pub fn nearest_pole(d: usize, z: Complex64) -> (f64, f64) {
    let half = d as f64 / 2.0;
    let j = (z.re - half).round().max(0.0);
    let pole = half + j;
    (pole, (z - pole).norm())
}

/// `E = d/2 + m` selecting `pi_{d,E}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectorQuery {
    pub d: usize,
    pub energy: f64,
    pub m: usize,
}

impl ProjectorQuery {
    pub fn new(d: usize, energy: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidModel("d must be positive".into()));
        }
        let m = energy - d as f64 / 2.0;
        if !(m.is_finite() && m > -1e-12 && (m - m.round()).abs() < 1e-12) {
            return Err(Error::NotAnEigenvalue(energy));
        }
        Ok(ProjectorQuery { d, energy, m: m.round() as usize })
    }
}

/// Radial function `sum_i e^{-x} x^i / i! c_i` of `x = 2H = |xi|^2`.
///
/// The resolvent integral
/// `int_0^2 (1 - s/2)^{d/2-z-1} (1 + s/2)^{d/2+z-1} e^{-sH} ds`
/// expands, after `s = 2(1 - u)`, into
/// `2^{1+beta} sum_i e^{-2H} (2H)^i / i! sum_l C(beta, l) (-1/2)^l / (alpha + i + l + 1)`
/// with `alpha = d/2 - z - 1`, `beta = d/2 + z - 1`; the form continues
/// meromorphically in `z` with simple poles at `d/2 + N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSeries {
    coeffs: Vec<Complex64>,
}

impl PoissonSeries {
    pub fn resolvent(d: usize, z: Complex64, max_radius2: f64) -> Self {
        let len = series_length(max_radius2);
        let alpha = Complex64::new(d as f64 / 2.0 - 1.0, 0.0) - z;
        let beta = Complex64::new(d as f64 / 2.0 - 1.0, 0.0) + z;
        let mut binom = Vec::with_capacity(BINOMIAL_TERMS);
        let mut c = Complex64::new(1.0, 0.0);
        for l in 0..BINOMIAL_TERMS {
            binom.push(c * 0.5f64.powi(l as i32) * if l % 2 == 0 { 1.0 } else { -1.0 });
            c = c * (beta - l as f64) / (l as f64 + 1.0);
        }
        let prefactor = ((beta + 1.0) * std::f64::consts::LN_2).exp();
        let coeffs = (0..len)
            .map(|i| {
                let f: Complex64 = binom.iter().enumerate().map(|(l, b)| b / (alpha + (i + l + 1) as f64)).sum();
                prefactor * f
            })
            .collect();
        PoissonSeries { coeffs }
    }

    pub fn zero(max_radius2: f64) -> Self {
        PoissonSeries { coeffs: vec![Complex64::new(0.0, 0.0); series_length(max_radius2)] }
    }

    pub fn add_scaled(&mut self, other: &PoissonSeries, c: Complex64) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += c * b;
        }
    }

    /// Value at `|xi|^2 = x`.
    pub fn value(&self, x: f64) -> Complex64 {
        if x <= 0.0 {
            return self.coeffs[0];
        }
        let width = 12.0 * x.sqrt() + 30.0;
        let lo = (x - width).floor().max(0.0) as usize;
        let hi = ((x + width).ceil() as usize).min(self.coeffs.len() - 1);
        let lnx = x.ln();
        (lo..=hi).map(|i| self.coeffs[i] * (i as f64 * lnx - x - ln_factorial(i)).exp()).sum()
    }
}

fn series_length(max_radius2: f64) -> usize {
    let x = max_radius2.max(0.0);
    (x + 12.0 * x.sqrt() + 32.0).ceil() as usize
}

fn max_radius2(grid: &GridSpec) -> f64 {
    let edge = grid.halfwidth - grid.spacing() / 2.0;
    grid.dim as f64 * edge * edge
}

fn check_grid(d: usize, grid: &GridSpec) -> Result<()> {
    if grid.dim != 2 * d {
        return Err(Error::DimensionMismatch { expected: 2 * d, got: grid.dim });
    }
    Ok(())
}

/// Pointwise value of `R_{d,z}` at `H(xi) = h`.
pub fn resolvent_value(q: &ResolventQuery, h: f64) -> Complex64 {
    PoissonSeries::resolvent(q.d, q.z, 2.0 * h).value(2.0 * h)
}

pub fn resolvent_symbol(q: &ResolventQuery, grid: &GridSpec) -> Result<GridSymbol> {
    check_grid(q.d, grid)?;
    let series = PoissonSeries::resolvent(q.d, q.z, max_radius2(grid));
    Ok(GridSymbol::from_radial(*grid, |r2| series.value(r2)))
}

/// Generalized Laguerre polynomial `L_m^k(x)`.
pub fn laguerre(m: usize, k: f64, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for n in 0..m {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 + k - x) * cur - (nf + k) * prev) / (nf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `pi_{d,E}(xi) = 2^d (-1)^m e^{-|xi|^2} L_m^{d-1}(2 |xi|^2)` at `|xi|^2 = r2`.
pub fn projector_value(q: &ProjectorQuery, r2: f64) -> f64 {
    let sign = if q.m.is_multiple_of(2) { 1.0 } else { -1.0 };
    2f64.powi(q.d as i32) * sign * (-r2).exp() * laguerre(q.m, q.d as f64 - 1.0, 2.0 * r2)
}

pub fn projector_symbol(q: &ProjectorQuery, grid: &GridSpec) -> Result<GridSymbol> {
    check_grid(q.d, grid)?;
    Ok(GridSymbol::from_radial(*grid, |r2| Complex64::new(projector_value(q, r2), 0.0)))
}

/// Sign convention of [`residue_projector`]: the returned symbol is minus
/// the residue of `R_{d,z}`.
pub const RESIDUE_SIGN_CONVENTION: &str = "minus_residue";

#[derive(Debug, Clone, PartialEq)]
pub struct ResidueProjection {
    pub symbol: GridSymbol,
    pub center: f64,
    pub radius: f64,
    pub nodes: usize,
    pub sign_convention: &'static str,
}

/// `-(2 pi i)^{-1} \oint_{|z - E| = r} R_{d,z} dz` by the trapezoid rule on `nodes` points.
pub fn residue_projector(d: usize, center: f64, radius: f64, nodes: usize, grid: &GridSpec) -> Result<ResidueProjection> {
    check_grid(d, grid)?;
    if !(radius > 0.0 && radius.is_finite()) || nodes < 3 {
        return Err(Error::InvalidModel(format!("contour radius {radius} with {nodes} nodes")));
    }
    if center + radius >= d as f64 {
        return Err(Error::OutsideValidity(format!(
            "contour |z - {center}| = {radius} reaches Re z >= d = {d}"
        )));
    }
    let x_max = max_radius2(grid);
    let mut total = PoissonSeries::zero(x_max);
    for q in 0..nodes {
        let theta = 2.0 * PI * q as f64 / nodes as f64;
        let unit = Complex64::from_polar(1.0, theta);
        let z = center + radius * unit;
        let query = ResolventQuery::new(d, z)?;
        let series = PoissonSeries::resolvent(d, query.z, x_max);
        total.add_scaled(&series, -unit * radius / nodes as f64);
    }
    Ok(ResidueProjection {
        symbol: GridSymbol::from_radial(*grid, |r2| total.value(r2)),
        center,
        radius,
        nodes,
        sign_convention: RESIDUE_SIGN_CONVENTION,
    })
}
