use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Flat torus `R^2 / (side Z)^2` with uniform field `b dx ^ dy` and Chern number
/// `c = b side^2 / (2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusModel {
    pub side: f64,
    pub field: f64,
    pub chern: u32,
}

impl TorusModel {
    pub fn new(field: f64, chern: u32) -> Result<Self> {
        if !(field.is_finite() && field > 0.0) {
            return Err(Error::InvalidModel(format!("field strength {field} must be positive")));
        }
        if chern == 0 {
            return Err(Error::InvalidModel("Chern number must be a positive integer".into()));
        }
        Ok(TorusModel { side: (2.0 * PI * chern as f64 / field).sqrt(), field, chern })
    }

    /// Model with a prescribed side; `b side^2 / (2 pi)` must be an integer.
    pub fn from_side(side: f64, field: f64) -> Result<Self> {
        let c = field * side * side / (2.0 * PI);
        if !(c.is_finite() && c >= 0.5 && (c - c.round()).abs() < 1e-9 * c.max(1.0)) {
            return Err(Error::InvalidModel(format!("flux b L^2 / 2pi = {c} is not a positive integer")));
        }
        TorusModel::new(field, c.round() as u32)
    }

    pub fn area(&self) -> f64 {
        self.side * self.side
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialTerm {
    pub p: i32,
    pub q: i32,
    pub amplitude: Complex64,
}

/// Trigonometric potential `V(x, y) = sum a_{pq} e^{2 pi i (p x + q y) / L}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub terms: Vec<PotentialTerm>,
}

impl PotentialSpec {
    pub fn new(terms: Vec<PotentialTerm>) -> Result<Self> {
        let spec = PotentialSpec { terms };
        spec.check_real()?;
        Ok(spec)
    }

    pub fn zero() -> Self {
        PotentialSpec::default()
    }

    /// `v cos(2 pi x / L)`.
    pub fn cosine_x(v: f64) -> Self {
        let half = Complex64::new(v / 2.0, 0.0);
        PotentialSpec {
            terms: vec![PotentialTerm { p: 1, q: 0, amplitude: half }, PotentialTerm { p: -1, q: 0, amplitude: half }],
        }
    }

    fn amplitude(&self, p: i32, q: i32) -> Complex64 {
        self.terms.iter().filter(|t| t.p == p && t.q == q).map(|t| t.amplitude).sum()
    }

    fn check_real(&self) -> Result<()> {
        for t in &self.terms {
            let a = self.amplitude(t.p, t.q);
            let b = self.amplitude(-t.p, -t.q);
            let scale = a.norm().max(b.norm()).max(1.0);
            if (a - b.conj()).norm() > 1e-12 * scale {
                return Err(Error::InvalidModel(format!(
                    "amplitudes of ({}, {}) and ({}, {}) are not conjugate",
                    t.p, t.q, -t.p, -t.q
                )));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude == Complex64::new(0.0, 0.0))
    }

    /// True if no term depends on `y`.
    pub fn depends_only_on_x(&self) -> bool {
        self.terms.iter().all(|t| t.q == 0 || t.amplitude == Complex64::new(0.0, 0.0))
    }

    pub fn value(&self, x: f64, y: f64, side: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| (t.amplitude * Complex64::from_polar(1.0, 2.0 * PI * (t.p as f64 * x + t.q as f64 * y) / side)).re)
            .sum()
    }

    /// `(min V, max V)` sampled on a `256 x 256` grid of the torus.
    pub fn range(&self, side: f64) -> (f64, f64) {
        if self.is_zero() {
            return (0.0, 0.0);
        }
        let n = 256;
        let h = side / n as f64;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            for j in 0..n {
                let v = self.value(i as f64 * h, j as f64 * h, side);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }

    /// `max V - min V`.
    pub fn oscillation(&self, side: f64) -> f64 {
        let (lo, hi) = self.range(side);
        hi - lo
    }
}
