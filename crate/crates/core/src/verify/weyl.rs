use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{EigenResult, Scaling, TorusModel};

pub const COUNT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylLawRecord {
    pub lambda: f64,
    pub k: u32,
    pub n: usize,
    pub measured: usize,
    pub predicted: f64,
    pub ratio: f64,
}

/// Volume of `{ |xi|^2 / 2 <= lambda }` in `T^* M` for the flat torus.
pub fn twisted_liouville_volume(model: &TorusModel, lambda: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::InvalidModel(format!("energy {lambda} must be non-negative")));
    }
    Ok(2.0 * std::f64::consts::PI * lambda * model.area())
}

/// `N_k(lambda)` from `k^{-2}`-scaled eigenvalues against `(k / 2 pi)^2 vol`.
pub fn check_weyl_law(results: &[EigenResult], lambda: f64, model: &TorusModel) -> Result<Vec<WeylLawRecord>> {
    let volume = twisted_liouville_volume(model, lambda)?;
    results
        .iter()
        .map(|r| {
            let scaled = r.with_scaling(Scaling::InverseK2).eigenvalues;
            let predicted = (r.k as f64 / (2.0 * std::f64::consts::PI)).powi(2) * volume;
            let largest = scaled.last().copied().unwrap_or(f64::NEG_INFINITY);
            if largest <= lambda + COUNT_TOLERANCE && scaled.len() < r.n * r.n {
                return Err(Error::InsufficientDepth {
                    lambda,
                    largest,
                    required: (1.25 * predicted).ceil() as usize + 1,
                });
            }
            let measured = scaled.iter().filter(|&&e| e <= lambda + COUNT_TOLERANCE).count();
            Ok(WeylLawRecord { lambda, k: r.k, n: r.n, measured, predicted, ratio: measured as f64 / predicted })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volume_values() {
        let m = TorusModel::new(1.0, 1).unwrap();
        let v = twisted_liouville_volume(&m, 1.0).unwrap();
        assert!((v - 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
        assert_eq!(twisted_liouville_volume(&m, 0.0).unwrap(), 0.0);
        assert!((twisted_liouville_volume(&m, 2.0).unwrap() - 2.0 * v).abs() < 1e-12);
    }
}
