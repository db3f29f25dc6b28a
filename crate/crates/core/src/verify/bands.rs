use serde::{Deserialize, Serialize};

use crate::torus::{PotentialSpec, TorusModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lower: f64,
    pub upper: f64,
    pub levels: Vec<usize>,
}

/// Merged intervals `[b (m + 1/2) + min V, b (m + 1/2) + max V]`, `m <= m_max`.
pub fn sigma_bands(model: &TorusModel, potential: &PotentialSpec, m_max: usize) -> Vec<Band> {
    let (lo, hi) = potential.range(model.side);
    let mut bands: Vec<Band> = Vec::new();
    for m in 0..=m_max {
        let level = model.field * (m as f64 + 0.5);
        let (lower, upper) = (level + lo, level + hi);
        match bands.last_mut() {
            Some(b) if lower <= b.upper => {
                b.upper = b.upper.max(upper);
                b.levels.push(m);
            }
            _ => bands.push(Band { lower, upper, levels: vec![m] }),
        }
    }
    bands
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandReport {
    pub k: u32,
    pub n: usize,
    pub cutoff: f64,
    pub bands: Vec<Band>,
    /// Largest distance of an eigenvalue below the cutoff from the union of bands.
    pub excursion: f64,
    /// Gaps between consecutive eigenvalues that are at least `min_gap` wide.
    pub observed_gaps: Vec<(f64, f64)>,
    /// Predicted gaps below the cutoff that contain an observed gap's midpoint.
    pub gaps_confirmed: usize,
    pub gaps_predicted: usize,
}

pub fn check_bands(eigs: &[f64], bands: &[Band], cutoff: f64, min_gap: f64, k: u32, n: usize) -> BandReport {
    let mut v: Vec<f64> = eigs.iter().copied().filter(|&e| e <= cutoff).collect();
    v.sort_by(f64::total_cmp);
    let excursion = v
        .iter()
        .map(|&e| {
            bands
                .iter()
                .map(|b| if e < b.lower { b.lower - e } else if e > b.upper { e - b.upper } else { 0.0 })
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let observed_gaps: Vec<(f64, f64)> =
        v.windows(2).filter(|w| w[1] - w[0] >= min_gap).map(|w| (w[0], w[1])).collect();
    let predicted: Vec<(f64, f64)> = bands
        .windows(2)
        .map(|w| (w[0].upper, w[1].lower))
        .filter(|g| g.1 <= cutoff)
        .collect();
    let gaps_confirmed = predicted
        .iter()
        .filter(|g| observed_gaps.iter().any(|o| o.0 <= g.0 + 0.05 && o.1 >= g.1 - 0.05))
        .count();
    BandReport {
        k,
        n,
        cutoff,
        bands: bands.to_vec(),
        excursion,
        observed_gaps,
        gaps_confirmed,
        gaps_predicted: predicted.len(),
    }
}
