use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::TorusModel;

pub const DEFAULT_GAP_THRESHOLD: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub center: f64,
    pub width: f64,
    pub count: usize,
    pub lower: f64,
    pub upper: f64,
}

/// One comparison row of a measured cluster against the Landau prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRow {
    pub k: u32,
    pub n: usize,
    pub m: usize,
    pub predicted_center: f64,
    pub measured_center: f64,
    pub drift: f64,
    pub relative_drift: f64,
    pub width: f64,
    pub measured_count: usize,
    pub exact_count: usize,
    pub asymptotic_count_n: f64,
    pub asymptotic_count_d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub gap_threshold: f64,
    pub clusters: Vec<Cluster>,
    pub rows: Vec<ClusterRow>,
    pub fit: Option<VolumeFit>,
}

/// Least-squares volume constant for `count ~ vol (k / 2 pi)^{n/2} C(m + j - 1, m)`
/// with `j = n` or `j = d = n / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeFit {
    pub volume_n: f64,
    pub residual_n: f64,
    pub volume_d: f64,
    pub residual_d: f64,
    pub preferred: BinomialConvention,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinomialConvention {
    N,
    D,
}

/// Splits the sorted values at gaps larger than `gap_threshold`.
pub fn detect_clusters(eigs: &[f64], gap_threshold: f64) -> ClusterReport {
    let mut v = eigs.to_vec();
    v.sort_by(f64::total_cmp);
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 0..v.len() {
        if i + 1 == v.len() || v[i + 1] - v[i] > gap_threshold {
            let (lower, upper) = (v[start], v[i]);
            clusters.push(Cluster { center: (lower + upper) / 2.0, width: upper - lower, count: i + 1 - start, lower, upper });
            start = i + 1;
        }
    }
    ClusterReport { gap_threshold, clusters, rows: Vec::new(), fit: None }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Eigenvalues of `k^{-1}` times the lattice operator for one `(k, N)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterInput {
    pub k: u32,
    pub n: usize,
    pub eigenvalues: Vec<f64>,
    /// True when the list holds every eigenvalue of the operator.
    pub complete: bool,
}

/// Compares measured clusters for levels `0..=m_max` with `b (m + 1/2)` and `k c`.
/// The last cluster of a truncated list is dropped since it may be partial.
pub fn check_cluster_law(
    inputs: &[ClusterInput],
    model: &TorusModel,
    m_max: usize,
    gap_threshold: f64,
) -> Result<ClusterReport> {
    if inputs.is_empty() {
        return Err(Error::MissingData("no eigenvalue lists supplied".into()));
    }
    let manifold_dim = 2usize;
    let d = manifold_dim / 2;
    let mut rows = Vec::new();
    let mut clusters_all = Vec::new();
    for input in inputs {
        let report = detect_clusters(&input.eigenvalues, gap_threshold);
        let mut clusters = report.clusters;
        if !input.complete {
            clusters.pop();
        }
        for m in 0..=m_max {
            let predicted = model.field * (m as f64 + 0.5);
            let found = clusters
                .iter()
                .filter(|c| (c.center - predicted).abs() < model.field / 2.0)
                .min_by(|a, b| (a.center - predicted).abs().total_cmp(&(b.center - predicted).abs()));
            let Some(c) = found else {
                return Err(Error::MissingData(format!("no cluster near level {m} for k = {}, N = {}", input.k, input.n)));
            };
            let scale = (input.k as f64 / (2.0 * std::f64::consts::PI)).powf(manifold_dim as f64 / 2.0);
            rows.push(ClusterRow {
                k: input.k,
                n: input.n,
                m,
                predicted_center: predicted,
                measured_center: c.center,
                drift: (c.center - predicted).abs(),
                relative_drift: (c.center - predicted).abs() / predicted,
                width: c.width,
                measured_count: c.count,
                exact_count: input.k as usize * model.chern as usize,
                asymptotic_count_n: scale * binomial(m + manifold_dim - 1, m),
                asymptotic_count_d: scale * binomial(m + d - 1, m),
            });
        }
        clusters_all.extend(clusters);
    }
    let fit = fit_volume(&rows);
    Ok(ClusterReport { gap_threshold, clusters: clusters_all, rows, fit: Some(fit) })
}

fn fit_volume(rows: &[ClusterRow]) -> VolumeFit {
    let fit = |pred: &dyn Fn(&ClusterRow) -> f64| {
        let num: f64 = rows.iter().map(|r| r.measured_count as f64 * pred(r)).sum();
        let den: f64 = rows.iter().map(|r| pred(r) * pred(r)).sum();
        let vol = num / den;
        let scale: f64 = rows.iter().map(|r| (r.measured_count as f64).powi(2)).sum::<f64>().sqrt();
        let res: f64 = rows.iter().map(|r| (r.measured_count as f64 - vol * pred(r)).powi(2)).sum::<f64>().sqrt();
        (vol, res / scale.max(1.0))
    };
    let (volume_n, residual_n) = fit(&|r| r.asymptotic_count_n);
    let (volume_d, residual_d) = fit(&|r| r.asymptotic_count_d);
    let preferred = if residual_d <= residual_n { BinomialConvention::D } else { BinomialConvention::N };
    VolumeFit { volume_n, residual_n, volume_d, residual_d, preferred }
}
