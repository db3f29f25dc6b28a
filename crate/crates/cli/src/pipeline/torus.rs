use std::collections::BTreeMap;

use heis_core::torus::{
    build_magnetic_laplacian, solve_lowest_with, EigenResult, PotentialSpec, Scaling, SolverOptions, TorusModel,
};
use heis_core::verify::{
    check_bands, check_cluster_law, check_weyl_law, sigma_bands, ClusterInput, Report, DEFAULT_GAP_THRESHOLD,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, TorusConfig};
use crate::CliError;

/// One lattice solve: `(k, N, v)` with the depth it has to reach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Job {
    pub k: u32,
    pub n: usize,
    pub v: f64,
    pub count: usize,
    /// Largest `k^{-1}`-scaled eigenvalue must exceed this.
    pub reach: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub k: u32,
    pub n: usize,
    pub potential_v: f64,
    pub result: EigenResult,
}

fn key(k: u32, n: usize, v: f64) -> (u32, usize, u64) {
    (k, n, v.to_bits())
}

pub fn model(t: &TorusConfig) -> Result<TorusModel, CliError> {
    Ok(TorusModel::new(t.field, t.chern)?)
}

/// Deduplicated solves needed by the cluster, Weyl and band checks.
pub fn plan(config: &RunConfig) -> Result<Vec<Job>, CliError> {
    let t = &config.torus;
    let mut jobs: BTreeMap<(u32, usize, u64), Job> = BTreeMap::new();
    let mut add = |k: u32, n: usize, v: f64, reach: f64| {
        let kc = k as usize * t.chern as usize;
        let levels = (reach / t.field + 0.5).floor().max(0.0) as usize + 1;
        let count = if k == 0 { 1 } else { kc * levels };
        let reach = if k == 0 { f64::NEG_INFINITY } else { reach };
        let e = jobs.entry(key(k, n, v)).or_insert(Job { k, n, v, count, reach });
        e.count = e.count.max(count);
        e.reach = e.reach.max(reach);
    };
    for &k in &t.cluster_k {
        for &n in &t.cluster_n {
            add(k, n, 0.0, t.field * (t.m_max as f64 + 1.0));
        }
    }
    for &[k, n] in &t.weyl_runs {
        add(k as u32, n, 0.0, t.weyl_lambda * k as f64);
    }
    for &n in &t.band_n {
        add(t.band_k, n, t.potential_v, t.band_cutoff);
    }
    let jobs: Vec<Job> = jobs.into_values().collect();
    for j in &jobs {
        if j.n * j.n > t.max_dimension {
            return Err(CliError::Resource(format!(
                "lattice N = {} gives dimension {} above the cap {}",
                j.n,
                j.n * j.n,
                t.max_dimension
            )));
        }
    }
    Ok(jobs)
}

fn solve(job: &Job, model: &TorusModel, seed: u64) -> Result<Spectrum, CliError> {
    let v = PotentialSpec::cosine_x(job.v);
    let op = build_magnetic_laplacian(model, job.k, job.n, Some(&v))?;
    let limit = op.dim() / 4;
    let options = SolverOptions { seed, ..SolverOptions::default() };
    let mut count = job.count.min(limit);
    loop {
        let result = solve_lowest_with(&op, count, &options)?;
        let top = result.eigenvalues.last().copied().unwrap_or(f64::NEG_INFINITY);
        if top > job.reach {
            return Ok(Spectrum { k: job.k, n: job.n, potential_v: job.v, result });
        }
        if count == limit {
            return Err(CliError::Resource(format!(
                "k = {}, N = {}: {} eigenvalues do not reach {}",
                job.k, job.n, count, job.reach
            )));
        }
        count = (count * 2).min(limit);
    }
}

/// Reuses cached spectra that satisfy a job; solves the rest in parallel.
pub fn spectra(config: &RunConfig, cached: &[Spectrum]) -> Result<(Vec<Spectrum>, usize), CliError> {
    let model = model(&config.torus)?;
    let jobs = plan(config)?;
    let mut hits = 0;
    let todo: Vec<(usize, Job)> = jobs
        .iter()
        .enumerate()
        .filter(|(_, j)| {
            let hit = cached.iter().any(|s| {
                key(s.k, s.n, s.potential_v) == key(j.k, j.n, j.v)
                    && s.result.eigenvalues.last().copied().unwrap_or(f64::NEG_INFINITY) > j.reach
            });
            hits += hit as usize;
            !hit
        })
        .map(|(i, j)| (i, *j))
        .collect();
    let solved: Vec<Result<Spectrum, CliError>> =
        todo.par_iter().map(|(_, j)| solve(j, &model, config.seed)).collect();
    let mut solved = solved.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter();
    let mut out = Vec::with_capacity(jobs.len());
    for j in &jobs {
        let cached_hit = cached.iter().find(|s| {
            key(s.k, s.n, s.potential_v) == key(j.k, j.n, j.v)
                && s.result.eigenvalues.last().copied().unwrap_or(f64::NEG_INFINITY) > j.reach
        });
        match cached_hit {
            Some(s) => out.push(s.clone()),
            None => out.push(solved.next().expect("one solve per missing job")),
        }
    }
    Ok((out, hits))
}

fn find<'a>(spectra: &'a [Spectrum], k: u32, n: usize, v: f64) -> Result<&'a Spectrum, CliError> {
    spectra
        .iter()
        .find(|s| key(s.k, s.n, s.potential_v) == key(k, n, v))
        .ok_or_else(|| CliError::Core(heis_core::Error::MissingData(format!("no spectrum for k = {k}, N = {n}"))))
}

/// Cluster, Weyl-law and band verdicts from solved spectra.
pub fn report(config: &RunConfig, spectra: &[Spectrum]) -> Result<Report, CliError> {
    let t = &config.torus;
    let model = model(t)?;
    let mut report = Report::new("torus");

    for &n in &t.cluster_n {
        if t.cluster_k.contains(&0) {
            let s = find(spectra, 0, n, 0.0)?;
            let e0 = s.result.raw[0].abs();
            report.check(&format!("torus: zero-flux ground state, N = {n}"), e0, 1e-8, e0 < 1e-8, "lowest eigenvalue");
        }
    }

    let ks: Vec<u32> = t.cluster_k.iter().copied().filter(|&k| k > 0).collect();
    let mut per_n = Vec::new();
    for &n in &t.cluster_n {
        let inputs = ks
            .iter()
            .map(|&k| {
                let s = find(spectra, k, n, 0.0)?;
                Ok(ClusterInput { k, n, eigenvalues: s.result.eigenvalues.clone(), complete: false })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        if !inputs.is_empty() {
            per_n.push(check_cluster_law(&inputs, &model, t.m_max, DEFAULT_GAP_THRESHOLD)?);
        }
    }
    if let Some(finest) = per_n.last() {
        let rows: Vec<_> = per_n.iter().flat_map(|r| r.rows.iter().cloned()).collect();
        let count_err = rows.iter().map(|r| r.measured_count.abs_diff(r.exact_count)).max().unwrap_or(0);
        report.check("clusters: counts equal k c", count_err as f64, 0.0, count_err == 0, format!("{} rows", rows.len()));
        let drift = rows.iter().map(|r| r.relative_drift).fold(0.0, f64::max);
        report.check(
            "clusters: relative center drift",
            drift,
            t.cluster_tolerance,
            drift < t.cluster_tolerance,
            "max over k, N, m",
        );
        let mut worsened = 0usize;
        for pair in per_n.windows(2) {
            for (a, b) in pair[0].rows.iter().zip(&pair[1].rows) {
                if b.drift > a.drift {
                    worsened += 1;
                }
            }
        }
        report.check(
            "clusters: drift shrinks under refinement",
            worsened as f64,
            0.0,
            worsened == 0,
            "rows whose drift grew when N increased",
        );
        report.volume_fit = finest.fit;
        report.clusters = rows;
    }

    if !t.weyl_runs.is_empty() {
        let results: Vec<EigenResult> = t
            .weyl_runs
            .iter()
            .map(|&[k, n]| find(spectra, k as u32, n, 0.0).map(|s| s.result.with_scaling(Scaling::InverseK2)))
            .collect::<Result<_, _>>()?;
        let records = check_weyl_law(&results, t.weyl_lambda, &model)?;
        let tol = t.weyl_tolerance;
        let large: Vec<f64> = records.iter().filter(|r| r.k >= 16).map(|r| (r.ratio - 1.0).abs()).collect();
        let worst = large.iter().copied().fold(0.0, f64::max);
        report.check("weyl: |ratio - 1| for k >= 16", worst, tol, worst < tol, format!("lambda = {}", t.weyl_lambda));
        let mut sorted = records.clone();
        sorted.sort_by_key(|r| r.k);
        let (first, last) = ((sorted[0].ratio - 1.0).abs(), (sorted[sorted.len() - 1].ratio - 1.0).abs());
        report.check(
            "weyl: deviation at largest k does not exceed smallest k",
            last,
            first,
            last <= first,
            format!("k = {} vs k = {}", sorted[sorted.len() - 1].k, sorted[0].k),
        );
        report.weyl = records;
    }

    if !t.band_n.is_empty() {
        let v = PotentialSpec::cosine_x(t.potential_v);
        let m_max = (t.band_cutoff / t.field).ceil() as usize + 1;
        let bands = sigma_bands(&model, &v, m_max);
        let mut band_reports = Vec::new();
        for &n in &t.band_n {
            let s = find(spectra, t.band_k, n, t.potential_v)?;
            band_reports.push(check_bands(&s.result.eigenvalues, &bands, t.band_cutoff, t.min_gap, t.band_k, n));
        }
        let finest = band_reports.last().expect("non-empty");
        report.check(
            &format!("bands: excursion outside the predicted bands at N = {}", finest.n),
            finest.excursion,
            t.band_margin,
            finest.excursion < t.band_margin,
            format!("k = {}, v = {}", t.band_k, t.potential_v),
        );
        let grew = band_reports.windows(2).any(|w| w[1].excursion > w[0].excursion);
        report.check(
            "bands: excursion shrinks under refinement",
            if grew { 1.0 } else { 0.0 },
            0.0,
            !grew,
            band_reports.iter().map(|b| format!("N = {}: {:.3e}", b.n, b.excursion)).collect::<Vec<_>>().join(", "),
        );
        let missing: usize = band_reports.iter().map(|b| b.gaps_predicted - b.gaps_confirmed).sum();
        report.check(
            &format!("bands: predicted gaps observed with width >= {}", t.min_gap),
            missing as f64,
            0.0,
            missing == 0,
            format!("{} predicted gaps per lattice", finest.gaps_predicted),
        );
        report.bands = band_reports;
    }
    Ok(report)
}
