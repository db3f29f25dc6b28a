use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lattice::{LandauChain, MagneticLatticeOperator};
use super::model::TorusModel;
use crate::error::{Error, Result};

pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
const DENSE_LIMIT: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scaling {
    Raw,
    InverseK,
    InverseK2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub seed: u64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub degree: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { seed: 0x5eed, tolerance: RESIDUAL_TOLERANCE, max_iterations: 400, degree: 40 }
    }
}

/// Lowest eigenvalues of a lattice operator; `eigenvalues` are `raw` divided by
/// `k` or `k^2` according to `scaling` (unscaled when `k = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub k: u32,
    pub n: usize,
    pub count_requested: usize,
    pub scaling: Scaling,
    pub eigenvalues: Vec<f64>,
    pub raw: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub blocks: usize,
    pub seed: u64,
}

impl EigenResult {
    pub fn scale_factor(k: u32, scaling: Scaling) -> f64 {
        let k = k as f64;
        match scaling {
            _ if k == 0.0 => 1.0,
            Scaling::Raw => 1.0,
            Scaling::InverseK => 1.0 / k,
            Scaling::InverseK2 => 1.0 / (k * k),
        }
    }

    pub fn with_scaling(&self, scaling: Scaling) -> EigenResult {
        let f = Self::scale_factor(self.k, scaling);
        EigenResult { scaling, eigenvalues: self.raw.iter().map(|v| v * f).collect(), ..self.clone() }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

trait Scalar: ComplexField<RealField = f64> + Copy {
    fn sample(rng: &mut ChaCha8Rng) -> Self;
}

impl Scalar for f64 {
    fn sample(rng: &mut ChaCha8Rng) -> Self {
        rng.random_range(-1.0..1.0)
    }
}

impl Scalar for Complex64 {
    fn sample(rng: &mut ChaCha8Rng) -> Self {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    }
}

trait Operator<T: Scalar>: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[T], y: &mut [T]);
    fn spectral_bound(&self) -> f64;
    fn dense(&self) -> DMatrix<T>;

    fn apply_block(&self, x: &DMatrix<T>) -> DMatrix<T> {
        let n = self.dim();
        let mut y = DMatrix::zeros(n, x.ncols());
        for (xc, yc) in x.as_slice().chunks(n).zip(y.as_mut_slice().chunks_mut(n)) {
            self.apply(xc, yc);
        }
        y
    }
}

impl Operator<f64> for LandauChain {
    fn dim(&self) -> usize {
        self.len()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec(x, y)
    }
    fn spectral_bound(&self) -> f64 {
        self.gershgorin_radius()
    }
    fn dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diagonal));
        for i in 0..n {
            let j = (i + 1) % n;
            m[(i, j)] -= self.hop;
            m[(j, i)] -= self.hop;
        }
        m
    }
}

impl Operator<Complex64> for MagneticLatticeOperator {
    fn dim(&self) -> usize {
        self.matrix.dim
    }
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.matrix.mul_vec(x, y)
    }
    fn spectral_bound(&self) -> f64 {
        self.matrix.gershgorin_radius()
    }
    fn dense(&self) -> DMatrix<Complex64> {
        self.matrix.to_dense()
    }
}

struct Partial {
    values: Vec<f64>,
    residuals: Vec<f64>,
    iterations: usize,
}

fn residual_norms<T: Scalar>(x: &DMatrix<T>, hx: &DMatrix<T>, values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .enumerate()
        .map(|(c, &v)| (hx.column(c) - x.column(c) * T::from_real(v)).norm())
        .collect()
}

fn sorted_eigen<T: Scalar>(g: DMatrix<T>) -> (Vec<f64>, DMatrix<T>) {
    let g = (&g + g.adjoint()) * T::from_real(0.5);
    let eig = g.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

fn solve_dense<T: Scalar>(op: &dyn Operator<T>, count: usize) -> Partial {
    let (values, vectors) = sorted_eigen(op.dense());
    let x = vectors.columns(0, count).into_owned();
    let hx = op.apply_block(&x);
    let residuals = residual_norms(&x, &hx, &values[..count]);
    Partial { values: values[..count].to_vec(), residuals, iterations: 0 }
}

fn orthonormalize<T: Scalar>(x: DMatrix<T>) -> DMatrix<T> {
    let p = x.ncols();
    x.qr().q().columns(0, p).into_owned()
}

/// Chebyshev-filtered subspace iteration for the `count` lowest eigenpairs.
fn chfsi<T: Scalar>(op: &dyn Operator<T>, count: usize, options: &SolverOptions, seed: u64) -> Result<Partial> {
    let n = op.dim();
    let buffer = (count * 3 / 10).max(8);
    let p = (count + buffer).min(n);
    if n <= DENSE_LIMIT || 3 * p >= n {
        return Ok(solve_dense(op, count));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = DMatrix::from_fn(n, p, |_, _| T::sample(&mut rng));
    x = orthonormalize(x);
    let upper = op.spectral_bound();

    let rayleigh_ritz = |x: DMatrix<T>| {
        let hx = op.apply_block(&x);
        let g = x.adjoint() * &hx;
        let (values, w) = sorted_eigen(g);
        (x * &w, hx * &w, values)
    };

    let (mut xr, mut hx, mut values) = rayleigh_ritz(x);
    let mut worst = f64::INFINITY;
    for iter in 1..=options.max_iterations {
        let residuals = residual_norms(&xr, &hx, &values);
        worst = residuals[..count].iter().copied().fold(0.0, f64::max);
        if worst < options.tolerance {
            return Ok(Partial { values: values[..count].to_vec(), residuals: residuals[..count].to_vec(), iterations: iter });
        }
        let cut = values[p - 1];
        let lowest = values[0];
        let filtered = chebyshev_filter(op, &xr, options.degree, lowest, cut, upper);
        let (a, b, c) = rayleigh_ritz(orthonormalize(filtered));
        xr = a;
        hx = b;
        values = c;
    }
    Err(Error::NotConverged { iterations: options.max_iterations, residual: worst })
}

/// Scaled Chebyshev filter damping `[cut, upper]` relative to `lowest`.
fn chebyshev_filter<T: Scalar>(
    op: &dyn Operator<T>,
    x: &DMatrix<T>,
    degree: usize,
    lowest: f64,
    cut: f64,
    upper: f64,
) -> DMatrix<T> {
    let half = (upper - cut) / 2.0;
    let center = (upper + cut) / 2.0;
    if half <= 0.0 {
        return x.clone();
    }
    let mut sigma = half / (lowest - center);
    let tau = 2.0 / sigma;
    let shift = |y: &DMatrix<T>| op.apply_block(y) - y * T::from_real(center);
    let mut prev = x.clone();
    let mut cur = shift(x) * T::from_real(sigma / half);
    for _ in 2..=degree {
        let sigma_next = 1.0 / (tau - sigma);
        let next = shift(&cur) * T::from_real(2.0 * sigma_next / half) - &prev * T::from_real(sigma * sigma_next);
        prev = cur;
        cur = next;
        sigma = sigma_next;
    }
    cur
}

fn block_seed(seed: u64, block: usize) -> u64 {
    seed ^ (block as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

pub fn solve_lowest(op: &MagneticLatticeOperator, count: usize) -> Result<EigenResult> {
    solve_lowest_with(op, count, &SolverOptions::default())
}

pub fn solve_lowest_with(op: &MagneticLatticeOperator, count: usize, options: &SolverOptions) -> Result<EigenResult> {
    let dim = op.dim();
    if count == 0 || count > dim / 4 {
        return Err(Error::TooManyEigenvalues { requested: count, limit: dim / 4 });
    }
    let (values, residuals, iterations, blocks) = match &op.chains {
        Some(chains) => solve_chains(chains, count, options)?,
        None => {
            let part = chfsi::<Complex64>(op, count, options, options.seed)?;
            (part.values, part.residuals, part.iterations, 1)
        }
    };
    Ok(EigenResult {
        k: op.k,
        n: op.n,
        count_requested: count,
        scaling: Scaling::Raw,
        eigenvalues: values.clone(),
        raw: values,
        residuals,
        iterations,
        blocks,
        seed: options.seed,
    }
    .with_scaling(Scaling::InverseK))
}

type Merged = (Vec<f64>, Vec<f64>, usize, usize);

fn solve_chains(chains: &[LandauChain], count: usize, options: &SolverOptions) -> Result<Merged> {
    let g = chains.len();
    let mut per_block: Vec<usize> = chains.iter().map(|c| (count.div_ceil(g) + 2).min(c.len())).collect();
    loop {
        let parts: Vec<Result<Partial>> = chains
            .par_iter()
            .zip(per_block.par_iter())
            .enumerate()
            .map(|(b, (chain, &m))| chfsi::<f64>(chain, m, options, block_seed(options.seed, b)))
            .collect();
        let parts: Vec<Partial> = parts.into_iter().collect::<Result<_>>()?;
        let mut all: Vec<(f64, f64)> = parts
            .iter()
            .flat_map(|p| p.values.iter().copied().zip(p.residuals.iter().copied()))
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        if all.len() < count {
            per_block.iter_mut().zip(chains).for_each(|(m, c)| *m = (*m * 2).min(c.len()));
            continue;
        }
        let threshold = all[count - 1].0;
        let mut grow = false;
        for ((m, chain), part) in per_block.iter_mut().zip(chains).zip(&parts) {
            let top = part.values.last().copied().unwrap_or(f64::NEG_INFINITY);
            if *m < chain.len() && top < threshold {
                *m = (*m * 2).min(chain.len());
                grow = true;
            }
        }
        if !grow {
            all.truncate(count);
            let iterations = parts.iter().map(|p| p.iterations).max().unwrap_or(0);
            return Ok((all.iter().map(|v| v.0).collect(), all.iter().map(|v| v.1).collect(), iterations, g));
        }
    }
}

/// Continuum Landau levels `b (m + 1/2)` with multiplicity `k c`.
pub fn exact_landau_reference(model: &TorusModel, k: u32, m_max: usize) -> Vec<(f64, usize)> {
    (0..=m_max)
        .map(|m| (model.field * (m as f64 + 0.5), k as usize * model.chern as usize))
        .collect()
}
