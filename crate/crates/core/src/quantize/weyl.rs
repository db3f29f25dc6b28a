//! Weyl quantization into the truncated Hermite basis and Wigner
//! de-quantization back to grid symbols.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hermite::{cross_wigner, laguerre_functions, HermiteBasisSpec};
use crate::error::{Error, Result};
use crate::star::grid::{GridSpec, GridSymbol};
use crate::star::poly::PolySymbol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Fixed number of partial sums in the one-axis paths, independent of the thread count.
const CHUNKS: usize = 16;

/// Operator restricted to `span{h_m : m in [0, levels)^d}`, rows and columns
/// indexed by row-major tensor multi-indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorMatrix {
    pub d: usize,
    pub levels: usize,
    pub entries: DMatrix<Complex64>,
    pub hermitian: bool,
}

/// Block comparison on the top-left `block x block` corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockComparison {
    pub block: usize,
    pub error: f64,
}

impl OperatorMatrix {
    pub fn new(d: usize, levels: usize, entries: DMatrix<Complex64>, hermitian: bool) -> Result<Self> {
        let size = levels.pow(d as u32);
        if entries.nrows() != size || entries.ncols() != size {
            return Err(Error::DimensionMismatch { expected: size, got: entries.nrows() });
        }
        if entries.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidBasis("non-finite operator entry".into()));
        }
        let op = OperatorMatrix { d, levels, entries, hermitian };
        if hermitian {
            let scale = op.entries.iter().fold(1.0f64, |m, z| m.max(z.norm()));
            let defect = op.hermitian_defect();
            if defect > 1e-8 * scale {
                return Err(Error::InvalidBasis(format!("hermitian flag set but defect is {defect:e}")));
            }
        }
        Ok(op)
    }

    pub fn identity(d: usize, levels: usize) -> Self {
        let size = levels.pow(d as u32);
        OperatorMatrix { d, levels, entries: DMatrix::identity(size, size), hermitian: true }
    }

    pub fn from_diagonal(d: usize, levels: usize, diag: &[Complex64]) -> Result<Self> {
        let size = levels.pow(d as u32);
        if diag.len() != size {
            return Err(Error::DimensionMismatch { expected: size, got: diag.len() });
        }
        let hermitian = diag.iter().all(|z| z.im == 0.0);
        let entries = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag));
        OperatorMatrix::new(d, levels, entries, hermitian)
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn hermitian_defect(&self) -> f64 {
        let n = self.size();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..=i {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn compose(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_compatible(other)?;
        Ok(OperatorMatrix { d: self.d, levels: self.levels, entries: &self.entries * &other.entries, hermitian: false })
    }

    pub fn add(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        self.check_compatible(other)?;
        Ok(OperatorMatrix {
            d: self.d,
            levels: self.levels,
            entries: &self.entries + &other.entries,
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn scale(&self, c: Complex64) -> OperatorMatrix {
        OperatorMatrix { d: self.d, levels: self.levels, entries: &self.entries * c, hermitian: self.hermitian && c.im == 0.0 }
    }

    /// Max-entry distance to `other` on the top-left `block x block` corner.
    pub fn block_distance(&self, other: &DMatrix<Complex64>, block: usize) -> BlockComparison {
        let k = block.min(self.size()).min(other.nrows()).min(other.ncols());
        let mut error: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                error = error.max((self.entries[(i, j)] - other[(i, j)]).norm());
            }
        }
        BlockComparison { block: k, error }
    }

    fn check_compatible(&self, other: &OperatorMatrix) -> Result<()> {
        if self.d != other.d || self.levels != other.levels {
            return Err(Error::DimensionMismatch { expected: self.size(), got: other.size() });
        }
        Ok(())
    }
}

/// Symbols with a Weyl quantization in the truncated Hermite basis.
pub trait Quantize {
    fn quantize(&self, spec: &HermiteBasisSpec) -> Result<OperatorMatrix>;
}

pub fn weyl_quantize<S: Quantize + ?Sized>(a: &S, spec: &HermiteBasisSpec) -> Result<OperatorMatrix> {
    a.quantize(spec)
}

impl Quantize for GridSymbol {
    fn quantize(&self, spec: &HermiteBasisSpec) -> Result<OperatorMatrix> {
        spec.validate()?;
        check_grid(self.spec(), spec)?;
        let entries = if spec.d == 1 { quantize_grid_1d(self, spec) } else { quantize_grid_tensor(self, spec) };
        let hermitian = self.values().iter().all(|z| z.im == 0.0);
        OperatorMatrix::new(spec.d, spec.levels, entries, hermitian)
    }
}

impl Quantize for PolySymbol {
    fn quantize(&self, spec: &HermiteBasisSpec) -> Result<OperatorMatrix> {
        spec.validate()?;
        if self.dim() != 2 * spec.d {
            return Err(Error::DimensionMismatch { expected: 2 * spec.d, got: self.dim() });
        }
        let entries = quantize_poly(self, spec.d, spec.levels);
        OperatorMatrix::new(spec.d, spec.levels, entries, self.is_real())
    }
}

fn check_grid(grid: &GridSpec, spec: &HermiteBasisSpec) -> Result<()> {
    let expected = spec.grid();
    if grid.dim != expected.dim {
        return Err(Error::DimensionMismatch { expected: expected.dim, got: grid.dim });
    }
    if grid.points != expected.points || grid.halfwidth != expected.halfwidth {
        return Err(Error::InvalidGrid(format!(
            "grid ({} points, halfwidth {}) does not match basis grid ({} points, halfwidth {})",
            grid.points, grid.halfwidth, expected.points, expected.halfwidth
        )));
    }
    Ok(())
}

fn chunk_ranges(total: usize) -> Vec<(usize, usize)> {
    let size = total.div_ceil(CHUNKS).max(1);
    (0..total).step_by(size).map(|s| (s, (s + size).min(total))).collect()
}

/// Points of an `M x M` axis grid grouped into orbits of the dihedral
/// symmetry group; all points of an orbit share the same radius.
struct Orbits {
    radius2: Vec<f64>,
    members: Vec<Vec<usize>>,
}

fn orbits(m: usize, axis: &[f64]) -> Orbits {
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut out = Orbits { radius2: Vec::new(), members: Vec::new() };
    for i in 0..m {
        for j in 0..m {
            let (u, v) = ((2 * i).abs_diff(m - 1), (2 * j).abs_diff(m - 1));
            let key = (u.min(v), u.max(v));
            let o = *index.entry(key).or_insert_with(|| {
                out.radius2.push(axis[i] * axis[i] + axis[j] * axis[j]);
                out.members.push(Vec::new());
                out.radius2.len() - 1
            });
            out.members[o].push(i * m + j);
        }
    }
    out
}

fn unit_phase(s: f64, v: f64) -> Complex64 {
    let r = (s * s + v * v).sqrt();
    if r > 0.0 {
        Complex64::new(s / r, v / r)
    } else {
        Complex64::new(1.0, 0.0)
    }
}

fn quantize_grid_1d(a: &GridSymbol, spec: &HermiteBasisSpec) -> DMatrix<Complex64> {
    let n = spec.levels;
    let grid = spec.grid();
    let axis = grid.axis();
    let m = grid.points;
    let weight = grid.spacing() * grid.spacing() / PI;
    let values = a.values();
    let orb = orbits(m, &axis);
    let partials: Vec<Vec<Complex64>> = chunk_ranges(orb.members.len())
        .into_par_iter()
        .map(|(start, end)| {
            let mut acc = vec![ZERO; n * n];
            let mut lower = vec![ZERO; n];
            let mut upper = vec![ZERO; n];
            let mut scratch = vec![0.0; n];
            for o in start..end {
                lower.iter_mut().chain(upper.iter_mut()).for_each(|z| *z = ZERO);
                let mut any = false;
                for &p in &orb.members[o] {
                    let v = values[p];
                    if v == ZERO {
                        continue;
                    }
                    any = true;
                    let unit = unit_phase(axis[p / m], axis[p % m]);
                    let mut phase = Complex64::new(1.0, 0.0);
                    for k in 0..n {
                        lower[k] += v * phase;
                        upper[k] += v * phase.conj();
                        phase *= unit;
                    }
                }
                if !any {
                    continue;
                }
                let x = 2.0 * orb.radius2[o];
                for k in 0..n {
                    laguerre_functions(k, x, n - k, &mut scratch);
                    let (lo, up) = (lower[k] * weight, upper[k] * weight);
                    for j in 0..n - k {
                        let l = if j % 2 == 0 { scratch[j] } else { -scratch[j] };
                        acc[(j + k) * n + j] += lo * l;
                        if k > 0 {
                            acc[j * n + j + k] += up * l;
                        }
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = vec![ZERO; n * n];
    for p in partials {
        for (t, x) in total.iter_mut().zip(p) {
            *t += x;
        }
    }
    DMatrix::from_row_slice(n, n, &total)
}

/// `table[q * M^2 + x] = W_{mn}(s_i, varsigma_j)` with `q = m N + n`, `x = i M + j`.
fn wigner_table(spec: &HermiteBasisSpec) -> Vec<Complex64> {
    let n = spec.levels;
    let axis = spec.grid().axis();
    let m = axis.len();
    let mut table = vec![ZERO; n * n * m * m];
    let mut w = vec![ZERO; n * n];
    let mut scratch = vec![0.0; n];
    for i in 0..m {
        for j in 0..m {
            cross_wigner(n, axis[i], axis[j], &mut scratch, &mut w);
            let x = i * m + j;
            for q in 0..n * n {
                table[q * m * m + x] = w[q];
            }
        }
    }
    table
}

/// Flat grid index (s_1..s_d, varsigma_1..varsigma_d) of a pair-major index (x_1..x_d).
fn pair_major_to_grid(d: usize, m: usize) -> Vec<usize> {
    let total = m.pow(2 * d as u32);
    let mut map = vec![0; total];
    let mut idx = vec![0usize; 2 * d];
    for (p, slot) in map.iter_mut().enumerate() {
        let mut rest = p;
        for j in (0..d).rev() {
            let x = rest % (m * m);
            rest /= m * m;
            idx[j] = x / m;
            idx[d + j] = x % m;
        }
        *slot = idx.iter().fold(0, |acc, &i| acc * m + i);
    }
    map
}

/// Row or column index of the operator matrix from per-axis level indices.
fn pairs_to_matrix(d: usize, n: usize, q: usize) -> (usize, usize) {
    let mut rest = q;
    let (mut row, mut col, mut scale) = (0, 0, 1);
    for _ in 0..d {
        let pair = rest % (n * n);
        rest /= n * n;
        row += (pair / n) * scale;
        col += (pair % n) * scale;
        scale *= n;
    }
    (row, col)
}

fn quantize_grid_tensor(a: &GridSymbol, spec: &HermiteBasisSpec) -> DMatrix<Complex64> {
    let (d, n) = (spec.d, spec.levels);
    let grid = spec.grid();
    let m = grid.points;
    let (n2, m2) = (n * n, m * m);
    let table = DMatrix::from_column_slice(m2, n2, &wigner_table(spec));
    let map = pair_major_to_grid(d, m);
    let mut t: Vec<Complex64> = map.iter().map(|&g| a.values()[g]).collect();
    let mut outer = 1;
    let mut inner = m2.pow(d as u32 - 1);
    for _ in 0..d {
        let mut next = vec![ZERO; outer * n2 * inner];
        for p in 0..outer {
            let block = DMatrix::from_column_slice(inner, m2, &t[p * m2 * inner..(p + 1) * m2 * inner]);
            let prod = block * &table;
            next[p * n2 * inner..(p + 1) * n2 * inner].copy_from_slice(prod.as_slice());
        }
        t = next;
        outer *= n2;
        inner /= m2;
    }
    let weight = grid.spacing().powi(2 * d as i32);
    let size = n.pow(d as u32);
    let mut out = DMatrix::from_element(size, size, ZERO);
    for (q, v) in t.into_iter().enumerate() {
        let (r, c) = pairs_to_matrix(d, n, q);
        out[(r, c)] = v * weight;
    }
    out
}

fn ladder(size: usize) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let mut x = DMatrix::from_element(size, size, ZERO);
    let mut dd = DMatrix::from_element(size, size, ZERO);
    for m in 0..size.saturating_sub(1) {
        let c = ((m as f64 + 1.0) / 2.0).sqrt();
        x[(m, m + 1)] = Complex64::new(c, 0.0);
        x[(m + 1, m)] = Complex64::new(c, 0.0);
        dd[(m, m + 1)] = Complex64::new(0.0, -c);
        dd[(m + 1, m)] = Complex64::new(0.0, c);
    }
    (x, dd)
}

/// Weyl-symmetrized `X^p D^q` on `size` levels:
/// `p! q! / (p+q)!` times the `t^p u^q` coefficient of `(tX + uD)^{p+q}`.
fn weyl_monomial(p: usize, q: usize, x: &DMatrix<Complex64>, dd: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let size = x.nrows();
    // layer[i] holds the coefficient of t^i u^{deg - i}
    let mut layer: Vec<Option<DMatrix<Complex64>>> = vec![Some(DMatrix::identity(size, size))];
    for deg in 1..=p + q {
        let mut next = vec![None; deg + 1];
        for (i, slot) in next.iter_mut().enumerate() {
            if i > p || deg - i > q {
                continue;
            }
            let mut acc = DMatrix::from_element(size, size, ZERO);
            if let Some(Some(prev)) = i.checked_sub(1).map(|j| &layer[j]) {
                acc += prev * x;
            }
            if let Some(Some(prev)) = layer.get(i) {
                acc += prev * dd;
            }
            *slot = Some(acc);
        }
        layer = next;
    }
    let norm = factorial(p) * factorial(q) / factorial(p + q);
    layer[p].take().unwrap() * Complex64::new(norm, 0.0)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn quantize_poly(a: &PolySymbol, d: usize, n: usize) -> DMatrix<Complex64> {
    let size = n.pow(d as u32);
    let mut out = DMatrix::from_element(size, size, ZERO);
    let deg = a.degree().unwrap_or(0) as usize;
    let big = n + deg + 1;
    let (x, dd) = ladder(big);
    let mut cache: HashMap<(u32, u32), DMatrix<Complex64>> = HashMap::new();
    for (alpha, &c) in a.terms() {
        let e = alpha.entries();
        let mut term = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        for j in 0..d {
            let key = (e[j], e[d + j]);
            let factor = cache
                .entry(key)
                .or_insert_with(|| weyl_monomial(key.0 as usize, key.1 as usize, &x, &dd).view((0, 0), (n, n)).into_owned());
            term = term.kronecker(factor);
        }
        out += term * c;
    }
    out
}

/// Inverse of [`weyl_quantize`]: `sigma(xi) = (2 pi)^d sum_{mn} A_mn conj(W_mn(xi))`,
/// with entries weighted by the taper of `spec`.
pub fn wigner_symbol(op: &OperatorMatrix, spec: &HermiteBasisSpec) -> Result<GridSymbol> {
    spec.validate()?;
    if op.d != spec.d || op.levels != spec.levels {
        return Err(Error::DimensionMismatch { expected: spec.size(), got: op.size() });
    }
    let taper = spec.taper();
    let values = if spec.d == 1 { dequantize_1d(op, spec, &taper) } else { dequantize_tensor(op, spec, &taper) };
    GridSymbol::new(spec.grid(), values)
}

fn dequantize_1d(op: &OperatorMatrix, spec: &HermiteBasisSpec, taper: &[f64]) -> Vec<Complex64> {
    let n = spec.levels;
    let grid = spec.grid();
    let axis = grid.axis();
    let m = grid.points;
    let mut weighted = op.entries.clone();
    for i in 0..n {
        for j in 0..n {
            weighted[(i, j)] *= 2.0 * taper[i] * taper[j];
        }
    }
    let active: Vec<usize> = (0..n)
        .filter(|&k| (0..n - k).any(|j| weighted[(j + k, j)] != ZERO || weighted[(j, j + k)] != ZERO))
        .collect();
    let orb = orbits(m, &axis);
    let parts: Vec<Vec<(usize, Complex64)>> = chunk_ranges(orb.members.len())
        .into_par_iter()
        .map(|(start, end)| {
            let mut scratch = vec![0.0; n];
            let mut lower = vec![ZERO; n];
            let mut upper = vec![ZERO; n];
            let mut out = Vec::new();
            for o in start..end {
                let x = 2.0 * orb.radius2[o];
                for &k in &active {
                    laguerre_functions(k, x, n - k, &mut scratch);
                    let (mut lo, mut up) = (ZERO, ZERO);
                    for j in 0..n - k {
                        let l = if j % 2 == 0 { scratch[j] } else { -scratch[j] };
                        lo += weighted[(j + k, j)] * l;
                        if k > 0 {
                            up += weighted[(j, j + k)] * l;
                        }
                    }
                    lower[k] = lo;
                    upper[k] = up;
                }
                for &p in &orb.members[o] {
                    let unit = unit_phase(axis[p / m], axis[p % m]);
                    let mut acc = ZERO;
                    let mut phase = Complex64::new(1.0, 0.0);
                    let mut last = 0;
                    for &k in &active {
                        while last < k {
                            phase *= unit;
                            last += 1;
                        }
                        acc += lower[k] * phase.conj() + upper[k] * phase;
                    }
                    out.push((p, acc));
                }
            }
            out
        })
        .collect();
    let mut values = vec![ZERO; m * m];
    for (p, v) in parts.into_iter().flatten() {
        values[p] = v;
    }
    values
}

fn dequantize_tensor(op: &OperatorMatrix, spec: &HermiteBasisSpec, taper: &[f64]) -> Vec<Complex64> {
    let (d, n) = (spec.d, spec.levels);
    let m = spec.grid().points;
    let (n2, m2) = (n * n, m * m);
    let table = wigner_table(spec);
    let mut conj_t = vec![ZERO; n2 * m2];
    for q in 0..n2 {
        for x in 0..m2 {
            conj_t[x * n2 + q] = table[q * m2 + x].conj();
        }
    }
    let conj_t = DMatrix::from_column_slice(n2, m2, &conj_t);
    let scale = (2.0 * PI).powi(d as i32);
    let mut t = vec![ZERO; n2.pow(d as u32)];
    for (q, slot) in t.iter_mut().enumerate() {
        let (r, c) = pairs_to_matrix(d, n, q);
        let mut w = scale;
        let (mut rr, mut cc) = (r, c);
        for _ in 0..d {
            w *= taper[rr % n] * taper[cc % n];
            rr /= n;
            cc /= n;
        }
        *slot = op.entries[(r, c)] * w;
    }
    let mut outer = 1;
    let mut inner = n2.pow(d as u32 - 1);
    for _ in 0..d {
        let mut next = vec![ZERO; outer * m2 * inner];
        for p in 0..outer {
            let block = DMatrix::from_column_slice(inner, n2, &t[p * n2 * inner..(p + 1) * n2 * inner]);
            let prod = block * &conj_t;
            next[p * m2 * inner..(p + 1) * m2 * inner].copy_from_slice(prod.as_slice());
        }
        t = next;
        outer *= m2;
        inner /= n2;
    }
    let map = pair_major_to_grid(d, m);
    let mut out = vec![ZERO; t.len()];
    for (p, v) in t.into_iter().enumerate() {
        out[map[p]] = v;
    }
    out
}

/// Grid Weyl product `wigner_symbol(Q(a) Q(b))`.
pub fn weyl_product_grid(a: &GridSymbol, b: &GridSymbol, spec: &HermiteBasisSpec) -> Result<GridSymbol> {
    let qa = weyl_quantize(a, spec)?;
    let qb = weyl_quantize(b, spec)?;
    wigner_symbol(&qa.compose(&qb)?, spec)
}
