//! Bilinear forms on the fiber and the Williamson normal form of a
//! (metric, symplectic form) pair.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;

/// Antisymmetric bilinear form `A` on `R^n`; `A_{jk} = A(e_j, e_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntisymmetricForm {
    entries: DMatrix<f64>,
}

impl AntisymmetricForm {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || entries.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n.max(1), got: entries.ncols() });
        }
        let scale = entries.amax().max(1.0);
        let defect = (&entries + entries.transpose()).amax();
        if defect > SYMMETRY_TOL * scale {
            return Err(Error::NotAntisymmetric(defect));
        }
        Ok(AntisymmetricForm { entries })
    }

    pub fn zero(n: usize) -> Self {
        AntisymmetricForm { entries: DMatrix::zeros(n, n) }
    }

    /// Form on `R^n` with a single independent entry `A_{jk} = value`.
    pub fn elementary(n: usize, j: usize, k: usize, value: f64) -> Self {
        let mut m = DMatrix::zeros(n, n);
        m[(j, k)] = value;
        m[(k, j)] = -value;
        AntisymmetricForm { entries: m }
    }

    /// Standard block form on `R^{2d}` with coordinates `(s_1..s_d, varsigma_1..varsigma_d)`:
    /// `J(e_i, f_j) = delta_ij`, all other pairings zero.
    pub fn standard(d: usize) -> Self {
        let mut m = DMatrix::zeros(2 * d, 2 * d);
        for i in 0..d {
            m[(i, d + i)] = 1.0;
            m[(d + i, i)] = -1.0;
        }
        AntisymmetricForm { entries: m }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries[(j, k)]
    }

    pub fn scaled(&self, t: f64) -> Self {
        AntisymmetricForm { entries: &self.entries * t }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }
}

/// Symmetric positive-definite metric `G` on `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricForm {
    entries: DMatrix<f64>,
}

impl MetricForm {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || entries.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n.max(1), got: entries.ncols() });
        }
        let scale = entries.amax().max(1.0);
        if (&entries - entries.transpose()).amax() > SYMMETRY_TOL * scale {
            return Err(Error::NotPositiveDefinite);
        }
        if entries.clone().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(MetricForm { entries })
    }

    pub fn identity(n: usize) -> Self {
        MetricForm { entries: DMatrix::identity(n, n) }
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        MetricForm::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values)))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

/// Change of coordinates `S` (columns `e_1..e_d, f_1..f_d`) putting a pair
/// `(G, W)` in Williamson normal form:
/// `S^T W S = J` and `S^T G S = diag(1/B, 1/B)`.
///
/// Fiber coordinates are `(s, varsigma) = S^T xi`; in them
/// `xi^T G^{-1} xi / 2 = sum_j B_j (s_j^2 + varsigma_j^2) / 2` and `#_W`
/// becomes the Weyl product `#_J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticFrame {
    matrix: DMatrix<f64>,
    frequencies: Vec<f64>,
}

impl SymplecticFrame {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Williamson eigenvalues `B_1 <= ... <= B_d` attached to the frame.
    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    /// Frame coordinates `S^T xi` of a covector.
    pub fn coordinates(&self, xi: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|c| (0..n).map(|r| self.matrix[(r, c)] * xi[r]).sum()).collect()
    }

    /// Another admissible frame: rotate each `(e_j, f_j)` plane by `angles[j]`.
    pub fn rotated(&self, angles: &[f64]) -> SymplecticFrame {
        let d = self.dim() / 2;
        assert_eq!(angles.len(), d, "one angle per conjugate pair");
        let mut m = self.matrix.clone();
        for (j, &t) in angles.iter().enumerate() {
            let (sn, cs) = t.sin_cos();
            let e = self.matrix.column(j).clone_owned();
            let f = self.matrix.column(d + j).clone_owned();
            m.set_column(j, &(&e * cs + &f * sn));
            m.set_column(d + j, &(&f * cs - &e * sn));
        }
        SymplecticFrame { matrix: m, frequencies: self.frequencies.clone() }
    }

    /// `max |S^T W S - J|` and `max |S^T G S - diag(1/B,1/B)|`.
    pub fn defects(&self, g: &MetricForm, w: &AntisymmetricForm) -> (f64, f64) {
        let d = self.dim() / 2;
        let st = self.matrix.transpose();
        let sw = &st * w.matrix() * &self.matrix;
        let sg = &st * g.matrix() * &self.matrix;
        let j = AntisymmetricForm::standard(d);
        let mut target = DMatrix::zeros(2 * d, 2 * d);
        for (i, &b) in self.frequencies.iter().enumerate() {
            target[(i, i)] = 1.0 / b;
            target[(d + i, d + i)] = 1.0 / b;
        }
        ((sw - j.matrix()).amax(), (sg - target).amax())
    }
}

struct Normalized {
    /// Orthonormal pairs `(u_j, v_j)` for `M = L^{-1} W L^{-T}` with `u^T M v = b`.
    pairs: Vec<(f64, nalgebra::DVector<f64>, nalgebra::DVector<f64>)>,
    l_inv_t: DMatrix<f64>,
}

fn normal_form(g: &MetricForm, w: &AntisymmetricForm) -> Result<Normalized> {
    let n = w.dim();
    if g.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: g.dim() });
    }
    if !n.is_multiple_of(2) {
        return Err(Error::OddDimension(n));
    }
    let chol = g.matrix().clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let l_inv = l.clone().try_inverse().ok_or(Error::NotPositiveDefinite)?;
    let m = &l_inv * w.matrix() * l_inv.transpose();
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let mtm = m.transpose() * &m;
    let eig = SymmetricEigen::new(mtm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut chosen: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(n);
    let mut pairs = Vec::with_capacity(n / 2);
    for &idx in &order {
        if pairs.len() == n / 2 {
            break;
        }
        let mut u = eig.eigenvectors.column(idx).clone_owned();
        for _ in 0..2 {
            for c in &chosen {
                let p = c.dot(&u);
                u -= c * p;
            }
        }
        let norm = u.norm();
        if norm < 0.5 {
            continue;
        }
        u /= norm;
        let mu = &m * &u;
        let b = mu.norm();
        if b <= 1e-10 * scale {
            return Err(Error::SingularForm(b));
        }
        let v = -mu / b;
        chosen.push(u.clone());
        chosen.push(v.clone());
        pairs.push((b, u, v));
    }
    if pairs.len() != n / 2 {
        return Err(Error::SingularForm(0.0));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Normalized { pairs, l_inv_t: l_inv.transpose() })
}

/// Williamson (symplectic) eigenvalues: the `B_j > 0` with `+-i B_j` the
/// eigenvalues of `G^{-1} W`, sorted ascending.
pub fn williamson_eigenvalues(g: &MetricForm, w: &AntisymmetricForm) -> Result<Vec<f64>> {
    Ok(normal_form(g, w)?.pairs.iter().map(|p| p.0).collect())
}

pub fn symplectic_frame(g: &MetricForm, w: &AntisymmetricForm) -> Result<SymplecticFrame> {
    let nf = normal_form(g, w)?;
    let d = nf.pairs.len();
    let mut s = DMatrix::zeros(2 * d, 2 * d);
    for (j, (b, u, v)) in nf.pairs.iter().enumerate() {
        let c = 1.0 / b.sqrt();
        s.set_column(j, &(&nf.l_inv_t * u * c));
        s.set_column(d + j, &(&nf.l_inv_t * v * c));
    }
    Ok(SymplecticFrame { matrix: s, frequencies: nf.pairs.iter().map(|p| p.0).collect() })
}
