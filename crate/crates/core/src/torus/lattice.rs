use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::model::{PotentialSpec, TorusModel};
use crate::error::{Error, Result};

/// Compressed sparse row storage of a complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsrMatrix {
    pub dim: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl CsrMatrix {
    fn from_rows(rows: Vec<Vec<(usize, Complex64)>>) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, Complex64)> = Vec::with_capacity(row.len());
            for (c, v) in row {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            for (c, v) in merged {
                cols.push(c);
                values.push(v);
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix { dim, row_ptr, cols, values }
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn mul_vec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[p] * x[self.cols[p]];
            }
            *out = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[p])] += self.values[p];
            }
        }
        m
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn gershgorin_radius(&self) -> f64 {
        (0..self.dim)
            .map(|r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(|p| self.values[p].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[p];
                worst = worst.max((self.values[p] - self.get(c, r).conj()).norm());
            }
        }
        worst
    }
}

/// One real cyclic chain of the Landau-gauge Fourier decomposition in `y`:
/// on-site values `diagonal` and uniform coupling `-hop` between cyclic neighbours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandauChain {
    pub diagonal: Vec<f64>,
    pub hop: f64,
}

impl LandauChain {
    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.diagonal.len();
        for i in 0..n {
            y[i] = self.diagonal[i] * x[i];
        }
        if n == 1 {
            y[0] -= 2.0 * self.hop * x[0];
            return;
        }
        for i in 0..n {
            let next = if i + 1 == n { 0 } else { i + 1 };
            y[i] -= self.hop * x[next];
            y[next] -= self.hop * x[i];
        }
    }

    pub fn gershgorin_radius(&self) -> f64 {
        self.diagonal.iter().map(|d| d.abs()).fold(0.0, f64::max) + 2.0 * self.hop.abs()
    }
}

/// Peierls discretization of `Delta_k + k V` on an `N x N` torus lattice
/// in the Landau gauge, sites ordered `i * N + j` (`i` along `x`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MagneticLatticeOperator {
    pub model: TorusModel,
    pub k: u32,
    pub n: usize,
    pub spacing: f64,
    pub flux: f64,
    pub potential: PotentialSpec,
    pub matrix: CsrMatrix,
    /// Present while the matrix is still in the Landau gauge and `V` depends on `x` only.
    pub chains: Option<Vec<LandauChain>>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn build_magnetic_laplacian(
    model: &TorusModel,
    k: u32,
    n: usize,
    potential: Option<&PotentialSpec>,
) -> Result<MagneticLatticeOperator> {
    let kc = k as usize * model.chern as usize;
    if n < 2 || n * n < 20 * kc {
        return Err(Error::LatticeTooCoarse { n2: n * n, required: (20 * kc).max(4) });
    }
    let potential = potential.cloned().unwrap_or_default();
    let a = model.side / n as f64;
    let hop = 1.0 / (2.0 * a * a);
    let kf = k as f64;
    let theta = |i: usize| kf * model.field * a * (i as f64 * a);
    let twist = |j: usize| 2.0 * PI * ((kc * j) % n) as f64 / n as f64;
    let site_v = |i: usize, j: usize| {
        if k == 0 {
            0.0
        } else {
            kf * potential.value(i as f64 * a, j as f64 * a, model.side)
        }
    };
    let idx = |i: usize, j: usize| i * n + j;

    let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::with_capacity(5); n * n];
    for i in 0..n {
        for j in 0..n {
            let r = idx(i, j);
            rows[r].push((r, Complex64::new(4.0 * hop + site_v(i, j), 0.0)));
            let jp = (j + 1) % n;
            let y_phase = Complex64::from_polar(hop, theta(i));
            rows[idx(i, jp)].push((r, -y_phase));
            rows[r].push((idx(i, jp), -y_phase.conj()));
            let ip = (i + 1) % n;
            let x_phase = if ip == 0 { Complex64::from_polar(hop, twist(j)) } else { Complex64::new(hop, 0.0) };
            rows[r].push((idx(ip, j), -x_phase));
            rows[idx(ip, j)].push((r, -x_phase.conj()));
        }
    }
    let matrix = CsrMatrix::from_rows(rows);

    let chains = if potential.depends_only_on_x() || k == 0 {
        Some(landau_chains(model, k, n, &potential))
    } else {
        None
    };

    Ok(MagneticLatticeOperator {
        model: *model,
        k,
        n,
        spacing: a,
        flux: 2.0 * PI * kc as f64 / (n * n) as f64,
        potential,
        matrix,
        chains,
    })
}

/// Fourier transform in `y` splits the Landau-gauge operator into
/// `gcd(N, kc)` cyclic chains; the boundary twist shifts momentum `q` to `q - kc`.
fn landau_chains(model: &TorusModel, k: u32, n: usize, potential: &PotentialSpec) -> Vec<LandauChain> {
    let kc = (k as usize * model.chern as usize) % n;
    let g = gcd(n, kc);
    let orbit = n / g;
    let a = model.side / n as f64;
    let hop = 1.0 / (2.0 * a * a);
    let kf = k as f64;
    (0..g)
        .map(|q0| {
            let mut diagonal = Vec::with_capacity(n * orbit);
            let mut q = q0;
            for _ in 0..orbit {
                for i in 0..n {
                    let theta = kf * model.field * a * a * i as f64 - 2.0 * PI * q as f64 / n as f64;
                    let v = if k == 0 { 0.0 } else { kf * potential.value(i as f64 * a, 0.0, model.side) };
                    diagonal.push(4.0 * hop - 2.0 * hop * theta.cos() + v);
                }
                q = (q + n - kc) % n;
            }
            LandauChain { diagonal, hop }
        })
        .collect()
}

impl MagneticLatticeOperator {
    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    /// Product of `H[from, to]` phases around each counter-clockwise plaquette,
    /// compared with `e^{-i phi}`; returns the largest deviation.
    pub fn plaquette_defect(&self) -> f64 {
        let n = self.n;
        let idx = |i: usize, j: usize| (i % n) * n + (j % n);
        let target = Complex64::from_polar(1.0, -self.flux);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let loop_sites = [idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1), idx(i, j)];
                let mut prod = Complex64::new(1.0, 0.0);
                for w in loop_sites.windows(2) {
                    let h = self.matrix.get(w[0], w[1]);
                    prod *= -h / h.norm();
                }
                worst = worst.max((prod - target).norm());
            }
        }
        worst
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.matrix.hermitian_defect()
    }

    /// Conjugation by the diagonal unitary `e^{i chi}`.
    pub fn gauge_transform(&self, chi: &[f64]) -> Result<MagneticLatticeOperator> {
        if chi.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: chi.len() });
        }
        let mut out = self.clone();
        for r in 0..self.dim() {
            for p in out.matrix.row_ptr[r]..out.matrix.row_ptr[r + 1] {
                let c = out.matrix.cols[p];
                out.matrix.values[p] *= Complex64::from_polar(1.0, chi[r] - chi[c]);
            }
        }
        out.chains = None;
        Ok(out)
    }

    pub fn gershgorin_radius(&self) -> f64 {
        self.matrix.gershgorin_radius()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flux_and_phases() {
        let m = TorusModel::new(1.0, 1).unwrap();
        let op = build_magnetic_laplacian(&m, 3, 12, None).unwrap();
        assert!((op.flux * 144.0 - 2.0 * PI * 3.0).abs() < 1e-12);
        assert!(op.plaquette_defect() < 1e-12);
        assert!(op.hermitian_defect() < 1e-12);
        assert_eq!(op.chains.as_ref().unwrap().len(), 3);
    }

    #[test]
    fn too_coarse() {
        let m = TorusModel::new(1.0, 1).unwrap();
        assert!(matches!(build_magnetic_laplacian(&m, 8, 12, None), Err(Error::LatticeTooCoarse { .. })));
    }

    #[test]
    fn chain_apply_matches_dense() {
        let c = LandauChain { diagonal: vec![1.0, 2.0, 3.0, 4.0], hop: 0.5 };
        let x = [1.0, -1.0, 2.0, 0.5];
        let mut y = [0.0; 4];
        c.mul_vec(&x, &mut y);
        assert!((y[0] - (1.0 - 0.5 * (-1.0 + 0.5))).abs() < 1e-15);
        assert!((y[3] - (2.0 - 0.5 * (2.0 + 1.0))).abs() < 1e-15);
    }
}
