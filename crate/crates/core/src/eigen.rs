//! Cyclic Jacobi eigensolver for self-adjoint matrices and the Bohr-frequency
//! bins built from the resulting spectrum.
//!
//! The matrix is first split into the connected components of its nonzero
//! pattern and each block is diagonalised separately, so an operator that is
//! block diagonal in a permuted basis (the pair-parity sectors of the ancilla
//! Hamiltonian) gets eigenvectors supported on exactly one block. The sector
//! cancellation in [`crate::master`] relies on this.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

/// Default clustering threshold for Bohr frequencies, rad/ns.
pub const DEFAULT_GAP_TOL: f64 = 1e-8;

const HERMITIAN_TOL: f64 = 1e-10;
const OFF_DIAGONAL_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 60;

/// A cluster of ordered eigenvalue pairs sharing one Bohr frequency.
#[derive(Clone, Debug, PartialEq)]
pub struct GapBin {
    /// Representative frequency; exactly 0 for the zero bin.
    pub omega: f64,
    /// Ordered pairs `(a, b)` with `E_b - E_a` inside this bin.
    pub pairs: Vec<(usize, usize)>,
}

/// Nonzero pattern of a real matrix, by row and by column.
#[derive(Clone, Debug)]
struct Sparse {
    rows: Vec<Vec<(usize, f64)>>,
    cols: Vec<Vec<(usize, f64)>>,
}

impl Sparse {
    fn from_dense(v: &[f64], n: usize) -> Self {
        let mut rows = vec![Vec::new(); n];
        let mut cols = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                let x = v[i * n + j];
                if x != 0.0 {
                    rows[i].push((j, x));
                    cols[j].push((i, x));
                }
            }
        }
        Self { rows, cols }
    }
}

#[derive(Clone, Debug)]
pub struct EigenSystem {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Column eigenvectors.
    pub vectors: ComplexMatrix,
    omegas: Vec<f64>,
    /// Bin index of the ordered pair `(a, b)`, stored at `a * dim + b`.
    pair_bin: Vec<usize>,
    zero_bin: usize,
    real_vectors: Option<Sparse>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.dim()).map(|i| self.vectors[(i, k)]).collect()
    }

    pub fn is_real(&self) -> bool {
        self.real_vectors.is_some()
    }

    /// Representative frequency of every bin, ascending.
    pub fn bin_omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// Bin index of the gap `E_b - E_a`.
    pub fn bin_of(&self, a: usize, b: usize) -> usize {
        self.pair_bin[a * self.dim() + b]
    }

    /// Index of the ω = 0 bin.
    pub fn zero_bin(&self) -> usize {
        self.zero_bin
    }

    /// Bins with their member pairs in lexicographic order.
    pub fn bins(&self) -> Vec<GapBin> {
        let mut bins: Vec<GapBin> =
            self.omegas.iter().map(|&omega| GapBin { omega, pairs: Vec::new() }).collect();
        let n = self.dim();
        for a in 0..n {
            for b in 0..n {
                bins[self.bin_of(a, b)].pairs.push((a, b));
            }
        }
        bins
    }

    /// `V† M V`.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        match &self.real_vectors {
            Some(v) => {
                let n = m.dim();
                let src = m.as_slice();
                // tmp = M V, then out = Vᵀ tmp
                let mut tmp = vec![C64::new(0.0, 0.0); n * n];
                for i in 0..n {
                    let row = &mut tmp[i * n..(i + 1) * n];
                    for k in 0..n {
                        let a = src[i * n + k];
                        if a.re == 0.0 && a.im == 0.0 {
                            continue;
                        }
                        for &(j, x) in &v.rows[k] {
                            row[j] += a * x;
                        }
                    }
                }
                let mut out = ComplexMatrix::zeros(n);
                for k in 0..n {
                    let src_row = &tmp[k * n..(k + 1) * n];
                    for &(i, x) in &v.rows[k] {
                        let dst = out.row_mut(i);
                        for j in 0..n {
                            dst[j] += src_row[j] * x;
                        }
                    }
                }
                out
            }
            None => self.vectors.adjoint().matmul(&m.matmul(&self.vectors)),
        }
    }

    /// `V M V†`.
    pub fn from_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        match &self.real_vectors {
            Some(v) => {
                let n = m.dim();
                let src = m.as_slice();
                // tmp = M Vᵀ, then out = V tmp
                let mut tmp = vec![C64::new(0.0, 0.0); n * n];
                for i in 0..n {
                    let row = &mut tmp[i * n..(i + 1) * n];
                    for k in 0..n {
                        let a = src[i * n + k];
                        if a.re == 0.0 && a.im == 0.0 {
                            continue;
                        }
                        for &(j, x) in &v.cols[k] {
                            row[j] += a * x;
                        }
                    }
                }
                let mut out = ComplexMatrix::zeros(n);
                for i in 0..n {
                    let dst = out.row_mut(i);
                    for &(k, x) in &v.rows[i] {
                        let src_row = &tmp[k * n..(k + 1) * n];
                        for j in 0..n {
                            dst[j] += src_row[j] * x;
                        }
                    }
                }
                out
            }
            None => self.vectors.matmul(&m.matmul(&self.vectors.adjoint())),
        }
    }

    /// Spectral projector onto the eigenspace cluster containing index `k`,
    /// using `tol` to decide degeneracy.
    pub fn projector(&self, k: usize, tol: f64) -> ComplexMatrix {
        let e = self.values[k];
        let mut p = ComplexMatrix::zeros(self.dim());
        for j in 0..self.dim() {
            if (self.values[j] - e).abs() <= tol {
                p = p + ComplexMatrix::outer(&self.vector(j));
            }
        }
        p
    }

    /// Spacing between the two lowest eigenvalues.
    pub fn ground_gap(&self) -> f64 {
        if self.values.len() < 2 {
            f64::INFINITY
        } else {
            self.values[1] - self.values[0]
        }
    }
}

/// Full eigendecomposition of a self-adjoint matrix plus gap bins clustered
/// with single linkage at `gap_tol`.
pub fn hermitian_eigensystem(m: &ComplexMatrix, gap_tol: f64) -> Result<EigenSystem> {
    if !(gap_tol > 0.0 && gap_tol.is_finite()) {
        return Err(Error::InvalidGapTolerance(gap_tol));
    }
    let defect = m.hermiticity_defect();
    if !(defect < HERMITIAN_TOL) {
        return Err(Error::NotSelfAdjoint { defect });
    }
    let n = m.dim();
    let scale = m.frobenius_norm();
    let real = m.is_real();
    // (value, first index of block, block number, column within block)
    let mut keys: Vec<(f64, usize, usize, usize)> = Vec::with_capacity(n);
    let blocks = connected_blocks(m);
    let mut solved: Vec<(Vec<f64>, ComplexMatrix)> = Vec::with_capacity(blocks.len());
    for (bi, block) in blocks.iter().enumerate() {
        let sub = m.submatrix(block);
        let (vals, vecs) = if block.len() == 1 {
            (vec![sub[(0, 0)].re], ComplexMatrix::identity(1))
        } else if real {
            jacobi_real(&sub, scale)?
        } else {
            jacobi_complex(&sub, scale)?
        };
        for (col, &val) in vals.iter().enumerate() {
            keys.push((val, block[0], bi, col));
        }
        solved.push((vals, vecs));
    }
    // Ties between blocks are ordered by the block's first basis index.
    keys.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.3.cmp(&b.3)));
    let values: Vec<f64> = keys.iter().map(|k| k.0).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &(_, _, bi, bcol)) in keys.iter().enumerate() {
        let vecs = &solved[bi].1;
        for (r, &idx) in blocks[bi].iter().enumerate() {
            vectors[(idx, col)] = vecs[(r, bcol)];
        }
    }
    let real_vectors = real.then(|| {
        let dense: Vec<f64> = vectors.as_slice().iter().map(|z| z.re).collect();
        Sparse::from_dense(&dense, n)
    });
    let (omegas, pair_bin, zero_bin) = gap_bins(&values, gap_tol);
    Ok(EigenSystem { values, vectors, omegas, pair_bin, zero_bin, real_vectors })
}

fn off_norm_real(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}

fn jacobi_real(m: &ComplexMatrix, scale: f64) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = m.dim();
    let mut a: Vec<f64> = m.as_slice().iter().map(|z| z.re).collect();
    // symmetrize away sub-tolerance asymmetry
    for i in 0..n {
        for j in i + 1..n {
            let s = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = s;
            a[j * n + i] = s;
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let target = OFF_DIAGONAL_TOL * scale;
    let mut sweeps = 0;
    loop {
        let off = off_norm_real(&a, n);
        if off <= target || scale == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::EigenNoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let order = ascending_order(&diag);
    let values = order.iter().map(|&k| diag[k]).collect();
    let mut sorted = ComplexMatrix::zeros(n);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            sorted[(i, new)] = C64::new(v[i * n + old], 0.0);
        }
    }
    Ok((values, sorted))
}

fn jacobi_complex(m: &ComplexMatrix, scale: f64) -> Result<(Vec<f64>, ComplexMatrix)> {
    let n = m.dim();
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let s = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            a[(i, j)] = s;
            a[(j, i)] = s.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let target = OFF_DIAGONAL_TOL * scale;
    let mut sweeps = 0;
    loop {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[(i, j)].norm_sqr();
                }
            }
        }
        let off = off.sqrt();
        if off <= target || scale == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::EigenNoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                // Strip the phase, then rotate as in the real case.
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Rotation columns: u_p = (c, -s·conj(phase)), u_q = (s, c·conj(phase)).
                let sp = phase.conj() * s;
                let cp = phase.conj() * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * sp;
                    a[(k, q)] = akp * s + akq * cp;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * sp.conj();
                    a[(q, k)] = apk * s + aqk * cp.conj();
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * sp;
                    v[(k, q)] = vkp * s + vkq * cp;
                }
            }
        }
    }
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let order = ascending_order(&diag);
    let values = order.iter().map(|&k| diag[k]).collect();
    let mut sorted = ComplexMatrix::zeros(n);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            sorted[(i, new)] = v[(i, old)];
        }
    }
    Ok((values, sorted))
}

/// Index sets of the connected components of the nonzero pattern of `m`,
/// each sorted, ordered by smallest index.
fn connected_blocks(m: &ComplexMatrix) -> Vec<Vec<usize>> {
    let n = m.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let zero = C64::new(0.0, 0.0);
            if m[(i, j)] != zero || m[(j, i)] != zero {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[r]].push(i);
    }
    blocks
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    order
}

/// Single-linkage clustering of all ordered-pair gaps `E_b - E_a`. Returns
/// the bin representatives, the bin of each pair and the zero bin.
fn gap_bins(values: &[f64], gap_tol: f64) -> (Vec<f64>, Vec<usize>, usize) {
    let n = values.len();
    let mut gaps: Vec<(f64, usize)> = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            gaps.push((values[b] - values[a], a * n + b));
        }
    }
    gaps.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let mut omegas = Vec::new();
    let mut pair_bin = vec![0; n * n];
    let mut zero_bin = usize::MAX;
    let mut start = 0;
    for i in 1..=gaps.len() {
        if i == gaps.len() || gaps[i].0 - gaps[i - 1].0 > gap_tol {
            let bin = omegas.len();
            for &(_, idx) in &gaps[start..i] {
                pair_bin[idx] = bin;
                if idx / n == idx % n {
                    zero_bin = bin;
                }
            }
            omegas.push(0.5 * (gaps[start].0 + gaps[i - 1].0));
            start = i;
        }
    }
    // Diagonal pairs give an exact 0 gap, so one bin always holds 0.
    omegas[zero_bin] = 0.0;
    (omegas, pair_bin, zero_bin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, Axis};

    fn reconstruct(es: &EigenSystem) -> ComplexMatrix {
        let d = ComplexMatrix::from_diagonal(&es.values);
        es.vectors.matmul(&d.matmul(&es.vectors.adjoint()))
    }

    #[test]
    fn pauli_z_spectrum_and_bins() {
        let es = hermitian_eigensystem(&ComplexMatrix::pauli(Axis::Z), DEFAULT_GAP_TOL).unwrap();
        assert_eq!(es.values, vec![-1.0, 1.0]);
        assert_eq!(es.bin_omegas(), &[-2.0, 0.0, 2.0]);
        assert_eq!(es.bins()[es.zero_bin()].pairs, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn pair_driver_spectrum() {
        // c·XX - YY with c = -1/2: eigenvalues ±(c+1), ±(c-1)
        let x = ComplexMatrix::pauli(Axis::X);
        let y = ComplexMatrix::pauli(Axis::Y);
        let m = kron(&x, &x).unwrap().scale_real(-0.5) - kron(&y, &y).unwrap();
        let es = hermitian_eigensystem(&m, DEFAULT_GAP_TOL).unwrap();
        let expected = [-1.5, -0.5, 0.5, 1.5];
        for (v, e) in es.values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-14, "{v} vs {e}");
        }
    }

    #[test]
    fn complex_hermitian_matrix() {
        let y = ComplexMatrix::pauli(Axis::Y);
        let z = ComplexMatrix::pauli(Axis::Z);
        let m = kron(&y, &z).unwrap() + kron(&z, &y).unwrap().scale_real(0.3)
            + ComplexMatrix::from_diagonal(&[0.1, 0.2, 0.3, 0.4]);
        let es = hermitian_eigensystem(&m, DEFAULT_GAP_TOL).unwrap();
        assert!(!es.is_real());
        assert!(reconstruct(&es).max_abs_diff(&m) < 1e-12);
        let vhv = es.vectors.adjoint().matmul(&es.vectors);
        assert!(vhv.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(
            hermitian_eigensystem(&m, DEFAULT_GAP_TOL),
            Err(Error::NotSelfAdjoint { .. })
        ));
        assert!(matches!(
            hermitian_eigensystem(&ComplexMatrix::identity(2), 0.0),
            Err(Error::InvalidGapTolerance(_))
        ));
    }

    #[test]
    fn degenerate_levels_share_bins() {
        let m = ComplexMatrix::from_diagonal(&[1.0, 1.0, 3.0]);
        let es = hermitian_eigensystem(&m, DEFAULT_GAP_TOL).unwrap();
        // gaps: 0 (x5), +2 (x2), -2 (x2)
        let bins = es.bins();
        assert_eq!(bins.len(), 3);
        assert_eq!(bins[es.zero_bin()].pairs.len(), 5);
        let total: usize = bins.iter().map(|b| b.pairs.len()).sum();
        assert_eq!(total, 9);
    }

    #[test]
    fn block_structure_is_preserved() {
        // Two decoupled 2x2 blocks interleaved on indices {0,2} and {1,3}.
        let m = ComplexMatrix::from_real_rows(&[
            &[1.0, 0.0, 0.7, 0.0],
            &[0.0, -2.0, 0.0, 0.4],
            &[0.7, 0.0, 0.5, 0.0],
            &[0.0, 0.4, 0.0, 3.0],
        ]);
        let es = hermitian_eigensystem(&m, DEFAULT_GAP_TOL).unwrap();
        for k in 0..4 {
            let v = es.vector(k);
            let even = v[0].norm() + v[2].norm();
            let odd = v[1].norm() + v[3].norm();
            assert!(even == 0.0 || odd == 0.0, "vector {k} mixes blocks");
        }
    }
}
