//! Dense complex operators on small qubit registers.
//!
//! Everything here is row-major and sized for registers of at most
//! [`MAX_QUBITS`] qubits; the simulations themselves never go beyond 16
//! dimensions.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Hard cap on register size for operator construction.
pub const MAX_QUBITS: usize = 12;
/// Largest matrix dimension any builder will allocate.
pub const MAX_DIM: usize = 1 << MAX_QUBITS;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = self
                .row(r)
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from rows; panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "matrix rows must be square");
            data.extend_from_slice(row);
        }
        Self { dim, data }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// |v⟩⟨v|
    pub fn outer(v: &[C64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn pauli(axis: Axis) -> Self {
        let (z, o, i) = (ZERO, ONE, C64::i());
        match axis {
            Axis::X => Self::from_rows(&[vec![z, o], vec![o, z]]),
            Axis::Y => Self::from_rows(&[vec![z, -i], vec![i, z]]),
            Axis::Z => Self::from_rows(&[vec![o, z], vec![z, -o]]),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [C64] {
        &mut self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * s).collect() }
    }

    /// self += s * other
    pub fn add_scaled(&mut self, s: C64, other: &Self) {
        assert_eq!(self.dim, other.dim);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// ⟨v|M|v⟩
    pub fn expectation(&self, v: &[C64]) -> C64 {
        let mv = self.apply(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other) - other.matmul(self)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max).sqrt()
    }

    /// Largest entrywise deviation |M - M†|.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm_sqr();
                worst = worst.max(d);
            }
        }
        worst.sqrt()
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.hermiticity_defect() < tol
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .fold(0.0, f64::max)
            .sqrt()
    }

    /// Relabels basis states: `out[perm[i], perm[j]] = self[i, j]`.
    pub fn permute_basis(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[perm[i] * n + perm[j]] = self.data[i * n + j];
            }
        }
        out
    }

    /// Restriction to the listed basis states, in the given order.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        let m = idx.len();
        let mut out = Self::zeros(m);
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                out.data[r * m + c] = self[(i, j)];
            }
        }
        out
    }

    /// Direct sum of square blocks along the diagonal.
    pub fn direct_sum(blocks: &[ComplexMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.dim).sum();
        let mut out = Self::zeros(n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.dim {
                for j in 0..b.dim {
                    out[(off + i, off + j)] = b[(i, j)];
                }
            }
            off += b.dim;
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(mut self, rhs: ComplexMatrix) -> ComplexMatrix {
        self.add_scaled(ONE, &rhs);
        self
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(mut self, rhs: ComplexMatrix) -> ComplexMatrix {
        self.add_scaled(-ONE, &rhs);
        self
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dim = a.dim.checked_mul(b.dim).filter(|&d| d <= MAX_DIM).ok_or(
        Error::DimensionCap { requested: a.dim.saturating_mul(b.dim), cap: MAX_DIM },
    )?;
    let mut out = ComplexMatrix::zeros(dim);
    for ar in 0..a.dim {
        for ac in 0..a.dim {
            let s = a[(ar, ac)];
            if s == ZERO {
                continue;
            }
            for br in 0..b.dim {
                for bc in 0..b.dim {
                    out[(ar * b.dim + br, ac * b.dim + bc)] = s * b[(br, bc)];
                }
            }
        }
    }
    Ok(out)
}

/// `σ^axis` acting on `site` (1-based, site 1 is the leftmost tensor factor)
/// of an `n_qubits` register.
pub fn pauli_on(site: usize, axis: Axis, n_qubits: usize) -> Result<ComplexMatrix> {
    if n_qubits > MAX_QUBITS {
        return Err(Error::DimensionCap { requested: 1usize << n_qubits.min(63), cap: MAX_DIM });
    }
    if site == 0 || site > n_qubits {
        return Err(Error::SiteOutOfRange { site, n_qubits });
    }
    // σ is a signed permutation in the computational basis, so build it directly.
    let dim = 1usize << n_qubits;
    let shift = n_qubits - site;
    let mut out = ComplexMatrix::zeros(dim);
    for col in 0..dim {
        let bit = (col >> shift) & 1;
        let (row, amp) = match axis {
            Axis::X => (col ^ (1 << shift), ONE),
            Axis::Y => (col ^ (1 << shift), if bit == 0 { C64::i() } else { -C64::i() }),
            Axis::Z => (col, if bit == 0 { ONE } else { -ONE }),
        };
        out[(row, col)] = amp;
    }
    Ok(out)
}

/// Product of Paulis on distinct sites, e.g. `σ^x_1 σ^x_2`.
pub fn pauli_string(factors: &[(usize, Axis)], n_qubits: usize) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::identity(1usize << n_qubits.min(MAX_QUBITS));
    for &(site, axis) in factors {
        out = out.matmul(&pauli_on(site, axis, n_qubits)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn single_qubit_z_is_diag() {
        let z = pauli_on(1, Axis::Z, 1).unwrap();
        assert_eq!(z, ComplexMatrix::from_diagonal(&[1.0, -1.0]));
    }

    #[test]
    fn x_on_second_site_is_block_antidiagonal() {
        let x2 = pauli_on(2, Axis::X, 2).unwrap();
        let expected = kron(&ComplexMatrix::identity(2), &ComplexMatrix::pauli(Axis::X)).unwrap();
        assert_eq!(x2, expected);
        assert_eq!(x2[(0, 1)], c(1.0));
        assert_eq!(x2[(2, 3)], c(1.0));
        assert_eq!(x2[(0, 2)], c(0.0));
    }

    #[test]
    fn paulis_square_to_identity() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            for site in 1..=3 {
                let p = pauli_on(site, axis, 3).unwrap();
                assert_eq!(p.matmul(&p), ComplexMatrix::identity(8));
                assert_eq!(p.trace(), c(0.0));
                assert!(p.is_self_adjoint(1e-15));
            }
        }
    }

    #[test]
    fn pauli_on_matches_kron_chain() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let expected = kron(
                &kron(&ComplexMatrix::identity(2), &ComplexMatrix::pauli(axis)).unwrap(),
                &ComplexMatrix::identity(2),
            )
            .unwrap();
            assert_eq!(pauli_on(2, axis, 3).unwrap(), expected);
        }
    }

    #[test]
    fn pauli_on_rejects_bad_site_and_cap() {
        assert!(matches!(pauli_on(0, Axis::X, 2), Err(Error::SiteOutOfRange { .. })));
        assert!(matches!(pauli_on(3, Axis::X, 2), Err(Error::SiteOutOfRange { .. })));
        assert!(matches!(pauli_on(1, Axis::X, 13), Err(Error::DimensionCap { .. })));
    }

    #[test]
    fn kron_basics() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
        let z = ComplexMatrix::pauli(Axis::Z);
        assert_eq!(kron(&z, &z).unwrap(), ComplexMatrix::from_diagonal(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn xx_minus_yy_against_enumeration() {
        // Hand enumeration on |00>,|01>,|10>,|11>:
        // XX|00>=|11>, YY|00>=(i)(i)|11>=-|11>  -> XX-YY couples 00<->11 with 2
        // XX|01>=|10>, YY|01>=(i)(-i)|10>=|10>  -> XX-YY couples 01<->10 with 0
        let x = ComplexMatrix::pauli(Axis::X);
        let y = ComplexMatrix::pauli(Axis::Y);
        let m = kron(&x, &x).unwrap() - kron(&y, &y).unwrap();
        let mut expected = ComplexMatrix::zeros(4);
        expected[(0, 3)] = c(2.0);
        expected[(3, 0)] = c(2.0);
        assert_eq!(m, expected);
    }

    #[test]
    fn kron_rejects_oversize() {
        let big = ComplexMatrix::identity(1 << 7);
        assert!(matches!(kron(&big, &big), Err(Error::DimensionCap { .. })));
    }

    #[test]
    fn permute_and_submatrix() {
        let m = ComplexMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        let p = m.permute_basis(&[2, 0, 1]);
        assert_eq!(p, ComplexMatrix::from_diagonal(&[2.0, 3.0, 1.0]));
        assert_eq!(m.submatrix(&[2, 0]), ComplexMatrix::from_diagonal(&[3.0, 1.0]));
    }
}
