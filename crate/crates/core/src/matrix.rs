//! Dense complex matrices stored row-major.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{bail, Result};
use crate::math;

pub type C64 = Complex64;

#[inline]
pub const fn c64(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

/// A dense `rows × cols` complex matrix.
///
/// Entries are finite on construction; arithmetic afterwards follows IEEE
/// semantics.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            bail!(Dimension, "matrix must have at least one row and column, got {rows}x{cols}");
        }
        if data.len() != rows * cols {
            bail!(
                Dimension,
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            );
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            bail!(Contract, "non-finite entry at ({}, {})", pos / cols, pos % cols);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a real matrix from row slices. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |i, j| c64(rows[i][j], 0.0))
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::default(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { c64(1.0, 0.0) } else { C64::default() })
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { C64::default() })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { c64(values[i], 0.0) } else { C64::default() })
    }

    /// Matrix unit `E_ij` of size `n × n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = c64(1.0, 0.0);
        m
    }

    /// Outer product `x y*`.
    pub fn outer(x: &[C64], y: &[C64]) -> Self {
        Self::from_fn(x.len(), y.len(), |i, j| x[i] * y[j].conj())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, |c| c.len());
        Self::from_fn(rows, cols, |i, j| columns[j][i])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[C64]) {
        for (i, v) in values.iter().enumerate() {
            self[(i, j)] = *v;
        }
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn same_shape(&self, other: &Self, op: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            bail!(
                Dimension,
                "{op}: shapes {}x{} and {}x{} differ",
                self.rows,
                self.cols,
                other.rows,
                other.cols
            );
        }
        Ok(())
    }

    fn require_square(&self, op: &str) -> Result<()> {
        if !self.is_square() {
            bail!(Dimension, "{op} needs a square matrix, got {}x{}", self.rows, self.cols);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "add")?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "subtract")?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            bail!(
                Dimension,
                "multiply: {}x{} times {}x{}",
                self.rows,
                self.cols,
                rhs.rows,
                rhs.cols
            );
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Self) -> Self {
        let (n, m, p) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![C64::default(); n * p];
        for i in 0..n {
            let row = &self.data[i * m..(i + 1) * m];
            let dst = &mut out[i * p..(i + 1) * p];
            for (l, a) in row.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let src = &rhs.data[l * p..(l + 1) * p];
                for (d, b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Self { rows: n, cols: p, data: out }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| f(*z)).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn trace(&self) -> Result<C64> {
        self.require_square("trace")?;
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    /// `self − λ I`.
    pub fn shift(&self, lambda: C64) -> Result<Self> {
        self.require_square("shift")?;
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] -= lambda;
        }
        Ok(out)
    }

    /// Kronecker product with the standard block layout: block `(i, j)` of
    /// the result is `self[i, j] · other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    /// Copy of the `rows × cols` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Result<Self> {
        if r0 + rows > self.rows || c0 + cols > self.cols {
            bail!(
                Dimension,
                "block {rows}x{cols} at ({r0}, {c0}) exceeds {}x{}",
                self.rows,
                self.cols
            );
        }
        Ok(Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)]))
    }

    /// Writes `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn embed_block(&mut self, r0: usize, c0: usize, block: &Self) -> Result<()> {
        if r0 + block.rows > self.rows || c0 + block.cols > self.cols {
            bail!(
                Dimension,
                "cannot embed {}x{} block at ({r0}, {c0}) into {}x{}",
                block.rows,
                block.cols,
                self.rows,
                self.cols
            );
        }
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
        Ok(())
    }

    /// Assembles a square block matrix from an `n × n` grid of equally
    /// sized blocks.
    pub fn from_blocks(blocks: &[Vec<ComplexMatrix>]) -> Result<Self> {
        let n = blocks.len();
        let (br, bc) = match blocks.first().and_then(|r| r.first()) {
            Some(b) => (b.rows, b.cols),
            None => bail!(Dimension, "empty block grid"),
        };
        let mut out = Self::zeros(n * br, blocks[0].len() * bc);
        for (i, row) in blocks.iter().enumerate() {
            if row.len() != blocks[0].len() {
                bail!(Dimension, "ragged block grid");
            }
            for (j, b) in row.iter().enumerate() {
                if b.rows != br || b.cols != bc {
                    bail!(Dimension, "block ({i}, {j}) is {}x{}, expected {br}x{bc}", b.rows, b.cols);
                }
                out.embed_block(i * br, j * bc, b)?;
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm of `A − A*`.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        math::sqrt(acc)
    }

    /// Frobenius norm of `A A* − A* A`.
    pub fn normality_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let a_star = self.adjoint();
        (&(self * &a_star) - &(&a_star * self)).frobenius_norm()
    }

    /// Hermitian part `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let a_star = self.adjoint();
        self.zip_with(&a_star, |a, b| (a + b) * 0.5)
    }

    /// `(A − A*) / (2i)`, Hermitian, so that `A = H + iK`.
    pub fn skew_hermitian_part(&self) -> Self {
        let a_star = self.adjoint();
        self.zip_with(&a_star, |a, b| (a - b) * c64(0.0, -0.5))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// Operator forms panic on shape mismatch; use the `try_*`/`matmul`
// methods where shapes come from outside.

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix add")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix subtract")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix multiply: inner dimensions differ");
        self.mul_unchecked(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

/// `Σ conj(x_i) y_i`.
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(x: &[C64]) -> f64 {
    math::sqrt(x.iter().map(|z| z.norm_sqr()).sum())
}

/// Matrix-vector product.
pub fn apply(a: &ComplexMatrix, x: &[C64]) -> Vec<C64> {
    assert_eq!(a.cols(), x.len());
    (0..a.rows())
        .map(|i| (0..a.cols()).map(|j| a[(i, j)] * x[j]).sum())
        .collect()
}

#[cfg(feature = "serde")]
mod serde_impl {
    //! Wire format: `{"rows":k,"cols":m,"re":[[...]],"im":[[...]]}`.
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wire {
        rows: usize,
        cols: usize,
        re: Vec<Vec<f64>>,
        im: Vec<Vec<f64>>,
    }

    impl Serialize for ComplexMatrix {
        fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
            let part = |f: fn(&C64) -> f64| -> Vec<Vec<f64>> {
                (0..self.rows)
                    .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().map(f).collect())
                    .collect()
            };
            Wire { rows: self.rows, cols: self.cols, re: part(|z| z.re), im: part(|z| z.im) }
                .serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for ComplexMatrix {
        fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
            let w = Wire::deserialize(d)?;
            let shape_ok = |part: &Vec<Vec<f64>>| {
                part.len() == w.rows && part.iter().all(|r| r.len() == w.cols)
            };
            if !shape_ok(&w.re) || !shape_ok(&w.im) {
                return Err(D::Error::custom(alloc::format!(
                    "re/im arrays do not match declared shape {}x{}",
                    w.rows,
                    w.cols
                )));
            }
            let data = w
                .re
                .iter()
                .flatten()
                .zip(w.im.iter().flatten())
                .map(|(r, i)| c64(*r, *i))
                .collect();
            ComplexMatrix::new(w.rows, w.cols, data).map_err(D::Error::custom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjoint_conjugates() {
        let a = ComplexMatrix::new(1, 1, vec![c64(0.0, 1.0)]).unwrap();
        assert_eq!(a.adjoint()[(0, 0)], c64(0.0, -1.0));
    }

    #[test]
    fn trace_of_diag() {
        assert_eq!(ComplexMatrix::diag_real(&[1.0, 4.0]).trace().unwrap(), c64(5.0, 0.0));
    }

    #[test]
    fn product_of_counterexample_inputs() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let b = ComplexMatrix::diag_real(&[1.0, 4.0]);
        let expected = ComplexMatrix::from_real_rows(&[&[1.0, 8.0], &[2.0, 16.0]]);
        assert_eq!(a.matmul(&b).unwrap(), expected);
    }

    #[test]
    fn shape_errors() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(crate::Error::Dimension(_))));
        assert!(a.try_add(&ComplexMatrix::zeros(3, 2)).is_err());
        assert!(a.trace().is_err());
        assert!(ComplexMatrix::new(2, 2, vec![C64::default(); 3]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![c64(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn kron_layout() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = ComplexMatrix::from_real_rows(&[&[0.0, 5.0], &[6.0, 7.0]]);
        let k = a.kron(&b);
        assert_eq!((k.rows(), k.cols()), (4, 4));
        assert_eq!(k.block(2, 0, 2, 2).unwrap(), b.scale_real(3.0));
        assert_eq!(k[(1, 3)], c64(14.0, 0.0));
    }

    #[test]
    fn embed_and_extract() {
        let mut m = ComplexMatrix::zeros(3, 3);
        m.embed_block(1, 1, &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(m.block(1, 1, 2, 2).unwrap(), ComplexMatrix::identity(2));
        assert!(m.embed_block(2, 2, &ComplexMatrix::identity(2)).is_err());
    }
}
