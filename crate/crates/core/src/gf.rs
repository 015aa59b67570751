//! Exact arithmetic and dense linear algebra over a prime field GF(p).
//!
//! Every matrix carries its modulus, so mixing matrices from different
//! fields is reported as an error instead of silently producing garbage.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SplitRng;

/// Largest prime below 2^16.
pub const DEFAULT_PRIME: u64 = 65521;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not a prime modulus below 2^32")]
    NotPrime(u64),
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("matrix is not unitriangular: {0}")]
    NotUnitriangular(String),
    #[error("row {row} has {len} entries, expected {expected}")]
    RaggedRows { row: usize, len: usize, expected: usize },
}

/// Prime field parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldConfig {
    p: u64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self { p: DEFAULT_PRIME }
    }
}

impl FieldConfig {
    pub fn new(p: u64) -> Result<Self, GfError> {
        if p < 2 || p > u32::MAX as u64 || !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.p), "inverse of zero");
        self.pow(a, self.p - 2)
    }

    pub fn random_element(&self, rng: &mut SplitRng) -> u64 {
        rng.gen_range(0..self.p)
    }

    pub fn random_nonzero(&self, rng: &mut SplitRng) -> u64 {
        rng.gen_range(1..self.p)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Dense row-major matrix over GF(p).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: FieldConfig,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldMatrix(GF({}), {}x{}) [", self.field.p, self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

impl FieldMatrix {
    pub fn zeros(field: FieldConfig, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: FieldConfig, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.p;
        }
        m
    }

    /// Builds a matrix from rows, reducing every entry mod p.
    pub fn from_rows<R: AsRef<[u64]>>(field: FieldConfig, rows: &[R]) -> Result<Self, GfError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(GfError::RaggedRows {
                    row: i,
                    len: r.len(),
                    expected: cols,
                });
            }
            data.extend(r.iter().map(|&x| x % field.p));
        }
        Ok(Self {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// A single column vector.
    pub fn column_vector(field: FieldConfig, entries: &[u64]) -> Self {
        Self {
            field,
            rows: entries.len(),
            cols: 1,
            data: entries.iter().map(|&x| x % field.p).collect(),
        }
    }

    pub fn random(field: FieldConfig, rows: usize, cols: usize, rng: &mut SplitRng) -> Self {
        let data = (0..rows * cols).map(|_| field.random_element(rng)).collect();
        Self {
            field,
            rows,
            cols,
            data,
        }
    }

    #[inline]
    pub fn field(&self) -> FieldConfig {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.field.p;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn column_is_zero(&self, c: usize) -> bool {
        (0..self.rows).all(|r| self.get(r, c) == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    fn check_field(&self, other: &Self) -> Result<(), GfError> {
        if self.field != other.field {
            return Err(GfError::ModulusMismatch(self.field.p, other.field.p));
        }
        Ok(())
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &Self) -> Result<Self, GfError> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(GfError::DimensionMismatch {
                op: "hcat",
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(Self {
            field: self.field,
            rows: self.rows,
            cols,
            data,
        })
    }

    /// `[self ; other]` (stacked).
    pub fn vcat(&self, other: &Self) -> Result<Self, GfError> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(GfError::DimensionMismatch {
                op: "vcat",
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Self {
            field: self.field,
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// Submatrix on the given row and column indices, in the order given.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                data.push(self.get(r, c));
            }
        }
        Self {
            field: self.field,
            rows: rows.len(),
            cols: cols.len(),
            data,
        }
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.submatrix(&rows, cols)
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let cols: Vec<usize> = (0..self.cols).collect();
        self.submatrix(rows, &cols)
    }

    pub fn add(&self, other: &Self) -> Result<Self, GfError> {
        self.check_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(GfError::DimensionMismatch {
                op: "add",
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(Self { data, ..self.clone() })
    }

    pub fn scale(&self, k: u64) -> Self {
        let f = self.field;
        let k = k % f.p;
        Self {
            data: self.data.iter().map(|&a| f.mul(a, k)).collect(),
            ..self.clone()
        }
    }

    /// Exact product `self · b`.
    pub fn mul(&self, b: &Self) -> Result<Self, GfError> {
        self.check_field(b)?;
        if self.cols != b.rows {
            return Err(GfError::DimensionMismatch {
                op: "mul",
                left: (self.rows, self.cols),
                right: (b.rows, b.cols),
            });
        }
        let p = self.field.p;
        let mut out = Self::zeros(self.field, self.rows, b.cols);
        for i in 0..self.rows {
            let acc = &mut out.data[i * b.cols..(i + 1) * b.cols];
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for (j, slot) in acc.iter_mut().enumerate() {
                    *slot = (*slot + a * b.data[k * b.cols + j]) % p;
                }
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(piv) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            if piv != row {
                for c in 0..self.cols {
                    self.data.swap(piv * self.cols + c, row * self.cols + c);
                }
            }
            let inv = f.inv(self.get(row, col));
            for c in col..self.cols {
                let v = f.mul(self.get(row, c), inv);
                self.data[row * self.cols + c] = v;
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..self.cols {
                    let v = f.sub(self.get(r, c), f.mul(factor, self.get(row, c)));
                    self.data[r * self.cols + c] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Dimension of the column span.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        // eliminate along the shorter side
        if self.rows > self.cols {
            return self.transpose().rank();
        }
        self.clone().rref_in_place().len()
    }

    /// Columns form a basis of `{x : self · x = 0}`.
    pub fn nullspace_basis(&self) -> Self {
        let mut r = self.clone();
        let pivots = r.rref_in_place();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let f = self.field;
        let mut basis = Self::zeros(self.field, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            basis.set(fc, k, 1);
            for (pr, &pc) in pivots.iter().enumerate() {
                basis.set(pc, k, f.neg(r.get(pr, fc)));
            }
        }
        basis
    }

    /// True iff `v` lies in the column span of `self`.
    pub fn in_colspan(&self, v: &Self) -> Result<bool, GfError> {
        if v.cols != 1 {
            return Err(GfError::DimensionMismatch {
                op: "in_colspan",
                left: (self.rows, self.cols),
                right: (v.rows, v.cols),
            });
        }
        self.colspan_contains(v)
    }

    /// True iff every column of `other` lies in the column span of `self`.
    pub fn colspan_contains(&self, other: &Self) -> Result<bool, GfError> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(GfError::DimensionMismatch {
                op: "colspan_contains",
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        Ok(self.hcat(other)?.rank() == self.rank())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn check_unitriangular(&self) -> Result<(), GfError> {
        if !self.is_square() {
            return Err(GfError::NotUnitriangular(format!(
                "{}x{} is not square",
                self.rows, self.cols
            )));
        }
        for r in 0..self.rows {
            if self.get(r, r) != 1 % self.field.p {
                return Err(GfError::NotUnitriangular(format!("diagonal entry {r} is not 1")));
            }
            for c in 0..r {
                if self.get(r, c) != 0 {
                    return Err(GfError::NotUnitriangular(format!(
                        "nonzero entry below the diagonal at ({r}, {c})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_unitriangular(&self) -> bool {
        self.check_unitriangular().is_ok()
    }

    pub fn is_strictly_upper(&self) -> bool {
        self.is_square() && (0..self.rows).all(|r| (0..=r).all(|c| self.get(r, c) == 0))
    }

    /// Inverse of an upper unitriangular matrix by back-substitution.
    pub fn inv_unitriangular(&self) -> Result<Self, GfError> {
        self.check_unitriangular()?;
        let n = self.rows;
        let f = self.field;
        let mut inv = Self::identity(self.field, n);
        // column j of the inverse: x_j = 1, x_i = -sum_{i<k<=j} u_ik x_k for i < j
        for j in 0..n {
            for i in (0..j).rev() {
                let mut acc = 0;
                for k in i + 1..=j {
                    acc = f.add(acc, f.mul(self.get(i, k), inv.get(k, j)));
                }
                inv.set(i, j, f.neg(acc));
            }
        }
        Ok(inv)
    }
}

/// Uniform random column of the given height.
pub fn random_column(field: FieldConfig, rows: usize, rng: &mut SplitRng) -> FieldMatrix {
    FieldMatrix::random(field, rows, 1, rng)
}
