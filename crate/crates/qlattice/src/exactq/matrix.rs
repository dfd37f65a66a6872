use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_rational::BigRational;
use rayon::prelude::*;

use super::ring::{Field, Ring};
use super::{ExactError, RationalFunction};

/// Dense row-major matrix over a [`Ring`].
#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Matrix over Q(q).
pub type QMatrix = Matrix<RationalFunction>;

/// Pivot choice for elimination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pivot {
    /// Fewest terms, ties to the lowest row.
    Sparsest,
    /// First nonzero entry in the column.
    First,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    Kernel,
    Inverse,
    Rank,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Solution<T> {
    /// Columns form a basis of the nullspace.
    Kernel(Matrix<T>),
    Inverse(Matrix<T>),
    Rank(usize),
}

const PAR_THRESHOLD: usize = 24;

impl<T: Ring> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn diagonal(d: Vec<T>) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, x) in d.into_iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, ExactError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(ExactError::Dimension("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Ring::is_zero)
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|x| !x.is_zero()).count()
    }

    /// Indices `(i, j)` of nonzero entries in row-major order.
    pub fn nonzeros(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        let c = self.cols;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(move |(k, x)| (k / c, k % c, x))
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self, ExactError> {
        if self.cols != rhs.rows {
            return Err(ExactError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let row_of = |i: usize| -> Vec<T> {
            let mut out = vec![T::zero(); rhs.cols];
            for (k, a) in self.row(i).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in rhs.row(k).iter().enumerate() {
                    if !b.is_zero() {
                        out[j] = out[j].plus(&a.times(b));
                    }
                }
            }
            out
        };
        let data: Vec<T> = if self.rows >= PAR_THRESHOLD {
            (0..self.rows).into_par_iter().flat_map_iter(row_of).collect()
        } else {
            (0..self.rows).flat_map(row_of).collect()
        };
        Ok(Self {
            rows: self.rows,
            cols: rhs.cols,
            data,
        })
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self, ExactError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(ExactError::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.zip_with(rhs, |a, b| {
            if b.is_zero() {
                a.clone()
            } else {
                a.plus(b)
            }
        })
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.zip_with(rhs, |a, b| {
            if b.is_zero() {
                a.clone()
            } else {
                a.minus(b)
            }
        })
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| if x.is_zero() { T::zero() } else { x.times(c) })
    }

    pub fn negated(&self) -> Self {
        self.map(Ring::negated)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for (i, j, a) in self.nonzeros() {
            for (k, l, b) in rhs.nonzeros() {
                out[(i * rhs.rows + k, j * rhs.cols + l)] = a.times(b);
            }
        }
        out
    }

    /// `self * rhs - rhs * self`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.matmul(rhs)?.try_sub(&rhs.matmul(self)?)
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn principal(&self, idx: &[usize]) -> Self {
        self.submatrix(idx, idx)
    }

    pub fn apply(&self, v: &[T]) -> Result<Vec<T>, ExactError> {
        if v.len() != self.cols {
            return Err(ExactError::Dimension(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(T::zero(), |acc, (a, b)| acc.plus(&a.times(b)))
            })
            .collect())
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.rows)
            .map(|i| self.row(i).iter().fold(T::zero(), |acc, x| acc.plus(x)))
            .collect()
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<U: Ring, E>(&self, f: impl Fn(&T) -> Result<U, E>) -> Result<Matrix<U>, E> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }
}

impl<T: Field> Matrix<T> {
    /// Reduced row echelon form in place; returns pivot columns.
    fn rref(&mut self, pivot: Pivot) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let candidates = (r..self.rows).filter(|&i| !self[(i, c)].is_zero());
            let p = match pivot {
                Pivot::First => candidates.min(),
                Pivot::Sparsest => candidates.min_by_key(|&i| (self[(i, c)].weight(), i)),
            };
            let Some(p) = p else { continue };
            self.swap_rows(r, p);
            let inv = self[(r, c)].recip().expect("nonzero pivot");
            for j in c..self.cols {
                if !self[(r, j)].is_zero() {
                    self[(r, j)] = self[(r, j)].times(&inv);
                }
            }
            let prow: Vec<T> = self.row(r).to_vec();
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for j in c..self.cols {
                    if !prow[j].is_zero() {
                        self[(i, j)] = self[(i, j)].minus(&f.times(&prow[j]));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank_with(&self, pivot: Pivot) -> usize {
        self.clone().rref(pivot).len()
    }

    pub fn rank(&self) -> usize {
        self.rank_with(Pivot::Sparsest)
    }

    /// Nullspace basis as the columns of the result (one column per free variable).
    pub fn kernel_with(&self, pivot: Pivot) -> Matrix<T> {
        let mut m = self.clone();
        let pivots = m.rref(pivot);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            out[(f, k)] = T::one();
            for (r, &pc) in pivots.iter().enumerate() {
                out[(pc, k)] = m[(r, f)].negated();
            }
        }
        out
    }

    pub fn kernel(&self) -> Matrix<T> {
        self.kernel_with(Pivot::Sparsest)
    }

    pub fn inverse(&self) -> Result<Matrix<T>, ExactError> {
        if !self.is_square() {
            return Err(ExactError::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                T::one()
            } else {
                T::zero()
            }
        });
        let pivots = aug.rref(Pivot::Sparsest);
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(ExactError::Singular);
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        let rows: Vec<usize> = (0..n).collect();
        Ok(aug.submatrix(&rows, &cols))
    }

    pub fn determinant_nonzero(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }
}

pub fn solve_linear<T: Field>(m: &Matrix<T>, mode: SolveMode) -> Result<Solution<T>, ExactError> {
    Ok(match mode {
        SolveMode::Kernel => Solution::Kernel(m.kernel()),
        SolveMode::Inverse => Solution::Inverse(m.inverse()?),
        SolveMode::Rank => Solution::Rank(m.rank()),
    })
}

impl QMatrix {
    pub fn evaluate(&self, q0: &BigRational) -> Result<Matrix<BigRational>, ExactError> {
        self.try_map(|x| x.evaluate(q0))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

// Operator forms panic on shape mismatch; the `try_*`/`matmul` methods report it.
impl<T: Ring> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.matmul(rhs).expect("matrix product shape")
    }
}

impl<T: Ring> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.try_add(rhs).expect("matrix sum shape")
    }
}

impl<T: Ring> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        self.try_sub(rhs).expect("matrix difference shape")
    }
}
