//! Dense matrices over an exact or floating scalar, and fraction-free integer
//! elimination for kernels and ranks.

use std::fmt::Debug;
use std::ops::{Add, Div, Index, IndexMut, Mul, Neg, Sub};

use num::{BigInt, Integer, One, Signed, Zero};

use crate::rational::{to_f64, Q};

/// Field operations needed by [`Matrix`].
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Pivot preference during elimination; zero marks an unusable pivot.
    fn pivot_score(&self) -> f64;

    fn from_rational(q: &Q) -> Self;
}

impl Scalar for Q {
    fn pivot_score(&self) -> f64 {
        // Exact arithmetic: first nonzero entry wins.
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }

    fn from_rational(q: &Q) -> Self {
        q.clone()
    }
}

impl Scalar for f64 {
    fn pivot_score(&self) -> f64 {
        self.abs()
    }

    fn from_rational(q: &Q) -> Self {
        to_f64(q)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
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

    pub fn diagonal(entries: &[T]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, x) in entries.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    /// Builds from row vectors; `None` if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        let n = rows.len();
        Some(Matrix {
            rows: n,
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
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

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn scale(&self, k: &T) -> Self {
        self.map(|x| x.clone() * k.clone())
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Matrix product; `None` on a shape mismatch.
    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        if self.cols != other.rows {
            return None;
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a.clone() * other[(k, j)].clone();
                    let slot = &mut out[(i, j)];
                    *slot = slot.clone() + prod;
                }
            }
        }
        Some(out)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Option<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        Some(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    /// Gauss-Jordan inverse; `None` if singular or not square.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = best_pivot(&a, col)?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = a[(col, j)].clone() / p.clone();
                inv[(col, j)] = inv[(col, j)].clone() / p.clone();
            }
            for i in 0..n {
                if i == col || a[(i, col)].is_zero() {
                    continue;
                }
                let f = a[(i, col)].clone();
                for j in 0..n {
                    let da = f.clone() * a[(col, j)].clone();
                    let di = f.clone() * inv[(col, j)].clone();
                    a[(i, j)] = a[(i, j)].clone() - da;
                    inv[(i, j)] = inv[(i, j)].clone() - di;
                }
            }
        }
        Some(inv)
    }

    /// Determinant by elimination; `None` if not square.
    pub fn determinant(&self) -> Option<T> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let Some(pivot) = best_pivot(&a, col) else {
                return Some(T::zero());
            };
            if pivot != col {
                a.swap_rows(col, pivot);
                det = -det;
            }
            let p = a[(col, col)].clone();
            det = det * p.clone();
            for i in col + 1..n {
                if a[(i, col)].is_zero() {
                    continue;
                }
                let f = a[(i, col)].clone() / p.clone();
                for j in col..n {
                    let d = f.clone() * a[(col, j)].clone();
                    a[(i, j)] = a[(i, j)].clone() - d;
                }
            }
        }
        Some(det)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }
}

fn best_pivot<T: Scalar>(a: &Matrix<T>, col: usize) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for i in col..a.rows {
        let s = a[(i, col)].pivot_score();
        if s > 0.0 && best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| i)
}

impl Matrix<Q> {
    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(to_f64)
    }
}

impl Matrix<f64> {
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "matrix index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "matrix index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

/// Reduced echelon form of an integer matrix computed without fractions.
///
/// Every pivot column is zero outside its pivot row, and every row is divided
/// by the gcd of its entries. Pivots are taken column by column from the left,
/// each from the first eligible row, so the result only depends on the input.
#[derive(Clone, Debug)]
pub struct IntegerEchelon {
    pub ncols: usize,
    /// Nonzero rows, one per pivot, in pivot-column order.
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
}

impl IntegerEchelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Basis of the rational null space: one vector per free column, with a 1
    /// in that column and 0 in the other free columns.
    pub fn kernel_basis(&self) -> Vec<Vec<Q>> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![Q::zero(); self.ncols];
                v[free] = Q::one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    if !row[free].is_zero() {
                        v[p] = -Q::new(row[free].clone(), row[p].clone());
                    }
                }
                v
            })
            .collect()
    }
}

fn normalize_row(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() || g.is_one() {
        return;
    }
    for x in row.iter_mut() {
        *x = &*x / &g;
    }
}

pub fn integer_echelon(mut rows: Vec<Vec<BigInt>>, ncols: usize) -> IntegerEchelon {
    assert!(
        rows.iter().all(|r| r.len() == ncols),
        "ragged integer matrix"
    );
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..ncols {
        let Some(found) = (next..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(next, found);
        if rows[next][col].is_negative() {
            for x in rows[next].iter_mut() {
                *x = -&*x;
            }
        }
        normalize_row(&mut rows[next]);
        let pivot_row = rows[next].clone();
        let p = &pivot_row[col];
        for (i, row) in rows.iter_mut().enumerate() {
            if i == next || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if y.is_zero() {
                    *x = &*x * p;
                } else {
                    *x = &*x * p - &f * y;
                }
            }
            normalize_row(row);
        }
        pivots.push(col);
        next += 1;
    }
    rows.truncate(next);
    IntegerEchelon {
        ncols,
        rows,
        pivots,
    }
}

/// Clears denominators row by row.
pub fn integer_rows(rows: &[Vec<Q>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            row.iter()
                .map(|x| (x * Q::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect()
}

pub fn rank(rows: &[Vec<Q>]) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    integer_echelon(integer_rows(rows), ncols).rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn qm(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn inverse_and_determinant_exact() {
        let m = qm(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.checked_mul(&inv).unwrap(), Matrix::identity(3));
        assert_eq!(m.determinant().unwrap(), int(18));
        assert!(qm(&[&[1, 2], &[2, 4]]).inverse().is_none());
        assert_eq!(qm(&[&[1, 2], &[2, 4]]).determinant().unwrap(), int(0));
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(Matrix::from_rows(vec![vec![int(1)], vec![int(1), int(2)]]).is_none());
    }

    #[test]
    fn echelon_of_theta_relations() {
        // Two identical relations e1 - e2 - e3 = 0.
        let e = integer_echelon(ints(&[&[1, -1, -1], &[1, -1, -1]]), 3);
        assert_eq!(e.rank(), 1);
        let k = e.kernel_basis();
        assert_eq!(
            k,
            vec![vec![int(1), int(1), int(0)], vec![int(1), int(0), int(1)]]
        );
    }

    #[test]
    fn kernel_handles_non_unit_pivots() {
        let e = integer_echelon(ints(&[&[2, 3, 0], &[0, 0, 5]]), 3);
        assert_eq!(e.pivots, vec![0, 2]);
        assert_eq!(e.kernel_basis(), vec![vec![ratio(-3, 2), int(1), int(0)]]);
    }

    #[test]
    fn rank_of_rational_rows() {
        let rows = vec![vec![ratio(1, 2), ratio(1, 3)], vec![ratio(3, 2), int(1)]];
        assert_eq!(rank(&rows), 1);
        assert_eq!(rank(&[]), 0);
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..6, 1usize..7)
            .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-4i64..5, c), r))
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_annihilated(m in small_matrix()) {
            let ncols = m[0].len();
            let rows: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let e = integer_echelon(rows.clone(), ncols);
            let k = e.kernel_basis();
            prop_assert_eq!(k.len() + e.rank(), ncols);
            for v in &k {
                for row in &rows {
                    let s = row.iter().zip(v).fold(Q::zero(), |s, (a, x)| s + Q::from_integer(a.clone()) * x);
                    prop_assert!(s.is_zero());
                }
            }
        }

        #[test]
        fn float_inverse_close(entries in prop::collection::vec(-3i64..4, 9)) {
            let q = Matrix::from_rows(entries.chunks(3).map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap();
            let q = q.checked_add(&Matrix::identity(3).scale(&int(10))).unwrap();
            let f = q.to_f64();
            let prod = f.checked_mul(&f.inverse().unwrap()).unwrap();
            prop_assert!(prod.max_abs_diff(&Matrix::identity(3)) < 1e-12);
        }
    }
}
