use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::elim::{back_substitute, bareiss, integer_rows, kernel_from_echelon};
use super::{format_rational, parse_rational, ExactError, Rational};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "MatrixRepr", try_from = "MatrixRepr")]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<Vec<String>>,
}

impl From<RatMatrix> for MatrixRepr {
    fn from(m: RatMatrix) -> Self {
        MatrixRepr {
            rows: m.rows,
            cols: m.cols,
            data: (0..m.rows)
                .map(|i| m.row(i).iter().map(format_rational).collect())
                .collect(),
        }
    }
}

impl TryFrom<MatrixRepr> for RatMatrix {
    type Error = ExactError;

    fn try_from(r: MatrixRepr) -> Result<Self, ExactError> {
        if r.data.len() != r.rows {
            return Err(ExactError::Ragged {
                row: r.data.len(),
                found: 0,
                expected: r.cols,
            });
        }
        let mut data = Vec::with_capacity(r.rows * r.cols);
        for (i, row) in r.data.iter().enumerate() {
            if row.len() != r.cols {
                return Err(ExactError::Ragged {
                    row: i,
                    found: row.len(),
                    expected: r.cols,
                });
            }
            for text in row {
                data.push(parse_rational(text)?);
            }
        }
        Ok(RatMatrix {
            rows: r.rows,
            cols: r.cols,
            data,
        })
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Rational::one() } else { Rational::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RatMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, ExactError> {
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(ExactError::Ragged {
                    row: i,
                    found: row.len(),
                    expected: cols,
                });
            }
            data.extend(row);
        }
        Ok(RatMatrix {
            rows: nrows,
            cols,
            data,
        })
    }

    /// Integer matrix from nested slices. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix literal");
        Self::from_fn(rows.len(), cols, |i, j| super::rat(rows[i][j]))
    }

    pub fn column(values: Vec<Rational>) -> Self {
        RatMatrix {
            rows: values.len(),
            cols: 1,
            data: values,
        }
    }

    /// The `i`-th standard basis column vector of length `n`.
    pub fn unit_vector(n: usize, i: usize) -> Self {
        Self::from_fn(n, 1, |r, _| if r == i { Rational::one() } else { Rational::zero() })
    }

    /// The matrix with a single 1 at `(i, j)`.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.set(i, j, Rational::one());
        m
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

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn checked_mul(&self, rhs: &RatMatrix) -> Result<RatMatrix, ExactError> {
        if self.cols != rhs.rows {
            return Err(self.shape_error("mat_mul", rhs));
        }
        let mut out = RatMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, rhs: &RatMatrix) -> Result<RatMatrix, ExactError> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn checked_sub(&self, rhs: &RatMatrix) -> Result<RatMatrix, ExactError> {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        rhs: &RatMatrix,
        op: &'static str,
        f: impl Fn(&Rational, &Rational) -> Rational,
    ) -> Result<RatMatrix, ExactError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(self.shape_error(op, rhs));
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub(crate) fn shape_error(&self, op: &'static str, rhs: &RatMatrix) -> ExactError {
        ExactError::Shape {
            op,
            left_rows: self.rows,
            left_cols: self.cols,
            right_rows: rhs.rows,
            right_cols: rhs.cols,
        }
    }

    pub fn scale(&self, factor: &Rational) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn pow(&self, exponent: u32) -> RatMatrix {
        assert!(self.is_square(), "pow of a non-square matrix");
        let mut out = RatMatrix::identity(self.rows);
        for _ in 0..exponent {
            out = &out * self;
        }
        out
    }

    /// Kronecker product: block `(i, j)` is `self[i][j] * rhs`.
    pub fn kron(&self, rhs: &RatMatrix) -> RatMatrix {
        RatMatrix::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |i, j| {
            self.get(i / rhs.rows, j / rhs.cols) * rhs.get(i % rhs.rows, j % rhs.cols)
        })
    }

    /// `self * rhs - rhs * self`.
    pub fn commutator(&self, rhs: &RatMatrix) -> RatMatrix {
        &(self * rhs) - &(rhs * self)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_skew(&self) -> bool {
        self.skew_violations().is_empty() && self.is_square()
    }

    /// Positions `(i, j)` with `i <= j` where `M + M^T` is nonzero.
    pub fn skew_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.rows.min(self.cols) {
            for j in i..self.cols.min(self.rows) {
                if !(self.get(i, j) + self.get(j, i)).is_zero() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Positions `(i, j)` with `i < j` where `M != M^T`.
    pub fn symmetry_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.rows.min(self.cols) {
            for j in i + 1..self.cols.min(self.rows) {
                if self.get(i, j) != self.get(j, i) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Block-diagonal direct sum.
    pub fn block_diag(blocks: &[RatMatrix]) -> RatMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = RatMatrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.paste(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Overwrites the sub-block starting at `(r0, c0)` with `block`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &RatMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> RatMatrix {
        Self::from_fn(rows, cols, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// Embeds a square `k x k` matrix into an `n x n` zero matrix at the given
    /// coordinate list (`coords.len() == k`).
    pub fn embed(&self, n: usize, coords: &[usize]) -> RatMatrix {
        assert!(self.is_square() && coords.len() == self.rows);
        let mut out = RatMatrix::zeros(n, n);
        for (a, &i) in coords.iter().enumerate() {
            for (b, &j) in coords.iter().enumerate() {
                out.set(i, j, self.get(a, b).clone());
            }
        }
        out
    }

    /// Restriction to the given coordinates (inverse of [`embed`](Self::embed)).
    pub fn restrict(&self, coords: &[usize]) -> RatMatrix {
        Self::from_fn(coords.len(), coords.len(), |a, b| self.get(coords[a], coords[b]).clone())
    }

    pub fn vstack(top: &RatMatrix, bottom: &RatMatrix) -> Result<RatMatrix, ExactError> {
        if top.cols != bottom.cols {
            return Err(top.shape_error("vstack", bottom));
        }
        let mut data = top.data.clone();
        data.extend(bottom.data.iter().cloned());
        Ok(RatMatrix {
            rows: top.rows + bottom.rows,
            cols: top.cols,
            data,
        })
    }

    pub fn hstack(parts: &[RatMatrix]) -> Result<RatMatrix, ExactError> {
        let rows = parts.first().map_or(0, |p| p.rows);
        if let Some(bad) = parts.iter().find(|p| p.rows != rows) {
            return Err(parts[0].shape_error("hstack", bad));
        }
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = RatMatrix::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            out.paste(0, c0, p);
            c0 += p.cols;
        }
        Ok(out)
    }

    /// Row-major flattening into a column vector of length `rows * cols`.
    pub fn vectorize(&self) -> RatMatrix {
        RatMatrix::column(self.data.clone())
    }

    pub fn rank(&self) -> usize {
        let rows = integer_rows(self.rows, self.cols, |i, j| self.get(i, j).clone());
        bareiss(rows, self.cols, self.cols).rank()
    }

    /// Basis of the right null space, as column vectors. Empty iff the matrix
    /// is injective.
    pub fn kernel_basis(&self) -> Vec<RatMatrix> {
        let rows = integer_rows(self.rows, self.cols, |i, j| self.get(i, j).clone());
        let e = bareiss(rows, self.cols, self.cols);
        kernel_from_echelon(&e, self.cols)
            .into_iter()
            .map(RatMatrix::column)
            .collect()
    }

    /// Some `X` with `self * X = rhs`, or `None` when a column of `rhs` lies
    /// outside the column space of `self`. Free variables are set to zero.
    pub fn solve_linear(&self, rhs: &RatMatrix) -> Result<Option<RatMatrix>, ExactError> {
        if self.rows != rhs.rows {
            return Err(self.shape_error("solve_linear", rhs));
        }
        let n = self.cols;
        let total = n + rhs.cols;
        let rows = integer_rows(self.rows, total, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - n).clone()
            }
        });
        let e = bareiss(rows, total, n);
        // Rows below the rank of A must vanish on the right-hand side.
        let consistent = e.rows[e.rank()..]
            .iter()
            .all(|row| row[n..].iter().all(Zero::is_zero));
        if !consistent {
            return Ok(None);
        }
        let mut out = RatMatrix::zeros(n, rhs.cols);
        for j in 0..rhs.cols {
            let mut x = vec![Rational::zero(); n];
            back_substitute(&e, &mut x, |k| Rational::from_integer(e.rows[k][n + j].clone()));
            for (i, v) in x.into_iter().enumerate() {
                out.set(i, j, v);
            }
        }
        Ok(Some(out))
    }

    pub fn inverse(&self) -> Result<RatMatrix, ExactError> {
        if !self.is_square() {
            return Err(self.shape_error("inverse", self));
        }
        if self.rank() < self.rows {
            return Err(ExactError::Singular);
        }
        self.solve_linear(&RatMatrix::identity(self.rows))?
            .ok_or(ExactError::Singular)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(super::rational_to_f64).collect())
            .collect()
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatMatrix{}x{} ", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(format_rational).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = cells[i * self.cols..(i + 1) * self.cols]
                .iter()
                .map(|c| format!("{c:>width$}"))
                .collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;

    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        self.checked_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &RatMatrix {
    type Output = RatMatrix;

    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        self.checked_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &RatMatrix {
    type Output = RatMatrix;

    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        self.checked_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl Neg for &RatMatrix {
    type Output = RatMatrix;

    fn neg(self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| -v).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};

    fn shift(n: usize) -> RatMatrix {
        RatMatrix::from_fn(n, n, |i, j| if j == i + 1 { rat(1) } else { rat(0) })
    }

    #[test]
    fn identity_is_neutral() {
        let m = RatMatrix::from_i64(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]);
        assert_eq!(&RatMatrix::identity(3) * &m, m);
    }

    #[test]
    fn shift_squares_to_zero() {
        let h = shift(2);
        assert!((&h * &h).is_zero());
    }

    #[test]
    fn unit_times_shift_vanishes() {
        // (d1 E12) H_2(1): column 2 of E12 meets row 2 of H, which is zero.
        let e12 = RatMatrix::unit(2, 2, 0, 1).scale(&ratio(5, 3));
        assert!((&e12 * &shift(2)).is_zero());
    }

    #[test]
    fn mismatched_product_is_an_error() {
        let a = RatMatrix::zeros(2, 3);
        assert!(matches!(a.checked_mul(&a), Err(ExactError::Shape { .. })));
    }

    #[test]
    fn kernels_of_small_matrices() {
        assert!(RatMatrix::identity(2).kernel_basis().is_empty());
        assert_eq!(shift(2).kernel_basis(), vec![RatMatrix::unit_vector(2, 0)]);
        let b = RatMatrix::block_diag(&[shift(2), shift(2)]);
        assert_eq!(
            b.kernel_basis(),
            vec![RatMatrix::unit_vector(4, 0), RatMatrix::unit_vector(4, 2)]
        );
    }

    #[test]
    fn ranks() {
        assert_eq!(RatMatrix::zeros(4, 4).rank(), 0);
        assert_eq!(shift(3).rank(), 2);
        assert_eq!(RatMatrix::zeros(0, 3).rank(), 0);
    }

    #[test]
    fn solve_identity_and_inconsistent() {
        let m = RatMatrix::from_i64(&[&[1, -2], &[3, 4]]);
        assert_eq!(RatMatrix::identity(2).solve_linear(&m).unwrap(), Some(m.clone()));
        let nonzero = RatMatrix::from_i64(&[&[1], &[0]]);
        assert_eq!(RatMatrix::zeros(2, 2).solve_linear(&nonzero).unwrap(), None);
    }

    #[test]
    fn inverse_of_rational_matrix() {
        let m = RatMatrix::from_fn(3, 3, |i, j| ratio((i * 3 + j * j + 1) as i64, (j + 1) as i64));
        let m = &m + &RatMatrix::identity(3);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, RatMatrix::identity(3));
        assert_eq!(shift(3).inverse(), Err(ExactError::Singular));
    }

    #[test]
    fn serde_round_trip() {
        let m = RatMatrix::from_fn(2, 3, |i, j| ratio(i as i64 - 2 * j as i64, 3));
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.contains("\"-4/3\""));
        let back: RatMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        let ragged = r#"{"rows":2,"cols":2,"data":[["1","2"],["3"]]}"#;
        assert!(serde_json::from_str::<RatMatrix>(ragged).is_err());
    }
}
