//! Dense matrices over `K`, with exact elimination.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::cmfield::{ElementRepr, FieldElement, QuadField};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    d: i64,
    data: Vec<FieldElement>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, field: QuadField) -> Self {
        Matrix {
            rows,
            cols,
            d: field.d(),
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(n: usize, field: QuadField) -> Self {
        let mut m = Matrix::zeros(n, n, field);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn scalar(n: usize, c: &FieldElement) -> Self {
        let mut m = Matrix::zeros(n, n, c.field());
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    /// Matrix unit `e_ij` (zero-based indices).
    pub fn unit(n: usize, i: usize, j: usize, field: QuadField) -> Self {
        let mut m = Matrix::zeros(n, n, field);
        m.set(i, j, field.one());
        m
    }

    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Shape("matrix needs at least one row".into()));
        }
        let c = rows[0].len();
        let d = rows[0]
            .first()
            .map(|e| e.d())
            .ok_or_else(|| Error::Shape("matrix needs at least one column".into()))?;
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Shape("ragged matrix rows".into()));
            }
            for e in row {
                if e.d() != d {
                    return Err(Error::Parameter("matrix entries over different fields".into()));
                }
                data.push(e);
            }
        }
        Ok(Matrix { rows: r, cols: c, d, data })
    }

    /// Builds a matrix from integer pairs `(a, b)` meaning `a + b*w`.
    pub fn from_gaussian(rows: &[&[(i64, i64)]], field: QuadField) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&(a, b)| field.gaussian(a, b)).collect())
            .collect();
        Matrix::from_rows(rows).expect("well-formed literal")
    }

    pub fn from_fn(rows: usize, cols: usize, field: QuadField, f: impl Fn(usize, usize) -> FieldElement) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, d: field.d(), data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> QuadField {
        QuadField::new(self.d).expect("validated at construction")
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        debug_assert_eq!(v.d(), self.d);
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(FieldElement::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, self.field(), |i, j| self.get(j, i).clone())
    }

    pub fn conj(&self) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            d: self.d,
            data: self.data.iter().map(FieldElement::conj).collect(),
        }
    }

    /// `m* = conj(m)^t`.
    pub fn adjoint(&self) -> Self {
        self.conj().transpose()
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            d: self.d,
            data: self.data.iter().map(|e| e * c).collect(),
        }
    }

    pub fn trace(&self) -> FieldElement {
        let mut t = self.field().zero();
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    pub fn checked_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.d != other.d {
            return Err(Error::Parameter("matrices over different fields".into()));
        }
        let field = self.field();
        let mut out = Matrix::zeros(self.rows, other.cols, field);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.data[idx] += &(a * b);
                }
            }
        }
        Ok(out)
    }

    fn zip(&self, other: &Matrix, f: impl Fn(&FieldElement, &FieldElement) -> FieldElement) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            d: self.d,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// Row-reduces a copy; returns the reduced matrix, pivot columns and the determinant factor.
    fn eliminate(&self) -> (Matrix, Vec<usize>, FieldElement) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut det = self.field().one();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                det = self.field().zero();
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
                det = -det;
            }
            let pivot = m.get(r, c).clone();
            det *= &pivot;
            let inv = pivot.inv().expect("nonzero pivot");
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = m.get(i, j) - &(&factor * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots, det)
    }

    pub fn rank(&self) -> usize {
        self.eliminate().1.len()
    }

    pub fn det(&self) -> FieldElement {
        assert!(self.is_square(), "determinant of a non-square matrix");
        if self.rows == 0 {
            return self.field().one();
        }
        let (_, pivots, det) = self.eliminate();
        if pivots.len() < self.rows {
            self.field().zero()
        } else {
            det
        }
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let field = self.field();
        let mut aug = Matrix::zeros(n, 2 * n, field);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, field.one());
        }
        let (red, pivots, _) = aug.eliminate();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::MathDomain("singular matrix".into()));
        }
        Ok(Matrix::from_fn(n, n, field, |i, j| red.get(i, n + j).clone()))
    }

    /// Determinant of the principal submatrix on the given (sorted) index set.
    pub fn principal_minor(&self, indices: &[usize]) -> FieldElement {
        let sub = Matrix::from_fn(indices.len(), indices.len(), self.field(), |i, j| {
            self.get(indices[i], indices[j]).clone()
        });
        sub.det()
    }

    /// The `k x k` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, self.field(), |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// `[[a, b], [c, d]]` from four equally sized square blocks.
    pub fn from_blocks(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Matrix {
        let n = a.rows;
        Matrix::from_fn(2 * n, 2 * n, a.field(), |i, j| match (i < n, j < n) {
            (true, true) => a.get(i, j).clone(),
            (true, false) => b.get(i, j - n).clone(),
            (false, true) => c.get(i - n, j).clone(),
            (false, false) => d.get(i - n, j - n).clone(),
        })
    }

    pub fn kronecker(&self, other: &Matrix) -> Matrix {
        Matrix::from_fn(
            self.rows * other.rows,
            self.cols * other.cols,
            self.field(),
            |i, j| self.get(i / other.rows, j / other.cols) * other.get(i % other.rows, j % other.cols),
        )
    }

    /// `self * v` for a column vector.
    pub fn apply(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field().zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn to_repr(&self) -> Vec<Vec<ElementRepr>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(ElementRepr::of).collect())
            .collect()
    }

    pub fn from_repr(rows: Vec<Vec<ElementRepr>>, field: QuadField) -> Result<Matrix> {
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|e| e.into_element(field.d())).collect())
            .collect();
        Matrix::from_rows(rows)
    }
}

impl Mul<&Matrix> for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.checked_mul(rhs).expect("matrix product")
    }
}

impl Mul<Matrix> for Matrix {
    type Output = Matrix;
    fn mul(self, rhs: Matrix) -> Matrix {
        &self * &rhs
    }
}

impl Add<&Matrix> for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub<&Matrix> for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(&-self.field().one())
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmfield::rat;

    #[test]
    fn inverse_round_trip() {
        let k = QuadField::new(2).unwrap();
        let m = Matrix::from_gaussian(&[&[(1, 1), (2, 0), (0, -1)], &[(0, 0), (3, 1), (1, 0)], &[(2, 0), (0, 0), (1, 2)]], k);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Matrix::identity(3, k));
        assert_eq!(&inv * &m, Matrix::identity(3, k));
    }

    #[test]
    fn singular_inverse_fails() {
        let k = QuadField::new(1).unwrap();
        let m = Matrix::from_gaussian(&[&[(1, 0), (2, 0)], &[(2, 0), (4, 0)]], k);
        assert!(matches!(m.inverse(), Err(Error::MathDomain(_))));
        assert!(m.det().is_zero());
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let k = QuadField::new(1).unwrap();
        let m = Matrix::from_gaussian(&[&[(1, 0), (0, 1)], &[(0, -1), (1, 0)]], k);
        // 1*1 - w*(-w) = 1 + w^2 = 0
        assert!(m.det().is_zero());
        let m = Matrix::from_gaussian(&[&[(0, 0), (1, 0), (2, 0)], &[(3, 0), (4, 0), (5, 0)], &[(6, 0), (7, 0), (9, 0)]], k);
        assert_eq!(m.det(), k.int(-3));
    }

    #[test]
    fn kronecker_is_multiplicative() {
        let k = QuadField::new(3).unwrap();
        let a = Matrix::from_gaussian(&[&[(1, 2), (0, 1)], &[(3, 0), (1, -1)]], k);
        let b = Matrix::from_gaussian(&[&[(2, 0), (1, 1)], &[(0, 1), (5, 0)]], k);
        let c = Matrix::from_gaussian(&[&[(1, 0), (1, 0)], &[(0, 0), (1, 0)]], k);
        let dd = Matrix::from_gaussian(&[&[(0, 1), (2, 0)], &[(1, 0), (0, 0)]], k);
        assert_eq!(
            &a.kronecker(&b) * &c.kronecker(&dd),
            (&a * &c).kronecker(&(&b * &dd))
        );
    }

    #[test]
    fn scale_and_trace() {
        let k = QuadField::new(1).unwrap();
        let m = Matrix::identity(3, k).scale(&k.rational(rat(1, 2)));
        assert_eq!(m.trace(), k.rational(rat(3, 2)));
    }
}
