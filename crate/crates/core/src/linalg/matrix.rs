//! Dense exact matrices and the elimination routines built on them.
//!
//! Dimensions in this crate stay at desk scale (a few thousand rows at
//! most), so everything is dense and row-major.

use std::fmt;

use super::scalar::{fused_add_mul, Field, Scalar};
use crate::error::{Error, Result};

pub type Vector = Vec<Scalar>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

/// Outcome of [`Matrix::solve_in_image`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solve {
    /// A preimage `u` with `M u = v`.
    Preimage(Vector),
    /// A functional `y` with `y M = 0` and `y v != 0`.
    NotInImage(Vector),
}

/// Reduced row echelon form together with the pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field,
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from rows, checking shape and field agreement.
    pub fn from_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            for s in row {
                if s.field() != field {
                    return Err(Error::FieldMismatch(field, s.field()));
                }
                data.push(s);
            }
        }
        Ok(Matrix {
            field,
            rows: r,
            cols: c,
            data,
        })
    }

    /// Shape-explicit constructor; allows `0 x n` and `n x 0` matrices.
    pub fn from_rows_shaped(field: Field, rows: usize, cols: usize, entries: Vec<Vec<Scalar>>) -> Result<Matrix> {
        if rows == 0 || cols == 0 {
            if entries.len() != rows || entries.iter().any(|r| !r.is_empty()) {
                return Err(Error::DimensionMismatch(format!(
                    "expected an empty {rows}x{cols} matrix"
                )));
            }
            return Ok(Matrix::zeros(field, rows, cols));
        }
        let m = Matrix::from_rows(field, entries)?;
        if m.rows != rows || m.cols != cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {rows}x{cols}, found {}x{}",
                m.rows, m.cols
            )));
        }
        Ok(m)
    }

    pub fn from_i64(field: Field, rows: &[&[i64]]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Matrix::zeros(field, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, field.from_i64(*v));
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(field: Field, rows: usize, cols: &[Vector]) -> Matrix {
        let mut m = Matrix::zeros(field, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, v) in c.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    /// Checks that every entry carries this matrix's field tag.
    pub fn check_field(&self) -> Result<()> {
        match self.data.iter().find(|s| s.field() != self.field) {
            Some(s) => Err(Error::FieldMismatch(self.field, s.field())),
            None => Ok(()),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &Matrix) -> Result<Matrix> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        if self.field != o.field {
            return Err(Error::FieldMismatch(self.field, o.field));
        }
        let mut out = Matrix::zeros(self.field, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        fused_add_mul(&mut out.data[i * o.cols + j], a, b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, o: &Matrix) -> Result<Matrix> {
        if self.shape() != o.shape() {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        if self.field != o.field {
            return Err(Error::FieldMismatch(self.field, o.field));
        }
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        Ok(Matrix { data, ..*self })
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        let data = self.data.iter().map(|a| a * c).collect();
        Matrix { data, ..*self }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&-self.field.one())
    }

    pub fn apply(&self, v: &[Scalar]) -> Vector {
        assert_eq!(v.len(), self.cols, "vector length does not match matrix columns");
        let mut out = vec![self.field.zero(); self.rows];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                let a = self.get(i, j);
                if !a.is_zero() {
                    fused_add_mul(o, a, x);
                }
            }
        }
        out
    }

    /// Block-diagonal sum.
    pub fn block_diag(field: Field, blocks: &[&Matrix]) -> Matrix {
        let r = blocks.iter().map(|b| b.rows).sum();
        let c = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(field, r, c);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    /// Columns `j` for which `keep(j)` holds, in order.
    pub fn select_columns(&self, keep: impl Fn(usize) -> bool) -> Matrix {
        let idx: Vec<usize> = (0..self.cols).filter(|&j| keep(j)).collect();
        let mut m = Matrix::zeros(self.field, self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                m.set(i, jj, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn select_rows(&self, keep: impl Fn(usize) -> bool) -> Matrix {
        let idx: Vec<usize> = (0..self.rows).filter(|&i| keep(i)).collect();
        let mut m = Matrix::zeros(self.field, idx.len(), self.cols);
        for (ii, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m.set(ii, j, self.get(i, j).clone());
            }
        }
        m
    }

    /// Reduced row echelon form; pivots are chosen as the first nonzero
    /// entry scanning rows top to bottom, which makes the result canonical.
    pub fn rref(&self) -> Rref {
        let mut rows = self.to_rows();
        let pivots = rref_in_place(&mut rows, self.cols, None);
        let matrix = Matrix {
            field: self.field,
            rows: self.rows,
            cols: self.cols,
            data: rows.into_iter().flatten().collect(),
        };
        Rref { matrix, pivots }
    }

    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<Scalar>> = self.to_rows();
        rref_in_place(&mut rows, self.cols, None).len()
    }

    /// Basis of the right kernel, one vector per free column, read off the
    /// reduced echelon form (so the basis is itself in reduced form).
    pub fn kernel_basis(&self) -> Vec<Vector> {
        let Rref { matrix: r, pivots } = self.rref();
        let mut is_pivot = vec![None; self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            is_pivot[p] = Some(i);
        }
        let mut out = Vec::new();
        for f in 0..self.cols {
            if is_pivot[f].is_some() {
                continue;
            }
            let mut v = vec![self.field.zero(); self.cols];
            v[f] = self.field.one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r.get(i, f);
            }
            out.push(v);
        }
        out
    }

    /// Basis of the left kernel: functionals `y` with `y M = 0`.
    pub fn left_kernel_basis(&self) -> Vec<Vector> {
        self.transpose().kernel_basis()
    }

    /// Finds `u` with `M u = v` or a functional certifying `v` is not in
    /// the column space.
    pub fn solve_in_image(&self, v: &[Scalar]) -> Result<Solve> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has length {}, matrix has {} rows",
                v.len(),
                self.rows
            )));
        }
        if let Some(s) = v.iter().find(|s| s.field() != self.field) {
            return Err(Error::FieldMismatch(self.field, s.field()));
        }
        // Row-reduce [M | I] so that T M = R with T recorded on the right.
        let n = self.rows;
        let mut rows: Vec<Vec<Scalar>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| if i == j { self.field.one() } else { self.field.zero() }));
                r
            })
            .collect();
        let pivots = rref_in_place(&mut rows, self.cols, Some(self.cols + n));
        let tv: Vec<Scalar> = rows
            .iter()
            .map(|r| {
                let mut acc = self.field.zero();
                for (t, x) in r[self.cols..].iter().zip(v) {
                    if !t.is_zero() && !x.is_zero() {
                        fused_add_mul(&mut acc, t, x);
                    }
                }
                acc
            })
            .collect();
        for i in pivots.len()..n {
            if !tv[i].is_zero() {
                return Ok(Solve::NotInImage(rows[i][self.cols..].to_vec()));
            }
        }
        let mut u = vec![self.field.zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            u[p] = tv[i].clone();
        }
        Ok(Solve::Preimage(u))
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut rows: Vec<Vec<Scalar>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| if i == j { self.field.one() } else { self.field.zero() }));
                r
            })
            .collect();
        let pivots = rref_in_place(&mut rows, n, Some(2 * n));
        if pivots.len() < n {
            return None;
        }
        let data = rows.into_iter().flat_map(|r| r[n..].to_vec()).collect();
        Some(Matrix {
            field: self.field,
            rows: n,
            cols: n,
            data,
        })
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// In-place reduced row echelon form on the first `pivot_cols` columns;
/// row operations are applied to the full width `width` (defaults to
/// `pivot_cols`). Returns the pivot columns; pivot rows come first.
pub(crate) fn rref_in_place(rows: &mut [Vec<Scalar>], pivot_cols: usize, width: Option<usize>) -> Vec<usize> {
    let width = width.unwrap_or(pivot_cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv();
        if !inv.is_one() {
            for x in rows[r][c..width].iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
        }
        let (head, tail) = rows.split_at_mut(r);
        let (prow, tail) = tail.split_first_mut().unwrap();
        for other in head.iter_mut().chain(tail.iter_mut()) {
            if other[c].is_zero() {
                continue;
            }
            let factor = -&other[c];
            for j in c..width {
                if !prow[j].is_zero() {
                    fused_add_mul(&mut other[j], &factor, &prow[j]);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a matrix after checking that all entries share its field.
pub fn mat_rank(m: &Matrix) -> Result<usize> {
    m.check_field()?;
    Ok(m.rank())
}

pub fn mat_kernel_basis(m: &Matrix) -> Result<Vec<Vector>> {
    m.check_field()?;
    Ok(m.kernel_basis())
}

pub fn solve_in_image(m: &Matrix, v: &[Scalar]) -> Result<Solve> {
    m.check_field()?;
    m.solve_in_image(v)
}

pub fn zero_vector(field: Field, n: usize) -> Vector {
    vec![field.zero(); n]
}

pub fn is_zero_vector(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}

/// `acc += c * v`.
pub fn axpy(acc: &mut [Scalar], c: &Scalar, v: &[Scalar]) {
    if c.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            fused_add_mul(a, c, x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Field {
        Field::Rationals
    }

    #[test]
    fn rank_examples() {
        let m = Matrix::from_i64(q(), &[&[1, 2], &[2, 4]]);
        assert_eq!(mat_rank(&m).unwrap(), 1);
        assert_eq!(Matrix::zeros(q(), 0, 0).rank(), 0);
        let f2 = Field::prime(2).unwrap();
        assert_eq!(Matrix::from_i64(f2, &[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn mixed_field_entries_are_rejected() {
        let mut m = Matrix::from_i64(q(), &[&[1, 2], &[2, 4]]);
        m.set(0, 0, Field::Prime(5).one());
        assert!(matches!(mat_rank(&m), Err(Error::FieldMismatch(..))));
        let rows = vec![vec![q().one(), Field::Prime(3).one()]];
        assert!(Matrix::from_rows(q(), rows).is_err());
    }

    #[test]
    fn kernel_examples() {
        let m = Matrix::from_i64(q(), &[&[1, 2], &[2, 4]]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![q().from_i64(-2), q().one()]);
        assert!(Matrix::identity(q(), 3).kernel_basis().is_empty());
    }

    #[test]
    fn kernel_over_f3_matches_enumeration() {
        let f3 = Field::prime(3).unwrap();
        let m = Matrix::from_i64(f3, &[&[1, 1, 1]]);
        let k = m.kernel_basis();
        // Enumerate F_3^3: the kernel has 9 elements, so dimension 2.
        let mut count = 0;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    if (a + b + c) % 3 == 0 {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(count, 9);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(is_zero_vector(&m.apply(v)));
        }
    }

    #[test]
    fn solve_examples() {
        let m = Matrix::from_i64(q(), &[&[1, 0], &[0, 0]]);
        let f = q();
        assert_eq!(
            m.solve_in_image(&[f.one(), f.zero()]).unwrap(),
            Solve::Preimage(vec![f.one(), f.zero()])
        );
        assert_eq!(
            m.solve_in_image(&[f.zero(), f.one()]).unwrap(),
            Solve::NotInImage(vec![f.zero(), f.one()])
        );
        let two = Matrix::from_i64(q(), &[&[2]]);
        assert_eq!(
            two.solve_in_image(&[f.from_i64(3)]).unwrap(),
            Solve::Preimage(vec![f.parse_scalar("3/2").unwrap()])
        );
        assert!(m.solve_in_image(&[f.one()]).is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::from_i64(q(), &[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(q(), 2));
        assert!(Matrix::from_i64(q(), &[&[1, 2], &[2, 4]]).inverse().is_none());
    }
}
