//! Sparse rows and an incremental sparse echelon, used for the rank
//! computations on Koszul-type strands whose matrices have a handful of
//! nonzeros per column but thousands of rows.

use super::scalar::{fused_add_mul, Field, Scalar};

/// Sorted `(column, value)` pairs without explicit zeros.
pub type SparseVec = Vec<(usize, Scalar)>;

#[derive(Clone, Debug)]
pub struct SparseEchelon {
    field: Field,
    rows: Vec<SparseVec>,
    pivot_of: Vec<Option<usize>>,
}

impl SparseEchelon {
    pub fn new(field: Field, width: usize) -> SparseEchelon {
        SparseEchelon {
            field,
            rows: Vec::new(),
            pivot_of: vec![None; width],
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    /// Reduces `v` against the stored rows.
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        let mut pos = 0;
        while pos < v.len() {
            let j = v[pos].0;
            match self.pivot_of[j] {
                Some(k) => {
                    let c = -&v[pos].1;
                    v = merge_axpy(&v, &c, &self.rows[k]);
                }
                None => pos += 1,
            }
        }
        v
    }

    pub fn insert(&mut self, v: SparseVec) -> bool {
        let mut v = self.reduce(v);
        let Some((lead, c)) = v.first().cloned() else {
            return false;
        };
        if !c.is_one() {
            let inv = c.inv();
            for (_, x) in v.iter_mut() {
                *x = &*x * &inv;
            }
        }
        self.pivot_of[lead] = Some(self.rows.len());
        self.rows.push(v);
        true
    }

    pub fn contains(&self, v: SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    pub fn field(&self) -> Field {
        self.field
    }
}

/// `a + c * b` on sorted sparse vectors.
pub fn merge_axpy(a: &SparseVec, c: &Scalar, b: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ai = a.get(i).map(|x| x.0);
        let bj = b.get(j).map(|x| x.0);
        match (ai, bj) {
            (Some(x), Some(y)) if x == y => {
                let mut s = a[i].1.clone();
                fused_add_mul(&mut s, c, &b[j].1);
                if !s.is_zero() {
                    out.push((x, s));
                }
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push(a[i].clone());
                i += 1;
            }
            (Some(_), None) => {
                out.push(a[i].clone());
                i += 1;
            }
            (_, Some(y)) => {
                out.push((y, c * &b[j].1));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Rank of the matrix whose rows (or columns) are the given sparse vectors.
pub fn sparse_rank(field: Field, width: usize, vectors: impl IntoIterator<Item = SparseVec>) -> usize {
    let mut e = SparseEchelon::new(field, width);
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

pub fn sparse_from_dense(v: &[Scalar]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

/// Accumulates unsorted `(index, value)` contributions into a sparse vector.
pub fn sparse_accumulate(field: Field, mut entries: Vec<(usize, Scalar)>) -> SparseVec {
    entries.sort_by_key(|e| e.0);
    let mut out: SparseVec = Vec::with_capacity(entries.len());
    for (i, v) in entries {
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc = &*acc + &v,
            _ => out.push((i, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    let _ = field;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    #[test]
    fn agrees_with_dense_rank() {
        let f = Field::Rationals;
        let m = Matrix::from_i64(f, &[&[1, 2, 0, 3], &[2, 4, 0, 6], &[0, 1, 1, 0], &[1, 3, 1, 3]]);
        let rows = (0..m.rows()).map(|i| sparse_from_dense(m.row(i)));
        assert_eq!(sparse_rank(f, 4, rows), m.rank());
        assert_eq!(m.rank(), 2);
    }
}
