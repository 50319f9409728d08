//! Monomial coordinates on `R / m^{N+1}` for `R = k[[t1..te]]`.
//!
//! Monomials are listed by increasing total degree (graded lex within a
//! degree), so `m^p / m^{N+1}` is a suffix of the coordinates and
//! `m^p / m^{p+1}` a contiguous block.

use std::collections::HashMap;

use crate::linalg::{BasisKind, MonomialBasis};

#[derive(Clone, Debug)]
pub struct JetLayout {
    nvars: usize,
    precision: usize,
    monomials: Vec<Vec<u32>>,
    degrees: Vec<usize>,
    starts: Vec<usize>,
    index: HashMap<Vec<u32>, usize>,
    table: Vec<Vec<Option<usize>>>,
}

impl JetLayout {
    pub fn new(nvars: usize, precision: usize) -> JetLayout {
        let mut monomials = Vec::new();
        let mut degrees = Vec::new();
        let mut starts = Vec::new();
        for p in 0..=precision {
            starts.push(monomials.len());
            for m in MonomialBasis::new(BasisKind::Symmetric, nvars, p).monomials() {
                monomials.push(m.clone());
                degrees.push(p);
            }
        }
        starts.push(monomials.len());
        let index: HashMap<Vec<u32>, usize> = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let table = monomials
            .iter()
            .map(|a| {
                monomials
                    .iter()
                    .map(|b| {
                        let m: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                        index.get(&m).copied()
                    })
                    .collect()
            })
            .collect();
        JetLayout {
            nvars,
            precision,
            monomials,
            degrees,
            starts,
            index,
            table,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomial(&self, i: usize) -> &[u32] {
        &self.monomials[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    /// First monomial index of degree `p` (for `p > N` this is `len()`).
    pub fn start(&self, p: usize) -> usize {
        self.starts[p.min(self.precision + 1)]
    }

    /// Number of monomials of degree exactly `p`.
    pub fn count(&self, p: usize) -> usize {
        self.start(p + 1) - self.start(p)
    }

    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    /// Index of the product of two monomials, `None` above precision.
    pub fn mul(&self, i: usize, j: usize) -> Option<usize> {
        self.table[i][j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_blocks() {
        let j = JetLayout::new(2, 3);
        assert_eq!(j.len(), 10);
        assert_eq!((0..=4).map(|p| j.start(p)).collect::<Vec<_>>(), vec![0, 1, 3, 6, 10]);
        let t1 = j.index_of(&[1, 0]).unwrap();
        let t2sq = j.index_of(&[0, 2]).unwrap();
        assert_eq!(j.mul(t1, t2sq), j.index_of(&[1, 2]));
        assert_eq!(j.mul(t2sq, t2sq), None);
    }
}
