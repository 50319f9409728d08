//! The containment `F^k K^n ∩ d(K^{n-1}) ⊆ d(F^{k-r} K^{n-1})`, checked on
//! `K̄` for every spot `n` and every `k ∈ [r + 1, N]`.

use std::fmt;

use super::complex::{ensure_valid, FilteredFreeComplex};
use crate::error::Result;
use crate::linalg::sparse::{merge_axpy, SparseVec};
use crate::linalg::{Field, Solve, Vector};
use crate::linalg::matrix::zero_vector;

/// Sparse echelon of images `d x`, each row remembering its preimage.
pub(crate) struct ImageEchelon {
    field: Field,
    rows: Vec<SparseVec>,
    preimages: Vec<SparseVec>,
    pivot_of: Vec<Option<usize>>,
    kernel: Vec<SparseVec>,
}

impl ImageEchelon {
    pub(crate) fn new(field: Field, width: usize) -> ImageEchelon {
        ImageEchelon {
            field,
            rows: Vec::new(),
            preimages: Vec::new(),
            pivot_of: vec![None; width],
            kernel: Vec::new(),
        }
    }

    fn reduce(&self, mut v: SparseVec, mut pre: SparseVec) -> (SparseVec, SparseVec) {
        let mut pos = 0;
        while pos < v.len() {
            match self.pivot_of[v[pos].0] {
                Some(k) => {
                    let c = -&v[pos].1;
                    v = merge_axpy(&v, &c, &self.rows[k]);
                    pre = merge_axpy(&pre, &c, &self.preimages[k]);
                }
                None => pos += 1,
            }
        }
        (v, pre)
    }

    fn insert(&mut self, v: SparseVec, pre: SparseVec) {
        let (mut v, mut pre) = self.reduce(v, pre);
        let Some((lead, c)) = v.first().cloned() else {
            if !pre.is_empty() {
                self.kernel.push(pre);
            }
            return;
        };
        let inv = c.inv();
        for (_, x) in v.iter_mut().chain(pre.iter_mut()) {
            *x = &*x * &inv;
        }
        self.pivot_of[lead] = Some(self.rows.len());
        self.rows.push(v);
        self.preimages.push(pre);
    }

    fn count_from(&self, start: usize) -> usize {
        self.rows.iter().filter(|r| r[0].0 >= start).count()
    }

    pub(crate) fn kernel(&self) -> &[SparseVec] {
        &self.kernel
    }

    /// Adds the images of the coordinates `range` of `K̄^{n-1}`.
    pub(crate) fn add_columns(&mut self, k: &FilteredFreeComplex, n: i64, range: std::ops::Range<usize>) {
        for idx in range.rev() {
            let col = k.d_column_sparse(n - 1, idx);
            self.insert(col, vec![(idx, self.field.one())]);
        }
    }
}

/// Failure of the containment at `(n, k)`: `x ∈ K̄^{n-1}` with
/// `dx ∈ F^k` but `dx ∉ d(F^{k-r})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionWitness {
    pub n: i64,
    pub k: usize,
    pub r: usize,
    pub x: Vector,
    pub dx: Vector,
    pub x_text: String,
    pub dx_text: String,
}

impl CriterionWitness {
    /// Non-membership certificate for `dx` against `d(F^{k-r} K̄^{n-1})`:
    /// a functional vanishing on that image but not on `dx`.
    pub fn certificate(&self, k: &FilteredFreeComplex) -> Result<Solve> {
        let d = k.d_matrix(self.n - 1);
        let cut = k.filt_start(self.n - 1, self.k - self.r);
        d.select_columns(|j| j >= cut).solve_in_image(&self.dx)
    }
}

impl fmt::Display for CriterionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x={}, dx={}", self.x_text, self.dx_text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionVerdict {
    pub r: usize,
    pub precision: usize,
    pub holds: bool,
    pub witness: Option<CriterionWitness>,
}

impl fmt::Display for CriterionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(
                f,
                "criterion holds for r = {} (all n, 1 <= k <= {})",
                self.r, self.precision
            ),
            Some(w) => write!(
                f,
                "criterion fails for r = {} at n = {}, k = {}: {w}",
                self.r, w.n, w.k
            ),
        }
    }
}

pub fn check_degeneration_criterion(k: &FilteredFreeComplex, r: usize) -> Result<CriterionVerdict> {
    ensure_valid(k)?;
    let f = k.field();
    let top = k.precision();
    for n in k.n_lo() + 1..=k.n_hi() {
        // counts[j][kk] = dim(F^kk ∩ d(F^j)) for j = N+1 down to 0.
        let mut ech = ImageEchelon::new(f, k.bar_dim(n));
        let mut counts = vec![vec![0usize; top + 1]; top + 2];
        for j in (0..=top).rev() {
            ech.add_columns(k, n, k.filt_start(n - 1, j)..k.filt_start(n - 1, j + 1));
            for (kk, c) in counts[j].iter_mut().enumerate() {
                *c = ech.count_from(k.filt_start(n, kk));
            }
        }
        for kk in r + 1..=top {
            if counts[0][kk] != counts[kk - r][kk] {
                let witness = find_witness(k, &ech, n, kk, r);
                return Ok(CriterionVerdict {
                    r,
                    precision: top,
                    holds: false,
                    witness: Some(witness),
                });
            }
        }
    }
    Ok(CriterionVerdict {
        r,
        precision: top,
        holds: true,
        witness: None,
    })
}

fn find_witness(k: &FilteredFreeComplex, all: &ImageEchelon, n: i64, kk: usize, r: usize) -> CriterionWitness {
    let f = k.field();
    let start = k.filt_start(n, kk);
    let mut sub = ImageEchelon::new(f, k.bar_dim(n));
    sub.add_columns(k, n, k.filt_start(n - 1, kk - r)..k.bar_dim(n - 1));
    let mut candidates: Vec<usize> = (0..all.rows.len()).filter(|&i| all.rows[i][0].0 >= start).collect();
    candidates.sort_by_key(|&i| all.rows[i][0].0);
    let chosen = candidates
        .into_iter()
        .find(|&i| !sub.reduce(all.rows[i].clone(), Vec::new()).0.is_empty())
        .expect("dimension count guarantees a vector outside the subspace");
    let x = normalize(all, all.preimages[chosen].clone(), k.bar_dim(n - 1));
    let x = densify(f, &x, k.bar_dim(n - 1));
    let dx = k.apply_d(n - 1, &x);
    CriterionWitness {
        n,
        k: kk,
        r,
        x_text: k.render_vector(n - 1, &x),
        dx_text: k.render_vector(n, &dx),
        x,
        dx,
    }
}

/// The representative of `x + ker d` with the high coordinates cleared.
fn normalize(all: &ImageEchelon, x: SparseVec, width: usize) -> SparseVec {
    let flip = |v: &SparseVec| -> SparseVec {
        let mut w: SparseVec = v.iter().map(|(i, c)| (width - 1 - i, c.clone())).collect();
        w.sort_by_key(|e| e.0);
        w
    };
    let mut kernel = crate::linalg::SparseEchelon::new(all.field, width);
    for v in &all.kernel {
        kernel.insert(flip(v));
    }
    flip(&kernel.reduce(flip(&x)))
}

fn densify(f: Field, v: &SparseVec, dim: usize) -> Vector {
    let mut out = zero_vector(f, dim);
    for (i, c) in v {
        out[*i] = c.clone();
    }
    out
}

/// `dim(F^k ∩ im d)` and `dim(F^k ∩ d(F^{k-r}))` by dense ranks, for tests.
#[cfg(test)]
fn dense_counts(k: &FilteredFreeComplex, n: i64, kk: usize, r: usize) -> (usize, usize) {
    let d = k.d_matrix(n - 1);
    let start = k.filt_start(n, kk);
    let cut = k.filt_start(n - 1, kk.saturating_sub(r));
    let inter = |m: &crate::linalg::Matrix| {
        // dim(F^k ∩ im m) = rank m - rank(m projected away from F^k)
        m.rank() - m.select_rows(|i| i < start).rank()
    };
    (inter(&d), inter(&d.select_columns(|j| j >= cut)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtered::complex::tests::{complex, two_by_two_example};
    use crate::filtered::pages::SpectralSequence;
    use crate::linalg::Field;

    #[test]
    fn two_by_two_fails_with_witness() {
        let k = two_by_two_example(6);
        let v = check_degeneration_criterion(&k, 1).unwrap();
        assert!(!v.holds);
        let w = v.witness.as_ref().unwrap();
        assert_eq!((w.n, w.k), (1, 2));
        assert_eq!(w.to_string(), "x=(t,1), dx=(0,t^2)");
        assert!(matches!(w.certificate(&k).unwrap(), Solve::NotInImage(_)));
        assert!(check_degeneration_criterion(&k, 2).unwrap().holds);
    }

    #[test]
    fn t_squared() {
        let k = complex(Field::Rationals, 1, 6, 0, &[1, 1], &[&[&["t^2"]]]);
        let v = check_degeneration_criterion(&k, 1).unwrap();
        assert_eq!(v.witness.unwrap().to_string(), "x=(1), dx=(t^2)");
        assert!(check_degeneration_criterion(&k, 2).unwrap().holds);
    }

    #[test]
    fn linear_differentials_pass() {
        let k = complex(
            Field::Rationals,
            2,
            5,
            0,
            &[1, 2, 1],
            &[&[&["t1"], &["t2"]], &[&["-t2", "t1"]]],
        );
        assert!(check_degeneration_criterion(&k, 1).unwrap().holds);
    }

    #[test]
    fn counts_agree_with_dense_ranks_and_pages() {
        let k = complex(
            Field::Rationals,
            2,
            4,
            -1,
            &[1, 2, 1],
            &[&[&["t1 + t2^2"], &["t2"]], &[&["-t2", "t1 + t2^2"]]],
        );
        let ss = SpectralSequence::compute(&k).unwrap();
        for r in 1..=3 {
            let holds = (0..=1).all(|n| (r + 1..=4).all(|kk| {
                let (a, b) = dense_counts(&k, n, kk, r);
                a == b
            }));
            assert_eq!(check_degeneration_criterion(&k, r).unwrap().holds, holds);
            assert_eq!(holds, ss.degenerates_at(r + 1), "r={r}");
        }
    }
}
