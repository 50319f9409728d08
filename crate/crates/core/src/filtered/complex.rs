//! Bounded complexes of free modules over `k[[t1..te]]`, stored as jets.
//!
//! Spot `n` is `K^n = R^{r_n}`; the differential `d^n : K^n → K^{n+1}` is an
//! `r_{n+1} × r_n` matrix of polynomials of degree at most `N`. Linear
//! algebra happens in the truncation `K̄^n = K^n / m^{N+1} K^n`, a `k`-space
//! with coordinates `monomial * r_n + generator`.

use std::fmt;
use std::sync::Arc;

use super::jet::JetLayout;
use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::linalg::matrix::zero_vector;
use crate::linalg::sparse::{sparse_accumulate, SparseVec};
use crate::linalg::{Field, Matrix, Scalar, Vector};

pub type PolyMatrix = Vec<Vec<Polynomial>>;

// For each source generator, the nonzero (target row, monomial, coefficient) triples.
type ColumnTerms = Vec<Vec<(usize, usize, Scalar)>>;

#[derive(Clone, Debug)]
pub struct FilteredFreeComplex {
    field: Field,
    e: usize,
    precision: usize,
    n_lo: i64,
    ranks: Vec<usize>,
    diffs: Vec<PolyMatrix>,
    jet: Arc<JetLayout>,
    columns: Vec<ColumnTerms>,
}

impl PartialEq for FilteredFreeComplex {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field
            && self.e == o.e
            && self.precision == o.precision
            && self.n_lo == o.n_lo
            && self.ranks == o.ranks
            && self.diffs == o.diffs
    }
}

/// A nonzero entry of `d^{n+1} d^n` modulo `m^{N+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct D2Violation {
    pub spot: i64,
    pub row: usize,
    pub col: usize,
    pub residual: Polynomial,
}

impl fmt::Display for D2Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "d^{} d^{} has entry ({}, {}) = {}",
            self.spot + 1,
            self.spot,
            self.row + 1,
            self.col + 1,
            self.residual
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Homogeneity {
    /// Every differential vanishes.
    Zero,
    Degree(usize),
    Mixed,
}

impl fmt::Display for Homogeneity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Homogeneity::Zero => write!(f, "zero differentials"),
            Homogeneity::Degree(r) => write!(f, "homogeneous of degree {r}"),
            Homogeneity::Mixed => write!(f, "not homogeneous"),
        }
    }
}

/// The complex `K ⊗ k`: constant parts of the differentials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedComplex {
    pub n_lo: i64,
    pub constants: Vec<Matrix>,
    pub homology: Vec<usize>,
}

impl FilteredFreeComplex {
    /// `diffs[i]` is the differential from spot `n_lo + i`. Entries are
    /// truncated to degree `precision`.
    pub fn new(
        field: Field,
        e: usize,
        precision: usize,
        n_lo: i64,
        ranks: Vec<usize>,
        diffs: Vec<PolyMatrix>,
    ) -> Result<FilteredFreeComplex> {
        if ranks.is_empty() {
            return Err(Error::InvalidComplex("a complex needs at least one spot".into()));
        }
        if diffs.len() != ranks.len() - 1 {
            return Err(Error::InvalidComplex(format!(
                "{} spots need {} differentials, got {}",
                ranks.len(),
                ranks.len() - 1,
                diffs.len()
            )));
        }
        let mut truncated = Vec::with_capacity(diffs.len());
        for (i, d) in diffs.into_iter().enumerate() {
            let n = n_lo + i as i64;
            let (rows, cols) = (ranks[i + 1], ranks[i]);
            if d.len() != rows || d.iter().any(|r| r.len() != cols) {
                return Err(Error::DimensionMismatch(format!(
                    "differential d^{n} must be {rows}x{cols}"
                )));
            }
            let mut out = Vec::with_capacity(rows);
            for row in d {
                let mut r = Vec::with_capacity(cols);
                for p in row {
                    if p.nvars() != e {
                        return Err(Error::DimensionMismatch(format!(
                            "entry of d^{n} has {} variables, complex has {e}",
                            p.nvars()
                        )));
                    }
                    if p.field() != field {
                        return Err(Error::FieldMismatch(p.field(), field));
                    }
                    r.push(p.truncate(precision));
                }
                out.push(r);
            }
            truncated.push(out);
        }
        let jet = Arc::new(JetLayout::new(e, precision));
        let columns = truncated
            .iter()
            .enumerate()
            .map(|(i, d)| {
                (0..ranks[i])
                    .map(|g| {
                        let mut terms = Vec::new();
                        for (row, entries) in d.iter().enumerate() {
                            for (m, c) in entries[g].terms() {
                                let idx = jet.index_of(m).expect("truncated monomial is in the layout");
                                terms.push((row, idx, c.clone()));
                            }
                        }
                        terms
                    })
                    .collect()
            })
            .collect();
        Ok(FilteredFreeComplex {
            field,
            e,
            precision,
            n_lo,
            ranks,
            diffs: truncated,
            jet,
            columns,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Number of variables.
    pub fn e(&self) -> usize {
        self.e
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn n_lo(&self) -> i64 {
        self.n_lo
    }

    pub fn n_hi(&self) -> i64 {
        self.n_lo + self.ranks.len() as i64 - 1
    }

    pub fn spots(&self) -> std::ops::RangeInclusive<i64> {
        self.n_lo..=self.n_hi()
    }

    pub fn rank(&self, n: i64) -> usize {
        if n < self.n_lo || n > self.n_hi() {
            0
        } else {
            self.ranks[(n - self.n_lo) as usize]
        }
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// `d^n`, if both `n` and `n + 1` are spots.
    pub fn differential(&self, n: i64) -> Option<&PolyMatrix> {
        if n < self.n_lo || n >= self.n_hi() {
            None
        } else {
            Some(&self.diffs[(n - self.n_lo) as usize])
        }
    }

    pub fn differentials(&self) -> &[PolyMatrix] {
        &self.diffs
    }

    pub fn jet(&self) -> &JetLayout {
        &self.jet
    }

    /// `dim_k K̄^n`.
    pub fn bar_dim(&self, n: i64) -> usize {
        self.jet.len() * self.rank(n)
    }

    /// First coordinate of `F^p K̄^n`.
    pub fn filt_start(&self, n: i64, p: usize) -> usize {
        self.jet.start(p) * self.rank(n)
    }

    /// Coordinate range of `gr^p K̄^n`.
    pub fn gr_range(&self, n: i64, p: usize) -> std::ops::Range<usize> {
        self.filt_start(n, p)..self.filt_start(n, p + 1)
    }

    /// Coordinates of `gr^p K̄^n`.
    pub fn gr_dim(&self, n: i64, p: usize) -> usize {
        self.jet.count(p) * self.rank(n)
    }

    /// `d` applied to `v ∈ K̄^n`, landing in `K̄^{n+1}` (zero if `n` is the
    /// last spot).
    pub fn apply_d(&self, n: i64, v: &[Scalar]) -> Vector {
        let rt = self.rank(n + 1);
        let mut out = zero_vector(self.field, self.jet.len() * rt);
        let Some(cols) = self.columns_of(n) else {
            return out;
        };
        let rs = self.rank(n);
        for (idx, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let (m, g) = (idx / rs, idx % rs);
            for (row, beta, c) in &cols[g] {
                if let Some(pos) = self.jet.mul(m, *beta) {
                    crate::linalg::scalar::fused_add_mul(&mut out[pos * rt + row], c, x);
                }
            }
        }
        out
    }

    fn columns_of(&self, n: i64) -> Option<&ColumnTerms> {
        if n < self.n_lo || n >= self.n_hi() {
            None
        } else {
            Some(&self.columns[(n - self.n_lo) as usize])
        }
    }

    /// `d` applied to the basis vector with coordinate `idx`, as a sparse
    /// vector of `K̄^{n+1}`.
    pub fn d_column_sparse(&self, n: i64, idx: usize) -> SparseVec {
        let Some(cols) = self.columns_of(n) else {
            return Vec::new();
        };
        let (rs, rt) = (self.rank(n), self.rank(n + 1));
        let (m, g) = (idx / rs, idx % rs);
        let entries = cols[g]
            .iter()
            .filter_map(|(row, beta, c)| self.jet.mul(m, *beta).map(|pos| (pos * rt + row, c.clone())))
            .collect();
        sparse_accumulate(self.field, entries)
    }

    /// Dense matrix of `d^n` on truncations.
    pub fn d_matrix(&self, n: i64) -> Matrix {
        let (src, tgt) = (self.bar_dim(n), self.bar_dim(n + 1));
        let mut m = Matrix::zeros(self.field, tgt, src);
        for j in 0..src {
            for (i, x) in self.d_column_sparse(n, j) {
                m.set(i, j, x);
            }
        }
        m
    }

    /// Polynomial components of `v ∈ K̄^n`.
    pub fn to_poly_vector(&self, n: i64, v: &[Scalar]) -> Vec<Polynomial> {
        let r = self.rank(n);
        let mut out = vec![Polynomial::zero(self.field, self.e); r];
        for (idx, x) in v.iter().enumerate() {
            if !x.is_zero() {
                out[idx % r].add_term(self.jet.monomial(idx / r).to_vec(), x);
            }
        }
        out
    }

    pub fn from_poly_vector(&self, n: i64, v: &[Polynomial]) -> Vector {
        let r = self.rank(n);
        let mut out = zero_vector(self.field, self.bar_dim(n));
        for (g, p) in v.iter().enumerate() {
            for (m, c) in p.truncate(self.precision).terms() {
                let idx = self.jet.index_of(m).expect("monomial within precision");
                out[idx * r + g] = c.clone();
            }
        }
        out
    }

    pub fn render_vector(&self, n: i64, v: &[Scalar]) -> String {
        let parts: Vec<String> = self.to_poly_vector(n, v).iter().map(|p| p.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

/// Entries of `d^{n+1} d^n` that do not vanish modulo `m^{N+1}`.
pub fn validate_complex(k: &FilteredFreeComplex) -> Vec<D2Violation> {
    let mut out = Vec::new();
    for n in k.n_lo..k.n_hi() - 1 {
        let (a, b) = (k.differential(n).expect("spot"), k.differential(n + 1).expect("spot"));
        for (row, brow) in b.iter().enumerate() {
            for col in 0..k.rank(n) {
                let mut acc = Polynomial::zero(k.field, k.e);
                for (mid, bp) in brow.iter().enumerate() {
                    acc = acc.add(&bp.mul_truncated(&a[mid][col], Some(k.precision)));
                }
                if !acc.is_zero() {
                    out.push(D2Violation {
                        spot: n,
                        row,
                        col,
                        residual: acc,
                    });
                }
            }
        }
    }
    out
}

pub(crate) fn ensure_valid(k: &FilteredFreeComplex) -> Result<()> {
    match validate_complex(k).first() {
        None => Ok(()),
        Some(v) => Err(Error::InvalidComplex(format!("d^2 != 0: {v}"))),
    }
}

/// Constant parts of the differentials and the homology of `K ⊗ k`.
pub fn reduce_mod_m(k: &FilteredFreeComplex) -> ReducedComplex {
    let constants: Vec<Matrix> = k
        .diffs
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let mut m = Matrix::zeros(k.field, k.ranks[i + 1], k.ranks[i]);
            for (r, row) in d.iter().enumerate() {
                for (c, p) in row.iter().enumerate() {
                    m.set(r, c, p.constant_term());
                }
            }
            m
        })
        .collect();
    let ranks: Vec<usize> = constants.iter().map(Matrix::rank).collect();
    let homology = (0..k.ranks.len())
        .map(|i| {
            let out = ranks.get(i).copied().unwrap_or(0);
            let inc = if i > 0 { ranks[i - 1] } else { 0 };
            k.ranks[i] - out - inc
        })
        .collect();
    ReducedComplex {
        n_lo: k.n_lo,
        constants,
        homology,
    }
}

pub fn homogeneous_degree(k: &FilteredFreeComplex) -> Homogeneity {
    let mut degree = None;
    for p in k.diffs.iter().flatten().flatten() {
        if p.is_zero() {
            continue;
        }
        match (p.homogeneous_degree(), degree) {
            (None, _) => return Homogeneity::Mixed,
            (Some(r), None) => degree = Some(r),
            (Some(r), Some(s)) if r != s => return Homogeneity::Mixed,
            _ => {}
        }
    }
    degree.map_or(Homogeneity::Zero, Homogeneity::Degree)
}

/// Blockwise direct sum over the union of the spot ranges.
pub fn sum_complexes(parts: &[FilteredFreeComplex]) -> Result<FilteredFreeComplex> {
    let first = parts
        .first()
        .ok_or_else(|| Error::Precondition("no complexes to sum".into()))?;
    for p in parts {
        if p.e != first.e {
            return Err(Error::ContextMismatch(format!(
                "variable counts differ: {} vs {}",
                first.e, p.e
            )));
        }
        if p.field != first.field {
            return Err(Error::FieldMismatch(first.field, p.field));
        }
    }
    let precision = parts.iter().map(|p| p.precision).min().expect("nonempty");
    let lo = parts.iter().map(|p| p.n_lo).min().expect("nonempty");
    let hi = parts.iter().map(|p| p.n_hi()).max().expect("nonempty");
    let ranks: Vec<usize> = (lo..=hi).map(|n| parts.iter().map(|p| p.rank(n)).sum()).collect();
    let zero = Polynomial::zero(first.field, first.e);
    let diffs = (lo..hi)
        .map(|n| {
            let rows = ranks[(n + 1 - lo) as usize];
            let cols = ranks[(n - lo) as usize];
            let mut m = vec![vec![zero.clone(); cols]; rows];
            let (mut r0, mut c0) = (0, 0);
            for p in parts {
                if let Some(d) = p.differential(n) {
                    for (i, row) in d.iter().enumerate() {
                        for (j, x) in row.iter().enumerate() {
                            m[r0 + i][c0 + j] = x.clone();
                        }
                    }
                }
                r0 += p.rank(n + 1);
                c0 += p.rank(n);
            }
            m
        })
        .collect();
    FilteredFreeComplex::new(first.field, first.e, precision, lo, ranks, diffs)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn complex(field: Field, e: usize, precision: usize, n_lo: i64, ranks: &[usize], diffs: &[&[&[&str]]]) -> FilteredFreeComplex {
        let d = diffs
            .iter()
            .map(|m| {
                m.iter()
                    .map(|row| row.iter().map(|s| Polynomial::parse(s, e, field).unwrap()).collect())
                    .collect()
            })
            .collect();
        FilteredFreeComplex::new(field, e, precision, n_lo, ranks.to_vec(), d).unwrap()
    }

    pub fn two_by_two_example(precision: usize) -> FilteredFreeComplex {
        complex(Field::Rationals, 1, precision, 0, &[2, 2], &[&[&["1", "-t"], &["t", "0"]]])
    }

    #[test]
    fn validation_examples() {
        let q = Field::Rationals;
        assert!(validate_complex(&complex(q, 1, 4, 0, &[1, 1, 1], &[&[&["t"]], &[&["0"]]])).is_empty());
        let bad = complex(q, 1, 4, 0, &[1, 1, 1], &[&[&["1"]], &[&["1"]]]);
        let v = validate_complex(&bad);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].residual.to_string(), "1");
        assert!(validate_complex(&two_by_two_example(6)).is_empty());
        // t * t^3 vanishes modulo m^4
        assert!(validate_complex(&complex(q, 1, 3, 0, &[1, 1, 1], &[&[&["t"]], &[&["t^3"]]])).is_empty());
    }

    #[test]
    fn reduction_and_homogeneity() {
        let q = Field::Rationals;
        let a = two_by_two_example(6);
        let r = reduce_mod_m(&a);
        assert_eq!(r.constants[0], Matrix::from_i64(q, &[&[1, 0], &[0, 0]]));
        assert_eq!(r.homology, vec![1, 1]);
        assert_eq!(homogeneous_degree(&a), Homogeneity::Mixed);
        let t2 = complex(q, 1, 6, 0, &[1, 1], &[&[&["t^2"]]]);
        assert_eq!(homogeneous_degree(&t2), Homogeneity::Degree(2));
        assert_eq!(reduce_mod_m(&t2).homology, vec![1, 1]);
        let lin = complex(q, 2, 4, 0, &[1, 2], &[&[&["t1"], &["-t2"]]]);
        assert_eq!(homogeneous_degree(&lin), Homogeneity::Degree(1));
        let id = complex(q, 1, 4, 0, &[1, 1], &[&[&["1"]]]);
        assert_eq!(reduce_mod_m(&id).homology, vec![0, 0]);
    }

    #[test]
    fn apply_and_render() {
        let a = two_by_two_example(6);
        let x = a.from_poly_vector(0, &[Polynomial::parse("t", 1, a.field()).unwrap(), Polynomial::from_i64(a.field(), 1, 1)]);
        assert_eq!(a.render_vector(0, &x), "(t,1)");
        assert_eq!(a.render_vector(1, &a.apply_d(0, &x)), "(0,t^2)");
        assert_eq!(a.d_matrix(0).apply(&x), a.apply_d(0, &x));
    }

    #[test]
    fn sums_pad_spots() {
        let q = Field::Rationals;
        let a = complex(q, 1, 4, 0, &[1, 1], &[&[&["t"]]]);
        let b = complex(q, 1, 4, 1, &[2, 1], &[&[&["t^2", "1"]]]);
        let s = sum_complexes(&[a, b]).unwrap();
        assert_eq!(s.ranks(), &[1, 3, 1]);
        assert!(validate_complex(&s).is_empty());
        assert_eq!(s.differential(1).unwrap()[0][0].to_string(), "0");
    }
}
