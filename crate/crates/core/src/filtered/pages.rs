//! Pages of the `m`-adic spectral sequence, computed on `K̄ = K / m^{N+1} K`.
//!
//! Writing `Z_r^p = {x ∈ F^p : dx ∈ F^{p+r}}`, the page is
//! `E_r^p = lead_p(Z_r^p) / lead_p(d Z_{r-1}^{p-r+1})`, both subspaces of
//! `gr^p K̄^n`. For every cell `(n, p)` the engine keeps
//!
//! * the denominator as an echelon basis of leads `b = lead_p(dy)`, each
//!   remembering its chain-level `y`;
//! * classes `(z, x)` with `x ∈ Z_r^p` and `lead_p(x) = z`, whose leads form
//!   a complement of the denominator inside `lead_p(Z_r^p)`.
//!
//! Passing from page `r` to `r + 1`: `d_r[x] = [dx]` is read off from
//! `lead_{p+r}(dx)`; a kernel combination `Σ λ_i x_i` is corrected by the
//! recorded `y`s into an element of `Z_{r+1}^p`, and the leads `lead_{p+r}(dx_i)`
//! join the denominator of the target cell. Since `F^{N+1} K̄ = 0`, the page
//! `E_{N+1}` is already `E_∞`.

use std::collections::BTreeMap;
use std::fmt;

use super::complex::{ensure_valid, reduce_mod_m, FilteredFreeComplex};
use crate::error::{Error, Result};
use crate::linalg::matrix::{is_zero_vector, zero_vector};
use crate::linalg::scalar::fused_add_mul;
use crate::linalg::sparse::{merge_axpy, sparse_from_dense, SparseVec};
use crate::linalg::{Echelon, Field, Matrix, Scalar, Vector};

/// Echelon basis of leads in `gr^p`, each row carrying a chain-level
/// payload and a sparse tag in class coordinates.
#[derive(Clone, Debug)]
pub(crate) struct LeadBasis {
    field: Field,
    rows: Vec<Vector>,
    pivot_of: Vec<Option<usize>>,
    payloads: Vec<SparseVec>,
    tags: Vec<SparseVec>,
}

impl LeadBasis {
    fn new(field: Field, width: usize) -> LeadBasis {
        LeadBasis {
            field,
            rows: Vec::new(),
            pivot_of: vec![None; width],
            payloads: Vec::new(),
            tags: Vec::new(),
        }
    }

    /// Reduces `v` in place; returns the `(row, coefficient)` pairs
    /// subtracted.
    fn reduce(&self, v: &mut [Scalar]) -> Vec<(usize, Scalar)> {
        let mut used = Vec::new();
        for j in 0..v.len() {
            if v[j].is_zero() {
                continue;
            }
            if let Some(k) = self.pivot_of[j] {
                let c = v[j].clone();
                let minus = -&c;
                for (x, y) in v[j..].iter_mut().zip(&self.rows[k][j..]) {
                    if !y.is_zero() {
                        fused_add_mul(x, &minus, y);
                    }
                }
                used.push((k, c));
            }
        }
        used
    }

    fn combine(&self, used: &[(usize, Scalar)], which: impl Fn(&LeadBasis, usize) -> &SparseVec) -> SparseVec {
        let mut acc = SparseVec::new();
        for (k, c) in used {
            acc = merge_axpy(&acc, c, which(self, *k));
        }
        acc
    }

    /// Inserts `v`; returns false if it was dependent.
    fn insert(&mut self, mut v: Vector, payload: SparseVec, tag: SparseVec) -> bool {
        let used = self.reduce(&mut v);
        let Some(lead) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let minus_one = -self.field.one();
        let mut payload = payload;
        let mut tag = tag;
        for (k, c) in &used {
            let m = &minus_one * c;
            payload = merge_axpy(&payload, &m, &self.payloads[*k]);
            tag = merge_axpy(&tag, &m, &self.tags[*k]);
        }
        let inv = v[lead].inv();
        if !inv.is_one() {
            for x in v.iter_mut() {
                if !x.is_zero() {
                    *x = &*x * &inv;
                }
            }
            for (_, x) in payload.iter_mut().chain(tag.iter_mut()) {
                *x = &*x * &inv;
            }
        }
        self.pivot_of[lead] = Some(self.rows.len());
        self.rows.push(v);
        self.payloads.push(payload);
        self.tags.push(tag);
        true
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Class {
    pub lead: Vector,
    pub lift: SparseVec,
}

#[derive(Clone, Debug)]
pub(crate) struct Cell {
    pub classes: Vec<Class>,
    pub denominator: LeadBasis,
    /// Denominator rows followed by class leads tagged with their index.
    pub coords: LeadBasis,
    /// `d_r` into cell `(n + 1, p + r)`, `#target classes × #classes`.
    pub differential: Matrix,
}

#[derive(Clone, Debug)]
pub(crate) struct Page {
    pub cells: BTreeMap<(i64, usize), Cell>,
}

/// All pages `E_1 ..= E_{N+1}` of a complex.
#[derive(Clone, Debug)]
pub struct SpectralSequence {
    complex: FilteredFreeComplex,
    pages: Vec<Page>,
}

/// Coordinates of `w ∈ gr^p` in the class basis of a cell, plus a chain
/// `y` with `lead_p(dy)` equal to the denominator component of `w`.
pub(crate) struct Decomposition {
    pub coords: Vector,
    pub correction: SparseVec,
}

impl Cell {
    fn decompose(&self, field: Field, w: &[Scalar]) -> Option<Decomposition> {
        let mut v = w.to_vec();
        let used = self.coords.reduce(&mut v);
        if !is_zero_vector(&v) {
            return None;
        }
        let tag = self.coords.combine(&used, |b, k| &b.tags[k]);
        let mut coords = zero_vector(field, self.classes.len());
        for (i, c) in tag {
            coords[i] = c;
        }
        let correction = self.coords.combine(&used, |b, k| &b.payloads[k]);
        Some(Decomposition { coords, correction })
    }
}

fn unit_sparse(field: Field, i: usize) -> SparseVec {
    vec![(i, field.one())]
}

impl SpectralSequence {
    pub fn compute(k: &FilteredFreeComplex) -> Result<SpectralSequence> {
        ensure_valid(k)?;
        let mut pages = vec![first_page(k)];
        for r in 1..=k.precision() + 1 {
            let next = advance(k, pages.last_mut().expect("nonempty"), r)?;
            if r <= k.precision() {
                pages.push(next);
            }
        }
        Ok(SpectralSequence {
            complex: k.clone(),
            pages,
        })
    }

    pub fn complex(&self) -> &FilteredFreeComplex {
        &self.complex
    }

    /// Highest computed page, `N + 1`.
    pub fn last_page(&self) -> usize {
        self.pages.len()
    }

    pub(crate) fn page(&self, r: usize) -> &Page {
        let idx = r.clamp(1, self.pages.len()) - 1;
        &self.pages[idx]
    }

    pub(crate) fn cell(&self, r: usize, n: i64, p: usize) -> Option<&Cell> {
        self.page(r).cells.get(&(n, p))
    }

    /// `dim E_r^p` at total degree `n`; pages beyond `N + 1` equal `E_{N+1}`.
    pub fn dim(&self, r: usize, n: i64, p: usize) -> usize {
        self.cell(r, n, p).map_or(0, |c| c.classes.len())
    }

    /// Matrix of `d_r : E_r^{p}(n) → E_r^{p+r}(n+1)` in class bases.
    pub fn differential(&self, r: usize, n: i64, p: usize) -> Matrix {
        let f = self.complex.field();
        if r > self.pages.len() {
            let tgt = self.dim(r, n + 1, p + r);
            return Matrix::zeros(f, tgt, self.dim(r, n, p));
        }
        match self.cell(r, n, p) {
            Some(c) => c.differential.clone(),
            None => Matrix::zeros(f, self.dim(r, n + 1, p + r), 0),
        }
    }

    /// Leads of the class basis of `E_r^p(n)`, as vectors of `gr^p K̄^n`.
    pub fn basis(&self, r: usize, n: i64, p: usize) -> Vec<Vector> {
        self.cell(r, n, p)
            .map(|c| c.classes.iter().map(|x| x.lead.clone()).collect())
            .unwrap_or_default()
    }

    /// Chain-level representatives of the class basis of `E_r^p(n)`.
    pub fn representatives(&self, r: usize, n: i64, p: usize) -> Vec<Vector> {
        let dim = self.complex.bar_dim(n);
        self.cell(r, n, p)
            .map(|c| c.classes.iter().map(|x| densify(self.complex.field(), &x.lift, dim)).collect())
            .unwrap_or_default()
    }

    /// Whether every differential `d_i`, `i ≥ r`, vanishes.
    pub fn degenerates_at(&self, r: usize) -> bool {
        let r = r.max(1);
        (r..=self.pages.len()).all(|i| self.page(i).cells.values().all(|c| c.differential.is_zero()))
    }

    /// Class coordinates in `E_r^p(n)` of an element `x ∈ Z_r^p`, given in
    /// `K̄^n` coordinates.
    pub fn class_of(&self, r: usize, n: i64, p: usize, x: &[Scalar]) -> Result<Vector> {
        let k = &self.complex;
        let f = k.field();
        if x[..k.filt_start(n, p)].iter().any(|c| !c.is_zero()) {
            return Err(Error::Internal(format!("element is not in F^{p}")));
        }
        let Some(cell) = self.cell(r, n, p) else {
            return Ok(Vec::new());
        };
        let lead = &x[k.gr_range(n, p)];
        cell.decompose(f, lead)
            .map(|d| d.coords)
            .ok_or_else(|| Error::Internal(format!("element does not define a class of E_{r} at (n={n}, p={p})")))
    }
}

pub(crate) fn densify(field: Field, v: &SparseVec, dim: usize) -> Vector {
    let mut out = zero_vector(field, dim);
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

fn first_page(k: &FilteredFreeComplex) -> Page {
    let f = k.field();
    let reduced = reduce_mod_m(k);
    let jet = k.jet();
    let mut cells = BTreeMap::new();
    for n in k.spots() {
        let rank = k.rank(n);
        let idx = (n - k.n_lo()) as usize;
        // Homology representatives of K ⊗ k at spot n.
        let cycles = if idx < reduced.constants.len() {
            reduced.constants[idx].kernel_basis()
        } else {
            (0..rank)
                .map(|g| {
                    let mut v = zero_vector(f, rank);
                    v[g] = f.one();
                    v
                })
                .collect()
        };
        let incoming = if idx > 0 { Some(&reduced.constants[idx - 1]) } else { None };
        let mut bounds = Echelon::new(f, rank);
        if let Some(m) = incoming {
            for c in 0..m.cols() {
                bounds.insert_plain(m.column(c));
            }
        }
        let mut reps = Vec::new();
        for v in cycles {
            if bounds.insert_plain(v.clone()).is_some() {
                reps.push(v);
            }
        }
        for p in 0..=k.precision() {
            let width = k.gr_dim(n, p);
            let mut denominator = LeadBasis::new(f, width);
            if let Some(m) = incoming {
                let src_rank = m.cols();
                for mono in 0..jet.count(p) {
                    let jm = jet.start(p) + mono;
                    for g in 0..src_rank {
                        let col = m.column(g);
                        if is_zero_vector(&col) {
                            continue;
                        }
                        let mut lead = zero_vector(f, width);
                        lead[mono * rank..(mono + 1) * rank].clone_from_slice(&col);
                        denominator.insert(lead, unit_sparse(f, jm * src_rank + g), Vec::new());
                    }
                }
            }
            let mut coords = denominator.clone();
            let mut classes = Vec::new();
            for mono in 0..jet.count(p) {
                let jm = jet.start(p) + mono;
                for v in &reps {
                    let mut lead = zero_vector(f, width);
                    lead[mono * rank..(mono + 1) * rank].clone_from_slice(v);
                    let lift: SparseVec = sparse_from_dense(v).into_iter().map(|(g, x)| (jm * rank + g, x)).collect();
                    let inserted = coords.insert(lead.clone(), Vec::new(), unit_sparse(f, classes.len()));
                    debug_assert!(inserted);
                    classes.push(Class { lead, lift });
                }
            }
            cells.insert(
                (n, p),
                Cell {
                    classes,
                    denominator,
                    coords,
                    differential: Matrix::zeros(f, 0, 0),
                },
            );
        }
    }
    Page { cells }
}

/// Fills in `d_r` on `page` and returns page `r + 1`.
fn advance(k: &FilteredFreeComplex, page: &mut Page, r: usize) -> Result<Page> {
    let f = k.field();
    let n_top = k.precision();
    // Kernel lifts per cell, and new denominator rows per target cell.
    let mut kernels: BTreeMap<(i64, usize), Vec<Class>> = BTreeMap::new();
    let mut incoming: BTreeMap<(i64, usize), Vec<(Vector, SparseVec)>> = BTreeMap::new();
    let keys: Vec<(i64, usize)> = page.cells.keys().copied().collect();
    for &(n, p) in &keys {
        let target_key = (n + 1, p + r);
        let target_exists = p + r <= n_top && n < k.n_hi();
        let src = &page.cells[&(n, p)];
        let tgt_dim = if target_exists {
            page.cells[&target_key].classes.len()
        } else {
            0
        };
        let mut d = Matrix::zeros(f, tgt_dim, src.classes.len());
        let mut corrections = Vec::with_capacity(src.classes.len());
        let mut leads_out = Vec::new();
        if target_exists {
            let tgt = &page.cells[&target_key];
            let bar = k.bar_dim(n);
            for (i, class) in src.classes.iter().enumerate() {
                let dx = k.apply_d(n, &densify(f, &class.lift, bar));
                let start = k.filt_start(n + 1, p + r);
                if dx[..start].iter().any(|x| !x.is_zero()) {
                    return Err(Error::Internal(format!(
                        "lift at (n={n}, p={p}) has dx outside F^{}",
                        p + r
                    )));
                }
                let w = dx[k.gr_range(n + 1, p + r)].to_vec();
                let dec = tgt.decompose(f, &w).ok_or_else(|| {
                    Error::Internal(format!("d_{r} image at (n={}, p={}) is not a cycle lead", n + 1, p + r))
                })?;
                for (row, c) in dec.coords.into_iter().enumerate() {
                    d.set(row, i, c);
                }
                corrections.push(dec.correction);
                if !is_zero_vector(&w) {
                    leads_out.push((w, class.lift.clone()));
                }
            }
        } else {
            corrections = vec![SparseVec::new(); src.classes.len()];
        }
        let mut kernel = Vec::new();
        for lambda in d.kernel_basis() {
            let mut lead = zero_vector(f, k.gr_dim(n, p));
            let mut lift = SparseVec::new();
            for (i, l) in lambda.iter().enumerate() {
                if l.is_zero() {
                    continue;
                }
                let class = &src.classes[i];
                for (a, b) in lead.iter_mut().zip(&class.lead) {
                    if !b.is_zero() {
                        fused_add_mul(a, l, b);
                    }
                }
                lift = merge_axpy(&lift, l, &class.lift);
                lift = merge_axpy(&lift, &-l, &corrections[i]);
            }
            kernel.push(Class { lead, lift });
        }
        kernels.insert((n, p), kernel);
        if !leads_out.is_empty() {
            incoming.insert(target_key, leads_out);
        }
        page.cells.get_mut(&(n, p)).expect("cell").differential = d;
    }

    let mut cells = BTreeMap::new();
    for &(n, p) in &keys {
        let old = &page.cells[&(n, p)];
        let mut denominator = old.denominator.clone();
        for (w, y) in incoming.remove(&(n, p)).unwrap_or_default() {
            denominator.insert(w, y, Vec::new());
        }
        let mut coords = denominator.clone();
        let mut classes = Vec::new();
        for class in kernels.remove(&(n, p)).unwrap_or_default() {
            if coords.insert(class.lead.clone(), Vec::new(), unit_sparse(f, classes.len())) {
                classes.push(class);
            }
        }
        cells.insert(
            (n, p),
            Cell {
                classes,
                denominator,
                coords,
                differential: Matrix::zeros(f, 0, 0),
            },
        );
    }
    Ok(Page { cells })
}

/// One page restricted to `0 ≤ p ≤ pmax`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageTable {
    pub r: usize,
    pub pmax: usize,
    pub precision: usize,
    pub entries: BTreeMap<(i64, usize), PageEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageEntry {
    pub dim: usize,
    /// Leads of the basis classes, in `gr^p` coordinates.
    pub basis: Vec<Vector>,
    /// `d_r` into `(n + 1, p + r)`; `None` when the target lies outside
    /// the complex or beyond precision.
    pub differential: Option<Matrix>,
}

impl PageTable {
    pub fn dim(&self, n: i64, p: usize) -> usize {
        self.entries.get(&(n, p)).map_or(0, |e| e.dim)
    }

    /// Rows `(r, p, q, dim)` with `q = n - p`.
    pub fn csv(&self) -> String {
        let mut out = String::from("r,p,q,dim\n");
        for ((n, p), e) in &self.entries {
            out.push_str(&format!("{},{},{},{}\n", self.r, p, n - *p as i64, e.dim));
        }
        out
    }
}

impl fmt::Display for PageTable {
    /// A grid with one row per `p` and one column per total degree `n`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ns: Vec<i64> = {
            let mut v: Vec<i64> = self.entries.keys().map(|k| k.0).collect();
            v.dedup();
            v
        };
        writeln!(f, "E_{} (p <= {}, certified for precision N = {})", self.r, self.pmax, self.precision)?;
        write!(f, "{:>6}", "p\\n")?;
        for n in &ns {
            write!(f, " {n:>5}")?;
        }
        for p in 0..=self.pmax {
            writeln!(f)?;
            write!(f, "{p:>6}")?;
            for n in &ns {
                write!(f, " {:>5}", self.dim(*n, p))?;
            }
        }
        Ok(())
    }
}

/// The page `E_r` for `0 ≤ p ≤ pmax`. Pages of `K̄` agree with those of `K`
/// for `p + r ≤ N`, so larger windows are refused.
pub fn compute_page(k: &FilteredFreeComplex, r: usize, pmax: usize) -> Result<PageTable> {
    let ss = SpectralSequence::compute(k)?;
    page_table(&ss, r, pmax)
}

pub fn page_table(ss: &SpectralSequence, r: usize, pmax: usize) -> Result<PageTable> {
    let k = ss.complex();
    if r == 0 {
        return Err(Error::OutOfRange("pages start at r = 1".into()));
    }
    if pmax + r > k.precision() {
        return Err(Error::Precision(format!(
            "page {r} with p <= {pmax} requires precision N >= {}, complex has N = {}",
            pmax + r,
            k.precision()
        )));
    }
    let mut entries = BTreeMap::new();
    for n in k.spots() {
        for p in 0..=pmax {
            let has_target = n < k.n_hi() && p + r <= k.precision();
            entries.insert(
                (n, p),
                PageEntry {
                    dim: ss.dim(r, n, p),
                    basis: ss.basis(r, n, p),
                    differential: has_target.then(|| ss.differential(r, n, p)),
                },
            );
        }
    }
    Ok(PageTable {
        r,
        pmax,
        precision: k.precision(),
        entries,
    })
}

pub fn degenerates_at(k: &FilteredFreeComplex, r: usize) -> Result<bool> {
    Ok(SpectralSequence::compute(k)?.degenerates_at(r))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::filtered::complex::tests::{complex, two_by_two_example};
    use crate::linalg::Field;

    /// `R_n(a, b) = rank(F^a K̄^n → K̄^{n+1} / F^b)`.
    fn filtered_rank(k: &FilteredFreeComplex, n: i64, a: i64, b: usize) -> usize {
        if n < k.n_lo() || n >= k.n_hi() {
            return 0;
        }
        let m = k.d_matrix(n);
        let a = a.max(0) as usize;
        let cut_col = k.filt_start(n, a);
        let cut_row = k.filt_start(n + 1, b);
        m.select_columns(|j| j >= cut_col).select_rows(|i| i < cut_row).rank()
    }

    /// Page dimensions from ranks alone.
    pub fn oracle_dim(k: &FilteredFreeComplex, r: usize, n: i64, p: usize) -> usize {
        let (pi, ri) = (p as i64, r as i64);
        let gr = k.gr_dim(n, p) as i64;
        let v = gr - filtered_rank(k, n, pi, p + r) as i64 + filtered_rank(k, n, pi + 1, p + r) as i64
            + filtered_rank(k, n - 1, pi - ri + 1, p) as i64
            - filtered_rank(k, n - 1, pi - ri + 1, p + 1) as i64;
        v as usize
    }

    pub fn assert_matches_oracle(k: &FilteredFreeComplex) {
        let ss = SpectralSequence::compute(k).unwrap();
        for r in 1..=k.precision() + 2 {
            for n in k.spots() {
                for p in 0..=k.precision() {
                    assert_eq!(ss.dim(r, n, p), oracle_dim(k, r, n, p), "r={r} n={n} p={p}");
                }
            }
        }
    }

    #[test]
    fn zero_differential_pages_are_constant() {
        let k = complex(Field::Rationals, 2, 4, 0, &[1, 2], &[&[&["0"], &["0"]]]);
        let ss = SpectralSequence::compute(&k).unwrap();
        for r in 1..=5 {
            assert_eq!(ss.dim(r, 1, 2), 6);
        }
        assert!(ss.degenerates_at(1));
        assert_matches_oracle(&k);
    }

    #[test]
    fn multiplication_by_t() {
        let k = complex(Field::Rationals, 1, 6, 0, &[1, 1], &[&[&["t"]]]);
        let ss = SpectralSequence::compute(&k).unwrap();
        for p in 1..=4 {
            assert_eq!(ss.dim(2, 0, p), 0);
        }
        assert_eq!(ss.dim(2, 1, 0), 1);
        assert!(ss.degenerates_at(2));
        assert_matches_oracle(&k);
    }

    #[test]
    fn two_by_two_pages() {
        let k = two_by_two_example(6);
        let ss = SpectralSequence::compute(&k).unwrap();
        for p in 0..=5 {
            assert!(ss.differential(1, 0, p).is_zero());
            assert_eq!(ss.dim(2, 0, p), ss.dim(1, 0, p));
        }
        for p in 0..=4 {
            let d2 = ss.differential(2, 0, p);
            assert_eq!(d2.shape(), (1, 1));
            assert!(!d2.is_zero());
        }
        assert!(!ss.degenerates_at(2));
        assert!(ss.degenerates_at(3));
        assert_matches_oracle(&k);
        let table = page_table(&ss, 2, 4).unwrap();
        assert_eq!(table.dim(0, 3), 1);
        assert!(matches!(page_table(&ss, 2, 5), Err(Error::Precision(_))));
    }

    #[test]
    fn t_squared() {
        let k = complex(Field::Rationals, 1, 6, 0, &[1, 1], &[&[&["t^2"]]]);
        assert!(!degenerates_at(&k, 2).unwrap());
        assert!(degenerates_at(&k, 3).unwrap());
        assert_matches_oracle(&k);
    }

    #[test]
    fn mixed_two_variable_complex() {
        let k = complex(
            Field::Rationals,
            2,
            4,
            -1,
            &[1, 2, 1],
            &[&[&["t1 + t2^2"], &["t2"]], &[&["-t2", "t1 + t2^2"]]],
        );
        assert_matches_oracle(&k);
    }
}
