//! Chain maps between filtered free complexes, homotopies, and the maps
//! they induce on pages.
//!
//! A homotopy `s` (with `s^n : K^n → L^{n-1}`) bounds `h = d s + s d`.

use std::collections::BTreeMap;

use super::complex::{FilteredFreeComplex, PolyMatrix};
use super::jet::JetLayout;
use super::pages::SpectralSequence;
use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::linalg::matrix::zero_vector;
use crate::linalg::scalar::fused_add_mul;
use crate::linalg::{Field, Matrix, Scalar, Vector};

pub fn poly_zero_matrix(field: Field, e: usize, rows: usize, cols: usize) -> PolyMatrix {
    vec![vec![Polynomial::zero(field, e); cols]; rows]
}

pub fn poly_identity(field: Field, e: usize, n: usize) -> PolyMatrix {
    let mut m = poly_zero_matrix(field, e, n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Polynomial::from_i64(field, e, 1);
    }
    m
}

/// `a b` with entries truncated to degree `precision`; `cols` is the
/// column count of `b`, needed when `b` has no rows.
pub fn poly_mat_mul(a: &PolyMatrix, b: &PolyMatrix, cols: usize, precision: usize, field: Field, e: usize) -> PolyMatrix {
    let inner = b.len();
    let mut out = poly_zero_matrix(field, e, a.len(), cols);
    for (i, row) in a.iter().enumerate() {
        for j in 0..cols {
            let mut acc = Polynomial::zero(field, e);
            for k in 0..inner {
                if !row[k].is_zero() && !b[k][j].is_zero() {
                    acc = acc.add(&row[k].mul_truncated(&b[k][j], Some(precision)));
                }
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn poly_mat_add(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.add(y)).collect())
        .collect()
}

pub fn poly_mat_neg(a: &PolyMatrix) -> PolyMatrix {
    a.iter().map(|r| r.iter().map(Polynomial::neg).collect()).collect()
}

fn is_zero_poly_matrix(a: &PolyMatrix) -> bool {
    a.iter().flatten().all(Polynomial::is_zero)
}

/// Applies a polynomial matrix (`tgt × src`) to a vector of jets in
/// monomial-major coordinates.
pub(crate) fn apply_poly_matrix(jet: &JetLayout, field: Field, m: &PolyMatrix, src: usize, tgt: usize, v: &[Scalar]) -> Vector {
    let mut out = zero_vector(field, jet.len() * tgt);
    for (idx, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let (mono, g) = (idx / src, idx % src);
        for (row, entries) in m.iter().enumerate() {
            for (exps, c) in entries[g].terms() {
                let Some(beta) = jet.index_of(exps) else { continue };
                if let Some(pos) = jet.mul(mono, beta) {
                    fused_add_mul(&mut out[pos * tgt + row], c, x);
                }
            }
        }
    }
    out
}

fn check_compatible(k: &FilteredFreeComplex, l: &FilteredFreeComplex) -> Result<()> {
    if k.e() != l.e() || k.precision() != l.precision() {
        return Err(Error::ContextMismatch(format!(
            "complexes differ in variables or precision: (e={}, N={}) vs (e={}, N={})",
            k.e(),
            k.precision(),
            l.e(),
            l.precision()
        )));
    }
    if k.field() != l.field() {
        return Err(Error::FieldMismatch(k.field(), l.field()));
    }
    Ok(())
}

fn spot_maps(
    k: &FilteredFreeComplex,
    l: &FilteredFreeComplex,
    maps: BTreeMap<i64, PolyMatrix>,
    offset: i64,
    what: &str,
) -> Result<BTreeMap<i64, PolyMatrix>> {
    let (f, e) = (k.field(), k.e());
    let mut out = BTreeMap::new();
    for (n, _) in maps.iter() {
        if !k.spots().contains(n) {
            return Err(Error::DimensionMismatch(format!("{what} given at spot {n} outside the source")));
        }
    }
    let mut maps = maps;
    for n in k.spots() {
        let (rows, cols) = (l.rank(n + offset), k.rank(n));
        let m = maps.remove(&n).unwrap_or_else(|| poly_zero_matrix(f, e, rows, cols));
        if m.len() != rows || m.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!("{what} at spot {n} must be {rows}x{cols}")));
        }
        let m: PolyMatrix = m.iter().map(|r| r.iter().map(|p| p.truncate(k.precision())).collect()).collect();
        out.insert(n, m);
    }
    Ok(out)
}

fn d_or_zero(k: &FilteredFreeComplex, n: i64) -> PolyMatrix {
    match k.differential(n) {
        Some(d) => d.clone(),
        None => poly_zero_matrix(k.field(), k.e(), k.rank(n + 1), k.rank(n)),
    }
}

#[derive(Clone, Debug)]
pub struct ChainMap {
    source: FilteredFreeComplex,
    target: FilteredFreeComplex,
    maps: BTreeMap<i64, PolyMatrix>,
}

impl ChainMap {
    /// `maps[n] : K^n → L^n`; spots left out are zero.
    pub fn new(source: &FilteredFreeComplex, target: &FilteredFreeComplex, maps: BTreeMap<i64, PolyMatrix>) -> Result<ChainMap> {
        check_compatible(source, target)?;
        let maps = spot_maps(source, target, maps, 0, "chain map")?;
        let f = ChainMap {
            source: source.clone(),
            target: target.clone(),
            maps,
        };
        if let Some(n) = f.commutation_failure() {
            return Err(Error::NotAChainMap(format!("d f != f d at spot {n}")));
        }
        Ok(f)
    }

    pub fn identity(k: &FilteredFreeComplex) -> ChainMap {
        let maps = k.spots().map(|n| (n, poly_identity(k.field(), k.e(), k.rank(n)))).collect();
        ChainMap::new(k, k, maps).expect("identity is a chain map")
    }

    pub fn zero(k: &FilteredFreeComplex, l: &FilteredFreeComplex) -> Result<ChainMap> {
        ChainMap::new(k, l, BTreeMap::new())
    }

    pub fn source(&self) -> &FilteredFreeComplex {
        &self.source
    }

    pub fn target(&self) -> &FilteredFreeComplex {
        &self.target
    }

    pub fn map(&self, n: i64) -> &PolyMatrix {
        &self.maps[&n]
    }

    /// First spot where `d f^n - f^{n+1} d` is nonzero modulo `m^{N+1}`.
    fn commutation_failure(&self) -> Option<i64> {
        let (k, l) = (&self.source, &self.target);
        let (fld, e, top) = (k.field(), k.e(), k.precision());
        for n in k.spots() {
            let df = poly_mat_mul(&d_or_zero(l, n), &self.maps[&n], k.rank(n), top, fld, e);
            let next = self
                .maps
                .get(&(n + 1))
                .cloned()
                .unwrap_or_else(|| poly_zero_matrix(fld, e, l.rank(n + 1), k.rank(n + 1)));
            let fd = poly_mat_mul(&next, &d_or_zero(k, n), k.rank(n), top, fld, e);
            if !is_zero_poly_matrix(&poly_mat_add(&df, &poly_mat_neg(&fd))) {
                return Some(n);
            }
        }
        None
    }

    /// `f^n` on `K̄^n`.
    pub fn apply(&self, n: i64, v: &[Scalar]) -> Vector {
        apply_poly_matrix(
            self.source.jet(),
            self.source.field(),
            &self.maps[&n],
            self.source.rank(n),
            self.target.rank(n),
            v,
        )
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChainMap) -> Result<ChainMap> {
        let k = &self.source;
        let maps = k
            .spots()
            .map(|n| {
                let outer = other.maps.get(&n).cloned().unwrap_or_else(|| {
                    poly_zero_matrix(k.field(), k.e(), other.target.rank(n), self.target.rank(n))
                });
                let m = poly_mat_mul(
                    &outer,
                    &self.maps[&n],
                    k.rank(n),
                    k.precision(),
                    k.field(),
                    k.e(),
                );
                (n, m)
            })
            .collect();
        ChainMap::new(k, &other.target, maps)
    }

    pub fn sub(&self, other: &ChainMap) -> Result<ChainMap> {
        let maps = self
            .maps
            .iter()
            .map(|(n, m)| (*n, poly_mat_add(m, &poly_mat_neg(&other.maps[n]))))
            .collect();
        ChainMap::new(&self.source, &self.target, maps)
    }

    pub fn equals(&self, other: &ChainMap) -> bool {
        self.maps == other.maps
    }
}

/// `s^n : K^n → L^{n-1}`.
#[derive(Clone, Debug)]
pub struct Homotopy {
    source: FilteredFreeComplex,
    target: FilteredFreeComplex,
    maps: BTreeMap<i64, PolyMatrix>,
}

impl Homotopy {
    pub fn new(source: &FilteredFreeComplex, target: &FilteredFreeComplex, maps: BTreeMap<i64, PolyMatrix>) -> Result<Homotopy> {
        check_compatible(source, target)?;
        let maps = spot_maps(source, target, maps, -1, "homotopy")?;
        Ok(Homotopy {
            source: source.clone(),
            target: target.clone(),
            maps,
        })
    }

    pub fn map(&self, n: i64) -> &PolyMatrix {
        &self.maps[&n]
    }

    /// The null-homotopic chain map `d s + s d`.
    pub fn boundary(&self) -> ChainMap {
        let (k, l) = (&self.source, &self.target);
        let (fld, e, top) = (k.field(), k.e(), k.precision());
        let maps = k
            .spots()
            .map(|n| {
                let ds = poly_mat_mul(&d_or_zero(l, n - 1), &self.maps[&n], k.rank(n), top, fld, e);
                let next = self
                    .maps
                    .get(&(n + 1))
                    .cloned()
                    .unwrap_or_else(|| poly_zero_matrix(fld, e, l.rank(n), k.rank(n + 1)));
                let sd = poly_mat_mul(&next, &d_or_zero(k, n), k.rank(n), top, fld, e);
                (n, poly_mat_add(&ds, &sd))
            })
            .collect();
        ChainMap::new(k, l, maps).expect("d s + s d is a chain map")
    }
}

/// Matrices of `E_r(f)` on every cell, in class bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageMaps {
    pub r: usize,
    pub maps: BTreeMap<(i64, usize), Matrix>,
}

impl PageMaps {
    pub fn is_zero(&self) -> bool {
        self.maps.values().all(Matrix::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.maps.values().all(|m| m.rows() == m.cols() && *m == Matrix::identity(m.field(), m.rows()))
    }

    /// `other ∘ self` cellwise.
    pub fn then(&self, other: &PageMaps) -> Result<PageMaps> {
        let mut maps = BTreeMap::new();
        for (key, m) in &self.maps {
            // Cells outside the middle complex's spots carry zero maps.
            let product = match other.maps.get(key) {
                Some(o) => o.mul(m)?,
                None => Matrix::zeros(m.field(), 0, m.cols()),
            };
            maps.insert(*key, product);
        }
        Ok(PageMaps { r: self.r, maps })
    }
}

/// `[x] ↦ [f x]` on page `r`.
pub fn map_on_page(f: &ChainMap, src: &SpectralSequence, tgt: &SpectralSequence, r: usize) -> Result<PageMaps> {
    let k = f.source();
    let l = f.target();
    let fld = k.field();
    let mut maps = BTreeMap::new();
    for n in k.spots() {
        for p in 0..=k.precision() {
            let reps = src.representatives(r, n, p);
            let rows = tgt.dim(r, n, p);
            let mut m = Matrix::zeros(fld, rows, reps.len());
            if rows > 0 && l.spots().contains(&n) {
                for (j, x) in reps.iter().enumerate() {
                    let y = f.apply(n, x);
                    for (i, c) in tgt.class_of(r, n, p, &y)?.into_iter().enumerate() {
                        m.set(i, j, c);
                    }
                }
            }
            maps.insert((n, p), m);
        }
    }
    Ok(PageMaps { r, maps })
}

/// Induced maps on `E_1 ..= E_{N+1}`.
pub fn map_on_pages(f: &ChainMap) -> Result<Vec<PageMaps>> {
    let src = SpectralSequence::compute(f.source())?;
    let tgt = SpectralSequence::compute(f.target())?;
    (1..=src.last_page()).map(|r| map_on_page(f, &src, &tgt, r)).collect()
}

/// Whether `f = d s + s d` modulo precision and every induced page map
/// vanishes.
pub fn is_null_homotopic_action(f: &ChainMap, s: &Homotopy) -> Result<bool> {
    if !f.equals(&s.boundary()) {
        return Err(Error::Precondition("f is not d s + s d for the given homotopy".into()));
    }
    Ok(map_on_pages(f)?.iter().all(PageMaps::is_zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtered::complex::tests::{complex, two_by_two_example};

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(s, 1, Field::Rationals).unwrap()
    }

    #[test]
    fn half_identity_homotopy_on_t() {
        let k = complex(Field::Rationals, 1, 5, 0, &[1, 1], &[&[&["t"]]]);
        let s = Homotopy::new(&k, &k, [(1, vec![vec![p("1/2")]])].into_iter().collect()).unwrap();
        let h = s.boundary();
        assert_eq!(h.map(0)[0][0], p("1/2*t"));
        assert_eq!(h.map(1)[0][0], p("1/2*t"));
        assert!(is_null_homotopic_action(&h, &s).unwrap());
    }

    #[test]
    fn identity_and_zero() {
        let k = two_by_two_example(6);
        for m in map_on_pages(&ChainMap::identity(&k)).unwrap() {
            assert!(m.is_identity());
        }
        for m in map_on_pages(&ChainMap::zero(&k, &k).unwrap()).unwrap() {
            assert!(m.is_zero());
        }
    }

    #[test]
    fn non_chain_map_is_rejected() {
        let k = complex(Field::Rationals, 1, 5, 0, &[1, 1], &[&[&["t"]]]);
        let maps = [(0, vec![vec![p("1")]])].into_iter().collect();
        assert!(matches!(ChainMap::new(&k, &k, maps), Err(Error::NotAChainMap(_))));
    }
}
