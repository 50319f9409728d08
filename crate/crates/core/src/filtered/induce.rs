//! The E-module on `H(K ⊗ k)`, the total complex of the first page and
//! vanishing predictions read off from it.
//!
//! `H^n(K ⊗ k)` sits in degree `d_top - n` and `e_a` acts by `[v] ↦ [D_a v]`,
//! where `D_a` is the coefficient of `t_a` in `d`. A spot `n` of `K`
//! corresponds to spot `n - n_min` of `L(P)`, `n_min` being the lowest spot
//! with `H^n(K ⊗ k) ≠ 0`.

use std::collections::BTreeMap;
use std::fmt;

use super::complex::{ensure_valid, reduce_mod_m, FilteredFreeComplex};
use super::criterion::ImageEchelon;
use super::pages::SpectralSequence;
use crate::bgg::{build_bgg, homology_dims, LinearSComplex};
use crate::emodule::{validate_module, ExteriorContext, GradedEModule};
use crate::error::{Error, Result};
use crate::linalg::matrix::{is_zero_vector, zero_vector};
use crate::linalg::{Echelon, Matrix, Solve, SparseEchelon, Vector};

/// Basis of `H^n(K ⊗ k)` for every spot: cycle representatives in `k^{r_n}`.
fn homology_bases(k: &FilteredFreeComplex) -> BTreeMap<i64, Vec<Vector>> {
    let reduced = reduce_mod_m(k);
    let f = k.field();
    let mut out = BTreeMap::new();
    for n in k.spots() {
        let idx = (n - k.n_lo()) as usize;
        let rank = k.rank(n);
        let mut cycles = match reduced.constants.get(idx) {
            Some(m) => m.kernel_basis(),
            None => (0..rank)
                .map(|g| {
                    let mut v = zero_vector(f, rank);
                    v[g] = f.one();
                    v
                })
                .collect(),
        };
        // Complement the boundaries, preferring late basis vectors so the
        // choice differs from the one made by the page engine.
        cycles.reverse();
        let mut span = Echelon::new(f, rank);
        if idx > 0 {
            let m = &reduced.constants[idx - 1];
            for c in 0..m.cols() {
                span.insert_plain(m.column(c));
            }
        }
        let mut reps: Vec<Vector> = cycles.into_iter().filter(|v| span.insert_plain(v.clone()).is_some()).collect();
        reps.reverse();
        out.insert(n, reps);
    }
    out
}

/// Coefficient of `t_a` in each entry of `d^n`.
fn linear_part(k: &FilteredFreeComplex, n: i64, a: usize) -> Matrix {
    let f = k.field();
    let mut m = Matrix::zeros(f, k.rank(n + 1), k.rank(n));
    if let Some(d) = k.differential(n) {
        for (i, row) in d.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                m.set(i, j, p.linear_coefficient(a));
            }
        }
    }
    m
}

/// Coordinates of a cycle of `K ⊗ k` at spot `n` in the basis `reps` of
/// homology.
fn homology_coordinates(k: &FilteredFreeComplex, n: i64, reps: &[Vector], v: &[crate::linalg::Scalar]) -> Result<Vector> {
    let f = k.field();
    let rank = k.rank(n);
    let mut ech = Echelon::with_payload(f, rank, reps.len());
    let reduced = reduce_mod_m(k);
    let idx = (n - k.n_lo()) as usize;
    if idx > 0 {
        let m = &reduced.constants[idx - 1];
        for c in 0..m.cols() {
            ech.insert(m.column(c), zero_vector(f, reps.len()));
        }
    }
    for (i, r) in reps.iter().enumerate() {
        let mut unit = zero_vector(f, reps.len());
        unit[i] = f.one();
        ech.insert(r.clone(), unit);
    }
    let mut w = v.to_vec();
    let mut payload = zero_vector(f, reps.len());
    ech.reduce(&mut w, Some(&mut payload));
    if !is_zero_vector(&w) {
        return Err(Error::Internal(format!("vector is not a cycle of K ⊗ k at spot {n}")));
    }
    Ok(payload.iter().map(|x| -x).collect())
}

/// `P = ⊕ H^n(K ⊗ k)` with `H^n` in degree `d_top - n` (default: the last
/// spot, so all degrees are nonnegative).
pub fn induce_emodule(k: &FilteredFreeComplex, d_top: Option<i64>) -> Result<GradedEModule> {
    ensure_valid(k)?;
    let d_top = d_top.unwrap_or(k.n_hi());
    let f = k.field();
    let ctx = ExteriorContext::new(k.e(), f);
    let bases = homology_bases(k);
    // Degrees run from d_top - n_hi (spot n_hi) up to d_top - n_lo.
    let lo = d_top - k.n_hi();
    let dims: Vec<usize> = (k.n_lo()..=k.n_hi()).rev().map(|n| bases[&n].len()).collect();
    let mut matrices: BTreeMap<(usize, i64), Matrix> = BTreeMap::new();
    for a in 0..k.e() {
        for n in k.n_lo()..k.n_hi() {
            let da = linear_part(k, n, a);
            let (src, tgt) = (&bases[&n], &bases[&(n + 1)]);
            let mut m = Matrix::zeros(f, tgt.len(), src.len());
            for (c, v) in src.iter().enumerate() {
                let coords = homology_coordinates(k, n + 1, tgt, &da.apply(v))?;
                for (r, x) in coords.into_iter().enumerate() {
                    m.set(r, c, x);
                }
            }
            matrices.insert((a, d_top - n), m);
        }
    }
    let p = GradedEModule::from_fn(ctx, lo, dims, |a, j| {
        matrices
            .get(&(a, j))
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(f, 0, 0))
    })?;
    if let Some(v) = validate_module(&ctx, &p)?.first() {
        return Err(Error::Internal(format!("induced action is not anticommutative: {v}")));
    }
    Ok(p)
}

/// Lowest spot with `H^n(K ⊗ k) ≠ 0`.
fn lowest_homology_spot(k: &FilteredFreeComplex) -> Option<i64> {
    let h = reduce_mod_m(k).homology;
    k.spots().find(|n| h[(n - k.n_lo()) as usize] > 0)
}

/// Lift of `v ∈ k^{r_n}` times the monomial with jet index `mono`.
fn lift(k: &FilteredFreeComplex, n: i64, v: &[crate::linalg::Scalar], mono: usize) -> Vector {
    let rank = k.rank(n);
    let mut x = zero_vector(k.field(), k.bar_dim(n));
    x[mono * rank..(mono + 1) * rank].clone_from_slice(v);
    x
}

/// `(E_1, d_1)` totalized along `p`, as a linear complex over `S`: spot `s`
/// carries `E_1^0(n_min + s)`, the coefficient of `x_a` sends the class of
/// `v` to the class of `t_a v`.
pub fn e1_total_complex(k: &FilteredFreeComplex) -> Result<LinearSComplex> {
    let ss = SpectralSequence::compute(k)?;
    e1_total_from(&ss)
}

fn e1_total_from(ss: &SpectralSequence) -> Result<LinearSComplex> {
    let k = ss.complex();
    let f = k.field();
    let ctx = ExteriorContext::new(k.e(), f);
    let Some(n_min) = lowest_homology_spot(k) else {
        return LinearSComplex::new(ctx, 0, Vec::new(), Vec::new());
    };
    if k.precision() < 1 {
        return Err(Error::Precision("the first-page complex needs precision N >= 1".into()));
    }
    let spots: Vec<i64> = (n_min..=k.n_hi()).collect();
    let ranks: Vec<usize> = spots.iter().map(|&n| ss.dim(1, n, 0)).collect();
    let jet = k.jet();
    let mut coefficients = Vec::new();
    for &n in &spots[..spots.len() - 1] {
        let reps = ss.representatives(1, n + 1, 0);
        let d1 = ss.differential(1, n, 0);
        // Basis of E_1^1(n+1) given by t_a · rep_j, ordered (a, j).
        let mut cols = Vec::new();
        for a in 0..k.e() {
            let mut exps = vec![0u32; k.e()];
            exps[a] = 1;
            let mono = jet.index_of(&exps).expect("degree one monomial");
            for r in &reps {
                let v = &r[..k.rank(n + 1)];
                cols.push(ss.class_of(1, n + 1, 1, &lift(k, n + 1, v, mono))?);
            }
        }
        let change = Matrix::from_columns(f, ss.dim(1, n + 1, 1), &cols);
        let mut per_a = vec![Matrix::zeros(f, reps.len(), ss.dim(1, n, 0)); k.e()];
        for c in 0..d1.cols() {
            let coords = match change.solve_in_image(&d1.column(c))? {
                Solve::Preimage(u) => u,
                Solve::NotInImage(_) => {
                    return Err(Error::Internal("t_a-multiples do not span E_1^1".into()));
                }
            };
            for a in 0..k.e() {
                for j in 0..reps.len() {
                    per_a[a].set(j, c, coords[a * reps.len() + j].clone());
                }
            }
        }
        coefficients.push(per_a);
    }
    LinearSComplex::new(ctx, 0, ranks, coefficients)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E1Check {
    pub passed: bool,
    /// Spot of `K` matched with spot 0 of `L(P)`.
    pub first_spot: Option<i64>,
    pub max_p: usize,
    pub failures: Vec<String>,
}

impl fmt::Display for E1Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            write!(f, "E1 total complex is isomorphic to L(P) (p <= {})", self.max_p)
        } else {
            write!(f, "E1 check failed: {}", self.failures.join("; "))
        }
    }
}

/// Checks that `v ⊗ m ↦ [v · m]` is an isomorphism `L(P) → (E_1, d_1)` for
/// `p ≤ N - 1`: bijective on every cell and commuting with differentials.
pub fn e1_check(k: &FilteredFreeComplex) -> Result<E1Check> {
    let ss = SpectralSequence::compute(k)?;
    let p_mod = induce_emodule(k, None)?;
    let l = build_bgg(&p_mod)?;
    let bases = homology_bases(k);
    let jet = k.jet();
    let mut failures = Vec::new();
    let max_p = k.precision().saturating_sub(1);
    let first_spot = lowest_homology_spot(k);
    // Spots without homology must have empty first-page columns.
    for n in k.spots() {
        if bases[&n].is_empty() {
            for p in 0..=max_p {
                if ss.dim(1, n, p) != 0 {
                    failures.push(format!("E_1^{p}({n}) is nonzero but H^{n}(K ⊗ k) = 0"));
                }
            }
        }
    }
    let Some(n_min) = first_spot else {
        return Ok(E1Check {
            passed: failures.is_empty(),
            first_spot,
            max_p,
            failures,
        });
    };
    let phi = |n: i64, v: &[crate::linalg::Scalar], mono: usize, p: usize| ss.class_of(1, n, p, &lift(k, n, v, mono));
    for s in 0..l.spots() {
        let n = n_min + s as i64;
        let reps = &bases[&n];
        if reps.len() != l.rank(s) {
            failures.push(format!("spot {s}: rank {} vs dim H^{n} = {}", l.rank(s), reps.len()));
            continue;
        }
        for p in 0..=max_p {
            // Φ on the cell (n, p).
            let mut cols = Vec::new();
            let mut sources = Vec::new();
            for mono in jet.start(p)..jet.start(p + 1) {
                for (i, v) in reps.iter().enumerate() {
                    cols.push(phi(n, v, mono, p)?);
                    sources.push((i, mono));
                }
            }
            let dim = ss.dim(1, n, p);
            let m = Matrix::from_columns(k.field(), dim, &cols);
            if m.rows() != m.cols() || m.rank() != dim {
                failures.push(format!("cell (n={n}, p={p}): H ⊗ Sym^{p} does not map isomorphically onto E_1"));
                continue;
            }
            if s + 1 >= l.spots() || p + 1 > k.precision() {
                continue;
            }
            // d_1 Φ = Φ ∂ on every basis element.
            let d1 = ss.differential(1, n, p);
            let next = &bases[&(n + 1)];
            for (col, &(i, mono)) in sources.iter().enumerate() {
                let lhs = d1.apply(&cols[col]);
                let mut rhs = zero_vector(k.field(), d1.rows());
                for a in 0..k.e() {
                    let mut exps = jet.monomial(mono).to_vec();
                    exps[a] += 1;
                    let Some(target_mono) = jet.index_of(&exps) else { continue };
                    let coeff = l.coefficient(s, a);
                    for (j, w) in next.iter().enumerate() {
                        let c = coeff.get(j, i);
                        if c.is_zero() {
                            continue;
                        }
                        let img = phi(n + 1, w, target_mono, p + 1)?;
                        crate::linalg::matrix::axpy(&mut rhs, c, &img);
                    }
                }
                if lhs != rhs {
                    failures.push(format!("square at (n={n}, p={p}) does not commute"));
                    break;
                }
            }
        }
    }
    Ok(E1Check {
        passed: failures.is_empty(),
        first_spot,
        max_p,
        failures,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishingPrediction {
    /// Symmetric-degree truncation used for exactness of the `E_1` complex.
    pub truncation: usize,
    /// Spots with `H^n(K) = 0` certified, ascending.
    pub certified: Vec<i64>,
    /// Certified spots where the truncated direct computation disagrees.
    pub contradicted: Vec<i64>,
    /// Truncation of the direct check, `min(T, N - 2)`.
    pub check_bound: Option<usize>,
}

impl fmt::Display for VanishingPrediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list: Vec<String> = self.certified.iter().map(|n| n.to_string()).collect();
        write!(
            f,
            "H^n(K) = 0 certified for n in {{{}}} (T = {})",
            list.join(", "),
            self.truncation
        )?;
        if !self.contradicted.is_empty() {
            write!(f, "; direct computation contradicts n = {:?}", self.contradicted)?;
        }
        Ok(())
    }
}

/// Spots where `(E_1, d_1)` is exact through symmetric degree `T`, each
/// cross-checked on `K̄`: cycles of `d^n` must be boundaries modulo
/// `F^{B+1}`.
pub fn predict_vanishing(k: &FilteredFreeComplex, truncation: usize) -> Result<VanishingPrediction> {
    ensure_valid(k)?;
    let p_mod = induce_emodule(k, None)?;
    let l = build_bgg(&p_mod)?;
    let n_min = lowest_homology_spot(k);
    let mut certified = Vec::new();
    for n in k.spots() {
        let Some(n_min) = n_min.filter(|&m| n >= m) else {
            certified.push(n);
            continue;
        };
        if reduce_mod_m(k).homology[(n - k.n_lo()) as usize] == 0 {
            certified.push(n);
            continue;
        }
        let s = (n - n_min) as usize;
        let t_max = l.generation_degree(s) + truncation as i64;
        if homology_dims(&l, s, t_max).dims.is_empty() {
            certified.push(n);
        }
    }
    let check_bound = k.precision().checked_sub(2).map(|b| b.min(truncation));
    let mut contradicted = Vec::new();
    if let Some(b) = check_bound {
        for &n in &certified {
            if !cycles_are_boundaries(k, n, b) {
                contradicted.push(n);
            }
        }
    }
    Ok(VanishingPrediction {
        truncation,
        certified,
        contradicted,
        check_bound,
    })
}

/// Whether every cycle of `d^n` on `K̄^n` agrees with a boundary modulo
/// `F^{b+1}`.
fn cycles_are_boundaries(k: &FilteredFreeComplex, n: i64, b: usize) -> bool {
    let f = k.field();
    let cut = k.filt_start(n, b + 1);
    let mut kernel = ImageEchelon::new(f, k.bar_dim(n + 1));
    kernel.add_columns(k, n + 1, 0..k.bar_dim(n));
    let mut boundaries = SparseEchelon::new(f, cut);
    if n > k.n_lo() {
        for idx in 0..k.bar_dim(n - 1) {
            let col: Vec<_> = k.d_column_sparse(n - 1, idx).into_iter().filter(|(i, _)| *i < cut).collect();
            boundaries.insert(col);
        }
    }
    kernel.kernel().iter().all(|z| {
        let v: Vec<_> = z.iter().filter(|(i, _)| *i < cut).cloned().collect();
        boundaries.contains(v)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtered::complex::tests::{complex, two_by_two_example};
    use crate::linalg::Field;

    #[test]
    fn elliptic_model_from_t() {
        let k = complex(Field::Rationals, 1, 5, 0, &[1, 1], &[&[&["t"]]]);
        let p = induce_emodule(&k, Some(1)).unwrap();
        assert_eq!((p.dim(0), p.dim(1)), (1, 1));
        assert_eq!(p.action(0, 1), Matrix::from_i64(Field::Rationals, &[&[1]]));
        let l = e1_total_complex(&k).unwrap();
        assert_eq!(l.ranks(), &[1, 1]);
        assert_eq!(l.coefficient(0, 0), &Matrix::from_i64(Field::Rationals, &[&[1]]));
        assert!(e1_check(&k).unwrap().passed);
    }

    #[test]
    fn two_by_two_has_zero_action() {
        let k = two_by_two_example(6);
        let p = induce_emodule(&k, None).unwrap();
        assert_eq!((p.dim(0), p.dim(1)), (1, 1));
        assert!(p.action(0, 1).is_zero());
        assert!(e1_check(&k).unwrap().passed);
    }

    #[test]
    fn genus_two_shape() {
        let k = complex(Field::Rationals, 2, 4, 0, &[1, 2], &[&[&["t1"], &["t2"]]]);
        let l = e1_total_complex(&k).unwrap();
        assert_eq!(l.ranks(), &[1, 2]);
        let p = induce_emodule(&k, None).unwrap();
        assert_eq!(build_bgg(&p).unwrap().ranks(), l.ranks());
        assert!(e1_check(&k).unwrap().passed);
    }

    #[test]
    fn t_squared_has_zero_action() {
        let k = complex(Field::Rationals, 1, 5, 0, &[1, 1], &[&[&["t^2"]]]);
        assert!(induce_emodule(&k, None).unwrap().action(0, 1).is_zero());
    }

    #[test]
    fn direct_check_detects_homology() {
        let k = complex(Field::Rationals, 1, 6, 0, &[1, 1], &[&[&["t"]]]);
        assert!(cycles_are_boundaries(&k, 0, 4));
        assert!(!cycles_are_boundaries(&k, 1, 4));
        let single = complex(Field::Rationals, 1, 6, 0, &[1], &[]);
        assert!(!cycles_are_boundaries(&single, 0, 4));
    }

    #[test]
    fn vanishing_examples() {
        let k = complex(Field::Rationals, 1, 6, 0, &[1, 1], &[&[&["t"]]]);
        let v = predict_vanishing(&k, 4).unwrap();
        assert_eq!(v.certified, vec![0]);
        assert!(v.contradicted.is_empty());
        let single = complex(Field::Rationals, 1, 6, 0, &[1], &[]);
        assert!(predict_vanishing(&single, 4).unwrap().certified.is_empty());
        let zero = complex(Field::Rationals, 1, 6, 0, &[0, 0], &[&[]]);
        assert_eq!(predict_vanishing(&zero, 4).unwrap().certified, vec![0, 1]);
    }
}
