//! Seeded random instances for property sweeps.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::emodule::{direct_sum, dual_module, shift, ExteriorContext, GradedEModule};
use crate::error::Result;
use crate::filtered::maps::{poly_identity, poly_mat_add, poly_mat_mul, poly_mat_neg, poly_zero_matrix};
use crate::filtered::{ChainMap, FilteredFreeComplex, Homotopy, PolyMatrix, Polynomial};
use crate::linalg::{BasisKind, Field, Matrix, MonomialBasis, Scalar};

fn small_nonzero<R: Rng>(rng: &mut R, field: Field) -> Scalar {
    let v = *[-3i64, -2, -1, 1, 2, 3].choose(rng).expect("nonempty");
    field.from_i64(v)
}

fn small<R: Rng>(rng: &mut R, field: Field) -> Scalar {
    field.from_i64(rng.gen_range(-3..=3))
}

/// A random polynomial with terms in the given degrees; nonzero when
/// `nonzero` is set.
pub fn random_polynomial<R: Rng>(rng: &mut R, field: Field, e: usize, degrees: &[usize], nonzero: bool) -> Polynomial {
    loop {
        let mut p = Polynomial::zero(field, e);
        for &deg in degrees {
            let basis = MonomialBasis::new(BasisKind::Symmetric, e, deg);
            for m in basis.monomials() {
                if rng.gen_bool(0.5) {
                    p.add_term(m.clone(), &small_nonzero(rng, field));
                }
            }
        }
        if !nonzero || !p.is_zero() {
            return p;
        }
    }
}

/// Shape of the differentials in a random complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entries {
    /// Every entry homogeneous of this degree.
    Homogeneous(usize),
    /// Entries mixing degrees 0, 1, 2, followed by a polynomial change of
    /// basis.
    Mixed,
}

fn block_entry<R: Rng>(rng: &mut R, field: Field, e: usize, entries: Entries) -> Polynomial {
    match entries {
        Entries::Homogeneous(r) => random_polynomial(rng, field, e, &[r], true),
        Entries::Mixed => {
            let degrees: Vec<usize> = (0..=2).filter(|_| rng.gen_bool(0.5)).collect();
            let degrees = if degrees.is_empty() { vec![rng.gen_range(1..=2)] } else { degrees };
            // Constants are kept rare so homology of K ⊗ k is not usually zero.
            let degrees: Vec<usize> = degrees.into_iter().filter(|&d| d > 0 || rng.gen_bool(0.4)).collect();
            random_polynomial(rng, field, e, if degrees.is_empty() { &[1] } else { &degrees }, true)
        }
    }
}

/// `R^a → R^b` at spots `(0, 1)`.
fn two_term<R: Rng>(rng: &mut R, field: Field, e: usize, n: usize, a: usize, b: usize, entries: Entries) -> FilteredFreeComplex {
    let m = (0..b)
        .map(|_| (0..a).map(|_| block_entry(rng, field, e, entries)).collect())
        .collect();
    FilteredFreeComplex::new(field, e, n, 0, vec![a, b], vec![m]).expect("two-term complex")
}

/// Tensor product, `d(c ⊗ x) = dc ⊗ x + (-1)^i c ⊗ dx` for `c` in spot `i`.
pub fn tensor(c: &FilteredFreeComplex, d: &FilteredFreeComplex) -> Result<FilteredFreeComplex> {
    let (field, e, top) = (c.field(), c.e(), c.precision().min(d.precision()));
    let lo = c.n_lo() + d.n_lo();
    let hi = c.n_hi() + d.n_hi();
    // Basis of spot n: pairs (i, gc, gd) with i + j = n, in order of i.
    let basis = |n: i64| -> Vec<(i64, usize, usize)> {
        let mut out = Vec::new();
        for i in c.spots() {
            let j = n - i;
            for gc in 0..c.rank(i) {
                for gd in 0..d.rank(j) {
                    out.push((i, gc, gd));
                }
            }
        }
        out
    };
    let ranks: Vec<usize> = (lo..=hi).map(|n| basis(n).len()).collect();
    let one = Polynomial::from_i64(field, e, 1);
    let mut diffs = Vec::new();
    for n in lo..hi {
        let src = basis(n);
        let tgt = basis(n + 1);
        let index: BTreeMap<(i64, usize, usize), usize> = tgt.iter().enumerate().map(|(k, b)| (*b, k)).collect();
        let mut m = poly_zero_matrix(field, e, tgt.len(), src.len());
        for (col, &(i, gc, gd)) in src.iter().enumerate() {
            let j = n - i;
            if let Some(dc) = c.differential(i) {
                for (row, r) in dc.iter().enumerate() {
                    if let Some(&t) = index.get(&(i + 1, row, gd)) {
                        m[t][col] = m[t][col].add(&r[gc]);
                    }
                }
            }
            if let Some(dd) = d.differential(j) {
                let sign = if i.rem_euclid(2) == 0 { one.clone() } else { one.neg() };
                for (row, r) in dd.iter().enumerate() {
                    if let Some(&t) = index.get(&(i, gc, row)) {
                        m[t][col] = m[t][col].add(&r[gd].mul(&sign));
                    }
                }
            }
        }
        diffs.push(m);
    }
    FilteredFreeComplex::new(field, e, top, lo, ranks, diffs)
}

fn shifted(k: &FilteredFreeComplex, s: i64) -> FilteredFreeComplex {
    FilteredFreeComplex::new(k.field(), k.e(), k.precision(), k.n_lo() + s, k.ranks().to_vec(), k.differentials().to_vec())
        .expect("shift")
}

fn zero_block(field: Field, e: usize, n: usize, rank: usize) -> FilteredFreeComplex {
    FilteredFreeComplex::new(field, e, n, 0, vec![rank], Vec::new()).expect("single spot")
}

/// Invertible polynomial matrix `I + U` with `U` strictly upper triangular,
/// and its inverse.
fn unipotent<R: Rng>(rng: &mut R, field: Field, e: usize, rank: usize, precision: usize) -> (PolyMatrix, PolyMatrix) {
    let mut u = poly_zero_matrix(field, e, rank, rank);
    for i in 0..rank {
        for j in i + 1..rank {
            if rng.gen_bool(0.5) {
                u[i][j] = random_polynomial(rng, field, e, &[0, 1, 2], false);
            }
        }
    }
    let id = poly_identity(field, e, rank);
    let g = poly_mat_add(&id, &u);
    // (I + U)^{-1} = Σ (-U)^k
    let minus_u = poly_mat_neg(&u);
    let mut inv = id.clone();
    let mut power = id;
    for _ in 1..rank.max(1) {
        power = poly_mat_mul(&power, &minus_u, rank, precision, field, e);
        inv = poly_mat_add(&inv, &power);
    }
    (g, inv)
}

/// A random invertible constant matrix and its inverse.
fn constant_invertible<R: Rng>(rng: &mut R, field: Field, e: usize, rank: usize) -> (PolyMatrix, PolyMatrix) {
    loop {
        let m = Matrix::from_rows_shaped(
            field,
            rank,
            rank,
            (0..rank).map(|_| (0..rank).map(|_| small(rng, field)).collect()).collect(),
        )
        .expect("square");
        if let Some(inv) = m.inverse() {
            let lift = |m: &Matrix| -> PolyMatrix {
                (0..rank)
                    .map(|i| (0..rank).map(|j| Polynomial::constant(field, e, m.get(i, j).clone())).collect())
                    .collect()
            };
            return (lift(&m), lift(&inv));
        }
    }
}

/// Changes basis by `g_n` at every spot: `d'^n = g_{n+1} d^n g_n^{-1}`.
/// Returns the new complex and the isomorphism `K → K'`, with its inverse.
pub fn conjugate<R: Rng>(rng: &mut R, k: &FilteredFreeComplex, polynomial: bool) -> (FilteredFreeComplex, BTreeMap<i64, PolyMatrix>, BTreeMap<i64, PolyMatrix>) {
    let (field, e, top) = (k.field(), k.e(), k.precision());
    let mut g = BTreeMap::new();
    let mut ginv = BTreeMap::new();
    for n in k.spots() {
        let (a, b) = if polynomial {
            unipotent(rng, field, e, k.rank(n), top)
        } else {
            constant_invertible(rng, field, e, k.rank(n))
        };
        g.insert(n, a);
        ginv.insert(n, b);
    }
    let diffs = (k.n_lo()..k.n_hi())
        .map(|n| {
            let d = k.differential(n).expect("inner spot");
            let t = poly_mat_mul(d, &ginv[&n], k.rank(n), top, field, e);
            poly_mat_mul(&g[&(n + 1)], &t, k.rank(n), top, field, e)
        })
        .collect();
    let out = FilteredFreeComplex::new(field, e, top, k.n_lo(), k.ranks().to_vec(), diffs).expect("conjugate");
    (out, g, ginv)
}

/// Random complex with at most four spots of rank at most four.
pub fn random_complex<R: Rng>(rng: &mut R, field: Field, e: usize, precision: usize, entries: Entries) -> FilteredFreeComplex {
    let spots = rng.gen_range(2..=4usize);
    let mut ranks = vec![0usize; spots];
    let mut parts: Vec<FilteredFreeComplex> = Vec::new();
    let blocks = rng.gen_range(1..=3);
    for _ in 0..blocks {
        let kind = rng.gen_range(0..4);
        let part = match kind {
            0 => {
                let a = rng.gen_range(1..=2);
                let b = rng.gen_range(1..=2);
                two_term(rng, field, e, precision, a, b, entries)
            }
            1 if spots >= 3 => {
                let x = two_term(rng, field, e, precision, 1, 1, entries);
                let y = two_term(rng, field, e, precision, 1, 1, entries);
                tensor(&x, &y).expect("tensor")
            }
            2 if spots >= 4 && e >= 2 => {
                let x = two_term(rng, field, e, precision, 1, 1, entries);
                let y = two_term(rng, field, e, precision, 1, 1, entries);
                let z = two_term(rng, field, e, precision, 1, 1, entries);
                tensor(&tensor(&x, &y).expect("tensor"), &z).expect("tensor")
            }
            _ => zero_block(field, e, precision, 1),
        };
        let width = part.ranks().len();
        let offset = rng.gen_range(0..=spots - width);
        let fits = (0..width).all(|i| ranks[offset + i] + part.ranks()[i] <= 4);
        if !fits {
            continue;
        }
        for i in 0..width {
            ranks[offset + i] += part.ranks()[i];
        }
        parts.push(shifted(&part, offset as i64));
    }
    if parts.is_empty() {
        parts.push(two_term(rng, field, e, precision, 1, 1, entries));
    }
    let pad = zero_block(field, e, precision, 0);
    parts.push(shifted(&pad, spots as i64 - 1));
    let sum = crate::filtered::sum_complexes(&parts).expect("sum");
    let polynomial = matches!(entries, Entries::Mixed);
    conjugate(rng, &sum, polynomial).0
}

/// A random homotopy `s : K → L` and the null-homotopic map `d s + s d`.
pub fn random_null_homotopic<R: Rng>(rng: &mut R, k: &FilteredFreeComplex, l: &FilteredFreeComplex) -> (Homotopy, ChainMap) {
    let (field, e) = (k.field(), k.e());
    let maps = k
        .spots()
        .map(|n| {
            let m = (0..l.rank(n - 1))
                .map(|_| (0..k.rank(n)).map(|_| random_polynomial(rng, field, e, &[0, 1], false)).collect())
                .collect();
            (n, m)
        })
        .collect();
    let s = Homotopy::new(k, l, maps).expect("shapes match");
    let h = s.boundary();
    (s, h)
}

/// `L` homotopy equivalent to `K` together with `f : K → L`, `g : L → K`
/// and homotopies showing `g f ≃ id`, `f g ≃ id`.
pub struct HomotopyEquivalence {
    pub source: FilteredFreeComplex,
    pub target: FilteredFreeComplex,
    pub f: ChainMap,
    pub g: ChainMap,
    /// `id_L - f g = d s + s d`.
    pub s_target: Homotopy,
}

/// `L = φ(K ⊕ C)` for a contractible `C = (R^a --u--> R^a)` with `u` a unit
/// and `φ` a polynomial change of basis.
pub fn random_homotopy_equivalence<R: Rng>(rng: &mut R, k: &FilteredFreeComplex) -> HomotopyEquivalence {
    let (field, e, top) = (k.field(), k.e(), k.precision());
    let spot = rng.gen_range(k.n_lo()..k.n_hi().max(k.n_lo() + 1));
    let a = rng.gen_range(1..=2);
    // u = unipotent times a constant invertible matrix, so a unit over R.
    let (c0, c0inv) = constant_invertible(rng, field, e, a);
    let (u1, u1inv) = unipotent(rng, field, e, a, top);
    let u = poly_mat_mul(&u1, &c0, a, top, field, e);
    let uinv = poly_mat_mul(&c0inv, &u1inv, a, top, field, e);
    let contractible = FilteredFreeComplex::new(field, e, top, spot, vec![a, a], vec![u]).expect("two-term");
    let sum = crate::filtered::sum_complexes(&[k.clone(), contractible.clone()]).expect("sum");
    let (target, phi, phiinv) = conjugate(rng, &sum, true);

    // Inclusion and projection between K and K ⊕ C.
    let incl: BTreeMap<i64, PolyMatrix> = k
        .spots()
        .map(|n| {
            let mut m = poly_zero_matrix(field, e, sum.rank(n), k.rank(n));
            for i in 0..k.rank(n) {
                m[i][i] = Polynomial::from_i64(field, e, 1);
            }
            (n, m)
        })
        .collect();
    let proj: BTreeMap<i64, PolyMatrix> = sum
        .spots()
        .filter(|n| k.spots().contains(n))
        .map(|n| {
            let mut m = poly_zero_matrix(field, e, k.rank(n), sum.rank(n));
            for i in 0..k.rank(n) {
                m[i][i] = Polynomial::from_i64(field, e, 1);
            }
            (n, m)
        })
        .collect();
    let f_maps = k
        .spots()
        .map(|n| (n, poly_mat_mul(&phi[&n], &incl[&n], k.rank(n), top, field, e)))
        .collect();
    let g_maps = target
        .spots()
        .filter(|n| k.spots().contains(n))
        .map(|n| (n, poly_mat_mul(&proj[&n], &phiinv[&n], target.rank(n), top, field, e)))
        .collect();
    let f = ChainMap::new(k, &target, f_maps).expect("f is a chain map");
    let g = ChainMap::new(&target, k, g_maps).expect("g is a chain map");
    // On K ⊕ C, id - incl proj is the identity of C, which is d σ + σ d
    // with σ = u^{-1} from C^{spot+1} to C^{spot}.
    let s_maps = target
        .spots()
        .map(|n| {
            let mut sigma = poly_zero_matrix(field, e, sum.rank(n - 1), sum.rank(n));
            if n == spot + 1 {
                let (r0, c0) = (k.rank(n - 1), k.rank(n));
                for i in 0..a {
                    for j in 0..a {
                        sigma[r0 + i][c0 + j] = uinv[i][j].clone();
                    }
                }
            }
            let t = poly_mat_mul(&sigma, &phiinv[&n], target.rank(n), top, field, e);
            let prev = phi.get(&(n - 1)).cloned().unwrap_or_else(|| poly_zero_matrix(field, e, 0, 0));
            (n, poly_mat_mul(&prev, &t, target.rank(n), top, field, e))
        })
        .collect();
    let s_target = Homotopy::new(&target, &target, s_maps).expect("shapes");
    HomotopyEquivalence {
        source: k.clone(),
        target,
        f,
        g,
        s_target,
    }
}

/// Random valid module: a quotient or submodule of a small free module,
/// possibly dualized, shifted and summed.
pub fn random_module<R: Rng>(rng: &mut R, ctx: ExteriorContext, max_width: usize) -> GradedEModule {
    loop {
        let m = random_piece(rng, ctx);
        let m = if rng.gen_bool(0.3) {
            let other = random_piece(rng, ctx);
            direct_sum(ctx, &[m, shift(&other, rng.gen_range(-1..=1))]).expect("same context")
        } else {
            m
        };
        let m = m.trimmed();
        if m.is_zero() {
            continue;
        }
        let supp = m.support();
        if (supp[supp.len() - 1] - supp[0] + 1) as usize <= max_width {
            return m;
        }
    }
}

fn random_piece<R: Rng>(rng: &mut R, ctx: ExteriorContext) -> GradedEModule {
    let ngens = rng.gen_range(1..=2);
    let gens: Vec<i64> = (0..ngens).map(|_| rng.gen_range(0..=1)).collect();
    let free = GradedEModule::free(ctx, &gens);
    let m = match rng.gen_range(0..3) {
        0 => free,
        1 => quotient_by_random(rng, ctx, &free),
        _ => dual_module(&quotient_by_random(rng, ctx, &free)),
    };
    shift(&m, rng.gen_range(-1..=1))
}

/// Quotient of `m` by the submodule generated by one or two random
/// homogeneous elements.
fn quotient_by_random<R: Rng>(rng: &mut R, ctx: ExteriorContext, m: &GradedEModule) -> GradedEModule {
    let supp = m.support();
    let (Some(&lo), Some(&hi)) = (supp.first(), supp.last()) else {
        return m.clone();
    };
    let field = ctx.field;
    let mut sub: BTreeMap<i64, Vec<Vec<Scalar>>> = BTreeMap::new();
    for _ in 0..rng.gen_range(1..=2) {
        let j = rng.gen_range(lo..=hi);
        let v: Vec<Scalar> = (0..m.dim(j)).map(|_| small(rng, field)).collect();
        sub.entry(j).or_default().push(v);
    }
    crate::emodule::quotient_by_elements(m, &sub).expect("valid quotient")
}
