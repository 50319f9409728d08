//! Linear complexes over `S = Sym W` and the BGG functor `P ↦ L(P)`.
//!
//! A [`LinearSComplex`] has spots `0, 1, ..` with generator spaces `G_n`
//! sitting in internal degree `c_n = c_0 + n`, and differential
//! `g ↦ Σ_a x_a ⊗ C_a g` from spot `n` to spot `n + 1`. With `x_a` of
//! degree one the differential preserves internal degree, so the homology
//! at spot `n` splits into strands `t = c_n + u`, `u` the symmetric degree.

pub mod theorem_a;

use std::collections::BTreeMap;
use std::fmt;

use crate::emodule::regularity::check_nonpositive;
use crate::emodule::{dual_module, validate_module, ExteriorContext, GradedEModule, RegularityReport, Route};
use crate::error::{Error, Result};
use crate::linalg::sparse::{sparse_accumulate, SparseEchelon};
use crate::linalg::{BasisKind, Matrix, MonomialBasis};

pub use theorem_a::{verify_theorem_a, TheoremAReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSComplex {
    ctx: ExteriorContext,
    c0: i64,
    ranks: Vec<usize>,
    // coefficients[n][a]: G_n -> G_{n+1}
    coefficients: Vec<Vec<Matrix>>,
}

/// Homology dimensions keyed by `(spot, internal degree)`; only nonzero
/// entries are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HomologyProfile {
    pub truncation: i64,
    pub dims: BTreeMap<(usize, i64), usize>,
}

impl HomologyProfile {
    pub fn get(&self, n: usize, t: i64) -> usize {
        self.dims.get(&(n, t)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn add(&self, o: &HomologyProfile) -> HomologyProfile {
        let mut dims = self.dims.clone();
        for (k, v) in &o.dims {
            *dims.entry(*k).or_insert(0) += v;
        }
        HomologyProfile {
            truncation: self.truncation.min(o.truncation),
            dims,
        }
    }

    /// Rows `spot,degree,dim` over the nonzero entries.
    pub fn csv(&self) -> String {
        let mut out = String::from("spot,degree,dim\n");
        for ((n, t), v) in &self.dims {
            out.push_str(&format!("{n},{t},{v}\n"));
        }
        out
    }
}

impl fmt::Display for HomologyProfile {
    /// One row per spot, one column per internal degree carrying homology.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dims.is_empty() {
            return write!(f, "no homology through degree {}", self.truncation);
        }
        let mut ts: Vec<i64> = self.dims.keys().map(|k| k.1).collect();
        ts.sort_unstable();
        ts.dedup();
        let mut spots: Vec<usize> = self.dims.keys().map(|k| k.0).collect();
        spots.dedup();
        write!(f, "{:>6}", "n\\t")?;
        for t in &ts {
            write!(f, " {t:>5}")?;
        }
        for n in spots {
            writeln!(f)?;
            write!(f, "{n:>6}")?;
            for t in &ts {
                match self.get(n, *t) {
                    0 => write!(f, " {:>5}", "-")?,
                    v => write!(f, " {v:>5}")?,
                }
            }
        }
        Ok(())
    }
}

/// Outcome of [`is_exact_first_steps`]; `failure` names the first nonzero
/// homology group found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessVerdict {
    pub steps: usize,
    pub truncation: i64,
    pub exact: bool,
    pub failure: Option<(usize, i64, usize)>,
}

impl fmt::Display for ExactnessVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.failure {
            None => write!(
                f,
                "exact at the first {} spots through degree {}",
                self.steps, self.truncation
            ),
            Some((n, t, dim)) => write!(
                f,
                "not exact at the first {} spots: homology at spot {n} in degree {t} has dimension {dim}",
                self.steps
            ),
        }
    }
}

impl LinearSComplex {
    pub fn new(ctx: ExteriorContext, c0: i64, ranks: Vec<usize>, coefficients: Vec<Vec<Matrix>>) -> Result<LinearSComplex> {
        if coefficients.len() != ranks.len().saturating_sub(1) {
            return Err(Error::InvalidComplex(format!(
                "{} spots need {} differentials, got {}",
                ranks.len(),
                ranks.len().saturating_sub(1),
                coefficients.len()
            )));
        }
        for (n, cs) in coefficients.iter().enumerate() {
            if cs.len() != ctx.q {
                return Err(Error::InvalidComplex(format!(
                    "differential from spot {n} has {} coefficient matrices, expected {}",
                    cs.len(),
                    ctx.q
                )));
            }
            for m in cs {
                if m.field() != ctx.field {
                    return Err(Error::FieldMismatch(m.field(), ctx.field));
                }
                if m.shape() != (ranks[n + 1], ranks[n]) {
                    return Err(Error::DimensionMismatch(format!(
                        "coefficient matrix from spot {n} has shape {}x{}, expected {}x{}",
                        m.rows(),
                        m.cols(),
                        ranks[n + 1],
                        ranks[n]
                    )));
                }
            }
        }
        Ok(LinearSComplex {
            ctx,
            c0,
            ranks,
            coefficients,
        })
    }

    pub fn context(&self) -> ExteriorContext {
        self.ctx
    }

    pub fn spots(&self) -> usize {
        self.ranks.len()
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, n: usize) -> usize {
        self.ranks.get(n).copied().unwrap_or(0)
    }

    /// Internal degree of the generators at spot `n`.
    pub fn generation_degree(&self, n: usize) -> i64 {
        self.c0 + n as i64
    }

    pub fn coefficient(&self, n: usize, a: usize) -> &Matrix {
        &self.coefficients[n][a]
    }

    /// Pairs `(n, a, b)` where `C_a C_b + C_b C_a ≠ 0` from spot `n` to
    /// spot `n + 2`, i.e. where `d² ≠ 0`.
    pub fn d_squared_violations(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for n in 0..self.spots().saturating_sub(2) {
            for a in 0..self.ctx.q {
                for b in a..self.ctx.q {
                    let ab = self.coefficients[n + 1][a].mul(&self.coefficients[n][b]).expect("shapes");
                    let ba = self.coefficients[n + 1][b].mul(&self.coefficients[n][a]).expect("shapes");
                    if !ab.add(&ba).expect("shapes").is_zero() {
                        out.push((n, a, b));
                    }
                }
            }
        }
        out
    }

    /// Spotwise direct sum; both complexes must start in the same degree.
    pub fn direct_sum(&self, o: &LinearSComplex) -> Result<LinearSComplex> {
        if self.ctx != o.ctx || self.c0 != o.c0 {
            return Err(Error::ContextMismatch("complexes differ in context or starting degree".into()));
        }
        let spots = self.spots().max(o.spots());
        let ranks: Vec<usize> = (0..spots).map(|n| self.rank(n) + o.rank(n)).collect();
        let coeff = |c: &LinearSComplex, n: usize, a: usize| {
            if n + 1 < c.spots() {
                c.coefficients[n][a].clone()
            } else {
                Matrix::zeros(c.ctx.field, c.rank(n + 1), c.rank(n))
            }
        };
        let coefficients = (0..spots.saturating_sub(1))
            .map(|n| {
                (0..self.ctx.q)
                    .map(|a| Matrix::block_diag(self.ctx.field, &[&coeff(self, n, a), &coeff(o, n, a)]))
                    .collect()
            })
            .collect();
        LinearSComplex::new(self.ctx, self.c0, ranks, coefficients)
    }

    /// Rank of the differential from spot `n` on symmetric degree `u`.
    fn strand_rank(&self, n: usize, u: usize, sym: &[MonomialBasis]) -> usize {
        if n + 1 >= self.spots() {
            return 0;
        }
        let (ns, nt) = (self.rank(n), self.rank(n + 1));
        if ns == 0 || nt == 0 {
            return 0;
        }
        let src = &sym[u];
        let tgt = &sym[u + 1];
        let f = self.ctx.field;
        let mut ech = SparseEchelon::new(f, nt * tgt.len());
        let mut raised = vec![0u32; self.ctx.q];
        for beta in src.monomials() {
            for g in 0..ns {
                let mut entries = Vec::new();
                for a in 0..self.ctx.q {
                    raised.copy_from_slice(beta);
                    raised[a] += 1;
                    let col = tgt.index_of(&raised).expect("raised monomial exists");
                    let c = &self.coefficients[n][a];
                    for r in 0..nt {
                        let x = c.get(r, g);
                        if !x.is_zero() {
                            entries.push((r * tgt.len() + col, x.clone()));
                        }
                    }
                }
                let v = sparse_accumulate(f, entries);
                if !v.is_empty() {
                    ech.insert(v);
                }
            }
        }
        ech.rank()
    }
}

fn sym_bases(q: usize, top: usize) -> Vec<MonomialBasis> {
    (0..=top + 1).map(|u| MonomialBasis::new(BasisKind::Symmetric, q, u)).collect()
}

/// `L(P)`: spot `n` carries `S ⊗ P_{d-n}` where `d` is the top degree of
/// `P`, generated in internal degree `n`; the coefficient matrices are the
/// action matrices of `P`.
pub fn build_bgg(p: &GradedEModule) -> Result<LinearSComplex> {
    let ctx = p.context();
    let violations = validate_module(&ctx, p)?;
    if let Some(v) = violations.first() {
        return Err(Error::InvalidModule(v.to_string()));
    }
    let supp = p.support();
    if let Some(&lo) = supp.first() {
        if lo < 0 {
            return Err(Error::Precondition(format!(
                "module has a nonzero component in negative degree {lo}"
            )));
        }
    }
    let d = supp.last().copied().unwrap_or(0);
    let ranks: Vec<usize> = (0..=d).map(|n| p.dim(d - n)).collect();
    let coefficients = (0..d)
        .map(|n| (0..ctx.q).map(|a| p.action(a, d - n)).collect())
        .collect();
    LinearSComplex::new(ctx, 0, ranks, coefficients)
}

/// Homology of `L` at spot `n` in internal degrees up to `t_max`.
pub fn homology_dims(l: &LinearSComplex, n: usize, t_max: i64) -> HomologyProfile {
    let mut profile = HomologyProfile {
        truncation: t_max,
        dims: BTreeMap::new(),
    };
    let c = l.generation_degree(n);
    if n >= l.spots() || t_max < c {
        return profile;
    }
    let top = (t_max - c) as usize;
    let sym = sym_bases(l.ctx.q, top);
    for u in 0..=top {
        let size = l.rank(n) * sym[u].len();
        if size == 0 {
            continue;
        }
        let out = l.strand_rank(n, u, &sym);
        let inc = if n > 0 && u > 0 { l.strand_rank(n - 1, u - 1, &sym) } else { 0 };
        let h = size - out - inc;
        if h > 0 {
            profile.dims.insert((n, c + u as i64), h);
        }
    }
    profile
}

/// Homology at every spot through `t_max`.
pub fn homology_profile(l: &LinearSComplex, t_max: i64) -> HomologyProfile {
    let mut p = HomologyProfile {
        truncation: t_max,
        dims: BTreeMap::new(),
    };
    for n in 0..l.spots() {
        p = p.add(&homology_dims(l, n, t_max));
    }
    p.truncation = t_max;
    p
}

/// Whether `L` is exact at its `s` leftmost spots in internal degrees up
/// to `t_max`.
pub fn is_exact_first_steps(l: &LinearSComplex, s: usize, t_max: i64) -> Result<ExactnessVerdict> {
    if s > l.spots() {
        return Err(Error::OutOfRange(format!(
            "asked for {s} steps of a complex with {} spots",
            l.spots()
        )));
    }
    for n in 0..s {
        let h = homology_dims(l, n, t_max);
        if let Some((&(n, t), &dim)) = h.dims.iter().next() {
            return Ok(ExactnessVerdict {
                steps: s,
                truncation: t_max,
                exact: false,
                failure: Some((n, t, dim)),
            });
        }
    }
    Ok(ExactnessVerdict {
        steps: s,
        truncation: t_max,
        exact: true,
        failure: None,
    })
}

/// Default truncation `d + q + 4`.
pub fn default_truncation(p: &GradedEModule) -> i64 {
    p.support().last().copied().unwrap_or(0).max(0) + p.q() as i64 + 4
}

/// Regularity of `Q = P^∨` as the least `m` with `L(P)` exact at its first
/// `d - m` spots, certified through internal degree `t_max`.
pub fn regularity_via_bgg(p: &GradedEModule, t_max: i64) -> Result<RegularityReport> {
    let l = build_bgg(p)?;
    if p.is_zero() {
        return Ok(RegularityReport {
            regularity: None,
            route: Route::Bgg,
            bound: t_max.max(0) as usize,
            evidence: vec!["zero module".into()],
            betti: None,
        });
    }
    let d = p.support().last().copied().unwrap_or(0);
    let mut evidence = Vec::new();
    let mut found = d;
    for m in 0..=d {
        let verdict = is_exact_first_steps(&l, (d - m) as usize, t_max)?;
        evidence.push(format!("m = {m}: {verdict}"));
        if verdict.exact {
            found = m;
            break;
        }
    }
    Ok(RegularityReport {
        regularity: Some(found),
        route: Route::Bgg,
        bound: t_max.max(0) as usize,
        evidence,
        betti: None,
    })
}

/// [`regularity_via_bgg`] applied to the dual of a module `Q` living in
/// nonpositive degrees.
pub fn regularity_of_dual_via_bgg(q: &GradedEModule, t_max: i64) -> Result<RegularityReport> {
    check_nonpositive(q)?;
    regularity_via_bgg(&dual_module(q), t_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;

    fn ctx(q: usize) -> ExteriorContext {
        ExteriorContext::new(q, Field::Rationals)
    }

    fn koszul_module(q: usize) -> GradedEModule {
        // P_{q-i} = Λ^i V with e_a acting by wedge.
        crate::emodule::shift(&GradedEModule::free(ctx(q), &[0]), -(q as i64))
    }

    #[test]
    fn elliptic_koszul_complex() {
        let c = ctx(1);
        let one = Matrix::from_i64(c.field, &[&[1]]);
        let p = GradedEModule::new(c, 0, vec![1, 1], vec![vec![one]]).unwrap();
        let l = build_bgg(&p).unwrap();
        assert_eq!(l.spots(), 2);
        assert_eq!(l.coefficient(0, 0), &Matrix::from_i64(c.field, &[&[1]]));
        assert!(homology_dims(&l, 0, 6).dims.is_empty());
        let right = homology_dims(&l, 1, 6);
        assert_eq!(right.dims.into_iter().collect::<Vec<_>>(), vec![((1, 1), 1)]);
        assert_eq!(regularity_via_bgg(&p, 6).unwrap().regularity, Some(0));
    }

    #[test]
    fn point_and_zero_action() {
        let c = ctx(2);
        let l = build_bgg(&GradedEModule::residue_field(c, 0)).unwrap();
        assert_eq!(l.spots(), 1);
        let h = homology_dims(&l, 0, 3);
        assert_eq!((0..=3).map(|t| h.get(0, t)).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn koszul_exactness() {
        for q in 1..=4 {
            let p = koszul_module(q);
            assert_eq!(p.support(), (0..=q as i64).collect::<Vec<_>>());
            let l = build_bgg(&p).unwrap();
            assert!(l.d_squared_violations().is_empty());
            let t = q as i64 + 4;
            let h = homology_profile(&l, t);
            assert_eq!(h.total(), 1);
            assert_eq!(h.get(q, q as i64), 1);
            assert_eq!(regularity_via_bgg(&p, t).unwrap().regularity, Some(0));
        }
    }

    #[test]
    fn product_with_line_model() {
        // P_2 = k, P_1 = k^2, P_0 = 0: L(P) = S -> S^2 -> 0.
        let c = ctx(2);
        let p = GradedEModule::from_fn(c, 1, vec![2, 1], |a, _| {
            let mut m = Matrix::zeros(c.field, 2, 1);
            m.set(a, 0, c.field.one());
            m
        })
        .unwrap();
        let l = build_bgg(&p).unwrap();
        assert!(is_exact_first_steps(&l, 1, 8).unwrap().exact);
        let v = is_exact_first_steps(&l, 2, 8).unwrap();
        assert!(!v.exact);
        assert_eq!(v.failure.unwrap().0, 1);
        assert_eq!(regularity_via_bgg(&p, 8).unwrap().regularity, Some(1));
    }

    #[test]
    fn invalid_modules_are_rejected() {
        let c = ctx(2);
        let one = Matrix::from_i64(c.field, &[&[1]]);
        let p = GradedEModule::new(c, 0, vec![1, 1, 1], vec![vec![one.clone(), one.clone()], vec![one.clone(), one]])
            .unwrap();
        assert!(matches!(build_bgg(&p), Err(Error::InvalidModule(_))));
    }
}
