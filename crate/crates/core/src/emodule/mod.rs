//! Finite graded modules over the exterior algebra `E = Λ V`.
//!
//! Elements of `V` have degree `-1`, so the action of `e_a` maps `M_j` to
//! `M_{j-1}`. A module is stored on a contiguous degree interval
//! `[lo, hi]`, with one matrix per variable and degree.

pub mod betti;
pub mod regularity;

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::matrix::{is_zero_vector, zero_vector};
use crate::linalg::{Echelon, Field, Matrix, MonomialBasis, BasisKind, Scalar, Vector};

pub use betti::{betti_table, betti_table_by_syzygies, BettiTable};
pub use regularity::{regularity_definition_route, RegularityReport, Route};

/// The exterior algebra on `q` variables over a field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExteriorContext {
    pub q: usize,
    pub field: Field,
}

impl ExteriorContext {
    pub fn new(q: usize, field: Field) -> ExteriorContext {
        ExteriorContext { q, field }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedEModule {
    ctx: ExteriorContext,
    lo: i64,
    dims: Vec<usize>,
    // action[a][k]: M_{lo+k+1} -> M_{lo+k}
    action: Vec<Vec<Matrix>>,
}

/// A failure of `e_a e_b + e_b e_a = 0` on `M_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub a: usize,
    pub b: usize,
    pub degree: i64,
    pub residual: Matrix,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "e{} e{} + e{} e{} != 0 on degree {}",
            self.a + 1,
            self.b + 1,
            self.b + 1,
            self.a + 1,
            self.degree
        )
    }
}

impl GradedEModule {
    /// `action[a][k]` is the matrix of `e_{a+1}` from degree `lo + k + 1`
    /// to degree `lo + k`.
    pub fn new(ctx: ExteriorContext, lo: i64, dims: Vec<usize>, action: Vec<Vec<Matrix>>) -> Result<GradedEModule> {
        if action.len() != ctx.q {
            return Err(Error::DimensionMismatch(format!(
                "expected action matrices for {} variables, got {}",
                ctx.q,
                action.len()
            )));
        }
        let steps = dims.len().saturating_sub(1);
        for (a, mats) in action.iter().enumerate() {
            if mats.len() != steps {
                return Err(Error::DimensionMismatch(format!(
                    "variable e{} has {} matrices, expected {steps}",
                    a + 1,
                    mats.len()
                )));
            }
            for (k, m) in mats.iter().enumerate() {
                if m.field() != ctx.field {
                    return Err(Error::FieldMismatch(m.field(), ctx.field));
                }
                if m.shape() != (dims[k], dims[k + 1]) {
                    return Err(Error::DimensionMismatch(format!(
                        "action of e{} on degree {} has shape {}x{}, expected {}x{}",
                        a + 1,
                        lo + k as i64 + 1,
                        m.rows(),
                        m.cols(),
                        dims[k],
                        dims[k + 1]
                    )));
                }
            }
        }
        Ok(GradedEModule { ctx, lo, dims, action })
    }

    pub fn zero(ctx: ExteriorContext) -> GradedEModule {
        GradedEModule {
            ctx,
            lo: 0,
            dims: Vec::new(),
            action: vec![Vec::new(); ctx.q],
        }
    }

    /// Builds a module from per-degree dimensions and a closure giving the
    /// action of `e_a` on degree `j` (into degree `j - 1`).
    pub fn from_fn(
        ctx: ExteriorContext,
        lo: i64,
        dims: Vec<usize>,
        mut act: impl FnMut(usize, i64) -> Matrix,
    ) -> Result<GradedEModule> {
        let steps = dims.len().saturating_sub(1);
        let action = (0..ctx.q)
            .map(|a| (0..steps).map(|k| act(a, lo + k as i64 + 1)).collect())
            .collect();
        GradedEModule::new(ctx, lo, dims, action)
    }

    /// The residue field `k` placed in degree `t`.
    pub fn residue_field(ctx: ExteriorContext, t: i64) -> GradedEModule {
        GradedEModule::new(ctx, t, vec![1], vec![Vec::new(); ctx.q]).expect("shape is valid")
    }

    /// The free module `⊕ E(t_k)` on generators of the given degrees.
    pub fn free(ctx: ExteriorContext, generator_degrees: &[i64]) -> GradedEModule {
        let layout = FreeLayout::new(ctx, generator_degrees);
        if layout.is_empty() {
            return GradedEModule::zero(ctx);
        }
        let lo = layout.lo;
        let dims = (layout.lo..=layout.hi).map(|j| layout.dim(j)).collect();
        GradedEModule::from_fn(ctx, lo, dims, |a, j| layout.action_matrix(a, j)).expect("free module shapes")
    }

    pub fn context(&self) -> ExteriorContext {
        self.ctx
    }

    pub fn field(&self) -> Field {
        self.ctx.field
    }

    pub fn q(&self) -> usize {
        self.ctx.q
    }

    /// Lowest stored degree.
    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Highest stored degree (`lo - 1` for an empty interval).
    pub fn hi(&self) -> i64 {
        self.lo + self.dims.len() as i64 - 1
    }

    pub fn dim(&self, j: i64) -> usize {
        if j < self.lo || j > self.hi() {
            0
        } else {
            self.dims[(j - self.lo) as usize]
        }
    }

    /// Degrees with nonzero components, ascending.
    pub fn support(&self) -> Vec<i64> {
        (self.lo..=self.hi()).filter(|&j| self.dim(j) > 0).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    /// Matrix of `e_a` from `M_j` to `M_{j-1}` (zero-padded outside the
    /// stored interval).
    pub fn action(&self, a: usize, j: i64) -> Matrix {
        if j > self.lo && j <= self.hi() {
            self.action[a][(j - self.lo - 1) as usize].clone()
        } else {
            Matrix::zeros(self.ctx.field, self.dim(j - 1), self.dim(j))
        }
    }

    fn action_ref(&self, a: usize, j: i64) -> Option<&Matrix> {
        (j > self.lo && j <= self.hi()).then(|| &self.action[a][(j - self.lo - 1) as usize])
    }

    /// `e_a v` for `v ∈ M_j`.
    pub fn act(&self, a: usize, j: i64, v: &[Scalar]) -> Vector {
        match self.action_ref(a, j) {
            Some(m) => m.apply(v),
            None => zero_vector(self.ctx.field, self.dim(j - 1)),
        }
    }

    /// Drops zero components at both ends of the stored interval.
    pub fn trimmed(&self) -> GradedEModule {
        let supp = self.support();
        let (Some(&lo), Some(&hi)) = (supp.first(), supp.last()) else {
            return GradedEModule::zero(self.ctx);
        };
        let dims = (lo..=hi).map(|j| self.dim(j)).collect();
        GradedEModule::from_fn(self.ctx, lo, dims, |a, j| self.action(a, j)).expect("restriction keeps shapes")
    }

    /// Same components on a larger interval `[lo, hi]` (padding with zeros).
    pub fn widened(&self, lo: i64, hi: i64) -> GradedEModule {
        let lo = lo.min(self.lo);
        let hi = hi.max(self.hi());
        let dims = (lo..=hi).map(|j| self.dim(j)).collect();
        GradedEModule::from_fn(self.ctx, lo, dims, |a, j| self.action(a, j)).expect("padding keeps shapes")
    }
}

/// Checks dimensions and the anticommutation relations, returning every
/// violated relation.
pub fn validate_module(ctx: &ExteriorContext, m: &GradedEModule) -> Result<Vec<Violation>> {
    if ctx.q != m.q() {
        return Err(Error::ContextMismatch(format!(
            "module has {} variables, context has {}",
            m.q(),
            ctx.q
        )));
    }
    if ctx.field != m.field() {
        return Err(Error::FieldMismatch(m.field(), ctx.field));
    }
    let mut out = Vec::new();
    for j in (m.lo + 2)..=m.hi() {
        for a in 0..m.q() {
            for b in a..m.q() {
                let ab = m.action(a, j - 1).mul(&m.action(b, j))?;
                let ba = m.action(b, j - 1).mul(&m.action(a, j))?;
                let s = ab.add(&ba)?;
                if !s.is_zero() {
                    out.push(Violation {
                        a,
                        b,
                        degree: j,
                        residual: s,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// `Q_j = (M_{-j})^∨` with the transposed action.
pub fn dual_module(m: &GradedEModule) -> GradedEModule {
    if m.dims.is_empty() {
        return GradedEModule::zero(m.ctx);
    }
    let lo = -m.hi();
    let dims = m.dims.iter().rev().copied().collect();
    GradedEModule::from_fn(m.ctx, lo, dims, |a, j| m.action(a, 1 - j).transpose()).expect("dual shapes")
}

/// `M(s)` with `M(s)_ℓ = M_{s+ℓ}`.
pub fn shift(m: &GradedEModule, s: i64) -> GradedEModule {
    GradedEModule {
        lo: m.lo - s,
        ..m.clone()
    }
}

pub fn direct_sum(ctx: ExteriorContext, parts: &[GradedEModule]) -> Result<GradedEModule> {
    for p in parts {
        if p.q() != ctx.q {
            return Err(Error::ContextMismatch(format!(
                "summand has {} variables, context has {}",
                p.q(),
                ctx.q
            )));
        }
        if p.field() != ctx.field {
            return Err(Error::FieldMismatch(p.field(), ctx.field));
        }
    }
    let nonempty: Vec<&GradedEModule> = parts.iter().filter(|p| !p.dims.is_empty()).collect();
    let (Some(lo), Some(hi)) = (
        nonempty.iter().map(|p| p.lo).min(),
        nonempty.iter().map(|p| p.hi()).max(),
    ) else {
        return Ok(GradedEModule::zero(ctx));
    };
    let dims = (lo..=hi).map(|j| nonempty.iter().map(|p| p.dim(j)).sum()).collect();
    GradedEModule::from_fn(ctx, lo, dims, |a, j| {
        let blocks: Vec<Matrix> = nonempty.iter().map(|p| p.action(a, j)).collect();
        let refs: Vec<&Matrix> = blocks.iter().collect();
        Matrix::block_diag(ctx.field, &refs)
    })
}

/// Minimal generators: for each degree `j`, vectors of `M_j` spanning a
/// complement of `V · M_{j+1}`. Complements are chosen among standard basis
/// vectors, scanning coordinates in order.
pub fn minimal_generators(m: &GradedEModule) -> BTreeMap<i64, Vec<Vector>> {
    let mut out = BTreeMap::new();
    let f = m.field();
    for j in m.support() {
        let n = m.dim(j);
        let mut image = Echelon::new(f, n);
        for a in 0..m.q() {
            let act = m.action(a, j + 1);
            for c in 0..act.cols() {
                let col = act.column(c);
                if !is_zero_vector(&col) {
                    image.insert_plain(col);
                }
            }
        }
        let pivots: Vec<usize> = image.pivots().to_vec();
        let gens: Vec<Vector> = (0..n)
            .filter(|i| !pivots.contains(i))
            .map(|i| {
                let mut v = zero_vector(f, n);
                v[i] = f.one();
                v
            })
            .collect();
        if !gens.is_empty() {
            out.insert(j, gens);
        }
    }
    out
}

/// Quotient of `m` by the submodule generated by `elements[j]` (vectors of
/// `M_j`). The quotient basis in each degree is the set of coordinates that
/// are not pivots of the submodule's echelon form.
pub fn quotient_by_elements(m: &GradedEModule, elements: &BTreeMap<i64, Vec<Vector>>) -> Result<GradedEModule> {
    let f = m.field();
    let mut subs: BTreeMap<i64, Echelon> = BTreeMap::new();
    for j in (m.lo()..=m.hi()).rev() {
        let mut ech = Echelon::new(f, m.dim(j));
        for v in elements.get(&j).into_iter().flatten() {
            if v.len() != m.dim(j) {
                return Err(Error::DimensionMismatch(format!(
                    "element of degree {j} has length {}, expected {}",
                    v.len(),
                    m.dim(j)
                )));
            }
            ech.insert_plain(v.clone());
        }
        if let Some(above) = subs.get(&(j + 1)) {
            for v in above.vectors() {
                for a in 0..m.q() {
                    ech.insert_plain(m.act(a, j + 1, v));
                }
            }
        }
        subs.insert(j, ech);
    }
    let kept: BTreeMap<i64, Vec<usize>> = subs
        .iter()
        .map(|(j, ech)| (*j, (0..m.dim(*j)).filter(|i| !ech.pivots().contains(i)).collect()))
        .collect();
    let dims = (m.lo()..=m.hi()).map(|j| kept[&j].len()).collect();
    let q = GradedEModule::from_fn(m.context(), m.lo(), dims, |a, j| {
        let (src, tgt) = (&kept[&j], &kept[&(j - 1)]);
        let mut out = Matrix::zeros(f, tgt.len(), src.len());
        for (c, &i) in src.iter().enumerate() {
            let mut v = zero_vector(f, m.dim(j));
            v[i] = f.one();
            let mut w = m.act(a, j, &v);
            subs[&(j - 1)].reduce(&mut w, None);
            for (r, &t) in tgt.iter().enumerate() {
                out.set(r, c, w[t].clone());
            }
        }
        out
    })?;
    Ok(q.trimmed())
}

/// Basis layout of a free module `⊕_k E(t_k)`: in degree `j` the basis is
/// `e_S g_k` with `|S| = t_k - j`, generators in order, subsets in the
/// monomial order.
#[derive(Clone, Debug)]
pub(crate) struct FreeLayout {
    ctx: ExteriorContext,
    gens: Vec<i64>,
    pub lo: i64,
    pub hi: i64,
    bases: Vec<MonomialBasis>,
}

impl FreeLayout {
    pub fn new(ctx: ExteriorContext, gens: &[i64]) -> FreeLayout {
        let hi = gens.iter().copied().max().unwrap_or(0);
        let lo = gens.iter().copied().min().map_or(1, |m| m - ctx.q as i64);
        let bases = (0..=ctx.q).map(|i| MonomialBasis::new(BasisKind::Exterior, ctx.q, i)).collect();
        FreeLayout {
            ctx,
            gens: gens.to_vec(),
            lo,
            hi,
            bases,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    fn offsets(&self, j: i64) -> Vec<(usize, usize, usize)> {
        // (generator, subset size, offset)
        let mut off = 0;
        let mut out = Vec::new();
        for (k, &t) in self.gens.iter().enumerate() {
            let s = t - j;
            if s >= 0 && s as usize <= self.ctx.q {
                out.push((k, s as usize, off));
                off += self.bases[s as usize].len();
            }
        }
        out
    }

    pub fn dim(&self, j: i64) -> usize {
        self.offsets(j).iter().map(|&(_, s, _)| self.bases[s].len()).sum()
    }

    /// Basis of degree `j` as `(generator, subset as ascending variables)`.
    pub fn basis(&self, j: i64) -> Vec<(usize, Vec<usize>)> {
        let mut out = Vec::new();
        for (k, s, _) in self.offsets(j) {
            for i in 0..self.bases[s].len() {
                out.push((k, self.bases[s].support(i)));
            }
        }
        out
    }

    pub fn index(&self, j: i64, k: usize, subset: &[usize]) -> Option<usize> {
        let (_, s, off) = self.offsets(j).into_iter().find(|&(g, _, _)| g == k)?;
        let mut exps = vec![0u32; self.ctx.q];
        for &v in subset {
            exps[v] = 1;
        }
        debug_assert_eq!(subset.len(), s);
        self.bases[s].index_of(&exps).map(|i| off + i)
    }

    pub fn action_matrix(&self, a: usize, j: i64) -> Matrix {
        let f = self.ctx.field;
        let src = self.basis(j);
        let mut m = Matrix::zeros(f, self.dim(j - 1), src.len());
        for (c, (k, subset)) in src.iter().enumerate() {
            if let Some((sign, merged)) = wedge_left(a, subset) {
                let r = self.index(j - 1, *k, &merged).expect("target basis element exists");
                m.set(r, c, f.from_i64(sign));
            }
        }
        m
    }
}

/// `e_a ∧ e_S = sign · e_{S ∪ a}`, or `None` when `a ∈ S`.
pub(crate) fn wedge_left(a: usize, subset: &[usize]) -> Option<(i64, Vec<usize>)> {
    if subset.contains(&a) {
        return None;
    }
    let before = subset.iter().filter(|&&s| s < a).count();
    let sign = if before % 2 == 0 { 1 } else { -1 };
    let mut merged = subset.to_vec();
    merged.push(a);
    merged.sort_unstable();
    Some((sign, merged))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(q: usize) -> ExteriorContext {
        ExteriorContext::new(q, Field::Rationals)
    }

    #[test]
    fn exterior_algebra_is_a_module() {
        for q in 0..=4 {
            let e = GradedEModule::free(ctx(q), &[0]);
            assert_eq!(e.lo(), -(q as i64));
            assert_eq!(e.total_dim(), 1 << q);
            assert!(validate_module(&ctx(q), &e).unwrap().is_empty());
        }
    }

    #[test]
    fn commuting_action_is_rejected() {
        // k^2 in degree 1 over k in degree 0 with e1 = e2 = (1 0): e1 e2 + e2 e1 = 2 e1 e2 on
        // a three-term module.
        let c = ctx(2);
        let f = c.field;
        let one = Matrix::from_i64(f, &[&[1]]);
        let m = GradedEModule::new(c, -1, vec![1, 1, 1], vec![vec![one.clone(), one.clone()], vec![one.clone(), one]])
            .unwrap();
        let v = validate_module(&c, &m).unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v[1].to_string(), "e1 e2 + e2 e1 != 0 on degree 1");
    }

    #[test]
    fn shape_errors_name_the_degree() {
        let c = ctx(1);
        let bad = Matrix::zeros(c.field, 2, 1);
        let err = GradedEModule::new(c, 0, vec![1, 1], vec![vec![bad]]).unwrap_err();
        assert!(err.to_string().contains("degree 1"), "{err}");
    }

    #[test]
    fn dual_and_shift() {
        let e = GradedEModule::free(ctx(2), &[0]);
        let d = dual_module(&e);
        assert_eq!(d.support(), vec![0, 1, 2]);
        assert!(validate_module(&ctx(2), &d).unwrap().is_empty());
        assert_eq!(dual_module(&d), e);
        let s = shift(&e, 3);
        assert_eq!(s.dim(-3), 1);
        assert_eq!(s.dim(-5), 1);
        assert_eq!(minimal_generators(&e).keys().copied().collect::<Vec<_>>(), vec![0]);
        // E^∨ is generated by its top-degree piece
        assert_eq!(minimal_generators(&d).keys().copied().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn direct_sum_dimensions() {
        let c = ctx(2);
        let s = direct_sum(c, &[GradedEModule::free(c, &[0]), GradedEModule::residue_field(c, 3)]).unwrap();
        assert_eq!(s.support(), vec![-2, -1, 0, 3]);
        assert_eq!(s.dim(-1), 2);
        assert!(validate_module(&c, &s).unwrap().is_empty());
    }
}
