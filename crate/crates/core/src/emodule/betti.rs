//! Graded Betti numbers `β_{i,t} = dim Tor_i^E(M, k)_t`.
//!
//! [`betti_table`] computes Tor as the homology of `M ⊗ D(V)`, the module
//! tensored with the dual of the symmetric algebra on `W = V^*`:
//!
//! ```text
//! M_{t+i+1} ⊗ (Sym^{i+1} W)^∨ → M_{t+i} ⊗ (Sym^i W)^∨ → M_{t+i-1} ⊗ (Sym^{i-1} W)^∨
//! m ⊗ β^*  ↦  Σ_{a : β_a > 0} e_a m ⊗ (β - ε_a)^*
//! ```
//!
//! [`betti_table_by_syzygies`] builds the minimal free resolution one
//! syzygy module at a time. Both agree; the second is far more expensive
//! and serves as a cross-check on small inputs.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::{minimal_generators, FreeLayout, GradedEModule};
use crate::linalg::sparse::{sparse_accumulate, SparseEchelon, SparseVec};
use crate::linalg::{Matrix, MonomialBasis, BasisKind, Vector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTable {
    pub i_max: usize,
    entries: BTreeMap<(usize, i64), usize>,
}

impl BettiTable {
    pub fn new(i_max: usize) -> BettiTable {
        BettiTable {
            i_max,
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, i: usize, t: i64) -> usize {
        self.entries.get(&(i, t)).copied().unwrap_or(0)
    }

    pub fn set(&mut self, i: usize, t: i64, v: usize) {
        if v == 0 {
            self.entries.remove(&(i, t));
        } else {
            self.entries.insert((i, t), v);
        }
    }

    /// Nonzero entries `((i, t), β_{i,t})` in increasing `(i, t)` order.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, i64), usize)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entrywise sum (the table of a direct sum).
    pub fn sum(&self, o: &BettiTable) -> BettiTable {
        let mut out = BettiTable::new(self.i_max.min(o.i_max));
        for ((i, t), v) in self.entries().chain(o.entries()) {
            if i <= out.i_max {
                out.set(i, t, out.get(i, t) + v);
            }
        }
        out
    }

    /// Table of `M(s)` given the table of `M`.
    pub fn shifted(&self, s: i64) -> BettiTable {
        let mut out = BettiTable::new(self.i_max);
        for ((i, t), v) in self.entries() {
            out.set(i, t - s, v);
        }
        out
    }

    /// Values of `-i - t` over the nonzero entries; a module with linear
    /// resolution has a single strand.
    pub fn strands(&self) -> Vec<i64> {
        let mut s: Vec<i64> = self.entries().map(|((i, t), _)| -(i as i64) - t).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Rows `i,t,beta` over the nonzero entries.
    pub fn csv(&self) -> String {
        let mut out = String::from("i,t,beta\n");
        for ((i, t), v) in self.entries() {
            out.push_str(&format!("{i},{t},{v}\n"));
        }
        out
    }
}

impl fmt::Display for BettiTable {
    /// Rows are strands `s = -i - t`, columns homological degrees `i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strands = self.strands();
        write!(f, "{:>6}", "i:")?;
        for i in 0..=self.i_max {
            write!(f, " {i:>5}")?;
        }
        for s in strands.iter().rev() {
            writeln!(f)?;
            write!(f, "{:>6}", format!("{s}:"))?;
            for i in 0..=self.i_max {
                let t = -(i as i64) - s;
                match self.get(i, t) {
                    0 => write!(f, " {:>5}", "-")?,
                    v => write!(f, " {v:>5}")?,
                }
            }
        }
        Ok(())
    }
}

/// Betti numbers for homological degrees `0..=i_max`.
pub fn betti_table(m: &GradedEModule, i_max: usize) -> BettiTable {
    let mut table = BettiTable::new(i_max);
    if m.is_zero() {
        return table;
    }
    let cartan = Cartan::new(m, i_max + 1);
    let mut ranks: HashMap<(usize, i64), usize> = HashMap::new();
    let mut rank = |i: usize, t: i64| *ranks.entry((i, t)).or_insert_with(|| cartan.rank(i, t));
    let supp = m.support();
    for i in 0..=i_max {
        for t in (m.lo() - i as i64)..=(m.hi() - i as i64) {
            let c = m.dim(t + i as i64) * cartan.dual_sym[i].len();
            if c == 0 || !supp.contains(&(t + i as i64)) {
                continue;
            }
            let b = c - rank(i, t) - rank(i + 1, t);
            table.set(i, t, b);
        }
    }
    table
}

struct Cartan<'a> {
    m: &'a GradedEModule,
    dual_sym: Vec<MonomialBasis>,
}

impl<'a> Cartan<'a> {
    fn new(m: &'a GradedEModule, top: usize) -> Cartan<'a> {
        let dual_sym = (0..=top).map(|i| MonomialBasis::new(BasisKind::Symmetric, m.q(), i)).collect();
        Cartan { m, dual_sym }
    }

    /// Rank of `∂_i` on the internal-degree-`t` strand (`∂_0 = 0`).
    fn rank(&self, i: usize, t: i64) -> usize {
        if i == 0 {
            return 0;
        }
        let m = self.m;
        let src_deg = t + i as i64;
        let (ns, nt) = (m.dim(src_deg), m.dim(src_deg - 1));
        if ns == 0 || nt == 0 {
            return 0;
        }
        let src = &self.dual_sym[i];
        let tgt = &self.dual_sym[i - 1];
        let acts: Vec<Matrix> = (0..m.q()).map(|a| m.action(a, src_deg)).collect();
        let width = nt * tgt.len();
        let mut ech = SparseEchelon::new(m.field(), width);
        let mut lowered = vec![0u32; m.q()];
        for beta in src.monomials() {
            for u in 0..ns {
                let mut entries = Vec::new();
                for a in 0..m.q() {
                    if beta[a] == 0 {
                        continue;
                    }
                    lowered.copy_from_slice(beta);
                    lowered[a] -= 1;
                    let col = tgt.index_of(&lowered).expect("lowered monomial exists");
                    for r in 0..nt {
                        let x = acts[a].get(r, u);
                        if !x.is_zero() {
                            entries.push((r * tgt.len() + col, x.clone()));
                        }
                    }
                }
                let v: SparseVec = sparse_accumulate(m.field(), entries);
                if !v.is_empty() {
                    ech.insert(v);
                }
            }
        }
        ech.rank()
    }
}

/// Betti numbers from an explicit minimal free resolution, computed
/// degree by degree as iterated kernels.
pub fn betti_table_by_syzygies(m: &GradedEModule, i_max: usize) -> BettiTable {
    let mut table = BettiTable::new(i_max);
    let mut cur = m.trimmed();
    for i in 0..=i_max {
        if cur.is_zero() {
            break;
        }
        let gens = minimal_generators(&cur);
        let mut degrees = Vec::new();
        let mut images = Vec::new();
        for (t, vs) in &gens {
            table.set(i, *t, vs.len());
            for v in vs {
                degrees.push(*t);
                images.push(v.clone());
            }
        }
        if i == i_max {
            break;
        }
        cur = syzygy_module(&cur, &degrees, &images);
    }
    table
}

/// Kernel of `⊕ E(t_k) → M`, `g_k ↦ v_k`, as a module in its own right.
fn syzygy_module(m: &GradedEModule, degrees: &[i64], images: &[Vector]) -> GradedEModule {
    let ctx = m.context();
    let f = ctx.field;
    let layout = FreeLayout::new(ctx, degrees);
    let mut kernels: BTreeMap<i64, (Vec<Vector>, Vec<usize>)> = BTreeMap::new();
    for j in layout.lo..=layout.hi {
        let basis = layout.basis(j);
        let cols: Vec<Vector> = basis
            .iter()
            .map(|(k, subset)| {
                let mut w = images[*k].clone();
                let mut deg = degrees[*k];
                for &s in subset.iter().rev() {
                    w = m.act(s, deg, &w);
                    deg -= 1;
                }
                w
            })
            .collect();
        let phi = Matrix::from_columns(f, m.dim(j), &cols);
        let rref = phi.rref();
        let free: Vec<usize> = (0..basis.len()).filter(|c| !rref.pivots.contains(c)).collect();
        kernels.insert(j, (phi.kernel_basis(), free));
    }
    let dims: Vec<usize> = (layout.lo..=layout.hi).map(|j| kernels[&j].0.len()).collect();
    GradedEModule::from_fn(ctx, layout.lo, dims, |a, j| {
        let (src, _) = &kernels[&j];
        let (tgt, free) = &kernels[&(j - 1)];
        let act = layout.action_matrix(a, j);
        let cols: Vec<Vector> = src
            .iter()
            .map(|u| {
                let w = act.apply(u);
                free.iter().map(|&c| w[c].clone()).collect()
            })
            .collect();
        Matrix::from_columns(f, tgt.len(), &cols)
    })
    .expect("syzygy module shapes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emodule::{dual_module, validate_module, ExteriorContext};
    use crate::linalg::{binomial, Field};

    fn ctx(q: usize) -> ExteriorContext {
        ExteriorContext::new(q, Field::Rationals)
    }

    #[test]
    fn residue_field_has_divided_power_betti_numbers() {
        for q in 1..=3 {
            let k = GradedEModule::residue_field(ctx(q), 0);
            let b = betti_table(&k, 4);
            for i in 0..=4 {
                assert_eq!(b.get(i, -(i as i64)), binomial(q + i - 1, i));
            }
            assert_eq!(b.strands(), vec![0]);
            assert_eq!(b, betti_table_by_syzygies(&k, 4));
        }
    }

    #[test]
    fn free_modules_have_trivial_resolution() {
        let e = GradedEModule::free(ctx(3), &[0, 2, 2]);
        let b = betti_table(&e, 3);
        assert_eq!(b.entries().collect::<Vec<_>>(), vec![((0, 0), 1), ((0, 2), 2)]);
        assert_eq!(b, betti_table_by_syzygies(&e, 3));
    }

    #[test]
    fn dual_of_exterior_algebra_is_free() {
        let d = dual_module(&GradedEModule::free(ctx(2), &[0]));
        assert!(validate_module(&ctx(2), &d).unwrap().is_empty());
        let b = betti_table(&d, 3);
        assert_eq!(b.entries().collect::<Vec<_>>(), vec![((0, 2), 1)]);
    }

    #[test]
    fn truncated_exterior_algebra() {
        // E / (e1e2) over two variables, generated in degree 0.
        let c = ctx(2);
        let m = GradedEModule::from_fn(c, -1, vec![2, 1], |a, _| {
            let mut x = Matrix::zeros(c.field, 2, 1);
            x.set(a, 0, c.field.one());
            x
        })
        .unwrap();
        let b = betti_table(&m, 4);
        assert_eq!(b, betti_table_by_syzygies(&m, 4));
        assert_eq!(b.get(0, 0), 1);
        assert_eq!(b.get(1, -2), 1);
    }
}
