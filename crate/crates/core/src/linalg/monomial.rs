//! Ordered monomial bases of `Sym^p W` and `Λ^i V`.

use std::collections::HashMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisKind {
    Symmetric,
    Exterior,
}

/// Monomials of a fixed degree, stored as exponent vectors and ordered
/// lexicographically with larger exponent vectors first (so `x1^2`
/// precedes `x1*x2`, and `e1e2` precedes `e1e3`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    kind: BasisKind,
    nvars: usize,
    degree: usize,
    monomials: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl MonomialBasis {
    pub fn new(kind: BasisKind, nvars: usize, degree: usize) -> MonomialBasis {
        let max_exp = match kind {
            BasisKind::Symmetric => degree as u32,
            BasisKind::Exterior => 1,
        };
        let mut monomials = Vec::new();
        let mut cur = vec![0u32; nvars];
        fill(&mut monomials, &mut cur, 0, degree as u32, max_exp);
        let index = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        MonomialBasis {
            kind,
            nvars,
            degree,
            monomials,
            index,
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.monomials
    }

    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    /// Variables appearing in an exterior monomial, ascending (0-based).
    pub fn support(&self, i: usize) -> Vec<usize> {
        self.monomials[i]
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(a, _)| a)
            .collect()
    }

    pub fn display(&self, i: usize, var: &str) -> String {
        render_monomial(&self.monomials[i], var, self.kind == BasisKind::Exterior)
    }
}

fn fill(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, pos: usize, left: u32, max_exp: u32) {
    if pos == cur.len() {
        if left == 0 {
            out.push(cur.clone());
        }
        return;
    }
    let top = left.min(max_exp);
    for e in (0..=top).rev() {
        cur[pos] = e;
        fill(out, cur, pos + 1, left - e, max_exp);
    }
    cur[pos] = 0;
}

pub fn monomial_basis(kind: BasisKind, nvars: usize, degree: usize) -> MonomialBasis {
    MonomialBasis::new(kind, nvars, degree)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as usize
}

/// `dim Sym^p` of an `n`-dimensional space.
pub fn sym_dim(nvars: usize, degree: usize) -> usize {
    if nvars == 0 {
        return usize::from(degree == 0);
    }
    binomial(nvars + degree - 1, degree)
}

pub(crate) fn render_monomial(exps: &[u32], var: &str, exterior: bool) -> String {
    let mut parts = Vec::new();
    for (a, &e) in exps.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(format!("{var}{}", a + 1)),
            _ => parts.push(format!("{var}{}^{e}", a + 1)),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else if exterior {
        parts.concat()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for MonomialBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = match self.kind {
            BasisKind::Symmetric => "x",
            BasisKind::Exterior => "e",
        };
        let items: Vec<String> = (0..self.len()).map(|i| self.display(i, var)).collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listed_examples() {
        let s = monomial_basis(BasisKind::Symmetric, 2, 2);
        assert_eq!(s.to_string(), "{x1^2, x1*x2, x2^2}");
        let e = monomial_basis(BasisKind::Exterior, 3, 2);
        assert_eq!(e.to_string(), "{e1e2, e1e3, e2e3}");
        assert!(monomial_basis(BasisKind::Exterior, 2, 3).is_empty());
        assert_eq!(monomial_basis(BasisKind::Symmetric, 0, 0).len(), 1);
        assert_eq!(monomial_basis(BasisKind::Symmetric, 0, 2).len(), 0);
    }

    #[test]
    fn sizes_match_binomials() {
        for n in 0..=6 {
            for d in 0..=6 {
                assert_eq!(monomial_basis(BasisKind::Symmetric, n, d).len(), sym_dim(n, d));
                assert_eq!(monomial_basis(BasisKind::Exterior, n, d).len(), binomial(n, d));
            }
        }
    }
}
