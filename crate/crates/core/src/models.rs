//! Cohomology tables of a few varieties, written down by hand.
//!
//! For each model `P = ⊕ H^i(X, O_X)` with `H^i` in degree `d - i`, and
//! `Q = P^∨` is the module of `⊕ H^i(X, ω_X)` with `H^i` in degree `-i`.
//! The exterior variables act by cup product with `H^1(X, O_X)`.

use std::fmt;

use crate::emodule::{direct_sum, dual_module, shift, ExteriorContext, GradedEModule};
use crate::error::{Error, Result};
use crate::filtered::{FilteredFreeComplex, Polynomial};
use crate::linalg::{Field, Matrix};

pub const MAX_DIM: usize = 6;
pub const MAX_GENUS: usize = 8;

#[derive(Clone, Debug)]
pub enum ModelSpec {
    Point,
    Abelian(usize),
    Curve(usize),
    CurveTimesP1(usize),
    /// `Q = ⊕_j Q^j(j)` from the given summands `Q^j`.
    SyntheticKollar(Vec<GradedEModule>),
    /// An arbitrary `P`.
    Custom(GradedEModule),
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Point => write!(f, "point"),
            ModelSpec::Abelian(d) => write!(f, "abelian({d})"),
            ModelSpec::Curve(g) => write!(f, "curve({g})"),
            ModelSpec::CurveTimesP1(g) => write!(f, "curve_times_p1({g})"),
            ModelSpec::SyntheticKollar(s) => write!(f, "synthetic_kollar({} summands)", s.len()),
            ModelSpec::Custom(_) => write!(f, "custom"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Model {
    pub p: GradedEModule,
    pub q: GradedEModule,
}

fn check_range(what: &str, v: usize, lo: usize, hi: usize) -> Result<()> {
    if v < lo || v > hi {
        return Err(Error::OutOfRange(format!("{what} must lie in [{lo}, {hi}], got {v}")));
    }
    Ok(())
}

/// `P_1 = H^0(O) = k` in degree `top`, `P_0 = H^1(O) = k^g` in degree
/// `top - 1`. Cup product `H^0 ⊗ H^1 → H^1` sends `e_a · 1` to the `a`-th
/// basis vector.
fn curve_like(ctx: ExteriorContext, g: usize, top: i64) -> Result<GradedEModule> {
    let f = ctx.field;
    GradedEModule::from_fn(ctx, top - 1, vec![g, 1], |a, _| {
        let mut m = Matrix::zeros(f, g, 1);
        m.set(a, 0, f.one());
        m
    })
}

pub fn generate(spec: &ModelSpec, field: Field) -> Result<Model> {
    let p = match spec {
        ModelSpec::Point => GradedEModule::residue_field(ExteriorContext::new(0, field), 0),
        ModelSpec::Abelian(d) => {
            // H^i(O) = Λ^i H^1(O) with cup product = wedge product, which is
            // the free module E placed so that H^0 sits in degree d.
            check_range("dimension", *d, 1, MAX_DIM)?;
            let ctx = ExteriorContext::new(*d, field);
            shift(&GradedEModule::free(ctx, &[0]), -(*d as i64))
        }
        ModelSpec::Curve(g) => {
            check_range("genus", *g, 1, MAX_GENUS)?;
            curve_like(ExteriorContext::new(*g, field), *g, 1)?
        }
        ModelSpec::CurveTimesP1(g) => {
            // H^i(C × P^1, O) = H^i(C, O) since H^j(P^1, O) vanishes for j > 0.
            check_range("genus", *g, 1, MAX_GENUS)?;
            let ctx = ExteriorContext::new(*g, field);
            curve_like(ctx, *g, 2)?.widened(0, 2)
        }
        ModelSpec::SyntheticKollar(summands) => {
            let first = summands
                .first()
                .ok_or_else(|| Error::Precondition("no summands given".into()))?;
            let ctx = first.context();
            let shifted: Vec<GradedEModule> = summands.iter().enumerate().map(|(j, s)| shift(s, j as i64)).collect();
            dual_module(&direct_sum(ctx, &shifted)?)
        }
        ModelSpec::Custom(p) => p.clone(),
    };
    let q = dual_module(&p);
    Ok(Model { p, q })
}

/// Dimension of the generic fiber of the Albanese map.
pub fn expected_k(spec: &ModelSpec) -> Result<usize> {
    match spec {
        ModelSpec::Point | ModelSpec::Abelian(_) | ModelSpec::Curve(_) => Ok(0),
        ModelSpec::CurveTimesP1(_) => Ok(1),
        ModelSpec::SyntheticKollar(_) | ModelSpec::Custom(_) => {
            Err(Error::NotApplicable(format!("{spec} is not a geometric model")))
        }
    }
}

/// `Q_curve(g)`, the dual of the curve model, with `Q_0 = k^g`, `Q_{-1} = k`.
pub fn curve_dual(g: usize, field: Field) -> Result<GradedEModule> {
    Ok(generate(&ModelSpec::Curve(g), field)?.q)
}

/// The complex `K^n = R ⊗ P_{d-n}` with `d = Σ_a t_a e_a`, whose induced
/// E-module is `P` again. `d` is the top nonzero degree of `P`.
pub fn complex_from_module(p: &GradedEModule, precision: usize) -> Result<FilteredFreeComplex> {
    let supp = p.support();
    let d = supp.last().copied().unwrap_or(0);
    let lo = supp.first().copied().unwrap_or(0);
    if lo < 0 {
        return Err(Error::Precondition(format!("module has a nonzero component in negative degree {lo}")));
    }
    let (f, e) = (p.field(), p.q());
    let ranks: Vec<usize> = (0..=d).map(|n| p.dim(d - n)).collect();
    let diffs = (0..d)
        .map(|n| {
            let j = d - n;
            (0..p.dim(j - 1))
                .map(|r| {
                    (0..p.dim(j))
                        .map(|c| {
                            let mut poly = Polynomial::zero(f, e);
                            for a in 0..e {
                                let x = p.action(a, j).get(r, c).clone();
                                if !x.is_zero() {
                                    poly = poly.add(&Polynomial::var(f, e, a).scale(&x));
                                }
                            }
                            poly
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    FilteredFreeComplex::new(f, e, precision, 0, ranks, diffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emodule::validate_module;
    use crate::filtered::{e1_check, induce_emodule};

    const Q: Field = Field::Rationals;

    #[test]
    fn models_are_valid() {
        let specs = [
            ModelSpec::Point,
            ModelSpec::Abelian(1),
            ModelSpec::Abelian(3),
            ModelSpec::Curve(2),
            ModelSpec::CurveTimesP1(3),
        ];
        for s in &specs {
            let m = generate(s, Q).unwrap();
            assert!(validate_module(&m.p.context(), &m.p).unwrap().is_empty(), "{s}");
            assert!(validate_module(&m.q.context(), &m.q).unwrap().is_empty(), "{s}");
        }
    }

    #[test]
    fn elliptic_dual_is_e() {
        let m = generate(&ModelSpec::Abelian(1), Q).unwrap();
        let e = GradedEModule::free(ExteriorContext::new(1, Q), &[0]);
        assert_eq!(m.q.trimmed(), e);
    }

    #[test]
    fn curve_two_tables() {
        let m = generate(&ModelSpec::Curve(2), Q).unwrap();
        assert_eq!((m.p.dim(1), m.p.dim(0)), (1, 2));
        assert_eq!(m.p.action(0, 1), Matrix::from_i64(Q, &[&[1], &[0]]));
        assert_eq!(m.p.action(1, 1), Matrix::from_i64(Q, &[&[0], &[1]]));
    }

    #[test]
    fn point_and_ranges() {
        let m = generate(&ModelSpec::Point, Q).unwrap();
        assert_eq!(m.p.support(), vec![0]);
        assert!(matches!(generate(&ModelSpec::Abelian(7), Q), Err(Error::OutOfRange(_))));
        assert!(matches!(generate(&ModelSpec::Curve(9), Q), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn expected_k_values() {
        assert_eq!(expected_k(&ModelSpec::Abelian(3)).unwrap(), 0);
        assert_eq!(expected_k(&ModelSpec::Curve(5)).unwrap(), 0);
        assert_eq!(expected_k(&ModelSpec::CurveTimesP1(2)).unwrap(), 1);
        assert!(matches!(
            expected_k(&ModelSpec::Custom(GradedEModule::zero(ExteriorContext::new(1, Q)))),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn product_dual_is_shifted_curve_dual() {
        let m = generate(&ModelSpec::CurveTimesP1(2), Q).unwrap();
        assert_eq!(m.q.trimmed(), shift(&curve_dual(2, Q).unwrap(), 1).trimmed());
    }

    #[test]
    fn model_complexes_induce_their_module() {
        for s in [ModelSpec::Abelian(2), ModelSpec::Curve(2), ModelSpec::CurveTimesP1(2)] {
            let m = generate(&s, Q).unwrap();
            let k = complex_from_module(&m.p, 3).unwrap();
            let p = induce_emodule(&k, Some(m.p.support().last().copied().unwrap())).unwrap();
            assert_eq!(p.trimmed(), m.p.trimmed(), "{s}");
            assert!(e1_check(&k).unwrap().passed, "{s}");
        }
    }
}
