//! Checks that `Q = ⊕_j Q^j(j)` with every nonzero `Q^j` 0-regular, and
//! that the resolution of `Q` splits into the corresponding linear strands.

use super::{default_truncation, regularity_of_dual_via_bgg};
use crate::emodule::regularity::{check_nonpositive, default_imax};
use crate::emodule::{direct_sum, dual_module, regularity_definition_route, shift, BettiTable, GradedEModule};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremAReport {
    pub passed: bool,
    pub regularity: Option<i64>,
    pub strands: usize,
    pub truncation: i64,
    pub i_max: usize,
    pub failures: Vec<String>,
    pub betti: BettiTable,
}

impl TheoremAReport {
    pub fn summary(&self) -> String {
        let reg = self.regularity.map_or("none".to_string(), |r| r.to_string());
        let plural = if self.strands == 1 { "" } else { "s" };
        format!(
            "reg = {reg}; Betti splits into {} linear strand{plural}",
            self.strands
        )
    }
}

/// `summands[j]` is `Q^j`. `truncation` and `i_max` default to values
/// covering every summand and the total module.
pub fn verify_theorem_a(summands: &[GradedEModule], truncation: Option<i64>, i_max: Option<usize>) -> Result<TheoremAReport> {
    let Some(first) = summands.first() else {
        return Err(Error::Precondition("no summands given".into()));
    };
    let ctx = first.context();
    for (j, s) in summands.iter().enumerate() {
        check_nonpositive(s).map_err(|e| Error::Precondition(format!("summand {j}: {e}")))?;
    }
    if summands.iter().all(GradedEModule::is_zero) {
        return Err(Error::Precondition("all summands are zero".into()));
    }
    let shifted: Vec<GradedEModule> = summands.iter().enumerate().map(|(j, s)| shift(s, j as i64)).collect();
    let total = direct_sum(ctx, &shifted)?;
    let truncation = truncation.unwrap_or_else(|| default_truncation(&dual_module(&total)));
    let i_max = i_max.unwrap_or_else(|| default_imax(&total).max(truncation.max(0) as usize));

    let mut failures = Vec::new();
    let mut expected = BettiTable::new(i_max);
    for (j, s) in summands.iter().enumerate() {
        if s.is_zero() {
            continue;
        }
        let def = regularity_definition_route(s, i_max)?;
        let bgg = regularity_of_dual_via_bgg(s, truncation)?;
        if def.regularity != Some(0) {
            failures.push(format!(
                "summand {j} is not 0-regular by definition: m = {:?}",
                def.regularity
            ));
        }
        if bgg.regularity != Some(0) {
            failures.push(format!(
                "summand {j} is not 0-regular via BGG: m = {:?}",
                bgg.regularity
            ));
        }
        let b = def.betti.expect("definition route records Betti numbers");
        expected = expected.sum(&b.shifted(j as i64));
    }

    let top = summands.iter().rposition(|s| !s.is_zero()).map(|j| j as i64);
    let def = regularity_definition_route(&total, i_max)?;
    let bgg = regularity_of_dual_via_bgg(&total, truncation)?;
    if def.regularity != top {
        failures.push(format!(
            "sum has regularity {:?} by definition, expected {:?}",
            def.regularity, top
        ));
    }
    if bgg.regularity != top {
        failures.push(format!(
            "sum has regularity {:?} via BGG, expected {:?}",
            bgg.regularity, top
        ));
    }
    let betti = def.betti.expect("definition route records Betti numbers");
    if betti != expected {
        failures.push("Betti table of the sum differs from the sum of shifted linear strands".into());
    }
    Ok(TheoremAReport {
        passed: failures.is_empty(),
        regularity: def.regularity,
        strands: betti.strands().len(),
        truncation,
        i_max,
        failures,
        betti,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emodule::ExteriorContext;
    use crate::linalg::{Field, Matrix};

    fn ctx(q: usize) -> ExteriorContext {
        ExteriorContext::new(q, Field::Rationals)
    }

    #[test]
    fn free_summand() {
        let r = verify_theorem_a(&[GradedEModule::free(ctx(2), &[0])], None, None).unwrap();
        assert!(r.passed, "{:?}", r.failures);
        assert_eq!(r.summary(), "reg = 0; Betti splits into 1 linear strand");
    }

    #[test]
    fn two_free_summands() {
        let e = GradedEModule::free(ctx(2), &[0]);
        let r = verify_theorem_a(&[e.clone(), e], None, None).unwrap();
        assert!(r.passed, "{:?}", r.failures);
        assert_eq!(r.summary(), "reg = 1; Betti splits into 2 linear strands");
    }

    #[test]
    fn curve_summand_in_degree_one() {
        let c = ctx(2);
        // Q_curve(2): Q_0 = k^2, Q_{-1} = k, e_a = unit row a.
        let q = GradedEModule::from_fn(c, -1, vec![1, 2], |a, _| {
            let mut m = Matrix::zeros(c.field, 1, 2);
            m.set(0, a, c.field.one());
            m
        })
        .unwrap();
        let r = verify_theorem_a(&[GradedEModule::zero(c), q], None, None).unwrap();
        assert!(r.passed, "{:?}", r.failures);
        assert_eq!(r.regularity, Some(1));
    }

    #[test]
    fn non_regular_summand_is_reported() {
        let c = ctx(1);
        let k1 = shift(&GradedEModule::residue_field(c, 0), 1);
        let r = verify_theorem_a(&[k1], None, None).unwrap();
        assert!(!r.passed);
        assert!(r.failures[0].starts_with("summand 0"));
    }
}
