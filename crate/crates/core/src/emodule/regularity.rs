//! Castelnuovo-Mumford regularity of graded `E`-modules from Betti numbers.
//!
//! A module concentrated in nonpositive degrees is `m`-regular when
//! `Tor_i(M, k)_t = 0` whenever `-i - t > m`; the regularity is the least
//! such `m`, i.e. the largest strand `-i - t` carrying a nonzero Betti
//! number.

use std::fmt;

use super::betti::{betti_table, BettiTable};
use super::GradedEModule;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Definition,
    Bgg,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Definition => "def",
            Route::Bgg => "bgg",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityReport {
    /// `None` for the zero module.
    pub regularity: Option<i64>,
    pub route: Route,
    /// Homological bound `i_max` (definition route) or truncation `T`
    /// (BGG route) through which the answer is certified.
    pub bound: usize,
    pub evidence: Vec<String>,
    pub betti: Option<BettiTable>,
}

/// Default homological bound: the number of variables plus the width of
/// the support, plus two.
pub fn default_imax(m: &GradedEModule) -> usize {
    let supp = m.support();
    let width = match (supp.first(), supp.last()) {
        (Some(a), Some(b)) => (b - a + 1) as usize,
        _ => 0,
    };
    m.q() + width + 2
}

pub(crate) fn check_nonpositive(m: &GradedEModule) -> Result<()> {
    if let Some(&top) = m.support().last() {
        if top > 0 {
            return Err(Error::Precondition(format!(
                "module has a nonzero component in positive degree {top}"
            )));
        }
    }
    Ok(())
}

pub fn regularity_definition_route(m: &GradedEModule, i_max: usize) -> Result<RegularityReport> {
    check_nonpositive(m)?;
    let table = betti_table(m, i_max);
    let regularity = table.strands().last().copied();
    let evidence = match regularity {
        None => vec![format!("Tor_i vanishes for i <= {i_max}")],
        Some(r) => table
            .entries()
            .filter(|((i, t), _)| -(*i as i64) - t == r)
            .map(|((i, t), v)| format!("beta[{i},{t}] = {v}"))
            .collect(),
    };
    Ok(RegularityReport {
        regularity,
        route: Route::Definition,
        bound: i_max,
        evidence,
        betti: Some(table),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emodule::{shift, ExteriorContext};
    use crate::linalg::Field;

    #[test]
    fn shifted_residue_field() {
        let c = ExteriorContext::new(2, Field::Rationals);
        let k = GradedEModule::residue_field(c, 0);
        assert_eq!(regularity_definition_route(&k, 4).unwrap().regularity, Some(0));
        let k3 = shift(&k, 3);
        assert_eq!(regularity_definition_route(&k3, 4).unwrap().regularity, Some(3));
        assert!(regularity_definition_route(&shift(&k, -1), 4).is_err());
        let z = GradedEModule::zero(c);
        assert_eq!(regularity_definition_route(&z, 4).unwrap().regularity, None);
    }
}
