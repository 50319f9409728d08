//! Free complexes over `k[[t1..te]]` with the `m`-adic filtration and
//! their spectral sequences.

pub mod complex;
pub mod criterion;
pub mod induce;
pub mod jet;
pub mod maps;
pub mod pages;
pub mod poly;

pub use complex::{
    homogeneous_degree, reduce_mod_m, sum_complexes, validate_complex, D2Violation, FilteredFreeComplex, Homogeneity,
    PolyMatrix, ReducedComplex,
};
pub use criterion::{check_degeneration_criterion, CriterionVerdict, CriterionWitness};
pub use induce::{e1_check, e1_total_complex, induce_emodule, predict_vanishing, E1Check, VanishingPrediction};
pub use jet::JetLayout;
pub use maps::{is_null_homotopic_action, map_on_page, map_on_pages, ChainMap, Homotopy, PageMaps};
pub use pages::{compute_page, degenerates_at, page_table, PageEntry, PageTable, SpectralSequence};
pub use poly::Polynomial;
