//! Catalog-driven algebraic closure `cl^k` / `cl^{k,m}` and checkers for
//! the closure axioms, containment, locality, transparency, smoothness and
//! first-order definability.

mod catalog;
mod checks;
mod compute;
mod formula;

pub use catalog::{CatalogEntry, ClosureCatalog, Flag};
pub use checks::{
    check_axioms, check_containment, check_local, check_smooth, check_transparent, AxiomReport,
    Clause, ClauseResult, LocalReport, SmoothCounterexample, SmoothReport, TransparencyReport,
    LOCAL_SEARCH_BOUND,
};
pub use compute::{cl_k, cl_k_with, cl_km, closure_with_witnesses, sweep, Closure, ClosureParams, Strategy, SWEEP_BOUND};
pub use formula::{algebraic_types, closure_defining_formula};
