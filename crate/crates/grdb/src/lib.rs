//! Exact enumeration of polarised threefold orbifolds described by equations
//! in Gorenstein formats.
//!
//! The library matches orbifold Riemann--Roch contributions of isolated
//! quotient singularities against the Hilbert series that a graded format
//! forces, and computes the numerical invariants of every hit. All
//! arithmetic is exact: big-integer polynomials, rational functions with
//! cyclotomic-product denominators, and big rationals for invariants.
//!
//! Modules:
//! - [`poly`], [`series`]: exact polynomial and Hilbert-series arithmetic,
//!   reduction modulo `A_r = (1-t^r)/(1-t)`
//! - [`sing`], [`orb`]: quotient singularities and their Riemann--Roch
//!   contributions, by closed form and by generic modular inversion
//! - [`formats`]: complete intersections, Gr(2,5) Pfaffians, hypersurface
//!   products and OGr(5,10), with grading enumeration
//! - [`search`]: the weight-enumeration and basket-matching pipeline
//! - [`invariants`]: chi(O), A^3, K^3, K.c2 and plurigenera with cross-checks
//! - [`record`], [`reference`]: JSONL/CSV serialisation and the embedded
//!   reference tables with their verifier
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --example expand_series
//! cargo run --example orbifold_contribution
//! cargo run --example format_numerators
//! cargo run --example canonical_search
//! cargo run --example cy_kernels
//! cargo run --example higher_index
//! cargo run --example invariants_table
//! ```
//!
//! The `grdb` binary exposes the same pipeline as subcommands
//! (`search`, `porb`, `format`, `invariants`, `verify`, `kernels`).

pub mod error;
pub mod formats;
pub mod invariants;
pub mod orb;
pub mod poly;
pub mod record;
pub mod reference;
pub mod search;
pub mod series;
pub mod sing;

pub use error::GrdbError;
pub use formats::{
    ci_format, enumerate_gradings, gr25_format, ogr510_format, product_format, FamilySpec,
    FormatInstance, Gr25Grading, GradingParams, Ogr510Grading,
};
pub use invariants::{chi_o, degree_a3, invariant_set, k3_from_plurigenus, kc2, plurigenera, InvariantSet};
pub use orb::{
    find_kernels, inverse_numerator_closed, plurigenus_contribution, porb_generic,
    porb_terminal_closed, support_window, OrbContribution, SingularityMultiset,
};
pub use poly::IntPoly;
pub use record::{read_jsonl, write_csv, write_jsonl, CandidateRecord};
pub use reference::{verify_table1, verify_table2, verify_table3, DiffReport, TableId};
pub use search::{
    candidate_singularities, class_singularities, enumerate_ambient_weights, hilbert_series,
    initial_series, match_baskets, realisability_flags, run_search, subset_gcds, CandidateHit,
    Flags, RunReport, SearchConfig, SingClass,
};
pub use series::{reduce_mod_a, CycloRational, SeriesPrefix};
pub use sing::QuotientSingularity;
