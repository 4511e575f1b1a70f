//! Warped-product cone metrics with lower Ricci bounds.
//!
//! The crate builds and numerically certifies the constructive machinery of
//! nonunique tangent cones for noncollapsed limits with lower Ricci bounds:
//!
//! * analytic Ricci kernels for the warped-product ansätze on intervals
//!   times S^3 and for warped cones over metric families, each checked
//!   against a finite-difference oracle ([`berger`], [`cone`], [`oracle`]);
//! * the triple-log cone profiles h, f with directional positivity
//!   certificates and a parameter feasibility search ([`lemma`]), plus the
//!   recurrent parameter paths, closability modification and rescaled
//!   tangent-cone snapshots ([`path`]);
//! * the iterated-suspension family over the volume-constrained parameter
//!   manifold ([`suspension`], [`loop_family`]) and the bubble / football /
//!   cobordism gluing families ([`gluing`]);
//! * finite metric-space sampling and two-sided Gromov-Hausdorff bounds for
//!   desk-scale tangent-cone experiments ([`sample`], [`gh`]);
//! * tabular text reports for reproducible runs ([`report`]).

pub mod berger;
pub mod chart;
pub mod cone;
pub mod error;
pub mod gh;
pub mod gluing;
pub mod lemma;
pub mod loop_family;
pub mod oracle;
pub mod path;
pub mod report;
pub mod sample;
pub mod suspension;
pub mod warp;

pub use berger::{
    berger_ricci_coords, five_d_ricci_coords, ricci_5d, ricci_berger, sff_slice, AnsatzRecord,
    BergerAnsatz, BergerRicci, ClosureTag, DoubleAnsatz5D, FiveDRicci, SliceGeometry, SliceOf,
    TopologyTag,
};
pub use chart::MetricField;
pub use cone::{
    cone_curvature, family_conditions, ricci_cone_analytic, round_family, CrossSectionFamily,
    FamilyConditions, RadialProfile,
};
pub use error::{Error, Result};
pub use gh::{
    gh_lower_bound, gh_upper_bound, tangent_cone_experiment, ExperimentRow, GHBoundPair, GhConfig,
};
pub use gluing::{
    bubble, cobordism_pieces, cobordism_search, ell_bar_search, example2_family, football,
    glue_check, solve_r_eps, CobordismReport, ExampleIIFamilySpec, GluePiece, GluePlan, Stage,
};
pub use lemma::{
    case_bound, directional_ricci_min, eval_eps, eval_f, eval_h, feasibility_search, lemma_bounds,
    ConeMetric, DirectionalGrid, HProfile, LemmaParams, LogRadius, RicciReport, SweepSchedule,
};
pub use loop_family::{build_example1_family, Example1Family};
pub use oracle::{ricci_close, ricci_fd, OracleConfig};
pub use path::{
    cone_closeness, dyadic_schedule, recurrent_path, tangent_cone_at_scale, ClosabilityCurve,
    ComposedFamily, ConeSnapshot, OmegaFamily, PathSpec,
};
pub use sample::{sample_space, FiniteMetricSpace, SampleConfig};
pub use suspension::{
    omega_boundary_limit, sec_suspension, smooth_suspension, suspension_metric, suspension_ricci,
    suspension_volume, wallis_integral, OmegaPoint, SmoothedWarp, SuspensionSpec,
};
pub use warp::WarpFn;
