//! Particle ladders of growing size, support diameters and Wasserstein-1 diagnostics.

pub mod ladder;
pub mod measure;

pub use ladder::{
    ladder_scenario, n_independence_check, n_independence_report, DecayRow, LadderMember,
    MeanFieldConfig, MeanFieldReport, ReferenceProfile, W1Row,
};
pub use measure::{
    empirical_at, min_cost_assignment, support_diameter, wasserstein1, wasserstein1_assignment,
    EmpiricalMeasure, MAX_TRANSPORT_POINTS,
};
