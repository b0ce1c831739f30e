//! Numerical checks of the estimates behind the coding: Jacobians and distortion,
//! Kerckhoff fractions, roof tails, normality, norm bounds along trajectories, the
//! torus volume, and enumeration of core graphs.

mod bounds;
mod enumerate;
mod jacobian;
mod kerckhoff;
mod normality;
mod staggered;
mod tails;
mod volume;

pub use bounds::{norm_constant, rho_jacobian, roof_against_matrix, upper_boundary_norms, NormBounds, RoofCheck};
pub use enumerate::{enumerate_core_graph, CoreGraph, CoreNode, StratumComponents, ENUMERATION_LIMIT};
pub use jacobian::{
    distortion, grid_points, jacobian_full, jacobian_full_numeric, jacobian_restricted, jacobian_restricted_ratio,
    projective_action, theta_distortion_bound, JACOBIAN_STEP, RICHARDSON_SWITCH,
};
pub use kerckhoff::{column_growth_before_flip, kerckhoff_estimate, KerckhoffReport, KerckhoffRow, EXPANSION_CAP};
pub use normality::{expansion_begins_with, normality_check, transversal_weight, NormalityReport};
pub use staggered::{widest_flip_run, StaggeredReport};
pub use tails::{pooled_durations, seeded_trajectory, tail_fit, TailFit, MIN_TAIL_SAMPLES, RENORM_EVERY, TAIL_TRIM};
pub use volume::{height_segment, torus_cell, torus_integrals, torus_volume, VolumeReport, VOLUME_SCALE};
