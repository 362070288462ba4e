//! Scaled competitors `w = alpha u` on sublevel, profile and radial-bump
//! regions: energy gaps, BV distances, closed-form bounds and the
//! certificate search.

mod bounds;
mod gap;
mod region;
mod search;

pub use bounds::{
    case1_bound, case3_leading_bound, closed_form_gap_profile, closed_form_gap_rect,
    profile_threshold, rect_threshold,
};
pub use gap::{
    bump_level_set, bv_distance, bv_distance_surrogate, bv_norm_on_domain,
    divergence_identity_residual, energy_gap, level_set_a2_integral, taylor_flux_check, FluxCheck,
    GapBreakdown,
};
pub use region::{
    build_region, default_eps, field_constants, CaseTag, CompetitorRegion, FieldConstants,
    GeometryParams,
};
pub use search::{
    default_alpha_grid, default_sigma_grid, scan_family, search_certificate, Certificate,
    CertificateConstants, FamilyScan, FamilySpec, Revalidation, ScanMode, ScanRow,
};
