use serde::Serialize;

use super::gap::{bv_distance, bv_norm_on_domain, energy_gap};
use super::region::{
    build_region, default_eps, field_constants, CaseTag, CompetitorRegion, FieldConstants,
    GeometryParams,
};
use crate::error::{Error, Result};
use crate::field2d::{BoundaryPart, ProofConstants, SampledField2D};
use crate::laws::{CohesiveLaw, EnvelopeLaw};
use crate::parallel::Execution;
use crate::report::Json;

/// Relative size of the certification threshold against `(1 - alpha) lambda sigma^2`.
const GAP_THRESHOLD: f64 = 1e-6;

/// `1 - 2^-j` for `j = 1..=8`.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..=8).map(|j| 1.0 - 0.5f64.powi(j)).collect()
}

/// `1e-4 * 2^k` for all `k` with value below `delta`.
pub fn default_sigma_grid(delta: f64) -> Vec<f64> {
    std::iter::successors(Some(1e-4), |s| Some(s * 2.0))
        .take_while(|&s| s < delta)
        .collect()
}

/// Whether the scan is restricted to scalings that keep `alpha u` above yield.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    AboveYield,
    Audit,
}

/// One family and its parameter grids.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub case: CaseTag,
    pub geometry: GeometryParams,
    /// Defaults to [`default_sigma_grid`] of the measured margin.
    pub sigma_grid: Option<Vec<f64>>,
    /// Defaults to [`default_alpha_grid`].
    pub alpha_grid: Option<Vec<f64>>,
    pub eta: f64,
}

impl FamilySpec {
    pub fn new(case: CaseTag) -> Self {
        FamilySpec {
            case,
            geometry: GeometryParams::default(),
            sigma_grid: None,
            alpha_grid: None,
            eta: 1.0,
        }
    }
}

/// One evaluated `(alpha, sigma)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub case: CaseTag,
    pub lambda: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub gap: f64,
    pub bv_distance: f64,
    pub tau_gap: f64,
    pub certified: bool,
}

/// All rows of a family scan plus the constants it measured.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyScan {
    pub case: CaseTag,
    pub mode: ScanMode,
    pub constants: ProofConstants,
    pub oscillation: f64,
    pub bv_norm: f64,
    /// Scalings that passed the admissibility filters, in scan order.
    pub alphas: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub rows: Vec<ScanRow>,
}

impl FamilyScan {
    pub fn first_certified(&self) -> Option<&ScanRow> {
        self.rows.iter().find(|r| r.certified)
    }
}

/// Constants recorded with a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CertificateConstants {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub eps: f64,
    pub delta: f64,
    /// Quadratic-deficit bounds of `G`; absent for infinitely curved laws.
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub k: f64,
}

/// A witness `(alpha, V)` with positive gap within the BV budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub case: CaseTag,
    pub lambda: f64,
    pub alpha: f64,
    pub sigma: f64,
    pub h: f64,
    pub gap: f64,
    pub bv_distance: f64,
    pub tau_gap: f64,
    pub eta: f64,
    pub constants: CertificateConstants,
}

/// Values recomputed from scratch for a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Revalidation {
    pub gap: f64,
    pub bv_distance: f64,
    pub valid: bool,
}

impl Certificate {
    /// Rebuilds the region and recomputes the gap and BV distance.
    pub fn revalidate(
        &self,
        u: &SampledField2D,
        envelope: &EnvelopeLaw,
        g: &CohesiveLaw,
        exec: Execution,
    ) -> Result<Revalidation> {
        let geometry = GeometryParams {
            r: self.constants.r,
            big_r: self.constants.big_r,
            h: self.h,
        };
        let constants = field_constants(u, self.constants.eps, geometry.big_r, exec)?;
        let region = build_region(self.case, u, self.sigma, geometry, constants, exec)?;
        let gap = energy_gap(u, &region, self.alpha, envelope, g, exec)?.gap;
        let bv = bv_distance(u, &region, self.alpha, exec);
        Ok(Revalidation {
            gap,
            bv_distance: bv,
            valid: gap > self.tau_gap && bv < self.eta,
        })
    }

    pub fn to_json(&self) -> Json {
        let opt = |x: Option<f64>| x.map_or(Json::Null, Json::Num);
        let c = &self.constants;
        Json::obj([
            ("case", Json::Str(self.case.name().into())),
            ("lambda", Json::Num(self.lambda)),
            ("alpha", Json::Num(self.alpha)),
            ("sigma", Json::Num(self.sigma)),
            ("gap", Json::Num(self.gap)),
            ("bv_distance", Json::Num(self.bv_distance)),
            ("tau_gap", Json::Num(self.tau_gap)),
            ("eta", Json::Num(self.eta)),
            ("h", Json::Num(self.h)),
            (
                "constants",
                Json::obj([
                    ("r", Json::Num(c.r)),
                    ("R", Json::Num(c.big_r)),
                    ("eps", Json::Num(c.eps)),
                    ("delta", Json::Num(c.delta)),
                    ("c1", opt(c.c1)),
                    ("c2", opt(c.c2)),
                    ("k", Json::Num(c.k)),
                ]),
            ),
        ])
    }
}

fn validate_grid(name: &'static str, grid: &[f64], lo: f64, hi: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::config(name, "grid must not be empty"));
    }
    if let Some(bad) = grid.iter().find(|&&x| !(x > lo && x < hi)) {
        return Err(Error::config(
            name,
            format!("value {bad} outside ({lo}, {hi})"),
        ));
    }
    Ok(())
}

/// Evaluates every admissible `(alpha, sigma)` pair of a family: scalings in
/// decreasing order, levels in increasing order.
pub fn scan_family(
    u: &SampledField2D,
    envelope: &EnvelopeLaw,
    g: &CohesiveLaw,
    spec: &FamilySpec,
    exec: Execution,
) -> Result<FamilyScan> {
    let geometry = spec.geometry;
    let lambda = u.lambda();
    let e_m = envelope.yield_strain();
    let eps = default_eps(lambda, e_m);
    let fc: FieldConstants = field_constants(u, eps, geometry.big_r, exec)?;
    let mut constants = ProofConstants::new(lambda, eps, geometry.r, geometry.big_r, fc.delta)?;

    let sigmas = spec
        .sigma_grid
        .clone()
        .unwrap_or_else(|| default_sigma_grid(fc.delta));
    validate_grid("geometry.sigma_grid", &sigmas, 0.0, f64::INFINITY)?;
    let mut alphas = spec.alpha_grid.clone().unwrap_or_else(default_alpha_grid);
    validate_grid("geometry.alpha_grid", &alphas, 0.0, 1.0)?;
    alphas.sort_by(|a, b| b.total_cmp(a));
    alphas.dedup();

    let regions = sigmas
        .iter()
        .map(|&s| build_region(spec.case, u, s, geometry, fc, exec))
        .collect::<Result<Vec<CompetitorRegion>>>()?;
    for reg in &regions {
        let lateral = reg
            .mesh
            .boundary_length(exec, |s| s.part == BoundaryPart::Lateral);
        let top = reg
            .mesh
            .boundary_length(exec, |s| s.part == BoundaryPart::Top);
        constants.slab = constants.slab.max(lateral / reg.sigma);
        constants.area_bound = constants.area_bound.max(top);
    }
    let bv_norm = bv_norm_on_domain(u, geometry.h, exec);

    let mode = if lambda > e_m {
        ScanMode::AboveYield
    } else {
        ScanMode::Audit
    };
    alphas.retain(|&a| {
        let above = mode == ScanMode::Audit || a * (lambda - eps) > e_m;
        let budget = spec.case != CaseTag::RadialBump
            || (1.0 - a) * (bv_norm + fc.delta * constants.area_bound) < spec.eta;
        above && budget
    });

    let mut rows = Vec::with_capacity(alphas.len() * regions.len());
    for &alpha in &alphas {
        for reg in &regions {
            let gap = energy_gap(u, reg, alpha, envelope, g, exec)?.gap;
            let bv = bv_distance(u, reg, alpha, exec);
            let tau_gap = GAP_THRESHOLD * (1.0 - alpha) * lambda * reg.sigma * reg.sigma;
            rows.push(ScanRow {
                case: spec.case,
                lambda,
                alpha,
                sigma: reg.sigma,
                gap,
                bv_distance: bv,
                tau_gap,
                certified: gap > tau_gap && bv < spec.eta,
            });
        }
    }
    Ok(FamilyScan {
        case: spec.case,
        mode,
        constants,
        oscillation: fc.oscillation,
        bv_norm,
        alphas,
        sigmas,
        rows,
    })
}

/// First certified row of [`scan_family`], packaged as a certificate.
pub fn search_certificate(
    u: &SampledField2D,
    envelope: &EnvelopeLaw,
    g: &CohesiveLaw,
    spec: &FamilySpec,
    exec: Execution,
) -> Result<Option<Certificate>> {
    let scan = scan_family(u, envelope, g, spec, exec)?;
    let (c1, c2) = g.class().constants().unzip();
    Ok(scan.first_certified().map(|row| Certificate {
        case: row.case,
        lambda: row.lambda,
        alpha: row.alpha,
        sigma: row.sigma,
        h: spec.geometry.h,
        gap: row.gap,
        bv_distance: row.bv_distance,
        tau_gap: row.tau_gap,
        eta: spec.eta,
        constants: CertificateConstants {
            r: scan.constants.r,
            big_r: scan.constants.big_r,
            eps: scan.constants.eps,
            delta: scan.constants.delta,
            c1,
            c2,
            k: scan.constants.k,
        },
    }))
}
