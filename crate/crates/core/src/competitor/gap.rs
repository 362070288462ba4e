use serde::Serialize;

use super::region::{CompetitorRegion, FieldConstants, GeometryParams};
use crate::error::{Error, Result};
use crate::field2d::{
    bump_unchecked, extract_level_set, surface_integral, BBox, BoundaryPart, BoundarySegment,
    CutCellMesh, FnField, ImplicitRegion, LevelSetCurve, Point, Quadrature, SampledField2D,
    ScalarField2D, SurfaceRule, Zone,
};
use crate::laws::{CohesiveLaw, EnvelopeLaw, ScalarLaw};
use crate::parallel::Execution;

fn grad_norm(u: &SampledField2D, p: Point) -> f64 {
    let g = u.gradient(p);
    g[0].hypot(g[1])
}

fn charged(s: &BoundarySegment) -> bool {
    s.part != BoundaryPart::Interface
}

/// Terms of `E(u) - E(alpha u on V)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GapBreakdown {
    /// `int_V Fbar(|grad u|) - Fbar(alpha |grad u|)`.
    pub bulk: f64,
    pub bulk_inner: f64,
    pub bulk_outer: f64,
    /// Cohesive cost `int G((1 - alpha) |u|)` on each boundary part.
    pub top: f64,
    pub lateral: f64,
    pub bottom: f64,
    pub surface_inner: f64,
    pub surface_outer: f64,
    pub gap: f64,
}

/// Energy decrease obtained by replacing `u` with `alpha u` on the region.
pub fn energy_gap(
    u: &SampledField2D,
    region: &CompetitorRegion,
    alpha: f64,
    envelope: &EnvelopeLaw,
    g: &CohesiveLaw,
    exec: Execution,
) -> Result<GapBreakdown> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain("energy_gap", "alpha", alpha));
    }
    let mesh = &region.mesh;
    let bulk_in = |zone: Option<Zone>| {
        mesh.cell_sum(exec, |c| {
            if zone.is_some_and(|z| z != c.zone) {
                return 0.0;
            }
            let s = grad_norm(u, c.point);
            (envelope.value(s) - envelope.value(alpha * s)) * c.weight
        })
    };
    let cost = |p: Point| g.value((1.0 - alpha) * u.value(p).abs());
    let surface = |keep: &(dyn Fn(&BoundarySegment) -> bool + Sync)| {
        mesh.boundary_integral(exec, SurfaceRule::Simpson, |s| charged(s) && keep(s), cost)
    };
    let bulk = bulk_in(None);
    let top = surface(&|s| s.part == BoundaryPart::Top);
    let lateral = surface(&|s| s.part == BoundaryPart::Lateral);
    let bottom = surface(&|s| s.part == BoundaryPart::Bottom);
    Ok(GapBreakdown {
        bulk,
        bulk_inner: bulk_in(Some(Zone::Inner)),
        bulk_outer: bulk_in(Some(Zone::Outer)),
        top,
        lateral,
        bottom,
        surface_inner: surface(&|s| s.zone == Zone::Inner),
        surface_outer: surface(&|s| s.zone == Zone::Outer),
        gap: bulk - (top + lateral + bottom),
    })
}

/// `||alpha u - u||_BV` with `alpha u` on the region and `u` outside it.
pub fn bv_distance(
    u: &SampledField2D,
    region: &CompetitorRegion,
    alpha: f64,
    exec: Execution,
) -> f64 {
    let mesh = &region.mesh;
    let volume = mesh.integrate(exec, |p| u.value(p).abs() + grad_norm(u, p));
    let trace = mesh.boundary_integral(exec, SurfaceRule::Simpson, charged, |p| u.value(p).abs());
    (1.0 - alpha) * (volume + trace)
}

/// `int_Omega |u| + int_Omega |grad u|` over the field domain.
pub fn bv_norm_on_domain(u: &SampledField2D, h: f64, exec: Execution) -> f64 {
    let mesh = CutCellMesh::build(
        &ImplicitRegion::rectangle(u.domain()),
        h,
        Quadrature::CutCell,
        exec,
    );
    mesh.integrate(exec, |p| u.value(p).abs() + grad_norm(u, p))
}

/// Upper bound `(1 - alpha) [||u||_BV + sigma H^1(boundary of V)]`.
pub fn bv_distance_surrogate(
    region: &CompetitorRegion,
    alpha: f64,
    bv_norm: f64,
    exec: Execution,
) -> f64 {
    let perimeter = region.mesh.boundary_length(exec, charged);
    (1.0 - alpha) * (bv_norm + region.sigma * perimeter)
}

/// `|int_V |grad u| - int_{boundary} (grad u / |grad u| . nu) u|`, with the
/// boundary term on projected chord midpoints.
pub fn divergence_identity_residual(
    u: &SampledField2D,
    region: &CompetitorRegion,
    exec: Execution,
) -> Result<f64> {
    let mesh = &region.mesh;
    let low = mesh
        .cells()
        .iter()
        .map(|c| c.point)
        .chain(mesh.boundary().iter().map(|s| s.quad_point))
        .map(|p| grad_norm(u, p))
        .fold(f64::INFINITY, f64::min);
    if !(low > 1.0) {
        return Err(Error::Precondition(format!(
            "|grad u| must exceed 1 on the region, found {low}"
        )));
    }
    let volume = mesh.integrate(exec, |p| grad_norm(u, p));
    let flux = mesh.segment_sum(exec, |s| {
        if !charged(s) {
            return 0.0;
        }
        let g = u.gradient(s.quad_point);
        let n = s.normal();
        (g[0] * n[0] + g[1] * n[1]) / g[0].hypot(g[1]) * u.value(s.quad_point) * s.length()
    });
    Ok((volume - flux).abs())
}

/// Pointwise comparison of the flux factor on `{u = sigma a}` in the annulus
/// with its second-order expansion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FluxCheck {
    pub sigma: f64,
    pub vertices: usize,
    /// Smallest `(grad u . grad v) / (|grad u| |grad v|)` over the vertices.
    pub min_factor: f64,
    /// Largest `(1 - |grad a|^2 sigma^2 / (2 (lambda - eps)^2) - factor) / sigma^3`.
    pub cubic_constant: f64,
    /// Largest `|(1 - factor) / sigma^2 - Q|` with `Q` the exact quadratic
    /// coefficient.
    pub quadratic_error: f64,
}

fn bump_level_field(u: &SampledField2D, r: f64, big_r: f64, sigma: f64) -> impl ScalarField2D + '_ {
    FnField::new(
        move |p: Point| u.value(p) - sigma * bump_unchecked(r, big_r, p).0,
        move |p: Point| {
            let g = u.gradient(p);
            let da = bump_unchecked(r, big_r, p).1;
            [g[0] - sigma * da[0], g[1] - sigma * da[1]]
        },
    )
}

fn level_box(constants: &FieldConstants, big_r: f64, sigma: f64, h: f64) -> BBox {
    let spread = constants.lambda - constants.oscillation;
    let lo = -constants.oscillation * big_r / spread;
    let hi = (sigma + constants.oscillation * big_r) / spread;
    BBox::new([-big_r, lo - h], [big_r, hi + h])
}

/// Evaluates the flux expansion at the vertices of the level set
/// `{u = sigma a}` that lie in the open annulus `r < |x| < R`.
/// The curve `{u = sigma a}` inside `B_R`.
pub fn bump_level_set(
    u: &SampledField2D,
    constants: &FieldConstants,
    geometry: GeometryParams,
    sigma: f64,
    exec: Execution,
) -> LevelSetCurve {
    let GeometryParams { r, big_r, h } = geometry;
    let v = bump_level_field(u, r, big_r, sigma);
    extract_level_set(&v, 0.0, &level_box(constants, big_r, sigma, h), h, exec).clip_to_ball(big_r)
}

pub fn taylor_flux_check(
    u: &SampledField2D,
    constants: &FieldConstants,
    geometry: GeometryParams,
    sigma: f64,
    exec: Execution,
) -> Result<FluxCheck> {
    let GeometryParams { r, big_r, .. } = geometry;
    let spread = constants.lambda - constants.eps;
    if !(spread > 0.0) {
        return Err(Error::Precondition(format!(
            "lambda - eps must be positive, got {spread}"
        )));
    }
    let curve = bump_level_set(u, constants, geometry, sigma, exec);
    let mut check = FluxCheck {
        sigma,
        vertices: 0,
        min_factor: f64::INFINITY,
        cubic_constant: f64::NEG_INFINITY,
        quadratic_error: 0.0,
    };
    for p in curve.vertices() {
        let rho = p[0].hypot(p[1]);
        if !(rho > r && rho < big_r) {
            continue;
        }
        let g = u.gradient(p);
        let da = bump_unchecked(r, big_r, p).1;
        let w = [g[0] - sigma * da[0], g[1] - sigma * da[1]];
        let (gn, wn) = (g[0].hypot(g[1]), w[0].hypot(w[1]));
        let factor = (g[0] * w[0] + g[1] * w[1]) / (gn * wn);
        let da2 = da[0] * da[0] + da[1] * da[1];
        let bound = 1.0 - da2 * sigma * sigma / (2.0 * spread * spread);
        let dot = da[0] * g[0] + da[1] * g[1];
        let q = (da2 * gn * gn - dot * dot) / (2.0 * gn.powi(4));
        check.vertices += 1;
        check.min_factor = check.min_factor.min(factor);
        check.cubic_constant = check.cubic_constant.max((bound - factor) / sigma.powi(3));
        check.quadratic_error = check
            .quadratic_error
            .max(((1.0 - factor) / (sigma * sigma) - q).abs());
    }
    if check.vertices == 0 {
        return Err(Error::Precondition(format!(
            "level set at sigma = {sigma} has no vertices in the annulus"
        )));
    }
    Ok(check)
}

/// `int a^2 dH^1` over the part of `{u = sigma a}` in the annulus.
pub fn level_set_a2_integral(
    u: &SampledField2D,
    constants: &FieldConstants,
    geometry: GeometryParams,
    sigma: f64,
    exec: Execution,
) -> f64 {
    let GeometryParams { r, big_r, .. } = geometry;
    let curve = bump_level_set(u, constants, geometry, sigma, exec);
    surface_integral(&curve, |p| {
        let rho = p[0].hypot(p[1]);
        if rho > r {
            bump_unchecked(r, big_r, p).0.powi(2)
        } else {
            0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::competitor::{build_region, default_eps, field_constants, CaseTag};
    use crate::laws::{build_envelope, BulkKind, BulkLaw, CohesiveKind, CohesiveLaw};
    use crate::parallel::Execution::Sequential;

    fn laws() -> (EnvelopeLaw, CohesiveLaw) {
        let f = BulkLaw::new(BulkKind::Power { p: 2.0 }).unwrap();
        let g = CohesiveLaw::new(CohesiveKind::Exp).unwrap();
        (build_envelope(&f, &g).unwrap(), g)
    }

    fn region(lambda: f64, case: CaseTag, sigma: f64) -> (SampledField2D, CompetitorRegion) {
        let u = SampledField2D::affine(lambda, BBox::centered(2.5));
        let c = field_constants(&u, default_eps(lambda, 1.0), 2.0, Sequential).unwrap();
        let reg = build_region(case, &u, sigma, GeometryParams::default(), c, Sequential).unwrap();
        (u, reg)
    }

    #[test]
    fn unit_alpha_gives_zero() {
        let (env, g) = laws();
        let (u, reg) = region(2.0, CaseTag::RadialBump, 0.05);
        let b = energy_gap(&u, &reg, 1.0, &env, &g, Sequential).unwrap();
        assert_eq!(b.gap, 0.0);
        assert_eq!(bv_distance(&u, &reg, 1.0, Sequential), 0.0);
    }

    #[test]
    fn breakdown_adds_up() {
        let (env, g) = laws();
        let (u, reg) = region(2.0, CaseTag::Profile2D, 0.08);
        let b = energy_gap(&u, &reg, 0.6, &env, &g, Sequential).unwrap();
        assert!((b.bulk_inner + b.bulk_outer - b.bulk).abs() < 1e-15);
        assert!((b.surface_inner + b.surface_outer - (b.top + b.lateral + b.bottom)).abs() < 1e-15);
        assert_eq!(b.bottom, 0.0);
        assert_eq!(b.lateral, 0.0);
        assert!(b.gap > 0.0);
    }

    #[test]
    fn below_yield_gaps_are_negative() {
        let (env, g) = laws();
        for sigma in [0.01, 0.05, 0.2] {
            let (u, reg) = region(0.9, CaseTag::Profile2D, sigma);
            for alpha in [0.5, 0.7, 0.9] {
                assert!(
                    energy_gap(&u, &reg, alpha, &env, &g, Sequential)
                        .unwrap()
                        .gap
                        < 0.0
                );
            }
        }
    }

    #[test]
    fn bv_distance_matches_an_independent_quadrature() {
        let u = SampledField2D::affine(2.0, BBox::centered(2.5));
        let c = field_constants(&u, 0.25, 1.0, Sequential).unwrap();
        let geom = GeometryParams {
            r: 0.5,
            big_r: 1.0,
            h: 1.0 / 256.0,
        };
        let reg = build_region(CaseTag::Sublevel, &u, 0.2, geom, c, Sequential).unwrap();
        let d = bv_distance(&u, &reg, 0.6, Sequential);
        // Slab 0 < x_2 < 0.1 in the unit disk: integrate over x_2 with the
        // chord width 2 sqrt(1 - y^2), plus |u| on the two lateral arcs.
        let n = 20000;
        let dy = 0.1 / n as f64;
        let (mut vol, mut lat) = (0.0, 0.0);
        for k in 0..n {
            let y = (k as f64 + 0.5) * dy;
            let w = 2.0 * (1.0 - y * y).sqrt();
            vol += (2.0 * y + 2.0) * w * dy;
            lat += 2.0 * (2.0 * y) / (1.0 - y * y).sqrt() * dy;
        }
        let top = 0.2 * 2.0 * (1.0f64 - 0.01).sqrt();
        let expected = 0.4 * (vol + lat + top);
        assert!((d - expected).abs() < 1e-6, "{d} vs {expected}");
        let surrogate = bv_distance_surrogate(
            &reg,
            0.6,
            bv_norm_on_domain(&u, 1.0 / 64.0, Sequential),
            Sequential,
        );
        assert!(surrogate > d);
    }

    #[test]
    fn divergence_residual_on_slab_and_bump() {
        let (u, reg) = region(2.0, CaseTag::Sublevel, 0.5);
        assert!(divergence_identity_residual(&u, &reg, Sequential).unwrap() <= 5e-3);
        let (u, reg) = region(2.0, CaseTag::RadialBump, 0.5);
        assert!(divergence_identity_residual(&u, &reg, Sequential).unwrap() <= 1e-2);
        let (u, reg) = region(0.9, CaseTag::Sublevel, 0.1);
        assert!(divergence_identity_residual(&u, &reg, Sequential).is_err());
    }

    #[test]
    fn flux_factor_expansion() {
        let u = SampledField2D::affine(2.0, BBox::centered(2.5));
        let c = field_constants(&u, 0.25, 2.0, Sequential).unwrap();
        for sigma in [0.02, 0.04, 0.08] {
            let f =
                taylor_flux_check(&u, &c, GeometryParams::default(), sigma, Sequential).unwrap();
            assert!(f.vertices > 100);
            assert!(f.min_factor > 0.99 && f.min_factor <= 1.0);
            assert!(f.cubic_constant < 1.0);
            assert!(f.quadratic_error < sigma);
        }
    }

    #[test]
    fn a2_integral_shrinks_toward_the_profile_value() {
        // For sigma -> 0 the curve tends to the two annulus segments on x_2 = 0,
        // where int a^2 = 2 (R - r) / 5.
        let u = SampledField2D::affine(2.0, BBox::centered(2.5));
        let c = field_constants(&u, 0.25, 2.0, Sequential).unwrap();
        let v = level_set_a2_integral(&u, &c, GeometryParams::default(), 0.01, Sequential);
        assert!((v - 0.4).abs() < 1e-2, "{v}");
    }
}
