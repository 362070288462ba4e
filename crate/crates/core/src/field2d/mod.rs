//! Planar geometry for the competitor constructions: sampled fields, the
//! taper profile and radial bump, level-set extraction and quadrature on
//! implicitly defined regions.

mod field;
mod level_set;
mod profile;
mod quadrature;

pub use field::{BBox, FnField, GridData, SampledField2D, ScalarField2D};
pub use level_set::{extract_level_set, LevelSetCurve, Polyline};
pub(crate) use profile::{bump_unchecked, phi_unchecked};
pub use profile::{
    profile_ode_residual, profile_phi, radial_bump, unit_ball_measure, ProfileValue, ProofConstants,
};
pub use quadrature::{
    region_integral, surface_integral, BoundaryPart, BoundarySegment, Constraint, CutCellMesh,
    ImplicitRegion, Piece, QuadCell, Quadrature, SurfaceRule, Zone,
};

pub type Point = [f64; 2];

pub(crate) fn norm(p: Point) -> f64 {
    p[0].hypot(p[1])
}

pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Root of `f` on the segment `a -> b`, assuming `f(a)` and `f(b)` differ in
/// sign (a zero endpoint is returned as is). Illinois variant of regula
/// falsi; the endpoints are put in lexicographic order first so a shared edge
/// yields the same point from either side.
pub(crate) fn segment_root<F: Fn(Point) -> f64>(
    f: &F,
    a: Point,
    b: Point,
    fa: f64,
    fb: f64,
) -> Point {
    let (a, b, fa, fb) = if (a[0], a[1]) <= (b[0], b[1]) {
        (a, b, fa, fb)
    } else {
        (b, a, fb, fa)
    };
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    let at = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    let (mut lo, mut hi, mut flo, mut fhi) = (0.0f64, 1.0f64, fa, fb);
    let mut side = 0i8;
    for _ in 0..100 {
        let t = (lo * fhi - hi * flo) / (fhi - flo);
        let t = if t > lo && t < hi { t } else { 0.5 * (lo + hi) };
        let ft = f(at(t));
        if ft == 0.0 {
            return at(t);
        }
        if (ft < 0.0) == (flo < 0.0) {
            lo = t;
            flo = ft;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = t;
            fhi = ft;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
        if hi - lo <= 1e-15 {
            break;
        }
    }
    at(0.5 * (lo + hi))
}
