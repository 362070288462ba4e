use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field2d::{
    bump_unchecked, phi_unchecked, BBox, BoundaryPart, Constraint, CutCellMesh, ImplicitRegion,
    Piece, Quadrature, SampledField2D, ScalarField2D, Zone,
};
use crate::parallel::{map_indexed, Execution};

/// Number of probe samples per line when measuring the vertical margin.
const MARGIN_SAMPLES: usize = 1025;
/// Grid points per axis when measuring the gradient oscillation on the ball.
const OSCILLATION_SAMPLES: usize = 257;

/// The three competitor families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "sublevel")]
    Sublevel,
    #[serde(rename = "profile2d")]
    Profile2D,
    #[serde(rename = "radial_bump")]
    RadialBump,
}

impl CaseTag {
    pub const ALL: [CaseTag; 3] = [CaseTag::Sublevel, CaseTag::Profile2D, CaseTag::RadialBump];

    pub fn name(self) -> &'static str {
        match self {
            CaseTag::Sublevel => "sublevel",
            CaseTag::Profile2D => "profile2d",
            CaseTag::RadialBump => "radial_bump",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Radii of the construction and the quadrature cell size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GeometryParams {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub h: f64,
}

impl Default for GeometryParams {
    fn default() -> Self {
        GeometryParams {
            r: 1.0,
            big_r: 2.0,
            h: 1.0 / 256.0,
        }
    }
}

impl GeometryParams {
    fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r < self.big_r && self.big_r.is_finite()) {
            return Err(Error::Precondition(format!(
                "radii must satisfy 0 < r < R, got r = {}, R = {}",
                self.r, self.big_r
            )));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::Precondition(format!(
                "cell size must be positive, got {}",
                self.h
            )));
        }
        Ok(())
    }
}

/// Quantities measured from the field around the probe point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FieldConstants {
    pub lambda: f64,
    /// Oscillation radius used by the constructions.
    pub eps: f64,
    /// Largest sampled `|grad u - lambda e_2|` on the ball.
    pub oscillation: f64,
    /// Smallest sampled `u` on `{x_2 = eps R}` and `-u` on `{x_2 = -eps R}`.
    pub delta: f64,
}

/// `min(1/4, (lambda - 1) / 2)` above the normalized yield strain, `1/4`
/// otherwise.
pub fn default_eps(lambda: f64, yield_strain: f64) -> f64 {
    let excess = lambda / yield_strain - 1.0;
    if excess > 0.0 {
        (0.5 * excess * yield_strain).min(0.25)
    } else {
        0.25
    }
}

/// Measures the oscillation and vertical margin of `u` on the ball `B_R`.
pub fn field_constants(
    u: &SampledField2D,
    eps: f64,
    big_r: f64,
    exec: Execution,
) -> Result<FieldConstants> {
    u.check_normalized(1e-6)?;
    let lambda = u.lambda();
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Precondition(format!(
            "oscillation radius must lie in (0, 1/2), got {eps}"
        )));
    }
    let oscillation = if u.is_affine() {
        0.0
    } else {
        let n = OSCILLATION_SAMPLES;
        let step = 2.0 * big_r / (n - 1) as f64;
        map_indexed(exec, n, |j| {
            let y = -big_r + j as f64 * step;
            (0..n)
                .map(|i| [-big_r + i as f64 * step, y])
                .filter(|p| p[0].hypot(p[1]) <= big_r)
                .map(|p| {
                    let g = u.gradient(p);
                    g[0].hypot(g[1] - lambda)
                })
                .fold(0.0, f64::max)
        })
        .into_iter()
        .fold(0.0, f64::max)
    };
    if oscillation >= eps {
        return Err(Error::Precondition(format!(
            "gradient oscillation {oscillation} on the ball is not below eps = {eps}"
        )));
    }
    let height = eps * big_r;
    let half = big_r * (1.0 - eps * eps).sqrt();
    let delta = (0..MARGIN_SAMPLES)
        .map(|k| -half + 2.0 * half * k as f64 / (MARGIN_SAMPLES - 1) as f64)
        .map(|x| u.value([x, height]).min(-u.value([x, -height])))
        .fold(f64::INFINITY, f64::min);
    if !(delta > 0.0) {
        return Err(Error::Precondition(format!(
            "field has no positive vertical margin (delta = {delta})"
        )));
    }
    Ok(FieldConstants {
        lambda,
        eps,
        oscillation,
        delta,
    })
}

/// A competitor region with its quadrature mesh.
#[derive(Clone, Debug)]
pub struct CompetitorRegion {
    pub case: CaseTag,
    /// Level in units of `u` (height for the profile family).
    pub sigma: f64,
    pub geometry: GeometryParams,
    pub constants: FieldConstants,
    pub region: ImplicitRegion,
    pub bbox: BBox,
    pub mesh: CutCellMesh,
}

/// Builds `V` for the chosen family:
/// `{x in B_R : 0 < u < sigma}`, `{|x_1| < R, 0 < x_2 < sigma phi(|x_1|)}` or
/// `{x in B_R : 0 < u < sigma a(x)}`.
pub fn build_region(
    case: CaseTag,
    u: &SampledField2D,
    sigma: f64,
    geometry: GeometryParams,
    constants: FieldConstants,
    exec: Execution,
) -> Result<CompetitorRegion> {
    geometry.validate()?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain("build_region", "sigma", sigma));
    }
    if sigma >= constants.delta {
        return Err(Error::SigmaTooLarge {
            sigma,
            delta: constants.delta,
        });
    }
    let GeometryParams { r, big_r, h } = geometry;
    let (lambda, osc) = (constants.lambda, constants.oscillation);
    let pad = 1e-12 * big_r;
    let level_box = |x_lo: f64, x_hi: f64| {
        let lo = (-osc * big_r / (lambda - osc)).max(-big_r);
        let hi = ((sigma + osc * big_r) / (lambda - osc)).min(big_r);
        BBox::new([x_lo - pad, lo - pad], [x_hi + pad, hi + pad])
    };
    let field = |u: &SampledField2D| {
        let u = u.clone();
        move |p| u.value(p)
    };

    let pieces = match case {
        CaseTag::Sublevel => {
            let (v_lo, v_hi) = (field(u), field(u));
            vec![Piece {
                zone: Zone::Whole,
                bbox: level_box(-big_r, big_r),
                constraints: vec![
                    Constraint::new(BoundaryPart::Lateral, move |p| {
                        p[0] * p[0] + p[1] * p[1] - big_r * big_r
                    }),
                    Constraint::new(BoundaryPart::Bottom, move |p| -v_lo(p)),
                    Constraint::new(BoundaryPart::Top, move |p| v_hi(p) - sigma),
                ],
            }]
        }
        CaseTag::Profile2D => {
            let bottom = || Constraint::new(BoundaryPart::Bottom, |p| -p[1]);
            let top = || {
                Constraint::new(BoundaryPart::Top, move |p| {
                    p[1] - sigma * phi_unchecked(r, big_r, p[0].abs()).0
                })
            };
            let height =
                |x_lo: f64, x_hi: f64| BBox::new([x_lo - pad, -pad], [x_hi + pad, sigma + pad]);
            vec![
                Piece {
                    zone: Zone::Outer,
                    bbox: height(-big_r, -r),
                    constraints: vec![
                        bottom(),
                        top(),
                        Constraint::new(BoundaryPart::Interface, move |p| p[0] + r),
                    ],
                },
                Piece {
                    zone: Zone::Inner,
                    bbox: height(-r, r),
                    constraints: vec![
                        bottom(),
                        Constraint::new(BoundaryPart::Top, move |p| p[1] - sigma),
                        Constraint::new(BoundaryPart::Interface, move |p| p[0].abs() - r),
                    ],
                },
                Piece {
                    zone: Zone::Outer,
                    bbox: height(r, big_r),
                    constraints: vec![
                        bottom(),
                        top(),
                        Constraint::new(BoundaryPart::Interface, move |p| r - p[0]),
                    ],
                },
            ]
        }
        CaseTag::RadialBump => {
            let (v1, v2, v3, v4) = (field(u), field(u), field(u), field(u));
            vec![
                Piece {
                    zone: Zone::Inner,
                    bbox: level_box(-r, r),
                    constraints: vec![
                        Constraint::new(BoundaryPart::Interface, move |p| {
                            p[0] * p[0] + p[1] * p[1] - r * r
                        }),
                        Constraint::new(BoundaryPart::Bottom, move |p| -v1(p)),
                        Constraint::new(BoundaryPart::Top, move |p| v2(p) - sigma),
                    ],
                },
                Piece {
                    zone: Zone::Outer,
                    bbox: level_box(-big_r, big_r),
                    constraints: vec![
                        Constraint::new(BoundaryPart::Interface, move |p| {
                            r * r - (p[0] * p[0] + p[1] * p[1])
                        }),
                        Constraint::new(BoundaryPart::Lateral, move |p| {
                            p[0] * p[0] + p[1] * p[1] - big_r * big_r
                        }),
                        Constraint::new(BoundaryPart::Bottom, move |p| -v3(p)),
                        Constraint::new(BoundaryPart::Top, move |p| {
                            v4(p) - sigma * bump_unchecked(r, big_r, p).0
                        }),
                    ],
                },
            ]
        }
    };
    let region = ImplicitRegion::new(pieces);
    let bbox = region.bbox().expect("regions have at least one piece");
    if !bbox.strictly_inside(&u.domain()) {
        return Err(Error::Containment(format!(
            "{case} region box [{}, {}] x [{}, {}] is not inside the field domain",
            bbox.min[0], bbox.max[0], bbox.min[1], bbox.max[1]
        )));
    }
    let mesh = CutCellMesh::build(&region, h, Quadrature::CutCell, exec);
    Ok(CompetitorRegion {
        case,
        sigma,
        geometry,
        constants,
        region,
        bbox,
        mesh,
    })
}
