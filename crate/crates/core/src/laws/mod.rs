//! Material laws: the convex bulk density `F`, the concave cohesive
//! density `G`, and the relaxed envelope built from them.

mod bulk;
mod cohesive;
mod envelope;

pub use bulk::{BulkKind, BulkLaw};
pub use cohesive::{curvature_class, CohesiveKind, CohesiveLaw, CurvatureClass};
pub use envelope::{build_envelope, normalize, solve_yield_strain, EnvelopeLaw};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on the yield-strain residual.
pub const TAU_ROOT: f64 = 1e-10;
/// Minimum relative increase of `F'` between validation grid points.
pub const TAU_CONV: f64 = 1e-12;
/// `(G(t) - G'(0) t) / t^2` must stay below `-TAU_NEG`.
pub const TAU_NEG: f64 = 1e-6;
/// Ratios below `-1 / TAU_INF` classify the law as infinitely curved.
pub const TAU_INF: f64 = 1e-3;
/// Number of points in the geometric validation grid on `[1e-8, 10]`.
pub const VALIDATION_POINTS: usize = 512;

/// A scalar density on `[0, inf)` with an analytic derivative.
pub trait ScalarLaw {
    fn value(&self, x: f64) -> f64;
    fn deriv(&self, x: f64) -> f64;
}

/// `x -> scale * base(stretch * x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub scale: f64,
    pub stretch: f64,
}

impl Default for Scaling {
    fn default() -> Self {
        Scaling {
            scale: 1.0,
            stretch: 1.0,
        }
    }
}

impl Scaling {
    pub(crate) fn compose(self, scale: f64, stretch: f64) -> Result<Scaling> {
        if !(scale > 0.0 && scale.is_finite() && stretch > 0.0 && stretch.is_finite()) {
            return Err(Error::InvalidLaw {
                law: "scaled",
                reason: format!("scale factors must be positive, got ({scale}, {stretch})"),
            });
        }
        Ok(Scaling {
            scale: self.scale * scale,
            stretch: self.stretch * stretch,
        })
    }
}

/// The geometric validation grid on `[1e-8, 10]`.
pub fn validation_grid() -> Vec<f64> {
    geometric_grid(1e-8, 10.0, VALIDATION_POINTS)
}

pub(crate) fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo * (ratio * i as f64).exp()
            }
        })
        .collect()
}

/// Checks an analytic derivative against a central finite difference with
/// step `1e-6 * max(1, x)`. Points below `1e-3` are skipped: the cusp law has
/// unbounded curvature there and the difference quotient is meaningless.
pub(crate) fn check_derivative<L: ScalarLaw>(law: &L, name: &'static str) -> Result<()> {
    for &x in validation_grid().iter().filter(|&&x| x >= 1e-3) {
        let h = 1e-6 * x.max(1.0);
        let fd = (law.value(x + h) - law.value(x - h)) / (2.0 * h);
        let d = law.deriv(x);
        if (fd - d).abs() > 1e-5 * d.abs().max(1.0) {
            return Err(Error::InvalidLaw {
                law: name,
                reason: format!("derivative mismatch at {x}: analytic {d}, finite difference {fd}"),
            });
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BulkConfig {
    Power { p: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CohesiveConfig {
    Exp,
    Parabola { c: f64 },
    Cusp,
}

/// `{"bulk": {...}, "cohesive": {...}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawsConfig {
    pub bulk: BulkConfig,
    pub cohesive: CohesiveConfig,
}

impl LawsConfig {
    pub fn build(&self) -> Result<(BulkLaw, CohesiveLaw)> {
        let bulk = match self.bulk {
            BulkConfig::Power { p } => BulkLaw::new(BulkKind::Power { p })?,
        };
        let cohesive = match self.cohesive {
            CohesiveConfig::Exp => CohesiveLaw::new(CohesiveKind::Exp)?,
            CohesiveConfig::Parabola { c } => CohesiveLaw::new(CohesiveKind::Parabola { c })?,
            CohesiveConfig::Cusp => CohesiveLaw::new(CohesiveKind::Cusp)?,
        };
        Ok((bulk, cohesive))
    }
}
