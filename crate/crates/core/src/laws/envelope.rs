use super::{BulkLaw, CohesiveLaw, ScalarLaw, TAU_ROOT};
use crate::error::{Error, Result};

const XI_CAP: f64 = 1e12;

/// The unique strain `e_M` with `F'(e_M) = G'(0)`.
///
/// The bracket `[0, hi]` grows geometrically from 1 until `F'(hi)` exceeds
/// the target, then bisection runs down to adjacent floats.
pub fn solve_yield_strain(bulk: &BulkLaw, cohesive: &CohesiveLaw) -> Result<f64> {
    let target = cohesive.slope0();
    let mut hi = 1.0;
    while bulk.deriv(hi) <= target {
        hi *= 2.0;
        if hi > XI_CAP {
            return Err(Error::SuperlinearityViolated {
                target,
                cap: XI_CAP,
            });
        }
    }
    let mut lo = 0.0;
    while hi - lo > f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if bulk.deriv(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let best = [lo, hi, 0.5 * (lo + hi)]
        .into_iter()
        .min_by(|a, b| {
            let ra = (bulk.deriv(*a) - target).abs();
            let rb = (bulk.deriv(*b) - target).abs();
            ra.total_cmp(&rb)
        })
        .unwrap();
    let residual = (bulk.deriv(best) - target).abs();
    if residual > TAU_ROOT * target.max(1.0) {
        return Err(Error::Precondition(format!(
            "yield strain residual {residual} exceeds tolerance"
        )));
    }
    Ok(best)
}

/// `F` below the yield strain, its tangent line of slope `G'(0)` above.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvelopeLaw {
    base: BulkLaw,
    yield_strain: f64,
    slope: f64,
    knee_value: f64,
}

impl EnvelopeLaw {
    pub fn base(&self) -> &BulkLaw {
        &self.base
    }

    /// `e_M`.
    pub fn yield_strain(&self) -> f64 {
        self.yield_strain
    }

    /// `F'(e_M)`, equal to `G'(0)` up to the root tolerance.
    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn eval(&self, xi: f64) -> Result<f64> {
        if !(xi >= 0.0) {
            return Err(Error::domain("envelope", "xi", xi));
        }
        Ok(self.value(xi))
    }
}

impl ScalarLaw for EnvelopeLaw {
    fn value(&self, xi: f64) -> f64 {
        if xi <= self.yield_strain {
            self.base.value(xi)
        } else {
            self.knee_value + self.slope * (xi - self.yield_strain)
        }
    }

    fn deriv(&self, xi: f64) -> f64 {
        if xi <= self.yield_strain {
            self.base.deriv(xi)
        } else {
            self.slope
        }
    }
}

pub fn build_envelope(bulk: &BulkLaw, cohesive: &CohesiveLaw) -> Result<EnvelopeLaw> {
    let e = solve_yield_strain(bulk, cohesive)?;
    Ok(EnvelopeLaw {
        base: *bulk,
        yield_strain: e,
        slope: bulk.deriv(e),
        knee_value: bulk.value(e),
    })
}

/// Rescales the pair so that `e_M = F'(e_M) = G'(0) = 1`:
/// `F~(xi) = F(e_M xi) / (G'(0) e_M)` and `G~(t) = G(e_M t) / (G'(0) e_M)`.
pub fn normalize(bulk: &BulkLaw, cohesive: &CohesiveLaw) -> Result<(BulkLaw, CohesiveLaw)> {
    let e = solve_yield_strain(bulk, cohesive)?;
    let s = cohesive.slope0();
    let factor = 1.0 / (s * e);
    Ok((bulk.rescaled(factor, e)?, cohesive.rescaled(factor, e)?))
}
