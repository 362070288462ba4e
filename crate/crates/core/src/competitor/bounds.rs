use crate::error::{Error, Result};
use crate::field2d::ProofConstants;
use crate::laws::CohesiveLaw;

/// Gap upper bound for a rectangle of half-width `s` and height `delta`
/// above an affine field of slope `lambda`.
pub fn closed_form_gap_rect(s: f64, delta: f64, alpha: f64, lambda: f64, c2: f64) -> f64 {
    let q = (1.0 - alpha) * (1.0 - alpha) * lambda * lambda;
    -(1.0 - alpha) * lambda * delta * delta / 2.0
        + c2 * q * delta.powi(3) / 3.0
        + c2 * s * q * delta * delta
}

/// Half-width below which the rectangle bound is negative for small heights.
pub fn rect_threshold(alpha: f64, lambda: f64, c2: f64) -> f64 {
    1.0 / (2.0 * (1.0 - alpha) * lambda * c2)
}

/// Gap lower bound for the tapered profile region of height `sigma`.
pub fn closed_form_gap_profile(
    r: f64,
    big_r: f64,
    sigma: f64,
    alpha: f64,
    lambda: f64,
    c1: f64,
) -> Result<f64> {
    let op = "closed_form_gap_profile";
    if !(r < big_r) {
        return Err(Error::domain(op, "R - r", big_r - r));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(op, "alpha", alpha));
    }
    if !(lambda > 1.0 && alpha * lambda > 1.0) {
        return Err(Error::domain(op, "alpha * lambda", alpha * lambda));
    }
    if !(sigma >= 0.0) {
        return Err(Error::domain(op, "sigma", sigma));
    }
    let width = big_r - r;
    let t = (1.0 - alpha) * lambda;
    Ok(t * (2.0 * c1 * t * sigma * sigma - 4.0 * sigma.powi(3) / (width * width)) * width / 5.0)
}

/// Height at which the profile bound changes sign.
pub fn profile_threshold(r: f64, big_r: f64, alpha: f64, lambda: f64, c1: f64) -> f64 {
    c1 * (1.0 - alpha) * lambda * (big_r - r).powi(2) / 2.0
}

/// Sublevel-region bound `(1 - alpha) sigma^2 [c (1 - alpha) K - 2 L]`, with
/// `c` the smallest quadratic deficit of `G` on `(0, (1 - alpha) sigma]`.
pub fn case1_bound(sigma: f64, alpha: f64, g: &CohesiveLaw, constants: &ProofConstants) -> f64 {
    let c = g.deficit_lower_bound((1.0 - alpha) * sigma);
    (1.0 - alpha)
        * sigma
        * sigma
        * (c * (1.0 - alpha) * constants.k_eps_big_r - 2.0 * constants.slab)
}

/// Leading terms `sigma^2 (1 - alpha) [c1 (1 - alpha) - K sigma] int a^2` of
/// the radial-bump gap.
pub fn case3_leading_bound(sigma: f64, alpha: f64, c1: f64, k: f64, a2_integral: f64) -> f64 {
    sigma * sigma * (1.0 - alpha) * (c1 * (1.0 - alpha) - k * sigma) * a2_integral
}
