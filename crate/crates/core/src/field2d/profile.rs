use serde::Serialize;

use super::{norm, Point};
use crate::error::{Error, Result};

/// Value and one-sided slopes of the taper profile at a radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileValue {
    pub value: f64,
    /// Right derivative (the derivative wherever the profile is smooth).
    pub slope: f64,
    /// Left derivative; differs from `slope` only at `rho = r`.
    pub slope_left: f64,
}

fn check_radii(r: f64, big_r: f64) -> Result<()> {
    if !(r >= 0.0 && r < big_r && big_r.is_finite()) {
        return Err(Error::Precondition(format!(
            "radii must satisfy 0 <= r < R, got r = {r}, R = {big_r}"
        )));
    }
    Ok(())
}

/// Profile value and slope without range checks; zero beyond `R`.
pub(crate) fn phi_unchecked(r: f64, big_r: f64, rho: f64) -> (f64, f64) {
    if rho <= r {
        (1.0, 0.0)
    } else if rho >= big_r {
        (0.0, 0.0)
    } else {
        let w = r - big_r;
        let d = rho - big_r;
        (d * d / (w * w), 2.0 * d / (w * w))
    }
}

/// The taper `phi = 1` on `[0, r]`, `(rho - R)^2 / (r - R)^2` on `[r, R]`.
pub fn profile_phi(r: f64, big_r: f64, rho: f64) -> Result<ProfileValue> {
    check_radii(r, big_r)?;
    if !(0.0..=big_r).contains(&rho) {
        return Err(Error::domain("profile_phi", "radius", rho));
    }
    let (value, slope) = phi_unchecked(r, big_r, rho);
    if rho == r {
        let w = r - big_r;
        return Ok(ProfileValue {
            value,
            slope: 2.0 * (r - big_r) / (w * w),
            slope_left: 0.0,
        });
    }
    Ok(ProfileValue {
        value,
        slope,
        slope_left: slope,
    })
}

/// `phi'^2 phi - k phi^2` with `k = 4 (R - r)^-2`; zero on `(r, R)`.
pub fn profile_ode_residual(r: f64, big_r: f64, rho: f64) -> f64 {
    let (phi, dphi) = phi_unchecked(r, big_r, rho);
    let k = 4.0 / ((big_r - r) * (big_r - r));
    dphi * dphi * phi - k * phi * phi
}

/// Radial bump without range checks; zero beyond `R`.
pub(crate) fn bump_unchecked(r: f64, big_r: f64, x: Point) -> (f64, Point) {
    let rho = norm(x);
    let (a, da) = phi_unchecked(r, big_r, rho);
    if da == 0.0 || rho == 0.0 {
        (a, [0.0, 0.0])
    } else {
        (a, [da * x[0] / rho, da * x[1] / rho])
    }
}

/// `a(x) = phi(|x|)` and its gradient.
pub fn radial_bump(r: f64, big_r: f64, x: Point) -> Result<(f64, Point)> {
    check_radii(r, big_r)?;
    let rho = norm(x);
    if !(rho <= big_r) {
        return Err(Error::domain("radial_bump", "|x|", rho));
    }
    Ok(bump_unchecked(r, big_r, x))
}

/// Lebesgue measure of the unit ball in `R^m`.
pub fn unit_ball_measure(m: u32) -> f64 {
    let (mut even, mut odd) = (1.0, 2.0);
    if m == 0 {
        return even;
    }
    for j in 2..=m {
        let next = (if j % 2 == 0 { even } else { odd }) * 2.0 * std::f64::consts::PI / j as f64;
        if j % 2 == 0 {
            even = next;
        } else {
            odd = next;
        }
    }
    if m.is_multiple_of(2) {
        even
    } else {
        odd
    }
}

/// Geometric constants entering the competitor bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProofConstants {
    pub lambda: f64,
    pub eps: f64,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub delta: f64,
    /// Largest lateral-boundary length per unit level over the scanned levels.
    pub slab: f64,
    /// Largest boundary length of the scanned level sets.
    pub area_bound: f64,
    /// Measure of the unit ball in dimension `n - 1`.
    pub omega: f64,
    pub k_eps_big_r: f64,
    pub k_eps_r_big_r: f64,
    pub k: f64,
}

impl ProofConstants {
    /// Closed-form constants in the plane; `slab` and `area_bound` start at 0
    /// and are filled in from measurements.
    pub fn new(lambda: f64, eps: f64, r: f64, big_r: f64, delta: f64) -> Result<Self> {
        Self::in_dimension(2, lambda, eps, r, big_r, delta)
    }

    pub fn in_dimension(
        n: u32,
        lambda: f64,
        eps: f64,
        r: f64,
        big_r: f64,
        delta: f64,
    ) -> Result<Self> {
        check_radii(r, big_r)?;
        if n < 1 {
            return Err(Error::Precondition("dimension must be at least 1".into()));
        }
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::Precondition(format!(
                "oscillation radius must lie in (0, 1/2), got {eps}"
            )));
        }
        let omega = unit_ball_measure(n - 1);
        let m = (n - 1) as f64;
        let gap = big_r - r;
        let spread = lambda - eps;
        Ok(ProofConstants {
            lambda,
            eps,
            r,
            big_r,
            delta,
            slab: 0.0,
            area_bound: 0.0,
            omega,
            k_eps_big_r: omega * big_r.powf(m) * (1.0 - eps * eps).powf(m / 2.0),
            k_eps_r_big_r: 2.0 / (gap * gap * spread * spread),
            k: 4.0 / (gap * gap),
        })
    }
}
