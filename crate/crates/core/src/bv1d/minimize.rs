//! Reduced minimizer of the relaxed 1D energy under `u(0) = 0`, `u(l) = t`.
//!
//! By Jensen's inequality a uniform strain `e` is optimal for the convex
//! envelope, and subadditivity of `G` (concave, `G(0) = 0`) makes a single
//! jump optimal, so the problem reduces to
//!
//! ```text
//! min  l Fbar(e) + G(s) + G'(0) c   over   e, s, c >= 0,  l e + s + c = t.
//! ```
//!
//! For fixed `e` the split of the remainder `r = t - l e` between `s` and `c`
//! is a concave function of `c`, so only `c = 0` and `c = r` are compared.
//! The Cantor coordinate is kept so that `c* = 0` is an observed outcome.

use super::DisplacementField1D;
use crate::error::{Error, Result};
use crate::laws::{build_envelope, BulkLaw, CohesiveLaw, EnvelopeLaw, ScalarLaw};
use crate::parallel::{map_slice, Execution};

/// Cell count of the reconstructed field; odd so `l/2` is a cell midpoint.
pub const RECONSTRUCTION_CELLS: usize = 101;

const SCAN_POINTS: usize = 4096;
const STRAIN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Minimizer1D {
    pub load: f64,
    pub strain: f64,
    pub jump: f64,
    pub cantor: f64,
    pub energy: f64,
    pub yield_strain: f64,
    pub field: DisplacementField1D,
}

struct Reduced<'a> {
    env: &'a EnvelopeLaw,
    g: &'a CohesiveLaw,
    length: f64,
    load: f64,
}

impl Reduced<'_> {
    /// `(energy, jump, cantor)` at strain `e`.
    fn eval(&self, e: f64) -> (f64, f64, f64) {
        let rest = (self.load - self.length * e).max(0.0);
        let bulk = self.length * self.env.value(e);
        let as_jump = self.g.value(rest);
        let as_cantor = self.g.slope0() * rest;
        if as_jump <= as_cantor {
            (bulk + as_jump, rest, 0.0)
        } else {
            (bulk + as_cantor, 0.0, rest)
        }
    }

    fn energy(&self, e: f64) -> f64 {
        self.eval(e).0
    }

    /// Stationarity residual `Fbar'(e) - G'(t - l e)`.
    fn residual(&self, e: f64) -> f64 {
        self.env.deriv(e) - self.g.deriv((self.load - self.length * e).max(0.0))
    }
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

fn bisect_residual(problem: &Reduced, mut a: f64, mut b: f64) -> Option<f64> {
    let (ra, rb) = (problem.residual(a), problem.residual(b));
    if !(ra < 0.0 && rb > 0.0) {
        return None;
    }
    while b - a > STRAIN_TOL * 1e-3 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if problem.residual(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Some(0.5 * (a + b))
}

/// Minimizes the reduced relaxed energy for load `t >= 0` on `(0, l)`.
///
/// A 4096-point scan brackets the global minimum, golden-section search
/// narrows it to `1e-10`, bisection on the stationarity residual polishes an
/// interior stationary point, and both endpoints are compared last.
pub fn minimize_relaxed_1d(
    bulk: &BulkLaw,
    g: &CohesiveLaw,
    length: f64,
    load: f64,
) -> Result<Minimizer1D> {
    let env = build_envelope(bulk, g)?;
    minimize_with_envelope(&env, g, length, load)
}

pub(crate) fn minimize_with_envelope(
    env: &EnvelopeLaw,
    g: &CohesiveLaw,
    length: f64,
    load: f64,
) -> Result<Minimizer1D> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::domain("minimize_relaxed_1d", "l", length));
    }
    if !(load >= 0.0 && load.is_finite()) {
        // callers reduce negative loads by the symmetry u -> -u
        return Err(Error::domain("minimize_relaxed_1d", "t", load));
    }
    let problem = Reduced {
        env,
        g,
        length,
        load,
    };
    let e_max = load / length;
    let mut candidates = vec![0.0, e_max];
    if e_max > 0.0 {
        let step = e_max / SCAN_POINTS as f64;
        let best = (0..=SCAN_POINTS)
            .map(|i| (i, problem.energy(i as f64 * step)))
            .fold(
                (0, f64::INFINITY),
                |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
            );
        let lo = best.0.saturating_sub(1) as f64 * step;
        let hi = ((best.0 + 1).min(SCAN_POINTS)) as f64 * step;
        let golden = golden_section(|e| problem.energy(e), lo, hi, STRAIN_TOL);
        candidates.push(golden);
        if let Some(root) = bisect_residual(&problem, lo, hi) {
            candidates.push(root);
        }
    }
    let (strain, energy) = candidates.into_iter().map(|e| (e, problem.energy(e))).fold(
        (0.0, f64::INFINITY),
        |acc, c| if c.1 < acc.1 { c } else { acc },
    );
    let (_, jump, cantor) = problem.eval(strain);
    Ok(Minimizer1D {
        load,
        strain,
        jump,
        cantor,
        energy,
        yield_strain: env.yield_strain(),
        field: reconstruct(length, strain, jump, cantor)?,
    })
}

/// Uniform strain plus one jump at `l/2`. The declared Cantor mass is not in
/// the node values, so `u(l) + c = t`.
fn reconstruct(length: f64, strain: f64, jump: f64, cantor: f64) -> Result<DisplacementField1D> {
    let n = RECONSTRUCTION_CELLS;
    let h = length / n as f64;
    let ac: Vec<f64> = (0..=n).map(|i| strain * i as f64 * h).collect();
    let jumps: Vec<(f64, f64)> = if jump > 0.0 {
        vec![(0.5 * length, jump)]
    } else {
        vec![]
    };
    DisplacementField1D::from_parts(length, ac, &jumps, cantor)
}

/// Runs [`minimize_relaxed_1d`] over a list of loads, in order.
pub fn sweep_relaxed_1d(
    bulk: &BulkLaw,
    g: &CohesiveLaw,
    length: f64,
    loads: &[f64],
    exec: Execution,
) -> Result<Vec<Minimizer1D>> {
    let env = build_envelope(bulk, g)?;
    map_slice(exec, loads, |&t| minimize_with_envelope(&env, g, length, t))
        .into_iter()
        .collect()
}
