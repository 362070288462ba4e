//! Exhaustive lattice search for the 1D Dirichlet problem.
//!
//! The load `t` is cut into `n` quanta of size `t/n`. Every configuration
//! `l e + s_1 + ... + s_K + c = t` with all parts on the lattice is covered:
//! the jump amplitudes and the Cantor mass are combined by exact min-plus
//! convolution over the lattice, so nothing about jump merging or the
//! Cantor part is assumed.

use crate::error::{Error, Result};
use crate::laws::{build_envelope, BulkLaw, CohesiveLaw, ScalarLaw};
use crate::parallel::{map_indexed, Execution};

pub const MAX_ORACLE_JUMPS: usize = 3;
pub const MAX_ORACLE_RESOLUTION: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub energy: f64,
    pub strain: f64,
    /// Jump amplitudes, zeros included, in decreasing order.
    pub jumps: Vec<f64>,
    pub cantor: f64,
    /// `G'(0) t / n`: distance in energy from any admissible configuration to
    /// the lattice. Both `Fbar` and `G` are `G'(0)`-Lipschitz.
    pub gap_bound: f64,
}

impl OracleResult {
    pub fn active_jumps(&self) -> usize {
        self.jumps.iter().filter(|&&s| s > 0.0).count()
    }
}

/// `out[m] = min_a prev[m - a] + cost[a]`, with the minimizing `a`.
fn min_plus(prev: &[f64], cost: &[f64], exec: Execution) -> (Vec<f64>, Vec<usize>) {
    let pairs = map_indexed(exec, prev.len(), |m| {
        let mut best = (f64::INFINITY, 0);
        for a in 0..=m {
            let v = prev[m - a] + cost[a];
            if v < best.0 {
                best = (v, a);
            }
        }
        best
    });
    pairs.into_iter().unzip()
}

pub fn brute_force_oracle_1d(
    bulk: &BulkLaw,
    g: &CohesiveLaw,
    length: f64,
    load: f64,
    max_jumps: usize,
    resolution: usize,
    exec: Execution,
) -> Result<OracleResult> {
    if max_jumps > MAX_ORACLE_JUMPS || resolution > MAX_ORACLE_RESOLUTION || resolution == 0 {
        return Err(Error::OracleTooLarge(format!(
            "K = {max_jumps} (max {MAX_ORACLE_JUMPS}), n = {resolution} (1..={MAX_ORACLE_RESOLUTION})"
        )));
    }
    if !(length > 0.0) {
        return Err(Error::domain("brute_force_oracle_1d", "l", length));
    }
    if !(load >= 0.0 && load.is_finite()) {
        return Err(Error::domain("brute_force_oracle_1d", "t", load));
    }
    let env = build_envelope(bulk, g)?;
    let n = resolution;
    let quantum = load / n as f64;
    let jump_cost: Vec<f64> = (0..=n).map(|a| g.value(a as f64 * quantum)).collect();
    let cantor_cost: Vec<f64> = (0..=n).map(|a| g.slope0() * a as f64 * quantum).collect();

    let mut layer: Vec<f64> = (0..=n)
        .map(|m| if m == 0 { 0.0 } else { f64::INFINITY })
        .collect();
    let mut choices = Vec::with_capacity(max_jumps + 1);
    for _ in 0..max_jumps {
        let (next, arg) = min_plus(&layer, &jump_cost, exec);
        layer = next;
        choices.push(arg);
    }
    let (with_cantor, cantor_arg) = min_plus(&layer, &cantor_cost, exec);

    let mut best = (f64::INFINITY, 0);
    for i in 0..=n {
        let e = i as f64 * quantum / length;
        let v = length * env.value(e) + with_cantor[n - i];
        if v < best.0 {
            best = (v, i);
        }
    }

    let mut rest = n - best.1;
    let c_quanta = cantor_arg[rest];
    rest -= c_quanta;
    let mut jumps = Vec::with_capacity(max_jumps);
    for arg in choices.iter().rev() {
        let a = arg[rest];
        jumps.push(a as f64 * quantum);
        rest -= a;
    }
    debug_assert_eq!(rest, 0);
    jumps.sort_by(|a, b| b.total_cmp(a));

    Ok(OracleResult {
        energy: best.0,
        strain: best.1 as f64 * quantum / length,
        jumps,
        cantor: c_quanta as f64 * quantum,
        gap_bound: g.slope0() * quantum,
    })
}
