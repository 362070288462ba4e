use serde::Serialize;

use super::DisplacementField1D;
use crate::error::{Error, Result};
use crate::laws::{BulkLaw, CohesiveLaw, EnvelopeLaw, ScalarLaw};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub bulk: f64,
    pub jump: f64,
    pub cantor: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    fn new(bulk: f64, jump: f64, cantor: f64) -> Self {
        EnergyBreakdown {
            bulk,
            jump,
            cantor,
            total: bulk + jump + cantor,
        }
    }
}

fn bulk_term<L: ScalarLaw>(u: &DisplacementField1D, density: &L) -> f64 {
    let h = u.cell_width();
    u.slopes().iter().map(|s| density.value(s.abs()) * h).sum()
}

fn jump_term(u: &DisplacementField1D, g: &CohesiveLaw) -> f64 {
    u.jumps().iter().map(|j| g.value(j.amplitude.abs())).sum()
}

/// `int F(|u'|) + sum G(|[u]|)`, defined on SBV candidates only.
pub fn energy_sharp_1d(
    u: &DisplacementField1D,
    bulk: &BulkLaw,
    g: &CohesiveLaw,
) -> Result<EnergyBreakdown> {
    if u.cantor_mass() > 0.0 {
        return Err(Error::SharpUndefined(u.cantor_mass()));
    }
    Ok(EnergyBreakdown::new(
        bulk_term(u, bulk),
        jump_term(u, g),
        0.0,
    ))
}

/// `int Fbar(|u'|) + sum G(|[u]|) + G'(0) |u'_c|`.
pub fn energy_relaxed_1d(
    u: &DisplacementField1D,
    envelope: &EnvelopeLaw,
    g: &CohesiveLaw,
) -> EnergyBreakdown {
    EnergyBreakdown::new(
        bulk_term(u, envelope),
        jump_term(u, g),
        g.slope0() * u.cantor_mass(),
    )
}

/// `int |u| + |Du|(0, l)`.
pub fn bv_norm_1d(u: &DisplacementField1D) -> f64 {
    u.l1_norm() + u.total_variation()
}
