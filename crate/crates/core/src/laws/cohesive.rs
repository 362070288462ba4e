use serde::{Deserialize, Serialize};

use super::{
    check_derivative, geometric_grid, validation_grid, ScalarLaw, Scaling, TAU_INF, TAU_NEG,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CohesiveKind {
    /// `1 - exp(-t)`.
    Exp,
    /// `t - c t^2`, constant `1/(4c)` beyond `t = 1/(2c)`.
    Parabola { c: f64 },
    /// `t - t^{3/2}`, constant `4/27` beyond `t = 4/9`.
    Cusp,
    /// `t`. Concave but flat curvature, so it is always rejected; kept to
    /// exercise the curvature check.
    Linear,
}

impl CohesiveKind {
    fn base_value(self, t: f64) -> f64 {
        match self {
            CohesiveKind::Exp => -(-t).exp_m1(),
            CohesiveKind::Parabola { c } => {
                let cap = 0.5 / c;
                if t <= cap {
                    t - c * t * t
                } else {
                    0.25 / c
                }
            }
            CohesiveKind::Cusp => {
                if t <= 4.0 / 9.0 {
                    t - t * t.sqrt()
                } else {
                    4.0 / 27.0
                }
            }
            CohesiveKind::Linear => t,
        }
    }

    fn base_deriv(self, t: f64) -> f64 {
        match self {
            CohesiveKind::Exp => (-t).exp(),
            CohesiveKind::Parabola { c } => (1.0 - 2.0 * c * t).max(0.0),
            CohesiveKind::Cusp => (1.0 - 1.5 * t.sqrt()).max(0.0),
            CohesiveKind::Linear => 1.0,
        }
    }
}

/// Behaviour of `q(t) = (G'(0) t - G(t)) / t^2` as `t -> 0+`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CurvatureClass {
    /// `q` tends to a finite positive limit and
    /// `G'(0) t - c2 t^2 < G(t) < G'(0) t - c1 t^2` on `(0, t_valid]`.
    FiniteNegative {
        limit: f64,
        c1: f64,
        c2: f64,
        t_valid: f64,
    },
    /// `q` grows without bound.
    Infinite,
}

impl CurvatureClass {
    pub fn is_infinite(&self) -> bool {
        matches!(self, CurvatureClass::Infinite)
    }

    pub fn constants(&self) -> Option<(f64, f64)> {
        match *self {
            CurvatureClass::FiniteNegative { c1, c2, .. } => Some((c1, c2)),
            CurvatureClass::Infinite => None,
        }
    }
}

/// Half-width of the band `limit * (1 -/+ BAND)` used for `c1`, `c2`.
const BAND: f64 = 0.2;
const MARGIN: f64 = 1e-9;

fn deficit<L: ScalarLaw>(g: &L, slope0: f64, t: f64) -> f64 {
    (slope0 * t - g.value(t)) / (t * t)
}

/// Classifies the curvature of `G` at `0+`.
///
/// The ratio is sampled on `t_k = 2^-k`, `k = 4..=26`. A finite limit is
/// estimated by Richardson extrapolation at `2^-13`; `c1`, `c2` bracket it by
/// ±20% and `t_valid` shrinks geometrically from 1 until both strict
/// inequalities hold with margin `1e-9` on a dense sample of `(0, t_valid]`.
pub fn curvature_class<L: ScalarLaw>(g: &L) -> Result<CurvatureClass> {
    let s = g.deriv(0.0);
    let seq: Vec<f64> = (4..=26).map(|k| deficit(g, s, 0.5f64.powi(k))).collect();
    let last = *seq.last().unwrap();
    if seq.iter().any(|&q| !(q >= TAU_NEG)) {
        let worst = seq.iter().cloned().fold(f64::INFINITY, f64::min);
        return Err(Error::CurvatureViolated { limit: -worst });
    }
    if last > 1.0 / TAU_INF {
        return Ok(CurvatureClass::Infinite);
    }
    let limit = 2.0 * deficit(g, s, 0.5f64.powi(14)) - deficit(g, s, 0.5f64.powi(13));
    if (last - limit).abs() > 1e-3 * limit.max(1.0) {
        return Err(Error::InvalidLaw {
            law: "cohesive",
            reason: format!(
                "curvature ratio does not settle (last sample {last}, extrapolated {limit})"
            ),
        });
    }
    let (c1, c2) = (limit * (1.0 - BAND), limit * (1.0 + BAND));
    let mut t_valid = 1.0;
    for _ in 0..400 {
        let holds = dense_samples(t_valid).into_iter().all(|t| {
            let q = deficit(g, s, t);
            q - c1 > MARGIN && c2 - q > MARGIN
        });
        if holds {
            return Ok(CurvatureClass::FiniteNegative {
                limit,
                c1,
                c2,
                t_valid,
            });
        }
        t_valid *= 0.9;
    }
    Err(Error::InvalidLaw {
        law: "cohesive",
        reason: "no validity radius found for the quadratic bracket".into(),
    })
}

fn dense_samples(t_max: f64) -> Vec<f64> {
    let mut ts = geometric_grid(t_max * 1e-6, t_max, 256);
    ts.extend((1..=256).map(|i| t_max * i as f64 / 256.0));
    ts
}

/// Concave cohesive density `G` of the jump amplitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CohesiveLaw {
    kind: CohesiveKind,
    scaling: Scaling,
    slope0: f64,
    class: CurvatureClass,
}

#[derive(Clone, Copy)]
struct Shape {
    kind: CohesiveKind,
    scaling: Scaling,
}

impl ScalarLaw for Shape {
    fn value(&self, t: f64) -> f64 {
        self.scaling.scale * self.kind.base_value(self.scaling.stretch * t)
    }

    fn deriv(&self, t: f64) -> f64 {
        self.scaling.scale * self.scaling.stretch * self.kind.base_deriv(self.scaling.stretch * t)
    }
}

impl CohesiveLaw {
    pub fn new(kind: CohesiveKind) -> Result<Self> {
        Self::with_scaling(kind, Scaling::default())
    }

    pub fn with_scaling(kind: CohesiveKind, scaling: Scaling) -> Result<Self> {
        if let CohesiveKind::Parabola { c } = kind {
            if !(c > 0.0 && c.is_finite()) {
                return Err(invalid(format!(
                    "parabola coefficient must be positive, got {c}"
                )));
            }
        }
        let shape = Shape { kind, scaling };
        let slope0 = shape.deriv(0.0);
        if shape.value(0.0).abs() > 1e-15 || !(slope0 > 0.0) {
            return Err(invalid("need G(0) = 0 and G'(0) > 0".into()));
        }
        let mut prev = (0.0, slope0);
        for &t in &validation_grid() {
            let (v, d) = (shape.value(t), shape.deriv(t));
            if v < 0.0 || v < prev.0 - 1e-15 * slope0 {
                return Err(invalid(format!("G negative or decreasing near t = {t}")));
            }
            if d > prev.1 + 1e-12 * slope0 {
                return Err(invalid(format!("G' increasing near t = {t} (not concave)")));
            }
            prev = (v, d);
        }
        check_derivative(&shape, "cohesive")?;
        let class = curvature_class(&shape)?;
        Ok(CohesiveLaw {
            kind,
            scaling,
            slope0,
            class,
        })
    }

    /// `t -> value_factor * G(arg_factor * t)`.
    pub fn rescaled(&self, value_factor: f64, arg_factor: f64) -> Result<Self> {
        Self::with_scaling(self.kind, self.scaling.compose(value_factor, arg_factor)?)
    }

    pub fn kind(&self) -> CohesiveKind {
        self.kind
    }

    pub fn scaling(&self) -> Scaling {
        self.scaling
    }

    /// `G'(0)`, the ultimate stress.
    pub fn slope0(&self) -> f64 {
        self.slope0
    }

    pub fn class(&self) -> CurvatureClass {
        self.class
    }

    pub fn label(&self) -> String {
        match self.kind {
            CohesiveKind::Exp => "exp".into(),
            CohesiveKind::Parabola { c } => format!("parabola(c={c})"),
            CohesiveKind::Cusp => "cusp".into(),
            CohesiveKind::Linear => "linear".into(),
        }
    }

    /// `G(t)`; negative amplitudes are a domain error.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::domain("eval_cohesive", "t", t));
        }
        Ok(self.value(t))
    }

    /// `(G'(0) t - G(t)) / t^2`.
    pub fn quadratic_deficit(&self, t: f64) -> f64 {
        deficit(self, self.slope0, t)
    }

    /// Smallest sampled [`Self::quadratic_deficit`] on `(0, t_max]`: a
    /// constant `c` with `G(t) <= G'(0) t - c t^2` there.
    pub fn deficit_lower_bound(&self, t_max: f64) -> f64 {
        dense_samples(t_max)
            .into_iter()
            .map(|t| self.quadratic_deficit(t))
            .fold(f64::INFINITY, f64::min)
    }
}

impl ScalarLaw for CohesiveLaw {
    fn value(&self, t: f64) -> f64 {
        Shape {
            kind: self.kind,
            scaling: self.scaling,
        }
        .value(t)
    }

    fn deriv(&self, t: f64) -> f64 {
        Shape {
            kind: self.kind,
            scaling: self.scaling,
        }
        .deriv(t)
    }
}

fn invalid(reason: String) -> Error {
    Error::InvalidLaw {
        law: "cohesive",
        reason,
    }
}
