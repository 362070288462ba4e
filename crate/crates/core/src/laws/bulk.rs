use serde::{Deserialize, Serialize};

use super::{check_derivative, geometric_grid, validation_grid, ScalarLaw, Scaling, TAU_CONV};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BulkKind {
    /// `xi^p / p`, `p > 1`.
    Power { p: f64 },
}

impl BulkKind {
    fn base_value(self, xi: f64) -> f64 {
        match self {
            BulkKind::Power { p } => xi.powf(p) / p,
        }
    }

    fn base_deriv(self, xi: f64) -> f64 {
        match self {
            BulkKind::Power { p } => xi.powf(p - 1.0),
        }
    }
}

/// Convex bulk energy density `F` of the strain magnitude.
///
/// Construction checks `F(0) = F'(0) = 0`, strict monotonicity of `F'` on the
/// validation grid, a superlinearity proxy and the analytic derivative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BulkLaw {
    kind: BulkKind,
    scaling: Scaling,
}

impl BulkLaw {
    pub fn new(kind: BulkKind) -> Result<Self> {
        Self::with_scaling(kind, Scaling::default())
    }

    pub fn with_scaling(kind: BulkKind, scaling: Scaling) -> Result<Self> {
        let BulkKind::Power { p } = kind;
        if !(p > 1.0 && p.is_finite()) {
            return Err(invalid(format!("power exponent must exceed 1, got {p}")));
        }
        let law = BulkLaw { kind, scaling };
        law.validate()?;
        Ok(law)
    }

    /// `xi -> value_factor * F(arg_factor * xi)`.
    pub fn rescaled(&self, value_factor: f64, arg_factor: f64) -> Result<Self> {
        Self::with_scaling(self.kind, self.scaling.compose(value_factor, arg_factor)?)
    }

    pub fn kind(&self) -> BulkKind {
        self.kind
    }

    pub fn scaling(&self) -> Scaling {
        self.scaling
    }

    pub fn label(&self) -> String {
        match self.kind {
            BulkKind::Power { p } => format!("power(p={p})"),
        }
    }

    /// `F(xi)`; negative strains are a domain error.
    pub fn eval(&self, xi: f64) -> Result<f64> {
        if !(xi >= 0.0) {
            return Err(Error::domain("eval_bulk", "xi", xi));
        }
        Ok(self.value(xi))
    }

    fn validate(&self) -> Result<()> {
        if self.value(0.0).abs() > 1e-14 || self.deriv(0.0).abs() > 1e-14 {
            return Err(invalid("F(0) and F'(0) must vanish".into()));
        }
        let grid = validation_grid();
        let mut prev = (0.0, 0.0);
        for &xi in &grid {
            let (f, d) = (self.value(xi), self.deriv(xi));
            // relative form: the absolute increment of xi^2 near 1e-8 is ~1e-17
            if !(d - prev.1 > TAU_CONV * d.abs()) || !(f > prev.0) {
                return Err(invalid(format!(
                    "not strictly convex and increasing near xi = {xi}"
                )));
            }
            prev = (f, d);
        }
        let coarse = geometric_grid(1.0, 1e6, 7);
        let ratios: Vec<f64> = coarse.iter().map(|&x| self.value(x) / x).collect();
        let grows = ratios.windows(2).all(|w| w[1] > w[0]);
        if !grows || ratios[6] < 1e2 * ratios[0] {
            return Err(invalid("F(xi)/xi does not grow without bound".into()));
        }
        check_derivative(self, "bulk")
    }
}

impl ScalarLaw for BulkLaw {
    fn value(&self, xi: f64) -> f64 {
        self.scaling.scale * self.kind.base_value(self.scaling.stretch * xi)
    }

    fn deriv(&self, xi: f64) -> f64 {
        self.scaling.scale * self.scaling.stretch * self.kind.base_deriv(self.scaling.stretch * xi)
    }
}

fn invalid(reason: String) -> Error {
    Error::InvalidLaw {
        law: "bulk",
        reason,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> BulkLaw {
        BulkLaw::new(BulkKind::Power { p: 2.0 }).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(quad().eval(0.0).unwrap(), 0.0);
        assert_eq!(quad().eval(2.0).unwrap(), 2.0);
        let cubic = BulkLaw::new(BulkKind::Power { p: 3.0 }).unwrap();
        assert!((cubic.eval(1.5).unwrap() - 1.125).abs() < 1e-15);
    }

    #[test]
    fn cubic_value_matches_integrated_derivative() {
        // composite Simpson on F' = xi^2 over [0, 1.5]
        let cubic = BulkLaw::new(BulkKind::Power { p: 3.0 }).unwrap();
        let n = 1000;
        let h = 1.5 / n as f64;
        let mut s = cubic.deriv(0.0) + cubic.deriv(1.5);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * cubic.deriv(i as f64 * h);
        }
        assert!((s * h / 3.0 - 1.125).abs() < 1e-12);
    }

    #[test]
    fn negative_strain_is_domain_error() {
        assert!(matches!(quad().eval(-1e-3), Err(Error::Domain { .. })));
        assert!(quad().eval(f64::NAN).is_err());
    }

    #[test]
    fn rejects_linear_growth() {
        assert!(BulkLaw::new(BulkKind::Power { p: 1.0 }).is_err());
        assert!(BulkLaw::new(BulkKind::Power { p: 0.5 }).is_err());
    }

    #[test]
    fn rescaling_composes() {
        let f = quad().rescaled(0.25, 2.0).unwrap();
        // 0.25 * (2 xi)^2 / 2
        assert!((f.value(3.0) - 4.5).abs() < 1e-14);
        assert!((f.deriv(3.0) - 3.0).abs() < 1e-14);
    }
}
