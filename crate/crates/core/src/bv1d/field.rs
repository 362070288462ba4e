use crate::error::{Error, Result};

/// A jump located at the midpoint of grid cell `cell`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jump {
    pub cell: usize,
    pub amplitude: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisplacementField1D {
    length: f64,
    values: Vec<f64>,
    jumps: Vec<Jump>,
    cantor_mass: f64,
}

impl DisplacementField1D {
    /// Builds a field from node values of the full displacement (jumps
    /// included). Jump positions are snapped to the midpoint of the cell that
    /// contains them; a position on an interior node goes to the cell on its
    /// right.
    pub fn new(
        length: f64,
        values: Vec<f64>,
        jumps: &[(f64, f64)],
        cantor_mass: f64,
    ) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidField(format!(
                "length must be positive, got {length}"
            )));
        }
        if values.len() < 2 || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidField(
                "need at least two finite node values".into(),
            ));
        }
        if !(cantor_mass >= 0.0 && cantor_mass.is_finite()) {
            return Err(Error::InvalidField(format!(
                "cantor mass must be >= 0, got {cantor_mass}"
            )));
        }
        let cells = values.len() - 1;
        let h = length / cells as f64;
        let mut snapped = Vec::with_capacity(jumps.len());
        for &(pos, amplitude) in jumps {
            if !(pos > 0.0 && pos < length) {
                return Err(Error::InvalidField(format!(
                    "jump position {pos} outside (0, {length})"
                )));
            }
            if amplitude == 0.0 || !amplitude.is_finite() {
                return Err(Error::InvalidField(format!(
                    "jump amplitude must be nonzero, got {amplitude}"
                )));
            }
            let cell = ((pos / h).floor() as usize).min(cells - 1);
            snapped.push(Jump { cell, amplitude });
        }
        snapped.sort_by_key(|j| j.cell);
        if snapped.windows(2).any(|w| w[0].cell == w[1].cell) {
            return Err(Error::InvalidField(
                "two jumps snapped into the same cell".into(),
            ));
        }
        Ok(DisplacementField1D {
            length,
            values,
            jumps: snapped,
            cantor_mass,
        })
    }

    /// Builds a field from the node values of its absolutely continuous part
    /// plus a jump list; the jump amplitudes are added to every node to the
    /// right of the (snapped) jump.
    pub fn from_parts(
        length: f64,
        ac_values: Vec<f64>,
        jumps: &[(f64, f64)],
        cantor_mass: f64,
    ) -> Result<Self> {
        let mut field = Self::new(length, ac_values, jumps, cantor_mass)?;
        for j in field.jumps.clone() {
            for v in &mut field.values[j.cell + 1..] {
                *v += j.amplitude;
            }
        }
        Ok(field)
    }

    /// `u(x) = slope * x` sampled on `cells` cells.
    pub fn affine(length: f64, cells: usize, slope: f64) -> Result<Self> {
        let h = length / cells as f64;
        Self::new(
            length,
            (0..=cells).map(|i| slope * i as f64 * h).collect(),
            &[],
            0.0,
        )
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    pub fn cell_width(&self) -> f64 {
        self.length / self.cells() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn jump_position(&self, jump: &Jump) -> f64 {
        (jump.cell as f64 + 0.5) * self.cell_width()
    }

    pub fn cantor_mass(&self) -> f64 {
        self.cantor_mass
    }

    fn jump_in(&self, cell: usize) -> f64 {
        self.jumps
            .binary_search_by_key(&cell, |j| j.cell)
            .map(|i| self.jumps[i].amplitude)
            .unwrap_or(0.0)
    }

    /// Absolutely continuous slope on every cell.
    pub fn slopes(&self) -> Vec<f64> {
        let h = self.cell_width();
        self.values
            .windows(2)
            .enumerate()
            .map(|(i, w)| (w[1] - w[0] - self.jump_in(i)) / h)
            .collect()
    }

    /// `|Du|(0, l)`.
    pub fn total_variation(&self) -> f64 {
        let h = self.cell_width();
        let ac: f64 = self.slopes().iter().map(|s| s.abs() * h).sum();
        let jumps: f64 = self.jumps.iter().map(|j| j.amplitude.abs()).sum();
        ac + jumps + self.cantor_mass
    }

    /// `int_0^l |u| dx`, exact for the piecewise-linear representation.
    pub fn l1_norm(&self) -> f64 {
        let h = self.cell_width();
        let slopes = self.slopes();
        let mut total = 0.0;
        for (i, s) in slopes.iter().enumerate() {
            let (a, b) = (self.values[i], self.values[i + 1]);
            let jump = self.jump_in(i);
            if jump == 0.0 {
                total += abs_linear_integral(a, b, h);
            } else {
                let mid = a + s * 0.5 * h;
                total += abs_linear_integral(a, mid, 0.5 * h)
                    + abs_linear_integral(mid + jump, b, 0.5 * h);
            }
        }
        total
    }
}

/// `int |p|` for `p` linear from `a` to `b` over an interval of length `len`.
fn abs_linear_integral(a: f64, b: f64, len: f64) -> f64 {
    if a * b >= 0.0 {
        0.5 * len * (a.abs() + b.abs())
    } else {
        0.5 * len * (a * a + b * b) / (a.abs() + b.abs())
    }
}
