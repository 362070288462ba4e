use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{norm, Point};
use crate::error::{Error, Result};

/// A scalar field on the plane with its gradient.
pub trait ScalarField2D: Sync {
    fn value(&self, p: Point) -> f64;
    fn gradient(&self, p: Point) -> Point;
}

/// A field given by two closures.
pub struct FnField<V, G> {
    value: V,
    gradient: G,
}

impl<V, G> FnField<V, G>
where
    V: Fn(Point) -> f64 + Sync,
    G: Fn(Point) -> Point + Sync,
{
    pub fn new(value: V, gradient: G) -> Self {
        FnField { value, gradient }
    }
}

impl<V, G> ScalarField2D for FnField<V, G>
where
    V: Fn(Point) -> f64 + Sync,
    G: Fn(Point) -> Point + Sync,
{
    fn value(&self, p: Point) -> f64 {
        (self.value)(p)
    }

    fn gradient(&self, p: Point) -> Point {
        (self.gradient)(p)
    }
}

/// Axis-aligned box `[min.0, max.0] x [min.1, max.1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn new(min: Point, max: Point) -> Self {
        BBox { min, max }
    }

    /// `[-half, half]^2`.
    pub fn centered(half: f64) -> Self {
        BBox::new([-half, -half], [half, half])
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.min[0] && p[0] <= self.max[0] && p[1] >= self.min[1] && p[1] <= self.max[1]
    }

    /// `true` when `self` lies in the interior of `outer`.
    pub fn strictly_inside(&self, outer: &BBox) -> bool {
        self.min[0] > outer.min[0]
            && self.min[1] > outer.min[1]
            && self.max[0] < outer.max[0]
            && self.max[1] < outer.max[1]
    }

    pub fn intersect(&self, other: &BBox) -> Option<BBox> {
        let b = BBox::new(
            [self.min[0].max(other.min[0]), self.min[1].max(other.min[1])],
            [self.max[0].min(other.max[0]), self.max[1].min(other.max[1])],
        );
        (b.min[0] <= b.max[0] && b.min[1] <= b.max[1]).then_some(b)
    }
}

/// Node values on a regular grid, row-major with `x` fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridData {
    pub origin: Point,
    pub spacing: Point,
    pub shape: [usize; 2],
    pub values: Vec<f64>,
}

impl GridData {
    pub fn sample<F: Fn(Point) -> f64>(
        origin: Point,
        spacing: Point,
        shape: [usize; 2],
        f: F,
    ) -> Self {
        let mut values = Vec::with_capacity(shape[0] * shape[1]);
        for j in 0..shape[1] {
            for i in 0..shape[0] {
                values.push(f([
                    origin[0] + i as f64 * spacing[0],
                    origin[1] + j as f64 * spacing[1],
                ]));
            }
        }
        GridData {
            origin,
            spacing,
            shape,
            values,
        }
    }

    fn validate(&self) -> Result<()> {
        let [nx, ny] = self.shape;
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidField("grid needs at least 2x2 nodes".into()));
        }
        if self.values.len() != nx * ny {
            return Err(Error::InvalidField(format!(
                "grid has {} values, shape requires {}",
                self.values.len(),
                nx * ny
            )));
        }
        if !(self.spacing[0] > 0.0 && self.spacing[1] > 0.0)
            || self.values.iter().any(|v| !v.is_finite())
        {
            return Err(Error::InvalidField(
                "grid spacing must be positive and values finite".into(),
            ));
        }
        Ok(())
    }

    fn extent(&self) -> BBox {
        BBox::new(
            self.origin,
            [
                self.origin[0] + (self.shape[0] - 1) as f64 * self.spacing[0],
                self.origin[1] + (self.shape[1] - 1) as f64 * self.spacing[1],
            ],
        )
    }

    /// Cell index and local coordinates, clamped to the grid.
    fn locate(&self, p: Point) -> (usize, usize, f64, f64) {
        let fx = ((p[0] - self.origin[0]) / self.spacing[0]).clamp(0.0, (self.shape[0] - 1) as f64);
        let fy = ((p[1] - self.origin[1]) / self.spacing[1]).clamp(0.0, (self.shape[1] - 1) as f64);
        let i = (fx.floor() as usize).min(self.shape[0] - 2);
        let j = (fy.floor() as usize).min(self.shape[1] - 2);
        (i, j, fx - i as f64, fy - j as f64)
    }

    fn corners(&self, i: usize, j: usize) -> [f64; 4] {
        let nx = self.shape[0];
        [
            self.values[j * nx + i],
            self.values[j * nx + i + 1],
            self.values[(j + 1) * nx + i],
            self.values[(j + 1) * nx + i + 1],
        ]
    }

    fn bilinear(&self, p: Point) -> f64 {
        let (i, j, tx, ty) = self.locate(p);
        let [v00, v10, v01, v11] = self.corners(i, j);
        (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11)
    }

    fn bilinear_gradient(&self, p: Point) -> Point {
        let (i, j, tx, ty) = self.locate(p);
        let [v00, v10, v01, v11] = self.corners(i, j);
        [
            ((1.0 - ty) * (v10 - v00) + ty * (v11 - v01)) / self.spacing[0],
            ((1.0 - tx) * (v01 - v00) + tx * (v11 - v10)) / self.spacing[1],
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldKind {
    /// `u(x) = gradient . x + offset`.
    Affine { gradient: Point, offset: f64 },
    /// Bilinear interpolation of node values; clamped outside the grid.
    Grid(Arc<GridData>),
}

/// A displacement candidate on a box `Omega` of the plane.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField2D {
    kind: FieldKind,
    domain: BBox,
}

impl SampledField2D {
    /// `u(x) = lambda * x_2` on `domain`.
    pub fn affine(lambda: f64, domain: BBox) -> Self {
        SampledField2D {
            kind: FieldKind::Affine {
                gradient: [0.0, lambda],
                offset: 0.0,
            },
            domain,
        }
    }

    pub fn grid(data: GridData) -> Result<Self> {
        data.validate()?;
        let domain = data.extent();
        Ok(SampledField2D {
            kind: FieldKind::Grid(Arc::new(data)),
            domain,
        })
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn domain(&self) -> BBox {
        self.domain
    }

    /// `|grad u(0)|`.
    pub fn lambda(&self) -> f64 {
        norm(self.gradient([0.0, 0.0]))
    }

    pub fn is_affine(&self) -> bool {
        matches!(self.kind, FieldKind::Affine { .. })
    }

    /// Checks the probe normalization `u(0) = 0`, `grad u(0) = lambda e_2`.
    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        if !self.domain.contains([0.0, 0.0]) {
            return Err(Error::InvalidField(
                "probe point 0 outside the domain".into(),
            ));
        }
        let g = self.gradient([0.0, 0.0]);
        let lambda = norm(g);
        let u0 = self.value([0.0, 0.0]);
        if u0.abs() > tol * lambda.max(1.0) || g[0].abs() > tol * lambda.max(1.0) || g[1] <= 0.0 {
            return Err(Error::InvalidField(format!(
                "field not normalized at the probe: u(0) = {u0}, grad u(0) = ({}, {}); rotate so grad u(0) = lambda e_2",
                g[0], g[1]
            )));
        }
        Ok(())
    }
}

impl ScalarField2D for SampledField2D {
    fn value(&self, p: Point) -> f64 {
        match &self.kind {
            FieldKind::Affine { gradient, offset } => {
                gradient[0] * p[0] + gradient[1] * p[1] + offset
            }
            FieldKind::Grid(g) => g.bilinear(p),
        }
    }

    fn gradient(&self, p: Point) -> Point {
        match &self.kind {
            FieldKind::Affine { gradient, .. } => *gradient,
            FieldKind::Grid(g) => g.bilinear_gradient(p),
        }
    }
}
