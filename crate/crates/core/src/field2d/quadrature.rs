use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::field::BBox;
use super::level_set::LevelSetCurve;
use super::{dot, norm, segment_root, Point};
use crate::parallel::{map_indexed, map_slice, pairwise_sum, Execution};

/// Which part of a competitor boundary a constraint describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryPart {
    Top,
    Bottom,
    Lateral,
    /// An internal cut between two pieces of the same region.
    Interface,
}

/// Sub-domain label of a piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Zone {
    Whole,
    Inner,
    Outer,
}

type ConstraintFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

/// One implicit inequality `g(x) < 0`.
#[derive(Clone)]
pub struct Constraint {
    pub part: BoundaryPart,
    g: ConstraintFn,
}

impl Constraint {
    pub fn new(part: BoundaryPart, g: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        Constraint {
            part,
            g: Arc::new(g),
        }
    }

    pub fn eval(&self, p: Point) -> f64 {
        (self.g)(p)
    }
}

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Constraint")
            .field("part", &self.part)
            .finish_non_exhaustive()
    }
}

/// Intersection of strict constraints inside a bounding box.
#[derive(Clone, Debug)]
pub struct Piece {
    pub zone: Zone,
    pub bbox: BBox,
    pub constraints: Vec<Constraint>,
}

impl Piece {
    pub fn contains(&self, p: Point) -> bool {
        self.bbox.contains(p) && self.constraints.iter().all(|c| c.eval(p) < 0.0)
    }
}

/// A disjoint union of pieces.
#[derive(Clone, Debug, Default)]
pub struct ImplicitRegion {
    pub pieces: Vec<Piece>,
}

impl ImplicitRegion {
    pub fn new(pieces: Vec<Piece>) -> Self {
        ImplicitRegion { pieces }
    }

    /// The open box itself.
    pub fn rectangle(b: BBox) -> Self {
        let (lo, hi) = (b.min, b.max);
        let side = |g: fn(Point, Point, Point) -> f64| {
            Constraint::new(BoundaryPart::Lateral, move |p| g(p, lo, hi))
        };
        ImplicitRegion::new(vec![Piece {
            zone: Zone::Whole,
            bbox: b,
            constraints: vec![
                side(|p, lo, _| lo[0] - p[0]),
                side(|p, _, hi| p[0] - hi[0]),
                side(|p, lo, _| lo[1] - p[1]),
                side(|p, _, hi| p[1] - hi[1]),
            ],
        }])
    }

    /// Open disk of radius `radius` about `center`.
    pub fn disk(center: Point, radius: f64) -> Self {
        ImplicitRegion::new(vec![Piece {
            zone: Zone::Whole,
            bbox: BBox::new(
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            constraints: vec![Constraint::new(BoundaryPart::Lateral, move |p| {
                let d = [p[0] - center[0], p[1] - center[1]];
                dot(d, d) - radius * radius
            })],
        }])
    }

    pub fn contains(&self, p: Point) -> bool {
        self.pieces.iter().any(|piece| piece.contains(p))
    }

    /// Smallest box containing every piece.
    pub fn bbox(&self) -> Option<BBox> {
        self.pieces.iter().map(|p| p.bbox).reduce(|a, b| {
            BBox::new(
                [a.min[0].min(b.min[0]), a.min[1].min(b.min[1])],
                [a.max[0].max(b.max[0]), a.max[1].max(b.max[1])],
            )
        })
    }
}

/// Volume quadrature rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Quadrature {
    /// Whole cells whose centers lie in the region.
    Midpoint,
    /// Cells clipped against the constraints, with a parabolic correction on
    /// each cut chord.
    #[default]
    CutCell,
}

/// Surface quadrature along a boundary chord.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SurfaceRule {
    /// Integrand at the projected chord midpoint.
    Midpoint,
    /// Simpson weights on the chord endpoints and the projected midpoint,
    /// scaled by the length of the parabolic arc through them.
    #[default]
    Simpson,
}

/// Weighted volume node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadCell {
    pub point: Point,
    pub weight: f64,
    pub zone: Zone,
}

/// A chord of the region boundary with its surface quadrature point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundarySegment {
    pub a: Point,
    pub b: Point,
    /// The chord midpoint moved onto the boundary curve along the normal.
    pub quad_point: Point,
    pub part: BoundaryPart,
    pub zone: Zone,
}

impl BoundarySegment {
    pub fn length(&self) -> f64 {
        norm([self.b[0] - self.a[0], self.b[1] - self.a[1]])
    }

    /// `int g dH^1` along this chord.
    pub fn integrate<G: Fn(Point) -> f64>(&self, rule: SurfaceRule, g: G) -> f64 {
        match rule {
            SurfaceRule::Midpoint => g(self.quad_point) * self.length(),
            SurfaceRule::Simpson => {
                (g(self.a) + 4.0 * g(self.quad_point) + g(self.b)) * self.arc_length() / 6.0
            }
        }
    }

    /// Length of the parabola through both endpoints and the quadrature
    /// point: `L + 8 d^2 / (3 L)` for chord length `L` and sag `d`.
    pub fn arc_length(&self) -> f64 {
        let l = self.length();
        let mid = [0.5 * (self.a[0] + self.b[0]), 0.5 * (self.a[1] + self.b[1])];
        let d = norm([self.quad_point[0] - mid[0], self.quad_point[1] - mid[1]]);
        if l > 0.0 {
            l + 8.0 * d * d / (3.0 * l)
        } else {
            0.0
        }
    }

    /// Outward unit normal.
    pub fn normal(&self) -> Point {
        let d = [self.b[0] - self.a[0], self.b[1] - self.a[1]];
        let l = norm(d);
        [d[1] / l, -d[0] / l]
    }
}

/// Volume and boundary quadrature nodes of a region at cell size `h`.
#[derive(Clone, Debug)]
pub struct CutCellMesh {
    h: f64,
    rule: Quadrature,
    cells: Vec<QuadCell>,
    boundary: Vec<BoundarySegment>,
}

impl CutCellMesh {
    /// Builds the nodes on the lattice `h Z^2`, piece by piece and row by row.
    pub fn build(region: &ImplicitRegion, h: f64, rule: Quadrature, exec: Execution) -> Self {
        assert!(h > 0.0 && h.is_finite(), "cell size must be positive");
        let mut cells = Vec::new();
        let mut boundary = Vec::new();
        for piece in &region.pieces {
            let (c, b) = mesh_piece(piece, h, rule, exec);
            cells.extend(c);
            boundary.extend(b);
        }
        CutCellMesh {
            h,
            rule,
            cells,
            boundary,
        }
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn rule(&self) -> Quadrature {
        self.rule
    }

    pub fn cells(&self) -> &[QuadCell] {
        &self.cells
    }

    pub fn boundary(&self) -> &[BoundarySegment] {
        &self.boundary
    }

    /// Pairwise sum of `f` over the volume nodes.
    pub fn cell_sum<F: Fn(&QuadCell) -> f64 + Sync>(&self, exec: Execution, f: F) -> f64 {
        pairwise_sum(&map_slice(exec, &self.cells, |c| f(c)))
    }

    /// Pairwise sum of `f` over the boundary chords.
    pub fn segment_sum<F: Fn(&BoundarySegment) -> f64 + Sync>(&self, exec: Execution, f: F) -> f64 {
        pairwise_sum(&map_slice(exec, &self.boundary, |s| f(s)))
    }

    /// `int_V f`.
    pub fn integrate<F: Fn(Point) -> f64 + Sync>(&self, exec: Execution, f: F) -> f64 {
        self.cell_sum(exec, |c| f(c.point) * c.weight)
    }

    pub fn area(&self) -> f64 {
        pairwise_sum(&self.cells.iter().map(|c| c.weight).collect::<Vec<_>>())
    }

    /// `int g dH^1` over the boundary chords accepted by `keep`.
    pub fn boundary_integral<K, G>(&self, exec: Execution, rule: SurfaceRule, keep: K, g: G) -> f64
    where
        K: Fn(&BoundarySegment) -> bool + Sync,
        G: Fn(Point) -> f64 + Sync,
    {
        self.segment_sum(exec, |s| if keep(s) { s.integrate(rule, &g) } else { 0.0 })
    }

    pub fn boundary_length<K: Fn(&BoundarySegment) -> bool + Sync>(
        &self,
        exec: Execution,
        keep: K,
    ) -> f64 {
        self.segment_sum(exec, |s| if keep(s) { s.length() } else { 0.0 })
    }
}

/// `int_region f` at cell size `h`.
pub fn region_integral<F: Fn(Point) -> f64 + Sync>(
    f: F,
    region: &ImplicitRegion,
    h: f64,
    rule: Quadrature,
    exec: Execution,
) -> f64 {
    CutCellMesh::build(region, h, rule, exec).integrate(exec, f)
}

/// Segment-midpoint rule for `int g dH^1` along a level-set curve.
pub fn surface_integral<G: Fn(Point) -> f64>(curve: &LevelSetCurve, g: G) -> f64 {
    let terms: Vec<f64> = curve
        .components
        .iter()
        .flat_map(|c| c.segments())
        .map(|(a, b)| {
            g([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]) * norm([b[0] - a[0], b[1] - a[1]])
        })
        .collect();
    pairwise_sum(&terms)
}

fn mesh_piece(
    piece: &Piece,
    h: f64,
    rule: Quadrature,
    exec: Execution,
) -> (Vec<QuadCell>, Vec<BoundarySegment>) {
    let i0 = (piece.bbox.min[0] / h).floor() as i64;
    let j0 = (piece.bbox.min[1] / h).floor() as i64;
    let nx = ((piece.bbox.max[0] / h).ceil() as i64 - i0).max(0) as usize;
    let ny = ((piece.bbox.max[1] / h).ceil() as i64 - j0).max(0) as usize;
    if nx == 0 || ny == 0 {
        return (Vec::new(), Vec::new());
    }
    let node = |i: usize, j: usize| [(i0 + i as i64) as f64 * h, (j0 + j as i64) as f64 * h];
    let in_box = |p: Point| piece.bbox.contains(p);

    if rule == Quadrature::Midpoint {
        let rows = map_indexed(exec, ny, |j| {
            (0..nx)
                .filter_map(|i| {
                    let c = node(i, j);
                    let p = [c[0] + 0.5 * h, c[1] + 0.5 * h];
                    piece.contains(p).then_some(QuadCell {
                        point: p,
                        weight: h * h,
                        zone: piece.zone,
                    })
                })
                .collect::<Vec<_>>()
        });
        return (rows.concat(), Vec::new());
    }

    let k = piece.constraints.len();
    let values: Vec<Vec<f64>> = map_indexed(exec, ny + 1, |j| {
        let mut row = Vec::with_capacity((nx + 1) * k);
        for i in 0..=nx {
            let p = node(i, j);
            row.extend(piece.constraints.iter().map(|c| c.eval(p)));
        }
        row
    });
    let rows = map_indexed(exec, ny, |j| {
        let mut cells = Vec::new();
        let mut segs = Vec::new();
        for i in 0..nx {
            let corner_vals = |c: usize| {
                [
                    values[j][i * k + c],
                    values[j][(i + 1) * k + c],
                    values[j + 1][(i + 1) * k + c],
                    values[j + 1][i * k + c],
                ]
            };
            let mut cut = Vec::new();
            let mut empty = false;
            for c in 0..k {
                let v = corner_vals(c);
                if v.iter().all(|&x| x >= 0.0) {
                    empty = true;
                    break;
                }
                if v.iter().any(|&x| x >= 0.0) {
                    cut.push(c);
                }
            }
            if empty {
                continue;
            }
            let p0 = node(i, j);
            if cut.is_empty() {
                let center = [p0[0] + 0.5 * h, p0[1] + 0.5 * h];
                if in_box(center) {
                    cells.push(QuadCell {
                        point: center,
                        weight: h * h,
                        zone: piece.zone,
                    });
                }
                continue;
            }
            clip_cell(piece, &cut, p0, h, &mut cells, &mut segs);
        }
        (cells, segs)
    });
    let mut cells = Vec::new();
    let mut segs = Vec::new();
    for (c, s) in rows {
        cells.extend(c);
        segs.extend(s);
    }
    (cells, segs)
}

/// Clips one lattice cell against the constraints in `cut` and appends its
/// volume nodes and boundary chords.
fn clip_cell(
    piece: &Piece,
    cut: &[usize],
    p0: Point,
    h: f64,
    cells: &mut Vec<QuadCell>,
    segs: &mut Vec<BoundarySegment>,
) {
    // Counter-clockwise vertices; `tags[i]` is the constraint owning the edge
    // that arrives at vertex `i` (None for lattice edges).
    let mut poly: Vec<Point> = vec![
        p0,
        [p0[0] + h, p0[1]],
        [p0[0] + h, p0[1] + h],
        [p0[0], p0[1] + h],
    ];
    let mut tags: Vec<Option<usize>> = vec![None; 4];
    for &c in cut {
        let g = |p: Point| piece.constraints[c].eval(p);
        let gv: Vec<f64> = poly.iter().map(|&p| g(p)).collect();
        let n = poly.len();
        let mut out = Vec::with_capacity(n + 2);
        let mut out_tags = Vec::with_capacity(n + 2);
        for q in 0..n {
            let p = (q + n - 1) % n;
            let (p_in, q_in) = (gv[p] < 0.0, gv[q] < 0.0);
            match (p_in, q_in) {
                (true, true) => {
                    out.push(poly[q]);
                    out_tags.push(tags[q]);
                }
                (true, false) => {
                    out.push(segment_root(&g, poly[p], poly[q], gv[p], gv[q]));
                    out_tags.push(tags[q]);
                }
                (false, true) => {
                    out.push(segment_root(&g, poly[p], poly[q], gv[p], gv[q]));
                    out_tags.push(Some(c));
                    out.push(poly[q]);
                    out_tags.push(tags[q]);
                }
                (false, false) => {}
            }
        }
        poly = out;
        tags = out_tags;
        if poly.len() < 3 {
            return;
        }
    }

    // A vertex joining chords of two different constraints is moved onto the
    // intersection of both curves so each chord ends on its own curve.
    let n = poly.len();
    for q in 0..n {
        if let (Some(k), Some(m)) = (tags[q], tags[(q + 1) % n]) {
            if k != m {
                poly[q] = snap_corner(&piece.constraints[k], &piece.constraints[m], poly[q], h);
            }
        }
    }

    // Shoelace area and centroid in cell-local coordinates.
    let local: Vec<Point> = poly.iter().map(|p| [p[0] - p0[0], p[1] - p0[1]]).collect();
    let (mut a2, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for q in 0..n {
        let (u, v) = (local[q], local[(q + 1) % n]);
        let cross = u[0] * v[1] - v[0] * u[1];
        a2 += cross;
        cx += (u[0] + v[0]) * cross;
        cy += (u[1] + v[1]) * cross;
    }
    let area = 0.5 * a2;
    if area <= 1e-14 * h * h {
        return;
    }
    cells.push(QuadCell {
        point: [p0[0] + cx / (3.0 * a2), p0[1] + cy / (3.0 * a2)],
        weight: area,
        zone: piece.zone,
    });

    for q in 0..n {
        let Some(c) = tags[q] else { continue };
        let (a, b) = (poly[(q + n - 1) % n], poly[q]);
        let d = [b[0] - a[0], b[1] - a[1]];
        let len = norm(d);
        if len == 0.0 {
            continue;
        }
        let nu = [d[1] / len, -d[0] / len];
        let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let g = |p: Point| piece.constraints[c].eval(p);
        let along = |t: f64| [m[0] + t * nu[0], m[1] + t * nu[1]];
        let s0 = g(m);
        let quad_point = if s0 == 0.0 {
            m
        } else {
            let t = if s0 < 0.0 { h } else { -h };
            let st = g(along(t));
            if (st < 0.0) != (s0 < 0.0) {
                segment_root(&g, m, along(t), s0, st)
            } else {
                m
            }
        };
        // Area between the chord and the curve, approximated by a parabola
        // through the chord endpoints and the projected midpoint.
        let sag = dot([quad_point[0] - m[0], quad_point[1] - m[1]], nu);
        if sag != 0.0 {
            cells.push(QuadCell {
                point: along(0.4 * sag),
                weight: 2.0 / 3.0 * len * sag,
                zone: piece.zone,
            });
        }
        segs.push(BoundarySegment {
            a,
            b,
            quad_point,
            part: piece.constraints[c].part,
            zone: piece.zone,
        });
    }
}

/// Newton iteration for `g_k = g_m = 0` started at `p`; returns `p`
/// unchanged when the iteration leaves a neighbourhood of size `h` or stalls.
fn snap_corner(gk: &Constraint, gm: &Constraint, p: Point, h: f64) -> Point {
    let step = 1e-6 * h;
    let mut x = p;
    for _ in 0..20 {
        let f = [gk.eval(x), gm.eval(x)];
        if f[0] == 0.0 && f[1] == 0.0 {
            return x;
        }
        let partial = |g: &Constraint, axis: usize| {
            let mut lo = x;
            let mut hi = x;
            lo[axis] -= step;
            hi[axis] += step;
            (g.eval(hi) - g.eval(lo)) / (2.0 * step)
        };
        let j = [
            [partial(gk, 0), partial(gk, 1)],
            [partial(gm, 0), partial(gm, 1)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let scale = norm(j[0]) * norm(j[1]);
        if !(det.abs() > 1e-8 * scale) {
            return p;
        }
        let dx = [
            (f[0] * j[1][1] - f[1] * j[0][1]) / det,
            (f[1] * j[0][0] - f[0] * j[1][0]) / det,
        ];
        x = [x[0] - dx[0], x[1] - dx[1]];
        if norm([x[0] - p[0], x[1] - p[1]]) > h {
            return p;
        }
        if norm(dx) <= 1e-15 * (1.0 + norm(x)) {
            return x;
        }
    }
    x
}
