use std::fmt::Write as _;

use super::field::{BBox, ScalarField2D};
use super::{dot, norm, segment_root, Point};
use crate::parallel::{map_indexed, Execution};
use crate::report::fmt_g;

/// An ordered chain of level-set vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub points: Vec<Point>,
    /// Unit normal of each segment, pointing along the field gradient.
    pub normals: Vec<Point>,
    /// When set, the last vertex connects back to the first.
    pub closed: bool,
}

impl Polyline {
    pub fn segment_count(&self) -> usize {
        self.normals.len()
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.points.len();
        (0..self.segment_count()).map(move |k| (self.points[k], self.points[(k + 1) % n]))
    }

    pub fn length(&self) -> f64 {
        self.segments()
            .map(|(a, b)| norm([b[0] - a[0], b[1] - a[1]]))
            .sum()
    }
}

/// Polyline approximation of a level set.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LevelSetCurve {
    pub components: Vec<Polyline>,
}

impl LevelSetCurve {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.components.iter().map(Polyline::length).sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Point> + '_ {
        self.components
            .iter()
            .flat_map(|c| c.points.iter().copied())
    }

    /// Keeps the parts inside the closed ball of radius `radius` about 0.
    pub fn clip_to_ball(&self, radius: f64) -> LevelSetCurve {
        self.clip(|p| norm(p) - radius)
    }

    /// Keeps the parts inside the closed box.
    pub fn clip_to_box(&self, b: &BBox) -> LevelSetCurve {
        self.clip(|p| {
            (b.min[0] - p[0])
                .max(p[0] - b.max[0])
                .max(b.min[1] - p[1])
                .max(p[1] - b.max[1])
        })
    }

    /// `x,y` per vertex with a header line; components separated by a blank
    /// line and closed components repeat their first vertex.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for (k, c) in self.components.iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            let extra = c.closed.then(|| c.points[0]);
            for p in c.points.iter().chain(extra.iter()) {
                let _ = writeln!(out, "{},{}", fmt_g(p[0]), fmt_g(p[1]));
            }
        }
        out
    }

    fn clip<S: Fn(Point) -> f64>(&self, s: S) -> LevelSetCurve {
        let mut components = Vec::new();
        for c in &self.components {
            let inside = |p: Point| s(p) <= 0.0;
            if c.points.iter().all(|&p| inside(p)) {
                components.push(c.clone());
                continue;
            }
            // Walk the segments starting at an outside vertex so every kept
            // run has a well-defined start.
            let n = c.points.len();
            let start = if c.closed {
                c.points.iter().position(|&p| !inside(p)).unwrap_or(0)
            } else {
                0
            };
            let mut run: Option<Polyline> = None;
            let flush = |run: &mut Option<Polyline>, out: &mut Vec<Polyline>| {
                if let Some(r) = run.take() {
                    if !r.normals.is_empty() {
                        out.push(r);
                    }
                }
            };
            if !c.closed && inside(c.points[0]) {
                run = Some(Polyline {
                    points: vec![c.points[0]],
                    normals: Vec::new(),
                    closed: false,
                });
            }
            for k in 0..c.segment_count() {
                let ia = (start + k) % n;
                let ib = (start + k + 1) % n;
                let (a, b) = (c.points[ia], c.points[ib]);
                let normal = c.normals[if c.closed { ia } else { k }];
                let (sa, sb) = (s(a), s(b));
                match (sa <= 0.0, sb <= 0.0) {
                    (true, true) => {
                        let r = run.get_or_insert_with(|| Polyline {
                            points: vec![a],
                            normals: Vec::new(),
                            closed: false,
                        });
                        r.points.push(b);
                        r.normals.push(normal);
                    }
                    (true, false) => {
                        let x = segment_root(&|p| s(p), a, b, sa, sb);
                        if let Some(r) = run.as_mut() {
                            r.points.push(x);
                            r.normals.push(normal);
                        }
                        flush(&mut run, &mut components);
                    }
                    (false, true) => {
                        let x = segment_root(&|p| s(p), a, b, sa, sb);
                        run = Some(Polyline {
                            points: vec![x, b],
                            normals: vec![normal],
                            closed: false,
                        });
                    }
                    (false, false) => {}
                }
            }
            flush(&mut run, &mut components);
        }
        LevelSetCurve { components }
    }
}

/// Grid of node values anchored at integer multiples of `h`.
struct NodeGrid {
    i0: i64,
    j0: i64,
    nx: usize,
    h: f64,
    values: Vec<f64>,
}

impl NodeGrid {
    fn point(&self, i: usize, j: usize) -> Point {
        [
            (self.i0 + i as i64) as f64 * self.h,
            (self.j0 + j as i64) as f64 * self.h,
        ]
    }

    fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * (self.nx + 1) + i]
    }
}

/// Marching-squares extraction of `{v = sigma}` inside `bbox`, with saddle
/// cells resolved by the sign of `v - sigma` at the cell center. Vertices are
/// root-found on grid edges and then moved by one Newton step along the
/// gradient.
pub fn extract_level_set<V: ScalarField2D + ?Sized>(
    v: &V,
    sigma: f64,
    bbox: &BBox,
    h: f64,
    exec: Execution,
) -> LevelSetCurve {
    let i0 = (bbox.min[0] / h).floor() as i64;
    let j0 = (bbox.min[1] / h).floor() as i64;
    let nx = ((bbox.max[0] / h).ceil() as i64 - i0).max(1) as usize;
    let ny = ((bbox.max[1] / h).ceil() as i64 - j0).max(1) as usize;
    let rows = map_indexed(exec, ny + 1, |j| {
        (0..=nx)
            .map(|i| {
                let p = [(i0 + i as i64) as f64 * h, (j0 + j as i64) as f64 * h];
                v.value(p) - sigma
            })
            .collect::<Vec<_>>()
    });
    let grid = NodeGrid {
        i0,
        j0,
        nx,
        h,
        values: rows.concat(),
    };
    let f = |p: Point| v.value(p) - sigma;

    // Edge vertices: horizontal edges first, then vertical ones.
    let h_index = |i: usize, j: usize| j * nx + i;
    let v_index = |i: usize, j: usize| nx * (ny + 1) + j * (nx + 1) + i;
    let mut edge_vertex = vec![usize::MAX; nx * (ny + 1) + (nx + 1) * ny];
    let mut vertices: Vec<Point> = Vec::new();
    let mut vertex_at = |edge: usize, a: (usize, usize), b: (usize, usize)| -> usize {
        if edge_vertex[edge] == usize::MAX {
            let (pa, pb) = (grid.point(a.0, a.1), grid.point(b.0, b.1));
            let mut p = segment_root(&f, pa, pb, grid.value(a.0, a.1), grid.value(b.0, b.1));
            let g = v.gradient(p);
            let g2 = dot(g, g);
            let r = f(p);
            if g2 > 0.0 && r != 0.0 {
                let q = [p[0] - r * g[0] / g2, p[1] - r * g[1] / g2];
                if norm([q[0] - p[0], q[1] - p[1]]) <= h && f(q).abs() <= r.abs() {
                    p = q;
                }
            }
            edge_vertex[edge] = vertices.len();
            vertices.push(p);
        }
        edge_vertex[edge]
    };

    let mut segments: Vec<(usize, usize)> = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let above = |a: usize, b: usize| grid.value(a, b) > 0.0;
            let case = above(i, j) as u8
                | (above(i + 1, j) as u8) << 1
                | (above(i + 1, j + 1) as u8) << 2
                | (above(i, j + 1) as u8) << 3;
            if case == 0 || case == 15 {
                continue;
            }
            let mut e = |k: u8| match k {
                0 => vertex_at(h_index(i, j), (i, j), (i + 1, j)),
                1 => vertex_at(v_index(i + 1, j), (i + 1, j), (i + 1, j + 1)),
                2 => vertex_at(h_index(i, j + 1), (i, j + 1), (i + 1, j + 1)),
                _ => vertex_at(v_index(i, j), (i, j), (i, j + 1)),
            };
            let pairs: &[(u8, u8)] = match case {
                1 | 14 => &[(3, 0)],
                2 | 13 => &[(0, 1)],
                3 | 12 => &[(3, 1)],
                4 | 11 => &[(1, 2)],
                6 | 9 => &[(0, 2)],
                7 | 8 => &[(2, 3)],
                5 | 10 => {
                    let c = grid.point(i, j);
                    let center_above = f([c[0] + 0.5 * h, c[1] + 0.5 * h]) > 0.0;
                    if (case == 5) == center_above {
                        &[(0, 1), (2, 3)]
                    } else {
                        &[(3, 0), (1, 2)]
                    }
                }
                _ => unreachable!(),
            };
            for &(a, b) in pairs {
                let (va, vb) = (e(a), e(b));
                if va != vb {
                    segments.push((va, vb));
                }
            }
        }
    }

    let curve = chain(v, &vertices, &segments);
    curve.clip_to_box(bbox)
}

fn chain<V: ScalarField2D + ?Sized>(
    v: &V,
    vertices: &[Point],
    segments: &[(usize, usize)],
) -> LevelSetCurve {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for (k, &(a, b)) in segments.iter().enumerate() {
        incident[a].push(k);
        incident[b].push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut components = Vec::new();
    let walk = |start: usize, used: &mut Vec<bool>| -> Option<(Vec<usize>, bool)> {
        let mut path = vec![start];
        let mut cur = start;
        loop {
            let next = incident[cur].iter().copied().find(|&s| !used[s]);
            let Some(s) = next else { break };
            used[s] = true;
            let (a, b) = segments[s];
            cur = if a == cur { b } else { a };
            if cur == start {
                return Some((path, true));
            }
            path.push(cur);
        }
        (path.len() > 1).then_some((path, false))
    };
    // Open chains start at vertices of odd degree, loops anywhere.
    let order: Vec<usize> = (0..vertices.len())
        .filter(|&k| incident[k].len() % 2 == 1)
        .chain(0..vertices.len())
        .collect();
    for start in order {
        while incident[start].iter().any(|&s| !used[s]) {
            if let Some((path, closed)) = walk(start, &mut used) {
                let points: Vec<Point> = path.iter().map(|&k| vertices[k]).collect();
                let n = points.len();
                let count = if closed { n } else { n - 1 };
                let normals = (0..count)
                    .map(|k| {
                        let (a, b) = (points[k], points[(k + 1) % n]);
                        let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
                        let g = v.gradient(m);
                        let gn = norm(g);
                        if gn > 0.0 {
                            [g[0] / gn, g[1] / gn]
                        } else {
                            let d = [b[0] - a[0], b[1] - a[1]];
                            let dn = norm(d);
                            [d[1] / dn, -d[0] / dn]
                        }
                    })
                    .collect();
                components.push(Polyline {
                    points,
                    normals,
                    closed,
                });
            }
        }
    }
    LevelSetCurve { components }
}
