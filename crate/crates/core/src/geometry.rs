//! Planar segment tests shared by the layout and render checks.
//!
//! Orientation tests are exact when coordinates are integers of moderate
//! size; for general floats a tolerance relative to the segment lengths is
//! used.

use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn near(self, other: Point) -> bool {
        self.dist(other) <= 1e-7 * (1.0 + self.x.abs().max(self.y.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Intersection {
    None,
    Point(Point),
    Overlap,
}

/// Sign of the turn a→b→c: 1 left, -1 right, 0 collinear.
pub fn orientation(a: Point, b: Point, c: Point) -> i8 {
    let cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    let tol = 1e-10 * a.dist(b) * a.dist(c);
    if cross > tol {
        1
    } else if cross < -tol {
        -1
    } else {
        0
    }
}

fn within(p: Point, a: Point, b: Point) -> bool {
    let slack = 1e-9 * (1.0 + a.dist(b));
    p.x >= a.x.min(b.x) - slack
        && p.x <= a.x.max(b.x) + slack
        && p.y >= a.y.min(b.y) - slack
        && p.y <= a.y.max(b.y) + slack
}

/// How the closed segments `p1p2` and `q1q2` meet.
pub fn classify(p1: Point, p2: Point, q1: Point, q2: Point) -> Intersection {
    if p1.near(p2) {
        return if orientation(q1, q2, p1) == 0 && within(p1, q1, q2) {
            Intersection::Point(p1)
        } else {
            Intersection::None
        };
    }
    if q1.near(q2) {
        return classify(q1, q2, p1, p2);
    }
    let d1 = orientation(q1, q2, p1);
    let d2 = orientation(q1, q2, p2);
    let d3 = orientation(p1, p2, q1);
    let d4 = orientation(p1, p2, q2);
    if d1 == 0 && d2 == 0 {
        return collinear(p1, p2, q1, q2);
    }
    if d1 * d2 < 0 && d3 * d4 < 0 {
        let r = (p2.x - p1.x, p2.y - p1.y);
        let s = (q2.x - q1.x, q2.y - q1.y);
        let denom = r.0 * s.1 - r.1 * s.0;
        let t = ((q1.x - p1.x) * s.1 - (q1.y - p1.y) * s.0) / denom;
        return Intersection::Point(Point::new(p1.x + t * r.0, p1.y + t * r.1));
    }
    for (d, p, a, b) in [
        (d1, p1, q1, q2),
        (d2, p2, q1, q2),
        (d3, q1, p1, p2),
        (d4, q2, p1, p2),
    ] {
        if d == 0 && within(p, a, b) {
            return Intersection::Point(p);
        }
    }
    Intersection::None
}

fn collinear(p1: Point, p2: Point, q1: Point, q2: Point) -> Intersection {
    // parametrize along the dominant axis of p
    let key: fn(Point) -> f64 = if (p2.x - p1.x).abs() >= (p2.y - p1.y).abs() {
        |p: Point| p.x
    } else {
        |p: Point| p.y
    };
    let (plo, phi) = if key(p1) <= key(p2) {
        (p1, p2)
    } else {
        (p2, p1)
    };
    let (qlo, qhi) = if key(q1) <= key(q2) {
        (q1, q2)
    } else {
        (q2, q1)
    };
    let lo = if key(plo) >= key(qlo) { plo } else { qlo };
    let hi = if key(phi) <= key(qhi) { phi } else { qhi };
    if lo.near(hi) {
        Intersection::Point(lo)
    } else if key(lo) < key(hi) {
        Intersection::Overlap
    } else {
        Intersection::None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConflictKind {
    Crossing { at: Point },
    Overlap,
}

/// Two polyline segments that meet illegally. Segments are named by
/// `(polyline index, segment index)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conflict {
    pub first: (usize, usize),
    pub second: (usize, usize),
    pub kind: ConflictKind,
}

/// Finds all illegal contacts in a set of polylines.
///
/// Distinct polylines may only touch at a single point that is an end of
/// both. Within one polyline, consecutive segments may share their common
/// vertex and nothing else; other segment pairs may not meet at all.
pub fn polyline_conflicts(lines: &[Vec<Point>]) -> Vec<Conflict> {
    let segs: Vec<(usize, usize, Point, Point)> = lines
        .iter()
        .enumerate()
        .flat_map(|(li, pts)| {
            pts.windows(2)
                .enumerate()
                .map(move |(si, w)| (li, si, w[0], w[1]))
        })
        .collect();
    if segs.is_empty() {
        return Vec::new();
    }
    let extent: f64 = segs
        .iter()
        .map(|s| (s.2.x - s.3.x).abs().max((s.2.y - s.3.y).abs()))
        .sum();
    let cell = (extent / segs.len() as f64).max(1e-6);
    let cells_of = |a: Point, b: Point| {
        let lo = (
            (a.x.min(b.x) / cell).floor() as i64,
            (a.y.min(b.y) / cell).floor() as i64,
        );
        let hi = (
            (a.x.max(b.x) / cell).floor() as i64,
            (a.y.max(b.y) / cell).floor() as i64,
        );
        (lo, hi)
    };
    let ranges: Vec<_> = segs.iter().map(|s| cells_of(s.2, s.3)).collect();
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, &(lo, hi)) in ranges.iter().enumerate() {
        for cx in lo.0..=hi.0 {
            for cy in lo.1..=hi.1 {
                grid.entry((cx, cy)).or_default().push(i);
            }
        }
    }
    let is_end = |li: usize, p: Point| {
        let pts = &lines[li];
        pts[0].near(p) || pts[pts.len() - 1].near(p)
    };
    let mut out = Vec::new();
    let mut cells: Vec<_> = grid.into_iter().collect();
    cells.sort_unstable_by_key(|c| c.0);
    for (cell_key, members) in cells {
        for (x, &i) in members.iter().enumerate() {
            for &j in &members[x + 1..] {
                let (a, b) = (ranges[i], ranges[j]);
                // handle each pair only in the first cell both segments cover
                if (a.0 .0.max(b.0 .0), a.0 .1.max(b.0 .1)) != cell_key {
                    continue;
                }
                let (si, sj) = (segs[i], segs[j]);
                let hit = classify(si.2, si.3, sj.2, sj.3);
                let kind = match hit {
                    Intersection::None => continue,
                    Intersection::Overlap => ConflictKind::Overlap,
                    Intersection::Point(p) => {
                        let allowed = if si.0 == sj.0 {
                            si.1.abs_diff(sj.1) == 1 && {
                                let shared = if si.1 < sj.1 { si.3 } else { sj.3 };
                                shared.near(p)
                            }
                        } else {
                            is_end(si.0, p) && is_end(sj.0, p)
                        };
                        if allowed {
                            continue;
                        }
                        ConflictKind::Crossing { at: p }
                    }
                };
                let (first, second) = if (si.0, si.1) < (sj.0, sj.1) {
                    ((si.0, si.1), (sj.0, sj.1))
                } else {
                    ((sj.0, sj.1), (si.0, si.1))
                };
                out.push(Conflict {
                    first,
                    second,
                    kind,
                });
            }
        }
    }
    out.sort_by_key(|c| (c.first, c.second));
    out
}
