//! Paths and loops in the plane.
//!
//! Every path is parametrized by `t ∈ [0, 1]`, proportional to arc length
//! across the whole path. Counterclockwise is the positive orientation.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Start and end of a closed path must agree to this distance.
pub const CLOSURE_TOL: f64 = 1e-12;
/// Consecutive parts of a concatenation must meet to this distance.
pub const CONTIGUITY_TOL: f64 = 1e-9;
/// Points closer than this to a curve count as lying on it.
pub const ON_PATH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub const ORIGIN: PlanePoint = PlanePoint { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self { x: z.re, y: z.im }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(self, other: PlanePoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl std::ops::Add for PlanePoint {
    type Output = PlanePoint;
    fn add(self, o: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for PlanePoint {
    type Output = PlanePoint;
    fn sub(self, o: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for PlanePoint {
    type Output = PlanePoint;
    fn mul(self, s: f64) -> PlanePoint {
        PlanePoint::new(self.x * s, self.y * s)
    }
}

/// A finite set of labelled, pairwise distinct punctures.
#[derive(Debug, Clone, PartialEq)]
pub struct PunctureSet {
    points: Vec<PlanePoint>,
    labels: Vec<String>,
}

impl PunctureSet {
    /// Minimum separation between two punctures.
    pub const MIN_SEPARATION: f64 = 1e-9;

    pub fn new(points: Vec<PlanePoint>, labels: Vec<String>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::InvalidPunctures(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidPunctures(format!("non-finite point {p:?}")));
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let d = points[i].distance(points[j]);
                if d <= Self::MIN_SEPARATION {
                    return Err(Error::InvalidPunctures(format!(
                        "`{}` and `{}` are {d:.3e} apart",
                        labels[i], labels[j]
                    )));
                }
            }
            if labels[(i + 1)..].contains(&labels[i]) {
                return Err(Error::InvalidPunctures(format!(
                    "duplicate label `{}`",
                    labels[i]
                )));
            }
        }
        Ok(Self { points, labels })
    }

    /// Punctures labelled `z1`, `z2`, ... in the given order.
    pub fn unlabelled(points: Vec<PlanePoint>) -> Result<Self> {
        let labels = (1..=points.len()).map(|k| format!("z{k}")).collect();
        Self::new(points, labels)
    }

    pub fn empty() -> Self {
        Self {
            points: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn points(&self) -> &[PlanePoint] {
        &self.points
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, PlanePoint)> {
        self.labels
            .iter()
            .map(String::as_str)
            .zip(self.points.iter().copied())
    }

    /// Distance from `p` to the nearest puncture, `+inf` when empty.
    pub fn distance_to(&self, p: PlanePoint) -> f64 {
        self.points
            .iter()
            .map(|q| q.distance(p))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PathSpec {
    Polyline(Vec<PlanePoint>),
    Circle {
        center: PlanePoint,
        radius: f64,
        turns: i32,
        start_angle: f64,
    },
    /// Partial circle sweeping `sweep` radians (counterclockwise when positive).
    Arc {
        center: PlanePoint,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
    Concat(Vec<PathSpec>),
}

/// One smooth primitive of a path, parametrized by its own `s ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    Segment {
        from: PlanePoint,
        to: PlanePoint,
    },
    Arc {
        center: PlanePoint,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
}

impl Piece {
    pub fn point(&self, s: f64) -> PlanePoint {
        match *self {
            Piece::Segment { from, to } => from + (to - from) * s,
            Piece::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let th = start_angle + sweep * s;
                PlanePoint::new(center.x + radius * th.cos(), center.y + radius * th.sin())
            }
        }
    }

    /// Derivative of [`Piece::point`] with respect to `s`.
    pub fn velocity(&self, s: f64) -> PlanePoint {
        match *self {
            Piece::Segment { from, to } => to - from,
            Piece::Arc {
                radius,
                start_angle,
                sweep,
                ..
            } => {
                let th = start_angle + sweep * s;
                PlanePoint::new(-radius * sweep * th.sin(), radius * sweep * th.cos())
            }
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Piece::Segment { from, to } => from.distance(to),
            Piece::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn start(&self) -> PlanePoint {
        self.point(0.0)
    }

    pub fn end(&self) -> PlanePoint {
        match *self {
            Piece::Segment { to, .. } => to,
            _ => self.point(1.0),
        }
    }

    /// Number of full turns swept (0 for segments).
    pub fn turns(&self) -> f64 {
        match *self {
            Piece::Segment { .. } => 0.0,
            Piece::Arc { sweep, .. } => sweep.abs() / TAU,
        }
    }

    /// Exact Euclidean distance from `p` to this piece.
    pub fn distance_to(&self, p: PlanePoint) -> f64 {
        match *self {
            Piece::Segment { from, to } => {
                let d = to - from;
                let len2 = d.x * d.x + d.y * d.y;
                if len2 == 0.0 {
                    return from.distance(p);
                }
                let w = p - from;
                let s = ((w.x * d.x + w.y * d.y) / len2).clamp(0.0, 1.0);
                (from + d * s).distance(p)
            }
            Piece::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                let rel = p - center;
                let rho = rel.norm();
                if sweep.abs() >= TAU {
                    return (rho - radius).abs();
                }
                if rho > 0.0 {
                    let lo = start_angle.min(start_angle + sweep);
                    let phi = rel.y.atan2(rel.x);
                    if (phi - lo).rem_euclid(TAU) <= sweep.abs() {
                        return (rho - radius).abs();
                    }
                }
                self.start().distance(p).min(self.end().distance(p))
            }
        }
    }
}

/// A sample of a path: parameter, position, and derivative with respect to `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    pub t: f64,
    pub point: PlanePoint,
    pub velocity: PlanePoint,
}

impl PathSpec {
    pub fn polyline(points: Vec<PlanePoint>) -> Result<Self> {
        let p = PathSpec::Polyline(points);
        p.validate()?;
        Ok(p)
    }

    pub fn circle(center: PlanePoint, radius: f64, turns: i32, start_angle: f64) -> Result<Self> {
        let p = PathSpec::Circle {
            center,
            radius,
            turns,
            start_angle,
        };
        p.validate()?;
        Ok(p)
    }

    /// Counterclockwise unit-speed-in-angle circle starting at angle 0.
    pub fn ccw_circle(center: PlanePoint, radius: f64) -> Result<Self> {
        Self::circle(center, radius, 1, 0.0)
    }

    pub fn arc(center: PlanePoint, radius: f64, start_angle: f64, sweep: f64) -> Result<Self> {
        let p = PathSpec::Arc {
            center,
            radius,
            start_angle,
            sweep,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn concat_all(parts: Vec<PathSpec>) -> Result<Self> {
        let mut flat = Vec::with_capacity(parts.len());
        for part in parts {
            match part {
                PathSpec::Concat(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        let p = PathSpec::Concat(flat);
        p.validate()?;
        Ok(p)
    }

    /// Closed axis-aligned rectangle traversed counterclockwise from its lower-left corner.
    pub fn rectangle(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self> {
        Self::polyline(vec![
            PlanePoint::new(xmin, ymin),
            PlanePoint::new(xmax, ymin),
            PlanePoint::new(xmax, ymax),
            PlanePoint::new(xmin, ymax),
            PlanePoint::new(xmin, ymin),
        ])
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PathSpec::Polyline(points) => {
                if points.len() < 2 {
                    return Err(Error::InvalidPath(
                        "polyline needs at least 2 points".into(),
                    ));
                }
                if points.iter().any(|p| !p.is_finite()) {
                    return Err(Error::InvalidPath("non-finite polyline point".into()));
                }
            }
            PathSpec::Circle {
                center,
                radius,
                turns,
                start_angle,
            } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidPath(format!("circle radius {radius}")));
                }
                if *turns == 0 {
                    return Err(Error::InvalidPath("circle turns must be nonzero".into()));
                }
                if !center.is_finite() || !start_angle.is_finite() {
                    return Err(Error::InvalidPath("non-finite circle data".into()));
                }
            }
            PathSpec::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidPath(format!("arc radius {radius}")));
                }
                if !(sweep.is_finite() && *sweep != 0.0) {
                    return Err(Error::InvalidPath(format!("arc sweep {sweep}")));
                }
                if !center.is_finite() || !start_angle.is_finite() {
                    return Err(Error::InvalidPath("non-finite arc data".into()));
                }
            }
            PathSpec::Concat(parts) => {
                if parts.is_empty() {
                    return Err(Error::InvalidPath("empty concatenation".into()));
                }
                for part in parts {
                    part.validate()?;
                }
                for pair in parts.windows(2) {
                    let gap = pair[0].end_point().distance(pair[1].start_point());
                    if gap > CONTIGUITY_TOL {
                        return Err(Error::NonContiguous { gap });
                    }
                }
            }
        }
        if self.length() <= 0.0 {
            return Err(Error::InvalidPath("path has zero length".into()));
        }
        Ok(())
    }

    pub fn start_point(&self) -> PlanePoint {
        match self {
            PathSpec::Polyline(points) => points[0],
            PathSpec::Circle {
                center,
                radius,
                start_angle,
                ..
            } => PlanePoint::new(
                center.x + radius * start_angle.cos(),
                center.y + radius * start_angle.sin(),
            ),
            PathSpec::Arc {
                center,
                radius,
                start_angle,
                ..
            } => PlanePoint::new(
                center.x + radius * start_angle.cos(),
                center.y + radius * start_angle.sin(),
            ),
            PathSpec::Concat(parts) => parts[0].start_point(),
        }
    }

    pub fn end_point(&self) -> PlanePoint {
        match self {
            PathSpec::Polyline(points) => points[points.len() - 1],
            // whole turns return exactly to the start
            PathSpec::Circle { .. } => self.start_point(),
            &PathSpec::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => PlanePoint::new(
                center.x + radius * (start_angle + sweep).cos(),
                center.y + radius * (start_angle + sweep).sin(),
            ),
            PathSpec::Concat(parts) => parts[parts.len() - 1].end_point(),
        }
    }

    pub fn closure_gap(&self) -> f64 {
        self.start_point().distance(self.end_point())
    }

    pub fn is_closed(&self) -> bool {
        self.closure_gap() <= CLOSURE_TOL
    }

    pub fn ensure_closed(&self) -> Result<()> {
        let gap = self.closure_gap();
        if gap > CLOSURE_TOL {
            return Err(Error::NonClosedPath { gap });
        }
        Ok(())
    }

    /// Smooth primitives in traversal order; zero-length segments are dropped.
    pub fn pieces(&self) -> Vec<Piece> {
        let mut out = Vec::new();
        self.collect_pieces(&mut out);
        out
    }

    fn collect_pieces(&self, out: &mut Vec<Piece>) {
        match self {
            PathSpec::Polyline(points) => {
                for w in points.windows(2) {
                    if w[0] != w[1] {
                        out.push(Piece::Segment {
                            from: w[0],
                            to: w[1],
                        });
                    }
                }
            }
            &PathSpec::Circle {
                center,
                radius,
                turns,
                start_angle,
            } => out.push(Piece::Arc {
                center,
                radius,
                start_angle,
                sweep: TAU * turns as f64,
            }),
            &PathSpec::Arc {
                center,
                radius,
                start_angle,
                sweep,
            } => out.push(Piece::Arc {
                center,
                radius,
                start_angle,
                sweep,
            }),
            PathSpec::Concat(parts) => {
                for part in parts {
                    part.collect_pieces(out);
                }
            }
        }
    }

    pub fn length(&self) -> f64 {
        self.pieces().iter().map(Piece::length).sum()
    }

    /// Position and `d/dt` at global parameter `t ∈ [0, 1]`.
    pub fn evaluate(&self, t: f64) -> PathSample {
        let pieces = self.pieces();
        let total: f64 = pieces.iter().map(Piece::length).sum();
        locate(&pieces, total, t)
    }

    /// Exact distance from `p` to the curve.
    pub fn distance_to(&self, p: PlanePoint) -> f64 {
        self.pieces()
            .iter()
            .map(|piece| piece.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }
}

fn locate(pieces: &[Piece], total: f64, t: f64) -> PathSample {
    let target = t.clamp(0.0, 1.0) * total;
    let mut acc = 0.0;
    for (k, piece) in pieces.iter().enumerate() {
        let len = piece.length();
        let last = k + 1 == pieces.len();
        if target <= acc + len || last {
            let s = if len > 0.0 {
                ((target - acc) / len).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let dt = len / total;
            let v = piece.velocity(s);
            return PathSample {
                t,
                point: piece.point(s),
                velocity: PlanePoint::new(v.x / dt, v.y / dt),
            };
        }
        acc += len;
    }
    unreachable!("validated paths have at least one piece")
}

/// Samples the path at `t = i / (n - 1)`.
pub fn sample_path(path: &PathSpec, n: usize) -> Result<Vec<PathSample>> {
    if n < 2 {
        return Err(Error::InvalidPath(format!(
            "need at least 2 samples, got {n}"
        )));
    }
    path.validate()?;
    let pieces = path.pieces();
    let total: f64 = pieces.iter().map(Piece::length).sum();
    Ok((0..n)
        .map(|i| locate(&pieces, total, i as f64 / (n - 1) as f64))
        .collect())
}

pub fn reverse(path: &PathSpec) -> PathSpec {
    match path {
        PathSpec::Polyline(points) => PathSpec::Polyline(points.iter().rev().copied().collect()),
        &PathSpec::Circle {
            center,
            radius,
            turns,
            start_angle,
        } => PathSpec::Circle {
            center,
            radius,
            turns: -turns,
            start_angle: start_angle + TAU * turns as f64,
        },
        &PathSpec::Arc {
            center,
            radius,
            start_angle,
            sweep,
        } => PathSpec::Arc {
            center,
            radius,
            start_angle: start_angle + sweep,
            sweep: -sweep,
        },
        PathSpec::Concat(parts) => PathSpec::Concat(parts.iter().rev().map(reverse).collect()),
    }
}

/// `a` followed by `b`.
pub fn concat(a: &PathSpec, b: &PathSpec) -> Result<PathSpec> {
    let gap = a.end_point().distance(b.start_point());
    if gap > CONTIGUITY_TOL {
        return Err(Error::NonContiguous { gap });
    }
    PathSpec::concat_all(vec![a.clone(), b.clone()])
}

/// Distance from the path to the nearest puncture, `+inf` for an empty set.
pub fn min_distance(path: &PathSpec, punctures: &PunctureSet) -> f64 {
    let pieces = path.pieces();
    punctures
        .points()
        .iter()
        .flat_map(|&p| pieces.iter().map(move |piece| piece.distance_to(p)))
        .fold(f64::INFINITY, f64::min)
}

const MAX_WINDING_SAMPLES: usize = 1 << 24;

/// Signed number of counterclockwise turns of a closed path about `p`.
///
/// Argument increments are summed over a sampling that doubles until the
/// total is within 0.01 of an integer and every arc chunk is short enough
/// that the chord cannot cross `p`.
pub fn winding_number(path: &PathSpec, p: PlanePoint) -> Result<i64> {
    path.validate()?;
    path.ensure_closed()?;
    let pieces = path.pieces();
    let d = pieces
        .iter()
        .map(|piece| piece.distance_to(p))
        .fold(f64::INFINITY, f64::min);
    if d <= ON_PATH_TOL {
        return Err(Error::PointOnPath { distance: d });
    }
    let pz = p.to_complex();
    let mut per_turn = 16usize;
    loop {
        let mut total = 0.0;
        let mut fine_enough = true;
        let mut used = 0usize;
        for piece in &pieces {
            let n = match piece {
                Piece::Segment { .. } => 1,
                Piece::Arc { radius, sweep, .. } => {
                    let n = ((piece.turns() * per_turn as f64).ceil() as usize).max(1);
                    // sagitta of each chunk must stay below the clearance
                    let chunk = sweep.abs() / n as f64;
                    if radius * (1.0 - (chunk / 2.0).cos()) >= 0.5 * d {
                        fine_enough = false;
                    }
                    n
                }
            };
            used += n;
            let mut prev = piece.start().to_complex() - pz;
            for k in 1..=n {
                let cur = piece.point(k as f64 / n as f64).to_complex() - pz;
                total += (cur / prev).arg();
                prev = cur;
            }
        }
        let w = total / TAU;
        let residual = (w - w.round()).abs();
        if residual < 0.01 && fine_enough {
            return Ok(w.round() as i64);
        }
        if used > MAX_WINDING_SAMPLES {
            return Err(Error::WindingUnresolved { residual });
        }
        per_turn *= 2;
    }
}
