//! Parallel transport along paths.
//!
//! Each smooth piece of the path is cut into equal steps. A step multiplies
//! the accumulated matrix on the left by `exp(h · G(midpoint))`. All step
//! counts are doubled until two successive full-path results differ by less
//! than the tolerance; that difference is reported as the error estimate.
//!
//! Composition convention used throughout the crate: later path factors
//! multiply on the left.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::connection::{evaluate_generator, ConnectionSpec, POLE_GUARD, POLE_WARN};
use crate::error::{Error, Result};
use crate::geometry::{min_distance, PathSpec, Piece, PlanePoint};
use crate::linalg::{self, expm, CMat};

/// Hard cap on the number of steps at the finest level.
pub const MAX_STEPS: usize = 1 << 24;
pub const MIN_TOL: f64 = 1e-13;
pub const MAX_TOL: f64 = 1e-2;

/// Minimum steps per full turn of an arc at the coarsest level.
const STEPS_PER_TURN: f64 = 64.0;
const MIN_STEPS_PER_PIECE: usize = 8;
const MIN_TOTAL_STEPS: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct HolonomyResult {
    pub matrix: CMat,
    pub error_estimate: f64,
    pub steps_used: usize,
    pub path_closed: bool,
    pub min_pole_distance: f64,
}

impl HolonomyResult {
    pub fn identity(m: usize) -> Self {
        Self {
            matrix: linalg::identity(m),
            error_estimate: 0.0,
            steps_used: 0,
            path_closed: true,
            min_pole_distance: f64::INFINITY,
        }
    }

    pub fn rank(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(&self.matrix)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportTrajectory {
    pub samples: Vec<(f64, DVector<Complex64>)>,
    pub error_estimate: f64,
}

pub fn check_tol(tol: f64) -> Result<()> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(Error::InvalidTolerance(tol));
    }
    Ok(())
}

/// Step layout of a path: its smooth pieces and their coarsest step counts.
#[derive(Debug, Clone)]
pub(crate) struct Discretization {
    pub pieces: Vec<Piece>,
    pub base: Vec<usize>,
    /// Global parameter at the start of each piece, plus a final 1.0.
    pub t_bounds: Vec<f64>,
}

impl Discretization {
    pub fn new(path: &PathSpec) -> Self {
        let pieces = path.pieces();
        let mut base: Vec<usize> = pieces
            .iter()
            .map(|p| ((p.turns() * STEPS_PER_TURN).ceil() as usize).max(MIN_STEPS_PER_PIECE))
            .collect();
        let total: usize = base.iter().sum();
        if total < MIN_TOTAL_STEPS {
            let factor = MIN_TOTAL_STEPS.div_ceil(total);
            base.iter_mut().for_each(|n| *n *= factor);
        }
        let lengths: Vec<f64> = pieces.iter().map(Piece::length).collect();
        let sum: f64 = lengths.iter().sum();
        let mut t_bounds = Vec::with_capacity(pieces.len() + 1);
        let mut acc = 0.0;
        t_bounds.push(0.0);
        for len in &lengths {
            acc += len;
            t_bounds.push(acc / sum);
        }
        *t_bounds.last_mut().unwrap() = 1.0;
        Self {
            pieces,
            base,
            t_bounds,
        }
    }

    pub fn steps_at(&self, level: u32) -> usize {
        self.base.iter().map(|n| n << level).sum()
    }

    /// Visits `h · G(midpoint)` for every step at `level`, in path order,
    /// along with the piece index and local step bounds.
    pub fn for_each_step(
        &self,
        conn: &ConnectionSpec,
        level: u32,
        mut visit: impl FnMut(StepInfo, CMat) -> Result<()>,
    ) -> Result<()> {
        for (k, piece) in self.pieces.iter().enumerate() {
            let n = self.base[k] << level;
            let h = 1.0 / n as f64;
            for i in 0..n {
                let s = (i as f64 + 0.5) * h;
                let g = evaluate_generator(conn, piece.point(s), piece.velocity(s))?;
                visit(
                    StepInfo {
                        piece: k,
                        s0: i as f64 * h,
                        s1: (i + 1) as f64 * h,
                    },
                    g * Complex64::from(h),
                )?;
            }
        }
        Ok(())
    }

    pub fn global_t(&self, piece: usize, s: f64) -> f64 {
        self.t_bounds[piece] + s * (self.t_bounds[piece + 1] - self.t_bounds[piece])
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct StepInfo {
    pub piece: usize,
    pub s0: f64,
    pub s1: f64,
}

/// Checks the pole guard for the whole path; returns the clearance.
pub(crate) fn path_clearance(conn: &ConnectionSpec, path: &PathSpec) -> Result<f64> {
    let punctures = conn.punctures();
    let d = min_distance(path, &punctures);
    if d <= POLE_GUARD {
        let nearest = punctures
            .points()
            .iter()
            .copied()
            .min_by(|a, b| path.distance_to(*a).total_cmp(&path.distance_to(*b)))
            .unwrap_or(PlanePoint::ORIGIN);
        return Err(Error::PoleProximity {
            point: nearest,
            distance: d,
        });
    }
    if d < POLE_WARN {
        log::warn!("path passes within {d:.3e} of a puncture; convergence will be slow");
    }
    Ok(d)
}

/// Runs `level_result` at levels 0, 1, 2, ... until two successive values are
/// closer than `tol`. Returns the finer value, the last difference, the step
/// count, and the accepted level.
pub(crate) fn refine<T>(
    disc: &Discretization,
    tol: f64,
    mut level_result: impl FnMut(u32) -> Result<T>,
    distance: impl Fn(&T, &T) -> f64,
) -> Result<(T, f64, usize, u32)> {
    let mut prev = level_result(0)?;
    let mut level = 1u32;
    loop {
        let steps = disc.steps_at(level);
        if steps > MAX_STEPS {
            return Err(Error::NoConvergence { steps });
        }
        let cur = level_result(level)?;
        let diff = distance(&prev, &cur);
        if !diff.is_finite() {
            return Err(Error::NonFinite);
        }
        if diff < tol {
            return Ok((cur, diff, steps, level));
        }
        prev = cur;
        level += 1;
    }
}

fn transport_matrix(conn: &ConnectionSpec, disc: &Discretization, level: u32) -> Result<CMat> {
    let mut acc = linalg::identity(conn.rank());
    disc.for_each_step(conn, level, |_, gh| {
        acc = expm(&gh) * &acc;
        Ok(())
    })?;
    if !linalg::is_finite(&acc) {
        return Err(Error::NonFinite);
    }
    Ok(acc)
}

/// Transport matrix `T` with `v(1) = T v(0)` for `dv/dt = G v` along `path`.
pub fn parallel_transport(
    conn: &ConnectionSpec,
    path: &PathSpec,
    tol: f64,
) -> Result<HolonomyResult> {
    check_tol(tol)?;
    path.validate()?;
    let clearance = path_clearance(conn, path)?;
    let disc = Discretization::new(path);
    let (matrix, err, steps, _) = refine(
        &disc,
        tol,
        |level| transport_matrix(conn, &disc, level),
        linalg::dist,
    )?;
    Ok(HolonomyResult {
        matrix,
        error_estimate: err,
        steps_used: steps,
        path_closed: path.is_closed(),
        min_pole_distance: clearance,
    })
}

fn trajectory_at(
    conn: &ConnectionSpec,
    disc: &Discretization,
    level: u32,
    v0: &DVector<Complex64>,
    times: &[f64],
) -> Result<Vec<DVector<Complex64>>> {
    let mut out = Vec::with_capacity(times.len());
    let mut next = 0usize;
    let mut v = v0.clone();
    disc.for_each_step(conn, level, |step, gh| {
        let t0 = disc.global_t(step.piece, step.s0);
        let t1 = disc.global_t(step.piece, step.s1);
        while next < times.len() && times[next] < t1 {
            // partial step from t0 to the requested time, midpoint-sampled
            let frac = ((times[next] - t0) / (t1 - t0)).clamp(0.0, 1.0);
            if frac == 0.0 {
                out.push(v.clone());
            } else {
                let piece = &disc.pieces[step.piece];
                let s_mid = step.s0 + 0.5 * frac * (step.s1 - step.s0);
                let g = evaluate_generator(conn, piece.point(s_mid), piece.velocity(s_mid))?;
                let h = frac * (step.s1 - step.s0);
                out.push(expm(&(g * Complex64::from(h))) * &v);
            }
            next += 1;
        }
        v = expm(&gh) * &v;
        Ok(())
    })?;
    while out.len() < times.len() {
        out.push(v.clone());
    }
    if out
        .iter()
        .any(|x| x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()))
    {
        return Err(Error::NonFinite);
    }
    Ok(out)
}

/// Dense output `v(t_i)` at `n_out` equally spaced parameters.
pub fn transport_trajectory(
    conn: &ConnectionSpec,
    path: &PathSpec,
    v0: &DVector<Complex64>,
    n_out: usize,
    tol: f64,
) -> Result<TransportTrajectory> {
    check_tol(tol)?;
    path.validate()?;
    if v0.len() != conn.rank() {
        return Err(Error::DimensionMismatch {
            expected: conn.rank(),
            found: v0.len(),
        });
    }
    if n_out < 2 {
        return Err(Error::InvalidPath(format!(
            "need at least 2 output samples, got {n_out}"
        )));
    }
    path_clearance(conn, path)?;
    let disc = Discretization::new(path);
    let times: Vec<f64> = (0..n_out).map(|i| i as f64 / (n_out - 1) as f64).collect();
    let (values, err, _, _) = refine(
        &disc,
        tol,
        |level| trajectory_at(conn, &disc, level, v0, &times),
        |a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max)
        },
    )?;
    Ok(TransportTrajectory {
        samples: times.into_iter().zip(values).collect(),
        error_estimate: err,
    })
}

/// Transport along `a` followed by `b`: matrix `b · a`, error estimates added.
pub fn compose_transport(a: &HolonomyResult, b: &HolonomyResult) -> Result<HolonomyResult> {
    if a.rank() != b.rank() {
        return Err(Error::DimensionMismatch {
            expected: a.rank(),
            found: b.rank(),
        });
    }
    Ok(HolonomyResult {
        matrix: &b.matrix * &a.matrix,
        error_estimate: a.error_estimate + b.error_estimate,
        steps_used: a.steps_used + b.steps_used,
        path_closed: a.path_closed && b.path_closed,
        min_pole_distance: a.min_pole_distance.min(b.min_pole_distance),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{reverse, PunctureSet};
    use crate::linalg::c;
    use std::f64::consts::PI;

    fn circle(cx: f64, cy: f64, r: f64) -> PathSpec {
        PathSpec::ccw_circle(PlanePoint::new(cx, cy), r).unwrap()
    }

    #[test]
    fn zero_connection_gives_identity() {
        let r =
            parallel_transport(&ConnectionSpec::zero(3), &circle(0.0, 0.0, 1.0), 1e-10).unwrap();
        assert_eq!(r.matrix, linalg::identity(3));
        assert_eq!(r.error_estimate, 0.0);
    }

    #[test]
    fn aharonov_bohm_phase() {
        let tol = 1e-10;
        let r = parallel_transport(
            &ConnectionSpec::aharonov_bohm(1.7),
            &circle(0.0, 0.0, 2.0),
            tol,
        )
        .unwrap();
        let expected = c(0.0, -1.7).exp();
        assert!((r.matrix[(0, 0)] - expected).norm() < 10.0 * tol);
        assert!(r.path_closed);
    }

    #[test]
    fn aharonov_casher_matrix() {
        let tol = 1e-10;
        let r = parallel_transport(
            &ConnectionSpec::aharonov_casher(0.3),
            &circle(0.0, 0.0, 1.0),
            tol,
        )
        .unwrap();
        let expected = linalg::diag(&[c(0.0, 0.3 * PI).exp(), c(0.0, -0.3 * PI).exp()]);
        assert!(linalg::dist(&r.matrix, &expected) < 10.0 * tol);
    }

    #[test]
    fn non_enclosing_loop_is_trivial() {
        let tol = 1e-9;
        let r = parallel_transport(
            &ConnectionSpec::aharonov_bohm(1.0),
            &circle(5.0, 0.0, 1.0),
            tol,
        )
        .unwrap();
        assert!((r.matrix[(0, 0)] - c(1.0, 0.0)).norm() < 10.0 * tol);
    }

    #[test]
    fn tolerance_range_is_enforced() {
        let conn = ConnectionSpec::aharonov_bohm(1.0);
        let p = circle(0.0, 0.0, 1.0);
        assert!(matches!(
            parallel_transport(&conn, &p, 1e-14),
            Err(Error::InvalidTolerance(_))
        ));
        assert!(matches!(
            parallel_transport(&conn, &p, 0.1),
            Err(Error::InvalidTolerance(_))
        ));
    }

    #[test]
    fn path_through_puncture_is_rejected() {
        let conn = ConnectionSpec::aharonov_bohm(1.0);
        let p = PathSpec::polyline(vec![PlanePoint::new(-1.0, 0.0), PlanePoint::new(1.0, 0.0)])
            .unwrap();
        assert!(matches!(
            parallel_transport(&conn, &p, 1e-8),
            Err(Error::PoleProximity { .. })
        ));
    }

    #[test]
    fn compose_with_identity() {
        let conn = ConnectionSpec::aharonov_casher(0.2);
        let r = parallel_transport(&conn, &circle(0.0, 0.0, 1.0), 1e-10).unwrap();
        let composed = compose_transport(&r, &HolonomyResult::identity(2)).unwrap();
        assert_eq!(composed.matrix, r.matrix);
        assert!(compose_transport(&r, &HolonomyResult::identity(3)).is_err());
    }

    #[test]
    fn path_then_reverse_is_identity() {
        let p =
            PunctureSet::unlabelled(vec![PlanePoint::ORIGIN, PlanePoint::new(2.0, 0.0)]).unwrap();
        let conn = ConnectionSpec::multi_solenoid(p, vec![0.7, -1.1]).unwrap();
        let path = PathSpec::polyline(vec![
            PlanePoint::new(-1.0, -0.6),
            PlanePoint::new(1.0, 1.0),
            PlanePoint::new(3.0, -0.5),
        ])
        .unwrap();
        let tol = 1e-10;
        let a = parallel_transport(&conn, &path, tol).unwrap();
        let b = parallel_transport(&conn, &reverse(&path), tol).unwrap();
        let both = compose_transport(&a, &b).unwrap();
        assert!((both.matrix[(0, 0)] - c(1.0, 0.0)).norm() < 10.0 * both.error_estimate + 1e-12);
    }

    #[test]
    fn quarter_circles_compose_to_half_circle() {
        let conn = ConnectionSpec::aharonov_casher(0.4);
        let o = PlanePoint::new(0.2, 0.1);
        let q1 = PathSpec::arc(o, 1.0, 0.0, PI / 2.0).unwrap();
        let q2 = PathSpec::arc(o, 1.0, PI / 2.0, PI / 2.0).unwrap();
        let half = PathSpec::arc(o, 1.0, 0.0, PI).unwrap();
        let tol = 1e-10;
        let a = parallel_transport(&conn, &q1, tol).unwrap();
        let b = parallel_transport(&conn, &q2, tol).unwrap();
        let h = parallel_transport(&conn, &half, tol).unwrap();
        let ab = compose_transport(&a, &b).unwrap();
        assert!(
            linalg::dist(&ab.matrix, &h.matrix)
                < 10.0 * (ab.error_estimate + h.error_estimate) + 1e-12
        );
    }

    #[test]
    fn trajectory_of_zero_connection_is_constant() {
        let v0 = DVector::from_vec(vec![c(1.0, 0.5), c(-0.3, 0.0)]);
        let tr = transport_trajectory(
            &ConnectionSpec::zero(2),
            &circle(0.0, 0.0, 1.0),
            &v0,
            11,
            1e-9,
        )
        .unwrap();
        assert_eq!(tr.samples.len(), 11);
        for (_, v) in &tr.samples {
            assert_eq!(v, &v0);
        }
    }

    #[test]
    fn trajectory_is_norm_preserving_and_matches_endpoint() {
        let conn = ConnectionSpec::aharonov_bohm(2.3);
        let path = circle(0.0, 0.0, 1.5);
        let tol = 1e-10;
        let v0 = DVector::from_vec(vec![c(0.6, 0.8)]);
        let tr = transport_trajectory(&conn, &path, &v0, 37, tol).unwrap();
        for (_, v) in &tr.samples {
            assert!((v.norm() - 1.0).abs() < 10.0 * tol);
        }
        let t = parallel_transport(&conn, &path, tol).unwrap();
        let end = &tr.samples.last().unwrap().1;
        assert!((end - &t.matrix * &v0).norm() < 10.0 * tol);
        // t is strictly increasing from 0 to 1
        assert_eq!(tr.samples[0].0, 0.0);
        assert_eq!(tr.samples[36].0, 1.0);
    }
}
