//! Holonomy representations of the fundamental group of the punctured plane.
//!
//! Generators are lassos: a straight spoke from the basepoint towards a
//! puncture, a full counterclockwise circle around it, and the spoke back.
//! They are keyed (and therefore ordered) by puncture label.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::connection::{max_pairwise_commutator, ConnectionSpec, POLE_GUARD};
use crate::error::{Error, Result};
use crate::geometry::{reverse, winding_number, PathSpec, Piece, PlanePoint, PunctureSet};
use crate::linalg::{self, expm, CMat, I};
use crate::transport::parallel_transport;

/// Lasso radius cap.
pub const MAX_LASSO_RADIUS: f64 = 0.5;
/// Residues whose commutators exceed this are rejected by [`abelian_oracle`].
pub const COMMUTING_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    pub rank: usize,
    pub basepoint: PlanePoint,
    pub generators: BTreeMap<String, CMat>,
    pub error_estimates: BTreeMap<String, f64>,
}

impl Representation {
    pub fn generator(&self, label: &str) -> Result<&CMat> {
        self.generators
            .get(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.generators.keys().map(String::as_str)
    }

    /// Largest unitarity defect over all generators.
    pub fn max_unitarity_defect(&self) -> f64 {
        self.generators
            .values()
            .map(linalg::unitarity_defect)
            .fold(0.0, f64::max)
    }
}

/// Element of the free group on generator labels; letters are applied left
/// to right along the loop.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LoopWord {
    pub letters: Vec<(String, i8)>,
}

impl LoopWord {
    pub fn new(letters: Vec<(String, i8)>) -> Self {
        Self { letters }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn inverse(&self) -> Self {
        Self {
            letters: self
                .letters
                .iter()
                .rev()
                .map(|(l, e)| (l.clone(), -e))
                .collect(),
        }
    }

    /// Net exponent of each label.
    pub fn exponent_sums(&self) -> BTreeMap<String, i64> {
        let mut out = BTreeMap::new();
        for (l, e) in &self.letters {
            *out.entry(l.clone()).or_insert(0) += *e as i64;
        }
        out
    }
}

impl FromStr for LoopWord {
    type Err = Error;

    /// Parses whitespace-separated letters such as `a b^-1 a`.
    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (label, exp) = match tok.split_once('^') {
                Some((l, "1")) | Some((l, "+1")) => (l, 1),
                Some((l, "-1")) => (l, -1),
                Some(_) => return Err(Error::UnknownLabel(tok.to_string())),
                None => (tok, 1),
            };
            if label.is_empty() {
                return Err(Error::UnknownLabel(tok.to_string()));
            }
            letters.push((label.to_string(), exp));
        }
        Ok(Self { letters })
    }
}

impl fmt::Display for LoopWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|(l, e)| {
                if *e == 1 {
                    l.clone()
                } else {
                    format!("{l}^-1")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn lasso_radii(punctures: &PunctureSet) -> Result<Vec<f64>> {
    let pts = punctures.points();
    pts.iter()
        .enumerate()
        .map(|(j, &zj)| {
            let nearest = pts
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &zk)| zk.distance(zj))
                .fold(f64::INFINITY, f64::min);
            let r = (0.5 * nearest).min(MAX_LASSO_RADIUS);
            if r <= POLE_GUARD {
                return Err(Error::DegenerateConfiguration(format!(
                    "puncture `{}` is {nearest:.3e} from its neighbour",
                    punctures.labels()[j]
                )));
            }
            Ok(r)
        })
        .collect()
}

/// Checks that every spoke from `basepoint` stays clear of the other lasso discs.
fn spokes_clear(punctures: &PunctureSet, radii: &[f64], basepoint: PlanePoint) -> bool {
    let pts = punctures.points();
    pts.iter().enumerate().all(|(j, &zj)| {
        if basepoint.distance(zj) <= radii[j] * (1.0 + 1e-9) {
            return false;
        }
        let spoke = Piece::Segment {
            from: basepoint,
            to: zj,
        };
        pts.iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .all(|(k, &zk)| spoke.distance_to(zk) > 0.5 * radii[k])
    })
}

/// Basepoint left of the punctures' bounding box, shifted vertically until
/// every spoke clears the other punctures.
pub fn default_basepoint(punctures: &PunctureSet) -> Result<PlanePoint> {
    if punctures.is_empty() {
        return Err(Error::NoPunctures);
    }
    let radii = lasso_radii(punctures)?;
    let xs = punctures.points().iter().map(|p| p.x);
    let ys = punctures.points().iter().map(|p| p.y);
    let xmin = xs.fold(f64::INFINITY, f64::min);
    let (ymin, ymax) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| {
        (lo.min(y), hi.max(y))
    });
    let ymid = 0.5 * (ymin + ymax);
    let step = 0.173 * (ymax - ymin + 1.0);
    for k in 0..200i32 {
        let offset = if k % 2 == 0 { k / 2 } else { -(k + 1) / 2 };
        let b = PlanePoint::new(xmin - 1.0, ymid + offset as f64 * step);
        if spokes_clear(punctures, &radii, b) {
            return Ok(b);
        }
    }
    Err(Error::DegenerateConfiguration(
        "no basepoint found with clear spokes".into(),
    ))
}

/// One lasso per puncture, keyed by label.
pub fn generator_loops(
    punctures: &PunctureSet,
    basepoint: PlanePoint,
) -> Result<BTreeMap<String, PathSpec>> {
    let radii = lasso_radii(punctures)?;
    if !basepoint.is_finite() {
        return Err(Error::DegenerateConfiguration(
            "non-finite basepoint".into(),
        ));
    }
    if !spokes_clear(punctures, &radii, basepoint) {
        return Err(Error::DegenerateConfiguration(
            "basepoint lies inside a lasso disc or a spoke passes too close to another puncture"
                .into(),
        ));
    }
    let mut out = BTreeMap::new();
    for ((label, zj), r) in punctures.iter().zip(&radii) {
        let dir = basepoint - zj;
        let angle = dir.y.atan2(dir.x);
        let foot = PlanePoint::new(zj.x + r * angle.cos(), zj.y + r * angle.sin());
        let spoke = PathSpec::polyline(vec![basepoint, foot])?;
        let circle = PathSpec::Circle {
            center: zj,
            radius: *r,
            turns: 1,
            start_angle: angle,
        };
        let lasso = PathSpec::concat_all(vec![spoke.clone(), circle, reverse(&spoke)])?;
        out.insert(label.to_string(), lasso);
    }
    Ok(out)
}

/// Transports every generator lasso of a flat connection.
///
/// Custom samplers are rejected unless `assume_flat` is set.
pub fn monodromy_representation(
    conn: &ConnectionSpec,
    basepoint: Option<PlanePoint>,
    tol: f64,
    assume_flat: bool,
) -> Result<Representation> {
    conn.validate()?;
    if matches!(conn, ConnectionSpec::Custom(_)) && !assume_flat {
        return Err(Error::FlatnessNotAcknowledged);
    }
    let punctures = conn.punctures();
    if punctures.is_empty() {
        return Err(Error::NoPunctures);
    }
    let basepoint = match basepoint {
        Some(b) => b,
        None => default_basepoint(&punctures)?,
    };
    let loops = generator_loops(&punctures, basepoint)?;
    let transported: Vec<(String, CMat, f64)> = loops
        .par_iter()
        .map(|(label, path)| {
            let r = parallel_transport(conn, path, tol)?;
            Ok((label.clone(), r.matrix, r.error_estimate))
        })
        .collect::<Result<_>>()?;
    let mut generators = BTreeMap::new();
    let mut error_estimates = BTreeMap::new();
    for (label, m, e) in transported {
        generators.insert(label.clone(), m);
        error_estimates.insert(label, e);
    }
    Ok(Representation {
        rank: conn.rank(),
        basepoint,
        generators,
        error_estimates,
    })
}

/// `exp(2πi Σ_j w_j R_j)` for pairwise commuting residues.
pub fn abelian_oracle(residues: &[CMat], windings: &[i64]) -> Result<CMat> {
    if residues.len() != windings.len() {
        return Err(Error::DimensionMismatch {
            expected: residues.len(),
            found: windings.len(),
        });
    }
    let Some(first) = residues.first() else {
        return Err(Error::InvalidConnection("no residues".into()));
    };
    let m = first.nrows();
    if let Some(bad) = residues.iter().find(|r| r.shape() != (m, m)) {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: bad.nrows(),
        });
    }
    let norm = max_pairwise_commutator(residues);
    if norm > COMMUTING_TOL {
        return Err(Error::NonCommutingResidues { norm });
    }
    let sum = residues
        .iter()
        .zip(windings)
        .fold(linalg::zeros(m), |acc, (r, &w)| {
            acc + r * Complex64::from(w as f64)
        });
    Ok(expm(&(sum * (I * TAU))))
}

/// Product of generator matrices along the word, later letters on the left.
pub fn evaluate_word(rep: &Representation, word: &LoopWord) -> Result<CMat> {
    let mut acc = linalg::identity(rep.rank);
    for (label, exp) in &word.letters {
        let g = rep.generator(label)?;
        let factor = if *exp >= 0 {
            g.clone()
        } else {
            linalg::inverse(g)?
        };
        acc = factor * acc;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbPhase {
    pub phase: Complex64,
    pub windings: Vec<i64>,
}

/// Predicted Aharonov-Bohm factor `exp(-i Σ_j w_j Φ_j)` from winding numbers alone.
pub fn ab_phase_predict(
    fluxes: &[f64],
    loop_path: &PathSpec,
    punctures: &PunctureSet,
) -> Result<AbPhase> {
    if fluxes.len() != punctures.len() {
        return Err(Error::DimensionMismatch {
            expected: punctures.len(),
            found: fluxes.len(),
        });
    }
    let windings = punctures
        .points()
        .iter()
        .map(|&p| winding_number(loop_path, p))
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = windings
        .iter()
        .zip(fluxes)
        .map(|(&w, &phi)| w as f64 * phi)
        .sum();
    Ok(AbPhase {
        phase: Complex64::from_polar(1.0, -total),
        windings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use std::f64::consts::PI;

    fn pts(v: &[(f64, f64)]) -> PunctureSet {
        PunctureSet::unlabelled(v.iter().map(|&(x, y)| PlanePoint::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn single_lasso_winds_once() {
        let p = pts(&[(0.0, 0.0)]);
        let loops = generator_loops(&p, PlanePoint::new(-2.0, 0.0)).unwrap();
        assert_eq!(loops.len(), 1);
        let lasso = &loops["z1"];
        assert!(lasso.is_closed());
        assert_eq!(winding_number(lasso, PlanePoint::ORIGIN).unwrap(), 1);
    }

    #[test]
    fn two_lassos_have_unit_winding_vectors() {
        let p = pts(&[(-1.0, 0.0), (1.0, 0.0)]);
        let loops = generator_loops(&p, PlanePoint::new(0.0, -3.0)).unwrap();
        let w1: Vec<i64> = p
            .points()
            .iter()
            .map(|&q| winding_number(&loops["z1"], q).unwrap())
            .collect();
        let w2: Vec<i64> = p
            .points()
            .iter()
            .map(|&q| winding_number(&loops["z2"], q).unwrap())
            .collect();
        assert_eq!(w1, vec![1, 0]);
        assert_eq!(w2, vec![0, 1]);
    }

    #[test]
    fn close_punctures_are_degenerate() {
        let p = pts(&[(0.0, 0.0), (1.5e-9, 0.0)]);
        assert!(matches!(
            generator_loops(&p, PlanePoint::new(-2.0, 0.0)),
            Err(Error::DegenerateConfiguration(_))
        ));
    }

    #[test]
    fn default_basepoint_avoids_collinear_spokes() {
        let p = pts(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let b = default_basepoint(&p).unwrap();
        let loops = generator_loops(&p, b).unwrap();
        for (k, label) in ["z1", "z2", "z3"].iter().enumerate() {
            for (j, &q) in p.points().iter().enumerate() {
                let w = winding_number(&loops[*label], q).unwrap();
                assert_eq!(w, i64::from(j == k));
            }
        }
    }

    #[test]
    fn solenoid_generators() {
        let (a, b) = (0.9, -2.1);
        let conn =
            ConnectionSpec::multi_solenoid(pts(&[(-1.0, 0.0), (1.0, 0.0)]), vec![a, b]).unwrap();
        let tol = 1e-10;
        let rep = monodromy_representation(&conn, None, tol, false).unwrap();
        assert!((rep.generators["z1"][(0, 0)] - c(0.0, -a).exp()).norm() < 1e-8);
        assert!((rep.generators["z2"][(0, 0)] - c(0.0, -b).exp()).norm() < 1e-8);
    }

    #[test]
    fn zero_residues_give_identity() {
        let p = pts(&[(0.0, 0.0), (2.0, 1.0)]);
        let conn =
            ConnectionSpec::fuchsian_log(p, vec![linalg::zeros(2), linalg::zeros(2)], vec![])
                .unwrap();
        let rep = monodromy_representation(&conn, None, 1e-9, false).unwrap();
        for g in rep.generators.values() {
            assert!(linalg::dist(g, &linalg::identity(2)) < 1e-14);
        }
    }

    #[test]
    fn diagonal_residue_generator() {
        let tol = 1e-10;
        let r = linalg::diag(&[c(0.2, 0.0), c(-0.1, 0.0)]);
        let conn = ConnectionSpec::fuchsian_log(pts(&[(0.0, 0.0)]), vec![r], vec![]).unwrap();
        let rep =
            monodromy_representation(&conn, Some(PlanePoint::new(-2.0, 0.0)), tol, false).unwrap();
        let expected = linalg::diag(&[c(0.0, 0.4 * PI).exp(), c(0.0, -0.2 * PI).exp()]);
        assert!(linalg::dist(&rep.generators["z1"], &expected) < 10.0 * tol);
    }

    #[test]
    fn custom_needs_acknowledgement() {
        let conn = ConnectionSpec::custom(
            1,
            pts(&[(0.0, 0.0)]),
            |_| linalg::zeros(1),
            |_| linalg::zeros(1),
        );
        assert!(matches!(
            monodromy_representation(&conn, None, 1e-8, false),
            Err(Error::FlatnessNotAcknowledged)
        ));
        assert!(monodromy_representation(&conn, None, 1e-8, true).is_ok());
    }

    #[test]
    fn abelian_oracle_examples() {
        let phi = 1.3;
        let lam = CMat::from_element(1, 1, c(-phi / TAU, 0.0));
        let e = abelian_oracle(std::slice::from_ref(&lam), &[1]).unwrap();
        assert!((e[(0, 0)] - c(0.0, -phi).exp()).norm() < 1e-14);
        let z = abelian_oracle(&[lam.clone(), lam], &[0, 0]).unwrap();
        assert!((z[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        // residue (Λ/2)σ₃ reproduces exp(iπΛσ₃)
        let l = 0.3;
        let q = linalg::diag(&[c(l / 2.0, 0.0), c(-l / 2.0, 0.0)]);
        let ac = abelian_oracle(&[q], &[1]).unwrap();
        let expected = linalg::diag(&[c(0.0, PI * l).exp(), c(0.0, -PI * l).exp()]);
        assert!(linalg::dist(&ac, &expected) < 1e-14);
    }

    #[test]
    fn abelian_oracle_rejects_noncommuting() {
        let su2 = crate::connection::LieBasis::su2();
        let g = su2.generators();
        assert!(matches!(
            abelian_oracle(&[g[0].clone(), g[1].clone()], &[1, 1]),
            Err(Error::NonCommutingResidues { .. })
        ));
    }

    #[test]
    fn word_parsing_and_evaluation() {
        let mut generators = BTreeMap::new();
        generators.insert("a".to_string(), linalg::diag(&[c(0.0, 1.0)]));
        generators.insert("b".to_string(), linalg::diag(&[c(2.0, 0.0)]));
        let rep = Representation {
            rank: 1,
            basepoint: PlanePoint::ORIGIN,
            generators,
            error_estimates: BTreeMap::new(),
        };
        let id = evaluate_word(&rep, &LoopWord::empty()).unwrap();
        assert_eq!(id, linalg::identity(1));
        let w: LoopWord = "a a^-1".parse().unwrap();
        assert!(linalg::dist(&evaluate_word(&rep, &w).unwrap(), &id) < 1e-15);
        let w: LoopWord = "a b b a".parse().unwrap();
        assert!((evaluate_word(&rep, &w).unwrap()[(0, 0)] - c(-4.0, 0.0)).norm() < 1e-14);
        assert_eq!(w.to_string(), "a b b a");
        assert!(matches!(
            evaluate_word(&rep, &"c".parse().unwrap()),
            Err(Error::UnknownLabel(_))
        ));
        assert!("a^2".parse::<LoopWord>().is_err());
    }

    #[test]
    fn ab_phase_examples() {
        let p = pts(&[(0.0, 0.0), (3.0, 0.0), (0.0, 0.5)]);
        let fluxes = [0.4, 1.1, -0.7];
        let around_1_3 = PathSpec::ccw_circle(PlanePoint::ORIGIN, 1.0).unwrap();
        let got = ab_phase_predict(&fluxes, &around_1_3, &p).unwrap();
        assert_eq!(got.windings, vec![1, 0, 1]);
        assert!((got.phase - c(0.0, -(0.4 - 0.7)).exp()).norm() < 1e-15);
        let far = PathSpec::ccw_circle(PlanePoint::new(10.0, 10.0), 1.0).unwrap();
        assert_eq!(
            ab_phase_predict(&fluxes, &far, &p).unwrap().phase,
            c(1.0, 0.0)
        );
    }

    #[test]
    fn figure_eight_cancels_equal_fluxes() {
        let p = pts(&[(-1.0, 0.0), (1.0, 0.0)]);
        let o = PlanePoint::ORIGIN;
        let left = PathSpec::Circle {
            center: PlanePoint::new(-1.0, 0.0),
            radius: 1.0,
            turns: 1,
            start_angle: 0.0,
        };
        let right = PathSpec::Circle {
            center: PlanePoint::new(1.0, 0.0),
            radius: 1.0,
            turns: -1,
            start_angle: PI,
        };
        let eight = PathSpec::concat_all(vec![left, right]).unwrap();
        assert!(eight.start_point().distance(o) < 1e-15);
        let got = ab_phase_predict(&[0.8, 0.8], &eight, &p).unwrap();
        assert_eq!(got.windings, vec![1, -1]);
        assert!((got.phase - c(1.0, 0.0)).norm() < 1e-15);
    }
}
