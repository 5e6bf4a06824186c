#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Conjugacy classes of unitary representations of `Z` and `Z/2`.
//!
//! A representation of `Z` is one unitary matrix; up to conjugation it is its
//! eigenphase multiset. A representation of `Z/2` is an involution, fixed up
//! to conjugation by how many eigenvalues are `+1` and how many are `-1`.

use std::f64::consts::TAU;

use crate::connection::ConnectionSpec;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::monodromy::monodromy_representation;

#[derive(Debug, Clone, PartialEq)]
pub struct VacuumClassCyclic {
    /// Sorted ascending, each in `[0, 2π)`.
    pub eigenphases: Vec<f64>,
}

impl VacuumClassCyclic {
    /// Bottleneck distance on the circle between the two phase multisets;
    /// infinite if their sizes differ.
    pub fn distance(&self, other: &Self) -> f64 {
        circular_bottleneck(&self.eigenphases, &other.eigenphases)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VacuumClassZ2 {
    /// Multiplicity of the trivial representation (eigenvalue `+1`).
    pub plus: usize,
    /// Multiplicity of the sign representation (eigenvalue `-1`).
    pub minus: usize,
}

impl VacuumClassZ2 {
    pub fn rank(&self) -> usize {
        self.plus + self.minus
    }
}

/// Distance between two angles measured along the circle.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn reduce_phase(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

// Both inputs sorted ascending. For points on a circle the optimal
// bottleneck matching is one of the cyclic shifts.
fn circular_bottleneck(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let m = a.len();
    if m == 0 {
        return 0.0;
    }
    (0..m)
        .map(|k| {
            (0..m)
                .map(|i| circle_distance(a[i], b[(i + k) % m]))
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

fn require_unitary(u: &CMat, tol: f64) -> Result<()> {
    let defect = linalg::unitarity_defect(u);
    if !(defect < tol) {
        return Err(Error::NotUnitary { defect });
    }
    Ok(())
}

/// Sorted eigenphases of a unitary matrix.
pub fn canonical_vacuum_cyclic(u: &CMat, tol: f64) -> Result<VacuumClassCyclic> {
    require_unitary(u, tol)?;
    let mut eigenphases: Vec<f64> = linalg::eigenvalues(u)
        .into_iter()
        .map(|z| reduce_phase(z.arg()))
        .collect();
    eigenphases.sort_by(f64::total_cmp);
    Ok(VacuumClassCyclic { eigenphases })
}

/// Whether `u` and `v` are conjugate in `U(m)`.
pub fn equivalent_reps_cyclic(u: &CMat, v: &CMat, tol: f64) -> Result<bool> {
    if u.nrows() != v.nrows() {
        return Err(Error::DimensionMismatch {
            expected: u.nrows(),
            found: v.nrows(),
        });
    }
    let a = canonical_vacuum_cyclic(u, tol)?;
    let b = canonical_vacuum_cyclic(v, tol)?;
    Ok(a.distance(&b) < tol)
}

/// Multiplicities of `±1` in an involutive unitary.
pub fn classify_z2(u: &CMat, tol: f64) -> Result<VacuumClassZ2> {
    require_unitary(u, tol)?;
    let m = u.nrows();
    let defect = linalg::dist(&(u * u), &linalg::identity(m));
    if !(defect < tol) {
        return Err(Error::NotInvolution { defect });
    }
    let mut plus = 0;
    for z in linalg::eigenvalues(u) {
        let snapped = if z.re >= 0.0 { 1.0 } else { -1.0 };
        let residual = (z - snapped).norm();
        if !(residual < tol) {
            return Err(Error::NotInvolution { defect: residual });
        }
        if snapped > 0.0 {
            plus += 1;
        }
    }
    Ok(VacuumClassZ2 {
        plus,
        minus: m - plus,
    })
}

/// All `m + 1` classes `(i, m - i)`, `i = 0..=m`.
pub fn enumerate_vacua_z2(m: usize) -> Vec<VacuumClassZ2> {
    (0..=m)
        .map(|plus| VacuumClassZ2 {
            plus,
            minus: m - plus,
        })
        .collect()
}

/// Class of the monodromy around the single puncture of `conn`.
pub fn vacuum_from_connection(conn: &ConnectionSpec, tol: f64) -> Result<VacuumClassCyclic> {
    let n = conn.punctures().len();
    if n != 1 {
        return Err(Error::InvalidPunctures(format!(
            "expected exactly one puncture, found {n}"
        )));
    }
    let rep = monodromy_representation(conn, None, tol, false)?;
    let g = rep
        .generators
        .values()
        .next()
        .expect("one generator per puncture");
    canonical_vacuum_cyclic(g, 10.0 * tol)
}

/// Phase `(−flux) mod 2π` acquired around a single solenoid.
pub fn solenoid_phase(flux: f64) -> f64 {
    reduce_phase(-flux)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn phases(d: &[f64]) -> CMat {
        linalg::diag(&d.iter().map(|&t| c(0.0, t).exp()).collect::<Vec<_>>())
    }

    #[test]
    fn identity_class() {
        let v = canonical_vacuum_cyclic(&linalg::identity(2), 1e-10).unwrap();
        assert_eq!(v.eigenphases, vec![0.0, 0.0]);
    }

    #[test]
    fn negative_phase_reduces() {
        let v = canonical_vacuum_cyclic(&phases(&[PI / 3.0, -PI / 3.0]), 1e-10).unwrap();
        assert!((v.eigenphases[0] - PI / 3.0).abs() < 1e-14);
        assert!((v.eigenphases[1] - 5.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn conjugated_torus_element() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let h = random_unitary(&mut rng, 2);
        let u = &h * phases(&[0.4, 2.2]) * h.adjoint();
        let v = canonical_vacuum_cyclic(&u, 1e-10).unwrap();
        assert!((v.eigenphases[0] - 0.4).abs() < 1e-8);
        assert!((v.eigenphases[1] - 2.2).abs() < 1e-8);
    }

    #[test]
    fn non_unitary_is_rejected() {
        let a = linalg::diag(&[c(2.0, 0.0)]);
        assert!(matches!(
            canonical_vacuum_cyclic(&a, 1e-8),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn equivalence_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_unitary(&mut rng, 3);
        let u = random_unitary(&mut rng, 3);
        let conj = &s * &u * s.adjoint();
        assert!(equivalent_reps_cyclic(&u, &conj, 1e-8).unwrap());
        assert!(equivalent_reps_cyclic(&phases(&[0.0, 1.0]), &phases(&[1.0, 0.0]), 1e-8).unwrap());
        assert!(!equivalent_reps_cyclic(&phases(&[0.0, 1.0]), &phases(&[0.0, 2.0]), 1e-8).unwrap());
        assert!(matches!(
            equivalent_reps_cyclic(&linalg::identity(2), &linalg::identity(3), 1e-8),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn phases_across_the_seam_match() {
        let a = phases(&[1e-12, 1.0]);
        let b = phases(&[-1e-12, 1.0]);
        assert!(equivalent_reps_cyclic(&a, &b, 1e-9).unwrap());
    }

    #[test]
    fn z2_examples() {
        assert_eq!(
            classify_z2(&linalg::identity(3), 1e-10).unwrap(),
            VacuumClassZ2 { plus: 3, minus: 0 }
        );
        let d = linalg::diag(&[c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(
            classify_z2(&d, 1e-10).unwrap(),
            VacuumClassZ2 { plus: 1, minus: 2 }
        );
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = random_unitary(&mut rng, 2);
        let u = &h * linalg::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]) * h.adjoint();
        assert_eq!(
            classify_z2(&u, 1e-10).unwrap(),
            VacuumClassZ2 { plus: 1, minus: 1 }
        );
    }

    #[test]
    fn z2_rejects_non_involution() {
        assert!(matches!(
            classify_z2(&phases(&[0.5]), 1e-8),
            Err(Error::NotInvolution { .. })
        ));
    }

    #[test]
    fn z2_enumeration() {
        let three = enumerate_vacua_z2(3);
        let pairs: Vec<(usize, usize)> = three.iter().map(|v| (v.plus, v.minus)).collect();
        assert_eq!(pairs, vec![(0, 3), (1, 2), (2, 1), (3, 0)]);
        assert_eq!(enumerate_vacua_z2(1).len(), 2);
        assert_eq!(
            enumerate_vacua_z2(0),
            vec![VacuumClassZ2 { plus: 0, minus: 0 }]
        );
    }

    #[test]
    fn vacua_of_single_puncture_specs() {
        let phi = 1.7;
        let v = vacuum_from_connection(&ConnectionSpec::aharonov_bohm(phi), 1e-10).unwrap();
        assert!(circle_distance(v.eigenphases[0], TAU - phi) < 1e-8);
        let v = vacuum_from_connection(&ConnectionSpec::aharonov_casher(0.5), 1e-10).unwrap();
        assert!((v.eigenphases[0] - PI / 2.0).abs() < 1e-8);
        assert!((v.eigenphases[1] - 3.0 * PI / 2.0).abs() < 1e-8);
        let v = vacuum_from_connection(&ConnectionSpec::aharonov_bohm(0.0), 1e-10).unwrap();
        assert!(circle_distance(v.eigenphases[0], 0.0) < 1e-12);
    }
}
