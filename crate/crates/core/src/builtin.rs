//! Named reference scenes shared by the oracle suite, the examples and the CLI.

use crate::connection::ConnectionSpec;
use crate::geometry::{PathSpec, PlanePoint, PunctureSet};
use crate::linalg::{self, c, CMat};

pub const AB_FLUX: f64 = 1.7;
pub const AC_LAMBDA: f64 = 0.3;
pub const FIELD_STRENGTH: f64 = 1.5;

pub fn ab_solenoid() -> ConnectionSpec {
    ConnectionSpec::aharonov_bohm(AB_FLUX)
}

/// Three solenoids on a line, labelled `a`, `b`, `c`.
pub fn three_solenoids() -> ConnectionSpec {
    let punctures = PunctureSet::new(
        vec![
            PlanePoint::new(-1.5, 0.0),
            PlanePoint::new(0.0, 0.0),
            PlanePoint::new(1.5, 0.0),
        ],
        vec!["a".into(), "b".into(), "c".into()],
    )
    .expect("distinct punctures");
    ConnectionSpec::multi_solenoid(punctures, vec![0.7, -1.3, 2.9]).expect("matching lengths")
}

pub fn aharonov_casher() -> ConnectionSpec {
    ConnectionSpec::aharonov_casher(AC_LAMBDA)
}

/// Single pole at the origin with a Hermitian traceless residue.
pub fn single_pole() -> ConnectionSpec {
    let r = hermitian_traceless(0.25, 0.1, -0.15);
    let p = PunctureSet::new(vec![PlanePoint::ORIGIN], vec!["p".into()]).expect("one puncture");
    ConnectionSpec::fuchsian_log(p, vec![r], vec![]).expect("valid residues")
}

/// Two poles at `(∓1, 0)` with non-commuting Hermitian traceless residues.
pub fn two_pole_noncommuting() -> ConnectionSpec {
    let r1 = hermitian_traceless(0.2, 0.1, 0.0);
    let r2 = hermitian_traceless(-0.1, 0.0, 0.15);
    let p = PunctureSet::new(
        vec![PlanePoint::new(-1.0, 0.0), PlanePoint::new(1.0, 0.0)],
        vec!["left".into(), "right".into()],
    )
    .expect("distinct punctures");
    ConnectionSpec::fuchsian_log(p, vec![r1, r2], vec![]).expect("valid residues")
}

pub fn constant_field() -> ConnectionSpec {
    ConnectionSpec::constant_field(FIELD_STRENGTH)
}

/// `[[z, x - iy], [x + iy, -z]]`.
pub fn hermitian_traceless(z: f64, x: f64, y: f64) -> CMat {
    linalg::from_row_major(2, &[c(z, 0.0), c(x, -y), c(x, y), c(-z, 0.0)]).expect("2x2 entries")
}

pub fn unit_circle() -> PathSpec {
    PathSpec::ccw_circle(PlanePoint::ORIGIN, 1.0).expect("positive radius")
}

/// Counterclockwise circle of radius 2 about the origin, starting at `(2, 0)`.
pub fn big_circle() -> PathSpec {
    PathSpec::ccw_circle(PlanePoint::ORIGIN, 2.0).expect("positive radius")
}

/// Counterclockwise square of half-width 2 about the origin, starting at `(2, 0)`.
pub fn big_square() -> PathSpec {
    PathSpec::polyline(vec![
        PlanePoint::new(2.0, 0.0),
        PlanePoint::new(2.0, 2.0),
        PlanePoint::new(-2.0, 2.0),
        PlanePoint::new(-2.0, -2.0),
        PlanePoint::new(2.0, -2.0),
        PlanePoint::new(2.0, 0.0),
    ])
    .expect("valid polyline")
}

/// Every named connection, in a fixed order.
pub fn all() -> Vec<(&'static str, ConnectionSpec)> {
    vec![
        ("ab", ab_solenoid()),
        ("three-solenoids", three_solenoids()),
        ("ac", aharonov_casher()),
        ("single-pole", single_pole()),
        ("two-pole", two_pole_noncommuting()),
        ("constant-field", constant_field()),
    ]
}

pub fn by_name(name: &str) -> Option<ConnectionSpec> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, c)| c)
}
