//! Brute-force reference computations and the built-in verification suite.
//!
//! The fixed-step integrator here shares nothing with the adaptive transport
//! except the matrix exponential and the generator evaluation.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::builtin;
use crate::connection::{
    evaluate_generator, ym_energy, ConnectionSpec, GridRegion, LieBasis, POLE_GUARD,
};
use crate::error::{Error, Result};
use crate::geometry::{min_distance, PathSpec, PlanePoint};
use crate::linalg::{self, c, expm, CMat};
use crate::monodromy::{
    ab_phase_predict, abelian_oracle, generator_loops, monodromy_representation,
};
use crate::transport::parallel_transport;
use crate::wong::{verify_ad_rho, wong_transport, SpinState};

/// Smallest step count accepted by [`fine_step_transport`].
pub const MIN_FINE_STEPS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub quantity: String,
    pub main_value: CMat,
    pub oracle_value: CMat,
    pub deviation: f64,
    pub bound: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn new(
        quantity: impl Into<String>,
        main_value: CMat,
        oracle_value: CMat,
        bound: f64,
    ) -> Self {
        let deviation = linalg::dist(&main_value, &oracle_value);
        Self::with_deviation(quantity, main_value, oracle_value, deviation, bound)
    }

    pub fn with_deviation(
        quantity: impl Into<String>,
        main_value: CMat,
        oracle_value: CMat,
        deviation: f64,
        bound: f64,
    ) -> Self {
        Self {
            quantity: quantity.into(),
            main_value,
            oracle_value,
            deviation,
            bound,
            pass: deviation < bound,
        }
    }

    pub fn scalar(quantity: impl Into<String>, main: f64, oracle: f64, bound: f64) -> Self {
        Self::new(
            quantity,
            CMat::from_element(1, 1, c(main, 0.0)),
            CMat::from_element(1, 1, c(oracle, 0.0)),
            bound,
        )
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<32} deviation {:.3e}  bound {:.1e}  {}",
            self.quantity,
            self.deviation,
            self.bound,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

/// Product of `n` midpoint exponentials, the steps of each smooth piece
/// sharing its arc length in proportion.
pub fn uniform_midpoint_product(conn: &ConnectionSpec, path: &PathSpec, n: usize) -> Result<CMat> {
    path.validate()?;
    let punctures = conn.punctures();
    let d = min_distance(path, &punctures);
    if d <= POLE_GUARD {
        let point = punctures
            .points()
            .iter()
            .copied()
            .min_by(|a, b| path.distance_to(*a).total_cmp(&path.distance_to(*b)))
            .unwrap_or(PlanePoint::ORIGIN);
        return Err(Error::PoleProximity { point, distance: d });
    }
    let pieces = path.pieces();
    let total: f64 = pieces.iter().map(|p| p.length()).sum();
    let mut acc = linalg::identity(conn.rank());
    for piece in &pieces {
        let k = ((n as f64 * piece.length() / total).round() as usize).max(1);
        let h = 1.0 / k as f64;
        for i in 0..k {
            let s = (i as f64 + 0.5) * h;
            let g = evaluate_generator(conn, piece.point(s), piece.velocity(s))?;
            acc = expm(&(g * Complex64::from(h))) * acc;
        }
    }
    if !linalg::is_finite(&acc) {
        return Err(Error::NonFinite);
    }
    Ok(acc)
}

/// Non-adaptive reference transport with at least [`MIN_FINE_STEPS`] steps.
pub fn fine_step_transport(conn: &ConnectionSpec, path: &PathSpec, n_steps: usize) -> Result<CMat> {
    if n_steps < MIN_FINE_STEPS {
        return Err(Error::TooFewSteps {
            found: n_steps,
            min: MIN_FINE_STEPS,
        });
    }
    uniform_midpoint_product(conn, path, n_steps)
}

/// `ρ I0 ρ⁻¹`.
pub fn conjugation_oracle(rho: &CMat, i0: &CMat) -> Result<CMat> {
    Ok(rho * i0 * linalg::inverse(rho)?)
}

/// Runs the built-in suite at transport tolerance `tol`.
pub fn run_oracle_suite(tol: f64, seed: u64) -> Result<Vec<OracleReport>> {
    let mut out = Vec::new();
    let bound = (10.0 * tol).max(1e-8);

    // single solenoid
    let t = parallel_transport(&builtin::ab_solenoid(), &builtin::big_circle(), tol)?;
    out.push(OracleReport::new(
        "ab-phase",
        t.matrix,
        CMat::from_element(1, 1, c(0.0, -builtin::AB_FLUX).exp()),
        bound,
    ));

    // three solenoids, loop around the outer two only
    let three = builtin::three_solenoids();
    let ConnectionSpec::MultiSolenoid { punctures, fluxes } = &three else {
        unreachable!("three_solenoids is a solenoid spec")
    };
    let outer = PathSpec::polyline(vec![
        PlanePoint::new(-2.5, -1.0),
        PlanePoint::new(2.5, -1.0),
        PlanePoint::new(2.5, 1.0),
        PlanePoint::new(0.5, 1.0),
        PlanePoint::new(0.5, -0.5),
        PlanePoint::new(-0.5, -0.5),
        PlanePoint::new(-0.5, 1.0),
        PlanePoint::new(-2.5, 1.0),
        PlanePoint::new(-2.5, -1.0),
    ])?;
    let predicted = ab_phase_predict(fluxes, &outer, punctures)?;
    let t = parallel_transport(&three, &outer, tol)?;
    out.push(OracleReport::new(
        "multi-solenoid-phase",
        t.matrix,
        CMat::from_element(1, 1, predicted.phase),
        bound.max(1e-6),
    ));

    // Aharonov-Casher matrix
    let ac = builtin::aharonov_casher();
    let lam = builtin::AC_LAMBDA;
    let ac_rho = linalg::diag(&[
        c(0.0, TAU / 2.0 * lam).exp(),
        c(0.0, -TAU / 2.0 * lam).exp(),
    ]);
    let t = parallel_transport(&ac, &builtin::unit_circle(), tol)?;
    out.push(OracleReport::new(
        "ac-matrix",
        t.matrix,
        ac_rho.clone(),
        bound,
    ));

    // single pole against the closed form
    let single = builtin::single_pole();
    let ConnectionSpec::FuchsianLog { residues, .. } = &single else {
        unreachable!("single_pole is a Fuchsian spec")
    };
    let rep = monodromy_representation(&single, None, tol, false)?;
    out.push(OracleReport::new(
        "single-pole-generator",
        rep.generators["p"].clone(),
        abelian_oracle(residues, &[1])?,
        bound,
    ));

    // two poles, adaptive against fixed-step reference
    let two = builtin::two_pole_noncommuting();
    let loops = generator_loops(&two.punctures(), PlanePoint::new(0.0, -2.0))?;
    for (label, lasso) in &loops {
        let adaptive = parallel_transport(&two, lasso, tol)?.matrix;
        let reference = fine_step_transport(&two, lasso, MIN_FINE_STEPS)?;
        out.push(OracleReport::new(
            format!("two-pole-lasso-{label}"),
            adaptive,
            reference,
            bound.max(1e-7),
        ));
    }

    // homotopy invariance on the two-pole spec
    let circle = parallel_transport(&two, &builtin::big_circle(), tol)?.matrix;
    let square = parallel_transport(&two, &builtin::big_square(), tol)?.matrix;
    out.push(OracleReport::new(
        "circle-vs-square",
        circle,
        square,
        bound.max(1e-6),
    ));

    // spin transport against conjugation
    let su2 = LieBasis::su2();
    let i0 = SpinState::from_real_components(&su2, &[1.0, 0.0, 0.0])?;
    let w = wong_transport(&ac, &su2, &i0, &builtin::unit_circle(), tol)?;
    out.push(OracleReport::new(
        "ac-spin",
        w.final_state.matrix,
        conjugation_oracle(&ac_rho, &i0.matrix)?,
        bound,
    ));

    for (name, conn, path) in [
        ("ad-rho-ac", ac.clone(), builtin::unit_circle()),
        ("ad-rho-single-pole", single.clone(), builtin::unit_circle()),
        ("ad-rho-two-pole", two.clone(), builtin::big_circle()),
    ] {
        let rep = verify_ad_rho(&conn, &su2, &path, 20, tol, seed)?;
        out.push(OracleReport::with_deviation(
            name,
            CMat::from_element(1, 1, c(rep.max_deviation, 0.0)),
            CMat::from_element(1, 1, c(0.0, 0.0)),
            rep.max_deviation,
            rep.bound,
        ));
    }

    // field energy
    let region = GridRegion::new(0.0, 2.0, 0.0, 3.0, 200, 200)?;
    let e = ym_energy(&builtin::constant_field(), &region)?;
    let exact = builtin::FIELD_STRENGTH.powi(2) * 6.0;
    out.push(OracleReport::scalar(
        "constant-field-energy",
        e,
        exact,
        0.01 * exact,
    ));
    let flat_region = GridRegion::new(3.0, 5.0, -1.0, 1.0, 200, 200)?;
    let e = ym_energy(&builtin::three_solenoids(), &flat_region)?;
    out.push(OracleReport::scalar("flat-energy", e, 0.0, 1e-8));

    Ok(out)
}
