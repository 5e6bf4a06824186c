//! Phase acquired around one or several thin solenoids.
//!
//! Transports a scalar around loops of different shapes and winding and
//! compares with `exp(-i Σ w_j Φ_j)` predicted from winding numbers.

use holonomy_lab::builtin;
use holonomy_lab::geometry::{PathSpec, PlanePoint};
use holonomy_lab::monodromy::ab_phase_predict;
use holonomy_lab::{parallel_transport, ConnectionSpec, Result};
use num_complex::Complex64;

pub fn run_example() -> Result<f64> {
    let tol = 1e-10;
    let mut worst = 0.0f64;

    let single = builtin::ab_solenoid();
    for (radius, turns) in [(0.5, 1), (2.0, 1), (3.0, 2), (1.0, -1)] {
        let path = PathSpec::circle(PlanePoint::ORIGIN, radius, turns, 0.3)?;
        let t = parallel_transport(&single, &path, tol)?;
        let expected = Complex64::new(0.0, -builtin::AB_FLUX * turns as f64).exp();
        let dev = (t.matrix[(0, 0)] - expected).norm();
        println!(
            "r={radius:<4} turns={turns:<3} phase={:.10} deviation={dev:.2e}",
            t.matrix[(0, 0)]
        );
        worst = worst.max(dev);
    }

    let three = builtin::three_solenoids();
    let ConnectionSpec::MultiSolenoid { punctures, fluxes } = &three else {
        unreachable!()
    };
    // encloses `a` and `b`, not `c`
    let loop_ab = PathSpec::rectangle(-2.5, 0.75, -1.0, 1.0)?;
    let pred = ab_phase_predict(fluxes, &loop_ab, punctures)?;
    let t = parallel_transport(&three, &loop_ab, tol)?;
    let dev = (t.matrix[(0, 0)] - pred.phase).norm();
    println!(
        "windings {:?} predicted {:.10} deviation={dev:.2e}",
        pred.windings, pred.phase
    );
    Ok(worst.max(dev))
}

fn main() -> Result<()> {
    let worst = run_example()?;
    println!("worst deviation {worst:.2e}");
    Ok(())
}
