//! The rank-2 Aharonov-Casher holonomy `diag(e^{iπΛ}, e^{-iπΛ})`.

use std::f64::consts::PI;

use holonomy_lab::geometry::{PathSpec, PlanePoint};
use holonomy_lab::linalg::{self, c};
use holonomy_lab::{parallel_transport, ConnectionSpec, Result};

pub fn run_example() -> Result<f64> {
    let mut worst = 0.0f64;
    for lambda in [0.1, 0.3, 0.5, 1.25] {
        let conn = ConnectionSpec::aharonov_casher(lambda);
        // any loop winding once around the line charge gives the same matrix
        for path in [
            PathSpec::ccw_circle(PlanePoint::ORIGIN, 1.0)?,
            PathSpec::rectangle(-0.4, 2.0, -1.0, 0.3)?,
        ] {
            let t = parallel_transport(&conn, &path, 1e-10)?;
            let expected = linalg::diag(&[c(0.0, PI * lambda).exp(), c(0.0, -PI * lambda).exp()]);
            let dev = linalg::dist(&t.matrix, &expected);
            println!(
                "lambda={lambda:<5} steps={:<7} deviation={dev:.2e} unitarity={:.2e}",
                t.steps_used,
                t.unitarity_defect()
            );
            worst = worst.max(dev);
        }
    }
    Ok(worst)
}

fn main() -> Result<()> {
    let worst = run_example()?;
    println!("worst deviation {worst:.2e}");
    Ok(())
}
