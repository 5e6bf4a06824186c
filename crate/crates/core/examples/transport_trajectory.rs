//! Dense output of a transported vector, printed as CSV.

use holonomy_lab::builtin;
use holonomy_lab::transport::transport_trajectory;
use holonomy_lab::Result;
use nalgebra::DVector;
use num_complex::Complex64;

pub fn run_example() -> Result<f64> {
    let v0 = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]);
    let traj = transport_trajectory(
        &builtin::aharonov_casher(),
        &builtin::unit_circle(),
        &v0,
        9,
        1e-10,
    )?;
    println!("t,re_v1,im_v1,re_v2,im_v2");
    let mut drift = 0.0f64;
    for (t, v) in &traj.samples {
        println!(
            "{t:.4},{:.10},{:.10},{:.10},{:.10}",
            v[0].re, v[0].im, v[1].re, v[1].im
        );
        drift = drift.max((v.norm() - v0.norm()).abs());
    }
    Ok(drift)
}

fn main() -> Result<()> {
    run_example()?;
    Ok(())
}
