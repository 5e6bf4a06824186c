//! Field energy of a flat and of a uniformly curved connection.

use holonomy_lab::builtin;
use holonomy_lab::connection::{curvature_fd, ym_energy};
use holonomy_lab::geometry::PlanePoint;
use holonomy_lab::{GridRegion, Result};

pub fn run_example() -> Result<f64> {
    let flat = ym_energy(
        &builtin::three_solenoids(),
        &GridRegion::new(3.0, 5.0, -1.0, 1.0, 200, 200)?,
    )?;
    println!("solenoids, puncture-free rectangle: {flat:.3e}");

    let b = builtin::FIELD_STRENGTH;
    let curv = curvature_fd(&builtin::constant_field(), PlanePoint::new(0.3, -0.7), 1e-3)?;
    println!("constant field curvature at a point: {:.6}", curv[(0, 0)]);
    let mut worst = flat;
    for n in [50, 100, 200] {
        let e = ym_energy(
            &builtin::constant_field(),
            &GridRegion::new(0.0, 2.0, 0.0, 3.0, n, n)?,
        )?;
        let rel = (e - b * b * 6.0).abs() / (b * b * 6.0);
        println!("constant field, {n}x{n}: {e:.8} (relative error {rel:.1e})");
        worst = worst.max(rel);
    }
    Ok(worst)
}

fn main() -> Result<()> {
    run_example()?;
    Ok(())
}
