//! Loops in the same class give the same holonomy; changing the class does not.

use holonomy_lab::builtin;
use holonomy_lab::geometry::{PathSpec, PlanePoint};
use holonomy_lab::linalg;
use holonomy_lab::{parallel_transport, Result};

pub fn run_example() -> Result<f64> {
    let tol = 1e-10;
    let conn = builtin::two_pole_noncommuting();
    let circle = parallel_transport(&conn, &builtin::big_circle(), tol)?.matrix;
    let square = parallel_transport(&conn, &builtin::big_square(), tol)?.matrix;
    // a wobbly loop through (2, 0) that still encloses both poles
    let wobbly = PathSpec::polyline(vec![
        PlanePoint::new(2.0, 0.0),
        PlanePoint::new(0.5, 3.0),
        PlanePoint::new(-2.5, 1.0),
        PlanePoint::new(-1.7, -0.4),
        PlanePoint::new(-2.2, -2.0),
        PlanePoint::new(0.2, -0.8),
        PlanePoint::new(2.0, 0.0),
    ])?;
    let other = parallel_transport(&conn, &wobbly, tol)?.matrix;
    let d1 = linalg::dist(&circle, &square);
    let d2 = linalg::dist(&circle, &other);
    println!("circle vs square {d1:.2e}");
    println!("circle vs wobbly loop {d2:.2e}");

    let right_only = PathSpec::circle(PlanePoint::new(1.0, 0.0), 1.0, 1, 0.0)?;
    let r = parallel_transport(&conn, &right_only, tol)?.matrix;
    println!(
        "circle vs loop around one pole {:.2e} (different class)",
        linalg::dist(&circle, &r)
    );
    Ok(d1.max(d2))
}

fn main() -> Result<()> {
    let worst = run_example()?;
    println!("worst deviation {worst:.2e}");
    Ok(())
}
