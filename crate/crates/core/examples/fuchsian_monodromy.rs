//! Monodromy representation of a two-pole system with non-commuting residues.
//!
//! Checks the generators against a fixed-step reference integration, the
//! relation between a big loop and the product of lassos, and gauge
//! covariance under a random unitary change of frame.

use holonomy_lab::builtin;
use holonomy_lab::geometry::{PathSpec, PlanePoint};
use holonomy_lab::linalg::{self, random_unitary};
use holonomy_lab::monodromy::{evaluate_word, generator_loops, monodromy_representation, LoopWord};
use holonomy_lab::oracle::{fine_step_transport, MIN_FINE_STEPS};
use holonomy_lab::{parallel_transport, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<f64> {
    let tol = 1e-10;
    let conn = builtin::two_pole_noncommuting();
    let base = PlanePoint::new(0.0, -2.0);
    let rep = monodromy_representation(&conn, Some(base), tol, false)?;
    let mut worst = 0.0f64;

    let loops = generator_loops(&conn.punctures(), base)?;
    for (label, g) in &rep.generators {
        let reference = fine_step_transport(&conn, &loops[label], MIN_FINE_STEPS)?;
        let dev = linalg::dist(g, &reference);
        println!("generator {label:<6} vs fixed-step reference {dev:.2e}");
        worst = worst.max(dev);
    }

    // from below, a counterclockwise loop around both poles passes the
    // right pole first
    let big = PathSpec::concat_all(vec![
        PathSpec::polyline(vec![
            base,
            PlanePoint::new(3.0, -2.0),
            PlanePoint::new(3.0, 2.0),
        ])?,
        PathSpec::polyline(vec![
            PlanePoint::new(3.0, 2.0),
            PlanePoint::new(-3.0, 2.0),
            PlanePoint::new(-3.0, -2.0),
            base,
        ])?,
    ])?;
    let around = parallel_transport(&conn, &big, tol)?.matrix;
    let word: LoopWord = "right left".parse()?;
    let dev = linalg::dist(&around, &evaluate_word(&rep, &word)?);
    println!("big loop vs word `{word}` {dev:.2e}");
    worst = worst.max(dev);

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let h = random_unitary(&mut rng, 2);
    let moved = monodromy_representation(&conn.conjugated(&h)?, Some(base), tol, false)?;
    for (label, g) in &rep.generators {
        let dev = linalg::dist(&moved.generators[label], &(&h * g * h.adjoint()));
        println!("gauge covariance {label:<6} {dev:.2e}");
        worst = worst.max(dev);
    }
    Ok(worst)
}

fn main() -> Result<()> {
    let worst = run_example()?;
    println!("worst deviation {worst:.2e}");
    Ok(())
}
