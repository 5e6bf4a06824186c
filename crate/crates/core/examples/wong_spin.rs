//! Spin transport along a loop, compared with conjugation by the holonomy.

use holonomy_lab::builtin;
use holonomy_lab::wong::{verify_ad_rho, wong_transport, wong_transport_components, SpinState};
use holonomy_lab::{LieBasis, Result};

pub fn run_example() -> Result<f64> {
    let tol = 1e-9;
    let su2 = LieBasis::su2();
    let mut worst = 0.0f64;

    let ac = builtin::aharonov_casher();
    let i0 = SpinState::from_real_components(&su2, &[1.0, 0.0, 0.0])?;
    let w = wong_transport(&ac, &su2, &i0, &builtin::unit_circle(), tol)?;
    println!(
        "ac: I(1) components {:?}",
        w.final_state
            .components
            .iter()
            .map(|z| z.re)
            .collect::<Vec<_>>()
    );
    let comps = wong_transport_components(&ac, &su2, &i0.components, &builtin::unit_circle(), tol)?;
    let gap = comps
        .iter()
        .zip(&w.final_state.components)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    println!("ac: component form vs matrix form {gap:.2e}");
    worst = worst.max(gap);

    for (name, conn, path) in [
        ("ac", ac, builtin::unit_circle()),
        (
            "single-pole",
            builtin::single_pole(),
            builtin::unit_circle(),
        ),
        (
            "two-pole",
            builtin::two_pole_noncommuting(),
            builtin::big_circle(),
        ),
    ] {
        let rep = verify_ad_rho(&conn, &su2, &path, 10, tol, 0)?;
        println!(
            "{name:<12} max |I(1) - rho I0 rho^-1| = {:.2e}  drift {:.2e}  {}",
            rep.max_deviation,
            rep.max_spectral_drift,
            if rep.pass { "PASS" } else { "FAIL" }
        );
        worst = worst.max(rep.max_deviation).max(rep.max_spectral_drift);
    }
    Ok(worst)
}

fn main() -> Result<()> {
    let worst = run_example()?;
    println!("worst deviation {worst:.2e}");
    Ok(())
}
