//! Vacuum classes for fundamental groups `Z` and `Z/2`.

use holonomy_lab::linalg::{self, c, random_unitary};
use holonomy_lab::vacua::{
    canonical_vacuum_cyclic, classify_z2, enumerate_vacua_z2, vacuum_from_connection,
};
use holonomy_lab::{ConnectionSpec, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let torus = linalg::diag(&[c(0.0, 0.4).exp(), c(0.0, 2.2).exp(), c(0.0, 5.0).exp()]);
    let reference = canonical_vacuum_cyclic(&torus, 1e-10)?;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let s = random_unitary(&mut rng, 3);
        let class = canonical_vacuum_cyclic(&(&s * &torus * s.adjoint()), 1e-10)?;
        worst = worst.max(class.distance(&reference));
    }
    println!(
        "Z, rank 3: phases {:?}, worst drift under conjugation {worst:.2e}",
        reference.eigenphases
    );

    let ac = vacuum_from_connection(&ConnectionSpec::aharonov_casher(0.5), 1e-10)?;
    println!(
        "Z, Aharonov-Casher at lambda=0.5: phases {:?}",
        ac.eigenphases
    );

    for m in 0..=4 {
        let classes: Vec<(usize, usize)> = enumerate_vacua_z2(m)
            .iter()
            .map(|v| (v.plus, v.minus))
            .collect();
        println!("Z/2, rank {m}: {} classes {classes:?}", classes.len());
    }
    let h = random_unitary(&mut rng, 4);
    let flip = linalg::diag(&[c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]);
    let class = classify_z2(&(&h * flip * h.adjoint()), 1e-10)?;
    println!(
        "Z/2, conjugated diag(1,-1,-1,1): ({}, {})",
        class.plus, class.minus
    );
    Ok(worst)
}

fn main() -> Result<()> {
    run_example()?;
    Ok(())
}
