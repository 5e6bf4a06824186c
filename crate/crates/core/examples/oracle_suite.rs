//! Runs every built-in reference check and prints one line per quantity.

use holonomy_lab::oracle::run_oracle_suite;
use holonomy_lab::Result;

pub fn run_example() -> Result<f64> {
    let reports = run_oracle_suite(1e-9, 0)?;
    let mut worst = 0.0f64;
    for r in &reports {
        println!("{r}");
        worst = worst.max(r.deviation / r.bound);
    }
    Ok(worst)
}

fn main() -> Result<()> {
    let worst = run_example()?;
    println!("worst deviation/bound {worst:.2e}");
    Ok(())
}
