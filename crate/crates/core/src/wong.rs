//! Transport of a Lie-algebra valued spin variable along a prescribed path.
//!
//! The spin `I(t)` obeys `dI/dt = [G, I]` with `G` the transport generator.
//! Each step conjugates, `I ↦ E I E⁻¹` with `E = exp(h G(midpoint))`, so the
//! spectrum of `I` is preserved step by step and the reported drift only
//! measures round-off.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::connection::{ConnectionSpec, LieBasis};
use crate::error::{Error, Result};
use crate::geometry::PathSpec;
use crate::linalg::{self, expm, CMat};
use crate::transport::{check_tol, parallel_transport, path_clearance, refine, Discretization};

/// Generators whose relative expansion residual exceeds this are rejected.
pub const BASIS_TOL: f64 = 1e-8;
/// Matrix and component forms of a spin must agree to this.
pub const SPIN_CONSISTENCY_TOL: f64 = 1e-10;
const MIN_CHECKPOINTS: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    pub matrix: CMat,
    pub components: Vec<Complex64>,
}

impl SpinState {
    pub fn from_components(basis: &LieBasis, components: Vec<Complex64>) -> Result<Self> {
        if components.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: components.len(),
            });
        }
        Ok(Self {
            matrix: basis.combine(&components),
            components,
        })
    }

    pub fn from_real_components(basis: &LieBasis, components: &[f64]) -> Result<Self> {
        Self::from_components(
            basis,
            components.iter().map(|&x| Complex64::from(x)).collect(),
        )
    }

    pub fn from_matrix(basis: &LieBasis, matrix: CMat) -> Result<Self> {
        let (components, residual) = basis.expand(&matrix);
        if residual > BASIS_TOL {
            return Err(Error::BasisMismatch { residual });
        }
        Ok(Self { matrix, components })
    }

    /// `‖Σ I^a τ_a − I‖`.
    pub fn consistency_defect(&self, basis: &LieBasis) -> f64 {
        linalg::dist(&basis.combine(&self.components), &self.matrix)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WongResult {
    pub final_state: SpinState,
    /// Largest eigenvalue movement from `I(0)` across all checkpoints.
    pub spectral_drift: f64,
    pub error_estimate: f64,
    pub steps_used: usize,
}

/// Largest gap between greedily nearest-paired eigenvalues of `a` and `b`.
fn spectral_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut pool: Vec<Complex64> = b.to_vec();
    let mut worst = 0.0f64;
    for x in a {
        let (k, d) = pool
            .iter()
            .enumerate()
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("equal-length spectra");
        worst = worst.max(d);
        pool.swap_remove(k);
    }
    worst
}

fn check_inputs(
    conn: &ConnectionSpec,
    basis: &LieBasis,
    i0: &SpinState,
    path: &PathSpec,
    tol: f64,
) -> Result<()> {
    check_tol(tol)?;
    path.validate()?;
    if basis.matrix_size() != conn.rank() {
        return Err(Error::DimensionMismatch {
            expected: conn.rank(),
            found: basis.matrix_size(),
        });
    }
    if i0.components.len() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: i0.components.len(),
        });
    }
    let defect = i0.consistency_defect(basis);
    if defect > SPIN_CONSISTENCY_TOL {
        return Err(Error::BasisMismatch { residual: defect });
    }
    path_clearance(conn, path)?;
    Ok(())
}

/// Checks that every coarse-level generator lies in the span of `basis`.
fn check_generators_in_span(
    conn: &ConnectionSpec,
    basis: &LieBasis,
    disc: &Discretization,
) -> Result<()> {
    disc.for_each_step(conn, 0, |step, gh| {
        let g = gh / Complex64::from(step.s1 - step.s0);
        let (_, residual) = basis.expand(&g);
        if residual > BASIS_TOL {
            return Err(Error::BasisMismatch { residual });
        }
        Ok(())
    })
}

fn conjugation_sweep(
    conn: &ConnectionSpec,
    disc: &Discretization,
    level: u32,
    i0: &CMat,
) -> Result<(CMat, f64)> {
    let n = disc.steps_at(level);
    let every = (n / (2 * MIN_CHECKPOINTS)).max(1);
    let spec0 = linalg::eigenvalues(i0);
    let mut drift = 0.0f64;
    let mut cur = i0.clone();
    let mut k = 0usize;
    disc.for_each_step(conn, level, |_, gh| {
        let e = expm(&gh);
        let e_inv = expm(&(-gh));
        cur = &e * &cur * e_inv;
        k += 1;
        if k.is_multiple_of(every) || k == n {
            drift = drift.max(spectral_gap(&spec0, &linalg::eigenvalues(&cur)));
        }
        Ok(())
    })?;
    if !linalg::is_finite(&cur) {
        return Err(Error::NonFinite);
    }
    Ok((cur, drift))
}

/// Integrates the spin equation in matrix form.
pub fn wong_transport(
    conn: &ConnectionSpec,
    basis: &LieBasis,
    i0: &SpinState,
    path: &PathSpec,
    tol: f64,
) -> Result<WongResult> {
    check_inputs(conn, basis, i0, path, tol)?;
    let disc = Discretization::new(path);
    check_generators_in_span(conn, basis, &disc)?;
    let ((matrix, drift), err, steps, _) = refine(
        &disc,
        tol,
        |level| conjugation_sweep(conn, &disc, level, &i0.matrix),
        |a, b| linalg::dist(&a.0, &b.0),
    )?;
    let (components, _) = basis.expand(&matrix);
    Ok(WongResult {
        final_state: SpinState { matrix, components },
        spectral_drift: drift,
        error_estimate: err,
        steps_used: steps,
    })
}

fn component_sweep(
    conn: &ConnectionSpec,
    basis: &LieBasis,
    disc: &Discretization,
    level: u32,
    i0: &[Complex64],
) -> Result<Vec<Complex64>> {
    let d = basis.dim();
    let mut cur = nalgebra::DVector::from_column_slice(i0);
    disc.for_each_step(conn, level, |_, gh| {
        let (hb, _) = basis.expand(&gh);
        // K_{ac} = Σ_b f^a_{bc} B^b
        let k = CMat::from_fn(d, d, |a, cc| {
            (0..d).map(|b| hb[b] * basis.f(a, b, cc)).sum::<Complex64>()
        });
        cur = expm(&k) * &cur;
        Ok(())
    })?;
    if cur.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(cur.iter().copied().collect())
}

/// Integrates the spin equation in structure-constant form on components.
pub fn wong_transport_components(
    conn: &ConnectionSpec,
    basis: &LieBasis,
    i0: &[Complex64],
    path: &PathSpec,
    tol: f64,
) -> Result<Vec<Complex64>> {
    let state = SpinState::from_components(basis, i0.to_vec())?;
    check_inputs(conn, basis, &state, path, tol)?;
    let disc = Discretization::new(path);
    check_generators_in_span(conn, basis, &disc)?;
    let (out, _, _, _) = refine(
        &disc,
        tol,
        |level| component_sweep(conn, basis, &disc, level, i0),
        |a, b| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt()
        },
    )?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdRhoReport {
    pub trials: usize,
    pub max_deviation: f64,
    pub max_spectral_drift: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Compares the transported spin with `ρ I0 ρ⁻¹` for random initial spins.
pub fn verify_ad_rho(
    conn: &ConnectionSpec,
    basis: &LieBasis,
    path: &PathSpec,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<AdRhoReport> {
    path.validate()?;
    path.ensure_closed()?;
    let rho = parallel_transport(conn, path, tol)?.matrix;
    let rho_inv = linalg::inverse(&rho)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Vec<f64>> = (0..trials)
        .map(|_| {
            (0..basis.dim())
                .map(|_| rng.random_range(-1.0..=1.0))
                .collect()
        })
        .collect();
    let outcomes: Vec<(f64, f64)> = starts
        .par_iter()
        .map(|comps| {
            let i0 = SpinState::from_real_components(basis, comps)?;
            let res = wong_transport(conn, basis, &i0, path, tol)?;
            let expected = &rho * &i0.matrix * &rho_inv;
            Ok((
                linalg::dist(&res.final_state.matrix, &expected),
                res.spectral_drift,
            ))
        })
        .collect::<Result<_>>()?;
    let max_deviation = outcomes.iter().map(|o| o.0).fold(0.0, f64::max);
    let max_spectral_drift = outcomes.iter().map(|o| o.1).fold(0.0, f64::max);
    let bound = 10.0 * (tol + tol) + 1e-8;
    Ok(AdRhoReport {
        trials,
        max_deviation,
        max_spectral_drift,
        bound,
        pass: max_deviation < bound,
    })
}

pub fn isospectrality_report(result: &WongResult) -> f64 {
    result.spectral_drift
}
