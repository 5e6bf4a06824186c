//! Small dense complex linear algebra kernel shared by every module.
//!
//! All matrices are `nalgebra::DMatrix<Complex64>`. The matrix exponential
//! uses scaling and squaring around a diagonal [6/6] Padé approximant, with
//! exact closed forms for 1×1 and 2×2 inputs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(m: usize) -> CMat {
    CMat::identity(m, m)
}

pub fn zeros(m: usize) -> CMat {
    CMat::zeros(m, m)
}

pub fn diag(entries: &[Complex64]) -> CMat {
    let m = entries.len();
    let mut out = zeros(m);
    for (k, &z) in entries.iter().enumerate() {
        out[(k, k)] = z;
    }
    out
}

/// Builds an m×m matrix from row-major entries.
pub fn from_row_major(m: usize, entries: &[Complex64]) -> Result<CMat> {
    if entries.len() != m * m {
        return Err(Error::DimensionMismatch {
            expected: m * m,
            found: entries.len(),
        });
    }
    Ok(CMat::from_row_slice(m, m, entries))
}

pub fn frobenius(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dist(a: &CMat, b: &CMat) -> f64 {
    frobenius(&(a - b))
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// ‖A†A − I‖ in Frobenius norm.
pub fn unitarity_defect(a: &CMat) -> f64 {
    let n = a.nrows();
    frobenius(&(a.adjoint() * a - identity(n)))
}

/// ‖A + A†‖ in Frobenius norm; zero for anti-Hermitian matrices.
pub fn anti_hermitian_defect(a: &CMat) -> f64 {
    frobenius(&(a + a.adjoint()))
}

pub fn hermitian_defect(a: &CMat) -> f64 {
    frobenius(&(a - a.adjoint()))
}

pub fn is_finite(a: &CMat) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    let inv = a.clone().try_inverse().ok_or(Error::Singular)?;
    if !is_finite(&inv) {
        return Err(Error::Singular);
    }
    Ok(inv)
}

/// Eigenvalues of a general complex square matrix.
pub fn eigenvalues(a: &CMat) -> Vec<Complex64> {
    let n = a.nrows();
    match n {
        0 => Vec::new(),
        1 => vec![a[(0, 0)]],
        2 => {
            let half_tr = (a[(0, 0)] + a[(1, 1)]) * 0.5;
            // tr²/4 - det without the cancellation near a double eigenvalue
            let half_gap = (a[(0, 0)] - a[(1, 1)]) * 0.5;
            let disc = (half_gap * half_gap + a[(0, 1)] * a[(1, 0)]).sqrt();
            vec![half_tr + disc, half_tr - disc]
        }
        _ if normality_defect(a) <= 1e-12 * (1.0 + frobenius(a)).powi(2) => normal_eigenvalues(a),
        _ => {
            let scale = frobenius(a).max(f64::MIN_POSITIVE);
            let schur = a
                .clone()
                .try_schur(f64::EPSILON, SCHUR_MAX_ITER)
                .unwrap_or_else(|| {
                    // break the shift stagnation with a relative 1e-14 nudge
                    let nudge = CMat::from_fn(n, n, |i, j| {
                        c(((i * n + j) as f64 * 0.7).sin(), ((i + 2 * j) as f64).cos())
                    });
                    (a + nudge * c(1e-14 * scale, 0.0)).schur()
                });
            let (_, t) = schur.unpack();
            (0..n).map(|k| t[(k, k)]).collect()
        }
    }
}

const SCHUR_MAX_ITER: usize = 10_000;

/// ‖AA† − A†A‖ in Frobenius norm.
pub fn normality_defect(a: &CMat) -> f64 {
    frobenius(&(a * a.adjoint() - a.adjoint() * a))
}

// Shifted QR on a normal matrix with a symmetric spectrum such as ±1 can stall,
// so diagonalise the Hermitian pencil Re A + α Im A and read off Rayleigh quotients.
fn normal_eigenvalues(a: &CMat) -> Vec<Complex64> {
    const ALPHA: f64 = 0.618_033_988_749_895;
    let re = (a + a.adjoint()) * c(0.5, 0.0);
    let im = (a - a.adjoint()) * c(0.0, -0.5);
    let pencil = re + im * c(ALPHA, 0.0);
    let vecs = pencil.symmetric_eigen().eigenvectors;
    (0..a.nrows())
        .map(|k| {
            let v = vecs.column(k);
            (v.adjoint() * a * v)[(0, 0)]
        })
        .collect()
}

fn one_norm(a: &CMat) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

// [6/6] Padé coefficients c_k = (2q-k)! q! / ((2q)! k! (q-k)!), q = 6.
const PADE6: [f64; 7] = [
    1.0,
    0.5,
    5.0 / 44.0,
    1.0 / 66.0,
    1.0 / 792.0,
    1.0 / 15840.0,
    1.0 / 665280.0,
];

// Scaled inputs stay below this 1-norm; the [6/6] truncation error there is ~1e-17.
const PADE_RADIUS: f64 = 0.5;

/// Matrix exponential.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    match n {
        0 => CMat::zeros(0, 0),
        1 => CMat::from_element(1, 1, a[(0, 0)].exp()),
        2 => expm_2x2(a),
        _ => expm_pade(a),
    }
}

fn expm_2x2(a: &CMat) -> CMat {
    let half_tr = (a[(0, 0)] + a[(1, 1)]) * 0.5;
    let mut b = a.clone();
    b[(0, 0)] -= half_tr;
    b[(1, 1)] -= half_tr;
    // B traceless => B² = δ I with δ = -det B.
    let delta = b[(0, 0)] * b[(0, 0)] + b[(0, 1)] * b[(1, 0)];
    let s = delta.sqrt();
    let (ch, shc) = if s.norm() < 1e-4 {
        let s2 = delta;
        (
            1.0 + s2 / 2.0 + s2 * s2 / 24.0 + s2 * s2 * s2 / 720.0,
            1.0 + s2 / 6.0 + s2 * s2 / 120.0 + s2 * s2 * s2 / 5040.0,
        )
    } else {
        (s.cosh(), s.sinh() / s)
    };
    let scale = half_tr.exp();
    let mut out = b * (shc * scale);
    out[(0, 0)] += ch * scale;
    out[(1, 1)] += ch * scale;
    out
}

fn expm_pade(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = one_norm(a);
    let squarings = if norm > PADE_RADIUS {
        (norm / PADE_RADIUS).log2().ceil() as i32
    } else {
        0
    };
    let x = a * Complex64::from(0.5f64.powi(squarings));
    let id = identity(n);
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;
    let k = |j: usize| Complex64::from(PADE6[j]);
    let u = &x * (&id * k(1) + &x2 * k(3) + &x4 * k(5));
    let v = &id * k(0) + &x2 * k(2) + &x4 * k(4) + &x6 * k(6);
    let num = &v + &u;
    let den = &v - &u;
    let mut r = den
        .lu()
        .solve(&num)
        .expect("Padé denominator is nonsingular for scaled inputs");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// Haar-distributed random unitary: QR of a complex Gaussian matrix with
/// the phases of R's diagonal divided out.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, m: usize) -> CMat {
    let g = CMat::from_fn(m, m, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    });
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0, 0.0)
        };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    q
}
