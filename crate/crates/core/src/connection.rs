//! Matrix-valued connections on the punctured plane.
//!
//! Each [`ConnectionSpec`] defines a transport generator `G(x, v)`, linear in
//! the velocity `v`, such that parallel transport solves `dv/dt = G v`. For
//! forms written as `M(z) dz` the generator is `M(z) (v_x + i v_y)`; for real
//! forms `A₁dx¹ + A₂dx²` it is `A₁v_x + A₂v_y`.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{PlanePoint, PunctureSet};
use crate::linalg::{self, c, commutator, frobenius, CMat, I};

/// Generators are not evaluated closer than this to a puncture.
pub const POLE_GUARD: f64 = 1e-9;
/// Below this distance a warning is logged: step control degrades like 1/r.
pub const POLE_WARN: f64 = 1e-3;

pub type FieldFn = Arc<dyn Fn(PlanePoint) -> CMat + Send + Sync>;

/// User-supplied real 1-form `A₁dx¹ + A₂dx²`. Flatness is never assumed.
#[derive(Clone)]
pub struct CustomSampler {
    pub rank: usize,
    pub a1: FieldFn,
    pub a2: FieldFn,
    pub punctures: PunctureSet,
}

impl fmt::Debug for CustomSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomSampler")
            .field("rank", &self.rank)
            .field("punctures", &self.punctures)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum ConnectionSpec {
    /// Scalar `-(1/2π) Σ_j Φ_j dz/(z - z_j)`.
    MultiSolenoid {
        punctures: PunctureSet,
        fluxes: Vec<f64>,
    },
    /// `Σ_j R_j dz/(z - z_j) + P(z) dz` with `P(z) = Σ_k P_k z^k`.
    FuchsianLog {
        rank: usize,
        punctures: PunctureSet,
        residues: Vec<CMat>,
        polynomial: Vec<CMat>,
    },
    /// `iΛ (dz/z) τ₃` on rank 2, `τ₃ = -(i/2)σ₃`.
    AharonovCasher {
        lambda: f64,
    },
    /// `i (B/2)(-x² dx¹ + x¹ dx²)` on rank 1.
    ConstantField {
        b: f64,
    },
    Custom(CustomSampler),
}

impl ConnectionSpec {
    pub fn multi_solenoid(punctures: PunctureSet, fluxes: Vec<f64>) -> Result<Self> {
        let spec = ConnectionSpec::MultiSolenoid { punctures, fluxes };
        spec.validate()?;
        Ok(spec)
    }

    /// Single solenoid of flux `flux` at the origin.
    pub fn aharonov_bohm(flux: f64) -> Self {
        ConnectionSpec::MultiSolenoid {
            punctures: origin_puncture(),
            fluxes: vec![flux],
        }
    }

    pub fn fuchsian_log(
        punctures: PunctureSet,
        residues: Vec<CMat>,
        polynomial: Vec<CMat>,
    ) -> Result<Self> {
        let rank = residues
            .first()
            .or(polynomial.first())
            .map(|m| m.nrows())
            .ok_or_else(|| {
                Error::InvalidConnection("Fuchsian spec needs residues or a polynomial part".into())
            })?;
        let spec = ConnectionSpec::FuchsianLog {
            rank,
            punctures,
            residues,
            polynomial,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn aharonov_casher(lambda: f64) -> Self {
        ConnectionSpec::AharonovCasher { lambda }
    }

    pub fn constant_field(b: f64) -> Self {
        ConnectionSpec::ConstantField { b }
    }

    pub fn custom(
        rank: usize,
        punctures: PunctureSet,
        a1: impl Fn(PlanePoint) -> CMat + Send + Sync + 'static,
        a2: impl Fn(PlanePoint) -> CMat + Send + Sync + 'static,
    ) -> Self {
        ConnectionSpec::Custom(CustomSampler {
            rank,
            a1: Arc::new(a1),
            a2: Arc::new(a2),
            punctures,
        })
    }

    /// Zero connection of the given rank.
    pub fn zero(rank: usize) -> Self {
        Self::custom(
            rank,
            PunctureSet::empty(),
            move |_| linalg::zeros(rank),
            move |_| linalg::zeros(rank),
        )
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConnectionSpec::MultiSolenoid { punctures, fluxes } => {
                if fluxes.len() != punctures.len() {
                    return Err(Error::InvalidConnection(format!(
                        "{} fluxes for {} punctures",
                        fluxes.len(),
                        punctures.len()
                    )));
                }
                if fluxes.iter().any(|f| !f.is_finite()) {
                    return Err(Error::InvalidConnection("non-finite flux".into()));
                }
            }
            ConnectionSpec::FuchsianLog {
                rank,
                punctures,
                residues,
                polynomial,
            } => {
                if *rank == 0 {
                    return Err(Error::InvalidConnection("rank must be positive".into()));
                }
                if residues.len() != punctures.len() {
                    return Err(Error::InvalidConnection(format!(
                        "{} residues for {} punctures",
                        residues.len(),
                        punctures.len()
                    )));
                }
                for m in residues.iter().chain(polynomial) {
                    if m.nrows() != *rank || m.ncols() != *rank {
                        return Err(Error::DimensionMismatch {
                            expected: *rank,
                            found: m.nrows().max(m.ncols()),
                        });
                    }
                    if !linalg::is_finite(m) {
                        return Err(Error::InvalidConnection("non-finite coefficient".into()));
                    }
                }
            }
            ConnectionSpec::AharonovCasher { lambda } => {
                if !lambda.is_finite() {
                    return Err(Error::InvalidConnection("non-finite Λ".into()));
                }
            }
            ConnectionSpec::ConstantField { b } => {
                if !b.is_finite() {
                    return Err(Error::InvalidConnection("non-finite B".into()));
                }
            }
            ConnectionSpec::Custom(s) => {
                if s.rank == 0 {
                    return Err(Error::InvalidConnection("rank must be positive".into()));
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        match self {
            ConnectionSpec::MultiSolenoid { .. } | ConnectionSpec::ConstantField { .. } => 1,
            ConnectionSpec::FuchsianLog { rank, .. } => *rank,
            ConnectionSpec::AharonovCasher { .. } => 2,
            ConnectionSpec::Custom(s) => s.rank,
        }
    }

    pub fn punctures(&self) -> PunctureSet {
        match self {
            ConnectionSpec::MultiSolenoid { punctures, .. }
            | ConnectionSpec::FuchsianLog { punctures, .. } => punctures.clone(),
            ConnectionSpec::AharonovCasher { .. } => origin_puncture(),
            ConnectionSpec::ConstantField { .. } => PunctureSet::empty(),
            ConnectionSpec::Custom(s) => s.punctures.clone(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ConnectionSpec::MultiSolenoid { .. } => "multi_solenoid",
            ConnectionSpec::FuchsianLog { .. } => "fuchsian_log",
            ConnectionSpec::AharonovCasher { .. } => "aharonov_casher",
            ConnectionSpec::ConstantField { .. } => "constant_field",
            ConnectionSpec::Custom(_) => "custom",
        }
    }

    /// True for the built-in variants, which are flat away from their punctures.
    pub fn is_flat_by_construction(&self) -> bool {
        !matches!(
            self,
            ConnectionSpec::Custom(_) | ConnectionSpec::ConstantField { .. }
        )
    }

    /// True when every closed-loop holonomy is unitary by construction: scalar
    /// solenoids, the Aharonov-Casher field, and Fuchsian specs whose residues
    /// are Hermitian and pairwise commuting with no polynomial part.
    pub fn has_unitary_monodromy(&self) -> bool {
        match self {
            ConnectionSpec::MultiSolenoid { .. } | ConnectionSpec::AharonovCasher { .. } => true,
            ConnectionSpec::FuchsianLog {
                residues,
                polynomial,
                ..
            } => {
                polynomial.iter().all(|p| frobenius(p) == 0.0)
                    && residues.iter().all(|r| linalg::hermitian_defect(r) < 1e-12)
                    && max_pairwise_commutator(residues) < 1e-10
            }
            _ => false,
        }
    }

    /// Returns the spec with every matrix coefficient replaced by `h X h⁻¹`.
    pub fn conjugated(&self, h: &CMat) -> Result<Self> {
        let h_inv = linalg::inverse(h)?;
        match self {
            ConnectionSpec::FuchsianLog {
                rank,
                punctures,
                residues,
                polynomial,
            } => {
                if h.nrows() != *rank {
                    return Err(Error::DimensionMismatch {
                        expected: *rank,
                        found: h.nrows(),
                    });
                }
                let conj = |m: &CMat| h * m * &h_inv;
                Ok(ConnectionSpec::FuchsianLog {
                    rank: *rank,
                    punctures: punctures.clone(),
                    residues: residues.iter().map(conj).collect(),
                    polynomial: polynomial.iter().map(conj).collect(),
                })
            }
            ConnectionSpec::Custom(s) => {
                let (a1, a2) = (s.a1.clone(), s.a2.clone());
                let (h1, h1i, h2, h2i) = (h.clone(), h_inv.clone(), h.clone(), h_inv);
                Ok(Self::custom(
                    s.rank,
                    s.punctures.clone(),
                    move |p| &h1 * a1(p) * &h1i,
                    move |p| &h2 * a2(p) * &h2i,
                ))
            }
            _ => Err(Error::InvalidConnection(format!(
                "constant conjugation is only defined for fuchsian_log and custom specs, not {}",
                self.kind_name()
            ))),
        }
    }
}

fn origin_puncture() -> PunctureSet {
    PunctureSet::new(vec![PlanePoint::ORIGIN], vec!["origin".into()])
        .expect("single puncture is valid")
}

pub(crate) fn max_pairwise_commutator(mats: &[CMat]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..mats.len() {
        for j in (i + 1)..mats.len() {
            worst = worst.max(frobenius(&commutator(&mats[i], &mats[j])));
        }
    }
    worst
}

fn check_guard(punctures: &PunctureSet, point: PlanePoint) -> Result<()> {
    let d = punctures.distance_to(point);
    if d <= POLE_GUARD || !point.is_finite() {
        return Err(Error::PoleProximity { point, distance: d });
    }
    Ok(())
}

/// The transport generator `G` at `point` for the given velocity.
pub fn evaluate_generator(
    conn: &ConnectionSpec,
    point: PlanePoint,
    velocity: PlanePoint,
) -> Result<CMat> {
    let zdot = velocity.to_complex();
    let z = point.to_complex();
    match conn {
        ConnectionSpec::MultiSolenoid { punctures, fluxes } => {
            check_guard(punctures, point)?;
            let sum: Complex64 = punctures
                .points()
                .iter()
                .zip(fluxes)
                .map(|(zj, &phi)| phi / (z - zj.to_complex()))
                .sum();
            Ok(CMat::from_element(1, 1, -sum * zdot / TAU))
        }
        ConnectionSpec::FuchsianLog {
            rank,
            punctures,
            residues,
            polynomial,
        } => {
            check_guard(punctures, point)?;
            let mut m = linalg::zeros(*rank);
            for (zj, r) in punctures.points().iter().zip(residues) {
                m += r * (Complex64::from(1.0) / (z - zj.to_complex()));
            }
            // Horner on the polynomial part
            let mut p = linalg::zeros(*rank);
            for coeff in polynomial.iter().rev() {
                p = p * z + coeff;
            }
            Ok((m + p) * zdot)
        }
        &ConnectionSpec::AharonovCasher { lambda } => {
            check_guard(&origin_puncture(), point)?;
            // iΛ w τ₃ = diag(Λw/2, -Λw/2)
            let w = zdot / z * lambda * 0.5;
            Ok(linalg::diag(&[w, -w]))
        }
        &ConnectionSpec::ConstantField { b } => {
            let a = 0.5 * b * (-point.y * velocity.x + point.x * velocity.y);
            Ok(CMat::from_element(1, 1, I * a))
        }
        ConnectionSpec::Custom(s) => {
            check_guard(&s.punctures, point)?;
            let a1 = (s.a1)(point);
            let a2 = (s.a2)(point);
            if a1.shape() != (s.rank, s.rank) || a2.shape() != (s.rank, s.rank) {
                return Err(Error::DimensionMismatch {
                    expected: s.rank,
                    found: a1.nrows().max(a2.nrows()),
                });
            }
            Ok(a1 * c(velocity.x, 0.0) + a2 * c(velocity.y, 0.0))
        }
    }
}

/// Components `(A₁, A₂)` of the connection form at `point`.
pub fn components(conn: &ConnectionSpec, point: PlanePoint) -> Result<(CMat, CMat)> {
    Ok((
        evaluate_generator(conn, point, PlanePoint::new(1.0, 0.0))?,
        evaluate_generator(conn, point, PlanePoint::new(0.0, 1.0))?,
    ))
}

/// Central-difference estimate of `C₁₂ = ∂₁A₂ − ∂₂A₁ − [A₁, A₂]`.
pub fn curvature_fd(conn: &ConnectionSpec, point: PlanePoint, h: f64) -> Result<CMat> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidConnection(format!(
            "finite-difference step {h}"
        )));
    }
    let ex = PlanePoint::new(1.0, 0.0);
    let ey = PlanePoint::new(0.0, 1.0);
    let a2_right = evaluate_generator(conn, point + ex * h, ey)?;
    let a2_left = evaluate_generator(conn, point - ex * h, ey)?;
    let a1_up = evaluate_generator(conn, point + ey * h, ex)?;
    let a1_down = evaluate_generator(conn, point - ey * h, ex)?;
    let (a1, a2) = components(conn, point)?;
    let inv = Complex64::from(0.5 / h);
    Ok((a2_right - a2_left) * inv - (a1_up - a1_down) * inv - commutator(&a1, &a2))
}

/// Rectangle sampled at the centres of an `nx × ny` cell grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRegion {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridRegion {
    /// Grid nodes may not come closer than this to a puncture.
    pub const NODE_CLEARANCE: f64 = 1e-6;

    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64, nx: usize, ny: usize) -> Result<Self> {
        let r = Self {
            xmin,
            xmax,
            ymin,
            ymax,
            nx,
            ny,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.xmin, self.xmax, self.ymin, self.ymax]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.xmax <= self.xmin || self.ymax <= self.ymin {
            return Err(Error::InvalidRegion(format!(
                "bad rectangle [{}, {}] x [{}, {}]",
                self.xmin, self.xmax, self.ymin, self.ymax
            )));
        }
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidRegion(format!(
                "resolution {}x{} below 2x2",
                self.nx, self.ny
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> (f64, f64) {
        (
            (self.xmax - self.xmin) / self.nx as f64,
            (self.ymax - self.ymin) / self.ny as f64,
        )
    }

    pub fn node(&self, i: usize, j: usize) -> PlanePoint {
        let (dx, dy) = self.spacing();
        PlanePoint::new(
            self.xmin + (i as f64 + 0.5) * dx,
            self.ymin + (j as f64 + 0.5) * dy,
        )
    }

    pub fn nodes(&self) -> impl Iterator<Item = PlanePoint> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| self.node(i, j)))
    }
}

/// Riemann sum of `‖C₁₂‖²_F Δx Δy` over the grid nodes.
pub fn ym_energy(conn: &ConnectionSpec, region: &GridRegion) -> Result<f64> {
    region.validate()?;
    let (dx, dy) = region.spacing();
    let h = 0.5 * dx.min(dy);
    let punctures = conn.punctures();
    let rows: Vec<f64> = (0..region.ny)
        .into_par_iter()
        .map(|j| -> Result<f64> {
            let mut acc = 0.0;
            for i in 0..region.nx {
                let p = region.node(i, j);
                let d = punctures.distance_to(p);
                if d < GridRegion::NODE_CLEARANCE {
                    return Err(Error::PoleProximity {
                        point: p,
                        distance: d,
                    });
                }
                let curv = curvature_fd(conn, p, h)?;
                acc += curv.iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(rows.iter().sum::<f64>() * dx * dy)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatnessReport {
    /// Largest `‖C₁₂‖` over the sampled nodes.
    pub max_curvature: f64,
    /// Largest `‖C₁₂‖` divided by the local size of its terms.
    pub max_relative: f64,
    pub nodes: usize,
}

impl FlatnessReport {
    pub const RELATIVE_TOL: f64 = 1e-6;

    pub fn is_flat(&self) -> bool {
        self.max_relative < Self::RELATIVE_TOL
    }
}

/// Finite-difference curvature over the grid nodes, skipping nodes closer
/// than `clearance` to a puncture.
///
/// The difference step shrinks near punctures. Each node's curvature is
/// compared with `‖A‖/r + ‖A‖²`, where `r` is the distance to the nearest
/// puncture capped at 1, so truncation error near poles does not register
/// as curvature.
pub fn flatness_survey(
    conn: &ConnectionSpec,
    region: &GridRegion,
    clearance: f64,
) -> Result<FlatnessReport> {
    region.validate()?;
    let punctures = conn.punctures();
    let per_row: Vec<(f64, f64, usize)> = (0..region.ny)
        .into_par_iter()
        .map(|j| -> Result<(f64, f64, usize)> {
            let (mut abs, mut rel, mut n) = (0.0f64, 0.0f64, 0usize);
            for i in 0..region.nx {
                let p = region.node(i, j);
                let r = punctures.distance_to(p);
                if r < clearance {
                    continue;
                }
                let r = r.min(1.0);
                let curv = frobenius(&curvature_fd(conn, p, 1e-4 * r)?);
                let (a1, a2) = components(conn, p)?;
                let size = frobenius(&a1) + frobenius(&a2);
                let scale = (size / r + size * size).max(1e-300);
                abs = abs.max(curv);
                rel = rel.max(if size == 0.0 { curv } else { curv / scale });
                n += 1;
            }
            Ok((abs, rel, n))
        })
        .collect::<Result<_>>()?;
    Ok(FlatnessReport {
        max_curvature: per_row.iter().map(|r| r.0).fold(0.0, f64::max),
        max_relative: per_row.iter().map(|r| r.1).fold(0.0, f64::max),
        nodes: per_row.iter().map(|r| r.2).sum(),
    })
}

/// Basis `{τ_a}` of a matrix Lie algebra with `[τ_b, τ_c] = Σ_a f^a_{bc} τ_a`.
#[derive(Debug, Clone)]
pub struct LieBasis {
    generators: Vec<CMat>,
    structure: Vec<f64>,
    gram_inverse: CMat,
}

impl LieBasis {
    /// `structure_constants[a * d² + b * d + c] = f^a_{bc}`.
    pub fn new(generators: Vec<CMat>, structure_constants: Vec<f64>) -> Result<Self> {
        let d = generators.len();
        if d == 0 {
            return Err(Error::InvalidBasis("empty basis".into()));
        }
        let m = generators[0].nrows();
        if generators.iter().any(|g| g.shape() != (m, m)) {
            return Err(Error::InvalidBasis(
                "generators must share one square shape".into(),
            ));
        }
        if structure_constants.len() != d * d * d {
            return Err(Error::InvalidBasis(format!(
                "expected {} structure constants, got {}",
                d * d * d,
                structure_constants.len()
            )));
        }
        let gram = CMat::from_fn(d, d, |a, b| frobenius_inner(&generators[a], &generators[b]));
        let gram_inverse = linalg::inverse(&gram)
            .map_err(|_| Error::InvalidBasis("generators are linearly dependent".into()))?;
        Ok(Self {
            generators,
            structure: structure_constants,
            gram_inverse,
        })
    }

    /// Derives the structure constants by expanding every bracket in the basis.
    pub fn from_generators(generators: Vec<CMat>) -> Result<Self> {
        let d = generators.len();
        let provisional = Self::new(generators, vec![0.0; d * d * d])?;
        let mut f = vec![0.0; d * d * d];
        for b in 0..d {
            for cc in 0..d {
                let br = commutator(&provisional.generators[b], &provisional.generators[cc]);
                let (coef, residual) = provisional.expand(&br);
                if residual > 1e-10 {
                    return Err(Error::InvalidBasis(
                        "span is not closed under brackets".into(),
                    ));
                }
                for (a, z) in coef.iter().enumerate() {
                    if z.im.abs() > 1e-10 {
                        return Err(Error::InvalidBasis(
                            "structure constants are not real".into(),
                        ));
                    }
                    f[a * d * d + b * d + cc] = z.re;
                }
            }
        }
        Self::new(provisional.generators, f)
    }

    /// `τ_a = -(i/2) σ_a`, with `f^a_{bc} = ε_{abc}`.
    pub fn su2() -> Self {
        let h = c(0.0, -0.5);
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let i = c(0.0, 1.0);
        let sigma = [[z, one, one, z], [z, -i, i, z], [one, z, z, -one]];
        let generators = sigma
            .iter()
            .map(|s| CMat::from_row_slice(2, 2, s) * h)
            .collect();
        let mut f = vec![0.0; 27];
        for a in 0..3 {
            for b in 0..3 {
                for cc in 0..3 {
                    f[a * 9 + b * 3 + cc] = levi_civita(a, b, cc);
                }
            }
        }
        Self::new(generators, f).expect("su(2) basis is valid")
    }

    /// The abelian algebra `u(1)` spanned by `i` on rank 1.
    pub fn u1() -> Self {
        Self::new(vec![CMat::from_element(1, 1, I)], vec![0.0]).expect("u(1) basis is valid")
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn matrix_size(&self) -> usize {
        self.generators[0].nrows()
    }

    pub fn generators(&self) -> &[CMat] {
        &self.generators
    }

    pub fn f(&self, a: usize, b: usize, c: usize) -> f64 {
        let d = self.dim();
        self.structure[a * d * d + b * d + c]
    }

    pub fn structure_constants(&self) -> &[f64] {
        &self.structure
    }

    /// `Σ_a coef_a τ_a`.
    pub fn combine(&self, coef: &[Complex64]) -> CMat {
        let m = self.matrix_size();
        self.generators
            .iter()
            .zip(coef)
            .fold(linalg::zeros(m), |acc, (g, &z)| acc + g * z)
    }

    /// Least-squares (Frobenius) coefficients of `x` in the basis, plus the
    /// residual `‖x − Σ coef τ‖ / max(1, ‖x‖)`.
    pub fn expand(&self, x: &CMat) -> (Vec<Complex64>, f64) {
        let d = self.dim();
        let rhs = nalgebra::DVector::from_iterator(
            d,
            self.generators.iter().map(|g| frobenius_inner(g, x)),
        );
        let coef: Vec<Complex64> = (&self.gram_inverse * rhs).iter().copied().collect();
        let residual = frobenius(&(x - self.combine(&coef))) / frobenius(x).max(1.0);
        (coef, residual)
    }
}

fn frobenius_inner(a: &CMat, b: &CMat) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LieBasisReport {
    pub bracket: f64,
    pub antisymmetry: f64,
    pub jacobi: f64,
}

impl LieBasisReport {
    pub fn max(&self) -> f64 {
        self.bracket.max(self.antisymmetry).max(self.jacobi)
    }
}

pub fn verify_lie_basis(basis: &LieBasis) -> LieBasisReport {
    let d = basis.dim();
    let mut bracket = 0.0f64;
    let mut antisymmetry = 0.0f64;
    let mut jacobi = 0.0f64;
    for b in 0..d {
        for cc in 0..d {
            let lhs = commutator(&basis.generators[b], &basis.generators[cc]);
            let coef: Vec<Complex64> = (0..d).map(|a| c(basis.f(a, b, cc), 0.0)).collect();
            bracket = bracket.max(frobenius(&(lhs - basis.combine(&coef))));
            for a in 0..d {
                antisymmetry = antisymmetry.max((basis.f(a, b, cc) + basis.f(a, cc, b)).abs());
            }
        }
    }
    // Σ_d f^d_{bc} f^e_{ad} + f^d_{ab} f^e_{cd} + f^d_{ca} f^e_{bd} = 0
    for a in 0..d {
        for b in 0..d {
            for cc in 0..d {
                for e in 0..d {
                    let s: f64 = (0..d)
                        .map(|k| {
                            basis.f(k, b, cc) * basis.f(e, a, k)
                                + basis.f(k, a, b) * basis.f(e, cc, k)
                                + basis.f(k, cc, a) * basis.f(e, b, k)
                        })
                        .sum();
                    jacobi = jacobi.max(s.abs());
                }
            }
        }
    }
    LieBasisReport {
        bracket,
        antisymmetry,
        jacobi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin_solenoid(phi: f64) -> ConnectionSpec {
        ConnectionSpec::aharonov_bohm(phi)
    }

    #[test]
    fn solenoid_generator_example() {
        let g = evaluate_generator(
            &origin_solenoid(TAU),
            PlanePoint::new(1.0, 0.0),
            PlanePoint::new(0.0, 1.0),
        )
        .unwrap();
        assert!((g[(0, 0)] - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_velocity_gives_zero_generator() {
        let specs = [
            origin_solenoid(1.0),
            ConnectionSpec::aharonov_casher(0.3),
            ConnectionSpec::constant_field(2.0),
        ];
        for s in &specs {
            let g = evaluate_generator(s, PlanePoint::new(0.3, 0.7), PlanePoint::ORIGIN).unwrap();
            assert_eq!(frobenius(&g), 0.0);
        }
    }

    #[test]
    fn aharonov_casher_generator_example() {
        let lambda = 0.3;
        let g = evaluate_generator(
            &ConnectionSpec::aharonov_casher(lambda),
            PlanePoint::new(0.0, 1.0),
            PlanePoint::new(-1.0, 0.0),
        )
        .unwrap();
        // iΛ (ż/z) τ₃ with ż/z = -1/i = i
        let tau3 = linalg::diag(&[c(0.0, -0.5), c(0.0, 0.5)]);
        let expected = &tau3 * c(-lambda, 0.0);
        assert!(linalg::dist(&g, &expected) < 1e-15);
    }

    #[test]
    fn pole_guard() {
        let err = evaluate_generator(
            &origin_solenoid(1.0),
            PlanePoint::new(1e-10, 0.0),
            PlanePoint::new(1.0, 0.0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::PoleProximity { .. }));
    }

    #[test]
    fn curvature_of_solenoid_vanishes() {
        let c = curvature_fd(&origin_solenoid(1.3), PlanePoint::new(0.8, -0.6), 1e-4).unwrap();
        assert!(frobenius(&c) < 1e-6);
    }

    #[test]
    fn curvature_of_constant_field() {
        let b = 1.5;
        let curv = curvature_fd(
            &ConnectionSpec::constant_field(b),
            PlanePoint::new(0.4, 2.0),
            1e-3,
        )
        .unwrap();
        assert!((curv[(0, 0)] - c(0.0, b)).norm() < 1e-9);
    }

    #[test]
    fn curvature_of_zero_custom_is_exact_zero() {
        let c = curvature_fd(&ConnectionSpec::zero(2), PlanePoint::new(0.1, 0.2), 1e-4).unwrap();
        assert_eq!(frobenius(&c), 0.0);
    }

    #[test]
    fn constant_noncommuting_custom_curvature_is_minus_commutator() {
        let su2 = LieBasis::su2();
        let x = su2.generators()[0].clone();
        let y = su2.generators()[1].clone();
        let (xc, yc) = (x.clone(), y.clone());
        let spec = ConnectionSpec::custom(
            2,
            PunctureSet::empty(),
            move |_| xc.clone(),
            move |_| yc.clone(),
        );
        let curv = curvature_fd(&spec, PlanePoint::ORIGIN, 1e-3).unwrap();
        assert!(linalg::dist(&curv, &(-commutator(&x, &y))) < 1e-14);
    }

    #[test]
    fn ym_energy_of_zero_is_zero() {
        let region = GridRegion::new(-1.0, 1.0, -1.0, 1.0, 8, 8).unwrap();
        assert_eq!(ym_energy(&ConnectionSpec::zero(1), &region).unwrap(), 0.0);
    }

    #[test]
    fn ym_energy_constant_field_matches_area() {
        let region = GridRegion::new(0.0, 2.0, 0.0, 3.0, 20, 30).unwrap();
        let e = ym_energy(&ConnectionSpec::constant_field(1.5), &region).unwrap();
        assert!((e - 13.5).abs() / 13.5 < 0.01);
    }

    #[test]
    fn grid_region_validation() {
        assert!(GridRegion::new(1.0, 0.0, 0.0, 1.0, 4, 4).is_err());
        assert!(GridRegion::new(0.0, 1.0, 0.0, 1.0, 1, 4).is_err());
    }

    #[test]
    fn su2_basis_is_consistent() {
        let r = verify_lie_basis(&LieBasis::su2());
        assert!(r.max() < 1e-14, "{r:?}");
    }

    #[test]
    fn zeroed_structure_constants_are_flagged() {
        let su2 = LieBasis::su2();
        let broken = LieBasis::new(su2.generators().to_vec(), vec![0.0; 27]).unwrap();
        let r = verify_lie_basis(&broken);
        assert!(r.bracket > 0.1);
        assert_eq!(r.antisymmetry, 0.0);
    }

    #[test]
    fn abelian_basis_report_is_zero() {
        let r = verify_lie_basis(&LieBasis::u1());
        assert_eq!(r.max(), 0.0);
    }

    #[test]
    fn structure_constants_from_generators() {
        let su2 = LieBasis::su2();
        let derived = LieBasis::from_generators(su2.generators().to_vec()).unwrap();
        for (a, b) in derived
            .structure_constants()
            .iter()
            .zip(su2.structure_constants())
        {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn multi_solenoid_flux_count_must_match() {
        let p =
            PunctureSet::unlabelled(vec![PlanePoint::ORIGIN, PlanePoint::new(1.0, 0.0)]).unwrap();
        assert!(matches!(
            ConnectionSpec::multi_solenoid(p, vec![1.0]),
            Err(Error::InvalidConnection(_))
        ));
    }

    #[test]
    fn flatness_survey_separates_flat_from_curved() {
        let region = GridRegion::new(-2.0, 2.0, -2.0, 2.0, 21, 21).unwrap();
        let r = linalg::diag(&[c(0.3, 0.0), c(-0.2, 0.0)]);
        let p = PunctureSet::unlabelled(vec![PlanePoint::new(0.05, 0.05)]).unwrap();
        let fuchs = ConnectionSpec::fuchsian_log(p, vec![r], vec![]).unwrap();
        assert!(flatness_survey(&fuchs, &region, 1e-3).unwrap().is_flat());
        let curved = flatness_survey(&ConnectionSpec::constant_field(1.5), &region, 1e-3).unwrap();
        assert!(!curved.is_flat());
        assert!((curved.max_curvature - 1.5).abs() < 1e-6);
    }
}
