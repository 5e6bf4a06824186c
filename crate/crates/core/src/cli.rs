//! Subcommand dispatch behind the `holonomy-lab` binary.
//!
//! Every subcommand returns an exit code and a report. Exit code 0 means
//! success, 1 a computational failure (a check that did not pass, or a
//! computation that could not converge) and 2 a usage or input error.
//! Reals print with 12 significant digits, complex numbers as `re im`.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::config::{parse_config, SceneConfig};
use crate::connection::{flatness_survey, ym_energy, ConnectionSpec, GridRegion};
use crate::error::Error;
use crate::geometry::{min_distance, PathSpec, PlanePoint};
use crate::linalg::CMat;
use crate::monodromy::{ab_phase_predict, evaluate_word, monodromy_representation};
use crate::oracle::run_oracle_suite;
use crate::transport::{parallel_transport, transport_trajectory};
use crate::vacua::{canonical_vacuum_cyclic, classify_z2, enumerate_vacua_z2};
use crate::wong::{isospectrality_report, verify_ad_rho, wong_transport, SpinState};

pub const SUBCOMMANDS: [&str; 8] = [
    "flatness",
    "transport",
    "monodromy",
    "abphase",
    "wong",
    "vacua",
    "ym-energy",
    "verify",
];

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Tolerance for `verify` when neither a flag nor a scene sets one.
pub const VERIFY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Group {
    #[default]
    Z,
    Z2,
}

impl FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "Z" | "z" => Ok(Group::Z),
            "Z2" | "z2" => Ok(Group::Z2),
            other => Err(format!("unknown group `{other}`, expected Z or Z2")),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Flags {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub csv: Option<PathBuf>,
    pub assume_flat: bool,
    pub verify_ad: bool,
    pub group: Group,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

impl Outcome {
    fn ok(report: String) -> Self {
        Self {
            code: EXIT_OK,
            report,
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            report: format!("error: {}\n", message.into()),
        }
    }

    fn from_error(e: Error) -> Self {
        let code = match e {
            Error::NoConvergence { .. }
            | Error::NonFinite
            | Error::Singular
            | Error::NotUnitary { .. }
            | Error::NotInvolution { .. }
            | Error::WindingUnresolved { .. } => EXIT_FAIL,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            report: format!("error: {e}\n"),
        }
    }
}

/// Formats a real with 12 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn fmt_complex(z: Complex64) -> String {
    format!("{} {}", fmt_real(z.re), fmt_real(z.im))
}

fn write_matrix(out: &mut String, m: &CMat) {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| fmt_complex(m[(i, j)])).collect();
        let _ = writeln!(out, "  {}", row.join("   "));
    }
}

/// Reads and parses a scene file; usage errors become exit code 2.
pub fn load_config(path: &std::path::Path) -> Result<SceneConfig, Outcome> {
    let text = fs::read_to_string(path)
        .map_err(|e| Outcome::usage(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Outcome::usage(format!("{}: {e}", path.display())))
}

/// Runs one subcommand.
pub fn run_subcommand(name: &str, config: Option<&SceneConfig>, flags: &Flags) -> Outcome {
    if !SUBCOMMANDS.contains(&name) {
        return Outcome::usage(format!(
            "unknown subcommand `{name}`; expected one of {}",
            SUBCOMMANDS.join(", ")
        ));
    }
    if let Some(t) = flags.tol {
        if let Err(e) = crate::transport::check_tol(t) {
            return Outcome::from_error(e);
        }
    }
    let result = match name {
        "verify" => Ok(verify(config, flags)),
        _ => {
            let Some(cfg) = config else {
                return Outcome::usage(format!("`{name}` needs --config"));
            };
            match name {
                "flatness" => flatness(cfg),
                "transport" => transport(cfg, flags),
                "monodromy" => monodromy(cfg, flags),
                "abphase" => abphase(cfg),
                "wong" => wong(cfg, flags),
                "vacua" => vacua(cfg, flags),
                "ym-energy" => energy(cfg),
                _ => unreachable!("checked against SUBCOMMANDS"),
            }
        }
    };
    result.unwrap_or_else(|o| o)
}

type Step = Result<Outcome, Outcome>;

fn tol_of(cfg: &SceneConfig, flags: &Flags) -> f64 {
    flags.tol.unwrap_or(cfg.transport_tol)
}

fn need_connection(cfg: &SceneConfig) -> Result<&ConnectionSpec, Outcome> {
    cfg.connection
        .as_ref()
        .ok_or_else(|| Outcome::usage("scene has no [connection] table"))
}

fn need_path(cfg: &SceneConfig) -> Result<(&str, &PathSpec), Outcome> {
    cfg.selected_path().ok_or_else(|| {
        if cfg.paths.is_empty() {
            Outcome::usage("scene has no [paths] entries")
        } else {
            Outcome::usage("scene has several paths; set the top-level `path` key")
        }
    })
}

fn guard_path(cfg: &SceneConfig, conn: &ConnectionSpec, path: &PathSpec) -> Result<(), Outcome> {
    let punctures = conn.punctures();
    let d = min_distance(path, &punctures);
    if d <= cfg.guard {
        let point = punctures
            .points()
            .iter()
            .copied()
            .min_by(|a, b| path.distance_to(*a).total_cmp(&path.distance_to(*b)))
            .unwrap_or(PlanePoint::ORIGIN);
        return Err(Outcome::from_error(Error::PoleProximity {
            point,
            distance: d,
        }));
    }
    Ok(())
}

fn flatness(cfg: &SceneConfig) -> Step {
    let conn = need_connection(cfg)?;
    let region = match cfg.region {
        Some(r) => r,
        None => GridRegion::new(-3.0, 3.0, -3.0, 3.0, 24, 24).map_err(Outcome::from_error)?,
    };
    let rep = flatness_survey(conn, &region, 1e-3).map_err(Outcome::from_error)?;
    let mut out = String::new();
    let _ = writeln!(out, "connection {}", conn.kind_name());
    let _ = writeln!(out, "nodes {}", rep.nodes);
    let _ = writeln!(out, "max_curvature {}", fmt_real(rep.max_curvature));
    let _ = writeln!(out, "max_relative_curvature {}", fmt_real(rep.max_relative));
    let _ = writeln!(
        out,
        "flat_by_construction {}",
        conn.is_flat_by_construction()
    );
    let flat = rep.is_flat();
    let _ = writeln!(out, "flat {}", if flat { "PASS" } else { "FAIL" });
    Ok(Outcome {
        code: if flat { EXIT_OK } else { EXIT_FAIL },
        report: out,
    })
}

fn write_csv(path: &std::path::Path, samples: &[(f64, DVector<Complex64>)]) -> std::io::Result<()> {
    let m = samples.first().map_or(0, |s| s.1.len());
    let mut text = String::from("t");
    for k in 1..=m {
        let _ = write!(text, ",re_v{k},im_v{k}");
    }
    text.push('\n');
    for (t, v) in samples {
        let _ = write!(text, "{t:.16e}");
        for z in v.iter() {
            let _ = write!(text, ",{:.16e},{:.16e}", z.re, z.im);
        }
        text.push('\n');
    }
    fs::write(path, text)
}

fn transport(cfg: &SceneConfig, flags: &Flags) -> Step {
    let conn = need_connection(cfg)?;
    let (name, path) = need_path(cfg)?;
    guard_path(cfg, conn, path)?;
    let tol = tol_of(cfg, flags);
    let res = parallel_transport(conn, path, tol).map_err(Outcome::from_error)?;
    let mut out = String::new();
    let _ = writeln!(out, "connection {}", conn.kind_name());
    let _ = writeln!(out, "path {name} closed {}", res.path_closed);
    let _ = writeln!(out, "matrix");
    write_matrix(&mut out, &res.matrix);
    let _ = writeln!(out, "error_estimate {}", fmt_real(res.error_estimate));
    let _ = writeln!(out, "steps {}", res.steps_used);
    let _ = writeln!(out, "min_pole_distance {}", fmt_real(res.min_pole_distance));
    let _ = writeln!(out, "unitarity_defect {}", fmt_real(res.unitarity_defect()));
    if let Some(csv) = &flags.csv {
        let m = conn.rank();
        let v0 = match &cfg.initial_vector {
            Some(v) => DVector::from_column_slice(v),
            None => DVector::from_fn(m, |i, _| Complex64::from(if i == 0 { 1.0 } else { 0.0 })),
        };
        let traj =
            transport_trajectory(conn, path, &v0, cfg.samples, tol).map_err(Outcome::from_error)?;
        write_csv(csv, &traj.samples)
            .map_err(|e| Outcome::usage(format!("cannot write {}: {e}", csv.display())))?;
        let _ = writeln!(out, "csv {} rows {}", csv.display(), traj.samples.len());
    }
    Ok(Outcome::ok(out))
}

fn monodromy(cfg: &SceneConfig, flags: &Flags) -> Step {
    let conn = need_connection(cfg)?;
    let tol = tol_of(cfg, flags);
    let rep = monodromy_representation(conn, cfg.basepoint, tol, flags.assume_flat)
        .map_err(Outcome::from_error)?;
    let mut out = String::new();
    let _ = writeln!(out, "connection {}", conn.kind_name());
    let _ = writeln!(
        out,
        "basepoint {} {}",
        fmt_real(rep.basepoint.x),
        fmt_real(rep.basepoint.y)
    );
    for (label, g) in &rep.generators {
        let _ = writeln!(
            out,
            "generator {label} error_estimate {}",
            fmt_real(rep.error_estimates[label])
        );
        write_matrix(&mut out, g);
    }
    if conn.has_unitary_monodromy() {
        let _ = writeln!(
            out,
            "max_unitarity_defect {}",
            fmt_real(rep.max_unitarity_defect())
        );
    }
    if let Some(word) = &cfg.word {
        let w = evaluate_word(&rep, word).map_err(Outcome::from_error)?;
        let _ = writeln!(out, "word {word}");
        write_matrix(&mut out, &w);
    }
    Ok(Outcome::ok(out))
}

fn abphase(cfg: &SceneConfig) -> Step {
    let conn = need_connection(cfg)?;
    let ConnectionSpec::MultiSolenoid { punctures, fluxes } = conn else {
        return Err(Outcome::usage(format!(
            "abphase needs a multi_solenoid connection, got {}",
            conn.kind_name()
        )));
    };
    let (_, path) = need_path(cfg)?;
    let pred = ab_phase_predict(fluxes, path, punctures).map_err(Outcome::from_error)?;
    let mut out = format!("{}\n", fmt_complex(pred.phase));
    let windings: Vec<String> = punctures
        .labels()
        .iter()
        .zip(&pred.windings)
        .map(|(l, w)| format!("{l}={w}"))
        .collect();
    let _ = writeln!(out, "windings {}", windings.join(" "));
    Ok(Outcome::ok(out))
}

fn wong(cfg: &SceneConfig, flags: &Flags) -> Step {
    let conn = need_connection(cfg)?;
    let (_, path) = need_path(cfg)?;
    guard_path(cfg, conn, path)?;
    let w = cfg
        .wong
        .as_ref()
        .ok_or_else(|| Outcome::usage("scene has no [wong] table"))?;
    let tol = tol_of(cfg, flags);
    let i0 = SpinState::from_real_components(&w.basis, &w.initial).map_err(Outcome::from_error)?;
    let res = wong_transport(conn, &w.basis, &i0, path, tol).map_err(Outcome::from_error)?;
    let mut out = String::new();
    let _ = writeln!(out, "final_components");
    for z in &res.final_state.components {
        let _ = writeln!(out, "  {}", fmt_complex(*z));
    }
    let _ = writeln!(
        out,
        "spectral_drift {}",
        fmt_real(isospectrality_report(&res))
    );
    let _ = writeln!(out, "error_estimate {}", fmt_real(res.error_estimate));
    let mut code = EXIT_OK;
    if flags.verify_ad {
        let seed = flags.seed.unwrap_or(cfg.seed);
        let rep = verify_ad_rho(conn, &w.basis, path, w.trials, tol, seed)
            .map_err(Outcome::from_error)?;
        let _ = writeln!(
            out,
            "ad_rho trials {} max_deviation {} bound {} {}",
            rep.trials,
            fmt_real(rep.max_deviation),
            fmt_real(rep.bound),
            if rep.pass { "PASS" } else { "FAIL" }
        );
        if !rep.pass {
            code = EXIT_FAIL;
        }
    }
    Ok(Outcome { code, report: out })
}

fn vacua(cfg: &SceneConfig, flags: &Flags) -> Step {
    let tol = tol_of(cfg, flags);
    let check_tol = (10.0 * tol).max(1e-8);
    let u = match (&cfg.vacuum_matrix, &cfg.connection) {
        (Some(m), _) => m.clone(),
        (None, Some(conn)) => {
            if conn.punctures().len() != 1 {
                return Err(Outcome::usage(
                    "vacua from a connection needs exactly one puncture; or give [vacua] matrix",
                ));
            }
            let rep = monodromy_representation(conn, cfg.basepoint, tol, flags.assume_flat)
                .map_err(Outcome::from_error)?;
            rep.generators.into_values().next().expect("one puncture")
        }
        (None, None) => {
            return Err(Outcome::usage(
                "scene has neither [vacua] matrix nor [connection]",
            ))
        }
    };
    let mut out = String::new();
    match flags.group {
        Group::Z => {
            let class = canonical_vacuum_cyclic(&u, check_tol).map_err(Outcome::from_error)?;
            let phases: Vec<String> = class.eigenphases.iter().map(|&p| fmt_real(p)).collect();
            let _ = writeln!(out, "group Z rank {}", u.nrows());
            let _ = writeln!(out, "eigenphases {}", phases.join(" "));
        }
        Group::Z2 => {
            let class = classify_z2(&u, check_tol).map_err(Outcome::from_error)?;
            let _ = writeln!(out, "group Z2 rank {}", u.nrows());
            let _ = writeln!(out, "class {} {}", class.plus, class.minus);
            let _ = writeln!(
                out,
                "classes_at_rank {}",
                enumerate_vacua_z2(u.nrows()).len()
            );
        }
    }
    Ok(Outcome::ok(out))
}

fn energy(cfg: &SceneConfig) -> Step {
    let conn = need_connection(cfg)?;
    let region = cfg
        .region
        .as_ref()
        .ok_or_else(|| Outcome::usage("scene has no [region] table"))?;
    let e = ym_energy(conn, region).map_err(Outcome::from_error)?;
    Ok(Outcome::ok(format!("ym_energy {}\n", fmt_real(e))))
}

fn verify(config: Option<&SceneConfig>, flags: &Flags) -> Outcome {
    let tol = flags
        .tol
        .or(config.map(|c| c.transport_tol))
        .unwrap_or(VERIFY_TOL);
    let seed = flags.seed.or(config.map(|c| c.seed)).unwrap_or(0);
    let reports = match run_oracle_suite(tol, seed) {
        Ok(r) => r,
        Err(e) => return Outcome::from_error(e),
    };
    let mut out = String::new();
    for r in &reports {
        let _ = writeln!(out, "{r}");
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    let _ = writeln!(out, "{passed}/{} passed", reports.len());
    Outcome {
        code: if passed == reports.len() {
            EXIT_OK
        } else {
            EXIT_FAIL
        },
        report: out,
    }
}
