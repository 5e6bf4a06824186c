//! Scene files.
//!
//! A scene is a TOML document. Points are `[x, y]`, complex numbers are
//! `[re, im]`, and an m×m matrix is a flat row-major list of m² complex
//! pairs.
//!
//! ```toml
//! seed = 0
//! path = "loop"              # which named path the subcommands use
//! basepoint = [-2.0, 0.0]    # optional, for monodromy
//!
//! [tolerances]
//! transport_tol = 1e-9
//! guard = 1e-9
//!
//! [connection]
//! kind = "multi_solenoid"
//! punctures = [[0.0, 0.0]]
//! fluxes = [1.7]
//!
//! [paths.loop]
//! kind = "circle"
//! center = [0.0, 0.0]
//! radius = 2.0
//! ```
//!
//! Connection kinds: `multi_solenoid` (punctures, fluxes, labels),
//! `aharonov_bohm` (flux), `fuchsian_log` (punctures, residues, polynomial,
//! labels), `aharonov_casher` (lambda), `constant_field` (b), `custom`
//! (constant matrices a1, a2, optional punctures) and `builtin` (name).
//!
//! Path kinds: `circle` (center, radius, turns, start_angle), `arc` (center,
//! radius, start_angle, sweep), `polyline` (points), `rectangle` (xmin, xmax,
//! ymin, ymax) and `concat` (parts, naming other paths).
//!
//! Optional tables: `[wong]` (basis = "su2" | "u1", initial, trials),
//! `[region]` (xmin, xmax, ymin, ymax, nx, ny), `[vacua]` (matrix),
//! `[monodromy]` (word) and `[transport]` (samples, initial).

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::Deserialize;

use crate::builtin;
use crate::connection::{ConnectionSpec, GridRegion, LieBasis, POLE_GUARD};
use crate::error::Error;
use crate::geometry::{PathSpec, PlanePoint, PunctureSet};
use crate::linalg::{self, CMat};
use crate::monodromy::LoopWord;
use crate::transport::check_tol;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_SAMPLES: usize = 101;
pub const DEFAULT_TRIALS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    Validation {
        key: String,
        line: Option<usize>,
        message: String,
    },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse {
                line,
                column,
                message,
            } => write!(f, "parse error at line {line}, column {column}: {message}"),
            ConfigError::Validation { key, line, message } => match line {
                Some(l) => write!(f, "invalid `{key}` (line {l}): {message}"),
                None => write!(f, "invalid `{key}`: {message}"),
            },
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone)]
pub struct WongConfig {
    pub basis: LieBasis,
    pub initial: Vec<f64>,
    pub trials: usize,
}

#[derive(Debug, Clone)]
pub struct SceneConfig {
    pub connection: Option<ConnectionSpec>,
    pub paths: BTreeMap<String, PathSpec>,
    pub path: Option<String>,
    pub basepoint: Option<PlanePoint>,
    pub transport_tol: f64,
    pub guard: f64,
    pub seed: u64,
    pub wong: Option<WongConfig>,
    pub region: Option<GridRegion>,
    pub vacuum_matrix: Option<CMat>,
    pub word: Option<LoopWord>,
    pub samples: usize,
    pub initial_vector: Option<Vec<Complex64>>,
}

impl SceneConfig {
    /// The path selected by the top-level `path` key, or the only path.
    pub fn selected_path(&self) -> Option<(&str, &PathSpec)> {
        match &self.path {
            Some(name) => self.paths.get_key_value(name).map(|(k, v)| (k.as_str(), v)),
            None if self.paths.len() == 1 => self.paths.iter().next().map(|(k, v)| (k.as_str(), v)),
            None => None,
        }
    }
}

type Pair = [f64; 2];

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScene {
    seed: Option<u64>,
    path: Option<String>,
    basepoint: Option<Pair>,
    tolerances: Option<RawTolerances>,
    connection: Option<RawConnection>,
    #[serde(default)]
    paths: BTreeMap<String, RawPath>,
    wong: Option<RawWong>,
    region: Option<RawRegion>,
    vacua: Option<RawVacua>,
    monodromy: Option<RawMonodromy>,
    transport: Option<RawTransport>,
}

// Untagged view of the `kind` tables, used only to locate type errors.
#[derive(Deserialize)]
struct FlatScene {
    #[serde(rename = "connection")]
    _connection: Option<FlatConnection>,
    #[serde(default, rename = "paths")]
    _paths: BTreeMap<String, FlatPath>,
}

#[derive(Deserialize)]
#[allow(dead_code)]
struct FlatConnection {
    kind: String,
    punctures: Option<Vec<Pair>>,
    fluxes: Option<Vec<f64>>,
    labels: Option<Vec<String>>,
    flux: Option<f64>,
    residues: Option<Vec<Vec<Pair>>>,
    polynomial: Option<Vec<Vec<Pair>>>,
    lambda: Option<f64>,
    b: Option<f64>,
    a1: Option<Vec<Pair>>,
    a2: Option<Vec<Pair>>,
    name: Option<String>,
}

#[derive(Deserialize)]
#[allow(dead_code)]
struct FlatPath {
    kind: String,
    center: Option<Pair>,
    radius: Option<f64>,
    turns: Option<i32>,
    start_angle: Option<f64>,
    sweep: Option<f64>,
    points: Option<Vec<Pair>>,
    xmin: Option<f64>,
    xmax: Option<f64>,
    ymin: Option<f64>,
    ymax: Option<f64>,
    parts: Option<Vec<String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    transport_tol: Option<f64>,
    guard: Option<f64>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawConnection {
    MultiSolenoid {
        punctures: Vec<Pair>,
        fluxes: Vec<f64>,
        labels: Option<Vec<String>>,
    },
    AharonovBohm {
        flux: f64,
    },
    FuchsianLog {
        punctures: Vec<Pair>,
        residues: Vec<Vec<Pair>>,
        #[serde(default)]
        polynomial: Vec<Vec<Pair>>,
        labels: Option<Vec<String>>,
    },
    AharonovCasher {
        lambda: f64,
    },
    ConstantField {
        b: f64,
    },
    Custom {
        a1: Vec<Pair>,
        a2: Vec<Pair>,
        #[serde(default)]
        punctures: Vec<Pair>,
        labels: Option<Vec<String>>,
    },
    Builtin {
        name: String,
    },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawPath {
    Circle {
        center: Pair,
        radius: f64,
        turns: Option<i32>,
        start_angle: Option<f64>,
    },
    Arc {
        center: Pair,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
    Polyline {
        points: Vec<Pair>,
    },
    Rectangle {
        xmin: f64,
        xmax: f64,
        ymin: f64,
        ymax: f64,
    },
    Concat {
        parts: Vec<String>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWong {
    basis: Option<String>,
    initial: Vec<f64>,
    trials: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegion {
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
    nx: usize,
    ny: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVacua {
    matrix: Vec<Pair>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMonodromy {
    word: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransport {
    samples: Option<usize>,
    initial: Option<Vec<Pair>>,
}

/// Line (1-based) of `key` inside `[table]`, or of the table header when
/// `key` is empty. Dotted tables such as `paths.loop` are matched verbatim.
fn key_line(text: &str, table: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            current = line
                .trim_matches(|ch| ch == '[' || ch == ']')
                .trim()
                .to_string();
            if key.is_empty() && current == table {
                return Some(i + 1);
            }
            continue;
        }
        if current == table && !key.is_empty() {
            if let Some(rest) = line.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

struct Validator<'a> {
    text: &'a str,
}

impl Validator<'_> {
    fn err(&self, table: &str, key: &str, message: impl Into<String>) -> ConfigError {
        let line = key_line(self.text, table, key).or_else(|| key_line(self.text, table, ""));
        let full = match (table.is_empty(), key.is_empty()) {
            (true, _) => key.to_string(),
            (false, true) => table.to_string(),
            (false, false) => format!("{table}.{key}"),
        };
        ConfigError::Validation {
            key: full,
            line,
            message: message.into(),
        }
    }
}

fn points(raw: &[Pair]) -> Vec<PlanePoint> {
    raw.iter().map(|p| PlanePoint::new(p[0], p[1])).collect()
}

fn complexes(raw: &[Pair]) -> Vec<Complex64> {
    raw.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

fn matrix(raw: &[Pair]) -> std::result::Result<CMat, String> {
    let m = (raw.len() as f64).sqrt().round() as usize;
    if m == 0 || m * m != raw.len() {
        return Err(format!("{} entries do not form a square matrix", raw.len()));
    }
    linalg::from_row_major(m, &complexes(raw)).map_err(|e| e.to_string())
}

fn puncture_set(raw: &[Pair], labels: Option<Vec<String>>) -> Result<PunctureSet, Error> {
    match labels {
        Some(l) => PunctureSet::new(points(raw), l),
        None => PunctureSet::unlabelled(points(raw)),
    }
}

fn build_connection(v: &Validator, raw: RawConnection) -> Result<ConnectionSpec, ConfigError> {
    let t = "connection";
    let conn = match raw {
        RawConnection::MultiSolenoid {
            punctures,
            fluxes,
            labels,
        } => {
            if fluxes.len() != punctures.len() {
                return Err(v.err(
                    t,
                    "fluxes",
                    format!("{} fluxes for {} punctures", fluxes.len(), punctures.len()),
                ));
            }
            let set = puncture_set(&punctures, labels)
                .map_err(|e| v.err(t, "punctures", e.to_string()))?;
            ConnectionSpec::multi_solenoid(set, fluxes)
                .map_err(|e| v.err(t, "fluxes", e.to_string()))?
        }
        RawConnection::AharonovBohm { flux } => ConnectionSpec::aharonov_bohm(flux),
        RawConnection::FuchsianLog {
            punctures,
            residues,
            polynomial,
            labels,
        } => {
            if residues.len() != punctures.len() {
                return Err(v.err(
                    t,
                    "residues",
                    format!(
                        "{} residues for {} punctures",
                        residues.len(),
                        punctures.len()
                    ),
                ));
            }
            let set = puncture_set(&punctures, labels)
                .map_err(|e| v.err(t, "punctures", e.to_string()))?;
            let residues = residues
                .iter()
                .map(|r| matrix(r))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| v.err(t, "residues", e))?;
            let polynomial = polynomial
                .iter()
                .map(|r| matrix(r))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| v.err(t, "polynomial", e))?;
            ConnectionSpec::fuchsian_log(set, residues, polynomial)
                .map_err(|e| v.err(t, "residues", e.to_string()))?
        }
        RawConnection::AharonovCasher { lambda } => ConnectionSpec::aharonov_casher(lambda),
        RawConnection::ConstantField { b } => ConnectionSpec::constant_field(b),
        RawConnection::Custom {
            a1,
            a2,
            punctures,
            labels,
        } => {
            let a1 = matrix(&a1).map_err(|e| v.err(t, "a1", e))?;
            let a2 = matrix(&a2).map_err(|e| v.err(t, "a2", e))?;
            if a1.shape() != a2.shape() {
                return Err(v.err(t, "a2", "a1 and a2 must have the same size"));
            }
            let set = puncture_set(&punctures, labels)
                .map_err(|e| v.err(t, "punctures", e.to_string()))?;
            ConnectionSpec::custom(a1.nrows(), set, move |_| a1.clone(), move |_| a2.clone())
        }
        RawConnection::Builtin { name } => builtin::by_name(&name).ok_or_else(|| {
            let known: Vec<&str> = builtin::all().iter().map(|(n, _)| *n).collect();
            v.err(
                t,
                "name",
                format!("unknown scene `{name}`; known: {}", known.join(", ")),
            )
        })?,
    };
    conn.validate().map_err(|e| v.err(t, "", e.to_string()))?;
    Ok(conn)
}

fn build_path(
    v: &Validator,
    name: &str,
    raw: &BTreeMap<String, RawPath>,
    done: &mut BTreeMap<String, PathSpec>,
    visiting: &mut Vec<String>,
) -> Result<PathSpec, ConfigError> {
    if let Some(p) = done.get(name) {
        return Ok(p.clone());
    }
    let table = format!("paths.{name}");
    let Some(spec) = raw.get(name) else {
        let parent = visiting
            .last()
            .map(|p| format!("paths.{p}"))
            .unwrap_or_default();
        return Err(v.err(&parent, "parts", format!("unknown path `{name}`")));
    };
    if visiting.iter().any(|n| n == name) {
        return Err(v.err(&table, "parts", format!("path `{name}` refers to itself")));
    }
    visiting.push(name.to_string());
    let built = match spec {
        RawPath::Circle {
            center,
            radius,
            turns,
            start_angle,
        } => PathSpec::circle(
            PlanePoint::new(center[0], center[1]),
            *radius,
            turns.unwrap_or(1),
            start_angle.unwrap_or(0.0),
        ),
        RawPath::Arc {
            center,
            radius,
            start_angle,
            sweep,
        } => PathSpec::arc(
            PlanePoint::new(center[0], center[1]),
            *radius,
            *start_angle,
            *sweep,
        ),
        RawPath::Polyline { points: pts } => PathSpec::polyline(points(pts)),
        RawPath::Rectangle {
            xmin,
            xmax,
            ymin,
            ymax,
        } => PathSpec::rectangle(*xmin, *xmax, *ymin, *ymax),
        RawPath::Concat { parts } => {
            let mut built = Vec::with_capacity(parts.len());
            for part in parts {
                built.push(build_path(v, part, raw, done, visiting)?);
            }
            PathSpec::concat_all(built)
        }
    }
    .map_err(|e| v.err(&table, "", e.to_string()))?;
    visiting.pop();
    done.insert(name.to_string(), built.clone());
    Ok(built)
}

/// Parses and validates a scene.
pub fn parse_config(text: &str) -> Result<SceneConfig, ConfigError> {
    let to_error = |e: toml::de::Error| {
        let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((1, 1));
        ConfigError::Parse {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    };
    let raw: RawScene = toml::from_str(text).map_err(|e| {
        // tagged tables only report their own span; the flat view pinpoints the value
        match toml::from_str::<FlatScene>(text) {
            Err(flat) if flat.span().is_some() => to_error(flat),
            _ => to_error(e),
        }
    })?;
    let v = Validator { text };

    let tol = raw
        .tolerances
        .as_ref()
        .and_then(|t| t.transport_tol)
        .unwrap_or(DEFAULT_TOL);
    check_tol(tol).map_err(|e| v.err("tolerances", "transport_tol", e.to_string()))?;
    let guard = raw
        .tolerances
        .as_ref()
        .and_then(|t| t.guard)
        .unwrap_or(POLE_GUARD);
    if !(POLE_GUARD..=1.0).contains(&guard) {
        return Err(v.err(
            "tolerances",
            "guard",
            format!("{guard:e} outside [1e-9, 1]"),
        ));
    }

    let connection = raw
        .connection
        .map(|c| build_connection(&v, c))
        .transpose()?;

    let mut paths = BTreeMap::new();
    for name in raw.paths.keys() {
        build_path(&v, name, &raw.paths, &mut paths, &mut Vec::new())?;
    }
    if let Some(p) = &raw.path {
        if !paths.contains_key(p) {
            return Err(v.err("", "path", format!("no path named `{p}`")));
        }
    }

    let basepoint = raw.basepoint.map(|b| PlanePoint::new(b[0], b[1]));
    if let Some(b) = basepoint {
        if !b.is_finite() {
            return Err(v.err("", "basepoint", "must be finite"));
        }
    }

    let wong = match raw.wong {
        Some(w) => {
            let basis = match w.basis.as_deref().unwrap_or("su2") {
                "su2" => LieBasis::su2(),
                "u1" => LieBasis::u1(),
                other => return Err(v.err("wong", "basis", format!("unknown basis `{other}`"))),
            };
            if w.initial.len() != basis.dim() {
                return Err(v.err(
                    "wong",
                    "initial",
                    format!(
                        "{} components for a basis of dimension {}",
                        w.initial.len(),
                        basis.dim()
                    ),
                ));
            }
            Some(WongConfig {
                basis,
                initial: w.initial,
                trials: w.trials.unwrap_or(DEFAULT_TRIALS),
            })
        }
        None => None,
    };

    let region = raw
        .region
        .map(|r| GridRegion::new(r.xmin, r.xmax, r.ymin, r.ymax, r.nx, r.ny))
        .transpose()
        .map_err(|e| v.err("region", "", e.to_string()))?;

    let vacuum_matrix = raw
        .vacua
        .map(|vac| matrix(&vac.matrix))
        .transpose()
        .map_err(|e| v.err("vacua", "matrix", e))?;

    let word = raw
        .monodromy
        .map(|m| m.word.parse::<LoopWord>())
        .transpose()
        .map_err(|e| v.err("monodromy", "word", e.to_string()))?;

    let samples = raw
        .transport
        .as_ref()
        .and_then(|t| t.samples)
        .unwrap_or(DEFAULT_SAMPLES);
    if samples < 2 {
        return Err(v.err("transport", "samples", "need at least 2 samples"));
    }
    let initial_vector = raw.transport.and_then(|t| t.initial).map(|i| complexes(&i));
    if let (Some(iv), Some(conn)) = (&initial_vector, &connection) {
        if iv.len() != conn.rank() {
            return Err(v.err(
                "transport",
                "initial",
                format!("{} entries for rank {}", iv.len(), conn.rank()),
            ));
        }
    }

    Ok(SceneConfig {
        connection,
        paths,
        path: raw.path,
        basepoint,
        transport_tol: tol,
        guard,
        seed: raw.seed.unwrap_or(0),
        wong,
        region,
        vacuum_matrix,
        word,
        samples,
        initial_vector,
    })
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rfind('\n')
        .map_or(before.len(), |p| before.len() - p - 1)
        + 1;
    (line, column)
}
