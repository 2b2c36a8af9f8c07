//! TOML run configuration.
//!
//! Keys are looked up by hand so that every error names its full key path.

use std::path::{Path, PathBuf};

use serde::Serialize;
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::model::{Boundary, CellGrid, PhysicalParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    IdealFree,
    IdealHarmonic,
    Bogoliubov,
    Oracle,
}

impl SystemKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "ideal-free" => SystemKind::IdealFree,
            "ideal-harmonic" => SystemKind::IdealHarmonic,
            "bogoliubov" => SystemKind::Bogoliubov,
            "oracle" => SystemKind::Oracle,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            SystemKind::IdealFree => "ideal-free",
            SystemKind::IdealHarmonic => "ideal-harmonic",
            SystemKind::Bogoliubov => "bogoliubov",
            SystemKind::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteractionSpec {
    /// Constant `v(k) = v0`.
    pub v0: f64,
    /// Tabulated `v(k)` in plane-wave mode order; overrides `v0`.
    pub table: Option<Vec<f64>>,
    /// On-site repulsion of the oracle Hamiltonian.
    pub onsite_u: f64,
    /// Gaussian long-wavelength cut applied to the Bogoliubov propagator.
    pub k_cut: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputSpec {
    /// Resolved against the config file's directory when relative.
    pub directory: PathBuf,
    pub prefix: String,
    /// Adds wall-clock time to the manifest, which makes it run-dependent.
    pub record_timing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub kind: SystemKind,
    pub params: PhysicalParams,
    pub grid: CellGrid,
    pub particles: usize,
    /// Extra particle numbers for the oracle scaling table of `compare`.
    pub particle_scan: Vec<usize>,
    pub interaction: InteractionSpec,
    pub measured_cell: usize,
    pub times: Vec<f64>,
    pub positions: Vec<usize>,
    pub tolerance: f64,
    pub series_tolerance: f64,
    pub output: OutputSpec,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnknownKeys {
    #[default]
    Reject,
    Warn,
}

const KNOWN: &[(&str, &[&str])] = &[
    ("system", &["kind", "mass", "hbar", "omega", "particles", "particle_scan"]),
    ("grid", &["dimension", "cells_per_side", "cell_volume"]),
    ("interaction", &["v0", "table", "onsite_u", "k_cut"]),
    (
        "measurement",
        &["cell", "times", "t_start", "t_stop", "t_step", "positions", "tolerance", "series_tolerance"],
    ),
    ("output", &["directory", "prefix", "record_timing"]),
];

pub fn load_config(path: &Path, unknown: UnknownKeys) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base, unknown)
}

/// Parses and validates a config; relative output paths are joined to `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path, unknown: UnknownKeys) -> Result<RunConfig> {
    let doc: Table = text.parse().map_err(|e: toml::de::Error| Error::config("<document>", e.message().to_string()))?;
    let mut warnings = Vec::new();
    check_keys(&doc, unknown, &mut warnings)?;
    let empty = Table::new();
    let section = |name: &str| -> Result<&Table> {
        match doc.get(name) {
            None => Ok(&empty),
            Some(Value::Table(t)) => Ok(t),
            Some(_) => Err(Error::config(name, "expected a table")),
        }
    };
    let system = Section::new("system", section("system")?);
    let grid_s = Section::new("grid", section("grid")?);
    let inter = Section::new("interaction", section("interaction")?);
    let meas = Section::new("measurement", section("measurement")?);
    let out = Section::new("output", section("output")?);

    let kind_name = system.string("kind")?.ok_or_else(|| Error::config("system.kind", "missing required key"))?;
    let kind = SystemKind::parse(&kind_name).ok_or_else(|| {
        Error::config("system.kind", format!("unknown kind {kind_name:?}; expected ideal-free, ideal-harmonic, bogoliubov or oracle"))
    })?;

    let mass = system.float("mass")?.unwrap_or(1.0);
    let hbar = system.float("hbar")?.unwrap_or(1.0);
    let cell_volume = grid_s.float("cell_volume")?.unwrap_or(1.0);
    let mut params = PhysicalParams::new(mass, hbar, cell_volume).map_err(|e| Error::config("system", e.to_string()))?;
    let omega = system.float("omega")?;
    if kind == SystemKind::IdealHarmonic && omega.is_none() {
        return Err(Error::config("system.omega", "missing required key for an ideal-harmonic system"));
    }
    if let Some(w) = omega {
        params = params.with_trap(w).map_err(|e| Error::config("system.omega", e.to_string()))?;
    }

    let particles = system.count("particles")?.ok_or_else(|| Error::config("system.particles", "missing required key"))?;
    if particles < 1 {
        return Err(Error::config("system.particles", "need at least one particle"));
    }
    let particle_scan = system.counts("particle_scan")?.unwrap_or_default();
    if particle_scan.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("system.particle_scan", "particle numbers must increase"));
    }

    let dimension = grid_s.count("dimension")?.unwrap_or(1);
    let cells_per_side = grid_s
        .count("cells_per_side")?
        .ok_or_else(|| Error::config("grid.cells_per_side", "missing required key"))?;
    let boundary = if params.trap_frequency.is_some() && matches!(kind, SystemKind::IdealHarmonic | SystemKind::Oracle) {
        Boundary::Centered
    } else {
        Boundary::Periodic
    };
    let grid = CellGrid::new(dimension, cells_per_side, boundary, cell_volume).map_err(|e| Error::config("grid", e.to_string()))?;
    if kind == SystemKind::Bogoliubov && omega.is_some() {
        warnings.push("system.omega is ignored for a bogoliubov system".into());
    }

    let interaction = InteractionSpec {
        v0: inter.float("v0")?.unwrap_or(0.0),
        table: inter.floats("table")?,
        onsite_u: inter.float("onsite_u")?.unwrap_or(0.0),
        k_cut: inter.float("k_cut")?,
    };
    if interaction.v0 < 0.0 {
        return Err(Error::config("interaction.v0", "attractive interaction is unstable"));
    }
    if interaction.onsite_u < 0.0 {
        return Err(Error::config("interaction.onsite_u", "must be >= 0"));
    }
    if let Some(kc) = interaction.k_cut {
        if !(kc > 0.0) {
            return Err(Error::config("interaction.k_cut", "must be > 0"));
        }
    }

    let measured_cell = meas.count("cell")?.unwrap_or_else(|| grid.origin_cell());
    if measured_cell >= grid.num_cells() {
        return Err(Error::config("measurement.cell", format!("index {measured_cell} out of range 0..{}", grid.num_cells())));
    }
    let times = read_times(&meas)?;
    let positions = match meas.counts("positions")? {
        Some(p) => {
            if let Some(bad) = p.iter().find(|&&r| r >= grid.num_cells()) {
                return Err(Error::config("measurement.positions", format!("cell {bad} out of range 0..{}", grid.num_cells())));
            }
            p
        }
        None => (0..grid.num_cells()).collect(),
    };
    let tolerance = meas.float("tolerance")?.unwrap_or(1e-8);
    let series_tolerance = meas.float("series_tolerance")?.unwrap_or(1e-10);
    for (key, v) in [("measurement.tolerance", tolerance), ("measurement.series_tolerance", series_tolerance)] {
        if !(v > 0.0) {
            return Err(Error::config(key, "tolerances must be > 0"));
        }
    }

    let directory = PathBuf::from(out.string("directory")?.unwrap_or_else(|| "out".into()));
    let output = OutputSpec {
        directory: if directory.is_absolute() { directory } else { base_dir.join(directory) },
        prefix: out.string("prefix")?.unwrap_or_else(|| kind.name().into()),
        record_timing: out.boolean("record_timing")?.unwrap_or(false),
    };

    Ok(RunConfig {
        kind,
        params,
        grid,
        particles,
        particle_scan,
        interaction,
        measured_cell,
        times,
        positions,
        tolerance,
        series_tolerance,
        output,
        warnings,
    })
}

fn read_times(meas: &Section) -> Result<Vec<f64>> {
    let times = match meas.floats("times")? {
        Some(t) => t,
        None => {
            let stop = meas
                .float("t_stop")?
                .ok_or_else(|| Error::config("measurement.times", "missing; give `times` or `t_stop` with `t_step`"))?;
            let start = meas.float("t_start")?.unwrap_or(0.0);
            let step = meas.float("t_step")?.ok_or_else(|| Error::config("measurement.t_step", "missing required key"))?;
            if !(step > 0.0) {
                return Err(Error::config("measurement.t_step", "must be > 0"));
            }
            let n = ((stop - start) / step + 1e-9).floor();
            if n < 0.0 {
                return Err(Error::config("measurement.t_stop", "must not precede t_start"));
            }
            (0..=n as usize).map(|k| start + k as f64 * step).collect()
        }
    };
    if times.is_empty() {
        return Err(Error::config("measurement.times", "empty time list"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("measurement.times", "non-increasing times"));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::config("measurement.times", "times must be finite"));
    }
    Ok(times)
}

fn check_keys(doc: &Table, unknown: UnknownKeys, warnings: &mut Vec<String>) -> Result<()> {
    let mut report = |path: String| -> Result<()> {
        match unknown {
            UnknownKeys::Reject => Err(Error::config(path, "unknown key")),
            UnknownKeys::Warn => {
                warnings.push(format!("unknown key `{path}` ignored"));
                Ok(())
            }
        }
    };
    for (name, value) in doc {
        let Some((_, keys)) = KNOWN.iter().find(|(s, _)| s == name) else {
            report(name.clone())?;
            continue;
        };
        if let Value::Table(t) = value {
            for key in t.keys() {
                if !keys.contains(&key.as_str()) {
                    report(format!("{name}.{key}"))?;
                }
            }
        }
    }
    Ok(())
}

struct Section<'a> {
    name: &'static str,
    table: &'a Table,
}

impl<'a> Section<'a> {
    fn new(name: &'static str, table: &'a Table) -> Self {
        Section { name, table }
    }

    fn path(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn mismatch(&self, key: &str, want: &str, got: &Value) -> Error {
        Error::config(self.path(key), format!("expected {want}, found {}", got.type_str()))
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Float(x)) => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(v) => Err(self.mismatch(key, "a number", v)),
        }
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
            Some(v) => Err(self.mismatch(key, "a non-negative integer", v)),
        }
    }

    fn string(&self, key: &str) -> Result<Option<String>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(v) => Err(self.mismatch(key, "a string", v)),
        }
    }

    fn boolean(&self, key: &str) -> Result<Option<bool>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(*b)),
            Some(v) => Err(self.mismatch(key, "a boolean", v)),
        }
    }

    fn array(&self, key: &str) -> Result<Option<&'a Vec<Value>>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Array(a)) => Ok(Some(a)),
            Some(v) => Err(self.mismatch(key, "an array", v)),
        }
    }

    fn floats(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(a) = self.array(key)? else { return Ok(None) };
        a.iter()
            .enumerate()
            .map(|(i, v)| match v {
                Value::Float(x) => Ok(*x),
                Value::Integer(n) => Ok(*n as f64),
                other => Err(self.mismatch(&format!("{key}[{i}]"), "a number", other)),
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn counts(&self, key: &str) -> Result<Option<Vec<usize>>> {
        let Some(a) = self.array(key)? else { return Ok(None) };
        a.iter()
            .enumerate()
            .map(|(i, v)| match v {
                Value::Integer(n) if *n >= 0 => Ok(*n as usize),
                other => Err(self.mismatch(&format!("{key}[{i}]"), "a non-negative integer", other)),
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }
}
