//! Sectioned `key = value` configuration files.
//!
//! ```text
//! [grid]
//! x_min = -30
//! x_max = 30
//! n_points = 2048
//!
//! [potential]
//! kind = sum
//! [potential.0]
//! kind = rectangular
//! v0 = 4.5
//! width = 1.0
//! ```
//!
//! `#` and `;` start comments. Sum members live in `[potential.<i>]`
//! sections, nested as deep as needed.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{make_grid, SpatialGrid, UnitSystem};
use crate::observables::RegionPartition;
use crate::potential::PotentialSpec;
use crate::propagator::{AbsorberSpec, DephasingSpec, TimeSteppingSpec, DEFAULT_SEED};
use crate::scalar::Real;
use crate::wavepacket::WavepacketSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

/// Explicit barrier bounds replacing the ones derived from the potential.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PartitionOverride {
    pub barrier_left: Option<f64>,
    pub barrier_right: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub grid: GridSpec,
    pub units: UnitSystem,
    pub wavepacket: WavepacketSpec,
    pub potential: PotentialSpec,
    /// `None` disables the boundary mask.
    pub absorber: Option<AbsorberSpec>,
    pub dephasing: DephasingSpec,
    pub stepping: TimeSteppingSpec,
    pub partition: PartitionOverride,
}

impl SimulationConfig {
    pub fn build_grid<T: Real>(&self) -> Result<SpatialGrid<T>> {
        make_grid(T::lit(self.grid.x_min), T::lit(self.grid.x_max), self.grid.n_points)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.build_grid::<f64>()?;
        UnitSystem::new(self.units.mass)?;
        self.wavepacket.validate()?;
        self.potential.validate("potential")?;
        self.potential.check_covers(&grid, "potential")?;
        if let Some(a) = &self.absorber {
            a.validate(&grid)?;
        }
        self.dephasing.validate()?;
        self.stepping.validate()?;
        self.partition(&grid)?;
        Ok(())
    }

    /// Reflected/transmitted region bounds for this run.
    pub fn partition<T: Real>(&self, grid: &SpatialGrid<T>) -> Result<RegionPartition> {
        let width = self.absorber.map_or(0.0, |a| a.layer_width);
        let mut p = RegionPartition::for_potential(&self.potential, grid, width);
        if let Some(l) = self.partition.barrier_left {
            p.barrier_left = l;
        }
        if let Some(r) = self.partition.barrier_right {
            p.barrier_right = r;
        }
        p.validate(grid)?;
        Ok(p)
    }
}

struct Entry {
    value: String,
    line: usize,
    used: bool,
}

struct Section {
    line: usize,
    entries: BTreeMap<String, Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.get_mut(key).map(|e| {
            e.used = true;
            (e.value.clone(), e.line)
        })
    }
}

struct Document {
    sections: BTreeMap<String, Section>,
}

fn is_known_section(name: &str) -> bool {
    match name {
        "grid" | "wavepacket" | "potential" | "absorber" | "dephasing" | "stepping" | "partition" => true,
        _ => name.strip_prefix("potential.").is_some_and(|rest| {
            rest.split('.')
                .all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit()))
        }),
    }
}

/// Every key any section may hold; keys valid only for another potential
/// kind are caught after parsing.
fn allowed_keys(section: &str) -> &'static [&'static str] {
    match section {
        "grid" => &["x_min", "x_max", "n_points", "mass"],
        "wavepacket" => &["x0", "k0", "sigma"],
        "absorber" => &["enabled", "layer_width", "strength"],
        "dephasing" => &["gamma", "seed"],
        "stepping" => &["dt", "t_final", "snapshot_stride"],
        "partition" => &["barrier_left", "barrier_right"],
        _ => &["kind", "v0", "width", "center", "sigma_v", "positions", "values"],
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(i) => &line[..i],
        None => line,
    }
}

fn tokenize(text: &str) -> Result<Document> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = strip_comment(raw).trim();
        if s.is_empty() {
            continue;
        }
        if let Some(inner) = s.strip_prefix('[') {
            let name = inner
                .strip_suffix(']')
                .ok_or_else(|| Error::Parse {
                    line,
                    message: format!("unterminated section header `{s}`"),
                })?
                .trim()
                .to_string();
            if !is_known_section(&name) {
                return Err(Error::UnknownKey {
                    key: format!("[{name}]"),
                    line,
                });
            }
            if sections.contains_key(&name) {
                return Err(Error::Parse {
                    line,
                    message: format!("section [{name}] appears twice"),
                });
            }
            sections.insert(
                name.clone(),
                Section {
                    line,
                    entries: BTreeMap::new(),
                },
            );
            current = Some(name);
            continue;
        }
        let (k, v) = s.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `key = value`, found `{s}`"),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(Error::Parse {
                line,
                message: format!("empty key or value in `{s}`"),
            });
        }
        let sec = current.as_ref().ok_or_else(|| Error::Parse {
            line,
            message: format!("`{k}` appears before any section header"),
        })?;
        let entries = &mut sections.get_mut(sec).expect("current section exists").entries;
        if !allowed_keys(sec).contains(&k) {
            return Err(Error::UnknownKey {
                key: format!("{sec}.{k}"),
                line,
            });
        }
        if entries.contains_key(k) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate key `{sec}.{k}`"),
            });
        }
        entries.insert(
            k.to_string(),
            Entry {
                value: v.to_string(),
                line,
                used: false,
            },
        );
    }
    if sections.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "configuration is empty".into(),
        });
    }
    Ok(Document { sections })
}

struct Reader {
    doc: Document,
}

impl Reader {
    fn raw(&mut self, section: &str, key: &str) -> Option<(String, usize)> {
        self.doc.sections.get_mut(section)?.take(key)
    }

    fn has_section(&self, section: &str) -> bool {
        self.doc.sections.contains_key(section)
    }

    fn f64_opt(&mut self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.raw(section, key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<f64>().map(Some).map_err(|_| Error::Parse {
                line,
                message: format!("`{section}.{key}` expects a number, found `{v}`"),
            }),
        }
    }

    fn f64_req(&mut self, section: &str, key: &str) -> Result<f64> {
        self.f64_opt(section, key)?
            .ok_or_else(|| Error::config(format!("{section}.{key}"), "required key is missing"))
    }

    fn int_opt(&mut self, section: &str, key: &str) -> Result<Option<u64>> {
        match self.raw(section, key) {
            None => Ok(None),
            Some((v, line)) => v.parse::<u64>().map(Some).map_err(|_| Error::Parse {
                line,
                message: format!("`{section}.{key}` expects a non-negative integer, found `{v}`"),
            }),
        }
    }

    fn list(&mut self, section: &str, key: &str) -> Result<Vec<f64>> {
        let (v, line) = self
            .raw(section, key)
            .ok_or_else(|| Error::config(format!("{section}.{key}"), "required key is missing"))?;
        v.split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    message: format!("`{section}.{key}` expects a comma-separated list of numbers"),
                })
            })
            .collect()
    }

    fn potential(&mut self, section: &str) -> Result<PotentialSpec> {
        if !self.has_section(section) {
            return Err(Error::config(section, "section is missing"));
        }
        let (kind, line) = self
            .raw(section, "kind")
            .ok_or_else(|| Error::config(format!("{section}.kind"), "required key is missing"))?;
        let center = |r: &mut Self| r.f64_opt(section, "center").map(|c| c.unwrap_or(0.0));
        Ok(match kind.as_str() {
            "free" => PotentialSpec::Free,
            "rectangular" => PotentialSpec::Rectangular {
                v0: self.f64_req(section, "v0")?,
                width: self.f64_req(section, "width")?,
                center: center(self)?,
            },
            "gaussian" => PotentialSpec::Gaussian {
                v0: self.f64_req(section, "v0")?,
                sigma_v: self.f64_req(section, "sigma_v")?,
                center: center(self)?,
            },
            "tabulated" => PotentialSpec::Tabulated {
                positions: self.list(section, "positions")?,
                values: self.list(section, "values")?,
            },
            "sum" => {
                let mut members = Vec::new();
                while self.has_section(&format!("{section}.{}", members.len())) {
                    let child = format!("{section}.{}", members.len());
                    members.push(self.potential(&child)?);
                }
                PotentialSpec::Sum { members }
            }
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "`{section}.kind` must be free, rectangular, gaussian, sum or tabulated, found `{other}`"
                    ),
                })
            }
        })
    }

    /// Rejects keys nobody consumed and member sections not reachable from
    /// `[potential]`.
    fn finish(self) -> Result<()> {
        let mut first: Option<(usize, String)> = None;
        for (name, sec) in &self.doc.sections {
            let consumed = sec.entries.values().any(|e| e.used) || sec.entries.is_empty();
            if name.starts_with("potential.") && !consumed {
                first = first.min_by_line(sec.line, format!("[{name}]"));
            }
            for (k, e) in &sec.entries {
                if !e.used {
                    first = first.min_by_line(e.line, format!("{name}.{k}"));
                }
            }
        }
        match first {
            Some((line, key)) => Err(Error::UnknownKey { key, line }),
            None => Ok(()),
        }
    }
}

trait MinByLine {
    fn min_by_line(self, line: usize, key: String) -> Self;
}

impl MinByLine for Option<(usize, String)> {
    fn min_by_line(self, line: usize, key: String) -> Self {
        match self {
            Some((l, k)) if l <= line => Some((l, k)),
            _ => Some((line, key)),
        }
    }
}

/// Parses and validates configuration text.
pub fn parse_config(text: &str) -> Result<SimulationConfig> {
    let mut r = Reader { doc: tokenize(text)? };
    for s in ["grid", "wavepacket", "potential", "stepping"] {
        if !r.has_section(s) {
            return Err(Error::config(s, "section is missing"));
        }
    }

    let n_points = r
        .int_opt("grid", "n_points")?
        .ok_or_else(|| Error::config("grid.n_points", "required key is missing"))?;
    let grid = GridSpec {
        x_min: r.f64_req("grid", "x_min")?,
        x_max: r.f64_req("grid", "x_max")?,
        n_points: usize::try_from(n_points).map_err(|_| Error::config("grid.n_points", "too large"))?,
    };
    let units = UnitSystem {
        mass: r.f64_opt("grid", "mass")?.unwrap_or(1.0),
    };
    let wavepacket = WavepacketSpec {
        x0: r.f64_req("wavepacket", "x0")?,
        k0: r.f64_req("wavepacket", "k0")?,
        sigma: r.f64_req("wavepacket", "sigma")?,
    };
    let potential = r.potential("potential")?;

    let absorber = {
        let enabled = match r.raw("absorber", "enabled") {
            None => true,
            Some((v, line)) => match v.as_str() {
                "true" => true,
                "false" => false,
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: format!("`absorber.enabled` expects true or false, found `{v}`"),
                    })
                }
            },
        };
        let d = AbsorberSpec::default();
        let spec = AbsorberSpec {
            layer_width: r.f64_opt("absorber", "layer_width")?.unwrap_or(d.layer_width),
            strength: r.f64_opt("absorber", "strength")?.unwrap_or(d.strength),
        };
        enabled.then_some(spec)
    };
    let dephasing = DephasingSpec {
        gamma: r.f64_opt("dephasing", "gamma")?.unwrap_or(0.0),
        seed: r.int_opt("dephasing", "seed")?.unwrap_or(DEFAULT_SEED),
    };
    let snapshot_stride = match r.raw("stepping", "snapshot_stride") {
        None => None,
        Some((v, _)) if v == "auto" => None,
        Some((v, line)) => Some(v.parse::<usize>().map_err(|_| Error::Parse {
            line,
            message: format!("`stepping.snapshot_stride` expects a positive integer or `auto`, found `{v}`"),
        })?),
    };
    let stepping = TimeSteppingSpec {
        dt: r.f64_req("stepping", "dt")?,
        t_final: r.f64_req("stepping", "t_final")?,
        snapshot_stride,
    };
    let partition = PartitionOverride {
        barrier_left: r.f64_opt("partition", "barrier_left")?,
        barrier_right: r.f64_opt("partition", "barrier_right")?,
    };
    r.finish()?;

    let config = SimulationConfig {
        grid,
        units,
        wavepacket,
        potential,
        absorber,
        dephasing,
        stepping,
        partition,
    };
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<SimulationConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(", ")
}

fn dump_potential(out: &mut String, section: &str, spec: &PotentialSpec) {
    let _ = writeln!(out, "\n[{section}]");
    match spec {
        PotentialSpec::Free => {
            let _ = writeln!(out, "kind = free");
        }
        PotentialSpec::Rectangular { v0, width, center } => {
            let _ = writeln!(out, "kind = rectangular\nv0 = {v0}\nwidth = {width}\ncenter = {center}");
        }
        PotentialSpec::Gaussian { v0, sigma_v, center } => {
            let _ = writeln!(
                out,
                "kind = gaussian\nv0 = {v0}\nsigma_v = {sigma_v}\ncenter = {center}"
            );
        }
        PotentialSpec::Tabulated { positions, values } => {
            let _ = writeln!(
                out,
                "kind = tabulated\npositions = {}\nvalues = {}",
                join(positions),
                join(values)
            );
        }
        PotentialSpec::Sum { members } => {
            let _ = writeln!(out, "kind = sum");
            for (i, m) in members.iter().enumerate() {
                dump_potential(out, &format!("{section}.{i}"), m);
            }
        }
    }
}

/// Renders a config in the same text format; `parse_config(dump_config(c)) == c`.
pub fn dump_config(c: &SimulationConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "[grid]\nx_min = {}\nx_max = {}\nn_points = {}\nmass = {}",
        c.grid.x_min, c.grid.x_max, c.grid.n_points, c.units.mass
    );
    let w = &c.wavepacket;
    let _ = writeln!(out, "\n[wavepacket]\nx0 = {}\nk0 = {}\nsigma = {}", w.x0, w.k0, w.sigma);
    dump_potential(&mut out, "potential", &c.potential);
    match &c.absorber {
        Some(a) => {
            let _ = writeln!(
                out,
                "\n[absorber]\nlayer_width = {}\nstrength = {}",
                a.layer_width, a.strength
            );
        }
        None => {
            let _ = writeln!(out, "\n[absorber]\nenabled = false");
        }
    }
    let _ = writeln!(
        out,
        "\n[dephasing]\ngamma = {}\nseed = {}",
        c.dephasing.gamma, c.dephasing.seed
    );
    let s = &c.stepping;
    let stride = s.snapshot_stride.map_or("auto".to_string(), |n| n.to_string());
    let _ = writeln!(
        out,
        "\n[stepping]\ndt = {}\nt_final = {}\nsnapshot_stride = {stride}",
        s.dt, s.t_final
    );
    if c.partition != PartitionOverride::default() {
        let _ = writeln!(out, "\n[partition]");
        if let Some(l) = c.partition.barrier_left {
            let _ = writeln!(out, "barrier_left = {l}");
        }
        if let Some(r) = c.partition.barrier_right {
            let _ = writeln!(out, "barrier_right = {r}");
        }
    }
    out
}
