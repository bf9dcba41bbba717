//! INI scenario files with sections `[physical]`, `[bath]`, `[time]` and
//! `[output]`.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;
use reservoir_core::discrete::{decimation_for, default_dt, max_stable_dt};
use reservoir_core::model::discretize_bath;
use reservoir_core::PhysicalParams;
use serde::Serialize;

use crate::error::{CliError, Result};

pub const DEFAULT_N_MODES: usize = 2001;
pub const DEFAULT_TOLERANCE: f64 = 1e-3;
/// Upper bound on stored snapshots when `sample_every` is not given.
pub const DEFAULT_MAX_SAMPLES: usize = 2000;

const SECTIONS: [(&str, &[&str]); 4] = [
    (
        "physical",
        &["gamma", "coupling_ratio", "omega0", "detuning", "atom_frequency", "reservoir_center"],
    ),
    ("bath", &["n_modes", "half_span"]),
    ("time", &["t_end", "dt", "sample_every", "tolerance"]),
    ("output", &["directory", "artifacts", "method"]),
];

/// Keys a sweep may vary.
pub const SWEEP_KEYS: [&str; 8] = [
    "gamma",
    "coupling_ratio",
    "omega0",
    "detuning",
    "atom_frequency",
    "reservoir_center",
    "n_modes",
    "half_span",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Discrete,
    Analytic,
    Both,
}

impl Method {
    pub fn discrete(self) -> bool {
        matches!(self, Method::Discrete | Method::Both)
    }

    pub fn analytic(self) -> bool {
        matches!(self, Method::Analytic | Method::Both)
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "discrete" => Ok(Method::Discrete),
            "analytic" => Ok(Method::Analytic),
            "both" => Ok(Method::Both),
            other => Err(format!("expected discrete, analytic or both (got '{other}')")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Artifact {
    Population,
    Concurrence,
    Spectrum,
    EAtom,
    EModes,
    EModesInfinity,
    Peaks,
}

impl Artifact {
    pub const ALL: [Artifact; 7] = [
        Artifact::Population,
        Artifact::Concurrence,
        Artifact::Spectrum,
        Artifact::EAtom,
        Artifact::EModes,
        Artifact::EModesInfinity,
        Artifact::Peaks,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Artifact::Population => "population",
            Artifact::Concurrence => "concurrence",
            Artifact::Spectrum => "spectrum",
            Artifact::EAtom => "e_atom",
            Artifact::EModes => "e_modes",
            Artifact::EModesInfinity => "e_modes_infinity",
            Artifact::Peaks => "peaks",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.csv", self.name())
    }
}

impl FromStr for Artifact {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Artifact::ALL
            .into_iter()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| format!("unknown artifact '{}'", s.trim()))
    }
}

/// A fully resolved scenario. Every default has been filled in.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioConfig {
    pub params: PhysicalParams,
    pub coupling_ratio: f64,
    pub n_modes: usize,
    pub half_span: f64,
    pub t_end: f64,
    pub dt: f64,
    pub sample_every: usize,
    pub tolerance: f64,
    pub directory: PathBuf,
    pub artifacts: Vec<Artifact>,
    pub method: Method,
}

pub fn load_ini(path: &Path) -> Result<Ini> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ini::load_from_str(&text).map_err(|e| CliError::config("config", e.to_string()))
}

/// Raw string value of `key`, searching the section it belongs to.
pub fn section_of(key: &str) -> Option<&'static str> {
    SECTIONS
        .iter()
        .find(|(_, keys)| keys.contains(&key))
        .map(|(s, _)| *s)
}

/// Sets `key` in `ini`, dropping keys that would conflict with it.
pub fn override_key(ini: &mut Ini, key: &str, value: &str) -> Result<()> {
    let section = section_of(key).ok_or_else(|| CliError::config(key, "unknown key"))?;
    let conflicts: &[&str] = match key {
        "coupling_ratio" => &["omega0"],
        "omega0" => &["coupling_ratio"],
        "detuning" => &["atom_frequency", "reservoir_center"],
        "atom_frequency" | "reservoir_center" => &["detuning"],
        _ => &[],
    };
    if let Some(props) = ini.section_mut(Some(section)) {
        for c in conflicts {
            props.remove(*c);
        }
    }
    ini.with_section(Some(section)).set(key, value);
    Ok(())
}

struct Lookup<'a> {
    ini: &'a Ini,
}

impl Lookup<'_> {
    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.ini.section(Some(section)).and_then(|p| p.get(key)).map(str::trim)
    }

    fn parse<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::config(key, format!("cannot parse '{v}': {e}"))),
        }
    }

    fn positive(&self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.parse::<f64>(section, key)? {
            Some(v) if !(v > 0.0 && v.is_finite()) => {
                Err(CliError::config(key, format!("must be positive (got {v})")))
            }
            other => Ok(other),
        }
    }

    fn finite(&self, section: &str, key: &str) -> Result<Option<f64>> {
        match self.parse::<f64>(section, key)? {
            Some(v) if !v.is_finite() => Err(CliError::config(key, format!("must be finite (got {v})"))),
            other => Ok(other),
        }
    }
}

fn check_layout(ini: &Ini) -> Result<()> {
    for (section, props) in ini.iter() {
        let Some(name) = section else {
            if let Some((key, _)) = props.iter().next() {
                return Err(CliError::config(key, "key outside any section"));
            }
            continue;
        };
        let Some((_, keys)) = SECTIONS.iter().find(|(s, _)| *s == name) else {
            return Err(CliError::config(name, "unknown section"));
        };
        for (key, _) in props.iter() {
            if !keys.contains(&key) {
                return Err(CliError::config(key, format!("unknown key in [{name}]")));
            }
        }
    }
    Ok(())
}

impl ScenarioConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_ini(&load_ini(path)?)
    }

    pub fn from_ini(ini: &Ini) -> Result<Self> {
        check_layout(ini)?;
        let q = Lookup { ini };

        let gamma = q
            .positive("physical", "gamma")?
            .ok_or_else(|| CliError::config("gamma", "required"))?;
        let omega0 = match (
            q.positive("physical", "coupling_ratio")?,
            q.positive("physical", "omega0")?,
        ) {
            (Some(r), None) => r * gamma,
            (None, Some(o)) => o,
            (Some(_), Some(_)) => return Err(CliError::config("omega0", "conflicts with coupling_ratio")),
            (None, None) => return Err(CliError::config("coupling_ratio", "required (or omega0)")),
        };
        let detuning = q.finite("physical", "detuning")?;
        let atom = q.finite("physical", "atom_frequency")?;
        let center = q.finite("physical", "reservoir_center")?;
        let params = match (detuning, atom, center) {
            (Some(_), Some(_), _) => return Err(CliError::config("atom_frequency", "conflicts with detuning")),
            (Some(_), _, Some(_)) => {
                return Err(CliError::config("reservoir_center", "conflicts with detuning"))
            }
            (Some(d), None, None) => PhysicalParams::with_detuning(gamma, omega0, d),
            (None, a, c) => {
                let a = a.unwrap_or(0.0);
                PhysicalParams::new(gamma, omega0, a, c.unwrap_or(a))
            }
        }?;

        let n_modes = q.parse::<usize>("bath", "n_modes")?.unwrap_or(DEFAULT_N_MODES);
        if n_modes < 2 {
            return Err(CliError::config("n_modes", format!("must be at least 2 (got {n_modes})")));
        }
        let half_span = q
            .positive("bath", "half_span")?
            .unwrap_or_else(|| params.default_half_span());

        let t_end = match q.parse::<f64>("time", "t_end")? {
            None => return Err(CliError::config("t_end", "required")),
            Some(t) if !(t >= 0.0 && t.is_finite()) => {
                return Err(CliError::config("t_end", format!("must be non-negative (got {t})")))
            }
            Some(t) => t,
        };
        let grid = discretize_bath(&params, n_modes, half_span)?;
        let dt = match q.positive("time", "dt")? {
            None => default_dt(&grid, &params),
            Some(dt) => {
                let limit = max_stable_dt(&grid, &params);
                if dt > limit {
                    return Err(CliError::config(
                        "dt",
                        format!("{dt} exceeds the stability limit {limit}"),
                    ));
                }
                dt
            }
        };
        let sample_every = match q.parse::<usize>("time", "sample_every")? {
            Some(0) => return Err(CliError::config("sample_every", "must be at least 1")),
            Some(k) => k,
            None => decimation_for(t_end, dt, DEFAULT_MAX_SAMPLES),
        };
        let tolerance = q.positive("time", "tolerance")?.unwrap_or(DEFAULT_TOLERANCE);

        let directory = q
            .raw("output", "directory")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("out"));
        let artifacts = match q.raw("output", "artifacts") {
            None => Artifact::ALL.to_vec(),
            Some(list) => {
                let mut v = list
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.parse::<Artifact>().map_err(|e| CliError::config("artifacts", e)))
                    .collect::<Result<Vec<_>>>()?;
                v.sort();
                v.dedup();
                if v.is_empty() {
                    return Err(CliError::config("artifacts", "empty list"));
                }
                v
            }
        };
        let method = q
            .parse::<Method>("output", "method")?
            .unwrap_or(Method::Both);

        Ok(ScenarioConfig {
            params,
            coupling_ratio: omega0 / gamma,
            n_modes,
            half_span,
            t_end,
            dt,
            sample_every,
            tolerance,
            directory,
            artifacts,
            method,
        })
    }

    pub fn wants(&self, artifact: Artifact) -> bool {
        self.artifacts.contains(&artifact)
    }
}
