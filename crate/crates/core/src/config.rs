//! Plain-text run configuration.
//!
//! One `key = value` pair per line, `#` starts a comment. Unknown or
//! repeated keys are errors. Lists are comma separated.
//!
//! ```text
//! case = aligned_oblique_shock
//! mode = steady
//! limiting = restricted
//! k = 0.05
//! nx = 100
//! ny = 100
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::cases::{build_case, CaseDefinition, CaseKind, CASE_NAMES, DEFAULT_GRID};
use crate::diagnostics::DEFAULT_WINDOW;
use crate::error::{Error, Result};
use crate::indicator::IndicatorFormula;
use crate::solver::{
    Limiting, Mode, RunConfig, DEFAULT_CFL, DEFAULT_CONVERGENCE_TOL, DEFAULT_K,
    DEFAULT_MAX_ITERATIONS,
};

pub const KNOWN_KEYS: [&str; 17] = [
    "case",
    "mode",
    "limiting",
    "k",
    "k_list",
    "compare",
    "formula",
    "cfl",
    "nx",
    "ny",
    "beta",
    "max_iterations",
    "tol",
    "final_time",
    "window",
    "vtk",
    "line_profile",
];

/// One entry of a `compare` list, e.g. `restricted:0.05` or
/// `everywhere@50x50`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompareEntry {
    pub limiting: Limiting<f64>,
    pub grid: Option<(usize, usize)>,
}

impl CompareEntry {
    /// Label used in reports: `restricted(K=0.05)`, `everywhere`, ...
    pub fn label(&self) -> String {
        limiting_label(&self.limiting)
    }
}

pub fn limiting_label(l: &Limiting<f64>) -> String {
    match l {
        Limiting::Restricted(k) => format!("restricted(K={k})"),
        other => other.name().to_string(),
    }
}

/// Parsed and validated settings of one CLI invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct Settings {
    pub case: String,
    pub mode: Mode,
    pub limiting: Limiting<f64>,
    pub k: Option<f64>,
    pub k_list: Vec<f64>,
    pub compare: Vec<CompareEntry>,
    pub formula: IndicatorFormula,
    pub cfl: f64,
    pub nx: usize,
    pub ny: usize,
    pub beta: Option<f64>,
    pub max_iterations: usize,
    pub tol: f64,
    pub final_time: Option<f64>,
    pub window: usize,
    pub vtk: bool,
    pub line_profile: bool,
    /// SHA-256 of the normalized key/value pairs.
    pub hash: String,
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let pairs = parse_pairs(text)?;
        Self::from_pairs(&pairs)
    }

    fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| pairs.get(k).map(String::as_str);

        let case = get("case").ok_or_else(|| missing("case", "every run needs a case name"))?;
        if !CASE_NAMES.contains(&case) {
            return Err(Error::Config(format!(
                "unknown case `{case}`; available: {}",
                CASE_NAMES.join(", ")
            )));
        }
        let default_mode = if case == "riemann2d" {
            Mode::Unsteady
        } else {
            Mode::Steady
        };
        let mode = match get("mode") {
            None => default_mode,
            Some("steady") => Mode::Steady,
            Some("unsteady") => Mode::Unsteady,
            Some(other) => return Err(bad("mode", other, "expected steady or unsteady")),
        };
        let k = get("k").map(|v| parse_num::<f64>("k", v)).transpose()?;
        if let Some(k) = k {
            check_k("k", k)?;
        }
        let limiting = match get("limiting") {
            None => Limiting::Everywhere,
            Some("restricted") => Limiting::Restricted(
                k.ok_or_else(|| missing("k", "limiting = restricted needs a threshold"))?,
            ),
            Some(other) => parse_plain_limiting(other).ok_or_else(|| {
                bad(
                    "limiting",
                    other,
                    "expected everywhere, restricted, first_order or shock_straddle",
                )
            })?,
        };
        let k_list = match get("k_list") {
            None => Vec::new(),
            Some(v) => {
                let ks = split_list(v)
                    .map(|s| parse_num::<f64>("k_list", s))
                    .collect::<Result<Vec<_>>>()?;
                if ks.is_empty() {
                    return Err(Error::Config("k_list is empty".into()));
                }
                for &k in &ks {
                    check_k("k_list", k)?;
                }
                ks
            }
        };
        let compare = match get("compare") {
            None => Vec::new(),
            Some(v) => split_list(v)
                .map(parse_compare_entry)
                .collect::<Result<Vec<_>>>()?,
        };
        let formula = match get("formula") {
            None => IndicatorFormula::default(),
            Some("mean_jump") => IndicatorFormula::MeanJump,
            Some("summed_jump") => IndicatorFormula::SummedJump,
            Some(other) => return Err(bad("formula", other, "expected mean_jump or summed_jump")),
        };
        let opt_num = |key: &str| get(key).map(|v| parse_num::<f64>(key, v)).transpose();
        let opt_int = |key: &str| get(key).map(|v| parse_num::<usize>(key, v)).transpose();
        let opt_bool = |key: &str| get(key).map(|v| parse_bool(key, v)).transpose();

        let settings = Self {
            case: case.to_string(),
            mode,
            limiting,
            k,
            k_list,
            compare,
            formula,
            cfl: opt_num("cfl")?.unwrap_or(DEFAULT_CFL),
            nx: opt_int("nx")?.unwrap_or(DEFAULT_GRID),
            ny: opt_int("ny")?.unwrap_or(DEFAULT_GRID),
            beta: opt_num("beta")?,
            max_iterations: opt_int("max_iterations")?.unwrap_or(DEFAULT_MAX_ITERATIONS),
            tol: opt_num("tol")?.unwrap_or(DEFAULT_CONVERGENCE_TOL),
            final_time: opt_num("final_time")?,
            window: opt_int("window")?.unwrap_or(DEFAULT_WINDOW),
            vtk: opt_bool("vtk")?.unwrap_or(false),
            line_profile: opt_bool("line_profile")?.unwrap_or(false),
            hash: config_hash(pairs),
        };
        settings
            .run_config(settings.limiting, settings.mode)
            .validate()?;
        if settings.window == 0 {
            return Err(bad("window", "0", "window must hold at least one cell"));
        }
        let case = settings.build_case()?;
        if settings.mode == Mode::Steady && case.kind != CaseKind::Steady {
            return Err(Error::Config(format!(
                "case {} only supports mode = unsteady",
                case.name
            )));
        }
        if settings.mode == Mode::Unsteady && case.kind != CaseKind::Unsteady {
            return Err(Error::Config(format!(
                "case {} only supports mode = steady",
                case.name
            )));
        }
        for e in &settings.compare {
            settings.run_config(e.limiting, settings.mode).validate()?;
        }
        Ok(settings)
    }

    pub fn build_case(&self) -> Result<CaseDefinition<f64>> {
        build_case(&self.case, self.nx, self.ny, self.beta).map_err(|e| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        })
    }

    /// Solver configuration for one limiting setting.
    pub fn run_config(&self, limiting: Limiting<f64>, mode: Mode) -> RunConfig<f64> {
        RunConfig {
            mode,
            limiting,
            cfl: self.cfl,
            max_iterations: self.max_iterations,
            convergence_tol: self.tol,
            final_time: self.final_time,
            indicator_formula: self.formula,
            export_k: self.k.unwrap_or(DEFAULT_K),
        }
    }

    pub fn mode_name(&self) -> &'static str {
        match self.mode {
            Mode::Steady => "steady",
            Mode::Unsteady => "unsteady",
        }
    }

    /// Settings needed by `compare`: at least two entries on one grid.
    pub fn require_compare(&self) -> Result<()> {
        if self.compare.len() < 2 {
            return Err(Error::Config(
                "compare needs at least two limiting settings in key `compare`".into(),
            ));
        }
        let own = (self.nx, self.ny);
        for e in &self.compare {
            if let Some(g) = e.grid {
                if g != own {
                    return Err(Error::Config(format!(
                        "mismatched grids: {} requests {}x{} but the run grid is {}x{}",
                        e.label(),
                        g.0,
                        g.1,
                        own.0,
                        own.1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Settings needed by `flag`: a non-empty threshold list (`k` alone
    /// counts as a list of one).
    pub fn flag_thresholds(&self) -> Result<Vec<f64>> {
        if !self.k_list.is_empty() {
            Ok(self.k_list.clone())
        } else if let Some(k) = self.k {
            Ok(vec![k])
        } else {
            Err(missing("k_list", "flag needs at least one threshold"))
        }
    }
}

fn missing(key: &str, why: &str) -> Error {
    Error::Config(format!("missing key `{key}`: {why}"))
}

fn bad(key: &str, value: &str, why: &str) -> Error {
    Error::Config(format!("invalid value `{value}` for key `{key}`: {why}"))
}

fn check_k(key: &str, k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(bad(key, &k.to_string(), "threshold must be positive"))
    }
}

fn parse_num<N: std::str::FromStr>(key: &str, v: &str) -> Result<N> {
    v.parse().map_err(|_| bad(key, v, "not a number"))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, v, "expected true or false")),
    }
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_plain_limiting(v: &str) -> Option<Limiting<f64>> {
    match v {
        "everywhere" => Some(Limiting::Everywhere),
        "first_order" => Some(Limiting::FirstOrder),
        "shock_straddle" => Some(Limiting::ShockStraddle),
        _ => None,
    }
}

fn parse_compare_entry(s: &str) -> Result<CompareEntry> {
    let (body, grid) = match s.split_once('@') {
        None => (s, None),
        Some((b, g)) => {
            let (gx, gy) = g
                .split_once('x')
                .ok_or_else(|| bad("compare", s, "grid suffix must look like @NXxNY"))?;
            (
                b,
                Some((parse_num("compare", gx)?, parse_num("compare", gy)?)),
            )
        }
    };
    let limiting = match body.split_once(':') {
        Some(("restricted", k)) => {
            let k = parse_num("compare", k)?;
            check_k("compare", k)?;
            Limiting::Restricted(k)
        }
        Some(_) => return Err(bad("compare", s, "only restricted takes a threshold")),
        None if body == "restricted" => {
            return Err(bad(
                "compare",
                s,
                "restricted needs a threshold, e.g. restricted:0.05",
            ))
        }
        None => parse_plain_limiting(body)
            .ok_or_else(|| bad("compare", s, "unknown limiting setting"))?,
    };
    Ok(CompareEntry { limiting, grid })
}

/// Splits the text into key/value pairs, rejecting malformed lines, unknown
/// keys and repeated keys.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "line {}: expected `key = value`, got `{line}`",
                n + 1
            ))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::Config(format!(
                "line {}: unknown key `{key}`",
                n + 1
            )));
        }
        if value.is_empty() {
            return Err(Error::Config(format!(
                "line {}: key `{key}` has no value",
                n + 1
            )));
        }
        if out.insert(key.to_string(), value.to_string()).is_some() {
            return Err(Error::Config(format!(
                "line {}: key `{key}` given twice",
                n + 1
            )));
        }
    }
    Ok(out)
}

fn config_hash(pairs: &BTreeMap<String, String>) -> String {
    let mut h = Sha256::new();
    for (k, v) in pairs {
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.as_bytes());
        h.update(b"\n");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
