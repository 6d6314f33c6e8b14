//! Experiment configuration: a flat key-value file with sections, plus the
//! command-line and environment overrides folded in.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use thermoforge_core::fluctuation::default_alpha_grid;
use thermoforge_core::potential::{parse_potential, Potential};
use thermoforge_core::shift::{Reversal, ShiftSpace, DEFAULT_ENUM_CAP};

/// Error classes mapped to process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Exit 1: configuration or input-data problem.
    Config,
    /// Exit 2: a resource cap was exceeded.
    Resource,
    /// Exit 3: an exact numerical identity broke tolerance.
    Numerical,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Config,
            message: msg.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Config => 1,
            ErrorKind::Resource => 2,
            ErrorKind::Numerical => 3,
        }
    }
}

impl From<thermoforge_core::Error> for CliError {
    fn from(e: thermoforge_core::Error) -> Self {
        use thermoforge_core::Error as E;
        let kind = match &e {
            E::EnumerationCap { .. }
            | E::BlockStateCap { .. }
            | E::CountOverflow { .. }
            | E::HorizonExceeded { .. } => ErrorKind::Resource,
            E::ContractViolation { .. } => ErrorKind::Numerical,
            _ => ErrorKind::Config,
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

/// Which experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Pressure,
    Fluctuation,
    Ldp,
    Exponents,
    Level2,
    AaDiagnostics,
}

impl Scenario {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "pressure" => Scenario::Pressure,
            "fluctuation" => Scenario::Fluctuation,
            "ldp" => Scenario::Ldp,
            "exponents" => Scenario::Exponents,
            "level2" => Scenario::Level2,
            "aa-diagnostics" => Scenario::AaDiagnostics,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Pressure => "pressure",
            Scenario::Fluctuation => "fluctuation",
            Scenario::Ldp => "ldp",
            Scenario::Exponents => "exponents",
            Scenario::Level2 => "level2",
            Scenario::AaDiagnostics => "aa-diagnostics",
        }
    }
}

/// Raw key-value content of the config file.
#[derive(Debug, Default, Clone)]
pub struct RawConfig {
    entries: BTreeMap<String, (usize, String)>, // "section.key" -> (line, value)
    base_dir: PathBuf,
}

impl RawConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(CliError::config(format!(
                        "config line {line_no}: malformed section header `{line}`"
                    )));
                }
                section = line[1..line.len() - 1].trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!(
                    "config line {line_no}: expected `key = value`, got `{line}`"
                ))
            })?;
            if section.is_empty() {
                return Err(CliError::config(format!(
                    "config line {line_no}: key `{}` outside any section",
                    key.trim()
                )));
            }
            let full = format!("{}.{}", section, key.trim());
            entries.insert(full, (line_no, value.trim().to_string()));
        }
        Ok(RawConfig {
            entries,
            base_dir: base_dir.to_path_buf(),
        })
    }

    fn get(&self, key: &str) -> Option<&(usize, String)> {
        self.entries.get(key)
    }

    fn get_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, value)) => value.parse::<T>().map(Some).map_err(|e| {
                CliError::config(format!("config line {line}, field `{key}`: {e}"))
            }),
        }
    }
}

/// Overrides from flags and the environment.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub scenario: Option<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub cap: Option<u128>,
}

/// A fully resolved experiment: loaded inputs plus every knob pinned.
pub struct Experiment {
    pub scenario: Scenario,
    pub space: ShiftSpace,
    pub potential: Potential<f64>,
    pub reversal: Option<Reversal>,
    pub n_max: usize,
    pub k: usize,
    pub alphas: Vec<f64>,
    pub seed: u64,
    pub threads: usize,
    pub cap: u128,
    pub output_dir: PathBuf,
    /// Canonical `section.key = value` lines describing the effective config.
    pub canonical: String,
}

pub fn env_cap() -> Result<Option<u128>, CliError> {
    match std::env::var("THERMOFORGE_CAP") {
        Ok(v) => v
            .parse::<u128>()
            .map(Some)
            .map_err(|e| CliError::config(format!("THERMOFORGE_CAP: {e}"))),
        Err(_) => Ok(None),
    }
}

/// Resolves a raw config and overrides into a runnable experiment.
pub fn resolve(raw: &RawConfig, over: &Overrides) -> Result<Experiment, CliError> {
    let scenario_text = match &over.scenario {
        Some(s) => s.clone(),
        None => match raw.get("experiment.scenario") {
            Some((_, v)) => v.clone(),
            None => {
                return Err(CliError::config(
                    "field `experiment.scenario` missing and no --scenario given",
                ))
            }
        },
    };
    let scenario = Scenario::parse(&scenario_text).ok_or_else(|| {
        CliError::config(format!(
            "field `experiment.scenario`: unknown scenario `{scenario_text}`"
        ))
    })?;

    let cap = match over.cap {
        Some(c) => c,
        None => match env_cap()? {
            Some(c) => c,
            None => raw
                .get_parsed::<u128>("experiment.cap")?
                .unwrap_or(DEFAULT_ENUM_CAP),
        },
    };

    // system
    let system_path = raw
        .get("system.file")
        .ok_or_else(|| CliError::config("field `system.file` is required"))?;
    let path = raw.base_dir.join(&system_path.1);
    let text = std::fs::read_to_string(&path).map_err(|e| {
        CliError::config(format!("system file `{}`: {e}", path.display()))
    })?;
    let space = ShiftSpace::parse(&text)
        .map_err(|e| CliError::config(format!("system file `{}`: {e}", path.display())))?
        .with_enum_cap(cap);

    // potential
    let pot_path = raw
        .get("potential.file")
        .ok_or_else(|| CliError::config("field `potential.file` is required"))?;
    let path = raw.base_dir.join(&pot_path.1);
    let text = std::fs::read_to_string(&path).map_err(|e| {
        CliError::config(format!("potential file `{}`: {e}", path.display()))
    })?;
    let potential: Potential<f64> = parse_potential(&space, &text)
        .map_err(|e| CliError::config(format!("potential file `{}`: {e}", path.display())))?;

    // reversal: a file, or inline `p` + `kind`
    let reversal = if let Some((_, file)) = raw.get("reversal.file") {
        let path = raw.base_dir.join(file);
        let text = std::fs::read_to_string(&path).map_err(|e| {
            CliError::config(format!("reversal file `{}`: {e}", path.display()))
        })?;
        let r = Reversal::parse(&text)
            .map_err(|e| CliError::config(format!("reversal file `{}`: {e}", path.display())))?;
        r.validate(&space).map_err(|e| {
            CliError::config(format!("reversal incompatible with system: {e}"))
        })?;
        Some(r)
    } else if let Some((line, perm)) = raw.get("reversal.p") {
        let kind = raw
            .get("reversal.kind")
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| "reversal".into());
        let text = format!("p: {perm}\nkind: {kind}\n");
        let r = Reversal::parse(&text)
            .map_err(|e| CliError::config(format!("config line {line}, field `reversal.p`: {e}")))?;
        r.validate(&space).map_err(|e| {
            CliError::config(format!("reversal incompatible with system: {e}"))
        })?;
        Some(r)
    } else {
        None
    };

    let n_max = raw.get_parsed::<usize>("experiment.n_max")?.unwrap_or(12);
    if n_max == 0 {
        return Err(CliError::config("field `experiment.n_max`: must be >= 1"));
    }
    let requested = (space.alphabet() as u128).saturating_pow(n_max as u32);
    if requested > cap {
        return Err(CliError {
            kind: ErrorKind::Resource,
            message: format!(
                "experiment.n_max = {n_max} needs {requested} candidates, above the cap {cap}"
            ),
        });
    }
    let k = raw.get_parsed::<usize>("experiment.k")?.unwrap_or(1);

    let alphas = match (
        raw.get_parsed::<f64>("experiment.alpha_min")?,
        raw.get_parsed::<f64>("experiment.alpha_max")?,
        raw.get_parsed::<f64>("experiment.alpha_step")?,
    ) {
        (None, None, None) => default_alpha_grid::<f64>(),
        (lo, hi, step) => {
            let lo = lo.unwrap_or(-5.0);
            let hi = hi.unwrap_or(6.0);
            let step = step.unwrap_or(1.0 / 128.0);
            if step <= 0.0 || hi <= lo {
                return Err(CliError::config(
                    "fields `experiment.alpha_*`: need alpha_min < alpha_max and alpha_step > 0",
                ));
            }
            let mut grid = Vec::new();
            let mut i = 0usize;
            loop {
                let x = lo + step * i as f64;
                if x > hi + step * 0.5 {
                    break;
                }
                grid.push(x);
                i += 1;
            }
            grid
        }
    };

    let seed = match over.seed {
        Some(s) => s,
        None => raw.get_parsed::<u64>("experiment.seed")?.unwrap_or(42),
    };
    let threads = match over.threads {
        Some(t) => t,
        None => raw.get_parsed::<usize>("experiment.threads")?.unwrap_or(1),
    };
    if threads == 0 {
        return Err(CliError::config("field `experiment.threads`: must be >= 1"));
    }
    let output_dir = match &over.out {
        Some(p) => p.clone(),
        None => raw
            .get("experiment.output_dir")
            .map(|(_, v)| raw.base_dir.join(v))
            .unwrap_or_else(|| PathBuf::from("out")),
    };

    let mut canonical_map: BTreeMap<String, String> = raw
        .entries
        .iter()
        .map(|(k, (_, v))| (k.clone(), v.clone()))
        .collect();
    canonical_map.insert("experiment.scenario".into(), scenario.as_str().into());
    canonical_map.insert("experiment.seed".into(), seed.to_string());
    canonical_map.insert("experiment.cap".into(), cap.to_string());
    canonical_map.insert("experiment.threads".into(), threads.to_string());
    canonical_map.insert("experiment.n_max".into(), n_max.to_string());
    canonical_map.insert("experiment.k".into(), k.to_string());
    canonical_map.remove("experiment.output_dir");
    let canonical = canonical_map
        .into_iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect::<String>();

    Ok(Experiment {
        scenario,
        space,
        potential,
        reversal,
        n_max,
        k,
        alphas,
        seed,
        threads,
        cap,
        output_dir,
        canonical,
    })
}
