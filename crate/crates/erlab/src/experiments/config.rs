//! Experiment configuration: flat `key = value` files, flag overrides,
//! per-experiment key validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::processes::DEFAULT_MASTER_SEED;

/// The named acceptance experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    E7,
}

impl ExperimentId {
    pub fn all() -> [ExperimentId; 7] {
        use ExperimentId::*;
        [E1, E2, E3, E4, E5, E6, E7]
    }

    pub fn title(&self) -> &'static str {
        match self {
            ExperimentId::E1 => "exact i.i.d. rate",
            ExperimentId::E2 => "i.i.d. ER law at the logarithmic scale",
            ExperimentId::E3 => "trivial-window regimes",
            ExperimentId::E4 => "rate-function estimation",
            ExperimentId::E5 => "tower tails",
            ExperimentId::E6 => "polynomial-window phase diagram",
            ExperimentId::E7 => "observable algebra",
        }
    }

    fn index(&self) -> usize {
        match self {
            ExperimentId::E1 => 1,
            ExperimentId::E2 => 2,
            ExperimentId::E3 => 3,
            ExperimentId::E4 => 4,
            ExperimentId::E5 => 5,
            ExperimentId::E6 => 6,
            ExperimentId::E7 => 7,
        }
    }

    /// Seed-domain tag for replica derivation.
    pub fn seed_domain(&self) -> u64 {
        0xE0 + self.index() as u64
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}", self.index())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "E1" => Ok(ExperimentId::E1),
            "E2" => Ok(ExperimentId::E2),
            "E3" => Ok(ExperimentId::E3),
            "E4" => Ok(ExperimentId::E4),
            "E5" => Ok(ExperimentId::E5),
            "E6" => Ok(ExperimentId::E6),
            "E7" => Ok(ExperimentId::E7),
            other => Err(Error::Config(format!(
                "unknown experiment `{other}` (expected E1..E7)"
            ))),
        }
    }
}

/// Parse a flat config file: `key = value` lines, `#` comments, UTF-8.
/// Duplicate keys are rejected.
pub fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected `key = value`", lineno + 1))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(Error::Config(format!("line {}: empty key or value", lineno + 1)));
        }
        if map.insert(key.clone(), value).is_some() {
            return Err(Error::Config(format!("duplicate key `{key}`")));
        }
    }
    Ok(map)
}

/// Command-line overrides; flags win over file keys which win over defaults.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub replicas: Option<u64>,
    pub quiet: bool,
}

/// A validated experiment configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub quiet: bool,
    pub max_samples: u64,
    pub alpha: Option<f64>,
    pub tau: Option<f64>,
    pub beta: Option<f64>,
    pub kappa: Option<f64>,
    pub n_max: Option<u64>,
    pub grid_ratio: Option<f64>,
    pub replicas: Option<u64>,
    pub scgf_replicas: Option<u64>,
    pub seeds: Option<u32>,
    pub tol: Option<f64>,
}

const COMMON_KEYS: &[&str] = &["experiment", "seed", "out", "quiet", "max_samples"];

fn experiment_keys(id: ExperimentId) -> (&'static [&'static str], &'static [&'static str]) {
    // (required, optional) beyond the common keys
    match id {
        ExperimentId::E1 => (&["alpha"], &[]),
        ExperimentId::E2 => (&["alpha", "n_max", "seeds"], &["grid_ratio"]),
        ExperimentId::E3 => (&["seeds"], &[]),
        ExperimentId::E4 => (&["alpha", "replicas"], &["scgf_replicas"]),
        ExperimentId::E5 => (&["beta", "tau", "alpha", "replicas"], &["tol"]),
        ExperimentId::E6 => (&["beta", "kappa", "n_max", "seeds"], &["grid_ratio"]),
        ExperimentId::E7 => (&["beta", "kappa"], &["tol"]),
    }
}

impl ExperimentConfig {
    /// Build from a parsed key map plus overrides, validating key names,
    /// required keys, and documented ranges.
    pub fn from_map(
        experiment: ExperimentId,
        map: &BTreeMap<String, String>,
        ovr: &Overrides,
    ) -> Result<Self> {
        let (required, optional) = experiment_keys(experiment);
        for key in map.keys() {
            let known = COMMON_KEYS.contains(&key.as_str())
                || required.contains(&key.as_str())
                || optional.contains(&key.as_str());
            if !known {
                return Err(Error::Config(format!(
                    "unknown key `{key}` for experiment {experiment}"
                )));
            }
        }
        if let Some(name) = map.get("experiment") {
            let named: ExperimentId = name.parse()?;
            if named != experiment {
                return Err(Error::Config(format!(
                    "config names experiment {named} but {experiment} was requested"
                )));
            }
        }

        let mut cfg = ExperimentConfig {
            experiment,
            seed: DEFAULT_MASTER_SEED,
            out_dir: PathBuf::from("out"),
            quiet: false,
            max_samples: 20_000_000_000,
            alpha: None,
            tau: None,
            beta: None,
            kappa: None,
            n_max: None,
            grid_ratio: None,
            replicas: None,
            scgf_replicas: None,
            seeds: None,
            tol: None,
        };

        if let Some(v) = map.get("seed") {
            cfg.seed = parse_seed(v)?;
        }
        if let Some(v) = map.get("out") {
            cfg.out_dir = PathBuf::from(v);
        }
        if let Some(v) = map.get("quiet") {
            cfg.quiet = parse_bool("quiet", v)?;
        }
        if let Some(v) = map.get("max_samples") {
            cfg.max_samples = parse_count("max_samples", v, 1_000_000, u64::MAX)?;
        }
        if let Some(v) = map.get("alpha") {
            cfg.alpha = Some(parse_ranged("alpha", v, 0.0, 1.0, false)?);
        }
        if let Some(v) = map.get("tau") {
            cfg.tau = Some(parse_ranged("tau", v, 0.0, 1.0, false)?);
        }
        if let Some(v) = map.get("beta") {
            let b: f64 = parse_f64("beta", v)?;
            if !(b > 1.0) {
                return Err(Error::Config(format!("beta = {b} must exceed 1")));
            }
            cfg.beta = Some(b);
        }
        if let Some(v) = map.get("kappa") {
            let k: f64 = parse_f64("kappa", v)?;
            if !(0.0..=1.0).contains(&k) {
                return Err(Error::Config(format!("kappa = {k} outside [0, 1]")));
            }
            cfg.kappa = Some(k);
        }
        if let Some(v) = map.get("n_max") {
            cfg.n_max = Some(parse_count("n_max", v, 1000, 10_000_000_000)?);
        }
        if let Some(v) = map.get("grid_ratio") {
            let r: f64 = parse_f64("grid_ratio", v)?;
            if !(r > 1.0 && r <= 100.0) {
                return Err(Error::Config(format!("grid_ratio = {r} outside (1, 100]")));
            }
            cfg.grid_ratio = Some(r);
        }
        if let Some(v) = map.get("replicas") {
            cfg.replicas = Some(parse_count("replicas", v, 100, 1_000_000_000)?);
        }
        if let Some(v) = map.get("scgf_replicas") {
            cfg.scgf_replicas = Some(parse_count("scgf_replicas", v, 100, 1_000_000_000)?);
        }
        if let Some(v) = map.get("seeds") {
            cfg.seeds = Some(parse_count("seeds", v, 1, 10_000)? as u32);
        }
        if let Some(v) = map.get("tol") {
            let t: f64 = parse_f64("tol", v)?;
            if !(t > 0.0 && t <= 1e-6) {
                return Err(Error::Config(format!("tol = {t} outside (0, 1e-6]")));
            }
            cfg.tol = Some(t);
        }

        // flags > file > defaults
        if let Some(s) = ovr.seed {
            cfg.seed = s;
        }
        if let Some(ref o) = ovr.out {
            cfg.out_dir = o.clone();
        }
        if let Some(r) = ovr.replicas {
            cfg.replicas = Some(r);
        }
        if ovr.quiet {
            cfg.quiet = true;
        }

        for key in required {
            let present = match *key {
                "alpha" => cfg.alpha.is_some(),
                "tau" => cfg.tau.is_some(),
                "beta" => cfg.beta.is_some(),
                "kappa" => cfg.kappa.is_some(),
                "n_max" => cfg.n_max.is_some(),
                "replicas" => cfg.replicas.is_some(),
                "seeds" => cfg.seeds.is_some(),
                _ => true,
            };
            if !present {
                return Err(Error::Config(format!(
                    "missing required key `{key}` for experiment {experiment}"
                )));
            }
        }
        Ok(cfg)
    }

    /// The canonical configuration of each experiment (the parameters the
    /// acceptance run uses).
    pub fn canonical(experiment: ExperimentId) -> Self {
        let mut map = BTreeMap::new();
        let entries: &[(&str, &str)] = match experiment {
            ExperimentId::E1 => &[("alpha", "0.5")],
            ExperimentId::E2 => &[
                ("alpha", "0.5"),
                ("n_max", "1e7"),
                ("seeds", "20"),
                ("grid_ratio", "10"),
            ],
            ExperimentId::E3 => &[("seeds", "20")],
            ExperimentId::E4 => &[
                ("alpha", "0.5"),
                ("replicas", "1e6"),
                ("scgf_replicas", "1e5"),
            ],
            ExperimentId::E5 => &[
                ("beta", "2"),
                ("tau", "0.4"),
                ("alpha", "0.5"),
                ("replicas", "1e6"),
            ],
            ExperimentId::E6 => &[
                ("beta", "2"),
                ("kappa", "0.01"),
                ("n_max", "1e8"),
                ("seeds", "20"),
                ("grid_ratio", "2"),
            ],
            ExperimentId::E7 => &[("beta", "2"), ("kappa", "0.01")],
        };
        for (k, v) in entries {
            map.insert(k.to_string(), v.to_string());
        }
        Self::from_map(experiment, &map, &Overrides::default()).expect("canonical config is valid")
    }
}

/// Seeds are accepted as decimal or 0x-prefixed hex.
pub fn parse_seed(s: &str) -> Result<u64> {
    let s = s.trim();
    let parsed = if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16)
    } else {
        s.parse()
    };
    parsed.map_err(|_| Error::Config(format!("seed `{s}` is not decimal or 0x-hex")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::Config(format!("key `{key}`: `{v}` is not a boolean"))),
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| Error::Config(format!("key `{key}`: `{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("key `{key}`: `{v}` is not finite")));
    }
    Ok(x)
}

fn parse_ranged(key: &str, v: &str, lo: f64, hi: f64, inclusive: bool) -> Result<f64> {
    let x = parse_f64(key, v)?;
    let ok = if inclusive {
        x >= lo && x <= hi
    } else {
        x > lo && x < hi
    };
    if !ok {
        return Err(Error::Config(format!(
            "key `{key}` = {x} outside {}{lo}, {hi}{}",
            if inclusive { "[" } else { "(" },
            if inclusive { "]" } else { ")" },
        )));
    }
    Ok(x)
}

/// Counts accept integer or scientific notation (1e6).
fn parse_count(key: &str, v: &str, lo: u64, hi: u64) -> Result<u64> {
    let n: u64 = if let Ok(n) = v.parse::<u64>() {
        n
    } else {
        let x = parse_f64(key, v)?;
        if x < 0.0 || x.fract() != 0.0 || x > u64::MAX as f64 {
            return Err(Error::Config(format!(
                "key `{key}`: `{v}` is not a nonnegative integer"
            )));
        }
        x as u64
    };
    if n < lo || n > hi {
        return Err(Error::Config(format!(
            "key `{key}` = {n} outside [{lo}, {hi}]"
        )));
    }
    Ok(n)
}
