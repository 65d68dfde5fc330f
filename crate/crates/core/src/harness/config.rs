use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fnspace::{self, BoolFn, ConceptClass, Dist, Domain, Table, DEFAULT_MAX_VARS};
use crate::oracles::OracleMode;
use crate::rng;

use super::export::Format;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Learn,
    Evolve,
    Dim,
    Agnostic,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Learn => "learn",
            Command::Evolve => "evolve",
            Command::Dim => "dim",
            Command::Agnostic => "agnostic",
        }
    }
}

/// One experiment. Loaded from TOML; command-line flags override fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub n: u32,
    pub epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// `parities[:k]`, `conjunctions`, `disjunctions` or `file:PATH`.
    pub class: String,
    /// `uniform`, `random`, `random:SEED` or `file:PATH`.
    #[serde(default = "default_dist")]
    pub dist: String,
    /// `exact`, `grid`, `noisy`, `empirical:S` or `biased:OFFSET`.
    #[serde(default = "default_oracle")]
    pub oracle: String,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub out: PathBuf,
    #[serde(default = "default_format")]
    pub format: Format,
    /// Generation budget for `evolve` runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_generations: Option<u64>,
    /// Hoeffding constant for `evolve` sample sizes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_hoeffding: Option<f64>,
    /// Random shifts added to the default family in `dim`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_samples: Option<usize>,
}

fn default_dist() -> String {
    "uniform".into()
}

fn default_oracle() -> String {
    "exact".into()
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

fn default_format() -> Format {
    Format::Csv
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClassSpec {
    Parities(Option<u32>),
    Conjunctions,
    Disjunctions,
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub enum DistSpec {
    Uniform,
    /// Seeded by the run's master seed.
    Random,
    RandomSeed(u64),
    File(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OracleSpec {
    Exact,
    Grid,
    Noisy,
    Empirical(u64),
    Biased(f64),
}

impl OracleSpec {
    /// Concrete mode for a run, seeding stochastic modes from the run seed.
    pub fn mode(self, seed: u64, run: u64) -> OracleMode {
        let s = rng::child_seed(seed, run, "oracle", 0);
        match self {
            OracleSpec::Exact => OracleMode::Exact,
            OracleSpec::Grid => OracleMode::GridAdversary,
            OracleSpec::Noisy => OracleMode::Noisy { seed: s },
            OracleSpec::Empirical(samples) => OracleMode::Empirical { samples, seed: s },
            OracleSpec::Biased(offset) => OracleMode::Biased { offset },
        }
    }
}

/// Seed lists: `7`, `0,3,9` or the half-open range `0..100`.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = |_| Error::config("seeds", format!("cannot parse {s:?}"));
    let seeds = if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(bad)?, b.trim().parse().map_err(bad)?);
        (a..b).collect()
    } else {
        s.split(',').map(|t| t.trim().parse().map_err(bad)).collect::<Result<Vec<u64>>>()?
    };
    if seeds.is_empty() {
        return Err(Error::config("seeds", "empty seed list"));
    }
    Ok(seeds)
}

pub fn parse_class(s: &str) -> Result<ClassSpec> {
    let bad = || Error::config("class", format!("unknown class {s:?}"));
    match s.split_once(':') {
        None => match s {
            "parities" => Ok(ClassSpec::Parities(None)),
            "conjunctions" => Ok(ClassSpec::Conjunctions),
            "disjunctions" => Ok(ClassSpec::Disjunctions),
            _ => Err(bad()),
        },
        Some(("parities", k)) => k
            .parse()
            .map(|k| ClassSpec::Parities(Some(k)))
            .map_err(|_| Error::config("class", format!("bad parity degree {k:?}"))),
        Some(("file", p)) => Ok(ClassSpec::File(p.into())),
        Some(_) => Err(bad()),
    }
}

pub fn parse_dist(s: &str) -> Result<DistSpec> {
    match s.split_once(':') {
        None if s == "uniform" => Ok(DistSpec::Uniform),
        None if s == "random" => Ok(DistSpec::Random),
        Some(("random", seed)) => seed
            .parse()
            .map(DistSpec::RandomSeed)
            .map_err(|_| Error::config("dist", format!("bad seed {seed:?}"))),
        Some(("file", p)) => Ok(DistSpec::File(p.into())),
        _ => Err(Error::config("dist", format!("unknown distribution {s:?}"))),
    }
}

pub fn parse_oracle(s: &str) -> Result<OracleSpec> {
    let num = |v: &str| -> Result<f64> {
        v.parse()
            .map_err(|_| Error::config("oracle", format!("bad number {v:?}")))
    };
    match s.split_once(':') {
        None => match s {
            "exact" => Ok(OracleSpec::Exact),
            "grid" => Ok(OracleSpec::Grid),
            "noisy" => Ok(OracleSpec::Noisy),
            _ => Err(Error::config("oracle", format!("unknown oracle {s:?}"))),
        },
        Some(("empirical", v)) => {
            let samples: u64 = v
                .parse()
                .map_err(|_| Error::config("oracle", format!("bad sample count {v:?}")))?;
            if samples == 0 {
                return Err(Error::config("oracle", "empirical sample count must be positive"));
            }
            Ok(OracleSpec::Empirical(samples))
        }
        Some(("biased", v)) => Ok(OracleSpec::Biased(num(v)?)),
        _ => Err(Error::config("oracle", format!("unknown oracle {s:?}"))),
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// Builds a config from an optional TOML file with `overrides` applied on
    /// top; `command` always wins over a `command` key in the file.
    pub fn merged(command: Command, file: Option<&Path>, overrides: toml::Table) -> Result<Self> {
        let mut table: toml::Table = match file {
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                toml::from_str(&text).map_err(|e| Error::config("config", e.to_string()))?
            }
            None => toml::Table::new(),
        };
        table.extend(overrides);
        table.insert("command".into(), toml::Value::String(command.as_str().into()));
        table.try_into().map_err(|e: toml::de::Error| Error::config("config", e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every field before anything runs.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > DEFAULT_MAX_VARS {
            return Err(Error::config("n", format!("{} not in 1..={DEFAULT_MAX_VARS}", self.n)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::config("epsilon", format!("{} not in (0, 1)", self.epsilon)));
        }
        if let Some(t) = self.tau {
            let hi = match self.command {
                Command::Learn => 1.0 / 8.0,
                _ => 1.0,
            };
            if !(t > 0.0 && t < hi) {
                return Err(Error::config("tau", format!("{t} not in (0, {hi})")));
            }
        } else if matches!(self.command, Command::Learn | Command::Agnostic) {
            return Err(Error::config("tau", format!("required for {}", self.command.as_str())));
        }
        let class = parse_class(&self.class)?;
        if let ClassSpec::Parities(Some(k)) = class {
            if k > self.n {
                return Err(Error::config("class", format!("parity degree {k} exceeds n = {}", self.n)));
            }
        }
        if self.command == Command::Evolve && class != ClassSpec::Disjunctions {
            return Err(Error::config("class", "evolve supports disjunctions only"));
        }
        parse_dist(&self.dist)?;
        parse_oracle(&self.oracle)?;
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "at least one seed is required"));
        }
        if let Some(c) = self.c_hoeffding {
            if !(c > 0.0) {
                return Err(Error::config("c_hoeffding", "must be positive"));
            }
        }
        if self.max_generations == Some(0) {
            return Err(Error::config("max_generations", "must be positive"));
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<Domain> {
        Domain::new(self.n).map_err(|e| Error::config("n", e.to_string()))
    }

    pub fn concept_class(&self) -> Result<ConceptClass> {
        let d = self.domain()?;
        Ok(match parse_class(&self.class)? {
            ClassSpec::Parities(k) => ConceptClass::parities(d, k),
            ClassSpec::Conjunctions => ConceptClass::conjunctions(d),
            ClassSpec::Disjunctions => ConceptClass::disjunctions(d),
            ClassSpec::File(p) => load_class(&p, d)?,
        })
    }

    /// Distribution for runs under master seed `seed`.
    pub fn distribution(&self, seed: u64) -> Result<Dist> {
        let d = self.domain()?;
        Ok(match parse_dist(&self.dist)? {
            DistSpec::Uniform => fnspace::dist_uniform(d),
            DistSpec::Random => fnspace::dist_random(d, seed),
            DistSpec::RandomSeed(s) => fnspace::dist_random(d, s),
            DistSpec::File(p) => {
                let dist = Dist::parse_text(&std::fs::read_to_string(&p)?)?;
                if dist.domain() != d {
                    return Err(Error::config("dist", "file domain does not match n"));
                }
                dist
            }
        })
    }

    pub fn oracle_spec(&self) -> Result<OracleSpec> {
        parse_oracle(&self.oracle)
    }
}

/// Class file: tables in the text function format separated by `%%` lines.
pub fn load_class(path: &Path, d: Domain) -> Result<ConceptClass> {
    let text = std::fs::read_to_string(path)?;
    let mut blocks = vec![String::new()];
    for line in text.lines() {
        if line.trim() == "%%" {
            blocks.push(String::new());
        } else {
            let b = blocks.last_mut().expect("nonempty");
            b.push_str(line);
            b.push('\n');
        }
    }
    let mut members = Vec::new();
    for block in blocks {
        if block.lines().all(|l| l.trim().is_empty() || l.trim_start().starts_with('#')) {
            continue;
        }
        let f = BoolFn::from_table(Table::parse_text(&block)?)?;
        if f.domain() != d {
            return Err(Error::config("class", "file domain does not match n"));
        }
        members.push(f);
    }
    if members.is_empty() {
        return Err(Error::config("class", "class file has no functions"));
    }
    ConceptClass::new(path.display().to_string(), members)
}
