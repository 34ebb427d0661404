//! Run configuration: TOML file values overridden by command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use bellpovm::quantum::linalg::Op4;
use bellpovm::{singlet_state, werner_state, TwoQubitState};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Where the two-photon state comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    Singlet,
    Werner(f64),
    /// JSON file holding a 4×4 density matrix as `{"re": [[..]], "im": [[..]]}`.
    File(PathBuf),
}

impl StateSpec {
    pub fn load(&self) -> Result<TwoQubitState> {
        match self {
            StateSpec::Singlet => Ok(singlet_state()),
            StateSpec::Werner(v) => Ok(werner_state(*v)?),
            StateSpec::File(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read state matrix {}", path.display()))?;
                let rho: Op4 = serde_json::from_str(&text)
                    .with_context(|| format!("{} is not a 4×4 matrix document", path.display()))?;
                TwoQubitState::new(rho).with_context(|| format!("{} is not a density matrix", path.display()))
            }
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Singlet => f.write_str("singlet"),
            StateSpec::Werner(v) => write!(f, "werner:{v}"),
            StateSpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl FromStr for StateSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            bail!("empty state spec");
        }
        if s.eq_ignore_ascii_case("singlet") {
            return Ok(StateSpec::Singlet);
        }
        if let Some(v) = s.strip_prefix("werner:") {
            let v: f64 = v.parse().with_context(|| format!("bad Werner weight in {s:?}"))?;
            if !(0.0..=1.0).contains(&v) {
                bail!("Werner weight {v} outside [0, 1]");
            }
            return Ok(StateSpec::Werner(v));
        }
        Ok(StateSpec::File(PathBuf::from(s)))
    }
}

impl Serialize for StateSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StateSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|e: anyhow::Error| serde::de::Error::custom(format!("{e:#}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub state: StateSpec,
    pub theta_a: f64,
    pub theta_b: f64,
    pub mean_total: f64,
    #[serde(with = "seed_repr")]
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            state: StateSpec::Singlet,
            theta_a: 20.0,
            theta_b: 20.0,
            mean_total: 568_352.0,
            seed: 0,
            out: None,
            format: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn check_angles(&self) -> Result<()> {
        for (name, t) in [("theta_a", self.theta_a), ("theta_b", self.theta_b)] {
            if !(0.0..=90.0).contains(&t) {
                bail!("{name} = {t}° outside [0°, 90°]");
            }
        }
        Ok(())
    }
}

// TOML integers are signed 64-bit, so seeds past i64::MAX are written as strings.
mod seed_repr {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*seed) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.collect_str(seed),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        use serde::de::Error;
        match Repr::deserialize(d)? {
            Repr::Int(v) => u64::try_from(v).map_err(|_| D::Error::custom(format!("negative seed {v}"))),
            Repr::Text(t) => t.trim().parse().map_err(|_| D::Error::custom(format!("bad seed {t:?}"))),
        }
    }
}
