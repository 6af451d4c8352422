use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Tcp,
    Sctp,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::Tcp => "tcp",
            Protocol::Sctp => "sctp",
        })
    }
}

impl FromStr for Protocol {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tcp" => Ok(Protocol::Tcp),
            "sctp" => Ok(Protocol::Sctp),
            other => Err(ConfigError::Value { key: "protocol".into(), value: other.into() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("invalid value `{value}` for `{key}`")]
    Value { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
    #[error("expected a {expected} scenario, got {found}")]
    WrongProtocol { expected: Protocol, found: Protocol },
}

/// Scenario parameters: one server, `n_legit` legitimate clients and
/// `n_illegit` flooding clients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub protocol: Protocol,
    pub n_legit: usize,
    pub n_illegit: usize,
    /// Number of TCB slots; `None` means one per client.
    pub resources: Option<usize>,
    /// Retransmission period in time units.
    #[serde(rename = "T")]
    pub t: i64,
    pub max_retrans: i64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig { protocol: Protocol::Tcp, n_legit: 1, n_illegit: 1, resources: None, t: 2, max_retrans: 1 }
    }
}

impl ScenarioConfig {
    pub fn new(
        protocol: Protocol,
        n_legit: usize,
        n_illegit: usize,
        resources: usize,
        t: i64,
        max_retrans: i64,
    ) -> Self {
        ScenarioConfig { protocol, n_legit, n_illegit, resources: Some(resources), t, max_retrans }
    }

    /// The reference desk configuration for `protocol`: one legitimate and
    /// one illegitimate client, two resources, `T = 2`, one retransmission.
    pub fn desk(protocol: Protocol) -> Self {
        ScenarioConfig::new(protocol, 1, 1, 2, 2, 1)
    }

    pub fn n_clients(&self) -> usize {
        self.n_legit + self.n_illegit
    }

    pub fn resources(&self) -> usize {
        self.resources.unwrap_or(self.n_clients())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.resources() < 1 {
            return Err(ConfigError::Invalid("resources must be at least 1".into()));
        }
        if self.t < 1 {
            return Err(ConfigError::Invalid("T must be at least 1".into()));
        }
        if self.max_retrans < 0 {
            return Err(ConfigError::Invalid("max_retrans must be non-negative".into()));
        }
        Ok(())
    }
}

/// Optional field values, as read from a config file or command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigOverrides {
    pub protocol: Option<Protocol>,
    pub n_legit: Option<usize>,
    pub n_illegit: Option<usize>,
    pub resources: Option<usize>,
    pub t: Option<i64>,
    pub max_retrans: Option<i64>,
}

impl ConfigOverrides {
    /// Parses the flat `key = value` format. Blank lines and lines starting
    /// with `#` are ignored. Keys are the [`ScenarioConfig`] field names.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut out = ConfigOverrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || ConfigError::Value { key: key.to_string(), value: value.to_string() };
            match key {
                "protocol" => out.protocol = Some(value.parse()?),
                "n_legit" => out.n_legit = Some(value.parse().map_err(|_| bad())?),
                "n_illegit" => out.n_illegit = Some(value.parse().map_err(|_| bad())?),
                "resources" => out.resources = Some(value.parse().map_err(|_| bad())?),
                "T" => out.t = Some(value.parse().map_err(|_| bad())?),
                "max_retrans" => out.max_retrans = Some(value.parse().map_err(|_| bad())?),
                _ => return Err(ConfigError::UnknownKey { line: i + 1, key: key.to_string() }),
            }
        }
        Ok(out)
    }

    /// Values set in `other` win.
    pub fn merge(self, other: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            protocol: other.protocol.or(self.protocol),
            n_legit: other.n_legit.or(self.n_legit),
            n_illegit: other.n_illegit.or(self.n_illegit),
            resources: other.resources.or(self.resources),
            t: other.t.or(self.t),
            max_retrans: other.max_retrans.or(self.max_retrans),
        }
    }

    /// Fills unset fields from [`ScenarioConfig::default`] and validates.
    pub fn resolve(self) -> Result<ScenarioConfig, ConfigError> {
        let d = ScenarioConfig::default();
        let cfg = ScenarioConfig {
            protocol: self.protocol.unwrap_or(d.protocol),
            n_legit: self.n_legit.unwrap_or(d.n_legit),
            n_illegit: self.n_illegit.unwrap_or(d.n_illegit),
            resources: self.resources,
            t: self.t.unwrap_or(d.t),
            max_retrans: self.max_retrans.unwrap_or(d.max_retrans),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
