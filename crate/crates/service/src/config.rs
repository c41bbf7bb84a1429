use std::net::SocketAddr;
use std::path::PathBuf;

pub const DEFAULT_ADDR: &str = "127.0.0.1:8787";
pub const DEFAULT_DATA_DIR: &str = "gesto-data";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ServerConfig {
    pub addr: SocketAddr,
    pub data_dir: PathBuf,
}

#[derive(Debug, thiserror::Error)]
#[error("GESTO_ADDR is not a socket address: {0:?}")]
pub struct ConfigError(String);

impl ServerConfig {
    /// Reads GESTO_ADDR and GESTO_DATA_DIR.
    pub fn from_env() -> Result<Self, ConfigError> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let raw = get("GESTO_ADDR").unwrap_or_else(|| DEFAULT_ADDR.to_owned());
        let addr = raw.parse().map_err(|_| ConfigError(raw))?;
        let data_dir = get("GESTO_DATA_DIR").map_or_else(|| PathBuf::from(DEFAULT_DATA_DIR), PathBuf::from);
        Ok(Self { addr, data_dir })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let c = ServerConfig::from_lookup(|_| None).unwrap();
        assert_eq!(c.addr.to_string(), DEFAULT_ADDR);
        assert_eq!(c.data_dir, PathBuf::from(DEFAULT_DATA_DIR));
        let c = ServerConfig::from_lookup(|k| (k == "GESTO_ADDR").then(|| "0.0.0.0:9000".to_owned())).unwrap();
        assert_eq!(c.addr.port(), 9000);
        assert!(ServerConfig::from_lookup(|_| Some("nope".into())).is_err());
    }
}
