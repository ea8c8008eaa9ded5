use std::fmt::Display;
use std::str::FromStr;
use std::sync::Mutex;

use super::config::ConfigFile;
use crate::error::{Error, Result};

/// Layered lookup: command-line flags, then the config file, then the
/// caller's default. Every value read is recorded, so the resolved set can be
/// echoed into the manifest and written back as a config file.
#[derive(Debug, Default)]
pub struct Settings {
    file: ConfigFile,
    flags: ConfigFile,
    resolved: Mutex<ConfigFile>,
}

impl Settings {
    pub fn new(file: ConfigFile, flags: ConfigFile) -> Self {
        Settings { file, flags, resolved: Mutex::new(ConfigFile::default()) }
    }

    fn record(&self) -> std::sync::MutexGuard<'_, ConfigFile> {
        self.resolved.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.flags.get(key).or_else(|| self.file.get(key))
    }

    fn parse<T: FromStr>(key: &str, raw: &str) -> Result<T> {
        raw.parse::<T>()
            .map_err(|_| Error::InvalidArgument(format!("cannot parse {key} = {raw:?}")))
    }

    pub fn value<T: FromStr + Display>(&self, key: &str, default: T) -> Result<T> {
        let v = match self.raw(key) {
            Some(raw) => Self::parse(key, raw)?,
            None => default,
        };
        self.record().set(key, v.to_string());
        Ok(v)
    }

    /// A value with no default; absent keys are recorded as `none`.
    pub fn optional<T: FromStr + Display>(&self, key: &str) -> Result<Option<T>> {
        let v = match self.raw(key) {
            Some("none") | None => None,
            Some(raw) => Some(Self::parse(key, raw)?),
        };
        let shown = v.as_ref().map_or_else(|| "none".to_string(), |x: &T| x.to_string());
        self.record().set(key, shown);
        Ok(v)
    }

    /// Comma-separated list of floats.
    pub fn list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        let v = match self.raw(key) {
            Some(raw) => raw
                .split(',')
                .map(|t| Self::parse::<f64>(key, t.trim()))
                .collect::<Result<Vec<f64>>>()?,
            None => default.to_vec(),
        };
        let shown: Vec<String> = v.iter().map(f64::to_string).collect();
        self.record().set(key, shown.join(", "));
        Ok(v)
    }

    pub fn resolved(&self) -> ConfigFile {
        self.record().clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_and_defaults_fill_gaps() {
        let file = ConfigFile::parse("[grid]\nL = 2\nK = 64\n").unwrap();
        let mut flags = ConfigFile::default();
        flags.set("grid.K", "32");
        let s = Settings::new(file, flags);
        assert_eq!(s.value("grid.L", 1.0).unwrap(), 2.0);
        assert_eq!(s.value("grid.K", 16usize).unwrap(), 32);
        assert_eq!(s.value("time.dt", 1e-3).unwrap(), 1e-3);
        assert_eq!(s.optional::<f64>("time.step").unwrap(), None);
        assert_eq!(s.list("experiment.N_list", &[4.0, 8.0]).unwrap(), vec![4.0, 8.0]);
        let r = s.resolved();
        assert_eq!(r.get("grid.K"), Some("32"));
        assert_eq!(r.get("time.step"), Some("none"));
        assert_eq!(r.get("experiment.N_list"), Some("4, 8"));
    }

    #[test]
    fn resolved_values_round_trip() {
        let s = Settings::default();
        let x = s.value("a.x", 0.1f64 + 0.2).unwrap();
        let again = Settings::new(s.resolved(), ConfigFile::default());
        assert_eq!(again.value("a.x", 0.0f64).unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn bad_values_are_rejected() {
        let s = Settings::new(ConfigFile::parse("[grid]\nK = many\n").unwrap(), ConfigFile::default());
        assert!(matches!(s.value("grid.K", 8usize), Err(Error::InvalidArgument(_))));
    }
}
