//! Run configuration: a `key = value` text file overlaid with command-line flags.
//!
//! The effective configuration is echoed into every output header as `# config.<key> = <value>`
//! lines, and [`RunConfig::from_header`] reads it back, so any output file can be regenerated.

use std::{fmt::Write as _, fs, path::Path, str::FromStr};

use anyhow::{anyhow, bail, Context, Result};

macro_rules! run_config {
    ($($field:ident : $ty:ty),* $(,)?) => {
        /// Every tunable numeric or path setting; `None` means "use the default".
        #[derive(Debug, Clone, Default, PartialEq)]
        pub struct RunConfig {
            $(pub $field: Option<$ty>,)*
        }

        impl RunConfig {
            pub const KEYS: &'static [&'static str] = &[$(stringify!($field)),*];

            fn set(&mut self, key: &str, value: &str) -> Result<()> {
                match key {
                    $(stringify!($field) => {
                        self.$field = Some(parse_value::<$ty>(key, value)?);
                    })*
                    _ => bail!("unknown config key `{key}`"),
                }
                Ok(())
            }

            /// Fields of `other` that are set replace those of `self`.
            pub fn overlay(mut self, other: &RunConfig) -> RunConfig {
                $(if other.$field.is_some() {
                    self.$field = other.$field.clone();
                })*
                self
            }

            /// Set fields as `(key, value)` pairs in declaration order.
            pub fn pairs(&self) -> Vec<(&'static str, String)> {
                let mut out = Vec::new();
                $(if let Some(v) = &self.$field {
                    out.push((stringify!($field), format_value(v)));
                })*
                out
            }
        }
    };
}

run_config! {
    c: f64,
    cmin: f64,
    cmax: f64,
    dc: f64,
    eps: f64,
    delta: f64,
    xmin: f64,
    xmax: f64,
    h: f64,
    tol: f64,
    k: usize,
    dt: f64,
    t_end: f64,
    amplitude: f64,
    scheme: String,
    spectrum: bool,
    seed_file: String,
    out: String,
}

trait ConfigValue {
    fn render(&self) -> String;
}

impl ConfigValue for f64 {
    // `Display` for f64 prints the shortest string that parses back to the same value.
    fn render(&self) -> String {
        format!("{self}")
    }
}

impl ConfigValue for usize {
    fn render(&self) -> String {
        self.to_string()
    }
}

impl ConfigValue for bool {
    fn render(&self) -> String {
        self.to_string()
    }
}

impl ConfigValue for String {
    fn render(&self) -> String {
        self.clone()
    }
}

fn format_value<T: ConfigValue>(v: &T) -> String {
    v.render()
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| anyhow!("invalid value `{value}` for config key `{key}`"))
}

impl RunConfig {
    /// Parses `key = value` lines; blank lines and `#` comments are ignored.
    pub fn parse_str(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", lineno + 1))?;
            cfg.set(key.trim().replace('-', "_").as_str(), value.trim())
                .with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        RunConfig::parse_str(&text).with_context(|| format!("in config file {}", path.display()))
    }

    /// Recovers the configuration from `config.<key>` header entries.
    pub fn from_header<'a>(entries: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        for (k, v) in entries {
            if let Some(key) = k.strip_prefix("config.") {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }

    /// The configuration as a config-file body.
    pub fn to_file_string(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.pairs() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = RunConfig::parse_str("# sweep\nc = 1.5\ncmin=-3\ntol = 1e-11\nseed-file = a.csv\n").unwrap();
        let flags = RunConfig {
            c: Some(2.0),
            ..Default::default()
        };
        let eff = file.overlay(&flags);
        assert_eq!(eff.c, Some(2.0));
        assert_eq!(eff.cmin, Some(-3.0));
        assert_eq!(eff.tol, Some(1e-11));
        assert_eq!(eff.seed_file.as_deref(), Some("a.csv"));
    }

    #[test]
    fn round_trip_is_exact() {
        let cfg = RunConfig {
            c: Some(0.1 + 0.2),
            h: Some(1.0 / 3.0),
            k: Some(4),
            spectrum: Some(true),
            ..Default::default()
        };
        let back = RunConfig::parse_str(&cfg.to_file_string()).unwrap();
        assert_eq!(back, cfg);
        let header: Vec<(String, String)> =
            cfg.pairs().into_iter().map(|(k, v)| (format!("config.{k}"), v)).collect();
        let back = RunConfig::from_header(header.iter().map(|(k, v)| (k.as_str(), v.as_str()))).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(RunConfig::parse_str("speed = 3").is_err());
        assert!(RunConfig::parse_str("c = fast").is_err());
        assert!(RunConfig::parse_str("c 3").is_err());
    }
}
