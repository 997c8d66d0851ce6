//! Line-oriented configuration files.
//!
//! ```text
//! # comment
//! [code]
//! q = 2
//! octal = 7,5
//!
//! [sweep]
//! kind = opt-prob
//! snr = 1,4,16
//! ```
//!
//! Keys live in sections; a key outside any section, an unknown section or
//! key, or a repeated key is an error naming the offending key.

use std::collections::BTreeMap;
use std::fmt;

const KNOWN: &[(&str, &[&str])] = &[
    ("code", &["q", "k", "n", "nu", "octal", "taps", "map"]),
    ("channel", &["snr", "sigma2", "seed"]),
    ("nll", &["xi", "big_m", "condition_a", "boundary"]),
    (
        "sweep",
        &["kind", "snr", "len", "trials", "seed", "decoder", "guess", "strategy", "perturbed", "threads"],
    ),
    ("hmm", &["transitions", "process", "alphabet", "points", "dim", "snr", "nu", "terminated"]),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    /// `section.key`, or the section name for section-level errors.
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: `{}`: {}", self.key, self.message),
            None => write!(f, "`{}`: {}", self.key, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            key: key.into(),
            line: None,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut section: Option<&str> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |key: &str, msg: &str| ConfigError {
                key: key.to_string(),
                line: Some(line_no),
                message: msg.to_string(),
            };
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(line, "unterminated section header"))?
                    .trim();
                let Some((known, _)) = KNOWN.iter().find(|(s, _)| *s == name) else {
                    return Err(err(name, "unknown section"));
                };
                section = Some(known);
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(line, "expected `key = value`"))?;
            let key = key.trim();
            let value = value.trim();
            let Some(sec) = section else {
                return Err(err(key, "key outside of a section"));
            };
            let full = format!("{sec}.{key}");
            let keys = KNOWN.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
            if !keys.contains(&key) {
                return Err(err(&full, "unknown key"));
            }
            if value.is_empty() {
                return Err(err(&full, "empty value"));
            }
            if entries.insert(full.clone(), (value.to_string(), line_no)).is_some() {
                return Err(err(&full, "key given twice"));
            }
        }
        Ok(ConfigFile { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn has_section(&self, section: &str) -> bool {
        let prefix = format!("{section}.");
        self.entries.keys().any(|k| k.starts_with(&prefix))
    }

    /// Parses a present value, with errors naming the key and line.
    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => v.parse().map(Some).map_err(|_| ConfigError {
                key: key.to_string(),
                line: Some(*line),
                message: format!("cannot parse `{v}`"),
            }),
        }
    }

    pub fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ConfigError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((v, line)) => parse_list(v).map(Some).map_err(|e| ConfigError {
                key: key.to_string(),
                line: Some(*line),
                message: e,
            }),
        }
    }
}

/// Comma-separated list; surrounding whitespace is ignored.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|item| {
            let item = item.trim();
            item.parse().map_err(|_| format!("cannot parse `{item}`"))
        })
        .collect()
}

/// Semicolon-separated rows of comma-separated reals.
pub fn parse_matrix(s: &str) -> Result<Vec<Vec<f64>>, String> {
    s.split(';').map(parse_list).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let cfg = ConfigFile::parse("# top\n[code]\nq = 2 # binary\noctal = 7, 5\n\n[sweep]\nsnr=1,4\n").unwrap();
        assert_eq!(cfg.parsed::<u32>("code.q").unwrap(), Some(2));
        assert_eq!(cfg.list::<u32>("code.octal").unwrap(), Some(vec![7, 5]));
        assert_eq!(cfg.list::<f64>("sweep.snr").unwrap(), Some(vec![1.0, 4.0]));
        assert_eq!(cfg.get("sweep.kind"), None);
        assert!(cfg.has_section("code"));
        assert!(!cfg.has_section("hmm"));
    }

    #[test]
    fn errors_name_the_key() {
        let e = ConfigFile::parse("[code]\nqq = 2\n").unwrap_err();
        assert_eq!((e.key.as_str(), e.line), ("code.qq", Some(2)));
        let e = ConfigFile::parse("q = 2\n").unwrap_err();
        assert_eq!(e.key, "q");
        let e = ConfigFile::parse("[bogus]\n").unwrap_err();
        assert_eq!(e.key, "bogus");
        let e = ConfigFile::parse("[code]\nq = 2\nq = 3\n").unwrap_err();
        assert_eq!((e.key.as_str(), e.line), ("code.q", Some(3)));
        let cfg = ConfigFile::parse("[code]\nq = two\n").unwrap();
        let e = cfg.parsed::<u32>("code.q").unwrap_err();
        assert!(e.to_string().contains("code.q"));
    }

    #[test]
    fn matrix_rows() {
        assert_eq!(parse_matrix("0.9,0.1; 0.5,0.5").unwrap(), vec![vec![0.9, 0.1], vec![0.5, 0.5]]);
        assert!(parse_matrix("0.9,x").is_err());
    }
}
