//! Flat `key = value` scan configuration.
//!
//! ```text
//! # comments run to end of line
//! system.n = 100
//! scan.sigma = 0:0.5:12          # start:step:stop, stop inclusive
//! scan.chi_t = 0.01, 0.05, pi/8  # comma lists mix scalars and ranges
//! protocols = trivial, echo
//! ```

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use spinlab::protocols::ProtocolKind;

/// Largest number of points a single range may expand to.
const MAX_RANGE_POINTS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based line, if the problem is tied to one.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: Option<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError { line, message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Entry {
    value: String,
    line: usize,
}

/// Parsed configuration. Getters record which keys were read so that
/// [`Config::finish`] can reject keys no runner understood.
#[derive(Debug, Default)]
pub struct Config {
    entries: BTreeMap<String, Entry>,
    used: RefCell<BTreeSet<String>>,
}

impl PartialEq for Config {
    fn eq(&self, other: &Self) -> bool {
        self.values() == other.values()
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) =
                content.split_once('=').ok_or_else(|| err(Some(line), format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty()
                || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || matches!(c, '.' | '_' | '-'))
            {
                return Err(err(Some(line), format!("invalid key `{key}`")));
            }
            if value.is_empty() {
                return Err(err(Some(line), format!("`{key}` has no value")));
            }
            if let Some(prev) = entries.get(key) {
                let Entry { line: first, .. } = prev;
                return Err(err(Some(line), format!("duplicate key `{key}` (first set on line {first})")));
            }
            entries.insert(key.to_string(), Entry { value: value.to_string(), line });
        }
        Ok(Self { entries, used: RefCell::default() })
    }

    /// Raw values by key.
    pub fn values(&self) -> BTreeMap<String, String> {
        self.entries.iter().map(|(k, e)| (k.clone(), e.value.clone())).collect()
    }

    /// Canonical text form; parses back to an equal config.
    #[cfg(test)]
    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, e)| format!("{k} = {}\n", e.value)).collect()
    }

    fn raw(&self, key: &str) -> Option<&Entry> {
        self.used.borrow_mut().insert(key.to_string());
        self.entries.get(key)
    }

    fn typed<T>(&self, key: &str, parse: impl FnOnce(&str) -> Result<T, String>) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(e) => parse(&e.value).map(Some).map_err(|m| err(Some(e.line), format!("`{key}`: {m}"))),
        }
    }

    /// Error tied to the line of `key`, or to no line when it is unset.
    pub fn error_at(&self, key: &str, message: impl Into<String>) -> ConfigError {
        err(self.entries.get(key).map(|e| e.line), format!("`{key}`: {}", message.into()))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.typed(key, parse_scalar)?.unwrap_or(default))
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.typed(key, parse_scalar)
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        Ok(self.typed(key, |s| s.parse::<usize>().map_err(|_| format!("expected a nonnegative integer, got `{s}`")))?.unwrap_or(default))
    }

    pub fn u64_opt(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.typed(key, |s| s.parse::<u64>().map_err(|_| format!("expected an unsigned integer, got `{s}`")))
    }

    pub fn string_or(&self, key: &str, default: &str) -> Result<String, ConfigError> {
        Ok(self.typed(key, |s| Ok(s.to_string()))?.unwrap_or_else(|| default.to_string()))
    }

    /// A nonempty grid of finite values, or `default` when unset.
    pub fn grid_or(&self, key: &str, default: impl FnOnce() -> Vec<f64>) -> Result<Vec<f64>, ConfigError> {
        Ok(self.typed(key, parse_grid)?.unwrap_or_else(default))
    }

    pub fn list_or<T>(
        &self,
        key: &str,
        default: &[T],
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Vec<T>, ConfigError>
    where
        T: Clone,
    {
        let parsed = self.typed(key, |s| s.split(',').map(|t| parse(t.trim())).collect::<Result<Vec<T>, String>>())?;
        Ok(parsed.unwrap_or_else(|| default.to_vec()))
    }

    /// Fails on the first key that was never read.
    pub fn finish(&self) -> Result<(), ConfigError> {
        let used = self.used.borrow();
        match self.entries.iter().filter(|(k, _)| !used.contains(*k)).min_by_key(|(_, e)| e.line) {
            Some((k, e)) => Err(err(Some(e.line), format!("unknown key `{k}` for this subcommand"))),
            None => Ok(()),
        }
    }
}

/// A real number, optionally a multiple or fraction of `pi`: `0.25`,
/// `pi`, `-pi/2`, `3pi/4`, `2*pi`, `1e-3`.
pub fn parse_scalar(s: &str) -> Result<f64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("expected a number, got `{s}`");
    let value = if let Some(at) = t.find("pi") {
        let (coef, rest) = t.split_at(at);
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        let den = match &rest[2..] {
            "" => 1.0,
            d => d.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
        };
        c * std::f64::consts::PI / den
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

/// Comma-separated scalars and `start:step:stop` ranges. Ranges include
/// `stop` when it lies on the lattice up to rounding.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(parse_scalar(x)?),
            [a, d, b] => {
                let (a, d, b) = (parse_scalar(a)?, parse_scalar(d)?, parse_scalar(b)?);
                if d == 0.0 || (b - a) * d < 0.0 {
                    return Err(format!("range `{item}` has a step that never reaches the stop"));
                }
                let count = ((b - a) / d + 1e-9).floor() as usize + 1;
                if count > MAX_RANGE_POINTS {
                    return Err(format!("range `{item}` expands to more than {MAX_RANGE_POINTS} points"));
                }
                out.extend((0..count).map(|i| a + i as f64 * d));
            }
            _ => return Err(format!("expected a number or start:step:stop, got `{item}`")),
        }
    }
    if out.is_empty() {
        return Err("grid is empty".into());
    }
    Ok(out)
}

/// A protocol name, with an optional `ghz-` prefix selecting the cat-state
/// entangler.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct ProtocolChoice {
    pub kind: ProtocolKind,
    pub ghz: bool,
}

impl ProtocolChoice {
    pub fn name(&self) -> String {
        if self.ghz {
            format!("ghz-{}", self.kind)
        } else {
            self.kind.to_string()
        }
    }
}

pub fn parse_protocol(s: &str) -> Result<ProtocolChoice, String> {
    let t = s.trim().to_ascii_lowercase();
    let (ghz, rest) = match t.strip_prefix("ghz-") {
        Some(r) if r != "readout" => (true, r),
        _ => (false, t.as_str()),
    };
    let kind = rest.parse::<ProtocolKind>().map_err(|e| e.to_string())?;
    Ok(ProtocolChoice { kind, ghz })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn scalars_with_pi() {
        assert_eq!(parse_scalar("0.25").unwrap(), 0.25);
        assert_eq!(parse_scalar("pi").unwrap(), PI);
        assert_eq!(parse_scalar("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_scalar("3pi/4").unwrap(), 3.0 * PI / 4.0);
        assert_eq!(parse_scalar("2 * pi").unwrap(), 2.0 * PI);
        assert!(parse_scalar("pie").is_err());
        assert!(parse_scalar("inf").is_err());
        assert!(parse_scalar("").is_err());
    }

    #[test]
    fn ranges_include_stop() {
        assert_eq!(parse_grid("0:0.5:2").unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let g = parse_grid("0:0.1:0.3").unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(parse_grid("1, 0:1:2, pi").unwrap(), vec![1.0, 0.0, 1.0, 2.0, PI]);
        assert_eq!(parse_grid("2:-1:0").unwrap(), vec![2.0, 1.0, 0.0]);
        assert!(parse_grid("0:0:1").is_err());
        assert!(parse_grid("0:-1:1").is_err());
        assert!(parse_grid("0:1").is_err());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = Config::parse("system.n = 10\n\nbogus line\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        let e = Config::parse("a = 1\na = 2\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let c = Config::parse("# header\nsystem.n = ten\n").unwrap();
        assert_eq!(c.usize_or("system.n", 1).unwrap_err().line, Some(2));
    }

    #[test]
    fn unread_keys_are_rejected() {
        let c = Config::parse("system.n = 10\nscan.sigmaa = 1\n").unwrap();
        c.usize_or("system.n", 1).unwrap();
        c.grid_or("scan.sigma", Vec::new).unwrap();
        let e = c.finish().unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(e.message.contains("scan.sigmaa"));
    }

    #[test]
    fn text_round_trip() {
        let c = Config::parse("scan.sigma = 0:1:4 # noise\nsystem.n = 20\n").unwrap();
        assert_eq!(Config::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn protocol_names() {
        assert_eq!(parse_protocol("echo").unwrap(), ProtocolChoice { kind: ProtocolKind::Echo, ghz: false });
        assert_eq!(parse_protocol("ghz-echo").unwrap(), ProtocolChoice { kind: ProtocolKind::Echo, ghz: true });
        assert_eq!(parse_protocol("ghz-readout").unwrap().kind, ProtocolKind::GhzReadout);
        assert!(parse_protocol("ghz-sideways").is_err());
    }
}
