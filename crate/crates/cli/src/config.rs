//! Flat `key = value` run files. Command-line flags win over file values.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Default)]
pub struct Config {
    values: HashMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", n + 1))?;
            let key = k.trim().replace('_', "-");
            if key.is_empty() {
                return Err(format!("line {}: empty key", n + 1));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    /// Flag value if given, else the file value, else `None`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, String> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| format!("config key {key}: cannot parse {v:?}")),
        }
    }

    pub fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T, String> {
        self.pick(flag, key)?.ok_or_else(|| format!("missing parameter {key}"))
    }

    pub fn or<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, String> {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }
}

/// Comma-separated list, e.g. `1,0,2`.
#[derive(Clone, Debug, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|p| p.trim().parse::<T>().map_err(|_| format!("bad list entry {p:?}")))
            .collect::<Result<Vec<_>, _>>()
            .map(List)
    }
}

impl<T: Copy> List<T> {
    /// One value for all three axes or one per axis.
    pub fn triple(&self, what: &str) -> Result<[T; 3], String> {
        match self.0.as_slice() {
            [a] => Ok([*a, *a, *a]),
            [a, b, c] => Ok([*a, *b, *c]),
            _ => Err(format!("{what} needs 1 or 3 values")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_precedence() {
        let c = Config::parse("# run\ngroup = su(2)\nn = 12 # sites\n\nmax_iters=5\n").unwrap();
        assert_eq!(c.require::<String>(None, "group").unwrap(), "su(2)");
        assert_eq!(c.require::<usize>(None, "n").unwrap(), 12);
        assert_eq!(c.require::<usize>(Some(3), "n").unwrap(), 3);
        assert_eq!(c.require::<usize>(None, "max-iters").unwrap(), 5);
        assert!(c.require::<usize>(None, "seed").is_err());
        assert!(Config::parse("novalue\n").is_err());
    }

    #[test]
    fn lists_expand_to_triples() {
        let l: List<usize> = "8".parse().unwrap();
        assert_eq!(l.triple("n").unwrap(), [8, 8, 8]);
        let l: List<i64> = "1, -2,0".parse().unwrap();
        assert_eq!(l.triple("m").unwrap(), [1, -2, 0]);
        assert!("1,2".parse::<List<i64>>().unwrap().triple("m").is_err());
    }
}
