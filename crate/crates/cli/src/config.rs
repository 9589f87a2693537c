//! Run configuration: one TOML section per example, overridden by flags.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context as _, Result};
use toml::Value;

pub const EXAMPLES: [&str; 5] = ["cylinder", "rigid-fluid-added", "rigid-fluid-shape", "pendulum", "regularity-so4"];

const SOLVER_KEYS: [&str; 4] = ["seed", "tol", "seeds", "tube"];

/// Required and optional keys of an example. `lambda` is listed separately
/// because a sweep supplies it from the grid.
fn keys(example: &str) -> Option<(&'static [&'static str], &'static [&'static str], bool)> {
    Some(match example {
        "cylinder" => (&["n"], &SOLVER_KEYS, true),
        "rigid-fluid-added" => (&[], &["m", "I_B", "A", "B", "casimir", "T", "dt", "seed", "tol", "seeds", "tube"], true),
        "rigid-fluid-shape" => (&[], &["m", "I_B", "B", "rho", "casimir", "T", "dt", "seed", "tol", "seeds", "tube"], true),
        "pendulum" => (&["s"], &SOLVER_KEYS, true),
        "regularity-so4" => (&["subalgebra", "rho"], &["chi", "xi", "s"], false),
        "sweep" => (&["example", "lambda-grid"], &[], false),
        _ => return None,
    })
}

/// Key-value parameters of one example.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    values: BTreeMap<String, Value>,
}

impl Params {
    pub fn set(&mut self, key: &str, value: Value) {
        self.values.insert(key.to_string(), value);
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn remove(&mut self, key: &str) -> Option<Value> {
        self.values.remove(key)
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::Float(v)) => Ok(Some(*v)),
            Some(Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(Value::String(s)) => s.trim().parse().map(Some).map_err(|_| anyhow!("`{key}` must be a number, got `{s}`")),
            Some(v) => bail!("`{key}` must be a number, got {v}"),
        }
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        self.f64(key)?.ok_or_else(|| anyhow!("missing required key `{key}`"))
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::Integer(v)) if *v >= 0 => Ok(Some(*v as u64)),
            Some(Value::String(s)) => s.trim().parse().map(Some).map_err(|_| anyhow!("`{key}` must be a non-negative integer, got `{s}`")),
            Some(v) => bail!("`{key}` must be a non-negative integer, got {v}"),
        }
    }

    pub fn string(&self, key: &str) -> Result<Option<String>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(v) => bail!("`{key}` must be a string, got {v}"),
        }
    }

    /// A list of numbers, given as an array or as `"a,b,c"`.
    pub fn vector(&self, key: &str, len: usize) -> Result<Option<Vec<f64>>> {
        let v: Vec<f64> = match self.values.get(key) {
            None => return Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|x| match x {
                    Value::Float(f) => Ok(*f),
                    Value::Integer(i) => Ok(*i as f64),
                    other => Err(anyhow!("`{key}` entries must be numbers, got {other}")),
                })
                .collect::<Result<_>>()?,
            Some(Value::String(s)) => parse_list(s).with_context(|| format!("`{key}`"))?,
            Some(v) => bail!("`{key}` must be a list of numbers, got {v}"),
        };
        if v.len() != len {
            bail!("`{key}` needs {len} components, got {}", v.len());
        }
        Ok(Some(v))
    }

    /// Rejects unknown keys and reports missing required ones, listing every
    /// offending key. `in_sweep` drops the `lambda` requirement and forbids
    /// the key.
    pub fn validate(&self, example: &str, in_sweep: bool) -> Result<()> {
        let (required, optional, needs_lambda) =
            keys(example).ok_or_else(|| anyhow!("unknown example `{example}`"))?;
        let lambda_ok = needs_lambda && !in_sweep;
        let unknown: Vec<&str> = self
            .keys()
            .filter(|k| !(required.contains(k) || optional.contains(k) || (lambda_ok && *k == "lambda")))
            .collect();
        let mut missing: Vec<&str> = required.iter().copied().filter(|k| !self.contains(k)).collect();
        if lambda_ok && !self.contains("lambda") {
            missing.push("lambda");
        }
        let mut problems = Vec::new();
        if !unknown.is_empty() {
            problems.push(format!("unknown keys for `{example}`: {}", unknown.join(", ")));
        }
        if !missing.is_empty() {
            problems.push(format!("missing required keys for `{example}`: {}", missing.join(", ")));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            bail!("{}", problems.join("; "))
        }
    }
}

/// Comma-separated numbers.
pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| anyhow!("`{}` is not a number", t.trim())))
        .collect()
}

/// `a:b:n`, `n` equally spaced values from `a` to `b` inclusive.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        bail!("lambda grid must look like a:b:n, got `{s}`");
    };
    let a: f64 = a.trim().parse().map_err(|_| anyhow!("bad grid start `{a}`"))?;
    let b: f64 = b.trim().parse().map_err(|_| anyhow!("bad grid end `{b}`"))?;
    let n: usize = n.trim().parse().map_err(|_| anyhow!("bad grid size `{n}`"))?;
    if n == 0 {
        bail!("lambda grid `{s}` is empty");
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

/// Parses `value` as a TOML value, falling back to a bare string.
pub fn parse_value(value: &str) -> Value {
    toml::from_str::<toml::Table>(&format!("v = {value}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(value.to_string()))
}

/// Sections of a config file, keyed by example name (plus `sweep`).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub sections: BTreeMap<String, Params>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = toml::from_str(text).context("config is not valid TOML")?;
        let mut sections = BTreeMap::new();
        let mut problems = Vec::new();
        for (name, value) in table {
            let Value::Table(t) = value else {
                problems.push(format!("top-level key `{name}` is not a section"));
                continue;
            };
            if keys(&name).is_none() {
                problems.push(format!("unknown section `{name}`"));
                continue;
            }
            let mut params = Params::default();
            for (k, v) in t {
                params.set(&k, v);
            }
            sections.insert(name, params);
        }
        // Unknown keys are checked here so that every offending key in the
        // file is reported at once. Missing keys may still come from flags.
        for (name, params) in &sections {
            let (required, optional, needs_lambda) = keys(name).expect("checked above");
            let unknown: Vec<&str> = params
                .keys()
                .filter(|k| !(required.contains(k) || optional.contains(k) || (needs_lambda && *k == "lambda")))
                .collect();
            if !unknown.is_empty() {
                problems.push(format!("unknown keys in [{name}]: {}", unknown.join(", ")));
            }
        }
        if !problems.is_empty() {
            bail!("invalid config: {}", problems.join("; "));
        }
        Ok(Self { sections })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn section(&self, name: &str) -> Params {
        self.sections.get(name).cloned().unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:0.2:3").unwrap(), vec![0.0, 0.1, 0.2]);
        assert_eq!(parse_grid("0.5:1:1").unwrap(), vec![0.5]);
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
    }

    #[test]
    fn every_unknown_key_listed() {
        let err = ConfigFile::parse("[cylinder]\nn = 3\ncolour = 1\nshade = 2\n[nope]\nx = 1\n").unwrap_err();
        let msg = format!("{err:#}");
        for k in ["colour", "shade", "nope"] {
            assert!(msg.contains(k), "{msg}");
        }
    }

    #[test]
    fn values() {
        assert_eq!(parse_value("3"), Value::Integer(3));
        assert_eq!(parse_value("rot"), Value::String("rot".into()));
        let mut p = Params::default();
        p.set("chi", parse_value("0,0,1"));
        assert_eq!(p.vector("chi", 3).unwrap(), Some(vec![0.0, 0.0, 1.0]));
        p.set("rho", parse_value("[1, 2.5, 3]"));
        assert_eq!(p.vector("rho", 3).unwrap(), Some(vec![1.0, 2.5, 3.0]));
        assert!(p.vector("rho", 6).is_err());
    }

    #[test]
    fn validation_lists_missing_and_unknown() {
        let mut p = Params::default();
        p.set("m", Value::Float(1.0));
        p.set("bogus", Value::Float(1.0));
        let msg = p.validate("cylinder", false).unwrap_err().to_string();
        assert!(msg.contains("m, bogus") || msg.contains("bogus, m"), "{msg}");
        assert!(msg.contains("n, lambda"), "{msg}");
    }
}
