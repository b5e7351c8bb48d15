//! `--config FILE`: a TOML table whose keys are long flag names. Its
//! entries are spliced in right after the subcommand, so flags given on the
//! command line win.

use std::ffi::OsString;

use anyhow::{bail, Context, Result};
use toml::Value;

pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut path = None;
    let mut rest = Vec::with_capacity(args.len());
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            path = Some(iter.next().context("--config needs a file")?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {}", path.to_string_lossy()))?;
    let table: toml::Table = text.parse().with_context(|| format!("parsing config {}", path.to_string_lossy()))?;
    let mut injected = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Boolean(true) => injected.push(flag),
            Value::Boolean(false) => {}
            Value::String(s) => injected.push(format!("{flag}={s}")),
            Value::Integer(i) => injected.push(format!("{flag}={i}")),
            Value::Float(f) => injected.push(format!("{flag}={f}")),
            Value::Array(items) => {
                let parts: Vec<String> = items
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                injected.push(format!("{flag}={}", parts.join(",")));
            }
            other => bail!("config key `{key}` has unsupported value {other}"),
        }
    }
    // program name and subcommand come first
    let split = rest.len().min(2);
    let mut out: Vec<OsString> = rest[..split].to_vec();
    out.extend(injected.into_iter().map(OsString::from));
    out.extend(rest[split..].iter().cloned());
    Ok(out)
}
