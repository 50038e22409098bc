//! `key=value` config files, turned into command-line flags.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;

/// Boolean keys, which become bare flags.
const SWITCHES: &[&str] = &["keep-going"];

/// Parses a config file. Blank lines and `#` comments are skipped, and a
/// repeated key collects its values into a comma-separated list.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut order = Vec::new();
    let mut values: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
        let key = key.trim().replace('_', "-").replace("ell-", "ell_");
        if key.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        if !values.contains_key(&key) {
            order.push(key.clone());
        }
        values.entry(key).or_default().push(value.trim().to_string());
    }
    Ok(order
        .into_iter()
        .map(|k| {
            let v = values.remove(&k).unwrap_or_default().join(",");
            (k, v)
        })
        .collect())
}

fn to_flags(pairs: &[(String, String)]) -> Result<Vec<OsString>, String> {
    let mut out = Vec::new();
    for (k, v) in pairs {
        if k == "config" {
            return Err("config files cannot include other config files".into());
        }
        if SWITCHES.contains(&k.as_str()) {
            match v.as_str() {
                "true" | "1" | "yes" => out.push(format!("--{k}").into()),
                "false" | "0" | "no" => {}
                _ => return Err(format!("{k}: expected true or false, got `{v}`")),
            }
        } else {
            out.push(format!("--{k}").into());
            out.push(v.into());
        }
    }
    Ok(out)
}

/// Finds `--config FILE` in `args` and splices the file's flags in right
/// after the subcommand, so flags given on the command line win.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut path = None;
    let mut rest = Vec::with_capacity(args.len());
    let mut iter = args.into_iter();
    while let Some(a) = iter.next() {
        match a.to_str() {
            Some("--config") => path = Some(iter.next().ok_or("--config needs a file")?),
            Some(s) if s.starts_with("--config=") => path = Some(s["--config=".len()..].into()),
            _ => rest.push(a),
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.to_string_lossy()))?;
    let flags = to_flags(&parse(&text)?)?;
    let at = rest.len().min(2);
    rest.splice(at..at, flags);
    Ok(rest)
}
