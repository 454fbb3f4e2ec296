//! `--config` files: a JSON object mapping flag names to values, spliced in
//! right after the subcommand so that explicit flags override them.

use std::ffi::OsString;
use std::path::Path;

use serde_json::Value;

const SUBCOMMANDS: [&str; 10] = [
    "generate",
    "fit",
    "tune",
    "select",
    "intervals",
    "bvm",
    "check-prior",
    "run-toy",
    "run-scenario",
    "bench",
];

/// Global flags that take a value, so their next token is never a subcommand.
const VALUED_GLOBALS: [&str; 4] = ["--seed", "--jobs", "--out", "--config"];

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            return None;
        }
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = s.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    None
}

fn subcommand_position(argv: &[OsString]) -> Option<usize> {
    let mut skip_next = false;
    for (i, a) in argv.iter().enumerate().skip(1) {
        if skip_next {
            skip_next = false;
            continue;
        }
        let s = a.to_string_lossy();
        if VALUED_GLOBALS.contains(&s.as_ref()) {
            skip_next = true;
        } else if SUBCOMMANDS.contains(&s.as_ref()) {
            return Some(i);
        }
    }
    None
}

/// Turns a config object into command-line tokens.
pub fn config_tokens(value: &Value) -> Result<Vec<OsString>, String> {
    let obj = value
        .as_object()
        .ok_or("config must be a JSON object of flag names to values")?;
    let mut out = Vec::new();
    for (key, v) in obj {
        let key = key.trim_start_matches('-');
        if key == "config" {
            return Err("config files cannot nest --config".into());
        }
        let flag = format!("--{key}");
        let scalar = |v: &Value| -> Result<String, String> {
            match v {
                Value::String(s) => Ok(s.clone()),
                Value::Number(n) => Ok(n.to_string()),
                other => Err(format!("unsupported value for `{key}`: {other}")),
            }
        };
        match v {
            Value::Bool(true) => out.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                let joined = items.iter().map(scalar).collect::<Result<Vec<_>, _>>()?;
                out.push(flag.into());
                out.push(joined.join(",").into());
            }
            other => {
                out.push(flag.into());
                out.push(scalar(other)?.into());
            }
        }
    }
    Ok(out)
}

fn read_config(path: &Path) -> Result<Value, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
}

/// Returns `argv` with the tokens of any `--config` file inserted after the
/// subcommand name.
pub fn merge_config(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let tokens = config_tokens(&read_config(Path::new(&path))?)?;
    let Some(pos) = subcommand_position(&argv) else {
        return Ok(argv);
    };
    let mut merged = argv;
    merged.splice(pos + 1..pos + 1, tokens);
    Ok(merged)
}
