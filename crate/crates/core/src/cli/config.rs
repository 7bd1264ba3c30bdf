//! Flag defaults from a flat `key = value` file.
//!
//! Every entry becomes `--key value` (or a bare `--key` for `true`,
//! nothing for `false`) inserted directly after the subcommand, so flags
//! given on the command line override the file. A `command` entry names
//! the subcommand when none is given.

use std::ffi::OsString;
use std::path::Path;

use ini::Ini;

use super::CliError;

pub const SUBCOMMANDS: [&str; 4] = ["rate", "sweep", "threshold", "selfcheck"];
const GLOBAL_VALUE_FLAGS: [&str; 3] = ["--out", "--config", "--parallel"];

/// Entries of a config file in file order; section headers are ignored.
pub fn load_config(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let ini = Ini::load_from_file(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    Ok(ini
        .iter()
        .flat_map(|(_, props)| props.iter().map(|(k, v)| (k.trim().to_string(), v.trim().to_string())))
        .collect())
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut iter = args.iter().skip(1);
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            return iter.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn subcommand_position(args: &[OsString]) -> Option<usize> {
    (1..args.len()).find(|&i| {
        let s = args[i].to_string_lossy();
        SUBCOMMANDS.contains(&s.as_ref()) && !GLOBAL_VALUE_FLAGS.contains(&args[i - 1].to_string_lossy().as_ref())
    })
}

/// Splices the entries of `--config <path>`, if any, into `args`.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let entries = load_config(Path::new(&path))?;
    let mut args = args;
    let mut command = None;
    let mut injected: Vec<OsString> = Vec::new();
    for (key, value) in entries {
        if key == "command" {
            command = Some(value);
            continue;
        }
        match value.as_str() {
            "true" => injected.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                injected.push(format!("--{key}").into());
                injected.push(value.into());
            }
        }
    }
    let at = match subcommand_position(&args) {
        Some(i) => i + 1,
        None => {
            let Some(command) = command else {
                return Err(CliError::Usage(format!(
                    "no subcommand given and config {} has no 'command' entry",
                    Path::new(&path).display()
                )));
            };
            args.push(command.into());
            args.len()
        }
    };
    args.splice(at..at, injected);
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn entries_follow_subcommand() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# recipe\ncommand = sweep\nvar = T\nV0 = 1,10\njson = true\nparallel = 2").unwrap();
        let path = f.path().to_str().unwrap();
        let out = expand_args(os(&["cvqkd", "--config", path, "sweep", "--count", "5"])).unwrap();
        assert_eq!(
            out,
            os(&[
                "cvqkd",
                "--config",
                path,
                "sweep",
                "--var",
                "T",
                "--V0",
                "1,10",
                "--json",
                "--parallel",
                "2",
                "--count",
                "5"
            ])
        );
        let out = expand_args(os(&["cvqkd", "--config", path])).unwrap();
        assert_eq!(out[3], OsString::from("sweep"));
    }

    #[test]
    fn missing_file_is_usage_error() {
        let err = expand_args(os(&["cvqkd", "--config", "/nonexistent/x.ini", "rate"])).unwrap_err();
        assert!(matches!(err, CliError::Usage(_)));
    }

    #[test]
    fn untouched_without_config() {
        let args = os(&["cvqkd", "rate", "--T", "0.5"]);
        assert_eq!(expand_args(args.clone()).unwrap(), args);
    }
}
