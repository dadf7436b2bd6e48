//! `--config FILE`: `key=value` lines, one per long flag, `#` comments.
//!
//! Entries are spliced into the argument list right after the subcommand,
//! ahead of the user's own flags. Later occurrences win, so flags given on
//! the command line override the file. Boolean flags take `true`/`false`.

use std::path::Path;

use clap::{ArgAction, Command};

pub fn parse_file(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Removes `--config X` / `--config=X` from `args`, returning `X`.
fn take_config(args: &mut Vec<String>) -> Result<Option<String>, String> {
    let mut found = None;
    let mut i = 1;
    while i < args.len() {
        if args[i] == "--config" {
            if i + 1 >= args.len() {
                return Err("--config needs a file".into());
            }
            found = Some(args.remove(i + 1));
            args.remove(i);
        } else if let Some(v) = args[i].strip_prefix("--config=") {
            found = Some(v.to_string());
            args.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(found)
}

/// Expands `--config` in `args` against the command tree `cmd`.
pub fn expand(mut args: Vec<String>, cmd: &Command) -> Result<Vec<String>, String> {
    let Some(path) = take_config(&mut args)? else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| format!("cannot read config file {path}: {e}"))?;
    let entries = parse_file(&text)?;

    // Locate the leaf subcommand and the position just after it.
    let mut leaf = cmd;
    let mut insert_at = None;
    let mut i = 1;
    while i < args.len() {
        if let Some(sub) = leaf.find_subcommand(&args[i]) {
            leaf = sub;
            insert_at = Some(i + 1);
            if !leaf.has_subcommands() {
                break;
            }
        }
        i += 1;
    }
    let Some(at) = insert_at.filter(|_| !leaf.has_subcommands()) else {
        return Ok(args);
    };

    let mut global = Vec::new();
    let mut local = Vec::new();
    for (key, value) in entries {
        if key == "config" {
            continue;
        }
        let arg = leaf
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .or_else(|| cmd.get_arguments().find(|a| a.get_long() == Some(key.as_str())));
        let Some(arg) = arg else {
            return Err(format!("unknown config key `{key}` for `{}`", leaf.get_name()));
        };
        let target = if cmd.get_arguments().any(|a| a.get_id() == arg.get_id()) { &mut global } else { &mut local };
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match value.as_str() {
                "true" => target.push(format!("--{key}")),
                "false" => {}
                _ => return Err(format!("config key `{key}` takes true or false")),
            }
        } else {
            target.push(format!("--{key}={value}"));
        }
    }
    let mut out: Vec<String> = args[..1].to_vec();
    out.extend(global);
    out.extend(args[1..at].iter().cloned());
    out.extend(local);
    out.extend(args[at..].iter().cloned());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::Cli;
    use clap::CommandFactory;

    fn v(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_comments_and_blanks() {
        let e = parse_file("# c\n\nn = 5\nlambda=0.8\n").unwrap();
        assert_eq!(e, vec![("n".into(), "5".into()), ("lambda".into(), "0.8".into())]);
        assert!(parse_file("nonsense").is_err());
    }

    #[test]
    fn splices_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.txt");
        std::fs::write(&p, "n=5\njobs=2\noracle=true\n").unwrap();
        let args = v(&["arw", "layer", "enum", "--config", p.to_str().unwrap(), "--n", "3"]);
        let out = expand(args, &Cli::command()).unwrap();
        assert_eq!(out, v(&["arw", "--jobs=2", "layer", "enum", "--n=5", "--oracle", "--n", "3"]));
    }

    #[test]
    fn rejects_unknown_key() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.txt");
        std::fs::write(&p, "bogus=1\n").unwrap();
        let args = v(&["arw", "--config", p.to_str().unwrap(), "hockey"]);
        assert!(expand(args, &Cli::command()).is_err());
    }
}
