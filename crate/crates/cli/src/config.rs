//! Flat `key = value` config files and list-valued flag parsers.
//!
//! A config file mirrors the flags of one subcommand: `kmax = 120` is `--kmax 120`,
//! `svg = true` is `--svg`, and a key may repeat for repeatable flags. File values
//! are inserted right after the subcommand name, so flags on the command line win.

use std::path::Path;

use sphinv::kernel_ridge::log_grid;

use crate::error::CliError;

/// Parses the body of a config file into `(key, value)` pairs.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {}: expected key = value", i + 1)))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(CliError::Config(format!("config line {}: bad key '{}'", i + 1, k.trim())));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Flag tokens for config pairs; `true`/`false` values become switches.
pub fn config_tokens(pairs: &[(String, String)]) -> Vec<String> {
    let mut out = Vec::new();
    for (k, v) in pairs {
        match v.as_str() {
            "true" => out.push(format!("--{k}")),
            "false" => {}
            _ => {
                out.push(format!("--{k}"));
                out.push(v.clone());
            }
        }
    }
    out
}

/// Replaces `--config <file>` in `argv` (program name first) by the file's flags.
pub fn expand_config(argv: &[String], subcommands: &[&str]) -> Result<Vec<String>, CliError> {
    let mut args: Vec<String> = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut i = 0;
    while i < argv.len() {
        let a = &argv[i];
        if a == "--config" {
            let p = argv.get(i + 1).ok_or_else(|| CliError::Config("--config needs a file".into()))?;
            path = Some(p.clone());
            i += 2;
            continue;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            args.push(a.clone());
        }
        i += 1;
    }
    let Some(path) = path else { return Ok(args) };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::Config(format!("cannot read config '{path}': {e}")))?;
    let tokens = config_tokens(&parse_config(&text)?);
    let at = args
        .iter()
        .skip(1)
        .position(|a| subcommands.contains(&a.as_str()))
        .ok_or_else(|| CliError::Config("--config needs a subcommand on the command line".into()))?;
    let at = at + 2;
    args.splice(at..at, tokens);
    Ok(args)
}

/// Comma-separated integers, with `a..b` for a half-open range.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| format!("bad range '{part}'"))?;
            let b: usize = b.trim().parse().map_err(|_| format!("bad range '{part}'"))?;
            out.extend(a..b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad integer '{part}'"))?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

pub fn parse_u64_list(s: &str) -> Result<Vec<u64>, String> {
    Ok(parse_usize_list(s)?.into_iter().map(|v| v as u64).collect())
}

/// Comma-separated reals, or `lo:hi:count` for a log-spaced grid.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() == 3 {
        let lo: f64 = parts[0].parse().map_err(|_| format!("bad grid start '{}'", parts[0]))?;
        let hi: f64 = parts[1].parse().map_err(|_| format!("bad grid end '{}'", parts[1]))?;
        let n: usize = parts[2].parse().map_err(|_| format!("bad grid count '{}'", parts[2]))?;
        if !(lo > 0.0 && hi >= lo && n > 0) {
            return Err(format!("log grid needs 0 < lo <= hi and count > 0, got '{s}'"));
        }
        return Ok(log_grid(lo, hi, n));
    }
    let out: Result<Vec<f64>, String> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|_| format!("bad number '{p}'")))
        .collect();
    let out = out?;
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn config_round_trip() {
        let pairs = parse_config("# comment\nset = cyclic:d=8\n\nkmax=120\nexact = true\nsvg = false\n").unwrap();
        assert_eq!(config_tokens(&pairs), v(&["--set", "cyclic:d=8", "--kmax", "120", "--exact"]));
        assert!(parse_config("oops").is_err());
        assert_eq!(parse_config("n_test = 5").unwrap()[0].0, "n-test");
    }

    #[test]
    fn expansion_goes_after_subcommand() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.cfg");
        std::fs::write(&p, "kmax = 7\n").unwrap();
        let argv = v(&["sphinv", "--threads", "2", "gamma", "--config", p.to_str().unwrap(), "--kmax", "9"]);
        let out = expand_config(&argv, &["gamma"]).unwrap();
        assert_eq!(out, v(&["sphinv", "--threads", "2", "gamma", "--kmax", "7", "--kmax", "9"]));
        let plain = v(&["sphinv", "gamma"]);
        assert_eq!(expand_config(&plain, &["gamma"]).unwrap(), plain);
    }

    #[test]
    fn lists() {
        assert_eq!(parse_usize_list("100, 200,400").unwrap(), vec![100, 200, 400]);
        assert_eq!(parse_u64_list("0..3,7").unwrap(), vec![0, 1, 2, 7]);
        assert!(parse_usize_list("").is_err());
        assert_eq!(parse_f64_list("1e-2,0.5").unwrap(), vec![0.01, 0.5]);
        let g = parse_f64_list("1e-8:1:12").unwrap();
        assert_eq!(g.len(), 12);
        assert!((g[0] - 1e-8).abs() < 1e-20 && (g[11] - 1.0).abs() < 1e-12);
        assert!(parse_f64_list("0:1:3").is_err());
    }
}
