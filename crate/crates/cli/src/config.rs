use std::path::Path;

use ltwist::report::{Format, RunConfig};
use ltwist::{Error, Result};

fn parse_list(v: &str) -> Result<Vec<u32>> {
    v.split(',')
        .map(|x| x.trim().parse().map_err(|_| Error::Parse(format!("bad list entry '{x}'"))))
        .collect()
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| Error::Parse(format!("bad value for {key}: '{v}'")))
}

/// Applies one `key = value` setting.
pub fn apply(cfg: &mut RunConfig, key: &str, value: &str) -> Result<()> {
    match key.trim().to_ascii_lowercase().replace('-', "_").as_str() {
        "moduli" => cfg.moduli = parse_list(value)?,
        "fock_moduli" => cfg.fock_moduli = parse_list(value)?,
        "cutoff" => cfg.cutoff = parse_num(key, value)?,
        "order" => cfg.order = parse_num(key, value)?,
        "terms" => cfg.terms = parse_num(key, value)?,
        "tol" => cfg.tol = parse_num(key, value)?,
        "precision" | "precision_bits" => cfg.precision_bits = parse_num(key, value)?,
        "format" => cfg.format = value.trim().parse::<Format>()?,
        "seed" => cfg.seed = parse_num(key, value)?,
        "jobs" => cfg.jobs = parse_num(key, value)?,
        "timings" => cfg.timings = parse_num(key, value)?,
        other => return Err(Error::Parse(format!("unknown config key '{other}'"))),
    }
    Ok(())
}

/// Flat `key = value` text; `#` starts a comment.
pub fn parse_text(text: &str, cfg: &mut RunConfig) -> Result<()> {
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", n + 1)))?;
        apply(cfg, k, v)?;
    }
    Ok(())
}

pub fn load(path: &Path, cfg: &mut RunConfig) -> Result<()> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_text(&text, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_settings() {
        let mut cfg = RunConfig::default();
        parse_text("# run\ncutoff = 20\nmoduli=5, 7\nformat = csv\ntol=1e-4\n", &mut cfg).unwrap();
        assert_eq!(cfg.cutoff, 20);
        assert_eq!(cfg.moduli, vec![5, 7]);
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.tol, 1e-4);
        assert!(parse_text("nonsense", &mut cfg).is_err());
        assert!(parse_text("colour = red", &mut cfg).is_err());
    }
}
