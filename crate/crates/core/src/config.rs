//! `key = value` configuration files for flow runs.
//!
//! Blank lines and text after `#` are ignored. Recognized keys: `shape`,
//! `N`, `s`, `alpha`, `delta`, `epsilon`, `dt`, `T`, `mode`, `lambda0`,
//! `on_threshold`, `tol`, `max_iter`, `area_tolerance`, `record_every`.
//! Missing keys keep their defaults.

use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::flow::FlowConfig;

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| Error::Parse { line, message: format!("`{key}`: {e}") })
}

pub fn parse_flow_config(text: &str) -> Result<FlowConfig> {
    let mut cfg = FlowConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::Parse { line, message: format!("expected `key = value`, got `{content}`") })?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "shape" => cfg.shape = value.parse().map_err(|e: Error| Error::Parse { line, message: e.to_string() })?,
            "N" => cfg.n = parse_value(line, key, value)?,
            "s" => cfg.s = parse_value(line, key, value)?,
            "alpha" => cfg.alpha = parse_value(line, key, value)?,
            "delta" => cfg.delta = parse_value(line, key, value)?,
            "epsilon" => cfg.epsilon = parse_value(line, key, value)?,
            "dt" => cfg.dt = parse_value(line, key, value)?,
            "T" => cfg.t_end = parse_value(line, key, value)?,
            "mode" => cfg.mode = value.parse().map_err(|e: Error| Error::Parse { line, message: e.to_string() })?,
            "lambda0" => cfg.lambda0 = parse_value(line, key, value)?,
            "on_threshold" => {
                cfg.on_threshold = value.parse().map_err(|e: Error| Error::Parse { line, message: e.to_string() })?
            }
            "tol" => cfg.tol = parse_value(line, key, value)?,
            "max_iter" => cfg.max_iter = parse_value(line, key, value)?,
            "area_tolerance" => cfg.area_tolerance = parse_value(line, key, value)?,
            "record_every" => cfg.record_every = parse_value(line, key, value)?,
            other => return Err(Error::Parse { line, message: format!("unknown key `{other}`") }),
        }
    }
    crate::geometry::validate_orders(cfg.s, cfg.alpha)?;
    cfg.budget()?;
    if cfg.n < crate::geometry::MIN_NODES {
        return Err(Error::TooFewNodes { min: crate::geometry::MIN_NODES, got: cfg.n });
    }
    Ok(cfg)
}

pub fn load_flow_config(path: &Path) -> Result<FlowConfig> {
    parse_flow_config(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{FlowMode, ThresholdPolicy};
    use crate::geometry::shapes::Shape;

    #[test]
    fn parses_all_spec_keys() {
        let text = "# run\nshape = ellipse:1,0.6\nN = 64\ns = 0.25\nalpha = 0.2\ndelta = 0.3\n\
                    epsilon = 0.02\ndt = 2e-3\nT = 0.05\nmode = volume_preserving # keep area\n\
                    lambda0 = 50\non_threshold = stop\n";
        let cfg = parse_flow_config(text).unwrap();
        assert_eq!(cfg.shape, Shape::Ellipse { a: 1.0, b: 0.6 });
        assert_eq!(cfg.n, 64);
        assert_eq!(cfg.mode, FlowMode::VolumePreserving);
        assert_eq!(cfg.on_threshold, ThresholdPolicy::Stop);
        assert_eq!(cfg.t_end, 0.05);
        assert_eq!(cfg.lambda0, 50.0);
    }

    #[test]
    fn empty_config_uses_defaults() {
        assert_eq!(parse_flow_config("").unwrap(), FlowConfig::default());
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!(parse_flow_config("N = 64\ncolour = red"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_flow_config("dt = fast"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_flow_config("delta = 0.01\nepsilon = 0.05").is_err());
    }
}
