//! Job configuration: line-oriented `key = value` text with a `[map]`
//! section of `term = re_a im_a / re_p im_p` lines.
//!
//! ```text
//! # two intervals on the real axis
//! kmax = 5
//! nodes = 4096
//! bounds_csv = table1.csv
//!
//! [map]
//! term = 0.3 0 / -1 0
//! term = 0.2 0 / 1 0
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use capax_core::boundary::validate_node_count;
use capax_core::{Complex, RationalMapPF, Term};
use thiserror::Error;

pub const DEFAULT_KMAX: usize = 5;
pub const DEFAULT_NODES: usize = 4096;
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Artifact {
    BoundsCsv,
    BoundaryCsv,
    BoundarySvg,
    VerdictText,
}

impl Artifact {
    fn key(self) -> &'static str {
        match self {
            Artifact::BoundsCsv => "bounds_csv",
            Artifact::BoundaryCsv => "boundary_csv",
            Artifact::BoundarySvg => "boundary_svg",
            Artifact::VerdictText => "verdict_text",
        }
    }

    const ALL: [Artifact; 4] = [
        Artifact::BoundsCsv,
        Artifact::BoundaryCsv,
        Artifact::BoundarySvg,
        Artifact::VerdictText,
    ];
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("no map given; use --map or a [map] section")]
    MissingMap,
    #[error("invalid map: {0}")]
    InvalidMap(#[from] capax_core::Error),
    #[error("kmax must be at least 1")]
    InvalidKmax,
    #[error("tol must be a positive number")]
    InvalidTol,
}

/// Where each requested artifact goes; `None` means standard output.
pub type Outputs = BTreeMap<Artifact, Option<PathBuf>>;

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub map: RationalMapPF,
    pub kmax: usize,
    pub nodes: usize,
    pub tol: f64,
    pub outputs: Outputs,
}

impl JobConfig {
    pub fn new(map: RationalMapPF) -> Self {
        JobConfig {
            map,
            kmax: DEFAULT_KMAX,
            nodes: DEFAULT_NODES,
            tol: DEFAULT_TOL,
            outputs: Outputs::new(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.kmax < 1 {
            return Err(ConfigError::InvalidKmax);
        }
        validate_node_count(self.nodes)?;
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(ConfigError::InvalidTol);
        }
        Ok(())
    }
}

/// The contents of a config file, before command-line overrides.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub terms: Vec<Term>,
    pub kmax: Option<usize>,
    pub nodes: Option<usize>,
    pub tol: Option<f64>,
    pub outputs: Outputs,
}

impl ConfigFile {
    pub fn map(&self) -> Result<Option<RationalMapPF>, ConfigError> {
        if self.terms.is_empty() {
            return Ok(None);
        }
        Ok(Some(RationalMapPF::new(self.terms.clone())?))
    }
}

pub fn parse_config(text: &str) -> Result<ConfigFile, ConfigError> {
    let mut cfg = ConfigFile::default();
    let mut in_map = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let fail = |message: String| ConfigError::Syntax {
            line: line_no,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if line == "[map]" {
                in_map = true;
                continue;
            }
            return Err(fail(format!("unknown section {line}")));
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| fail("expected key = value".into()))?;
        if in_map {
            if key != "term" {
                return Err(fail(format!("unknown key '{key}' in [map]")));
            }
            cfg.terms.push(parse_term(value).map_err(fail)?);
            continue;
        }
        let number = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| fail(format!("'{v}' is not a number")))
        };
        let integer = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| fail(format!("'{v}' is not an integer")))
        };
        match key {
            "kmax" => cfg.kmax = Some(integer(value)?),
            "nodes" => cfg.nodes = Some(integer(value)?),
            "tol" => cfg.tol = Some(number(value)?),
            _ => {
                let artifact = Artifact::ALL
                    .into_iter()
                    .find(|a| a.key() == key)
                    .ok_or_else(|| fail(format!("unknown key '{key}'")))?;
                if value.is_empty() {
                    return Err(fail(format!("empty path for {key}")));
                }
                cfg.outputs.insert(artifact, Some(PathBuf::from(value)));
            }
        }
    }
    Ok(cfg)
}

/// `re_a im_a / re_p im_p`.
fn parse_term(value: &str) -> Result<Term, String> {
    let (a, p) = value.split_once('/').ok_or("expected 're_a im_a / re_p im_p'")?;
    let pair = |s: &str| -> Result<Complex, String> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let [re, im] = parts[..] else {
            return Err(format!("expected two numbers, found '{}'", s.trim()));
        };
        let parse = |x: &str| x.parse::<f64>().map_err(|_| format!("'{x}' is not a number"));
        Ok(Complex::new(parse(re)?, parse(im)?))
    };
    Ok(Term::new(pair(a)?, pair(p)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_file() {
        let text = "\
# comment
kmax = 7
nodes = 2048   # trailing
tol = 1e-8
bounds_csv = out/b.csv
boundary_svg = pic.svg

[map]
term = 0.4 0 / 0 0
term = 0.4 0 / 6 0
term = 0.4 0 / 1 1
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.kmax, Some(7));
        assert_eq!(cfg.nodes, Some(2048));
        assert_eq!(cfg.tol, Some(1e-8));
        assert_eq!(
            cfg.outputs[&Artifact::BoundsCsv],
            Some(PathBuf::from("out/b.csv"))
        );
        assert_eq!(
            cfg.outputs[&Artifact::BoundarySvg],
            Some(PathBuf::from("pic.svg"))
        );
        let map = cfg.map().unwrap().unwrap();
        assert_eq!(map.poles()[2], Complex::new(1.0, 1.0));
    }

    #[test]
    fn reports_the_offending_line() {
        let bad = [
            ("kmax = x", 1),
            ("\nfoo = 1", 2),
            ("[map]\nterm = 1 0 / 2", 2),
            ("[other]", 1),
            ("kmax 5", 1),
        ];
        for (text, line) in bad {
            match parse_config(text) {
                Err(ConfigError::Syntax { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn duplicate_poles_are_rejected() {
        let cfg = parse_config("[map]\nterm = 1 0 / 2 0\nterm = 1 0 / 2 0").unwrap();
        assert!(matches!(cfg.map(), Err(ConfigError::InvalidMap(_))));
    }

    #[test]
    fn job_validation() {
        let map = RationalMapPF::from_real(&[(0.5, 0.0)]).unwrap();
        let mut job = JobConfig::new(map);
        assert!(job.validate().is_ok());
        job.nodes = 1000;
        assert!(job.validate().is_err());
        job.nodes = 64;
        job.kmax = 0;
        assert_eq!(job.validate(), Err(ConfigError::InvalidKmax));
        job.kmax = 1;
        job.tol = 0.0;
        assert_eq!(job.validate(), Err(ConfigError::InvalidTol));
    }
}
