//! Flat `key = value` run description; `#` starts a comment.
//!
//! ```text
//! dimension = 2
//! family = pauli-polynomial      # pauli-polynomial | pauli-sinusoid | constant | random
//! coefficients = x: 1.0 0.5; z: 0 1
//! x = 0.3                        # or t = <duration>
//! n_max = 4
//! grid = 16
//! tol = 1e-10
//! seed = 7                       # random family only
//! ```
//!
//! Polynomial coefficients are `c0 c1 …` in ascending powers of `t`, sinusoid
//! coefficients are `amplitude frequency phase`, constant coefficients are a
//! single number. Labels are the Pauli components `x`, `y`, `z`.

use std::collections::HashMap;
use std::str::FromStr;

use serde::Serialize;

use super::generator::{random_generator, Envelope, GeneratorFunction};
use super::magnus::MAX_TREE_ORDER;
use super::quadrature::QuadratureConfig;
use super::validation::{validate_bounds, ValidationReport};
use super::NumericError;
use crate::bounds::DELTA_XI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    PauliPolynomial,
    PauliSinusoid,
    Constant,
    Random,
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pauli-polynomial" => Ok(Family::PauliPolynomial),
            "pauli-sinusoid" => Ok(Family::PauliSinusoid),
            "constant" => Ok(Family::Constant),
            "random" => Ok(Family::Random),
            other => Err(format!(
                "unknown family `{other}` (expected pauli-polynomial, pauli-sinusoid, constant or random)"
            )),
        }
    }
}

/// Either the duration or the target value of `x = δ_ξ h_max t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Span {
    T(f64),
    X(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub dimension: usize,
    pub family: Family,
    pub coefficients: Vec<(char, Vec<f64>)>,
    pub span: Span,
    pub n_max: usize,
    pub grid: usize,
    pub tol: f64,
    pub seed: u64,
}

const KEYS: [&str; 9] = [
    "dimension",
    "family",
    "coefficients",
    "t",
    "x",
    "n_max",
    "grid",
    "tol",
    "seed",
];

fn err(line: usize, message: impl Into<String>) -> NumericError {
    NumericError::Config {
        line: Some(line),
        message: message.into(),
    }
}

fn whole(message: impl Into<String>) -> NumericError {
    NumericError::Config {
        line: None,
        message: message.into(),
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<T, NumericError> {
    raw.parse()
        .map_err(|_| err(line, format!("cannot parse `{raw}` as a value for `{key}`")))
}

fn parse_coefficients(line: usize, raw: &str) -> Result<Vec<(char, Vec<f64>)>, NumericError> {
    let mut out: Vec<(char, Vec<f64>)> = Vec::new();
    for part in raw.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (label, values) = part
            .split_once(':')
            .ok_or_else(|| err(line, format!("coefficient group `{part}` lacks a `label:`")))?;
        let label = match label.trim() {
            "x" => 'x',
            "y" => 'y',
            "z" => 'z',
            other => return Err(err(line, format!("unknown component `{other}`"))),
        };
        if out.iter().any(|(l, _)| *l == label) {
            return Err(err(line, format!("component `{label}` given twice")));
        }
        let values = values
            .split_whitespace()
            .map(|v| parse_value::<f64>(line, "coefficients", v))
            .collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(err(
                line,
                format!("component `{label}` needs finite numbers"),
            ));
        }
        out.push((label, values));
    }
    Ok(out)
}

impl SimulationConfig {
    pub fn parse(text: &str) -> Result<Self, NumericError> {
        let mut seen: HashMap<&str, (usize, String)> = HashMap::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim();
            let known = KEYS
                .iter()
                .find(|k| **k == key)
                .ok_or_else(|| err(line, format!("unknown key `{key}`")))?;
            if let Some((first, _)) = seen.get(known) {
                return Err(err(line, format!("`{key}` already set on line {first}")));
            }
            seen.insert(known, (line, value.trim().to_string()));
        }

        let get = |k: &str| seen.get(k).map(|(l, v)| (*l, v.as_str()));
        let (fl, fv) = get("family").ok_or_else(|| whole("missing `family`"))?;
        let family: Family = fv.parse().map_err(|m: String| err(fl, m))?;

        let dimension = match get("dimension") {
            Some((l, v)) => {
                let d: usize = parse_value(l, "dimension", v)?;
                if !(1..=8).contains(&d) {
                    return Err(err(l, format!("dimension must be 1 to 8, got {d}")));
                }
                if family != Family::Random && d != 2 {
                    return Err(err(l, "Pauli and constant families are 2x2"));
                }
                d
            }
            None => 2,
        };

        let coefficients = match get("coefficients") {
            Some((l, v)) => {
                if family == Family::Random {
                    return Err(err(l, "the random family takes no coefficients"));
                }
                let c = parse_coefficients(l, v)?;
                for (label, values) in &c {
                    let ok = match family {
                        Family::PauliSinusoid => values.len() == 3,
                        Family::Constant => values.len() == 1,
                        _ => true,
                    };
                    if !ok {
                        return Err(err(
                            l,
                            format!("component `{label}` has the wrong number of values for this family"),
                        ));
                    }
                }
                c
            }
            None if family == Family::Random => Vec::new(),
            None => return Err(whole("missing `coefficients`")),
        };

        let span = match (get("t"), get("x")) {
            (Some(_), Some((l, _))) => return Err(err(l, "give either `t` or `x`, not both")),
            (Some((l, v)), None) => {
                if family == Family::Random {
                    return Err(err(l, "the random family is specified by `x`"));
                }
                let t: f64 = parse_value(l, "t", v)?;
                if (t.is_nan() || t <= 0.0) || !t.is_finite() {
                    return Err(err(l, "`t` must be positive"));
                }
                Span::T(t)
            }
            (None, Some((l, v))) => {
                let x: f64 = parse_value(l, "x", v)?;
                if (x.is_nan() || x <= 0.0) || !x.is_finite() {
                    return Err(err(l, "`x` must be positive"));
                }
                Span::X(x)
            }
            (None, None) => return Err(whole("missing `t` or `x`")),
        };

        let (nl, nv) = get("n_max").ok_or_else(|| whole("missing `n_max`"))?;
        let n_max: usize = parse_value(nl, "n_max", nv)?;
        if !(1..=MAX_TREE_ORDER).contains(&n_max) {
            return Err(err(nl, format!("n_max must be 1 to {MAX_TREE_ORDER}")));
        }
        let default = QuadratureConfig::default();
        let grid = match get("grid") {
            Some((l, v)) => {
                let g: usize = parse_value(l, "grid", v)?;
                if g < 8 {
                    return Err(err(l, "grid must be at least 8"));
                }
                g
            }
            None => default.grid_points,
        };
        let tol = match get("tol") {
            Some((l, v)) => {
                let t: f64 = parse_value(l, "tol", v)?;
                if t.is_nan() || t <= 0.0 {
                    return Err(err(l, "tol must be positive"));
                }
                t
            }
            None => default.tolerance,
        };
        let seed = match get("seed") {
            Some((l, v)) => {
                if family != Family::Random {
                    return Err(err(l, "`seed` applies to the random family only"));
                }
                parse_value(l, "seed", v)?
            }
            None => 0,
        };
        Ok(Self {
            dimension,
            family,
            coefficients,
            span,
            n_max,
            grid,
            tol,
            seed,
        })
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig {
            grid_points: self.grid,
            tolerance: self.tol,
            ..QuadratureConfig::default()
        }
    }

    /// The generator and the duration it is run for.
    pub fn build(&self) -> Result<(GeneratorFunction, f64), NumericError> {
        if self.family == Family::Random {
            let Span::X(x) = self.span else {
                return Err(whole("the random family is specified by `x`"));
            };
            return Ok((random_generator(self.dimension, x, self.seed)?, 1.0));
        }
        let envelope = |values: &[f64]| match self.family {
            Family::PauliSinusoid => Envelope::Sinusoid {
                amplitude: values[0],
                frequency: values[1],
                phase: values[2],
            },
            _ => Envelope::Polynomial {
                coefficients: values.to_vec(),
            },
        };
        let pick = |label: char| {
            self.coefficients
                .iter()
                .find(|(l, _)| *l == label)
                .map(|(_, v)| envelope(v))
        };
        let gen = GeneratorFunction::pauli(pick('x'), pick('y'), pick('z'));
        let t = match self.span {
            Span::T(t) => t,
            Span::X(x) => duration_for(&gen, x)?,
        };
        Ok((gen, t))
    }
}

/// Solves `δ_ξ h_max(t) t = x`; the left side is non-decreasing in `t`.
fn duration_for(gen: &GeneratorFunction, x: f64) -> Result<f64, NumericError> {
    let f = |t: f64| DELTA_XI * gen.h_max(t) * t - x;
    let mut hi = 1.0;
    let mut expansions = 0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 200 {
            return Err(whole("generator too small to reach the requested x"));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Parses, builds and validates.
pub fn run_simulation(text: &str) -> Result<(SimulationConfig, ValidationReport), NumericError> {
    let config = SimulationConfig::parse(text)?;
    let (gen, t) = config.build()?;
    let report = validate_bounds(&gen, t, config.n_max, &config.quadrature())?;
    Ok((config, report))
}
