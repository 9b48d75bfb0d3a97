//! Loading inputs: JSON files, inline algebras and generated spaces.
use std::fs;
use std::path::{Path, PathBuf};

use qmetric::algebra::Algebra;
use qmetric::metric::FiniteMetricSpace;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;

use crate::CliError;

/// Every file read during a run, in order, for the config hash.
#[derive(Default)]
pub struct Inputs {
    pub files: Vec<(PathBuf, Vec<u8>)>,
}

impl Inputs {
    pub fn read(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        self.files.push((path.to_path_buf(), bytes.clone()));
        Ok(bytes)
    }

    /// Parse a file, also accepting a qmetric report whose `result` is the payload.
    pub fn json<T: DeserializeOwned>(&mut self, path: &Path) -> Result<T, CliError> {
        let bytes = self.read(path)?;
        let err = |e: serde_json::Error| CliError::Input(format!("{}: {e}", path.display()));
        match serde_json::from_slice(&bytes) {
            Ok(v) => Ok(v),
            Err(e) => match serde_json::from_slice::<serde_json::Value>(&bytes) {
                Ok(serde_json::Value::Object(mut m)) if m.get("tool").and_then(|t| t.as_str()) == Some("qmetric") => {
                    serde_json::from_value(m.remove("result").unwrap_or_default()).map_err(err)
                }
                _ => Err(err(e)),
            },
        }
    }

    pub fn value(&mut self, path: &Path) -> Result<serde_json::Value, CliError> {
        self.json(path)
    }

    /// `2,3` describes M_2 + M_3 inline; anything else is a JSON file.
    pub fn algebra(&mut self, arg: &str) -> Result<Algebra, CliError> {
        if !arg.is_empty() && arg.split(',').all(|p| p.trim().parse::<usize>().is_ok()) {
            let blocks = arg.split(',').map(|p| p.trim().parse().expect("checked")).collect();
            return Ok(Algebra::new(blocks)?);
        }
        self.json(Path::new(arg))
    }

    pub fn space(&mut self, file: Option<&Path>, generator: Option<&str>, seed: u64) -> Result<FiniteMetricSpace, CliError> {
        match (file, generator) {
            (Some(f), None) => self.json(f),
            (None, Some(g)) => generate(g, seed),
            _ => Err(CliError::Input("give exactly one of --space and --gen".into())),
        }
    }
}

/// `circle-chord:N`, `circle-arc:N`, `interval:N` or `random:N`, with an
/// optional `@D` suffix rescaling to diameter D.
pub fn generate(spec: &str, seed: u64) -> Result<FiniteMetricSpace, CliError> {
    let bad = || CliError::Input(format!("bad generator `{spec}`; expected e.g. circle-chord:8 or interval:5@1"));
    let (body, diameter) = match spec.split_once('@') {
        Some((b, d)) => (b, Some(d.parse::<f64>().map_err(|_| bad())?)),
        None => (spec, None),
    };
    let (kind, n) = body.split_once(':').ok_or_else(bad)?;
    let n: usize = n.parse().map_err(|_| bad())?;
    let space = match kind {
        "circle-chord" => FiniteMetricSpace::circle_chord(n)?,
        "circle-arc" => FiniteMetricSpace::circle_arc(n)?,
        "interval" => FiniteMetricSpace::interval(n)?,
        "random" => FiniteMetricSpace::random_planar(n, &mut ChaCha8Rng::seed_from_u64(seed))?,
        _ => return Err(bad()),
    };
    Ok(match diameter {
        Some(d) => space.with_diameter(d)?,
        None => space,
    })
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| CliError::Input(format!("`{p}` is not a number"))))
        .collect()
}
