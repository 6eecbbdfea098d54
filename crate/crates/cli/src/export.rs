//! CSV and JSON writers. Every real is printed with 17 significant digits in
//! CSV and in shortest round-trip form in JSON, so both re-parse to the same bits.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use fisher_geodesics::{GeodesicState, Space};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::experiment::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

/// A named output file held in memory until the run succeeds.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    pub fn new(name: impl Into<String>, contents: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            contents: contents.into(),
        }
    }
}

pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// In-memory CSV table.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(header.iter().map(|s| s.as_ref()))
            .expect("writing to memory");
        Self { writer }
    }

    pub fn row<S: AsRef<[u8]>>(&mut self, fields: impl IntoIterator<Item = S>) {
        self.writer.write_record(fields).expect("writing to memory");
    }

    pub fn finish(self, name: impl Into<String>) -> Artifact {
        let bytes = self.writer.into_inner().expect("flushing to memory");
        Artifact::new(name, String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// `prefix_1, ..., prefix_n`.
pub fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}_{i}")).collect()
}

/// Archival form of one geodesic: the closed-form parameters and sampled frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryDoc {
    pub config: BTreeMap<String, String>,
    pub space: Space,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Frame time (shortest round-trip text) to density values, in time order.
    pub frames: Map<String, Value>,
}

impl TrajectoryDoc {
    pub fn new(config: BTreeMap<String, String>, state: &GeodesicState, frames: &[(f64, Vec<f64>)]) -> Self {
        let frames = frames
            .iter()
            .map(|(t, values)| (format!("{t:?}"), Value::from(values.clone())))
            .collect();
        Self {
            config,
            space: state.space().clone(),
            alpha: state.alpha().to_vec(),
            beta: state.beta().to_vec(),
            frames,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable document");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Frames as `(t, values)`; `None` if any entry is malformed.
    pub fn frame_values(&self) -> Option<Vec<(f64, Vec<f64>)>> {
        self.frames
            .iter()
            .map(|(t, v)| {
                let t: f64 = t.parse().ok()?;
                let values = v
                    .as_array()?
                    .iter()
                    .map(Value::as_f64)
                    .collect::<Option<Vec<f64>>>()?;
                Some((t, values))
            })
            .collect()
    }

    /// The geodesic rebuilt from the archived parameters.
    pub fn state(&self) -> fisher_geodesics::Result<GeodesicState> {
        GeodesicState::from_parameters(self.space.clone(), self.alpha.clone(), self.beta.clone())
    }
}

pub fn json_artifact(name: impl Into<String>, value: &impl Serialize) -> Artifact {
    let mut s = serde_json::to_string_pretty(value).expect("serializable document");
    s.push('\n');
    Artifact::new(name, s)
}

/// Writes artifacts one at a time, creating `dir` first.
pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, RunError> {
    let io = |path: &Path, e: std::io::Error| RunError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    artifacts
        .iter()
        .map(|a| {
            let path = dir.join(&a.name);
            std::fs::write(&path, &a.contents).map_err(|e| io(&path, e))?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_keep_seventeen_digits() {
        let x = 1.0 / 3.0;
        let s = real(x);
        assert_eq!(s, "3.3333333333333331e-1");
        assert_eq!(s.parse::<f64>().unwrap(), x);
    }

    #[test]
    fn table_writes_header_and_rows() {
        let mut t = Table::new(&["t", "x"]);
        t.row([real(0.0), real(0.5)]);
        let a = t.finish("a.csv");
        assert_eq!(a.contents, "t,x\n0.0000000000000000e0,5.0000000000000000e-1\n");
    }
}
