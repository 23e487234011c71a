//! Locale-independent numeric CSV and the versioned JSON model format.
//!
//! CSV uses '.' decimals, ',' separators and '\n' line endings; an optional
//! single header row is detected by its first line failing to parse as
//! numbers. Floats are written in Rust's shortest round-trip decimal form,
//! so write -> read -> write is byte-stable.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aca::AcaModel;
use crate::data::DataMatrix;
use crate::depth::{DepthNotion, OptimizerConfig, SearchAlgorithm, StartRule};
use crate::error::Error;
use crate::subspace::Direction;
use crate::Result;

/// Parsed CSV: optional header names plus numeric rows.
#[derive(Debug, Clone)]
pub struct CsvData {
    pub header: Option<Vec<String>>,
    pub rows: Vec<Vec<f64>>,
    pub ncols: usize,
}

impl CsvData {
    /// The rows as a validated matrix; fails on zero rows.
    pub fn to_matrix(&self) -> Result<DataMatrix> {
        if self.rows.is_empty() {
            return Err(Error::data("input has no data rows"));
        }
        let flat: Vec<f64> = self.rows.iter().flatten().copied().collect();
        DataMatrix::from_rows(self.rows.len(), self.ncols, &flat)
    }

    /// Header names, or x1..xd when the file had no header.
    pub fn variable_names(&self) -> Vec<String> {
        match &self.header {
            Some(h) => h.clone(),
            None => (1..=self.ncols).map(|j| format!("x{j}")).collect(),
        }
    }
}

fn parse_field(tok: &str) -> Option<f64> {
    let v: f64 = tok.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

/// Reads a numeric CSV file. Errors carry the 1-based physical line number
/// of the offending row (the header, when present, is line 1).
pub fn read_csv(path: &Path) -> Result<CsvData> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::data(format!("{}: {e}", path.display())))?;
    let mut lines: Vec<&str> = text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).collect();
    if lines.last() == Some(&"") {
        lines.pop();
    }
    if lines.is_empty() {
        return Ok(CsvData {
            header: None,
            rows: Vec::new(),
            ncols: 0,
        });
    }
    let first: Vec<&str> = lines[0].split(',').collect();
    let ncols = first.len();
    let mut header = None;
    let mut rows = Vec::new();
    let mut start = 0;
    let parsed_first: Option<Vec<f64>> = first.iter().map(|t| parse_field(t)).collect();
    match parsed_first {
        Some(row) => rows.push(row),
        None => {
            header = Some(first.iter().map(|t| t.trim().to_string()).collect());
        }
    }
    start += 1;
    for (i, line) in lines.iter().enumerate().skip(start) {
        let lineno = i + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != ncols {
            return Err(Error::data(format!(
                "{}: line {lineno}: expected {ncols} fields, got {}",
                path.display(),
                fields.len()
            )));
        }
        let mut row = Vec::with_capacity(ncols);
        for (j, tok) in fields.iter().enumerate() {
            match parse_field(tok) {
                Some(v) => row.push(v),
                None => {
                    return Err(Error::data(format!(
                        "{}: line {lineno}: field {} '{}' is not a finite number",
                        path.display(),
                        j + 1,
                        tok.trim()
                    )));
                }
            }
        }
        rows.push(row);
    }
    Ok(CsvData {
        header,
        rows,
        ncols,
    })
}

/// Writes rows (with an optional header) as CSV; floats in shortest
/// round-trip form, '\n' line endings, trailing newline.
pub fn write_csv(path: &Path, header: Option<&[String]>, rows: &[Vec<f64>]) -> Result<()> {
    let mut out = String::new();
    if let Some(names) = header {
        out.push_str(&names.join(","));
        out.push('\n');
    }
    let mut buf = String::new();
    for row in rows {
        buf.clear();
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                buf.push(',');
            }
            buf.push_str(&format!("{v}"));
        }
        out.push_str(&buf);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::data(format!("{}: {e}", path.display())))
}

/// Optimizer settings as stored on disk; the seed lives beside it at the
/// document's top level.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub algorithm: String,
    pub budget_k: usize,
    pub restarts: usize,
    pub beta: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub rho: f64,
    pub sigma: f64,
    pub tol: f64,
    pub start: String,
}

/// On-disk model document, format_version 1. Unknown and missing keys are
/// both rejected by name on load, and the components are revalidated as an
/// orthonormal set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: u32,
    pub ambient_dim: usize,
    pub depth_notion: String,
    pub components: Vec<Vec<f64>>,
    pub min_depths: Vec<f64>,
    pub anchor_rows: Vec<usize>,
    pub config: ConfigFile,
    pub seed: u64,
}

impl ModelFile {
    pub fn from_model(model: &AcaModel) -> ModelFile {
        let config = model.config();
        ModelFile {
            format_version: 1,
            ambient_dim: model.ambient_dim(),
            depth_notion: model.notion().as_str().to_string(),
            components: model
                .components()
                .iter()
                .map(|c| c.coords().iter().copied().collect())
                .collect(),
            min_depths: model.min_depths().to_vec(),
            anchor_rows: model.anchor_rows().to_vec(),
            config: ConfigFile {
                algorithm: config.algorithm.as_str().to_string(),
                budget_k: config.budget_k,
                restarts: config.restarts,
                beta: config.beta,
                alpha: config.alpha,
                gamma: config.gamma,
                rho: config.rho,
                sigma: config.sigma,
                tol: config.tol,
                start: config.start.as_str().to_string(),
            },
            seed: config.seed,
        }
    }

    pub fn into_model(self) -> Result<AcaModel> {
        if self.format_version != 1 {
            return Err(Error::data(format!(
                "unsupported format_version {}, expected 1",
                self.format_version
            )));
        }
        let notion = DepthNotion::parse(&self.depth_notion).map_err(data_err)?;
        let config = OptimizerConfig {
            algorithm: SearchAlgorithm::parse(&self.config.algorithm).map_err(data_err)?,
            budget_k: self.config.budget_k,
            restarts: self.config.restarts,
            beta: self.config.beta,
            alpha: self.config.alpha,
            gamma: self.config.gamma,
            rho: self.config.rho,
            sigma: self.config.sigma,
            tol: self.config.tol,
            start: StartRule::parse(&self.config.start).map_err(data_err)?,
            seed: self.seed,
        };
        let mut components = Vec::with_capacity(self.components.len());
        for (i, coords) in self.components.iter().enumerate() {
            if coords.len() != self.ambient_dim {
                return Err(Error::data(format!(
                    "component {} has {} coordinates, ambient_dim is {}",
                    i + 1,
                    coords.len(),
                    self.ambient_dim
                )));
            }
            let v = nalgebra::DVector::from_vec(coords.clone());
            let norm = v.norm();
            if !norm.is_finite() || (norm - 1.0).abs() > 1e-8 {
                return Err(Error::data(format!(
                    "component {} is not unit-norm (|v| = {norm})",
                    i + 1
                )));
            }
            // Stored coordinates are kept verbatim when already unit, so a
            // load -> save cycle reproduces the file byte for byte; only
            // slightly off-norm inputs are renormalized.
            let dir = match Direction::new(v.clone()) {
                Ok(d) => d,
                Err(_) => Direction::normalized(v).map_err(data_err)?,
            };
            components.push(dir);
        }
        AcaModel::from_parts(
            self.ambient_dim,
            components,
            self.min_depths,
            self.anchor_rows,
            notion,
            config,
        )
        .map_err(data_err)
    }
}

fn data_err(e: Error) -> Error {
    Error::data(e.to_string())
}

/// Serializes a model to pretty JSON (stable field order, trailing newline).
pub fn save_model(model: &AcaModel, path: &Path) -> Result<()> {
    let file = ModelFile::from_model(model);
    let mut json = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::data(format!("model serialization: {e}")))?;
    json.push('\n');
    std::fs::write(path, json).map_err(|e| Error::data(format!("{}: {e}", path.display())))
}

/// Loads and revalidates a model document.
pub fn load_model(path: &Path) -> Result<AcaModel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::data(format!("{}: {e}", path.display())))?;
    let file: ModelFile = serde_json::from_str(&text)
        .map_err(|e| Error::data(format!("{}: {e}", path.display())))?;
    file.into_model()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depth::DepthNotion;
    use tempfile::tempdir;

    fn write(path: &Path, text: &str) {
        std::fs::write(path, text).unwrap();
    }

    #[test]
    fn header_detection_and_values() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("a.csv");
        write(&p, "a,b\n1.5,2\n-3e2,0.25\n");
        let csv = read_csv(&p).unwrap();
        assert_eq!(csv.header, Some(vec!["a".to_string(), "b".to_string()]));
        assert_eq!(csv.rows, vec![vec![1.5, 2.0], vec![-300.0, 0.25]]);
        assert_eq!(csv.variable_names(), vec!["a", "b"]);

        let q = dir.path().join("b.csv");
        write(&q, "1,2\n3,4\n");
        let csv = read_csv(&q).unwrap();
        assert_eq!(csv.header, None);
        assert_eq!(csv.rows.len(), 2);
        assert_eq!(csv.variable_names(), vec!["x1", "x2"]);
    }

    #[test]
    fn malformed_rows_name_their_line() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        write(&p, "a,b\n1,2\n3,oops\n");
        let e = read_csv(&p).unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        assert!(e.to_string().contains("oops"), "{e}");

        write(&p, "1,2\n3\n");
        let e = read_csv(&p).unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert!(e.to_string().contains("expected 2 fields"), "{e}");

        write(&p, "1,2\n3,inf\n");
        let e = read_csv(&p).unwrap_err();
        assert!(e.to_string().contains("not a finite number"), "{e}");
        assert!(matches!(e, Error::Data(_)));
    }

    #[test]
    fn empty_and_header_only_files() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("empty.csv");
        write(&p, "");
        let csv = read_csv(&p).unwrap();
        assert!(csv.rows.is_empty());
        assert!(csv.to_matrix().is_err());

        write(&p, "a,b\n");
        let csv = read_csv(&p).unwrap();
        assert!(csv.rows.is_empty());
        assert_eq!(csv.ncols, 2);
    }

    #[test]
    fn csv_round_trip_is_byte_stable() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("rt.csv");
        let rows = vec![
            vec![1.0 / 3.0, -0.1, 1e-12],
            vec![123456.789, 2.5e17, -0.0],
        ];
        let header = vec!["u".to_string(), "v".to_string(), "w".to_string()];
        write_csv(&p, Some(&header), &rows).unwrap();
        let csv = read_csv(&p).unwrap();
        assert_eq!(csv.rows, rows);
        let q = dir.path().join("rt2.csv");
        write_csv(&q, csv.header.as_deref(), &csv.rows).unwrap();
        assert_eq!(
            std::fs::read(&p).unwrap(),
            std::fs::read(&q).unwrap()
        );
    }

    fn tiny_model() -> AcaModel {
        let data = DataMatrix::from_rows(
            6,
            2,
            &[0.0, 0.0, 1.0, 0.2, -1.0, -0.2, 0.5, 0.1, -0.5, 0.0, 0.0, 9.0],
        )
        .unwrap();
        let config = OptimizerConfig {
            budget_k: 200,
            restarts: 4,
            seed: 11,
            ..OptimizerConfig::default()
        };
        crate::aca::fit(&data, 2, DepthNotion::Projection, &config).unwrap()
    }

    #[test]
    fn model_save_load_round_trip_is_byte_identical() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("m.json");
        let model = tiny_model();
        save_model(&model, &p).unwrap();
        let loaded = load_model(&p).unwrap();
        let q = dir.path().join("m2.json");
        save_model(&loaded, &q).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&q).unwrap());
        assert_eq!(loaded.ambient_dim(), model.ambient_dim());
        assert_eq!(loaded.min_depths(), model.min_depths());
        assert_eq!(loaded.anchor_rows(), model.anchor_rows());
        for (a, b) in loaded.components().iter().zip(model.components()) {
            assert_eq!(a.coords(), b.coords());
        }
    }

    #[test]
    fn unknown_and_missing_keys_are_named() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("m.json");
        let model = tiny_model();
        save_model(&model, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();

        let with_unknown = text.replacen("\"format_version\"", "\"bogus_key\": 1,\n  \"format_version\"", 1);
        write(&p, &with_unknown);
        let e = load_model(&p).unwrap_err();
        assert!(e.to_string().contains("bogus_key"), "{e}");

        let without_depths = text.replacen("\"min_depths\"", "\"min_depths_gone\"", 1);
        write(&p, &without_depths);
        let e = load_model(&p).unwrap_err();
        assert!(e.to_string().contains("min_depths"), "{e}");
    }

    #[test]
    fn tampered_models_are_rejected() {
        let dir = tempdir().unwrap();
        let p = dir.path().join("m.json");
        let model = tiny_model();

        let mut file = ModelFile::from_model(&model);
        file.format_version = 2;
        assert!(file.clone().into_model().is_err());

        file = ModelFile::from_model(&model);
        file.components[0][0] += 0.5;
        assert!(file.clone().into_model().is_err());

        file = ModelFile::from_model(&model);
        file.components[1] = file.components[0].clone();
        let e = file.clone().into_model().unwrap_err();
        assert!(matches!(e, Error::Data(_)), "{e}");

        file = ModelFile::from_model(&model);
        file.depth_notion = "median".into();
        assert!(file.clone().into_model().is_err());

        save_model(&model, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        write(&p, &text.replace("\"pd\"", "\"qd\""));
        assert!(load_model(&p).is_err());
    }
}
